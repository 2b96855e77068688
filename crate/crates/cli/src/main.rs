use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use strato_shear::crocco::{solve_fd_newton, solve_shooting, CroccoProblem, CroccoSolution};
use strato_shear::limit::{epsilon_residual, EpsilonScaling};
use strato_shear::pipeline::{
    evaluate_record, parse_soundings, run_batch, sweep_tau_star, write_report_csv, write_report_json, write_sweep_csv,
    write_sweep_json, BatchConfig, SoundingRecord, SweepSpec, DEFAULT_ASPECT,
};
use strato_shear::thermo::{
    density_of_u, derived_constants, pressure_estimate, DerivedConstants, FreeStream, GasProfile, MoistureSpec,
    NormalizationMode,
};
use strato_shear::transform::{build_map, two_path_discrepancy, ScalarField};

mod config;

/// An error together with the exit status it maps to.
#[derive(Debug)]
pub struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<strato_shear::Error> for Failure {
    fn from(e: strato_shear::Error) -> Self {
        Failure {
            code: if e.is_numerical() { 2 } else { 1 },
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::input(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Shooting,
    Fd,
}

/// Shear-stress indicators for thin compressible atmospheric boundary layers.
///
/// Exit status: 0 success, 1 fatal input error, 2 numerical failure.
#[derive(Debug, Parser)]
#[command(name = "strato-shear", version)]
struct Cli {
    /// Gas profile: `paper-atmosphere` or a TOML file [env: STRATO_SHEAR_PROFILE]
    #[arg(long, global = true)]
    gas: Option<String>,
    /// normalized | paper-raw
    #[arg(long, global = true)]
    mode: Option<String>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Output file; standard output when absent
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// File of `key=value` defaults; command-line flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Clone)]
struct Scenario {
    /// Surface pressure [Pa]
    #[arg(long, default_value_t = 101_325.0)]
    p0: f64,
    /// Surface temperature [K]
    #[arg(long = "t0", default_value_t = 300.0)]
    t0: f64,
    /// Layer height [m]
    #[arg(long, default_value_t = 1000.0)]
    h: f64,
    /// Layer length [m], default 100 h
    #[arg(long = "length")]
    length: Option<f64>,
    /// Specific humidity [kg/kg]
    #[arg(long)]
    q: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form indicators for one scenario, or a `U,tau_star` table with --sweep
    Tau {
        #[command(flatten)]
        scenario: Scenario,
        /// Free-stream speed [m/s]
        #[arg(long, required_unless_present = "sweep")]
        u: Option<f64>,
        /// `U=start:stop:count`
        #[arg(long)]
        sweep: Option<String>,
        #[arg(long)]
        solve: bool,
        #[arg(long)]
        wall_stress: bool,
    },
    /// Evaluate a sounding CSV with header `station_id,p0,T0,U,h[,L][,q]`
    ///
    /// Report columns, in order: station_id, p0, T0, U, h, L, q, sigma0,
    /// tau_star_dry, tau_star_moist, rho_estimate, pressure_estimate,
    /// tau_wall, wall_stress, status, error. Shear values are in s⁻¹;
    /// tau_wall is filled with --solve and wall_stress with --wall-stress.
    Batch {
        input: PathBuf,
        #[arg(long)]
        solve: bool,
        #[arg(long)]
        wall_stress: bool,
        #[arg(long)]
        tol: Option<f64>,
        /// Run manifest; defaults to `<out>.manifest.json` when --out is given
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Solve the Crocco shear equation, from explicit (K, i0, U) or from a scenario
    SolveCrocco {
        #[command(flatten)]
        scenario: Scenario,
        #[arg(long)]
        u: f64,
        /// Coefficient K; taken from the scenario when absent
        #[arg(long)]
        k: Option<f64>,
        /// Enthalpy i0 [J/kg]; with --k, omitted means incompressible
        #[arg(long)]
        i0: Option<f64>,
        #[arg(long, value_enum, default_value_t = Method::Shooting)]
        method: Method,
        /// Node count of the difference method
        #[arg(long, default_value_t = 4001)]
        nodes: usize,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Build the Dorodnitzyn map for a scenario and report its checks
    TransformCheck {
        #[command(flatten)]
        scenario: Scenario,
        #[arg(long, default_value_t = 10.0)]
        u: f64,
        #[arg(long, default_value_t = 129)]
        nx: usize,
        #[arg(long, default_value_t = 65)]
        ny: usize,
        /// Pressure field CSV replacing the constant closure
        #[arg(long)]
        pressure: Option<PathBuf>,
        /// Density field CSV replacing the closure ρ(u(y))
        #[arg(long)]
        density: Option<PathBuf>,
    },
    /// Norms of the ε-rescaled shear equation for a fixed profile over several ε
    EpsilonSweep {
        #[command(flatten)]
        scenario: Scenario,
        #[arg(long, default_value_t = 10.0)]
        u: f64,
        #[arg(long, value_delimiter = ',', default_values_t = [1e-1, 1e-2, 1e-3, 1e-4])]
        eps: Vec<f64>,
        #[arg(long, default_value_t = 33)]
        nx: usize,
        #[arg(long, default_value_t = 65)]
        ny: usize,
    },
}

struct Settings {
    profile: GasProfile,
    mode: NormalizationMode,
    format: Format,
    out: Option<PathBuf>,
    file: BTreeMap<String, String>,
}

impl Settings {
    fn resolve(cli: &Cli) -> Result<Self, Failure> {
        let file = match &cli.config {
            Some(p) => config::read_config(p)?,
            None => BTreeMap::new(),
        };
        let gas = cli
            .gas
            .clone()
            .or_else(|| file.get("gas").cloned())
            .or_else(|| std::env::var(config::PROFILE_ENV).ok())
            .unwrap_or_else(|| GasProfile::PAPER_ATMOSPHERE.to_owned());
        let mode = match cli.mode.as_deref().or(file.get("mode").map(String::as_str)) {
            Some(m) => m.parse()?,
            None => NormalizationMode::default(),
        };
        let format = match (cli.format, file.get("format")) {
            (Some(f), _) => f,
            (None, Some(f)) => {
                Format::from_str(f, true).map_err(|_| Failure::input(format!("unknown format '{f}'")))?
            }
            (None, None) => Format::Csv,
        };
        Ok(Settings {
            profile: config::load_profile(&gas)?,
            mode,
            format,
            out: cli.out.clone(),
            file,
        })
    }

    fn flag(&self, given: bool, key: &str) -> Result<bool, Failure> {
        if given {
            return Ok(true);
        }
        match self.file.get(key) {
            Some(v) => v
                .parse()
                .map_err(|_| Failure::input(format!("config key {key}: expected true or false, got '{v}'"))),
            None => Ok(false),
        }
    }

    fn number(&self, given: Option<f64>, key: &str, default: f64) -> Result<f64, Failure> {
        if let Some(v) = given {
            return Ok(v);
        }
        match self.file.get(key) {
            Some(v) => v
                .parse()
                .map_err(|_| Failure::input(format!("config key {key}: cannot parse '{v}'"))),
            None => Ok(default),
        }
    }

    fn echo(&self) -> BTreeMap<String, String> {
        let mut m = self.file.clone();
        m.insert("gas".into(), self.profile.name.clone());
        m.insert("mode".into(), self.mode.as_str().into());
        m.insert("format".into(), format!("{:?}", self.format).to_lowercase());
        m
    }

    fn writer(&self) -> Result<Box<dyn Write>, Failure> {
        Ok(match &self.out {
            Some(p) => Box::new(BufWriter::new(
                File::create(p).map_err(|e| Failure::input(format!("cannot write {}: {e}", p.display())))?,
            )),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

fn scenario_stream(
    s: &Scenario,
    u: f64,
    settings: &Settings,
) -> Result<(FreeStream, DerivedConstants, strato_shear::thermo::GasProperties), Failure> {
    let q = settings.number(s.q, "q", 0.0)?;
    let gas = settings.profile.moist(MoistureSpec::new(q)?);
    let fs = FreeStream::new(u, s.t0, s.p0, s.length.unwrap_or(DEFAULT_ASPECT * s.h), s.h, &gas)?;
    let dc = derived_constants(&fs, &gas, settings.mode);
    Ok((fs, dc, gas))
}

fn write_json<T: Serialize>(value: &T, mut w: impl Write) -> Result<(), Failure> {
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Failure::input(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let settings = Settings::resolve(&cli)?;
    match &cli.command {
        Command::Tau {
            scenario,
            u,
            sweep,
            solve,
            wall_stress,
        } => {
            let q = settings.number(scenario.q, "q", 0.0)?;
            if let Some(spec) = sweep {
                let spec: SweepSpec = spec.parse()?;
                let rows = sweep_tau_star(&spec, scenario.h, scenario.t0, q, &settings.profile)?;
                let w = settings.writer()?;
                return match settings.format {
                    Format::Csv => Ok(write_sweep_csv(&rows, w)?),
                    Format::Json => Ok(write_sweep_json(&rows, w)?),
                };
            }
            let u = u.expect("clap requires --u without --sweep");
            let rec = SoundingRecord {
                station_id: "cli".into(),
                p0: scenario.p0,
                t0: scenario.t0,
                u,
                h: scenario.h,
                length: scenario.length.unwrap_or(DEFAULT_ASPECT * scenario.h),
                q,
            };
            let cfg = BatchConfig {
                profile: settings.profile.clone(),
                mode: settings.mode,
                solve: settings.flag(*solve, "solve")?,
                wall_stress: settings.flag(*wall_stress, "wall-stress")?,
                tol: settings.number(None, "tol", 1e-9)?,
            };
            let row = evaluate_record(&rec, &cfg)?;
            let w = settings.writer()?;
            match settings.format {
                Format::Csv => write_report_csv(&[row], w)?,
                Format::Json => write_report_json(&[row], w)?,
            }
            Ok(())
        }
        Command::Batch {
            input,
            solve,
            wall_stress,
            tol,
            manifest,
        } => {
            let file =
                File::open(input).map_err(|e| Failure::input(format!("cannot open {}: {e}", input.display())))?;
            let rows = parse_soundings(file)?;
            let cfg = BatchConfig {
                profile: settings.profile.clone(),
                mode: settings.mode,
                solve: settings.flag(*solve, "solve")?,
                wall_stress: settings.flag(*wall_stress, "wall-stress")?,
                tol: settings.number(*tol, "tol", 1e-9)?,
            };
            let out = run_batch(&rows, &cfg);
            let w = settings.writer()?;
            match settings.format {
                Format::Csv => write_report_csv(&out.rows, w)?,
                Format::Json => write_report_json(&out.rows, w)?,
            }
            let manifest_path = manifest.clone().or_else(|| {
                settings.out.as_ref().map(|o| {
                    let mut s = o.clone().into_os_string();
                    s.push(".manifest.json");
                    PathBuf::from(s)
                })
            });
            if let Some(path) = manifest_path {
                let mut echo = settings.echo();
                echo.insert("input".into(), input.display().to_string());
                echo.insert("solve".into(), cfg.solve.to_string());
                echo.insert("wall-stress".into(), cfg.wall_stress.to_string());
                echo.insert("tol".into(), cfg.tol.to_string());
                let m = out.manifest(&cfg, echo, chrono::Utc::now().to_rfc3339());
                write_json(&m, create(&path)?)?;
            }
            Ok(())
        }
        Command::SolveCrocco {
            scenario,
            u,
            k,
            i0,
            method,
            nodes,
            tol,
        } => {
            let prob = match k {
                Some(k) => CroccoProblem::new(*k, i0.unwrap_or(f64::INFINITY), *u)?,
                None => {
                    let (fs, dc, _) = scenario_stream(scenario, *u, &settings)?;
                    CroccoProblem::from_scenario(&dc, &fs)?
                }
            };
            let sol: CroccoSolution = match method {
                Method::Shooting => solve_shooting(&prob, settings.number(*tol, "tol", 1e-10)?)?,
                Method::Fd => solve_fd_newton(&prob, *nodes, settings.number(*tol, "tol", 1e-8)?)?,
            };
            let w = settings.writer()?;
            match settings.format {
                Format::Csv => sol.write_csv(w)?,
                Format::Json => write_json(&sol, w)?,
            }
            Ok(())
        }
        Command::TransformCheck {
            scenario,
            u,
            nx,
            ny,
            pressure,
            density,
        } => {
            let (fs, dc, _) = scenario_stream(scenario, *u, &settings)?;
            let report = transform_check(&fs, &dc, *nx, *ny, pressure.as_deref(), density.as_deref())?;
            let w = settings.writer()?;
            match settings.format {
                Format::Csv => write_pairs_csv(&report, w)?,
                Format::Json => write_json(&report, w)?,
            }
            Ok(())
        }
        Command::EpsilonSweep {
            scenario,
            u,
            eps,
            nx,
            ny,
        } => {
            let (fs, dc, _) = scenario_stream(scenario, *u, &settings)?;
            let rows = epsilon_sweep(&fs, &dc, eps, *nx, *ny)?;
            let w = settings.writer()?;
            match settings.format {
                Format::Csv => {
                    let mut w = w;
                    writeln!(w, "eps,lhs_norm,rhs_norm,residual_norm")?;
                    for r in &rows {
                        writeln!(w, "{},{},{},{}", r.eps, r.lhs_norm, r.rhs_norm, r.residual_norm)?;
                    }
                    w.flush()?;
                }
                Format::Json => write_json(&rows, w)?,
            }
            Ok(())
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))
}

fn read_field(path: &Path) -> Result<ScalarField, Failure> {
    let f = File::open(path).map_err(|e| Failure::input(format!("cannot open {}: {e}", path.display())))?;
    Ok(ScalarField::read_csv(f)?)
}

fn transform_check(
    fs: &FreeStream,
    dc: &DerivedConstants,
    nx: usize,
    ny: usize,
    pressure: Option<&Path>,
    density: Option<&Path>,
) -> Result<BTreeMap<&'static str, f64>, Failure> {
    let (length, height, speed) = (fs.length(), fs.height(), fs.u());
    let profile = |y: f64| speed * (std::f64::consts::FRAC_PI_2 * y / height).sin();
    let p = match pressure {
        Some(path) => read_field(path)?,
        None => {
            let p_c = pressure_estimate(dc, fs);
            ScalarField::from_fn(nx, ny, length, height, |_, _| p_c)?
        }
    };
    let rho = match density {
        Some(path) => read_field(path)?,
        None => {
            let mut values = Vec::with_capacity(nx * ny);
            for j in 0..ny {
                let y = height * j as f64 / (ny - 1) as f64;
                let r = density_of_u(profile(y), dc, fs)?;
                values.extend(std::iter::repeat_n(r, nx));
            }
            ScalarField::new(nx, ny, length, height, values)?
        }
    };
    let map = build_map(&p, &rho, dc, fs)?;
    let row_mean = |j: usize| (0..p.nx()).map(|i| p.get(i, j)).sum::<f64>() / p.nx() as f64;
    let j_top = p.ny() - 1;
    let rho_u = ScalarField::from_fn(rho.nx(), rho.ny(), rho.length(), rho.height(), |x, y| {
        rho.sample(x, y).unwrap_or(0.0) * profile(y)
    })?;
    let rho_v = rho_u.map(|_| 0.0)?;
    let psi_gap = two_path_discrepancy(&rho_u, &rho_v)?;

    let mut out = BTreeMap::new();
    out.insert("jacobian_min", map.jac.min_value());
    out.insert("jacobian_max", map.jac.max_abs());
    out.insert("monotone", if map.is_monotone() { 1.0 } else { 0.0 });
    out.insert("ell_max", map.ell_max());
    out.insert("ell_max_constant_pressure", row_mean(j_top) * p.length());
    out.insert("c1_sigma0_length", dc.c1 * fs.sigma0() * p.length());
    out.insert("s_top", map.s_top(map.s.nx() - 1));
    out.insert("stream_two_path_discrepancy", psi_gap);
    out.insert("stream_field_norm", rho_u.max_abs() * rho_u.height());
    Ok(out)
}

fn write_pairs_csv(pairs: &BTreeMap<&'static str, f64>, mut w: impl Write) -> Result<(), Failure> {
    writeln!(w, "quantity,value")?;
    for (k, v) in pairs {
        writeln!(w, "{k},{v}")?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct EpsilonRow {
    eps: f64,
    lhs_norm: f64,
    rhs_norm: f64,
    residual_norm: f64,
}

/// Fixed profile `u = U sin(π y*/2)` with shear `τ_s = 1 - y*²` on the unit square.
fn epsilon_sweep(
    fs: &FreeStream,
    dc: &DerivedConstants,
    eps: &[f64],
    nx: usize,
    ny: usize,
) -> Result<Vec<EpsilonRow>, Failure> {
    let speed = fs.u();
    let u = ScalarField::from_fn(nx, ny, 1.0, 1.0, |_, y| speed * (std::f64::consts::FRAC_PI_2 * y).sin())?;
    let tau = ScalarField::from_fn(nx, ny, 1.0, 1.0, |_, y| 1.0 - y * y)?;
    eps.iter()
        .map(|&e| {
            let es = EpsilonScaling::new(fs.length(), e * fs.length())?;
            let r = epsilon_residual(&u, &tau, &es, dc, fs)?;
            Ok(EpsilonRow {
                eps: e,
                lhs_norm: r.lhs_norm,
                rhs_norm: r.rhs_norm,
                residual_norm: r.residual_norm,
            })
        })
        .collect()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("strato-shear: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
