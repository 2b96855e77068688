//! Sounding ingestion, batch evaluation and report emission.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::crocco::{solve_shooting, CroccoProblem};
use crate::error::{Error, Result};
use crate::limit::{density_estimate, tau_star};
use crate::thermo::{
    derived_constants, pressure_estimate, viscosity_power_law, FreeStream, GasProfile, MoistureSpec, NormalizationMode,
};

/// Default `L/h` when a record gives no length.
pub const DEFAULT_ASPECT: f64 = 100.0;

/// Report columns in output order.
pub const REPORT_COLUMNS: [&str; 16] = [
    "station_id",
    "p0",
    "T0",
    "U",
    "h",
    "L",
    "q",
    "sigma0",
    "tau_star_dry",
    "tau_star_moist",
    "rho_estimate",
    "pressure_estimate",
    "tau_wall",
    "wall_stress",
    "status",
    "error",
];

const REQUIRED: [&str; 5] = ["station_id", "p0", "T0", "U", "h"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoundingRecord {
    pub station_id: String,
    /// Pa.
    pub p0: f64,
    /// K.
    #[serde(rename = "T0")]
    pub t0: f64,
    /// m s⁻¹.
    #[serde(rename = "U")]
    pub u: f64,
    /// m.
    pub h: f64,
    /// m.
    #[serde(rename = "L")]
    pub length: f64,
    /// kg kg⁻¹.
    pub q: f64,
}

impl SoundingRecord {
    fn validate(&self) -> std::result::Result<(), String> {
        let fields = [
            ("p0", self.p0),
            ("T0", self.t0),
            ("U", self.u),
            ("h", self.h),
            ("L", self.length),
            ("q", self.q),
        ];
        if let Some((name, v)) = fields.iter().find(|(_, v)| !v.is_finite()) {
            return Err(format!("{name} = {v} is not finite"));
        }
        for (name, v) in [("p0", self.p0), ("T0", self.t0), ("h", self.h)] {
            if v <= 0.0 {
                return Err(format!("{name} must be positive, got {v}"));
            }
        }
        if self.u < 0.0 {
            return Err(format!("U must be nonnegative, got {}", self.u));
        }
        if !(0.0..=1.0).contains(&self.q) {
            return Err(format!("q must lie in [0, 1], got {}", self.q));
        }
        Ok(())
    }
}

/// One data line of a sounding file.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedRow {
    /// 1-based line number in the file; the header is line 1.
    pub line: usize,
    pub station_id: Option<String>,
    pub record: std::result::Result<SoundingRecord, String>,
}

/// Reads `station_id,p0,T0,U,h[,L][,q]` rows.
///
/// A missing required column fails the whole file; a bad row is kept as an
/// error entry and the remaining rows are still read.
pub fn parse_soundings<R: Read>(reader: R) -> Result<Vec<ParsedRow>> {
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let headers = r.headers()?.clone();
    let column = |name: &str| headers.iter().position(|h| h == name);
    for name in REQUIRED {
        if column(name).is_none() {
            return Err(Error::Parse {
                line: 1,
                message: format!("missing required column '{name}'"),
            });
        }
    }
    let idx: Vec<usize> = REQUIRED.iter().map(|n| column(n).unwrap()).collect();
    let (col_l, col_q) = (column("L"), column("q"));

    let mut rows = Vec::new();
    for (k, result) in r.records().enumerate() {
        let line = result
            .as_ref()
            .ok()
            .and_then(|rec| rec.position())
            .map_or(k + 2, |p| p.line() as usize);
        let rec = match result {
            Ok(rec) => rec,
            Err(e) => {
                rows.push(ParsedRow {
                    line,
                    station_id: None,
                    record: Err(e.to_string()),
                });
                continue;
            }
        };
        let station_id = rec.get(idx[0]).map(str::to_owned);
        let number = |name: &str, col: usize| -> std::result::Result<Option<f64>, String> {
            match rec.get(col) {
                None | Some("") => Ok(None),
                Some(s) => s
                    .parse::<f64>()
                    .map(Some)
                    .map_err(|_| format!("column {name}: cannot parse '{s}' as a number")),
            }
        };
        let required = |name: &str, col: usize| -> std::result::Result<f64, String> {
            number(name, col)?.ok_or_else(|| format!("column {name} is empty"))
        };
        let record = (|| {
            let h = required("h", idx[4])?;
            let record = SoundingRecord {
                station_id: station_id
                    .clone()
                    .filter(|s| !s.is_empty())
                    .ok_or("station_id is empty")?,
                p0: required("p0", idx[1])?,
                t0: required("T0", idx[2])?,
                u: required("U", idx[3])?,
                h,
                length: match col_l {
                    Some(c) => number("L", c)?.unwrap_or(DEFAULT_ASPECT * h),
                    None => DEFAULT_ASPECT * h,
                },
                q: match col_q {
                    Some(c) => number("q", c)?.unwrap_or(0.0),
                    None => 0.0,
                },
            };
            record.validate()?;
            Ok(record)
        })();
        rows.push(ParsedRow {
            line,
            station_id,
            record,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchConfig {
    pub profile: GasProfile,
    pub mode: NormalizationMode,
    /// Run the Crocco solver for `tau_wall`.
    pub solve: bool,
    /// Emit `wall_stress = μ(T0) τ*`.
    pub wall_stress: bool,
    /// Shooting tolerance when `solve` is set.
    pub tol: f64,
}

impl Default for BatchConfig {
    fn default() -> Self {
        BatchConfig {
            profile: GasProfile::paper_atmosphere(),
            mode: NormalizationMode::default(),
            solve: false,
            wall_stress: false,
            tol: 1e-9,
        }
    }
}

/// One output line; numeric outputs are empty for failed rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub station_id: String,
    pub p0: Option<f64>,
    #[serde(rename = "T0")]
    pub t0: Option<f64>,
    #[serde(rename = "U")]
    pub u: Option<f64>,
    pub h: Option<f64>,
    #[serde(rename = "L")]
    pub length: Option<f64>,
    pub q: Option<f64>,
    pub sigma0: Option<f64>,
    pub tau_star_dry: Option<f64>,
    pub tau_star_moist: Option<f64>,
    pub rho_estimate: Option<f64>,
    pub pressure_estimate: Option<f64>,
    pub tau_wall: Option<f64>,
    pub wall_stress: Option<f64>,
    pub status: RowStatus,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowStatus {
    Ok,
    InputError,
    NumericalError,
}

impl ReportRow {
    fn failed(station_id: Option<String>, rec: Option<&SoundingRecord>, status: RowStatus, msg: String) -> Self {
        ReportRow {
            station_id: station_id.unwrap_or_default(),
            p0: rec.map(|r| r.p0),
            t0: rec.map(|r| r.t0),
            u: rec.map(|r| r.u),
            h: rec.map(|r| r.h),
            length: rec.map(|r| r.length),
            q: rec.map(|r| r.q),
            sigma0: None,
            tau_star_dry: None,
            tau_star_moist: None,
            rho_estimate: None,
            pressure_estimate: None,
            tau_wall: None,
            wall_stress: None,
            status,
            error: Some(msg),
        }
    }
}

/// Evaluates one validated record.
pub fn evaluate_record(rec: &SoundingRecord, cfg: &BatchConfig) -> Result<ReportRow> {
    let dry = &cfg.profile.dry;
    let gas = cfg.profile.moist(MoistureSpec::new(rec.q)?);
    let fs = FreeStream::new(rec.u, rec.t0, rec.p0, rec.length, rec.h, &gas)?;
    let dc = derived_constants(&fs, &gas, cfg.mode);
    let t_dry = tau_star(rec.u, rec.h, dry, rec.t0)?;
    let t_moist = tau_star(rec.u, rec.h, &gas, rec.t0)?;
    let tau_wall = if !cfg.solve {
        None
    } else if rec.u == 0.0 {
        Some(0.0)
    } else {
        let prob = CroccoProblem::from_scenario(&dc, &fs)?;
        Some(solve_shooting(&prob, cfg.tol)?.tau_wall)
    };
    let wall_stress = if cfg.wall_stress {
        Some(viscosity_power_law(rec.t0, &gas)? * t_moist)
    } else {
        None
    };
    Ok(ReportRow {
        station_id: rec.station_id.clone(),
        p0: Some(rec.p0),
        t0: Some(rec.t0),
        u: Some(rec.u),
        h: Some(rec.h),
        length: Some(rec.length),
        q: Some(rec.q),
        sigma0: Some(fs.sigma0()),
        tau_star_dry: Some(t_dry),
        tau_star_moist: Some(t_moist),
        rho_estimate: Some(density_estimate(&dc, &fs, &gas)),
        pressure_estimate: Some(pressure_estimate(&dc, &fs)),
        tau_wall,
        wall_stress,
        status: RowStatus::Ok,
        error: None,
    })
}

/// Per-record entry of a [`RunManifest`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordStatus {
    pub line: usize,
    pub station_id: String,
    pub status: RowStatus,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub timestamp: String,
    pub gas_profile: String,
    pub mode: NormalizationMode,
    pub config: BTreeMap<String, String>,
    pub records: Vec<RecordStatus>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchOutput {
    pub rows: Vec<ReportRow>,
    pub statuses: Vec<RecordStatus>,
}

impl BatchOutput {
    pub fn manifest(&self, cfg: &BatchConfig, config: BTreeMap<String, String>, timestamp: String) -> RunManifest {
        RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_owned(),
            timestamp,
            gas_profile: cfg.profile.name.clone(),
            mode: cfg.mode,
            config,
            records: self.statuses.clone(),
        }
    }
}

/// Evaluates every row in input order; failures stay confined to their row.
pub fn run_batch(rows: &[ParsedRow], cfg: &BatchConfig) -> BatchOutput {
    let mut out = BatchOutput {
        rows: Vec::with_capacity(rows.len()),
        statuses: Vec::with_capacity(rows.len()),
    };
    for row in rows {
        let report = match &row.record {
            Err(msg) => ReportRow::failed(row.station_id.clone(), None, RowStatus::InputError, msg.clone()),
            Ok(rec) => evaluate_record(rec, cfg).unwrap_or_else(|e| {
                let status = if e.is_numerical() {
                    RowStatus::NumericalError
                } else {
                    RowStatus::InputError
                };
                ReportRow::failed(Some(rec.station_id.clone()), Some(rec), status, e.to_string())
            }),
        };
        out.statuses.push(RecordStatus {
            line: row.line,
            station_id: report.station_id.clone(),
            status: report.status,
            error: report.error.clone(),
        });
        out.rows.push(report);
    }
    out
}

pub fn write_report_csv<W: Write>(rows: &[ReportRow], writer: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    w.write_record(REPORT_COLUMNS)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_report_csv<R: Read>(reader: R) -> Result<Vec<ReportRow>> {
    let mut r = csv::Reader::from_reader(reader);
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

pub fn write_report_json<W: Write>(rows: &[ReportRow], writer: W) -> Result<()> {
    serde_json::to_writer_pretty(writer, rows)?;
    Ok(())
}

pub fn read_report_json<R: Read>(reader: R) -> Result<Vec<ReportRow>> {
    Ok(serde_json::from_reader(reader)?)
}

/// Inclusive range `start..=stop` sampled at `count` points, as in `U=0:50:100`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl std::str::FromStr for SweepSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let body = s.strip_prefix("U=").unwrap_or(s);
        let parts: Vec<&str> = body.split(':').collect();
        let bad = || Error::domain(format!("sweep '{s}' is not of the form U=start:stop:count"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let stop: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
        if count < 2 || !(start >= 0.0 && stop > start && stop.is_finite()) {
            return Err(Error::domain(format!(
                "sweep needs 0 ≤ start < stop and count ≥ 2, got {s}"
            )));
        }
        Ok(SweepSpec { start, stop, count })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(rename = "U")]
    pub u: f64,
    pub tau_star: f64,
}

/// `τ*(U)` at fixed `(h, T0, q)`.
pub fn sweep_tau_star(spec: &SweepSpec, h: f64, t0: f64, q: f64, profile: &GasProfile) -> Result<Vec<SweepRow>> {
    let gas = profile.moist(MoistureSpec::new(q)?);
    let step = (spec.stop - spec.start) / (spec.count - 1) as f64;
    (0..spec.count)
        .map(|k| {
            let u = if k == spec.count - 1 {
                spec.stop
            } else {
                spec.start + k as f64 * step
            };
            Ok(SweepRow {
                u,
                tau_star: tau_star(u, h, &gas, t0)?,
            })
        })
        .collect()
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_sweep_json<W: Write>(rows: &[SweepRow], writer: W) -> Result<()> {
    serde_json::to_writer_pretty(writer, rows)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Vec<ParsedRow> {
        parse_soundings(text.as_bytes()).unwrap()
    }

    #[test]
    fn header_only_is_empty() {
        assert!(parse("station_id,p0,T0,U,h\n").is_empty());
    }

    #[test]
    fn defaults_for_optional_columns() {
        let rows = parse("station_id,p0,T0,U,h\nS1,101325,300,10,1000\n");
        let rec = rows[0].record.as_ref().unwrap();
        assert_eq!(rec.q, 0.0);
        assert_eq!(rec.length, 100_000.0);
        assert_eq!(rows[0].line, 2);
    }

    #[test]
    fn missing_column_is_fatal() {
        let err = parse_soundings("station_id,p0,U,h\nS1,1,2,3\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn bad_rows_are_isolated() {
        let text = "station_id,p0,T0,U,h,L,q\n\
                    A,101325,300,10,1000,,0.01\n\
                    B,101325,abc,10,1000,,\n\
                    C,101325,300,900,1000,,\n\
                    D,101325,300,10,1000,,2\n\
                    E,101325,300,0,1000,,\n";
        let rows = parse(text);
        assert_eq!(rows.len(), 5);
        assert!(rows[1].record.is_err());
        assert!(rows[3].record.is_err());
        let out = run_batch(&rows, &BatchConfig::default());
        let status: Vec<_> = out.rows.iter().map(|r| r.status).collect();
        assert_eq!(
            status,
            [
                RowStatus::Ok,
                RowStatus::InputError,
                RowStatus::InputError,
                RowStatus::InputError,
                RowStatus::Ok
            ]
        );
        assert!(out.rows[2].error.as_ref().unwrap().contains("2 i0"));
        assert_eq!(out.statuses[2].line, 4);
        let a = &out.rows[0];
        assert!((a.tau_star_dry.unwrap() - 9.998_738_354_680_476e-3).abs() < 1e-15);
        assert!((a.tau_star_moist.unwrap() - 9.998_749_205_909_139e-3).abs() < 1e-15);
        let e = &out.rows[4];
        assert_eq!(e.tau_star_dry, Some(0.0));
        assert_eq!(e.tau_star_moist, Some(0.0));
    }

    #[test]
    fn solve_adds_wall_shear() {
        let rows = parse("station_id,p0,T0,U,h\nS,101325,300,10,1000\nZ,101325,300,0,1000\n");
        let cfg = BatchConfig {
            solve: true,
            wall_stress: true,
            ..BatchConfig::default()
        };
        let out = run_batch(&rows, &cfg);
        assert!(out.rows[0].tau_wall.unwrap() > 0.0);
        assert!(out.rows[0].wall_stress.unwrap() > 0.0);
        assert_eq!(out.rows[1].tau_wall, Some(0.0));
        assert_eq!(out.rows[1].wall_stress, Some(0.0));
    }

    #[test]
    fn report_round_trips() {
        let rows = parse("station_id,p0,T0,U,h,q\nS,101325,300,10,1000,0.01\nX,1,1,-1,1,\n");
        let out = run_batch(&rows, &BatchConfig::default());
        let mut csv_bytes = Vec::new();
        write_report_csv(&out.rows, &mut csv_bytes).unwrap();
        let header = String::from_utf8(csv_bytes.clone()).unwrap();
        assert!(header.starts_with(&REPORT_COLUMNS.join(",")));
        let back = read_report_csv(csv_bytes.as_slice()).unwrap();
        assert_eq!(back, out.rows);
        let mut js = Vec::new();
        write_report_json(&back, &mut js).unwrap();
        assert_eq!(read_report_json(js.as_slice()).unwrap(), out.rows);
    }

    #[test]
    fn sweep_spec_and_table() {
        let spec: SweepSpec = "U=0:50:100".parse().unwrap();
        assert_eq!(
            spec,
            SweepSpec {
                start: 0.0,
                stop: 50.0,
                count: 100
            }
        );
        assert!("U=5:1:10".parse::<SweepSpec>().is_err());
        assert!("0:50".parse::<SweepSpec>().is_err());
        let rows = sweep_tau_star(&spec, 1000.0, 300.0, 0.0, &GasProfile::paper_atmosphere()).unwrap();
        assert_eq!(rows.len(), 100);
        assert_eq!(rows[0].tau_star, 0.0);
        assert_eq!(rows[99].u, 50.0);
        assert!(rows.windows(2).all(|w| w[1].tau_star > w[0].tau_star));
    }
}
