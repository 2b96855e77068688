//! Gas properties and the thermodynamic closures of the boundary-layer model.
//!
//! All closures assume a unit Prandtl number and the Crocco energy integral,
//! so temperature, density and viscosity are functions of the horizontal
//! speed `u` alone through `σ(u) = 1 - u²/(2 i₀)` with `i₀ = c_p T₀`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Specific gas constant of dry air [J K⁻¹ kg⁻¹].
pub const R_DRY: f64 = 287.0;
/// Specific gas constant of water vapour [J K⁻¹ kg⁻¹].
pub const R_VAPOR: f64 = 461.50;
/// Specific heat at constant pressure of dry air [J K⁻¹ kg⁻¹].
pub const CP_DRY: f64 = 1004.0;
/// Specific heat at constant pressure of water vapour [J K⁻¹ kg⁻¹].
pub const CP_VAPOR: f64 = 1875.0;
/// Polytropic exponent of the adiabatic atmosphere.
pub const POLYTROPIC_B: f64 = 1.405;
/// Power-law viscosity exponent.
pub const OMEGA_POWER_LAW: f64 = 19.0 / 25.0;
/// Dynamic viscosity of air at the reference temperature [Pa s].
pub const MU_REF: f64 = 1.789e-5;
/// Reference (free-stream) temperature paired with [`MU_REF`] [K].
pub const T_REF: f64 = 288.0;
/// Standard gravity [m s⁻²].
pub const STANDARD_GRAVITY: f64 = 9.80665;
/// Standard tropospheric lapse rate [K m⁻¹].
pub const STANDARD_LAPSE: f64 = 0.0065;

/// Optional molar description of a gas; `R̂ = R*/M` must hold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MolarMetadata {
    /// Universal gas constant R* [J K⁻¹ mol⁻¹].
    pub universal_gas_constant: f64,
    /// Molar mass M [kg mol⁻¹].
    pub molar_mass: f64,
}

impl MolarMetadata {
    pub fn specific_gas_constant(&self) -> f64 {
        self.universal_gas_constant / self.molar_mass
    }

    /// Ideal-gas pressure `n R* T / V` of `moles` in `volume` at `temperature`.
    pub fn pressure(&self, moles: f64, volume: f64, temperature: f64) -> f64 {
        moles * self.universal_gas_constant * temperature / volume
    }
}

#[derive(Debug, Clone, Deserialize)]
struct RawGas {
    c_p: f64,
    r_hat: f64,
    #[serde(default = "default_b")]
    b: f64,
    #[serde(default = "default_omega")]
    omega: f64,
    #[serde(default = "default_mu")]
    mu_h: f64,
    #[serde(default = "default_t_h")]
    t_h: f64,
    #[serde(default = "default_pr")]
    prandtl: f64,
    #[serde(default)]
    molar: Option<MolarMetadata>,
}

fn default_b() -> f64 {
    POLYTROPIC_B
}
fn default_omega() -> f64 {
    OMEGA_POWER_LAW
}
fn default_mu() -> f64 {
    MU_REF
}
fn default_t_h() -> f64 {
    T_REF
}
fn default_pr() -> f64 {
    1.0
}

impl TryFrom<RawGas> for GasProperties {
    type Error = Error;

    fn try_from(raw: RawGas) -> Result<Self> {
        let gas = GasProperties {
            c_p: raw.c_p,
            r_hat: raw.r_hat,
            b: raw.b,
            omega: raw.omega,
            mu_h: raw.mu_h,
            t_h: raw.t_h,
            prandtl: raw.prandtl,
            molar: None,
        };
        gas.validate()?;
        match raw.molar {
            Some(m) => gas.with_molar(m),
            None => Ok(gas),
        }
    }
}

/// Constants of one gas or gas mixture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGas")]
pub struct GasProperties {
    c_p: f64,
    r_hat: f64,
    b: f64,
    omega: f64,
    mu_h: f64,
    t_h: f64,
    prandtl: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    molar: Option<MolarMetadata>,
}

impl GasProperties {
    /// Gas with the default polytropic exponent, 19/25 viscosity law and unit Prandtl number.
    pub fn new(c_p: f64, r_hat: f64) -> Result<Self> {
        let gas = GasProperties {
            c_p,
            r_hat,
            b: POLYTROPIC_B,
            omega: OMEGA_POWER_LAW,
            mu_h: MU_REF,
            t_h: T_REF,
            prandtl: 1.0,
            molar: None,
        };
        gas.validate()?;
        Ok(gas)
    }

    pub fn dry_air() -> Self {
        Self::new(CP_DRY, R_DRY).expect("built-in constants are valid")
    }

    pub fn water_vapor() -> Self {
        Self::new(CP_VAPOR, R_VAPOR).expect("built-in constants are valid")
    }

    pub fn with_polytropic_exponent(mut self, b: f64) -> Result<Self> {
        self.b = b;
        self.validate()?;
        Ok(self)
    }

    /// Replaces the viscosity exponent (older treatments used other values than 19/25).
    pub fn with_viscosity_exponent(mut self, omega: f64) -> Result<Self> {
        self.omega = omega;
        self.validate()?;
        Ok(self)
    }

    pub fn with_free_stream_viscosity(mut self, mu_h: f64, t_h: f64) -> Result<Self> {
        self.mu_h = mu_h;
        self.t_h = t_h;
        self.validate()?;
        Ok(self)
    }

    /// Only `Pr = 1` is accepted; any other value is rejected.
    pub fn with_prandtl(mut self, prandtl: f64) -> Result<Self> {
        self.prandtl = prandtl;
        self.validate()?;
        Ok(self)
    }

    /// Attaches molar metadata, checking `R̂ = R*/M` to 1e-9 relative.
    pub fn with_molar(mut self, molar: MolarMetadata) -> Result<Self> {
        if !(molar.universal_gas_constant > 0.0 && molar.molar_mass > 0.0) {
            return Err(Error::invariant("molar metadata must be positive"));
        }
        let r = molar.specific_gas_constant();
        if ((r - self.r_hat) / self.r_hat).abs() > 1e-9 {
            return Err(Error::invariant(format!(
                "R*/M = {r} does not match R_hat = {}",
                self.r_hat
            )));
        }
        self.molar = Some(molar);
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        let finite = [
            self.c_p,
            self.r_hat,
            self.b,
            self.omega,
            self.mu_h,
            self.t_h,
            self.prandtl,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::invariant("gas properties must be finite"));
        }
        if self.c_p <= 0.0 {
            return Err(Error::invariant(format!("c_p must be positive, got {}", self.c_p)));
        }
        if self.r_hat <= 0.0 {
            return Err(Error::invariant(format!("R_hat must be positive, got {}", self.r_hat)));
        }
        if self.b <= 1.0 {
            return Err(Error::invariant(format!(
                "polytropic exponent must exceed 1, got {}",
                self.b
            )));
        }
        if !(self.omega > 0.0 && self.omega < 1.0) {
            return Err(Error::invariant(format!(
                "viscosity exponent must lie in (0, 1), got {}",
                self.omega
            )));
        }
        if self.mu_h <= 0.0 || self.t_h <= 0.0 {
            return Err(Error::invariant("mu_h and T_h must be positive"));
        }
        if self.prandtl != 1.0 {
            return Err(Error::invariant(format!(
                "only Pr = 1 is supported, got {}",
                self.prandtl
            )));
        }
        Ok(())
    }

    pub fn c_p(&self) -> f64 {
        self.c_p
    }
    pub fn r_hat(&self) -> f64 {
        self.r_hat
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn omega(&self) -> f64 {
        self.omega
    }
    pub fn mu_h(&self) -> f64 {
        self.mu_h
    }
    pub fn t_h(&self) -> f64 {
        self.t_h
    }
    pub fn prandtl(&self) -> f64 {
        self.prandtl
    }
    pub fn molar(&self) -> Option<&MolarMetadata> {
        self.molar.as_ref()
    }

    /// `b/(b-1)`, the exponent of σ₀ in the pressure closure.
    pub fn polytropic_ratio(&self) -> f64 {
        self.b / (self.b - 1.0)
    }
}

/// Dry air and water vapour constants used together for moist scenarios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GasProfile {
    pub name: String,
    pub dry: GasProperties,
    pub vapor: GasProperties,
}

impl GasProfile {
    pub const PAPER_ATMOSPHERE: &'static str = "paper-atmosphere";

    /// R̂_d = 287, R̂_v = 461.50, c_pd = 1004, c_pv = 1875, b = 1.405.
    pub fn paper_atmosphere() -> Self {
        GasProfile {
            name: Self::PAPER_ATMOSPHERE.to_string(),
            dry: GasProperties::dry_air(),
            vapor: GasProperties::water_vapor(),
        }
    }

    pub fn by_name(name: &str) -> Option<Self> {
        (name == Self::PAPER_ATMOSPHERE).then(Self::paper_atmosphere)
    }

    pub fn moist(&self, moisture: MoistureSpec) -> GasProperties {
        mix_gases(&self.dry, &self.vapor, moisture)
    }
}

/// Specific humidity of a moist-air parcel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoistureSpec {
    q: f64,
}

impl MoistureSpec {
    pub fn new(q: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::domain(format!("specific humidity must lie in [0, 1], got {q}")));
        }
        Ok(MoistureSpec { q })
    }

    pub fn dry() -> Self {
        MoistureSpec { q: 0.0 }
    }

    pub fn q(&self) -> f64 {
        self.q
    }
}

/// Mass-weighted mixture of dry air and vapour.
///
/// `c_p` and `R̂` are interpolated linearly in `q`; the remaining constants
/// are taken from `dry`.
pub fn mix_gases(dry: &GasProperties, vapor: &GasProperties, m: MoistureSpec) -> GasProperties {
    let q = m.q();
    if q == 0.0 {
        return dry.clone();
    }
    let mut mixed = dry.clone();
    mixed.c_p = (1.0 - q) * dry.c_p + q * vapor.c_p;
    mixed.r_hat = (1.0 - q) * dry.r_hat + q * vapor.r_hat;
    mixed.molar = None;
    mixed
}

/// Boundary-layer scenario on the rectangle `[0, L] × [0, h]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreeStream {
    u: f64,
    t0: f64,
    p0: f64,
    length: f64,
    height: f64,
    g: f64,
    beta: f64,
    c_p: f64,
    i0: f64,
    sigma0: f64,
}

impl FreeStream {
    /// Builds a scenario from an explicit surface temperature `t0`.
    ///
    /// The free stream moves in the `-x` direction; only the speed `|u|` is kept.
    pub fn new(u: f64, t0: f64, p0: f64, length: f64, height: f64, gas: &GasProperties) -> Result<Self> {
        if ![u, t0, p0, length, height].iter().all(|v| v.is_finite()) {
            return Err(Error::domain("free-stream inputs must be finite"));
        }
        if t0 <= 0.0 {
            return Err(Error::domain(format!("T0 must be positive, got {t0}")));
        }
        if p0 <= 0.0 {
            return Err(Error::domain(format!("p0 must be positive, got {p0}")));
        }
        if !(height > 0.0 && length > height) {
            return Err(Error::domain(format!("need L > h > 0, got L = {length}, h = {height}")));
        }
        let u = u.abs();
        let i0 = gas.c_p() * t0;
        let sigma0 = 1.0 - u * u / (2.0 * i0);
        if sigma0 <= 0.0 {
            return Err(Error::domain(format!(
                "U² = {} reaches 2 i0 = {}; the model is subsonic only",
                u * u,
                2.0 * i0
            )));
        }
        Ok(FreeStream {
            u,
            t0,
            p0,
            length,
            height,
            g: STANDARD_GRAVITY,
            beta: STANDARD_LAPSE,
            c_p: gas.c_p(),
            i0,
            sigma0,
        })
    }

    /// Builds a scenario with `T0 = T_h + 1 - U²/(2 c_p)`, taken literally.
    ///
    /// The `+1` term is not dimensionally consistent; [`FreeStream::new`] is the default path.
    pub fn from_free_stream_temperature(
        u: f64,
        p0: f64,
        length: f64,
        height: f64,
        gas: &GasProperties,
    ) -> Result<Self> {
        let t0 = gas.t_h() + 1.0 - u * u / (2.0 * gas.c_p());
        Self::new(u, t0, p0, length, height, gas)
    }

    pub fn with_lapse(mut self, g: f64, beta: f64) -> Result<Self> {
        if !(g > 0.0 && beta > 0.0) {
            return Err(Error::domain("gravity and lapse rate must be positive"));
        }
        self.g = g;
        self.beta = beta;
        Ok(self)
    }

    pub fn u(&self) -> f64 {
        self.u
    }
    pub fn t0(&self) -> f64 {
        self.t0
    }
    pub fn p0(&self) -> f64 {
        self.p0
    }
    pub fn length(&self) -> f64 {
        self.length
    }
    pub fn height(&self) -> f64 {
        self.height
    }
    pub fn gravity(&self) -> f64 {
        self.g
    }
    pub fn lapse_rate(&self) -> f64 {
        self.beta
    }
    pub fn c_p(&self) -> f64 {
        self.c_p
    }
    /// Stagnation enthalpy `c_p T0`.
    pub fn i0(&self) -> f64 {
        self.i0
    }
    /// `1 - U²/(2 i0)`.
    pub fn sigma0(&self) -> f64 {
        self.sigma0
    }

    /// Linear lapse profile `T0 - β y`.
    pub fn lapse_temperature(&self, y: f64) -> f64 {
        self.t0 - self.beta * y
    }

    /// Total energy per unit mass at the free stream, `c_p T_h + U²/2`.
    ///
    /// Some sources print `U/2` for the kinetic term; the squared speed is used here.
    pub fn total_energy(&self, gas: &GasProperties) -> f64 {
        self.c_p * gas.t_h() + 0.5 * self.u * self.u
    }
}

/// `σ(u) = 1 - u²/(2 i0)`; errors when `u² ≥ 2 i0`.
pub fn sigma_of_u(u: f64, fs: &FreeStream) -> Result<f64> {
    sigma_with_i0(u, fs.i0())
}

pub(crate) fn sigma_with_i0(u: f64, i0: f64) -> Result<f64> {
    let s = 1.0 - u * u / (2.0 * i0);
    if !(s > 0.0) {
        return Err(Error::domain(format!(
            "u² = {} must stay below 2 i0 = {}",
            u * u,
            2.0 * i0
        )));
    }
    Ok(s)
}

/// Crocco relation `T(u) = T0 σ(u)`.
pub fn crocco_temperature(u: f64, fs: &FreeStream) -> Result<f64> {
    Ok(fs.t0() * sigma_of_u(u, fs)?)
}

/// `μ = μ_h (T/T_h)^ω`.
pub fn viscosity_power_law(t: f64, gas: &GasProperties) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::domain(format!("temperature must be positive, got {t}")));
    }
    Ok(gas.mu_h() * (t / gas.t_h()).powf(gas.omega()))
}

/// `κ = c_p μ / Pr`, which is `c_p μ` under the unit Prandtl closure.
pub fn thermal_conductivity(mu: f64, gas: &GasProperties) -> Result<f64> {
    if !(mu >= 0.0) {
        return Err(Error::domain(format!("viscosity must be non-negative, got {mu}")));
    }
    Ok(gas.c_p() * mu / gas.prandtl())
}

/// How temperatures enter `c1 = p0 T0^(2b/(b-1))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormalizationMode {
    /// `T0` replaced by `T0/T_h` in `c1`, so `c1` carries pressure units.
    #[default]
    Normalized,
    /// The literal expressions, `T0` in kelvin.
    PaperRaw,
}

impl NormalizationMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            NormalizationMode::Normalized => "normalized",
            NormalizationMode::PaperRaw => "paper-raw",
        }
    }
}

impl std::str::FromStr for NormalizationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "normalized" => Ok(NormalizationMode::Normalized),
            "paper-raw" => Ok(NormalizationMode::PaperRaw),
            other => Err(Error::domain(format!(
                "unknown normalization mode '{other}' (expected normalized or paper-raw)"
            ))),
        }
    }
}

/// Constants of the pressure, density and viscosity closures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    /// `½ c1 c2⁻¹ c3⁻¹ σ0^(1 - b/(b-1))`, the coefficient of the Crocco ODE.
    pub k_detau: f64,
    /// `b/(b-1)`.
    pub polytropic_ratio: f64,
    pub mode: NormalizationMode,
}

/// Computes `c1`, `c2`, `c3` and the Crocco coefficient.
///
/// In both modes `c2 = c1/(R̂ T0)` with `T0` in kelvin, so `c1/c2 = R̂ T0`
/// always holds; the modes differ only in the temperature scale inside `c1`.
pub fn derived_constants(fs: &FreeStream, gas: &GasProperties, mode: NormalizationMode) -> DerivedConstants {
    let n = gas.polytropic_ratio();
    let theta = match mode {
        NormalizationMode::Normalized => fs.t0() / gas.t_h(),
        NormalizationMode::PaperRaw => fs.t0(),
    };
    let c1 = fs.p0() * theta.powf(2.0 * n);
    let c2 = c1 / (gas.r_hat() * fs.t0());
    let c3 = gas.mu_h() * gas.t_h().powf(-gas.omega()) * fs.t0().powf(gas.omega());
    let k_detau = 0.5 * c1 / c2 / c3 * fs.sigma0().powf(1.0 - n);
    DerivedConstants {
        c1,
        c2,
        c3,
        k_detau,
        polytropic_ratio: n,
        mode,
    }
}

/// `p ≅ c1 σ0^(b/(b-1))`, constant over the layer.
pub fn pressure_estimate(dc: &DerivedConstants, fs: &FreeStream) -> f64 {
    dc.c1 * fs.sigma0().powf(dc.polytropic_ratio)
}

/// `ρ(u) ≅ c2 σ0^(b/(b-1)) / σ(u)`.
pub fn density_of_u(u: f64, dc: &DerivedConstants, fs: &FreeStream) -> Result<f64> {
    let s = sigma_of_u(u, fs)?;
    Ok(dc.c2 * fs.sigma0().powf(dc.polytropic_ratio) / s)
}

/// `μ(u) = c3 σ(u)^ω`.
pub fn viscosity_of_u(u: f64, dc: &DerivedConstants, fs: &FreeStream, gas: &GasProperties) -> Result<f64> {
    Ok(dc.c3 * sigma_of_u(u, fs)?.powf(gas.omega()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn scenario(u: f64, t0: f64) -> FreeStream {
        FreeStream::new(u, t0, 101_325.0, 100_000.0, 1000.0, &GasProperties::dry_air()).unwrap()
    }

    #[test]
    fn mixing_endpoints_and_worked_value() {
        let dry = GasProperties::dry_air();
        let vap = GasProperties::water_vapor();
        assert_eq!(mix_gases(&dry, &vap, MoistureSpec::dry()), dry);
        let all_vapor = mix_gases(&dry, &vap, MoistureSpec::new(1.0).unwrap());
        assert_eq!(all_vapor.c_p(), 1875.0);
        assert_eq!(all_vapor.r_hat(), 461.50);
        let m = mix_gases(&dry, &vap, MoistureSpec::new(0.01).unwrap());
        assert!(rel(m.c_p(), 1012.71) < 1e-14);
        assert!(rel(m.r_hat(), 288.745) < 1e-14);
        assert_eq!(m.b(), dry.b());
        assert_eq!(m.mu_h(), dry.mu_h());
    }

    #[test]
    fn humidity_outside_unit_interval_is_rejected() {
        assert!(matches!(MoistureSpec::new(-0.01), Err(Error::Domain(_))));
        assert!(matches!(MoistureSpec::new(1.5), Err(Error::Domain(_))));
    }

    #[test]
    fn gas_invariants() {
        assert!(GasProperties::new(-1.0, 287.0).is_err());
        assert!(GasProperties::new(1004.0, 0.0).is_err());
        let air = GasProperties::dry_air();
        assert!(air.clone().with_polytropic_exponent(1.0).is_err());
        assert!(air.clone().with_viscosity_exponent(1.2).is_err());
        assert!(air.clone().with_prandtl(0.71).is_err());
        assert!(air.clone().with_viscosity_exponent(0.5).is_ok());
        let molar = MolarMetadata {
            universal_gas_constant: 8.314462618,
            molar_mass: 8.314462618 / 287.0,
        };
        assert!(air.clone().with_molar(molar).is_ok());
        let wrong = MolarMetadata {
            universal_gas_constant: 8.314462618,
            molar_mass: 0.018015,
        };
        assert!(air.with_molar(wrong).is_err());
    }

    #[test]
    fn sigma_values() {
        let fs = scenario(10.0, 300.0);
        assert_eq!(sigma_of_u(0.0, &fs).unwrap(), 1.0);
        assert_eq!(sigma_of_u(10.0, &fs).unwrap(), fs.sigma0());
        // 1 - 100/602400
        assert!((sigma_of_u(10.0, &fs).unwrap() - 0.999_833_997_343_957_5).abs() < 1e-15);
        let limit = (2.0 * fs.i0()).sqrt();
        assert!(matches!(sigma_of_u(limit, &fs), Err(Error::Domain(_))));
        assert!(sigma_of_u(1.01 * limit, &fs).is_err());
    }

    #[test]
    fn crocco_temperature_values() {
        let fs = scenario(10.0, 300.0);
        assert_eq!(crocco_temperature(0.0, &fs).unwrap(), 300.0);
        assert!((crocco_temperature(10.0, &fs).unwrap() - 299.950_199_203_187_25).abs() < 1e-10);
        assert_eq!(crocco_temperature(10.0, &fs).unwrap(), 300.0 * fs.sigma0());
    }

    #[test]
    fn viscosity_and_conductivity() {
        let air = GasProperties::dry_air();
        assert_eq!(viscosity_power_law(air.t_h(), &air).unwrap(), air.mu_h());
        let mu = viscosity_power_law(300.0, &air).unwrap();
        assert!(rel(mu, 1.845_373_175_829e-5) < 1e-12, "{mu}");
        assert!(viscosity_power_law(1e-300, &air).unwrap() < 1e-200);
        assert!(viscosity_power_law(0.0, &air).is_err());
        assert_eq!(thermal_conductivity(1.0, &air).unwrap(), 1004.0);
        assert!(rel(thermal_conductivity(1.789e-5, &air).unwrap(), 1.796_156e-2) < 1e-12);
        assert_eq!(thermal_conductivity(0.0, &air).unwrap(), 0.0);
        assert!(thermal_conductivity(-1.0, &air).is_err());
    }

    #[test]
    fn derived_constant_exponents() {
        let air = GasProperties::dry_air();
        assert!((air.polytropic_ratio() - 3.469_135_802_469_136).abs() < 1e-12);
        assert!((2.0 * air.polytropic_ratio() - 6.938_271_604_938_272).abs() < 1e-12);
    }

    #[test]
    fn normalized_constants_at_reference_temperature() {
        let air = GasProperties::dry_air();
        let fs = FreeStream::new(0.0, air.t_h(), 101_325.0, 1e5, 1e3, &air).unwrap();
        let dc = derived_constants(&fs, &air, NormalizationMode::Normalized);
        assert_eq!(dc.c1, 101_325.0);
        assert_eq!(pressure_estimate(&dc, &fs), dc.c1);
        assert_eq!(density_of_u(0.0, &dc, &fs).unwrap(), dc.c2);
    }

    #[test]
    fn pressure_worked_value() {
        let air = GasProperties::dry_air()
            .with_free_stream_viscosity(MU_REF, 300.0)
            .unwrap();
        let fs = FreeStream::new(10.0, 300.0, 101_325.0, 1e5, 1e3, &air).unwrap();
        let dc = derived_constants(&fs, &air, NormalizationMode::Normalized);
        let p = pressure_estimate(&dc, &fs);
        assert!((p - 101_266.660_333_333_5).abs() < 1e-6, "{p}");
    }

    #[test]
    fn c1_over_c2_is_gas_constant_times_t0() {
        let air = GasProperties::dry_air();
        for mode in [NormalizationMode::Normalized, NormalizationMode::PaperRaw] {
            let fs = scenario(12.0, 293.0);
            let dc = derived_constants(&fs, &air, mode);
            assert!(rel(dc.c1 / dc.c2, air.r_hat() * 293.0) < 1e-14);
            assert!(rel(dc.c2 * air.r_hat() * 293.0, dc.c1) < 1e-14);
            assert!(dc.c1 > 0.0 && dc.c2 > 0.0 && dc.c3 > 0.0 && dc.k_detau > 0.0);
        }
    }

    #[test]
    fn density_closure_consistency() {
        let air = GasProperties::dry_air();
        let fs = scenario(25.0, 290.0);
        let dc = derived_constants(&fs, &air, NormalizationMode::Normalized);
        let n = dc.polytropic_ratio;
        let rho_edge = density_of_u(fs.u(), &dc, &fs).unwrap();
        assert!(rel(rho_edge, dc.c2 * fs.sigma0().powf(n - 1.0)) < 1e-13);
        let lhs = rho_edge * air.r_hat() * fs.t0() * fs.sigma0();
        assert!(rel(lhs, dc.c1 * fs.sigma0().powf(n)) < 1e-12);
        let a = density_of_u(5.0, &dc, &fs).unwrap();
        let b = density_of_u(-15.0, &dc, &fs).unwrap();
        assert!(b > a);
    }

    #[test]
    fn lapse_and_energy() {
        let fs = scenario(10.0, 300.0);
        assert!((fs.lapse_temperature(1000.0) - 293.5).abs() < 1e-12);
        let air = GasProperties::dry_air();
        assert_eq!(fs.total_energy(&air), 1004.0 * 288.0 + 50.0);
        let literal = FreeStream::from_free_stream_temperature(10.0, 101_325.0, 1e5, 1e3, &air).unwrap();
        assert!((literal.t0() - (289.0 - 100.0 / 2008.0)).abs() < 1e-12);
    }

    #[test]
    fn free_stream_rejects_bad_geometry_and_supersonic() {
        let air = GasProperties::dry_air();
        assert!(FreeStream::new(10.0, 300.0, 1e5, 10.0, 10.0, &air).is_err());
        assert!(FreeStream::new(10.0, -1.0, 1e5, 100.0, 10.0, &air).is_err());
        assert!(FreeStream::new(1000.0, 300.0, 1e5, 100.0, 10.0, &air).is_err());
        let reversed = FreeStream::new(-10.0, 300.0, 1e5, 100.0, 10.0, &air).unwrap();
        assert_eq!(reversed.u(), 10.0);
    }

    #[test]
    fn profile_round_trips_through_json() {
        let p = GasProfile::paper_atmosphere();
        let s = serde_json::to_string(&p).unwrap();
        let back: GasProfile = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        let bad = s.replace("\"prandtl\":1.0", "\"prandtl\":0.7");
        assert!(serde_json::from_str::<GasProfile>(&bad).is_err());
    }
}
