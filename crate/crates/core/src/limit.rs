//! The thin-layer limit `ε = h/L → 0` and the closed-form shear estimates.

use serde::{Deserialize, Serialize};

use crate::crocco::{rhs, CroccoProblem, CroccoSolution};
use crate::error::{Error, Result};
use crate::thermo::{DerivedConstants, FreeStream, GasProperties, NormalizationMode};
use crate::transform::ScalarField;

/// Exponent `19/25` of the headline estimate `τ*`.
pub const TAU_STAR_EXPONENT: f64 = 19.0 / 25.0;

/// The map `(x, y) ↦ (x/L, y/(L ε))` onto the unit square.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonScaling {
    eps: f64,
    length: f64,
}

impl EpsilonScaling {
    pub fn new(length: f64, height: f64) -> Result<Self> {
        if !(height > 0.0 && length >= height && length.is_finite()) {
            return Err(Error::domain(format!("need L ≥ h > 0, got L = {length}, h = {height}")));
        }
        Ok(EpsilonScaling {
            eps: height / length,
            length,
        })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }
    pub fn length(&self) -> f64 {
        self.length
    }
    pub fn height(&self) -> f64 {
        self.eps * self.length
    }

    /// `(x*, y*)`.
    pub fn forward(&self, x: f64, y: f64) -> (f64, f64) {
        (x / self.length, y / (self.length * self.eps))
    }

    pub fn inverse(&self, x_star: f64, y_star: f64) -> (f64, f64) {
        (x_star * self.length, y_star * self.length * self.eps)
    }
}

pub fn rescale(fs: &FreeStream) -> EpsilonScaling {
    EpsilonScaling {
        eps: fs.height() / fs.length(),
        length: fs.length(),
    }
}

/// Max-norms of the two sides of the rescaled shear equation and of their difference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonResidual {
    pub lhs_norm: f64,
    pub rhs_norm: f64,
    pub residual_norm: f64,
}

/// `c̃ = c1^(1/2) c2⁻¹ σ0^(1/2 - b/(b-1))`.
pub fn c_tilde(dc: &DerivedConstants, fs: &FreeStream) -> f64 {
    dc.c1.sqrt() / dc.c2 * fs.sigma0().powf(0.5 - dc.polytropic_ratio)
}

/// Evaluates
///
/// ```text
/// ε c̃ x^(1/2) (σ^ε)^(19/25) τ_y (u^ε_y*)⁻¹ - ε² τ_y² (u^ε_y*)⁻²   vs   -K u σ(u)^(-6/25)
/// ```
///
/// on the interior rows of two fields sampled on the unit square `(x*, y*)`.
/// `u_profile` holds the speed `u`, so `u^ε = u/L`; `tau_field` holds `τ_s`.
/// Both `y`-derivatives are centred differences in the grid coordinate `y*`,
/// and `x = L x*`. The right side does not depend on `ε`, so for a fixed
/// profile the left side isolates the `A ε + B ε²` structure.
pub fn epsilon_residual(
    u_profile: &ScalarField,
    tau_field: &ScalarField,
    es: &EpsilonScaling,
    dc: &DerivedConstants,
    fs: &FreeStream,
) -> Result<EpsilonResidual> {
    if !u_profile.same_grid(tau_field) {
        return Err(Error::invariant("profile and shear fields must share a grid"));
    }
    let (nx, ny) = (u_profile.nx(), u_profile.ny());
    if ny < 3 {
        return Err(Error::invariant("need at least 3 rows for centred y-differences"));
    }
    let prob = CroccoProblem::from_scenario(dc, fs)?;
    let eps = es.eps();
    let ct = c_tilde(dc, fs);
    let dy = u_profile.dy();
    let threshold = 1e-12 * u_profile.max_abs().max(f64::MIN_POSITIVE) / es.length() / dy;

    let mut out = EpsilonResidual {
        lhs_norm: 0.0,
        rhs_norm: 0.0,
        residual_norm: 0.0,
    };
    for j in 1..ny - 1 {
        for i in 0..nx {
            let u = u_profile.get(i, j);
            let du_eps = (u_profile.get(i, j + 1) - u_profile.get(i, j - 1)) / (2.0 * dy) / es.length();
            if !(du_eps.abs() > threshold) {
                return Err(Error::domain(format!(
                    "∂u^ε/∂y* = {du_eps:.3e} vanishes at node ({i}, {j}); the limit needs ∂u/∂y > 0"
                )));
            }
            let dtau = (tau_field.get(i, j + 1) - tau_field.get(i, j - 1)) / (2.0 * dy);
            let sigma = crate::thermo::sigma_of_u(u, fs)?;
            let x = es.length() * u_profile.x(i);
            let lhs = eps * ct * x.sqrt() * sigma.powf(TAU_STAR_EXPONENT) * dtau / du_eps
                - eps * eps * dtau * dtau / (du_eps * du_eps);
            let r = rhs(u.min(prob.u_edge()), &prob)?;
            out.lhs_norm = out.lhs_norm.max(lhs.abs());
            out.rhs_norm = out.rhs_norm.max(r.abs());
            out.residual_norm = out.residual_norm.max((lhs - r).abs());
        }
    }
    Ok(out)
}

/// Max-norm of `∂/∂u (1 - u*²/(2 i0))^(19/25)` along the variation of `u*`.
///
/// At a node where `u*` changes toward some neighbour the derivative is
/// `-(19/25) σ^(-6/25) u/i0`; where `u*` is locally constant it is zero.
pub fn limit_equation_residual(u_star: &ScalarField, fs: &FreeStream) -> Result<f64> {
    let (nx, ny) = (u_star.nx(), u_star.ny());
    let mut worst: f64 = 0.0;
    for j in 0..ny {
        for i in 0..nx {
            let u = u_star.get(i, j);
            let varies = [
                (i > 0).then(|| u_star.get(i - 1, j)),
                (i + 1 < nx).then(|| u_star.get(i + 1, j)),
                (j > 0).then(|| u_star.get(i, j - 1)),
                (j + 1 < ny).then(|| u_star.get(i, j + 1)),
            ]
            .into_iter()
            .flatten()
            .any(|v| v != u);
            let sigma = crate::thermo::sigma_of_u(u, fs)?;
            if varies {
                let d = TAU_STAR_EXPONENT * sigma.powf(TAU_STAR_EXPONENT - 1.0) * u / fs.i0();
                worst = worst.max(d.abs());
            }
        }
    }
    Ok(worst)
}

/// Exponent `1 - b/(b-1) - 6/25 + 1/2` of the corollary's `τ_s` estimate.
pub fn corollary_exponent(gas: &GasProperties) -> f64 {
    1.0 - gas.polytropic_ratio() - 6.0 / 25.0 + 0.5
}

/// `c1^(1/2) c2⁻¹ (U/h) x^(1/2) (1 - U²/(2 c_p T0))^(1 - b/(b-1) - 6/25 + 1/2)`.
pub fn tau_s_estimate(x: f64, dc: &DerivedConstants, fs: &FreeStream, gas: &GasProperties) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::domain(format!("x must be nonnegative, got {x}")));
    }
    let base = 1.0 - fs.u() * fs.u() / (2.0 * gas.c_p() * fs.t0());
    Ok(dc.c1.sqrt() / dc.c2 * fs.u() / fs.height() * x.sqrt() * base.powf(corollary_exponent(gas)))
}

/// Reduced shear `τ* = (U/h) (1 - U²/(2 c_p T0))^(19/25)` in s⁻¹.
///
/// The sign of `U` is dropped.
pub fn tau_star(u: f64, h: f64, gas: &GasProperties, t0: f64) -> Result<f64> {
    tau_star_with_cp(u, h, gas.c_p(), t0)
}

pub(crate) fn tau_star_with_cp(u: f64, h: f64, c_p: f64, t0: f64) -> Result<f64> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::domain(format!("h must be positive, got {h}")));
    }
    if !(t0 > 0.0) || !u.is_finite() {
        return Err(Error::domain(format!(
            "need finite U and T0 > 0, got U = {u}, T0 = {t0}"
        )));
    }
    let u = u.abs();
    let base = 1.0 - u * u / (2.0 * c_p * t0);
    if !(base > 0.0) {
        return Err(Error::domain(format!(
            "U² = {} reaches 2 c_p T0 = {}",
            u * u,
            2.0 * c_p * t0
        )));
    }
    Ok(u / h * base.powf(TAU_STAR_EXPONENT))
}

/// `ρ ≅ p0 T0^(2b/(b-1)-1) R̂⁻¹ σ0^(b/(b-1)-1)`, with `T0/T_h` in place of `T0`
/// inside `c1` in normalized mode.
pub fn density_estimate(dc: &DerivedConstants, fs: &FreeStream, gas: &GasProperties) -> f64 {
    let n = dc.polytropic_ratio;
    let temperature = match dc.mode {
        NormalizationMode::Normalized => (fs.t0() / gas.t_h()).powf(2.0 * n) / fs.t0(),
        NormalizationMode::PaperRaw => fs.t0().powf(2.0 * n - 1.0),
    };
    fs.p0() * temperature / gas.r_hat() * fs.sigma0().powf(n - 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShearEstimates {
    /// s⁻¹.
    pub tau_star: f64,
    /// `(x, τ_s(x))` pairs.
    pub tau_s_profile: Vec<(f64, f64)>,
    pub rho_estimate: f64,
    pub sigma0: f64,
}

pub fn shear_estimates(
    xs: &[f64],
    dc: &DerivedConstants,
    fs: &FreeStream,
    gas: &GasProperties,
) -> Result<ShearEstimates> {
    Ok(ShearEstimates {
        tau_star: tau_star(fs.u(), fs.height(), gas, fs.t0())?,
        tau_s_profile: xs
            .iter()
            .map(|&x| Ok((x, tau_s_estimate(x, dc, fs, gas)?)))
            .collect::<Result<_>>()?,
        rho_estimate: density_estimate(dc, fs, gas),
        sigma0: fs.sigma0(),
    })
}

/// One station of [`EstimateComparison`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateRow {
    pub x: f64,
    pub tau_s_estimate: f64,
    /// `τ_wall / τ_s(x)`.
    pub ratio_tau_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateComparison {
    pub tau_wall: f64,
    pub tau_star: f64,
    /// `τ_wall / τ*`.
    pub ratio_tau_star: f64,
    pub exponent_tau_star: f64,
    pub exponent_corollary: f64,
    pub rows: Vec<EstimateRow>,
}

/// Tabulates the ODE wall shear against `τ*` and `τ_s(x)` at `x = L/8, L/4, L/2, L`.
///
/// No agreement is implied; the ratios are reported as they come.
pub fn compare_estimates(sol: &CroccoSolution, fs: &FreeStream, dc: &DerivedConstants) -> Result<EstimateComparison> {
    let n = dc.polytropic_ratio;
    let exponent_corollary = 1.0 - n - 6.0 / 25.0 + 0.5;
    let t_star = tau_star_with_cp(fs.u(), fs.height(), fs.c_p(), fs.t0())?;
    let rows = [0.125, 0.25, 0.5, 1.0]
        .iter()
        .map(|&frac| {
            let x = frac * fs.length();
            let est = dc.c1.sqrt() / dc.c2 * fs.u() / fs.height() * x.sqrt() * fs.sigma0().powf(exponent_corollary);
            EstimateRow {
                x,
                tau_s_estimate: est,
                ratio_tau_s: sol.tau_wall / est,
            }
        })
        .collect();
    Ok(EstimateComparison {
        tau_wall: sol.tau_wall,
        tau_star: t_star,
        ratio_tau_star: sol.tau_wall / t_star,
        exponent_tau_star: TAU_STAR_EXPONENT,
        exponent_corollary,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thermo::{density_of_u, derived_constants, GasProfile, MoistureSpec};

    fn scenario(u: f64) -> (GasProperties, FreeStream, DerivedConstants) {
        let gas = GasProperties::dry_air()
            .with_free_stream_viscosity(1.789e-5, 300.0)
            .unwrap();
        let fs = FreeStream::new(u, 300.0, 101_325.0, 100_000.0, 1000.0, &gas).unwrap();
        let dc = derived_constants(&fs, &gas, NormalizationMode::Normalized);
        (gas, fs, dc)
    }

    #[test]
    fn tau_star_worked_values() {
        let profile = GasProfile::paper_atmosphere();
        let dry = tau_star(10.0, 1000.0, &profile.dry, 300.0).unwrap();
        let moist = tau_star(10.0, 1000.0, &profile.moist(MoistureSpec::new(0.01).unwrap()), 300.0).unwrap();
        assert!(((dry - 9.998_738_354_680_476e-3) / dry).abs() < 1e-12);
        assert!(((moist - 9.998_749_205_909_139e-3) / moist).abs() < 1e-12);
        assert!(moist > dry);
        assert_eq!(tau_star(0.0, 1000.0, &profile.dry, 300.0).unwrap(), 0.0);
        assert!(tau_star(1000.0, 1000.0, &profile.dry, 300.0).is_err());
        assert!(tau_star(10.0, 0.0, &profile.dry, 300.0).is_err());
    }

    #[test]
    fn corollary_exponent_value() {
        let e = corollary_exponent(&GasProperties::dry_air());
        assert!((e + 2.209_135_802_469_136).abs() < 1e-12);
    }

    #[test]
    fn tau_s_estimate_square_root_in_x() {
        let (gas, fs, dc) = scenario(10.0);
        assert_eq!(tau_s_estimate(0.0, &dc, &fs, &gas).unwrap(), 0.0);
        let a = tau_s_estimate(100.0, &dc, &fs, &gas).unwrap();
        let b = tau_s_estimate(400.0, &dc, &fs, &gas).unwrap();
        assert!((b / a - 2.0).abs() < 1e-14);
        assert!(tau_s_estimate(-1.0, &dc, &fs, &gas).is_err());
    }

    #[test]
    fn density_estimate_values() {
        let (gas, fs, dc) = scenario(0.0);
        let rho = density_estimate(&dc, &fs, &gas);
        assert!((rho - 1.176_829_268_292_682_9).abs() < 1e-12);
        let (gas, fs, dc) = scenario(40.0);
        let rho = density_estimate(&dc, &fs, &gas);
        let via = density_of_u(fs.u(), &dc, &fs).unwrap();
        assert!(((rho - via) / via).abs() < 1e-12);
    }

    #[test]
    fn rescale_maps_corner() {
        let (_, fs, _) = scenario(10.0);
        let es = rescale(&fs);
        assert!((es.eps() - 0.01).abs() < 1e-15);
        assert_eq!(es.forward(fs.length(), fs.height()), (1.0, 1.0));
        let (x, y) = es.inverse(0.3, 0.7);
        let (a, b) = es.forward(x, y);
        assert!((a - 0.3).abs() < 1e-15 && (b - 0.7).abs() < 1e-15);
        assert!(EpsilonScaling::new(1.0, 2.0).is_err());
    }

    #[test]
    fn limit_residual_constant_and_linear() {
        let (_, fs, _) = scenario(10.0);
        let flat = ScalarField::from_fn(9, 9, 1.0, 1.0, |_, _| 10.0).unwrap();
        assert_eq!(limit_equation_residual(&flat, &fs).unwrap(), 0.0);
        let zero = ScalarField::from_fn(9, 9, 1.0, 1.0, |_, _| 0.0).unwrap();
        assert_eq!(limit_equation_residual(&zero, &fs).unwrap(), 0.0);
        let ramp = ScalarField::from_fn(9, 9, 1.0, 1.0, |_, y| 10.0 * y).unwrap();
        let r = limit_equation_residual(&ramp, &fs).unwrap();
        let expected = TAU_STAR_EXPONENT * fs.sigma0().powf(-6.0 / 25.0) * 10.0 / fs.i0();
        assert!(((r - expected) / expected).abs() < 1e-14);
    }

    #[test]
    fn epsilon_residual_rejects_flat_profile() {
        let (_, fs, dc) = scenario(10.0);
        let es = rescale(&fs);
        let flat = ScalarField::from_fn(9, 9, 1.0, 1.0, |_, _| 10.0).unwrap();
        let tau = ScalarField::from_fn(9, 9, 1.0, 1.0, |_, y| 1.0 - y).unwrap();
        assert!(matches!(
            epsilon_residual(&flat, &tau, &es, &dc, &fs),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn comparison_reports_both_exponents() {
        let (_, fs, dc) = scenario(10.0);
        let prob = CroccoProblem::from_scenario(&dc, &fs).unwrap();
        let sol = crate::crocco::solve_shooting(&prob, 1e-9).unwrap();
        let cmp = compare_estimates(&sol, &fs, &dc).unwrap();
        assert_eq!(cmp.exponent_tau_star, 0.76);
        assert!((cmp.exponent_corollary + 2.209_135_802_469_136).abs() < 1e-12);
        assert!(cmp.ratio_tau_star.is_finite() && cmp.ratio_tau_star > 0.0);
        assert!(cmp
            .rows
            .iter()
            .all(|r| r.ratio_tau_s.is_finite() && r.ratio_tau_s > 0.0));
    }
}
