//! Finite-difference check of the similarity reduction `ψ(ℓ, s) = ℓ^(1/2) f(s/ℓ^(1/2))`.
//!
//! For that ansatz the convective combination and the viscous term reduce to
//!
//! ```text
//! ψ_s ψ_ℓs - ψ_ℓ ψ_ss            = -½ ℓ⁻¹ f f''
//! ∂_s(σ^(-6/25) ψ_ss)             =  ℓ⁻¹ d/dz(σ^(-6/25) f'')
//! ```
//!
//! with `σ = 1 - (f')²/(2 i₀)`. The left sides are evaluated by centred
//! differences in `(ℓ, s)` and the right sides in closed form in `(ℓ, z)`.

use crate::crocco::SIGMA_EXPONENT;
use crate::error::{Error, Result};

/// A profile `f(z)` together with its first three derivatives.
pub trait SmoothProfile {
    /// `[f, f', f'', f''']` at `z`.
    fn jet(&self, z: f64) -> [f64; 4];
}

impl<F: Fn(f64) -> [f64; 4]> SmoothProfile for F {
    fn jet(&self, z: f64) -> [f64; 4] {
        self(z)
    }
}

/// Polynomial with coefficients in increasing degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial(pub Vec<f64>);

impl SmoothProfile for Polynomial {
    fn jet(&self, z: f64) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (k, slot) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (n, &c) in self.0.iter().enumerate().skip(k).rev() {
                let falling: f64 = (0..k).map(|m| (n - m) as f64).product();
                acc = acc * z + c * falling;
            }
            *slot = acc;
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityResiduals {
    /// Max discrepancy of the convective identity.
    pub convective: f64,
    /// Max discrepancy of the viscous identity.
    pub viscous: f64,
}

/// Evaluates both similarity identities at `s = z √ℓ` for each `z` in `z_nodes`.
///
/// `step` is the finite-difference spacing in both `ℓ` and `s`; the returned
/// discrepancies decay as `step²`. Pass `i0 = f64::INFINITY` for `σ ≡ 1`.
pub fn momentum_identity_check(
    f: &impl SmoothProfile,
    ell: f64,
    i0: f64,
    z_nodes: &[f64],
    step: f64,
) -> Result<IdentityResiduals> {
    if !(step > 0.0) {
        return Err(Error::domain(format!("step must be positive, got {step}")));
    }
    if !(ell - step > 0.0) {
        return Err(Error::domain(format!(
            "need ℓ > step > 0, got ℓ = {ell}, step = {step}"
        )));
    }
    if !(i0 > 0.0) {
        return Err(Error::domain(format!("i0 must be positive, got {i0}")));
    }

    let psi = |l: f64, s: f64| l.sqrt() * f.jet(s / l.sqrt())[0];
    let h = step;
    let sigma_of = |slope: f64| -> Result<f64> {
        let s = 1.0 - slope * slope / (2.0 * i0);
        if s > 0.0 {
            Ok(s)
        } else {
            Err(Error::domain(format!("σ = {s} is not positive for f' = {slope}")))
        }
    };
    // σ^(-6/25) ψ_ss with both factors from differences in s
    let viscous_flux = |l: f64, s: f64| -> Result<f64> {
        let (m, c, p) = (psi(l, s - h), psi(l, s), psi(l, s + h));
        let psi_s = (p - m) / (2.0 * h);
        let psi_ss = (p - 2.0 * c + m) / (h * h);
        Ok(sigma_of(psi_s)?.powf(SIGMA_EXPONENT) * psi_ss)
    };

    let mut res = IdentityResiduals {
        convective: 0.0,
        viscous: 0.0,
    };
    for &z in z_nodes {
        let s = z * ell.sqrt();
        let l = ell;

        let psi_s = (psi(l, s + h) - psi(l, s - h)) / (2.0 * h);
        let psi_ss = (psi(l, s + h) - 2.0 * psi(l, s) + psi(l, s - h)) / (h * h);
        let psi_l = (psi(l + h, s) - psi(l - h, s)) / (2.0 * h);
        let psi_ls = (psi(l + h, s + h) - psi(l + h, s - h) - psi(l - h, s + h) + psi(l - h, s - h)) / (4.0 * h * h);
        let lhs_conv = psi_s * psi_ls - psi_l * psi_ss;
        let lhs_visc = (viscous_flux(l, s + h)? - viscous_flux(l, s - h)?) / (2.0 * h);

        let [f0, f1, f2, f3] = f.jet(z);
        let rhs_conv = -0.5 / l * f0 * f2;
        let sigma = sigma_of(f1)?;
        let dsigma = -f1 * f2 / i0;
        let rhs_visc =
            (sigma.powf(SIGMA_EXPONENT) * f3 + SIGMA_EXPONENT * sigma.powf(SIGMA_EXPONENT - 1.0) * dsigma * f2) / l;

        res.convective = res.convective.max((lhs_conv - rhs_conv).abs());
        res.viscous = res.viscous.max((lhs_visc - rhs_visc).abs());
    }
    Ok(res)
}
