use serde::{Deserialize, Serialize};

use super::ScalarField;
use crate::error::{Error, Result};
use crate::thermo::{DerivedConstants, FreeStream};

/// Node values of `(ℓ, s)` and of the Jacobian determinant of the map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DorodnitzynMap {
    pub ell: ScalarField,
    pub s: ScalarField,
    pub jac: ScalarField,
}

impl DorodnitzynMap {
    /// Largest `ℓ` on the outflow column `x = L`.
    pub fn ell_max(&self) -> f64 {
        let i = self.ell.nx() - 1;
        (0..self.ell.ny()).map(|j| self.ell.get(i, j)).fold(f64::MIN, f64::max)
    }

    /// `s` at the top of the layer in column `i`.
    pub fn s_top(&self, i: usize) -> f64 {
        self.s.get(i, self.s.ny() - 1)
    }

    /// `ℓ` nondecreasing along every row and `s` nondecreasing up every column.
    pub fn is_monotone(&self) -> bool {
        let (nx, ny) = (self.ell.nx(), self.ell.ny());
        let rows = (0..ny).all(|j| (1..nx).all(|i| self.ell.get(i, j) >= self.ell.get(i - 1, j)));
        let cols = (0..nx).all(|i| (1..ny).all(|j| self.s.get(i, j) >= self.s.get(i, j - 1)));
        rows && cols
    }

    /// Strip coordinate `z = s/√ℓ` at node `(i, j)`; undefined on the leading edge `x = 0`.
    pub fn strip_z(&self, i: usize, j: usize) -> Result<f64> {
        blasius_z(self.ell.get(i, j), self.s.get(i, j))
    }
}

/// Trapezoid rule over the first `t` units of a uniform line of samples.
///
/// The last, partial cell uses the linearly interpolated end value, so the
/// result is exact for integrands linear in the coordinate.
fn trapezoid_to(samples: &[f64], extent: f64, t: f64) -> f64 {
    let n = samples.len();
    let d = extent / (n - 1) as f64;
    let (k, frac) = ScalarField::locate(t, extent, n);
    let mut acc = 0.0;
    for m in 0..k {
        acc += 0.5 * d * (samples[m] + samples[m + 1]);
    }
    if frac > 0.0 {
        let end = samples[k] + frac * (samples[k + 1] - samples[k]);
        acc += 0.5 * frac * d * (samples[k] + end);
    }
    acc
}

fn cumulative_trapezoid(samples: &[f64], spacing: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(samples.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in samples.windows(2) {
        acc += 0.5 * spacing * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

fn require_positive(field: &ScalarField, name: &str) -> Result<()> {
    match field.values().iter().position(|&v| !(v > 0.0)) {
        Some(k) => Err(Error::invariant(format!(
            "{name} must be strictly positive; node ({}, {}) holds {}",
            k % field.nx(),
            k / field.nx(),
            field.values()[k]
        ))),
        None => Ok(()),
    }
}

fn row_at(field: &ScalarField, y: f64) -> Vec<f64> {
    let (j, t) = ScalarField::locate(y, field.height(), field.ny());
    (0..field.nx())
        .map(|i| (1.0 - t) * field.get(i, j) + t * field.get(i, j + 1))
        .collect()
}

fn column_at(field: &ScalarField, x: f64) -> Vec<f64> {
    let (i, t) = ScalarField::locate(x, field.length(), field.nx());
    (0..field.ny())
        .map(|j| (1.0 - t) * field.get(i, j) + t * field.get(i + 1, j))
        .collect()
}

fn check_point(field: &ScalarField, x: f64, y: f64) -> Result<()> {
    if field.contains(x, y) {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "point ({x}, {y}) lies outside [0,{}]x[0,{}]",
            field.length(),
            field.height()
        )))
    }
}

/// `ℓ(x̂, ŷ) = ∫₀^x̂ p(x, ŷ) dx` by the composite trapezoid rule.
pub fn ell_coordinate(p: &ScalarField, x_hat: f64, y_hat: f64) -> Result<f64> {
    check_point(p, x_hat, y_hat)?;
    require_positive(p, "pressure")?;
    Ok(trapezoid_to(&row_at(p, y_hat), p.length(), x_hat))
}

/// `s(x̂, ŷ) = ∫₀^ŷ ρ(x̂, y) dy` by the composite trapezoid rule.
pub fn s_coordinate(rho: &ScalarField, x_hat: f64, y_hat: f64) -> Result<f64> {
    check_point(rho, x_hat, y_hat)?;
    require_positive(rho, "density")?;
    Ok(trapezoid_to(&column_at(rho, x_hat), rho.height(), y_hat))
}

/// Evaluates `(ℓ, s)` at every node together with `|Ds| = c1 σ0 ρ`.
pub fn build_map(p: &ScalarField, rho: &ScalarField, dc: &DerivedConstants, fs: &FreeStream) -> Result<DorodnitzynMap> {
    p.require_same_grid(rho)?;
    require_positive(p, "pressure")?;
    let (nx, ny) = (p.nx(), p.ny());

    let scale = dc.c1 * fs.sigma0();
    let jac = rho.map(|r| scale * r)?;
    if let Some(k) = jac.values().iter().position(|&v| !(v > 0.0)) {
        return Err(Error::invariant(format!(
            "Jacobian {} at node ({}, {}) is not positive; the map is not a diffeomorphism there",
            jac.values()[k],
            k % nx,
            k / nx
        )));
    }

    let mut ell = vec![0.0; nx * ny];
    for j in 0..ny {
        let row = &p.values()[j * nx..(j + 1) * nx];
        ell[j * nx..(j + 1) * nx].copy_from_slice(&cumulative_trapezoid(row, p.dx()));
    }
    let mut s = vec![0.0; nx * ny];
    for i in 0..nx {
        let col: Vec<f64> = (0..ny).map(|j| rho.get(i, j)).collect();
        for (j, v) in cumulative_trapezoid(&col, rho.dy()).into_iter().enumerate() {
            s[j * nx + i] = v;
        }
    }

    Ok(DorodnitzynMap {
        ell: ScalarField::new(nx, ny, p.length(), p.height(), ell)?,
        s: ScalarField::new(nx, ny, p.length(), p.height(), s)?,
        jac,
    })
}

/// Strip variable `z = s/√ℓ`.
pub fn blasius_z(ell: f64, s: f64) -> Result<f64> {
    if !(ell > 0.0) {
        return Err(Error::domain(format!(
            "strip map needs ℓ > 0 (undefined at the leading edge), got {ell}"
        )));
    }
    Ok(s / ell.sqrt())
}

/// Jacobian determinant of `(ℓ, s) ↦ (ℓ, z)`, which is `ℓ^(-1/2)`.
pub fn strip_jacobian(ell: f64) -> Result<f64> {
    if !(ell > 0.0) {
        return Err(Error::domain(format!("strip map needs ℓ > 0, got {ell}")));
    }
    Ok(ell.powf(-0.5))
}
