use super::ScalarField;
use crate::error::{Error, Result};

/// Max-norm of the centred-difference divergence of `(ρu, ρv)` over interior nodes.
pub fn divergence_residual(rho_u: &ScalarField, rho_v: &ScalarField) -> Result<f64> {
    rho_u.require_same_grid(rho_v)?;
    let (nx, ny) = (rho_u.nx(), rho_u.ny());
    let (dx, dy) = (rho_u.dx(), rho_u.dy());
    let mut worst: f64 = 0.0;
    for j in 1..ny.saturating_sub(1) {
        for i in 1..nx - 1 {
            let d = (rho_u.get(i + 1, j) - rho_u.get(i - 1, j)) / (2.0 * dx)
                + (rho_v.get(i, j + 1) - rho_v.get(i, j - 1)) / (2.0 * dy);
            worst = worst.max(d.abs());
        }
    }
    Ok(worst)
}

/// `1e-8 · max(|ρu|, |ρv|) / min(dx, dy)`.
pub fn default_divergence_tolerance(rho_u: &ScalarField, rho_v: &ScalarField) -> f64 {
    1e-8 * rho_u.max_abs().max(rho_v.max_abs()) / rho_u.dx().min(rho_u.dy())
}

/// Order in which the line integral reaches `(x, y)` from the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegrationPath {
    /// Along `y = 0` to `x`, then up.
    BottomThenUp,
    /// Up `x = 0` to `y`, then across.
    LeftThenAcross,
}

/// Stream function along a fixed path, without checking the divergence.
pub fn stream_function_along(rho_u: &ScalarField, rho_v: &ScalarField, path: IntegrationPath) -> Result<ScalarField> {
    rho_u.require_same_grid(rho_v)?;
    let (nx, ny) = (rho_u.nx(), rho_u.ny());
    let (dx, dy) = (rho_u.dx(), rho_u.dy());
    let mut psi = vec![0.0; nx * ny];
    match path {
        IntegrationPath::BottomThenUp => {
            for i in 1..nx {
                psi[i] = psi[i - 1] - 0.5 * dx * (rho_v.get(i - 1, 0) + rho_v.get(i, 0));
            }
            for j in 1..ny {
                for i in 0..nx {
                    psi[j * nx + i] = psi[(j - 1) * nx + i] + 0.5 * dy * (rho_u.get(i, j - 1) + rho_u.get(i, j));
                }
            }
        }
        IntegrationPath::LeftThenAcross => {
            for j in 1..ny {
                psi[j * nx] = psi[(j - 1) * nx] + 0.5 * dy * (rho_u.get(0, j - 1) + rho_u.get(0, j));
            }
            for j in 0..ny {
                for i in 1..nx {
                    psi[j * nx + i] = psi[j * nx + i - 1] - 0.5 * dx * (rho_v.get(i - 1, j) + rho_v.get(i, j));
                }
            }
        }
    }
    ScalarField::new(nx, ny, rho_u.length(), rho_u.height(), psi)
}

/// Stream function with `∂ψ/∂x = -ρv`, `∂ψ/∂y = ρu` and `ψ(0, 0) = 0`,
/// using the default divergence tolerance.
pub fn stream_function(rho_u: &ScalarField, rho_v: &ScalarField) -> Result<ScalarField> {
    let tol = default_divergence_tolerance(rho_u, rho_v);
    stream_function_with_tolerance(rho_u, rho_v, tol)
}

/// As [`stream_function`], rejecting inputs whose divergence residual exceeds `tol`.
pub fn stream_function_with_tolerance(rho_u: &ScalarField, rho_v: &ScalarField, tol: f64) -> Result<ScalarField> {
    let residual = divergence_residual(rho_u, rho_v)?;
    if residual > tol {
        return Err(Error::invariant(format!(
            "mass flux is not divergence free (residual {residual:.3e} > {tol:.3e}); \
             the stream function would depend on the integration path"
        )));
    }
    stream_function_along(rho_u, rho_v, IntegrationPath::BottomThenUp)
}

/// Max-norm difference of the stream functions built along the two paths.
pub fn two_path_discrepancy(rho_u: &ScalarField, rho_v: &ScalarField) -> Result<f64> {
    let a = stream_function_along(rho_u, rho_v, IntegrationPath::BottomThenUp)?;
    let b = stream_function_along(rho_u, rho_v, IntegrationPath::LeftThenAcross)?;
    Ok(a.values()
        .iter()
        .zip(b.values())
        .fold(0.0, |m, (x, y)| m.max((x - y).abs())))
}
