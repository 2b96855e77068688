use serde::{Deserialize, Serialize};

use super::{CroccoProblem, CroccoSolution, SIGMA_EXPONENT};
use crate::error::{Error, Result};

/// Similarity profile recovered from `τ(u)`, one entry per solution node
/// except the edge node, where `z` is unbounded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityProfile {
    pub z: Vec<f64>,
    pub u: Vec<f64>,
    pub f: Vec<f64>,
    /// `f'' = σ(u)^(6/25) τ`.
    pub f_zz: Vec<f64>,
}

/// Inverts `du/dz = σ(u)^(6/25) τ(u)` from `u(0) = 0` and integrates
/// `f = ∫ u dz`, both by the trapezoid rule on the solution grid.
pub fn reconstruct_f(sol: &CroccoSolution, prob: &CroccoProblem) -> Result<SimilarityProfile> {
    let n = sol.u_grid.len();
    if n < 3 || sol.tau.len() != n {
        return Err(Error::invariant("solution needs at least 3 matching nodes"));
    }
    let m = n - 1;
    let u = sol.u_grid[..m].to_vec();
    let mut f_zz = Vec::with_capacity(m);
    for (&ui, &ti) in u.iter().zip(&sol.tau) {
        if !(ti > 0.0) {
            return Err(Error::invariant(format!("τ = {ti} is not positive at u = {ui}")));
        }
        f_zz.push(prob.sigma(ui).powf(-SIGMA_EXPONENT) * ti);
    }
    let mut z = vec![0.0; m];
    let mut f = vec![0.0; m];
    for i in 1..m {
        let du = u[i] - u[i - 1];
        z[i] = z[i - 1] + 0.5 * du * (1.0 / f_zz[i - 1] + 1.0 / f_zz[i]);
        f[i] = f[i - 1] + 0.5 * (z[i] - z[i - 1]) * (u[i - 1] + u[i]);
    }
    Ok(SimilarityProfile { z, u, f, f_zz })
}
