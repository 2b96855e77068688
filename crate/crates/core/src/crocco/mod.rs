//! The quasi-linear shear-stress equation in Crocco variables,
//!
//! ```text
//! τ τ'' = -K u σ(u)^(-6/25),   σ(u) = 1 - u²/(2 i₀),   0 ≤ u ≤ U,
//! ```
//!
//! with `τ'(0) = 0` at an adiabatic wall and `τ(U) = 0` at the edge of the
//! layer. Two independent solvers are provided: shooting on the wall shear
//! ([`solve_shooting`]) and a finite-difference Newton method
//! ([`solve_fd_newton`]).
//!
//! Near `u = U` the solution behaves like `(U-u) √(2|r| ln(1/(U-u)))`, with
//! `r` the right-hand side at the edge, so `τ'` is unbounded there. The
//! shooting method sidesteps this by integrating in the strip variable `z`,
//! where the system is regular, and the difference method uses a mesh graded
//! quadratically toward the edge.

mod fd;
pub(crate) mod ode;
mod reconstruct;
mod shooting;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::thermo::{DerivedConstants, FreeStream};

pub use fd::solve_fd_newton;
pub use reconstruct::{reconstruct_f, SimilarityProfile};
pub use shooting::{solve_shooting, solve_shooting_on};

/// Exponent of σ in the shear equation and in the viscous flux, `19/25 - 1`.
pub const SIGMA_EXPONENT: f64 = -6.0 / 25.0;

/// Wall-shear scale factor of the incompressible problem, `τ_wall ≈ 0.47 √(K U³)`.
pub(crate) const WALL_SCALE: f64 = 0.47;

/// Coefficients of one shear-stress problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CroccoProblem {
    k: f64,
    i0: f64,
    u_edge: f64,
}

impl CroccoProblem {
    /// `i0 = f64::INFINITY` selects the incompressible form `τ τ'' = -K u`.
    pub fn new(k: f64, i0: f64, u_edge: f64) -> Result<Self> {
        if k == 0.0 {
            return Err(Error::Degenerate(
                "K = 0 gives a zero right-hand side; only τ ≡ 0 satisfies both boundary conditions".into(),
            ));
        }
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::domain(format!("K must be positive and finite, got {k}")));
        }
        if !(u_edge > 0.0 && u_edge.is_finite()) {
            return Err(Error::domain(format!("edge speed must be positive, got {u_edge}")));
        }
        if !(i0 > 0.0) {
            return Err(Error::domain(format!("i0 must be positive, got {i0}")));
        }
        if i0.is_finite() && u_edge * u_edge >= 2.0 * i0 {
            return Err(Error::domain(format!(
                "U² = {} must stay below 2 i0 = {}",
                u_edge * u_edge,
                2.0 * i0
            )));
        }
        Ok(CroccoProblem { k, i0, u_edge })
    }

    pub fn incompressible(k: f64, u_edge: f64) -> Result<Self> {
        Self::new(k, f64::INFINITY, u_edge)
    }

    /// Problem for a scenario: `K` from the derived constants, `i0 = c_p T0`, `U` the free stream.
    pub fn from_scenario(dc: &DerivedConstants, fs: &FreeStream) -> Result<Self> {
        Self::new(dc.k_detau, fs.i0(), fs.u())
    }

    pub fn k(&self) -> f64 {
        self.k
    }
    pub fn i0(&self) -> f64 {
        self.i0
    }
    pub fn u_edge(&self) -> f64 {
        self.u_edge
    }
    pub fn is_incompressible(&self) -> bool {
        self.i0.is_infinite()
    }

    /// `σ(u)`, clamped at zero.
    pub(crate) fn sigma(&self, u: f64) -> f64 {
        if self.is_incompressible() {
            1.0
        } else {
            (1.0 - u * u / (2.0 * self.i0)).max(0.0)
        }
    }

    /// Natural wall-shear scale `√(K U³)`.
    pub fn shear_scale(&self) -> f64 {
        (self.k * self.u_edge.powi(3)).sqrt()
    }

    pub(crate) fn rhs_unchecked(&self, u: f64) -> f64 {
        -self.k * u * self.sigma(u).powf(SIGMA_EXPONENT)
    }
}

/// Right-hand side `-K u σ(u)^(-6/25)` for `0 ≤ u ≤ U`.
pub fn rhs(u: f64, prob: &CroccoProblem) -> Result<f64> {
    let slack = 1e-12 * prob.u_edge;
    if !(u >= -slack && u <= prob.u_edge + slack) {
        return Err(Error::domain(format!("u = {u} lies outside [0, {}]", prob.u_edge)));
    }
    Ok(prob.rhs_unchecked(u))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverMethod {
    Shooting,
    FiniteDifference,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverMeta {
    pub method: SolverMethod,
    pub iterations: usize,
    /// Shooting: terminal mismatch relative to the wall shear.
    /// Difference method: max-norm of the discrete equations relative to `max |rhs|`.
    pub residual: f64,
}

/// Shear profile `τ(u)` on an ascending grid of `[0, U]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CroccoSolution {
    pub u_grid: Vec<f64>,
    pub tau: Vec<f64>,
    pub tau_wall: f64,
    pub meta: SolverMeta,
}

impl CroccoSolution {
    /// Linear interpolation of `τ` at `u`.
    pub fn tau_at(&self, u: f64) -> Result<f64> {
        let (first, last) = (self.u_grid[0], *self.u_grid.last().unwrap());
        if !(u >= first && u <= last) {
            return Err(Error::domain(format!("u = {u} lies outside [{first}, {last}]")));
        }
        let k = match self.u_grid.partition_point(|&g| g <= u) {
            0 => 0,
            p if p >= self.u_grid.len() => self.u_grid.len() - 2,
            p => p - 1,
        };
        let (u0, u1) = (self.u_grid[k], self.u_grid[k + 1]);
        let t = (u - u0) / (u1 - u0);
        Ok((1.0 - t) * self.tau[k] + t * self.tau[k + 1])
    }

    /// Max-norm of `τ τ'' - rhs` over interior nodes, from three-point differences.
    pub fn discrete_residual(&self, prob: &CroccoProblem) -> f64 {
        let (u, t) = (&self.u_grid, &self.tau);
        (1..u.len() - 1)
            .map(|i| {
                let hm = u[i] - u[i - 1];
                let hp = u[i + 1] - u[i];
                let d2 = 2.0 * ((t[i + 1] - t[i]) / hp - (t[i] - t[i - 1]) / hm) / (hm + hp);
                (t[i] * d2 - prob.rhs_unchecked(u[i])).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Writes `u,tau` rows.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["u", "tau"])?;
        for (u, t) in self.u_grid.iter().zip(&self.tau) {
            w.write_record([u.to_string(), t.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, writer: W) -> Result<()> {
        serde_json::to_writer_pretty(writer, self)?;
        Ok(())
    }
}

/// Nodes `U (1 - (1 - k/(n-1))²)`, clustered toward the edge `u = U`.
pub fn graded_grid(u_edge: f64, n: usize) -> Vec<f64> {
    let m = (n - 1) as f64;
    (0..n)
        .map(|k| {
            if k == n - 1 {
                u_edge
            } else {
                let w = 1.0 - k as f64 / m;
                u_edge * (1.0 - w * w)
            }
        })
        .collect()
}
