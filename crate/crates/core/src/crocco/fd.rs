//! Damped Newton iteration on a three-point discretization of `τ τ'' = rhs(u)`.
//!
//! Nodes follow [`graded_grid`], so the spacing shrinks linearly toward the
//! edge, where `τ` has its logarithmic singularity. On a uniform grid that
//! singularity limits the scheme to first order; on the graded grid the
//! wall value converges at second order.

use super::{graded_grid, CroccoProblem, CroccoSolution, SolverMeta, SolverMethod, WALL_SCALE};
use crate::error::{Error, Result};

const MAX_NEWTON: usize = 100;
const MAX_HALVINGS: usize = 40;

struct Stencil {
    // one-sided wall derivative on nodes 0, 1, 2
    wall: [f64; 3],
    // second-difference weights (left, centre, right) for interior nodes
    inner: Vec<[f64; 3]>,
    rhs: Vec<f64>,
}

impl Stencil {
    fn new(u: &[f64], prob: &CroccoProblem) -> Self {
        let (h0, h1) = (u[1] - u[0], u[2] - u[1]);
        let wall = [
            -(2.0 * h0 + h1) / (h0 * (h0 + h1)),
            (h0 + h1) / (h0 * h1),
            -h0 / (h1 * (h0 + h1)),
        ];
        let inner = (1..u.len() - 1)
            .map(|i| {
                let (hm, hp) = (u[i] - u[i - 1], u[i + 1] - u[i]);
                let am = 2.0 / (hm * (hm + hp));
                let ap = 2.0 / (hp * (hm + hp));
                [am, -am - ap, ap]
            })
            .collect();
        let rhs = u.iter().map(|&v| prob.rhs_unchecked(v)).collect();
        Stencil { wall, inner, rhs }
    }

    fn second_difference(&self, tau: &[f64], i: usize) -> f64 {
        let [a, c, b] = self.inner[i - 1];
        a * tau[i - 1] + c * tau[i] + b * tau[i + 1]
    }

    /// Residual vector: wall condition first, then each interior equation.
    fn residual(&self, tau: &[f64]) -> Vec<f64> {
        let mut r = Vec::with_capacity(tau.len() - 1);
        r.push(self.wall[0] * tau[0] + self.wall[1] * tau[1] + self.wall[2] * tau[2]);
        for i in 1..tau.len() - 1 {
            r.push(tau[i] * self.second_difference(tau, i) - self.rhs[i]);
        }
        r
    }

    fn norm(&self, r: &[f64], scale: f64) -> f64 {
        r.iter().fold(0.0, |m: f64, v| m.max(v.abs())) / scale
    }
}

/// Solves on `n` graded nodes; `tol` bounds the max-norm of the discrete
/// equations relative to `max |rhs|`.
pub fn solve_fd_newton(prob: &CroccoProblem, n: usize, tol: f64) -> Result<CroccoSolution> {
    if n < 50 {
        return Err(Error::domain(format!("need at least 50 nodes, got {n}")));
    }
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tolerance must be positive, got {tol}")));
    }
    let u = graded_grid(prob.u_edge(), n);
    let st = Stencil::new(&u, prob);
    let scale = st.rhs.iter().fold(0.0, |m: f64, v| m.max(v.abs()));

    let tau_ref = WALL_SCALE * prob.shear_scale();
    let mut tau: Vec<f64> = u
        .iter()
        .map(|&v| tau_ref * (1.0 - (v / prob.u_edge()).powi(2)))
        .collect();
    tau[n - 1] = 0.0;

    let mut r = st.residual(&tau);
    let mut res = st.norm(&r, scale);
    let mut iterations = 0;
    while res > tol {
        iterations += 1;
        if iterations > MAX_NEWTON {
            return Err(Error::Stagnation {
                iterations: iterations - 1,
                residual: res,
            });
        }
        let delta = newton_step(&st, &tau, &r)?;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            let trial: Vec<f64> = tau
                .iter()
                .zip(delta.iter().chain(std::iter::once(&0.0)))
                .map(|(t, d)| t - lambda * d)
                .collect();
            if trial[..n - 1].iter().all(|&t| t > 0.0) {
                let rt = st.residual(&trial);
                let rn = st.norm(&rt, scale);
                if rn < res {
                    tau = trial;
                    r = rt;
                    res = rn;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            return Err(Error::Stagnation {
                iterations,
                residual: res,
            });
        }
    }

    Ok(CroccoSolution {
        tau_wall: tau[0],
        u_grid: u,
        tau,
        meta: SolverMeta {
            method: SolverMethod::FiniteDifference,
            iterations,
            residual: res,
        },
    })
}

/// Solves `J δ = r` for the unknowns `τ_0 … τ_{n-2}`.
fn newton_step(st: &Stencil, tau: &[f64], r: &[f64]) -> Result<Vec<f64>> {
    let m = tau.len() - 1;
    let mut lower = vec![0.0; m];
    let mut diag = vec![0.0; m];
    let mut upper = vec![0.0; m];
    let mut rhs = r.to_vec();
    for i in 1..m {
        let [a, c, b] = st.inner[i - 1];
        lower[i] = tau[i] * a;
        diag[i] = st.second_difference(tau, i) + tau[i] * c;
        if i + 1 < m {
            upper[i] = tau[i] * b;
        }
    }
    // eliminate the τ_2 entry of the wall row with the first interior row
    let [w0, w1, w2] = st.wall;
    let pivot = tau[1] * st.inner[0][2];
    if pivot == 0.0 {
        return Err(Error::Degenerate("zero coupling in the first interior row".into()));
    }
    let k = w2 / pivot;
    diag[0] = w0 - k * lower[1];
    upper[0] = w1 - k * diag[1];
    rhs[0] -= k * rhs[1];
    thomas(&lower, &mut diag, &upper, &mut rhs)?;
    Ok(rhs)
}

fn thomas(lower: &[f64], diag: &mut [f64], upper: &[f64], rhs: &mut [f64]) -> Result<()> {
    let m = diag.len();
    for i in 1..m {
        if diag[i - 1] == 0.0 {
            return Err(Error::Degenerate(format!("singular Newton matrix at row {}", i - 1)));
        }
        let w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    if diag[m - 1] == 0.0 {
        return Err(Error::Degenerate("singular Newton matrix at the last row".into()));
    }
    rhs[m - 1] /= diag[m - 1];
    for i in (0..m - 1).rev() {
        rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn incompressible_wall_value() {
        let prob = CroccoProblem::incompressible(1.0, 1.0).unwrap();
        let sol = solve_fd_newton(&prob, 801, 1e-9).unwrap();
        assert!((sol.tau_wall - 0.469_60).abs() < 1e-4, "{}", sol.tau_wall);
        assert!(sol.meta.residual <= 1e-9);
        assert!(sol.discrete_residual(&prob) <= 1e-8);
    }

    #[test]
    fn too_few_nodes() {
        let prob = CroccoProblem::incompressible(1.0, 1.0).unwrap();
        assert!(matches!(solve_fd_newton(&prob, 49, 1e-8), Err(Error::Domain(_))));
        assert!(solve_fd_newton(&prob, 50, 1e-8).is_ok());
    }

    #[test]
    fn thomas_solves_small_system() {
        // [2 1 0; 1 3 1; 0 1 2] x = [3, 5, 3] → x = [1, 1, 1]
        let mut d = vec![2.0, 3.0, 2.0];
        let mut b = vec![3.0, 5.0, 3.0];
        thomas(&[0.0, 1.0, 1.0], &mut d, &[1.0, 1.0, 0.0], &mut b).unwrap();
        for x in b {
            assert!((x - 1.0).abs() < 1e-15);
        }
    }
}
