//! Shooting on the wall shear `τ(0)`.
//!
//! Along the strip variable `z` the shear problem is the regular system
//!
//! ```text
//! f' = u,   u' = σ(u)^(6/25) τ,   τ' = -K f σ(u)^(6/25) τ,
//! ```
//!
//! started from `f = u = 0`, `τ = τ_wall`. It follows from `τ τ_uu = rhs(u)`
//! through `du/dz = σ^(6/25) τ`, which gives `d(τ_u)/dz = -K u` and hence
//! `τ_u = -K f` once `τ_u(0) = 0`. The shear decays like a Gaussian in `z`
//! while `u` rises to a limit `u_∞(τ_wall)`; the edge condition `τ(U) = 0`
//! becomes `u_∞ = U`, which is solved by safeguarded secant iteration in
//! `ln τ_wall`.

use super::ode::{hermite, integrate, Flow, Node, StepControl};
use super::{graded_grid, CroccoProblem, CroccoSolution, SolverMeta, SolverMethod, WALL_SCALE};
use crate::error::{Error, Result};

const F: usize = 0;
const U: usize = 1;
const TAU: usize = 2;

const MAX_ROOT_ITERATIONS: usize = 200;
const MAX_BRACKET_EXPANSIONS: usize = 60;
const TAIL_FRACTION: f64 = 1e-16;

struct Shot {
    nodes: Vec<Node<3>>,
    /// Limit of `u` as `z → ∞`.
    u_inf: f64,
    tau_end: f64,
    /// `u` approached `√(2 i0)` where σ vanishes.
    saturated: bool,
}

fn shoot(prob: &CroccoProblem, tau_wall: f64, keep_nodes: bool) -> Result<Shot> {
    let z_scale = 1.0 / (prob.k() * prob.u_edge()).sqrt();
    let ctl = StepControl {
        rtol: 1e-12,
        atol: [1e-15 * prob.u_edge() * z_scale, 1e-15 * prob.u_edge(), 1e-15 * tau_wall],
        h_init: 1e-3 * z_scale,
        h_max: 0.02 * z_scale,
        max_steps: 200_000,
    };
    let u_sat = if prob.is_incompressible() {
        f64::INFINITY
    } else {
        (2.0 * prob.i0()).sqrt() * (1.0 - 1e-9)
    };
    let k = prob.k();
    let rhs = |_: f64, y: &[f64; 3]| {
        let g = prob.sigma(y[U]).powf(-super::SIGMA_EXPONENT);
        [y[U], g * y[TAU], -k * y[F] * g * y[TAU]]
    };

    let mut nodes = Vec::new();
    let mut last = None;
    let mut saturated = false;
    integrate(rhs, 0.0, [0.0, 0.0, tau_wall], 400.0 * z_scale, &ctl, |n| {
        if keep_nodes {
            nodes.push(*n);
        }
        last = Some(*n);
        if n.y[U] >= u_sat {
            saturated = true;
            return Flow::Stop;
        }
        if n.y[TAU] <= TAIL_FRACTION * tau_wall {
            Flow::Stop
        } else {
            Flow::Continue
        }
    })?;
    let end = last.expect("integrator reports the initial node");
    // remaining rise of u: ∫ g τ dz with τ' ≈ -K f g τ, so ≈ τ/(K f)
    let tail = if end.y[F] > 0.0 {
        end.y[TAU] / (k * end.y[F])
    } else {
        0.0
    };
    Ok(Shot {
        nodes,
        u_inf: end.y[U] + tail,
        tau_end: end.y[TAU],
        saturated,
    })
}

/// Mismatch `ln(u_∞/U)` as a function of `ln τ_wall`.
fn mismatch(prob: &CroccoProblem, log_tau: f64) -> Result<f64> {
    let shot = shoot(prob, log_tau.exp(), false)?;
    Ok((shot.u_inf / prob.u_edge()).ln())
}

/// Solves with the default output grid of 201 nodes graded toward `u = U`.
pub fn solve_shooting(prob: &CroccoProblem, tol: f64) -> Result<CroccoSolution> {
    solve_shooting_on(prob, tol, &graded_grid(prob.u_edge(), 201))
}

/// Solves and tabulates `τ` on `grid`, which must ascend from `0` to `U`.
///
/// Converges when the edge mismatch `|u_∞ - U|/U` and the shear left at the
/// end of the integration, relative to `τ_wall`, are both below `tol`.
pub fn solve_shooting_on(prob: &CroccoProblem, tol: f64, grid: &[f64]) -> Result<CroccoSolution> {
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tolerance must be positive, got {tol}")));
    }
    check_grid(grid, prob.u_edge())?;
    let root_tol = tol.min(1e-13);

    let tau_ref = WALL_SCALE * prob.shear_scale();
    let (mut lo, mut hi) = ((0.5 * tau_ref).ln(), (1.5 * tau_ref).ln());
    let (mut f_lo, mut f_hi) = (mismatch(prob, lo)?, mismatch(prob, hi)?);
    let mut expansions = 0;
    while f_lo > 0.0 || f_hi < 0.0 {
        expansions += 1;
        if expansions > MAX_BRACKET_EXPANSIONS {
            return Err(Error::NoConvergence {
                iterations: expansions,
                residual: f_lo.abs().min(f_hi.abs()),
                detail: format!(
                    "could not bracket the wall shear: mismatch {f_lo:.3e} at τ = {:.3e}, {f_hi:.3e} at τ = {:.3e}",
                    lo.exp(),
                    hi.exp()
                ),
            });
        }
        if f_lo > 0.0 {
            lo -= std::f64::consts::LN_2;
            f_lo = mismatch(prob, lo)?;
        }
        if f_hi < 0.0 {
            hi += std::f64::consts::LN_2;
            f_hi = mismatch(prob, hi)?;
        }
    }

    // secant iterates, falling back to bisection when a step leaves the bracket
    let (mut x0, mut g0) = (lo, f_lo);
    let (mut x1, mut g1) = (hi, f_hi);
    let mut iterations = 0;
    let mut best = if f_lo.abs() < f_hi.abs() {
        (lo, f_lo)
    } else {
        (hi, f_hi)
    };
    while best.1.abs() > root_tol {
        iterations += 1;
        if iterations > MAX_ROOT_ITERATIONS {
            return Err(Error::NoConvergence {
                iterations,
                residual: best.1.abs(),
                detail: "secant iteration on the wall shear did not converge".into(),
            });
        }
        let mut x = if g1 != g0 {
            x1 - g1 * (x1 - x0) / (g1 - g0)
        } else {
            f64::NAN
        };
        if !(x > lo && x < hi) {
            x = 0.5 * (lo + hi);
        }
        let g = mismatch(prob, x)?;
        if g < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if g.abs() < best.1.abs() {
            best = (x, g);
        }
        x0 = x1;
        g0 = g1;
        x1 = x;
        g1 = g;
        if hi - lo <= 4.0 * f64::EPSILON * lo.abs().max(1.0) {
            break;
        }
    }

    let tau_wall = best.0.exp();
    let shot = shoot(prob, tau_wall, true)?;
    let edge_mismatch = ((shot.u_inf - prob.u_edge()) / prob.u_edge()).abs();
    let residual = edge_mismatch.max(shot.tau_end / tau_wall);
    if !shot.saturated && shot.u_inf < prob.u_edge() * (1.0 - tol) && shot.tau_end <= tol * tau_wall {
        return Err(Error::PrematureSeparation {
            u: shot.u_inf,
            edge: prob.u_edge(),
        });
    }
    if shot.saturated || residual > tol {
        return Err(Error::NoConvergence {
            iterations,
            residual,
            detail: "terminal shear or edge mismatch above tolerance".into(),
        });
    }

    let tau = tabulate(&shot.nodes, grid, prob.u_edge());
    Ok(CroccoSolution {
        u_grid: grid.to_vec(),
        tau,
        tau_wall,
        meta: SolverMeta {
            method: SolverMethod::Shooting,
            iterations,
            residual,
        },
    })
}

pub(crate) fn check_grid(grid: &[f64], u_edge: f64) -> Result<()> {
    if grid.len() < 3 {
        return Err(Error::domain("output grid needs at least 3 nodes"));
    }
    if grid[0] != 0.0 || (grid[grid.len() - 1] - u_edge).abs() > 1e-12 * u_edge {
        return Err(Error::domain(format!("output grid must span [0, {u_edge}]")));
    }
    if !grid.windows(2).all(|w| w[1] > w[0]) {
        return Err(Error::domain("output grid must be strictly ascending"));
    }
    Ok(())
}

/// Reads `τ` at each grid speed off the `z` trajectory.
fn tabulate(nodes: &[Node<3>], grid: &[f64], u_edge: f64) -> Vec<f64> {
    let end = nodes.last().expect("trajectory is never empty");
    let mut seg = 0;
    grid.iter()
        .map(|&u| {
            if u <= 0.0 {
                return nodes[0].y[TAU];
            }
            if u >= u_edge {
                return 0.0;
            }
            if u >= end.y[U] {
                // between the last integrated point and the edge
                let t = (u - end.y[U]) / (u_edge - end.y[U]);
                return (1.0 - t) * end.y[TAU];
            }
            while nodes[seg + 1].y[U] < u {
                seg += 1;
            }
            let (a, b) = (&nodes[seg], &nodes[seg + 1]);
            let (mut za, mut zb) = (a.t, b.t);
            for _ in 0..100 {
                let zm = 0.5 * (za + zb);
                if hermite(a, b, zm, U) < u {
                    za = zm;
                } else {
                    zb = zm;
                }
                if zb - za <= 1e-15 * zb.abs() {
                    break;
                }
            }
            hermite(a, b, 0.5 * (za + zb), TAU)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn incompressible_unit_problem() {
        let prob = CroccoProblem::incompressible(1.0, 1.0).unwrap();
        let sol = solve_shooting(&prob, 1e-10).unwrap();
        assert!((sol.tau_wall - 0.469_60).abs() < 1e-4, "{}", sol.tau_wall);
        assert_eq!(sol.tau[0], sol.tau_wall);
        assert_eq!(*sol.tau.last().unwrap(), 0.0);
        assert!(sol.tau[..sol.tau.len() - 1].iter().all(|&t| t > 0.0));
        assert!(sol.meta.residual <= 1e-10);
    }

    #[test]
    fn quadrupled_coefficient_doubles_wall_shear() {
        let one = solve_shooting(&CroccoProblem::incompressible(1.0, 1.0).unwrap(), 1e-10).unwrap();
        let four = solve_shooting(&CroccoProblem::incompressible(4.0, 1.0).unwrap(), 1e-10).unwrap();
        assert!((four.tau_wall / one.tau_wall - 2.0).abs() < 1e-9);
    }

    #[test]
    fn profile_is_decreasing() {
        let prob = CroccoProblem::new(2.0, 0.8, 1.0).unwrap();
        let sol = solve_shooting(&prob, 1e-10).unwrap();
        assert!(sol.tau.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn bad_grid_is_rejected() {
        let prob = CroccoProblem::incompressible(1.0, 1.0).unwrap();
        assert!(solve_shooting_on(&prob, 1e-8, &[0.0, 0.5]).is_err());
        assert!(solve_shooting_on(&prob, 1e-8, &[0.0, 0.7, 0.5, 1.0]).is_err());
        assert!(solve_shooting_on(&prob, 1e-8, &[0.1, 0.5, 1.0]).is_err());
        assert!(solve_shooting(&prob, 0.0).is_err());
    }
}
