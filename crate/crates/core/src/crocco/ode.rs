//! Embedded Dormand–Prince 5(4) integrator with step-size control.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// fifth-order weights minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy)]
pub(crate) struct StepControl<const N: usize> {
    pub rtol: f64,
    pub atol: [f64; N],
    pub h_init: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

/// Returned by the observer after each accepted step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Flow {
    Continue,
    Stop,
}

/// One accepted point of a trajectory with its derivative.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Node<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub dy: [f64; N],
}

fn axpy<const N: usize>(y: &[f64; N], terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += c * k[i];
        }
    }
    out
}

/// Integrates `y' = rhs(t, y)` from `(t0, y0)` until `t_end` or until `observe` stops it.
///
/// `observe` sees every accepted node including the initial one. Returns the
/// number of accepted steps.
pub(crate) fn integrate<const N: usize>(
    rhs: impl Fn(f64, &[f64; N]) -> [f64; N],
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    ctl: &StepControl<N>,
    mut observe: impl FnMut(&Node<N>) -> Flow,
) -> Result<usize> {
    let mut t = t0;
    let mut y = y0;
    let mut k1 = rhs(t, &y);
    if observe(&Node { t, y, dy: k1 }) == Flow::Stop {
        return Ok(0);
    }
    let mut h = ctl.h_init.min(ctl.h_max);
    let mut accepted = 0;
    let mut attempts = 0;
    while t < t_end {
        attempts += 1;
        if attempts > ctl.max_steps {
            return Err(Error::NoConvergence {
                iterations: attempts,
                residual: f64::NAN,
                detail: format!("integrator exceeded {} steps at t = {t:.6e}", ctl.max_steps),
            });
        }
        h = h.min(t_end - t);
        let k2 = rhs(t + C2 * h, &axpy(&y, &[(h * A21, &k1)]));
        let k3 = rhs(t + C3 * h, &axpy(&y, &[(h * A31, &k1), (h * A32, &k2)]));
        let k4 = rhs(t + C4 * h, &axpy(&y, &[(h * A41, &k1), (h * A42, &k2), (h * A43, &k3)]));
        let k5 = rhs(
            t + C5 * h,
            &axpy(&y, &[(h * A51, &k1), (h * A52, &k2), (h * A53, &k3), (h * A54, &k4)]),
        );
        let k6 = rhs(
            t + h,
            &axpy(
                &y,
                &[
                    (h * A61, &k1),
                    (h * A62, &k2),
                    (h * A63, &k3),
                    (h * A64, &k4),
                    (h * A65, &k5),
                ],
            ),
        );
        let y_new = axpy(
            &y,
            &[
                (h * A71, &k1),
                (h * A73, &k3),
                (h * A74, &k4),
                (h * A75, &k5),
                (h * A76, &k6),
            ],
        );
        let k7 = rhs(t + h, &y_new);

        let mut err: f64 = 0.0;
        for i in 0..N {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let scale = ctl.atol[i] + ctl.rtol * y[i].abs().max(y_new[i].abs());
            err = err.max((e / scale).abs());
        }
        if !err.is_finite() {
            h *= 0.25;
            if h < 1e-14 * t.abs().max(1.0) {
                return Err(Error::NoConvergence {
                    iterations: attempts,
                    residual: f64::NAN,
                    detail: format!("non-finite state near t = {t:.6e}"),
                });
            }
            continue;
        }
        if err <= 1.0 {
            t += h;
            y = y_new;
            k1 = k7;
            accepted += 1;
            if observe(&Node { t, y, dy: k1 }) == Flow::Stop {
                break;
            }
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h = (h * factor).min(ctl.h_max);
    }
    Ok(accepted)
}

/// Cubic Hermite interpolation of component `c` between two nodes.
pub(crate) fn hermite<const N: usize>(a: &Node<N>, b: &Node<N>, t: f64, c: usize) -> f64 {
    let h = b.t - a.t;
    let s = (t - a.t) / h;
    let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    let h10 = s * (1.0 - s) * (1.0 - s);
    let h01 = s * s * (3.0 - 2.0 * s);
    let h11 = s * s * (s - 1.0);
    h00 * a.y[c] + h10 * h * a.dy[c] + h01 * b.y[c] + h11 * h * b.dy[c]
}
