//! Dormand–Prince 5(4) with PI step-size control.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
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
// difference between the 5th and embedded 4th order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO: f64 = 0.2 - BETA * 0.75;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

#[derive(Clone, Copy, Debug)]
pub(crate) struct StepControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
}

/// One accepted state with its time derivative.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Node<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub dy: [f64; N],
}

#[derive(Clone, Copy, Debug, Default, PartialEq, serde::Serialize)]
pub struct IntegratorStats {
    pub steps: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
    /// Largest normalized error estimate among accepted steps (≤ 1).
    pub max_error: f64,
}

pub(crate) struct Trajectory<const N: usize> {
    pub nodes: Vec<Node<N>>,
    /// For each requested output time, the index of the node that hits it.
    pub output_idx: Vec<usize>,
    pub stats: IntegratorStats,
    pub halted: bool,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        *o += h * acc;
    }
    out
}

fn error_norm<const N: usize>(err: &[f64; N], y0: &[f64; N], y1: &[f64; N], ctl: &StepControl) -> f64 {
    let mut acc = 0.0;
    for i in 0..N {
        let sc = ctl.abs_tol + ctl.rel_tol * y0[i].abs().max(y1[i].abs());
        acc += (err[i] / sc).powi(2);
    }
    (acc / N as f64).sqrt()
}

/// Integrates `y' = f(t, y)` from `t = 0` to `t_end` (either sign).
///
/// Every time in `outputs` (monotone in the direction of integration, within
/// `[0, t_end]`) is landed on exactly by an accepted step. `halt` is checked
/// after each accepted step and stops the integration early.
pub(crate) fn integrate<const N: usize, F, H>(
    mut rhs: F,
    y0: [f64; N],
    t_end: f64,
    outputs: &[f64],
    ctl: &StepControl,
    mut halt: H,
) -> Result<Trajectory<N>>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
    H: FnMut(f64, &[f64; N]) -> bool,
{
    if !t_end.is_finite() {
        return Err(Error::InvalidArgument("integration span must be finite".into()));
    }
    if !(ctl.rel_tol > 0.0 && ctl.abs_tol > 0.0) {
        return Err(Error::InvalidArgument("integrator tolerances must be positive".into()));
    }
    let dir = if t_end < 0.0 { -1.0 } else { 1.0 };
    let span = t_end.abs();
    let max_step = if ctl.max_step > 0.0 { ctl.max_step.min(span) } else { span };
    let min_step = 1e-14 * span;

    let mut stats = IntegratorStats::default();
    let mut t = 0.0;
    let mut y = y0;
    let mut k1 = rhs(t, &y)?;
    stats.rhs_evals += 1;

    let mut nodes = vec![Node { t, y, dy: k1 }];
    let mut output_idx = Vec::with_capacity(outputs.len());
    let mut next_out = 0;
    while next_out < outputs.len() && outputs[next_out] * dir <= 0.0 {
        output_idx.push(0);
        next_out += 1;
    }
    if span == 0.0 {
        return Ok(Trajectory {
            nodes,
            output_idx,
            stats,
            halted: false,
        });
    }

    // initial step guess (Hairer, Nørsett & Wanner, II.4)
    let mut h = {
        let sc: Vec<f64> = y.iter().map(|v| ctl.abs_tol + ctl.rel_tol * v.abs()).collect();
        let d0 = (y.iter().zip(&sc).map(|(v, s)| (v / s).powi(2)).sum::<f64>() / N as f64).sqrt();
        let d1 = (k1.iter().zip(&sc).map(|(v, s)| (v / s).powi(2)).sum::<f64>() / N as f64).sqrt();
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let h0 = h0.min(max_step);
        let y1 = axpy(&y, dir * h0, &[(1.0, &k1)]);
        let k = rhs(dir * h0, &y1)?;
        stats.rhs_evals += 1;
        let d2 = (k
            .iter()
            .zip(&k1)
            .zip(&sc)
            .map(|((a, b), s)| ((a - b) / s).powi(2))
            .sum::<f64>()
            / N as f64)
            .sqrt()
            / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(max_step)
    };

    let mut fac_old: f64 = 1e-4;
    let mut rejected_last = false;
    loop {
        if h < min_step {
            return Err(Error::StepUnderflow { t, step: h });
        }
        let remaining = span - t * dir;
        let mut step = h.min(remaining);
        let mut hits_output = false;
        if next_out < outputs.len() {
            let to_out = outputs[next_out] * dir - t * dir;
            if step >= to_out {
                step = to_out;
                hits_output = true;
            }
        }
        let hs = dir * step;

        let k2 = rhs(t + C[1] * hs, &axpy(&y, hs, &[(A21, &k1)]))?;
        let k3 = rhs(t + C[2] * hs, &axpy(&y, hs, &[(A31, &k1), (A32, &k2)]))?;
        let k4 = rhs(t + C[3] * hs, &axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]))?;
        let k5 = rhs(
            t + C[4] * hs,
            &axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        )?;
        let k6 = rhs(
            t + C[5] * hs,
            &axpy(&y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        )?;
        let y_new = axpy(&y, hs, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = rhs(t + hs, &y_new)?;
        stats.rhs_evals += 6;

        let mut err = [0.0; N];
        for i in 0..N {
            err[i] = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let e = error_norm(&err, &y, &y_new, ctl);
        if !e.is_finite() {
            return Err(Error::Domain {
                expr: format!("non-finite state near t = {t}"),
            });
        }

        let fac11 = e.powf(EXPO);
        if e <= 1.0 {
            let fac = (fac11 / fac_old.powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            let mut h_new = step / fac;
            if rejected_last {
                h_new = h_new.min(step);
            }
            fac_old = e.max(1e-4);
            rejected_last = false;

            t = if hits_output {
                outputs[next_out]
            } else if step == remaining {
                t_end
            } else {
                t + hs
            };
            y = y_new;
            k1 = k7;
            stats.steps += 1;
            stats.max_error = stats.max_error.max(e);
            nodes.push(Node { t, y, dy: k1 });
            if hits_output {
                // the controller's proposal is kept when the step was shortened to land here
                h_new = h_new.max(h);
                while next_out < outputs.len() && outputs[next_out] * dir <= t * dir {
                    output_idx.push(nodes.len() - 1);
                    next_out += 1;
                }
            }
            h = h_new.min(max_step);
            if halt(t, &y) {
                return Ok(Trajectory {
                    nodes,
                    output_idx,
                    stats,
                    halted: true,
                });
            }
            if t * dir >= span {
                while next_out < outputs.len() {
                    output_idx.push(nodes.len() - 1);
                    next_out += 1;
                }
                return Ok(Trajectory {
                    nodes,
                    output_idx,
                    stats,
                    halted: false,
                });
            }
        } else {
            stats.rejected += 1;
            rejected_last = true;
            h = step / (fac11 / SAFETY).min(1.0 / FAC_MIN);
        }
    }
}

/// Cubic Hermite interpolation between two nodes.
pub(crate) fn hermite<const N: usize>(a: &Node<N>, b: &Node<N>, t: f64) -> [f64; N] {
    let h = b.t - a.t;
    let s = (t - a.t) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    let mut out = [0.0; N];
    for i in 0..N {
        out[i] = h00 * a.y[i] + h10 * h * a.dy[i] + h01 * b.y[i] + h11 * h * b.dy[i];
    }
    out
}
