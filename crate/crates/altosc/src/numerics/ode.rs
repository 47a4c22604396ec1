//! Fixed-step RK4 and adaptive RKF45 integration for planar vector fields,
//! with uniform-cadence sampling and an optional stop predicate used by the
//! phase-flow code to halt cleanly at strip boundaries.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OdeMethod {
    Rk4Fixed,
    Rk45Adaptive,
}

#[derive(Clone, Copy, Debug)]
pub struct OdeSpec {
    pub method: OdeMethod,
    /// Fixed step for RK4; initial step for RKF45.
    pub step: f64,
    /// Adaptive error budget, applied per step as err ≤ |h|·abs_tol·scale
    /// with scale = max(1, |y|), plus a roundoff allowance of a few ulps
    /// so very small steps remain acceptable.
    pub abs_tol: f64,
}

impl Default for OdeSpec {
    fn default() -> Self {
        OdeSpec {
            method: OdeMethod::Rk45Adaptive,
            step: 1e-3,
            abs_tol: 1e-8,
        }
    }
}

impl OdeSpec {
    pub fn rk4(step: f64) -> Self {
        OdeSpec {
            method: OdeMethod::Rk4Fixed,
            step,
            abs_tol: 1e-8,
        }
    }

    pub fn rk45(abs_tol: f64) -> Self {
        OdeSpec {
            method: OdeMethod::Rk45Adaptive,
            step: 1e-3,
            abs_tol,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.step > 0.0) || !(self.abs_tol > 0.0) {
            return Err(Error::domain("ode spec requires positive step and abs_tol"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OdeOutcome {
    Completed,
    /// The stop predicate fired; integration ends at the recorded time.
    Stopped { t: f64 },
    /// The adaptive controller underflowed its step near the recorded time.
    StepUnderflow { t: f64 },
}

#[derive(Clone, Debug)]
pub struct OdeSolution {
    pub times: Vec<f64>,
    pub states: Vec<[f64; 2]>,
    pub outcome: OdeOutcome,
}

impl OdeSolution {
    pub fn last_state(&self) -> [f64; 2] {
        *self.states.last().expect("solution has at least one sample")
    }
}

fn rk4_step<F>(rhs: &F, t: f64, y: [f64; 2], h: f64) -> [f64; 2]
where
    F: Fn(f64, [f64; 2]) -> [f64; 2],
{
    let k1 = rhs(t, y);
    let k2 = rhs(t + 0.5 * h, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
    let k3 = rhs(t + 0.5 * h, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
    let k4 = rhs(t + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
    [
        y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ]
}

// Fehlberg 4(5) tableau.
const A2: f64 = 0.25;
const A3: [f64; 2] = [3.0 / 32.0, 9.0 / 32.0];
const A4: [f64; 3] = [1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0];
const A5: [f64; 4] = [439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0];
const A6: [f64; 5] = [
    -8.0 / 27.0,
    2.0,
    -3544.0 / 2565.0,
    1859.0 / 4104.0,
    -11.0 / 40.0,
];
const C: [f64; 6] = [0.0, 0.25, 0.375, 12.0 / 13.0, 1.0, 0.5];
const B5: [f64; 6] = [
    16.0 / 135.0,
    0.0,
    6656.0 / 12825.0,
    28561.0 / 56430.0,
    -9.0 / 50.0,
    2.0 / 55.0,
];
const B4: [f64; 6] = [
    25.0 / 216.0,
    0.0,
    1408.0 / 2565.0,
    2197.0 / 4104.0,
    -0.2,
    0.0,
];

/// One RKF45 stage evaluation: returns (5th-order state, error estimate).
fn rkf45_step<F>(rhs: &F, t: f64, y: [f64; 2], h: f64) -> ([f64; 2], f64)
where
    F: Fn(f64, [f64; 2]) -> [f64; 2],
{
    let add = |y: [f64; 2], terms: &[(f64, [f64; 2])]| -> [f64; 2] {
        let mut out = y;
        for (c, k) in terms {
            out[0] += h * c * k[0];
            out[1] += h * c * k[1];
        }
        out
    };
    let k1 = rhs(t, y);
    let k2 = rhs(t + C[1] * h, add(y, &[(A2, k1)]));
    let k3 = rhs(t + C[2] * h, add(y, &[(A3[0], k1), (A3[1], k2)]));
    let k4 = rhs(
        t + C[3] * h,
        add(y, &[(A4[0], k1), (A4[1], k2), (A4[2], k3)]),
    );
    let k5 = rhs(
        t + C[4] * h,
        add(y, &[(A5[0], k1), (A5[1], k2), (A5[2], k3), (A5[3], k4)]),
    );
    let k6 = rhs(
        t + C[5] * h,
        add(
            y,
            &[
                (A6[0], k1),
                (A6[1], k2),
                (A6[2], k3),
                (A6[3], k4),
                (A6[4], k5),
            ],
        ),
    );
    let ks = [k1, k2, k3, k4, k5, k6];
    let mut y5 = y;
    let mut y4 = y;
    for i in 0..6 {
        y5[0] += h * B5[i] * ks[i][0];
        y5[1] += h * B5[i] * ks[i][1];
        y4[0] += h * B4[i] * ks[i][0];
        y4[1] += h * B4[i] * ks[i][1];
    }
    let err = ((y5[0] - y4[0]).powi(2) + (y5[1] - y4[1]).powi(2)).sqrt();
    (y5, err)
}

enum StepResult {
    Accepted { t: f64, y: [f64; 2] },
    Underflow,
}

/// Take one accepted adaptive step from t toward t_target (clipped so it
/// never overshoots), updating the proposed step size in place.
fn rkf45_one<F>(rhs: &F, t: f64, y: [f64; 2], t_target: f64, h: &mut f64, tol: f64) -> StepResult
where
    F: Fn(f64, [f64; 2]) -> [f64; 2],
{
    let dir = (t_target - t).signum();
    let h_min = 1e-14 * t.abs().max(t_target.abs()).max(1.0);
    let clipped = h.abs() >= (t_target - t).abs();
    let mut step = h.abs().min((t_target - t).abs()) * dir;
    let mut rejected = false;
    loop {
        let (y_new, err) = rkf45_step(rhs, t, y, step);
        let scale = y[0].abs().max(y[1].abs()).max(1.0);
        // the trailing term is a roundoff allowance: below it the 4th/5th
        // order difference is floating-point noise, not truncation error
        let budget = tol * step.abs() * scale + 16.0 * f64::EPSILON * scale;
        if err <= budget && err.is_finite() {
            let grow = if err == 0.0 {
                4.0
            } else {
                (0.9 * (budget / err).powf(0.2)).clamp(1.0, 4.0)
            };
            // a step clipped to land on the target says nothing about the
            // controller's natural size, so leave its memory alone then
            if rejected || !clipped {
                *h = (step.abs() * grow).max(h_min);
            }
            return StepResult::Accepted {
                t: t + step,
                y: y_new,
            };
        }
        rejected = true;
        if step.abs() <= h_min {
            return StepResult::Underflow;
        }
        let shrink = if err.is_finite() {
            (0.9 * (budget / err).powf(0.2)).clamp(0.1, 0.9)
        } else {
            0.1
        };
        step *= shrink;
        if step.abs() < h_min {
            step = h_min * dir;
        }
    }
}

/// Integrate `rhs` over `t_span`, sampling at the cadence `spec.step`.
/// Adaptive step underflow is an error here; use [`ode_solve_sampled`] when
/// an early stop is expected behavior.
pub fn ode_solve<F>(rhs: F, y0: [f64; 2], t_span: (f64, f64), spec: &OdeSpec) -> Result<OdeSolution>
where
    F: Fn(f64, [f64; 2]) -> [f64; 2],
{
    let sol = ode_solve_sampled(rhs, y0, t_span, spec.step, spec, |_, _| false)?;
    if let OdeOutcome::StepUnderflow { t } = sol.outcome {
        return Err(Error::StepFailure { t });
    }
    Ok(sol)
}

/// Integrate with output samples on the uniform cadence `out_step`, halting
/// early when `stop(t, y)` turns true after an accepted internal step. The
/// sample list always starts at t0 and is monotone in time; an early halt
/// appends the halting state as the final sample.
pub fn ode_solve_sampled<F, S>(
    rhs: F,
    y0: [f64; 2],
    t_span: (f64, f64),
    out_step: f64,
    spec: &OdeSpec,
    stop: S,
) -> Result<OdeSolution>
where
    F: Fn(f64, [f64; 2]) -> [f64; 2],
    S: Fn(f64, [f64; 2]) -> bool,
{
    spec.validate()?;
    if !(out_step > 0.0) {
        return Err(Error::domain("output cadence must be positive"));
    }
    let (t0, t1) = t_span;
    if !t0.is_finite() || !t1.is_finite() {
        return Err(Error::domain("time span must be finite"));
    }
    let mut times = vec![t0];
    let mut states = vec![y0];
    if t0 == t1 {
        return Ok(OdeSolution {
            times,
            states,
            outcome: OdeOutcome::Completed,
        });
    }

    let dir = (t1 - t0).signum();
    let n_out = ((t1 - t0).abs() / out_step).ceil().max(1.0) as usize;
    let mut h = spec.step;
    let mut t = t0;
    let mut y = y0;

    for k in 1..=n_out {
        let target = if k == n_out {
            t1
        } else {
            t0 + dir * k as f64 * out_step
        };
        // advance internally to `target`, checking the stop predicate after
        // every accepted step
        while (target - t) * dir > 0.0 {
            // snap across rounding residue left by a step clipped to land
            // exactly on the previous target
            if (target - t).abs() <= 1e-13 * target.abs().max(1.0) {
                break;
            }
            let (tn, yn) = match spec.method {
                OdeMethod::Rk4Fixed => {
                    let step = spec.step.min((target - t).abs()) * dir;
                    (t + step, rk4_step(&rhs, t, y, step))
                }
                OdeMethod::Rk45Adaptive => {
                    match rkf45_one(&rhs, t, y, target, &mut h, spec.abs_tol) {
                        StepResult::Accepted { t, y } => (t, y),
                        StepResult::Underflow => {
                            // keep the last accepted state as a final sample
                            if times.last() != Some(&t) {
                                times.push(t);
                                states.push(y);
                            }
                            return Ok(OdeSolution {
                                times,
                                states,
                                outcome: OdeOutcome::StepUnderflow { t },
                            });
                        }
                    }
                }
            };
            t = tn;
            y = yn;
            if stop(t, y) {
                times.push(t);
                states.push(y);
                return Ok(OdeSolution {
                    times,
                    states,
                    outcome: OdeOutcome::Stopped { t },
                });
            }
        }
        t = target;
        times.push(t);
        states.push(y);
    }
    Ok(OdeSolution {
        times,
        states,
        outcome: OdeOutcome::Completed,
    })
}
