//! Classical dynamics of two models that share trajectories: the usual
//! kinetic-plus-potential Hamiltonian and its square-root partner
//! H′ = √(2V(x))·cosh p′, whose flow reproduces the same x(t) on the domain
//! where both are defined.

use std::sync::Arc;

use serde_json::json;

use crate::error::{Error, Result};
use crate::numerics::ode::{ode_solve_sampled, OdeOutcome, OdeSpec};

/// Positions where √(2V) falls at or below this level count as the strip
/// boundary; integration of the alternative model stops there.
pub const EPS_STRIP: f64 = 1e-8;

/// A one-dimensional potential with an analytic derivative and an optional
/// nonnegative constant shift used to keep V ≥ 0 on a larger domain.
#[derive(Clone)]
pub struct Potential {
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    deriv: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    lower_shift: f64,
}

impl std::fmt::Debug for Potential {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Potential")
            .field("lower_shift", &self.lower_shift)
            .finish_non_exhaustive()
    }
}

impl Potential {
    pub fn new(
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        deriv: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Potential {
            eval: Arc::new(eval),
            deriv: Arc::new(deriv),
            lower_shift: 0.0,
        }
    }

    /// Same potential raised by a constant a ≥ 0.
    pub fn with_lower_shift(mut self, a: f64) -> Self {
        assert!(a >= 0.0 && a.is_finite(), "lower shift must be nonnegative");
        self.lower_shift = a;
        self
    }

    /// V(x) = x²/2.
    pub fn oscillator() -> Self {
        Potential::new(|x| 0.5 * x * x, |x| x)
    }

    /// V(x) = x²/2 + a.
    pub fn oscillator_shifted(a: f64) -> Self {
        Potential::oscillator().with_lower_shift(a)
    }

    pub fn value(&self, x: f64) -> f64 {
        (self.eval)(x) + self.lower_shift
    }

    pub fn gradient(&self, x: f64) -> f64 {
        (self.deriv)(x)
    }

    pub fn lower_shift(&self) -> f64 {
        self.lower_shift
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    /// H = p²/2 + V(x).
    Standard,
    /// H′ = ±√(2V(x))·cosh p′.
    Alternative,
}

/// Sign in front of √(2V)·cosh p′. `Minus` exists for completeness and is
/// only smoke-tested; everything downstream assumes `Plus`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignBranch {
    Plus,
    Minus,
}

#[derive(Clone, Debug)]
pub struct HamiltonianModel {
    pub kind: ModelKind,
    pub branch: SignBranch,
    pub potential: Potential,
}

impl HamiltonianModel {
    pub fn standard(potential: Potential) -> Self {
        HamiltonianModel {
            kind: ModelKind::Standard,
            branch: SignBranch::Plus,
            potential,
        }
    }

    pub fn alternative(potential: Potential) -> Self {
        HamiltonianModel {
            kind: ModelKind::Alternative,
            branch: SignBranch::Plus,
            potential,
        }
    }

    pub fn alternative_with_branch(potential: Potential, branch: SignBranch) -> Self {
        HamiltonianModel {
            kind: ModelKind::Alternative,
            branch,
            potential,
        }
    }

    fn branch_sign(&self) -> f64 {
        match self.branch {
            SignBranch::Plus => 1.0,
            SignBranch::Minus => -1.0,
        }
    }

    /// The model's energy at a phase point.
    pub fn eval_hamiltonian(&self, x: f64, momentum: f64) -> Result<f64> {
        match self.kind {
            ModelKind::Standard => Ok(0.5 * momentum * momentum + self.potential.value(x)),
            ModelKind::Alternative => {
                let v = self.potential.value(x);
                if v < 0.0 {
                    return Err(Error::domain(format!(
                        "negative potential {v:.6e} at x = {x:.6e} outside the model's domain"
                    )));
                }
                Ok(self.branch_sign() * (2.0 * v).sqrt() * momentum.cosh())
            }
        }
    }

    /// (dx/dt, dmomentum/dt) at a phase point.
    pub fn hamilton_rhs(&self, x: f64, momentum: f64) -> Result<[f64; 2]> {
        match self.kind {
            ModelKind::Standard => Ok([momentum, -self.potential.gradient(x)]),
            ModelKind::Alternative => {
                let v = self.potential.value(x);
                if v < 0.0 {
                    return Err(Error::domain(format!(
                        "negative potential {v:.6e} at x = {x:.6e} outside the model's domain"
                    )));
                }
                let beta = (2.0 * v).sqrt();
                if beta <= EPS_STRIP {
                    return Err(Error::domain(format!(
                        "vector field degenerates at x = {x:.6e}: sqrt(2V) = {beta:.3e}"
                    )));
                }
                let s = self.branch_sign();
                Ok([
                    s * beta * momentum.sinh(),
                    -s * self.potential.gradient(x) * momentum.cosh() / beta,
                ])
            }
        }
    }

    /// Integrates the model's flow, emitting a sample every `spec.step`
    /// units of time. The alternative model stops cleanly at the strip
    /// boundary √(2V) ≤ EPS_STRIP instead of erroring.
    pub fn integrate_flow(
        &self,
        x0: f64,
        momentum0: f64,
        t_span: (f64, f64),
        spec: &OdeSpec,
    ) -> Result<PhaseTrajectory> {
        let b = self.eval_hamiltonian(x0, momentum0)?;
        let alternative = self.kind == ModelKind::Alternative;
        let model = self.clone();
        let rhs = move |_t: f64, y: [f64; 2]| -> [f64; 2] {
            let [x, p] = y;
            match model.kind {
                ModelKind::Standard => [p, -model.potential.gradient(x)],
                ModelKind::Alternative => {
                    // clamp so a trial step that pokes past the strip edge
                    // stays finite; the stop predicate ends the run there
                    let beta = (2.0 * model.potential.value(x)).max(f64::MIN_POSITIVE).sqrt();
                    let s = model.branch_sign();
                    [
                        s * beta * p.sinh(),
                        -s * model.potential.gradient(x) * p.cosh() / beta,
                    ]
                }
            }
        };
        let potential = self.potential.clone();
        let stop = move |_t: f64, y: [f64; 2]| -> bool {
            alternative && 2.0 * potential.value(y[0]) <= EPS_STRIP * EPS_STRIP
        };
        let sol = ode_solve_sampled(rhs, [x0, momentum0], t_span, spec.step, spec, stop)?;
        let termination = match sol.outcome {
            OdeOutcome::Completed => Termination::Completed,
            OdeOutcome::Stopped { t } => Termination::SingularityStop { last_t: t },
            OdeOutcome::StepUnderflow { t } => {
                if alternative {
                    // the controller underflows only while squeezing into the
                    // strip corner, so report it as the same clean stop
                    Termination::SingularityStop { last_t: t }
                } else {
                    return Err(Error::StepFailure { t });
                }
            }
        };
        let samples = sol
            .times
            .iter()
            .zip(&sol.states)
            .map(|(&t, &[x, momentum])| TrajectorySample {
                t,
                x,
                momentum,
                conserved: self.eval_hamiltonian(x, momentum).unwrap_or(f64::NAN),
            })
            .collect();
        Ok(PhaseTrajectory {
            samples,
            b,
            termination,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub x: f64,
    pub momentum: f64,
    /// The model's Hamiltonian at this sample.
    pub conserved: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Termination {
    Completed,
    /// The flow reached the strip boundary; `last_t` is the final valid time.
    SingularityStop { last_t: f64 },
}

#[derive(Clone, Debug)]
pub struct PhaseTrajectory {
    pub samples: Vec<TrajectorySample>,
    /// Initial conserved value (the trajectory level x·cosh p′ = b for the
    /// alternative oscillator).
    pub b: f64,
    pub termination: Termination,
}

impl PhaseTrajectory {
    /// Largest |conserved − b| over the samples, ignoring any samples that
    /// left the model's domain.
    pub fn conservation_drift(&self) -> f64 {
        self.samples
            .iter()
            .filter(|s| s.conserved.is_finite())
            .map(|s| (s.conserved - self.b).abs())
            .fold(0.0, f64::max)
    }

    /// CSV with the fixed column order t, x, momentum, conserved,
    /// residual_strip where residual_strip = conserved − b.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,x,momentum,conserved,residual_strip\n");
        for s in &self.samples {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                s.t,
                s.x,
                s.momentum,
                s.conserved,
                s.conserved - self.b
            ));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let termination = match self.termination {
            Termination::Completed => json!({"kind": "completed"}),
            Termination::SingularityStop { last_t } => {
                json!({"kind": "singularity_stop", "last_t": last_t})
            }
        };
        json!({
            "b": self.b,
            "termination": termination,
            "samples": self
                .samples
                .iter()
                .map(|s| json!({
                    "t": s.t,
                    "x": s.x,
                    "momentum": s.momentum,
                    "conserved": s.conserved,
                }))
                .collect::<Vec<_>>(),
        })
    }
}

/// L′(x, ẋ) = ẋ·arcsinh(ẋ/√(2V)) − √(ẋ² + 2V) together with the conjugate
/// momentum and the Legendre combination ẋ·p′ − L′.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LagrangianPrime {
    pub value: f64,
    pub momentum: f64,
    pub legendre: f64,
}

pub fn lagrangian_prime(potential: &Potential, x: f64, xdot: f64) -> Result<LagrangianPrime> {
    let two_v = 2.0 * potential.value(x);
    if two_v <= 0.0 {
        return Err(Error::domain(format!(
            "lagrangian needs V > 0, got V = {:.6e} at x = {x:.6e}",
            0.5 * two_v
        )));
    }
    let momentum = (xdot / two_v.sqrt()).asinh();
    let value = xdot * momentum - (xdot * xdot + two_v).sqrt();
    Ok(LagrangianPrime {
        value,
        momentum,
        legendre: xdot * momentum - value,
    })
}

/// Integrates both models from matched initial data and compares them
/// sample by sample.
#[derive(Clone, Debug)]
pub struct SEquivalenceReport {
    pub times: Vec<f64>,
    pub x_standard: Vec<f64>,
    pub x_alternative: Vec<f64>,
    /// max |x_std(t) − x_alt(t)| over the common window.
    pub max_x_deviation: f64,
    pub standard_conservation_drift: f64,
    pub alternative_conservation_drift: f64,
    /// max |H′ − √(2H)| over the common window.
    pub max_sigma_gap: f64,
    /// Time window on which both trajectories exist.
    pub window: (f64, f64),
}

pub fn s_equivalence_report(
    potential: &Potential,
    x0: f64,
    v0: f64,
    t_span: (f64, f64),
    spec: &OdeSpec,
) -> Result<SEquivalenceReport> {
    let v_at_start = potential.value(x0);
    if v_at_start <= 0.0 {
        return Err(Error::domain(format!(
            "matched initial data needs V(x0) > 0, got {v_at_start:.6e}"
        )));
    }
    let momentum0 = (v0 / (2.0 * v_at_start).sqrt()).asinh();
    let standard = HamiltonianModel::standard(potential.clone());
    let alternative = HamiltonianModel::alternative(potential.clone());
    let std_traj = standard.integrate_flow(x0, v0, t_span, spec)?;
    let alt_traj = alternative.integrate_flow(x0, momentum0, t_span, spec)?;
    let n = std_traj.samples.len().min(alt_traj.samples.len());
    let mut times = Vec::with_capacity(n);
    let mut x_standard = Vec::with_capacity(n);
    let mut x_alternative = Vec::with_capacity(n);
    let mut max_x_deviation = 0.0f64;
    let mut max_sigma_gap = 0.0f64;
    for i in 0..n {
        let s = &std_traj.samples[i];
        let a = &alt_traj.samples[i];
        times.push(s.t);
        x_standard.push(s.x);
        x_alternative.push(a.x);
        max_x_deviation = max_x_deviation.max((s.x - a.x).abs());
        max_sigma_gap = max_sigma_gap.max((a.conserved - (2.0 * s.conserved).sqrt()).abs());
    }
    let window = (
        times.first().copied().unwrap_or(t_span.0),
        times.last().copied().unwrap_or(t_span.0),
    );
    Ok(SEquivalenceReport {
        times,
        x_standard,
        x_alternative,
        max_x_deviation,
        standard_conservation_drift: std_traj.conservation_drift(),
        alternative_conservation_drift: alt_traj.conservation_drift(),
        max_sigma_gap,
        window,
    })
}

/// Probes whether p′ − p could be a function of x alone. A positive
/// momentum spread at fixed x rules out p′ = p + f(x).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentumRelationReport {
    /// max over x of (max − min over p) of p′ − p.
    pub spread_over_momentum: f64,
    /// max over p of (max − min over x) of p′ − p.
    pub spread_over_position: f64,
}

pub fn momentum_relation_check(
    potential: &Potential,
    xs: &[f64],
    ps: &[f64],
) -> Result<MomentumRelationReport> {
    let prime = |x: f64, p: f64| -> Result<f64> {
        let two_v = 2.0 * potential.value(x);
        if two_v <= 0.0 {
            return Err(Error::domain(format!(
                "momentum map needs V > 0, got V = {:.6e} at x = {x:.6e}",
                0.5 * two_v
            )));
        }
        Ok((p / two_v.sqrt()).asinh())
    };
    let mut spread_over_momentum = 0.0f64;
    for &x in xs {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &p in ps {
            let d = prime(x, p)? - p;
            lo = lo.min(d);
            hi = hi.max(d);
        }
        if ps.len() > 1 {
            spread_over_momentum = spread_over_momentum.max(hi - lo);
        }
    }
    let mut spread_over_position = 0.0f64;
    for &p in ps {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &x in xs {
            let d = prime(x, p)? - p;
            lo = lo.min(d);
            hi = hi.max(d);
        }
        if xs.len() > 1 {
            spread_over_position = spread_over_position.max(hi - lo);
        }
    }
    Ok(MomentumRelationReport {
        spread_over_momentum,
        spread_over_position,
    })
}
