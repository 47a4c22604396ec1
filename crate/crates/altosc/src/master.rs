//! The second-order equation ∂²H′/∂p′² = H′ at fixed x: numerical solution
//! from first-principles initial data, comparison against the closed form
//! √(2V)·cosh p′, and residual checks of the general equation it descends
//! from.

use crate::classical::{lagrangian_prime, Potential};
use crate::error::{Error, Result};
use crate::numerics::ode::{ode_solve_sampled, OdeSpec};

/// The equation is an ODE in p′ at a fixed position; `grid` counts samples
/// per side, so a solution carries 2·grid + 1 points on [−p_max, p_max].
#[derive(Clone, Debug)]
pub struct MasterProblem {
    pub potential: Potential,
    pub x: f64,
    pub p_max: f64,
    pub grid: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct MasterSample {
    pub p: f64,
    pub h: f64,
    pub dh: f64,
}

#[derive(Clone, Debug)]
pub struct MasterSolution {
    /// Samples in ascending p over [−p_max, p_max].
    pub samples: Vec<MasterSample>,
    /// sinh coefficient matched at p′ = 0 (the odd part of the solution).
    pub alpha_coeff: f64,
    /// cosh coefficient matched at p′ = 0.
    pub beta_coeff: f64,
}

impl MasterSolution {
    /// CSV with columns p, h, dh, closed_form, abs_error, comparing each
    /// sample against √(2V(x))·cosh p′ for the problem's potential.
    pub fn to_csv(&self, problem: &MasterProblem) -> Result<String> {
        let mut out = String::from("p,h,dh,closed_form,abs_error\n");
        for s in &self.samples {
            let reference = closed_form_hprime(&problem.potential, problem.x, s.p)?;
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                s.p,
                s.h,
                s.dh,
                reference,
                (s.h - reference).abs()
            ));
        }
        Ok(out)
    }

    /// Largest |H′(p) − (α sinh p + β cosh p)| over the samples.
    pub fn fit_defect(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| {
                (s.h - self.alpha_coeff * s.p.sinh() - self.beta_coeff * s.p.cosh()).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// √(2V(x))·cosh p′.
pub fn closed_form_hprime(potential: &Potential, x: f64, p: f64) -> Result<f64> {
    let v = potential.value(x);
    if v < 0.0 {
        return Err(Error::domain(format!(
            "closed form needs V ≥ 0, got {v:.6e} at x = {x:.6e}"
        )));
    }
    Ok((2.0 * v).sqrt() * p.cosh())
}

/// Integrates H″ = H from the initial data H(0) = √(2V(x)), H′(0) = 0 to
/// both ends of [−p_max, p_max] and matches the two-parameter family
/// α sinh + β cosh at p′ = 0.
pub fn solve_master(problem: &MasterProblem, spec: &OdeSpec) -> Result<MasterSolution> {
    let v = problem.potential.value(problem.x);
    if v <= 0.0 {
        return Err(Error::domain(format!(
            "initial data needs V(x) > 0, got {v:.6e} at x = {:.6e}",
            problem.x
        )));
    }
    if !(problem.p_max > 0.0) || problem.grid == 0 {
        return Err(Error::domain("p_max and grid must be positive"));
    }
    let y0 = [(2.0 * v).sqrt(), 0.0];
    let rhs = |_p: f64, y: [f64; 2]| -> [f64; 2] { [y[1], y[0]] };
    let out_step = problem.p_max / problem.grid as f64;
    let never = |_: f64, _: [f64; 2]| false;
    let forward = ode_solve_sampled(rhs, y0, (0.0, problem.p_max), out_step, spec, never)?;
    let backward = ode_solve_sampled(rhs, y0, (0.0, -problem.p_max), out_step, spec, never)?;

    let mut samples = Vec::with_capacity(2 * problem.grid + 1);
    for (t, y) in backward.times.iter().zip(&backward.states).skip(1).rev() {
        samples.push(MasterSample {
            p: *t,
            h: y[0],
            dh: y[1],
        });
    }
    for (t, y) in forward.times.iter().zip(&forward.states) {
        samples.push(MasterSample {
            p: *t,
            h: y[0],
            dh: y[1],
        });
    }
    let center = samples[problem.grid];
    Ok(MasterSolution {
        samples,
        alpha_coeff: center.dh,
        beta_coeff: center.h,
    })
}

const STENCIL: [f64; 9] = [
    -1.0 / 560.0,
    8.0 / 315.0,
    -0.2,
    1.6,
    -205.0 / 72.0,
    1.6,
    -0.2,
    8.0 / 315.0,
    -1.0 / 560.0,
];

/// Residual of the general equation ∂²H′/∂p′² · dΣ/dH · ∂²L/∂ẋ² = H′·(…),
/// specialized to unit kinetic mass: returns
/// max |(∂²H′/∂p′²)·g(H′) − 1| over the interior samples, where `g` is
/// dΣ/dH expressed through H′. For Σ = √(2H) one has g(h) = 1/h, making
/// the residual |∂²H′/∂p′² − H′| / H′.
pub fn master_residual_general(
    samples: &[MasterSample],
    dsigma_dh_of_hprime: impl Fn(f64) -> f64,
) -> Result<f64> {
    if samples.len() < STENCIL.len() {
        return Err(Error::domain(format!(
            "need at least {} uniform samples, got {}",
            STENCIL.len(),
            samples.len()
        )));
    }
    let h = samples[1].p - samples[0].p;
    if !(h > 0.0) {
        return Err(Error::domain("samples must be strictly ascending in p"));
    }
    for w in samples.windows(2) {
        let d = w[1].p - w[0].p;
        if (d - h).abs() > 1e-9 * h {
            return Err(Error::domain(
                "residual stencil requires a uniform p grid",
            ));
        }
    }
    for (index, s) in samples.iter().enumerate() {
        if s.h.abs() < 1e-12 {
            return Err(Error::DivisionNearZero {
                index,
                value: s.h,
            });
        }
    }
    let half = STENCIL.len() / 2;
    let mut worst = 0.0f64;
    for i in half..samples.len() - half {
        let mut second = 0.0;
        for (k, c) in STENCIL.iter().enumerate() {
            second += c * samples[i + k - half].h;
        }
        second /= h * h;
        worst = worst.max((second * dsigma_dh_of_hprime(samples[i].h) - 1.0).abs());
    }
    Ok(worst)
}

/// Euler–Lagrange residuals of the two Lagrangians along a sampled path,
/// and the ratio test between them where the path is off-shell.
#[derive(Clone, Copy, Debug)]
pub struct ElReport {
    /// max |d/dt(∂L′/∂ẋ) − ∂L′/∂x| over interior samples.
    pub max_el_prime: f64,
    /// max |ẍ + V′(x)| over interior samples.
    pub max_el: f64,
    /// max |EL′ / (EL · 1/√(2H)) − 1| over samples with |EL| above the
    /// off-shell threshold; 0 when no sample qualifies.
    pub max_ratio_deviation: f64,
    pub n_ratio_samples: usize,
}

const OFF_SHELL_THRESHOLD: f64 = 1e-3;

/// Evaluates both Euler–Lagrange expressions by finite differences on a
/// uniformly sampled path and compares their ratio to 1/√(2H).
pub fn euler_lagrange_proportionality(
    potential: &Potential,
    times: &[f64],
    xs: &[f64],
) -> Result<ElReport> {
    if times.len() != xs.len() || times.len() < 5 {
        return Err(Error::domain(
            "need matching time/position samples, at least five",
        ));
    }
    let dt = times[1] - times[0];
    if !(dt > 0.0) {
        return Err(Error::domain("times must be strictly increasing"));
    }
    for w in times.windows(2) {
        if ((w[1] - w[0]) - dt).abs() > 1e-9 * dt {
            return Err(Error::domain("finite differences require uniform dt"));
        }
    }
    let n = times.len();
    // conjugate momentum of the square-root Lagrangian at interior samples
    let mut momenta = vec![0.0; n];
    let mut xdots = vec![0.0; n];
    for i in 1..n - 1 {
        let xdot = (xs[i + 1] - xs[i - 1]) / (2.0 * dt);
        xdots[i] = xdot;
        momenta[i] = lagrangian_prime(potential, xs[i], xdot)?.momentum;
    }
    let delta = 1e-5;
    let mut max_el_prime = 0.0f64;
    let mut max_el = 0.0f64;
    let mut max_ratio_deviation = 0.0f64;
    let mut n_ratio_samples = 0usize;
    for i in 2..n - 2 {
        let xdot = xdots[i];
        let xddot = (xs[i + 1] - 2.0 * xs[i] + xs[i - 1]) / (dt * dt);
        let el = xddot + potential.gradient(xs[i]);
        let dp_dt = (momenta[i + 1] - momenta[i - 1]) / (2.0 * dt);
        let dl_dx = (lagrangian_prime(potential, xs[i] + delta, xdot)?.value
            - lagrangian_prime(potential, xs[i] - delta, xdot)?.value)
            / (2.0 * delta);
        let el_prime = dp_dt - dl_dx;
        max_el_prime = max_el_prime.max(el_prime.abs());
        max_el = max_el.max(el.abs());
        if el.abs() > OFF_SHELL_THRESHOLD {
            let energy = 0.5 * xdot * xdot + potential.value(xs[i]);
            let factor = 1.0 / (2.0 * energy).sqrt();
            max_ratio_deviation = max_ratio_deviation.max((el_prime / (el * factor) - 1.0).abs());
            n_ratio_samples += 1;
        }
    }
    Ok(ElReport {
        max_el_prime,
        max_el,
        max_ratio_deviation,
        n_ratio_samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::HamiltonianModel;

    fn oscillator_problem(x: f64) -> MasterProblem {
        MasterProblem {
            potential: Potential::oscillator(),
            x,
            p_max: 5.0,
            grid: 250,
        }
    }

    #[test]
    fn closed_form_examples() {
        let v = Potential::oscillator();
        assert_eq!(closed_form_hprime(&v, 1.0, 0.0).unwrap(), 1.0);
        assert_eq!(closed_form_hprime(&v, 0.0, 3.0).unwrap(), 0.0);
        let got = closed_form_hprime(&v, 2.0, 1.0).unwrap();
        assert!((got - 2.0 * 1.0f64.cosh()).abs() < 1e-15);

        let tilted = Potential::new(|x| x, |_| 1.0);
        assert!(matches!(
            closed_form_hprime(&tilted, -1.0, 0.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn solution_matches_cosh_at_unit_position() {
        let sol = solve_master(&oscillator_problem(1.0), &OdeSpec::rk45(1e-10)).unwrap();
        let worst = sol
            .samples
            .iter()
            .map(|s| (s.h - s.p.cosh()).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-8, "sup deviation {worst:.3e}");
        assert_eq!(sol.alpha_coeff, 0.0);
        assert_eq!(sol.beta_coeff, 1.0);
    }

    #[test]
    fn shifted_potential_solution_at_origin() {
        let problem = MasterProblem {
            potential: Potential::oscillator_shifted(1.0),
            x: 0.0,
            p_max: 5.0,
            grid: 250,
        };
        let sol = solve_master(&problem, &OdeSpec::rk45(1e-10)).unwrap();
        let worst = sol
            .samples
            .iter()
            .map(|s| (s.h - 2.0f64.sqrt() * s.p.cosh()).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-8, "sup deviation {worst:.3e}");
    }

    #[test]
    fn initial_datum_is_exact_and_grid_is_complete() {
        let problem = oscillator_problem(2.0);
        let sol = solve_master(&problem, &OdeSpec::default()).unwrap();
        assert_eq!(sol.samples.len(), 2 * problem.grid + 1);
        let center = sol.samples[problem.grid];
        assert_eq!(center.p, 0.0);
        assert_eq!(center.h, 2.0);
        assert_eq!(center.dh, 0.0);
        for w in sol.samples.windows(2) {
            assert!(w[1].p > w[0].p);
        }
    }

    #[test]
    fn beta_tracks_sqrt_two_v_across_positions() {
        for &x in &[0.5, 1.0, 2.0, 3.5] {
            let sol = solve_master(&oscillator_problem(x), &OdeSpec::default()).unwrap();
            assert!((sol.beta_coeff - x).abs() < 1e-8);
            assert!(sol.alpha_coeff.abs() < 1e-10);
        }
    }

    #[test]
    fn fit_reproduces_solution_globally() {
        let sol = solve_master(&oscillator_problem(1.5), &OdeSpec::rk45(1e-10)).unwrap();
        assert!(sol.fit_defect() < 1e-8, "fit defect {:.3e}", sol.fit_defect());
    }

    #[test]
    fn degenerate_problems_are_rejected() {
        let bad = MasterProblem {
            potential: Potential::oscillator(),
            x: 0.0,
            p_max: 5.0,
            grid: 10,
        };
        assert!(matches!(
            solve_master(&bad, &OdeSpec::default()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn residual_of_closed_form_samples() {
        let v = Potential::oscillator();
        let n = 501usize;
        let h = 0.02;
        let samples: Vec<MasterSample> = (0..n)
            .map(|i| {
                let p = -5.0 + i as f64 * h;
                MasterSample {
                    p,
                    h: closed_form_hprime(&v, 1.0, p).unwrap(),
                    dh: p.sinh(),
                }
            })
            .collect();
        let r = master_residual_general(&samples, |h| 1.0 / h).unwrap();
        assert!(r < 1e-10, "closed-form residual {r:.3e}");
    }

    #[test]
    fn constant_samples_fail_with_unit_residual() {
        let samples: Vec<MasterSample> = (0..101)
            .map(|i| MasterSample {
                p: i as f64 * 0.05,
                h: 2.0,
                dh: 0.0,
            })
            .collect();
        let r = master_residual_general(&samples, |h| 1.0 / h).unwrap();
        assert!((r - 1.0).abs() < 1e-10, "constant residual {r}");
    }

    #[test]
    fn residual_of_numerical_solution() {
        let sol = solve_master(&oscillator_problem(1.0), &OdeSpec::rk45(1e-8)).unwrap();
        let r = master_residual_general(&sol.samples, |h| 1.0 / h).unwrap();
        assert!(r < 1e-6, "numerical residual {r:.3e}");
    }

    #[test]
    fn near_zero_values_are_flagged() {
        let mut samples: Vec<MasterSample> = (0..20)
            .map(|i| MasterSample {
                p: i as f64 * 0.1,
                h: 1.0,
                dh: 0.0,
            })
            .collect();
        samples[7].h = 1e-13;
        match master_residual_general(&samples, |h| 1.0 / h) {
            Err(Error::DivisionNearZero { index, .. }) => assert_eq!(index, 7),
            other => panic!("expected near-zero flag, got {other:?}"),
        }
    }

    #[test]
    fn residual_grid_validation() {
        let few: Vec<MasterSample> = (0..5)
            .map(|i| MasterSample {
                p: i as f64,
                h: 1.0,
                dh: 0.0,
            })
            .collect();
        assert!(matches!(
            master_residual_general(&few, |h| 1.0 / h),
            Err(Error::Domain(_))
        ));

        let mut uneven: Vec<MasterSample> = (0..20)
            .map(|i| MasterSample {
                p: i as f64 * 0.1,
                h: 1.0,
                dh: 0.0,
            })
            .collect();
        uneven[10].p += 0.03;
        assert!(matches!(
            master_residual_general(&uneven, |h| 1.0 / h),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn true_trajectory_annihilates_both_lagrangians() {
        let model = HamiltonianModel::alternative(Potential::oscillator());
        let spec = OdeSpec::rk45(1e-12);
        let traj = model.integrate_flow(1.0, 0.0, (0.0, 1.4), &spec).unwrap();
        let times: Vec<f64> = traj.samples.iter().map(|s| s.t).collect();
        let xs: Vec<f64> = traj.samples.iter().map(|s| s.x).collect();
        let report =
            euler_lagrange_proportionality(&Potential::oscillator(), &times, &xs).unwrap();
        assert!(report.max_el_prime < 1e-4, "{:.3e}", report.max_el_prime);
        assert!(report.max_el < 1e-4, "{:.3e}", report.max_el);
    }

    #[test]
    fn perturbed_path_shows_the_proportionality_factor() {
        let dt = 1e-3;
        let n = 1401usize;
        let times: Vec<f64> = (0..n).map(|i| i as f64 * dt).collect();
        let xs: Vec<f64> = times.iter().map(|t| t.cos() + 0.01 * t * t).collect();
        let report =
            euler_lagrange_proportionality(&Potential::oscillator(), &times, &xs).unwrap();
        assert!(report.n_ratio_samples > 0);
        assert!(
            report.max_ratio_deviation < 0.05,
            "ratio deviation {:.3e}",
            report.max_ratio_deviation
        );
    }

    #[test]
    fn csv_export_layout() {
        let problem = oscillator_problem(1.0);
        let sol = solve_master(&problem, &OdeSpec::default()).unwrap();
        let csv = sol.to_csv(&problem).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "p,h,dh,closed_form,abs_error");
        assert_eq!(lines.count(), sol.samples.len());
    }
}
