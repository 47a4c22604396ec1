//! The position-representation family Φ_λ, its generating function, the
//! numerical Fourier transform tying it to the momentum family Ψ_λ, the
//! nonlocal difference operator acting at the complex shifts x ± i, the
//! sech-weighted orthogonality integrals of the W_n polynomials, and the
//! shifted-solution counterexample separating the position-space difference
//! equation from the momentum-space eigenproblem.
//!
//! Closed forms use Φ_{1/2}(x) = 2e^{−πx/2}/(1 + e^{−2πx}) = e^{πx/2}/cosh(πx)
//! and Φ_{n+1/2}(x) = Φ_{1/2}(x)·W_n(x)/n!; negative half-integers come from
//! the reflection Φ_{−λ}(x) = Φ_λ(−x).

use std::f64::consts::{FRAC_PI_2, LN_2, PI, SQRT_2};

use num::complex::Complex64;
use serde_json::json;

use crate::error::{Error, Result};
use crate::exactpoly::{apply_h, w_poly};
use crate::exec;
use crate::numerics::dd::{horner_dd, Dd, DD_PI};
use crate::numerics::quadrature::{integrate_real_line, QuadratureSpec, Scheme};
use crate::spectral::{psi, psi_derivative};

const INV_SQRT_PI: f64 = 0.5641895835477563;

/// n! exactly in integer arithmetic (valid through 34!), rounded once to f64.
fn factorial_f64(n: u32) -> f64 {
    (1..=u128::from(n)).product::<u128>() as f64
}

/// Φ_{1/2}(x) = 2e^{−πx/2}/(1 + e^{−2πx}), evaluated on whichever side keeps
/// every exponent non-positive so large |x| underflows instead of overflowing.
pub fn phi_half(x: f64) -> f64 {
    if x >= 0.0 {
        2.0 * (-FRAC_PI_2 * x).exp() / (1.0 + (-2.0 * PI * x).exp())
    } else {
        2.0 * (1.5 * PI * x).exp() / (1.0 + (2.0 * PI * x).exp())
    }
}

/// Analytic continuation of [`phi_half`] (equal to e^{πz/2}/cosh(πz)), with
/// the same two-branch guard against overflow in the half-planes. Poles sit
/// at half-integer imaginary parts; integer-shifted arguments x ± i stay a
/// unit away from them.
pub fn phi_half_complex(z: Complex64) -> Complex64 {
    if z.re >= 0.0 {
        2.0 * (z * -FRAC_PI_2).exp() / (1.0 + (z * (-2.0 * PI)).exp())
    } else {
        2.0 * (z * (1.5 * PI)).exp() / (1.0 + (z * (2.0 * PI)).exp())
    }
}

/// Closed form for Φ_{n+1/2}: the W_n polynomial factor over n! against the
/// Φ_{1/2} profile, reflected for negative indices (n = −m−1 carries the
/// eigenvalue n + ½ = −(m + ½)).
pub fn phi_closed(n: i64, x: f64) -> f64 {
    if n >= 0 {
        phi_half(x) * w_poly(n as usize).eval_f64(x) / factorial_f64(n as u32)
    } else {
        let m = (-n - 1) as usize;
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        sign * phi_half(-x) * w_poly(m).eval_f64(x) / factorial_f64(m as u32)
    }
}

/// Φ_λ(x) = (1/√(2π)) ∫ Ψ_λ(p) e^{ipx} dp by adaptive quadrature over the
/// truncated line. Works for any real λ; half-integer λ admit the closed
/// forms above as an independent oracle.
pub fn fourier_transform_num(lambda: f64, x: f64, spec: &QuadratureSpec) -> Result<Complex64> {
    let integral = integrate_real_line(
        |p| psi(lambda, p) * Complex64::new(0.0, p * x).exp(),
        spec,
    )?;
    Ok(integral.value / (2.0 * PI).sqrt())
}

/// One transform-versus-closed-form comparison point.
#[derive(Clone, Copy, Debug)]
pub struct TransformRow {
    pub n: i64,
    pub x: f64,
    pub numeric: Complex64,
    pub closed_form: f64,
    pub abs_error: f64,
}

/// Transform comparison swept over an index set × position grid.
#[derive(Clone, Debug)]
pub struct TransformComparison {
    pub rows: Vec<TransformRow>,
    pub max_abs_error: f64,
}

impl TransformComparison {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,x,numeric_re,numeric_im,closed_form,abs_error\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                r.n, r.x, r.numeric.re, r.numeric.im, r.closed_form, r.abs_error
            ));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "rows": self.rows.iter().map(|r| json!({
                "n": r.n,
                "x": r.x,
                "numeric_re": r.numeric.re,
                "numeric_im": r.numeric.im,
                "closed_form": r.closed_form,
                "abs_error": r.abs_error,
            })).collect::<Vec<_>>(),
            "max_abs_error": self.max_abs_error,
        })
    }
}

/// Evaluate the numerical transform at λ = n + ½ over every (n, x) pair and
/// compare against the closed form. Pairs are independent, so the sweep is
/// data-parallel with deterministic assembly.
pub fn transform_comparison(
    indices: &[i64],
    xs: &[f64],
    spec: &QuadratureSpec,
) -> Result<TransformComparison> {
    let pairs: Vec<(i64, f64)> = indices
        .iter()
        .flat_map(|&n| xs.iter().map(move |&x| (n, x)))
        .collect();
    let computed = exec::map_slice(&pairs, |&(n, x)| -> Result<TransformRow> {
        let lambda = n as f64 + 0.5;
        let numeric = fourier_transform_num(lambda, x, spec)?;
        let closed_form = phi_closed(n, x);
        Ok(TransformRow {
            n,
            x,
            numeric,
            closed_form,
            abs_error: (numeric - closed_form).norm(),
        })
    });
    let mut rows = Vec::with_capacity(pairs.len());
    let mut max_abs_error: f64 = 0.0;
    for row in computed {
        let row = row?;
        max_abs_error = max_abs_error.max(row.abs_error);
        rows.push(row);
    }
    Ok(TransformComparison {
        rows,
        max_abs_error,
    })
}

/// Φ(x,t) = Φ_{1/2}(x)·(1+t²)^{−1/2}·e^{2x·arctan t}, the generating function
/// whose Taylor coefficients in t are Φ_{n+1/2}(x). Convergent for |t| < 1.
pub fn generating_phi(x: f64, t: f64) -> Result<f64> {
    if !(t.abs() < 1.0) {
        return Err(Error::domain(format!(
            "generating argument must satisfy |t| < 1, got {t}"
        )));
    }
    Ok(phi_half(x) * (2.0 * x * t.atan()).exp() / (1.0 + t * t).sqrt())
}

/// [`generating_phi`] continued to complex t on the unit disk, where the
/// principal branches of arctan and the square root are analytic.
pub fn generating_phi_complex(x: f64, t: Complex64) -> Result<Complex64> {
    if !(t.norm() < 1.0) {
        return Err(Error::domain(format!(
            "generating argument must satisfy |t| < 1, got |t| = {}",
            t.norm()
        )));
    }
    Ok(phi_half(x) * (t.atan() * (2.0 * x)).exp() / (1.0 + t * t).sqrt())
}

/// Taylor coefficients of the generating function at fixed x, recovered by
/// the trapezoid rule on the circle |t| = ½. Spectrally accurate for a
/// function analytic on the unit disk; the fixed 128-point rule supports
/// n_max ≤ 32 before aliasing matters.
pub fn generating_phi_coefficients(x: f64, n_max: usize) -> Result<Vec<f64>> {
    const M: usize = 128;
    const RADIUS: f64 = 0.5;
    if n_max > 32 {
        return Err(Error::domain(
            "coefficient recovery supports n_max ≤ 32 on the fixed 128-point circle",
        ));
    }
    let samples: Vec<Complex64> = (0..M)
        .map(|j| {
            let angle = 2.0 * PI * j as f64 / M as f64;
            generating_phi_complex(x, Complex64::from_polar(RADIUS, angle))
        })
        .collect::<Result<_>>()?;
    Ok((0..=n_max)
        .map(|n| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, s) in samples.iter().enumerate() {
                let angle = -2.0 * PI * (n * j % M) as f64 / M as f64;
                acc += s * Complex64::from_polar(1.0, angle);
            }
            acc.re / (M as f64 * RADIUS.powi(n as i32))
        })
        .collect())
}

/// Outcome of the nonlocal difference operator on one family member: the
/// operator value at x, the predicted factor n + ½, and the member's own
/// value for forming residuals.
#[derive(Clone, Copy, Debug)]
pub struct NonlocalAction {
    pub value: f64,
    pub eigenvalue: f64,
    pub input_value: f64,
}

/// Apply the nonlocal operator (i/2)(½−ix)f(x+i) − (i/2)(½+ix)f(x−i) to
/// Φ_{n+1/2} through its factored form: the ±i continuation factors of the
/// Φ_{1/2} profile turn the complex shifts into the exact polynomial
/// operator h, so floating point enters only through the profile value and
/// one Horner evaluation.
pub fn apply_nonlocal_h(n: i64, x: f64) -> NonlocalAction {
    let input_value = phi_closed(n, x);
    let eigenvalue = n as f64 + 0.5;
    let value = if n >= 0 {
        let hw = apply_h(&w_poly(n as usize)).expect("W_n has real coefficients");
        phi_half(x) * hw.eval_f64(x) / factorial_f64(n as u32)
    } else {
        // The reflected profile continues with the opposite ±i factors,
        // Φ_{−1/2}(x ± i) = ±i·Φ_{−1/2}(x), so the polynomial part picks up
        // −h and the action lands on the negative eigenvalue −(m + ½).
        let m = (-n - 1) as usize;
        let hw = apply_h(&w_poly(m)).expect("W_m has real coefficients");
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        -sign * phi_half(-x) * hw.eval_f64(x) / factorial_f64(m as u32)
    };
    NonlocalAction {
        value,
        eigenvalue,
        input_value,
    }
}

/// The general-potential symmetrized form of the nonlocal operator,
/// (1/(2√2))·[(√V(x) + √V(x+i))f(x+i) + (√V(x) + √V(x−i))f(x−i)],
/// as a smoke-evaluation hook for closed-form inputs continued off the real
/// axis. For the oscillator branch √V(z) = z/√2 on Re z > 0 the prefactors
/// reduce exactly to (i/2)(½ ∓ ix).
pub fn nonlocal_h_general(
    sqrt_v: impl Fn(Complex64) -> Complex64,
    f: impl Fn(Complex64) -> Complex64,
    x: f64,
) -> Complex64 {
    let up = Complex64::new(x, 1.0);
    let down = Complex64::new(x, -1.0);
    let at_x = sqrt_v(Complex64::new(x, 0.0));
    ((at_x + sqrt_v(up)) * f(up) + (at_x + sqrt_v(down)) * f(down)) / (2.0 * SQRT_2)
}

/// K applied to the shifted transform Ψ(p) = Ψ_{1/2}(p)e^{−ipa}, which solves
/// the position-space difference equation for every shift a yet satisfies
/// KΨ = (½ + a·cosh p)Ψ — an eigenfunction only at a = 0.
#[derive(Clone, Copy, Debug)]
pub struct ShiftedCounterexample {
    /// (KΨ)(p), computed from the exact derivative of Ψ_{1/2}.
    pub k_action: Complex64,
    /// (KΨ)(p)/Ψ(p) — the pointwise multiplier.
    pub multiplier: Complex64,
    /// ½ + a·cosh p.
    pub expected_multiplier: f64,
    /// The (eigenvalue part, shift) split (½, a) of the multiplier.
    pub eigen_decomposition: (f64, f64),
}

impl ShiftedCounterexample {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "k_action_re": self.k_action.re,
            "k_action_im": self.k_action.im,
            "multiplier_re": self.multiplier.re,
            "multiplier_im": self.multiplier.im,
            "expected_multiplier": self.expected_multiplier,
            "eigenvalue_part": self.eigen_decomposition.0,
            "shift": self.eigen_decomposition.1,
        })
    }
}

/// Evaluate K on Ψ_{1/2}(p)e^{−ipa} at one momentum point, with the expected
/// non-constant multiplier ½ + a·cosh p.
pub fn shifted_counterexample(a: f64, p: f64) -> ShiftedCounterexample {
    let twist = Complex64::new(0.0, -p * a).exp();
    let value = psi(0.5, p) * twist;
    let derivative = (psi_derivative(0.5, p) - Complex64::new(0.0, a) * psi(0.5, p)) * twist;
    let k_action = Complex64::new(0.0, 0.5) * (p.sinh() * value + 2.0 * p.cosh() * derivative);
    ShiftedCounterexample {
        k_action,
        multiplier: k_action / value,
        expected_multiplier: 0.5 + a * p.cosh(),
        eigen_decomposition: (0.5, a),
    }
}

/// Residual of the position-space half-eigenvalue relation
/// (i/2)(½−ix)Φ(x+i) − (i/2)(½+ix)Φ(x−i) = ½Φ(x) for the shifted profile
/// Φ(x) = Φ_{1/2}(x + a), evaluated by analytic continuation. Zero (to
/// roundoff) for every real shift a.
pub fn shifted_phi_residual(a: f64, x: f64) -> f64 {
    let up = phi_half_complex(Complex64::new(x + a, 1.0));
    let down = phi_half_complex(Complex64::new(x + a, -1.0));
    let i_half = Complex64::new(0.0, 0.5);
    let lhs = i_half * Complex64::new(0.5, -x) * up - i_half * Complex64::new(0.5, x) * down;
    (lhs - 0.5 * phi_half(x + a)).norm()
}

/// Gram matrix of the W_n under the 1/cosh(πx) weight, with its deviation
/// from the diag((n!)²) reference.
#[derive(Clone, Debug)]
pub struct WGramMatrix {
    pub dim: usize,
    /// Row-major entries ⟨W_i, W_j⟩.
    pub values: Vec<f64>,
    /// Largest |entry/(i!)² − 1| over the diagonal.
    pub max_diag_rel_deviation: f64,
    /// Largest |entry| off the diagonal.
    pub max_offdiag_abs: f64,
}

impl WGramMatrix {
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.dim + j]
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,j,value,reference\n");
        for i in 0..self.dim {
            for j in 0..self.dim {
                let reference = if i == j {
                    factorial_f64(i as u32).powi(2)
                } else {
                    0.0
                };
                out.push_str(&format!(
                    "{},{},{:.16e},{:.16e}\n",
                    i,
                    j,
                    self.entry(i, j),
                    reference
                ));
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "dim": self.dim,
            "values": self.values,
            "max_diag_rel_deviation": self.max_diag_rel_deviation,
            "max_offdiag_abs": self.max_offdiag_abs,
        })
    }
}

/// One Gauss–Kronrod panel of q(u)·sech(u) on [a, b]: the 15-point Kronrod
/// sum accumulated in double-double, plus the f64 Σw·|q·sech| magnitude used
/// for the roundoff floor of the estimate.
fn dd_panel(coeffs: &[Dd], a: f64, b: f64) -> (Dd, f64) {
    use crate::numerics::quadrature::{WGK, XGK};
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |u: f64| -> (Dd, f64) {
        let weight = 1.0 / u.cosh();
        let q = horner_dd(coeffs, u).mul_f64(weight);
        (q, q.hi.abs())
    };
    let (fc, ac) = eval(center);
    let mut sum = fc.mul_f64(WGK[7]);
    let mut resabs = WGK[7] * ac;
    for j in 0..7 {
        let dx = half * XGK[j];
        let (f1, a1) = eval(center - dx);
        let (f2, a2) = eval(center + dx);
        sum = sum.add(f1.add(f2).mul_f64(WGK[j]));
        resabs += WGK[j] * (a1 + a2);
    }
    (sum.mul_f64(half), resabs * half)
}

/// Fixed composite Gauss–Kronrod rule over [0, upper] split into `panels`
/// equal panels, everything accumulated in double-double.
fn dd_composite(coeffs: &[Dd], upper: f64, panels: usize) -> (Dd, f64) {
    let width = upper / panels as f64;
    let mut total = Dd::ZERO;
    let mut resabs = 0.0;
    for i in 0..panels {
        let (value, magnitude) = dd_panel(coeffs, i as f64 * width, (i + 1) as f64 * width);
        total = total.add(value);
        resabs += magnitude;
    }
    (total, resabs)
}

/// ∫ W_n(x)W_k(x)/cosh(πx) dx for one index pair. Odd-parity pairs vanish
/// exactly; even pairs fold to 2∫₀^∞ and substitute u = πx, with the exact
/// rational product coefficients carried over π-powers in double-double so
/// the (n!)²-scale cancellation survives down to the f64 weight's roundoff.
fn w_pair_integral(n: usize, k: usize, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    if (n + k) % 2 == 1 {
        return Ok((0.0, 0.0));
    }
    let product = w_poly(n).mul(&w_poly(k));
    debug_assert!(product.is_real());
    let coeffs: Vec<Dd> = product
        .coeffs()
        .iter()
        .enumerate()
        .map(|(j, c)| Dd::from_big_rational(&c.re).div(DD_PI.powi(j as u32)))
        .collect();
    let upper = PI * spec.truncation;
    let panels = (upper.ceil() as usize).max(8);
    let (coarse, _) = dd_composite(&coeffs, upper, panels);
    let (fine, resabs) = dd_composite(&coeffs, upper, 2 * panels);
    // Parity fold contributes the 2, the substitution u = πx the 1/π.
    let scale = 2.0 / PI;
    let value = fine.mul_f64(scale).to_f64();
    let tail = 2.0 * scale * (horner_dd(&coeffs, upper).to_f64() / upper.cosh()).abs();
    let achieved = scale * (coarse.sub(fine).to_f64().abs() + f64::EPSILON * resabs) + tail;
    // The natural magnitude of the (n, k) pair is n!·k!; the requested
    // tolerance bounds the error relative to that scale (absolute for
    // order-one entries).
    let requested = spec.abs_tol * (1.0 + factorial_f64(n as u32) * factorial_f64(k as u32));
    if !(achieved <= requested) {
        return Err(Error::ToleranceNotMet {
            achieved,
            requested,
        });
    }
    Ok((value, achieved))
}

/// Gram matrix ⟨W_i, W_j⟩ under the 1/cosh(πx) weight for 0 ≤ i, j ≤ n_max,
/// swept in parallel over the upper triangle. Limited to n_max ≤ 12: beyond
/// that the (n!)² entry scale outruns what the floating weight evaluation
/// can resolve, and the exact operator-algebra route covers the family
/// instead.
pub fn gram_w(n_max: usize, spec: &QuadratureSpec) -> Result<WGramMatrix> {
    if n_max > 12 {
        return Err(Error::domain(format!(
            "sech-weight Gram supports n_max ≤ 12, got {n_max}"
        )));
    }
    if spec.scheme != Scheme::TruncatedAdaptive {
        return Err(Error::SchemeMismatch {
            routine: "gram_w",
            expected: "truncated-adaptive",
        });
    }
    if !(spec.abs_tol > 0.0) || !(spec.truncation > 0.0) {
        return Err(Error::domain(
            "quadrature spec requires positive abs_tol and truncation",
        ));
    }
    let dim = n_max + 1;
    let pairs: Vec<(usize, usize)> = (0..dim)
        .flat_map(|i| (i..dim).map(move |j| (i, j)))
        .collect();
    let computed = exec::map_slice(&pairs, |&(i, j)| w_pair_integral(i, j, spec));
    let mut values = vec![0.0; dim * dim];
    for (&(i, j), result) in pairs.iter().zip(computed) {
        let (value, _) = result?;
        values[i * dim + j] = value;
        values[j * dim + i] = value;
    }
    let mut max_diag_rel_deviation: f64 = 0.0;
    let mut max_offdiag_abs: f64 = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let v = values[i * dim + j];
            if i == j {
                let reference = factorial_f64(i as u32).powi(2);
                max_diag_rel_deviation = max_diag_rel_deviation.max((v / reference - 1.0).abs());
            } else {
                max_offdiag_abs = max_offdiag_abs.max(v.abs());
            }
        }
    }
    Ok(WGramMatrix {
        dim,
        values,
        max_diag_rel_deviation,
        max_offdiag_abs,
    })
}

/// Window half-width needed so an e^{−rate·|x|} tail stays below the
/// requested tolerance, never narrower than the caller's window.
fn widened_truncation(spec: &QuadratureSpec, rate: f64) -> f64 {
    let needed = ((1.0 / spec.abs_tol).ln() + 5.0) / rate;
    spec.truncation.max(needed)
}

/// ∫ e^{2xθ}/cosh(πx) dx = 1/cos θ for |θ| < π/2. The integrand decays like
/// e^{−(π−2|θ|)|x|}, so the window widens as θ approaches ±π/2; evaluation
/// goes through the log of the weight to stay finite on wide windows.
pub fn weight_integral(theta: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(theta.abs() < FRAC_PI_2) {
        return Err(Error::domain(format!(
            "tilted weight integral diverges for |theta| ≥ π/2, got {theta}"
        )));
    }
    let rate = PI - 2.0 * theta.abs();
    let local = spec.with_truncation(widened_truncation(spec, rate));
    let integrand = |x: f64| {
        let abs_arg = (PI * x).abs();
        let log_sech = LN_2 - abs_arg - (-2.0 * abs_arg).exp().ln_1p();
        Complex64::new((2.0 * theta * x + log_sech).exp(), 0.0)
    };
    Ok(integrate_real_line(integrand, &local)?.value.re)
}

/// ∫ W(x,s)W(x,t)/cosh(πx) dx for the exponential generating function
/// W(x,t) = (1+t²)^{−1/2}·e^{2x·arctan t}; equals 1/(1 − st) for |s|,|t| < 1.
/// The product collapses to one tilted weight integral at θ = arctan s +
/// arctan t, which stays inside (−π/2, π/2).
pub fn ww_generating_check(s: f64, t: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(s.abs() < 1.0 && t.abs() < 1.0) {
        return Err(Error::domain(format!(
            "generating arguments must satisfy |s|, |t| < 1, got s = {s}, t = {t}"
        )));
    }
    let theta = s.atan() + t.atan();
    let normalization = ((1.0 + s * s) * (1.0 + t * t)).sqrt();
    Ok(weight_integral(theta, spec)? / normalization)
}

/// Momentum-side generating function Ψ(p,t) = Σ Ψ_{n+1/2}(p)tⁿ
/// = (1/√π)·(1+i)e^{p/2}/((1−it) + i(1+it)e^p), continued to complex p.
pub fn generating_psi(p: Complex64, t: f64) -> Complex64 {
    INV_SQRT_PI * Complex64::new(1.0, 1.0) * (0.5 * p).exp() / generating_psi_denominator(p, t)
}

fn generating_psi_denominator(p: Complex64, t: f64) -> Complex64 {
    Complex64::new(1.0, -t) + Complex64::new(-t, 1.0) * p.exp()
}

/// Numerical check of the rectangle-contour evaluation of the generating
/// transform: the 2πi-periodicity sign flip of the integrand, the location
/// of its simple pole, and the identity
/// (lower-side integral)·(1 + e^{−2πx}) = 2πi·(residue at the pole).
#[derive(Clone, Copy, Debug)]
pub struct ContourReport {
    /// Ψ(p + 2πi, t)/Ψ(p, t) at a fixed real probe p — should be −1.
    pub periodicity_ratio: Complex64,
    /// iπ/2 − 2i·arctan t, the simple pole inside the rectangle.
    pub pole: Complex64,
    /// |denominator| of Ψ(·, t) at the pole — zero for a true pole.
    pub pole_residual: f64,
    /// −(i/π)·e^{−πx/2}·(1+t²)^{−1/2}·e^{2x·arctan t}, the residue of the
    /// transform integrand at the pole.
    pub residue: Complex64,
    /// (1/√(2π)) ∫_{−a}^{a} Ψ(p,t)e^{ipx} dp along the lower rectangle side.
    pub lower_side_integral: Complex64,
    /// |lower·(1 + e^{−2πx}) − 2πi·residue|.
    pub residue_identity_gap: f64,
}

impl ContourReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "periodicity_ratio_re": self.periodicity_ratio.re,
            "periodicity_ratio_im": self.periodicity_ratio.im,
            "pole_re": self.pole.re,
            "pole_im": self.pole.im,
            "pole_residual": self.pole_residual,
            "residue_re": self.residue.re,
            "residue_im": self.residue.im,
            "lower_side_re": self.lower_side_integral.re,
            "lower_side_im": self.lower_side_integral.im,
            "residue_identity_gap": self.residue_identity_gap,
        })
    }
}

/// Verify the contour identities behind the closed-form transform at one
/// (x, t) pair, integrating the lower rectangle side over [−a, a]. The gap
/// shrinks like the e^{−a/2} side contributions, so a should be large.
pub fn residue_contour_check(x: f64, t: f64, a: f64) -> Result<ContourReport> {
    if !(t.abs() < 1.0) {
        return Err(Error::domain(format!(
            "generating argument must satisfy |t| < 1, got {t}"
        )));
    }
    if !(a >= 1.0) {
        return Err(Error::domain(format!(
            "rectangle half-width must be at least 1, got {a}"
        )));
    }
    let probe = Complex64::new(0.3, 0.0);
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let periodicity_ratio = generating_psi(probe + two_pi_i, t) / generating_psi(probe, t);
    let pole = Complex64::new(0.0, FRAC_PI_2 - 2.0 * t.atan());
    let pole_residual = generating_psi_denominator(pole, t).norm();
    let residue = Complex64::new(0.0, -1.0 / PI) * (x * (2.0 * t.atan() - FRAC_PI_2)).exp()
        / (1.0 + t * t).sqrt();
    let quad = QuadratureSpec::real_line()
        .with_truncation(a)
        .with_tol(1e-10);
    let lower = integrate_real_line(
        |p| generating_psi(Complex64::new(p, 0.0), t) * Complex64::new(0.0, p * x).exp(),
        &quad,
    )?;
    let lower_side_integral = lower.value / (2.0 * PI).sqrt();
    let residue_identity_gap =
        (lower_side_integral * (1.0 + (-2.0 * PI * x).exp()) - two_pi_i * residue).norm();
    Ok(ContourReport {
        periodicity_ratio,
        pole,
        pole_residual,
        residue,
        lower_side_integral,
        residue_identity_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    use crate::exactpoly::poly::rational_to_f64;

    /// W_n at a complex point with f64-rounded coefficients — an evaluation
    /// path independent of the exact operator algebra.
    fn w_eval_complex(n: usize, z: Complex64) -> Complex64 {
        let poly = w_poly(n);
        let mut acc = Complex64::new(0.0, 0.0);
        for c in poly.coeffs().iter().rev() {
            acc = acc * z + rational_to_f64(&c.re);
        }
        acc
    }

    /// Φ_{n+1/2} continued off the real axis through the profile and the
    /// polynomial factor.
    fn phi_continued(n: i64, z: Complex64) -> Complex64 {
        if n >= 0 {
            phi_half_complex(z) * w_eval_complex(n as usize, z) / factorial_f64(n as u32)
        } else {
            let m = (-n - 1) as usize;
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            sign * phi_half_complex(-z) * w_eval_complex(m, z) / factorial_f64(m as u32)
        }
    }

    #[test]
    fn profile_at_zero_is_one() {
        assert_eq!(phi_half(0.0), 1.0);
    }

    #[test]
    fn profile_branches_agree_and_decay() {
        for &x in &[-3.0, -0.7, 0.4, 2.5] {
            let direct = (PI * x / 2.0).exp() / (PI * x).cosh();
            assert!((phi_half(x) - direct).abs() < 1e-15 * direct.abs());
        }
        assert!(phi_half(-500.0) >= 0.0 && phi_half(-500.0) < 1e-300);
        assert!(phi_half(500.0) >= 0.0 && phi_half(500.0) < 1e-300);
    }

    #[test]
    fn complex_profile_satisfies_unit_shift_identity() {
        for &x in &[-2.0, -0.3, 0.0, 0.8, 3.1] {
            let base = phi_half(x);
            let up = phi_half_complex(Complex64::new(x, 1.0));
            let down = phi_half_complex(Complex64::new(x, -1.0));
            assert!((up - Complex64::new(0.0, -base)).norm() < 1e-14 * base.max(1.0));
            assert!((down - Complex64::new(0.0, base)).norm() < 1e-14 * base.max(1.0));
        }
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(phi_closed(0, 0.0), 1.0);
        // W_2(0) = −1, so the n = 2 member at the origin is −1/2.
        assert_eq!(phi_closed(2, 0.0), -0.5);
    }

    #[test]
    fn reflection_swaps_index_and_sign_of_x() {
        for n in 0..6 {
            for &x in &[-1.7, -0.4, 0.0, 0.9, 2.3] {
                assert_eq!(phi_closed(-n - 1, x), phi_closed(n, -x));
            }
        }
    }

    #[test]
    fn transform_matches_closed_forms() {
        let spec = QuadratureSpec::real_line();
        let at_zero = fourier_transform_num(0.5, 0.0, &spec).unwrap();
        assert!((at_zero.re - 1.0).abs() < 1e-8);
        let n2 = fourier_transform_num(2.5, 0.7, &spec).unwrap();
        assert!((n2.re - phi_closed(2, 0.7)).abs() < 1e-8);
    }

    #[test]
    fn transform_of_half_index_is_real() {
        let spec = QuadratureSpec::real_line().with_tol(1e-11);
        for &x in &[-1.2, 0.3, 1.9] {
            let value = fourier_transform_num(0.5, x, &spec).unwrap();
            assert!(value.im.abs() < 1e-10, "imaginary part {}", value.im);
        }
    }

    #[test]
    fn transform_comparison_sweep_stays_tight() {
        let spec = QuadratureSpec::real_line();
        let indices: Vec<i64> = (-3..=3).collect();
        let xs: Vec<f64> = (-3..=3).map(f64::from).collect();
        let table = transform_comparison(&indices, &xs, &spec).unwrap();
        assert_eq!(table.rows.len(), 49);
        assert!(
            table.max_abs_error < 1e-8,
            "max error {}",
            table.max_abs_error
        );
        let csv = table.to_csv();
        assert!(csv.starts_with("n,x,numeric_re,numeric_im,closed_form,abs_error\n"));
        assert_eq!(csv.lines().count(), 50);
    }

    #[test]
    fn generating_function_examples() {
        for &x in &[-1.0, 0.2, 1.7] {
            assert_eq!(generating_phi(x, 0.0).unwrap(), phi_half(x));
        }
        let at_half = generating_phi(0.0, 0.5).unwrap();
        assert!((at_half - 1.0 / 1.25f64.sqrt()).abs() < 1e-15);
        assert!(generating_phi(0.3, 1.0).is_err());
        assert!(generating_phi(0.3, -1.2).is_err());
    }

    #[test]
    fn generating_slope_at_zero_is_first_member() {
        let eps = 1e-5;
        for &x in &[-0.8, 0.5, 1.4] {
            let slope =
                (generating_phi(x, eps).unwrap() - generating_phi(x, -eps).unwrap()) / (2.0 * eps);
            assert!((slope - phi_closed(1, x)).abs() < 1e-7);
        }
    }

    #[test]
    fn circle_rule_recovers_member_values() {
        let x = 0.8;
        let coeffs = generating_phi_coefficients(x, 8).unwrap();
        for (n, &c) in coeffs.iter().enumerate() {
            assert!(
                (c - phi_closed(n as i64, x)).abs() < 1e-12,
                "n = {n}: {c} vs {}",
                phi_closed(n as i64, x)
            );
        }
        assert!(generating_phi_coefficients(0.0, 33).is_err());
    }

    #[test]
    fn nonlocal_action_examples() {
        let at_zero = apply_nonlocal_h(0, 0.0);
        assert_eq!(at_zero.value, 0.5);
        assert_eq!(at_zero.eigenvalue, 0.5);
        for &x in &[-1.3, 0.2, 0.9, 2.1] {
            let act = apply_nonlocal_h(3, x);
            let gap = (act.value - act.eigenvalue * act.input_value).abs();
            assert!(gap <= 1e-12 * (1.0 + act.value.abs()), "x = {x}: gap {gap}");
        }
    }

    #[test]
    fn nonlocal_action_covers_negative_indices() {
        for n in [-1i64, -2, -3, -5] {
            for &x in &[-0.9, 0.4, 1.6] {
                let act = apply_nonlocal_h(n, x);
                assert_eq!(act.eigenvalue, n as f64 + 0.5);
                let gap = (act.value - act.eigenvalue * act.input_value).abs();
                assert!(gap <= 1e-12 * (1.0 + act.value.abs()), "n = {n}, x = {x}");
            }
        }
    }

    #[test]
    fn factored_route_matches_raw_continuation() {
        // The same operator evaluated without the exact algebra: raw complex
        // shifts of the continued member.
        let i_half = Complex64::new(0.0, 0.5);
        for &(n, x) in &[(3i64, 0.4), (3, 1.1), (-2, 0.8)] {
            let raw = i_half * Complex64::new(0.5, -x) * phi_continued(n, Complex64::new(x, 1.0))
                - i_half * Complex64::new(0.5, x) * phi_continued(n, Complex64::new(x, -1.0));
            let act = apply_nonlocal_h(n, x);
            assert!((raw.re - act.value).abs() < 1e-12 * (1.0 + act.value.abs()));
            assert!(raw.im.abs() < 1e-13);
        }
    }

    #[test]
    fn general_potential_form_reduces_to_oscillator_action() {
        let sqrt_v = |z: Complex64| z / SQRT_2;
        for &x in &[0.5, 1.3] {
            let general = nonlocal_h_general(sqrt_v, |z| phi_continued(2, z), x);
            let factored = apply_nonlocal_h(2, x);
            assert!((general.re - factored.value).abs() < 1e-12 * (1.0 + factored.value.abs()));
            assert!(general.im.abs() < 1e-13);
        }
    }

    #[test]
    fn counterexample_multiplier_matches_closed_form() {
        let a = 0.7;
        for &p in &[0.0, 1.0, 2.0, -1.5] {
            let report = shifted_counterexample(a, p);
            let gap = (report.multiplier - report.expected_multiplier).norm();
            assert!(gap < 1e-12, "p = {p}: gap {gap}");
        }
        let unshifted = shifted_counterexample(0.0, 0.8);
        assert!((unshifted.multiplier - 0.5).norm() < 1e-13);
        let at_origin = shifted_counterexample(1.0, 0.0);
        assert!((at_origin.multiplier - 1.5).norm() < 1e-13);
        assert_eq!(at_origin.eigen_decomposition, (0.5, 1.0));
    }

    #[test]
    fn counterexample_multiplier_is_non_constant_for_nonzero_shift() {
        let a = 0.4;
        let m0 = shifted_counterexample(a, 0.0).multiplier;
        let m1 = shifted_counterexample(a, 1.0).multiplier;
        assert!((m1 - m0).norm() > 0.9 * a * (1.0f64.cosh() - 1.0));
    }

    #[test]
    fn shifted_profile_solves_position_equation_for_any_shift() {
        for &a in &[0.0, 0.3, 1.0, -2.2] {
            for &x in &[-1.5, 0.0, 0.6, 2.0] {
                assert!(shifted_phi_residual(a, x) < 1e-10, "a = {a}, x = {x}");
            }
        }
    }

    #[test]
    fn gram_examples_and_parity_zeros() {
        let spec = QuadratureSpec::real_line();
        let gram = gram_w(3, &spec).unwrap();
        assert!((gram.entry(0, 0) - 1.0).abs() < 1e-10);
        assert!((gram.entry(1, 1) - 1.0).abs() < 1e-10);
        assert!((gram.entry(3, 3) - 36.0).abs() < 1e-8 * 36.0);
        assert_eq!(gram.entry(1, 2), 0.0);
        assert_eq!(gram.entry(0, 1), 0.0);
        assert!(gram.entry(0, 2).abs() < 1e-10);
        assert!(gram.max_diag_rel_deviation < 1e-8);
        assert!(gram.max_offdiag_abs < 1e-8);
        let csv = gram.to_csv();
        assert!(csv.starts_with("i,j,value,reference\n"));
        assert_eq!(csv.lines().count(), 17);
    }

    #[test]
    fn gram_rejects_out_of_range_and_wrong_scheme() {
        assert!(matches!(
            gram_w(13, &QuadratureSpec::real_line()),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            gram_w(2, &QuadratureSpec::theta()),
            Err(Error::SchemeMismatch { .. })
        ));
    }

    #[test]
    fn gram_reports_unreachable_tolerance() {
        let spec = QuadratureSpec::real_line().with_tol(1e-25);
        match gram_w(1, &spec) {
            Err(Error::ToleranceNotMet { achieved, .. }) => assert!(achieved > 1e-25),
            other => panic!("expected ToleranceNotMet, got {other:?}"),
        }
    }

    #[test]
    fn weight_integral_matches_secant() {
        let spec = QuadratureSpec::real_line();
        assert!((weight_integral(0.0, &spec).unwrap() - 1.0).abs() < 1e-10);
        assert!((weight_integral(PI / 4.0, &spec).unwrap() - SQRT_2).abs() < 1e-10);
        assert!((weight_integral(PI / 3.0, &spec).unwrap() - 2.0).abs() < 1e-10);
        // Near the divergence the window widens but the law still holds.
        let near_edge = weight_integral(1.5, &spec).unwrap();
        assert!((near_edge - 1.0 / 1.5f64.cos()).abs() < 1e-8);
        assert!(weight_integral(FRAC_PI_2, &spec).is_err());
        assert!(weight_integral(-2.0, &spec).is_err());
    }

    #[test]
    fn ww_check_matches_geometric_law() {
        let spec = QuadratureSpec::real_line();
        assert!((ww_generating_check(0.0, 0.0, &spec).unwrap() - 1.0).abs() < 1e-10);
        let v = ww_generating_check(0.3, 0.5, &spec).unwrap();
        assert!((v - 1.0 / 0.85).abs() < 1e-8);
        let t = 0.6;
        let sym = ww_generating_check(-t, t, &spec).unwrap();
        assert!((sym - 1.0 / (1.0 + t * t)).abs() < 1e-8);
        assert!(ww_generating_check(1.0, 0.2, &spec).is_err());
    }

    #[test]
    fn momentum_generating_function_sums_the_family() {
        let (p, t) = (0.7, 0.4f64);
        let mut sum = Complex64::new(0.0, 0.0);
        for n in 0..80 {
            sum += psi(n as f64 + 0.5, p) * t.powi(n);
        }
        let closed = generating_psi(Complex64::new(p, 0.0), t);
        assert!((sum - closed).norm() < 1e-12);
        assert!((generating_psi(Complex64::new(p, 0.0), 0.0) - psi(0.5, p)).norm() < 1e-14);
    }

    #[test]
    fn contour_identities_hold() {
        let report = residue_contour_check(0.0, 0.0, 40.0).unwrap();
        assert!((report.periodicity_ratio + 1.0).norm() < 1e-12);
        assert_eq!(report.pole.re, 0.0);
        assert!((report.pole.im - FRAC_PI_2).abs() < 1e-15);
        assert!(report.pole_residual < 1e-14);
        assert!((report.residue - Complex64::new(0.0, -1.0 / PI)).norm() < 1e-15);
        // lower·(1+1) = 2πi·(−i/π) = 2, so the lower side itself is Φ(0,0) = 1.
        assert!((report.lower_side_integral.re - 1.0).abs() < 1e-8);
        assert!(report.residue_identity_gap < 1e-8);
    }

    #[test]
    fn contour_identities_hold_off_center() {
        let report = residue_contour_check(0.7, 0.5, 40.0).unwrap();
        assert!((report.periodicity_ratio + 1.0).norm() < 1e-12);
        assert!(report.pole_residual < 1e-14);
        assert!(report.residue_identity_gap < 1e-8);
        // The lower side reproduces the closed generating function.
        let expected = generating_phi(0.7, 0.5).unwrap();
        assert!((report.lower_side_integral.re - expected).abs() < 1e-8);
        assert!(report.lower_side_integral.im.abs() < 1e-8);
    }

    #[test]
    fn contour_check_rejects_bad_arguments() {
        assert!(residue_contour_check(0.0, 1.0, 40.0).is_err());
        assert!(residue_contour_check(0.0, 0.3, 0.5).is_err());
    }
}
