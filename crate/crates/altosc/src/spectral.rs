//! The momentum-representation operator K = (i/2)(sinh p + 2 cosh p · d/dp),
//! its eigenfamily Ψ_λ(p) = (1/√(π cosh p))·e^{−iλ·arctan(sinh p)}, inner
//! products with their sinc closed form, Parseval sums over the discrete
//! bases {Ψ_{2n+γ}}, and the boundary ratio that labels the self-adjoint
//! extensions.

use std::sync::Arc;

use num::complex::Complex64;
use serde_json::json;

use crate::error::{Error, Result};
use crate::exec;
use crate::numerics::quadrature::{
    integrate_real_line, integrate_theta, Integral, QuadratureSpec,
};

const INV_SQRT_PI: f64 = 0.5641895835477563;

/// arctan(sinh p), the angle variable underlying every phase here.
pub fn gudermannian(p: f64) -> f64 {
    p.sinh().atan()
}

/// One eigenfunction Ψ_λ with its derived period label γ = λ mod 2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenFunctionSpec {
    pub lambda: f64,
}

impl EigenFunctionSpec {
    pub fn new(lambda: f64) -> Self {
        EigenFunctionSpec { lambda }
    }

    /// λ mod 2, in [0, 2).
    pub fn gamma(&self) -> f64 {
        self.lambda.rem_euclid(2.0)
    }

    /// Common normalization 1/√π.
    pub fn normalization(&self) -> f64 {
        INV_SQRT_PI
    }

    pub fn eval(&self, p: f64) -> Complex64 {
        psi(self.lambda, p)
    }

    pub fn eval_derivative(&self, p: f64) -> Complex64 {
        psi_derivative(self.lambda, p)
    }
}

/// Ψ_λ(p) = (π cosh p)^{−1/2} · e^{−iλ·arctan(sinh p)}.
pub fn psi(lambda: f64, p: f64) -> Complex64 {
    let amplitude = INV_SQRT_PI / p.cosh().sqrt();
    let phase = -lambda * gudermannian(p);
    Complex64::from_polar(amplitude, phase)
}

/// Exact derivative Ψ′_λ = Ψ_λ·(−tanh(p)/2 − iλ/cosh p), used as the
/// analytic cross-check for the finite-difference operator.
pub fn psi_derivative(lambda: f64, p: f64) -> Complex64 {
    psi(lambda, p) * Complex64::new(-0.5 * p.tanh(), -lambda / p.cosh())
}

/// The discrete family {Ψ_{2n+γ} : n_min ≤ n ≤ n_max}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BasisSpec {
    pub gamma: f64,
    pub n_min: i64,
    pub n_max: i64,
}

impl BasisSpec {
    /// Members with |n| ≤ n_half.
    pub fn symmetric(gamma: f64, n_half: i64) -> Self {
        BasisSpec {
            gamma,
            n_min: -n_half,
            n_max: n_half,
        }
    }

    pub fn lambdas(&self) -> Vec<f64> {
        (self.n_min..=self.n_max)
            .map(|n| 2.0 * n as f64 + self.gamma)
            .collect()
    }
}

/// Largest pointwise deviation, over the given grid, of the two closed-form
/// building-block identities and their n-th power composition:
/// (1+i)e^{p/2}/(1+ie^p) against (cosh p)^{−1/2}·e^{−(i/2)arctan sinh p},
/// i(1−ie^p)/(1+ie^p) against e^{−i·arctan sinh p}, and the composed
/// half-integer eigenfunction (1/√π)·i1·i2ⁿ against Ψ_{n+1/2} for n = 2.
pub fn identity_checks(ps: &[f64]) -> f64 {
    let i = Complex64::i();
    let one = Complex64::new(1.0, 0.0);
    let mut worst = 0.0f64;
    for &p in ps {
        let ep = Complex64::new(p.exp(), 0.0);
        let first = (one + i) * Complex64::new((0.5 * p).exp(), 0.0) / (one + i * ep);
        let first_closed =
            Complex64::from_polar(1.0 / p.cosh().sqrt(), -0.5 * gudermannian(p));
        worst = worst.max((first - first_closed).norm());

        let second = i * (one - i * ep) / (one + i * ep);
        let second_closed = Complex64::from_polar(1.0, -gudermannian(p));
        worst = worst.max((second - second_closed).norm());

        let composed = first * second.powi(2) * INV_SQRT_PI;
        worst = worst.max((composed - psi(2.5, p)).norm());
    }
    worst
}

/// Uniform momentum grid p_i = p_min + i·step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PGrid {
    pub p_min: f64,
    pub step: f64,
    pub len: usize,
}

impl PGrid {
    /// Grid covering [−p_max, p_max] with the given step.
    pub fn symmetric(p_max: f64, step: f64) -> Self {
        assert!(p_max > 0.0 && step > 0.0, "grid extents must be positive");
        let half = (p_max / step).round() as usize;
        PGrid {
            p_min: -(half as f64) * step,
            step,
            len: 2 * half + 1,
        }
    }

    pub fn point(&self, i: usize) -> f64 {
        self.p_min + i as f64 * self.step
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.point(i)).collect()
    }
}

#[derive(Clone, Debug)]
pub struct SampledFunction {
    pub grid: PGrid,
    pub values: Vec<Complex64>,
}

impl SampledFunction {
    pub fn from_fn(grid: PGrid, f: impl Fn(f64) -> Complex64 + Send + Sync) -> Self {
        let values = exec::map_indexed(grid.len, |i| f(grid.point(i)));
        SampledFunction { grid, values }
    }
}

/// Result of applying K by finite differences; only `valid` rows carry the
/// stencil, boundary rows are zero-filled and excluded from `valid`.
#[derive(Clone, Debug)]
pub struct KAction {
    pub grid: PGrid,
    pub values: Vec<Complex64>,
    pub valid: std::ops::Range<usize>,
    /// Estimated worst finite-difference truncation error over `valid`.
    pub estimated_error: f64,
}

/// (i/2)(sinh p · f + 2 cosh p · f′) with an order-4 centered derivative.
/// The truncation error is estimated from fifth differences as
/// cosh(p)·|Δ⁵f|/(30·step) and must not exceed `tol`.
pub fn apply_k_fd(f: &SampledFunction, tol: f64) -> Result<KAction> {
    let n = f.grid.len;
    if f.values.len() != n {
        return Err(Error::domain("sample count must match the grid"));
    }
    if n < 7 {
        return Err(Error::domain("K stencil needs at least seven samples"));
    }
    let h = f.grid.step;
    let v = &f.values;
    // fifth difference over the six points starting at s
    let fifth = |s: usize| -> f64 {
        (v[s + 5] - v[s + 4] * 5.0 + v[s + 3] * 10.0 - v[s + 2] * 10.0 + v[s + 1] * 5.0
            - v[s])
            .norm()
    };
    let mut estimated_error = 0.0f64;
    for i in 2..n - 2 {
        let s = i.saturating_sub(2).min(n - 6);
        let p = f.grid.point(i);
        estimated_error = estimated_error.max(p.cosh() * fifth(s) / (30.0 * h));
    }
    if estimated_error > tol {
        return Err(Error::GridTooCoarse {
            estimated: estimated_error,
            requested: tol,
        });
    }
    let values = exec::map_indexed(n, |i| {
        if !(2..n - 2).contains(&i) {
            return Complex64::new(0.0, 0.0);
        }
        let p = f.grid.point(i);
        let derivative =
            (-v[i + 2] + v[i + 1] * 8.0 - v[i - 1] * 8.0 + v[i - 2]) / (12.0 * h);
        Complex64::new(0.0, 0.5) * (v[i] * p.sinh() + derivative * 2.0 * p.cosh())
    });
    Ok(KAction {
        grid: f.grid,
        values,
        valid: 2..n - 2,
        estimated_error,
    })
}

impl KAction {
    /// sup over valid rows of |K f − λ f| for the given reference samples.
    pub fn eigen_residual(&self, lambda: f64, reference: &SampledFunction) -> f64 {
        self.valid
            .clone()
            .map(|i| (self.values[i] - reference.values[i] * lambda).norm())
            .fold(0.0, f64::max)
    }
}

/// ∫ conj(Ψ_λ)·Ψ_μ dp by adaptive quadrature over the truncated line.
pub fn inner_product(lambda: f64, mu: f64, spec: &QuadratureSpec) -> Result<Integral> {
    integrate_real_line(
        |p| (psi(lambda, p).conj()) * psi(mu, p),
        spec,
    )
}

/// Closed form of the same inner product: sin((λ−μ)π/2)/((λ−μ)π/2).
pub fn sinc_law(lambda: f64, mu: f64) -> f64 {
    let d = 0.5 * (lambda - mu) * std::f64::consts::PI;
    if d.abs() < 1e-12 {
        1.0
    } else {
        d.sin() / d
    }
}

/// Gram matrix of a basis family under the momentum inner product.
#[derive(Clone, Debug)]
pub struct GramReport {
    pub dim: usize,
    /// Row-major entries (Ψ_i, Ψ_j).
    pub values: Vec<Complex64>,
    pub max_identity_deviation: f64,
}

impl GramReport {
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.dim + j]
    }

    /// Long-format CSV: one row per entry with columns i, j, re, im.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,j,re,im\n");
        for i in 0..self.dim {
            for j in 0..self.dim {
                let z = self.entry(i, j);
                out.push_str(&format!("{i},{j},{:.16e},{:.16e}\n", z.re, z.im));
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "dim": self.dim,
            "max_identity_deviation": self.max_identity_deviation,
            "values": self
                .values
                .iter()
                .map(|z| json!([z.re, z.im]))
                .collect::<Vec<_>>(),
        })
    }
}

/// Pairwise inner products of {Ψ_{2n+γ}}; the upper triangle is computed
/// in parallel and mirrored by conjugation.
pub fn basis_gram(basis: &BasisSpec, spec: &QuadratureSpec) -> Result<GramReport> {
    let lambdas = basis.lambdas();
    let dim = lambdas.len();
    if dim == 0 {
        return Err(Error::domain("basis must contain at least one member"));
    }
    let mut pairs = Vec::with_capacity(dim * (dim + 1) / 2);
    for i in 0..dim {
        for j in i..dim {
            pairs.push((i, j));
        }
    }
    let computed = exec::map_slice(&pairs, |&(i, j)| {
        inner_product(lambdas[i], lambdas[j], spec).map(|integral| integral.value)
    });
    let mut values = vec![Complex64::new(0.0, 0.0); dim * dim];
    for (&(i, j), result) in pairs.iter().zip(computed) {
        let z = result?;
        values[i * dim + j] = z;
        values[j * dim + i] = z.conj();
    }
    let mut max_identity_deviation = 0.0f64;
    for i in 0..dim {
        for j in 0..dim {
            let target = if i == j { 1.0 } else { 0.0 };
            max_identity_deviation = max_identity_deviation
                .max((values[i * dim + j] - Complex64::new(target, 0.0)).norm());
        }
    }
    Ok(GramReport {
        dim,
        values,
        max_identity_deviation,
    })
}

/// Expansion of f over {Ψ_{2n+γ}, |n| ≤ n_max}: coefficients, partial sum
/// of |c_n|², the independently integrated ‖f‖², and their gap.
#[derive(Clone, Debug)]
pub struct ParsevalReport {
    pub coefficients: Vec<Complex64>,
    pub partial_sum: f64,
    pub norm_sq: f64,
    /// norm_sq − partial_sum; nonnegative up to quadrature error.
    pub defect: f64,
    pub n_max: i64,
}

impl ParsevalReport {
    pub fn coefficient(&self, n: i64) -> Complex64 {
        self.coefficients[(n + self.n_max) as usize]
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,re,im,abs_sq\n");
        for (k, c) in self.coefficients.iter().enumerate() {
            let n = k as i64 - self.n_max;
            out.push_str(&format!(
                "{n},{:.16e},{:.16e},{:.16e}\n",
                c.re,
                c.im,
                c.norm_sqr()
            ));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "n_max": self.n_max,
            "partial_sum": self.partial_sum,
            "norm_sq": self.norm_sq,
            "defect": self.defect,
            "coefficients": self
                .coefficients
                .iter()
                .map(|z| json!([z.re, z.im]))
                .collect::<Vec<_>>(),
        })
    }
}

/// Coefficients c_n = (Ψ_{2n+γ}, f) computed in the compact angle variable:
/// with p = arcsinh(tan(θ/2)) each coefficient becomes
/// (1/(2√π)) ∫ f(p(θ))·cos(θ/2)^{−1/2}·e^{i(γ/2 + n)θ} dθ over [−π, π].
/// The partial sum Σ|c_n|² is accumulated in fixed n order so parallel
/// coefficient evaluation cannot change the reported total.
pub fn parseval_check(
    f: impl Fn(f64) -> Complex64 + Send + Sync,
    gamma: f64,
    n_max: i64,
    spec: &QuadratureSpec,
) -> Result<ParsevalReport> {
    if n_max < 0 {
        return Err(Error::domain("coefficient range must be nonnegative"));
    }
    let count = (2 * n_max + 1) as usize;
    let theta_spec = QuadratureSpec::theta().with_tol(spec.abs_tol);
    let computed = exec::map_indexed(count, |k| {
        let n = k as i64 - n_max;
        integrate_theta(
            |theta| {
                let p = (0.5 * theta).tan().asinh();
                let weight = (0.5 * theta).cos().powf(-0.5);
                let phase =
                    Complex64::from_polar(1.0, (0.5 * gamma + n as f64) * theta);
                f(p) * weight * phase * (0.5 * INV_SQRT_PI)
            },
            &theta_spec,
        )
        .map(|integral| integral.value)
    });
    let coefficients = computed.into_iter().collect::<Result<Vec<_>>>()?;
    let partial_sum = coefficients.iter().map(|c| c.norm_sqr()).sum::<f64>();
    let line_spec = QuadratureSpec::real_line().with_tol(spec.abs_tol);
    let norm_sq = integrate_real_line(|p| Complex64::new(f(p).norm_sqr(), 0.0), &line_spec)?
        .value
        .re;
    Ok(ParsevalReport {
        coefficients,
        partial_sum,
        norm_sq,
        defect: norm_sq - partial_sum,
        n_max,
    })
}

/// Ratio of the two limits of √(cosh p)·Ψ_λ(p), probed at ±p_probe; its
/// argument labels which self-adjoint extension the family belongs to and
/// equals πγ mod 2π in the limit.
pub fn extension_boundary_ratio(lambda: f64, p_probe: f64) -> Complex64 {
    let at = |p: f64| psi(lambda, p) * Complex64::new(p.cosh().sqrt(), 0.0);
    at(-p_probe) / at(p_probe)
}

/// A smooth (or piecewise-smooth) test function with known derivative and
/// declared support, for probing the symmetry of K.
#[derive(Clone)]
pub struct TestFunction {
    pub value: Arc<dyn Fn(f64) -> Complex64 + Send + Sync>,
    pub derivative: Arc<dyn Fn(f64) -> Complex64 + Send + Sync>,
    pub support: (f64, f64),
}

impl std::fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TestFunction")
            .field("support", &self.support)
            .finish_non_exhaustive()
    }
}

impl TestFunction {
    /// The standard C^∞ bump e^{−1/(1−u²)} on |u| < 1, u = (p−c)/w.
    pub fn bump(center: f64, half_width: f64) -> Self {
        assert!(half_width > 0.0, "bump needs positive width");
        let w = half_width;
        let value = move |p: f64| -> Complex64 {
            let u = (p - center) / w;
            if u.abs() >= 1.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new((-1.0 / (1.0 - u * u)).exp(), 0.0)
            }
        };
        let derivative = move |p: f64| -> Complex64 {
            let u = (p - center) / w;
            if u.abs() >= 1.0 {
                Complex64::new(0.0, 0.0)
            } else {
                let denom = 1.0 - u * u;
                Complex64::new((-1.0 / denom).exp() * (-2.0 * u / (denom * denom)) / w, 0.0)
            }
        };
        TestFunction {
            value: Arc::new(value),
            derivative: Arc::new(derivative),
            support: (center - half_width, center + half_width),
        }
    }

    /// The same bump carrying a plane-wave phase e^{iωp}, so the test
    /// function is genuinely complex-valued.
    pub fn modulated_bump(center: f64, half_width: f64, omega: f64) -> Self {
        let base = TestFunction::bump(center, half_width);
        let v = base.value.clone();
        let d = base.derivative.clone();
        let value = move |p: f64| v(p) * Complex64::from_polar(1.0, omega * p);
        let dv = base.value.clone();
        let derivative = move |p: f64| {
            (d(p) + dv(p) * Complex64::new(0.0, omega)) * Complex64::from_polar(1.0, omega * p)
        };
        TestFunction {
            value: Arc::new(value),
            derivative: Arc::new(derivative),
            support: base.support,
        }
    }

    /// Ψ_λ restricted to |p| ≤ cutoff. The declared derivative ignores the
    /// jump at the cutoff, which is exactly what makes the symmetry defect
    /// pick up the boundary term.
    pub fn truncated_psi(lambda: f64, cutoff: f64) -> Self {
        assert!(cutoff > 0.0, "cutoff must be positive");
        TestFunction {
            value: Arc::new(move |p: f64| psi(lambda, p)),
            derivative: Arc::new(move |p: f64| psi_derivative(lambda, p)),
            support: (-cutoff, cutoff),
        }
    }

    fn k_action(&self, p: f64) -> Complex64 {
        Complex64::new(0.0, 0.5)
            * ((self.value)(p) * p.sinh() + (self.derivative)(p) * 2.0 * p.cosh())
    }
}

/// (f, Kg) − (Kf, g) integrated over the union of the declared supports.
/// Zero (to quadrature accuracy) for genuinely compactly supported smooth
/// functions; for truncated ones it reproduces the boundary term
/// i·cosh(p)·conj(f)·g evaluated across the cut.
pub fn symmetry_defect(
    f: &TestFunction,
    g: &TestFunction,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    let lo = f.support.0.min(g.support.0);
    let hi = f.support.1.max(g.support.1);
    let truncation = lo.abs().max(hi.abs());
    let spec = spec.clone().with_truncation(truncation);
    let integral = integrate_real_line(
        |p| (f.value)(p).conj() * g.k_action(p) - f.k_action(p).conj() * (g.value)(p),
        &spec,
    )?;
    Ok(integral.value)
}
