//! Dense univariate polynomials with Gaussian-rational coefficients.

use num::{BigInt, BigRational, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};

use super::rational::GaussianRational;

/// coeffs[k] is the coefficient of x^k; the vector carries no trailing zeros,
/// so the zero polynomial has an empty vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaussianRationalPoly {
    coeffs: Vec<GaussianRational>,
}

impl GaussianRationalPoly {
    pub fn zero() -> Self {
        GaussianRationalPoly { coeffs: vec![] }
    }

    pub fn from_coeffs(mut coeffs: Vec<GaussianRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        GaussianRationalPoly { coeffs }
    }

    /// Polynomial from integer coefficients, constant term first.
    pub fn from_integers(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| GaussianRational::from_integer(c)).collect())
    }

    pub fn constant(c: GaussianRational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The monomial x.
    pub fn x() -> Self {
        Self::from_coeffs(vec![GaussianRational::zero(), GaussianRational::one()])
    }

    pub fn coeffs(&self) -> &[GaussianRational] {
        &self.coeffs
    }

    /// Coefficient of x^k (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> GaussianRational {
        self.coeffs.get(k).cloned().unwrap_or_else(GaussianRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_real(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_real())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| &self.coeff(k) + &other.coeff(k)).collect();
        Self::from_coeffs(coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| &self.coeff(k) - &other.coeff(k)).collect();
        Self::from_coeffs(coeffs)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![GaussianRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Self::from_coeffs(out)
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn neg(&self) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|a| -a).collect())
    }

    /// Exact evaluation by Horner's rule.
    pub fn eval(&self, z: &GaussianRational) -> GaussianRational {
        let mut acc = GaussianRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * z) + c;
        }
        acc
    }

    /// Exact Taylor shift: returns q with q(x) = self(x + c). Built by the
    /// Horner-style rewrite q = (…(a_n·(x+c) + a_{n−1})·(x+c) + …) + a_0.
    pub fn shift(&self, c: &GaussianRational) -> Self {
        let mut acc: Vec<GaussianRational> = vec![];
        for a in self.coeffs.iter().rev() {
            // acc ← acc·(x + c) + a
            let mut next = vec![GaussianRational::zero(); acc.len() + 1];
            for (k, q) in acc.iter().enumerate() {
                next[k + 1] = &next[k + 1] + q;
                next[k] = &next[k] + &(q * c);
            }
            if next.is_empty() {
                next.push(a.clone());
            } else {
                next[0] = &next[0] + a;
            }
            acc = next;
        }
        Self::from_coeffs(acc)
    }

    /// Largest |re|+|im| over all coefficients, exact.
    pub fn max_coeff_l1(&self) -> BigRational {
        self.coeffs
            .iter()
            .map(|c| c.l1_norm())
            .max()
            .unwrap_or_else(BigRational::zero)
    }

    /// Evaluate with f64 coefficients at an f64 point (for plotting-grade
    /// uses only; verification paths keep exact or double-double forms).
    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + rational_to_f64(&c.re);
        }
        acc
    }

    /// JSON form: a list of coefficients, constant term first, each a pair of
    /// numerator/denominator decimal strings for the real and imaginary parts.
    pub fn to_json(&self) -> Value {
        let coeffs: Vec<Value> = self
            .coeffs
            .iter()
            .map(|c| {
                json!({
                    "re": [c.re.numer().to_string(), c.re.denom().to_string()],
                    "im": [c.im.numer().to_string(), c.im.denom().to_string()],
                })
            })
            .collect();
        json!(coeffs)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::domain("polynomial JSON must be an array"))?;
        let mut coeffs = Vec::with_capacity(arr.len());
        for item in arr {
            let parse_part = |key: &str| -> Result<BigRational> {
                let pair = item
                    .get(key)
                    .and_then(Value::as_array)
                    .ok_or_else(|| Error::domain(format!("coefficient missing '{key}' pair")))?;
                let [numer, denom] = pair.as_slice() else {
                    return Err(Error::domain("coefficient pair must have two entries"));
                };
                let parse = |v: &Value| -> Result<BigInt> {
                    v.as_str()
                        .and_then(|s| s.parse::<BigInt>().ok())
                        .ok_or_else(|| Error::domain("coefficient entries must be integer strings"))
                };
                Ok(BigRational::new(parse(numer)?, parse(denom)?))
            };
            coeffs.push(GaussianRational::new(parse_part("re")?, parse_part("im")?));
        }
        Ok(Self::from_coeffs(coeffs))
    }
}

/// Exact-rational to f64 via the num conversion (rounds once).
pub fn rational_to_f64(r: &BigRational) -> f64 {
    use num::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gr(n: i64) -> GaussianRational {
        GaussianRational::from_integer(n)
    }

    #[test]
    fn shift_of_x_by_i_adds_i() {
        let p = GaussianRationalPoly::x();
        let q = p.shift(&GaussianRational::i());
        assert_eq!(q.coeff(0), GaussianRational::i());
        assert_eq!(q.coeff(1), gr(1));
        assert_eq!(q.degree(), Some(1));
    }

    #[test]
    fn shift_of_x_squared_by_minus_i() {
        // (x − i)² = x² − 2ix − 1
        let p = GaussianRationalPoly::x().mul(&GaussianRationalPoly::x());
        let q = p.shift(&(-&GaussianRational::i()));
        assert_eq!(q.coeff(0), gr(-1));
        assert_eq!(q.coeff(1), &gr(-2) * &GaussianRational::i());
        assert_eq!(q.coeff(2), gr(1));
    }

    #[test]
    fn zero_shift_is_identity() {
        let p = GaussianRationalPoly::from_integers(&[-1, 0, 4]);
        assert_eq!(p.shift(&GaussianRational::zero()), p);
    }

    #[test]
    fn shift_composes_with_eval() {
        // q(x) = p(x+c) means q(1) = p(1+c)
        let p = GaussianRationalPoly::from_integers(&[3, -2, 0, 5]);
        let c = GaussianRational::new(
            BigRational::new(BigInt::from(2), BigInt::from(3)),
            BigRational::new(BigInt::from(-1), BigInt::from(7)),
        );
        let q = p.shift(&c);
        let at = gr(1);
        let lhs = q.eval(&at);
        let rhs = p.eval(&(&at + &c));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn mul_degrees_add() {
        let p = GaussianRationalPoly::from_integers(&[1, 1]);
        let q = GaussianRationalPoly::from_integers(&[-1, 1]);
        let prod = p.mul(&q);
        assert_eq!(prod, GaussianRationalPoly::from_integers(&[-1, 0, 1]));
    }

    #[test]
    fn trailing_zeros_are_trimmed() {
        let p = GaussianRationalPoly::from_coeffs(vec![gr(2), gr(0), gr(0)]);
        assert_eq!(p.degree(), Some(0));
        let z = GaussianRationalPoly::from_coeffs(vec![gr(0)]);
        assert!(z.is_zero());
        assert_eq!(z.degree(), None);
    }

    #[test]
    fn json_roundtrip_preserves_exact_values() {
        let p = GaussianRationalPoly::from_coeffs(vec![
            GaussianRational::from_ratio(-7, 3),
            GaussianRational::new(
                BigRational::new(BigInt::from(1), BigInt::from(2)),
                BigRational::new(BigInt::from(9), BigInt::from(4)),
            ),
        ]);
        let v = p.to_json();
        let q = GaussianRationalPoly::from_json(&v).unwrap();
        assert_eq!(p, q);
    }
}
