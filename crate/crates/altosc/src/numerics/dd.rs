//! Minimal double-double arithmetic (~106-bit significand).
//!
//! The sech-weight Gram integrals reach magnitudes near (n!)² with exact
//! cancellation down to zero, so plain f64 evaluation of the polynomial
//! integrand loses the answer in roundoff. Carrying the polynomial Horner
//! loop and the panel accumulation in double-double keeps the final error at
//! the level of a single rounding of the function values, two orders of
//! magnitude below the acceptance floor.
//!
//! Error-free transforms follow Dekker/Knuth; products use FMA.

use num::{BigRational, ToPrimitive};

/// Unevaluated sum `hi + lo` with |lo| ≤ ulp(hi)/2.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

/// π to double-double precision.
pub const DD_PI: Dd = Dd {
    hi: std::f64::consts::PI,
    lo: 1.2246467991473532e-16,
};

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = a.mul_add(b, -p);
    (p, err)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    /// Round an exact rational to double-double: `hi` is the f64 rounding,
    /// `lo` the f64 rounding of the remainder.
    pub fn from_big_rational(r: &BigRational) -> Dd {
        let hi = r.to_f64().unwrap_or(f64::NAN);
        if !hi.is_finite() {
            return Dd { hi, lo: 0.0 };
        }
        let rem = r - &BigRational::from_float(hi).expect("finite hi");
        Dd {
            hi,
            lo: rem.to_f64().unwrap_or(0.0),
        }
    }

    #[inline]
    pub fn add(self, other: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, other.hi);
        let e = e + self.lo + other.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn sub(self, other: Dd) -> Dd {
        self.add(Dd {
            hi: -other.hi,
            lo: -other.lo,
        })
    }

    #[inline]
    pub fn mul(self, other: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, other.hi);
        let e = e + self.hi * other.lo + self.lo * other.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn mul_f64(self, x: f64) -> Dd {
        let (p, e) = two_prod(self.hi, x);
        let e = e + self.lo * x;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn div(self, other: Dd) -> Dd {
        let q1 = self.hi / other.hi;
        let r = self.sub(other.mul_f64(q1));
        let q2 = r.hi / other.hi;
        let r2 = r.sub(other.mul_f64(q2));
        let q3 = r2.hi / other.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add(Dd::from_f64(q3))
    }

    pub fn powi(self, n: u32) -> Dd {
        let mut acc = Dd::ONE;
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

/// Horner evaluation of a double-double polynomial at an f64 point.
#[inline]
pub fn horner_dd(coeffs: &[Dd], x: f64) -> Dd {
    let mut acc = Dd::ZERO;
    for c in coeffs.iter().rev() {
        acc = acc.mul_f64(x).add(*c);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigInt;

    #[test]
    fn pi_split_is_consistent() {
        // hi + lo reproduces π to beyond f64: check (hi + lo) rounds to hi
        // and that lo captures the tail sin(hi) ≈ π − hi.
        assert_eq!(DD_PI.hi + DD_PI.lo, DD_PI.hi);
        assert!((DD_PI.hi.sin() - DD_PI.lo).abs() < 1e-30);
    }

    #[test]
    fn add_mul_against_rationals() {
        let a = BigRational::new(BigInt::from(1), BigInt::from(3));
        let b = BigRational::new(BigInt::from(10_000_001), BigInt::from(7));
        let da = Dd::from_big_rational(&a);
        let db = Dd::from_big_rational(&b);
        let sum = Dd::from_big_rational(&(&a + &b));
        let prod = Dd::from_big_rational(&(&a * &b));
        let got_sum = da.add(db);
        let got_prod = da.mul(db);
        assert!((got_sum.hi - sum.hi).abs() <= f64::EPSILON * sum.hi.abs());
        assert!((got_prod.hi - prod.hi).abs() <= f64::EPSILON * prod.hi.abs());
        // lo parts agree to double-double precision
        assert!((got_sum.to_f64() - sum.to_f64()).abs() <= 1e-22 * sum.hi.abs());
        assert!((got_prod.to_f64() - prod.to_f64()).abs() <= 1e-22 * prod.hi.abs());
    }

    #[test]
    fn div_recovers_exact_ratio() {
        let a = Dd::from_f64(1.0);
        let b = Dd::from_f64(3.0);
        let q = a.div(b);
        // 1/3 in double-double: hi is the f64 rounding, lo the correction
        let third = BigRational::new(BigInt::from(1), BigInt::from(3));
        let want = Dd::from_big_rational(&third);
        assert_eq!(q.hi, want.hi);
        assert!((q.lo - want.lo).abs() < 1e-32);
    }

    #[test]
    fn horner_matches_exact_eval() {
        // p(x) = 1 − x² + x⁴/8 at x = 1.5, exact rational oracle
        let coeffs = [
            Dd::from_f64(1.0),
            Dd::ZERO,
            Dd::from_f64(-1.0),
            Dd::ZERO,
            Dd::from_f64(0.125),
        ];
        let got = horner_dd(&coeffs, 1.5).to_f64();
        let want = 1.0 - 2.25 + 5.0625 / 8.0;
        assert!((got - want).abs() < 1e-16);
    }

    #[test]
    fn big_rational_roundtrip_splits_large_values() {
        // (19!!)² overflows the f64 integer range; hi+lo must still carry it
        let big = BigInt::from(654_729_075u64) * BigInt::from(654_729_075u64) * BigInt::from(1024);
        let r = BigRational::from(big.clone());
        let d = Dd::from_big_rational(&r);
        let back = BigRational::from_float(d.hi).unwrap() + BigRational::from_float(d.lo).unwrap();
        assert_eq!(back, r);
    }
}
