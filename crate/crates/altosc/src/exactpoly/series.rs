//! Truncated formal power series over the rationals, used to cross-check the
//! W_n family against its closed-form generating function
//! (1 + t²)^{−1/2} · exp(2x·arctan t).

use num::{BigInt, BigRational, One, Zero};

use super::rational::GaussianRational;
use super::wfamily::w_poly;

fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Coefficients of arctan t = t − t³/3 + t⁵/5 − … through t^order.
pub fn arctan_coefficients(order: usize) -> Vec<BigRational> {
    let mut coeffs = vec![BigRational::zero(); order + 1];
    let mut sign = 1i64;
    let mut j = 1usize;
    while j <= order {
        coeffs[j] = ratio(sign, j as i64);
        sign = -sign;
        j += 2;
    }
    coeffs
}

/// Coefficients of (1 + t²)^{−1/2} = Σ (−1)^k ((2k−1)!!/(2k)!!) t^{2k}
/// through t^order, built by the ratio recurrence between consecutive terms.
pub fn inv_sqrt_coefficients(order: usize) -> Vec<BigRational> {
    let mut coeffs = vec![BigRational::zero(); order + 1];
    coeffs[0] = BigRational::one();
    let mut current = BigRational::one();
    let mut k = 1i64;
    while 2 * (k as usize) <= order {
        current *= ratio(-(2 * k - 1), 2 * k);
        coeffs[2 * k as usize] = current.clone();
        k += 1;
    }
    coeffs
}

/// exp of a series with zero constant term, via the derivative recurrence
/// e_n = (1/n) Σ_{k=1}^{n} k·g_k·e_{n−k}.
pub fn exp_coefficients(g: &[BigRational], order: usize) -> Vec<BigRational> {
    assert!(
        g.first().is_none_or(BigRational::is_zero),
        "exp needs a zero constant term"
    );
    let mut e = vec![BigRational::zero(); order + 1];
    e[0] = BigRational::one();
    for n in 1..=order {
        let mut acc = BigRational::zero();
        for k in 1..=n.min(g.len().saturating_sub(1)) {
            acc += ratio(k as i64, 1) * &g[k] * &e[n - k];
        }
        e[n] = acc / ratio(n as i64, 1);
    }
    e
}

/// Cauchy product truncated to t^order.
pub fn product_coefficients(
    a: &[BigRational],
    b: &[BigRational],
    order: usize,
) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); order + 1];
    for (i, ai) in a.iter().enumerate().take(order + 1) {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(order + 1 - i) {
            if bj.is_zero() {
                continue;
            }
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Taylor coefficients in t, through t^order, of
/// (1 + t²)^{−1/2} · exp(2·x0·arctan t) for a fixed rational x0.
pub fn generating_coefficients(x0: &BigRational, order: usize) -> Vec<BigRational> {
    let two_x0 = ratio(2, 1) * x0;
    let scaled_arctan: Vec<BigRational> = arctan_coefficients(order)
        .into_iter()
        .map(|c| c * &two_x0)
        .collect();
    let exp_part = exp_coefficients(&scaled_arctan, order);
    product_coefficients(&inv_sqrt_coefficients(order), &exp_part, order)
}

/// True iff the t^k coefficient of the generating function equals
/// W_k(x0)/k! for every k ≤ order, as an exact rational identity.
pub fn generating_check(x0: &BigRational, order: usize) -> bool {
    let coeffs = generating_coefficients(x0, order);
    let mut factorial = BigRational::one();
    for (k, coeff) in coeffs.iter().enumerate() {
        if k > 0 {
            factorial *= ratio(k as i64, 1);
        }
        let w_at = w_poly(k).eval(&GaussianRational::real(x0.clone()));
        if !w_at.im.is_zero() || w_at.re != coeff * &factorial {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arctan_series_leading_terms() {
        let c = arctan_coefficients(7);
        assert_eq!(c[0], ratio(0, 1));
        assert_eq!(c[1], ratio(1, 1));
        assert_eq!(c[2], ratio(0, 1));
        assert_eq!(c[3], ratio(-1, 3));
        assert_eq!(c[5], ratio(1, 5));
        assert_eq!(c[7], ratio(-1, 7));
    }

    #[test]
    fn inv_sqrt_series_leading_terms() {
        let c = inv_sqrt_coefficients(6);
        assert_eq!(c[0], ratio(1, 1));
        assert_eq!(c[2], ratio(-1, 2));
        assert_eq!(c[4], ratio(3, 8));
        assert_eq!(c[6], ratio(-5, 16));
        assert_eq!(c[1], ratio(0, 1));
    }

    #[test]
    fn exp_of_t_matches_factorials() {
        let mut g = vec![BigRational::zero(); 7];
        g[1] = BigRational::one();
        let e = exp_coefficients(&g, 6);
        assert_eq!(e[0], ratio(1, 1));
        assert_eq!(e[1], ratio(1, 1));
        assert_eq!(e[2], ratio(1, 2));
        assert_eq!(e[3], ratio(1, 6));
        assert_eq!(e[6], ratio(1, 720));
    }

    #[test]
    fn product_is_convolution() {
        // (1 + t)(1 − t + t²) = 1 + t³ truncated at order 2 drops the t³ term
        let a = vec![ratio(1, 1), ratio(1, 1)];
        let b = vec![ratio(1, 1), ratio(-1, 1), ratio(1, 1)];
        let p = product_coefficients(&a, &b, 2);
        assert_eq!(p, vec![ratio(1, 1), ratio(0, 1), ratio(0, 1)]);
        let full = product_coefficients(&a, &b, 3);
        assert_eq!(full[3], ratio(1, 1));
    }

    #[test]
    fn generating_series_at_origin() {
        // x0 = 0 leaves only (1+t²)^{−1/2}: 1, 0, −1/2, 0, 3/8
        let c = generating_coefficients(&ratio(0, 1), 4);
        assert_eq!(
            c,
            vec![ratio(1, 1), ratio(0, 1), ratio(-1, 2), ratio(0, 1), ratio(3, 8)]
        );
    }

    #[test]
    fn generating_series_at_one() {
        // W_n(1) = 1, 2, 3, −2 so the coefficients are 1, 2, 3/2, −1/3
        let c = generating_coefficients(&ratio(1, 1), 3);
        assert_eq!(c[0], ratio(1, 1));
        assert_eq!(c[1], ratio(2, 1));
        assert_eq!(c[2], ratio(3, 2));
        assert_eq!(c[3], ratio(-1, 3));
    }

    #[test]
    fn generating_check_various_points() {
        assert!(generating_check(&ratio(0, 1), 12));
        assert!(generating_check(&ratio(1, 1), 12));
        assert!(generating_check(&ratio(-3, 7), 10));
        assert!(generating_check(&ratio(22, 5), 8));
    }

    #[test]
    fn generating_check_detects_corruption() {
        // sanity guard on the checker itself: a wrong target must fail, so
        // compare against W_k evaluated at a different point
        let coeffs = generating_coefficients(&ratio(1, 2), 6);
        let w3_elsewhere = w_poly(3).eval(&GaussianRational::from_ratio(1, 3));
        let claimed = &coeffs[3] * ratio(6, 1);
        assert_ne!(w3_elsewhere.re, claimed);
    }
}
