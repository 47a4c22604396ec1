//! The W_n polynomial family and its operator algebra, all in exact
//! arithmetic.

use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};

use super::poly::GaussianRationalPoly;
use super::rational::GaussianRational;

/// Cache of W_0, W_1, … extended on demand through the three-term recurrence
/// W_{n+1} = 2x·W_n − n²·W_{n−1} seeded by W_0 = 1, W_1 = 2x.
#[derive(Debug, Default)]
pub struct WFamily {
    cache: Vec<GaussianRationalPoly>,
}

impl WFamily {
    pub fn new() -> Self {
        WFamily { cache: vec![] }
    }

    pub fn get(&mut self, n: usize) -> GaussianRationalPoly {
        while self.cache.len() <= n {
            let next = match self.cache.len() {
                0 => GaussianRationalPoly::from_integers(&[1]),
                1 => GaussianRationalPoly::from_integers(&[0, 2]),
                k => {
                    let two_x = GaussianRationalPoly::from_integers(&[0, 2]);
                    let n_sq = GaussianRational::from_integer(((k - 1) * (k - 1)) as i64);
                    two_x
                        .mul(&self.cache[k - 1])
                        .sub(&self.cache[k - 2].scale(&n_sq))
                }
            };
            self.cache.push(next);
        }
        self.cache[n].clone()
    }
}

/// Exact W_n from a process-wide cache (guarded, so concurrent sweeps are
/// race-free and deterministic).
pub fn w_poly(n: usize) -> GaussianRationalPoly {
    static CACHE: OnceLock<Mutex<WFamily>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(WFamily::new()));
    cache.lock().expect("w_poly cache lock").get(n)
}

/// ½(½ − ix) f(x+i) + ½(½ + ix) f(x−i), exactly. Real input gives real
/// output (the imaginary parts cancel term by term).
pub fn apply_h(f: &GaussianRationalPoly) -> Result<GaussianRationalPoly> {
    if !f.is_real() {
        return Err(Error::NonRealInput);
    }
    let i = GaussianRational::i();
    let up = f.shift(&i);
    let down = f.shift(&i.conj());
    // ½(½ − ix) = ¼ − (i/2)x and ½(½ + ix) = ¼ + (i/2)x
    let a_up = GaussianRationalPoly::from_coeffs(vec![
        GaussianRational::from_ratio(1, 4),
        GaussianRational::imag_ratio(-1, 2),
    ]);
    let a_down = GaussianRationalPoly::from_coeffs(vec![
        GaussianRational::from_ratio(1, 4),
        GaussianRational::imag_ratio(1, 2),
    ]);
    let out = a_up.mul(&up).add(&a_down.mul(&down));
    debug_assert!(out.is_real(), "h must map real polynomials to real ones");
    Ok(out)
}

/// (i/2)(½ − ix) f(x+i) − (i/2)(½ + ix) f(x−i) + x·f(x), exactly.
pub fn apply_r(f: &GaussianRationalPoly) -> Result<GaussianRationalPoly> {
    if !f.is_real() {
        return Err(Error::NonRealInput);
    }
    let i = GaussianRational::i();
    let up = f.shift(&i);
    let down = f.shift(&i.conj());
    // (i/2)(½ − ix) = i/4 + x/2 and −(i/2)(½ + ix) = −i/4 + x/2
    let b_up = GaussianRationalPoly::from_coeffs(vec![
        GaussianRational::imag_ratio(1, 4),
        GaussianRational::from_ratio(1, 2),
    ]);
    let b_down = GaussianRationalPoly::from_coeffs(vec![
        GaussianRational::imag_ratio(-1, 4),
        GaussianRational::from_ratio(1, 2),
    ]);
    let x_f = GaussianRationalPoly::x().mul(f);
    let out = b_up.mul(&up).add(&b_down.mul(&down)).add(&x_f);
    debug_assert!(out.is_real(), "R must map real polynomials to real ones");
    Ok(out)
}

/// (h∘R − R∘h − R) f — the zero polynomial for every real-coefficient f.
pub fn commutator_residual(f: &GaussianRationalPoly) -> Result<GaussianRationalPoly> {
    let rf = apply_r(f)?;
    let hf = apply_h(f)?;
    let h_rf = apply_h(&rf)?;
    let r_hf = apply_r(&hf)?;
    Ok(h_rf.sub(&r_hf).sub(&rf))
}
