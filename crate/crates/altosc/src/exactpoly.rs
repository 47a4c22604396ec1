//! Exact arithmetic over polynomials with Gaussian-rational coefficients.
//!
//! Carries the orthogonal family W_n (recurrence W_{n+1} + n²W_{n−1} = 2xW_n),
//! the difference operator h f = ½(½−ix)f(x+i) + ½(½+ix)f(x−i), the ladder
//! operator R f = (i/2)(½−ix)f(x+i) − (i/2)(½+ix)f(x−i) + xf, and exact
//! verification of their algebra ([h,R] = R, hW_n = (n+½)W_n, RW_n = W_{n+1}).

pub mod poly;
pub mod rational;
pub mod series;
pub mod wfamily;

pub use poly::GaussianRationalPoly;
pub use rational::GaussianRational;
pub use series::generating_check;
pub use wfamily::{apply_h, apply_r, commutator_residual, w_poly, WFamily};
