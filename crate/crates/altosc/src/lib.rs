//! Numerical and exact-arithmetic verification of an alternative Hamiltonian
//! model of the harmonic oscillator.
//!
//! The standard model H = p²/2 + V(x) admits an s-equivalent partner
//! H′ = √(2V(x))·cosh p′ whose flow reproduces the same position curves.
//! Quantizing H′ yields a nonlocal difference operator acting at complex
//! shifts x ± i; its momentum representation K has eigenfunctions Ψ_λ and
//! position partners Φ_λ built from polynomials W_n orthogonal under the
//! 1/cosh(πx) weight.
//!
//! Module map:
//! - [`numerics`]: adaptive quadrature (real line and transformed compact
//!   interval) and ODE stepping shared by everything else.
//! - [`exactpoly`]: exact Gaussian-rational polynomial arithmetic; the W_n
//!   family, the difference operator h, the ladder operator R.
//! - [`classical`]: the two classical models, their flows, s-equivalence and
//!   strip-confinement checks.
//! - [`master`]: the second-order equation fixing H′ from the energy relation
//!   and its closed-form / numerical cross-validation.
//! - [`spectral`]: the momentum operator K, eigenfamily Ψ_λ, inner products,
//!   Parseval sums, self-adjoint extension labels.
//! - [`fourier`]: the position family Φ_λ, generating functions, numerical
//!   Fourier transforms, orthogonality integrals and contour identities.
//! - [`exec`]: data-parallel sweep helpers (rayon-backed by default, with a
//!   sequential fallback when the `parallel` feature is disabled).

pub mod classical;
pub mod error;
pub mod exactpoly;
pub mod exec;
pub mod fourier;
pub mod master;
pub mod numerics;
pub mod spectral;

pub use error::{Error, Result};
