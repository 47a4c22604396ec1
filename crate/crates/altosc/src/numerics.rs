//! Shared numerical engines: adaptive quadrature over the real line and over
//! the transformed interval [−π, π], double-double helpers for ill-conditioned
//! weighted integrals, and fixed/adaptive ODE stepping.

pub mod dd;
pub mod ode;
pub mod quadrature;

pub use ode::{ode_solve, ode_solve_sampled, OdeMethod, OdeOutcome, OdeSolution, OdeSpec};
pub use quadrature::{
    integrate_real_line, integrate_theta, theta_from_p_integrand, Integral, QuadratureSpec, Scheme,
};
