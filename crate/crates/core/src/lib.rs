//! Numerics for locally harmonic Maass forms attached to binary quadratic forms.
//!
//! The crate evaluates the cusp forms `f_D`, the locally harmonic forms `F_D`, the
//! non-holomorphic pieces `G_D`, the generating functions `Ω`, `Ψ`, `Ψ*`, `Ψ̂` and the
//! theta kernels `Θ`, `Θ*` as truncated lattice sums with explicit tail bounds, and
//! checks their transformation laws and differential equations numerically.
//!
//! Module map:
//! - [`qforms`]: integral binary quadratic forms, enumeration, tail bounds.
//! - [`specfun`]: error function, `Γ(1/2; w)`, `ψ_k`, `g_k`, quadrature.
//! - [`forms`]: series evaluators and Fourier coefficient extraction.
//! - [`operators`]: slash operators, lowering, `ξ`, Laplacian, Vignéras operators.
//! - [`holproj`]: holomorphic projection by coefficients and by kernel integration.
//! - [`verify`]: the identity catalog and report generation.

pub mod error;
pub mod forms;
pub mod holproj;
pub mod operators;
pub mod qforms;
pub mod scalar;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Real scalar used by all transcendental routines.
pub type Real = f64;
/// Complex scalar used by all series evaluators.
pub type Complex = num_complex::Complex<f64>;
/// Exact scalar for the algebraic identities.
pub type Rational = num_rational::Rational64;

/// Upper half-plane point with `f64` coordinates.
pub type Point = qforms::HPoint<f64>;
