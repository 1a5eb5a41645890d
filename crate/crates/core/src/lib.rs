//! Spectral construction of weak solutions and bounded right inverses for
//! constant-coefficient operators on Gaussian-weighted L² spaces.
//!
//! The real line carries the weight `e^{-x²}` and the physicists' Hermite
//! basis; the complex plane carries `e^{-|z|²}` and the complex (Itô)
//! Hermite basis. In both bases the differential operators `D^k`, `∂̄^k`
//! and `∂^k∂̄^k` are weighted lowering shifts, so every operator
//! `α·A + c` becomes a two-band coefficient map whose minimal-norm right
//! inverse is computed chain by chain.
//!
//! Modules:
//! - [`quadrature`]: Gauss–Hermite and Gauss–Legendre rules.
//! - [`hermite_real`], [`hermite_complex`]: bases, transforms, lowering maps.
//! - [`operator`]: operator specs, minimal-norm solves, right inverses,
//!   operator-norm estimates and the commutator certificate.
//! - [`weights`]: scaled-weight and bounded-domain transports.
//! - [`convex`]: first-order equation with a strictly convex weight.
//! - [`coeff_io`]: coefficient CSV files.

pub mod coeff_io;
pub mod convex;
pub mod error;
pub mod hermite_complex;
pub mod hermite_real;
pub mod operator;
pub mod quadrature;
pub mod sampling;
pub mod weights;

pub use error::{Error, Result};
pub use hermite_complex::ComplexCoeffs;
pub use hermite_real::RealCoeffs;
pub use operator::{Coeffs, Family, OperatorSpec, RightInverse, SolveResult};
pub use quadrature::{QuadRule1D, QuadRule2D};
