//! Operatorial classical mechanics in the Koopman-von Neumann picture.
//!
//! The crate is layered bottom-up:
//!
//! * [`grassmann`] realizes the anticommuting `c`, `c̄` operators as sparse
//!   matrices on the `2^(2n)`-dimensional form sector.
//! * [`cartan`] builds differential operators (exterior derivative,
//!   contractions, Lie derivatives, charges) with polynomial coefficients.
//! * [`epb`] is a symbolic superalgebra with the extended Poisson bracket,
//!   the hat map and the Schouten/Frölicher/Nijenhuis-Richardson brackets.
//! * [`metric`] constructs the candidate scalar products on the form sector
//!   and tests hermiticity of the evolution operator.
//! * [`dynamics`] propagates classical and quantum waves on grids.
//! * [`gauge`] covers minimal coupling, the Landau problem and the
//!   Aharonov-Bohm spectra.

pub mod cartan;
pub mod dynamics;
pub mod epb;
mod error;
pub mod gauge;
pub mod grassmann;
pub mod metric;
pub mod numerics;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Imaginary unit.
pub const I: C64 = C64 { re: 0.0, im: 1.0 };
