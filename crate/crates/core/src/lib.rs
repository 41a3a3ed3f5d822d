//! Relaxed Douglas-Rachford operators for feasibility problems.
//!
//! The crate is generic over the scalar type ([`numkit::Scalar`]): real
//! `f32`/`f64` and complex numbers over them. Complex spaces are treated as
//! real Euclidean spaces with inner product `Re <x, y>`.

pub mod analysis;
pub mod engine;
pub mod error;
pub mod io;
pub mod numkit;
pub mod operators;
pub mod problems;
pub mod sets;

pub use error::{Error, Result};

use num_complex::Complex64;

pub type RealPoint = numkit::Point<f64>;
pub type ComplexPoint = numkit::Point<Complex64>;
pub type RealSet = sets::SetSpec<f64>;
pub type ComplexSet = sets::SetSpec<Complex64>;
pub type RealOperator = operators::OperatorSpec<f64>;
pub type ComplexOperator = operators::OperatorSpec<Complex64>;
pub type RealTrace = engine::IterationTrace<f64>;
pub type ComplexTrace = engine::IterationTrace<Complex64>;
