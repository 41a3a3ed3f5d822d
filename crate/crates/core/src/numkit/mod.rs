//! Dense numerical kernel: scalars, points, matrices, pseudo-inverse
//! application, discrete Fourier transform and seeded randomness.

mod fourier;
pub mod linalg;
mod matrix;
mod point;
pub mod random;
mod scalar;

pub use fourier::{dft, Direction, FourierTransform};
pub use linalg::{pinv_apply, PseudoInverse};
pub use matrix::DenseMatrix;
pub use point::Point;
pub use random::{seeded_random, RandomDraw, RandomKind, SeededRng};
pub use scalar::{Real, RealScalar, Scalar};
