//! Discrete Fourier transform: unnormalized forward, `1/n` inverse.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::{Point, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Planned forward/inverse transforms for one length.
#[derive(Clone)]
pub struct FourierTransform<R: Real> {
    len: usize,
    forward: Arc<dyn Fft<R>>,
    inverse: Arc<dyn Fft<R>>,
}

impl<R: Real> fmt::Debug for FourierTransform<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FourierTransform")
            .field("len", &self.len)
            .finish()
    }
}

impl<R: Real> FourierTransform<R> {
    pub fn new(len: usize) -> Self {
        assert!(len > 0, "transform length must be positive");
        let mut planner = FftPlanner::new();
        Self {
            len,
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Transforms `buf` in place.
    pub fn process(&self, buf: &mut [Complex<R>], direction: Direction) {
        assert_eq!(buf.len(), self.len, "transform length mismatch");
        match direction {
            Direction::Forward => self.forward.process(buf),
            Direction::Inverse => {
                self.inverse.process(buf);
                let scale = R::one() / R::from_usize(self.len).expect("length fits");
                for v in buf.iter_mut() {
                    *v = *v * scale;
                }
            }
        }
    }
}

/// One-shot transform of a complex point.
pub fn dft<R: Real>(x: &Point<Complex<R>>, direction: Direction) -> Point<Complex<R>> {
    let mut buf = x.as_slice().to_vec();
    FourierTransform::new(x.dim()).process(&mut buf, direction);
    Point::from_vec(buf)
}
