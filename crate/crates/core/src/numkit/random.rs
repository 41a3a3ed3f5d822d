//! Seeded random generation. Every generator takes an explicit seed; the
//! stream is ChaCha8, so output is bit-identical across runs.

use num_traits::{Float, FromPrimitive, One, Zero};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{Point, Real, Scalar};
use crate::error::{Error, Result};

/// What [`seeded_random`] should draw.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RandomKind {
    /// i.i.d. standard normal coordinates.
    Gaussian { dim: usize },
    /// Uniform in the closed ball of the given radius around the origin.
    UniformBall { dim: usize, radius: f64 },
    /// `count` distinct indices in `[0, dim)`, sorted ascending.
    SupportPattern { dim: usize, count: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub enum RandomDraw<S: Scalar> {
    Point(Point<S>),
    Indices(Vec<usize>),
}

/// Seeded stream wrapper used by generators and samplers.
#[derive(Clone, Debug)]
pub struct SeededRng {
    rng: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn normal<R: Real>(&mut self) -> R {
        let v: f64 = StandardNormal.sample(&mut self.rng);
        R::lit(v)
    }

    pub fn uniform<R: Real>(&mut self) -> R {
        R::lit(self.rng.random::<f64>())
    }

    pub fn below(&mut self, bound: usize) -> usize {
        self.rng.random_range(0..bound)
    }

    /// Gaussian point; complex scalars get independent real and imaginary parts.
    pub fn gaussian<S: Scalar>(&mut self, dim: usize) -> Result<Point<S>> {
        if dim == 0 {
            return Err(Error::InvalidParams("dimension must be positive".into()));
        }
        let v = (0..dim)
            .map(|_| {
                let re = self.normal();
                let im = if S::IS_COMPLEX {
                    self.normal()
                } else {
                    S::Real::zero()
                };
                S::from_parts(re, im)
            })
            .collect();
        Point::new(v)
    }

    /// Uniform sample from the ball of `radius` in the real embedding.
    pub fn uniform_ball<S: Scalar>(&mut self, dim: usize, radius: S::Real) -> Result<Point<S>> {
        if dim == 0 || !(radius > S::Real::zero()) || !radius.is_finite() {
            return Err(Error::InvalidParams(format!(
                "uniform ball needs dim > 0 and radius > 0 (dim {dim}, radius {radius})"
            )));
        }
        let real_dim = dim * S::PARTS;
        let g: Vec<S::Real> = (0..real_dim).map(|_| self.normal()).collect();
        let norm = super::linalg::norm(&g);
        let u: S::Real = self.uniform();
        let r = radius * u.powf(S::Real::one() / S::Real::from_usize(real_dim).expect("fits"));
        let scale = if norm > S::Real::zero() {
            r / norm
        } else {
            S::Real::zero()
        };
        let coords: Vec<S::Real> = g.into_iter().map(|v| v * scale).collect();
        Point::from_embedding(&coords)
    }

    pub fn support_pattern(&mut self, dim: usize, count: usize) -> Result<Vec<usize>> {
        if dim == 0 || count > dim {
            return Err(Error::InvalidParams(format!(
                "support pattern needs 0 < count <= dim (dim {dim}, count {count})"
            )));
        }
        let mut idx = index::sample(&mut self.rng, dim, count).into_vec();
        idx.sort_unstable();
        Ok(idx)
    }

    pub fn inner(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

/// Single-shot seeded draw.
pub fn seeded_random<S: Scalar>(kind: RandomKind, seed: u64) -> Result<RandomDraw<S>> {
    let mut rng = SeededRng::new(seed);
    match kind {
        RandomKind::Gaussian { dim } => rng.gaussian(dim).map(RandomDraw::Point),
        RandomKind::UniformBall { dim, radius } => rng
            .uniform_ball(dim, S::Real::lit(radius))
            .map(RandomDraw::Point),
        RandomKind::SupportPattern { dim, count } => {
            rng.support_pattern(dim, count).map(RandomDraw::Indices)
        }
    }
}
