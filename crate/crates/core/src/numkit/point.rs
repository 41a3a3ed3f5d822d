use std::ops::{Add, Index, Neg, Sub};

use num_complex::Complex;
use num_traits::Zero;

use super::Scalar;
use crate::error::{check_dim, Error, Result};

/// A vector in the ambient space.
///
/// Construction through [`Point::new`] rejects empty and non-finite input.
/// Arithmetic between points of different dimension panics; operations that
/// take points from callers check dimensions and return
/// [`Error::DimensionMismatch`] instead.
#[derive(Clone, Debug, PartialEq)]
pub struct Point<S: Scalar> {
    entries: Vec<S>,
}

impl<S: Scalar> Point<S> {
    pub fn new(entries: Vec<S>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidParams(
                "point dimension must be positive".into(),
            ));
        }
        if let Some(index) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { entries })
    }

    /// Wraps entries produced by internal arithmetic without validation.
    pub(crate) fn from_vec(entries: Vec<S>) -> Self {
        debug_assert!(!entries.is_empty());
        Self { entries }
    }

    pub fn from_reals(values: &[f64]) -> Result<Self> {
        Self::new(
            values
                .iter()
                .map(|&v| S::from_real(<S::Real as super::Real>::lit(v)))
                .collect(),
        )
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "point dimension must be positive");
        Self {
            entries: vec![S::zero(); dim],
        }
    }

    /// Standard basis vector `e_index`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut p = Self::zeros(dim);
        p.entries[index] = S::from_real(num_traits::One::one());
        p
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    #[inline]
    pub fn as_slice(&self) -> &[S] {
        &self.entries
    }

    pub fn into_vec(self) -> Vec<S> {
        self.entries
    }

    pub fn iter(&self) -> std::slice::Iter<'_, S> {
        self.entries.iter()
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|v| v.is_finite())
    }

    /// Real inner product `Re <self, other>`.
    pub fn inner(&self, other: &Self) -> S::Real {
        assert_eq!(self.dim(), other.dim(), "inner product dimension mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| (a.conj() * b).re())
            .sum()
    }

    pub fn norm_sqr(&self) -> S::Real {
        self.entries.iter().map(|v| v.modulus_sqr()).sum()
    }

    pub fn norm(&self) -> S::Real {
        num_traits::Float::sqrt(self.norm_sqr())
    }

    pub fn norm_inf(&self) -> S::Real {
        self.entries
            .iter()
            .map(|v| v.modulus())
            .fold(S::Real::zero(), num_traits::Float::max)
    }

    /// Euclidean distance to `other`.
    pub fn distance(&self, other: &Self) -> S::Real {
        assert_eq!(self.dim(), other.dim(), "distance dimension mismatch");
        num_traits::Float::sqrt(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| (a - b).modulus_sqr())
                .sum(),
        )
    }

    pub fn scaled(&self, factor: S::Real) -> Self {
        self.map(|v| v.scale(factor))
    }

    /// `a * x + b * y`.
    pub fn lincomb(a: S::Real, x: &Self, b: S::Real, y: &Self) -> Self {
        assert_eq!(x.dim(), y.dim(), "lincomb dimension mismatch");
        Self::from_vec(
            x.entries
                .iter()
                .zip(&y.entries)
                .map(|(&u, &v)| u.scale(a) + v.scale(b))
                .collect(),
        )
    }

    pub fn map(&self, f: impl FnMut(S) -> S) -> Self {
        Self::from_vec(self.entries.iter().copied().map(f).collect())
    }

    pub fn check_dim(&self, expected: usize) -> Result<()> {
        check_dim(expected, self.dim())
    }

    /// Explicit real-to-complex promotion.
    pub fn to_complex(&self) -> Point<Complex<S::Real>> {
        Point::from_vec(self.entries.iter().map(|v| v.to_complex()).collect())
    }

    /// Real parts of every entry.
    pub fn real_parts(&self) -> Vec<S::Real> {
        self.entries.iter().map(|v| v.re()).collect()
    }

    /// Coordinates in the real embedding (`[re0, im0, re1, im1, ...]` for
    /// complex scalars).
    pub fn embed(&self) -> Vec<S::Real> {
        let mut out = Vec::with_capacity(self.dim() * S::PARTS);
        for v in &self.entries {
            out.push(v.re());
            if S::IS_COMPLEX {
                out.push(v.im());
            }
        }
        out
    }

    /// Inverse of [`Point::embed`].
    pub fn from_embedding(coords: &[S::Real]) -> Result<Self> {
        if coords.is_empty() || coords.len() % S::PARTS != 0 {
            return Err(Error::InvalidParams(format!(
                "embedding length {} is not a positive multiple of {}",
                coords.len(),
                S::PARTS
            )));
        }
        let entries = coords
            .chunks(S::PARTS)
            .map(|c| S::from_parts(c[0], if S::IS_COMPLEX { c[1] } else { S::Real::zero() }))
            .collect();
        Self::new(entries)
    }

    /// Number of entries whose modulus exceeds `threshold`.
    pub fn support_size(&self, threshold: S::Real) -> usize {
        self.entries
            .iter()
            .filter(|v| v.modulus() > threshold)
            .count()
    }
}

impl<S: Scalar> Index<usize> for Point<S> {
    type Output = S;
    fn index(&self, index: usize) -> &S {
        &self.entries[index]
    }
}

impl<S: Scalar> Add for &Point<S> {
    type Output = Point<S>;
    fn add(self, rhs: Self) -> Point<S> {
        assert_eq!(self.dim(), rhs.dim(), "add dimension mismatch");
        Point::from_vec(
            self.entries
                .iter()
                .zip(&rhs.entries)
                .map(|(&a, &b)| a + b)
                .collect(),
        )
    }
}

impl<S: Scalar> Sub for &Point<S> {
    type Output = Point<S>;
    fn sub(self, rhs: Self) -> Point<S> {
        assert_eq!(self.dim(), rhs.dim(), "sub dimension mismatch");
        Point::from_vec(
            self.entries
                .iter()
                .zip(&rhs.entries)
                .map(|(&a, &b)| a - b)
                .collect(),
        )
    }
}

impl<S: Scalar> Neg for &Point<S> {
    type Output = Point<S>;
    fn neg(self) -> Point<S> {
        self.map(|v| -v)
    }
}
