//! Constraint sets with exact (single-valued, canonical) projectors.

mod flat;
mod prox;

use std::cmp::Ordering;
use std::sync::Arc;

use num_complex::Complex;
use num_traits::{Float, One, Zero};

pub use flat::Flat;
pub use prox::{prox, ProxKind, ProxTerm};

use crate::error::{check_dim, Error, Result};
use crate::numkit::{DenseMatrix, Direction, FourierTransform, Point, PseudoInverse, Real, Scalar};

/// Absolute tolerance for set membership checks.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// Largest dimension for which tied sparsity supports are enumerated.
pub const TIE_ENUMERATION_MAX_DIM: usize = 20;

/// `{x : M x = b}` with `M` of full row rank.
#[derive(Clone, Debug)]
pub struct AffineSystem<S: Scalar> {
    pinv: Arc<PseudoInverse<S::Real>>,
    rhs: Point<S>,
}

impl<S: Scalar> AffineSystem<S> {
    pub fn matrix(&self) -> &DenseMatrix<S::Real> {
        self.pinv.matrix()
    }

    pub fn rhs(&self) -> &Point<S> {
        &self.rhs
    }

    /// `M x - b`.
    pub fn residual(&self, x: &Point<S>) -> Result<Point<S>> {
        let mx = self.matrix().apply_point(x)?;
        Ok(&mx - &self.rhs)
    }

    fn project(&self, x: &Point<S>) -> Result<Point<S>> {
        let correction = self.pinv.apply(&self.residual(x)?)?;
        Ok(x - &correction)
    }
}

impl<S: Scalar> PartialEq for AffineSystem<S> {
    fn eq(&self, other: &Self) -> bool {
        self.matrix() == other.matrix() && self.rhs == other.rhs
    }
}

/// `{p + t u : t real}` with `||u|| = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Line<S: Scalar> {
    point: Point<S>,
    direction: Point<S>,
}

impl<S: Scalar> Line<S> {
    pub fn point(&self) -> &Point<S> {
        &self.point
    }

    pub fn direction(&self) -> &Point<S> {
        &self.direction
    }

    fn project(&self, x: &Point<S>) -> Point<S> {
        let t = self.direction.inner(&(x - &self.point));
        Point::lincomb(S::Real::one(), &self.point, t, &self.direction)
    }
}

/// `{x : ||x||_0 <= s}` in dimension `dim`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sparsity {
    dim: usize,
    s: usize,
}

impl Sparsity {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn level(&self) -> usize {
        self.s
    }
}

/// Indices ordered by descending key, ties by ascending index.
fn ranked_indices<R: Real>(keys: &[R]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..keys.len()).collect();
    idx.sort_by(|&a, &b| {
        keys[b]
            .partial_cmp(&keys[a])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    idx
}

/// All `s`-subsets of indices realizing the largest `s` keys.
fn tied_subsets<R: Real>(keys: &[R], s: usize) -> Vec<Vec<usize>> {
    let ranked = ranked_indices(keys);
    let threshold = keys[ranked[s - 1]];
    let forced: Vec<usize> = ranked
        .iter()
        .copied()
        .filter(|&i| keys[i] > threshold)
        .collect();
    let tied: Vec<usize> = ranked
        .iter()
        .copied()
        .filter(|&i| keys[i] == threshold)
        .collect();
    let need = s - forced.len();
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(need);
    fn rec(
        tied: &[usize],
        start: usize,
        need: usize,
        chosen: &mut Vec<usize>,
        forced: &[usize],
        out: &mut Vec<Vec<usize>>,
    ) {
        if chosen.len() == need {
            let mut support: Vec<usize> = forced.iter().chain(chosen.iter()).copied().collect();
            support.sort_unstable();
            out.push(support);
            return;
        }
        for i in start..tied.len() {
            chosen.push(tied[i]);
            rec(tied, i + 1, need, chosen, forced, out);
            chosen.pop();
        }
    }
    rec(&tied, 0, need, &mut chosen, &forced, &mut out);
    out
}

/// `{x : F(x)_j = b_j for j in J}` in complex space, `F` the unnormalized DFT.
#[derive(Clone, Debug)]
pub struct FourierData<R: Real> {
    dim: usize,
    indices: Vec<usize>,
    values: Vec<Complex<R>>,
    transform: Arc<FourierTransform<R>>,
}

impl<R: Real> FourierData<R> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[Complex<R>] {
        &self.values
    }

    pub fn transform(&self) -> &FourierTransform<R> {
        &self.transform
    }

    fn project<S: Scalar<Real = R>>(&self, x: &Point<S>) -> Point<S> {
        let mut buf: Vec<Complex<R>> = x.iter().map(|v| v.to_complex()).collect();
        self.transform.process(&mut buf, Direction::Forward);
        for (&j, &b) in self.indices.iter().zip(&self.values) {
            buf[j] = b;
        }
        self.transform.process(&mut buf, Direction::Inverse);
        Point::from_vec(buf.into_iter().map(S::from_complex).collect())
    }
}

impl<R: Real> PartialEq for FourierData<R> {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.indices == other.indices && self.values == other.values
    }
}

/// Finite collection of points.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet<S: Scalar> {
    points: Vec<Point<S>>,
}

impl<S: Scalar> PointSet<S> {
    pub fn points(&self) -> &[Point<S>] {
        &self.points
    }

    fn project(&self, x: &Point<S>) -> Result<Point<S>> {
        let mut best: Option<(S::Real, &Point<S>)> = None;
        for p in &self.points {
            let d = x.distance(p);
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, p));
            }
        }
        best.map(|(_, p)| p.clone()).ok_or(Error::EmptySet)
    }
}

/// A constraint set from the built-in catalog.
#[derive(Clone, Debug, PartialEq)]
pub enum SetSpec<S: Scalar> {
    AffineSystem(AffineSystem<S>),
    LineThroughOrigin(Line<S>),
    AffineLine(Line<S>),
    Sparsity(Sparsity),
    /// Real vectors with at most `s` nonzeros inside a complex ambient space.
    RealSparsity(Sparsity),
    FourierData(FourierData<S::Real>),
    PointSet(PointSet<S>),
}

fn unit<S: Scalar>(direction: Point<S>) -> Result<Point<S>> {
    let n = direction.norm();
    if !(n > S::Real::zero()) {
        return Err(Error::InvalidParams(
            "line direction must be nonzero".into(),
        ));
    }
    // Already-unit directions are kept bit-for-bit so serialization round-trips.
    if (n - S::Real::one()).abs() <= S::Real::lit(4.0) * S::Real::epsilon() {
        return Ok(direction);
    }
    Ok(direction.scaled(S::Real::one() / n))
}

fn sparsity(dim: usize, s: usize) -> Result<Sparsity> {
    if dim == 0 || s == 0 || s > dim {
        return Err(Error::InvalidParams(format!(
            "sparsity level must satisfy 1 <= s <= n (s = {s}, n = {dim})"
        )));
    }
    Ok(Sparsity { dim, s })
}

impl<S: Scalar> SetSpec<S> {
    pub fn affine_system(matrix: DenseMatrix<S::Real>, rhs: Point<S>) -> Result<Self> {
        check_dim(matrix.rows(), rhs.dim())?;
        Ok(SetSpec::AffineSystem(AffineSystem {
            pinv: Arc::new(PseudoInverse::new(matrix)?),
            rhs,
        }))
    }

    /// Line spanned by `direction` (normalized here).
    pub fn line_through_origin(direction: Point<S>) -> Result<Self> {
        let direction = unit(direction)?;
        Ok(SetSpec::LineThroughOrigin(Line {
            point: Point::zeros(direction.dim()),
            direction,
        }))
    }

    pub fn affine_line(point: Point<S>, direction: Point<S>) -> Result<Self> {
        check_dim(point.dim(), direction.dim())?;
        Ok(SetSpec::AffineLine(Line {
            point,
            direction: unit(direction)?,
        }))
    }

    pub fn sparsity(dim: usize, s: usize) -> Result<Self> {
        Ok(SetSpec::Sparsity(sparsity(dim, s)?))
    }

    pub fn real_sparsity(dim: usize, s: usize) -> Result<Self> {
        Ok(SetSpec::RealSparsity(sparsity(dim, s)?))
    }

    /// Fourier data constraint; the ambient space must be complex.
    pub fn fourier_data(
        dim: usize,
        indices: Vec<usize>,
        values: Vec<Complex<S::Real>>,
    ) -> Result<Self> {
        if !S::IS_COMPLEX {
            return Err(Error::RequiresComplex);
        }
        if dim == 0 {
            return Err(Error::InvalidParams("dimension must be positive".into()));
        }
        check_dim(indices.len(), values.len())?;
        if let Some(&j) = indices.iter().find(|&&j| j >= dim) {
            return Err(Error::InvalidParams(format!(
                "sample index {j} outside [0, {dim})"
            )));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        let mut pairs: Vec<(usize, Complex<S::Real>)> = indices.into_iter().zip(values).collect();
        pairs.sort_by_key(|p| p.0);
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidParams("duplicate sample index".into()));
        }
        let (indices, values) = pairs.into_iter().unzip();
        Ok(SetSpec::FourierData(FourierData {
            dim,
            indices,
            values,
            transform: Arc::new(FourierTransform::new(dim)),
        }))
    }

    pub fn point_set(points: Vec<Point<S>>) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptySet)?;
        let dim = first.dim();
        for p in &points {
            check_dim(dim, p.dim())?;
        }
        Ok(SetSpec::PointSet(PointSet { points }))
    }

    /// Ambient dimension.
    pub fn dim(&self) -> usize {
        match self {
            SetSpec::AffineSystem(a) => a.matrix().cols(),
            SetSpec::LineThroughOrigin(l) | SetSpec::AffineLine(l) => l.direction.dim(),
            SetSpec::Sparsity(s) | SetSpec::RealSparsity(s) => s.dim,
            SetSpec::FourierData(f) => f.dim,
            SetSpec::PointSet(p) => p.points[0].dim(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            SetSpec::AffineSystem(_) => "affine_system",
            SetSpec::LineThroughOrigin(_) => "line_through_origin",
            SetSpec::AffineLine(_) => "affine_line",
            SetSpec::Sparsity(_) => "sparsity",
            SetSpec::RealSparsity(_) => "real_sparsity",
            SetSpec::FourierData(_) => "fourier_data",
            SetSpec::PointSet(_) => "point_set",
        }
    }

    /// Short human-readable description.
    pub fn describe(&self) -> String {
        match self {
            SetSpec::AffineSystem(a) => {
                format!("affine_system({}x{})", a.matrix().rows(), a.matrix().cols())
            }
            SetSpec::LineThroughOrigin(_) => format!("line_through_origin(n={})", self.dim()),
            SetSpec::AffineLine(_) => format!("affine_line(n={})", self.dim()),
            SetSpec::Sparsity(s) => format!("sparsity(s={}, n={})", s.s, s.dim),
            SetSpec::RealSparsity(s) => format!("real_sparsity(s={}, n={})", s.s, s.dim),
            SetSpec::FourierData(f) => {
                format!("fourier_data(|J|={}, n={})", f.indices.len(), f.dim)
            }
            SetSpec::PointSet(p) => {
                format!("point_set({} points, n={})", p.points.len(), self.dim())
            }
        }
    }

    /// True when the set is affine, so its projector is an affine map.
    /// Sparsity sets always report `false`, including the trivial `s = n`.
    pub fn is_affine(&self) -> bool {
        match self {
            SetSpec::AffineSystem(_)
            | SetSpec::LineThroughOrigin(_)
            | SetSpec::AffineLine(_)
            | SetSpec::FourierData(_) => true,
            SetSpec::PointSet(p) => p.points.len() == 1,
            SetSpec::Sparsity(_) | SetSpec::RealSparsity(_) => false,
        }
    }

    /// Every convex catalog entry is affine.
    pub fn is_convex(&self) -> bool {
        self.is_affine()
    }

    /// Canonical nearest point.
    pub fn project(&self, x: &Point<S>) -> Result<Point<S>> {
        x.check_dim(self.dim())?;
        match self {
            SetSpec::AffineSystem(a) => a.project(x),
            SetSpec::LineThroughOrigin(l) | SetSpec::AffineLine(l) => Ok(l.project(x)),
            SetSpec::Sparsity(sp) => {
                let keys: Vec<S::Real> = x.iter().map(|v| v.modulus()).collect();
                let mut out = vec![S::zero(); sp.dim];
                for &i in ranked_indices(&keys).iter().take(sp.s) {
                    out[i] = x[i];
                }
                Ok(Point::from_vec(out))
            }
            SetSpec::RealSparsity(sp) => {
                // Keeping entry k saves |Re x_k|^2 over zeroing it.
                let keys: Vec<S::Real> = x.iter().map(|v| v.re().abs()).collect();
                let mut out = vec![S::zero(); sp.dim];
                for &i in ranked_indices(&keys).iter().take(sp.s) {
                    out[i] = S::from_real(x[i].re());
                }
                Ok(Point::from_vec(out))
            }
            SetSpec::FourierData(f) => Ok(f.project(x)),
            SetSpec::PointSet(p) => p.project(x),
        }
    }

    pub fn distance(&self, x: &Point<S>) -> Result<S::Real> {
        Ok(x.distance(&self.project(x)?))
    }

    pub fn contains(&self, x: &Point<S>, tol: S::Real) -> Result<bool> {
        Ok(self.distance(x)? <= tol)
    }

    /// All supports of size `s` that realize a nearest point of a sparsity
    /// set, sorted ascending. The canonical projection uses the first one in
    /// rank order. Only available for dimensions up to
    /// [`TIE_ENUMERATION_MAX_DIM`].
    pub fn tied_supports(&self, x: &Point<S>) -> Result<Vec<Vec<usize>>> {
        x.check_dim(self.dim())?;
        if self.dim() > TIE_ENUMERATION_MAX_DIM {
            return Err(Error::InvalidParams(format!(
                "tie enumeration limited to n <= {TIE_ENUMERATION_MAX_DIM}"
            )));
        }
        let (keys, s): (Vec<S::Real>, usize) = match self {
            SetSpec::Sparsity(sp) => (x.iter().map(|v| v.modulus()).collect(), sp.s),
            SetSpec::RealSparsity(sp) => (x.iter().map(|v| v.re().abs()).collect(), sp.s),
            _ => {
                return Err(Error::UnsupportedOperator(
                    "tie enumeration needs a sparsity set",
                ))
            }
        };
        Ok(tied_subsets(&keys, s))
    }

    /// Analytic `(eps, delta)`-regularity violation at `z`, when the catalog
    /// provides one.
    pub fn regularity_violation(&self, z: &Point<S>, delta: S::Real) -> Result<Option<S::Real>> {
        let distance = self.distance(z)?;
        if distance > S::Real::lit(MEMBERSHIP_TOL) {
            return Err(Error::NotOnSet {
                distance: distance.to_f64_lossy(),
            });
        }
        if self.is_convex() {
            return Ok(Some(S::Real::zero()));
        }
        let tol = S::Real::lit(MEMBERSHIP_TOL);
        let magnitudes: Vec<S::Real> = match self {
            SetSpec::Sparsity(_) => z.iter().map(|v| v.modulus()).collect(),
            SetSpec::RealSparsity(_) => z.iter().map(|v| v.re().abs()).collect(),
            _ => return Ok(None),
        };
        let s = match self {
            SetSpec::Sparsity(sp) | SetSpec::RealSparsity(sp) => sp.s,
            _ => unreachable!(),
        };
        let nonzero: Vec<S::Real> = magnitudes.into_iter().filter(|&m| m > tol).collect();
        if nonzero.len() != s {
            return Ok(None);
        }
        let smallest = nonzero.into_iter().fold(S::Real::infinity(), S::Real::min);
        Ok((delta < smallest).then(S::Real::zero))
    }

    /// Affine flat in the real embedding, for affine variants.
    pub fn flat(&self) -> Option<Flat<S::Real>> {
        Flat::from_set(self)
    }
}

/// Distance to a solution set, used for monitoring and sampling.
pub trait DistanceOracle<S: Scalar>: Send + Sync {
    fn distance_to(&self, x: &Point<S>) -> Result<S::Real>;
}

impl<S: Scalar> DistanceOracle<S> for SetSpec<S> {
    fn distance_to(&self, x: &Point<S>) -> Result<S::Real> {
        self.distance(x)
    }
}
