//! Geometry of affine pairs: transversality cosine, gap vector and the
//! fixed-point set in the inconsistent case.

use num_traits::{Float, One, Zero};

use crate::error::{check_dim, Error, Result};
use crate::numkit::linalg::{max_singular_value, norm, orthogonal_complement, orthonormal_basis};
use crate::numkit::{Point, Real, Scalar, SeededRng};
use crate::sets::{Flat, SetSpec};

const BASIS_TOL: f64 = 1e-10;

fn affine_flat<S: Scalar>(set: &SetSpec<S>, what: &'static str) -> Result<Flat<S::Real>> {
    set.flat().ok_or(Error::NotAffine(what))
}

/// Normal space of `flat` within the direction space `w`: an orthonormal
/// basis of `{v - P_U v : v in W}`.
fn normals_within<R: Real>(flat: &Flat<R>, w: &[Vec<R>]) -> Vec<Vec<R>> {
    let residuals: Vec<Vec<R>> = w
        .iter()
        .map(|v| {
            let along = flat.project_embedded(&add(flat.point(), v));
            v.iter()
                .zip(along.iter().zip(flat.point()))
                .map(|(&vi, (&a, &p))| vi - (a - p))
                .collect::<Vec<R>>()
        })
        // `w` is orthonormal, so residual norms are absolute.
        .filter(|r: &Vec<R>| norm(r) > R::lit(BASIS_TOL))
        .collect();
    orthonormal_basis(&residuals, R::lit(BASIS_TOL))
}

fn add<R: Real>(a: &[R], b: &[R]) -> Vec<R> {
    a.iter().zip(b).map(|(&x, &y)| x + y).collect()
}

/// Cosine of the minimal principal angle between the normal spaces of two
/// flats, both restricted to `U + V` (the sum of their direction spaces).
///
/// Equals the transversality constant of the pair relative to its affine
/// hull when the flats intersect.
pub fn friedrichs_cosine<S: Scalar>(a: &SetSpec<S>, b: &SetSpec<S>) -> Result<S::Real> {
    check_dim(a.dim(), b.dim())?;
    let fa = affine_flat(a, "first set of the transversality pair")?;
    let fb = affine_flat(b, "second set of the transversality pair")?;
    friedrichs_cosine_flats(&fa, &fb)
}

/// Orthonormal basis of `U + V`, the direction space of the affine hull of two
/// intersecting flats.
pub fn hull_directions<R: Real>(fa: &Flat<R>, fb: &Flat<R>) -> Vec<Vec<R>> {
    let mut both = fa.directions().to_vec();
    both.extend_from_slice(fb.directions());
    orthonormal_basis(&both, R::lit(BASIS_TOL))
}

pub fn friedrichs_cosine_flats<R: Real>(fa: &Flat<R>, fb: &Flat<R>) -> Result<R> {
    let w = hull_directions(fa, fb);
    let na = normals_within(fa, &w);
    let nb = normals_within(fb, &w);
    if na.is_empty() || nb.is_empty() {
        return Err(Error::DegenerateNormals);
    }
    Ok(max_singular_value(&na, &nb)?.min(R::one()))
}

/// Gap vector `g = P_{cl(B - A)} 0` with the limiting pair that realizes it.
#[derive(Clone, Debug, PartialEq)]
pub struct GapVector<S: Scalar> {
    pub g: Point<S>,
    pub a_limit: Point<S>,
    pub b_limit: Point<S>,
    pub iterations: usize,
}

/// Default iteration budget of [`estimate_gap_vector`].
pub const GAP_MAX_ITER: usize = 100_000;
/// Change below which [`estimate_gap_vector`] stops.
pub const GAP_TOL: f64 = 1e-13;

/// Runs alternating projections `a = P_A P_B a` from a seeded start and
/// returns `b_inf - a_inf`.
pub fn estimate_gap_vector<S: Scalar>(
    a: &SetSpec<S>,
    b: &SetSpec<S>,
    max_iter: usize,
    seed: u64,
) -> Result<GapVector<S>> {
    check_dim(a.dim(), b.dim())?;
    if !a.is_convex() {
        return Err(Error::NonConvexInput("first set of the gap pair"));
    }
    if !b.is_convex() {
        return Err(Error::NonConvexInput("second set of the gap pair"));
    }
    let tol = S::Real::lit(GAP_TOL);
    let mut rng = SeededRng::new(seed);
    let mut pa = a.project(&rng.gaussian(a.dim())?)?;
    let mut pb = b.project(&pa)?;
    let mut iterations = 0;
    while iterations < max_iter.max(1) {
        iterations += 1;
        let next_a = a.project(&pb)?;
        let next_b = b.project(&next_a)?;
        let change = next_a.distance(&pa).max(next_b.distance(&pb));
        pa = next_a;
        pb = next_b;
        if change < tol {
            break;
        }
    }
    Ok(GapVector {
        g: &pb - &pa,
        a_limit: pa,
        b_limit: pb,
        iterations,
    })
}

/// `Fix T_lambda = A ∩ (B - g) - lambda/(1 - lambda) g` for convex `A`, `B`
/// with gap vector `g`, as a flat in the real embedding.
pub fn fixed_point_set_inconsistent<S: Scalar>(
    a: &SetSpec<S>,
    b: &SetSpec<S>,
    lambda: S::Real,
    g: &Point<S>,
) -> Result<Flat<S::Real>> {
    check_dim(a.dim(), b.dim())?;
    check_dim(a.dim(), g.dim())?;
    if lambda >= S::Real::one() {
        return Err(Error::LambdaOne);
    }
    if !(lambda >= S::Real::zero()) {
        return Err(Error::OutOfDomain(format!(
            "lambda must lie in [0, 1), got {lambda}"
        )));
    }
    if !a.is_convex() {
        return Err(Error::NonConvexInput("first set of the pair"));
    }
    if !b.is_convex() {
        return Err(Error::NonConvexInput("second set of the pair"));
    }
    let fa = affine_flat(a, "first set of the pair")?;
    let fb = affine_flat(b, "second set of the pair")?;
    let ge = g.embed();
    let minus_g: Vec<S::Real> = ge.iter().map(|&v| -v).collect();
    let e = fa.intersect(&fb.translate(&minus_g)).ok_or_else(|| {
        Error::OutOfDomain("A and B - g do not intersect; g is not the gap vector".into())
    })?;
    let shift = lambda / (S::Real::one() - lambda);
    let offset: Vec<S::Real> = ge.iter().map(|&v| -shift * v).collect();
    Ok(e.translate(&offset))
}

/// `Fix T_lambda` of two intersecting flats: `A ∩ B` for `lambda < 1`, and
/// `A ∩ B + (U + V)^perp` for Douglas-Rachford.
pub fn fixed_point_set_affine<R: Real>(fa: &Flat<R>, fb: &Flat<R>, lambda: R) -> Result<Flat<R>> {
    let e = fa.intersect(fb).ok_or_else(|| {
        Error::OutOfDomain("flats do not intersect; use the gap vector form".into())
    })?;
    if lambda < R::one() {
        return Ok(e);
    }
    let mut dirs = e.directions().to_vec();
    dirs.extend(orthogonal_complement(
        &hull_directions(fa, fb),
        fa.ambient_dim(),
    ));
    Ok(Flat::new(e.point().to_vec(), &dirs))
}
