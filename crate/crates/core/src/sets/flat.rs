//! Affine flats in the real embedding of the ambient space.

use num_complex::Complex;

use super::{DistanceOracle, SetSpec};
use crate::error::{Error, Result};
use crate::numkit::linalg::{self, dot, norm, orthogonal_complement, orthonormal_basis};
use crate::numkit::{DenseMatrix, Point, Real, Scalar, SeededRng};

const BASIS_TOL: f64 = 1e-10;

/// `{point + span(directions)}` in `R^d`, directions orthonormal.
#[derive(Clone, Debug, PartialEq)]
pub struct Flat<R: Real> {
    point: Vec<R>,
    directions: Vec<Vec<R>>,
}

fn embed_complex<R: Real>(v: &[Complex<R>]) -> Vec<R> {
    v.iter().flat_map(|c| [c.re, c.im]).collect()
}

impl<R: Real> Flat<R> {
    pub fn new(point: Vec<R>, directions: &[Vec<R>]) -> Self {
        let directions = orthonormal_basis(directions, R::lit(BASIS_TOL));
        Self { point, directions }
    }

    /// Flat `{x : <n_i, x> = <n_i, point>}`.
    pub fn from_normals(point: Vec<R>, normals: &[Vec<R>]) -> Self {
        let q = orthonormal_basis(normals, R::lit(BASIS_TOL));
        let directions = orthogonal_complement(&q, point.len());
        Self { point, directions }
    }

    /// Flat of an affine catalog set; `None` for non-affine variants.
    pub fn from_set<S: Scalar<Real = R>>(set: &SetSpec<S>) -> Option<Self> {
        let d = set.dim() * S::PARTS;
        match set {
            SetSpec::LineThroughOrigin(l) | SetSpec::AffineLine(l) => {
                Some(Self::new(l.point().embed(), &[l.direction().embed()]))
            }
            SetSpec::AffineSystem(a) => {
                let m = a.matrix();
                let mut normals = Vec::with_capacity(m.rows() * S::PARTS);
                for i in 0..m.rows() {
                    for part in 0..S::PARTS {
                        let mut v = vec![R::zero(); d];
                        for (k, &mij) in m.row(i).iter().enumerate() {
                            v[k * S::PARTS + part] = mij;
                        }
                        normals.push(v);
                    }
                }
                let origin = set.project(&Point::zeros(set.dim())).ok()?;
                Some(Self::from_normals(origin.embed(), &normals))
            }
            SetSpec::FourierData(f) => {
                let n = f.dim();
                let nr = R::from_usize(n)?;
                let mut normals = Vec::with_capacity(2 * f.indices().len());
                for &j in f.indices() {
                    let c: Vec<Complex<R>> = (0..n)
                        .map(|k| {
                            let angle =
                                R::lit(2.0) * R::PI() * R::from_usize((j * k) % n).unwrap() / nr;
                            Complex::new(angle.cos(), angle.sin())
                        })
                        .collect();
                    let ic: Vec<Complex<R>> = c.iter().map(|z| z * Complex::i()).collect();
                    normals.push(embed_complex(&c));
                    normals.push(embed_complex(&ic));
                }
                let origin = set.project(&Point::zeros(n)).ok()?;
                Some(Self::from_normals(origin.embed(), &normals))
            }
            SetSpec::PointSet(p) if p.points().len() == 1 => {
                Some(Self::new(p.points()[0].embed(), &[]))
            }
            _ => None,
        }
    }

    /// Embedding dimension.
    pub fn ambient_dim(&self) -> usize {
        self.point.len()
    }

    /// Dimension of the flat itself.
    pub fn dim(&self) -> usize {
        self.directions.len()
    }

    pub fn point(&self) -> &[R] {
        &self.point
    }

    pub fn directions(&self) -> &[Vec<R>] {
        &self.directions
    }

    /// Orthonormal basis of the normal space.
    pub fn normals(&self) -> Vec<Vec<R>> {
        orthogonal_complement(&self.directions, self.ambient_dim())
    }

    pub fn project_embedded(&self, x: &[R]) -> Vec<R> {
        let rel: Vec<R> = x.iter().zip(&self.point).map(|(&a, &b)| a - b).collect();
        let along = linalg::project_onto_span(&rel, &self.directions);
        self.point.iter().zip(along).map(|(&p, a)| p + a).collect()
    }

    pub fn distance_embedded(&self, x: &[R]) -> R {
        let proj = self.project_embedded(x);
        norm(
            &x.iter()
                .zip(&proj)
                .map(|(&a, &b)| a - b)
                .collect::<Vec<_>>(),
        )
    }

    pub fn contains_embedded(&self, x: &[R], tol: R) -> bool {
        self.distance_embedded(x) <= tol
    }

    pub fn translate(&self, shift: &[R]) -> Self {
        Self {
            point: self.point.iter().zip(shift).map(|(&p, &s)| p + s).collect(),
            directions: self.directions.clone(),
        }
    }

    /// Intersection of two flats, `None` when they are disjoint.
    pub fn intersect(&self, other: &Self) -> Option<Self> {
        assert_eq!(
            self.ambient_dim(),
            other.ambient_dim(),
            "flat dimension mismatch"
        );
        let tol = R::lit(1e-9);
        let mut qs: Vec<Vec<R>> = Vec::new();
        let mut rhs: Vec<R> = Vec::new();
        for flat in [self, other] {
            for nrm in flat.normals() {
                let mut w = nrm.clone();
                let mut e = dot(&nrm, &flat.point);
                let scale = R::one() + e.abs();
                for _ in 0..2 {
                    for (q, &dq) in qs.iter().zip(&rhs) {
                        let c = dot(&w, q);
                        w.iter_mut().zip(q).for_each(|(wi, &qi)| *wi -= c * qi);
                        e -= c * dq;
                    }
                }
                let r = norm(&w);
                if r > R::lit(1e-8) {
                    w.iter_mut().for_each(|x| *x = *x / r);
                    qs.push(w);
                    rhs.push(e / r);
                } else if e.abs() > tol * scale {
                    return None;
                }
            }
        }
        let d = self.ambient_dim();
        let mut point = vec![R::zero(); d];
        for (q, &c) in qs.iter().zip(&rhs) {
            point.iter_mut().zip(q).for_each(|(p, &qi)| *p += c * qi);
        }
        let directions = orthogonal_complement(&qs, d);
        Some(Self { point, directions })
    }

    /// Random point `point + sum c_i d_i` with standard normal `c_i` scaled by
    /// `spread`.
    pub fn sample(&self, rng: &mut SeededRng, spread: R) -> Vec<R> {
        let mut x = self.point.clone();
        for d in &self.directions {
            let c: R = rng.normal::<R>() * spread;
            x.iter_mut().zip(d).for_each(|(xi, &di)| *xi += c * di);
        }
        x
    }

    pub fn sample_point<S: Scalar<Real = R>>(
        &self,
        rng: &mut SeededRng,
        spread: R,
    ) -> Result<Point<S>> {
        Point::from_embedding(&self.sample(rng, spread))
    }

    /// Catalog description of a flat in a real ambient space.
    pub fn to_set_spec(&self) -> Result<SetSpec<R>>
    where
        R: Scalar<Real = R>,
    {
        let point = Point::new(self.point.clone())?;
        match self.directions.len() {
            0 => SetSpec::point_set(vec![point]),
            1 => SetSpec::affine_line(point, Point::new(self.directions[0].clone())?),
            k if k == self.ambient_dim() => Err(Error::InvalidParams(
                "whole space has no catalog representation".into(),
            )),
            _ => {
                let normals = self.normals();
                let rhs: Vec<R> = normals.iter().map(|nrm| dot(nrm, &self.point)).collect();
                SetSpec::affine_system(DenseMatrix::from_rows(&normals)?, Point::new(rhs)?)
            }
        }
    }
}

impl<S: Scalar> DistanceOracle<S> for Flat<S::Real> {
    fn distance_to(&self, x: &Point<S>) -> Result<S::Real> {
        let e = x.embed();
        crate::error::check_dim(self.ambient_dim(), e.len())?;
        Ok(self.distance_embedded(&e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn p(v: &[f64]) -> Point<f64> {
        Point::new(v.to_vec()).unwrap()
    }

    #[test]
    fn line_intersection_is_a_point() {
        let a = SetSpec::line_through_origin(p(&[1.0, 0.0]))
            .unwrap()
            .flat()
            .unwrap();
        let b = SetSpec::affine_line(p(&[3.0, 1.0]), p(&[0.0, 1.0]))
            .unwrap()
            .flat()
            .unwrap();
        let c = a.intersect(&b).unwrap();
        assert_eq!(c.dim(), 0);
        assert!((c.point()[0] - 3.0).abs() < 1e-14 && c.point()[1].abs() < 1e-14);
    }

    #[test]
    fn parallel_lines_do_not_intersect() {
        let a = SetSpec::line_through_origin(p(&[1.0, 0.0]))
            .unwrap()
            .flat()
            .unwrap();
        let b = SetSpec::affine_line(p(&[0.0, 1.0]), p(&[1.0, 0.0]))
            .unwrap()
            .flat()
            .unwrap();
        assert!(a.intersect(&b).is_none());
        let shifted = b.translate(&[0.0, -1.0]);
        assert_eq!(a.intersect(&shifted).unwrap().dim(), 1);
    }

    #[test]
    fn affine_system_flat_matches_projector() {
        let m = DenseMatrix::from_rows(&[vec![1.0, 2.0, 0.0], vec![0.0, 1.0, -1.0]]).unwrap();
        let set = SetSpec::affine_system(m, p(&[1.0, 2.0])).unwrap();
        let flat = set.flat().unwrap();
        assert_eq!(flat.dim(), 1);
        let x = p(&[0.3, -2.0, 4.0]);
        let d1 = set.distance(&x).unwrap();
        let d2 = DistanceOracle::<f64>::distance_to(&flat, &x).unwrap();
        assert!((d1 - d2).abs() < 1e-12);
        let round = flat.to_set_spec().unwrap();
        assert!((round.distance(&x).unwrap() - d1).abs() < 1e-12);
    }

    #[test]
    fn fourier_flat_matches_projector() {
        let set = SetSpec::<Complex64>::fourier_data(
            4,
            vec![1, 3],
            vec![Complex64::new(1.0, 0.5), Complex64::new(1.0, -0.5)],
        )
        .unwrap();
        let flat = set.flat().unwrap();
        assert_eq!(flat.dim(), 8 - 4);
        let x = Point::new(vec![
            Complex64::new(0.1, 0.2),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 3.0),
            Complex64::new(2.0, -1.0),
        ])
        .unwrap();
        let d1 = set.distance(&x).unwrap();
        let d2 = DistanceOracle::<Complex64>::distance_to(&flat, &x).unwrap();
        assert!((d1 - d2).abs() < 1e-12, "{d1} vs {d2}");
    }
}
