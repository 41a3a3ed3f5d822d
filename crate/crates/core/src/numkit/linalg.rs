//! Small dense linear algebra: symmetric eigensolver, Cholesky, cached
//! pseudo-inverse application and Gram-Schmidt utilities.

use super::{DenseMatrix, Point, Real, Scalar};
use crate::error::{check_dim, Error, Result};

const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues (unsorted) and the matrix whose columns are the
/// corresponding orthonormal eigenvectors.
pub fn symmetric_eigen<R: Real>(a: &DenseMatrix<R>) -> Result<(Vec<R>, DenseMatrix<R>)> {
    let n = a.rows();
    check_dim(n, a.cols())?;
    let mut m = a.clone();
    let mut v = DenseMatrix::identity(n);
    let two = R::lit(2.0);
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: R = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m.get(i, j) * m.get(i, j))
            .sum();
        let diag: R = (0..n).map(|i| m.get(i, i) * m.get(i, i)).sum();
        if off <= R::epsilon() * R::epsilon() * diag || off.is_zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                if apq.is_zero() {
                    continue;
                }
                let theta = (m.get(q, q) - m.get(p, p)) / (two * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + R::one()).sqrt());
                let c = R::one() / (t * t + R::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m.get(k, p);
                    let mkq = m.get(k, q);
                    m.set(k, p, c * mkp - s * mkq);
                    m.set(k, q, s * mkp + c * mkq);
                }
                for k in 0..n {
                    let mpk = m.get(p, k);
                    let mqk = m.get(q, k);
                    m.set(p, k, c * mpk - s * mqk);
                    m.set(q, k, s * mpk + c * mqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    Ok(((0..n).map(|i| m.get(i, i)).collect(), v))
}

/// Lower-triangular Cholesky factor, or `None` if a pivot is not positive.
pub fn cholesky<R: Real>(a: &DenseMatrix<R>) -> Option<DenseMatrix<R>> {
    let n = a.rows();
    let mut l = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a.get(j, j);
        for k in 0..j {
            d -= l.get(j, k) * l.get(j, k);
        }
        if !(d > R::zero()) {
            return None;
        }
        let djj = d.sqrt();
        l.set(j, j, djj);
        for i in (j + 1)..n {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= l.get(i, k) * l.get(j, k);
            }
            l.set(i, j, s / djj);
        }
    }
    Some(l)
}

#[derive(Clone, Debug)]
enum GramSolver<R: Real> {
    Cholesky(DenseMatrix<R>),
    Eigen {
        values: Vec<R>,
        vectors: DenseMatrix<R>,
    },
}

/// Cached factorization applying `M^+ = M^T (M M^T)^{-1}` for a full row
/// rank matrix `M`.
#[derive(Clone, Debug)]
pub struct PseudoInverse<R: Real> {
    matrix: DenseMatrix<R>,
    solver: GramSolver<R>,
}

impl<R: Real> PseudoInverse<R> {
    /// Factorizes `M M^T`, rejecting matrices whose Gram matrix has an
    /// eigenvalue ratio below [`Real::rank_tolerance`].
    pub fn new(matrix: DenseMatrix<R>) -> Result<Self> {
        if matrix.rows() > matrix.cols() {
            return Err(Error::InvalidShape(format!(
                "full row rank requires rows <= cols, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let gram = matrix.gram_rows();
        let (values, vectors) = symmetric_eigen(&gram)?;
        let largest = values.iter().copied().fold(R::zero(), R::max);
        let smallest = values.iter().copied().fold(R::infinity(), R::min);
        if !(largest > R::zero()) || smallest <= R::rank_tolerance() * largest {
            return Err(Error::RankDeficient {
                smallest: smallest.to_f64_lossy(),
                largest: largest.to_f64_lossy(),
            });
        }
        let solver = match cholesky(&gram) {
            Some(l) => GramSolver::Cholesky(l),
            None => GramSolver::Eigen { values, vectors },
        };
        Ok(Self { matrix, solver })
    }

    pub fn matrix(&self) -> &DenseMatrix<R> {
        &self.matrix
    }

    /// Solves `(M M^T) z = y`.
    fn solve_gram<S: Scalar<Real = R>>(&self, y: &[S]) -> Vec<S> {
        let m = y.len();
        match &self.solver {
            GramSolver::Cholesky(l) => {
                let mut z = y.to_vec();
                for i in 0..m {
                    let mut s = z[i];
                    for k in 0..i {
                        s -= z[k].scale(l.get(i, k));
                    }
                    z[i] = s.scale(R::one() / l.get(i, i));
                }
                for i in (0..m).rev() {
                    let mut s = z[i];
                    for k in (i + 1)..m {
                        s -= z[k].scale(l.get(k, i));
                    }
                    z[i] = s.scale(R::one() / l.get(i, i));
                }
                z
            }
            GramSolver::Eigen { values, vectors } => {
                let mut z = vec![S::zero(); m];
                for (j, &lam) in values.iter().enumerate() {
                    let coef = (0..m).fold(S::zero(), |acc, i| acc + y[i].scale(vectors.get(i, j)));
                    let coef = coef.scale(R::one() / lam);
                    for (i, zi) in z.iter_mut().enumerate() {
                        *zi += coef.scale(vectors.get(i, j));
                    }
                }
                z
            }
        }
    }

    /// `M^+ y`.
    pub fn apply<S: Scalar<Real = R>>(&self, y: &Point<S>) -> Result<Point<S>> {
        y.check_dim(self.matrix.rows())?;
        let z = self.solve_gram(y.as_slice());
        Ok(Point::from_vec(self.matrix.apply_transpose(&z)?))
    }
}

/// `M^+ y` for a full row rank `M`.
pub fn pinv_apply<S: Scalar>(m: &DenseMatrix<S::Real>, y: &Point<S>) -> Result<Point<S>> {
    PseudoInverse::new(m.clone())?.apply(y)
}

pub(crate) fn dot<R: Real>(a: &[R], b: &[R]) -> R {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub(crate) fn norm<R: Real>(a: &[R]) -> R {
    dot(a, a).sqrt()
}

/// Removes from `v` its components along the orthonormal vectors in `basis`
/// (two passes of modified Gram-Schmidt).
pub(crate) fn orthogonalize_against<R: Real>(v: &mut [R], basis: &[Vec<R>]) {
    for _ in 0..2 {
        for q in basis {
            let c = dot(v, q);
            for (vi, &qi) in v.iter_mut().zip(q) {
                *vi -= c * qi;
            }
        }
    }
}

/// Orthonormal basis of the span of `vectors`; vectors whose residual norm
/// falls below `tol` times their original norm are dropped.
pub fn orthonormal_basis<R: Real>(vectors: &[Vec<R>], tol: R) -> Vec<Vec<R>> {
    let mut basis: Vec<Vec<R>> = Vec::new();
    for v in vectors {
        let original = norm(v);
        if original.is_zero() {
            continue;
        }
        let mut w = v.clone();
        orthogonalize_against(&mut w, &basis);
        let r = norm(&w);
        if r > tol * original {
            w.iter_mut().for_each(|x| *x = *x / r);
            basis.push(w);
        }
    }
    basis
}

/// Orthonormal basis of the orthogonal complement of the span of the
/// orthonormal `basis` in `R^dim`.
pub fn orthogonal_complement<R: Real>(basis: &[Vec<R>], dim: usize) -> Vec<Vec<R>> {
    let mut all: Vec<Vec<R>> = basis.to_vec();
    let start = all.len();
    for i in 0..dim {
        if all.len() == dim {
            break;
        }
        let mut e = vec![R::zero(); dim];
        e[i] = R::one();
        orthogonalize_against(&mut e, &all);
        let r = norm(&e);
        if r > R::lit(1e-8) {
            e.iter_mut().for_each(|x| *x = *x / r);
            all.push(e);
        }
    }
    all.split_off(start)
}

/// Projection of `v` onto the span of the orthonormal `basis`.
pub(crate) fn project_onto_span<R: Real>(v: &[R], basis: &[Vec<R>]) -> Vec<R> {
    let mut out = vec![R::zero(); v.len()];
    for q in basis {
        let c = dot(v, q);
        for (o, &qi) in out.iter_mut().zip(q) {
            *o += c * qi;
        }
    }
    out
}

/// Largest singular value of `Q_a^T Q_b` for two orthonormal families.
pub fn max_singular_value<R: Real>(qa: &[Vec<R>], qb: &[Vec<R>]) -> Result<R> {
    if qa.is_empty() || qb.is_empty() {
        return Ok(R::zero());
    }
    let c = DenseMatrix::from_rows(
        &qa.iter()
            .map(|a| qb.iter().map(|b| dot(a, b)).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    )?;
    let ctc = c.transpose().matmul(&c)?;
    let (values, _) = symmetric_eigen(&ctc)?;
    Ok(values
        .into_iter()
        .fold(R::zero(), R::max)
        .max(R::zero())
        .sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> DenseMatrix<f64> {
        DenseMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn pinv_of_row_vector() {
        let y = Point::new(vec![2.0f64]).unwrap();
        let out = pinv_apply(&m(&[&[1.0, 1.0]]), &y).unwrap();
        assert!((out[0] - 1.0).abs() < 1e-14 && (out[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn pinv_of_identity() {
        let y = Point::new(vec![1.0, 2.0, 3.0]).unwrap();
        let out = pinv_apply(&DenseMatrix::identity(3), &y).unwrap();
        assert_eq!(out, y);
    }

    #[test]
    fn pinv_of_scaled_axis() {
        let out = pinv_apply(&m(&[&[2.0, 0.0]]), &Point::new(vec![4.0]).unwrap()).unwrap();
        assert_eq!(out.as_slice(), &[2.0, 0.0]);
    }

    #[test]
    fn pinv_rejects_rank_deficient_and_bad_dims() {
        let dup = m(&[&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]]);
        assert!(matches!(
            PseudoInverse::new(dup),
            Err(Error::RankDeficient { .. })
        ));
        let tall = m(&[&[1.0], &[2.0]]);
        assert!(PseudoInverse::new(tall).is_err());
        let p = PseudoInverse::new(m(&[&[1.0, 1.0]])).unwrap();
        assert!(matches!(
            p.apply(&Point::new(vec![1.0, 2.0]).unwrap()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn eigen_solver_fallback_matches_cholesky() {
        let mat = m(&[&[1.0, 2.0, 0.5], &[0.0, 1.0, -1.0]]);
        let p = PseudoInverse::new(mat.clone()).unwrap();
        let gram = mat.gram_rows();
        let (values, vectors) = symmetric_eigen(&gram).unwrap();
        let q = PseudoInverse {
            matrix: mat,
            solver: GramSolver::Eigen { values, vectors },
        };
        let y = Point::new(vec![0.3, -1.7]).unwrap();
        let a = p.apply(&y).unwrap();
        let b = q.apply(&y).unwrap();
        assert!(a.distance(&b) < 1e-13);
    }

    #[test]
    fn complement_dimensions() {
        let b = orthonormal_basis(&[vec![1.0, 1.0, 0.0], vec![2.0, 2.0, 0.0]], 1e-10);
        assert_eq!(b.len(), 1);
        let c = orthogonal_complement(&b, 3);
        assert_eq!(c.len(), 2);
        for v in &c {
            assert!(dot::<f64>(v, &b[0]).abs() < 1e-14);
        }
    }
}
