//! Fixed-point maps built from projectors and prox operators.
//!
//! The relaxed operator is
//!
//! ```text
//! T_lambda x = P_A((1 + lambda) P_B x - lambda x) - lambda (P_B x - x)
//! ```
//!
//! with `B` applied first. `lambda = 0` gives alternating projections
//! `P_A P_B`, `lambda = 1` gives Douglas-Rachford.

use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{check_dim, Error, Result};
use crate::numkit::{Point, Real, Scalar};
use crate::sets::{ProxTerm, SetSpec};

/// `(1 + lambda) y - lambda x` where `y` is the image of `x` under the base
/// operator.
#[inline]
fn relax<S: Scalar>(lambda: S::Real, image: &Point<S>, x: &Point<S>) -> Point<S> {
    Point::lincomb(S::Real::one() + lambda, image, -lambda, x)
}

/// The `lambda`-reflector `(1 + lambda) P_S x - lambda x`.
pub fn reflect<S: Scalar>(set: &SetSpec<S>, lambda: S::Real, x: &Point<S>) -> Result<Point<S>> {
    check_lambda(lambda)?;
    Ok(relax(lambda, &set.project(x)?, x))
}

fn check_lambda<R: Real>(lambda: R) -> Result<()> {
    if lambda >= R::zero() && lambda <= R::one() {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!(
            "lambda must lie in [0, 1], got {lambda}"
        )))
    }
}

/// A fixed-point operator over two sets or two prox terms.
#[derive(Clone, Debug, PartialEq)]
pub enum OperatorSpec<S: Scalar> {
    /// `T_lambda` over outer set `a` and inner set `b`.
    TLambda {
        a: Arc<SetSpec<S>>,
        b: Arc<SetSpec<S>>,
        lambda: S::Real,
    },
    /// `beta P_A(2 P_B - id) + (1 - 2 beta) P_B + beta id`.
    Raar {
        a: Arc<SetSpec<S>>,
        b: Arc<SetSpec<S>>,
        beta: S::Real,
    },
    /// `T_lambda` with prox operators of `f1` (outer) and `f2` (inner).
    ProxTLambda {
        f1: ProxTerm<S>,
        f2: ProxTerm<S>,
        lambda: S::Real,
    },
}

impl<S: Scalar> OperatorSpec<S> {
    pub fn t_lambda(
        a: impl Into<Arc<SetSpec<S>>>,
        b: impl Into<Arc<SetSpec<S>>>,
        lambda: S::Real,
    ) -> Result<Self> {
        let (a, b) = (a.into(), b.into());
        check_dim(a.dim(), b.dim())?;
        check_lambda(lambda)?;
        Ok(OperatorSpec::TLambda { a, b, lambda })
    }

    pub fn raar(
        a: impl Into<Arc<SetSpec<S>>>,
        b: impl Into<Arc<SetSpec<S>>>,
        beta: S::Real,
    ) -> Result<Self> {
        let (a, b) = (a.into(), b.into());
        check_dim(a.dim(), b.dim())?;
        if !(beta > S::Real::zero() && beta < S::Real::one()) {
            return Err(Error::InvalidParams(format!(
                "beta must lie in (0, 1), got {beta}"
            )));
        }
        Ok(OperatorSpec::Raar { a, b, beta })
    }

    pub fn prox_t_lambda(f1: ProxTerm<S>, f2: ProxTerm<S>, lambda: S::Real) -> Result<Self> {
        check_lambda(lambda)?;
        if let (Some(a), Some(b)) = (f1.set(), f2.set()) {
            check_dim(a.dim(), b.dim())?;
        }
        Ok(OperatorSpec::ProxTLambda { f1, f2, lambda })
    }

    /// Relaxation parameter of the `T_lambda` family.
    pub fn lambda(&self) -> Option<S::Real> {
        match self {
            OperatorSpec::TLambda { lambda, .. } | OperatorSpec::ProxTLambda { lambda, .. } => {
                Some(*lambda)
            }
            OperatorSpec::Raar { .. } => None,
        }
    }

    /// `lambda = 0`: alternating projections / backward-backward.
    pub fn is_ap(&self) -> bool {
        self.lambda().is_some_and(|l| l.is_zero())
    }

    /// `lambda = 1`: Douglas-Rachford.
    pub fn is_dr(&self) -> bool {
        self.lambda().is_some_and(|l| l == S::Real::one())
    }

    /// Outer and inner sets, when the operator is built from sets (or from
    /// indicator prox terms).
    pub fn sets(&self) -> Option<(&SetSpec<S>, &SetSpec<S>)> {
        match self {
            OperatorSpec::TLambda { a, b, .. } | OperatorSpec::Raar { a, b, .. } => Some((a, b)),
            OperatorSpec::ProxTLambda { f1, f2, .. } => Some((f1.set()?, f2.set()?)),
        }
    }

    /// Same sets, `lambda = 1`.
    pub fn douglas_rachford(&self) -> Self {
        match self {
            OperatorSpec::TLambda { a, b, .. } | OperatorSpec::Raar { a, b, .. } => {
                OperatorSpec::TLambda {
                    a: a.clone(),
                    b: b.clone(),
                    lambda: S::Real::one(),
                }
            }
            OperatorSpec::ProxTLambda { f1, f2, .. } => OperatorSpec::ProxTLambda {
                f1: f1.clone(),
                f2: f2.clone(),
                lambda: S::Real::one(),
            },
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            OperatorSpec::TLambda { .. } => "t_lambda",
            OperatorSpec::Raar { .. } => "raar",
            OperatorSpec::ProxTLambda { .. } => "prox_t_lambda",
        }
    }

    pub fn describe(&self) -> String {
        match self {
            OperatorSpec::TLambda { a, b, lambda } => {
                format!(
                    "t_lambda(lambda={lambda}, A={}, B={})",
                    a.describe(),
                    b.describe()
                )
            }
            OperatorSpec::Raar { a, b, beta } => {
                format!("raar(beta={beta}, A={}, B={})", a.describe(), b.describe())
            }
            OperatorSpec::ProxTLambda { f1, f2, lambda } => {
                format!(
                    "prox_t_lambda(lambda={lambda}, f1={}, f2={})",
                    f1.describe(),
                    f2.describe()
                )
            }
        }
    }

    pub fn dim(&self) -> Option<usize> {
        self.sets().map(|(a, _)| a.dim())
    }

    /// Inner map: `P_B` or `prox_{f2}`.
    pub fn inner(&self, x: &Point<S>) -> Result<Point<S>> {
        match self {
            OperatorSpec::TLambda { b, .. } | OperatorSpec::Raar { b, .. } => b.project(x),
            OperatorSpec::ProxTLambda { f2, .. } => f2.apply(x),
        }
    }

    /// Outer map: `P_A` or `prox_{f1}`.
    pub fn outer(&self, x: &Point<S>) -> Result<Point<S>> {
        match self {
            OperatorSpec::TLambda { a, .. } | OperatorSpec::Raar { a, .. } => a.project(x),
            OperatorSpec::ProxTLambda { f1, .. } => f1.apply(x),
        }
    }

    /// One step given the already computed inner image `inner_x` of `x`.
    pub fn step_with_inner(&self, x: &Point<S>, inner_x: &Point<S>) -> Result<Point<S>> {
        match self {
            OperatorSpec::TLambda { lambda, .. } | OperatorSpec::ProxTLambda { lambda, .. } => {
                let outer = self.outer(&relax(*lambda, inner_x, x))?;
                Ok(&outer - &(inner_x - x).scaled(*lambda))
            }
            OperatorSpec::Raar { beta, .. } => {
                let one = S::Real::one();
                let two = one + one;
                let reflected = relax(one, inner_x, x);
                let outer = self.outer(&reflected)?;
                let partial = Point::lincomb(*beta, &outer, one - two * *beta, inner_x);
                Ok(&partial + &x.scaled(*beta))
            }
        }
    }

    /// One application of the operator.
    pub fn step(&self, x: &Point<S>) -> Result<Point<S>> {
        let inner_x = self.inner(x)?;
        self.step_with_inner(x, &inner_x)
    }
}

/// One application of `op` to `x`.
pub fn step<S: Scalar>(op: &OperatorSpec<S>, x: &Point<S>) -> Result<Point<S>> {
    op.step(x)
}

/// `R_{A,lambda}(R_{B,lambda}(x))`, which equals `(1 + lambda) T_lambda x -
/// lambda x`.
pub fn composed_reflector_step<S: Scalar>(op: &OperatorSpec<S>, x: &Point<S>) -> Result<Point<S>> {
    let lambda = match op {
        OperatorSpec::TLambda { lambda, .. } | OperatorSpec::ProxTLambda { lambda, .. } => *lambda,
        OperatorSpec::Raar { .. } => {
            return Err(Error::UnsupportedOperator(
                "composed reflector needs the T_lambda family",
            ))
        }
    };
    let rb = relax(lambda, &op.inner(x)?, x);
    Ok(relax(lambda, &op.outer(&rb)?, &rb))
}

/// `(1 - lambda) T_0 x + lambda T_1 x`; equals `T_lambda x` when `a` is
/// affine.
pub fn convex_combination_step<S: Scalar>(
    a: &Arc<SetSpec<S>>,
    b: &Arc<SetSpec<S>>,
    lambda: S::Real,
    x: &Point<S>,
) -> Result<Point<S>> {
    if !a.is_affine() {
        return Err(Error::NotAffine("outer set of the convex combination"));
    }
    let ap = OperatorSpec::t_lambda(a.clone(), b.clone(), S::Real::zero())?;
    let dr = OperatorSpec::t_lambda(a.clone(), b.clone(), S::Real::one())?;
    check_lambda(lambda)?;
    let inner_x = b.project(x)?;
    Ok(Point::lincomb(
        S::Real::one() - lambda,
        &ap.step_with_inner(x, &inner_x)?,
        lambda,
        &dr.step_with_inner(x, &inner_x)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[f64]) -> Point<f64> {
        Point::new(v.to_vec()).unwrap()
    }

    fn axes() -> (Arc<SetSpec<f64>>, Arc<SetSpec<f64>>) {
        (
            Arc::new(SetSpec::line_through_origin(p(&[1.0, 0.0])).unwrap()),
            Arc::new(SetSpec::line_through_origin(p(&[0.0, 1.0])).unwrap()),
        )
    }

    fn close(a: &Point<f64>, b: &[f64]) -> bool {
        a.distance(&p(b)) < 1e-14
    }

    #[test]
    fn reflector_examples() {
        let (_, b) = axes();
        let x = p(&[1.0, 1.0]);
        assert!(close(&reflect(&b, 0.5, &x).unwrap(), &[-0.5, 1.0]));
        assert!(close(&reflect(&b, 1.0, &x).unwrap(), &[-1.0, 1.0]));
        assert_eq!(reflect(&b, 0.0, &x).unwrap(), b.project(&x).unwrap());
        assert!(reflect(&b, 1.5, &x).is_err());
    }

    #[test]
    fn step_examples() {
        let (a, b) = axes();
        let x = p(&[1.0, 1.0]);
        let t = OperatorSpec::t_lambda(a.clone(), b.clone(), 0.5).unwrap();
        assert!(close(&t.step(&x).unwrap(), &[0.0, 0.0]));
        let dr = OperatorSpec::t_lambda(a.clone(), b.clone(), 1.0).unwrap();
        assert!(close(&dr.step(&x).unwrap(), &[0.0, 0.0]));
        let raar = OperatorSpec::raar(a.clone(), b.clone(), 0.5).unwrap();
        assert!(close(&raar.step(&x).unwrap(), &[0.0, 0.5]));

        let angle = std::f64::consts::PI / 3.0;
        let b60 = SetSpec::line_through_origin(p(&[angle.cos(), angle.sin()])).unwrap();
        let ap = OperatorSpec::t_lambda(a, b60, 0.0).unwrap();
        assert!(close(&ap.step(&p(&[1.0, 0.0])).unwrap(), &[0.25, 0.0]));
    }

    #[test]
    fn composed_reflector_examples() {
        let (a, b) = axes();
        let x = p(&[1.0, 1.0]);
        let t = OperatorSpec::t_lambda(a.clone(), b.clone(), 0.5).unwrap();
        assert!(close(
            &composed_reflector_step(&t, &x).unwrap(),
            &[-0.5, -0.5]
        ));
        let dr = OperatorSpec::t_lambda(a.clone(), b.clone(), 1.0).unwrap();
        assert!(close(
            &composed_reflector_step(&dr, &x).unwrap(),
            &[-1.0, -1.0]
        ));
        let ap = OperatorSpec::t_lambda(a.clone(), b.clone(), 0.0).unwrap();
        assert_eq!(
            composed_reflector_step(&ap, &x).unwrap(),
            a.project(&b.project(&x).unwrap()).unwrap()
        );
        let raar = OperatorSpec::raar(a, b, 0.5).unwrap();
        assert!(composed_reflector_step(&raar, &x).is_err());
    }

    #[test]
    fn convex_combination_examples() {
        let (a, b) = axes();
        let x = p(&[1.0, 1.0]);
        assert!(close(
            &convex_combination_step(&a, &b, 0.5, &x).unwrap(),
            &[0.0, 0.0]
        ));
        let sparse: Arc<SetSpec<f64>> = Arc::new(SetSpec::sparsity(2, 1).unwrap());
        assert!(matches!(
            convex_combination_step(&sparse, &b, 0.5, &x),
            Err(Error::NotAffine(_))
        ));
    }

    #[test]
    fn parameter_validation_and_flags() {
        let (a, b) = axes();
        assert!(OperatorSpec::t_lambda(a.clone(), b.clone(), -0.1).is_err());
        assert!(OperatorSpec::raar(a.clone(), b.clone(), 1.0).is_err());
        assert!(OperatorSpec::raar(a.clone(), b.clone(), 0.0).is_err());
        let three: Arc<SetSpec<f64>> = Arc::new(SetSpec::sparsity(3, 1).unwrap());
        assert!(OperatorSpec::t_lambda(a.clone(), three, 0.5).is_err());
        assert!(OperatorSpec::t_lambda(a.clone(), b.clone(), 0.0)
            .unwrap()
            .is_ap());
        assert!(OperatorSpec::t_lambda(a, b, 1.0).unwrap().is_dr());
    }

    #[test]
    fn prox_family_matches_set_family() {
        let (a, b) = axes();
        let f1 = ProxTerm::indicator(a.clone(), 1.0).unwrap();
        let f2 = ProxTerm::indicator(b.clone(), 2.0).unwrap();
        let x = p(&[0.3, -2.0]);
        for lambda in [0.0, 0.3, 1.0] {
            let px = OperatorSpec::prox_t_lambda(f1.clone(), f2.clone(), lambda).unwrap();
            let sx = OperatorSpec::t_lambda(a.clone(), b.clone(), lambda).unwrap();
            assert_eq!(px.step(&x).unwrap(), sx.step(&x).unwrap());
        }
    }

    #[test]
    fn prox_dr_with_l1() {
        // lambda = 1: prox_f1(2 prox_f2 x - x) - prox_f2 x + x
        let (a, _) = axes();
        let f1 = ProxTerm::indicator(a, 1.0).unwrap();
        let f2 = ProxTerm::l1(0.5).unwrap();
        let op = OperatorSpec::prox_t_lambda(f1, f2, 1.0).unwrap();
        let x = p(&[2.0, 1.0]);
        // prox_f2 x = (1.5, 0.5); reflected (1, 0); P_A -> (1, 0); minus (1.5,0.5) plus (2,1)
        assert!(close(&op.step(&x).unwrap(), &[1.5, 0.5]));
    }
}
