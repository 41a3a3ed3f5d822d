use std::sync::Arc;

use num_traits::{Float, Zero};

use super::SetSpec;
use crate::error::{Error, Result};
use crate::numkit::{Point, Real, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub enum ProxKind<S: Scalar> {
    /// Indicator of a set; its prox is the projector for every stepsize.
    Indicator(Arc<SetSpec<S>>),
    /// `||x||_1`; its prox is componentwise soft thresholding.
    L1Norm,
}

/// A function together with a prox stepsize `tau > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProxTerm<S: Scalar> {
    kind: ProxKind<S>,
    step: S::Real,
}

impl<S: Scalar> ProxTerm<S> {
    pub fn new(kind: ProxKind<S>, step: S::Real) -> Result<Self> {
        if !(step > S::Real::zero()) || !step.is_finite() {
            return Err(Error::InvalidStepsize(step.to_f64_lossy()));
        }
        Ok(Self { kind, step })
    }

    pub fn indicator(set: impl Into<Arc<SetSpec<S>>>, step: S::Real) -> Result<Self> {
        Self::new(ProxKind::Indicator(set.into()), step)
    }

    pub fn l1(step: S::Real) -> Result<Self> {
        Self::new(ProxKind::L1Norm, step)
    }

    pub fn kind(&self) -> &ProxKind<S> {
        &self.kind
    }

    pub fn step(&self) -> S::Real {
        self.step
    }

    pub fn set(&self) -> Option<&SetSpec<S>> {
        match &self.kind {
            ProxKind::Indicator(s) => Some(s),
            ProxKind::L1Norm => None,
        }
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            ProxKind::Indicator(s) => format!("indicator[{}]", s.describe()),
            ProxKind::L1Norm => format!("l1(tau={})", self.step),
        }
    }

    pub fn apply(&self, x: &Point<S>) -> Result<Point<S>> {
        match &self.kind {
            ProxKind::Indicator(set) => set.project(x),
            ProxKind::L1Norm => Ok(x.map(|v| soft_threshold(v, self.step))),
        }
    }
}

fn soft_threshold<S: Scalar>(v: S, tau: S::Real) -> S {
    let m = v.modulus();
    if m <= tau {
        S::zero()
    } else {
        v.scale((m - tau) / m)
    }
}

/// `prox_{tau, f}(x)`.
pub fn prox<S: Scalar>(term: &ProxTerm<S>, x: &Point<S>) -> Result<Point<S>> {
    term.apply(x)
}
