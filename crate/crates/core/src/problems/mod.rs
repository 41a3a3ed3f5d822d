//! Reproducible feasibility instances and their JSON schema.

mod generate;
mod serialize;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::numkit::{Point, Real, Scalar};
use crate::operators::OperatorSpec;
use crate::sets::{SetSpec, MEMBERSHIP_TOL};

pub use crate::engine::{load_trace, save_trace};
pub use generate::{gen_geometry, gen_sparse_affine, gen_sparse_fourier, GeometryKind};
pub use serialize::{
    instance_from_json, instance_to_json, load_any, load_instance, save_instance, AnyInstance,
    Field, INSTANCE_SCHEMA,
};

/// Generator name, seed and parameters; enough to regenerate the instance.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GeneratorInfo {
    pub kind: String,
    pub seed: Option<u64>,
    #[serde(default)]
    pub params: BTreeMap<String, serde_json::Value>,
}

impl GeneratorInfo {
    pub fn new(kind: impl Into<String>, seed: Option<u64>) -> Self {
        Self {
            kind: kind.into(),
            seed,
            params: BTreeMap::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.params.insert(key.into(), value.into());
        self
    }
}

/// Two constraint sets `A` (outer) and `B` (inner) plus what is known about
/// their intersection.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemInstance<S: Scalar> {
    name: String,
    a: Arc<SetSpec<S>>,
    b: Arc<SetSpec<S>>,
    ground_truth: Option<Point<S>>,
    solution: Option<SetSpec<S>>,
    gap_vector: Option<Point<S>>,
    consistent: bool,
    generator: GeneratorInfo,
    notes: BTreeMap<String, String>,
}

impl<S: Scalar> ProblemInstance<S> {
    pub fn new(
        name: impl Into<String>,
        a: impl Into<Arc<SetSpec<S>>>,
        b: impl Into<Arc<SetSpec<S>>>,
        consistent: bool,
        generator: GeneratorInfo,
    ) -> Result<Self> {
        let (a, b) = (a.into(), b.into());
        check_dim(a.dim(), b.dim())?;
        Ok(Self {
            name: name.into(),
            a,
            b,
            ground_truth: None,
            solution: None,
            gap_vector: None,
            consistent,
            generator,
            notes: BTreeMap::new(),
        })
    }

    /// Attaches a ground truth; for consistent instances it must lie in
    /// `A ∩ B` up to [`MEMBERSHIP_TOL`].
    pub fn with_ground_truth(mut self, x: Point<S>) -> Result<Self> {
        x.check_dim(self.dim())?;
        if self.consistent {
            let miss = self.a.distance(&x)? + self.b.distance(&x)?;
            if miss > S::Real::lit(MEMBERSHIP_TOL) {
                return Err(Error::NotOnSet {
                    distance: miss.to_f64_lossy(),
                });
            }
        }
        self.ground_truth = Some(x);
        Ok(self)
    }

    pub fn with_solution(mut self, set: SetSpec<S>) -> Result<Self> {
        check_dim(self.dim(), set.dim())?;
        self.solution = Some(set);
        Ok(self)
    }

    pub fn with_gap_vector(mut self, g: Point<S>) -> Result<Self> {
        g.check_dim(self.dim())?;
        self.gap_vector = Some(g);
        Ok(self)
    }

    pub fn with_note(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.notes.insert(key.into(), value.into());
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn a(&self) -> &Arc<SetSpec<S>> {
        &self.a
    }

    pub fn b(&self) -> &Arc<SetSpec<S>> {
        &self.b
    }

    pub fn ground_truth(&self) -> Option<&Point<S>> {
        self.ground_truth.as_ref()
    }

    /// Known solution set (`A ∩ B` for consistent instances).
    pub fn solution(&self) -> Option<&SetSpec<S>> {
        self.solution.as_ref()
    }

    pub fn gap_vector(&self) -> Option<&Point<S>> {
        self.gap_vector.as_ref()
    }

    pub fn is_consistent(&self) -> bool {
        self.consistent
    }

    pub fn generator(&self) -> &GeneratorInfo {
        &self.generator
    }

    pub fn notes(&self) -> &BTreeMap<String, String> {
        &self.notes
    }

    pub fn t_lambda(&self, lambda: S::Real) -> Result<OperatorSpec<S>> {
        OperatorSpec::t_lambda(self.a.clone(), self.b.clone(), lambda)
    }

    pub fn raar(&self, beta: S::Real) -> Result<OperatorSpec<S>> {
        OperatorSpec::raar(self.a.clone(), self.b.clone(), beta)
    }

    /// `dist(x, A) + dist(x, B)`.
    pub fn infeasibility(&self, x: &Point<S>) -> Result<S::Real> {
        Ok(self.a.distance(x)? + self.b.distance(x)?)
    }
}

fn shape_error(message: String) -> Error {
    Error::InvalidShape(message)
}

fn real_lit<R: Real>(v: f64) -> R {
    R::lit(v)
}
