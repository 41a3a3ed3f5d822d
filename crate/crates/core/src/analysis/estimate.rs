//! Empirical counterparts of the constants: sampled subregularity constant,
//! fitted linear rate and the averagedness slack.

use num_traits::{Float, FromPrimitive, One, Zero};
use serde::{Deserialize, Serialize};

use super::constants::AveragedProfile;
use crate::engine::IterationTrace;
use crate::error::{check_dim, Error, Result};
use crate::numkit::{Point, Real, Scalar, SeededRng};
use crate::operators::OperatorSpec;
use crate::sets::DistanceOracle;

/// Samples closer than this to the fixed-point set are discarded.
pub const KAPPA_MIN_DISTANCE: f64 = 1e-12;
/// Values at or below this floor are excluded from rate fits.
pub const RATE_FLOOR: f64 = 1e-13;
pub const RATE_MIN_VALUES: usize = 10;
pub const RATE_MIN_WINDOW: usize = 5;
pub const DEFAULT_TAIL_FRACTION: f64 = 0.5;

/// `{x : inner <= |x - center| <= outer}`; a ball when `inner = 0`.
///
/// With `span` set, samples stay in `center + span`, given as an orthonormal
/// basis of the real embedding.
#[derive(Clone, Debug, PartialEq)]
pub struct Region<S: Scalar> {
    pub center: Point<S>,
    pub inner: S::Real,
    pub outer: S::Real,
    pub span: Option<Vec<Vec<S::Real>>>,
}

impl<S: Scalar> Region<S> {
    pub fn ball(center: Point<S>, radius: S::Real) -> Result<Self> {
        Self::annulus(center, S::Real::zero(), radius)
    }

    pub fn annulus(center: Point<S>, inner: S::Real, outer: S::Real) -> Result<Self> {
        if !(inner >= S::Real::zero() && outer > inner) {
            return Err(Error::InvalidParams(format!(
                "region needs 0 <= inner < outer, got inner {inner}, outer {outer}"
            )));
        }
        Ok(Self {
            center,
            inner,
            outer,
            span: None,
        })
    }

    pub fn restricted(mut self, basis: Vec<Vec<S::Real>>) -> Result<Self> {
        let d = self.center.dim() * S::PARTS;
        if let Some(v) = basis.iter().find(|v| v.len() != d) {
            check_dim(d, v.len())?;
        }
        if basis.is_empty() {
            return Err(Error::InvalidParams(
                "restriction needs a nonempty basis".into(),
            ));
        }
        self.span = Some(basis);
        Ok(self)
    }

    /// Uniform sample with respect to volume in the real embedding, or in the
    /// restricted flat.
    pub fn sample(&self, rng: &mut SeededRng) -> Result<Point<S>> {
        let full = self.center.dim() * S::PARTS;
        let d = self.span.as_ref().map_or(full, Vec::len);
        let dr = S::Real::from_usize(d).expect("dimension fits");
        let dir: Point<S> = match &self.span {
            None => rng.gaussian(self.center.dim())?,
            Some(basis) => {
                let mut v = vec![S::Real::zero(); full];
                for q in basis {
                    let c: S::Real = rng.normal();
                    v.iter_mut().zip(q).for_each(|(vi, &qi)| *vi = *vi + c * qi);
                }
                Point::from_embedding(&v)?
            }
        };
        let norm = dir.norm();
        let lo = self.inner.powf(dr);
        let hi = self.outer.powf(dr);
        let u: S::Real = rng.uniform();
        let r = (lo + u * (hi - lo)).powf(S::Real::one() / dr);
        let scale = if norm > S::Real::zero() {
            r / norm
        } else {
            S::Real::zero()
        };
        Ok(Point::lincomb(S::Real::one(), &self.center, scale, &dir))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KappaEstimate<S: Scalar> {
    /// `min |x - Tx| / dist(x, Fix)` over the retained samples.
    pub kappa: S::Real,
    pub argmin: Point<S>,
    pub samples_used: usize,
}

/// Smallest observed ratio `|x - Tx| / dist(x, Fix T)` over `samples` seeded
/// draws from `region`. `fix` measures the distance to the fixed-point set.
pub fn estimate_kappa<S: Scalar>(
    op: &OperatorSpec<S>,
    fix: &dyn DistanceOracle<S>,
    region: &Region<S>,
    samples: usize,
    seed: u64,
) -> Result<KappaEstimate<S>> {
    if let Some(d) = op.dim() {
        check_dim(d, region.center.dim())?;
    }
    let floor = S::Real::lit(KAPPA_MIN_DISTANCE);
    let mut rng = SeededRng::new(seed);
    let mut best: Option<(S::Real, Point<S>)> = None;
    let mut used = 0;
    for _ in 0..samples {
        let x = region.sample(&mut rng)?;
        let dist = fix.distance_to(&x)?;
        if dist < floor {
            continue;
        }
        used += 1;
        let ratio = x.distance(&op.step(&x)?) / dist;
        if best.as_ref().is_none_or(|(b, _)| ratio < *b) {
            best = Some((ratio, x));
        }
    }
    let (kappa, argmin) = best.ok_or(Error::NoSamples)?;
    Ok(KappaEstimate {
        kappa,
        argmin,
        samples_used: used,
    })
}

/// Contraction factor fitted to the tail of a sequence.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    pub factor: f64,
    /// Half-open index range `[start, end)` of the fitted window.
    pub window_start: usize,
    pub window_end: usize,
    /// Root-mean-square residual of the log-linear fit.
    pub residual: f64,
}

/// Fits `log v_k = a + k log q` by least squares over the last
/// `tail_fraction` of the leading run of values above [`RATE_FLOOR`].
pub fn fit_geometric_rate<R: Real>(values: &[R], tail_fraction: f64) -> Result<RateEstimate> {
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(Error::InvalidParams(format!(
            "tail fraction must lie in (0, 1], got {tail_fraction}"
        )));
    }
    let usable = values
        .iter()
        .map(|v| v.to_f64_lossy())
        .take_while(|v| v.is_finite() && *v > RATE_FLOOR)
        .count();
    if usable < RATE_MIN_VALUES {
        return Err(Error::InsufficientData(format!(
            "{usable} values above {RATE_FLOOR:e}, need {RATE_MIN_VALUES}"
        )));
    }
    let len = ((usable as f64 * tail_fraction).round() as usize).max(RATE_MIN_WINDOW);
    if len > usable {
        return Err(Error::InsufficientData(format!(
            "window of {len} exceeds {usable} values"
        )));
    }
    let start = usable - len;
    let pts: Vec<(f64, f64)> = (start..usable)
        .map(|k| (k as f64, values[k].to_f64_lossy().ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(RateEstimate {
        factor: slope.exp(),
        window_start: start,
        window_end: usable,
        residual,
    })
}

/// Which trace column to fit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateQuantity {
    Change,
    DistSolution,
    Gap,
}

pub fn estimate_rate<S: Scalar>(
    trace: &IterationTrace<S>,
    quantity: RateQuantity,
    tail_fraction: f64,
) -> Result<RateEstimate> {
    let values = match quantity {
        RateQuantity::Change => trace.changes(),
        RateQuantity::DistSolution => trace.solution_distances(),
        RateQuantity::Gap => trace.gaps(),
    };
    fit_geometric_rate(&values, tail_fraction)
}

/// Slack of the almost-averagedness inequality at the pair `(x, y)`:
///
/// ```text
/// (1 + eps)|x - y|^2 - (1 - alpha)/alpha |(x - Tx) - (y - Ty)|^2 - |Tx - Ty|^2
/// ```
///
/// Nonnegative when the inequality holds.
pub fn averagedness_slack<S: Scalar>(
    op: &OperatorSpec<S>,
    profile: AveragedProfile<S::Real>,
    x: &Point<S>,
    y: &Point<S>,
) -> Result<S::Real> {
    let tx = op.step(x)?;
    let ty = op.step(y)?;
    let one = S::Real::one();
    let dx = &(x - &tx) - &(y - &ty);
    Ok((one + profile.eps) * x.distance(y).powi(2)
        - (one - profile.alpha) / profile.alpha * dx.norm_sqr()
        - tx.distance(&ty).powi(2))
}
