//! Picard iteration driver.
//!
//! [`run`] performs an optional Douglas-Rachford warm-up on the same sets,
//! then iterates the operator until the change `|x_k - x_{k+1}|` drops below
//! the tolerance, the iteration budget runs out, or the iterates blow up.
//! Warm-up steps are not part of the trace.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::write_atomic;
use crate::numkit::{Point, Real, Scalar};
use crate::operators::OperatorSpec;
use crate::sets::DistanceOracle;

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_WARMUP: usize = 10;
pub const MAX_WARMUP: usize = 100;
pub const DEFAULT_THINNING: usize = 10;
pub const DEFAULT_DIVERGENCE_FACTOR: f64 = 1e12;
pub const TRACE_SCHEMA: &str = "v1";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StoppingRule {
    /// Stop once the change falls strictly below this value.
    pub tolerance: f64,
    pub max_iter: usize,
    /// Divergence bound is `divergence_factor * (1 + |x_0|)`.
    pub divergence_factor: f64,
}

impl StoppingRule {
    pub fn new(tolerance: f64, max_iter: usize) -> Result<Self> {
        if !(tolerance >= 0.0) || !tolerance.is_finite() {
            return Err(Error::InvalidParams(format!(
                "tolerance must be finite and >= 0, got {tolerance}"
            )));
        }
        if max_iter == 0 {
            return Err(Error::InvalidParams("max_iter must be at least 1".into()));
        }
        Ok(Self {
            tolerance,
            max_iter,
            divergence_factor: DEFAULT_DIVERGENCE_FACTOR,
        })
    }

    pub fn with_divergence_factor(mut self, factor: f64) -> Result<Self> {
        if !(factor > 0.0) {
            return Err(Error::InvalidParams(format!(
                "divergence factor must be positive, got {factor}"
            )));
        }
        self.divergence_factor = factor;
        Ok(self)
    }
}

impl Default for StoppingRule {
    fn default() -> Self {
        Self {
            tolerance: DEFAULT_TOLERANCE,
            max_iter: 10_000,
            divergence_factor: DEFAULT_DIVERGENCE_FACTOR,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Tolerance,
    MaxIter,
    Divergence,
}

impl std::fmt::Display for StopReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            StopReason::Tolerance => "tolerance",
            StopReason::MaxIter => "max_iter",
            StopReason::Divergence => "divergence",
        })
    }
}

/// One iteration after warm-up. `change` is `|x_{k-1} - x_k|`; the set
/// distances are evaluated at `x_k` and the gap at its shadow `P_B x_k`.
/// Distances are `None` when the operator is not built from sets.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterationRecord<R> {
    pub k: usize,
    pub change: R,
    pub gap: Option<R>,
    pub dist_a: Option<R>,
    pub dist_b: Option<R>,
    pub dist_solution: Option<R>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceMetadata {
    pub schema: String,
    pub operator: String,
    pub operator_kind: String,
    pub seed: Option<u64>,
    pub stop_reason: StopReason,
    pub iterations: usize,
    pub wall_time_secs: f64,
    pub warmup: usize,
    pub warmup_excluded: bool,
    pub tolerance: f64,
    pub max_iter: usize,
    pub divergence_bound: f64,
    pub thinning: usize,
    /// Free-form provenance (generator parameters, interpretations).
    #[serde(default)]
    pub notes: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterationTrace<S: Scalar> {
    pub records: Vec<IterationRecord<S::Real>>,
    /// Thinned iterates `(k, x_k)`; always ends with the final iterate.
    pub iterates: Vec<(usize, Point<S>)>,
    pub final_point: Point<S>,
    pub metadata: TraceMetadata,
}

impl<S: Scalar> IterationTrace<S> {
    pub fn stop_reason(&self) -> StopReason {
        self.metadata.stop_reason
    }

    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    pub fn last(&self) -> Option<&IterationRecord<S::Real>> {
        self.records.last()
    }

    pub fn changes(&self) -> Vec<S::Real> {
        self.records.iter().map(|r| r.change).collect()
    }

    pub fn gaps(&self) -> Vec<S::Real> {
        self.records.iter().filter_map(|r| r.gap).collect()
    }

    pub fn solution_distances(&self) -> Vec<S::Real> {
        self.records
            .iter()
            .filter_map(|r| r.dist_solution)
            .collect()
    }
}

/// Observer invoked after every recorded iteration.
pub trait Monitor<S: Scalar> {
    fn observe(&mut self, record: &IterationRecord<S::Real>, x: &Point<S>);
}

impl<S: Scalar, F: FnMut(&IterationRecord<S::Real>, &Point<S>)> Monitor<S> for F {
    fn observe(&mut self, record: &IterationRecord<S::Real>, x: &Point<S>) {
        self(record, x)
    }
}

pub struct RunOptions<'a, S: Scalar> {
    /// Douglas-Rachford steps before the traced iteration, at most
    /// [`MAX_WARMUP`].
    pub warmup: usize,
    /// Store `x_k` when `k` is a multiple of this; 0 keeps only the final one.
    pub thinning: usize,
    pub solution: Option<&'a dyn DistanceOracle<S>>,
    /// Evaluate distances to `A` and `B` and the shadow gap.
    pub record_distances: bool,
    /// Carried into the metadata.
    pub seed: Option<u64>,
    pub notes: BTreeMap<String, String>,
}

impl<S: Scalar> Default for RunOptions<'_, S> {
    fn default() -> Self {
        Self {
            warmup: DEFAULT_WARMUP,
            thinning: DEFAULT_THINNING,
            solution: None,
            record_distances: true,
            seed: None,
            notes: BTreeMap::new(),
        }
    }
}

impl<'a, S: Scalar> RunOptions<'a, S> {
    pub fn warmup(mut self, warmup: usize) -> Self {
        self.warmup = warmup;
        self
    }

    pub fn thinning(mut self, thinning: usize) -> Self {
        self.thinning = thinning;
        self
    }

    pub fn solution(mut self, oracle: &'a dyn DistanceOracle<S>) -> Self {
        self.solution = Some(oracle);
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn note(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.notes.insert(key.into(), value.into());
        self
    }

    pub fn record_distances(mut self, on: bool) -> Self {
        self.record_distances = on;
        self
    }
}

/// Projection of `x` onto the inner set `B` (the inner prox map for prox
/// operators).
pub fn shadow<S: Scalar>(op: &OperatorSpec<S>, x: &Point<S>) -> Result<Point<S>> {
    op.inner(x)
}

/// `dist^2(P_B x, A) + dist^2(P_B x, B)`.
pub fn gap<S: Scalar>(op: &OperatorSpec<S>, x: &Point<S>) -> Result<S::Real> {
    let shadow = shadow(op, x)?;
    gap_at_shadow(op, &shadow)?.ok_or(Error::UnsupportedOperator(
        "gap needs an operator over two sets",
    ))
}

fn gap_at_shadow<S: Scalar>(op: &OperatorSpec<S>, shadow: &Point<S>) -> Result<Option<S::Real>> {
    let Some((a, b)) = op.sets() else {
        return Ok(None);
    };
    let da = a.distance(shadow)?;
    let db = b.distance(shadow)?;
    Ok(Some(da * da + db * db))
}

fn distances<S: Scalar>(
    op: &OperatorSpec<S>,
    x: &Point<S>,
    shadow: &Point<S>,
) -> Result<(Option<S::Real>, Option<S::Real>)> {
    let Some((a, _)) = op.sets() else {
        return Ok((None, None));
    };
    Ok((Some(a.distance(x)?), Some(x.distance(shadow))))
}

/// Monitors are called in order after each recorded iteration.
pub fn run<S: Scalar>(
    op: &OperatorSpec<S>,
    x0: &Point<S>,
    rule: &StoppingRule,
    options: &RunOptions<'_, S>,
    monitors: &mut [&mut dyn Monitor<S>],
) -> Result<IterationTrace<S>> {
    if !x0.is_finite() {
        return Err(Error::NonFinite {
            index: x0.iter().position(|v| !v.is_finite()).unwrap_or(0),
        });
    }
    if let Some(d) = op.dim() {
        x0.check_dim(d)?;
    }
    if options.warmup > MAX_WARMUP {
        return Err(Error::InvalidParams(format!(
            "warm-up must be at most {MAX_WARMUP}, got {}",
            options.warmup
        )));
    }
    let started = Instant::now();
    let bound = rule.divergence_factor * (1.0 + x0.norm().to_f64_lossy());
    let tol = S::Real::lit(rule.tolerance);

    let mut x = x0.clone();
    let dr = op.douglas_rachford();
    for _ in 0..options.warmup {
        x = dr.step(&x)?;
    }

    let mut records = Vec::new();
    let mut iterates = Vec::new();
    let mut inner = op.inner(&x)?;
    let mut stop = StopReason::MaxIter;
    for k in 1..=rule.max_iter {
        let next = op.step_with_inner(&x, &inner)?;
        let change = x.distance(&next);
        if !next.is_finite() || !change.is_finite() || next.norm().to_f64_lossy() > bound {
            records.push(IterationRecord {
                k,
                change: if change.is_finite() {
                    change
                } else {
                    S::Real::infinity()
                },
                gap: None,
                dist_a: None,
                dist_b: None,
                dist_solution: None,
            });
            stop = StopReason::Divergence;
            break;
        }
        x = next;
        inner = op.inner(&x)?;
        let (dist_a, dist_b, gap) = if options.record_distances {
            let (da, db) = distances(op, &x, &inner)?;
            (da, db, gap_at_shadow(op, &inner)?)
        } else {
            (None, None, None)
        };
        let dist_solution = options.solution.map(|o| o.distance_to(&x)).transpose()?;
        let record = IterationRecord {
            k,
            change,
            gap,
            dist_a,
            dist_b,
            dist_solution,
        };
        for m in monitors.iter_mut() {
            m.observe(&record, &x);
        }
        records.push(record);
        if options.thinning > 0 && k % options.thinning == 0 {
            iterates.push((k, x.clone()));
        }
        if change < tol {
            stop = StopReason::Tolerance;
            break;
        }
    }
    let last_k = records.last().map_or(0, |r| r.k);
    if iterates.last().map(|(k, _)| *k) != Some(last_k) {
        iterates.push((last_k, x.clone()));
    }
    let metadata = TraceMetadata {
        schema: TRACE_SCHEMA.into(),
        operator: op.describe(),
        operator_kind: op.kind_name().into(),
        seed: options.seed,
        stop_reason: stop,
        iterations: records.len(),
        wall_time_secs: started.elapsed().as_secs_f64(),
        warmup: options.warmup,
        warmup_excluded: true,
        tolerance: rule.tolerance,
        max_iter: rule.max_iter,
        divergence_bound: bound,
        thinning: options.thinning,
        notes: options.notes.clone(),
    };
    Ok(IterationTrace {
        records,
        iterates,
        final_point: x,
        metadata,
    })
}

pub const CSV_HEADER: [&str; 6] = ["k", "change", "gap", "distA", "distB", "dist_solution"];

fn fmt_opt<R: Real>(v: Option<R>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// CSV text of the per-iteration records; absent values are empty fields.
pub fn trace_to_csv<R: Real>(records: &[IterationRecord<R>]) -> String {
    let mut out = CSV_HEADER.join(",");
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.k,
            r.change,
            fmt_opt(r.gap),
            fmt_opt(r.dist_a),
            fmt_opt(r.dist_b),
            fmt_opt(r.dist_solution)
        );
    }
    out
}

/// Parses CSV produced by [`trace_to_csv`].
pub fn trace_from_csv<R: Real>(text: &str) -> Result<Vec<IterationRecord<R>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| csv_error(e, "header"))?
        .clone();
    if header.iter().collect::<Vec<_>>() != CSV_HEADER {
        return Err(Error::Parse {
            line: Some(1),
            field: "header".into(),
            message: format!("expected columns {}", CSV_HEADER.join(",")),
        });
    }
    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| csv_error(e, "row"))?;
        let line = row.position().map(|p| p.line() as usize);
        let field = |i: usize| -> Result<Option<R>> {
            let raw = row.get(i).unwrap_or("");
            if raw.is_empty() {
                return Ok(None);
            }
            raw.parse::<f64>()
                .map(|v| Some(R::lit(v)))
                .map_err(|e| Error::Parse {
                    line,
                    field: CSV_HEADER[i].into(),
                    message: e.to_string(),
                })
        };
        let k = row
            .get(0)
            .unwrap_or("")
            .parse::<usize>()
            .map_err(|e| Error::Parse {
                line,
                field: "k".into(),
                message: e.to_string(),
            })?;
        records.push(IterationRecord {
            k,
            change: field(1)?.ok_or_else(|| Error::Parse {
                line,
                field: "change".into(),
                message: "missing value".into(),
            })?,
            gap: field(2)?,
            dist_a: field(3)?,
            dist_b: field(4)?,
            dist_solution: field(5)?,
        });
    }
    Ok(records)
}

fn csv_error(e: csv::Error, field: &str) -> Error {
    Error::Parse {
        line: e.position().map(|p| p.line() as usize),
        field: field.into(),
        message: e.to_string(),
    }
}

/// Sidecar path `<stem>.meta.json` next to a trace CSV.
pub fn metadata_path(csv_path: &Path) -> PathBuf {
    let stem = csv_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    csv_path.with_file_name(format!("{stem}.meta.json"))
}

/// Writes the trace CSV and its metadata sidecar atomically.
pub fn save_trace<S: Scalar>(trace: &IterationTrace<S>, csv_path: &Path) -> Result<()> {
    write_atomic(csv_path, trace_to_csv(&trace.records).as_bytes())?;
    let meta = serde_json::to_string_pretty(&trace.metadata)
        .map_err(|e| Error::parse("metadata", e.to_string()))?;
    write_atomic(&metadata_path(csv_path), meta.as_bytes())
}

/// Loads a trace CSV and, when present, its metadata sidecar.
pub fn load_trace<R: Real>(
    csv_path: &Path,
) -> Result<(Vec<IterationRecord<R>>, Option<TraceMetadata>)> {
    let records = trace_from_csv(&std::fs::read_to_string(csv_path)?)?;
    let meta_path = metadata_path(csv_path);
    let metadata = if meta_path.exists() {
        let text = std::fs::read_to_string(&meta_path)?;
        let meta: TraceMetadata = serde_json::from_str(&text).map_err(|e| Error::Parse {
            line: Some(e.line()),
            field: "metadata".into(),
            message: e.to_string(),
        })?;
        if meta.schema != TRACE_SCHEMA {
            return Err(Error::VersionMismatch {
                expected: TRACE_SCHEMA.into(),
                found: meta.schema,
            });
        }
        Some(meta)
    } else {
        None
    };
    Ok((records, metadata))
}
