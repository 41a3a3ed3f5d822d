//! Shared arguments, the run configuration and instance resolution.

use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, ValueEnum};
use relaxdr::engine::{StoppingRule, DEFAULT_TOLERANCE, DEFAULT_WARMUP};
use relaxdr::problems::{
    gen_geometry, gen_sparse_affine, gen_sparse_fourier, load_any, AnyInstance, GeometryKind,
};
use serde::Serialize;

use crate::CliError;

/// Default output directory when neither `--out-dir` nor `RELAXDR_OUT` is set.
pub const DEFAULT_OUT_DIR: &str = "relaxdr-out";

pub const CONSISTENT_LAMBDA: f64 = 0.45;
pub const CONSISTENT_BETA: f64 = 0.65;
pub const INCONSISTENT_LAMBDA: f64 = 0.40;
pub const INCONSISTENT_BETA: f64 = 0.60;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorKind {
    SparseAffine,
    SparseFourier,
    LinesAtAngle,
    ParallelLines,
    OrthogonalAxes,
}

/// Generator specification; enough to rebuild an instance from scratch.
#[derive(Args, Clone, Debug, Serialize)]
pub struct GeneratorArgs {
    /// Instance family.
    #[arg(long, value_enum)]
    pub kind: Option<GeneratorKind>,
    /// Ambient dimension.
    #[arg(long, default_value_t = 256)]
    pub n: usize,
    /// Number of linear measurements (sparse-affine).
    #[arg(long, default_value_t = 64)]
    pub m: usize,
    /// Sparsity of the generating signal.
    #[arg(long = "k", default_value_t = 8)]
    pub k_true: usize,
    /// Sparsity level of the constraint set.
    #[arg(long, default_value_t = 10)]
    pub s: usize,
    /// Generator seed.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Standard deviation of additive Gaussian noise on `b` (sparse-affine).
    #[arg(long)]
    pub noise: Option<f64>,
    /// Fraction of Fourier coefficients observed (sparse-fourier).
    #[arg(long, default_value_t = 0.125)]
    pub fraction: f64,
    /// Poisson noise on the Fourier moduli (sparse-fourier).
    #[arg(long)]
    pub poisson: bool,
    /// Angle between the lines in degrees (lines-at-angle).
    #[arg(long, default_value_t = 45.0)]
    pub degrees: f64,
    /// Offset of the second line (parallel-lines).
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub offset: f64,
    /// Ambient dimension of geometry instances.
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
}

impl GeneratorArgs {
    pub fn build(&self) -> Result<AnyInstance, CliError> {
        let Some(kind) = self.kind else {
            return Err(CliError::Usage(
                "--kind is required without --instance".into(),
            ));
        };
        let inst = match kind {
            GeneratorKind::SparseAffine => AnyInstance::Real(gen_sparse_affine(
                self.n,
                self.m,
                self.k_true,
                self.s,
                self.seed,
                self.noise,
            )?),
            GeneratorKind::SparseFourier => AnyInstance::Complex(gen_sparse_fourier::<f64>(
                self.n,
                self.fraction,
                self.k_true,
                self.s,
                self.seed,
                self.poisson,
            )?),
            GeneratorKind::LinesAtAngle => AnyInstance::Real(gen_geometry(
                GeometryKind::LinesAtAngle {
                    degrees: self.degrees,
                },
                self.dim,
            )?),
            GeneratorKind::ParallelLines => AnyInstance::Real(gen_geometry(
                GeometryKind::ParallelLines {
                    offset: self.offset,
                },
                self.dim,
            )?),
            GeneratorKind::OrthogonalAxes => {
                AnyInstance::Real(gen_geometry(GeometryKind::OrthogonalAxes, self.dim)?)
            }
        };
        Ok(inst)
    }
}

/// Exactly one of `--instance` or `--kind`.
#[derive(Args, Clone, Debug, Serialize)]
#[command(group(ArgGroup::new("source").required(true).args(["instance", "kind"])))]
pub struct SourceArgs {
    /// Instance file written by `generate`.
    #[arg(long)]
    pub instance: Option<PathBuf>,
    #[command(flatten)]
    pub generator: GeneratorArgs,
}

impl SourceArgs {
    pub fn resolve(&self) -> Result<AnyInstance, CliError> {
        match &self.instance {
            Some(path) => load_any(path).map_err(|e| CliError::from_file(path, e)),
            None => self.generator.build(),
        }
    }
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct StopArgs {
    /// Stop once `|x_k - x_{k+1}|` drops below this.
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
    /// Douglas-Rachford warm-up steps (0 to 100).
    #[arg(long, default_value_t = DEFAULT_WARMUP)]
    pub warmup: usize,
    /// Seed of the Gaussian starting point.
    #[arg(long, default_value_t = 0)]
    pub start_seed: u64,
}

impl StopArgs {
    pub fn rule(&self) -> Result<StoppingRule, CliError> {
        Ok(StoppingRule::new(self.tol, self.max_iter)?)
    }
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct OutArgs {
    /// Output directory.
    #[arg(long, env = "RELAXDR_OUT", default_value = DEFAULT_OUT_DIR)]
    pub out_dir: PathBuf,
}

impl OutArgs {
    /// Creates the directory and checks that it accepts files.
    pub fn prepare(&self) -> Result<&Path, CliError> {
        let dir = self.out_dir.as_path();
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::File(format!("{}: {e}", dir.display())))?;
        tempfile::NamedTempFile::new_in(dir)
            .map_err(|e| CliError::File(format!("{} is not writable: {e}", dir.display())))?;
        Ok(dir)
    }
}

/// Everything needed to rerun a command; stored next to its outputs.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub source: SourceArgs,
    pub lambdas: Vec<f64>,
    pub betas: Vec<f64>,
    pub stop: StopArgs,
    pub out_dir: PathBuf,
    pub version: &'static str,
}

impl RunConfig {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn to_compact_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

/// Default `(lambda, beta)` for an instance.
pub fn default_parameters(consistent: bool) -> (f64, f64) {
    if consistent {
        (CONSISTENT_LAMBDA, CONSISTENT_BETA)
    } else {
        (INCONSISTENT_LAMBDA, INCONSISTENT_BETA)
    }
}

pub fn is_consistent(inst: &AnyInstance) -> bool {
    match inst {
        AnyInstance::Real(i) => i.is_consistent(),
        AnyInstance::Complex(i) => i.is_consistent(),
    }
}
