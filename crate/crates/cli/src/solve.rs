//! `solve` and `compare`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use relaxdr::analysis::{estimate_rate, RateQuantity, DEFAULT_TAIL_FRACTION};
use relaxdr::engine::{run, save_trace, IterationTrace, RunOptions, StopReason};
use relaxdr::numkit::{Point, Real, Scalar, SeededRng};
use relaxdr::operators::OperatorSpec;
use relaxdr::problems::{AnyInstance, ProblemInstance};
use relaxdr::sets::DistanceOracle;

use crate::config::{default_parameters, is_consistent, RunConfig, StopArgs};
use crate::{CliError, CompareArgs, OperatorKind, SolveArgs};

#[derive(Clone, Copy, Debug)]
struct Job {
    kind: OperatorKind,
    param: f64,
}

impl Job {
    fn label(&self) -> String {
        match self.kind {
            OperatorKind::TLambda => format!("tlambda_{}", self.param),
            OperatorKind::Raar => format!("raar_{}", self.param),
        }
    }

    fn build<S: Scalar>(&self, inst: &ProblemInstance<S>) -> Result<OperatorSpec<S>, CliError> {
        let p = S::Real::lit(self.param);
        Ok(match self.kind {
            OperatorKind::TLambda => inst.t_lambda(p)?,
            OperatorKind::Raar => inst.raar(p)?,
        })
    }
}

/// Row of the comparison summary.
#[derive(Clone, Debug)]
pub struct Outcome {
    label: String,
    job: Job,
    stop: StopReason,
    iterations: usize,
    wall_time: f64,
    final_change: f64,
    final_gap: Option<f64>,
    rate: Option<f64>,
    path: PathBuf,
}

fn start_point<S: Scalar>(dim: usize, seed: u64) -> Result<Point<S>, CliError> {
    Ok(SeededRng::new(seed).gaussian(dim)?)
}

fn run_job<S: Scalar>(
    inst: &ProblemInstance<S>,
    job: Job,
    x0: &Point<S>,
    stop: &StopArgs,
    config: &str,
) -> Result<IterationTrace<S>, CliError> {
    let op = job.build(inst)?;
    let rule = stop.rule()?;
    let mut options = RunOptions::default()
        .warmup(stop.warmup)
        .note("instance", inst.name())
        .note(
            "instance_generator",
            serde_json::to_string(inst.generator()).expect("generator serializes"),
        )
        .note("start_seed", stop.start_seed.to_string())
        .note("config", config);
    if let Some(seed) = inst.generator().seed {
        options = options.seed(seed);
    }
    if let Some(sol) = inst.solution() {
        options = options.solution(sol as &dyn DistanceOracle<S>);
    }
    Ok(run(&op, x0, &rule, &options, &mut [])?)
}

/// Runs every job concurrently from one starting point and saves the traces.
fn run_jobs<S: Scalar>(
    inst: &ProblemInstance<S>,
    jobs: &[Job],
    stop: &StopArgs,
    config: &str,
    out_dir: &Path,
) -> Result<Vec<Outcome>, CliError> {
    let x0 = start_point::<S>(inst.dim(), stop.start_seed)?;
    let traces: Vec<Result<IterationTrace<S>, CliError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|&job| {
                let x0 = &x0;
                scope.spawn(move || run_job(inst, job, x0, stop, config))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("solver thread panicked"))
            .collect()
    });
    let mut out = Vec::with_capacity(jobs.len());
    for (job, trace) in jobs.iter().zip(traces) {
        let trace = trace?;
        let label = job.label();
        let path = out_dir.join(format!("{label}.csv"));
        save_trace(&trace, &path).map_err(|e| CliError::from_file(&path, e))?;
        let last = trace.last();
        out.push(Outcome {
            label,
            job: *job,
            stop: trace.stop_reason(),
            iterations: trace.iterations(),
            wall_time: trace.metadata.wall_time_secs,
            final_change: last.map_or(f64::NAN, |r| r.change.to_f64_lossy()),
            final_gap: last.and_then(|r| r.gap).map(|g| g.to_f64_lossy()),
            rate: estimate_rate(&trace, RateQuantity::Change, DEFAULT_TAIL_FRACTION)
                .ok()
                .map(|r| r.factor),
            path,
        });
    }
    Ok(out)
}

fn dispatch_jobs(
    inst: &AnyInstance,
    jobs: &[Job],
    stop: &StopArgs,
    config: &str,
    out_dir: &Path,
) -> Result<Vec<Outcome>, CliError> {
    match inst {
        AnyInstance::Real(i) => run_jobs(i, jobs, stop, config, out_dir),
        AnyInstance::Complex(i) => run_jobs(i, jobs, stop, config, out_dir),
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "undefined".into(), |v| format!("{v:e}"))
}

fn write_config(dir: &Path, name: &str, config: &RunConfig) -> Result<(), CliError> {
    let path = dir.join(name);
    relaxdr::io::write_atomic(&path, config.to_json().as_bytes())
        .map_err(|e| CliError::from_file(&path, e))
}

pub fn solve(args: &SolveArgs) -> Result<(), CliError> {
    let inst = args.source.resolve()?;
    let (lambda, beta) = default_parameters(is_consistent(&inst));
    let job = match args.operator {
        OperatorKind::TLambda => Job {
            kind: OperatorKind::TLambda,
            param: args.lambda.unwrap_or(lambda),
        },
        OperatorKind::Raar => Job {
            kind: OperatorKind::Raar,
            param: args.beta.unwrap_or(beta),
        },
    };
    let dir = args.out.prepare()?;
    let config = RunConfig {
        command: "solve".into(),
        source: args.source.clone(),
        lambdas: if job.kind == OperatorKind::TLambda {
            vec![job.param]
        } else {
            vec![]
        },
        betas: if job.kind == OperatorKind::Raar {
            vec![job.param]
        } else {
            vec![]
        },
        stop: args.stop.clone(),
        out_dir: dir.to_path_buf(),
        version: env!("CARGO_PKG_VERSION"),
    };
    let outcome =
        dispatch_jobs(&inst, &[job], &args.stop, &config.to_compact_json(), dir)?.remove(0);
    write_config(dir, &format!("{}.config.json", outcome.label), &config)?;
    println!("instance = {}", inst.name());
    println!("operator = {}", outcome.label);
    println!("stop_reason = {}", outcome.stop);
    println!("iterations = {}", outcome.iterations);
    println!("final_change = {:e}", outcome.final_change);
    println!("final_gap = {}", opt(outcome.final_gap));
    println!(
        "rate_estimate = {}",
        outcome
            .rate
            .map_or_else(|| "undefined".into(), |r| r.to_string())
    );
    println!("trace = {}", outcome.path.display());
    Ok(())
}

const SUMMARY_HEADER: &str =
    "run,operator,parameter,stop_reason,iterations,wall_time_secs,final_change,final_gap,rate";

fn summary_csv(rows: &[Outcome]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for r in rows {
        let kind = match r.job.kind {
            OperatorKind::TLambda => "t_lambda",
            OperatorKind::Raar => "raar",
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{:e},{},{}",
            r.label,
            kind,
            r.job.param,
            r.stop,
            r.iterations,
            r.wall_time,
            r.final_change,
            r.final_gap.map_or_else(String::new, |g| format!("{g:e}")),
            r.rate.map_or_else(String::new, |v| v.to_string()),
        );
    }
    out
}

fn plot_script(rows: &[Outcome]) -> String {
    let files: Vec<String> = rows
        .iter()
        .map(|r| format!("    \"{}.csv\",", r.label))
        .collect();
    format!(
        r#"# Plots the change and gap columns of the traces written by `relaxdr compare`.
import csv
import sys

import matplotlib.pyplot as plt

TRACES = [
{}
]

fig, (ax_change, ax_gap) = plt.subplots(1, 2, figsize=(10, 4))
for name in TRACES:
    with open(name) as fh:
        rows = list(csv.DictReader(fh))
    k = [int(r["k"]) for r in rows]
    ax_change.semilogy(k, [float(r["change"]) for r in rows], label=name)
    gaps = [float(r["gap"]) if r["gap"] else float("nan") for r in rows]
    ax_gap.semilogy(k, gaps, label=name)
ax_change.set_xlabel("iteration")
ax_change.set_ylabel("|x_k - x_(k-1)|")
ax_gap.set_xlabel("iteration")
ax_gap.set_ylabel("gap at shadow")
ax_change.legend()
fig.tight_layout()
fig.savefig(sys.argv[1] if len(sys.argv) > 1 else "compare.png")
"#,
        files.join("\n")
    )
}

pub fn compare(args: &CompareArgs) -> Result<(), CliError> {
    let inst = args.source.resolve()?;
    let (lambda, beta) = default_parameters(is_consistent(&inst));
    let lambdas = if args.lambdas.is_empty() {
        vec![lambda]
    } else {
        args.lambdas.clone()
    };
    let betas = if args.betas.is_empty() {
        vec![beta]
    } else {
        args.betas.clone()
    };
    let jobs: Vec<Job> = lambdas
        .iter()
        .map(|&param| Job {
            kind: OperatorKind::TLambda,
            param,
        })
        .chain(betas.iter().map(|&param| Job {
            kind: OperatorKind::Raar,
            param,
        }))
        .collect();
    let dir = args.out.prepare()?;
    let config = RunConfig {
        command: "compare".into(),
        source: args.source.clone(),
        lambdas,
        betas,
        stop: args.stop.clone(),
        out_dir: dir.to_path_buf(),
        version: env!("CARGO_PKG_VERSION"),
    };
    let rows = dispatch_jobs(&inst, &jobs, &args.stop, &config.to_compact_json(), dir)?;
    write_config(dir, "compare.config.json", &config)?;
    for (name, body) in [
        ("summary.csv", summary_csv(&rows)),
        ("plot_traces.py", plot_script(&rows)),
    ] {
        let path = dir.join(name);
        relaxdr::io::write_atomic(&path, body.as_bytes())
            .map_err(|e| CliError::from_file(&path, e))?;
    }

    println!("instance: {}", inst.name());
    println!(
        "{:<16} {:>12} {:>10} {:>12} {:>12} {:>12} {:>10}",
        "run", "stop", "iters", "wall [s]", "change", "gap", "rate"
    );
    for r in &rows {
        println!(
            "{:<16} {:>12} {:>10} {:>12.4} {:>12.3e} {:>12} {:>10}",
            r.label,
            r.stop.to_string(),
            r.iterations,
            r.wall_time,
            r.final_change,
            opt(r.final_gap),
            r.rate.map_or_else(|| "-".into(), |v| format!("{v:.5}")),
        );
    }
    println!("outputs in {}", dir.display());
    Ok(())
}
