//! `analyze`: the constants report plus measurements on affine instances.

use std::path::PathBuf;

use clap::Args;
use relaxdr::analysis::{
    estimate_gap_vector, estimate_kappa, estimate_rate, fixed_point_set_affine,
    friedrichs_cosine_flats, hull_directions, kappa_from_theta, ConstantsInput, ConstantsReport,
    RateQuantity, Region, DEFAULT_TAIL_FRACTION, GAP_MAX_ITER,
};
use relaxdr::engine::{run, RunOptions, StoppingRule};
use relaxdr::numkit::{Point, SeededRng};
use relaxdr::problems::{load_any, AnyInstance, ProblemInstance};

use crate::config::{GeneratorArgs, CONSISTENT_LAMBDA};
use crate::CliError;

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    /// Transversality constant; defaults to the measured one with an instance.
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long, default_value_t = CONSISTENT_LAMBDA)]
    lambda: f64,
    /// Violation of the projectors.
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
    /// Averaging constant of the projectors.
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    /// Regularity radius.
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    /// Use this subregularity constant instead of the one implied by theta.
    #[arg(long)]
    kappa: Option<f64>,
    /// Instance to measure.
    #[arg(long, conflicts_with = "kind")]
    instance: Option<PathBuf>,
    #[command(flatten)]
    generator: GeneratorArgs,
    /// Sample count for the subregularity estimate.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Radius of the sampling ball around the intersection.
    #[arg(long, default_value_t = 0.1)]
    radius: f64,
    #[arg(long, default_value_t = 0)]
    sample_seed: u64,
}

/// Measurements on an affine pair, printed as `instance.*` keys.
#[derive(Default)]
struct Measured {
    lines: Vec<(String, String)>,
    theta_bar: Option<f64>,
}

impl Measured {
    fn push(&mut self, key: &str, value: impl ToString) {
        self.lines
            .push((format!("instance.{key}"), value.to_string()));
    }
}

fn measure(inst: &ProblemInstance<f64>, args: &AnalyzeArgs) -> Result<Measured, CliError> {
    let mut m = Measured::default();
    m.push("name", inst.name());
    m.push("consistent", inst.is_consistent());
    let (Some(fa), Some(fb)) = (inst.a().flat(), inst.b().flat()) else {
        m.push("theta_bar", "not computed (pair is not affine)");
        return Ok(m);
    };
    if fa.intersect(&fb).is_none() {
        let gap = estimate_gap_vector(inst.a(), inst.b(), GAP_MAX_ITER, args.sample_seed)?;
        m.push("gap_norm", gap.g.norm());
        m.push("theta_bar", "not computed (sets do not intersect)");
        return Ok(m);
    }
    let theta_bar = match friedrichs_cosine_flats(&fa, &fb) {
        Ok(t) => t,
        Err(e) => {
            m.push("theta_bar", format!("not computed ({e})"));
            return Ok(m);
        }
    };
    m.theta_bar = Some(theta_bar);
    m.push("theta_bar", theta_bar);

    let op = inst.t_lambda(args.lambda)?;
    let fix = fixed_point_set_affine(&fa, &fb, args.lambda)?;
    let center: Point<f64> = Point::new(fix.point().to_vec())?;
    let hull = hull_directions(&fa, &fb);
    let region = Region::ball(center.clone(), args.radius)?.restricted(hull.clone())?;
    match estimate_kappa(&op, &fix, &region, args.samples, args.sample_seed) {
        Ok(k) => {
            m.push("kappa_hat", k.kappa);
            m.push("kappa_samples", k.samples_used);
        }
        Err(e) => m.push("kappa_hat", format!("not computed ({e})")),
    }
    if theta_bar < 1.0 {
        m.push("kappa_bound", kappa_from_theta(theta_bar, args.lambda)?);
    }

    let start = Region::ball(center, 1.0)?
        .restricted(hull)?
        .sample(&mut SeededRng::new(args.sample_seed))?;
    let rule = StoppingRule::new(1e-13, 10_000)?;
    let options = RunOptions::default().warmup(0).solution(&fix);
    let trace = run(&op, &start, &rule, &options, &mut [])?;
    match estimate_rate(&trace, RateQuantity::Change, DEFAULT_TAIL_FRACTION) {
        Ok(r) => {
            m.push("rate_fitted", r.factor);
            m.push(
                "rate_window",
                format!("{}..{}", r.window_start, r.window_end),
            );
        }
        Err(e) => m.push("rate_fitted", format!("not computed ({e})")),
    }
    Ok(m)
}

pub fn analyze(args: &AnalyzeArgs) -> Result<(), CliError> {
    let inst = match (&args.instance, args.generator.kind) {
        (Some(path), _) => Some(load_any(path).map_err(|e| CliError::from_file(path, e))?),
        (None, Some(_)) => Some(args.generator.build()?),
        (None, None) => None,
    };
    let measured = match &inst {
        Some(AnyInstance::Real(i)) => Some(measure(i, args)?),
        Some(AnyInstance::Complex(i)) => {
            let mut m = Measured::default();
            m.push("name", i.name());
            m.push(
                "theta_bar",
                "not computed (complex sparsity pair is not convex)",
            );
            Some(m)
        }
        None => None,
    };
    let theta = args
        .theta
        .or(measured
            .as_ref()
            .and_then(|m| m.theta_bar)
            .filter(|t| *t < 1.0))
        .ok_or_else(|| {
            CliError::Usage("--theta is required unless an affine instance provides it".into())
        })?;
    let input = ConstantsInput {
        eps: args.eps,
        alpha: args.alpha,
        lambda: args.lambda,
        theta,
        delta: args.delta,
        kappa: args.kappa,
    };
    let report = ConstantsReport::new(input)?;
    print!("{}", report.render());
    if let Some(m) = measured {
        for (k, v) in m.lines {
            println!("{k} = {v}");
        }
    }
    Ok(())
}
