//! `verify`: self-contained property checks with pass/fail counts.

use std::sync::Arc;
use std::time::Instant;

use clap::Args;
use relaxdr::analysis::{
    averagedness_slack, estimate_gap_vector, estimate_kappa, feasibility_profile,
    fixed_point_set_inconsistent, friedrichs_cosine, kappa_from_theta, Region, GAP_MAX_ITER,
};
use relaxdr::engine::{run, RunOptions, StopReason, StoppingRule};
use relaxdr::numkit::{DenseMatrix, Point, SeededRng};
use relaxdr::operators::{composed_reflector_step, convex_combination_step, OperatorSpec};
use relaxdr::problems::{gen_geometry, GeometryKind};
use relaxdr::sets::{Flat, SetSpec};

use crate::CliError;

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Random cases per identity check.
    #[arg(long, default_value_t = 1000)]
    cases: usize,
    /// Sampled pairs per relaxation in the averagedness check.
    #[arg(long, default_value_t = 10_000)]
    pairs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Default)]
struct Tally {
    passed: usize,
    failed: usize,
    first_failure: Option<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(what());
            }
        }
    }
}

type Suite = fn(&VerifyArgs) -> Result<Tally, relaxdr::Error>;

fn gaussian_matrix(rng: &mut SeededRng, m: usize, n: usize) -> relaxdr::Result<DenseMatrix<f64>> {
    DenseMatrix::new(m, n, (0..m * n).map(|_| rng.normal::<f64>()).collect())
}

fn random_set(rng: &mut SeededRng, n: usize) -> relaxdr::Result<SetSpec<f64>> {
    match rng.below(5) {
        0 => {
            let m = 1 + rng.below(n);
            SetSpec::affine_system(gaussian_matrix(rng, m, n)?, rng.gaussian(m)?)
        }
        1 => SetSpec::line_through_origin(rng.gaussian(n)?),
        2 => SetSpec::affine_line(rng.gaussian(n)?, rng.gaussian(n)?),
        3 => SetSpec::sparsity(n, 1 + rng.below(n)),
        _ => SetSpec::point_set(
            (0..3)
                .map(|_| rng.gaussian(n))
                .collect::<relaxdr::Result<_>>()?,
        ),
    }
}

fn identities(args: &VerifyArgs) -> relaxdr::Result<Tally> {
    let mut t = Tally::default();
    let mut rng = SeededRng::new(args.seed);
    for case in 0..args.cases {
        let n = 1 + rng.below(12);
        let a = Arc::new(random_set(&mut rng, n)?);
        let b = Arc::new(random_set(&mut rng, n)?);
        let lambda: f64 = rng.uniform();
        let x: Point<f64> = rng.gaussian(n)?.scaled(2.0);
        let scale = 1e-10 * (1.0 + x.norm());

        let op = OperatorSpec::t_lambda(a.clone(), b.clone(), lambda)?;
        let tx = op.step(&x)?;
        let lhs = Point::lincomb(1.0 + lambda, &tx, -lambda, &x);
        let d = lhs.distance(&composed_reflector_step(&op, &x)?);
        t.check(d <= scale, || {
            format!("composition identity, case {case}: {d:e}")
        });

        if a.is_affine() {
            let d = tx.distance(&convex_combination_step(&a, &b, lambda, &x)?);
            t.check(d <= scale, || {
                format!("convex combination, case {case}: {d:e}")
            });
        }

        let pb = b.project(&x)?;
        let ap = a.project(&pb)?;
        let dr = &a.project(&(&pb.scaled(2.0) - &x))? - &(&pb - &x);
        let t0 = OperatorSpec::t_lambda(a.clone(), b.clone(), 0.0)?.step(&x)?;
        let t1 = OperatorSpec::t_lambda(a.clone(), b.clone(), 1.0)?.step(&x)?;
        t.check(t0 == ap, || {
            format!("lambda = 0 differs from AP, case {case}")
        });
        t.check(t1 == dr, || {
            format!("lambda = 1 differs from DR, case {case}")
        });
    }
    Ok(t)
}

fn flat_through(rng: &mut SeededRng, z: &Point<f64>, k: usize) -> Flat<f64> {
    let n = z.dim();
    let dirs: Vec<Vec<f64>> = (0..k)
        .map(|_| (0..n).map(|_| rng.normal()).collect())
        .collect();
    Flat::new(z.as_slice().to_vec(), &dirs)
}

fn averagedness(args: &VerifyArgs) -> relaxdr::Result<Tally> {
    let mut t = Tally::default();
    let mut rng = SeededRng::new(args.seed.wrapping_add(1));
    for lambda in [0.0, 0.5, 1.0] {
        let profile = feasibility_profile(0.0, lambda)?;
        let mut left = args.pairs;
        while left > 0 {
            let n = 2 + rng.below(5);
            let z: Point<f64> = rng.gaussian(n)?;
            let ka = 1 + rng.below(n - 1);
            let kb = 1 + rng.below(n - 1);
            let a = flat_through(&mut rng, &z, ka).to_set_spec()?;
            let b = flat_through(&mut rng, &z, kb).to_set_spec()?;
            let op = OperatorSpec::t_lambda(a, b, lambda)?;
            for _ in 0..left.min(100) {
                let x: Point<f64> = rng.gaussian(n)?.scaled(3.0);
                let slack = averagedness_slack(&op, profile, &x, &z)?;
                t.check(slack >= -1e-9, || {
                    format!("lambda {lambda}: slack {slack:e}")
                });
                left -= 1;
            }
        }
    }
    Ok(t)
}

fn kappa_bound(args: &VerifyArgs) -> relaxdr::Result<Tally> {
    let mut t = Tally::default();
    for degrees in [30.0, 45.0, 60.0] {
        let inst = gen_geometry::<f64>(GeometryKind::LinesAtAngle { degrees }, 2)?;
        let theta_bar = friedrichs_cosine(inst.a(), inst.b())?;
        for lambda in [0.0, 0.5, 1.0] {
            let op = inst.t_lambda(lambda)?;
            let origin = SetSpec::point_set(vec![Point::zeros(2)])?;
            let region = Region::ball(Point::zeros(2), 0.1)?;
            let est = estimate_kappa(&op, &origin, &region, 1000, args.seed)?;
            let bound = kappa_from_theta(theta_bar + 0.01, lambda)?;
            t.check(est.kappa >= bound - 1e-9, || {
                format!(
                    "{degrees} deg, lambda {lambda}: kappa_hat {} < {bound}",
                    est.kappa
                )
            });
        }
    }
    Ok(t)
}

fn fixed_points(args: &VerifyArgs) -> relaxdr::Result<Tally> {
    let mut t = Tally::default();
    let inst = gen_geometry::<f64>(GeometryKind::ParallelLines { offset: 1.0 }, 2)?;
    let g = estimate_gap_vector(inst.a(), inst.b(), GAP_MAX_ITER, args.seed)?.g;
    let mut rng = SeededRng::new(args.seed.wrapping_add(2));
    let rule = StoppingRule::new(1e-10, 100_000)?;
    for lambda in [0.0, 0.25, 0.5, 0.75] {
        let op = inst.t_lambda(lambda)?;
        let fix = fixed_point_set_inconsistent(inst.a(), inst.b(), lambda, &g)?;
        let target = -lambda / (1.0 - lambda);
        for start in 0..20 {
            let x0: Point<f64> = rng.gaussian::<f64>(2)?.scaled(5.0);
            let trace = run(&op, &x0, &rule, &RunOptions::default().warmup(0), &mut [])?;
            let y = trace.final_point.as_slice()[1];
            let ok = trace.stop_reason() == StopReason::Tolerance
                && (y - target).abs() <= 1e-7
                && fix.contains_embedded(trace.final_point.as_slice(), 1e-7);
            t.check(ok, || {
                format!("lambda {lambda}, start {start}: y = {y}, expected {target}")
            });
        }
    }
    Ok(t)
}

pub fn verify(args: &VerifyArgs) -> Result<(), CliError> {
    let suites: [(&str, Suite); 4] = [
        ("identities", identities),
        ("averagedness", averagedness),
        ("kappa_bound", kappa_bound),
        ("fixed_points", fixed_points),
    ];
    let (mut passed, mut failed) = (0, 0);
    for (name, suite) in suites {
        let started = Instant::now();
        let tally = suite(args)?;
        let status = if tally.failed == 0 { "PASS" } else { "FAIL" };
        println!(
            "{status} {name}: {}/{} checks passed ({:.2} s)",
            tally.passed,
            tally.passed + tally.failed,
            started.elapsed().as_secs_f64()
        );
        if let Some(f) = &tally.first_failure {
            println!("     first failure: {f}");
        }
        passed += tally.passed;
        failed += tally.failed;
    }
    println!("total: {passed} passed, {failed} failed");
    if failed > 0 {
        return Err(CliError::Verification(format!("{failed} checks failed")));
    }
    Ok(())
}
