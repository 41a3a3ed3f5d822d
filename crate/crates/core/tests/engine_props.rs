use proptest::prelude::*;
use relaxdr::engine::{run, RunOptions, StopReason, StoppingRule};
use relaxdr::numkit::{Point, SeededRng};
use relaxdr::operators::OperatorSpec;
use relaxdr::sets::{Flat, SetSpec};

fn flat_through(rng: &mut SeededRng, z: &Point<f64>, k: usize) -> Flat<f64> {
    let n = z.dim();
    let dirs: Vec<Vec<f64>> = (0..k)
        .map(|_| (0..n).map(|_| rng.normal()).collect())
        .collect();
    Flat::new(z.as_slice().to_vec(), &dirs)
}

/// Two flats through a common point whose direction spaces span `R^n`.
fn spanning_pair(rng: &mut SeededRng, n: usize) -> (SetSpec<f64>, SetSpec<f64>, Flat<f64>) {
    let z: Point<f64> = rng.gaussian(n).unwrap();
    let ka = 1 + rng.below(n - 1);
    let kb = n - ka + rng.below(ka);
    let (fa, fb) = (flat_through(rng, &z, ka), flat_through(rng, &z, kb));
    let fix = fa.intersect(&fb).unwrap();
    (fa.to_set_spec().unwrap(), fb.to_set_spec().unwrap(), fix)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn distance_to_intersection_is_monotone(
        n in 2usize..=8,
        lambda in 0.0f64..=1.0,
        warmup in 0usize..=20,
        seed in any::<u64>(),
    ) {
        let mut rng = SeededRng::new(seed);
        let (a, b, fix) = spanning_pair(&mut rng, n);
        let op = OperatorSpec::t_lambda(a, b, lambda).unwrap();
        let x0: Point<f64> = rng.gaussian(n).unwrap().scaled(4.0);
        let opts = RunOptions::default().warmup(warmup).solution(&fix);
        let trace = run(&op, &x0, &StoppingRule::new(1e-10, 2000).unwrap(), &opts, &mut []).unwrap();
        let d = trace.solution_distances();
        for w in d.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-10, "{} then {}", w[0], w[1]);
        }
    }

    #[test]
    fn identical_inputs_give_identical_traces(
        n in 2usize..=8,
        lambda in 0.0f64..=1.0,
        seed in any::<u64>(),
    ) {
        let mut rng = SeededRng::new(seed);
        let (a, _, _) = spanning_pair(&mut rng, n);
        let b = SetSpec::sparsity(n, 1 + rng.below(n)).unwrap();
        let op = OperatorSpec::t_lambda(a, b, lambda).unwrap();
        let x0: Point<f64> = rng.gaussian(n).unwrap();
        let rule = StoppingRule::new(1e-10, 500).unwrap();
        let opts = RunOptions::default().seed(seed);
        let first = run(&op, &x0, &rule, &opts, &mut []).unwrap();
        let second = run(&op, &x0, &rule, &opts, &mut []).unwrap();
        prop_assert_eq!(&first.records, &second.records);
        prop_assert_eq!(&first.iterates, &second.iterates);
        let bits = |p: &Point<f64>| p.iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(bits(&first.final_point), bits(&second.final_point));
        let mut m2 = second.metadata.clone();
        m2.wall_time_secs = first.metadata.wall_time_secs;
        prop_assert_eq!(first.metadata, m2);
    }

    #[test]
    fn tolerance_stop_iff_last_change_below(
        n in 2usize..=6,
        lambda in 0.0f64..=1.0,
        max_iter in 1usize..200,
        tol_exp in 2i32..12,
        seed in any::<u64>(),
    ) {
        let mut rng = SeededRng::new(seed);
        let (a, b, _) = spanning_pair(&mut rng, n);
        let op = OperatorSpec::t_lambda(a, b, lambda).unwrap();
        let x0: Point<f64> = rng.gaussian(n).unwrap();
        let tol = 10f64.powi(-tol_exp);
        let trace = run(&op, &x0, &StoppingRule::new(tol, max_iter).unwrap(), &RunOptions::default(), &mut []).unwrap();
        let last = trace.last().unwrap();
        prop_assert_eq!(last.change < tol, trace.stop_reason() == StopReason::Tolerance);
        prop_assert!(trace.records.windows(2).all(|w| w[0].k < w[1].k));
        prop_assert!(trace.records.iter().all(|r| r.change >= 0.0));
        prop_assert!(trace.iterations() <= max_iter);
    }
}
