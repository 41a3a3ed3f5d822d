use proptest::prelude::*;
use relaxdr::analysis::{
    averagedness_slack, estimate_kappa, feasibility_profile, friedrichs_cosine_flats,
    kappa_from_theta, predicted_rate, reflector_profile, reflector_profile_inverse,
    AveragedProfile, Region,
};
use relaxdr::numkit::{Point, SeededRng};
use relaxdr::operators::OperatorSpec;
use relaxdr::sets::Flat;

/// Random flat through `z` with `k` Gaussian directions.
fn flat_through(rng: &mut SeededRng, z: &Point<f64>, k: usize) -> Flat<f64> {
    let n = z.dim();
    let dirs: Vec<Vec<f64>> = (0..k)
        .map(|_| (0..n).map(|_| rng.normal()).collect())
        .collect();
    Flat::new(z.as_slice().to_vec(), &dirs)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn reflector_profile_inverts(
        lambda in 0.0f64..=1.0,
        eps in 0.0f64..1.0,
        frac in 0.05f64..=1.0,
    ) {
        let alpha = frac / (1.0 + lambda);
        let r = reflector_profile(eps, alpha, lambda).unwrap();
        let back = reflector_profile_inverse(r, lambda).unwrap();
        prop_assert!((back.eps - eps).abs() <= 1e-12);
        prop_assert!((back.alpha - alpha).abs() <= 1e-12);
    }

    #[test]
    fn raising_violation_never_validates_rate(
        alpha in 0.01f64..=1.0,
        t in 0.0f64..=1.0,
        eps in 0.0f64..2.0,
        bump in 0.0f64..2.0,
    ) {
        // kappa^2 <= alpha/(1 - alpha) keeps the radicand nonnegative at eps = 0.
        let kappa = t * if alpha < 1.0 { (alpha / (1.0 - alpha)).sqrt() } else { 10.0 };
        let lo = predicted_rate(AveragedProfile::new(eps, alpha).unwrap(), kappa);
        let hi = predicted_rate(AveragedProfile::new(eps + bump, alpha).unwrap(), kappa);
        prop_assert!(lo.is_valid() || !hi.is_valid());
        prop_assert!(hi.radicand() >= lo.radicand());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn convex_pairs_are_averaged_with_feasibility_profile(
        n in 2usize..=6,
        lambda in prop::sample::select(vec![0.0, 0.25, 0.5, 0.75, 1.0]),
        seed in any::<u64>(),
    ) {
        let mut rng = SeededRng::new(seed);
        let z: Point<f64> = rng.gaussian(n).unwrap();
        let ka = 1 + rng.below(n - 1);
        let kb = 1 + rng.below(n - 1);
        let a = flat_through(&mut rng, &z, ka).to_set_spec().unwrap();
        let b = flat_through(&mut rng, &z, kb).to_set_spec().unwrap();
        let op = OperatorSpec::t_lambda(a, b, lambda).unwrap();
        let profile = feasibility_profile(0.0, lambda).unwrap();
        prop_assert!((profile.alpha - 2.0 / (3.0 + lambda)).abs() < 1e-15);
        for _ in 0..100 {
            let x: Point<f64> = rng.gaussian(n).unwrap().scaled(3.0);
            prop_assert!(averagedness_slack(&op, profile, &x, &z).unwrap() >= -1e-9);
        }
    }

    #[test]
    fn sampled_subregularity_respects_angle_bound(
        n in 2usize..=4,
        lambda in 0.0f64..=1.0,
        t in 1e-6f64..1.0,
        seed in any::<u64>(),
    ) {
        let mut rng = SeededRng::new(seed);
        let z: Point<f64> = rng.gaussian(n).unwrap();
        // dim U + dim V >= n so that U + V is the whole space.
        let ka = 1 + rng.below(n - 1);
        let kb = (n - ka).max(1) + rng.below(n - (n - ka).max(1));
        let (fa, fb) = (flat_through(&mut rng, &z, ka), flat_through(&mut rng, &z, kb));
        let theta_bar = friedrichs_cosine_flats(&fa, &fb).unwrap();
        prop_assume!(theta_bar < 0.999);
        let fix = fa.intersect(&fb).unwrap();
        let op = OperatorSpec::t_lambda(fa.to_set_spec().unwrap(), fb.to_set_spec().unwrap(), lambda).unwrap();
        let region = Region::ball(z, 0.1).unwrap();
        let est = estimate_kappa(&op, &fix, &region, 200, seed).unwrap();
        let theta = theta_bar + (1.0 - theta_bar) * t;
        prop_assert!(est.kappa >= kappa_from_theta(theta, lambda).unwrap() - 1e-9,
            "kappa_hat {} bound {} theta_bar {}", est.kappa, kappa_from_theta(theta, lambda).unwrap(), theta_bar);
    }
}
