use num_complex::Complex64;
use proptest::prelude::*;
use relaxdr::numkit::{DenseMatrix, Point, SeededRng};
use relaxdr::sets::SetSpec;

fn real_catalog(rng: &mut SeededRng, n: usize) -> Vec<SetSpec<f64>> {
    let m = (n / 2).max(1);
    let mat = DenseMatrix::new(m, n, (0..m * n).map(|_| rng.normal::<f64>()).collect()).unwrap();
    let pts: Vec<Point<f64>> = (0..3).map(|_| rng.gaussian(n).unwrap()).collect();
    vec![
        SetSpec::affine_system(mat, rng.gaussian(m).unwrap()).unwrap(),
        SetSpec::line_through_origin(rng.gaussian(n).unwrap()).unwrap(),
        SetSpec::affine_line(rng.gaussian(n).unwrap(), rng.gaussian(n).unwrap()).unwrap(),
        SetSpec::sparsity(n, 1 + rng.below(n)).unwrap(),
        SetSpec::point_set(pts).unwrap(),
    ]
}

fn complex_catalog(rng: &mut SeededRng, n: usize) -> Vec<SetSpec<Complex64>> {
    let m = (n / 2).max(1);
    let mat = DenseMatrix::new(m, n, (0..m * n).map(|_| rng.normal::<f64>()).collect()).unwrap();
    let count = 1 + rng.below(n);
    let idx = rng.support_pattern(n, count).unwrap();
    let vals = idx
        .iter()
        .map(|_| Complex64::new(rng.normal(), rng.normal()))
        .collect();
    vec![
        SetSpec::affine_system(mat, rng.gaussian(m).unwrap()).unwrap(),
        SetSpec::line_through_origin(rng.gaussian(n).unwrap()).unwrap(),
        SetSpec::sparsity(n, 1 + rng.below(n)).unwrap(),
        SetSpec::real_sparsity(n, 1 + rng.below(n)).unwrap(),
        SetSpec::fourier_data(n, idx, vals).unwrap(),
    ]
}

/// Every `s`-subset of `0..n` in lexicographic order.
fn subsets(n: usize, s: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, s: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == s {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, s, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, s, &mut Vec::new(), &mut out);
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn projection_is_idempotent(n in 1usize..=16, seed in any::<u64>()) {
        let mut rng = SeededRng::new(seed);
        for set in real_catalog(&mut rng, n) {
            let x: Point<f64> = rng.gaussian(n).unwrap().scaled(3.0);
            let p = set.project(&x).unwrap();
            let pp = set.project(&p).unwrap();
            prop_assert!(p.distance(&pp) <= 1e-10, "{}", set.describe());
        }
        for set in complex_catalog(&mut rng, n) {
            let x: Point<Complex64> = rng.gaussian(n).unwrap().scaled(3.0);
            let p = set.project(&x).unwrap();
            let pp = set.project(&p).unwrap();
            prop_assert!(p.distance(&pp) <= 1e-10 * (1.0 + p.norm()), "{}", set.describe());
        }
    }

    #[test]
    fn convex_projections_are_firmly_nonexpansive(n in 1usize..=16, seed in any::<u64>()) {
        let mut rng = SeededRng::new(seed);
        for set in real_catalog(&mut rng, n).into_iter().filter(|s| s.is_convex()) {
            let x: Point<f64> = rng.gaussian(n).unwrap();
            let y: Point<f64> = rng.gaussian(n).unwrap();
            let d = &set.project(&x).unwrap() - &set.project(&y).unwrap();
            prop_assert!(d.norm_sqr() <= d.inner(&(&x - &y)) + 1e-10);
        }
        for set in complex_catalog(&mut rng, n).into_iter().filter(|s| s.is_convex()) {
            let x: Point<Complex64> = rng.gaussian(n).unwrap();
            let y: Point<Complex64> = rng.gaussian(n).unwrap();
            let d = &set.project(&x).unwrap() - &set.project(&y).unwrap();
            prop_assert!(d.norm_sqr() <= d.inner(&(&x - &y)) + 1e-10);
        }
    }

    #[test]
    fn real_sparsity_output_is_real(n in 1usize..=16, s_raw in 0usize..16, seed in any::<u64>()) {
        let s = 1 + s_raw % n;
        let mut rng = SeededRng::new(seed);
        let x: Point<Complex64> = rng.gaussian(n).unwrap();
        let p = SetSpec::real_sparsity(n, s).unwrap().project(&x).unwrap();
        prop_assert!(p.iter().all(|v| v.im == 0.0));
        prop_assert!(p.support_size(0.0) <= s);
        for (pv, xv) in p.iter().zip(x.iter()) {
            prop_assert!(pv.re == 0.0 || pv.re == xv.re);
        }
    }
}

#[test]
fn sparsity_projection_beats_every_support() {
    let mut rng = SeededRng::new(2024);
    for n in 1..=12 {
        for s in 1..=n {
            let set = SetSpec::<f64>::sparsity(n, s).unwrap();
            let all = subsets(n, s);
            for _ in 0..3 {
                let x: Point<f64> = rng.gaussian(n).unwrap();
                let p = set.project(&x).unwrap();
                let best = x.distance(&p);
                for support in &all {
                    let mut y = vec![0.0; n];
                    for &j in support {
                        y[j] = x.as_slice()[j];
                    }
                    let y = Point::new(y).unwrap();
                    assert!(best <= x.distance(&y) + 1e-12, "n={n} s={s}");
                }
            }
        }
    }
}

#[test]
fn tied_supports_are_all_optimal() {
    let x = Point::<f64>::from_reals(&[2.0, -1.0, 1.0, 1.0, 0.5]).unwrap();
    let set = SetSpec::sparsity(5, 2).unwrap();
    let ties = set.tied_supports(&x).unwrap();
    assert_eq!(ties, vec![vec![0, 1], vec![0, 2], vec![0, 3]]);
    let p = set.project(&x).unwrap();
    assert_eq!(p.as_slice(), &[2.0, -1.0, 0.0, 0.0, 0.0]);
}
