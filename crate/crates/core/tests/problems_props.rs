use nalgebra::DMatrix;
use proptest::prelude::*;
use relaxdr::problems::{gen_sparse_affine, gen_sparse_fourier, instance_to_json, ProblemInstance};
use relaxdr::sets::SetSpec;

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

/// Whether some support of size `s` admits an exact solution of `Mx = b`.
fn exhaustive_feasible(inst: &ProblemInstance<f64>, s: usize) -> bool {
    let SetSpec::AffineSystem(sys) = inst.b().as_ref() else {
        panic!("expected an affine data set");
    };
    let m = sys.matrix();
    let full = DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice());
    let b = nalgebra::DVector::from_column_slice(sys.rhs().as_slice());
    subsets(m.cols(), s.min(m.cols())).iter().any(|support| {
        let cols = full.select_columns(support);
        let svd = cols.clone().svd(true, true);
        let z = svd.solve(&b, 1e-12).unwrap();
        (&cols * z - &b).norm() <= 1e-8 * (1.0 + b.norm())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn consistency_flag_matches_support_enumeration(
        (n, m) in (3usize..=10).prop_flat_map(|n| (Just(n), 1..=(n - 1).min(5))),
        k_raw in 0usize..10,
        s_raw in 0usize..10,
        noisy in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let k = 1 + k_raw % n;
        let s = 1 + s_raw % n;
        let noise = noisy.then_some(0.1);
        let inst = gen_sparse_affine::<f64>(n, m, k, s, seed, noise).unwrap();
        prop_assert_eq!(inst.is_consistent(), exhaustive_feasible(&inst, s));
        if inst.is_consistent() {
            let x = inst.ground_truth().unwrap();
            prop_assert!(inst.infeasibility(x).unwrap() <= 1e-9);
        }
    }

    #[test]
    fn seeds_determine_serialized_instances(
        n in 4usize..=40,
        k_raw in 0usize..40,
        seed in any::<u64>(),
    ) {
        let k = 1 + k_raw % n;
        let m = (n / 2).max(1);
        let a = gen_sparse_affine::<f64>(n, m, k, k, seed, Some(0.01)).unwrap();
        let b = gen_sparse_affine::<f64>(n, m, k, k, seed, Some(0.01)).unwrap();
        prop_assert_eq!(instance_to_json(&a), instance_to_json(&b));
        let f = gen_sparse_fourier::<f64>(n, 0.25, k, k, seed, true).unwrap();
        let g = gen_sparse_fourier::<f64>(n, 0.25, k, k, seed, true).unwrap();
        prop_assert_eq!(instance_to_json(&f), instance_to_json(&g));
    }

    #[test]
    fn consistent_fourier_instances_are_feasible(
        n in 4usize..=64,
        frac in 0.05f64..=1.0,
        k_raw in 0usize..64,
        extra in 0usize..3,
        seed in any::<u64>(),
    ) {
        let k = 1 + k_raw % n;
        let s = (k + extra).min(n);
        let inst = gen_sparse_fourier::<f64>(n, frac, k, s, seed, false).unwrap();
        prop_assert!(inst.is_consistent());
        let x = inst.ground_truth().unwrap();
        prop_assert!(inst.infeasibility(x).unwrap() <= 1e-9);
    }
}
