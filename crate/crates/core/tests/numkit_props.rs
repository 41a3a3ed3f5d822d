use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;
use relaxdr::numkit::{dft, pinv_apply, DenseMatrix, Direction, Point, SeededRng};

fn gaussian_matrix(rng: &mut SeededRng, m: usize, n: usize) -> DenseMatrix<f64> {
    let data = (0..m * n).map(|_| rng.normal::<f64>()).collect();
    DenseMatrix::new(m, n, data).unwrap()
}

/// Nearest point of `{Mz = b}` to `x` via the normal equations.
fn nearest_on_affine(m: &DenseMatrix<f64>, b: &[f64], x: &[f64]) -> DVector<f64> {
    let mm = DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice());
    let xv = DVector::from_column_slice(x);
    let r = &mm * &xv - DVector::from_column_slice(b);
    let gram = &mm * mm.transpose();
    let y = gram.lu().solve(&r).expect("full row rank");
    xv - mm.transpose() * y
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn pinv_projects_onto_affine_system(
        (n, m) in (2usize..=32).prop_flat_map(|n| (Just(n), 1..n)),
        seed in any::<u64>(),
    ) {
        let mut rng = SeededRng::new(seed);
        let mat = gaussian_matrix(&mut rng, m, n);
        let b: Point<f64> = rng.gaussian(m).unwrap();
        let x: Point<f64> = rng.gaussian(n).unwrap();
        let residual = &mat.apply_point(&x).unwrap() - &b;
        let step = pinv_apply(&mat, &residual).unwrap();
        let result = &x - &step;

        let mz = mat.apply_point(&result).unwrap();
        prop_assert!(mz.distance(&b) <= 1e-8 * (1.0 + b.norm()));

        let oracle = nearest_on_affine(&mat, b.as_slice(), x.as_slice());
        let diff: f64 = result
            .iter()
            .zip(oracle.iter())
            .map(|(a, o)| (a - o).powi(2))
            .sum::<f64>()
            .sqrt();
        prop_assert!(diff <= 1e-8 * (1.0 + x.norm()), "diff {diff}");
    }

    #[test]
    fn parseval(n in 1usize..=128, seed in any::<u64>()) {
        let mut rng = SeededRng::new(seed);
        let x: Point<Complex64> = rng.gaussian(n).unwrap();
        let fx = dft(&x, Direction::Forward);
        let lhs = fx.norm_sqr();
        let rhs = n as f64 * x.norm_sqr();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs);
        let back = dft(&fx, Direction::Inverse);
        prop_assert!(back.distance(&x) <= 1e-10 * (1.0 + x.norm()));
    }
}

#[test]
fn dft_matches_direct_sum() {
    let mut rng = SeededRng::new(11);
    for n in [1usize, 2, 3, 5, 8, 12, 17] {
        let x: Point<Complex64> = rng.gaussian(n).unwrap();
        let fx = dft(&x, Direction::Forward);
        for k in 0..n {
            let direct: Complex64 = x
                .iter()
                .enumerate()
                .map(|(j, v)| {
                    let t = -2.0 * std::f64::consts::PI * (j * k) as f64 / n as f64;
                    v * Complex64::new(t.cos(), t.sin())
                })
                .sum();
            assert!((direct - fx.as_slice()[k]).norm() < 1e-10);
        }
    }
}
