use num_complex::Complex;
use rand::seq::SliceRandom;
use rand_distr::{Distribution, Poisson};

use super::{real_lit, shape_error, GeneratorInfo, ProblemInstance};
use crate::error::Result;
use crate::numkit::{
    dft, DenseMatrix, Direction, Point, PseudoInverse, Real, RealScalar, SeededRng,
};
use crate::sets::SetSpec;

/// Sparse vector with `k` Gaussian entries on a seeded support.
fn sparse_signal<R: Real>(rng: &mut SeededRng, n: usize, k: usize) -> Result<Vec<R>> {
    let support = rng.support_pattern(n, k)?;
    let mut x = vec![R::zero(); n];
    for &i in &support {
        x[i] = rng.normal();
    }
    Ok(x)
}

/// Solves `M_S z = b` on `m` columns picked by greedy column pivoting, so the
/// square subsystem stays well conditioned. One refinement step follows.
fn feasible_witness<R: RealScalar>(m: &DenseMatrix<R>, b: &Point<R>) -> Result<Point<R>> {
    let (rows, n) = (m.rows(), m.cols());
    let column = |j: usize| -> Vec<R> { (0..rows).map(|i| m.get(i, j)).collect() };
    let mut basis: Vec<Vec<R>> = Vec::with_capacity(rows);
    let mut cols: Vec<usize> = Vec::with_capacity(rows);
    while cols.len() < rows {
        let mut best: Option<(R, usize, Vec<R>)> = None;
        for j in (0..n).filter(|j| !cols.contains(j)) {
            let mut r = column(j);
            for q in &basis {
                let c: R = r.iter().zip(q).map(|(&a, &b)| a * b).sum();
                r.iter_mut().zip(q).for_each(|(ri, &qi)| *ri -= c * qi);
            }
            let norm = r.iter().map(|&v| v * v).sum::<R>().sqrt();
            if best.as_ref().is_none_or(|(bn, _, _)| norm > *bn) {
                best = Some((norm, j, r));
            }
        }
        let (norm, j, r) = best.expect("m < n leaves a candidate column");
        basis.push(r.into_iter().map(|v| v / norm).collect());
        cols.push(j);
    }
    cols.sort_unstable();
    let mut sub = Vec::with_capacity(rows * rows);
    for i in 0..rows {
        sub.extend(cols.iter().map(|&j| m.get(i, j)));
    }
    let sub = DenseMatrix::new(rows, rows, sub)?;
    let pinv = PseudoInverse::new(sub.clone())?;
    let mut z = pinv.apply(b)?;
    let residual = b - &sub.apply_point(&z)?;
    z = &z + &pinv.apply(&residual)?;
    let mut x = vec![R::zero(); n];
    for (&j, &v) in cols.iter().zip(z.iter()) {
        x[j] = v;
    }
    Point::new(x)
}

/// `A_s = {|x|_0 <= s}`, `B = {Mx = b}` with Gaussian `M` (m x n) and
/// `b = M x_bar (+ noise)` for a `k_true`-sparse `x_bar`.
///
/// The instance is flagged consistent when `x_bar` itself is feasible
/// (`s >= k_true`, no noise) or when `s >= m`, where any `m` Gaussian columns
/// already span `R^m`.
pub fn gen_sparse_affine<R: RealScalar>(
    n: usize,
    m: usize,
    k_true: usize,
    s: usize,
    seed: u64,
    noise: Option<f64>,
) -> Result<ProblemInstance<R>> {
    if m == 0 || m >= n {
        return Err(shape_error(format!("need 0 < m < n, got m = {m}, n = {n}")));
    }
    if k_true == 0 || k_true > n || s == 0 || s > n {
        return Err(shape_error(format!(
            "need 1 <= k_true <= n and 1 <= s <= n, got k_true = {k_true}, s = {s}, n = {n}"
        )));
    }
    if let Some(sigma) = noise {
        if !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(shape_error(format!(
                "noise level must be finite and >= 0, got {sigma}"
            )));
        }
    }
    let mut rng = SeededRng::new(seed);
    let data: Vec<R> = (0..m * n).map(|_| rng.normal()).collect();
    let matrix = DenseMatrix::new(m, n, data)?;
    let signal = sparse_signal::<R>(&mut rng, n, k_true)?;
    let x_bar = Point::new(signal)?;
    let mut b = matrix.apply_point(&x_bar)?.into_vec();
    let noisy = noise.is_some_and(|s| s > 0.0);
    if let Some(sigma) = noise {
        for v in b.iter_mut() {
            *v += real_lit::<R>(sigma) * rng.normal::<R>();
        }
    }
    let b = Point::new(b)?;
    let truth_feasible = !noisy && s >= k_true;
    let consistent = truth_feasible || s >= m;

    let info = GeneratorInfo::new("sparse_affine", Some(seed))
        .param("n", n)
        .param("m", m)
        .param("k_true", k_true)
        .param("s", s)
        .param(
            "noise",
            noise.map_or(serde_json::Value::Null, serde_json::Value::from),
        );
    let a = SetSpec::sparsity(n, s)?;
    let bset = SetSpec::affine_system(matrix.clone(), b.clone())?;
    let inst = ProblemInstance::new(
        format!("sparse_affine_n{n}_m{m}_k{k_true}_s{s}"),
        a,
        bset,
        consistent,
        info,
    )?
    .with_note("noise_model", "additive gaussian on b");
    if truth_feasible || !consistent {
        inst.with_ground_truth(x_bar)
            .map(|i| i.with_note("ground_truth", "generating signal"))
    } else {
        let witness = feasible_witness(&matrix, &b)?;
        inst.with_ground_truth(witness)
            .map(|i| i.with_note("ground_truth", "feasible witness on m columns"))
    }
}

/// Conjugate-symmetric classes `{j, n - j}` drawn uniformly until at least
/// `ceil(fraction * n)` indices are covered.
fn sample_indices(rng: &mut SeededRng, n: usize, fraction: f64) -> Vec<usize> {
    let target = ((fraction * n as f64).ceil() as usize).clamp(1, n);
    let mut classes: Vec<usize> = (0..=n / 2).collect();
    classes.shuffle(rng.inner());
    let mut out = Vec::with_capacity(target + 1);
    for j in classes {
        if out.len() >= target {
            break;
        }
        out.push(j);
        let partner = (n - j) % n;
        if partner != j {
            out.push(partner);
        }
    }
    out.sort_unstable();
    out
}

/// `A = {x real, |x|_0 <= s}`, `B = {F(x)_J = b_J}` for a real `k_true`-sparse
/// `x_bar` and unnormalized DFT `F`.
///
/// With `poisson_noise`, each conjugate pair of measurements has its modulus
/// replaced by one Poisson draw with that mean; phases are kept.
pub fn gen_sparse_fourier<R: Real>(
    n: usize,
    sample_fraction: f64,
    k_true: usize,
    s: usize,
    seed: u64,
    poisson_noise: bool,
) -> Result<ProblemInstance<Complex<R>>> {
    if n < 4 {
        return Err(shape_error(format!("need n >= 4, got {n}")));
    }
    if !(sample_fraction > 0.0 && sample_fraction <= 1.0) {
        return Err(shape_error(format!(
            "sample fraction must lie in (0, 1], got {sample_fraction}"
        )));
    }
    if k_true == 0 || k_true > n || s == 0 || s > n {
        return Err(shape_error(format!(
            "need 1 <= k_true <= n and 1 <= s <= n, got k_true = {k_true}, s = {s}, n = {n}"
        )));
    }
    let mut rng = SeededRng::new(seed);
    let signal = sparse_signal::<R>(&mut rng, n, k_true)?;
    let x_bar = Point::new(signal.iter().map(|&v| Complex::new(v, R::zero())).collect())?;
    let spectrum = dft(&x_bar, Direction::Forward);
    let indices = sample_indices(&mut rng, n, sample_fraction);
    let mut values: Vec<Complex<R>> = indices.iter().map(|&j| spectrum[j]).collect();
    if poisson_noise {
        for (pos, &j) in indices.iter().enumerate() {
            let partner = (n - j) % n;
            if partner < j {
                let mirror = indices
                    .binary_search(&partner)
                    .expect("completion is symmetric");
                values[pos] = values[mirror].conj();
                continue;
            }
            let v = values[pos];
            let magnitude = v.norm().to_f64_lossy();
            if magnitude > 0.0 {
                let draw: f64 = Poisson::new(magnitude)
                    .expect("positive mean")
                    .sample(rng.inner());
                values[pos] = v.scale(real_lit::<R>(draw) / v.norm());
            }
        }
    }
    let consistent = !poisson_noise && s >= k_true;
    let info = GeneratorInfo::new("sparse_fourier", Some(seed))
        .param("n", n)
        .param("sample_fraction", sample_fraction)
        .param("k_true", k_true)
        .param("s", s)
        .param("poisson_noise", poisson_noise);
    let a = SetSpec::real_sparsity(n, s)?;
    let b = SetSpec::fourier_data(n, indices, values)?;
    ProblemInstance::new(
        format!("sparse_fourier_n{n}_k{k_true}_s{s}"),
        a,
        b,
        consistent,
        info,
    )?
    .with_note("sampling", "uniform conjugate-symmetric classes {j, n-j}")
    .with_note("noise_model", "poisson on measurement modulus, phase kept")
    .with_ground_truth(x_bar)
}

/// Controlled-angle pairs of lines in the first two coordinates of `R^dim`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GeometryKind {
    /// `A` = x-axis, `B` = span{(cos t, sin t)}, `t` in degrees in (0, 90].
    LinesAtAngle {
        degrees: f64,
    },
    /// `A = {y = 0}`, `B = {y = offset}`, `offset != 0`.
    ParallelLines {
        offset: f64,
    },
    OrthogonalAxes,
}

pub fn gen_geometry<R: RealScalar>(kind: GeometryKind, dim: usize) -> Result<ProblemInstance<R>> {
    if dim < 2 {
        return Err(shape_error(format!(
            "geometry instances need dim >= 2, got {dim}"
        )));
    }
    let vec2 = |x: R, y: R| -> Result<Point<R>> {
        let mut v = vec![R::zero(); dim];
        v[0] = x;
        v[1] = y;
        Point::new(v)
    };
    let origin = Point::zeros(dim);
    let (name, info, degrees) = match kind {
        GeometryKind::ParallelLines { offset } => {
            if offset == 0.0 || !offset.is_finite() {
                return Err(shape_error(format!(
                    "offset must be finite and nonzero, got {offset}"
                )));
            }
            let dir = vec2(R::one(), R::zero())?;
            let a = SetSpec::affine_line(origin.clone(), dir.clone())?;
            let b = SetSpec::affine_line(vec2(R::zero(), real_lit(offset))?, dir)?;
            let info = GeneratorInfo::new("parallel_lines", None)
                .param("offset", offset)
                .param("dim", dim);
            return ProblemInstance::new(format!("parallel_lines_{offset}"), a, b, false, info)?
                .with_gap_vector(vec2(R::zero(), real_lit(offset))?);
        }
        GeometryKind::OrthogonalAxes => (
            "orthogonal_axes".to_string(),
            GeneratorInfo::new("orthogonal_axes", None),
            90.0,
        ),
        GeometryKind::LinesAtAngle { degrees } => {
            if !(degrees > 0.0 && degrees <= 90.0) {
                return Err(shape_error(format!(
                    "angle must lie in (0, 90] degrees, got {degrees}"
                )));
            }
            let info = GeneratorInfo::new("lines_at_angle", None).param("degrees", degrees);
            (format!("lines_at_angle_{degrees}"), info, degrees)
        }
    };
    let b_dir = if degrees == 90.0 {
        vec2(R::zero(), R::one())?
    } else {
        let t = real_lit::<R>(degrees).to_radians();
        vec2(t.cos(), t.sin())?
    };
    let a = SetSpec::line_through_origin(vec2(R::one(), R::zero())?)?;
    let b = SetSpec::line_through_origin(b_dir)?;
    ProblemInstance::new(name, a, b, true, info.param("dim", dim))?
        .with_solution(SetSpec::point_set(vec![origin.clone()])?)?
        .with_ground_truth(origin)
}
