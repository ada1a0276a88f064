//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mirror index for whole-sample symmetric extension, by repeated folding.
fn mirror(mut i: isize, n: usize) -> usize {
    let last = n as isize - 1;
    if last == 0 {
        return 0;
    }
    loop {
        if i < 0 {
            i = -i;
        } else if i > last {
            i = 2 * last - i;
        } else {
            return i as usize;
        }
    }
}

/// `y[i] = Δf·Σ_t x[mirror(i − t)]·taps[t + h]`, evaluated term by term.
pub fn direct_convolve(x: &[f64], taps: &[f64], spacing: f64) -> Vec<f64> {
    let h = (taps.len() / 2) as isize;
    (0..x.len() as isize)
        .map(|i| (-h..=h).map(|t| x[mirror(i - t, x.len())] * taps[(t + h) as usize]).sum::<f64>() * spacing)
        .collect()
}

/// Unnormalized DFT by the defining sum.
pub fn direct_dft(x: &[Complex<f64>]) -> Vec<Complex<f64>> {
    let n = x.len();
    (0..n)
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(j, &v)| v * Complex::from_polar(1.0, -2.0 * std::f64::consts::PI * (j * k % n) as f64 / n as f64))
                .sum()
        })
        .collect()
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

pub fn max_rel_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let scale = max_abs(b).max(f64::MIN_POSITIVE);
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / scale
}

/// Column-major real M×L matrix with i.i.d. N(0, 1/M) entries.
pub fn gaussian_matrix(m: usize, l: usize, rng: &mut impl Rng) -> Vec<f64> {
    let s = (1.0 / m as f64).sqrt();
    (0..m * l).map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal) * s).collect()
}

/// Residual of the least-squares fit of `y` on the two given columns.
fn pair_residual(a: &[f64], b: &[f64], y: &[f64]) -> f64 {
    let dot = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(p, q)| p * q).sum::<f64>();
    let (aa, ab, bb) = (dot(a, a), dot(a, b), dot(b, b));
    let (ay, by) = (dot(a, y), dot(b, y));
    let det = aa * bb - ab * ab;
    if det.abs() < 1e-14 * aa * bb {
        return f64::INFINITY;
    }
    let ca = (bb * ay - ab * by) / det;
    let cb = (aa * by - ab * ay) / det;
    y.iter().zip(a).zip(b).map(|((y, a), b)| (y - ca * a - cb * b).powi(2)).sum::<f64>().sqrt()
}

/// Exhaustive ℓ0 search for the best 2-column support of `y`; columns are
/// `m` long and stored contiguously.
pub fn best_pair(dict: &[f64], m: usize, y: &[f64]) -> [usize; 2] {
    let l = dict.len() / m;
    let col = |j: usize| &dict[j * m..(j + 1) * m];
    let mut best = ([0, 1], f64::INFINITY);
    for i in 0..l {
        for j in i + 1..l {
            let r = pair_residual(col(i), col(j), y);
            if r < best.1 {
                best = ([i, j], r);
            }
        }
    }
    best.0
}

fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(p, q)| p * q).sum()
}

/// Textbook two-step OMP: pick the column with the largest normalized
/// correlation (lowest index on ties), refit by least squares, repeat.
pub fn reference_omp2(dict: &[f64], m: usize, y: &[f64]) -> [usize; 2] {
    let l = dict.len() / m;
    let col = |j: usize| &dict[j * m..(j + 1) * m];
    let pick = |r: &[f64], skip: Option<usize>| {
        let mut best = (usize::MAX, -1.0);
        for j in (0..l).filter(|&j| Some(j) != skip) {
            let score = dot(col(j), r).abs() / dot(col(j), col(j)).sqrt();
            if score > best.1 {
                best = (j, score);
            }
        }
        best.0
    };
    let first = pick(y, None);
    let a = col(first);
    let c = dot(a, y) / dot(a, a);
    let r: Vec<f64> = y.iter().zip(a).map(|(y, a)| y - c * a).collect();
    let second = pick(&r, Some(first));
    [first.min(second), first.max(second)]
}

/// One noiseless L = 16, Y = 2, M = 8 instance: column-major Gaussian Θ,
/// support, standard-normal coefficients and measurements.
pub struct SparseInstance {
    pub theta_cols: Vec<f64>,
    pub theta_rows: Vec<f64>,
    pub support: [usize; 2],
    pub x: Vec<f64>,
}

pub const OMP_M: usize = 8;
pub const OMP_L: usize = 16;

pub fn sparse_instance(seed: u64) -> SparseInstance {
    let (m, l) = (OMP_M, OMP_L);
    let mut r = rng(1000 + seed);
    let theta_cols = gaussian_matrix(m, l, &mut r);
    let theta_rows = (0..m).flat_map(|i| (0..l).map(move |j| (i, j))).map(|(i, j)| theta_cols[j * m + i]).collect();
    let a = r.random_range(0..l);
    let b = (a + r.random_range(1..l)) % l;
    let mut x = vec![0.0; l];
    x[a] = r.sample(rand_distr::StandardNormal);
    x[b] = r.sample(rand_distr::StandardNormal);
    SparseInstance { theta_cols, theta_rows, support: [a.min(b), a.max(b)], x }
}
