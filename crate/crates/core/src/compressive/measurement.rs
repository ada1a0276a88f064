use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::compressive::basis::SparsityBasis;
use crate::error::{Error, Result};
use crate::rng::{self, Label};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeasurementKind {
    /// Entries iid N(0, 1/M).
    GaussianIid,
    /// Entries ±1/√M with equal probability.
    BernoulliPm1,
    /// First M rows of the identity (plain subsampling).
    Identity,
}

impl MeasurementKind {
    pub fn name(self) -> &'static str {
        match self {
            MeasurementKind::GaussianIid => "gaussian",
            MeasurementKind::BernoulliPm1 => "bernoulli",
            MeasurementKind::Identity => "identity",
        }
    }
}

impl fmt::Display for MeasurementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeasurementKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gaussian" | "gaussian-iid" => Ok(MeasurementKind::GaussianIid),
            "bernoulli" | "bernoulli-pm1" => Ok(MeasurementKind::BernoulliPm1),
            "identity" => Ok(MeasurementKind::Identity),
            other => Err(Error::Config(format!("unknown measurement matrix {other:?}"))),
        }
    }
}

/// M×L real matrix Θ, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementMatrix<T> {
    rows: usize,
    cols: usize,
    kind: MeasurementKind,
    seed: u64,
    data: Vec<T>,
}

impl<T: Real> MeasurementMatrix<T> {
    /// Wrap an explicit row-major matrix.
    pub fn from_rows(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument("empty measurement matrix".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, actual: data.len() });
        }
        Ok(Self { rows, cols, kind: MeasurementKind::GaussianIid, seed: 0, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn kind(&self) -> MeasurementKind {
        self.kind
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    pub fn scaled(&self, c: T) -> Self {
        Self { data: self.data.iter().map(|&v| v * c).collect(), ..self.clone() }
    }

    /// Rows reordered by `order`.
    pub fn permuted_rows(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.rows {
            return Err(Error::DimensionMismatch { expected: self.rows, actual: order.len() });
        }
        let data = order.iter().flat_map(|&i| self.row(i).iter().copied()).collect();
        Ok(Self { data, ..self.clone() })
    }

    /// Effective dictionary `A = Θ·B`, column-major (M entries per column).
    pub fn dictionary(&self, basis: &SparsityBasis<T>) -> Result<Vec<Complex<T>>> {
        if basis.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, actual: basis.len() });
        }
        let mut out = Vec::with_capacity(self.rows * self.cols);
        for j in 0..self.cols {
            let col = basis.column(j);
            for i in 0..self.rows {
                out.push(
                    self.row(i)
                        .iter()
                        .zip(col)
                        .filter(|(t, _)| **t != T::zero())
                        .map(|(&t, &b)| b * t)
                        .sum(),
                );
            }
        }
        Ok(out)
    }
}

pub fn make_measurement_matrix<T: Real>(
    rows: usize,
    cols: usize,
    kind: MeasurementKind,
    seed: u64,
) -> Result<MeasurementMatrix<T>> {
    if rows == 0 || rows > cols {
        return Err(Error::InvalidArgument(format!("need 1 <= M <= L, got M = {rows}, L = {cols}")));
    }
    let mut data = vec![T::zero(); rows * cols];
    let scale = T::one() / T::from_usize_lossy(rows).sqrt();
    match kind {
        MeasurementKind::GaussianIid => {
            let mut rng = rng::stream(seed, &[Label::from("theta-gaussian")]);
            for v in data.iter_mut() {
                let g: f64 = StandardNormal.sample(&mut rng);
                *v = T::lit(g) * scale;
            }
        }
        MeasurementKind::BernoulliPm1 => {
            let mut rng = rng::stream(seed, &[Label::from("theta-bernoulli")]);
            for v in data.iter_mut() {
                *v = if rng.random::<bool>() { scale } else { -scale };
            }
        }
        MeasurementKind::Identity => {
            for i in 0..rows {
                data[i * cols + i] = T::one();
            }
        }
    }
    Ok(MeasurementMatrix { rows, cols, kind, seed, data })
}

/// Mutual coherence between the rows of Θ and the columns of B.
pub fn coherence<T: Real>(theta: &MeasurementMatrix<T>, basis: &SparsityBasis<T>) -> Result<T> {
    if basis.len() != theta.cols() {
        return Err(Error::DimensionMismatch { expected: theta.cols(), actual: basis.len() });
    }
    let col_norms: Vec<T> = (0..basis.len())
        .map(|j| basis.column(j).iter().map(|c| c.norm_sqr()).sum::<T>().sqrt())
        .collect();
    if let Some(j) = col_norms.iter().position(|&n| n == T::zero()) {
        return Err(Error::InvalidArgument(format!("basis column {j} is zero")));
    }
    let mut mu = T::zero();
    for i in 0..theta.rows() {
        let row = theta.row(i);
        let rn = row.iter().map(|&v| v * v).sum::<T>().sqrt();
        if rn == T::zero() {
            return Err(Error::InvalidArgument(format!("measurement row {i} is zero")));
        }
        for (j, &cn) in col_norms.iter().enumerate() {
            let dot: Complex<T> = row
                .iter()
                .zip(basis.column(j))
                .filter(|(t, _)| **t != T::zero())
                .map(|(&t, &b)| b * t)
                .sum();
            mu = mu.max(dot.norm() / (rn * cn));
        }
    }
    Ok(mu.min(T::one()))
}

/// `m = Θ·r̂`.
pub fn measure<T: Real>(theta: &MeasurementMatrix<T>, signal: &[T]) -> Result<Vec<T>> {
    if signal.len() != theta.cols() {
        return Err(Error::DimensionMismatch { expected: theta.cols(), actual: signal.len() });
    }
    Ok((0..theta.rows())
        .map(|i| theta.row(i).iter().zip(signal).map(|(&a, &b)| a * b).sum())
        .collect())
}
