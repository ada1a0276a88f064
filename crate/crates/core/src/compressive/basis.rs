use std::fmt;
use std::str::FromStr;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisKind {
    Identity,
    /// Unitary DFT, `B[n][j] = exp(i2πnj/L)/√L`.
    Dft,
}

impl BasisKind {
    pub fn name(self) -> &'static str {
        match self {
            BasisKind::Identity => "identity",
            BasisKind::Dft => "dft",
        }
    }
}

impl fmt::Display for BasisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BasisKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "identity" => Ok(BasisKind::Identity),
            "dft" => Ok(BasisKind::Dft),
            other => Err(Error::Config(format!("unknown basis {other:?}"))),
        }
    }
}

/// Square L×L sparsity basis with `r̂ = B·y`, stored column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SparsityBasis<T> {
    kind: BasisKind,
    len: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> SparsityBasis<T> {
    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    /// L.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn column(&self, j: usize) -> &[Complex<T>] {
        &self.data[j * self.len..(j + 1) * self.len]
    }

    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.data[col * self.len + row]
    }

    /// `B·y`.
    pub fn synthesize(&self, y: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        if y.len() != self.len {
            return Err(Error::DimensionMismatch { expected: self.len, actual: y.len() });
        }
        let mut out = vec![Complex::new(T::zero(), T::zero()); self.len];
        for (j, &c) in y.iter().enumerate() {
            if c.re == T::zero() && c.im == T::zero() {
                continue;
            }
            for (o, &b) in out.iter_mut().zip(self.column(j)) {
                *o = *o + b * c;
            }
        }
        Ok(out)
    }
}

pub fn make_basis<T: Real>(len: usize, kind: BasisKind) -> Result<SparsityBasis<T>> {
    if len < 2 {
        return Err(Error::InvalidArgument(format!("basis dimension {len} must be at least 2")));
    }
    let zero = Complex::new(T::zero(), T::zero());
    let mut data = vec![zero; len * len];
    match kind {
        BasisKind::Identity => {
            for j in 0..len {
                data[j * len + j] = Complex::new(T::one(), T::zero());
            }
        }
        BasisKind::Dft => {
            let norm = T::one() / T::from_usize_lossy(len).sqrt();
            let step = T::lit(2.0) * T::PI() / T::from_usize_lossy(len);
            for j in 0..len {
                for n in 0..len {
                    // Reduce n·j mod L before scaling to keep the phase exact.
                    let phase = step * T::from_usize_lossy((n * j) % len);
                    data[j * len + n] = Complex::new(phase.cos(), phase.sin()) * norm;
                }
            }
        }
    }
    Ok(SparsityBasis { kind, len, data })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gram_error(b: &SparsityBasis<f64>) -> f64 {
        let l = b.len();
        let mut worst: f64 = 0.0;
        for i in 0..l {
            for j in 0..l {
                let g: Complex<f64> = b.column(i).iter().zip(b.column(j)).map(|(x, y)| x.conj() * y).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - Complex::new(target, 0.0)).norm());
            }
        }
        worst
    }

    #[test]
    fn identity_is_orthonormal() {
        let b = make_basis::<f64>(16, BasisKind::Identity).unwrap();
        assert_eq!(gram_error(&b), 0.0);
    }

    #[test]
    fn dft_is_unitary() {
        for l in [2, 16, 30] {
            let b = make_basis::<f64>(l, BasisKind::Dft).unwrap();
            assert!(gram_error(&b) < 1e-12, "L = {l}");
        }
        let b = make_basis::<f64>(16, BasisKind::Dft).unwrap();
        for v in b.column(0) {
            assert!((v - Complex::new(0.25, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn small_dimension_rejected() {
        assert!(make_basis::<f64>(1, BasisKind::Dft).is_err());
    }

    #[test]
    fn synthesize_matches_columns() {
        let b = make_basis::<f64>(8, BasisKind::Dft).unwrap();
        let mut y = vec![Complex::new(0.0, 0.0); 8];
        y[3] = Complex::new(2.0, -1.0);
        let r = b.synthesize(&y).unwrap();
        for (n, v) in r.iter().enumerate() {
            assert!((v - b.get(n, 3) * y[3]).norm() < 1e-15);
        }
        assert!(b.synthesize(&y[..4]).is_err());
    }
}
