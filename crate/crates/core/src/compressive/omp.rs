//! Orthogonal matching pursuit over the effective dictionary `A = Θ·B`.
//!
//! The selected atoms are orthonormalized incrementally (modified
//! Gram–Schmidt with one re-orthogonalization pass), so each iteration costs
//! one correlation sweep plus O(M·k) work and the residual is always the
//! exact projection of `m` onto the complement of the selected span.

use num_complex::Complex;

use crate::compressive::basis::SparsityBasis;
use crate::compressive::measurement::MeasurementMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Atoms whose component outside the current span falls below this fraction
/// of their norm are treated as linearly dependent.
const DEPENDENCE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StopRule<T> {
    /// Select exactly Y atoms (fewer only if the residual vanishes first).
    KnownSparsity(usize),
    /// Stop once `‖r‖ ≤ tol·‖m‖`, or after `max_iter` atoms.
    ResidualTol { tol: T, max_iter: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryResult<T> {
    /// ŷ (length L), zero off the support.
    pub coefficients: Vec<Complex<T>>,
    /// Selected atoms in selection order.
    pub support: Vec<usize>,
    /// `B·ŷ`.
    pub reconstruction: Vec<Complex<T>>,
    /// `‖r‖` before the first iteration and after each one.
    pub residual_norms: Vec<T>,
    pub iterations: usize,
    /// False only when a residual tolerance was requested and not met.
    pub converged: bool,
}

impl<T: Real> RecoveryResult<T> {
    pub fn residual_norm(&self) -> T {
        *self.residual_norms.last().expect("initial residual recorded")
    }
}

pub fn reconstruct_omp<T: Real>(
    measurements: &[T],
    theta: &MeasurementMatrix<T>,
    basis: &SparsityBasis<T>,
    stop: StopRule<T>,
) -> Result<RecoveryResult<T>> {
    let m = theta.rows();
    let l = theta.cols();
    if measurements.len() != m {
        return Err(Error::DimensionMismatch { expected: m, actual: measurements.len() });
    }
    let dict = theta.dictionary(basis)?;
    let atom = |j: usize| &dict[j * m..(j + 1) * m];
    let norms: Vec<T> = (0..l).map(|j| norm(atom(j))).collect();

    let target: Vec<Complex<T>> = measurements.iter().map(|&v| Complex::new(v, T::zero())).collect();
    let m_norm = norm(&target);
    let (limit, tol) = match stop {
        StopRule::KnownSparsity(y) => (y, None),
        StopRule::ResidualTol { tol, max_iter } => {
            if !(tol >= T::zero()) {
                return Err(Error::InvalidArgument("residual tolerance must be non-negative".into()));
            }
            (max_iter, Some(tol * m_norm))
        }
    };
    let limit = limit.min(l).min(m);

    let mut residual = target.clone();
    let mut residual_norms = vec![m_norm];
    let mut q: Vec<Vec<Complex<T>>> = Vec::new();
    let mut r_cols: Vec<Vec<Complex<T>>> = Vec::new();
    let mut support = Vec::new();
    let mut selected = vec![false; l];
    let met = |r: T| tol.is_some_and(|t| r <= t);

    while support.len() < limit && !met(*residual_norms.last().unwrap()) {
        let current = *residual_norms.last().unwrap();
        if current == T::zero() {
            break;
        }
        // Highest normalized correlation; strict comparison keeps the lowest
        // index on ties.
        let mut best: Option<(usize, T)> = None;
        for j in 0..l {
            if selected[j] || norms[j] == T::zero() {
                continue;
            }
            let c = inner(atom(j), &residual).norm() / norms[j];
            if best.is_none_or(|(_, b)| c > b) {
                best = Some((j, c));
            }
        }
        let Some((j, _)) = best else { break };

        // Orthogonalize the new atom against the current basis, twice.
        let mut v = atom(j).to_vec();
        let mut coeffs = vec![Complex::new(T::zero(), T::zero()); q.len()];
        for _ in 0..2 {
            for (k, qk) in q.iter().enumerate() {
                let c = inner(qk, &v);
                coeffs[k] = coeffs[k] + c;
                for (vi, &qi) in v.iter_mut().zip(qk) {
                    *vi = *vi - qi * c;
                }
            }
        }
        let vn = norm(&v);
        if vn <= T::lit(DEPENDENCE_TOL) * norms[j] {
            return Err(Error::DegenerateSupport { atom: j });
        }
        for vi in v.iter_mut() {
            *vi = *vi / vn;
        }
        coeffs.push(Complex::new(vn, T::zero()));

        let c = inner(&v, &residual);
        for (ri, &vi) in residual.iter_mut().zip(&v) {
            *ri = *ri - vi * c;
        }
        q.push(v);
        r_cols.push(coeffs);
        support.push(j);
        selected[j] = true;
        // The projection can only shrink the residual; clamp rounding noise.
        residual_norms.push(norm(&residual).min(current));
    }

    // Solve R·z = Qᴴ·m by back substitution.
    let k = support.len();
    let rhs: Vec<Complex<T>> = q.iter().map(|qk| inner(qk, &target)).collect();
    let mut z = vec![Complex::new(T::zero(), T::zero()); k];
    for i in (0..k).rev() {
        let mut acc = rhs[i];
        for c in i + 1..k {
            acc = acc - r_cols[c][i] * z[c];
        }
        z[i] = acc / r_cols[i][i];
    }
    let mut coefficients = vec![Complex::new(T::zero(), T::zero()); l];
    for (&j, &v) in support.iter().zip(&z) {
        coefficients[j] = v;
    }
    let reconstruction = basis.synthesize(&coefficients)?;
    let converged = match tol {
        Some(t) => *residual_norms.last().unwrap() <= t,
        None => true,
    };
    Ok(RecoveryResult { coefficients, support, reconstruction, residual_norms, iterations: k, converged })
}

/// `⟨a, b⟩ = Σ conj(a)·b`.
fn inner<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm<T: Real>(a: &[Complex<T>]) -> T {
    a.iter().map(|x| x.norm_sqr()).sum::<T>().sqrt()
}
