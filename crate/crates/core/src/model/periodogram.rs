use num_complex::Complex;

use crate::error::{Error, Result};
use crate::fft;
use crate::model::grid::FrequencyGrid;
use crate::model::psd::WidebandPsd;
use crate::scalar::Real;

/// Averaged periodogram: mean over `n_segments` consecutive, non-overlapping
/// rectangular segments of `|FFT|² / n_fft`.
///
/// Bins are in natural FFT order; the returned grid runs from 0 to
/// `(n_fft − 1)·sample_rate/n_fft`, expressed in MHz with `sample_rate` in Hz.
pub fn estimate_psd<T: Real>(
    samples: &[Complex<T>],
    n_fft: usize,
    n_segments: usize,
    sample_rate: T,
) -> Result<WidebandPsd<T>> {
    if n_segments == 0 {
        return Err(Error::InvalidArgument("n_segments must be at least 1".into()));
    }
    let needed = n_fft.checked_mul(n_segments).ok_or_else(|| {
        Error::InvalidArgument("n_fft × n_segments overflows".into())
    })?;
    if samples.len() < needed {
        return Err(Error::InsufficientSamples { needed, available: samples.len() });
    }
    let bin_mhz = sample_rate / T::from_usize_lossy(n_fft) / T::lit(1e6);
    let grid = FrequencyGrid::new(T::zero(), bin_mhz * T::from_usize_lossy(n_fft - 1), n_fft)?;

    let scale = T::one() / (T::from_usize_lossy(n_fft) * T::from_usize_lossy(n_segments));
    let mut acc = vec![T::zero(); n_fft];
    for seg in samples[..needed].chunks_exact(n_fft) {
        let spec = fft::forward(seg);
        for (a, x) in acc.iter_mut().zip(&spec) {
            *a = *a + x.norm_sqr();
        }
    }
    WidebandPsd::new(grid, acc.into_iter().map(|a| a * scale).collect())
}
