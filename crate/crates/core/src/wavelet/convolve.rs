//! Frequency-domain CWT: convolution of the PSD with a sampled kernel.
//!
//! Both ends of the PSD are extended by whole-sample symmetric reflection
//! (`x[−k] = x[k]`), which keeps the derivative response of a flat band end
//! at zero.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::model::{FrequencyGrid, WidebandPsd};
use crate::scalar::Real;
use crate::wavelet::kernel::{KernelFamily, SmoothingKernel};

/// Index into a length-`n` signal extended by symmetric reflection.
pub fn reflect_index(i: isize, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let period = 2 * (n as isize - 1);
    let j = i.rem_euclid(period);
    if j >= n as isize {
        (period - j) as usize
    } else {
        j as usize
    }
}

/// Per-bin response of a smoothing/derivative stage or a multiscale combiner.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiscaleResponse<T> {
    pub grid: FrequencyGrid<T>,
    pub values: Vec<T>,
    /// Largest dyadic scale that went into the response; sets the width of
    /// the local-maximum neighbourhood.
    pub max_scale: usize,
}

impl<T: Real> MultiscaleResponse<T> {
    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }
}

/// FFT convolution engine; caches FFT plans across calls.
pub struct Convolver<T: Real> {
    planner: FftPlanner<T>,
}

impl<T: Real> Default for Convolver<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Real> Convolver<T> {
    pub fn new() -> Self {
        Self { planner: FftPlanner::new() }
    }

    fn plans(&mut self, n: usize) -> (Arc<dyn Fft<T>>, Arc<dyn Fft<T>>) {
        (self.planner.plan_fft_forward(n), self.planner.plan_fft_inverse(n))
    }

    /// `y[i] = Δf·Σ_t x[i − t]·taps[t + h]` for `i ∈ [−extra, n + extra)`,
    /// where `taps` has odd length `2h + 1` centred on tap `h`.
    pub fn convolve_reflected(&mut self, x: &[T], taps: &[T], spacing: T, extra: usize) -> Vec<T> {
        let n = x.len();
        let h = taps.len() / 2;
        let pad = h + extra;
        let padded_len = n + 2 * pad;
        let full_len = padded_len + taps.len() - 1;
        let size = full_len.next_power_of_two();
        let (fwd, inv) = self.plans(size);

        let zero = Complex::new(T::zero(), T::zero());
        let mut a = vec![zero; size];
        for (k, slot) in a.iter_mut().take(padded_len).enumerate() {
            *slot = Complex::new(x[reflect_index(k as isize - pad as isize, n)], T::zero());
        }
        let mut b = vec![zero; size];
        for (slot, &t) in b.iter_mut().zip(taps) {
            *slot = Complex::new(t, T::zero());
        }
        fwd.process(&mut a);
        fwd.process(&mut b);
        for (u, v) in a.iter_mut().zip(&b) {
            *u = *u * *v;
        }
        inv.process(&mut a);

        // Output i (−extra ≤ i < n + extra) sits at padded centre i + pad and
        // therefore at full-convolution index i + pad + h.
        let scale = spacing / T::from_usize_lossy(size);
        (0..n + 2 * extra).map(|k| a[k + h + h].re * scale).collect()
    }

    /// Smoothed PSD `W_s(f) = R̂(f) * ψ_s(f)`.
    pub fn smooth(&mut self, psd: &WidebandPsd<T>, kernel: &SmoothingKernel<T>) -> Result<MultiscaleResponse<T>> {
        check_spacing(psd.grid(), kernel)?;
        let values = self.convolve_reflected(psd.values(), kernel.samples(), kernel.spacing(), 0);
        Ok(MultiscaleResponse { grid: *psd.grid(), values, max_scale: kernel.scale() })
    }

    /// First derivative `W′_s(f)`.
    ///
    /// Gaussian: convolution with the analytic derivative of the kernel.
    /// db1: central difference of the smoothed PSD divided by Δf.
    pub fn derivative(&mut self, psd: &WidebandPsd<T>, kernel: &SmoothingKernel<T>) -> Result<MultiscaleResponse<T>> {
        check_spacing(psd.grid(), kernel)?;
        let values = match (kernel.family(), kernel.derivative()) {
            (KernelFamily::Gaussian, Some(d)) => {
                self.convolve_reflected(psd.values(), d, kernel.spacing(), 0)
            }
            _ => {
                let w = self.convolve_reflected(psd.values(), kernel.samples(), kernel.spacing(), 1);
                let two_df = T::lit(2.0) * kernel.spacing();
                (1..w.len() - 1).map(|i| (w[i + 1] - w[i - 1]) / two_df).collect()
            }
        };
        Ok(MultiscaleResponse { grid: *psd.grid(), values, max_scale: kernel.scale() })
    }
}

fn check_spacing<T: Real>(grid: &FrequencyGrid<T>, kernel: &SmoothingKernel<T>) -> Result<()> {
    let df = grid.spacing();
    if (df - kernel.spacing()).abs() > T::lit(1e-9) * df {
        return Err(Error::InvalidArgument(format!(
            "kernel spacing {} does not match grid spacing {df}",
            kernel.spacing()
        )));
    }
    Ok(())
}

/// [`Convolver::smooth`] with a throwaway engine.
pub fn cwt<T: Real>(psd: &WidebandPsd<T>, kernel: &SmoothingKernel<T>) -> Result<MultiscaleResponse<T>> {
    Convolver::new().smooth(psd, kernel)
}

/// [`Convolver::derivative`] with a throwaway engine.
pub fn cwt_derivative<T: Real>(
    psd: &WidebandPsd<T>,
    kernel: &SmoothingKernel<T>,
) -> Result<MultiscaleResponse<T>> {
    Convolver::new().derivative(psd, kernel)
}
