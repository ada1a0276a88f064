use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::FrequencyGrid;
use crate::scalar::Real;

/// Base standard deviation of the Gaussian smoothing function, in bins, at
/// scale 1.
pub const GAUSSIAN_BASE_SIGMA_BINS: f64 = 2.0;
/// Base width of the db1 (Haar scaling function) box, in bins, at scale 1.
pub const DB1_BASE_WIDTH_BINS: usize = 4;
/// Largest supported dyadic scale.
pub const MAX_SCALE: usize = 256;

/// Samples below this fraction of the kernel peak are dropped.
const TRUNCATION: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KernelFamily {
    /// Orthogonal: Daubechies-1 scaling function (unit-area box).
    Db1,
    /// Non-orthogonal: unit-area Gaussian.
    Gaussian,
}

impl KernelFamily {
    pub fn name(self) -> &'static str {
        match self {
            KernelFamily::Db1 => "db1",
            KernelFamily::Gaussian => "gaussian",
        }
    }
}

impl fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "db1" | "haar" | "orthogonal" => Ok(KernelFamily::Db1),
            "gaussian" | "gauss" | "non-orthogonal" => Ok(KernelFamily::Gaussian),
            other => Err(Error::Config(format!("unknown wavelet family {other:?}"))),
        }
    }
}

/// Dilated smoothing function `ψ_s(f) = (1/s)·ψ(f/s)` sampled at the grid
/// spacing and centred on the middle sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothingKernel<T> {
    family: KernelFamily,
    scale: usize,
    spacing: T,
    samples: Vec<T>,
    /// Analytic `dψ_s/df` on the same support (Gaussian only).
    derivative: Option<Vec<T>>,
}

impl<T: Real> SmoothingKernel<T> {
    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn scale(&self) -> usize {
        self.scale
    }

    /// Bin spacing Δf in MHz.
    pub fn spacing(&self) -> T {
        self.spacing
    }

    /// Taps from `−half_len` to `+half_len` bins.
    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn derivative(&self) -> Option<&[T]> {
        self.derivative.as_deref()
    }

    pub fn half_len(&self) -> usize {
        self.samples.len() / 2
    }

    /// `Σ samples · Δf`.
    pub fn area(&self) -> T {
        self.samples.iter().copied().sum::<T>() * self.spacing
    }
}

pub fn check_scale(scale: usize) -> Result<()> {
    if scale < 2 || scale > MAX_SCALE || !scale.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "scale {scale} is not a dyadic scale in 2..={MAX_SCALE}"
        )));
    }
    Ok(())
}

/// Continuous Gaussian smoothing function at scale `s` (MHz axis).
pub fn gaussian_psi<T: Real>(f: T, scale: usize, spacing: T) -> T {
    let sigma = T::lit(GAUSSIAN_BASE_SIGMA_BINS) * spacing * T::from_usize_lossy(scale);
    let norm = T::one() / (sigma * (T::lit(2.0) * T::PI()).sqrt());
    norm * (-(f * f) / (T::lit(2.0) * sigma * sigma)).exp()
}

pub fn kernel_samples<T: Real>(
    family: KernelFamily,
    scale: usize,
    grid: &FrequencyGrid<T>,
) -> Result<SmoothingKernel<T>> {
    check_scale(scale)?;
    let spacing = grid.spacing();
    let s = T::from_usize_lossy(scale);
    match family {
        KernelFamily::Gaussian => {
            let sigma_bins = GAUSSIAN_BASE_SIGMA_BINS * scale as f64;
            let half = (sigma_bins * (-2.0 * TRUNCATION.ln()).sqrt()).ceil() as usize;
            let offsets = || (0..=2 * half).map(|i| T::from_usize_lossy(i) - T::from_usize_lossy(half));
            let samples: Vec<T> = offsets().map(|b| gaussian_psi(b * spacing, scale, spacing)).collect();
            let sigma = T::lit(GAUSSIAN_BASE_SIGMA_BINS) * spacing * s;
            let derivative = offsets()
                .zip(&samples)
                .map(|(b, &v)| -(b * spacing) / (sigma * sigma) * v)
                .collect();
            Ok(SmoothingKernel { family, scale, spacing, samples, derivative: Some(derivative) })
        }
        KernelFamily::Db1 => {
            // Centred box of width DB1_BASE_WIDTH_BINS·s bins; the two
            // discontinuity samples take the midpoint value.
            let half = DB1_BASE_WIDTH_BINS * scale / 2;
            let height = T::one() / (T::from_usize_lossy(DB1_BASE_WIDTH_BINS) * s * spacing);
            let mut samples = vec![height; 2 * half + 1];
            samples[0] = height / T::lit(2.0);
            samples[2 * half] = height / T::lit(2.0);
            Ok(SmoothingKernel { family, scale, spacing, samples, derivative: None })
        }
    }
}
