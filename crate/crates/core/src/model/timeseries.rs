use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::model::noise::NoiseSpec;
use crate::model::plan::SubchannelPlan;
use crate::rng::{self, StreamRng};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeSeriesSpec<T> {
    pub n_samples_per_channel: usize,
    /// Hz.
    pub sample_rate: T,
    pub seed: u64,
}

impl<T: Real> TimeSeriesSpec<T> {
    pub const MIN_SAMPLES: usize = 8;

    pub fn new(n_samples_per_channel: usize, sample_rate: T, seed: u64) -> Result<Self> {
        if n_samples_per_channel < Self::MIN_SAMPLES {
            return Err(Error::InvalidArgument(format!(
                "need at least {} samples per channel, got {n_samples_per_channel}",
                Self::MIN_SAMPLES
            )));
        }
        if !(sample_rate.is_finite() && sample_rate > T::zero()) {
            return Err(Error::InvalidArgument("sample_rate must be positive".into()));
        }
        Ok(Self { n_samples_per_channel, sample_rate, seed })
    }
}

/// Zero-mean circular complex Gaussian sample with `E|z|² = variance`.
pub fn complex_gaussian<T: Real>(rng: &mut StreamRng, variance: T) -> Complex<T> {
    let s = (variance / T::lit(2.0)).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(T::lit(re) * s, T::lit(im) * s)
}

/// Per-channel baseband samples `r_k = x_k + w_k`.
///
/// Occupied channels carry a white circular Gaussian PU signal of variance
/// `power[k]`; every channel carries white noise of variance `awgn_floor`.
/// Signal and noise draw from separate labeled streams per channel.
pub fn synthesize_time_series<T: Real>(
    plan: &SubchannelPlan<T>,
    noise: &NoiseSpec<T>,
    spec: &TimeSeriesSpec<T>,
) -> Vec<Vec<Complex<T>>> {
    let n = spec.n_samples_per_channel;
    (0..plan.channel_count())
        .map(|k| {
            let mut w_rng = rng::stream(spec.seed, &["ts-noise".into(), k.into()]);
            let mut samples: Vec<Complex<T>> =
                (0..n).map(|_| complex_gaussian(&mut w_rng, noise.awgn_floor)).collect();
            if plan.occupancy()[k] {
                let mut x_rng = rng::stream(spec.seed, &["ts-signal".into(), k.into()]);
                for s in samples.iter_mut() {
                    *s = *s + complex_gaussian(&mut x_rng, plan.power()[k]);
                }
            }
            samples
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn variance(x: &[Complex<f64>]) -> f64 {
        x.iter().map(|z| z.norm_sqr()).sum::<f64>() / x.len() as f64
    }

    #[test]
    fn idle_channels_carry_floor_variance() {
        let plan = SubchannelPlan::uniform(0.0, 30.0, 3, vec![false; 3], vec![0.0; 3]).unwrap();
        let spec = TimeSeriesSpec::new(10_000, 1e6, 5).unwrap();
        let r = synthesize_time_series(&plan, &NoiseSpec::floor(2.0), &spec);
        assert_eq!(r.len(), 3);
        for ch in &r {
            let v = variance(ch);
            assert!((v - 2.0).abs() < 0.1, "variance {v}");
        }
    }

    #[test]
    fn variances_add() {
        let plan = SubchannelPlan::uniform(0.0, 10.0, 1, vec![true], vec![10.0]).unwrap();
        let spec = TimeSeriesSpec::new(10_000, 1e6, 11).unwrap();
        let r = synthesize_time_series(&plan, &NoiseSpec::floor(1.0), &spec);
        let v = variance(&r[0]);
        assert!((v - 11.0).abs() < 0.55, "variance {v}");
    }

    #[test]
    fn minimum_length_and_determinism() {
        assert!(TimeSeriesSpec::<f64>::new(7, 1e6, 0).is_err());
        let plan = SubchannelPlan::uniform(0.0, 10.0, 2, vec![true, false], vec![1.0, 0.0]).unwrap();
        let spec = TimeSeriesSpec::new(8, 1e6, 3).unwrap();
        let a = synthesize_time_series(&plan, &NoiseSpec::floor(1.0), &spec);
        let b = synthesize_time_series(&plan, &NoiseSpec::floor(1.0), &spec);
        assert!(a.iter().all(|c| c.len() == 8));
        assert_eq!(a, b);
    }

    #[test]
    fn occupancy_does_not_perturb_noise_stream() {
        let spec = TimeSeriesSpec::new(64, 1e6, 3).unwrap();
        let busy = SubchannelPlan::uniform(0.0, 10.0, 2, vec![true, false], vec![1.0, 0.0]).unwrap();
        let idle = SubchannelPlan::uniform(0.0, 10.0, 2, vec![false, false], vec![0.0, 0.0]).unwrap();
        let a = synthesize_time_series(&busy, &NoiseSpec::floor(1.0), &spec);
        let b = synthesize_time_series(&idle, &NoiseSpec::floor(1.0), &spec);
        assert_eq!(a[1], b[1]);
    }
}
