//! Per-subchannel energy detection.
//!
//! Each channel's first `n_fft` samples are transformed with the unnormalized
//! DFT, the statistic `E_k = Σ|R_k(m)|²` is formed and compared against a
//! Neyman–Pearson threshold computed from the exact chi-square null
//! distribution under known noise power.

use std::io::{Read, Write};

use num_complex::Complex;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::fft;
use crate::scalar::Real;

/// Smallest FFT size accepted by [`channelize`].
pub const MIN_FFT: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSpectrum<T> {
    /// 1-based subchannel index.
    pub channel_index: usize,
    pub bins: Vec<Complex<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyStatistic<T> {
    pub channel_index: usize,
    pub value: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    /// Idle.
    H0,
    /// Occupied.
    H1,
}

impl Hypothesis {
    pub fn is_occupied(self) -> bool {
        self == Hypothesis::H1
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelDecision<T> {
    pub channel_index: usize,
    pub hypothesis: Hypothesis,
    pub statistic: EnergyStatistic<T>,
    pub threshold: T,
}

/// Target false-alarm rate with known noise power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdPolicy<T> {
    target_pfa: T,
    noise_power: T,
    n_fft: usize,
}

impl<T: Real> ThresholdPolicy<T> {
    pub fn new(target_pfa: T, noise_power: T, n_fft: usize) -> Result<Self> {
        if !(target_pfa > T::zero() && target_pfa < T::one()) {
            return Err(Error::InvalidArgument(format!(
                "target P_fa {target_pfa} must lie in (0, 1)"
            )));
        }
        if !(noise_power.is_finite() && noise_power > T::zero()) {
            return Err(Error::InvalidArgument("noise power must be positive".into()));
        }
        check_fft_size(n_fft)?;
        Ok(Self { target_pfa, noise_power, n_fft })
    }

    pub fn target_pfa(&self) -> T {
        self.target_pfa
    }

    pub fn noise_power(&self) -> T {
        self.noise_power
    }

    pub fn n_fft(&self) -> usize {
        self.n_fft
    }
}

fn check_fft_size(n_fft: usize) -> Result<()> {
    if n_fft < MIN_FFT || !n_fft.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "FFT size {n_fft} must be a power of two >= {MIN_FFT}"
        )));
    }
    Ok(())
}

/// Unnormalized DFT of the first `n_fft` samples of every channel.
pub fn channelize<T: Real>(
    samples_per_channel: &[Vec<Complex<T>>],
    n_fft: usize,
) -> Result<Vec<ChannelSpectrum<T>>> {
    check_fft_size(n_fft)?;
    samples_per_channel
        .iter()
        .enumerate()
        .map(|(k, x)| {
            if x.len() < n_fft {
                return Err(Error::InsufficientSamples { needed: n_fft, available: x.len() });
            }
            Ok(ChannelSpectrum { channel_index: k + 1, bins: fft::forward(&x[..n_fft]) })
        })
        .collect()
}

pub fn energy_statistic<T: Real>(spectrum: &ChannelSpectrum<T>) -> EnergyStatistic<T> {
    EnergyStatistic {
        channel_index: spectrum.channel_index,
        value: spectrum.bins.iter().map(|b| b.norm_sqr()).sum(),
    }
}

/// Threshold ξ with `P(E > ξ | H0) = target_pfa`.
///
/// Under H0 each of the `N_F` noise samples is circular Gaussian with
/// variance σ², and Parseval gives `E = N_F·Σ|w(n)|²`, so
/// `E / (σ²·N_F/2) ~ χ²(2·N_F)`.
pub fn threshold_for_pfa<T: Real>(policy: &ThresholdPolicy<T>) -> T {
    let n = policy.n_fft;
    let chi2 = ChiSquared::new(2.0 * n as f64).expect("positive degrees of freedom");
    let q = chi2.inverse_cdf(1.0 - policy.target_pfa.as_f64());
    T::lit(q) * policy.noise_power * T::from_usize_lossy(n) / T::lit(2.0)
}

/// H1 iff the statistic strictly exceeds the threshold.
pub fn decide<T: Real>(statistic: EnergyStatistic<T>, threshold: T) -> ChannelDecision<T> {
    let hypothesis = if statistic.value > threshold { Hypothesis::H1 } else { Hypothesis::H0 };
    ChannelDecision { channel_index: statistic.channel_index, hypothesis, statistic, threshold }
}

/// Run channelize → energy → decide independently on every channel.
pub fn multiband_decide<T: Real>(
    per_channel_samples: &[Vec<Complex<T>>],
    policy: &ThresholdPolicy<T>,
) -> Result<Vec<ChannelDecision<T>>> {
    if per_channel_samples.is_empty() {
        return Err(Error::InvalidArgument("at least one channel is required".into()));
    }
    let threshold = threshold_for_pfa(policy);
    Ok(channelize(per_channel_samples, policy.n_fft)?
        .iter()
        .map(|s| decide(energy_statistic(s), threshold))
        .collect())
}

/// One row of the decision CSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionRow {
    pub channel: usize,
    pub statistic: f64,
    pub threshold: f64,
    pub decision: u8,
}

impl<T: Real> From<&ChannelDecision<T>> for DecisionRow {
    fn from(d: &ChannelDecision<T>) -> Self {
        DecisionRow {
            channel: d.channel_index,
            statistic: d.statistic.value.as_f64(),
            threshold: d.threshold.as_f64(),
            decision: d.hypothesis.is_occupied() as u8,
        }
    }
}

pub const DECISION_HEADER: [&str; 4] = ["channel", "statistic", "threshold", "decision"];

pub fn write_decisions_csv<T: Real, W: Write>(w: W, decisions: &[ChannelDecision<T>]) -> Result<()> {
    let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    out.write_record(DECISION_HEADER)?;
    for d in decisions {
        let r = DecisionRow::from(d);
        out.write_record([
            r.channel.to_string(),
            r.statistic.to_string(),
            r.threshold.to_string(),
            r.decision.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_decisions_csv<R: Read>(r: R) -> Result<Vec<DecisionRow>> {
    let mut rdr = csv::Reader::from_reader(r);
    let header = rdr.headers()?.clone();
    if header.iter().ne(DECISION_HEADER) {
        return Err(Error::Parse { line: 1, message: format!("unexpected header {header:?}") });
    }
    let bad = |line: usize, what: &str| Error::Parse { line, message: format!("bad {what}") };
    rdr.records()
        .enumerate()
        .map(|(i, rec)| {
            let rec = rec?;
            let line = i + 2;
            Ok(DecisionRow {
                channel: rec[0].parse().map_err(|_| bad(line, "channel"))?,
                statistic: rec[1].parse().map_err(|_| bad(line, "statistic"))?,
                threshold: rec[2].parse().map_err(|_| bad(line, "threshold"))?,
                decision: match &rec[3] {
                    "0" => 0,
                    "1" => 1,
                    _ => return Err(bad(line, "decision")),
                },
            })
        })
        .collect()
}
