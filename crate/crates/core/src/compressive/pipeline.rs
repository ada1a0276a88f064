use std::io::{Read, Write};

use num_complex::Complex;

use crate::compressive::basis::{make_basis, BasisKind};
use crate::compressive::measurement::{coherence, make_measurement_matrix, measure, MeasurementKind};
use crate::compressive::omp::{reconstruct_omp, StopRule};
use crate::detectors::{channelize, decide, threshold_for_pfa, ChannelDecision, EnergyStatistic, ThresholdPolicy};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, Label};
use crate::scalar::Real;

/// Relative residual at which pursuit stops early.
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsSenseConfig<T> {
    /// M/L in (0, 1].
    pub compression_ratio: T,
    pub basis: BasisKind,
    pub measurement: MeasurementKind,
    pub policy: ThresholdPolicy<T>,
    /// Atom budget; `None` means M for subsampling or a square Θ and ⌈M/2⌉
    /// otherwise.
    pub max_atoms: Option<usize>,
}

impl<T: Real> CsSenseConfig<T> {
    pub fn new(compression_ratio: T, basis: BasisKind, measurement: MeasurementKind, policy: ThresholdPolicy<T>) -> Result<Self> {
        if !(compression_ratio > T::zero() && compression_ratio <= T::one()) {
            return Err(Error::InvalidArgument(format!("compression ratio {compression_ratio} outside (0, 1]")));
        }
        Ok(Self { compression_ratio, basis, measurement, policy, max_atoms: None })
    }

    /// Number of measurements for a length-`l` spectrum vector.
    pub fn measurements_for(&self, l: usize) -> usize {
        let m = (self.compression_ratio * T::from_usize_lossy(l)).round().to_usize().unwrap_or(l);
        m.clamp(1, l)
    }

    fn atom_budget(&self, m: usize, l: usize) -> usize {
        self.max_atoms.unwrap_or(match self.measurement {
            _ if m == l => m,
            MeasurementKind::Identity => m,
            _ => m.div_ceil(2),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsDiagnostics<T> {
    pub m: usize,
    pub l: usize,
    pub mu: T,
    pub rel_error: T,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsSenseOutcome<T> {
    pub decisions: Vec<ChannelDecision<T>>,
    pub diagnostics: CsDiagnostics<T>,
    /// `r̂ = [|R_1(0)|² … |R_K(N−1)|²]`.
    pub spectrum: Vec<T>,
    pub reconstruction: Vec<T>,
}

/// Concatenated per-bin energies of every channel.
pub fn spectrum_vector<T: Real>(samples: &[Vec<Complex<T>>], n_fft: usize) -> Result<Vec<T>> {
    Ok(channelize(samples, n_fft)?
        .into_iter()
        .flat_map(|s| s.bins.into_iter().map(|b| b.norm_sqr()))
        .collect())
}

/// Measure the channelized spectrum with a seeded Θ, recover it by OMP and
/// run the energy decision on each reconstructed channel.
pub fn cs_sense_pipeline<T: Real>(
    samples: &[Vec<Complex<T>>],
    config: &CsSenseConfig<T>,
    seed: u64,
) -> Result<CsSenseOutcome<T>> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("no channels to sense".into()));
    }
    let n = config.policy.n_fft();
    let spectrum = spectrum_vector(samples, n)?;
    let l = spectrum.len();
    let m = config.measurements_for(l);

    let basis = make_basis::<T>(l, config.basis)?;
    let theta = make_measurement_matrix::<T>(m, l, config.measurement, derive_seed(seed, &[Label::from("theta")]))?;
    let mu = coherence(&theta, &basis)?;
    let y = measure(&theta, &spectrum)?;
    let stop = StopRule::ResidualTol { tol: T::lit(DEFAULT_RESIDUAL_TOL), max_iter: config.atom_budget(m, l) };
    let rec = reconstruct_omp(&y, &theta, &basis, stop)?;
    let reconstruction: Vec<T> = rec.reconstruction.iter().map(|c| c.re).collect();

    let threshold = threshold_for_pfa(&config.policy);
    let decisions = reconstruction
        .chunks(n)
        .enumerate()
        .map(|(k, bins)| {
            let value = bins.iter().copied().sum::<T>();
            decide(EnergyStatistic { channel_index: k + 1, value }, threshold)
        })
        .collect();

    let err = spectrum.iter().zip(&reconstruction).map(|(a, b)| (*a - *b) * (*a - *b)).sum::<T>().sqrt();
    let scale = spectrum.iter().map(|a| *a * *a).sum::<T>().sqrt();
    let rel_error = if scale > T::zero() { err / scale } else { err };
    Ok(CsSenseOutcome {
        decisions,
        diagnostics: CsDiagnostics { m, l, mu, rel_error, iterations: rec.iterations, converged: rec.converged },
        spectrum,
        reconstruction,
    })
}

pub const DIAGNOSTICS_HEADER: [&str; 7] = ["trial", "M", "L", "mu", "rel_error", "iterations", "converged"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRow {
    pub trial: usize,
    pub m: usize,
    pub l: usize,
    pub mu: f64,
    pub rel_error: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl DiagnosticsRow {
    pub fn new<T: Real>(trial: usize, d: &CsDiagnostics<T>) -> Self {
        Self {
            trial,
            m: d.m,
            l: d.l,
            mu: d.mu.as_f64(),
            rel_error: d.rel_error.as_f64(),
            iterations: d.iterations,
            converged: d.converged,
        }
    }
}

pub fn write_diagnostics_csv<W: Write>(w: W, rows: &[DiagnosticsRow]) -> Result<()> {
    let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    out.write_record(DIAGNOSTICS_HEADER)?;
    for r in rows {
        out.write_record([
            r.trial.to_string(),
            r.m.to_string(),
            r.l.to_string(),
            r.mu.to_string(),
            r.rel_error.to_string(),
            r.iterations.to_string(),
            u8::from(r.converged).to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_diagnostics_csv<R: Read>(r: R) -> Result<Vec<DiagnosticsRow>> {
    let mut rdr = csv::Reader::from_reader(r);
    if rdr.headers()?.iter().ne(DIAGNOSTICS_HEADER) {
        return Err(Error::Parse { line: 1, message: "unexpected diagnostics header".into() });
    }
    rdr.records()
        .enumerate()
        .map(|(i, rec)| {
            let rec = rec?;
            let line = i + 2;
            let bad = |e: String| Error::Parse { line, message: e };
            let int = |s: &str| s.parse::<usize>().map_err(|e| bad(e.to_string()));
            let real = |s: &str| s.parse::<f64>().map_err(|e| bad(e.to_string()));
            let converged = match &rec[6] {
                "0" => false,
                "1" => true,
                other => return Err(bad(format!("converged flag {other:?}"))),
            };
            Ok(DiagnosticsRow {
                trial: int(&rec[0])?,
                m: int(&rec[1])?,
                l: int(&rec[2])?,
                mu: real(&rec[3])?,
                rel_error: real(&rec[4])?,
                iterations: int(&rec[5])?,
                converged,
            })
        })
        .collect()
}
