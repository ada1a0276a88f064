//! Compression-ratio sweep of the compressive sensing pipeline for sparse
//! and dense occupancy.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use crate::compressive::{cs_sense_pipeline, write_diagnostics_csv, CsSenseConfig, DiagnosticsRow};
use crate::detectors::ThresholdPolicy;
use crate::error::Result;
use crate::harness::config::{CsProfile, ExperimentConfig};
use crate::harness::svg::{LineChart, Series};
use crate::harness::{check_header, csv_writer, mean_and_se, parse_field, run_trials};
use crate::model::{synthesize_time_series, NoiseSpec, SubchannelPlan, TimeSeriesSpec};
use crate::rng::{derive_seed, Label};

pub const CS_HEADER: [&str; 12] = [
    "profile",
    "ratio",
    "M",
    "L",
    "mean_rel_error",
    "rel_error_std_error",
    "mean_mu",
    "mu_std_error",
    "detection_rate",
    "detection_std_error",
    "false_alarm_rate",
    "trials",
];

#[derive(Debug, Clone, PartialEq)]
pub struct CsRow {
    pub profile: String,
    pub ratio: f64,
    pub m: usize,
    pub l: usize,
    pub mean_rel_error: f64,
    pub rel_error_std_error: f64,
    pub mean_mu: f64,
    pub mu_std_error: f64,
    /// Fraction of occupied channels declared occupied.
    pub detection_rate: f64,
    pub detection_std_error: f64,
    /// Fraction of idle channels declared occupied; empty when none are idle.
    pub false_alarm_rate: Option<f64>,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CsTradeoff {
    pub rows: Vec<CsRow>,
    /// Per-trial diagnostics keyed by profile name, ordered by ratio then trial.
    pub diagnostics: Vec<(String, Vec<DiagnosticsRow>)>,
}

impl CsTradeoff {
    pub fn get(&self, profile: CsProfile, ratio: f64) -> Option<&CsRow> {
        self.rows.iter().find(|r| r.profile == profile.name() && r.ratio == ratio)
    }
}

pub fn occupancy(config: &ExperimentConfig, profile: CsProfile) -> Vec<bool> {
    let k = config.cs.channels;
    match profile {
        CsProfile::Sparse => (1..=k).map(|c| config.cs.occupied.contains(&c)).collect(),
        CsProfile::Dense => vec![true; k],
    }
}

struct Trial {
    diag: DiagnosticsRow,
    detected: usize,
    false_alarms: usize,
}

/// One (profile, ratio) cell. Data depend on (profile, trial) only, so every
/// ratio sees the same spectra.
pub fn run_cell(config: &ExperimentConfig, profile: CsProfile, ratio: f64) -> Result<(CsRow, Vec<DiagnosticsRow>)> {
    let cs = &config.cs;
    let occ = occupancy(config, profile);
    let power = config.noise.floor * 10f64.powf(cs.snr_db / 10.0);
    let plan = SubchannelPlan::uniform(
        0.0,
        cs.channels as f64,
        cs.channels,
        occ.clone(),
        occ.iter().map(|&o| if o { power } else { 0.0 }).collect(),
    )?;
    let noise = NoiseSpec::floor(config.noise.floor);
    let policy = ThresholdPolicy::new(cs.pfa, config.noise.floor, cs.n_fft)?;
    let sense = CsSenseConfig::new(ratio, cs.basis, cs.measurement, policy)?;
    let rate = config.energy.sample_rate_hz;

    let trials = run_trials(config.threads, cs.trials, || (), |_, trial| {
        let data_seed = derive_seed(config.master_seed, &[Label::from("cs-data"), profile.name().into(), trial.into()]);
        let x = synthesize_time_series(&plan, &noise, &TimeSeriesSpec::new(cs.n_fft, rate, data_seed)?);
        let theta_seed = derive_seed(data_seed, &[Label::from("cs-ratio"), ratio.into()]);
        let out = cs_sense_pipeline(&x, &sense, theta_seed)?;
        let mut detected = 0;
        let mut false_alarms = 0;
        for (d, &busy) in out.decisions.iter().zip(&occ) {
            if d.hypothesis.is_occupied() {
                if busy {
                    detected += 1;
                } else {
                    false_alarms += 1;
                }
            }
        }
        Ok(Trial { diag: DiagnosticsRow::new(trial, &out.diagnostics), detected, false_alarms })
    })?;

    let n_busy = occ.iter().filter(|&&o| o).count();
    let n_idle = occ.len() - n_busy;
    let rel: Vec<f64> = trials.iter().map(|t| t.diag.rel_error).collect();
    let mu: Vec<f64> = trials.iter().map(|t| t.diag.mu).collect();
    let det: Vec<f64> = trials.iter().map(|t| t.detected as f64 / n_busy.max(1) as f64).collect();
    let (mean_rel_error, rel_error_std_error) = mean_and_se(&rel);
    let (mean_mu, mu_std_error) = mean_and_se(&mu);
    let (detection_rate, detection_std_error) = mean_and_se(&det);
    let false_alarm_rate = (n_idle > 0)
        .then(|| trials.iter().map(|t| t.false_alarms).sum::<usize>() as f64 / (n_idle * trials.len()) as f64);
    let first = trials[0].diag;
    let row = CsRow {
        profile: profile.name().to_string(),
        ratio,
        m: first.m,
        l: first.l,
        mean_rel_error,
        rel_error_std_error,
        mean_mu,
        mu_std_error,
        detection_rate,
        detection_std_error,
        false_alarm_rate,
        trials: trials.len(),
    };
    Ok((row, trials.into_iter().map(|t| t.diag).collect()))
}

pub fn run_cs_tradeoff(config: &ExperimentConfig) -> Result<CsTradeoff> {
    let mut out = CsTradeoff::default();
    for &profile in &config.cs.profiles {
        let mut diags = Vec::new();
        for &ratio in &config.cs.ratios {
            let (row, d) = run_cell(config, profile, ratio)?;
            out.rows.push(row);
            diags.extend(d);
        }
        out.diagnostics.push((profile.name().to_string(), diags));
    }
    Ok(out)
}

pub fn write_cs_csv<W: Write>(w: W, rows: &[CsRow]) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(CS_HEADER)?;
    for r in rows {
        out.write_record([
            r.profile.clone(),
            r.ratio.to_string(),
            r.m.to_string(),
            r.l.to_string(),
            r.mean_rel_error.to_string(),
            r.rel_error_std_error.to_string(),
            r.mean_mu.to_string(),
            r.mu_std_error.to_string(),
            r.detection_rate.to_string(),
            r.detection_std_error.to_string(),
            r.false_alarm_rate.map_or(String::new(), |v| v.to_string()),
            r.trials.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_cs_csv<R: Read>(r: R) -> Result<Vec<CsRow>> {
    let mut rdr = csv::Reader::from_reader(r);
    check_header(&mut rdr, &CS_HEADER)?;
    rdr.records()
        .enumerate()
        .map(|(i, rec)| {
            let rec = rec?;
            let line = i + 2;
            Ok(CsRow {
                profile: rec[0].to_string(),
                ratio: parse_field(&rec[1], line)?,
                m: parse_field(&rec[2], line)?,
                l: parse_field(&rec[3], line)?,
                mean_rel_error: parse_field(&rec[4], line)?,
                rel_error_std_error: parse_field(&rec[5], line)?,
                mean_mu: parse_field(&rec[6], line)?,
                mu_std_error: parse_field(&rec[7], line)?,
                detection_rate: parse_field(&rec[8], line)?,
                detection_std_error: parse_field(&rec[9], line)?,
                false_alarm_rate: if rec[10].is_empty() { None } else { Some(parse_field(&rec[10], line)?) },
                trials: parse_field(&rec[11], line)?,
            })
        })
        .collect()
}

pub fn cs_chart(result: &CsTradeoff) -> LineChart {
    let series = result
        .diagnostics
        .iter()
        .map(|(profile, _)| Series {
            label: profile.clone(),
            points: result.rows.iter().filter(|r| &r.profile == profile).map(|r| (r.ratio, r.mean_rel_error)).collect(),
        })
        .collect();
    LineChart {
        title: "Reconstruction error vs compression ratio".into(),
        x_label: "M/L".into(),
        y_label: "mean relative error".into(),
        series,
        ..Default::default()
    }
}

/// Writes `cs_tradeoff.csv`, `cs_tradeoff.svg` and one
/// `cs_diagnostics_<profile>.csv` per profile under `dir`.
pub fn write_cs_tradeoff(dir: &Path, result: &CsTradeoff) -> Result<()> {
    let mut buf = Vec::new();
    write_cs_csv(&mut buf, &result.rows)?;
    fs::write(dir.join("cs_tradeoff.csv"), buf)?;
    for (profile, rows) in &result.diagnostics {
        let mut buf = Vec::new();
        write_diagnostics_csv(&mut buf, rows)?;
        fs::write(dir.join(format!("cs_diagnostics_{profile}.csv")), buf)?;
    }
    fs::write(dir.join("cs_tradeoff.svg"), cs_chart(result).render())?;
    Ok(())
}
