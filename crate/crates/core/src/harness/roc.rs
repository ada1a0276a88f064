//! Monte-Carlo operating points of the single-channel energy detector.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use crate::detectors::{channelize, energy_statistic, threshold_for_pfa, ThresholdPolicy};
use crate::error::Result;
use crate::harness::config::ExperimentConfig;
use crate::harness::svg::{LineChart, Series};
use crate::harness::{check_header, csv_writer, parse_field, run_trials};
use crate::model::{synthesize_time_series, NoiseSpec, SubchannelPlan, TimeSeriesSpec};
use crate::rng::{derive_seed, Label};

pub const ROC_HEADER: [&str; 7] =
    ["snr_db", "target_pfa", "empirical_pfa", "pfa_std_error", "empirical_pd", "pd_std_error", "trials"];

#[derive(Debug, Clone, PartialEq)]
pub struct RocRow {
    /// `-inf` for a signal-free "H1".
    pub snr_db: f64,
    pub target_pfa: f64,
    pub empirical_pfa: f64,
    pub pfa_std_error: f64,
    pub empirical_pd: f64,
    pub pd_std_error: f64,
    pub trials: usize,
}

fn rate_and_se(hits: usize, n: usize) -> (f64, f64) {
    let p = hits as f64 / n as f64;
    (p, (p * (1.0 - p) / n as f64).sqrt())
}

/// Energy statistics of `trials` independent single-channel draws.
fn statistics(config: &ExperimentConfig, power: f64, stream: &str) -> Result<Vec<f64>> {
    let n_fft = config.roc.n_fft;
    let noise = NoiseSpec::floor(config.noise.floor);
    let plan = SubchannelPlan::uniform(0.0, 1.0, 1, vec![power > 0.0], vec![power])?;
    let rate = config.energy.sample_rate_hz;
    run_trials(config.threads, config.roc.trials, || (), |_, trial| {
        let seed = derive_seed(config.master_seed, &[Label::from(stream), trial.into()]);
        let x = synthesize_time_series(&plan, &noise, &TimeSeriesSpec::new(n_fft, rate, seed)?);
        Ok(energy_statistic(&channelize(&x, n_fft)?[0]).value)
    })
}

pub fn run_roc(config: &ExperimentConfig) -> Result<Vec<RocRow>> {
    let n = config.roc.trials;
    let thresholds = config
        .roc
        .pfa_grid
        .iter()
        .map(|&p| Ok(threshold_for_pfa(&ThresholdPolicy::new(p, config.noise.floor, config.roc.n_fft)?)))
        .collect::<Result<Vec<f64>>>()?;
    let null = statistics(config, 0.0, "roc-noise")?;
    let mut rows = Vec::new();
    for &snr in &config.roc.snr_db {
        let power = config.noise.floor * 10f64.powf(snr / 10.0);
        let alt = statistics(config, power, &format!("roc-signal/{snr}"))?;
        for (&target, &xi) in config.roc.pfa_grid.iter().zip(&thresholds) {
            let (pfa, pfa_se) = rate_and_se(null.iter().filter(|&&e| e > xi).count(), n);
            let (pd, pd_se) = rate_and_se(alt.iter().filter(|&&e| e > xi).count(), n);
            rows.push(RocRow {
                snr_db: snr,
                target_pfa: target,
                empirical_pfa: pfa,
                pfa_std_error: pfa_se,
                empirical_pd: pd,
                pd_std_error: pd_se,
                trials: n,
            });
        }
    }
    Ok(rows)
}

pub fn write_roc_csv<W: Write>(w: W, rows: &[RocRow]) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(ROC_HEADER)?;
    for r in rows {
        out.write_record([
            r.snr_db.to_string(),
            r.target_pfa.to_string(),
            r.empirical_pfa.to_string(),
            r.pfa_std_error.to_string(),
            r.empirical_pd.to_string(),
            r.pd_std_error.to_string(),
            r.trials.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_roc_csv<R: Read>(r: R) -> Result<Vec<RocRow>> {
    let mut rdr = csv::Reader::from_reader(r);
    check_header(&mut rdr, &ROC_HEADER)?;
    rdr.records()
        .enumerate()
        .map(|(i, rec)| {
            let rec = rec?;
            let line = i + 2;
            Ok(RocRow {
                snr_db: parse_field(&rec[0], line)?,
                target_pfa: parse_field(&rec[1], line)?,
                empirical_pfa: parse_field(&rec[2], line)?,
                pfa_std_error: parse_field(&rec[3], line)?,
                empirical_pd: parse_field(&rec[4], line)?,
                pd_std_error: parse_field(&rec[5], line)?,
                trials: parse_field(&rec[6], line)?,
            })
        })
        .collect()
}

pub fn roc_chart(rows: &[RocRow], config: &ExperimentConfig) -> LineChart {
    let series = config
        .roc
        .snr_db
        .iter()
        .map(|&snr| Series {
            label: format!("{snr} dB"),
            points: rows.iter().filter(|r| r.snr_db == snr).map(|r| (r.target_pfa, r.empirical_pd)).collect(),
        })
        .collect();
    LineChart {
        title: format!("Energy detector, N = {}", config.roc.n_fft),
        x_label: "target false-alarm probability".into(),
        y_label: "detection probability".into(),
        series,
        ..Default::default()
    }
}

/// Writes `roc.csv` and `roc.svg` under `dir`.
pub fn write_roc(dir: &Path, rows: &[RocRow], config: &ExperimentConfig) -> Result<()> {
    let mut buf = Vec::new();
    write_roc_csv(&mut buf, rows)?;
    fs::write(dir.join("roc.csv"), buf)?;
    fs::write(dir.join("roc.svg"), roc_chart(rows, config).render())?;
    Ok(())
}
