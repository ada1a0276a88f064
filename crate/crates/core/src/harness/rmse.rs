//! Edge RMSE as a function of the raised-cosine roll-off.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::Result;
use crate::harness::config::{ExperimentConfig, Method};
use crate::harness::svg::{LineChart, Series};
use crate::harness::{check_header, csv_writer, mean_and_se, parse_field, run_trials};
use crate::model::{add_noise, apply_raised_cosine, build_ideal_psd, EdgeShape};
use crate::rng::{derive_seed, Label};
use crate::wavelet::{edge_rmse, extract_edges, ChannelPartition, Convolver, EdgeThreshold, MultiscaleConfig};

pub const RMSE_HEADER: [&str; 6] = ["beta", "method", "family", "mean_rmse", "std_error", "trials"];

#[derive(Debug, Clone, PartialEq)]
pub struct RmseRow {
    pub beta: f64,
    /// `cwt`, `wmp`, `wms`, ...
    pub method: String,
    pub family: String,
    pub mean_rmse: f64,
    pub std_error: f64,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RmseTable {
    pub rows: Vec<RmseRow>,
}

impl RmseTable {
    pub fn get(&self, beta: f64, method: &str, family: &str) -> Option<&RmseRow> {
        self.rows.iter().find(|r| r.beta == beta && r.method == method && r.family == family)
    }
}

/// Seed of one trial; depends only on the cell and the trial index.
pub fn trial_seed(master: u64, trial: usize, method: &Method, beta: f64) -> u64 {
    derive_seed(
        master,
        &[Label::from("rmse"), trial.into(), method.label().into(), method.family.name().into(), beta.into()],
    )
}

/// RMSE of every trial of one (β, method) cell.
pub fn cell_samples(config: &ExperimentConfig, method: &Method, beta: f64) -> Result<Vec<f64>> {
    let plan = config.subchannel_plan()?;
    let noise = config.noise_spec()?;
    let shaped = apply_raised_cosine(&build_ideal_psd(&plan, &config.grid)?, EdgeShape::new(beta)?, &plan);
    let multiscale = MultiscaleConfig::new(method.family, config.edges.levels, method.combiner)?;
    let threshold = EdgeThreshold::new(config.edges.eta_fraction)?;
    let truth = plan.interior_boundaries();
    let penalty = config.penalty_width();
    let partition = ChannelPartition::Plan(&plan);
    run_trials(config.threads, config.trials, Convolver::<f64>::new, |engine, trial| {
        let noisy = add_noise(&shaped, &noise, trial_seed(config.master_seed, trial, method, beta))?;
        let response = multiscale.respond(engine, &noisy, Some(&partition))?;
        let edges = extract_edges(&response, &threshold);
        edge_rmse(truth, &edges.frequencies, penalty)
    })
}

pub fn run_rmse_beta(config: &ExperimentConfig) -> Result<RmseTable> {
    let mut rows = Vec::new();
    for &beta in &config.rmse.betas {
        for method in &config.rmse.methods {
            let samples = cell_samples(config, method, beta)?;
            let (mean_rmse, std_error) = mean_and_se(&samples);
            rows.push(RmseRow {
                beta,
                method: method.label().to_string(),
                family: method.family.name().to_string(),
                mean_rmse,
                std_error,
                trials: samples.len(),
            });
        }
    }
    Ok(RmseTable { rows })
}

pub fn write_rmse_csv<W: Write>(w: W, table: &RmseTable) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(RMSE_HEADER)?;
    for r in &table.rows {
        out.write_record([
            r.beta.to_string(),
            r.method.clone(),
            r.family.clone(),
            r.mean_rmse.to_string(),
            r.std_error.to_string(),
            r.trials.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_rmse_csv<R: Read>(r: R) -> Result<RmseTable> {
    let mut rdr = csv::Reader::from_reader(r);
    check_header(&mut rdr, &RMSE_HEADER)?;
    let rows = rdr
        .records()
        .enumerate()
        .map(|(i, rec)| {
            let rec = rec?;
            let line = i + 2;
            Ok(RmseRow {
                beta: parse_field(&rec[0], line)?,
                method: rec[1].to_string(),
                family: rec[2].to_string(),
                mean_rmse: parse_field(&rec[3], line)?,
                std_error: parse_field(&rec[4], line)?,
                trials: parse_field(&rec[5], line)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(RmseTable { rows })
}

pub fn rmse_chart(table: &RmseTable, config: &ExperimentConfig) -> LineChart {
    let series = config
        .rmse
        .methods
        .iter()
        .map(|m| Series {
            label: m.to_string(),
            points: table
                .rows
                .iter()
                .filter(|r| r.method == m.label() && r.family == m.family.name())
                .map(|r| (r.beta, r.mean_rmse))
                .collect(),
        })
        .collect();
    LineChart {
        title: format!("Edge RMSE vs roll-off ({} trials, {} dB)", config.trials, config.plan.snr_db),
        x_label: "roll-off factor".into(),
        y_label: "RMSE (MHz)".into(),
        series,
        ..Default::default()
    }
}

/// Writes `rmse_beta.csv` and `rmse_beta.svg` under `dir`.
pub fn write_rmse_beta(dir: &Path, table: &RmseTable, config: &ExperimentConfig) -> Result<()> {
    let mut buf = Vec::new();
    write_rmse_csv(&mut buf, table)?;
    fs::write(dir.join("rmse_beta.csv"), buf)?;
    fs::write(dir.join("rmse_beta.svg"), rmse_chart(table, config).render())?;
    Ok(())
}
