//! Seeded Monte-Carlo experiment runners, their CSV tables and SVG charts.
//!
//! Each runner splits into a pure `run_*` function returning an in-memory
//! table and a `write_*` function that emits files. Trials run on a rayon
//! pool but are aggregated in trial-index order, so results do not depend on
//! the thread count.

pub mod config;
pub mod cs;
pub mod false_edge;
pub mod rmse;
pub mod roc;
pub mod svg;

use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{add_noise, apply_raised_cosine, build_ideal_psd, EdgeShape, SubchannelPlan, WidebandPsd};
use crate::rng::{derive_seed, Label};

pub use config::{CsProfile, ExperimentConfig, Method, Preset, Settings};
pub use cs::{read_cs_csv, run_cs_tradeoff, write_cs_tradeoff, CsRow, CsTradeoff};
pub use false_edge::{run_false_edge_demo, write_false_edge, FalseEdgeDemo};
pub use rmse::{read_rmse_csv, run_rmse_beta, write_rmse_beta, RmseRow, RmseTable};
pub use roc::{read_roc_csv, run_roc, write_roc, RocRow};

/// Sample mean and its standard error `s/√n` (0 for a single sample).
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Evaluate `trial(state, i)` for `i in 0..n` on `threads` workers
/// (0 = rayon default). Output is in index order.
pub fn run_trials<S, R, I, F>(threads: usize, n: usize, init: I, trial: F) -> Result<Vec<R>>
where
    R: Send,
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, usize) -> Result<R> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    pool.install(|| (0..n).into_par_iter().map_init(&init, |s, i| trial(s, i)).collect())
}

/// Plan and noisy, roll-off shaped PSD of the configured scenario; the
/// noise draw is seeded by `(master_seed, stream)`.
pub fn scenario_psd(config: &ExperimentConfig, stream: &str) -> Result<(SubchannelPlan<f64>, WidebandPsd<f64>)> {
    let plan = config.subchannel_plan()?;
    let ideal = build_ideal_psd(&plan, &config.grid)?;
    let shaped = apply_raised_cosine(&ideal, EdgeShape::new(config.beta)?, &plan);
    let psd = add_noise(&shaped, &config.noise_spec()?, derive_seed(config.master_seed, &[Label::from(stream)]))?;
    Ok((plan, psd))
}

/// Create `dir` and write `resolved.cfg` into it.
pub fn prepare_output(dir: &Path, config: &ExperimentConfig) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("resolved.cfg"), config.settings.to_ini_string())?;
    Ok(())
}

pub fn csv_writer<W: std::io::Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

pub(crate) fn check_header(rdr: &mut csv::Reader<impl std::io::Read>, expected: &[&str]) -> Result<()> {
    if rdr.headers()?.iter().ne(expected.iter().copied()) {
        return Err(Error::Parse { line: 1, message: format!("expected header {}", expected.join(",")) });
    }
    Ok(())
}

pub(crate) fn parse_field<V: std::str::FromStr>(s: &str, line: usize) -> Result<V>
where
    V::Err: std::fmt::Display,
{
    s.parse().map_err(|e: V::Err| Error::Parse { line, message: format!("{s:?}: {e}") })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_and_standard_error() {
        let (m, se) = mean_and_se(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        // s² = 5/3
        assert!((se - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_and_se(&[7.0]), (7.0, 0.0));
    }

    #[test]
    fn trial_order_is_independent_of_threads() {
        let f = |_: &mut (), i: usize| Ok(crate::rng::derive_seed(3, &[i.into()]));
        let one = run_trials(1, 500, || (), f).unwrap();
        let many = run_trials(4, 500, || (), f).unwrap();
        assert_eq!(one, many);
    }
}
