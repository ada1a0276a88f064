use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use wbsense::compressive::{cs_sense_pipeline, write_diagnostics_csv, CsSenseConfig, DiagnosticsRow};
use wbsense::detectors::{multiband_decide, write_decisions_csv, ThresholdPolicy};
use wbsense::harness::config::{ExperimentConfig, Preset};
use wbsense::harness::cs::occupancy;
use wbsense::harness::{self, CsProfile};
use wbsense::model::io::{read_psd, write_plan, write_psd};
use wbsense::model::{synthesize_time_series, NoiseSpec, SubchannelPlan, TimeSeriesSpec};
use wbsense::rng::{derive_seed, Label};
use wbsense::wavelet::edges::write_edges_csv;
use wbsense::wavelet::{edges_to_plan, extract_edges, ChannelPartition, Convolver, EdgeThreshold, MultiscaleConfig};
use wbsense::{Error, Result};

/// Multiband spectrum sensing: synthetic PSDs, energy and wavelet edge
/// detection, compressive sensing and the Monte-Carlo experiments.
#[derive(Debug, Parser)]
#[command(name = "wbsense", version, propagate_version = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// INI config file layered over the built-in defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override one key, e.g. `--set plan.snr_db=15`. Repeatable.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE", global = true)]
    overrides: Vec<String>,
    /// Output directory.
    #[arg(long, default_value = "results", global = true)]
    out: PathBuf,
    /// Replaces experiment.master_seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a noisy PSD of the configured scenario and its plan.
    Generate {
        #[command(flatten)]
        common: Common,
    },
    /// Run a detector.
    Detect {
        #[command(subcommand)]
        which: Detect,
    },
    /// Compressive sensing.
    Cs {
        #[command(subcommand)]
        which: Cs,
    },
    /// Monte-Carlo experiments.
    Experiment {
        #[command(subcommand)]
        which: Experiment,
    },
}

#[derive(Debug, Subcommand)]
enum Detect {
    /// Per-channel energy decisions on synthesized baseband samples.
    Energy {
        #[command(flatten)]
        common: Common,
    },
    /// Wavelet edges of a PSD (edges.psd_file, or a generated one).
    Edges {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Subcommand)]
enum Cs {
    /// One measurement/recovery/decision pass at cs.ratio.
    Recover {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Subcommand)]
enum Experiment {
    /// Edge RMSE against roll-off for every configured method.
    RmseBeta {
        #[command(flatten)]
        common: Common,
    },
    /// Impulse in an idle channel: CWT vs normalized WMP edges.
    FalseEdge {
        #[command(flatten)]
        common: Common,
    },
    /// Energy-detector operating points.
    Roc {
        #[command(flatten)]
        common: Common,
    },
    /// Reconstruction error against compression ratio.
    CsTradeoff {
        #[command(flatten)]
        common: Common,
    },
}

/// Results are computed in full before anything is written.
type Emit = Box<dyn FnOnce(&Path) -> Result<()>>;

fn load(common: &Common, preset: Preset) -> Result<ExperimentConfig> {
    let mut overrides = common.overrides.clone();
    if let Some(seed) = common.seed {
        overrides.push(format!("experiment.master_seed={seed}"));
    }
    ExperimentConfig::load(preset, common.config.as_deref(), &overrides)
}

fn generate(cfg: &ExperimentConfig) -> Result<Emit> {
    let (plan, psd) = harness::scenario_psd(cfg, "generate")?;
    Ok(Box::new(move |dir| {
        write_psd(fs::File::create(dir.join("psd.txt"))?, &psd)?;
        write_plan(fs::File::create(dir.join("plan.txt"))?, &plan)
    }))
}

fn detect_energy(cfg: &ExperimentConfig) -> Result<Emit> {
    let plan = cfg.subchannel_plan()?;
    let spec = TimeSeriesSpec::new(
        cfg.energy.samples_per_channel,
        cfg.energy.sample_rate_hz,
        derive_seed(cfg.master_seed, &[Label::from("detect-energy")]),
    )?;
    let samples = synthesize_time_series(&plan, &NoiseSpec::floor(cfg.noise.floor), &spec);
    let policy = ThresholdPolicy::new(cfg.energy.pfa, cfg.noise.floor, cfg.energy.n_fft)?;
    let decisions = multiband_decide(&samples, &policy)?;
    Ok(Box::new(move |dir| {
        write_decisions_csv(fs::File::create(dir.join("decisions.csv"))?, &decisions)?;
        write_plan(fs::File::create(dir.join("plan.txt"))?, &plan)
    }))
}

fn detect_edges(cfg: &ExperimentConfig) -> Result<Emit> {
    let (psd, plan) = match &cfg.edges.psd_file {
        Some(path) => {
            let file = fs::File::open(path)
                .map_err(|e| Error::Config(format!("cannot read PSD {}: {e}", path.display())))?;
            (read_psd::<f64, _>(BufReader::new(file))?, None)
        }
        None => {
            let (plan, psd) = harness::scenario_psd(cfg, "generate")?;
            (psd, Some(plan))
        }
    };
    let partition = match &plan {
        Some(p) => ChannelPartition::Plan(p),
        None => ChannelPartition::Uniform(cfg.plan.channels),
    };
    let ms = MultiscaleConfig::new(cfg.edges.family, cfg.edges.levels, cfg.edges.combiner)?;
    let response = ms.respond(&mut Convolver::new(), &psd, Some(&partition))?;
    let edges = extract_edges(&response, &EdgeThreshold::new(cfg.edges.eta_fraction)?);
    let detected = edges_to_plan(&edges, psd.grid(), &psd, cfg.occupancy_threshold())?;
    Ok(Box::new(move |dir| {
        write_edges_csv(fs::File::create(dir.join("edges.csv"))?, &edges)?;
        write_plan(fs::File::create(dir.join("detected_plan.txt"))?, &detected)
    }))
}

fn cs_recover(cfg: &ExperimentConfig) -> Result<Emit> {
    let cs = &cfg.cs;
    let occ = occupancy(cfg, CsProfile::Sparse);
    let power = cfg.noise.floor * 10f64.powf(cs.snr_db / 10.0);
    let plan = SubchannelPlan::uniform(
        0.0,
        cs.channels as f64,
        cs.channels,
        occ.clone(),
        occ.iter().map(|&o| if o { power } else { 0.0 }).collect(),
    )?;
    let seed = derive_seed(cfg.master_seed, &[Label::from("cs-recover")]);
    let spec = TimeSeriesSpec::new(cs.n_fft, cfg.energy.sample_rate_hz, seed)?;
    let samples = synthesize_time_series(&plan, &NoiseSpec::floor(cfg.noise.floor), &spec);
    let policy = ThresholdPolicy::new(cs.pfa, cfg.noise.floor, cs.n_fft)?;
    let sense = CsSenseConfig::new(cs.ratio, cs.basis, cs.measurement, policy)?;
    let out = cs_sense_pipeline(&samples, &sense, seed)?;
    Ok(Box::new(move |dir| {
        write_decisions_csv(fs::File::create(dir.join("decisions.csv"))?, &out.decisions)?;
        write_diagnostics_csv(fs::File::create(dir.join("cs_diagnostics.csv"))?, &[DiagnosticsRow::new(0, &out.diagnostics)])?;
        let mut w = harness::csv_writer(fs::File::create(dir.join("spectrum.csv"))?);
        w.write_record(["index", "measured", "reconstructed"])?;
        for (i, (a, b)) in out.spectrum.iter().zip(&out.reconstruction).enumerate() {
            w.write_record([i.to_string(), a.to_string(), b.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }))
}

fn dispatch(command: Command) -> Result<(PathBuf, ExperimentConfig, Emit)> {
    let (common, preset, run): (Common, Preset, fn(&ExperimentConfig) -> Result<Emit>) = match command {
        Command::Generate { common } => (common, Preset::RollOff, generate),
        Command::Detect { which: Detect::Energy { common } } => (common, Preset::RollOff, detect_energy),
        Command::Detect { which: Detect::Edges { common } } => (common, Preset::RollOff, detect_edges),
        Command::Cs { which: Cs::Recover { common } } => (common, Preset::RollOff, cs_recover),
        Command::Experiment { which } => match which {
            Experiment::RmseBeta { common } => (common, Preset::RollOff, |cfg| {
                let table = harness::run_rmse_beta(cfg)?;
                let cfg = cfg.clone();
                Ok(Box::new(move |dir| harness::write_rmse_beta(dir, &table, &cfg)))
            }),
            Experiment::FalseEdge { common } => (common, Preset::Impulse, |cfg| {
                let demo = harness::run_false_edge_demo(cfg)?;
                Ok(Box::new(move |dir| harness::write_false_edge(dir, &demo)))
            }),
            Experiment::Roc { common } => (common, Preset::RollOff, |cfg| {
                let rows = harness::run_roc(cfg)?;
                let cfg = cfg.clone();
                Ok(Box::new(move |dir| harness::write_roc(dir, &rows, &cfg)))
            }),
            Experiment::CsTradeoff { common } => (common, Preset::RollOff, |cfg| {
                let result = harness::run_cs_tradeoff(cfg)?;
                Ok(Box::new(move |dir| harness::write_cs_tradeoff(dir, &result)))
            }),
        },
    };
    let cfg = load(&common, preset)?;
    let emit = run(&cfg)?;
    Ok((common.out, cfg, emit))
}

fn exit_code(e: &Error) -> ExitCode {
    ExitCode::from(if e.is_config() { 1 } else { 2 })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let (out, cfg, emit) = match dispatch(cli.command) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("wbsense: {e}");
            return exit_code(&e);
        }
    };
    if let Err(e) = harness::prepare_output(&out, &cfg).and_then(|()| emit(&out)) {
        eprintln!("wbsense: {e}");
        return ExitCode::from(2);
    }
    ExitCode::SUCCESS
}
