//! Experiment configuration: INI text with `[section]` headers and
//! `key = value` lines, layered as built-in defaults → config file →
//! `section.key=value` overrides. Every key must exist in the defaults, so
//! typos fail loudly instead of being ignored.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ini::Ini;

use crate::compressive::{BasisKind, MeasurementKind};
use crate::error::{Error, Result};
use crate::model::{FrequencyGrid, NoiseSpec, SubchannelPlan};
use crate::wavelet::{Combiner, KernelFamily};

const DEFAULTS: &str = "
[experiment]
name = rolloff
master_seed = 20170614
trials = 1000
threads = 0

[grid]
f_start_mhz = 1000
f_stop_mhz = 2000
n_points = 4096

[plan]
channels = 5
occupancy = 1,0,1,0,1
snr_db = 10
boundaries_mhz =

[shape]
beta = 0

[noise]
floor = 1
fluctuation_sigma = 0.01
impulse_count = 1
impulse_ratio = 2
impulse_positions_mhz =

[edges]
family = gaussian
levels = 2
combiner = wmp
eta_fraction = 0.2
occupancy_threshold =
psd_file =

[rmse]
betas = 0,0.1,0.2,0.3,0.4,0.5
methods = cwt:db1,wmp:db1,wms:db1,cwt:gaussian,wmp:gaussian,wms:gaussian
penalty_width_mhz =

[false_edge]
family = db1

[energy]
pfa = 0.1
n_fft = 64
samples_per_channel = 64
sample_rate_hz = 1e6

[roc]
trials = 100000
n_fft = 64
pfa_grid = 0.01,0.05,0.1
snr_db = -inf,0,5,10

[cs]
channels = 16
n_fft = 8
occupied = 4,12
snr_db = 20
ratio = 0.25
ratios = 0.125,0.25,0.5,1
basis = identity
measurement = gaussian
pfa = 0.1
trials = 200
profiles = sparse,dense
";

/// Impulse layout: four channels so that 1400 MHz falls inside idle channel 2.
const IMPULSE_OVERLAY: &str = "
[experiment]
name = impulse

[plan]
channels = 4
occupancy = 1,0,1,0

[noise]
impulse_ratio = 5
impulse_positions_mhz = 1400
";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Five-channel RMSE-vs-β scenario; also the default for the
    /// non-experiment subcommands.
    RollOff,
    /// Impulse at 1400 MHz inside an idle channel.
    Impulse,
}

/// Ordered `section → key → value` table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Settings {
    sections: Vec<(String, Vec<(String, String)>)>,
}

impl Settings {
    pub fn defaults(preset: Preset) -> Self {
        let mut s = Self::parse_table(DEFAULTS).expect("built-in defaults parse");
        if preset == Preset::Impulse {
            s.overlay_text(IMPULSE_OVERLAY, "built-in impulse overlay").expect("built-in overlay applies");
        }
        s
    }

    fn parse_table(text: &str) -> Result<Self> {
        let ini = Ini::load_from_str_noescape(text)
            .map_err(|e| Error::Config(format!("line {}: {}", e.line, e.msg)))?;
        let mut sections = Vec::new();
        for (name, props) in ini.iter() {
            let Some(name) = name else {
                if props.iter().next().is_some() {
                    return Err(Error::Config("keys must appear under a [section]".into()));
                }
                continue;
            };
            sections.push((
                name.to_string(),
                props.iter().map(|(k, v)| (k.to_string(), v.trim().to_string())).collect(),
            ));
        }
        Ok(Self { sections })
    }

    fn overlay_text(&mut self, text: &str, origin: &str) -> Result<()> {
        let patch = Self::parse_table(text).map_err(|e| Error::Config(format!("{origin}: {e}")))?;
        for (section, keys) in patch.sections {
            for (k, v) in keys {
                self.set(&section, &k, &v).map_err(|e| Error::Config(format!("{origin}: {e}")))?;
            }
        }
        Ok(())
    }

    /// Layer a config file over the current values.
    pub fn overlay_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        self.overlay_text(&text, &path.display().to_string())
    }

    /// Apply one `section.key=value` override.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (lhs, value) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override {assignment:?} is not section.key=value")))?;
        let (section, key) = lhs
            .trim()
            .split_once('.')
            .ok_or_else(|| Error::Config(format!("override key {lhs:?} is not section.key")))?;
        self.set(section, key, value.trim())
    }

    pub fn set(&mut self, section: &str, key: &str, value: &str) -> Result<()> {
        let keys = self
            .sections
            .iter_mut()
            .find(|(s, _)| s == section)
            .map(|(_, k)| k)
            .ok_or_else(|| Error::Config(format!("unknown section [{section}]")))?;
        let slot = keys
            .iter_mut()
            .find(|(k, _)| k == key)
            .ok_or_else(|| Error::Config(format!("unknown key {section}.{key}")))?;
        slot.1 = value.to_string();
        Ok(())
    }

    pub fn get(&self, section: &str, key: &str) -> &str {
        self.sections
            .iter()
            .find(|(s, _)| s == section)
            .and_then(|(_, keys)| keys.iter().find(|(k, _)| k == key))
            .map(|(_, v)| v.as_str())
            .unwrap_or_else(|| panic!("{section}.{key} missing from defaults"))
    }

    /// Text form written as `resolved.cfg`.
    pub fn to_ini_string(&self) -> String {
        let mut out = String::new();
        for (i, (section, keys)) in self.sections.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            let _ = writeln!(out, "[{section}]");
            for (k, v) in keys {
                if v.is_empty() {
                    let _ = writeln!(out, "{k} =");
                } else {
                    let _ = writeln!(out, "{k} = {v}");
                }
            }
        }
        out
    }

    fn parse<V: FromStr>(&self, section: &str, key: &str) -> Result<V>
    where
        V::Err: std::fmt::Display,
    {
        let raw = self.get(section, key);
        raw.parse()
            .map_err(|e| Error::Config(format!("{section}.{key} = {raw:?}: {e}")))
    }

    fn optional<V: FromStr>(&self, section: &str, key: &str) -> Result<Option<V>>
    where
        V::Err: std::fmt::Display,
    {
        if self.get(section, key).is_empty() {
            Ok(None)
        } else {
            self.parse(section, key).map(Some)
        }
    }

    fn list<V: FromStr>(&self, section: &str, key: &str) -> Result<Vec<V>>
    where
        V::Err: std::fmt::Display,
    {
        let raw = self.get(section, key);
        if raw.is_empty() {
            return Ok(Vec::new());
        }
        raw.split(',')
            .map(|item| {
                item.trim()
                    .parse()
                    .map_err(|e| Error::Config(format!("{section}.{key} item {item:?}: {e}")))
            })
            .collect()
    }

    fn flags(&self, section: &str, key: &str) -> Result<Vec<bool>> {
        self.list::<String>(section, key)?
            .into_iter()
            .map(|s| match s.as_str() {
                "1" | "true" => Ok(true),
                "0" | "false" => Ok(false),
                other => Err(Error::Config(format!("{section}.{key}: {other:?} is not 0/1"))),
            })
            .collect()
    }
}

/// Edge-detection method of the Monte-Carlo harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Method {
    pub combiner: Combiner,
    pub family: KernelFamily,
}

impl Method {
    /// CSV/legend name of the combiner: `cwt` for the single-scale derivative.
    pub fn label(&self) -> &'static str {
        match self.combiner {
            Combiner::Wmm => "cwt",
            other => other.name(),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.label(), self.family)
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (c, f) = s
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("method {s:?} is not combiner:family")))?;
        let combiner = match c.trim() {
            "cwt" => Combiner::Wmm,
            other => other.parse()?,
        };
        if combiner == Combiner::Cwt {
            return Err(Error::Config("method combiner must produce a derivative response".into()));
        }
        Ok(Self { combiner, family: f.parse()? })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsProfile {
    /// Only the configured channels are occupied.
    Sparse,
    /// Every channel is occupied.
    Dense,
}

impl CsProfile {
    pub fn name(self) -> &'static str {
        match self {
            CsProfile::Sparse => "sparse",
            CsProfile::Dense => "dense",
        }
    }
}

impl FromStr for CsProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "sparse" => Ok(CsProfile::Sparse),
            "dense" => Ok(CsProfile::Dense),
            other => Err(Error::Config(format!("unknown CS profile {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanSettings {
    pub channels: usize,
    pub occupancy: Vec<bool>,
    pub snr_db: f64,
    pub boundaries: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSettings {
    pub floor: f64,
    pub fluctuation_sigma: f64,
    pub impulse_count: usize,
    /// Impulse amplitude as a multiple of the occupied-band power.
    pub impulse_ratio: f64,
    pub impulse_positions: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSettings {
    pub family: KernelFamily,
    pub levels: usize,
    pub combiner: Combiner,
    pub eta_fraction: f64,
    pub occupancy_threshold: Option<f64>,
    pub psd_file: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RmseSettings {
    pub betas: Vec<f64>,
    pub methods: Vec<Method>,
    pub penalty_width: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergySettings {
    pub pfa: f64,
    pub n_fft: usize,
    pub samples_per_channel: usize,
    pub sample_rate_hz: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RocSettings {
    pub trials: usize,
    pub n_fft: usize,
    pub pfa_grid: Vec<f64>,
    /// `-inf` means noise only.
    pub snr_db: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsSettings {
    pub channels: usize,
    pub n_fft: usize,
    /// 1-based indices of the occupied channels in the sparse profile.
    pub occupied: Vec<usize>,
    pub snr_db: f64,
    pub ratio: f64,
    pub ratios: Vec<f64>,
    pub basis: BasisKind,
    pub measurement: MeasurementKind,
    pub pfa: f64,
    pub trials: usize,
    pub profiles: Vec<CsProfile>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub master_seed: u64,
    pub trials: usize,
    /// 0 lets the thread pool pick.
    pub threads: usize,
    pub grid: FrequencyGrid<f64>,
    pub plan: PlanSettings,
    pub beta: f64,
    pub noise: NoiseSettings,
    pub edges: EdgeSettings,
    pub rmse: RmseSettings,
    pub false_edge_family: KernelFamily,
    pub energy: EnergySettings,
    pub roc: RocSettings,
    pub cs: CsSettings,
    /// The fully resolved key/value table.
    pub settings: Settings,
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Config(msg()))
    }
}

fn check_prob(v: f64, what: &str) -> Result<()> {
    check(v > 0.0 && v < 1.0, || format!("{what} = {v} must lie in (0, 1)"))
}

impl ExperimentConfig {
    /// Defaults for `preset`, then the optional file, then the overrides.
    pub fn load(preset: Preset, file: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let mut s = Settings::defaults(preset);
        if let Some(path) = file {
            s.overlay_file(path)?;
        }
        for o in overrides {
            s.apply_override(o)?;
        }
        Self::from_settings(s)
    }

    pub fn from_settings(s: Settings) -> Result<Self> {
        let grid = FrequencyGrid::new(s.parse("grid", "f_start_mhz")?, s.parse("grid", "f_stop_mhz")?, s.parse("grid", "n_points")?)
            .map_err(|e| Error::Config(e.to_string()))?;

        let plan = PlanSettings {
            channels: s.parse("plan", "channels")?,
            occupancy: s.flags("plan", "occupancy")?,
            snr_db: s.parse("plan", "snr_db")?,
            boundaries: {
                let b: Vec<f64> = s.list("plan", "boundaries_mhz")?;
                if b.is_empty() { None } else { Some(b) }
            },
        };
        check(plan.snr_db.is_finite(), || "plan.snr_db must be finite".into())?;

        let noise = NoiseSettings {
            floor: s.parse("noise", "floor")?,
            fluctuation_sigma: s.parse("noise", "fluctuation_sigma")?,
            impulse_count: s.parse("noise", "impulse_count")?,
            impulse_ratio: s.parse("noise", "impulse_ratio")?,
            impulse_positions: {
                let p: Vec<f64> = s.list("noise", "impulse_positions_mhz")?;
                if p.is_empty() { None } else { Some(p) }
            },
        };
        check(noise.floor > 0.0 && noise.floor.is_finite(), || "noise.floor must be positive".into())?;
        check(noise.impulse_ratio >= 0.0, || "noise.impulse_ratio must be non-negative".into())?;

        let edges = EdgeSettings {
            family: s.parse("edges", "family")?,
            levels: s.parse("edges", "levels")?,
            combiner: s.parse("edges", "combiner")?,
            eta_fraction: s.parse("edges", "eta_fraction")?,
            occupancy_threshold: s.optional("edges", "occupancy_threshold")?,
            psd_file: s.optional::<String>("edges", "psd_file")?.map(PathBuf::from),
        };
        check((1..=crate::wavelet::multiscale::MAX_LEVELS).contains(&edges.levels), || {
            format!("edges.levels = {} outside 1..=8", edges.levels)
        })?;
        check_prob(edges.eta_fraction, "edges.eta_fraction")?;

        let rmse = RmseSettings {
            betas: s.list("rmse", "betas")?,
            methods: s.list("rmse", "methods")?,
            penalty_width: s.optional("rmse", "penalty_width_mhz")?,
        };
        check(!rmse.betas.is_empty(), || "rmse.betas is empty".into())?;
        check(rmse.betas.iter().all(|b| (0.0..=1.0).contains(b)), || "rmse.betas must lie in [0, 1]".into())?;
        check(!rmse.methods.is_empty(), || "rmse.methods is empty".into())?;

        let energy = EnergySettings {
            pfa: s.parse("energy", "pfa")?,
            n_fft: s.parse("energy", "n_fft")?,
            samples_per_channel: s.parse("energy", "samples_per_channel")?,
            sample_rate_hz: s.parse("energy", "sample_rate_hz")?,
        };
        check_prob(energy.pfa, "energy.pfa")?;

        let roc = RocSettings {
            trials: s.parse("roc", "trials")?,
            n_fft: s.parse("roc", "n_fft")?,
            pfa_grid: s.list("roc", "pfa_grid")?,
            snr_db: s.list("roc", "snr_db")?,
        };
        check(roc.trials >= 1, || "roc.trials must be at least 1".into())?;
        check(!roc.pfa_grid.is_empty() && !roc.snr_db.is_empty(), || "roc grids must be non-empty".into())?;
        for &p in &roc.pfa_grid {
            check_prob(p, "roc.pfa_grid entry")?;
        }
        check(roc.snr_db.iter().all(|v| !v.is_nan() && *v != f64::INFINITY), || "roc.snr_db entries must be finite or -inf".into())?;

        let cs = CsSettings {
            channels: s.parse("cs", "channels")?,
            n_fft: s.parse("cs", "n_fft")?,
            occupied: s.list("cs", "occupied")?,
            snr_db: s.parse("cs", "snr_db")?,
            ratio: s.parse("cs", "ratio")?,
            ratios: s.list("cs", "ratios")?,
            basis: s.parse("cs", "basis")?,
            measurement: s.parse("cs", "measurement")?,
            pfa: s.parse("cs", "pfa")?,
            trials: s.parse("cs", "trials")?,
            profiles: s.list("cs", "profiles")?,
        };
        check(cs.channels >= 1, || "cs.channels must be at least 1".into())?;
        check(cs.occupied.iter().all(|&k| (1..=cs.channels).contains(&k)), || "cs.occupied entries must lie in 1..=cs.channels".into())?;
        check(cs.snr_db.is_finite(), || "cs.snr_db must be finite".into())?;
        for &r in cs.ratios.iter().chain(std::iter::once(&cs.ratio)) {
            check(r > 0.0 && r <= 1.0, || format!("compression ratio {r} outside (0, 1]"))?;
        }
        check(!cs.ratios.is_empty() && !cs.profiles.is_empty(), || "cs.ratios and cs.profiles must be non-empty".into())?;
        check_prob(cs.pfa, "cs.pfa")?;
        check(cs.trials >= 1, || "cs.trials must be at least 1".into())?;

        let cfg = Self {
            name: s.get("experiment", "name").to_string(),
            master_seed: s.parse("experiment", "master_seed")?,
            trials: s.parse("experiment", "trials")?,
            threads: s.parse("experiment", "threads")?,
            grid,
            plan,
            beta: s.parse("shape", "beta")?,
            noise,
            edges,
            rmse,
            false_edge_family: s.parse("false_edge", "family")?,
            energy,
            roc,
            cs,
            settings: s,
        };
        check(cfg.trials >= 1, || "experiment.trials must be at least 1".into())?;
        check((0.0..=1.0).contains(&cfg.beta), || format!("shape.beta = {} outside [0, 1]", cfg.beta))?;
        // Surface plan/noise problems now rather than mid-run.
        cfg.subchannel_plan()?;
        cfg.noise_spec()?;
        crate::detectors::ThresholdPolicy::new(cfg.energy.pfa, cfg.noise.floor, cfg.energy.n_fft)
            .map_err(|e| Error::Config(e.to_string()))?;
        crate::detectors::ThresholdPolicy::new(cfg.cs.pfa, cfg.noise.floor, cfg.cs.n_fft)
            .map_err(|e| Error::Config(e.to_string()))?;
        check(cfg.energy.samples_per_channel >= cfg.energy.n_fft, || "energy.samples_per_channel < energy.n_fft".into())?;
        Ok(cfg)
    }

    /// Occupied-band PSD level `floor·10^(snr/10)`.
    pub fn band_power(&self) -> f64 {
        self.noise.floor * 10f64.powf(self.plan.snr_db / 10.0)
    }

    pub fn subchannel_plan(&self) -> Result<SubchannelPlan<f64>> {
        let p = &self.plan;
        check(p.occupancy.len() == p.channels, || {
            format!("plan.occupancy has {} entries for {} channels", p.occupancy.len(), p.channels)
        })?;
        let power: Vec<f64> = p.occupancy.iter().map(|&o| if o { self.band_power() } else { 0.0 }).collect();
        let plan = match &p.boundaries {
            Some(b) => SubchannelPlan::new(b.clone(), p.occupancy.clone(), power),
            None => SubchannelPlan::uniform(self.grid.f_start(), self.grid.f_stop(), p.channels, p.occupancy.clone(), power),
        }
        .map_err(|e| Error::Config(e.to_string()))?;
        plan.check_grid(&self.grid).map_err(|e| Error::Config(e.to_string()))?;
        Ok(plan)
    }

    pub fn noise_spec(&self) -> Result<NoiseSpec<f64>> {
        let n = &self.noise;
        let spec = NoiseSpec {
            awgn_floor: n.floor,
            fluctuation_sigma: n.fluctuation_sigma,
            impulse_count: n.impulse_positions.as_ref().map_or(n.impulse_count, Vec::len),
            impulse_amplitude: n.impulse_ratio * self.band_power(),
            impulse_positions: n.impulse_positions.clone(),
        };
        spec.validate(&self.grid).map_err(|e| Error::Config(e.to_string()))?;
        Ok(spec)
    }

    /// Mean of the floor and floor + band power unless configured.
    pub fn occupancy_threshold(&self) -> f64 {
        self.edges.occupancy_threshold.unwrap_or(self.noise.floor + self.band_power() / 2.0)
    }

    /// Defaults to one subchannel width.
    pub fn penalty_width(&self) -> f64 {
        self.rmse.penalty_width.unwrap_or(self.grid.span() / self.plan.channels as f64)
    }
}
