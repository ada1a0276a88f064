//! Impulse-in-an-idle-channel demonstration: the single-scale derivative
//! reports an edge at the impulse, the energy-normalized product does not.

use std::fs;
use std::io::BufWriter;
use std::path::Path;

use crate::error::Result;
use crate::harness::config::ExperimentConfig;
use crate::harness::svg::{LineChart, Marker, Series};
use crate::model::io::{write_plan, write_psd};
use crate::harness::scenario_psd;
use crate::model::{SubchannelPlan, WidebandPsd};
use crate::wavelet::edges::write_edges_csv;
use crate::wavelet::{extract_edges, ChannelPartition, Combiner, Convolver, EdgeEstimate, EdgeThreshold, MultiscaleConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct FalseEdgeDemo {
    pub plan: SubchannelPlan<f64>,
    pub psd: WidebandPsd<f64>,
    /// Single-scale derivative at the coarsest scale.
    pub cwt: EdgeEstimate<f64>,
    pub wmp_normalized: EdgeEstimate<f64>,
    /// Grid bins of the configured impulses.
    pub impulse_bins: Vec<usize>,
}

impl FalseEdgeDemo {
    /// True when some edge in `estimate` lies within `tol` bins of `bin`.
    pub fn has_edge_near(estimate: &EdgeEstimate<f64>, bin: usize, tol: usize) -> bool {
        estimate.bins.iter().any(|&b| b.abs_diff(bin) <= tol)
    }

    /// Every true interior boundary has an edge in `estimate` within `tol` bins.
    pub fn keeps_true_edges(&self, estimate: &EdgeEstimate<f64>, tol: usize) -> bool {
        let grid = self.psd.grid();
        self.plan
            .interior_boundaries()
            .iter()
            .all(|&f| grid.nearest_bin(f).is_some_and(|b| Self::has_edge_near(estimate, b, tol)))
    }
}

pub fn run_false_edge_demo(config: &ExperimentConfig) -> Result<FalseEdgeDemo> {
    let (plan, psd) = scenario_psd(config, "false-edge")?;
    let noise = config.noise_spec()?;

    let threshold = EdgeThreshold::new(config.edges.eta_fraction)?;
    let family = config.false_edge_family;
    let levels = config.edges.levels;
    let mut engine = Convolver::new();
    let cwt = MultiscaleConfig::new(family, levels, Combiner::Wmm)?.respond(&mut engine, &psd, None)?;
    let partition = ChannelPartition::Plan(&plan);
    let wmp = MultiscaleConfig::new(family, levels, Combiner::WmpNormalized)?.respond(&mut engine, &psd, Some(&partition))?;

    let impulse_bins = noise
        .impulse_positions
        .iter()
        .flatten()
        .filter_map(|&f| config.grid.nearest_bin(f))
        .collect();
    Ok(FalseEdgeDemo {
        cwt: extract_edges(&cwt, &threshold),
        wmp_normalized: extract_edges(&wmp, &threshold),
        plan,
        psd,
        impulse_bins,
    })
}

pub fn false_edge_chart(demo: &FalseEdgeDemo) -> LineChart {
    let grid = demo.psd.grid();
    let mut markers = Vec::new();
    let mut add = |xs: &[f64], color: &'static str, dashed: bool| {
        markers.extend(xs.iter().map(|&x| Marker { x, color, dashed }));
    };
    add(demo.plan.interior_boundaries(), "#7f7f7f", true);
    add(&demo.cwt.frequencies, "#d62728", false);
    add(&demo.wmp_normalized.frequencies, "#2ca02c", true);
    LineChart {
        title: "Noisy PSD with detected edges".into(),
        x_label: "frequency (MHz)".into(),
        y_label: "PSD".into(),
        series: vec![Series {
            label: "PSD".into(),
            points: grid.frequencies().zip(demo.psd.values().iter().copied()).collect(),
        }],
        markers,
        marker_legend: vec![
            ("true boundary".into(), "#7f7f7f", true),
            ("CWT edge".into(), "#d62728", false),
            ("normalized WMP edge".into(), "#2ca02c", true),
        ],
    }
}

/// Writes `psd.txt`, `plan.txt`, `edges_cwt.csv`, `edges_wmp_norm.csv` and
/// `false_edge.svg` under `dir`.
pub fn write_false_edge(dir: &Path, demo: &FalseEdgeDemo) -> Result<()> {
    write_psd(BufWriter::new(fs::File::create(dir.join("psd.txt"))?), &demo.psd)?;
    write_plan(BufWriter::new(fs::File::create(dir.join("plan.txt"))?), &demo.plan)?;
    write_edges_csv(fs::File::create(dir.join("edges_cwt.csv"))?, &demo.cwt)?;
    write_edges_csv(fs::File::create(dir.join("edges_wmp_norm.csv"))?, &demo.wmp_normalized)?;
    fs::write(dir.join("false_edge.svg"), false_edge_chart(demo).render())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::Preset;

    #[test]
    fn no_impulse_leaves_only_true_edges() {
        let cfg = ExperimentConfig::load(
            Preset::Impulse,
            None,
            &["noise.impulse_ratio=0".into(), "noise.fluctuation_sigma=0".into(), "false_edge.family=gaussian".into()],
        )
        .unwrap();
        let demo = run_false_edge_demo(&cfg).unwrap();
        let truth: Vec<usize> = demo.plan.interior_boundaries().iter().map(|&f| cfg.grid.nearest_bin(f).unwrap()).collect();
        for est in [&demo.cwt, &demo.wmp_normalized] {
            assert_eq!(est.len(), truth.len(), "{:?}", est.frequencies);
            for (&b, &t) in est.bins.iter().zip(&truth) {
                assert!(b.abs_diff(t) <= 1, "{b} vs {t}");
            }
        }
    }

    #[test]
    fn deterministic_and_writes_files() {
        let cfg = ExperimentConfig::load(Preset::Impulse, None, &[]).unwrap();
        let a = run_false_edge_demo(&cfg).unwrap();
        assert_eq!(a, run_false_edge_demo(&cfg).unwrap());
        let dir = tempfile::tempdir().unwrap();
        write_false_edge(dir.path(), &a).unwrap();
        for f in ["psd.txt", "plan.txt", "edges_cwt.csv", "edges_wmp_norm.csv", "false_edge.svg"] {
            assert!(dir.path().join(f).is_file(), "{f}");
        }
        let back = crate::wavelet::edges::read_edges_csv(fs::File::open(dir.path().join("edges_cwt.csv")).unwrap()).unwrap();
        assert_eq!(back.iter().map(|e| e.0).collect::<Vec<_>>(), a.cwt.frequencies);
    }
}
