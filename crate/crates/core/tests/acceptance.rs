//! One PASS/FAIL line per acceptance criterion. Run with `--nocapture` to
//! see the report; the test fails if any criterion fails.

mod common;

use std::time::Instant;

use common::*;
use num_complex::Complex;
use rand::Rng;
use wbsense::compressive::{
    cs_sense_pipeline, make_basis, measure, reconstruct_omp, BasisKind, CsSenseConfig, MeasurementKind,
    MeasurementMatrix, StopRule,
};
use wbsense::detectors::{channelize, multiband_decide, ThresholdPolicy};
use wbsense::harness::false_edge::FalseEdgeDemo;
use wbsense::harness::{
    run_cs_tradeoff, run_false_edge_demo, run_rmse_beta, run_roc, rmse::write_rmse_csv, roc::write_roc_csv,
    cs::write_cs_csv, CsProfile, ExperimentConfig, Preset,
};
use wbsense::model::{
    add_noise, build_ideal_psd, synthesize_time_series, FrequencyGrid, NoiseSpec, SubchannelPlan, TimeSeriesSpec,
    WidebandPsd,
};
use wbsense::wavelet::{
    edge_rmse, extract_edges, kernel_samples, wmp, wmp_normalized, wms, ChannelPartition, Combiner, Convolver,
    EdgeThreshold, KernelFamily, MultiscaleConfig,
};

struct Report {
    failed: Vec<&'static str>,
}

impl Report {
    fn line(&mut self, name: &'static str, pass: bool, detail: String) {
        println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
        if !pass {
            self.failed.push(name);
        }
    }
}

fn cfg(preset: Preset, overrides: &[String]) -> ExperimentConfig {
    ExperimentConfig::load(preset, None, overrides).unwrap()
}

fn rmse_trends(r: &mut Report) {
    let start = Instant::now();
    let mut ok = true;
    let mut detail = Vec::new();
    for snr in [5.0, 10.0, 15.0] {
        let c = cfg(Preset::RollOff, &[format!("plan.snr_db={snr}"), "experiment.trials=1000".into()]);
        let t = run_rmse_beta(&c).unwrap();
        let cell = |beta: f64, m: &str, f: &str| t.get(beta, m, f).unwrap();
        let pooled = |a: &wbsense::harness::RmseRow, b: &wbsense::harness::RmseRow| {
            (a.std_error.powi(2) + b.std_error.powi(2)).sqrt()
        };
        // (a) for both kernel families
        for fam in ["db1", "gaussian"] {
            let (lo, hi) = (cell(0.0, "cwt", fam), cell(0.5, "cwt", fam));
            let z = (hi.mean_rmse - lo.mean_rmse) / pooled(lo, hi);
            ok &= z >= 3.0;
            detail.push(format!("{snr}dB cwt:{fam} {:.3}->{:.3} ({z:.1} SE)", lo.mean_rmse, hi.mean_rmse));
        }
        // (b)
        for beta in [0.2, 0.3] {
            let (p, s) = (cell(beta, "wmp", "db1"), cell(beta, "wms", "db1"));
            ok &= p.mean_rmse < s.mean_rmse;
            detail.push(format!("{snr}dB b={beta} wmp {:.1} < wms {:.1}", p.mean_rmse, s.mean_rmse));
        }
        // (c)
        let (g, d) = (cell(0.3, "wms", "gaussian"), cell(0.3, "wms", "db1"));
        ok &= g.mean_rmse < d.mean_rmse;
        detail.push(format!("{snr}dB wms gauss {:.2} < db1 {:.1}", g.mean_rmse, d.mean_rmse));
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= secs < 300.0;
    r.line("rmse-vs-rolloff", ok, format!("{}; {secs:.0}s for 3 SNRs", detail.join("; ")));
}

fn false_edge(r: &mut Report) {
    let c = cfg(Preset::Impulse, &[]);
    let demo = run_false_edge_demo(&c).unwrap();
    let again = run_false_edge_demo(&c).unwrap();
    let imp = demo.impulse_bins[0];
    let cwt_hit = FalseEdgeDemo::has_edge_near(&demo.cwt, imp, 2);
    let nearest_cwt = demo.cwt.bins.iter().map(|&b| b.abs_diff(imp)).min().unwrap_or(usize::MAX);
    let wmp_clear = !FalseEdgeDemo::has_edge_near(&demo.wmp_normalized, imp, 2);
    let wmp_truth = demo.keeps_true_edges(&demo.wmp_normalized, 2);
    let deterministic = demo == again;
    r.line(
        "false-edge",
        cwt_hit && wmp_clear && wmp_truth && deterministic,
        format!(
            "impulse bin {imp}; cwt edge within 2 bins: {cwt_hit} (nearest {nearest_cwt} bins); \
             normalized wmp excludes impulse: {wmp_clear}; keeps true edges: {wmp_truth}; deterministic: {deterministic}"
        ),
    );
}

fn energy_calibration(r: &mut Report) {
    let c = cfg(
        Preset::RollOff,
        &["roc.trials=100000".into(), "roc.n_fft=64".into(), "roc.snr_db=-inf,10".into(), "roc.pfa_grid=0.01,0.05,0.1".into()],
    );
    let rows = run_roc(&c).unwrap();
    let worst = rows.iter().map(|r| (r.empirical_pfa - r.target_pfa).abs()).fold(0.0f64, f64::max);
    let pd = rows.iter().find(|r| r.snr_db == 10.0 && r.target_pfa == 0.1).unwrap();
    r.line(
        "energy-calibration",
        worst <= 0.01 && pd.empirical_pd > 0.99,
        format!("max |pfa - target| = {worst:.4} at 1e5 trials; pd(10 dB, 0.1) = {:.4} ± {:.4}", pd.empirical_pd, pd.pd_std_error),
    );
}

fn oracle_equivalences(r: &mut Report) {
    let mut g = rng(77);
    let mut engine = Convolver::new();
    let mut conv_err = 0.0f64;
    for case in 0..120 {
        let n = g.random_range(64..1200);
        let grid = FrequencyGrid::new(0.0, 500.0, n).unwrap();
        let psd = WidebandPsd::new(grid, (0..n).map(|_| g.random_range(0.0..10.0)).collect()).unwrap();
        let fam = if case % 2 == 0 { KernelFamily::Gaussian } else { KernelFamily::Db1 };
        let k = kernel_samples(fam, 1 << g.random_range(1..=4), &grid).unwrap();
        let fast = engine.smooth(&psd, &k).unwrap();
        conv_err = conv_err.max(max_rel_diff(&fast.values, &direct_convolve(psd.values(), k.samples(), grid.spacing())));
    }

    let mut dft_err = 0.0f64;
    for n in [8, 64, 512] {
        let x: Vec<Vec<Complex<f64>>> =
            (0..4).map(|_| (0..n).map(|_| Complex::new(g.random_range(-1.0..1.0), g.random_range(-1.0..1.0))).collect()).collect();
        for (s, ch) in channelize(&x, n).unwrap().iter().zip(&x) {
            let want = direct_dft(ch);
            let scale = want.iter().fold(0.0f64, |m, z| m.max(z.norm()));
            dft_err = dft_err.max(s.bins.iter().zip(&want).fold(0.0f64, |m, (a, b)| m.max((a - b).norm())) / scale);
        }
    }

    let basis = make_basis::<f64>(OMP_L, BasisKind::Identity).unwrap();
    let agree = (0..100)
        .filter(|&seed| {
            let inst = sparse_instance(seed);
            let theta = MeasurementMatrix::from_rows(OMP_M, OMP_L, inst.theta_rows.clone()).unwrap();
            let y = measure(&theta, &inst.x).unwrap();
            let mut s = reconstruct_omp(&y, &theta, &basis, StopRule::KnownSparsity(2)).unwrap().support;
            s.sort_unstable();
            s == best_pair(&inst.theta_cols, OMP_M, &y)
        })
        .count();
    r.line(
        "oracle-equivalences",
        conv_err <= 1e-9 && dft_err <= 1e-9 && agree >= 95,
        format!("fft vs direct convolution {conv_err:.1e} over 120 PSDs; channelize vs DFT {dft_err:.1e}; omp = exhaustive l0 on {agree}/100"),
    );
}

fn noiseless_exactness(r: &mut Report) {
    let grid = FrequencyGrid::new(1000.0, 2000.0, 4096).unwrap();
    let plan = SubchannelPlan::uniform(1000.0, 2000.0, 5, vec![true, false, true, false, true], vec![10.0, 0.0, 10.0, 0.0, 10.0]).unwrap();
    let psd = build_ideal_psd(&plan, &grid).unwrap();
    let df = grid.spacing();
    let mut ok = true;
    let mut detail = Vec::new();
    for combiner in [Combiner::Wmm, Combiner::Wmp, Combiner::Wms] {
        let resp = MultiscaleConfig::new(KernelFamily::Gaussian, 2, combiner).unwrap().respond(&mut Convolver::new(), &psd, None).unwrap();
        let est = extract_edges(&resp, &EdgeThreshold::default());
        let worst = plan
            .interior_boundaries()
            .iter()
            .map(|&b| {
                let tb = grid.nearest_bin(b).unwrap();
                est.bins.iter().map(|&e| e.abs_diff(tb)).min().unwrap_or(usize::MAX)
            })
            .max()
            .unwrap();
        let rmse = edge_rmse(plan.interior_boundaries(), &est.frequencies, 200.0).unwrap();
        ok &= worst <= 1 && rmse <= df * (1.0 + 1e-9);
        detail.push(format!("{combiner}: {worst} bin(s), rmse {:.3} df", rmse / df));
    }
    r.line("noiseless-exactness", ok, format!("gaussian kernel, J=2: {}", detail.join("; ")));
}

fn scale_invariance(r: &mut Report) {
    let mut g = rng(5);
    let grid = FrequencyGrid::new(0.0, 100.0, 1024).unwrap();
    let th = EdgeThreshold::default();
    let mut ok = true;
    let mut worst = 0.0f64;
    let cases = 60;
    for case in 0..cases {
        let k = g.random_range(3..7);
        let powers: Vec<f64> = (0..k).map(|_| if g.random_bool(0.5) { g.random_range(1.0..30.0) } else { 0.0 }).collect();
        let plan = SubchannelPlan::uniform(0.0, 100.0, k, powers.iter().map(|&p| p > 0.0).collect(), powers).unwrap();
        let noise = NoiseSpec { awgn_floor: 1.0, fluctuation_sigma: 0.05, impulse_count: 1, impulse_amplitude: 5.0, impulse_positions: None };
        let psd = add_noise(&build_ideal_psd(&plan, &grid).unwrap(), &noise, case).unwrap();
        let c = 10f64.powf(g.random_range(-3.0..3.0));
        let levels = g.random_range(1..=3);
        let fam = if case % 2 == 0 { KernelFamily::Gaussian } else { KernelFamily::Db1 };
        let scaled = psd.scaled(c).unwrap();

        let p = wmp(&psd, fam, levels).unwrap();
        let want: Vec<f64> = p.values.iter().map(|v| v * c.powi(levels as i32)).collect();
        worst = worst.max(max_rel_diff(&wmp(&scaled, fam, levels).unwrap().values, &want));
        let s = wms(&psd, fam, levels).unwrap();
        let want: Vec<f64> = s.values.iter().map(|v| v * c).collect();
        worst = worst.max(max_rel_diff(&wms(&scaled, fam, levels).unwrap().values, &want));

        let part = ChannelPartition::Plan(&plan);
        let n = wmp_normalized(&psd, fam, levels, &part).unwrap();
        let nc = wmp_normalized(&scaled, fam, levels, &part).unwrap();
        let argmax = |v: &[f64]| {
            let peak = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            (0..v.len()).filter(|&i| v[i].abs() == peak).collect::<Vec<_>>()
        };
        ok &= argmax(&n.values) == argmax(&nc.values);
        ok &= extract_edges(&n, &th).bins == extract_edges(&nc, &th).bins;
    }
    ok &= worst <= 1e-9;
    r.line(
        "scale-invariance",
        ok,
        format!("{cases} random PSDs, c in [1e-3, 1e3]: argmax set and edges unchanged: {ok}; worst P_J/S_J scaling error {worst:.1e}"),
    );
}

fn cs_tradeoff(r: &mut Report) {
    let c = cfg(Preset::RollOff, &["cs.ratios=0.25".into(), "cs.trials=200".into()]);
    let res = run_cs_tradeoff(&c).unwrap();
    let sparse = res.get(CsProfile::Sparse, 0.25).unwrap();
    let dense = res.get(CsProfile::Dense, 0.25).unwrap();
    let ratio = dense.mean_rel_error / sparse.mean_rel_error;

    let policy = ThresholdPolicy::new(0.1, 1.0, 8).unwrap();
    let lossless = CsSenseConfig::new(1.0, BasisKind::Identity, MeasurementKind::Identity, policy).unwrap();
    let occ: Vec<bool> = (0..16).map(|k| k == 3 || k == 11).collect();
    let plan = SubchannelPlan::uniform(0.0, 16.0, 16, occ.clone(), occ.iter().map(|&o| if o { 100.0 } else { 0.0 }).collect()).unwrap();
    let exact = (0..200u64).all(|seed| {
        let x = synthesize_time_series(&plan, &NoiseSpec::floor(1.0), &TimeSeriesSpec::new(8, 1e6, seed).unwrap());
        cs_sense_pipeline(&x, &lossless, seed).unwrap().decisions == multiband_decide(&x, &policy).unwrap()
    });
    r.line(
        "cs-sparsity-tradeoff",
        ratio >= 2.0 && exact,
        format!(
            "M/L=0.25: dense {:.4} ± {:.4} vs sparse {:.4} ± {:.4} (x{ratio:.2}); lossless decisions identical on 200 seeds: {exact}",
            dense.mean_rel_error, dense.rel_error_std_error, sparse.mean_rel_error, sparse.rel_error_std_error
        ),
    );
}

fn determinism(r: &mut Report) {
    let csvs = |threads: usize| {
        let c = cfg(
            Preset::RollOff,
            &[
                format!("experiment.threads={threads}"),
                "experiment.trials=50".into(),
                "cs.trials=50".into(),
                "roc.trials=2000".into(),
            ],
        );
        let mut rmse = Vec::new();
        write_rmse_csv(&mut rmse, &run_rmse_beta(&c).unwrap()).unwrap();
        let mut roc = Vec::new();
        write_roc_csv(&mut roc, &run_roc(&c).unwrap()).unwrap();
        let mut cs = Vec::new();
        write_cs_csv(&mut cs, &run_cs_tradeoff(&c).unwrap().rows).unwrap();
        (rmse, roc, cs)
    };
    let a = csvs(1);
    let b = csvs(1);
    let p = csvs(4);
    r.line("determinism", a == b && a == p, format!("rerun identical: {}; 1 vs 4 threads identical: {}", a == b, a == p));
}

#[test]
fn acceptance() {
    let mut r = Report { failed: Vec::new() };
    rmse_trends(&mut r);
    false_edge(&mut r);
    energy_calibration(&mut r);
    oracle_equivalences(&mut r);
    noiseless_exactness(&mut r);
    scale_invariance(&mut r);
    cs_tradeoff(&mut r);
    determinism(&mut r);
    assert!(r.failed.is_empty(), "failed criteria: {:?}", r.failed);
}
