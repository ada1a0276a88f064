use wbsense::harness::cs::read_cs_csv;
use wbsense::harness::false_edge::FalseEdgeDemo;
use wbsense::harness::{
    prepare_output, read_rmse_csv, run_cs_tradeoff, run_false_edge_demo, run_rmse_beta, write_cs_tradeoff,
    write_rmse_beta, CsProfile, ExperimentConfig, Preset,
};

fn cfg(preset: Preset, overrides: &[&str]) -> ExperimentConfig {
    let o: Vec<String> = overrides.iter().map(|s| s.to_string()).collect();
    ExperimentConfig::load(preset, None, &o).unwrap()
}

#[test]
fn normalized_product_suppresses_the_impulse() {
    let c = cfg(Preset::Impulse, &[]);
    let demo = run_false_edge_demo(&c).unwrap();
    let impulse = demo.impulse_bins[0];
    assert_eq!(impulse, c.grid.nearest_bin(1400.0).unwrap());
    assert!(!FalseEdgeDemo::has_edge_near(&demo.wmp_normalized, impulse, 2));
    assert!(demo.keeps_true_edges(&demo.wmp_normalized, 2));
    // The single-scale derivative reacts to both flanks of the impulse.
    let flank = 2 * (1 << c.edges.levels);
    assert!(FalseEdgeDemo::has_edge_near(&demo.cwt, impulse, flank));
}

#[test]
fn cs_sparsity_tradeoff() {
    let c = cfg(Preset::RollOff, &[]);
    let res = run_cs_tradeoff(&c).unwrap();
    let sparse = res.get(CsProfile::Sparse, 0.25).unwrap();
    let dense = res.get(CsProfile::Dense, 0.25).unwrap();
    assert_eq!(sparse.trials, 200);
    assert!(dense.mean_rel_error >= 2.0 * sparse.mean_rel_error, "{dense:?} vs {sparse:?}");
    for p in [CsProfile::Sparse, CsProfile::Dense] {
        assert!(res.get(p, 1.0).unwrap().mean_rel_error < 1e-9);
        let rows: Vec<_> = c.cs.ratios.iter().map(|&r| res.get(p, r).unwrap()).collect();
        for w in rows.windows(2) {
            let se = (w[0].rel_error_std_error.powi(2) + w[1].rel_error_std_error.powi(2)).sqrt();
            assert!(w[1].mean_rel_error <= w[0].mean_rel_error + 2.0 * se, "{p:?}: {:?}", w);
        }
    }
}

fn file_bytes(dir: &std::path::Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    out.sort();
    out
}

#[test]
fn outputs_are_byte_identical_across_runs_and_thread_counts() {
    let base = ["experiment.trials=20", "cs.trials=20", "rmse.betas=0,0.3"];
    let mut dumps = Vec::new();
    for threads in ["1", "4", "4"] {
        let mut o = base.to_vec();
        let t = format!("experiment.threads={threads}");
        o.push(&t);
        let c = cfg(Preset::RollOff, &o);
        let dir = tempfile::tempdir().unwrap();
        prepare_output(dir.path(), &c).unwrap();
        write_rmse_beta(dir.path(), &run_rmse_beta(&c).unwrap(), &c).unwrap();
        write_cs_tradeoff(dir.path(), &run_cs_tradeoff(&c).unwrap()).unwrap();
        let table = read_rmse_csv(std::fs::File::open(dir.path().join("rmse_beta.csv")).unwrap()).unwrap();
        assert_eq!(table, run_rmse_beta(&c).unwrap());
        let cs = read_cs_csv(std::fs::File::open(dir.path().join("cs_tradeoff.csv")).unwrap()).unwrap();
        assert_eq!(cs.len(), 8);
        // resolved.cfg differs only in the thread line; compare the CSVs.
        dumps.push(file_bytes(dir.path()).into_iter().filter(|(n, _)| n.ends_with(".csv")).collect::<Vec<_>>());
    }
    assert_eq!(dumps[0].len(), 4);
    assert_eq!(dumps[0], dumps[1]);
    assert_eq!(dumps[1], dumps[2]);
}

#[test]
fn master_seed_changes_results() {
    let a = run_rmse_beta(&cfg(Preset::RollOff, &["experiment.trials=10", "rmse.betas=0"])).unwrap();
    let b = run_rmse_beta(&cfg(Preset::RollOff, &["experiment.trials=10", "rmse.betas=0", "experiment.master_seed=1"])).unwrap();
    assert_ne!(a, b);
}

#[test]
fn sparse_detection_at_quarter_rate_and_10_db() {
    let c = cfg(Preset::RollOff, &["cs.snr_db=10", "cs.ratios=0.25", "cs.profiles=sparse", "cs.trials=200"]);
    let row = run_cs_tradeoff(&c).unwrap().rows[0].clone();
    assert!(row.detection_rate >= 0.9, "{row:?}");
}
