use std::fs;

use wsnsim_core::experiments::{run_multilevel_experiment, run_sweep, SweepParam};
use wsnsim_core::export::{
    export_to, header_line, write_multilevel_summary, write_series, write_sweep,
};
use wsnsim_core::ScenarioConfig;

fn tiny_two_level() -> ScenarioConfig {
    let mut cfg = ScenarioConfig::two_level_default();
    cfg.nodes = 40;
    cfg.field_side = 150.0;
    cfg
}

#[test]
fn sweep_export_is_byte_identical_across_runs() {
    let cfg = tiny_two_level();
    let dir = tempfile::tempdir().unwrap();
    let mut contents = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let rows = run_sweep(&cfg, SweepParam::Alpha, &[0.5, 2.0], 3).unwrap();
        let header = header_line(&cfg, &[1, 2, 3]);
        let path = dir.path().join(name);
        export_to(&path, |w| write_sweep(w, &header, SweepParam::Alpha, &rows)).unwrap();
        contents.push(fs::read(&path).unwrap());
    }
    assert_eq!(contents[0], contents[1]);

    let text = String::from_utf8(contents.remove(0)).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("# wsnsim "));
    assert!(header.contains("seeds=1..=3"));
    assert_eq!(lines.next(), Some("protocol,alpha,seed,stability_period"));
    // 4 protocols x 2 values x 3 seeds
    assert_eq!(lines.count(), 24);
}

#[test]
fn multilevel_files_have_one_block_per_protocol() {
    let mut cfg = ScenarioConfig::default();
    cfg.nodes = 30;
    cfg.field_side = 120.0;
    cfg.heterogeneity = wsnsim_core::HeterogeneitySpec::MultiLevel {
        e_min: 0.05,
        e_max: 0.2,
        total_target: None,
    };
    let runs = run_multilevel_experiment(&cfg, 2).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let summary = dir.path().join("summary.csv");
    export_to(&summary, |w| write_multilevel_summary(w, "# s", &runs)).unwrap();
    let text = fs::read_to_string(&summary).unwrap();
    assert_eq!(text.lines().count(), 2 + 8);

    let series = dir.path().join("series.csv");
    export_to(&series, |w| write_series(w, "# s", &runs[0].series)).unwrap();
    let text = fs::read_to_string(&series).unwrap();
    let rows: usize = runs[0].series.iter().map(|s| s.rounds()).sum();
    assert_eq!(text.lines().count(), 2 + rows);
    for line in text.lines().skip(2) {
        assert_eq!(line.split(',').count(), 5);
    }
}
