use std::path::Path;
use std::process::Command;

use kmpp::{Dataset, MeanCounters, SamplingMode};
use kmpp_bench::{
    emit_report, generate, load_csv, read_report_csv, read_report_json, run_plan_on, to_json, write_csv, CsvOptions,
    DataSource, ExperimentPlan, Generator, ReportFormat, RunReport, SyntheticSpec, Variant,
};

fn mixture(n: usize, seed: u64) -> SyntheticSpec {
    SyntheticSpec {
        generator: Generator::GaussianMixture {
            components: 8,
            spread: 1.0,
            separation: 15.0,
        },
        n,
        d: 3,
        seed,
    }
}

fn plan_for(spec: &SyntheticSpec) -> ExperimentPlan {
    let mut plan = ExperimentPlan::new(DataSource::Synthetic(spec.clone()));
    plan.k_values = Some(vec![1, 3, 20]);
    plan.repetitions = 3;
    plan.base_seed = 5;
    plan.record_centers = true;
    plan
}

#[test]
fn generated_csv_reloads_identically() {
    let dir = tempfile::tempdir().unwrap();
    for spec in [
        mixture(300, 1),
        SyntheticSpec {
            generator: Generator::RadialShells {
                shells: 5,
                growth: 3.0,
                spread: 0.2,
            },
            n: 200,
            d: 6,
            seed: 4,
        },
    ] {
        let ds = generate(&spec).unwrap();
        let path = dir.path().join("data.csv");
        write_csv(&ds, &path).unwrap();
        let (back, summary) = load_csv(&path, &CsvOptions::default()).unwrap();
        assert_eq!(back.data(), ds.data());
        assert_eq!(back.d(), ds.d());
        assert_eq!(summary.rows_dropped, 0);
    }
}

#[test]
fn jobs_do_not_change_results() {
    let spec = mixture(1500, 2);
    let ds = generate(&spec).unwrap();
    let mut plan = plan_for(&spec);
    let one = run_plan_on(&plan, &ds).unwrap();
    plan.concurrent_jobs = 4;
    let four = run_plan_on(&plan, &ds).unwrap();
    assert_eq!(one.records.len(), 3 * 3 * 3);
    for (a, b) in one.records.iter().zip(&four.records) {
        assert_eq!((a.variant, a.k, a.rep, a.seed), (b.variant, b.k, b.rep, b.seed));
        assert_eq!(a.centers, b.centers);
        let (mut ca, mut cb) = (a.counters, b.counters);
        ca.wall_time_ns = 0;
        cb.wall_time_ns = 0;
        assert_eq!(ca, cb);
    }
}

#[test]
fn strict_mode_variants_share_center_sequences() {
    let spec = mixture(1000, 3);
    let ds = generate(&spec).unwrap();
    let mut plan = plan_for(&spec);
    plan.accel.sampling = SamplingMode::Strict;
    plan.accel.center_skip = true;
    let report = run_plan_on(&plan, &ds).unwrap();
    for r in report.records.iter().filter(|r| r.variant != Variant::Standard) {
        let standard = report
            .records
            .iter()
            .find(|s| s.variant == Variant::Standard && s.k == r.k && s.rep == r.rep)
            .unwrap();
        assert_eq!(r.centers, standard.centers, "{} k={} rep={}", r.variant, r.k, r.rep);
    }
}

#[test]
fn aggregates_are_means_of_records() {
    let spec = mixture(800, 4);
    let ds = generate(&spec).unwrap();
    let mut plan = plan_for(&spec);
    plan.repetitions = 10;
    let report = run_plan_on(&plan, &ds).unwrap();
    for agg in &report.aggregates {
        let records: Vec<_> = report.records_for(agg.variant, agg.k).collect();
        assert_eq!(records.len(), 10);
        let mean = MeanCounters::from_runs(records.iter().map(|r| &r.counters));
        let sum: u64 = records.iter().map(|r| r.counters.distances_computed).sum();
        assert!((mean.distances_computed - sum as f64 / 10.0).abs() <= 1e-12 * mean.distances_computed);
        assert_eq!(agg.mean, mean);
        assert_eq!(agg.vs_standard.is_some(), agg.variant != Variant::Standard);
    }
}

#[test]
fn reports_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let spec = mixture(600, 5);
    let ds = generate(&spec).unwrap();
    let report = run_plan_on(&plan_for(&spec), &ds).unwrap();

    let json = dir.path().join("r.json");
    emit_report(&report, ReportFormat::Json, &json).unwrap();
    let back = read_report_json(&json).unwrap();
    assert_eq!(back, report);
    assert_eq!(to_json(&back).unwrap(), std::fs::read(&json).unwrap());

    let csv = dir.path().join("r.csv");
    emit_report(&report, ReportFormat::Csv, &csv).unwrap();
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), report.records.len() + 1);
    assert_eq!(
        text.lines().next().unwrap(),
        "variant,k,rep,points_examined_update,points_examined_sampling,distances,norms,wall_time_ns"
    );
    let rows = read_report_csv(&csv).unwrap();
    for (row, rec) in rows.iter().zip(&report.records) {
        assert_eq!((row.variant, row.k, row.rep), (rec.variant, rec.k, rec.rep));
        assert_eq!(row.counters, rec.counters);
    }
}

#[test]
fn empty_plan_writes_valid_files() {
    let dir = tempfile::tempdir().unwrap();
    let spec = mixture(50, 6);
    let ds = generate(&spec).unwrap();
    let mut plan = plan_for(&spec);
    plan.variants.clear();
    let report = run_plan_on(&plan, &ds).unwrap();
    assert!(report.records.is_empty());

    let json = dir.path().join("e.json");
    emit_report(&report, ReportFormat::Json, &json).unwrap();
    let back: RunReport = read_report_json(&json).unwrap();
    assert!(back.records.is_empty());
    let csv = dir.path().join("e.csv");
    emit_report(&report, ReportFormat::Csv, &csv).unwrap();
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 1);
    assert!(read_report_csv(&csv).unwrap().is_empty());
}

#[test]
fn reloaded_csv_keeps_original_row_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("raw.csv");
    std::fs::write(&path, "id,x,y,label\n7,1.5,2,a\n8,,3,b\n9,4,NA,c\n10,5,6,d\n").unwrap();
    let opts = CsvOptions {
        drop_columns: vec!["id".parse().unwrap(), "label".parse().unwrap()],
        ..CsvOptions::default()
    };
    let (ds, summary) = load_csv(&path, &opts).unwrap();
    assert_eq!(ds.point_ids(), &[0, 3]);
    assert_eq!(ds.data(), Dataset::from_rows(&[[1.5, 2.0], [5.0, 6.0]]).unwrap().data());
    assert_eq!(summary.rows_dropped, 2);
}

fn cli(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_kmpp-bench"))
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8_lossy(&out.stdout).into_owned(),
    )
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("gen.csv");
    let gen = "gaussian-mixture:n=400,d=2,components=4,spread=1,separation=30,seed=1";

    assert_eq!(cli(&["gen", "--gen", gen, "--out", path_str(&data)]).0, 0);

    let (code, out) = cli(&[
        "seed",
        "--input",
        path_str(&data),
        "--k",
        "5",
        "--variant",
        "tie",
        "--norm-filter",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["variant"], "tie+norm");
    assert_eq!(v["centers"].as_array().unwrap().len(), 5);
    assert_eq!(v["counters"]["norms_computed"], 400);

    let report = dir.path().join("bench.csv");
    let args = [
        "bench", "--gen", gen, "--k-grid", "2,8", "--reps", "2", "--jobs", "2", "--format", "csv", "--out",
    ];
    let mut with_out = args.to_vec();
    with_out.push(path_str(&report));
    assert_eq!(cli(&with_out).0, 0);
    assert_eq!(std::fs::read_to_string(&report).unwrap().lines().count(), 3 * 2 * 2 + 1);

    let (code, out) = cli(&["norms", "--input", path_str(&data), "--candidates", "origin,mean"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["entries"].as_array().unwrap().len(), 2);

    // invalid arguments
    assert_eq!(cli(&["seed", "--input", path_str(&data), "--k", "401"]).0, 2);
    assert_eq!(
        cli(&["seed", "--input", path_str(&data), "--k", "2", "--mode", "slow"]).0,
        2
    );
    assert_eq!(cli(&["gen", "--gen", "blob:n=3,d=1", "--out", path_str(&data)]).0, 2);
    assert_eq!(cli(&["bench", "--gen", gen, "--reps", "0"]).0, 2);

    // data errors
    let missing = dir.path().join("missing.csv");
    assert_eq!(cli(&["seed", "--input", path_str(&missing), "--k", "1"]).0, 3);
    let ragged = dir.path().join("ragged.csv");
    std::fs::write(&ragged, "a,b\n1,2\n3\n").unwrap();
    assert_eq!(cli(&["seed", "--input", path_str(&ragged), "--k", "1"]).0, 3);

    // degenerate: fewer distinct points than k
    let dupes = dir.path().join("dupes.csv");
    std::fs::write(&dupes, "x,y\n1,1\n1,1\n1,1\n").unwrap();
    for variant in ["standard", "tie", "tie+norm"] {
        assert_eq!(
            cli(&["seed", "--input", path_str(&dupes), "--k", "2", "--variant", variant]).0,
            4
        );
    }
    assert_eq!(
        cli(&["bench", "--input", path_str(&dupes), "--k-grid", "1,2", "--reps", "1"]).0,
        4
    );
}
