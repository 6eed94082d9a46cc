use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use kmpp::{
    accel_seed, analysis::score_references, candidate_references, standard_seed, AccelConfig, Counters, Dataset,
    RandomStream, ReferenceKind, SamplingMode,
};
use kmpp_bench::{
    emit_report, load_csv, report::write_file, run_plan_on, to_json, write_csv, ColumnRef, CsvOptions, DataSource,
    ExperimentPlan, HarnessError, ReferenceChoice, ReportFormat, SyntheticSpec, Variant,
};

#[derive(Parser)]
#[command(
    name = "kmpp-bench",
    version,
    about = "Exact k-means++ seeding: runs, benchmarks and diagnostics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one seeding and print the chosen centers and counters.
    Seed(SeedArgs),
    /// Run the variant x k x repetition matrix and write a report.
    Bench(BenchArgs),
    /// Score the candidate reference frames by norm variance.
    Norms(NormsArgs),
    /// Write a synthetic instance as CSV.
    Gen(GenArgs),
}

#[derive(Args)]
struct SourceArgs {
    /// CSV file to load.
    #[arg(long, conflicts_with = "gen", required_unless_present = "gen")]
    input: Option<PathBuf>,
    /// Synthetic instance, e.g. `gaussian-mixture:n=1000,d=4,components=8,seed=1`.
    #[arg(long)]
    gen: Option<SyntheticSpec>,
    #[arg(long, default_value_t = ',')]
    delimiter: char,
    /// The CSV has no header row.
    #[arg(long)]
    no_header: bool,
    /// Columns to drop, by name or 0-based index.
    #[arg(long, value_delimiter = ',')]
    drop: Vec<ColumnRef>,
}

impl SourceArgs {
    fn source(&self) -> Result<DataSource, HarnessError> {
        if let Some(spec) = &self.gen {
            return Ok(DataSource::Synthetic(spec.clone()));
        }
        if !self.delimiter.is_ascii() {
            return Err(HarnessError::Plan("delimiter must be a single ASCII character".into()));
        }
        Ok(DataSource::File {
            path: self.input.clone().expect("clap enforces input or gen"),
            csv: CsvOptions {
                delimiter: self.delimiter as u8,
                header: !self.no_header,
                drop_columns: self.drop.clone(),
            },
        })
    }

    fn load(&self) -> Result<Dataset, HarnessError> {
        let source = self.source()?;
        if let DataSource::File { path, csv } = &source {
            let (ds, summary) = load_csv(path, csv)?;
            eprintln!(
                "loaded {} rows x {} columns ({} dropped)",
                ds.n(),
                ds.d(),
                summary.rows_dropped
            );
            return Ok(ds);
        }
        source.load()
    }
}

#[derive(Args)]
struct SeedArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, default_value = "tie")]
    variant: Variant,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "fast")]
    mode: SamplingMode,
    /// Enable the norm filter (turns `tie` into `tie+norm`).
    #[arg(long)]
    norm_filter: bool,
    #[arg(long)]
    center_skip: bool,
    /// `origin`, `mean`, `median`, `positive-corner`, `mean-norm-point`, `best`, or coordinates.
    #[arg(long, default_value = "origin")]
    reference: ReferenceChoice,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, value_delimiter = ',', default_value = "standard,tie,tie+norm")]
    variants: Vec<Variant>,
    /// k values; powers of two up to min(4096, n) when absent.
    #[arg(long, value_delimiter = ',')]
    k_grid: Option<Vec<usize>>,
    #[arg(long, default_value_t = 10)]
    reps: usize,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, default_value_t = 0)]
    base_seed: u64,
    #[arg(long, default_value = "fast")]
    mode: SamplingMode,
    #[arg(long)]
    center_skip: bool,
    #[arg(long, default_value = "origin")]
    reference: ReferenceChoice,
    /// Keep chosen center indices in the JSON report.
    #[arg(long)]
    record_centers: bool,
    #[arg(long, default_value = "json")]
    format: ReportFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct NormsArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, value_delimiter = ',')]
    candidates: Option<Vec<ReferenceKind>>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    gen: SyntheticSpec,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Serialize)]
struct SeedOutput {
    variant: Variant,
    k: usize,
    seed: u64,
    n: usize,
    d: usize,
    centers: Vec<usize>,
    point_ids: Vec<usize>,
    counters: Counters,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Seed(a) => seed(a),
        Command::Bench(a) => bench(a),
        Command::Norms(a) => norms(a),
        Command::Gen(a) => gen(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn write_or_print(out: Option<&PathBuf>, bytes: &[u8]) -> Result<(), HarnessError> {
    match out {
        Some(path) => write_file(path, bytes),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(bytes)
                .map_err(|e| HarnessError::io("<stdout>", e))
        }
    }
}

fn seed(a: SeedArgs) -> Result<u8, HarnessError> {
    let variant = match (a.variant, a.norm_filter) {
        (Variant::Standard, true) => {
            return Err(HarnessError::Plan("--norm-filter needs an accelerated variant".into()))
        }
        (Variant::Tie, true) => Variant::TieNorm,
        (v, _) => v,
    };
    let ds = a.source.load()?;
    let mut rng = RandomStream::new(a.seed);
    let result = match variant {
        Variant::Standard => standard_seed(&ds, a.k, &mut rng, a.mode),
        Variant::Tie | Variant::TieNorm => {
            let cfg = AccelConfig {
                norm_filter: variant == Variant::TieNorm,
                center_skip: a.center_skip,
                sampling: a.mode,
                reference: if variant == Variant::TieNorm {
                    a.reference.resolve(&ds)?
                } else {
                    None
                },
                trace: false,
            };
            accel_seed(&ds, a.k, &mut rng, &cfg)
        }
    }?;
    let out = SeedOutput {
        variant,
        k: a.k,
        seed: a.seed,
        n: ds.n(),
        d: ds.d(),
        point_ids: result.centers.iter().map(|&c| ds.point_ids()[c]).collect(),
        centers: result.centers,
        counters: result.counters,
    };
    write_or_print(a.out.as_ref(), &to_json(&out)?)?;
    Ok(0)
}

fn bench(a: BenchArgs) -> Result<u8, HarnessError> {
    let ds = a.source.load()?;
    let plan = ExperimentPlan {
        source: a.source.source()?,
        variants: a.variants,
        k_values: a.k_grid,
        repetitions: a.reps,
        base_seed: a.base_seed,
        concurrent_jobs: a.jobs,
        accel: kmpp_bench::AccelOptions {
            center_skip: a.center_skip,
            reference: a.reference,
            sampling: a.mode,
        },
        record_centers: a.record_centers,
    };
    let report = run_plan_on(&plan, &ds)?;

    for agg in &report.aggregates {
        let ratios = agg
            .vs_standard
            .map(|r| {
                let p = |v: Option<f64>| v.map_or("-".into(), |x| format!("{x:.1}%"));
                format!(
                    "  examined {} distances {}",
                    p(r.points_examined_update_pct),
                    p(r.distances_computed_pct)
                )
            })
            .unwrap_or_default();
        eprintln!(
            "{:>9} k={:<5} runs={:<3} distances={:.0}{}",
            agg.variant, agg.k, agg.runs, agg.mean.distances_computed, ratios
        );
    }

    match &a.out {
        Some(path) => emit_report(&report, a.format, path)?,
        None => {
            let bytes = match a.format {
                ReportFormat::Json => to_json(&report)?,
                ReportFormat::Csv => kmpp_bench::report::report_to_csv(&report).into_bytes(),
            };
            write_or_print(None, &bytes)?;
        }
    }

    let failed = report.degenerate_cells();
    if failed > 0 {
        eprintln!("{failed} cells failed (degenerate instance)");
        return Ok(4);
    }
    Ok(0)
}

fn norms(a: NormsArgs) -> Result<u8, HarnessError> {
    let ds = a.source.load()?;
    let all = candidate_references(&ds);
    let chosen: Vec<_> = match &a.candidates {
        None => all,
        Some(kinds) => {
            if let Some(k) = kinds.iter().find(|k| **k == ReferenceKind::Explicit) {
                return Err(HarnessError::Plan(format!("'{}' is not a candidate kind", k.as_str())));
            }
            all.into_iter().filter(|r| kinds.contains(&r.kind)).collect()
        }
    };
    let report = score_references(&ds, &chosen);
    for e in &report.entries {
        eprintln!("{:>16}  {:.4}%", e.kind.as_str(), e.variance_pct);
    }
    if let Some(best) = report.best_index() {
        eprintln!("best: {}", report.entries[best].kind.as_str());
    }
    write_or_print(a.out.as_ref(), &to_json(&report)?)?;
    Ok(0)
}

fn gen(a: GenArgs) -> Result<u8, HarnessError> {
    let ds = kmpp_bench::generate(&a.gen)?;
    write_csv(&ds, &a.out)?;
    eprintln!("wrote {} points x {} dims to {}", ds.n(), ds.d(), a.out.display());
    Ok(0)
}
