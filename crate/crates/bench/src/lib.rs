//! Benchmark harness for exact k-means++ seeding: CSV ingestion, synthetic
//! instances, the experiment matrix and report files.

pub mod data;
pub mod error;
pub mod plan;
pub mod report;
pub mod synth;

pub use data::{load_csv, read_csv, write_csv, ColumnRef, CsvOptions, LoadSummary};
pub use error::HarnessError;
pub use plan::{
    cell_seed, default_k_grid, run_plan, run_plan_on, AccelOptions, Aggregate, CellRecord, DataSource, ExperimentPlan,
    ReferenceChoice, RunReport, Variant,
};
pub use report::{emit_report, read_report_csv, read_report_json, to_json, ReportFormat};
pub use synth::{gaussian_mixture, generate, Generator, SyntheticSpec};
