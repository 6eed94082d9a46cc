//! The variant x k x repetition experiment matrix.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use kmpp::{
    accel_seed, best_reference, candidate_references, ratio_report, standard_seed, AccelConfig, Counters, Dataset,
    MeanCounters, RandomStream, RatioReport, ReferenceKind, ReferencePoint, SamplingMode, SeedError, SeedResult,
};

use crate::data::{load_csv, CsvOptions};
use crate::error::HarnessError;
use crate::synth::{generate, SyntheticSpec};

pub const REPORT_FORMAT_VERSION: u32 = 1;

pub const SEED_POLICY: &str =
    "cell seed = base_seed xor splitmix64(splitmix64(k) xor rep); identical across variants so cells compare like for like";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "standard")]
    Standard,
    #[serde(rename = "tie")]
    Tie,
    #[serde(rename = "tie+norm")]
    TieNorm,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Standard, Variant::Tie, Variant::TieNorm];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Standard => "standard",
            Variant::Tie => "tie",
            Variant::TieNorm => "tie+norm",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "standard" => Ok(Variant::Standard),
            "tie" => Ok(Variant::Tie),
            "tie+norm" | "tie-norm" => Ok(Variant::TieNorm),
            other => Err(format!("unknown variant '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DataSource {
    File { path: PathBuf, csv: CsvOptions },
    Synthetic(SyntheticSpec),
}

impl DataSource {
    pub fn load(&self) -> Result<Dataset, HarnessError> {
        match self {
            DataSource::File { path, csv } => Ok(load_csv(path, csv)?.0),
            DataSource::Synthetic(spec) => generate(spec),
        }
    }
}

/// How the norm frame of the norm variant is chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceChoice {
    Kind(ReferenceKind),
    /// Highest norm-variance candidate.
    Best,
    Explicit(Vec<f64>),
}

impl Default for ReferenceChoice {
    fn default() -> Self {
        ReferenceChoice::Kind(ReferenceKind::Origin)
    }
}

impl FromStr for ReferenceChoice {
    type Err = String;

    /// `best`, a candidate kind name, or comma-separated coordinates.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "best" {
            return Ok(ReferenceChoice::Best);
        }
        if let Ok(kind) = s.parse::<ReferenceKind>() {
            return Ok(ReferenceChoice::Kind(kind));
        }
        s.split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map(ReferenceChoice::Explicit)
            .map_err(|_| format!("unknown reference '{s}'"))
    }
}

impl ReferenceChoice {
    /// Resolves to a concrete frame; `None` stands for the origin.
    pub fn resolve(&self, ds: &Dataset) -> Result<Option<ReferencePoint>, HarnessError> {
        let point = match self {
            ReferenceChoice::Kind(ReferenceKind::Origin) => return Ok(None),
            ReferenceChoice::Kind(ReferenceKind::Explicit) => {
                return Err(HarnessError::Plan("explicit reference needs coordinates".into()))
            }
            ReferenceChoice::Kind(kind) => candidate_references(ds)
                .into_iter()
                .find(|r| r.kind == *kind)
                .expect("every non-explicit kind is a candidate"),
            ReferenceChoice::Best => best_reference(ds).0,
            ReferenceChoice::Explicit(coords) => {
                if coords.len() != ds.d() {
                    return Err(HarnessError::Plan(format!(
                        "reference has {} coordinates, data has {}",
                        coords.len(),
                        ds.d()
                    )));
                }
                ReferencePoint::explicit(coords.clone())
            }
        };
        Ok((!point.is_origin()).then_some(point))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AccelOptions {
    pub center_skip: bool,
    pub reference: ReferenceChoice,
    pub sampling: SamplingMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub source: DataSource,
    pub variants: Vec<Variant>,
    /// `None` selects powers of two up to `min(4096, n)`.
    pub k_values: Option<Vec<usize>>,
    pub repetitions: usize,
    pub base_seed: u64,
    pub concurrent_jobs: usize,
    pub accel: AccelOptions,
    pub record_centers: bool,
}

impl ExperimentPlan {
    pub fn new(source: DataSource) -> Self {
        Self {
            source,
            variants: Variant::ALL.to_vec(),
            k_values: None,
            repetitions: 10,
            base_seed: 0,
            concurrent_jobs: 1,
            accel: AccelOptions::default(),
            record_centers: false,
        }
    }

    fn resolved_k(&self, n: usize) -> Result<Vec<usize>, HarnessError> {
        if self.repetitions == 0 {
            return Err(HarnessError::Plan("repetitions must be at least 1".into()));
        }
        if self.concurrent_jobs == 0 {
            return Err(HarnessError::Plan("concurrent_jobs must be at least 1".into()));
        }
        let ks = self.k_values.clone().unwrap_or_else(|| default_k_grid(n));
        if let Some(&k) = ks.iter().find(|&&k| k == 0 || k > n) {
            return Err(HarnessError::Plan(format!("k = {k} outside 1..={n}")));
        }
        Ok(ks)
    }
}

pub fn default_k_grid(n: usize) -> Vec<usize> {
    let cap = n.min(4096);
    std::iter::successors(Some(1usize), |k| Some(k * 2))
        .take_while(|&k| k <= cap)
        .collect()
}

pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

pub fn cell_seed(base_seed: u64, k: usize, rep: usize) -> u64 {
    base_seed ^ splitmix64(splitmix64(k as u64) ^ rep as u64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetInfo {
    pub n: usize,
    pub d: usize,
    /// Frame used by the norm variant; `None` is the origin.
    pub reference: Option<ReferencePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub variant: Variant,
    pub k: usize,
    pub rep: usize,
    pub seed: u64,
    pub counters: Counters,
    pub centers: Option<Vec<usize>>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub variant: Variant,
    pub k: usize,
    /// Successful repetitions the mean is taken over.
    pub runs: usize,
    pub mean: MeanCounters,
    pub vs_standard: Option<RatioReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub format_version: u32,
    pub rng: String,
    pub seed_policy: String,
    pub plan: ExperimentPlan,
    pub k_values: Vec<usize>,
    pub dataset: Option<DatasetInfo>,
    pub records: Vec<CellRecord>,
    pub aggregates: Vec<Aggregate>,
}

impl RunReport {
    pub fn aggregate(&self, variant: Variant, k: usize) -> Option<&Aggregate> {
        self.aggregates.iter().find(|a| a.variant == variant && a.k == k)
    }

    pub fn records_for(&self, variant: Variant, k: usize) -> impl Iterator<Item = &CellRecord> {
        self.records.iter().filter(move |r| r.variant == variant && r.k == k)
    }

    pub fn degenerate_cells(&self) -> usize {
        self.records.iter().filter(|r| r.error.is_some()).count()
    }
}

/// Loads the plan's dataset and runs it.
pub fn run_plan(plan: &ExperimentPlan) -> Result<RunReport, HarnessError> {
    let ds = plan.source.load()?;
    run_plan_on(plan, &ds)
}

/// Runs every cell of `plan` against an already loaded dataset.
pub fn run_plan_on(plan: &ExperimentPlan, ds: &Dataset) -> Result<RunReport, HarnessError> {
    let k_values = plan.resolved_k(ds.n())?;
    let reference = if plan.variants.contains(&Variant::TieNorm) {
        plan.accel.reference.resolve(ds)?
    } else {
        None
    };
    let tie = AccelConfig::tie()
        .with_sampling(plan.accel.sampling)
        .with_center_skip(plan.accel.center_skip);
    let tie_norm = AccelConfig {
        norm_filter: true,
        reference: reference.clone(),
        ..tie.clone()
    };

    let mut cells = Vec::new();
    for &variant in &plan.variants {
        for &k in &k_values {
            for rep in 0..plan.repetitions {
                cells.push((variant, k, rep));
            }
        }
    }

    let run = |&(variant, k, rep): &(Variant, usize, usize)| {
        let seed = cell_seed(plan.base_seed, k, rep);
        let mut rng = RandomStream::new(seed);
        let result = match variant {
            Variant::Standard => standard_seed(ds, k, &mut rng, plan.accel.sampling),
            Variant::Tie => accel_seed(ds, k, &mut rng, &tie),
            Variant::TieNorm => accel_seed(ds, k, &mut rng, &tie_norm),
        };
        cell_record(variant, k, rep, seed, result, plan.record_centers)
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(plan.concurrent_jobs)
        .build()
        .map_err(|e| HarnessError::Plan(format!("thread pool: {e}")))?;
    let records: Vec<CellRecord> = pool.install(|| cells.par_iter().map(run).collect());

    let aggregates = aggregate(&records, &plan.variants, &k_values);
    Ok(RunReport {
        format_version: REPORT_FORMAT_VERSION,
        rng: kmpp::sampling::RNG_ALGORITHM.to_string(),
        seed_policy: SEED_POLICY.to_string(),
        plan: plan.clone(),
        k_values,
        dataset: Some(DatasetInfo {
            n: ds.n(),
            d: ds.d(),
            reference,
        }),
        records,
        aggregates,
    })
}

fn cell_record(
    variant: Variant,
    k: usize,
    rep: usize,
    seed: u64,
    result: Result<SeedResult, SeedError>,
    keep_centers: bool,
) -> CellRecord {
    let (counters, centers, error) = match result {
        Ok(r) => (r.counters, keep_centers.then_some(r.centers), None),
        Err(e) => (Counters::default(), None, Some(e.to_string())),
    };
    CellRecord {
        variant,
        k,
        rep,
        seed,
        counters,
        centers,
        error,
    }
}

/// Means per (variant, k) over successful records, with ratios against the
/// standard variant when it is part of the plan.
pub fn aggregate(records: &[CellRecord], variants: &[Variant], k_values: &[usize]) -> Vec<Aggregate> {
    let mean_of = |variant: Variant, k: usize| {
        let ok: Vec<&Counters> = records
            .iter()
            .filter(|r| r.variant == variant && r.k == k && r.error.is_none())
            .map(|r| &r.counters)
            .collect();
        (ok.len(), MeanCounters::from_runs(ok))
    };
    let mut out = Vec::new();
    for &variant in variants {
        for &k in k_values {
            let (runs, mean) = mean_of(variant, k);
            let vs_standard = (variant != Variant::Standard && variants.contains(&Variant::Standard) && runs > 0)
                .then(|| mean_of(Variant::Standard, k))
                .filter(|(std_runs, _)| *std_runs > 0)
                .map(|(_, std_mean)| ratio_report(&mean, &std_mean));
            out.push(Aggregate {
                variant,
                k,
                runs,
                mean,
                vs_standard,
            });
        }
    }
    out
}
