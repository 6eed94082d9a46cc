//! Plain k-means++ seeding.
//!
//! Each iteration compares every non-center point against the newest center
//! only, then draws the next center by D² sampling. This is also the oracle
//! the accelerated variant is checked against.

use std::time::Instant;

use crate::error::SeedError;
use crate::geometry::{sed, Dataset};
use crate::instrumentation::{CounterSink, Counters, Phase};
use crate::sampling::{roulette_global_scan, strict_select_scan, RandomStream, SamplingMode};
use crate::seed::{NoObserver, SeedObserver, SeedResult, TraceStep};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StandardConfig {
    pub sampling: SamplingMode,
    pub trace: bool,
}

/// Runs standard k-means++ and returns the chosen centers with counters.
pub fn standard_seed(
    ds: &Dataset,
    k: usize,
    rng: &mut RandomStream,
    mode: SamplingMode,
) -> Result<SeedResult, SeedError> {
    let cfg = StandardConfig {
        sampling: mode,
        trace: false,
    };
    let mut counters = Counters::default();
    let start = Instant::now();
    let mut result = standard_seed_with(ds, k, rng, cfg, &mut counters, &mut NoObserver)?;
    counters.wall_time_ns = start.elapsed().as_nanos() as u64;
    result.counters = counters;
    Ok(result)
}

/// Standard seeding with an explicit sink and observer.
///
/// The returned `counters` field is left at its default; cost events go to
/// `sink`.
pub fn standard_seed_with<S: CounterSink, O: SeedObserver>(
    ds: &Dataset,
    k: usize,
    rng: &mut RandomStream,
    cfg: StandardConfig,
    sink: &mut S,
    observer: &mut O,
) -> Result<SeedResult, SeedError> {
    let n = ds.n();
    if k == 0 || k > n {
        return Err(SeedError::InvalidK { k, n });
    }

    let mut trace = cfg.trace.then(|| Vec::with_capacity(k));
    let mut is_center = vec![false; n];
    let mut w = vec![f64::INFINITY; n];
    let mut centers = Vec::with_capacity(k);

    let first = rng.next_index(n);
    centers.push(first);
    is_center[first] = true;
    w[first] = 0.0;
    if let Some(t) = trace.as_mut() {
        t.push(TraceStep {
            chosen: first,
            total_weight: 0.0,
        });
    }

    while centers.len() < k {
        let newest = ds.row(*centers.last().unwrap());
        let mut total = 0.0;
        let mut examined = 0u64;
        for (i, wi) in w.iter_mut().enumerate() {
            if is_center[i] {
                continue;
            }
            examined += 1;
            let d = sed(ds.row(i), newest);
            if d < *wi {
                *wi = d;
            }
            total += *wi;
        }
        sink.record_point_visits(Phase::Update, examined);
        sink.record_distances(examined);
        observer.on_weights(&centers, &w);

        let u = rng.next_uniform();
        let scan = match cfg.sampling {
            SamplingMode::Fast => roulette_global_scan(&w, total, u)?,
            SamplingMode::Strict => strict_select_scan(&w, u)?,
        };
        sink.record_point_visits(Phase::Sampling, scan.scanned as u64);

        let chosen = scan.index;
        if let Some(t) = trace.as_mut() {
            t.push(TraceStep {
                chosen,
                total_weight: total,
            });
        }
        centers.push(chosen);
        is_center[chosen] = true;
        w[chosen] = 0.0;
    }

    Ok(SeedResult {
        center_coords: ds.gather(&centers),
        centers,
        trace,
        counters: Counters::default(),
    })
}
