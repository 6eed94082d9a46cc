//! Accelerated exact k-means++ seeding.
//!
//! Points are grouped by their nearest center. When a new center arrives,
//! whole clusters are ruled out by comparing the center-center distance with
//! the cluster radius, and single points by comparing it with the point's own
//! weight. Optionally each cluster is split by member norm into a lower and
//! an upper partition with norm bounds, and center-center distances are
//! skipped for pairs of clusters that are provably separated.
//!
//! Sampling draws a cluster by its weight sum and then a point inside it,
//! which leaves the per-point probabilities unchanged.

pub mod filters;
pub mod state;

use std::time::Instant;

use crate::error::{SamplingError, SeedError};
use crate::geometry::{sed, squared_norm, Dataset, ReferencePoint};
use crate::instrumentation::{CounterSink, Counters, Phase};
use crate::sampling::{prefix_sums, scan_roulette, search_prefix, strict_select_scan, RandomStream, SamplingMode};
use crate::seed::{NoObserver, SeedObserver, SeedResult, SkipEvent, SkipKind, TraceStep};

pub use filters::{
    centers_separated, norm_outside_bounds, norm_reject_partition, norm_reject_point, radius_skip, weight_skip,
};
pub use state::{Cluster, Partition, Side, SkipCache};

use state::{CenterDistances, PrefixCache};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AccelConfig {
    /// Split clusters by norm and apply the norm bounds.
    pub norm_filter: bool,
    /// Skip center-center distances for provably separated cluster pairs.
    pub center_skip: bool,
    pub sampling: SamplingMode,
    /// Frame for the norms; `None` means the origin.
    pub reference: Option<ReferencePoint>,
    pub trace: bool,
}

impl AccelConfig {
    pub fn tie() -> Self {
        Self::default()
    }

    pub fn tie_norm() -> Self {
        Self {
            norm_filter: true,
            ..Self::default()
        }
    }

    pub fn with_sampling(mut self, sampling: SamplingMode) -> Self {
        self.sampling = sampling;
        self
    }

    pub fn with_center_skip(mut self, on: bool) -> Self {
        self.center_skip = on;
        self
    }
}

/// Runs the accelerated variant with a counting sink and wall-time measurement.
pub fn accel_seed(ds: &Dataset, k: usize, rng: &mut RandomStream, cfg: &AccelConfig) -> Result<SeedResult, SeedError> {
    let mut counters = Counters::default();
    let start = Instant::now();
    let mut result = accel_seed_with(ds, k, rng, cfg, &mut counters, &mut NoObserver)?;
    counters.wall_time_ns = start.elapsed().as_nanos() as u64;
    result.counters = counters;
    Ok(result)
}

/// Accelerated seeding with an explicit sink and observer. The returned
/// `counters` field is left at its default.
pub fn accel_seed_with<S: CounterSink, O: SeedObserver>(
    ds: &Dataset,
    k: usize,
    rng: &mut RandomStream,
    cfg: &AccelConfig,
    sink: &mut S,
    observer: &mut O,
) -> Result<SeedResult, SeedError> {
    let n = ds.n();
    if k == 0 || k > n {
        return Err(SeedError::InvalidK { k, n });
    }
    let mut trace = cfg.trace.then(|| Vec::with_capacity(k));
    let mut seeder = AccelSeeder::new(ds, k, cfg, sink, observer)?;

    let first = seeder.rng_first(rng);
    if let Some(t) = trace.as_mut() {
        t.push(TraceStep {
            chosen: first,
            total_weight: 0.0,
        });
    }
    seeder.init(first);

    while seeder.centers.len() < k {
        let (chosen, total) = seeder.select(rng)?;
        if let Some(t) = trace.as_mut() {
            t.push(TraceStep {
                chosen,
                total_weight: total,
            });
        }
        if seeder.centers.len() + 1 == k {
            // the last center cannot influence any later draw
            seeder.mark_final(chosen);
        } else {
            seeder.add_center(chosen);
        }
    }

    let centers = seeder.centers;
    Ok(SeedResult {
        center_coords: ds.gather(&centers),
        centers,
        trace,
        counters: Counters::default(),
    })
}

/// Incremental driver for the accelerated variant.
///
/// [`accel_seed_with`] is the usual entry point; this type is public so the
/// cluster state can be inspected between steps and centers can be forced.
pub struct AccelSeeder<'a, S: CounterSink, O: SeedObserver> {
    ds: &'a Dataset,
    norm_filter: bool,
    center_skip: bool,
    sampling: SamplingMode,
    sink: S,
    observer: O,

    centers: Vec<usize>,
    w: Vec<f64>,
    /// `ed` to the assigned center; `sqrt(w)` at the time of assignment.
    ed: Vec<f64>,
    norms: Vec<f64>,
    assignment: Vec<u32>,
    is_center: Vec<bool>,
    clusters: Vec<Cluster>,
    prefix: Vec<Option<PrefixCache>>,
    skip: SkipCache,
    center_d: CenterDistances,
}

impl<'a, S: CounterSink, O: SeedObserver> AccelSeeder<'a, S, O> {
    /// Prepares state for up to `k` centers. With the norm filter on, computes
    /// every point's norm in the configured frame (`n` norm evaluations).
    pub fn new(ds: &'a Dataset, k: usize, cfg: &AccelConfig, mut sink: S, observer: O) -> Result<Self, SeedError> {
        let n = ds.n();
        let norms = if cfg.norm_filter {
            let norms: Vec<f64> = match &cfg.reference {
                Some(r) if !r.is_origin() => {
                    if r.dim() != ds.d() {
                        return Err(crate::error::DataError::DimensionMismatch {
                            expected: ds.d(),
                            actual: r.dim(),
                        }
                        .into());
                    }
                    ds.rows().map(|x| sed(x, &r.coords).sqrt()).collect()
                }
                _ => ds.rows().map(|x| squared_norm(x).sqrt()).collect(),
            };
            sink.record_norms(n as u64);
            norms
        } else {
            Vec::new()
        };
        Ok(Self {
            ds,
            norm_filter: cfg.norm_filter,
            center_skip: cfg.center_skip,
            sampling: cfg.sampling,
            sink,
            observer,
            centers: Vec::with_capacity(k),
            w: vec![0.0; n],
            ed: if cfg.norm_filter { vec![0.0; n] } else { Vec::new() },
            norms,
            assignment: vec![0; n],
            is_center: vec![false; n],
            clusters: Vec::with_capacity(k),
            prefix: Vec::with_capacity(k),
            skip: SkipCache::new(if cfg.center_skip { k } else { 0 }),
            center_d: CenterDistances::default(),
        })
    }

    fn rng_first(&mut self, rng: &mut RandomStream) -> usize {
        rng.next_index(self.ds.n())
    }

    pub fn centers(&self) -> &[usize] {
        &self.centers
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn assignment(&self, point: usize) -> usize {
        self.assignment[point] as usize
    }

    pub fn norms(&self) -> Option<&[f64]> {
        self.norm_filter.then_some(self.norms.as_slice())
    }

    pub fn skip_cache(&self) -> &SkipCache {
        &self.skip
    }

    pub fn sink(&self) -> &S {
        &self.sink
    }

    pub fn into_parts(self) -> (S, O) {
        (self.sink, self.observer)
    }

    #[inline]
    fn side_for(&self, point: usize, center: usize) -> Side {
        if self.norm_filter {
            Side::of(self.norms[point], self.norms[center])
        } else {
            Side::Lower
        }
    }

    /// First center: every point joins its cluster.
    pub fn init(&mut self, first: usize) {
        assert!(self.centers.is_empty(), "init called twice");
        let ds = self.ds;
        let c = ds.row(first);
        self.centers.push(first);
        self.is_center[first] = true;
        self.clusters.push(Cluster::new(first));
        self.prefix.push(None);
        self.center_d.push_row(0);

        let n = ds.n();
        for i in 0..n {
            if i != first {
                self.w[i] = sed(ds.row(i), c);
            }
            if self.norm_filter {
                self.ed[i] = self.w[i].sqrt();
            }
            let side = self.side_for(i, first) as usize;
            self.clusters[0].parts[side].members.push(i);
        }
        self.sink.record_point_visits(Phase::Update, (n - 1) as u64);
        self.sink.record_distances((n - 1) as u64);
        for side in 0..2 {
            self.rebuild_partition_stats(0, side);
        }
        self.clusters[0].refresh_totals();
        self.observer.on_weights(&self.centers, &self.w);
    }

    /// Draws the next center. Returns the point and the total weight drawn
    /// against.
    pub fn select(&mut self, rng: &mut RandomStream) -> Result<(usize, f64), SeedError> {
        match self.sampling {
            SamplingMode::Strict => {
                let u = rng.next_uniform();
                let scan = strict_select_scan(&self.w, u)?;
                self.sink.record_point_visits(Phase::Sampling, scan.scanned as u64);
                let total = self.clusters.iter().map(|c| c.weight_sum).sum();
                Ok((scan.index, total))
            }
            SamplingMode::Fast => {
                let total: f64 = self.clusters.iter().map(|c| c.weight_sum).sum();
                if !(total > 0.0) {
                    return Err(SamplingError::DegenerateWeights.into());
                }
                let u1 = rng.next_uniform();
                let u2 = rng.next_uniform();
                let scan = scan_roulette(self.clusters.iter().map(|c| c.weight_sum), u1 * total)
                    .ok_or(SamplingError::DegenerateWeights)?;
                self.sink.record_point_visits(Phase::Sampling, scan.scanned as u64);
                let j = scan.index;

                let generation = self.clusters[j].generation;
                let stale = self.prefix[j].as_ref().is_none_or(|c| c.generation != generation);
                if stale {
                    let cluster = &self.clusters[j];
                    let order: Vec<usize> = cluster.members().collect();
                    let prefix = prefix_sums(order.iter().map(|&i| self.w[i]));
                    self.sink.record_point_visits(Phase::Sampling, order.len() as u64);
                    self.prefix[j] = Some(PrefixCache {
                        generation,
                        order,
                        prefix,
                    });
                }
                let cache = self.prefix[j].as_ref().unwrap();
                let (pos, probes) = search_prefix(&cache.prefix, u2).ok_or(SamplingError::DegenerateWeights)?;
                self.sink.record_point_visits(Phase::Sampling, probes as u64);
                Ok((cache.order[pos], total))
            }
        }
    }

    /// Records the final center without running the update pass.
    pub fn mark_final(&mut self, chosen: usize) {
        self.centers.push(chosen);
        self.is_center[chosen] = true;
        self.w[chosen] = 0.0;
    }

    /// Adds `c_new` as a center and reassigns every point now closer to it.
    pub fn add_center(&mut self, c_new: usize) {
        assert!(!self.is_center[c_new], "point {c_new} is already a center");
        let ds = self.ds;
        let t = self.clusters.len();
        let src = self.assignment[c_new] as usize;
        // radius before the new center leaves; it bounds d(c_new, c_src)
        let r_src = self.clusters[src].radius_sq;

        self.detach(c_new, src);
        self.centers.push(c_new);
        self.is_center[c_new] = true;
        self.w[c_new] = 0.0;
        if self.norm_filter {
            self.ed[c_new] = 0.0;
        }
        self.assignment[c_new] = t as u32;
        if self.center_skip {
            self.center_d.push_row(t);
        }

        let mut moved: [Vec<usize>; 2] = [vec![c_new], Vec::new()];
        let x_new = ds.row(c_new);
        let norm_new = if self.norm_filter { self.norms[c_new] } else { 0.0 };

        for j in 0..t {
            // the cluster's center is examined in every case
            self.sink.record_point_visit(Phase::Update);

            if self.center_skip && j != src && self.pair_separated(src, j, r_src) {
                self.report_cluster_skip(SkipKind::CenterPair, c_new, j, None);
                continue;
            }

            let d_new = sed(x_new, ds.row(self.clusters[j].center));
            self.sink.record_distance();
            if self.center_skip {
                self.center_d.set(t, j, d_new);
            }
            self.visit_cluster(j, c_new, t, d_new, norm_new, &mut moved);
        }

        let mut cluster = Cluster::new(c_new);
        cluster.parts[0].members = std::mem::take(&mut moved[0]);
        cluster.parts[1].members = std::mem::take(&mut moved[1]);
        self.clusters.push(cluster);
        self.prefix.push(None);
        for side in 0..2 {
            self.rebuild_partition_stats(t, side);
        }
        self.clusters[t].refresh_totals();
        self.observer.on_weights(&self.centers, &self.w);
    }

    /// Center-pair rule for target `j` given source `src`. Sets the sticky flag
    /// when the rule first holds.
    fn pair_separated(&mut self, src: usize, j: usize, r_src: f64) -> bool {
        if self.skip.get(src, j) {
            return true;
        }
        match self.center_d.get(src, j) {
            Some(d) if centers_separated(d, r_src, self.clusters[j].radius_sq) => {
                self.skip.set(src, j);
                true
            }
            _ => false,
        }
    }

    fn detach(&mut self, point: usize, cluster: usize) {
        for part in &mut self.clusters[cluster].parts {
            if let Some(pos) = part.members.iter().position(|&i| i == point) {
                part.members.swap_remove(pos);
                return;
            }
        }
        unreachable!("point {point} missing from cluster {cluster}");
    }

    fn report_cluster_skip(&mut self, kind: SkipKind, c_new: usize, j: usize, side: Option<usize>) {
        let cluster = &self.clusters[j];
        match side {
            Some(s) => self.observer.on_skip(SkipEvent {
                kind,
                new_center: c_new,
                cluster: j,
                points: &cluster.parts[s].members,
                weights: &self.w,
            }),
            None => {
                for part in &cluster.parts {
                    self.observer.on_skip(SkipEvent {
                        kind,
                        new_center: c_new,
                        cluster: j,
                        points: &part.members,
                        weights: &self.w,
                    });
                }
            }
        }
    }

    fn visit_cluster(
        &mut self,
        j: usize,
        c_new: usize,
        t: usize,
        d_new: f64,
        norm_new: f64,
        moved: &mut [Vec<usize>; 2],
    ) {
        let ds = self.ds;
        let x_new = ds.row(c_new);
        let mut touched = false;

        for side in 0..2 {
            let part = &self.clusters[j].parts[side];
            if part.members.is_empty() {
                continue;
            }
            // without norms both sides share one radius, so this is the
            // cluster-level test
            if radius_skip(part.radius_sq, d_new) {
                self.report_cluster_skip(SkipKind::ClusterRadius, c_new, j, Some(side));
                continue;
            }
            if self.norm_filter && norm_reject_partition(part, norm_new) {
                self.report_cluster_skip(SkipKind::PartitionNorm, c_new, j, Some(side));
                continue;
            }
            touched = true;

            let mut members = std::mem::take(&mut self.clusters[j].parts[side].members);
            let mut stats = Partition::empty();
            let mut examined = 0u64;
            let mut computed = 0u64;
            let mut pos = 0;
            while pos < members.len() {
                let i = members[pos];
                if self.is_center[i] {
                    pos += 1;
                    continue;
                }
                examined += 1;
                let wi = self.w[i];
                let skipped = if weight_skip(wi, d_new) {
                    Some(SkipKind::PointWeight)
                } else if self.norm_filter && norm_reject_point(self.norms[i], norm_new, wi) {
                    Some(SkipKind::PointNorm)
                } else {
                    None
                };
                if let Some(kind) = skipped {
                    self.observer.on_skip(SkipEvent {
                        kind,
                        new_center: c_new,
                        cluster: j,
                        points: std::slice::from_ref(&members[pos]),
                        weights: &self.w,
                    });
                } else {
                    let dn = sed(ds.row(i), x_new);
                    computed += 1;
                    if wi > dn {
                        self.w[i] = dn;
                        self.assignment[i] = t as u32;
                        if self.norm_filter {
                            self.ed[i] = dn.sqrt();
                        }
                        let new_side = self.side_for(i, c_new) as usize;
                        moved[new_side].push(i);
                        members.swap_remove(pos);
                        continue;
                    }
                }
                self.accumulate(&mut stats, i);
                pos += 1;
            }
            self.sink.record_point_visits(Phase::Update, examined);
            self.sink.record_distances(computed);

            let part = &mut self.clusters[j].parts[side];
            stats.members = members;
            *part = stats;
        }

        if touched {
            let cluster = &mut self.clusters[j];
            cluster.refresh_totals();
            cluster.generation += 1;
        }
    }

    #[inline]
    fn accumulate(&self, stats: &mut Partition, i: usize) {
        let wi = self.w[i];
        if wi > stats.radius_sq {
            stats.radius_sq = wi;
        }
        stats.weight_sum += wi;
        if self.norm_filter {
            let lo = self.norms[i] - self.ed[i];
            let hi = self.norms[i] + self.ed[i];
            if lo < stats.lower {
                stats.lower = lo;
            }
            if hi > stats.upper {
                stats.upper = hi;
            }
        }
    }

    /// Recomputes radius, sum and bounds of one partition from scratch.
    fn rebuild_partition_stats(&mut self, j: usize, side: usize) {
        let members = std::mem::take(&mut self.clusters[j].parts[side].members);
        let mut stats = Partition::empty();
        stats.reset_stats();
        for &i in &members {
            if !self.is_center[i] {
                self.accumulate(&mut stats, i);
            }
        }
        stats.members = members;
        self.clusters[j].parts[side] = stats;
    }
}
