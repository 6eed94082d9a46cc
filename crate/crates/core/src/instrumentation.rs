//! Intrinsic cost counters.
//!
//! Accounting rules:
//! - an update pass counts every non-center point it looks at, plus one visit
//!   per existing cluster whose center is compared against the new center
//!   (whether or not that comparison needed a distance);
//! - sampling counts entries scanned, clusters included in two-step mode;
//! - distances include center-center evaluations;
//! - norms are counted once, in the first iteration of the norm variant.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Update,
    Sampling,
}

/// Receiver for cost events emitted by the seeding variants.
pub trait CounterSink {
    fn record_point_visits(&mut self, phase: Phase, count: u64);
    fn record_distances(&mut self, count: u64);
    fn record_norms(&mut self, count: u64);

    #[inline]
    fn record_point_visit(&mut self, phase: Phase) {
        self.record_point_visits(phase, 1);
    }

    #[inline]
    fn record_distance(&mut self) {
        self.record_distances(1);
    }

    #[inline]
    fn record_norm(&mut self) {
        self.record_norms(1);
    }
}

/// Sink that discards every event.
#[derive(Debug, Default, Clone, Copy)]
pub struct NullSink;

impl CounterSink for NullSink {
    #[inline(always)]
    fn record_point_visits(&mut self, _: Phase, _: u64) {}
    #[inline(always)]
    fn record_distances(&mut self, _: u64) {}
    #[inline(always)]
    fn record_norms(&mut self, _: u64) {}
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    pub points_examined_update: u64,
    pub points_examined_sampling: u64,
    pub distances_computed: u64,
    pub norms_computed: u64,
    pub wall_time_ns: u64,
}

impl Counters {
    /// Both examined-point metrics together.
    pub fn points_examined(&self) -> u64 {
        self.points_examined_update + self.points_examined_sampling
    }
}

impl CounterSink for Counters {
    #[inline]
    fn record_point_visits(&mut self, phase: Phase, count: u64) {
        match phase {
            Phase::Update => self.points_examined_update += count,
            Phase::Sampling => self.points_examined_sampling += count,
        }
    }

    #[inline]
    fn record_distances(&mut self, count: u64) {
        self.distances_computed += count;
    }

    #[inline]
    fn record_norms(&mut self, count: u64) {
        self.norms_computed += count;
    }
}

impl<S: CounterSink + ?Sized> CounterSink for &mut S {
    #[inline]
    fn record_point_visits(&mut self, phase: Phase, count: u64) {
        (**self).record_point_visits(phase, count)
    }
    #[inline]
    fn record_distances(&mut self, count: u64) {
        (**self).record_distances(count)
    }
    #[inline]
    fn record_norms(&mut self, count: u64) {
        (**self).record_norms(count)
    }
}

/// Mean of a set of counter values, one field per metric.
#[derive(Debug, Default, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanCounters {
    pub points_examined_update: f64,
    pub points_examined_sampling: f64,
    pub distances_computed: f64,
    pub norms_computed: f64,
    pub wall_time_ns: f64,
}

impl MeanCounters {
    /// Arithmetic mean over repetitions. Empty input yields all zeros.
    pub fn from_runs<'a, I: IntoIterator<Item = &'a Counters>>(runs: I) -> Self {
        let mut sum = [0.0f64; 5];
        let mut count = 0usize;
        for c in runs {
            sum[0] += c.points_examined_update as f64;
            sum[1] += c.points_examined_sampling as f64;
            sum[2] += c.distances_computed as f64;
            sum[3] += c.norms_computed as f64;
            sum[4] += c.wall_time_ns as f64;
            count += 1;
        }
        if count == 0 {
            return Self::default();
        }
        let m = count as f64;
        Self {
            points_examined_update: sum[0] / m,
            points_examined_sampling: sum[1] / m,
            distances_computed: sum[2] / m,
            norms_computed: sum[3] / m,
            wall_time_ns: sum[4] / m,
        }
    }
}

impl From<&Counters> for MeanCounters {
    fn from(c: &Counters) -> Self {
        MeanCounters::from_runs(std::iter::once(c))
    }
}

/// Percent-of-standard for every count metric, plus the wall-time speedup.
///
/// `None` marks a ratio whose denominator was zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub points_examined_update_pct: Option<f64>,
    pub points_examined_sampling_pct: Option<f64>,
    pub points_examined_pct: Option<f64>,
    pub distances_computed_pct: Option<f64>,
    /// Standard mean time divided by accelerated mean time.
    pub speedup: Option<f64>,
}

fn pct(num: f64, den: f64) -> Option<f64> {
    (den != 0.0).then(|| 100.0 * num / den)
}

/// Compares an accelerated run (or mean of runs) against the standard one.
///
/// Distances include the norm computations of the norm variant, matching
/// the way the extra first-iteration cost is charged.
pub fn ratio_report(accel: &MeanCounters, standard: &MeanCounters) -> RatioReport {
    RatioReport {
        points_examined_update_pct: pct(accel.points_examined_update, standard.points_examined_update),
        points_examined_sampling_pct: pct(accel.points_examined_sampling, standard.points_examined_sampling),
        points_examined_pct: pct(
            accel.points_examined_update + accel.points_examined_sampling,
            standard.points_examined_update + standard.points_examined_sampling,
        ),
        distances_computed_pct: pct(
            accel.distances_computed + accel.norms_computed,
            standard.distances_computed + standard.norms_computed,
        ),
        speedup: (accel.wall_time_ns != 0.0).then(|| standard.wall_time_ns / accel.wall_time_ns),
    }
}
