//! Types shared by the seeding variants.

use serde::{Deserialize, Serialize};

use crate::instrumentation::Counters;

/// Per-iteration snapshot kept when tracing is enabled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub chosen: usize,
    /// Total weight the draw was made against (0 for the uniform first draw).
    pub total_weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeedResult {
    /// Chosen point indices, in selection order.
    pub centers: Vec<usize>,
    /// `k x d` row-major coordinates of the centers.
    pub center_coords: Vec<f64>,
    pub trace: Option<Vec<TraceStep>>,
    pub counters: Counters,
}

/// Which test allowed a piece of work to be skipped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkipKind {
    /// Cluster (or partition) radius against the center-center distance.
    ClusterRadius,
    /// Point weight against the center-center distance.
    PointWeight,
    /// Point norm against the new center's norm.
    PointNorm,
    /// New center's norm outside a partition's norm bounds.
    PartitionNorm,
    /// Center-center distance never computed (separation rule).
    CenterPair,
}

/// A skip decision, with enough context for a brute-force check.
#[derive(Debug, Clone, Copy)]
pub struct SkipEvent<'a> {
    pub kind: SkipKind,
    /// Point index of the new center.
    pub new_center: usize,
    /// Cluster the skipped work belonged to.
    pub cluster: usize,
    /// Points whose reassignment was ruled out.
    pub points: &'a [usize],
    /// Current weights of all points.
    pub weights: &'a [f64],
}

/// Hooks called during a seeding run. All methods default to no-ops.
pub trait SeedObserver {
    /// Called after each weight update, before the next draw. `centers` holds
    /// every center chosen so far and `weights` the nearest-center SEDs.
    fn on_weights(&mut self, _centers: &[usize], _weights: &[f64]) {}

    fn on_skip(&mut self, _event: SkipEvent<'_>) {}
}

#[derive(Debug, Default, Clone, Copy)]
pub struct NoObserver;

impl SeedObserver for NoObserver {}

impl<O: SeedObserver + ?Sized> SeedObserver for &mut O {
    fn on_weights(&mut self, centers: &[usize], weights: &[f64]) {
        (**self).on_weights(centers, weights)
    }

    fn on_skip(&mut self, event: SkipEvent<'_>) {
        (**self).on_skip(event)
    }
}
