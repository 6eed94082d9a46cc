//! Exact k-means++ seeding.
//!
//! Three interchangeable variants produce the same center distribution:
//!
//! - [`standard_seed`]: plain D² sampling, one distance per point per center;
//! - [`accel_seed`] with [`AccelConfig::tie`]: clusters with radii skip points
//!   that provably keep their nearest center;
//! - [`accel_seed`] with [`AccelConfig::tie_norm`]: clusters are further split
//!   by norm, adding norm-bound filters.
//!
//! Every variant reports how many points it examined and how many distances
//! it computed through a [`CounterSink`].

pub mod accel;
pub mod analysis;
pub mod error;
pub mod geometry;
pub mod instrumentation;
pub mod sampling;
pub mod seed;
pub mod standard;

pub use accel::{accel_seed, accel_seed_with, AccelConfig, AccelSeeder};
pub use analysis::{best_reference, candidate_references, norm_variance_pct, NormVarianceReport};
pub use error::{DataError, SamplingError, SeedError};
pub use geometry::{ed, sed, sed_via_dot, shift_frame, Dataset, ReferenceKind, ReferencePoint};
pub use instrumentation::{ratio_report, CounterSink, Counters, MeanCounters, NullSink, Phase, RatioReport};
pub use sampling::{RandomStream, SamplingMode, WeightVector};
pub use seed::{NoObserver, SeedObserver, SeedResult, SkipEvent, SkipKind, TraceStep};
pub use standard::{standard_seed, standard_seed_with, StandardConfig};
