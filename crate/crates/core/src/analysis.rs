//! Reference-frame analysis for the norm filter.
//!
//! The norm filter separates points by `|x - ref|`; it is useless when every
//! point sits at the same distance from the reference. The score used here is
//! `100 * Var(y) / E[y^2]` with `y_i = |x_i - ref|` (population variance),
//! which is dimensionless, scale invariant, and lies in `[0, 100]`.

use serde::{Deserialize, Serialize};

use crate::geometry::{sed, squared_norm, Dataset, ReferenceKind, ReferencePoint};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormVarianceEntry {
    pub kind: ReferenceKind,
    pub variance_pct: f64,
    pub coords: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormVarianceReport {
    pub entries: Vec<NormVarianceEntry>,
}

impl NormVarianceReport {
    /// Index of the highest score; ties go to the earliest entry.
    pub fn best_index(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, e) in self.entries.iter().enumerate() {
            if best.is_none_or(|b| e.variance_pct > self.entries[b].variance_pct) {
                best = Some(i);
            }
        }
        best
    }
}

/// Norm-variance percentage of `ds` seen from `reference`.
pub fn norm_variance_pct(ds: &Dataset, reference: &ReferencePoint) -> f64 {
    let norms: Vec<f64> = if reference.is_origin() {
        ds.rows().map(|x| squared_norm(x).sqrt()).collect()
    } else {
        ds.rows().map(|x| sed(x, &reference.coords).sqrt()).collect()
    };
    variance_pct_of(&norms)
}

fn variance_pct_of(y: &[f64]) -> f64 {
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    let mean_sq = y.iter().map(|v| v * v).sum::<f64>() / n;
    if mean_sq == 0.0 {
        return 0.0;
    }
    let var = y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (100.0 * var / mean_sq).clamp(0.0, 100.0)
}

/// The five candidate frames, in fixed order: origin, mean, median,
/// positive corner, mean-norm point.
pub fn candidate_references(ds: &Dataset) -> Vec<ReferencePoint> {
    let (n, d) = (ds.n(), ds.d());

    let mut mean = vec![0.0; d];
    for row in ds.rows() {
        for (m, x) in mean.iter_mut().zip(row) {
            *m += x;
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }

    let mut median = Vec::with_capacity(d);
    let mut corner = Vec::with_capacity(d);
    let mut column = Vec::with_capacity(n);
    for j in 0..d {
        column.clear();
        column.extend(ds.rows().map(|r| r[j]));
        column.sort_unstable_by(f64::total_cmp);
        median.push(column[(n - 1) / 2]);
        corner.push(column[0]);
    }

    let norms: Vec<f64> = ds.rows().map(|x| squared_norm(x).sqrt()).collect();
    let mean_norm = norms.iter().sum::<f64>() / n as f64;
    let mut closest = 0;
    for (i, v) in norms.iter().enumerate() {
        if (v - mean_norm).abs() < (norms[closest] - mean_norm).abs() {
            closest = i;
        }
    }

    vec![
        ReferencePoint::origin(d),
        ReferencePoint {
            kind: ReferenceKind::Mean,
            coords: mean,
        },
        ReferencePoint {
            kind: ReferenceKind::Median,
            coords: median,
        },
        ReferencePoint {
            kind: ReferenceKind::PositiveCorner,
            coords: corner,
        },
        ReferencePoint {
            kind: ReferenceKind::MeanNormPoint,
            coords: ds.row(closest).to_vec(),
        },
    ]
}

/// Scores the given candidates.
pub fn score_references(ds: &Dataset, candidates: &[ReferencePoint]) -> NormVarianceReport {
    NormVarianceReport {
        entries: candidates
            .iter()
            .map(|r| NormVarianceEntry {
                kind: r.kind,
                variance_pct: norm_variance_pct(ds, r),
                coords: r.coords.clone(),
            })
            .collect(),
    }
}

/// Highest-scoring candidate frame together with the full report.
pub fn best_reference(ds: &Dataset) -> (ReferencePoint, NormVarianceReport) {
    let candidates = candidate_references(ds);
    let report = score_references(ds, &candidates);
    let best = report.best_index().unwrap_or(0);
    (candidates[best].clone(), report)
}
