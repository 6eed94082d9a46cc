//! Distance and norm kernels.
//!
//! All hot-path comparisons happen on squared Euclidean distances (SED).
//! Square roots are only taken where a true metric is needed, i.e. for the
//! norm bounds of the accelerated variant and the center-pair skip rule.

use serde::{Deserialize, Serialize};

use crate::error::DataError;
use crate::instrumentation::CounterSink;

/// Squared Euclidean distance, summed left to right.
#[inline]
pub fn sed(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    let mut acc = 0.0;
    for (a, b) in x.iter().zip(y) {
        let diff = a - b;
        acc += diff * diff;
    }
    acc
}

/// [`sed`] with the dimension contract checked.
pub fn checked_sed(x: &[f64], y: &[f64]) -> Result<f64, DataError> {
    if x.len() != y.len() {
        return Err(DataError::DimensionMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    Ok(sed(x, y))
}

/// Euclidean distance.
#[inline]
pub fn ed(x: &[f64], y: &[f64]) -> f64 {
    sed(x, y).sqrt()
}

pub fn checked_ed(x: &[f64], y: &[f64]) -> Result<f64, DataError> {
    checked_sed(x, y).map(f64::sqrt)
}

#[inline]
pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

#[inline]
pub fn squared_norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// SED from squared norms and a dot product: `|x|^2 + |y|^2 - 2 x.y`.
///
/// Cancellation can push the result slightly below zero; it is clamped.
#[inline]
pub fn sed_via_dot(x_sqnorm: f64, y_sqnorm: f64, dot_xy: f64) -> f64 {
    let v = x_sqnorm + y_sqnorm - 2.0 * dot_xy;
    if v < 0.0 {
        0.0
    } else {
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceKind {
    Origin,
    Mean,
    Median,
    PositiveCorner,
    MeanNormPoint,
    Explicit,
}

impl ReferenceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ReferenceKind::Origin => "origin",
            ReferenceKind::Mean => "mean",
            ReferenceKind::Median => "median",
            ReferenceKind::PositiveCorner => "positive-corner",
            ReferenceKind::MeanNormPoint => "mean-norm-point",
            ReferenceKind::Explicit => "explicit",
        }
    }
}

impl std::str::FromStr for ReferenceKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "origin" => ReferenceKind::Origin,
            "mean" => ReferenceKind::Mean,
            "median" => ReferenceKind::Median,
            "positive-corner" | "positive" => ReferenceKind::PositiveCorner,
            "mean-norm-point" | "mean-norm" => ReferenceKind::MeanNormPoint,
            "explicit" => ReferenceKind::Explicit,
            other => return Err(format!("unknown reference kind '{other}'")),
        })
    }
}

/// Origin of the frame in which norms are measured.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferencePoint {
    pub kind: ReferenceKind,
    pub coords: Vec<f64>,
}

impl ReferencePoint {
    pub fn origin(d: usize) -> Self {
        Self {
            kind: ReferenceKind::Origin,
            coords: vec![0.0; d],
        }
    }

    pub fn explicit(coords: Vec<f64>) -> Self {
        Self {
            kind: ReferenceKind::Explicit,
            coords,
        }
    }

    pub fn is_origin(&self) -> bool {
        self.coords.iter().all(|&c| c == 0.0)
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// `n` points in `d` dimensions, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    n: usize,
    d: usize,
    data: Vec<f64>,
    point_ids: Vec<usize>,
    squared_norms: Option<Vec<f64>>,
    reference: ReferencePoint,
}

impl Dataset {
    /// Builds a dataset from a flat row-major buffer. Point ids are `0..n`.
    pub fn new(d: usize, data: Vec<f64>) -> Result<Self, DataError> {
        if d == 0 {
            return Err(DataError::Empty { n: 0, d });
        }
        if data.len() % d != 0 {
            return Err(DataError::Ragged { len: data.len(), d });
        }
        let n = data.len() / d;
        Self::with_ids(d, data, (0..n).collect())
    }

    pub fn with_ids(d: usize, data: Vec<f64>, point_ids: Vec<usize>) -> Result<Self, DataError> {
        if d == 0 {
            return Err(DataError::Empty { n: 0, d });
        }
        if data.len() % d != 0 {
            return Err(DataError::Ragged { len: data.len(), d });
        }
        let n = data.len() / d;
        if n == 0 {
            return Err(DataError::Empty { n, d });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(DataError::NonFinite {
                point: pos / d,
                coord: pos % d,
                value: data[pos],
            });
        }
        if point_ids.len() != n || point_ids.windows(2).any(|w| w[0] >= w[1]) {
            return Err(DataError::BadPointIds);
        }
        Ok(Self {
            n,
            d,
            data,
            point_ids,
            squared_norms: None,
            reference: ReferencePoint::origin(d),
        })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self, DataError> {
        let d = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * d);
        for row in rows {
            let row = row.as_ref();
            if row.len() != d {
                return Err(DataError::DimensionMismatch {
                    expected: d,
                    actual: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        if rows.is_empty() {
            return Err(DataError::Empty { n: 0, d });
        }
        Self::new(d, data)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.d)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn point_ids(&self) -> &[usize] {
        &self.point_ids
    }

    pub fn squared_norms(&self) -> Option<&[f64]> {
        self.squared_norms.as_deref()
    }

    /// Frame the coordinates (and cached norms) are expressed in.
    pub fn reference(&self) -> &ReferencePoint {
        &self.reference
    }

    /// Copies the coordinates of the given points into a `len x d` matrix.
    pub fn gather(&self, indices: &[usize]) -> Vec<f64> {
        let mut out = Vec::with_capacity(indices.len() * self.d);
        for &i in indices {
            out.extend_from_slice(self.row(i));
        }
        out
    }
}

/// Translates every point by `-reference`, so the reference sits at the origin.
///
/// Pairwise distances are preserved; squared norms are recomputed in the new
/// frame.
pub fn shift_frame(ds: &Dataset, reference: &ReferencePoint) -> Result<Dataset, DataError> {
    if reference.dim() != ds.d {
        return Err(DataError::DimensionMismatch {
            expected: ds.d,
            actual: reference.dim(),
        });
    }
    let data = if reference.is_origin() {
        ds.data.clone()
    } else {
        ds.rows()
            .flat_map(|row| row.iter().zip(&reference.coords).map(|(x, r)| x - r))
            .collect()
    };
    let squared_norms = data.chunks_exact(ds.d).map(squared_norm).collect();
    Ok(Dataset {
        n: ds.n,
        d: ds.d,
        data,
        point_ids: ds.point_ids.clone(),
        squared_norms: Some(squared_norms),
        reference: reference.clone(),
    })
}

/// Populates the squared-norm cache in the dataset's current frame.
pub fn precompute_norms<S: CounterSink>(mut ds: Dataset, sink: &mut S) -> Dataset {
    let norms: Vec<f64> = ds.rows().map(squared_norm).collect();
    sink.record_norms(norms.len() as u64);
    ds.squared_norms = Some(norms);
    ds
}
