use serde::Serialize;

/// Side of a cluster a point sits on, relative to the center's norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    /// `|x| <= |c|`. Also the only side used without the norm filter.
    Lower = 0,
    Upper = 1,
}

impl Side {
    #[inline]
    pub fn of(norm_point: f64, norm_center: f64) -> Side {
        if norm_point <= norm_center {
            Side::Lower
        } else {
            Side::Upper
        }
    }
}

/// One half of a cluster, or the whole cluster when norms are not used.
///
/// `lower`/`upper` are the min of `|x| - ed(x, c)` and the max of
/// `|x| + ed(x, c)` over non-center members; both are only maintained when
/// the norm filter is on.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Partition {
    pub members: Vec<usize>,
    pub radius_sq: f64,
    pub weight_sum: f64,
    pub lower: f64,
    pub upper: f64,
}

impl Partition {
    pub fn empty() -> Self {
        Self {
            members: Vec::new(),
            radius_sq: 0.0,
            weight_sum: 0.0,
            lower: f64::INFINITY,
            upper: f64::NEG_INFINITY,
        }
    }

    pub(crate) fn reset_stats(&mut self) {
        self.radius_sq = 0.0;
        self.weight_sum = 0.0;
        self.lower = f64::INFINITY;
        self.upper = f64::NEG_INFINITY;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cluster {
    /// Point index of the center.
    pub center: usize,
    pub parts: [Partition; 2],
    /// Max member weight over both partitions.
    pub radius_sq: f64,
    /// Sum of member weights over both partitions.
    pub weight_sum: f64,
    /// Bumped whenever membership or member weights may have changed.
    pub generation: u64,
}

impl Cluster {
    pub(crate) fn new(center: usize) -> Self {
        Self {
            center,
            parts: [Partition::empty(), Partition::empty()],
            radius_sq: 0.0,
            weight_sum: 0.0,
            generation: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.parts[0].members.len() + self.parts[1].members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.parts[0].members.iter().chain(&self.parts[1].members).copied()
    }

    pub(crate) fn refresh_totals(&mut self) {
        self.radius_sq = self.parts[0].radius_sq.max(self.parts[1].radius_sq);
        self.weight_sum = self.parts[0].weight_sum + self.parts[1].weight_sum;
    }
}

/// Per-cluster cumulative weights for the point-level draw, valid while the
/// cluster's generation is unchanged.
#[derive(Debug, Clone)]
pub(crate) struct PrefixCache {
    pub generation: u64,
    pub order: Vec<usize>,
    pub prefix: Vec<f64>,
}

/// "Permanently separated" flags for ordered (source, target) cluster pairs.
#[derive(Debug, Clone)]
pub struct SkipCache {
    capacity: usize,
    bits: Vec<u64>,
}

impl SkipCache {
    pub fn new(capacity: usize) -> Self {
        let words = (capacity * capacity).div_ceil(64);
        Self {
            capacity,
            bits: vec![0; words],
        }
    }

    #[inline]
    fn slot(&self, source: usize, target: usize) -> (usize, u64) {
        debug_assert!(source < self.capacity && target < self.capacity);
        let bit = source * self.capacity + target;
        (bit / 64, 1u64 << (bit % 64))
    }

    #[inline]
    pub fn get(&self, source: usize, target: usize) -> bool {
        let (word, mask) = self.slot(source, target);
        self.bits[word] & mask != 0
    }

    /// Flags are never cleared within a run.
    #[inline]
    pub fn set(&mut self, source: usize, target: usize) {
        let (word, mask) = self.slot(source, target);
        self.bits[word] |= mask;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// Center-center SEDs computed so far (lower triangle, NaN = unknown).
#[derive(Debug, Clone, Default)]
pub(crate) struct CenterDistances {
    tri: Vec<f64>,
}

impl CenterDistances {
    #[inline]
    fn index(a: usize, b: usize) -> usize {
        let (hi, lo) = if a > b { (a, b) } else { (b, a) };
        hi * (hi - 1) / 2 + lo
    }

    /// Makes room for the row of a newly created cluster `t`.
    pub fn push_row(&mut self, t: usize) {
        self.tri.resize(self.tri.len() + t, f64::NAN);
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> Option<f64> {
        let v = self.tri[Self::index(a, b)];
        (!v.is_nan()).then_some(v)
    }

    #[inline]
    pub fn set(&mut self, a: usize, b: usize, value: f64) {
        let idx = Self::index(a, b);
        self.tri[idx] = value;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn skip_cache_flags_stick() {
        let mut c = SkipCache::new(10);
        assert!(!c.get(3, 7));
        c.set(3, 7);
        assert!(c.get(3, 7));
        assert!(!c.get(7, 3));
        c.set(9, 9);
        assert_eq!(c.count(), 2);
    }

    #[test]
    fn center_distances_are_symmetric_lookups() {
        let mut cd = CenterDistances::default();
        for t in 0..5 {
            cd.push_row(t);
        }
        assert_eq!(cd.get(3, 1), None);
        cd.set(3, 1, 2.5);
        assert_eq!(cd.get(1, 3), Some(2.5));
        cd.set(0, 4, 1.0);
        assert_eq!(cd.get(4, 0), Some(1.0));
        assert_eq!(cd.get(2, 0), None);
    }

    #[test]
    fn side_split() {
        assert_eq!(Side::of(1.0, 1.0), Side::Lower);
        assert_eq!(Side::of(1.0 + 1e-12, 1.0), Side::Upper);
    }
}
