//! Fixed-width histograms and sparse integer count tables.
//!
//! Counts are kept as integers so that merging partial results from
//! independent runs is exact and order-independent.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum HistError {
    #[error("bin width must be positive and finite, got {0}")]
    BadBinWidth(f64),
    #[error("histogram must have at least one bin")]
    NoBins,
    #[error("incompatible binning: {0}")]
    Incompatible(String),
}

/// Fixed-width binned counts over a real-valued observable.
///
/// The bin holding a value `v` is `floor((v - lower_edge) / bin_width)`;
/// values outside `[lower_edge, lower_edge + n_bins * bin_width)` land in
/// the underflow/overflow counters and are excluded from densities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    lower_edge: f64,
    bin_width: f64,
    counts: Vec<u64>,
    underflow: u64,
    overflow: u64,
}

impl Histogram {
    pub fn new(lower_edge: f64, bin_width: f64, n_bins: usize) -> Result<Self, HistError> {
        if !(bin_width > 0.0 && bin_width.is_finite()) {
            return Err(HistError::BadBinWidth(bin_width));
        }
        if n_bins == 0 {
            return Err(HistError::NoBins);
        }
        Ok(Histogram {
            lower_edge,
            bin_width,
            counts: vec![0; n_bins],
            underflow: 0,
            overflow: 0,
        })
    }

    #[inline]
    pub fn bin_index(&self, v: f64) -> Option<usize> {
        let x = (v - self.lower_edge) / self.bin_width;
        if x < 0.0 {
            return None;
        }
        let k = x as usize;
        (k < self.counts.len()).then_some(k)
    }

    #[inline]
    pub fn record(&mut self, v: f64) {
        self.record_weighted(v, 1);
    }

    /// Adds `weight` counts to the bin holding `v`.
    #[inline]
    pub fn record_weighted(&mut self, v: f64, weight: u64) {
        let x = (v - self.lower_edge) / self.bin_width;
        if x < 0.0 {
            self.underflow += weight;
            return;
        }
        let k = x as usize;
        if k < self.counts.len() {
            self.counts[k] += weight;
        } else {
            self.overflow += weight;
        }
    }

    pub fn lower_edge(&self) -> f64 {
        self.lower_edge
    }

    pub fn bin_width(&self) -> f64 {
        self.bin_width
    }

    pub fn n_bins(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn underflow(&self) -> u64 {
        self.underflow
    }

    pub fn overflow(&self) -> u64 {
        self.overflow
    }

    /// Total count including under/overflow.
    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.underflow + self.overflow
    }

    /// Count inside the binned range only.
    pub fn total_in_range(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn bin_center(&self, k: usize) -> f64 {
        self.lower_edge + (k as f64 + 0.5) * self.bin_width
    }

    /// Probability density at bin `k`, normalized over the total count
    /// (including under/overflow mass, which therefore integrates to < 1
    /// when present).
    pub fn density(&self, k: usize) -> f64 {
        let total = self.total();
        if total == 0 {
            return 0.0;
        }
        self.counts[k] as f64 / (total as f64 * self.bin_width)
    }

    /// All densities; same normalization as [`Histogram::density`].
    pub fn densities(&self) -> Vec<f64> {
        let total = self.total();
        if total == 0 {
            return vec![0.0; self.counts.len()];
        }
        let norm = 1.0 / (total as f64 * self.bin_width);
        self.counts.iter().map(|&c| c as f64 * norm).collect()
    }

    /// (bin center, density) pairs for non-empty bins.
    pub fn density_points(&self) -> Vec<(f64, f64)> {
        let total = self.total();
        if total == 0 {
            return Vec::new();
        }
        let norm = 1.0 / (total as f64 * self.bin_width);
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(k, &c)| (self.bin_center(k), c as f64 * norm))
            .collect()
    }

    pub fn same_binning(&self, other: &Self) -> bool {
        self.lower_edge == other.lower_edge
            && self.bin_width == other.bin_width
            && self.counts.len() == other.counts.len()
    }

    /// Count-wise sum; exact, commutative and associative.
    pub fn merge(&mut self, other: &Self) -> Result<(), HistError> {
        if !self.same_binning(other) {
            return Err(HistError::Incompatible(format!(
                "lower {} vs {}, width {} vs {}, bins {} vs {}",
                self.lower_edge,
                other.lower_edge,
                self.bin_width,
                other.bin_width,
                self.counts.len(),
                other.counts.len()
            )));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.underflow += other.underflow;
        self.overflow += other.overflow;
        Ok(())
    }
}

/// Sparse counts over non-negative integers (avalanche sizes, persistence
/// times). Small values use a dense array, the tail spills into a sorted map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountTable {
    dense: Vec<u64>,
    sparse: std::collections::BTreeMap<u64, u64>,
    total: u64,
    sum: u128,
}

impl CountTable {
    pub const DEFAULT_DENSE: usize = 1 << 16;

    pub fn new() -> Self {
        Self::with_dense_limit(Self::DEFAULT_DENSE)
    }

    pub fn with_dense_limit(dense_limit: usize) -> Self {
        CountTable {
            dense: vec![0; dense_limit],
            sparse: std::collections::BTreeMap::new(),
            total: 0,
            sum: 0,
        }
    }

    #[inline]
    pub fn add(&mut self, value: u64) {
        self.add_count(value, 1);
    }

    #[inline]
    pub fn add_count(&mut self, value: u64, count: u64) {
        if (value as usize) < self.dense.len() {
            self.dense[value as usize] += count;
        } else {
            *self.sparse.entry(value).or_insert(0) += count;
        }
        self.total += count;
        self.sum += value as u128 * count as u128;
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Sum of all recorded values.
    pub fn sum(&self) -> u128 {
        self.sum
    }

    pub fn mean(&self) -> f64 {
        if self.total == 0 {
            return f64::NAN;
        }
        self.sum as f64 / self.total as f64
    }

    pub fn count_of(&self, value: u64) -> u64 {
        if (value as usize) < self.dense.len() {
            self.dense[value as usize]
        } else {
            self.sparse.get(&value).copied().unwrap_or(0)
        }
    }

    pub fn max_value(&self) -> Option<u64> {
        if let Some((&k, _)) = self.sparse.iter().next_back() {
            return Some(k);
        }
        self.dense
            .iter()
            .rposition(|&c| c > 0)
            .map(|k| k as u64)
    }

    /// Sorted (value, count) pairs over non-empty entries.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.dense
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(v, &c)| (v as u64, c))
            .chain(self.sparse.iter().map(|(&v, &c)| (v, c)))
    }

    pub fn merge(&mut self, other: &Self) {
        // Dense prefixes may differ in length; route through add_count which
        // keeps total/sum consistent.
        for (v, c) in other.iter() {
            self.add_count(v, c);
        }
    }

    /// Probability per unit value in geometric bins of `per_decade` bins per
    /// decade, starting at 1. Returns (geometric bin center, density).
    /// Empty bins are skipped.
    pub fn log_binned_density(&self, per_decade: usize) -> Vec<(f64, f64)> {
        if self.total == 0 || per_decade == 0 {
            return Vec::new();
        }
        let max = match self.max_value() {
            Some(m) if m >= 1 => m,
            _ => return Vec::new(),
        };
        let ratio = 10f64.powf(1.0 / per_decade as f64);
        // Integer bin edges [lo, hi): consecutive edges differ by >= 1.
        let mut edges = vec![1u64];
        let mut x = 1.0f64;
        while *edges.last().unwrap() <= max {
            x *= ratio;
            let e = (x.round() as u64).max(edges.last().unwrap() + 1);
            edges.push(e);
        }
        let mut out = Vec::new();
        let mut cursor = self.iter().filter(|&(v, _)| v >= 1).peekable();
        let norm = 1.0 / self.total as f64;
        for w in edges.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let mut in_bin = 0u64;
            while let Some(&(v, c)) = cursor.peek() {
                if v < hi {
                    in_bin += c;
                    cursor.next();
                } else {
                    break;
                }
            }
            if in_bin > 0 {
                let center = (lo as f64 * hi as f64).sqrt();
                let width = (hi - lo) as f64;
                out.push((center, in_bin as f64 * norm / width));
            }
        }
        out
    }

    /// Probability of an exact value.
    pub fn probability(&self, value: u64) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        self.count_of(value) as f64 / self.total as f64
    }
}

impl Default for CountTable {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bin_index_matches_floor_formula() {
        let h = Histogram::new(0.5, 0.25, 8).unwrap();
        assert_eq!(h.bin_index(0.5), Some(0));
        assert_eq!(h.bin_index(0.74), Some(0));
        assert_eq!(h.bin_index(0.75), Some(1));
        assert_eq!(h.bin_index(0.49), None);
        assert_eq!(h.bin_index(2.5), None); // beyond last bin
    }

    #[test]
    fn density_integrates_to_one_without_outliers() {
        let mut h = Histogram::new(0.0, 0.1, 20).unwrap();
        for i in 0..1000 {
            h.record((i % 20) as f64 * 0.1 + 0.05);
        }
        let integral: f64 = h.densities().iter().map(|d| d * h.bin_width()).sum();
        assert!((integral - 1.0).abs() < 1e-12);
        assert_eq!(h.total(), 1000);
    }

    #[test]
    fn overflow_mass_reduces_density_integral() {
        let mut h = Histogram::new(0.0, 0.1, 10).unwrap();
        for _ in 0..75 {
            h.record(0.5);
        }
        for _ in 0..25 {
            h.record(5.0);
        }
        let integral: f64 = h.densities().iter().map(|d| d * h.bin_width()).sum();
        assert!((integral - 0.75).abs() < 1e-12);
        assert_eq!(h.overflow(), 25);
    }

    #[test]
    fn merge_is_count_wise_sum() {
        let mut a = Histogram::new(0.0, 1.0, 4).unwrap();
        let mut b = a.clone();
        a.record(0.5);
        a.record(2.5);
        b.record(2.5);
        b.record(-1.0);
        let mut merged = a.clone();
        merged.merge(&b).unwrap();
        assert_eq!(merged.counts(), &[1, 0, 2, 0]);
        assert_eq!(merged.underflow(), 1);
        // Commutativity on integer counts is bit-exact.
        let mut other = b.clone();
        other.merge(&a).unwrap();
        assert_eq!(merged, other);
    }

    #[test]
    fn merge_rejects_mismatched_binning() {
        let mut a = Histogram::new(0.0, 1.0, 4).unwrap();
        let b = Histogram::new(0.0, 0.5, 4).unwrap();
        assert!(a.merge(&b).is_err());
    }

    #[test]
    fn count_table_dense_and_sparse_agree() {
        let mut t = CountTable::with_dense_limit(8);
        t.add(3);
        t.add(3);
        t.add(100);
        t.add_count(7, 5);
        assert_eq!(t.count_of(3), 2);
        assert_eq!(t.count_of(100), 1);
        assert_eq!(t.total(), 8);
        assert_eq!(t.sum(), (3 + 3 + 100 + 7 * 5) as u128);
        assert_eq!(t.max_value(), Some(100));
        let pairs: Vec<_> = t.iter().collect();
        assert_eq!(pairs, vec![(3, 2), (7, 5), (100, 1)]);
    }

    #[test]
    fn count_table_merge_matches_pooled() {
        let mut a = CountTable::with_dense_limit(4);
        let mut b = CountTable::with_dense_limit(16);
        let mut pooled = CountTable::new();
        for v in [1u64, 2, 9, 9, 40] {
            a.add(v);
            pooled.add(v);
        }
        for v in [2u64, 40, 41] {
            b.add(v);
            pooled.add(v);
        }
        a.merge(&b);
        assert_eq!(a.total(), pooled.total());
        assert_eq!(a.sum(), pooled.sum());
        let av: Vec<_> = a.iter().collect();
        let pv: Vec<_> = pooled.iter().collect();
        assert_eq!(av, pv);
    }

    #[test]
    fn log_binned_density_is_normalized() {
        let mut t = CountTable::new();
        for v in 1..=1000u64 {
            t.add(v);
        }
        let bins = t.log_binned_density(8);
        // Total probability reconstructed from density * integer width.
        let mut mass = 0.0;
        let mut prev_center = 0.0;
        for &(c, _) in &bins {
            assert!(c > prev_center, "bin centers must increase");
            prev_center = c;
        }
        // Recompute mass by re-binning.
        let ratio = 10f64.powf(1.0 / 8.0);
        let mut edges = vec![1u64];
        let mut x = 1.0;
        while *edges.last().unwrap() <= 1000 {
            x *= ratio;
            edges.push(((x.round()) as u64).max(edges.last().unwrap() + 1));
        }
        for (i, w) in edges.windows(2).enumerate() {
            let _ = i;
            let count = (w[0]..w[1]).filter(|v| *v <= 1000).count() as f64;
            mass += count / 1000.0;
        }
        assert!((mass - 1.0).abs() < 1e-12);
        // Each value has probability 1/1000, so density per unit value is
        // 1/1000 in every bin fully inside [1, 1000]; the final bin straddles
        // the end of the support and is skipped.
        for &(_, d) in &bins[..bins.len() - 1] {
            assert!((d - 1e-3).abs() < 1e-12, "density {d} should be 1e-3");
        }
    }
}
