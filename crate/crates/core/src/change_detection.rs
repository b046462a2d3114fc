//! Bucketing of a ranked log and the sliding-window local distance series.
//!
//! The ranked traces are split into `b` order-preserving buckets of equal
//! size (±1). For every center index `i` a left window holds the traces of
//! buckets `(i-w, i]` and a right window those of `(i, i+w]`; the local
//! distance at `i` is the earth mover's distance between the two windows'
//! stochastic languages.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use rayon::prelude::*;

use crate::emd::{emd_with_cache, DistanceCache};
use crate::error::{Error, Result};
use crate::event_log::{StochasticLanguage, Trace, Variant};
use crate::indicators::RankedLog;

/// An order-preserving partition of a ranked log into `b` buckets whose sizes
/// differ by at most one. Bucket indices are 1-based.
pub struct Bucketing<'a> {
    ranked: RankedLog<'a>,
    // b+1 offsets into ranked positions; bucket i covers offsets[i-1]..offsets[i]
    offsets: Vec<usize>,
    counts: Vec<BTreeMap<Variant, usize>>,
}

impl<'a> Bucketing<'a> {
    pub fn ranked(&self) -> &RankedLog<'a> {
        &self.ranked
    }

    /// Number of buckets `b`.
    pub fn bucket_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Ranked positions covered by bucket `i` (1-based).
    pub fn bucket_range(&self, i: usize) -> std::ops::Range<usize> {
        self.offsets[i - 1]..self.offsets[i]
    }

    pub fn bucket_size(&self, i: usize) -> usize {
        self.offsets[i] - self.offsets[i - 1]
    }

    /// Indicator value of the last trace in bucket `i`.
    pub fn boundary_kappa(&self, i: usize) -> f64 {
        self.ranked.kappa(self.offsets[i] - 1)
    }

    /// Traces of the contiguous bucket range, in ranked order.
    pub fn traces_of(
        &self,
        buckets: RangeInclusive<usize>,
    ) -> impl Iterator<Item = &'a Trace> + '_ {
        let lo = self.offsets[*buckets.start() - 1];
        let hi = self.offsets[*buckets.end()];
        (lo..hi).map(move |pos| self.ranked.trace(pos))
    }

    /// Pooled variant counts of an arbitrary bucket set.
    pub fn pooled_counts<I>(&self, buckets: I) -> BTreeMap<Variant, usize>
    where
        I: IntoIterator<Item = usize>,
    {
        let mut merged: BTreeMap<Variant, usize> = BTreeMap::new();
        for bucket in buckets {
            for (variant, count) in &self.counts[bucket - 1] {
                *merged.entry(variant.clone()).or_insert(0) += count;
            }
        }
        merged
    }

    /// Stochastic language of the traces of an arbitrary bucket set.
    pub fn language_of<I>(&self, buckets: I) -> Result<StochasticLanguage>
    where
        I: IntoIterator<Item = usize>,
    {
        StochasticLanguage::from_counts(self.pooled_counts(buckets))
    }

    /// The left/right windows around center `i` for window size `w`.
    pub fn window_pair(&self, i: usize, w: usize) -> WindowPair {
        WindowPair {
            center: i,
            left: (i - w + 1)..=i,
            right: (i + 1)..=(i + w),
        }
    }
}

/// Left and right windows around a center bucket: `w` buckets on each side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowPair {
    pub center: usize,
    pub left: RangeInclusive<usize>,
    pub right: RangeInclusive<usize>,
}

/// Split a ranked log into `b` buckets. With `r = len mod b`, the first `r`
/// buckets hold one extra trace so sizes differ by at most one.
pub fn make_buckets(ranked: RankedLog<'_>, b: usize) -> Result<Bucketing<'_>> {
    let len = ranked.len();
    if b < 2 || b > len {
        return Err(Error::BucketCount { b, len });
    }
    let base = len / b;
    let extra = len % b;
    let mut offsets = Vec::with_capacity(b + 1);
    let mut pos = 0;
    offsets.push(0);
    for i in 0..b {
        pos += base + usize::from(i < extra);
        offsets.push(pos);
    }
    debug_assert_eq!(pos, len);

    let counts = (1..=b)
        .map(|i| {
            let mut map: BTreeMap<Variant, usize> = BTreeMap::new();
            for pos in offsets[i - 1]..offsets[i] {
                *map.entry(ranked.trace(pos).variant()).or_insert(0) += 1;
            }
            map
        })
        .collect();

    Ok(Bucketing {
        ranked,
        offsets,
        counts,
    })
}

/// One entry of the local distance series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LdistEntry {
    /// Center bucket index `i`.
    pub index: usize,
    /// Indicator value of the last trace in bucket `i`.
    pub kappa_boundary: f64,
    /// Earth mover's distance between the windows around `i`.
    pub value: f64,
}

/// The local distance function over all valid center indices `{w, ..., b-w}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LdistSeries {
    pub window: usize,
    pub entries: Vec<LdistEntry>,
}

impl LdistSeries {
    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.value).collect()
    }
}

fn check_window(w: usize, b: usize) -> Result<()> {
    if w < 1 || w > b / 2 {
        return Err(Error::WindowSize { w, b });
    }
    Ok(())
}

/// Compute the local distance series for one window size. Entries are
/// independent; they are evaluated in parallel and collected in index order,
/// so the output matches sequential evaluation exactly.
pub fn ldist_series(
    bucketing: &Bucketing<'_>,
    w: usize,
    cache: &DistanceCache,
) -> Result<LdistSeries> {
    let b = bucketing.bucket_count();
    check_window(w, b)?;
    let entries = (w..=b - w)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&i| {
            let pair = bucketing.window_pair(i, w);
            let left = bucketing
                .language_of(pair.left.clone())
                .expect("windows are non-empty");
            let right = bucketing
                .language_of(pair.right.clone())
                .expect("windows are non-empty");
            LdistEntry {
                index: i,
                kappa_boundary: bucketing.boundary_kappa(i),
                value: emd_with_cache(&left, &right, cache).value,
            }
        })
        .collect();
    Ok(LdistSeries { window: w, entries })
}

/// Compute one series per requested window size with a shared distance cache.
/// Sizes are validated up front and deduplicated preserving first occurrence.
pub fn multi_window_analysis(
    bucketing: &Bucketing<'_>,
    windows: &[usize],
    cache: &DistanceCache,
) -> Result<Vec<LdistSeries>> {
    let b = bucketing.bucket_count();
    for &w in windows {
        check_window(w, b)?;
    }
    let mut seen = std::collections::HashSet::new();
    let unique: Vec<usize> = windows
        .iter()
        .copied()
        .filter(|w| seen.insert(*w))
        .collect();
    unique
        .iter()
        .map(|&w| ldist_series(bucketing, w, cache))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event_log::EventLog;
    use crate::indicators::{rank_log, IndicatorSpec};
    use crate::synthgen::{generate_step_log, StepGenConfig, StepRegion};

    fn idx_spec() -> IndicatorSpec {
        IndicatorSpec::attribute("idx").unwrap()
    }

    fn step_log(regions: &[(&[&str], usize)]) -> EventLog {
        let config = StepGenConfig {
            regions: regions
                .iter()
                .map(|(acts, count)| StepRegion {
                    variant: Variant::of(acts),
                    cases: *count,
                })
                .collect(),
        };
        generate_step_log(&config).unwrap()
    }

    #[test]
    fn equal_split_150_by_15() {
        let log = step_log(&[(&["A"], 150)]);
        let ranked = rank_log(&log, &idx_spec()).unwrap();
        let buckets = make_buckets(ranked, 15).unwrap();
        assert_eq!(buckets.bucket_count(), 15);
        for i in 1..=15 {
            assert_eq!(buckets.bucket_size(i), 10);
        }
    }

    #[test]
    fn remainder_spread_10_by_3() {
        let log = step_log(&[(&["A"], 10)]);
        let ranked = rank_log(&log, &idx_spec()).unwrap();
        let buckets = make_buckets(ranked, 3).unwrap();
        let sizes: Vec<usize> = (1..=3).map(|i| buckets.bucket_size(i)).collect();
        assert_eq!(sizes, [4, 3, 3]);
    }

    #[test]
    fn singleton_buckets() {
        let log = step_log(&[(&["A"], 5)]);
        let ranked = rank_log(&log, &idx_spec()).unwrap();
        let buckets = make_buckets(ranked, 5).unwrap();
        assert!((1..=5).all(|i| buckets.bucket_size(i) == 1));
    }

    #[test]
    fn bucket_count_out_of_range() {
        let log = step_log(&[(&["A"], 5)]);
        let ranked = rank_log(&log, &idx_spec()).unwrap();
        assert!(matches!(
            make_buckets(ranked, 6),
            Err(Error::BucketCount { b: 6, len: 5 })
        ));
        let ranked = rank_log(&log, &idx_spec()).unwrap();
        assert!(matches!(
            make_buckets(ranked, 1),
            Err(Error::BucketCount { .. })
        ));
    }

    #[test]
    fn partition_preserves_ranked_order() {
        let log = step_log(&[(&["A"], 23)]);
        let ranked = rank_log(&log, &idx_spec()).unwrap();
        let expected: Vec<String> = ranked.iter().map(|(t, _)| t.case_id.clone()).collect();
        let buckets = make_buckets(ranked, 7).unwrap();
        let mut seen = Vec::new();
        for i in 1..=7 {
            seen.extend(buckets.traces_of(i..=i).map(|t| t.case_id.clone()));
        }
        assert_eq!(seen, expected);
    }

    /// Three regions A/B/A with a single-bucket window: the distance is
    /// delta(A,B) exactly at the two region boundaries and zero elsewhere.
    #[test]
    fn step_pattern_peaks_at_boundaries() {
        let log = step_log(&[(&["A"], 70), (&["B"], 30), (&["A"], 50)]);
        let ranked = rank_log(&log, &idx_spec()).unwrap();
        let buckets = make_buckets(ranked, 15).unwrap();
        let cache = DistanceCache::new();
        let series = ldist_series(&buckets, 1, &cache).unwrap();
        assert_eq!(series.entries.len(), 14);
        let delta = 1.0; // disjoint one-activity variants
        for entry in &series.entries {
            if entry.index == 7 || entry.index == 10 {
                assert!((entry.value - delta).abs() <= 1e-9);
            } else {
                assert_eq!(entry.value, 0.0);
            }
        }
    }

    #[test]
    fn homogeneous_log_is_all_zero() {
        let log = step_log(&[(&["A", "B", "C"], 60)]);
        let ranked = rank_log(&log, &idx_spec()).unwrap();
        let buckets = make_buckets(ranked, 12).unwrap();
        let cache = DistanceCache::new();
        for w in [1, 2, 3] {
            let series = ldist_series(&buckets, w, &cache).unwrap();
            assert!(series.entries.iter().all(|e| e.value == 0.0));
        }
    }

    #[test]
    fn identical_regions_are_indistinguishable() {
        let log = step_log(&[(&["A", "B"], 30), (&["A", "B"], 30)]);
        let ranked = rank_log(&log, &idx_spec()).unwrap();
        let buckets = make_buckets(ranked, 12).unwrap();
        let series = ldist_series(&buckets, 1, &DistanceCache::new()).unwrap();
        assert!(series.entries.iter().all(|e| e.value == 0.0));
    }

    #[test]
    fn minimal_series_b2_w1() {
        let log = step_log(&[(&["A"], 4)]);
        let ranked = rank_log(&log, &idx_spec()).unwrap();
        let buckets = make_buckets(ranked, 2).unwrap();
        let series = ldist_series(&buckets, 1, &DistanceCache::new()).unwrap();
        assert_eq!(series.entries.len(), 1);
        assert_eq!(series.entries[0].index, 1);
    }

    #[test]
    fn window_size_validation() {
        let log = step_log(&[(&["A"], 20)]);
        let ranked = rank_log(&log, &idx_spec()).unwrap();
        let buckets = make_buckets(ranked, 10).unwrap();
        assert!(ldist_series(&buckets, 5, &DistanceCache::new()).is_ok());
        assert!(matches!(
            ldist_series(&buckets, 6, &DistanceCache::new()),
            Err(Error::WindowSize { w: 6, b: 10 })
        ));
        assert!(matches!(
            ldist_series(&buckets, 0, &DistanceCache::new()),
            Err(Error::WindowSize { .. })
        ));
    }

    #[test]
    fn series_length_and_bounds() {
        let log = step_log(&[(&["A"], 40), (&["B"], 40)]);
        let ranked = rank_log(&log, &idx_spec()).unwrap();
        let buckets = make_buckets(ranked, 16).unwrap();
        let cache = DistanceCache::new();
        for w in 1..=8 {
            let series = ldist_series(&buckets, w, &cache).unwrap();
            assert_eq!(series.entries.len(), 16 - 2 * w + 1);
            assert!(series
                .entries
                .iter()
                .all(|e| (0.0..=1.0).contains(&e.value)));
            assert_eq!(series.entries.first().unwrap().index, w);
            assert_eq!(series.entries.last().unwrap().index, 16 - w);
        }
    }

    #[test]
    fn larger_window_widens_plateau() {
        let log = step_log(&[(&["A"], 70), (&["B"], 30), (&["A"], 50)]);
        let ranked = rank_log(&log, &idx_spec()).unwrap();
        let buckets = make_buckets(ranked, 15).unwrap();
        let cache = DistanceCache::new();
        let narrow = ldist_series(&buckets, 1, &cache).unwrap();
        let wide = ldist_series(&buckets, 3, &cache).unwrap();
        let half = 0.5;
        let count = |s: &LdistSeries| s.entries.iter().filter(|e| e.value >= half).count();
        assert!(count(&wide) >= count(&narrow));
    }

    #[test]
    fn multi_window_dedup_and_validation() {
        let log = step_log(&[(&["A"], 30)]);
        let ranked = rank_log(&log, &idx_spec()).unwrap();
        let buckets = make_buckets(ranked, 10).unwrap();
        let cache = DistanceCache::new();
        let series = multi_window_analysis(&buckets, &[3, 1, 3], &cache).unwrap();
        assert_eq!(series.len(), 2);
        assert_eq!(series[0].window, 3);
        assert_eq!(series[1].window, 1);

        assert!(multi_window_analysis(&buckets, &[], &cache)
            .unwrap()
            .is_empty());
        assert!(multi_window_analysis(&buckets, &[1, 99], &cache).is_err());
    }

    #[test]
    fn window_pair_shape() {
        let log = step_log(&[(&["A"], 20)]);
        let ranked = rank_log(&log, &idx_spec()).unwrap();
        let buckets = make_buckets(ranked, 10).unwrap();
        let pair = buckets.window_pair(4, 2);
        assert_eq!(pair.left, 3..=4);
        assert_eq!(pair.right, 5..=6);
    }
}
