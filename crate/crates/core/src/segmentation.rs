//! Change points, segments, pairwise segment comparison, and hierarchical
//! merging of segments with indistinguishable control flow.
//!
//! A change point is a local maximum of the local distance series at or above
//! the threshold theta. Runs of adjacent qualifying indices with equal value
//! (flat maxima) collapse to their leftmost index so a plateau yields one
//! change, not one per bucket. Segments are the bucket ranges between
//! consecutive change points. Merging is agglomerative over all pairs, not
//! only adjacent ones: the pair of groups with the globally smallest earth
//! mover's distance is pooled while that minimum stays below theta.

use rayon::prelude::*;

use crate::change_detection::{Bucketing, LdistSeries};
use crate::emd::{emd_with_cache, DistanceCache};
use crate::event_log::StochasticLanguage;

/// Detected change points for one series and threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct ChangePointSet {
    pub theta: f64,
    pub window: usize,
    /// Ascending bucket indices.
    pub points: Vec<usize>,
}

/// A contiguous bucket range between change points (indices 1-based).
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    /// 1-based position among the segments.
    pub index: usize,
    pub first_bucket: usize,
    pub last_bucket: usize,
    pub trace_count: usize,
    pub kappa_min: f64,
    pub kappa_max: f64,
}

/// Pairwise earth mover's distances between segment languages.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonMatrix {
    values: Vec<Vec<f64>>,
}

impl ComparisonMatrix {
    pub fn size(&self) -> usize {
        self.values.len()
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        let n = self.size();
        (0..n).all(|i| (0..n).all(|j| (self.values[i][j] - self.values[j][i]).abs() <= tol))
    }

    pub fn has_zero_diagonal(&self) -> bool {
        (0..self.size()).all(|i| self.values[i][i] == 0.0)
    }
}

/// One agglomerative merge: which two groups were pooled and at what distance.
#[derive(Debug, Clone, PartialEq)]
pub struct MergeStep {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    pub distance: f64,
}

/// The merge trace and the final partition of segment indices.
#[derive(Debug, Clone, PartialEq)]
pub struct MergeResult {
    pub steps: Vec<MergeStep>,
    pub groups: Vec<Vec<usize>>,
}

/// Find all change points of a series: value at or above `theta`, neighbors
/// not larger (one-sided at the series boundaries), flat runs collapsed to
/// their leftmost index.
pub fn detect_change_points(series: &LdistSeries, theta: f64) -> ChangePointSet {
    let entries = &series.entries;
    let qualifies = |k: usize| -> bool {
        let v = entries[k].value;
        v >= theta
            && (k == 0 || entries[k - 1].value <= v)
            && (k + 1 == entries.len() || entries[k + 1].value <= v)
    };

    let mut points = Vec::new();
    let mut k = 0;
    while k < entries.len() {
        if qualifies(k) {
            let value = entries[k].value;
            let mut end = k;
            while end + 1 < entries.len() && entries[end + 1].value == value && qualifies(end + 1) {
                end += 1;
            }
            points.push(entries[k].index);
            k = end + 1;
        } else {
            k += 1;
        }
    }
    ChangePointSet {
        theta,
        window: series.window,
        points,
    }
}

/// Cut the bucketing at the change points: `|P|+1` contiguous segments.
pub fn cut_segments(bucketing: &Bucketing<'_>, points: &ChangePointSet) -> Vec<Segment> {
    let b = bucketing.bucket_count();
    let mut starts = vec![1usize];
    for &p in &points.points {
        starts.push(p + 1);
    }
    let mut segments = Vec::with_capacity(starts.len());
    for (idx, &first) in starts.iter().enumerate() {
        let last = if idx + 1 < starts.len() {
            starts[idx + 1] - 1
        } else {
            b
        };
        let lo = bucketing.bucket_range(first).start;
        let hi = bucketing.bucket_range(last).end;
        segments.push(Segment {
            index: idx + 1,
            first_bucket: first,
            last_bucket: last,
            trace_count: hi - lo,
            kappa_min: bucketing.ranked().kappa(lo),
            kappa_max: bucketing.ranked().kappa(hi - 1),
        });
    }
    segments
}

fn segment_language(bucketing: &Bucketing<'_>, segment: &Segment) -> StochasticLanguage {
    bucketing
        .language_of(segment.first_bucket..=segment.last_bucket)
        .expect("segments contain at least one bucket")
}

/// Pairwise earth mover's distances between segment languages. The upper
/// triangle is computed once and mirrored; the diagonal is exactly zero.
pub fn compare_segments(
    bucketing: &Bucketing<'_>,
    segments: &[Segment],
    cache: &DistanceCache,
) -> ComparisonMatrix {
    let n = segments.len();
    let languages: Vec<StochasticLanguage> = segments
        .iter()
        .map(|s| segment_language(bucketing, s))
        .collect();

    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let distances: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| emd_with_cache(&languages[i], &languages[j], cache).value)
        .collect();

    let mut values = vec![vec![0.0; n]; n];
    for (&(i, j), &d) in pairs.iter().zip(&distances) {
        values[i][j] = d;
        values[j][i] = d;
    }
    ComparisonMatrix { values }
}

/// Agglomeratively merge segment groups while the globally smallest pairwise
/// distance is below `theta`. Equal minima break towards the smallest group
/// pair in list order; non-adjacent merges are allowed. Group languages are
/// recomputed from the pooled traces after every merge.
pub fn merge_segments(
    bucketing: &Bucketing<'_>,
    segments: &[Segment],
    theta: f64,
    cache: &DistanceCache,
) -> MergeResult {
    let mut groups: Vec<Vec<usize>> = segments.iter().map(|s| vec![s.index]).collect();
    let mut languages: Vec<StochasticLanguage> = segments
        .iter()
        .map(|s| segment_language(bucketing, s))
        .collect();
    let mut steps = Vec::new();

    let group_language = |bucketing: &Bucketing<'_>, members: &[usize]| {
        let buckets = members.iter().flat_map(|&seg| {
            let s = &segments[seg - 1];
            s.first_bucket..=s.last_bucket
        });
        bucketing
            .language_of(buckets)
            .expect("groups contain at least one bucket")
    };

    while groups.len() > 1 {
        let mut min: Option<(usize, usize, f64)> = None;
        for i in 0..groups.len() {
            for j in i + 1..groups.len() {
                let d = emd_with_cache(&languages[i], &languages[j], cache).value;
                if min.is_none_or(|(_, _, best)| d < best) {
                    min = Some((i, j, d));
                }
            }
        }
        let (i, j, distance) = min.expect("at least one pair");
        if distance >= theta {
            break;
        }
        steps.push(MergeStep {
            left: groups[i].clone(),
            right: groups[j].clone(),
            distance,
        });
        let absorbed = groups.remove(j);
        languages.remove(j);
        groups[i].extend(absorbed);
        groups[i].sort_unstable();
        languages[i] = group_language(bucketing, &groups[i]);
    }

    MergeResult { steps, groups }
}
