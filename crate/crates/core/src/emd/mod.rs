//! Normalized Levenshtein trace distance and the exact earth mover's distance
//! between stochastic languages.
//!
//! The ground distance between variants is the unit-cost edit distance divided
//! by the longer variant's length, so all costs live in `[0,1]`. The earth
//! mover's distance is the optimal value of the induced transportation
//! problem, solved exactly (no entropic or sampled approximation): frequencies
//! are scaled to a common integer denominator and the minimum-cost flow is
//! found by shortest-path augmentation, so results are deterministic and
//! independent of variant insertion order.

mod oracle;
mod solver;

pub use oracle::emd_oracle;

use dashmap::DashMap;

#[cfg(test)]
use crate::error::{Error, Result};
use crate::event_log::{StochasticLanguage, Variant};

/// Unit-cost edit distance between two label sequences.
fn levenshtein(a: &[String], b: &[String]) -> usize {
    let (a, b) = if a.len() < b.len() { (b, a) } else { (a, b) };
    if b.is_empty() {
        return a.len();
    }
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let tmp = row[j + 1];
            row[j + 1] = (tmp + 1)
                .min(row[j] + 1)
                .min(diag + if ca == cb { 0 } else { 1 });
            diag = tmp;
        }
    }
    row[b.len()]
}

/// Edit distance normalized by the longer sequence, in `[0,1]`.
/// Two empty variants have distance 0.
pub fn levenshtein_norm(a: &Variant, b: &Variant) -> f64 {
    let longest = a.len().max(b.len());
    if longest == 0 {
        return 0.0;
    }
    levenshtein(a.activities(), b.activities()) as f64 / longest as f64
}

/// Memoized variant-to-variant distances, shared across all window and
/// segment comparisons of one analysis run. Safe for concurrent use; a cached
/// value only ever depends on its key, so parallel execution returns exactly
/// the sequential results.
#[derive(Debug, Default)]
pub struct DistanceCache {
    map: DashMap<(Variant, Variant), f64>,
}

impl DistanceCache {
    pub fn new() -> DistanceCache {
        DistanceCache::default()
    }

    pub fn distance(&self, a: &Variant, b: &Variant) -> f64 {
        if a == b {
            return 0.0;
        }
        let key = if a <= b {
            (a.clone(), b.clone())
        } else {
            (b.clone(), a.clone())
        };
        if let Some(hit) = self.map.get(&key) {
            return *hit;
        }
        let d = levenshtein_norm(a, b);
        self.map.insert(key, d);
        d
    }

    /// Number of distinct variant pairs computed so far.
    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Pairwise ground distances between the supports of two languages.
/// `cell(i, j)` is 0 exactly when the two variants are equal.
#[derive(Debug, Clone)]
pub struct CostMatrix {
    rows: Vec<Variant>,
    cols: Vec<Variant>,
    cells: Vec<f64>,
}

impl CostMatrix {
    pub fn between(
        a: &StochasticLanguage,
        b: &StochasticLanguage,
        cache: &DistanceCache,
    ) -> CostMatrix {
        let rows: Vec<Variant> = a.iter_counts().map(|(v, _)| v.clone()).collect();
        let cols: Vec<Variant> = b.iter_counts().map(|(v, _)| v.clone()).collect();
        let mut cells = Vec::with_capacity(rows.len() * cols.len());
        for r in &rows {
            for c in &cols {
                cells.push(cache.distance(r, c));
            }
        }
        CostMatrix { rows, cols, cells }
    }

    pub fn rows(&self) -> &[Variant] {
        &self.rows
    }

    pub fn cols(&self) -> &[Variant] {
        &self.cols
    }

    pub fn cell(&self, i: usize, j: usize) -> f64 {
        self.cells[i * self.cols.len() + j]
    }
}

/// One optimal reallocation: how much frequency mass moves between each pair
/// of variants, with the marginals of the two input languages.
#[derive(Debug, Clone)]
pub struct TransportPlan {
    flows: Vec<(usize, usize, f64)>,
    cost: f64,
}

impl TransportPlan {
    /// Positive flows as `(row index, col index, mass)`, in row-major order.
    pub fn flows(&self) -> &[(usize, usize, f64)] {
        &self.flows
    }

    pub fn cost(&self) -> f64 {
        self.cost
    }

    pub fn row_sums(&self, rows: usize) -> Vec<f64> {
        let mut sums = vec![0.0; rows];
        for &(i, _, mass) in &self.flows {
            sums[i] += mass;
        }
        sums
    }

    pub fn col_sums(&self, cols: usize) -> Vec<f64> {
        let mut sums = vec![0.0; cols];
        for &(_, j, mass) in &self.flows {
            sums[j] += mass;
        }
        sums
    }
}

/// The earth mover's distance value together with the realizing plan.
#[derive(Debug, Clone)]
pub struct EmdResult {
    pub value: f64,
    pub plan: Option<TransportPlan>,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// True when both languages denote the same distribution (same support and
/// equal probabilities, compared exactly via cross-multiplied frequencies).
fn same_distribution(a: &StochasticLanguage, b: &StochasticLanguage) -> bool {
    if a.support_size() != b.support_size() {
        return false;
    }
    let ta = a.total() as u128;
    let tb = b.total() as u128;
    a.iter_counts()
        .zip(b.iter_counts())
        .all(|((va, ca), (vb, cb))| va == vb && ca as u128 * tb == cb as u128 * ta)
}

/// Exact earth mover's distance between two stochastic languages under the
/// normalized Levenshtein ground distance. Deterministic; value in `[0,1]`.
pub fn emd_with_cache(
    a: &StochasticLanguage,
    b: &StochasticLanguage,
    cache: &DistanceCache,
) -> EmdResult {
    if same_distribution(a, b) {
        // Identical languages ship everything in place at zero cost.
        let flows = a.iter().enumerate().map(|(i, (_, p))| (i, i, p)).collect();
        return EmdResult {
            value: 0.0,
            plan: Some(TransportPlan { flows, cost: 0.0 }),
        };
    }

    let costs = CostMatrix::between(a, b, cache);

    // Scale both marginals to the common denominator lcm(total_a, total_b)
    // so every flow is integral and the solver terminates exactly.
    let g = gcd(a.total(), b.total());
    let a_scale = (b.total() / g) as i128;
    let b_scale = (a.total() / g) as i128;
    let supplies: Vec<i128> = a.iter_counts().map(|(_, c)| c as i128 * a_scale).collect();
    let demands: Vec<i128> = b.iter_counts().map(|(_, c)| c as i128 * b_scale).collect();
    let total = a.total() as i128 * a_scale;

    let solution = solver::solve(&supplies, &demands, |i, j| costs.cell(i, j));

    let value = (solution.cost_sum / total as f64).clamp(0.0, 1.0);
    let flows = solution
        .flows
        .into_iter()
        .map(|(i, j, f)| (i, j, f as f64 / total as f64))
        .collect();
    EmdResult {
        value,
        plan: Some(TransportPlan { flows, cost: value }),
    }
}

/// One-shot earth mover's distance without a shared cache.
pub fn emd(a: &StochasticLanguage, b: &StochasticLanguage) -> EmdResult {
    emd_with_cache(a, b, &DistanceCache::new())
}

/// Validate a plan against its marginals; used by tests and report checks.
pub fn plan_is_feasible(
    plan: &TransportPlan,
    a: &StochasticLanguage,
    b: &StochasticLanguage,
    tol: f64,
) -> bool {
    if plan.flows.iter().any(|&(_, _, m)| m < 0.0) {
        return false;
    }
    let rows = plan.row_sums(a.support_size());
    let cols = plan.col_sums(b.support_size());
    rows.iter()
        .zip(a.iter().map(|(_, p)| p))
        .all(|(s, p)| (s - p).abs() <= tol)
        && cols
            .iter()
            .zip(b.iter().map(|(_, p)| p))
            .all(|(s, p)| (s - p).abs() <= tol)
}

#[cfg(test)]
pub(crate) fn language_from_pairs(pairs: &[(&[&str], usize)]) -> Result<StochasticLanguage> {
    let mut counts = std::collections::BTreeMap::new();
    for (acts, count) in pairs {
        if counts.insert(Variant::of(acts), *count).is_some() {
            return Err(Error::InvalidLanguage("duplicate variant".into()));
        }
    }
    StochasticLanguage::from_counts(counts)
}
