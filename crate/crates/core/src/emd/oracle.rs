//! Independent verification oracle for the earth mover's distance.
//!
//! Enumerates the vertices of the transportation polytope by greedy maximal
//! allocation along every order of the cost-matrix cells and returns the
//! cheapest one. Orders that only differ in cells receiving zero mass yield
//! the same vertex, so the search skips them; branches whose partial cost
//! already meets the best known total are cut. Both reductions leave the
//! minimum unchanged. Exponential in the support product, hence the 9-cell
//! limit.

use crate::error::{Error, Result};
use crate::event_log::StochasticLanguage;

use super::levenshtein_norm;

const MAX_CELLS: usize = 9;

struct Search {
    costs: Vec<f64>,
    n: usize,
    best: f64,
}

impl Search {
    fn run(&mut self, rem_a: &mut [f64], rem_b: &mut [f64], live: &[(usize, usize)], acc: f64) {
        if acc >= self.best {
            return;
        }
        // Cells that cannot receive mass now can never receive mass later;
        // drop them without branching.
        let open: Vec<(usize, usize)> = live
            .iter()
            .copied()
            .filter(|&(i, j)| rem_a[i].min(rem_b[j]) > 0.0)
            .collect();
        if open.is_empty() {
            self.best = acc;
            return;
        }
        for (pos, &(i, j)) in open.iter().enumerate() {
            let amount = rem_a[i].min(rem_b[j]);
            let mut rest = open.clone();
            rest.remove(pos);
            rem_a[i] -= amount;
            rem_b[j] -= amount;
            self.run(
                rem_a,
                rem_b,
                &rest,
                acc + amount * self.costs[i * self.n + j],
            );
            rem_a[i] += amount;
            rem_b[j] += amount;
        }
    }
}

/// Minimum transport cost over all greedy allocation orders. Equals the
/// earth mover's distance for supports with at most 9 cost cells.
pub fn emd_oracle(a: &StochasticLanguage, b: &StochasticLanguage) -> Result<f64> {
    let m = a.support_size();
    let n = b.support_size();
    if m * n > MAX_CELLS {
        return Err(Error::SupportTooLarge { m, n });
    }

    let mut costs = Vec::with_capacity(m * n);
    for (va, _) in a.iter() {
        for (vb, _) in b.iter() {
            costs.push(levenshtein_norm(va, vb));
        }
    }
    let mut rem_a: Vec<f64> = a.iter().map(|(_, p)| p).collect();
    let mut rem_b: Vec<f64> = b.iter().map(|(_, p)| p).collect();
    let cells: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..n).map(move |j| (i, j))).collect();

    let mut search = Search {
        costs,
        n,
        best: f64::INFINITY,
    };
    search.run(&mut rem_a, &mut rem_b, &cells, 0.0);
    Ok(search.best)
}
