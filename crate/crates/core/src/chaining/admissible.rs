use serde::{Deserialize, Serialize};

use crate::error::{HullError, Result};
use crate::geometry::PointCloud;

/// Largest cloud accepted by the exhaustive search.
pub const EXACT_GAMMA_LIMIT: usize = 5;
/// Largest cloud accepted by the greedy construction.
pub const GREEDY_GAMMA_LIMIT: usize = 4096;

/// N_0 = 1, N_m = 2^(2^m); saturates at `usize::MAX`.
pub fn cardinality_limit(m: usize) -> usize {
    match m {
        0 => 1,
        m if m >= 6 => usize::MAX,
        m => 1usize << (1usize << m),
    }
}

/// Nested partitions A_0, A_1, ... of the index set {0..N}. Each partition is
/// a list of cells, each cell a sorted list of indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleSequence {
    pub partitions: Vec<Vec<Vec<usize>>>,
}

impl AdmissibleSequence {
    /// Checks the refinement chain and the cardinality limits.
    pub fn validate(&self, n: usize) -> Result<()> {
        let bad = |msg: String| Err(HullError::InvalidInput(msg));
        let Some(first) = self.partitions.first() else { return bad("empty sequence".into()) };
        if first.len() != 1 || first[0].len() != n {
            return bad("partition 0 must be the whole set".into());
        }
        let mut prev_owner: Vec<usize> = vec![0; n];
        for (m, part) in self.partitions.iter().enumerate() {
            if part.len() > cardinality_limit(m) {
                return bad(format!("partition {m} has {} cells, limit {}", part.len(), cardinality_limit(m)));
            }
            let mut owner = vec![usize::MAX; n];
            for (c, cell) in part.iter().enumerate() {
                if cell.is_empty() {
                    return bad(format!("partition {m} has an empty cell"));
                }
                for &i in cell {
                    if i >= n || owner[i] != usize::MAX {
                        return bad(format!("partition {m} is not a partition of 0..{n}"));
                    }
                    owner[i] = c;
                }
                if cell.iter().any(|&i| prev_owner[i] != prev_owner[cell[0]]) {
                    return bad(format!("partition {m} does not refine partition {}", m.saturating_sub(1)));
                }
            }
            if owner.contains(&usize::MAX) {
                return bad(format!("partition {m} misses points"));
            }
            prev_owner = owner;
        }
        Ok(())
    }

    /// sup_t Σ_m 2^{m/α} Δ(A_m(t)).
    pub fn value(&self, cloud: &PointCloud, alpha: f64) -> f64 {
        let n = cloud.len();
        let mut per_point = vec![0.0; n];
        for (m, part) in self.partitions.iter().enumerate() {
            let w = 2f64.powf(m as f64 / alpha);
            for cell in part {
                let d = cell_diameter(cloud, cell).0;
                for &i in cell {
                    per_point[i] += w * d;
                }
            }
        }
        per_point.into_iter().fold(0.0, f64::max)
    }
}

/// Diameter of a cell and a farthest pair, ties to the lexicographically
/// smallest pair (distances within 1e-12 relative count as ties).
pub(crate) fn cell_diameter(cloud: &PointCloud, cell: &[usize]) -> (f64, (usize, usize)) {
    let mut best = 0.0f64;
    let mut pair = (cell[0], cell[0]);
    for (a, &i) in cell.iter().enumerate() {
        for &j in &cell[a + 1..] {
            let d = cloud.d(i, j);
            if d > best * (1.0 + 1e-12) {
                best = d;
                pair = (i, j);
            }
        }
    }
    (best, pair)
}

/// Every set partition of `items` (restricted growth strings).
fn set_partitions(items: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let n = items.len();
    let mut out = Vec::new();
    let mut rgs = vec![0usize; n];
    fn rec(i: usize, max: usize, rgs: &mut [usize], items: &[usize], out: &mut Vec<Vec<Vec<usize>>>) {
        if i == rgs.len() {
            let blocks = rgs.iter().copied().max().map_or(0, |m| m + 1);
            let mut part = vec![Vec::new(); blocks];
            for (k, &b) in rgs.iter().enumerate() {
                part[b].push(items[k]);
            }
            out.push(part);
            return;
        }
        for b in 0..=max + 1 {
            rgs[i] = b;
            rec(i + 1, max.max(b), rgs, items, out);
        }
    }
    if n == 0 {
        return vec![vec![]];
    }
    rec(1, 0, &mut rgs, items, &mut out);
    out
}

/// Every refinement of `part` with at most `limit` cells.
fn refinements(part: &[Vec<usize>], limit: usize) -> Vec<Vec<Vec<usize>>> {
    let mut acc: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for cell in part {
        let options = set_partitions(cell);
        let mut next = Vec::new();
        for a in &acc {
            for o in &options {
                if a.len() + o.len() <= limit {
                    let mut c = a.clone();
                    c.extend(o.iter().cloned());
                    next.push(c);
                }
            }
        }
        acc = next;
    }
    acc
}

fn singletons(n: usize) -> Vec<Vec<usize>> {
    (0..n).map(|i| vec![i]).collect()
}

/// Exact γ_α over all admissible sequences, for at most five points.
///
/// Refining a cell never increases a diameter, so once N_m reaches |T| the
/// singleton partition is optimal and the search stops there.
pub fn gamma_exact_sequence(cloud: &PointCloud, alpha: f64) -> Result<(f64, AdmissibleSequence)> {
    check_alpha(alpha)?;
    let n = cloud.len();
    if n > EXACT_GAMMA_LIMIT {
        return Err(HullError::TooLarge { size: n, limit: EXACT_GAMMA_LIMIT });
    }
    let root = vec![(0..n).collect::<Vec<_>>()];
    if n == 1 {
        let seq = AdmissibleSequence { partitions: vec![root] };
        return Ok((0.0, seq));
    }
    let mut best = (f64::INFINITY, None);
    let mut chain = vec![root];
    search_chains(cloud, alpha, &mut chain, &mut best);
    let (v, seq) = best;
    Ok((v, AdmissibleSequence { partitions: seq.expect("at least one chain") }))
}

type BestChain = (f64, Option<Vec<Vec<Vec<usize>>>>);

fn search_chains(cloud: &PointCloud, alpha: f64, chain: &mut Vec<Vec<Vec<usize>>>, best: &mut BestChain) {
    let n = cloud.len();
    let m = chain.len();
    if cardinality_limit(m) >= n {
        chain.push(singletons(n));
        let v = AdmissibleSequence { partitions: chain.clone() }.value(cloud, alpha);
        // Lexicographic order of the search makes the first optimum the witness.
        if v < best.0 {
            *best = (v, Some(chain.clone()));
        }
        chain.pop();
        return;
    }
    for r in refinements(chain.last().unwrap(), cardinality_limit(m)) {
        chain.push(r);
        search_chains(cloud, alpha, chain, best);
        chain.pop();
    }
}

/// Greedy admissible sequence: at each level, keep splitting the cell of
/// largest diameter around its farthest pair until the level holds N_m cells
/// or every cell is a singleton.
pub fn gamma_greedy_sequence(cloud: &PointCloud, alpha: f64) -> Result<(f64, AdmissibleSequence)> {
    check_alpha(alpha)?;
    let n = cloud.len();
    if n > GREEDY_GAMMA_LIMIT {
        return Err(HullError::TooLarge { size: n, limit: GREEDY_GAMMA_LIMIT });
    }
    // Cells with their cached diameter and farthest pair.
    let mut cells: Vec<(Vec<usize>, f64, (usize, usize))> = {
        let all: Vec<usize> = (0..n).collect();
        let (d, p) = cell_diameter(cloud, &all);
        vec![(all, d, p)]
    };
    let mut partitions = vec![vec![cells[0].0.clone()]];
    let mut m = 0;
    while cells.iter().any(|c| c.0.len() > 1) {
        m += 1;
        let limit = cardinality_limit(m);
        while cells.len() < limit {
            let Some(target) = widest(&cells) else { break };
            let (cell, _, (a, b)) = cells.remove(target);
            let (mut left, mut right): (Vec<usize>, Vec<usize>) =
                cell.iter().partition(|&&i| cloud.d(i, a) <= cloud.d(i, b) * (1.0 + 1e-12));
            if right.is_empty() {
                // Repeated points: the cell has diameter 0, any split will do.
                right.push(left.pop().expect("cell has two points"));
            }
            for part in [left, right] {
                let (d, p) = cell_diameter(cloud, &part);
                cells.insert(target.min(cells.len()), (part, d, p));
            }
        }
        let mut level: Vec<Vec<usize>> = cells.iter().map(|c| c.0.clone()).collect();
        level.sort();
        partitions.push(level);
    }
    let seq = AdmissibleSequence { partitions };
    Ok((seq.value(cloud, alpha), seq))
}

/// Index of the non-singleton cell with the largest diameter, ties to the
/// cell holding the smallest index.
fn widest(cells: &[(Vec<usize>, f64, (usize, usize))]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (k, c) in cells.iter().enumerate() {
        if c.0.len() < 2 {
            continue;
        }
        best = match best {
            None => Some(k),
            Some(b) => {
                let (db, dc) = (cells[b].1, c.1);
                if dc > db * (1.0 + 1e-12) || (dc >= db * (1.0 - 1e-12) && c.0[0] < cells[b].0[0]) {
                    Some(k)
                } else {
                    Some(b)
                }
            }
        };
    }
    best
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(HullError::ParamOutOfRange(format!("alpha must be positive, got {alpha}")))
    }
}
