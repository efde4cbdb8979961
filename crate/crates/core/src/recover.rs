//! Alignment estimators: threshold-and-clean, exact maximum-score
//! assignment, maximum-path partial recovery, two-stage full recovery,
//! and a brute-force oracle for small tables.

use crate::error::{Error, Result};
use crate::model::{Permutation, ScoreTable};

/// A partial alignment: (row, column) pairs with all rows distinct and
/// all columns distinct. Pairs are kept sorted by row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialAlignment {
    pairs: Vec<(usize, usize)>,
}

impl PartialAlignment {
    pub fn empty() -> Self {
        PartialAlignment { pairs: Vec::new() }
    }

    /// Validates distinctness of rows and of columns.
    pub fn new(mut pairs: Vec<(usize, usize)>) -> Result<Self> {
        pairs.sort_unstable();
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::param("alignment", "duplicate row"));
            }
        }
        let mut cols: Vec<usize> = pairs.iter().map(|p| p.1).collect();
        cols.sort_unstable();
        if cols.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::param("alignment", "duplicate column"));
        }
        Ok(PartialAlignment { pairs })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn from_permutation(perm: &Permutation) -> Self {
        PartialAlignment {
            pairs: (0..perm.len()).map(|i| (i, perm.apply(i))).collect(),
        }
    }
}

/// Outcome of a recovery run: the alignment plus the score of each kept
/// pair.
#[derive(Debug, Clone)]
pub struct RecoveryOutcome {
    pub alignment: PartialAlignment,
    pub is_full: bool,
    pub scores: Vec<f64>,
}

impl RecoveryOutcome {
    fn from_alignment(alignment: PartialAlignment, n: usize, table: &ScoreTable) -> Self {
        let scores = alignment
            .pairs()
            .iter()
            .map(|&(i, j)| table.get(i, j))
            .collect();
        RecoveryOutcome {
            is_full: alignment.len() == n,
            alignment,
            scores,
        }
    }
}

/// Keep every table entry at or above theta as a dot, then erase every
/// dot sharing a row or a column with another dot. Survivors form a
/// partial alignment by construction. Single pass: a dot survives iff
/// its row count and column count are both exactly one, which is
/// order-independent.
pub fn threshold_and_clean(table: &ScoreTable, theta: f64) -> PartialAlignment {
    let n = table.n();
    let mut row_counts = vec![0usize; n];
    let mut col_counts = vec![0usize; n];
    for (i, rc) in row_counts.iter_mut().enumerate() {
        for (j, cc) in col_counts.iter_mut().enumerate() {
            if table.get(i, j) >= theta {
                *rc += 1;
                *cc += 1;
            }
        }
    }
    let mut pairs = Vec::new();
    for (i, &rc) in row_counts.iter().enumerate() {
        if rc != 1 {
            continue;
        }
        for (j, &cc) in col_counts.iter().enumerate() {
            if table.get(i, j) >= theta && cc == 1 {
                pairs.push((i, j));
            }
        }
    }
    PartialAlignment { pairs }
}

/// Exact maximum-score assignment in O(n^3) by shortest augmenting
/// paths with potentials (run on negated scores).
pub fn hungarian_max(table: &ScoreTable) -> Permutation {
    let n = table.n();
    if n == 0 {
        return Permutation::identity(0);
    }
    let cost = |i: usize, j: usize| -table.get(i, j);

    // 1-indexed with a virtual 0 column; p[j] = row matched to column j
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut map = vec![0usize; n];
    for j in 1..=n {
        map[p[j] - 1] = j - 1;
    }
    Permutation::new(map).expect("assignment is a bijection")
}

/// Objective value of a permutation on a table.
pub fn assignment_objective(table: &ScoreTable, perm: &Permutation) -> f64 {
    (0..table.n()).map(|i| table.get(i, perm.apply(i))).sum()
}

/// Exhaustive maximization over all permutations; refuses n > 8.
pub fn brute_force_ml(table: &ScoreTable) -> Result<(Permutation, f64)> {
    let n = table.n();
    if n > 8 {
        return Err(Error::SizeLimit {
            context: "brute_force_ml",
            reason: format!("n must be <= 8, got {n}"),
        });
    }
    let mut map: Vec<usize> = (0..n).collect();
    let mut best_map = map.clone();
    let mut best = objective_of(table, &map);
    // Heap's algorithm
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                map.swap(0, i);
            } else {
                map.swap(c[i], i);
            }
            let obj = objective_of(table, &map);
            if obj > best {
                best = obj;
                best_map = map.clone();
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok((Permutation::new(best_map).expect("valid by construction"), best))
}

fn objective_of(table: &ScoreTable, map: &[usize]) -> f64 {
    map.iter()
        .enumerate()
        .map(|(i, &j)| table.get(i, j))
        .sum()
}

/// Full assignment followed by keeping the `ceil(r * n)` matched pairs
/// with the highest scores. Ties at the cutoff break by (score
/// descending, row index ascending), which makes the cut deterministic.
pub fn maximum_path(table: &ScoreTable, r: f64) -> Result<RecoveryOutcome> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::param("r", format!("must be in (0,1], got {r}")));
    }
    let n = table.n();
    let perm = hungarian_max(table);
    let mut ranked: Vec<(usize, usize, f64)> = (0..n)
        .map(|i| (i, perm.apply(i), table.get(i, perm.apply(i))))
        .collect();
    ranked.sort_by(|a, b| b.2.total_cmp(&a.2).then(a.0.cmp(&b.0)));
    let keep = ((r * n as f64).ceil() as usize).min(n);
    let pairs: Vec<(usize, usize)> = ranked[..keep].iter().map(|&(i, j, _)| (i, j)).collect();
    let alignment = PartialAlignment::new(pairs).expect("subset of an assignment");
    Ok(RecoveryOutcome::from_alignment(alignment, n, table))
}

/// Two-stage full recovery: threshold-and-clean fixes its survivors,
/// then the exact assignment solves the residual subtable of unmatched
/// rows and columns. The union is a full permutation.
pub fn two_stage_full(table: &ScoreTable, theta: f64) -> Permutation {
    let n = table.n();
    let fixed = threshold_and_clean(table, theta);
    let mut row_taken = vec![false; n];
    let mut col_taken = vec![false; n];
    let mut map = vec![usize::MAX; n];
    for &(i, j) in fixed.pairs() {
        row_taken[i] = true;
        col_taken[j] = true;
        map[i] = j;
    }
    let free_rows: Vec<usize> = (0..n).filter(|&i| !row_taken[i]).collect();
    let free_cols: Vec<usize> = (0..n).filter(|&j| !col_taken[j]).collect();
    let m = free_rows.len();
    if m > 0 {
        let mut sub = vec![0.0; m * m];
        for (a, &i) in free_rows.iter().enumerate() {
            for (b, &j) in free_cols.iter().enumerate() {
                sub[a * m + b] = table.get(i, j);
            }
        }
        let sub_table = ScoreTable::from_entries(m, sub).expect("square residual");
        let sub_perm = hungarian_max(&sub_table);
        for (a, &i) in free_rows.iter().enumerate() {
            map[i] = free_cols[sub_perm.apply(a)];
        }
    }
    Permutation::new(map).expect("union of disjoint matchings is a bijection")
}

/// Error flags of an alignment against the true permutation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlignmentEval {
    /// Output differs from the full true alignment (missing pairs count).
    pub err_full: bool,
    /// At least one output pair is a mismatch (missing pairs do not count).
    pub err_mismatch: bool,
    pub size: usize,
}

/// Compare an output against the ground-truth permutation. `err_full`
/// is the strict criterion (the output must be exactly all n true
/// pairs); `err_mismatch` only fires when some reported pair is wrong.
pub fn evaluate_alignment(out: &PartialAlignment, truth: &Permutation) -> AlignmentEval {
    let n = truth.len();
    let mut err_mismatch = false;
    for &(i, j) in out.pairs() {
        if truth.apply(i) != j {
            err_mismatch = true;
            break;
        }
    }
    let err_full = out.len() != n || err_mismatch;
    AlignmentEval {
        err_full,
        err_mismatch,
        size: out.len(),
    }
}
