//! Integer partitions and Littlewood–Richardson coefficients.
//!
//! Finite-length modules over a discrete valuation ring are classified by
//! partitions; a short exact sequence `0 -> T(mu) -> T(lambda) -> T(nu) -> 0`
//! exists exactly when `c^lambda_{mu,nu}` is nonzero (Green–Klein), which is
//! what [`lr_nonzero`] decides.

use std::fmt;

use serde::Serialize;

/// A partition stored as a nonincreasing list of positive parts.
///
/// Ordered by size, then with larger leading parts first, so `(2)` sorts
/// before `(1,1)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct Partition(Vec<u32>);

impl Ord for Partition {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.size()
            .cmp(&other.size())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Partition {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Partition {
    pub fn new(mut parts: Vec<u32>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of parts.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Sum of parts.
    pub fn size(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Largest part, 0 for the empty partition.
    pub fn largest(&self) -> u32 {
        self.0.first().copied().unwrap_or(0)
    }

    /// `i`-th part (0-based), 0 past the end.
    pub fn part(&self, i: usize) -> u32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    /// Young-diagram containment `other ⊆ self`.
    pub fn contains(&self, other: &Partition) -> bool {
        other.0.len() <= self.0.len() && other.0.iter().zip(&self.0).all(|(a, b)| a <= b)
    }

    /// Multiset union of parts.
    pub fn union(&self, other: &Partition) -> Partition {
        let mut parts = self.0.clone();
        parts.extend_from_slice(&other.0);
        Partition::new(parts)
    }

    /// Remove one occurrence of each part of `other`; `None` if some part is missing.
    pub fn remove(&self, other: &Partition) -> Option<Partition> {
        let mut parts = self.0.clone();
        for p in &other.0 {
            let pos = parts.iter().position(|q| q == p)?;
            parts.remove(pos);
        }
        Some(Partition(parts))
    }

    /// All partitions of size at most `max_size` with parts at most `max_part`.
    pub fn all_bounded(max_size: u32, max_part: u32) -> Vec<Partition> {
        let mut out = Vec::new();
        for n in 0..=max_size {
            partitions_of(n, max_part.min(n.max(1)), &mut Vec::new(), &mut out);
        }
        out.sort();
        out
    }

    /// All sub-partitions `mu ⊆ self`.
    pub fn subpartitions(&self) -> Vec<Partition> {
        let mut out = Vec::new();
        fn rec(lam: &[u32], i: usize, cap: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
            if i == lam.len() {
                out.push(Partition::new(cur.clone()));
                return;
            }
            for v in 0..=lam[i].min(cap) {
                cur.push(v);
                rec(lam, i + 1, v, cur, out);
                cur.pop();
            }
        }
        rec(&self.0, 0, u32::MAX, &mut Vec::new(), &mut out);
        out.sort();
        out.dedup();
        out
    }
}

fn partitions_of(n: u32, max_part: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
    if n == 0 {
        out.push(Partition(cur.clone()));
        return;
    }
    for p in (1..=max_part.min(n)).rev() {
        cur.push(p);
        partitions_of(n - p, p, cur, out);
        cur.pop();
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// Whether the Littlewood–Richardson coefficient `c^lambda_{mu,nu}` is nonzero.
pub fn lr_nonzero(lambda: &Partition, mu: &Partition, nu: &Partition) -> bool {
    if lambda.size() != mu.size() + nu.size() || !lambda.contains(mu) || !lambda.contains(nu) {
        return false;
    }
    if nu.is_empty() {
        return lambda == mu;
    }
    if mu.is_empty() {
        return lambda == nu;
    }
    let rows = lambda.len();
    let start: Vec<usize> = (0..rows).map(|i| mu.part(i) as usize).collect();
    let end: Vec<usize> = (0..rows).map(|i| lambda.part(i) as usize).collect();
    let mut grid: Vec<Vec<u32>> = end.iter().map(|&e| vec![0; e]).collect();
    let mut counts = vec![0u32; nu.len() + 1];
    let search = LrSearch {
        start: &start,
        end: &end,
        content: nu.parts(),
    };
    search.fill(0, end.first().copied().unwrap_or(0), &mut grid, &mut counts)
}

struct LrSearch<'a> {
    start: &'a [usize],
    end: &'a [usize],
    content: &'a [u32],
}

impl LrSearch<'_> {
    /// Fill cell `(row, col - 1)`; rows are filled right to left so the
    /// reverse reading word grows one letter at a time.
    fn fill(&self, row: usize, col: usize, grid: &mut [Vec<u32>], counts: &mut [u32]) -> bool {
        if row == self.end.len() {
            return true;
        }
        if col == self.start[row] {
            let next = row + 1;
            let next_col = self.end.get(next).copied().unwrap_or(0);
            return self.fill(next, next_col, grid, counts);
        }
        let j = col - 1;
        let max_by_row = if col < self.end[row] {
            grid[row][col]
        } else {
            self.content.len() as u32
        };
        let min_by_col = if row > 0 && j >= self.start[row - 1] {
            grid[row - 1][j] + 1
        } else {
            1
        };
        for v in min_by_col..=max_by_row {
            let vi = v as usize;
            if counts[vi] >= self.content[vi - 1] {
                continue;
            }
            if vi > 1 && counts[vi] + 1 > counts[vi - 1] {
                continue;
            }
            counts[vi] += 1;
            grid[row][j] = v;
            if self.fill(row, j, grid, counts) {
                return true;
            }
            counts[vi] -= 1;
        }
        false
    }
}
