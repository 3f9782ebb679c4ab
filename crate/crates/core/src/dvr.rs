//! Isomorphism-type calculus for finitely generated modules over a discrete
//! valuation ring `V`.
//!
//! A module is `V^free ⊕ T(torsion)` with `T(λ) = ⊕ V/π^{λ_i}`. Everything
//! here is independent of the residue field. Sequences with a free kernel are
//! reduced to finite length by truncating the free part at a level `N` large
//! enough to separate the truncated free parts from genuine torsion, and then
//! decided by the Littlewood–Richardson rule.

use std::fmt;

use serde::Serialize;

use crate::partition::{lr_nonzero, Partition};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LocalType {
    pub free: u32,
    pub torsion: Partition,
}

impl LocalType {
    pub fn new(free: u32, torsion: Partition) -> Self {
        LocalType { free, torsion }
    }

    pub fn torsion(parts: &[u32]) -> Self {
        LocalType::new(0, Partition::new(parts.to_vec()))
    }

    pub fn is_zero(&self) -> bool {
        self.free == 0 && self.torsion.is_empty()
    }
}

impl fmt::Display for LocalType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "V^{}+T{}", self.free, self.torsion)
    }
}

/// `sub` is isomorphic to a submodule of `module`.
pub fn is_sub(sub: &LocalType, module: &LocalType) -> bool {
    sub.free <= module.free && module.torsion.contains(&sub.torsion)
}

/// `quot` is isomorphic to a quotient of `module`. The free rank drop `k`
/// lets the first `k` torsion parts of the quotient be arbitrary; the rest
/// must fit under the torsion of `module`.
pub fn is_quot(quot: &LocalType, module: &LocalType) -> bool {
    if quot.free > module.free {
        return false;
    }
    let k = (module.free - quot.free) as usize;
    quot.torsion
        .parts()
        .iter()
        .enumerate()
        .skip(k)
        .all(|(i, &v)| v <= module.torsion.part(i - k))
}

/// A short exact sequence `0 -> a -> e -> b -> 0` exists.
pub fn ses(a: &LocalType, e: &LocalType, b: &LocalType) -> bool {
    if e.free != a.free + b.free {
        return false;
    }
    // the free part of b splits off, leaving 0 -> a -> e' -> T(beta) -> 0
    let (alpha, eps, beta) = (&a.torsion, &e.torsion, &b.torsion);
    if !eps.contains(alpha) {
        return false;
    }
    let r = a.free;
    if r == 0 {
        return lr_nonzero(eps, alpha, beta);
    }
    let n = alpha.largest() + beta.largest() + eps.largest() + 1;
    let floor = n - beta.largest();
    let big = Partition::new(vec![n; r as usize]).union(eps);
    let target = (n * r + eps.size()) as i64 - beta.size() as i64 - alpha.size() as i64;
    if target < (floor * r) as i64 || target > (n * r) as i64 {
        return false;
    }
    let mut found = false;
    bounded_compositions(r as usize, floor, n, target as u32, &mut Vec::new(), &mut |gamma| {
        if !found {
            let sub = Partition::new(gamma.to_vec()).union(alpha);
            found = lr_nonzero(&big, &sub, beta);
        }
    });
    found
}

/// Nonincreasing sequences of `len` values in `[lo, hi]` summing to `total`.
fn bounded_compositions(
    len: usize,
    lo: u32,
    hi: u32,
    total: u32,
    cur: &mut Vec<u32>,
    visit: &mut dyn FnMut(&[u32]),
) {
    if len == 0 {
        if total == 0 {
            visit(cur);
        }
        return;
    }
    let cap = cur.last().copied().unwrap_or(hi).min(hi);
    for v in (lo..=cap).rev() {
        if v > total {
            continue;
        }
        let rest = total - v;
        if rest < lo * (len as u32 - 1) || rest > v * (len as u32 - 1) {
            continue;
        }
        cur.push(v);
        bounded_compositions(len - 1, lo, hi, rest, cur, visit);
        cur.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(parts: &[u32]) -> LocalType {
        LocalType::torsion(parts)
    }

    fn lt(free: u32, parts: &[u32]) -> LocalType {
        LocalType::new(free, Partition::new(parts.to_vec()))
    }

    #[test]
    fn torsion_extensions_of_simple_by_simple() {
        assert!(ses(&t(&[1]), &t(&[2]), &t(&[1])));
        assert!(ses(&t(&[1]), &t(&[1, 1]), &t(&[1])));
        assert!(!ses(&t(&[1]), &t(&[2, 1]), &t(&[1])));
    }

    #[test]
    fn free_kernel_sequences() {
        // 0 -> V -> V -> V/π^k -> 0
        assert!(ses(&lt(1, &[]), &lt(1, &[]), &t(&[3])));
        // 0 -> V -> V ⊕ V/π -> V/π -> 0 (split)
        assert!(ses(&lt(1, &[]), &lt(1, &[1]), &t(&[1])));
        // V/π^2 cannot sit in V ⊕ V/π
        assert!(!ses(&lt(1, &[2]), &lt(1, &[1]), &t(&[1])));
        // 0 -> V ⊕ V/π -> V -> ... impossible: torsion cannot vanish
        assert!(!ses(&lt(1, &[1]), &lt(1, &[]), &t(&[1])));
        // 0 -> V ⊕ V/π -> V ⊕ V/π^2 -> V/π -> 0
        assert!(ses(&lt(1, &[1]), &lt(1, &[2]), &t(&[1])));
        // 0 -> V ⊕ V/π -> V ⊕ V/π -> V/π -> 0 (cokernel of π on the free part)
        assert!(ses(&lt(1, &[1]), &lt(1, &[1]), &t(&[1])));
        // rank-2 kernel: V^2 -> V^2 with cokernel V/π ⊕ V/π
        assert!(ses(&lt(2, &[]), &lt(2, &[]), &t(&[1, 1])));
        assert!(!ses(&lt(1, &[]), &lt(1, &[]), &t(&[1, 1])));
    }

    #[test]
    fn free_quotient_splits() {
        assert!(ses(&t(&[2]), &lt(1, &[2]), &lt(1, &[])));
        assert!(!ses(&t(&[2]), &lt(1, &[1]), &lt(1, &[])));
    }

    #[test]
    fn sub_and_quot_criteria() {
        assert!(is_sub(&t(&[1]), &lt(0, &[2])));
        assert!(!is_sub(&t(&[1]), &lt(1, &[])));
        assert!(is_quot(&t(&[5]), &lt(1, &[])));
        assert!(!is_quot(&t(&[1, 1]), &lt(1, &[])));
        assert!(is_quot(&t(&[3, 1]), &lt(1, &[1])));
        assert!(!is_quot(&lt(1, &[]), &t(&[1])));
    }
}
