//! Matrices over a principal ideal domain and their Smith normal form.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::poly::{Degree, Poly};

/// The operations the Smith normal form needs from `Z` or `k[t]`.
pub trait EuclideanDomain: Clone + PartialEq + fmt::Debug {
    /// Pivot size: absolute value or degree.
    type Size: Ord;

    fn is_zero(&self) -> bool;
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn size(&self) -> Self::Size;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div_rem(&self, other: &Self) -> (Self, Self);
    /// Canonical associate: positive integer or monic polynomial.
    fn normalize(&self) -> Self;

    fn divides(&self, other: &Self) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        other.div_rem(self).1.is_zero()
    }
}

impl EuclideanDomain for BigInt {
    type Size = BigUint;

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        BigInt::zero()
    }
    fn one_like(&self) -> Self {
        BigInt::one()
    }
    fn size(&self) -> BigUint {
        self.magnitude().clone()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div_rem(&self, other: &Self) -> (Self, Self) {
        self.div_mod_floor(other)
    }
    fn normalize(&self) -> Self {
        self.abs()
    }
}

impl EuclideanDomain for Poly {
    type Size = Degree;

    fn is_zero(&self) -> bool {
        Poly::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        Poly::zero(self.field())
    }
    fn one_like(&self) -> Self {
        Poly::one(self.field())
    }
    fn size(&self) -> Degree {
        self.degree()
    }
    fn add(&self, other: &Self) -> Self {
        Poly::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        Poly::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        Poly::mul(self, other)
    }
    fn div_rem(&self, other: &Self) -> (Self, Self) {
        Poly::div_rem(self, other)
    }
    fn normalize(&self) -> Self {
        self.monic()
    }
}

/// Dense row-major matrix over a PID.
#[derive(Clone, Debug, PartialEq)]
pub struct PidMatrix<R> {
    rows: usize,
    cols: usize,
    entries: Vec<R>,
}

/// Output of [`smith_normal_form`].
#[derive(Clone, Debug, PartialEq)]
pub struct SmithForm<R> {
    /// `min(rows, cols)` diagonal entries: the nonzero invariant factors
    /// `d_1 | d_2 | ... | d_r` (normalized) followed by zeros.
    pub diagonal: Vec<R>,
    /// Number of nonzero invariant factors.
    pub rank: usize,
}

impl<R> SmithForm<R> {
    pub fn zero_count(&self) -> usize {
        self.diagonal.len() - self.rank
    }
}

impl<R: EuclideanDomain> PidMatrix<R> {
    pub fn new(rows: usize, cols: usize, entries: Vec<R>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count mismatch");
        PidMatrix {
            rows,
            cols,
            entries,
        }
    }

    pub fn from_rows(rows: Vec<Vec<R>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        PidMatrix::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn diagonal(zero: &R, diag: &[R]) -> Self {
        let n = diag.len();
        let mut entries = vec![zero.zero_like(); n * n];
        for (i, d) in diag.iter().enumerate() {
            entries[i * n + i] = d.clone();
        }
        PidMatrix::new(n, n, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &R {
        &self.entries[i * self.cols + j]
    }

    fn set(&mut self, i: usize, j: usize, v: R) {
        self.entries[i * self.cols + j] = v;
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.entries.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.entries.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[target] -= q * row[source]
    fn row_axpy(&mut self, target: usize, source: usize, q: &R) {
        for j in 0..self.cols {
            let v = self.get(target, j).sub(&q.mul(self.get(source, j)));
            self.set(target, j, v);
        }
    }

    fn col_axpy(&mut self, target: usize, source: usize, q: &R) {
        for i in 0..self.rows {
            let v = self.get(i, target).sub(&q.mul(self.get(i, source)));
            self.set(i, target, v);
        }
    }
}

/// Smith normal form by repeated smallest-pivot elimination. Pivots are the
/// nonzero entry of least size in the active block, ties broken row-major.
pub fn smith_normal_form<R: EuclideanDomain>(m: &PidMatrix<R>) -> SmithForm<R> {
    let mut a = m.clone();
    let n = a.rows.min(a.cols);
    let mut rank = 0;
    for t in 0..n {
        loop {
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..a.rows {
                for j in t..a.cols {
                    let e = a.get(i, j);
                    if e.is_zero() {
                        continue;
                    }
                    if pivot.is_none_or(|(pi, pj)| e.size() < a.get(pi, pj).size()) {
                        pivot = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = pivot else {
                return finish(a, n, rank);
            };
            a.swap_rows(t, pi);
            a.swap_cols(t, pj);
            let p = a.get(t, t).clone();
            let mut clean = true;
            for i in t + 1..a.rows {
                let (q, r) = a.get(i, t).div_rem(&p);
                if !q.is_zero() {
                    a.row_axpy(i, t, &q);
                }
                clean &= r.is_zero();
            }
            for j in t + 1..a.cols {
                let (q, r) = a.get(t, j).div_rem(&p);
                if !q.is_zero() {
                    a.col_axpy(j, t, &q);
                }
                clean &= r.is_zero();
            }
            if !clean {
                continue;
            }
            let offender = (t + 1..a.rows)
                .find(|&i| (t + 1..a.cols).any(|j| !p.divides(a.get(i, j))));
            match offender {
                Some(i) => {
                    // row[t] += row[i]; the next pass reduces below p
                    let minus_one = p.zero_like().sub(&p.one_like());
                    a.row_axpy(t, i, &minus_one);
                }
                None => break,
            }
        }
        rank += 1;
    }
    finish(a, n, rank)
}

fn finish<R: EuclideanDomain>(a: PidMatrix<R>, n: usize, rank: usize) -> SmithForm<R> {
    let diagonal = (0..n)
        .map(|i| {
            if i < rank {
                a.get(i, i).normalize()
            } else {
                a.get(i, i).zero_like()
            }
        })
        .collect();
    SmithForm { diagonal, rank }
}
