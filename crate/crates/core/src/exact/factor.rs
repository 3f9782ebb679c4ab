//! Factorization of univariate polynomials over `F_p` and `Q`.
//!
//! Over `F_p` we use square-free decomposition, distinct-degree splitting and
//! a Cantor–Zassenhaus equal-degree split whose auxiliary polynomials are
//! enumerated in a fixed order, so results never depend on a random source.
//! Over `Q` the square-free parts are split with Kronecker's method, which is
//! exponential but exact and adequate for the small point data used here.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::poly::Poly;
use super::scalar::{Field, Scalar};
use crate::error::{Error, Result};

/// `f = unit * prod(factor^multiplicity)`, factors monic, irreducible, sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub unit: Scalar,
    pub factors: Vec<(Poly, u32)>,
}

impl Factorization {
    /// Multiply the factorization back out.
    pub fn expand(&self) -> Poly {
        self.factors
            .iter()
            .fold(Poly::constant(self.unit.clone()), |acc, (g, m)| {
                acc.mul(&g.pow(*m))
            })
    }
}

pub fn factor_poly(f: &Poly) -> Result<Factorization> {
    let lc = f.leading().ok_or(Error::ZeroPolynomial)?.clone();
    let monic = f.monic();
    let mut factors: Vec<(Poly, u32)> = Vec::new();
    for (part, mult) in squarefree(&monic) {
        let pieces = match f.field() {
            Field::Fp(_) => split_fp(&part),
            Field::Rationals => split_q(&part),
        };
        factors.extend(pieces.into_iter().map(|g| (g, mult)));
    }
    factors.sort();
    // merge equal factors (square-free parts are coprime, so this is a no-op
    // in exact arithmetic, kept for canonical output)
    let mut merged: Vec<(Poly, u32)> = Vec::new();
    for (g, m) in factors {
        match merged.last_mut() {
            Some((h, k)) if *h == g => *k += m,
            _ => merged.push((g, m)),
        }
    }
    Ok(Factorization {
        unit: lc,
        factors: merged,
    })
}

pub fn is_irreducible(f: &Poly) -> bool {
    if f.is_zero() || f.is_constant() {
        return false;
    }
    match f.field() {
        Field::Fp(_) => ben_or(&f.monic()),
        Field::Rationals => factor_poly(f)
            .map(|fac| fac.factors.len() == 1 && fac.factors[0].1 == 1)
            .unwrap_or(false),
    }
}

/// All monic irreducibles over `F_p` of degree `1..=max_degree`, sorted.
pub fn irreducibles_up_to_degree(field: Field, max_degree: usize) -> Result<Vec<Poly>> {
    let p = match field {
        Field::Fp(p) => p as u64,
        Field::Rationals => return Err(Error::InfiniteField("Q".into())),
    };
    let mut out = Vec::new();
    for d in 1..=max_degree {
        let count = p.checked_pow(d as u32).ok_or_else(|| {
            Error::InvalidDescriptor(format!("too many candidates of degree {d}"))
        })?;
        for index in 0..count {
            let mut coeffs = digits(index, p, d);
            coeffs.push(1);
            let g = Poly::from_i64s(field, &coeffs);
            if ben_or(&g) {
                out.push(g);
            }
        }
    }
    out.sort();
    Ok(out)
}

fn digits(mut n: u64, base: u64, len: usize) -> Vec<i64> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push((n % base) as i64);
        n /= base;
    }
    out
}

/// Ben-Or irreducibility test over `F_p` for a monic polynomial.
fn ben_or(f: &Poly) -> bool {
    let Field::Fp(p) = f.field() else {
        unreachable!()
    };
    let n = f.deg();
    if n == 0 {
        return false;
    }
    let t = Poly::t(f.field());
    let p_big = BigUint::from(p);
    let mut h = t.rem(f);
    for _ in 0..n / 2 {
        h = h.pow_mod(&p_big, f);
        if !f.gcd(&h.sub(&t)).is_constant() {
            return false;
        }
    }
    true
}

/// Square-free decomposition of a monic polynomial: pairs `(g, m)` with
/// `f = prod g^m`, each `g` square-free and monic, the `g` pairwise coprime.
fn squarefree(f: &Poly) -> Vec<(Poly, u32)> {
    if f.is_constant() {
        return Vec::new();
    }
    let field = f.field();
    let mut out = Vec::new();
    let mut c = f.gcd(&f.derivative());
    let mut w = f.div_rem(&c).0;
    let mut i = 1;
    while !w.is_constant() {
        let y = w.gcd(&c);
        let z = w.div_rem(&y).0;
        if !z.is_constant() {
            out.push((z.monic(), i));
        }
        i += 1;
        w = y;
        c = c.div_rem(&w).0;
    }
    if !c.is_constant() {
        // characteristic p: c is a p-th power
        let p = field.characteristic() as usize;
        let root = Poly::from_coeffs(field, c.coeffs().iter().step_by(p).cloned().collect());
        for (g, m) in squarefree(&root.monic()) {
            out.push((g, m * p as u32));
        }
    }
    out
}

fn split_fp(f: &Poly) -> Vec<Poly> {
    let mut out = Vec::new();
    for (g, d) in distinct_degree(f) {
        equal_degree(&g, d, &mut out);
    }
    out
}

fn distinct_degree(f: &Poly) -> Vec<(Poly, usize)> {
    let Field::Fp(p) = f.field() else {
        unreachable!()
    };
    let t = Poly::t(f.field());
    let p_big = BigUint::from(p);
    let mut g = f.clone();
    let mut h = t.rem(&g);
    let mut out = Vec::new();
    let mut i = 1;
    while g.deg() >= 2 * i {
        h = h.pow_mod(&p_big, &g);
        let d = g.gcd(&h.sub(&t));
        if !d.is_constant() {
            g = g.div_rem(&d).0;
            h = h.rem(&g);
            out.push((d, i));
        }
        i += 1;
    }
    if !g.is_constant() {
        let d = g.deg();
        out.push((g, d));
    }
    out
}

/// Split a square-free product of irreducibles of degree `d`.
fn equal_degree(f: &Poly, d: usize, out: &mut Vec<Poly>) {
    let n = f.deg();
    if n == d {
        out.push(f.monic());
        return;
    }
    let field = f.field();
    let Field::Fp(p) = field else { unreachable!() };
    let p = p as u64;
    let exponent = (BigUint::from(p).pow(d as u32) - BigUint::one()) / BigUint::from(2u32);
    let mut index: u64 = p;
    loop {
        // enumerate non-constant polynomials of degree < n in a fixed order
        let coeffs = digits(index, p, n);
        index += 1;
        let a = Poly::from_i64s(field, &coeffs);
        if a.is_constant() {
            continue;
        }
        let b = if p == 2 {
            let mut acc = Poly::zero(field);
            let mut power = a.rem(f);
            for _ in 0..d {
                acc = acc.add(&power);
                power = power.mul(&power).rem(f);
            }
            acc
        } else {
            a.pow_mod(&exponent, f).sub(&Poly::one(field))
        };
        let u = f.gcd(&b);
        if !u.is_constant() && u.deg() < n {
            let v = f.div_rem(&u).0;
            equal_degree(&u, d, out);
            equal_degree(&v, d, out);
            return;
        }
    }
}

/// Primitive integer polynomial with the same roots as a rational one.
fn to_primitive_integer(f: &Poly) -> Vec<BigInt> {
    let rats: Vec<BigRational> = f
        .coeffs()
        .iter()
        .map(|c| match c {
            Scalar::Rat(r) => r.clone(),
            _ => unreachable!(),
        })
        .collect();
    let lcm = rats
        .iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let ints: Vec<BigInt> = rats.iter().map(|r| (r * &lcm).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    ints.into_iter().map(|c| c / &g).collect()
}

fn eval_int(coeffs: &[BigInt], x: &BigInt) -> BigInt {
    coeffs
        .iter()
        .rev()
        .fold(BigInt::zero(), |acc, c| acc * x + c)
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            small.push(d.clone());
            let q = &n / &d;
            if q != d {
                large.push(q);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

fn rat_poly(coeffs: Vec<BigRational>) -> Poly {
    Poly::from_coeffs(Field::Rationals, coeffs.into_iter().map(Scalar::Rat).collect())
}

/// Split a square-free monic rational polynomial into monic irreducibles.
fn split_q(f: &Poly) -> Vec<Poly> {
    let mut pending = vec![f.clone()];
    let mut out = Vec::new();
    while let Some(g) = pending.pop() {
        if g.deg() <= 1 {
            out.push(g.monic());
            continue;
        }
        match kronecker_factor(&g) {
            Some(h) => {
                let q = g.div_rem(&h).0;
                pending.push(h.monic());
                pending.push(q.monic());
            }
            None => out.push(g.monic()),
        }
    }
    out
}

/// Find a nontrivial factor of `f` (degree >= 2) or prove there is none.
fn kronecker_factor(f: &Poly) -> Option<Poly> {
    let ints = to_primitive_integer(f);
    let n = ints.len() - 1;
    // sample points where f does not vanish
    let mut points: Vec<(BigInt, BigInt)> = Vec::new();
    let mut k: i64 = 0;
    while points.len() <= n / 2 {
        let x = BigInt::from(if k % 2 == 0 { k / 2 } else { -(k + 1) / 2 });
        k += 1;
        let v = eval_int(&ints, &x);
        if v.is_zero() {
            // rational root at an integer point
            let root = BigRational::from_integer(x);
            return Some(rat_poly(vec![-root, BigRational::one()]));
        }
        points.push((x, v));
    }
    for d in 1..=n / 2 {
        let pts = &points[..=d];
        let choices: Vec<Vec<BigInt>> = pts
            .iter()
            .enumerate()
            .map(|(i, (_, v))| {
                let divs = divisors(v);
                if i == 0 {
                    divs
                } else {
                    divs.iter().flat_map(|x| [x.clone(), -x.clone()]).collect()
                }
            })
            .collect();
        let mut idx = vec![0usize; d + 1];
        'search: loop {
            let values: Vec<BigInt> = idx
                .iter()
                .zip(&choices)
                .map(|(&i, c)| c[i].clone())
                .collect();
            if let Some(g) = interpolate(pts, &values, d) {
                if f.rem(&g).is_zero() {
                    return Some(g);
                }
            }
            for slot in 0..=d {
                idx[slot] += 1;
                if idx[slot] < choices[slot].len() {
                    continue 'search;
                }
                idx[slot] = 0;
            }
            break;
        }
    }
    None
}

/// Lagrange interpolation through `(x_i, y_i)`; returns the polynomial only
/// when it has exact degree `d` and integer coefficients.
fn interpolate(pts: &[(BigInt, BigInt)], values: &[BigInt], d: usize) -> Option<Poly> {
    let mut acc = vec![BigRational::zero(); d + 1];
    for (i, (xi, _)) in pts.iter().enumerate() {
        let mut basis = vec![BigRational::one()];
        let mut denom = BigRational::one();
        for (j, (xj, _)) in pts.iter().enumerate() {
            if i == j {
                continue;
            }
            let mut next = vec![BigRational::zero(); basis.len() + 1];
            for (k, b) in basis.iter().enumerate() {
                next[k + 1] += b;
                next[k] -= b * BigRational::from_integer(xj.clone());
            }
            basis = next;
            denom *= BigRational::from_integer(xi - xj);
        }
        let scale = BigRational::from_integer(values[i].clone()) / denom;
        for (k, b) in basis.iter().enumerate() {
            acc[k] += b * &scale;
        }
    }
    if acc.last().is_none_or(Zero::is_zero) || acc.iter().any(|c| !c.is_integer()) {
        return None;
    }
    Some(rat_poly(acc))
}

/// Number of monic irreducibles of degree `n` over `F_q` by the necklace
/// formula `(1/n) sum_{d | n} mu(d) q^(n/d)`.
pub fn necklace_count(q: u64, n: u32) -> u64 {
    let mut total: i128 = 0;
    for d in 1..=n {
        if n % d == 0 {
            total += mobius(d) as i128 * (q as i128).pow(n / d);
        }
    }
    (total / n as i128).to_u64().unwrap_or(0)
}

fn mobius(mut n: u32) -> i32 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}
