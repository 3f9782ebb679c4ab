//! Dense univariate polynomials over `F_p` or `Q`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::scalar::{Field, Scalar};
use crate::error::{Error, Result};

/// Degree of a polynomial; the zero polynomial has degree `NegInfinity`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInfinity,
    Finite(usize),
}

/// A polynomial in one variable. `coeffs[i]` is the coefficient of `t^i`;
/// the last coefficient is nonzero unless the polynomial is zero (empty vec).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    field: Field,
    coeffs: Vec<Scalar>,
}

impl Poly {
    pub fn zero(field: Field) -> Poly {
        Poly {
            field,
            coeffs: Vec::new(),
        }
    }

    pub fn one(field: Field) -> Poly {
        Poly::constant(field.one())
    }

    pub fn constant(c: Scalar) -> Poly {
        let field = field_of(&c);
        Poly::from_coeffs(field, vec![c])
    }

    /// The variable `t`.
    pub fn t(field: Field) -> Poly {
        Poly::from_coeffs(field, vec![field.zero(), field.one()])
    }

    /// `t - a`.
    pub fn linear(field: Field, a: &Scalar) -> Poly {
        Poly::from_coeffs(field, vec![a.neg(), field.one()])
    }

    pub fn from_coeffs(field: Field, mut coeffs: Vec<Scalar>) -> Poly {
        while coeffs.last().is_some_and(Scalar::is_zero) {
            coeffs.pop();
        }
        Poly { field, coeffs }
    }

    pub fn from_i64s(field: Field, coeffs: &[i64]) -> Poly {
        Poly::from_coeffs(field, coeffs.iter().map(|&c| field.from_i64(c)).collect())
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Scalar {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Degree {
        match self.coeffs.len() {
            0 => Degree::NegInfinity,
            n => Degree::Finite(n - 1),
        }
    }

    /// Degree as a number; panics on the zero polynomial.
    pub fn deg(&self) -> usize {
        match self.degree() {
            Degree::Finite(d) => d,
            Degree::NegInfinity => panic!("degree of the zero polynomial"),
        }
    }

    pub fn leading(&self) -> Option<&Scalar> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(Scalar::is_one)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => self.clone(),
            Some(lc) => self.scale(&lc.inv()),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        Poly::from_coeffs(self.field, self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i).add(&other.coeff(i))).collect();
        Poly::from_coeffs(self.field, coeffs)
    }

    pub fn neg(&self) -> Poly {
        Poly::from_coeffs(self.field, self.coeffs.iter().map(Scalar::neg).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.field);
        }
        let mut out = vec![self.field.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Poly::from_coeffs(self.field, out)
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one(self.field);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Euclidean division. Panics when dividing by zero.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let lc = divisor.leading().expect("division by the zero polynomial");
        let lc_inv = lc.inv();
        let dd = divisor.deg();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(self.field), self.clone());
        }
        let mut quot = vec![self.field.zero(); rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = rem[i].mul(&lc_inv);
            if c.is_zero() {
                continue;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[i - dd + j] = rem[i - dd + j].sub(&c.mul(d));
            }
            quot[i - dd] = c;
        }
        rem.truncate(dd);
        (
            Poly::from_coeffs(self.field, quot),
            Poly::from_coeffs(self.field, rem),
        )
    }

    pub fn rem(&self, divisor: &Poly) -> Poly {
        self.div_rem(divisor).1
    }

    pub fn divides(&self, other: &Poly) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        other.rem(self).is_zero()
    }

    /// Monic greatest common divisor (zero if both are zero).
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Poly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.mul(&self.field.from_i64(i as i64)))
            .collect();
        Poly::from_coeffs(self.field, coeffs)
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        let mut acc = self.field.zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    /// `self^e mod m` by square-and-multiply.
    pub fn pow_mod(&self, e: &num_bigint::BigUint, m: &Poly) -> Poly {
        let mut acc = Poly::one(self.field).rem(m);
        let base = self.rem(m);
        for bit in (0..e.bits()).rev() {
            acc = acc.mul(&acc).rem(m);
            if e.bit(bit) {
                acc = acc.mul(&base).rem(m);
            }
        }
        acc
    }

    /// Parse a polynomial in the variable `var`, e.g. `t^2+t+1`, `2t-1/3`,
    /// `3*t^4 - t`.
    pub fn parse(field: Field, var: &str, text: &str) -> Result<Poly> {
        PolyParser {
            field,
            var,
            chars: text.char_indices().collect(),
            pos: 0,
        }
        .parse()
    }

    /// Render with a chosen variable name.
    pub fn display_with<'a>(&'a self, var: &'a str) -> impl fmt::Display + 'a {
        PolyDisplay { poly: self, var }
    }
}

fn field_of(c: &Scalar) -> Field {
    match c {
        Scalar::Mod { modulus, .. } => Field::Fp(*modulus),
        Scalar::Rat(_) => Field::Rationals,
        Scalar::Int(_) => panic!("integer coefficients are not supported"),
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Degree first, then coefficients from the leading term down.
impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

struct PolyDisplay<'a> {
    poly: &'a Poly,
    var: &'a str,
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.poly.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let negative = c.is_negative();
            let magnitude = if negative { c.neg() } else { c.clone() };
            if negative {
                write!(f, "-")?;
            } else if !first {
                write!(f, "+")?;
            }
            first = false;
            let show_coeff = i == 0 || !magnitude.is_one();
            if show_coeff {
                write!(f, "{magnitude}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "{}", self.var)?,
                _ => write!(f, "{}^{}", self.var, i)?,
            }
        }
        Ok(())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with("t"))
    }
}

struct PolyParser<'a> {
    field: Field,
    var: &'a str,
    chars: Vec<(usize, char)>,
    pos: usize,
}

impl PolyParser<'_> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn column(&self) -> usize {
        self.chars.get(self.pos).map_or_else(
            || self.chars.last().map_or(1, |&(i, _)| i + 2),
            |&(i, _)| i + 1,
        )
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn number(&mut self) -> Option<BigInt> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        let s: String = self.chars[start..self.pos].iter().map(|&(_, c)| c).collect();
        s.parse().ok()
    }

    fn parse(mut self) -> Result<Poly> {
        let mut acc = Poly::zero(self.field);
        let mut any = false;
        loop {
            self.skip_ws();
            let negative = match self.peek() {
                Some('-') => {
                    self.pos += 1;
                    true
                }
                Some('+') if any => {
                    self.pos += 1;
                    false
                }
                None if any => break,
                _ if any => return Err(Error::parse(self.column(), "expected '+' or '-'")),
                _ => false,
            };
            self.skip_ws();
            let term = self.term()?;
            acc = if negative { acc.sub(&term) } else { acc.add(&term) };
            any = true;
        }
        Ok(acc)
    }

    fn scalar(&self, num: BigInt, den: Option<BigInt>) -> Result<Scalar> {
        let den = den.unwrap_or_else(|| BigInt::from(1));
        if den == BigInt::from(0) {
            return Err(Error::parse(self.column(), "zero denominator"));
        }
        match self.field {
            Field::Rationals => Ok(Scalar::Rat(BigRational::new(num, den))),
            Field::Fp(p) => {
                let p_big = BigInt::from(p);
                let reduce = |v: &BigInt| -> u32 {
                    let r = ((v % &p_big) + &p_big) % &p_big;
                    u32::try_from(r).expect("residue fits")
                };
                let d = reduce(&den);
                if d == 0 {
                    return Err(Error::parse(self.column(), "denominator divisible by p"));
                }
                let n = Scalar::Mod {
                    value: reduce(&num),
                    modulus: p,
                };
                Ok(n.mul(&Scalar::Mod { value: d, modulus: p }.inv()))
            }
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let coeff = match self.number() {
            Some(n) => {
                let den = if self.peek() == Some('/') {
                    self.pos += 1;
                    Some(self.number().ok_or_else(|| {
                        Error::parse(self.column(), "expected denominator")
                    })?)
                } else {
                    None
                };
                Some(self.scalar(n, den)?)
            }
            None => None,
        };
        self.skip_ws();
        if self.peek() == Some('*') {
            self.pos += 1;
            self.skip_ws();
        }
        let rest: String = self.chars[self.pos..].iter().map(|&(_, c)| c).collect();
        let mut power = 0u32;
        if rest.starts_with(self.var) {
            self.pos += self.var.chars().count();
            power = 1;
            if self.peek() == Some('^') {
                self.pos += 1;
                let e = self
                    .number()
                    .ok_or_else(|| Error::parse(self.column(), "expected exponent"))?;
                power = u32::try_from(e)
                    .map_err(|_| Error::parse(self.column(), "exponent too large"))?;
            }
        } else if coeff.is_none() {
            return Err(Error::parse(
                self.column(),
                format!("expected a number or '{}'", self.var),
            ));
        }
        let c = coeff.unwrap_or_else(|| self.field.one());
        let mut coeffs = vec![self.field.zero(); power as usize];
        coeffs.push(c);
        Ok(Poly::from_coeffs(self.field, coeffs))
    }
}
