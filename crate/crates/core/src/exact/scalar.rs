//! Exact scalars: big integers, rationals and residues modulo a prime.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Coefficient field of a polynomial ring `k[t]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    /// The prime field `F_p`, `p < 2^31`.
    Fp(u32),
    /// The rationals.
    Rationals,
}

impl Field {
    /// `F_p`, checking that `p` is a prime below `2^31`.
    pub fn prime(p: u64) -> Result<Field> {
        if p >= 1 << 31 || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Field::Fp(p as u32))
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Fp(p) => *p as u64,
            Field::Rationals => 0,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Field::Fp(_))
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        match self {
            Field::Fp(p) => Scalar::Mod {
                value: v.rem_euclid(*p as i64) as u32,
                modulus: *p,
            },
            Field::Rationals => Scalar::Rat(BigRational::from_integer(BigInt::from(v))),
        }
    }

    /// Every element of a finite field, in increasing order of representative.
    pub fn elements(&self) -> Result<Vec<Scalar>> {
        match self {
            Field::Fp(p) => Ok((0..*p)
                .map(|value| Scalar::Mod { value, modulus: *p })
                .collect()),
            Field::Rationals => Err(Error::InfiniteField("Q".into())),
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Fp(p) => write!(f, "F{p}"),
            Field::Rationals => write!(f, "Q"),
        }
    }
}

/// Trial-division primality test; the moduli here are small.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// An exact scalar. Rationals are kept in lowest terms with positive
/// denominator (guaranteed by `BigRational`), residues in `[0, p)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Int(BigInt),
    Rat(BigRational),
    Mod { value: u32, modulus: u32 },
}

fn mismatch() -> ! {
    panic!("arithmetic between scalars of different kinds")
}

impl Scalar {
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Int(v) => v.is_zero(),
            Scalar::Rat(v) => v.is_zero(),
            Scalar::Mod { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Int(v) => v.is_one(),
            Scalar::Rat(v) => v.is_one(),
            Scalar::Mod { value, .. } => *value == 1,
        }
    }

    pub fn zero_like(&self) -> Scalar {
        match self {
            Scalar::Int(_) => Scalar::Int(BigInt::zero()),
            Scalar::Rat(_) => Scalar::Rat(BigRational::zero()),
            Scalar::Mod { modulus, .. } => Scalar::Mod {
                value: 0,
                modulus: *modulus,
            },
        }
    }

    pub fn one_like(&self) -> Scalar {
        match self {
            Scalar::Int(_) => Scalar::Int(BigInt::one()),
            Scalar::Rat(_) => Scalar::Rat(BigRational::one()),
            Scalar::Mod { modulus, .. } => Scalar::Mod {
                value: 1,
                modulus: *modulus,
            },
        }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Int(a), Scalar::Int(b)) => Scalar::Int(a + b),
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a + b),
            (Scalar::Mod { value: a, modulus }, Scalar::Mod { value: b, .. }) => Scalar::Mod {
                value: ((*a as u64 + *b as u64) % *modulus as u64) as u32,
                modulus: *modulus,
            },
            _ => mismatch(),
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Int(a) => Scalar::Int(-a),
            Scalar::Rat(a) => Scalar::Rat(-a),
            Scalar::Mod { value, modulus } => Scalar::Mod {
                value: (*modulus - *value) % *modulus,
                modulus: *modulus,
            },
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Int(a), Scalar::Int(b)) => Scalar::Int(a * b),
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a * b),
            (Scalar::Mod { value: a, modulus }, Scalar::Mod { value: b, .. }) => Scalar::Mod {
                value: ((*a as u64 * *b as u64) % *modulus as u64) as u32,
                modulus: *modulus,
            },
            _ => mismatch(),
        }
    }

    /// Multiplicative inverse in a field. Panics on zero or on integers.
    pub fn inv(&self) -> Scalar {
        assert!(!self.is_zero(), "inverse of zero");
        match self {
            Scalar::Int(_) => panic!("integers are not a field"),
            Scalar::Rat(a) => Scalar::Rat(a.recip()),
            Scalar::Mod { value, modulus } => Scalar::Mod {
                value: pow_mod(*value as u64, *modulus as u64 - 2, *modulus as u64) as u32,
                modulus: *modulus,
            },
        }
    }

    pub fn pow(&self, mut e: u64) -> Scalar {
        let mut base = self.clone();
        let mut acc = self.one_like();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Sign used when printing; residues are never negative.
    pub(crate) fn is_negative(&self) -> bool {
        match self {
            Scalar::Int(a) => a.is_negative(),
            Scalar::Rat(a) => a.is_negative(),
            Scalar::Mod { .. } => false,
        }
    }
}

fn pow_mod(mut base: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        e >>= 1;
    }
    acc
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Scalar::Int(a), Scalar::Int(b)) => a.cmp(b),
            (Scalar::Rat(a), Scalar::Rat(b)) => a.cmp(b),
            (Scalar::Mod { value: a, .. }, Scalar::Mod { value: b, .. }) => a.cmp(b),
            _ => mismatch(),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Int(a) => write!(f, "{a}"),
            Scalar::Rat(a) => write!(f, "{a}"),
            Scalar::Mod { value, .. } => write!(f, "{value}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residues_are_reduced() {
        let f = Field::prime(7).unwrap();
        assert_eq!(f.from_i64(-1), Scalar::Mod { value: 6, modulus: 7 });
        let three = f.from_i64(3);
        assert!(three.mul(&three.inv()).is_one());
    }

    #[test]
    fn rationals_lowest_terms() {
        let q = Field::Rationals;
        let half = Scalar::Rat(BigRational::new(BigInt::from(2), BigInt::from(-4)));
        assert_eq!(half, q.from_i64(-1).mul(&q.from_i64(2).inv()));
        if let Scalar::Rat(r) = half {
            assert!(r.denom().is_positive());
        }
    }

    #[test]
    fn rejects_composite_modulus() {
        assert_eq!(Field::prime(6), Err(Error::NotPrime(6)));
        assert!(Field::prime(2).is_ok());
    }
}
