//! Text forms of rings and modules.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};

use super::monomial::MonomialIdeal;
use super::{ChainFactor, ModuleNF, MonomialRing, PidKind, PidPrime, RingDescriptor};
use crate::error::{Error, Result};
use crate::exact::{factor_poly, smith_normal_form, EuclideanDomain, Field, PidMatrix, Poly};
use crate::partition::Partition;

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidDescriptor(msg.into())
}

/// `F<p>`, `F_<p>` or `Q`.
pub fn parse_field(text: &str) -> Result<Field> {
    let t = text.trim();
    if t == "Q" {
        return Ok(Field::Rationals);
    }
    let digits = t
        .strip_prefix("F_")
        .or_else(|| t.strip_prefix('F'))
        .ok_or_else(|| invalid(format!("unknown field `{t}` (use F<p> or Q)")))?;
    let p: u64 = digits
        .parse()
        .map_err(|_| invalid(format!("unknown field `{t}` (use F<p> or Q)")))?;
    Field::prime(p)
}

/// Split at `sep` outside of any brackets.
fn split_top(text: &str, sep: char) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push((start, &text[start..i]));
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push((start, &text[start..]));
    out
}

pub(super) fn parse_ring(text: &str) -> Result<RingDescriptor> {
    let t = text.trim();
    let pieces: Vec<&str> = t
        .split('×')
        .flat_map(|s| s.split(" x "))
        .map(str::trim)
        .collect();
    if pieces.len() > 1 {
        let mut factors = Vec::new();
        for p in pieces {
            match parse_ring(p)? {
                RingDescriptor::Finite(f) => factors.extend(f),
                _ => return Err(invalid(format!("`{p}` is not a finite chain-ring product"))),
            }
        }
        return Ok(RingDescriptor::Finite(factors));
    }
    if t == "Z" {
        return Ok(RingDescriptor::Pid(PidKind::Integers));
    }
    if let Some(n) = t.strip_prefix("Z/") {
        let n: u64 = n
            .trim()
            .parse()
            .map_err(|_| invalid(format!("bad modulus in `{t}`")))?;
        if n < 2 {
            return Err(invalid("Z/n needs n >= 2"));
        }
        let factors = RingDescriptor::pid_primes_of_integer(n)
            .into_iter()
            .map(|(p, k)| match p {
                PidPrime::Int(p) => ChainFactor::IntegersMod { p, k },
                _ => unreachable!(),
            })
            .collect();
        return Ok(RingDescriptor::Finite(factors));
    }
    let open = t
        .find('[')
        .ok_or_else(|| invalid(format!("cannot read ring `{t}`")))?;
    let close = t
        .find(']')
        .ok_or_else(|| invalid(format!("missing `]` in `{t}`")))?;
    let field = parse_field(&t[..open])?;
    let vars: Vec<String> = t[open + 1..close]
        .split(',')
        .map(|v| v.trim().to_string())
        .collect();
    if vars.iter().any(|v| v.is_empty() || !v.chars().all(|c| c.is_ascii_alphanumeric()) || !v.starts_with(|c: char| c.is_ascii_alphabetic())) {
        return Err(invalid(format!("bad variable list in `{t}`")));
    }
    for (i, v) in vars.iter().enumerate() {
        if vars[..i].contains(v) {
            return Err(invalid(format!("repeated variable `{v}`")));
        }
    }
    let rest = t[close + 1..].trim();
    let quotient = if rest.is_empty() {
        None
    } else {
        Some(
            rest.strip_prefix('/')
                .ok_or_else(|| invalid(format!("expected `/` after `]` in `{t}`")))?
                .trim(),
        )
    };
    if vars.len() == 1 {
        match quotient {
            None => {
                if vars[0] != "t" {
                    return Err(invalid("the polynomial PID uses the variable `t`"));
                }
                return Ok(RingDescriptor::Pid(PidKind::Polynomials(field)));
            }
            Some(q) => {
                let ideal = MonomialIdeal::parse(&vars, q)?;
                if ideal.gens().len() != 1 || ideal.is_unit() {
                    return Err(invalid(format!("`{t}` is not a chain ring x^m")));
                }
                if !field.is_finite() {
                    return Err(invalid("finite chain rings need a finite coefficient field"));
                }
                return Ok(RingDescriptor::Finite(vec![ChainFactor::Truncated {
                    q: field.characteristic(),
                    m: ideal.gens()[0][0],
                }]));
            }
        }
    }
    let ideal = match quotient {
        None => MonomialIdeal::zero(vars.len()),
        Some(q) => MonomialIdeal::parse(&vars, q)?,
    };
    Ok(RingDescriptor::Monomial(MonomialRing::new(field, vars, ideal)?))
}

pub(super) fn parse_module(ring: &RingDescriptor, text: &str) -> Result<ModuleNF> {
    let mut total = ring.zero_module();
    if text.trim().is_empty() {
        return Err(Error::parse(1, "empty module literal"));
    }
    for (offset, term) in split_top(text, '+') {
        let lead = term.len() - term.trim_start().len();
        let col = offset + lead + 1;
        let m = parse_term(ring, term.trim()).map_err(|e| match e {
            Error::Parse { column, message } => Error::parse(col + column - 1, message),
            other => Error::parse(col, other.to_string()),
        })?;
        total = total.direct_sum(&m);
    }
    Ok(total)
}

fn parse_power(term: &str, base: &str) -> Option<Result<u32>> {
    if term == base {
        return Some(Ok(1));
    }
    let e = term.strip_prefix(base)?.strip_prefix('^')?;
    Some(e.trim().parse().map_err(|_| Error::parse(base.len() + 2, "bad exponent")))
}

fn free(ring: &RingDescriptor, r: u32) -> ModuleNF {
    let mut m = ring.zero_module();
    for _ in 0..r {
        m = m.direct_sum(&ring.ring_module());
    }
    m
}

fn parse_term(ring: &RingDescriptor, term: &str) -> Result<ModuleNF> {
    if term == "0" {
        return Ok(ring.zero_module());
    }
    if let Some(r) = parse_power(term, "R") {
        return Ok(free(ring, r?));
    }
    if let Some(body) = term.strip_prefix("coker(").and_then(|s| s.strip_suffix(')')) {
        return parse_coker(ring, body).map_err(|e| shift(e, 7));
    }
    match ring {
        RingDescriptor::Pid(PidKind::Integers) => {
            if let Some(r) = parse_power(term, "Z") {
                return Ok(free(ring, r?));
            }
            if let Some(n) = term.strip_prefix("Z/") {
                let n: u64 = n.trim().parse().map_err(|_| Error::parse(3, "expected an integer"))?;
                if n == 0 {
                    return Ok(ring.ring_module());
                }
                return Ok(ModuleNF::pid(
                    0,
                    RingDescriptor::pid_primes_of_integer(n)
                        .into_iter()
                        .map(|(p, e)| (p, Partition::new(vec![e]))),
                ));
            }
        }
        RingDescriptor::Pid(PidKind::Polynomials(k)) => {
            if let Some(body) = term.strip_prefix("R/(").and_then(|s| s.strip_suffix(')')) {
                let f = Poly::parse(*k, "t", body).map_err(|e| shift(e, 3))?;
                return poly_cyclic(&f);
            }
        }
        RingDescriptor::Monomial(r) => {
            if let Some(body) = term.strip_prefix("R/") {
                let j = MonomialIdeal::parse(&r.vars, body).map_err(|e| shift(e, 2))?;
                return Ok(ModuleNF::monomial(vec![j.sum(&r.ideal)]));
            }
        }
        RingDescriptor::Finite(factors) => {
            if let Some(n) = term.strip_prefix("Z/") {
                let n: u64 = n.trim().parse().map_err(|_| Error::parse(3, "expected an integer"))?;
                let parts = factors
                    .iter()
                    .map(|c| {
                        let l = match *c {
                            ChainFactor::IntegersMod { p, k } => {
                                if n == 0 { k } else { valuation(n, p).min(k) }
                            }
                            ChainFactor::Truncated { q, m } => {
                                if n % q == 0 { m } else { 0 }
                            }
                        };
                        Partition::new(vec![l])
                    })
                    .collect();
                return Ok(ModuleNF::Finite(parts));
            }
            if let Some(body) = term.strip_prefix("C(").and_then(|s| s.strip_suffix(')')) {
                let nums: Vec<&str> = body.split(',').collect();
                let bad = || Error::parse(3, "expected C(factor, length)");
                if nums.len() != 2 {
                    return Err(bad());
                }
                let i: usize = nums[0].trim().parse().map_err(|_| bad())?;
                let l: u32 = nums[1].trim().parse().map_err(|_| bad())?;
                if i == 0 || i > factors.len() || l > factors[i - 1].length() {
                    return Err(Error::parse(3, format!("no cyclic factor C({i},{l}) in this ring")));
                }
                let mut parts = vec![Partition::empty(); factors.len()];
                parts[i - 1] = Partition::new(vec![l]);
                return Ok(ModuleNF::Finite(parts));
            }
        }
    }
    Err(Error::parse(1, format!("cannot read module term `{term}` over {ring}")))
}

fn shift(e: Error, by: usize) -> Error {
    match e {
        Error::Parse { column, message } => Error::parse(column + by, message),
        other => Error::parse(by + 1, other.to_string()),
    }
}

fn valuation(mut n: u64, p: u64) -> u32 {
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

fn poly_cyclic(f: &Poly) -> Result<ModuleNF> {
    if f.is_zero() {
        return Ok(ModuleNF::pid(1, []));
    }
    let fac = factor_poly(f)?;
    Ok(ModuleNF::pid(
        0,
        fac.factors
            .into_iter()
            .map(|(g, e)| (PidPrime::Poly(g), Partition::new(vec![e]))),
    ))
}

fn matrix_rows(body: &str) -> Result<Vec<Vec<String>>> {
    let b = body.trim();
    let inner = b
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| Error::parse(1, "expected [[...],...]"))?;
    let mut rows = Vec::new();
    for (off, row) in split_top(inner, ',') {
        let r = row.trim();
        let cells = r
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| Error::parse(off + 2, "expected a bracketed row"))?;
        rows.push(cells.split(',').map(|c| c.trim().to_string()).collect::<Vec<_>>());
    }
    let width = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != width) {
        return Err(Error::parse(1, "rows have different lengths"));
    }
    Ok(rows)
}

/// Cokernel of a matrix `R^cols -> R^rows`.
fn parse_coker(ring: &RingDescriptor, body: &str) -> Result<ModuleNF> {
    let rows = matrix_rows(body)?;
    let nrows = rows.len() as u32;
    match ring {
        RingDescriptor::Pid(PidKind::Integers) => {
            let mut m = Vec::new();
            for r in &rows {
                let mut row = Vec::new();
                for c in r {
                    row.push(
                        c.parse::<BigInt>()
                            .map_err(|_| Error::parse(1, format!("`{c}` is not an integer")))?,
                    );
                }
                m.push(row);
            }
            let snf = smith_normal_form(&PidMatrix::from_rows(m));
            let mut out = ModuleNF::pid(nrows - snf.rank as u32, []);
            for d in &snf.diagonal[..snf.rank] {
                let d = d.abs();
                if d.is_one() {
                    continue;
                }
                let n = d
                    .to_u64()
                    .ok_or_else(|| Error::parse(1, "invariant factor too large to factor"))?;
                out = out.direct_sum(&ModuleNF::pid(
                    0,
                    RingDescriptor::pid_primes_of_integer(n)
                        .into_iter()
                        .map(|(p, e)| (p, Partition::new(vec![e]))),
                ));
            }
            Ok(out)
        }
        RingDescriptor::Pid(PidKind::Polynomials(k)) => {
            let mut m = Vec::new();
            for r in &rows {
                let mut row = Vec::new();
                for c in r {
                    row.push(Poly::parse(*k, "t", c)?);
                }
                m.push(row);
            }
            let snf = smith_normal_form(&PidMatrix::from_rows(m));
            let mut out = ModuleNF::pid(nrows - snf.rank as u32, []);
            for d in &snf.diagonal[..snf.rank] {
                if !EuclideanDomain::is_zero(d) && d.is_constant() {
                    continue;
                }
                out = out.direct_sum(&poly_cyclic(d)?);
            }
            Ok(out)
        }
        _ => Err(Error::parse(1, "coker(...) needs a PID ring")),
    }
}
