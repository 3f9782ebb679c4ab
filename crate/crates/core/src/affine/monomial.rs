//! Monomial ideals in `k[x_1..x_n]` given by exponent vectors.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};

pub type Monomial = Vec<u32>;

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

/// A monomial ideal, stored by its minimal generators in sorted order.
/// The unit ideal has the single generator `1`; the zero ideal has none.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MonomialIdeal {
    nvars: usize,
    gens: Vec<Monomial>,
}

impl MonomialIdeal {
    pub fn new(nvars: usize, gens: Vec<Monomial>) -> Self {
        let mut gens: Vec<Monomial> = gens
            .into_iter()
            .map(|mut g| {
                g.resize(nvars, 0);
                g
            })
            .collect();
        gens.sort_by(|a, b| total(a).cmp(&total(b)).then_with(|| b.cmp(a)));
        gens.dedup();
        let mut minimal: Vec<Monomial> = Vec::new();
        for g in gens {
            if !minimal.iter().any(|m| divides(m, &g)) {
                minimal.push(g);
            }
        }
        minimal.sort_by(|a, b| b.cmp(a));
        MonomialIdeal { nvars, gens: minimal }
    }

    pub fn zero(nvars: usize) -> Self {
        MonomialIdeal { nvars, gens: Vec::new() }
    }

    pub fn unit(nvars: usize) -> Self {
        MonomialIdeal { nvars, gens: vec![vec![0; nvars]] }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn gens(&self) -> &[Monomial] {
        &self.gens
    }

    pub fn is_unit(&self) -> bool {
        self.gens.iter().any(|g| g.iter().all(|&e| e == 0))
    }

    pub fn contains_monomial(&self, m: &[u32]) -> bool {
        self.gens.iter().any(|g| divides(g, m))
    }

    /// `self ⊇ other`.
    pub fn contains(&self, other: &MonomialIdeal) -> bool {
        other.gens.iter().all(|g| self.contains_monomial(g))
    }

    pub fn add_monomial(&self, m: &[u32]) -> MonomialIdeal {
        let mut gens = self.gens.clone();
        gens.push(m.to_vec());
        MonomialIdeal::new(self.nvars, gens)
    }

    pub fn sum(&self, other: &MonomialIdeal) -> MonomialIdeal {
        let mut gens = self.gens.clone();
        gens.extend(other.gens.iter().cloned());
        MonomialIdeal::new(self.nvars, gens)
    }

    /// The colon ideal `(self : m)`.
    pub fn colon(&self, m: &[u32]) -> MonomialIdeal {
        let gens = self
            .gens
            .iter()
            .map(|g| g.iter().zip(m).map(|(a, b)| a.saturating_sub(*b)).collect())
            .collect();
        MonomialIdeal::new(self.nvars, gens)
    }

    pub fn intersect(&self, other: &MonomialIdeal) -> MonomialIdeal {
        let mut gens = Vec::new();
        for a in &self.gens {
            for b in &other.gens {
                gens.push(a.iter().zip(b).map(|(x, y)| *x.max(y)).collect());
            }
        }
        MonomialIdeal::new(self.nvars, gens)
    }

    /// Irreducible ideals are generated by pure powers of variables.
    pub fn is_irreducible(&self) -> bool {
        !self.is_unit() && self.gens.iter().all(|g| g.iter().filter(|&&e| e > 0).count() == 1)
    }

    /// Variables occurring in some generator; for an irreducible ideal this
    /// is the variable set of its radical.
    pub fn support(&self) -> Vec<usize> {
        (0..self.nvars)
            .filter(|&i| self.gens.iter().any(|g| g[i] > 0))
            .collect()
    }

    /// Irredundant irreducible decomposition by splitting on a mixed
    /// generator: `J = (J + x_i^a) ∩ (J + m/x_i^a)`.
    pub fn irreducible_components(&self) -> Vec<MonomialIdeal> {
        if self.is_unit() {
            return Vec::new();
        }
        let mixed = self
            .gens
            .iter()
            .find(|g| g.iter().filter(|&&e| e > 0).count() > 1);
        let Some(g) = mixed else {
            return vec![self.clone()];
        };
        let i = g.iter().position(|&e| e > 0).unwrap();
        let mut power = vec![0; self.nvars];
        power[i] = g[i];
        let mut rest = g.clone();
        rest[i] = 0;
        let mut parts = self.add_monomial(&power).irreducible_components();
        parts.extend(self.add_monomial(&rest).irreducible_components());
        parts.sort();
        parts.dedup();
        let keep: Vec<MonomialIdeal> = parts
            .iter()
            .filter(|c| !parts.iter().any(|d| d != *c && c.contains(d)))
            .cloned()
            .collect();
        keep
    }

    /// Whether the prime `(x_i : i ∈ sigma)` contains this ideal.
    pub fn inside_prime(&self, sigma: &[usize]) -> bool {
        self.gens
            .iter()
            .all(|g| sigma.iter().any(|&i| g[i] > 0))
    }

    pub fn display_with<'a>(&'a self, vars: &'a [String]) -> impl fmt::Display + 'a {
        IdealDisplay { ideal: self, vars }
    }

    pub fn parse(vars: &[String], text: &str) -> Result<MonomialIdeal> {
        let inner = text.trim();
        let inner = inner
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(|| Error::parse(1, format!("expected a parenthesized generator list, found `{inner}`")))?;
        let mut gens = Vec::new();
        if !inner.trim().is_empty() {
            for piece in inner.split(',') {
                gens.push(parse_monomial(vars, piece)?);
            }
        }
        Ok(MonomialIdeal::new(vars.len(), gens))
    }
}

fn total(m: &[u32]) -> u32 {
    m.iter().sum()
}

/// Parse `x^2*y`, `x^2y`, `xy` or `1`.
pub fn parse_monomial(vars: &[String], text: &str) -> Result<Monomial> {
    let s = text.trim();
    let mut exps = vec![0u32; vars.len()];
    if s == "1" {
        return Ok(exps);
    }
    let bytes = s.as_bytes();
    let mut pos = 0;
    while pos < bytes.len() {
        if bytes[pos] == b'*' || bytes[pos] == b' ' {
            pos += 1;
            continue;
        }
        // longest variable name matching here
        let rest = &s[pos..];
        let (idx, name) = vars
            .iter()
            .enumerate()
            .filter(|(_, v)| rest.starts_with(v.as_str()))
            .max_by_key(|(_, v)| v.len())
            .ok_or_else(|| Error::parse(pos + 1, format!("unknown variable in monomial `{s}`")))?;
        pos += name.len();
        let mut e = 1u32;
        if pos < bytes.len() && bytes[pos] == b'^' {
            pos += 1;
            let start = pos;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            e = s[start..pos]
                .parse()
                .map_err(|_| Error::parse(start + 1, format!("bad exponent in `{s}`")))?;
        }
        exps[idx] += e;
    }
    Ok(exps)
}

struct IdealDisplay<'a> {
    ideal: &'a MonomialIdeal,
    vars: &'a [String],
}

pub(crate) fn monomial_string(m: &[u32], vars: &[String]) -> String {
    let mut out = String::new();
    for (i, &e) in m.iter().enumerate() {
        if e == 0 {
            continue;
        }
        out.push_str(&vars[i]);
        if e > 1 {
            out.push_str(&format!("^{e}"));
        }
    }
    if out.is_empty() {
        out.push('1');
    }
    out
}

impl fmt::Display for IdealDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ideal.gens.is_empty() {
            return write!(f, "(0)");
        }
        let parts: Vec<String> = self
            .ideal
            .gens
            .iter()
            .map(|g| monomial_string(g, self.vars))
            .collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Shared per-ring cache of irreducible decompositions.
#[derive(Clone, Default)]
pub struct DecompositionCache(Arc<RwLock<HashMap<MonomialIdeal, Arc<Vec<MonomialIdeal>>>>>);

impl DecompositionCache {
    pub fn components(&self, ideal: &MonomialIdeal) -> Arc<Vec<MonomialIdeal>> {
        if let Some(hit) = self.0.read().unwrap().get(ideal) {
            return hit.clone();
        }
        let comps = Arc::new(ideal.irreducible_components());
        self.0.write().unwrap().insert(ideal.clone(), comps.clone());
        comps
    }
}

impl fmt::Debug for DecompositionCache {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DecompositionCache")
    }
}

/// All monomials with every exponent at most `max_exp`.
pub fn box_monomials(nvars: usize, max_exp: u32) -> Vec<Monomial> {
    let mut out = vec![Vec::new()];
    for _ in 0..nvars {
        out = out
            .into_iter()
            .flat_map(|m: Monomial| {
                (0..=max_exp).map(move |e| {
                    let mut m = m.clone();
                    m.push(e);
                    m
                })
            })
            .collect();
    }
    out
}

/// Every proper monomial ideal containing `base` whose minimal generators
/// have all exponents at most `max_exp`.
pub fn ideals_in_box(base: &MonomialIdeal, max_exp: u32) -> Vec<MonomialIdeal> {
    let n = base.nvars;
    let points: Vec<Monomial> = box_monomials(n, max_exp)
        .into_iter()
        .filter(|m| m.iter().any(|&e| e > 0) && !base.contains_monomial(m))
        .collect();
    let mut out = Vec::new();
    fn rec(
        points: &[Monomial],
        i: usize,
        chosen: &mut Vec<Monomial>,
        base: &MonomialIdeal,
        out: &mut Vec<MonomialIdeal>,
    ) {
        if i == points.len() {
            let mut gens = base.gens.clone();
            gens.extend(chosen.iter().cloned());
            out.push(MonomialIdeal::new(base.nvars, gens));
            return;
        }
        rec(points, i + 1, chosen, base, out);
        let p = &points[i];
        if chosen.iter().all(|c| !divides(c, p) && !divides(p, c)) {
            chosen.push(p.clone());
            rec(points, i + 1, chosen, base, out);
            chosen.pop();
        }
    }
    rec(&points, 0, &mut Vec::new(), base, &mut out);
    out.sort();
    out.dedup();
    out.retain(|j| !j.is_unit());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy() -> Vec<String> {
        vec!["x".into(), "y".into()]
    }

    #[test]
    fn minimal_generators() {
        let j = MonomialIdeal::parse(&xy(), "(x^2, xy, x^2y)").unwrap();
        assert_eq!(j.gens().len(), 2);
        assert_eq!(j.display_with(&xy()).to_string(), "(x^2,xy)");
    }

    #[test]
    fn decomposition_of_embedded_example() {
        let j = MonomialIdeal::parse(&xy(), "(x^2,xy)").unwrap();
        let comps: Vec<String> = j
            .irreducible_components()
            .iter()
            .map(|c| c.display_with(&xy()).to_string())
            .collect();
        assert_eq!(comps, vec!["(x)", "(x^2,y)"]);
    }

    #[test]
    fn colon_and_sum() {
        let j = MonomialIdeal::parse(&xy(), "(x^2,xy)").unwrap();
        assert_eq!(j.colon(&[1, 0]).display_with(&xy()).to_string(), "(x,y)");
        assert_eq!(j.add_monomial(&[1, 0]).display_with(&xy()).to_string(), "(x)");
    }

    #[test]
    fn box_ideals_contain_base() {
        let base = MonomialIdeal::parse(&xy(), "(xy)").unwrap();
        let all = ideals_in_box(&base, 1);
        assert!(all.iter().all(|j| j.contains(&base)));
        // (xy), (x), (y), (x,y)
        assert_eq!(all.len(), 4);
    }
}
