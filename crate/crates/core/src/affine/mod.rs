//! Affine backends: principal ideal domains, monomial quotients of
//! polynomial rings, and finite products of chain rings.
//!
//! Modules are kept in normal form (elementary divisors, sums of cyclic
//! monomial quotients, or per-factor partitions) and the associated-prime
//! calculus is computed directly from that form.

pub mod monomial;
mod parse;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use crate::dvr::{self, LocalType};
use crate::error::{Error, Result};
use crate::exact::{is_irreducible, Field, Poly};
use crate::partition::Partition;

pub use monomial::{MonomialIdeal, DecompositionCache};
pub use parse::parse_field;

/// `Z` or `k[t]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PidKind {
    Integers,
    Polynomials(Field),
}

/// A prime of a PID: zero, a rational prime, or a monic irreducible.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PidPrime {
    Zero,
    Int(u64),
    Poly(Poly),
}

/// A chain ring `Z/p^k` or `F_q[x]/(x^m)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChainFactor {
    IntegersMod { p: u64, k: u32 },
    Truncated { q: u64, m: u32 },
}

impl ChainFactor {
    /// Length of the ring as a module over itself.
    pub fn length(&self) -> u32 {
        match self {
            ChainFactor::IntegersMod { k, .. } => *k,
            ChainFactor::Truncated { m, .. } => *m,
        }
    }

    fn uniformizer(&self) -> String {
        match self {
            ChainFactor::IntegersMod { p, .. } => p.to_string(),
            ChainFactor::Truncated { .. } => "x".to_string(),
        }
    }
}

impl fmt::Display for ChainFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChainFactor::IntegersMod { p, k } => write!(f, "Z/{}", p.pow(*k)),
            ChainFactor::Truncated { q, m } => write!(f, "F{q}[x]/(x^{m})"),
        }
    }
}

/// `k[x_1..x_n]/I` with `I` monomial.
#[derive(Clone, Debug)]
pub struct MonomialRing {
    pub field: Field,
    pub vars: Vec<String>,
    pub ideal: MonomialIdeal,
    cache: DecompositionCache,
}

impl PartialEq for MonomialRing {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.vars == other.vars && self.ideal == other.ideal
    }
}

impl MonomialRing {
    pub fn new(field: Field, vars: Vec<String>, ideal: MonomialIdeal) -> Result<Self> {
        if vars.is_empty() || vars.len() > 16 {
            return Err(Error::InvalidDescriptor(
                "a monomial quotient needs between 1 and 16 variables".into(),
            ));
        }
        if ideal.is_unit() {
            return Err(Error::InvalidDescriptor("the quotient by the unit ideal is the zero ring".into()));
        }
        Ok(MonomialRing { field, vars, ideal, cache: DecompositionCache::default() })
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    /// Variable sets of the radicals of an irredundant irreducible decomposition.
    pub fn ass_of_quotient(&self, j: &MonomialIdeal) -> BTreeSet<Vec<usize>> {
        self.cache.components(j).iter().map(|c| c.support()).collect()
    }

    pub fn components(&self, j: &MonomialIdeal) -> Arc<Vec<MonomialIdeal>> {
        self.cache.components(j)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum RingDescriptor {
    Pid(PidKind),
    Monomial(MonomialRing),
    Finite(Vec<ChainFactor>),
}

/// A prime ideal of an affine backend. Monomial primes are the variable
/// sets `σ` of `(x_i : i ∈ σ)`; finite-ring primes are factor indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PrimeIdeal {
    Pid(PidPrime),
    Monomial(Vec<usize>),
    Factor(usize),
}

impl PrimeIdeal {
    fn rank(&self) -> (u8, usize) {
        match self {
            PrimeIdeal::Pid(_) => (0, 0),
            PrimeIdeal::Monomial(s) => (1, s.len()),
            PrimeIdeal::Factor(_) => (2, 0),
        }
    }
}

impl Ord for PrimeIdeal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank().cmp(&other.rank()).then_with(|| match (self, other) {
            (PrimeIdeal::Pid(a), PrimeIdeal::Pid(b)) => a.cmp(b),
            (PrimeIdeal::Monomial(a), PrimeIdeal::Monomial(b)) => a.cmp(b),
            (PrimeIdeal::Factor(a), PrimeIdeal::Factor(b)) => a.cmp(b),
            _ => Ordering::Equal,
        })
    }
}

impl PartialOrd for PrimeIdeal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Normal form of a finitely generated module.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModuleNF {
    /// `R^free ⊕ ⊕_p T_p(partition)`; empty partitions are never stored.
    Pid { free: u32, torsion: BTreeMap<PidPrime, Partition> },
    /// `⊕ R/J_i`, sorted, no unit ideals.
    Monomial(Vec<MonomialIdeal>),
    /// One partition per chain factor.
    Finite(Vec<Partition>),
}

impl ModuleNF {
    pub fn is_zero(&self) -> bool {
        match self {
            ModuleNF::Pid { free, torsion } => *free == 0 && torsion.is_empty(),
            ModuleNF::Monomial(s) => s.is_empty(),
            ModuleNF::Finite(parts) => parts.iter().all(Partition::is_empty),
        }
    }

    pub fn pid(free: u32, torsion: impl IntoIterator<Item = (PidPrime, Partition)>) -> ModuleNF {
        let mut map: BTreeMap<PidPrime, Partition> = BTreeMap::new();
        for (p, part) in torsion {
            let merged = map.get(&p).map(|q| q.union(&part)).unwrap_or(part);
            map.insert(p, merged);
        }
        map.retain(|_, v| !v.is_empty());
        ModuleNF::Pid { free, torsion: map }
    }

    pub fn monomial(mut summands: Vec<MonomialIdeal>) -> ModuleNF {
        summands.retain(|j| !j.is_unit());
        summands.sort();
        ModuleNF::Monomial(summands)
    }

    /// Coarse size used to order window enumerations.
    pub fn size_key(&self) -> (u32, u32) {
        match self {
            ModuleNF::Pid { free, torsion } => (*free, torsion.values().map(Partition::size).sum()),
            ModuleNF::Monomial(s) => (s.len() as u32, 0),
            ModuleNF::Finite(parts) => (parts.iter().map(Partition::size).sum(), 0),
        }
    }

    pub fn direct_sum(&self, other: &ModuleNF) -> ModuleNF {
        match (self, other) {
            (ModuleNF::Pid { free: a, torsion: s }, ModuleNF::Pid { free: b, torsion: t }) => {
                ModuleNF::pid(a + b, s.clone().into_iter().chain(t.clone()))
            }
            (ModuleNF::Monomial(a), ModuleNF::Monomial(b)) => {
                ModuleNF::monomial(a.iter().chain(b).cloned().collect())
            }
            (ModuleNF::Finite(a), ModuleNF::Finite(b)) => {
                ModuleNF::Finite(a.iter().zip(b).map(|(x, y)| x.union(y)).collect())
            }
            _ => panic!("direct sum of modules over different backends"),
        }
    }

    /// Every direct summand, as sub-multisets of the indecomposable summands.
    pub fn summands(&self) -> Vec<ModuleNF> {
        let mut out: BTreeSet<ModuleNF> = BTreeSet::new();
        match self {
            ModuleNF::Pid { free, torsion } => {
                let per_prime: Vec<(PidPrime, Vec<Partition>)> = torsion
                    .iter()
                    .map(|(p, part)| (p.clone(), sub_multisets(part)))
                    .collect();
                for f in 0..=*free {
                    for choice in cartesian(&per_prime.iter().map(|(_, v)| v.len()).collect::<Vec<_>>()) {
                        let tors = per_prime
                            .iter()
                            .zip(&choice)
                            .map(|((p, v), &i)| (p.clone(), v[i].clone()));
                        out.insert(ModuleNF::pid(f, tors));
                    }
                }
            }
            ModuleNF::Monomial(s) => {
                for mask in 0u64..(1u64 << s.len()) {
                    let pick = s
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, j)| j.clone())
                        .collect();
                    out.insert(ModuleNF::monomial(pick));
                }
            }
            ModuleNF::Finite(parts) => {
                let subs: Vec<Vec<Partition>> = parts.iter().map(sub_multisets).collect();
                for choice in cartesian(&subs.iter().map(Vec::len).collect::<Vec<_>>()) {
                    out.insert(ModuleNF::Finite(
                        subs.iter().zip(&choice).map(|(v, &i)| v[i].clone()).collect(),
                    ));
                }
            }
        }
        out.into_iter().collect()
    }
}

fn sub_multisets(p: &Partition) -> Vec<Partition> {
    let mut out: BTreeSet<Partition> = BTreeSet::new();
    for mask in 0u64..(1u64 << p.len()) {
        out.insert(Partition::new(
            p.parts()
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &v)| v)
                .collect(),
        ));
    }
    out.into_iter().collect()
}

/// All index tuples for the given list of lengths.
pub(crate) fn cartesian(lens: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &n in lens {
        out = out
            .into_iter()
            .flat_map(|v: Vec<usize>| {
                (0..n).map(move |i| {
                    let mut w = v.clone();
                    w.push(i);
                    w
                })
            })
            .collect();
    }
    out
}

/// Finite enumeration bounds for an affine backend.
#[derive(Clone, Debug, PartialEq)]
pub enum AffineWindow {
    /// Primes, a bound on the total length of each primary part, and a rank cap.
    Pid { primes: Vec<PidPrime>, max_exponent: u32, max_rank: u32 },
    /// A bound on the total length.
    Finite { max_length: u32 },
    /// Allowed cyclic quotients `R/J` and a cap on the number of summands.
    Monomial { cyclics: Vec<MonomialIdeal>, max_summands: u32 },
}

/// The finite set of primes in play, ordered by specialization:
/// `p ⪯ q` iff `p ⊇ q`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralPoset {
    pub elements: Vec<PrimeIdeal>,
    /// `order[i][j]` holds iff `elements[i] ⪯ elements[j]`.
    pub order: Vec<Vec<bool>>,
}

impl SpectralPoset {
    pub fn new(elements: Vec<PrimeIdeal>, le: impl Fn(&PrimeIdeal, &PrimeIdeal) -> bool) -> Self {
        let order = elements
            .iter()
            .map(|p| elements.iter().map(|q| le(p, q)).collect())
            .collect();
        SpectralPoset { elements, order }
    }
}

fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        let mut e = 0;
        while n % d == 0 {
            n /= d;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

impl RingDescriptor {
    pub fn backend_name(&self) -> &'static str {
        match self {
            RingDescriptor::Pid(_) => "pid",
            RingDescriptor::Monomial(_) => "monomial",
            RingDescriptor::Finite(_) => "finite",
        }
    }

    /// Parse `Z`, `F2[t]`, `Q[t]`, `Z/6`, `Z/4 x F3[x]/(x^2)` or `F2[x,y]/(x^2,xy)`.
    pub fn parse(text: &str) -> Result<RingDescriptor> {
        parse::parse_ring(text)
    }

    /// Parse a module literal such as `Z + Z/6`, `R/(x^2,y)` or `coker([[2,0],[0,3]])`.
    pub fn parse_module(&self, text: &str) -> Result<ModuleNF> {
        parse::parse_module(self, text)
    }

    pub fn zero_module(&self) -> ModuleNF {
        match self {
            RingDescriptor::Pid(_) => ModuleNF::pid(0, []),
            RingDescriptor::Monomial(_) => ModuleNF::Monomial(Vec::new()),
            RingDescriptor::Finite(f) => ModuleNF::Finite(vec![Partition::empty(); f.len()]),
        }
    }

    /// `R` as a module over itself.
    pub fn ring_module(&self) -> ModuleNF {
        match self {
            RingDescriptor::Pid(_) => ModuleNF::pid(1, []),
            RingDescriptor::Monomial(r) => ModuleNF::monomial(vec![r.ideal.clone()]),
            RingDescriptor::Finite(f) => {
                ModuleNF::Finite(f.iter().map(|c| Partition::new(vec![c.length()])).collect())
            }
        }
    }

    /// The cyclic module `R/(p^e)` for a PID prime.
    pub fn pid_cyclic(&self, p: &PidPrime, e: u32) -> ModuleNF {
        ModuleNF::pid(0, [(p.clone(), Partition::new(vec![e]))])
    }

    /// Canonical PID prime for a positive integer or monic polynomial generator.
    pub fn pid_primes_of_integer(n: u64) -> Vec<(PidPrime, u32)> {
        factor_u64(n).into_iter().map(|(p, e)| (PidPrime::Int(p), e)).collect()
    }

    pub fn validate_prime(&self, p: &PrimeIdeal) -> Result<()> {
        let ok = match (self, p) {
            (RingDescriptor::Pid(_), PrimeIdeal::Pid(PidPrime::Zero)) => true,
            (RingDescriptor::Pid(PidKind::Integers), PrimeIdeal::Pid(PidPrime::Int(n))) => {
                crate::exact::scalar::is_prime(*n)
            }
            (RingDescriptor::Pid(PidKind::Polynomials(k)), PrimeIdeal::Pid(PidPrime::Poly(f))) => {
                f.field() == *k && f.is_monic() && !f.is_constant() && is_irreducible(f)
            }
            (RingDescriptor::Monomial(r), PrimeIdeal::Monomial(s)) => {
                s.windows(2).all(|w| w[0] < w[1])
                    && s.iter().all(|&i| i < r.nvars())
                    && r.ideal.inside_prime(s)
            }
            (RingDescriptor::Finite(f), PrimeIdeal::Factor(i)) => *i < f.len(),
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidDescriptor(format!("not a prime of this ring: {p:?}")))
        }
    }

    /// All primes when the spectrum is finite.
    pub fn all_primes(&self) -> Option<Vec<PrimeIdeal>> {
        match self {
            RingDescriptor::Pid(_) => None,
            RingDescriptor::Monomial(r) => {
                let n = r.nvars();
                let mut out: Vec<PrimeIdeal> = (0u32..(1 << n))
                    .map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).collect::<Vec<_>>())
                    .filter(|s| r.ideal.inside_prime(s))
                    .map(PrimeIdeal::Monomial)
                    .collect();
                out.sort();
                Some(out)
            }
            RingDescriptor::Finite(f) => Some((0..f.len()).map(PrimeIdeal::Factor).collect()),
        }
    }

    /// Ideal containment `p ⊇ q`, i.e. `p` is a specialization of `q`.
    pub fn contains(&self, p: &PrimeIdeal, q: &PrimeIdeal) -> bool {
        match (p, q) {
            (PrimeIdeal::Pid(a), PrimeIdeal::Pid(b)) => *b == PidPrime::Zero || a == b,
            (PrimeIdeal::Monomial(a), PrimeIdeal::Monomial(b)) => b.iter().all(|i| a.contains(i)),
            (PrimeIdeal::Factor(a), PrimeIdeal::Factor(b)) => a == b,
            _ => false,
        }
    }

    /// Krull dimension of `R/p`.
    pub fn prime_dim(&self, p: &PrimeIdeal) -> usize {
        match (self, p) {
            (RingDescriptor::Pid(_), PrimeIdeal::Pid(PidPrime::Zero)) => 1,
            (RingDescriptor::Monomial(r), PrimeIdeal::Monomial(s)) => r.nvars() - s.len(),
            _ => 0,
        }
    }

    /// Krull dimension of `R`.
    pub fn dim(&self) -> usize {
        self.dim_of(&self.ring_module()).unwrap_or(0)
    }

    /// Krull dimension of `M`, `None` for the zero module.
    pub fn dim_of(&self, m: &ModuleNF) -> Option<usize> {
        self.min_ass(m).iter().map(|p| self.prime_dim(p)).max()
    }

    pub fn ass(&self, m: &ModuleNF) -> BTreeSet<PrimeIdeal> {
        match (self, m) {
            (RingDescriptor::Pid(_), ModuleNF::Pid { free, torsion }) => {
                let mut out: BTreeSet<PrimeIdeal> =
                    torsion.keys().map(|p| PrimeIdeal::Pid(p.clone())).collect();
                if *free > 0 {
                    out.insert(PrimeIdeal::Pid(PidPrime::Zero));
                }
                out
            }
            (RingDescriptor::Monomial(r), ModuleNF::Monomial(s)) => s
                .iter()
                .flat_map(|j| r.ass_of_quotient(j))
                .map(PrimeIdeal::Monomial)
                .collect(),
            (RingDescriptor::Finite(_), ModuleNF::Finite(parts)) => parts
                .iter()
                .enumerate()
                .filter(|(_, p)| !p.is_empty())
                .map(|(i, _)| PrimeIdeal::Factor(i))
                .collect(),
            _ => panic!("module does not belong to this ring"),
        }
    }

    /// Specialization-maximal associated primes.
    pub fn min_ass(&self, m: &ModuleNF) -> BTreeSet<PrimeIdeal> {
        let ass = self.ass(m);
        ass.iter()
            .filter(|p| !ass.iter().any(|q| q != *p && self.contains(p, q)))
            .cloned()
            .collect()
    }

    /// Points of `Supp M` whose closure has dimension `dim M`.
    pub fn assh(&self, m: &ModuleNF) -> BTreeSet<PrimeIdeal> {
        let min = self.min_ass(m);
        let Some(d) = self.dim_of(m) else {
            return BTreeSet::new();
        };
        min.into_iter().filter(|p| self.prime_dim(p) == d).collect()
    }

    /// `Supp M` inside the given list of primes (plus `Ass M`).
    pub fn supp_within(&self, m: &ModuleNF, points: &[PrimeIdeal]) -> BTreeSet<PrimeIdeal> {
        let min = self.min_ass(m);
        let mut out: BTreeSet<PrimeIdeal> = points
            .iter()
            .filter(|q| min.iter().any(|p| self.contains(q, p)))
            .cloned()
            .collect();
        out.extend(self.ass(m));
        out
    }

    /// `Supp M`; for a PID with a free summand only the primes already in
    /// view (torsion primes and `(0)`) are listed, see [`AffineBackend::supp`].
    pub fn supp(&self, m: &ModuleNF) -> BTreeSet<PrimeIdeal> {
        let points = self.all_primes().unwrap_or_default();
        self.supp_within(m, &points)
    }

    pub fn ring_ass(&self) -> BTreeSet<PrimeIdeal> {
        self.ass(&self.ring_module())
    }

    pub fn ring_min(&self) -> BTreeSet<PrimeIdeal> {
        self.min_ass(&self.ring_module())
    }

    pub fn ring_assh(&self) -> BTreeSet<PrimeIdeal> {
        self.assh(&self.ring_module())
    }

    /// Every associated prime of `M` lies inside an associated prime of `R`.
    pub fn is_torsionfree(&self, m: &ModuleNF) -> bool {
        let ring_ass = self.ring_ass();
        self.ass(m)
            .iter()
            .all(|p| ring_ass.iter().any(|q| self.contains(q, p)))
    }

    /// `Assh M = Min M = Ass M`.
    pub fn is_pure(&self, m: &ModuleNF) -> bool {
        let ass = self.ass(m);
        self.assh(m) == ass && self.min_ass(m) == ass
    }

    /// `Ass M ⊆ Assh R`.
    pub fn is_maximal_pure(&self, m: &ModuleNF) -> bool {
        let assh = self.ring_assh();
        self.ass(m).is_subset(&assh)
    }

    fn require_dim_le1(&self) -> Result<()> {
        let d = self.dim();
        if d >= 2 {
            Err(Error::DimensionTooLarge(d))
        } else {
            Ok(())
        }
    }

    /// Cohen–Macaulay in dimension at most one: no embedded primes.
    pub fn is_cm_dim_le1(&self, m: &ModuleNF) -> Result<bool> {
        self.require_dim_le1()?;
        Ok(self.min_ass(m) == self.ass(m))
    }

    /// Maximal Cohen–Macaulay in dimension at most one: every associated
    /// prime of `M` is a minimal prime of `R`.
    pub fn is_maximal_cm_dim_le1(&self, m: &ModuleNF) -> Result<bool> {
        self.require_dim_le1()?;
        let min = self.ring_min();
        Ok(self.ass(m).is_subset(&min))
    }

    /// For each `x ∈ Ass M` a quotient `M_x` with `Ass M_x = {x}` such that
    /// `M -> ⊕ M_x` is injective.
    pub fn primary_filtration(&self, m: &ModuleNF) -> Result<Vec<(PrimeIdeal, ModuleNF)>> {
        if m.is_zero() {
            return Err(Error::ZeroModule);
        }
        let out = match (self, m) {
            (RingDescriptor::Pid(_), ModuleNF::Pid { free, torsion }) => {
                let mut out = Vec::new();
                if *free > 0 {
                    out.push((PrimeIdeal::Pid(PidPrime::Zero), ModuleNF::pid(*free, [])));
                }
                for (p, part) in torsion {
                    out.push((
                        PrimeIdeal::Pid(p.clone()),
                        ModuleNF::pid(0, [(p.clone(), part.clone())]),
                    ));
                }
                out
            }
            (RingDescriptor::Monomial(r), ModuleNF::Monomial(s)) => {
                let mut by_prime: BTreeMap<PrimeIdeal, Vec<MonomialIdeal>> = BTreeMap::new();
                for j in s {
                    let mut groups: BTreeMap<Vec<usize>, MonomialIdeal> = BTreeMap::new();
                    for c in r.components(j).iter() {
                        let key = c.support();
                        let merged = match groups.get(&key) {
                            Some(q) => q.intersect(c),
                            None => c.clone(),
                        };
                        groups.insert(key, merged);
                    }
                    for (sigma, q) in groups {
                        by_prime.entry(PrimeIdeal::Monomial(sigma)).or_default().push(q);
                    }
                }
                by_prime
                    .into_iter()
                    .map(|(p, qs)| (p, ModuleNF::monomial(qs)))
                    .collect()
            }
            (RingDescriptor::Finite(f), ModuleNF::Finite(parts)) => parts
                .iter()
                .enumerate()
                .filter(|(_, p)| !p.is_empty())
                .map(|(i, p)| {
                    let mut only = vec![Partition::empty(); f.len()];
                    only[i] = p.clone();
                    (PrimeIdeal::Factor(i), ModuleNF::Finite(only))
                })
                .collect(),
            _ => panic!("module does not belong to this ring"),
        };
        Ok(out)
    }

    pub fn prime_label(&self, p: &PrimeIdeal) -> String {
        match (self, p) {
            (RingDescriptor::Pid(_), PrimeIdeal::Pid(PidPrime::Zero)) => "(0)".into(),
            (RingDescriptor::Pid(_), PrimeIdeal::Pid(PidPrime::Int(n))) => format!("({n})"),
            (RingDescriptor::Pid(_), PrimeIdeal::Pid(PidPrime::Poly(f))) => format!("({f})"),
            (RingDescriptor::Monomial(r), PrimeIdeal::Monomial(s)) => {
                if s.is_empty() {
                    "(0)".into()
                } else {
                    let names: Vec<&str> = s.iter().map(|&i| r.vars[i].as_str()).collect();
                    format!("({})", names.join(","))
                }
            }
            (RingDescriptor::Finite(f), PrimeIdeal::Factor(i)) => {
                let u = f[*i].uniformizer();
                if f.iter().filter(|c| c.uniformizer() == u).count() > 1 {
                    format!("({u})_{}", i + 1)
                } else {
                    format!("({u})")
                }
            }
            _ => format!("{p:?}"),
        }
    }

    pub fn prime_set_label(&self, set: &BTreeSet<PrimeIdeal>) -> String {
        let parts: Vec<String> = set.iter().map(|p| self.prime_label(p)).collect();
        format!("{{{}}}", parts.join(", "))
    }

    pub fn module_label(&self, m: &ModuleNF) -> String {
        if m.is_zero() {
            return "0".into();
        }
        let mut terms: Vec<String> = Vec::new();
        match (self, m) {
            (RingDescriptor::Pid(kind), ModuleNF::Pid { free, torsion }) => {
                let base = match kind {
                    PidKind::Integers => "Z",
                    PidKind::Polynomials(_) => "R",
                };
                match free {
                    0 => {}
                    1 => terms.push(base.to_string()),
                    r => terms.push(format!("{base}^{r}")),
                }
                for (p, part) in torsion {
                    for &e in part.parts() {
                        terms.push(match p {
                            PidPrime::Int(n) => format!("Z/{}", n.pow(e)),
                            PidPrime::Poly(f) if e == 1 => format!("R/({f})"),
                            PidPrime::Poly(f) => format!("R/(({f})^{e})"),
                            PidPrime::Zero => unreachable!("zero is not a torsion prime"),
                        });
                    }
                }
            }
            (RingDescriptor::Monomial(r), ModuleNF::Monomial(s)) => {
                for j in s {
                    if *j == r.ideal {
                        terms.push("R".into());
                    } else {
                        terms.push(format!("R/{}", j.display_with(&r.vars)));
                    }
                }
            }
            (RingDescriptor::Finite(f), ModuleNF::Finite(parts)) => {
                for (i, part) in parts.iter().enumerate() {
                    let unique_int = matches!(f[i], ChainFactor::IntegersMod { p, .. }
                        if f.iter().filter(|c| matches!(c, ChainFactor::IntegersMod { p: q, .. } if *q == p)).count() == 1);
                    for &l in part.parts() {
                        match f[i] {
                            ChainFactor::IntegersMod { p, .. } if unique_int => {
                                terms.push(format!("Z/{}", p.pow(l)))
                            }
                            _ => terms.push(format!("C({},{l})", i + 1)),
                        }
                    }
                }
            }
            _ => panic!("module does not belong to this ring"),
        }
        terms.join(" + ")
    }

    fn pid_local(m: &ModuleNF, p: &PidPrime) -> LocalType {
        match m {
            ModuleNF::Pid { free, torsion } => {
                LocalType::new(*free, torsion.get(p).cloned().unwrap_or_default())
            }
            _ => unreachable!(),
        }
    }

    fn pid_primes<'a>(mods: &[&'a ModuleNF]) -> BTreeSet<&'a PidPrime> {
        let mut out = BTreeSet::new();
        for m in mods {
            if let ModuleNF::Pid { torsion, .. } = m {
                out.extend(torsion.keys());
            }
        }
        out
    }
}

impl fmt::Display for RingDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingDescriptor::Pid(PidKind::Integers) => write!(f, "Z"),
            RingDescriptor::Pid(PidKind::Polynomials(k)) => write!(f, "{k}[t]"),
            RingDescriptor::Monomial(r) => {
                write!(f, "{}[{}]", r.field, r.vars.join(","))?;
                if !r.ideal.gens().is_empty() {
                    write!(f, "/{}", r.ideal.display_with(&r.vars))?;
                }
                Ok(())
            }
            RingDescriptor::Finite(factors) => {
                let parts: Vec<String> = factors.iter().map(|c| c.to_string()).collect();
                write!(f, "{}", parts.join(" x "))
            }
        }
    }
}

type LocalKey = (LocalType, LocalType, LocalType);

/// A ring together with a finite window of modules.
#[derive(Clone, Debug)]
pub struct AffineBackend {
    pub ring: RingDescriptor,
    pub window: AffineWindow,
    ses_cache: Arc<RwLock<HashMap<LocalKey, bool>>>,
}

impl AffineBackend {
    pub fn new(ring: RingDescriptor, window: AffineWindow) -> Result<Self> {
        match (&ring, &window) {
            (RingDescriptor::Pid(_), AffineWindow::Pid { primes, .. }) => {
                for p in primes {
                    if *p == PidPrime::Zero {
                        return Err(Error::InvalidDescriptor("window primes must be nonzero".into()));
                    }
                    ring.validate_prime(&PrimeIdeal::Pid(p.clone()))?;
                }
            }
            (RingDescriptor::Finite(_), AffineWindow::Finite { .. }) => {}
            (RingDescriptor::Monomial(r), AffineWindow::Monomial { cyclics, .. }) => {
                for j in cyclics {
                    if j.nvars() != r.nvars() || !j.contains(&r.ideal) || j.is_unit() {
                        return Err(Error::InvalidDescriptor(format!(
                            "window cyclic R/{} must be a nonzero quotient of R",
                            j.display_with(&r.vars)
                        )));
                    }
                }
            }
            _ => {
                return Err(Error::InvalidDescriptor(format!(
                    "window does not match the {} backend",
                    ring.backend_name()
                )))
            }
        }
        Ok(AffineBackend { ring, window, ses_cache: Arc::default() })
    }

    /// The spectral poset: all primes, or `(0)` plus the window primes for a PID.
    pub fn spectral_poset(&self) -> SpectralPoset {
        let elements = match (&self.ring.all_primes(), &self.window) {
            (Some(all), _) => all.clone(),
            (None, AffineWindow::Pid { primes, .. }) => {
                let mut v: Vec<PrimeIdeal> = vec![PrimeIdeal::Pid(PidPrime::Zero)];
                let mut ps = primes.clone();
                ps.sort();
                ps.dedup();
                v.extend(ps.into_iter().map(PrimeIdeal::Pid));
                v
            }
            _ => Vec::new(),
        };
        SpectralPoset::new(elements, |p, q| self.ring.contains(p, q))
    }

    pub fn ass(&self, m: &ModuleNF) -> BTreeSet<PrimeIdeal> {
        self.ring.ass(m)
    }

    /// `Supp M` inside the spectral poset of this backend.
    pub fn supp(&self, m: &ModuleNF) -> BTreeSet<PrimeIdeal> {
        self.ring.supp_within(m, &self.spectral_poset().elements)
    }

    pub fn contains_module(&self, m: &ModuleNF) -> bool {
        match (&self.window, m) {
            (AffineWindow::Pid { primes, max_exponent, max_rank }, ModuleNF::Pid { free, torsion }) => {
                free <= max_rank
                    && torsion
                        .iter()
                        .all(|(p, part)| primes.contains(p) && part.size() <= *max_exponent)
            }
            (AffineWindow::Finite { max_length }, ModuleNF::Finite(parts)) => {
                let RingDescriptor::Finite(f) = &self.ring else { return false };
                parts.len() == f.len()
                    && parts.iter().map(Partition::size).sum::<u32>() <= *max_length
                    && parts.iter().zip(f).all(|(p, c)| p.largest() <= c.length())
            }
            (AffineWindow::Monomial { cyclics, max_summands }, ModuleNF::Monomial(s)) => {
                s.len() as u32 <= *max_summands && s.iter().all(|j| cyclics.contains(j))
            }
            _ => false,
        }
    }

    /// Every module of the window, without duplicates, in canonical order.
    pub fn enumerate_window(&self) -> Vec<ModuleNF> {
        let mut out: Vec<ModuleNF> = match (&self.ring, &self.window) {
            (RingDescriptor::Pid(_), AffineWindow::Pid { primes, max_exponent, max_rank }) => {
                let mut ps = primes.clone();
                ps.sort();
                ps.dedup();
                let parts = Partition::all_bounded(*max_exponent, *max_exponent);
                let mut v = Vec::new();
                for free in 0..=*max_rank {
                    for choice in cartesian(&vec![parts.len(); ps.len()]) {
                        v.push(ModuleNF::pid(
                            free,
                            ps.iter().zip(&choice).map(|(p, &i)| (p.clone(), parts[i].clone())),
                        ));
                    }
                }
                v
            }
            (RingDescriptor::Finite(f), AffineWindow::Finite { max_length }) => {
                let per: Vec<Vec<Partition>> = f
                    .iter()
                    .map(|c| Partition::all_bounded(*max_length, c.length()))
                    .collect();
                cartesian(&per.iter().map(Vec::len).collect::<Vec<_>>())
                    .into_iter()
                    .map(|choice| {
                        ModuleNF::Finite(per.iter().zip(&choice).map(|(v, &i)| v[i].clone()).collect())
                    })
                    .filter(|m| m.size_key().0 <= *max_length)
                    .collect()
            }
            (RingDescriptor::Monomial(_), AffineWindow::Monomial { cyclics, max_summands }) => {
                let mut cs = cyclics.clone();
                cs.sort();
                cs.dedup();
                let mut v = vec![ModuleNF::Monomial(Vec::new())];
                let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
                for _ in 0..*max_summands {
                    let mut next = Vec::new();
                    for combo in &frontier {
                        let start = combo.last().copied().unwrap_or(0);
                        for i in start..cs.len() {
                            let mut c = combo.clone();
                            c.push(i);
                            v.push(ModuleNF::monomial(c.iter().map(|&k| cs[k].clone()).collect()));
                            next.push(c);
                        }
                    }
                    frontier = next;
                }
                v
            }
            _ => Vec::new(),
        };
        out.sort_by(|a, b| a.size_key().cmp(&b.size_key()).then_with(|| a.cmp(b)));
        out.dedup();
        out
    }

    fn local_ses(&self, a: LocalType, e: LocalType, b: LocalType) -> bool {
        let key = (a, e, b);
        if let Some(&hit) = self.ses_cache.read().unwrap().get(&key) {
            return hit;
        }
        let v = dvr::ses(&key.0, &key.1, &key.2);
        self.ses_cache.write().unwrap().insert(key, v);
        v
    }

    fn unsupported(&self, what: &str) -> Error {
        Error::unsupported(self.ring.backend_name(), what)
    }

    /// `s` is isomorphic to a submodule of `m`.
    pub fn is_sub(&self, s: &ModuleNF, m: &ModuleNF) -> Result<bool> {
        match (s, m) {
            (ModuleNF::Pid { free: a, .. }, ModuleNF::Pid { free: b, .. }) => Ok(a <= b
                && RingDescriptor::pid_primes(&[s, m]).into_iter().all(|p| {
                    dvr::is_sub(&RingDescriptor::pid_local(s, p), &RingDescriptor::pid_local(m, p))
                })),
            (ModuleNF::Finite(x), ModuleNF::Finite(y)) => {
                Ok(x.iter().zip(y).all(|(a, b)| b.contains(a)))
            }
            _ => Err(self.unsupported("submodule tests")),
        }
    }

    /// `q` is isomorphic to a quotient of `m`.
    pub fn is_quot(&self, q: &ModuleNF, m: &ModuleNF) -> Result<bool> {
        match (q, m) {
            (ModuleNF::Pid { free: a, .. }, ModuleNF::Pid { free: b, .. }) => Ok(a <= b
                && RingDescriptor::pid_primes(&[q, m]).into_iter().all(|p| {
                    dvr::is_quot(&RingDescriptor::pid_local(q, p), &RingDescriptor::pid_local(m, p))
                })),
            // over a chain ring quotients and submodules have the same types
            (ModuleNF::Finite(x), ModuleNF::Finite(y)) => {
                Ok(x.iter().zip(y).all(|(a, b)| b.contains(a)))
            }
            _ => Err(self.unsupported("quotient tests")),
        }
    }

    /// A short exact sequence `0 -> a -> e -> b -> 0` exists.
    pub fn ses(&self, a: &ModuleNF, e: &ModuleNF, b: &ModuleNF) -> Result<bool> {
        match (a, e, b) {
            (
                ModuleNF::Pid { free: fa, .. },
                ModuleNF::Pid { free: fe, .. },
                ModuleNF::Pid { free: fb, .. },
            ) => Ok(*fe == fa + fb
                && RingDescriptor::pid_primes(&[a, e, b]).into_iter().all(|p| {
                    self.local_ses(
                        RingDescriptor::pid_local(a, p),
                        RingDescriptor::pid_local(e, p),
                        RingDescriptor::pid_local(b, p),
                    )
                })),
            (ModuleNF::Finite(x), ModuleNF::Finite(y), ModuleNF::Finite(z)) => {
                let RingDescriptor::Finite(f) = &self.ring else { unreachable!() };
                Ok(x.iter().zip(y).zip(z).zip(f).all(|(((a, e), b), c)| {
                    e.largest() <= c.length()
                        && self.local_ses(
                            LocalType::new(0, a.clone()),
                            LocalType::new(0, e.clone()),
                            LocalType::new(0, b.clone()),
                        )
                }))
            }
            _ => Err(self.unsupported("extension enumeration")),
        }
    }

    fn require_in_window(&self, m: &ModuleNF) -> Result<()> {
        if self.contains_module(m) {
            Ok(())
        } else {
            Err(Error::WindowTooSmall(format!(
                "{} lies outside the window",
                self.ring.module_label(m)
            )))
        }
    }

    fn filter_window(&self, keep: impl Fn(&ModuleNF) -> Result<bool>) -> Result<Vec<ModuleNF>> {
        let mut out = Vec::new();
        for x in self.enumerate_window() {
            if keep(&x)? {
                out.push(x);
            }
        }
        Ok(out)
    }

    pub fn submodules_window(&self, m: &ModuleNF) -> Result<Vec<ModuleNF>> {
        self.require_in_window(m)?;
        self.filter_window(|s| self.is_sub(s, m))
    }

    pub fn quotients_window(&self, m: &ModuleNF) -> Result<Vec<ModuleNF>> {
        self.require_in_window(m)?;
        self.filter_window(|q| self.is_quot(q, m))
    }

    /// Middle terms `E` of `0 -> a -> E -> b -> 0` inside the window.
    pub fn extensions_window(&self, a: &ModuleNF, b: &ModuleNF) -> Result<Vec<ModuleNF>> {
        self.require_in_window(a)?;
        self.require_in_window(b)?;
        self.filter_window(|e| self.ses(a, e, b))
    }

    /// Images of homomorphisms `m -> n`: modules that are both a quotient
    /// of `m` and a submodule of `n`.
    pub fn images_window(&self, m: &ModuleNF, n: &ModuleNF) -> Result<Vec<ModuleNF>> {
        self.require_in_window(m)?;
        self.require_in_window(n)?;
        self.filter_window(|x| Ok(self.is_quot(x, m)? && self.is_sub(x, n)?))
    }

    /// Short exact sequences of window modules built from colon sequences
    /// `0 -> R/(J:u) -> R/J -> R/(J+u) -> 0` on one summand, the remaining
    /// summands split to either end. Returned as `(a, e, b)` index triples.
    pub fn monomial_conflations(&self, universe: &[ModuleNF]) -> Result<Vec<(usize, usize, usize)>> {
        let (RingDescriptor::Monomial(r), AffineWindow::Monomial { .. }) = (&self.ring, &self.window)
        else {
            return Err(self.unsupported("colon sequences"));
        };
        let index: HashMap<&ModuleNF, usize> = universe.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let max_exp = r
            .ideal
            .gens()
            .iter()
            .flatten()
            .copied()
            .chain(universe.iter().flat_map(|m| match m {
                ModuleNF::Monomial(s) => s.iter().flat_map(|j| j.gens().iter().flatten().copied()).collect(),
                _ => Vec::new(),
            }))
            .max()
            .unwrap_or(1)
            .max(1);
        let multipliers: Vec<Vec<u32>> = monomial::box_monomials(r.nvars(), max_exp)
            .into_iter()
            .filter(|u| u.iter().any(|&e| e > 0))
            .collect();
        let mut out = BTreeSet::new();
        for (ei, e) in universe.iter().enumerate() {
            let ModuleNF::Monomial(s) = e else { continue };
            // each summand: 0 = to the kernel, 1 = to the cokernel, 2+k = colon by multiplier k
            let choices = 2 + multipliers.len();
            for choice in cartesian(&vec![choices; s.len()]) {
                let mut a = Vec::new();
                let mut b = Vec::new();
                for (j, &c) in s.iter().zip(&choice) {
                    match c {
                        0 => a.push(j.clone()),
                        1 => b.push(j.clone()),
                        k => {
                            let u = &multipliers[k - 2];
                            if j.contains_monomial(u) {
                                b.push(j.clone());
                                continue;
                            }
                            a.push(j.colon(u));
                            b.push(j.add_monomial(u));
                        }
                    }
                }
                let (a, b) = (ModuleNF::monomial(a), ModuleNF::monomial(b));
                if let (Some(&ai), Some(&bi)) = (index.get(&a), index.get(&b)) {
                    out.insert((ai, ei, bi));
                }
            }
        }
        Ok(out.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(text: &str) -> RingDescriptor {
        RingDescriptor::parse(text).unwrap()
    }

    fn labels(r: &RingDescriptor, set: &BTreeSet<PrimeIdeal>) -> String {
        r.prime_set_label(set)
    }

    #[test]
    fn embedded_prime_example() {
        let r = ring("F2[x,y]/(x^2,xy)");
        let m = r.ring_module();
        assert_eq!(labels(&r, &r.ass(&m)), "{(x), (x,y)}");
        assert_eq!(labels(&r, &r.assh(&m)), "{(x)}");
        assert_eq!(labels(&r, &r.min_ass(&m)), "{(x)}");
        assert!(!r.is_pure(&m));
        let k = r.parse_module("R/(x,y)").unwrap();
        assert!(r.is_pure(&k));
        assert!(!r.is_maximal_pure(&k));
        assert!(r.is_torsionfree(&r.parse_module("R/(x)").unwrap()));
        assert_eq!(r.dim(), 1);
        assert_eq!(r.is_cm_dim_le1(&m), Ok(false));
        let plane = ring("F2[x,y]");
        assert_eq!(plane.is_cm_dim_le1(&plane.ring_module()), Err(Error::DimensionTooLarge(2)));
    }

    #[test]
    fn integer_examples() {
        let z = ring("Z");
        let m = z.parse_module("Z/6 + Z").unwrap();
        assert_eq!(labels(&z, &z.ass(&m)), "{(0), (2), (3)}");
        let four = z.parse_module("Z/4").unwrap();
        assert_eq!(labels(&z, &z.supp(&four)), "{(2)}");
        assert_eq!(labels(&z, &z.assh(&four)), "{(2)}");
        assert!(!z.is_torsionfree(&z.parse_module("Z/2").unwrap()));
        let zero = z.zero_module();
        assert!(z.ass(&zero).is_empty() && z.supp(&zero).is_empty() && z.assh(&zero).is_empty());
        assert!(z.is_torsionfree(&zero) && z.is_pure(&zero) && z.is_maximal_pure(&zero));
        assert_eq!(z.is_cm_dim_le1(&zero), Ok(true));
    }

    #[test]
    fn node_ring_predicates() {
        let r = ring("F2[x,y]/(xy)");
        let m = r.ring_module();
        assert!(r.is_pure(&m) && r.is_maximal_pure(&m));
        assert_eq!(r.is_cm_dim_le1(&r.parse_module("R/(x)").unwrap()), Ok(true));
        assert_eq!(r.dim(), 1);
    }

    #[test]
    fn primary_filtrations() {
        let z = ring("Z");
        let f = z.primary_filtration(&z.parse_module("Z/6").unwrap()).unwrap();
        let shown: Vec<String> = f
            .iter()
            .map(|(p, m)| format!("{} {}", z.prime_label(p), z.module_label(m)))
            .collect();
        assert_eq!(shown, vec!["(2) Z/2", "(3) Z/3"]);
        let r = ring("F2[x,y]");
        let m = r.parse_module("R/(x^2,xy)").unwrap();
        let shown: Vec<String> = r
            .primary_filtration(&m)
            .unwrap()
            .iter()
            .map(|(p, m)| format!("{} {}", r.prime_label(p), r.module_label(m)))
            .collect();
        assert_eq!(shown, vec!["(x) R/(x)", "(x,y) R/(x^2,y)"]);
        assert_eq!(z.primary_filtration(&z.zero_module()), Err(Error::ZeroModule));
    }

    #[test]
    fn window_enumeration() {
        let z = AffineBackend::new(
            ring("Z"),
            AffineWindow::Pid { primes: vec![PidPrime::Int(2)], max_exponent: 1, max_rank: 1 },
        )
        .unwrap();
        let names: Vec<String> = z.enumerate_window().iter().map(|m| z.ring.module_label(m)).collect();
        assert_eq!(names, vec!["0", "Z/2", "Z", "Z + Z/2"]);
        let z4 = AffineBackend::new(ring("Z/4"), AffineWindow::Finite { max_length: 2 }).unwrap();
        let names: Vec<String> = z4.enumerate_window().iter().map(|m| z4.ring.module_label(m)).collect();
        assert_eq!(names, vec!["0", "Z/2", "Z/4", "Z/2 + Z/2"]);
        let empty = AffineBackend::new(
            ring("Z"),
            AffineWindow::Pid { primes: vec![], max_exponent: 3, max_rank: 0 },
        )
        .unwrap();
        assert_eq!(empty.enumerate_window().len(), 1);
    }

    #[test]
    fn window_operations() {
        let z4 = AffineBackend::new(ring("Z/4"), AffineWindow::Finite { max_length: 2 }).unwrap();
        let r = &z4.ring;
        let show = |v: Vec<ModuleNF>| v.iter().map(|m| r.module_label(m)).collect::<Vec<_>>();
        let m = r.parse_module("Z/4").unwrap();
        let two = r.parse_module("Z/2").unwrap();
        assert_eq!(show(z4.submodules_window(&m).unwrap()), vec!["0", "Z/2", "Z/4"]);
        assert_eq!(show(z4.extensions_window(&two, &two).unwrap()), vec!["Z/4", "Z/2 + Z/2"]);
        let z = AffineBackend::new(
            ring("Z"),
            AffineWindow::Pid {
                primes: vec![PidPrime::Int(2), PidPrime::Int(3)],
                max_exponent: 2,
                max_rank: 1,
            },
        )
        .unwrap();
        let a = z.ring.parse_module("Z/2").unwrap();
        let b = z.ring.parse_module("Z/3").unwrap();
        let ext: Vec<String> = z
            .extensions_window(&a, &b)
            .unwrap()
            .iter()
            .map(|m| z.ring.module_label(m))
            .collect();
        assert_eq!(ext, vec!["Z/2 + Z/3"]);
        let mono = AffineBackend::new(
            ring("F2[x,y]/(xy)"),
            AffineWindow::Monomial { cyclics: vec![], max_summands: 1 },
        )
        .unwrap();
        let zero = mono.ring.zero_module();
        assert!(matches!(mono.submodules_window(&zero), Err(Error::UnsupportedBackend { .. })));
    }
}
