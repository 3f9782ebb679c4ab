//! Command implementations. Each returns the text to print and whether the
//! run passed.

use std::collections::BTreeSet;
use std::fmt;

use tfclass_core::affine::{
    self, AffineBackend, AffineWindow, ModuleNF, MonomialIdeal, PidKind, PidPrime, RingDescriptor,
};
use tfclass_core::exact::{irreducibles_up_to_degree, Field, Poly};
use tfclass_core::p1::{self, ClosedPoint, P1Backend, P1Classification, P1Window, SheafP1};
use tfclass_core::subcat::{self, Category, WindowIndex, MAX_POOL};
use tfclass_core::Error;

use crate::config::{ConfigError, Phi, Pool, RunConfig};

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Compute(Error),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "config error: {e}"),
            CliError::Compute(Error::WindowTooSmall(msg)) => {
                write!(f, "window too small: {msg} (enlarge the [window] bounds)")
            }
            CliError::Compute(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Compute(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Text produced by a command and whether it passed.
pub struct Output {
    pub text: String,
    pub pass: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Theorem {
    Takahashi,
    GabrielSerre,
    IeTorf,
    SerreInTorf,
}

/// A configured category together with the source text for error positions.
pub struct Session<'a> {
    pub config: &'a RunConfig,
    pub source: &'a str,
    pub space: Space,
}

pub enum Space {
    Affine(AffineBackend),
    P1(P1Backend),
}

fn config_error(msg: impl Into<String>) -> CliError {
    CliError::Config(ConfigError::new(msg))
}

/// Attach the position of `literal` in the config file to a parse error.
fn literal_error(source: &str, literal: &str, e: Error) -> CliError {
    let col = match &e {
        Error::Parse { column, .. } => *column,
        _ => 1,
    };
    let (line, column) = RunConfig::locate(source, literal, col);
    let message = match e {
        Error::Parse { message, .. } => format!("in `{literal}`: {message}"),
        other => format!("in `{literal}`: {other}"),
    };
    CliError::Config(ConfigError { line, column, message })
}

fn p1_field(space: &str) -> Option<Result<Field, Error>> {
    let rest = space.trim().strip_prefix("P1")?;
    let rest = rest.trim_start_matches(['/', ' ']);
    Some(if rest.is_empty() { Field::prime(2) } else { affine::parse_field(rest) })
}

fn pid_prime(ring: &RingDescriptor, text: &str) -> Result<PidPrime, Error> {
    let p = match ring {
        RingDescriptor::Pid(PidKind::Integers) => {
            let n: u64 = text
                .trim()
                .parse()
                .map_err(|_| Error::InvalidDescriptor(format!("`{text}` is not an integer prime")))?;
            PidPrime::Int(n)
        }
        RingDescriptor::Pid(PidKind::Polynomials(k)) => PidPrime::Poly(Poly::parse(*k, "t", text)?),
        _ => return Err(Error::InvalidDescriptor("window primes apply to Z and k[t]".into())),
    };
    ring.validate_prime(&affine::PrimeIdeal::Pid(p.clone()))?;
    Ok(p)
}

impl<'a> Session<'a> {
    pub fn new(config: &'a RunConfig, source: &'a str) -> CliResult<Self> {
        let w = &config.window;
        if let Some(field) = p1_field(&config.space) {
            let field = field.map_err(|e| config_error(format!("space `{}`: {e}", config.space)))?;
            let lo = w.twist_lo.unwrap_or(-4);
            let hi = w.twist_hi.unwrap_or(4);
            let len = w.max_torsion_length.unwrap_or(2);
            let rank = w.max_rank.unwrap_or(1);
            let window = match &w.points {
                Some(points) => {
                    let pts = points
                        .iter()
                        .map(|s| ClosedPoint::parse(field, s).map_err(|e| literal_error(source, s, e)))
                        .collect::<CliResult<Vec<_>>>()?;
                    P1Window::with_points(field, pts, lo, hi, len, rank)?
                }
                None => {
                    if !field.is_finite() {
                        return Err(config_error("over Q the window needs an explicit `points` list"));
                    }
                    P1Window::standard(field, lo, hi, len, w.max_point_degree.unwrap_or(2), rank)?
                }
            };
            return Ok(Session { config, source, space: Space::P1(P1Backend::new(window)) });
        }
        let ring = RingDescriptor::parse(&config.space)
            .map_err(|e| config_error(format!("space `{}`: {e}", config.space)))?;
        let window = match &ring {
            RingDescriptor::Pid(kind) => {
                let primes = match (&w.primes, kind) {
                    (Some(list), _) => list
                        .iter()
                        .map(|s| pid_prime(&ring, s).map_err(|e| literal_error(source, s, e)))
                        .collect::<CliResult<Vec<_>>>()?,
                    (None, PidKind::Integers) => vec![PidPrime::Int(2), PidPrime::Int(3)],
                    (None, PidKind::Polynomials(k)) => irreducibles_up_to_degree(*k, 1)
                        .map_err(|_| config_error("over Q[t] the window needs an explicit `primes` list"))?
                        .into_iter()
                        .map(PidPrime::Poly)
                        .collect(),
                };
                AffineWindow::Pid {
                    primes,
                    max_exponent: w.max_exponent.unwrap_or(2),
                    max_rank: w.max_rank.unwrap_or(1),
                }
            }
            RingDescriptor::Finite(_) => AffineWindow::Finite { max_length: w.max_length.unwrap_or(3) },
            RingDescriptor::Monomial(r) => {
                let cyclics = match &w.cyclics {
                    Some(list) => list
                        .iter()
                        .map(|s| {
                            MonomialIdeal::parse(&r.vars, s)
                                .map(|j| j.sum(&r.ideal))
                                .map_err(|e| literal_error(source, s, e))
                        })
                        .collect::<CliResult<Vec<_>>>()?,
                    None => affine::monomial::ideals_in_box(&r.ideal, w.box_exponent.unwrap_or(2)),
                };
                AffineWindow::Monomial { cyclics, max_summands: w.max_summands.unwrap_or(2) }
            }
        };
        let backend = AffineBackend::new(ring, window)?;
        Ok(Session { config, source, space: Space::Affine(backend) })
    }

    fn parse_module(&self, b: &AffineBackend, text: &str) -> CliResult<ModuleNF> {
        b.ring.parse_module(text).map_err(|e| literal_error(self.source, text, e))
    }

    fn parse_sheaf(&self, b: &P1Backend, text: &str) -> CliResult<SheafP1> {
        SheafP1::parse(b.window.field, text).map_err(|e| literal_error(self.source, text, e))
    }
}

fn set_label(labels: impl IntoIterator<Item = String>) -> String {
    format!("{{{}}}", labels.into_iter().collect::<Vec<_>>().join(", "))
}

fn yes_no(b: bool) -> String {
    if b { "yes" } else { "no" }.to_string()
}

fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let widths: Vec<usize> = (0..header.len())
        .map(|c| {
            rows.iter()
                .map(|r| r[c].chars().count())
                .chain([header[c].chars().count()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        padded.join(" | ").trim_end().to_string() + "\n"
    };
    let mut out = line(header.to_vec());
    out.push_str(&line(widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().iter().map(|s| s.as_str()).collect()));
    for r in rows {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
    }
    out
}

const ASS_HEADER: [&str; 10] = [
    "object",
    "Ass",
    "Min",
    "Assh",
    "Supp",
    "torsionfree",
    "pure",
    "maximal-pure",
    "CM(dim<=1)",
    "maximal-CM(dim<=1)",
];

fn verdict(r: Result<bool, Error>) -> String {
    match r {
        Ok(v) => yes_no(v),
        Err(Error::DimensionTooLarge(d)) => format!("error: dimension {d} > 1"),
        Err(e) => format!("error: {e}"),
    }
}

/// Associated points, support and the purity predicates of each object.
pub fn cmd_ass(s: &Session) -> CliResult<Output> {
    let mut text = String::new();
    let mut rows = Vec::new();
    match &s.space {
        Space::Affine(b) => {
            let r = &b.ring;
            text.push_str(&format!(
                "ring: {r}\nAss R = {}\nMin R = {}\nAssh R = {}\ndim R = {}\n\n",
                r.prime_set_label(&r.ring_ass()),
                r.prime_set_label(&r.ring_min()),
                r.prime_set_label(&r.ring_assh()),
                r.dim()
            ));
            for lit in &s.config.objects {
                let m = s.parse_module(b, lit)?;
                let supp = match &m {
                    ModuleNF::Pid { free, .. } if *free > 0 => "Spec R".to_string(),
                    _ => r.prime_set_label(&r.supp(&m)),
                };
                rows.push(vec![
                    r.module_label(&m),
                    r.prime_set_label(&r.ass(&m)),
                    r.prime_set_label(&r.min_ass(&m)),
                    r.prime_set_label(&r.assh(&m)),
                    supp,
                    yes_no(r.is_torsionfree(&m)),
                    yes_no(r.is_pure(&m)),
                    yes_no(r.is_maximal_pure(&m)),
                    verdict(r.is_cm_dim_le1(&m)),
                    verdict(r.is_maximal_cm_dim_le1(&m)),
                ]);
            }
        }
        Space::P1(b) => {
            let f = b.window.field;
            text.push_str(&format!("scheme: P1 over {f}\nAss X = {{eta}}\nMin X = {{eta}}\nAssh X = {{eta}}\ndim X = 1\n\n"));
            let show = |set: BTreeSet<p1::P1Point>| set_label(set.iter().map(|p| p.to_string()));
            for lit in &s.config.objects {
                let m = s.parse_sheaf(b, lit)?;
                let supp = if m.rank() > 0 { "P1".to_string() } else { show(p1::ass_p1(&m)) };
                let cm = p1::is_cm_p1(&m);
                rows.push(vec![
                    m.to_string(),
                    show(p1::ass_p1(&m)),
                    show(p1::min_p1(&m)),
                    show(p1::min_p1(&m)),
                    supp,
                    yes_no(p1::is_torsionfree_p1(&m)),
                    yes_no(cm),
                    yes_no(p1::is_torsionfree_p1(&m)),
                    yes_no(cm),
                    yes_no(p1::is_torsionfree_p1(&m)),
                ]);
            }
        }
    }
    text.push_str(&table(&ASS_HEADER, &rows));
    Ok(Output { text, pass: true })
}

fn positions<C: Category>(idx: &WindowIndex<'_, C>, objs: &[C::Obj]) -> CliResult<Vec<usize>> {
    Ok(objs.iter().map(|o| idx.require(o)).collect::<Result<Vec<_>, _>>()?)
}

/// Identify the torsionfree class generated by the configured generators.
pub fn cmd_classify(s: &Session) -> CliResult<Output> {
    let gens_text = s.config.generators.join(", ");
    match &s.space {
        Space::Affine(b) => {
            let gens = s.config.generators.iter().map(|g| s.parse_module(b, g)).collect::<CliResult<Vec<_>>>()?;
            let idx = WindowIndex::new(b)?;
            let id = subcat::identify_ass_class(&idx, &positions(&idx, &gens)?)?;
            let text = format!(
                "space: {}\nwindow: {}\ngenerators: {{{gens_text}}}\nclass: {}\nclass size in window: {}\nmatches Ass class: {}\n",
                b.ring,
                b.window_label(),
                id.label,
                id.size,
                yes_no(id.matches)
            );
            Ok(Output { text, pass: id.matches })
        }
        Space::P1(b) => {
            let gens = s.config.generators.iter().map(|g| s.parse_sheaf(b, g)).collect::<CliResult<Vec<_>>>()?;
            let idx = WindowIndex::new(b)?;
            let c = p1::classify_window(&idx, &gens)?;
            let partner = match &c {
                P1Classification::Family(fam) => p1::torsion_pair_partner(fam)
                    .map_or("none (not the torsionfree part of a torsion pair)".to_string(), |t| t),
                P1Classification::NotClassified { .. } => "n/a".to_string(),
            };
            let text = format!(
                "space: P1/{}\nwindow: {}\ngenerators: {{{gens_text}}}\nclass: {c}\ntorsion class partner: {partner}\n",
                b.window.field,
                b.window_label()
            );
            Ok(Output { text, pass: matches!(c, P1Classification::Family(_)) })
        }
    }
}

fn resolve_pool<C: Category>(
    s: &Session,
    idx: &WindowIndex<'_, C>,
    parse: impl Fn(&str) -> CliResult<C::Obj>,
) -> CliResult<Vec<usize>> {
    match &s.config.pool {
        None => Err(config_error("`pool` is required for verify")),
        Some(Pool::Keyword(k)) if k == "full" => {
            let pool: Vec<usize> = (0..idx.len()).filter(|&i| i != idx.zero()).collect();
            if pool.len() > MAX_POOL {
                return Err(config_error(format!(
                    "the full pool has {} objects; at most {MAX_POOL} are allowed, list a pool explicitly",
                    pool.len()
                )));
            }
            Ok(pool)
        }
        Some(Pool::Keyword(k)) => Err(config_error(format!("unknown pool keyword `{k}` (use \"full\" or a list)"))),
        Some(Pool::List(list)) => {
            let objs = list.iter().map(|t| parse(t)).collect::<CliResult<Vec<_>>>()?;
            positions(idx, &objs)
        }
    }
}

fn resolve_phi<C: Category>(
    s: &Session,
    idx: &WindowIndex<'_, C>,
    keyword: impl Fn(&str) -> Option<BTreeSet<C::Point>>,
) -> CliResult<BTreeSet<usize>> {
    let phi = s.config.phi.clone().unwrap_or(Phi::Keyword("ass".into()));
    match phi {
        Phi::Keyword(k) => {
            let set = keyword(&k).ok_or_else(|| {
                config_error(format!("unknown phi keyword `{k}` (use \"ass\", \"assh\", \"min\" or a list)"))
            })?;
            set.iter()
                .map(|p| idx.point_index(p).ok_or_else(|| config_error("phi contains a point outside the window")))
                .collect()
        }
        Phi::List(labels) => Ok(idx.points_from_labels(&labels)?),
    }
}

fn verify_generic<C: Category>(
    s: &Session,
    idx: &WindowIndex<'_, C>,
    theorem: Theorem,
    parse: impl Fn(&str) -> CliResult<C::Obj>,
    keyword: impl Fn(&str) -> Option<BTreeSet<C::Point>>,
) -> CliResult<(subcat::Report, Option<subcat::Lattice>)> {
    Ok(match theorem {
        Theorem::Takahashi => (subcat::verify_takahashi(idx, &resolve_pool(s, idx, parse)?)?, None),
        Theorem::GabrielSerre => (subcat::verify_gabriel_serre(idx, &resolve_pool(s, idx, parse)?)?, None),
        Theorem::IeTorf => (subcat::verify_ie_equals_torf(idx, &resolve_pool(s, idx, parse)?)?, None),
        Theorem::SerreInTorf => {
            let phi = resolve_phi(s, idx, keyword)?;
            let (r, l) = subcat::verify_serre_in_torf(idx, &phi)?;
            (r, Some(l))
        }
    })
}

fn affine_keyword(ring: &RingDescriptor, k: &str) -> Option<BTreeSet<affine::PrimeIdeal>> {
    match k {
        "ass" => Some(ring.ring_ass()),
        "assh" => Some(ring.ring_assh()),
        "min" => Some(ring.ring_min()),
        _ => None,
    }
}

fn p1_keyword(k: &str) -> Option<BTreeSet<p1::P1Point>> {
    matches!(k, "ass" | "assh" | "min").then(|| [p1::P1Point::Generic].into())
}

fn run_theorem(s: &Session, theorem: Theorem) -> CliResult<(subcat::Report, Option<subcat::Lattice>)> {
    match &s.space {
        Space::Affine(b) => {
            let idx = WindowIndex::new(b)?;
            verify_generic(s, &idx, theorem, |t| s.parse_module(b, t), |k| affine_keyword(&b.ring, k))
        }
        Space::P1(b) => {
            let idx = WindowIndex::new(b)?;
            verify_generic(s, &idx, theorem, |t| s.parse_sheaf(b, t), p1_keyword)
        }
    }
}

/// Run a verifier and render its JSON report.
pub fn cmd_verify(s: &Session, theorem: Theorem) -> CliResult<Output> {
    let (report, _) = run_theorem(s, theorem)?;
    let mut text = serde_json::to_string_pretty(&report).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    Ok(Output { text, pass: report.pass })
}

/// The Serre lattice of the configured point set, as DOT.
pub fn cmd_lattice(s: &Session) -> CliResult<Output> {
    let (report, lattice) = run_theorem(s, Theorem::SerreInTorf)?;
    let lattice = lattice.unwrap_or_default();
    Ok(Output { text: subcat::lattice_dot(&lattice), pass: report.pass })
}

pub enum P1Command {
    Hom(String, String),
    Ext(String, String),
    Decompose(String),
}

/// Direct sheaf computations on P1 from literals.
pub fn cmd_p1(field: &str, command: &P1Command) -> CliResult<Output> {
    let field = affine::parse_field(field).map_err(|e| config_error(e.to_string()))?;
    let sheaf = |t: &str| SheafP1::parse(field, t).map_err(|e| config_error(format!("in `{t}`: {e}")));
    let text = match command {
        P1Command::Hom(f, g) => format!("{}\n", p1::hom_dim(&sheaf(f)?, &sheaf(g)?)),
        P1Command::Ext(f, g) => format!("{}\n", p1::ext1_dim(&sheaf(f)?, &sheaf(g)?)),
        P1Command::Decompose(f) => {
            let f = sheaf(f)?;
            let (tor, vect) = p1::decompose(&f);
            format!(
                "tor = {tor}\nvect = {vect}\nrank = {}\ndegree = {}\neuler characteristic = {}\n",
                f.rank(),
                f.degree(),
                p1::euler_characteristic(&f)
            )
        }
    };
    Ok(Output { text, pass: true })
}
