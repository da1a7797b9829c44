//! Realization statuses for catalog entries, derived by a monotone fixpoint
//! over product-table rules with a replayable derivation log.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bimodule::{bimodule_iso, dual_bimodule, identity_bimodule, Catalog, FusionBimodule};
use crate::multcompat::ProductTable;
use crate::nimrep::{canonical_module, module_iso, opposite_module, FusionModule, Side};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Status {
    Unknown,
    Realized,
    RealizedUniquely,
    NotRealized,
}

impl Status {
    pub fn is_realized(self) -> bool {
        matches!(self, Status::Realized | Status::RealizedUniquely)
    }

    pub fn name(self) -> &'static str {
        match self {
            Status::Unknown => "unknown",
            Status::Realized => "realized",
            Status::RealizedUniquely => "realizedUniquely",
            Status::NotRealized => "notRealized",
        }
    }

    /// `Ok(Some(s))` when moving to `next` strengthens the status, `Ok(None)`
    /// when it adds nothing, `Err` on a contradiction.
    fn merge(self, next: Status) -> Result<Option<Status>, ()> {
        use Status::*;
        match (self, next) {
            (a, b) if a == b => Ok(None),
            (_, Unknown) => Ok(None),
            (Unknown, b) => Ok(Some(b)),
            (Realized, RealizedUniquely) => Ok(Some(RealizedUniquely)),
            (RealizedUniquely, Realized) => Ok(None),
            _ => Err(()),
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Status {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "unknown" => Status::Unknown,
            "realized" => Status::Realized,
            "realizedUniquely" => Status::RealizedUniquely,
            "notRealized" => Status::NotRealized,
            other => return Err(format!("unknown status `{other}`")),
        })
    }
}

/// A bimodule catalog entry `(left, right, index)` or a right-module entry
/// `(ring, index)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subject {
    Bimodule(String, String, usize),
    Module(String, usize),
}

impl Subject {
    fn pair(&self) -> (&str, &str) {
        match self {
            Subject::Bimodule(a, b, _) => (a, b),
            Subject::Module(r, _) => (r, r),
        }
    }
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::Bimodule(a, b, i) => f.write_str(&Catalog::bimodule_id(a, b, *i)),
            Subject::Module(r, i) => f.write_str(&Catalog::module_id(r, Side::Right, *i)),
        }
    }
}

impl FromStr for Subject {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split('-').collect();
        if parts.len() != 3 {
            return Err(format!("bad catalog id `{s}`"));
        }
        let idx: usize = parts[2].parse().map_err(|_| format!("bad index in `{s}`"))?;
        if parts[1] == "right" {
            Ok(Subject::Module(parts[0].to_string(), idx))
        } else {
            Ok(Subject::Bimodule(parts[0].to_string(), parts[1].to_string(), idx))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    Seed,
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    R7,
    R8,
    R9,
    R10,
    Restrict,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Seed => "SEED",
            Rule::R1 => "R1",
            Rule::R2 => "R2",
            Rule::R3 => "R3",
            Rule::R4 => "R4",
            Rule::R5 => "R5",
            Rule::R6 => "R6",
            Rule::R7 => "R7",
            Rule::R8 => "R8",
            Rule::R9 => "R9",
            Rule::R10 => "R10",
            Rule::Restrict => "RES",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Rule {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "SEED" => Rule::Seed,
            "R1" => Rule::R1,
            "R2" => Rule::R2,
            "R3" => Rule::R3,
            "R4" => Rule::R4,
            "R5" => Rule::R5,
            "R6" => Rule::R6,
            "R7" => Rule::R7,
            "R8" => Rule::R8,
            "R9" => Rule::R9,
            "R10" => Rule::R10,
            "RES" => Rule::Restrict,
            other => return Err(format!("unknown rule `{other}`")),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeedReason {
    /// Identity bimodule; unique when the ring is assumed to have no outer
    /// automorphisms.
    Identity,
    /// Regular right module.
    Regular,
    /// Entry with a basis element whose internal end on `side` is `element`.
    Generator { side: Side, element: Vec<u32> },
}

impl fmt::Display for SeedReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeedReason::Identity => f.write_str("identity"),
            SeedReason::Regular => f.write_str("regular"),
            SeedReason::Generator { side, element } => {
                let e: Vec<String> = element.iter().map(|x| x.to_string()).collect();
                write!(f, "{side}:{}", e.join(","))
            }
        }
    }
}

impl FromStr for SeedReason {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "identity" => Ok(SeedReason::Identity),
            "regular" => Ok(SeedReason::Regular),
            _ => {
                let (side, e) = s.split_once(':').ok_or_else(|| format!("bad seed `{s}`"))?;
                let element = e
                    .split(',')
                    .map(|x| x.parse::<u32>().map_err(|_| format!("bad seed element `{s}`")))
                    .collect::<Result<_, _>>()?;
                Ok(SeedReason::Generator {
                    side: side.parse()?,
                    element,
                })
            }
        }
    }
}

/// One logged rule application. For rules citing a product, the first two
/// premises are its factors in order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationStep {
    pub rule: Rule,
    pub subject: Subject,
    pub status: Status,
    pub premises: Vec<Subject>,
    pub seed: Option<SeedReason>,
    pub note: String,
}

/// Global assumptions the seeds rely on.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assumptions {
    /// Rings whose identity bimodule is realized uniquely.
    pub no_outer_automorphisms: BTreeSet<String>,
    /// Generator algebra objects are unique, so the modules they define are
    /// realized uniquely.
    pub unique_generator_algebras: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FactBase {
    status: BTreeMap<Subject, Status>,
}

impl FactBase {
    pub fn get(&self, s: &Subject) -> Status {
        self.status.get(s).copied().unwrap_or(Status::Unknown)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Subject, &Status)> {
        self.status.iter()
    }

    /// Counts of `(realizedUniquely, realized, notRealized, unknown)` over
    /// the given subjects.
    pub fn tally<'a>(&self, subjects: impl IntoIterator<Item = &'a Subject>) -> (usize, usize, usize, usize) {
        let mut t = (0, 0, 0, 0);
        for s in subjects {
            match self.get(s) {
                Status::RealizedUniquely => t.0 += 1,
                Status::Realized => t.1 += 1,
                Status::NotRealized => t.2 += 1,
                Status::Unknown => t.3 += 1,
            }
        }
        t
    }

    fn set(&mut self, s: &Subject, st: Status) {
        self.status.insert(s.clone(), st);
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupoidError {
    #[error("contradiction at {subject}: {existing} but {rule} derives {attempted} (after {steps} steps)")]
    Contradiction {
        subject: String,
        existing: Status,
        attempted: Status,
        rule: Rule,
        steps: usize,
    },
    #[error("generator {0} is matched by {1} entries")]
    Identification(String, usize),
    #[error("{0}")]
    Composition(String),
    #[error("log step {step}: {reason}")]
    Verify { step: usize, reason: String },
}

/// A generator seed: the catalog entry over `(left, right)` with a basis
/// element whose internal end on `side` is `element`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSeed {
    pub name: String,
    pub left: String,
    pub right: String,
    pub ends: Vec<(Side, String)>,
}

/// The generators of the Asaeda-Haagerup family: the AH, AH+1 and AH+2
/// subfactors and the index 2 algebra objects.
pub fn ah_generators() -> Vec<GeneratorSeed> {
    let g = |name: &str, l: &str, r: &str, ends: &[(Side, &str)]| GeneratorSeed {
        name: name.into(),
        left: l.into(),
        right: r.into(),
        ends: ends.iter().map(|(s, e)| (*s, e.to_string())).collect(),
    };
    vec![
        g("AH", "AH1", "AH2", &[(Side::Left, "1+psi"), (Side::Right, "1+rho")]),
        g("AH+1", "AH1", "AH3", &[(Side::Left, "1+chi"), (Side::Right, "1+xi")]),
        g("AH+2", "AH1", "AH1", &[(Side::Left, "1+sigma")]),
        g("index 2", "AH2", "AH3", &[(Side::Left, "1+alpha"), (Side::Right, "1+beta")]),
    ]
}

pub fn ah_assumptions() -> Assumptions {
    Assumptions {
        no_outer_automorphisms: ["AH1", "AH2"].iter().map(|s| s.to_string()).collect(),
        unique_generator_algebras: true,
    }
}

fn has_end(b: &FusionBimodule, side: Side, e: &[u32]) -> bool {
    (0..b.rank()).any(|t| match side {
        Side::Left => b.left_end(t) == e,
        Side::Right => b.right_end(t) == e,
    })
}

/// The unique entry over `(left, right)` containing a basis element with
/// internal end `e` on `side`.
pub fn identify_by_generator(cat: &Catalog, left: &str, right: &str, side: Side, e: &[u32]) -> Result<usize, GroupoidError> {
    let hits: Vec<usize> = cat
        .bimodules(left, right)
        .iter()
        .enumerate()
        .filter(|(_, b)| has_end(b, side, e))
        .map(|(i, _)| i)
        .collect();
    match hits.as_slice() {
        [one] => Ok(*one),
        _ => Err(GroupoidError::Identification(format!("{left}-{right} {side} {e:?}"), hits.len())),
    }
}

/// Catalog lookups shared by the rules.
pub struct World<'a> {
    cat: &'a Catalog,
    tables: &'a ProductTable,
    names: Vec<String>,
    identity: BTreeMap<String, usize>,
    dual: BTreeMap<Subject, Subject>,
    restriction: BTreeMap<Subject, Subject>,
}

impl<'a> World<'a> {
    pub fn new(cat: &'a Catalog, tables: &'a ProductTable) -> Self {
        let names: Vec<String> = cat.rings().iter().map(|r| r.name().to_string()).collect();
        let mut identity = BTreeMap::new();
        for r in cat.rings() {
            let idx = cat.find_bimodule(&identity_bimodule(r)).expect("identity bimodule in catalog");
            identity.insert(r.name().to_string(), idx);
        }
        let mut dual = BTreeMap::new();
        let mut restriction = BTreeMap::new();
        for a in &names {
            for b in &names {
                let mods = cat.modules(b, Side::Right);
                for (i, x) in cat.bimodules(a, b).iter().enumerate() {
                    let s = Subject::Bimodule(a.clone(), b.clone(), i);
                    let d = cat.dual_index(a, b, i).expect("dual-closed catalog");
                    dual.insert(s.clone(), Subject::Bimodule(b.clone(), a.clone(), d));
                    let c = canonical_module(&x.right_module());
                    if let Some(m) = mods.iter().position(|m| *m == c) {
                        restriction.insert(s, Subject::Module(b.clone(), m));
                    }
                }
            }
        }
        World {
            cat,
            tables,
            names,
            identity,
            dual,
            restriction,
        }
    }

    pub fn catalog(&self) -> &Catalog {
        self.cat
    }

    pub fn identity(&self, ring: &str) -> Subject {
        Subject::Bimodule(ring.into(), ring.into(), self.identity[ring])
    }

    pub fn dual(&self, s: &Subject) -> Subject {
        self.dual[s].clone()
    }

    pub fn restriction(&self, s: &Subject) -> Option<&Subject> {
        self.restriction.get(s)
    }

    pub fn pair(&self, a: &str, b: &str) -> Vec<Subject> {
        (0..self.cat.bimodules(a, b).len())
            .map(|i| Subject::Bimodule(a.into(), b.into(), i))
            .collect()
    }

    pub fn bimodules(&self) -> Vec<Subject> {
        let mut out = Vec::new();
        for a in &self.names {
            for b in &self.names {
                out.extend(self.pair(a, b));
            }
        }
        out
    }

    pub fn modules(&self, ring: &str) -> Vec<Subject> {
        (0..self.cat.modules(ring, Side::Right).len())
            .map(|i| Subject::Module(ring.into(), i))
            .collect()
    }

    pub fn all_modules(&self) -> Vec<Subject> {
        self.names.iter().flat_map(|r| self.modules(r)).collect()
    }

    /// `x . y` when composable.
    pub fn product(&self, x: &Subject, y: &Subject) -> Option<Vec<Subject>> {
        match (x, y) {
            (Subject::Bimodule(a, b, k), Subject::Bimodule(b2, c, l)) if b == b2 => self
                .tables
                .product(a, b, c, *k, *l)
                .map(|v| v.iter().map(|&m| Subject::Bimodule(a.clone(), c.clone(), m)).collect()),
            (Subject::Module(a, k), Subject::Bimodule(a2, b, l)) if a == a2 => self
                .tables
                .module_product(a, b, *k, *l)
                .map(|v| v.iter().map(|&m| Subject::Module(b.clone(), m)).collect()),
            _ => None,
        }
    }

    /// Bimodules composable on the right of `x`.
    fn right_partners(&self, x: &Subject) -> Vec<Subject> {
        let (_, b) = x.pair();
        let b = b.to_string();
        self.names.iter().flat_map(|c| self.pair(&b, c)).collect()
    }
}

fn join(xs: &[Subject]) -> String {
    xs.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(", ")
}

/// The seed steps: identity bimodules and generator entries, closed under
/// duals by the engine.
pub fn seed_facts(world: &World, generators: &[GeneratorSeed], assumptions: &Assumptions) -> Result<Vec<DerivationStep>, GroupoidError> {
    let mut steps = Vec::new();
    for r in &world.names {
        let unique = assumptions.no_outer_automorphisms.contains(r);
        steps.push(DerivationStep {
            rule: Rule::Seed,
            subject: world.identity(r),
            status: if unique { Status::RealizedUniquely } else { Status::Realized },
            premises: vec![],
            seed: Some(SeedReason::Identity),
            note: if unique {
                format!("trivial autoequivalence of {r}, which has no outer automorphisms")
            } else {
                format!("trivial autoequivalence of {r}")
            },
        });
    }
    for g in generators {
        let mut found: Option<usize> = None;
        for (side, e) in &g.ends {
            let ring = match side {
                Side::Left => world.cat.ring(&g.left),
                Side::Right => world.cat.ring(&g.right),
            }
            .ok_or_else(|| GroupoidError::Identification(g.name.clone(), 0))?;
            let el = ring
                .parse_element(e)
                .map_err(|_| GroupoidError::Identification(format!("{} {e}", g.name), 0))?;
            let coeffs: Vec<u32> = el.coeffs().iter().map(|&c| c as u32).collect();
            let idx = identify_by_generator(world.cat, &g.left, &g.right, *side, &coeffs)?;
            if found.is_some_and(|f| f != idx) {
                return Err(GroupoidError::Identification(g.name.clone(), 2));
            }
            found = Some(idx);
            steps.push(DerivationStep {
                rule: Rule::Seed,
                subject: Subject::Bimodule(g.left.clone(), g.right.clone(), idx),
                status: Status::Realized,
                premises: vec![],
                seed: Some(SeedReason::Generator { side: *side, element: coeffs }),
                note: format!("{} subfactor, {side} internal end {e}", g.name),
            });
        }
    }
    Ok(steps)
}

/// Derived facts together with the log that produced them.
#[derive(Clone, Debug)]
pub struct Deduction {
    pub facts: FactBase,
    pub log: Vec<DerivationStep>,
}

struct Engine<'w, 'a> {
    w: &'w World<'a>,
    facts: FactBase,
    log: Vec<DerivationStep>,
}

impl Engine<'_, '_> {
    fn get(&self, s: &Subject) -> Status {
        self.facts.get(s)
    }

    fn apply(&mut self, step: DerivationStep) -> Result<bool, GroupoidError> {
        let cur = self.get(&step.subject);
        match cur.merge(step.status) {
            Err(()) => Err(GroupoidError::Contradiction {
                subject: step.subject.to_string(),
                existing: cur,
                attempted: step.status,
                rule: step.rule,
                steps: self.log.len(),
            }),
            Ok(None) => Ok(false),
            Ok(Some(s)) => {
                self.facts.set(&step.subject, s);
                self.log.push(step);
                Ok(true)
            }
        }
    }

    fn step(rule: Rule, subject: Subject, status: Status, premises: Vec<Subject>, note: String) -> DerivationStep {
        DerivationStep {
            rule,
            subject,
            status,
            premises,
            seed: None,
            note,
        }
    }

    fn composable(&self) -> Vec<(Subject, Subject, Vec<Subject>)> {
        let mut out = Vec::new();
        for x in self.w.bimodules() {
            for y in self.w.right_partners(&x) {
                if let Some(p) = self.w.product(&x, &y) {
                    out.push((x.clone(), y, p));
                }
            }
        }
        out
    }

    fn rule(&self, rule: Rule, triples: &[(Subject, Subject, Vec<Subject>)]) -> Result<Vec<DerivationStep>, GroupoidError> {
        let mut out = Vec::new();
        let g = |s: &Subject| self.get(s);
        match rule {
            Rule::R1 => {
                for (a, b, p) in triples {
                    if g(a).is_realized() && g(b).is_realized() && p.len() == 1 {
                        out.push(Self::step(rule, p[0].clone(), Status::Realized, vec![a.clone(), b.clone()], format!("{a} . {b} = {}", p[0])));
                    }
                }
            }
            Rule::R2 => {
                for (s, st) in self.facts.iter() {
                    if matches!(s, Subject::Bimodule(..)) && *st != Status::Unknown {
                        let d = self.w.dual(s);
                        out.push(Self::step(rule, d.clone(), *st, vec![s.clone()], format!("{d} is dual to {s}")));
                    }
                }
            }
            Rule::R3 => {
                for (a, b, p) in triples {
                    if p.iter().all(|c| g(c) == Status::NotRealized) {
                        let mut prem = vec![a.clone(), b.clone()];
                        prem.extend(p.iter().cloned());
                        let what = if p.is_empty() { "empty".to_string() } else { format!("{{{}}}, none realized", join(p)) };
                        if g(a).is_realized() {
                            out.push(Self::step(rule, b.clone(), Status::NotRealized, prem.clone(), format!("{a} realized and {a} . {b} {what}")));
                        }
                        if g(b).is_realized() {
                            out.push(Self::step(rule, a.clone(), Status::NotRealized, prem, format!("{b} realized and {a} . {b} {what}")));
                        }
                    }
                }
            }
            Rule::R4 => {
                for (a, b, p) in triples {
                    if p.len() != 1 || g(&p[0]) != Status::RealizedUniquely {
                        continue;
                    }
                    let c = &p[0];
                    let prem = vec![a.clone(), b.clone(), c.clone()];
                    if g(a) == Status::RealizedUniquely && g(b) == Status::Realized {
                        out.push(Self::step(rule, b.clone(), Status::RealizedUniquely, prem.clone(), format!("{a} . {b} = {c} with {a}, {c} unique")));
                    }
                    if g(b) == Status::RealizedUniquely && g(a) == Status::Realized {
                        out.push(Self::step(rule, a.clone(), Status::RealizedUniquely, prem, format!("{a} . {b} = {c} with {b}, {c} unique")));
                    }
                }
            }
            Rule::R5 => {
                for (a, b, p) in triples {
                    let id = self.w.identity(a.pair().0);
                    if g(a) == Status::Realized && *b == self.w.dual(a) && p.as_slice() == std::slice::from_ref(&id) && g(&id) == Status::RealizedUniquely {
                        out.push(Self::step(rule, a.clone(), Status::RealizedUniquely, vec![a.clone(), b.clone(), id.clone()], format!("{a} . {b} = {id}")));
                    }
                }
            }
            Rule::R6 => {
                for (a, b, p) in triples {
                    let (j, k) = b.pair();
                    if j != k || g(a) != Status::RealizedUniquely || !g(b).is_realized() || *b == self.w.identity(j) {
                        continue;
                    }
                    let rest: Vec<&Subject> = p.iter().filter(|c| *c != a).collect();
                    let open: Vec<&Subject> = rest.iter().copied().filter(|c| g(c) != Status::NotRealized).collect();
                    if open.len() == 1 {
                        let mut prem = vec![a.clone(), b.clone()];
                        prem.extend(rest.iter().filter(|c| **c != open[0]).map(|c| (*c).clone()));
                        out.push(Self::step(
                            rule,
                            open[0].clone(),
                            Status::Realized,
                            prem,
                            format!("{a} unique, {b} realized and not the identity; {} is the only candidate in {a} . {b} other than {a}", open[0]),
                        ));
                    }
                }
            }
            Rule::R8 => {
                for (a, b, p) in triples {
                    if p.len() < 2 || !g(a).is_realized() || !g(b).is_realized() {
                        continue;
                    }
                    let open: Vec<&Subject> = p.iter().filter(|c| g(c) != Status::NotRealized).collect();
                    if open.len() == 1 {
                        let mut prem = vec![a.clone(), b.clone()];
                        prem.extend(p.iter().filter(|c| *c != open[0]).cloned());
                        out.push(Self::step(rule, open[0].clone(), Status::Realized, prem, format!("{a} . {b} = {{{}}}, all others not realized", join(p))));
                    }
                }
            }
            Rule::R9 => {
                for (a, b, p) in triples {
                    let id = self.w.identity(a.pair().0);
                    if g(a) != Status::Realized || *b != self.w.dual(a) || g(&id) != Status::RealizedUniquely || !p.contains(&id) {
                        continue;
                    }
                    let ok = p.iter().filter(|c| **c != id).all(|c| {
                        g(c) == Status::NotRealized || self.w.product(c, a).is_some_and(|ca| !ca.contains(a))
                    });
                    if ok {
                        let mut prem = vec![a.clone(), b.clone(), id.clone()];
                        prem.extend(p.iter().filter(|c| **c != id).cloned());
                        out.push(Self::step(rule, a.clone(), Status::RealizedUniquely, prem, format!("{a} . {b} = {{{}}}; only {id} can return {a}", join(p))));
                    }
                }
            }
            Rule::R7 => out.extend(self.cardinality()?),
            _ => {}
        }
        Ok(out)
    }

    /// Hom-set cardinality transfer.
    fn cardinality(&self) -> Result<Vec<DerivationStep>, GroupoidError> {
        let mut out = Vec::new();
        let names = &self.w.names;
        let mut witness: Option<(Vec<Subject>, usize)> = None;
        'find: for a in names {
            for b in names {
                let entries = self.w.pair(a, b);
                let resolved = entries
                    .iter()
                    .all(|s| matches!(self.get(s), Status::RealizedUniquely | Status::NotRealized));
                let k = entries.iter().filter(|s| self.get(s) == Status::RealizedUniquely).count();
                if resolved && k > 0 {
                    witness = Some((entries, k));
                    break 'find;
                }
            }
        }
        let Some((wit, k)) = witness else { return Ok(out) };
        for a in names {
            for b in names {
                let entries = self.w.pair(a, b);
                let realized: Vec<Subject> = entries.iter().filter(|s| self.get(s).is_realized()).cloned().collect();
                if realized.len() < k {
                    continue;
                }
                if realized.len() > k {
                    return Err(GroupoidError::Contradiction {
                        subject: format!("{a}-{b}"),
                        existing: Status::Realized,
                        attempted: Status::NotRealized,
                        rule: Rule::R7,
                        steps: self.log.len(),
                    });
                }
                let (wa, wb) = wit[0].pair();
                for s in &entries {
                    let st = if realized.contains(s) { Status::RealizedUniquely } else { Status::NotRealized };
                    if self.get(s) == st {
                        continue;
                    }
                    let mut prem = wit.clone();
                    prem.extend(realized.iter().cloned());
                    out.push(Self::step(
                        Rule::R7,
                        s.clone(),
                        st,
                        prem,
                        format!("{wa}-{wb} holds exactly {k} categories and {a}-{b} already has {k} realized entries"),
                    ));
                }
            }
        }
        Ok(out)
    }
}

const BIMODULE_RULES: [Rule; 9] = [Rule::R1, Rule::R2, Rule::R3, Rule::R4, Rule::R5, Rule::R6, Rule::R7, Rule::R8, Rule::R9];

/// Applies the rules to a fixpoint. With `shuffle`, rule order and instance
/// order are permuted pseudo-randomly each round.
pub fn deduce(world: &World, seeds: &[DerivationStep], shuffle: Option<u64>) -> Result<Deduction, GroupoidError> {
    let mut e = Engine {
        w: world,
        facts: FactBase::default(),
        log: Vec::new(),
    };
    for s in seeds {
        e.apply(s.clone())?;
    }
    let triples = e.composable();
    let mut rng = shuffle.map(ChaCha8Rng::seed_from_u64);
    loop {
        let mut rules = BIMODULE_RULES.to_vec();
        if let Some(r) = rng.as_mut() {
            rules.shuffle(r);
        }
        let mut changed = false;
        for rule in rules {
            let mut steps = e.rule(rule, &triples)?;
            if let Some(r) = rng.as_mut() {
                steps.shuffle(r);
            }
            for s in steps {
                changed |= e.apply(s)?;
            }
        }
        if !changed {
            break;
        }
    }
    Ok(Deduction {
        facts: e.facts,
        log: e.log,
    })
}

/// Module statuses from the bimodule fixpoint: restrictions of realized
/// bimodules, generator seeds, and product rules over module tables.
pub fn module_deduction(world: &World, bimodules: &Deduction, generators: &[GeneratorSeed], assumptions: &Assumptions) -> Result<Deduction, GroupoidError> {
    let mut e = Engine {
        w: world,
        facts: bimodules.facts.clone(),
        log: Vec::new(),
    };
    for r in &world.names {
        let reg = canonical_module(&FusionModule::regular(world.cat.ring(r).expect("ring").clone(), Side::Right));
        let idx = world.cat.modules(r, Side::Right).iter().position(|m| *m == reg).expect("regular module in catalog");
        e.apply(DerivationStep {
            rule: Rule::Seed,
            subject: Subject::Module(r.clone(), idx),
            status: Status::RealizedUniquely,
            premises: vec![],
            seed: Some(SeedReason::Regular),
            note: format!("regular {r}-module"),
        })?;
    }
    if assumptions.unique_generator_algebras {
        for seed in seed_facts(world, generators, assumptions)? {
            let Some(SeedReason::Generator { side, .. }) = &seed.seed else { continue };
            let b = seed.subject.clone();
            let source = match side {
                Side::Right => b.clone(),
                Side::Left => world.dual(&b),
            };
            let Some(m) = world.restriction(&source).cloned() else { continue };
            e.apply(DerivationStep {
                rule: Rule::Seed,
                subject: m,
                status: Status::RealizedUniquely,
                premises: vec![b],
                seed: seed.seed.clone(),
                note: format!("module of the unique algebra object, {}", seed.note),
            })?;
        }
    }
    let mut pairs = Vec::new();
    for m in world.all_modules() {
        let Subject::Module(r, _) = &m else { unreachable!() };
        for c in &world.names {
            for b in world.pair(r, c) {
                if let Some(p) = world.product(&m, &b) {
                    pairs.push((m.clone(), b, p));
                }
            }
        }
    }
    loop {
        let mut steps = Vec::new();
        for b in world.bimodules() {
            if e.get(&b).is_realized() {
                if let Some(m) = world.restriction(&b) {
                    steps.push(Engine::step(Rule::Restrict, m.clone(), Status::Realized, vec![b.clone()], format!("restriction of {b}")));
                }
            }
        }
        for (m, b, p) in &pairs {
            let g = |s: &Subject| e.get(s);
            if g(b).is_realized() && p.iter().all(|c| g(c) == Status::NotRealized) {
                let mut prem = vec![m.clone(), b.clone()];
                prem.extend(p.iter().cloned());
                steps.push(Engine::step(Rule::R3, m.clone(), Status::NotRealized, prem, format!("{b} realized and {m} . {b} has no realized member")));
            }
            if g(m) == Status::Realized && g(b) == Status::RealizedUniquely && p.len() == 1 && g(&p[0]) == Status::RealizedUniquely {
                steps.push(Engine::step(
                    Rule::R4,
                    m.clone(),
                    Status::RealizedUniquely,
                    vec![m.clone(), b.clone(), p[0].clone()],
                    format!("{m} . {b} = {} with {b}, {} unique", p[0], p[0]),
                ));
            }
            if g(m) == Status::Realized && g(b).is_realized() && !p.is_empty() {
                if let Some(x) = dual_category_witness(world, &e.facts, m, p) {
                    steps.push(Engine::step(
                        Rule::R10,
                        m.clone(),
                        Status::RealizedUniquely,
                        vec![m.clone(), b.clone(), x.clone()],
                        format!("every member of {m} . {b} fixes the dual category, and {x} is its only realized extension"),
                    ));
                }
            }
        }
        let mut changed = false;
        for s in steps {
            changed |= e.apply(s)?;
        }
        if !changed {
            break;
        }
    }
    Ok(Deduction {
        facts: e.facts,
        log: e.log,
    })
}

/// For a realized module `m` with product set `p`: if every member of `p`
/// is realized uniquely as a restriction of a realized bimodule with one
/// common left ring `i`, and exactly one bimodule over `(i, ring of m)`
/// restricting to `m` is not ruled out and it is realized uniquely, return
/// that bimodule.
fn dual_category_witness(w: &World, facts: &FactBase, m: &Subject, p: &[Subject]) -> Option<Subject> {
    let Subject::Module(j, _) = m else { return None };
    let mut common: Option<BTreeSet<String>> = None;
    for c in p {
        if facts.get(c) != Status::RealizedUniquely {
            return None;
        }
        let Subject::Module(k, _) = c else { return None };
        let lefts: BTreeSet<String> = w
            .names
            .iter()
            .filter(|i| w.pair(i, k).iter().any(|y| facts.get(y).is_realized() && w.restriction(y) == Some(c)))
            .cloned()
            .collect();
        common = Some(match common {
            None => lefts,
            Some(s) => s.intersection(&lefts).cloned().collect(),
        });
    }
    let common = common?;
    if common.len() != 1 {
        return None;
    }
    let i = common.iter().next()?;
    let open: Vec<Subject> = w
        .pair(i, j)
        .into_iter()
        .filter(|y| w.restriction(y) == Some(m) && facts.get(y) != Status::NotRealized)
        .collect();
    match open.as_slice() {
        [x] if facts.get(x) == Status::RealizedUniquely => Some(x.clone()),
        _ => None,
    }
}

/// The realized autoequivalences of one ring. Products in the table may
/// list several realized members, so every group law compatible with the
/// table (inverse = dual) is enumerated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BrauerPicard {
    pub ring: String,
    pub elements: Vec<Subject>,
    pub identity: usize,
    /// `inverse[a]` = index of the dual of `a`.
    pub inverse: Vec<usize>,
    /// All multiplication tables compatible with the product table.
    pub laws: Vec<Vec<Vec<usize>>>,
}

impl BrauerPicard {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    fn element_orders(&self, t: &[Vec<usize>]) -> Vec<usize> {
        (0..self.order())
            .map(|a| {
                let mut x = a;
                let mut k = 1;
                while x != self.identity {
                    x = t[x][a];
                    k += 1;
                }
                k
            })
            .collect()
    }

    /// Exponent, when every compatible law agrees on it.
    pub fn exponent(&self) -> Option<usize> {
        let ex: BTreeSet<usize> = self.laws.iter().map(|t| self.element_orders(t).into_iter().fold(1, lcm)).collect();
        (ex.len() == 1).then(|| *ex.iter().next().unwrap())
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        !self.laws.is_empty() && self.laws.iter().all(|t| (0..n).all(|a| (0..n).all(|b| t[a][b] == t[b][a])))
    }

    /// `Z2 x Z2`-style description for abelian groups whose element orders
    /// are fixed by the data, e.g. `Z2 x Z2`.
    pub fn structure(&self) -> Option<String> {
        if !self.is_abelian() {
            return None;
        }
        let orders: BTreeSet<Vec<usize>> = self.laws.iter().map(|t| {
            let mut o = self.element_orders(t);
            o.sort_unstable();
            o
        }).collect();
        if orders.len() != 1 {
            return None;
        }
        let mut orders = orders.into_iter().next().unwrap();
        let mut factors = Vec::new();
        let mut n = self.order();
        while n > 1 {
            let m = *orders.iter().max().unwrap();
            factors.push(format!("Z{m}"));
            n /= m;
            let keep = n;
            orders.retain(|&o| keep.is_multiple_of(o));
            if orders.iter().all(|&o| o == 1) && n > 1 {
                return None;
            }
        }
        Some(if factors.is_empty() { "1".into() } else { factors.join(" x ") })
    }
}

fn lcm(a: usize, b: usize) -> usize {
    let mut x = a;
    let mut y = b;
    while y != 0 {
        (x, y) = (y, x % y);
    }
    a / x * b
}

pub fn brauer_picard_group(world: &World, facts: &FactBase, ring: &str) -> Result<BrauerPicard, GroupoidError> {
    let elements: Vec<Subject> = world
        .pair(ring, ring)
        .into_iter()
        .filter(|s| facts.get(s) == Status::RealizedUniquely)
        .collect();
    let n = elements.len();
    let pos = |s: &Subject| elements.iter().position(|e| e == s);
    let id = world.identity(ring);
    let identity = pos(&id).ok_or_else(|| GroupoidError::Composition("identity not realized uniquely".into()))?;
    let inverse: Vec<usize> = elements
        .iter()
        .map(|e| pos(&world.dual(e)).ok_or_else(|| GroupoidError::Composition(format!("dual of {e} not realized"))))
        .collect::<Result<_, _>>()?;
    let mut cand = vec![vec![Vec::new(); n]; n];
    for (a, x) in elements.iter().enumerate() {
        for (b, y) in elements.iter().enumerate() {
            let prod = world.product(x, y).unwrap_or_default();
            cand[a][b] = prod.iter().filter_map(pos).collect();
            if a == identity {
                cand[a][b].retain(|&c| c == b);
            }
            if b == identity {
                cand[a][b].retain(|&c| c == a);
            }
            if b == inverse[a] {
                cand[a][b].retain(|&c| c == identity);
            }
            if cand[a][b].is_empty() {
                return Err(GroupoidError::Composition(format!("{x} . {y} has no admissible realized member")));
            }
        }
    }
    let mut laws = Vec::new();
    let mut t = vec![vec![usize::MAX; n]; n];
    fill(&cand, 0, &mut t, &mut laws);
    if laws.is_empty() {
        return Err(GroupoidError::Composition(format!("no group law on the {ring} autoequivalences")));
    }
    Ok(BrauerPicard {
        ring: ring.to_string(),
        elements,
        identity,
        inverse,
        laws,
    })
}

fn fill(cand: &[Vec<Vec<usize>>], cell: usize, t: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
    let n = cand.len();
    if cell == n * n {
        let assoc = (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| t[t[a][b]][c] == t[a][t[b][c]])));
        if assoc {
            out.push(t.clone());
        }
        return;
    }
    let (a, b) = (cell / n, cell % n);
    for &c in &cand[a][b] {
        if (0..b).any(|y| t[a][y] == c) || (0..a).any(|x| t[x][b] == c) {
            continue;
        }
        t[a][b] = c;
        fill(cand, cell + 1, t, out);
    }
    t[a][b] = usize::MAX;
}

/// Independent replay of a derivation log: duals and restrictions are
/// recomputed by direct isomorphism search, and each rule's premises are
/// re-checked against the product table.
pub struct Verifier<'a> {
    cat: &'a Catalog,
    tables: &'a ProductTable,
    assumptions: &'a Assumptions,
    facts: FactBase,
}

impl<'a> Verifier<'a> {
    pub fn new(cat: &'a Catalog, tables: &'a ProductTable, assumptions: &'a Assumptions) -> Self {
        Verifier {
            cat,
            tables,
            assumptions,
            facts: FactBase::default(),
        }
    }

    /// Starts from previously verified facts.
    pub fn with_facts(mut self, facts: FactBase) -> Self {
        self.facts = facts;
        self
    }

    pub fn facts(&self) -> &FactBase {
        &self.facts
    }

    fn bimodule(&self, s: &Subject) -> Result<&FusionBimodule, String> {
        match s {
            Subject::Bimodule(a, b, i) => self.cat.bimodules(a, b).get(*i).ok_or_else(|| format!("no entry {s}")),
            _ => Err(format!("{s} is not a bimodule")),
        }
    }

    fn module(&self, s: &Subject) -> Result<&FusionModule, String> {
        match s {
            Subject::Module(r, i) => self.cat.modules(r, Side::Right).get(*i).ok_or_else(|| format!("no entry {s}")),
            _ => Err(format!("{s} is not a module")),
        }
    }

    fn is_dual(&self, x: &Subject, y: &Subject) -> Result<bool, String> {
        Ok(bimodule_iso(&dual_bimodule(self.bimodule(x)?), self.bimodule(y)?).is_some())
    }

    fn is_identity(&self, x: &Subject) -> Result<bool, String> {
        let b = self.bimodule(x)?;
        Ok(b.left_ring().name() == b.right_ring().name() && bimodule_iso(b, &identity_bimodule(b.left_ring())).is_some())
    }

    fn restricts_to(&self, b: &Subject, m: &Subject) -> Result<bool, String> {
        let bm = self.bimodule(b)?;
        let mm = self.module(m)?;
        Ok(module_iso(&bm.right_module(), mm).is_some())
    }

    fn product(&self, x: &Subject, y: &Subject) -> Result<Vec<Subject>, String> {
        let p = match (x, y) {
            (Subject::Bimodule(a, b, k), Subject::Bimodule(b2, c, l)) if b == b2 => self
                .tables
                .product(a, b, c, *k, *l)
                .map(|v| v.iter().map(|&m| Subject::Bimodule(a.clone(), c.clone(), m)).collect()),
            (Subject::Module(a, k), Subject::Bimodule(a2, b, l)) if a == a2 => self
                .tables
                .module_product(a, b, *k, *l)
                .map(|v| v.iter().map(|&m| Subject::Module(b.clone(), m)).collect()),
            _ => None,
        };
        p.ok_or_else(|| format!("{x} . {y} is not in the product table"))
    }

    fn need(&self, s: &Subject, ok: impl Fn(Status) -> bool, what: &str) -> Result<(), String> {
        if ok(self.facts.get(s)) {
            Ok(())
        } else {
            Err(format!("{s} is {} but must be {what}", self.facts.get(s)))
        }
    }

    fn check(&self, st: &DerivationStep) -> Result<(), String> {
        let p = &st.premises;
        let realized = |s: Status| s.is_realized();
        let unique = |s: Status| s == Status::RealizedUniquely;
        let not = |s: Status| s == Status::NotRealized;
        let at_least = |n: usize| if p.len() < n { Err(format!("{} needs {n} premises", st.rule)) } else { Ok(()) };
        match st.rule {
            Rule::Seed => self.check_seed(st),
            Rule::R1 => {
                at_least(2)?;
                self.need(&p[0], realized, "realized")?;
                self.need(&p[1], realized, "realized")?;
                if self.product(&p[0], &p[1])? != vec![st.subject.clone()] || st.status != Status::Realized {
                    return Err("product is not the unique subject".into());
                }
                Ok(())
            }
            Rule::R2 => {
                at_least(1)?;
                if !self.is_dual(&p[0], &st.subject)? {
                    return Err(format!("{} is not dual to {}", st.subject, p[0]));
                }
                if self.facts.get(&p[0]) != st.status {
                    return Err("status differs from the dual".into());
                }
                Ok(())
            }
            Rule::R3 => {
                at_least(2)?;
                let prod = self.product(&p[0], &p[1])?;
                let other = if st.subject == p[1] {
                    &p[0]
                } else if st.subject == p[0] {
                    &p[1]
                } else {
                    return Err("subject is not a factor".into());
                };
                self.need(other, realized, "realized")?;
                for c in &prod {
                    self.need(c, not, "notRealized")?;
                }
                if st.status != Status::NotRealized {
                    return Err("R3 concludes notRealized".into());
                }
                Ok(())
            }
            Rule::R4 => {
                at_least(3)?;
                if self.product(&p[0], &p[1])? != vec![p[2].clone()] {
                    return Err("product is not unique".into());
                }
                let other = if st.subject == p[1] {
                    &p[0]
                } else if st.subject == p[0] {
                    &p[1]
                } else {
                    return Err("subject is not a factor".into());
                };
                self.need(other, unique, "realizedUniquely")?;
                self.need(&p[2], unique, "realizedUniquely")?;
                self.need(&st.subject, realized, "realized")?;
                if st.status != Status::RealizedUniquely {
                    return Err("R4 concludes realizedUniquely".into());
                }
                if let Subject::Module(..) = st.subject {
                    if st.subject != p[0] {
                        return Err("module R4 takes the module as first factor".into());
                    }
                }
                Ok(())
            }
            Rule::R5 => {
                at_least(3)?;
                if st.subject != p[0] || !self.is_dual(&p[0], &p[1])? || !self.is_identity(&p[2])? {
                    return Err("premises are not a, its dual and the identity".into());
                }
                if self.product(&p[0], &p[1])? != vec![p[2].clone()] {
                    return Err("a . dual(a) is not the identity alone".into());
                }
                self.need(&p[0], realized, "realized")?;
                self.need(&p[2], unique, "realizedUniquely")?;
                Ok(())
            }
            Rule::R6 => {
                at_least(2)?;
                let prod = self.product(&p[0], &p[1])?;
                self.need(&p[0], unique, "realizedUniquely")?;
                self.need(&p[1], realized, "realized")?;
                if self.is_identity(&p[1])? {
                    return Err("second factor is the identity".into());
                }
                if st.subject == p[0] || !prod.contains(&st.subject) {
                    return Err("subject is not a new member of the product".into());
                }
                for c in prod.iter().filter(|c| **c != p[0] && **c != st.subject) {
                    self.need(c, not, "notRealized")?;
                }
                Ok(())
            }
            Rule::R7 => {
                at_least(1)?;
                let (wa, wb) = p[0].pair();
                let witness: Vec<&Subject> = p.iter().filter(|s| s.pair() == (wa, wb)).collect();
                let (ta, tb) = st.subject.pair();
                if (ta, tb) == (wa, wb) {
                    return Err("target equals witness".into());
                }
                let n = self.cat.bimodules(wa, wb).len();
                if witness.len() != n {
                    return Err("witness hom-set is not listed in full".into());
                }
                let mut k = 0;
                for s in &witness {
                    match self.facts.get(s) {
                        Status::RealizedUniquely => k += 1,
                        Status::NotRealized => {}
                        other => return Err(format!("witness entry {s} is {other}")),
                    }
                }
                let target: Vec<&Subject> = p.iter().filter(|s| s.pair() == (ta, tb)).collect();
                if target.len() != k {
                    return Err(format!("target lists {} realized entries, witness has {k}", target.len()));
                }
                for s in &target {
                    self.need(s, realized, "realized")?;
                }
                let want = if target.contains(&&st.subject) { Status::RealizedUniquely } else { Status::NotRealized };
                if want != st.status {
                    return Err("status does not follow from the count".into());
                }
                Ok(())
            }
            Rule::R8 => {
                at_least(2)?;
                let prod = self.product(&p[0], &p[1])?;
                self.need(&p[0], realized, "realized")?;
                self.need(&p[1], realized, "realized")?;
                if !prod.contains(&st.subject) {
                    return Err("subject is not in the product".into());
                }
                for c in prod.iter().filter(|c| **c != st.subject) {
                    self.need(c, not, "notRealized")?;
                }
                Ok(())
            }
            Rule::R9 => {
                at_least(3)?;
                if st.subject != p[0] || !self.is_dual(&p[0], &p[1])? || !self.is_identity(&p[2])? {
                    return Err("premises are not a, its dual and the identity".into());
                }
                self.need(&p[0], realized, "realized")?;
                self.need(&p[2], unique, "realizedUniquely")?;
                let prod = self.product(&p[0], &p[1])?;
                if !prod.contains(&p[2]) {
                    return Err("identity not in a . dual(a)".into());
                }
                for c in prod.iter().filter(|c| **c != p[2]) {
                    if self.facts.get(c) != Status::NotRealized && self.product(c, &p[0])?.contains(&p[0]) {
                        return Err(format!("{c} could return {}", p[0]));
                    }
                }
                Ok(())
            }
            Rule::Restrict => {
                at_least(1)?;
                self.need(&p[0], realized, "realized")?;
                if !self.restricts_to(&p[0], &st.subject)? {
                    return Err(format!("{} does not restrict to {}", p[0], st.subject));
                }
                Ok(())
            }
            Rule::R10 => {
                at_least(3)?;
                let (m, b, x) = (&p[0], &p[1], &p[2]);
                if st.subject != *m {
                    return Err("subject is not the module".into());
                }
                self.need(m, realized, "realized")?;
                self.need(b, realized, "realized")?;
                self.need(x, unique, "realizedUniquely")?;
                let prod = self.product(m, b)?;
                if prod.is_empty() {
                    return Err("empty product".into());
                }
                let (i, j) = x.pair();
                if !self.restricts_to(x, m)? || m.pair().0 != j {
                    return Err(format!("{x} does not extend {m}"));
                }
                for c in &prod {
                    self.need(c, unique, "realizedUniquely")?;
                    let k = c.pair().0;
                    let from_i = (0..self.cat.bimodules(i, k).len()).try_fold(false, |acc, y| {
                        let y = Subject::Bimodule(i.into(), k.into(), y);
                        Ok::<bool, String>(acc || (self.facts.get(&y).is_realized() && self.restricts_to(&y, c)?))
                    })?;
                    if !from_i {
                        return Err(format!("{c} is not a restriction of a realized {i}-{k} entry"));
                    }
                }
                for y in 0..self.cat.bimodules(i, j).len() {
                    let y = Subject::Bimodule(i.into(), j.into(), y);
                    if y != *x && self.facts.get(&y) != Status::NotRealized && self.restricts_to(&y, m)? {
                        return Err(format!("{y} also extends {m}"));
                    }
                }
                Ok(())
            }
        }
    }

    fn check_seed(&self, st: &DerivationStep) -> Result<(), String> {
        let reason = st.seed.as_ref().ok_or("seed without reason")?;
        match (reason, &st.subject) {
            (SeedReason::Identity, Subject::Bimodule(r, _, _)) => {
                if !self.is_identity(&st.subject)? {
                    return Err(format!("{} is not an identity bimodule", st.subject));
                }
                let unique = self.assumptions.no_outer_automorphisms.contains(r);
                let want = if unique { Status::RealizedUniquely } else { Status::Realized };
                if st.status != want {
                    return Err("identity seed status does not match the assumptions".into());
                }
                Ok(())
            }
            (SeedReason::Regular, Subject::Module(r, _)) => {
                let reg = FusionModule::regular(self.cat.ring(r).ok_or("unknown ring")?.clone(), Side::Right);
                if module_iso(self.module(&st.subject)?, &reg).is_none() {
                    return Err("not the regular module".into());
                }
                if st.status != Status::RealizedUniquely {
                    return Err("regular module seed must be unique".into());
                }
                Ok(())
            }
            (SeedReason::Generator { side, element }, Subject::Bimodule(a, b, _)) => {
                let hits = self.cat.bimodules(a, b).iter().filter(|x| has_end(x, *side, element)).count();
                if hits != 1 || !has_end(self.bimodule(&st.subject)?, *side, element) {
                    return Err("generator does not identify the subject uniquely".into());
                }
                if st.status != Status::Realized {
                    return Err("generator seeds are realized".into());
                }
                Ok(())
            }
            (SeedReason::Generator { side, element }, Subject::Module(..)) => {
                if !self.assumptions.unique_generator_algebras || st.status != Status::RealizedUniquely {
                    return Err("module generator seeds need the algebra uniqueness assumption".into());
                }
                let b = st.premises.first().ok_or("module generator seed cites no bimodule")?;
                if !has_end(self.bimodule(b)?, *side, element) {
                    return Err("cited bimodule lacks the generator".into());
                }
                let bm = self.bimodule(b)?;
                let restricted = match side {
                    Side::Right => bm.right_module(),
                    Side::Left => opposite_module(&bm.left_module()),
                };
                if module_iso(&restricted, self.module(&st.subject)?).is_none() {
                    return Err("subject is not the generator's module".into());
                }
                Ok(())
            }
            _ => Err("seed reason does not fit the subject".into()),
        }
    }

    /// Checks and applies each step in order.
    pub fn replay(&mut self, log: &[DerivationStep]) -> Result<(), GroupoidError> {
        for (i, st) in log.iter().enumerate() {
            self.check(st).map_err(|reason| GroupoidError::Verify { step: i, reason })?;
            let cur = self.facts.get(&st.subject);
            match cur.merge(st.status) {
                Ok(Some(s)) => self.facts.set(&st.subject, s),
                Ok(None) => {
                    return Err(GroupoidError::Verify {
                        step: i,
                        reason: "step does not strengthen any status".into(),
                    })
                }
                Err(()) => {
                    return Err(GroupoidError::Verify {
                        step: i,
                        reason: format!("contradicts {cur}"),
                    })
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_merge() {
        use Status::*;
        assert_eq!(Unknown.merge(Realized), Ok(Some(Realized)));
        assert_eq!(Realized.merge(RealizedUniquely), Ok(Some(RealizedUniquely)));
        assert_eq!(RealizedUniquely.merge(Realized), Ok(None));
        assert!(Realized.merge(NotRealized).is_err());
        assert!(NotRealized.merge(RealizedUniquely).is_err());
    }

    #[test]
    fn ids_round_trip() {
        for s in [Subject::Bimodule("AH1".into(), "AH2".into(), 7), Subject::Module("AH3".into(), 0)] {
            assert_eq!(s.to_string().parse::<Subject>().unwrap(), s);
        }
        let g = SeedReason::Generator {
            side: Side::Left,
            element: vec![1, 1, 0],
        };
        assert_eq!(g.to_string().parse::<SeedReason>().unwrap(), g);
    }
}
