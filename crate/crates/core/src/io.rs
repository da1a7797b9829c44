//! Plain-text formats for rings, modules, bimodules, maps, compatibility
//! reports and fact files. Every `render_*` has a matching `parse_*` with
//! `parse(render(x)) == x` and `render(parse(text)) == text` for rendered
//! text.

use std::fmt::Write as _;

use thiserror::Error;

use std::sync::Arc;

use crate::bimodule::{Catalog, FusionBimodule};
use crate::exactnum::QuadExt;
use crate::fusionring::FusionRing;
use crate::groupoid::{DerivationStep, Rule, SeedReason, Status, Subject};
use crate::multcompat::MultiplicationMap;
use crate::nimrep::{FusionModule, Side};
use crate::subfactors::SubfactorRecord;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IoError {
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("{0}")]
    Invalid(String),
}

pub(crate) fn perr(line: usize, column: usize, message: impl Into<String>) -> IoError {
    IoError::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Line cursor that skips blank lines and `#` comments, tracking 1-based
/// line numbers for error messages.
pub(crate) struct Lines<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Lines<'a> {
    pub(crate) fn new(text: &'a str) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| {
                let t = l.trim_start();
                !t.is_empty() && !t.starts_with('#')
            })
            .map(|(i, l)| (i + 1, l))
            .collect();
        Lines { lines, pos: 0 }
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos >= self.lines.len()
    }

    pub(crate) fn line_no(&self) -> usize {
        self.lines
            .get(self.pos)
            .map(|l| l.0)
            .unwrap_or_else(|| self.lines.last().map(|l| l.0 + 1).unwrap_or(1))
    }

    pub(crate) fn next(&mut self) -> Result<(usize, &'a str), IoError> {
        let l = self
            .lines
            .get(self.pos)
            .copied()
            .ok_or_else(|| perr(self.line_no(), 1, "unexpected end of input"))?;
        self.pos += 1;
        Ok(l)
    }

    /// Reads `%key rest` and returns `rest` (possibly empty).
    pub(crate) fn directive(&mut self, key: &str) -> Result<(usize, &'a str), IoError> {
        let (no, line) = self.next()?;
        let tag = format!("%{key}");
        if line == tag {
            return Ok((no, ""));
        }
        match line.strip_prefix(&tag).and_then(|r| r.strip_prefix(' ')) {
            Some(rest) => Ok((no, rest)),
            None => Err(perr(no, 1, format!("expected `{tag}`"))),
        }
    }

    pub(crate) fn expect_end(&mut self) -> Result<(), IoError> {
        self.directive("end").map(|_| ())
    }
}

/// Splits on single spaces and reports the 1-based column of each token.
pub(crate) fn tokens(s: &str, offset: usize) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut col = offset;
    for t in s.split(' ') {
        out.push((col, t));
        col += t.len() + 1;
    }
    out
}

pub(crate) fn parse_usize(line: usize, col: usize, t: &str) -> Result<usize, IoError> {
    if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) || (t.len() > 1 && t.starts_with('0')) {
        return Err(perr(line, col, format!("expected a non-negative integer, found `{t}`")));
    }
    t.parse().map_err(|_| perr(line, col, format!("integer out of range: `{t}`")))
}

pub(crate) fn parse_count(line: usize, rest: &str, offset: usize) -> Result<usize, IoError> {
    parse_usize(line, offset, rest)
}

pub(crate) fn parse_int_row(line: usize, text: &str, len: usize) -> Result<Vec<u32>, IoError> {
    let toks = tokens(text, 1);
    if toks.len() != len {
        return Err(perr(line, 1, format!("expected {len} integers, found {}", toks.len())));
    }
    toks.iter()
        .map(|(c, t)| parse_usize(line, *c, t).map(|v| v as u32))
        .collect()
}

/// Parses `|`-separated field elements; `offset` is the column of the
/// first character.
pub(crate) fn parse_dim2(line: usize, text: &str, offset: usize, len: usize, d: u32) -> Result<Vec<QuadExt>, IoError> {
    let mut out = Vec::new();
    let mut col = offset;
    for t in text.split('|') {
        let q = QuadExt::parse_in(t, d).map_err(|e| match e {
            crate::exactnum::ExactError::Parse { column, message } => perr(line, col + column - 1, message),
            other => perr(line, col, other.to_string()),
        })?;
        out.push(q);
        col += t.len() + 1;
    }
    if out.len() != len {
        return Err(perr(line, offset, format!("expected {len} entries, found {}", out.len())));
    }
    Ok(out)
}

pub(crate) fn render_dim2(v: &[QuadExt]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("|")
}

pub(crate) fn render_row(row: &[u32]) -> String {
    row.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

/// Writes `blocks` blocks of `m` rows of `m` integers from a flat tensor.
pub(crate) fn render_blocks(out: &mut String, t: &[u32], blocks: usize, m: usize) {
    for b in 0..blocks {
        for s in 0..m {
            let start = (b * m + s) * m;
            let _ = writeln!(out, "{}", render_row(&t[start..start + m]));
        }
    }
}

pub(crate) fn parse_blocks(lines: &mut Lines, blocks: usize, m: usize) -> Result<Vec<u32>, IoError> {
    let mut t = Vec::with_capacity(blocks * m * m);
    for _ in 0..blocks * m {
        let (no, line) = lines.next()?;
        if line.starts_with('%') {
            return Err(perr(no, 1, "tensor block ended early"));
        }
        t.extend(parse_int_row(no, line, m)?);
    }
    Ok(t)
}

pub fn render_ring(r: &FusionRing) -> String {
    let n = r.rank();
    let mut s = String::new();
    let _ = writeln!(s, "%ring {}", r.name());
    let _ = writeln!(s, "%field {}", r.field());
    let _ = writeln!(s, "%rank {n}");
    let _ = writeln!(s, "%basis {}", r.labels().join(" "));
    let duals: Vec<String> = r.duals().iter().map(|d| d.to_string()).collect();
    let _ = writeln!(s, "%dual {}", duals.join(" "));
    let _ = writeln!(s, "%dim2 {}", render_dim2(r.fp_dim2()));
    s.push_str("%N\n");
    render_blocks(&mut s, r.tensor(), n, n);
    s.push_str("%end\n");
    s
}

/// Parses a ring file and validates the ring, including the stated squared
/// dimensions.
pub fn parse_ring(text: &str) -> Result<FusionRing, IoError> {
    let mut lines = Lines::new(text);
    let (_, name) = lines.directive("ring")?;
    if name.is_empty() || name.contains(' ') {
        return Err(perr(lines.line_no() - 1, 7, "bad ring name"));
    }
    let (no, field) = lines.directive("field")?;
    let field = parse_usize(no, 8, field)? as u32;
    if !crate::exactnum::is_square_free(field) {
        return Err(perr(no, 8, format!("{field} is not square-free")));
    }
    let (no, rank) = lines.directive("rank")?;
    let n = parse_count(no, rank, 7)?;
    if n == 0 {
        return Err(perr(no, 7, "rank must be positive"));
    }
    let (no, basis) = lines.directive("basis")?;
    let labels: Vec<String> = basis.split(' ').map(|s| s.to_string()).collect();
    if labels.len() != n || labels.iter().any(|l| l.is_empty()) {
        return Err(perr(no, 8, format!("expected {n} labels")));
    }
    let (no, dual) = lines.directive("dual")?;
    let dual_toks = tokens(dual, 7);
    if dual_toks.len() != n {
        return Err(perr(no, 7, format!("expected {n} dual indices")));
    }
    let mut duals = Vec::with_capacity(n);
    for (c, t) in dual_toks {
        let d = parse_usize(no, c, t)?;
        if d >= n {
            return Err(perr(no, c, format!("dual index {d} out of range")));
        }
        duals.push(d);
    }
    let (no, dim2) = lines.directive("dim2")?;
    let dim2 = parse_dim2(no, dim2, 7, n, field)?;
    lines.directive("N")?;
    let tensor = parse_blocks(&mut lines, n, n)?;
    lines.expect_end()?;
    if !lines.at_end() {
        return Err(perr(lines.line_no(), 1, "trailing content after %end"));
    }
    let ring = FusionRing::unvalidated(name, field, labels, duals, tensor).map_err(|e| IoError::Invalid(e.to_string()))?;
    ring.with_dim2(dim2).map_err(|e| IoError::Invalid(e.to_string()))
}

fn ring_named<'r>(rings: &'r [Arc<FusionRing>], name: &str, line: usize, col: usize) -> Result<&'r Arc<FusionRing>, IoError> {
    rings
        .iter()
        .find(|r| r.name() == name)
        .ok_or_else(|| perr(line, col, format!("unknown ring `{name}`")))
}

fn header<'a>(lines: &mut Lines<'a>, key: &str, fields: usize) -> Result<(usize, Vec<(usize, &'a str)>), IoError> {
    let (no, rest) = lines.directive(key)?;
    let toks = tokens(rest, key.len() + 3);
    if toks.len() != fields || toks.iter().any(|(_, t)| t.is_empty()) {
        return Err(perr(no, 1, format!("`%{key}` takes {fields} fields")));
    }
    Ok((no, toks))
}

pub fn render_module(m: &FusionModule, index: usize) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "%module {} {index}", m.ring().name());
    let _ = writeln!(s, "%side {}", m.side());
    let _ = writeln!(s, "%rank {}", m.rank());
    let _ = writeln!(s, "%dim2 {}", render_dim2(m.dim2()));
    s.push_str("%action\n");
    render_blocks(&mut s, m.action(), m.ring().rank(), m.rank());
    s.push_str("%end\n");
    s
}

pub fn render_modules(ms: &[FusionModule]) -> String {
    ms.iter().enumerate().map(|(i, m)| render_module(m, i)).collect()
}

fn parse_module_block(lines: &mut Lines, rings: &[Arc<FusionRing>], expect: usize) -> Result<FusionModule, IoError> {
    let (no, h) = header(lines, "module", 2)?;
    let ring = ring_named(rings, h[0].1, no, h[0].0)?.clone();
    if parse_usize(no, h[1].0, h[1].1)? != expect {
        return Err(perr(no, h[1].0, format!("expected index {expect}")));
    }
    let (no, side) = lines.directive("side")?;
    let side: Side = side.parse().map_err(|e: String| perr(no, 7, e))?;
    let (no, rank) = lines.directive("rank")?;
    let m = parse_count(no, rank, 7)?;
    let (dim2_no, dim2) = lines.directive("dim2")?;
    let dim2 = parse_dim2(dim2_no, dim2, 7, m, ring.field())?;
    lines.directive("action")?;
    let action = parse_blocks(lines, ring.rank(), m)?;
    lines.expect_end()?;
    let module = FusionModule::from_action(ring, side, m, action);
    if module.dim2() != dim2.as_slice() {
        return Err(perr(dim2_no, 7, "`%dim2` does not match the action"));
    }
    Ok(module)
}

/// Parses a module catalog; indices must run `0, 1, ...`.
pub fn parse_modules(text: &str, rings: &[Arc<FusionRing>]) -> Result<Vec<FusionModule>, IoError> {
    let mut lines = Lines::new(text);
    let mut out = Vec::new();
    while !lines.at_end() {
        out.push(parse_module_block(&mut lines, rings, out.len())?);
    }
    Ok(out)
}

pub fn render_bimodule(b: &FusionBimodule, index: usize) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "%bimodule {} {} {index}", b.left_ring().name(), b.right_ring().name());
    let _ = writeln!(s, "%rank {}", b.rank());
    let _ = writeln!(s, "%dim2 {}", render_dim2(b.dim2()));
    s.push_str("%leftaction\n");
    render_blocks(&mut s, b.lact(), b.left_ring().rank(), b.rank());
    s.push_str("%rightaction\n");
    render_blocks(&mut s, b.ract(), b.right_ring().rank(), b.rank());
    s.push_str("%end\n");
    s
}

pub fn render_bimodules(bs: &[FusionBimodule]) -> String {
    bs.iter().enumerate().map(|(i, b)| render_bimodule(b, i)).collect()
}

pub fn parse_bimodules(text: &str, rings: &[Arc<FusionRing>]) -> Result<Vec<FusionBimodule>, IoError> {
    let mut lines = Lines::new(text);
    let mut out = Vec::new();
    while !lines.at_end() {
        let (no, h) = header(&mut lines, "bimodule", 3)?;
        let left = ring_named(rings, h[0].1, no, h[0].0)?.clone();
        let right = ring_named(rings, h[1].1, no, h[1].0)?.clone();
        if parse_usize(no, h[2].0, h[2].1)? != out.len() {
            return Err(perr(no, h[2].0, format!("expected index {}", out.len())));
        }
        let (no, rank) = lines.directive("rank")?;
        let m = parse_count(no, rank, 7)?;
        let (dim2_no, dim2) = lines.directive("dim2")?;
        let dim2 = parse_dim2(dim2_no, dim2, 7, m, left.field())?;
        lines.directive("leftaction")?;
        let lact = parse_blocks(&mut lines, left.rank(), m)?;
        lines.directive("rightaction")?;
        let ract = parse_blocks(&mut lines, right.rank(), m)?;
        lines.expect_end()?;
        if FusionModule::from_action(left.clone(), Side::Left, m, lact.clone()).dim2() != dim2.as_slice() {
            return Err(perr(dim2_no, 7, "`%dim2` does not match the left action"));
        }
        out.push(FusionBimodule::from_parts(left, right, m, lact, ract, dim2));
    }
    Ok(out)
}

/// `%map <K> <L> <M>` then `l*m` rows of `n` integers.
pub fn render_map(k: &str, l: &str, m: &str, v: &MultiplicationMap) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "%map {k} {l} {m}");
    for row in v.v.chunks(v.n.max(1)).take(v.l * v.m) {
        let _ = writeln!(s, "{}", render_row(row));
    }
    s.push_str("%end\n");
    s
}

/// Parses one map given the operand ranks `(l, m, n)`.
pub fn parse_map(text: &str, l: usize, m: usize, n: usize) -> Result<(String, String, String, MultiplicationMap), IoError> {
    let mut lines = Lines::new(text);
    let (_, h) = header(&mut lines, "map", 3)?;
    let mut v = Vec::with_capacity(l * m * n);
    for _ in 0..l * m {
        let (no, line) = lines.next()?;
        v.extend(parse_int_row(no, line, n)?);
    }
    lines.expect_end()?;
    if !lines.at_end() {
        return Err(perr(lines.line_no(), 1, "trailing content after %end"));
    }
    Ok((h[0].1.to_string(), h[1].1.to_string(), h[2].1.to_string(), MultiplicationMap { l, m, n, v }))
}

fn compat_line(k: &str, l: &str, ms: impl Iterator<Item = String>) -> String {
    format!("{k} {l} -> {{{}}}\n", ms.collect::<Vec<_>>().join(", "))
}

/// Bimodule products for triple `(a, b, c)`.
pub fn render_compat_triple(a: &str, b: &str, c: &str, table: &[Vec<Vec<usize>>]) -> String {
    let mut s = String::new();
    for (k, row) in table.iter().enumerate() {
        for (l, ms) in row.iter().enumerate() {
            s.push_str(&compat_line(
                &Catalog::bimodule_id(a, b, k),
                &Catalog::bimodule_id(b, c, l),
                ms.iter().map(|&m| Catalog::bimodule_id(a, c, m)),
            ));
        }
    }
    s
}

/// Module products for pair `(a, b)`.
pub fn render_compat_modules(a: &str, b: &str, table: &[Vec<Vec<usize>>]) -> String {
    let mut s = String::new();
    for (k, row) in table.iter().enumerate() {
        for (l, ms) in row.iter().enumerate() {
            s.push_str(&compat_line(
                &Catalog::module_id(a, Side::Right, k),
                &Catalog::bimodule_id(a, b, l),
                ms.iter().map(|&m| Catalog::module_id(b, Side::Right, m)),
            ));
        }
    }
    s
}

/// Parses compatibility lines into an `nk x nl` table, checking that every
/// id has the expected prefix and the cells appear in row-major order.
pub fn parse_compat(text: &str, prefixes: [&str; 3], nk: usize, nl: usize) -> Result<Vec<Vec<Vec<usize>>>, IoError> {
    let mut lines = Lines::new(text);
    let mut table = vec![vec![Vec::new(); nl]; nk];
    let id = |no: usize, col: usize, t: &str, pre: &str, bound: Option<usize>| -> Result<usize, IoError> {
        let rest = t
            .strip_prefix(pre)
            .and_then(|r| r.strip_prefix('-'))
            .ok_or_else(|| perr(no, col, format!("expected an id starting `{pre}-`, found `{t}`")))?;
        let i = parse_usize(no, col + pre.len() + 1, rest)?;
        if bound.is_some_and(|b| i >= b) {
            return Err(perr(no, col, format!("`{t}` out of range")));
        }
        Ok(i)
    };
    for k in 0..nk {
        for l in 0..nl {
            let (no, line) = lines.next()?;
            let (lhs, rhs) = line.split_once(" -> ").ok_or_else(|| perr(no, 1, "expected ` -> `"))?;
            let toks = tokens(lhs, 1);
            if toks.len() != 2 {
                return Err(perr(no, 1, "expected two ids before `->`"));
            }
            if id(no, toks[0].0, toks[0].1, prefixes[0], None)? != k || id(no, toks[1].0, toks[1].1, prefixes[1], None)? != l {
                return Err(perr(no, 1, format!("expected cell ({k}, {l})")));
            }
            let col = lhs.len() + 5;
            let inner = rhs
                .strip_prefix('{')
                .and_then(|r| r.strip_suffix('}'))
                .ok_or_else(|| perr(no, col, "expected `{...}`"))?;
            if !inner.is_empty() {
                let mut c = col + 1;
                for t in inner.split(", ") {
                    table[k][l].push(id(no, c, t, prefixes[2], None)?);
                    c += t.len() + 2;
                }
            }
        }
    }
    if !lines.at_end() {
        return Err(perr(lines.line_no(), 1, "unexpected extra line"));
    }
    Ok(table)
}

/// `fact <id> <status> via <rule> [premises] # note`; seed reasons appear
/// as a leading `seed:<reason>` premise token.
pub fn render_fact(st: &DerivationStep) -> String {
    let mut prem: Vec<String> = Vec::new();
    if let Some(r) = &st.seed {
        prem.push(format!("seed:{r}"));
    }
    prem.extend(st.premises.iter().map(|p| p.to_string()));
    format!("fact {} {} via {} [{}] # {}\n", st.subject, st.status, st.rule, prem.join(" "), st.note)
}

pub fn render_facts(log: &[DerivationStep]) -> String {
    log.iter().map(render_fact).collect()
}

pub fn parse_facts(text: &str) -> Result<Vec<DerivationStep>, IoError> {
    let mut out = Vec::new();
    let mut lines = Lines::new(text);
    while !lines.at_end() {
        let (no, line) = lines.next()?;
        let (body, note) = line.split_once(" # ").ok_or_else(|| perr(no, 1, "expected ` # ` before the citation"))?;
        let (head, prem) = body.split_once(" [").ok_or_else(|| perr(no, 1, "expected `[`"))?;
        let prem = prem.strip_suffix(']').ok_or_else(|| perr(no, body.len(), "expected `]`"))?;
        let toks = tokens(head, 1);
        if toks.len() != 5 || toks[0].1 != "fact" || toks[3].1 != "via" {
            return Err(perr(no, 1, "expected `fact <id> <status> via <rule>`"));
        }
        let subject: Subject = toks[1].1.parse().map_err(|e: String| perr(no, toks[1].0, e))?;
        let status: Status = toks[2].1.parse().map_err(|e: String| perr(no, toks[2].0, e))?;
        let rule: Rule = toks[4].1.parse().map_err(|e: String| perr(no, toks[4].0, e))?;
        let mut seed = None;
        let mut premises = Vec::new();
        if !prem.is_empty() {
            let mut col = head.len() + 3;
            for t in prem.split(' ') {
                if let Some(r) = t.strip_prefix("seed:") {
                    seed = Some(r.parse::<SeedReason>().map_err(|e| perr(no, col, e))?);
                } else {
                    premises.push(t.parse::<Subject>().map_err(|e| perr(no, col, e))?);
                }
                col += t.len() + 1;
            }
        }
        out.push(DerivationStep {
            rule,
            subject,
            status,
            premises,
            seed,
            note: note.to_string(),
        });
    }
    Ok(out)
}

pub fn render_records(records: &[SubfactorRecord]) -> String {
    records.iter().map(|r| r.line() + "\n").collect()
}
