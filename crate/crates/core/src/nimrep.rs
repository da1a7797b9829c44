//! Admissible fusion modules over a fusion ring.
//!
//! A module of rank `m` is stored as its action tensor
//! `L[i][s][t] = (b_i u_s, u_t)` for left modules and
//! `R[i][s][t] = (u_s b_i, u_t)` for right modules. Row `s` of the action,
//! read as an `n x m` matrix `A_s[i][t] = L[i][s][t]`, is the fusion matrix
//! of the basis element `u_s`.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::exactnum::{surd_sum_eq, QuadExt, SurdSum};
use crate::fusionring::FusionRing;
use crate::gramdecomp::{self, IntMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

impl std::str::FromStr for Side {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "left" => Ok(Side::Left),
            "right" => Ok(Side::Right),
            other => Err(format!("unknown side `{other}`")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModuleError {
    #[error("action tensor has the wrong size")]
    Shape,
    #[error("unit does not act as the identity at ({0},{1})")]
    Unit(usize, usize),
    #[error("representation property fails for ring basis pair ({0},{1})")]
    Representation(usize, usize),
    #[error("dual symmetry fails at L[{0}][{1}][{2}]")]
    DualSymmetry(usize, usize, usize),
    #[error("module is decomposable")]
    Disconnected,
    #[error("admissibility (a) fails at basis element {0}")]
    AdmissibilityA(usize),
    #[error("admissibility (b) fails at ({0},{1}) for basis element {2}")]
    AdmissibilityB(usize, usize, usize),
}

#[derive(Clone, Debug)]
pub struct FusionModule {
    ring: Arc<FusionRing>,
    side: Side,
    rank: usize,
    action: Vec<u32>,
    dim2: Vec<QuadExt>,
}

impl PartialEq for FusionModule {
    fn eq(&self, other: &Self) -> bool {
        self.ring.name() == other.ring.name()
            && self.side == other.side
            && self.rank == other.rank
            && self.action == other.action
            && self.dim2 == other.dim2
    }
}

impl Eq for FusionModule {}

impl FusionModule {
    /// Wraps an action tensor; squared dimensions are the dimensions of the
    /// internal ends.
    pub fn from_action(ring: Arc<FusionRing>, side: Side, rank: usize, action: Vec<u32>) -> Self {
        let mut m = FusionModule {
            ring,
            side,
            rank,
            action,
            dim2: Vec::new(),
        };
        m.dim2 = (0..rank).map(|t| element_dim(&m.ring, &m.internal_end(t))).collect();
        m
    }

    /// Wraps stored data without recomputing dimensions.
    pub fn from_parts(ring: Arc<FusionRing>, side: Side, rank: usize, action: Vec<u32>, dim2: Vec<QuadExt>) -> Self {
        FusionModule {
            ring,
            side,
            rank,
            action,
            dim2,
        }
    }

    /// The ring acting on itself.
    pub fn regular(ring: Arc<FusionRing>, side: Side) -> Self {
        let r = ring.rank();
        let mut action = vec![0u32; r * r * r];
        for i in 0..r {
            for s in 0..r {
                for t in 0..r {
                    action[(i * r + s) * r + t] = match side {
                        Side::Left => ring.n(i, s, t),
                        Side::Right => ring.n(s, i, t),
                    };
                }
            }
        }
        Self::from_action(ring, side, r, action)
    }

    pub fn ring(&self) -> &Arc<FusionRing> {
        &self.ring
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn action(&self) -> &[u32] {
        &self.action
    }

    pub fn dim2(&self) -> &[QuadExt] {
        &self.dim2
    }

    #[inline]
    pub fn act(&self, i: usize, s: usize, t: usize) -> u32 {
        self.action[(i * self.rank + s) * self.rank + t]
    }

    /// `u_t u_t^bar` (left) or `u_t^bar u_t` (right) as ring coefficients.
    pub fn internal_end(&self, t: usize) -> Vec<u32> {
        (0..self.ring.rank()).map(|i| self.act(i, t, t)).collect()
    }

    /// Basis reordering: position `p` of the result holds old element
    /// `perm[p]`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        let (n, m) = (self.ring.rank(), self.rank);
        let mut action = vec![0u32; n * m * m];
        for i in 0..n {
            for p in 0..m {
                for q in 0..m {
                    action[(i * m + p) * m + q] = self.act(i, perm[p], perm[q]);
                }
            }
        }
        FusionModule {
            ring: self.ring.clone(),
            side: self.side,
            rank: m,
            action,
            dim2: perm.iter().map(|&p| self.dim2[p].clone()).collect(),
        }
    }

    /// Catalog sort key.
    pub fn sort_key(&self) -> (usize, Vec<QuadExt>, Vec<u32>) {
        (self.rank, self.dim2.clone(), self.action.clone())
    }
}

/// Dimension of a ring element given by non-negative coefficients.
pub fn element_dim(ring: &FusionRing, xi: &[u32]) -> QuadExt {
    let mut acc = QuadExt::zero(ring.field());
    for (i, &c) in xi.iter().enumerate() {
        if c != 0 {
            acc = &acc + &ring.fp_dim()[i].scale_int(c as i64);
        }
    }
    acc
}

/// `M^xi[i][j] = (b_i xi, b_j)`.
pub fn fusion_matrix(ring: &FusionRing, xi: &[u32]) -> IntMatrix {
    let r = ring.rank();
    let mut m = vec![vec![0u32; r]; r];
    for (k, &c) in xi.iter().enumerate() {
        if c == 0 {
            continue;
        }
        for (i, row) in m.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x += c * ring.n(i, k, j);
            }
        }
    }
    m
}

/// All `xi` with `(xi, 1) = 1`, `0 <= (xi, eta) <= d(eta)` and positive
/// semi-definite fusion matrix, in lexicographic order.
pub fn candidate_internal_ends(ring: &FusionRing) -> Vec<Vec<u32>> {
    let r = ring.rank();
    let bounds: Vec<u32> = ring
        .fp_dim()
        .iter()
        .map(|d| u32::try_from(d.floor()).expect("dimension bound fits in u32"))
        .collect();
    // a symmetric fusion matrix needs a self-dual xi, so only one
    // representative of each dual pair is free
    let free: Vec<usize> = (1..r).filter(|&i| ring.dual(i) >= i).collect();
    let total: u64 = free.iter().map(|&i| bounds[i] as u64 + 1).product();
    let mut out: Vec<Vec<u32>> = (0..total)
        .into_par_iter()
        .filter_map(|mut code| {
            let mut xi = vec![0u32; r];
            xi[0] = 1;
            for &i in free.iter().rev() {
                let b = bounds[i] as u64 + 1;
                xi[i] = (code % b) as u32;
                code /= b;
                xi[ring.dual(i)] = xi[i];
            }
            let m = fusion_matrix(ring, &xi);
            let signed: Vec<Vec<i64>> = m.iter().map(|row| row.iter().map(|&x| x as i64).collect()).collect();
            gramdecomp::is_psd_exact(&signed).then_some(xi)
        })
        .collect();
    out.sort();
    out
}

/// A decomposition `A A^T = M^xi` with the squared dimensions of its
/// columns, `((A^T d)_t)^2 / d(xi)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateMatrix {
    pub xi: Vec<u32>,
    pub a: IntMatrix,
    pub col_dim2: Vec<QuadExt>,
}

impl CandidateMatrix {
    fn new(ring: &FusionRing, xi: Vec<u32>, a: IntMatrix) -> Self {
        let n = a.len();
        let k = a.first().map_or(0, |r| r.len());
        let dxi = element_dim(ring, &xi);
        let mut cols: Vec<(QuadExt, Vec<u32>)> = (0..k)
            .map(|c| {
                let col: Vec<u32> = (0..n).map(|i| a[i][c]).collect();
                let s = element_dim(ring, &col);
                (&s.square() / &dxi, col)
            })
            .collect();
        cols.sort_by(|x, y| x.0.cmp(&y.0).then_with(|| y.1.cmp(&x.1)));
        let a = (0..n).map(|i| cols.iter().map(|c| c.1[i]).collect()).collect();
        CandidateMatrix {
            xi,
            a,
            col_dim2: cols.into_iter().map(|c| c.0).collect(),
        }
    }

    pub fn columns(&self) -> usize {
        self.col_dim2.len()
    }

    pub fn column(&self, c: usize) -> Vec<u32> {
        self.a.iter().map(|row| row[c]).collect()
    }
}

/// Every Gram decomposition of every candidate fusion matrix.
pub fn candidate_fusion_matrices(ring: &FusionRing) -> Vec<CandidateMatrix> {
    let ends = candidate_internal_ends(ring);
    let per: Vec<Vec<CandidateMatrix>> = ends
        .into_par_iter()
        .map(|xi| {
            let m = fusion_matrix(ring, &xi);
            gramdecomp::gram_decompositions_unchecked(&m)
                .into_iter()
                .map(|a| CandidateMatrix::new(ring, xi.clone(), a))
                .collect()
        })
        .collect();
    per.into_iter().flatten().collect()
}

struct Cand {
    cols: Vec<Vec<u32>>,
    gen: usize,
}

/// Slot-by-slot assembly of modules sharing one column-dimension vector.
struct Assembly<'a> {
    ring: &'a FusionRing,
    n: usize,
    m: usize,
    slot_class: Vec<u16>,
    col_class: Vec<Vec<u16>>,
    cands: Vec<Cand>,
    by_class: BTreeMap<u16, Vec<usize>>,
    rows: Vec<Vec<u32>>,
    found: Vec<Vec<u32>>,
}

impl Assembly<'_> {
    fn rep_ok(&self, s: usize, w: usize) -> bool {
        let (n, m) = (self.n, self.m);
        let (rs, rw) = (&self.rows[s], &self.rows[w]);
        for i in 0..n {
            let di = self.ring.dual(i);
            for j in 0..n {
                let lhs: u32 = (0..m).map(|t| rs[j * m + t] * rw[di * m + t]).sum();
                let rhs: u32 = (0..n).map(|k| self.ring.n(i, j, k) * rs[k * m + w]).sum();
                if lhs != rhs {
                    return false;
                }
            }
        }
        true
    }

    fn slot(&mut self, s: usize) {
        if s == self.m {
            let (n, m) = (self.n, self.m);
            let mut action = vec![0u32; n * m * m];
            for (t, row) in self.rows.iter().enumerate() {
                for i in 0..n {
                    for u in 0..m {
                        action[(i * m + t) * m + u] = row[i * m + u];
                    }
                }
            }
            self.found.push(action);
            return;
        }
        let cands = self.by_class.get(&self.slot_class[s]).cloned().unwrap_or_default();
        for c in cands {
            self.try_candidate(s, c);
        }
    }

    fn try_candidate(&mut self, s: usize, c: usize) {
        let (n, m) = (self.n, self.m);
        let k = self.cands[c].cols.len();
        let mut used = vec![false; k];
        let mut mapping = vec![usize::MAX; m];
        let gen = self.cands[c].gen;
        mapping[s] = gen;
        used[gen] = true;
        // columns for earlier slots are forced by dual symmetry
        for t in 0..s {
            let forced: Vec<u32> = (0..n).map(|i| self.rows[t][self.ring.dual(i) * m + s]).collect();
            let hit = (0..k).find(|&j| !used[j] && self.cands[c].cols[j] == forced);
            match hit {
                Some(j) => {
                    used[j] = true;
                    mapping[t] = j;
                }
                None => return,
            }
        }
        // later slots that look identical so far are interchangeable
        let mut groups: BTreeMap<(u16, Vec<u32>), Vec<usize>> = BTreeMap::new();
        for t in s + 1..m {
            let sig: Vec<u32> = (0..s).flat_map(|w| (0..n).map(move |i| (w, i))).map(|(w, i)| self.rows[w][i * m + t]).collect();
            groups.entry((self.slot_class[t], sig)).or_default().push(t);
        }
        let groups: Vec<(u16, Vec<usize>)> = groups.into_iter().map(|((cl, _), v)| (cl, v)).collect();
        let mut pool: BTreeMap<u16, Vec<usize>> = BTreeMap::new();
        for j in 0..k {
            if !used[j] {
                pool.entry(self.col_class[c][j]).or_default().push(j);
            }
        }
        for (cl, slots) in &groups {
            if pool.get(cl).map_or(0, |v| v.len()) < slots.len() {
                return;
            }
        }
        if pool.values().map(|v| v.len()).sum::<usize>() != m - 1 - s {
            return;
        }
        self.distribute(s, c, &groups, 0, 0, &mut pool, &mut mapping, usize::MAX);
    }

    /// Assigns pooled columns to the free slots, non-increasing within each
    /// group of interchangeable slots.
    #[allow(clippy::too_many_arguments)]
    fn distribute(
        &mut self,
        s: usize,
        c: usize,
        groups: &[(u16, Vec<usize>)],
        g: usize,
        pos: usize,
        pool: &mut BTreeMap<u16, Vec<usize>>,
        mapping: &mut Vec<usize>,
        prev: usize,
    ) {
        if g == groups.len() {
            self.place(s, c, mapping);
            return;
        }
        let (cl, slots) = &groups[g];
        if pos == slots.len() {
            self.distribute(s, c, groups, g + 1, 0, pool, mapping, usize::MAX);
            return;
        }
        let avail = pool.get(cl).cloned().unwrap_or_default();
        let mut tried: Vec<usize> = Vec::new();
        for (idx, &j) in avail.iter().enumerate() {
            let cols = &self.cands[c].cols;
            if tried.iter().any(|&x| cols[x] == cols[j]) {
                continue;
            }
            // non-increasing column order within a group
            if prev != usize::MAX && cols[j] > cols[prev] {
                continue;
            }
            tried.push(j);
            mapping[slots[pos]] = j;
            pool.get_mut(cl).unwrap().remove(idx);
            self.distribute(s, c, groups, g, pos + 1, pool, mapping, j);
            pool.get_mut(cl).unwrap().insert(idx, j);
        }
    }

    fn place(&mut self, s: usize, c: usize, mapping: &[usize]) {
        let (n, m) = (self.n, self.m);
        let mut row = vec![0u32; n * m];
        for (t, &j) in mapping.iter().enumerate() {
            let col = &self.cands[c].cols[j];
            for i in 0..n {
                row[i * m + t] = col[i];
            }
        }
        self.rows.push(row);
        let ok = (0..=s).all(|w| self.rep_ok(s, w) && (w == s || self.rep_ok(w, s)));
        if ok {
            self.slot(s + 1);
        }
        self.rows.pop();
    }
}

fn dims_class_table(cands: &[CandidateMatrix]) -> BTreeMap<QuadExt, u16> {
    let mut all: Vec<QuadExt> = cands.iter().flat_map(|c| c.col_dim2.iter().cloned()).collect();
    all.sort();
    all.dedup();
    all.into_iter().enumerate().map(|(i, d)| (d, i as u16)).collect()
}

/// Raw action tensors of all modules assembled from the candidate
/// matrices, before isomorphism dedupe.
fn assemble(ring: &FusionRing, cands: &[CandidateMatrix]) -> Vec<(usize, Vec<u32>)> {
    let g = ring.global_dim2();
    let classes = dims_class_table(cands);
    let mut groups: BTreeMap<Vec<u16>, Vec<usize>> = BTreeMap::new();
    for (idx, c) in cands.iter().enumerate() {
        let total = c.col_dim2.iter().fold(QuadExt::zero(ring.field()), |a, b| &a + b);
        if total != g {
            continue;
        }
        let key: Vec<u16> = c.col_dim2.iter().map(|d| classes[d]).collect();
        groups.entry(key).or_default().push(idx);
    }
    let groups: Vec<(Vec<u16>, Vec<usize>)> = groups.into_iter().collect();
    let per: Vec<Vec<(usize, Vec<u32>)>> = groups
        .into_par_iter()
        .map(|(key, members)| {
            let m = key.len();
            let mut local = Vec::new();
            let mut by_class: BTreeMap<u16, Vec<usize>> = BTreeMap::new();
            let mut col_class = Vec::new();
            for &idx in &members {
                let c = &cands[idx];
                let cols: Vec<Vec<u32>> = (0..c.columns()).map(|j| c.column(j)).collect();
                let gen = (0..c.columns()).find(|&j| c.a[0][j] == 1).expect("generator column");
                by_class.entry(classes[&c.col_dim2[gen]]).or_default().push(local.len());
                col_class.push(c.col_dim2.iter().map(|d| classes[d]).collect());
                local.push(Cand { cols, gen });
            }
            let mut asm = Assembly {
                ring,
                n: ring.rank(),
                m,
                slot_class: key.clone(),
                col_class,
                cands: local,
                by_class,
                rows: Vec::new(),
                found: Vec::new(),
            };
            asm.slot(0);
            asm.found.into_iter().map(|a| (m, a)).collect()
        })
        .collect();
    per.into_iter().flatten().collect()
}

fn connected(m: &FusionModule) -> bool {
    let (n, r) = (m.ring.rank(), m.rank);
    let mut seen = vec![false; r];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(s) = stack.pop() {
        for t in 0..r {
            if !seen[t] && (0..n).any(|i| m.act(i, s, t) > 0 || m.act(i, t, s) > 0) {
                seen[t] = true;
                stack.push(t);
            }
        }
    }
    seen.into_iter().all(|x| x)
}

/// All admissible indecomposable modules up to isomorphism, in canonical
/// form and canonical order.
pub fn enumerate_fusion_modules(ring: &Arc<FusionRing>, side: Side) -> Vec<FusionModule> {
    let work: Arc<FusionRing> = match side {
        Side::Left => ring.clone(),
        Side::Right => Arc::new(ring.opposite()),
    };
    let cands = candidate_fusion_matrices(&work);
    let raw = assemble(&work, &cands);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (m, action) in raw {
        let module = FusionModule::from_action(ring.clone(), side, m, action);
        if !connected(&module) {
            continue;
        }
        debug_assert!(validate_module(&module).is_ok());
        let canon = canonical_module(&module);
        if seen.insert(canon.action.clone()) {
            out.push(canon);
        }
    }
    out.sort_by_key(|a| a.sort_key());
    out
}

/// Vertex order minimising the per-vertex key sequence; vertices are first
/// sorted by colour, ties broken by the pairwise data with earlier vertices.
pub(crate) fn canonical_order<C: Ord + Clone>(colors: &[C], pair: &[Vec<Vec<u32>>]) -> Vec<usize> {
    let m = colors.len();
    let mut sorted = colors.to_vec();
    sorted.sort();
    let mut prefixes: Vec<Vec<usize>> = vec![Vec::new()];
    for p in 0..m {
        let mut best: Option<Vec<u32>> = None;
        let mut next: Vec<Vec<usize>> = Vec::new();
        for pre in &prefixes {
            for v in 0..m {
                if colors[v] != sorted[p] || pre.contains(&v) {
                    continue;
                }
                let mut key = pair[v][v].clone();
                for &q in pre {
                    key.extend_from_slice(&pair[v][q]);
                    key.extend_from_slice(&pair[q][v]);
                }
                match &best {
                    Some(b) if key > *b => continue,
                    Some(b) if key == *b => {}
                    _ => {
                        best = Some(key);
                        next.clear();
                    }
                }
                let mut np = pre.clone();
                np.push(v);
                next.push(np);
            }
        }
        prefixes = next;
    }
    prefixes.swap_remove(0)
}

/// Canonical representative of the isomorphism class.
pub fn canonical_module(m: &FusionModule) -> FusionModule {
    let n = m.ring.rank();
    let colors: Vec<(QuadExt, Vec<u32>)> = (0..m.rank).map(|t| (m.dim2[t].clone(), m.internal_end(t))).collect();
    let pair: Vec<Vec<Vec<u32>>> = (0..m.rank)
        .map(|a| (0..m.rank).map(|b| (0..n).map(|i| m.act(i, a, b)).collect()).collect())
        .collect();
    m.relabel(&canonical_order(&colors, &pair))
}

/// A dimension-preserving basis bijection `sigma` (old index of `a` to
/// index of `b`) carrying `a`'s action onto `b`'s, if one exists. The first
/// such bijection in lexicographic order is returned.
pub fn module_iso(a: &FusionModule, b: &FusionModule) -> Option<Vec<usize>> {
    if a.ring.name() != b.ring.name() || a.side != b.side || a.rank != b.rank {
        return None;
    }
    let n = a.ring.rank();
    let m = a.rank;
    let mut sigma = vec![usize::MAX; m];
    let mut used = vec![false; m];
    fn rec(a: &FusionModule, b: &FusionModule, n: usize, s: usize, sigma: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        let m = a.rank;
        if s == m {
            return true;
        }
        for t in 0..m {
            if used[t] || a.dim2[s] != b.dim2[t] {
                continue;
            }
            sigma[s] = t;
            let ok = (0..=s).all(|w| (0..n).all(|i| a.act(i, s, w) == b.act(i, t, sigma[w]) && a.act(i, w, s) == b.act(i, sigma[w], t)));
            if ok {
                used[t] = true;
                if rec(a, b, n, s + 1, sigma, used) {
                    return true;
                }
                used[t] = false;
            }
        }
        false
    }
    rec(a, b, n, 0, &mut sigma, &mut used).then_some(sigma)
}

/// The same basis with the side flipped: `u . b_i := b_i^bar . u`, i.e. the
/// action matrices are transposed.
pub fn opposite_module(m: &FusionModule) -> FusionModule {
    let (n, r) = (m.ring.rank(), m.rank);
    let mut action = vec![0u32; n * r * r];
    for i in 0..n {
        for s in 0..r {
            for t in 0..r {
                action[(i * r + s) * r + t] = m.act(i, t, s);
            }
        }
    }
    FusionModule {
        ring: m.ring.clone(),
        side: m.side.flip(),
        rank: r,
        action,
        dim2: m.dim2.clone(),
    }
}

/// Re-checks every module axiom from scratch.
pub fn validate_module(m: &FusionModule) -> Result<(), ModuleError> {
    let ring = &m.ring;
    let n = ring.rank();
    let r = m.rank;
    if m.action.len() != n * r * r || m.dim2.len() != r {
        return Err(ModuleError::Shape);
    }
    let at = |i: usize, s: usize, t: usize| m.action[(i * r + s) * r + t] as u64;
    for s in 0..r {
        for t in 0..r {
            if at(0, s, t) != u64::from(s == t) {
                return Err(ModuleError::Unit(s, t));
            }
        }
    }
    for i in 0..n {
        for s in 0..r {
            for t in 0..r {
                if at(i, s, t) != at(ring.dual(i), t, s) {
                    return Err(ModuleError::DualSymmetry(i, s, t));
                }
            }
        }
    }
    // left: L_j L_i = sum N[i][j][k] L_k; right: R_i R_j = sum N[i][j][k] R_k
    for i in 0..n {
        for j in 0..n {
            for s in 0..r {
                for u in 0..r {
                    let lhs: u64 = match m.side {
                        Side::Left => (0..r).map(|t| at(j, s, t) * at(i, t, u)).sum(),
                        Side::Right => (0..r).map(|t| at(i, s, t) * at(j, t, u)).sum(),
                    };
                    let rhs: u64 = (0..n).map(|k| ring.n(i, j, k) as u64 * at(k, s, u)).sum();
                    if lhs != rhs {
                        return Err(ModuleError::Representation(i, j));
                    }
                }
            }
        }
    }
    let mut seen = vec![false; r];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(s) = stack.pop() {
        for t in 0..r {
            if !seen[t] && (0..n).any(|i| at(i, s, t) > 0) {
                seen[t] = true;
                stack.push(t);
            }
        }
    }
    if seen.iter().any(|x| !x) {
        return Err(ModuleError::Disconnected);
    }
    for s in 0..r {
        let mut want = QuadExt::zero(ring.field());
        for i in 0..n {
            want = &want + &ring.fp_dim()[i].scale_int(at(i, s, s) as i64);
        }
        if want != m.dim2[s] {
            return Err(ModuleError::AdmissibilityA(s));
        }
    }
    // the square roots of dim2 must form a common eigenvector
    for i in 0..n {
        for s in 0..r {
            let mut lhs = SurdSum::new();
            for t in 0..r {
                if at(i, s, t) > 0 {
                    lhs.add_term(&QuadExt::from_int(at(i, s, t) as i64, ring.field()), &m.dim2[t]);
                }
            }
            let mut rhs = SurdSum::new();
            rhs.add_term(&ring.fp_dim()[i], &m.dim2[s]);
            if !surd_sum_eq(&lhs, &rhs) {
                return Err(ModuleError::AdmissibilityA(s));
            }
        }
    }
    for s in 0..r {
        for x in 0..n {
            for y in 0..n {
                let lhs: u64 = (0..r).map(|t| at(x, s, t) * at(y, s, t)).sum();
                let rhs: u64 = (0..n)
                    .map(|j| {
                        let nn = match m.side {
                            Side::Left => ring.n(x, j, y),
                            Side::Right => ring.n(j, x, y),
                        };
                        at(j, s, s) * nn as u64
                    })
                    .sum();
                if lhs != rhs {
                    return Err(ModuleError::AdmissibilityB(x, y, s));
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fusionring::builtin::builtin_ring;

    fn ring(name: &str) -> Arc<FusionRing> {
        Arc::new(builtin_ring(name).unwrap())
    }

    #[test]
    fn internal_end_candidates() {
        let ah1 = ring("AH1");
        let ends = candidate_internal_ends(&ah1);
        assert!(ends.contains(&vec![1, 1, 0, 0, 0, 0]));
        assert!(ends.contains(&vec![1, 0, 0, 1, 0, 0]));
        let fib = ring("Fib");
        assert_eq!(candidate_internal_ends(&fib), vec![vec![1, 0], vec![1, 1]]);
    }

    #[test]
    fn small_candidate_matrices() {
        let t = candidate_fusion_matrices(&ring("Trivial"));
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].a, vec![vec![1]]);
        let z2 = candidate_fusion_matrices(&ring("Z2"));
        let m = z2.iter().find(|c| c.xi == vec![1, 1]).unwrap();
        assert_eq!(m.a, vec![vec![1], vec![1]]);
        assert_eq!(m.col_dim2, vec![QuadExt::from_int(2, 1)]);
    }

    #[test]
    fn small_module_counts() {
        assert_eq!(enumerate_fusion_modules(&ring("Fib"), Side::Left).len(), 1);
        assert_eq!(enumerate_fusion_modules(&ring("Z2"), Side::Left).len(), 2);
        assert_eq!(enumerate_fusion_modules(&ring("Trivial"), Side::Left).len(), 1);
    }

    #[test]
    fn regular_module_is_valid_and_listed() {
        for name in ["Fib", "Z2", "Z3", "Ising", "AH1"] {
            let r = ring(name);
            let reg = FusionModule::regular(r.clone(), Side::Left);
            validate_module(&reg).unwrap();
            let cat = enumerate_fusion_modules(&r, Side::Left);
            assert_eq!(cat.iter().filter(|m| module_iso(m, &reg).is_some()).count(), 1, "{name}");
        }
    }

    #[test]
    fn iso_recovers_permutations() {
        let r = ring("AH1");
        let reg = FusionModule::regular(r.clone(), Side::Left);
        assert_eq!(module_iso(&reg, &reg), Some((0..6).collect()));
        let perm = vec![0, 3, 1, 5, 2, 4];
        let relabeled = reg.relabel(&perm);
        let sigma = module_iso(&relabeled, &reg).unwrap();
        assert_eq!(sigma, perm);
        assert_eq!(canonical_module(&relabeled), canonical_module(&reg));
    }

    #[test]
    fn opposite_is_involutive() {
        let r = ring("Z2");
        for m in enumerate_fusion_modules(&r, Side::Left) {
            let op = opposite_module(&m);
            assert_eq!(op.side(), Side::Right);
            validate_module(&op).unwrap();
            assert_eq!(opposite_module(&op), m);
        }
    }
}
