//! Multiplication maps `K (x)_B L -> M` on triples of fusion bimodules, and
//! on module/bimodule/module triples, with the product tables built from
//! them.
//!
//! A map is a tensor `v[i][j][k]`: the coefficient of `mu_k` in the image of
//! `xi_i (x) eta_j`.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::bimodule::{Catalog, FusionBimodule};
use crate::exactnum::{surd_sum_eq, QuadExt, SurdSum};
use crate::gramdecomp::isqrt;
use crate::nimrep::{FusionModule, Side};

/// Which conditions the search imposes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MapOptions {
    /// Multiplication by duals landing in the left ring.
    pub condition_c: bool,
    /// Multiplication by duals landing in the right ring.
    pub condition_c_prime: bool,
    /// Linearity over the outer rings and balance over the middle ring,
    /// checked on complete maps.
    pub final_check: bool,
}

impl MapOptions {
    pub const BIMODULE: MapOptions = MapOptions {
        condition_c: true,
        condition_c_prime: true,
        final_check: true,
    };
    pub const MODULE: MapOptions = MapOptions {
        condition_c: false,
        condition_c_prime: true,
        final_check: true,
    };
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiplicationMap {
    pub l: usize,
    pub m: usize,
    pub n: usize,
    pub v: Vec<u32>,
}

impl MultiplicationMap {
    pub fn at(&self, i: usize, j: usize, k: usize) -> u32 {
        self.v[(i * self.m + j) * self.n + k]
    }

    pub fn cell(&self, i: usize, j: usize) -> &[u32] {
        let s = (i * self.m + j) * self.n;
        &self.v[s..s + self.n]
    }
}

/// One factor of a triple: basis size, squared dimensions and whichever
/// actions it carries (`[x][s][t]` tensors with their ring ranks).
#[derive(Clone, Debug)]
pub struct Operand {
    pub rank: usize,
    pub dim2: Vec<QuadExt>,
    pub left: Option<(usize, Vec<u32>)>,
    pub right: Option<(usize, Vec<u32>)>,
}

impl Operand {
    pub fn of_bimodule(b: &FusionBimodule) -> Self {
        Operand {
            rank: b.rank(),
            dim2: b.dim2().to_vec(),
            left: Some((b.left_ring().rank(), b.lact().to_vec())),
            right: Some((b.right_ring().rank(), b.ract().to_vec())),
        }
    }

    pub fn of_right_module(m: &FusionModule) -> Self {
        assert_eq!(m.side(), Side::Right, "module products take right modules");
        Operand {
            rank: m.rank(),
            dim2: m.dim2().to_vec(),
            left: None,
            right: Some((m.ring().rank(), m.action().to_vec())),
        }
    }

    fn la(&self, x: usize, s: usize, t: usize) -> u32 {
        let (_, a) = self.left.as_ref().expect("left action");
        a[(x * self.rank + s) * self.rank + t]
    }

    fn ra(&self, x: usize, s: usize, t: usize) -> u32 {
        let (_, a) = self.right.as_ref().expect("right action");
        a[(x * self.rank + s) * self.rank + t]
    }

    fn nl(&self) -> usize {
        self.left.as_ref().map_or(0, |l| l.0)
    }

    fn nr(&self) -> usize {
        self.right.as_ref().map_or(0, |r| r.0)
    }
}

/// A quadratic identity `sum_b P[b][a1][a2] Q[b][c1][c2][lam] =
/// sum v1[k1] v2[k2] R[lam][k1][k2]` over two cells.
struct Condition {
    nb: usize,
    nlam: usize,
    // P indexes the K basis when true, the L basis otherwise
    p_on_k: bool,
    psz: usize,
    qsz: usize,
    p: Vec<u32>,
    q: Vec<u32>,
    r: Vec<u32>,
}

impl Condition {
    fn lhs(&self, i1: usize, j1: usize, i2: usize, j2: usize, lam: usize) -> u32 {
        let (a1, a2, c1, c2) = if self.p_on_k { (i1, i2, j1, j2) } else { (j1, j2, i1, i2) };
        let mut acc = 0;
        for b in 0..self.nb {
            let p = self.p[(b * self.psz + a1) * self.psz + a2];
            if p != 0 {
                acc += p * self.q[((b * self.qsz + c1) * self.qsz + c2) * self.nlam + lam];
            }
        }
        acc
    }

    fn holds(&self, n: usize, c1: (usize, usize, &[(usize, u32)]), c2: (usize, usize, &[(usize, u32)])) -> bool {
        for lam in 0..self.nlam {
            let mut rhs = 0u32;
            for &(k1, x) in c1.2 {
                for &(k2, y) in c2.2 {
                    rhs += x * y * self.r[(lam * n + k1) * n + k2];
                }
            }
            if rhs != self.lhs(c1.0, c1.1, c2.0, c2.1, lam) {
                return false;
            }
        }
        true
    }
}

/// Condition (c): `(xi_i1 (eta_j1 eta_j2^bar) xi_i2^bar, lam)` over the
/// left ring.
fn condition_c(k: &Operand, l: &Operand, m: &Operand) -> Condition {
    let nb = k.nr();
    let na = k.nl();
    let (lk, ll, n) = (k.rank, l.rank, m.rank);
    let mut p = vec![0u32; nb * ll * ll];
    for b in 0..nb {
        for j1 in 0..ll {
            for j2 in 0..ll {
                p[(b * ll + j1) * ll + j2] = l.la(b, j2, j1);
            }
        }
    }
    let mut q = vec![0u32; nb * lk * lk * na];
    for b in 0..nb {
        for i1 in 0..lk {
            for w in 0..lk {
                let x = k.ra(b, i1, w);
                if x == 0 {
                    continue;
                }
                for i2 in 0..lk {
                    for lam in 0..na {
                        q[((b * lk + i1) * lk + i2) * na + lam] += x * k.la(lam, i2, w);
                    }
                }
            }
        }
    }
    let mut r = vec![0u32; na * n * n];
    for lam in 0..na {
        for k1 in 0..n {
            for k2 in 0..n {
                r[(lam * n + k1) * n + k2] = m.la(lam, k2, k1);
            }
        }
    }
    Condition {
        nb,
        nlam: na,
        p_on_k: false,
        psz: ll,
        qsz: lk,
        p,
        q,
        r,
    }
}

/// Condition (c'): `(eta_j1^bar (xi_i1^bar xi_i2) eta_j2, sigma)` over the
/// right ring.
fn condition_c_prime(k: &Operand, l: &Operand, m: &Operand) -> Condition {
    let nb = k.nr();
    let nc = l.nr();
    let (lk, ll, n) = (k.rank, l.rank, m.rank);
    let mut p = vec![0u32; nb * lk * lk];
    for b in 0..nb {
        for i1 in 0..lk {
            for i2 in 0..lk {
                p[(b * lk + i1) * lk + i2] = k.ra(b, i1, i2);
            }
        }
    }
    let mut q = vec![0u32; nb * ll * ll * nc];
    for b in 0..nb {
        for j2 in 0..ll {
            for w in 0..ll {
                let x = l.la(b, j2, w);
                if x == 0 {
                    continue;
                }
                for j1 in 0..ll {
                    for s in 0..nc {
                        q[((b * ll + j1) * ll + j2) * nc + s] += x * l.ra(s, j1, w);
                    }
                }
            }
        }
    }
    let mut r = vec![0u32; nc * n * n];
    for s in 0..nc {
        for k1 in 0..n {
            for k2 in 0..n {
                r[(s * n + k1) * n + k2] = m.ra(s, k1, k2);
            }
        }
    }
    Condition {
        nb,
        nlam: nc,
        p_on_k: true,
        psz: lk,
        qsz: ll,
        p,
        q,
        r,
    }
}

/// Non-negative integer vectors with the given squared norm and exact
/// dimension `sum v_k sqrt(dim2_k) = sqrt(target2)`.
fn norm_dim_vectors(norm: u32, target2: &QuadExt, dim2: &[QuadExt], dims: &[f64]) -> Vec<Vec<u32>> {
    let target = target2.to_f64().sqrt();
    let eps = 1e-7 * (1.0 + target);
    // largest dimensions first; tail[k] = sum of squared dims from k on
    let mut idx: Vec<usize> = (0..dims.len()).collect();
    idx.sort_by(|&a, &b| dims[b].total_cmp(&dims[a]));
    let d: Vec<f64> = idx.iter().map(|&k| dims[k]).collect();
    let mut tail = vec![0.0; d.len() + 1];
    for k in (0..d.len()).rev() {
        tail[k] = tail[k + 1] + d[k] * d[k];
    }
    struct Ctx<'a> {
        d: &'a [f64],
        tail: &'a [f64],
        target: f64,
        eps: f64,
        v: Vec<u32>,
        out: Vec<Vec<u32>>,
    }
    fn rec(c: &mut Ctx, k: usize, left: u32, sum: f64) {
        if k == c.d.len() {
            if left == 0 && (sum - c.target).abs() < c.eps {
                c.out.push(c.v.clone());
            }
            return;
        }
        // Cauchy-Schwarz: the rest can add at most sqrt(left * tail)
        if sum + (left as f64 * c.tail[k]).sqrt() < c.target - c.eps {
            return;
        }
        let top = isqrt(left as u64) as u32;
        for x in (0..=top).rev() {
            let s = sum + x as f64 * c.d[k];
            if s > c.target + c.eps {
                continue;
            }
            c.v[k] = x;
            rec(c, k + 1, left - x * x, s);
        }
        c.v[k] = 0;
    }
    let mut c = Ctx {
        d: &d,
        tail: &tail,
        target,
        eps,
        v: vec![0; d.len()],
        out: Vec::new(),
    };
    rec(&mut c, 0, norm, 0.0);
    let mut out: Vec<Vec<u32>> = c
        .out
        .into_iter()
        .map(|w| {
            let mut v = vec![0u32; w.len()];
            for (p, &k) in idx.iter().enumerate() {
                v[k] = w[p];
            }
            v
        })
        .collect();
    out.retain(|v| {
        let mut lhs = SurdSum::new();
        for (k, &x) in v.iter().enumerate() {
            if x > 0 {
                lhs.add_term(&QuadExt::from_int(x as i64, target2.field()), &dim2[k]);
            }
        }
        let mut rhs = SurdSum::new();
        rhs.add_term(&QuadExt::one(target2.field()), target2);
        surd_sum_eq(&lhs, &rhs)
    });
    out.sort();
    out
}

fn sparse(v: &[u32]) -> Vec<(usize, u32)> {
    v.iter().enumerate().filter(|(_, &x)| x > 0).map(|(k, &x)| (k, x)).collect()
}

struct Search<'a> {
    k: &'a Operand,
    l: &'a Operand,
    m: &'a Operand,
    opts: MapOptions,
    conds: Vec<Condition>,
    order: Vec<(usize, usize)>,
    cands: Vec<Vec<Vec<(usize, u32)>>>,
    chosen: Vec<usize>,
    limit: usize,
    found: Vec<MultiplicationMap>,
}

impl Search<'_> {
    fn rec(&mut self, pos: usize) {
        if self.found.len() >= self.limit {
            return;
        }
        if pos == self.order.len() {
            let map = self.assemble();
            if !self.opts.final_check || final_check(self.k, self.l, self.m, &map) {
                self.found.push(map);
            }
            return;
        }
        let (i, j) = self.order[pos];
        for c in 0..self.cands[pos].len() {
            let v = &self.cands[pos][c];
            let ok = (0..pos).all(|q| {
                let (i2, j2) = self.order[q];
                let w = &self.cands[q][self.chosen[q]];
                self.conds.iter().all(|cd| cd.holds(self.m.rank, (i, j, v), (i2, j2, w)) && cd.holds(self.m.rank, (i2, j2, w), (i, j, v)))
            });
            if ok {
                self.chosen[pos] = c;
                self.rec(pos + 1);
                if self.found.len() >= self.limit {
                    return;
                }
            }
        }
    }

    fn assemble(&self) -> MultiplicationMap {
        let (l, m, n) = (self.k.rank, self.l.rank, self.m.rank);
        let mut v = vec![0u32; l * m * n];
        for (pos, &(i, j)) in self.order.iter().enumerate() {
            for &(k, x) in &self.cands[pos][self.chosen[pos]] {
                v[(i * m + j) * n + k] = x;
            }
        }
        MultiplicationMap { l, m, n, v }
    }
}

/// Linearity on the outer actions present and balance over the middle ring.
fn final_check(k: &Operand, l: &Operand, m: &Operand, v: &MultiplicationMap) -> bool {
    let (lk, ll, n) = (k.rank, l.rank, m.rank);
    if k.left.is_some() && m.left.is_some() {
        for a in 0..k.nl() {
            for i in 0..lk {
                for j in 0..ll {
                    for kk in 0..n {
                        let lhs: u32 = (0..lk).map(|w| k.la(a, i, w) * v.at(w, j, kk)).sum();
                        let rhs: u32 = (0..n).map(|k2| v.at(i, j, k2) * m.la(a, k2, kk)).sum();
                        if lhs != rhs {
                            return false;
                        }
                    }
                }
            }
        }
    }
    for c in 0..l.nr() {
        for i in 0..lk {
            for j in 0..ll {
                for kk in 0..n {
                    let lhs: u32 = (0..ll).map(|w| l.ra(c, j, w) * v.at(i, w, kk)).sum();
                    let rhs: u32 = (0..n).map(|k2| v.at(i, j, k2) * m.ra(c, k2, kk)).sum();
                    if lhs != rhs {
                        return false;
                    }
                }
            }
        }
    }
    for b in 0..k.nr() {
        for i in 0..lk {
            for j in 0..ll {
                for kk in 0..n {
                    let lhs: u32 = (0..lk).map(|w| k.ra(b, i, w) * v.at(w, j, kk)).sum();
                    let rhs: u32 = (0..ll).map(|w| l.la(b, j, w) * v.at(i, w, kk)).sum();
                    if lhs != rhs {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Core search shared by bimodule and module triples; stops after `limit`
/// maps.
pub fn search_maps(k: &Operand, l: &Operand, m: &Operand, opts: MapOptions, limit: usize) -> Vec<MultiplicationMap> {
    let (lk, ll, n) = (k.rank, l.rank, m.rank);
    let nb = k.nr();
    assert_eq!(nb, l.nl(), "middle rings differ");
    let mut conds = Vec::new();
    if opts.condition_c {
        conds.push(condition_c(k, l, m));
    }
    if opts.condition_c_prime {
        conds.push(condition_c_prime(k, l, m));
    }
    let dims: Vec<f64> = m.dim2.iter().map(|d| d.to_f64().sqrt()).collect();
    let mut cells: Vec<(u32, usize, usize)> = Vec::with_capacity(lk * ll);
    for i in 0..lk {
        for j in 0..ll {
            let norm: u32 = (0..nb).map(|b| k.ra(b, i, i) * l.la(b, j, j)).sum();
            cells.push((norm, i, j));
        }
    }
    // tight cells first
    cells.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut cache: BTreeMap<(u32, QuadExt), Vec<Vec<u32>>> = BTreeMap::new();
    let mut cands = Vec::with_capacity(cells.len());
    let mut order = Vec::with_capacity(cells.len());
    for &(norm, i, j) in &cells {
        let t2 = &k.dim2[i] * &l.dim2[j];
        let all = cache
            .entry((norm, t2.clone()))
            .or_insert_with(|| norm_dim_vectors(norm, &t2, &m.dim2, &dims));
        let list: Vec<Vec<(usize, u32)>> = all
            .iter()
            .map(|v| sparse(v))
            .filter(|v| conds.iter().all(|c| c.holds(n, (i, j, v), (i, j, v))))
            .collect();
        if list.is_empty() {
            return Vec::new();
        }
        cands.push(list);
        order.push((i, j));
    }
    let mut s = Search {
        k,
        l,
        m,
        opts,
        conds,
        chosen: vec![0; order.len()],
        order,
        cands,
        limit,
        found: Vec::new(),
    };
    s.rec(0);
    let mut out = s.found;
    out.sort_by(|a, b| a.v.cmp(&b.v));
    out
}

/// All multiplication maps on a bimodule triple.
pub fn multiplication_maps(k: &FusionBimodule, l: &FusionBimodule, m: &FusionBimodule) -> Vec<MultiplicationMap> {
    search_maps(
        &Operand::of_bimodule(k),
        &Operand::of_bimodule(l),
        &Operand::of_bimodule(m),
        MapOptions::BIMODULE,
        usize::MAX,
    )
}

/// Whether a bimodule triple admits a multiplication map.
pub fn is_compatible(k: &FusionBimodule, l: &FusionBimodule, m: &FusionBimodule) -> bool {
    !search_maps(
        &Operand::of_bimodule(k),
        &Operand::of_bimodule(l),
        &Operand::of_bimodule(m),
        MapOptions::BIMODULE,
        1,
    )
    .is_empty()
}

/// All multiplication maps on a right module / bimodule / right module
/// triple.
pub fn module_multiplication_maps(k: &FusionModule, l: &FusionBimodule, m: &FusionModule, opts: MapOptions) -> Vec<MultiplicationMap> {
    search_maps(
        &Operand::of_right_module(k),
        &Operand::of_bimodule(l),
        &Operand::of_right_module(m),
        opts,
        usize::MAX,
    )
}

/// Re-checks conditions (a), (b), (c), (c') and the final identities
/// directly from the definitions.
pub fn validate_map(k: &Operand, l: &Operand, m: &Operand, opts: MapOptions, v: &MultiplicationMap) -> Result<(), String> {
    let (lk, ll, n) = (k.rank, l.rank, m.rank);
    if v.l != lk || v.m != ll || v.n != n || v.v.len() != lk * ll * n {
        return Err("shape".into());
    }
    let nb = k.nr();
    for i in 0..lk {
        for j in 0..ll {
            let mut lhs = SurdSum::new();
            for kk in 0..n {
                if v.at(i, j, kk) > 0 {
                    lhs.add_term(&QuadExt::from_int(v.at(i, j, kk) as i64, m.dim2[kk].field()), &m.dim2[kk]);
                }
            }
            let mut rhs = SurdSum::new();
            let t2 = &k.dim2[i] * &l.dim2[j];
            rhs.add_term(&QuadExt::one(t2.field()), &t2);
            if !surd_sum_eq(&lhs, &rhs) {
                return Err(format!("dimension fails at ({i},{j})"));
            }
            let norm: u64 = (0..nb).map(|b| k.ra(b, i, i) as u64 * l.la(b, j, j) as u64).sum();
            let sq: u64 = v.cell(i, j).iter().map(|&x| (x as u64).pow(2)).sum();
            if norm != sq {
                return Err(format!("norm fails at ({i},{j})"));
            }
        }
    }
    let cells: Vec<(usize, usize)> = (0..lk).flat_map(|i| (0..ll).map(move |j| (i, j))).collect();
    if opts.condition_c {
        for &(i1, j1) in &cells {
            for &(i2, j2) in &cells {
                for lam in 0..k.nl() {
                    let mut lhs = 0u64;
                    for b in 0..nb {
                        let c = l.la(b, j2, j1) as u64;
                        if c == 0 {
                            continue;
                        }
                        for w in 0..lk {
                            lhs += c * k.ra(b, i1, w) as u64 * k.la(lam, i2, w) as u64;
                        }
                    }
                    let mut rhs = 0u64;
                    for k1 in 0..n {
                        for k2 in 0..n {
                            rhs += v.at(i1, j1, k1) as u64 * v.at(i2, j2, k2) as u64 * m.la(lam, k2, k1) as u64;
                        }
                    }
                    if lhs != rhs {
                        return Err(format!("condition (c) fails at ({i1},{j1}),({i2},{j2}) for {lam}"));
                    }
                }
            }
        }
    }
    if opts.condition_c_prime {
        for &(i1, j1) in &cells {
            for &(i2, j2) in &cells {
                for s in 0..l.nr() {
                    let mut lhs = 0u64;
                    for b in 0..nb {
                        let c = k.ra(b, i1, i2) as u64;
                        if c == 0 {
                            continue;
                        }
                        for w in 0..ll {
                            lhs += c * l.la(b, j2, w) as u64 * l.ra(s, j1, w) as u64;
                        }
                    }
                    let mut rhs = 0u64;
                    for k1 in 0..n {
                        for k2 in 0..n {
                            rhs += v.at(i1, j1, k1) as u64 * v.at(i2, j2, k2) as u64 * m.ra(s, k1, k2) as u64;
                        }
                    }
                    if lhs != rhs {
                        return Err(format!("condition (c') fails at ({i1},{j1}),({i2},{j2}) for {s}"));
                    }
                }
            }
        }
    }
    if opts.final_check && !final_check(k, l, m, v) {
        return Err("linearity or balance fails".into());
    }
    Ok(())
}

/// `K . L` for every composable catalog pair: key `(A, B, C)` maps to
/// `table[k][l]`, the sorted indices of compatible `M` over `(A, C)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProductTable {
    pub bimodule: BTreeMap<(String, String, String), Vec<Vec<Vec<usize>>>>,
    /// Key `(A, B)`: right `A`-module times `(A, B)`-bimodule, giving right
    /// `B`-modules.
    pub module: BTreeMap<(String, String), Vec<Vec<Vec<usize>>>>,
}

impl ProductTable {
    pub fn product(&self, a: &str, b: &str, c: &str, k: usize, l: usize) -> Option<&[usize]> {
        self.bimodule
            .get(&(a.to_string(), b.to_string(), c.to_string()))
            .and_then(|t| t.get(k))
            .and_then(|r| r.get(l))
            .map(|v| v.as_slice())
    }

    pub fn module_product(&self, a: &str, b: &str, k: usize, l: usize) -> Option<&[usize]> {
        self.module
            .get(&(a.to_string(), b.to_string()))
            .and_then(|t| t.get(k))
            .and_then(|r| r.get(l))
            .map(|v| v.as_slice())
    }

    /// `M in K.L` iff `dual(M) in dual(L).dual(K)`, for every bimodule
    /// entry.
    pub fn is_duality_consistent(&self, cat: &Catalog) -> bool {
        for ((a, b, c), table) in &self.bimodule {
            let Some(rev) = self.bimodule.get(&(c.clone(), b.clone(), a.clone())) else {
                return false;
            };
            for (k, row) in table.iter().enumerate() {
                let dk = cat.dual_index(a, b, k).expect("dual-closed catalog");
                for (l, prods) in row.iter().enumerate() {
                    let dl = cat.dual_index(b, c, l).expect("dual-closed catalog");
                    let mut want: Vec<usize> = prods.iter().map(|&m| cat.dual_index(a, c, m).expect("dual-closed catalog")).collect();
                    want.sort_unstable();
                    if rev[dl][dk] != want {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// The set `K . L` of compatible `M` over `(a, c)`.
pub fn compatible_products(cat: &Catalog, a: &str, b: &str, c: &str, k: usize, l: usize) -> Vec<usize> {
    let ko = Operand::of_bimodule(&cat.bimodules(a, b)[k]);
    let lo = Operand::of_bimodule(&cat.bimodules(b, c)[l]);
    cat.bimodules(a, c)
        .iter()
        .enumerate()
        .filter(|(_, m)| !search_maps(&ko, &lo, &Operand::of_bimodule(m), MapOptions::BIMODULE, 1).is_empty())
        .map(|(i, _)| i)
        .collect()
}

/// Right `B`-modules compatible with right `A`-module `k` times
/// `(A, B)`-bimodule `l`.
pub fn module_products(cat: &Catalog, a: &str, b: &str, k: usize, l: usize, opts: MapOptions) -> Vec<usize> {
    let ko = Operand::of_right_module(&cat.modules(a, Side::Right)[k]);
    let lo = Operand::of_bimodule(&cat.bimodules(a, b)[l]);
    cat.modules(b, Side::Right)
        .iter()
        .enumerate()
        .filter(|(_, m)| !search_maps(&ko, &lo, &Operand::of_right_module(m), opts, 1).is_empty())
        .map(|(i, _)| i)
        .collect()
}

/// Product table for one ring triple.
pub fn bimodule_table(cat: &Catalog, a: &str, b: &str, c: &str) -> Vec<Vec<Vec<usize>>> {
    let nk = cat.bimodules(a, b).len();
    let nl = cat.bimodules(b, c).len();
    let cells: Vec<(usize, usize)> = (0..nk).flat_map(|k| (0..nl).map(move |l| (k, l))).collect();
    let flat: Vec<Vec<usize>> = cells.par_iter().map(|&(k, l)| compatible_products(cat, a, b, c, k, l)).collect();
    (0..nk).map(|k| flat[k * nl..(k + 1) * nl].to_vec()).collect()
}

/// Module product table for one ring pair.
pub fn module_table(cat: &Catalog, a: &str, b: &str, opts: MapOptions) -> Vec<Vec<Vec<usize>>> {
    let nk = cat.modules(a, Side::Right).len();
    let nl = cat.bimodules(a, b).len();
    let cells: Vec<(usize, usize)> = (0..nk).flat_map(|k| (0..nl).map(move |l| (k, l))).collect();
    let flat: Vec<Vec<usize>> = cells.par_iter().map(|&(k, l)| module_products(cat, a, b, k, l, opts)).collect();
    (0..nk).map(|k| flat[k * nl..(k + 1) * nl].to_vec()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bimodule::identity_bimodule;
    use crate::fusionring::builtin::builtin_ring;
    use crate::fusionring::FusionRing;
    use std::sync::Arc;

    fn ring(name: &str) -> Arc<FusionRing> {
        Arc::new(builtin_ring(name).unwrap())
    }

    #[test]
    fn trivial_triple_has_unique_map() {
        let t = identity_bimodule(&ring("Trivial"));
        let maps = multiplication_maps(&t, &t, &t);
        assert_eq!(maps, vec![MultiplicationMap { l: 1, m: 1, n: 1, v: vec![1] }]);
    }

    #[test]
    fn identity_triple_carries_ring_multiplication() {
        let r = ring("AH1");
        let id = identity_bimodule(&r);
        let n = r.rank();
        let regular = MultiplicationMap {
            l: n,
            m: n,
            n,
            v: (0..n * n * n).map(|x| r.n(x / (n * n), (x / n) % n, x % n)).collect(),
        };
        let o = Operand::of_bimodule(&id);
        validate_map(&o, &o, &o, MapOptions::BIMODULE, &regular).unwrap();
        assert!(is_compatible(&id, &id, &id));
    }

    #[test]
    fn z2_products() {
        let z2 = ring("Z2");
        let cat = Catalog::build(&[z2]);
        let id = (0..2).find(|&i| cat.bimodules("Z2", "Z2")[i].rank() == 2).unwrap();
        for k in 0..2 {
            assert_eq!(compatible_products(&cat, "Z2", "Z2", "Z2", id, k), vec![k]);
        }
        let rank1 = (0..2).find(|&i| cat.modules("Z2", Side::Right)[i].rank() == 1).unwrap();
        assert_eq!(module_products(&cat, "Z2", "Z2", rank1, id, MapOptions::MODULE), vec![rank1]);
    }
}
