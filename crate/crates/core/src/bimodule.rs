//! Admissible fusion bimodules over pairs of fusion rings.
//!
//! `lact[a][s][t] = (a u_s, u_t)` and `ract[b][s][t] = (u_s b, u_t)`.

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::exactnum::QuadExt;
use crate::fusionring::FusionRing;
use crate::nimrep::{self, canonical_order, module_iso, FusionModule, ModuleError, Side};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BimoduleError {
    #[error("action tensors have the wrong size")]
    Shape,
    #[error("left part: {0}")]
    Left(ModuleError),
    #[error("right part: {0}")]
    Right(ModuleError),
    #[error("left action of {0} does not commute with right action of {1}")]
    Commutation(usize, usize),
    #[error("bimodule admissibility fails for basis pair ({0},{1})")]
    Admissibility(usize, usize),
    #[error("restriction to the {0} action is disconnected")]
    DisconnectedRestriction(Side),
    #[error("restriction is not in the module catalog")]
    NotInCatalog,
}

#[derive(Clone, Debug)]
pub struct FusionBimodule {
    left_ring: Arc<FusionRing>,
    right_ring: Arc<FusionRing>,
    rank: usize,
    lact: Vec<u32>,
    ract: Vec<u32>,
    dim2: Vec<QuadExt>,
}

impl PartialEq for FusionBimodule {
    fn eq(&self, o: &Self) -> bool {
        self.left_ring.name() == o.left_ring.name()
            && self.right_ring.name() == o.right_ring.name()
            && self.rank == o.rank
            && self.lact == o.lact
            && self.ract == o.ract
            && self.dim2 == o.dim2
    }
}

impl Eq for FusionBimodule {}

impl FusionBimodule {
    pub fn from_parts(
        left_ring: Arc<FusionRing>,
        right_ring: Arc<FusionRing>,
        rank: usize,
        lact: Vec<u32>,
        ract: Vec<u32>,
        dim2: Vec<QuadExt>,
    ) -> Self {
        FusionBimodule {
            left_ring,
            right_ring,
            rank,
            lact,
            ract,
            dim2,
        }
    }

    pub fn left_ring(&self) -> &Arc<FusionRing> {
        &self.left_ring
    }

    pub fn right_ring(&self) -> &Arc<FusionRing> {
        &self.right_ring
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn lact(&self) -> &[u32] {
        &self.lact
    }

    pub fn ract(&self) -> &[u32] {
        &self.ract
    }

    pub fn dim2(&self) -> &[QuadExt] {
        &self.dim2
    }

    #[inline]
    pub fn l(&self, a: usize, s: usize, t: usize) -> u32 {
        self.lact[(a * self.rank + s) * self.rank + t]
    }

    #[inline]
    pub fn r(&self, b: usize, s: usize, t: usize) -> u32 {
        self.ract[(b * self.rank + s) * self.rank + t]
    }

    /// `u_s u_s^bar` in the left ring.
    pub fn left_end(&self, s: usize) -> Vec<u32> {
        (0..self.left_ring.rank()).map(|a| self.l(a, s, s)).collect()
    }

    /// `u_s^bar u_s` in the right ring.
    pub fn right_end(&self, s: usize) -> Vec<u32> {
        (0..self.right_ring.rank()).map(|b| self.r(b, s, s)).collect()
    }

    /// Squared global dimension of the bimodule, `sum dim2`.
    pub fn total_dim2(&self) -> QuadExt {
        self.dim2.iter().fold(QuadExt::zero(self.left_ring.field()), |a, b| &a + b)
    }

    /// Position `p` of the result holds old basis element `perm[p]`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        let m = self.rank;
        let re = |t: &[u32], blocks: usize| {
            let mut out = vec![0u32; blocks * m * m];
            for i in 0..blocks {
                for p in 0..m {
                    for q in 0..m {
                        out[(i * m + p) * m + q] = t[(i * m + perm[p]) * m + perm[q]];
                    }
                }
            }
            out
        };
        FusionBimodule {
            left_ring: self.left_ring.clone(),
            right_ring: self.right_ring.clone(),
            rank: m,
            lact: re(&self.lact, self.left_ring.rank()),
            ract: re(&self.ract, self.right_ring.rank()),
            dim2: perm.iter().map(|&p| self.dim2[p].clone()).collect(),
        }
    }

    pub fn left_module(&self) -> FusionModule {
        FusionModule::from_parts(self.left_ring.clone(), Side::Left, self.rank, self.lact.clone(), self.dim2.clone())
    }

    pub fn right_module(&self) -> FusionModule {
        FusionModule::from_parts(self.right_ring.clone(), Side::Right, self.rank, self.ract.clone(), self.dim2.clone())
    }

    pub fn sort_key(&self) -> (usize, Vec<QuadExt>, Vec<u32>, Vec<u32>) {
        (self.rank, self.dim2.clone(), self.lact.clone(), self.ract.clone())
    }
}

/// Basis = ring basis, both actions regular.
pub fn identity_bimodule(ring: &Arc<FusionRing>) -> FusionBimodule {
    let n = ring.rank();
    let mut lact = vec![0u32; n * n * n];
    let mut ract = vec![0u32; n * n * n];
    for i in 0..n {
        for s in 0..n {
            for t in 0..n {
                lact[(i * n + s) * n + t] = ring.n(i, s, t);
                ract[(i * n + s) * n + t] = ring.n(s, i, t);
            }
        }
    }
    FusionBimodule {
        left_ring: ring.clone(),
        right_ring: ring.clone(),
        rank: n,
        lact,
        ract,
        dim2: ring.fp_dim2().to_vec(),
    }
}

/// The opposite bimodule over the swapped pair. The new left action of
/// `eta` is the old right action of `eta^bar`, the new right action of
/// `xi` the old left action of `xi^bar`.
pub fn dual_bimodule(b: &FusionBimodule) -> FusionBimodule {
    let m = b.rank;
    let swap = |ring: &FusionRing, get: &dyn Fn(usize, usize, usize) -> u32| {
        let n = ring.rank();
        let mut out = vec![0u32; n * m * m];
        for i in 0..n {
            for s in 0..m {
                for t in 0..m {
                    out[(i * m + s) * m + t] = get(ring.dual(i), s, t);
                }
            }
        }
        out
    };
    FusionBimodule {
        left_ring: b.right_ring.clone(),
        right_ring: b.left_ring.clone(),
        rank: m,
        lact: swap(&b.right_ring, &|i, s, t| b.r(i, s, t)),
        ract: swap(&b.left_ring, &|i, s, t| b.l(i, s, t)),
        dim2: b.dim2.clone(),
    }
}

/// Canonical representative under basis relabelling.
pub fn canonical_bimodule(b: &FusionBimodule) -> FusionBimodule {
    let colors: Vec<(QuadExt, Vec<u32>, Vec<u32>)> = (0..b.rank)
        .map(|s| (b.dim2[s].clone(), b.left_end(s), b.right_end(s)))
        .collect();
    let (nl, nr) = (b.left_ring.rank(), b.right_ring.rank());
    let pair: Vec<Vec<Vec<u32>>> = (0..b.rank)
        .map(|s| {
            (0..b.rank)
                .map(|t| (0..nl).map(|a| b.l(a, s, t)).chain((0..nr).map(|c| b.r(c, s, t))).collect())
                .collect()
        })
        .collect();
    b.relabel(&canonical_order(&colors, &pair))
}

/// `(mu nu^bar, mu nu^bar) = (mu^bar mu, nu^bar nu)` and
/// `(mu^bar nu, mu^bar nu) = (mu mu^bar, nu nu^bar)`.
fn admissible_pair(b: &FusionBimodule, mu: usize, nu: usize) -> bool {
    let (nl, nr) = (b.left_ring.rank(), b.right_ring.rank());
    let lhs1: u64 = (0..nl).map(|x| (b.l(x, nu, mu) as u64).pow(2)).sum();
    let rhs1: u64 = (0..nr).map(|y| b.r(y, mu, mu) as u64 * b.r(y, nu, nu) as u64).sum();
    let lhs2: u64 = (0..nr).map(|y| (b.r(y, mu, nu) as u64).pow(2)).sum();
    let rhs2: u64 = (0..nl).map(|x| b.l(x, mu, mu) as u64 * b.l(x, nu, nu) as u64).sum();
    lhs1 == rhs1 && lhs2 == rhs2
}

/// Re-checks every bimodule axiom.
pub fn validate_bimodule(b: &FusionBimodule) -> Result<(), BimoduleError> {
    let (nl, nr, m) = (b.left_ring.rank(), b.right_ring.rank(), b.rank);
    if b.lact.len() != nl * m * m || b.ract.len() != nr * m * m || b.dim2.len() != m {
        return Err(BimoduleError::Shape);
    }
    nimrep::validate_module(&b.left_module()).map_err(BimoduleError::Left)?;
    nimrep::validate_module(&b.right_module()).map_err(BimoduleError::Right)?;
    for x in 0..nl {
        for y in 0..nr {
            for s in 0..m {
                for w in 0..m {
                    let lr: u64 = (0..m).map(|t| b.l(x, s, t) as u64 * b.r(y, t, w) as u64).sum();
                    let rl: u64 = (0..m).map(|t| b.r(y, s, t) as u64 * b.l(x, t, w) as u64).sum();
                    if lr != rl {
                        return Err(BimoduleError::Commutation(x, y));
                    }
                }
            }
        }
    }
    for mu in 0..m {
        for nu in 0..m {
            if !admissible_pair(b, mu, nu) {
                return Err(BimoduleError::Admissibility(mu, nu));
            }
        }
    }
    Ok(())
}

/// Searches dimension-preserving identifications of the right module's
/// basis with the left module's basis.
struct Identify<'a> {
    left: &'a FusionModule,
    right: &'a FusionModule,
    nl: usize,
    nr: usize,
    m: usize,
    // commutation entries (x, s, w) that become checkable once position p
    // is assigned
    checks: Vec<Vec<(usize, usize, usize)>>,
    sigma: Vec<usize>,
    used: Vec<bool>,
    found: Vec<Vec<usize>>,
}

impl Identify<'_> {
    fn rv(&self, y: usize, s: usize, t: usize) -> u32 {
        self.right.act(y, self.sigma[s], self.sigma[t])
    }

    fn pair_ok(&self, mu: usize, nu: usize) -> bool {
        let (l, nl, nr) = (self.left, self.nl, self.nr);
        let lhs1: u64 = (0..nl).map(|x| (l.act(x, nu, mu) as u64).pow(2)).sum();
        let rhs1: u64 = (0..nr).map(|y| self.rv(y, mu, mu) as u64 * self.rv(y, nu, nu) as u64).sum();
        let lhs2: u64 = (0..nr).map(|y| (self.rv(y, mu, nu) as u64).pow(2)).sum();
        let rhs2: u64 = (0..nl).map(|x| l.act(x, mu, mu) as u64 * l.act(x, nu, nu) as u64).sum();
        lhs1 == rhs1 && lhs2 == rhs2
    }

    fn rec(&mut self, p: usize) {
        if p == self.m {
            self.found.push(self.sigma.clone());
            return;
        }
        for t in 0..self.m {
            if self.used[t] || self.left.dim2()[p] != self.right.dim2()[t] {
                continue;
            }
            self.sigma[p] = t;
            if !(0..=p).all(|q| self.pair_ok(p, q) && self.pair_ok(q, p)) {
                continue;
            }
            let m = self.m;
            let ok = self.checks[p].iter().all(|&(x, s, w)| {
                (0..self.nr).all(|y| {
                    let mut lr = 0u32;
                    let mut rl = 0u32;
                    for u in 0..m {
                        let a = self.left.act(x, s, u);
                        if a > 0 {
                            lr += a * self.rv(y, u, w);
                        }
                        let b = self.left.act(x, u, w);
                        if b > 0 {
                            rl += self.rv(y, s, u) * b;
                        }
                    }
                    lr == rl
                })
            });
            if ok {
                self.used[t] = true;
                self.rec(p + 1);
                self.used[t] = false;
            }
        }
        self.sigma[p] = usize::MAX;
    }
}

fn identifications(left: &FusionModule, right: &FusionModule) -> Vec<Vec<usize>> {
    let m = left.rank();
    let nl = left.ring().rank();
    let mut checks = vec![Vec::new(); m];
    for x in 0..nl {
        for s in 0..m {
            for w in 0..m {
                let mut need = s.max(w);
                for u in 0..m {
                    if left.act(x, s, u) > 0 || left.act(x, u, w) > 0 {
                        need = need.max(u);
                    }
                }
                checks[need].push((x, s, w));
            }
        }
    }
    let mut id = Identify {
        left,
        right,
        nl,
        nr: right.ring().rank(),
        m,
        checks,
        sigma: vec![usize::MAX; m],
        used: vec![false; m],
        found: Vec::new(),
    };
    id.rec(0);
    id.found
}

/// All admissible bimodules over `(left_ring, right_ring)` built from the
/// given catalogs of left modules over the left ring and right modules over
/// the right ring, up to isomorphism, in canonical order. Rings over
/// different quadratic fields have no common bimodules here.
pub fn enumerate_fusion_bimodules(left_modules: &[FusionModule], right_modules: &[FusionModule]) -> Vec<FusionBimodule> {
    let mut tasks = Vec::new();
    for l in left_modules {
        for r in right_modules {
            if l.ring().field() == r.ring().field() && l.rank() == r.rank() && l.dim2() == r.dim2() {
                tasks.push((l, r));
            }
        }
    }
    let raw: Vec<FusionBimodule> = tasks
        .into_par_iter()
        .flat_map_iter(|(l, r)| {
            identifications(l, r).into_iter().map(move |sigma| {
                let rr = r.relabel(&sigma);
                FusionBimodule {
                    left_ring: l.ring().clone(),
                    right_ring: r.ring().clone(),
                    rank: l.rank(),
                    lact: l.action().to_vec(),
                    ract: rr.action().to_vec(),
                    dim2: l.dim2().to_vec(),
                }
            })
        })
        .collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for b in raw {
        debug_assert!(validate_bimodule(&b).is_ok());
        let c = canonical_bimodule(&b);
        if seen.insert((c.lact.clone(), c.ract.clone())) {
            out.push(c);
        }
    }
    out.sort_by_key(|b| b.sort_key());
    out
}

/// An isomorphism `a -> b` as a basis map `s -> sigma[s]`, by direct
/// backtracking over dimension-preserving bijections.
pub fn bimodule_iso(a: &FusionBimodule, b: &FusionBimodule) -> Option<Vec<usize>> {
    if a.rank() != b.rank() || a.left_ring().name() != b.left_ring().name() || a.right_ring().name() != b.right_ring().name() {
        return None;
    }
    let m = a.rank();
    let (nl, nr) = (a.left_ring().rank(), a.right_ring().rank());
    fn rec(a: &FusionBimodule, b: &FusionBimodule, nl: usize, nr: usize, s: usize, sigma: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        if s == a.rank() {
            return true;
        }
        for t in 0..a.rank() {
            if used[t] || a.dim2()[s] != b.dim2()[t] {
                continue;
            }
            sigma[s] = t;
            let ok = (0..=s).all(|w| {
                (0..nl).all(|x| a.l(x, s, w) == b.l(x, t, sigma[w]) && a.l(x, w, s) == b.l(x, sigma[w], t))
                    && (0..nr).all(|y| a.r(y, s, w) == b.r(y, t, sigma[w]) && a.r(y, w, s) == b.r(y, sigma[w], t))
            });
            if ok {
                used[t] = true;
                if rec(a, b, nl, nr, s + 1, sigma, used) {
                    return true;
                }
                used[t] = false;
            }
        }
        false
    }
    let mut sigma = vec![0; m];
    rec(a, b, nl, nr, 0, &mut sigma, &mut vec![false; m]).then_some(sigma)
}

/// Module and bimodule catalogs for a family of rings, with stable
/// identifiers `<left>-<right>-<index>` and `<ring>-<side>-<index>`.
#[derive(Clone, Debug)]
pub struct Catalog {
    rings: Vec<Arc<FusionRing>>,
    left: BTreeMap<String, Vec<FusionModule>>,
    right: BTreeMap<String, Vec<FusionModule>>,
    bimodules: BTreeMap<(String, String), Vec<FusionBimodule>>,
}

impl Catalog {
    pub fn build(rings: &[Arc<FusionRing>]) -> Self {
        let mut left = BTreeMap::new();
        let mut right = BTreeMap::new();
        for r in rings {
            left.insert(r.name().to_string(), nimrep::enumerate_fusion_modules(r, Side::Left));
            right.insert(r.name().to_string(), nimrep::enumerate_fusion_modules(r, Side::Right));
        }
        let mut bimodules = BTreeMap::new();
        for a in rings {
            for b in rings {
                let list = enumerate_fusion_bimodules(&left[a.name()], &right[b.name()]);
                bimodules.insert((a.name().to_string(), b.name().to_string()), list);
            }
        }
        Catalog {
            rings: rings.to_vec(),
            left,
            right,
            bimodules,
        }
    }

    pub fn from_parts(
        rings: Vec<Arc<FusionRing>>,
        left: BTreeMap<String, Vec<FusionModule>>,
        right: BTreeMap<String, Vec<FusionModule>>,
        bimodules: BTreeMap<(String, String), Vec<FusionBimodule>>,
    ) -> Self {
        Catalog {
            rings,
            left,
            right,
            bimodules,
        }
    }

    pub fn rings(&self) -> &[Arc<FusionRing>] {
        &self.rings
    }

    pub fn ring(&self, name: &str) -> Option<&Arc<FusionRing>> {
        self.rings.iter().find(|r| r.name() == name)
    }

    pub fn modules(&self, ring: &str, side: Side) -> &[FusionModule] {
        let map = match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        };
        map.get(ring).map_or(&[], |v| v.as_slice())
    }

    pub fn bimodules(&self, left: &str, right: &str) -> &[FusionBimodule] {
        self.bimodules
            .get(&(left.to_string(), right.to_string()))
            .map_or(&[], |v| v.as_slice())
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&(String, String), &Vec<FusionBimodule>)> {
        self.bimodules.iter()
    }

    pub fn bimodule_id(left: &str, right: &str, index: usize) -> String {
        format!("{left}-{right}-{index}")
    }

    pub fn module_id(ring: &str, side: Side, index: usize) -> String {
        format!("{ring}-{side}-{index}")
    }

    /// Catalog index of a bimodule's isomorphism class.
    pub fn find_bimodule(&self, b: &FusionBimodule) -> Option<usize> {
        let c = canonical_bimodule(b);
        self.bimodules(b.left_ring.name(), b.right_ring.name()).iter().position(|x| *x == c)
    }

    /// Index of the dual of entry `index` in the transposed pair.
    pub fn dual_index(&self, left: &str, right: &str, index: usize) -> Option<usize> {
        let b = self.bimodules(left, right).get(index)?;
        self.find_bimodule(&dual_bimodule(b))
    }

    /// Every entry's dual is present.
    pub fn is_dual_closed(&self) -> bool {
        self.bimodules
            .iter()
            .all(|((l, r), list)| (0..list.len()).all(|i| self.dual_index(l, r, i).is_some()))
    }
}

/// Forgets one action and looks the resulting module up in the catalog.
pub fn restrict(b: &FusionBimodule, side: Side, catalog: &Catalog) -> Result<(FusionModule, usize), BimoduleError> {
    let module = match side {
        Side::Left => b.left_module(),
        Side::Right => b.right_module(),
    };
    if matches!(nimrep::validate_module(&module), Err(ModuleError::Disconnected)) {
        return Err(BimoduleError::DisconnectedRestriction(side));
    }
    let idx = catalog
        .modules(module.ring().name(), side)
        .iter()
        .position(|m| module_iso(&module, m).is_some())
        .ok_or(BimoduleError::NotInCatalog)?;
    Ok((module, idx))
}
