//! Subfactor census: invertible-action orbits of generating simples in the
//! realized bimodule categories, plus principal and dual graphs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

use crate::bimodule::{bimodule_iso, dual_bimodule, FusionBimodule};
use crate::exactnum::{surd_sum_eq, QuadExt, Surd, SurdSum};
use crate::fusionring::FusionRing;
use crate::groupoid::{FactBase, Status, Subject, World};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SubfactorError {
    #[error("{ring} basis element {element} does not act on {bimodule} as a permutation")]
    NotPermutation {
        bimodule: String,
        ring: String,
        element: usize,
    },
    #[error("facts are not at a fixpoint: {0} is {1}")]
    NotFixpoint(String, Status),
    #[error("no dual partner found for {0}")]
    NoDual(String),
    #[error("graph for {0}: {1}")]
    Graph(String, String),
}

/// Basis elements of dimension one.
pub fn invertible_elements(r: &FusionRing) -> Vec<usize> {
    r.invertibles()
}

fn act_permutation(b: &FusionBimodule, left: bool, a: usize) -> Option<Vec<usize>> {
    let m = b.rank();
    let mut perm = vec![0; m];
    let mut hit = vec![false; m];
    for s in 0..m {
        let row: Vec<u32> = (0..m).map(|t| if left { b.l(a, s, t) } else { b.r(a, s, t) }).collect();
        if row.iter().sum::<u32>() != 1 {
            return None;
        }
        let t = row.iter().position(|&x| x == 1)?;
        if hit[t] {
            return None;
        }
        hit[t] = true;
        perm[s] = t;
    }
    Some(perm)
}

/// Orbits of the basis under `t -> a t b` for invertible `a`, `b`, each
/// sorted, listed by smallest member.
pub fn orbits(b: &FusionBimodule) -> Result<Vec<Vec<usize>>, SubfactorError> {
    let mut perms = Vec::new();
    for (left, ring) in [(true, b.left_ring()), (false, b.right_ring())] {
        for a in invertible_elements(ring) {
            perms.push(act_permutation(b, left, a).ok_or_else(|| SubfactorError::NotPermutation {
                bimodule: format!("{}-{} bimodule", b.left_ring().name(), b.right_ring().name()),
                ring: ring.name().to_string(),
                element: a,
            })?);
        }
    }
    let m = b.rank();
    let mut seen = vec![false; m];
    let mut out = Vec::new();
    for s in 0..m {
        if seen[s] {
            continue;
        }
        let mut orbit = vec![s];
        seen[s] = true;
        let mut i = 0;
        while i < orbit.len() {
            let x = orbit[i];
            for p in &perms {
                if !seen[p[x]] {
                    seen[p[x]] = true;
                    orbit.push(p[x]);
                }
            }
            i += 1;
        }
        orbit.sort_unstable();
        out.push(orbit);
    }
    Ok(out)
}

/// Basis elements whose squared dimension is neither 1 nor 2.
pub fn generating_simples(b: &FusionBimodule) -> Vec<usize> {
    let f = b.left_ring().field();
    let (one, two) = (QuadExt::one(f), QuadExt::from_int(2, f));
    (0..b.rank()).filter(|&t| b.dim2()[t] != one && b.dim2()[t] != two).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub label: String,
    pub weight2: QuadExt,
}

/// Bipartite multiplicity graph; `adjacency[e][o]` counts edges between
/// even vertex `e` and odd vertex `o`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteGraph {
    pub even: Vec<Vertex>,
    pub odd: Vec<Vertex>,
    pub adjacency: Vec<Vec<u32>>,
}

impl BipartiteGraph {
    /// Exact check of `A w_odd = lambda w_even` and `A^T w_even = lambda
    /// w_odd` with `lambda^2 = index2`.
    pub fn check_eigen(&self, index2: &QuadExt) -> Result<(), String> {
        let lambda = Surd::sqrt_of(index2);
        let w = |v: &Vertex| Surd::sqrt_of(&v.weight2);
        for (e, ev) in self.even.iter().enumerate() {
            let mut lhs = SurdSum::new();
            for (o, ov) in self.odd.iter().enumerate() {
                lhs.add_surd(&QuadExt::from_int(self.adjacency[e][o] as i64, index2.field()), &w(ov));
            }
            if !surd_sum_eq(&lhs, &SurdSum::from(&lambda.mul(&w(ev)))) {
                return Err(format!("even vertex {} fails the eigenvalue relation", ev.label));
            }
        }
        for (o, ov) in self.odd.iter().enumerate() {
            let mut lhs = SurdSum::new();
            for (e, ev) in self.even.iter().enumerate() {
                lhs.add_surd(&QuadExt::from_int(self.adjacency[e][o] as i64, index2.field()), &w(ev));
            }
            if !surd_sum_eq(&lhs, &SurdSum::from(&lambda.mul(&w(ov)))) {
                return Err(format!("odd vertex {} fails the eigenvalue relation", ov.label));
            }
        }
        Ok(())
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "graph \"{name}\" {{");
        for (i, v) in self.even.iter().enumerate() {
            let _ = writeln!(s, "  e{i} [label=\"{}\", shape=circle]; // weight2 = {}", v.label, v.weight2);
        }
        for (i, v) in self.odd.iter().enumerate() {
            let _ = writeln!(s, "  o{i} [label=\"{}\", shape=box]; // weight2 = {}", v.label, v.weight2);
        }
        for (e, row) in self.adjacency.iter().enumerate() {
            for (o, &k) in row.iter().enumerate() {
                for _ in 0..k {
                    let _ = writeln!(s, "  e{e} -- o{o};");
                }
            }
        }
        s.push_str("}\n");
        s
    }
}

/// Graph on `even x odd` with `adj(e, o)`, restricted to the component of
/// odd vertex `t`.
fn component_graph(ring: &FusionRing, b: &FusionBimodule, t: usize, adj: impl Fn(usize, usize) -> u32) -> BipartiteGraph {
    let (n, m) = (ring.rank(), b.rank());
    let mut even = BTreeSet::new();
    let mut odd = BTreeSet::from([t]);
    let mut frontier = vec![(false, t)];
    while let Some((is_even, v)) = frontier.pop() {
        if is_even {
            for o in 0..m {
                if adj(v, o) > 0 && odd.insert(o) {
                    frontier.push((false, o));
                }
            }
        } else {
            for e in 0..n {
                if adj(e, v) > 0 && even.insert(e) {
                    frontier.push((true, e));
                }
            }
        }
    }
    let even: Vec<usize> = even.into_iter().collect();
    let odd: Vec<usize> = odd.into_iter().collect();
    BipartiteGraph {
        even: even
            .iter()
            .map(|&e| Vertex {
                label: ring.label(e).to_string(),
                weight2: ring.fp_dim2()[e].clone(),
            })
            .collect(),
        odd: odd
            .iter()
            .map(|&o| Vertex {
                label: o.to_string(),
                weight2: b.dim2()[o].clone(),
            })
            .collect(),
        adjacency: even.iter().map(|&e| odd.iter().map(|&o| adj(e, o)).collect()).collect(),
    }
}

/// Principal graph from the left action on `t` and dual graph from the
/// right action, each checked exactly against `index2 = dim2(t)`.
pub fn principal_graphs(b: &FusionBimodule, t: usize) -> Result<(BipartiteGraph, BipartiteGraph), String> {
    let p = component_graph(b.left_ring(), b, t, |x, o| b.l(x, t, o));
    let d = component_graph(b.right_ring(), b, t, |y, o| b.r(y, t, o));
    let index2 = &b.dim2()[t];
    p.check_eigen(index2).map_err(|e| format!("principal graph: {e}"))?;
    d.check_eigen(index2).map_err(|e| format!("dual graph: {e}"))?;
    Ok((p, d))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubfactorRecord {
    pub bimodule: Subject,
    pub orbit_rep: usize,
    pub orbit: Vec<usize>,
    pub index2: QuadExt,
    pub principal: BipartiteGraph,
    pub dual: BipartiteGraph,
}

impl SubfactorRecord {
    /// `<pair> <bimodule-id> <orbitRep> <index2> <evenCount>x<oddCount>`.
    pub fn line(&self) -> String {
        let Subject::Bimodule(a, b, _) = &self.bimodule else { unreachable!() };
        format!(
            "{a}-{b} {} {} {} {}x{}",
            self.bimodule,
            self.orbit_rep,
            self.index2,
            self.principal.even.len(),
            self.principal.odd.len()
        )
    }
}

#[derive(Clone, Debug)]
pub struct Census {
    pub records: Vec<SubfactorRecord>,
    /// `partner[i]` = index of the record dual to record `i`.
    pub partner: Vec<usize>,
    pub total: usize,
    pub up_to_duality: usize,
    pub self_dual: usize,
    pub per_pair: BTreeMap<(String, String), usize>,
}

/// Counts subfactors over the realized bimodule categories. Requires every
/// bimodule status to be resolved.
pub fn count_subfactors(world: &World, facts: &FactBase) -> Result<Census, SubfactorError> {
    let mut realized = Vec::new();
    for s in world.bimodules() {
        match facts.get(&s) {
            Status::RealizedUniquely => realized.push(s),
            Status::NotRealized => {}
            st => return Err(SubfactorError::NotFixpoint(s.to_string(), st)),
        }
    }
    let cat = world.catalog();
    let entry = |s: &Subject| -> &FusionBimodule {
        let Subject::Bimodule(a, b, i) = s else { unreachable!() };
        &cat.bimodules(a, b)[*i]
    };
    let per_entry: Vec<Result<Vec<SubfactorRecord>, SubfactorError>> = realized
        .par_iter()
        .map(|s| {
            let b = entry(s);
            let gens: BTreeSet<usize> = generating_simples(b).into_iter().collect();
            let mut recs = Vec::new();
            for orbit in orbits(b)? {
                let rep = orbit[0];
                if !gens.contains(&rep) {
                    continue;
                }
                let (principal, dual) = principal_graphs(b, rep).map_err(|e| SubfactorError::Graph(format!("{s} object {rep}"), e))?;
                recs.push(SubfactorRecord {
                    bimodule: s.clone(),
                    orbit_rep: rep,
                    orbit,
                    index2: b.dim2()[rep].clone(),
                    principal,
                    dual,
                });
            }
            Ok(recs)
        })
        .collect();
    let mut records = Vec::new();
    for r in per_entry {
        records.extend(r?);
    }
    let position: BTreeMap<(Subject, usize), usize> = records
        .iter()
        .enumerate()
        .flat_map(|(i, r)| r.orbit.iter().map(move |&t| ((r.bimodule.clone(), t), i)))
        .collect();
    let mut sigma_cache: BTreeMap<Subject, Vec<usize>> = BTreeMap::new();
    let mut partner = Vec::with_capacity(records.len());
    for r in &records {
        let d = world.dual(&r.bimodule);
        let sigma = match sigma_cache.get(&r.bimodule) {
            Some(s) => s.clone(),
            None => {
                let s = bimodule_iso(&dual_bimodule(entry(&r.bimodule)), entry(&d))
                    .ok_or_else(|| SubfactorError::NoDual(r.bimodule.to_string()))?;
                sigma_cache.insert(r.bimodule.clone(), s.clone());
                s
            }
        };
        let p = *position
            .get(&(d, sigma[r.orbit_rep]))
            .ok_or_else(|| SubfactorError::NoDual(format!("{} object {}", r.bimodule, r.orbit_rep)))?;
        partner.push(p);
    }
    for (i, &p) in partner.iter().enumerate() {
        if partner[p] != i {
            return Err(SubfactorError::NoDual(format!("duality is not an involution at record {i}")));
        }
    }
    let total = records.len();
    let self_dual = partner.iter().enumerate().filter(|(i, p)| i == *p).count();
    let mut per_pair = BTreeMap::new();
    for r in &records {
        let Subject::Bimodule(a, b, _) = &r.bimodule else { unreachable!() };
        *per_pair.entry((a.clone(), b.clone())).or_insert(0) += 1;
    }
    Ok(Census {
        records,
        partner,
        total,
        up_to_duality: (total + self_dual) / 2,
        self_dual,
        per_pair,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bimodule::identity_bimodule;
    use crate::fusionring::builtin::builtin_ring;
    use std::sync::Arc;

    #[test]
    fn identity_orbits_and_generators() {
        let r = Arc::new(builtin_ring("AH1").unwrap());
        let id = identity_bimodule(&r);
        assert_eq!(orbits(&id).unwrap().len(), 6);
        assert_eq!(generating_simples(&id).len(), 5);
        assert_eq!(invertible_elements(&r), vec![0]);

        let r2 = Arc::new(builtin_ring("AH2").unwrap());
        let id2 = identity_bimodule(&r2);
        let o = orbits(&id2).unwrap();
        assert_eq!(o.iter().map(|x| x.len()).sum::<usize>(), 9);
        assert_eq!(invertible_elements(&r2).len(), 2);
    }

    #[test]
    fn identity_graph_is_fusion_graph() {
        let r = Arc::new(builtin_ring("AH1").unwrap());
        let id = identity_bimodule(&r);
        for t in 1..r.rank() {
            let (p, d) = principal_graphs(&id, t).unwrap();
            for (e, v) in p.even.iter().enumerate() {
                let x = r.index_of(&v.label).unwrap();
                for (o, w) in p.odd.iter().enumerate() {
                    let y: usize = w.label.parse().unwrap();
                    assert_eq!(p.adjacency[e][o], r.n(x, t, y));
                }
            }
            assert_eq!(d.even.len(), p.even.len());
        }
    }
}
