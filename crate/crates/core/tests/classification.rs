//! Deduction, verifier, Brauer-Picard and census properties over the AH
//! fixture.

mod common;

use std::collections::BTreeMap;

use fusionbp::bimodule::{dual_bimodule, identity_bimodule};
use fusionbp::groupoid::{
    ah_assumptions, ah_generators, brauer_picard_group, deduce, seed_facts, DerivationStep, GroupoidError, Rule, SeedReason, Status, Subject,
    Verifier, World,
};
use fusionbp::nimrep::Side;
use fusionbp::report::{replay, run_deduction};
use fusionbp::subfactors::{count_subfactors, generating_simples, orbits, principal_graphs};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bim(a: &str, b: &str, i: usize) -> Subject {
    Subject::Bimodule(a.into(), b.into(), i)
}

#[test]
fn fixpoint_is_independent_of_rule_order() {
    let ah = common::ah();
    for seed in [1, 7, 42, 1234] {
        let (facts, log) = run_deduction(&ah.catalog, &ah.tables, Some(seed)).unwrap();
        assert_eq!(facts, ah.facts, "shuffle seed {seed}");
        assert_eq!(replay(&ah.catalog, &ah.tables, &log).unwrap(), facts);
    }
}

#[test]
fn log_premises_precede_conclusions() {
    let ah = common::ah();
    let mut known: BTreeMap<&Subject, Status> = BTreeMap::new();
    for (i, st) in ah.log.iter().enumerate() {
        // product rules list the concluded entry among the factors
        for p in st.premises.iter().filter(|p| **p != st.subject) {
            assert!(known.contains_key(p), "step {i} cites {p} before it is established");
        }
        if let Some(prev) = known.get(&st.subject) {
            let ok = *prev == Status::Realized && st.status == Status::RealizedUniquely;
            assert!(ok, "step {i} moves {} from {prev} to {}", st.subject, st.status);
        }
        known.insert(&st.subject, st.status);
    }
}

#[test]
fn every_rule_id_is_logged_with_its_kind() {
    let ah = common::ah();
    let mut counts: BTreeMap<Rule, usize> = BTreeMap::new();
    for st in &ah.log {
        *counts.entry(st.rule).or_default() += 1;
        assert_eq!(st.seed.is_some(), st.rule == Rule::Seed);
    }
    for r in [Rule::Seed, Rule::R1, Rule::R3, Rule::R4, Rule::R9, Rule::Restrict] {
        assert!(counts.get(&r).is_some_and(|&n| n > 0), "{} never fires", r.name());
    }
}

#[test]
fn contradictory_seed_is_reported() {
    let ah = common::ah();
    let world = World::new(&ah.catalog, &ah.tables);
    let mut seeds = seed_facts(&world, &ah_generators(), &ah_assumptions()).unwrap();
    let victim = world
        .pair("AH1", "AH1")
        .into_iter()
        .find(|s| ah.facts.get(s) == Status::NotRealized)
        .expect("an unrealized entry");
    seeds.push(DerivationStep {
        rule: Rule::Seed,
        subject: victim.clone(),
        status: Status::Realized,
        premises: Vec::new(),
        seed: Some(SeedReason::Regular),
        note: String::new(),
    });
    match deduce(&world, &seeds, None) {
        Err(GroupoidError::Contradiction { existing, attempted, .. }) => {
            assert_ne!(existing, attempted);
        }
        Err(e) => panic!("unexpected error {e}"),
        Ok(_) => panic!("contradiction not detected"),
    }
}

#[test]
fn verifier_rejects_tampering() {
    let ah = common::ah();
    let asm = ah_assumptions();

    let mut flipped = ah.log.clone();
    let i = flipped.iter().position(|s| s.rule == Rule::R3).unwrap();
    flipped[i].status = match flipped[i].status {
        Status::NotRealized => Status::Realized,
        _ => Status::NotRealized,
    };
    assert!(Verifier::new(&ah.catalog, &ah.tables, &asm).replay(&flipped).is_err());

    let mut reordered = ah.log.clone();
    let late = reordered.iter().rposition(|s| s.rule == Rule::R4).unwrap();
    let step = reordered.remove(late);
    reordered.insert(0, step);
    assert!(Verifier::new(&ah.catalog, &ah.tables, &asm).replay(&reordered).is_err());

    let mut wrong_premise = ah.log.clone();
    let i = wrong_premise.iter().position(|s| s.rule == Rule::R1 && !s.premises.is_empty()).unwrap();
    let p = wrong_premise[i].premises[0].clone();
    wrong_premise[i].premises[0] = match p {
        Subject::Bimodule(a, b, k) => Subject::Bimodule(a.clone(), b.clone(), (k + 1) % ah.catalog.bimodules(&a, &b).len()),
        m => m,
    };
    assert!(Verifier::new(&ah.catalog, &ah.tables, &asm).replay(&wrong_premise).is_err());

    let mut forged_seed = ah.log.clone();
    let i = forged_seed.iter().position(|s| s.rule != Rule::Seed).unwrap();
    forged_seed.insert(
        i,
        DerivationStep {
            rule: Rule::Seed,
            subject: bim("AH2", "AH2", 3),
            status: Status::Realized,
            premises: Vec::new(),
            seed: Some(SeedReason::Identity),
            note: String::new(),
        },
    );
    assert!(Verifier::new(&ah.catalog, &ah.tables, &asm).replay(&forged_seed).is_err());
}

#[test]
fn product_table_facts() {
    let ah = common::ah();
    assert!(ah.tables.is_duality_consistent(&ah.catalog));
    let world = World::new(&ah.catalog, &ah.tables);
    // identity . K = {K} and K . identity = {K}
    for ((a, b), list) in ah.catalog.pairs() {
        let (ia, ib) = (world.identity(a), world.identity(b));
        for k in 0..list.len() {
            let s = bim(a, b, k);
            assert_eq!(world.product(&ia, &s).unwrap(), vec![s.clone()]);
            assert_eq!(world.product(&s, &ib).unwrap(), vec![s.clone()]);
        }
    }
    let sizes: Vec<usize> = ah.tables.bimodule[&("AH2".into(), "AH2".into(), "AH2".into())].iter().flatten().map(|v| v.len()).collect();
    assert!(sizes.contains(&0), "some AH2 product is empty");
    assert!(sizes.contains(&4), "some AH2 product has four members");
    // AH generator times AH+1 generator is a single entry
    let p = world.product(&bim("AH1", "AH1", 11), &bim("AH1", "AH2", 8)).unwrap();
    assert_eq!(p.len(), 1);
}

#[test]
fn identity_bimodules_are_catalog_identities() {
    let ah = common::ah();
    let world = World::new(&ah.catalog, &ah.tables);
    for r in ah.catalog.rings() {
        let Subject::Bimodule(_, _, i) = world.identity(r.name()) else { unreachable!() };
        assert_eq!(ah.catalog.find_bimodule(&identity_bimodule(r)), Some(i));
        assert_eq!(ah.facts.get(&world.identity(r.name())), Status::RealizedUniquely);
    }
}

#[test]
fn realized_sets_are_closed_under_duality() {
    let ah = common::ah();
    let world = World::new(&ah.catalog, &ah.tables);
    for s in world.bimodules() {
        assert_eq!(ah.facts.get(&s), ah.facts.get(&world.dual(&s)), "{s}");
        assert_eq!(world.dual(&world.dual(&s)), s);
    }
    for ((a, b), list) in ah.catalog.pairs() {
        for (i, x) in list.iter().enumerate() {
            let j = ah.catalog.find_bimodule(&dual_bimodule(x)).unwrap();
            assert_eq!(Some(j), ah.catalog.dual_index(a, b, i));
        }
    }
}

#[test]
fn brauer_picard_groups() {
    let ah = common::ah();
    let world = World::new(&ah.catalog, &ah.tables);
    for r in ["AH1", "AH2", "AH3"] {
        let g = brauer_picard_group(&world, &ah.facts, r).unwrap();
        assert_eq!(g.order(), 4, "{r}");
        assert_eq!(g.exponent(), Some(2), "{r}");
        assert!(g.is_abelian());
        assert_eq!(g.structure().as_deref(), Some("Z2 x Z2"));
    }
}

#[test]
fn module_facts() {
    let ah = common::ah();
    let world = World::new(&ah.catalog, &ah.tables);
    for r in ["AH1", "AH2", "AH3"] {
        let (u, _, _, k) = ah.facts.tally(&world.modules(r));
        assert_eq!((u, k), (12, 4), "{r}");
        // the regular module is realized
        let regular = fusionbp::nimrep::FusionModule::regular(ah.catalog.ring(r).unwrap().clone(), Side::Right);
        let i = ah
            .catalog
            .modules(r, Side::Right)
            .iter()
            .position(|m| fusionbp::nimrep::module_iso(m, &regular).is_some())
            .unwrap();
        assert_eq!(ah.facts.get(&Subject::Module(r.into(), i)), Status::RealizedUniquely);
    }
    assert!(ah.tables.module.values().all(|t| !t.is_empty()));
}

#[test]
fn census_structure() {
    let ah = common::ah();
    let world = World::new(&ah.catalog, &ah.tables);
    let c = count_subfactors(&world, &ah.facts).unwrap();
    assert_eq!(c.records.len(), c.total);
    assert_eq!(c.per_pair.values().sum::<usize>(), c.total);
    assert_eq!((c.total + c.self_dual) / 2, c.up_to_duality);
    for ((a, b), n) in &c.per_pair {
        assert_eq!(c.per_pair[&(b.clone(), a.clone())], *n, "{a}-{b}");
    }
    for (i, &j) in c.partner.iter().enumerate() {
        assert_eq!(c.partner[j], i);
        assert_eq!(c.records[i].index2, c.records[j].index2);
    }
    for r in &c.records {
        r.principal.check_eigen(&r.index2).unwrap();
        r.dual.check_eigen(&r.index2).unwrap();
        assert!(r.orbit.contains(&r.orbit_rep));
    }
}

#[test]
fn orbits_are_invariant_under_relabelling() {
    let ah = common::ah();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (_, list) in ah.catalog.pairs() {
        for b in list {
            let before = orbits(b).unwrap();
            let mut perm: Vec<usize> = (0..b.rank()).collect();
            perm.shuffle(&mut rng);
            let relabelled = b.relabel(&perm);
            let mut mapped: Vec<Vec<usize>> = orbits(&relabelled)
                .unwrap()
                .into_iter()
                .map(|o| {
                    let mut v: Vec<usize> = o.into_iter().map(|p| perm[p]).collect();
                    v.sort_unstable();
                    v
                })
                .collect();
            mapped.sort();
            let mut want = before.clone();
            for o in &mut want {
                o.sort_unstable();
            }
            want.sort();
            assert_eq!(mapped, want);
            assert_eq!(generating_simples(&relabelled).len(), generating_simples(b).len());
        }
    }
}

#[test]
fn generator_graphs_over_ah1() {
    let ah = common::ah();
    let b = &ah.catalog.bimodules("AH1", "AH3")[5];
    let t = (0..b.rank()).find(|&t| b.dim2()[t] == fusionbp::exactnum::QuadExt::from_ints(7, 1, 2, 17)).unwrap();
    let (p, d) = principal_graphs(b, t).unwrap();
    assert!(p.even.iter().any(|v| v.label == ah.catalog.ring("AH1").unwrap().label(0)));
    assert!(!d.odd.is_empty());
    let dot = p.to_dot("g");
    assert!(dot.starts_with("graph \"g\" {") && dot.trim_end().ends_with('}'));
}
