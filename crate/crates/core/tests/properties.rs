//! Property tests for arithmetic, canonical forms and status monotonicity.

mod common;

use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use proptest::prelude::*;

use fusionbp::bimodule::{bimodule_iso, canonical_bimodule, dual_bimodule, Catalog};
use fusionbp::exactnum::{surd_sum_eq, QuadExt, Surd, SurdSum};
use fusionbp::fusionring::builtin::builtin_ring;
use fusionbp::gramdecomp::{canonical_columns, gram_decompositions};
use fusionbp::groupoid::{Status, Subject};
use fusionbp::report::run_deduction;
use fusionbp::nimrep::{canonical_module, module_iso, opposite_module, Side};

fn catalog() -> &'static Catalog {
    static CAT: OnceLock<Catalog> = OnceLock::new();
    CAT.get_or_init(|| Catalog::build(&common::ah_rings()))
}

fn small_catalog() -> &'static Catalog {
    static CAT: OnceLock<Catalog> = OnceLock::new();
    CAT.get_or_init(|| {
        let rings: Vec<_> = ["Z2", "Z3", "Fib", "Ising", "Rep(S3)"].iter().map(|n| Arc::new(builtin_ring(n).unwrap())).collect();
        Catalog::build(&rings)
    })
}

fn quad(d: u32) -> impl Strategy<Value = QuadExt> {
    (-40i64..40, -40i64..40, 1i64..12).prop_map(move |(a, b, den)| QuadExt::from_ints(a, b, den, d))
}

fn nonzero(d: u32) -> impl Strategy<Value = QuadExt> {
    quad(d).prop_filter("nonzero", |x| !x.is_zero())
}

fn positive(d: u32) -> impl Strategy<Value = QuadExt> {
    quad(d).prop_filter("positive", |x| x.is_positive())
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<usize>>()).prop_shuffle()
}

fn shadow(x: &QuadExt) -> BigRational {
    common::shadow_quad(x)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn field_laws(x in quad(17), y in quad(17), z in quad(17)) {
        let add = |a: &QuadExt, b: &QuadExt| a.checked_add(b).unwrap();
        let mul = |a: &QuadExt, b: &QuadExt| a.checked_mul(b).unwrap();
        prop_assert_eq!(add(&x, &y), add(&y, &x));
        prop_assert_eq!(mul(&x, &y), mul(&y, &x));
        prop_assert_eq!(add(&add(&x, &y), &z), add(&x, &add(&y, &z)));
        prop_assert_eq!(mul(&mul(&x, &y), &z), mul(&x, &mul(&y, &z)));
        prop_assert_eq!(mul(&x, &add(&y, &z)), add(&mul(&x, &y), &mul(&x, &z)));
        prop_assert_eq!(x.checked_sub(&x).unwrap(), QuadExt::zero(17));
        prop_assert_eq!(mul(&x, &QuadExt::one(17)), x.clone());
        prop_assert_eq!(mul(&x, &y).conj(), mul(&x.conj(), &y.conj()));
        prop_assert_eq!(mul(&x, &y).norm(), x.norm() * y.norm());
    }

    #[test]
    fn division_inverts_multiplication(x in quad(17), y in nonzero(17)) {
        let q = x.checked_div(&y).unwrap();
        prop_assert_eq!(q.checked_mul(&y).unwrap(), x);
    }

    #[test]
    fn division_by_zero_is_an_error(x in quad(5)) {
        prop_assert!(x.checked_div(&QuadExt::zero(5)).is_err());
    }

    #[test]
    fn mixed_fields_are_rejected(x in quad(17), y in nonzero(5)) {
        prop_assert!(x.checked_add(&y).is_err());
        prop_assert!(x.checked_mul(&y).is_err());
    }

    #[test]
    fn order_matches_shadow(x in quad(17), y in quad(17)) {
        let (sx, sy) = (shadow(&x), shadow(&y));
        prop_assert_eq!(x.cmp(&y), sx.cmp(&sy));
        prop_assert_eq!(x.sign(), if sx > BigRational::from_integer(BigInt::from(0)) { 1 } else if x.is_zero() { 0 } else { -1 });
        let fl = BigRational::from_integer(x.floor());
        prop_assert!(fl <= sx && sx < fl + BigRational::from_integer(BigInt::from(1)));
    }

    #[test]
    fn arithmetic_matches_shadow(x in quad(17), y in nonzero(17)) {
        let tol_ok = |exact: &QuadExt, approx: BigRational| common::shadow_eq(&shadow(exact), &approx);
        prop_assert!(tol_ok(&x.checked_add(&y).unwrap(), shadow(&x) + shadow(&y)));
        prop_assert!(tol_ok(&x.checked_mul(&y).unwrap(), shadow(&x) * shadow(&y)));
        prop_assert!(tol_ok(&x.checked_div(&y).unwrap(), shadow(&x) / shadow(&y)));
        prop_assert!((x.to_f64() - shadow(&x).to_f64().unwrap()).abs() < 1e-9 * (1.0 + x.to_f64().abs()));
    }

    #[test]
    fn render_parse_round_trip(x in quad(17)) {
        let back = QuadExt::parse_in(&x.to_string(), 17).unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn sqrt_in_field_recovers_roots(x in quad(17)) {
        let sq = x.square();
        prop_assert_eq!(sq.sqrt_in_field(), Some(x.abs()));
    }

    #[test]
    fn surd_equality_is_canonical(c in positive(17), r in positive(17), k in positive(17)) {
        // c sqrt(r) = (c / k) sqrt(k^2 r)
        let s1 = Surd::new(c.clone(), r.clone());
        let s2 = Surd::new(c.checked_div(&k).unwrap(), k.square().checked_mul(&r).unwrap());
        prop_assert_eq!(&s1, &s2);
        let s3 = Surd::parse_in(&s1.to_string(), 17).unwrap();
        prop_assert_eq!(&s3, &s1);
        let sh = common::shadow_sqrt(&shadow(&s1.square()));
        prop_assert!((s1.to_f64() - sh.to_f64().unwrap()).abs() < 1e-9 * (1.0 + s1.to_f64()));
    }

    #[test]
    fn surd_sums_agree_with_shadow(
        terms in prop::collection::vec((0i64..4, 1i64..30), 1..6),
        other in prop::collection::vec((0i64..4, 1i64..30), 1..6),
    ) {
        let build = |ts: &[(i64, i64)]| {
            let mut s = SurdSum::new();
            let mut sh = BigRational::from_integer(BigInt::from(0));
            for &(k, r) in ts {
                let rad = QuadExt::from_int(r, 17);
                s.add_term(&QuadExt::from_int(k, 17), &rad);
                sh += BigRational::from_integer(BigInt::from(k)) * common::shadow_sqrt(&shadow(&rad));
            }
            (s, sh)
        };
        let (a, sa) = build(&terms);
        let (b, sb) = build(&other);
        prop_assert_eq!(surd_sum_eq(&a, &b), common::shadow_eq(&sa, &sb));
        let mut neg = a.clone();
        for (k, r) in a.negated().terms() {
            neg.add_term(k, r);
        }
        prop_assert!(neg.is_zero());
    }

    #[test]
    fn gram_contains_its_witness(cols in prop::collection::vec(prop::collection::vec(0u32..2, 3), 1..5)) {
        let cols: Vec<Vec<u32>> = cols.into_iter().filter(|c| c.iter().any(|&x| x > 0)).collect();
        prop_assume!(!cols.is_empty());
        let a: Vec<Vec<u32>> = (0..3).map(|r| cols.iter().map(|c| c[r]).collect()).collect();
        let m: Vec<Vec<u32>> = (0..3).map(|i| (0..3).map(|j| (0..cols.len()).map(|k| a[i][k] * a[j][k]).sum()).collect()).collect();
        let got = gram_decompositions(&m).unwrap();
        prop_assert!(got.contains(&canonical_columns(&a)));
        for d in &got {
            let n = d[0].len();
            for i in 0..3 {
                for j in 0..3 {
                    prop_assert_eq!((0..n).map(|k| d[i][k] * d[j][k]).sum::<u32>(), m[i][j]);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn canonical_module_ignores_labels(ring in 0usize..3, idx in 0usize..24, seed in prop::collection::vec(any::<u32>(), 12)) {
        let name = ["AH1", "AH2", "AH3"][ring];
        let ms = catalog().modules(name, Side::Left);
        let m = &ms[idx % ms.len()];
        let mut perm: Vec<usize> = (0..m.rank()).collect();
        for (i, s) in seed.iter().enumerate().take(m.rank()) {
            perm.swap(i, *s as usize % m.rank());
        }
        let r = m.relabel(&perm);
        prop_assert_eq!(canonical_module(&r), canonical_module(m));
        prop_assert!(module_iso(&r, m).is_some());
        prop_assert_eq!(opposite_module(&opposite_module(m)), m.clone());
        for (j, other) in ms.iter().enumerate() {
            prop_assert_eq!(module_iso(&r, other).is_some(), j == idx % ms.len());
        }
    }

    #[test]
    fn canonical_bimodule_ignores_labels(pair in 0usize..9, idx in 0usize..14, perm in permutation(12)) {
        let names = ["AH1", "AH2", "AH3"];
        let (a, b) = (names[pair / 3], names[pair % 3]);
        let bs = catalog().bimodules(a, b);
        let x = &bs[idx % bs.len()];
        let p: Vec<usize> = perm.into_iter().filter(|&i| i < x.rank()).collect();
        let r = x.relabel(&p);
        prop_assert_eq!(canonical_bimodule(&r), canonical_bimodule(x));
        prop_assert!(bimodule_iso(&r, x).is_some());
        prop_assert_eq!(catalog().find_bimodule(&r), Some(idx % bs.len()));
        prop_assert_eq!(dual_bimodule(&dual_bimodule(x)), x.clone());
        prop_assert_eq!(x.total_dim2(), dual_bimodule(x).total_dim2());
    }

    #[test]
    fn small_catalogs_are_canonical(pick in 0usize..5, perm in permutation(8)) {
        let name = ["Z2", "Z3", "Fib", "Ising", "Rep(S3)"][pick];
        for side in [Side::Left, Side::Right] {
            for m in small_catalog().modules(name, side) {
                let p: Vec<usize> = perm.iter().copied().filter(|&i| i < m.rank()).collect();
                prop_assert_eq!(canonical_module(&m.relabel(&p)), m.clone());
            }
        }
    }

    #[test]
    fn subject_ids_round_trip(pair in 0usize..9, idx in 0usize..20) {
        let names = ["AH1", "AH2", "AH3"];
        for s in [
            Subject::Bimodule(names[pair / 3].into(), names[pair % 3].into(), idx),
            Subject::Module(names[pair % 3].into(), idx),
        ] {
            prop_assert_eq!(s.to_string().parse::<Subject>().unwrap(), s);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn statuses_only_strengthen(seed in any::<u64>()) {
        let ah = common::ah();
        let (facts, log) = run_deduction(&ah.catalog, &ah.tables, Some(seed)).unwrap();
        prop_assert_eq!(&facts, &ah.facts);
        let mut cur = std::collections::BTreeMap::new();
        for st in &log {
            let prev = cur.insert(st.subject.clone(), st.status).unwrap_or(Status::Unknown);
            let ok = prev == Status::Unknown || (prev == Status::Realized && st.status == Status::RealizedUniquely);
            prop_assert!(ok, "{} moved from {} to {}", st.subject, prev, st.status);
        }
    }
}
