#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use fusionbp::exactnum::{surd_sum_eq, QuadExt, Surd, SurdSum};
use fusionbp::io::{
    parse_bimodules, parse_compat, parse_facts, parse_modules, parse_ring, render_bimodules, render_compat_triple, render_facts, render_modules,
    render_ring,
};
use fusionbp::bimodule::{bimodule_iso, validate_bimodule, Catalog, FusionBimodule};
use fusionbp::fusionring::builtin::builtin_ring;
use fusionbp::fusionring::FusionRing;
use fusionbp::gramdecomp::{canonical_columns, gram_decompositions, is_psd_exact};
use fusionbp::groupoid::{DerivationStep, FactBase};
use fusionbp::multcompat::{bimodule_table, module_table, MapOptions, ProductTable};
use fusionbp::nimrep::{enumerate_fusion_modules, module_iso, validate_module, FusionModule, Side};
use fusionbp::report::run_deduction;
use fusionbp::workspace::ROOT_ENV;

pub struct Ah {
    pub catalog: Catalog,
    pub tables: ProductTable,
    pub facts: FactBase,
    pub log: Vec<DerivationStep>,
}

pub fn ah_rings() -> Vec<Arc<FusionRing>> {
    ["AH1", "AH2", "AH3"].iter().map(|n| Arc::new(builtin_ring(n).unwrap())).collect()
}

pub fn build_tables(cat: &Catalog) -> ProductTable {
    let names: Vec<String> = cat.rings().iter().map(|r| r.name().to_string()).collect();
    let mut t = ProductTable::default();
    for a in &names {
        for b in &names {
            for c in &names {
                t.bimodule.insert((a.clone(), b.clone(), c.clone()), bimodule_table(cat, a, b, c));
            }
            t.module.insert((a.clone(), b.clone()), module_table(cat, a, b, MapOptions::MODULE));
        }
    }
    t
}

/// The full AH pipeline, built once per test binary.
pub fn ah() -> &'static Ah {
    static AH: OnceLock<Ah> = OnceLock::new();
    AH.get_or_init(|| {
        let catalog = Catalog::build(&ah_rings());
        let tables = build_tables(&catalog);
        let (facts, log) = run_deduction(&catalog, &tables, None).expect("deduction succeeds");
        Ah {
            catalog,
            tables,
            facts,
            log,
        }
    })
}

/// All `A` with entries in `0..=1` and no zero column such that
/// `A A^T` has entries at most 3, bucketed by `A A^T`. Columns are a
/// multiset of nonzero 0/1 vectors, so each is enumerated once.
fn all_small_grams(n: usize) -> BTreeMap<Vec<Vec<u32>>, Vec<Vec<Vec<u32>>>> {
    let cols: Vec<Vec<u32>> = (1u32..(1 << n)).rev().map(|mask| (0..n).map(|r| (mask >> (n - 1 - r)) & 1).collect()).collect();
    let mut out: BTreeMap<Vec<Vec<u32>>, Vec<Vec<Vec<u32>>>> = BTreeMap::new();
    fn rec(
        cols: &[Vec<u32>],
        from: usize,
        chosen: &mut Vec<usize>,
        gram: &mut Vec<Vec<u32>>,
        out: &mut BTreeMap<Vec<Vec<u32>>, Vec<Vec<Vec<u32>>>>,
    ) {
        let n = gram.len();
        let a: Vec<Vec<u32>> = (0..n).map(|r| chosen.iter().map(|&c| cols[c][r]).collect()).collect();
        out.entry(gram.clone()).or_default().push(a);
        for c in from..cols.len() {
            let col = &cols[c];
            let ok = (0..n).all(|i| (0..n).all(|j| gram[i][j] + col[i] * col[j] <= 3));
            if !ok {
                continue;
            }
            for i in 0..n {
                for j in 0..n {
                    gram[i][j] += col[i] * col[j];
                }
            }
            chosen.push(c);
            rec(cols, c, chosen, gram, out);
            chosen.pop();
            for i in 0..n {
                for j in 0..n {
                    gram[i][j] -= col[i] * col[j];
                }
            }
        }
    }
    rec(&cols, 0, &mut Vec::new(), &mut vec![vec![0; n]; n], &mut out);
    out
}

/// Compares `gram_decompositions` with brute force on every symmetric
/// positive semi-definite matrix of size `n <= max_n` with entries in
/// `0..=3`. Returns the number of matrices checked.
pub fn gram_oracle(max_n: usize) -> Result<usize, String> {
    let mut checked = 0;
    for n in 1..=max_n {
        let brute = all_small_grams(n);
        let slots: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
        let total = 4usize.pow(slots.len() as u32);
        for code in 0..total {
            let mut m = vec![vec![0u32; n]; n];
            let mut c = code;
            for &(i, j) in &slots {
                m[i][j] = (c % 4) as u32;
                m[j][i] = m[i][j];
                c /= 4;
            }
            let signed: Vec<Vec<i64>> = m.iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect();
            if !is_psd_exact(&signed) {
                continue;
            }
            checked += 1;
            let got = gram_decompositions(&m).map_err(|e| format!("{m:?}: {e}"))?;
            let mut want: Vec<Vec<Vec<u32>>> = brute.get(&m).cloned().unwrap_or_default().iter().map(canonical_columns).collect();
            want.sort();
            want.dedup();
            if got != want {
                return Err(format!("{m:?}: got {} decompositions, brute force {}", got.len(), want.len()));
            }
        }
    }
    Ok(checked)
}

/// Action tensors for the non-unit basis elements, with `L_{i^bar}` forced
/// to `L_i^T` and entries in `0..=1`.
fn brute_actions(ring: &FusionRing, m: usize, mut f: impl FnMut(Vec<u32>)) {
    let n = ring.rank();
    let free: Vec<usize> = (1..n).filter(|&i| i <= ring.dual(i)).collect();
    let cells = free.len() * m * m;
    assert!(cells <= 24, "brute force too large");
    for code in 0u64..(1u64 << cells) {
        let mut act = vec![0u32; n * m * m];
        for s in 0..m {
            act[s * m + s] = 1;
        }
        let mut bit = 0;
        let mut ok = true;
        for &i in &free {
            let d = ring.dual(i);
            for s in 0..m {
                for t in 0..m {
                    let v = ((code >> bit) & 1) as u32;
                    bit += 1;
                    act[(i * m + s) * m + t] = v;
                    if d != i {
                        act[(d * m + t) * m + s] = v;
                    } else if t < s && act[(i * m + t) * m + s] != v {
                        ok = false;
                    }
                }
            }
        }
        if ok {
            f(act);
        }
    }
}

fn global_rank_bound(ring: &FusionRing) -> usize {
    ring.global_dim2().to_f64().floor() as usize
}

/// Valid modules found by brute force over 0/1 actions, up to isomorphism.
pub fn brute_modules(ring: &Arc<FusionRing>, side: Side) -> Vec<FusionModule> {
    let mut classes: Vec<FusionModule> = Vec::new();
    for m in 1..=global_rank_bound(ring) {
        brute_actions(ring, m, |act| {
            let module = FusionModule::from_action(ring.clone(), side, m, act);
            if validate_module(&module).is_ok() && !classes.iter().any(|c| module_iso(c, &module).is_some()) {
                classes.push(module);
            }
        });
    }
    classes
}

/// Compares module enumeration with brute force; returns the class count.
pub fn module_oracle(ring: &Arc<FusionRing>) -> Result<usize, String> {
    let mut count = 0;
    for side in [Side::Left, Side::Right] {
        let got = enumerate_fusion_modules(ring, side);
        let want = brute_modules(ring, side);
        if got.len() != want.len() {
            return Err(format!("{} {side}: enumerated {}, brute force {}", ring.name(), got.len(), want.len()));
        }
        for g in &got {
            if want.iter().filter(|w| module_iso(w, g).is_some()).count() != 1 {
                return Err(format!("{} {side}: enumerated module has no unique brute-force match", ring.name()));
            }
        }
        count += got.len();
    }
    Ok(count)
}

/// Compares the bimodule catalog of `(ring, ring)` with brute force over
/// pairs of 0/1 actions.
pub fn bimodule_oracle(ring: &Arc<FusionRing>) -> Result<usize, String> {
    let cat = Catalog::build(std::slice::from_ref(&ring));
    let got = cat.bimodules(ring.name(), ring.name());
    let mut classes: Vec<FusionBimodule> = Vec::new();
    for m in 1..=global_rank_bound(ring) {
        let mut lefts = Vec::new();
        brute_actions(ring, m, |a| {
            let lm = FusionModule::from_action(ring.clone(), Side::Left, m, a.clone());
            if validate_module(&lm).is_ok() {
                lefts.push((a, lm.dim2().to_vec()));
            }
        });
        let mut rights = Vec::new();
        brute_actions(ring, m, |a| {
            if validate_module(&FusionModule::from_action(ring.clone(), Side::Right, m, a.clone())).is_ok() {
                rights.push(a);
            }
        });
        for (l, dim2) in &lefts {
            for r in &rights {
                let b = FusionBimodule::from_parts(ring.clone(), ring.clone(), m, l.clone(), r.clone(), dim2.clone());
                if validate_bimodule(&b).is_ok() && !classes.iter().any(|c| bimodule_iso(c, &b).is_some()) {
                    classes.push(b);
                }
            }
        }
    }
    if got.len() != classes.len() {
        return Err(format!("{}: catalog {}, brute force {}", ring.name(), got.len(), classes.len()));
    }
    for g in got {
        if classes.iter().filter(|c| bimodule_iso(c, g).is_some()).count() != 1 {
            return Err(format!("{}: catalog entry without a unique brute-force match", ring.name()));
        }
    }
    Ok(got.len())
}

/// High-precision rational value of `sqrt(r)` for `r >= 0`, accurate to
/// about 60 digits.
pub fn shadow_sqrt(r: &BigRational) -> BigRational {
    if r.is_zero() {
        return BigRational::zero();
    }
    let scale = BigInt::from(10u32).pow(60);
    let start = r.to_f64().expect("finite").sqrt();
    let mut x = BigRational::from_float(start).expect("finite start");
    let two = BigRational::from_integer(BigInt::from(2));
    for _ in 0..6 {
        x = (&x + r / &x) / &two;
        x = BigRational::new((&x * BigRational::from_integer(scale.clone())).round().to_integer(), scale.clone());
    }
    x
}

pub fn shadow_quad(x: &QuadExt) -> BigRational {
    let d = BigRational::from_integer(BigInt::from(x.field()));
    x.rational_part() + x.irrational_part() * shadow_sqrt(&d)
}

pub fn shadow_eq(a: &BigRational, b: &BigRational) -> bool {
    let tol = BigRational::new(BigInt::from(1), BigInt::from(10u32).pow(20));
    (a - b).abs() < tol
}

/// For every catalog bimodule, the left and right dimension identities
/// `d(a) d(s) = sum_t L[a][s][t] d(t)`, checked both exactly and in a
/// 60-digit shadow to within `1e-20`. Returns the number of identities.
pub fn shadow_catalog(cat: &Catalog) -> Result<usize, String> {
    let mut n = 0;
    for ((a, b), list) in cat.pairs() {
        for (idx, bm) in list.iter().enumerate() {
            let d_exact: Vec<Surd> = bm.dim2().iter().map(Surd::sqrt_of).collect();
            let d_shadow: Vec<BigRational> = bm.dim2().iter().map(|x| shadow_sqrt(&shadow_quad(x))).collect();
            for (ring, left) in [(bm.left_ring(), true), (bm.right_ring(), false)] {
                for x in 0..ring.rank() {
                    let dx = &ring.fp_dim()[x];
                    for s in 0..bm.rank() {
                        let mut exact = SurdSum::new();
                        let mut shadow = BigRational::zero();
                        for t in 0..bm.rank() {
                            let k = if left { bm.l(x, s, t) } else { bm.r(x, s, t) };
                            exact.add_surd(&QuadExt::from_int(k as i64, ring.field()), &d_exact[t]);
                            shadow += BigRational::from_integer(BigInt::from(k)) * &d_shadow[t];
                        }
                        let mut want = SurdSum::new();
                        want.add_surd(dx, &d_exact[s]);
                        let id = Catalog::bimodule_id(a, b, idx);
                        if !surd_sum_eq(&exact, &want) {
                            return Err(format!("{id}: exact dimension identity fails at ({x}, {s})"));
                        }
                        if !shadow_eq(&shadow, &(shadow_quad(dx) * &d_shadow[s])) {
                            return Err(format!("{id}: shadow disagrees at ({x}, {s})"));
                        }
                        n += 1;
                    }
                }
            }
        }
    }
    Ok(n)
}

pub const BIN: &str = env!("CARGO_BIN_EXE_fusionbp");

/// Runs the CLI with `args`, returning exit code and stdout.
pub fn cli(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(BIN).args(args).env_remove(ROOT_ENV).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

/// The pipeline stages, in order, against one workspace.
pub fn run_pipeline(ws: &Path, jobs: usize) -> Result<(), String> {
    let w = ws.to_str().expect("utf-8 path");
    let j = jobs.to_string();
    for stage in [["compat", "tables"], ["groupoid", "deduce"], ["subfactors", "count"]] {
        let (code, _, err) = cli(&["--jobs", &j, stage[0], stage[1], "--workspace", w]);
        if code != 0 {
            return Err(format!("{} {} exited {code}: {err}", stage[0], stage[1]));
        }
    }
    Ok(())
}

/// Every file under `root`, keyed by relative path.
pub fn snapshot(root: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        let mut entries: Vec<_> = std::fs::read_dir(dir).expect("readable").map(|e| e.expect("entry").path()).collect();
        entries.sort();
        for p in entries {
            if p.is_dir() {
                walk(root, &p, out);
            } else {
                let rel = p.strip_prefix(root).expect("inside root").to_string_lossy().into_owned();
                out.insert(rel, std::fs::read(&p).expect("readable"));
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}

/// Render/parse round trips over the AH fixture.
pub fn round_trips(ah: &Ah) -> Result<usize, String> {
    let rings: Vec<Arc<FusionRing>> = ah.catalog.rings().to_vec();
    let mut n = 0;
    for r in &rings {
        let back = parse_ring(&render_ring(r)).map_err(|e| format!("{}: {e}", r.name()))?;
        if render_ring(&back) != render_ring(r) || back.tensor() != r.tensor() {
            return Err(format!("ring {} does not round-trip", r.name()));
        }
        n += 1;
        for side in [Side::Left, Side::Right] {
            let ms = ah.catalog.modules(r.name(), side);
            let back = parse_modules(&render_modules(ms), &rings).map_err(|e| e.to_string())?;
            if back != ms {
                return Err(format!("{} {side} modules do not round-trip", r.name()));
            }
            n += ms.len();
        }
    }
    for ((a, b), bs) in ah.catalog.pairs() {
        let back = parse_bimodules(&render_bimodules(bs), &rings).map_err(|e| e.to_string())?;
        if &back != bs {
            return Err(format!("{a}-{b} bimodules do not round-trip"));
        }
        n += bs.len();
    }
    for ((a, b, c), t) in &ah.tables.bimodule {
        let text = render_compat_triple(a, b, c, t);
        let pre = [format!("{a}-{b}"), format!("{b}-{c}"), format!("{a}-{c}")];
        let back = parse_compat(&text, [&pre[0], &pre[1], &pre[2]], t.len(), ah.catalog.bimodules(b, c).len()).map_err(|e| e.to_string())?;
        if &back != t {
            return Err(format!("compat {a}-{b}-{c} does not round-trip"));
        }
        n += 1;
    }
    let back = parse_facts(&render_facts(&ah.log)).map_err(|e| e.to_string())?;
    if back != ah.log {
        return Err("derivation log does not round-trip".into());
    }
    Ok(n + back.len())
}
