//! Built-in rings: the three Asaeda-Haagerup rings and a handful of small
//! rings used as test oracles.

use super::presentation::{complete_from_presentation, Combination, Presentation};
use super::{FusionRing, RingError};
use crate::io;

const AH1_DATA: &str = include_str!("../../data/AH1.ring");
const AH2_DATA: &str = include_str!("../../data/AH2.ring");
const AH3_DATA: &str = include_str!("../../data/AH3.ring");

pub const BUILTIN_NAMES: [&str; 9] = ["AH1", "AH2", "AH3", "Fib", "Z2", "Z3", "Ising", "Trivial", "Rep(S3)"];

/// Returns a validated built-in ring by name.
pub fn builtin_ring(name: &str) -> Result<FusionRing, RingError> {
    match name {
        "AH1" => load_snapshot(AH1_DATA),
        "AH2" => load_snapshot(AH2_DATA),
        "AH3" => load_snapshot(AH3_DATA),
        "Fib" => fibonacci(),
        "Z2" => cyclic(2),
        "Z3" => cyclic(3),
        "Ising" => ising(),
        "Trivial" => trivial(),
        "Rep(S3)" => rep_s3(),
        other => Err(RingError::UnknownRing(other.to_string())),
    }
}

fn load_snapshot(text: &str) -> Result<FusionRing, RingError> {
    io::parse_ring(text).map_err(|e| RingError::Presentation(e.to_string()))
}

fn labels(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

/// Builds a commutative ring from an upper-triangular product table over
/// label sums.
fn from_commutative_table(
    name: &str,
    field: u32,
    names: &[&str],
    table: &[(&str, &str, &[(u32, &str)])],
) -> Result<FusionRing, RingError> {
    let r = names.len();
    let idx = |l: &str| names.iter().position(|x| *x == l).expect("label");
    let mut n = vec![0u32; r * r * r];
    for i in 0..r {
        n[i * r + i] = 1; // 1 * b_i
        n[(i * r) * r + i] = 1; // b_i * 1
    }
    for (x, y, rhs) in table {
        let (i, j) = (idx(x), idx(y));
        for (k, z) in rhs.iter() {
            let kk = idx(z);
            n[(i * r + j) * r + kk] += k;
            if i != j {
                n[(j * r + i) * r + kk] += k;
            }
        }
    }
    FusionRing::new(name, field, labels(names), (0..r).collect(), n)
}

/// The AH1 ring written directly from its multiplication table.
pub fn ah1_from_table() -> Result<FusionRing, RingError> {
    const LAMBDA: [(u32, &str); 5] = [(1, "psi"), (1, "chi"), (1, "sigma"), (1, "zeta"), (1, "tau")];
    let with_lambda = |k: u32, extra: &[(u32, &'static str)]| -> Vec<(u32, &'static str)> {
        let mut v: Vec<(u32, &str)> = LAMBDA.iter().map(|(c, l)| (c * k, *l)).collect();
        v.extend_from_slice(extra);
        v
    };
    let chi_tau = with_lambda(1, &[(1, "zeta"), (1, "tau")]);
    let sigma_zeta = with_lambda(1, &[(1, "tau")]);
    let sigma_tau = with_lambda(1, &[(1, "zeta"), (2, "tau")]);
    let zeta_zeta = with_lambda(1, &[(1, "1"), (1, "zeta"), (2, "tau")]);
    let zeta_tau = with_lambda(1, &[(1, "chi"), (1, "sigma"), (2, "zeta"), (3, "tau")]);
    let tau_tau = with_lambda(2, &[(1, "1"), (1, "sigma"), (2, "zeta"), (4, "tau")]);
    let table: Vec<(&str, &str, &[(u32, &str)])> = vec![
        ("psi", "psi", &[(1, "1"), (1, "psi"), (1, "zeta")]),
        ("psi", "chi", &[(1, "chi"), (1, "tau")]),
        ("psi", "sigma", &[(1, "zeta"), (1, "tau")]),
        ("psi", "zeta", &[(1, "psi"), (1, "sigma"), (1, "zeta"), (1, "tau")]),
        ("psi", "tau", &[(1, "chi"), (1, "sigma"), (1, "zeta"), (2, "tau")]),
        ("chi", "chi", &[(1, "1"), (1, "psi"), (1, "chi"), (1, "tau")]),
        ("chi", "sigma", &[(1, "sigma"), (1, "zeta"), (1, "tau")]),
        ("chi", "zeta", &[(1, "sigma"), (1, "zeta"), (2, "tau")]),
        ("chi", "tau", &chi_tau),
        ("sigma", "sigma", &[(1, "1"), (1, "chi"), (1, "sigma"), (1, "zeta"), (1, "tau")]),
        ("sigma", "zeta", &sigma_zeta),
        ("sigma", "tau", &sigma_tau),
        ("zeta", "zeta", &zeta_zeta),
        ("zeta", "tau", &zeta_tau),
        ("tau", "tau", &tau_tau),
    ];
    let names = ["1", "psi", "chi", "sigma", "zeta", "tau"];
    from_commutative_table("AH1", 17, &names, &table)
}

fn comb(terms: &[(i64, &str)]) -> Combination {
    terms.iter().map(|(k, w)| (*k, w.to_string())).collect()
}

fn sum(parts: &[&Combination]) -> Combination {
    parts.iter().flat_map(|c| c.iter().cloned()).collect()
}

fn times(k: i64, c: &Combination) -> Combination {
    c.iter().map(|(a, w)| (a * k, w.clone())).collect()
}

/// Presentation of AH2: letters alpha (invertible), rho, pi, eta.
pub fn ah2_presentation() -> Presentation {
    let gamma = comb(&[(1, "pi"), (1, "alpha.pi"), (1, "eta")]);
    let delta = comb(&[(1, "rho"), (1, "alpha.rho"), (1, "rho.alpha"), (1, "alpha.rho.alpha")]);
    let g2 = times(2, &gamma);
    let products = vec![
        ("rho", "rho", comb(&[(1, "1"), (1, "rho"), (1, "pi")])),
        ("rho", "pi", sum(&[&comb(&[(1, "rho")]), &gamma])),
        ("rho", "eta", sum(&[&comb(&[(1, "alpha.rho"), (1, "alpha.rho.alpha")]), &gamma])),
        ("pi", "rho", sum(&[&comb(&[(1, "rho")]), &gamma])),
        ("pi", "pi", sum(&[&comb(&[(1, "1")]), &delta, &g2])),
        ("pi", "eta", sum(&[&delta, &g2, &comb(&[(1, "eta")])])),
        ("eta", "rho", sum(&[&comb(&[(1, "rho.alpha"), (1, "alpha.rho.alpha")]), &gamma])),
        ("eta", "pi", sum(&[&delta, &g2, &comb(&[(1, "eta")])])),
        (
            "eta",
            "eta",
            sum(&[&comb(&[(1, "1"), (1, "alpha")]), &delta, &g2, &comb(&[(1, "pi"), (1, "alpha.pi")])]),
        ),
    ];
    Presentation {
        name: "AH2".into(),
        field: 17,
        invertible: Some("alpha".into()),
        cores: vec!["rho".into(), "pi".into(), "eta".into()],
        commuting: vec!["pi".into()],
        absorbing: vec!["eta".into()],
        braid: Some(("rho".into(), comb(&[(1, "alpha.rho.alpha"), (1, "eta")]))),
        products: products
            .into_iter()
            .map(|(x, y, c)| (x.to_string(), y.to_string(), c))
            .collect(),
        basis: ["1", "alpha", "rho", "alpha.rho", "rho.alpha", "alpha.rho.alpha", "pi", "alpha.pi", "eta"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        dual_pairs: vec![("alpha.rho".into(), "rho.alpha".into())],
    }
}

/// Presentation of AH3: letters beta (invertible), xi, mu, nu.
pub fn ah3_presentation() -> Presentation {
    let pi = comb(&[(1, "mu"), (1, "beta.mu"), (1, "nu")]);
    let psi = comb(&[(1, "xi"), (1, "beta.xi"), (1, "xi.beta"), (1, "beta.xi.beta")]);
    let pi2 = times(2, &pi);
    let products = vec![
        ("xi", "xi", comb(&[(1, "1"), (1, "xi"), (1, "mu"), (1, "nu")])),
        ("xi", "mu", sum(&[&comb(&[(1, "xi"), (1, "beta.xi"), (1, "beta.xi.beta")]), &pi])),
        ("xi", "nu", sum(&[&comb(&[(1, "xi"), (1, "xi.beta")]), &pi])),
        ("mu", "xi", sum(&[&comb(&[(1, "xi"), (1, "xi.beta"), (1, "beta.xi.beta")]), &pi])),
        // printed as 1 + Pi + 2 Psi, which breaks Frobenius reciprocity
        // against xi*mu; the consistent entry mirrors AH2's pi*pi
        ("mu", "mu", sum(&[&comb(&[(1, "1")]), &psi, &pi2])),
        ("mu", "nu", sum(&[&pi, &psi, &comb(&[(1, "mu"), (1, "beta.mu")])])),
        ("nu", "xi", sum(&[&comb(&[(1, "xi"), (1, "beta.xi")]), &pi])),
        ("nu", "mu", sum(&[&pi, &psi, &comb(&[(1, "mu"), (1, "beta.mu")])])),
        ("nu", "nu", sum(&[&comb(&[(1, "1"), (1, "beta")]), &pi, &psi, &comb(&[(1, "nu")])])),
    ];
    Presentation {
        name: "AH3".into(),
        field: 17,
        invertible: Some("beta".into()),
        cores: vec!["xi".into(), "mu".into(), "nu".into()],
        commuting: vec!["mu".into()],
        absorbing: vec!["nu".into()],
        braid: Some(("xi".into(), comb(&[(1, "beta.xi.beta"), (1, "mu"), (1, "beta.mu")]))),
        products: products
            .into_iter()
            .map(|(x, y, c)| (x.to_string(), y.to_string(), c))
            .collect(),
        basis: ["1", "beta", "xi", "beta.xi", "xi.beta", "beta.xi.beta", "mu", "beta.mu", "nu"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        dual_pairs: vec![("beta.xi".into(), "xi.beta".into())],
    }
}

/// Group ring of Z/2 through the presentation machinery.
pub fn z2_presentation() -> Presentation {
    Presentation {
        name: "Z2".into(),
        field: 1,
        invertible: Some("g".into()),
        cores: vec![],
        commuting: vec![],
        absorbing: vec![],
        braid: None,
        products: vec![],
        basis: vec!["1".into(), "g".into()],
        dual_pairs: vec![],
    }
}

pub fn ah2_from_presentation() -> Result<FusionRing, RingError> {
    complete_from_presentation(&ah2_presentation())
}

pub fn ah3_from_presentation() -> Result<FusionRing, RingError> {
    complete_from_presentation(&ah3_presentation())
}

pub fn fibonacci() -> Result<FusionRing, RingError> {
    // tau * tau = 1 + tau
    let n = vec![1, 0, 0, 1, 0, 1, 1, 1];
    FusionRing::new("Fib", 5, labels(&["1", "tau"]), vec![0, 1], n)
}

/// Group ring of Z/m.
pub fn cyclic(m: usize) -> Result<FusionRing, RingError> {
    let mut n = vec![0u32; m * m * m];
    for i in 0..m {
        for j in 0..m {
            n[(i * m + j) * m + (i + j) % m] = 1;
        }
    }
    let names: Vec<String> = (0..m).map(|i| if i == 0 { "1".into() } else { format!("g{i}") }).collect();
    let dual = (0..m).map(|i| (m - i) % m).collect();
    FusionRing::new(format!("Z{m}"), 1, names, dual, n)
}

/// Rank-3 Ising ring: psi^2 = 1, psi sigma = sigma, sigma^2 = 1 + psi.
pub fn ising() -> Result<FusionRing, RingError> {
    let r = 3;
    let mut n = vec![0u32; 27];
    let mut set = |i: usize, j: usize, k: usize, v: u32| n[(i * r + j) * r + k] = v;
    for i in 0..3 {
        set(0, i, i, 1);
        set(i, 0, i, 1);
    }
    set(1, 1, 0, 1);
    set(1, 2, 2, 1);
    set(2, 1, 2, 1);
    set(2, 2, 0, 1);
    set(2, 2, 1, 1);
    FusionRing::new("Ising", 2, labels(&["1", "psi", "sigma"]), vec![0, 1, 2], n)
}

/// Representation ring of S3: sign^2 = 1, sign*V = V, V^2 = 1 + sign + V.
pub fn rep_s3() -> Result<FusionRing, RingError> {
    let r = 3;
    let mut n = vec![0u32; 27];
    let mut set = |i: usize, j: usize, k: usize, v: u32| n[(i * r + j) * r + k] = v;
    for i in 0..3 {
        set(0, i, i, 1);
        set(i, 0, i, 1);
    }
    set(1, 1, 0, 1);
    set(1, 2, 2, 1);
    set(2, 1, 2, 1);
    set(2, 2, 0, 1);
    set(2, 2, 1, 1);
    set(2, 2, 2, 1);
    FusionRing::new("Rep(S3)", 1, labels(&["1", "sign", "V"]), vec![0, 1, 2], n)
}

pub fn trivial() -> Result<FusionRing, RingError> {
    FusionRing::new("Trivial", 1, labels(&["1"]), vec![0], vec![1])
}
