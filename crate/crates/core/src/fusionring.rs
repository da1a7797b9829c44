//! Fusion rings: structure constants, axiom validation and exact
//! Frobenius-Perron dimensions.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use crate::exactnum::QuadExt;

pub mod builtin;
pub mod presentation;

/// Largest denominator tried when recognising a numeric dimension as an
/// element of `Q(sqrt D)`.
pub const RECOGNITION_DENOMINATOR_BOUND: i64 = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RingError {
    #[error("tensor has wrong size: expected {expected}, found {found}")]
    Shape { expected: usize, found: usize },
    #[error("basis 0 is not a unit: N[{i}][{j}][{k}] = {value}")]
    Unit { i: usize, j: usize, k: usize, value: u32 },
    #[error("dual is not an involution fixing 0 (at index {0})")]
    DualInvolution(usize),
    #[error("N[{i}][{j}][0] = {value} contradicts dual({i}) = {dual}")]
    DualPairing { i: usize, j: usize, value: u32, dual: usize },
    #[error("Frobenius reciprocity fails at ({i},{j},{k})")]
    Frobenius { i: usize, j: usize, k: usize },
    #[error("associativity fails at ({i},{j},{k},{l})")]
    Associativity { i: usize, j: usize, k: usize, l: usize },
    #[error("dimension vector is not a positive homomorphism at ({i},{j})")]
    Dimension { i: usize, j: usize },
    #[error("could not recognise dimension of basis {index} (approx {approx}) in Q(sqrt {field})")]
    Recognition { index: usize, approx: f64, field: u32 },
    #[error("elements belong to different rings: {0} vs {1}")]
    RingMismatch(String, String),
    #[error("unknown built-in ring {0}")]
    UnknownRing(String),
    #[error("presentation is not confluent: {0}")]
    NonConfluent(String),
    #[error("presentation error: {0}")]
    Presentation(String),
}

/// A based ring with non-negative structure constants and a duality.
///
/// `N[i][j][k]` is the multiplicity of `b_k` in `b_i b_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FusionRing {
    name: String,
    field: u32,
    labels: Vec<String>,
    dual: Vec<usize>,
    n: Vec<u32>,
    fp_dim: Vec<QuadExt>,
    fp_dim2: Vec<QuadExt>,
}

impl FusionRing {
    /// Builds a ring from raw data and computes its dimensions. The result is
    /// fully validated.
    pub fn new(
        name: impl Into<String>,
        field: u32,
        labels: Vec<String>,
        dual: Vec<usize>,
        n: Vec<u32>,
    ) -> Result<Self, RingError> {
        let mut ring = Self::unvalidated(name, field, labels, dual, n)?;
        ring.check_axioms()?;
        ring.fp_dim = fp_dimensions(&ring)?;
        ring.fp_dim2 = ring.fp_dim.iter().map(|d| d.square()).collect();
        Ok(ring)
    }

    /// Wraps raw data without checking axioms; dimensions are left as ones.
    pub fn unvalidated(
        name: impl Into<String>,
        field: u32,
        labels: Vec<String>,
        dual: Vec<usize>,
        n: Vec<u32>,
    ) -> Result<Self, RingError> {
        let rank = labels.len();
        if dual.len() != rank {
            return Err(RingError::Shape {
                expected: rank,
                found: dual.len(),
            });
        }
        if n.len() != rank * rank * rank {
            return Err(RingError::Shape {
                expected: rank * rank * rank,
                found: n.len(),
            });
        }
        Ok(FusionRing {
            name: name.into(),
            field,
            labels,
            dual,
            n,
            fp_dim: vec![QuadExt::one(field); rank],
            fp_dim2: vec![QuadExt::one(field); rank],
        })
    }

    /// Attaches given squared dimensions (from a ring file) and validates
    /// everything, including the homomorphism identity.
    pub fn with_dim2(mut self, dim2: Vec<QuadExt>) -> Result<Self, RingError> {
        self.check_axioms()?;
        let mut dims = Vec::with_capacity(dim2.len());
        for (index, d2) in dim2.iter().enumerate() {
            match d2.sqrt_in_field() {
                Some(d) => dims.push(d),
                None => {
                    return Err(RingError::Recognition {
                        index,
                        approx: d2.to_f64().sqrt(),
                        field: self.field,
                    })
                }
            }
        }
        check_homomorphism(&self, &dims)?;
        self.fp_dim = dims;
        self.fp_dim2 = dim2;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn field(&self) -> u32 {
        self.field
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn dual(&self, i: usize) -> usize {
        self.dual[i]
    }

    pub fn duals(&self) -> &[usize] {
        &self.dual
    }

    #[inline]
    pub fn n(&self, i: usize, j: usize, k: usize) -> u32 {
        let r = self.rank();
        self.n[(i * r + j) * r + k]
    }

    pub fn tensor(&self) -> &[u32] {
        &self.n
    }

    pub fn fp_dim(&self) -> &[QuadExt] {
        &self.fp_dim
    }

    pub fn fp_dim2(&self) -> &[QuadExt] {
        &self.fp_dim2
    }

    pub fn is_commutative(&self) -> bool {
        let r = self.rank();
        (0..r).all(|i| (0..r).all(|j| (0..r).all(|k| self.n(i, j, k) == self.n(j, i, k))))
    }

    /// Checks every ring axiom except the dimension vector.
    pub fn check_axioms(&self) -> Result<(), RingError> {
        let r = self.rank();
        for i in 0..r {
            for k in 0..r {
                let e = u32::from(i == k);
                if self.n(0, i, k) != e {
                    return Err(RingError::Unit {
                        i: 0,
                        j: i,
                        k,
                        value: self.n(0, i, k),
                    });
                }
                if self.n(i, 0, k) != e {
                    return Err(RingError::Unit {
                        i,
                        j: 0,
                        k,
                        value: self.n(i, 0, k),
                    });
                }
            }
        }
        if self.dual[0] != 0 {
            return Err(RingError::DualInvolution(0));
        }
        for i in 0..r {
            if self.dual[i] >= r || self.dual[self.dual[i]] != i {
                return Err(RingError::DualInvolution(i));
            }
        }
        for i in 0..r {
            for j in 0..r {
                let want = u32::from(j == self.dual[i]);
                if self.n(i, j, 0) != want {
                    return Err(RingError::DualPairing {
                        i,
                        j,
                        value: self.n(i, j, 0),
                        dual: self.dual[i],
                    });
                }
            }
        }
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    for l in 0..r {
                        let lhs: u64 = (0..r).map(|m| self.n(i, j, m) as u64 * self.n(m, k, l) as u64).sum();
                        let rhs: u64 = (0..r).map(|m| self.n(j, k, m) as u64 * self.n(i, m, l) as u64).sum();
                        if lhs != rhs {
                            return Err(RingError::Associativity { i, j, k, l });
                        }
                    }
                }
            }
        }
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    let v = self.n(i, j, k);
                    if v != self.n(self.dual[i], k, j) || v != self.n(k, self.dual[j], i) {
                        return Err(RingError::Frobenius { i, j, k });
                    }
                }
            }
        }
        Ok(())
    }

    /// Full validation report: axioms plus the stored dimension vector.
    pub fn validate(&self) -> Result<(), RingError> {
        self.check_axioms()?;
        check_homomorphism(self, &self.fp_dim)
    }

    /// Coefficient vector of `b_i b_j`.
    pub fn product_basis(&self, i: usize, j: usize) -> Vec<i64> {
        let r = self.rank();
        (0..r).map(|k| self.n(i, j, k) as i64).collect()
    }

    /// Bilinear product on raw coefficient vectors.
    pub fn mul_coeffs(&self, x: &[i64], y: &[i64]) -> Vec<i64> {
        let r = self.rank();
        let mut out = vec![0i64; r];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                if yj == 0 {
                    continue;
                }
                let c = xi * yj;
                for (k, o) in out.iter_mut().enumerate() {
                    let m = self.n(i, j, k);
                    if m != 0 {
                        *o += c * m as i64;
                    }
                }
            }
        }
        out
    }

    /// Dual of an element (applies the involution to coefficients).
    pub fn dual_coeffs(&self, x: &[i64]) -> Vec<i64> {
        let mut out = vec![0; x.len()];
        for (i, &c) in x.iter().enumerate() {
            out[self.dual[i]] += c;
        }
        out
    }

    /// Frobenius-Perron dimension of an integer combination of basis elements.
    pub fn dim_of(&self, x: &[i64]) -> QuadExt {
        let mut acc = QuadExt::zero(self.field);
        for (i, &c) in x.iter().enumerate() {
            if c != 0 {
                acc = acc + self.fp_dim[i].scale_int(c);
            }
        }
        acc
    }

    /// Global dimension: sum of squared basis dimensions.
    pub fn global_dim2(&self) -> QuadExt {
        self.fp_dim2
            .iter()
            .fold(QuadExt::zero(self.field), |acc, d| acc + d)
    }

    /// Basis elements of dimension one.
    pub fn invertibles(&self) -> Vec<usize> {
        let one = QuadExt::one(self.field);
        (0..self.rank()).filter(|&i| self.fp_dim[i] == one).collect()
    }

    /// The ring with multiplication reversed.
    pub fn opposite(&self) -> FusionRing {
        let r = self.rank();
        let mut n = vec![0u32; r * r * r];
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    n[(i * r + j) * r + k] = self.n(j, i, k);
                }
            }
        }
        FusionRing {
            name: format!("{}^op", self.name),
            n,
            ..self.clone()
        }
    }

    pub fn element(self: &Arc<Self>, coeffs: Vec<i64>) -> RingElement {
        assert_eq!(coeffs.len(), self.rank());
        RingElement {
            ring: Arc::clone(self),
            coeffs,
        }
    }

    pub fn basis_element(self: &Arc<Self>, i: usize) -> RingElement {
        let mut c = vec![0; self.rank()];
        c[i] = 1;
        self.element(c)
    }

    /// Parses `1+psi+2*zeta` style sums of basis labels.
    pub fn parse_element(self: &Arc<Self>, s: &str) -> Result<RingElement, RingError> {
        let mut c = vec![0i64; self.rank()];
        for term in s.split('+') {
            let (k, lab) = match term.split_once('*') {
                Some((k, lab)) => (
                    k.parse::<i64>()
                        .map_err(|_| RingError::Presentation(format!("bad coefficient in {term}")))?,
                    lab,
                ),
                None => (1, term),
            };
            let idx = self
                .index_of(lab)
                .ok_or_else(|| RingError::Presentation(format!("unknown label {lab}")))?;
            c[idx] += k;
        }
        Ok(self.element(c))
    }
}

/// An integer combination of basis elements of a specific ring.
#[derive(Clone, Debug)]
pub struct RingElement {
    ring: Arc<FusionRing>,
    coeffs: Vec<i64>,
}

impl PartialEq for RingElement {
    fn eq(&self, other: &Self) -> bool {
        self.ring.name == other.ring.name && self.coeffs == other.coeffs
    }
}

impl Eq for RingElement {}

impl RingElement {
    pub fn ring(&self) -> &Arc<FusionRing> {
        &self.ring
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    fn check_same(&self, other: &RingElement) -> Result<(), RingError> {
        if Arc::ptr_eq(&self.ring, &other.ring) || *self.ring == *other.ring {
            Ok(())
        } else {
            Err(RingError::RingMismatch(self.ring.name.clone(), other.ring.name.clone()))
        }
    }

    pub fn mul(&self, other: &RingElement) -> Result<RingElement, RingError> {
        self.check_same(other)?;
        Ok(RingElement {
            ring: Arc::clone(&self.ring),
            coeffs: self.ring.mul_coeffs(&self.coeffs, &other.coeffs),
        })
    }

    /// Dot product in the basis.
    pub fn inner(&self, other: &RingElement) -> Result<i64, RingError> {
        self.check_same(other)?;
        Ok(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b).sum())
    }

    pub fn dual(&self) -> RingElement {
        RingElement {
            ring: Arc::clone(&self.ring),
            coeffs: self.ring.dual_coeffs(&self.coeffs),
        }
    }

    pub fn dim(&self) -> QuadExt {
        self.ring.dim_of(&self.coeffs)
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            if c == 1 {
                write!(f, "{}", self.ring.labels[i])?;
            } else {
                write!(f, "{}*{}", c, self.ring.labels[i])?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

pub fn elem_mul(x: &RingElement, y: &RingElement) -> Result<RingElement, RingError> {
    x.mul(y)
}

pub fn elem_inner(x: &RingElement, y: &RingElement) -> Result<i64, RingError> {
    x.inner(y)
}

pub fn global_dim2(ring: &FusionRing) -> QuadExt {
    ring.global_dim2()
}

pub fn validate_ring(ring: &FusionRing) -> Result<(), RingError> {
    ring.validate()
}

fn check_homomorphism(ring: &FusionRing, dims: &[QuadExt]) -> Result<(), RingError> {
    let r = ring.rank();
    if dims.len() != r {
        return Err(RingError::Shape {
            expected: r,
            found: dims.len(),
        });
    }
    if dims[0] != QuadExt::one(ring.field) {
        return Err(RingError::Dimension { i: 0, j: 0 });
    }
    for i in 0..r {
        if !dims[i].is_positive() {
            return Err(RingError::Dimension { i, j: i });
        }
        for j in 0..r {
            let lhs = &dims[i] * &dims[j];
            let mut rhs = QuadExt::zero(ring.field);
            for k in 0..r {
                let m = ring.n(i, j, k);
                if m != 0 {
                    rhs = rhs + dims[k].scale_int(m as i64);
                }
            }
            if lhs != rhs {
                return Err(RingError::Dimension { i, j });
            }
        }
    }
    Ok(())
}

/// Perron eigenvector of the sum of all left multiplication matrices,
/// normalised so the unit has dimension one.
fn perron_vector(ring: &FusionRing) -> Vec<f64> {
    let r = ring.rank();
    let mut t = vec![0f64; r * r];
    for i in 0..r {
        for j in 0..r {
            for k in 0..r {
                t[j * r + k] += ring.n(i, j, k) as f64;
            }
        }
    }
    // shift by the identity so the iteration cannot oscillate
    for j in 0..r {
        t[j * r + j] += 1.0;
    }
    let mut v = vec![1f64; r];
    for _ in 0..10_000 {
        let mut w = vec![0f64; r];
        for j in 0..r {
            w[j] = (0..r).map(|k| t[j * r + k] * v[k]).sum();
        }
        let s = w[0];
        for x in w.iter_mut() {
            *x /= s;
        }
        let delta: f64 = w.iter().zip(&v).map(|(a, b)| (a - b).abs()).sum();
        v = w;
        if delta < 1e-15 {
            break;
        }
    }
    v
}

/// Finds `(A + B sqrt D)/q` closest to `x`, simplest first.
fn recognise(x: f64, field: u32, bound: i64) -> Option<QuadExt> {
    let sd = (field as f64).sqrt();
    let tol = 1e-9 * x.abs().max(1.0);
    for q in 1..=bound {
        let qx = q as f64 * x;
        let bmax = if field == 1 { 0 } else { (bound * (2 + qx.abs() as i64)).max(4) };
        for mag in 0..=bmax {
            for b in [mag, -mag] {
                if mag == 0 && b < 0 {
                    continue;
                }
                let a = (qx - b as f64 * sd).round();
                if (a + b as f64 * sd - qx).abs() < tol * q as f64 {
                    let den = BigRational::from_integer(BigInt::from(q));
                    return Some(QuadExt::new(
                        BigRational::from_integer(BigInt::from(a as i64)) / den.clone(),
                        BigRational::from_integer(BigInt::from(b)) / den,
                        field,
                    ));
                }
            }
        }
    }
    None
}

/// Computes the Frobenius-Perron dimensions numerically, recognises them in
/// `Q(sqrt D)` and verifies the homomorphism identity exactly.
pub fn fp_dimensions(ring: &FusionRing) -> Result<Vec<QuadExt>, RingError> {
    let v = perron_vector(ring);
    let mut dims = Vec::with_capacity(v.len());
    for (index, &x) in v.iter().enumerate() {
        let d = recognise(x, ring.field, RECOGNITION_DENOMINATOR_BOUND).ok_or(RingError::Recognition {
            index,
            approx: x,
            field: ring.field,
        })?;
        dims.push(d);
    }
    check_homomorphism(ring, &dims)?;
    Ok(dims)
}
