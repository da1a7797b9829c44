//! Exact arithmetic in a real quadratic field `Q(sqrt D)` and in surds
//! `c * sqrt(r)` over that field.
//!
//! Every Frobenius-Perron dimension handled by the crate is either a
//! [`QuadExt`] (ring dimensions, squared module dimensions) or a [`Surd`]
//! (module dimensions themselves). Comparisons are decided exactly with
//! rational arithmetic; debug builds additionally check each sign decision
//! against a floating evaluation.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("mixed field parameters: sqrt({0}) vs sqrt({1})")]
    FieldMismatch(u32, u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("field parameter {0} is not a positive square-free integer")]
    BadField(u32),
    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },
}

/// Returns true if `d` is positive and square-free.
pub fn is_square_free(d: u32) -> bool {
    if d == 0 {
        return false;
    }
    let mut p = 2u32;
    while p * p <= d {
        if d.is_multiple_of(p * p) {
            return false;
        }
        p += 1;
    }
    true
}

/// Exact square root of a non-negative rational, if it is a square.
pub fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = int_sqrt_exact(r.numer())?;
    let d = int_sqrt_exact(r.denom())?;
    Some(Rational::new(n, d))
}

fn int_sqrt_exact(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let s = n.sqrt();
    if &s * &s == *n {
        Some(s)
    } else {
        None
    }
}

fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// An element `a + b sqrt(D)` of `Q(sqrt D)`.
///
/// For `D = 1` the irrational part is folded into `a`, so the representation
/// stays canonical and derived equality/hashing are exact.
#[derive(Clone, Debug)]
pub struct QuadExt {
    a: Rational,
    b: Rational,
    d: u32,
}

impl PartialEq for QuadExt {
    fn eq(&self, other: &Self) -> bool {
        self.assert_same_field(other);
        self.a == other.a && self.b == other.b
    }
}

impl Eq for QuadExt {}

impl Hash for QuadExt {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.d.hash(state);
        self.a.hash(state);
        self.b.hash(state);
    }
}

impl QuadExt {
    pub fn new(a: Rational, b: Rational, d: u32) -> Self {
        assert!(is_square_free(d), "{}", ExactError::BadField(d));
        if d == 1 {
            QuadExt {
                a: a + b,
                b: Rational::zero(),
                d,
            }
        } else {
            QuadExt { a, b, d }
        }
    }

    pub fn try_new(a: Rational, b: Rational, d: u32) -> Result<Self, ExactError> {
        if !is_square_free(d) {
            return Err(ExactError::BadField(d));
        }
        Ok(Self::new(a, b, d))
    }

    pub fn from_ints(a: i64, b: i64, denom: i64, d: u32) -> Self {
        let den = rat(denom);
        Self::new(rat(a) / den.clone(), rat(b) / den, d)
    }

    pub fn from_rational(a: Rational, d: u32) -> Self {
        Self::new(a, Rational::zero(), d)
    }

    pub fn from_int(n: i64, d: u32) -> Self {
        Self::from_rational(rat(n), d)
    }

    pub fn zero(d: u32) -> Self {
        Self::from_int(0, d)
    }

    pub fn one(d: u32) -> Self {
        Self::from_int(1, d)
    }

    pub fn rational_part(&self) -> &Rational {
        &self.a
    }

    pub fn irrational_part(&self) -> &Rational {
        &self.b
    }

    pub fn field(&self) -> u32 {
        self.d
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// `a - b sqrt(D)`.
    pub fn conj(&self) -> Self {
        QuadExt {
            a: self.a.clone(),
            b: -self.b.clone(),
            d: self.d,
        }
    }

    /// Field norm `a^2 - D b^2`.
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - rat(self.d as i64) * &self.b * &self.b
    }

    fn assert_same_field(&self, other: &Self) {
        if self.d != other.d {
            panic!("{}", ExactError::FieldMismatch(self.d, other.d));
        }
    }

    fn check_field(&self, other: &Self) -> Result<(), ExactError> {
        if self.d != other.d {
            Err(ExactError::FieldMismatch(self.d, other.d))
        } else {
            Ok(())
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, ExactError> {
        self.check_field(other)?;
        Ok(QuadExt {
            a: &self.a + &other.a,
            b: &self.b + &other.b,
            d: self.d,
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, ExactError> {
        self.check_field(other)?;
        Ok(QuadExt {
            a: &self.a - &other.a,
            b: &self.b - &other.b,
            d: self.d,
        })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, ExactError> {
        self.check_field(other)?;
        let dd = rat(self.d as i64);
        Ok(QuadExt {
            a: &self.a * &other.a + dd * &self.b * &other.b,
            b: &self.a * &other.b + &self.b * &other.a,
            d: self.d,
        })
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, ExactError> {
        self.check_field(other)?;
        if other.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        let n = other.norm();
        let num = self.checked_mul(&other.conj())?;
        Ok(QuadExt {
            a: num.a / n.clone(),
            b: num.b / n,
            d: self.d,
        })
    }

    pub fn scale(&self, k: &Rational) -> Self {
        QuadExt {
            a: &self.a * k,
            b: &self.b * k,
            d: self.d,
        }
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self.scale(&rat(k))
    }

    pub fn square(&self) -> Self {
        self * self
    }

    /// Exact sign: -1, 0 or +1.
    pub fn sign(&self) -> i32 {
        let s = self.exact_sign();
        #[cfg(debug_assertions)]
        {
            let f = self.to_f64();
            let mag = self.a.to_f64().unwrap_or(0.0).abs()
                + self.b.to_f64().unwrap_or(0.0).abs() * (self.d as f64).sqrt();
            if f.abs() > 1e-9 * mag.max(1e-300) {
                debug_assert_eq!(s, if f > 0.0 { 1 } else { -1 }, "float shadow disagrees for {self}");
            }
        }
        s
    }

    fn exact_sign(&self) -> i32 {
        let sa = signum(&self.a);
        let sb = signum(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        // opposite signs: compare a^2 with D b^2
        let lhs = &self.a * &self.a;
        let rhs = rat(self.d as i64) * &self.b * &self.b;
        match lhs.cmp(&rhs) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.sign() > 0
    }

    pub fn abs(&self) -> Self {
        if self.sign() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    /// Largest integer `k` with `k <= self`.
    pub fn floor(&self) -> BigInt {
        let approx = self.to_f64().floor();
        let mut k = BigInt::from(approx as i64);
        loop {
            let kq = QuadExt::from_rational(Rational::from_integer(k.clone()), self.d);
            if (self - &kq).sign() < 0 {
                k -= 1;
                continue;
            }
            let k1 = QuadExt::from_rational(Rational::from_integer(&k + 1), self.d);
            if (self - &k1).sign() >= 0 {
                k += 1;
                continue;
            }
            return k;
        }
    }

    /// The positive square root inside the field, if one exists.
    pub fn sqrt_in_field(&self) -> Option<QuadExt> {
        if self.sign() < 0 {
            return None;
        }
        if self.is_zero() {
            return Some(self.clone());
        }
        let d = self.d;
        if self.b.is_zero() {
            if let Some(r) = rational_sqrt(&self.a) {
                return Some(QuadExt::from_rational(r, d));
            }
            // a = c^2 D gives sqrt(a) = c sqrt(D)
            if d > 1 {
                if let Some(c) = rational_sqrt(&(&self.a / rat(d as i64))) {
                    return Some(QuadExt::new(Rational::zero(), c, d));
                }
            }
            return None;
        }
        // (p + q sqrt D)^2 = a + b sqrt D  <=>  p^2 = (a +- t)/2, t^2 = a^2 - D b^2
        let t = rational_sqrt(&self.norm())?;
        let two = rat(2);
        for cand in [(&self.a + &t) / &two, (&self.a - &t) / &two] {
            if cand.is_zero() {
                continue;
            }
            if let Some(p) = rational_sqrt(&cand) {
                let q = &self.b / (&two * &p);
                let x = QuadExt::new(p, q, d);
                if x.square() == *self {
                    return Some(x.abs());
                }
            }
        }
        None
    }

    pub fn to_f64(&self) -> f64 {
        self.a.to_f64().unwrap_or(f64::NAN) + self.b.to_f64().unwrap_or(f64::NAN) * (self.d as f64).sqrt()
    }

    pub fn parse_in(s: &str, d: u32) -> Result<Self, ExactError> {
        parse_quad(s, d, 0)
    }
}

fn signum(r: &Rational) -> i32 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

impl PartialOrd for QuadExt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadExt {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self - other).sign() {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl $tr<&QuadExt> for &QuadExt {
            type Output = QuadExt;
            fn $m(self, rhs: &QuadExt) -> QuadExt {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $tr<QuadExt> for QuadExt {
            type Output = QuadExt;
            fn $m(self, rhs: QuadExt) -> QuadExt {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&QuadExt> for QuadExt {
            type Output = QuadExt;
            fn $m(self, rhs: &QuadExt) -> QuadExt {
                (&self).$m(rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);
forward_binop!(Div, div, checked_div);

impl Neg for &QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        QuadExt {
            a: -self.a.clone(),
            b: -self.b.clone(),
            d: self.d,
        }
    }
}

impl Neg for QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        -&self
    }
}

/// Renders a rational as `p` or `p/q`.
pub fn render_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", render_rational(&self.a));
        }
        let bmag = render_rational(&self.b.abs());
        if self.a.is_zero() {
            if self.b.is_negative() {
                write!(f, "-{bmag}*r")
            } else {
                write!(f, "{bmag}*r")
            }
        } else {
            let sep = if self.b.is_negative() { '-' } else { '+' };
            write!(f, "{}{sep}{bmag}*r", render_rational(&self.a))
        }
    }
}

fn perr(column: usize, message: impl Into<String>) -> ExactError {
    ExactError::Parse {
        column,
        message: message.into(),
    }
}

/// Parses `-?digits(/digits)?` at `pos`; returns the value and the next position.
fn parse_rational_at(s: &[u8], pos: usize, base: usize) -> Result<(Rational, usize), ExactError> {
    let mut i = pos;
    let neg = i < s.len() && s[i] == b'-';
    if neg {
        i += 1;
    }
    let start = i;
    while i < s.len() && s[i].is_ascii_digit() {
        i += 1;
    }
    if i == start {
        return Err(perr(base + i + 1, "expected digits"));
    }
    let num: BigInt = std::str::from_utf8(&s[start..i]).unwrap().parse().unwrap();
    let mut den = BigInt::one();
    if i < s.len() && s[i] == b'/' {
        i += 1;
        let dstart = i;
        while i < s.len() && s[i].is_ascii_digit() {
            i += 1;
        }
        if i == dstart {
            return Err(perr(base + i + 1, "expected denominator digits"));
        }
        den = std::str::from_utf8(&s[dstart..i]).unwrap().parse().unwrap();
        if den.is_zero() {
            return Err(perr(base + dstart + 1, "zero denominator"));
        }
        if den.is_one() {
            return Err(perr(base + dstart + 1, "denominator 1 is not canonical"));
        }
    }
    let r = Rational::new(if neg { -num.clone() } else { num.clone() }, den.clone());
    // only canonical spellings are accepted so that parse and render are inverse
    if *r.numer() != if neg { -num } else { num } || *r.denom() != den {
        return Err(perr(base + pos + 1, "rational not in lowest terms"));
    }
    if neg && r.is_zero() {
        return Err(perr(base + pos + 1, "negative zero"));
    }
    Ok((r, i))
}

pub fn parse_rational(s: &str) -> Result<Rational, ExactError> {
    let (r, end) = parse_rational_at(s.as_bytes(), 0, 0)?;
    if end != s.len() {
        return Err(perr(end + 1, "trailing characters"));
    }
    Ok(r)
}

/// Parses the `a+b*r` grammar. `base` offsets reported columns.
fn parse_quad(s: &str, d: u32, base: usize) -> Result<QuadExt, ExactError> {
    let bytes = s.as_bytes();
    let (first, i) = parse_rational_at(bytes, 0, base)?;
    if i == bytes.len() {
        return Ok(QuadExt::from_rational(first, d));
    }
    if bytes[i..] == *b"*r" {
        if first.is_zero() {
            return Err(perr(base + 1, "zero coefficient of r"));
        }
        return QuadExt::try_new(Rational::zero(), first, d);
    }
    let sep = bytes[i];
    if sep != b'+' && sep != b'-' {
        return Err(perr(base + i + 1, "expected '+', '-' or end"));
    }
    if first.is_zero() {
        return Err(perr(base + 1, "zero rational part must be omitted"));
    }
    let (mag, j) = parse_rational_at(bytes, i + 1, base)?;
    if bytes[i + 1] == b'-' || mag.is_zero() {
        return Err(perr(base + i + 2, "expected positive coefficient"));
    }
    if bytes.get(j..) != Some(b"*r".as_slice()) {
        return Err(perr(base + j + 1, "expected '*r'"));
    }
    let b = if sep == b'-' { -mag } else { mag };
    QuadExt::try_new(first, b, d)
}

/// A positive real `coeff * sqrt(radicand)` with `coeff, radicand` in `Q(sqrt D)`.
#[derive(Clone, Debug)]
pub struct Surd {
    coeff: QuadExt,
    radicand: QuadExt,
}

impl Surd {
    pub fn new(coeff: QuadExt, radicand: QuadExt) -> Self {
        assert!(coeff.is_positive(), "surd coefficient must be positive");
        assert!(radicand.is_positive(), "surd radicand must be positive");
        let s = Surd { coeff, radicand };
        s.simplified()
    }

    /// `sqrt(s)` for a positive field element.
    pub fn sqrt_of(s: &QuadExt) -> Self {
        Surd::new(QuadExt::one(s.field()), s.clone())
    }

    fn simplified(self) -> Self {
        match self.radicand.sqrt_in_field() {
            Some(r) => Surd {
                coeff: &self.coeff * &r,
                radicand: QuadExt::one(r.field()),
            },
            None => self,
        }
    }

    pub fn coeff(&self) -> &QuadExt {
        &self.coeff
    }

    pub fn radicand(&self) -> &QuadExt {
        &self.radicand
    }

    /// The square `coeff^2 * radicand`, which determines the surd.
    pub fn square(&self) -> QuadExt {
        &self.coeff.square() * &self.radicand
    }

    pub fn mul(&self, other: &Surd) -> Surd {
        Surd::new(&self.coeff * &other.coeff, &self.radicand * &other.radicand)
    }

    pub fn to_f64(&self) -> f64 {
        self.coeff.to_f64() * self.radicand.to_f64().sqrt()
    }

    pub fn parse_in(s: &str, d: u32) -> Result<Self, ExactError> {
        let bytes = s.as_bytes();
        if bytes.first() != Some(&b'(') {
            return Err(perr(1, "expected '('"));
        }
        let close = s.find(")*sqrt(").ok_or_else(|| perr(2, "expected ')*sqrt('"))?;
        if !s.ends_with(')') {
            return Err(perr(s.len(), "expected ')'"));
        }
        let coeff = parse_quad(&s[1..close], d, 1)?;
        let inner_start = close + ")*sqrt(".len();
        let radicand = parse_quad(&s[inner_start..s.len() - 1], d, inner_start)?;
        if !coeff.is_positive() || !radicand.is_positive() {
            return Err(perr(1, "surd parts must be positive"));
        }
        Ok(Surd { coeff, radicand })
    }
}

impl PartialEq for Surd {
    fn eq(&self, other: &Self) -> bool {
        self.square() == other.square()
    }
}

impl Eq for Surd {}

impl PartialOrd for Surd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Surd {
    fn cmp(&self, other: &Self) -> Ordering {
        // both positive, so compare squares
        self.square().cmp(&other.square())
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})*sqrt({})", self.coeff, self.radicand)
    }
}

/// A finite sum of surds, grouped by commensurability class.
///
/// Class representatives are pairwise incommensurable: no ratio of two
/// representatives is a square in the field. Such square roots are linearly
/// independent over the field, so equality is decided classwise.
#[derive(Clone, Debug, Default)]
pub struct SurdSum {
    terms: Vec<(QuadExt, QuadExt)>,
}

impl SurdSum {
    pub fn new() -> Self {
        SurdSum { terms: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(QuadExt, QuadExt)] {
        &self.terms
    }

    /// Adds `coeff * sqrt(radicand)`; `radicand` must be positive.
    pub fn add_term(&mut self, coeff: &QuadExt, radicand: &QuadExt) {
        if coeff.is_zero() {
            return;
        }
        for idx in 0..self.terms.len() {
            let ratio = radicand / &self.terms[idx].1;
            if let Some(q) = ratio.sqrt_in_field() {
                let c = &self.terms[idx].0 + &(coeff * &q);
                if c.is_zero() {
                    self.terms.remove(idx);
                } else {
                    self.terms[idx].0 = c;
                }
                return;
            }
        }
        self.terms.push((coeff.clone(), radicand.clone()));
    }

    pub fn add_surd(&mut self, k: &QuadExt, s: &Surd) {
        self.add_term(&(k * &s.coeff), &s.radicand);
    }

    pub fn negated(&self) -> SurdSum {
        SurdSum {
            terms: self.terms.iter().map(|(c, r)| (-c, r.clone())).collect(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.terms.iter().map(|(c, r)| c.to_f64() * r.to_f64().sqrt()).sum()
    }
}

impl From<&Surd> for SurdSum {
    fn from(s: &Surd) -> Self {
        let mut out = SurdSum::new();
        out.add_term(&s.coeff, &s.radicand);
        out
    }
}

/// Exact equality of two surd sums.
pub fn surd_sum_eq(x: &SurdSum, y: &SurdSum) -> bool {
    let mut diff = x.clone();
    for (c, r) in &y.terms {
        diff.add_term(&-c, r);
    }
    let eq = diff.is_zero();
    #[cfg(debug_assertions)]
    {
        let (fx, fy) = (x.to_f64(), y.to_f64());
        let scale = fx.abs().max(fy.abs()).max(1.0);
        if eq {
            debug_assert!((fx - fy).abs() <= 1e-9 * scale, "float shadow disagrees: {fx} vs {fy}");
        }
    }
    eq
}

impl FromStr for Surd {
    type Err = ExactError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Surd::parse_in(s, 17)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64, den: i64) -> QuadExt {
        QuadExt::from_ints(a, b, den, 17)
    }

    #[test]
    fn conjugate_product() {
        assert_eq!(&q(1, 1, 1) * &q(1, -1, 1), QuadExt::from_int(-16, 17));
    }

    #[test]
    fn golden_like_square() {
        assert_eq!(q(3, 1, 2).square(), q(13, 3, 2));
        let x = q(7, -2, 3);
        assert_eq!(&x + &QuadExt::zero(17), x);
    }

    #[test]
    fn signs() {
        assert_eq!(q(4, -1, 1).sign(), -1);
        assert_eq!(QuadExt::zero(17).sign(), 0);
        assert_eq!(q(3, 1, 2).sign(), 1);
        assert_eq!(q(-5, 1, 1).sign(), -1);
        assert_eq!(q(-4, 1, 1).sign(), 1);
    }

    #[test]
    fn field_sqrt() {
        assert_eq!(q(33, 8, 1).sqrt_in_field(), Some(q(4, 1, 1)));
        assert_eq!(QuadExt::from_int(2, 17).sqrt_in_field(), None);
        assert_eq!(q(9, 0, 4).sqrt_in_field(), Some(q(3, 0, 2)));
        assert_eq!(QuadExt::from_int(17, 17).sqrt_in_field(), Some(q(0, 1, 1)));
        assert_eq!(q(-1, 0, 1).sqrt_in_field(), None);
    }

    #[test]
    fn division() {
        let x = q(3, 1, 2);
        assert_eq!(&(&x / &q(5, 1, 2)) * &q(5, 1, 2), x);
        assert_eq!(x.checked_div(&QuadExt::zero(17)), Err(ExactError::DivisionByZero));
    }

    #[test]
    fn mixed_fields_rejected() {
        let x = QuadExt::from_int(1, 17);
        let y = QuadExt::from_int(1, 5);
        assert_eq!(x.checked_add(&y), Err(ExactError::FieldMismatch(17, 5)));
    }

    #[test]
    #[should_panic]
    fn mixed_fields_panic_in_operators() {
        let _ = QuadExt::from_int(1, 17) + QuadExt::from_int(1, 5);
    }

    #[test]
    fn floor_values() {
        assert_eq!(q(3, 1, 2).floor(), BigInt::from(3));
        assert_eq!(q(11, 3, 2).floor(), BigInt::from(11));
        assert_eq!(q(4, 1, 1).floor(), BigInt::from(8));
        assert_eq!(QuadExt::from_int(5, 17).floor(), BigInt::from(5));
    }

    #[test]
    fn surd_sums() {
        let two = QuadExt::from_int(2, 17);
        let s2 = Surd::sqrt_of(&two);
        let mut lhs = SurdSum::new();
        lhs.add_surd(&QuadExt::one(17), &s2);
        lhs.add_surd(&QuadExt::one(17), &s2);
        let mut rhs = SurdSum::new();
        rhs.add_surd(&two, &s2);
        assert!(surd_sum_eq(&lhs, &rhs));

        let s17 = Surd::sqrt_of(&QuadExt::from_int(17, 17));
        let mut a = SurdSum::new();
        a.add_surd(&QuadExt::one(17), &s2);
        a.add_surd(&QuadExt::one(17), &s17);
        assert!(surd_sum_eq(&a, &a.clone()));
        assert!(!surd_sum_eq(&a, &lhs));

        let r = q(5, 1, 2);
        let sr = Surd::sqrt_of(&r);
        let prod = sr.mul(&sr);
        let lhs = SurdSum::from(&prod);
        let rhs = SurdSum::from(&Surd::new(r.clone(), QuadExt::one(17)));
        assert!(surd_sum_eq(&lhs, &rhs));
    }

    #[test]
    fn surd_equality_by_square() {
        let a = Surd::new(QuadExt::from_int(2, 17), QuadExt::from_int(3, 17));
        let b = Surd::sqrt_of(&QuadExt::from_int(12, 17));
        assert_eq!(a, b);
    }

    #[test]
    fn rendering() {
        assert_eq!(q(13, 3, 2).to_string(), "13/2+3/2*r");
        assert_eq!(q(4, -1, 1).to_string(), "4-1*r");
        assert_eq!(q(0, 1, 1).to_string(), "1*r");
        assert_eq!(q(0, -1, 2).to_string(), "-1/2*r");
        assert_eq!(QuadExt::from_int(-3, 17).to_string(), "-3");
        let s = Surd::new(q(1, 0, 1), q(5, 1, 2));
        assert_eq!(s.to_string(), "(1)*sqrt(5/2+1/2*r)");
    }

    #[test]
    fn parsing() {
        for txt in ["13/2+3/2*r", "4-1*r", "1*r", "-1/2*r", "-3", "0", "7/3"] {
            assert_eq!(QuadExt::parse_in(txt, 17).unwrap().to_string(), txt);
        }
        for bad in ["13/2 + 3/2*r", "2/4", "1+0*r", "0+1*r", "1+-1*r", "x", "3/1", "1+2*s", "-0"] {
            assert!(QuadExt::parse_in(bad, 17).is_err(), "{bad}");
        }
        let s: Surd = "(1)*sqrt(5/2+1/2*r)".parse().unwrap();
        assert_eq!(s.to_string(), "(1)*sqrt(5/2+1/2*r)");
        match QuadExt::parse_in("13/2+3/x*r", 17) {
            Err(ExactError::Parse { column, .. }) => assert_eq!(column, 8),
            other => panic!("unexpected {other:?}"),
        }
    }
}
