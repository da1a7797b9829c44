//! Completion of partial multiplication tables by word reduction.
//!
//! A presentation names one involutive invertible letter `a` and a set of
//! non-invertible "core" letters. Every basis element is a reduced word
//! `a^i c a^j`. Products of core letters are given as a table; the
//! invertible letter either commutes with a core letter, is absorbed by it,
//! or satisfies a braid-type rule `x a x = ...`. Reducing the concatenation
//! of two basis words yields the full structure tensor.

use std::collections::BTreeMap;

use super::{FusionRing, RingError};

/// A linear combination of words, each word written as letters joined by
/// `.` (the empty word is `1`).
pub type Combination = Vec<(i64, String)>;

#[derive(Clone, Debug)]
pub struct Presentation {
    pub name: String,
    pub field: u32,
    /// Order-two invertible letter, if any.
    pub invertible: Option<String>,
    pub cores: Vec<String>,
    /// Core letters `c` with `c a = a c`.
    pub commuting: Vec<String>,
    /// Core letters `c` with `a c = c a = c`.
    pub absorbing: Vec<String>,
    /// `(x, rhs)` meaning `x a x = rhs`.
    pub braid: Option<(String, Combination)>,
    pub products: Vec<(String, String, Combination)>,
    pub basis: Vec<String>,
    /// Non-self-dual pairs; everything else is self-dual.
    pub dual_pairs: Vec<(String, String)>,
}

/// Order in which adjacent core pairs are reduced.
#[derive(Clone, Copy, Debug)]
pub enum Strategy {
    LeftFirst,
    RightFirst,
    /// Pseudo-random choice driven by the given seed.
    Seeded(u64),
}

const INV: u8 = 0;

type Word = Vec<u8>;

struct Compiled {
    letters: Vec<String>,
    commuting: Vec<bool>,
    absorbing: Vec<bool>,
    braid: Option<(u8, Vec<(i64, Word)>)>,
    products: BTreeMap<(u8, u8), Vec<(i64, Word)>>,
    basis: Vec<Word>,
}

fn perr(msg: impl Into<String>) -> RingError {
    RingError::Presentation(msg.into())
}

impl Presentation {
    fn compile(&self) -> Result<Compiled, RingError> {
        let mut letters = vec![self.invertible.clone().unwrap_or_else(|| "#".into())];
        letters.extend(self.cores.iter().cloned());
        let parse = |w: &str| -> Result<Word, RingError> {
            if w == "1" {
                return Ok(Vec::new());
            }
            w.split('.')
                .map(|l| {
                    letters
                        .iter()
                        .position(|x| x == l)
                        .map(|p| p as u8)
                        .ok_or_else(|| perr(format!("unknown letter {l}")))
                })
                .collect()
        };
        let comb = |c: &Combination| -> Result<Vec<(i64, Word)>, RingError> {
            c.iter().map(|(k, w)| Ok((*k, parse(w)?))).collect()
        };
        let flag = |set: &[String]| -> Vec<bool> { letters.iter().map(|l| set.contains(l)).collect() };
        let mut products = BTreeMap::new();
        for (x, y, rhs) in &self.products {
            let (px, py) = (parse(x)?, parse(y)?);
            if px.len() != 1 || py.len() != 1 || px[0] == INV || py[0] == INV {
                return Err(perr(format!("product {x}*{y} is not between core letters")));
            }
            products.insert((px[0], py[0]), comb(rhs)?);
        }
        let braid = match &self.braid {
            Some((x, rhs)) => {
                let px = parse(x)?;
                Some((px[0], comb(rhs)?))
            }
            None => None,
        };
        let basis = self.basis.iter().map(|w| parse(w)).collect::<Result<Vec<_>, _>>()?;
        Ok(Compiled {
            commuting: flag(&self.commuting),
            absorbing: flag(&self.absorbing),
            letters,
            braid,
            products,
            basis,
        })
    }
}

struct Rng(u64);

impl Rng {
    fn next(&mut self) -> u64 {
        // xorshift64*
        self.0 ^= self.0 >> 12;
        self.0 ^= self.0 << 25;
        self.0 ^= self.0 >> 27;
        self.0.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }
}

impl Compiled {
    /// Cancels `a a`, removes `a` next to absorbing letters and moves `a`
    /// leftwards past commuting letters when nothing else is adjacent.
    fn tidy(&self, w: &[u8]) -> Word {
        let mut out: Word = Vec::with_capacity(w.len());
        for &l in w {
            if l == INV {
                if out.last() == Some(&INV) {
                    out.pop();
                    continue;
                }
                if let Some(&p) = out.last() {
                    if self.absorbing[p as usize] {
                        continue;
                    }
                }
                out.push(l);
            } else {
                if self.absorbing[l as usize] {
                    while out.last() == Some(&INV) {
                        out.pop();
                    }
                }
                out.push(l);
            }
        }
        out
    }

    fn core_positions(w: &[u8]) -> Vec<usize> {
        w.iter().enumerate().filter(|(_, &l)| l != INV).map(|(i, _)| i).collect()
    }

    /// Normal form of a word with at most one core letter.
    fn single_core_normal(&self, w: &[u8]) -> Word {
        let cores = Self::core_positions(w);
        if cores.is_empty() {
            return if w.len() % 2 == 1 { vec![INV] } else { Vec::new() };
        }
        let p = cores[0];
        let c = w[p];
        let left = p % 2 == 1;
        let right = (w.len() - p - 1) % 2 == 1;
        if self.absorbing[c as usize] {
            return vec![c];
        }
        if self.commuting[c as usize] {
            return if left ^ right { vec![INV, c] } else { vec![c] };
        }
        let mut out = Vec::new();
        if left {
            out.push(INV);
        }
        out.push(c);
        if right {
            out.push(INV);
        }
        out
    }

    /// One rewriting step on the core pair starting at `cores[idx]`.
    fn step(&self, w: &[u8], cores: &[usize], idx: usize) -> Result<Vec<(i64, Word)>, RingError> {
        let (p1, p2) = (cores[idx], cores[idx + 1]);
        let (c1, c2) = (w[p1], w[p2]);
        let gap = p2 - p1 - 1;
        let splice = |mid: &[u8]| -> Word {
            let mut out = w[..p1].to_vec();
            out.extend_from_slice(mid);
            out.extend_from_slice(&w[p2 + 1..]);
            out
        };
        let splice_comb = |rhs: &[(i64, Word)]| -> Vec<(i64, Word)> {
            rhs.iter().map(|(k, m)| (*k, splice(m))).collect()
        };
        match gap % 2 {
            0 => {
                let rhs = self.products.get(&(c1, c2)).ok_or_else(|| {
                    perr(format!(
                        "missing product {}*{}",
                        self.letters[c1 as usize], self.letters[c2 as usize]
                    ))
                })?;
                Ok(splice_comb(rhs))
            }
            _ => {
                if self.absorbing[c1 as usize] || self.absorbing[c2 as usize] {
                    Ok(vec![(1, splice(&[c1, c2]))])
                } else if self.commuting[c2 as usize] {
                    Ok(vec![(1, splice(&[c1, c2, INV]))])
                } else if self.commuting[c1 as usize] {
                    Ok(vec![(1, splice(&[INV, c1, c2]))])
                } else {
                    match &self.braid {
                        Some((x, rhs)) if *x == c1 && *x == c2 => Ok(splice_comb(rhs)),
                        _ => Err(perr(format!(
                            "no rule for {}.a.{}",
                            self.letters[c1 as usize], self.letters[c2 as usize]
                        ))),
                    }
                }
            }
        }
    }

    fn reduce(&self, w: &[u8], strategy: Strategy) -> Result<BTreeMap<Word, i64>, RingError> {
        let mut rng = match strategy {
            Strategy::Seeded(s) => Rng(s | 1),
            _ => Rng(1),
        };
        let mut result: BTreeMap<Word, i64> = BTreeMap::new();
        let mut work: Vec<(i64, Word)> = vec![(1, w.to_vec())];
        let mut steps = 0usize;
        while let Some((k, w)) = work.pop() {
            steps += 1;
            if steps > 1_000_000 {
                return Err(perr("reduction does not terminate"));
            }
            let w = self.tidy(&w);
            let cores = Self::core_positions(&w);
            if cores.len() <= 1 {
                *result.entry(self.single_core_normal(&w)).or_insert(0) += k;
                continue;
            }
            let pairs = cores.len() - 1;
            let idx = match strategy {
                Strategy::LeftFirst => 0,
                Strategy::RightFirst => pairs - 1,
                Strategy::Seeded(_) => (rng.next() % pairs as u64) as usize,
            };
            for (c, nw) in self.step(&w, &cores, idx)? {
                work.push((k * c, nw));
            }
        }
        result.retain(|_, v| *v != 0);
        Ok(result)
    }

    fn render(&self, w: &[u8]) -> String {
        if w.is_empty() {
            return "1".into();
        }
        w.iter().map(|&l| self.letters[l as usize].as_str()).collect::<Vec<_>>().join(".")
    }

    fn tensor(&self, strategy: Strategy) -> Result<Vec<u32>, RingError> {
        let r = self.basis.len();
        let mut n = vec![0u32; r * r * r];
        for i in 0..r {
            for j in 0..r {
                let mut w = self.basis[i].clone();
                w.extend_from_slice(&self.basis[j]);
                for (nf, c) in self.reduce(&w, strategy)? {
                    let k = self
                        .basis
                        .iter()
                        .position(|b| *b == nf)
                        .ok_or_else(|| perr(format!("normal form {} is not a basis word", self.render(&nf))))?;
                    if c < 0 {
                        return Err(perr(format!(
                            "negative coefficient for {} in {}*{}",
                            self.render(&nf),
                            self.render(&self.basis[i]),
                            self.render(&self.basis[j])
                        )));
                    }
                    n[(i * r + j) * r + k] = c as u32;
                }
            }
        }
        Ok(n)
    }
}

/// Structure tensor produced with a specific reduction order.
pub fn tensor_with_strategy(p: &Presentation, strategy: Strategy) -> Result<Vec<u32>, RingError> {
    p.compile()?.tensor(strategy)
}

/// Derives the full ring from a presentation. Leftmost-first and
/// rightmost-first reduction must agree; ring validation (associativity in
/// particular) certifies the completion.
pub fn complete_from_presentation(p: &Presentation) -> Result<FusionRing, RingError> {
    let c = p.compile()?;
    let left = c.tensor(Strategy::LeftFirst)?;
    let right = c.tensor(Strategy::RightFirst)?;
    if left != right {
        let r = c.basis.len();
        let pos = left.iter().zip(&right).position(|(a, b)| a != b).unwrap();
        let (i, j, k) = (pos / (r * r), (pos / r) % r, pos % r);
        return Err(RingError::NonConfluent(format!(
            "{}*{} has coefficient {} or {} on {}",
            p.basis[i], p.basis[j], left[pos], right[pos], p.basis[k]
        )));
    }
    let r = p.basis.len();
    let mut dual: Vec<usize> = (0..r).collect();
    for (x, y) in &p.dual_pairs {
        let ix = p.basis.iter().position(|b| b == x).ok_or_else(|| perr(format!("unknown dual {x}")))?;
        let iy = p.basis.iter().position(|b| b == y).ok_or_else(|| perr(format!("unknown dual {y}")))?;
        dual[ix] = iy;
        dual[iy] = ix;
    }
    FusionRing::new(p.name.clone(), p.field, p.basis.clone(), dual, left)
}
