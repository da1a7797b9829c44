//! Decompositions `M = A A^T` of non-negative integer matrices with `A`
//! non-negative integral and without zero columns, up to column order.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GramError {
    #[error("matrix is not square")]
    NotSquare,
    #[error("matrix is not symmetric at ({0},{1})")]
    NotSymmetric(usize, usize),
    #[error("matrix is not positive semi-definite")]
    NotPsd,
}

/// A sum of squares decomposition `N = sum b * a^2` with strictly increasing
/// `a`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SquareDecomposition {
    pub pairs: Vec<(u32, u32)>,
}

impl SquareDecomposition {
    pub fn total(&self) -> u64 {
        self.pairs.iter().map(|&(a, b)| b as u64 * (a as u64).pow(2)).sum()
    }

    pub fn parts(&self) -> u32 {
        self.pairs.iter().map(|p| p.1).sum()
    }
}

/// All ways of writing `n` as a sum of positive squares.
pub fn sum_of_squares(n: u32) -> Vec<SquareDecomposition> {
    fn rec(rem: u32, max_a: u32, acc: &mut Vec<(u32, u32)>, out: &mut Vec<SquareDecomposition>) {
        if rem == 0 {
            let mut pairs = acc.clone();
            pairs.reverse();
            out.push(SquareDecomposition { pairs });
            return;
        }
        for a in (1..=max_a).rev() {
            let sq = a * a;
            if sq > rem {
                continue;
            }
            for b in 1..=rem / sq {
                acc.push((a, b));
                rec(rem - b * sq, a - 1, acc, out);
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    rec(n, isqrt(n as u64) as u32, &mut Vec::new(), &mut out);
    out.sort();
    out
}

pub(crate) fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Exact positive semi-definiteness test by symmetric elimination. A zero
/// pivot is only allowed when its whole row has vanished.
pub fn is_psd_exact(m: &[Vec<i64>]) -> bool {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return false;
    }
    for i in 0..n {
        for j in 0..i {
            if m[i][j] != m[j][i] {
                return false;
            }
        }
    }
    match psd_bareiss(m) {
        Some(b) => b,
        None => psd_rational(m),
    }
}

/// Fraction-free elimination in `i128`. Entries stay minors of the input,
/// so every division is exact. Returns `None` on overflow.
fn psd_bareiss(m: &[Vec<i64>]) -> Option<bool> {
    let n = m.len();
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut alive: Vec<bool> = vec![true; n];
    let mut prev: i128 = 1;
    for _ in 0..n {
        // pick the first remaining index with nonzero diagonal, after
        // discarding vanished rows
        let mut pivot = None;
        for k in 0..n {
            if !alive[k] {
                continue;
            }
            if a[k][k] < 0 {
                return Some(false);
            }
            if a[k][k] == 0 {
                if (0..n).any(|j| alive[j] && a[k][j] != 0) {
                    return Some(false);
                }
                alive[k] = false;
                continue;
            }
            pivot = Some(k);
            break;
        }
        let Some(k) = pivot else { return Some(true) };
        alive[k] = false;
        let p = a[k][k];
        for i in 0..n {
            if !alive[i] {
                continue;
            }
            for j in i..n {
                if !alive[j] {
                    continue;
                }
                let v = p.checked_mul(a[i][j])?.checked_sub(a[i][k].checked_mul(a[k][j])?)?;
                let v = v / prev;
                a[i][j] = v;
                a[j][i] = v;
            }
        }
        prev = p;
    }
    Some(true)
}

fn psd_rational(m: &[Vec<i64>]) -> bool {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .map(|r| r.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect())
        .collect();
    for k in 0..n {
        if a[k][k].is_negative() {
            return false;
        }
        if a[k][k].is_zero() {
            if (k..n).any(|j| !a[k][j].is_zero()) {
                return false;
            }
            continue;
        }
        for i in k + 1..n {
            let f = &a[i][k] / &a[k][k];
            for j in k + 1..n {
                let t = &f * &a[k][j];
                a[i][j] -= t;
            }
        }
    }
    true
}

/// Non-negative integer matrix stored by rows.
pub type IntMatrix = Vec<Vec<u32>>;

fn check_input(m: &IntMatrix) -> Result<(), GramError> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return Err(GramError::NotSquare);
    }
    for i in 0..n {
        for j in 0..i {
            if m[i][j] != m[j][i] {
                return Err(GramError::NotSymmetric(i, j));
            }
        }
    }
    let signed: Vec<Vec<i64>> = m.iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect();
    if !is_psd_exact(&signed) {
        return Err(GramError::NotPsd);
    }
    Ok(())
}

/// Sorts columns lexicographically descending, the canonical representative
/// of a column-permutation class.
pub fn canonical_columns(a: &IntMatrix) -> IntMatrix {
    let n = a.len();
    let k = a.first().map_or(0, |r| r.len());
    let mut cols: Vec<Vec<u32>> = (0..k).map(|c| (0..n).map(|r| a[r][c]).collect()).collect();
    cols.sort_by(|x, y| y.cmp(x));
    (0..n).map(|r| cols.iter().map(|c| c[r]).collect()).collect()
}

struct Search<'a> {
    m: &'a IntMatrix,
    order: Vec<usize>,
    /// Columns restricted to processed rows, in processing order.
    cols: Vec<Vec<u32>>,
    seen: HashSet<IntMatrix>,
    out: Vec<IntMatrix>,
}

impl Search<'_> {
    fn emit(&mut self) {
        let n = self.m.len();
        let mut a = vec![vec![0u32; self.cols.len()]; n];
        for (c, col) in self.cols.iter().enumerate() {
            for (pos, &r) in self.order.iter().enumerate() {
                a[r][c] = col[pos];
            }
        }
        let a = canonical_columns(&a);
        if self.seen.insert(a.clone()) {
            self.out.push(a);
        }
    }

    fn row(&mut self, depth: usize) {
        if depth == self.order.len() {
            self.emit();
            return;
        }
        let r = self.order[depth];
        let diag = self.m[r][r];
        let targets: Vec<u32> = self.order[..depth].iter().map(|&l| self.m[l][r]).collect();
        let k = self.cols.len();
        let mut v = vec![0u32; k];
        let mut dots = vec![0u32; depth];
        self.assign(depth, 0, diag, &targets, &mut v, &mut dots);
    }

    /// Every unprocessed row must still be able to meet its inner products
    /// with the processed rows using the existing columns.
    fn lookahead(&self, done: usize) -> bool {
        for &r in &self.order[done..] {
            let targets: Vec<u32> = self.order[..done].iter().map(|&l| self.m[l][r]).collect();
            if targets.iter().all(|&t| t == 0) {
                continue;
            }
            let mut dots = vec![0u32; done];
            if !self.reachable(0, self.m[r][r], &targets, &mut dots, u32::MAX) {
                return false;
            }
        }
        true
    }

    fn reachable(&self, j: usize, budget: u32, targets: &[u32], dots: &mut Vec<u32>, prev: u32) -> bool {
        let k = self.cols.len();
        if dots == targets {
            return true;
        }
        if j == k {
            return false;
        }
        let maxv = isqrt(budget as u64) as u32;
        for (l, &t) in targets.iter().enumerate() {
            let reach: u32 = (j..k).map(|c| self.cols[c][l]).sum::<u32>() * maxv;
            if dots[l] + reach < t {
                return false;
            }
        }
        let mut hi = maxv;
        if j > 0 && self.cols[j] == self.cols[j - 1] {
            hi = hi.min(prev);
        }
        for x in (0..=hi).rev() {
            if targets.iter().enumerate().any(|(l, &t)| dots[l] + x * self.cols[j][l] > t) {
                continue;
            }
            for l in 0..targets.len() {
                dots[l] += x * self.cols[j][l];
            }
            let ok = self.reachable(j + 1, budget - x * x, targets, dots, x);
            for l in 0..targets.len() {
                dots[l] -= x * self.cols[j][l];
            }
            if ok {
                return true;
            }
        }
        false
    }

    /// Chooses the entry of the new row in existing column `j`. Identical
    /// existing columns receive non-increasing values.
    #[allow(clippy::too_many_arguments)]
    fn assign(&mut self, depth: usize, j: usize, budget: u32, targets: &[u32], v: &mut Vec<u32>, dots: &mut Vec<u32>) {
        let k = v.len();
        if j == k {
            if dots != targets {
                return;
            }
            // leftover squares become new columns with zeros above
            let decomps = if budget == 0 { vec![SquareDecomposition { pairs: vec![] }] } else { sum_of_squares(budget) };
            for sd in decomps {
                let base = self.cols.len();
                for (c, x) in v.iter().enumerate() {
                    self.cols[c].push(*x);
                }
                for &(a, b) in sd.pairs.iter().rev() {
                    for _ in 0..b {
                        let mut col = vec![0u32; depth];
                        col.push(a);
                        self.cols.push(col);
                    }
                }
                if self.lookahead(depth + 1) {
                    self.row(depth + 1);
                }
                self.cols.truncate(base);
                for col in self.cols.iter_mut() {
                    col.pop();
                }
            }
            return;
        }
        // feasibility: remaining columns must be able to reach every target
        let maxv = isqrt(budget as u64) as u32;
        for (l, &t) in targets.iter().enumerate() {
            let reach: u32 = (j..k).map(|c| self.cols[c][l]).sum::<u32>() * maxv;
            if dots[l] + reach < t {
                return;
            }
        }
        let mut hi = maxv;
        if j > 0 && self.cols[j] == self.cols[j - 1] {
            hi = hi.min(v[j - 1]);
        }
        for x in (0..=hi).rev() {
            let sq = x * x;
            if sq > budget {
                continue;
            }
            let mut ok = true;
            for (l, &t) in targets.iter().enumerate() {
                if dots[l] + x * self.cols[j][l] > t {
                    ok = false;
                    break;
                }
            }
            if !ok {
                continue;
            }
            for l in 0..targets.len() {
                dots[l] += x * self.cols[j][l];
            }
            v[j] = x;
            self.assign(depth, j + 1, budget - sq, targets, v, dots);
            for l in 0..targets.len() {
                dots[l] -= x * self.cols[j][l];
            }
        }
        v[j] = 0;
    }
}

/// Every `A` with `A A^T = M` and no zero column, once per column
/// permutation class, columns sorted lexicographically descending. Output
/// is sorted.
pub fn gram_decompositions(m: &IntMatrix) -> Result<Vec<IntMatrix>, GramError> {
    check_input(m)?;
    Ok(gram_decompositions_unchecked(m))
}

pub(crate) fn gram_decompositions_unchecked(m: &IntMatrix) -> Vec<IntMatrix> {
    let n = m.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| m[a][a].cmp(&m[b][b]).then(a.cmp(&b)));
    let mut s = Search {
        m,
        order,
        cols: Vec::new(),
        seen: HashSet::new(),
        out: Vec::new(),
    };
    s.row(0);
    let mut out = s.out;
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sd(p: &[(u32, u32)]) -> SquareDecomposition {
        SquareDecomposition { pairs: p.to_vec() }
    }

    #[test]
    fn sum_of_squares_examples() {
        assert_eq!(sum_of_squares(1), vec![sd(&[(1, 1)])]);
        assert_eq!(sum_of_squares(4), vec![sd(&[(1, 4)]), sd(&[(2, 1)])]);
        assert_eq!(sum_of_squares(5), vec![sd(&[(1, 1), (2, 1)]), sd(&[(1, 5)])]);
        for n in 1..60 {
            for d in sum_of_squares(n) {
                assert_eq!(d.total(), n as u64);
                assert!(d.pairs.windows(2).all(|w| w[0].0 < w[1].0));
            }
        }
    }

    #[test]
    fn psd_examples() {
        assert!(is_psd_exact(&[vec![2, 1], vec![1, 2]]));
        assert!(!is_psd_exact(&[vec![1, 2], vec![2, 1]]));
        assert!(is_psd_exact(&[vec![0, 0], vec![0, 3]]));
        assert!(!is_psd_exact(&[vec![0, 1], vec![1, 3]]));
        assert!(!is_psd_exact(&[vec![1, 0], vec![1, 1]]));
    }

    #[test]
    fn psd_falls_back_on_overflow() {
        let big = 1i64 << 62;
        let m = vec![vec![big, big - 1, 3], vec![big - 1, big, 5], vec![3, 5, big]];
        assert_eq!(psd_bareiss(&m), None);
        assert!(is_psd_exact(&m));
        let bad = vec![vec![big, big, 0], vec![big, big - 1, 0], vec![0, 0, 1]];
        assert!(!is_psd_exact(&bad));
    }

    #[test]
    fn gram_examples() {
        assert_eq!(gram_decompositions(&vec![vec![1, 0], vec![0, 1]]).unwrap(), vec![vec![vec![1, 0], vec![0, 1]]]);
        assert_eq!(gram_decompositions(&vec![vec![2]]).unwrap(), vec![vec![vec![1, 1]]]);
        assert_eq!(
            gram_decompositions(&vec![vec![2, 1], vec![1, 2]]).unwrap(),
            vec![vec![vec![1, 1, 0], vec![1, 0, 1]]]
        );
        assert_eq!(gram_decompositions(&vec![vec![1, 2], vec![2, 1]]), Err(GramError::NotPsd));
        assert_eq!(gram_decompositions(&vec![vec![0]]).unwrap(), vec![Vec::<Vec<u32>>::from([vec![]])]);
    }
}
