//! Multi-indices with the graded lexicographic order used to index the
//! Hermitian families.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::error::{Error, Result};

/// Exponent vector `J = (J_1, ..., J_n)`.
///
/// Ordering: `J < K` iff `|J| < |K|`, or `|J| = |K|` and at the first index
/// where they differ `J_i < K_i`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Multidegree(pub Vec<u32>);

impl Multidegree {
    pub fn new(exponents: Vec<u32>) -> Self {
        Multidegree(exponents)
    }

    pub fn zero(n: usize) -> Self {
        Multidegree(vec![0; n])
    }

    /// `e_i`, the exponent of the single variable `z_{i+1}`.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        Multidegree(v)
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn add(&self, other: &Multidegree) -> Multidegree {
        Multidegree(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self - other` when componentwise non-negative.
    pub fn checked_sub(&self, other: &Multidegree) -> Option<Multidegree> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Multidegree)
    }

    pub fn divides(&self, other: &Multidegree) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Checked comparison that reports a length mismatch instead of panicking.
    pub fn compare(&self, other: &Multidegree) -> Result<Ordering> {
        if self.nvars() != other.nvars() {
            return Err(Error::DimensionMismatch {
                expected: self.nvars(),
                found: other.nvars(),
            });
        }
        Ok(self.cmp(other))
    }

    /// All multidegrees in `n` variables with total degree exactly `d`, ascending.
    pub fn all_of_degree(n: usize, d: u32) -> Vec<Multidegree> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; n];
        fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Multidegree>) {
            let n = cur.len();
            if i + 1 == n {
                cur[i] = left;
                out.push(Multidegree(cur.clone()));
                return;
            }
            // smaller leading entries first
            for e in 0..=left {
                cur[i] = e;
                rec(i + 1, left - e, cur, out);
            }
            cur[i] = 0;
        }
        if n == 0 {
            if d == 0 {
                out.push(Multidegree(Vec::new()));
            }
            return out;
        }
        rec(0, d, &mut cur, &mut out);
        out
    }

    /// All multidegrees with total degree at most `d`, ascending.
    pub fn all_up_to(n: usize, d: u32) -> Vec<Multidegree> {
        (0..=d).flat_map(|k| Multidegree::all_of_degree(n, k)).collect()
    }
}

impl Ord for Multidegree {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total()
            .cmp(&other.total())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Multidegree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Multidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Multidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// Number of monomials of degree `< k` in `n` variables, `C(k-1+n, n)`.
pub fn monomials_below(n: usize, k: u32) -> usize {
    if k == 0 {
        return 0;
    }
    let top = (k - 1) as usize + n;
    let mut acc: u128 = 1;
    for i in 0..n {
        acc = acc * (top - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}
