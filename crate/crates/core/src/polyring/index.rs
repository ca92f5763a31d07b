use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape of the variable matrices: `Z` is `m×N`, `W` is `m×m`.
///
/// `s` is the split parameter of the model coordinates. It is carried as
/// metadata only and never changes arithmetic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VarSpace {
    pub m: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(default = "default_split")]
    pub s: usize,
}

fn default_split() -> usize {
    1
}

impl VarSpace {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        Self::with_split(m, n, 1)
    }

    pub fn with_split(m: usize, n: usize, s: usize) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::Dims(format!("m and N must be positive, got m={m}, N={n}")));
        }
        if s == 0 || s > n {
            return Err(Error::Dims(format!("split parameter s={s} outside 1..={n}")));
        }
        Ok(VarSpace { m, n, s })
    }

    /// Number of `z` variables, `m·N`.
    pub fn nz(&self) -> usize {
        self.m * self.n
    }

    /// Number of `w` variables, `m²`.
    pub fn nw(&self) -> usize {
        self.m * self.m
    }

    /// Length of a full exponent vector `(Z | Z̄ | W)`.
    pub fn nvars(&self) -> usize {
        2 * self.nz() + self.nw()
    }

    pub fn z_var(&self, a: usize, c: usize) -> usize {
        a * self.n + c
    }

    pub fn zbar_var(&self, a: usize, c: usize) -> usize {
        self.nz() + a * self.n + c
    }

    pub fn w_var(&self, a: usize, b: usize) -> usize {
        2 * self.nz() + a * self.m + b
    }

    /// Same shapes, ignoring the split metadata.
    pub fn same_shape(&self, other: &VarSpace) -> bool {
        self.m == other.m && self.n == other.n
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum IndexKind {
    /// `m×N`, exponents of `Z` (or `Z̄`).
    Z,
    /// `m×m`, exponents of `W`.
    W,
}

impl IndexKind {
    pub fn shape(self, space: &VarSpace) -> (usize, usize) {
        match self {
            IndexKind::Z => (space.m, space.n),
            IndexKind::W => (space.m, space.m),
        }
    }
}

/// Exponent matrix of a `Z`-type or `W`-type monomial, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    kind: IndexKind,
    rows: usize,
    cols: usize,
    exps: Vec<u32>,
}

impl MultiIndex {
    pub fn new(kind: IndexKind, space: &VarSpace, matrix: &[Vec<u32>]) -> Result<Self> {
        let (rows, cols) = kind.shape(space);
        if matrix.len() != rows || matrix.iter().any(|r| r.len() != cols) {
            return Err(Error::Shape(format!(
                "{kind:?} multi-index must be {rows}x{cols}, got {}x{}",
                matrix.len(),
                matrix.first().map_or(0, |r| r.len())
            )));
        }
        Ok(MultiIndex { kind, rows, cols, exps: matrix.concat() })
    }

    pub fn from_flat(kind: IndexKind, space: &VarSpace, exps: Vec<u32>) -> Result<Self> {
        let (rows, cols) = kind.shape(space);
        if exps.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{kind:?} multi-index needs {} entries, got {}",
                rows * cols,
                exps.len()
            )));
        }
        Ok(MultiIndex { kind, rows, cols, exps })
    }

    pub fn zero(kind: IndexKind, space: &VarSpace) -> Self {
        let (rows, cols) = kind.shape(space);
        MultiIndex { kind, rows, cols, exps: vec![0; rows * cols] }
    }

    pub fn kind(&self) -> IndexKind {
        self.kind
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn flat(&self) -> &[u32] {
        &self.exps
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.exps[r * self.cols + c]
    }

    /// `|I|`, the sum of all entries.
    pub fn length(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn to_matrix(&self) -> Vec<Vec<u32>> {
        self.exps.chunks(self.cols).map(|r| r.to_vec()).collect()
    }

    /// `I! = Π i_ab!`.
    pub fn factorial(&self) -> BigInt {
        self.exps.iter().map(|&e| factorial(e)).product()
    }
}

pub fn factorial(e: u32) -> BigInt {
    (1..=e).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// All exponent vectors of length `d` summing to `p`, lexicographically
/// descending (`[p,0,…]` first).
pub fn compositions(d: usize, p: u32) -> Vec<Vec<u32>> {
    fn rec(d: usize, p: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if d == 1 {
            prefix.push(p);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in (0..=p).rev() {
            prefix.push(first);
            rec(d - 1, p - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if d == 0 {
        if p == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(d, p, &mut Vec::with_capacity(d), &mut out);
    out
}

/// All multi-indices of `kind` with `|I| = p`, lexicographically descending.
pub fn enumerate_multiindices(kind: IndexKind, space: &VarSpace, p: u32) -> Vec<MultiIndex> {
    let (rows, cols) = kind.shape(space);
    compositions(rows * cols, p)
        .into_iter()
        .map(|exps| MultiIndex { kind, rows, cols, exps })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom(n: u64, k: u64) -> u64 {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn enumerate_examples() {
        let s1 = VarSpace::new(1, 1).unwrap();
        let w = enumerate_multiindices(IndexKind::W, &s1, 2);
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].to_matrix(), vec![vec![2]]);

        let s12 = VarSpace::new(1, 2).unwrap();
        let z = enumerate_multiindices(IndexKind::Z, &s12, 1);
        assert_eq!(
            z.iter().map(|i| i.to_matrix()).collect::<Vec<_>>(),
            vec![vec![vec![1, 0]], vec![vec![0, 1]]]
        );

        let s2 = VarSpace::new(2, 1).unwrap();
        assert_eq!(enumerate_multiindices(IndexKind::W, &s2, 1).len(), 4);
    }

    #[test]
    fn enumerate_counts_match_binomial() {
        for m in 1..=2 {
            for n in 1..=3 {
                let sp = VarSpace::new(m, n).unwrap();
                for p in 0..=4u32 {
                    for kind in [IndexKind::Z, IndexKind::W] {
                        let d = match kind {
                            IndexKind::Z => sp.nz(),
                            IndexKind::W => sp.nw(),
                        } as u64;
                        let all = enumerate_multiindices(kind, &sp, p);
                        assert_eq!(all.len() as u64, binom(p as u64 + d - 1, p as u64));
                        assert!(all.iter().all(|i| i.length() == p));
                    }
                }
            }
        }
    }

    #[test]
    fn shape_checks() {
        let sp = VarSpace::new(2, 3).unwrap();
        assert!(MultiIndex::new(IndexKind::Z, &sp, &[vec![1, 0, 0], vec![0, 0, 0]]).is_ok());
        assert!(matches!(
            MultiIndex::new(IndexKind::W, &sp, &[vec![1, 0, 0], vec![0, 0, 0]]),
            Err(Error::Shape(_))
        ));
        assert!(VarSpace::new(0, 1).is_err());
        assert!(VarSpace::with_split(1, 2, 3).is_err());
    }
}
