//! Exact linear solving by incremental sparse Gaussian elimination.
//!
//! Rows are reduced against the current pivot set as they arrive, pivots are
//! chosen as the first surviving column, and the final echelon form is
//! back-reduced to RREF. The kernel basis is read off the free columns, one
//! vector per free column in increasing order, which makes it canonical for a
//! fixed column ordering.

use std::collections::BTreeMap;

use super::scalar::{Field, GaussianRational};
use crate::error::{Error, Result};

/// Sparse vector as sorted `(column, value)` pairs without explicit zeros.
pub type SparseVec<F> = Vec<(usize, F)>;

/// Result of an exact solve.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSolution<F> {
    /// `None` when the system is inconsistent.
    pub particular: Option<Vec<F>>,
    pub kernel_basis: Vec<Vec<F>>,
}

/// Sparse counterpart of [`LinearSolution`]; used for the large degree-step
/// systems.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSolution<F> {
    pub ncols: usize,
    pub rank: usize,
    pub particular: Option<SparseVec<F>>,
    pub kernel_basis: Vec<SparseVec<F>>,
    pub pivot_cols: Vec<usize>,
}

impl<F: Field> SparseSolution<F> {
    pub fn particular_dense(&self) -> Option<Vec<F>> {
        self.particular.as_ref().map(|p| densify(p, self.ncols))
    }

    pub fn kernel_dense(&self) -> Vec<Vec<F>> {
        self.kernel_basis.iter().map(|v| densify(v, self.ncols)).collect()
    }
}

pub fn densify<F: Field>(v: &[(usize, F)], n: usize) -> Vec<F> {
    let mut out = vec![F::zero(); n];
    for (c, x) in v {
        out[*c] = x.clone();
    }
    out
}

pub fn sparsify<F: Field>(v: &[F]) -> SparseVec<F> {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(c, x)| (c, x.clone()))
        .collect()
}

/// Incremental row-echelon accumulator. Column `ncols` holds the right-hand
/// side.
pub struct Echelon<F> {
    ncols: usize,
    pivots: BTreeMap<usize, BTreeMap<usize, F>>,
    inconsistent: bool,
}

impl<F: Field> Echelon<F> {
    pub fn new(ncols: usize) -> Self {
        Echelon { ncols, pivots: BTreeMap::new(), inconsistent: false }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_inconsistent(&self) -> bool {
        self.inconsistent
    }

    /// Adds the equation `Σ coeffs·x = rhs`. Returns true when it raised the
    /// rank.
    pub fn push(&mut self, coeffs: impl IntoIterator<Item = (usize, F)>, rhs: F) -> Result<bool> {
        let mut row: BTreeMap<usize, F> = BTreeMap::new();
        for (c, v) in coeffs {
            if c >= self.ncols {
                return Err(Error::Shape(format!("column {c} out of range {}", self.ncols)));
            }
            if v.is_zero() {
                continue;
            }
            let e = row.entry(c).or_insert_with(F::zero);
            *e = e.add_ref(&v);
            if e.is_zero() {
                row.remove(&c);
            }
        }
        if !rhs.is_zero() {
            row.insert(self.ncols, rhs);
        }
        self.reduce(&mut row);
        match row.iter().next() {
            None => Ok(false),
            Some((&c, _)) if c == self.ncols => {
                self.inconsistent = true;
                Ok(false)
            }
            Some((&c, v)) => {
                let inv = v.inv().expect("nonzero pivot");
                for x in row.values_mut() {
                    *x = x.mul_ref(&inv);
                }
                self.pivots.insert(c, row);
                Ok(true)
            }
        }
    }

    fn reduce(&self, row: &mut BTreeMap<usize, F>) {
        let mut cursor = 0usize;
        loop {
            let hit = row
                .range(cursor..self.ncols)
                .find(|(c, _)| self.pivots.contains_key(c))
                .map(|(c, v)| (*c, v.clone()));
            let Some((c, factor)) = hit else { break };
            let prow = &self.pivots[&c];
            for (k, pv) in prow {
                let delta = pv.mul_ref(&factor);
                let e = row.entry(*k).or_insert_with(F::zero);
                *e = e.sub_ref(&delta);
                if e.is_zero() {
                    row.remove(k);
                }
            }
            cursor = c + 1;
        }
    }

    /// Back-reduces to RREF and extracts particular solution and kernel.
    pub fn finish(mut self) -> SparseSolution<F> {
        self.back_reduce();
        self.extract()
    }

    /// Rows of the reduced row echelon form, without the right-hand side.
    pub fn reduced_rows(mut self) -> Vec<SparseVec<F>> {
        self.back_reduce();
        let n = self.ncols;
        self.pivots.into_values().map(|row| row.into_iter().filter(|(c, _)| *c < n).collect()).collect()
    }

    fn back_reduce(&mut self) {
        let cols: Vec<usize> = self.pivots.keys().rev().copied().collect();
        for &a in &cols {
            let mut row = self.pivots.remove(&a).unwrap();
            let hits: Vec<usize> = row
                .range(a + 1..self.ncols)
                .filter(|(c, _)| self.pivots.contains_key(c))
                .map(|(c, _)| *c)
                .collect();
            for b in hits {
                let factor = match row.get(&b) {
                    Some(f) => f.clone(),
                    None => continue,
                };
                for (k, pv) in &self.pivots[&b] {
                    let delta = pv.mul_ref(&factor);
                    let e = row.entry(*k).or_insert_with(F::zero);
                    *e = e.sub_ref(&delta);
                    if e.is_zero() {
                        row.remove(k);
                    }
                }
            }
            self.pivots.insert(a, row);
        }
    }

    fn extract(self) -> SparseSolution<F> {
        let pivot_cols: Vec<usize> = self.pivots.keys().copied().collect();
        let particular = if self.inconsistent {
            None
        } else {
            Some(
                self.pivots
                    .iter()
                    .filter_map(|(c, row)| row.get(&self.ncols).map(|v| (*c, v.clone())))
                    .collect(),
            )
        };
        let mut kernel: BTreeMap<usize, Vec<(usize, F)>> = BTreeMap::new();
        for c in 0..self.ncols {
            if !self.pivots.contains_key(&c) {
                kernel.insert(c, vec![(c, F::one())]);
            }
        }
        for (p, row) in &self.pivots {
            for (c, v) in row.range(..self.ncols) {
                if c != p {
                    kernel.get_mut(c).unwrap().push((*p, v.neg_ref()));
                }
            }
        }
        let kernel_basis = kernel
            .into_values()
            .map(|mut v| {
                v.sort_by_key(|(c, _)| *c);
                v
            })
            .collect();
        SparseSolution {
            ncols: self.ncols,
            rank: pivot_cols.len(),
            particular,
            kernel_basis,
            pivot_cols,
        }
    }
}

/// Solves a sparse system given as rows of `(coefficients, rhs)`.
pub fn solve_sparse<F: Field>(
    ncols: usize,
    rows: impl IntoIterator<Item = (SparseVec<F>, F)>,
) -> Result<SparseSolution<F>> {
    let mut ech = Echelon::new(ncols);
    for (coeffs, rhs) in rows {
        ech.push(coeffs, rhs)?;
    }
    Ok(ech.finish())
}

/// Dense exact solve `A·x = b` over the Gaussian rationals.
pub fn solve_exact(
    a: &[Vec<GaussianRational>],
    b: &[GaussianRational],
) -> Result<LinearSolution<GaussianRational>> {
    solve_dense(a, b)
}

pub fn solve_dense<F: Field>(a: &[Vec<F>], b: &[F]) -> Result<LinearSolution<F>> {
    if a.len() != b.len() {
        return Err(Error::Shape(format!("{} rows but rhs of length {}", a.len(), b.len())));
    }
    let ncols = a.first().map_or(0, |r| r.len());
    if a.iter().any(|r| r.len() != ncols) {
        return Err(Error::Shape("ragged coefficient matrix".into()));
    }
    let sol = solve_sparse(
        ncols,
        a.iter().zip(b).map(|(row, rhs)| (sparsify(row), rhs.clone())),
    )?;
    Ok(LinearSolution { particular: sol.particular_dense(), kernel_basis: sol.kernel_dense() })
}

/// Rank of a set of sparse vectors of length `ncols`.
pub fn rank_of<F: Field>(ncols: usize, vectors: &[SparseVec<F>]) -> usize {
    let mut ech = Echelon::new(ncols);
    for v in vectors {
        ech.push(v.iter().cloned(), F::zero()).expect("in-range columns");
    }
    ech.rank()
}

/// `Σ coeffs_i · v_i` for sparse vectors.
pub fn combine<F: Field>(terms: &[(F, &SparseVec<F>)]) -> SparseVec<F> {
    let mut acc: BTreeMap<usize, F> = BTreeMap::new();
    for (c, v) in terms {
        if c.is_zero() {
            continue;
        }
        for (k, x) in v.iter() {
            let e = acc.entry(*k).or_insert_with(F::zero);
            *e = e.add_ref(&x.mul_ref(c));
        }
    }
    acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
}

pub fn add_sparse<F: Field>(a: &SparseVec<F>, b: &SparseVec<F>) -> SparseVec<F> {
    combine(&[(F::one(), a), (F::one(), b)])
}

/// Point of `base + span(directions)` of minimum weighted norm
/// `Σ w_k · |x_k|²`, together with the coefficients `t` of the directions
/// used (`result = base + Σ t_j d_j`). Weights must be positive.
///
/// The minimiser is the unique point whose difference from `base` lies in the
/// span and which is orthogonal to every direction under the weighted
/// product, so it depends only on the affine space, not on the choice of
/// `base` or of spanning set.
pub fn min_norm_point<F: Field>(
    base: &SparseVec<F>,
    directions: &[SparseVec<F>],
    weight: impl Fn(usize) -> F,
) -> (SparseVec<F>, Vec<F>) {
    let k = directions.len();
    if k == 0 {
        return (base.clone(), Vec::new());
    }
    // column -> [(direction index, value)]
    let mut by_col: BTreeMap<usize, Vec<(usize, F)>> = BTreeMap::new();
    for (j, d) in directions.iter().enumerate() {
        for (c, v) in d {
            by_col.entry(*c).or_default().push((j, v.clone()));
        }
    }
    let mut gram: Vec<BTreeMap<usize, F>> = vec![BTreeMap::new(); k];
    let mut rhs: Vec<F> = vec![F::zero(); k];
    let base_map: BTreeMap<usize, &F> = base.iter().map(|(c, v)| (*c, v)).collect();
    for (c, entries) in &by_col {
        let w = weight(*c);
        for (i, di) in entries {
            let cdi = di.conj_ref().mul_ref(&w);
            for (j, dj) in entries {
                let e = gram[*i].entry(*j).or_insert_with(F::zero);
                *e = e.add_ref(&cdi.mul_ref(dj));
            }
            if let Some(x) = base_map.get(c) {
                rhs[*i] = rhs[*i].sub_ref(&cdi.mul_ref(x));
            }
        }
    }
    let sol = solve_sparse(
        k,
        gram.into_iter()
            .zip(rhs)
            .map(|(row, r)| (row.into_iter().filter(|(_, v)| !v.is_zero()).collect(), r)),
    )
    .expect("gram system is square");
    let t = sol
        .particular_dense()
        .expect("normal equations of a positive weighted product are consistent");
    let terms: Vec<(F, &SparseVec<F>)> =
        std::iter::once((F::one(), base)).chain(t.iter().cloned().zip(directions.iter())).collect();
    (combine(&terms), t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::scalar::rat;
    use num_rational::BigRational;

    fn g(n: i64) -> GaussianRational {
        GaussianRational::from_int(n)
    }

    #[test]
    fn identity_system() {
        let a = vec![vec![g(1), g(0)], vec![g(0), g(1)]];
        let b = vec![g(1), GaussianRational::i()];
        let s = solve_exact(&a, &b).unwrap();
        assert_eq!(s.particular, Some(vec![g(1), GaussianRational::i()]));
        assert!(s.kernel_basis.is_empty());
    }

    #[test]
    fn underdetermined_system() {
        let s = solve_exact(&[vec![g(1), g(1)]], &[g(0)]).unwrap();
        assert_eq!(s.particular, Some(vec![g(0), g(0)]));
        assert_eq!(s.kernel_basis, vec![vec![g(-1), g(1)]]);
    }

    #[test]
    fn inconsistent_system() {
        let s = solve_exact(&[vec![g(1)], vec![g(1)]], &[g(1), g(2)]).unwrap();
        assert_eq!(s.particular, None);
    }

    #[test]
    fn shape_errors() {
        assert!(matches!(solve_exact(&[vec![g(1)]], &[]), Err(Error::Shape(_))));
        assert!(matches!(
            solve_exact(&[vec![g(1)], vec![g(1), g(2)]], &[g(0), g(0)]),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn min_norm_is_orthogonal_projection() {
        // minimise x² + y² on x + y = 2 -> (1, 1)
        let base: SparseVec<BigRational> = vec![(0, rat(2, 1))];
        let dir = vec![vec![(0, rat(-1, 1)), (1, rat(1, 1))]];
        let (x, _) = min_norm_point(&base, &dir, |_| rat(1, 1));
        assert_eq!(x, vec![(0, rat(1, 1)), (1, rat(1, 1))]);
        // weight 3 on y: minimise x² + 3y² -> (3/2, 1/2)
        let (x, _) = min_norm_point(&base, &dir, |c| if c == 1 { rat(3, 1) } else { rat(1, 1) });
        assert_eq!(x, vec![(0, rat(3, 2)), (1, rat(1, 2))]);
    }
}
