use super::scalar::{Field, GaussianRational};
use super::solve::{rank_of, solve_dense, sparsify};
use crate::error::{Error, Result};

/// Dense row-major matrix of exact complex scalars.
pub type CMatrix = Vec<Vec<GaussianRational>>;

pub fn mat_identity(n: usize) -> CMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| GaussianRational::from_int((i == j) as i64)).collect())
        .collect()
}

pub fn mat_zero(r: usize, c: usize) -> CMatrix {
    vec![vec![GaussianRational::default(); c]; r]
}

pub fn mat_shape(a: &CMatrix) -> (usize, usize) {
    (a.len(), a.first().map_or(0, Vec::len))
}

pub fn mat_mul(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let (r, k) = mat_shape(a);
    let (k2, c) = mat_shape(b);
    if k != k2 {
        return Err(Error::Shape(format!("cannot multiply {r}x{k} by {k2}x{c}")));
    }
    let mut out = mat_zero(r, c);
    for i in 0..r {
        for l in 0..k {
            if Field::is_zero(&a[i][l]) {
                continue;
            }
            for j in 0..c {
                out[i][j] += &(&a[i][l] * &b[l][j]);
            }
        }
    }
    Ok(out)
}

pub fn mat_conj_transpose(a: &CMatrix) -> CMatrix {
    let (r, c) = mat_shape(a);
    (0..c).map(|j| (0..r).map(|i| a[i][j].conj()).collect()).collect()
}

pub fn mat_scale(a: &CMatrix, s: &GaussianRational) -> CMatrix {
    a.iter().map(|r| r.iter().map(|x| x * s).collect()).collect()
}

pub fn mat_is_square(a: &CMatrix) -> bool {
    let (r, c) = mat_shape(a);
    r == c && a.iter().all(|row| row.len() == c)
}

pub fn mat_rank(a: &CMatrix) -> usize {
    let (_, c) = mat_shape(a);
    let rows: Vec<_> = a.iter().map(|r| sparsify(r)).collect();
    rank_of(c, &rows)
}

/// Exact inverse; `Rank` error when singular.
pub fn mat_inverse(a: &CMatrix) -> Result<CMatrix> {
    if !mat_is_square(a) {
        return Err(Error::Shape("inverse of a non-square matrix".into()));
    }
    let n = a.len();
    let id = mat_identity(n);
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let b: Vec<GaussianRational> = id.iter().map(|r| r[j].clone()).collect();
        let sol = solve_dense(a, &b)?;
        if !sol.kernel_basis.is_empty() {
            return Err(Error::Rank("matrix is singular".into()));
        }
        cols.push(sol.particular.ok_or_else(|| Error::Rank("matrix is singular".into()))?);
    }
    Ok((0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect())
}

pub fn mat_is_unitary(u: &CMatrix) -> bool {
    mat_is_square(u)
        && mat_mul(u, &mat_conj_transpose(u)).map(|p| p == mat_identity(u.len())).unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(a: i64, b: i64, c: i64, d: i64) -> GaussianRational {
        GaussianRational::from_fracs(a, b, c, d)
    }

    #[test]
    fn inverse_and_unitary() {
        let a = vec![vec![g(2, 1, 0, 1), g(0, 1, 1, 1)], vec![g(1, 1, 0, 1), g(3, 1, 0, 1)]];
        let inv = mat_inverse(&a).unwrap();
        assert_eq!(mat_mul(&a, &inv).unwrap(), mat_identity(2));
        let rot = vec![vec![g(3, 5, 0, 1), g(4, 5, 0, 1)], vec![g(-4, 5, 0, 1), g(3, 5, 0, 1)]];
        assert!(mat_is_unitary(&rot));
        assert!(!mat_is_unitary(&a));
        let sing = vec![vec![g(1, 1, 0, 1), g(2, 1, 0, 1)], vec![g(2, 1, 0, 1), g(4, 1, 0, 1)]];
        assert!(matches!(mat_inverse(&sing), Err(Error::Rank(_))));
        assert_eq!(mat_rank(&sing), 1);
    }
}
