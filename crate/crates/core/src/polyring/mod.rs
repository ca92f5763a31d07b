//! Sparse polynomials in the matrix variables `Z` (m×N), `Z̄` and `W` (m×m).

mod index;
pub mod json;
mod matrix;
mod poly;

pub use index::{compositions, enumerate_multiindices, factorial, IndexKind, MultiIndex, VarSpace};
pub use matrix::MatrixPolynomial;
pub use poly::{DegreeBound, Grading, Monomial, Polynomial};

use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolyOp {
    Add,
    Mul,
}

pub fn poly_arith(p: &Polynomial, q: &Polynomial, op: PolyOp) -> Result<Polynomial> {
    match op {
        PolyOp::Add => p.try_add(q),
        PolyOp::Mul => p.try_mul(q),
    }
}

/// All monomials of bidegree `(p, n)` in `(Z, Z̄)`, in enumeration order.
pub fn bihomogeneous_monomials(space: &VarSpace, p: u32, n: u32) -> Vec<Monomial> {
    let zs = enumerate_multiindices(IndexKind::Z, space, p);
    let zbs = enumerate_multiindices(IndexKind::Z, space, n);
    let w0 = MultiIndex::zero(IndexKind::W, space);
    let mut out = Vec::with_capacity(zs.len() * zbs.len());
    for a in &zs {
        for b in &zbs {
            out.push(Monomial::from_indices(space, a, b, &w0).expect("shapes from space"));
        }
    }
    out
}

/// Holomorphic monomials `Z^I W^J` of weighted degree `d` (`w` of weight 2).
pub fn weighted_holomorphic_monomials(space: &VarSpace, d: u32) -> Vec<Monomial> {
    let z0 = MultiIndex::zero(IndexKind::Z, space);
    let mut out = Vec::new();
    for l in 0..=d / 2 {
        let k = d - 2 * l;
        for i in enumerate_multiindices(IndexKind::Z, space, k) {
            for j in enumerate_multiindices(IndexKind::W, space, l) {
                out.push(Monomial::from_indices(space, &i, &z0, &j).expect("shapes from space"));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests;
