//! Exact Gaussian-rational scalars and exact linear solving.

mod matrix;
mod scalar;
mod solve;

pub use matrix::{
    mat_conj_transpose, mat_identity, mat_inverse, mat_is_square, mat_is_unitary, mat_mul, mat_rank, mat_scale,
    mat_shape, mat_zero, CMatrix,
};

pub use scalar::{format_rational, parse_rational, rat, Field, GaussianRational};
pub use solve::{
    add_sparse, combine, densify, min_norm_point, rank_of, solve_dense, solve_exact, solve_sparse,
    sparsify, Echelon, LinearSolution, SparseSolution, SparseVec,
};

pub use num_rational::BigRational;

use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalarOp {
    Add,
    Sub,
    Mul,
    Div,
    /// Conjugates the first operand; the second is ignored.
    Conj,
}

pub fn scalar_arith(a: &GaussianRational, b: &GaussianRational, op: ScalarOp) -> Result<GaussianRational> {
    Ok(match op {
        ScalarOp::Add => a + b,
        ScalarOp::Sub => a - b,
        ScalarOp::Mul => a * b,
        ScalarOp::Div => a.checked_div(b)?,
        ScalarOp::Conj => a.conj(),
    })
}
