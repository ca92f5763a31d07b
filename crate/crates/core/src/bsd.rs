//! BSD models `W = Z·Z̄ᵗ`, perturbed real-formal submanifolds
//! `W = Z·Z̄ᵗ + Σ φ_{k,l}(Z, Z̄)`, the embedding-dimension condition and exact
//! linear automorphisms `Z ↦ A·Z·U`, `W ↦ A·W·Aᴴ`.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactalg::{
    mat_conj_transpose, mat_identity, mat_inverse, mat_is_square, mat_is_unitary, mat_mul, CMatrix,
    GaussianRational,
};
use crate::fischer::hermitian_form;
use crate::mapeq::FormalMap;
use crate::polyring::json::{polynomial_from_terms, polynomial_to_json, ScalarJson, TermJson};
use crate::polyring::{DegreeBound, Grading, MatrixPolynomial, Polynomial, VarSpace};

/// `(m, N, s)`; identical to the variable-space shape of the model.
pub type ModelDims = VarSpace;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BsdModel {
    pub dims: ModelDims,
}

impl BsdModel {
    pub fn new(dims: ModelDims) -> Self {
        BsdModel { dims }
    }

    pub fn defining_matrix(&self) -> MatrixPolynomial {
        model_defining_matrix(self)
    }
}

/// `m×m` matrix with entries `⟨l_a, l_b⟩ = Σ_c z_ac z̄_bc`.
pub fn model_defining_matrix(model: &BsdModel) -> MatrixPolynomial {
    let s = model.dims;
    let mut out = MatrixPolynomial::zero(s, s.m, s.m);
    for a in 0..s.m {
        for b in 0..s.m {
            out.set(a, b, hermitian_form(s, a, b));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EmbeddingReport {
    pub m_le_mp: bool,
    pub n_le_np: bool,
    pub codim_bound: bool,
    pub holds: bool,
    pub clauses: Vec<String>,
}

/// `m ≤ m′`, `N ≤ N′` and `N′ − m′ < 2(N − m)`.
pub fn check_embedding_condition(src: ModelDims, dst: ModelDims) -> EmbeddingReport {
    let (m, n, mp, np) = (src.m as i64, src.n as i64, dst.m as i64, dst.n as i64);
    let m_le_mp = m <= mp;
    let n_le_np = n <= np;
    let codim_bound = np - mp < 2 * (n - m);
    let clauses = vec![
        format!("m ≤ m′: {m} ≤ {mp}: {m_le_mp}"),
        format!("N ≤ N′: {n} ≤ {np}: {n_le_np}"),
        format!("N′−m′ < 2(N−m): {} < {}: {codim_bound}", np - mp, 2 * (n - m)),
    ];
    EmbeddingReport { m_le_mp, n_le_np, codim_bound, holds: m_le_mp && n_le_np && codim_bound, clauses }
}

/// `Z ↦ [[Z,0],[0,0]]`, `W ↦ [[W,0],[0,0]]`, stored through weighted degree `d`.
pub fn standard_embedding(src: ModelDims, dst: ModelDims, d: u32) -> Result<FormalMap> {
    FormalMap::standard(src, dst, d)
}

/// `W = Z·Z̄ᵗ + Σ φ_{k,l}`, with every `φ_{k,l}` an `m×m` matrix of
/// bihomogeneous polynomials of bidegree `(k,l)`, `3 ≤ k+l ≤ D`, and
/// `φ_{k,l}^{a,b} = conj(φ_{l,k}^{b,a})`.
#[derive(Clone, Debug, PartialEq)]
pub struct Submanifold {
    model: BsdModel,
    d: u32,
    phi: BTreeMap<(u32, u32), MatrixPolynomial>,
}

impl Submanifold {
    pub fn flat(model: BsdModel, d: u32) -> Self {
        Submanifold { model, d, phi: BTreeMap::new() }
    }

    pub fn new(model: BsdModel, d: u32, phi: BTreeMap<(u32, u32), MatrixPolynomial>) -> Result<Self> {
        let s = model.dims;
        let mut kept = BTreeMap::new();
        for (&(k, l), mp) in &phi {
            if k + l < 3 || k + l > d {
                return Err(Error::Bidegree(format!("φ_({k},{l}) outside 3 ≤ k+l ≤ {d}")));
            }
            if mp.rows() != s.m || mp.cols() != s.m || !mp.space().same_shape(&s) {
                return Err(Error::Shape(format!("φ_({k},{l}) must be {}x{} over the model space", s.m, s.m)));
            }
            for p in mp.entries() {
                if p.has_w() || p.terms().keys().any(|mo| mo.degrees(&s).0 != k || mo.degrees(&s).1 != l) {
                    return Err(Error::Bidegree(format!("φ_({k},{l}) entry is not bihomogeneous of bidegree ({k},{l})")));
                }
            }
            if !mp.is_zero() {
                kept.insert((k, l), mp.clone());
            }
        }
        let sub = Submanifold { model, d, phi: kept };
        sub.check_hermitian()?;
        Ok(sub)
    }

    fn check_hermitian(&self) -> Result<()> {
        let s = self.model.dims;
        for (&(k, l), mp) in &self.phi {
            let zero = MatrixPolynomial::zero(s, s.m, s.m);
            let partner = self.phi.get(&(l, k)).unwrap_or(&zero);
            if *mp != partner.conj_transpose() {
                return Err(Error::Shape(format!("φ_({k},{l}) violates φ_(k,l)^(a,b) = conj(φ_(l,k)^(b,a))")));
            }
        }
        Ok(())
    }

    pub fn model(&self) -> &BsdModel {
        &self.model
    }

    pub fn dims(&self) -> ModelDims {
        self.model.dims
    }

    pub fn truncation(&self) -> u32 {
        self.d
    }

    pub fn phi(&self) -> &BTreeMap<(u32, u32), MatrixPolynomial> {
        &self.phi
    }

    pub fn is_flat(&self) -> bool {
        self.phi.is_empty()
    }

    /// `Σ φ_{k,l}` as one matrix.
    pub fn phi_total(&self) -> MatrixPolynomial {
        let s = self.model.dims;
        let mut acc = MatrixPolynomial::zero(s, s.m, s.m);
        for mp in self.phi.values() {
            acc = acc.add(mp).expect("same shapes");
        }
        acc
    }

    /// Right-hand side `Z·Z̄ᵗ + Σ φ_{k,l}`.
    pub fn defining_rhs(&self) -> MatrixPolynomial {
        model_defining_matrix(&self.model).add(&self.phi_total()).expect("same shapes")
    }

    pub fn to_json(&self) -> SubmanifoldJson {
        SubmanifoldJson {
            dims: self.model.dims,
            d: self.d,
            phi: self
                .phi
                .iter()
                .map(|(&(k, l), mp)| PhiJson {
                    k,
                    l,
                    entries: mp
                        .to_rows()
                        .iter()
                        .map(|r| r.iter().map(|p| polynomial_to_json(p).terms).collect())
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn from_json(doc: &SubmanifoldJson) -> Result<Self> {
        let s = VarSpace::with_split(doc.dims.m, doc.dims.n, doc.dims.s)?;
        let mut phi = BTreeMap::new();
        for block in &doc.phi {
            let rows = block
                .entries
                .iter()
                .map(|r| r.iter().map(|t| polynomial_from_terms(s, t)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            let mp = MatrixPolynomial::from_rows(s, rows)?;
            if phi.insert((block.k, block.l), mp).is_some() {
                return Err(Error::Parse(format!("duplicate φ block ({}, {})", block.k, block.l)));
            }
        }
        Submanifold::new(BsdModel::new(s), doc.d, phi)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("serializable")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let doc: SubmanifoldJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json(&doc)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiJson {
    pub k: u32,
    pub l: u32,
    pub entries: Vec<Vec<Vec<TermJson>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubmanifoldJson {
    pub dims: ModelDims,
    #[serde(rename = "D")]
    pub d: u32,
    #[serde(default)]
    pub phi: Vec<PhiJson>,
}

/// `Z ↦ A·Z·U`, `W ↦ A·W·Aᴴ` with `A` invertible and `U` exactly unitary.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearAuto {
    a: CMatrix,
    u: CMatrix,
}

impl LinearAuto {
    pub fn new(a: CMatrix, u: CMatrix) -> Result<Self> {
        if a.is_empty() || u.is_empty() || !mat_is_square(&a) || !mat_is_square(&u) {
            return Err(Error::Shape("A and U must be non-empty square matrices".into()));
        }
        mat_inverse(&a)?;
        if !mat_is_unitary(&u) {
            return Err(Error::Shape("U is not unitary".into()));
        }
        Ok(LinearAuto { a, u })
    }

    pub fn identity(dims: ModelDims) -> Self {
        LinearAuto { a: mat_identity(dims.m), u: mat_identity(dims.n) }
    }

    pub fn a(&self) -> &CMatrix {
        &self.a
    }

    pub fn u(&self) -> &CMatrix {
        &self.u
    }

    pub fn m(&self) -> usize {
        self.a.len()
    }

    pub fn n(&self) -> usize {
        self.u.len()
    }

    pub fn fits(&self, dims: ModelDims) -> bool {
        self.m() == dims.m && self.n() == dims.n
    }

    pub fn is_identity(&self) -> bool {
        self.a == mat_identity(self.m()) && self.u == mat_identity(self.n())
    }

    pub fn inverse(&self) -> LinearAuto {
        LinearAuto { a: mat_inverse(&self.a).expect("invertible"), u: mat_conj_transpose(&self.u) }
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &LinearAuto) -> Result<LinearAuto> {
        Ok(LinearAuto { a: mat_mul(&self.a, &other.a)?, u: mat_mul(&other.u, &self.u)? })
    }

    /// Images of the `Z`, `Z̄` and `W` variables of `dims` as polynomials over
    /// `target`, in variable-block order.
    pub fn variable_images(&self, dims: ModelDims, target: VarSpace) -> Result<(Vec<Polynomial>, Vec<Polynomial>, Vec<Polynomial>)> {
        if !self.fits(dims) || !target.same_shape(&dims) {
            return Err(Error::Shape("automorphism does not match the model dimensions".into()));
        }
        let (m, n) = (dims.m, dims.n);
        let mut z = Vec::with_capacity(m * n);
        for a in 0..m {
            for c in 0..n {
                let mut p = Polynomial::zero(target);
                for b in 0..m {
                    for e in 0..n {
                        let coef = &self.a[a][b] * &self.u[e][c];
                        p = &p + &Polynomial::z(target, b, e).scale(&coef);
                    }
                }
                z.push(p);
            }
        }
        let zbar = z.iter().map(Polynomial::conjugate).collect();
        let mut w = Vec::with_capacity(m * m);
        for a in 0..m {
            for b in 0..m {
                let mut p = Polynomial::zero(target);
                for c in 0..m {
                    for d in 0..m {
                        let coef = &self.a[a][c] * &self.a[b][d].conj();
                        p = &p + &Polynomial::w(target, c, d).scale(&coef);
                    }
                }
                w.push(p);
            }
        }
        Ok((z, zbar, w))
    }

    /// Substitutes the automorphism into every entry of `mp`.
    pub fn pull_back(&self, mp: &MatrixPolynomial) -> Result<MatrixPolynomial> {
        let s = *mp.space();
        let (z, zb, w) = self.variable_images(s, s)?;
        mp.try_map(|p| p.substitute(s, &z, &zb, &w, DegreeBound::None))
    }

    /// Pushes a submanifold forward:
    /// `φ′(Z′) = A·φ(A⁻¹·Z′·U⁻¹, conj)·Aᴴ`.
    pub fn apply_to_submanifold(&self, sub: &Submanifold) -> Result<Submanifold> {
        let dims = sub.dims();
        let inv = self.inverse();
        let mut phi = BTreeMap::new();
        let a = MatrixPolynomial::constant(dims, &self.a)?;
        let ah = MatrixPolynomial::constant(dims, &mat_conj_transpose(&self.a))?;
        for (&kl, mp) in sub.phi() {
            let pulled = inv.pull_back(mp)?;
            phi.insert(kl, a.mul(&pulled)?.mul(&ah)?);
        }
        Submanifold::new(*sub.model(), sub.truncation(), phi)
    }

    pub fn to_json(&self) -> LinearAutoJson {
        let conv = |m: &CMatrix| m.iter().map(|r| r.iter().map(ScalarJson::from).collect()).collect();
        LinearAutoJson { a: conv(&self.a), u: conv(&self.u) }
    }

    pub fn from_json(doc: &LinearAutoJson) -> Result<Self> {
        let conv = |m: &Vec<Vec<ScalarJson>>| -> Result<CMatrix> {
            m.iter().map(|r| r.iter().map(ScalarJson::parse).collect()).collect()
        };
        LinearAuto::new(conv(&doc.a)?, conv(&doc.u)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearAutoJson {
    #[serde(rename = "A")]
    pub a: Vec<Vec<ScalarJson>>,
    #[serde(rename = "U")]
    pub u: Vec<Vec<ScalarJson>>,
}

/// Objects a linear automorphism can act on.
#[derive(Clone, Debug)]
pub enum AutoTarget {
    Submanifold(Submanifold),
    /// Precompose: `H ∘ auto` (auto of the source model).
    MapSource(FormalMap),
    /// Postcompose: `auto ∘ H` (auto of the target model).
    MapTarget(FormalMap),
}

pub fn apply_linear_auto(auto: &LinearAuto, object: &AutoTarget) -> Result<AutoTarget> {
    Ok(match object {
        AutoTarget::Submanifold(s) => AutoTarget::Submanifold(auto.apply_to_submanifold(s)?),
        AutoTarget::MapSource(h) => AutoTarget::MapSource(h.precompose(auto)?),
        AutoTarget::MapTarget(h) => AutoTarget::MapTarget(h.postcompose(auto)?),
    })
}

const PHASES: [(i64, i64, i64); 9] =
    [(1, 0, 1), (0, 1, 1), (-1, 0, 1), (0, -1, 1), (3, 4, 5), (3, -4, 5), (-4, 3, 5), (5, 12, 13), (8, -15, 17)];
const ROTATIONS: [(i64, i64, i64); 4] = [(3, 4, 5), (5, 12, 13), (8, 15, 17), (4, 3, 5)];

/// Random exact unitary: a signed permutation with unit phases times a
/// rational rotation in a random coordinate plane times a diagonal phase.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let phase = |rng: &mut R| {
        let (a, b, d) = PHASES[rng.gen_range(0..PHASES.len())];
        GaussianRational::from_fracs(a, d, b, d)
    };
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    let mut p = vec![vec![GaussianRational::default(); n]; n];
    for (i, &j) in perm.iter().enumerate() {
        p[i][j] = phase(rng);
    }
    let mut r = mat_identity(n);
    if n >= 2 {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let (c, s, d) = ROTATIONS[rng.gen_range(0..ROTATIONS.len())];
        let (c, s) = (GaussianRational::from_fracs(c, d, 0, 1), GaussianRational::from_fracs(s, d, 0, 1));
        r[i][i] = c.clone();
        r[j][j] = c;
        r[i][j] = s.clone();
        r[j][i] = -s;
    }
    let mut dg = mat_identity(n);
    for (i, row) in dg.iter_mut().enumerate() {
        row[i] = phase(rng);
    }
    mat_mul(&mat_mul(&p, &r).expect("square"), &dg).expect("square")
}

/// Random invertible matrix with small Gaussian-integer entries.
pub fn random_invertible<R: Rng + ?Sized>(m: usize, rng: &mut R) -> CMatrix {
    loop {
        let a: CMatrix = (0..m)
            .map(|_| {
                (0..m)
                    .map(|_| GaussianRational::from_fracs(rng.gen_range(-3..4), 1, rng.gen_range(-2..3), 1))
                    .collect()
            })
            .collect();
        if mat_inverse(&a).is_ok() {
            return a;
        }
    }
}

pub fn random_linear_auto<R: Rng + ?Sized>(dims: ModelDims, rng: &mut R) -> LinearAuto {
    LinearAuto::new(random_invertible(dims.m, rng), random_unitary(dims.n, rng)).expect("valid by construction")
}

/// Bidegree-`(k,l)` part of every entry, over `(Z, Z̄)`.
pub fn bidegree_block(mp: &MatrixPolynomial, k: u32, l: u32) -> MatrixPolynomial {
    mp.bidegree_component(k, l, Grading::ZZbar)
}
