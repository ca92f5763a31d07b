//! Fischer star operator, Fischer inner product and the generalized Fischer
//! decompositions with respect to products of the Hermitian forms
//! `⟨l_a, l_b⟩ = Σ_c z_ac·z̄_bc` built from the rows of `Z`.
//!
//! The inner product is extended multiplicatively to `Z̄`:
//! `⟨Z^A Z̄^B, Z^A Z̄^B⟩ = A!·B!`, distinct monomials orthogonal. Under this
//! product `P*` is the adjoint of multiplication by `P`, so a remainder in
//! `∩ ker(G*)` is exactly the orthogonal complement of `Σ G·(multipliers)`.

use std::collections::BTreeMap;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactalg::{min_norm_point, solve_sparse, Field, GaussianRational, SparseVec};
use crate::polyring::{
    bihomogeneous_monomials, enumerate_multiindices, IndexKind, Monomial, MultiIndex, Polynomial, VarSpace,
};

/// `P*(target) = Σ conj(p_M)·∂^M target`.
pub fn star_apply(p: &Polynomial, target: &Polynomial) -> Result<Polynomial> {
    if !p.space().same_shape(target.space()) {
        return Err(Error::Shape("star_apply over different spaces".into()));
    }
    let mut out = Polynomial::zero(*target.space());
    for (mono, c) in p.terms() {
        let d = target.differentiate_by(mono);
        out = out.try_add(&d.scale(&c.conj()))?;
    }
    Ok(out)
}

/// Fischer inner product; conjugate-linear in the second argument.
pub fn fischer_inner(p: &Polynomial, q: &Polynomial) -> GaussianRational {
    p.fischer_pairing(q)
}

/// `⟨l_a, l_b⟩ = Σ_c z_ac·z̄_bc` (zero-based `a`, `b`).
pub fn hermitian_form(space: VarSpace, a: usize, b: usize) -> Polynomial {
    let mut out = Polynomial::zero(space);
    for c in 0..space.n {
        out = &out + &(&Polynomial::z(space, a, c) * &Polynomial::zbar(space, b, c));
    }
    out
}

/// `q_J = Π_{a,b} ⟨l_a, l_b⟩^{j_ab}` for an `m×m` multi-index `J`.
pub fn hermitian_form_product(space: VarSpace, j: &MultiIndex) -> Result<Polynomial> {
    if j.kind() != IndexKind::W || j.shape() != (space.m, space.m) {
        return Err(Error::Shape(format!("J must be {}x{} (W kind)", space.m, space.m)));
    }
    let mut out = Polynomial::one(space);
    for a in 0..space.m {
        for b in 0..space.m {
            let e = j.get(a, b);
            if e == 0 {
                continue;
            }
            let form = hermitian_form(space, a, b);
            for _ in 0..e {
                out = &out * &form;
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    /// `p ≥ n`: `P = Σ Q_J(Z)·q_J + R`.
    High,
    /// `p < n`: `P = z_jj·Σ conj(Q_J(Z))·q_J + R′`, `j` one-based.
    Low { j: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct FischerDecomposition {
    pub space: VarSpace,
    pub bidegree: (u32, u32),
    pub variant: Variant,
    /// Quotients keyed by `J`; every `J` of the index set is present.
    pub quotients: BTreeMap<MultiIndex, Polynomial>,
    pub remainder: Polynomial,
    /// Dimension of the linear relations among the spanning products
    /// `generator·multiplier`; quotients are the minimum-norm choice when
    /// this is positive.
    pub dependency_dim: usize,
}

impl FischerDecomposition {
    pub fn diagonal_index(&self) -> Option<usize> {
        match self.variant {
            Variant::High => None,
            Variant::Low { j } => Some(j),
        }
    }

    /// `Σ_J Q_J q_J` (high) or `z_jj Σ_J conj(Q_J) q_J` (low).
    pub fn span_part(&self) -> Result<Polynomial> {
        let mut acc = Polynomial::zero(self.space);
        for (j, q) in &self.quotients {
            let form = hermitian_form_product(self.space, j)?;
            let term = match self.variant {
                Variant::High => q * &form,
                Variant::Low { j: d } => {
                    &(&Polynomial::z(self.space, d - 1, d - 1) * &q.conjugate()) * &form
                }
            };
            acc = &acc + &term;
        }
        Ok(acc)
    }

    pub fn reconstruct(&self) -> Result<Polynomial> {
        Ok(&self.span_part()? + &self.remainder)
    }

    /// The differential operators whose common kernel holds the remainder.
    pub fn generators(&self) -> Result<Vec<Polynomial>> {
        let js: Vec<MultiIndex> = self.quotients.keys().cloned().collect();
        generators_for(self.space, self.variant, &js)
    }

    /// `G*(R) = 0` for every generator `G`.
    pub fn remainder_in_kernel(&self) -> Result<bool> {
        for g in self.generators()? {
            if !star_apply(&g, &self.remainder)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn generators_for(space: VarSpace, variant: Variant, js: &[MultiIndex]) -> Result<Vec<Polynomial>> {
    js.iter()
        .map(|j| {
            let q = hermitian_form_product(space, j)?;
            Ok(match variant {
                Variant::High => q,
                Variant::Low { j: d } => &Polynomial::z(space, d - 1, d - 1) * &q,
            })
        })
        .collect()
}

/// Index set, generators and multiplier monomials for a decomposition of
/// bidegree `(p, n)`.
struct Layout {
    js: Vec<MultiIndex>,
    generators: Vec<Polynomial>,
    multipliers: Vec<Monomial>,
}

fn layout(space: VarSpace, (p, n): (u32, u32), variant: Variant) -> Result<Layout> {
    match variant {
        Variant::High => {
            if p < n {
                return Err(Error::Bidegree(format!("high decomposition needs p ≥ n, got ({p},{n})")));
            }
            let js = enumerate_multiindices(IndexKind::W, &space, n);
            let generators = generators_for(space, variant, &js)?;
            Ok(Layout { js, generators, multipliers: bihomogeneous_monomials(&space, p - n, 0) })
        }
        Variant::Low { j } => {
            if p >= n {
                return Err(Error::Bidegree(format!("low decomposition needs p < n, got ({p},{n})")));
            }
            if j == 0 || j > space.m.min(space.n) {
                return Err(Error::Index(format!(
                    "diagonal index j={j} outside 1..={}",
                    space.m.min(space.n)
                )));
            }
            if p == 0 {
                return Ok(Layout { js: Vec::new(), generators: Vec::new(), multipliers: Vec::new() });
            }
            let js = enumerate_multiindices(IndexKind::W, &space, p - 1);
            let generators = generators_for(space, variant, &js)?;
            Ok(Layout { js, generators, multipliers: bihomogeneous_monomials(&space, 0, n - p + 1) })
        }
    }
}

fn check_bihomogeneous(p: &Polynomial, bideg: (u32, u32)) -> Result<()> {
    if p.is_zero() {
        return Ok(());
    }
    match p.bihomogeneous_degree() {
        Some(d) if d == bideg => Ok(()),
        other => Err(Error::Bidegree(format!(
            "polynomial is not bihomogeneous of bidegree {bideg:?} (found {other:?})"
        ))),
    }
}

/// Solves `G_g*(P − Σ c_{g',h'}·G_{g'}·h') = 0` for all `g` and returns the
/// minimum-norm coefficients together with the remainder.
fn project(
    space: VarSpace,
    target: &Polynomial,
    lay: &Layout,
) -> Result<(Vec<Vec<GaussianRational>>, Polynomial, usize)> {
    let nh = lay.multipliers.len();
    let ng = lay.generators.len();
    if ng == 0 || nh == 0 {
        return Ok((vec![Vec::new(); ng], target.clone(), 0));
    }
    let hpos: BTreeMap<&Monomial, usize> = lay.multipliers.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let ncols = ng * nh;
    let spanning: Vec<Polynomial> = (0..ncols)
        .map(|col| {
            let (g, h) = (col / nh, col % nh);
            &lay.generators[g] * &Polynomial::from_term(space, lay.multipliers[h].clone(), GaussianRational::from_int(1))
        })
        .collect();
    // rows[(g, h)] = coefficient of multiplier h in G_g*(·)
    let mut rows: Vec<BTreeMap<usize, GaussianRational>> = vec![BTreeMap::new(); ng * nh];
    let mut rhs: Vec<GaussianRational> = vec![GaussianRational::default(); ng * nh];
    for (g, gen) in lay.generators.iter().enumerate() {
        for (col, s) in spanning.iter().enumerate() {
            let img = star_apply(gen, s)?;
            for (mono, c) in img.terms() {
                let h = *hpos.get(mono).ok_or_else(|| Error::Bidegree("star image outside multiplier space".into()))?;
                rows[g * nh + h].insert(col, c.clone());
            }
        }
        for (mono, c) in star_apply(gen, target)?.terms() {
            let h = *hpos.get(mono).ok_or_else(|| Error::Bidegree("star image outside multiplier space".into()))?;
            rhs[g * nh + h] = c.clone();
        }
    }
    let sol = solve_sparse(ncols, rows.into_iter().zip(rhs).map(|(r, b)| (r.into_iter().collect::<SparseVec<_>>(), b)))?;
    let base = sol.particular.clone().ok_or_else(|| Error::InconsistentSystem {
        degree: 0,
        detail: "Fischer projection system inconsistent".into(),
    })?;
    let dependency = sol.kernel_basis.len();
    let weights: Vec<GaussianRational> = (0..ncols)
        .map(|col| GaussianRational::real(BigRational::from_integer(lay.multipliers[col % nh].factorial())))
        .collect();
    let (coeffs, _) = min_norm_point(&base, &sol.kernel_basis, |c| weights[c].clone());
    let dense = crate::exactalg::densify(&coeffs, ncols);
    let mut remainder = target.clone();
    for (col, c) in dense.iter().enumerate() {
        if !Field::is_zero(c) {
            remainder = &remainder - &spanning[col].scale(c);
        }
    }
    Ok((dense.chunks(nh).map(|r| r.to_vec()).collect(), remainder, dependency))
}

fn decompose(p: &Polynomial, bideg: (u32, u32), variant: Variant) -> Result<FischerDecomposition> {
    check_bihomogeneous(p, bideg)?;
    let space = *p.space();
    let lay = layout(space, bideg, variant)?;
    let (coeffs, remainder, dependency_dim) = project(space, p, &lay)?;
    let mut quotients = BTreeMap::new();
    for (g, j) in lay.js.iter().enumerate() {
        let mut q = Polynomial::zero(space);
        for (h, c) in coeffs[g].iter().enumerate() {
            q.add_term(lay.multipliers[h].clone(), c.clone());
        }
        // Low variant: the multiplier is antiholomorphic and equals conj(Q).
        let q = match variant {
            Variant::High => q,
            Variant::Low { .. } => q.conjugate(),
        };
        quotients.insert(j.clone(), q);
    }
    Ok(FischerDecomposition { space, bidegree: bideg, variant, quotients, remainder, dependency_dim })
}

/// Decomposition for bidegree `(p, n)` with `p ≥ n`.
pub fn decompose_high(p: &Polynomial, bidegree: (u32, u32)) -> Result<FischerDecomposition> {
    decompose(p, bidegree, Variant::High)
}

/// Decomposition for bidegree `(p, n)` with `p < n` and prefactor `z_jj`
/// (`j` one-based, at most `min(m, N)`).
pub fn decompose_low(p: &Polynomial, bidegree: (u32, u32), j: usize) -> Result<FischerDecomposition> {
    decompose(p, bidegree, Variant::Low { j })
}

pub fn decompose_variant(p: &Polynomial, bidegree: (u32, u32), variant: Variant) -> Result<FischerDecomposition> {
    decompose(p, bidegree, variant)
}

/// Exact basis of `{R of bidegree (p,n) : G*(R) = 0 for every generator}`,
/// in reduced echelon form over the monomial enumeration order.
pub fn kernel_basis(space: VarSpace, bidegree: (u32, u32), variant: Variant) -> Result<Vec<Polynomial>> {
    let lay = layout(space, bidegree, variant)?;
    let monos = bihomogeneous_monomials(&space, bidegree.0, bidegree.1);
    let hpos: BTreeMap<&Monomial, usize> = lay.multipliers.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let nh = lay.multipliers.len();
    let mut rows: Vec<BTreeMap<usize, GaussianRational>> = vec![BTreeMap::new(); lay.generators.len() * nh];
    for (col, mono) in monos.iter().enumerate() {
        let poly = Polynomial::from_term(space, mono.clone(), GaussianRational::from_int(1));
        for (g, gen) in lay.generators.iter().enumerate() {
            for (img, c) in star_apply(gen, &poly)?.terms() {
                let h = hpos[img];
                rows[g * nh + h].insert(col, c.clone());
            }
        }
    }
    let sol = solve_sparse(
        monos.len(),
        rows.into_iter().map(|r| (r.into_iter().collect::<SparseVec<_>>(), GaussianRational::default())),
    )?;
    Ok(sol
        .kernel_basis
        .iter()
        .map(|v| {
            let mut p = Polynomial::zero(space);
            for (c, x) in v {
                p.add_term(monos[*c].clone(), x.clone());
            }
            p
        })
        .collect())
}

/// Default variant used by dimension tables: high when `p ≥ n`, otherwise
/// low with `j = 1`.
pub fn default_variant(bidegree: (u32, u32)) -> Variant {
    if bidegree.0 >= bidegree.1 {
        Variant::High
    } else {
        Variant::Low { j: 1 }
    }
}

/// Kernel dimensions over all bidegrees `(p, n)` with `p, n ≤ max`.
pub fn kernel_dimension_table(space: VarSpace, max: u32) -> Result<Vec<((u32, u32), usize, usize)>> {
    let mut out = Vec::new();
    for p in 0..=max {
        for n in 0..=max {
            let basis = kernel_basis(space, (p, n), default_variant((p, n)))?;
            let total = bihomogeneous_monomials(&space, p, n).len();
            out.push(((p, n), basis.len(), total));
        }
    }
    Ok(out)
}

/// Flat coefficient vector helper used by tests and oracles.
pub fn coefficient_vector(p: &Polynomial, monos: &[Monomial]) -> Vec<GaussianRational> {
    monos.iter().map(|m| p.coeff(m)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g(n: i64) -> GaussianRational {
        GaussianRational::from_int(n)
    }

    fn sp(m: usize, n: usize) -> VarSpace {
        VarSpace::new(m, n).unwrap()
    }

    #[test]
    fn star_examples() {
        let s = sp(1, 1);
        let z = Polynomial::z(s, 0, 0);
        let zb = Polynomial::zbar(s, 0, 0);
        let zzb = &z * &zb;
        assert_eq!(star_apply(&zzb, &(&(&z * &z) * &zb)).unwrap(), z.scale(&g(2)));
        let izzb = zzb.scale(&GaussianRational::i());
        assert_eq!(star_apply(&izzb, &zzb).unwrap(), Polynomial::constant(s, -GaussianRational::i()));

        let s2 = sp(1, 2);
        let q = hermitian_form(s2, 0, 0);
        let cross = &Polynomial::z(s2, 0, 0) * &Polynomial::zbar(s2, 0, 1);
        assert!(star_apply(&q, &cross).unwrap().is_zero());
    }

    #[test]
    fn inner_product_examples() {
        let s = sp(1, 2);
        let z11 = Polynomial::z(s, 0, 0);
        let z12 = Polynomial::z(s, 0, 1);
        assert_eq!(fischer_inner(&(&z11 * &z11), &(&z11 * &z11)), g(2));
        assert_eq!(fischer_inner(&z11, &z12), g(0));
        let mixed = &z11 * &Polynomial::zbar(s, 0, 1);
        assert_eq!(fischer_inner(&mixed, &mixed), g(1));
        // adjunction cross-check of the mixed value: <1·mixed, mixed> = <1, mixed*(mixed)>
        let one = Polynomial::one(s);
        assert_eq!(fischer_inner(&one, &star_apply(&mixed, &mixed).unwrap()), g(1));
    }

    #[test]
    fn hermitian_form_product_examples() {
        let s12 = sp(1, 2);
        let j = MultiIndex::new(IndexKind::W, &s12, &[vec![1]]).unwrap();
        let expect = &(&Polynomial::z(s12, 0, 0) * &Polynomial::zbar(s12, 0, 0))
            + &(&Polynomial::z(s12, 0, 1) * &Polynomial::zbar(s12, 0, 1));
        assert_eq!(hermitian_form_product(s12, &j).unwrap(), expect);
        let j0 = MultiIndex::zero(IndexKind::W, &s12);
        assert_eq!(hermitian_form_product(s12, &j0).unwrap(), Polynomial::one(s12));
        let s21 = sp(2, 1);
        let j = MultiIndex::new(IndexKind::W, &s21, &[vec![0, 1], vec![0, 0]]).unwrap();
        assert_eq!(
            hermitian_form_product(s21, &j).unwrap(),
            &Polynomial::z(s21, 0, 0) * &Polynomial::zbar(s21, 1, 0)
        );
    }

    #[test]
    fn decompose_high_examples() {
        let s = sp(1, 2);
        let q = hermitian_form(s, 0, 0);
        let j1 = MultiIndex::new(IndexKind::W, &s, &[vec![1]]).unwrap();

        let d = decompose_high(&q, (1, 1)).unwrap();
        assert_eq!(d.quotients[&j1], Polynomial::one(s));
        assert!(d.remainder.is_zero());

        let p = &Polynomial::z(s, 0, 0) * &Polynomial::zbar(s, 0, 0);
        let d = decompose_high(&p, (1, 1)).unwrap();
        let half = GaussianRational::from_fracs(1, 2, 0, 1);
        assert_eq!(d.quotients[&j1], Polynomial::constant(s, half.clone()));
        let r = (&p - &(&Polynomial::z(s, 0, 1) * &Polynomial::zbar(s, 0, 1))).scale(&half);
        assert_eq!(d.remainder, r);
        assert!(star_apply(&q, &d.remainder).unwrap().is_zero());

        let p = &Polynomial::z(s, 0, 0) * &Polynomial::zbar(s, 0, 1);
        let d = decompose_high(&p, (1, 1)).unwrap();
        assert!(d.quotients[&j1].is_zero());
        assert_eq!(d.remainder, p);
    }

    #[test]
    fn decompose_low_examples() {
        let s = sp(1, 1);
        let zb = Polynomial::zbar(s, 0, 0);
        let z = Polynomial::z(s, 0, 0);
        let p = &zb * &zb;
        let d = decompose_low(&p, (0, 2), 1).unwrap();
        assert!(d.quotients.is_empty());
        assert_eq!(d.remainder, p);

        let p = &z * &(&zb * &zb);
        let d = decompose_low(&p, (1, 2), 1).unwrap();
        let j0 = MultiIndex::zero(IndexKind::W, &s);
        assert_eq!(d.quotients[&j0], &z * &z);
        assert!(d.remainder.is_zero());
        assert_eq!(d.reconstruct().unwrap(), p);

        let s2 = sp(1, 2);
        let p = &(&Polynomial::z(s2, 0, 0) * &Polynomial::zbar(s2, 0, 0)) * &Polynomial::zbar(s2, 0, 1);
        let d = decompose_low(&p, (1, 2), 1).unwrap();
        assert_eq!(d.reconstruct().unwrap(), p);
        assert!(d.remainder_in_kernel().unwrap());
        // p itself is z11·conj(z11 z12): fully captured
        assert!(d.remainder.is_zero());
    }

    #[test]
    fn decomposition_errors() {
        let s = sp(1, 2);
        let p = &Polynomial::z(s, 0, 0) * &Polynomial::zbar(s, 0, 0);
        assert!(matches!(decompose_high(&p, (2, 0)), Err(Error::Bidegree(_))));
        let low = &p * &Polynomial::zbar(s, 0, 1);
        assert!(matches!(decompose_high(&low, (1, 2)), Err(Error::Bidegree(_))));
        assert!(matches!(decompose_low(&low, (1, 2), 2), Err(Error::Index(_))));
        assert!(matches!(decompose_low(&p, (1, 1), 1), Err(Error::Bidegree(_))));
        let mixed = &p + &Polynomial::z(s, 0, 0);
        assert!(matches!(decompose_high(&mixed, (1, 1)), Err(Error::Bidegree(_))));
    }

    #[test]
    fn kernel_basis_examples() {
        let b = kernel_basis(sp(1, 2), (1, 1), Variant::High).unwrap();
        assert_eq!(b.len(), 3);
        let s = sp(1, 2);
        let q = hermitian_form(s, 0, 0);
        for r in &b {
            assert!(star_apply(&q, r).unwrap().is_zero());
        }
        assert!(kernel_basis(sp(1, 1), (1, 1), Variant::High).unwrap().is_empty());
        for (m, n) in [(1, 1), (1, 2), (2, 2)] {
            assert!(kernel_basis(sp(m, n), (3, 0), Variant::High).unwrap().is_empty());
        }
    }

    #[test]
    fn dependent_generators_are_reported() {
        // m=2, N=1: <l1,l1><l2,l2> = <l1,l2><l2,l1>
        let s = sp(2, 1);
        let p = &(&Polynomial::z(s, 0, 0) * &Polynomial::zbar(s, 0, 0))
            * &(&Polynomial::z(s, 1, 0) * &Polynomial::zbar(s, 1, 0));
        let d = decompose_high(&p, (2, 2)).unwrap();
        assert!(d.dependency_dim > 0);
        assert!(d.remainder.is_zero());
        assert_eq!(d.reconstruct().unwrap(), p);
    }

    fn arb_bihom(space: VarSpace, p: u32, n: u32) -> impl Strategy<Value = Polynomial> {
        let monos = bihomogeneous_monomials(&space, p, n);
        let k = monos.len();
        prop::collection::vec((-3i64..4, -3i64..4), k).prop_map(move |cs| {
            let mut out = Polynomial::zero(space);
            for (m, (a, b)) in monos.iter().zip(cs) {
                out.add_term(m.clone(), GaussianRational::from_fracs(a, 1, b, 1));
            }
            out
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn adjunction_holds(
            (q, f, gg) in (1usize..3, 1usize..3, 0u32..2, 0u32..2, 0u32..2, 0u32..2)
                .prop_flat_map(|(m, n, a, b, c, d)| {
                    let s = VarSpace::new(m, n).unwrap();
                    (arb_bihom(s, a, b), arb_bihom(s, c, d), arb_bihom(s, a + c, b + d))
                })
        ) {
            prop_assert_eq!(fischer_inner(&(&q * &f), &gg), fischer_inner(&f, &star_apply(&q, &gg).unwrap()));
        }

        #[test]
        fn high_reconstruction_and_idempotence(
            p in (1usize..3, 1usize..3, 0u32..3).prop_flat_map(|(m, n, k)| {
                let s = VarSpace::new(m, n).unwrap();
                arb_bihom(s, k + 1, k.min(1))
            })
        ) {
            let bideg = p.bihomogeneous_degree().unwrap_or((0, 0));
            prop_assume!(!p.is_zero());
            let d = decompose_high(&p, bideg).unwrap();
            prop_assert_eq!(d.reconstruct().unwrap(), p.clone());
            prop_assert!(d.remainder_in_kernel().unwrap());
            if !d.remainder.is_zero() {
                let again = decompose_high(&d.remainder, bideg).unwrap();
                prop_assert!(again.quotients.values().all(Polynomial::is_zero));
                prop_assert_eq!(again.remainder, d.remainder);
            }
        }
    }
}
