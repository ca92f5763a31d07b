use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;

use super::index::{IndexKind, MultiIndex, VarSpace};
use crate::error::{Error, Result};
use crate::exactalg::{Field, GaussianRational};

/// Exponent vector laid out as `(Z | Z̄ | W)`, each block row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Vec<u32>,
}

/// Graded lexicographic: lower total degree first, then larger leading
/// exponent first, scanning `Z`, then `Z̄`, then `W`.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let d1: u32 = self.exps.iter().sum();
        let d2: u32 = other.exps.iter().sum();
        d1.cmp(&d2).then_with(|| other.exps.cmp(&self.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Monomial {
    pub fn one(space: &VarSpace) -> Self {
        Monomial { exps: vec![0; space.nvars()] }
    }

    pub fn from_exps(exps: Vec<u32>) -> Self {
        Monomial { exps }
    }

    pub fn from_indices(space: &VarSpace, iz: &MultiIndex, izbar: &MultiIndex, jw: &MultiIndex) -> Result<Self> {
        check_index(space, iz, IndexKind::Z, "Z")?;
        check_index(space, izbar, IndexKind::Z, "Z̄")?;
        check_index(space, jw, IndexKind::W, "W")?;
        let mut exps = Vec::with_capacity(space.nvars());
        exps.extend_from_slice(iz.flat());
        exps.extend_from_slice(izbar.flat());
        exps.extend_from_slice(jw.flat());
        Ok(Monomial { exps })
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial { exps: self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect() }
    }

    pub fn z_block<'a>(&'a self, space: &VarSpace) -> &'a [u32] {
        &self.exps[..space.nz()]
    }

    pub fn zbar_block<'a>(&'a self, space: &VarSpace) -> &'a [u32] {
        &self.exps[space.nz()..2 * space.nz()]
    }

    pub fn w_block<'a>(&'a self, space: &VarSpace) -> &'a [u32] {
        &self.exps[2 * space.nz()..]
    }

    pub fn z_index(&self, space: &VarSpace) -> MultiIndex {
        MultiIndex::from_flat(IndexKind::Z, space, self.z_block(space).to_vec()).unwrap()
    }

    pub fn zbar_index(&self, space: &VarSpace) -> MultiIndex {
        MultiIndex::from_flat(IndexKind::Z, space, self.zbar_block(space).to_vec()).unwrap()
    }

    pub fn w_index(&self, space: &VarSpace) -> MultiIndex {
        MultiIndex::from_flat(IndexKind::W, space, self.w_block(space).to_vec()).unwrap()
    }

    /// `(deg_Z, deg_Z̄, deg_W)`.
    pub fn degrees(&self, space: &VarSpace) -> (u32, u32, u32) {
        (
            self.z_block(space).iter().sum(),
            self.zbar_block(space).iter().sum(),
            self.w_block(space).iter().sum(),
        )
    }

    pub fn total_degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    /// Degree with `z`, `z̄` of weight 1 and `w` of weight 2.
    pub fn weighted_degree(&self, space: &VarSpace) -> u32 {
        let (a, b, c) = self.degrees(space);
        a + b + 2 * c
    }

    /// Swaps the `Z` and `Z̄` blocks; `W` is left in place.
    pub fn swap_z(&self, space: &VarSpace) -> Monomial {
        let nz = space.nz();
        let mut exps = Vec::with_capacity(self.exps.len());
        exps.extend_from_slice(&self.exps[nz..2 * nz]);
        exps.extend_from_slice(&self.exps[..nz]);
        exps.extend_from_slice(&self.exps[2 * nz..]);
        Monomial { exps }
    }

    /// Product of factorials of every exponent.
    pub fn factorial(&self) -> num_bigint::BigInt {
        self.exps.iter().map(|&e| super::index::factorial(e)).product()
    }
}

fn check_index(space: &VarSpace, idx: &MultiIndex, kind: IndexKind, what: &str) -> Result<()> {
    if idx.kind() != kind || idx.shape() != kind.shape(space) {
        return Err(Error::Shape(format!(
            "{what} exponent block has shape {:?} ({:?}), expected {:?}",
            idx.shape(),
            idx.kind(),
            kind.shape(space)
        )));
    }
    Ok(())
}

/// Degree bookkeeping used by [`Polynomial::bidegree_component`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Grading {
    /// `(deg_Z, deg_Z̄)`.
    ZZbar,
    /// `(deg_Z, deg_W)`.
    ZW,
}

/// Truncation applied during substitution and products.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DegreeBound {
    None,
    /// Drop terms of total degree above the bound.
    Total(u32),
    /// Drop terms of weighted degree (`w` counted twice) above the bound.
    Weighted(u32),
}

impl DegreeBound {
    fn keeps(&self, space: &VarSpace, m: &Monomial) -> bool {
        match *self {
            DegreeBound::None => true,
            DegreeBound::Total(d) => m.total_degree() <= d,
            DegreeBound::Weighted(d) => m.weighted_degree(space) <= d,
        }
    }
}

/// Sparse polynomial in `(Z, Z̄, W)` with Gaussian-rational coefficients.
/// `Z̄` is an independent formal variable block.
#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial {
    space: VarSpace,
    terms: BTreeMap<Monomial, GaussianRational>,
}

impl Polynomial {
    pub fn zero(space: VarSpace) -> Self {
        Polynomial { space, terms: BTreeMap::new() }
    }

    pub fn constant(space: VarSpace, c: GaussianRational) -> Self {
        Self::from_term(space, Monomial::one(&space), c)
    }

    pub fn one(space: VarSpace) -> Self {
        Self::constant(space, GaussianRational::from_int(1))
    }

    pub fn from_term(space: VarSpace, mono: Monomial, c: GaussianRational) -> Self {
        let mut p = Self::zero(space);
        p.add_term(mono, c);
        p
    }

    fn var(space: VarSpace, idx: usize) -> Self {
        let mut e = vec![0; space.nvars()];
        e[idx] = 1;
        Self::from_term(space, Monomial { exps: e }, GaussianRational::from_int(1))
    }

    /// `z_{a,c}` with zero-based indices.
    pub fn z(space: VarSpace, a: usize, c: usize) -> Self {
        Self::var(space, space.z_var(a, c))
    }

    pub fn zbar(space: VarSpace, a: usize, c: usize) -> Self {
        Self::var(space, space.zbar_var(a, c))
    }

    pub fn w(space: VarSpace, a: usize, b: usize) -> Self {
        Self::var(space, space.w_var(a, b))
    }

    /// `c · Z^{I_Z} Z̄^{I_Z̄} W^{J_W}`.
    pub fn monomial(
        space: VarSpace,
        iz: &MultiIndex,
        izbar: &MultiIndex,
        jw: &MultiIndex,
        c: GaussianRational,
    ) -> Result<Self> {
        let mono = Monomial::from_indices(&space, iz, izbar, jw)?;
        Ok(Self::from_term(space, mono, c))
    }

    pub fn space(&self) -> &VarSpace {
        &self.space
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, GaussianRational> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<Monomial, GaussianRational> {
        self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> GaussianRational {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// Adds `c·m`, keeping the no-zero-coefficient invariant.
    pub fn add_term(&mut self, m: Monomial, c: GaussianRational) {
        if Field::is_zero(&c) {
            return;
        }
        debug_assert_eq!(m.exps.len(), self.space.nvars());
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if Field::is_zero(o.get()) {
                    o.remove();
                }
            }
        }
    }

    fn check_space(&self, other: &Polynomial) -> Result<()> {
        if !self.space.same_shape(&other.space) {
            return Err(Error::Shape(format!(
                "polynomials over different spaces ({}x{} vs {}x{})",
                self.space.m, self.space.n, other.space.m, other.space.n
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_space(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_space(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.mul_bounded(other, DegreeBound::None)
    }

    /// Product with terms beyond `bound` discarded.
    pub fn mul_bounded(&self, other: &Polynomial, bound: DegreeBound) -> Result<Polynomial> {
        self.check_space(other)?;
        let mut acc: HashMap<Monomial, GaussianRational> = HashMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let m = m1.mul(m2);
                if !bound.keeps(&self.space, &m) {
                    continue;
                }
                let c = c1 * c2;
                acc.entry(m).and_modify(|e| *e += &c).or_insert(c);
            }
        }
        Ok(Polynomial {
            space: self.space,
            terms: acc.into_iter().filter(|(_, c)| !Field::is_zero(c)).collect(),
        })
    }

    pub fn scale(&self, c: &GaussianRational) -> Polynomial {
        if Field::is_zero(c) {
            return Polynomial::zero(self.space);
        }
        Polynomial { space: self.space, terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect() }
    }

    pub fn scale_rational(&self, c: &BigRational) -> Polynomial {
        self.scale(&GaussianRational::real(c.clone()))
    }

    /// Terms selected by a predicate on the monomial.
    pub fn filter(&self, keep: impl Fn(&Monomial) -> bool) -> Polynomial {
        Polynomial {
            space: self.space,
            terms: self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    /// Terms of degree `k` in `Z` and degree `l` in `Z̄` (or in `W`).
    pub fn bidegree_component(&self, k: u32, l: u32, grading: Grading) -> Polynomial {
        let sp = self.space;
        self.filter(|m| {
            let (dz, dzb, dw) = m.degrees(&sp);
            match grading {
                Grading::ZZbar => dz == k && dzb == l,
                Grading::ZW => dz == k && dw == l,
            }
        })
    }

    /// Distinct `(k, l)` bidegrees present under `grading`.
    pub fn bidegrees(&self, grading: Grading) -> Vec<(u32, u32)> {
        let mut out: Vec<(u32, u32)> = self
            .terms
            .keys()
            .map(|m| {
                let (dz, dzb, dw) = m.degrees(&self.space);
                match grading {
                    Grading::ZZbar => (dz, dzb),
                    Grading::ZW => (dz, dw),
                }
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Single bidegree `(deg_Z, deg_Z̄)` if every term has it and there are
    /// no `W` exponents.
    pub fn bihomogeneous_degree(&self) -> Option<(u32, u32)> {
        let mut it = self.terms.keys().map(|m| m.degrees(&self.space));
        let first = it.next()?;
        if first.2 != 0 {
            return None;
        }
        if it.all(|d| d == first) {
            Some((first.0, first.1))
        } else {
            None
        }
    }

    pub fn homogeneous_part(&self, total: u32) -> Polynomial {
        self.filter(|m| m.total_degree() == total)
    }

    pub fn truncate_total(&self, max: u32) -> Polynomial {
        self.filter(|m| m.total_degree() <= max)
    }

    pub fn weighted_part(&self, d: u32) -> Polynomial {
        let sp = self.space;
        self.filter(|m| m.weighted_degree(&sp) == d)
    }

    pub fn truncate_weighted(&self, max: u32) -> Polynomial {
        let sp = self.space;
        self.filter(|m| m.weighted_degree(&sp) <= max)
    }

    pub fn max_total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.total_degree()).max()
    }

    pub fn max_weighted_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.weighted_degree(&self.space)).max()
    }

    pub fn has_w(&self) -> bool {
        self.terms.keys().any(|m| m.w_block(&self.space).iter().any(|&e| e > 0))
    }

    pub fn has_zbar(&self) -> bool {
        self.terms.keys().any(|m| m.zbar_block(&self.space).iter().any(|&e| e > 0))
    }

    /// Formal conjugate: swaps `Z` and `Z̄` exponents and conjugates the
    /// coefficients. `W` exponents are kept; conjugating `W` is a matrix-level
    /// operation (conjugate transpose) handled by the caller.
    pub fn conjugate(&self) -> Polynomial {
        Polynomial {
            space: self.space,
            terms: self.terms.iter().map(|(m, c)| (m.swap_z(&self.space), c.conj())).collect(),
        }
    }

    /// `∂^e / ∂x_var^e`.
    pub fn derivative(&self, var: usize, e: u32) -> Polynomial {
        if e == 0 {
            return self.clone();
        }
        let mut out = Polynomial::zero(self.space);
        for (m, c) in &self.terms {
            let have = m.exps[var];
            if have < e {
                continue;
            }
            let falling: i64 = (0..e).map(|k| (have - k) as i64).product();
            let mut exps = m.exps.clone();
            exps[var] -= e;
            out.add_term(Monomial { exps }, c * &GaussianRational::from_int(falling));
        }
        out
    }

    /// Applies `∂^{mono}` (all variables at once).
    pub fn differentiate_by(&self, mono: &Monomial) -> Polynomial {
        let mut out = Polynomial::zero(self.space);
        'terms: for (m, c) in &self.terms {
            let mut factor: i64 = 1;
            let mut exps = m.exps.clone();
            for (v, &e) in mono.exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if exps[v] < e {
                    continue 'terms;
                }
                for k in 0..e {
                    factor *= (exps[v] - k) as i64;
                }
                exps[v] -= e;
            }
            out.add_term(Monomial { exps }, c * &GaussianRational::from_int(factor));
        }
        out
    }

    /// Replaces every variable by a polynomial over `target`. Any slice may be
    /// shorter than its block only if the missing variables never occur.
    /// Terms outside `bound` are dropped as soon as they appear; this is exact
    /// provided no image has terms of negative degree (always true here).
    pub fn substitute(
        &self,
        target: VarSpace,
        z: &[Polynomial],
        zbar: &[Polynomial],
        w: &[Polynomial],
        bound: DegreeBound,
    ) -> Result<Polynomial> {
        let sp = self.space;
        let images: Vec<Option<&Polynomial>> = (0..sp.nvars())
            .map(|v| {
                if v < sp.nz() {
                    z.get(v)
                } else if v < 2 * sp.nz() {
                    zbar.get(v - sp.nz())
                } else {
                    w.get(v - 2 * sp.nz())
                }
            })
            .collect();
        let mut powers: HashMap<(usize, u32), Polynomial> = HashMap::new();
        let mut out = Polynomial::zero(target);
        for (m, c) in &self.terms {
            let mut acc = Polynomial::constant(target, c.clone());
            for (v, &e) in m.exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let img = images[v].ok_or_else(|| {
                    Error::Shape(format!("no image supplied for variable {v} in substitution"))
                })?;
                if !img.space.same_shape(&target) {
                    return Err(Error::Shape("substitution image over wrong space".into()));
                }
                let pw = power_cached(&mut powers, v, e, img, bound)?;
                acc = acc.mul_bounded(&pw, bound)?;
                if acc.is_zero() {
                    break;
                }
            }
            for (mm, cc) in acc.terms {
                out.add_term(mm, cc);
            }
        }
        Ok(out)
    }

    /// Re-expresses the polynomial over a space of identical shape but
    /// different split metadata.
    pub fn with_space(&self, space: VarSpace) -> Result<Polynomial> {
        if !space.same_shape(&self.space) {
            return Err(Error::Shape("with_space requires identical shapes".into()));
        }
        Ok(Polynomial { space, terms: self.terms.clone() })
    }

    /// Fischer-style Hermitian product of coefficient vectors,
    /// `Σ_M a_M · conj(b_M) · M!`.
    pub fn fischer_pairing(&self, other: &Polynomial) -> GaussianRational {
        let mut acc = GaussianRational::default();
        let (small, large, swap) =
            if self.terms.len() <= other.terms.len() { (self, other, false) } else { (other, self, true) };
        for (m, c) in &small.terms {
            if let Some(d) = large.terms.get(m) {
                let f = GaussianRational::real(BigRational::from_integer(m.factorial()));
                let prod = if swap { d * &c.conj() } else { c * &d.conj() };
                acc += &(&prod * &f);
            }
        }
        acc
    }
}

fn power_cached(
    cache: &mut HashMap<(usize, u32), Polynomial>,
    v: usize,
    e: u32,
    img: &Polynomial,
    bound: DegreeBound,
) -> Result<Polynomial> {
    if let Some(p) = cache.get(&(v, e)) {
        return Ok(p.clone());
    }
    let p = if e == 1 {
        img.filter(|m| bound.keeps(&img.space, m))
    } else {
        let prev = power_cached(cache, v, e - 1, img, bound)?;
        prev.mul_bounded(img, bound)?
    };
    cache.insert((v, e), p.clone());
    Ok(p)
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, o: &Polynomial) -> Polynomial {
        self.try_add(o).expect("polynomial space mismatch")
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, o: &Polynomial) -> Polynomial {
        self.try_sub(o).expect("polynomial space mismatch")
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, o: &Polynomial) -> Polynomial {
        self.try_mul(o).expect("polynomial space mismatch")
    }
}

impl<'a> Neg for &'a Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&GaussianRational::from_int(-1))
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let sp = self.space;
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mut factors = Vec::new();
            let name = |v: usize| -> String {
                if v < sp.nz() {
                    format!("z{}{}", v / sp.n + 1, v % sp.n + 1)
                } else if v < 2 * sp.nz() {
                    let u = v - sp.nz();
                    format!("zb{}{}", u / sp.n + 1, u % sp.n + 1)
                } else {
                    let u = v - 2 * sp.nz();
                    format!("w{}{}", u / sp.m + 1, u % sp.m + 1)
                }
            };
            for (v, &e) in m.exps.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(name(v)),
                    _ => factors.push(format!("{}^{}", name(v), e)),
                }
            }
            if factors.is_empty() {
                write!(f, "{c}")?;
            } else if *c == GaussianRational::from_int(1) {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{}*{}", c, factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial[{}x{}]({})", self.space.m, self.space.n, self)
    }
}
