use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bsd::{BsdModel, LinearAuto, ModelDims, Submanifold};
use crate::error::{Error, Result};
use crate::exactalg::{mat_conj_transpose, GaussianRational};
use crate::polyring::json::ScalarJson;
use crate::polyring::{DegreeBound, Grading, IndexKind, MatrixPolynomial, Monomial, MultiIndex, Polynomial, VarSpace};

/// Truncated formal map `H = (F, G)` from the source model space to the
/// target: `F` is `m′×N′`, `G` is `m′×m′`, both holomorphic polynomials in
/// `(Z, W)` of the source with weighted degree `1..=D` (`deg w = 2`).
#[derive(Clone, Debug, PartialEq)]
pub struct FormalMap {
    src: ModelDims,
    dst: ModelDims,
    d: u32,
    f: MatrixPolynomial,
    g: MatrixPolynomial,
}

/// Which component of the map a coefficient belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Component {
    F,
    G,
}

impl FormalMap {
    pub fn zero(src: ModelDims, dst: ModelDims, d: u32) -> Self {
        FormalMap {
            src,
            dst,
            d,
            f: MatrixPolynomial::zero(src, dst.m, dst.n),
            g: MatrixPolynomial::zero(src, dst.m, dst.m),
        }
    }

    pub fn new(src: ModelDims, dst: ModelDims, d: u32, f: MatrixPolynomial, g: MatrixPolynomial) -> Result<Self> {
        if f.rows() != dst.m || f.cols() != dst.n || g.rows() != dst.m || g.cols() != dst.m {
            return Err(Error::Shape(format!(
                "F must be {}x{} and G {}x{}",
                dst.m, dst.n, dst.m, dst.m
            )));
        }
        if !f.space().same_shape(&src) || !g.space().same_shape(&src) {
            return Err(Error::Shape("map components must live over the source space".into()));
        }
        for p in f.entries().iter().chain(g.entries()) {
            for mono in p.terms().keys() {
                let wd = mono.weighted_degree(&src);
                if mono.degrees(&src).1 != 0 {
                    return Err(Error::Shape("map components must be holomorphic in (Z, W)".into()));
                }
                if wd == 0 {
                    return Err(Error::Shape("map has a constant term".into()));
                }
                if wd > d {
                    return Err(Error::Truncation(format!("term of weighted degree {wd} exceeds D={d}")));
                }
            }
        }
        Ok(FormalMap { src, dst, d, f, g })
    }

    /// `Z ↦ [[Z,0],[0,0]]`, `W ↦ [[W,0],[0,0]]`.
    pub fn standard(src: ModelDims, dst: ModelDims, d: u32) -> Result<Self> {
        if src.m > dst.m || src.n > dst.n {
            return Err(Error::Dims(format!(
                "source ({},{}) does not fit into target ({},{})",
                src.m, src.n, dst.m, dst.n
            )));
        }
        let mut h = FormalMap::zero(src, dst, d);
        if d >= 1 {
            for a in 0..src.m {
                for c in 0..src.n {
                    h.f.set(a, c, Polynomial::z(src, a, c));
                }
            }
        }
        if d >= 2 {
            for a in 0..src.m {
                for b in 0..src.m {
                    h.g.set(a, b, Polynomial::w(src, a, b));
                }
            }
        }
        Ok(h)
    }

    pub fn src(&self) -> ModelDims {
        self.src
    }

    pub fn dst(&self) -> ModelDims {
        self.dst
    }

    pub fn truncation(&self) -> u32 {
        self.d
    }

    pub fn f(&self) -> &MatrixPolynomial {
        &self.f
    }

    pub fn g(&self) -> &MatrixPolynomial {
        &self.g
    }

    pub fn component(&self, c: Component) -> &MatrixPolynomial {
        match c {
            Component::F => &self.f,
            Component::G => &self.g,
        }
    }

    /// Adds `coef·mono` to entry `(r, c)` of a component; the truncation
    /// degree grows when needed.
    pub fn add_coeff(&mut self, comp: Component, r: usize, c: usize, mono: Monomial, coef: GaussianRational) {
        let wd = mono.weighted_degree(&self.src);
        self.d = self.d.max(wd);
        let target = match comp {
            Component::F => &mut self.f,
            Component::G => &mut self.g,
        };
        target.get_mut(r, c).add_term(mono, coef);
    }

    pub fn coeff(&self, comp: Component, r: usize, c: usize, mono: &Monomial) -> GaussianRational {
        self.component(comp).get(r, c).coeff(mono)
    }

    /// Same map with truncation degree `d`; terms above `d` are dropped.
    pub fn truncated(&self, d: u32) -> FormalMap {
        let cut = |p: &Polynomial| p.truncate_weighted(d);
        FormalMap { src: self.src, dst: self.dst, d, f: self.f.map(cut), g: self.g.map(cut) }
    }

    pub fn with_truncation(&self, d: u32) -> Result<FormalMap> {
        FormalMap::new(self.src, self.dst, d, self.f.clone(), self.g.clone())
    }

    /// Components restricted to weighted degree `d`.
    pub fn weighted_part(&self, comp: Component, d: u32) -> MatrixPolynomial {
        self.component(comp).map(|p| p.weighted_part(d))
    }

    /// All stored coefficients as `(component, row, col, monomial) → value`.
    pub fn coefficients(&self) -> BTreeMap<(Component, usize, usize, Monomial), GaussianRational> {
        let mut out = BTreeMap::new();
        for comp in [Component::F, Component::G] {
            let mp = self.component(comp);
            for r in 0..mp.rows() {
                for c in 0..mp.cols() {
                    for (mono, v) in mp.get(r, c).terms() {
                        out.insert((comp, r, c, mono.clone()), v.clone());
                    }
                }
            }
        }
        out
    }

    /// `H ∘ Φ` for an automorphism `Φ` of the source model.
    pub fn precompose(&self, auto: &LinearAuto) -> Result<FormalMap> {
        let s = self.src;
        let (z, zb, w) = auto.variable_images(s, s)?;
        let sub = |p: &Polynomial| p.substitute(s, &z, &zb, &w, DegreeBound::Weighted(self.d));
        Ok(FormalMap { src: s, dst: self.dst, d: self.d, f: self.f.try_map(sub)?, g: self.g.try_map(sub)? })
    }

    /// `Ψ ∘ H` for an automorphism `Ψ` of the target model.
    pub fn postcompose(&self, auto: &LinearAuto) -> Result<FormalMap> {
        if !auto.fits(self.dst) {
            return Err(Error::Shape("automorphism does not match the target model".into()));
        }
        let s = self.src;
        let a = MatrixPolynomial::constant(s, auto.a())?;
        let ah = MatrixPolynomial::constant(s, &mat_conj_transpose(auto.a()))?;
        let u = MatrixPolynomial::constant(s, auto.u())?;
        Ok(FormalMap { src: s, dst: self.dst, d: self.d, f: a.mul(&self.f)?.mul(&u)?, g: a.mul(&self.g)?.mul(&ah)? })
    }

    /// `self ∘ inner`, truncated at weighted degree `D` of `self`.
    pub fn compose(&self, inner: &FormalMap) -> Result<FormalMap> {
        if !inner.dst.same_shape(&self.src) {
            return Err(Error::Shape("composition dimensions do not chain".into()));
        }
        let s = inner.src;
        let bound = DegreeBound::Weighted(self.d.min(inner.d));
        let z: Vec<Polynomial> = inner.f.entries().to_vec();
        let zb: Vec<Polynomial> = z.iter().map(Polynomial::conjugate).collect();
        let w: Vec<Polynomial> = inner.g.entries().to_vec();
        let sub = |p: &Polynomial| p.substitute(s, &z, &zb, &w, bound);
        Ok(FormalMap { src: s, dst: self.dst, d: self.d.min(inner.d), f: self.f.try_map(sub)?, g: self.g.try_map(sub)? })
    }

    pub fn to_json(&self) -> FormalMapJson {
        FormalMapJson {
            src: DimsJson { m: self.src.m, n: self.src.n },
            dst: DimsJson { m: self.dst.m, n: self.dst.n },
            d: self.d,
            f: blocks_to_json(&self.f, self.src),
            g: blocks_to_json(&self.g, self.src),
        }
    }

    pub fn from_json(doc: &FormalMapJson) -> Result<Self> {
        let src = VarSpace::new(doc.src.m, doc.src.n)?;
        let dst = VarSpace::new(doc.dst.m, doc.dst.n)?;
        let mut f = MatrixPolynomial::zero(src, dst.m, dst.n);
        let mut g = MatrixPolynomial::zero(src, dst.m, dst.m);
        blocks_from_json(&doc.f, src, &mut f)?;
        blocks_from_json(&doc.g, src, &mut g)?;
        FormalMap::new(src, dst, doc.d, f, g)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("serializable")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let doc: FormalMapJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json(&doc)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimsJson {
    pub m: usize,
    #[serde(rename = "N")]
    pub n: usize,
}

/// One coefficient matrix: `k = |I|`, `l = |J|`, monomial `Z^I W^J`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffBlockJson {
    pub k: u32,
    pub l: u32,
    #[serde(rename = "I")]
    pub i: Vec<Vec<u32>>,
    #[serde(rename = "J")]
    pub j: Vec<Vec<u32>>,
    pub entries: Vec<Vec<ScalarJson>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormalMapJson {
    pub src: DimsJson,
    pub dst: DimsJson,
    #[serde(rename = "D")]
    pub d: u32,
    #[serde(default)]
    pub f: Vec<CoeffBlockJson>,
    #[serde(default)]
    pub g: Vec<CoeffBlockJson>,
}

fn blocks_to_json(mp: &MatrixPolynomial, src: VarSpace) -> Vec<CoeffBlockJson> {
    let mut monos: Vec<&Monomial> = mp.entries().iter().flat_map(|p| p.terms().keys()).collect();
    monos.sort();
    monos.dedup();
    monos
        .into_iter()
        .map(|mono| {
            let i = mono.z_index(&src);
            let j = mono.w_index(&src);
            CoeffBlockJson {
                k: i.length(),
                l: j.length(),
                i: i.to_matrix(),
                j: j.to_matrix(),
                entries: (0..mp.rows())
                    .map(|r| (0..mp.cols()).map(|c| ScalarJson::from(&mp.get(r, c).coeff(mono))).collect())
                    .collect(),
            }
        })
        .collect()
}

fn blocks_from_json(blocks: &[CoeffBlockJson], src: VarSpace, out: &mut MatrixPolynomial) -> Result<()> {
    for b in blocks {
        let i = MultiIndex::new(IndexKind::Z, &src, &b.i)?;
        let j = MultiIndex::new(IndexKind::W, &src, &b.j)?;
        if i.length() != b.k || j.length() != b.l {
            return Err(Error::Parse(format!("block (k,l)=({},{}) disagrees with |I|={}, |J|={}", b.k, b.l, i.length(), j.length())));
        }
        if b.entries.len() != out.rows() || b.entries.iter().any(|r| r.len() != out.cols()) {
            return Err(Error::Shape(format!("coefficient block must be {}x{}", out.rows(), out.cols())));
        }
        let mono = Monomial::from_indices(&src, &i, &MultiIndex::zero(IndexKind::Z, &src), &j)?;
        for (r, row) in b.entries.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                out.get_mut(r, c).add_term(mono.clone(), v.parse()?);
            }
        }
    }
    Ok(())
}

/// Target of the mapping equation: the flat model or a perturbed submanifold.
#[derive(Clone, Debug)]
pub enum Target {
    Model(BsdModel),
    Submanifold(Submanifold),
}

impl Target {
    pub fn dims(&self) -> ModelDims {
        match self {
            Target::Model(m) => m.dims,
            Target::Submanifold(s) => s.dims(),
        }
    }
}

/// Both sides of `G(Z, Z·Z̄ᵗ + φ) = F·F̄ᵗ + φ′(F, F̄)` over `(Z, Z̄)` of the
/// source, truncated at total degree `dmax`.
pub fn substitute_defining(
    map: &FormalMap,
    source: &Submanifold,
    target: &Target,
    dmax: u32,
) -> Result<(MatrixPolynomial, MatrixPolynomial)> {
    let s = map.src;
    if !source.dims().same_shape(&s) || !target.dims().same_shape(&map.dst) {
        return Err(Error::Shape("map, source and target dimensions disagree".into()));
    }
    if dmax > map.d {
        return Err(Error::Truncation(format!("requested degree {dmax} exceeds map truncation {}", map.d)));
    }
    if !source.is_flat() && dmax > source.truncation() {
        return Err(Error::Truncation(format!("requested degree {dmax} exceeds source truncation {}", source.truncation())));
    }
    if let Target::Submanifold(t) = target {
        if !t.is_flat() && dmax > t.truncation() {
            return Err(Error::Truncation(format!("requested degree {dmax} exceeds target truncation {}", t.truncation())));
        }
    }
    let bound = DegreeBound::Total(dmax);
    let z: Vec<Polynomial> = (0..s.m).flat_map(|a| (0..s.n).map(move |c| Polynomial::z(s, a, c))).collect();
    let w: Vec<Polynomial> = source.defining_rhs().entries().to_vec();
    let sub = |p: &Polynomial| p.substitute(s, &z, &[], &w, bound);
    let fs = map.f.try_map(sub)?;
    let lhs = map.g.try_map(sub)?;
    let fbar = fs.map(Polynomial::conjugate);
    let mut rhs = fs.mul_bounded(&fbar.transpose(), bound)?;
    if let Target::Submanifold(t) = target {
        if !t.is_flat() {
            let zimg: Vec<Polynomial> = fs.entries().to_vec();
            let zbimg: Vec<Polynomial> = fbar.entries().to_vec();
            let phi = t.phi_total().try_map(|p| p.substitute(s, &zimg, &zbimg, &[], bound))?;
            rhs = rhs.add(&phi)?;
        }
    }
    Ok((lhs, rhs))
}

/// `LHS − RHS` through total degree `dmax`.
pub fn residual_full(map: &FormalMap, source: &Submanifold, target: &Target, dmax: u32) -> Result<MatrixPolynomial> {
    let (l, r) = substitute_defining(map, source, target, dmax)?;
    l.sub(&r)
}

/// Bidegree-`(k,l)` block of the residual.
pub fn residual(map: &FormalMap, source: &Submanifold, target: &Target, bidegree: (u32, u32)) -> Result<MatrixPolynomial> {
    let (k, l) = bidegree;
    Ok(residual_full(map, source, target, k + l)?.bidegree_component(k, l, Grading::ZZbar))
}

/// Lowest total degree at which the residual is nonzero, if any, up to `dmax`.
pub fn first_nonzero_degree(map: &FormalMap, source: &Submanifold, target: &Target, dmax: u32) -> Result<Option<u32>> {
    let r = residual_full(map, source, target, dmax)?;
    Ok(r.entries().iter().filter_map(|p| p.terms().keys().map(Monomial::total_degree).min()).min())
}

/// The Whitney-type map `(z, w) ↦ ((a z, b z²), |a|² w + |b|² w²)` from the
/// `(1,1)` model into the `(1,2)` model.
pub fn whitney_map(a: &GaussianRational, b: &GaussianRational, d: u32) -> FormalMap {
    let s = VarSpace::new(1, 1).expect("valid dims");
    let t = VarSpace::new(1, 2).expect("valid dims");
    let z = Polynomial::z(s, 0, 0);
    let w = Polynomial::w(s, 0, 0);
    let f = MatrixPolynomial::from_rows(s, vec![vec![z.scale(a), (&z * &z).scale(b)]]).expect("1x2");
    let g = MatrixPolynomial::from_rows(
        s,
        vec![vec![&w.scale(&a.norm_sqr().into()) + &(&w * &w).scale(&b.norm_sqr().into())]],
    )
    .expect("1x1");
    FormalMap::new(s, t, d.max(4), f, g).expect("whitney map is well formed").truncated(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(m: usize, n: usize) -> VarSpace {
        VarSpace::new(m, n).unwrap()
    }

    fn g(n: i64) -> GaussianRational {
        GaussianRational::from_int(n)
    }

    fn flat(s: VarSpace, d: u32) -> Submanifold {
        Submanifold::flat(BsdModel::new(s), d)
    }

    fn whitney(a: i64, b: i64, d: u32) -> FormalMap {
        whitney_map(&g(a), &g(b), d)
    }

    #[test]
    fn standard_embedding_residual_is_zero() {
        for (src, dst) in [(sp(1, 1), sp(1, 1)), (sp(1, 1), sp(2, 2)), (sp(2, 3), sp(3, 4))] {
            let h = FormalMap::standard(src, dst, 5).unwrap();
            let r = residual_full(&h, &flat(src, 5), &Target::Model(BsdModel::new(dst)), 5).unwrap();
            assert!(r.is_zero());
        }
        assert!(matches!(FormalMap::standard(sp(2, 2), sp(1, 3), 3), Err(Error::Dims(_))));
    }

    #[test]
    fn scaled_g_residual() {
        let s = sp(1, 1);
        let mut h = FormalMap::standard(s, s, 2).unwrap();
        h.g.set(0, 0, Polynomial::w(s, 0, 0).scale(&g(2)));
        let r = residual(&h, &flat(s, 2), &Target::Model(BsdModel::new(s)), (1, 1)).unwrap();
        assert_eq!(*r.get(0, 0), &Polynomial::z(s, 0, 0) * &Polynomial::zbar(s, 0, 0));
    }

    #[test]
    fn whitney_map_is_an_embedding() {
        let h = whitney(3, 2, 4);
        let src = flat(sp(1, 1), 4);
        let tgt = Target::Model(BsdModel::new(sp(1, 2)));
        assert!(residual_full(&h, &src, &tgt, 4).unwrap().is_zero());
        assert!(residual(&h, &src, &tgt, (2, 2)).unwrap().is_zero());
    }

    #[test]
    fn perturbation_breaks_residual() {
        let (s, t) = (sp(1, 2), sp(2, 3));
        let mut h = FormalMap::standard(s, t, 3).unwrap();
        let mono = (&Polynomial::z(s, 0, 0) * &Polynomial::z(s, 0, 1)).terms().keys().next().unwrap().clone();
        h.add_coeff(Component::F, 0, 0, mono, GaussianRational::from_fracs(1, 3, 2, 1));
        assert!(first_nonzero_degree(&h, &flat(s, 3), &Target::Model(BsdModel::new(t)), 3).unwrap().is_some());
    }

    #[test]
    fn residual_bidegrees_partition_the_difference() {
        let h = whitney(1, 5, 4);
        let src = flat(sp(1, 1), 4);
        let tgt = Target::Model(BsdModel::new(sp(1, 2)));
        let mut h2 = h.clone();
        let z = Polynomial::z(sp(1, 1), 0, 0);
        h2.add_coeff(Component::F, 0, 0, (&z * &(&z * &z)).terms().keys().next().unwrap().clone(), g(7));
        let full = residual_full(&h2, &src, &tgt, 4).unwrap();
        let mut acc = MatrixPolynomial::zero(sp(1, 1), 1, 1);
        for k in 0..=4 {
            for l in 0..=4 - k {
                acc = acc.add(&residual(&h2, &src, &tgt, (k, l)).unwrap()).unwrap();
            }
        }
        assert_eq!(acc, full);
        assert!(!full.is_zero());
    }

    #[test]
    fn json_roundtrip_and_truncation_errors() {
        let h = whitney(2, -3, 4);
        let text = h.to_json_string();
        assert!(text.contains("\"D\": 4"));
        assert_eq!(FormalMap::from_json_str(&text).unwrap(), h);
        assert!(matches!(
            residual_full(&h, &flat(sp(1, 1), 4), &Target::Model(BsdModel::new(sp(1, 2))), 5),
            Err(Error::Truncation(_))
        ));
        let bad = text.replace("\"D\": 4", "\"D\": 3");
        assert!(matches!(FormalMap::from_json_str(&bad), Err(Error::Truncation(_))));
    }
}
