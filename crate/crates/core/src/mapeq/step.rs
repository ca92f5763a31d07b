use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_rational::BigRational;
use num_traits::Zero;

use super::map::{residual_full, Component, FormalMap, Target};
use crate::bsd::{model_defining_matrix, BsdModel, ModelDims, Submanifold};
use crate::error::{Error, Result};
use crate::exactalg::{min_norm_point, Echelon, GaussianRational, SparseVec};
use crate::polyring::{
    weighted_holomorphic_monomials, DegreeBound, MatrixPolynomial, Monomial, Polynomial,
};

/// Real and imaginary part of a complex unknown.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Part {
    Re,
    Im,
}

/// Position of one real unknown of a degree step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slot {
    pub comp: Component,
    pub row: usize,
    pub col: usize,
    pub mono: Monomial,
    pub part: Part,
}

/// Real unknowns of step `d`: the coefficients of `F` of weighted degree `d`
/// and of `G` of weighted degree `d + 1`, each split into real and imaginary
/// parts.
#[derive(Clone, Debug, PartialEq)]
pub struct StepLayout {
    pub src: ModelDims,
    pub dst: ModelDims,
    pub d: u32,
    f_monos: Vec<Monomial>,
    g_monos: Vec<Monomial>,
}

impl StepLayout {
    pub fn new(src: ModelDims, dst: ModelDims, d: u32) -> Self {
        StepLayout {
            src,
            dst,
            d,
            f_monos: weighted_holomorphic_monomials(&src, d),
            g_monos: weighted_holomorphic_monomials(&src, d + 1),
        }
    }

    fn n_f(&self) -> usize {
        2 * self.dst.m * self.dst.n * self.f_monos.len()
    }

    pub fn ncols(&self) -> usize {
        self.n_f() + 2 * self.dst.m * self.dst.m * self.g_monos.len()
    }

    fn col(&self, comp: Component, r: usize, c: usize, i: usize, part: Part) -> usize {
        let p = (part == Part::Im) as usize;
        match comp {
            Component::F => ((r * self.dst.n + c) * self.f_monos.len() + i) * 2 + p,
            Component::G => self.n_f() + ((r * self.dst.m + c) * self.g_monos.len() + i) * 2 + p,
        }
    }

    pub fn slot(&self, col: usize) -> Slot {
        let part = if col % 2 == 1 { Part::Im } else { Part::Re };
        let (comp, rest, width, monos) = if col < self.n_f() {
            (Component::F, col / 2, self.dst.n, &self.f_monos)
        } else {
            (Component::G, (col - self.n_f()) / 2, self.dst.m, &self.g_monos)
        };
        let i = rest % monos.len();
        let entry = rest / monos.len();
        Slot { comp, row: entry / width, col: entry % width, mono: monos[i].clone(), part }
    }

    /// Fischer weight `I!·J!` of the monomial behind a column.
    pub fn weight(&self, col: usize) -> BigRational {
        BigRational::from_integer(self.slot(col).mono.factorial())
    }

    /// Coordinates of the degree-`d` part of `(F, G)` (`F` of weighted degree
    /// `d`, `G` of weighted degree `d+1`); other degrees are ignored.
    pub fn vector_of(&self, f: &MatrixPolynomial, g: &MatrixPolynomial) -> SparseVec<BigRational> {
        let mut out = Vec::new();
        for (comp, mp, monos) in [(Component::F, f, &self.f_monos), (Component::G, g, &self.g_monos)] {
            for r in 0..mp.rows() {
                for c in 0..mp.cols() {
                    let p = mp.get(r, c);
                    for (i, mono) in monos.iter().enumerate() {
                        let v = p.coeff(mono);
                        if !Zero::is_zero(&v.re) {
                            out.push((self.col(comp, r, c, i, Part::Re), v.re.clone()));
                        }
                        if !Zero::is_zero(&v.im) {
                            out.push((self.col(comp, r, c, i, Part::Im), v.im.clone()));
                        }
                    }
                }
            }
        }
        out.sort_by_key(|(c, _)| *c);
        out
    }

    pub fn vector_of_map(&self, map: &FormalMap) -> SparseVec<BigRational> {
        self.vector_of(map.f(), map.g())
    }

    /// The `(F, G)` increments encoded by a coordinate vector.
    pub fn delta(&self, v: &SparseVec<BigRational>) -> (MatrixPolynomial, MatrixPolynomial) {
        let s = self.src;
        let mut f = MatrixPolynomial::zero(s, self.dst.m, self.dst.n);
        let mut g = MatrixPolynomial::zero(s, self.dst.m, self.dst.m);
        for (col, x) in v {
            let slot = self.slot(*col);
            let c = match slot.part {
                Part::Re => GaussianRational::real(x.clone()),
                Part::Im => GaussianRational::new(BigRational::zero(), x.clone()),
            };
            let target = match slot.comp {
                Component::F => f.get_mut(slot.row, slot.col),
                Component::G => g.get_mut(slot.row, slot.col),
            };
            target.add_term(slot.mono, c);
        }
        (f, g)
    }

    /// `map` with its degree-`d` coordinates replaced by `v`.
    pub fn with_vector(&self, map: &FormalMap, v: &SparseVec<BigRational>) -> FormalMap {
        let mut out = map.clone();
        let current = self.vector_of_map(map);
        let (df, dg) = self.delta(&crate::exactalg::combine(&[
            (BigRational::from_integer(1.into()), v),
            (BigRational::from_integer((-1).into()), &current),
        ]));
        for (comp, mp) in [(Component::F, &df), (Component::G, &dg)] {
            for r in 0..mp.rows() {
                for c in 0..mp.cols() {
                    for (mono, x) in mp.get(r, c).terms() {
                        out.add_coeff(comp, r, c, mono.clone(), x.clone());
                    }
                }
            }
        }
        out
    }
}

/// Equation index: entry `(p, q)`, monomial in `(Z, Z̄)`, real or imaginary part.
pub type RowKey = (usize, usize, Monomial, Part);

/// The linear part of one degree step. It depends only on the linear part
/// `F₁` of the map, so one matrix serves every map with that `F₁`.
#[derive(Debug)]
pub struct StepMatrix {
    pub layout: StepLayout,
    rows: Vec<SparseVec<BigRational>>,
    keys: Vec<RowKey>,
    key_index: HashMap<RowKey, usize>,
    groups: Vec<Vec<usize>>,
}

fn model_w_images(src: ModelDims) -> Vec<Polynomial> {
    model_defining_matrix(&BsdModel::new(src)).entries().to_vec()
}

impl StepMatrix {
    pub fn build(layout: StepLayout, f1: &MatrixPolynomial) -> Result<Self> {
        let s = layout.src;
        let (mp, np) = (layout.dst.m, layout.dst.n);
        if f1.rows() != mp || f1.cols() != np {
            return Err(Error::Shape("linear part has the wrong shape".into()));
        }
        let w_img = model_w_images(s);
        let z_img: Vec<Polynomial> = (0..s.m).flat_map(|a| (0..s.n).map(move |c| Polynomial::z(s, a, c))).collect();
        let subst = |mono: &Monomial| -> Result<Polynomial> {
            Polynomial::from_term(s, mono.clone(), GaussianRational::from_int(1)).substitute(
                s,
                &z_img,
                &[],
                &w_img,
                DegreeBound::None,
            )
        };
        let f_subs: Vec<Polynomial> = layout.f_monos.iter().map(subst).collect::<Result<_>>()?;
        let g_subs: Vec<Polynomial> = layout.g_monos.iter().map(subst).collect::<Result<_>>()?;
        let f1bar: Vec<Polynomial> = f1.entries().iter().map(Polynomial::conjugate).collect();

        let mut acc: HashMap<(usize, usize, Monomial), BTreeMap<usize, GaussianRational>> = HashMap::new();
        let mut add = |p: usize, q: usize, poly: &Polynomial, col: usize, factor: &GaussianRational| {
            for (mono, c) in poly.terms() {
                let e = acc.entry((p, q, mono.clone())).or_default().entry(col).or_default();
                *e += &(c * factor);
            }
        };
        let one = GaussianRational::from_int(1);
        let i = GaussianRational::i();
        let mone = -&one;
        let mi = -&i;
        for r in 0..mp {
            for c in 0..mp {
                for (k, poly) in g_subs.iter().enumerate() {
                    add(r, c, poly, layout.col(Component::G, r, c, k, Part::Re), &one);
                    add(r, c, poly, layout.col(Component::G, r, c, k, Part::Im), &i);
                }
            }
        }
        for p in 0..mp {
            for c in 0..np {
                for (k, ms) in f_subs.iter().enumerate() {
                    let ms_bar = ms.conjugate();
                    let (re, im) = (
                        layout.col(Component::F, p, c, k, Part::Re),
                        layout.col(Component::F, p, c, k, Part::Im),
                    );
                    for q in 0..mp {
                        let fq = f1.get(q, c);
                        if fq.is_zero() {
                            continue;
                        }
                        let a = ms * &f1bar[q * np + c];
                        let b = fq * &ms_bar;
                        add(p, q, &a, re, &mone);
                        add(q, p, &b, re, &mone);
                        add(p, q, &a, im, &mi);
                        add(q, p, &b, im, &i);
                    }
                }
            }
        }

        let mut entries: Vec<((usize, usize, Monomial), BTreeMap<usize, GaussianRational>)> = acc.into_iter().collect();
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        let mut rows = Vec::new();
        let mut keys = Vec::new();
        for ((p, q, mono), cols) in entries {
            for part in [Part::Re, Part::Im] {
                let row: SparseVec<BigRational> = cols
                    .iter()
                    .map(|(c, v)| (*c, if part == Part::Re { v.re.clone() } else { v.im.clone() }))
                    .filter(|(_, v)| !Zero::is_zero(v))
                    .collect();
                if !row.is_empty() {
                    rows.push(row);
                    keys.push((p, q, mono.clone(), part));
                }
            }
        }
        let key_index = keys.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        let groups = group_rows(&layout, &keys);
        Ok(StepMatrix { layout, rows, keys, key_index, groups })
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    /// Right-hand side for a constant term given as a matrix of
    /// polynomials: the equation is `rows·x + constant = 0`.
    pub fn rhs_for(&self, constant: &MatrixPolynomial) -> Result<Vec<BigRational>> {
        let mut rhs = vec![BigRational::zero(); self.rows.len()];
        for p in 0..constant.rows() {
            for q in 0..constant.cols() {
                for (mono, c) in constant.get(p, q).terms() {
                    for (part, v) in [(Part::Re, &c.re), (Part::Im, &c.im)] {
                        if Zero::is_zero(v) {
                            continue;
                        }
                        match self.key_index.get(&(p, q, mono.clone(), part)) {
                            Some(&row) => rhs[row] = -v,
                            None => {
                                return Err(Error::InconsistentSystem {
                                    degree: self.layout.d as usize + 1,
                                    detail: format!("residual entry ({p},{q}) has a term no unknown can reach"),
                                })
                            }
                        }
                    }
                }
            }
        }
        Ok(rhs)
    }

    /// Exact solution; `order` optionally permutes the elimination order of
    /// the unknowns (`order[k]` is the column eliminated `k`-th).
    pub fn solve(&self, rhs: &[BigRational], order: Option<&[usize]>) -> Result<DegreeStepSolution> {
        let n = self.layout.ncols();
        let rank_of_col: Vec<usize> = match order {
            Some(o) => {
                let mut r = vec![0; n];
                for (k, &c) in o.iter().enumerate() {
                    r[c] = k;
                }
                r
            }
            None => (0..n).collect(),
        };
        let mut particular: BTreeMap<usize, BigRational> = BTreeMap::new();
        let mut kernel = Vec::new();
        let mut touched = vec![false; n];
        for group in &self.groups {
            let mut cols: Vec<usize> =
                group.iter().flat_map(|&r| self.rows[r].iter().map(|(c, _)| *c)).collect::<BTreeSet<_>>().into_iter().collect();
            cols.sort_by_key(|&c| rank_of_col[c]);
            let local: HashMap<usize, usize> = cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
            let mut ech = Echelon::new(cols.len());
            for &r in group {
                ech.push(self.rows[r].iter().map(|(c, v)| (local[c], v.clone())), rhs[r].clone())?;
                if ech.is_inconsistent() {
                    return Err(Error::InconsistentSystem {
                        degree: self.layout.d as usize + 1,
                        detail: format!("no degree-{} data extends the prefix", self.layout.d),
                    });
                }
            }
            let sol = ech.finish();
            let part = sol.particular.ok_or_else(|| Error::InconsistentSystem {
                degree: self.layout.d as usize + 1,
                detail: format!("no degree-{} data extends the prefix", self.layout.d),
            })?;
            for (i, v) in part {
                particular.insert(cols[i], v);
            }
            for kv in sol.kernel_basis {
                let mut g: SparseVec<BigRational> = kv.into_iter().map(|(i, v)| (cols[i], v)).collect();
                g.sort_by_key(|(c, _)| *c);
                kernel.push(g);
            }
            for c in cols {
                touched[c] = true;
            }
        }
        // unknowns no equation sees are free
        for (c, t) in touched.iter().enumerate() {
            if !t {
                kernel.push(vec![(c, BigRational::from_integer(1.into()))]);
            }
        }
        let particular: SparseVec<BigRational> = particular.into_iter().collect();
        let gauge_fixed = gauge_fix_point(&self.layout, &particular, &kernel);
        Ok(DegreeStepSolution { d: self.layout.d, layout: self.layout.clone(), particular, kernel, gauge_fixed })
    }

    /// `rows·v` as a residual check: true when `v` solves the homogeneous
    /// system plus `rhs`.
    pub fn satisfies(&self, v: &SparseVec<BigRational>, rhs: &[BigRational]) -> bool {
        let x: HashMap<usize, &BigRational> = v.iter().map(|(c, x)| (*c, x)).collect();
        self.rows.iter().zip(rhs).all(|(row, b)| {
            let mut acc = BigRational::zero();
            for (c, a) in row {
                if let Some(xv) = x.get(c) {
                    acc += a * *xv;
                }
            }
            acc == *b
        })
    }

    pub fn keys(&self) -> &[RowKey] {
        &self.keys
    }

    /// Basis of the left kernel: row combinations that vanish on every
    /// column, i.e. the linear conditions a constant must meet to be solvable.
    pub fn cokernel(&self) -> Result<Vec<SparseVec<BigRational>>> {
        let mut by_col: BTreeMap<usize, Vec<(usize, BigRational)>> = BTreeMap::new();
        for (r, row) in self.rows.iter().enumerate() {
            for (c, a) in row {
                by_col.entry(*c).or_default().push((r, a.clone()));
            }
        }
        let mut ech = Echelon::new(self.rows.len());
        for eq in by_col.into_values() {
            ech.push(eq, BigRational::zero())?;
        }
        Ok(ech.finish().kernel_basis)
    }

    /// Coefficients of a constant by row, plus those no row reaches.
    pub fn coordinates(&self, constant: &MatrixPolynomial) -> (HashMap<usize, BigRational>, HashMap<RowKey, BigRational>) {
        let mut rows = HashMap::new();
        let mut stray = HashMap::new();
        for p in 0..constant.rows() {
            for q in 0..constant.cols() {
                for (mono, c) in constant.get(p, q).terms() {
                    for (part, v) in [(Part::Re, &c.re), (Part::Im, &c.im)] {
                        if Zero::is_zero(v) {
                            continue;
                        }
                        let key = (p, q, mono.clone(), part);
                        match self.key_index.get(&key) {
                            Some(&row) => {
                                rows.insert(row, v.clone());
                            }
                            None => {
                                stray.insert(key, v.clone());
                            }
                        }
                    }
                }
            }
        }
        (rows, stray)
    }
}

/// Rows only couple unknowns whose `(Z, Z̄)` bidegrees fall in the same
/// unordered pair `{(a,b), (b,a)}`, so each pair is solved on its own.
fn group_rows(layout: &StepLayout, keys: &[RowKey]) -> Vec<Vec<usize>> {
    let mut by: BTreeMap<(u32, u32), Vec<usize>> = BTreeMap::new();
    for (i, (_, _, mono, _)) in keys.iter().enumerate() {
        let (a, b, _) = mono.degrees(&layout.src);
        by.entry((a.max(b), a.min(b))).or_default().push(i);
    }
    by.into_values().collect()
}

/// Minimum Fischer-norm point of `particular + span(kernel)`.
pub fn gauge_fix_point(
    layout: &StepLayout,
    particular: &SparseVec<BigRational>,
    kernel: &[SparseVec<BigRational>],
) -> SparseVec<BigRational> {
    min_norm_point(particular, kernel, |c| layout.weight(c)).0
}

/// Exact solution set of one degree step.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreeStepSolution {
    pub d: u32,
    pub layout: StepLayout,
    pub particular: SparseVec<BigRational>,
    pub kernel: Vec<SparseVec<BigRational>>,
    pub gauge_fixed: SparseVec<BigRational>,
}

impl DegreeStepSolution {
    pub fn kernel_dim(&self) -> usize {
        self.kernel.len()
    }

    /// Number of nonzero complex coefficients in the gauge-fixed assignment.
    pub fn gauge_fixed_nonzero_count(&self) -> usize {
        self.gauge_fixed.iter().map(|(c, _)| c / 2).collect::<BTreeSet<_>>().len()
    }
}

/// Returns `gauge_fixed` for an already solved step (the canonical
/// representative of `particular + span(kernel)`).
pub fn gauge_fix(sol: &DegreeStepSolution) -> SparseVec<BigRational> {
    gauge_fix_point(&sol.layout, &sol.particular, &sol.kernel)
}

type CacheKey = (ModelDims, ModelDims, u32, String);

fn cache() -> &'static Mutex<HashMap<CacheKey, Arc<StepMatrix>>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, Arc<StepMatrix>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Step matrix for maps with linear part `f1`, shared through a cache.
pub fn step_matrix(src: ModelDims, dst: ModelDims, d: u32, f1: &MatrixPolynomial) -> Result<Arc<StepMatrix>> {
    let key = (src, dst, d, format!("{:?}", f1.entries()));
    if let Some(m) = cache().lock().expect("cache lock").get(&key) {
        return Ok(m.clone());
    }
    let m = Arc::new(StepMatrix::build(StepLayout::new(src, dst, d), f1)?);
    cache().lock().expect("cache lock").insert(key, m.clone());
    Ok(m)
}

/// Degree-`(d+1)` constant of the step: the residual of the map with its
/// degree-`d` unknowns removed. Fails when the residual does not vanish
/// through degree `d`.
pub fn step_constant(map: &FormalMap, source: &Submanifold, target: &Target, d: u32) -> Result<MatrixPolynomial> {
    let prefix = FormalMap::new(
        map.src(),
        map.dst(),
        d + 1,
        map.f().map(|p| p.truncate_weighted(d - 1)),
        map.g().map(|p| p.truncate_weighted(d)),
    )?;
    let r = residual_full(&prefix, source, target, d + 1)?;
    let low = r.entries().iter().filter_map(|p| p.terms().keys().map(Monomial::total_degree).min()).min();
    if let Some(t) = low {
        if t <= d {
            return Err(Error::InconsistentSystem {
                degree: t as usize,
                detail: format!("prefix residual is nonzero in degree {t}"),
            });
        }
    }
    Ok(r.homogeneous_part(d + 1))
}

/// Linear part `F₁` (weighted degree 1) of a map.
pub fn linear_part(map: &FormalMap) -> MatrixPolynomial {
    map.weighted_part(Component::F, 1)
}

/// Assembles and solves the step-`d` system for `map` (`d ≥ 2`): unknowns
/// are `F` of weighted degree `d` and `G` of weighted degree `d+1`, the
/// equations are all residual coefficients of total degree `d+1`.
pub fn degree_step_solve(
    map: &FormalMap,
    source: &Submanifold,
    target: &Target,
    d: u32,
    order: Option<&[usize]>,
) -> Result<DegreeStepSolution> {
    let (mat, rhs) = degree_step_system(map, source, target, d)?;
    mat.solve(&rhs, order)
}

pub fn degree_step_system(
    map: &FormalMap,
    source: &Submanifold,
    target: &Target,
    d: u32,
) -> Result<(Arc<StepMatrix>, Vec<BigRational>)> {
    if d < 2 {
        return Err(Error::Bidegree("degree steps start at d = 2; degree 1 is the initial normalization".into()));
    }
    let constant = step_constant(map, source, target, d)?;
    let mat = step_matrix(map.src(), map.dst(), d, &linear_part(map))?;
    let rhs = mat.rhs_for(&constant)?;
    Ok((mat, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat;
    use crate::mapeq::whitney_map;
    use crate::polyring::VarSpace;

    fn sp(m: usize, n: usize) -> VarSpace {
        VarSpace::new(m, n).unwrap()
    }

    fn flat(s: VarSpace, d: u32) -> Submanifold {
        Submanifold::flat(BsdModel::new(s), d)
    }

    fn model(s: VarSpace) -> Target {
        Target::Model(BsdModel::new(s))
    }

    #[test]
    fn layout_round_trip() {
        let l = StepLayout::new(sp(1, 2), sp(2, 3), 3);
        for col in [0, 1, 7, l.ncols() - 1] {
            let s = l.slot(col);
            assert_eq!(l.col(s.comp, s.row, s.col, l.f_monos.iter().chain(&l.g_monos).position(|m| *m == s.mono).map(|i| if s.comp == Component::G { i - l.f_monos.len() } else { i }).unwrap(), s.part), col);
        }
        let v = vec![(3, rat(2, 3)), (l.ncols() - 2, rat(-1, 1))];
        let (f, g) = l.delta(&v);
        assert_eq!(l.vector_of(&f, &g), v);
    }

    #[test]
    fn standard_step_is_homogeneous_and_whitney_direction_is_in_kernel() {
        let (s, t) = (sp(1, 1), sp(1, 2));
        let h = FormalMap::standard(s, t, 3).unwrap();
        let (mat, rhs) = degree_step_system(&h, &flat(s, 3), &model(t), 2).unwrap();
        assert!(rhs.iter().all(Zero::is_zero));
        let sol = mat.solve(&rhs, None).unwrap();
        assert!(sol.particular.is_empty());
        assert!(sol.gauge_fixed.is_empty());
        let wv = mat.layout.vector_of_map(&whitney_map(&1.into(), &5.into(), 3));
        assert!(!wv.is_empty());
        assert!(mat.satisfies(&wv, &rhs));
        let mut rows: Vec<_> = sol.kernel.clone();
        let r0 = crate::exactalg::rank_of(mat.layout.ncols(), &rows);
        rows.push(wv);
        assert_eq!(crate::exactalg::rank_of(mat.layout.ncols(), &rows), r0);
    }

    #[test]
    fn whitney_degree_three_step_recovers_g() {
        let (s, t) = (sp(1, 1), sp(1, 2));
        let h = whitney_map(&2.into(), &3.into(), 4);
        let (mat, rhs) = degree_step_system(&h, &flat(s, 4), &model(t), 3).unwrap();
        let sol = mat.solve(&rhs, None).unwrap();
        let exact = mat.layout.vector_of_map(&h);
        assert!(mat.satisfies(&exact, &rhs));
        assert!(mat.satisfies(&sol.particular, &rhs));
        assert!(mat.satisfies(&sol.gauge_fixed, &rhs));
    }

    #[test]
    fn gauge_fixed_ignores_elimination_order() {
        let (s, t) = (sp(1, 2), sp(2, 3));
        let h = FormalMap::standard(s, t, 3).unwrap();
        let l = StepLayout::new(s, t, 3);
        let (mat, rhs0) = degree_step_system(&h, &flat(s, 3), &model(t), 2).unwrap();
        let sol0 = mat.solve(&rhs0, None).unwrap();
        let mut rev: Vec<usize> = (0..mat.layout.ncols()).collect();
        rev.reverse();
        let sol1 = mat.solve(&rhs0, Some(&rev)).unwrap();
        assert_eq!(sol0.kernel_dim(), sol1.kernel_dim());
        assert_eq!(sol0.gauge_fixed, sol1.gauge_fixed);
        let h2 = l.with_vector(&h, &sol0.kernel[0]);
        let (m3, r3) = degree_step_system(&h2, &flat(s, 3), &model(t), 3).unwrap();
        let a = m3.solve(&r3, None).unwrap();
        let mut rev: Vec<usize> = (0..m3.layout.ncols()).collect();
        rev.reverse();
        let b = m3.solve(&r3, Some(&rev)).unwrap();
        assert_eq!(a.gauge_fixed, b.gauge_fixed);
    }

    #[test]
    fn broken_prefix_is_inconsistent() {
        let s = sp(1, 1);
        let mut h = FormalMap::standard(s, s, 3).unwrap();
        h.add_coeff(Component::G, 0, 0, Monomial::from_exps(vec![0, 0, 1]), 2.into());
        let err = degree_step_solve(&h, &flat(s, 3), &model(s), 2, None).unwrap_err();
        assert!(matches!(err, Error::InconsistentSystem { degree: 2, .. }));
    }
}
