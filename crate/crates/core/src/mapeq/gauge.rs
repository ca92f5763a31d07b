use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_rational::BigRational;

use super::map::{Component, FormalMap, Target};
use super::step::{step_matrix, StepLayout};
use crate::bsd::{BsdModel, ModelDims, Submanifold};
use crate::error::Result;
use crate::exactalg::{Echelon, SparseVec};
use crate::polyring::{DegreeBound, MatrixPolynomial, Polynomial};

/// Step-`d` increment `(δF, δG)` of an infinitesimal automorphism.
pub type AutoDelta = (MatrixPolynomial, MatrixPolynomial);

type KernelKey = (ModelDims, ModelDims, u32, String);

fn kernel_cache() -> &'static Mutex<HashMap<KernelKey, Arc<Vec<SparseVec<BigRational>>>>> {
    static CACHE: OnceLock<Mutex<HashMap<KernelKey, Arc<Vec<SparseVec<BigRational>>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Kernel of the homogeneous step-`d` system for maps with linear part `f1`.
pub fn homogeneous_kernel(
    src: ModelDims,
    dst: ModelDims,
    d: u32,
    f1: &MatrixPolynomial,
) -> Result<Arc<Vec<SparseVec<BigRational>>>> {
    let key = (src, dst, d, format!("{:?}", f1.entries()));
    if let Some(k) = kernel_cache().lock().expect("cache lock").get(&key) {
        return Ok(k.clone());
    }
    let mat = step_matrix(src, dst, d, f1)?;
    let rhs = vec![BigRational::default(); mat.nrows()];
    let k = Arc::new(mat.solve(&rhs, None)?.kernel);
    kernel_cache().lock().expect("cache lock").insert(key, k.clone());
    Ok(k)
}

/// Step-`d` parts of the infinitesimal automorphisms of the model `space`
/// (the kernel of the identity map's step system).
pub fn auto_kernel(space: ModelDims, d: u32) -> Result<Vec<AutoDelta>> {
    let id = FormalMap::standard(space, space, d + 1)?;
    let f1 = id.weighted_part(Component::F, 1);
    let layout = StepLayout::new(space, space, d);
    Ok(homogeneous_kernel(space, space, d, &f1)?.iter().map(|v| layout.delta(v)).collect())
}

fn w_linear(g: &MatrixPolynomial) -> MatrixPolynomial {
    g.map(|p| p.filter(|m| m.degrees(p.space()) == (0, 0, 1)))
}

/// Linear part `(F₁, G_W)` of a map: `F` in degree one and the `W`-linear part of `G`.
pub fn first_order(map: &FormalMap) -> (MatrixPolynomial, MatrixPolynomial) {
    (map.weighted_part(Component::F, 1), w_linear(map.g()))
}

/// Degree-`d` change of `H ∘ (id + δ)` for a source automorphism increment.
pub fn source_direction(
    layout: &StepLayout,
    f1: &MatrixPolynomial,
    gw: &MatrixPolynomial,
    delta: &AutoDelta,
) -> Result<SparseVec<BigRational>> {
    let s = layout.src;
    let (df, dg) = delta;
    let sub = |p: &Polynomial| p.substitute(s, df.entries(), &[], dg.entries(), DegreeBound::None);
    Ok(layout.vector_of(&f1.try_map(sub)?, &gw.try_map(sub)?))
}

/// Degree-`d` change of `(id + δ′) ∘ H` for a target automorphism increment.
pub fn target_direction(
    layout: &StepLayout,
    f1: &MatrixPolynomial,
    gw: &MatrixPolynomial,
    delta: &AutoDelta,
) -> Result<SparseVec<BigRational>> {
    let s = layout.src;
    let (df, dg) = delta;
    let bound = DegreeBound::Weighted(layout.d + 1);
    let sub = |p: &Polynomial| p.substitute(s, f1.entries(), &[], gw.entries(), bound);
    Ok(layout.vector_of(&df.try_map(sub)?, &dg.try_map(sub)?))
}

/// Directions of step `d` produced by automorphisms of source and target.
#[derive(Clone, Debug)]
pub struct GaugeDirections {
    pub source: Vec<SparseVec<BigRational>>,
    pub target: Vec<SparseVec<BigRational>>,
    pub source_deltas: Vec<AutoDelta>,
    pub target_deltas: Vec<AutoDelta>,
}

impl GaugeDirections {
    pub fn all(&self) -> Vec<SparseVec<BigRational>> {
        self.source.iter().chain(&self.target).cloned().collect()
    }
}

pub fn gauge_directions(map: &FormalMap, d: u32) -> Result<GaugeDirections> {
    let layout = StepLayout::new(map.src(), map.dst(), d);
    let (f1, gw) = first_order(map);
    let source_deltas = auto_kernel(map.src(), d)?;
    let target_deltas = auto_kernel(map.dst(), d)?;
    let source = source_deltas.iter().map(|x| source_direction(&layout, &f1, &gw, x)).collect::<Result<_>>()?;
    let target = target_deltas.iter().map(|x| target_direction(&layout, &f1, &gw, x)).collect::<Result<_>>()?;
    Ok(GaugeDirections { source, target, source_deltas, target_deltas })
}

/// Splits `kernel` against `gauge`: returns the rank of the gauge span and
/// kernel vectors representing a complement of it.
pub fn split_kernel(
    ncols: usize,
    gauge: &[SparseVec<BigRational>],
    kernel: &[SparseVec<BigRational>],
) -> Result<(usize, Vec<SparseVec<BigRational>>)> {
    let zero = BigRational::default();
    let mut ech = Echelon::new(ncols);
    for g in gauge {
        ech.push(g.iter().cloned(), zero.clone())?;
    }
    let rank = ech.rank();
    let mut extra = Vec::new();
    for k in kernel {
        if ech.push(k.iter().cloned(), zero.clone())? {
            extra.push(k.clone());
        }
    }
    Ok((rank, extra))
}

pub(crate) fn flat_source(space: ModelDims, d: u32) -> Submanifold {
    Submanifold::flat(BsdModel::new(space), d)
}

pub(crate) fn model_target(space: ModelDims) -> Target {
    Target::Model(BsdModel::new(space))
}
