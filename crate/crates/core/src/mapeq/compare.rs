use num_rational::BigRational;

use super::gauge::{flat_source, gauge_directions, homogeneous_kernel, model_target, split_kernel, AutoDelta};
use super::map::{residual_full, Component, FormalMap};
use super::normalize::normalize_initial;
use super::rigidity::{AutoPair, Certificate, DegreeReport, StepRecord, Verdict};
use super::step::{degree_step_system, linear_part, StepLayout};
use crate::bsd::{check_embedding_condition, ModelDims};
use crate::error::{Error, Result};
use crate::exactalg::{min_norm_point, GaussianRational};
use crate::polyring::MatrixPolynomial;

fn add_delta(map: &mut FormalMap, delta: &AutoDelta, scale: &BigRational) {
    let s = GaussianRational::real(scale.clone());
    for (comp, mp) in [(Component::F, &delta.0), (Component::G, &delta.1)] {
        for r in 0..mp.rows() {
            for c in 0..mp.cols() {
                for (mono, x) in mp.get(r, c).terms() {
                    map.add_coeff(comp, r, c, mono.clone(), x * &s);
                }
            }
        }
    }
}

/// Completes `id + δ` (δ of degree `d`) to an automorphism of the model
/// through degree `d_max`, choosing the gauge-fixed solution at each step.
fn extend_auto(
    space: ModelDims,
    d: u32,
    deltas: &[AutoDelta],
    coeffs: &[BigRational],
    d_max: u32,
    records: &mut Vec<StepRecord>,
) -> Result<FormalMap> {
    let mut auto = FormalMap::standard(space, space, d_max + 1)?;
    for (delta, t) in deltas.iter().zip(coeffs) {
        if !num_traits::Zero::is_zero(t) {
            add_delta(&mut auto, delta, t);
        }
    }
    let source = flat_source(space, d_max + 1);
    let target = model_target(space);
    for e in d + 1..=d_max {
        let (matrix, rhs) = degree_step_system(&auto, &source, &target, e)?;
        let sol = matrix.solve(&rhs, None)?;
        auto = matrix.layout.with_vector(&auto, &sol.gauge_fixed);
        records.push(StepRecord { matrix, rhs, gauge_fixed: sol.gauge_fixed });
    }
    Ok(auto)
}

/// Normal form of one embedding together with the automorphisms reaching it.
#[derive(Clone, Debug)]
pub struct NormalForm {
    pub map: FormalMap,
    pub linear: AutoPair,
    /// Formal source automorphisms, applied in order (innermost first).
    pub source_autos: Vec<FormalMap>,
    /// Formal target automorphisms, applied in order (innermost first).
    pub target_autos: Vec<FormalMap>,
    pub records: Vec<StepRecord>,
}

/// Normalizes the linear part, then at each degree `d = 2..=D` moves the
/// degree-`d` coefficients to the minimum Fischer-norm point of their orbit
/// under the automorphism directions of source and target.
pub fn normal_form(map: &FormalMap, d_max: u32) -> Result<NormalForm> {
    let (mut cur, a_src, a_dst) = normalize_initial(map)?;
    let (src, dst) = (cur.src(), cur.dst());
    let mut source_autos = Vec::new();
    let mut target_autos = Vec::new();
    let mut records = Vec::new();
    for d in 2..=d_max {
        let layout = StepLayout::new(src, dst, d);
        let x = layout.vector_of_map(&cur);
        let gauge = gauge_directions(&cur, d)?;
        let dirs = gauge.all();
        let (target_point, t) = min_norm_point(&x, &dirs, |c| layout.weight(c));
        if target_point == x {
            continue;
        }
        let (ts, tt) = t.split_at(gauge.source.len());
        let phi = extend_auto(src, d, &gauge.source_deltas, ts, d_max, &mut records)?;
        let psi = extend_auto(dst, d, &gauge.target_deltas, tt, d_max, &mut records)?;
        cur = psi.compose(&cur.compose(&phi)?)?;
        if layout.vector_of_map(&cur) != target_point {
            return Err(Error::InconsistentSystem {
                degree: d as usize,
                detail: "automorphism did not reach the gauge-fixed point".into(),
            });
        }
        source_autos.push(phi);
        target_autos.push(psi);
    }
    Ok(NormalForm { map: cur, linear: AutoPair::new(&a_src, &a_dst), source_autos, target_autos, records })
}

fn truncated_store(map: &FormalMap, d_max: u32) -> (MatrixPolynomial, MatrixPolynomial) {
    (
        map.f().map(|p| p.truncate_weighted(d_max)),
        map.g().map(|p| p.truncate_weighted(d_max + 1)),
    )
}

/// Decides whether two embeddings agree after normalization through degree
/// `D`. Both maps must carry terms through weighted degree `D + 1` and have
/// zero residual through total degree `D + 1`.
pub fn compare_embeddings(h1: &FormalMap, h2: &FormalMap, d_max: u32) -> Result<Certificate> {
    let (src, dst) = (h1.src(), h1.dst());
    if !h2.src().same_shape(&src) || !h2.dst().same_shape(&dst) {
        return Err(Error::Shape("maps have different source or target dimensions".into()));
    }
    for (i, h) in [h1, h2].into_iter().enumerate() {
        if h.truncation() < d_max + 1 {
            return Err(Error::Truncation(format!(
                "map {} is truncated at D = {}; comparing through degree {} needs D >= {}",
                i + 1,
                h.truncation(),
                d_max,
                d_max + 1
            )));
        }
        let r = residual_full(h, &flat_source(src, d_max + 1), &model_target(dst), d_max + 1)?;
        if !r.is_zero() {
            return Err(Error::Residual(format!("map {} is not an embedding through degree {}", i + 1, d_max + 1)));
        }
    }
    let n1 = normal_form(&h1.truncated(d_max + 1), d_max)?;
    let n2 = normal_form(&h2.truncated(d_max + 1), d_max)?;
    let f1 = linear_part(&n1.map);
    let mut per_degree = Vec::new();
    let mut equal = true;
    for d in 2..=d_max {
        let layout = StepLayout::new(src, dst, d);
        let kernel = homogeneous_kernel(src, dst, d, &f1)?;
        let gauge = gauge_directions(&n1.map, d)?.all();
        let (gauge_dim, extra) = split_kernel(layout.ncols(), &gauge, &kernel)?;
        let x1 = layout.vector_of_map(&n1.map);
        let x2 = layout.vector_of_map(&n2.map);
        equal &= x1 == x2;
        per_degree.push(DegreeReport {
            d,
            kernel_dim: kernel.len(),
            gauge_dim,
            nongauge_dim: extra.len(),
            unobstructed_dim: None,
            gauge_fixed_nonzero_count: x1.iter().map(|(c, _)| c / 2).collect::<std::collections::BTreeSet<_>>().len(),
        });
    }
    equal &= truncated_store(&n1.map, d_max) == truncated_store(&n2.map, d_max);
    let verdict = if equal { Verdict::Equivalent } else { Verdict::NotEquivalent };
    let mut records = n1.records.clone();
    records.extend(n2.records.iter().cloned());
    let formal_autos = if equal {
        [&n1, &n2]
            .iter()
            .flat_map(|n| n.source_autos.iter().chain(&n.target_autos).map(FormalMap::to_json))
            .collect()
    } else {
        Vec::new()
    };
    Ok(Certificate {
        verdict,
        src,
        dst,
        d: d_max,
        exploratory: false,
        condition: check_embedding_condition(src, dst),
        per_degree,
        autos: if equal { vec![n1.linear.clone(), n2.linear.clone()] } else { Vec::new() },
        formal_autos,
        directions: Vec::new(),
        note: None,
        records,
    })
}
