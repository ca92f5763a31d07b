use std::sync::Arc;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::gauge::{flat_source, gauge_directions, model_target, split_kernel};
use super::map::{FormalMap, FormalMapJson};
use super::step::{degree_step_system, StepLayout, StepMatrix};
use crate::bsd::{check_embedding_condition, EmbeddingReport, LinearAuto, LinearAutoJson, ModelDims};
use crate::error::{Error, Result};
use crate::exactalg::SparseVec;
use super::normalize::normalize_initial;
use super::obstruction::second_order_test;
use crate::polyring::json::{polynomial_to_json, TermJson};
use crate::polyring::MatrixPolynomial;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "RIGID")]
    Rigid,
    #[serde(rename = "NOT RIGID")]
    NotRigid,
    #[serde(rename = "EQUIVALENT")]
    Equivalent,
    #[serde(rename = "NOT EQUIVALENT")]
    NotEquivalent,
}

impl Verdict {
    pub fn is_positive(self) -> bool {
        matches!(self, Verdict::Rigid | Verdict::Equivalent)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Rigid => "RIGID",
            Verdict::NotRigid => "NOT RIGID",
            Verdict::Equivalent => "EQUIVALENT",
            Verdict::NotEquivalent => "NOT EQUIVALENT",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeReport {
    pub d: u32,
    pub kernel_dim: usize,
    pub gauge_dim: usize,
    pub nongauge_dim: usize,
    /// Non-gauge directions not ruled out by the second-order test.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unobstructed_dim: Option<usize>,
    pub gauge_fixed_nonzero_count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutoPair {
    pub source: LinearAutoJson,
    pub target: LinearAutoJson,
}

impl AutoPair {
    pub fn new(source: &LinearAuto, target: &LinearAuto) -> Self {
        AutoPair { source: source.to_json(), target: target.to_json() }
    }
}

/// A degree-`d` increment `(δF, δG)` written as term lists per entry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectionJson {
    pub d: u32,
    pub f: Vec<Vec<Vec<TermJson>>>,
    pub g: Vec<Vec<Vec<TermJson>>>,
}

pub(crate) fn matrix_terms(mp: &MatrixPolynomial) -> Vec<Vec<Vec<TermJson>>> {
    mp.to_rows().iter().map(|row| row.iter().map(|p| polynomial_to_json(p).terms).collect()).collect()
}

impl DirectionJson {
    pub fn from_vector(layout: &StepLayout, v: &SparseVec<BigRational>) -> Self {
        let (f, g) = layout.delta(v);
        DirectionJson { d: layout.d, f: matrix_terms(&f), g: matrix_terms(&g) }
    }
}

/// One assembled degree step, kept so callers can re-solve it.
#[derive(Clone, Debug)]
pub struct StepRecord {
    pub matrix: Arc<StepMatrix>,
    pub rhs: Vec<BigRational>,
    pub gauge_fixed: SparseVec<BigRational>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub verdict: Verdict,
    pub src: ModelDims,
    pub dst: ModelDims,
    #[serde(rename = "D")]
    pub d: u32,
    pub exploratory: bool,
    pub condition: EmbeddingReport,
    pub per_degree: Vec<DegreeReport>,
    pub autos: Vec<AutoPair>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub formal_autos: Vec<FormalMapJson>,
    /// Kernel directions not produced by automorphisms and not ruled out at
    /// second order.
    pub directions: Vec<DirectionJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip)]
    pub records: Vec<StepRecord>,
}

impl Certificate {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

/// Solves the step systems of the standard embedding `src → dst` for
/// `d = 2..=D` and compares every solution space with the directions
/// produced by automorphisms of source and target. The verdict is RIGID
/// when each gauge-fixed assignment is zero and every kernel direction is
/// such an automorphism direction or is obstructed at second order (its
/// quadratic term in degree `2d` cannot be absorbed). The embedding condition is enforced
/// unless `exploratory` is set or source and target coincide.
pub fn rigidity_check(src: ModelDims, dst: ModelDims, d_max: u32, exploratory: bool) -> Result<Certificate> {
    let condition = check_embedding_condition(src, dst);
    let equidimensional = src.same_shape(&dst);
    if !condition.holds && !equidimensional && !exploratory {
        return Err(Error::Condition(format!(
            "({},{}) -> ({},{}) violates the embedding condition: {}",
            src.m,
            src.n,
            dst.m,
            dst.n,
            condition.clauses.join("; ")
        )));
    }
    if src.m > dst.m || src.n > dst.n {
        return Err(Error::Dims(format!(
            "no standard embedding ({},{}) -> ({},{})",
            src.m, src.n, dst.m, dst.n
        )));
    }
    let start = FormalMap::standard(src, dst, d_max.max(2) + 1)?;
    let (map, a_src, a_dst) = normalize_initial(&start)?;
    let source = flat_source(src, d_max + 1);
    let target = model_target(dst);
    let mut per_degree = Vec::new();
    let mut directions = Vec::new();
    let mut records = Vec::new();
    let mut rigid = true;
    for d in 2..=d_max {
        let (matrix, rhs) = degree_step_system(&map, &source, &target, d)?;
        let sol = matrix.solve(&rhs, None)?;
        let gauge = gauge_directions(&map, d)?.all();
        let (gauge_dim, extra) = split_kernel(matrix.layout.ncols(), &gauge, &sol.kernel)?;
        let free = second_order_test(&map, d, &gauge, &extra)?.free;
        let report = DegreeReport {
            d,
            kernel_dim: sol.kernel_dim(),
            gauge_dim,
            nongauge_dim: extra.len(),
            unobstructed_dim: Some(free.len()),
            gauge_fixed_nonzero_count: sol.gauge_fixed_nonzero_count(),
        };
        rigid &= free.is_empty() && report.gauge_fixed_nonzero_count == 0;
        directions.extend(free.iter().map(|v| DirectionJson::from_vector(&matrix.layout, v)));
        per_degree.push(report);
        records.push(StepRecord { matrix, rhs, gauge_fixed: sol.gauge_fixed });
    }
    let note = (!condition.holds && !equidimensional).then(|| "exploratory run outside the theorem's hypotheses".to_string());
    Ok(Certificate {
        verdict: if rigid { Verdict::Rigid } else { Verdict::NotRigid },
        src,
        dst,
        d: d_max,
        exploratory,
        condition,
        per_degree,
        autos: vec![AutoPair::new(&a_src, &a_dst)],
        formal_autos: Vec::new(),
        directions,
        note,
        records,
    })
}
