//! Formal maps between BSD models and submanifolds, the mapping-equation
//! residual, initial normalization, the degree-by-degree solver with gauge
//! fixing, and the rigidity and equivalence certifiers.

mod compare;
mod gauge;
mod map;
mod normalize;
mod obstruction;
mod rigidity;
mod step;
#[cfg(test)]
mod tests;

pub use map::{
    first_nonzero_degree, residual, residual_full, substitute_defining, CoeffBlockJson, Component, DimsJson,
    FormalMap, FormalMapJson, Target, whitney_map,
};
pub use step::{
    degree_step_solve, degree_step_system, gauge_fix, gauge_fix_point, linear_part, step_constant, step_matrix,
    DegreeStepSolution, Part, RowKey, Slot, StepLayout, StepMatrix,
};
pub use gauge::{
    auto_kernel, first_order, gauge_directions, homogeneous_kernel, source_direction, split_kernel, target_direction,
    AutoDelta, GaugeDirections,
};
pub use obstruction::{second_order_test, SecondOrder};
pub use normalize::{factor_linear_part, norm_root, normalize_initial};
pub use rigidity::{
    rigidity_check, AutoPair, Certificate, DegreeReport, DirectionJson, StepRecord, Verdict,
};
pub use compare::{compare_embeddings, normal_form, NormalForm};
