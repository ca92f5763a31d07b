use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::bsd::{random_linear_auto, BsdModel, LinearAuto, Submanifold};
use crate::error::Error;
use crate::exactalg::{rat, GaussianRational};
use crate::polyring::{Polynomial, VarSpace};

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
fn norm_roots() {
    assert_eq!(norm_root(&rat(1, 1)), Some(GaussianRational::from_int(1)));
    assert_eq!(norm_root(&rat(9, 4)), Some(GaussianRational::from_fracs(3, 2, 0, 1)));
    let k = norm_root(&rat(5, 1)).unwrap();
    assert_eq!(k.norm_sqr(), rat(5, 1));
    assert_eq!(norm_root(&rat(3, 1)), None);
    assert_eq!(norm_root(&rat(0, 1)), None);
}

#[test]
fn normalize_recovers_linear_autos_and_is_idempotent() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (s, t) in [(sp(1, 2), sp(2, 3)), (sp(2, 2), sp(2, 3)), (sp(1, 1), sp(1, 1))] {
        let std_map = FormalMap::standard(s, t, 3).unwrap();
        let h = std_map
            .precompose(&random_linear_auto(s, &mut rng))
            .unwrap()
            .postcompose(&random_linear_auto(t, &mut rng))
            .unwrap();
        let (n, _, _) = normalize_initial(&h).unwrap();
        assert_eq!(n, std_map);
        let (n2, a, b) = normalize_initial(&n).unwrap();
        assert_eq!(n2, n);
        assert!(a.is_identity() && b.is_identity());
    }
}

#[test]
fn normalize_rejects_degenerate_linear_parts() {
    let (s, t) = (sp(2, 2), sp(2, 2));
    let mut h = FormalMap::zero(s, t, 2);
    h.add_coeff(Component::F, 0, 0, Polynomial::z(s, 0, 0).terms().keys().next().unwrap().clone(), 1.into());
    assert!(matches!(normalize_initial(&h), Err(Error::Rank(_))));
    let h = FormalMap::zero(s, t, 2);
    assert!(matches!(normalize_initial(&h), Err(Error::Rank(_))));
}

#[test]
fn rigidity_small_cases() {
    for (s, d) in [(sp(1, 1), 3), (sp(1, 2), 3)] {
        let c = rigidity_check(s, s, d, false).unwrap();
        assert_eq!(c.verdict, Verdict::Rigid);
        assert!(c.per_degree.iter().all(|r| r.gauge_dim == r.kernel_dim));
    }
    assert!(matches!(rigidity_check(sp(1, 1), sp(1, 2), 2, false), Err(Error::Condition(_))));
    let c = rigidity_check(sp(1, 1), sp(1, 2), 2, true).unwrap();
    assert_eq!(c.verdict, Verdict::NotRigid);
    assert_eq!(c.per_degree[0].nongauge_dim, 2);
    let json: serde_json::Value = serde_json::from_str(&c.to_json_string()).unwrap();
    assert_eq!(json["verdict"], "NOT RIGID");
    assert_eq!(json["per_degree"][0]["d"], 2);
}

#[test]
fn whitney_direction_is_not_gauge() {
    let (s, t) = (sp(1, 1), sp(1, 2));
    let std_map = FormalMap::standard(s, t, 3).unwrap();
    let layout = StepLayout::new(s, t, 2);
    let w = layout.vector_of_map(&whitney_map(&1.into(), &3.into(), 3));
    let gauge = gauge_directions(&std_map, 2).unwrap().all();
    let kernel = homogeneous_kernel(s, t, 2, &linear_part(&std_map)).unwrap();
    let (_, extra) = split_kernel(layout.ncols(), &gauge, &[w]).unwrap();
    assert_eq!(extra.len(), 1);
    let (r0, _) = split_kernel(layout.ncols(), &kernel, &[]).unwrap();
    let mut with_w = kernel.to_vec();
    with_w.push(layout.vector_of_map(&whitney_map(&1.into(), &3.into(), 3)));
    let (r1, _) = split_kernel(layout.ncols(), &with_w, &[]).unwrap();
    assert_eq!(r0, r1);
}

#[test]
fn gauge_directions_lie_in_the_kernel() {
    for (s, t) in [(sp(1, 2), sp(2, 3)), (sp(2, 2), sp(2, 2))] {
        let std_map = FormalMap::standard(s, t, 4).unwrap();
        for d in 2..=3 {
            let mat = step_matrix(s, t, d, &linear_part(&std_map)).unwrap();
            let zero = vec![Default::default(); mat.nrows()];
            for v in gauge_directions(&std_map, d).unwrap().all() {
                assert!(mat.satisfies(&v, &zero));
            }
        }
    }
}

fn nonlinear_auto(space: VarSpace, d: u32, seed: u64) -> FormalMap {
    let kernel = auto_kernel(space, 2).unwrap();
    let mut auto = FormalMap::standard(space, space, d).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (df, dg) in &kernel {
        let c = GaussianRational::from_int(rand::Rng::gen_range(&mut rng, -2..=2));
        for (comp, mp) in [(Component::F, df), (Component::G, dg)] {
            for r in 0..mp.rows() {
                for col in 0..mp.cols() {
                    for (mono, x) in mp.get(r, col).terms() {
                        auto.add_coeff(comp, r, col, mono.clone(), x * &c);
                    }
                }
            }
        }
    }
    let (src, tgt) = (flat(space, d), model(space));
    for e in 3..d {
        let sol = degree_step_solve(&auto, &src, &tgt, e, None).unwrap();
        auto = sol.layout.with_vector(&auto, &sol.particular);
    }
    auto
}

#[test]
fn nonlinear_automorphisms_are_detected_as_equivalent() {
    let (s, t) = (sp(1, 2), sp(1, 2));
    let phi = nonlinear_auto(s, 4, 3);
    assert!(residual_full(&phi, &flat(s, 4), &model(s), 4).unwrap().is_zero());
    let std_map = FormalMap::standard(s, t, 4).unwrap();
    let h2 = std_map.compose(&phi).unwrap().postcompose(&random_linear_auto(t, &mut ChaCha8Rng::seed_from_u64(5))).unwrap();
    let c = compare_embeddings(&std_map, &h2, 3).unwrap();
    assert_eq!(c.verdict, Verdict::Equivalent);
    assert!(!c.formal_autos.is_empty());
}

#[test]
fn compare_reports_whitney_and_errors() {
    let (s, t) = (sp(1, 1), sp(1, 2));
    let std_map = FormalMap::standard(s, t, 3).unwrap();
    let w = whitney_map(&1.into(), &2.into(), 3);
    assert_eq!(compare_embeddings(&std_map, &w, 2).unwrap().verdict, Verdict::NotEquivalent);
    assert_eq!(compare_embeddings(&std_map, &std_map, 2).unwrap().verdict, Verdict::Equivalent);
    assert!(matches!(compare_embeddings(&std_map, &w, 3), Err(Error::Truncation(_))));
    let mut bad = std_map.clone();
    bad.add_coeff(Component::F, 0, 0, crate::polyring::weighted_holomorphic_monomials(&s, 2)[0].clone(), 1.into());
    assert!(matches!(compare_embeddings(&std_map, &bad, 2), Err(Error::Residual(_))));
    let c = compare_embeddings(&std_map, &std_map, 2).unwrap();
    assert!(c.autos.iter().all(|p| LinearAuto::from_json(&p.target).unwrap().is_identity()));
}

#[test]
fn composition_lives_over_the_inner_source() {
    let s = VarSpace::new(1, 2).unwrap();
    let t = VarSpace::new(2, 3).unwrap();
    let h = FormalMap::standard(s, t, 3).unwrap();
    let id_t = FormalMap::standard(t, t, 3).unwrap();
    let c = id_t.compose(&h).unwrap();
    assert_eq!(c.f().space(), &s);
    assert_eq!(c, h);
}

#[test]
fn gauge_witness_in_the_first_row_is_equivalent() {
    // F[0][N] = c·w, G[0][0] += |c|²w² is produced by a target automorphism
    let s = VarSpace::new(1, 2).unwrap();
    let t = VarSpace::new(2, 3).unwrap();
    let mut h = FormalMap::standard(s, t, 4).unwrap();
    let w = Polynomial::w(s, 0, 0);
    let mono = |p: &Polynomial| p.terms().keys().next().cloned().unwrap();
    h.add_coeff(Component::F, 0, 2, mono(&w), GaussianRational::from_int(2));
    h.add_coeff(Component::G, 0, 0, mono(&(&w * &w)), GaussianRational::from_int(4));
    let std = FormalMap::standard(s, t, 4).unwrap();
    assert_eq!(compare_embeddings(&std, &h, 3).unwrap().verdict, Verdict::Equivalent);
}

#[test]
fn second_order_test_separates_block_and_mixed_directions() {
    let s = VarSpace::new(1, 2).unwrap();
    let t = VarSpace::new(2, 3).unwrap();
    let cert = rigidity_check(s, t, 3, false).unwrap();
    assert_eq!(cert.verdict, Verdict::NotRigid);
    let d2 = &cert.per_degree[0];
    assert!(d2.nongauge_dim > 0);
    assert!(d2.unobstructed_dim.unwrap() > 0);
    // weight-3 directions cannot be pure functions of w
    assert_eq!(cert.per_degree[1].unobstructed_dim, Some(0));
}
