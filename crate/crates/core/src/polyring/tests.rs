use proptest::prelude::*;

use super::json::{polynomial_from_str, polynomial_to_string};
use super::*;
use crate::exactalg::GaussianRational;

fn g(n: i64) -> GaussianRational {
    GaussianRational::from_int(n)
}

fn sp(m: usize, n: usize) -> VarSpace {
    VarSpace::new(m, n).unwrap()
}

fn zidx(s: &VarSpace, rows: &[&[u32]]) -> MultiIndex {
    MultiIndex::new(IndexKind::Z, s, &rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
}

#[test]
fn monomial_examples() {
    let s = sp(1, 2);
    let p = Polynomial::monomial(
        s,
        &zidx(&s, &[&[1, 0]]),
        &MultiIndex::zero(IndexKind::Z, &s),
        &MultiIndex::zero(IndexKind::W, &s),
        g(1),
    )
    .unwrap();
    assert_eq!(p, Polynomial::z(s, 0, 0));

    let s1 = sp(1, 1);
    let p = Polynomial::monomial(
        s1,
        &zidx(&s1, &[&[2]]),
        &zidx(&s1, &[&[1]]),
        &MultiIndex::zero(IndexKind::W, &s1),
        GaussianRational::i(),
    )
    .unwrap();
    let z = Polynomial::z(s1, 0, 0);
    let expect = (&(&z * &z) * &Polynomial::zbar(s1, 0, 0)).scale(&GaussianRational::i());
    assert_eq!(p, expect);

    let zero = Polynomial::monomial(
        s,
        &zidx(&s, &[&[1, 0]]),
        &MultiIndex::zero(IndexKind::Z, &s),
        &MultiIndex::zero(IndexKind::W, &s),
        g(0),
    )
    .unwrap();
    assert!(zero.is_zero() && zero.terms().is_empty());

    let bad = Polynomial::monomial(
        s,
        &zidx(&s1, &[&[1]]),
        &MultiIndex::zero(IndexKind::Z, &s),
        &MultiIndex::zero(IndexKind::W, &s),
        g(1),
    );
    assert!(matches!(bad, Err(crate::Error::Shape(_))));
}

#[test]
fn arithmetic_examples() {
    let s = sp(1, 2);
    let z1 = Polynomial::z(s, 0, 0);
    let z2 = Polynomial::z(s, 0, 1);
    let zb1 = Polynomial::zbar(s, 0, 0);
    let zb2 = Polynomial::zbar(s, 0, 1);
    assert_eq!(poly_arith(&z1, &zb1, PolyOp::Mul).unwrap().len(), 1);
    let sum = poly_arith(&(&z1 + &z2), &(-&z2), PolyOp::Add).unwrap();
    assert_eq!(sum, z1);

    // (z1 zb1 + z2 zb2)^2, expanded by monomial products by hand
    let a = &z1 * &zb1;
    let b = &z2 * &zb2;
    let q = &a + &b;
    let sq = &q * &q;
    let expect = &(&(&a * &a) + &(&a * &b).scale(&g(2))) + &(&b * &b);
    assert_eq!(sq, expect);
    assert_eq!(sq.len(), 3);
    assert_eq!(sq.coeff((&a * &b).terms().keys().next().unwrap()), g(2));

    let other = Polynomial::z(sp(2, 1), 0, 0);
    assert!(poly_arith(&z1, &other, PolyOp::Add).is_err());
}

#[test]
fn bidegree_selection() {
    let s = sp(1, 1);
    let z = Polynomial::z(s, 0, 0);
    let zb = Polynomial::zbar(s, 0, 0);
    let w = Polynomial::w(s, 0, 0);
    let zzb = &z * &zb;
    let p = &(&z + &zzb) + &(&(&z * &z) * &zb);
    assert_eq!(p.bidegree_component(1, 1, Grading::ZZbar), zzb);
    let q = &(&z * &w) + &(&z * &z);
    assert_eq!(q.bidegree_component(1, 1, Grading::ZW), &z * &w);
}

#[test]
fn conjugate_examples() {
    let s = sp(1, 2);
    let iz = Polynomial::z(s, 0, 0).scale(&GaussianRational::i());
    assert_eq!(iz.conjugate(), Polynomial::zbar(s, 0, 0).scale(&-GaussianRational::i()));
    let p = &Polynomial::z(s, 0, 0) * &Polynomial::zbar(s, 0, 1);
    assert_eq!(p.conjugate(), &Polynomial::z(s, 0, 1) * &Polynomial::zbar(s, 0, 0));
}

#[test]
fn json_text_format() {
    let s = sp(1, 2);
    let p = &(&Polynomial::z(s, 0, 0) * &Polynomial::zbar(s, 0, 1)).scale(&GaussianRational::from_fracs(1, 2, -3, 4))
        + &Polynomial::w(s, 0, 0);
    let text = polynomial_to_string(&p);
    assert!(text.contains("\"re\":\"1/2\""));
    assert!(text.contains("\"im\":\"-3/4\""));
    assert_eq!(polynomial_from_str(&text).unwrap(), p);
    // omitted blocks are zero
    let q = polynomial_from_str(r#"{"m":1,"N":1,"terms":[{"re":"2","im":"0"}]}"#).unwrap();
    assert_eq!(q, Polynomial::constant(sp(1, 1), g(2)));
    assert!(polynomial_from_str(r#"{"m":1,"N":1,"terms":[{"zexp":[[1,1]],"re":"2","im":"0"}]}"#).is_err());
}

#[test]
fn substitution_of_model() {
    // w -> z zb turns w^2 into z^2 zb^2
    let s = sp(1, 1);
    let w = Polynomial::w(s, 0, 0);
    let z = Polynomial::z(s, 0, 0);
    let zb = Polynomial::zbar(s, 0, 0);
    let img = &z * &zb;
    let out = (&w * &w).substitute(s, &[z.clone()], &[zb.clone()], &[img.clone()], DegreeBound::None).unwrap();
    assert_eq!(out, &img * &img);
    let cut = (&w * &w).substitute(s, &[z], &[zb], &[img], DegreeBound::Total(3)).unwrap();
    assert!(cut.is_zero());
}

fn arb_poly(space: VarSpace) -> impl Strategy<Value = Polynomial> {
    let nv = space.nvars();
    prop::collection::vec((prop::collection::vec(0u32..3, nv), -5i64..6, -5i64..6, 1i64..4), 0..5).prop_map(
        move |terms| {
            let mut p = Polynomial::zero(space);
            for (e, a, b, d) in terms {
                p.add_term(Monomial::from_exps(e), GaussianRational::from_fracs(a, d, b, d));
            }
            p
        },
    )
}

fn arb_space() -> impl Strategy<Value = VarSpace> {
    (1usize..3, 1usize..3).prop_map(|(m, n)| VarSpace::new(m, n).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms((p, q, r) in arb_space().prop_flat_map(|s| (arb_poly(s), arb_poly(s), arb_poly(s)))) {
        prop_assert_eq!(&p * &q, &q * &p);
        prop_assert_eq!(&p + &q, &q + &p);
        prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
        prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
        prop_assert!(p.terms().values().all(|c| *c != GaussianRational::default()));
    }

    #[test]
    fn bidegree_is_a_partition(p in arb_space().prop_flat_map(arb_poly)) {
        let mut acc = Polynomial::zero(*p.space());
        for (k, l) in p.bidegrees(Grading::ZZbar) {
            let c = p.bidegree_component(k, l, Grading::ZZbar);
            prop_assert_eq!(c.bidegree_component(k, l, Grading::ZZbar), c.clone());
            acc = &acc + &c;
        }
        prop_assert_eq!(acc, p);
    }

    #[test]
    fn conjugate_is_involution(p in arb_space().prop_flat_map(arb_poly)) {
        prop_assert_eq!(p.conjugate().conjugate(), p);
    }

    #[test]
    fn json_roundtrip(p in arb_space().prop_flat_map(arb_poly)) {
        prop_assert_eq!(polynomial_from_str(&polynomial_to_string(&p)).unwrap(), p);
    }
}
