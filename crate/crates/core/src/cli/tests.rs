use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};

use super::*;
use crate::exactalg::GaussianRational;
use crate::mapeq::Component;
use crate::polyring::json::{polynomial_from_json, polynomial_to_string};
use crate::polyring::Polynomial;
use crate::selftest::block_witness;

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn run(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("bsdnf").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    Run { code, out: String::from_utf8(out).unwrap(), err: String::from_utf8(err).unwrap() }
}

fn scratch(name: &str, body: &str) -> PathBuf {
    static NEXT: AtomicUsize = AtomicUsize::new(0);
    let dir = std::env::temp_dir().join(format!("bsdnf-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(format!("{}-{name}", NEXT.fetch_add(1, Ordering::Relaxed)));
    std::fs::write(&path, body).unwrap();
    path
}

fn error_kind(r: &Run) -> String {
    let doc: ErrorJson = serde_json::from_str(r.err.trim()).expect("stderr holds an error document");
    doc.error
}

#[test]
fn rigidity_equidimensional_is_rigid() {
    let r = run(&["rigidity", "--m", "1", "--N", "2", "--mp", "1", "--Np", "2", "--degree", "3"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let v: serde_json::Value = serde_json::from_str(&r.out).unwrap();
    assert_eq!(v["verdict"], "RIGID");
}

#[test]
fn rigidity_condition_violation_exits_one() {
    let r = run(&["rigidity", "--m", "1", "--N", "1", "--mp", "1", "--Np", "2", "--degree", "2"]);
    assert_eq!(r.code, EXIT_CONDITION);
    assert_eq!(error_kind(&r), "ConditionError");
    assert!(r.out.is_empty());
}

#[test]
fn rigidity_exploratory_reports_verdict() {
    let r = run(&["rigidity", "--m", "1", "--N", "1", "--mp", "1", "--Np", "2", "--degree", "2", "--exploratory"]);
    assert!(r.code == EXIT_OK || r.code == EXIT_NEGATIVE, "{}", r.err);
    let v: serde_json::Value = serde_json::from_str(&r.out).unwrap();
    assert_eq!(v["exploratory"], true);
    assert_eq!(v["verdict"].as_str().unwrap() == "RIGID", r.code == EXIT_OK);
}

#[test]
fn degree_cap_rejects_large_degree() {
    if std::env::var(MAX_DEGREE_ENV).is_ok() {
        return;
    }
    let r = run(&["rigidity", "--m", "1", "--N", "2", "--mp", "1", "--Np", "2", "--degree", "7"]);
    assert_eq!(r.code, EXIT_INPUT);
    assert_eq!(error_kind(&r), "DegreeLimit");
}

#[test]
fn parse_errors_exit_two_with_json() {
    for args in [
        vec!["rigidity", "--m", "1"],
        vec!["frobnicate"],
        vec!["rigidity", "--m", "x", "--N", "2", "--mp", "1", "--Np", "2", "--degree", "2"],
    ] {
        let r = run(&args);
        assert_eq!(r.code, EXIT_INPUT, "{args:?}");
        assert_eq!(error_kind(&r), "ParseError");
    }
}

#[test]
fn help_exits_zero() {
    let r = run(&["--help"]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.out.contains("decompose"));
}

#[test]
fn decompose_closed_form() {
    let s = VarSpace::new(1, 2).unwrap();
    let p = &Polynomial::z(s, 0, 0) * &Polynomial::zbar(s, 0, 0);
    let file = scratch("p.json", &polynomial_to_string(&p));
    let r = run(&["decompose", "--m", "1", "--N", "2", "--bidegree", "1", "1", "--poly", file.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let doc: DecompositionJson = serde_json::from_str(&r.out).unwrap();
    assert!(doc.kernel_membership);
    assert_eq!(doc.variant, "high");
    assert_eq!(doc.quotients.len(), 1);
    let half = GaussianRational::from_fracs(1, 2, 0, 1);
    let q = polynomial_from_json(&doc.quotients[0].q).unwrap();
    assert_eq!(q, Polynomial::constant(s, half.clone()));
    let expect = &(&Polynomial::z(s, 0, 0) * &Polynomial::zbar(s, 0, 0)).scale(&half)
        - &(&Polynomial::z(s, 0, 1) * &Polynomial::zbar(s, 0, 1)).scale(&half);
    assert_eq!(polynomial_from_json(&doc.remainder).unwrap(), expect);

    // The document re-parses to an identical value.
    let again: DecompositionJson = serde_json::from_str(&serde_json::to_string(&doc).unwrap()).unwrap();
    assert_eq!(again, doc);
}

#[test]
fn decompose_to_file_and_low_variant() {
    let s = VarSpace::new(1, 2).unwrap();
    let p = &Polynomial::zbar(s, 0, 0) * &Polynomial::zbar(s, 0, 1);
    let file = scratch("low.json", &polynomial_to_string(&p));
    let out = file.with_extension("out.json");
    let r = run(&[
        "decompose", "--m", "1", "--N", "2", "--bidegree", "0", "2", "--variant", "low:1",
        "--poly", file.to_str().unwrap(), "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    assert!(r.out.contains("kernel membership verified"));
    let doc: DecompositionJson = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc.variant, "low:1");
    assert!(doc.kernel_membership);
}

#[test]
fn decompose_rejects_bad_input() {
    let s = VarSpace::new(1, 2).unwrap();
    let p = &Polynomial::z(s, 0, 0) * &Polynomial::zbar(s, 0, 0);
    let file = scratch("p.json", &polynomial_to_string(&p));
    let path = file.to_str().unwrap();
    let wrong_space = run(&["decompose", "--m", "2", "--N", "2", "--bidegree", "1", "1", "--poly", path]);
    assert_eq!(wrong_space.code, EXIT_INPUT);
    assert_eq!(error_kind(&wrong_space), "ShapeError");
    let wrong_degree = run(&["decompose", "--m", "1", "--N", "2", "--bidegree", "2", "0", "--poly", path]);
    assert_eq!(wrong_degree.code, EXIT_INPUT);
    let bad_variant = run(&["decompose", "--m", "1", "--N", "2", "--bidegree", "1", "1", "--variant", "mid", "--poly", path]);
    assert_eq!(bad_variant.code, EXIT_INPUT);
    assert_eq!(error_kind(&bad_variant), "ParseError");
    let garbage = scratch("bad.json", "{ not json");
    let r = run(&["decompose", "--m", "1", "--N", "2", "--bidegree", "1", "1", "--poly", garbage.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_INPUT);
    let missing = run(&["decompose", "--m", "1", "--N", "2", "--bidegree", "1", "1", "--poly", "/nonexistent/p.json"]);
    assert_eq!(missing.code, EXIT_INPUT);
    assert_eq!(error_kind(&missing), "IoError");
}

#[test]
fn variant_names_round_trip() {
    for v in [Variant::High, Variant::Low { j: 1 }, Variant::Low { j: 3 }] {
        assert_eq!(parse_variant(&variant_name(v)).unwrap(), v);
    }
    assert!(parse_variant("low:").is_err());
    assert!(parse_variant("high:1").is_err());
}

#[test]
fn residual_of_standard_embedding_vanishes() {
    let h = FormalMap::standard(VarSpace::new(1, 2).unwrap(), VarSpace::new(2, 3).unwrap(), 3).unwrap();
    let file = scratch("h.json", &h.to_json_string());
    let r = run(&["residual", "--map", file.to_str().unwrap(), "--bidegree", "1", "1"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let doc: ResidualJson = serde_json::from_str(&r.out).unwrap();
    assert!(doc.zero);
    assert_eq!(doc.entries.len(), 2);
}

#[test]
fn compare_identical_and_different_maps() {
    let (s, t) = (VarSpace::new(1, 3).unwrap(), VarSpace::new(2, 4).unwrap());
    let std_map = FormalMap::standard(s, t, 4).unwrap();
    let a = scratch("a.json", &std_map.to_json_string());
    let same = run(&["compare", "--map1", a.to_str().unwrap(), "--map2", a.to_str().unwrap(), "--degree", "3"]);
    assert_eq!(same.code, EXIT_OK, "{}", same.err);
    assert!(same.out.contains("\"EQUIVALENT\""));

    let w = block_witness(3, &GaussianRational::from_int(1), 4).unwrap();
    let b = scratch("b.json", &w.to_json_string());
    let diff = run(&["compare", "--map1", a.to_str().unwrap(), "--map2", b.to_str().unwrap(), "--degree", "3"]);
    assert_eq!(diff.code, EXIT_NEGATIVE, "{}", diff.err);
}

#[test]
fn compare_reports_nonzero_residual_as_negative() {
    let (s, t) = (VarSpace::new(1, 2).unwrap(), VarSpace::new(2, 3).unwrap());
    let std_map = FormalMap::standard(s, t, 4).unwrap();
    // z_11² in F_11 breaks the mapping equation at degree 2.
    let mut broken = std_map.clone();
    let z = Polynomial::z(s, 0, 0);
    let (mono, _) = (&z * &z).terms().iter().next().map(|(m, c)| (m.clone(), c.clone())).unwrap();
    broken.add_coeff(Component::F, 0, 0, mono, GaussianRational::from_int(1));
    let a = scratch("a.json", &std_map.to_json_string());
    let b = scratch("broken.json", &broken.to_json_string());
    let r = run(&["compare", "--map1", a.to_str().unwrap(), "--map2", b.to_str().unwrap(), "--degree", "3"]);
    assert_eq!(r.code, EXIT_NEGATIVE);
    assert_eq!(error_kind(&r), "ResidualError");
}

#[test]
fn dims_table() {
    let r = run(&["dims", "--m", "1", "--N", "2", "--max-bidegree", "2", "--json"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let rows: Vec<DimsRow> = serde_json::from_str(&r.out).unwrap();
    assert_eq!(rows.len(), 9);
    let row = rows.iter().find(|r| (r.p, r.n) == (1, 1)).unwrap();
    // Harmonic (1,1) forms on C^2: 4 monomials minus the trace.
    assert_eq!((row.dim, row.total), (3, 4));
    assert!(rows.iter().all(|r| r.dim <= r.total));
    let text = run(&["dims", "--m", "1", "--N", "2", "--max-bidegree", "1"]);
    assert_eq!(text.code, EXIT_OK);
    assert!(text.out.lines().count() >= 5);
}
