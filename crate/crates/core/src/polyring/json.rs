//! JSON text format for polynomials:
//! `{"m":…, "N":…, "terms":[{"zexp":[[…]], "zbarexp":[[…]], "wexp":[[…]], "re":"p/q", "im":"p/q"}]}`.
//! Omitted exponent blocks are all-zero; rationals are strings.

use serde::{Deserialize, Serialize};

use super::index::{IndexKind, MultiIndex, VarSpace};
use super::poly::{Monomial, Polynomial};
use crate::error::{Error, Result};
use crate::exactalg::{format_rational, parse_rational, GaussianRational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub zexp: Option<Vec<Vec<u32>>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub zbarexp: Option<Vec<Vec<u32>>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wexp: Option<Vec<Vec<u32>>>,
    pub re: String,
    #[serde(default = "zero_string")]
    pub im: String,
}

fn zero_string() -> String {
    "0".into()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolynomialJson {
    pub m: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub terms: Vec<TermJson>,
}

/// Coefficient as a pair of rational strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScalarJson {
    pub re: String,
    pub im: String,
}

impl From<&GaussianRational> for ScalarJson {
    fn from(c: &GaussianRational) -> Self {
        ScalarJson { re: format_rational(&c.re), im: format_rational(&c.im) }
    }
}

impl ScalarJson {
    pub fn parse(&self) -> Result<GaussianRational> {
        Ok(GaussianRational::new(parse_rational(&self.re)?, parse_rational(&self.im)?))
    }
}

fn block(m: &MultiIndex) -> Option<Vec<Vec<u32>>> {
    if m.length() == 0 {
        None
    } else {
        Some(m.to_matrix())
    }
}

pub fn polynomial_to_json(p: &Polynomial) -> PolynomialJson {
    let sp = *p.space();
    PolynomialJson {
        m: sp.m,
        n: sp.n,
        terms: p
            .terms()
            .iter()
            .map(|(mono, c)| TermJson {
                zexp: block(&mono.z_index(&sp)),
                zbarexp: block(&mono.zbar_index(&sp)),
                wexp: block(&mono.w_index(&sp)),
                re: format_rational(&c.re),
                im: format_rational(&c.im),
            })
            .collect(),
    }
}

pub fn polynomial_from_json(doc: &PolynomialJson) -> Result<Polynomial> {
    let sp = VarSpace::new(doc.m, doc.n)?;
    polynomial_from_terms(sp, &doc.terms)
}

pub fn polynomial_from_terms(sp: VarSpace, terms: &[TermJson]) -> Result<Polynomial> {
    let mut p = Polynomial::zero(sp);
    let idx = |b: &Option<Vec<Vec<u32>>>, kind: IndexKind| -> Result<MultiIndex> {
        match b {
            None => Ok(MultiIndex::zero(kind, &sp)),
            Some(mat) => MultiIndex::new(kind, &sp, mat),
        }
    };
    for t in terms {
        let mono = Monomial::from_indices(
            &sp,
            &idx(&t.zexp, IndexKind::Z)?,
            &idx(&t.zbarexp, IndexKind::Z)?,
            &idx(&t.wexp, IndexKind::W)?,
        )?;
        let c = GaussianRational::new(parse_rational(&t.re)?, parse_rational(&t.im)?);
        p.add_term(mono, c);
    }
    Ok(p)
}

pub fn polynomial_to_string(p: &Polynomial) -> String {
    serde_json::to_string(&polynomial_to_json(p)).expect("serializable")
}

pub fn polynomial_from_str(s: &str) -> Result<Polynomial> {
    let doc: PolynomialJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    polynomial_from_json(&doc)
}
