//! Command-line front end. Every verb is a pure function of its argument
//! vector (plus `BSDNF_MAX_DEGREE`) and reports through exit codes:
//! 0 success or positive verdict, 3 negative verdict, 1 embedding condition
//! violated, 2 malformed input; errors go to standard error as JSON.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::bsd::{BsdModel, Submanifold};
use crate::error::Error;
use crate::fischer::{decompose_variant, default_variant, kernel_dimension_table, FischerDecomposition, Variant};
use crate::mapeq::{compare_embeddings, residual, rigidity_check, FormalMap, Target};
use crate::polyring::json::{polynomial_from_str, polynomial_to_json, PolynomialJson};
use crate::polyring::VarSpace;
use crate::selftest;

pub const MAX_DEGREE_ENV: &str = "BSDNF_MAX_DEGREE";
pub const DEFAULT_MAX_DEGREE: u32 = 6;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONDITION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NEGATIVE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "bsdnf", version, about = "Fischer decompositions and normal forms of embeddings between BSD models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generalized Fischer decomposition of a bihomogeneous polynomial.
    Decompose {
        #[arg(long)]
        m: usize,
        #[arg(long = "N")]
        n: usize,
        /// Bidegree `p n` in (Z, Z̄).
        #[arg(long, num_args = 2, value_names = ["P", "N"])]
        bidegree: Vec<u32>,
        /// `high` (p ≥ n) or `low:j` (p < n, prefactor z_jj).
        #[arg(long, default_value = "high")]
        variant: String,
        /// Polynomial JSON file.
        #[arg(long)]
        poly: PathBuf,
        /// Write the decomposition here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bidegree-(k,l) block of the mapping-equation residual.
    Residual {
        #[arg(long)]
        map: PathBuf,
        /// Source submanifold JSON; the flat model when omitted.
        #[arg(long)]
        source: Option<PathBuf>,
        /// Target submanifold JSON, or `model` for the flat target model.
        #[arg(long, default_value = "model")]
        target: String,
        #[arg(long, num_args = 2, value_names = ["K", "L"])]
        bidegree: Vec<u32>,
    },
    /// Degree-by-degree rigidity certificate for the standard embedding.
    Rigidity {
        #[arg(long)]
        m: usize,
        #[arg(long = "N")]
        n: usize,
        #[arg(long)]
        mp: usize,
        #[arg(long = "Np")]
        np: usize,
        #[arg(long)]
        degree: u32,
        /// Run even when the embedding condition fails.
        #[arg(long)]
        exploratory: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide whether two embeddings agree after normalization.
    Compare {
        #[arg(long)]
        map1: PathBuf,
        #[arg(long)]
        map2: PathBuf,
        #[arg(long)]
        degree: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dimensions of the remainder spaces for bidegrees up to `B`.
    Dims {
        #[arg(long)]
        m: usize,
        #[arg(long = "N")]
        n: usize,
        #[arg(long = "max-bidegree")]
        max_bidegree: u32,
        #[arg(long)]
        json: bool,
    },
    /// Run the acceptance suite.
    Selftest {
        #[arg(long)]
        json: bool,
    },
}

/// Error document written to standard error.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorJson {
    pub error: String,
    pub message: String,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    kind: String,
    message: String,
}

impl Failure {
    fn input(kind: &str, message: impl Into<String>) -> Self {
        Failure { code: EXIT_INPUT, kind: kind.into(), message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Condition(_) => EXIT_CONDITION,
            _ => EXIT_INPUT,
        };
        Failure { code, kind: e.kind().into(), message: e.to_string() }
    }
}

type Outcome = std::result::Result<i32, Failure>;

/// One quotient of a decomposition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientJson {
    #[serde(rename = "J")]
    pub j: Vec<Vec<u32>>,
    #[serde(rename = "Q")]
    pub q: PolynomialJson,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub m: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub bidegree: [u32; 2],
    pub variant: String,
    pub quotients: Vec<QuotientJson>,
    #[serde(rename = "R")]
    pub remainder: PolynomialJson,
    pub dependency_dim: usize,
    pub kernel_membership: bool,
}

impl DecompositionJson {
    pub fn from_decomposition(d: &FischerDecomposition) -> crate::Result<Self> {
        Ok(DecompositionJson {
            m: d.space.m,
            n: d.space.n,
            bidegree: [d.bidegree.0, d.bidegree.1],
            variant: variant_name(d.variant),
            quotients: d
                .quotients
                .iter()
                .map(|(j, q)| QuotientJson { j: j.to_matrix(), q: polynomial_to_json(q) })
                .collect(),
            remainder: polynomial_to_json(&d.remainder),
            dependency_dim: d.dependency_dim,
            kernel_membership: d.remainder_in_kernel()?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidualJson {
    pub bidegree: [u32; 2],
    pub zero: bool,
    pub entries: Vec<Vec<PolynomialJson>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimsRow {
    pub p: u32,
    pub n: u32,
    pub variant: String,
    pub dim: usize,
    /// Dimension of the whole bihomogeneous space.
    pub total: usize,
}

pub fn variant_name(v: Variant) -> String {
    match v {
        Variant::High => "high".into(),
        Variant::Low { j } => format!("low:{j}"),
    }
}

pub fn parse_variant(s: &str) -> crate::Result<Variant> {
    match s.split_once(':') {
        None if s == "high" => Ok(Variant::High),
        Some(("low", j)) => {
            let j: usize = j.parse().map_err(|_| Error::Parse(format!("bad diagonal index in variant {s:?}")))?;
            Ok(Variant::Low { j })
        }
        _ => Err(Error::Parse(format!("variant must be `high` or `low:j`, got {s:?}"))),
    }
}

/// Degree cap from `BSDNF_MAX_DEGREE`, defaulting to 6.
pub fn max_degree() -> crate::Result<u32> {
    match std::env::var(MAX_DEGREE_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| Error::Parse(format!("{MAX_DEGREE_ENV} must be a non-negative integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_MAX_DEGREE),
    }
}

fn check_degree(d: u32) -> std::result::Result<(), Failure> {
    let cap = max_degree()?;
    if d > cap {
        return Err(Failure::input(
            "DegreeLimit",
            format!("degree {d} exceeds the cap {cap}; raise {MAX_DEGREE_ENV} to allow it"),
        ));
    }
    Ok(())
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::input("IoError", format!("{}: {e}", path.display())))
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> std::result::Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, format!("{text}\n"))
            .map_err(|e| Failure::input("IoError", format!("{}: {e}", p.display()))),
        None => writeln!(out, "{text}").map_err(|e| Failure::input("IoError", e.to_string())),
    }
}

fn space(m: usize, n: usize) -> std::result::Result<VarSpace, Failure> {
    Ok(VarSpace::new(m, n)?)
}

fn pair(v: &[u32]) -> (u32, u32) {
    (v[0], v[1])
}

fn decompose(
    out: &mut dyn Write,
    m: usize,
    n: usize,
    bidegree: (u32, u32),
    variant: &str,
    poly: &Path,
    target: Option<&Path>,
) -> Outcome {
    let sp = space(m, n)?;
    let variant = parse_variant(variant)?;
    let p = polynomial_from_str(&read(poly)?)?;
    if !p.space().same_shape(&sp) {
        return Err(Error::Shape(format!(
            "polynomial is over m={}, N={} but --m {m} --N {n} was given",
            p.space().m,
            p.space().n
        ))
        .into());
    }
    let d = decompose_variant(&p, bidegree, variant)?;
    let doc = DecompositionJson::from_decomposition(&d)?;
    let text = serde_json::to_string_pretty(&doc).expect("serializable");
    emit(out, target, &text)?;
    if let Some(path) = target {
        let _ = writeln!(
            out,
            "wrote {} ({} quotients); kernel membership {}",
            path.display(),
            doc.quotients.len(),
            if doc.kernel_membership { "verified" } else { "FAILED" }
        );
    }
    Ok(if doc.kernel_membership { EXIT_OK } else { EXIT_NEGATIVE })
}

fn residual_cmd(out: &mut dyn Write, map: &Path, source: Option<&Path>, target: &str, bidegree: (u32, u32)) -> Outcome {
    let h = FormalMap::from_json_str(&read(map)?)?;
    check_degree(bidegree.0 + bidegree.1)?;
    let src = match source {
        Some(p) => Submanifold::from_json_str(&read(p)?)?,
        None => Submanifold::flat(BsdModel::new(h.src()), h.truncation()),
    };
    let tgt = if target == "model" {
        Target::Model(BsdModel::new(h.dst()))
    } else {
        Target::Submanifold(Submanifold::from_json_str(&read(Path::new(target))?)?)
    };
    let r = residual(&h, &src, &tgt, bidegree)?;
    let doc = ResidualJson {
        bidegree: [bidegree.0, bidegree.1],
        zero: r.is_zero(),
        entries: r.to_rows().iter().map(|row| row.iter().map(polynomial_to_json).collect()).collect(),
    };
    emit(out, None, &serde_json::to_string_pretty(&doc).expect("serializable"))?;
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
fn rigidity(
    out: &mut dyn Write,
    m: usize,
    n: usize,
    mp: usize,
    np: usize,
    degree: u32,
    exploratory: bool,
    target: Option<&Path>,
) -> Outcome {
    check_degree(degree)?;
    let cert = rigidity_check(space(m, n)?, space(mp, np)?, degree, exploratory)?;
    emit(out, target, &cert.to_json_string())?;
    Ok(if cert.verdict.is_positive() { EXIT_OK } else { EXIT_NEGATIVE })
}

fn compare(out: &mut dyn Write, map1: &Path, map2: &Path, degree: u32, target: Option<&Path>) -> Outcome {
    check_degree(degree)?;
    let h1 = FormalMap::from_json_str(&read(map1)?)?;
    let h2 = FormalMap::from_json_str(&read(map2)?)?;
    match compare_embeddings(&h1, &h2, degree) {
        Ok(cert) => {
            emit(out, target, &cert.to_json_string())?;
            Ok(if cert.verdict.is_positive() { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Err(e @ Error::Residual(_)) => Err(Failure { code: EXIT_NEGATIVE, kind: e.kind().into(), message: e.to_string() }),
        Err(e) => Err(e.into()),
    }
}

fn dims(out: &mut dyn Write, m: usize, n: usize, b: u32, json: bool) -> Outcome {
    check_degree(b)?;
    let sp = space(m, n)?;
    let rows: Vec<DimsRow> = kernel_dimension_table(sp, b)?
        .into_iter()
        .map(|((p, q), dim, total)| DimsRow { p, n: q, variant: variant_name(default_variant((p, q))), dim, total })
        .collect();
    let text = if json {
        serde_json::to_string_pretty(&rows).expect("serializable")
    } else {
        let mut t = format!("kernel dimensions for m={m}, N={n}\n{:>3} {:>3} {:>8} {:>8} {:>8}", "p", "n", "variant", "dim", "total");
        for r in &rows {
            t.push_str(&format!("\n{:>3} {:>3} {:>8} {:>8} {:>8}", r.p, r.n, r.variant, r.dim, r.total));
        }
        t
    };
    emit(out, None, &text)?;
    Ok(EXIT_OK)
}

fn run_selftest(out: &mut dyn Write, json: bool) -> Outcome {
    let results = selftest::run_all();
    let failed = results.iter().filter(|r| !r.passed).count();
    let text = if json {
        let docs: Vec<serde_json::Value> = results
            .iter()
            .map(|r| {
                serde_json::json!({
                    "criterion": r.id,
                    "name": r.name,
                    "passed": r.passed,
                    "seconds": r.elapsed.as_secs_f64(),
                    "detail": r.detail,
                })
            })
            .collect();
        serde_json::to_string_pretty(&docs).expect("serializable")
    } else {
        let mut lines: Vec<String> = results.iter().map(|r| r.to_string()).collect();
        lines.push(format!("selftest: {} passed, {} failed", results.len() - failed, failed));
        lines.join("\n")
    };
    emit(out, None, &text)?;
    Ok(if failed == 0 { EXIT_OK } else { EXIT_NEGATIVE })
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Outcome {
    match cli.command {
        Command::Decompose { m, n, bidegree, variant, poly, out: target } => {
            decompose(out, m, n, pair(&bidegree), &variant, &poly, target.as_deref())
        }
        Command::Residual { map, source, target, bidegree } => {
            residual_cmd(out, &map, source.as_deref(), &target, pair(&bidegree))
        }
        Command::Rigidity { m, n, mp, np, degree, exploratory, out: target } => {
            rigidity(out, m, n, mp, np, degree, exploratory, target.as_deref())
        }
        Command::Compare { map1, map2, degree, out: target } => compare(out, &map1, &map2, degree, target.as_deref()),
        Command::Dims { m, n, max_bidegree, json } => dims(out, m, n, max_bidegree, json),
        Command::Selftest { json } => run_selftest(out, json),
    }
}

/// Runs one command line, writing results to `out` and error documents to
/// `err`. Returns the process exit code.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return EXIT_OK;
            }
            let doc = ErrorJson { error: "ParseError".into(), message: e.to_string().trim().to_string() };
            let _ = writeln!(err, "{}", serde_json::to_string(&doc).expect("serializable"));
            return EXIT_INPUT;
        }
    };
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(f) => {
            let doc = ErrorJson { error: f.kind, message: f.message };
            let _ = writeln!(err, "{}", serde_json::to_string(&doc).expect("serializable"));
            f.code
        }
    }
}

/// Entry point used by the `bsdnf` binary.
pub fn run() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests;
