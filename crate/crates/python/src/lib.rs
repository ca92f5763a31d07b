//! Python bindings. Scalars cross the boundary as exact rational strings
//! (`"3"`, `"-1/2"`); structured results as JSON text or small wrappers.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use bsdnf_core::bsd::check_embedding_condition;
use bsdnf_core::cli::{parse_variant, variant_name, DecompositionJson};
use bsdnf_core::exactalg::{parse_rational, GaussianRational};
use bsdnf_core::fischer::{self, default_variant, FischerDecomposition};
use bsdnf_core::mapeq::{self, Certificate as CoreCertificate, FormalMap as CoreMap};
use bsdnf_core::polyring::json::{polynomial_from_str, polynomial_to_string};
use bsdnf_core::polyring::{Polynomial as CorePoly, VarSpace};
use bsdnf_core::{bsd, selftest, Error};

create_exception!(bsdnf, BsdnfError, PyValueError, "Base class for library errors.");
create_exception!(bsdnf, ConditionError, BsdnfError, "The embedding condition is violated.");
create_exception!(bsdnf, ResidualError, BsdnfError, "An input map does not solve the mapping equation.");

fn err(e: Error) -> PyErr {
    let msg = format!("{}: {}", e.kind(), e);
    match e {
        Error::Condition(_) => ConditionError::new_err(msg),
        Error::Residual(_) => ResidualError::new_err(msg),
        _ => BsdnfError::new_err(msg),
    }
}

fn space(m: usize, n: usize) -> PyResult<VarSpace> {
    VarSpace::new(m, n).map_err(err)
}

fn scalar(re: &str, im: &str) -> PyResult<GaussianRational> {
    Ok(GaussianRational::new(parse_rational(re).map_err(err)?, parse_rational(im).map_err(err)?))
}

/// Bihomogeneous-capable polynomial in `Z`, `Z̄` and `W` with exact
/// Gaussian-rational coefficients.
#[pyclass(module = "bsdnf", name = "Polynomial", frozen, eq, skip_from_py_object)]
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    inner: CorePoly,
}

impl Polynomial {
    fn wrap(inner: CorePoly) -> Self {
        Polynomial { inner }
    }
}

#[pymethods]
impl Polynomial {
    #[staticmethod]
    fn zero(m: usize, n: usize) -> PyResult<Self> {
        Ok(Self::wrap(CorePoly::zero(space(m, n)?)))
    }

    #[staticmethod]
    #[pyo3(signature = (m, n, re, im = "0"))]
    fn constant(m: usize, n: usize, re: &str, im: &str) -> PyResult<Self> {
        Ok(Self::wrap(CorePoly::constant(space(m, n)?, scalar(re, im)?)))
    }

    /// `z_{a c}` with zero-based indices.
    #[staticmethod]
    fn z(m: usize, n: usize, a: usize, c: usize) -> PyResult<Self> {
        check_index(a < m && c < n)?;
        Ok(Self::wrap(CorePoly::z(space(m, n)?, a, c)))
    }

    #[staticmethod]
    fn zbar(m: usize, n: usize, a: usize, c: usize) -> PyResult<Self> {
        check_index(a < m && c < n)?;
        Ok(Self::wrap(CorePoly::zbar(space(m, n)?, a, c)))
    }

    #[staticmethod]
    fn w(m: usize, n: usize, a: usize, b: usize) -> PyResult<Self> {
        check_index(a < m && b < m)?;
        Ok(Self::wrap(CorePoly::w(space(m, n)?, a, b)))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        polynomial_from_str(text).map(Self::wrap).map_err(err)
    }

    fn to_json(&self) -> String {
        polynomial_to_string(&self.inner)
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.space().m
    }

    #[getter(N)]
    fn n(&self) -> usize {
        self.inner.space().n
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    fn conjugate(&self) -> Self {
        Self::wrap(self.inner.conjugate())
    }

    #[pyo3(signature = (re, im = "0"))]
    fn scale(&self, re: &str, im: &str) -> PyResult<Self> {
        Ok(Self::wrap(self.inner.scale(&scalar(re, im)?)))
    }

    fn __add__(&self, o: &Polynomial) -> PyResult<Self> {
        self.inner.try_add(&o.inner).map(Self::wrap).map_err(err)
    }

    fn __sub__(&self, o: &Polynomial) -> PyResult<Self> {
        self.inner.try_sub(&o.inner).map(Self::wrap).map_err(err)
    }

    fn __mul__(&self, o: &Polynomial) -> PyResult<Self> {
        self.inner.try_mul(&o.inner).map(Self::wrap).map_err(err)
    }

    fn __neg__(&self) -> Self {
        Self::wrap(-&self.inner)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Polynomial({})", self.inner)
    }
}

fn check_index(ok: bool) -> PyResult<()> {
    if ok {
        Ok(())
    } else {
        Err(err(Error::Index("variable index out of range".into())))
    }
}

/// Result of a generalized Fischer decomposition.
#[pyclass(module = "bsdnf", name = "Decomposition", frozen)]
pub struct Decomposition {
    inner: FischerDecomposition,
}

#[pymethods]
impl Decomposition {
    #[getter]
    fn variant(&self) -> String {
        variant_name(self.inner.variant)
    }

    #[getter]
    fn bidegree(&self) -> (u32, u32) {
        self.inner.bidegree
    }

    /// `(J, Q_J)` pairs with `J` as an `m × m` exponent matrix.
    #[getter]
    fn quotients(&self) -> Vec<(Vec<Vec<u32>>, Polynomial)> {
        self.inner.quotients.iter().map(|(j, q)| (j.to_matrix(), Polynomial::wrap(q.clone()))).collect()
    }

    #[getter]
    fn remainder(&self) -> Polynomial {
        Polynomial::wrap(self.inner.remainder.clone())
    }

    #[getter]
    fn dependency_dim(&self) -> usize {
        self.inner.dependency_dim
    }

    fn reconstruct(&self) -> PyResult<Polynomial> {
        self.inner.reconstruct().map(Polynomial::wrap).map_err(err)
    }

    fn remainder_in_kernel(&self) -> PyResult<bool> {
        self.inner.remainder_in_kernel().map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        let doc = DecompositionJson::from_decomposition(&self.inner).map_err(err)?;
        Ok(serde_json::to_string(&doc).expect("serializable"))
    }
}

/// Decomposes a bihomogeneous polynomial; `variant` is `"high"` or `"low:j"`.
#[pyfunction]
#[pyo3(signature = (p, bidegree, variant = None))]
fn decompose(p: &Polynomial, bidegree: (u32, u32), variant: Option<&str>) -> PyResult<Decomposition> {
    let v = match variant {
        Some(s) => parse_variant(s).map_err(err)?,
        None => default_variant(bidegree),
    };
    let inner = fischer::decompose_variant(&p.inner, bidegree, v).map_err(err)?;
    Ok(Decomposition { inner })
}

/// Basis of the remainder space for a bidegree.
#[pyfunction]
#[pyo3(signature = (m, n, bidegree, variant = None))]
fn kernel_basis(m: usize, n: usize, bidegree: (u32, u32), variant: Option<&str>) -> PyResult<Vec<Polynomial>> {
    let v = match variant {
        Some(s) => parse_variant(s).map_err(err)?,
        None => default_variant(bidegree),
    };
    let basis = fischer::kernel_basis(space(m, n)?, bidegree, v).map_err(err)?;
    Ok(basis.into_iter().map(Polynomial::wrap).collect())
}

/// Truncated formal map `(F, G)` between two models.
#[pyclass(module = "bsdnf", name = "FormalMap", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct FormalMap {
    inner: CoreMap,
}

#[pymethods]
impl FormalMap {
    /// Standard embedding `(z, w) ↦ ((z 0; 0 0), (w 0; 0 0))` truncated at weighted degree `d`.
    #[staticmethod]
    fn standard(src: (usize, usize), dst: (usize, usize), d: u32) -> PyResult<Self> {
        let inner = CoreMap::standard(space(src.0, src.1)?, space(dst.0, dst.1)?, d).map_err(err)?;
        Ok(FormalMap { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        CoreMap::from_json_str(text).map(|inner| FormalMap { inner }).map_err(err)
    }

    fn to_json(&self) -> String {
        self.inner.to_json_string()
    }

    #[getter]
    fn src(&self) -> (usize, usize) {
        (self.inner.src().m, self.inner.src().n)
    }

    #[getter]
    fn dst(&self) -> (usize, usize) {
        (self.inner.dst().m, self.inner.dst().n)
    }

    #[getter]
    fn truncation(&self) -> u32 {
        self.inner.truncation()
    }

    /// Bidegree-`(k, l)` block of the residual against the flat models.
    fn residual(&self, bidegree: (u32, u32)) -> PyResult<Vec<Vec<Polynomial>>> {
        let source = bsd::Submanifold::flat(bsd::BsdModel::new(self.inner.src()), self.inner.truncation());
        let target = mapeq::Target::Model(bsd::BsdModel::new(self.inner.dst()));
        let r = mapeq::residual(&self.inner, &source, &target, bidegree).map_err(err)?;
        Ok(r.to_rows().into_iter().map(|row| row.into_iter().map(Polynomial::wrap).collect()).collect())
    }

    fn compose(&self, inner: &FormalMap) -> PyResult<Self> {
        self.inner.compose(&inner.inner).map(|m| FormalMap { inner: m }).map_err(err)
    }
}

/// Rigidity or equivalence certificate.
#[pyclass(module = "bsdnf", name = "Certificate", frozen)]
pub struct Certificate {
    inner: CoreCertificate,
}

#[pymethods]
impl Certificate {
    #[getter]
    fn verdict(&self) -> &'static str {
        self.inner.verdict.as_str()
    }

    #[getter]
    fn is_positive(&self) -> bool {
        self.inner.verdict.is_positive()
    }

    /// `(d, kernel_dim, gauge_dim, nongauge_dim, gauge_fixed_nonzero_count)` per degree.
    #[getter]
    fn per_degree(&self) -> Vec<(u32, usize, usize, usize, usize)> {
        self.inner
            .per_degree
            .iter()
            .map(|r| (r.d, r.kernel_dim, r.gauge_dim, r.nongauge_dim, r.gauge_fixed_nonzero_count))
            .collect()
    }

    fn to_json(&self) -> String {
        self.inner.to_json_string()
    }

    fn __repr__(&self) -> String {
        format!("Certificate({})", self.inner.verdict.as_str())
    }
}

#[pyfunction]
#[pyo3(signature = (src, dst, degree, exploratory = false))]
fn rigidity_check(src: (usize, usize), dst: (usize, usize), degree: u32, exploratory: bool) -> PyResult<Certificate> {
    let inner = mapeq::rigidity_check(space(src.0, src.1)?, space(dst.0, dst.1)?, degree, exploratory).map_err(err)?;
    Ok(Certificate { inner })
}

#[pyfunction]
fn compare_embeddings(h1: &FormalMap, h2: &FormalMap, degree: u32) -> PyResult<Certificate> {
    let inner = mapeq::compare_embeddings(&h1.inner, &h2.inner, degree).map_err(err)?;
    Ok(Certificate { inner })
}

/// Returns `(holds, clauses)` for `src → dst`.
#[pyfunction]
fn embedding_condition(src: (usize, usize), dst: (usize, usize)) -> PyResult<(bool, Vec<String>)> {
    let r = check_embedding_condition(space(src.0, src.1)?, space(dst.0, dst.1)?);
    Ok((r.holds, r.clauses))
}

/// Runs the acceptance suite; returns `(id, name, passed, detail)` rows.
#[pyfunction]
fn run_selftest(py: Python<'_>) -> Vec<(u8, String, bool, String)> {
    py.detach(|| {
        selftest::run_all().into_iter().map(|r| (r.id, r.name.to_string(), r.passed, r.detail)).collect()
    })
}

#[pymodule]
fn bsdnf(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("BsdnfError", py.get_type::<BsdnfError>())?;
    m.add("ConditionError", py.get_type::<ConditionError>())?;
    m.add("ResidualError", py.get_type::<ResidualError>())?;
    m.add_class::<Polynomial>()?;
    m.add_class::<Decomposition>()?;
    m.add_class::<FormalMap>()?;
    m.add_class::<Certificate>()?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_basis, m)?)?;
    m.add_function(wrap_pyfunction!(rigidity_check, m)?)?;
    m.add_function(wrap_pyfunction!(compare_embeddings, m)?)?;
    m.add_function(wrap_pyfunction!(embedding_condition, m)?)?;
    m.add_function(wrap_pyfunction!(run_selftest, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decompose_closed_form() {
        let p = Polynomial::z(1, 2, 0, 0).unwrap().__mul__(&Polynomial::zbar(1, 2, 0, 0).unwrap()).unwrap();
        let d = decompose(&p, (1, 1), None).unwrap();
        assert_eq!(d.variant(), "high");
        assert!(d.remainder_in_kernel().unwrap());
        assert_eq!(d.reconstruct().unwrap(), p);
        let half = Polynomial::constant(1, 2, "1/2", "0").unwrap();
        assert_eq!(d.quotients()[0].1, half);
    }

    #[test]
    fn bad_scalars_and_indices_are_errors() {
        assert!(scalar("1/0", "0").is_err());
        assert!(Polynomial::z(1, 2, 1, 0).is_err());
    }

    #[test]
    fn map_round_trip() {
        let h = FormalMap::standard((1, 2), (2, 3), 3).unwrap();
        let again = FormalMap::from_json(&h.to_json()).unwrap();
        assert_eq!(again.to_json(), h.to_json());
        assert!(again.residual((1, 1)).unwrap().iter().flatten().all(|p| p.is_zero()));
    }
}
