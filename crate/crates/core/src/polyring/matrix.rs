use super::index::VarSpace;
use super::poly::{DegreeBound, Grading, Polynomial};
use crate::error::{Error, Result};
use crate::exactalg::GaussianRational;

/// Dense grid of polynomials over one variable space.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MatrixPolynomial {
    rows: usize,
    cols: usize,
    space: VarSpace,
    entries: Vec<Polynomial>,
}

impl MatrixPolynomial {
    pub fn zero(space: VarSpace, rows: usize, cols: usize) -> Self {
        MatrixPolynomial { rows, cols, space, entries: vec![Polynomial::zero(space); rows * cols] }
    }

    pub fn from_rows(space: VarSpace, rows: Vec<Vec<Polynomial>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if r == 0 || c == 0 || rows.iter().any(|x| x.len() != c) {
            return Err(Error::Shape("matrix rows must be non-empty and equal length".into()));
        }
        let entries: Vec<Polynomial> = rows.into_iter().flatten().collect();
        if entries.iter().any(|p| !p.space().same_shape(&space)) {
            return Err(Error::Shape("matrix entries over different spaces".into()));
        }
        Ok(MatrixPolynomial { rows: r, cols: c, space, entries })
    }

    /// Constant matrix.
    pub fn constant(space: VarSpace, values: &[Vec<GaussianRational>]) -> Result<Self> {
        Self::from_rows(
            space,
            values
                .iter()
                .map(|r| r.iter().map(|v| Polynomial::constant(space, v.clone())).collect())
                .collect(),
        )
    }

    /// The `m×N` matrix of variables `Z`.
    pub fn z_matrix(space: VarSpace) -> Self {
        let mut out = Self::zero(space, space.m, space.n);
        for a in 0..space.m {
            for c in 0..space.n {
                out.set(a, c, Polynomial::z(space, a, c));
            }
        }
        out
    }

    pub fn zbar_matrix(space: VarSpace) -> Self {
        let mut out = Self::zero(space, space.m, space.n);
        for a in 0..space.m {
            for c in 0..space.n {
                out.set(a, c, Polynomial::zbar(space, a, c));
            }
        }
        out
    }

    pub fn w_matrix(space: VarSpace) -> Self {
        let mut out = Self::zero(space, space.m, space.m);
        for a in 0..space.m {
            for b in 0..space.m {
                out.set(a, b, Polynomial::w(space, a, b));
            }
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn space(&self) -> &VarSpace {
        &self.space
    }

    pub fn get(&self, r: usize, c: usize) -> &Polynomial {
        &self.entries[r * self.cols + c]
    }

    pub fn get_mut(&mut self, r: usize, c: usize) -> &mut Polynomial {
        &mut self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, p: Polynomial) {
        self.entries[r * self.cols + c] = p;
    }

    pub fn entries(&self) -> &[Polynomial] {
        &self.entries
    }

    pub fn to_rows(&self) -> Vec<Vec<Polynomial>> {
        self.entries.chunks(self.cols).map(|r| r.to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Polynomial::is_zero)
    }

    /// Entrywise image; the result lives over the space of the images.
    pub fn map(&self, f: impl Fn(&Polynomial) -> Polynomial) -> Self {
        let entries: Vec<Polynomial> = self.entries.iter().map(f).collect();
        let space = entries.first().map_or(self.space, |p| *p.space());
        MatrixPolynomial { rows: self.rows, cols: self.cols, space, entries }
    }

    pub fn try_map(&self, f: impl Fn(&Polynomial) -> Result<Polynomial>) -> Result<Self> {
        let entries: Vec<Polynomial> = self.entries.iter().map(f).collect::<Result<_>>()?;
        let space = entries.first().map_or(self.space, |p| *p.space());
        Ok(MatrixPolynomial { rows: self.rows, cols: self.cols, space, entries })
    }

    fn check_same(&self, o: &Self) -> Result<()> {
        if self.rows != o.rows || self.cols != o.cols || !self.space.same_shape(&o.space) {
            return Err(Error::Shape(format!(
                "matrix shapes {}x{} and {}x{} differ",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check_same(o)?;
        let mut out = self.clone();
        for (e, x) in out.entries.iter_mut().zip(&o.entries) {
            *e = e.try_add(x)?;
        }
        Ok(out)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.check_same(o)?;
        let mut out = self.clone();
        for (e, x) in out.entries.iter_mut().zip(&o.entries) {
            *e = e.try_sub(x)?;
        }
        Ok(out)
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.mul_bounded(o, DegreeBound::None)
    }

    pub fn mul_bounded(&self, o: &Self, bound: DegreeBound) -> Result<Self> {
        if self.cols != o.rows || !self.space.same_shape(&o.space) {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        let mut out = Self::zero(self.space, self.rows, o.cols);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut acc = Polynomial::zero(self.space);
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    let b = o.get(k, j);
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    acc = acc.try_add(&a.mul_bounded(b, bound)?)?;
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zero(self.space, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    /// Entrywise formal conjugate followed by transpose.
    pub fn conj_transpose(&self) -> Self {
        self.transpose().map(Polynomial::conjugate)
    }

    /// Entry `(a,b)` equals the conjugate of entry `(b,a)`.
    pub fn is_conj_transpose_symmetric(&self) -> bool {
        self.rows == self.cols && *self == self.conj_transpose()
    }

    pub fn bidegree_component(&self, k: u32, l: u32, grading: Grading) -> Self {
        self.map(|p| p.bidegree_component(k, l, grading))
    }

    pub fn homogeneous_part(&self, d: u32) -> Self {
        self.map(|p| p.homogeneous_part(d))
    }

    pub fn truncate_total(&self, d: u32) -> Self {
        self.map(|p| p.truncate_total(d))
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        self.map(|p| p.scale(c))
    }
}
