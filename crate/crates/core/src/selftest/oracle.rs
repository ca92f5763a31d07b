//! Independent reference for the high Fischer remainder: the orthogonal
//! projection, in the Fischer product, of `P` onto the complement of
//! `span{q_J · z^A : |J| = n, |A| = p − n}`, computed from a dense Gram
//! matrix over a monomial basis that this module enumerates itself.

use std::collections::BTreeMap;

use crate::exactalg::{Field, GaussianRational};
use crate::polyring::{Monomial, Polynomial, VarSpace};

type Exps = Vec<u32>;
type Dense = BTreeMap<Exps, GaussianRational>;

fn zero() -> GaussianRational {
    GaussianRational::default()
}

fn mul(a: &Dense, b: &Dense) -> Dense {
    let mut out = Dense::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Exps = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            let slot = out.entry(e).or_insert_with(zero);
            *slot += &(ca * cb);
        }
    }
    out.retain(|_, c| !Field::is_zero(c));
    out
}

fn fact(e: u32) -> GaussianRational {
    GaussianRational::from_int((1..=e as i64).product::<i64>().max(1))
}

fn weight(e: &Exps) -> GaussianRational {
    e.iter().fold(GaussianRational::from_int(1), |acc, &x| &acc * &fact(x))
}

fn inner(a: &Dense, b: &Dense) -> GaussianRational {
    let mut acc = zero();
    for (e, ca) in a {
        if let Some(cb) = b.get(e) {
            acc += &(&(ca * &cb.conj()) * &weight(e));
        }
    }
    acc
}

/// All exponent vectors of length `len` summing to `total`.
fn compositions(len: usize, total: u32) -> Vec<Exps> {
    if len == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=total).rev() {
        for mut rest in compositions(len - 1, total - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

struct Vars {
    m: usize,
    n: usize,
}

impl Vars {
    fn nz(&self) -> usize {
        self.m * self.n
    }
    fn len(&self) -> usize {
        2 * self.nz() + self.m * self.m
    }
    fn z(&self, a: usize, c: usize) -> usize {
        a * self.n + c
    }
    fn zbar(&self, a: usize, c: usize) -> usize {
        self.nz() + a * self.n + c
    }
    fn unit(&self, v: usize) -> Exps {
        let mut e = vec![0; self.len()];
        e[v] = 1;
        e
    }
}

fn to_dense(p: &Polynomial) -> Dense {
    p.terms().iter().map(|(m, c)| (m.exps().to_vec(), c.clone())).collect()
}

fn from_dense(space: VarSpace, d: &Dense) -> Polynomial {
    let mut out = Polynomial::zero(space);
    for (e, c) in d {
        out.add_term(Monomial::from_exps(e.clone()), c.clone());
    }
    out
}

/// `Σ_c z_{ac} z̄_{bc}`.
fn form(v: &Vars, a: usize, b: usize) -> Dense {
    (0..v.n)
        .map(|c| {
            let mut e = v.unit(v.z(a, c));
            e[v.zbar(b, c)] += 1;
            (e, GaussianRational::from_int(1))
        })
        .collect()
}

/// Dense Gauss-Jordan solve of a consistent, possibly singular, system.
fn solve_any(mut a: Vec<Vec<GaussianRational>>, mut b: Vec<GaussianRational>) -> Vec<GaussianRational> {
    let n = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(r) = (row..a.len()).find(|&r| !Field::is_zero(&a[r][col])) else { continue };
        a.swap(row, r);
        b.swap(row, r);
        let inv = GaussianRational::from_int(1).checked_div(&a[row][col]).expect("nonzero pivot");
        for x in a[row].iter_mut() {
            *x = &*x * &inv;
        }
        b[row] = &b[row] * &inv;
        for r in 0..a.len() {
            if r != row && !Field::is_zero(&a[r][col]) {
                let f = a[r][col].clone();
                for k in 0..n {
                    let d = &f * &a[row][k];
                    a[r][k] -= &d;
                }
                let d = &f * &b[row];
                b[r] -= &d;
            }
        }
        pivots.push(col);
        row += 1;
    }
    let mut x = vec![zero(); n];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = b[r].clone();
    }
    x
}

/// Remainder of the high decomposition of `p` (bidegree `(deg_z, deg_zbar)`,
/// `deg_z ≥ deg_zbar`) by orthogonal projection.
pub fn oracle_high_remainder(p: &Polynomial, space: VarSpace, deg_z: u32, deg_zbar: u32) -> Polynomial {
    let v = Vars { m: space.m, n: space.n };
    let mut spanning: Vec<Dense> = Vec::new();
    for j in compositions(v.m * v.m, deg_zbar) {
        let mut q: Dense = [(vec![0; v.len()], GaussianRational::from_int(1))].into_iter().collect();
        for (idx, &e) in j.iter().enumerate() {
            for _ in 0..e {
                q = mul(&q, &form(&v, idx / v.m, idx % v.m));
            }
        }
        for a in compositions(v.nz(), deg_z - deg_zbar) {
            let mut e = vec![0; v.len()];
            e[..v.nz()].copy_from_slice(&a);
            let mono: Dense = [(e, GaussianRational::from_int(1))].into_iter().collect();
            spanning.push(mul(&q, &mono));
        }
    }
    let pd = to_dense(p);
    let k = spanning.len();
    let gram: Vec<Vec<GaussianRational>> =
        (0..k).map(|i| (0..k).map(|j| inner(&spanning[j], &spanning[i])).collect()).collect();
    let rhs: Vec<GaussianRational> = (0..k).map(|i| inner(&pd, &spanning[i])).collect();
    let c = solve_any(gram, rhs);
    let mut r = pd;
    for (ci, s) in c.iter().zip(&spanning) {
        for (e, x) in s {
            let slot = r.entry(e.clone()).or_insert_with(zero);
            *slot -= &(ci * x);
        }
    }
    r.retain(|_, c| !Field::is_zero(c));
    from_dense(space, &r)
}
