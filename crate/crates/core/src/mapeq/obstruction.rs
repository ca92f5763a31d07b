//! Second-order test for first-order deformations.
//!
//! A kernel direction `x` of step `d` that no automorphism produces may still
//! fail to extend: `H + x` picks up the quadratic constant `−F̂ₓ·F̂ₓ*` in
//! degree `2d`, which step `2d − 1` must absorb. On a complex slice every
//! cokernel functional of that step is a Hermitian form in `x`, so `x`
//! survives only if `x·x*` lies in the space of Hermitian matrices those
//! forms annihilate. A branch-and-prune search over supports decides when
//! that space holds no rank-one positive matrix.

use std::collections::{HashMap, HashSet};

use num_rational::BigRational;
use num_traits::Zero;

use super::gauge::flat_source;
use super::map::FormalMap;
use super::step::{linear_part, step_matrix, RowKey, StepLayout};
use crate::error::Result;
use crate::exactalg::{min_norm_point, Echelon, GaussianRational, SparseVec};
use crate::polyring::{DegreeBound, MatrixPolynomial, Polynomial};

fn null_space(rows: &[Vec<BigRational>], n: usize) -> Result<Vec<Vec<BigRational>>> {
    let mut ech = Echelon::new(n);
    for r in rows {
        let coeffs: SparseVec<BigRational> =
            r.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect();
        if !coeffs.is_empty() {
            ech.push(coeffs, BigRational::zero())?;
        }
    }
    Ok(ech.finish().kernel_basis.into_iter().map(|v| dense(&v, n)).collect())
}

fn dense(v: &SparseVec<BigRational>, n: usize) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); n];
    for (c, x) in v {
        out[*c] = x.clone();
    }
    out
}

/// Multiplication by `i` on layout coordinates (columns pair as Re, Im).
fn times_i(v: &SparseVec<BigRational>) -> SparseVec<BigRational> {
    let mut out: SparseVec<BigRational> =
        v.iter().map(|(c, x)| if c % 2 == 0 { (c + 1, x.clone()) } else { (c - 1, -x) }).collect();
    out.sort_by_key(|(c, _)| *c);
    out
}

/// A sparse complex basis (reduced echelon form over the Gaussian
/// rationals) of `slice` when it is closed under multiplication by `i`.
fn complex_basis(slice: &[SparseVec<BigRational>], ncols: usize) -> Result<Option<Vec<SparseVec<BigRational>>>> {
    let mut span = Echelon::new(ncols);
    for v in slice {
        span.push(v.iter().cloned(), BigRational::zero())?;
    }
    for v in slice {
        if span.push(times_i(v), BigRational::zero())? {
            return Ok(None);
        }
    }
    let mut cx: Echelon<GaussianRational> = Echelon::new(ncols / 2);
    for v in slice {
        let mut acc: HashMap<usize, GaussianRational> = HashMap::new();
        for (c, x) in v {
            let part = if c % 2 == 0 {
                GaussianRational::real(x.clone())
            } else {
                GaussianRational::new(BigRational::zero(), x.clone())
            };
            *acc.entry(c / 2).or_default() += &part;
        }
        cx.push(acc, GaussianRational::default())?;
    }
    Ok(Some(
        cx.reduced_rows()
            .into_iter()
            .map(|row| {
                let mut out = Vec::new();
                for (k, z) in row {
                    if !z.re.is_zero() {
                        out.push((2 * k, z.re.clone()));
                    }
                    if !z.im.is_zero() {
                        out.push((2 * k + 1, z.im.clone()));
                    }
                }
                out
            })
            .collect(),
    ))
}

/// Real-linear functionals on the step-`(2d−1)` constant that vanish on
/// everything the unknowns can produce, evaluated on a constant.
struct Cokernel {
    matrix: std::sync::Arc<super::step::StepMatrix>,
    by_row: HashMap<usize, Vec<(usize, BigRational)>>,
    count: usize,
    stray: HashMap<RowKey, usize>,
}

impl Cokernel {
    fn new(map: &FormalMap, step: u32) -> Result<Self> {
        let matrix = step_matrix(map.src(), map.dst(), step, &linear_part(map))?;
        let coker = matrix.cokernel()?;
        let mut by_row: HashMap<usize, Vec<(usize, BigRational)>> = HashMap::new();
        for (k, y) in coker.iter().enumerate() {
            for (r, v) in y {
                by_row.entry(*r).or_default().push((k, v.clone()));
            }
        }
        Ok(Cokernel { matrix, by_row, count: coker.len(), stray: HashMap::new() })
    }

    fn eval(&mut self, constant: &MatrixPolynomial) -> HashMap<usize, BigRational> {
        let (rows, stray) = self.matrix.coordinates(constant);
        let mut val: HashMap<usize, BigRational> = HashMap::new();
        for (r, x) in rows {
            for (k, y) in self.by_row.get(&r).into_iter().flatten() {
                *val.entry(*k).or_insert_with(BigRational::zero) += &x * y;
            }
        }
        for (key, x) in stray {
            let next = self.count + self.stray.len();
            let k = *self.stray.entry(key).or_insert(next);
            *val.entry(k).or_insert_with(BigRational::zero) += x;
        }
        val
    }
}

/// Hermitian matrices `Y` (real coordinates: diagonal, then Re/Im above it)
/// with `Re tr(B_k·Y) = 0` for the sesquilinear obstruction forms `B_k`.
/// `x` in the complex span of `basis` survives to second order exactly when
/// `x·x*` lies in this space.
fn admissible_gram_space(map: &FormalMap, d: u32, basis: &[SparseVec<BigRational>]) -> Result<Vec<Vec<BigRational>>> {
    let (src, dst) = (map.src(), map.dst());
    let layout = StepLayout::new(src, dst, d);
    let z_img: Vec<Polynomial> = (0..src.m).flat_map(|a| (0..src.n).map(move |c| Polynomial::z(src, a, c))).collect();
    let w_img: Vec<Polynomial> = flat_source(src, 2 * d).defining_rhs().entries().to_vec();
    let hats: Vec<MatrixPolynomial> = basis
        .iter()
        .map(|v| layout.delta(v).0.try_map(|p| p.substitute(src, &z_img, &[], &w_img, DegreeBound::None)))
        .collect::<Result<_>>()?;
    let bars: Vec<MatrixPolynomial> = hats.iter().map(|h| h.map(Polynomial::conjugate).transpose()).collect();
    let mut coker = Cokernel::new(map, 2 * d - 1)?;
    let n = basis.len();
    let minus_i = GaussianRational::new(BigRational::zero(), BigRational::from_integer((-1).into()));
    // b[(j, i)][k] = B_k[j][i] as (re, im)
    let mut entries: HashMap<(usize, usize), (HashMap<usize, BigRational>, HashMap<usize, BigRational>)> = HashMap::new();
    for i in 0..n {
        for j in 0..n {
            let p = hats[i].mul_bounded(&bars[j], DegreeBound::Total(2 * d))?;
            let re = coker.eval(&p);
            let im = coker.eval(&p.map(|x| x.scale(&minus_i)));
            entries.insert((j, i), (re, im));
        }
    }
    let nvars = n * n;
    let nfun = coker.count + coker.stray.len();
    let mut eqs: Vec<HashMap<usize, BigRational>> = vec![HashMap::new(); nfun];
    let zero = BigRational::zero();
    for ((j, i), (re, im)) in &entries {
        // Re tr(B Y) = Σ_{j,i} Re(B_ji Y_ij)
        for k in re.keys().chain(im.keys()) {
            let (br, bi) = (re.get(k).unwrap_or(&zero), im.get(k).unwrap_or(&zero));
            let e = &mut eqs[*k];
            if i == j {
                *e.entry(coord(n, *i, *i, 0)).or_insert_with(BigRational::zero) += br;
            } else {
                // Y_ij = yr + s·i·yi with s = +1 above the diagonal
                let s = if i < j { BigRational::from_integer(1.into()) } else { BigRational::from_integer((-1).into()) };
                *e.entry(coord(n, *i, *j, 0)).or_insert_with(BigRational::zero) += br;
                *e.entry(coord(n, *i, *j, 1)).or_insert_with(BigRational::zero) -= bi * &s;
            }
        }
    }
    let mut ech = Echelon::new(nvars);
    for e in eqs {
        let mut row: SparseVec<BigRational> = e.into_iter().filter(|(_, x)| !x.is_zero()).collect();
        row.sort_by_key(|(c, _)| *c);
        if !row.is_empty() {
            ech.push(row, BigRational::zero())?;
        }
    }
    Ok(ech
        .finish()
        .kernel_basis
        .into_iter()
        .map(|v| {
            let mut out = vec![BigRational::zero(); nvars];
            for (c, x) in v {
                out[c] = x;
            }
            out
        })
        .collect())
}

/// Real coordinate of a Hermitian `n×n` matrix: diagonal entries first,
/// then real and imaginary parts above the diagonal.
fn coord(n: usize, i: usize, j: usize, part: usize) -> usize {
    if i == j {
        return i;
    }
    let (a, b) = (i.min(j), i.max(j));
    n + 2 * (a * n - a * (a + 1) / 2 + (b - a - 1)) + part
}

struct RankOneSearch {
    n: usize,
    refuted: HashSet<Vec<bool>>,
}

impl RankOneSearch {
    /// Whether some `u ≠ 0` supported on `alive` has `u·u*` in `space`.
    /// `false` is a proof; `true` may be conservative.
    fn admits(&mut self, space: &[Vec<BigRational>], alive: Vec<bool>) -> Result<bool> {
        if self.refuted.contains(&alive) {
            return Ok(false);
        }
        let n = self.n;
        let dead_coords: Vec<usize> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| i <= j && (!alive[i] || !alive[j]))
            .flat_map(|(i, j)| if i == j { vec![coord(n, i, i, 0)] } else { vec![coord(n, i, j, 0), coord(n, i, j, 1)] })
            .collect();
        let rows: Vec<Vec<BigRational>> =
            dead_coords.iter().map(|&c| space.iter().map(|b| b[c].clone()).collect()).collect();
        let combos = null_space(&rows, space.len())?;
        let restricted: Vec<Vec<BigRational>> = combos
            .iter()
            .map(|t| {
                (0..n * n)
                    .map(|c| t.iter().zip(space).map(|(x, b)| x * &b[c]).sum())
                    .collect()
            })
            .filter(|b: &Vec<BigRational>| b.iter().any(|x| !x.is_zero()))
            .collect();
        let vanishes = |c: usize| restricted.iter().all(|b| b[c].is_zero());
        let found = if restricted.is_empty() {
            false
        } else if let Some(i) = (0..n).find(|&i| alive[i] && vanishes(coord(n, i, i, 0))) {
            let mut next = alive.clone();
            next[i] = false;
            self.admits(&restricted, next)?
        } else if alive.iter().filter(|&&a| a).count() == 1 {
            true
        } else if let Some((i, j)) = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .find(|&(i, j)| alive[i] && alive[j] && vanishes(coord(n, i, j, 0)) && vanishes(coord(n, i, j, 1)))
        {
            let mut drop_i = alive.clone();
            drop_i[i] = false;
            let mut drop_j = alive.clone();
            drop_j[j] = false;
            self.admits(&restricted, drop_i)? || self.admits(&restricted, drop_j)?
        } else {
            true
        };
        if !found {
            self.refuted.insert(alive);
        }
        Ok(found)
    }
}

/// Result of the second-order test at one degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecondOrder {
    /// Complex dimension of the normal-form slice, when it is complex.
    pub complex_dim: Option<usize>,
    /// Dimension of the admissible Gram space.
    pub gram_dim: Option<usize>,
    /// Slice directions not ruled out; empty when the test proves that no
    /// nonzero direction extends to degree `2d`.
    pub free: Vec<SparseVec<BigRational>>,
}

/// Applies the second-order test to `extra`, a complement of `gauge` in the
/// step-`d` kernel of the normalized standard embedding `map`. The test
/// assumes the lower-degree normal-form coefficients vanish.
pub fn second_order_test(
    map: &FormalMap,
    d: u32,
    gauge: &[SparseVec<BigRational>],
    extra: &[SparseVec<BigRational>],
) -> Result<SecondOrder> {
    if extra.is_empty() {
        return Ok(SecondOrder { complex_dim: Some(0), gram_dim: Some(0), free: Vec::new() });
    }
    let layout = StepLayout::new(map.src(), map.dst(), d);
    let slice: Vec<SparseVec<BigRational>> =
        extra.iter().map(|e| min_norm_point(e, gauge, |c| layout.weight(c)).0).collect();
    let Some(basis) = complex_basis(&slice, layout.ncols())? else {
        return Ok(SecondOrder { complex_dim: None, gram_dim: None, free: slice });
    };
    let space = admissible_gram_space(map, d, &basis)?;
    let n = basis.len();
    let mut search = RankOneSearch { n, refuted: HashSet::new() };
    let survives = search.admits(&space, vec![true; n])?;

    Ok(SecondOrder {
        complex_dim: Some(n),
        gram_dim: Some(space.len()),
        free: if survives { slice } else { Vec::new() },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(x: i64) -> BigRational {
        BigRational::from_integer(x.into())
    }

    /// Hermitian 2×2 matrix `[[a, b], [b, c]]` with real `b`.
    fn herm(a: i64, b: i64, c: i64) -> Vec<BigRational> {
        let mut v = vec![BigRational::zero(); 4];
        v[coord(2, 0, 0, 0)] = r(a);
        v[coord(2, 1, 1, 0)] = r(c);
        v[coord(2, 0, 1, 0)] = r(b);
        v
    }

    fn admits(space: Vec<Vec<BigRational>>) -> bool {
        RankOneSearch { n: 2, refuted: HashSet::new() }.admits(&space, vec![true; 2]).unwrap()
    }

    #[test]
    fn rank_one_search() {
        assert!(!admits(vec![herm(1, 0, 1)]));
        assert!(!admits(vec![herm(1, 0, 2), herm(0, 0, 0)]));
        assert!(admits(vec![herm(1, 0, 0)]));
        assert!(admits(vec![herm(1, 0, 1), herm(1, 0, 0)]));
        assert!(admits(vec![herm(1, 1, 1)]));
        assert!(!admits(vec![]));
    }

    #[test]
    fn coordinates_are_a_bijection() {
        let n = 4;
        let mut seen = HashSet::new();
        for i in 0..n {
            for j in i..n {
                for part in 0..if i == j { 1 } else { 2 } {
                    assert!(seen.insert(coord(n, i, j, part)));
                }
            }
        }
        assert_eq!(seen.len(), n * n);
        assert!(seen.iter().all(|&c| c < n * n));
    }
}
