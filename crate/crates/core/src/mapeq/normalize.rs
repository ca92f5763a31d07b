use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::map::{Component, FormalMap};
use crate::bsd::LinearAuto;
use crate::error::{Error, Result};
use crate::exactalg::{
    mat_conj_transpose, mat_identity, mat_inverse, mat_mul, mat_rank, CMatrix, Field, GaussianRational,
};
use crate::polyring::Monomial;

fn gz() -> GaussianRational {
    GaussianRational::default()
}

/// Factors the linear part as `F₁ = P·Z·Q` (`P` is `m′×m`, `Q` is `N×N′`).
pub fn factor_linear_part(map: &FormalMap) -> Result<(CMatrix, CMatrix)> {
    let (s, t) = (map.src(), map.dst());
    let f1 = map.weighted_part(Component::F, 1);
    // tensor[(r, a)][(c, e)] = coefficient of z_{a c} in F₁[r][e]
    let mut tensor = vec![vec![gz(); s.n * t.n]; t.m * s.m];
    for r in 0..t.m {
        for e in 0..t.n {
            for a in 0..s.m {
                for c in 0..s.n {
                    let mut exps = vec![0u32; s.nvars()];
                    exps[s.z_var(a, c)] = 1;
                    tensor[r * s.m + a][c * t.n + e] = f1.get(r, e).coeff(&Monomial::from_exps(exps));
                }
            }
        }
    }
    let pivot = tensor
        .iter()
        .enumerate()
        .find_map(|(i, row)| row.iter().position(|x| !Field::is_zero(x)).map(|j| (i, j)));
    let Some((i0, j0)) = pivot else {
        return Err(Error::Rank("linear part vanishes".into()));
    };
    let inv = GaussianRational::from_int(1).checked_div(&tensor[i0][j0])?;
    let p_vec: Vec<GaussianRational> = tensor.iter().map(|row| row[j0].clone()).collect();
    let q_vec: Vec<GaussianRational> = tensor[i0].iter().map(|x| x * &inv).collect();
    for (i, row) in tensor.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            if *x != &p_vec[i] * &q_vec[j] {
                return Err(Error::Rank("linear part is not of the form P·Z·Q".into()));
            }
        }
    }
    let p: CMatrix = (0..t.m).map(|r| (0..s.m).map(|a| p_vec[r * s.m + a].clone()).collect()).collect();
    let q: CMatrix = (0..s.n).map(|c| (0..t.n).map(|e| q_vec[c * t.n + e].clone()).collect()).collect();
    Ok((p, q))
}

fn is_square(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// A Gaussian rational `κ` with `|κ|² = λ`, when one exists. Prefers real `κ`.
pub fn norm_root(lambda: &BigRational) -> Option<GaussianRational> {
    if !lambda.is_positive() {
        return None;
    }
    let (n, d) = (lambda.numer().clone(), lambda.denom().clone());
    let nd = &n * &d;
    let den = BigRational::from_integer(d);
    let mut a = nd.sqrt();
    loop {
        if let Some(b) = is_square(&(&nd - &a * &a)) {
            return Some(GaussianRational::new(BigRational::from_integer(a) / &den, BigRational::from_integer(b) / &den));
        }
        if a.is_zero() {
            return None;
        }
        a -= 1;
    }
}

/// Unitary `U` with `U·x = y` for unit vectors `x`, `y`, built as a complex
/// reflection with rational entries.
fn reflection(x: &[GaussianRational], y: &[GaussianRational]) -> CMatrix {
    let n = x.len();
    let c: GaussianRational = y.iter().zip(x).map(|(yi, xi)| &yi.conj() * xi).fold(gz(), |acc, t| &acc + &t);
    let one = GaussianRational::from_int(1);
    if c == one {
        return mat_identity(n);
    }
    let sigma = -((&one - &c.conj()).checked_div(&(&one - &c)).expect("c ≠ 1"));
    let v: Vec<GaussianRational> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    let vv: GaussianRational = GaussianRational::real(v.iter().map(GaussianRational::norm_sqr).sum());
    let factor = (&one - &sigma).checked_div(&vv).expect("v ≠ 0");
    (0..n)
        .map(|i| (0..n).map(|j| &mat_identity(n)[i][j] - &(&factor * &(&v[i] * &v[j].conj()))).collect())
        .collect()
}

/// Brings `F₁ = P·Z·Q` to `[[Z, 0], [0, 0]]` with a target automorphism.
/// Returns the normalized map together with the source and target
/// automorphisms `Φ`, `Ψ` such that the result is `Ψ ∘ H ∘ Φ`.
pub fn normalize_initial(map: &FormalMap) -> Result<(FormalMap, LinearAuto, LinearAuto)> {
    let (s, t) = (map.src(), map.dst());
    let (p, q) = factor_linear_part(map)?;
    if mat_rank(&p) < s.m {
        return Err(Error::Rank(format!("linear part has row rank below m = {}", s.m)));
    }
    let qqh = mat_mul(&q, &mat_conj_transpose(&q))?;
    let lambda = qqh[0][0].clone();
    let scalar = (0..s.n).all(|i| (0..s.n).all(|j| qqh[i][j] == if i == j { lambda.clone() } else { gz() }));
    if !scalar || !lambda.is_real() {
        return Err(Error::Rank("linear part is not conformal (Q·Qᴴ is not a multiple of I)".into()));
    }
    let kappa = norm_root(&lambda.re).ok_or_else(|| {
        Error::Rank(format!("scale {} of the linear part is not a norm of a Gaussian rational", lambda.re))
    })?;
    let kinv = GaussianRational::from_int(1).checked_div(&kappa)?;
    let q_hat: CMatrix = q.iter().map(|r| r.iter().map(|x| x * &kinv).collect()).collect();

    // Vᴴ maps the columns of Q̂ᴴ to e_0..e_{N-1}
    let mut vh = mat_identity(t.n);
    let qh = mat_conj_transpose(&q_hat);
    for j in 0..s.n {
        let col: CMatrix = qh.iter().map(|r| vec![r[j].clone()]).collect();
        let x: Vec<GaussianRational> = mat_mul(&vh, &col)?.into_iter().map(|r| r[0].clone()).collect();
        let y: Vec<GaussianRational> = (0..t.n).map(|i| GaussianRational::from_int((i == j) as i64)).collect();
        vh = mat_mul(&reflection(&x, &y), &vh)?;
    }
    let u_prime = mat_conj_transpose(&vh);

    // A′·κP = [I; 0]
    let mut basis: CMatrix = p.iter().map(|r| r.iter().map(|x| x * &kappa).collect()).collect();
    for e in 0..t.m {
        if basis[0].len() == t.m {
            break;
        }
        let mut trial = basis.clone();
        for (i, row) in trial.iter_mut().enumerate() {
            row.push(GaussianRational::from_int((i == e) as i64));
        }
        if mat_rank(&trial) == trial[0].len() {
            basis = trial;
        }
    }
    let a_prime = mat_inverse(&basis)?;
    let target = LinearAuto::new(a_prime, u_prime)?;
    let source = LinearAuto::identity(s);
    let out = map.postcompose(&target)?;
    let std = FormalMap::standard(s, t, out.truncation())?;
    if out.weighted_part(Component::F, 1) != std.weighted_part(Component::F, 1) {
        return Err(Error::Rank("linear part could not be brought to standard form".into()));
    }
    Ok((out, source, target))
}
