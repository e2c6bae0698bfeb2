//! The `(d+1)×(d+1)` restriction matrices: idealized `H′_l`, true Gram
//! matrices `H″_l`, their average and the limit matrix `P_d`.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::CertParams;
use crate::algebra::PhaseContext;
use crate::cyclotomic::Cyclotomic;
use crate::error::{Error, Result};
use crate::lattice::{theta_j, Int, LatticeVector};
use crate::matrix::HermitianMatrix;
use crate::states::{gram, StateCandidate};

/// `d(dp² − 1)` must exceed this before a `d` is accepted.
pub const MIN_MARGIN: f64 = 2e-6;

fn check_l(d: u32, l: u32) -> Result<()> {
    if d < 2 || l < 1 || l > d {
        return Err(Error::InvalidParameter(format!("need 1 <= l <= d, d >= 2; got l={l}, d={d}")));
    }
    Ok(())
}

/// Smallest `d` with `dp² > 1` (by a margin that survives rounding) and
/// `ε = (dp² − 1)/(4d)`.
pub fn choose_parameters(p: f64) -> Result<(u32, f64)> {
    if p == 0.0 {
        return Err(Error::NothingToRefute);
    }
    if !p.is_finite() || p.abs() > 1.0 {
        return Err(Error::InvalidParameter(format!("need 0 < |p| <= 1, got {p}")));
    }
    let p2 = p * p;
    let mut d = (1.0 / p2).floor() as u32 + 1;
    while f64::from(d) * (f64::from(d) * p2 - 1.0) <= MIN_MARGIN {
        d += 1;
    }
    let d = d.max(2);
    let eps = (f64::from(d) * p2 - 1.0) / (4.0 * f64::from(d));
    Ok((d, eps))
}

pub fn det_p(p: f64, d: u32) -> f64 {
    1.0 - f64::from(d) * p * p
}

/// `P_d`: unit diagonal, `p` along the first row and column, zero elsewhere.
pub fn build_p(p: f64, d: u32) -> HermitianMatrix {
    HermitianMatrix::from_fn(d as usize + 1, |i, j| match (i, j) {
        _ if i == j => Complex64::one(),
        (0, _) | (_, 0) => Complex64::new(p, 0.0),
        _ => Complex64::zero(),
    })
}

pub fn build_p_exact(p: &BigRational, d: u32) -> HermitianMatrix<BigRational> {
    HermitianMatrix::from_fn(d as usize + 1, |i, j| match (i, j) {
        _ if i == j => BigRational::one(),
        (0, _) | (_, 0) => p.clone(),
        _ => BigRational::zero(),
    })
}

/// `v = (−pd, 1, …, 1)`, for which `v̄ᵀ P_d v = d(1 − dp²)`.
pub fn witness_vector(p: f64, d: u32) -> Result<Vec<Complex64>> {
    if f64::from(d) * p * p <= 1.0 {
        return Err(Error::InvalidParameter(format!("dp² <= 1 for p={p}, d={d}")));
    }
    let mut v = vec![Complex64::one(); d as usize + 1];
    v[0] = Complex64::new(-p * f64::from(d), 0.0);
    Ok(v)
}

/// Idealized matrix: `q[k−1]` is the state value on the orbit of `kN ξ₂`,
/// and entry `(i, j)` below the diagonal of the lower block carries
/// `q_{(i−j)N} e^{−2πi(i−j)l/d}`.
pub fn build_h_prime(p: f64, q: &[f64], d: u32, l: u32) -> Result<HermitianMatrix> {
    check_l(d, l)?;
    check_q(q.len(), d)?;
    let mut h = build_p(p, d);
    for i in 1..=d as usize {
        for j in 1..i {
            let k = i - j;
            let angle = -std::f64::consts::TAU * ((k as u64 * u64::from(l)) % u64::from(d)) as f64 / f64::from(d);
            let z = Complex64::from_polar(q[k - 1], angle);
            h.set(i, j, z);
            h.set(j, i, z.conj());
        }
    }
    Ok(h)
}

/// [`build_h_prime`] over `Q(ω_d)`, so averaging cancels exactly.
pub fn build_h_prime_exact(
    p: &BigRational,
    q: &[BigRational],
    d: u32,
    l: u32,
) -> Result<HermitianMatrix<Cyclotomic>> {
    check_l(d, l)?;
    check_q(q.len(), d)?;
    let mut rows = vec![vec![Cyclotomic::zero(); d as usize + 1]; d as usize + 1];
    for (i, row) in rows.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = match (i, j) {
                _ if i == j => Cyclotomic::one(),
                (0, _) | (_, 0) => Cyclotomic::rational(p.clone()),
                _ => {
                    let k = i.abs_diff(j);
                    let e = (j as i64 - i as i64) * i64::from(l);
                    Cyclotomic::root_of_unity(d, e) * Cyclotomic::rational(q[k - 1].clone())
                }
            };
        }
    }
    HermitianMatrix::from_rows(rows)
}

fn check_q(len: usize, d: u32) -> Result<()> {
    if len + 1 != d as usize {
        return Err(Error::DimensionMismatch {
            expected: d as usize - 1,
            found: len,
        });
    }
    Ok(())
}

/// `q_{kN} = ω(W_{(kNξ₂, 0)})` for `k = 1, …, d−1`.
pub fn q_values(state: &StateCandidate, params: &CertParams) -> Result<Vec<f64>> {
    (1..params.d)
        .map(|k| {
            let orbit = params
                .n
                .checked_mul(u128::from(k))
                .and_then(|x| x.checked_mul(params.xi2()))
                .ok_or(Error::Overflow)?;
            Ok(state.value(orbit))
        })
        .collect()
}

/// `{(0,0)} ∪ {Θ_k ξ}_{1≤k≤d}` with `Θ_k ∈ G_{N,l}`.
pub fn generators(params: &CertParams, l: u32) -> Result<Vec<LatticeVector>> {
    check_l(params.d, l)?;
    let n = Int::try_from(params.n).map_err(|_| Error::Overflow)?;
    let xi2 = Int::try_from(params.xi2()).map_err(|_| Error::Overflow)?;
    let xi = LatticeVector::pair(xi2, xi2);
    let mut gens = vec![LatticeVector::zero(2)];
    for k in 1..=params.d {
        gens.push(theta_j(n, Int::from(l), Int::from(k))?.apply(&xi)?);
    }
    Ok(gens)
}

/// The true Gram matrix of `state` on the family `l`.
pub fn build_h_second(
    state: &StateCandidate,
    params: &CertParams,
    l: u32,
    ctx: &PhaseContext,
) -> Result<HermitianMatrix> {
    gram(state, &generators(params, l)?, ctx)
}

pub fn average_r(matrices: &[HermitianMatrix]) -> Result<HermitianMatrix> {
    HermitianMatrix::average(matrices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::quadratic_form;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn parameter_choice() {
        assert_eq!(choose_parameters(1.0).unwrap().0, 2);
        assert_eq!(choose_parameters(-1.0).unwrap().0, 2);
        let (d, eps) = choose_parameters(0.5).unwrap();
        assert_eq!(d, 5);
        assert!((eps - 0.0125).abs() < 1e-15);
        assert_eq!(choose_parameters(0.2).unwrap().0, 26);
        let (d, eps) = choose_parameters(0.9).unwrap();
        assert_eq!(d, 2);
        assert!((eps - 0.0775).abs() < 1e-15);
        assert_eq!(choose_parameters(0.0), Err(Error::NothingToRefute));
        assert!(choose_parameters(1.5).is_err());
    }

    #[test]
    fn determinant_formula() {
        assert_eq!(det_p(0.0, 7), 1.0);
        assert_eq!(det_p(0.5, 4), 0.0);
        assert_eq!(det_p(1.0, 2), -1.0);
        assert_eq!(build_p_exact(&rat(1, 2), 4).det_exact(), BigRational::zero());
        assert_eq!(build_p_exact(&rat(1, 1), 2).det_exact(), rat(-1, 1));
    }

    #[test]
    fn witness_values() {
        let v = witness_vector(0.5, 5).unwrap();
        assert_eq!(v.len(), 6);
        assert_eq!(v[0], Complex64::new(-2.5, 0.0));
        assert!((quadratic_form(&build_p(0.5, 5), &v).unwrap() + 1.25).abs() < 1e-12);
        let v = witness_vector(1.0, 2).unwrap();
        assert!((quadratic_form(&build_p(1.0, 2), &v).unwrap() + 2.0).abs() < 1e-12);
        let rot: Vec<_> = v.iter().map(|z| z * Complex64::from_polar(1.0, 0.7)).collect();
        assert!((quadratic_form(&build_p(1.0, 2), &rot).unwrap() + 2.0).abs() < 1e-12);
        assert!(witness_vector(0.5, 4).is_err());
    }

    #[test]
    fn h_prime_shapes() {
        let h = build_h_prime(0.3, &[0.0, 0.0], 3, 2).unwrap();
        assert_eq!(h, build_p(0.3, 3));
        let h = build_h_prime(0.3, &[0.4], 2, 1).unwrap();
        assert!((h.get(1, 2) - Complex64::new(-0.4, 0.0)).norm() < 1e-15);
        let h = build_h_prime(0.3, &[0.4, 0.1], 3, 1).unwrap();
        let w = Complex64::from_polar(1.0, std::f64::consts::TAU / 3.0);
        assert!((h.get(1, 2) - w * 0.4).norm() < 1e-15);
        assert!(build_h_prime(0.3, &[0.4], 2, 3).is_err());
        assert!(build_h_prime(0.3, &[0.4, 0.1], 2, 1).is_err());
    }

    #[test]
    fn exact_average_is_p_d() {
        let p = rat(1, 3);
        let q = vec![rat(1, 2), rat(-2, 7), rat(5, 11)];
        let hs: Vec<_> = (1..=4).map(|l| build_h_prime_exact(&p, &q, 4, l).unwrap()).collect();
        let avg = HermitianMatrix::average(&hs).unwrap();
        assert_eq!(avg, build_p_exact(&p, 4).map(|x| Cyclotomic::rational(x.clone())));
        assert!(hs.iter().all(HermitianMatrix::is_hermitian));
    }

    #[test]
    fn exact_and_numeric_agree() {
        let q = [0.5, -0.25, 0.125];
        let qe: Vec<_> = q.iter().map(|&x| crate::scalar::rational_from_f64(x).unwrap()).collect();
        for l in 1..=4 {
            let a = build_h_prime(0.75, &q, 4, l).unwrap();
            let b = build_h_prime_exact(&rat(3, 4), &qe, 4, l).unwrap().map(Cyclotomic::to_complex);
            assert!(a.max_distance(&b).unwrap() < 1e-14);
        }
    }
}
