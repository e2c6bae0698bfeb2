//! Orbit-parameterized state candidates on the genus-one algebra, their
//! evaluation, and Gram matrices `H_ij = ω(W_{m_i}^* W_{m_j})`.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, PhaseContext};
use crate::error::{Error, Result};
use crate::lattice::{gcd, pairing, Int, LatticeVector};
use crate::matrix::HermitianMatrix;
use crate::phase;
use crate::scalar::{rational_from_f64, GaussianRational, PhaseScalar};

/// Orbit index: `j` labels the orbit of `(0, j)`.
pub type Orbit = u128;

/// A candidate invariant state, given by its real values `p_j` on the orbit
/// representatives `(0, j)`, `j ≥ 1`. The identity orbit is pinned to 1 and
/// unlisted orbits read as 0.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct StateCandidate {
    orbit_values: BTreeMap<Orbit, f64>,
}

impl StateCandidate {
    pub fn new(orbit_values: BTreeMap<Orbit, f64>) -> Result<Self> {
        if orbit_values.contains_key(&0) {
            return Err(Error::InvalidParameter(
                "orbit 0 is the identity and is fixed to 1".into(),
            ));
        }
        if let Some((j, v)) = orbit_values.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "orbit {j} has non-finite value {v}"
            )));
        }
        Ok(Self { orbit_values })
    }

    pub fn from_pairs(pairs: &[(Orbit, f64)]) -> Result<Self> {
        Self::new(pairs.iter().copied().collect())
    }

    pub fn orbit_values(&self) -> &BTreeMap<Orbit, f64> {
        &self.orbit_values
    }

    /// `p_j`, with `p_0 = 1`.
    pub fn value(&self, orbit: Orbit) -> f64 {
        if orbit == 0 {
            1.0
        } else {
            self.orbit_values.get(&orbit).copied().unwrap_or(0.0)
        }
    }

    /// `p_j` as an exact rational (binary64 values convert exactly).
    pub fn exact_value(&self, orbit: Orbit) -> BigRational {
        rational_from_f64(self.value(orbit)).expect("values are finite by construction")
    }

    /// True when every listed value is zero.
    pub fn is_trace(&self) -> bool {
        self.orbit_values.values().all(|&v| v == 0.0)
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, String> {
        let file: StateFile = serde_json::from_str(text).map_err(|e| e.to_string())?;
        let mut values = BTreeMap::new();
        for (k, v) in file.orbit_values {
            let j: Orbit = k
                .trim()
                .parse()
                .map_err(|_| format!("orbit key {k:?} is not a non-negative integer"))?;
            values.insert(j, v);
        }
        Self::new(values).map_err(|e| e.to_string())
    }

    pub fn to_json(&self) -> String {
        let file = StateFile {
            orbit_values: self
                .orbit_values
                .iter()
                .map(|(k, v)| (k.to_string(), *v))
                .collect(),
        };
        serde_json::to_string(&file).expect("state serialization")
    }
}

#[derive(Serialize, Deserialize)]
struct StateFile {
    orbit_values: BTreeMap<String, f64>,
}

/// The trace: every non-identity generator evaluates to 0.
pub fn trace_state() -> StateCandidate {
    StateCandidate::default()
}

fn orbit_of(m: &LatticeVector) -> Result<Orbit> {
    match m.coords() {
        [a, b] => Ok(gcd(*a, *b).unsigned_abs()),
        other => Err(Error::GenusNotOne(other.len())),
    }
}

/// `ω(W_m) = p_{gcd(m₁, m₂)}`.
pub fn eval_generator(state: &StateCandidate, m: &LatticeVector) -> Result<f64> {
    Ok(state.value(orbit_of(m)?))
}

/// `ω(a) = Σ_m α_m ω(W_m)` with coefficients evaluated numerically.
pub fn eval(state: &StateCandidate, a: &AlgebraElement, ctx: &PhaseContext) -> Result<Complex64> {
    let mut acc = Complex64::zero();
    for (m, c) in a.terms() {
        let p = eval_generator(state, m)?;
        if p != 0.0 {
            acc += c.numeric_eval(ctx.h()) * p;
        }
    }
    Ok(acc)
}

/// Exact counterpart of [`eval`]: the result stays a ζ-Laurent sum.
pub fn eval_exact(state: &StateCandidate, a: &AlgebraElement) -> Result<PhaseScalar> {
    let mut acc = PhaseScalar::zero();
    for (m, c) in a.terms() {
        let p = state.exact_value(orbit_of(m)?);
        if !p.is_zero() {
            acc += c.scale(&GaussianRational::real(p));
        }
    }
    Ok(acc)
}

fn check_gens(gens: &[LatticeVector], ctx: &PhaseContext) -> Result<()> {
    if ctx.dim() != 2 {
        return Err(Error::GenusNotOne(ctx.dim()));
    }
    let mut seen = BTreeSet::new();
    for m in gens {
        if m.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: m.dim(),
            });
        }
        if !seen.insert(m) {
            return Err(Error::DuplicateGenerator(m.coords().to_vec()));
        }
    }
    Ok(())
}

/// Exponent and orbit of `W_{m_i}^* W_{m_j} = ζ^{−σ(m_i, m_j)} W_{m_j − m_i}`.
fn gram_entry(m_i: &LatticeVector, m_j: &LatticeVector, ctx: &PhaseContext) -> Result<(Int, Orbit)> {
    let s = pairing(ctx.sigma(), m_i, m_j)?;
    let diff = m_j.checked_sub(m_i)?;
    Ok((-s, orbit_of(&diff)?))
}

/// Numeric Gram matrix of `ω` on `span{W_m : m ∈ gens}`.
pub fn gram(
    state: &StateCandidate,
    gens: &[LatticeVector],
    ctx: &PhaseContext,
) -> Result<HermitianMatrix> {
    check_gens(gens, ctx)?;
    let n = gens.len();
    let mut rows = vec![vec![Complex64::zero(); n]; n];
    for i in 0..n {
        rows[i][i] = Complex64::one();
        for j in i + 1..n {
            let (k, orbit) = gram_entry(&gens[i], &gens[j], ctx)?;
            let p = state.value(orbit);
            let z = if p == 0.0 {
                Complex64::zero()
            } else {
                phase::unit(ctx.h(), k) * p
            };
            rows[i][j] = z;
            rows[j][i] = z.conj();
        }
    }
    HermitianMatrix::from_rows(rows)
}

/// Exact Gram matrix with `ζ`-Laurent entries.
pub fn gram_exact(
    state: &StateCandidate,
    gens: &[LatticeVector],
    ctx: &PhaseContext,
) -> Result<HermitianMatrix<PhaseScalar>> {
    check_gens(gens, ctx)?;
    let n = gens.len();
    let mut rows = vec![vec![PhaseScalar::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let (k, orbit) = gram_entry(&gens[i], &gens[j], ctx)?;
            rows[i][j] = PhaseScalar::monomial(GaussianRational::real(state.exact_value(orbit)), k);
        }
    }
    HermitianMatrix::from_rows(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{adjoint, multiply, weyl};
    use crate::matrix::{is_psd, quadratic_form, PsdVerdict};

    fn v(a: i128, b: i128) -> LatticeVector {
        LatticeVector::pair(a, b)
    }

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn trace_examples() {
        let ctx = PhaseContext::default();
        let tau = trace_state();
        assert_eq!(eval_generator(&tau, &v(0, 0)).unwrap(), 1.0);
        assert_eq!(eval_generator(&tau, &v(7, -3)).unwrap(), 0.0);
        let x = weyl(&v(2, 5), &ctx).unwrap().add(&AlgebraElement::identity(2)).unwrap();
        let xx = multiply(&adjoint(&x), &x, &ctx).unwrap();
        assert!((eval(&tau, &xx, &ctx).unwrap() - c(2.0)).norm() < 1e-15);
    }

    #[test]
    fn eval_generator_examples() {
        let s1 = StateCandidate::from_pairs(&[(1, 0.5)]).unwrap();
        assert_eq!(eval_generator(&s1, &v(0, 0)).unwrap(), 1.0);
        assert_eq!(eval_generator(&s1, &v(6, 4)).unwrap(), 0.0);
        let s2 = StateCandidate::from_pairs(&[(2, 0.3)]).unwrap();
        assert_eq!(eval_generator(&s2, &v(6, 4)).unwrap(), 0.3);
        assert_eq!(eval_generator(&s2, &v(-2, 0)).unwrap(), 0.3);
        assert!(eval_generator(&s2, &LatticeVector::zero(4)).is_err());
    }

    #[test]
    fn eval_examples() {
        let ctx = PhaseContext::default();
        let mut a = AlgebraElement::term(v(1, 1), PhaseScalar::zeta(1));
        a.add_term(v(0, 0), PhaseScalar::from_integer(2));
        assert!((eval(&trace_state(), &a, &ctx).unwrap() - c(2.0)).norm() < 1e-15);
        let s = StateCandidate::from_pairs(&[(1, 0.37)]).unwrap();
        let w = weyl(&v(1, 1), &ctx).unwrap();
        assert!((eval(&s, &w, &ctx).unwrap() - c(0.37)).norm() < 1e-15);
    }

    #[test]
    fn gram_examples() {
        let ctx = PhaseContext::default();
        let g = gram(&trace_state(), &[v(0, 0), v(1, 1), v(2, 2)], &ctx).unwrap();
        assert_eq!(g, HermitianMatrix::identity(3));

        let s = StateCandidate::from_pairs(&[(1, 0.4)]).unwrap();
        let g = gram(&s, &[v(0, 0), v(1, 1)], &ctx).unwrap();
        assert_eq!(g.rows(), vec![vec![c(1.0), c(0.4)], vec![c(0.4), c(1.0)]]);

        assert!(matches!(
            gram(&s, &[v(1, 1), v(1, 1)], &ctx),
            Err(Error::DuplicateGenerator(_))
        ));
    }

    #[test]
    fn gram_matches_direct_evaluation() {
        let ctx = PhaseContext::default();
        let s = StateCandidate::from_pairs(&[(1, 0.3), (2, -0.2), (3, 0.15)]).unwrap();
        let gens = [v(0, 0), v(1, 2), v(3, -1), v(2, 2)];
        let coeffs = [c(1.0), Complex64::new(0.5, -1.0), c(-2.0), Complex64::new(0.0, 0.75)];
        let mut a = AlgebraElement::zero(2);
        for (m, z) in gens.iter().zip(&coeffs) {
            a.add_term(
                m.clone(),
                PhaseScalar::monomial(GaussianRational::from_complex(*z).unwrap(), 0),
            );
        }
        let direct = eval(&s, &multiply(&adjoint(&a), &a, &ctx).unwrap(), &ctx).unwrap();
        let h = gram(&s, &gens, &ctx).unwrap();
        let via_gram = quadratic_form(&h, &coeffs).unwrap();
        assert!((direct.re - via_gram).abs() < 1e-12);
        assert!(direct.im.abs() < 1e-12);

        let exact = gram_exact(&s, &gens, &ctx).unwrap();
        assert!(exact.is_hermitian());
    }

    #[test]
    fn two_by_two_minor() {
        let ctx = PhaseContext::default();
        for (p, psd) in [(0.5, true), (1.0, true), (-1.0, true), (1.01, false), (-1.5, false)] {
            let s = StateCandidate::from_pairs(&[(3, p)]).unwrap();
            let h = gram(&s, &[v(0, 0), v(3, 3)], &ctx).unwrap();
            assert_eq!(is_psd(&h, 1e-9).unwrap().is_psd(), psd, "p = {p}");
        }
        let s = StateCandidate::from_pairs(&[(1, 1.5)]).unwrap();
        let h = gram(&s, &[v(0, 0), v(1, 1)], &ctx).unwrap();
        assert!(matches!(is_psd(&h, 1e-9).unwrap(), PsdVerdict::Witness { value, .. } if (value + 0.5).abs() < 1e-12));
    }

    #[test]
    fn json_round_trip() {
        let s = StateCandidate::from_json(r#"{"orbit_values": {"1": 0.5, "2": 0.0}}"#).unwrap();
        assert_eq!(s.value(1), 0.5);
        assert_eq!(s.value(2), 0.0);
        assert_eq!(s.value(9), 0.0);
        assert_eq!(StateCandidate::from_json(&s.to_json()).unwrap(), s);
        assert!(StateCandidate::from_json(r#"{"orbit_values": {"x": 0.5}}"#).is_err());
        assert!(StateCandidate::from_json(r#"{"orbit_values": {"0": 0.5}}"#).is_err());
        assert!(StateCandidate::from_json("{").is_err());
    }
}
