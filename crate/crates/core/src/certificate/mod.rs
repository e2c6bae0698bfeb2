//! Refutation certificates for invariant state candidates.
//!
//! For a candidate with `p = ω(W_ξ) ≠ 0` on the orbit of `ξ = (j, j)`, the
//! engine picks `d` with `dp² > 1`, finds `N` so that the `d` families of
//! Gram matrices `H″_l` average to something close to `P_d`, and exhibits a
//! vector `v` and an index `l*` with `v̄ᵀ H″_{l*} v < 0`. [`verify`]
//! recomputes every step from first principles, finishing with a direct
//! evaluation of `ω(a^*a)` through the algebra product.

pub mod diophantine;
mod json;
pub mod matrices;

use std::fmt;

use num_complex::Complex64;

use crate::algebra::{adjoint, combination, multiply, PhaseContext};
use crate::error::{Error, Result};
use crate::lattice::{Int, LatticeVector};
use crate::matrix::{quadratic_form, HermitianMatrix};
use crate::scalar::GaussianRational;
use crate::states::{eval, gram, Orbit, StateCandidate};

pub use diophantine::{diophantine_n, diophantine_n_with, SearchBudget, Strategy};
pub use json::CertificateFile;
pub use matrices::{
    average_r, build_h_prime, build_h_prime_exact, build_h_second, build_p, build_p_exact,
    choose_parameters, det_p, generators, q_values, witness_vector,
};

/// Values must sit below `−NEGATIVITY_MARGIN` to count as negative.
pub const NEGATIVITY_MARGIN: f64 = 1e-6;
/// Agreement required between recomputed and recorded values.
pub const AGREEMENT_TOL: f64 = 1e-9;
const MAX_EPS_HALVINGS: u32 = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct CertParams {
    pub xi: LatticeVector,
    pub d: u32,
    pub n: u128,
    pub epsilon: f64,
}

impl CertParams {
    /// Second coordinate of `ξ = (ξ₂, ξ₂)`, which is also its orbit index.
    pub fn xi2(&self) -> u128 {
        self.xi.coords().get(1).map_or(0, |x| x.unsigned_abs())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub params: CertParams,
    pub p: f64,
    pub l_star: u32,
    /// The family `l*`: `(0,0)` followed by `Θ_k ξ`, `k = 1, …, d`.
    pub generators: Vec<LatticeVector>,
    pub witness: Vec<Complex64>,
    pub value: f64,
    pub avg_value: f64,
}

/// Short form for `|p| > 1`: the `2×2` Gram matrix on `{(0,0), ξ}` is
/// already indefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct MinorCertificate {
    pub xi: LatticeVector,
    pub p: f64,
    pub generators: Vec<LatticeVector>,
    pub witness: Vec<Complex64>,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Refutation {
    Certificate(Certificate),
    Minor(MinorCertificate),
    /// Every declared orbit value is zero; the listed orbits were checked.
    ConsistentWithTrace { orbits_checked: Vec<Orbit> },
}

fn require_genus_one(ctx: &PhaseContext) -> Result<()> {
    if ctx.dim() != 2 {
        return Err(Error::GenusNotOne(ctx.dim()));
    }
    Ok(())
}

fn to_int(x: u128) -> Result<Int> {
    Int::try_from(x).map_err(|_| Error::Overflow)
}

/// Run the refutation pipeline on the smallest orbit with a nonzero value.
pub fn refute(state: &StateCandidate, ctx: &PhaseContext) -> Result<Refutation> {
    refute_with(state, ctx, SearchBudget::default())
}

pub fn refute_with(
    state: &StateCandidate,
    ctx: &PhaseContext,
    budget: SearchBudget,
) -> Result<Refutation> {
    require_genus_one(ctx)?;
    let Some((&j, &p)) = state.orbit_values().iter().find(|(_, &p)| p != 0.0) else {
        return Ok(Refutation::ConsistentWithTrace {
            orbits_checked: state.orbit_values().keys().copied().collect(),
        });
    };
    let xi = LatticeVector::pair(to_int(j)?, to_int(j)?);
    if p.abs() > 1.0 {
        return minor(state, xi, p, ctx).map(Refutation::Minor);
    }
    let (d, mut epsilon) = choose_parameters(p)?;
    let witness = witness_vector(p, d)?;
    for _ in 0..=MAX_EPS_HALVINGS {
        let n = diophantine_n_with(ctx, j, d, epsilon, Strategy::default(), budget)?;
        let params = CertParams {
            xi: xi.clone(),
            d,
            n,
            epsilon,
        };
        let hs = (1..=d)
            .map(|l| build_h_second(state, &params, l, ctx))
            .collect::<Result<Vec<_>>>()?;
        let avg_value = quadratic_form(&average_r(&hs)?, &witness)?;
        let mut best = (0, f64::INFINITY);
        for (i, h) in hs.iter().enumerate() {
            let v = quadratic_form(h, &witness)?;
            if v < best.1 {
                best = (i as u32 + 1, v);
            }
        }
        let (l_star, value) = best;
        if avg_value < -NEGATIVITY_MARGIN && value < -NEGATIVITY_MARGIN {
            return Ok(Refutation::Certificate(Certificate {
                generators: generators(&params, l_star)?,
                params,
                p,
                l_star,
                witness,
                value,
                avg_value,
            }));
        }
        epsilon /= 2.0;
    }
    Err(Error::InvalidParameter(format!(
        "no margin below -{NEGATIVITY_MARGIN:e} for p = {p} after shrinking ε"
    )))
}

fn minor(state: &StateCandidate, xi: LatticeVector, p: f64, ctx: &PhaseContext) -> Result<MinorCertificate> {
    let generators = vec![LatticeVector::zero(2), xi.clone()];
    let witness = vec![Complex64::new(1.0, 0.0), Complex64::new(-p.signum(), 0.0)];
    let value = quadratic_form(&gram(state, &generators, ctx)?, &witness)?;
    Ok(MinorCertificate {
        xi,
        p,
        generators,
        witness,
        value,
    })
}

/// `ω(a^*a)` for `a = Σ_k v_k W_{m_k}`, through the twisted product only.
pub fn algebra_value(
    state: &StateCandidate,
    gens: &[LatticeVector],
    v: &[Complex64],
    ctx: &PhaseContext,
) -> Result<Complex64> {
    let coeffs = v
        .iter()
        .map(|&z| GaussianRational::from_complex(z))
        .collect::<Result<Vec<_>>>()?;
    let a = combination(gens, &coeffs, ctx)?;
    eval(state, &multiply(&adjoint(&a), &a, ctx)?, ctx)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Clause {
    Params,
    Divisibility,
    Diophantine,
    Generators,
    Perturbation,
    Negativity,
    Average,
    Algebra,
}

impl Clause {
    pub fn name(self) -> &'static str {
        match self {
            Clause::Params => "params",
            Clause::Divisibility => "divisibility",
            Clause::Diophantine => "diophantine",
            Clause::Generators => "generators",
            Clause::Perturbation => "perturbation",
            Clause::Negativity => "negativity",
            Clause::Average => "average",
            Clause::Algebra => "algebra",
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClauseResult {
    pub clause: Clause,
    pub passed: bool,
    pub detail: String,
}

/// Clauses in the order they were checked; checking stops at the first
/// failure.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct VerifyReport {
    pub clauses: Vec<ClauseResult>,
}

impl VerifyReport {
    pub fn accepted(&self) -> bool {
        !self.clauses.is_empty() && self.clauses.iter().all(|c| c.passed)
    }

    pub fn failed_clause(&self) -> Option<Clause> {
        self.clauses.iter().find(|c| !c.passed).map(|c| c.clause)
    }

    fn check(&mut self, clause: Clause, passed: bool, detail: impl Into<String>) -> bool {
        self.clauses.push(ClauseResult {
            clause,
            passed,
            detail: detail.into(),
        });
        passed
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            writeln!(f, "{:<13} {}  {}", c.clause, if c.passed { "ok" } else { "FAILED" }, c.detail)?;
        }
        match self.failed_clause() {
            None => write!(f, "ACCEPT"),
            Some(c) => write!(f, "REJECT ({c})"),
        }
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= AGREEMENT_TOL
}

/// Independently recheck a full certificate against `state`.
pub fn verify(state: &StateCandidate, cert: &Certificate, ctx: &PhaseContext) -> VerifyReport {
    let mut r = VerifyReport::default();
    if let Err(e) = verify_into(&mut r, state, cert, ctx) {
        r.check(next_clause(&r), false, format!("error: {e}"));
    }
    r
}

fn next_clause(r: &VerifyReport) -> Clause {
    const ORDER: [Clause; 8] = [
        Clause::Params,
        Clause::Divisibility,
        Clause::Diophantine,
        Clause::Generators,
        Clause::Perturbation,
        Clause::Negativity,
        Clause::Average,
        Clause::Algebra,
    ];
    ORDER.get(r.clauses.len()).copied().unwrap_or(Clause::Algebra)
}

fn params_problem(state: &StateCandidate, cert: &Certificate, ctx: &PhaseContext) -> Option<String> {
    let CertParams { xi, d, epsilon, .. } = &cert.params;
    let (d, eps, p) = (*d, *epsilon, cert.p);
    let df = f64::from(d);
    if ctx.dim() != 2 {
        return Some(format!("genus {} is not 1", ctx.dim() / 2));
    }
    match xi.coords() {
        [a, b] if a == b && *a >= 1 => {}
        _ => return Some(format!("ξ = {xi} is not of the form (j, j), j >= 1")),
    }
    let declared = state.value(cert.params.xi2());
    if declared != p {
        return Some(format!("p = {p} but the state gives {declared}"));
    }
    if d < 2 {
        return Some(format!("d = {d} < 2"));
    }
    if !(p.abs() <= 1.0 && df * p * p > 1.0) {
        return Some(format!("dp² = {} is not in (1, d]", df * p * p));
    }
    if !(eps > 0.0 && eps < (df * p * p - 1.0) / (2.0 * df)) {
        return Some(format!("ε = {eps} outside (0, (dp²−1)/(2d))"));
    }
    if !(1..=d).contains(&cert.l_star) {
        return Some(format!("l* = {} outside [1, {d}]", cert.l_star));
    }
    if cert.witness.len() != d as usize + 1 {
        return Some(format!("witness has length {}, expected {}", cert.witness.len(), d + 1));
    }
    if cert.witness.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Some("witness has non-finite entries".into());
    }
    None
}

fn verify_into(
    r: &mut VerifyReport,
    state: &StateCandidate,
    cert: &Certificate,
    ctx: &PhaseContext,
) -> Result<()> {
    let params = &cert.params;
    let problem = params_problem(state, cert, ctx);
    let ok = problem.is_none();
    if !r.check(Clause::Params, ok, problem.unwrap_or_else(|| format!("d = {}, ε = {:e}", params.d, params.epsilon))) {
        return Ok(());
    }

    let fact = diophantine::factorial_u128(params.d)?;
    let ok = params.n > 0 && params.n.is_multiple_of(fact);
    if !r.check(Clause::Divisibility, ok, format!("N = {}, d! = {fact}, N mod d! = {}", params.n, params.n % fact)) {
        return Ok(());
    }

    let res = diophantine::residual(ctx.h(), params.n, params.xi2(), params.d);
    let bound = params.epsilon / (4.0 * f64::from(params.d).powi(2));
    if !r.check(Clause::Diophantine, res.abs() < bound, format!("|residual| = {:e}, bound {bound:e}", res.abs())) {
        return Ok(());
    }

    let expected = generators(params, cert.l_star)?;
    if !r.check(Clause::Generators, expected == cert.generators, format!("{} generators for l* = {}", expected.len(), cert.l_star)) {
        return Ok(());
    }

    let q = q_values(state, params)?;
    let mut hs = Vec::with_capacity(params.d as usize);
    let mut worst = 0.0f64;
    for l in 1..=params.d {
        let h2 = gram(state, &generators(params, l)?, ctx)?;
        worst = worst.max(h2.max_distance(&build_h_prime(cert.p, &q, params.d, l)?)?);
        hs.push(h2);
    }
    if !r.check(Clause::Perturbation, worst < params.epsilon, format!("max |H″ − H′| = {worst:e} < ε = {:e}", params.epsilon)) {
        return Ok(());
    }

    let value = quadratic_form(&hs[cert.l_star as usize - 1], &cert.witness)?;
    let ok = value < -NEGATIVITY_MARGIN && close(value, cert.value);
    if !r.check(Clause::Negativity, ok, format!("v̄ᵀH″v = {value:.17e}, recorded {:.17e}", cert.value)) {
        return Ok(());
    }

    let avg = quadratic_form(&average_r(&hs)?, &cert.witness)?;
    let ok = avg < -NEGATIVITY_MARGIN && close(avg, cert.avg_value);
    if !r.check(Clause::Average, ok, format!("average value {avg:.17e}, recorded {:.17e}", cert.avg_value)) {
        return Ok(());
    }

    let direct = algebra_value(state, &cert.generators, &cert.witness, ctx)?;
    let ok = direct.re < -NEGATIVITY_MARGIN && direct.im.abs() <= AGREEMENT_TOL && close(direct.re, cert.value);
    r.check(Clause::Algebra, ok, format!("ω(a*a) = {:.17e}{:+e}i", direct.re, direct.im));
    Ok(())
}

/// Recheck a short-form certificate.
pub fn verify_minor(state: &StateCandidate, cert: &MinorCertificate, ctx: &PhaseContext) -> VerifyReport {
    let mut r = VerifyReport::default();
    if let Err(e) = verify_minor_into(&mut r, state, cert, ctx) {
        let clause = match r.clauses.len() {
            0 => Clause::Params,
            1 => Clause::Generators,
            2 => Clause::Negativity,
            _ => Clause::Algebra,
        };
        r.check(clause, false, format!("error: {e}"));
    }
    r
}

fn verify_minor_into(
    r: &mut VerifyReport,
    state: &StateCandidate,
    cert: &MinorCertificate,
    ctx: &PhaseContext,
) -> Result<()> {
    let j = match cert.xi.coords() {
        [a, b] if a == b && *a >= 1 => a.unsigned_abs(),
        _ => 0,
    };
    let ok = ctx.dim() == 2 && j >= 1 && state.value(j) == cert.p && cert.witness.len() == 2;
    if !r.check(Clause::Params, ok, format!("ξ = {}, p = {}", cert.xi, cert.p)) {
        return Ok(());
    }
    let expected = vec![LatticeVector::zero(2), cert.xi.clone()];
    if !r.check(Clause::Generators, expected == cert.generators, "{(0,0), ξ}") {
        return Ok(());
    }
    let h: HermitianMatrix = gram(state, &cert.generators, ctx)?;
    let value = quadratic_form(&h, &cert.witness)?;
    let ok = value < -NEGATIVITY_MARGIN && close(value, cert.value);
    if !r.check(Clause::Negativity, ok, format!("v̄ᵀHv = {value:.17e}, recorded {:.17e}", cert.value)) {
        return Ok(());
    }
    let direct = algebra_value(state, &cert.generators, &cert.witness, ctx)?;
    let ok = direct.re < -NEGATIVITY_MARGIN && direct.im.abs() <= AGREEMENT_TOL && close(direct.re, cert.value);
    r.check(Clause::Algebra, ok, format!("ω(a*a) = {:.17e}", direct.re));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn candidate(j: Orbit, p: f64) -> StateCandidate {
        StateCandidate::from_pairs(&[(j, p)]).unwrap()
    }

    fn certificate(state: &StateCandidate, ctx: &PhaseContext) -> Certificate {
        match refute(state, ctx).unwrap() {
            Refutation::Certificate(c) => c,
            other => panic!("expected a certificate, got {other:?}"),
        }
    }

    #[test]
    fn half_on_first_orbit() {
        let ctx = PhaseContext::default();
        let s = candidate(1, 0.5);
        let c = certificate(&s, &ctx);
        assert_eq!(c.params.d, 5);
        assert_eq!(c.params.n, 3_335_160);
        assert_eq!(c.params.xi, LatticeVector::pair(1, 1));
        assert!(c.value < 0.0);
        assert!(c.avg_value <= -1.25 + c.params.epsilon * 2.0 * 25.0);
        let report = verify(&s, &c, &ctx);
        assert!(report.accepted(), "{report}");
        assert!(report.to_string().ends_with("ACCEPT"));
    }

    #[test]
    fn frozen_search_results() {
        let ctx = PhaseContext::default();
        for (j, p, n) in [(1, 0.9, 47_548u128), (2, 0.9, 12_242), (2, 0.5, 2_136_720)] {
            assert_eq!(certificate(&candidate(j, p), &ctx).params.n, n);
        }
    }

    #[test]
    fn tampering_is_caught() {
        let ctx = PhaseContext::default();
        let s = candidate(1, 0.9);
        let c = certificate(&s, &ctx);

        let mut t = c.clone();
        t.params.n += 1;
        assert_eq!(verify(&s, &t, &ctx).failed_clause(), Some(Clause::Divisibility));

        let mut t = c.clone();
        t.witness = vec![Complex64::new(0.0, 0.0); t.witness.len()];
        assert_eq!(verify(&s, &t, &ctx).failed_clause(), Some(Clause::Negativity));

        let mut t = c.clone();
        t.params.n += 2;
        assert_eq!(verify(&s, &t, &ctx).failed_clause(), Some(Clause::Diophantine));

        let mut t = c.clone();
        t.generators[1] = LatticeVector::pair(3, 1);
        assert_eq!(verify(&s, &t, &ctx).failed_clause(), Some(Clause::Generators));

        let mut t = c.clone();
        t.avg_value += 1e-3;
        assert_eq!(verify(&s, &t, &ctx).failed_clause(), Some(Clause::Average));

        let mut t = c;
        t.p = 0.8;
        assert_eq!(verify(&s, &t, &ctx).failed_clause(), Some(Clause::Params));
    }

    #[test]
    fn trace_is_consistent() {
        let ctx = PhaseContext::default();
        assert_eq!(
            refute(&crate::states::trace_state(), &ctx).unwrap(),
            Refutation::ConsistentWithTrace { orbits_checked: vec![] }
        );
        let zeros = StateCandidate::from_pairs(&[(1, 0.0), (4, 0.0)]).unwrap();
        assert_eq!(
            refute(&zeros, &ctx).unwrap(),
            Refutation::ConsistentWithTrace { orbits_checked: vec![1, 4] }
        );
    }

    #[test]
    fn minor_for_large_p() {
        let ctx = PhaseContext::default();
        let s = candidate(1, 1.5);
        let Refutation::Minor(m) = refute(&s, &ctx).unwrap() else {
            panic!("expected minor form");
        };
        assert!((m.value + 1.0).abs() < 1e-12);
        assert!(verify_minor(&s, &m, &ctx).accepted());
        let mut t = m;
        t.witness[1] = Complex64::new(1.0, 0.0);
        assert_eq!(verify_minor(&s, &t, &ctx).failed_clause(), Some(Clause::Negativity));
    }

    #[test]
    fn nonzero_q_values() {
        // q on derived orbits perturbs every H″_l but not the average much
        let ctx = PhaseContext::default();
        let base = candidate(1, 0.9);
        let n = certificate(&base, &ctx).params.n;
        let s = StateCandidate::from_pairs(&[(1, 0.9), (n, 0.3)]).unwrap();
        let c = certificate(&s, &ctx);
        assert_eq!(c.params.n, n);
        assert!(verify(&s, &c, &ctx).accepted());
    }

    #[test]
    fn higher_genus_rejected() {
        let ctx = PhaseContext::new(1.0, crate::lattice::SkewForm::standard(2)).unwrap();
        assert_eq!(refute(&candidate(1, 0.5), &ctx), Err(Error::GenusNotOne(4)));
    }
}
