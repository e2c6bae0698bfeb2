//! Search for `N = d!·k` with `|(h N ξ₂²) mod 2π − 2π/d| < ε/(4d²)`.
//!
//! Writing `α = frac(h d! ξ₂² / 2π)`, the condition asks for the first `k`
//! whose rotation `kα mod 1` lands in a window around `1/d`. Both strategies
//! work on the same 128-bit fixed-point turn fractions, so they agree on the
//! minimal `k` exactly.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::algebra::PhaseContext;
use crate::error::{Error, Result};
use crate::phase;

pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Strategy {
    /// `k = 1, 2, …` until the window is hit.
    LinearScan,
    /// Euclid-style descent for the first hit of a rotation in an interval.
    #[default]
    Accelerated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    /// Candidates tried by the linear scan; descent steps for the accelerator.
    pub max_iterations: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            max_iterations: DEFAULT_BUDGET,
        }
    }
}

pub fn factorial(d: u32) -> BigInt {
    (1..=d).fold(BigInt::one(), |acc, i| acc * i)
}

pub fn factorial_u128(d: u32) -> Result<u128> {
    (1..=u128::from(d)).try_fold(1u128, |acc, i| acc.checked_mul(i).ok_or(Error::Overflow))
}

/// Fixed-point window `[lo, hi]` of turn fractions satisfying the strict
/// inequality.
fn window(d: u32, eps: f64) -> (u128, u128) {
    let target = (BigInt::one() << 128u32) / BigInt::from(d);
    let target = target.to_u128().expect("2^128/d fits for d >= 2");
    let half = eps / (4.0 * f64::from(d) * f64::from(d)) / std::f64::consts::TAU;
    let half = (half * 2f64.powi(128)) as u128;
    (target - half + 1, target + half - 1)
}

fn validate(xi2: u128, d: u32, eps: f64) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("d must be >= 2, got {d}")));
    }
    if xi2 == 0 {
        return Err(Error::InvalidParameter("ξ₂ must be positive".into()));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter(format!("ε must be positive, got {eps}")));
    }
    let (lo, hi) = window(d, eps);
    if lo > hi {
        return Err(Error::InvalidParameter(format!(
            "ε = {eps:e} is below the fixed-point resolution"
        )));
    }
    Ok(())
}

/// Signed residual `(h N ξ₂²) mod 2π − 2π/d` in radians, reduced directly
/// from `N` (independent of the search).
pub fn residual(h: f64, n: u128, xi2: u128, d: u32) -> f64 {
    let x = BigInt::from(n) * BigInt::from(xi2) * BigInt::from(xi2);
    phase::reduce(h, &x) - std::f64::consts::TAU / f64::from(d)
}

/// True iff `N` satisfies the approximation inequality (divisibility is
/// checked separately).
pub fn satisfies(h: f64, n: u128, xi2: u128, d: u32, eps: f64) -> bool {
    residual(h, n, xi2, d).abs() < eps / (4.0 * f64::from(d) * f64::from(d))
}

/// Smallest `N = d!·k`, `k ≥ 1`, meeting the inequality, using the default
/// strategy and budget.
pub fn diophantine_n(ctx: &PhaseContext, xi2: u128, d: u32, eps: f64) -> Result<u128> {
    diophantine_n_with(ctx, xi2, d, eps, Strategy::default(), SearchBudget::default())
}

pub fn diophantine_n_with(
    ctx: &PhaseContext,
    xi2: u128,
    d: u32,
    eps: f64,
    strategy: Strategy,
    budget: SearchBudget,
) -> Result<u128> {
    validate(xi2, d, eps)?;
    let step = factorial(d) * BigInt::from(xi2) * BigInt::from(xi2);
    let alpha = phase::turns(ctx.h(), &step);
    let (lo, hi) = window(d, eps);
    let k = match strategy {
        Strategy::LinearScan => linear_scan(alpha, lo, hi, d, budget)?,
        Strategy::Accelerated => accelerated(alpha, lo, hi, budget)?,
    };
    let n = factorial_u128(d)?.checked_mul(k).ok_or(Error::Overflow)?;
    Ok(n)
}

fn linear_scan(alpha: u128, lo: u128, hi: u128, d: u32, budget: SearchBudget) -> Result<u128> {
    let centre = lo + (hi - lo) / 2;
    let mut v: u128 = 0;
    let mut best: Option<(u128, u128)> = None;
    for k in 1..=u128::from(budget.max_iterations) {
        v = v.wrapping_add(alpha);
        if (lo..=hi).contains(&v) {
            return Ok(k);
        }
        let dist = v.abs_diff(centre);
        if best.is_none_or(|(_, b)| dist < b) {
            best = Some((k, dist));
        }
    }
    let fact = factorial_u128(d).ok();
    Err(Error::BudgetExhausted {
        budget: budget.max_iterations,
        best_n: best.and_then(|(k, _)| fact.and_then(|f| f.checked_mul(k))),
        best_residual: best.map_or(f64::INFINITY, |(_, dist)| {
            dist as f64 / 2f64.powi(128) * std::f64::consts::TAU
        }),
    })
}

/// Smallest `x ≥ 0` with `lo ≤ (a·x mod m) ≤ hi`, where `0 ≤ lo ≤ hi < m`.
///
/// If no multiple of `a` falls in `[lo, hi]` directly, the interval sits
/// strictly between two consecutive multiples and the problem transfers to
/// `(m·y mod a)` with the complementary interval, shrinking the modulus as
/// in Euclid's algorithm. The minimal `x` corresponds to the minimal `y`.
pub fn first_hit(a: &BigInt, m: &BigInt, lo: &BigInt, hi: &BigInt, steps: &mut u64) -> Option<BigInt> {
    *steps += 1;
    if lo.is_zero() {
        return Some(BigInt::zero());
    }
    let a = a.mod_floor(m);
    if a.is_zero() {
        return None;
    }
    let k = lo.div_ceil(&a);
    if &(&a * &k) <= hi {
        return Some(k);
    }
    let lo2 = (&a - hi.mod_floor(&a)).mod_floor(&a);
    let hi2 = (&a - lo.mod_floor(&a)).mod_floor(&a);
    let y = first_hit(&m.mod_floor(&a), &a, &lo2, &hi2, steps)?;
    Some((lo + m * y).div_ceil(&a))
}

fn accelerated(alpha: u128, lo: u128, hi: u128, budget: SearchBudget) -> Result<u128> {
    let mut steps = 0u64;
    let m = BigInt::one() << 128u32;
    let k = first_hit(
        &BigInt::from(alpha),
        &m,
        &BigInt::from(lo),
        &BigInt::from(hi),
        &mut steps,
    );
    if steps > budget.max_iterations {
        return Err(Error::BudgetExhausted {
            budget: budget.max_iterations,
            best_n: None,
            best_residual: f64::INFINITY,
        });
    }
    let k = k.ok_or(Error::BudgetExhausted {
        budget: budget.max_iterations,
        best_n: None,
        best_residual: f64::INFINITY,
    })?;
    let k = k.to_u128().ok_or(Error::Overflow)?;
    debug_assert!(k >= 1);
    debug_assert!((lo..=hi).contains(&alpha.wrapping_mul(k)));
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_first_hit(a: u64, m: u64, lo: u64, hi: u64) -> Option<u64> {
        (0..=m).find(|&x| (lo..=hi).contains(&((a * x) % m)))
    }

    #[test]
    fn first_hit_matches_brute_force() {
        let mut seed = 0x2545_f491_4f6c_dd1d_u64;
        let mut next = || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            seed
        };
        for _ in 0..3000 {
            let m = next() % 500 + 2;
            let a = next() % m;
            let lo = next() % m;
            let hi = lo + next() % (m - lo);
            let mut steps = 0;
            let got = first_hit(
                &BigInt::from(a),
                &BigInt::from(m),
                &BigInt::from(lo),
                &BigInt::from(hi),
                &mut steps,
            )
            .map(|x| x.to_u64().unwrap());
            assert_eq!(got, brute_first_hit(a, m, lo, hi), "a={a} m={m} [{lo},{hi}]");
        }
    }

    #[test]
    fn known_minimal_values() {
        let ctx = PhaseContext::default();
        // frozen from an independent 120-digit scan
        assert_eq!(diophantine_n(&ctx, 1, 2, 0.1).unwrap(), 31218);
        assert_eq!(diophantine_n(&ctx, 1, 3, 0.5).unwrap(), 222);
        let n = diophantine_n(&ctx, 2, 4, 0.1).unwrap();
        assert_eq!(n % 24, 0);
        assert!(satisfies(1.0, n, 2, 4, 0.1));
    }

    #[test]
    fn strategies_agree() {
        let ctx = PhaseContext::default();
        for d in 2..=5 {
            for xi2 in 1..=3 {
                let a = diophantine_n_with(&ctx, xi2, d, 0.2, Strategy::LinearScan, SearchBudget::default()).unwrap();
                let b = diophantine_n_with(&ctx, xi2, d, 0.2, Strategy::Accelerated, SearchBudget::default()).unwrap();
                assert_eq!(a, b, "d={d} xi2={xi2}");
            }
        }
    }

    #[test]
    fn float_scan_oracle() {
        // naive f64 scan is accurate while N stays small
        let ctx = PhaseContext::default();
        for (d, eps) in [(2u32, 0.5), (3, 0.3), (4, 0.5)] {
            let fact = factorial_u128(d).unwrap();
            let bound = eps / (4.0 * f64::from(d * d));
            let oracle = (1u128..)
                .map(|k| fact * k)
                .find(|&n| ((n as f64).rem_euclid(std::f64::consts::TAU) - std::f64::consts::TAU / f64::from(d)).abs() < bound)
                .unwrap();
            assert_eq!(diophantine_n(&ctx, 1, d, eps).unwrap(), oracle);
        }
    }

    #[test]
    fn budget_exhaustion_reports_best() {
        let ctx = PhaseContext::default();
        let err = diophantine_n_with(&ctx, 1, 6, 0.1, Strategy::LinearScan, SearchBudget { max_iterations: 100 })
            .unwrap_err();
        match err {
            Error::BudgetExhausted { budget, best_n, best_residual } => {
                assert_eq!(budget, 100);
                assert_eq!(best_n.unwrap() % 720, 0);
                assert!(best_residual.is_finite());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parameter_validation() {
        let ctx = PhaseContext::default();
        assert!(diophantine_n(&ctx, 1, 1, 0.1).is_err());
        assert!(diophantine_n(&ctx, 0, 2, 0.1).is_err());
        assert!(diophantine_n(&ctx, 1, 2, 0.0).is_err());
        assert!(diophantine_n(&ctx, 1, 2, -1.0).is_err());
    }

    #[test]
    fn residual_of_known_solution() {
        let r = residual(1.0, 31218, 1, 2);
        assert!((r - -6.198_721_775_410_604e-3).abs() < 1e-12);
    }
}
