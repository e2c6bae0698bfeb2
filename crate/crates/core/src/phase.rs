//! Reduction of `h·k` modulo `2π` for very large integers `k`.
//!
//! Angles are represented as fractions of a full turn in 128-bit fixed point,
//! so `t` stands for the angle `2π · t / 2^128`. A binary64 `h` is an exact
//! dyadic rational, and `π` is known to a few hundred bits, so the reduction
//! stays accurate even when `|h·k|` exceeds `2^120`.

use std::sync::OnceLock;

use num_bigint::{BigInt, Sign};
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{Float, One, Zero};

use crate::lattice::Int;

/// Fractional bits carried by the fixed-point `π`.
const PI_BITS: u32 = 768;

/// `floor(π · 2^PI_BITS)` via Machin's formula.
fn pi_fixed() -> &'static BigInt {
    static PI: OnceLock<BigInt> = OnceLock::new();
    PI.get_or_init(|| {
        let guard = 32;
        let one = BigInt::one() << (PI_BITS + guard);
        let atan_inv = |x: u32| -> BigInt {
            let x = BigInt::from(x);
            let x2 = &x * &x;
            let mut power = &one / &x;
            let mut sum = BigInt::zero();
            let mut n = 0u32;
            while !power.is_zero() {
                let term = &power / (2 * n + 1);
                if n.is_multiple_of(2) {
                    sum += term;
                } else {
                    sum -= term;
                }
                power /= &x2;
                n += 1;
            }
            sum
        };
        let pi = atan_inv(5) * 16 - atan_inv(239) * 4;
        pi >> guard
    })
}

/// `frac(h·k / 2π)` as a 128-bit turn fraction.
pub fn turns(h: f64, k: &BigInt) -> u128 {
    assert!(h.is_finite(), "phase parameter must be finite");
    let (mantissa, exponent, sign) = h.integer_decode();
    let mut num = BigInt::from(mantissa) * k;
    if sign < 0 {
        num = -num;
    }
    // turns · 2^128 = num · 2^(exponent + 128 + PI_BITS) / (2 · π_fixed)
    let shift = i64::from(exponent) + 128 + i64::from(PI_BITS);
    let num = if shift >= 0 {
        num << shift as u64
    } else {
        num >> (-shift) as u64
    };
    let den: BigInt = pi_fixed() << 1u32;
    let q = num.div_floor(&den);
    let modulus = BigInt::one() << 128u32;
    let r = q.mod_floor(&modulus);
    let (_, digits) = r.to_u64_digits();
    debug_assert!(r.sign() != Sign::Minus);
    match digits.as_slice() {
        [] => 0,
        [lo] => u128::from(*lo),
        [lo, hi, ..] => u128::from(*lo) | (u128::from(*hi) << 64),
    }
}

pub fn turns_int(h: f64, k: Int) -> u128 {
    turns(h, &BigInt::from(k))
}

/// Radians in `[0, 2π)` for a turn fraction.
pub fn turns_to_radians(t: u128) -> f64 {
    let frac = t as f64 / 2f64.powi(128);
    frac * std::f64::consts::TAU
}

/// `(h·k) mod 2π` in `[0, 2π)`.
pub fn reduce(h: f64, k: &BigInt) -> f64 {
    turns_to_radians(turns(h, k))
}

/// Signed distance in radians between two turn fractions, in `[−π, π)`.
pub fn signed_turn_distance(a: u128, b: u128) -> f64 {
    let diff = a.wrapping_sub(b) as i128;
    diff as f64 / 2f64.powi(128) * std::f64::consts::TAU
}

/// `e^{ihk}`.
pub fn unit(h: f64, k: Int) -> Complex64 {
    if k == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let t = turns_int(h, k);
    // centre the angle on zero before taking cos/sin
    let angle = (t as i128) as f64 / 2f64.powi(128) * std::f64::consts::TAU;
    Complex64::new(angle.cos(), angle.sin())
}

/// `floor(π · 2^bits)` for `bits ≤ PI_BITS`; exposed for tests.
pub fn pi_bits(bits: u32) -> BigInt {
    assert!(bits <= PI_BITS);
    pi_fixed() >> (PI_BITS - bits)
}
