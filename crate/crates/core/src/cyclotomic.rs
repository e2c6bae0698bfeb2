//! Exact arithmetic in the cyclotomic field `Q(ω_d)`, `ω_d = e^{2πi/d}`.
//!
//! Elements are polynomials in `ω` reduced modulo the `d`-th cyclotomic
//! polynomial, so each element has a unique representation of degree
//! `< φ(d)`. Order 1 doubles as the home of plain rationals, which mix freely
//! with any other order.

use std::collections::HashMap;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::matrix::Entry;

/// Integer coefficients of `Φ_n`, lowest degree first.
pub fn cyclotomic_polynomial(n: u32) -> Arc<Vec<BigInt>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<BigInt>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().expect("cache poisoned").get(&n) {
        return p.clone();
    }
    assert!(n >= 1, "cyclotomic order must be positive");
    // x^n − 1 divided by Φ_d for every proper divisor d
    let mut poly = vec![BigInt::zero(); n as usize + 1];
    poly[0] = -BigInt::one();
    poly[n as usize] = BigInt::one();
    for d in (1..n).filter(|d| n.is_multiple_of(*d)) {
        poly = exact_divide(&poly, &cyclotomic_polynomial(d));
    }
    let poly = Arc::new(poly);
    cache
        .lock()
        .expect("cache poisoned")
        .insert(n, poly.clone());
    poly
}

fn exact_divide(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    debug_assert!(den[dd].is_one());
    let mut quot = vec![BigInt::zero(); rem.len() - dd];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dd].clone();
        if c.is_zero() {
            continue;
        }
        for (j, dj) in den.iter().enumerate() {
            rem[i + j] -= &c * dj;
        }
        quot[i] = c;
    }
    debug_assert!(rem.iter().all(Zero::is_zero));
    quot
}

#[derive(Clone, Debug)]
pub struct Cyclotomic {
    order: u32,
    coeffs: Vec<BigRational>,
}

impl Cyclotomic {
    pub fn rational(r: BigRational) -> Self {
        Self {
            order: 1,
            coeffs: vec![r],
        }
    }

    /// `ω_d^k`.
    pub fn root_of_unity(order: u32, k: i64) -> Self {
        let e = k.rem_euclid(i64::from(order)) as usize;
        let mut poly = vec![BigRational::zero(); e + 1];
        poly[e] = BigRational::one();
        Self::reduce(order, poly)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    fn degree_bound(order: u32) -> usize {
        cyclotomic_polynomial(order).len() - 1
    }

    fn reduce(order: u32, mut poly: Vec<BigRational>) -> Self {
        let modulus = cyclotomic_polynomial(order);
        let deg = modulus.len() - 1;
        for i in (deg..poly.len()).rev() {
            let c = std::mem::take(&mut poly[i]);
            if c.is_zero() {
                continue;
            }
            for (j, mj) in modulus.iter().enumerate().take(deg) {
                poly[i - deg + j] -= &c * BigRational::from_integer(mj.clone());
            }
        }
        poly.resize(deg, BigRational::zero());
        Self {
            order,
            coeffs: poly,
        }
    }

    fn promote(&self, order: u32) -> Self {
        if self.order == order {
            return self.clone();
        }
        assert_eq!(self.order, 1, "mixing cyclotomic orders {} and {order}", self.order);
        let mut coeffs = vec![BigRational::zero(); Self::degree_bound(order)];
        coeffs[0] = self.coeffs[0].clone();
        Self { order, coeffs }
    }

    fn common(a: &Self, b: &Self) -> (Self, Self) {
        let order = if a.order == 1 { b.order } else { a.order };
        (a.promote(order), b.promote(order))
    }

    pub fn to_complex(&self) -> Complex64 {
        let step = std::f64::consts::TAU / f64::from(self.order);
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let a = step * k as f64;
                Complex64::new(a.cos(), a.sin()) * c.to_f64().unwrap_or(f64::NAN)
            })
            .sum()
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = Self::common(self, other);
        a.coeffs == b.coeffs
    }
}

impl Zero for Cyclotomic {
    fn zero() -> Self {
        Self::rational(BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }
}

impl One for Cyclotomic {
    fn one() -> Self {
        Self::rational(BigRational::one())
    }
}

impl Add for Cyclotomic {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let (a, b) = Self::common(&self, &rhs);
        Self {
            order: a.order,
            coeffs: a.coeffs.into_iter().zip(b.coeffs).map(|(x, y)| x + y).collect(),
        }
    }
}

impl Neg for Cyclotomic {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            order: self.order,
            coeffs: self.coeffs.into_iter().map(|c| -c).collect(),
        }
    }
}

impl Sub for Cyclotomic {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul for Cyclotomic {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let (a, b) = Self::common(&self, &rhs);
        let mut prod = vec![BigRational::zero(); a.coeffs.len() + b.coeffs.len()];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                prod[i + j] += x * y;
            }
        }
        Self::reduce(a.order, prod)
    }
}

/// Division by a rational scalar only; general inverses are not needed.
impl Div<BigRational> for Cyclotomic {
    type Output = Self;
    fn div(self, rhs: BigRational) -> Self {
        Self {
            order: self.order,
            coeffs: self.coeffs.into_iter().map(|c| c / &rhs).collect(),
        }
    }
}

impl Entry for Cyclotomic {
    /// `ω^k ↦ ω^{−k}`.
    fn conj(&self) -> Self {
        let d = self.order as usize;
        let mut poly = vec![BigRational::zero(); d];
        for (k, c) in self.coeffs.iter().enumerate() {
            poly[(d - k) % d] += c;
        }
        Self::reduce(self.order, poly)
    }

    fn from_rational(r: &BigRational) -> Self {
        Self::rational(r.clone())
    }

    fn magnitude(&self) -> f64 {
        self.to_complex().norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn known_cyclotomic_polynomials() {
        assert_eq!(*cyclotomic_polynomial(1), ints(&[-1, 1]));
        assert_eq!(*cyclotomic_polynomial(2), ints(&[1, 1]));
        assert_eq!(*cyclotomic_polynomial(4), ints(&[1, 0, 1]));
        assert_eq!(*cyclotomic_polynomial(6), ints(&[1, -1, 1]));
        assert_eq!(*cyclotomic_polynomial(12), ints(&[1, 0, -1, 0, 1]));
    }

    #[test]
    fn roots_of_unity_sum_to_zero() {
        for d in 2..=12u32 {
            let sum = (0..d as i64)
                .map(|k| Cyclotomic::root_of_unity(d, k))
                .fold(Cyclotomic::zero(), |a, b| a + b);
            assert!(sum.is_zero(), "d = {d}");
        }
    }

    #[test]
    fn multiplication_and_conjugation() {
        let w = Cyclotomic::root_of_unity(5, 2);
        let w3 = Cyclotomic::root_of_unity(5, 3);
        assert_eq!(w.clone() * w3.clone(), Cyclotomic::one());
        assert_eq!(w.conj(), w3);
        assert!((w.to_complex() - Complex64::from_polar(1.0, 4.0 * std::f64::consts::PI / 5.0)).norm() < 1e-14);
        assert_eq!(Cyclotomic::root_of_unity(2, 1), -Cyclotomic::one());
    }
}
