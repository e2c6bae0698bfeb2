//! Exact coefficients: Gaussian rationals and finite Laurent sums in the
//! formal unit `ζ = e^{ih}`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lattice::Int;
use crate::phase;

/// `a + bi` with `a, b ∈ Q`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        Self {
            re,
            im: BigRational::zero(),
        }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::real(BigRational::from_integer(n.into()))
    }

    pub fn i() -> Self {
        Self::new(BigRational::zero(), BigRational::one())
    }

    /// Exact conversion of a finite binary64 value.
    pub fn from_f64(x: f64) -> Result<Self> {
        rational_from_f64(x).map(Self::real)
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        Ok(Self::new(rational_from_f64(z.re)?, rational_from_f64(z.im)?))
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    pub fn inv(&self) -> Option<Self> {
        let n = self.norm_sqr();
        if n.is_zero() {
            return None;
        }
        Some(Self::new(&self.re / &n, -(&self.im / &n)))
    }
}

pub fn rational_from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_f64(x)
        .ok_or_else(|| Error::InvalidParameter(format!("{x} is not a finite real")))
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        Self::default()
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        Self::real(BigRational::one())
    }
}

impl Add for GaussianRational {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl Sub for GaussianRational {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Neg for GaussianRational {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

impl Mul for GaussianRational {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Div for GaussianRational {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        let inv = rhs.inv().expect("division by zero Gaussian rational");
        &self * &inv
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `a`, `a+bi`, `a-bi` with reduced fractions.
impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.re)?;
        if !self.im.is_zero() {
            if self.im.is_negative() {
                write!(f, "-{}i", -self.im.clone())?;
            } else {
                write!(f, "+{}i", self.im)?;
            }
        }
        Ok(())
    }
}

/// `Σ_k c_k ζ^k` with Gaussian-rational `c_k`; zero coefficients are never
/// stored, so equality is structural.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct PhaseScalar {
    terms: BTreeMap<Int, GaussianRational>,
}

impl PhaseScalar {
    pub fn monomial(coeff: GaussianRational, exponent: Int) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exponent, coeff);
        }
        Self { terms }
    }

    pub fn zeta(exponent: Int) -> Self {
        Self::monomial(GaussianRational::one(), exponent)
    }

    pub fn from_rational(r: BigRational) -> Self {
        Self::monomial(GaussianRational::real(r), 0)
    }

    pub fn from_integer(n: i64) -> Self {
        Self::monomial(GaussianRational::from_integer(n), 0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (Int, &GaussianRational)> {
        self.terms.iter().map(|(&k, c)| (k, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `(c_k, k) ↦ (c̄_k, −k)`.
    pub fn conj(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(&k, c)| (-k, c.conj())).collect(),
        }
    }

    pub fn shift(&self, by: Int) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for (&k, c) in &self.terms {
            terms.insert(k.checked_add(by).ok_or(Error::Overflow)?, c.clone());
        }
        Ok(Self { terms })
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        let mut out = Self::zero();
        if c.is_zero() {
            return out;
        }
        for (&k, x) in &self.terms {
            out.terms.insert(k, x * c);
        }
        out
    }

    pub fn add_term(&mut self, exponent: Int, coeff: GaussianRational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(exponent) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().clone() + coeff;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        let mut out = Self::zero();
        for (&a, x) in &self.terms {
            for (&b, y) in &other.terms {
                out.add_term(a.checked_add(b).ok_or(Error::Overflow)?, x * y);
            }
        }
        Ok(out)
    }

    /// The coefficient of `ζ⁰` when no other power is present.
    pub fn as_constant(&self) -> Option<GaussianRational> {
        match self.terms.len() {
            0 => Some(GaussianRational::zero()),
            1 => self.terms.get(&0).cloned(),
            _ => None,
        }
    }

    /// `Σ c_k e^{ihk}` in floating point.
    pub fn numeric_eval(&self, h: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|(&k, c)| c.to_complex() * phase::unit(h, k))
            .sum()
    }
}

impl Zero for PhaseScalar {
    fn zero() -> Self {
        Self::default()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for PhaseScalar {
    fn one() -> Self {
        Self::zeta(0)
    }
}

impl Add for PhaseScalar {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl AddAssign for PhaseScalar {
    fn add_assign(&mut self, rhs: Self) {
        for (k, c) in rhs.terms {
            self.add_term(k, c);
        }
    }
}

impl Neg for PhaseScalar {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            terms: self.terms.into_iter().map(|(k, c)| (k, -c)).collect(),
        }
    }
}

impl Sub for PhaseScalar {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

/// Panics on exponent overflow; use [`PhaseScalar::checked_mul`] where
/// exponents can be large.
impl Mul for PhaseScalar {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.checked_mul(&rhs).expect("ζ-exponent overflow")
    }
}

impl fmt::Debug for PhaseScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for PhaseScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            if *k != 0 {
                write!(f, " z^{k}")?;
            }
        }
        Ok(())
    }
}
