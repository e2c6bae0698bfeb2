//! The twisted group algebra of `Z^{2g}`: Weyl generators `W_m` with
//! `W_n W_m = ζ^{σ(n,m)} W_{n+m}`, `W_m^* = W_{−m}`, and the symplectic
//! relabelling action `Φ_Θ(W_m) = W_{Θm}`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::lattice::{is_symplectic, pairing, IntMatrix, LatticeVector, SkewForm, SympMatrix};
use crate::scalar::{GaussianRational, PhaseScalar};

/// Phase parameter `h` and the skew form the product is twisted by.
///
/// `h/2π` is required to be irrational; any finite non-zero binary64 `h`
/// satisfies this since `π` is transcendental.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseContext {
    h: f64,
    sigma: SkewForm,
}

impl PhaseContext {
    pub fn new(h: f64, sigma: SkewForm) -> Result<Self> {
        if !h.is_finite() || h == 0.0 {
            return Err(Error::InvalidParameter(format!(
                "phase parameter h must be finite and non-zero, got {h}"
            )));
        }
        if !sigma.is_nondegenerate()? {
            return Err(Error::DegenerateForm);
        }
        Ok(Self { h, sigma })
    }

    /// `σ₂` on `Z²` with the given `h`.
    pub fn genus_one(h: f64) -> Result<Self> {
        Self::new(h, SkewForm::standard(1))
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn sigma(&self) -> &SkewForm {
        &self.sigma
    }

    pub fn dim(&self) -> usize {
        self.sigma.dim()
    }

    fn check(&self, m: &LatticeVector) -> Result<()> {
        if m.dim() == self.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: m.dim(),
            })
        }
    }
}

impl Default for PhaseContext {
    fn default() -> Self {
        Self {
            h: 1.0,
            sigma: SkewForm::standard(1),
        }
    }
}

/// A finite combination `Σ α_m W_m` with `α_m` exact phase scalars.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AlgebraElement {
    dim: usize,
    support: BTreeMap<LatticeVector, PhaseScalar>,
}

impl AlgebraElement {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            support: BTreeMap::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scalar(dim, PhaseScalar::one())
    }

    pub fn scalar(dim: usize, c: PhaseScalar) -> Self {
        Self::term(LatticeVector::zero(dim), c)
    }

    /// `c · W_m` without a dimension check against any context.
    pub fn term(m: LatticeVector, c: PhaseScalar) -> Self {
        let mut a = Self::zero(m.dim());
        a.add_term(m, c);
        a
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&LatticeVector, &PhaseScalar)> {
        self.support.iter()
    }

    pub fn coefficient(&self, m: &LatticeVector) -> PhaseScalar {
        self.support.get(m).cloned().unwrap_or_default()
    }

    pub fn support_len(&self) -> usize {
        self.support.len()
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    pub fn add_term(&mut self, m: LatticeVector, c: PhaseScalar) {
        assert_eq!(m.dim(), self.dim, "lattice dimension mismatch");
        if c.is_zero() {
            return;
        }
        let slot = self.support.entry(m).or_default();
        *slot += c;
        if slot.is_zero() {
            self.support.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (m, c) in &other.support {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        Self {
            dim: self.dim,
            support: self
                .support
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &PhaseScalar) -> Result<Self> {
        let mut out = Self::zero(self.dim);
        for (m, x) in &self.support {
            out.add_term(m.clone(), x.checked_mul(c)?);
        }
        Ok(out)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            })
        }
    }
}

impl fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Canonical form: terms sorted by lattice index, then by ζ-exponent;
/// each written `c z^k * W[..]`. Parses back to the same element.
impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.support.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.support {
            for (k, coeff) in c.terms() {
                if !first {
                    write!(f, " + ")?;
                }
                first = false;
                write!(f, "{coeff}")?;
                if k != 0 {
                    write!(f, " z^{k}")?;
                }
                write!(f, " * W[")?;
                for (i, x) in m.coords().iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, "]")?;
            }
        }
        Ok(())
    }
}

/// `W_m`.
pub fn weyl(m: &LatticeVector, ctx: &PhaseContext) -> Result<AlgebraElement> {
    ctx.check(m)?;
    Ok(AlgebraElement::term(m.clone(), PhaseScalar::one()))
}

/// Twisted product, bilinear extension of `W_n W_m = ζ^{σ(n,m)} W_{n+m}`.
pub fn multiply(
    a: &AlgebraElement,
    b: &AlgebraElement,
    ctx: &PhaseContext,
) -> Result<AlgebraElement> {
    a.check_same(b)?;
    if a.dim != ctx.dim() {
        return Err(Error::DimensionMismatch {
            expected: ctx.dim(),
            found: a.dim,
        });
    }
    let mut out = AlgebraElement::zero(a.dim);
    for (n, x) in &a.support {
        for (m, y) in &b.support {
            let s = pairing(&ctx.sigma, n, m)?;
            let c = x.checked_mul(y)?.shift(s)?;
            out.add_term(n.checked_add(m)?, c);
        }
    }
    Ok(out)
}

/// Antilinear involution `(Σ α_m W_m)^* = Σ ᾱ_m W_{−m}`.
pub fn adjoint(a: &AlgebraElement) -> AlgebraElement {
    AlgebraElement {
        dim: a.dim,
        support: a
            .support
            .iter()
            .map(|(m, c)| (m.neg(), c.conj()))
            .collect(),
    }
}

/// `W_m ↦ W_{Θm}` for an arbitrary integer matrix. This is an automorphism
/// only when `Θ` is symplectic; see [`act`].
pub fn relabel(theta: &IntMatrix, a: &AlgebraElement) -> Result<AlgebraElement> {
    let mut out = AlgebraElement::zero(a.dim);
    for (m, c) in &a.support {
        out.add_term(theta.mul_vec(m)?, c.clone());
    }
    Ok(out)
}

/// `Φ_Θ`, after re-checking `ΘᵀΣΘ = Σ` against the context form.
pub fn act(theta: &SympMatrix, a: &AlgebraElement, ctx: &PhaseContext) -> Result<AlgebraElement> {
    if !is_symplectic(theta.matrix(), ctx.sigma())? {
        return Err(Error::NotSymplectic);
    }
    relabel(theta.matrix(), a)
}

/// `σ(m,n) + σ(m+n,g) = σ(m,n+g) + σ(n,g)`.
pub fn cocycle_check(
    m: &LatticeVector,
    n: &LatticeVector,
    g: &LatticeVector,
    ctx: &PhaseContext,
) -> Result<bool> {
    let s = ctx.sigma();
    let lhs = pairing(s, m, n)?.checked_add(pairing(s, &m.checked_add(n)?, g)?);
    let rhs = pairing(s, m, &n.checked_add(g)?)?.checked_add(pairing(s, n, g)?);
    match (lhs, rhs) {
        (Some(l), Some(r)) => Ok(l == r),
        _ => Err(Error::Overflow),
    }
}

/// Floating-point value of an exact coefficient at the context's `h`.
pub fn numeric_eval(s: &PhaseScalar, ctx: &PhaseContext) -> Complex64 {
    s.numeric_eval(ctx.h())
}

/// `Σ_j v_j W_{m_j}` with exact coefficients.
pub fn combination(
    gens: &[LatticeVector],
    coeffs: &[GaussianRational],
    ctx: &PhaseContext,
) -> Result<AlgebraElement> {
    if gens.len() != coeffs.len() {
        return Err(Error::DimensionMismatch {
            expected: gens.len(),
            found: coeffs.len(),
        });
    }
    let mut a = AlgebraElement::zero(ctx.dim());
    for (m, c) in gens.iter().zip(coeffs) {
        ctx.check(m)?;
        a.add_term(m.clone(), PhaseScalar::monomial(c.clone(), 0));
    }
    Ok(a)
}
