//! Dense square matrices over `*`-rings, quadratic forms, determinants and
//! positivity tests (numeric and exact).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::{GaussianRational, PhaseScalar};

/// Matrix entry with a conjugation.
pub trait Entry:
    Clone
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn conj(&self) -> Self;
    fn from_rational(r: &BigRational) -> Self;
    /// Rough size, used only for reporting.
    fn magnitude(&self) -> f64;
}

/// Exact field whose self-adjoint elements have a decidable sign.
pub trait ExactField: Entry + Div<Output = Self> {
    /// Sign of the real part.
    fn real_sign(&self) -> Ordering;
}

impl Entry for Complex64 {
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn from_rational(r: &BigRational) -> Self {
        Complex64::new(r.to_f64().unwrap_or(f64::NAN), 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl Entry for BigRational {
    fn conj(&self) -> Self {
        self.clone()
    }
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }
    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }
}

impl ExactField for BigRational {
    fn real_sign(&self) -> Ordering {
        self.cmp(&BigRational::zero())
    }
}

impl Entry for GaussianRational {
    fn conj(&self) -> Self {
        GaussianRational::conj(self)
    }
    fn from_rational(r: &BigRational) -> Self {
        GaussianRational::real(r.clone())
    }
    fn magnitude(&self) -> f64 {
        self.to_complex().norm()
    }
}

impl ExactField for GaussianRational {
    fn real_sign(&self) -> Ordering {
        self.re.cmp(&BigRational::zero())
    }
}

impl Entry for PhaseScalar {
    fn conj(&self) -> Self {
        PhaseScalar::conj(self)
    }
    fn from_rational(r: &BigRational) -> Self {
        PhaseScalar::from_rational(r.clone())
    }
    fn magnitude(&self) -> f64 {
        self.terms().map(|(_, c)| c.to_complex().norm()).sum()
    }
}

/// Square matrix intended to be Hermitian; numeric by default.
#[derive(Clone, PartialEq)]
pub struct HermitianMatrix<T = Complex64> {
    n: usize,
    data: Vec<T>,
}

impl<T: Entry> HermitianMatrix<T> {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Self { n, data })
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.data
            .chunks(self.n.max(1))
            .map(<[T]>::to_vec)
            .collect()
    }

    pub fn map<U: Entry>(&self, f: impl Fn(&T) -> U) -> HermitianMatrix<U> {
        HermitianMatrix {
            n: self.n,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Exact test of `H = H^†`.
    pub fn is_hermitian(&self) -> bool {
        (0..self.n).all(|i| (i..self.n).all(|j| *self.get(i, j) == self.get(j, i).conj()))
    }

    /// `v̄ᵀ H v`.
    pub fn quadratic_form(&self, v: &[T]) -> Result<T> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: v.len(),
            });
        }
        let mut acc = T::zero();
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            let ci = vi.conj();
            for (j, vj) in v.iter().enumerate() {
                if vj.is_zero() {
                    continue;
                }
                acc = acc + ci.clone() * self.get(i, j).clone() * vj.clone();
            }
        }
        Ok(acc)
    }

    /// Entrywise arithmetic mean.
    pub fn average(matrices: &[Self]) -> Result<Self> {
        let first = matrices.first().ok_or(Error::Empty("matrix list"))?;
        let n = first.n;
        let mut sum = Self::from_fn(n, |_, _| T::zero());
        for m in matrices {
            if m.n != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: m.n,
                });
            }
            for (s, x) in sum.data.iter_mut().zip(&m.data) {
                *s = s.clone() + x.clone();
            }
        }
        let inv = T::from_rational(&BigRational::new(1.into(), matrices.len().into()));
        for s in &mut sum.data {
            *s = s.clone() * inv.clone();
        }
        Ok(sum)
    }
}

impl<T: ExactField> HermitianMatrix<T> {
    /// Determinant by Gaussian elimination over the exact field.
    pub fn det_exact(&self) -> T {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = T::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&r| !a[r * n + k].is_zero()) else {
                return T::zero();
            };
            if p != k {
                for c in 0..n {
                    a.swap(k * n + c, p * n + c);
                }
                det = -det;
            }
            let pivot = a[k * n + k].clone();
            det = det * pivot.clone();
            for r in k + 1..n {
                if a[r * n + k].is_zero() {
                    continue;
                }
                let f = a[r * n + k].clone() / pivot.clone();
                for c in k..n {
                    let v = a[r * n + c].clone() - f.clone() * a[k * n + c].clone();
                    a[r * n + c] = v;
                }
            }
        }
        det
    }
}

impl HermitianMatrix<Complex64> {
    /// Largest `|H_ij − conj(H_ji)|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.n {
            for j in i..self.n {
                dev = dev.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        dev
    }

    /// `max_ij |A_ij − B_ij|`.
    pub fn max_distance(&self, other: &Self) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.n, self.n, &self.data)
    }

    pub fn det(&self) -> Complex64 {
        self.to_nalgebra().determinant()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.to_nalgebra().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

impl<T: Entry + fmt::Debug> fmt::Debug for HermitianMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

/// Real part of `v̄ᵀ H v`.
pub fn quadratic_form(h: &HermitianMatrix, v: &[Complex64]) -> Result<f64> {
    Ok(h.quadratic_form(v)?.re)
}

#[derive(Clone, Debug, PartialEq)]
pub enum PsdVerdict {
    Psd { min_eigenvalue: f64 },
    /// Unit vector `v` with `v̄ᵀHv = value < −tol`.
    Witness { vector: Vec<Complex64>, value: f64 },
}

impl PsdVerdict {
    pub fn is_psd(&self) -> bool {
        matches!(self, Self::Psd { .. })
    }
}

/// Eigenvalue-based positivity test. Fails if `H` is not Hermitian to within
/// `tol` (scaled by the largest entry).
pub fn is_psd(h: &HermitianMatrix, tol: f64) -> Result<PsdVerdict> {
    let scale = h.data.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let dev = h.hermitian_deviation();
    if dev > tol * scale {
        return Err(Error::NotHermitian(dev));
    }
    if h.n == 0 {
        return Ok(PsdVerdict::Psd {
            min_eigenvalue: f64::INFINITY,
        });
    }
    // symmetrise before decomposing
    let m = h.to_nalgebra();
    let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = m.symmetric_eigen();
    let (idx, &lambda) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty spectrum");
    if lambda >= -tol {
        return Ok(PsdVerdict::Psd {
            min_eigenvalue: lambda,
        });
    }
    let vector: Vec<Complex64> = eig.eigenvectors.column(idx).iter().copied().collect();
    let value = quadratic_form(h, &vector)?;
    if value < -tol {
        Ok(PsdVerdict::Witness { vector, value })
    } else {
        // roundoff pushed the Rayleigh quotient back above −tol
        Ok(PsdVerdict::Psd {
            min_eigenvalue: lambda,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExactPsdVerdict<T> {
    Psd,
    /// `v̄ᵀHv = value < 0` exactly.
    Witness { vector: Vec<T>, value: T },
}

/// Exact positivity test by pivoted congruence elimination.
///
/// Maintains `A = TᴴHT` while clearing one pivot row and column at a time;
/// any negative diagonal entry of `A`, or a zero diagonal entry with a
/// non-zero off-diagonal partner, yields a witness mapped back through `T`.
pub fn is_psd_exact<T: ExactField>(h: &HermitianMatrix<T>) -> Result<ExactPsdVerdict<T>> {
    if !h.is_hermitian() {
        let dev = (0..h.n)
            .flat_map(|i| (0..h.n).map(move |j| (i, j)))
            .map(|(i, j)| (h.get(i, j).clone() - h.get(j, i).conj()).magnitude())
            .fold(0.0, f64::max);
        return Err(Error::NotHermitian(dev));
    }
    let n = h.n;
    let mut a = h.clone();
    let mut t = HermitianMatrix::<T>::identity(n);
    let mut remaining: Vec<usize> = (0..n).collect();

    let column = |t: &HermitianMatrix<T>, k: usize| -> Vec<T> {
        (0..n).map(|r| t.get(r, k).clone()).collect()
    };

    while !remaining.is_empty() {
        if let Some(&k) = remaining
            .iter()
            .find(|&&k| a.get(k, k).real_sign() == Ordering::Less)
        {
            return Ok(ExactPsdVerdict::Witness {
                vector: column(&t, k),
                value: a.get(k, k).clone(),
            });
        }
        let Some(pos) = remaining
            .iter()
            .position(|&k| a.get(k, k).real_sign() == Ordering::Greater)
        else {
            // all remaining diagonal entries vanish
            for &k in &remaining {
                for &j in &remaining {
                    if j == k || a.get(k, j).is_zero() {
                        continue;
                    }
                    let akj = a.get(k, j).clone();
                    let norm = akj.clone() * akj.conj();
                    let two = T::one() + T::one();
                    let s = -(akj / (two * norm));
                    let vector: Vec<T> = (0..n)
                        .map(|r| s.clone() * t.get(r, k).clone() + t.get(r, j).clone())
                        .collect();
                    let value = h.quadratic_form(&vector)?;
                    debug_assert!(value.real_sign() == Ordering::Less);
                    return Ok(ExactPsdVerdict::Witness { vector, value });
                }
            }
            return Ok(ExactPsdVerdict::Psd);
        };
        let k = remaining.remove(pos);
        let pivot = a.get(k, k).clone();
        for &j in &remaining {
            if a.get(k, j).is_zero() {
                continue;
            }
            let c = a.get(k, j).clone() / pivot.clone();
            let cc = c.conj();
            for r in 0..n {
                let v = a.get(r, j).clone() - c.clone() * a.get(r, k).clone();
                a.set(r, j, v);
            }
            for col in 0..n {
                let v = a.get(j, col).clone() - cc.clone() * a.get(k, col).clone();
                a.set(j, col, v);
            }
            for r in 0..n {
                let v = t.get(r, j).clone() - c.clone() * t.get(r, k).clone();
                t.set(r, j, v);
            }
        }
    }
    Ok(ExactPsdVerdict::Psd)
}
