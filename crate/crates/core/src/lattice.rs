//! Integer symplectic linear algebra on `Z^{2g}`.
//!
//! Lattice points pair under an integer skew form `σ(m, n) = mᵀ Σ n`. For
//! genus one the canonical form is `σ₂(m, n) = m₁n₂ − m₂n₁`, i.e. the
//! matrix `[[0, 1], [−1, 0]]`; normal forms are block sums of multiples of it.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scalar type for lattice coordinates and form values.
pub type Int = i128;

pub(crate) fn add(a: Int, b: Int) -> Result<Int> {
    a.checked_add(b).ok_or(Error::Overflow)
}

pub(crate) fn sub(a: Int, b: Int) -> Result<Int> {
    a.checked_sub(b).ok_or(Error::Overflow)
}

pub(crate) fn mul(a: Int, b: Int) -> Result<Int> {
    a.checked_mul(b).ok_or(Error::Overflow)
}

/// A point of `Z^{2g}`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticeVector(Vec<Int>);

impl LatticeVector {
    /// Builds a vector; the number of coordinates must be even and non-zero.
    pub fn new(coords: Vec<Int>) -> Result<Self> {
        if coords.is_empty() || !coords.len().is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "lattice vectors need an even, positive number of coordinates, got {}",
                coords.len()
            )));
        }
        Ok(Self(coords))
    }

    pub fn pair(a: Int, b: Int) -> Self {
        Self(vec![a, b])
    }

    pub fn zero(dim: usize) -> Self {
        Self(vec![0; dim])
    }

    pub fn coords(&self) -> &[Int] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        self.0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| add(a, b))
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        self.0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| sub(a, b))
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }

    pub fn neg(&self) -> Self {
        Self(self.0.iter().map(|&c| -c).collect())
    }
}

impl fmt::Debug for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Dense square integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    n: usize,
    data: Vec<Int>,
}

impl IntMatrix {
    pub fn identity(n: usize) -> Self {
        let mut data = vec![0; n * n];
        for i in 0..n {
            data[i * n + i] = 1;
        }
        Self { n, data }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0; n * n],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Int>>) -> Result<Self> {
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

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Int {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Int) {
        self.data[i * self.n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<Int>> {
        self.data.chunks(self.n.max(1)).map(<[Int]>::to_vec).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn neg(&self) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|&x| -x).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        check_dim(self.n, other.n)?;
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc: Int = 0;
                for k in 0..n {
                    acc = add(acc, mul(self.get(i, k), other.get(k, j))?)?;
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &LatticeVector) -> Result<LatticeVector> {
        check_dim(self.n, v.dim())?;
        let mut out = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let mut acc: Int = 0;
            for (k, &c) in v.coords().iter().enumerate() {
                acc = add(acc, mul(self.get(i, k), c)?)?;
            }
            out.push(acc);
        }
        Ok(LatticeVector(out))
    }

    /// `Aᵀ B A`.
    pub fn congruence(&self, b: &Self) -> Result<Self> {
        self.transpose().mul(b)?.mul(self)
    }

    /// Fraction-free (Bareiss) determinant.
    pub fn det(&self) -> Result<Int> {
        let n = self.n;
        if n == 0 {
            return Ok(1);
        }
        let mut a = self.data.clone();
        let mut sign = 1;
        let mut prev: Int = 1;
        for k in 0..n - 1 {
            if a[k * n + k] == 0 {
                let Some(swap) = (k + 1..n).find(|&r| a[r * n + k] != 0) else {
                    return Ok(0);
                };
                for c in 0..n {
                    a.swap(k * n + c, swap * n + c);
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = sub(
                        mul(a[i * n + j], a[k * n + k])?,
                        mul(a[i * n + k], a[k * n + j])?,
                    )?;
                    a[i * n + j] = num / prev;
                }
            }
            prev = a[k * n + k];
        }
        Ok(sign * a[n * n - 1])
    }

    fn col_axpy(&mut self, target: usize, source: usize, c: Int) -> Result<()> {
        for r in 0..self.n {
            let v = add(self.get(r, target), mul(c, self.get(r, source))?)?;
            self.set(r, target, v);
        }
        Ok(())
    }

    fn row_axpy(&mut self, target: usize, source: usize, c: Int) -> Result<()> {
        for col in 0..self.n {
            let v = add(self.get(target, col), mul(c, self.get(source, col))?)?;
            self.set(target, col, v);
        }
        Ok(())
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for r in 0..self.n {
            self.data.swap(r * self.n + a, r * self.n + b);
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for c in 0..self.n {
            self.data.swap(a * self.n + c, b * self.n + c);
        }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.rows())
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.rows().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for (j, x) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// An integer skew-symmetric bilinear form on `Z^{2g}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkewForm {
    matrix: IntMatrix,
    genus: usize,
}

impl SkewForm {
    /// Validates skew-symmetry and even dimension. Degenerate forms are
    /// accepted here; see [`SkewForm::is_nondegenerate`].
    pub fn new(matrix: IntMatrix) -> Result<Self> {
        let n = matrix.dim();
        if n == 0 || !n.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "skew form needs even positive dimension, got {n}"
            )));
        }
        for i in 0..n {
            for j in 0..n {
                if matrix.get(i, j) != -matrix.get(j, i) {
                    return Err(Error::NotSkew);
                }
            }
        }
        Ok(Self {
            matrix,
            genus: n / 2,
        })
    }

    /// `σ₂ ⊕ … ⊕ σ₂` (g copies).
    pub fn standard(genus: usize) -> Self {
        Self::from_divisors(&vec![1; genus])
    }

    /// Block sum `δ₁σ₂ ⊕ … ⊕ δ_gσ₂`.
    pub fn from_divisors(divisors: &[Int]) -> Self {
        let n = 2 * divisors.len();
        let mut m = IntMatrix::zeros(n);
        for (k, &d) in divisors.iter().enumerate() {
            m.set(2 * k, 2 * k + 1, d);
            m.set(2 * k + 1, 2 * k, -d);
        }
        Self {
            matrix: m,
            genus: divisors.len(),
        }
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn dim(&self) -> usize {
        2 * self.genus
    }

    pub fn is_nondegenerate(&self) -> Result<bool> {
        Ok(self.matrix.det()? != 0)
    }
}

/// `σ(m, n) = mᵀ Σ n`.
pub fn pairing(form: &SkewForm, m: &LatticeVector, n: &LatticeVector) -> Result<Int> {
    check_dim(form.dim(), m.dim())?;
    check_dim(form.dim(), n.dim())?;
    if form.genus == 1 && form.matrix.get(0, 1) == 1 {
        let (m, n) = (m.coords(), n.coords());
        return sub(mul(m[0], n[1])?, mul(m[1], n[0])?);
    }
    let dim = form.dim();
    let mut acc: Int = 0;
    for i in 0..dim {
        if m.0[i] == 0 {
            continue;
        }
        for j in 0..dim {
            let s = form.matrix.get(i, j);
            if s != 0 && n.0[j] != 0 {
                acc = add(acc, mul(mul(m.0[i], s)?, n.0[j])?)?;
            }
        }
    }
    Ok(acc)
}

/// True iff `ΘᵀΣΘ = Σ`.
pub fn is_symplectic(theta: &IntMatrix, form: &SkewForm) -> Result<bool> {
    check_dim(form.dim(), theta.dim())?;
    Ok(theta.congruence(&form.matrix)? == form.matrix)
}

/// An integer matrix certified to preserve a skew form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SympMatrix(IntMatrix);

impl SympMatrix {
    pub fn certify(matrix: IntMatrix, form: &SkewForm) -> Result<Self> {
        if is_symplectic(&matrix, form)? {
            Ok(Self(matrix))
        } else {
            Err(Error::NotSymplectic)
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self(IntMatrix::identity(dim))
    }

    /// 2×2 matrix with determinant one (symplectic for any genus-one form).
    fn sl2(a: Int, b: Int, c: Int, d: Int) -> Result<Self> {
        let m = IntMatrix::from_rows(vec![vec![a, b], vec![c, d]])?;
        debug_assert_eq!(m.det(), Ok(1));
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.0
    }

    pub fn apply(&self, v: &LatticeVector) -> Result<LatticeVector> {
        self.0.mul_vec(v)
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        Ok(Self(self.0.mul(&other.0)?))
    }
}

impl fmt::Debug for SympMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl fmt::Display for SympMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// Symplectic divisors together with the basis change realising them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForm {
    pub divisors: Vec<Int>,
    /// Columns are the new basis: `UᵀΣU = ⊕ δ_iσ₂`.
    pub basis_change: IntMatrix,
}

/// Reduces a non-degenerate skew form to `⊕ δ_iσ₂` with `δ₁ | δ₂ | …`.
///
/// Alternating Smith elimination: the entry of least absolute value is moved
/// to the pivot slot of the current block, the rest of the two pivot rows is
/// cleared by Euclidean steps, and any remaining entry not divisible by the
/// pivot is folded back into the pivot row so the next round finds a smaller
/// pivot.
pub fn symplectic_normal_form(form: &SkewForm) -> Result<NormalForm> {
    if !form.is_nondegenerate()? {
        return Err(Error::DegenerateForm);
    }
    let n = form.dim();
    let mut a = form.matrix.clone();
    let mut u = IntMatrix::identity(n);
    let mut divisors = Vec::with_capacity(form.genus);

    // e_t <- e_t + c e_s
    let basis_add = |a: &mut IntMatrix, u: &mut IntMatrix, t: usize, s: usize, c: Int| -> Result<()> {
        a.col_axpy(t, s, c)?;
        a.row_axpy(t, s, c)?;
        u.col_axpy(t, s, c)
    };
    let basis_swap = |a: &mut IntMatrix, u: &mut IntMatrix, i: usize, j: usize| {
        if i != j {
            a.swap_cols(i, j);
            a.swap_rows(i, j);
            u.swap_cols(i, j);
        }
    };

    for block in 0..form.genus {
        let (x, y) = (2 * block, 2 * block + 1);
        loop {
            let mut best: Option<(usize, usize, Int)> = None;
            for i in x..n {
                for j in x..n {
                    let v = a.get(i, j);
                    if v != 0 && best.is_none_or(|(_, _, b)| v.abs() < b.abs()) {
                        best = Some((i, j, v));
                    }
                }
            }
            let Some((i, j, _)) = best else {
                return Err(Error::DegenerateForm);
            };
            // move (i, j) to (x, y)
            if j == x {
                basis_swap(&mut a, &mut u, i, y);
                basis_swap(&mut a, &mut u, x, y);
            } else {
                basis_swap(&mut a, &mut u, i, x);
                basis_swap(&mut a, &mut u, j, y);
            }
            let p = a.get(x, y);
            debug_assert_ne!(p, 0);

            let mut clean = true;
            for t in y + 1..n {
                let q = a.get(x, t).div_euclid(p);
                if q != 0 {
                    // A[x][t] -= q A[x][y]
                    basis_add(&mut a, &mut u, t, y, -q)?;
                }
                let q = a.get(y, t).div_euclid(p);
                if q != 0 {
                    // A[y][t] += q A[y][x] = A[y][t] - q p
                    basis_add(&mut a, &mut u, t, x, q)?;
                }
                if a.get(x, t) != 0 || a.get(y, t) != 0 {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            let bad = (y + 1..n)
                .flat_map(|s| (y + 1..n).map(move |t| (s, t)))
                .find(|&(s, t)| a.get(s, t) % p != 0);
            match bad {
                Some((s, _)) => basis_add(&mut a, &mut u, x, s, 1)?,
                None => {
                    if p < 0 {
                        basis_swap(&mut a, &mut u, x, y);
                    }
                    divisors.push(a.get(x, y));
                    break;
                }
            }
        }
    }
    Ok(NormalForm {
        divisors,
        basis_change: u,
    })
}

/// Returns `(g, x, y)` with `g = gcd(a, b) > 0` and `ax + by = g`.
pub fn extended_gcd(a: Int, b: Int) -> Result<(Int, Int, Int)> {
    if a == 0 && b == 0 {
        return Err(Error::ZeroGcd);
    }
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1, 0);
    let (mut old_t, mut t) = (0, 1);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        Ok((-old_r, -old_s, -old_t))
    } else {
        Ok((old_r, old_s, old_t))
    }
}

/// Non-negative gcd with `gcd(0, 0) = 0`.
pub fn gcd(a: Int, b: Int) -> Int {
    extended_gcd(a, b).map(|(g, _, _)| g).unwrap_or(0)
}

fn require_pair(v: &LatticeVector) -> Result<(Int, Int)> {
    match v.coords() {
        [a, b] => Ok((*a, *b)),
        other => Err(Error::GenusNotOne(other.len())),
    }
}

/// Canonical orbit representative `(0, gcd(n₁, n₂))` with an SL(2, Z) witness.
pub fn orbit_rep(n: &LatticeVector) -> Result<(LatticeVector, SympMatrix)> {
    let (n1, n2) = require_pair(n)?;
    if n1 == 0 && n2 == 0 {
        return Ok((n.clone(), SympMatrix::identity(2)));
    }
    let (g, _, _) = extended_gcd(n1, n2)?;
    let (e1, e2) = (n1 / g, n2 / g);
    let (_, x, y) = extended_gcd(e1, e2)?;
    let theta = SympMatrix::sl2(e2, -e1, x, y)?;
    let rep = theta.apply(n)?;
    debug_assert_eq!(rep, LatticeVector::pair(0, g));
    Ok((rep, theta))
}

/// Representative `(j, j)` of the orbit of `n`, with `j = gcd(n₁, n₂)`.
pub fn diag_rep(n: &LatticeVector) -> Result<(LatticeVector, SympMatrix)> {
    let (rep, theta) = orbit_rep(n)?;
    if rep.is_zero() {
        return Ok((rep, theta));
    }
    let shear = SympMatrix::sl2(1, 1, 0, 1)?;
    let theta = shear.compose(&theta)?;
    let rep = shear.apply(&rep)?;
    Ok((rep, theta))
}

/// Member `Θ_j` of the family `G_{m,n}`:
/// `[[1, (m/n)j], [0, 1]] · [[1, 0], [n−1, 1]]`.
pub fn theta_j(m: Int, n: Int, j: Int) -> Result<SympMatrix> {
    if n < 1 {
        return Err(Error::InvalidFamily(format!("n must be >= 1, got {n}")));
    }
    if m % n != 0 {
        return Err(Error::InvalidFamily(format!("{n} does not divide {m}")));
    }
    let r = mul(m / n, j)?;
    let top_left = add(1, mul(r, n - 1)?)?;
    SympMatrix::sl2(top_left, r, n - 1, 1)
}
