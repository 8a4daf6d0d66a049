//! Exact complex linear algebra for dimensions 2 and 3.
//!
//! Everything here is value-typed and allocation free: a [`ComplexMatrix`]
//! stores its entries inline in a 3×3 array and tracks the active dimension.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Tolerance for accepting a matrix as Hermitian, relative to `max(1, max|m_ij|)`.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Tolerance for accepting a matrix as unitary in [`unitary_log`].
pub const UNITARY_TOL: f64 = 1e-10;
/// Eigenphases within this distance of `-π` are rejected by [`unitary_log`].
pub const BRANCH_TOL: f64 = 1e-9;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, Copy, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: [[C64; 3]; 3],
}

impl ComplexMatrix {
    /// Panics unless `dim` is 2 or 3.
    pub fn zeros(dim: usize) -> Self {
        assert!(
            dim == 2 || dim == 3,
            "ComplexMatrix supports dim 2 or 3, got {dim}"
        );
        ComplexMatrix {
            dim,
            data: [[ZERO; 3]; 3],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.data[i][j] = f(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: &[&[C64]]) -> Result<Self> {
        let dim = rows.len();
        if !(dim == 2 || dim == 3) {
            return Err(Error::Dimension {
                expected: "2 or 3",
                found: dim,
            });
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::Dimension {
                expected: "square rows",
                found: bad.len(),
            });
        }
        Ok(Self::from_fn(dim, |i, j| rows[i][j]))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        let dim = diag.len();
        if !(dim == 2 || dim == 3) {
            return Err(Error::Dimension {
                expected: "2 or 3",
                found: dim,
            });
        }
        Ok(Self::from_fn(dim, |i, j| {
            if i == j {
                C64::new(diag[i], 0.0)
            } else {
                ZERO
            }
        }))
    }

    /// `|ket⟩⟨bra|` for standard basis indices.
    pub fn basis_outer(dim: usize, ket: usize, bra: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == ket && j == bra { ONE } else { ZERO })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.data[j][i].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.data[i][i]).sum()
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self.data[i][j]).collect()
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(
            v.len(),
            self.dim,
            "vector length does not match matrix dimension"
        );
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.data[i][j] * v[j]).sum())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }

    /// `max|M - M†|`.
    pub fn hermiticity_error(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// `max|U†U - I|`.
    pub fn unitarity_error(&self) -> f64 {
        (self.adjoint() * *self).max_abs_diff(&Self::identity(self.dim))
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_error() <= HERMITIAN_TOL * self.max_abs().max(1.0)
    }

    /// Returns `(M + M†)/2`.
    pub fn hermitian_part(&self) -> Self {
        (*self + self.adjoint()) * 0.5
    }

    fn entries(&self) -> impl Iterator<Item = C64> + '_ {
        (0..self.dim).flat_map(move |i| (0..self.dim).map(move |j| self.data[i][j]))
    }

    fn ensure_hermitian(&self) -> Result<()> {
        let deviation = self.hermiticity_error();
        if deviation > HERMITIAN_TOL * self.max_abs().max(1.0) {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(())
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<C64>> = (0..self.dim)
            .map(|i| self.data[i][..self.dim].to_vec())
            .collect();
        f.debug_struct("ComplexMatrix")
            .field("dim", &self.dim)
            .field("rows", &rows)
            .finish()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        assert!(
            i < self.dim && j < self.dim,
            "index ({i}, {j}) out of range"
        );
        &self.data[i][j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        assert!(
            i < self.dim && j < self.dim,
            "index ({i}, {j}) out of range"
        );
        &mut self.data[i][j]
    }
}

impl Add for ComplexMatrix {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        Self::from_fn(self.dim, |i, j| self.data[i][j] + rhs.data[i][j])
    }
}

impl Sub for ComplexMatrix {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        Self::from_fn(self.dim, |i, j| self.data[i][j] - rhs.data[i][j])
    }
}

impl Neg for ComplexMatrix {
    type Output = Self;
    fn neg(self) -> Self {
        self * -1.0
    }
}

impl Mul for ComplexMatrix {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        Self::from_fn(n, |i, j| {
            (0..n).map(|k| self.data[i][k] * rhs.data[k][j]).sum()
        })
    }
}

impl Mul<f64> for ComplexMatrix {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        Self::from_fn(self.dim, |i, j| self.data[i][j] * rhs)
    }
}

impl Mul<C64> for ComplexMatrix {
    type Output = Self;
    fn mul(self, rhs: C64) -> Self {
        Self::from_fn(self.dim, |i, j| self.data[i][j] * rhs)
    }
}

pub fn pauli_i() -> ComplexMatrix {
    ComplexMatrix::identity(2)
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_fn(2, |i, j| if i != j { ONE } else { ZERO })
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_fn(2, |i, j| match (i, j) {
        (0, 1) => -I,
        (1, 0) => I,
        _ => ZERO,
    })
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_fn(2, |i, j| match (i, j) {
        (0, 0) => ONE,
        (1, 1) => -ONE,
        _ => ZERO,
    })
}

/// Coefficients of a 2×2 Hermitian operator in the basis `{I, X, Y, Z}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliCoeffs {
    pub c_i: f64,
    pub c_x: f64,
    pub c_y: f64,
    pub c_z: f64,
}

impl PauliCoeffs {
    pub fn new(c_i: f64, c_x: f64, c_y: f64, c_z: f64) -> Self {
        PauliCoeffs { c_i, c_x, c_y, c_z }
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        pauli_i() * self.c_i + pauli_x() * self.c_x + pauli_y() * self.c_y + pauli_z() * self.c_z
    }

    /// `(2c_X, 2c_Y, 2c_Z)`: the Bloch vector of a density matrix, or the
    /// Rabi vector of a Hamiltonian.
    pub fn vector(&self) -> [f64; 3] {
        [2.0 * self.c_x, 2.0 * self.c_y, 2.0 * self.c_z]
    }
}

/// `c_K = Tr(op·K)/2` for `K ∈ {I, X, Y, Z}`.
pub fn pauli_decompose(op: &ComplexMatrix) -> Result<PauliCoeffs> {
    if op.dim() != 2 {
        return Err(Error::Dimension {
            expected: "2",
            found: op.dim(),
        });
    }
    op.ensure_hermitian()?;
    let coeff = |k: ComplexMatrix| 0.5 * (*op * k).trace().re;
    Ok(PauliCoeffs {
        c_i: coeff(pauli_i()),
        c_x: coeff(pauli_x()),
        c_y: coeff(pauli_y()),
        c_z: coeff(pauli_z()),
    })
}

/// Spectrum of a Hermitian matrix: ascending eigenvalues with the matching
/// orthonormal eigenvectors stored as columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEigen> {
    m.ensure_hermitian()?;
    let (values, vectors) = jacobi_eigh(&m.hermitian_part())?;
    Ok(HermitianEigen { values, vectors })
}

/// Cyclic complex Jacobi. Each rotation first removes the phase of the
/// pivot, then applies a real symmetric Schur rotation.
fn jacobi_eigh(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let n = m.dim();
    let mut a = *m;
    let mut v = ComplexMatrix::identity(n);
    let scale: f64 = a.entries().map(|z| z.norm_sqr()).sum();

    let mut converged = false;
    for _ in 0..64 {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)].norm_sqr())
            .sum();
        if off <= f64::EPSILON.powi(2) * scale * 1e-4 || off == 0.0 {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                let phase = C64::from_polar(1.0, -apq.arg());
                let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                let mut g = ComplexMatrix::identity(n);
                g[(p, p)] = C64::new(c, 0.0);
                g[(p, q)] = C64::new(s, 0.0);
                g[(q, p)] = phase * -s;
                g[(q, q)] = phase * c;

                a = g.adjoint() * a * g;
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                v = v * g;
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, |i, j| v[(i, order[j])]);
    Ok((values, vectors))
}

fn spectral(vectors: &ComplexMatrix, f: impl Fn(usize) -> C64) -> ComplexMatrix {
    let n = vectors.dim();
    ComplexMatrix::from_fn(n, |i, j| {
        (0..n)
            .map(|k| vectors[(i, k)] * f(k) * vectors[(j, k)].conj())
            .sum()
    })
}

/// `exp(-i·h·t)` for Hermitian `h`.
///
/// Dimension 2 uses the spectral projectors `(I ± n̂·σ)/2` of `h = c₀I + n·σ`
/// directly; dimension 3 goes through [`hermitian_eig`].
pub fn mat_exp_i(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    h.ensure_hermitian()?;
    if h.dim() == 2 {
        let c = pauli_decompose(h)?;
        return Ok(su2_exp(&c, t));
    }
    let eig = hermitian_eig(h)?;
    Ok(spectral(&eig.vectors, |k| {
        C64::from_polar(1.0, -eig.values[k] * t)
    }))
}

/// `exp(-i t (c_I I + c_X X + c_Y Y + c_Z Z))`.
pub(crate) fn su2_exp(c: &PauliCoeffs, t: f64) -> ComplexMatrix {
    let global = C64::from_polar(1.0, -c.c_i * t);
    let r = (c.c_x * c.c_x + c.c_y * c.c_y + c.c_z * c.c_z).sqrt();
    if r == 0.0 {
        return pauli_i() * global;
    }
    let (sn, cs) = (r * t).sin_cos();
    let (nx, ny, nz) = (c.c_x / r, c.c_y / r, c.c_z / r);
    // cos(rt) I - i sin(rt) n̂·σ
    let m = ComplexMatrix::from_fn(2, |i, j| match (i, j) {
        (0, 0) => C64::new(cs, -sn * nz),
        (1, 1) => C64::new(cs, sn * nz),
        (0, 1) => C64::new(-sn * ny, -sn * nx),
        _ => C64::new(sn * ny, -sn * nx),
    });
    m * global
}

#[cfg(test)]
pub(crate) fn mat_exp_i_eig(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(h)?;
    Ok(spectral(&eig.vectors, |k| {
        C64::from_polar(1.0, -eig.values[k] * t)
    }))
}

/// Principal logarithm: Hermitian `A` with `u = exp(iA)` and eigenphases in `(-π, π]`.
///
/// An eigenvalue equal to `-1` (to 1e-12) takes the phase `+π`. Any other
/// eigenphase within [`BRANCH_TOL`] of `-π` is ambiguous and rejected.
pub fn unitary_log(u: &ComplexMatrix) -> Result<ComplexMatrix> {
    let deviation = u.unitarity_error();
    if deviation > UNITARY_TOL {
        return Err(Error::NotUnitary { deviation });
    }
    let vectors = unitary_eigenvectors(u)?;
    let diag = vectors.adjoint() * *u * vectors;

    let mut phases = Vec::with_capacity(u.dim());
    for k in 0..u.dim() {
        let lambda = diag[(k, k)];
        let phase = if (lambda + ONE).norm() <= 1e-12 {
            std::f64::consts::PI
        } else {
            lambda.arg()
        };
        if phase <= -std::f64::consts::PI + BRANCH_TOL {
            return Err(Error::BranchCut { phase });
        }
        phases.push(phase);
    }
    Ok(spectral(&vectors, |k| C64::new(phases[k], 0.0)).hermitian_part())
}

/// A unitary is normal, so its Hermitian and anti-Hermitian parts commute and
/// a generic real combination of them shares its eigenvectors. The mixing
/// coefficient is retried if two distinct eigenvalues happen to collide.
fn unitary_eigenvectors(u: &ComplexMatrix) -> Result<ComplexMatrix> {
    let re = u.hermitian_part();
    let im = (*u - u.adjoint()) * C64::new(0.0, -0.5);
    for mix in [
        0.577_215_664_9,
        1.618_033_988_7,
        -0.414_213_562_4,
        2.236_067_977_5,
    ] {
        let (_, vectors) = jacobi_eigh(&(re + im * mix))?;
        let d = vectors.adjoint() * *u * vectors;
        let n = u.dim();
        let off = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .map(|(i, j)| d[(i, j)].norm())
            .fold(0.0, f64::max);
        if off <= 1e-11 {
            return Ok(vectors);
        }
    }
    Err(Error::NoConvergence)
}
