//! Dense complex matrices, state vectors, and the fixed gate set.
//!
//! Everything here is double precision and unapologetically O(n^2)/O(n^3);
//! registers are capped at a handful of qubits so dense algebra is the
//! simplest correct tool.

use num_complex::Complex64;
use std::fmt;

pub const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const C_ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Square complex matrix in row-major storage.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        CMatrix {
            dim,
            data: vec![C_ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = CMatrix::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = C_ONE;
        }
        m
    }

    /// Build from rows of real/imaginary pairs is overkill; rows of complex
    /// entries is what the call sites want.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            assert_eq!(row.len(), dim, "rows must form a square matrix");
            data.extend_from_slice(row);
        }
        CMatrix { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn at_mut(&mut self, row: usize, col: usize) -> &mut Complex64 {
        &mut self.data[row * self.dim + col]
    }

    pub fn matmul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == C_ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        let mut out = self.clone();
        for (o, r) in out.data.iter_mut().zip(rhs.data.iter()) {
            *o += r;
        }
        out
    }

    pub fn sub(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        let mut out = self.clone();
        for (o, r) in out.data.iter_mut().zip(rhs.data.iter()) {
            *o -= r;
        }
        out
    }

    pub fn scale(&self, factor: Complex64) -> CMatrix {
        let mut out = self.clone();
        for v in out.data.iter_mut() {
            *v *= factor;
        }
        out
    }

    pub fn scale_re(&self, factor: f64) -> CMatrix {
        self.scale(Complex64::new(factor, 0.0))
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> CMatrix {
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    /// Tensor product; the left operand is the more significant factor.
    pub fn kron(&self, rhs: &CMatrix) -> CMatrix {
        let (na, nb) = (self.dim, rhs.dim);
        let n = na * nb;
        let mut out = CMatrix::zeros(n);
        for ia in 0..na {
            for ja in 0..na {
                let a = self.data[ia * na + ja];
                if a == C_ZERO {
                    continue;
                }
                for ib in 0..nb {
                    for jb in 0..nb {
                        out.data[(ia * nb + ib) * n + (ja * nb + jb)] = a * rhs.data[ib * nb + jb];
                    }
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    pub fn max_abs_diff(&self, rhs: &CMatrix) -> f64 {
        assert_eq!(self.dim, rhs.dim);
        self.data
            .iter()
            .zip(rhs.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let n = self.dim;
        for i in 0..n {
            for j in i..n {
                if (self.data[i * n + j] - self.data[j * n + i].conj()).norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.dagger()
            .matmul(self)
            .max_abs_diff(&CMatrix::identity(self.dim))
            <= tol
    }

    /// Eigenvalues of a Hermitian matrix by cyclic Jacobi rotations.
    ///
    /// Panics if called on a visibly non-Hermitian matrix; intended for
    /// validity checks, not as a general eigensolver.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        assert!(
            self.is_hermitian(1e-9 * (1.0 + self.max_abs())),
            "hermitian_eigenvalues needs a Hermitian input"
        );
        let n = self.dim;
        let mut a = self.clone();
        for _sweep in 0..60 {
            let mut off = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a.at(p, q).norm_sqr();
                }
            }
            if off.sqrt() < 1e-14 * (1.0 + a.max_abs()) {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a.at(p, q);
                    if apq.norm() < 1e-300 {
                        continue;
                    }
                    let app = a.at(p, p).re;
                    let aqq = a.at(q, q).re;
                    let phase = apq / apq.norm();
                    let tau = (aqq - app) / (2.0 * apq.norm());
                    let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    // Columns: col_p' = c*col_p - s*conj(phase)*col_q, col_q' = s*phase*col_p + c*col_q.
                    for i in 0..n {
                        let aip = a.at(i, p);
                        let aiq = a.at(i, q);
                        *a.at_mut(i, p) = aip * c - aiq * phase.conj() * s;
                        *a.at_mut(i, q) = aip * phase * s + aiq * c;
                    }
                    for j in 0..n {
                        let apj = a.at(p, j);
                        let aqj = a.at(q, j);
                        *a.at_mut(p, j) = apj * c - aqj * phase * s;
                        *a.at_mut(q, j) = apj * phase.conj() * s + aqj * c;
                    }
                }
            }
        }
        let mut eigs: Vec<f64> = (0..n).map(|i| a.at(i, i).re).collect();
        eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
        eigs
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.hermitian_eigenvalues()[0]
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix dim={}", self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let v = self.at(i, j);
                    format!("{:+.4}{:+.4}i", v.re, v.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Complex column vector (pure state amplitudes).
#[derive(Clone, Debug, PartialEq)]
pub struct CVector {
    pub data: Vec<Complex64>,
}

impl CVector {
    pub fn new(data: Vec<Complex64>) -> Self {
        CVector { data }
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut data = vec![C_ZERO; dim];
        data[index] = C_ONE;
        CVector { data }
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn kron(&self, rhs: &CVector) -> CVector {
        let mut data = Vec::with_capacity(self.data.len() * rhs.data.len());
        for a in &self.data {
            for b in &rhs.data {
                data.push(a * b);
            }
        }
        CVector { data }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> CVector {
        let norm = self.norm_sqr().sqrt();
        CVector {
            data: self.data.iter().map(|v| v / norm).collect(),
        }
    }

    /// Outer product |v><v|.
    pub fn outer(&self) -> CMatrix {
        let n = self.data.len();
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                *m.at_mut(i, j) = self.data[i] * self.data[j].conj();
            }
        }
        m
    }

    /// <self|rhs>.
    pub fn inner(&self, rhs: &CVector) -> Complex64 {
        self.data
            .iter()
            .zip(rhs.data.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// The fixed gate set: Paulis, the Hadamard used by the swap circuit,
/// CPHASE and friends.
pub mod gates {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    pub fn pauli_x() -> CMatrix {
        CMatrix::from_rows(&[vec![C_ZERO, C_ONE], vec![C_ONE, C_ZERO]])
    }

    pub fn pauli_y() -> CMatrix {
        CMatrix::from_rows(&[
            vec![C_ZERO, Complex64::new(0.0, -1.0)],
            vec![Complex64::new(0.0, 1.0), C_ZERO],
        ])
    }

    pub fn pauli_z() -> CMatrix {
        CMatrix::from_rows(&[
            vec![C_ONE, C_ZERO],
            vec![C_ZERO, Complex64::new(-1.0, 0.0)],
        ])
    }

    /// Hadamard. Equal (to machine precision) to sigma_z * exp(i pi/4 sigma_y),
    /// the form in which the swap circuit's one-qubit layer is specified.
    pub fn hadamard() -> CMatrix {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        CMatrix::from_rows(&[vec![h, h], vec![h, -h]])
    }

    /// CPHASE = exp(i pi |11><11|) = diag(1, 1, 1, -1).
    pub fn cphase() -> CMatrix {
        cphase_with_phase(0.0)
    }

    /// CPHASE with an extra phase on the |11> component:
    /// diag(1, 1, 1, -exp(i phi)).
    pub fn cphase_with_phase(phi: f64) -> CMatrix {
        let mut m = CMatrix::identity(4);
        *m.at_mut(3, 3) = -Complex64::from_polar(1.0, phi);
        m
    }

    /// Non-unitary CPHASE with leakage, the analytic continuation of the
    /// gate phase by i*gamma: diag(1, 1, 1, -exp(i phi - gamma)). The |11>
    /// population decays by exp(-2 gamma) per gate.
    pub fn cphase_leaky(phi: f64, gamma: f64) -> CMatrix {
        let mut m = CMatrix::identity(4);
        *m.at_mut(3, 3) = -Complex64::from_polar((-gamma).exp(), phi);
        m
    }

    /// CNOT with the first (more significant) qubit as control.
    pub fn cnot() -> CMatrix {
        CMatrix::from_rows(&[
            vec![C_ONE, C_ZERO, C_ZERO, C_ZERO],
            vec![C_ZERO, C_ONE, C_ZERO, C_ZERO],
            vec![C_ZERO, C_ZERO, C_ZERO, C_ONE],
            vec![C_ZERO, C_ZERO, C_ONE, C_ZERO],
        ])
    }

    /// Rotation about x: exp(-i theta sigma_x / 2).
    pub fn rx(theta: f64) -> CMatrix {
        let c = Complex64::new((theta / 2.0).cos(), 0.0);
        let s = Complex64::new(0.0, -(theta / 2.0).sin());
        CMatrix::from_rows(&[vec![c, s], vec![s, c]])
    }

    pub fn pauli(alpha: usize) -> CMatrix {
        match alpha {
            0 => CMatrix::identity(2),
            1 => pauli_x(),
            2 => pauli_y(),
            3 => pauli_z(),
            _ => panic!("pauli index must be in 0..4"),
        }
    }
}
