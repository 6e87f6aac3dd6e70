//! The two-bit Pauli index used by the completion gate, and the Bell basis
//! it generates.

use crate::cmatrix::{gates, CMatrix, CVector, C_ZERO};
use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

/// Index (i, j) into the Pauli table
/// sigma_{0,0} = 1, sigma_{0,1} = sigma_x, sigma_{1,0} = sigma_z,
/// sigma_{1,1} = -i sigma_y.
///
/// The first bit is the phase-flip part, the second the bit-flip part;
/// composition is bitwise xor (phases are irrelevant under conjugation).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliIndex {
    pub i: u8,
    pub j: u8,
}

impl PauliIndex {
    pub const IDENTITY: PauliIndex = PauliIndex { i: 0, j: 0 };

    pub fn new(i: u8, j: u8) -> Self {
        assert!(i <= 1 && j <= 1, "PauliIndex bits must be 0 or 1");
        PauliIndex { i, j }
    }

    pub const ALL: [PauliIndex; 4] = [
        PauliIndex { i: 0, j: 0 },
        PauliIndex { i: 1, j: 0 },
        PauliIndex { i: 0, j: 1 },
        PauliIndex { i: 1, j: 1 },
    ];

    pub fn matrix(&self) -> CMatrix {
        match (self.i, self.j) {
            (0, 0) => CMatrix::identity(2),
            (0, 1) => gates::pauli_x(),
            (1, 0) => gates::pauli_z(),
            (1, 1) => gates::pauli_y().scale(Complex64::new(0.0, -1.0)),
            _ => unreachable!(),
        }
    }

    pub fn compose(&self, other: PauliIndex) -> PauliIndex {
        PauliIndex {
            i: self.i ^ other.i,
            j: self.j ^ other.j,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.i == 0 && self.j == 0
    }
}

/// |Psi^{i,j}> = (sigma_{i,j}^dagger tensor 1) (|00> + |11>)/sqrt(2).
///
/// Index (0,0) is the fiducial maximally entangled state; the other three
/// are its images under the Pauli table above acting on the first qubit.
pub fn bell_state(which: PauliIndex) -> CVector {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    match (which.i, which.j) {
        // (|00> + |11>)/sqrt(2)
        (0, 0) => CVector::new(vec![h, C_ZERO, C_ZERO, h]),
        // (|00> - |11>)/sqrt(2)
        (1, 0) => CVector::new(vec![h, C_ZERO, C_ZERO, -h]),
        // (|01> + |10>)/sqrt(2)
        (0, 1) => CVector::new(vec![C_ZERO, h, h, C_ZERO]),
        // (|01> - |10>)/sqrt(2)
        (1, 1) => CVector::new(vec![C_ZERO, h, -h, C_ZERO]),
        _ => unreachable!(),
    }
}

pub fn bell_projector(which: PauliIndex) -> CMatrix {
    bell_state(which).outer()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmatrix::C_ONE;

    #[test]
    fn bell_states_match_their_definition() {
        // Rebuild each |Psi^{i,j}> by applying sigma^dagger tensor 1 to the
        // fiducial state and compare.
        let fiducial = bell_state(PauliIndex::IDENTITY);
        for which in PauliIndex::ALL {
            let op = which.matrix().dagger().kron(&CMatrix::identity(2));
            let mut built = vec![C_ZERO; 4];
            for (r, b) in built.iter_mut().enumerate() {
                for c in 0..4 {
                    *b += op.at(r, c) * fiducial.data[c];
                }
            }
            let built = CVector::new(built);
            let overlap = built.inner(&bell_state(which)).norm();
            assert!(
                (overlap - 1.0).abs() < 1e-14,
                "bell state ({}, {}) mismatch",
                which.i,
                which.j
            );
        }
    }

    #[test]
    fn bell_states_are_orthonormal() {
        for a in PauliIndex::ALL {
            for b in PauliIndex::ALL {
                let overlap = bell_state(a).inner(&bell_state(b)).norm();
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((overlap - expected).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn composition_is_xor() {
        let zx = PauliIndex::new(1, 0).compose(PauliIndex::new(0, 1));
        assert_eq!(zx, PauliIndex::new(1, 1));
        assert_eq!(zx.compose(zx), PauliIndex::IDENTITY);
    }

    #[test]
    fn sigma_11_is_minus_i_sigma_y() {
        let m = PauliIndex::new(1, 1).matrix();
        assert!((m.at(0, 1) - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        assert!((m.at(1, 0) - C_ONE).norm() < 1e-15);
    }
}
