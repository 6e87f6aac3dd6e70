//! The two-qubit error channels, detector-noisy measurement, and the twirl.
//!
//! Three gate error models act on a CPHASE-based entangling gate:
//! depolarizing failure, a random controlled phase, and a controlled phase
//! with leakage out of the logical basis (pure trace loss). Detector noise
//! flips the reported bit of an otherwise ideal projective measurement.

use crate::cmatrix::{gates, CMatrix};
use crate::density::{DensityMatrix, MeasureBranch};
use crate::error::{Error, Result};
use std::sync::OnceLock;

/// Distribution of the unwanted extra phase picked up during a CPHASE.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PhaseNoise {
    /// Two-point distribution: the gate phase is exact with probability `p`
    /// (the model's `p`), otherwise the gate acts as the identity.
    Discrete,
    /// Zero-mean Gaussian phase with standard deviation `sigma`, averaged
    /// by Gauss-Hermite quadrature.
    Gaussian { sigma: f64 },
}

/// Bundle of all error parameters used across the protocol.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseModel {
    /// Two-qubit gate success probability.
    pub p: f64,
    /// Detector efficiency: the reported bit matches the collapse outcome
    /// with this probability.
    pub eta: f64,
    /// Effective leakage decay per CPHASE on the |11> amplitude.
    pub gamma: f64,
    pub phase_noise: PhaseNoise,
}

impl NoiseModel {
    pub fn new(p: f64, eta: f64, gamma: f64, phase_noise: PhaseNoise) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) || !p.is_finite() {
            return Err(Error::OutOfRange {
                name: "p",
                value: p,
                range: "[0, 1]",
            });
        }
        if !(0.5..=1.0).contains(&eta) || !eta.is_finite() {
            return Err(Error::OutOfRange {
                name: "eta",
                value: eta,
                range: "[1/2, 1]",
            });
        }
        if gamma < 0.0 || !gamma.is_finite() {
            return Err(Error::OutOfRange {
                name: "gamma",
                value: gamma,
                range: "[0, inf)",
            });
        }
        if let PhaseNoise::Gaussian { sigma } = phase_noise {
            if sigma < 0.0 || !sigma.is_finite() {
                return Err(Error::OutOfRange {
                    name: "sigma",
                    value: sigma,
                    range: "[0, inf)",
                });
            }
        }
        Ok(NoiseModel {
            p,
            eta,
            gamma,
            phase_noise,
        })
    }

    pub fn ideal() -> Self {
        NoiseModel {
            p: 1.0,
            eta: 1.0,
            gamma: 0.0,
            phase_noise: PhaseNoise::Discrete,
        }
    }

    pub fn depolarizing(p: f64, eta: f64) -> Result<Self> {
        NoiseModel::new(p, eta, 0.0, PhaseNoise::Discrete)
    }

    pub fn cpe_discrete(p: f64, eta: f64) -> Result<Self> {
        NoiseModel::new(p, eta, 0.0, PhaseNoise::Discrete)
    }

    /// Gaussian-phase model; `p` is set to the discrete-mixture weight that
    /// reproduces the same channel (see `discrete_weight_for_sigma`).
    pub fn cpe_gaussian(sigma: f64, eta: f64) -> Result<Self> {
        NoiseModel::new(
            discrete_weight_for_sigma(sigma),
            eta,
            0.0,
            PhaseNoise::Gaussian { sigma },
        )
    }

    pub fn with_gamma(mut self, gamma: f64) -> Result<Self> {
        if gamma < 0.0 || !gamma.is_finite() {
            return Err(Error::OutOfRange {
                name: "gamma",
                value: gamma,
                range: "[0, inf)",
            });
        }
        self.gamma = gamma;
        Ok(self)
    }
}

/// Mean of cos(phi) under the zero-mean Gaussian of width sigma.
pub fn gaussian_mean_cos(sigma: f64) -> f64 {
    (-0.5 * sigma * sigma).exp()
}

/// The discrete-mixture weight p for which
/// p * U(0) rho U(0)^dag + (1-p) * rho
/// equals the Gaussian-phase average exactly.
///
/// Averaging U(phi) = CPHASE * diag(1,1,1,e^{i phi}) over a symmetric
/// distribution scales the |11> coherences by -E[cos phi], while the
/// discrete mixture scales them by (1 - 2p); matching the two gives
/// p = (1 + E[cos phi]) / 2.
pub fn discrete_weight_for_sigma(sigma: f64) -> f64 {
    0.5 * (1.0 + gaussian_mean_cos(sigma))
}

/// Depolarizing failure of a desired two-qubit gate `u` on `targets`:
/// with probability p the gate acts exactly, otherwise the two qubits are
/// replaced by the maximally mixed state.
pub fn depolarizing_gate(
    state: &DensityMatrix,
    targets: (usize, usize),
    u: &CMatrix,
    p: f64,
) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange {
            name: "p",
            value: p,
            range: "[0, 1]",
        });
    }
    let good = state.apply_unitary(u, &[targets.0, targets.1])?;
    if p >= 1.0 {
        return Ok(good);
    }
    let scrambled = replace_with_maximally_mixed(state, targets)?;
    let out = good.mix(p, &scrambled, 1.0 - p)?;
    out.debug_validate();
    Ok(out)
}

/// Depolarizing CPHASE, the bus's native noisy entangling gate.
pub fn depolarizing_cphase(
    state: &DensityMatrix,
    targets: (usize, usize),
    p: f64,
) -> Result<DensityMatrix> {
    depolarizing_gate(state, targets, &gates::cphase(), p)
}

/// Tr_{i,j}[rho] tensor 1/4, reassembled in the original qubit layout.
fn replace_with_maximally_mixed(
    state: &DensityMatrix,
    targets: (usize, usize),
) -> Result<DensityMatrix> {
    let n = state.num_qubits();
    let (i, j) = targets;
    if i == j {
        return Err(Error::DuplicateTargets);
    }
    for q in [i, j] {
        if q >= n {
            return Err(Error::QubitOutOfRange {
                qubit: q,
                num_qubits: n,
            });
        }
    }
    if n == 2 {
        let mixed = CMatrix::identity(4).scale_re(0.25 * state.trace_weight());
        return DensityMatrix::from_matrix(mixed, state.trace_weight());
    }
    let keep: Vec<usize> = (0..n).filter(|&q| q != i && q != j).collect();
    let reduced = state.partial_trace(&keep)?;

    let pos_i = n - 1 - i;
    let pos_j = n - 1 - j;
    let strip = |idx: usize| -> usize {
        let mut out = 0;
        let mut shift = 0;
        for pos in 0..n {
            if pos == pos_i || pos == pos_j {
                continue;
            }
            out |= ((idx >> pos) & 1) << shift;
            shift += 1;
        }
        out
    };

    let dim = state.dim();
    let mut mat = CMatrix::zeros(dim);
    for r in 0..dim {
        for c in 0..dim {
            // The replaced qubits carry 1/4 on the diagonal only.
            if ((r >> pos_i) & 1) != ((c >> pos_i) & 1) || ((r >> pos_j) & 1) != ((c >> pos_j) & 1)
            {
                continue;
            }
            *mat.at_mut(r, c) = reduced.matrix().at(strip(r), strip(c)).scale(0.25);
        }
    }
    DensityMatrix::from_matrix(mat, state.trace_weight())
}

/// Controlled phase error: the CPHASE picks up a random extra phase on the
/// |11> component, drawn from the model's phase distribution.
pub fn cpe_cphase(
    state: &DensityMatrix,
    targets: (usize, usize),
    noise: &NoiseModel,
) -> Result<DensityMatrix> {
    let t = [targets.0, targets.1];
    match noise.phase_noise {
        PhaseNoise::Discrete => {
            let good = state.apply_unitary(&gates::cphase(), &t)?;
            if noise.p >= 1.0 {
                return Ok(good);
            }
            let out = good.mix(noise.p, state, 1.0 - noise.p)?;
            out.debug_validate();
            Ok(out)
        }
        PhaseNoise::Gaussian { sigma } => {
            if sigma == 0.0 {
                return state.apply_unitary(&gates::cphase(), &t);
            }
            let (nodes, weights) = gauss_hermite(GAUSS_HERMITE_NODES);
            let mut acc: Option<DensityMatrix> = None;
            let norm = std::f64::consts::PI.sqrt();
            for (&x, &w) in nodes.iter().zip(weights.iter()) {
                let phi = std::f64::consts::SQRT_2 * sigma * x;
                let term = state.apply_unitary(&gates::cphase_with_phase(phi), &t)?;
                let weight = w / norm;
                acc = Some(match acc {
                    None => term.scaled(weight),
                    Some(sum) => sum.mix(1.0, &term, weight)?,
                });
            }
            let out = acc.expect("quadrature has nodes");
            out.debug_validate();
            Ok(out)
        }
    }
}

/// Controlled phase error with leakage, modeled as the gate phase
/// continued to phi + i*gamma: the |11> amplitude decays by exp(-gamma)
/// per gate. Leaked population is discarded, so the trace weight drops;
/// it is never returned to the logical space.
pub fn cpe_leakage_cphase(
    state: &DensityMatrix,
    targets: (usize, usize),
    noise: &NoiseModel,
) -> Result<DensityMatrix> {
    let decayed = if noise.gamma > 0.0 {
        // The decay commutes with every phase branch, so it factors out of
        // the phase average.
        let mut k = CMatrix::identity(4);
        *k.at_mut(3, 3) = num_complex::Complex64::new((-noise.gamma).exp(), 0.0);
        state.apply_kraus(&k, &[targets.0, targets.1])?
    } else {
        state.clone()
    };
    cpe_cphase(&decayed, targets, noise)
}

/// Projective measurement read out through a detector of efficiency eta:
/// the collapse is ideal, the reported bit flips with probability 1 - eta,
/// and branches are merged by reported bit (what a classical controller
/// conditions on).
pub fn noisy_measure(state: &DensityMatrix, qubit: usize, eta: f64) -> Result<Vec<MeasureBranch>> {
    if !(0.5..=1.0).contains(&eta) {
        return Err(Error::OutOfRange {
            name: "eta",
            value: eta,
            range: "[1/2, 1]",
        });
    }
    let ideal = state.measure_qubit(qubit)?;
    let (b0, b1) = (&ideal[0], &ideal[1]);
    let mut out = Vec::with_capacity(2);
    for reported in [0u8, 1u8] {
        let (same, other) = if reported == 0 { (b0, b1) } else { (b1, b0) };
        let prob = eta * same.probability + (1.0 - eta) * other.probability;
        let post_state = match (&same.post_state, &other.post_state) {
            _ if prob <= 1e-14 => None,
            (Some(s), Some(o)) => Some(
                s.scaled(eta * same.probability / prob)
                    .mix(1.0, &o.scaled((1.0 - eta) * other.probability / prob), 1.0)?,
            ),
            (Some(s), None) => Some(s.clone()),
            (None, Some(o)) => Some(o.clone()),
            (None, None) => None,
        };
        out.push(MeasureBranch {
            outcome: reported,
            probability: prob,
            post_state,
        });
    }
    Ok(out)
}

/// The bilateral Pauli average T(rho) = 1/4 sum_a (s_a x s_a) rho (s_a x s_a)^dag.
/// Projects any two-qubit state onto its Bell-diagonal part while leaving
/// all four Bell fidelities untouched.
pub fn twirl(state: &DensityMatrix) -> Result<DensityMatrix> {
    if state.num_qubits() != 2 {
        return Err(Error::WrongQubitCount {
            expected: 2,
            got: state.num_qubits(),
        });
    }
    let mut acc: Option<DensityMatrix> = None;
    for alpha in 0..4 {
        let s = gates::pauli(alpha);
        let both = s.kron(&s);
        let term = state.apply_unitary(&both, &[0, 1])?;
        acc = Some(match acc {
            None => term.scaled(0.25),
            Some(sum) => sum.mix(1.0, &term, 0.25)?,
        });
    }
    Ok(acc.unwrap())
}

const GAUSS_HERMITE_NODES: usize = 41;

static GH_CACHE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();

/// Nodes and weights for integrating f against exp(-x^2) on the line.
/// Newton iteration on the orthonormal Hermite recurrence; weights sum to
/// sqrt(pi).
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    if n == GAUSS_HERMITE_NODES {
        let (x, w) = GH_CACHE.get_or_init(|| compute_gauss_hermite(n));
        return (x.clone(), w.clone());
    }
    compute_gauss_hermite(n)
}

fn compute_gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let mut nodes = vec![0.0f64; n];
    let mut weights = vec![0.0f64; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    let mut z = 0.0f64;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * nodes[0],
            3 => 1.91 * z - 0.91 * nodes[1],
            _ => 2.0 * z - nodes[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..200 {
            // Orthonormal Hermite recurrence.
            let mut p1 = std::f64::consts::PI.powf(-0.25);
            let mut p2 = 0.0f64;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = z;
        nodes[n - 1 - i] = -z;
        weights[i] = 2.0 / (pp * pp);
        weights[n - 1 - i] = weights[i];
    }
    (nodes, weights)
}
