//! The parallel entanglement-swapping protocol: circuit layout, completion
//! parity algebra, exact noisy simulation, and the serial swap-chain
//! baseline it is measured against.
//!
//! Chain qubits are 0-based here; 0 and l-1 are the ends that finish
//! entangled, qubits 1..=l-2 are measured. The completion Pauli acts on
//! qubit 0.

use crate::cmatrix::{gates, CVector};
use crate::density::{DensityMatrix, DEFAULT_QUBIT_CAP};
use crate::error::{Error, Result};
use crate::noise::{cpe_cphase, cpe_leakage_cphase, depolarizing_gate, noisy_measure, NoiseModel};
use crate::pauli::{bell_state, PauliIndex};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Which error acts on every entangling gate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorModel {
    /// Depolarizing gate failure.
    Dep,
    /// Controlled phase error.
    Cpe,
    /// Controlled phase error with leakage out of the logical basis.
    CpeLeakage,
}

impl ErrorModel {
    pub fn as_str(&self) -> &'static str {
        match self {
            ErrorModel::Dep => "dep",
            ErrorModel::Cpe => "cpe",
            ErrorModel::CpeLeakage => "cpe-leak",
        }
    }
}

impl std::str::FromStr for ErrorModel {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "dep" => Ok(ErrorModel::Dep),
            "cpe" => Ok(ErrorModel::Cpe),
            "cpe-leak" => Ok(ErrorModel::CpeLeakage),
            other => Err(format!(
                "unknown error model '{other}' (expected dep, cpe, or cpe-leak)"
            )),
        }
    }
}

impl std::fmt::Display for ErrorModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A bus instance: an even number of chain qubits plus the error model
/// every entangling gate and readout carries.
#[derive(Clone, Debug)]
pub struct BusSpec {
    pub l: usize,
    pub noise: NoiseModel,
    pub error_model: ErrorModel,
}

impl BusSpec {
    pub fn new(l: usize, noise: NoiseModel, error_model: ErrorModel) -> Result<Self> {
        if l < 2 || !l.is_multiple_of(2) {
            return Err(Error::BadBusLength { l });
        }
        Ok(BusSpec {
            l,
            noise,
            error_model,
        })
    }

    /// Number of joint Bell measurements, l/2 - 1.
    pub fn num_joints(&self) -> usize {
        self.l / 2 - 1
    }
}

/// Readout record of the interior qubits, in chain order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasurementRecord {
    outcomes: Vec<u8>,
}

impl MeasurementRecord {
    /// Outcomes of chain qubits 1..=l-2, in that order.
    pub fn new(outcomes: Vec<u8>) -> Self {
        assert!(outcomes.iter().all(|&b| b <= 1));
        MeasurementRecord { outcomes }
    }

    pub fn outcomes(&self) -> &[u8] {
        &self.outcomes
    }

    /// Parity over the even chain positions (qubits 1, 3, ... in 0-based
    /// labels are the *second* qubit of each entangled pair; counting from
    /// 1 as the protocol does, these are the even-ordered qubits).
    pub fn parity_even(&self) -> u8 {
        self.outcomes.iter().step_by(2).fold(0, |acc, &b| acc ^ b)
    }

    /// Parity over the odd-ordered qubits (first members of the pairs to
    /// the right of each joint).
    pub fn parity_odd(&self) -> u8 {
        self.outcomes
            .iter()
            .skip(1)
            .step_by(2)
            .fold(0, |acc, &b| acc ^ b)
    }
}

/// The completion Pauli is determined by two parity bits alone: Paulis
/// anticommute, so the per-joint corrections collapse to the bitwise sums
/// over even- and odd-ordered measured qubits.
pub fn parity_completion(record: &MeasurementRecord) -> PauliIndex {
    PauliIndex::new(record.parity_even(), record.parity_odd())
}

/// One layer of the fixed-depth circuit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Layer {
    Hadamards(Vec<usize>),
    CPhases(Vec<(usize, usize)>),
    Measure(Vec<usize>),
    Completion,
}

/// The six-layer circuit for a given bus length.
#[derive(Clone, Debug)]
pub struct SwapCircuit {
    pub l: usize,
    pub layers: Vec<Layer>,
}

impl SwapCircuit {
    pub fn two_qubit_gate_count(&self) -> usize {
        self.layers
            .iter()
            .map(|layer| match layer {
                Layer::CPhases(pairs) => pairs.len(),
                _ => 0,
            })
            .sum()
    }

    pub fn measured_qubit_count(&self) -> usize {
        self.layers
            .iter()
            .map(|layer| match layer {
                Layer::Measure(qs) => qs.len(),
                _ => 0,
            })
            .sum()
    }
}

/// Fixed-depth swapping circuit on l chain qubits:
/// (1) Hadamards everywhere, (2) CPHASE inside each pair,
/// (3) CPHASE across each joint, (4) Hadamards on all but the last qubit,
/// (5) readout of the interior, (6) the parity-determined Pauli on qubit 0.
///
/// Layer 4 carries the fixed end-qubit basis change that makes the printed
/// parity rule (even parities -> phase bit, odd parities -> bit flip) hold
/// for every outcome string; the layer count and gate counts are unchanged.
pub fn build_swap_circuit(l: usize) -> Result<SwapCircuit> {
    if l < 2 || !l.is_multiple_of(2) {
        return Err(Error::BadBusLength { l });
    }
    let pair_gates: Vec<(usize, usize)> = (0..l / 2).map(|k| (2 * k, 2 * k + 1)).collect();
    let joint_gates: Vec<(usize, usize)> = (0..l / 2 - 1).map(|k| (2 * k + 1, 2 * k + 2)).collect();
    let layers = vec![
        Layer::Hadamards((0..l).collect()),
        Layer::CPhases(pair_gates),
        Layer::CPhases(joint_gates),
        Layer::Hadamards((0..l - 1).collect()),
        Layer::Measure((1..l - 1).collect()),
        Layer::Completion,
    ];
    Ok(SwapCircuit { l, layers })
}

fn apply_noisy_cphase(
    state: &DensityMatrix,
    pair: (usize, usize),
    noise: &NoiseModel,
    model: ErrorModel,
) -> Result<DensityMatrix> {
    match model {
        ErrorModel::Dep => depolarizing_gate(state, pair, &gates::cphase(), noise.p),
        ErrorModel::Cpe => cpe_cphase(state, pair, noise),
        ErrorModel::CpeLeakage => cpe_leakage_cphase(state, pair, noise),
    }
}

/// One reported-outcome branch of the protocol, already corrected by its
/// completion Pauli and reduced to the end pair.
#[derive(Clone, Debug)]
pub struct BusBranch {
    pub record: MeasurementRecord,
    pub weight: f64,
    pub end_state: DensityMatrix,
}

/// Runs the circuit with the spec's error model on every CPHASE and
/// detector-noisy readout on every interior qubit, enumerating all
/// reported-outcome branches. One-qubit gates and the completion gate are
/// ideal.
pub fn simulate_bus_branches(spec: &BusSpec) -> Result<Vec<BusBranch>> {
    let l = spec.l;
    if l > DEFAULT_QUBIT_CAP {
        return Err(Error::RegisterCapExceeded {
            requested: l,
            cap: DEFAULT_QUBIT_CAP,
        });
    }
    let circuit = build_swap_circuit(l)?;
    let mut state = DensityMatrix::new_ground(l)?;
    let h = gates::hadamard();
    let mut measure_qubits: Vec<usize> = Vec::new();
    for layer in &circuit.layers {
        match layer {
            Layer::Hadamards(qs) => {
                for &q in qs {
                    state = state.apply_unitary(&h, &[q])?;
                }
            }
            Layer::CPhases(pairs) => {
                for &pair in pairs {
                    state = apply_noisy_cphase(&state, pair, &spec.noise, spec.error_model)?;
                }
            }
            Layer::Measure(qs) => {
                measure_qubits = qs.clone();
            }
            Layer::Completion => {}
        }
    }

    // Measure the interior from the highest chain index down, tracing each
    // qubit out immediately; lower indices are unaffected, so bookkeeping
    // stays trivial. Outcomes are recorded by chain position.
    struct Partial {
        outcomes: Vec<Option<u8>>,
        weight: f64,
        state: DensityMatrix,
    }
    let mut partials = vec![Partial {
        outcomes: vec![None; measure_qubits.len()],
        weight: 1.0,
        state,
    }];
    for &q in measure_qubits.iter().rev() {
        let mut next = Vec::with_capacity(partials.len() * 2);
        for partial in partials {
            let branches = noisy_measure(&partial.state, q, spec.noise.eta)?;
            for branch in branches {
                let Some(post) = branch.post_state else {
                    continue;
                };
                let reduced = post.trace_out_qubit(q)?;
                let mut outcomes = partial.outcomes.clone();
                outcomes[q - 1] = Some(branch.outcome);
                next.push(Partial {
                    outcomes,
                    weight: partial.weight * branch.probability,
                    state: reduced,
                });
            }
        }
        partials = next;
    }

    let mut out = Vec::with_capacity(partials.len());
    for partial in partials {
        let record = MeasurementRecord::new(
            partial
                .outcomes
                .into_iter()
                .map(|o| o.expect("all interior qubits measured"))
                .collect(),
        );
        let completion = parity_completion(&record);
        let end_state = partial
            .state
            .apply_unitary(&completion.matrix(), &[0])?;
        out.push(BusBranch {
            record,
            weight: partial.weight,
            end_state,
        });
    }
    Ok(out)
}

/// End-pair state averaged over all reported branches, each corrected by
/// its completion Pauli.
#[derive(Clone, Debug)]
pub struct BusOutcome {
    /// Averaged two-qubit state; its trace is the surviving weight (1 for
    /// the trace-preserving error models).
    pub end_state: DensityMatrix,
    /// Overlap with the fiducial maximally entangled state, without
    /// renormalizing away leakage loss.
    pub fidelity_raw: f64,
    /// Overlap computed on the renormalized end state.
    pub fidelity: f64,
    /// Total surviving trace weight.
    pub survival: f64,
}

pub fn simulate_bus_exact(spec: &BusSpec) -> Result<BusOutcome> {
    let branches = simulate_bus_branches(spec)?;
    let mut acc: Option<DensityMatrix> = None;
    for branch in &branches {
        acc = Some(match acc {
            None => branch.end_state.scaled(branch.weight),
            Some(sum) => sum.mix(1.0, &branch.end_state, branch.weight)?,
        });
    }
    let end_state = acc.expect("at least one branch");
    let survival = end_state.trace();
    let fidelity_raw = end_state.overlap(&bell_state(PauliIndex::IDENTITY))?;
    let fidelity = if survival > 0.0 {
        fidelity_raw / survival
    } else {
        0.0
    };
    Ok(BusOutcome {
        end_state,
        fidelity_raw,
        fidelity,
        survival,
    })
}

/// Monte Carlo spot check: samples reported outcomes instead of branching,
/// and averages the corrected end-pair fidelity over `shots` trajectories.
/// Deterministic for a fixed seed.
pub fn simulate_bus_sampled(spec: &BusSpec, seed: u64, shots: usize) -> Result<f64> {
    let l = spec.l;
    if l > DEFAULT_QUBIT_CAP {
        return Err(Error::RegisterCapExceeded {
            requested: l,
            cap: DEFAULT_QUBIT_CAP,
        });
    }
    let circuit = build_swap_circuit(l)?;
    let h = gates::hadamard();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut total = 0.0;
    for _ in 0..shots {
        let mut state = DensityMatrix::new_ground(l)?;
        let mut outcomes = vec![0u8; l.saturating_sub(2)];
        for layer in &circuit.layers {
            match layer {
                Layer::Hadamards(qs) => {
                    for &q in qs {
                        state = state.apply_unitary(&h, &[q])?;
                    }
                }
                Layer::CPhases(pairs) => {
                    for &pair in pairs {
                        state = apply_noisy_cphase(&state, pair, &spec.noise, spec.error_model)?;
                    }
                }
                Layer::Measure(qs) => {
                    for &q in qs.iter().rev() {
                        let branches = noisy_measure(&state, q, spec.noise.eta)?;
                        let norm: f64 = branches.iter().map(|b| b.probability).sum();
                        let draw: f64 = rng.random::<f64>() * norm;
                        let mut acc = 0.0;
                        let mut chosen = None;
                        for b in &branches {
                            acc += b.probability;
                            if draw <= acc && b.post_state.is_some() {
                                chosen = Some(b.clone());
                                break;
                            }
                        }
                        let b = chosen.unwrap_or_else(|| {
                            branches
                                .into_iter()
                                .rev()
                                .find(|b| b.post_state.is_some())
                                .expect("some branch survives")
                        });
                        outcomes[q - 1] = b.outcome;
                        state = b.post_state.unwrap().trace_out_qubit(q)?;
                    }
                }
                Layer::Completion => {
                    let completion =
                        parity_completion(&MeasurementRecord::new(outcomes.clone()));
                    state = state.apply_unitary(&completion.matrix(), &[0])?;
                }
            }
        }
        total += state.renormalized().fidelity_with_bell(PauliIndex::IDENTITY)?;
    }
    Ok(total / shots as f64)
}

/// Serial baseline: transport one half of a maximally entangled pair to a
/// site l positions away and back again with swap gates, each decomposed
/// into three CPHASE-equivalent entangling gates under the depolarizing
/// model. The round trip is how the transport alternative actually runs:
/// the state is swapped out until adjacent to the distant site and swapped
/// back afterwards.
#[derive(Clone, Copy, Debug)]
pub struct ChainBaseline {
    pub fidelity: f64,
    /// p^{2l}: at least l swaps to cover distance l, at least two maximally
    /// entangling gates per swap.
    pub bound: f64,
}

pub fn swap_chain_baseline(l: usize, p: f64) -> Result<ChainBaseline> {
    if l == 0 {
        return Err(Error::BadBusLength { l });
    }
    let num_qubits = l + 2; // memory qubit + chain positions 0..=l
    if num_qubits > DEFAULT_QUBIT_CAP {
        return Err(Error::RegisterCapExceeded {
            requested: num_qubits,
            cap: DEFAULT_QUBIT_CAP,
        });
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange {
            name: "p",
            value: p,
            range: "[0, 1]",
        });
    }
    // Memory qubit 0 entangled with chain position 0 (register qubit 1).
    let mut psi = bell_state(PauliIndex::IDENTITY);
    for _ in 0..l {
        psi = psi.kron(&CVector::basis(2, 0));
    }
    let mut state = DensityMatrix::from_pure(&psi)?;
    let cnot = gates::cnot();
    let mut hops: Vec<(usize, usize)> = (1..=l).map(|k| (k, k + 1)).collect();
    let back: Vec<(usize, usize)> = hops.iter().rev().copied().collect();
    hops.extend(back);
    for (a, b) in hops {
        for (ctrl, tgt) in [(a, b), (b, a), (a, b)] {
            state = depolarizing_gate(&state, (ctrl, tgt), &cnot, p)?;
        }
    }
    let ends = state.partial_trace(&[0, 1])?;
    let fidelity = ends.overlap(&bell_state(PauliIndex::IDENTITY))?;
    let bound = p.powi(2 * l as i32);
    Ok(ChainBaseline { fidelity, bound })
}
