//! Exact mixed-state evolution for small qubit registers.
//!
//! Qubit 0 is the leftmost (most significant) tensor factor, so the basis
//! index of |q0 q1 ... q_{n-1}> is the binary number q0 q1 ... q_{n-1}.
//! All operations return new values; nothing here mutates shared state.

use crate::cmatrix::{CMatrix, CVector, C_ZERO};
use crate::error::{Error, Result};
use crate::pauli::{bell_state, PauliIndex};
use num_complex::Complex64;
use rand::RngExt;

/// Dense density matrices above this register size are refused; 2^11 x 2^11
/// complex entries is ~64 MB, which is as far as "cheap and exact" stretches.
pub const DEFAULT_QUBIT_CAP: usize = 11;

/// Mixed state of an n-qubit register.
///
/// `trace_weight` records the surviving trace under trace-decreasing
/// (leakage) evolution; it stays exactly 1.0 for unitary and
/// trace-preserving dynamics, and `mat.trace()` always equals it.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    num_qubits: usize,
    mat: CMatrix,
    trace_weight: f64,
}

/// One branch of a projective (or detector-noisy) measurement.
///
/// `probability` is the Born weight relative to the parent state, so the
/// branch probabilities of one measurement sum to the parent's trace
/// weight. `post_state` is renormalized to trace 1 and is `None` for a
/// zero-probability branch.
#[derive(Clone, Debug)]
pub struct MeasureBranch {
    pub outcome: u8,
    pub probability: f64,
    pub post_state: Option<DensityMatrix>,
}

impl DensityMatrix {
    /// |0...0><0...0| on `num_qubits` qubits.
    pub fn new_ground(num_qubits: usize) -> Result<Self> {
        Self::new_ground_with_cap(num_qubits, DEFAULT_QUBIT_CAP)
    }

    pub fn new_ground_with_cap(num_qubits: usize, cap: usize) -> Result<Self> {
        check_cap(num_qubits, cap)?;
        let mut mat = CMatrix::zeros(1 << num_qubits);
        *mat.at_mut(0, 0) = Complex64::new(1.0, 0.0);
        Ok(DensityMatrix {
            num_qubits,
            mat,
            trace_weight: 1.0,
        })
    }

    pub fn from_pure(state: &CVector) -> Result<Self> {
        let dim = state.dim();
        if !dim.is_power_of_two() || dim < 2 {
            return Err(Error::DimensionMismatch {
                expected: dim.next_power_of_two().max(2),
                got: dim,
            });
        }
        let num_qubits = dim.trailing_zeros() as usize;
        check_cap(num_qubits, DEFAULT_QUBIT_CAP)?;
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidState(format!(
                "pure state not normalized (norm^2 = {norm})"
            )));
        }
        Ok(DensityMatrix {
            num_qubits,
            mat: state.normalized().outer(),
            trace_weight: 1.0,
        })
    }

    /// Build from an explicit matrix; validates Hermiticity and trace.
    pub fn from_matrix(mat: CMatrix, trace_weight: f64) -> Result<Self> {
        let dim = mat.dim();
        if !dim.is_power_of_two() || dim < 2 {
            return Err(Error::DimensionMismatch {
                expected: dim.next_power_of_two().max(2),
                got: dim,
            });
        }
        if !mat.is_hermitian(1e-12 * (1.0 + mat.max_abs())) {
            return Err(Error::InvalidState("matrix not Hermitian".into()));
        }
        let tr = mat.trace().re;
        if (tr - trace_weight).abs() > 1e-10 {
            return Err(Error::InvalidState(format!(
                "trace {tr} does not match declared weight {trace_weight}"
            )));
        }
        Ok(DensityMatrix {
            num_qubits: dim.trailing_zeros() as usize,
            mat,
            trace_weight,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn trace_weight(&self) -> f64 {
        self.trace_weight
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    /// Tensor product; `self` supplies the more significant qubits.
    pub fn tensor(&self, rhs: &DensityMatrix) -> Result<DensityMatrix> {
        check_cap(self.num_qubits + rhs.num_qubits, DEFAULT_QUBIT_CAP)?;
        let out = DensityMatrix {
            num_qubits: self.num_qubits + rhs.num_qubits,
            mat: self.mat.kron(&rhs.mat),
            trace_weight: self.trace_weight * rhs.trace_weight,
        };
        out.debug_validate();
        Ok(out)
    }

    fn check_targets(&self, targets: &[usize]) -> Result<()> {
        for (k, &t) in targets.iter().enumerate() {
            if t >= self.num_qubits {
                return Err(Error::QubitOutOfRange {
                    qubit: t,
                    num_qubits: self.num_qubits,
                });
            }
            if targets[..k].contains(&t) {
                return Err(Error::DuplicateTargets);
            }
        }
        Ok(())
    }

    /// rho -> U rho U^dagger with U embedded on `targets` (ordered; the
    /// first target is U's most significant slot). U must be unitary.
    pub fn apply_unitary(&self, u: &CMatrix, targets: &[usize]) -> Result<DensityMatrix> {
        if !u.is_unitary(1e-12) {
            let dev = u
                .dagger()
                .matmul(u)
                .max_abs_diff(&CMatrix::identity(u.dim()));
            return Err(Error::NonUnitary { deviation: dev });
        }
        let out = self.apply_operator_raw(u, targets)?;
        out.debug_validate();
        Ok(out)
    }

    /// rho -> K rho K^dagger for an arbitrary (possibly trace-decreasing)
    /// operator K; `trace_weight` follows the new trace.
    pub fn apply_kraus(&self, k: &CMatrix, targets: &[usize]) -> Result<DensityMatrix> {
        let mut out = self.apply_operator_raw(k, targets)?;
        out.trace_weight = out.mat.trace().re;
        out.debug_validate();
        Ok(out)
    }

    fn apply_operator_raw(&self, op: &CMatrix, targets: &[usize]) -> Result<DensityMatrix> {
        self.check_targets(targets)?;
        let m = op.dim();
        if m != 1 << targets.len() {
            return Err(Error::DimensionMismatch {
                expected: 1 << targets.len(),
                got: m,
            });
        }
        let dim = self.dim();
        let blocks = embedded_blocks(self.num_qubits, targets);

        // Left multiply: rows mix within each embedded block, per column.
        let mut tmp = CMatrix::zeros(dim);
        let mut gathered = vec![C_ZERO; m];
        for block in &blocks {
            for col in 0..dim {
                for (g, &row) in block.iter().enumerate() {
                    gathered[g] = self.mat.at(row, col);
                }
                for (g, &row) in block.iter().enumerate() {
                    let mut acc = C_ZERO;
                    for (h, &amp) in gathered.iter().enumerate() {
                        acc += op.at(g, h) * amp;
                    }
                    *tmp.at_mut(row, col) = acc;
                }
            }
        }
        // Right multiply by op^dagger: columns mix within each block, per row.
        let mut out = CMatrix::zeros(dim);
        for block in &blocks {
            for row in 0..dim {
                for (g, &col) in block.iter().enumerate() {
                    gathered[g] = tmp.at(row, col);
                }
                for (g, &col) in block.iter().enumerate() {
                    let mut acc = C_ZERO;
                    for (h, &amp) in gathered.iter().enumerate() {
                        acc += amp * op.at(g, h).conj();
                    }
                    *out.at_mut(row, col) = acc;
                }
            }
        }
        Ok(DensityMatrix {
            num_qubits: self.num_qubits,
            mat: out,
            trace_weight: self.trace_weight,
        })
    }

    /// Reduced state on `keep` (strictly increasing qubit indices); the
    /// trace weight is preserved.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        if keep.is_empty()
            || keep.windows(2).any(|w| w[0] >= w[1])
            || *keep.last().unwrap() >= self.num_qubits
        {
            return Err(Error::BadKeepSet);
        }
        let n = self.num_qubits;
        let k = keep.len();
        if k == n {
            return Ok(self.clone());
        }
        let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
        let keep_pos: Vec<usize> = keep.iter().map(|&q| n - 1 - q).collect();
        let traced_pos: Vec<usize> = traced.iter().map(|&q| n - 1 - q).collect();

        let expand = |bits: usize, positions: &[usize]| -> usize {
            let mut idx = 0usize;
            for (a, &pos) in positions.iter().enumerate() {
                if (bits >> (positions.len() - 1 - a)) & 1 == 1 {
                    idx |= 1 << pos;
                }
            }
            idx
        };

        let out_dim = 1 << k;
        let mut out = CMatrix::zeros(out_dim);
        for r in 0..out_dim {
            let rbase = expand(r, &keep_pos);
            for c in 0..out_dim {
                let cbase = expand(c, &keep_pos);
                let mut acc = C_ZERO;
                for t in 0..(1 << traced.len()) {
                    let toff = expand(t, &traced_pos);
                    acc += self.mat.at(rbase | toff, cbase | toff);
                }
                *out.at_mut(r, c) = acc;
            }
        }
        let dm = DensityMatrix {
            num_qubits: k,
            mat: out,
            trace_weight: self.trace_weight,
        };
        dm.debug_validate();
        Ok(dm)
    }

    pub fn trace_out_qubit(&self, qubit: usize) -> Result<DensityMatrix> {
        let keep: Vec<usize> = (0..self.num_qubits).filter(|&q| q != qubit).collect();
        self.partial_trace(&keep)
    }

    /// Ideal projective measurement of one qubit in the computational basis.
    ///
    /// Both outcome branches are returned; probabilities sum to the trace
    /// weight and each post-state is renormalized to trace 1.
    pub fn measure_qubit(&self, qubit: usize) -> Result<Vec<MeasureBranch>> {
        if qubit >= self.num_qubits {
            return Err(Error::QubitOutOfRange {
                qubit,
                num_qubits: self.num_qubits,
            });
        }
        let pos = self.num_qubits - 1 - qubit;
        let dim = self.dim();
        let mut branches = Vec::with_capacity(2);
        for outcome in [0u8, 1u8] {
            let mut collapsed = CMatrix::zeros(dim);
            let mut prob = 0.0;
            for r in 0..dim {
                if ((r >> pos) & 1) as u8 != outcome {
                    continue;
                }
                prob += self.mat.at(r, r).re;
                for c in 0..dim {
                    if ((c >> pos) & 1) as u8 == outcome {
                        *collapsed.at_mut(r, c) = self.mat.at(r, c);
                    }
                }
            }
            let post_state = if prob > 1e-14 {
                Some(DensityMatrix {
                    num_qubits: self.num_qubits,
                    mat: collapsed.scale_re(1.0 / prob),
                    trace_weight: 1.0,
                })
            } else {
                None
            };
            branches.push(MeasureBranch {
                outcome,
                probability: prob.max(0.0),
                post_state,
            });
        }
        Ok(branches)
    }

    /// Monte Carlo counterpart of `measure_qubit`: samples one branch by
    /// its Born probability. Spot-check use only.
    pub fn sample_measure_qubit<R: RngExt>(
        &self,
        qubit: usize,
        rng: &mut R,
    ) -> Result<(u8, DensityMatrix)> {
        let branches = self.measure_qubit(qubit)?;
        let total: f64 = branches.iter().map(|b| b.probability).sum();
        let draw: f64 = rng.random::<f64>() * total;
        let mut acc = 0.0;
        for b in &branches {
            acc += b.probability;
            if draw <= acc && b.post_state.is_some() {
                return Ok((b.outcome, b.post_state.clone().unwrap()));
            }
        }
        let last = branches
            .into_iter()
            .rev()
            .find(|b| b.post_state.is_some())
            .expect("at least one branch has nonzero probability");
        Ok((last.outcome, last.post_state.unwrap()))
    }

    /// <Psi^{i,j}| rho |Psi^{i,j}> for a two-qubit state; real, in
    /// [0, trace_weight] up to rounding.
    pub fn fidelity_with_bell(&self, which: PauliIndex) -> Result<f64> {
        self.overlap(&bell_state(which))
    }

    /// <psi| rho |psi>.
    pub fn overlap(&self, psi: &CVector) -> Result<f64> {
        if psi.dim() != self.dim() {
            return Err(Error::WrongQubitCount {
                expected: psi.dim().trailing_zeros() as usize,
                got: self.num_qubits,
            });
        }
        let mut acc = C_ZERO;
        for r in 0..self.dim() {
            for c in 0..self.dim() {
                acc += psi.data[r].conj() * self.mat.at(r, c) * psi.data[c];
            }
        }
        Ok(acc.re)
    }

    /// Convex combination helper: w1 * self + w2 * rhs.
    pub fn mix(&self, w1: f64, rhs: &DensityMatrix, w2: f64) -> Result<DensityMatrix> {
        if rhs.num_qubits != self.num_qubits {
            return Err(Error::WrongQubitCount {
                expected: self.num_qubits,
                got: rhs.num_qubits,
            });
        }
        Ok(DensityMatrix {
            num_qubits: self.num_qubits,
            mat: self.mat.scale_re(w1).add(&rhs.mat.scale_re(w2)),
            trace_weight: w1 * self.trace_weight + w2 * rhs.trace_weight,
        })
    }

    pub fn scaled(&self, w: f64) -> DensityMatrix {
        DensityMatrix {
            num_qubits: self.num_qubits,
            mat: self.mat.scale_re(w),
            trace_weight: w * self.trace_weight,
        }
    }

    pub fn renormalized(&self) -> DensityMatrix {
        if self.trace_weight <= 0.0 {
            return self.clone();
        }
        DensityMatrix {
            num_qubits: self.num_qubits,
            mat: self.mat.scale_re(1.0 / self.trace_weight),
            trace_weight: 1.0,
        }
    }

    /// Full validity audit: Hermitian, trace consistent with the declared
    /// weight, positive semidefinite within tolerance.
    pub fn check_validity(&self) -> std::result::Result<(), String> {
        if !self.mat.is_hermitian(1e-12 * (1.0 + self.mat.max_abs())) {
            return Err("not Hermitian within 1e-12".into());
        }
        let tr = self.trace();
        if (tr - self.trace_weight).abs() > 1e-10 {
            return Err(format!(
                "trace {tr} deviates from trace_weight {}",
                self.trace_weight
            ));
        }
        let min = self.mat.min_eigenvalue();
        if min < -1e-10 {
            return Err(format!("negative eigenvalue {min:.3e}"));
        }
        Ok(())
    }

    /// Debug-build invariant check after each operation. The PSD audit runs
    /// the dense eigensolver, so it is limited to small registers; larger
    /// states still get the Hermiticity and trace checks.
    pub fn debug_validate(&self) {
        #[cfg(debug_assertions)]
        {
            debug_assert!(
                self.mat.is_hermitian(1e-10 * (1.0 + self.mat.max_abs())),
                "state lost Hermiticity"
            );
            debug_assert!(
                (self.trace() - self.trace_weight).abs() <= 1e-9 * (1.0 + self.trace_weight),
                "trace {} drifted from weight {}",
                self.trace(),
                self.trace_weight
            );
            if self.dim() <= 16 {
                debug_assert!(
                    self.mat.min_eigenvalue() >= -1e-10,
                    "state lost positivity: min eigenvalue {:.3e}",
                    self.mat.min_eigenvalue()
                );
            }
        }
    }
}

fn check_cap(num_qubits: usize, cap: usize) -> Result<()> {
    if num_qubits == 0 {
        return Err(Error::WrongQubitCount {
            expected: 1,
            got: 0,
        });
    }
    if num_qubits > cap {
        return Err(Error::RegisterCapExceeded {
            requested: num_qubits,
            cap,
        });
    }
    Ok(())
}

/// All embedded index blocks for a gate on `targets` inside an n-qubit
/// register: one block per configuration of the untouched qubits, each
/// listing the 2^k full indices in gate-slot order.
fn embedded_blocks(num_qubits: usize, targets: &[usize]) -> Vec<Vec<usize>> {
    let k = targets.len();
    let m = 1usize << k;
    let target_pos: Vec<usize> = targets.iter().map(|&q| num_qubits - 1 - q).collect();
    let rest_pos: Vec<usize> = (0..num_qubits)
        .map(|q| num_qubits - 1 - q)
        .filter(|p| !target_pos.contains(p))
        .collect();

    let mut blocks = Vec::with_capacity(1 << rest_pos.len());
    for rest in 0..(1usize << rest_pos.len()) {
        let mut base = 0usize;
        for (a, &pos) in rest_pos.iter().enumerate() {
            if (rest >> a) & 1 == 1 {
                base |= 1 << pos;
            }
        }
        let mut block = Vec::with_capacity(m);
        for g in 0..m {
            let mut idx = base;
            for (a, &pos) in target_pos.iter().enumerate() {
                if (g >> (k - 1 - a)) & 1 == 1 {
                    idx |= 1 << pos;
                }
            }
            block.push(idx);
        }
        blocks.push(block);
    }
    blocks
}
