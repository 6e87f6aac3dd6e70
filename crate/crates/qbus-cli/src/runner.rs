//! The work behind each subcommand: row computation, the sweep work pool,
//! baseline comparison, purification and gate one-shots, and the
//! verification suite.

use crate::config::SweepSpec;
use crate::report::{write_csv, ReportRow};
use crate::CliError;
use qbus::belldiag::{
    bell_diagonal_closed_form, fidelity_closed_form, fidelity_closed_form_oracle,
    ExponentConvention,
};
use qbus::gate::{gate_fidelity_circuit, gate_fidelity_closed_form, dominant_component_ok, TargetGate};
use qbus::purify::{purify_to_target, PurifyConfig, PurifyStatus};
use qbus::swap::{simulate_bus_exact, swap_chain_baseline, BusSpec};
use qbus::{BellDiagonal, ErrorModel, NoiseModel, TimeModel, DEFAULT_QUBIT_CAP};
use std::path::{Path, PathBuf};

fn noise_for(spec: &SweepSpec, p: f64, eta: f64, gamma: f64) -> Result<NoiseModel, CliError> {
    let base = match spec.error_model {
        ErrorModel::Dep => NoiseModel::depolarizing(p, eta)?,
        ErrorModel::Cpe | ErrorModel::CpeLeakage => NoiseModel::cpe_discrete(p, eta)?,
    };
    Ok(base.with_gamma(gamma)?)
}

/// Computes one report row. Exact simulation is attempted only for even
/// lengths within the register cap; purification and the gate column use
/// the closed-form pair (published exponents for the purification anchor
/// flow, validated exponents for the gate resource), both at gamma = 0.
pub fn compute_row(spec: &SweepSpec, l: usize, p: f64, eta: f64, gamma: f64) -> Result<ReportRow, CliError> {
    let f_closed_paper = Some(fidelity_closed_form(l, p, eta, gamma)?);
    let f_closed_oracle_convention = if gamma == 0.0 {
        Some(fidelity_closed_form_oracle(l, p, eta)?)
    } else {
        None
    };
    let f_exact = if l.is_multiple_of(2) && l <= DEFAULT_QUBIT_CAP {
        let noise = noise_for(spec, p, eta, gamma)?;
        let bus = BusSpec::new(l, noise, spec.error_model)?;
        Some(simulate_bus_exact(&bus)?.fidelity_raw)
    } else {
        None
    };

    let mut f_after_purify = None;
    let mut rounds_used = None;
    let mut pairs_consumed = None;
    let mut purified_pair: Option<BellDiagonal> = None;
    if let Some(rounds) = spec.purify_rounds {
        if gamma == 0.0 {
            let input = bell_diagonal_closed_form(l, p, eta, ExponentConvention::Published)?;
            let noise = NoiseModel::depolarizing(p, eta)?;
            let config = PurifyConfig::new(rounds, spec.noisy_ops, noise, 0)?;
            let target = spec.purify_target.unwrap_or(1.0);
            let out = purify_to_target(&input, &config, target, spec.time_model.as_ref())?;
            f_after_purify = Some(out.state.fidelity());
            rounds_used = Some(out.rounds_used);
            pairs_consumed = Some(out.pairs_consumed);
            purified_pair = Some(out.state);
        }
    }

    let (t_entswap, t_swap) = match &spec.time_model {
        Some(tm) => {
            let (a, b) = qbus::protocol_times(l, tm);
            (Some(a), Some(b))
        }
        None => (None, None),
    };

    let f_gate = if gamma == 0.0 {
        let resource = match purified_pair {
            Some(pair) => pair,
            None => bell_diagonal_closed_form(l, p, eta, ExponentConvention::Oracle)?,
        };
        Some(gate_fidelity_closed_form(&resource, p, eta)?)
    } else {
        None
    };

    let row = ReportRow {
        l,
        p,
        eta,
        gamma,
        error_model: spec.error_model,
        f_closed_paper,
        f_closed_oracle_convention,
        f_exact,
        f_after_purify,
        rounds_used,
        pairs_consumed,
        t_entswap,
        t_swap,
        f_gate,
    };
    check_row_bounds(&row)?;
    Ok(row)
}

/// Every populated fidelity must land in [0, 1]; violations abort with a
/// diagnostic instead of being clamped.
fn check_row_bounds(row: &ReportRow) -> Result<(), CliError> {
    for (name, v) in [
        ("f_closed_paper", row.f_closed_paper),
        ("f_closed_oracle_convention", row.f_closed_oracle_convention),
        ("f_exact", row.f_exact),
        ("f_after_purify", row.f_after_purify),
        ("f_gate", row.f_gate),
    ] {
        if let Some(v) = v {
            if !(-1e-12..=1.0 + 1e-12).contains(&v) {
                return Err(CliError::CheckFailure(format!(
                    "{name} = {v} out of [0, 1] at l={} p={} eta={} gamma={}",
                    row.l, row.p, row.eta, row.gamma
                )));
            }
        }
    }
    Ok(())
}

/// Evaluates the sweep tuples in a small thread pool and writes the rows
/// in spec order regardless of completion order: `<out>.csv` plus an
/// adjacent JSON echo of the spec and rows.
pub fn run_sweep(spec: &SweepSpec, out_path: &Path) -> Result<PathBuf, CliError> {
    let tuples = spec.tuples();
    let rows = compute_rows_pooled(spec, &tuples)?;

    let csv = write_csv(&rows);
    write_output(out_path, &csv)?;
    let json_path = json_sibling(out_path);
    let json = serde_json::json!({
        "spec": spec.to_json(),
        "rows": rows.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
    });
    write_output(&json_path, &format!("{}\n", serde_json::to_string_pretty(&json).unwrap()))?;
    Ok(json_path)
}

fn compute_rows_pooled(
    spec: &SweepSpec,
    tuples: &[(usize, f64, f64, f64)],
) -> Result<Vec<ReportRow>, CliError> {
    let workers = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(tuples.len().max(1))
        .min(8);
    if workers <= 1 || tuples.len() <= 1 {
        return tuples
            .iter()
            .map(|&(l, p, eta, gamma)| compute_row(spec, l, p, eta, gamma))
            .collect();
    }
    let mut indexed: Vec<(usize, Result<ReportRow, CliError>)> = Vec::with_capacity(tuples.len());
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for chunk_id in 0..workers {
            let spec = &*spec;
            handles.push(scope.spawn(move || {
                let mut out = Vec::new();
                for (idx, &(l, p, eta, gamma)) in tuples.iter().enumerate() {
                    if idx % workers == chunk_id {
                        out.push((idx, compute_row(spec, l, p, eta, gamma)));
                    }
                }
                out
            }));
        }
        for handle in handles {
            indexed.extend(handle.join().expect("sweep worker panicked"));
        }
    });
    indexed.sort_by_key(|(idx, _)| *idx);
    indexed.into_iter().map(|(_, row)| row).collect()
}

fn json_sibling(out_path: &Path) -> PathBuf {
    out_path.with_extension("json")
}

fn write_output(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}

/// Per-length comparison of the parallel protocol against the serial
/// swap-chain baseline, asserting the published bound along the way.
/// Returns the report text and the crossover length.
pub fn run_compare(spec: &SweepSpec, out_path: &Path) -> Result<(String, usize), CliError> {
    let tm = spec
        .time_model
        .unwrap_or_else(|| TimeModel::new(1.0, 1.0, 1.0).expect("unit times are valid"));
    let eta = spec.eta_values[0];
    let mut out = String::from("l,p,f_entswap,f_chain,bound,t_entswap,t_swap\n");
    for &l in &spec.lengths {
        if l + 2 > DEFAULT_QUBIT_CAP {
            return Err(CliError::Config(format!(
                "lengths: chain baseline for l = {l} needs {} qubits, above the cap {DEFAULT_QUBIT_CAP}",
                l + 2
            )));
        }
        for &p in &spec.p_values {
            let f_entswap = fidelity_closed_form_oracle(l, p, eta)?;
            let chain = swap_chain_baseline(l, p)?;
            if p < 1.0 && chain.fidelity >= chain.bound {
                return Err(CliError::CheckFailure(format!(
                    "chain fidelity {} at l={l}, p={p} is not below the bound {}",
                    chain.fidelity, chain.bound
                )));
            }
            let (t_ent, t_swap) = qbus::protocol_times(l, &tm);
            out.push_str(&format!(
                "{l},{p},{f_entswap},{},{},{t_ent},{t_swap}\n",
                chain.fidelity, chain.bound
            ));
        }
    }
    write_output(out_path, &out)?;
    Ok((out, tm.crossover_length()))
}

/// Runs the four documented purification variants from the closed-form
/// pair of the requested length and returns a printable table.
pub struct PurifyReport {
    pub input: BellDiagonal,
    /// (label, final fidelity, rounds used, pairs consumed, expected pairs,
    /// reached target)
    pub variants: Vec<(String, f64, u32, u64, f64, bool)>,
}

pub fn run_purify(
    l: usize,
    p: f64,
    eta: f64,
    rounds: u32,
    target: f64,
    time_model: Option<&TimeModel>,
) -> Result<PurifyReport, CliError> {
    let input = bell_diagonal_closed_form(l, p, eta, ExponentConvention::Published)?;
    let werner = BellDiagonal::werner(input.fidelity())?;
    let noise = NoiseModel::depolarizing(p, eta)?;
    let mut variants = Vec::new();
    for (label, pair, noisy) in [
        ("closed-form input, noisy ops", input, true),
        ("closed-form input, ideal ops", input, false),
        ("werner input, noisy ops", werner, true),
        ("werner input, ideal ops", werner, false),
    ] {
        let config = PurifyConfig::new(rounds, noisy, noise, 0)?;
        let out = purify_to_target(&pair, &config, target, time_model)?;
        variants.push((
            label.to_string(),
            out.state.fidelity(),
            out.rounds_used,
            out.pairs_consumed,
            out.expected_pairs,
            out.status == PurifyStatus::ReachedTarget,
        ));
    }
    Ok(PurifyReport { input, variants })
}

/// One teleported-gate evaluation: closed form and circuit side by side.
pub struct GateReport {
    pub resource: BellDiagonal,
    pub closed_form: f64,
    pub circuit: f64,
    pub ordering_warning: bool,
}

pub fn run_gate(
    resource: BellDiagonal,
    p: f64,
    eta: f64,
    target: TargetGate,
) -> Result<GateReport, CliError> {
    let noise = NoiseModel::depolarizing(p, eta)?;
    let closed_form = gate_fidelity_closed_form(&resource, p, eta)?;
    let circuit = gate_fidelity_circuit(&resource, &noise, target)?;
    Ok(GateReport {
        resource,
        closed_form,
        circuit,
        ordering_warning: !dominant_component_ok(&resource),
    })
}

/// Runs the acceptance checks, printing one line per criterion; Ok(true)
/// means everything passed.
pub fn run_verify() -> Result<bool, CliError> {
    let results = qbus::verify::run_all()?;
    let mut all_passed = true;
    for r in &results {
        println!("{}", r.status_line());
        all_passed &= r.passed;
    }
    Ok(all_passed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ConfigFile;

    fn spec_for(text: &str) -> SweepSpec {
        SweepSpec::from_config(&ConfigFile::parse(text).unwrap()).unwrap()
    }

    #[test]
    fn published_point_row() {
        let spec = spec_for("lengths = 25\np = 0.995\neta = 0.99");
        let row = compute_row(&spec, 25, 0.995, 0.99, 0.0).unwrap();
        assert!((row.f_closed_paper.unwrap() - 0.734).abs() < 1e-3);
        assert!(row.f_exact.is_none(), "odd length has no exact simulation");
        assert!(row.f_closed_oracle_convention.is_some());
    }

    #[test]
    fn noiseless_even_length_has_exact_one() {
        let spec = spec_for("lengths = 2\np = 1\neta = 1");
        let row = compute_row(&spec, 2, 1.0, 1.0, 0.0).unwrap();
        assert!((row.f_exact.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn leakage_rows_blank_the_oracle_column() {
        let spec = spec_for("lengths = 4\nmodel = cpe-leak\ngamma = 0.001");
        let row = compute_row(&spec, 4, 0.995, 0.99, 0.001).unwrap();
        assert!(row.f_closed_oracle_convention.is_none());
        assert!(row.f_gate.is_none());
        assert!(row.f_exact.is_some());
    }

    #[test]
    fn purify_columns_populated_when_requested() {
        let spec = spec_for("lengths = 8\nrounds = 2\nnoisy_ops = true");
        let row = compute_row(&spec, 8, 0.995, 0.99, 0.0).unwrap();
        assert_eq!(row.rounds_used, Some(2));
        assert_eq!(row.pairs_consumed, Some(4));
        assert!(row.f_after_purify.unwrap() > row.f_closed_paper.unwrap());
    }

    #[test]
    fn sweep_order_is_deterministic_under_the_pool() {
        let spec = spec_for("lengths = 2, 4, 6\np = 0.9, 0.99\neta = 0.95, 1.0");
        let tuples = spec.tuples();
        let rows = compute_rows_pooled(&spec, &tuples).unwrap();
        assert_eq!(rows.len(), 12);
        for (row, &(l, p, eta, gamma)) in rows.iter().zip(tuples.iter()) {
            assert_eq!((row.l, row.p, row.eta, row.gamma), (l, p, eta, gamma));
        }
    }

    #[test]
    fn compare_rejects_over_cap_lengths() {
        let spec = spec_for("lengths = 10\np = 0.9");
        let err = run_compare(&spec, Path::new("/tmp/qbus-test-compare-reject.csv")).unwrap_err();
        assert!(matches!(err, CliError::Config(_)));
    }

    #[test]
    fn gate_runner_matches_circuit_and_warns() {
        let report = run_gate(BellDiagonal::werner(0.9).unwrap(), 0.99, 0.99, TargetGate::Cnot)
            .unwrap();
        assert!((report.closed_form - report.circuit).abs() < 1e-9);
        assert!(!report.ordering_warning);
        let skew = BellDiagonal::new(0.2, 0.5, 0.2, 0.1).unwrap();
        let report = run_gate(skew, 1.0, 1.0, TargetGate::Cnot).unwrap();
        assert!(report.ordering_warning);
    }
}
