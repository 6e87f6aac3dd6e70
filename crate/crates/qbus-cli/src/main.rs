use clap::{Args, Parser, Subcommand};
use qbus::gate::TargetGate;
use qbus::{BellDiagonal, ErrorModel, TimeModel};
use qbus_cli::config::{ConfigFile, SweepSpec};
use qbus_cli::runner;
use qbus_cli::CliError;
use std::path::PathBuf;
use std::process::ExitCode;

/// Simulator and verifier for an entanglement-swapping qubit bus.
#[derive(Parser)]
#[command(name = "qbus", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct SweepArgs {
    /// Flat key/value configuration file; flags override it field by field.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Bus lengths, comma separated.
    #[arg(long, value_delimiter = ',')]
    lengths: Option<Vec<usize>>,
    /// Two-qubit gate success probabilities.
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<f64>>,
    /// Detector efficiencies.
    #[arg(long, value_delimiter = ',')]
    eta: Option<Vec<f64>>,
    /// Leakage decays (nonzero values need --model cpe-leak).
    #[arg(long, value_delimiter = ',')]
    gamma: Option<Vec<f64>>,
    /// Error model: dep, cpe, or cpe-leak.
    #[arg(long)]
    model: Option<ErrorModel>,
    /// Purification round budget; enables the purify columns.
    #[arg(long)]
    rounds: Option<u32>,
    /// Purify with noisy local operations.
    #[arg(long)]
    noisy_ops: bool,
    /// Purification stops at this fidelity (default: use the full budget).
    #[arg(long)]
    target: Option<f64>,
    /// Seed echoed into the report (Monte Carlo spot checks only).
    #[arg(long)]
    seed: Option<u64>,
    /// One-qubit gate duration.
    #[arg(long)]
    tau1: Option<f64>,
    /// Two-qubit gate duration.
    #[arg(long)]
    tau2: Option<f64>,
    /// Measurement duration.
    #[arg(long)]
    taum: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the acceptance checks and print one line per criterion.
    Verify,
    /// Sweep the parameter grid into a CSV report plus a JSON echo.
    Sweep {
        #[command(flatten)]
        args: SweepArgs,
        /// Output CSV path; the JSON echo lands next to it.
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare resource swapping against the serial swap-chain baseline.
    Compare {
        #[command(flatten)]
        args: SweepArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Purify the closed-form pair of one length through repeated rounds.
    Purify {
        /// Bus length for the input pair.
        #[arg(long, default_value_t = 25)]
        l: usize,
        #[arg(long, default_value_t = 0.995)]
        p: f64,
        #[arg(long, default_value_t = 0.99)]
        eta: f64,
        #[arg(long, default_value_t = 6)]
        rounds: u32,
        /// Stop once this fidelity is reached.
        #[arg(long, default_value_t = 0.985)]
        target: f64,
        #[arg(long)]
        tau1: Option<f64>,
        #[arg(long)]
        tau2: Option<f64>,
        #[arg(long)]
        taum: Option<f64>,
        /// Optional CSV summary of the variants.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Execute a teleported gate on a Werner or explicit resource pair.
    Gate {
        /// Werner fidelity of the resource pair.
        #[arg(long, conflicts_with = "resource")]
        a: Option<f64>,
        /// Explicit resource components a,b,c,d.
        #[arg(long, value_delimiter = ',')]
        resource: Option<Vec<f64>>,
        #[arg(long, default_value_t = 0.995)]
        p: f64,
        #[arg(long, default_value_t = 0.99)]
        eta: f64,
        /// cnot or cphase.
        #[arg(long, default_value = "cnot")]
        target_gate: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_spec(args: &SweepArgs) -> Result<SweepSpec, CliError> {
    let file = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::Config(format!("cannot read {}: {e}", path.display()))
            })?;
            ConfigFile::parse(&text)?
        }
        None => ConfigFile::default(),
    };
    let flags = ConfigFile {
        lengths: args.lengths.clone(),
        p: args.p.clone(),
        eta: args.eta.clone(),
        gamma: args.gamma.clone(),
        model: args.model,
        rounds: args.rounds,
        noisy_ops: if args.noisy_ops { Some(true) } else { None },
        target: args.target,
        seed: args.seed,
        tau1: args.tau1,
        tau2: args.tau2,
        taum: args.taum,
    };
    Ok(SweepSpec::from_config(&file.overridden_by(&flags))?)
}

fn time_model_from(tau1: Option<f64>, tau2: Option<f64>, taum: Option<f64>) -> Result<Option<TimeModel>, CliError> {
    match (tau1, tau2, taum) {
        (None, None, None) => Ok(None),
        (Some(t1), Some(t2), Some(tm)) => Ok(Some(TimeModel::new(t1, t2, tm)?)),
        _ => Err(CliError::Config(
            "tau1/tau2/taum: time model needs all three durations".into(),
        )),
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Verify => {
            let all_passed = runner::run_verify()?;
            if all_passed {
                println!("all checks passed");
                Ok(())
            } else {
                Err(CliError::CheckFailure("one or more checks failed".into()))
            }
        }
        Command::Sweep { args, out } => {
            let spec = load_spec(&args)?;
            let json_path = runner::run_sweep(&spec, &out)?;
            println!(
                "wrote {} rows to {} (echo: {})",
                spec.tuples().len(),
                out.display(),
                json_path.display()
            );
            Ok(())
        }
        Command::Compare { args, out } => {
            let spec = load_spec(&args)?;
            let (report, crossover) = runner::run_compare(&spec, &out)?;
            print!("{report}");
            println!("crossover length (serial swapping slower beyond): {crossover}");
            println!("wrote {}", out.display());
            Ok(())
        }
        Command::Purify {
            l,
            p,
            eta,
            rounds,
            target,
            tau1,
            tau2,
            taum,
            out,
        } => {
            let tm = time_model_from(tau1, tau2, taum)?;
            let report = runner::run_purify(l, p, eta, rounds, target, tm.as_ref())?;
            let input = report.input;
            println!(
                "input pair (l={l}, p={p}, eta={eta}): a={:.6} b={:.6} c={:.6} d={:.6}",
                input.a, input.b, input.c, input.d
            );
            let mut csv = String::from(
                "variant,fidelity,rounds_used,pairs_consumed,expected_pairs,reached_target\n",
            );
            for (label, fidelity, rounds_used, pairs, expected, reached) in &report.variants {
                println!(
                    "{label}: F = {fidelity:.6} after {rounds_used} rounds ({pairs} pairs, {expected:.1} expected){}",
                    if *reached { "" } else { " [target not reached]" }
                );
                csv.push_str(&format!(
                    "{label},{fidelity},{rounds_used},{pairs},{expected},{reached}\n"
                ));
            }
            if let Some(path) = out {
                std::fs::write(&path, csv).map_err(|e| {
                    CliError::Config(format!("cannot write {}: {e}", path.display()))
                })?;
                println!("wrote {}", path.display());
            }
            Ok(())
        }
        Command::Gate {
            a,
            resource,
            p,
            eta,
            target_gate,
            out,
        } => {
            let resource = match (a, resource) {
                (Some(a), None) => BellDiagonal::werner(a)?,
                (None, Some(v)) if v.len() == 4 => BellDiagonal::new(v[0], v[1], v[2], v[3])?,
                (None, Some(_)) => {
                    return Err(CliError::Config(
                        "resource: expected four components a,b,c,d".into(),
                    ))
                }
                (None, None) => BellDiagonal::perfect(),
                (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
            };
            let target = match target_gate.as_str() {
                "cnot" => TargetGate::Cnot,
                "cphase" => TargetGate::Cphase,
                other => {
                    return Err(CliError::Config(format!(
                        "target_gate: unknown gate '{other}' (expected cnot or cphase)"
                    )))
                }
            };
            let report = runner::run_gate(resource, p, eta, target)?;
            println!(
                "resource a={:.6} b={:.6} c={:.6} d={:.6}",
                report.resource.a, report.resource.b, report.resource.c, report.resource.d
            );
            println!("closed form: {:.9}", report.closed_form);
            println!("circuit:     {:.9}", report.circuit);
            println!("|difference|: {:.3e}", (report.closed_form - report.circuit).abs());
            if report.ordering_warning {
                println!(
                    "warning: the fiducial component does not dominate; the closed form assumes it does"
                );
            }
            if let Some(path) = out {
                let csv = format!(
                    "a,b,c,d,p,eta,target_gate,f_closed,f_circuit\n{},{},{},{},{p},{eta},{target_gate},{},{}\n",
                    report.resource.a,
                    report.resource.b,
                    report.resource.c,
                    report.resource.d,
                    report.closed_form,
                    report.circuit
                );
                std::fs::write(&path, csv).map_err(|e| {
                    CliError::Config(format!("cannot write {}: {e}", path.display()))
                })?;
                println!("wrote {}", path.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
