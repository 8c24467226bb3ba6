//! `qfault`: fault testing for quantum circuits from the command line.
//!
//! Subcommands: `matrix`, `faults`, `atpg`, `simulate`, `best-vector`.
//! Exit status: 0 on success (for `atpg`: all faults detectable), 2 when an
//! `atpg` run leaves undetectable faults, 1 on usage, parse, or runtime
//! errors.

mod report;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use qfault::{
    basis_bitstring, best_vector_for_gate, bitstring_index, estimate_detection,
    generate_test_set, parse_fault_selectors, Circuit, FaultEnumConfig, FaultSelection,
    FaultSpec, TrialPlan, Trials, DEFAULT_CONFIDENCE, RNG_ALGORITHM,
};
use serde::Serialize;

use report::{
    BestVectorResults, CircuitDigest, CoverageRow, FaultListResults, MatrixResults,
    ReportDocument, RngInfo, TestSetResults, TestVector, ToolInfo, TrialResults,
};

#[derive(Parser)]
#[command(
    name = "qfault",
    version,
    about = "Quantum-circuit fault testing: total matrices, fault enumeration, \
             test-set generation and seeded Monte-Carlo validation"
)]
struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Write the report to this path instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Subcommand)]
enum Command {
    /// Print the circuit's total matrix (column i = output for basis input i)
    Matrix { file: PathBuf },

    /// List the faults a selector targets, one identifier per line
    Faults {
        file: PathBuf,
        /// Fault selectors and/or identifiers, e.g.
        /// `smgf,mmgf:2,rgf:2-3,stuck:0,1,+,-,cross` (default: smgf, mmgf
        /// pairs, rgf x2-x3, stuck 0/1/+/-)
        #[arg(long)]
        faults: Option<String>,
    },

    /// Generate a covering test set and per-fault trial counts
    Atpg {
        file: PathBuf,
        /// Fault selectors and/or identifiers (same grammar as `faults`)
        #[arg(long)]
        faults: Option<String>,
        /// Confidence target for the per-fault trial counts
        #[arg(long, default_value_t = DEFAULT_CONFIDENCE)]
        confidence: f64,
    },

    /// Estimate one fault's detection probability by seeded sampling
    Simulate {
        file: PathBuf,
        /// Fault identifier, e.g. `smgf:0`, `rgf:1x2` or `stuck:0=+`
        #[arg(long)]
        fault: String,
        /// Input basis state as a bitstring, line 0 leftmost
        #[arg(long)]
        input: String,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },

    /// Best basis inputs for detecting the gate of a single-gate circuit
    BestVector { file: PathBuf },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version go to stdout with status 0; usage errors get
            // status 1 (2 is reserved for undetectable faults).
            let code = u8::from(e.use_stderr());
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<ExitCode> {
    let (rendered, code) = match &cli.command {
        Command::Matrix { file } => (cmd_matrix(cli, file)?, ExitCode::SUCCESS),
        Command::Faults { file, faults } => (cmd_faults(cli, file, faults.as_deref())?, ExitCode::SUCCESS),
        Command::Atpg {
            file,
            faults,
            confidence,
        } => cmd_atpg(cli, file, faults.as_deref(), *confidence)?,
        Command::Simulate {
            file,
            fault,
            input,
            trials,
            seed,
        } => (
            cmd_simulate(cli, file, fault, input, *trials, *seed)?,
            ExitCode::SUCCESS,
        ),
        Command::BestVector { file } => (cmd_best_vector(cli, file)?, ExitCode::SUCCESS),
    };
    match &cli.out {
        Some(path) => std::fs::write(path, rendered)
            .with_context(|| format!("writing report to {}", path.display()))?,
        None => print!("{rendered}"),
    }
    Ok(code)
}

fn load_circuit(path: &Path) -> anyhow::Result<Circuit> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    text.parse()
        .with_context(|| format!("parsing {}", path.display()))
}

fn selection_for(circuit: &Circuit, faults: Option<&str>) -> anyhow::Result<FaultSelection> {
    match faults {
        Some(s) => Ok(parse_fault_selectors(s, circuit)?),
        None => Ok(FaultSelection {
            config: FaultEnumConfig::default(),
            explicit: Vec::new(),
        }),
    }
}

fn document<P: Serialize, Q: Serialize>(
    command: &'static str,
    parameters: Q,
    circuit: &Circuit,
    rng: Option<RngInfo>,
    results: P,
) -> ReportDocument<P, Q> {
    ReportDocument {
        tool: ToolInfo::default(),
        command,
        parameters,
        circuit: CircuitDigest::of(circuit),
        rng,
        results,
    }
}

fn render<P: Serialize, Q: Serialize>(
    format: Format,
    doc: &ReportDocument<P, Q>,
    text: String,
) -> anyhow::Result<String> {
    match format {
        Format::Text => Ok(text),
        Format::Machine => report::to_machine(doc),
    }
}

#[derive(Serialize)]
struct FileParams {
    file: String,
}

#[derive(Serialize)]
struct FaultsParams {
    file: String,
    faults: String,
}

#[derive(Serialize)]
struct AtpgParams {
    file: String,
    faults: String,
    confidence: f64,
}

#[derive(Serialize)]
struct SimulateParams {
    file: String,
    fault: String,
    input: String,
    trials: u64,
    seed: u64,
}

fn cmd_matrix(cli: &Cli, file: &Path) -> anyhow::Result<String> {
    let circuit = load_circuit(file)?;
    let u = circuit.total_matrix();
    let dim = u.dim();
    let entries = (0..dim)
        .map(|r| {
            (0..dim)
                .map(|c| {
                    let z = u.get(r, c);
                    [z.re, z.im]
                })
                .collect()
        })
        .collect();
    let doc = document(
        "matrix",
        FileParams {
            file: file.display().to_string(),
        },
        &circuit,
        None,
        MatrixResults { dim, entries },
    );
    render(cli.format, &doc, report::matrix_text(&u))
}

fn cmd_faults(cli: &Cli, file: &Path, faults: Option<&str>) -> anyhow::Result<String> {
    let circuit = load_circuit(file)?;
    let ids: Vec<String> = selection_for(&circuit, faults)?
        .resolve(&circuit)?
        .iter()
        .map(|f| f.to_string())
        .collect();
    let mut text = String::new();
    for id in &ids {
        writeln!(text, "{id}")?;
    }
    let doc = document(
        "faults",
        FaultsParams {
            file: file.display().to_string(),
            faults: faults.unwrap_or("default").to_string(),
        },
        &circuit,
        None,
        FaultListResults {
            count: ids.len(),
            faults: ids,
        },
    );
    render(cli.format, &doc, text)
}

fn cmd_atpg(
    cli: &Cli,
    file: &Path,
    faults: Option<&str>,
    confidence: f64,
) -> anyhow::Result<(String, ExitCode)> {
    let circuit = load_circuit(file)?;
    let targeted = selection_for(&circuit, faults)?.resolve(&circuit)?;
    let report = generate_test_set(&circuit, &targeted, confidence)?;
    let width = circuit.width();

    let mut text = format!("confidence: {confidence}\n");
    if report.test_set.is_empty() {
        text.push_str("test set: empty\n");
    } else {
        let bits: Vec<String> = report
            .test_set
            .iter()
            .map(|&v| basis_bitstring(v, width))
            .collect();
        writeln!(text, "test set: {}", bits.join(", "))?;
    }
    for cov in &report.per_fault {
        writeln!(
            text,
            "{} {} p={} input={} trials={}",
            cov.fault,
            cov.class,
            cov.per_trial_p,
            basis_bitstring(cov.input_index, width),
            cov.trials_needed,
        )?;
    }
    if !report.undetectable.is_empty() {
        let ids: Vec<String> = report.undetectable.iter().map(|f| f.to_string()).collect();
        writeln!(text, "undetectable: {}", ids.join(", "))?;
    }

    let results = TestSetResults {
        confidence: report.confidence,
        test_set: report
            .test_set
            .iter()
            .map(|&v| TestVector {
                index: v,
                bits: basis_bitstring(v, width),
            })
            .collect(),
        per_fault: report
            .per_fault
            .iter()
            .map(|cov| CoverageRow {
                fault: cov.fault.to_string(),
                class: cov.class.to_string(),
                per_trial_p: cov.per_trial_p,
                input_index: cov.input_index,
                input: basis_bitstring(cov.input_index, width),
                trials_needed: match cov.trials_needed {
                    Trials::Finite(k) => k,
                    Trials::Unbounded => unreachable!("covered faults have finite trial counts"),
                },
            })
            .collect(),
        undetectable: report.undetectable.iter().map(|f| f.to_string()).collect(),
    };
    let code = if results.undetectable.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    };
    let doc = document(
        "atpg",
        AtpgParams {
            file: file.display().to_string(),
            faults: faults.unwrap_or("default").to_string(),
            confidence,
        },
        &circuit,
        None,
        results,
    );
    Ok((render(cli.format, &doc, text)?, code))
}

fn cmd_simulate(
    cli: &Cli,
    file: &Path,
    fault_id: &str,
    input: &str,
    trials: u64,
    seed: u64,
) -> anyhow::Result<String> {
    let circuit = load_circuit(file)?;
    let fault = FaultSpec::parse(fault_id, circuit.width())?;
    let input_index = bitstring_index(input, circuit.width())?;
    let plan = TrialPlan {
        circuit: circuit.clone(),
        fault: fault.clone(),
        input_index,
        trials,
        seed,
    };
    let result = estimate_detection(&plan)?;

    let mut text = String::new();
    writeln!(text, "fault: {fault}")?;
    writeln!(text, "input: {input}")?;
    writeln!(text, "trials: {}", result.trials)?;
    writeln!(text, "detections: {}", result.detections)?;
    writeln!(text, "p_hat: {}", result.p_hat)?;
    writeln!(text, "analytic_p: {}", result.analytic_p)?;
    writeln!(text, "abs_error: {}", result.abs_error)?;
    writeln!(text, "rng: {RNG_ALGORITHM} seed {seed}")?;

    let doc = document(
        "simulate",
        SimulateParams {
            file: file.display().to_string(),
            fault: fault.to_string(),
            input: input.to_string(),
            trials,
            seed,
        },
        &circuit,
        Some(RngInfo {
            algorithm: RNG_ALGORITHM,
            seed,
        }),
        TrialResults {
            fault: fault.to_string(),
            input: input.to_string(),
            trials: result.trials,
            detections: result.detections,
            p_hat: result.p_hat,
            analytic_p: result.analytic_p,
            abs_error: result.abs_error,
        },
    );
    render(cli.format, &doc, text)
}

fn cmd_best_vector(cli: &Cli, file: &Path) -> anyhow::Result<String> {
    let circuit = load_circuit(file)?;
    if circuit.gate_count() != 1 {
        bail!(
            "best-vector expects a single-gate circuit, {} has {} gates",
            file.display(),
            circuit.gate_count()
        );
    }
    let matrix = circuit.gates()[0].embed(circuit.width())?;
    let (indices, p) = best_vector_for_gate(&matrix)?;
    let bits: Vec<String> = indices
        .iter()
        .map(|&i| basis_bitstring(i, circuit.width()))
        .collect();

    let text = format!("best inputs: {}\nper-trial p: {p}\n", bits.join(", "));
    let doc = document(
        "best-vector",
        FileParams {
            file: file.display().to_string(),
        },
        &circuit,
        None,
        BestVectorResults {
            indices,
            bits,
            per_trial_p: p,
        },
    );
    render(cli.format, &doc, text)
}
