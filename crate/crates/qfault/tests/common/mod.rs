//! Independent state-vector oracle shared by the integration tests.
#![allow(dead_code)] // each test binary uses a different subset

//!
//! Everything here recomputes circuit and fault semantics from scratch:
//! amplitudes are routed through gates index-by-index (no matrices are ever
//! built), gate constants are written out locally, and fault mutation is
//! reimplemented. Agreement between the library's matrix pipeline and this
//! code path is therefore a meaningful check, not a tautology.

use std::path::Path;

use num_complex::Complex64;

/// A gate as the oracle sees it: a plain control list plus an action.
#[derive(Debug, Clone)]
pub struct OracleGate {
    pub controls: Vec<usize>,
    pub action: Action,
}

#[derive(Debug, Clone)]
pub enum Action {
    /// Apply a 2×2 matrix to one line.
    Single([[Complex64; 2]; 2], usize),
    /// Exchange two lines.
    Swap(usize, usize),
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn x_table() -> [[Complex64; 2]; 2] {
    [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]]
}

fn h_table() -> [[Complex64; 2]; 2] {
    let s = 0.5f64.sqrt();
    [[c(s, 0.0), c(s, 0.0)], [c(s, 0.0), c(-s, 0.0)]]
}

impl OracleGate {
    pub fn x(line: usize) -> Self {
        OracleGate {
            controls: vec![],
            action: Action::Single(x_table(), line),
        }
    }

    pub fn h(line: usize) -> Self {
        OracleGate {
            controls: vec![],
            action: Action::Single(h_table(), line),
        }
    }

    pub fn cx(control: usize, target: usize) -> Self {
        OracleGate {
            controls: vec![control],
            action: Action::Single(x_table(), target),
        }
    }

    pub fn ccx(c1: usize, c2: usize, target: usize) -> Self {
        OracleGate {
            controls: vec![c1, c2],
            action: Action::Single(x_table(), target),
        }
    }
}

/// Builds the oracle's view of a library gate. Only the *description*
/// (which kind, which lines, which custom entries) is read from the
/// library; constants for the named kinds and all semantics stay local.
pub fn oracle_gate_of(gate: &qfault::Gate) -> OracleGate {
    use qfault::GateKind;
    let controls: Vec<usize> = gate.controls().iter().copied().collect();
    let t = gate.targets();
    let single = |m: [[Complex64; 2]; 2]| Action::Single(m, t[0]);
    let s = 0.5f64.sqrt();
    let action = match gate.kind() {
        GateKind::I => single([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]]),
        GateKind::X | GateKind::Cx | GateKind::Ccx => single(x_table()),
        GateKind::Y => single([[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]]),
        GateKind::Z | GateKind::Cz => {
            single([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]])
        }
        GateKind::H => single(h_table()),
        GateKind::S => single([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 1.0)]]),
        GateKind::T => single([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(s, s)]]),
        GateKind::Swap | GateKind::Cswap => Action::Swap(t[0], t[1]),
        GateKind::Custom(m) => single([
            [m.get(0, 0), m.get(0, 1)],
            [m.get(1, 0), m.get(1, 1)],
        ]),
    };
    OracleGate { controls, action }
}

fn bit(index: usize, line: usize, width: usize) -> usize {
    (index >> (width - 1 - line)) & 1
}

/// Routes the amplitudes of one gate application, in place.
pub fn apply_gate(amps: &mut [Complex64], gate: &OracleGate, width: usize) {
    let dim = amps.len();
    let active = |idx: usize| gate.controls.iter().all(|&l| bit(idx, l, width) == 1);
    match &gate.action {
        Action::Single(m, line) => {
            let mask = 1usize << (width - 1 - line);
            for idx in 0..dim {
                if bit(idx, *line, width) == 0 && active(idx) {
                    let hi = idx | mask;
                    let (a0, a1) = (amps[idx], amps[hi]);
                    amps[idx] = m[0][0] * a0 + m[0][1] * a1;
                    amps[hi] = m[1][0] * a0 + m[1][1] * a1;
                }
            }
        }
        Action::Swap(a, b) => {
            let mask_a = 1usize << (width - 1 - a);
            let mask_b = 1usize << (width - 1 - b);
            for idx in 0..dim {
                if bit(idx, *a, width) == 1 && bit(idx, *b, width) == 0 && active(idx) {
                    let other = (idx & !mask_a) | mask_b;
                    amps.swap(idx, other);
                }
            }
        }
    }
}

/// The faults the oracle can inject, mirroring the library's semantics
/// independently.
#[derive(Debug, Clone)]
pub enum OracleFault {
    /// These gate positions vanish.
    Missing(Vec<usize>),
    /// This gate runs `times` times in a row instead of once.
    Repeated { gate: usize, times: usize },
    /// This input line enters the circuit as a|0⟩ + b|1⟩ whatever the test
    /// vector says.
    Stuck { line: usize, a: Complex64, b: Complex64 },
}

/// Output amplitudes for basis input `input` under an optional fault.
pub fn oracle_output(
    width: usize,
    gates: &[OracleGate],
    fault: Option<&OracleFault>,
    input: usize,
) -> Vec<Complex64> {
    let dim = 1usize << width;
    let mut amps = vec![c(0.0, 0.0); dim];
    match fault {
        Some(OracleFault::Stuck { line, a, b }) => {
            let mask = 1usize << (width - 1 - line);
            let base = input & !mask;
            amps[base] = *a;
            amps[base | mask] = *b;
        }
        _ => amps[input] = c(1.0, 0.0),
    }
    for (i, gate) in gates.iter().enumerate() {
        let times = match fault {
            Some(OracleFault::Missing(missing)) if missing.contains(&i) => 0,
            Some(OracleFault::Repeated { gate: g, times }) if *g == i => *times,
            _ => 1,
        };
        for _ in 0..times {
            apply_gate(&mut amps, gate, width);
        }
    }
    amps
}

/// |⟨a|b⟩|² computed locally.
pub fn oracle_fidelity(a: &[Complex64], b: &[Complex64]) -> f64 {
    let inner: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    inner.norm_sqr().clamp(0.0, 1.0)
}

/// Detection probability of `fault` at `input`: one minus the fidelity of
/// fault-free and faulty outputs.
pub fn oracle_detection_p(
    width: usize,
    gates: &[OracleGate],
    fault: &OracleFault,
    input: usize,
) -> f64 {
    let good = oracle_output(width, gates, None, input);
    let bad = oracle_output(width, gates, Some(fault), input);
    1.0 - oracle_fidelity(&good, &bad)
}

/// Detection class with the same thresholds the library documents,
/// re-stated locally.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleClass {
    Deterministic,
    Probabilistic,
    Undetectable,
}

pub fn oracle_class(p: f64) -> OracleClass {
    if p >= 1.0 - 1e-9 {
        OracleClass::Deterministic
    } else if p <= 1e-9 {
        OracleClass::Undetectable
    } else {
        OracleClass::Probabilistic
    }
}

/// Maps the library's class enum onto the oracle's for comparison.
pub fn class_of(library: qfault::DetectionClass) -> OracleClass {
    match library {
        qfault::DetectionClass::Deterministic => OracleClass::Deterministic,
        qfault::DetectionClass::Probabilistic => OracleClass::Probabilistic,
        qfault::DetectionClass::Undetectable => OracleClass::Undetectable,
    }
}

/// The oracle's fault for a library fault spec, for the classes the oracle
/// models. Returns `None` for classes outside the oracle's scope.
pub fn oracle_fault_of(fault: &qfault::FaultSpec) -> Option<OracleFault> {
    match fault {
        qfault::FaultSpec::Smgf { gate } => Some(OracleFault::Missing(vec![*gate])),
        qfault::FaultSpec::Mmgf { gates } => Some(OracleFault::Missing(gates.clone())),
        qfault::FaultSpec::Rgf { gate, multiplicity } => Some(OracleFault::Repeated {
            gate: *gate,
            times: *multiplicity,
        }),
        qfault::FaultSpec::StuckAt { line, alpha, beta } => Some(OracleFault::Stuck {
            line: *line,
            a: *alpha,
            b: *beta,
        }),
        _ => None,
    }
}

/// Builds matching (library, oracle) circuits over {X, H, CX} from a byte
/// stream of choices, for the oracle-equivalence sweeps.
pub fn xhcx_circuit_from_choices(
    width: usize,
    choices: &[(u8, usize, usize)],
) -> (qfault::Circuit, Vec<OracleGate>) {
    use qfault::{Gate, GateKind};
    let mut lib = qfault::Circuit::new(width).unwrap();
    let mut oracle = Vec::new();
    for &(kind, a, b) in choices {
        let a = a % width;
        let b = b % width;
        match kind % 3 {
            0 => {
                lib.push(Gate::new(GateKind::X, [], vec![a]).unwrap()).unwrap();
                oracle.push(OracleGate::x(a));
            }
            1 => {
                lib.push(Gate::new(GateKind::H, [], vec![a]).unwrap()).unwrap();
                oracle.push(OracleGate::h(a));
            }
            _ => {
                if width == 1 {
                    lib.push(Gate::new(GateKind::X, [], vec![a]).unwrap()).unwrap();
                    oracle.push(OracleGate::x(a));
                } else {
                    let b = if a == b { (a + 1) % width } else { b };
                    lib.push(Gate::new(GateKind::Cx, [a], vec![b]).unwrap()).unwrap();
                    oracle.push(OracleGate::cx(a, b));
                }
            }
        }
    }
    (lib, oracle)
}

/// Builds matching (library, oracle) NCT circuits (X, CX, CCX).
pub fn nct_circuit_from_choices(
    width: usize,
    choices: &[(u8, usize, usize, usize)],
) -> (qfault::Circuit, Vec<OracleGate>) {
    use qfault::{Gate, GateKind};
    let mut lib = qfault::Circuit::new(width).unwrap();
    let mut oracle = Vec::new();
    for &(kind, a, b, d) in choices {
        let a = a % width;
        let b = b % width;
        let d = d % width;
        match kind % 3 {
            0 => {
                lib.push(Gate::new(GateKind::X, [], vec![a]).unwrap()).unwrap();
                oracle.push(OracleGate::x(a));
            }
            1 if width >= 2 => {
                let b = if a == b { (a + 1) % width } else { b };
                lib.push(Gate::new(GateKind::Cx, [a], vec![b]).unwrap()).unwrap();
                oracle.push(OracleGate::cx(a, b));
            }
            _ if width >= 3 => {
                let b = if b == a { (a + 1) % width } else { b };
                let mut d = d;
                while d == a || d == b {
                    d = (d + 1) % width;
                }
                lib.push(Gate::new(GateKind::Ccx, [a, b], vec![d]).unwrap()).unwrap();
                oracle.push(OracleGate::ccx(a, b, d));
            }
            _ => {
                lib.push(Gate::new(GateKind::X, [], vec![a]).unwrap()).unwrap();
                oracle.push(OracleGate::x(a));
            }
        }
    }
    (lib, oracle)
}

/// Renders the regenerated test-vector table for every `.qc` file in the
/// corpus directory, in filename order. The acceptance suite compares this
/// string byte-for-byte against the shipped `docs/test_vectors.md`.
pub fn corpus_table(circuits_dir: &Path) -> String {
    use qfault::{basis_bitstring, enumerate_faults, generate_test_set, FaultEnumConfig};

    let mut names: Vec<String> = std::fs::read_dir(circuits_dir)
        .expect("corpus directory exists")
        .map(|e| e.expect("readable dir entry").file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".qc"))
        .collect();
    names.sort();

    let mut out = String::new();
    out.push_str("# Test-vector reports for the bundled circuit corpus\n\n");
    out.push_str(
        "Do not edit by hand: regenerate with\n`cargo test -p qfault --test acceptance \
         regenerate_test_vectors_table -- --ignored`.\n\n",
    );
    out.push_str(
        "Settings: confidence 0.99; default fault classes (every single missing gate, \
         missing-gate pairs, repetitions x2 and x3, stuck lines at |0>, |1>, |+>, |->).\n",
    );

    for name in &names {
        let text = std::fs::read_to_string(circuits_dir.join(name)).expect("readable circuit");
        let circuit: qfault::Circuit = text.parse().expect("corpus circuit parses");
        let faults = enumerate_faults(&circuit, &FaultEnumConfig::default());
        let report = generate_test_set(&circuit, &faults, 0.99).expect("report generates");
        let width = circuit.width();

        out.push_str(&format!(
            "\n## {} (width {}, {} gates)\n\n",
            name,
            width,
            circuit.gate_count()
        ));
        if report.test_set.is_empty() {
            out.push_str("Test set: empty\n\n");
        } else {
            let vectors: Vec<String> = report
                .test_set
                .iter()
                .map(|&v| format!("`{}`", basis_bitstring(v, width)))
                .collect();
            out.push_str(&format!("Test set: {}\n\n", vectors.join(", ")));
        }
        out.push_str("| fault | class | p | input | trials to 0.99 |\n");
        out.push_str("|---|---|---|---|---|\n");
        for fault in &faults {
            match report.per_fault.iter().find(|cov| cov.fault == *fault) {
                Some(cov) => out.push_str(&format!(
                    "| {} | {} | {} | {} | {} |\n",
                    fault,
                    cov.class,
                    cov.per_trial_p,
                    basis_bitstring(cov.input_index, width),
                    cov.trials_needed,
                )),
                None => out.push_str(&format!("| {fault} | undetectable | 0 | — | — |\n")),
            }
        }
    }
    out
}

/// Repo root (two levels above the crate manifest).
pub fn repo_root() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .ancestors()
        .nth(2)
        .expect("crate lives two levels under the repo root")
        .to_path_buf()
}
