//! Fault classes, fault injection, enumeration, and the fault-id /
//! selector grammars.
//!
//! Supported classes:
//!
//! * **SMGF** — a single gate missing.
//! * **MMGF** — two or more gates missing together.
//! * **RGF** — a gate occurring `t ≥ 2` consecutive times instead of once
//!   (`t` counts total occurrences, the original included).
//! * **PGF** — a gate replaced by a user-supplied defective variant, e.g. a
//!   Toffoli degraded to a CNOT.
//! * **CrossPoint** — a control point appearing on or disappearing from a
//!   gate.
//! * **StuckAt** — an input line fixed at α|0⟩+β|1⟩ regardless of the
//!   applied test vector (input boundary only; gates untouched).
//!
//! Fault identifier strings:
//!
//! ```text
//! smgf:<g>
//! mmgf:<g1>,<g2>[,...]
//! rgf:<g>x<t>
//! pgf:<g>=<gate-spec>          (gate-spec in circuit-file syntax)
//! cross:+<g>@<line>            (control added)
//! cross:-<g>@<line>            (control removed)
//! stuck:<line>=<0|1|+|-|(<re_a>,<im_a>,<re_b>,<im_b>)>
//! ```

use std::fmt;

use num_complex::Complex64;

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::linalg::StateVector;
use crate::parse::parse_gate_spec;

/// Direction of a cross-point fault.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossMode {
    /// A spurious control appears on the gate.
    Add,
    /// An existing control disappears from the gate.
    Remove,
}

/// One concrete fault to inject.
#[derive(Debug, Clone, PartialEq)]
pub enum FaultSpec {
    Smgf {
        gate: usize,
    },
    Mmgf {
        gates: Vec<usize>,
    },
    Rgf {
        gate: usize,
        multiplicity: usize,
    },
    Pgf {
        gate: usize,
        replacement: Gate,
    },
    CrossPoint {
        gate: usize,
        line: usize,
        mode: CrossMode,
    },
    StuckAt {
        line: usize,
        alpha: Complex64,
        beta: Complex64,
    },
}

const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// The four named stuck states, in canonical order |0⟩, |1⟩, |+⟩, |−⟩.
pub fn named_stuck_states() -> Vec<(Complex64, Complex64)> {
    vec![
        (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
        (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)),
        (Complex64::new(SQRT_HALF, 0.0), Complex64::new(SQRT_HALF, 0.0)),
        (Complex64::new(SQRT_HALF, 0.0), Complex64::new(-SQRT_HALF, 0.0)),
    ]
}

fn stuck_state_token(alpha: Complex64, beta: Complex64) -> String {
    let named = named_stuck_states();
    for (token, (a, b)) in ["0", "1", "+", "-"].iter().zip(&named) {
        if alpha == *a && beta == *b {
            return (*token).to_string();
        }
    }
    format!("({},{},{},{})", alpha.re, alpha.im, beta.re, beta.im)
}

fn parse_stuck_state(token: &str) -> Result<(Complex64, Complex64)> {
    let named = named_stuck_states();
    match token {
        "0" => return Ok(named[0]),
        "1" => return Ok(named[1]),
        "+" => return Ok(named[2]),
        "-" => return Ok(named[3]),
        _ => {}
    }
    let inner = token
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| {
            Error::InvalidFault(format!(
                "`{token}` is not a stuck state (expected 0, 1, +, - or (re_a,im_a,re_b,im_b))"
            ))
        })?;
    let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(Error::InvalidFault(format!(
            "stuck state tuple needs 4 numbers, got {}",
            parts.len()
        )));
    }
    let mut vals = [0.0f64; 4];
    for (i, p) in parts.iter().enumerate() {
        vals[i] = p
            .parse()
            .map_err(|_| Error::InvalidFault(format!("`{p}` is not a number")))?;
    }
    Ok((
        Complex64::new(vals[0], vals[1]),
        Complex64::new(vals[2], vals[3]),
    ))
}

impl FaultSpec {
    /// Parses a fault identifier. `width` is needed to interpret the
    /// embedded gate spec of `pgf:` identifiers and to range-check nothing
    /// else; full validation against a circuit happens in
    /// [`FaultSpec::validate`].
    pub fn parse(id: &str, width: usize) -> Result<FaultSpec> {
        let bad = |msg: String| Error::InvalidFault(msg);
        let (class, rest) = id
            .split_once(':')
            .ok_or_else(|| bad(format!("`{id}` is not a fault id (missing `:`)")))?;
        let parse_usize = |tok: &str, what: &str| -> Result<usize> {
            tok.trim()
                .parse()
                .map_err(|_| bad(format!("`{tok}` is not a {what}")))
        };
        match class {
            "smgf" => Ok(FaultSpec::Smgf {
                gate: parse_usize(rest, "gate index")?,
            }),
            "mmgf" => {
                let gates = rest
                    .split(',')
                    .map(|t| parse_usize(t, "gate index"))
                    .collect::<Result<Vec<_>>>()?;
                Ok(FaultSpec::Mmgf { gates })
            }
            "rgf" => {
                let (g, t) = rest
                    .split_once('x')
                    .ok_or_else(|| bad(format!("`{id}` must look like rgf:<g>x<t>")))?;
                Ok(FaultSpec::Rgf {
                    gate: parse_usize(g, "gate index")?,
                    multiplicity: parse_usize(t, "multiplicity")?,
                })
            }
            "pgf" => {
                let (g, spec) = rest
                    .split_once('=')
                    .ok_or_else(|| bad(format!("`{id}` must look like pgf:<g>=<gate-spec>")))?;
                let replacement = parse_gate_spec(spec.trim(), width)
                    .map_err(|e| bad(format!("bad replacement gate: {e}")))?;
                Ok(FaultSpec::Pgf {
                    gate: parse_usize(g, "gate index")?,
                    replacement,
                })
            }
            "cross" => {
                let (mode, rest) = match rest.as_bytes().first() {
                    Some(b'+') => (CrossMode::Add, &rest[1..]),
                    Some(b'-') => (CrossMode::Remove, &rest[1..]),
                    _ => {
                        return Err(bad(format!(
                            "`{id}` must look like cross:+<g>@<line> or cross:-<g>@<line>"
                        )))
                    }
                };
                let (g, line) = rest
                    .split_once('@')
                    .ok_or_else(|| bad(format!("`{id}` is missing `@<line>`")))?;
                Ok(FaultSpec::CrossPoint {
                    gate: parse_usize(g, "gate index")?,
                    line: parse_usize(line, "line number")?,
                    mode,
                })
            }
            "stuck" => {
                let (line, state) = rest
                    .split_once('=')
                    .ok_or_else(|| bad(format!("`{id}` must look like stuck:<line>=<state>")))?;
                let (alpha, beta) = parse_stuck_state(state.trim())?;
                Ok(FaultSpec::StuckAt {
                    line: parse_usize(line, "line number")?,
                    alpha,
                    beta,
                })
            }
            other => Err(bad(format!("unknown fault class `{other}`"))),
        }
    }

    /// Checks the fault against a concrete circuit.
    pub fn validate(&self, c: &Circuit) -> Result<()> {
        let bad = |msg: String| Error::InvalidFault(msg);
        let check_gate = |g: usize| -> Result<()> {
            if g >= c.gate_count() {
                return Err(bad(format!(
                    "gate index {g} out of range (circuit has {} gates)",
                    c.gate_count()
                )));
            }
            Ok(())
        };
        match self {
            FaultSpec::Smgf { gate } => check_gate(*gate),
            FaultSpec::Mmgf { gates } => {
                if gates.len() < 2 {
                    return Err(bad("mmgf needs at least two gate indices".into()));
                }
                if !gates.windows(2).all(|w| w[0] < w[1]) {
                    return Err(bad(
                        "mmgf gate indices must be strictly ascending".into(),
                    ));
                }
                gates.iter().try_for_each(|&g| check_gate(g))
            }
            FaultSpec::Rgf { gate, multiplicity } => {
                check_gate(*gate)?;
                if *multiplicity < 2 {
                    return Err(bad("rgf multiplicity must be at least 2".into()));
                }
                Ok(())
            }
            FaultSpec::Pgf { gate, replacement } => {
                check_gate(*gate)?;
                if replacement.max_line() >= c.width() {
                    return Err(bad(format!(
                        "replacement gate uses line {} but the circuit has width {}",
                        replacement.max_line(),
                        c.width()
                    )));
                }
                Ok(())
            }
            FaultSpec::CrossPoint { gate, line, mode } => {
                check_gate(*gate)?;
                if *line >= c.width() {
                    return Err(bad(format!(
                        "line {line} out of range for width {}",
                        c.width()
                    )));
                }
                let g = &c.gates()[*gate];
                match mode {
                    CrossMode::Remove if !g.controls().contains(line) => Err(bad(format!(
                        "gate {gate} has no control on line {line} to remove"
                    ))),
                    CrossMode::Add if g.controls().contains(line) => Err(bad(format!(
                        "gate {gate} already has a control on line {line}"
                    ))),
                    CrossMode::Add if g.targets().contains(line) => Err(bad(format!(
                        "line {line} is a target of gate {gate}"
                    ))),
                    _ => Ok(()),
                }
            }
            FaultSpec::StuckAt { line, alpha, beta } => {
                if *line >= c.width() {
                    return Err(bad(format!(
                        "line {line} out of range for width {}",
                        c.width()
                    )));
                }
                if !alpha.is_finite() || !beta.is_finite() {
                    return Err(Error::NonFinite);
                }
                let norm_sqr = alpha.norm_sqr() + beta.norm_sqr();
                if (norm_sqr - 1.0).abs() > crate::linalg::DEFAULT_TOL {
                    return Err(Error::NotNormalized { norm_sqr });
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for FaultSpec {
    /// The fault identifier; round-trips through [`FaultSpec::parse`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FaultSpec::Smgf { gate } => write!(f, "smgf:{gate}"),
            FaultSpec::Mmgf { gates } => {
                write!(f, "mmgf:")?;
                for (i, g) in gates.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{g}")?;
                }
                Ok(())
            }
            FaultSpec::Rgf { gate, multiplicity } => write!(f, "rgf:{gate}x{multiplicity}"),
            FaultSpec::Pgf { gate, replacement } => write!(f, "pgf:{gate}={replacement}"),
            FaultSpec::CrossPoint { gate, line, mode } => {
                let sign = match mode {
                    CrossMode::Add => '+',
                    CrossMode::Remove => '-',
                };
                write!(f, "cross:{sign}{gate}@{line}")
            }
            FaultSpec::StuckAt { line, alpha, beta } => {
                write!(f, "stuck:{line}={}", stuck_state_token(*alpha, *beta))
            }
        }
    }
}

/// Which faults [`enumerate_faults`] emits.
#[derive(Debug, Clone, PartialEq)]
pub struct FaultEnumConfig {
    /// Emit every single-missing-gate fault.
    pub smgf: bool,
    /// Emit every missing-gate subset of size 2 ..= this bound.
    pub mmgf_max_cardinality: Option<usize>,
    /// Repetition counts to emit per gate (each ≥ 2).
    pub rgf_multiplicities: Vec<usize>,
    /// Explicit (gate index, replacement) pairs.
    pub pgf_replacements: Vec<(usize, Gate)>,
    /// Emit every legal single-control add/remove.
    pub include_crosspoint: bool,
    /// Stuck states per line, in the order given.
    pub stuck_states: Vec<(Complex64, Complex64)>,
}

impl Default for FaultEnumConfig {
    /// SMGF on, MMGF up to pairs, RGF ×2 and ×3, no PGF, no cross-point,
    /// stuck states |0⟩, |1⟩, |+⟩, |−⟩.
    fn default() -> Self {
        Self {
            smgf: true,
            mmgf_max_cardinality: Some(2),
            rgf_multiplicities: vec![2, 3],
            pgf_replacements: Vec::new(),
            include_crosspoint: false,
            stuck_states: named_stuck_states(),
        }
    }
}

impl FaultEnumConfig {
    /// A config with every class switched off; selectors enable pieces.
    pub fn none() -> Self {
        Self {
            smgf: false,
            mmgf_max_cardinality: None,
            rgf_multiplicities: Vec::new(),
            pgf_replacements: Vec::new(),
            include_crosspoint: false,
            stuck_states: Vec::new(),
        }
    }
}

/// All configured faults for a circuit, in a fixed, duplicate-free order:
/// SMGF ascending by gate; MMGF subsets by size then lexicographic; RGF by
/// (gate, multiplicity); PGF in config order grouped by gate; CrossPoint by
/// (gate, line) with removals before additions; StuckAt by (line, state
/// order as configured).
pub fn enumerate_faults(c: &Circuit, cfg: &FaultEnumConfig) -> Vec<FaultSpec> {
    let m = c.gate_count();
    let mut out = Vec::new();

    if cfg.smgf {
        for g in 0..m {
            out.push(FaultSpec::Smgf { gate: g });
        }
    }

    if let Some(max_card) = cfg.mmgf_max_cardinality {
        for size in 2..=max_card.min(m) {
            let mut combo: Vec<usize> = (0..size).collect();
            loop {
                out.push(FaultSpec::Mmgf {
                    gates: combo.clone(),
                });
                // Advance to the next lexicographic combination of `size`
                // elements drawn from 0..m.
                let mut i = size;
                loop {
                    if i == 0 {
                        break;
                    }
                    i -= 1;
                    if combo[i] != i + m - size {
                        combo[i] += 1;
                        for j in i + 1..size {
                            combo[j] = combo[j - 1] + 1;
                        }
                        i = usize::MAX;
                        break;
                    }
                }
                if i != usize::MAX {
                    break;
                }
            }
        }
    }

    let mut mults: Vec<usize> = cfg
        .rgf_multiplicities
        .iter()
        .copied()
        .filter(|&t| t >= 2)
        .collect();
    mults.sort_unstable();
    mults.dedup();
    for g in 0..m {
        for &t in &mults {
            out.push(FaultSpec::Rgf {
                gate: g,
                multiplicity: t,
            });
        }
    }

    let mut pgf: Vec<(usize, Gate)> = cfg.pgf_replacements.clone();
    pgf.sort_by_key(|(g, _)| *g);
    for (g, replacement) in pgf {
        if g >= m {
            continue;
        }
        let fault = FaultSpec::Pgf {
            gate: g,
            replacement,
        };
        if !out.contains(&fault) {
            out.push(fault);
        }
    }

    if cfg.include_crosspoint {
        for (g, gate) in c.gates().iter().enumerate() {
            for line in 0..c.width() {
                if gate.controls().contains(&line) {
                    out.push(FaultSpec::CrossPoint {
                        gate: g,
                        line,
                        mode: CrossMode::Remove,
                    });
                } else if !gate.targets().contains(&line) {
                    out.push(FaultSpec::CrossPoint {
                        gate: g,
                        line,
                        mode: CrossMode::Add,
                    });
                }
            }
        }
    }

    let mut states = cfg.stuck_states.clone();
    states.dedup();
    for line in 0..c.width() {
        for &(alpha, beta) in &states {
            let fault = FaultSpec::StuckAt { line, alpha, beta };
            if !out.contains(&fault) {
                out.push(fault);
            }
        }
    }

    out
}

/// A circuit with one fault injected. Gate faults mutate the gate list; a
/// stuck-at fault keeps the gate list intact and records the input
/// transform instead.
#[derive(Debug, Clone, PartialEq)]
pub struct FaultyCircuit {
    circuit: Circuit,
    stuck: Option<(usize, Complex64, Complex64)>,
}

impl FaultyCircuit {
    /// The (possibly mutated) gate list.
    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    /// The stuck-line transform, if the fault was StuckAt.
    pub fn stuck(&self) -> Option<(usize, Complex64, Complex64)> {
        self.stuck
    }

    /// The input state actually entering the gates for nominal basis input
    /// `input`: |input⟩ itself, except that a stuck line's qubit is replaced
    /// by α|0⟩+β|1⟩.
    pub fn input_state(&self, input: usize) -> Result<StateVector> {
        let dim = self.circuit.dim();
        if input >= dim {
            return Err(Error::IndexOutOfRange { index: input, dim });
        }
        match self.stuck {
            None => StateVector::basis(dim, input),
            Some((line, alpha, beta)) => {
                let width = self.circuit.width();
                let mut amps = vec![Complex64::new(0.0, 0.0); dim];
                let mask = 1usize << (width - 1 - line);
                let base = input & !mask;
                amps[base] = alpha;
                amps[base | mask] = beta;
                StateVector::new(amps)
            }
        }
    }

    /// Output state for nominal basis input `input`.
    ///
    /// Builds the total matrix on each call; batch callers should take
    /// columns of [`Circuit::total_matrix`] themselves.
    pub fn output(&self, input: usize) -> Result<StateVector> {
        let dim = self.circuit.dim();
        if input >= dim {
            return Err(Error::IndexOutOfRange { index: input, dim });
        }
        let u = self.circuit.total_matrix();
        match self.stuck {
            None => u.column(input),
            Some(_) => u.apply(&self.input_state(input)?),
        }
    }
}

/// Injects `fault` into `circuit`, validating the pairing.
pub fn apply_fault(circuit: &Circuit, fault: &FaultSpec) -> Result<FaultyCircuit> {
    fault.validate(circuit)?;
    let width = circuit.width();
    let gates = circuit.gates();
    let mutated = match fault {
        FaultSpec::Smgf { gate } => {
            let mut kept: Vec<Gate> = gates.to_vec();
            kept.remove(*gate);
            Circuit::from_gates(width, kept)?
        }
        FaultSpec::Mmgf { gates: missing } => {
            let kept: Vec<Gate> = gates
                .iter()
                .enumerate()
                .filter(|(i, _)| !missing.contains(i))
                .map(|(_, g)| g.clone())
                .collect();
            Circuit::from_gates(width, kept)?
        }
        FaultSpec::Rgf { gate, multiplicity } => {
            let mut with_reps = Vec::with_capacity(gates.len() + multiplicity - 1);
            for (i, g) in gates.iter().enumerate() {
                let copies = if i == *gate { *multiplicity } else { 1 };
                for _ in 0..copies {
                    with_reps.push(g.clone());
                }
            }
            Circuit::from_gates(width, with_reps)?
        }
        FaultSpec::Pgf { gate, replacement } => {
            let mut swapped: Vec<Gate> = gates.to_vec();
            swapped[*gate] = replacement.clone();
            Circuit::from_gates(width, swapped)?
        }
        FaultSpec::CrossPoint { gate, line, mode } => {
            let mut edited: Vec<Gate> = gates.to_vec();
            edited[*gate] = match mode {
                CrossMode::Add => edited[*gate].with_control(*line)?,
                CrossMode::Remove => edited[*gate].without_control(*line)?,
            };
            Circuit::from_gates(width, edited)?
        }
        FaultSpec::StuckAt { line, alpha, beta } => {
            return Ok(FaultyCircuit {
                circuit: circuit.clone(),
                stuck: Some((*line, *alpha, *beta)),
            });
        }
    };
    Ok(FaultyCircuit {
        circuit: mutated,
        stuck: None,
    })
}

/// Output state of the faulty circuit for basis input `i`; see
/// [`FaultyCircuit::output`].
pub fn faulty_output(fc: &FaultyCircuit, i: usize) -> Result<StateVector> {
    fc.output(i)
}

/// Result of parsing a `--faults` selector list: class-level switches plus
/// explicit fault ids.
#[derive(Debug, Clone, PartialEq)]
pub struct FaultSelection {
    pub config: FaultEnumConfig,
    pub explicit: Vec<FaultSpec>,
}

impl FaultSelection {
    /// Enumerates the class-selected faults, then appends explicit ids that
    /// the enumeration did not already produce. Every explicit id is
    /// validated against the circuit.
    pub fn resolve(&self, c: &Circuit) -> Result<Vec<FaultSpec>> {
        let mut out = enumerate_faults(c, &self.config);
        for f in &self.explicit {
            f.validate(c)?;
            if !out.contains(f) {
                out.push(f.clone());
            }
        }
        Ok(out)
    }
}

/// Splits a selector list on commas that are not inside parentheses.
fn split_top_level(s: &str) -> Vec<String> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut current = String::new();
    for ch in s.chars() {
        match ch {
            '(' => {
                depth += 1;
                current.push(ch);
            }
            ')' => {
                depth = depth.saturating_sub(1);
                current.push(ch);
            }
            ',' if depth == 0 => {
                parts.push(std::mem::take(&mut current));
            }
            _ => current.push(ch),
        }
    }
    parts.push(current);
    parts.into_iter().map(|p| p.trim().to_string()).collect()
}

fn is_class_token(tok: &str) -> bool {
    let class = tok.split(':').next().unwrap_or(tok);
    matches!(class, "smgf" | "mmgf" | "rgf" | "pgf" | "cross" | "stuck")
}

enum Pending {
    /// `mmgf:<int>` seen; more bare ints may follow. One int total means a
    /// class-level cardinality bound, two or more an explicit fault id.
    Mmgf(Vec<usize>),
    /// `stuck:<state>` seen; more bare state tokens may follow, forming the
    /// configured state list.
    Stuck(Vec<(Complex64, Complex64)>),
    /// `pgf:<g>=<spec>` seen; bare ints re-attach as comma-separated parts
    /// of the replacement's `@` control suffix.
    Pgf(String),
}

/// Parses the `--faults` selector list: comma-separated class selectors
/// (`smgf`, `mmgf:<k>`, `rgf`, `rgf:<t>`, `rgf:<t1>-<t2>`, `cross`,
/// `stuck:<state>,<state>,…`, `pgf:<g>=<gate-spec>`) and explicit fault
/// identifiers, freely mixed.
pub fn parse_fault_selectors(s: &str, circuit: &Circuit) -> Result<FaultSelection> {
    let width = circuit.width();
    let mut config = FaultEnumConfig::none();
    let mut explicit: Vec<FaultSpec> = Vec::new();
    let mut pending: Option<Pending> = None;

    let bad = |selector: &str, message: String| Error::InvalidSelector {
        selector: selector.to_string(),
        message,
    };

    fn flush(
        pending: &mut Option<Pending>,
        config: &mut FaultEnumConfig,
        explicit: &mut Vec<FaultSpec>,
        width: usize,
    ) -> Result<()> {
        match pending.take() {
            None => Ok(()),
            Some(Pending::Mmgf(ints)) => {
                if ints.len() == 1 {
                    config.mmgf_max_cardinality = Some(ints[0]);
                } else {
                    explicit.push(FaultSpec::Mmgf { gates: ints });
                }
                Ok(())
            }
            Some(Pending::Stuck(states)) => {
                config.stuck_states.extend(states);
                Ok(())
            }
            Some(Pending::Pgf(text)) => {
                match FaultSpec::parse(&text, width)? {
                    FaultSpec::Pgf { gate, replacement } => {
                        config.pgf_replacements.push((gate, replacement));
                    }
                    _ => unreachable!("pgf text parses to a pgf fault"),
                }
                Ok(())
            }
        }
    }

    for tok in split_top_level(s) {
        if tok.is_empty() {
            return Err(bad(s, "empty selector".into()));
        }
        if !is_class_token(&tok) {
            // Continuation of a multi-token selector.
            match pending.as_mut() {
                Some(Pending::Mmgf(ints)) => {
                    let n: usize = tok
                        .parse()
                        .map_err(|_| bad(&tok, "expected a gate index".into()))?;
                    ints.push(n);
                }
                Some(Pending::Stuck(states)) => {
                    states.push(parse_stuck_state(&tok).map_err(|e| bad(&tok, e.to_string()))?);
                }
                Some(Pending::Pgf(text)) => {
                    if tok.parse::<usize>().is_err() {
                        return Err(bad(&tok, "expected a control line number".into()));
                    }
                    text.push(',');
                    text.push_str(&tok);
                }
                None => return Err(bad(&tok, "unknown selector".into())),
            }
            continue;
        }

        flush(&mut pending, &mut config, &mut explicit, width)?;
        let (class, rest) = match tok.split_once(':') {
            Some((c, r)) => (c, Some(r.to_string())),
            None => (tok.as_str(), None),
        };
        match (class, rest) {
            ("smgf", None) => config.smgf = true,
            ("smgf", Some(r)) => {
                explicit.push(
                    FaultSpec::parse(&format!("smgf:{r}"), width)
                        .map_err(|e| bad(&tok, e.to_string()))?,
                );
            }
            ("mmgf", None) => config.mmgf_max_cardinality = Some(2),
            ("mmgf", Some(r)) => {
                let n: usize = r
                    .parse()
                    .map_err(|_| bad(&tok, "expected an integer after `mmgf:`".into()))?;
                pending = Some(Pending::Mmgf(vec![n]));
            }
            ("rgf", None) => config.rgf_multiplicities.extend([2, 3]),
            ("rgf", Some(r)) => {
                if r.contains('x') {
                    explicit.push(
                        FaultSpec::parse(&format!("rgf:{r}"), width)
                            .map_err(|e| bad(&tok, e.to_string()))?,
                    );
                } else if let Some((lo, hi)) = r.split_once('-') {
                    let lo: usize = lo
                        .parse()
                        .map_err(|_| bad(&tok, "bad multiplicity range".into()))?;
                    let hi: usize = hi
                        .parse()
                        .map_err(|_| bad(&tok, "bad multiplicity range".into()))?;
                    if lo < 2 || hi < lo {
                        return Err(bad(
                            &tok,
                            "multiplicity range must satisfy 2 <= lo <= hi".into(),
                        ));
                    }
                    config.rgf_multiplicities.extend(lo..=hi);
                } else {
                    let t: usize = r
                        .parse()
                        .map_err(|_| bad(&tok, "expected a multiplicity".into()))?;
                    if t < 2 {
                        return Err(bad(&tok, "multiplicity must be at least 2".into()));
                    }
                    config.rgf_multiplicities.push(t);
                }
            }
            ("pgf", Some(r)) if r.contains('=') => {
                pending = Some(Pending::Pgf(format!("pgf:{r}")));
            }
            ("pgf", _) => {
                return Err(bad(
                    &tok,
                    "pgf needs an explicit replacement: pgf:<g>=<gate-spec>".into(),
                ));
            }
            ("cross", None) => config.include_crosspoint = true,
            ("cross", Some(r)) => {
                explicit.push(
                    FaultSpec::parse(&format!("cross:{r}"), width)
                        .map_err(|e| bad(&tok, e.to_string()))?,
                );
            }
            ("stuck", None) => config.stuck_states.extend(named_stuck_states()),
            ("stuck", Some(r)) => {
                if r.contains('=') {
                    explicit.push(
                        FaultSpec::parse(&format!("stuck:{r}"), width)
                            .map_err(|e| bad(&tok, e.to_string()))?,
                    );
                } else {
                    let state =
                        parse_stuck_state(&r).map_err(|e| bad(&tok, e.to_string()))?;
                    pending = Some(Pending::Stuck(vec![state]));
                }
            }
            _ => unreachable!("is_class_token admitted the class"),
        }
    }
    flush(&mut pending, &mut config, &mut explicit, width)?;
    Ok(FaultSelection { config, explicit })
}
