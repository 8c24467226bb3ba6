//! Text format for circuits.
//!
//! ```text
//! # comment
//! qubits 2
//! x 0
//! cx 0 1
//! ```
//!
//! The first statement must be `qubits <n>` with `1 <= n <= 12`. Each later
//! line holds one gate statement; `#` starts a comment and blank lines are
//! skipped. Statements:
//!
//! ```text
//! i|x|y|z|h|s|t <line>
//! cx <control> <target>
//! cz <control> <target>
//! swap <a> <b>
//! ccx <c1> <c2> <target>
//! cswap <control> <a> <b>
//! u1 <line> <re00> <im00> <re01> <im01> <re10> <im10> <re11> <im11>
//! ```
//!
//! Any statement may carry an extra-control suffix `@ c1,c2,…` which adds
//! those lines as controls on top of the gate's own.

use std::str::FromStr;

use num_complex::Complex64;

use crate::circuit::{Circuit, Gate, GateKind, MAX_WIDTH};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// Parses one gate statement (no `qubits` header, no comments) against a
/// known width. This is the same grammar the circuit file uses per line, and
/// the [`Display`](std::fmt::Display) form of [`Gate`] round-trips through
/// it.
pub fn parse_gate_spec(spec: &str, width: usize) -> Result<Gate> {
    let bad = |msg: String| Error::InvalidGate(msg);
    let (stmt, ctrl_suffix) = match spec.split_once('@') {
        None => (spec, None),
        Some((s, c)) => (s, Some(c)),
    };
    let mut tokens = stmt.split_whitespace();
    let mnemonic = tokens
        .next()
        .ok_or_else(|| bad("empty gate statement".into()))?;
    let rest: Vec<&str> = tokens.collect();

    let parse_line = |tok: &str| -> Result<usize> {
        let n: usize = tok
            .parse()
            .map_err(|_| bad(format!("`{tok}` is not a line number")))?;
        if n >= width {
            return Err(bad(format!("line {n} out of range for width {width}")));
        }
        Ok(n)
    };
    let want = |n: usize| -> Result<Vec<usize>> {
        if rest.len() != n {
            return Err(bad(format!(
                "`{mnemonic}` takes {n} line argument(s), got {}",
                rest.len()
            )));
        }
        rest.iter().map(|t| parse_line(t)).collect()
    };

    let (kind, controls, targets) = match mnemonic {
        "i" => (GateKind::I, vec![], want(1)?),
        "x" => (GateKind::X, vec![], want(1)?),
        "y" => (GateKind::Y, vec![], want(1)?),
        "z" => (GateKind::Z, vec![], want(1)?),
        "h" => (GateKind::H, vec![], want(1)?),
        "s" => (GateKind::S, vec![], want(1)?),
        "t" => (GateKind::T, vec![], want(1)?),
        "cx" | "cz" => {
            let lines = want(2)?;
            let kind = if mnemonic == "cx" { GateKind::Cx } else { GateKind::Cz };
            (kind, vec![lines[0]], vec![lines[1]])
        }
        "swap" => (GateKind::Swap, vec![], want(2)?),
        "ccx" => {
            let lines = want(3)?;
            (GateKind::Ccx, vec![lines[0], lines[1]], vec![lines[2]])
        }
        "cswap" => {
            let lines = want(3)?;
            (GateKind::Cswap, vec![lines[0]], vec![lines[1], lines[2]])
        }
        "u1" => {
            if rest.len() != 9 {
                return Err(bad(format!(
                    "`u1` takes a line and 8 matrix numbers, got {} argument(s)",
                    rest.len()
                )));
            }
            let line = parse_line(rest[0])?;
            let mut vals = [0.0f64; 8];
            for (i, tok) in rest[1..].iter().enumerate() {
                vals[i] = tok
                    .parse()
                    .map_err(|_| bad(format!("`{tok}` is not a number")))?;
            }
            let m = ComplexMatrix::from_rows(&[
                vec![
                    Complex64::new(vals[0], vals[1]),
                    Complex64::new(vals[2], vals[3]),
                ],
                vec![
                    Complex64::new(vals[4], vals[5]),
                    Complex64::new(vals[6], vals[7]),
                ],
            ])?;
            (GateKind::Custom(m), vec![], vec![line])
        }
        other => return Err(bad(format!("unknown gate `{other}`"))),
    };

    let mut all_controls = controls;
    if let Some(suffix) = ctrl_suffix {
        for tok in suffix.split(',') {
            let tok = tok.trim();
            if tok.is_empty() {
                return Err(bad("empty control in `@` suffix".into()));
            }
            all_controls.push(parse_line(tok)?);
        }
    }
    Gate::new(kind, all_controls, targets)
}

/// Parses a whole circuit file. Errors carry 1-based line numbers.
pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let at = |line: usize, message: String| Error::Parse { line, message };
    let mut circuit: Option<Circuit> = None;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let content = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let content = content.trim();
        if content.is_empty() {
            continue;
        }
        match &mut circuit {
            None => {
                let mut tokens = content.split_whitespace();
                if tokens.next() != Some("qubits") {
                    return Err(at(
                        lineno,
                        "first statement must be `qubits <n>`".into(),
                    ));
                }
                let n: usize = match tokens.next() {
                    Some(tok) => tok.parse().map_err(|_| {
                        at(lineno, format!("`{tok}` is not a qubit count"))
                    })?,
                    None => return Err(at(lineno, "`qubits` needs a count".into())),
                };
                if tokens.next().is_some() {
                    return Err(at(lineno, "`qubits` takes exactly one argument".into()));
                }
                if n == 0 || n > MAX_WIDTH {
                    return Err(at(
                        lineno,
                        format!("width {n} outside supported range 1..={MAX_WIDTH}"),
                    ));
                }
                circuit = Some(Circuit::new(n)?);
            }
            Some(c) => {
                if content.starts_with("qubits") {
                    return Err(at(lineno, "duplicate `qubits` statement".into()));
                }
                let gate = parse_gate_spec(content, c.width())
                    .map_err(|e| at(lineno, e.to_string()))?;
                c.push(gate)?;
            }
        }
    }
    circuit.ok_or_else(|| at(0, "no `qubits` statement found".into()))
}

impl FromStr for Circuit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_circuit(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::line_bit;

    #[test]
    fn parses_the_two_gate_example() {
        let c: Circuit = "qubits 2\nx 0\ncx 0 1\n".parse().unwrap();
        assert_eq!(c.width(), 2);
        assert_eq!(c.gate_count(), 2);
        assert_eq!(c.gates()[0].to_string(), "x 0");
        assert_eq!(c.gates()[1].to_string(), "cx 0 1");
    }

    #[test]
    fn skips_comments_and_blank_lines() {
        let text = "# a Bell-pair style circuit\n\nqubits 2  # width\n\n  h 0 # superpose\ncx 0 1\n";
        let c = parse_circuit(text).unwrap();
        assert_eq!(c.gate_count(), 2);
        assert_eq!(c.gates()[0].to_string(), "h 0");
    }

    #[test]
    fn parses_every_mnemonic() {
        let text = "qubits 4\ni 0\nx 1\ny 2\nz 3\nh 0\ns 1\nt 2\ncx 0 1\ncz 1 2\nswap 2 3\nccx 0 1 2\ncswap 0 2 3\n";
        let c = parse_circuit(text).unwrap();
        assert_eq!(c.gate_count(), 12);
    }

    #[test]
    fn parses_custom_single_qubit_gates() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let text = format!("qubits 1\nu1 0 {h} 0 {h} 0 {h} 0 {negh} 0\n", negh = -h);
        let c = parse_circuit(&text).unwrap();
        let u = c.total_matrix();
        let expected = Gate::new(GateKind::H, [], vec![0]).unwrap().embed(1).unwrap();
        assert!(u.max_abs_diff(&expected) <= 1e-15);
    }

    #[test]
    fn rejects_non_unitary_custom_gates() {
        let err = parse_circuit("qubits 1\nu1 0 1 0 1 0 1 0 1 0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn extra_control_suffix_adds_controls() {
        let c = parse_circuit("qubits 3\nx 2 @ 0,1\n").unwrap();
        let g = &c.gates()[0];
        assert_eq!(g.controls().len(), 2);
        // Same action as a Toffoli.
        let ccx = Gate::new(GateKind::Ccx, [0, 1], vec![2]).unwrap();
        assert_eq!(
            g.embed(3).unwrap().max_abs_diff(&ccx.embed(3).unwrap()),
            0.0
        );
    }

    #[test]
    fn control_suffix_on_controlled_gate_stacks() {
        let c = parse_circuit("qubits 3\ncx 0 1 @ 2\n").unwrap();
        let g = &c.gates()[0];
        assert_eq!(g.controls().len(), 2);
        assert_eq!(g.to_string(), "x 1 @ 0,2");
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_circuit("qubits 2\nx 0\nfoo 1\n").unwrap_err();
        match err {
            Error::Parse { line, message } => {
                assert_eq!(line, 3);
                assert!(message.contains("foo"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rejects_out_of_range_lines() {
        let err = parse_circuit("qubits 2\nx 5\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn rejects_duplicate_lines_in_one_gate() {
        let err = parse_circuit("qubits 2\ncx 1 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = parse_circuit("qubits 3\nccx 0 0 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn rejects_missing_or_duplicate_header() {
        assert!(matches!(
            parse_circuit("x 0\n").unwrap_err(),
            Error::Parse { line: 1, .. }
        ));
        assert!(matches!(
            parse_circuit("qubits 2\nqubits 2\n").unwrap_err(),
            Error::Parse { line: 2, .. }
        ));
        assert!(matches!(
            parse_circuit("# nothing\n").unwrap_err(),
            Error::Parse { line: 0, .. }
        ));
    }

    #[test]
    fn rejects_widths_outside_range() {
        assert!(parse_circuit("qubits 0\n").is_err());
        assert!(parse_circuit("qubits 13\n").is_err());
        assert!(parse_circuit("qubits twelve\n").is_err());
    }

    #[test]
    fn rejects_malformed_statements() {
        for bad in [
            "qubits 2\ncx 0\n",
            "qubits 2\nx\n",
            "qubits 2\nx 0 1\n",
            "qubits 2\nu1 0 1 0\n",
            "qubits 2\nx zero\n",
            "qubits 2\nx 0 @\n",
            "qubits 2\nx 0 @ 0\n",
        ] {
            assert!(parse_circuit(bad).is_err(), "{bad:?} should fail");
        }
    }

    #[test]
    fn display_round_trips_through_the_parser() {
        let text = "qubits 4\nx 0\ncx 0 1\nccx 0 1 2\ncswap 0 2 3\nswap 1 3\nh 2 @ 0\n";
        let c = parse_circuit(text).unwrap();
        for g in c.gates() {
            let reparsed = parse_gate_spec(&g.to_string(), c.width()).unwrap();
            assert_eq!(&reparsed, g, "{}", g);
        }
    }

    #[test]
    fn custom_gate_display_round_trips() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let text = format!("qubits 2\nu1 1 {h} 0 {h} 0 {h} 0 {negh} 0 @ 0\n", negh = -h);
        let c = parse_circuit(&text).unwrap();
        let g = &c.gates()[0];
        let reparsed = parse_gate_spec(&g.to_string(), 2).unwrap();
        assert_eq!(&reparsed, g);
    }

    #[test]
    fn line_zero_is_the_most_significant_bit() {
        // `x 0` at width 2 sends |00⟩ to |10⟩ = index 2.
        let c = parse_circuit("qubits 2\nx 0\n").unwrap();
        let out = c.total_matrix().column(0).unwrap();
        assert_eq!(out.amp(2), Complex64::new(1.0, 0.0));
        assert_eq!(line_bit(2, 0, 2), 1);
        assert_eq!(line_bit(2, 1, 2), 0);
    }
}
