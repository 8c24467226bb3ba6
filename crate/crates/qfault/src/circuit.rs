//! Gate library, circuit container, and exact full-width matrices.
//!
//! A [`Circuit`] is an ordered list of [`Gate`]s over `width` lines
//! (1 ..= [`MAX_WIDTH`]). Every gate knows its kind, an optional set of
//! control lines and an ordered list of target lines. [`Gate::embed`] builds
//! the gate's full 2^n × 2^n matrix and [`Circuit::total_matrix`] multiplies
//! the embedded gates in application order:
//!
//! ```text
//! U = U_m · … · U_2 · U_1        (gate 0 is applied first)
//! ```
//!
//! so column `i` of `U` is the circuit output for basis input `|i⟩`.
//! Line 0 is the most significant bit of a basis index.

use std::collections::BTreeSet;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{matmul, ComplexMatrix};

/// Largest supported register width. Dense 2^n matrices above this are not
/// worth constructing.
pub const MAX_WIDTH: usize = 12;

/// Bit of `index` on `line`, with line 0 as the most significant bit.
pub fn line_bit(index: usize, line: usize, width: usize) -> usize {
    (index >> (width - 1 - line)) & 1
}

fn with_line_bit(index: usize, line: usize, width: usize, bit: usize) -> usize {
    let mask = 1usize << (width - 1 - line);
    if bit == 1 {
        index | mask
    } else {
        index & !mask
    }
}

/// Renders a basis index as a bitstring, line 0 leftmost: index 2 at width 2
/// is `"10"`.
pub fn basis_bitstring(index: usize, width: usize) -> String {
    (0..width)
        .map(|line| if line_bit(index, line, width) == 1 { '1' } else { '0' })
        .collect()
}

/// Parses a bitstring (line 0 leftmost) into a basis index. The string must
/// be exactly `width` characters of `0`/`1`.
pub fn bitstring_index(s: &str, width: usize) -> Result<usize> {
    if s.len() != width || !s.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(Error::InvalidGate(format!(
            "`{s}` is not a {width}-bit string of 0s and 1s"
        )));
    }
    Ok(s
        .bytes()
        .fold(0usize, |acc, b| (acc << 1) | usize::from(b == b'1')))
}

/// The gate vocabulary.
///
/// The controlled kinds (`Cx`, `Cz`, `Ccx`, `Cswap`) are convenience names:
/// their controls live in the gate's control set like any other control, and
/// their action is the base gate (`X`, `Z`, `X`, `Swap`) on the targets.
/// `Custom` is an arbitrary single-qubit unitary supplied entrywise.
#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    I,
    X,
    Y,
    Z,
    H,
    S,
    T,
    Cx,
    Cz,
    Swap,
    Ccx,
    Cswap,
    Custom(ComplexMatrix),
}

impl GateKind {
    /// Number of target lines the kind acts on.
    pub fn target_arity(&self) -> usize {
        match self {
            GateKind::Swap | GateKind::Cswap => 2,
            _ => 1,
        }
    }

    /// Number of control lines implied by the kind's name (`cx 0 1` carries
    /// one, `ccx 0 1 2` two). Extra controls may always be attached on top.
    pub fn implicit_controls(&self) -> usize {
        match self {
            GateKind::Cx | GateKind::Cz | GateKind::Cswap => 1,
            GateKind::Ccx => 2,
            _ => 0,
        }
    }

    /// The unitary the kind applies to its target lines (2×2, or 4×4 for the
    /// swap kinds), ignoring controls.
    pub fn base_matrix(&self) -> ComplexMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let r = |x: f64| Complex64::new(x, 0.0);
        let rows: Vec<Vec<Complex64>> = match self {
            GateKind::I => vec![vec![r(1.0), r(0.0)], vec![r(0.0), r(1.0)]],
            GateKind::X | GateKind::Cx | GateKind::Ccx => {
                vec![vec![r(0.0), r(1.0)], vec![r(1.0), r(0.0)]]
            }
            GateKind::Y => vec![
                vec![r(0.0), Complex64::new(0.0, -1.0)],
                vec![Complex64::new(0.0, 1.0), r(0.0)],
            ],
            GateKind::Z | GateKind::Cz => vec![vec![r(1.0), r(0.0)], vec![r(0.0), r(-1.0)]],
            GateKind::H => vec![vec![r(h), r(h)], vec![r(h), r(-h)]],
            GateKind::S => vec![vec![r(1.0), r(0.0)], vec![r(0.0), Complex64::new(0.0, 1.0)]],
            GateKind::T => vec![
                vec![r(1.0), r(0.0)],
                vec![r(0.0), Complex64::new(h, h)],
            ],
            GateKind::Swap | GateKind::Cswap => vec![
                vec![r(1.0), r(0.0), r(0.0), r(0.0)],
                vec![r(0.0), r(0.0), r(1.0), r(0.0)],
                vec![r(0.0), r(1.0), r(0.0), r(0.0)],
                vec![r(0.0), r(0.0), r(0.0), r(1.0)],
            ],
            GateKind::Custom(m) => return m.clone(),
        };
        ComplexMatrix::from_rows(&rows).expect("built-in gate matrices are well-formed")
    }

    /// Statement mnemonic used when the control count matches the kind.
    pub fn mnemonic(&self) -> &'static str {
        match self {
            GateKind::I => "i",
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::H => "h",
            GateKind::S => "s",
            GateKind::T => "t",
            GateKind::Cx => "cx",
            GateKind::Cz => "cz",
            GateKind::Swap => "swap",
            GateKind::Ccx => "ccx",
            GateKind::Cswap => "cswap",
            GateKind::Custom(_) => "u1",
        }
    }

    /// Mnemonic of the underlying uncontrolled gate (`x` for `Cx`/`Ccx`,
    /// `z` for `Cz`, `swap` for `Cswap`).
    pub fn base_mnemonic(&self) -> &'static str {
        match self {
            GateKind::Cx | GateKind::Ccx => "x",
            GateKind::Cz => "z",
            GateKind::Cswap => "swap",
            other => other.mnemonic(),
        }
    }

    /// Whether applying the gate twice is the identity. Decided from the
    /// base matrix, so controlled variants inherit the property.
    pub fn is_self_inverse(&self) -> bool {
        let m = self.base_matrix();
        let mm = matmul(&m, &m).expect("square");
        let id = ComplexMatrix::identity(m.dim()).expect("power of two");
        mm.max_abs_diff(&id) <= 1e-12
    }
}

/// One gate instance: a kind, a (possibly empty) set of control lines and an
/// ordered list of target lines.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    kind: GateKind,
    controls: BTreeSet<usize>,
    targets: Vec<usize>,
}

impl Gate {
    /// Builds a gate, validating target arity, distinctness of all lines,
    /// and (for `Custom`) that the supplied matrix is a 2×2 unitary.
    pub fn new(
        kind: GateKind,
        controls: impl IntoIterator<Item = usize>,
        targets: Vec<usize>,
    ) -> Result<Self> {
        if let GateKind::Custom(m) = &kind {
            if m.dim() != 2 {
                return Err(Error::InvalidGate(format!(
                    "custom gate matrix must be 2×2, got {0}×{0}",
                    m.dim()
                )));
            }
            if !m.is_unitary(crate::linalg::DEFAULT_TOL) {
                return Err(Error::NotUnitary {
                    deviation: m.unitarity_deviation(),
                });
            }
        }
        if targets.len() != kind.target_arity() {
            return Err(Error::InvalidGate(format!(
                "`{}` takes {} target line(s), got {}",
                kind.base_mnemonic(),
                kind.target_arity(),
                targets.len()
            )));
        }
        let mut seen = BTreeSet::new();
        let mut control_set = BTreeSet::new();
        for t in &targets {
            if !seen.insert(*t) {
                return Err(Error::InvalidGate(format!("duplicate line {t} in gate")));
            }
        }
        for c in controls {
            if !seen.insert(c) {
                return Err(Error::InvalidGate(format!("duplicate line {c} in gate")));
            }
            control_set.insert(c);
        }
        Ok(Self {
            kind,
            controls: control_set,
            targets,
        })
    }

    pub fn kind(&self) -> &GateKind {
        &self.kind
    }

    pub fn controls(&self) -> &BTreeSet<usize> {
        &self.controls
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    /// Largest line index the gate touches.
    pub fn max_line(&self) -> usize {
        self.controls
            .iter()
            .copied()
            .chain(self.targets.iter().copied())
            .max()
            .expect("a gate always has at least one target")
    }

    /// A copy of this gate with `line` added to the control set. Fails if
    /// the line is already a control or a target.
    pub fn with_control(&self, line: usize) -> Result<Gate> {
        if self.controls.contains(&line) {
            return Err(Error::InvalidGate(format!(
                "line {line} is already a control"
            )));
        }
        if self.targets.contains(&line) {
            return Err(Error::InvalidGate(format!("line {line} is a target")));
        }
        let mut g = self.clone();
        g.controls.insert(line);
        Ok(g)
    }

    /// A copy of this gate with `line` removed from the control set. Fails
    /// if the line is not currently a control.
    pub fn without_control(&self, line: usize) -> Result<Gate> {
        if !self.controls.contains(&line) {
            return Err(Error::InvalidGate(format!(
                "line {line} is not a control"
            )));
        }
        let mut g = self.clone();
        g.controls.remove(&line);
        Ok(g)
    }

    /// The gate's full 2^width × 2^width matrix.
    ///
    /// For each basis state: if every control bit is 1, the base unitary
    /// acts on the target bits and all other bits pass through, otherwise
    /// the state is unchanged. Columns hold the images, matching the
    /// crate-wide column convention.
    pub fn embed(&self, width: usize) -> Result<ComplexMatrix> {
        if width == 0 || width > MAX_WIDTH {
            return Err(Error::WidthOutOfRange(width));
        }
        if self.max_line() >= width {
            return Err(Error::InvalidGate(format!(
                "line {} out of range for width {width}",
                self.max_line()
            )));
        }
        let dim = 1usize << width;
        let core = self.kind.base_matrix();
        let k = self.targets.len();
        let core_dim = 1usize << k;
        debug_assert_eq!(core.dim(), core_dim);

        let mut m = ComplexMatrix::zeros(dim)?;
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        for col in 0..dim {
            let active = self
                .controls
                .iter()
                .all(|&c| line_bit(col, c, width) == 1);
            if !active {
                m.set(col, col, one);
                continue;
            }
            // Gather the target bits into a core-space index, targets[0]
            // most significant.
            let mut t_in = 0usize;
            for (d, &t) in self.targets.iter().enumerate() {
                t_in |= line_bit(col, t, width) << (k - 1 - d);
            }
            for t_out in 0..core_dim {
                let amp = core.get(t_out, t_in);
                if amp == zero {
                    continue;
                }
                let mut row = col;
                for (d, &t) in self.targets.iter().enumerate() {
                    row = with_line_bit(row, t, width, (t_out >> (k - 1 - d)) & 1);
                }
                m.set(row, col, amp);
            }
        }
        Ok(m)
    }

    /// See [`GateKind::is_self_inverse`]; controls do not change the answer.
    pub fn is_self_inverse(&self) -> bool {
        self.kind.is_self_inverse()
    }
}

impl fmt::Display for Gate {
    /// Canonical statement form, round-trippable through the parser.
    ///
    /// Controlled kinds print their short form when the control count still
    /// matches (`cx 0 1`); otherwise the base mnemonic plus an explicit
    /// control suffix is used (`x 1 @ 0,2`), which denotes the same
    /// operation.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let inline = self.controls.len() == self.kind.implicit_controls()
            && self.kind.implicit_controls() > 0;
        if inline {
            write!(f, "{}", self.kind.mnemonic())?;
            for c in &self.controls {
                write!(f, " {c}")?;
            }
        } else {
            write!(f, "{}", self.kind.base_mnemonic())?;
        }
        for t in &self.targets {
            write!(f, " {t}")?;
        }
        if let GateKind::Custom(m) = &self.kind {
            for row in 0..2 {
                for col in 0..2 {
                    let z = m.get(row, col);
                    write!(f, " {} {}", z.re, z.im)?;
                }
            }
        }
        if !inline && !self.controls.is_empty() {
            write!(f, " @ ")?;
            for (i, c) in self.controls.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{c}")?;
            }
        }
        Ok(())
    }
}

/// An ordered gate list over a fixed number of lines.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    width: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    /// An empty circuit of the given width (1 ..= [`MAX_WIDTH`]).
    pub fn new(width: usize) -> Result<Self> {
        if width == 0 || width > MAX_WIDTH {
            return Err(Error::WidthOutOfRange(width));
        }
        Ok(Self {
            width,
            gates: Vec::new(),
        })
    }

    /// Builds a circuit from parts, validating every gate against the width.
    pub fn from_gates(width: usize, gates: Vec<Gate>) -> Result<Self> {
        let mut c = Self::new(width)?;
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    /// Appends a gate, validating its lines against the circuit width.
    pub fn push(&mut self, gate: Gate) -> Result<()> {
        if gate.max_line() >= self.width {
            return Err(Error::InvalidGate(format!(
                "line {} out of range for width {}",
                gate.max_line(),
                self.width
            )));
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Dimension of the state space, `2^width`.
    pub fn dim(&self) -> usize {
        1usize << self.width
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    /// The circuit over the same lines restricted to `gates[start..end]`.
    pub fn subrange(&self, start: usize, end: usize) -> Circuit {
        assert!(start <= end && end <= self.gates.len(), "gate range out of bounds");
        Circuit {
            width: self.width,
            gates: self.gates[start..end].to_vec(),
        }
    }

    /// The exact total matrix `U = U_m · … · U_1`.
    ///
    /// Column `i` is the output state for basis input `|i⟩`. An empty
    /// circuit yields the identity. Cost is O(m · 2^{3n}): one dense product
    /// per gate after the first.
    pub fn total_matrix(&self) -> ComplexMatrix {
        let dim = self.dim();
        let mut iter = self.gates.iter();
        let mut u = match iter.next() {
            None => return ComplexMatrix::identity(dim).expect("validated width"),
            Some(g) => g.embed(self.width).expect("gates are validated on insert"),
        };
        for g in iter {
            let gm = g.embed(self.width).expect("gates are validated on insert");
            u = matmul(&gm, &u).expect("equal dimensions");
        }
        u
    }
}
