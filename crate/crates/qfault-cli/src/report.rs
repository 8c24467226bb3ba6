//! Report documents: one structured tree per run.
//!
//! The machine format is a single JSON document with every float printed at
//! 17 significant digits (lossless for f64), no timestamps, and a stable
//! field layout, so identical inputs produce byte-identical reports.

use serde::Serialize;
use serde_json::ser::Formatter;

#[derive(Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

impl Default for ToolInfo {
    fn default() -> Self {
        Self {
            name: "qfault",
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

#[derive(Serialize)]
pub struct CircuitDigest {
    pub width: usize,
    pub gate_count: usize,
    /// Canonical statement per gate, re-parseable.
    pub gates: Vec<String>,
}

impl CircuitDigest {
    pub fn of(c: &qfault::Circuit) -> Self {
        Self {
            width: c.width(),
            gate_count: c.gate_count(),
            gates: c.gates().iter().map(|g| g.to_string()).collect(),
        }
    }
}

#[derive(Serialize)]
pub struct RngInfo {
    pub algorithm: &'static str,
    pub seed: u64,
}

/// The envelope shared by every command: `P` is the results payload, `Q`
/// the echoed command parameters.
#[derive(Serialize)]
pub struct ReportDocument<P: Serialize, Q: Serialize> {
    pub tool: ToolInfo,
    pub command: &'static str,
    pub parameters: Q,
    pub circuit: CircuitDigest,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rng: Option<RngInfo>,
    pub results: P,
}

#[derive(Serialize)]
pub struct MatrixResults {
    pub dim: usize,
    /// Row-major; each entry is `[re, im]`. Column i holds the output
    /// amplitudes for basis input i.
    pub entries: Vec<Vec<[f64; 2]>>,
}

#[derive(Serialize)]
pub struct FaultListResults {
    pub count: usize,
    pub faults: Vec<String>,
}

#[derive(Serialize)]
pub struct TestVector {
    pub index: usize,
    pub bits: String,
}

#[derive(Serialize)]
pub struct CoverageRow {
    pub fault: String,
    pub class: String,
    pub per_trial_p: f64,
    pub input_index: usize,
    pub input: String,
    pub trials_needed: u64,
}

#[derive(Serialize)]
pub struct TestSetResults {
    pub confidence: f64,
    pub test_set: Vec<TestVector>,
    pub per_fault: Vec<CoverageRow>,
    pub undetectable: Vec<String>,
}

#[derive(Serialize)]
pub struct TrialResults {
    pub fault: String,
    pub input: String,
    pub trials: u64,
    pub detections: u64,
    pub p_hat: f64,
    pub analytic_p: f64,
    pub abs_error: f64,
}

#[derive(Serialize)]
pub struct BestVectorResults {
    pub indices: Vec<usize>,
    pub bits: Vec<String>,
    pub per_trial_p: f64,
}

/// Prints every float as `{:.16e}`: 17 significant digits, enough to
/// reconstruct the exact f64.
struct Sig17Formatter;

impl Formatter for Sig17Formatter {
    fn write_f64<W: ?Sized + std::io::Write>(
        &mut self,
        writer: &mut W,
        value: f64,
    ) -> std::io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

pub fn to_machine<T: Serialize>(doc: &T) -> anyhow::Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sig17Formatter);
    doc.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf)?)
}

/// Shortest complex rendering for the text format: `re`, `re+imi` or
/// `re-imi`.
pub fn fmt_complex(re: f64, im: f64) -> String {
    if im == 0.0 {
        format!("{re}")
    } else if im < 0.0 {
        format!("{re}-{}i", -im)
    } else {
        format!("{re}+{im}i")
    }
}

/// Text form of a matrix; pure integer matrices (all entries within 1e-12
/// of integers) print as plain integers.
pub fn matrix_text(m: &qfault::ComplexMatrix) -> String {
    let dim = m.dim();
    let integral = (0..dim).all(|r| {
        (0..dim).all(|c| {
            let z = m.get(r, c);
            (z.re - z.re.round()).abs() <= 1e-12 && z.im.abs() <= 1e-12
        })
    });
    let mut out = String::new();
    for r in 0..dim {
        let row: Vec<String> = (0..dim)
            .map(|c| {
                let z = m.get(r, c);
                if integral {
                    format!("{}", z.re.round() as i64)
                } else {
                    fmt_complex(z.re, z.im)
                }
            })
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}
