//! Detection profiles, fault classification, trials-to-confidence, best
//! test vectors, greedy test-set generation, and partitioned ATPG.
//!
//! Detection semantics: a test applies basis input `|i⟩`, measures the
//! output in an orthonormal basis containing the fault-free output state,
//! and flags a fault when the outcome differs from that state. The
//! per-trial detection probability is therefore
//!
//! ```text
//! p(f, i) = 1 − fidelity(U|i⟩, faulty_output(f, i))
//! ```
//!
//! with `U` the fault-free total matrix. States equal up to a global phase
//! have fidelity 1 and count as undetectable.

use std::fmt;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::fault::{apply_fault, enumerate_faults, FaultEnumConfig, FaultSpec};
use crate::linalg::{fidelity, ComplexMatrix, UNITARY_TOL};

/// Probabilities within this distance of 0 or 1 classify as Undetectable or
/// Deterministic respectively.
pub const DETECTION_EPS: f64 = 1e-9;

/// Default confidence level γ when a caller does not supply one.
pub const DEFAULT_CONFIDENCE: f64 = 0.99;

/// How reliably a single trial at a given input exposes a fault.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectionClass {
    /// Every trial detects: p ≥ 1 − [`DETECTION_EPS`].
    Deterministic,
    /// Some trials detect: [`DETECTION_EPS`] < p < 1 − [`DETECTION_EPS`].
    Probabilistic,
    /// No trial detects: p ≤ [`DETECTION_EPS`].
    Undetectable,
}

impl fmt::Display for DetectionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DetectionClass::Deterministic => "deterministic",
            DetectionClass::Probabilistic => "probabilistic",
            DetectionClass::Undetectable => "undetectable",
        };
        f.write_str(s)
    }
}

/// Classifies a per-trial detection probability.
pub fn classify(per_trial_p: f64) -> DetectionClass {
    if per_trial_p >= 1.0 - DETECTION_EPS {
        DetectionClass::Deterministic
    } else if per_trial_p <= DETECTION_EPS {
        DetectionClass::Undetectable
    } else {
        DetectionClass::Probabilistic
    }
}

/// Outcome of testing one fault with one basis input.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionOutcome {
    pub fault: FaultSpec,
    /// Basis input index.
    pub input_index: usize,
    /// |⟨fault-free output | faulty output⟩|².
    pub fidelity: f64,
    /// 1 − fidelity.
    pub per_trial_p: f64,
    pub class: DetectionClass,
}

fn profile_against(u: &ComplexMatrix, c: &Circuit, f: &FaultSpec) -> Result<Vec<DetectionOutcome>> {
    let fc = apply_fault(c, f)?;
    let dim = c.dim();
    let mut out = Vec::with_capacity(dim);
    let faulty_total = match fc.stuck() {
        None => Some(fc.circuit().total_matrix()),
        Some(_) => None,
    };
    for i in 0..dim {
        let good = u.column(i)?;
        let bad = match &faulty_total {
            Some(uf) => uf.column(i)?,
            None => u.apply(&fc.input_state(i)?)?,
        };
        let fid = fidelity(&good, &bad)?;
        let p = 1.0 - fid;
        out.push(DetectionOutcome {
            fault: f.clone(),
            input_index: i,
            fidelity: fid,
            per_trial_p: p,
            class: classify(p),
        });
    }
    Ok(out)
}

/// Detection outcome of `f` for every basis input, in ascending input
/// order.
pub fn detection_profile(c: &Circuit, f: &FaultSpec) -> Result<Vec<DetectionOutcome>> {
    profile_against(&c.total_matrix(), c, f)
}

/// Number of trials needed to reach a confidence target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trials {
    Finite(u64),
    /// The fault never produces a detectable outcome; no trial count
    /// suffices.
    Unbounded,
}

impl Trials {
    pub fn as_finite(self) -> Option<u64> {
        match self {
            Trials::Finite(k) => Some(k),
            Trials::Unbounded => None,
        }
    }
}

impl fmt::Display for Trials {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Trials::Finite(k) => write!(f, "{k}"),
            Trials::Unbounded => f.write_str("unbounded"),
        }
    }
}

/// Smallest `k` with `1 − (1−p)^k ≥ γ`: one trial suffices for
/// deterministic faults, no count suffices for undetectable ones, otherwise
/// `⌈ln(1−γ) / ln(1−p)⌉` adjusted so the defining inequality holds exactly
/// in floating point.
pub fn trials_needed(p: f64, gamma: f64) -> Result<Trials> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidConfidence(gamma));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    if p >= 1.0 - DETECTION_EPS {
        return Ok(Trials::Finite(1));
    }
    if p <= DETECTION_EPS {
        return Ok(Trials::Unbounded);
    }
    let reaches = |k: u64| 1.0 - (1.0 - p).powi(k as i32) >= gamma;
    let mut k = ((1.0 - gamma).ln() / (1.0 - p).ln()).ceil().max(1.0) as u64;
    while k > 1 && reaches(k - 1) {
        k -= 1;
    }
    while !reaches(k) {
        k += 1;
    }
    Ok(Trials::Finite(k))
}

/// The best probabilistic test vectors for a single gate matrix: the basis
/// indices minimizing `|g_ii|` (all ties within 1e-12 returned) and the
/// resulting per-trial detection probability `1 − |g_ii|²` when the gate
/// goes missing.
pub fn best_vector_for_gate(g: &ComplexMatrix) -> Result<(Vec<usize>, f64)> {
    if !g.is_unitary(UNITARY_TOL) {
        return Err(Error::NotUnitary {
            deviation: g.unitarity_deviation(),
        });
    }
    let mags: Vec<f64> = (0..g.dim()).map(|i| g.get(i, i).norm()).collect();
    let min = mags.iter().copied().fold(f64::INFINITY, f64::min);
    let indices: Vec<usize> = mags
        .iter()
        .enumerate()
        .filter(|(_, &m)| m <= min + 1e-12)
        .map(|(i, _)| i)
        .collect();
    let p = (1.0 - min * min).max(0.0);
    Ok((indices, p))
}

/// How a fault gets covered by the generated test set.
#[derive(Debug, Clone, PartialEq)]
pub struct FaultCoverage {
    pub fault: FaultSpec,
    /// The chosen test-set input covering this fault at its maximum p.
    pub input_index: usize,
    pub per_trial_p: f64,
    pub class: DetectionClass,
    /// Trials to reach the report's confidence with the chosen input.
    pub trials_needed: Trials,
}

/// Result of test-set generation.
#[derive(Debug, Clone, PartialEq)]
pub struct TestSetReport {
    /// Confidence level γ the trial counts target.
    pub confidence: f64,
    /// Selected basis inputs, in selection order, duplicate-free.
    pub test_set: Vec<usize>,
    /// Coverage of every detectable fault, in the caller's fault order.
    pub per_fault: Vec<FaultCoverage>,
    /// Faults with maximum per-trial p ≤ [`DETECTION_EPS`] at every input.
    pub undetectable: Vec<FaultSpec>,
}

fn profiles_for(
    c: &Circuit,
    faults: &[FaultSpec],
) -> Result<Vec<Vec<DetectionOutcome>>> {
    let u = c.total_matrix();
    #[cfg(feature = "parallel")]
    {
        faults
            .par_iter()
            .map(|f| profile_against(&u, c, f))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        faults.iter().map(|f| profile_against(&u, c, f)).collect()
    }
}

/// Generates an optimized test set for `faults` on `c`.
///
/// Selection rule, applied deterministically:
///
/// 1. per fault, keep the candidate inputs achieving its maximum per-trial
///    p (within 1e-12);
/// 2. rank candidates by highest achieved rate, then by how many faults
///    they detect at any p > [`DETECTION_EPS`], then by ascending index;
/// 3. pick candidates greedily until every detectable fault is covered by
///    an input achieving its maximum p.
///
/// Undetectable faults are listed separately; trial counts are computed at
/// confidence `gamma`.
pub fn generate_test_set(
    c: &Circuit,
    faults: &[FaultSpec],
    gamma: f64,
) -> Result<TestSetReport> {
    if faults.is_empty() {
        return Err(Error::InvalidFault("no faults to target".into()));
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidConfidence(gamma));
    }
    let profiles = profiles_for(c, faults)?;
    let dim = c.dim();

    // Detectable fault ⇒ (max p, inputs achieving it).
    let mut max_p = vec![0.0f64; faults.len()];
    let mut achievers: Vec<Vec<usize>> = vec![Vec::new(); faults.len()];
    let mut undetectable = Vec::new();
    let mut detectable = Vec::new();
    for (fi, profile) in profiles.iter().enumerate() {
        let best = profile
            .iter()
            .map(|o| o.per_trial_p)
            .fold(0.0f64, f64::max);
        max_p[fi] = best;
        if best <= DETECTION_EPS {
            undetectable.push(faults[fi].clone());
        } else {
            detectable.push(fi);
            achievers[fi] = profile
                .iter()
                .filter(|o| o.per_trial_p >= best - 1e-12)
                .map(|o| o.input_index)
                .collect();
        }
    }

    // Rank every input that achieves some fault's maximum.
    let mut is_candidate = vec![false; dim];
    for &fi in &detectable {
        for &v in &achievers[fi] {
            is_candidate[v] = true;
        }
    }
    let mut candidates: Vec<(f64, usize, usize)> = (0..dim)
        .filter(|&v| is_candidate[v])
        .map(|v| {
            let best_rate = detectable
                .iter()
                .filter(|&&fi| achievers[fi].contains(&v))
                .map(|&fi| max_p[fi])
                .fold(0.0f64, f64::max);
            let coverage = detectable
                .iter()
                .filter(|&&fi| profiles[fi][v].per_trial_p > DETECTION_EPS)
                .count();
            (best_rate, coverage, v)
        })
        .collect();
    candidates.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .expect("detection probabilities are finite")
            .then(b.1.cmp(&a.1))
            .then(a.2.cmp(&b.2))
    });

    let mut covered = vec![false; faults.len()];
    let mut test_set = Vec::new();
    for &(_, _, v) in &candidates {
        let gains = detectable
            .iter()
            .any(|&fi| !covered[fi] && achievers[fi].contains(&v));
        if !gains {
            continue;
        }
        test_set.push(v);
        for &fi in &detectable {
            if achievers[fi].contains(&v) {
                covered[fi] = true;
            }
        }
        if detectable.iter().all(|&fi| covered[fi]) {
            break;
        }
    }

    let mut per_fault = Vec::with_capacity(detectable.len());
    for &fi in &detectable {
        let chosen = *test_set
            .iter()
            .find(|v| achievers[fi].contains(v))
            .expect("greedy loop covered every detectable fault");
        let outcome = &profiles[fi][chosen];
        per_fault.push(FaultCoverage {
            fault: faults[fi].clone(),
            input_index: chosen,
            per_trial_p: outcome.per_trial_p,
            class: outcome.class,
            trials_needed: trials_needed(outcome.per_trial_p, gamma)?,
        });
    }

    Ok(TestSetReport {
        confidence: gamma,
        test_set,
        per_fault,
        undetectable,
    })
}

/// Splits the gate list at `boundaries` (strictly ascending indices in
/// `[1, gate_count)`) into consecutive subcircuits over the full width, and
/// runs fault enumeration plus test-set generation on each independently.
pub fn partition_atpg(
    c: &Circuit,
    boundaries: &[usize],
    cfg: &FaultEnumConfig,
    gamma: f64,
) -> Result<Vec<(Circuit, TestSetReport)>> {
    let m = c.gate_count();
    for (i, &b) in boundaries.iter().enumerate() {
        if b == 0 || b >= m {
            return Err(Error::InvalidBoundaries(format!(
                "boundary {b} outside 1..{m}"
            )));
        }
        if i > 0 && boundaries[i - 1] >= b {
            return Err(Error::InvalidBoundaries(format!(
                "boundaries must be strictly ascending, got {} then {b}",
                boundaries[i - 1]
            )));
        }
    }
    let mut cut_points = Vec::with_capacity(boundaries.len() + 2);
    cut_points.push(0);
    cut_points.extend_from_slice(boundaries);
    cut_points.push(m);
    let mut out = Vec::with_capacity(cut_points.len() - 1);
    for w in cut_points.windows(2) {
        let sub = c.subrange(w[0], w[1]);
        let faults = enumerate_faults(&sub, cfg);
        let report = generate_test_set(&sub, &faults, gamma)?;
        out.push((sub, report));
    }
    Ok(out)
}
