//! Seeded Monte-Carlo measurement simulation.
//!
//! Validates the analytic per-trial detection probabilities empirically: a
//! trial prepares the faulty output state for a basis input, measures it in
//! an orthonormal basis containing the fault-free output state, and counts
//! a detection whenever the outcome is not that state.
//!
//! Randomness comes from the ChaCha8 stream cipher RNG
//! ([`RNG_ALGORITHM`]): every batch of [`TRIALS_PER_BATCH`] trials owns the
//! substream whose number equals its batch index under the plan's seed.
//! Batches may therefore run in any order or in parallel, and the counted
//! detections — hence every reported number — are identical across runs and
//! thread counts. Each trial consumes exactly one `f64` draw.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::atpg::detection_profile;
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::fault::{apply_fault, FaultSpec};
use crate::linalg::StateVector;

/// Name of the RNG recorded in reports for reproducibility.
pub const RNG_ALGORITHM: &str = "chacha8";

/// Trials per RNG substream; also the parallel work-unit size.
pub const TRIALS_PER_BATCH: u64 = 4096;

/// One Monte-Carlo experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialPlan {
    pub circuit: Circuit,
    pub fault: FaultSpec,
    /// Nominal basis input index.
    pub input_index: usize,
    /// For [`estimate_detection`]: total number of trials. For
    /// [`escape_curve`]: number of independent k-trial batches per point.
    pub trials: u64,
    pub seed: u64,
}

/// Empirical counterpart of a detection outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub trials: u64,
    pub detections: u64,
    /// detections / trials.
    pub p_hat: f64,
    /// The matrix-pipeline per-trial probability for the same (fault,
    /// input).
    pub analytic_p: f64,
    /// |p_hat − analytic_p|.
    pub abs_error: f64,
}

/// Born-rule measurement: samples an element of `basis` with probability
/// |⟨basis_k|state⟩|², by inverse-CDF over the cumulative probabilities,
/// consuming exactly one uniform draw.
///
/// The basis must be orthonormal within 1e-8 and must span the state
/// (probabilities summing to 1 within 1e-8); it may be a subset of a full
/// basis when the state lies in its span.
pub fn measure_in_basis<R: Rng>(
    state: &StateVector,
    basis: &[StateVector],
    rng: &mut R,
) -> Result<usize> {
    check_orthonormal(basis, state.dim())?;
    let probs = born_probabilities(state, basis)?;
    Ok(sample_cumulative(&cumulative(&probs), rng.gen::<f64>()))
}

fn check_orthonormal(basis: &[StateVector], dim: usize) -> Result<()> {
    if basis.is_empty() {
        return Err(Error::InvalidBoundaries("empty measurement basis".into()));
    }
    for b in basis {
        if b.dim() != dim {
            return Err(Error::DimensionMismatch {
                left: b.dim(),
                right: dim,
            });
        }
    }
    for (i, bi) in basis.iter().enumerate() {
        for (j, bj) in basis.iter().enumerate() {
            let overlap = bi.inner(bj)?.norm();
            let expected = if i == j { 1.0 } else { 0.0 };
            if (overlap - expected).abs() > 1e-8 {
                return Err(Error::NotUnitary {
                    deviation: (overlap - expected).abs(),
                });
            }
        }
    }
    Ok(())
}

fn born_probabilities(state: &StateVector, basis: &[StateVector]) -> Result<Vec<f64>> {
    let mut probs = Vec::with_capacity(basis.len());
    for b in basis {
        probs.push(b.inner(state)?.norm_sqr().clamp(0.0, 1.0));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-8 {
        return Err(Error::NotNormalized { norm_sqr: total });
    }
    Ok(probs)
}

fn cumulative(probs: &[f64]) -> Vec<f64> {
    let mut cum = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for &p in probs {
        acc += p;
        cum.push(acc);
    }
    cum
}

/// First bucket whose cumulative probability exceeds the uniform draw; the
/// final bucket absorbs rounding shortfall.
fn sample_cumulative(cum: &[f64], u: f64) -> usize {
    cum.iter()
        .position(|&c| u < c)
        .unwrap_or(cum.len() - 1)
}

/// Extends `psi` to an orthonormal basis by Gram-Schmidt over
/// `{psi, e_0, e_1, …}` in that fixed order, dropping vectors whose
/// residual norm is ≤ 1e-8. `psi` is element 0 of the result.
pub fn orthonormal_basis_containing(psi: &StateVector) -> Vec<StateVector> {
    let dim = psi.dim();
    let mut basis: Vec<Vec<Complex64>> = vec![psi.amps().to_vec()];
    for k in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        v[k] = Complex64::new(1.0, 0.0);
        for b in &basis {
            // ⟨b|v⟩ with the conjugate on b.
            let overlap: Complex64 = b
                .iter()
                .zip(&v)
                .map(|(bi, vi)| bi.conj() * vi)
                .sum();
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= overlap * bi;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm <= 1e-8 {
            continue;
        }
        for z in &mut v {
            *z /= norm;
        }
        basis.push(v);
    }
    basis
        .into_iter()
        .map(|amps| StateVector::new(amps).expect("orthonormalized vectors are unit length"))
        .collect()
}

struct Experiment {
    /// Cumulative Born probabilities of the faulty output in the completed
    /// basis; bucket 0 is the fault-free output state.
    cum: Vec<f64>,
    analytic_p: f64,
}

fn prepare(plan: &TrialPlan) -> Result<Experiment> {
    if plan.trials == 0 {
        return Err(Error::InvalidPlan("trials must be at least 1".into()));
    }
    let dim = plan.circuit.dim();
    if plan.input_index >= dim {
        return Err(Error::IndexOutOfRange {
            index: plan.input_index,
            dim,
        });
    }
    let profile = detection_profile(&plan.circuit, &plan.fault)?;
    let analytic_p = profile[plan.input_index].per_trial_p;

    let u = plan.circuit.total_matrix();
    let good = u.column(plan.input_index)?;
    let fc = apply_fault(&plan.circuit, &plan.fault)?;
    let bad = match fc.stuck() {
        None => fc.circuit().total_matrix().column(plan.input_index)?,
        Some(_) => u.apply(&fc.input_state(plan.input_index)?)?,
    };
    let basis = orthonormal_basis_containing(&good);
    let probs = born_probabilities(&bad, &basis)?;
    Ok(Experiment {
        cum: cumulative(&probs),
        analytic_p,
    })
}

fn batch_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Detections within one batch: `count` trials on the given substream.
fn run_batch(cum: &[f64], seed: u64, stream: u64, count: u64) -> u64 {
    let mut rng = batch_rng(seed, stream);
    let mut detections = 0u64;
    for _ in 0..count {
        if sample_cumulative(cum, rng.gen::<f64>()) != 0 {
            detections += 1;
        }
    }
    detections
}

/// Runs `plan.trials` measurement trials and compares the empirical
/// detection rate against the analytic per-trial probability.
pub fn estimate_detection(plan: &TrialPlan) -> Result<TrialResult> {
    let exp = prepare(plan)?;
    let full_batches = plan.trials / TRIALS_PER_BATCH;
    let remainder = plan.trials % TRIALS_PER_BATCH;
    let batch_sizes: Vec<(u64, u64)> = (0..full_batches)
        .map(|b| (b, TRIALS_PER_BATCH))
        .chain((remainder > 0).then_some((full_batches, remainder)))
        .collect();

    #[cfg(feature = "parallel")]
    let detections: u64 = batch_sizes
        .par_iter()
        .map(|&(stream, count)| run_batch(&exp.cum, plan.seed, stream, count))
        .sum();
    #[cfg(not(feature = "parallel"))]
    let detections: u64 = batch_sizes
        .iter()
        .map(|&(stream, count)| run_batch(&exp.cum, plan.seed, stream, count))
        .sum();

    let p_hat = detections as f64 / plan.trials as f64;
    Ok(TrialResult {
        trials: plan.trials,
        detections,
        p_hat,
        analytic_p: exp.analytic_p,
        abs_error: (p_hat - exp.analytic_p).abs(),
    })
}

/// Empirical cumulative detection law: for each `k ≤ k_max`, the fraction
/// of `plan.trials` independent k-trial batches containing at least one
/// detection (the estimate of `1 − (1−p)^k`).
///
/// Batch `b` of point `k` owns substream `(k << 32) | b`, so every point
/// uses fresh, disjoint randomness.
pub fn escape_curve(plan: &TrialPlan, k_max: u64) -> Result<Vec<(u64, f64)>> {
    if k_max == 0 {
        return Err(Error::InvalidPlan("k_max must be at least 1".into()));
    }
    if k_max > u32::MAX as u64 || plan.trials > u32::MAX as u64 {
        return Err(Error::InvalidPlan(
            "escape_curve supports at most 2^32 − 1 points and batches".into(),
        ));
    }
    let exp = prepare(plan)?;
    let batches = plan.trials;
    let mut curve = Vec::with_capacity(k_max as usize);
    for k in 1..=k_max {
        let run_point = |b: u64| -> u64 {
            let mut rng = batch_rng(plan.seed, (k << 32) | b);
            for _ in 0..k {
                if sample_cumulative(&exp.cum, rng.gen::<f64>()) != 0 {
                    return 1;
                }
            }
            0
        };
        #[cfg(feature = "parallel")]
        let successes: u64 = (0..batches).into_par_iter().map(run_point).sum();
        #[cfg(not(feature = "parallel"))]
        let successes: u64 = (0..batches).map(run_point).sum();
        curve.push((k, successes as f64 / batches as f64));
    }
    Ok(curve)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_circuit;

    fn h_plan(trials: u64) -> TrialPlan {
        TrialPlan {
            circuit: parse_circuit("qubits 1\nh 0\n").unwrap(),
            fault: FaultSpec::Smgf { gate: 0 },
            input_index: 0,
            trials,
            seed: 42,
        }
    }

    #[test]
    fn measuring_a_basis_state_in_the_computational_basis_is_certain() {
        let dim = 4;
        let basis: Vec<StateVector> = (0..dim)
            .map(|k| StateVector::basis(dim, k).unwrap())
            .collect();
        let state = StateVector::basis(dim, 2).unwrap();
        for seed in 0..20 {
            let mut rng = batch_rng(seed, 0);
            assert_eq!(measure_in_basis(&state, &basis, &mut rng).unwrap(), 2);
        }
    }

    #[test]
    fn measuring_a_superposition_matches_born_frequencies() {
        let c = parse_circuit("qubits 1\nh 0\n").unwrap();
        let state = c.total_matrix().column(0).unwrap();
        let basis: Vec<StateVector> =
            (0..2).map(|k| StateVector::basis(2, k).unwrap()).collect();
        let mut rng = batch_rng(7, 0);
        let n = 100_000;
        let mut zeros = 0u64;
        for _ in 0..n {
            if measure_in_basis(&state, &basis, &mut rng).unwrap() == 0 {
                zeros += 1;
            }
        }
        let freq = zeros as f64 / n as f64;
        assert!((freq - 0.5).abs() <= 0.01, "freq {freq}");
    }

    #[test]
    fn entangled_state_only_yields_correlated_outcomes() {
        let c = parse_circuit("qubits 2\nh 0\ncx 0 1\n").unwrap();
        let state = c.total_matrix().column(0).unwrap();
        let basis: Vec<StateVector> =
            (0..4).map(|k| StateVector::basis(4, k).unwrap()).collect();
        let mut rng = batch_rng(3, 0);
        for _ in 0..10_000 {
            let outcome = measure_in_basis(&state, &basis, &mut rng).unwrap();
            assert!(outcome == 0 || outcome == 3, "outcome {outcome}");
        }
    }

    #[test]
    fn measure_rejects_bad_bases() {
        let state = StateVector::basis(2, 0).unwrap();
        let mut rng = batch_rng(0, 0);
        // Duplicate vector: not orthogonal.
        let dup = vec![state.clone(), state.clone()];
        assert!(measure_in_basis(&state, &dup, &mut rng).is_err());
        // Wrong dimension.
        let wrong = vec![StateVector::basis(4, 0).unwrap()];
        assert!(measure_in_basis(&state, &wrong, &mut rng).is_err());
        // Basis that misses the state's support.
        let partial = vec![StateVector::basis(2, 1).unwrap()];
        assert!(measure_in_basis(&state, &partial, &mut rng).is_err());
    }

    #[test]
    fn basis_completion_is_orthonormal_and_keeps_psi_first() {
        for text in ["qubits 1\nh 0\n", "qubits 2\nh 0\ncx 0 1\n", "qubits 2\nh 0\nt 0\ncz 0 1\n"]
        {
            let c = parse_circuit(text).unwrap();
            let psi = c.total_matrix().column(0).unwrap();
            let basis = orthonormal_basis_containing(&psi);
            assert_eq!(basis.len(), psi.dim());
            assert_eq!(basis[0], psi);
            for (i, bi) in basis.iter().enumerate() {
                for (j, bj) in basis.iter().enumerate() {
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!(
                        (bi.inner(bj).unwrap().norm() - expected).abs() <= 1e-12,
                        "{text:?} ⟨{i}|{j}⟩"
                    );
                }
            }
        }
    }

    #[test]
    fn basis_completion_of_a_basis_state_is_a_permuted_identity() {
        let psi = StateVector::basis(4, 2).unwrap();
        let basis = orthonormal_basis_containing(&psi);
        assert_eq!(basis.len(), 4);
        assert_eq!(basis[0], psi);
        // e_2 is linearly dependent on psi and gets dropped; the rest keep
        // their order.
        assert_eq!(basis[1], StateVector::basis(4, 0).unwrap());
        assert_eq!(basis[2], StateVector::basis(4, 1).unwrap());
        assert_eq!(basis[3], StateVector::basis(4, 3).unwrap());
    }

    #[test]
    fn missing_hadamard_estimates_one_half() {
        let result = estimate_detection(&h_plan(100_000)).unwrap();
        assert!((result.analytic_p - 0.5).abs() <= 1e-12);
        assert!(result.abs_error <= 0.01, "p_hat {}", result.p_hat);
    }

    #[test]
    fn deterministic_fault_estimates_exactly_one() {
        let plan = TrialPlan {
            circuit: parse_circuit("qubits 2\nx 0\ncx 0 1\n").unwrap(),
            fault: FaultSpec::Smgf { gate: 0 },
            input_index: 0,
            trials: 100,
            seed: 42,
        };
        let result = estimate_detection(&plan).unwrap();
        assert_eq!(result.detections, 100);
        assert_eq!(result.p_hat, 1.0);
        assert_eq!(result.analytic_p, 1.0);
        assert_eq!(result.abs_error, 0.0);
    }

    #[test]
    fn invisible_stuck_fault_estimates_exactly_zero() {
        let plan = TrialPlan {
            circuit: parse_circuit("qubits 2\nx 0\ncx 0 1\n").unwrap(),
            fault: FaultSpec::StuckAt {
                line: 0,
                alpha: Complex64::new(1.0, 0.0),
                beta: Complex64::new(0.0, 0.0),
            },
            input_index: 0,
            trials: 1000,
            seed: 42,
        };
        let result = estimate_detection(&plan).unwrap();
        assert_eq!(result.detections, 0);
        assert_eq!(result.p_hat, 0.0);
        assert_eq!(result.analytic_p, 0.0);
    }

    #[test]
    fn estimates_are_reproducible() {
        let a = estimate_detection(&h_plan(50_000)).unwrap();
        let b = estimate_detection(&h_plan(50_000)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn different_seeds_give_different_samples() {
        let mut plan = h_plan(10_000);
        let a = estimate_detection(&plan).unwrap();
        plan.seed = 43;
        let b = estimate_detection(&plan).unwrap();
        assert_ne!(a.detections, b.detections);
    }

    #[test]
    fn batch_boundaries_do_not_bias_the_estimate() {
        // One trial more than a full batch exercises the remainder path.
        let result = estimate_detection(&h_plan(TRIALS_PER_BATCH + 1)).unwrap();
        assert_eq!(result.trials, TRIALS_PER_BATCH + 1);
        assert!((result.p_hat - 0.5).abs() < 0.05);
    }

    #[test]
    fn escape_curve_follows_the_cumulative_law() {
        let mut plan = h_plan(0);
        plan.trials = 20_000; // batches per point
        let curve = escape_curve(&plan, 5).unwrap();
        assert_eq!(curve.len(), 5);
        for &(k, rate) in &curve {
            let analytic = 1.0 - 0.5f64.powi(k as i32);
            assert!(
                (rate - analytic).abs() <= 0.02,
                "k={k} rate={rate} analytic={analytic}"
            );
        }
    }

    #[test]
    fn escape_curve_is_exact_for_deterministic_faults() {
        let plan = TrialPlan {
            circuit: parse_circuit("qubits 2\nx 0\ncx 0 1\n").unwrap(),
            fault: FaultSpec::Smgf { gate: 0 },
            input_index: 0,
            trials: 50,
            seed: 1,
        };
        for (k, rate) in escape_curve(&plan, 4).unwrap() {
            assert_eq!(rate, 1.0, "k={k}");
        }
    }

    #[test]
    fn plans_are_validated() {
        let mut plan = h_plan(0);
        assert!(matches!(
            estimate_detection(&plan),
            Err(Error::InvalidPlan(_))
        ));
        plan.trials = 10;
        plan.input_index = 5;
        assert!(estimate_detection(&plan).is_err());
        plan.input_index = 0;
        assert!(matches!(
            escape_curve(&plan, 0),
            Err(Error::InvalidPlan(_))
        ));
    }
}
