//! Exact fault testing for quantum circuits.
//!
//! `qfault` builds the dense total unitary of a gate-list circuit, injects
//! gate-level and input-boundary faults, computes per-input detection
//! probabilities, derives trials-to-confidence bounds, selects optimized
//! test sets, and validates the analytic numbers with seeded Monte-Carlo
//! measurement simulation.
//!
//! # Conventions
//!
//! * States are column vectors of dimension `2^n`; matrices act by left
//!   multiplication, and a circuit's total matrix is `U_m · … · U_1`, so
//!   **column `i` is the circuit output for basis input `|i⟩`**.
//! * **Line 0 is the most significant bit** of a basis index: at width 2,
//!   index 2 is the bitstring `10`, i.e. line 0 carries a one.
//! * Default numeric tolerance is `1e-9`
//!   ([`linalg::DEFAULT_TOL`]); unitarity checks use `1e-8`
//!   ([`linalg::UNITARY_TOL`]); detection classes flip at `1e-9`
//!   ([`atpg::DETECTION_EPS`]).
//! * Supported widths are 1 through 12 ([`circuit::MAX_WIDTH`]).
//!
//! # Feature flags
//!
//! * `parallel` (default): data-parallel kernels via rayon for matrix
//!   products, per-fault profiles, and Monte-Carlo batches. Disabling the
//!   feature yields a dependency-light sequential build that produces
//!   byte-identical results.
//!
//! # Example
//!
//! ```
//! use qfault::{enumerate_faults, generate_test_set, FaultEnumConfig};
//!
//! let circuit: qfault::Circuit = "qubits 2\nx 0\ncx 0 1\n".parse()?;
//! let mut missing_gates = FaultEnumConfig::none();
//! missing_gates.smgf = true;
//! missing_gates.mmgf_max_cardinality = Some(2);
//! let faults = enumerate_faults(&circuit, &missing_gates);
//! let report = generate_test_set(&circuit, &faults, 0.99)?;
//! assert_eq!(report.test_set, [0]); // |00⟩ exposes every missing gate
//! # Ok::<(), qfault::Error>(())
//! ```

pub mod atpg;
pub mod circuit;
pub mod error;
pub mod fault;
pub mod linalg;
pub mod mc;
pub mod parse;

pub use atpg::{
    best_vector_for_gate, classify, detection_profile, generate_test_set, partition_atpg,
    trials_needed, DetectionClass, DetectionOutcome, FaultCoverage, TestSetReport, Trials,
    DEFAULT_CONFIDENCE, DETECTION_EPS,
};
pub use circuit::{basis_bitstring, bitstring_index, line_bit, Circuit, Gate, GateKind, MAX_WIDTH};
pub use error::{Error, Result};
pub use fault::{
    apply_fault, enumerate_faults, faulty_output, named_stuck_states, parse_fault_selectors,
    CrossMode, FaultEnumConfig, FaultSelection, FaultSpec, FaultyCircuit,
};
pub use linalg::{fidelity, matmul, tensor, ComplexMatrix, StateVector, DEFAULT_TOL, UNITARY_TOL};
pub use mc::{
    escape_curve, estimate_detection, measure_in_basis, orthonormal_basis_containing, TrialPlan,
    TrialResult, RNG_ALGORITHM, TRIALS_PER_BATCH,
};
pub use parse::{parse_circuit, parse_gate_spec};
