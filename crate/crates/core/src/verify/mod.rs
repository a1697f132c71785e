//! Exact verification: branch-enumerating simulation, distribution
//! equivalence, success probability, and the minimum-width oracle.

mod oracle;
mod sim;

use std::collections::BTreeMap;

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::Circuit;

pub use oracle::{min_width_oracle, OracleResult, DEFAULT_MAX_OPS, DEFAULT_NODE_BUDGET, MAX_OPS};
pub use sim::{
    clbit_key, simulate, simulate_with_stats, OutcomeDistribution, MAX_BRANCHES, MAX_QUBITS, PRUNE_THRESHOLD,
};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum VerifyError {
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("circuit has {qubits} qubits; the simulator handles at most {limit}")]
    TooManyQubits { qubits: usize, limit: usize },
    #[error("more than {limit} measurement branches")]
    TooManyBranches { limit: u64 },
    #[error("gate '{0}' has no known matrix (opaque gates cannot be simulated)")]
    OpaqueGate(String),
    #[error("circuits have different classical widths ({0} vs {1})")]
    ClbitMismatch(usize, usize),
    #[error("correct-outcome set is empty")]
    EmptyCorrectSet,
    #[error("{instructions} instructions exceed the oracle limit of {limit}; raise the node budget")]
    OracleTooLarge { instructions: usize, limit: usize },
    #[error("oracle node budget exhausted after {nodes_explored} nodes; min width is between {lower_bound} and {upper_bound}")]
    OracleBudgetExhausted {
        lower_bound: usize,
        upper_bound: usize,
        nodes_explored: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub tvd: f64,
    pub equivalent: bool,
    pub tolerance: f64,
    /// Completed branches explored for each circuit.
    pub branch_counts: (u64, u64),
}

/// Total variation distance between two distributions.
pub fn total_variation(a: &OutcomeDistribution, b: &OutcomeDistribution) -> f64 {
    let mut sum = 0.0;
    for (k, pa) in &a.probs {
        sum += (pa - b.get(k)).abs();
    }
    for (k, pb) in &b.probs {
        if !a.probs.contains_key(k) {
            sum += pb;
        }
    }
    (0.5 * sum).clamp(0.0, 1.0)
}

pub fn check_equivalence(a: &Circuit, b: &Circuit, tolerance: f64) -> Result<EquivalenceReport, VerifyError> {
    if a.num_clbits != b.num_clbits {
        return Err(VerifyError::ClbitMismatch(a.num_clbits, b.num_clbits));
    }
    let (da, na) = simulate_with_stats(a)?;
    let (db, nb) = simulate_with_stats(b)?;
    let tvd = total_variation(&da, &db);
    Ok(EquivalenceReport {
        tvd,
        equivalent: tvd < tolerance,
        tolerance,
        branch_counts: (na, nb),
    })
}

/// Probability of a successful trial: the mass on the correct outcomes.
pub fn compute_pst<S: AsRef<str>>(dist: &OutcomeDistribution, correct: &[S]) -> Result<f64, VerifyError> {
    if correct.is_empty() {
        return Err(VerifyError::EmptyCorrectSet);
    }
    let mut keys: Vec<&str> = correct.iter().map(AsRef::as_ref).collect();
    keys.sort_unstable();
    keys.dedup();
    Ok(keys.into_iter().map(|k| dist.get(k)).sum())
}

/// Draws `shots` outcomes from an exact distribution.
pub fn sample_counts(dist: &OutcomeDistribution, shots: usize, seed: u64) -> BTreeMap<String, usize> {
    let mut counts = BTreeMap::new();
    if dist.probs.is_empty() || shots == 0 {
        return counts;
    }
    let keys: Vec<&String> = dist.probs.keys().collect();
    let weights = WeightedIndex::new(dist.probs.values().copied()).expect("positive weights");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..shots {
        *counts.entry(keys[weights.sample(&mut rng)].clone()).or_insert(0) += 1;
    }
    counts
}
