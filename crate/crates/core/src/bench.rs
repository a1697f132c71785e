//! Corpus benchmarking: one row per QASM file with widths before and after
//! resizing, gate counts, the oracle audit and the equivalence check.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{count_gates, Circuit};
use crate::qasm::parse_qasm;
use crate::resize::resize_circuit;
use crate::verify::{check_equivalence, min_width_oracle, DEFAULT_NODE_BUDGET, DEFAULT_TOLERANCE, MAX_QUBITS};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchOptions {
    pub oracle_budget: u64,
    pub tolerance: f64,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self {
            oracle_budget: DEFAULT_NODE_BUDGET,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub file: String,
    /// Qubits in normal execution.
    pub normal_width: Option<usize>,
    /// Qubits in sequential execution.
    pub sequential_width: Option<usize>,
    pub resizable: Option<bool>,
    pub gates_before: Option<usize>,
    pub gates_after: Option<usize>,
    pub cnots: Option<usize>,
    pub resets_added: Option<usize>,
    pub oracle_width: Option<usize>,
    /// Resized width minus the oracle's minimum.
    pub oracle_gap: Option<usize>,
    /// Oracle witness order, recorded only when the gap is positive.
    pub oracle_witness: Option<Vec<usize>>,
    pub oracle_note: Option<String>,
    pub tvd: Option<f64>,
    pub equivalent: Option<bool>,
    pub check_note: Option<String>,
    pub error: Option<String>,
}

/// Runs the full pipeline on one circuit.
pub fn bench_circuit(file: &str, circuit: &Circuit, options: &BenchOptions) -> BenchRow {
    let mut row = BenchRow {
        file: file.to_string(),
        normal_width: Some(circuit.num_qubits),
        ..BenchRow::default()
    };
    let plan = match resize_circuit(circuit) {
        Ok(plan) => plan,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    let after = count_gates(&plan.resized);
    row.sequential_width = Some(plan.width);
    row.resizable = Some(plan.resizable);
    row.gates_before = Some(plan.original_counts.total_gates);
    row.gates_after = Some(after.total_gates);
    row.cnots = Some(after.cnot_count);
    row.resets_added = Some(plan.resets_added);

    match min_width_oracle(circuit, options.oracle_budget) {
        Ok(oracle) => {
            let gap = plan.width.saturating_sub(oracle.min_width);
            row.oracle_width = Some(oracle.min_width);
            row.oracle_gap = Some(gap);
            if gap > 0 {
                row.oracle_witness = Some(oracle.witness_order);
            }
        }
        Err(e) => row.oracle_note = Some(e.to_string()),
    }

    if circuit.num_qubits > MAX_QUBITS {
        row.check_note = Some(format!("skipped: more than {MAX_QUBITS} qubits"));
    } else {
        match check_equivalence(circuit, &plan.resized, options.tolerance) {
            Ok(report) => {
                row.tvd = Some(report.tvd);
                row.equivalent = Some(report.equivalent);
            }
            Err(e) => row.check_note = Some(format!("skipped: {e}")),
        }
    }
    row
}

/// QASM files directly inside `dir`, sorted by name.
pub fn corpus_files(dir: &Path) -> io::Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "qasm") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Benchmarks every file of a corpus in parallel. Per-file failures are
/// recorded in the row; rows come back in file-name order.
pub fn bench_corpus(dir: &Path, options: &BenchOptions) -> io::Result<Vec<BenchRow>> {
    let files = corpus_files(dir)?;
    Ok(files
        .par_iter()
        .map(|path| {
            let name = path
                .file_name()
                .map_or_else(String::new, |n| n.to_string_lossy().into_owned());
            let text = match fs::read_to_string(path) {
                Ok(text) => text,
                Err(e) => {
                    return BenchRow {
                        file: name,
                        error: Some(e.to_string()),
                        ..BenchRow::default()
                    }
                }
            };
            match parse_qasm(&text) {
                Ok(circuit) => bench_circuit(&name, &circuit, options),
                Err(e) => BenchRow {
                    file: name,
                    error: Some(e.to_string()),
                    ..BenchRow::default()
                },
            }
        })
        .collect())
}
