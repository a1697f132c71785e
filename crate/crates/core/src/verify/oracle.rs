//! Exhaustive minimum-width search over topological orders.
//!
//! A qubit is live from its first scheduled instruction through its last;
//! a dead qubit's slot can be reused. The width of an order is its peak
//! live count, and the oracle returns the least width over all orders of
//! the circuit DAG. This is the reference the greedy resizer is audited
//! against, so it shares nothing with it beyond the DAG.
//!
//! Search is iterative deepening on the width bound. Within one bound the
//! DFS memoizes failed scheduled-sets and applies any ready instruction whose
//! qubits are all live without branching: such a move never widens any later
//! step, so some optimal order takes it first.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::VerifyError;
use crate::circuit::{validate, Circuit};
use crate::dag::build_dag;

pub const DEFAULT_NODE_BUDGET: u64 = 2_000_000;
/// Instruction count above which the default budget is refused.
pub const DEFAULT_MAX_OPS: usize = 24;
/// Hard limit from the 128-bit state encoding.
pub const MAX_OPS: usize = 128;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleResult {
    pub min_width: usize,
    /// Circuit instruction indices in execution order.
    pub witness_order: Vec<usize>,
    pub nodes_explored: u64,
}

struct Problem {
    num_qubits: usize,
    operands: Vec<Vec<usize>>,
    preds: Vec<u128>,
    total: Vec<usize>,
    instruction: Vec<usize>,
}

struct Search<'p> {
    p: &'p Problem,
    bound: usize,
    done: u128,
    executed: Vec<usize>,
    live: usize,
    path: Vec<usize>,
    failed: HashSet<u128>,
    nodes: u64,
    budget: u64,
}

enum Outcome {
    Found,
    Infeasible,
    OutOfBudget,
}

impl Search<'_> {
    fn ready(&self, node: usize) -> bool {
        self.done & (1u128 << node) == 0 && self.p.preds[node] & !self.done == 0
    }

    fn new_qubits(&self, node: usize) -> usize {
        self.p.operands[node].iter().filter(|&&q| self.executed[q] == 0).count()
    }

    fn step(&mut self, node: usize) {
        self.done |= 1u128 << node;
        self.path.push(node);
        for &q in &self.p.operands[node] {
            if self.executed[q] == 0 {
                self.live += 1;
            }
            self.executed[q] += 1;
            if self.executed[q] == self.p.total[q] {
                self.live -= 1;
            }
        }
    }

    fn undo(&mut self, node: usize) {
        self.done &= !(1u128 << node);
        self.path.pop();
        for &q in &self.p.operands[node] {
            if self.executed[q] == self.p.total[q] {
                self.live += 1;
            }
            self.executed[q] -= 1;
            if self.executed[q] == 0 {
                self.live -= 1;
            }
        }
    }

    fn dfs(&mut self) -> Outcome {
        let m = self.p.operands.len();
        let mut forced = Vec::new();
        // free moves: ready instructions on live qubits only
        loop {
            let free = (0..m).find(|&n| self.ready(n) && self.new_qubits(n) == 0);
            match free {
                Some(n) => {
                    self.step(n);
                    forced.push(n);
                }
                None => break,
            }
        }
        let outcome = self.branch();
        if !matches!(outcome, Outcome::Found) {
            for n in forced.into_iter().rev() {
                self.undo(n);
            }
        }
        outcome
    }

    fn branch(&mut self) -> Outcome {
        let m = self.p.operands.len();
        if self.path.len() == m {
            return Outcome::Found;
        }
        if self.failed.contains(&self.done) {
            return Outcome::Infeasible;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return Outcome::OutOfBudget;
        }
        let mut candidates: Vec<(usize, usize)> = (0..m)
            .filter(|&n| self.ready(n))
            .map(|n| (self.new_qubits(n), n))
            .filter(|&(new, _)| self.live + new <= self.bound)
            .collect();
        candidates.sort_unstable();
        for (_, n) in candidates {
            self.step(n);
            match self.dfs() {
                Outcome::Found => return Outcome::Found,
                Outcome::OutOfBudget => {
                    self.undo(n);
                    return Outcome::OutOfBudget;
                }
                Outcome::Infeasible => self.undo(n),
            }
        }
        self.failed.insert(self.done);
        Outcome::Infeasible
    }
}

/// Peak live count of executing the instructions in the given order.
fn order_width(p: &Problem, order: &[usize]) -> usize {
    let mut executed = vec![0usize; p.num_qubits];
    let mut live = 0usize;
    let mut peak = 0usize;
    for &node in order {
        for &q in &p.operands[node] {
            if executed[q] == 0 {
                live += 1;
            }
        }
        peak = peak.max(live);
        for &q in &p.operands[node] {
            executed[q] += 1;
            if executed[q] == p.total[q] {
                live -= 1;
            }
        }
    }
    peak
}

pub fn min_width_oracle(circuit: &Circuit, node_budget: u64) -> Result<OracleResult, VerifyError> {
    if let Some(v) = validate(circuit).into_iter().next() {
        return Err(VerifyError::InvalidCircuit(v));
    }
    let dag = build_dag(circuit);
    let m = dag.op_count();
    if m > MAX_OPS || (m > DEFAULT_MAX_OPS && node_budget <= DEFAULT_NODE_BUDGET) {
        return Err(VerifyError::OracleTooLarge {
            instructions: m,
            limit: if m > MAX_OPS { MAX_OPS } else { DEFAULT_MAX_OPS },
        });
    }
    let mut problem = Problem {
        num_qubits: circuit.num_qubits,
        operands: Vec::with_capacity(m),
        preds: Vec::with_capacity(m),
        total: vec![0; circuit.num_qubits],
        instruction: Vec::with_capacity(m),
    };
    for node in 0..m {
        let ops: Vec<usize> = dag.operands(node).iter().map(|q| q.0).collect();
        for &q in &ops {
            problem.total[q] += 1;
        }
        problem.operands.push(ops);
        problem.preds.push(
            dag.op_predecessors(node)
                .iter()
                .fold(0u128, |acc, &p| acc | (1u128 << p)),
        );
        problem.instruction.push(dag.instruction_index(node));
    }

    let natural: Vec<usize> = (0..m).collect();
    let upper = order_width(&problem, &natural).max(1);
    let lower = problem.operands.iter().map(Vec::len).max().unwrap_or(1).max(1);
    let mut nodes = 0u64;
    for bound in lower..upper {
        let mut search = Search {
            p: &problem,
            bound,
            done: 0,
            executed: vec![0; problem.num_qubits],
            live: 0,
            path: Vec::with_capacity(m),
            failed: HashSet::new(),
            nodes: 0,
            budget: node_budget.saturating_sub(nodes),
        };
        let outcome = search.dfs();
        nodes += search.nodes;
        match outcome {
            Outcome::Found => {
                debug_assert_eq!(order_width(&problem, &search.path).max(1), bound);
                return Ok(OracleResult {
                    min_width: bound,
                    witness_order: search.path.iter().map(|&n| problem.instruction[n]).collect(),
                    nodes_explored: nodes,
                });
            }
            Outcome::OutOfBudget => {
                return Err(VerifyError::OracleBudgetExhausted {
                    lower_bound: bound,
                    upper_bound: upper,
                    nodes_explored: nodes,
                })
            }
            Outcome::Infeasible => {}
        }
    }
    Ok(OracleResult {
        min_width: upper,
        witness_order: problem.instruction.clone(),
        nodes_explored: nodes,
    })
}
