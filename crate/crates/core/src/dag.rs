//! Circuit DAG and per-qubit dependency lists.
//!
//! Every qubit owns a wire running from its root through each instruction
//! that touches it to its leaf. A qubit's dependency list (D-list) holds
//! itself followed by every qubit operated on by an ancestor of its leaf:
//! the qubits that must be active before it can finish. Barriers add no
//! edges. False and true dependencies are not distinguished.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, QubitId};

/// A node reached by walking a wire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DagNode {
    Root(QubitId),
    /// Instruction node, identified by its position in [`GateDag`] order.
    Op(usize),
    Leaf(QubitId),
}

/// Wire-edge DAG over the non-barrier instructions of a circuit.
///
/// Op nodes are numbered in instruction order, which is itself a
/// topological order. Operands are stored flat; `wire_prev[k]` and
/// `wire_next[k]` give the neighbours of the node owning operand slot `k`
/// along that operand's wire.
#[derive(Debug, Clone)]
pub struct GateDag {
    num_qubits: usize,
    instruction: Vec<usize>,
    offsets: Vec<usize>,
    operands: Vec<QubitId>,
    wire_prev: Vec<Option<usize>>,
    wire_next: Vec<Option<usize>>,
    first: Vec<Option<usize>>,
    last: Vec<Option<usize>>,
}

impl GateDag {
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// Number of instruction nodes (roots and leaves excluded).
    pub fn op_count(&self) -> usize {
        self.instruction.len()
    }

    /// Index of the circuit instruction behind op node `node`.
    pub fn instruction_index(&self, node: usize) -> usize {
        self.instruction[node]
    }

    pub fn operands(&self, node: usize) -> &[QubitId] {
        &self.operands[self.offsets[node]..self.offsets[node + 1]]
    }

    /// Wire predecessors of an op node, one per operand, in operand order.
    pub fn predecessors(&self, node: usize) -> impl Iterator<Item = DagNode> + '_ {
        let span = self.offsets[node]..self.offsets[node + 1];
        span.map(move |k| match self.wire_prev[k] {
            Some(p) => DagNode::Op(p),
            None => DagNode::Root(self.operands[k]),
        })
    }

    /// Wire successors of an op node, one per operand, in operand order.
    pub fn successors(&self, node: usize) -> impl Iterator<Item = DagNode> + '_ {
        let span = self.offsets[node]..self.offsets[node + 1];
        span.map(move |k| match self.wire_next[k] {
            Some(n) => DagNode::Op(n),
            None => DagNode::Leaf(self.operands[k]),
        })
    }

    /// Op predecessors only (root edges dropped), deduplicated.
    pub fn op_predecessors(&self, node: usize) -> Vec<usize> {
        let mut preds: Vec<usize> = self
            .predecessors(node)
            .filter_map(|n| match n {
                DagNode::Op(p) => Some(p),
                _ => None,
            })
            .collect();
        preds.sort_unstable();
        preds.dedup();
        preds
    }

    pub fn first_op(&self, qubit: QubitId) -> Option<usize> {
        self.first[qubit.0]
    }

    /// The op node feeding `qubit`'s leaf, if the qubit is used at all.
    pub fn last_op(&self, qubit: QubitId) -> Option<usize> {
        self.last[qubit.0]
    }

    /// Op nodes on `qubit`'s wire from root to leaf.
    pub fn wire(&self, qubit: QubitId) -> Vec<usize> {
        let mut path = Vec::new();
        let mut cur = self.first[qubit.0];
        while let Some(node) = cur {
            path.push(node);
            let k = self.operand_slot(node, qubit).expect("wire node lacks its qubit");
            cur = self.wire_next[k];
        }
        path
    }

    fn operand_slot(&self, node: usize, qubit: QubitId) -> Option<usize> {
        (self.offsets[node]..self.offsets[node + 1]).find(|&k| self.operands[k] == qubit)
    }
}

/// Builds the wire DAG in one pass over the instruction list.
///
/// Expects a valid circuit (see [`Circuit::validate`]).
pub fn build_dag(circuit: &Circuit) -> GateDag {
    let n = circuit.num_qubits;
    let ops = circuit.op_count();
    let mut dag = GateDag {
        num_qubits: n,
        instruction: Vec::with_capacity(ops),
        offsets: Vec::with_capacity(ops + 1),
        operands: Vec::new(),
        wire_prev: Vec::new(),
        wire_next: Vec::new(),
        first: vec![None; n],
        last: vec![None; n],
    };
    // operand slot of each qubit's latest node, to patch wire_next
    let mut last_slot: Vec<Option<usize>> = vec![None; n];
    dag.offsets.push(0);
    for (idx, inst) in circuit.instructions.iter().enumerate() {
        if inst.is_barrier() {
            continue;
        }
        let node = dag.instruction.len();
        dag.instruction.push(idx);
        for &q in &inst.qubits {
            let k = dag.operands.len();
            dag.operands.push(q);
            dag.wire_prev.push(dag.last[q.0]);
            dag.wire_next.push(None);
            if let Some(prev_slot) = last_slot[q.0] {
                dag.wire_next[prev_slot] = Some(node);
            }
            if dag.first[q.0].is_none() {
                dag.first[q.0] = Some(node);
            }
            dag.last[q.0] = Some(node);
            last_slot[q.0] = Some(k);
        }
        dag.offsets.push(dag.operands.len());
    }
    dag
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DependencyList {
    pub owner: QubitId,
    /// Owner first, then other qubits in first-encounter order.
    pub members: Vec<QubitId>,
}

impl DependencyList {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DependencyTable {
    /// Indexed by owner.
    pub lists: Vec<DependencyList>,
    /// Number of non-barrier instructions touching each qubit.
    pub counts: Vec<usize>,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum DependencyOverrideError {
    #[error("invalid dependency JSON: {0}")]
    Json(String),
    #[error("key '{0}' is not a qubit index")]
    BadKey(String),
    #[error("qubit {0} out of range (circuit has {1} qubits)")]
    OutOfRange(usize, usize),
    #[error("list for qubit {0} must start with its owner")]
    OwnerNotFirst(usize),
    #[error("list for qubit {0} contains qubit {1} twice")]
    Duplicate(usize, usize),
    #[error("no dependency list supplied for qubit {0}")]
    Missing(usize),
}

impl DependencyTable {
    pub fn list(&self, qubit: QubitId) -> &DependencyList {
        &self.lists[qubit.0]
    }

    /// Builds a table from an externally supplied JSON document of the form
    /// `{"0": [0, 5], "1": [1, 5, 0], ...}`. Operation counts always come
    /// from `circuit`.
    pub fn from_override_json(text: &str, circuit: &Circuit) -> Result<Self, DependencyOverrideError> {
        let raw: BTreeMap<String, Vec<usize>> =
            serde_json::from_str(text).map_err(|e| DependencyOverrideError::Json(e.to_string()))?;
        let n = circuit.num_qubits;
        let mut lists: Vec<Option<DependencyList>> = vec![None; n];
        for (key, members) in raw {
            let owner: usize = key
                .trim()
                .parse()
                .map_err(|_| DependencyOverrideError::BadKey(key.clone()))?;
            if owner >= n {
                return Err(DependencyOverrideError::OutOfRange(owner, n));
            }
            if members.first() != Some(&owner) {
                return Err(DependencyOverrideError::OwnerNotFirst(owner));
            }
            let mut seen = vec![false; n];
            for &m in &members {
                if m >= n {
                    return Err(DependencyOverrideError::OutOfRange(m, n));
                }
                if std::mem::replace(&mut seen[m], true) {
                    return Err(DependencyOverrideError::Duplicate(owner, m));
                }
            }
            lists[owner] = Some(DependencyList {
                owner: QubitId(owner),
                members: members.into_iter().map(QubitId).collect(),
            });
        }
        let lists = lists
            .into_iter()
            .enumerate()
            .map(|(q, l)| l.ok_or(DependencyOverrideError::Missing(q)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(DependencyTable {
            lists,
            counts: operation_counts(circuit),
        })
    }

    /// JSON form accepted by [`DependencyTable::from_override_json`].
    pub fn to_override_json(&self) -> String {
        let map: BTreeMap<String, Vec<usize>> = self
            .lists
            .iter()
            .map(|l| (l.owner.0.to_string(), l.members.iter().map(|q| q.0).collect()))
            .collect();
        serde_json::to_string_pretty(&map).expect("map of vectors serializes")
    }
}

fn operation_counts(circuit: &Circuit) -> Vec<usize> {
    let mut counts = vec![0; circuit.num_qubits];
    for inst in circuit.instructions.iter().filter(|i| !i.is_barrier()) {
        for q in &inst.qubits {
            counts[q.0] += 1;
        }
    }
    counts
}

/// Computes every qubit's D-list by tracing back from its leaf.
///
/// The trace scans op nodes in descending order from the owner's last
/// operation. A node is an ancestor of the leaf exactly when it touches a
/// qubit already reached, because every earlier node on a reached qubit's
/// wire lies on a path to the reached node. Members are therefore appended
/// in reverse instruction order, operands left to right. Cost is O(n·m).
pub fn dependency_table(dag: &GateDag) -> DependencyTable {
    let n = dag.num_qubits;
    let mut stamp = vec![usize::MAX; n];
    let mut lists = Vec::with_capacity(n);
    for owner in 0..n {
        let mut members = vec![QubitId(owner)];
        stamp[owner] = owner;
        if let Some(last) = dag.last[owner] {
            for node in (0..=last).rev() {
                if members.len() == n {
                    break;
                }
                let ops = dag.operands(node);
                if ops.iter().any(|q| stamp[q.0] == owner) {
                    for q in ops {
                        if stamp[q.0] != owner {
                            stamp[q.0] = owner;
                            members.push(*q);
                        }
                    }
                }
            }
        }
        lists.push(DependencyList {
            owner: QubitId(owner),
            members,
        });
    }
    let mut counts = vec![0; n];
    for q in &dag.operands {
        counts[q.0] += 1;
    }
    DependencyTable { lists, counts }
}

/// The L-list: D-lists sorted by length, ties by ascending owner.
pub fn sorted_llist(table: &DependencyTable) -> Vec<DependencyList> {
    let mut lists = table.lists.clone();
    lists.sort_by_key(|l| (l.len(), l.owner));
    lists
}

/// A circuit is resizable unless even its shortest D-list needs every qubit.
pub fn is_resizable(table: &DependencyTable, num_qubits: usize) -> bool {
    table
        .lists
        .iter()
        .map(DependencyList::len)
        .min()
        .is_some_and(|shortest| shortest != num_qubits)
}
