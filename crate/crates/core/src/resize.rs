//! Greedy width minimization through qubit reuse.
//!
//! The resizer repeatedly picks the logical qubit whose D-list needs the
//! fewest not-yet-active qubits, loads those qubits onto the lowest free
//! physical slots, and emits every instruction that has become executable.
//! A qubit whose last operation has been emitted frees its slot. The next
//! tenant of a used slot is preceded by a `reset`, and the previous tenant's
//! own measurement (if any) acts as the mid-circuit measurement. Unmeasured
//! qubits are garbage and are only reset.
//!
//! Instruction order is never changed beyond what tenancy forces: each
//! logical qubit sees its operations in original order and every DAG edge
//! is respected.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{count_gates, validate, Circuit, GateCounts, Instruction, QubitId};
use crate::dag::{build_dag, dependency_table, is_resizable, DependencyTable};

/// Physical qubit slot in the resized circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SlotId(pub usize);

impl fmt::Display for SlotId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q{}", self.0)
    }
}

/// One logical qubit's residence on a slot.
///
/// Positions index into the resized instruction list. A qubit with no
/// operations still receives a slot but never touches it, so both
/// positions are `None`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tenancy {
    pub logical: QubitId,
    pub slot: SlotId,
    pub load_pos: Option<usize>,
    pub release_pos: Option<usize>,
    pub reset_inserted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResizePlan {
    pub resized: Circuit,
    pub width: usize,
    /// In assignment order.
    pub tenancies: Vec<Tenancy>,
    pub resizable: bool,
    pub original_width: usize,
    pub resets_added: usize,
    pub warnings: Vec<String>,
    /// For each resized instruction, the original instruction it came from;
    /// `None` marks an inserted reset.
    pub origin: Vec<Option<usize>>,
    pub original_counts: GateCounts,
}

impl ResizePlan {
    pub fn tenants_of(&self, slot: SlotId) -> Vec<QubitId> {
        self.tenancies
            .iter()
            .filter(|t| t.slot == slot)
            .map(|t| t.logical)
            .collect()
    }

    pub fn slot_of(&self, qubit: QubitId) -> Option<SlotId> {
        self.tenancies.iter().find(|t| t.logical == qubit).map(|t| t.slot)
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ResizeError {
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("dependency table does not match circuit: {0}")]
    TableMismatch(String),
    #[error("scheduling deadlock: instruction {instruction} was never emitted")]
    Deadlock { instruction: usize },
}

/// Builds the DAG and dependency table, then resizes.
pub fn resize_circuit(circuit: &Circuit) -> Result<ResizePlan, ResizeError> {
    check_valid(circuit)?;
    let table = dependency_table(&build_dag(circuit));
    resize(circuit, &table)
}

fn check_valid(circuit: &Circuit) -> Result<(), ResizeError> {
    match validate(circuit).into_iter().next() {
        Some(v) => Err(ResizeError::InvalidCircuit(v)),
        None => Ok(()),
    }
}

fn check_table(circuit: &Circuit, table: &DependencyTable) -> Result<(), ResizeError> {
    let n = circuit.num_qubits;
    if table.lists.len() != n || table.counts.len() != n {
        return Err(ResizeError::TableMismatch(format!(
            "table covers {} qubits, circuit has {n}",
            table.lists.len()
        )));
    }
    for (q, list) in table.lists.iter().enumerate() {
        if list.owner != QubitId(q) || list.members.first() != Some(&QubitId(q)) {
            return Err(ResizeError::TableMismatch(format!(
                "entry {q} is not owned by qubit {q}"
            )));
        }
        if let Some(m) = list.members.iter().find(|m| m.0 >= n) {
            return Err(ResizeError::TableMismatch(format!(
                "list for qubit {q} names qubit {}",
                m.0
            )));
        }
    }
    let mut counts = vec![0; n];
    for inst in circuit.instructions.iter().filter(|i| !i.is_barrier()) {
        for q in &inst.qubits {
            counts[q.0] += 1;
        }
    }
    if counts != table.counts {
        return Err(ResizeError::TableMismatch("operation counts differ".into()));
    }
    Ok(())
}

pub fn resize(circuit: &Circuit, table: &DependencyTable) -> Result<ResizePlan, ResizeError> {
    check_valid(circuit)?;
    check_table(circuit, table)?;
    let original_counts = count_gates(circuit);
    if !is_resizable(table, circuit.num_qubits) {
        return Ok(passthrough(circuit, original_counts));
    }
    Scheduler::new(circuit, table).run(original_counts)
}

/// Plan for a circuit that cannot be resized: the input, unchanged.
fn passthrough(circuit: &Circuit, original_counts: GateCounts) -> ResizePlan {
    let n = circuit.num_qubits;
    let mut load = vec![None; n];
    let mut release = vec![None; n];
    for (pos, inst) in circuit.instructions.iter().enumerate() {
        if inst.is_barrier() {
            continue;
        }
        for q in &inst.qubits {
            load[q.0].get_or_insert(pos);
            release[q.0] = Some(pos);
        }
    }
    ResizePlan {
        resized: circuit.clone(),
        width: n,
        tenancies: (0..n)
            .map(|q| Tenancy {
                logical: QubitId(q),
                slot: SlotId(q),
                load_pos: load[q],
                release_pos: release[q],
                reset_inserted: false,
            })
            .collect(),
        resizable: false,
        original_width: n,
        resets_added: 0,
        warnings: Vec::new(),
        origin: (0..circuit.instructions.len()).map(Some).collect(),
        original_counts,
    }
}

struct ListEntry {
    members: Vec<QubitId>,
    unassigned: usize,
}

#[derive(Clone, Copy, Default)]
struct Slot {
    occupant: Option<QubitId>,
    /// Touched since its last reset; the next tenant needs one.
    dirty: bool,
}

struct Scheduler<'c> {
    circuit: &'c Circuit,
    dag: crate::dag::GateDag,
    entries: Vec<ListEntry>,
    /// Current L-list order, as indices into `entries`.
    order: Vec<usize>,
    containing: Vec<Vec<usize>>,
    assigned: Vec<Option<SlotId>>,
    tenancy_of: Vec<Option<usize>>,
    tenancies: Vec<Tenancy>,
    remaining: Vec<usize>,
    head: Vec<Option<usize>>,
    queued: Vec<bool>,
    ready: BinaryHeap<Reverse<usize>>,
    slots: Vec<Slot>,
    out: Vec<Instruction>,
    origin: Vec<Option<usize>>,
    resets_added: usize,
    emitted: usize,
}

impl<'c> Scheduler<'c> {
    fn new(circuit: &'c Circuit, table: &DependencyTable) -> Self {
        let n = circuit.num_qubits;
        let dag = build_dag(circuit);
        let entries: Vec<ListEntry> = table
            .lists
            .iter()
            .map(|l| ListEntry {
                members: l.members.clone(),
                unassigned: l.members.len(),
            })
            .collect();
        let mut containing = vec![Vec::new(); n];
        for (e, entry) in entries.iter().enumerate() {
            for q in &entry.members {
                containing[q.0].push(e);
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&e| (entries[e].unassigned, e));
        let head = (0..n).map(|q| dag.first_op(QubitId(q))).collect();
        let ops = dag.op_count();
        Scheduler {
            circuit,
            entries,
            order,
            containing,
            assigned: vec![None; n],
            tenancy_of: vec![None; n],
            tenancies: Vec::with_capacity(n),
            remaining: table.counts.clone(),
            head,
            queued: vec![false; ops],
            ready: BinaryHeap::new(),
            slots: Vec::new(),
            out: Vec::with_capacity(circuit.instructions.len()),
            origin: Vec::with_capacity(circuit.instructions.len()),
            resets_added: 0,
            emitted: 0,
            dag,
        }
    }

    fn run(mut self, original_counts: GateCounts) -> Result<ResizePlan, ResizeError> {
        loop {
            self.order.retain(|&e| self.entries[e].unassigned > 0);
            if self.order.is_empty() {
                break;
            }
            // stable: equal lengths keep their previous relative order
            let entries = &self.entries;
            self.order.sort_by_key(|&e| entries[e].unassigned);
            let chosen = self.order.remove(0);
            let members = self.entries[chosen].members.clone();
            for q in members {
                if self.assigned[q.0].is_none() {
                    self.assign(q);
                }
            }
            self.drain_ready();
        }

        if self.emitted != self.dag.op_count() {
            let stuck = (0..self.dag.op_count())
                .find(|&node| !self.queued[node])
                .map(|node| self.dag.instruction_index(node))
                .unwrap_or(0);
            return Err(ResizeError::Deadlock { instruction: stuck });
        }

        let warnings = self
            .circuit
            .instructions
            .iter()
            .enumerate()
            .filter(|(_, i)| i.is_barrier())
            .map(|(idx, _)| format!("dropped barrier at instruction {idx}"))
            .collect();
        let width = self.slots.len();
        let resized = Circuit {
            num_qubits: width,
            num_clbits: self.circuit.num_clbits,
            instructions: self.out,
            opaque_decls: self.circuit.opaque_decls.clone(),
        };
        Ok(ResizePlan {
            resized,
            width,
            tenancies: self.tenancies,
            resizable: true,
            original_width: self.circuit.num_qubits,
            resets_added: self.resets_added,
            warnings,
            origin: self.origin,
            original_counts,
        })
    }

    fn assign(&mut self, q: QubitId) {
        let slot = match self.slots.iter().position(|s| s.occupant.is_none()) {
            Some(s) => s,
            None => {
                self.slots.push(Slot::default());
                self.slots.len() - 1
            }
        };
        self.slots[slot].occupant = Some(q);
        self.assigned[q.0] = Some(SlotId(slot));
        self.tenancy_of[q.0] = Some(self.tenancies.len());
        self.tenancies.push(Tenancy {
            logical: q,
            slot: SlotId(slot),
            load_pos: None,
            release_pos: None,
            reset_inserted: false,
        });
        for &e in &self.containing[q.0] {
            self.entries[e].unassigned -= 1;
        }
        if self.remaining[q.0] == 0 {
            // idle qubit: nothing to run, release at once
            self.slots[slot].occupant = None;
        } else if let Some(node) = self.head[q.0] {
            self.try_enqueue(node);
        }
    }

    fn try_enqueue(&mut self, node: usize) {
        if self.queued[node] {
            return;
        }
        let ready = self
            .dag
            .operands(node)
            .iter()
            .all(|q| self.assigned[q.0].is_some() && self.head[q.0] == Some(node));
        if ready {
            self.queued[node] = true;
            self.ready.push(Reverse(node));
        }
    }

    fn drain_ready(&mut self) {
        while let Some(Reverse(node)) = self.ready.pop() {
            self.emit(node);
        }
    }

    fn emit(&mut self, node: usize) {
        let idx = self.dag.instruction_index(node);
        let inst = &self.circuit.instructions[idx];
        for q in &inst.qubits {
            let t = self.tenancy_of[q.0].expect("operand assigned");
            if self.tenancies[t].load_pos.is_none() {
                let slot = self.tenancies[t].slot;
                if self.slots[slot.0].dirty {
                    self.out.push(Instruction::reset(slot.0));
                    self.origin.push(None);
                    self.resets_added += 1;
                    self.tenancies[t].reset_inserted = true;
                    self.slots[slot.0].dirty = false;
                }
            }
        }
        let pos = self.out.len();
        let assigned = &self.assigned;
        self.out
            .push(inst.remapped(|q| QubitId(assigned[q.0].expect("operand assigned").0)));
        self.origin.push(Some(idx));
        self.emitted += 1;

        let operands: Vec<QubitId> = self.dag.operands(node).to_vec();
        let successors: Vec<Option<usize>> = self
            .dag
            .successors(node)
            .map(|s| match s {
                crate::dag::DagNode::Op(n) => Some(n),
                _ => None,
            })
            .collect();
        for (q, next) in operands.into_iter().zip(successors) {
            let t = self.tenancy_of[q.0].expect("operand assigned");
            let slot = self.tenancies[t].slot;
            self.slots[slot.0].dirty = true;
            self.tenancies[t].load_pos.get_or_insert(pos);
            self.head[q.0] = next;
            self.remaining[q.0] -= 1;
            if self.remaining[q.0] == 0 {
                self.tenancies[t].release_pos = Some(pos);
                self.slots[slot.0].occupant = None;
            } else if let Some(n) = next {
                self.try_enqueue(n);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanReport {
    pub original_width: usize,
    pub width: usize,
    pub resizable: bool,
    pub resets_added: usize,
    pub tenancies: Vec<Tenancy>,
    pub counts_before: GateCounts,
    pub counts_after: GateCounts,
    pub warnings: Vec<String>,
}

pub fn plan_report(plan: &ResizePlan) -> PlanReport {
    PlanReport {
        original_width: plan.original_width,
        width: plan.width,
        resizable: plan.resizable,
        resets_added: plan.resets_added,
        tenancies: plan.tenancies.clone(),
        counts_before: plan.original_counts,
        counts_after: count_gates(&plan.resized),
        warnings: plan.warnings.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::InstructionKind;

    fn ghz(n: usize) -> Circuit {
        let mut c = Circuit::new(n, n);
        c.gate("h", &[], &[0]);
        for i in 0..n - 1 {
            c.gate("cx", &[], &[i, i + 1]);
        }
        for i in 0..n {
            c.measure(i, i);
        }
        c
    }

    #[test]
    fn ghz4_hand_trace() {
        let plan = resize_circuit(&ghz(4)).unwrap();
        assert!(plan.resizable);
        assert_eq!(plan.width, 2);
        assert_eq!(plan.resets_added, 2);
        let order: Vec<(usize, usize)> = plan.tenancies.iter().map(|t| (t.logical.0, t.slot.0)).collect();
        assert_eq!(order, vec![(0, 0), (1, 1), (2, 0), (3, 1)]);
        let text: Vec<String> = plan
            .resized
            .instructions
            .iter()
            .map(|i| match i.kind {
                InstructionKind::Gate => format!("{}{:?}", i.name, i.qubits.iter().map(|q| q.0).collect::<Vec<_>>()),
                InstructionKind::Measure => format!("m{}->{}", i.qubits[0].0, i.clbits[0].0),
                InstructionKind::Reset => format!("r{}", i.qubits[0].0),
                InstructionKind::Barrier => "b".into(),
            })
            .collect();
        assert_eq!(
            text,
            vec!["h[0]", "cx[0, 1]", "m0->0", "r0", "cx[1, 0]", "m1->1", "r1", "cx[0, 1]", "m0->2", "m1->3"]
        );
        assert_eq!(plan.origin[3], None);
        assert_eq!(plan.origin[4], Some(2));
    }

    #[test]
    fn unitary_circuit_serializes_to_one_slot() {
        let mut c = Circuit::new(3, 3);
        for q in 0..3 {
            c.gate("h", &[], &[q]);
        }
        for q in 0..3 {
            c.measure(q, q);
        }
        let plan = resize_circuit(&c).unwrap();
        assert_eq!(plan.width, 1);
        assert_eq!(plan.tenants_of(SlotId(0)), vec![QubitId(0), QubitId(1), QubitId(2)]);
        assert_eq!(plan.resets_added, 2);
        assert!(plan.tenancies[1].reset_inserted && !plan.tenancies[0].reset_inserted);
    }

    #[test]
    fn entangled_block_passes_through() {
        let mut c = Circuit::new(4, 4);
        c.opaque("ent4", 0, 4).gate("ent4", &[], &[0, 1, 2, 3]);
        for q in 0..4 {
            c.measure(q, q);
        }
        let plan = resize_circuit(&c).unwrap();
        assert!(!plan.resizable);
        assert_eq!(plan.resized, c);
        assert_eq!(plan.width, 4);
        let report = plan_report(&plan);
        assert_eq!(report.counts_before, report.counts_after);
    }

    #[test]
    fn barriers_are_dropped_with_warning() {
        let mut c = Circuit::new(2, 2);
        c.gate("h", &[], &[0])
            .barrier(&[0, 1])
            .gate("h", &[], &[1])
            .measure(0, 0)
            .measure(1, 1);
        let plan = resize_circuit(&c).unwrap();
        assert_eq!(plan.width, 1);
        assert_eq!(plan.warnings, vec!["dropped barrier at instruction 1".to_string()]);
        assert!(plan.resized.instructions.iter().all(|i| !i.is_barrier()));
    }

    #[test]
    fn idle_qubits_take_no_positions() {
        let mut c = Circuit::new(3, 1);
        c.gate("x", &[], &[2]).measure(2, 0);
        let plan = resize_circuit(&c).unwrap();
        assert_eq!(plan.width, 1);
        assert_eq!(plan.resets_added, 0);
        let idle = &plan.tenancies[0];
        assert_eq!(
            (idle.logical, idle.load_pos, idle.release_pos),
            (QubitId(0), None, None)
        );
    }

    #[test]
    fn mid_stream_measure_is_an_ordinary_op() {
        let mut c = Circuit::new(2, 2);
        c.gate("h", &[], &[0]).measure(0, 0).gate("x", &[], &[0]).measure(0, 1);
        c.gate("h", &[], &[1]);
        let plan = resize_circuit(&c).unwrap();
        assert_eq!(plan.width, 1);
        assert_eq!(plan.tenancies[0].release_pos, Some(3));
    }

    #[test]
    fn mismatched_table_is_rejected() {
        let c = ghz(3);
        let mut table = dependency_table(&build_dag(&c));
        table.lists.pop();
        assert!(matches!(resize(&c, &table), Err(ResizeError::TableMismatch(_))));
        let mut table = dependency_table(&build_dag(&c));
        table.counts[0] += 1;
        assert!(matches!(resize(&c, &table), Err(ResizeError::TableMismatch(_))));
    }

    #[test]
    fn invalid_circuit_is_rejected() {
        let mut c = Circuit::new(1, 0);
        c.gate("h", &[], &[3]);
        assert!(matches!(resize_circuit(&c), Err(ResizeError::InvalidCircuit(_))));
    }

    #[test]
    fn override_with_smaller_lists_still_schedules_everything() {
        // claims q1 needs nothing; its cx with q0 must still wait for q0
        let mut c = Circuit::new(3, 3);
        c.gate("cx", &[], &[0, 1]).gate("h", &[], &[2]);
        for q in 0..3 {
            c.measure(q, q);
        }
        let table = DependencyTable::from_override_json(r#"{"0":[0,1],"1":[1],"2":[2]}"#, &c).unwrap();
        let plan = resize(&c, &table).unwrap();
        assert_eq!(
            plan.resized
                .instructions
                .iter()
                .filter(|i| i.kind == InstructionKind::Gate)
                .count(),
            2
        );
        assert_eq!(plan.origin.iter().flatten().count(), c.instructions.len());
    }
}
