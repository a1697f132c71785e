//! In-memory circuit representation shared by every pass.
//!
//! A [`Circuit`] is a flat, ordered list of [`Instruction`]s over logical
//! qubits and classical bits. Multiple source registers are flattened into a
//! single index space before they reach this type.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Logical qubit index within a circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QubitId(pub usize);

/// Classical bit index within a circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClbitId(pub usize);

impl QubitId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl ClbitId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for QubitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q{}", self.0)
    }
}

impl fmt::Display for ClbitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InstructionKind {
    Gate,
    Measure,
    Reset,
    Barrier,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instruction {
    pub kind: InstructionKind,
    /// Gate mnemonic; empty for non-gate kinds.
    pub name: String,
    /// Angles in radians.
    pub params: Vec<f64>,
    pub qubits: Vec<QubitId>,
    pub clbits: Vec<ClbitId>,
}

impl Instruction {
    pub fn gate(name: impl Into<String>, params: Vec<f64>, qubits: &[usize]) -> Self {
        Instruction {
            kind: InstructionKind::Gate,
            name: name.into(),
            params,
            qubits: qubits.iter().copied().map(QubitId).collect(),
            clbits: Vec::new(),
        }
    }

    pub fn measure(qubit: usize, clbit: usize) -> Self {
        Instruction {
            kind: InstructionKind::Measure,
            name: String::new(),
            params: Vec::new(),
            qubits: vec![QubitId(qubit)],
            clbits: vec![ClbitId(clbit)],
        }
    }

    pub fn reset(qubit: usize) -> Self {
        Instruction {
            kind: InstructionKind::Reset,
            name: String::new(),
            params: Vec::new(),
            qubits: vec![QubitId(qubit)],
            clbits: Vec::new(),
        }
    }

    pub fn barrier(qubits: &[usize]) -> Self {
        Instruction {
            kind: InstructionKind::Barrier,
            name: String::new(),
            params: Vec::new(),
            qubits: qubits.iter().copied().map(QubitId).collect(),
            clbits: Vec::new(),
        }
    }

    pub fn is_barrier(&self) -> bool {
        self.kind == InstructionKind::Barrier
    }

    /// Returns a copy with every qubit operand passed through `map`.
    pub fn remapped(&self, mut map: impl FnMut(QubitId) -> QubitId) -> Self {
        Instruction {
            qubits: self.qubits.iter().map(|&q| map(q)).collect(),
            ..self.clone()
        }
    }
}

/// Declaration of an opaque gate carried through uninterpreted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OpaqueDecl {
    pub name: String,
    pub num_params: usize,
    pub num_qubits: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub num_qubits: usize,
    pub num_clbits: usize,
    pub instructions: Vec<Instruction>,
    pub opaque_decls: Vec<OpaqueDecl>,
}

impl Circuit {
    pub fn new(num_qubits: usize, num_clbits: usize) -> Self {
        Circuit {
            num_qubits,
            num_clbits,
            instructions: Vec::new(),
            opaque_decls: Vec::new(),
        }
    }

    pub fn push(&mut self, instruction: Instruction) -> &mut Self {
        self.instructions.push(instruction);
        self
    }

    pub fn gate(&mut self, name: &str, params: &[f64], qubits: &[usize]) -> &mut Self {
        self.push(Instruction::gate(name, params.to_vec(), qubits))
    }

    pub fn measure(&mut self, qubit: usize, clbit: usize) -> &mut Self {
        self.push(Instruction::measure(qubit, clbit))
    }

    pub fn reset(&mut self, qubit: usize) -> &mut Self {
        self.push(Instruction::reset(qubit))
    }

    pub fn barrier(&mut self, qubits: &[usize]) -> &mut Self {
        self.push(Instruction::barrier(qubits))
    }

    pub fn opaque(&mut self, name: &str, num_params: usize, num_qubits: usize) -> &mut Self {
        self.opaque_decls.push(OpaqueDecl {
            name: name.to_string(),
            num_params,
            num_qubits,
        });
        self
    }

    pub fn opaque_decl(&self, name: &str) -> Option<&OpaqueDecl> {
        self.opaque_decls.iter().find(|d| d.name == name)
    }

    /// Number of non-barrier instructions.
    pub fn op_count(&self) -> usize {
        self.instructions.iter().filter(|i| !i.is_barrier()).count()
    }

    /// Checks every circuit and instruction invariant, returning one
    /// description per violation. Empty means well-formed.
    pub fn validate(&self) -> Vec<String> {
        validate(self)
    }
}

/// Arity of a standard gate: `(qubits, params)`.
pub fn standard_gate(name: &str) -> Option<(usize, usize)> {
    let arity = match name {
        "id" | "h" | "x" | "y" | "z" | "s" | "sdg" | "t" | "tdg" | "sx" | "sxdg" => (1, 0),
        "u0" | "u1" | "p" | "rx" | "ry" | "rz" => (1, 1),
        "u2" => (1, 2),
        "u3" | "u" => (1, 3),
        "cx" | "cy" | "cz" | "ch" | "swap" => (2, 0),
        "crx" | "cry" | "crz" | "cu1" | "cp" | "rzz" => (2, 1),
        "cu3" => (2, 3),
        "ccx" | "cswap" => (3, 0),
        _ => return None,
    };
    Some(arity)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCounts {
    pub total_gates: usize,
    pub cnot_count: usize,
    pub measure_count: usize,
    pub reset_count: usize,
    pub barrier_count: usize,
    /// Longest dependency chain over gate, measure and reset nodes.
    pub depth: usize,
}

pub fn count_gates(circuit: &Circuit) -> GateCounts {
    let mut counts = GateCounts::default();
    let mut wire_depth = vec![0usize; circuit.num_qubits];
    for inst in &circuit.instructions {
        match inst.kind {
            InstructionKind::Gate => {
                counts.total_gates += 1;
                if inst.name == "cx" {
                    counts.cnot_count += 1;
                }
            }
            InstructionKind::Measure => counts.measure_count += 1,
            InstructionKind::Reset => counts.reset_count += 1,
            InstructionKind::Barrier => {
                counts.barrier_count += 1;
                continue;
            }
        }
        let level = 1 + inst
            .qubits
            .iter()
            .map(|q| wire_depth.get(q.0).copied().unwrap_or(0))
            .max()
            .unwrap_or(0);
        for q in &inst.qubits {
            if let Some(d) = wire_depth.get_mut(q.0) {
                *d = level;
            }
        }
        counts.depth = counts.depth.max(level);
    }
    counts
}

pub fn validate(circuit: &Circuit) -> Vec<String> {
    let mut violations = Vec::new();
    if circuit.num_qubits == 0 {
        violations.push("circuit must have at least one qubit".to_string());
    }
    let mut seen_decls = HashSet::new();
    for decl in &circuit.opaque_decls {
        if !seen_decls.insert(decl.name.as_str()) {
            violations.push(format!("opaque gate '{}' declared twice", decl.name));
        }
        if decl.num_qubits == 0 {
            violations.push(format!("opaque gate '{}' has no qubit arguments", decl.name));
        }
    }

    for (idx, inst) in circuit.instructions.iter().enumerate() {
        let mut seen = HashSet::new();
        for q in &inst.qubits {
            if q.0 >= circuit.num_qubits {
                violations.push(format!(
                    "instruction {idx}: qubit {} out of range (circuit has {} qubits)",
                    q.0, circuit.num_qubits
                ));
            }
            if !seen.insert(q.0) {
                violations.push(format!("instruction {idx}: duplicate qubit operand {}", q.0));
            }
        }
        for c in &inst.clbits {
            if c.0 >= circuit.num_clbits {
                violations.push(format!(
                    "instruction {idx}: clbit {} out of range (circuit has {} clbits)",
                    c.0, circuit.num_clbits
                ));
            }
        }

        match inst.kind {
            InstructionKind::Measure => {
                if inst.qubits.len() != 1 || inst.clbits.len() != 1 {
                    violations.push(format!(
                        "instruction {idx}: measure needs exactly one qubit and one clbit, got {} and {}",
                        inst.qubits.len(),
                        inst.clbits.len()
                    ));
                }
            }
            InstructionKind::Reset => {
                if inst.qubits.len() != 1 || !inst.clbits.is_empty() {
                    violations.push(format!(
                        "instruction {idx}: reset needs exactly one qubit and no clbits"
                    ));
                }
            }
            InstructionKind::Barrier => {
                if inst.qubits.is_empty() || !inst.clbits.is_empty() || !inst.params.is_empty() {
                    violations.push(format!(
                        "instruction {idx}: barrier needs at least one qubit, no clbits and no params"
                    ));
                }
            }
            InstructionKind::Gate => {
                if !inst.clbits.is_empty() {
                    violations.push(format!("instruction {idx}: gate '{}' has clbit operands", inst.name));
                }
                let arity = standard_gate(&inst.name)
                    .or_else(|| circuit.opaque_decl(&inst.name).map(|d| (d.num_qubits, d.num_params)));
                match arity {
                    None => violations.push(format!("instruction {idx}: unknown gate '{}'", inst.name)),
                    Some((nq, np)) => {
                        if inst.qubits.len() != nq || inst.params.len() != np {
                            violations.push(format!(
                                "instruction {idx}: gate '{}' expects {nq} qubits and {np} params, got {} and {}",
                                inst.name,
                                inst.qubits.len(),
                                inst.params.len()
                            ));
                        }
                    }
                }
                if inst.params.iter().any(|p| !p.is_finite()) {
                    violations.push(format!("instruction {idx}: non-finite parameter"));
                }
            }
        }
        if inst.kind != InstructionKind::Gate && !inst.name.is_empty() {
            violations.push(format!("instruction {idx}: non-gate instruction carries a name"));
        }
    }
    violations
}
