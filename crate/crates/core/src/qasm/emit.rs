use std::fmt::Write;

use super::EmitError;
use crate::circuit::{validate, Circuit, InstructionKind};

/// Renders a circuit as OpenQASM 2.0 over a single `q` and `c` register.
///
/// Angles are written with Rust's shortest round-trip float formatting, so
/// reparsing yields bit-identical parameters.
pub fn emit_qasm(circuit: &Circuit) -> Result<String, EmitError> {
    if let Some(violation) = validate(circuit).into_iter().next() {
        return Err(EmitError { violation });
    }
    let mut out = String::with_capacity(32 * circuit.instructions.len() + 64);
    out.push_str("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    let _ = writeln!(out, "qreg q[{}];", circuit.num_qubits);
    if circuit.num_clbits > 0 {
        let _ = writeln!(out, "creg c[{}];", circuit.num_clbits);
    }
    for decl in &circuit.opaque_decls {
        out.push_str("opaque ");
        out.push_str(&decl.name);
        if decl.num_params > 0 {
            let params: Vec<String> = (0..decl.num_params).map(|i| format!("p{i}")).collect();
            let _ = write!(out, "({})", params.join(","));
        }
        let args: Vec<String> = (0..decl.num_qubits).map(|i| format!("a{i}")).collect();
        let _ = writeln!(out, " {};", args.join(","));
    }
    for inst in &circuit.instructions {
        match inst.kind {
            InstructionKind::Measure => {
                let _ = writeln!(out, "measure q[{}] -> c[{}];", inst.qubits[0].0, inst.clbits[0].0);
            }
            InstructionKind::Reset => {
                let _ = writeln!(out, "reset q[{}];", inst.qubits[0].0);
            }
            InstructionKind::Barrier | InstructionKind::Gate => {
                let name = if inst.kind == InstructionKind::Barrier {
                    "barrier"
                } else {
                    inst.name.as_str()
                };
                out.push_str(name);
                if !inst.params.is_empty() {
                    let params: Vec<String> = inst.params.iter().map(|p| format!("{p:?}")).collect();
                    let _ = write!(out, "({})", params.join(","));
                }
                out.push(' ');
                for (i, q) in inst.qubits.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    let _ = write!(out, "q[{}]", q.0);
                }
                out.push_str(";\n");
            }
        }
    }
    Ok(out)
}
