//! Circuit resizing through qubit reuse.
//!
//! A circuit's logical qubits are packed onto fewer physical slots: once a
//! qubit has finished (measured or abandoned as garbage), its slot is reset
//! and handed to a qubit that has not started yet. The pipeline is
//!
//! 1. [`qasm::parse_qasm`] — OpenQASM 2.0 text to a flat [`Circuit`];
//! 2. [`dag::build_dag`] and [`dag::dependency_table`] — per-qubit
//!    dependency lists (D-lists);
//! 3. [`resize::resize_circuit`] — greedy slot assignment and rescheduling;
//! 4. [`verify`] — exact simulation, distribution equivalence and an
//!    exhaustive minimum-width oracle to audit the greedy result.
//!
//! [`benchgen`] builds the standard circuit families and [`bench`] runs
//! the pipeline over a directory of files.

pub mod bench;
pub mod benchgen;
pub mod circuit;
pub mod dag;
pub mod qasm;
pub mod resize;
pub mod verify;

pub use circuit::{count_gates, Circuit, ClbitId, GateCounts, Instruction, InstructionKind, QubitId};
pub use qasm::{emit_qasm, parse_qasm};
pub use resize::{plan_report, resize, resize_circuit, PlanReport, ResizePlan, SlotId, Tenancy};
