//! Exact dense statevector simulation with branch enumeration.
//!
//! Every `measure` and `reset` splits the current branch in two, weighted by
//! the Born probabilities. Branches below [`PRUNE_THRESHOLD`] are dropped.
//! The final distribution sums branch weights per classical-bit string.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::VerifyError;
use crate::circuit::{validate, Circuit, Instruction, InstructionKind};

pub const MAX_QUBITS: usize = 14;
pub const MAX_BRANCHES: u64 = 1 << 20;
pub const PRUNE_THRESHOLD: f64 = 1e-12;

type Matrix2 = [[Complex64; 2]; 2];

/// Exact probabilities over classical-bit strings.
///
/// Keys list clbits from highest index to lowest, so the rightmost
/// character is clbit 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    pub num_clbits: usize,
    pub probs: BTreeMap<String, f64>,
}

impl OutcomeDistribution {
    pub fn get(&self, key: &str) -> f64 {
        self.probs.get(key).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.probs.values().sum()
    }
}

/// Formats classical bits as a distribution key.
pub fn clbit_key(bits: &[bool]) -> String {
    bits.iter().rev().map(|&b| if b { '1' } else { '0' }).collect()
}

pub fn simulate(circuit: &Circuit) -> Result<OutcomeDistribution, VerifyError> {
    simulate_with_stats(circuit).map(|(d, _)| d)
}

/// Simulates and also returns the number of completed branches.
pub fn simulate_with_stats(circuit: &Circuit) -> Result<(OutcomeDistribution, u64), VerifyError> {
    if let Some(v) = validate(circuit).into_iter().next() {
        return Err(VerifyError::InvalidCircuit(v));
    }
    if circuit.num_qubits > MAX_QUBITS {
        return Err(VerifyError::TooManyQubits {
            qubits: circuit.num_qubits,
            limit: MAX_QUBITS,
        });
    }
    // resolve every gate up front so unsupported gates fail before any work
    let ops: Vec<Op> = circuit
        .instructions
        .iter()
        .filter(|i| !i.is_barrier())
        .map(compile)
        .collect::<Result<_, _>>()?;

    let mut initial = vec![Complex64::new(0.0, 0.0); 1 << circuit.num_qubits];
    initial[0] = Complex64::new(1.0, 0.0);
    let mut stack = vec![Branch {
        state: initial,
        prob: 1.0,
        clbits: vec![false; circuit.num_clbits],
        pc: 0,
    }];
    let mut created: u64 = 1;
    let mut leaves: u64 = 0;
    let mut probs: BTreeMap<String, f64> = BTreeMap::new();

    while let Some(mut branch) = stack.pop() {
        loop {
            let Some(op) = ops.get(branch.pc) else {
                *probs.entry(clbit_key(&branch.clbits)).or_insert(0.0) += branch.prob;
                leaves += 1;
                break;
            };
            branch.pc += 1;
            let (qubit, clbit) = match op {
                Op::Measure { qubit, clbit } => (*qubit, Some(*clbit)),
                Op::Reset { qubit } => (*qubit, None),
                other => {
                    other.apply(&mut branch.state);
                    continue;
                }
            };
            let p1 = probability_one(&branch.state, qubit);
            let p0 = (1.0 - p1).max(0.0);
            let keep0 = branch.prob * p0 >= PRUNE_THRESHOLD;
            let keep1 = branch.prob * p1 >= PRUNE_THRESHOLD;
            if keep1 {
                let mut child = if keep0 {
                    created += 1;
                    if created > MAX_BRANCHES {
                        return Err(VerifyError::TooManyBranches { limit: MAX_BRANCHES });
                    }
                    branch.clone()
                } else {
                    std::mem::take(&mut branch)
                };
                collapse(&mut child.state, qubit, true, p1, clbit.is_none());
                child.prob *= p1;
                if let Some(c) = clbit {
                    child.clbits[c] = true;
                }
                if !keep0 {
                    branch = child;
                    continue;
                }
                stack.push(child);
            }
            if keep0 {
                collapse(&mut branch.state, qubit, false, p0, false);
                branch.prob *= p0;
                if let Some(c) = clbit {
                    branch.clbits[c] = false;
                }
                continue;
            }
            // both outcomes pruned: drop the branch
            break;
        }
    }
    probs.retain(|_, p| *p >= PRUNE_THRESHOLD);
    Ok((
        OutcomeDistribution {
            num_clbits: circuit.num_clbits,
            probs,
        },
        leaves,
    ))
}

#[derive(Clone, Default)]
struct Branch {
    state: Vec<Complex64>,
    prob: f64,
    clbits: Vec<bool>,
    pc: usize,
}

fn probability_one(state: &[Complex64], qubit: usize) -> f64 {
    let bit = 1usize << qubit;
    state
        .iter()
        .enumerate()
        .filter(|(i, _)| i & bit != 0)
        .map(|(_, a)| a.norm_sqr())
        .sum()
}

/// Projects `qubit` onto `outcome` and renormalizes. With `to_zero`, a
/// projected `|1>` is moved to `|0>` (the reset case).
fn collapse(state: &mut [Complex64], qubit: usize, outcome: bool, prob: f64, to_zero: bool) {
    let bit = 1usize << qubit;
    let scale = 1.0 / prob.sqrt();
    let zero = Complex64::new(0.0, 0.0);
    for i in 0..state.len() {
        if i & bit != 0 {
            continue;
        }
        let j = i | bit;
        if outcome {
            let a = state[j] * scale;
            state[i] = zero;
            state[j] = zero;
            if to_zero {
                state[i] = a;
            } else {
                state[j] = a;
            }
        } else {
            state[i] *= scale;
            state[j] = zero;
        }
    }
}

enum Op {
    Unitary {
        controls: Vec<usize>,
        target: usize,
        matrix: Matrix2,
    },
    Swap {
        controls: Vec<usize>,
        a: usize,
        b: usize,
    },
    Rzz {
        a: usize,
        b: usize,
        theta: f64,
    },
    Measure {
        qubit: usize,
        clbit: usize,
    },
    Reset {
        qubit: usize,
    },
}

impl Op {
    fn apply(&self, state: &mut [Complex64]) {
        match self {
            Op::Unitary {
                controls,
                target,
                matrix,
            } => apply_unitary(state, controls, *target, matrix),
            Op::Swap { controls, a, b } => apply_swap(state, controls, *a, *b),
            Op::Rzz { a, b, theta } => {
                let same = Complex64::from_polar(1.0, -theta / 2.0);
                let diff = Complex64::from_polar(1.0, theta / 2.0);
                for (i, amp) in state.iter_mut().enumerate() {
                    let parity = ((i >> a) ^ (i >> b)) & 1;
                    *amp *= if parity == 0 { same } else { diff };
                }
            }
            Op::Measure { .. } | Op::Reset { .. } => unreachable!("handled by the branch loop"),
        }
    }
}

fn mask(qubits: &[usize]) -> usize {
    qubits.iter().fold(0, |m, q| m | (1 << q))
}

fn apply_unitary(state: &mut [Complex64], controls: &[usize], target: usize, m: &Matrix2) {
    let cmask = mask(controls);
    let tbit = 1usize << target;
    for i in 0..state.len() {
        if i & tbit != 0 || i & cmask != cmask {
            continue;
        }
        let j = i | tbit;
        let (a, b) = (state[i], state[j]);
        state[i] = m[0][0] * a + m[0][1] * b;
        state[j] = m[1][0] * a + m[1][1] * b;
    }
}

fn apply_swap(state: &mut [Complex64], controls: &[usize], a: usize, b: usize) {
    let cmask = mask(controls);
    let (abit, bbit) = (1usize << a, 1usize << b);
    for i in 0..state.len() {
        if i & abit != 0 && i & bbit == 0 && i & cmask == cmask {
            state.swap(i, i ^ abit ^ bbit);
        }
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn diag(a: Complex64, b: Complex64) -> Matrix2 {
    [[a, c(0.0, 0.0)], [c(0.0, 0.0), b]]
}

fn u3(theta: f64, phi: f64, lambda: f64) -> Matrix2 {
    let (cos, sin) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    [
        [c(cos, 0.0), -Complex64::from_polar(sin, lambda)],
        [
            Complex64::from_polar(sin, phi),
            Complex64::from_polar(cos, phi + lambda),
        ],
    ]
}

fn rx(theta: f64) -> Matrix2 {
    let (cos, sin) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    [[c(cos, 0.0), c(0.0, -sin)], [c(0.0, -sin), c(cos, 0.0)]]
}

fn ry(theta: f64) -> Matrix2 {
    let (cos, sin) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    [[c(cos, 0.0), c(-sin, 0.0)], [c(sin, 0.0), c(cos, 0.0)]]
}

fn rz(theta: f64) -> Matrix2 {
    diag(
        Complex64::from_polar(1.0, -theta / 2.0),
        Complex64::from_polar(1.0, theta / 2.0),
    )
}

fn phase(lambda: f64) -> Matrix2 {
    diag(c(1.0, 0.0), Complex64::from_polar(1.0, lambda))
}

/// Matrix of a one-qubit standard gate, if `name` is one.
pub(crate) fn single_qubit_matrix(name: &str, p: &[f64]) -> Option<Matrix2> {
    let h = FRAC_1_SQRT_2;
    let m = match name {
        "id" | "u0" => diag(c(1.0, 0.0), c(1.0, 0.0)),
        "h" => [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]],
        "x" => [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
        "y" => [[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]],
        "z" => diag(c(1.0, 0.0), c(-1.0, 0.0)),
        "s" => phase(FRAC_PI_2),
        "sdg" => phase(-FRAC_PI_2),
        "t" => phase(FRAC_PI_4),
        "tdg" => phase(-FRAC_PI_4),
        "sx" => [[c(0.5, 0.5), c(0.5, -0.5)], [c(0.5, -0.5), c(0.5, 0.5)]],
        "sxdg" => [[c(0.5, -0.5), c(0.5, 0.5)], [c(0.5, 0.5), c(0.5, -0.5)]],
        "rx" => rx(p[0]),
        "ry" => ry(p[0]),
        "rz" => rz(p[0]),
        "u1" | "p" => phase(p[0]),
        "u2" => u3(FRAC_PI_2, p[0], p[1]),
        "u3" | "u" => u3(p[0], p[1], p[2]),
        _ => return None,
    };
    Some(m)
}

fn compile(inst: &Instruction) -> Result<Op, VerifyError> {
    let q: Vec<usize> = inst.qubits.iter().map(|q| q.0).collect();
    match inst.kind {
        InstructionKind::Measure => {
            return Ok(Op::Measure {
                qubit: q[0],
                clbit: inst.clbits[0].0,
            })
        }
        InstructionKind::Reset => return Ok(Op::Reset { qubit: q[0] }),
        InstructionKind::Barrier => unreachable!("barriers are filtered out"),
        InstructionKind::Gate => {}
    }
    let p = &inst.params;
    if let Some(matrix) = single_qubit_matrix(&inst.name, p) {
        return Ok(Op::Unitary {
            controls: vec![],
            target: q[0],
            matrix,
        });
    }
    let controlled = |name: &str, params: &[f64]| -> Op {
        Op::Unitary {
            controls: vec![q[0]],
            target: q[1],
            matrix: single_qubit_matrix(name, params).expect("known base gate"),
        }
    };
    let op = match inst.name.as_str() {
        "cx" => controlled("x", &[]),
        "cy" => controlled("y", &[]),
        "cz" => controlled("z", &[]),
        "ch" => controlled("h", &[]),
        "crx" => controlled("rx", p),
        "cry" => controlled("ry", p),
        "crz" => controlled("rz", p),
        "cu1" | "cp" => controlled("p", p),
        "cu3" => controlled("u3", p),
        "swap" => Op::Swap {
            controls: vec![],
            a: q[0],
            b: q[1],
        },
        "rzz" => Op::Rzz {
            a: q[0],
            b: q[1],
            theta: p[0],
        },
        "ccx" => Op::Unitary {
            controls: vec![q[0], q[1]],
            target: q[2],
            matrix: single_qubit_matrix("x", &[]).expect("x"),
        },
        "cswap" => Op::Swap {
            controls: vec![q[0]],
            a: q[1],
            b: q[2],
        },
        other => return Err(VerifyError::OpaqueGate(other.to_string())),
    };
    Ok(op)
}
