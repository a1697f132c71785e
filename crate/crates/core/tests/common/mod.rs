//! Reference implementations used only by tests. Each one is written from
//! the definitions, as directly as possible, and shares no code with the
//! library beyond the circuit data types.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{Complex, DMatrix, DVector};
use proptest::prelude::*;
use qreuse_core::benchgen::gen_random;
use qreuse_core::{Circuit, InstructionKind, ResizePlan};

/// Non-barrier instruction indices.
pub fn ops(c: &Circuit) -> Vec<usize> {
    (0..c.instructions.len())
        .filter(|&i| !c.instructions[i].is_barrier())
        .collect()
}

/// D-list member sets by transitive closure over "earlier instruction
/// sharing a qubit", starting from each qubit's last instruction.
pub fn brute_dlist_sets(c: &Circuit) -> Vec<BTreeSet<usize>> {
    let ops = ops(c);
    let shares = |a: usize, b: usize| {
        let qa = &c.instructions[a].qubits;
        c.instructions[b].qubits.iter().any(|q| qa.contains(q))
    };
    (0..c.num_qubits)
        .map(|q| {
            let mut set = BTreeSet::from([q]);
            let Some(&last) = ops
                .iter()
                .rev()
                .find(|&&i| c.instructions[i].qubits.iter().any(|x| x.0 == q))
            else {
                return set;
            };
            let mut ancestors = BTreeSet::from([last]);
            let mut changed = true;
            while changed {
                changed = false;
                for &i in &ops {
                    if i < last && !ancestors.contains(&i) && ancestors.iter().any(|&a| i < a && shares(i, a)) {
                        ancestors.insert(i);
                        changed = true;
                    }
                }
            }
            for a in ancestors {
                set.extend(c.instructions[a].qubits.iter().map(|x| x.0));
            }
            set
        })
        .collect()
}

/// Peak live-qubit count of a given execution order.
fn order_peak(c: &Circuit, order: &[usize]) -> usize {
    let mut remaining = vec![0usize; c.num_qubits];
    for &i in order {
        for q in &c.instructions[i].qubits {
            remaining[q.0] += 1;
        }
    }
    let mut started = vec![false; c.num_qubits];
    let mut peak = 0;
    for &i in order {
        for q in &c.instructions[i].qubits {
            started[q.0] = true;
        }
        let live = (0..c.num_qubits).filter(|&q| started[q] && remaining[q] > 0).count();
        peak = peak.max(live);
        for q in &c.instructions[i].qubits {
            remaining[q.0] -= 1;
        }
    }
    peak
}

/// Minimum width over every topological order, by plain enumeration.
pub fn brute_min_width(c: &Circuit) -> usize {
    let ops = ops(c);
    assert!(ops.len() <= 9, "enumeration is factorial");
    // i must follow j when j comes first and they share a qubit
    let must_follow = |i: usize, j: usize| {
        j < i
            && c.instructions[j]
                .qubits
                .iter()
                .any(|q| c.instructions[i].qubits.contains(q))
    };
    fn rec(
        c: &Circuit,
        ops: &[usize],
        order: &mut Vec<usize>,
        used: &mut Vec<bool>,
        best: &mut usize,
        must_follow: &dyn Fn(usize, usize) -> bool,
    ) {
        if order.len() == ops.len() {
            *best = (*best).min(order_peak(c, order));
            return;
        }
        for k in 0..ops.len() {
            if used[k] {
                continue;
            }
            let ready = (0..ops.len()).all(|j| used[j] || !must_follow(ops[k], ops[j]));
            if ready {
                used[k] = true;
                order.push(ops[k]);
                rec(c, ops, order, used, best, must_follow);
                order.pop();
                used[k] = false;
            }
        }
    }
    let mut best = usize::MAX;
    rec(
        c,
        &ops,
        &mut Vec::new(),
        &mut vec![false; ops.len()],
        &mut best,
        &must_follow,
    );
    best.max(1)
}

type C = Complex<f64>;

fn gate_matrix(name: &str, params: &[f64]) -> DMatrix<C> {
    let z = C::new(0.0, 0.0);
    let o = C::new(1.0, 0.0);
    let s = C::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    match name {
        "h" => DMatrix::from_row_slice(2, 2, &[s, s, s, -s]),
        "x" => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        "z" => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
        "rz" => {
            let t = params[0] / 2.0;
            DMatrix::from_row_slice(2, 2, &[C::from_polar(1.0, -t), z, z, C::from_polar(1.0, t)])
        }
        // operand order (control, target); sub-index bit k is operand k
        "cx" => DMatrix::from_row_slice(4, 4, &[o, z, z, z, z, z, z, o, z, z, o, z, z, o, z, z]),
        other => panic!("reference simulator lacks gate {other}"),
    }
}

/// Full-space operator of a gate acting on the listed qubits.
fn embed(n: usize, u: &DMatrix<C>, qubits: &[usize]) -> DMatrix<C> {
    let dim = 1usize << n;
    let sub = |i: usize| {
        qubits
            .iter()
            .enumerate()
            .fold(0, |acc, (k, &q)| acc | (((i >> q) & 1) << k))
    };
    let mask: usize = qubits.iter().map(|&q| 1 << q).sum();
    DMatrix::from_fn(dim, dim, |r, col| {
        if r & !mask == col & !mask {
            u[(sub(r), sub(col))]
        } else {
            C::new(0.0, 0.0)
        }
    })
}

/// Outcome distribution of a circuit whose measurements are all terminal,
/// computed from the final state vector (deferred measurement).
pub fn terminal_distribution(c: &Circuit) -> BTreeMap<String, f64> {
    let n = c.num_qubits;
    let mut psi = DVector::from_element(1 << n, C::new(0.0, 0.0));
    psi[0] = C::new(1.0, 0.0);
    let mut measured = Vec::new();
    for inst in &c.instructions {
        let qs: Vec<usize> = inst.qubits.iter().map(|q| q.0).collect();
        match inst.kind {
            InstructionKind::Gate => {
                assert!(measured.is_empty(), "gate after measurement");
                psi = embed(n, &gate_matrix(&inst.name, &inst.params), &qs) * psi;
            }
            InstructionKind::Measure => measured.push((qs[0], inst.clbits[0].0)),
            InstructionKind::Barrier => {}
            InstructionKind::Reset => panic!("reset in reference circuit"),
        }
    }
    let mut dist = BTreeMap::new();
    for (basis, amp) in psi.iter().enumerate() {
        let p = amp.norm_sqr();
        if p < 1e-14 {
            continue;
        }
        let mut bits = vec!['0'; c.num_clbits];
        for &(q, cl) in &measured {
            if (basis >> q) & 1 == 1 {
                bits[c.num_clbits - 1 - cl] = '1';
            }
        }
        *dist.entry(bits.into_iter().collect()).or_insert(0.0) += p;
    }
    dist
}

pub fn tvd(a: &BTreeMap<String, f64>, b: &BTreeMap<String, f64>) -> f64 {
    let keys: BTreeSet<&String> = a.keys().chain(b.keys()).collect();
    0.5 * keys
        .into_iter()
        .map(|k| (a.get(k).copied().unwrap_or(0.0) - b.get(k).copied().unwrap_or(0.0)).abs())
        .sum::<f64>()
}

/// Checks that the resized circuit is the original's instructions moved
/// onto slots, plus inserted resets, with every qubit's order intact and
/// no two tenants of a slot overlapping. Returns a description of the
/// first violation.
pub fn check_preservation(original: &Circuit, plan: &ResizePlan) -> Result<(), String> {
    let resized = &plan.resized;
    if plan.origin.len() != resized.instructions.len() {
        return Err("origin length differs from instruction count".into());
    }
    let mut slot = vec![usize::MAX; original.num_qubits];
    for t in &plan.tenancies {
        if slot[t.logical.0] != usize::MAX {
            return Err(format!("qubit {} has two tenancies", t.logical.0));
        }
        slot[t.logical.0] = t.slot.0;
    }
    if let Some(q) = slot.iter().position(|&s| s == usize::MAX) {
        return Err(format!("qubit {q} has no tenancy"));
    }

    let mut seen = vec![false; original.instructions.len()];
    let mut last_on_qubit = vec![None::<usize>; original.num_qubits];
    // slot -> logical qubit currently holding it
    let mut holder: Vec<Option<usize>> = vec![None; plan.width];
    let mut finished = vec![false; original.num_qubits];
    let mut remaining = vec![0usize; original.num_qubits];
    for &i in &ops(original) {
        for q in &original.instructions[i].qubits {
            remaining[q.0] += 1;
        }
    }
    let mut inserted = 0;
    for (pos, (inst, origin)) in resized.instructions.iter().zip(&plan.origin).enumerate() {
        match origin {
            None => {
                if inst.kind != InstructionKind::Reset || inst.qubits.len() != 1 {
                    return Err(format!("inserted instruction {pos} is not a single reset"));
                }
                inserted += 1;
            }
            Some(j) => {
                let orig = &original.instructions[*j];
                if seen[*j] {
                    return Err(format!("instruction {j} emitted twice"));
                }
                seen[*j] = true;
                let expect = orig.remapped(|q| qreuse_core::QubitId(slot[q.0]));
                if &expect != inst {
                    return Err(format!("instruction {j} changed: {orig:?} became {inst:?}"));
                }
                if orig.is_barrier() {
                    // kept only by the unresizable passthrough
                    continue;
                }
                for q in &orig.qubits {
                    let q = q.0;
                    if finished[q] {
                        return Err(format!("qubit {q} used after finishing"));
                    }
                    if let Some(prev) = last_on_qubit[q] {
                        if prev > *j {
                            return Err(format!("qubit {q}: instruction {j} moved before {prev}"));
                        }
                    }
                    last_on_qubit[q] = Some(*j);
                    match holder[slot[q]] {
                        Some(h) if h != q => {
                            return Err(format!("slot {} used by qubit {q} while qubit {h} holds it", slot[q]))
                        }
                        _ => holder[slot[q]] = Some(q),
                    }
                    remaining[q] -= 1;
                    if remaining[q] == 0 {
                        finished[q] = true;
                        holder[slot[q]] = None;
                    }
                }
            }
        }
    }
    if let Some(j) = ops(original).into_iter().find(|&j| !seen[j]) {
        return Err(format!("instruction {j} missing"));
    }
    if inserted != plan.resets_added {
        return Err(format!(
            "{inserted} inserted resets but resets_added = {}",
            plan.resets_added
        ));
    }
    Ok(())
}

/// Small random circuits in the generator's gate set.
pub fn small_random() -> impl Strategy<Value = Circuit> {
    (1usize..=5, 0usize..=14, any::<u64>(), 0.0f64..=1.0)
        .prop_map(|(n, m, seed, f)| gen_random(n, m, seed, f).expect("valid generator arguments"))
}

/// Random circuits with mid-circuit measurements, resets and barriers.
pub fn mixed_circuit() -> impl Strategy<Value = Circuit> {
    (
        1usize..=6,
        proptest::collection::vec((0u8..7, 0usize..6, 0usize..6, -3.0f64..3.0), 0..25),
    )
        .prop_map(|(n, steps)| {
            let mut c = Circuit::new(n, n);
            for (kind, a, b, theta) in steps {
                let (a, b) = (a % n, b % n);
                match kind {
                    0 => c.gate("h", &[], &[a]),
                    1 => c.gate("rz", &[theta], &[a]),
                    2 | 3 if a != b => c.gate("cx", &[], &[a, b]),
                    4 => c.measure(a, b),
                    5 => c.reset(a),
                    6 => c.barrier(
                        &[a, b]
                            .into_iter()
                            .collect::<BTreeSet<_>>()
                            .into_iter()
                            .collect::<Vec<_>>(),
                    ),
                    _ => c.gate("x", &[], &[a]),
                };
            }
            c
        })
}
