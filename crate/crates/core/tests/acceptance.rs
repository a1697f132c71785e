//! Acceptance gate. Runs every criterion at its stated tolerance and
//! prints one line per criterion; exits non-zero if any criterion fails.

mod common;

use std::env;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use qreuse_core::bench::{bench_corpus, corpus_files, BenchOptions};
use qreuse_core::benchgen::{gen_bv, gen_cat, gen_entangled_block, gen_ghz, gen_random, gen_scaling, SecretString};
use qreuse_core::dag::{build_dag, dependency_table, sorted_llist};
use qreuse_core::verify::{check_equivalence, compute_pst, min_width_oracle, simulate, OutcomeDistribution};
use qreuse_core::{emit_qasm, parse_qasm, resize_circuit, Circuit, QubitId, SlotId};

type Outcome = Result<String, String>;
type Criterion = Box<dyn Fn() -> Result<Verdict, String>>;

enum Verdict {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn secret(s: &str) -> SecretString {
    s.parse().expect("valid secret")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// The shared structured families: BV, GHZ and cat up to 10 qubits.
fn structured_family() -> Vec<(String, Circuit)> {
    let mut out = Vec::new();
    for data in 1..=9usize {
        let all = "1".repeat(data);
        let low = format!("{}1", "0".repeat(data - 1));
        let alternating: String = (0..data).map(|i| if i % 2 == 0 { '1' } else { '0' }).collect();
        let none = "0".repeat(data);
        for s in [all, low, alternating, none] {
            let name = format!("bv[{s}]");
            if !out.iter().any(|(n, _)| n == &name) {
                out.push((name, gen_bv(&secret(&s))));
            }
        }
    }
    for n in 1..=10 {
        out.push((format!("ghz{n}"), gen_ghz(n).unwrap()));
        out.push((format!("cat{n}"), gen_cat(n).unwrap()));
    }
    out
}

/// 200 seeded random circuits with at most 5 qubits and 14 gates.
fn random_family() -> Vec<(String, Circuit)> {
    (0..200u64)
        .map(|seed| {
            let n = 1 + (seed % 5) as usize;
            let m = (seed * 7 % 15) as usize;
            let frac = [0.2, 0.5, 0.8][(seed % 3) as usize];
            (
                format!("random(n={n},m={m},seed={seed},f={frac})"),
                gen_random(n, m, seed, frac).unwrap(),
            )
        })
        .collect()
}

fn corpus_dir() -> PathBuf {
    env::var_os("QREUSE_CORPUS")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/corpus"))
}

fn criterion_1() -> Outcome {
    let bv: Vec<(String, Circuit)> = ["1111111111111", "0000000000001", "1010101010101", "1101101101101"]
        .iter()
        .map(|s| (format!("bv_n14[{s}]"), gen_bv(&secret(s))))
        .collect();
    let mut cases = bv;
    cases.push(("ghz_state_n23".into(), gen_ghz(23).unwrap()));
    cases.push(("cat_state_n22".into(), gen_cat(22).unwrap()));
    let mut slowest = Duration::ZERO;
    for (name, c) in &cases {
        let start = Instant::now();
        let plan = resize_circuit(c).map_err(|e| format!("{name}: {e}"))?;
        let took = start.elapsed();
        slowest = slowest.max(took);
        ensure(plan.width == 2, || format!("{name}: width {} != 2", plan.width))?;
        ensure(took < Duration::from_secs(1), || format!("{name}: took {took:?}"))?;
    }
    Ok(format!(
        "bv_n14 (4 secrets), ghz23, cat22 all width 2; slowest {slowest:?}"
    ))
}

fn criterion_2() -> Result<Verdict, String> {
    let dir = corpus_dir();
    let expected = [
        ("wstate_n27.qasm", 3usize),
        ("swap_test_n25.qasm", 3),
        ("rd53_139.qasm", 5),
    ];
    let present: Vec<_> = expected.iter().filter(|(f, _)| dir.join(f).is_file()).collect();
    if present.is_empty() {
        return Ok(Verdict::Skip(format!("no benchmark files in {}", dir.display())));
    }
    let rows = bench_corpus(&dir, &BenchOptions::default()).map_err(|e| e.to_string())?;
    let mut seen = Vec::new();
    for (file, want) in &present {
        let row = rows
            .iter()
            .find(|r| r.file == *file)
            .ok_or_else(|| format!("{file}: no row"))?;
        ensure(row.sequential_width == Some(*want), || {
            format!(
                "{file}: width {:?} != {want} (error {:?})",
                row.sequential_width, row.error
            )
        })?;
        seen.push(format!("{file}={want}"));
    }
    let missing = expected.len() - present.len();
    Ok(Verdict::Pass(format!(
        "{} ({missing} of 3 absent and skipped)",
        seen.join(", ")
    )))
}

fn criterion_3() -> Outcome {
    // Bernstein–Vazirani with CNOTs from q0 and q1 into the ancilla q5
    let c = gen_bv(&secret("00011"));
    let table = dependency_table(&build_dag(&c));
    let expected: [&[usize]; 6] = [&[0, 5], &[1, 5, 0], &[2], &[3], &[4], &[5, 1, 0]];
    for (q, want) in expected.iter().enumerate() {
        let got: Vec<usize> = table.lists[q].members.iter().map(|m| m.0).collect();
        ensure(got == *want, || format!("D-list of q{q} is {got:?}, expected {want:?}"))?;
    }
    let llist: Vec<usize> = sorted_llist(&table).iter().map(|l| l.owner.0).collect();
    ensure(llist == [2, 3, 4, 0, 1, 5], || format!("L-list order {llist:?}"))?;
    let plan = resize_circuit(&c).map_err(|e| e.to_string())?;
    let slot0: Vec<usize> = plan.tenants_of(SlotId(0)).iter().map(|q| q.0).collect();
    let slot1: Vec<usize> = plan.tenants_of(SlotId(1)).iter().map(|q| q.0).collect();
    ensure(slot0 == [2, 3, 4, 0, 1], || format!("slot 0 tenants {slot0:?}"))?;
    ensure(slot1 == [5], || format!("slot 1 tenants {slot1:?}"))?;
    ensure(plan.slot_of(QubitId(5)) == Some(SlotId(1)), || {
        "q5 not on slot 1".into()
    })?;
    Ok("D-lists, L-list order and tenancies Q0=[q2,q3,q4,q0,q1], Q1=[q5] match exactly".into())
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let circuits: Vec<_> = structured_family().into_iter().chain(random_family()).collect();
    for (name, c) in &circuits {
        let plan = resize_circuit(c).map_err(|e| format!("{name}: {e}"))?;
        let report = check_equivalence(c, &plan.resized, 1e-9).map_err(|e| format!("{name}: {e}"))?;
        worst = worst.max(report.tvd);
        ensure(report.tvd < 1e-9, || format!("{name}: tvd {}", report.tvd))?;
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(300), || format!("took {took:?}"))?;
    Ok(format!("{} circuits, max tvd {worst:.1e}, {took:.2?}", circuits.len()))
}

/// Budget large enough for every circuit of criterion 4.
const AUDIT_BUDGET: u64 = 50_000_000;

fn criterion_5() -> Outcome {
    for (name, c) in structured_family() {
        let plan = resize_circuit(&c).map_err(|e| format!("{name}: {e}"))?;
        let oracle = min_width_oracle(&c, AUDIT_BUDGET).map_err(|e| format!("{name}: {e}"))?;
        ensure(plan.width == oracle.min_width, || {
            format!("{name}: resize {} vs oracle {}", plan.width, oracle.min_width)
        })?;
    }
    let random = random_family();
    let mut equal = 0;
    let mut gaps = Vec::new();
    for (name, c) in &random {
        let plan = resize_circuit(c).map_err(|e| format!("{name}: {e}"))?;
        let oracle = min_width_oracle(c, AUDIT_BUDGET).map_err(|e| format!("{name}: {e}"))?;
        ensure(plan.width >= oracle.min_width, || {
            format!("{name}: resize {} below oracle {}", plan.width, oracle.min_width)
        })?;
        if plan.width == oracle.min_width {
            equal += 1;
        } else {
            gaps.push(format!(
                "{name}: resize {} > oracle {} witness {:?}",
                plan.width, oracle.min_width, oracle.witness_order
            ));
        }
    }
    for gap in &gaps {
        println!("    gap  {gap}");
    }
    Ok(format!(
        "structured families optimal; random equality rate {equal}/{} ({:.1}%), {} strict gaps logged",
        random.len(),
        100.0 * equal as f64 / random.len() as f64,
        gaps.len()
    ))
}

fn criterion_6() -> Outcome {
    for k in 2..=6 {
        let c = gen_entangled_block(k).unwrap();
        let plan = resize_circuit(&c).map_err(|e| e.to_string())?;
        ensure(!plan.resizable, || format!("k={k} reported resizable"))?;
        let original = emit_qasm(&c).map_err(|e| e.to_string())?;
        let reparsed = parse_qasm(&original).map_err(|e| e.to_string())?;
        let out =
            emit_qasm(&resize_circuit(&reparsed).map_err(|e| e.to_string())?.resized).map_err(|e| e.to_string())?;
        ensure(out == original, || format!("k={k}: output differs from input"))?;
    }
    Ok("k=2..6 not resizable, output byte-identical".into())
}

/// Hand-written circuits with mid-circuit measurement, resets, barriers
/// and idle qubits.
fn irregular_family() -> Vec<(String, Circuit)> {
    let mut a = Circuit::new(4, 4);
    a.gate("h", &[], &[0])
        .measure(0, 0)
        .reset(0)
        .gate("cx", &[], &[0, 1])
        .barrier(&[1, 2]);
    a.gate("rz", &[0.3], &[2]).measure(1, 1).measure(2, 2);
    let mut b = Circuit::new(5, 2);
    b.gate("x", &[], &[4])
        .gate("cx", &[], &[4, 3])
        .measure(3, 0)
        .gate("h", &[], &[1])
        .measure(1, 1);
    let mut c = Circuit::new(3, 3);
    c.gate("cx", &[], &[2, 0])
        .gate("cx", &[], &[1, 2])
        .gate("cx", &[], &[0, 1]);
    for q in 0..3 {
        c.measure(q, q);
    }
    vec![
        ("mid-measure".into(), a),
        ("idle-qubits".into(), b),
        ("cycle".into(), c),
    ]
}

fn criterion_7() -> Outcome {
    let mut all = structured_family();
    all.extend(random_family());
    all.extend(irregular_family());
    all.extend((2..=6).map(|k| (format!("ent{k}"), gen_entangled_block(k).unwrap())));
    for (name, c) in &all {
        let plan = resize_circuit(c).map_err(|e| format!("{name}: {e}"))?;
        common::check_preservation(c, &plan).map_err(|e| format!("{name}: {e}"))?;
    }
    Ok(format!(
        "{} circuits: instructions preserved, per-qubit order intact, only resets added",
        all.len()
    ))
}

fn peak_rss_bytes() -> Option<u64> {
    let status = fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb * 1024)
}

fn criterion_8() -> Outcome {
    let c = gen_scaling(1000, 1_000_000).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let plan = resize_circuit(&c).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    let peak = peak_rss_bytes();
    ensure(plan.resized.instructions.len() >= c.instructions.len(), || {
        "instructions lost".into()
    })?;
    ensure(took < Duration::from_secs(60), || format!("took {took:?}"))?;
    let limit = 4u64 << 30;
    match peak {
        Some(bytes) => ensure(bytes < limit, || format!("peak memory {} MiB", bytes >> 20))?,
        None => return Err("peak memory unavailable (no /proc/self/status)".into()),
    }
    Ok(format!(
        "{} instructions, width {}, {took:.2?}, peak RSS {} MiB",
        c.instructions.len(),
        plan.width,
        peak.unwrap_or(0) >> 20
    ))
}

fn criterion_9() -> Outcome {
    for s in ["1", "11011", "100000001", "0101010101"] {
        let dist = simulate(&gen_bv(&secret(s))).map_err(|e| e.to_string())?;
        let pst = compute_pst(&dist, &[s]).map_err(|e| e.to_string())?;
        ensure((pst - 1.0).abs() < 1e-12, || format!("bv[{s}] pst {pst}"))?;
    }
    let hand = |entries: &[(&str, f64)]| OutcomeDistribution {
        num_clbits: 2,
        probs: entries.iter().map(|(k, p)| (k.to_string(), *p)).collect(),
    };
    let checks: [(OutcomeDistribution, Vec<&str>, f64); 3] = [
        (hand(&[("00", 0.512), ("01", 0.2), ("11", 0.288)]), vec!["00"], 0.512),
        (
            hand(&[("00", 0.25), ("01", 0.25), ("10", 0.25), ("11", 0.25)]),
            vec!["00", "01", "10", "11"],
            1.0,
        ),
        (hand(&[("00", 0.1), ("01", 0.3), ("10", 0.6)]), vec!["01", "10"], 0.9),
    ];
    for (dist, correct, want) in &checks {
        let got = compute_pst(dist, correct).map_err(|e| e.to_string())?;
        ensure((got - want).abs() <= 1e-12, || format!("pst {got} != {want}"))?;
    }
    ensure(compute_pst::<&str>(&checks[0].0, &[]).is_err(), || {
        "empty set accepted".into()
    })?;
    Ok("BV secrets have PST 1.0; hand distributions exact to 1e-12".into())
}

fn criterion_10() -> Outcome {
    let mut corpus: Vec<(String, Circuit)> = structured_family();
    corpus.extend(random_family());
    corpus.extend(irregular_family());
    corpus.extend((2..=6).map(|k| (format!("ent{k}"), gen_entangled_block(k).unwrap())));
    corpus.push(("scaling".into(), gen_scaling(20, 400).unwrap()));
    let mut ingested = 0;
    let dir = corpus_dir();
    if dir.is_dir() {
        for path in corpus_files(&dir).map_err(|e| e.to_string())? {
            let text = fs::read_to_string(&path).map_err(|e| e.to_string())?;
            let c = parse_qasm(&text).map_err(|e| format!("{}: {e}", path.display()))?;
            corpus.push((path.display().to_string(), c));
            ingested += 1;
        }
    }
    for (name, c) in &corpus {
        let text = emit_qasm(c).map_err(|e| format!("{name}: {e}"))?;
        let back = parse_qasm(&text).map_err(|e| format!("{name}: {e}"))?;
        ensure(&back == c, || format!("{name}: parse(emit(c)) != c"))?;
        let again = emit_qasm(&back).map_err(|e| format!("{name}: {e}"))?;
        ensure(again == text, || format!("{name}: emit not a fixpoint"))?;
    }
    let err = parse_qasm("OPENQASM 2.0;\nqreg q[1];\ncreg c[1];\nif (c == 1) x q[0];\n")
        .err()
        .ok_or("conditional accepted")?;
    let d = &err.diagnostics[0];
    ensure((d.line, d.column) == (4, 1), || {
        format!("diagnostic at {}:{}", d.line, d.column)
    })?;
    Ok(format!(
        "{} circuits ({ingested} ingested) round-trip; conditional rejected at {}:{}",
        corpus.len(),
        d.line,
        d.column
    ))
}

fn main() -> ExitCode {
    let criteria: Vec<(&str, Criterion)> = vec![
        ("width reproduction", Box::new(|| criterion_1().map(Verdict::Pass))),
        ("external corpus widths", Box::new(criterion_2)),
        (
            "bv 00011 D-lists and tenancies",
            Box::new(|| criterion_3().map(Verdict::Pass)),
        ),
        ("equivalence suite", Box::new(|| criterion_4().map(Verdict::Pass))),
        ("minimality audit", Box::new(|| criterion_5().map(Verdict::Pass))),
        ("non-resizable detection", Box::new(|| criterion_6().map(Verdict::Pass))),
        ("gate preservation", Box::new(|| criterion_7().map(Verdict::Pass))),
        ("complexity and scale", Box::new(|| criterion_8().map(Verdict::Pass))),
        (
            "success-probability arithmetic",
            Box::new(|| criterion_9().map(Verdict::Pass)),
        ),
        (
            "round-trip and parser conformance",
            Box::new(|| criterion_10().map(Verdict::Pass)),
        ),
    ];
    let mut failed = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let verdict = run().unwrap_or_else(Verdict::Fail);
        match verdict {
            Verdict::Pass(detail) => println!("PASS criterion {:>2} {title}: {detail}", i + 1),
            Verdict::Skip(detail) => println!("SKIP criterion {:>2} {title}: {detail}", i + 1),
            Verdict::Fail(detail) => {
                failed += 1;
                println!("FAIL criterion {:>2} {title}: {detail}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
