//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use mdslab::codes::{extended_rs, extension_columns, hyperoval_code, is_mds_codewords, is_mds_minors, rs_code};
use mdslab::searchb::{
    brute_force_stmt4, exhaustive_stmt2, search_condition_b, stmt4_witness_reverifies, SearchOptions, Verdict,
};
use mdslab::suite::{
    condition_a_correspondence, dual_soundness, normalization_invariance, oracle_agreement, root_lemma, round_trip,
    PropertyOutcome,
};
use mdslab::{FieldCtx, Gf};
use serde_json::Value;

type Check = Result<String, String>;
type Criterion = (&'static str, &'static str, u64, fn() -> Check);

fn f(q: u32) -> FieldCtx {
    FieldCtx::of_order(q).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rs_claim() -> Check {
    let mut codes = 0;
    for q in [2u32, 3, 4, 5, 7, 8, 9, 11, 13] {
        let field = f(q);
        for k in 2..=q as usize {
            for (name, code) in [("rs", rs_code(&field, k)), ("extended", extended_rs(&field, k))] {
                let code = code.map_err(|e| e.to_string())?;
                let (a, b) = (is_mds_minors(&code).mds, is_mds_codewords(&code).mds);
                ensure(a && b, || format!("{name} q={q} k={k}: minors {a}, codewords {b}"))?;
                codes += 1;
            }
        }
    }
    Ok(format!("{codes} codes MDS under both verifiers"))
}

fn hyperovals() -> Check {
    for q in [4u32, 8, 16] {
        let code = hyperoval_code(&f(q)).map_err(|e| e.to_string())?;
        ensure(code.n() == q as usize + 2, || format!("q={q}: width {}", code.n()))?;
        let (a, b) = (is_mds_minors(&code).mds, is_mds_codewords(&code).mds);
        ensure(a && b, || format!("q={q}: minors {a}, codewords {b}"))?;
    }
    Ok("width q+2 MDS for q = 4, 8, 16".into())
}

fn stmt2_exhaustive() -> Check {
    let mut total = 0;
    for (q, k) in [(2u32, 2usize), (3, 2), (3, 3)] {
        let r = exhaustive_stmt2(&f(q), k).map_err(|e| e.to_string())?;
        ensure(r.counterexample.is_none(), || format!("q={q} k={k}: counterexample found"))?;
        let expected = (q as u64).pow((k * (q as usize + 2)) as u32);
        ensure(r.matrices_checked == expected, || {
            format!("q={q} k={k}: {} of {expected} matrices", r.matrices_checked)
        })?;
        total += r.matrices_checked;
    }
    Ok(format!("no counterexample among {total} matrices"))
}

fn stmt4_brute() -> Check {
    for (q, k) in [(2u32, 2usize), (3, 2)] {
        let r = brute_force_stmt4(&f(q), k).map_err(|e| e.to_string())?;
        ensure(r.witness.is_none(), || format!("q={q} k={k}: unexpected witness"))?;
    }
    let r = brute_force_stmt4(&f(4), 3).map_err(|e| e.to_string())?;
    let (y, z) = r.witness.ok_or("q=4 k=3: no witness")?;
    let again = stmt4_witness_reverifies(&y, &z).map_err(|e| e.to_string())?;
    ensure(r.reverified && again, || "q=4 k=3: witness does not re-verify".into())?;
    Ok("none for (2,2), (3,2); re-verified witness for (4,3)".into())
}

fn condition_b_exhaustive() -> Check {
    let mut nodes = 0;
    for (q, k) in [(5u32, 3usize), (5, 4), (7, 4), (7, 5), (7, 6)] {
        let r = search_condition_b(&f(q), k, &SearchOptions::exhaustive()).map_err(|e| e.to_string())?;
        ensure(r.verdict == Verdict::NoWitness, || format!("q={q} k={k}: {:?}", r.verdict))?;
        let all_s: Vec<usize> = (k + 1..=q as usize).collect();
        ensure(r.s_range == all_s, || format!("q={q} k={k}: s range {:?}", r.s_range))?;
        ensure(r.slices.iter().all(|s| s.complete), || format!("q={q} k={k}: incomplete slice"))?;
        nodes += r.nodes_explored;
    }
    Ok(format!("NoWitness in all five cells, {nodes} nodes"))
}

fn condition_b_randomized() -> Check {
    let r = search_condition_b(&f(101), 5, &SearchOptions::randomized(100_000, 42)).map_err(|e| e.to_string())?;
    ensure(r.verdict == Verdict::NotFalsified, || format!("{:?}", r.verdict))?;
    ensure(r.candidates_tested == 100_000, || format!("{} samples", r.candidates_tested))?;
    Ok("q=101 k=5: not falsified after 100000 samples".into())
}

fn rs_extensions() -> Check {
    let mut cells = 0;
    for q in [5u32, 7, 9, 11] {
        let field = f(q);
        for k in 3..=q as usize - 2 {
            let cols = extension_columns(&rs_code(&field, k).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            let mut e = vec![Gf::ZERO; k];
            e[k - 1] = Gf::ONE;
            ensure(cols == vec![e], || format!("q={q} k={k}: {} extension columns", cols.len()))?;
            cells += 1;
        }
    }
    Ok(format!("only e_k extends RS in {cells} cells"))
}

fn expect_clean(outcomes: &[PropertyOutcome]) -> Result<u64, String> {
    let mut trials = 0;
    for o in outcomes {
        ensure(o.ok(), || {
            format!(
                "{} q={} k={}: {} failures, first: {}",
                o.property,
                o.q,
                o.k,
                o.failed,
                o.first_failure.as_deref().unwrap_or("-")
            )
        })?;
        trials += o.trials;
    }
    Ok(trials)
}

fn property_suites() -> Check {
    const N: u64 = 1000;
    const SEED: u64 = 2024;
    let mut outs = Vec::new();
    for q in [3u32, 5, 7] {
        for k in [2, 3] {
            outs.push(normalization_invariance(&f(q), k, N, SEED));
        }
    }
    for q in [3u32, 5] {
        for k in [2, 3] {
            outs.push(condition_a_correspondence(&f(q), k, N, SEED));
        }
    }
    for q in [3u32, 4, 5] {
        for k in [2, 3] {
            let o = dual_soundness(&f(q), k, N, SEED);
            if q == 4 && k == 3 {
                ensure(o.true_cases > 0, || "hyperoval true case missing".into())?;
            }
            outs.push(o);
        }
    }
    for q in [3u32, 4, 5, 7] {
        for k in [2, 3] {
            outs.push(round_trip(&f(q), k, N, SEED));
        }
    }
    for q in [2u32, 3, 4, 5, 7, 8, 9] {
        outs.push(root_lemma(&f(q)));
    }
    let trials = expect_clean(&outs)?;
    Ok(format!("{} suites, {trials} checks, zero failures", outs.len()))
}

fn oracle_cells() -> Check {
    let mut outs = Vec::new();
    for q in [2u32, 3, 4, 5, 7] {
        let field = f(q);
        for k in [2usize, 3].into_iter().filter(|&k| k <= q as usize) {
            for n in k..=q as usize + 2 {
                outs.push(oracle_agreement(&field, k, n, 500, 77));
            }
        }
    }
    let trials = expect_clean(&outs)?;
    Ok(format!("{} cells, {trials} matrices (k = 3 skipped for q = 2)", outs.len()))
}

fn run_bin(args: &[&str]) -> Result<Value, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_mdslab"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    let mut v: Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    v.as_object_mut().ok_or("report is not an object")?.remove("elapsed_ms");
    Ok(v)
}

fn determinism() -> Check {
    let runs: [&[&str]; 3] = [
        &["equiv-suite", "--q", "5", "--k", "3", "--trials", "300", "--seed", "11"],
        &["search-b", "--q", "5", "--k", "4", "--mode", "exhaustive", "--deterministic"],
        &["--threads", "2", "search-b", "--q", "4", "--k", "3", "--mode", "exhaustive", "--deterministic"],
    ];
    for args in runs {
        let a = serde_json::to_string(&run_bin(args)?).unwrap();
        let b = serde_json::to_string(&run_bin(args)?).unwrap();
        ensure(a == b, || format!("`{}` differs between runs", args.join(" ")))?;
    }
    Ok("identical JSON across repeated runs".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("1", "RS and extended RS are MDS", 60, rs_claim),
        ("2", "hyperoval width q+2", 5, hyperovals),
        ("3", "exhaustive statement (2)", 600, stmt2_exhaustive),
        ("4", "statement (4) brute force", 600, stmt4_brute),
        ("5a", "condition B exhaustive", 1800, condition_b_exhaustive),
        ("5b", "condition B randomized q=101", 600, condition_b_randomized),
        ("6", "RS extension columns", 300, rs_extensions),
        ("7", "equivalence property suites", 600, property_suites),
        ("8", "verifier agreement", 600, oracle_cells),
        ("9", "deterministic reports", 600, determinism),
    ];
    let mut failed = 0;
    for (id, name, limit, check) in criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        let result = match result {
            Ok(msg) if took > Duration::from_secs(limit) => Err(format!("{msg}, but over the {limit} s limit")),
            r => r,
        };
        let (tag, msg) = match result {
            Ok(m) => ("PASS", m),
            Err(m) => {
                failed += 1;
                ("FAIL", m)
            }
        };
        println!("{tag} [{id}] {name}: {msg} ({:.1} s, limit {limit} s)", took.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
