use mdslab::codes::{extension_columns, rs_code};
use mdslab::equivalence::check_condition_b;
use mdslab::searchb::{
    brute_force_stmt4, exhaustive_stmt2, search_condition_b, SearchOptions, SearchReport, Strategy, Verdict,
};
use mdslab::{FieldCtx, Gf};

fn f(q: u32) -> FieldCtx {
    FieldCtx::of_order(q).unwrap()
}

fn in_pool<T: Send>(threads: usize, job: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(job)
}

fn strip(r: SearchReport) -> SearchReport {
    SearchReport { elapsed_ms: 0, ..r }
}

#[test]
fn stmt4_and_stmt2_agree_where_both_run() {
    for (q, k) in [(2u32, 2usize), (3, 2), (3, 3)] {
        let field = f(q);
        let s4 = brute_force_stmt4(&field, k).unwrap();
        let s2 = exhaustive_stmt2(&field, k).unwrap();
        assert_eq!(s4.witness.is_none(), s2.counterexample.is_none(), "q = {q}, k = {k}");
    }
}

#[test]
fn exhaustive_verdicts_do_not_depend_on_thread_count() {
    let field = f(5);
    let mut opts = SearchOptions::exhaustive();
    opts.strategy = Strategy::Direct;
    let one = in_pool(1, || search_condition_b(&field, 4, &opts).unwrap());
    let three = in_pool(3, || search_condition_b(&field, 4, &opts).unwrap());
    assert_eq!(one.verdict, Verdict::NoWitness);
    assert_eq!(strip(one), strip(three));
}

#[test]
fn even_q_witness_is_lexicographically_stable() {
    let field = f(4);
    let opts = SearchOptions::exhaustive();
    let one = in_pool(1, || search_condition_b(&field, 3, &opts).unwrap());
    let two = in_pool(2, || search_condition_b(&field, 3, &opts).unwrap());
    assert_eq!(one.verdict, Verdict::Witness);
    let w = one.witness.clone().unwrap();
    assert!(w.reverified);
    assert!(check_condition_b(&field, 3, w.s, &w.b).unwrap().holds());
    assert_eq!(strip(one), strip(two));
}

#[test]
fn rs_extends_only_by_last_unit_vector() {
    for (q, k) in [(5u32, 3usize), (7, 3), (7, 4)] {
        let field = f(q);
        let cols = extension_columns(&rs_code(&field, k).unwrap()).unwrap();
        let mut e = vec![Gf::ZERO; k];
        e[k - 1] = Gf::ONE;
        assert_eq!(cols, vec![e], "q = {q}, k = {k}");
    }
}
