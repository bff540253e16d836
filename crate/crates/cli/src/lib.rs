//! Command-line driver for mdslab.
//!
//! [`run`] parses arguments, runs one subcommand inside a worker pool and
//! returns the rendered report together with the process exit code.

pub mod report;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mdslab::codes::{extended_rs, is_mds_codewords, is_mds_minors, rs_code, CodeMatrix};
use mdslab::equivalence::{
    check_condition_a, check_condition_b, check_dual_conditions, condition_b_holds_fast, mds_to_dual_witness,
    stmt2_witness, yz_from_t, ConditionBFailure,
};
use mdslab::field::prime_power;
use mdslab::format::{parse_vectors, read_matrix_file};
use mdslab::linalg::{rank, Matrix, Subspace};
use mdslab::searchb::{
    brute_force_stmt4, search_condition_b, SearchMode, SearchOptions, SearchReport, Strategy, Verdict,
    DEFAULT_SAMPLES,
};
use mdslab::{suite, FieldCtx, Gf};
use serde_json::{json, Value};

pub use report::{Format, Report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_WITNESS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "mdslab", version, about = "Finite-field MDS code experiments")]
struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads (falls back to MDSLAB_THREADS, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct FieldArgs {
    /// Field order, a prime power.
    #[arg(long)]
    q: u32,
    #[arg(long)]
    p: Option<u32>,
    #[arg(long)]
    m: Option<u32>,
    /// Non-leading modulus coefficients, lowest degree first.
    #[arg(long, value_name = "C0,C1,...")]
    modulus: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Randomized,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StrategyArg {
    Auto,
    Direct,
    ArcScreen,
}

#[derive(Debug, Args)]
struct SearchArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::Exhaustive)]
    mode: ModeArg,
    /// Node limit (exhaustive) or sample count (randomized).
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Explore every branch so the witness and counters are reproducible.
    #[arg(long)]
    deterministic: bool,
    #[arg(long, value_enum, default_value_t = StrategyArg::Auto)]
    strategy: StrategyArg,
    /// JSON-lines progress file; completed branches are skipped on resume.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// MDS check of a Reed-Solomon generator matrix.
    VerifyRs {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        extended: bool,
    },
    /// Runs both MDS verifiers on a matrix file.
    CheckMds {
        #[arg(long)]
        input: PathBuf,
    },
    /// Looks for a row combination with at least k zeros.
    Stmt2 {
        #[arg(long)]
        input: PathBuf,
    },
    /// Brute force over pairs of subspaces of P_q.
    Stmt4 {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        k: usize,
        #[arg(long, required = true)]
        brute: bool,
    },
    /// Subspace conditions for the pair derived from a k x q matrix T.
    ConditionA {
        #[arg(long)]
        input: PathBuf,
    },
    /// Checks a supplied B, or searches for one.
    ConditionB {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        k: usize,
        #[arg(long, requires = "b")]
        s: Option<usize>,
        /// Columns of B as `a,b,c;d,e,f`.
        #[arg(long, requires = "s", value_name = "COLS")]
        b: Option<String>,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Searches for a B satisfying condition B.
    SearchB {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Translated disjointness conditions for a k x (q+2) matrix.
    Dual {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Seeded property checks tying the statements together.
    EquivSuite {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
}

#[derive(Debug)]
struct Failure {
    kind: &'static str,
    message: String,
}

fn fail(kind: &'static str, message: impl ToString) -> Failure {
    Failure {
        kind,
        message: message.to_string(),
    }
}

type Run = Result<(Report, i32), Failure>;

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    code: EXIT_OK,
                    stdout: e.to_string(),
                },
                _ => Outcome {
                    code: EXIT_USAGE,
                    stdout: report::render_error("usage", e.to_string().trim_end(), Format::Json),
                },
            };
        }
    };
    let format = cli.format;
    let threads = match thread_count(cli.threads) {
        Ok(t) => t,
        Err(f) => {
            return Outcome {
                code: EXIT_USAGE,
                stdout: report::render_error(f.kind, &f.message, format),
            }
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            return Outcome {
                code: EXIT_USAGE,
                stdout: report::render_error("threads", &e.to_string(), format),
            }
        }
    };
    let start = Instant::now();
    match pool.install(|| dispatch(cli.command)) {
        Ok((mut rep, code)) => {
            rep.elapsed_ms = start.elapsed().as_millis() as u64;
            Outcome {
                code,
                stdout: rep.render(format),
            }
        }
        Err(f) => Outcome {
            code: if f.kind == "budget" { EXIT_BUDGET } else { EXIT_USAGE },
            stdout: report::render_error(f.kind, &f.message, format),
        },
    }
}

fn thread_count(flag: Option<usize>) -> Result<Option<usize>, Failure> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var("MDSLAB_THREADS") {
            Ok(v) if !v.trim().is_empty() => Some(
                v.trim()
                    .parse::<usize>()
                    .map_err(|_| fail("usage", format!("MDSLAB_THREADS={v} is not a thread count")))?,
            ),
            _ => None,
        },
    };
    if n == Some(0) {
        return Err(fail("usage", "thread count must be positive"));
    }
    Ok(n)
}

fn dispatch(cmd: Command) -> Run {
    match cmd {
        Command::VerifyRs { field, k, extended } => verify_rs(&field, k, extended),
        Command::CheckMds { input } => check_mds(&input),
        Command::Stmt2 { input } => stmt2(&input),
        Command::Stmt4 { field, k, .. } => stmt4(&field, k),
        Command::ConditionA { input } => condition_a(&input),
        Command::ConditionB { field, k, s, b, search } => match (s, b) {
            (Some(s), Some(b)) => condition_b(&field, k, s, &b),
            _ => search_b("condition-b", &field, k, &search),
        },
        Command::SearchB { field, k, search } => search_b("search-b", &field, k, &search),
        Command::Dual { input, k } => dual(&input, k),
        Command::EquivSuite { field, k, trials, seed } => equiv_suite(&field, k, trials, seed),
    }
}

fn build_field(a: &FieldArgs) -> Result<FieldCtx, Failure> {
    let (p, m) = prime_power(a.q).ok_or_else(|| fail("field", format!("q = {} is not a prime power", a.q)))?;
    for (name, given, expected) in [("p", a.p, p), ("m", a.m, m)] {
        if let Some(g) = given {
            if g != expected {
                return Err(fail("field", format!("{name} = {g} inconsistent with q = {}", a.q)));
            }
        }
    }
    let modulus = match &a.modulus {
        Some(text) => Some(
            text.split(',')
                .map(|c| c.trim().parse::<u32>())
                .collect::<Result<Vec<u32>, _>>()
                .map_err(|_| fail("field", format!("bad modulus `{text}`")))?,
        ),
        None => None,
    };
    FieldCtx::new(p, m, modulus.as_deref()).map_err(|e| fail("field", e))
}

fn read_input(path: &Path) -> Result<Matrix, Failure> {
    read_matrix_file(path).map_err(|e| fail("input", e))
}

fn rows_json(m: &Matrix) -> Value {
    json!(m.to_u32_rows())
}

fn basis_json(s: &Subspace) -> Value {
    rows_json(s.basis())
}

fn vec_json(v: &[Gf]) -> Value {
    json!(v.iter().map(|x| x.0).collect::<Vec<u32>>())
}

/// Runs both verifiers; a non-MDS verdict comes with the dependent columns
/// and a low-weight combination, each rechecked by direct computation.
fn mds_report(statement: &'static str, code: &CodeMatrix) -> (Report, i32) {
    let minors = is_mds_minors(code);
    let words = is_mds_codewords(code);
    let agree = minors.mds == words.mds;
    let mut rep = Report::new(statement, Some(code.field().q()), Some(code.k()));
    rep.stats = json!({
        "n": code.n(),
        "minors": minors.mds,
        "codewords": words.mds,
        "agree": agree,
        "mds": minors.mds && words.mds,
    });
    if !agree {
        rep.verdict = "verifiers-disagree".into();
        return (rep, EXIT_WITNESS);
    }
    if minors.mds {
        rep.verdict = "mds".into();
        return (rep, EXIT_OK);
    }
    let k = code.k();
    let cols = minors.dependent.expect("non-MDS has a dependent subset");
    let comb = words.combination.expect("non-MDS has a low-weight word");
    let word = code.matrix().left_apply(&comb);
    let zeros = word.iter().filter(|x| x.is_zero()).count();
    let reverified = rank(&code.matrix().select_columns(&cols)) < k && zeros >= k;
    rep.verdict = "not-mds".into();
    rep.witness = Some(json!({
        "dependent_columns": cols,
        "combination": vec_json(&comb),
        "codeword": vec_json(&word),
        "zeros": zeros,
        "reverified": reverified,
    }));
    (rep, EXIT_WITNESS)
}

fn verify_rs(fa: &FieldArgs, k: usize, extended: bool) -> Run {
    let field = build_field(fa)?;
    let code = if extended { extended_rs(&field, k) } else { rs_code(&field, k) }.map_err(|e| fail("input", e))?;
    let (rep, code) = mds_report("verify-rs", &code);
    Ok((rep.param("extended", extended), code))
}

fn check_mds(input: &Path) -> Run {
    let m = read_input(input)?;
    let code = CodeMatrix::new(m).map_err(|e| fail("input", e))?;
    Ok(mds_report("check-mds", &code))
}

fn stmt2(input: &Path) -> Run {
    let m = read_input(input)?;
    let k = m.rows();
    let found = stmt2_witness(&m).map_err(|e| fail("input", e))?;
    let mut rep = Report::new("stmt2", Some(m.field().q()), Some(k));
    rep.stats = json!({ "n": m.cols() });
    match found {
        Some(comb) => {
            let word = m.left_apply(&comb);
            let zeros = word.iter().filter(|x| x.is_zero()).count();
            rep.verdict = "holds".into();
            rep.stats["combination"] = vec_json(&comb);
            rep.stats["codeword"] = vec_json(&word);
            rep.stats["zeros"] = json!(zeros);
            Ok((rep, EXIT_OK))
        }
        None => {
            let code = CodeMatrix::new(m.clone()).map_err(|e| fail("input", e))?;
            rep.verdict = "counterexample".into();
            rep.witness = Some(json!({
                "matrix": rows_json(&m),
                "reverified": is_mds_minors(&code).mds,
            }));
            Ok((rep, EXIT_WITNESS))
        }
    }
}

fn stmt4(fa: &FieldArgs, k: usize) -> Run {
    let field = build_field(fa)?;
    let res = brute_force_stmt4(&field, k).map_err(|e| fail("input", e))?;
    let mut rep = Report::new("stmt4", Some(field.q()), Some(k)).param("brute", true);
    rep.stats = json!({ "subspaces": res.subspaces, "pairs_checked": res.pairs_checked });
    match res.witness {
        Some((y, z)) => {
            rep.verdict = "witness".into();
            rep.witness = Some(json!({
                "y": basis_json(&y),
                "z": basis_json(&z),
                "reverified": res.reverified,
            }));
            Ok((rep, EXIT_WITNESS))
        }
        None => {
            rep.verdict = "none".into();
            Ok((rep, EXIT_OK))
        }
    }
}

fn condition_a(input: &Path) -> Run {
    let t = read_input(input)?;
    let k = t.rows();
    let (y, z) = yz_from_t(&t).map_err(|e| fail("input", e))?;
    let res = check_condition_a(&y, &z, k).map_err(|e| fail("input", e))?;
    let mut rep = Report::new("condition-a", Some(t.field().q()), Some(k));
    rep.stats = json!({
        "dims": res.dims_ok,
        "span_in_o_k1": res.span_in_ok1,
        "y_in_o_k2": res.y_in_ok2,
        "z_in_o_k2": res.z_in_ok2,
        "meet_in_o_k3": res.meet_in_ok3,
        "y": basis_json(&y),
        "z": basis_json(&z),
    });
    match &res.witness {
        None => {
            let reverified = mdslab::searchb::stmt4_witness_reverifies(&y, &z).map_err(|e| fail("input", e))?;
            rep.verdict = "all-hold".into();
            rep.witness = Some(json!({
                "y": basis_json(&y),
                "z": basis_json(&z),
                "reverified": reverified,
            }));
            Ok((rep, EXIT_WITNESS))
        }
        Some(v) => {
            rep.verdict = "violated".into();
            rep.stats["violation"] = json!({
                "condition": v.condition,
                "poly": v.poly.as_ref().map(|p| vec_json(p.coeffs())),
            });
            Ok((rep, EXIT_OK))
        }
    }
}

fn condition_b(fa: &FieldArgs, k: usize, s: usize, cols: &str) -> Run {
    let field = build_field(fa)?;
    let b = parse_vectors(&field, cols).map_err(|e| fail("input", e))?;
    let res = check_condition_b(&field, k, s, &b).map_err(|e| fail("input", e))?;
    let mut rep = Report::new("condition-b", Some(field.q()), Some(k))
        .param("s", s)
        .param("b", b.iter().map(|c| vec_json(c)).collect::<Vec<_>>());
    rep.stats = json!({
        "submatrices": res.submatrices_ok,
        "extension": res.extension_ok,
    });
    match res.failure {
        None => {
            let reverified = condition_b_holds_fast(&field, k, s, &b).map_err(|e| fail("input", e))?;
            rep.verdict = "holds".into();
            rep.witness = Some(json!({
                "s": s,
                "b": b.iter().map(|c| vec_json(c)).collect::<Vec<_>>(),
                "reverified": reverified,
            }));
            Ok((rep, EXIT_WITNESS))
        }
        Some(f) => {
            rep.verdict = match f {
                ConditionBFailure::Unsatisfiable => "unsatisfiable",
                _ => "fails",
            }
            .into();
            rep.stats["failure"] = serde_json::to_value(&f).expect("plain data");
            Ok((rep, EXIT_OK))
        }
    }
}

fn search_options(a: &SearchArgs) -> Result<SearchOptions, Failure> {
    let strategy = match a.strategy {
        StrategyArg::Auto => Strategy::Auto,
        StrategyArg::Direct => Strategy::Direct,
        StrategyArg::ArcScreen => Strategy::ArcScreen,
    };
    let mut opts = match a.mode {
        ModeArg::Exhaustive => {
            let mut o = SearchOptions::exhaustive();
            o.budget = a.budget;
            o.seed = a.seed;
            o.deterministic = a.deterministic;
            o
        }
        ModeArg::Randomized => {
            let seed = a.seed.ok_or_else(|| fail("usage", "randomized mode needs --seed"))?;
            let mut o = SearchOptions::randomized(a.budget.unwrap_or(DEFAULT_SAMPLES), seed);
            o.deterministic = a.deterministic;
            o
        }
    };
    opts.strategy = strategy;
    opts.checkpoint = a.checkpoint.clone();
    Ok(opts)
}

fn search_b(statement: &'static str, fa: &FieldArgs, k: usize, a: &SearchArgs) -> Run {
    let field = build_field(fa)?;
    let opts = search_options(a)?;
    let res: SearchReport = search_condition_b(&field, k, &opts).map_err(|e| fail("input", e))?;
    let mut rep = Report::new(statement, Some(field.q()), Some(k))
        .param(
            "mode",
            match opts.mode {
                SearchMode::Exhaustive => "exhaustive",
                SearchMode::Randomized => "randomized",
            },
        )
        .param("budget", json!(opts.budget))
        .param("seed", json!(opts.seed))
        .param("deterministic", opts.deterministic)
        .param("strategy", serde_json::to_value(opts.strategy).expect("plain data"));
    rep.verdict = serde_json::to_value(res.verdict)
        .expect("plain data")
        .as_str()
        .expect("unit variant")
        .to_string();
    rep.stats = json!({
        "s_range": res.s_range,
        "nodes_explored": res.nodes_explored,
        "candidates_tested": res.candidates_tested,
        "slices": res.slices,
        "arc_screen": res.arc_screen,
        "frontier": res.frontier,
    });
    let code = match res.verdict {
        Verdict::NoWitness | Verdict::NotFalsified => EXIT_OK,
        Verdict::BudgetExceeded => EXIT_BUDGET,
        Verdict::Witness => {
            rep.witness = Some(serde_json::to_value(&res.witness).expect("plain data"));
            EXIT_WITNESS
        }
    };
    Ok((rep, code))
}

fn dual(input: &Path, k: usize) -> Run {
    let m = read_input(input)?;
    let w = mds_to_dual_witness(&m, k).map_err(|e| fail("input", e))?;
    let res = check_dual_conditions(&w, k).map_err(|e| fail("input", e))?;
    let mut rep = Report::new("dual", Some(m.field().q()), Some(k));
    rep.stats = json!({
        "s": w.s,
        "xperp": basis_json(&w.xperp),
        "yperp": basis_json(&w.yperp),
        "zperp": basis_json(&w.zperp),
        "y_col": vec_json(&w.y_col),
        "z_col": vec_json(&w.z_col),
    });
    if res.holds {
        let code = CodeMatrix::new(m.clone()).map_err(|e| fail("input", e))?;
        rep.verdict = "holds".into();
        rep.witness = Some(json!({
            "matrix": rows_json(&m),
            "reverified": is_mds_minors(&code).mds,
        }));
        Ok((rep, EXIT_WITNESS))
    } else {
        rep.verdict = "fails".into();
        rep.stats["failing"] = serde_json::to_value(&res.failing).expect("plain data");
        Ok((rep, EXIT_OK))
    }
}

fn equiv_suite(fa: &FieldArgs, k: usize, trials: u64, seed: u64) -> Run {
    let field = build_field(fa)?;
    let q = field.order();
    if k < 2 || k > q {
        return Err(fail("input", format!("need 2 <= k <= q, got k = {k}, q = {q}")));
    }
    let outcomes = vec![
        suite::normalization_invariance(&field, k, trials, seed),
        suite::condition_a_correspondence(&field, k, trials, seed),
        suite::dual_soundness(&field, k, trials, seed),
        suite::round_trip(&field, k, trials, seed),
        suite::root_lemma(&field),
        suite::oracle_agreement(&field, k, q + 1, trials, seed),
        suite::oracle_agreement(&field, k, q + 2, trials, seed),
    ];
    let passed = outcomes.iter().filter(|o| o.ok()).count();
    let mut rep = Report::new("equiv-suite", Some(field.q()), Some(k))
        .param("trials", trials)
        .param("seed", seed);
    rep.verdict = if passed == outcomes.len() { "pass" } else { "fail" }.into();
    rep.stats = json!({
        "properties": outcomes,
        "passed": passed,
        "failed": outcomes.len() - passed,
    });
    let code = if passed == outcomes.len() { EXIT_OK } else { EXIT_WITNESS };
    Ok((rep, code))
}
