//! Searches for condition-B extensions of Reed–Solomon codes, plus the
//! brute-force oracles for the matrix statement and the subspace statement
//! at tiny sizes.
//!
//! The exhaustive condition-B search runs one slice per `s` in `k+1..=q`.
//! A slice is settled either by the direct depth-first search over column
//! tuples, or by the arc screen: a witness makes `X [R | y | z]` a
//! `k x (q+2)` MDS matrix, whose columns (or those of its dual) form a
//! `(q+2)`-arc in `PG(k'-1, q)` with `k' = min(k, q+2-k)`. An exhausted arc
//! search therefore rules out every `s` at once.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codes::{first_dependent_subset, is_mds_minors, CodeMatrix};
use crate::combinat::{binomial, next_subset, projective_count, ProjectivePoints, Subsets};
use crate::equivalence::{check_condition_a, check_condition_b, root_vector, t_from_yz, EquivError};
use crate::field::{FieldCtx, Gf};
use crate::linalg::{kernel, rank_in_place, Matrix, Subspace};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("k = {k} outside 3..{q}")]
    BadK { k: usize, q: u32 },
    #[error("randomized mode needs a seed")]
    MissingSeed,
    #[error("{what} for q = {q}, k = {k} is beyond the enumeration guard")]
    TooLarge { what: &'static str, q: u32, k: usize },
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error("witness failed re-verification: {0}")]
    Unverified(String),
    #[error(transparent)]
    Equiv(#[from] EquivError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    Exhaustive,
    Randomized,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Direct search where the column space is small, the arc screen elsewhere.
    #[default]
    Auto,
    Direct,
    ArcScreen,
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub mode: SearchMode,
    /// Node limit (exhaustive) or sample count (randomized).
    pub budget: Option<u64>,
    pub seed: Option<u64>,
    /// Drain every branch so the reported witness and counters do not
    /// depend on scheduling.
    pub deterministic: bool,
    pub strategy: Strategy,
    /// JSON-lines file of completed top-level branches.
    pub checkpoint: Option<PathBuf>,
}

impl SearchOptions {
    pub fn exhaustive() -> Self {
        SearchOptions {
            mode: SearchMode::Exhaustive,
            budget: None,
            seed: None,
            deterministic: true,
            strategy: Strategy::Auto,
            checkpoint: None,
        }
    }

    pub fn randomized(budget: u64, seed: u64) -> Self {
        SearchOptions {
            mode: SearchMode::Randomized,
            budget: Some(budget),
            seed: Some(seed),
            ..Self::exhaustive()
        }
    }
}

pub const DEFAULT_SAMPLES: u64 = 100_000;
/// Auto strategy searches a slice directly when the space of basis tuples
/// times the column scan below each is at most this large.
pub const DIRECT_AUTO_LIMIT: u64 = 1_000_000_000;
/// Largest projective point table either search will build.
pub const POINT_TABLE_LIMIT: u64 = 1 << 21;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Direct,
    ArcScreen,
    Sampling,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SliceStats {
    pub s: usize,
    pub method: Method,
    pub nodes: u64,
    pub candidates: u64,
    pub complete: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BWitness {
    pub s: usize,
    pub b: Vec<Vec<Gf>>,
    pub reverified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ArcSearch {
    /// Projective dimension plus one.
    pub dim: usize,
    pub size: usize,
    pub nodes: u64,
    pub arc: Option<Vec<Vec<Gf>>>,
    pub complete: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    NoWitness,
    NotFalsified,
    Witness,
    BudgetExceeded,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchReport {
    pub q: u32,
    pub k: usize,
    pub mode: SearchMode,
    pub s_range: Vec<usize>,
    pub nodes_explored: u64,
    pub candidates_tested: u64,
    pub witness: Option<BWitness>,
    pub seed: Option<u64>,
    pub verdict: Verdict,
    pub slices: Vec<SliceStats>,
    pub arc_screen: Option<ArcSearch>,
    pub deterministic: bool,
    /// Completed top-level branches `(s, b1)` when the budget ran out.
    pub frontier: Vec<(usize, usize)>,
    #[serde(skip)]
    pub elapsed_ms: u64,
}

/// Shared counters for one search run.
struct Budget {
    nodes: AtomicU64,
    candidates: AtomicU64,
    limit: Option<u64>,
    exceeded: AtomicBool,
    found: AtomicBool,
    early_exit: bool,
}

impl Budget {
    fn new(limit: Option<u64>, early_exit: bool) -> Self {
        Budget {
            nodes: AtomicU64::new(0),
            candidates: AtomicU64::new(0),
            limit,
            exceeded: AtomicBool::new(false),
            found: AtomicBool::new(false),
            early_exit,
        }
    }

    /// Records a node; false once the run should stop.
    fn node(&self) -> bool {
        let n = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if let Some(limit) = self.limit {
            if n > limit {
                self.exceeded.store(true, Ordering::Relaxed);
            }
        }
        !self.stopped()
    }

    fn stopped(&self) -> bool {
        self.exceeded.load(Ordering::Relaxed) || (self.early_exit && self.found.load(Ordering::Relaxed))
    }
}

fn is_independent(field: &FieldCtx, vecs: &[&[Gf]], len: usize, buf: &mut Vec<Gf>) -> bool {
    buf.clear();
    for v in vecs {
        buf.extend_from_slice(v);
    }
    rank_in_place(field, buf, vecs.len(), len) == vecs.len()
}

fn point_table(q: u32, d: usize) -> Option<Vec<Vec<Gf>>> {
    if projective_count(q, d) > POINT_TABLE_LIMIT {
        return None;
    }
    Some(ProjectivePoints::new(q, d).collect())
}

/// Exhaustive search for a `size`-arc in `PG(dim-1, q)`: `size` points any
/// `dim` of which are independent. The first `dim + 1` points are fixed to
/// the standard frame, which every arc of at least that size can be mapped
/// onto.
pub fn find_arc(field: &FieldCtx, dim: usize, size: usize, limit: Option<u64>) -> Result<ArcSearch, SearchError> {
    let q = field.q();
    let budget = Budget::new(limit, false);
    let done = |arc: Option<Vec<Vec<Gf>>>, complete: bool, nodes: u64| ArcSearch {
        dim,
        size,
        nodes,
        arc,
        complete,
    };
    if dim == 0 || size as u64 > projective_count(q, dim) {
        return Ok(done(None, true, 0));
    }
    let mut frame: Vec<Vec<Gf>> = (0..dim)
        .map(|i| {
            let mut e = vec![Gf::ZERO; dim];
            e[i] = Gf::ONE;
            e
        })
        .collect();
    if size <= dim {
        frame.truncate(size);
        return Ok(done(Some(frame), true, 0));
    }
    frame.push(vec![Gf::ONE; dim]);
    if size == dim + 1 || dim == 1 {
        let ok = size == dim + 1 && dim > 1;
        return Ok(done(ok.then_some(frame), true, 0));
    }
    let points = point_table(q, dim).ok_or(SearchError::TooLarge {
        what: "arc search",
        q,
        k: dim,
    })?;
    let frame_idx: Vec<usize> = frame
        .iter()
        .map(|f| points.binary_search(f).expect("frame points are projective representatives"))
        .collect();

    let mut buf = Vec::new();
    let initial: Vec<usize> = (0..points.len())
        .filter(|i| !frame_idx.contains(i))
        .filter(|&i| {
            Subsets::new(frame.len(), dim - 1).all(|t| {
                let mut vecs: Vec<&[Gf]> = t.iter().map(|&j| frame[j].as_slice()).collect();
                vecs.push(&points[i]);
                is_independent(field, &vecs, dim, &mut buf)
            })
        })
        .collect();
    let need = size - frame.len();
    let chosen: Vec<usize> = frame_idx.clone();

    let branches: Vec<Option<Vec<usize>>> = (0..initial.len())
        .into_par_iter()
        .map(|i| {
            if initial.len() - i < need || budget.stopped() {
                return None;
            }
            let mut chosen = chosen.clone();
            let mut buf = Vec::new();
            arc_branch(field, &points, &initial, i, &mut chosen, need, dim, &budget, &mut buf)
        })
        .collect();
    let nodes = budget.nodes.load(Ordering::Relaxed);
    let complete = !budget.exceeded.load(Ordering::Relaxed);
    let arc = branches
        .into_iter()
        .flatten()
        .next()
        .map(|idx| idx.into_iter().map(|i| points[i].clone()).collect());
    Ok(done(arc, complete, nodes))
}

#[allow(clippy::too_many_arguments)]
fn arc_branch(
    field: &FieldCtx,
    points: &[Vec<Gf>],
    cands: &[usize],
    pick: usize,
    chosen: &mut Vec<usize>,
    need: usize,
    dim: usize,
    budget: &Budget,
    buf: &mut Vec<Gf>,
) -> Option<Vec<usize>> {
    if !budget.node() {
        return None;
    }
    let c = cands[pick];
    if need == 1 {
        chosen.push(c);
        return Some(chosen.clone());
    }
    let next: Vec<usize> = cands[pick + 1..]
        .iter()
        .copied()
        .filter(|&x| {
            Subsets::new(chosen.len(), dim - 2).all(|u| {
                let mut vecs: Vec<&[Gf]> = u.iter().map(|&j| points[chosen[j]].as_slice()).collect();
                vecs.push(&points[c]);
                vecs.push(&points[x]);
                is_independent(field, &vecs, dim, buf)
            })
        })
        .collect();
    chosen.push(c);
    for i in 0..next.len() {
        if next.len() - i < need - 1 {
            break;
        }
        if let Some(arc) = arc_branch(field, points, &next, i, chosen, need - 1, dim, budget, buf) {
            return Some(arc);
        }
        if budget.stopped() {
            break;
        }
    }
    chosen.pop();
    None
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct CheckpointLine {
    q: u32,
    k: usize,
    s: usize,
    b1: usize,
    nodes: u64,
    candidates: u64,
    witness: Option<Vec<usize>>,
}

fn load_checkpoint(path: &PathBuf, q: u32, k: usize) -> Result<Vec<CheckpointLine>, SearchError> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(SearchError::Checkpoint(e.to_string())),
    };
    let mut out = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| SearchError::Checkpoint(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: CheckpointLine =
            serde_json::from_str(&line).map_err(|e| SearchError::Checkpoint(format!("line {}: {e}", n + 1)))?;
        if rec.q == q && rec.k == k {
            out.push(rec);
        }
    }
    Ok(out)
}

/// Precomputed data for the direct search of one slice `s`.
struct Slice<'a> {
    field: &'a FieldCtx,
    q: usize,
    k: usize,
    s: usize,
    nb: usize,
    points: Vec<Vec<Gf>>,
    roots: Vec<Vec<Gf>>,
    es: Vec<Gf>,
}

enum BranchEnd {
    Done { nodes: u64, candidates: u64, witness: Option<Vec<usize>> },
    Aborted,
}

impl<'a> Slice<'a> {
    fn new(field: &'a FieldCtx, k: usize, s: usize) -> Option<Self> {
        let q = field.order();
        let points = point_table(field.q(), s)?;
        let roots = (0..q)
            .map(|j| root_vector(field, field.element(j), s).expect("s <= q"))
            .collect();
        let mut es = vec![Gf::ZERO; s];
        es[s - 1] = Gf::ONE;
        Some(Slice {
            field,
            q,
            k,
            s,
            nb: s - k,
            points,
            roots,
            es,
        })
    }

    /// Explores every tuple whose first basis column is `points[b1]`.
    fn branch(&self, b1: usize, budget: &Budget) -> BranchEnd {
        let mut local = Local {
            nodes: 0,
            candidates: 0,
            buf: Vec::new(),
        };
        let mut basis = vec![b1];
        let witness = self.place_basis(&mut basis, budget, &mut local);
        if budget.exceeded.load(Ordering::Relaxed) {
            return BranchEnd::Aborted;
        }
        BranchEnd::Done {
            nodes: local.nodes,
            candidates: local.candidates,
            witness,
        }
    }

    /// `basis` ends with a freshly placed column: prune, then extend.
    fn place_basis(&self, basis: &mut Vec<usize>, budget: &Budget, local: &mut Local) -> Option<Vec<usize>> {
        local.candidates += 1;
        budget.candidates.fetch_add(1, Ordering::Relaxed);
        let placed = basis.len();
        // placed basis columns with e_s, and with any k Reed-Solomon columns, stay independent
        {
            let mut vecs: Vec<&[Gf]> = basis.iter().map(|&i| self.points[i].as_slice()).collect();
            vecs.push(&self.es);
            if !is_independent(self.field, &vecs, self.s, &mut local.buf) {
                return None;
            }
        }
        if placed < self.nb {
            for sub in Subsets::new(self.q, self.k) {
                let mut vecs: Vec<&[Gf]> = basis.iter().map(|&i| self.points[i].as_slice()).collect();
                vecs.extend(sub.iter().map(|&j| self.roots[j].as_slice()));
                if !is_independent(self.field, &vecs, self.s, &mut local.buf) {
                    return None;
                }
            }
            local.nodes += 1;
            if !budget.node() {
                return None;
            }
            let last = *basis.last().unwrap();
            for next in last + 1..self.points.len() {
                basis.push(next);
                let found = self.place_basis(basis, budget, local);
                basis.pop();
                if found.is_some() {
                    return found;
                }
                if budget.stopped() {
                    return None;
                }
            }
            return None;
        }
        let basis_rows: Vec<Vec<Gf>> = basis.iter().map(|&i| self.points[i].clone()).collect();
        let x = kernel(&Matrix::from_rows(self.field, self.s, &basis_rows).expect("rows have length s"));
        let gr: Vec<Vec<Gf>> = self.roots.iter().map(|r| x.apply(r)).collect();
        if first_dependent_subset(self.field, &gr, self.k).is_some() {
            return None;
        }
        local.nodes += 1;
        if !budget.node() {
            return None;
        }
        self.place_extra(basis, &x, &gr, budget, local)
    }

    /// Chooses `y < z` among the columns compatible with the fixed basis.
    fn place_extra(
        &self,
        basis: &[usize],
        x: &Matrix,
        gr: &[Vec<Gf>],
        budget: &Budget,
        local: &mut Local,
    ) -> Option<Vec<usize>> {
        let f = self.field;
        let k = self.k;
        // p is admissible as y iff p . h != 0 for the lifted normal h of every
        // hyperplane spanned by k-1 columns of X R
        let lift = |normal: &[Gf]| -> Vec<Gf> { x.left_apply(normal) };
        let normals: Vec<Vec<Gf>> = Subsets::new(self.q, k - 1)
            .map(|sub| {
                let rows: Vec<Vec<Gf>> = sub.iter().map(|&j| gr[j].clone()).collect();
                let n = kernel(&Matrix::from_rows(f, k, &rows).expect("length k"));
                lift(n.row(0))
            })
            .collect();
        let mut w = basis.iter().map(|&i| self.points[i].clone()).collect::<Vec<_>>();
        w.push(self.es.clone());
        let w = Subspace::from_vectors(f, self.s, &w).expect("length s");

        let mut ycands: Vec<(usize, Vec<Gf>, Vec<Gf>)> = Vec::new();
        for (idx, p) in self.points.iter().enumerate() {
            if basis.contains(&idx) {
                continue;
            }
            local.candidates += 1;
            if normals.iter().any(|h| f.dot(h, p).is_zero()) {
                continue;
            }
            let res = w.reduce(p).expect("length s");
            if res.iter().all(|c| c.is_zero()) {
                continue;
            }
            ycands.push((idx, x.apply(p), res));
        }
        budget.candidates.fetch_add(ycands.len() as u64, Ordering::Relaxed);

        for (a, (yi, xy, ry)) in ycands.iter().enumerate() {
            local.nodes += 1;
            if !budget.node() {
                return None;
            }
            let pair_normals: Vec<Vec<Gf>> = Subsets::new(self.q, k - 2)
                .map(|sub| {
                    let mut rows: Vec<Vec<Gf>> = sub.iter().map(|&j| gr[j].clone()).collect();
                    rows.push(xy.clone());
                    let n = kernel(&Matrix::from_rows(f, k, &rows).expect("length k"));
                    n.row(0).to_vec()
                })
                .collect();
            for (zi, xz, rz) in &ycands[a + 1..] {
                local.candidates += 1;
                if pair_normals.iter().any(|n| f.dot(n, xz).is_zero()) {
                    continue;
                }
                if !is_independent(f, &[ry, rz], self.s, &mut local.buf) {
                    continue;
                }
                let mut tuple = basis.to_vec();
                tuple.push(*yi);
                tuple.push(*zi);
                budget.found.store(true, Ordering::Relaxed);
                return Some(tuple);
            }
        }
        None
    }
}

struct Local {
    nodes: u64,
    candidates: u64,
    buf: Vec<Gf>,
}

fn direct_estimate(q: u32, k: usize, s: usize) -> u64 {
    projective_count(q, s).saturating_pow((s - k + 1) as u32)
}

struct SliceOutcome {
    stats: SliceStats,
    witness: Option<Vec<usize>>,
    frontier: Vec<(usize, usize)>,
    aborted: bool,
}

fn run_direct_slice(
    field: &FieldCtx,
    k: usize,
    s: usize,
    budget: &Budget,
    prior: &[CheckpointLine],
    sink: Option<&Mutex<File>>,
) -> Result<SliceOutcome, SearchError> {
    let slice = Slice::new(field, k, s).ok_or(SearchError::TooLarge {
        what: "direct condition-B search",
        q: field.q(),
        k,
    })?;
    let done: std::collections::BTreeMap<usize, &CheckpointLine> =
        prior.iter().filter(|c| c.s == s).map(|c| (c.b1, c)).collect();
    let ends: Vec<(usize, Option<BranchEnd>)> = (0..slice.points.len())
        .into_par_iter()
        .map(|b1| {
            if let Some(c) = done.get(&b1) {
                return (
                    b1,
                    Some(BranchEnd::Done {
                        nodes: c.nodes,
                        candidates: c.candidates,
                        witness: c.witness.clone(),
                    }),
                );
            }
            if budget.stopped() {
                return (b1, None);
            }
            let end = slice.branch(b1, budget);
            if let (Some(sink), BranchEnd::Done { nodes, candidates, witness }) = (sink, &end) {
                let line = CheckpointLine {
                    q: field.q(),
                    k,
                    s,
                    b1,
                    nodes: *nodes,
                    candidates: *candidates,
                    witness: witness.clone(),
                };
                let mut f = sink.lock().expect("checkpoint lock");
                let _ = writeln!(f, "{}", serde_json::to_string(&line).expect("plain data"));
            }
            (b1, Some(end))
        })
        .collect();

    let mut nodes = 0;
    let mut candidates = 0;
    let mut witness = None;
    let mut frontier = Vec::new();
    let mut aborted = false;
    for (b1, end) in ends {
        match end {
            Some(BranchEnd::Done {
                nodes: n,
                candidates: c,
                witness: w,
            }) => {
                nodes += n;
                candidates += c;
                frontier.push((s, b1));
                if witness.is_none() {
                    witness = w;
                }
            }
            Some(BranchEnd::Aborted) => aborted = true,
            None => aborted |= budget.exceeded.load(Ordering::Relaxed),
        }
    }
    Ok(SliceOutcome {
        stats: SliceStats {
            s,
            method: Method::Direct,
            nodes,
            candidates,
            complete: !aborted && !(budget.early_exit && witness.is_some() && budget.found.load(Ordering::Relaxed)),
        },
        witness,
        frontier,
        aborted,
    })
}

/// Searches for `s` and columns `B` satisfying condition B for `(q, k)`.
pub fn search_condition_b(field: &FieldCtx, k: usize, opts: &SearchOptions) -> Result<SearchReport, SearchError> {
    let q = field.q();
    if k < 3 || k >= field.order() {
        return Err(SearchError::BadK { k, q });
    }
    let start = Instant::now();
    let mut report = match opts.mode {
        SearchMode::Exhaustive => search_exhaustive(field, k, opts)?,
        SearchMode::Randomized => search_randomized(field, k, opts)?,
    };
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}

fn verify_witness(field: &FieldCtx, k: usize, s: usize, b: Vec<Vec<Gf>>) -> Result<BWitness, SearchError> {
    let rep = check_condition_b(field, k, s, &b)?;
    if !rep.holds() {
        return Err(SearchError::Unverified(format!("s = {s}: {:?}", rep.failure)));
    }
    Ok(BWitness { s, b, reverified: true })
}

fn search_exhaustive(field: &FieldCtx, k: usize, opts: &SearchOptions) -> Result<SearchReport, SearchError> {
    let q = field.q();
    let budget = Budget::new(opts.budget, !opts.deterministic);
    let prior = match &opts.checkpoint {
        Some(p) => load_checkpoint(p, q, k)?,
        None => Vec::new(),
    };
    let sink = match &opts.checkpoint {
        Some(p) => Some(Mutex::new(
            OpenOptions::new()
                .create(true)
                .append(true)
                .open(p)
                .map_err(|e| SearchError::Checkpoint(e.to_string()))?,
        )),
        None => None,
    };
    let s_range: Vec<usize> = (k + 1..=field.order()).collect();
    let mut arc_screen: Option<ArcSearch> = None;
    let mut slices = Vec::new();
    let mut frontier = Vec::new();
    let mut witness = None;
    let mut exceeded = false;

    let dual_dim = k.min(field.order() + 2 - k);
    for &s in &s_range {
        let direct_ok = direct_estimate(q, k, s) <= DIRECT_AUTO_LIMIT;
        let want_screen = match opts.strategy {
            Strategy::Direct => false,
            Strategy::ArcScreen => true,
            Strategy::Auto => !direct_ok,
        };
        if want_screen {
            if arc_screen.is_none() {
                let remaining = opts.budget.map(|b| b.saturating_sub(budget.nodes.load(Ordering::Relaxed)));
                let arc = find_arc(field, dual_dim, field.order() + 2, remaining)?;
                budget.nodes.fetch_add(arc.nodes, Ordering::Relaxed);
                if !arc.complete {
                    budget.exceeded.store(true, Ordering::Relaxed);
                }
                arc_screen = Some(arc);
            }
            let arc = arc_screen.as_ref().unwrap();
            if arc.complete && arc.arc.is_none() {
                slices.push(SliceStats {
                    s,
                    method: Method::ArcScreen,
                    nodes: 0,
                    candidates: 0,
                    complete: true,
                });
                continue;
            }
            if !arc.complete {
                exceeded = true;
                break;
            }
            // an arc exists, so the screen cannot settle this slice
        }
        let out = run_direct_slice(field, k, s, &budget, &prior, sink.as_ref())?;
        frontier.extend(out.frontier);
        slices.push(out.stats);
        if out.aborted {
            exceeded = true;
            break;
        }
        if let Some(idx) = out.witness {
            let slice_points: Vec<Vec<Gf>> = ProjectivePoints::new(q, s).collect();
            let b = idx.into_iter().map(|i| slice_points[i].clone()).collect();
            witness = Some(verify_witness(field, k, s, b)?);
            break;
        }
    }
    let verdict = if exceeded {
        Verdict::BudgetExceeded
    } else if witness.is_some() {
        Verdict::Witness
    } else {
        Verdict::NoWitness
    };
    let nodes_explored = slices.iter().map(|s| s.nodes).sum::<u64>() + arc_screen.as_ref().map_or(0, |a| a.nodes);
    let candidates_tested = slices.iter().map(|s| s.candidates).sum();
    Ok(SearchReport {
        q,
        k,
        mode: SearchMode::Exhaustive,
        s_range,
        nodes_explored,
        candidates_tested,
        witness,
        seed: None,
        verdict,
        slices,
        arc_screen,
        deterministic: opts.deterministic,
        frontier: if exceeded { frontier } else { Vec::new() },
        elapsed_ms: 0,
    })
}

/// Samples one candidate `(s, B)` from its own stream of the seeded generator.
pub fn sample_candidate(field: &FieldCtx, k: usize, seed: u64, index: u64) -> (usize, Vec<Vec<Gf>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let q = field.order();
    let s = rng.gen_range(k + 1..=q);
    let b = (0..s - k + 2)
        .map(|_| loop {
            let v: Vec<Gf> = (0..s).map(|_| Gf(rng.gen_range(0..field.q()))).collect();
            if v.iter().any(|x| !x.is_zero()) {
                break v;
            }
        })
        .collect();
    (s, b)
}

/// Condition B for a sampled candidate, cheapest rejections first.
fn candidate_holds(field: &FieldCtx, k: usize, s: usize, b: &[Vec<Gf>], roots: &[Vec<Gf>]) -> bool {
    for (i, c) in b.iter().enumerate() {
        if b[..i].contains(c) {
            return false;
        }
    }
    let nb = s - k;
    let x = kernel(&Matrix::from_rows(field, s, &b[..nb]).expect("length s"));
    if x.rows() != k {
        return false;
    }
    let mut cols: Vec<Vec<Gf>> = roots.iter().map(|r| x.apply(&r[..s])).collect();
    cols.push(x.apply(&b[nb]));
    cols.push(x.apply(&b[nb + 1]));
    if first_dependent_subset(field, &cols, k).is_some() {
        return false;
    }
    let mut vecs: Vec<&[Gf]> = b.iter().map(|c| c.as_slice()).collect();
    let mut es = vec![Gf::ZERO; s];
    es[s - 1] = Gf::ONE;
    vecs.push(&es);
    is_independent(field, &vecs, s, &mut Vec::new())
}

fn search_randomized(field: &FieldCtx, k: usize, opts: &SearchOptions) -> Result<SearchReport, SearchError> {
    let seed = opts.seed.ok_or(SearchError::MissingSeed)?;
    let samples = opts.budget.unwrap_or(DEFAULT_SAMPLES);
    let q = field.order();
    let roots: Vec<Vec<Gf>> = (0..q)
        .map(|j| root_vector(field, field.element(j), q).expect("s = q"))
        .collect();
    let hit = (0..samples).into_par_iter().find_map_first(|i| {
        let (s, b) = sample_candidate(field, k, seed, i);
        candidate_holds(field, k, s, &b, &roots).then_some((s, b))
    });
    let witness = match hit {
        Some((s, b)) => Some(verify_witness(field, k, s, b)?),
        None => None,
    };
    Ok(SearchReport {
        q: field.q(),
        k,
        mode: SearchMode::Randomized,
        s_range: (k + 1..=q).collect(),
        nodes_explored: samples,
        candidates_tested: samples,
        verdict: if witness.is_some() { Verdict::Witness } else { Verdict::NotFalsified },
        witness,
        seed: Some(seed),
        slices: vec![],
        arc_screen: None,
        deterministic: opts.deterministic,
        frontier: vec![],
        elapsed_ms: 0,
    })
}

/// Every `dim`-dimensional subspace of `F_q^ambient`, in order of pivot
/// set and then free entries.
pub fn all_subspaces(field: &FieldCtx, ambient: usize, dim: usize) -> Vec<Subspace> {
    let q = field.q();
    let mut out = Vec::new();
    for pivots in Subsets::new(ambient, dim) {
        let free: Vec<(usize, usize)> = (0..dim)
            .flat_map(|r| {
                let pivots = pivots.clone();
                (pivots[r] + 1..ambient)
                    .filter(move |c| !pivots.contains(c))
                    .map(move |c| (r, c))
            })
            .collect();
        let mut vals = vec![0u32; free.len()];
        loop {
            let mut m = Matrix::zeros(field, dim, ambient);
            for (r, &p) in pivots.iter().enumerate() {
                m.set(r, p, Gf::ONE);
            }
            for (&(r, c), &v) in free.iter().zip(&vals) {
                m.set(r, c, Gf(v));
            }
            out.push(Subspace::from_rows(&m));
            let Some(pos) = vals.iter().rposition(|&v| v + 1 < q) else { break };
            vals[pos] += 1;
            for v in &mut vals[pos + 1..] {
                *v = 0;
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stmt4Search {
    pub witness: Option<(Subspace, Subspace)>,
    /// Whether the witness's reconstructed matrix `[e1 e2 | T]` is MDS.
    pub reverified: bool,
    pub subspaces: usize,
    pub pairs_checked: u64,
}

/// Every ordered pair of distinct `(k-1)`-dimensional subspaces of `P_q`
/// against the five conditions; the first complete witness is returned.
pub fn brute_force_stmt4(field: &FieldCtx, k: usize) -> Result<Stmt4Search, SearchError> {
    let q = field.q();
    if q > 4 || !(2..=3).contains(&k) || k > field.order() {
        return Err(SearchError::TooLarge {
            what: "subspace-pair enumeration",
            q,
            k,
        });
    }
    let subs = all_subspaces(field, field.order(), k - 1);
    let rows: Vec<(u64, Option<usize>)> = subs
        .par_iter()
        .map(|y| {
            let mut checked = 0;
            for (j, z) in subs.iter().enumerate() {
                if y == z {
                    continue;
                }
                checked += 1;
                let rep = check_condition_a(y, z, k).expect("ambient is P_q");
                if rep.all_hold() {
                    return (checked, Some(j));
                }
            }
            (checked, None)
        })
        .collect();
    let mut pairs_checked = 0;
    let mut witness = None;
    for (i, (checked, hit)) in rows.into_iter().enumerate() {
        pairs_checked += checked;
        if let Some(j) = hit {
            witness = Some((subs[i].clone(), subs[j].clone()));
            break;
        }
    }
    let reverified = match &witness {
        Some((y, z)) => stmt4_witness_reverifies(y, z)?,
        None => false,
    };
    Ok(Stmt4Search {
        witness,
        reverified,
        subspaces: subs.len(),
        pairs_checked,
    })
}

/// Rebuilds `M' = [e1 e2 | T]` from `(Y, Z)` and checks it is MDS.
pub fn stmt4_witness_reverifies(y: &Subspace, z: &Subspace) -> Result<bool, SearchError> {
    let field = y.field();
    let t = t_from_yz(y, z)?;
    let k = t.rows();
    let mut m = Matrix::zeros(field, k, field.order() + 2);
    m.set(0, 0, Gf::ONE);
    m.set(1, 1, Gf::ONE);
    for r in 0..k {
        for c in 0..field.order() {
            m.set(r, c + 2, t.get(r, c));
        }
    }
    let code = CodeMatrix::new(m).map_err(EquivError::from)?;
    Ok(is_mds_minors(&code).mds)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stmt2Search {
    /// A `k x (q+2)` matrix no row combination of which has `k` zeros.
    pub counterexample: Option<Matrix>,
    pub reverified: bool,
    pub matrices_checked: u64,
}

const STMT2_GUARD: [(u32, usize); 3] = [(2, 2), (3, 2), (3, 3)];
const STMT2_CHUNK: u64 = 1 << 16;

/// Enumerates every `k x (q+2)` matrix, row-major with the first entry most
/// significant, looking for one that is MDS.
pub fn exhaustive_stmt2(field: &FieldCtx, k: usize) -> Result<Stmt2Search, SearchError> {
    let q = field.q();
    if !STMT2_GUARD.contains(&(q, k)) {
        return Err(SearchError::TooLarge {
            what: "matrix enumeration",
            q,
            k,
        });
    }
    let n = field.order() + 2;
    let total = (q as u64).pow((k * n) as u32);
    let chunks = total.div_ceil(STMT2_CHUNK);
    let first = (0..chunks).into_par_iter().find_map_first(|c| {
        let mut entries = vec![Gf::ZERO; k * n];
        let mut cols = vec![vec![Gf::ZERO; k]; n];
        let mut buf = vec![Gf::ZERO; k * k];
        let end = ((c + 1) * STMT2_CHUNK).min(total);
        (c * STMT2_CHUNK..end).find(|&idx| {
            let mut rest = idx;
            for e in entries.iter_mut().rev() {
                *e = Gf((rest % q as u64) as u32);
                rest /= q as u64;
            }
            for (ci, col) in cols.iter_mut().enumerate() {
                for (r, x) in col.iter_mut().enumerate() {
                    *x = entries[r * n + ci];
                }
            }
            all_minors_nonzero(field, &cols, k, &mut buf)
        })
    });
    let (counterexample, matrices_checked) = match first {
        Some(idx) => {
            let mut data = vec![Gf::ZERO; k * n];
            let mut rest = idx;
            for e in data.iter_mut().rev() {
                *e = Gf((rest % q as u64) as u32);
                rest /= q as u64;
            }
            (Some(Matrix::new(field, k, n, data).expect("sizes agree")), idx + 1)
        }
        None => (None, total),
    };
    let reverified = match &counterexample {
        Some(m) => crate::equivalence::stmt2_witness(m)?.is_none(),
        None => false,
    };
    Ok(Stmt2Search {
        counterexample,
        reverified,
        matrices_checked,
    })
}

fn all_minors_nonzero(field: &FieldCtx, cols: &[Vec<Gf>], k: usize, buf: &mut [Gf]) -> bool {
    if cols.iter().any(|c| c.iter().all(|x| x.is_zero())) {
        return false;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        for (r, &c) in idx.iter().enumerate() {
            buf[r * k..(r + 1) * k].copy_from_slice(&cols[c]);
        }
        if rank_in_place(field, buf, k, k) < k {
            return false;
        }
        if !next_subset(&mut idx, cols.len()) {
            return true;
        }
    }
}

/// Gaussian binomial `[n choose d]_q`.
pub fn subspace_count(q: u32, n: usize, d: usize) -> u64 {
    if d > n {
        return 0;
    }
    let q = q as u128;
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..d {
        num *= q.pow((n - i) as u32) - 1;
        den *= q.pow((i + 1) as u32) - 1;
    }
    (num / den) as u64
}

/// Number of `k`-subsets the literal condition-B checker examines.
pub fn condition_b_subsets(q: u32, k: usize) -> u64 {
    binomial(q as usize + 2, k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(q: u32) -> FieldCtx {
        FieldCtx::of_order(q).unwrap()
    }

    #[test]
    fn arcs_in_small_planes() {
        // hyperoval in PG(2, 4), none of size q + 2 for odd q, conics of size q + 1
        assert!(find_arc(&f(4), 3, 6, None).unwrap().arc.is_some());
        for q in [3u32, 5, 7] {
            let r = find_arc(&f(q), 3, q as usize + 2, None).unwrap();
            assert!(r.complete && r.arc.is_none(), "q = {q}");
            let conic = find_arc(&f(q), 3, q as usize + 1, None).unwrap();
            assert!(conic.arc.is_some(), "q = {q}");
        }
        // PG(1, q) holds only q + 1 points
        assert!(find_arc(&f(5), 2, 7, None).unwrap().arc.is_none());
        assert!(find_arc(&f(5), 2, 6, None).unwrap().arc.is_some());
    }

    #[test]
    fn found_arcs_are_arcs() {
        let field = f(8);
        let r = find_arc(&field, 3, 10, None).unwrap();
        let arc = r.arc.unwrap();
        let m = Matrix::from_columns(&field, 3, &arc).unwrap();
        assert!(is_mds_minors(&CodeMatrix::new(m).unwrap()).mds);
    }

    #[test]
    fn arc_search_respects_budget() {
        let r = find_arc(&f(7), 4, 9, Some(3)).unwrap();
        assert!(!r.complete);
    }

    #[test]
    fn direct_search_q5_k3() {
        let field = f(5);
        let mut opts = SearchOptions::exhaustive();
        opts.strategy = Strategy::Direct;
        let rep = search_condition_b(&field, 3, &opts).unwrap();
        assert_eq!(rep.verdict, Verdict::NoWitness);
        assert_eq!(rep.s_range, vec![4, 5]);
        assert!(rep.slices.iter().all(|s| s.method == Method::Direct && s.complete));
        opts.strategy = Strategy::ArcScreen;
        let screened = search_condition_b(&field, 3, &opts).unwrap();
        assert_eq!(screened.verdict, Verdict::NoWitness);
        assert!(screened.slices.iter().all(|s| s.method == Method::ArcScreen));
    }

    #[test]
    fn direct_search_is_deterministic() {
        let field = f(5);
        let mut opts = SearchOptions::exhaustive();
        opts.strategy = Strategy::Direct;
        let a = search_condition_b(&field, 4, &opts).unwrap();
        let b = search_condition_b(&field, 4, &opts).unwrap();
        assert_eq!(a, SearchReport { elapsed_ms: a.elapsed_ms, ..b });
    }

    #[test]
    fn even_q_falls_back_to_direct() {
        let field = f(4);
        let mut opts = SearchOptions::exhaustive();
        opts.strategy = Strategy::ArcScreen;
        let rep = search_condition_b(&field, 3, &opts).unwrap();
        assert!(rep.arc_screen.as_ref().unwrap().arc.is_some());
        assert!(rep.slices.iter().all(|s| s.method == Method::Direct));
        if let Some(w) = &rep.witness {
            assert!(w.reverified);
            assert!(check_condition_b(&field, 3, w.s, &w.b).unwrap().holds());
        }
    }

    #[test]
    fn budget_exceeded_reports_frontier() {
        let field = f(5);
        let mut opts = SearchOptions::exhaustive();
        opts.strategy = Strategy::Direct;
        opts.budget = Some(5);
        let rep = search_condition_b(&field, 3, &opts).unwrap();
        assert_eq!(rep.verdict, Verdict::BudgetExceeded);
    }

    #[test]
    fn randomized_is_reproducible() {
        let field = f(7);
        let opts = SearchOptions::randomized(300, 9);
        let a = search_condition_b(&field, 3, &opts).unwrap();
        let b = search_condition_b(&field, 3, &opts).unwrap();
        assert_eq!(a.verdict, Verdict::NotFalsified);
        assert_eq!(a, SearchReport { elapsed_ms: a.elapsed_ms, ..b });
        assert_eq!(sample_candidate(&field, 3, 9, 17), sample_candidate(&field, 3, 9, 17));
        assert_ne!(sample_candidate(&field, 3, 9, 17), sample_candidate(&field, 3, 9, 18));
    }

    #[test]
    fn sampled_check_agrees_with_literal() {
        let field = f(5);
        let roots: Vec<Vec<Gf>> = (0..5).map(|j| root_vector(&field, Gf(j), 5).unwrap()).collect();
        for i in 0..400 {
            let (s, b) = sample_candidate(&field, 3, 1, i);
            let fast = candidate_holds(&field, 3, s, &b, &roots);
            match check_condition_b(&field, 3, s, &b) {
                Ok(rep) => assert_eq!(fast, rep.holds()),
                Err(_) => assert!(!fast),
            }
        }
    }

    #[test]
    fn search_argument_errors() {
        let field = f(5);
        assert_eq!(
            search_condition_b(&field, 2, &SearchOptions::exhaustive()).unwrap_err(),
            SearchError::BadK { k: 2, q: 5 }
        );
        assert_eq!(
            search_condition_b(&field, 5, &SearchOptions::exhaustive()).unwrap_err(),
            SearchError::BadK { k: 5, q: 5 }
        );
        let mut opts = SearchOptions::randomized(10, 0);
        opts.seed = None;
        assert_eq!(search_condition_b(&field, 3, &opts).unwrap_err(), SearchError::MissingSeed);
    }

    #[test]
    fn checkpoint_resume_matches_fresh_run() {
        let field = f(5);
        let path = std::env::temp_dir().join(format!("mdslab-ckpt-{}.jsonl", std::process::id()));
        let _ = std::fs::remove_file(&path);
        let mut opts = SearchOptions::exhaustive();
        opts.strategy = Strategy::Direct;
        opts.checkpoint = Some(path.clone());
        let first = search_condition_b(&field, 4, &opts).unwrap();
        let lines = std::fs::read_to_string(&path).unwrap().lines().count();
        assert_eq!(lines, projective_count(5, 5) as usize);
        let resumed = search_condition_b(&field, 4, &opts).unwrap();
        assert_eq!(first, SearchReport { elapsed_ms: first.elapsed_ms, ..resumed });
        std::fs::remove_file(&path).unwrap();
    }

    #[test]
    fn subspace_enumeration_counts() {
        for (q, n, d) in [(2u32, 2usize, 1usize), (3, 3, 1), (4, 4, 2), (3, 4, 2), (2, 4, 3)] {
            let subs = all_subspaces(&f(q), n, d);
            assert_eq!(subs.len() as u64, subspace_count(q, n, d));
            let mut sorted = subs.clone();
            sorted.dedup();
            assert_eq!(sorted.len(), subs.len());
            assert!(subs.iter().all(|s| s.dim() == d));
        }
        assert_eq!(subspace_count(4, 4, 2), 357);
    }

    #[test]
    fn stmt4_small_cases() {
        for q in [2u32, 3] {
            let r = brute_force_stmt4(&f(q), 2).unwrap();
            assert!(r.witness.is_none(), "q = {q}");
        }
        let r = brute_force_stmt4(&f(3), 2).unwrap();
        assert_eq!(r.subspaces, 13);
        assert_eq!(r.pairs_checked, 13 * 12);
        let r = brute_force_stmt4(&f(4), 3).unwrap();
        assert!(r.witness.is_some() && r.reverified);
        assert!(matches!(brute_force_stmt4(&f(5), 2), Err(SearchError::TooLarge { .. })));
    }

    #[test]
    fn stmt2_small_cases() {
        let r = exhaustive_stmt2(&f(2), 2).unwrap();
        assert!(r.counterexample.is_none());
        assert_eq!(r.matrices_checked, 256);
        let r = exhaustive_stmt2(&f(3), 2).unwrap();
        assert!(r.counterexample.is_none());
        assert_eq!(r.matrices_checked, 3u64.pow(10));
        assert!(matches!(exhaustive_stmt2(&f(4), 2), Err(SearchError::TooLarge { .. })));
    }
}
