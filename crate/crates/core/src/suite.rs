//! Seeded cross-statement property checks. Each check draws its trials from
//! per-trial streams of a ChaCha generator, so outcomes depend only on
//! `(q, k, trials, seed)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::codes::{extended_rs, hyperoval_code, is_mds_codewords, is_mds_minors, CodeMatrix};
use crate::combinat::ProjectivePoints;
use crate::equivalence::{
    check_condition_a, check_dual_conditions, mds_to_dual_witness, normalize_first_two, root_vector,
    stmt2_witness, t_from_yz, yz_from_t,
};
use crate::field::{FieldCtx, Gf};
use crate::linalg::{rank, Matrix, Subspace};
use crate::polyspace::PolyFn;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropertyOutcome {
    pub property: String,
    pub q: u32,
    pub k: usize,
    pub trials: u64,
    pub passed: u64,
    pub failed: u64,
    /// Trials in which the tested equivalence held with both sides true.
    pub true_cases: u64,
    pub first_failure: Option<String>,
}

impl PropertyOutcome {
    pub fn ok(&self) -> bool {
        self.failed == 0 && self.passed == self.trials
    }
}

/// Per-trial result: `Ok((agree, true_case))` or a description of an error.
type Trial = Result<(bool, bool), String>;

fn run(
    property: &str,
    field: &FieldCtx,
    k: usize,
    trials: u64,
    seed: u64,
    salt: u64,
    trial: impl Fn(&mut ChaCha8Rng, u64) -> Trial + Sync,
) -> PropertyOutcome {
    let base = seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    let results: Vec<Trial> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(base);
            rng.set_stream(i);
            trial(&mut rng, i)
        })
        .collect();
    let mut out = PropertyOutcome {
        property: property.to_string(),
        q: field.q(),
        k,
        trials,
        passed: 0,
        failed: 0,
        true_cases: 0,
        first_failure: None,
    };
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok((true, t)) => {
                out.passed += 1;
                out.true_cases += t as u64;
            }
            Ok((false, _)) | Err(_) => {
                out.failed += 1;
                if out.first_failure.is_none() {
                    let why = match r {
                        Err(e) => e,
                        _ => "sides disagree".to_string(),
                    };
                    out.first_failure = Some(format!("trial {i}: {why}"));
                }
            }
        }
    }
    out
}

pub fn random_matrix(rng: &mut impl Rng, field: &FieldCtx, rows: usize, cols: usize) -> Matrix {
    let data = (0..rows * cols).map(|_| Gf(rng.gen_range(0..field.q()))).collect();
    Matrix::new(field, rows, cols, data).expect("sizes agree")
}

pub fn random_full_rank(rng: &mut impl Rng, field: &FieldCtx, rows: usize, cols: usize) -> Matrix {
    loop {
        let m = random_matrix(rng, field, rows, cols);
        if rank(&m) == rows.min(cols) {
            return m;
        }
    }
}

/// A random `k x (q+2)` matrix whose first two columns are independent and
/// whose right `k x q` block has rank `k`.
fn random_wide(rng: &mut impl Rng, field: &FieldCtx, k: usize) -> Matrix {
    let q = field.order();
    loop {
        let m = random_matrix(rng, field, k, q + 2);
        let head = m.select_columns(&[0, 1]);
        let t = m.select_columns(&(2..q + 2).collect::<Vec<_>>());
        if rank(&head) == 2 && rank(&t) == k {
            return m;
        }
    }
}

/// A random MDS matrix of width `n <= q + 1`: distinct columns of the
/// extended Reed–Solomon code, rescaled and mixed by an invertible matrix.
pub fn random_mds(rng: &mut impl Rng, field: &FieldCtx, k: usize, n: usize) -> Matrix {
    let ext = extended_rs(field, k).expect("2 <= k <= q");
    let mut idx: Vec<usize> = (0..field.order() + 1).collect();
    for i in (1..idx.len()).rev() {
        idx.swap(i, rng.gen_range(0..=i));
    }
    let mut cols: Vec<Vec<Gf>> = idx[..n].iter().map(|&c| ext.matrix().column(c)).collect();
    for col in &mut cols {
        let c = Gf(rng.gen_range(1..field.q()));
        for x in col.iter_mut() {
            *x = field.mul(*x, c);
        }
    }
    let base = Matrix::from_columns(field, k, &cols).expect("length k");
    random_full_rank(rng, field, k, k).mul(&base).expect("k x k times k x n")
}

fn rows_str(m: &Matrix) -> String {
    format!("{:?}", m.to_u32_rows())
}

/// Statement-(2) witness existence is unchanged by normalizing the first two columns.
pub fn normalization_invariance(field: &FieldCtx, k: usize, trials: u64, seed: u64) -> PropertyOutcome {
    run("normalization-invariance", field, k, trials, seed, 1, |rng, _| {
        let m = random_wide(rng, field, k);
        let before = stmt2_witness(&m).map_err(|e| e.to_string())?.is_some();
        let n = normalize_first_two(&m).map_err(|e| e.to_string())?;
        let after = stmt2_witness(&n.matrix).map_err(|e| e.to_string())?.is_some();
        if before != after {
            return Err(format!("witness {before} vs {after} for {}", rows_str(&m)));
        }
        Ok((true, !before))
    })
}

/// `[e1 e2 | T]` has no statement-(2) witness iff `(Y_T, Z_T)` meets all
/// five subspace conditions.
pub fn condition_a_correspondence(field: &FieldCtx, k: usize, trials: u64, seed: u64) -> PropertyOutcome {
    let q = field.order();
    run("condition-a-correspondence", field, k, trials, seed, 2, |rng, _| {
        let t = random_full_rank(rng, field, k, q);
        let mut m = Matrix::zeros(field, k, q + 2);
        m.set(0, 0, Gf::ONE);
        m.set(1, 1, Gf::ONE);
        for r in 0..k {
            for c in 0..q {
                m.set(r, c + 2, t.get(r, c));
            }
        }
        let mds = stmt2_witness(&m).map_err(|e| e.to_string())?.is_none();
        let (y, z) = yz_from_t(&t).map_err(|e| e.to_string())?;
        let all = check_condition_a(&y, &z, k).map_err(|e| e.to_string())?.all_hold();
        if mds != all {
            return Err(format!("MDS {mds}, condition A {all} for T = {}", rows_str(&t)));
        }
        Ok((true, mds))
    })
}

/// The hyperoval with its two extension columns moved to the front.
pub fn hyperoval_front(field: &FieldCtx) -> Option<Matrix> {
    let h = hyperoval_code(field).ok()?;
    let q = field.order();
    let mut order = vec![q, q + 1];
    order.extend(0..q);
    Some(h.matrix().select_columns(&order))
}

/// The MDS property agrees with the translated disjointness conditions.
/// For `q = 4, k = 3` trial 0 is the hyperoval.
pub fn dual_soundness(field: &FieldCtx, k: usize, trials: u64, seed: u64) -> PropertyOutcome {
    let special = if k == 3 { hyperoval_front(field) } else { None };
    run("dual-soundness", field, k, trials, seed, 3, |rng, i| {
        let m = match (&special, i) {
            (Some(h), 0) => h.clone(),
            _ => random_wide(rng, field, k),
        };
        let mds = is_mds_minors(&CodeMatrix::new(m.clone()).map_err(|e| e.to_string())?).mds;
        let w = mds_to_dual_witness(&m, k).map_err(|e| e.to_string())?;
        let holds = check_dual_conditions(&w, k).map_err(|e| e.to_string())?.holds;
        if mds != holds {
            return Err(format!("MDS {mds}, dual conditions {holds} for {}", rows_str(&m)));
        }
        Ok((true, mds))
    })
}

/// `yz_from_t(t_from_yz(Y, Z)) = (Y, Z)` for random admissible pairs.
pub fn round_trip(field: &FieldCtx, k: usize, trials: u64, seed: u64) -> PropertyOutcome {
    let q = field.order();
    run("round-trip", field, k, trials, seed, 4, |rng, _| {
        let c = random_full_rank(rng, field, k, q);
        let without = |skip: usize| {
            let idx: Vec<usize> = (0..k).filter(|&i| i != skip).collect();
            Subspace::from_rows(&c.select_rows(&idx))
        };
        let (y, z) = (without(0), without(1));
        let t = t_from_yz(&y, &z).map_err(|e| e.to_string())?;
        let back = yz_from_t(&t).map_err(|e| e.to_string())?;
        Ok((back == (y, z), true))
    })
}

/// Largest `q^s` for which the lemma is checked on every coefficient
/// vector; beyond it the check runs on the monomial basis, which settles
/// the remaining vectors by linearity.
pub const LEMMA_EXHAUSTIVE_LIMIT: u64 = 1 << 16;

/// For every `s <= q` and every `a`: a polynomial of degree `< s` vanishes
/// at `a` iff its coefficient vector is orthogonal to `r_a`, and in fact
/// `f(a) = c . r_a`.
pub fn root_lemma(field: &FieldCtx) -> PropertyOutcome {
    let q = field.order();
    let mut out = PropertyOutcome {
        property: "root-orthogonality".into(),
        q: field.q(),
        k: 0,
        trials: 0,
        passed: 0,
        failed: 0,
        true_cases: 0,
        first_failure: None,
    };
    for s in 1..=q {
        let roots: Vec<(Gf, Vec<Gf>)> = field
            .elements()
            .into_iter()
            .map(|a| (a, root_vector(field, a, s).expect("s <= q")))
            .collect();
        let exhaustive = (field.q() as u64).checked_pow(s as u32).is_some_and(|n| n <= LEMMA_EXHAUSTIVE_LIMIT);
        let vectors: Box<dyn Iterator<Item = Vec<Gf>>> = if exhaustive {
            Box::new(std::iter::once(vec![Gf::ZERO; s]).chain(ProjectivePoints::new(field.q(), s).flat_map(
                move |v| {
                    (1..field.q()).map(move |c| v.iter().map(|&x| field.mul(x, Gf(c))).collect::<Vec<Gf>>())
                },
            )))
        } else {
            Box::new((0..s).map(move |j| {
                let mut e = vec![Gf::ZERO; s];
                e[j] = Gf::ONE;
                e
            }))
        };
        for c in vectors {
            let p = PolyFn::new(field, &c).expect("s <= q");
            for (a, r) in &roots {
                out.trials += 1;
                let value = p.evaluate(*a);
                if value == field.dot(&c, r) {
                    out.passed += 1;
                    out.true_cases += value.is_zero() as u64;
                } else {
                    out.failed += 1;
                    if out.first_failure.is_none() {
                        out.first_failure = Some(format!("s = {s}, a = {}, c = {:?}", a.0, c));
                    }
                }
            }
        }
    }
    out
}

/// Minors and codeword MDS verifiers agree; odd trials use a planted MDS
/// matrix when `n <= q + 1`.
pub fn oracle_agreement(field: &FieldCtx, k: usize, n: usize, trials: u64, seed: u64) -> PropertyOutcome {
    let q = field.order();
    let mut out = run("oracle-agreement", field, k, trials, seed ^ ((n as u64) << 32), 5, |rng, i| {
        let m = if i % 2 == 1 && n <= q + 1 {
            random_mds(rng, field, k, n)
        } else {
            random_matrix(rng, field, k, n)
        };
        let code = CodeMatrix::new(m.clone()).map_err(|e| e.to_string())?;
        let a = is_mds_minors(&code).mds;
        let b = is_mds_codewords(&code).mds;
        if a != b {
            return Err(format!("minors {a}, codewords {b} for {}", rows_str(&m)));
        }
        Ok((true, a))
    });
    out.property = format!("oracle-agreement n={n}");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(q: u32) -> FieldCtx {
        FieldCtx::of_order(q).unwrap()
    }

    #[test]
    fn small_suites_pass() {
        for q in [3u32, 4, 5] {
            let field = f(q);
            for k in 2..=3 {
                assert!(normalization_invariance(&field, k, 40, 1).ok());
                assert!(condition_a_correspondence(&field, k, 40, 1).ok());
                assert!(dual_soundness(&field, k, 20, 1).ok());
                assert!(round_trip(&field, k, 40, 1).ok());
            }
        }
    }

    #[test]
    fn hyperoval_is_a_true_case() {
        let out = dual_soundness(&f(4), 3, 5, 0);
        assert!(out.ok());
        assert!(out.true_cases >= 1);
    }

    #[test]
    fn planted_mds_matrices_are_mds() {
        let field = f(7);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 3..=8 {
            let m = random_mds(&mut rng, &field, 3, n);
            assert!(is_mds_minors(&CodeMatrix::new(m).unwrap()).mds);
        }
    }

    #[test]
    fn outcomes_are_reproducible() {
        let field = f(5);
        assert_eq!(oracle_agreement(&field, 3, 6, 50, 8), oracle_agreement(&field, 3, 6, 50, 8));
        let out = oracle_agreement(&field, 3, 6, 50, 8);
        assert!(out.ok() && out.true_cases > 0);
    }

    #[test]
    fn lemma_small_fields() {
        for q in [2u32, 3, 4] {
            let out = root_lemma(&f(q));
            assert!(out.ok(), "{out:?}");
        }
    }
}
