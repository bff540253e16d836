//! Generator matrices of Reed–Solomon, extended Reed–Solomon and hyperoval
//! codes, and two independent MDS verifiers.
//!
//! [`is_mds_minors`] checks every `k`-subset of columns for invertibility.
//! [`is_mds_codewords`] looks at row combinations instead: a `k x n`
//! matrix is MDS iff no non-zero combination of its rows has `k` or more
//! zero entries.

use thiserror::Error;

use crate::combinat::{next_subset, projective_count, projective_first, projective_next};
use crate::field::{FieldCtx, Gf};
use crate::linalg::{inverse, kernel, rank_in_place, Matrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodeError {
    #[error("dimension k = {k} outside 2..={q}")]
    BadK { k: usize, q: u32 },
    #[error("width {n} is smaller than the dimension {k}")]
    TooNarrow { n: usize, k: usize },
    #[error("hyperoval codes need characteristic 2")]
    OddCharacteristic,
    #[error("hyperoval codes need q >= 4")]
    FieldTooSmall,
    #[error("matrix is not MDS: columns {0:?} are dependent")]
    NotMds(Vec<usize>),
}

/// A `k x n` generator matrix with `2 <= k <= q` and `n >= k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CodeMatrix(Matrix);

impl CodeMatrix {
    pub fn new(m: Matrix) -> Result<Self, CodeError> {
        let q = m.field().q();
        let k = m.rows();
        if k < 2 || k > q as usize {
            return Err(CodeError::BadK { k, q });
        }
        if m.cols() < k {
            return Err(CodeError::TooNarrow { n: m.cols(), k });
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn field(&self) -> &FieldCtx {
        self.0.field()
    }

    pub fn k(&self) -> usize {
        self.0.rows()
    }

    pub fn n(&self) -> usize {
        self.0.cols()
    }
}

fn check_k(field: &FieldCtx, k: usize) -> Result<(), CodeError> {
    if k < 2 || k > field.order() {
        Err(CodeError::BadK { k, q: field.q() })
    } else {
        Ok(())
    }
}

fn power_column(field: &FieldCtx, a: Gf, k: usize) -> Vec<Gf> {
    let mut col = Vec::with_capacity(k);
    let mut x = Gf::ONE;
    for _ in 0..k {
        col.push(x);
        x = field.mul(x, a);
    }
    col
}

/// `k x q` matrix whose column `j` is `[1, a, ..., a^{k-1}]` for the `j`-th element `a`.
pub fn rs_code(field: &FieldCtx, k: usize) -> Result<CodeMatrix, CodeError> {
    check_k(field, k)?;
    let cols: Vec<Vec<Gf>> = field
        .elements()
        .into_iter()
        .map(|a| power_column(field, a, k))
        .collect();
    CodeMatrix::new(Matrix::from_columns(field, k, &cols).expect("well-formed columns"))
}

/// Reed–Solomon with `[0, ..., 0, 1]` appended.
pub fn extended_rs(field: &FieldCtx, k: usize) -> Result<CodeMatrix, CodeError> {
    let rs = rs_code(field, k)?;
    let mut tail = vec![Gf::ZERO; k];
    tail[k - 1] = Gf::ONE;
    let ext = rs
        .matrix()
        .hstack(&Matrix::from_columns(field, k, &[tail]).expect("column"))
        .expect("same row count");
    CodeMatrix::new(ext)
}

/// Conic `[1, a, a^2]` plus nucleus `[0, 1, 0]` and `[0, 0, 1]`: a
/// `3 x (q+2)` MDS code for even `q`.
pub fn hyperoval_code(field: &FieldCtx) -> Result<CodeMatrix, CodeError> {
    if field.p() != 2 {
        return Err(CodeError::OddCharacteristic);
    }
    if field.q() < 4 {
        return Err(CodeError::FieldTooSmall);
    }
    let mut cols: Vec<Vec<Gf>> = field
        .elements()
        .into_iter()
        .map(|a| power_column(field, a, 3))
        .collect();
    cols.push(vec![Gf::ZERO, Gf::ONE, Gf::ZERO]);
    cols.push(vec![Gf::ZERO, Gf::ZERO, Gf::ONE]);
    CodeMatrix::new(Matrix::from_columns(field, 3, &cols).expect("well-formed columns"))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinorsVerdict {
    pub mds: bool,
    /// Lexicographically smallest dependent `k`-subset of columns.
    pub dependent: Option<Vec<usize>>,
}

/// Column-major copy of a matrix, one `k`-vector per column.
pub(crate) fn columns_of(m: &Matrix) -> Vec<Vec<Gf>> {
    (0..m.cols()).map(|c| m.column(c)).collect()
}

/// First `k`-subset (lexicographic) of `columns` that is linearly dependent.
pub(crate) fn first_dependent_subset(field: &FieldCtx, columns: &[Vec<Gf>], k: usize) -> Option<Vec<usize>> {
    let n = columns.len();
    if n < k {
        return None;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let mut buf = vec![Gf::ZERO; k * k];
    loop {
        // rows of buf are the chosen columns: rank is transpose-invariant
        for (r, &c) in idx.iter().enumerate() {
            buf[r * k..(r + 1) * k].copy_from_slice(&columns[c]);
        }
        if rank_in_place(field, &mut buf, k, k) < k {
            return Some(idx);
        }
        if !next_subset(&mut idx, n) {
            return None;
        }
    }
}

pub fn is_mds_minors(c: &CodeMatrix) -> MinorsVerdict {
    let cols = columns_of(c.matrix());
    let dependent = first_dependent_subset(c.field(), &cols, c.k());
    MinorsVerdict {
        mds: dependent.is_none(),
        dependent,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodewordVerdict {
    pub mds: bool,
    /// Projective-lex smallest coefficient vector whose row combination has `>= k` zeros.
    pub combination: Option<Vec<Gf>>,
}

/// How [`is_mds_codewords_via`] finds low-weight combinations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CodewordRoute {
    /// Walk every projective coefficient vector.
    Enumerate,
    /// Walk the left kernels of every `(k-1)`-subset of columns; each
    /// combination with `k` zeros vanishes on some such subset.
    Kernel,
}

/// Above this many projective combinations the kernel route is used.
pub const ENUMERATION_LIMIT: u64 = 1 << 20;

pub fn is_mds_codewords(c: &CodeMatrix) -> CodewordVerdict {
    let route = if projective_count(c.field().q(), c.k()) <= ENUMERATION_LIMIT {
        CodewordRoute::Enumerate
    } else {
        CodewordRoute::Kernel
    };
    is_mds_codewords_via(c, route)
}

fn zero_count(field: &FieldCtx, coef: &[Gf], cols: &[Vec<Gf>]) -> usize {
    cols.iter().filter(|col| field.dot(coef, col).is_zero()).count()
}

pub fn is_mds_codewords_via(c: &CodeMatrix, route: CodewordRoute) -> CodewordVerdict {
    let field = c.field();
    let k = c.k();
    let cols = columns_of(c.matrix());
    let combination = match route {
        CodewordRoute::Enumerate => {
            let mut coef = projective_first(k);
            loop {
                if zero_count(field, &coef, &cols) >= k {
                    break Some(coef);
                }
                if !projective_next(field.q(), &mut coef) {
                    break None;
                }
            }
        }
        CodewordRoute::Kernel => {
            let mut best: Option<Vec<Gf>> = None;
            let n = cols.len();
            let mut idx: Vec<usize> = (0..k - 1).collect();
            loop {
                let sub = c.matrix().select_columns(&idx);
                let left = kernel(&sub.transpose());
                let d = left.rows();
                let mut mix = projective_first(d);
                loop {
                    let mut coef = left.left_apply(&mix);
                    field.normalize_projective(&mut coef);
                    let better = best.as_ref().is_none_or(|b| coef < *b);
                    if better && zero_count(field, &coef, &cols) >= k {
                        best = Some(coef);
                    }
                    if !projective_next(field.q(), &mut mix) {
                        break;
                    }
                }
                if !next_subset(&mut idx, n) {
                    break;
                }
            }
            best
        }
    };
    CodewordVerdict {
        mds: combination.is_none(),
        combination,
    }
}

/// Every projective column `c` such that `[C | c]` is still MDS, in
/// lexicographic order.
///
/// The search runs in systematic form `[I | P]`, where an admissible
/// column has no zero coordinate and avoids one ratio per `2 x 2` minor
/// with a column of `P`; survivors are then checked against every
/// `(k-1)`-subset.
pub fn extension_columns(c: &CodeMatrix) -> Result<Vec<Vec<Gf>>, CodeError> {
    if let Some(dep) = is_mds_minors(c).dependent {
        return Err(CodeError::NotMds(dep));
    }
    let field = c.field();
    let k = c.k();
    let m = c.matrix();
    let head = m.select_columns(&(0..k).collect::<Vec<_>>());
    let to_sys = inverse(&head).expect("square").expect("MDS head is invertible");
    let sys = to_sys.mul(m).expect("shapes agree");
    let sys_cols = columns_of(&sys);
    let parity: Vec<Vec<Gf>> = sys_cols[k..].to_vec();

    let mut found = Vec::new();
    let mut cand = vec![Gf::ONE; k];
    extend_coords(field, &parity, &sys_cols, &mut cand, 1, &mut found);

    let mut out: Vec<Vec<Gf>> = found
        .into_iter()
        .map(|sys_col| {
            let mut col = head.apply(&sys_col);
            field.normalize_projective(&mut col);
            col
        })
        .collect();
    out.sort();
    out.dedup();
    Ok(out)
}

fn extend_coords(
    field: &FieldCtx,
    parity: &[Vec<Gf>],
    all: &[Vec<Gf>],
    cand: &mut Vec<Gf>,
    pos: usize,
    found: &mut Vec<Vec<Gf>>,
) {
    let k = cand.len();
    if pos == k {
        let mut cols = all.to_vec();
        cols.push(cand.clone());
        if extension_is_mds(field, &cols, k) {
            found.push(cand.clone());
        }
        return;
    }
    'value: for v in 1..field.q() {
        let v = Gf(v);
        for p in parity {
            for a in 0..pos {
                // p[a] * c[pos] - p[pos] * c[a] must not vanish
                let lhs = field.mul(p[a], v);
                let rhs = field.mul(p[pos], cand[a]);
                if lhs == rhs {
                    continue 'value;
                }
            }
        }
        cand[pos] = v;
        extend_coords(field, parity, all, cand, pos + 1, found);
    }
    cand[pos] = Gf::ONE;
}

/// Checks only the `k`-subsets that include the last column.
fn extension_is_mds(field: &FieldCtx, cols: &[Vec<Gf>], k: usize) -> bool {
    let n = cols.len() - 1;
    let last = &cols[n];
    let mut idx: Vec<usize> = (0..k - 1).collect();
    let mut buf = vec![Gf::ZERO; k * k];
    loop {
        for (r, &c) in idx.iter().enumerate() {
            buf[r * k..(r + 1) * k].copy_from_slice(&cols[c]);
        }
        buf[(k - 1) * k..].copy_from_slice(last);
        if rank_in_place(field, &mut buf, k, k) < k {
            return false;
        }
        if !next_subset(&mut idx, n) {
            return true;
        }
    }
}

/// Generator of the dual code: a basis of the row-space perp.
pub fn dual_code(c: &CodeMatrix) -> Result<CodeMatrix, CodeError> {
    let ker = kernel(c.matrix());
    CodeMatrix::new(ker)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinat::ProjectivePoints;

    fn f(q: u32) -> FieldCtx {
        FieldCtx::of_order(q).unwrap()
    }

    fn code(field: &FieldCtx, rows: &[&[u32]]) -> CodeMatrix {
        CodeMatrix::new(Matrix::from_u32(field, rows).unwrap()).unwrap()
    }

    #[test]
    fn rs_examples() {
        let f3 = f(3);
        assert_eq!(rs_code(&f3, 2).unwrap().matrix().to_u32_rows(), vec![vec![1, 1, 1], vec![0, 1, 2]]);
        let f5 = f(5);
        let rs = rs_code(&f5, 2).unwrap();
        for a in 0..5 {
            assert_eq!(rs.matrix().column(a), vec![Gf(1), Gf(a as u32)]);
        }
        let f4 = f(4);
        let rs = rs_code(&f4, 3).unwrap();
        assert_eq!(rs.matrix().column(2), vec![Gf(1), Gf(2), Gf(3)]);
        assert_eq!(rs_code(&f4, 5).unwrap_err(), CodeError::BadK { k: 5, q: 4 });
        assert_eq!(rs_code(&f4, 1).unwrap_err(), CodeError::BadK { k: 1, q: 4 });
    }

    #[test]
    fn extended_examples() {
        assert_eq!(
            extended_rs(&f(3), 2).unwrap().matrix().to_u32_rows(),
            vec![vec![1, 1, 1, 0], vec![0, 1, 2, 1]]
        );
        assert_eq!(
            extended_rs(&f(2), 2).unwrap().matrix().to_u32_rows(),
            vec![vec![1, 1, 0], vec![0, 1, 1]]
        );
        for q in [2u32, 3, 4, 5] {
            assert_eq!(extended_rs(&f(q), 2).unwrap().n(), q as usize + 1);
        }
    }

    #[test]
    fn hyperoval_examples() {
        let h4 = hyperoval_code(&f(4)).unwrap();
        assert_eq!((h4.k(), h4.n()), (3, 6));
        assert!(is_mds_minors(&h4).mds);
        assert!(is_mds_minors(&hyperoval_code(&f(8)).unwrap()).mds);
        assert_eq!(hyperoval_code(&f(5)).unwrap_err(), CodeError::OddCharacteristic);
        assert_eq!(hyperoval_code(&f(2)).unwrap_err(), CodeError::FieldTooSmall);
    }

    #[test]
    fn minors_examples() {
        assert!(is_mds_minors(&rs_code(&f(5), 2).unwrap()).mds);
        let f2 = f(2);
        assert!(is_mds_minors(&code(&f2, &[&[1, 0, 1], &[0, 1, 1]])).mds);
        let f5 = f(5);
        let v = is_mds_minors(&code(&f5, &[&[1, 2, 1, 3], &[0, 4, 0, 1]]));
        assert!(!v.mds);
        assert_eq!(v.dependent, Some(vec![0, 2]));
    }

    #[test]
    fn codeword_examples() {
        assert!(is_mds_codewords(&extended_rs(&f(3), 2).unwrap()).mds);
        let f2 = f(2);
        let v = is_mds_codewords(&code(&f2, &[&[1, 0, 1, 1], &[0, 1, 1, 0]]));
        assert!(!v.mds);
        assert_eq!(v.combination, Some(vec![Gf(0), Gf(1)]));
        assert_eq!(
            CodeMatrix::new(Matrix::from_u32(&f2, &[&[1, 1, 1]]).unwrap()).unwrap_err(),
            CodeError::BadK { k: 1, q: 2 }
        );
    }

    #[test]
    fn codeword_routes_agree() {
        let mut seed = 4242u64;
        for q in [2u32, 3, 4, 5, 7] {
            let field = f(q);
            for k in 2..=3usize.min(q as usize) {
                for n in k..=q as usize + 2 {
                    for _ in 0..40 {
                        let data: Vec<Gf> = (0..k * n)
                            .map(|_| {
                                seed = seed.wrapping_mul(6364136223846793005).wrapping_add(11);
                                Gf(((seed >> 33) % q as u64) as u32)
                            })
                            .collect();
                        let c = CodeMatrix::new(Matrix::new(&field, k, n, data).unwrap()).unwrap();
                        let a = is_mds_codewords_via(&c, CodewordRoute::Enumerate);
                        let b = is_mds_codewords_via(&c, CodewordRoute::Kernel);
                        assert_eq!(a, b, "{c:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn large_rs_uses_kernel_route() {
        let field = f(13);
        let rs = extended_rs(&field, 13).unwrap();
        assert!(projective_count(13, 13) > ENUMERATION_LIMIT);
        assert!(is_mds_codewords(&rs).mds);
    }

    fn brute_extensions(c: &CodeMatrix) -> Vec<Vec<Gf>> {
        let field = c.field();
        ProjectivePoints::new(field.q(), c.k())
            .filter(|col| {
                let ext = c
                    .matrix()
                    .hstack(&Matrix::from_columns(field, c.k(), std::slice::from_ref(col)).unwrap())
                    .unwrap();
                is_mds_minors(&CodeMatrix::new(ext).unwrap()).mds
            })
            .collect()
    }

    #[test]
    fn extension_examples() {
        let e3 = vec![Gf(0), Gf(0), Gf(1)];
        let rs5 = rs_code(&f(5), 3).unwrap();
        assert_eq!(brute_extensions(&rs5), vec![e3.clone()]);
        assert_eq!(extension_columns(&rs5).unwrap(), vec![e3.clone()]);
        let rs7 = rs_code(&f(7), 3).unwrap();
        assert_eq!(extension_columns(&rs7).unwrap(), vec![e3.clone()]);
        assert_eq!(brute_extensions(&rs7), vec![e3]);
        let ext5 = extended_rs(&f(5), 3).unwrap();
        assert!(extension_columns(&ext5).unwrap().is_empty());
        assert!(brute_extensions(&ext5).is_empty());
    }

    #[test]
    fn extension_matches_brute_force_on_small_codes() {
        for q in [3u32, 4, 5, 7, 8] {
            let field = f(q);
            for k in 2..=(q as usize).min(4) {
                let rs = rs_code(&field, k).unwrap();
                assert_eq!(extension_columns(&rs).unwrap(), brute_extensions(&rs), "q={q} k={k}");
            }
            if q % 2 == 0 && q >= 4 {
                let h = rs_code(&field, 3).unwrap();
                assert_eq!(extension_columns(&h).unwrap().len(), 2, "conic has nucleus and infinity");
            }
        }
    }

    #[test]
    fn extension_rejects_non_mds() {
        let f3 = f(3);
        let c = code(&f3, &[&[1, 1, 0], &[1, 1, 1]]);
        assert_eq!(extension_columns(&c).unwrap_err(), CodeError::NotMds(vec![0, 1]));
    }

    #[test]
    fn dual_of_mds_is_mds() {
        let h = hyperoval_code(&f(8)).unwrap();
        let d = dual_code(&h).unwrap();
        assert_eq!((d.k(), d.n()), (7, 10));
        assert!(is_mds_minors(&d).mds);
    }
}
