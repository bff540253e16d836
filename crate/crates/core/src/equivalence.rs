//! Executable forms of the equivalent statements and the transformations
//! between them.
//!
//! * [`stmt2_witness`]: a row combination of a `k x (q+2)` matrix with at
//!   least `k` zeros.
//! * [`normalize_first_two`]: left-multiplication sending the first two
//!   columns to `e1`, `e2`.
//! * [`yz_from_t`] / [`t_from_yz`] / [`check_condition_a`]: the subspace
//!   pair `(Y, Z)` of `P_q` attached to the right `k x q` block and the five
//!   root-count conditions on it.
//! * [`mds_to_dual_witness`] / [`check_dual_conditions`]: the same data read
//!   as coefficient vectors of degree `< s`, tested against spans of root
//!   vectors `r_a = [1, a, ..., a^{s-1}]`.
//! * [`check_condition_b`]: `s - k + 2` columns appended to the dimension-`s`
//!   Reed–Solomon code.

use serde::Serialize;
use thiserror::Error;

use crate::codes::{first_dependent_subset, is_mds_codewords, CodeError, CodeMatrix};
use crate::combinat::{next_subset, Subsets};
use crate::field::{FieldCtx, Gf};
use crate::linalg::{inverse, kernel, rank, LinalgError, Matrix, Subspace};
use crate::polyspace::{evaluate_rows, interpolate_rows, subspace_violator, PolyError, PolyFn};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EquivError {
    #[error("bad shape: {0}")]
    BadShape(String),
    #[error("the first two columns are linearly dependent")]
    DependentPair,
    #[error("the right k x q block has rank {rank} < {k}")]
    RankDeficient { rank: usize, k: usize },
    #[error("bad subspace dimensions: {0}")]
    BadDims(String),
    #[error("root vector length s = {s} outside 1..={q}")]
    BadS { s: usize, q: u32 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Code(#[from] CodeError),
}

fn check_wide(mp: &Matrix) -> Result<usize, EquivError> {
    let q = mp.field().order();
    let k = mp.rows();
    if mp.cols() != q + 2 {
        return Err(EquivError::BadShape(format!(
            "expected {} columns (q + 2), got {}",
            q + 2,
            mp.cols()
        )));
    }
    if k < 2 || k > q {
        return Err(EquivError::BadShape(format!("k = {k} outside 2..={q}")));
    }
    Ok(k)
}

/// A non-zero coefficient vector whose row combination of `mp` has at
/// least `k` zeros, first in projective-lex order; `None` when `mp` is MDS.
pub fn stmt2_witness(mp: &Matrix) -> Result<Option<Vec<Gf>>, EquivError> {
    check_wide(mp)?;
    let code = CodeMatrix::new(mp.clone())?;
    Ok(is_mds_codewords(&code).combination)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normalized {
    /// Invertible `k x k` matrix with `L v = e1`, `L w = e2`.
    pub l: Matrix,
    /// `L * M'`
    pub matrix: Matrix,
}

/// Extends `{v, w}` to a basis with standard vectors taken in index order
/// and inverts it.
pub fn normalize_first_two(mp: &Matrix) -> Result<Normalized, EquivError> {
    let field = mp.field();
    let k = mp.rows();
    if mp.cols() < 2 || k < 2 {
        return Err(EquivError::BadShape(format!("{}x{} matrix", k, mp.cols())));
    }
    let mut cols = vec![mp.column(0), mp.column(1)];
    if rank(&Matrix::from_columns(field, k, &cols)?) < 2 {
        return Err(EquivError::DependentPair);
    }
    for i in 0..k {
        if cols.len() == k {
            break;
        }
        let mut e = vec![Gf::ZERO; k];
        e[i] = Gf::ONE;
        cols.push(e);
        if rank(&Matrix::from_columns(field, k, &cols)?) < cols.len() {
            cols.pop();
        }
    }
    let basis = Matrix::from_columns(field, k, &cols)?;
    let l = inverse(&basis)?.expect("columns were kept only when independent");
    let matrix = l.mul(mp)?;
    Ok(Normalized { l, matrix })
}

/// `(Y_T, Z_T)`: the spans of the interpolated rows without row 1 and
/// without row 2 respectively.
pub fn yz_from_t(t: &Matrix) -> Result<(Subspace, Subspace), EquivError> {
    let q = t.field().order();
    let k = t.rows();
    if t.cols() != q || k < 2 || k > q {
        return Err(EquivError::BadShape(format!(
            "expected k x {q} with 2 <= k <= {q}, got {}x{}",
            k,
            t.cols()
        )));
    }
    let r = rank(t);
    if r < k {
        return Err(EquivError::RankDeficient { rank: r, k });
    }
    let coeffs = interpolate_rows(t)?;
    let without = |skip: usize| {
        let idx: Vec<usize> = (0..k).filter(|&i| i != skip).collect();
        Subspace::from_rows(&coeffs.select_rows(&idx))
    };
    Ok((without(0), without(1)))
}

/// Rebuilds `T = [z ; y ; N]` (as value rows) from a pair `(Y, Z)`.
pub fn t_from_yz(y: &Subspace, z: &Subspace) -> Result<Matrix, EquivError> {
    let field = y.field();
    let q = field.order();
    if y.ambient_dim() != q || z.ambient_dim() != q {
        return Err(EquivError::BadDims(format!("subspaces must live in P_{q}")));
    }
    let d = y.dim();
    if d == 0 || z.dim() != d {
        return Err(EquivError::BadDims(format!("dim Y = {}, dim Z = {}", d, z.dim())));
    }
    let span = y.span_union(z)?;
    if span.dim() != d + 1 {
        return Err(EquivError::BadDims(format!(
            "dim <Y, Z> = {} but needs {}",
            span.dim(),
            d + 1
        )));
    }
    let meet = y.intersect(z)?;
    let outside = |s: &Subspace| -> Result<Vec<Gf>, EquivError> {
        for v in s.vectors() {
            if !meet.contains(&v)? {
                return Ok(v);
            }
        }
        unreachable!("dim S exceeds dim(Y ∩ Z)")
    };
    let mut rows = vec![outside(z)?, outside(y)?];
    rows.extend(meet.vectors());
    let coeffs = Matrix::from_rows(field, q, &rows)?;
    Ok(evaluate_rows(&coeffs)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ConditionA {
    /// `dim <Y, Z> = k`, `dim Y = dim Z = k - 1`
    Dimensions,
    /// `<Y, Z> ⊂ O_{k-1}`
    SpanInOk1,
    /// `Y ⊂ O_{k-2}`
    YInOk2,
    /// `Z ⊂ O_{k-2}`
    ZInOk2,
    /// `Y ∩ Z ⊂ O_{k-3}`
    MeetInOk3,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionAViolation {
    pub condition: ConditionA,
    pub poly: Option<PolyFn>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionAReport {
    pub dims_ok: bool,
    pub span_in_ok1: bool,
    pub y_in_ok2: bool,
    pub z_in_ok2: bool,
    pub meet_in_ok3: bool,
    /// First failing condition, present iff some flag is false.
    pub witness: Option<ConditionAViolation>,
}

impl ConditionAReport {
    /// All five conditions hold: the pair is a counterexample witness.
    pub fn all_hold(&self) -> bool {
        self.witness.is_none()
    }
}

pub fn check_condition_a(y: &Subspace, z: &Subspace, k: usize) -> Result<ConditionAReport, EquivError> {
    let q = y.field().order();
    if y.ambient_dim() != q || z.ambient_dim() != q {
        return Err(EquivError::BadDims(format!("subspaces must live in P_{q}")));
    }
    if k < 2 {
        return Err(EquivError::BadShape(format!("k = {k} < 2")));
    }
    let k = k as i64;
    let span = y.span_union(z)?;
    let meet = y.intersect(z)?;
    let dims_ok = span.dim() as i64 == k && y.dim() as i64 == k - 1 && z.dim() as i64 == k - 1;
    let span_v = subspace_violator(&span, k - 1)?;
    let y_v = subspace_violator(y, k - 2)?;
    let z_v = subspace_violator(z, k - 2)?;
    let meet_v = subspace_violator(&meet, k - 3)?;
    let witness = if !dims_ok {
        Some(ConditionAViolation {
            condition: ConditionA::Dimensions,
            poly: None,
        })
    } else {
        [
            (ConditionA::SpanInOk1, &span_v),
            (ConditionA::YInOk2, &y_v),
            (ConditionA::ZInOk2, &z_v),
            (ConditionA::MeetInOk3, &meet_v),
        ]
        .into_iter()
        .find_map(|(c, v)| {
            v.as_ref().map(|p| ConditionAViolation {
                condition: c,
                poly: Some(p.clone()),
            })
        })
    };
    Ok(ConditionAReport {
        dims_ok,
        span_in_ok1: span_v.is_none(),
        y_in_ok2: y_v.is_none(),
        z_in_ok2: z_v.is_none(),
        meet_in_ok3: meet_v.is_none(),
        witness,
    })
}

/// `r_a = [1, a, ..., a^{s-1}]`: a polynomial of degree `< s` vanishes at
/// `a` iff its coefficient vector is orthogonal to `r_a`.
pub fn root_vector(field: &FieldCtx, a: Gf, s: usize) -> Result<Vec<Gf>, EquivError> {
    if s == 0 || s > field.order() {
        return Err(EquivError::BadS { s, q: field.q() });
    }
    let mut out = Vec::with_capacity(s);
    let mut x = Gf::ONE;
    for _ in 0..s {
        out.push(x);
        x = field.mul(x, a);
    }
    Ok(out)
}

/// `s x q` matrix whose columns are the root vectors of all field elements:
/// the dimension-`s` Reed–Solomon code.
pub fn root_matrix(field: &FieldCtx, s: usize) -> Result<Matrix, EquivError> {
    let cols: Vec<Vec<Gf>> = field
        .elements()
        .into_iter()
        .map(|a| root_vector(field, a, s))
        .collect::<Result<_, _>>()?;
    Ok(Matrix::from_columns(field, s, &cols)?)
}

fn root_span(field: &FieldCtx, s: usize, subset: &[usize]) -> Result<Subspace, EquivError> {
    let vecs: Vec<Vec<Gf>> = subset
        .iter()
        .map(|&j| root_vector(field, field.element(j), s))
        .collect::<Result<_, _>>()?;
    Ok(Subspace::from_vectors(field, s, &vecs)?)
}

/// The perp-space data attached to a `k x (q+2)` matrix `[v w | M]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualWitness {
    /// One more than the largest degree among the interpolated rows of `M`.
    pub s: usize,
    pub xperp: Subspace,
    pub yperp: Subspace,
    pub zperp: Subspace,
    /// `Yperp = <Xperp, y_col>`
    pub y_col: Vec<Gf>,
    /// `Zperp = <Xperp, z_col>`
    pub z_col: Vec<Gf>,
    /// `[0, ..., 0, 1]`
    pub p_vec: Vec<Gf>,
}

impl DualWitness {
    pub fn k(&self) -> usize {
        self.s - self.xperp.dim()
    }
}

pub fn mds_to_dual_witness(mp: &Matrix, k: usize) -> Result<DualWitness, EquivError> {
    let kk = check_wide(mp)?;
    if kk != k {
        return Err(EquivError::BadShape(format!("matrix has {kk} rows, k = {k}")));
    }
    let field = mp.field();
    let q = field.order();
    let v = mp.column(0);
    let w = mp.column(1);
    if rank(&Matrix::from_columns(field, k, &[v.clone(), w.clone()])?) < 2 {
        return Err(EquivError::DependentPair);
    }
    let t = mp.select_columns(&(2..q + 2).collect::<Vec<_>>());
    let r = rank(&t);
    if r < k {
        return Err(EquivError::RankDeficient { rank: r, k });
    }
    let coeffs = interpolate_rows(&t)?;
    let s = (0..k)
        .filter_map(|i| coeffs.row(i).iter().rposition(|c| !c.is_zero()))
        .max()
        .expect("rank k rows are non-zero")
        + 1;
    let x_rows = coeffs.select_columns(&(0..s).collect::<Vec<_>>());
    let x = Subspace::from_rows(&x_rows);
    // combinations a with a·v = 0 (resp. a·w = 0)
    let annihilating = |col: &[Gf]| -> Result<Subspace, EquivError> {
        let a = kernel(&Matrix::from_rows(field, k, &[col.to_vec()])?);
        Ok(Subspace::from_rows(&a.mul(&x_rows)?))
    };
    let y = annihilating(&v)?;
    let z = annihilating(&w)?;
    let xperp = x.perp();
    let yperp = y.perp();
    let zperp = z.perp();
    let generator = |big: &Subspace| -> Result<Vec<Gf>, EquivError> {
        for b in big.vectors() {
            let mut res = xperp.reduce(&b)?;
            if field.normalize_projective(&mut res) {
                return Ok(res);
            }
        }
        unreachable!("Yperp strictly contains Xperp")
    };
    let y_col = generator(&yperp)?;
    let z_col = generator(&zperp)?;
    let mut p_vec = vec![Gf::ZERO; s];
    p_vec[s - 1] = Gf::ONE;
    Ok(DualWitness {
        s,
        xperp,
        yperp,
        zperp,
        y_col,
        z_col,
        p_vec,
    })
}

/// Which translated condition failed, with the offending field-element subset.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum DualBullet {
    /// `X` meets `<r_A>^⊥`, `|A| = k`
    X(Vec<usize>),
    /// `Y` meets `<r_A>^⊥`, `|A| = k - 1`
    Y(Vec<usize>),
    /// `Z` meets `<r_A>^⊥`, `|A| = k - 1`
    Z(Vec<usize>),
    /// `Y ∩ Z` meets `<r_A>^⊥`, `|A| = k - 2`
    Meet(Vec<usize>),
    /// `p` lies in `X^⊥`
    P,
}

impl DualBullet {
    pub fn index(&self) -> usize {
        match self {
            DualBullet::X(_) => 0,
            DualBullet::Y(_) | DualBullet::Z(_) => 1,
            DualBullet::Meet(_) => 2,
            DualBullet::P => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualCheck {
    pub holds: bool,
    pub failing: Option<DualBullet>,
}

/// Subset size, space to test, and the bullet reported on failure.
type BulletCheck<'a> = (usize, &'a Subspace, fn(Vec<usize>) -> DualBullet);

fn check_dual_with(
    w: &DualWitness,
    k: usize,
    disjoint: impl Fn(&Subspace, &Subspace) -> Result<bool, EquivError>,
    spaces: [&Subspace; 4],
) -> Result<DualCheck, EquivError> {
    let field = w.xperp.field();
    let q = field.order();
    let [x, y, z, meet] = spaces;
    let mut order: Vec<BulletCheck> = vec![
        (k, x, DualBullet::X),
        (k - 1, y, DualBullet::Y),
        (k - 1, z, DualBullet::Z),
    ];
    if k >= 2 {
        order.push((k - 2, meet, DualBullet::Meet));
    }
    for (size, space, tag) in order {
        for subset in Subsets::new(q, size) {
            let r = root_span(field, w.s, &subset)?;
            if !disjoint(space, &r)? {
                return Ok(DualCheck {
                    holds: false,
                    failing: Some(tag(subset)),
                });
            }
        }
    }
    if w.xperp.contains(&w.p_vec)? {
        return Ok(DualCheck {
            holds: false,
            failing: Some(DualBullet::P),
        });
    }
    Ok(DualCheck {
        holds: true,
        failing: None,
    })
}

fn validate_dual(w: &DualWitness, k: usize) -> Result<(), EquivError> {
    if w.k() != k || k < 2 || k > w.s {
        return Err(EquivError::BadShape(format!(
            "witness has s = {}, dim Xperp = {}, incompatible with k = {k}",
            w.s,
            w.xperp.dim()
        )));
    }
    Ok(())
}

/// Checks the disjointness conditions in their primal form: `X`, `Y`, `Z`,
/// `Y ∩ Z` against the perp spaces `<r_A>^⊥`, plus `p ∉ X^⊥`.
pub fn check_dual_conditions(w: &DualWitness, k: usize) -> Result<DualCheck, EquivError> {
    validate_dual(w, k)?;
    let x = w.xperp.perp();
    let y = w.yperp.perp();
    let z = w.zperp.perp();
    let meet = y.intersect(&z)?;
    check_dual_with(
        w,
        k,
        |space, r| Ok(space.is_disjoint_from(&r.perp())?),
        [&x, &y, &z, &meet],
    )
}

/// The same conditions after taking perps: `Xperp`, `Yperp`, `Zperp` and
/// `<Yperp, Zperp>` against the root spans `<r_A>` themselves.
pub fn check_dual_conditions_dualized(w: &DualWitness, k: usize) -> Result<DualCheck, EquivError> {
    validate_dual(w, k)?;
    let joint = w.yperp.span_union(&w.zperp)?;
    check_dual_with(
        w,
        k,
        |space, r| Ok(space.is_disjoint_from(r)?),
        [&w.xperp, &w.yperp, &w.zperp, &joint],
    )
}

/// A column of `R ∪ B` in a condition-B certificate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ColumnRef {
    /// `b_i` for `i < s - k`
    Basis(usize),
    /// `r_a` for the `j`-th field element
    Reed(usize),
    /// `b_{s-k+i}`, `i` in `{0, 1}`
    Extra(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ConditionBFailure {
    /// An `s x s` submatrix containing the first `s - k` columns of `B` is singular.
    Singular { columns: Vec<ColumnRef> },
    /// `B ∪ {e_s}` is dependent; coefficients over `b_1, ..., b_{s-k+2}, e_s`.
    Dependent { coefficients: Vec<Gf> },
    /// `s - k + 3 > s` vectors cannot be independent (`k = 2`).
    Unsatisfiable,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionBReport {
    pub submatrices_ok: bool,
    /// `None` when condition (b) is unsatisfiable.
    pub extension_ok: Option<bool>,
    /// First failure: submatrix condition before the independence condition.
    pub failure: Option<ConditionBFailure>,
}

impl ConditionBReport {
    pub fn holds(&self) -> bool {
        self.failure.is_none()
    }
}

fn validate_b(field: &FieldCtx, k: usize, s: usize, b: &[Vec<Gf>]) -> Result<(), EquivError> {
    let q = field.order();
    if k < 2 || s <= k || s > q {
        return Err(EquivError::BadShape(format!("need 2 <= k < s <= q, got k = {k}, s = {s}, q = {q}")));
    }
    if b.len() != s - k + 2 {
        return Err(EquivError::BadShape(format!("expected {} columns in B, got {}", s - k + 2, b.len())));
    }
    if let Some(col) = b.iter().find(|c| c.len() != s) {
        return Err(EquivError::BadShape(format!("column of length {} in F_q^{s}", col.len())));
    }
    for (i, c) in b.iter().enumerate() {
        if c.iter().any(|x| !field.contains(*x)) {
            return Err(EquivError::Linalg(LinalgError::EncodingOutOfRange(
                c.iter().find(|x| !field.contains(**x)).unwrap().0,
            )));
        }
        if b[..i].contains(c) {
            return Err(EquivError::BadShape(format!("column {i} of B repeats an earlier column")));
        }
    }
    Ok(())
}

/// Checks the condition-B properties of `B = (b_1, ..., b_{s-k+2})`
/// against the dimension-`s` Reed–Solomon code by direct `s x s` rank
/// computations.
pub fn check_condition_b(field: &FieldCtx, k: usize, s: usize, b: &[Vec<Gf>]) -> Result<ConditionBReport, EquivError> {
    validate_b(field, k, s, b)?;
    let q = field.order();
    let nb = s - k;
    let mut free: Vec<Vec<Gf>> = (0..q)
        .map(|j| root_vector(field, field.element(j), s))
        .collect::<Result<_, _>>()?;
    free.push(b[nb].clone());
    free.push(b[nb + 1].clone());
    let free_ref = |j: usize| if j < q { ColumnRef::Reed(j) } else { ColumnRef::Extra(j - q) };

    let mut singular = None;
    let mut idx: Vec<usize> = (0..k).collect();
    let mut buf = vec![Gf::ZERO; s * s];
    loop {
        // columns as rows: rank is transpose-invariant
        for (r, col) in b[..nb].iter().enumerate() {
            buf[r * s..(r + 1) * s].copy_from_slice(col);
        }
        for (r, &j) in idx.iter().enumerate() {
            buf[(nb + r) * s..(nb + r + 1) * s].copy_from_slice(&free[j]);
        }
        if crate::linalg::rank_in_place(field, &mut buf, s, s) < s {
            let mut columns: Vec<ColumnRef> = (0..nb).map(ColumnRef::Basis).collect();
            columns.extend(idx.iter().map(|&j| free_ref(j)));
            singular = Some(ConditionBFailure::Singular { columns });
            break;
        }
        if !next_subset(&mut idx, q + 2) {
            break;
        }
    }

    let (extension_ok, dependency) = if k == 2 {
        (None, Some(ConditionBFailure::Unsatisfiable))
    } else {
        let mut cols = b.to_vec();
        let mut e = vec![Gf::ZERO; s];
        e[s - 1] = Gf::ONE;
        cols.push(e);
        let m = Matrix::from_columns(field, s, &cols)?;
        let ker = kernel(&m);
        if ker.rows() == 0 {
            (Some(true), None)
        } else {
            let mut coefficients = ker.row(0).to_vec();
            field.normalize_projective(&mut coefficients);
            (Some(false), Some(ConditionBFailure::Dependent { coefficients }))
        }
    };
    Ok(ConditionBReport {
        submatrices_ok: singular.is_none(),
        extension_ok,
        failure: singular.or(dependency),
    })
}

/// `G = X [R | y | z]` where the rows of `X` span the annihilator of the
/// first `s - k` columns of `B`. Returns `None` when those columns are
/// dependent. `[b_1..b_{s-k} | S]` is invertible iff `X S` is, so the
/// submatrix condition on `B` is exactly the MDS property of `G`.
pub fn condition_b_code(field: &FieldCtx, k: usize, s: usize, b: &[Vec<Gf>]) -> Result<Option<(Matrix, Matrix)>, EquivError> {
    validate_b(field, k, s, b)?;
    let nb = s - k;
    let basis = Matrix::from_rows(field, s, &b[..nb])?;
    if rank(&basis) < nb {
        return Ok(None);
    }
    let x = kernel(&basis);
    let mut cols = crate::codes::columns_of(&root_matrix(field, s)?);
    cols.push(b[nb].clone());
    cols.push(b[nb + 1].clone());
    let g = x.mul(&Matrix::from_columns(field, s, &cols)?)?;
    Ok(Some((x, g)))
}

/// Condition B evaluated through [`condition_b_code`]: `G` must be MDS and
/// `X y, X z, X e_s` independent.
pub fn condition_b_holds_fast(field: &FieldCtx, k: usize, s: usize, b: &[Vec<Gf>]) -> Result<bool, EquivError> {
    if k == 2 {
        validate_b(field, k, s, b)?;
        return Ok(false);
    }
    let Some((x, g)) = condition_b_code(field, k, s, b)? else {
        return Ok(false);
    };
    let q = field.order();
    let mut e = vec![Gf::ZERO; s];
    e[s - 1] = Gf::ONE;
    let images = vec![g.column(q), g.column(q + 1), x.apply(&e)];
    if rank(&Matrix::from_columns(field, k, &images)?) < 3 {
        return Ok(false);
    }
    Ok(first_dependent_subset(field, &crate::codes::columns_of(&g), k).is_none())
}
