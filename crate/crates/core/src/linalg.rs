//! Dense matrices and canonical subspaces over a [`FieldCtx`].
//!
//! A [`Subspace`] is stored as the reduced row echelon form of a basis, so
//! two subspaces are equal exactly when their basis matrices are equal.
//! Intersections are computed from a left kernel of the stacked bases, not
//! through perp spaces, which keeps the perp identities independently
//! testable.

use std::fmt;

use thiserror::Error;

use crate::field::{FieldCtx, Gf};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("subspaces live in different ambient spaces ({0} vs {1})")]
    AmbientMismatch(usize, usize),
    #[error("vector of length {got} given for ambient dimension {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("encoding {0} is not an element of the field")]
    EncodingOutOfRange(u32),
    #[error("operands are defined over different fields")]
    FieldMismatch,
}

/// Dense row-major matrix over a finite field.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: FieldCtx,
    rows: usize,
    cols: usize,
    data: Vec<Gf>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix {}x{} over F_{} [", self.rows, self.cols, self.field.q())?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(r).iter().map(|x| x.0.to_string()).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

impl std::hash::Hash for Matrix {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.rows.hash(state);
        self.cols.hash(state);
        self.data.hash(state);
    }
}

impl Matrix {
    pub fn new(field: &FieldCtx, rows: usize, cols: usize, data: Vec<Gf>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::ShapeMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|x| !field.contains(**x)) {
            return Err(LinalgError::EncodingOutOfRange(bad.0));
        }
        Ok(Self {
            field: field.clone(),
            rows,
            cols,
            data,
        })
    }

    pub fn zeros(field: &FieldCtx, rows: usize, cols: usize) -> Self {
        Self {
            field: field.clone(),
            rows,
            cols,
            data: vec![Gf::ZERO; rows * cols],
        }
    }

    pub fn identity(field: &FieldCtx, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, Gf::ONE);
        }
        m
    }

    /// Builds a matrix from equal-length rows. An empty slice gives a `0 x cols` matrix.
    pub fn from_rows(field: &FieldCtx, cols: usize, rows: &[Vec<Gf>]) -> Result<Self, LinalgError> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(LinalgError::ShapeMismatch(format!(
                    "row of length {} in a matrix with {cols} columns",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Self::new(field, rows.len(), cols, data)
    }

    /// Convenience constructor from raw encodings.
    pub fn from_u32(field: &FieldCtx, rows: &[&[u32]]) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows: Vec<Vec<Gf>> = rows.iter().map(|r| r.iter().map(|&x| Gf(x)).collect()).collect();
        Self::from_rows(field, cols, &rows)
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(field: &FieldCtx, rows: usize, columns: &[Vec<Gf>]) -> Result<Self, LinalgError> {
        let mut m = Self::zeros(field, rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(LinalgError::ShapeMismatch(format!(
                    "column of length {} in a matrix with {rows} rows",
                    c.len()
                )));
            }
            for (i, &x) in c.iter().enumerate() {
                if !field.contains(x) {
                    return Err(LinalgError::EncodingOutOfRange(x.0));
                }
                m.set(i, j, x);
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn field(&self) -> &FieldCtx {
        &self.field
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn data(&self) -> &[Gf] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Gf {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Gf) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[Gf] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Gf> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn row_vecs(&self) -> Vec<Vec<Gf>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn to_u32_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(|x| x.0).collect())
            .collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(&self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn mul(&self, rhs: &Matrix) -> Result<Matrix, LinalgError> {
        if self.field != rhs.field {
            return Err(LinalgError::FieldMismatch);
        }
        if self.cols != rhs.rows {
            return Err(LinalgError::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let f = &self.field;
        let mut out = Matrix::zeros(f, self.rows, rhs.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let cur = out.get(i, j);
                    out.set(i, j, f.mul_add(cur, a, rhs.get(l, j)));
                }
            }
        }
        Ok(out)
    }

    /// `v^T M` for a row vector `v` of length `rows`.
    pub fn left_apply(&self, v: &[Gf]) -> Vec<Gf> {
        debug_assert_eq!(v.len(), self.rows);
        let f = &self.field;
        let mut out = vec![Gf::ZERO; self.cols];
        for (r, &a) in v.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (o, &x) in out.iter_mut().zip(self.row(r)) {
                *o = f.mul_add(*o, a, x);
            }
        }
        out
    }

    /// `M v` for a column vector `v` of length `cols`.
    pub fn apply(&self, v: &[Gf]) -> Vec<Gf> {
        debug_assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|r| self.field.dot(self.row(r), v)).collect()
    }

    pub fn select_columns(&self, idx: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(&self.field, self.rows, idx.len());
        for r in 0..self.rows {
            for (j, &c) in idx.iter().enumerate() {
                m.set(r, j, self.get(r, c));
            }
        }
        m
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &r in idx {
            data.extend_from_slice(self.row(r));
        }
        Matrix {
            field: self.field.clone(),
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    /// `[self | rhs]`
    pub fn hstack(&self, rhs: &Matrix) -> Result<Matrix, LinalgError> {
        if self.rows != rhs.rows {
            return Err(LinalgError::ShapeMismatch("hstack row counts differ".into()));
        }
        let mut m = Matrix::zeros(&self.field, self.rows, self.cols + rhs.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.set(r, c, self.get(r, c));
            }
            for c in 0..rhs.cols {
                m.set(r, self.cols + c, rhs.get(r, c));
            }
        }
        Ok(m)
    }

    /// `[self ; rhs]`
    pub fn vstack(&self, rhs: &Matrix) -> Result<Matrix, LinalgError> {
        if self.cols != rhs.cols {
            return Err(LinalgError::ShapeMismatch("vstack column counts differ".into()));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&rhs.data);
        Ok(Matrix {
            field: self.field.clone(),
            rows: self.rows + rhs.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }
}

/// Reduces `data` (a `rows x cols` row-major block) to reduced row echelon
/// form in place and returns the pivot columns. Pivots are the first
/// non-zero entry in column scan order.
pub fn rref_in_place(f: &FieldCtx, data: &mut [Gf], rows: usize, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(sel) = (r..rows).find(|&i| !data[i * cols + c].is_zero()) else {
            continue;
        };
        if sel != r {
            for j in 0..cols {
                data.swap(sel * cols + j, r * cols + j);
            }
        }
        let inv = f.inv_nz(data[r * cols + c]);
        if inv != Gf::ONE {
            for j in c..cols {
                data[r * cols + j] = f.mul(data[r * cols + j], inv);
            }
        }
        for i in 0..rows {
            if i == r {
                continue;
            }
            let factor = data[i * cols + c];
            if factor.is_zero() {
                continue;
            }
            let neg = f.neg(factor);
            for j in c..cols {
                let v = data[r * cols + j];
                if !v.is_zero() {
                    data[i * cols + j] = f.mul_add(data[i * cols + j], neg, v);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Rank of a `rows x cols` block, destroying its contents (forward elimination only).
pub fn rank_in_place(f: &FieldCtx, data: &mut [Gf], rows: usize, cols: usize) -> usize {
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(sel) = (r..rows).find(|&i| !data[i * cols + c].is_zero()) else {
            continue;
        };
        if sel != r {
            for j in c..cols {
                data.swap(sel * cols + j, r * cols + j);
            }
        }
        let inv = f.neg(f.inv_nz(data[r * cols + c]));
        for i in r + 1..rows {
            let a = data[i * cols + c];
            if a.is_zero() {
                continue;
            }
            let factor = f.mul(a, inv);
            for j in c..cols {
                let v = data[r * cols + j];
                if !v.is_zero() {
                    data[i * cols + j] = f.mul_add(data[i * cols + j], factor, v);
                }
            }
        }
        r += 1;
    }
    r
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub matrix: Matrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

pub fn rref(m: &Matrix) -> Rref {
    let mut out = m.clone();
    let pivots = rref_in_place(&m.field, &mut out.data, m.rows, m.cols);
    Rref {
        rank: pivots.len(),
        matrix: out,
        pivots,
    }
}

pub fn rank(m: &Matrix) -> usize {
    let mut data = m.data.clone();
    rank_in_place(&m.field, &mut data, m.rows, m.cols)
}

pub fn is_invertible(m: &Matrix) -> Result<bool, LinalgError> {
    if m.rows != m.cols {
        return Err(LinalgError::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    Ok(rank(m) == m.rows)
}

/// Inverse of a square matrix, or `None` when singular.
pub fn inverse(m: &Matrix) -> Result<Option<Matrix>, LinalgError> {
    if m.rows != m.cols {
        return Err(LinalgError::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let n = m.rows;
    let aug = m.hstack(&Matrix::identity(&m.field, n))?;
    let r = rref(&aug);
    if r.pivots.iter().take(n).enumerate().any(|(i, &p)| p != i) || r.rank < n {
        return Ok(None);
    }
    let idx: Vec<usize> = (n..2 * n).collect();
    Ok(Some(r.matrix.select_columns(&idx)))
}

/// Basis (as rows) of the right kernel `{x : M x = 0}`.
pub fn kernel(m: &Matrix) -> Matrix {
    let f = &m.field;
    let r = rref(m);
    let free: Vec<usize> = (0..m.cols).filter(|c| !r.pivots.contains(c)).collect();
    let mut out = Matrix::zeros(f, free.len(), m.cols);
    for (row, &fc) in free.iter().enumerate() {
        out.set(row, fc, Gf::ONE);
        for (i, &pc) in r.pivots.iter().enumerate() {
            out.set(row, pc, f.neg(r.matrix.get(i, fc)));
        }
    }
    out
}

/// A subspace of `F_q^d`, stored canonically as an RREF basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    basis: Matrix,
    pivots: Vec<usize>,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Subspace(dim {} in F_{}^{}: {:?})",
            self.dim(),
            self.basis.field.q(),
            self.ambient_dim(),
            self.basis.to_u32_rows()
        )
    }
}

impl Subspace {
    /// The row span of `m`.
    pub fn from_rows(m: &Matrix) -> Subspace {
        let r = rref(m);
        let basis = r.matrix.select_rows(&(0..r.rank).collect::<Vec<_>>());
        Subspace {
            basis,
            pivots: r.pivots,
        }
    }

    pub fn from_vectors(field: &FieldCtx, ambient: usize, vectors: &[Vec<Gf>]) -> Result<Subspace, LinalgError> {
        Ok(Self::from_rows(&Matrix::from_rows(field, ambient, vectors)?))
    }

    pub fn zero(field: &FieldCtx, ambient: usize) -> Subspace {
        Subspace {
            basis: Matrix::zeros(field, 0, ambient),
            pivots: Vec::new(),
        }
    }

    pub fn full(field: &FieldCtx, ambient: usize) -> Subspace {
        Subspace {
            basis: Matrix::identity(field, ambient),
            pivots: (0..ambient).collect(),
        }
    }

    #[inline]
    pub fn field(&self) -> &FieldCtx {
        &self.basis.field
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.basis.rows
    }

    #[inline]
    pub fn ambient_dim(&self) -> usize {
        self.basis.cols
    }

    /// The RREF basis, one row per basis vector.
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    fn check_ambient(&self, other: &Subspace) -> Result<(), LinalgError> {
        if self.ambient_dim() != other.ambient_dim() {
            return Err(LinalgError::AmbientMismatch(self.ambient_dim(), other.ambient_dim()));
        }
        if self.field() != other.field() {
            return Err(LinalgError::FieldMismatch);
        }
        Ok(())
    }

    /// `<Y, Z>`
    pub fn span_union(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check_ambient(other)?;
        Ok(Subspace::from_rows(&self.basis.vstack(&other.basis)?))
    }

    /// `Y ∩ Z`, from the left kernel of the stacked bases.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check_ambient(other)?;
        let f = self.field();
        let stacked = self.basis.vstack(&other.basis)?;
        let coeffs = kernel(&stacked.transpose());
        let a = self.dim();
        let mut vectors = Vec::with_capacity(coeffs.rows());
        for r in 0..coeffs.rows() {
            let c = &coeffs.row(r)[..a];
            vectors.push(self.basis.left_apply(c));
        }
        Subspace::from_vectors(f, self.ambient_dim(), &vectors)
    }

    /// `{w : w·v = 0 for all v}` under the standard dot product.
    pub fn perp(&self) -> Subspace {
        Subspace::from_rows(&kernel(&self.basis))
    }

    /// Reduces `v` against the basis; the residue is zero iff `v` is in the span.
    pub fn reduce(&self, v: &[Gf]) -> Result<Vec<Gf>, LinalgError> {
        if v.len() != self.ambient_dim() {
            return Err(LinalgError::LengthMismatch {
                expected: self.ambient_dim(),
                got: v.len(),
            });
        }
        let f = self.field();
        let mut out = v.to_vec();
        for (i, &pc) in self.pivots.iter().enumerate() {
            let c = out[pc];
            if c.is_zero() {
                continue;
            }
            let neg = f.neg(c);
            for (o, &b) in out.iter_mut().zip(self.basis.row(i)) {
                *o = f.mul_add(*o, neg, b);
            }
        }
        Ok(out)
    }

    pub fn contains(&self, v: &[Gf]) -> Result<bool, LinalgError> {
        Ok(self.reduce(v)?.iter().all(|x| x.is_zero()))
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> Result<bool, LinalgError> {
        self.check_ambient(other)?;
        for r in 0..self.dim() {
            if !other.contains(self.basis.row(r))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// True iff the two subspaces meet only in the zero vector.
    pub fn is_disjoint_from(&self, other: &Subspace) -> Result<bool, LinalgError> {
        self.check_ambient(other)?;
        Ok(rank(&self.basis.vstack(&other.basis)?) == self.dim() + other.dim())
    }

    /// Basis vectors as owned rows.
    pub fn vectors(&self) -> Vec<Vec<Gf>> {
        self.basis.row_vecs()
    }
}
