//! Polynomial functions `P_q = F_q[x]/(x^q - x)` and the root-count
//! filtration `O_n`.
//!
//! A [`PolyFn`] always carries exactly `q` coefficients. Evaluation points
//! are taken in the field's canonical enumeration order, which fixes the
//! correspondence between length-`q` value vectors and functions.

use thiserror::Error;

use crate::combinat::{projective_first, projective_next};
use crate::field::{FieldCtx, Gf};
use crate::linalg::{Matrix, Subspace};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("the zero polynomial has every element as a root")]
    ZeroPolynomial,
    #[error("subspace of F_q^{got} is not a subspace of P_q (dimension {expected})")]
    AmbientMismatch { expected: usize, got: usize },
}

/// An element of `P_q`, `coeffs[i]` being the coefficient of `x^i`.
#[derive(Clone, PartialEq, Eq)]
pub struct PolyFn {
    field: FieldCtx,
    coeffs: Vec<Gf>,
}

impl std::fmt::Debug for PolyFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PolyFn({})", self)
    }
}

impl std::fmt::Display for PolyFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut terms = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let coef = if *c == Gf::ONE && i > 0 { String::new() } else { c.0.to_string() };
            let sep = if coef.is_empty() || i == 0 { "" } else { "*" };
            terms.push(match i {
                0 => coef,
                1 => format!("{coef}{sep}x"),
                _ => format!("{coef}{sep}x^{i}"),
            });
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl PolyFn {
    /// Coefficients are padded with zeros up to length `q`.
    pub fn new(field: &FieldCtx, coeffs: &[Gf]) -> Result<Self, PolyError> {
        let q = field.order();
        if coeffs.len() > q {
            return Err(PolyError::LengthMismatch {
                expected: q,
                got: coeffs.len(),
            });
        }
        let mut c = coeffs.to_vec();
        c.resize(q, Gf::ZERO);
        Ok(Self {
            field: field.clone(),
            coeffs: c,
        })
    }

    pub fn zero(field: &FieldCtx) -> Self {
        Self {
            field: field.clone(),
            coeffs: vec![Gf::ZERO; field.order()],
        }
    }

    /// `c * x^deg`
    pub fn monomial(field: &FieldCtx, deg: usize, c: Gf) -> Self {
        let mut p = Self::zero(field);
        p.coeffs[deg] = c;
        p
    }

    pub fn field(&self) -> &FieldCtx {
        &self.field
    }

    pub fn coeffs(&self) -> &[Gf] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    /// Horner evaluation.
    pub fn evaluate(&self, a: Gf) -> Gf {
        let f = &self.field;
        self.coeffs
            .iter()
            .rev()
            .fold(Gf::ZERO, |acc, &c| f.add(f.mul(acc, a), c))
    }

    /// Values at every field element, in enumeration order.
    pub fn values(&self) -> Vec<Gf> {
        (0..self.field.order())
            .map(|j| self.evaluate(self.field.element(j)))
            .collect()
    }

    pub fn distinct_roots(&self) -> Result<usize, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        Ok(self.values().iter().filter(|v| v.is_zero()).count())
    }

    /// Membership in `O_n`; `O_{-1}` holds only the zero polynomial.
    pub fn in_o_n(&self, n: i64) -> bool {
        match self.distinct_roots() {
            Err(PolyError::ZeroPolynomial) => true,
            Ok(r) => (r as i64) <= n,
            Err(_) => unreachable!(),
        }
    }

    pub fn scale(&self, c: Gf) -> PolyFn {
        PolyFn {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|&x| self.field.mul(x, c)).collect(),
        }
    }

    pub fn add(&self, other: &PolyFn) -> PolyFn {
        PolyFn {
            field: self.field.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| self.field.add(a, b))
                .collect(),
        }
    }
}

/// The unique `f` in `P_q` with `f(alpha_j) = values[j]`.
///
/// Uses `L_a(x) = -(x^q - x)/(x - a)`, which is 1 at `a` and 0 elsewhere
/// because the product of all non-zero field elements is `-1`.
pub fn interpolate(field: &FieldCtx, values: &[Gf]) -> Result<PolyFn, PolyError> {
    let q = field.order();
    if values.len() != q {
        return Err(PolyError::LengthMismatch {
            expected: q,
            got: values.len(),
        });
    }
    let mut acc = vec![Gf::ZERO; q];
    let mut quot = vec![Gf::ZERO; q];
    for (j, &v) in values.iter().enumerate() {
        if v.is_zero() {
            continue;
        }
        let a = field.element(j);
        // synthetic division of x^q - x by x - a
        quot[q - 1] = Gf::ONE;
        for i in (1..q).rev() {
            let c_i = if i == 1 { field.neg(Gf::ONE) } else { Gf::ZERO };
            quot[i - 1] = field.mul_add(c_i, a, quot[i]);
        }
        let scale = field.neg(v);
        for (o, &c) in acc.iter_mut().zip(&quot) {
            *o = field.mul_add(*o, scale, c);
        }
    }
    PolyFn::new(field, &acc)
}

/// Interpolates every row of a `k x q` value matrix into a `k x q` coefficient matrix.
pub fn interpolate_rows(values: &Matrix) -> Result<Matrix, PolyError> {
    let field = values.field();
    let mut rows = Vec::with_capacity(values.rows());
    for r in 0..values.rows() {
        rows.push(interpolate(field, values.row(r))?.coeffs);
    }
    Ok(Matrix::from_rows(field, field.order(), &rows).expect("interpolated rows have length q"))
}

/// Evaluates every row of a `k x q` coefficient matrix at all field elements.
pub fn evaluate_rows(coeffs: &Matrix) -> Result<Matrix, PolyError> {
    let field = coeffs.field();
    let mut rows = Vec::with_capacity(coeffs.rows());
    for r in 0..coeffs.rows() {
        rows.push(PolyFn::new(field, coeffs.row(r))?.values());
    }
    Ok(Matrix::from_rows(field, field.order(), &rows).expect("value rows have length q"))
}

/// The lexicographically first projective representative of `V` lying
/// outside `O_n`, if any.
pub fn subspace_violator(v: &Subspace, n: i64) -> Result<Option<PolyFn>, PolyError> {
    let field = v.field();
    let q = field.order();
    if v.ambient_dim() != q {
        return Err(PolyError::AmbientMismatch {
            expected: q,
            got: v.ambient_dim(),
        });
    }
    let d = v.dim();
    if d == 0 {
        return Ok(None);
    }
    if n >= q as i64 {
        return Ok(None);
    }
    let basis = v.basis();
    // evaluation is linear: combine value vectors instead of re-evaluating
    let value_rows: Vec<Vec<Gf>> = (0..d)
        .map(|r| PolyFn::new(field, basis.row(r)).map(|p| p.values()))
        .collect::<Result<_, _>>()?;
    let mut coef = projective_first(d);
    let mut vals = vec![Gf::ZERO; q];
    loop {
        vals.iter_mut().for_each(|x| *x = Gf::ZERO);
        for (c, row) in coef.iter().zip(&value_rows) {
            if c.is_zero() {
                continue;
            }
            for (o, &x) in vals.iter_mut().zip(row) {
                *o = field.mul_add(*o, *c, x);
            }
        }
        // non-zero combinations of basis vectors are non-zero functions
        let roots = vals.iter().filter(|x| x.is_zero()).count() as i64;
        if roots > n {
            let coeffs = basis.left_apply(&coef);
            return Ok(Some(PolyFn::new(field, &coeffs)?));
        }
        if !projective_next(field.q(), &mut coef) {
            return Ok(None);
        }
    }
}

pub fn subspace_in_o_n(v: &Subspace, n: i64) -> Result<bool, PolyError> {
    Ok(subspace_violator(v, n)?.is_none())
}
