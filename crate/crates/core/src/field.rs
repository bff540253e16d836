//! Exact arithmetic in `F_q`, `q = p^m`.
//!
//! Elements are encoded as integers `e = c_0 + c_1 p + ... + c_{m-1} p^{m-1}`
//! over the polynomial basis `1, x, ..., x^{m-1}`, so the prime-field
//! encodings coincide with the residues mod `p`. The canonical enumeration
//! of the field is ascending encoding order; everything downstream that
//! labels columns by field elements uses it.
//!
//! Small fields (`q <= 256`) get full addition and multiplication tables;
//! larger ones use exp/log tables for multiplication and digit-wise
//! addition. Both are built from [`FieldCtx::mul_definitional`] and are
//! cross-checked against it in the tests.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported field order.
pub const MAX_ORDER: u32 = 1 << 20;

const FULL_TABLE_MAX: u32 = 256;

/// A field element, identified by its integer encoding.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Gf(pub u32);

impl Gf {
    pub const ZERO: Gf = Gf(0);
    pub const ONE: Gf = Gf(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Gf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("extension degree must be at least 1")]
    BadDegree,
    #[error("field order {p}^{m} exceeds the supported maximum {MAX_ORDER}")]
    TooLarge { p: u32, m: u32 },
    #[error("modulus x^m + {0:?} is not irreducible")]
    NotIrreducible(Vec<u32>),
    #[error("a modulus was supplied for a prime field")]
    NoModulusNeeded,
    #[error("modulus must have exactly {expected} coefficients in [0, p), got {got:?}")]
    BadModulus { expected: usize, got: Vec<u32> },
    #[error("division by zero")]
    DivisionByZero,
}

enum Tables {
    Full {
        add: Vec<u32>,
        mul: Vec<u32>,
    },
    Log {
        exp: Vec<u32>,
        log: Vec<u32>,
    },
}

struct FieldInner {
    p: u32,
    m: u32,
    q: u32,
    modulus: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
    tables: Tables,
}

/// An immutable finite field context. Cloning is cheap (shared handle).
#[derive(Clone)]
pub struct FieldCtx {
    inner: Arc<FieldInner>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldCtx({})", self.header())
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.p == other.inner.p
                && self.inner.m == other.inner.m
                && self.inner.modulus == other.inner.modulus)
    }
}

impl Eq for FieldCtx {}

/// Deterministic primality test by trial division.
pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` into `(p, m)` with `q = p^m`, if `q` is a prime power.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut rest = q;
    let mut m = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        m += 1;
    }
    (rest == 1).then_some((p, m))
}

// Polynomials over F_p as little-endian coefficient vectors.

fn poly_trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn inv_mod_p(a: u32, p: u32) -> u32 {
    // p is prime and a != 0: a^(p-2)
    let mut result = 1u64;
    let mut base = a as u64 % p as u64;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    result as u32
}

/// Remainder of `a` modulo the non-zero polynomial `b`.
fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let mut b = b.to_vec();
    poly_trim(&mut b);
    let db = b.len() - 1;
    let lead_inv = inv_mod_p(b[db], p) as u64;
    while r.len() > db {
        let dr = r.len() - 1;
        let factor = r[dr] as u64 * lead_inv % p as u64;
        for (i, &bc) in b.iter().enumerate() {
            let idx = dr - db + i;
            let sub = factor * bc as u64 % p as u64;
            r[idx] = ((r[idx] as u64 + p as u64 - sub) % p as u64) as u32;
        }
        poly_trim(&mut r);
    }
    r
}

fn monic_from_tail(tail: &[u32]) -> Vec<u32> {
    let mut f = tail.to_vec();
    f.push(1);
    f
}

fn digits(mut e: u32, p: u32, m: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(m as usize);
    for _ in 0..m {
        out.push(e % p);
        e /= p;
    }
    out
}

fn undigits(c: &[u32], p: u32) -> u32 {
    c.iter().rev().fold(0u32, |acc, &d| acc * p + d)
}

/// Trial division against every monic polynomial of degree `1..=m/2`.
fn is_irreducible(tail: &[u32], p: u32) -> bool {
    let m = tail.len() as u32;
    let f = monic_from_tail(tail);
    for d in 1..=m / 2 {
        let count = p.pow(d);
        for enc in 0..count {
            let g = monic_from_tail(&digits(enc, p, d));
            if poly_rem(&f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

impl FieldCtx {
    /// Builds `F_{p^m}`. Without an explicit modulus, the monic irreducible
    /// of degree `m` whose non-leading coefficients have the smallest
    /// encoding is used.
    pub fn new(p: u32, m: u32, modulus: Option<&[u32]>) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if m == 0 {
            return Err(FieldError::BadDegree);
        }
        let q = (p as u64).checked_pow(m).filter(|&q| q <= MAX_ORDER as u64);
        let Some(q) = q else {
            return Err(FieldError::TooLarge { p, m });
        };
        let q = q as u32;
        let modulus = match (m, modulus) {
            (1, Some(_)) => return Err(FieldError::NoModulusNeeded),
            (1, None) => Vec::new(),
            (_, Some(tail)) => {
                if tail.len() != m as usize || tail.iter().any(|&c| c >= p) {
                    return Err(FieldError::BadModulus {
                        expected: m as usize,
                        got: tail.to_vec(),
                    });
                }
                if !is_irreducible(tail, p) {
                    return Err(FieldError::NotIrreducible(tail.to_vec()));
                }
                tail.to_vec()
            }
            (_, None) => (0..p.pow(m))
                .map(|enc| digits(enc, p, m))
                .find(|tail| is_irreducible(tail, p))
                .expect("an irreducible polynomial of every degree exists"),
        };
        Ok(Self::build(p, m, q, modulus))
    }

    /// Prime field `F_p`.
    pub fn prime(p: u32) -> Result<Self, FieldError> {
        Self::new(p, 1, None)
    }

    /// Field of order `q` with the default modulus.
    pub fn of_order(q: u32) -> Result<Self, FieldError> {
        match prime_power(q) {
            Some((p, m)) => Self::new(p, m, None),
            None => Err(FieldError::NotPrime(q)),
        }
    }

    fn build(p: u32, m: u32, q: u32, modulus: Vec<u32>) -> Self {
        let shell = FieldInner {
            p,
            m,
            q,
            modulus,
            neg: Vec::new(),
            inv: Vec::new(),
            tables: Tables::Full {
                add: Vec::new(),
                mul: Vec::new(),
            },
        };
        let def = FieldCtx {
            inner: Arc::new(shell),
        };
        let neg: Vec<u32> = (0..q).map(|a| def.neg_definitional(Gf(a)).0).collect();
        let tables = if q <= FULL_TABLE_MAX {
            let mut add = vec![0u32; (q * q) as usize];
            let mut mul = vec![0u32; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    add[(a * q + b) as usize] = def.add_definitional(Gf(a), Gf(b)).0;
                    mul[(a * q + b) as usize] = def.mul_definitional(Gf(a), Gf(b)).0;
                }
            }
            Tables::Full { add, mul }
        } else {
            let (exp, log) = def.exp_log_tables();
            Tables::Log { exp, log }
        };
        let mut inner = Arc::try_unwrap(def.inner).ok().expect("sole owner");
        inner.neg = neg;
        inner.tables = tables;
        let mut ctx = FieldCtx {
            inner: Arc::new(inner),
        };
        let inv: Vec<u32> = (0..q)
            .map(|a| {
                if a == 0 {
                    0
                } else {
                    ctx.pow(Gf(a), (q - 2) as u64).0
                }
            })
            .collect();
        Arc::get_mut(&mut ctx.inner).expect("sole owner").inv = inv;
        ctx
    }

    fn exp_log_tables(&self) -> (Vec<u32>, Vec<u32>) {
        let q = self.q();
        let order = q - 1;
        for g in 2..q {
            let mut exp = Vec::with_capacity(order as usize);
            let mut x = Gf::ONE;
            let mut ok = true;
            for i in 0..order {
                if i > 0 && x == Gf::ONE {
                    ok = false;
                    break;
                }
                exp.push(x.0);
                x = self.mul_definitional(x, Gf(g));
            }
            if ok && x == Gf::ONE {
                let mut log = vec![0u32; q as usize];
                for (i, &e) in exp.iter().enumerate() {
                    log[e as usize] = i as u32;
                }
                return (exp, log);
            }
        }
        unreachable!("the multiplicative group of a finite field is cyclic")
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.inner.p
    }

    #[inline]
    pub fn m(&self) -> u32 {
        self.inner.m
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.inner.q
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.inner.q as usize
    }

    /// Non-leading coefficients of the modulus, little-endian; empty for `m = 1`.
    pub fn modulus(&self) -> &[u32] {
        &self.inner.modulus
    }

    /// The `j`-th element of the canonical enumeration.
    #[inline]
    pub fn element(&self, j: usize) -> Gf {
        debug_assert!(j < self.order());
        Gf(j as u32)
    }

    /// All `q` elements in ascending encoding order: `0`, `1`, then the rest.
    pub fn elements(&self) -> Vec<Gf> {
        (0..self.q()).map(Gf).collect()
    }

    #[inline]
    pub fn contains(&self, a: Gf) -> bool {
        a.0 < self.q()
    }

    /// Embeds an integer through the prime subfield.
    pub fn from_int(&self, n: i64) -> Gf {
        Gf(n.rem_euclid(self.p() as i64) as u32)
    }

    /// Coefficients of `a` in the polynomial basis.
    pub fn coefficients(&self, a: Gf) -> Vec<u32> {
        digits(a.0, self.p(), self.m())
    }

    #[inline]
    pub fn add(&self, a: Gf, b: Gf) -> Gf {
        match &self.inner.tables {
            Tables::Full { add, .. } => Gf(add[(a.0 * self.inner.q + b.0) as usize]),
            Tables::Log { .. } => self.add_definitional(a, b),
        }
    }

    #[inline]
    pub fn neg(&self, a: Gf) -> Gf {
        Gf(self.inner.neg[a.index()])
    }

    #[inline]
    pub fn sub(&self, a: Gf, b: Gf) -> Gf {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Gf, b: Gf) -> Gf {
        match &self.inner.tables {
            Tables::Full { mul, .. } => Gf(mul[(a.0 * self.inner.q + b.0) as usize]),
            Tables::Log { exp, log } => {
                if a.is_zero() || b.is_zero() {
                    Gf::ZERO
                } else {
                    let order = self.inner.q - 1;
                    let e = (log[a.index()] + log[b.index()]) % order;
                    Gf(exp[e as usize])
                }
            }
        }
    }

    /// `a + b * c`
    #[inline]
    pub fn mul_add(&self, a: Gf, b: Gf, c: Gf) -> Gf {
        self.add(a, self.mul(b, c))
    }

    pub fn inv(&self, a: Gf) -> Result<Gf, FieldError> {
        if a.is_zero() {
            Err(FieldError::DivisionByZero)
        } else {
            Ok(Gf(self.inner.inv[a.index()]))
        }
    }

    /// Inverse of a value already known to be non-zero.
    #[inline]
    pub(crate) fn inv_nz(&self, a: Gf) -> Gf {
        debug_assert!(!a.is_zero());
        Gf(self.inner.inv[a.index()])
    }

    pub fn div(&self, a: Gf, b: Gf) -> Result<Gf, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Gf, mut e: u64) -> Gf {
        let mut base = a;
        let mut acc = Gf::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Digit-wise addition mod `p`.
    pub fn add_definitional(&self, a: Gf, b: Gf) -> Gf {
        let p = self.p();
        if self.m() == 1 {
            return Gf((a.0 + b.0) % p);
        }
        let mut x = a.0;
        let mut y = b.0;
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.m() {
            out += ((x % p + y % p) % p) * place;
            x /= p;
            y /= p;
            place = place.wrapping_mul(p);
        }
        Gf(out)
    }

    pub fn neg_definitional(&self, a: Gf) -> Gf {
        let p = self.p();
        let c: Vec<u32> = self
            .coefficients(a)
            .into_iter()
            .map(|d| (p - d) % p)
            .collect();
        Gf(undigits(&c, p))
    }

    /// Schoolbook polynomial product reduced by the modulus.
    pub fn mul_definitional(&self, a: Gf, b: Gf) -> Gf {
        let p = self.p();
        let m = self.m() as usize;
        if m == 1 {
            return Gf(((a.0 as u64 * b.0 as u64) % p as u64) as u32);
        }
        let ca = self.coefficients(a);
        let cb = self.coefficients(b);
        let mut prod = vec![0u64; 2 * m - 1];
        for (i, &x) in ca.iter().enumerate() {
            for (j, &y) in cb.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p as u64;
            }
        }
        let prod: Vec<u32> = prod.into_iter().map(|c| c as u32).collect();
        let mut r = poly_rem(&prod, &monic_from_tail(&self.inner.modulus), p);
        r.resize(m, 0);
        Gf(undigits(&r, p))
    }

    /// Header line used by the matrix file format.
    pub fn header(&self) -> String {
        let mut s = format!("q={} p={} m={}", self.q(), self.p(), self.m());
        if self.m() > 1 {
            let coeffs: Vec<String> = self.modulus().iter().map(|c| c.to_string()).collect();
            s.push_str(" mod=");
            s.push_str(&coeffs.join(","));
        }
        s
    }

    /// Dot product of two equal-length vectors.
    #[inline]
    pub fn dot(&self, a: &[Gf], b: &[Gf]) -> Gf {
        debug_assert_eq!(a.len(), b.len());
        a.iter()
            .zip(b)
            .fold(Gf::ZERO, |acc, (&x, &y)| self.mul_add(acc, x, y))
    }

    /// Scales `v` so its first non-zero entry is 1. Returns false for the zero vector.
    pub fn normalize_projective(&self, v: &mut [Gf]) -> bool {
        let Some(lead) = v.iter().copied().find(|x| !x.is_zero()) else {
            return false;
        };
        if lead != Gf::ONE {
            let s = self.inv_nz(lead);
            for x in v.iter_mut() {
                *x = self.mul(*x, s);
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fields_up_to(max_q: u32) -> Vec<FieldCtx> {
        (2..=max_q)
            .filter_map(prime_power)
            .map(|(p, m)| FieldCtx::new(p, m, None).unwrap())
            .collect()
    }

    #[test]
    fn prime_field_construction() {
        let f = FieldCtx::new(5, 1, None).unwrap();
        assert_eq!((f.q(), f.p(), f.m()), (5, 5, 1));
        assert_eq!(f.mul(Gf(3), Gf(4)), Gf(2));
        assert_eq!(f.add(Gf(3), Gf(4)), Gf(2));
    }

    #[test]
    fn default_moduli() {
        assert_eq!(FieldCtx::new(2, 2, None).unwrap().modulus(), &[1, 1]);
        // x^3 + x + 1 (encoding 3) beats x^3 + x^2 + 1 (encoding 5)
        let gf8 = FieldCtx::new(2, 3, None).unwrap();
        assert_eq!(gf8.modulus(), &[1, 1, 0]);
        // irreducible cubics over F_2 by brute force: no roots in F_2
        let cubics: Vec<u32> = (0..4u32)
            .map(|enc| enc * 2 + 1)
            .filter(|&tail| {
                let c = [tail & 1, (tail >> 1) & 1, (tail >> 2) & 1];
                (0..2).all(|x: u32| !(c[0] + c[1] * x + c[2] * x * x + x * x * x).is_multiple_of(2))
            })
            .collect();
        assert_eq!(cubics, vec![3, 5]);
        // x^2 + 1 is reducible over F_3 and x^2 + 1 irreducible? (-1 is not a square mod 3)
        assert_eq!(FieldCtx::new(3, 2, None).unwrap().modulus(), &[1, 0]);
    }

    #[test]
    fn construction_errors() {
        assert_eq!(FieldCtx::new(4, 1, None).unwrap_err(), FieldError::NotPrime(4));
        assert_eq!(
            FieldCtx::new(5, 1, Some(&[1])).unwrap_err(),
            FieldError::NoModulusNeeded
        );
        // x^2 + 1 = (x + 1)^2 over F_2
        assert_eq!(
            FieldCtx::new(2, 2, Some(&[1, 0])).unwrap_err(),
            FieldError::NotIrreducible(vec![1, 0])
        );
        assert!(matches!(
            FieldCtx::new(2, 2, Some(&[1])).unwrap_err(),
            FieldError::BadModulus { .. }
        ));
        assert!(matches!(
            FieldCtx::new(2, 21, None).unwrap_err(),
            FieldError::TooLarge { .. }
        ));
        assert_eq!(FieldCtx::new(2, 0, None).unwrap_err(), FieldError::BadDegree);
    }

    #[test]
    fn gf4_arithmetic() {
        let f = FieldCtx::new(2, 2, None).unwrap();
        assert_eq!(f.mul(Gf(2), Gf(2)), Gf(3));
        assert_eq!(f.inv(Gf(2)).unwrap(), Gf(3));
        assert_eq!(f.elements(), vec![Gf(0), Gf(1), Gf(2), Gf(3)]);
    }

    #[test]
    fn inverses() {
        let f5 = FieldCtx::prime(5).unwrap();
        assert_eq!(f5.inv(Gf(2)).unwrap(), Gf(3));
        assert_eq!(f5.inv(Gf::ZERO).unwrap_err(), FieldError::DivisionByZero);
        let f7 = FieldCtx::prime(7).unwrap();
        assert_eq!(f7.inv(Gf(1)).unwrap(), Gf(1));
        for a in 0..5 {
            assert_eq!(f5.mul(Gf(0), Gf(a)), Gf(0));
        }
    }

    #[test]
    fn enumeration() {
        assert_eq!(FieldCtx::prime(3).unwrap().elements(), vec![Gf(0), Gf(1), Gf(2)]);
        let e5 = FieldCtx::prime(5).unwrap().elements();
        let mut dedup = e5.clone();
        dedup.dedup();
        assert_eq!(dedup.len(), 5);
    }

    #[test]
    fn inverse_and_frobenius_exhaustive() {
        for f in fields_up_to(64) {
            for a in f.elements() {
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), Gf::ONE, "{f:?} {a}");
                }
                assert_eq!(f.pow(a, f.q() as u64), a, "{f:?} frobenius {a}");
            }
        }
    }

    #[test]
    fn field_axioms_exhaustive_small() {
        for f in fields_up_to(16) {
            let els = f.elements();
            for &a in &els {
                assert_eq!(f.add(a, f.neg(a)), Gf::ZERO);
                for &b in &els {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for &c in &els {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn tables_match_definitional() {
        for f in fields_up_to(64) {
            for a in f.elements() {
                for b in f.elements() {
                    assert_eq!(f.mul(a, b), f.mul_definitional(a, b));
                    assert_eq!(f.add(a, b), f.add_definitional(a, b));
                }
            }
        }
        // log-table regime
        for (p, m) in [(2u32, 9u32), (3, 6), (257, 1), (17, 2)] {
            let f = FieldCtx::new(p, m, None).unwrap();
            let q = f.q();
            for i in 0..2000u32 {
                let a = Gf((i * 7919 + 13) % q);
                let b = Gf((i * 104_729 + 5) % q);
                assert_eq!(f.mul(a, b), f.mul_definitional(a, b));
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), Gf::ONE);
                }
            }
        }
    }

    #[test]
    fn deterministic_construction() {
        let a = FieldCtx::new(3, 3, None).unwrap();
        let b = FieldCtx::new(3, 3, None).unwrap();
        assert_eq!(a.modulus(), b.modulus());
        assert_eq!(a, b);
        assert_eq!(a.header(), b.header());
    }

    #[test]
    fn prime_power_split() {
        assert_eq!(prime_power(8), Some((2, 3)));
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(6), None);
        assert_eq!(prime_power(1), None);
        assert_eq!(prime_power(101), Some((101, 1)));
    }

    #[test]
    fn header_line() {
        assert_eq!(FieldCtx::new(2, 2, None).unwrap().header(), "q=4 p=2 m=2 mod=1,1");
        assert_eq!(FieldCtx::prime(7).unwrap().header(), "q=7 p=7 m=1");
    }
}
