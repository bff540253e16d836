//! Enumeration helpers: projective points in lexicographic order and
//! k-subsets of `0..n` in lexicographic order.
//!
//! A projective representative has its first non-zero coordinate equal
//! to one. Representatives are ordered lexicographically by encoding, so the
//! first one is `(0, ..., 0, 1)` and the last ones start with 1.

use crate::field::Gf;

/// Number of projective points of `F_q^d`: `(q^d - 1) / (q - 1)`.
pub fn projective_count(q: u32, d: usize) -> u64 {
    let q = q as u64;
    (0..d).fold(0u64, |acc, _| acc.saturating_mul(q).saturating_add(1))
}

/// The `idx`-th projective representative of `F_q^d` in lexicographic order.
pub fn projective_unrank(q: u32, d: usize, mut idx: u64) -> Option<Vec<Gf>> {
    let mut v = vec![Gf::ZERO; d];
    for lead in (0..d).rev() {
        let tail = d - 1 - lead;
        let size = (q as u64).checked_pow(tail as u32)?;
        if idx < size {
            v[lead] = Gf::ONE;
            let mut rest = idx;
            for pos in (lead + 1..d).rev() {
                v[pos] = Gf((rest % q as u64) as u32);
                rest /= q as u64;
            }
            return Some(v);
        }
        idx -= size;
    }
    None
}

/// Advances `v` to the next projective representative; false when exhausted.
pub fn projective_next(q: u32, v: &mut [Gf]) -> bool {
    let d = v.len();
    let Some(lead) = v.iter().position(|x| !x.is_zero()) else {
        return false;
    };
    for pos in (lead + 1..d).rev() {
        if v[pos].0 + 1 < q {
            v[pos] = Gf(v[pos].0 + 1);
            return true;
        }
        v[pos] = Gf::ZERO;
    }
    if lead == 0 {
        return false;
    }
    v[lead] = Gf::ZERO;
    v[lead - 1] = Gf::ONE;
    true
}

/// The first projective representative `(0, ..., 0, 1)`.
pub fn projective_first(d: usize) -> Vec<Gf> {
    let mut v = vec![Gf::ZERO; d];
    if let Some(last) = v.last_mut() {
        *last = Gf::ONE;
    }
    v
}

/// Iterator over projective representatives of `F_q^d` in lexicographic order.
pub struct ProjectivePoints {
    q: u32,
    cur: Option<Vec<Gf>>,
}

impl ProjectivePoints {
    pub fn new(q: u32, d: usize) -> Self {
        Self {
            q,
            cur: (d > 0).then(|| projective_first(d)),
        }
    }
}

impl Iterator for ProjectivePoints {
    type Item = Vec<Gf>;

    fn next(&mut self) -> Option<Vec<Gf>> {
        let cur = self.cur.take()?;
        let mut next = cur.clone();
        if projective_next(self.q, &mut next) {
            self.cur = Some(next);
        }
        Some(cur)
    }
}

/// `C(n, k)`, saturating.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc.min(u64::MAX as u128) as u64
}

/// Advances a strictly increasing index tuple over `0..n`; false when exhausted.
pub fn next_subset(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Iterator over k-subsets of `0..n` in lexicographic order.
pub struct Subsets {
    n: usize,
    cur: Option<Vec<usize>>,
}

impl Subsets {
    pub fn new(n: usize, k: usize) -> Self {
        Self {
            n,
            cur: (k <= n).then(|| (0..k).collect()),
        }
    }
}

impl Iterator for Subsets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.cur.take()?;
        let mut next = cur.clone();
        if !next.is_empty() && next_subset(&mut next, self.n) {
            self.cur = Some(next);
        }
        Some(cur)
    }
}
