//! Sparse vectors keyed by any ordered index type.

use super::{Field, Scalar};

/// A sparse linear combination: sorted by key, no zero coefficients.
pub type Lin<K> = Vec<(K, Scalar)>;

/// Collects terms in any order and normalizes them.
#[derive(Clone, Debug)]
pub struct Acc<K> {
    terms: Vec<(K, Scalar)>,
}

impl<K: Ord + Copy> Default for Acc<K> {
    fn default() -> Self {
        Acc { terms: Vec::new() }
    }
}

impl<K: Ord + Copy> Acc<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, k: K, c: Scalar) {
        if !c.is_zero() {
            self.terms.push((k, c));
        }
    }

    /// Adds `c * v`.
    pub fn add_scaled(&mut self, c: &Scalar, v: &[(K, Scalar)]) {
        if c.is_zero() {
            return;
        }
        for (k, x) in v {
            self.terms.push((*k, c * x));
        }
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn finish(mut self) -> Lin<K> {
        normalize(&mut self.terms);
        self.terms
    }
}

/// Sorts by key, merges duplicates and drops zeros in place.
pub fn normalize<K: Ord + Copy>(terms: &mut Vec<(K, Scalar)>) {
    if terms.windows(2).all(|w| w[0].0 < w[1].0) {
        terms.retain(|t| !t.1.is_zero());
        return;
    }
    terms.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out: Vec<(K, Scalar)> = Vec::with_capacity(terms.len());
    for (k, c) in terms.drain(..) {
        match out.last_mut() {
            Some((lk, lc)) if *lk == k => *lc = &*lc + &c,
            _ => out.push((k, c)),
        }
    }
    out.retain(|t| !t.1.is_zero());
    *terms = out;
}

/// `v + c * w` for normalized inputs.
pub fn axpy<K: Ord + Copy>(v: &[(K, Scalar)], c: &Scalar, w: &[(K, Scalar)]) -> Lin<K> {
    let mut out = Vec::with_capacity(v.len() + w.len());
    let (mut i, mut j) = (0, 0);
    while i < v.len() || j < w.len() {
        if j == w.len() || (i < v.len() && v[i].0 < w[j].0) {
            out.push(v[i].clone());
            i += 1;
        } else if i == v.len() || w[j].0 < v[i].0 {
            let x = c * &w[j].1;
            if !x.is_zero() {
                out.push((w[j].0, x));
            }
            j += 1;
        } else {
            let x = &v[i].1 + &(c * &w[j].1);
            if !x.is_zero() {
                out.push((v[i].0, x));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn scale<K: Copy>(c: &Scalar, v: &[(K, Scalar)]) -> Lin<K> {
    if c.is_zero() {
        return Vec::new();
    }
    v.iter().map(|(k, x)| (*k, c * x)).collect()
}

pub fn neg<K: Copy>(v: &[(K, Scalar)]) -> Lin<K> {
    v.iter().map(|(k, x)| (*k, -x)).collect()
}

/// Single basis vector.
pub fn unit<K>(field: Field, k: K) -> Lin<K> {
    vec![(k, field.one())]
}

/// Coefficient of `k`, if present.
pub fn coeff<'a, K: Ord>(v: &'a [(K, Scalar)], k: &K) -> Option<&'a Scalar> {
    v.binary_search_by(|t| t.0.cmp(k)).ok().map(|i| &v[i].1)
}
