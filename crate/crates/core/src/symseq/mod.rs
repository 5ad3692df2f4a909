//! Symmetric sequences of chain complexes, coinvariants, the composition
//! product and level truncations.

mod compose;
mod level;
pub mod perm;
pub mod schur;

pub use compose::*;
pub use level::{coinvariants, Quotient, SymRep};

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chain::ChainError;
use crate::exactlin::{Field, Lin};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymSeqError {
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error("symmetric group action: {0}")]
    Action(String),
    #[error("arity cap {cap} insufficient: arity {needed} is required")]
    ArityCap { cap: usize, needed: usize },
    #[error("sequence must be reduced (level 0 zero)")]
    NotReduced,
    #[error("invalid truncation indices ({0}, {1})")]
    BadIndex(usize, ExtNat),
    #[error("{0}")]
    Invalid(String),
}

/// Natural numbers extended by `∞`, ordered with `∞` on top.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ExtNat {
    Fin(usize),
    Inf,
}

impl ExtNat {
    pub fn add(self, o: ExtNat) -> ExtNat {
        match (self, o) {
            (ExtNat::Fin(a), ExtNat::Fin(b)) => ExtNat::Fin(a + b),
            _ => ExtNat::Inf,
        }
    }

    /// `self - k`, with `∞ - k = ∞`; saturates at 0.
    pub fn sub(self, k: usize) -> ExtNat {
        match self {
            ExtNat::Fin(a) => ExtNat::Fin(a.saturating_sub(k)),
            ExtNat::Inf => ExtNat::Inf,
        }
    }

    /// Multiplication by a positive natural.
    pub fn mul(self, k: usize) -> ExtNat {
        match self {
            ExtNat::Fin(a) => ExtNat::Fin(a * k),
            ExtNat::Inf if k == 0 => ExtNat::Fin(0),
            ExtNat::Inf => ExtNat::Inf,
        }
    }

    /// `n < self`.
    pub fn exceeds(self, n: usize) -> bool {
        match self {
            ExtNat::Fin(a) => n < a,
            ExtNat::Inf => true,
        }
    }

    pub fn finite(self) -> Option<usize> {
        match self {
            ExtNat::Fin(a) => Some(a),
            ExtNat::Inf => None,
        }
    }
}

impl fmt::Display for ExtNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtNat::Fin(a) => write!(f, "{a}"),
            ExtNat::Inf => write!(f, "inf"),
        }
    }
}

impl std::str::FromStr for ExtNat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "inf" | "∞" | "infinity" => Ok(ExtNat::Inf),
            _ => s.parse().map(ExtNat::Fin).map_err(|_| format!("not a natural or inf: {s}")),
        }
    }
}

/// One arity of a symmetric sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Level {
    Zero,
    /// `k` in degree 0 with trivial action.
    Trivial,
    /// `k[Σ_r]` in degree 0 with the left regular action.
    Regular,
    Dense(Arc<SymRep>),
}

/// Levels above the explicitly stored ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tail {
    Zero,
    Trivial,
    Regular,
    /// Data beyond the stored levels is not known.
    Unknown,
}

static ZERO: Level = Level::Zero;
static TRIVIAL: Level = Level::Trivial;
static REGULAR: Level = Level::Regular;

type QuotientCache = RwLock<HashMap<(usize, Vec<(usize, bool)>), Arc<Quotient>>>;

/// A symmetric sequence: explicit levels `0..levels.len()` plus a tail rule.
#[derive(Clone)]
pub struct SymSeq {
    field: Field,
    levels: Vec<Level>,
    tail: Tail,
    cache: Arc<QuotientCache>,
}

impl PartialEq for SymSeq {
    fn eq(&self, o: &Self) -> bool {
        self.field == o.field && self.tail == o.tail && self.levels == o.levels
    }
}

impl fmt::Debug for SymSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymSeq")
            .field("field", &self.field)
            .field("dims", &(0..self.levels.len()).map(|r| self.dim(r)).collect::<Vec<_>>())
            .field("tail", &self.tail)
            .finish()
    }
}

impl SymSeq {
    pub fn new(field: Field, levels: Vec<Level>, tail: Tail) -> Result<Self, SymSeqError> {
        for (r, l) in levels.iter().enumerate() {
            match l {
                Level::Dense(rep) => {
                    if rep.arity != r || rep.field() != field {
                        return Err(SymSeqError::Invalid(format!("level {r} has mismatched arity or field")));
                    }
                }
                Level::Regular if r > perm::MAX_RANKED => {
                    return Err(SymSeqError::Invalid(format!("regular level {r} too large")));
                }
                _ => {}
            }
        }
        Ok(SymSeq {
            field,
            levels,
            tail,
            cache: Arc::new(RwLock::new(HashMap::new())),
        })
    }

    /// The unit sequence: `k` in arity 1.
    pub fn unit(field: Field) -> Self {
        Self::new(field, vec![Level::Zero, Level::Trivial], Tail::Zero).unwrap()
    }

    pub fn zero(field: Field) -> Self {
        Self::new(field, vec![Level::Zero], Tail::Zero).unwrap()
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    pub fn stored_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, r: usize) -> &Level {
        if r < self.levels.len() {
            return &self.levels[r];
        }
        match self.tail {
            Tail::Zero | Tail::Unknown => &ZERO,
            Tail::Trivial => &TRIVIAL,
            Tail::Regular => &REGULAR,
        }
    }

    /// Highest arity with data, when the data is known to stop.
    pub fn max_arity(&self) -> Option<usize> {
        match self.tail {
            Tail::Zero => Some((0..self.levels.len()).rev().find(|r| self.dim(*r) > 0).unwrap_or(0)),
            Tail::Unknown => Some(self.levels.len().saturating_sub(1)),
            _ => None,
        }
    }

    /// Arities above this are unknown (not zero).
    pub fn arity_cap(&self) -> Option<usize> {
        (self.tail == Tail::Unknown).then(|| self.levels.len().saturating_sub(1))
    }

    pub fn is_reduced(&self) -> bool {
        self.dim(0) == 0
    }

    pub fn dim(&self, r: usize) -> u64 {
        match self.level(r) {
            Level::Zero => 0,
            Level::Trivial => 1,
            Level::Regular => perm::factorial(r),
            Level::Dense(rep) => rep.dim() as u64,
        }
    }

    pub fn op_degree(&self, r: usize, b: u64) -> i32 {
        match self.level(r) {
            Level::Dense(rep) => rep.degree(b as usize),
            _ => 0,
        }
    }

    /// Minimal operation degree in arity `r`.
    pub fn min_degree(&self, r: usize) -> Option<i32> {
        match self.level(r) {
            Level::Zero => None,
            Level::Trivial | Level::Regular => Some(0),
            Level::Dense(rep) => (!rep.complex.is_zero()).then(|| rep.complex.d_min()),
        }
    }

    /// Minimal operation degree over arities `1..=max` (0 when empty).
    pub fn min_degree_upto(&self, max: usize) -> i32 {
        let stored = (1..=max.min(self.levels.len())).filter_map(|r| self.min_degree(r)).min();
        let tail = match self.tail {
            Tail::Trivial | Tail::Regular if max >= self.levels.len() => Some(0),
            _ => None,
        };
        stored.into_iter().chain(tail).min().unwrap_or(0)
    }

    pub fn op_boundary(&self, r: usize, b: u64) -> Lin<u64> {
        match self.level(r) {
            Level::Dense(rep) => rep.boundary(b as usize).iter().map(|(k, x)| (*k as u64, x.clone())).collect(),
            _ => Vec::new(),
        }
    }

    /// Basis of arity `r`, in order.
    pub fn basis(&self, r: usize) -> Vec<u64> {
        (0..self.dim(r)).collect()
    }

    /// Applies the permutation sending position `k` to `dest[k]`.
    pub fn act(&self, r: usize, dest: &[usize], v: &Lin<u64>) -> Lin<u64> {
        if dest.iter().enumerate().all(|(k, d)| k == *d) {
            return v.clone();
        }
        match self.level(r) {
            Level::Zero => Vec::new(),
            Level::Trivial => v.clone(),
            Level::Regular => {
                let mut out: Lin<u64> = v
                    .iter()
                    .map(|(b, x)| {
                        let t = perm::unrank(r, *b);
                        (perm::rank(&perm::compose(dest, &t)), x.clone())
                    })
                    .collect();
                out.sort_by_key(|t| t.0);
                out
            }
            Level::Dense(rep) => {
                let mut cur: Lin<usize> = v.iter().map(|(b, x)| (*b as usize, x.clone())).collect();
                for i in perm::bubble_swaps(dest) {
                    let mut acc = crate::exactlin::Acc::new();
                    for (b, x) in &cur {
                        acc.add_scaled(x, rep.generator_image(i, *b));
                    }
                    cur = acc.finish();
                }
                cur.into_iter().map(|(b, x)| (b as u64, x)).collect()
            }
        }
    }

    /// Applies one adjacent transposition `s_i` (0-based).
    pub fn swap(&self, r: usize, i: usize, v: &Lin<u64>) -> Lin<u64> {
        let mut dest: Vec<usize> = (0..r).collect();
        dest.swap(i, i + 1);
        self.act(r, &dest, v)
    }

    /// Coinvariant quotient for a run structure of sorted children.
    pub fn quotient(&self, r: usize, blocks: &[(usize, bool)]) -> Arc<Quotient> {
        let key = (r, blocks.to_vec());
        if let Some(q) = self.cache.read().unwrap().get(&key) {
            return q.clone();
        }
        let q = Arc::new(match self.level(r) {
            Level::Zero => Quotient::empty(),
            Level::Trivial => Quotient::trivial(self.field, blocks),
            Level::Regular => Quotient::regular(blocks),
            Level::Dense(rep) => Quotient::dense(rep, blocks),
        });
        self.cache.write().unwrap().entry(key).or_insert(q).clone()
    }

    /// Materializes arity `r` as an explicit representation.
    pub fn rep(&self, r: usize) -> SymRep {
        match self.level(r) {
            Level::Zero => {
                let c = Arc::new(crate::chain::ChainComplex::zero(self.field));
                let gens = (1..r).map(|_| crate::chain::ChainMap::identity(c.clone())).collect();
                SymRep::new_unchecked(r, c, gens).unwrap()
            }
            Level::Trivial => SymRep::trivial(self.field, r),
            Level::Regular => SymRep::regular(self.field, r),
            Level::Dense(rep) => (**rep).clone(),
        }
    }

    /// Levels `i <= k < m` kept, all others zero.
    pub fn truncate(&self, i: usize, m: ExtNat) -> Result<SymSeq, SymSeqError> {
        if i < 1 || !m.exceeds(i) {
            return Err(SymSeqError::BadIndex(i, m));
        }
        let stored = match m {
            ExtNat::Fin(m) => m,
            ExtNat::Inf => self.levels.len().max(i + 1),
        };
        let levels = (0..stored)
            .map(|k| if k >= i && m.exceeds(k) { self.level(k).clone() } else { Level::Zero })
            .collect();
        let tail = match m {
            ExtNat::Fin(_) => Tail::Zero,
            ExtNat::Inf => self.tail,
        };
        SymSeq::new(self.field, levels, tail)
    }

    /// Same data with every level materialized densely up to `max`.
    pub fn densified(&self, max: usize) -> SymSeq {
        let levels = (0..=max)
            .map(|r| if self.dim(r) == 0 { Level::Zero } else { Level::Dense(Arc::new(self.rep(r))) })
            .collect();
        let tail = if self.max_arity().is_some_and(|a| a <= max) { Tail::Zero } else { Tail::Unknown };
        SymSeq::new(self.field, levels, tail).unwrap()
    }
}

/// `X_i^m`: levels `i <= k < m` of `x`.
pub fn level_truncate(x: &SymSeq, i: usize, m: ExtNat) -> Result<SymSeq, SymSeqError> {
    x.truncate(i, m)
}

#[cfg(test)]
mod tests;
