//! Operads, bimodules and algebras over a field: structure maps, axiom
//! validation, relative composition and free algebras.
//!
//! Structure maps take an outer basis operation and a list of inner basis
//! operations `(arity, op)`; the result's inputs are ordered block by block.

mod algebra;
mod bimodule;
mod relative;
mod validate;

#[cfg(test)]
mod tests;

pub use algebra::*;
pub use bimodule::*;
pub use relative::*;
pub use validate::*;

use std::cmp::Reverse;
use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::chain::ChainError;
use crate::exactlin::{Acc, Field, Lin};
use crate::symseq::{perm, Level, SymSeq, SymSeqError, Tail};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OperadError {
    #[error(transparent)]
    SymSeq(#[from] SymSeqError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error("unknown operad `{0}`")]
    Unknown(String),
    #[error("operad mismatch: {0}")]
    Mismatch(String),
    #[error("{0}")]
    Invalid(String),
}

/// `(outer operation, [(arity, inner operation)])`.
pub type GammaKey = (u64, Vec<(usize, u64)>);

/// Records the structure constants consulted while evaluating a map.
pub type Trace = Vec<GammaKey>;

#[derive(Clone)]
enum Gamma {
    Unit,
    Com,
    Ass,
    Table(Arc<HashMap<GammaKey, Lin<u64>>>),
}

/// A reduced operad with explicit composition.
#[derive(Clone)]
pub struct Operad {
    name: String,
    seq: SymSeq,
    unit: Lin<u64>,
    gamma: Gamma,
}

impl std::fmt::Debug for Operad {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Operad").field("name", &self.name).field("seq", &self.seq).finish()
    }
}

impl PartialEq for Operad {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.seq == other.seq && self.unit == other.unit
    }
}

fn levels_upto(m: usize, level: Level) -> Vec<Level> {
    (0..m).map(|k| if k == 0 { Level::Zero } else { level.clone() }).collect()
}

impl Operad {
    /// The field in arity 1.
    pub fn unit(field: Field) -> Operad {
        Operad {
            name: "unit".into(),
            seq: SymSeq::unit(field),
            unit: vec![(0, field.one())],
            gamma: Gamma::Unit,
        }
    }

    /// The trivial representation in every positive arity.
    pub fn com(field: Field) -> Operad {
        Operad {
            name: "com".into(),
            seq: SymSeq::new(field, vec![Level::Zero], Tail::Trivial).unwrap(),
            unit: vec![(0, field.one())],
            gamma: Gamma::Com,
        }
    }

    /// The regular representation in every positive arity.
    pub fn ass(field: Field) -> Operad {
        Operad {
            name: "ass".into(),
            seq: SymSeq::new(field, vec![Level::Zero], Tail::Regular).unwrap(),
            unit: vec![(0, field.one())],
            gamma: Gamma::Ass,
        }
    }

    /// `com` with all arities `>= m` set to zero.
    pub fn com_truncated(field: Field, m: usize) -> Result<Operad, OperadError> {
        if m < 2 {
            return Err(OperadError::Invalid(format!("truncation at {m} removes the unit")));
        }
        Ok(Operad {
            name: format!("com_truncated({m})"),
            seq: SymSeq::new(field, levels_upto(m, Level::Trivial), Tail::Zero)?,
            unit: vec![(0, field.one())],
            gamma: Gamma::Com,
        })
    }

    /// `ass` with all arities `>= m` set to zero.
    pub fn ass_truncated(field: Field, m: usize) -> Result<Operad, OperadError> {
        if m < 2 {
            return Err(OperadError::Invalid(format!("truncation at {m} removes the unit")));
        }
        Ok(Operad {
            name: format!("ass_truncated({m})"),
            seq: SymSeq::new(field, levels_upto(m, Level::Regular), Tail::Zero)?,
            unit: vec![(0, field.one())],
            gamma: Gamma::Ass,
        })
    }

    /// Looks up a built-in by name; truncated variants need `m`.
    pub fn builtin(name: &str, field: Field, m: Option<usize>) -> Result<Operad, OperadError> {
        let need = || m.ok_or_else(|| OperadError::Invalid(format!("`{name}` needs a truncation parameter")));
        match name {
            "unit" => Ok(Operad::unit(field)),
            "com" => Ok(Operad::com(field)),
            "ass" => Ok(Operad::ass(field)),
            "com_truncated" => Operad::com_truncated(field, need()?),
            "ass_truncated" => Operad::ass_truncated(field, need()?),
            _ => Err(OperadError::Unknown(name.into())),
        }
    }

    /// An operad given by structure constants. Entries not listed are zero
    /// unless they follow from the unit or from equivariance: a key whose
    /// inner arities are not weakly decreasing (ties broken by operation)
    /// is evaluated through the sorted key.
    pub fn from_table(
        name: &str,
        seq: SymSeq,
        unit: Lin<u64>,
        entries: HashMap<GammaKey, Lin<u64>>,
    ) -> Result<Operad, OperadError> {
        if !seq.is_reduced() {
            return Err(SymSeqError::NotReduced.into());
        }
        if unit.is_empty() || unit.iter().any(|(b, _)| *b >= seq.dim(1)) {
            return Err(OperadError::Invalid("unit must be a nonzero element of arity 1".into()));
        }
        if unit.iter().any(|(b, _)| seq.op_degree(1, *b) != 0) {
            return Err(OperadError::Invalid("unit must have degree 0".into()));
        }
        Ok(Operad {
            name: name.into(),
            seq,
            unit,
            gamma: Gamma::Table(Arc::new(entries)),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn field(&self) -> Field {
        self.seq.field()
    }

    pub fn seq(&self) -> &SymSeq {
        &self.seq
    }

    pub fn unit_element(&self) -> &Lin<u64> {
        &self.unit
    }

    /// The unit as a basis operation, if it is one.
    pub fn unit_basis(&self) -> Option<u64> {
        match self.unit.as_slice() {
            [(u, x)] if x.is_one() => Some(*u),
            _ => None,
        }
    }

    /// Whether arity 1 is spanned by the unit.
    pub fn unital_in_arity_one(&self) -> bool {
        self.seq.dim(1) == 1 && self.unit_basis() == Some(0)
    }

    /// Whether every operation has degree `>= 0` through `arity`.
    pub fn is_connective(&self, arity: usize) -> bool {
        self.seq.min_degree_upto(arity) >= 0
    }

    /// Structure constants as a table through total arity `cap`, keyed by
    /// sorted inner tuples.
    pub fn to_table(&self, cap: usize) -> Operad {
        let mut entries = HashMap::new();
        for r in 1..=cap {
            for x in self.seq.basis(r) {
                for ys in inner_tuples(&self.seq, r, cap, true) {
                    let v = self.gamma(x, &ys);
                    entries.insert((x, ys), v);
                }
            }
        }
        Operad {
            name: self.name.clone(),
            seq: self.seq.clone(),
            unit: self.unit.clone(),
            gamma: Gamma::Table(Arc::new(entries)),
        }
    }

    /// Same operad with one structure constant replaced.
    pub fn with_entry(&self, cap: usize, key: GammaKey, value: Lin<u64>) -> Operad {
        let mut t = self.to_table(cap);
        if let Gamma::Table(entries) = &mut t.gamma {
            Arc::make_mut(entries).insert(key, value);
        }
        t.name = format!("{}*", self.name);
        t
    }

    /// Structure constants stored explicitly, if any.
    pub fn table(&self) -> Option<&HashMap<GammaKey, Lin<u64>>> {
        match &self.gamma {
            Gamma::Table(t) => Some(t),
            _ => None,
        }
    }

    /// `γ(x; y_1, …, y_r)`.
    pub fn gamma(&self, x: u64, ys: &[(usize, u64)]) -> Lin<u64> {
        self.gamma_traced(x, ys, &mut Vec::new())
    }

    /// As [`Operad::gamma`], recording the keys consulted.
    pub fn gamma_traced(&self, x: u64, ys: &[(usize, u64)], trace: &mut Trace) -> Lin<u64> {
        let r = ys.len();
        let s: usize = ys.iter().map(|y| y.0).sum();
        if self.seq.dim(r) == 0 || self.seq.dim(s) == 0 || ys.iter().any(|(a, _)| self.seq.dim(*a) == 0) {
            return Vec::new();
        }
        let one = self.field().one();
        match &self.gamma {
            Gamma::Unit | Gamma::Com => {
                trace.push((x, ys.to_vec()));
                vec![(0, one)]
            }
            Gamma::Ass => {
                trace.push((x, ys.to_vec()));
                let tau = perm::unrank(r, x);
                let mut offsets = Vec::with_capacity(r);
                let mut o = 0;
                for (a, _) in ys {
                    offsets.push(o);
                    o += a;
                }
                let mut word = Vec::with_capacity(s);
                for p in 0..r {
                    let k = tau[p];
                    for q in perm::unrank(ys[k].0, ys[k].1) {
                        word.push(offsets[k] + q);
                    }
                }
                vec![(perm::rank(&word), one)]
            }
            Gamma::Table(t) => self.table_gamma(t, x, ys, trace),
        }
    }

    fn table_gamma(&self, t: &HashMap<GammaKey, Lin<u64>>, x: u64, ys: &[(usize, u64)], trace: &mut Trace) -> Lin<u64> {
        let key = (x, ys.to_vec());
        if let Some(v) = t.get(&key) {
            trace.push(key);
            return v.clone();
        }
        let one = self.field().one();
        if let Some(u) = self.unit_basis() {
            if ys.len() == 1 && x == u {
                return vec![(ys[0].1, one)];
            }
            if ys.iter().all(|y| *y == (1, u)) {
                return vec![(x, one)];
            }
        }
        if is_sorted_tuple(ys) {
            trace.push(key);
            return Vec::new();
        }
        let seq = &self.seq;
        reorder(seq, seq, seq, x, ys, &mut |x2, zs| self.table_gamma(t, x2, zs, trace))
    }

    /// `γ` extended multilinearly.
    pub fn gamma_lin(&self, x: &Lin<u64>, ys: &[(usize, Lin<u64>)]) -> Lin<u64> {
        multilinear(x, ys, &mut |b, tuple| self.gamma(b, tuple))
    }
}

/// Whether inner arities are weakly decreasing, with equal arities sorted
/// by operation.
pub fn is_sorted_tuple(ys: &[(usize, u64)]) -> bool {
    ys.windows(2).all(|w| (Reverse(w[0].0), w[0].1) <= (Reverse(w[1].0), w[1].1))
}

/// Evaluates a composition law on an unsorted inner tuple through the
/// sorted one, using equivariance:
/// `x ⊗ y_1 … y_r = ±(σx) ⊗ z_1 … z_r` with `z_{σ(k)} = y_k`, and the
/// result's input blocks are permuted back.
pub(crate) fn reorder(
    outer: &SymSeq,
    inner: &SymSeq,
    target: &SymSeq,
    x: u64,
    ys: &[(usize, u64)],
    f: &mut dyn FnMut(u64, &[(usize, u64)]) -> Lin<u64>,
) -> Lin<u64> {
    let field = outer.field();
    let r = ys.len();
    let keys: Vec<(Reverse<usize>, u64)> = ys.iter().map(|(a, b)| (Reverse(*a), *b)).collect();
    let dest = perm::sorting_dest(&keys);
    let xs = outer.act(r, &dest, &vec![(x, field.one())]);
    let degs: Vec<i32> = ys.iter().map(|(a, b)| inner.op_degree(*a, *b)).collect();
    let odd = perm::koszul_odd(&degs, &dest);
    let mut zs = ys.to_vec();
    for k in 0..r {
        zs[dest[k]] = ys[k];
    }
    let (blocks, s) = block_dest(&ys.iter().map(|y| y.0).collect::<Vec<_>>(), &dest);
    let mut acc = Acc::new();
    for (b, c) in xs {
        acc.add_scaled(&c, &f(b, &zs));
    }
    let v = target.act(s, &blocks, &acc.finish());
    if odd {
        crate::exactlin::sparse::neg(&v)
    } else {
        v
    }
}

/// For blocks of the given sizes moved by `dest`, the permutation taking
/// an input's position in the moved layout back to its original position.
pub(crate) fn block_dest(sizes: &[usize], dest: &[usize]) -> (Vec<usize>, usize) {
    let r = sizes.len();
    let s: usize = sizes.iter().sum();
    let mut off_y = Vec::with_capacity(r);
    let mut o = 0;
    for a in sizes {
        off_y.push(o);
        o += a;
    }
    let mut moved = vec![0usize; r];
    for k in 0..r {
        moved[dest[k]] = sizes[k];
    }
    let mut off_z = Vec::with_capacity(r);
    o = 0;
    for a in &moved {
        off_z.push(o);
        o += a;
    }
    let mut out = vec![0usize; s];
    for k in 0..r {
        for q in 0..sizes[k] {
            out[off_z[dest[k]] + q] = off_y[k] + q;
        }
    }
    (out, s)
}

/// Multilinear extension of a law given on basis elements.
pub(crate) fn multilinear(
    x: &Lin<u64>,
    ys: &[(usize, Lin<u64>)],
    f: &mut dyn FnMut(u64, &[(usize, u64)]) -> Lin<u64>,
) -> Lin<u64> {
    fn go(
        ys: &[(usize, Lin<u64>)],
        k: usize,
        cur: &mut Vec<(usize, u64)>,
        c: crate::exactlin::Scalar,
        x: u64,
        f: &mut dyn FnMut(u64, &[(usize, u64)]) -> Lin<u64>,
        acc: &mut Acc<u64>,
    ) {
        if k == ys.len() {
            acc.add_scaled(&c, &f(x, cur));
            return;
        }
        for (b, y) in &ys[k].1 {
            cur.push((ys[k].0, *b));
            go(ys, k + 1, cur, &c * y, x, f, acc);
            cur.pop();
        }
    }
    let mut acc = Acc::new();
    let mut cur = Vec::with_capacity(ys.len());
    for (b, c) in x {
        go(ys, 0, &mut cur, c.clone(), *b, f, &mut acc);
    }
    acc.finish()
}

/// All `r`-tuples of basis operations of `seq` with total arity at most
/// `cap`; only sorted tuples when `sorted`.
pub fn inner_tuples(seq: &SymSeq, r: usize, cap: usize, sorted: bool) -> Vec<Vec<(usize, u64)>> {
    fn go(
        seq: &SymSeq,
        r: usize,
        budget: usize,
        sorted: bool,
        cur: &mut Vec<(usize, u64)>,
        out: &mut Vec<Vec<(usize, u64)>>,
    ) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        let left = r - cur.len() - 1;
        for a in 1..=budget.saturating_sub(left) {
            for b in 0..seq.dim(a) {
                if sorted {
                    if let Some(last) = cur.last() {
                        if (Reverse(last.0), last.1) > (Reverse(a), b) {
                            continue;
                        }
                    }
                }
                cur.push((a, b));
                go(seq, r, budget - a, sorted, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    if r <= cap {
        go(seq, r, cap, sorted, &mut Vec::with_capacity(r), &mut out);
    }
    out
}

/// Sum of degrees of inner operations.
pub(crate) fn tuple_degree(seq: &SymSeq, ys: &[(usize, u64)]) -> i32 {
    ys.iter().map(|(a, b)| seq.op_degree(*a, *b)).sum()
}
