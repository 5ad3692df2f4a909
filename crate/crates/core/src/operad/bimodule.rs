use std::sync::Arc;

use super::{Operad, OperadError, Trace};
use crate::exactlin::{Field, Lin};
use crate::symseq::{ExtNat, SymSeq, SeqMap};

/// A composition law `(outer op, [(arity, inner op)]) ↦ result`.
pub type ActFn = Arc<dyn Fn(u64, &[(usize, u64)], &mut Trace) -> Lin<u64> + Send + Sync>;

/// A symmetric sequence with a left and/or right action of an operad.
#[derive(Clone)]
pub struct Bimodule {
    name: String,
    operad: Arc<Operad>,
    seq: SymSeq,
    left: Option<ActFn>,
    right: Option<ActFn>,
}

impl std::fmt::Debug for Bimodule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Bimodule").field("name", &self.name).field("seq", &self.seq).finish()
    }
}

impl Bimodule {
    pub fn from_parts(name: &str, operad: Arc<Operad>, seq: SymSeq, left: Option<ActFn>, right: Option<ActFn>) -> Self {
        Bimodule {
            name: name.into(),
            operad,
            seq,
            left,
            right,
        }
    }

    /// `O` acting on itself on both sides.
    pub fn of_operad(o: &Arc<Operad>) -> Self {
        let g1 = o.clone();
        let g2 = o.clone();
        Bimodule {
            name: o.name().into(),
            operad: o.clone(),
            seq: o.seq().clone(),
            left: Some(Arc::new(move |x, ys, t| g1.gamma_traced(x, ys, t))),
            right: Some(Arc::new(move |x, ys, t| g2.gamma_traced(x, ys, t))),
        }
    }

    /// `O_i^m`: arities `i <= k < m` of `O` with the induced actions.
    pub fn truncation(o: &Arc<Operad>, i: usize, m: ExtNat) -> Result<Self, OperadError> {
        let seq = o.seq().truncate(i, m)?;
        let act = |o: Arc<Operad>, seq: SymSeq| -> ActFn {
            Arc::new(move |x, ys, t| {
                let s: usize = ys.iter().map(|y| y.0).sum();
                if seq.dim(s) == 0 {
                    Vec::new()
                } else {
                    o.gamma_traced(x, ys, t)
                }
            })
        };
        Ok(Bimodule {
            name: format!("{}_{}^{}", o.name(), i, m),
            operad: o.clone(),
            left: Some(act(o.clone(), seq.clone())),
            right: Some(act(o.clone(), seq.clone())),
            seq,
        })
    }

    /// `O(1)` as a bimodule concentrated in arity 1.
    pub fn arity_one(o: &Arc<Operad>) -> Result<Self, OperadError> {
        Self::truncation(o, 1, ExtNat::Fin(2))
    }

    /// The zero bimodule.
    pub fn zero(o: &Arc<Operad>) -> Self {
        let none: ActFn = Arc::new(|_, _, _| Vec::new());
        Bimodule {
            name: "zero".into(),
            operad: o.clone(),
            seq: SymSeq::zero(o.field()),
            left: Some(none.clone()),
            right: Some(none),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn operad(&self) -> &Arc<Operad> {
        &self.operad
    }

    pub fn seq(&self) -> &SymSeq {
        &self.seq
    }

    pub fn field(&self) -> Field {
        self.seq.field()
    }

    pub fn has_left(&self) -> bool {
        self.left.is_some()
    }

    pub fn has_right(&self) -> bool {
        self.right.is_some()
    }

    pub fn left_fn(&self) -> Option<&ActFn> {
        self.left.as_ref()
    }

    pub fn right_fn(&self) -> Option<&ActFn> {
        self.right.as_ref()
    }

    /// `λ(x; m_1, …, m_r)` for `x ∈ O(r)`.
    pub fn left(&self, x: u64, ms: &[(usize, u64)]) -> Lin<u64> {
        match &self.left {
            Some(f) => f(x, ms, &mut Vec::new()),
            None => Vec::new(),
        }
    }

    /// `ρ(m; o_1, …, o_r)` for `m ∈ M(r)`.
    pub fn right(&self, m: u64, os: &[(usize, u64)]) -> Lin<u64> {
        match &self.right {
            Some(f) => f(m, os, &mut Vec::new()),
            None => Vec::new(),
        }
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.into();
        self
    }
}

/// A levelwise map of bimodules over the same operad.
#[derive(Clone, Debug)]
pub struct BimoduleMap {
    pub source: Bimodule,
    pub target: Bimodule,
    pub map: SeqMap,
}

impl BimoduleMap {
    pub fn new(source: &Bimodule, target: &Bimodule, map: SeqMap) -> Result<Self, OperadError> {
        if !Arc::ptr_eq(source.operad(), target.operad()) && source.operad() != target.operad() {
            return Err(OperadError::Mismatch(format!("{} vs {}", source.operad().name(), target.operad().name())));
        }
        if map.source != *source.seq() || map.target != *target.seq() {
            return Err(OperadError::Mismatch("sequence map does not match the bimodules".into()));
        }
        Ok(BimoduleMap {
            source: source.clone(),
            target: target.clone(),
            map,
        })
    }

    /// The truncation map `O_i^m → O_j^n` for `j <= i`, `n <= m`.
    pub fn truncation(o: &Arc<Operad>, from: (usize, ExtNat), to: (usize, ExtNat)) -> Result<Self, OperadError> {
        let src = Bimodule::truncation(o, from.0, from.1)?;
        let dst = Bimodule::truncation(o, to.0, to.1)?;
        let map = crate::symseq::truncation_map(o.seq(), from, to)?;
        Self::new(&src, &dst, map)
    }
}
