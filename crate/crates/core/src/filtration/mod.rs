//! The augmentation ideal filtration `I^i_m = B(O_i^m, O, I)`, Goodwillie
//! stages, connectivity checks, composition pairings and lifting along
//! the filtration.

mod aq;
mod pairing;

#[cfg(test)]
mod tests;

pub use aq::*;
pub use pairing::*;

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::bar::{bar, bar_map_module, bar_map_with, BarComplex, BarError, Tower};
use crate::chain::{cone, homology, Betti, ChainError, ChainMap};
use crate::exactlin::Lin;
use crate::operad::{Bimodule, BimoduleMap, OperadError};
use crate::symseq::ExtNat;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FiltrationError {
    #[error(transparent)]
    Bar(#[from] BarError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Operad(#[from] OperadError),
    #[error("invalid filtration index: {0}")]
    Index(String),
    #[error("{0}")]
    Invalid(String),
    #[error("not null: {0}")]
    NotNull(String),
}

impl From<crate::symseq::SymSeqError> for FiltrationError {
    fn from(e: crate::symseq::SymSeqError) -> Self {
        FiltrationError::Operad(e.into())
    }
}

/// `1 <= i < m <= ∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FiltrationIndex {
    pub i: usize,
    pub m: ExtNat,
}

impl FiltrationIndex {
    pub fn new(i: usize, m: ExtNat) -> Result<Self, FiltrationError> {
        if i == 0 || !m.exceeds(i) {
            return Err(FiltrationError::Index(format!("need 1 <= i < m, got ({i}, {m})")));
        }
        Ok(FiltrationIndex { i, m })
    }

    /// A structure map `self → other` exists.
    pub fn refines(&self, other: &FiltrationIndex) -> bool {
        other.i <= self.i && other.m <= self.m
    }
}

impl std::fmt::Display for FiltrationIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "I^{}_{}", self.i, self.m)
    }
}

/// `I^i_m` with the tower it was built over.
#[derive(Clone, Debug)]
pub struct FiltrationPiece {
    pub index: FiltrationIndex,
    pub bar: BarComplex,
}

pub fn filtration_piece(tower: &Arc<Tower>, index: FiltrationIndex) -> Result<FiltrationPiece, FiltrationError> {
    let m = Bimodule::truncation(tower.operad(), index.i, index.m)?;
    Ok(FiltrationPiece {
        index,
        bar: bar(tower, &m)?,
    })
}

/// The structure map `I^i_m → I^j_n` for `j <= i`, `n <= m`.
pub fn structure_map(from: &FiltrationPiece, to: &FiltrationPiece) -> Result<ChainMap, FiltrationError> {
    if !from.index.refines(&to.index) {
        return Err(FiltrationError::Index(format!("no map {} → {}", from.index, to.index)));
    }
    let o = from.bar.tower().operad();
    let f = BimoduleMap::truncation(o, (from.index.i, from.index.m), (to.index.i, to.index.m))?;
    Ok(bar_map_module(&f, &from.bar, &to.bar)?)
}

/// Arities `i <= r < m` of a bimodule, with actions landing outside dropped.
/// A bimodule when `i = 1` or when arities `>= i` form a sub-bimodule.
pub fn window(mb: &Bimodule, i: usize, m: ExtNat) -> Result<Bimodule, FiltrationError> {
    let seq = mb.seq().truncate(i, m)?;
    let wrap = |f: Option<&crate::operad::ActFn>| -> Option<crate::operad::ActFn> {
        f.map(|f| {
            let f = f.clone();
            let seq = seq.clone();
            let act: crate::operad::ActFn = Arc::new(move |x, ys, t| {
                let s: usize = ys.iter().map(|y| y.0).sum();
                if seq.dim(s) == 0 {
                    Vec::new()
                } else {
                    f(x, ys, t)
                }
            });
            act
        })
    };
    Ok(Bimodule::from_parts(
        &format!("{}_{}^{}", mb.name(), i, m),
        mb.operad().clone(),
        seq.clone(),
        wrap(mb.left_fn()),
        wrap(mb.right_fn()),
    ))
}

fn window_map(lo: usize, hi: ExtNat) -> impl Fn(usize, u64) -> Lin<u64> + Sync {
    move |r, b| {
        if r >= lo && hi.exceeds(r) {
            vec![(b, crate::exactlin::Field::Q.one())]
        } else {
            Vec::new()
        }
    }
}

/// `P_n F_M(I) = B(M^{<=n}, O, I)` and the map to `P_{n-1}`.
#[derive(Clone, Debug)]
pub struct GoodwillieStage {
    pub n: usize,
    pub bar: BarComplex,
    pub to_previous: Option<ChainMap>,
}

pub fn goodwillie_stage(tower: &Arc<Tower>, m: &Bimodule, n: usize) -> Result<GoodwillieStage, FiltrationError> {
    if n == 0 {
        return Err(FiltrationError::Index("stages start at n = 1".into()));
    }
    let field = tower.field();
    let pn = bar(tower, &window(m, 1, ExtNat::Fin(n + 1))?)?;
    let to_previous = if n >= 2 {
        let prev = bar(tower, &window(m, 1, ExtNat::Fin(n))?)?;
        let keep = window_map(1, ExtNat::Fin(n));
        let one = field.one();
        Some(bar_map_with(&pn, &prev, &|r, b| {
            keep(r, b).into_iter().map(|(k, _)| (k, one.clone())).collect()
        })?)
    } else {
        None
    };
    Ok(GoodwillieStage {
        n,
        bar: pn,
        to_previous,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConnectivityRow {
    pub n: usize,
    pub valid_through: i32,
    pub betti: Betti,
    /// `H_d(I^n) = 0` for `d < nc` within the valid range.
    pub vanishing_ok: bool,
    /// `H_d(cone(I → P_n I)) = 0` for `d <= (n+1)c - 1` within the valid range.
    pub excisive_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConnectivityReport {
    pub c: i32,
    pub rows: Vec<ConnectivityRow>,
}

impl ConnectivityReport {
    pub fn ok(&self) -> bool {
        self.rows.iter().all(|r| r.vanishing_ok && r.excisive_ok)
    }
}

/// Connectivity of `I^n` and of `I → P_n I` for `n <= n_max`.
pub fn connectivity_report(tower: &Arc<Tower>, n_max: usize) -> Result<ConnectivityReport, FiltrationError> {
    let o = tower.operad();
    let c = match tower.algebra().min_degree() {
        Some(c) if c >= 1 => c,
        Some(c) => return Err(FiltrationError::Invalid(format!("algebra has a class in degree {c} < 1"))),
        None => 1,
    };
    if !o.is_connective(tower.width()) {
        return Err(FiltrationError::Invalid(format!("{} is not connective", o.name())));
    }
    let whole = filtration_piece(tower, FiltrationIndex::new(1, ExtNat::Inf)?)?;
    let mut rows = Vec::new();
    for n in 1..=n_max {
        let piece = filtration_piece(tower, FiltrationIndex::new(n, ExtNat::Inf)?)?;
        let v = piece.bar.valid_through();
        let betti = piece.bar.betti();
        let vanishing_ok = betti.window(i32::MIN, (n as i32 * c - 1).min(v)).is_zero();
        let stage = filtration_piece(tower, FiltrationIndex::new(1, ExtNat::Fin(n + 1))?)?;
        let to_stage = structure_map(&whole, &stage)?;
        let vc = whole.bar.valid_through().min(stage.bar.valid_through());
        let excisive_ok = homology(&cone(&to_stage)).window(i32::MIN, ((n as i32 + 1) * c - 1).min(vc)).is_zero();
        rows.push(ConnectivityRow {
            n,
            valid_through: v,
            betti,
            vanishing_ok,
            excisive_ok,
        });
    }
    Ok(ConnectivityReport { c, rows })
}
