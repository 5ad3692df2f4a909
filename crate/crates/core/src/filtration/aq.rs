//! Lifting maps with null `TQ` along the filtration.

use serde::Serialize;

use super::FiltrationError;
use crate::bar::{bar, bar_map_algebra, bar_map_module, tq, BarOptions, Tower};
use crate::chain::{
    factor_up_to_homotopy, find_null_homotopy, homology_rank, homotopy_fiber, is_quasi_iso_through, lift_to_fiber,
    ChainHomotopy, ChainMap,
};
use crate::exactlin::Matrix;
use crate::operad::{AlgebraMap, Bimodule, BimoduleMap};
use crate::symseq::ExtNat;

/// The chain-level lift `I^1 → J^2` for `s = 1`.
#[derive(Clone, Debug)]
pub struct Lift {
    /// `B(O, O, f) : I^1 → J^1`.
    pub g: ChainMap,
    /// `I^1 → hofib(J^1 → J^1_2)`.
    pub into_fiber: ChainMap,
    /// `J^2 → hofib(J^1 → J^1_2)`.
    pub comparison: ChainMap,
    /// `I^1 → J^2`.
    pub lift: Option<ChainMap>,
    /// `comparison ∘ lift ≃ into_fiber`.
    pub homotopy: Option<ChainHomotopy>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AqReport {
    pub s: usize,
    pub c: i32,
    /// Each stage has null homotopic `TQ`.
    pub stages_null: Vec<bool>,
    /// `H_d(f) = 0` for `d < 2^s c` within the checked range.
    pub vanishing_ok: bool,
    pub checked_through: i32,
    /// The fiber comparison is a quasi-isomorphism in the valid range.
    pub fiber_quasi_iso: Option<bool>,
    /// The lift exists and factors the fiber map up to homotopy.
    pub lift_ok: Option<bool>,
}

impl AqReport {
    pub fn ok(&self) -> bool {
        self.stages_null.iter().all(|b| *b)
            && self.vanishing_ok
            && self.fiber_quasi_iso != Some(false)
            && self.lift_ok != Some(false)
    }
}

fn tq_null(f: &AlgebraMap, opts: &BarOptions) -> Result<Option<ChainHomotopy>, FiltrationError> {
    let o = f.source.operad();
    let ti = Tower::new(o, &f.source, opts.clone())?;
    let tj = Tower::new(o, &f.target, opts.clone())?;
    let (a, b) = (tq(&ti)?, tq(&tj)?);
    let tf = bar_map_algebra(f, &a, &b)?;
    Ok(find_null_homotopy(&tf))
}

/// Checks a factorization `f = f_s ∘ … ∘ f_1` with null `TQ(f_k)`, and
/// for `s = 1` builds the lift through `J^2`.
pub fn aq_lift(stages: &[AlgebraMap], opts: BarOptions) -> Result<(AqReport, Option<Lift>), FiltrationError> {
    let Some(first) = stages.first() else {
        return Err(FiltrationError::Invalid("a factorization needs at least one stage".into()));
    };
    for w in stages.windows(2) {
        if w[0].target.dim() != w[1].source.dim() {
            return Err(FiltrationError::Invalid("stages do not compose".into()));
        }
    }
    let s = stages.len();
    let f = stages[1..].iter().fold(first.clone(), |acc, g| g.after(&acc));
    let (src, dst) = (&f.source, &f.target);
    let c = src.min_degree().unwrap_or(1).min(dst.min_degree().unwrap_or(1));
    if c < 1 {
        return Err(FiltrationError::Invalid("algebras must be connected".into()));
    }
    let stages_null = stages
        .iter()
        .map(|g| tq_null(g, &opts).map(|h| h.is_some()))
        .collect::<Result<Vec<_>, _>>()?;

    let fc = f.chain_map()?;
    let bound = (1i32 << s.min(20)) * c;
    let cap = [src.cap(), dst.cap(), Some(opts.degree_cap)].into_iter().flatten().min().unwrap_or(opts.degree_cap);
    let checked_through = (bound - 1).min(cap);
    let vanishing_ok = (fc.source.d_min().min(0)..=checked_through).all(|d| homology_rank(&fc, d) == 0);

    let mut report = AqReport {
        s,
        c,
        stages_null,
        vanishing_ok,
        checked_through,
        fiber_quasi_iso: None,
        lift_ok: None,
    };
    if s != 1 || !report.stages_null[0] {
        return Ok((report, None));
    }
    let lift = lift_one(&f, &opts)?;
    report.fiber_quasi_iso = Some(lift.1);
    report.lift_ok = Some(lift.0.lift.is_some());
    Ok((report, Some(lift.0)))
}

fn lift_one(f: &AlgebraMap, opts: &BarOptions) -> Result<(Lift, bool), FiltrationError> {
    let o = f.source.operad();
    let ti = Tower::new(o, &f.source, opts.clone())?;
    let tj = Tower::new(o, &f.target, opts.clone())?;
    let whole = (1, ExtNat::Inf);
    let first = (1, ExtNat::Fin(2));
    let o1 = Bimodule::truncation(o, 1, ExtNat::Inf)?;
    let o12 = Bimodule::truncation(o, 1, ExtNat::Fin(2))?;
    let o2 = Bimodule::truncation(o, 2, ExtNat::Inf)?;
    let (i1, i12) = (bar(&ti, &o1)?, bar(&ti, &o12)?);
    let (j1, j12, j2) = (bar(&tj, &o1)?, bar(&tj, &o12)?, bar(&tj, &o2)?);

    let g = bar_map_algebra(f, &i1, &j1)?;
    let p = bar_map_module(&BimoduleMap::truncation(o, whole, first)?, &j1, &j12)?;
    let trunc_i = bar_map_module(&BimoduleMap::truncation(o, whole, first)?, &i1, &i12)?;
    let tf = bar_map_algebra(f, &i12, &j12)?;
    let h = find_null_homotopy(&tf).ok_or_else(|| FiltrationError::NotNull("TQ(f)".into()))?;
    let pg = p.compose(&g);
    let k_comps: Vec<Matrix> = i1.total().degrees().map(|d| h.comp(d).mul(&trunc_i.comp(d))).collect();
    let k = ChainHomotopy::new(pg.clone(), ChainMap::zero(pg.source.clone(), pg.target.clone()), k_comps)?;
    let fib = homotopy_fiber(&p);
    let into_fiber = lift_to_fiber(&fib, &g, &k);

    let incl = bar_map_module(&BimoduleMap::truncation(o, (2, ExtNat::Inf), whole)?, &j2, &j1)?;
    let pi = p.compose(&incl);
    let field = o.field();
    let zero_comps: Vec<Matrix> = j2.total().degrees().map(|d| Matrix::zeros(field, j12.total().dim(d + 1), j2.total().dim(d))).collect();
    let zero = ChainHomotopy::new(pi.clone(), ChainMap::zero(pi.source.clone(), pi.target.clone()), zero_comps)?;
    let comparison = lift_to_fiber(&fib, &incl, &zero);
    let v = j1.valid_through().min(j12.valid_through()).min(j2.valid_through()) - 1;
    let quasi = is_quasi_iso_through(&comparison, v);
    let (lift, homotopy) = match factor_up_to_homotopy(&comparison, &into_fiber) {
        Some((l, hh)) => (Some(l), Some(hh)),
        None => (None, None),
    };
    Ok((
        Lift {
            g,
            into_fiber,
            comparison,
            lift,
            homotopy,
        },
        quasi,
    ))
}
