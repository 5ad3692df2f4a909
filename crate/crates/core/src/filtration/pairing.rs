//! Composition pairings `(I^j_n)^i_m → I^{ij}_N` and the power maps built
//! from them.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use super::{FiltrationError, FiltrationIndex};
use crate::bar::{bar, bar_assoc_iso, bar_assoc_over, bar_map_algebra, bar_map_with, AssocIso, BarComplex, BarOptions, Tower};
use crate::chain::ChainMap;
use crate::exactlin::Lin;
use crate::operad::{AlgebraMap, Bimodule};
use crate::par;
use crate::symseq::ExtNat;

/// `(ij, min(ij + (n - j), mj))`.
pub fn pairing_index(outer: FiltrationIndex, inner: FiltrationIndex) -> (usize, ExtNat) {
    let (i, m, j, n) = (outer.i, outer.m, inner.i, inner.m);
    let ij = i * j;
    let bound = ExtNat::Fin(ij).add(n.sub(j)).min(m.mul(j));
    (ij, bound)
}

/// Distinct `(s, parts, largest part)` over partitions of `s <= s_max`
/// into parts `>= j`.
pub fn partition_shapes(j: usize, s_max: usize) -> BTreeSet<(usize, usize, usize)> {
    fn go(rest: usize, max: usize, j: usize, parts: usize, top: usize, total: usize, out: &mut BTreeSet<(usize, usize, usize)>) {
        if parts > 0 {
            out.insert((total, parts, top));
        }
        // parts are generated in non-increasing order
        for p in (j..=max.min(rest)).rev() {
            let top = if parts == 0 { p } else { top };
            go(rest - p, p, j, parts + 1, top, total + p, out);
        }
    }
    let mut out = BTreeSet::new();
    go(s_max, s_max, j.max(1), 0, 0, 0, &mut out);
    out
}

/// Enumerative check of the pairing index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairingOracle {
    pub outer: FiltrationIndex,
    pub inner: FiltrationIndex,
    pub bound: ExtNat,
    pub s_max: usize,
    /// Least arity with any summand.
    pub least_summand: Option<usize>,
    /// Least arity with a summand killed by a truncation.
    pub least_killed: Option<usize>,
    pub ok: bool,
}

fn judge(
    outer: FiltrationIndex,
    inner: FiltrationIndex,
    s_max: usize,
    shapes: &BTreeSet<(usize, usize, usize)>,
) -> PairingOracle {
    let (ij, bound) = pairing_index(outer, inner);
    let mut least_summand = None;
    let mut least_killed = None;
    for &(s, r, top) in shapes {
        if r < outer.i {
            continue;
        }
        let killed = !outer.m.exceeds(r) || !inner.m.exceeds(top);
        if killed {
            least_killed = Some(least_killed.map_or(s, |k: usize| k.min(s)));
        }
        least_summand = Some(least_summand.map_or(s, |k: usize| k.min(s)));
    }
    let floor_ok = least_summand == (ij <= s_max).then_some(ij);
    let sharp = match bound {
        ExtNat::Fin(b) if b <= s_max => least_killed == Some(b),
        _ => least_killed.is_none(),
    };
    PairingOracle {
        outer,
        inner,
        bound,
        s_max,
        least_summand,
        least_killed,
        ok: floor_ok && sharp,
    }
}

pub fn pairing_index_oracle(outer: FiltrationIndex, inner: FiltrationIndex, s_max: usize) -> PairingOracle {
    judge(outer, inner, s_max, &partition_shapes(inner.i, s_max))
}

/// The oracle over all `1 <= i < m <= max` and `1 <= j < n <= max`, each
/// upper index also taken infinite.
pub fn pairing_index_suite(max: usize, s_max: usize) -> Vec<PairingOracle> {
    let indices: Vec<FiltrationIndex> = (1..=max)
        .flat_map(|i| {
            (i + 1..=max)
                .map(ExtNat::Fin)
                .chain([ExtNat::Inf])
                .map(move |m| FiltrationIndex { i, m })
        })
        .collect();
    let shapes: HashMap<usize, BTreeSet<_>> = (1..=max).map(|j| (j, partition_shapes(j, s_max))).collect();
    let pairs: Vec<(FiltrationIndex, FiltrationIndex)> =
        indices.iter().flat_map(|o| indices.iter().map(move |n| (*o, *n))).collect();
    par::map_range(pairs.len(), |k| {
        let (o, n) = pairs[k];
        judge(o, n, s_max, &shapes[&n.i])
    })
}

/// The pairing as a chain map, factored through the associativity map.
#[derive(Clone, Debug)]
pub struct Pairing {
    pub outer: FiltrationIndex,
    pub inner: FiltrationIndex,
    pub index: (usize, ExtNat),
    pub assoc: AssocIso,
    pub target: BarComplex,
    /// `B(X, O, I) → I^{ij}_N`, induced by composing in `O`.
    pub collapse: ChainMap,
    pub map: ChainMap,
}

/// `(I^j_n)^i_m → I^{ij}_N` for an algebra `I`.
pub fn pairing_map(
    i_alg: &crate::operad::Algebra,
    outer: FiltrationIndex,
    inner: FiltrationIndex,
    opts: BarOptions,
) -> Result<Pairing, FiltrationError> {
    let o = i_alg.operad();
    let mi = Bimodule::truncation(o, outer.i, outer.m)?;
    let nj = Bimodule::truncation(o, inner.i, inner.m)?;
    let assoc = bar_assoc_iso(&mi, &nj, i_alg, opts)?;
    pairing_from_assoc(assoc, outer, inner)
}

/// Completes an associativity map with source `B(O_i^m, O, B(O_j^n, O, I))`
/// to the pairing.
pub fn pairing_from_assoc(assoc: AssocIso, outer: FiltrationIndex, inner: FiltrationIndex) -> Result<Pairing, FiltrationError> {
    let tower = assoc.rhs.tower().clone();
    let o = tower.operad().clone();
    let (lo, hi) = pairing_index(outer, inner);
    let l = Bimodule::truncation(&o, lo, hi)?;
    let target = bar(&tower, &l)?;
    let levels = assoc.x.levels.clone();
    let phi: Vec<Vec<Lin<u64>>> = levels
        .iter()
        .enumerate()
        .map(|(t, xb)| {
            let Some(xb) = xb else { return Vec::new() };
            if l.seq().dim(t) == 0 {
                return vec![Vec::new(); xb.total().total_dim()];
            }
            let base = xb.tower().layer(0).clone();
            par::map_range(xb.total().total_dim(), |flat| {
                let (a, id) = xb.element(flat);
                if a > 0 {
                    return Vec::new();
                }
                let root = xb.roots(0).node(id);
                let mut ys = Vec::with_capacity(root.children.len());
                let mut labels = Vec::with_capacity(t);
                for c in root.children.iter() {
                    let nd = base.node(*c);
                    ys.push((nd.children.len(), nd.op));
                    labels.extend(nd.children.iter().map(|x| *x as usize));
                }
                let g = o.gamma(root.op, &ys);
                l.seq().act(t, &labels, &g)
            })
        })
        .collect();
    let collapse = bar_map_with(&assoc.rhs, &target, &|t, x| {
        phi.get(t).and_then(|v| v.get(x as usize)).cloned().unwrap_or_default()
    })?;
    let map = collapse.compose(&assoc.map);
    Ok(Pairing {
        outer,
        inner,
        index: (lo, hi),
        assoc,
        target,
        collapse,
        map,
    })
}

/// `I^n → (J^d)^n → J^{dn}` for an algebra map `f : I → J^d`.
#[derive(Clone, Debug)]
pub struct PowerMap {
    pub d: usize,
    pub n: usize,
    pub source: BarComplex,
    pub pairing: Pairing,
    pub map: ChainMap,
}

/// `jd` is `J^d = B(O_d^∞, O, J)` and `f` lands in `jd.as_algebra()`.
pub fn power_map(f: &AlgebraMap, jd: &BarComplex, n: usize, opts: BarOptions) -> Result<PowerMap, FiltrationError> {
    let o = jd.tower().operad().clone();
    let d = (1..=jd.tower().width())
        .find(|r| jd.module().seq().dim(*r) > 0)
        .ok_or_else(|| FiltrationError::Invalid("J^d is empty".into()))?;
    let outer = FiltrationIndex::new(n, ExtNat::Inf)?;
    let inner = FiltrationIndex::new(d, ExtNat::Inf)?;
    let on = Bimodule::truncation(&o, n, ExtNat::Inf)?;
    let assoc = bar_assoc_over(jd, &f.target, &on, opts.clone())?;
    let ti = Tower::new(&o, &f.source, opts)?;
    let source = bar(&ti, &on)?;
    let bf = bar_map_algebra(f, &source, &assoc.lhs)?;
    let pairing = pairing_from_assoc(assoc, outer, inner)?;
    let map = pairing.map.compose(&bf);
    Ok(PowerMap {
        d,
        n,
        source,
        pairing,
        map,
    })
}
