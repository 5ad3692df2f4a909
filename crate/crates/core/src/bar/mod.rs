//! Normalized bar constructions `B(M, O, I)`.
//!
//! An `n`-simplex is a tree: an operation of `M` at the root, `n` layers of
//! `O`-operations, and basis elements of `I` at the leaves. The layers are
//! shared in a [`Tower`] `L_0 = I`, `L_j = S_O(L_{j-1})`, so several
//! modules can be barred against the same algebra and compared directly.
//!
//! In exact mode `O(1)` is spanned by the unit and degenerate simplices
//! are exactly the trees with an all-unit layer; they are never built. A
//! nondegenerate `n`-simplex has at least `n + 1` leaves, which bounds the
//! bar degree once the algebra is 1-connective.

mod assoc;
mod models;
mod shuffle;

#[cfg(test)]
mod tests;

pub use assoc::*;
pub use models::*;
pub use shuffle::*;

use std::sync::{Arc, OnceLock};

use serde::Serialize;
use thiserror::Error;

use crate::chain::{homology, Betti, ChainComplex, ChainError, ChainMap};
use crate::exactlin::{Acc, Field, Lin};
use crate::operad::{Algebra, AlgebraKind, AlgebraMap, Bimodule, BimoduleMap, Operad, OperadError};
use crate::par;
use crate::symseq::schur::{map_layer, merge, same_op, Build, Layer, Node};
use crate::symseq::SymSeqError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BarError {
    #[error(transparent)]
    Operad(#[from] OperadError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    SymSeq(#[from] SymSeqError),
    #[error("exact mode unavailable: {0}")]
    NotExact(String),
    #[error("arity bound {needed} exceeds the arity cap {cap}")]
    ArityCap { needed: usize, cap: usize },
    #[error("mismatch: {0}")]
    Mismatch(String),
    #[error("{0}")]
    Invalid(String),
}

pub(crate) const UNBOUNDED: i32 = i32::MAX / 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Mode {
    Exact,
    /// Simplices of bar degree above the bound are omitted.
    Truncated(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BarOptions {
    /// Homology is wanted through this degree.
    pub degree_cap: i32,
    pub mode: Mode,
    /// Largest tree width allowed; required when the algebra has a degree-0 part.
    pub arity_cap: Option<usize>,
    /// Lowest operation degree of modules barred against the tower.
    pub module_floor: i32,
}

impl BarOptions {
    pub fn exact(degree_cap: i32) -> Self {
        BarOptions {
            degree_cap,
            mode: Mode::Exact,
            arity_cap: None,
            module_floor: 0,
        }
    }

    pub fn truncated(degree_cap: i32, bar_cap: usize) -> Self {
        BarOptions {
            mode: Mode::Truncated(bar_cap),
            ..Self::exact(degree_cap)
        }
    }

    pub fn with_arity_cap(mut self, cap: usize) -> Self {
        self.arity_cap = Some(cap);
        self
    }
}

type Images = Arc<Vec<Lin<u32>>>;

/// The layers `L_0 = I, L_j = S_O(L_{j-1})` with cached face and
/// degeneracy maps between them.
pub struct Tower {
    operad: Arc<Operad>,
    algebra: Algebra,
    opts: BarOptions,
    /// Largest total degree built.
    top: i32,
    labels: Option<usize>,
    connectivity: i32,
    width: usize,
    max_bar: usize,
    base_level: u32,
    layers: Vec<Arc<Layer>>,
    faces: Vec<Vec<OnceLock<Images>>>,
    degens: Vec<Vec<OnceLock<Images>>>,
}

impl std::fmt::Debug for Tower {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Tower")
            .field("operad", &self.operad.name())
            .field("algebra", &self.algebra.name())
            .field("top", &self.top)
            .field("max_bar", &self.max_bar)
            .field("layers", &self.layers.iter().map(|l| l.len()).collect::<Vec<_>>())
            .finish()
    }
}

impl Tower {
    pub fn new(o: &Arc<Operad>, a: &Algebra, opts: BarOptions) -> Result<Arc<Tower>, BarError> {
        if !Arc::ptr_eq(o, a.operad()) && **o != **a.operad() {
            return Err(BarError::Mismatch(format!("{} vs {}", o.name(), a.operad().name())));
        }
        let labels = match a.kind() {
            AlgebraKind::Labels { count } => Some(*count),
            _ => None,
        };
        let top = if labels.is_some() { UNBOUNDED } else { opts.degree_cap + 1 };
        let floor = opts.module_floor.min(0);
        let c = a.min_degree().unwrap_or(1);
        let width_from_degree = || -> Result<usize, BarError> {
            if let Some(s) = labels {
                return Ok(s);
            }
            if c >= 1 {
                return Ok(((top - floor).max(0) / c) as usize);
            }
            opts.arity_cap
                .ok_or_else(|| BarError::Invalid("an algebra with a degree <= 0 part needs an arity cap".into()))
        };
        let (width, max_bar) = match opts.mode {
            Mode::Exact => {
                if !o.unital_in_arity_one() {
                    return Err(BarError::NotExact(format!("{}(1) is not spanned by the unit", o.name())));
                }
                if labels.is_none() && c < 1 {
                    return Err(BarError::NotExact(format!("{} is not 1-connective", a.name())));
                }
                let max_bar = match labels {
                    Some(s) => s.saturating_sub(1),
                    None => ((top - floor - c).max(0) / (1 + c)) as usize,
                };
                (width_from_degree()?, max_bar)
            }
            Mode::Truncated(n) => (width_from_degree()?, n),
        };
        if let Some(cap) = opts.arity_cap {
            if width > cap && labels.is_none() && c >= 1 {
                return Err(BarError::ArityCap { needed: width, cap });
            }
        }
        if !o.is_connective(width) {
            return Err(BarError::Invalid(format!("{} has operations of negative degree", o.name())));
        }
        let exact = opts.mode == Mode::Exact;
        let mut layers = vec![a.base().clone()];
        for j in 1..=max_bar {
            let mut b = Build::new(if labels.is_some() { UNBOUNDED } else { top - j as i32 - floor }, width);
            b.own_bit = exact;
            let below = layers[j - 1].clone();
            layers.push(Arc::new(Layer::build(o.seq(), below, &b)));
        }
        let faces = (0..=max_bar).map(|j| (0..j).map(|_| OnceLock::new()).collect()).collect();
        let degens = (0..=max_bar).map(|j| (0..=j).map(|_| OnceLock::new()).collect()).collect();
        Ok(Arc::new(Tower {
            operad: o.clone(),
            algebra: a.clone(),
            base_level: a.base().level(),
            opts,
            top,
            labels,
            connectivity: c,
            width,
            max_bar,
            layers,
            faces,
            degens,
        }))
    }

    pub fn operad(&self) -> &Arc<Operad> {
        &self.operad
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn options(&self) -> &BarOptions {
        &self.opts
    }

    pub fn field(&self) -> Field {
        self.operad.field()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn max_bar(&self) -> usize {
        self.max_bar
    }

    /// Largest total degree present in bars over this tower.
    pub fn top(&self) -> i32 {
        self.top
    }

    pub fn labels(&self) -> Option<usize> {
        self.labels
    }

    pub fn layer(&self, j: usize) -> &Arc<Layer> {
        &self.layers[j]
    }

    pub fn is_exact(&self) -> bool {
        self.opts.mode == Mode::Exact
    }

    /// Face `L_j → L_{j-1}` composing the layer `k` steps below the top
    /// of each tree into the one beneath it (the algebra at the bottom).
    pub fn face(&self, j: usize, k: usize) -> Images {
        self.faces[j][k]
            .get_or_init(|| {
                let one = self.field().one();
                let lj = &self.layers[j];
                let below = &self.layers[j - 1];
                let v = if k > 0 {
                    let inner = self.face(j - 1, k - 1);
                    map_layer(lj, below, self.operad.seq(), &same_op(self.field()), &|c| inner[c as usize].clone())
                } else if j == 1 {
                    par::map_range(lj.len(), |i| {
                        let n = lj.node(i as u32);
                        self.algebra.act(n.op, &n.children)
                    })
                } else {
                    let gamma = |x: u64, ys: &[(usize, u64)]| self.operad.gamma(x, ys);
                    par::map_range(lj.len(), |i| {
                        let n = lj.node(i as u32);
                        let kids: Vec<_> = n.children.iter().map(|c| below.child(*c)).collect();
                        let mut acc = Acc::new();
                        merge(below, self.operad.seq(), &vec![(n.op, one.clone())], &kids, &gamma, &one, &mut acc);
                        acc.finish()
                    })
                };
                Arc::new(v)
            })
            .clone()
    }

    /// Degeneracy `L_j → L_{j+1}` inserting a unit layer `k` steps below
    /// the top of each tree.
    pub fn degeneracy(&self, j: usize, k: usize) -> Images {
        self.degens[j][k]
            .get_or_init(|| {
                let one = self.field().one();
                let lj = &self.layers[j];
                let Some(above) = self.layers.get(j + 1) else {
                    return Arc::new(vec![Vec::new(); lj.len()]);
                };
                let Some(u) = self.operad.unit_basis() else {
                    return Arc::new(vec![Vec::new(); lj.len()]);
                };
                let v = if k == 0 {
                    par::map_range(lj.len(), |i| {
                        let node = Node {
                            op: u,
                            children: Box::new([i as u32]),
                        };
                        above.lookup(&node).map(|id| vec![(id, one.clone())]).unwrap_or_default()
                    })
                } else {
                    let inner = self.degeneracy(j - 1, k - 1);
                    map_layer(lj, above, self.operad.seq(), &same_op(self.field()), &|c| inner[c as usize].clone())
                };
                Arc::new(v)
            })
            .clone()
    }
}

/// The totalization of a normalized bar construction, with its bar
/// grading and the range where its homology is certified.
#[derive(Clone)]
pub struct BarComplex {
    tower: Arc<Tower>,
    module: Bimodule,
    roots: Arc<Vec<Arc<Layer>>>,
    total: Arc<ChainComplex>,
    index: Arc<Vec<(u32, u32)>>,
    flat: Arc<Vec<Vec<u32>>>,
    valid_through: i32,
}

impl std::fmt::Debug for BarComplex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BarComplex")
            .field("module", &self.module.name())
            .field("tower", &self.tower)
            .field("dim", &self.total.total_dim())
            .field("valid_through", &self.valid_through)
            .finish()
    }
}

/// Total-degree ordering of the roots: `(total degree, bar degree, id)`.
fn flatten(roots: &[Arc<Layer>]) -> (Vec<(u32, u32)>, Vec<Vec<u32>>, Vec<i32>) {
    let mut all: Vec<(i32, u32, u32)> = Vec::new();
    for (n, r) in roots.iter().enumerate() {
        for id in 0..r.len() as u32 {
            all.push((r.degree(id) + n as i32, n as u32, id));
        }
    }
    all.sort_unstable();
    let mut flat: Vec<Vec<u32>> = roots.iter().map(|r| vec![0; r.len()]).collect();
    for (k, (_, n, id)) in all.iter().enumerate() {
        flat[*n as usize][*id as usize] = k as u32;
    }
    let degrees = all.iter().map(|t| t.0).collect();
    (all.into_iter().map(|(_, n, id)| (n, id)).collect(), flat, degrees)
}

/// `B(M, O, I)` over the tower of `I`.
pub fn bar(tower: &Arc<Tower>, m: &Bimodule) -> Result<BarComplex, BarError> {
    if !Arc::ptr_eq(tower.operad(), m.operad()) && **tower.operad() != **m.operad() {
        return Err(BarError::Mismatch(format!("{} is a module over {}", m.name(), m.operad().name())));
    }
    let floor = m.seq().min_degree_upto(tower.width);
    if floor < tower.opts.module_floor.min(0) {
        return Err(BarError::Invalid(format!("{} has operations below the tower's module floor", m.name())));
    }
    if tower.max_bar > 0 && !m.has_right() {
        return Err(BarError::Invalid(format!("{} has no right action", m.name())));
    }
    let field = tower.field();
    let exact = tower.is_exact();
    let full_mask = tower.labels.map(|s| if s == 64 { u64::MAX } else { (1u64 << s) - 1 });
    let roots: Vec<Arc<Layer>> = (0..=tower.max_bar)
        .map(|n| {
            let cap = if tower.labels.is_some() { UNBOUNDED } else { tower.top - n as i32 };
            let mut b = Build::new(cap, tower.width);
            b.full_mask = full_mask;
            if exact {
                b.nonunit = Some(((1u32 << n) - 1) << tower.base_level);
            }
            Arc::new(Layer::build(m.seq(), tower.layers[n].clone(), &b))
        })
        .collect();
    let faces: Vec<Vec<Lin<u32>>> = (1..=tower.max_bar)
        .map(|n| root_faces(tower, m, &roots[n], &roots[n - 1], n))
        .collect();
    let (index, flat, degrees) = flatten(&roots);
    let boundary: Vec<Lin<usize>> = par::map(&index, |(n, id)| {
        let n = *n as usize;
        let mut acc = Acc::new();
        let sign = field.sign(n % 2 == 1);
        for (t, x) in roots[n].boundary(*id) {
            acc.push(flat[n][*t as usize] as usize, &sign * x);
        }
        if n > 0 {
            for (t, x) in &faces[n - 1][*id as usize] {
                acc.push(flat[n - 1][*t as usize] as usize, x.clone());
            }
        }
        acc.finish()
    });
    let total = Arc::new(ChainComplex::from_flat(field, &degrees, &boundary)?);
    let valid_through = if tower.labels.is_some() {
        total.d_max()
    } else {
        let c = tower.connectivity.max(0);
        let mut v = tower.top - 1;
        if let Mode::Truncated(n) = tower.opts.mode {
            v = v.min(n as i32 + floor + c - 1);
        }
        if let Some(cap) = tower.algebra.cap() {
            v = v.min(cap + floor - 1);
        }
        v
    };
    Ok(BarComplex {
        tower: tower.clone(),
        module: m.clone(),
        roots: Arc::new(roots),
        total,
        index: Arc::new(index),
        flat: Arc::new(flat),
        valid_through,
    })
}

/// `Σ_i (-1)^i d_i` from bar degree `n` to `n - 1`.
fn root_faces(tower: &Tower, m: &Bimodule, rn: &Layer, below: &Layer, n: usize) -> Vec<Lin<u32>> {
    let field = tower.field();
    let one = field.one();
    let ln = &tower.layers[n];
    let rho = m.right_fn().expect("checked by caller");
    let law = |x: u64, ys: &[(usize, u64)]| rho(x, ys, &mut Vec::new());
    let mut total: Vec<Acc<u32>> = par::map_range(rn.len(), |i| {
        let node = rn.node(i as u32);
        let kids: Vec<_> = node.children.iter().map(|c| ln.child(*c)).collect();
        let mut acc = Acc::new();
        merge(below, m.seq(), &vec![(node.op, one.clone())], &kids, &law, &one, &mut acc);
        acc
    });
    for i in 1..=n {
        let f = tower.face(n, i - 1);
        let di = map_layer(rn, below, m.seq(), &same_op(field), &|c| f[c as usize].clone());
        let sign = field.sign(i % 2 == 1);
        for (acc, v) in total.iter_mut().zip(di) {
            acc.add_scaled(&sign, &v);
        }
    }
    total.into_iter().map(|a| a.finish()).collect()
}

impl BarComplex {
    pub fn tower(&self) -> &Arc<Tower> {
        &self.tower
    }

    pub fn module(&self) -> &Bimodule {
        &self.module
    }

    pub fn total(&self) -> &Arc<ChainComplex> {
        &self.total
    }

    pub fn mode(&self) -> Mode {
        self.tower.opts.mode
    }

    pub fn valid_through(&self) -> i32 {
        self.valid_through
    }

    pub fn field(&self) -> Field {
        self.tower.field()
    }

    pub fn max_bar(&self) -> usize {
        self.roots.len() - 1
    }

    /// Roots of bar degree `n`: `S_M(L_n)` without degenerate trees.
    pub fn roots(&self, n: usize) -> &Arc<Layer> {
        &self.roots[n]
    }

    pub fn bar_degree(&self, flat: usize) -> usize {
        self.index[flat].0 as usize
    }

    /// `(bar degree, root id)` of a flat basis element.
    pub fn element(&self, flat: usize) -> (usize, u32) {
        let (n, id) = self.index[flat];
        (n as usize, id)
    }

    pub fn flat_index(&self, n: usize, id: u32) -> usize {
        self.flat[n][id as usize] as usize
    }

    /// Root-layer combination at bar degree `n` as a flat vector.
    pub fn flat_lin(&self, n: usize, v: &Lin<u32>) -> Lin<usize> {
        let mut out: Lin<usize> = v.iter().map(|(id, x)| (self.flat_index(n, *id), x.clone())).collect();
        out.sort_by_key(|t| t.0);
        out
    }

    /// Homology through `valid_through`.
    pub fn betti(&self) -> Betti {
        homology(&self.total).through(self.valid_through)
    }
}

/// `TQ(I) = B(O(1), O, I)`.
pub fn tq(tower: &Arc<Tower>) -> Result<BarComplex, BarError> {
    let m = Bimodule::arity_one(tower.operad())?;
    bar(tower, &m.with_name("TQ"))
}

/// `B(f, O, I)` for a map of right modules; both bars must share a tower.
pub fn bar_map_module(f: &BimoduleMap, source: &BarComplex, target: &BarComplex) -> Result<ChainMap, BarError> {
    bar_map_with(source, target, &|r, b| f.map.apply(r, b))
}

/// The map of bars over a shared tower induced by a map on root operations.
pub fn bar_map_with(
    source: &BarComplex,
    target: &BarComplex,
    op_map: &(dyn Fn(usize, u64) -> Lin<u64> + Sync),
) -> Result<ChainMap, BarError> {
    if !Arc::ptr_eq(&source.tower, &target.tower) {
        return Err(BarError::Mismatch("bars over different towers".into()));
    }
    let field = source.field();
    let mut images = vec![Vec::new(); source.total.total_dim()];
    for n in 0..=source.max_bar().min(target.max_bar()) {
        let v = map_layer(&source.roots[n], &target.roots[n], target.module.seq(), op_map, &|c| vec![(c, field.one())]);
        for (id, w) in v.into_iter().enumerate() {
            images[source.flat_index(n, id as u32)] = target.flat_lin(n, &w);
        }
    }
    Ok(ChainMap::from_flat(source.total.clone(), target.total.clone(), &images)?)
}

/// `B(M, O, f)` for an algebra map between the towers' algebras.
pub fn bar_map_algebra(f: &AlgebraMap, source: &BarComplex, target: &BarComplex) -> Result<ChainMap, BarError> {
    let (ts, tt) = (&source.tower, &target.tower);
    if f.source.dim() != ts.algebra.dim() || f.target.dim() != tt.algebra.dim() {
        return Err(BarError::Mismatch("algebra map does not match the towers".into()));
    }
    if source.module.seq() != target.module.seq() {
        return Err(BarError::Mismatch("bars over different modules".into()));
    }
    let field = source.field();
    let seq = ts.operad.seq();
    let top = source.max_bar().min(target.max_bar());
    let mut level: Vec<Lin<u32>> = f.images.clone();
    let mut images = vec![Vec::new(); source.total.total_dim()];
    for n in 0..=top {
        if n > 0 {
            let prev = level;
            level = map_layer(&ts.layers[n], &tt.layers[n], seq, &same_op(field), &|c| prev[c as usize].clone());
        }
        let v = map_layer(&source.roots[n], &target.roots[n], target.module.seq(), &same_op(field), &|c| {
            level[c as usize].clone()
        });
        for (id, w) in v.into_iter().enumerate() {
            images[source.flat_index(n, id as u32)] = target.flat_lin(n, &w);
        }
    }
    Ok(ChainMap::from_flat(source.total.clone(), target.total.clone(), &images)?)
}
