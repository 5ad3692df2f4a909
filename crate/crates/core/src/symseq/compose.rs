//! The composition product of symmetric sequences, maps of sequences and
//! the associativity comparison.
//!
//! `(X∘Y)(s)` is computed as the multilinear part of `S_X(S_Y(L_s))` for a
//! layer `L_s` of `s` labels; the symmetric group acts by relabelling.

use std::sync::Arc;

use super::schur::{map_layer, same_op, Build, Layer, Node};
use super::{perm, ExtNat, Level, SymRep, SymSeq, SymSeqError, Tail};
use crate::chain::{ChainComplex, ChainMap};
use crate::exactlin::{inverse, Acc, Lin};

/// A map of symmetric sequences, given on basis operations.
#[derive(Clone)]
pub struct SeqMap {
    pub source: SymSeq,
    pub target: SymSeq,
    kind: MapKind,
}

#[derive(Clone)]
enum MapKind {
    /// Identity on levels `lo <= r < hi`, zero elsewhere; source and
    /// target share their bases there.
    Window { lo: usize, hi: ExtNat },
    Levels(Vec<Vec<Lin<u64>>>),
}

impl std::fmt::Debug for SeqMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SeqMap").field("source", &self.source).field("target", &self.target).finish()
    }
}

impl SeqMap {
    pub fn identity(x: &SymSeq) -> Self {
        SeqMap {
            source: x.clone(),
            target: x.clone(),
            kind: MapKind::Window { lo: 0, hi: ExtNat::Inf },
        }
    }

    pub fn zero(x: &SymSeq, y: &SymSeq) -> Self {
        SeqMap {
            source: x.clone(),
            target: y.clone(),
            kind: MapKind::Levels(Vec::new()),
        }
    }

    /// Images of basis elements level by level; missing levels map to zero.
    pub fn from_levels(source: &SymSeq, target: &SymSeq, images: Vec<Vec<Lin<u64>>>) -> Result<Self, SymSeqError> {
        for (r, imgs) in images.iter().enumerate() {
            if imgs.len() as u64 != source.dim(r) && !imgs.is_empty() {
                return Err(SymSeqError::Invalid(format!("level {r}: expected {} images", source.dim(r))));
            }
            for v in imgs {
                if v.iter().any(|(b, _)| *b >= target.dim(r)) {
                    return Err(SymSeqError::Invalid(format!("level {r}: image outside target")));
                }
            }
        }
        Ok(SeqMap {
            source: source.clone(),
            target: target.clone(),
            kind: MapKind::Levels(images),
        })
    }

    /// Builds from one chain map per level `0..maps.len()`.
    pub fn from_chain_maps(source: &SymSeq, target: &SymSeq, maps: &[ChainMap]) -> Result<Self, SymSeqError> {
        let images = maps
            .iter()
            .map(|m| m.flat_images().into_iter().map(|v| v.into_iter().map(|(k, x)| (k as u64, x)).collect()).collect())
            .collect();
        Self::from_levels(source, target, images)
    }

    pub fn apply(&self, r: usize, b: u64) -> Lin<u64> {
        match &self.kind {
            MapKind::Window { lo, hi } => {
                if r >= *lo && hi.exceeds(r) && self.target.dim(r) > 0 {
                    vec![(b, self.source.field().one())]
                } else {
                    Vec::new()
                }
            }
            MapKind::Levels(levels) => match levels.get(r) {
                Some(imgs) if !imgs.is_empty() => imgs[b as usize].clone(),
                _ => Vec::new(),
            },
        }
    }

    pub fn apply_lin(&self, r: usize, v: &Lin<u64>) -> Lin<u64> {
        let mut acc = Acc::new();
        for (b, x) in v {
            acc.add_scaled(x, &self.apply(r, *b));
        }
        acc.finish()
    }

    /// Level `r` as a chain map.
    pub fn level_map(&self, r: usize) -> Result<ChainMap, SymSeqError> {
        let s = Arc::new(level_complex(&self.source, r));
        let t = Arc::new(level_complex(&self.target, r));
        let imgs: Vec<Lin<usize>> = (0..self.source.dim(r))
            .map(|b| self.apply(r, b).into_iter().map(|(k, x)| (k as usize, x)).collect())
            .collect();
        Ok(ChainMap::from_flat_unchecked(s, t, &imgs)?)
    }

    /// Checks the chain-map and equivariance conditions through arity `cap`.
    pub fn check(&self, cap: usize) -> Result<(), SymSeqError> {
        for r in 0..=cap {
            let f = self.level_map(r)?;
            if !f.is_chain_map() {
                return Err(SymSeqError::Invalid(format!("level {r} does not commute with d")));
            }
            for i in 0..r.saturating_sub(1) {
                for b in 0..self.source.dim(r) {
                    let lhs = self.apply_lin(r, &self.source.swap(r, i, &vec![(b, self.source.field().one())]));
                    let rhs = self.target.swap(r, i, &self.apply(r, b));
                    if lhs != rhs {
                        return Err(SymSeqError::Action(format!("level {r} is not equivariant for s_{}", i + 1)));
                    }
                }
            }
        }
        Ok(())
    }

    /// `self ∘ other`, materialized through arity `cap`.
    pub fn then_after(&self, other: &SeqMap, cap: usize) -> SeqMap {
        let images = (0..=cap)
            .map(|r| (0..other.source.dim(r)).map(|b| self.apply_lin(r, &other.apply(r, b))).collect())
            .collect();
        SeqMap {
            source: other.source.clone(),
            target: self.target.clone(),
            kind: MapKind::Levels(images),
        }
    }
}

/// Level `r` of a sequence as a chain complex on its basis.
pub fn level_complex(x: &SymSeq, r: usize) -> ChainComplex {
    match x.level(r) {
        Level::Zero => ChainComplex::zero(x.field()),
        Level::Trivial => ChainComplex::point(x.field(), 0),
        Level::Regular => ChainComplex::concentrated(x.field(), 0, perm::factorial(r) as usize),
        Level::Dense(rep) => (*rep.complex).clone(),
    }
}

/// Truncation map `X_i^m → X_j^n` for `j <= i`, `n <= m`.
pub fn truncation_map(x: &SymSeq, from: (usize, ExtNat), to: (usize, ExtNat)) -> Result<SeqMap, SymSeqError> {
    let (i, m) = from;
    let (j, n) = to;
    if j > i || n > m {
        return Err(SymSeqError::Invalid(format!("no truncation map from ({i},{m}) to ({j},{n})")));
    }
    Ok(SeqMap {
        source: x.truncate(i, m)?,
        target: x.truncate(j, n)?,
        kind: MapKind::Window { lo: i, hi: n },
    })
}

/// One summand `X(r) ⊗_{Σ_r} (Y(s_1) ⊗ … ⊗ Y(s_r))` of a composite level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Summand {
    pub r: usize,
    /// Arities of the inner operations, weakly decreasing.
    pub sizes: Vec<usize>,
    /// Basis elements of the level belonging to this summand.
    pub basis: Vec<usize>,
}

/// Summand decomposition of every level of a composite.
#[derive(Clone, Debug, Default)]
pub struct ComposeWitness {
    pub levels: Vec<Vec<Summand>>,
}

impl ComposeWitness {
    /// Inclusion of summand `k` of level `s` as a chain map.
    pub fn inclusion(&self, c: &Composite, s: usize, k: usize) -> Result<ChainMap, SymSeqError> {
        let (sub, full, basis) = self.parts(c, s, k);
        let imgs: Vec<Lin<usize>> = basis.iter().map(|b| vec![(*b, c.seq.field().one())]).collect();
        Ok(ChainMap::from_flat(sub, full, &imgs)?)
    }

    /// Projection of level `s` onto summand `k`.
    pub fn projection(&self, c: &Composite, s: usize, k: usize) -> Result<ChainMap, SymSeqError> {
        let (sub, full, basis) = self.parts(c, s, k);
        let mut imgs: Vec<Lin<usize>> = vec![Vec::new(); full.total_dim()];
        for (i, b) in basis.iter().enumerate() {
            imgs[*b] = vec![(i, c.seq.field().one())];
        }
        Ok(ChainMap::from_flat(full, sub, &imgs)?)
    }

    fn parts(&self, c: &Composite, s: usize, k: usize) -> (Arc<ChainComplex>, Arc<ChainComplex>, Vec<usize>) {
        let full = Arc::new(level_complex(&c.seq, s));
        let basis = self.levels[s][k].basis.clone();
        let degrees: Vec<i32> = basis.iter().map(|b| full.degree_of(*b)).collect();
        let mut pos = std::collections::HashMap::new();
        for (i, b) in basis.iter().enumerate() {
            pos.insert(*b, i);
        }
        let fb = full.flat_boundaries();
        let boundary: Vec<Lin<usize>> = basis.iter().map(|b| fb[*b].iter().map(|(t, x)| (pos[t], x.clone())).collect()).collect();
        let sub = Arc::new(ChainComplex::from_flat(c.seq.field(), &degrees, &boundary).expect("summands are subcomplexes"));
        (sub, full, basis)
    }
}

/// Tree bases of one composite level.
#[derive(Clone, Debug)]
pub struct LevelTrees {
    pub labels: Arc<Layer>,
    pub inner: Arc<Layer>,
    pub root: Arc<Layer>,
}

/// `X∘Y` through a finite arity with its trees and summand witness.
#[derive(Clone, Debug)]
pub struct Composite {
    pub seq: SymSeq,
    pub witness: ComposeWitness,
    pub trees: Vec<Option<LevelTrees>>,
}

const UNBOUNDED: i32 = i32::MAX / 4;

fn level_trees(x: &SymSeq, y: &SymSeq, s: usize) -> LevelTrees {
    let field = x.field();
    let labels = Arc::new(Layer::labels(field, s));
    let inner = Arc::new(Layer::build(y, labels.clone(), &Build::new(UNBOUNDED, s)));
    let mut opts = Build::new(UNBOUNDED, s);
    opts.full_mask = Some(if s == 64 { u64::MAX } else { (1u64 << s) - 1 });
    let root = Arc::new(Layer::build(x, inner.clone(), &opts));
    LevelTrees { labels, inner, root }
}

/// Action of `s_i` on a labelled tree level, as flat images.
pub(crate) fn relabel(x: &SymSeq, y: &SymSeq, t: &LevelTrees, i: usize) -> Vec<Lin<usize>> {
    let field = x.field();
    let swap = move |c: u32| {
        let c = c as usize;
        let d = if c == i { i + 1 } else if c == i + 1 { i } else { c };
        vec![(d as u32, field.one())]
    };
    let inner = map_layer(&t.inner, &t.inner, y, &same_op(field), &swap);
    let root = map_layer(&t.root, &t.root, x, &same_op(field), &|c| inner[c as usize].clone());
    root.into_iter().map(|v| v.into_iter().map(|(k, a)| (k as usize, a)).collect()).collect()
}

fn check_caps(x: &SymSeq, y: &SymSeq, s_cap: usize) -> Result<(), SymSeqError> {
    if !y.is_reduced() {
        return Err(SymSeqError::NotReduced);
    }
    if x.field() != y.field() {
        return Err(SymSeqError::Chain(crate::chain::ChainError::FieldMismatch(x.field(), y.field())));
    }
    for z in [x, y] {
        if let Some(cap) = z.arity_cap() {
            if cap < s_cap {
                return Err(SymSeqError::ArityCap { cap, needed: s_cap });
            }
        }
    }
    Ok(())
}

/// Levels `0..=s_cap` of `X∘Y`. Higher levels of the result are unknown.
pub fn compose(x: &SymSeq, y: &SymSeq, s_cap: usize) -> Result<Composite, SymSeqError> {
    check_caps(x, y, s_cap)?;
    let field = x.field();
    let mut levels = vec![x.level(0).clone()];
    let mut witness = ComposeWitness {
        levels: vec![if x.dim(0) > 0 {
            vec![Summand {
                r: 0,
                sizes: vec![],
                basis: (0..x.dim(0) as usize).collect(),
            }]
        } else {
            vec![]
        }],
    };
    let mut trees = vec![None];
    for s in 1..=s_cap {
        let t = level_trees(x, y, s);
        let complex = Arc::new(t.root.complex()?);
        let gens: Vec<Vec<Lin<usize>>> = (0..s - 1).map(|i| relabel(x, y, &t, i)).collect();
        let rep = SymRep::from_flat(s, complex.clone(), &gens)?;
        levels.push(if complex.is_zero() { Level::Zero } else { Level::Dense(Arc::new(rep)) });
        let mut summands: Vec<Summand> = Vec::new();
        for id in 0..t.root.len() as u32 {
            let node = t.root.node(id);
            let mut sizes: Vec<usize> = node.children.iter().map(|c| t.inner.arity(*c)).collect();
            sizes.sort_unstable_by(|a, b| b.cmp(a));
            let r = sizes.len();
            match summands.iter_mut().find(|m| m.r == r && m.sizes == sizes) {
                Some(m) => m.basis.push(id as usize),
                None => summands.push(Summand {
                    r,
                    sizes,
                    basis: vec![id as usize],
                }),
            }
        }
        summands.sort_by(|a, b| (a.r, &a.sizes).cmp(&(b.r, &b.sizes)));
        witness.levels.push(summands);
        trees.push(Some(t));
    }
    let tail = if x.max_arity().is_some_and(|a| a == 0) { Tail::Zero } else { Tail::Unknown };
    Ok(Composite {
        seq: SymSeq::new(field, levels, tail)?,
        witness,
        trees,
    })
}

/// `f∘g: X∘Y → X'∘Y'` through arity `s_cap`, with the two composites.
pub fn compose_map(f: &SeqMap, g: &SeqMap, s_cap: usize) -> Result<(Composite, Composite, SeqMap), SymSeqError> {
    f.check(s_cap)?;
    g.check(s_cap)?;
    let src = compose(&f.source, &g.source, s_cap)?;
    let dst = compose(&f.target, &g.target, s_cap)?;
    let field = f.source.field();
    let mut images = vec![(0..f.source.dim(0)).map(|b| f.apply(0, b)).collect::<Vec<_>>()];
    for s in 1..=s_cap {
        let (a, b) = (src.trees[s].as_ref().unwrap(), dst.trees[s].as_ref().unwrap());
        let one = field.one();
        let inner = map_layer(&a.inner, &b.inner, &g.target, &|r, op| g.apply(r, op), &|c| vec![(c, one.clone())]);
        let root = map_layer(&a.root, &b.root, &f.target, &|r, op| f.apply(r, op), &|c| inner[c as usize].clone());
        images.push(root.into_iter().map(|v| v.into_iter().map(|(k, x)| (k as u64, x)).collect()).collect());
    }
    let map = SeqMap::from_levels(&src.seq, &dst.seq, images)?;
    Ok((src, dst, map))
}

/// The comparison `((X∘Y)∘Z)(s) → (X∘(Y∘Z))(s)` for `s = 1..=s_cap`, built
/// by expanding both sides into three-level trees.
pub fn associator(x: &SymSeq, y: &SymSeq, z: &SymSeq, s_cap: usize) -> Result<Vec<ChainMap>, SymSeqError> {
    let field = x.field();
    let xy = compose(x, y, s_cap)?;
    let yz = compose(y, z, s_cap)?;
    let lhs = compose(&xy.seq, z, s_cap)?;
    let rhs = compose(x, &yz.seq, s_cap)?;
    let one = field.one();
    let mut out = Vec::new();
    for s in 1..=s_cap {
        let labels = Arc::new(Layer::labels(field, s));
        let zl = Arc::new(Layer::build(z, labels, &Build::new(UNBOUNDED, s)));
        let yl = Arc::new(Layer::build(y, zl.clone(), &Build::new(UNBOUNDED, s)));
        let mut opts = Build::new(UNBOUNDED, s);
        opts.full_mask = Some((1u64 << s) - 1);
        let xl = Layer::build(x, yl.clone(), &opts);

        // ((X∘Y)∘Z): the root operation is a labelled X∘Y tree whose label k
        // receives the k-th child.
        let lt = lhs.trees[s].as_ref().unwrap();
        let from_lhs: Vec<Lin<usize>> = (0..lt.root.len() as u32)
            .map(|id| {
                let node = lt.root.node(id);
                let t = node.children.len();
                let w = xy.trees[t].as_ref().unwrap();
                let wroot = w.root.node(node.op as u32);
                let zs: Vec<u32> = node.children.iter().map(|c| lookup_z(&lt.inner, *c, &zl)).collect();
                // Items in order: x, the y's, then the z's by label.
                let ys: Vec<u32> = wroot.children.to_vec();
                let mut degs = vec![0i32];
                degs.extend(ys.iter().map(|c| w.inner.op_degree(*c)));
                degs.extend(zs.iter().map(|c| zl.degree(*c)));
                // Target order: x, then each y followed by its z's.
                let mut dest = vec![0usize; degs.len()];
                let mut pos = 1;
                for (j, yc) in ys.iter().enumerate() {
                    dest[1 + j] = pos;
                    pos += 1;
                    for lab in w.inner.node(*yc).children.iter() {
                        dest[1 + ys.len() + *lab as usize] = pos;
                        pos += 1;
                    }
                }
                let sign = field.sign(perm::koszul_odd(&degs, &dest));
                let mids: Vec<Lin<u32>> = ys
                    .iter()
                    .map(|yc| {
                        let yn = w.inner.node(*yc);
                        let kids: Vec<u32> = yn.children.iter().map(|lab| zs[*lab as usize]).collect();
                        let mut acc = Acc::new();
                        yl.canonical(y, &vec![(yn.op, one.clone())], &kids, &one, &mut acc);
                        acc.finish()
                    })
                    .collect();
                let mut acc = Acc::new();
                let refs: Vec<&Lin<u32>> = mids.iter().collect();
                super::schur::expand(&refs, &mut |tuple, c| {
                    xl.canonical(x, &vec![(wroot.op, one.clone())], tuple, &(c * &sign), &mut acc)
                });
                acc.finish().into_iter().map(|(k, a)| (k as usize, a)).collect()
            })
            .collect();

        // (X∘(Y∘Z)): each child is a labelled Y∘Z tree over a subset of labels.
        let rt = rhs.trees[s].as_ref().unwrap();
        let mids: Vec<Lin<u32>> = (0..rt.inner.len() as u32)
            .map(|c| {
                let node = rt.inner.node(c);
                let t = node.children.len();
                let v = yz.trees[t].as_ref().unwrap();
                let vroot = v.root.node(node.op as u32);
                let kids: Vec<u32> = vroot
                    .children
                    .iter()
                    .map(|zc| {
                        let zn = v.inner.node(*zc);
                        let labs: Box<[u32]> = zn.children.iter().map(|l| node.children[*l as usize]).collect();
                        zl.lookup(&Node { op: zn.op, children: labs }).expect("relabelled tree")
                    })
                    .collect();
                let mut acc = Acc::new();
                yl.canonical(y, &vec![(vroot.op, one.clone())], &kids, &one, &mut acc);
                acc.finish()
            })
            .collect();
        let from_rhs = map_layer(&rt.root, &xl, x, &same_op(field), &|c| mids[c as usize].clone());
        let from_rhs: Vec<Lin<usize>> = from_rhs.into_iter().map(|v| v.into_iter().map(|(k, a)| (k as usize, a)).collect()).collect();

        let tc = Arc::new(xl.complex()?);
        let lc = Arc::new(level_complex(&lhs.seq, s));
        let rc = Arc::new(level_complex(&rhs.seq, s));
        let a = ChainMap::from_flat(lc, tc.clone(), &from_lhs)?;
        let b = ChainMap::from_flat(rc.clone(), tc, &from_rhs)?;
        if a.source.is_zero() && rc.is_zero() {
            out.push(ChainMap::zero(a.source.clone(), rc));
            continue;
        }
        let mut comps = Vec::new();
        for d in a.source.degrees() {
            let bi = inverse(&b.comp(d))
                .ok_or_else(|| SymSeqError::Invalid(format!("level {s}: comparison not invertible in degree {d}")))?;
            comps.push(bi.mul(&a.comp(d)));
        }
        out.push(ChainMap::new(a.source.clone(), rc, comps)?);
    }
    Ok(out)
}

/// The same `Z`-tree as in `from`, found in `to` (both over the same labels).
fn lookup_z(from: &Layer, id: u32, to: &Layer) -> u32 {
    to.lookup(from.node(id)).expect("identical inner layers")
}
