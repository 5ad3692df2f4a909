//! `X = B(M, O, N)` as a right `O`-module and the comparison
//! `B(M, O, B(N, O, I)) → B(X, O, I)`.
//!
//! `X(t)` is the multilinear part of `B(M, O, S_N(t labels))`. The right
//! action substitutes `ρ_N` at the `N`-nodes, so operations of `O` must
//! have even degree; the built-in operads sit in degree 0.

use std::sync::Arc;

use super::{bar, BarComplex, BarError, BarOptions, Tower};
use crate::chain::ChainMap;
use crate::exactlin::{Acc, Lin};
use crate::operad::{label_algebra, ActFn, Algebra, Bimodule, Operad};
use crate::par;
use crate::symseq::schur::{expand, map_layer, same_op};
use crate::symseq::{Level, SymRep, SymSeq, Tail};

/// `B(M, O, N)` level by level.
#[derive(Clone, Debug)]
pub struct BarBimodule {
    /// `X` with its right action.
    pub module: Bimodule,
    /// `levels[t]` is the bar over `t` labels; `levels[0]` is unused.
    pub levels: Arc<Vec<Option<BarComplex>>>,
    pub m: Bimodule,
    pub n: Bimodule,
}

fn check_even(o: &Operad, width: usize) -> Result<(), BarError> {
    for r in 1..=width {
        if o.seq().basis(r).into_iter().any(|b| o.seq().op_degree(r, b) % 2 != 0) {
            return Err(BarError::Invalid(format!("{} has odd operations in arity {r}", o.name())));
        }
    }
    Ok(())
}

/// Transposition `(i, i+1)` of labels on the multilinear bar, as flat images.
fn relabel(b: &BarComplex, n: &Bimodule, i: usize) -> Vec<Lin<usize>> {
    let tower = b.tower();
    let field = tower.field();
    let o = tower.operad();
    let swap = |c: u32| -> u32 {
        let c = c as usize;
        (if c == i { i + 1 } else if c == i + 1 { i } else { c }) as u32
    };
    let base = tower.layer(0);
    let mut level: Vec<Lin<u32>> = par::map_range(base.len(), |k| {
        let node = base.node(k as u32);
        let children: Vec<u32> = node.children.iter().map(|c| swap(*c)).collect();
        let mut acc = Acc::new();
        base.canonical(n.seq(), &vec![(node.op, field.one())], &children, &field.one(), &mut acc);
        acc.finish()
    });
    let mut images = vec![Vec::new(); b.total().total_dim()];
    for a in 0..=b.max_bar() {
        if a > 0 {
            let prev = level;
            level = map_layer(tower.layer(a), tower.layer(a), o.seq(), &same_op(field), &|c| prev[c as usize].clone());
        }
        let v = map_layer(b.roots(a), b.roots(a), b.module().seq(), &same_op(field), &|c| level[c as usize].clone());
        for (id, w) in v.into_iter().enumerate() {
            images[b.flat_index(a, id as u32)] = b.flat_lin(a, &w);
        }
    }
    images
}

struct RightAction {
    levels: Arc<Vec<Option<BarComplex>>>,
    n_right: ActFn,
    n_seq: SymSeq,
}

impl RightAction {
    fn act(&self, x: u64, ys: &[(usize, u64)]) -> Lin<u64> {
        let t = ys.len();
        let total: usize = ys.iter().map(|y| y.0).sum();
        let (Some(Some(src)), Some(Some(dst))) = (self.levels.get(t), self.levels.get(total)) else {
            return Vec::new();
        };
        let (a, id) = src.element(x as usize);
        let mut offsets = Vec::with_capacity(t);
        let mut at = 0u32;
        for y in ys {
            offsets.push(at);
            at += y.0 as u32;
        }
        let st = src.tower();
        let dt = dst.tower();
        let one = st.field().one();
        fn sub(s: &RightAction, st: &Tower, dt: &Tower, ys: &[(usize, u64)], offsets: &[u32], j: usize, id: u32) -> Lin<u32> {
            let field = st.field();
            let one = field.one();
            let node = st.layer(j).node(id);
            let mut acc = Acc::new();
            if j == 0 {
                let inner: Vec<(usize, u64)> = node.children.iter().map(|c| ys[*c as usize]).collect();
                let ops = (s.n_right)(node.op, &inner, &mut Vec::new());
                let children: Vec<u32> = node
                    .children
                    .iter()
                    .flat_map(|c| (0..ys[*c as usize].0 as u32).map(move |k| offsets[*c as usize] + k))
                    .collect();
                dt.layer(0).canonical(&s.n_seq, &ops, &children, &one, &mut acc);
            } else {
                let imgs: Vec<Lin<u32>> = node.children.iter().map(|c| sub(s, st, dt, ys, offsets, j - 1, *c)).collect();
                let refs: Vec<&Lin<u32>> = imgs.iter().collect();
                let ops = vec![(node.op, one.clone())];
                expand(&refs, &mut |tuple, c| dt.layer(j).canonical(st.operad().seq(), &ops, tuple, c, &mut acc));
            }
            acc.finish()
        }
        let root = src.roots(a).node(id);
        let imgs: Vec<Lin<u32>> = root.children.iter().map(|c| sub(self, st, dt, ys, &offsets, a, *c)).collect();
        let refs: Vec<&Lin<u32>> = imgs.iter().collect();
        let ops = vec![(root.op, one.clone())];
        let mut acc = Acc::new();
        expand(&refs, &mut |tuple, c| dst.roots(a).canonical(dst.module().seq(), &ops, tuple, c, &mut acc));
        let mut out: Lin<u64> = acc.finish().into_iter().map(|(r, c)| (dst.flat_index(a, r) as u64, c)).collect();
        out.sort_by_key(|p| p.0);
        out
    }
}

/// `X = B(M, O, N)` through arity `s_cap`, with the right action of `O`.
pub fn bar_bimodule(m: &Bimodule, n: &Bimodule, s_cap: usize) -> Result<BarBimodule, BarError> {
    let o = m.operad().clone();
    if !Arc::ptr_eq(&o, n.operad()) && *o != **n.operad() {
        return Err(BarError::Mismatch(format!("{} vs {}", m.name(), n.name())));
    }
    check_even(&o, s_cap)?;
    let Some(n_right) = n.right_fn().cloned() else {
        return Err(BarError::Invalid(format!("{} has no right action", n.name())));
    };
    let field = o.field();
    let mut levels: Vec<Option<BarComplex>> = vec![None];
    let mut seq_levels = vec![Level::Zero];
    for t in 1..=s_cap {
        let a = label_algebra(n, t)?;
        let tower = Tower::new(&o, &a, BarOptions::exact(0))?;
        let b = bar(&tower, m)?;
        let complex = b.total().clone();
        if complex.is_zero() {
            seq_levels.push(Level::Zero);
        } else {
            let gens: Vec<Vec<Lin<usize>>> = (0..t - 1).map(|i| relabel(&b, n, i)).collect();
            seq_levels.push(Level::Dense(Arc::new(SymRep::from_flat(t, complex, &gens)?)));
        }
        levels.push(Some(b));
    }
    let levels = Arc::new(levels);
    let seq = SymSeq::new(field, seq_levels, Tail::Unknown)?;
    let action = RightAction {
        levels: levels.clone(),
        n_right,
        n_seq: n.seq().clone(),
    };
    let rho: ActFn = Arc::new(move |x, ys, _| action.act(x, ys));
    let module = Bimodule::from_parts(&format!("B({},{},{})", m.name(), o.name(), n.name()), o, seq, None, Some(rho));
    Ok(BarBimodule {
        module,
        levels,
        m: m.clone(),
        n: n.clone(),
    })
}

/// Both sides of the associativity comparison and the map between them.
#[derive(Clone, Debug)]
pub struct AssocIso {
    /// `B(N, O, I)`, whose algebra structure feeds the left side.
    pub inner: BarComplex,
    pub lhs: BarComplex,
    pub x: BarBimodule,
    pub rhs: BarComplex,
    pub map: ChainMap,
}

/// `B(M, O, B(N, O, I)) → B(B(M, O, N), O, I)`: shuffles the inner bar
/// coordinates of the leaves together and regroups `M`, the outer layers
/// and the `N`-operations into an element of `X`.
pub fn bar_assoc_iso(m: &Bimodule, n: &Bimodule, i: &Algebra, opts: BarOptions) -> Result<AssocIso, BarError> {
    let tower_i = Tower::new(i.operad(), i, opts.clone())?;
    let inner = bar(&tower_i, n)?;
    let j = inner.as_algebra()?;
    bar_assoc_over(&inner, &j, m, opts)
}

/// As [`bar_assoc_iso`] for a given inner bar and its algebra `j`.
pub fn bar_assoc_over(inner: &BarComplex, j: &Algebra, m: &Bimodule, opts: BarOptions) -> Result<AssocIso, BarError> {
    if j.dim() != inner.total().total_dim() {
        return Err(BarError::Mismatch("algebra is not the inner bar".into()));
    }
    let tower_i = inner.tower().clone();
    let n = inner.module();
    let inner = inner.clone();
    let tower_j = Tower::new(tower_i.operad(), j, opts)?;
    let lhs = bar(&tower_j, m)?;
    let x = bar_bimodule(m, n, tower_i.width())?;
    let rhs = bar(&tower_i, &x.module)?;
    let map = assoc_map(&inner, &lhs, &x, &rhs)?;
    Ok(AssocIso { inner, lhs, x, rhs, map })
}

fn parity(x: i64) -> bool {
    x.rem_euclid(2) == 1
}

fn assoc_map(inner: &BarComplex, lhs: &BarComplex, x: &BarBimodule, rhs: &BarComplex) -> Result<ChainMap, BarError> {
    let tower_i = inner.tower();
    let tower_j = lhs.tower();
    let field = tower_i.field();
    let one = field.one();
    let n_seq = inner.module().seq().clone();
    let o_seq = tower_i.operad().seq().clone();
    let mut images = vec![Vec::new(); lhs.total().total_dim()];
    for a in 0..=lhs.max_bar() {
        let roots = lhs.roots(a);
        let imgs: Vec<Lin<u32>> = par::map_range(roots.len(), |rid| {
            let root = roots.node(rid as u32);
            let m_deg = roots.op_degree(rid as u32);
            // leaves of the outer tree, depth first
            let mut leaves: Vec<u32> = Vec::new();
            fn collect(t: &Tower, j: usize, id: u32, out: &mut Vec<u32>) {
                if j == 0 {
                    out.push(id);
                } else {
                    for c in t.layer(j).node(id).children.iter() {
                        collect(t, j - 1, *c, out);
                    }
                }
            }
            for c in root.children.iter() {
                collect(tower_j, a, *c, &mut leaves);
            }
            let items: Vec<(usize, u32)> = leaves.iter().map(|l| inner.element(*l as usize)).collect();
            let nodes: Vec<_> = items.iter().map(|(b, r)| inner.roots(*b).node(*r)).collect();
            let n_deg: Vec<i32> = items.iter().map(|(b, r)| inner.roots(*b).op_degree(*r)).collect();
            let g_deg: Vec<i32> = items
                .iter()
                .zip(&n_deg)
                .map(|((b, r), nd)| inner.roots(*b).degree(*r) - nd)
                .collect();
            let labels: usize = nodes.iter().map(|nd| nd.children.len()).sum();
            let Some(Some(xb)) = x.levels.get(labels) else {
                return Vec::new();
            };
            let xt = xb.tower();
            // the element of X(labels)
            let mut starts = Vec::with_capacity(nodes.len());
            let mut at = 0u32;
            for nd in &nodes {
                starts.push(at);
                at += nd.children.len() as u32;
            }
            let base_imgs: Vec<Lin<u32>> = nodes
                .iter()
                .zip(&starts)
                .map(|(nd, s)| {
                    let children: Vec<u32> = (0..nd.children.len() as u32).map(|k| s + k).collect();
                    let mut acc = Acc::new();
                    xt.layer(0).canonical(&n_seq, &vec![(nd.op, one.clone())], &children, &one, &mut acc);
                    acc.finish()
                })
                .collect();
            let mut next = 0usize;
            fn rebuild(
                tj: &Tower,
                xt: &Tower,
                o_seq: &SymSeq,
                base: &[Lin<u32>],
                next: &mut usize,
                j: usize,
                id: u32,
            ) -> Lin<u32> {
                if j == 0 {
                    *next += 1;
                    return base[*next - 1].clone();
                }
                let node = tj.layer(j).node(id);
                let imgs: Vec<Lin<u32>> = node.children.iter().map(|c| rebuild(tj, xt, o_seq, base, next, j - 1, *c)).collect();
                let refs: Vec<&Lin<u32>> = imgs.iter().collect();
                let ops = vec![(node.op, tj.field().one())];
                let mut acc = Acc::new();
                expand(&refs, &mut |tuple, c| xt.layer(j).canonical(o_seq, &ops, tuple, c, &mut acc));
                acc.finish()
            }
            let kids: Vec<Lin<u32>> = root
                .children
                .iter()
                .map(|c| rebuild(tower_j, xt, &o_seq, &base_imgs, &mut next, a, *c))
                .collect();
            let refs: Vec<&Lin<u32>> = kids.iter().collect();
            let mut acc = Acc::new();
            let ops = vec![(root.op, one.clone())];
            expand(&refs, &mut |tuple, c| xb.roots(a).canonical(xb.module().seq(), &ops, tuple, c, &mut acc));
            let x_ops: Lin<u64> = acc.finish().into_iter().map(|(r, c)| (xb.flat_index(a, r) as u64, c)).collect();
            if x_ops.is_empty() {
                return Vec::new();
            }
            let mut x_ops = x_ops;
            x_ops.sort_by_key(|p| p.0);

            let b: usize = items.iter().map(|t| t.0).sum();
            if b > rhs.max_bar() {
                return Vec::new();
            }
            let mut odd0 = parity(b as i64 * (a as i64 + m_deg as i64));
            for k in 0..items.len() {
                for l in k + 1..items.len() {
                    let qk = (n_deg[k] + g_deg[k]) as i64;
                    odd0 ^= parity(qk * items[l].0 as i64);
                    odd0 ^= parity(n_deg[l] as i64 * g_deg[k] as i64);
                }
            }
            let shuffle_items: Vec<(usize, &[u32])> = items.iter().zip(&nodes).map(|((bk, _), nd)| (*bk, &nd.children[..])).collect();
            let dst = rhs.roots(b);
            let mut acc = Acc::new();
            super::ez_shuffle(tower_i, &shuffle_items, &mut |odd, per_item| {
                let sign = field.sign(odd ^ odd0);
                let refs: Vec<&Lin<u32>> = per_item.iter().flatten().collect();
                expand(&refs, &mut |tuple, c| dst.canonical(rhs.module().seq(), &x_ops, tuple, &(&sign * c), &mut acc));
            });
            let v = acc.finish();
            let mut out: Lin<u32> = Vec::new();
            for (id, c) in v {
                out.push((rhs.flat_index(b, id) as u32, c));
            }
            out
        });
        for (rid, v) in imgs.into_iter().enumerate() {
            let mut w: Lin<usize> = v.into_iter().map(|(k, c)| (k as usize, c)).collect();
            w.sort_by_key(|p| p.0);
            images[lhs.flat_index(a, rid as u32)] = w;
        }
    }
    Ok(ChainMap::from_flat(lhs.total().clone(), rhs.total().clone(), &images)?)
}
