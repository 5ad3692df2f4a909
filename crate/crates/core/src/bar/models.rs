//! Comparisons between bars and smaller models: the relative composite
//! and the one-term model `(M(n) ⊗ TQ(I)^{⊗n})_{Σ_n}`.

use std::sync::Arc;

use super::{bar, tq, BarComplex, BarError, Tower};
use crate::chain::{ChainComplex, ChainMap};
use crate::exactlin::{Acc, Lin};
use crate::operad::{relative_compose_algebra, Bimodule, RelativeAlgebra};
use crate::par;
use crate::symseq::schur::{expand, Build, Layer};

/// The bar-degree-0 projection `B(M, O, I) → M ∘_O I`.
pub fn augmentation_to_relative(b: &BarComplex) -> Result<(RelativeAlgebra, ChainMap), BarError> {
    let tower = b.tower();
    let rel = relative_compose_algebra(b.module(), tower.algebra(), tower.top(), tower.width())?;
    let r0 = b.roots(0);
    let one = b.field().one();
    let mut images = vec![Vec::new(); b.total().total_dim()];
    for id in 0..r0.len() as u32 {
        if let Some(k) = rel.layer.lookup(r0.node(id)) {
            images[b.flat_index(0, id)] = rel.project(&vec![(k, one.clone())]);
        }
    }
    let map = ChainMap::from_flat(b.total().clone(), rel.complex().clone(), &images)?;
    Ok((rel, map))
}

/// `(M(n) ⊗ TQ(I)^{⊗n})_{Σ_n}` with its comparison map into `B(M, O, I)`.
#[derive(Clone, Debug)]
pub struct OneTermModel {
    pub arity: usize,
    pub tq: BarComplex,
    pub model: Arc<ChainComplex>,
    pub bar: BarComplex,
    pub comparison: ChainMap,
}

/// `mn` must be concentrated in a single arity `n`.
pub fn one_term_model(mn: &Bimodule, tower: &Arc<Tower>) -> Result<OneTermModel, BarError> {
    let o = tower.operad();
    if !o.unital_in_arity_one() {
        return Err(BarError::NotExact(format!("{}(1) is not spanned by the unit", o.name())));
    }
    let width = tower.width();
    let levels: Vec<usize> = (1..=width).filter(|r| mn.seq().dim(*r) > 0).collect();
    if levels.len() > 1 {
        return Err(BarError::Invalid(format!("{} is not concentrated in one arity", mn.name())));
    }
    let n = levels.first().copied().unwrap_or(1);
    let t = tq(tower)?;
    let b = bar(tower, mn)?;
    let field = tower.field();
    let tq_total = t.total();
    let leaves = Arc::new(Layer::from_complex(tq_total));
    let layer = Layer::build(mn.seq(), leaves, &Build::new(tower.top(), n));
    let model = Arc::new(layer.complex()?);
    let images: Vec<Lin<usize>> = par::map_range(layer.len(), |i| {
        let node = layer.node(i as u32);
        let items: Vec<(usize, u32)> = node.children.iter().map(|c| t.element(*c as usize)).collect();
        let p: usize = items.iter().map(|x| x.0).sum();
        if p > b.max_bar() {
            return Vec::new();
        }
        let m_deg = mn.seq().op_degree(node.children.len(), node.op);
        let mut odd0 = (m_deg as i64 * p as i64) % 2 != 0;
        for k in 0..items.len() {
            for l in k + 1..items.len() {
                let q = t.roots(items[k].0).degree(items[k].1);
                if (q as i64 * items[l].0 as i64) % 2 != 0 {
                    odd0 = !odd0;
                }
            }
        }
        let kids: Vec<&[u32]> = items.iter().map(|(pk, id)| &t.roots(*pk).node(*id).children[..]).collect();
        let shuffle_items: Vec<(usize, &[u32])> = items.iter().zip(&kids).map(|((pk, _), c)| (*pk, *c)).collect();
        let dst = b.roots(p);
        let ops = vec![(node.op, field.one())];
        let mut acc = Acc::new();
        super::ez_shuffle(tower, &shuffle_items, &mut |odd, per_item| {
            let sign = field.sign(odd ^ odd0);
            let refs: Vec<&Lin<u32>> = per_item.iter().flatten().collect();
            expand(&refs, &mut |tuple, c| dst.canonical(mn.seq(), &ops, tuple, &(&sign * c), &mut acc));
        });
        b.flat_lin(p, &acc.finish())
    });
    let comparison = ChainMap::from_flat(model.clone(), b.total().clone(), &images)?;
    Ok(OneTermModel {
        arity: n,
        tq: t,
        model,
        bar: b,
        comparison,
    })
}
