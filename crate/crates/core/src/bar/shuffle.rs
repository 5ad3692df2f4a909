//! Eilenberg–Zilber shuffles and the algebra structure on `B(M, O, I)`
//! for a left module `M`.

use std::sync::Arc;

use super::{BarComplex, BarError, Tower};
use crate::exactlin::{Acc, Lin};
use crate::operad::{Action, ActFn, Algebra, AlgebraKind};
use crate::symseq::schur::{expand, merge, Child, Layer};

/// Words with `parts[k]` copies of letter `k`, with the parity of their
/// inversions.
pub fn shuffle_words(parts: &[usize]) -> Vec<(Vec<usize>, bool)> {
    fn go(left: &mut [usize], word: &mut Vec<usize>, odd: bool, out: &mut Vec<(Vec<usize>, bool)>) {
        if left.iter().all(|c| *c == 0) {
            out.push((word.clone(), odd));
            return;
        }
        for k in 0..left.len() {
            if left[k] == 0 {
                continue;
            }
            let flips = word.iter().filter(|l| **l > k).count();
            left[k] -= 1;
            word.push(k);
            go(left, word, odd ^ (flips % 2 == 1), out);
            word.pop();
            left[k] += 1;
        }
    }
    let mut out = Vec::new();
    go(&mut parts.to_vec(), &mut Vec::new(), false, &mut out);
    out
}

fn apply_all(images: &[Lin<u32>], v: &Lin<u32>) -> Lin<u32> {
    let mut acc = Acc::new();
    for (c, x) in v {
        acc.add_scaled(x, &images[*c as usize]);
    }
    acc.finish()
}

/// Shuffle of items of bar degrees `p_k` with children `children[k]` in
/// `L_{p_k}`. Calls `f` with the shuffle parity and each item's children
/// after degeneracy into `L_p`.
pub fn ez_shuffle(tower: &Tower, items: &[(usize, &[u32])], f: &mut dyn FnMut(bool, &[Vec<Lin<u32>>])) {
    let one = tower.field().one();
    let parts: Vec<usize> = items.iter().map(|t| t.0).collect();
    let p: usize = parts.iter().sum();
    if p > tower.max_bar() {
        return;
    }
    for (word, odd) in shuffle_words(&parts) {
        let mut per_item = Vec::with_capacity(items.len());
        for (k, (pk, children)) in items.iter().enumerate() {
            let mut level = *pk;
            let mut cur: Vec<Lin<u32>> = children.iter().map(|c| vec![(*c, one.clone())]).collect();
            for j in (0..p).filter(|j| word[*j] != k) {
                let g = tower.degeneracy(level, j);
                cur = cur.iter().map(|v| apply_all(&g, v)).collect();
                level += 1;
            }
            per_item.push(cur);
        }
        if per_item.iter().all(|cs| cs.iter().all(|v| !v.is_empty())) {
            f(odd, &per_item);
        }
    }
}

/// `o · (x_1, …, x_r)` for root elements `(n_k, id_k)` of a bar built
/// from a left module, as a combination of roots of bar degree `Σ n_k`.
pub fn bar_product(bar: &BarComplex, left: &ActFn, op: u64, inputs: &[(usize, u32)]) -> Lin<u32> {
    let tower = bar.tower();
    let field = tower.field();
    let p: usize = inputs.iter().map(|t| t.0).sum();
    if p > bar.max_bar() {
        return Vec::new();
    }
    let r = inputs.len();
    let o_deg = tower.operad().seq().op_degree(r, op);
    let dst = bar.roots(p);
    let lp = tower.layer(p);
    let nodes: Vec<_> = inputs.iter().map(|(n, id)| (bar.roots(*n).node(*id), bar.roots(*n).op_degree(*id))).collect();
    let items: Vec<(usize, &[u32])> = inputs.iter().zip(&nodes).map(|((n, _), (node, _))| (*n, &node.children[..])).collect();
    let mut odd0 = (o_deg as i64 * p as i64) % 2 != 0;
    for k in 0..r {
        for l in k + 1..r {
            let (nk, idk) = inputs[k];
            let qk = bar.roots(nk).degree(idk);
            if (qk as i64 * inputs[l].0 as i64) % 2 != 0 {
                odd0 = !odd0;
            }
        }
    }
    let law = |x: u64, ys: &[(usize, u64)]| left(x, ys, &mut Vec::new());
    let mut acc = Acc::new();
    ez_shuffle(tower, &items, &mut |odd, per_item| {
        let sign = field.sign(odd ^ odd0);
        let refs: Vec<&Lin<u32>> = per_item.iter().flatten().collect();
        expand(&refs, &mut |tuple, c| {
            let mut kids: Vec<Child> = Vec::with_capacity(r);
            let mut at = 0;
            for (k, cs) in per_item.iter().enumerate() {
                let ch = &tuple[at..at + cs.len()];
                at += cs.len();
                kids.push(Child {
                    op: nodes[k].0.op,
                    op_degree: nodes[k].1,
                    children: ch,
                    children_degree: ch.iter().map(|x| lp.degree(*x)).sum(),
                });
            }
            merge(dst, bar.module().seq(), &vec![(op, field.one())], &kids, &law, &(&sign * c), &mut acc);
        });
    });
    acc.finish()
}

struct BarAction {
    bar: BarComplex,
    left: ActFn,
}

impl Action for BarAction {
    fn act(&self, op: u64, inputs: &[u32]) -> Lin<u32> {
        let items: Vec<(usize, u32)> = inputs.iter().map(|i| self.bar.element(*i as usize)).collect();
        let p: usize = items.iter().map(|t| t.0).sum();
        let v = bar_product(&self.bar, &self.left, op, &items);
        let mut out: Lin<u32> = v.into_iter().map(|(id, x)| (self.bar.flat_index(p, id) as u32, x)).collect();
        out.sort_by_key(|t| t.0);
        out
    }
}

impl BarComplex {
    /// The bar as an algebra through the left action of its module, on
    /// the flat basis of the totalization.
    pub fn as_algebra(&self) -> Result<Algebra, BarError> {
        let Some(left) = self.module().left_fn() else {
            return Err(BarError::Invalid(format!("{} has no left action", self.module().name())));
        };
        let total = self.total();
        let n = total.total_dim();
        let boundary = total
            .flat_boundaries()
            .into_iter()
            .map(|v| v.into_iter().map(|(k, x)| (k as u32, x)).collect())
            .collect();
        let base = Arc::new(Layer::base(self.field(), total.flat_degrees(), vec![0; n], boundary));
        let tower = self.tower();
        let cap = if tower.labels().is_some() { None } else { Some(tower.top()) };
        Ok(Algebra::new(
            &format!("B({},{},{})", self.module().name(), tower.operad().name(), tower.algebra().name()),
            tower.operad().clone(),
            base,
            cap,
            AlgebraKind::Other("bar".into()),
            Arc::new(BarAction {
                bar: self.clone(),
                left: left.clone(),
            }),
        )?)
    }
}
