//! Tree bases for Schur functors `S_X(L) = ⊕_r X(r) ⊗_{Σ_r} L^{⊗r}`.
//!
//! A [`Layer`] is a basis of `S_X(L)` for a layer `L` below it, cut off at
//! a degree cap. Each basis element is a [`Node`]: an operation of `X(r)`
//! (a representative of the relevant coinvariant quotient) together with
//! its children sorted by id. Node ids are ordered by degree, so a layer's
//! ids are a flat chain-complex basis.
//!
//! Children may carry label masks: a base layer of `s` degree-0 labels
//! with one bit each gives the multilinear parts used to evaluate
//! symmetric sequences arity by arity.

use std::collections::HashMap;
use std::sync::Arc;

use super::{perm, SymSeq};
use crate::chain::{ChainComplex, ChainError};
use crate::exactlin::{Acc, Field, Lin, Scalar};
use crate::par;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Node {
    pub op: u64,
    pub children: Box<[u32]>,
}

/// Enumeration parameters for [`Layer::build`].
#[derive(Clone, Debug)]
pub struct Build {
    /// Largest node degree kept.
    pub cap: i32,
    pub max_arity: usize,
    /// Record arity ≥ 2 nodes in the non-unit bits (tower layers).
    pub own_bit: bool,
    /// Keep only nodes using exactly these labels.
    pub full_mask: Option<u64>,
    /// Keep only nodes whose non-unit bits equal this value.
    pub nonunit: Option<u32>,
}

impl Build {
    pub fn new(cap: i32, max_arity: usize) -> Self {
        Build {
            cap,
            max_arity,
            own_bit: false,
            full_mask: None,
            nonunit: None,
        }
    }
}

/// One layer of a tree basis.
pub struct Layer {
    field: Field,
    level: u32,
    below: Option<Arc<Layer>>,
    nodes: Vec<Node>,
    degree: Vec<i32>,
    mask: Vec<u64>,
    nonunit: Vec<u32>,
    boundary: Vec<Lin<u32>>,
    index: HashMap<Node, u32>,
}

impl std::fmt::Debug for Layer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Layer")
            .field("level", &self.level)
            .field("len", &self.nodes.len())
            .finish()
    }
}

/// A child of a node seen as a tree itself.
#[derive(Clone, Copy, Debug)]
pub struct Child<'a> {
    pub op: u64,
    pub op_degree: i32,
    pub children: &'a [u32],
    pub children_degree: i32,
}

impl Child<'_> {
    pub fn arity(&self) -> usize {
        self.children.len()
    }
}

impl Layer {
    /// Leaves with the given degrees (nondecreasing), masks and boundary.
    pub fn base(field: Field, degrees: Vec<i32>, masks: Vec<u64>, boundary: Vec<Lin<u32>>) -> Self {
        assert!(degrees.windows(2).all(|w| w[0] <= w[1]), "leaf degrees must be nondecreasing");
        assert_eq!(degrees.len(), masks.len());
        assert_eq!(degrees.len(), boundary.len());
        let nodes: Vec<Node> = (0..degrees.len() as u64)
            .map(|i| Node {
                op: i,
                children: Box::new([]),
            })
            .collect();
        let index = nodes.iter().enumerate().map(|(i, n)| (n.clone(), i as u32)).collect();
        Layer {
            field,
            level: 0,
            below: None,
            nonunit: vec![0; nodes.len()],
            nodes,
            degree: degrees,
            mask: masks,
            boundary,
            index,
        }
    }

    /// The flat basis of a complex as leaves.
    pub fn from_complex(c: &ChainComplex) -> Self {
        let boundary = c
            .flat_boundaries()
            .into_iter()
            .map(|v| v.into_iter().map(|(k, x)| (k as u32, x)).collect())
            .collect();
        let n = c.total_dim();
        Self::base(c.field(), c.flat_degrees(), vec![0; n], boundary)
    }

    /// `s` distinct labels in degree 0.
    pub fn labels(field: Field, s: usize) -> Self {
        assert!(s <= 64, "at most 64 labels");
        Self::base(field, vec![0; s], (0..s).map(|k| 1u64 << k).collect(), vec![Vec::new(); s])
    }

    /// Enumerates `S_X(below)` subject to `opts`.
    pub fn build(seq: &SymSeq, below: Arc<Layer>, opts: &Build) -> Self {
        let field = seq.field();
        let level = below.level + 1;
        let max_arity = match seq.max_arity() {
            Some(a) => a.min(opts.max_arity),
            None => opts.max_arity,
        };
        let min_op = seq.min_degree_upto(max_arity).min(0);
        let ctx = Enum {
            seq,
            below: &below,
            opts,
            max_arity,
            min_op,
            own: if opts.own_bit { 1u32 << (level - 1) } else { 0 },
        };
        let n = below.len();
        let chunks: Vec<Vec<(Node, i32, u64, u32)>> = par::map_range(n, |c0| {
            let mut out = Vec::new();
            if max_arity == 0 || below.degree[c0] + min_op > opts.cap {
                return out;
            }
            let mut chosen = vec![c0 as u32];
            ctx.dfs(c0, &mut chosen, below.degree[c0], below.mask[c0], below.nonunit[c0], &mut out);
            out
        });
        let mut all: Vec<(Node, i32, u64, u32)> = chunks.into_iter().flatten().collect();
        all.sort_by(|a, b| (a.1, &a.0.children, a.0.op).cmp(&(b.1, &b.0.children, b.0.op)));
        let mut nodes = Vec::with_capacity(all.len());
        let mut degree = Vec::with_capacity(all.len());
        let mut mask = Vec::with_capacity(all.len());
        let mut nonunit = Vec::with_capacity(all.len());
        for (nd, d, m, b) in all {
            nodes.push(nd);
            degree.push(d);
            mask.push(m);
            nonunit.push(b);
        }
        let index = nodes.iter().enumerate().map(|(i, n)| (n.clone(), i as u32)).collect();
        let mut layer = Layer {
            field,
            level,
            below: Some(below),
            nodes,
            degree,
            mask,
            nonunit,
            boundary: Vec::new(),
            index,
        };
        layer.boundary = par::map_range(layer.len(), |i| layer.internal_diff(seq, i as u32));
        layer
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn below(&self) -> &Arc<Layer> {
        self.below.as_ref().expect("leaf layer has nothing below")
    }

    pub fn node(&self, id: u32) -> &Node {
        &self.nodes[id as usize]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn degree(&self, id: u32) -> i32 {
        self.degree[id as usize]
    }

    pub fn degrees(&self) -> &[i32] {
        &self.degree
    }

    pub fn mask(&self, id: u32) -> u64 {
        self.mask[id as usize]
    }

    pub fn nonunit(&self, id: u32) -> u32 {
        self.nonunit[id as usize]
    }

    pub fn boundary(&self, id: u32) -> &Lin<u32> {
        &self.boundary[id as usize]
    }

    pub fn boundaries(&self) -> &[Lin<u32>] {
        &self.boundary
    }

    pub fn arity(&self, id: u32) -> usize {
        self.nodes[id as usize].children.len()
    }

    pub fn lookup(&self, node: &Node) -> Option<u32> {
        self.index.get(node).copied()
    }

    /// Degree of the node's own operation.
    pub fn op_degree(&self, id: u32) -> i32 {
        match &self.below {
            None => 0,
            Some(b) => self.degree(id) - self.node(id).children.iter().map(|c| b.degree(*c)).sum::<i32>(),
        }
    }

    /// The node `id` viewed as a child of a layer above.
    pub fn child(&self, id: u32) -> Child<'_> {
        let n = &self.nodes[id as usize];
        let od = self.op_degree(id);
        Child {
            op: n.op,
            op_degree: od,
            children: &n.children,
            children_degree: self.degree(id) - od,
        }
    }

    /// Chain complex with this layer's basis and internal differential.
    pub fn complex(&self) -> Result<ChainComplex, ChainError> {
        let b: Vec<Lin<usize>> = self
            .boundary
            .iter()
            .map(|v| v.iter().map(|(k, x)| (*k as usize, x.clone())).collect())
            .collect();
        ChainComplex::from_flat(self.field, &self.degree, &b)
    }

    /// Adds `coef · ops ⊗ children` in canonical form. Children are in any
    /// order; terms outside the layer are dropped.
    pub fn canonical(&self, seq: &SymSeq, ops: &Lin<u64>, children: &[u32], coef: &Scalar, acc: &mut Acc<u32>) {
        if ops.is_empty() || coef.is_zero() {
            return;
        }
        let below = self.below();
        let r = children.len();
        let dest = perm::sorting_dest(children);
        let degs: Vec<i32> = children.iter().map(|c| below.degree(*c)).collect();
        let odd = perm::koszul_odd(&degs, &dest);
        let mut sorted = vec![0u32; r];
        for k in 0..r {
            sorted[dest[k]] = children[k];
        }
        let acted = seq.act(r, &dest, ops);
        if acted.is_empty() {
            return;
        }
        let mut blocks: Vec<(usize, bool)> = Vec::new();
        for k in 0..r {
            if k > 0 && sorted[k] == sorted[k - 1] {
                blocks.last_mut().unwrap().0 += 1;
            } else {
                blocks.push((1, below.degree(sorted[k]) & 1 == 1));
            }
        }
        let q = seq.quotient(r, &blocks);
        if q.reps.is_empty() {
            return;
        }
        let c = if odd { -coef } else { coef.clone() };
        let mut key = Node {
            op: 0,
            children: sorted.into_boxed_slice(),
        };
        for (b, x) in &acted {
            let cx = &c * x;
            for (rep, y) in q.project(self.field, *b) {
                key.op = rep;
                if let Some(id) = self.index.get(&key) {
                    acc.push(*id, &cx * &y);
                }
            }
        }
    }

    fn internal_diff(&self, seq: &SymSeq, id: u32) -> Lin<u32> {
        let below = self.below();
        let node = &self.nodes[id as usize];
        let r = node.children.len();
        let one = self.field.one();
        let mut acc = Acc::new();
        let db = seq.op_boundary(r, node.op);
        if !db.is_empty() {
            self.canonical(seq, &db, &node.children, &one, &mut acc);
        }
        let op = vec![(node.op, one.clone())];
        let mut odd = self.op_degree(id) & 1 == 1;
        let mut ch = node.children.to_vec();
        for k in 0..r {
            let c = node.children[k];
            let sign = self.field.sign(odd);
            for (c2, x) in below.boundary(c) {
                ch[k] = *c2;
                self.canonical(seq, &op, &ch, &(&sign * x), &mut acc);
            }
            ch[k] = c;
            odd ^= below.degree(c) & 1 == 1;
        }
        acc.finish()
    }
}

struct Enum<'a> {
    seq: &'a SymSeq,
    below: &'a Layer,
    opts: &'a Build,
    max_arity: usize,
    min_op: i32,
    own: u32,
}

impl Enum<'_> {
    fn dfs(&self, start: usize, chosen: &mut Vec<u32>, sum: i32, mask: u64, bits: u32, out: &mut Vec<(Node, i32, u64, u32)>) {
        self.emit(chosen, sum, mask, bits, out);
        if chosen.len() >= self.max_arity {
            return;
        }
        let b = self.below;
        for c in start..b.len() {
            let d = b.degree[c];
            if sum + d + self.min_op > self.opts.cap {
                break;
            }
            if mask & b.mask[c] != 0 {
                continue;
            }
            chosen.push(c as u32);
            self.dfs(c, chosen, sum + d, mask | b.mask[c], bits | b.nonunit[c], out);
            chosen.pop();
        }
    }

    fn emit(&self, chosen: &[u32], sum: i32, mask: u64, bits: u32, out: &mut Vec<(Node, i32, u64, u32)>) {
        let r = chosen.len();
        let seq = self.seq;
        if seq.dim(r) == 0 {
            return;
        }
        if self.opts.full_mask.is_some_and(|f| f != mask) {
            return;
        }
        let bits = if r >= 2 { bits | self.own } else { bits };
        if self.opts.nonunit.is_some_and(|want| want != bits) {
            return;
        }
        let mut blocks: Vec<(usize, bool)> = Vec::new();
        for k in 0..r {
            if k > 0 && chosen[k] == chosen[k - 1] {
                blocks.last_mut().unwrap().0 += 1;
            } else {
                blocks.push((1, self.below.degree[chosen[k] as usize] & 1 == 1));
            }
        }
        let q = seq.quotient(r, &blocks);
        for rep in &q.reps {
            let d = seq.op_degree(r, *rep) + sum;
            if d <= self.opts.cap {
                out.push((
                    Node {
                        op: *rep,
                        children: chosen.into(),
                    },
                    d,
                    mask,
                    bits,
                ));
            }
        }
    }
}

/// Calls `f` on every term of the product `Π images[k]`.
pub fn expand(images: &[&Lin<u32>], f: &mut dyn FnMut(&[u32], &Scalar)) {
    fn go(images: &[&Lin<u32>], k: usize, cur: &mut Vec<u32>, c: Scalar, f: &mut dyn FnMut(&[u32], &Scalar)) {
        if k == images.len() {
            f(cur, &c);
            return;
        }
        for (id, x) in images[k] {
            cur.push(*id);
            go(images, k + 1, cur, &c * x, f);
            cur.pop();
        }
    }
    if images.iter().any(|v| v.is_empty()) {
        return;
    }
    let field = images[0][0].1.field();
    let mut cur = Vec::with_capacity(images.len());
    go(images, 0, &mut cur, field.one(), f);
}

/// `S(op_map)(child_map)`: maps every node of `src` into `dst` by mapping
/// its operation with `op_map` and its children with `child_map`. Both
/// maps must have degree 0.
pub fn map_layer(
    src: &Layer,
    dst: &Layer,
    dst_seq: &SymSeq,
    op_map: &(dyn Fn(usize, u64) -> Lin<u64> + Sync),
    child_map: &(dyn Fn(u32) -> Lin<u32> + Sync),
) -> Vec<Lin<u32>> {
    par::map_range(src.len(), |i| {
        let node = src.node(i as u32);
        let r = node.children.len();
        let ops = op_map(r, node.op);
        if ops.is_empty() {
            return Vec::new();
        }
        let imgs: Vec<Lin<u32>> = node.children.iter().map(|c| child_map(*c)).collect();
        let refs: Vec<&Lin<u32>> = imgs.iter().collect();
        let mut acc = Acc::new();
        expand(&refs, &mut |tuple, c| dst.canonical(dst_seq, &ops, tuple, c, &mut acc));
        acc.finish()
    })
}

/// Identity on operations.
pub fn same_op(field: Field) -> impl Fn(usize, u64) -> Lin<u64> + Sync {
    move |_, b| vec![(b, field.one())]
}

/// Merges a node with its children: `outer ⊗ (y_1 ⊗ g_1) ⊗ … ⊗ (y_r ⊗ g_r)`
/// goes to `±compose(outer; y_1..y_r) ⊗ g_1 … g_r` in `dst`, with the
/// Koszul sign of moving each `y_l` past the `g_k`, `k < l`.
#[allow(clippy::too_many_arguments)]
pub fn merge(
    dst: &Layer,
    dst_seq: &SymSeq,
    outer: &Lin<u64>,
    kids: &[Child<'_>],
    compose: &dyn Fn(u64, &[(usize, u64)]) -> Lin<u64>,
    coef: &Scalar,
    acc: &mut Acc<u32>,
) {
    let mut odd = false;
    let mut prefix = false;
    let mut ys = Vec::with_capacity(kids.len());
    let mut grand = Vec::new();
    for k in kids {
        if k.op_degree & 1 == 1 && prefix {
            odd = !odd;
        }
        prefix ^= k.children_degree & 1 == 1;
        ys.push((k.arity(), k.op));
        grand.extend_from_slice(k.children);
    }
    let c = if odd { -coef } else { coef.clone() };
    for (x, a) in outer {
        let res = compose(*x, &ys);
        if !res.is_empty() {
            dst.canonical(dst_seq, &res, &grand, &(&c * a), acc);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::homology;
    use crate::symseq::{Level, Tail};

    fn com(field: Field) -> SymSeq {
        SymSeq::new(field, vec![Level::Zero], Tail::Trivial).unwrap()
    }

    #[test]
    fn symmetric_powers_of_even_generator() {
        let f = Field::Q;
        let v = Arc::new(Layer::from_complex(&ChainComplex::point(f, 2)));
        let l = Layer::build(&com(f), v, &Build::new(10, 10));
        assert_eq!(l.degrees(), &[2, 4, 6, 8, 10]);
    }

    #[test]
    fn odd_generator_squares_vanish() {
        let f = Field::Q;
        let v = Arc::new(Layer::from_complex(&ChainComplex::point(f, 1)));
        let l = Layer::build(&com(f), v.clone(), &Build::new(10, 10));
        assert_eq!(l.degrees(), &[1]);
        let f2 = Field::prime(2).unwrap();
        let v2 = Arc::new(Layer::from_complex(&ChainComplex::point(f2, 1)));
        let l2 = Layer::build(&com(f2), v2, &Build::new(4, 10));
        assert_eq!(l2.degrees(), &[1, 2, 3, 4]);
    }

    #[test]
    fn tensor_algebra_counts() {
        let f = Field::Q;
        let ass = SymSeq::new(f, vec![Level::Zero], Tail::Regular).unwrap();
        let v = Arc::new(Layer::from_complex(&ChainComplex::concentrated(f, 1, 2)));
        let l = Layer::build(&ass, v, &Build::new(4, 10));
        let c = l.complex().unwrap();
        assert_eq!((1..=4).map(|d| c.dim(d)).collect::<Vec<_>>(), vec![2, 4, 8, 16]);
    }

    #[test]
    fn acyclic_generators_give_acyclic_powers() {
        // V = (x -> y), |x| = 3, |y| = 2: Sym(V) is acyclic above degree 0.
        let f = Field::Q;
        let v = ChainComplex::from_flat(f, &[2, 3], &[vec![], vec![(0, f.one())]]).unwrap();
        let base = Arc::new(Layer::from_complex(&v));
        let l = Layer::build(&com(f), base, &Build::new(12, 12));
        let h = homology(&l.complex().unwrap());
        assert!(h.through(11).is_zero(), "{h:?}");
    }

    #[test]
    fn labelled_multilinear_part() {
        let f = Field::Q;
        let labels = Arc::new(Layer::labels(f, 3));
        let mut opts = Build::new(0, 3);
        opts.full_mask = Some(0b111);
        let l = Layer::build(&com(f), labels.clone(), &opts);
        assert_eq!(l.len(), 1);
        let ass = SymSeq::new(f, vec![Level::Zero], Tail::Regular).unwrap();
        assert_eq!(Layer::build(&ass, labels, &opts).len(), 6);
    }
}
