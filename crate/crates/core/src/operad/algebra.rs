use std::collections::HashMap;
use std::sync::Arc;

use super::{Bimodule, Operad, OperadError};
use crate::chain::{ChainComplex, ChainMap};
use crate::exactlin::{Acc, Field, Lin};
use crate::symseq::perm;
use crate::symseq::schur::{merge, Build, Layer};

/// Evaluation of operations on basis elements of an algebra.
pub trait Action: Send + Sync {
    /// `op ∈ O(inputs.len())` applied to basis elements in the given order.
    fn act(&self, op: u64, inputs: &[u32]) -> Lin<u32>;
}

#[derive(Clone, Debug)]
pub enum AlgebraKind {
    /// Free on the generator complex; the base layer sits on its leaves.
    Free { generators: Arc<ChainComplex> },
    Trivial,
    Table,
    /// `S_N(labels)` for a left module `N`.
    Labels { count: usize },
    Other(String),
}

/// An algebra over an operad: a complex with a basis given as a layer of
/// trees, and an action on that basis.
#[derive(Clone)]
pub struct Algebra {
    name: String,
    operad: Arc<Operad>,
    base: Arc<Layer>,
    complex: Arc<ChainComplex>,
    cap: Option<i32>,
    kind: AlgebraKind,
    action: Arc<dyn Action>,
}

impl std::fmt::Debug for Algebra {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Algebra")
            .field("name", &self.name)
            .field("kind", &self.kind)
            .field("dim", &self.complex.total_dim())
            .field("cap", &self.cap)
            .finish()
    }
}

impl Algebra {
    /// `cap`: the algebra is known through this degree; products landing
    /// above it are dropped.
    pub fn new(
        name: &str,
        operad: Arc<Operad>,
        base: Arc<Layer>,
        cap: Option<i32>,
        kind: AlgebraKind,
        action: Arc<dyn Action>,
    ) -> Result<Self, OperadError> {
        let complex = Arc::new(base.complex()?);
        Ok(Algebra {
            name: name.into(),
            operad,
            base,
            complex,
            cap,
            kind,
            action,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn operad(&self) -> &Arc<Operad> {
        &self.operad
    }

    pub fn field(&self) -> Field {
        self.operad.field()
    }

    pub fn base(&self) -> &Arc<Layer> {
        &self.base
    }

    pub fn complex(&self) -> &Arc<ChainComplex> {
        &self.complex
    }

    pub fn cap(&self) -> Option<i32> {
        self.cap
    }

    pub fn kind(&self) -> &AlgebraKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    pub fn degree(&self, id: u32) -> i32 {
        self.base.degree(id)
    }

    /// Lowest degree with a basis element.
    pub fn min_degree(&self) -> Option<i32> {
        self.base.degrees().first().copied()
    }

    pub fn act(&self, op: u64, inputs: &[u32]) -> Lin<u32> {
        if inputs.is_empty() {
            return Vec::new();
        }
        self.action.act(op, inputs)
    }

    /// Multilinear extension over operations and inputs.
    pub fn act_lin(&self, ops: &Lin<u64>, inputs: &[Lin<u32>]) -> Lin<u32> {
        let mut acc = Acc::new();
        let refs: Vec<&Lin<u32>> = inputs.iter().collect();
        for (b, c) in ops {
            crate::symseq::schur::expand(&refs, &mut |tuple, x| acc.add_scaled(&(c * x), &self.act(*b, tuple)));
        }
        acc.finish()
    }

    /// Bound on the number of inputs of a tree whose leaves total at most
    /// `budget` in degree, if the algebra's degrees force one.
    pub fn width_bound(&self, budget: i32) -> Option<usize> {
        if let AlgebraKind::Labels { count } = self.kind {
            return Some(count);
        }
        match self.min_degree() {
            None => Some(0),
            Some(c) if c >= 1 => Some((budget.max(0) / c) as usize),
            Some(_) => None,
        }
    }

    /// Basis ids of the generators of a free algebra, in order.
    pub fn generator_ids(&self) -> Option<Vec<u32>> {
        let AlgebraKind::Free { generators } = &self.kind else {
            return None;
        };
        let u = self.operad.unit_basis()?;
        (0..generators.total_dim() as u32)
            .map(|g| {
                self.base.lookup(&crate::symseq::schur::Node {
                    op: u,
                    children: Box::new([g]),
                })
            })
            .collect()
    }
}

/// Merges operations with the roots of tree-shaped inputs.
struct TreeAction {
    base: Arc<Layer>,
    seq: crate::symseq::SymSeq,
    law: super::ActFn,
}

impl Action for TreeAction {
    fn act(&self, op: u64, inputs: &[u32]) -> Lin<u32> {
        let field = self.base.field();
        let kids: Vec<_> = inputs.iter().map(|i| self.base.child(*i)).collect();
        let mut acc = Acc::new();
        let law = |x: u64, ys: &[(usize, u64)]| (self.law)(x, ys, &mut Vec::new());
        merge(&self.base, &self.seq, &vec![(op, field.one())], &kids, &law, &field.one(), &mut acc);
        acc.finish()
    }
}

/// The free algebra `⊕_n O(n) ⊗_{Σ_n} V^{⊗n}` through `degree_cap`.
pub fn free_algebra(o: &Arc<Operad>, v: &ChainComplex, degree_cap: i32) -> Result<Algebra, OperadError> {
    if v.field() != o.field() {
        return Err(crate::chain::ChainError::FieldMismatch(v.field(), o.field()).into());
    }
    if !v.is_zero() && v.degrees().any(|d| d <= 0 && v.dim(d) > 0) {
        return Err(OperadError::Invalid("generators must sit in positive degrees".into()));
    }
    let c = if v.is_zero() { 1 } else { v.degrees().find(|d| v.dim(*d) > 0).unwrap() };
    let max_arity = (degree_cap.max(0) / c) as usize;
    if !o.is_connective(max_arity) {
        return Err(OperadError::Invalid("free algebras need operations of degree >= 0".into()));
    }
    let leaves = Arc::new(Layer::from_complex(v));
    let base = Arc::new(Layer::build(o.seq(), leaves, &Build::new(degree_cap, max_arity)));
    let g = o.clone();
    let action = TreeAction {
        base: base.clone(),
        seq: o.seq().clone(),
        law: Arc::new(move |x, ys, t| g.gamma_traced(x, ys, t)),
    };
    Algebra::new(
        &format!("free_{}", o.name()),
        o.clone(),
        base,
        Some(degree_cap),
        AlgebraKind::Free {
            generators: Arc::new(v.clone()),
        },
        Arc::new(action),
    )
}

/// `S_N(labels)` with `O` acting through the left action of `N`.
pub fn label_algebra(n: &Bimodule, s: usize) -> Result<Algebra, OperadError> {
    let Some(left) = n.left_fn() else {
        return Err(OperadError::Invalid(format!("{} has no left action", n.name())));
    };
    let field = n.field();
    let labels = Arc::new(Layer::labels(field, s));
    let base = Arc::new(Layer::build(n.seq(), labels, &Build::new(i32::MAX / 4, s)));
    let action = TreeAction {
        base: base.clone(),
        seq: n.seq().clone(),
        law: left.clone(),
    };
    Algebra::new(
        &format!("{}[{s}]", n.name()),
        n.operad().clone(),
        base,
        None,
        AlgebraKind::Labels { count: s },
        Arc::new(action),
    )
}

struct TrivialAction {
    field: Field,
    unit: Option<u64>,
}

impl Action for TrivialAction {
    fn act(&self, op: u64, inputs: &[u32]) -> Lin<u32> {
        if inputs.len() == 1 && Some(op) == self.unit {
            vec![(inputs[0], self.field.one())]
        } else {
            Vec::new()
        }
    }
}

/// `C` with the unit acting as the identity and everything else as zero.
pub fn trivial_algebra(o: &Arc<Operad>, c: &ChainComplex) -> Result<Algebra, OperadError> {
    if c.field() != o.field() {
        return Err(crate::chain::ChainError::FieldMismatch(c.field(), o.field()).into());
    }
    if o.unit_basis().is_none() || (o.seq().dim(1) > 1 && !o.unital_in_arity_one()) {
        return Err(OperadError::Invalid("trivial algebras need arity 1 spanned by the unit".into()));
    }
    Algebra::new(
        "trivial",
        o.clone(),
        Arc::new(Layer::from_complex(c)),
        None,
        AlgebraKind::Trivial,
        Arc::new(TrivialAction {
            field: o.field(),
            unit: o.unit_basis(),
        }),
    )
}

/// Action constants keyed by `(op, inputs)`.
pub type ActionTable = HashMap<(u64, Vec<u32>), Lin<u32>>;

struct TableAction {
    operad: Arc<Operad>,
    degrees: Vec<i32>,
    entries: ActionTable,
}

impl Action for TableAction {
    fn act(&self, op: u64, inputs: &[u32]) -> Lin<u32> {
        if let Some(v) = self.entries.get(&(op, inputs.to_vec())) {
            return v.clone();
        }
        let field = self.operad.field();
        if inputs.len() == 1 && Some(op) == self.operad.unit_basis() {
            return vec![(inputs[0], field.one())];
        }
        if inputs.windows(2).all(|w| w[0] <= w[1]) {
            return Vec::new();
        }
        let r = inputs.len();
        let dest = perm::sorting_dest(inputs);
        let degs: Vec<i32> = inputs.iter().map(|i| self.degrees[*i as usize]).collect();
        let odd = perm::koszul_odd(&degs, &dest);
        let mut sorted = inputs.to_vec();
        for k in 0..r {
            sorted[dest[k]] = inputs[k];
        }
        let ops = self.operad.seq().act(r, &dest, &vec![(op, field.one())]);
        let mut acc = Acc::new();
        for (b, c) in ops {
            acc.add_scaled(&(&field.sign(odd) * &c), &self.act(b, &sorted));
        }
        acc.finish()
    }
}

/// An algebra on `c` given by action constants; missing entries are zero
/// except for the unit, and unsorted inputs go through equivariance.
pub fn table_algebra(name: &str, o: &Arc<Operad>, c: &ChainComplex, entries: ActionTable) -> Result<Algebra, OperadError> {
    if c.field() != o.field() {
        return Err(crate::chain::ChainError::FieldMismatch(c.field(), o.field()).into());
    }
    for ((op, inputs), v) in &entries {
        let r = inputs.len();
        if *op >= o.seq().dim(r) || inputs.iter().chain(v.iter().map(|t| &t.0)).any(|i| *i as usize >= c.total_dim()) {
            return Err(OperadError::Invalid(format!("action entry ({op}, {inputs:?}) out of range")));
        }
    }
    Algebra::new(
        name,
        o.clone(),
        Arc::new(Layer::from_complex(c)),
        None,
        AlgebraKind::Table,
        Arc::new(TableAction {
            operad: o.clone(),
            degrees: c.flat_degrees(),
            entries,
        }),
    )
}

/// A chain map between algebras over the same operad, on bases.
#[derive(Clone, Debug)]
pub struct AlgebraMap {
    pub source: Algebra,
    pub target: Algebra,
    pub images: Vec<Lin<u32>>,
}

impl AlgebraMap {
    pub fn new(source: &Algebra, target: &Algebra, images: Vec<Lin<u32>>) -> Result<Self, OperadError> {
        if images.len() != source.dim() {
            return Err(OperadError::Invalid(format!("{} images for {} basis elements", images.len(), source.dim())));
        }
        for (i, v) in images.iter().enumerate() {
            for (j, _) in v {
                if *j as usize >= target.dim() || target.degree(*j) != source.degree(i as u32) {
                    return Err(OperadError::Invalid(format!("image of basis element {i} is not homogeneous of its degree")));
                }
            }
        }
        Ok(AlgebraMap {
            source: source.clone(),
            target: target.clone(),
            images,
        })
    }

    pub fn identity(a: &Algebra) -> Self {
        let one = a.field().one();
        AlgebraMap {
            source: a.clone(),
            target: a.clone(),
            images: (0..a.dim() as u32).map(|i| vec![(i, one.clone())]).collect(),
        }
    }

    pub fn chain_map(&self) -> Result<ChainMap, OperadError> {
        let imgs: Vec<Lin<usize>> = self.images.iter().map(|v| v.iter().map(|(k, x)| (*k as usize, x.clone())).collect()).collect();
        Ok(ChainMap::from_flat(self.source.complex().clone(), self.target.complex().clone(), &imgs)?)
    }

    pub fn apply(&self, v: &Lin<u32>) -> Lin<u32> {
        let mut acc = Acc::new();
        for (i, x) in v {
            acc.add_scaled(x, &self.images[*i as usize]);
        }
        acc.finish()
    }

    /// `self ∘ other`.
    pub fn after(&self, other: &AlgebraMap) -> AlgebraMap {
        AlgebraMap {
            source: other.source.clone(),
            target: self.target.clone(),
            images: other.images.iter().map(|v| self.apply(v)).collect(),
        }
    }
}

/// The algebra map out of a free algebra extending `g` on generators.
pub fn free_extension(free: &Algebra, target: &Algebra, g: &[Lin<u32>]) -> Result<AlgebraMap, OperadError> {
    let AlgebraKind::Free { generators } = free.kind() else {
        return Err(OperadError::Invalid(format!("{} is not free", free.name())));
    };
    if g.len() != generators.total_dim() {
        return Err(OperadError::Invalid("one image per generator required".into()));
    }
    let base = free.base();
    let images = crate::par::map_range(base.len(), |i| {
        let node = base.node(i as u32);
        let inputs: Vec<Lin<u32>> = node.children.iter().map(|c| g[*c as usize].clone()).collect();
        target.act_lin(&vec![(node.op, free.field().one())], &inputs)
    });
    AlgebraMap::new(free, target, images)
}
