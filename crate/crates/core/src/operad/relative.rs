//! The relative composite `M ∘_O I`: the cokernel of
//! `ρ − S_M(act): S_M(S_O(I)) → S_M(I)`, for algebras and, through label
//! algebras, for left modules level by level.

use std::sync::Arc;

use super::{label_algebra, Algebra, Bimodule, OperadError};
use crate::chain::{quotient_by_span, ChainComplex, ChainMap, CokernelMap};
use crate::exactlin::{Acc, Lin};
use crate::symseq::schur::{map_layer, merge, same_op, Build, Layer, Node};
use crate::symseq::{Level, SymRep, SymSeq, Tail};

const UNBOUNDED: i32 = i32::MAX / 4;

/// `M ∘_O I` as a quotient of `S_M(I)`.
#[derive(Clone, Debug)]
pub struct RelativeAlgebra {
    /// `S_M(I)`.
    pub layer: Arc<Layer>,
    pub quotient: CokernelMap,
    proj: Vec<Lin<usize>>,
}

impl RelativeAlgebra {
    pub fn complex(&self) -> &Arc<ChainComplex> {
        &self.quotient.complex
    }

    /// Class of an element of `S_M(I)`.
    pub fn project(&self, v: &Lin<u32>) -> Lin<usize> {
        let mut acc = Acc::new();
        for (j, x) in v {
            acc.add_scaled(x, &self.proj[*j as usize]);
        }
        acc.finish()
    }
}

fn same_operad(m: &Bimodule, a: &Algebra) -> Result<(), OperadError> {
    if Arc::ptr_eq(m.operad(), a.operad()) || m.operad() == a.operad() {
        Ok(())
    } else {
        Err(OperadError::Mismatch(format!("{} vs {}", m.operad().name(), a.operad().name())))
    }
}

fn build_relative(m: &Bimodule, a: &Algebra, opts: &Build) -> Result<RelativeAlgebra, OperadError> {
    same_operad(m, a)?;
    let Some(rho) = m.right_fn() else {
        return Err(OperadError::Invalid(format!("{} has no right action", m.name())));
    };
    let o = m.operad();
    let field = m.field();
    let one = field.one();
    let layer = Arc::new(Layer::build(m.seq(), a.base().clone(), opts));
    let mut inner_opts = opts.clone();
    inner_opts.full_mask = None;
    let so = Arc::new(Layer::build(o.seq(), a.base().clone(), &inner_opts));
    let sms = Layer::build(m.seq(), so.clone(), opts);
    let rho_law = |x: u64, ys: &[(usize, u64)]| rho(x, ys, &mut Vec::new());
    let via_rho: Vec<Lin<u32>> = crate::par::map_range(sms.len(), |i| {
        let node = sms.node(i as u32);
        let kids: Vec<_> = node.children.iter().map(|c| so.child(*c)).collect();
        let mut acc = Acc::new();
        merge(&layer, m.seq(), &vec![(node.op, one.clone())], &kids, &rho_law, &one, &mut acc);
        acc.finish()
    });
    let via_act = map_layer(&sms, &layer, m.seq(), &same_op(field), &|c| {
        let n = so.node(c);
        a.act(n.op, &n.children)
    });
    let gens: Vec<Lin<usize>> = via_rho
        .into_iter()
        .zip(via_act)
        .map(|(r, s)| {
            crate::exactlin::sparse::axpy(&r, &-&one, &s)
                .into_iter()
                .map(|(k, x)| (k as usize, x))
                .collect()
        })
        .collect();
    let complex = Arc::new(layer.complex()?);
    let quotient = quotient_by_span(&complex, gens);
    Ok(RelativeAlgebra {
        layer,
        proj: quotient.projection.flat_images(),
        quotient,
    })
}

/// `M ∘_O I` through `degree_cap`, with trees of at most `arity_cap`
/// inputs at each stage.
pub fn relative_compose_algebra(m: &Bimodule, a: &Algebra, degree_cap: i32, arity_cap: usize) -> Result<RelativeAlgebra, OperadError> {
    build_relative(m, a, &Build::new(degree_cap, arity_cap))
}

/// Level `s` of `M ∘_O N` as the multilinear part of `M ∘_O S_N(s labels)`.
pub fn relative_level(m: &Bimodule, n: &Bimodule, s: usize) -> Result<(Algebra, RelativeAlgebra), OperadError> {
    let a = label_algebra(n, s)?;
    let mut opts = Build::new(UNBOUNDED, s);
    opts.full_mask = Some(if s == 64 { u64::MAX } else { (1u64 << s) - 1 });
    let rel = build_relative(m, &a, &opts)?;
    Ok((a, rel))
}

/// Transposition `s_i` acting on `M ∘_O N` at level `s`, as flat images.
fn relabel(m: &Bimodule, n: &Bimodule, a: &Algebra, rel: &RelativeAlgebra, i: usize) -> Vec<Lin<usize>> {
    let field = m.field();
    let swap = move |c: u32| {
        let c = c as usize;
        let d = if c == i { i + 1 } else if c == i + 1 { i } else { c };
        vec![(d as u32, field.one())]
    };
    let base = map_layer(a.base(), a.base(), n.seq(), &same_op(field), &swap);
    let top = map_layer(&rel.layer, &rel.layer, m.seq(), &same_op(field), &|c| base[c as usize].clone());
    rel.quotient.lift.iter().map(|l| rel.project(&top[*l])).collect()
}

/// `M ∘_O N` through arity `s_cap`, with the inherited symmetric group
/// actions. Levels above `s_cap` are unknown.
pub fn relative_compose(m: &Bimodule, n: &Bimodule, s_cap: usize) -> Result<SymSeq, OperadError> {
    if !Arc::ptr_eq(m.operad(), n.operad()) && m.operad() != n.operad() {
        return Err(OperadError::Mismatch(format!("{} vs {}", m.operad().name(), n.operad().name())));
    }
    let field = m.field();
    let mut levels = vec![Level::Zero];
    for s in 1..=s_cap {
        let (a, rel) = relative_level(m, n, s)?;
        let complex = rel.complex().clone();
        if complex.is_zero() {
            levels.push(Level::Zero);
            continue;
        }
        let gens: Vec<Vec<Lin<usize>>> = (0..s - 1).map(|i| relabel(m, n, &a, &rel, i)).collect();
        levels.push(Level::Dense(Arc::new(SymRep::from_flat(s, complex, &gens)?)));
    }
    Ok(SymSeq::new(field, levels, Tail::Unknown)?)
}

fn label_node(a: &Algebra, n: &Bimodule, s: usize, b: u64) -> Lin<u32> {
    let one = n.field().one();
    let children: Vec<u32> = (0..s as u32).collect();
    let mut acc = Acc::new();
    a.base().canonical(n.seq(), &vec![(b, one.clone())], &children, &one, &mut acc);
    acc.finish()
}

/// The comparison `N(s) → (O ∘_O N)(s)`, `y ↦ [1 ⊗ y]`, for `s ≤ s_cap`.
pub fn left_unit_comparison(o_as_bimodule: &Bimodule, n: &Bimodule, s_cap: usize) -> Result<Vec<ChainMap>, OperadError> {
    let u = o_as_bimodule
        .operad()
        .unit_basis()
        .ok_or_else(|| OperadError::Invalid("unit is not a basis element".into()))?;
    let one = n.field().one();
    let mut out = Vec::new();
    for s in 1..=s_cap {
        let (a, rel) = relative_level(o_as_bimodule, n, s)?;
        let images: Vec<Lin<usize>> = n
            .seq()
            .basis(s)
            .into_iter()
            .map(|b| {
                let mut acc = Acc::new();
                for (id, x) in label_node(&a, n, s, b) {
                    rel.layer.canonical(o_as_bimodule.seq(), &vec![(u, one.clone())], &[id], &x, &mut acc);
                }
                rel.project(&acc.finish())
            })
            .collect();
        let src = Arc::new(crate::symseq::level_complex(n.seq(), s));
        out.push(ChainMap::from_flat(src, rel.complex().clone(), &images)?);
    }
    Ok(out)
}

/// The comparison `M(s) → (M ∘_O O)(s)`, `x ↦ [x ⊗ (1, …, 1)]`.
pub fn right_unit_comparison(m: &Bimodule, o_as_bimodule: &Bimodule, s_cap: usize) -> Result<Vec<ChainMap>, OperadError> {
    let o = o_as_bimodule.operad();
    let u = o.unit_basis().ok_or_else(|| OperadError::Invalid("unit is not a basis element".into()))?;
    let one = m.field().one();
    let mut out = Vec::new();
    for s in 1..=s_cap {
        let (a, rel) = relative_level(m, o_as_bimodule, s)?;
        let kids: Option<Vec<u32>> = (0..s as u32)
            .map(|k| {
                a.base().lookup(&Node {
                    op: u,
                    children: Box::new([k]),
                })
            })
            .collect();
        let kids = kids.ok_or_else(|| OperadError::Invalid("missing unit trees".into()))?;
        let images: Vec<Lin<usize>> = m
            .seq()
            .basis(s)
            .into_iter()
            .map(|b| {
                let mut acc = Acc::new();
                rel.layer.canonical(m.seq(), &vec![(b, one.clone())], &kids, &one, &mut acc);
                rel.project(&acc.finish())
            })
            .collect();
        let src = Arc::new(crate::symseq::level_complex(m.seq(), s));
        out.push(ChainMap::from_flat(src, rel.complex().clone(), &images)?);
    }
    Ok(out)
}
