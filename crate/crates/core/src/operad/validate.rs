//! Axiom checks for composition laws, operads, bimodules and algebras.
//! Every check enumerates basis instances within an arity cap and reports
//! each failing instance together with the structure constants it read.

use std::sync::Arc;

use serde::Serialize;

use super::{inner_tuples, tuple_degree, block_dest, multilinear, ActFn, Algebra, AlgebraMap, Bimodule, GammaKey, Operad, Trace};
use crate::exactlin::{Acc, Lin, Scalar};
use crate::par;
use crate::symseq::SymSeq;

/// One failing instance of an axiom.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub axiom: String,
    pub instance: String,
    /// Structure constants consulted while evaluating the instance.
    pub keys: Vec<GammaKey>,
}

/// A composition law `outer ∘ inner → target`.
#[derive(Clone, Copy)]
pub struct Law<'a> {
    pub name: &'a str,
    pub outer: &'a SymSeq,
    pub inner: &'a SymSeq,
    pub target: &'a SymSeq,
    pub f: &'a ActFn,
}

impl Law<'_> {
    fn eval(&self, x: &Lin<u64>, ys: &[(usize, Lin<u64>)], trace: &mut Trace) -> Lin<u64> {
        multilinear(x, ys, &mut |b, t| (self.f)(b, t, trace))
    }
}

fn gamma_fn(o: &Arc<Operad>) -> ActFn {
    let o = o.clone();
    Arc::new(move |x, ys, t| o.gamma_traced(x, ys, t))
}

fn basis_lin(x: u64, one: &Scalar) -> Lin<u64> {
    vec![(x, one.clone())]
}

fn boundary(seq: &SymSeq, r: usize, v: &Lin<u64>) -> Lin<u64> {
    let mut acc = Acc::new();
    for (b, x) in v {
        acc.add_scaled(x, &seq.op_boundary(r, *b));
    }
    acc.finish()
}

fn violation(axiom: &str, instance: String, mut trace: Trace) -> Violation {
    trace.sort();
    trace.dedup();
    Violation {
        axiom: axiom.into(),
        instance,
        keys: trace,
    }
}

fn instances(law: &Law<'_>, cap: usize) -> Vec<(u64, Vec<(usize, u64)>)> {
    let mut out = Vec::new();
    for r in 1..=cap {
        for x in law.outer.basis(r) {
            for ys in inner_tuples(law.inner, r, cap, false) {
                out.push((x, ys));
            }
        }
    }
    out
}

/// `d f(x; y) = f(dx; y) + Σ_k ± f(x; …, dy_k, …)`.
pub fn check_law_chain(law: &Law<'_>, cap: usize) -> Vec<Violation> {
    let field = law.target.field();
    let one = field.one();
    let found = par::map(&instances(law, cap), |(x, ys)| {
        let r = ys.len();
        let s: usize = ys.iter().map(|y| y.0).sum();
        let mut trace = Vec::new();
        let lin_ys: Vec<(usize, Lin<u64>)> = ys.iter().map(|(a, b)| (*a, basis_lin(*b, &one))).collect();
        let lhs = boundary(law.target, s, &law.eval(&basis_lin(*x, &one), &lin_ys, &mut trace));
        let mut acc = Acc::new();
        acc.add_scaled(&one, &law.eval(&law.outer.op_boundary(r, *x), &lin_ys, &mut trace));
        let mut odd = law.outer.op_degree(r, *x) & 1 == 1;
        for k in 0..r {
            let mut v = lin_ys.clone();
            v[k].1 = law.inner.op_boundary(ys[k].0, ys[k].1);
            acc.add_scaled(&field.sign(odd), &law.eval(&basis_lin(*x, &one), &v, &mut trace));
            odd ^= law.inner.op_degree(ys[k].0, ys[k].1) & 1 == 1;
        }
        (lhs != acc.finish()).then(|| violation(&format!("{}: chain map", law.name), format!("{x}; {ys:?}"), trace))
    });
    found.into_iter().flatten().collect()
}

/// Compatibility with permutations of the inner operations and of their
/// inputs.
pub fn check_law_equivariance(law: &Law<'_>, cap: usize) -> Vec<Violation> {
    let field = law.target.field();
    let one = field.one();
    let found = par::map(&instances(law, cap), |(x, ys)| {
        let r = ys.len();
        let sizes: Vec<usize> = ys.iter().map(|y| y.0).collect();
        let s: usize = sizes.iter().sum();
        let mut out = Vec::new();
        let mut trace = Vec::new();
        let base = (law.f)(*x, ys, &mut trace);
        for i in 0..r.saturating_sub(1) {
            let mut t2 = trace.clone();
            let mut dest: Vec<usize> = (0..r).collect();
            dest.swap(i, i + 1);
            let xs = law.outer.act(r, &dest, &basis_lin(*x, &one));
            let mut zs = ys.clone();
            zs.swap(i, i + 1);
            let lin_zs: Vec<(usize, Lin<u64>)> = zs.iter().map(|(a, b)| (*a, basis_lin(*b, &one))).collect();
            let (blocks, _) = block_dest(&sizes, &dest);
            let moved = law.target.act(s, &blocks, &law.eval(&xs, &lin_zs, &mut t2));
            let odd = law.inner.op_degree(ys[i].0, ys[i].1) & law.inner.op_degree(ys[i + 1].0, ys[i + 1].1) & 1 == 1;
            let rhs = crate::exactlin::sparse::scale(&field.sign(odd), &moved);
            if rhs != base {
                out.push(violation(&format!("{}: outer equivariance", law.name), format!("{x}; {ys:?}; s_{}", i + 1), t2));
            }
        }
        let mut off = 0;
        for k in 0..r {
            for j in 0..sizes[k].saturating_sub(1) {
                let mut t2 = trace.clone();
                let mut lin_ys: Vec<(usize, Lin<u64>)> = ys.iter().map(|(a, b)| (*a, basis_lin(*b, &one))).collect();
                lin_ys[k].1 = law.inner.swap(sizes[k], j, &lin_ys[k].1);
                let lhs = law.eval(&basis_lin(*x, &one), &lin_ys, &mut t2);
                let rhs = law.target.swap(s, off + j, &base);
                if lhs != rhs {
                    out.push(violation(
                        &format!("{}: inner equivariance", law.name),
                        format!("{x}; {ys:?}; s_{} in block {k}", j + 1),
                        t2,
                    ));
                }
            }
            off += sizes[k];
        }
        out
    });
    found.into_iter().flatten().collect()
}

/// `f(u; y) = y` for a unit `u` of the outer sequence.
pub fn check_left_unit(law: &Law<'_>, unit: &Lin<u64>, cap: usize) -> Vec<Violation> {
    let one = law.target.field().one();
    let mut out = Vec::new();
    for s in 1..=cap {
        for y in law.inner.basis(s) {
            let mut trace = Vec::new();
            let v = law.eval(unit, &[(s, basis_lin(y, &one))], &mut trace);
            if v != basis_lin(y, &one) {
                out.push(violation(&format!("{}: left unit", law.name), format!("u; ({s}, {y})"), trace));
            }
        }
    }
    out
}

/// `f(x; u, …, u) = x` for a unit `u` of the inner sequence.
pub fn check_right_unit(law: &Law<'_>, unit: &Lin<u64>, cap: usize) -> Vec<Violation> {
    let one = law.target.field().one();
    let mut out = Vec::new();
    for r in 1..=cap {
        for x in law.outer.basis(r) {
            let mut trace = Vec::new();
            let ys: Vec<(usize, Lin<u64>)> = (0..r).map(|_| (1, unit.clone())).collect();
            let v = law.eval(&basis_lin(x, &one), &ys, &mut trace);
            if v != basis_lin(x, &one) {
                out.push(violation(&format!("{}: right unit", law.name), format!("({r}, {x}); u…u"), trace));
            }
        }
    }
    out
}

/// `φ(α(x; y); z) = ± ψ(x; β(y_1; z_{B_1}), …, β(y_r; z_{B_r}))`, the sign
/// coming from moving each `y_l` past the blocks `z_{B_k}`, `k < l`.
pub fn check_assoc(alpha: &Law<'_>, beta: &Law<'_>, phi: &Law<'_>, psi: &Law<'_>, cap: usize, axiom: &str) -> Vec<Violation> {
    let field = phi.target.field();
    let one = field.one();
    let mut work = Vec::new();
    for r in 1..=cap {
        for x in alpha.outer.basis(r) {
            for ys in inner_tuples(alpha.inner, r, cap, false) {
                work.push((x, ys));
            }
        }
    }
    let found = par::map(&work, |(x, ys)| {
        let t: usize = ys.iter().map(|y| y.0).sum();
        let mut out = Vec::new();
        let mut t0 = Vec::new();
        let lin_ys: Vec<(usize, Lin<u64>)> = ys.iter().map(|(a, b)| (*a, basis_lin(*b, &one))).collect();
        let first = alpha.eval(&basis_lin(*x, &one), &lin_ys, &mut t0);
        for zs in inner_tuples(beta.inner, t, cap, false) {
            let mut trace = t0.clone();
            let lin_zs: Vec<(usize, Lin<u64>)> = zs.iter().map(|(a, b)| (*a, basis_lin(*b, &one))).collect();
            let lhs = phi.eval(&first, &lin_zs, &mut trace);
            let mut inner = Vec::with_capacity(ys.len());
            let mut pos = 0;
            let mut odd = false;
            let mut zdeg_before = 0;
            for (k, (a, y)) in ys.iter().enumerate() {
                let block = &zs[pos..pos + a];
                pos += a;
                let arity: usize = block.iter().map(|z| z.0).sum();
                let v = beta.eval(&basis_lin(*y, &one), &lin_zs[pos - a..pos], &mut trace);
                if k > 0 && (alpha.inner.op_degree(*a, *y) & 1 == 1) && (zdeg_before & 1 == 1) {
                    odd = !odd;
                }
                zdeg_before += tuple_degree(beta.inner, block);
                inner.push((arity, v));
            }
            let rhs = crate::exactlin::sparse::scale(&field.sign(odd), &psi.eval(&basis_lin(*x, &one), &inner, &mut trace));
            if lhs != rhs {
                out.push(violation(axiom, format!("{x}; {ys:?}; {zs:?}"), trace));
            }
        }
        out
    });
    found.into_iter().flatten().collect()
}

/// Unit, chain-map, equivariance and associativity axioms of an operad
/// through total arity `cap`.
pub fn validate_operad(o: &Arc<Operad>, cap: usize) -> Vec<Violation> {
    let g = gamma_fn(o);
    let seq = o.seq();
    let law = Law {
        name: "γ",
        outer: seq,
        inner: seq,
        target: seq,
        f: &g,
    };
    let mut out = check_left_unit(&law, o.unit_element(), cap);
    out.extend(check_right_unit(&law, o.unit_element(), cap));
    out.extend(check_law_chain(&law, cap));
    out.extend(check_law_equivariance(&law, cap));
    out.extend(check_assoc(&law, &law, &law, &law, cap, "γ: associativity"));
    out
}

/// Axioms of the actions present on a bimodule, and their compatibility.
pub fn validate_bimodule(m: &Bimodule, cap: usize) -> Vec<Violation> {
    let o = m.operad();
    let g = gamma_fn(o);
    let gl = Law {
        name: "γ",
        outer: o.seq(),
        inner: o.seq(),
        target: o.seq(),
        f: &g,
    };
    let mut out = Vec::new();
    let left = m.left_fn().map(|f| Law {
        name: "λ",
        outer: o.seq(),
        inner: m.seq(),
        target: m.seq(),
        f,
    });
    let right = m.right_fn().map(|f| Law {
        name: "ρ",
        outer: m.seq(),
        inner: o.seq(),
        target: m.seq(),
        f,
    });
    if let Some(l) = &left {
        out.extend(check_left_unit(l, o.unit_element(), cap));
        out.extend(check_law_chain(l, cap));
        out.extend(check_law_equivariance(l, cap));
        out.extend(check_assoc(&gl, l, l, l, cap, "λ: associativity"));
    }
    if let Some(rl) = &right {
        out.extend(check_right_unit(rl, o.unit_element(), cap));
        out.extend(check_law_chain(rl, cap));
        out.extend(check_law_equivariance(rl, cap));
        out.extend(check_assoc(rl, &gl, rl, rl, cap, "ρ: associativity"));
    }
    if let (Some(l), Some(rl)) = (&left, &right) {
        out.extend(check_assoc(l, rl, rl, l, cap, "λ/ρ: compatibility"));
    }
    out
}

/// Ordered tuples of basis elements of `a` with total degree at most
/// `budget`.
pub fn input_tuples(a: &Algebra, r: usize, budget: Option<i32>) -> Vec<Vec<u32>> {
    fn go(a: &Algebra, r: usize, budget: Option<i32>, used: i32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in 0..a.dim() as u32 {
            let d = a.degree(i);
            if budget.is_some_and(|b| used + d > b) {
                break;
            }
            cur.push(i);
            go(a, r, budget, used + d, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(a, r, budget, 0, &mut Vec::new(), &mut out);
    out
}

fn algebra_boundary(a: &Algebra, v: &Lin<u32>) -> Lin<u32> {
    let mut acc = Acc::new();
    for (i, x) in v {
        acc.add_scaled(x, a.base().boundary(*i));
    }
    acc.finish()
}

/// Unit, chain-map, equivariance and associativity of an algebra action
/// through `arity_cap` inputs, on inputs of total degree within the
/// algebra's cap.
pub fn validate_algebra(a: &Algebra, arity_cap: usize) -> Vec<Violation> {
    let o = a.operad().clone();
    let field = a.field();
    let one = field.one();
    let seq = o.seq();
    let budget = a.cap();
    let mut out = Vec::new();
    for i in 0..a.dim() as u32 {
        let v = a.act_lin(o.unit_element(), &[vec![(i, one.clone())]]);
        if v != vec![(i, one.clone())] {
            out.push(violation("algebra: unit", format!("u; {i}"), Vec::new()));
        }
    }
    let mut work = Vec::new();
    for r in 1..=arity_cap {
        for x in seq.basis(r) {
            for inputs in input_tuples(a, r, budget) {
                work.push((r, x, inputs));
            }
        }
    }
    let found = par::map(&work, |(r, x, inputs)| {
        let r = *r;
        let mut res = Vec::new();
        let base = a.act(*x, inputs);
        // Chain map.
        let lhs = algebra_boundary(a, &base);
        let mut acc = Acc::new();
        let lin_in: Vec<Lin<u32>> = inputs.iter().map(|i| vec![(*i, one.clone())]).collect();
        acc.add_scaled(&one, &a.act_lin(&seq.op_boundary(r, *x), &lin_in));
        let mut odd = seq.op_degree(r, *x) & 1 == 1;
        for k in 0..r {
            let mut v = lin_in.clone();
            v[k] = a.base().boundary(inputs[k]).clone();
            acc.add_scaled(&field.sign(odd), &a.act_lin(&vec![(*x, one.clone())], &v));
            odd ^= a.degree(inputs[k]) & 1 == 1;
        }
        if lhs != acc.finish() {
            res.push(violation("algebra: chain map", format!("{x}; {inputs:?}"), Vec::new()));
        }
        // Equivariance.
        for j in 0..r.saturating_sub(1) {
            let xs = seq.swap(r, j, &vec![(*x, one.clone())]);
            let mut sw = inputs.clone();
            sw.swap(j, j + 1);
            let odd = a.degree(inputs[j]) & a.degree(inputs[j + 1]) & 1 == 1;
            let lin_sw: Vec<Lin<u32>> = sw.iter().map(|i| vec![(*i, one.clone())]).collect();
            let rhs = crate::exactlin::sparse::scale(&field.sign(odd), &a.act_lin(&xs, &lin_sw));
            if rhs != base {
                res.push(violation("algebra: equivariance", format!("{x}; {inputs:?}; s_{}", j + 1), Vec::new()));
            }
        }
        res
    });
    out.extend(found.into_iter().flatten());
    // Associativity: act(γ(x; y); i) = ± act(x; act(y_k; i_{B_k})).
    let mut assoc = Vec::new();
    for r in 1..=arity_cap {
        for x in seq.basis(r) {
            for ys in inner_tuples(seq, r, arity_cap, false) {
                assoc.push((x, ys));
            }
        }
    }
    let found = par::map(&assoc, |(x, ys)| {
        let t: usize = ys.iter().map(|y| y.0).sum();
        let mut res = Vec::new();
        let composite = o.gamma_lin(&vec![(*x, one.clone())], &ys.iter().map(|(a, b)| (*a, vec![(*b, one.clone())])).collect::<Vec<_>>());
        let y_deg: Vec<i32> = ys.iter().map(|(a, b)| seq.op_degree(*a, *b)).collect();
        let budget = a.cap().map(|c| c - y_deg.iter().sum::<i32>() - seq.op_degree(ys.len(), *x));
        for inputs in input_tuples(a, t, budget) {
            let lin_in: Vec<Lin<u32>> = inputs.iter().map(|i| vec![(*i, one.clone())]).collect();
            let lhs = a.act_lin(&composite, &lin_in);
            let mut inner = Vec::new();
            let mut pos = 0;
            let mut odd = false;
            let mut deg_before = 0;
            for (k, (arity, y)) in ys.iter().enumerate() {
                inner.push(a.act_lin(&vec![(*y, one.clone())], &lin_in[pos..pos + arity]));
                if k > 0 && y_deg[k] & 1 == 1 && deg_before & 1 == 1 {
                    odd = !odd;
                }
                deg_before += inputs[pos..pos + arity].iter().map(|i| a.degree(*i)).sum::<i32>();
                pos += arity;
            }
            let rhs = crate::exactlin::sparse::scale(&field.sign(odd), &a.act_lin(&vec![(*x, one.clone())], &inner));
            if lhs != rhs {
                res.push(violation("algebra: associativity", format!("{x}; {ys:?}; {inputs:?}"), Vec::new()));
            }
        }
        res
    });
    out.extend(found.into_iter().flatten());
    out
}

/// Chain-map and action compatibility of an algebra map.
pub fn validate_algebra_map(f: &AlgebraMap, arity_cap: usize) -> Vec<Violation> {
    let mut out = Vec::new();
    match f.chain_map() {
        Ok(m) if m.is_chain_map() => {}
        _ => out.push(violation("algebra map: chain map", String::new(), Vec::new())),
    }
    let a = &f.source;
    let one = a.field().one();
    let seq = a.operad().seq().clone();
    let mut work = Vec::new();
    for r in 1..=arity_cap {
        for x in seq.basis(r) {
            for inputs in input_tuples(a, r, a.cap()) {
                work.push((x, inputs));
            }
        }
    }
    let found = par::map(&work, |(x, inputs)| {
        let lhs = f.apply(&a.act(*x, inputs));
        let imgs: Vec<Lin<u32>> = inputs.iter().map(|i| f.images[*i as usize].clone()).collect();
        let rhs = f.target.act_lin(&vec![(*x, one.clone())], &imgs);
        (lhs != rhs).then(|| violation("algebra map: action", format!("{x}; {inputs:?}"), Vec::new()))
    });
    out.extend(found.into_iter().flatten());
    out
}
