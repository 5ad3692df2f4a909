use std::collections::HashMap;
use std::sync::Arc;

use super::{ChainComplex, ChainError, ChainHomotopy, ChainMap};
use crate::exactlin::{cokernel_of_span, sparse, Acc, Field, Lin, Matrix};

pub(crate) fn same(a: &Arc<ChainComplex>, b: &Arc<ChainComplex>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Flat basis assembled degree by degree from labelled pieces.
struct Assembly {
    degrees: Vec<i32>,
    index: HashMap<(usize, usize), usize>,
}

impl Assembly {
    /// `pieces[p]` lists `(degree, local index)` in any order; the result
    /// orders by degree, then piece, then local index.
    fn new(pieces: &[Vec<(i32, usize)>]) -> Self {
        let mut all: Vec<(i32, usize, usize)> = pieces
            .iter()
            .enumerate()
            .flat_map(|(p, v)| v.iter().map(move |(d, i)| (*d, p, *i)))
            .collect();
        all.sort();
        let degrees = all.iter().map(|t| t.0).collect();
        let index = all.iter().enumerate().map(|(k, t)| ((t.1, t.2), k)).collect();
        Assembly { degrees, index }
    }

    fn at(&self, piece: usize, i: usize) -> usize {
        self.index[&(piece, i)]
    }
}

fn flat_pieces(c: &ChainComplex) -> Vec<(i32, usize)> {
    c.flat_degrees().into_iter().enumerate().map(|(i, d)| (d, i)).collect()
}

/// `C ⊕ D`, with `C` first in each degree.
pub fn direct_sum(c: &ChainComplex, d: &ChainComplex) -> Result<ChainComplex, ChainError> {
    if c.field() != d.field() {
        return Err(ChainError::FieldMismatch(c.field(), d.field()));
    }
    let asm = Assembly::new(&[flat_pieces(c), flat_pieces(d)]);
    let mut bd = vec![Vec::new(); asm.degrees.len()];
    for (p, x) in [c, d].into_iter().enumerate() {
        for (i, b) in x.flat_boundaries().into_iter().enumerate() {
            let mut v: Lin<usize> = b.into_iter().map(|(j, s)| (asm.at(p, j), s)).collect();
            v.sort_by_key(|t| t.0);
            bd[asm.at(p, i)] = v;
        }
    }
    Ok(ChainComplex::from_flat_unchecked(c.field(), &asm.degrees, &bd))
}

/// Shift degrees up by `k`; the differential picks up `(-1)^k`.
pub fn shift(c: &ChainComplex, k: i32) -> ChainComplex {
    let s = c.field().sign(k.rem_euclid(2) == 1);
    let diffs = c.degrees().map(|d| c.diff(d).scale(&s)).collect();
    let dims = c.degrees().map(|d| c.dim(d)).collect();
    ChainComplex::new_unchecked(c.field(), c.d_min() + k, dims, diffs)
}

/// An iterated tensor product with its basis tuples.
#[derive(Clone, Debug)]
pub struct TensorProduct {
    pub complex: Arc<ChainComplex>,
    /// Flat factor indices of each basis element.
    pub tuples: Vec<Vec<usize>>,
    pub index: HashMap<Vec<usize>, usize>,
}

/// `C_1 ⊗ ... ⊗ C_r`, basis ordered by total degree then lexicographically
/// by factor indices. Signs follow the Koszul rule.
pub fn tensor_many(factors: &[&ChainComplex]) -> Result<TensorProduct, ChainError> {
    let field = factors.first().map_or(Field::Q, |c| c.field());
    for c in factors {
        if c.field() != field {
            return Err(ChainError::FieldMismatch(field, c.field()));
        }
    }
    let degs: Vec<Vec<i32>> = factors.iter().map(|c| c.flat_degrees()).collect();
    let bds: Vec<Vec<Lin<usize>>> = factors.iter().map(|c| c.flat_boundaries()).collect();
    let mut tuples: Vec<Vec<usize>> = vec![Vec::new()];
    for dg in &degs {
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                (0..dg.len()).map(move |i| {
                    let mut u = t.clone();
                    u.push(i);
                    u
                })
            })
            .collect();
    }
    if factors.is_empty() {
        tuples = vec![Vec::new()];
    }
    let total = |t: &Vec<usize>| t.iter().enumerate().map(|(k, i)| degs[k][*i]).sum::<i32>();
    tuples.sort_by_key(|t| total(t));
    let index: HashMap<Vec<usize>, usize> = tuples.iter().cloned().enumerate().map(|(k, t)| (t, k)).collect();
    let degrees: Vec<i32> = tuples.iter().map(&total).collect();
    let boundary: Vec<Lin<usize>> = tuples
        .iter()
        .map(|t| {
            let mut acc = Acc::new();
            let mut before = 0i32;
            for k in 0..t.len() {
                let sign = field.sign(before.rem_euclid(2) == 1);
                for (j, v) in &bds[k][t[k]] {
                    let mut u = t.clone();
                    u[k] = *j;
                    acc.push(index[&u], &sign * v);
                }
                before += degs[k][t[k]];
            }
            acc.finish()
        })
        .collect();
    let complex = Arc::new(ChainComplex::from_flat_unchecked(field, &degrees, &boundary));
    Ok(TensorProduct { complex, tuples, index })
}

/// `C ⊗ D` with `d(x⊗y) = dx⊗y + (-1)^{|x|} x⊗dy`.
pub fn tensor(c: &ChainComplex, d: &ChainComplex) -> Result<ChainComplex, ChainError> {
    Ok((*tensor_many(&[c, d])?.complex).clone())
}

/// Tensor product of degree-0 maps on iterated tensor products.
pub(crate) fn tensor_maps(maps: &[&ChainMap], src: &TensorProduct, tgt: &TensorProduct) -> ChainMap {
    let field = src.complex.field();
    let imgs: Vec<Vec<Lin<usize>>> = maps.iter().map(|m| m.flat_images()).collect();
    let images: Vec<Lin<usize>> = src
        .tuples
        .iter()
        .map(|t| {
            let mut terms: Vec<(Vec<usize>, crate::exactlin::Scalar)> = vec![(Vec::new(), field.one())];
            for (k, i) in t.iter().enumerate() {
                let mut next = Vec::new();
                for (u, c) in &terms {
                    for (j, v) in &imgs[k][*i] {
                        let mut w = u.clone();
                        w.push(*j);
                        next.push((w, c * v));
                    }
                }
                terms = next;
            }
            let mut acc = Acc::new();
            for (u, c) in terms {
                acc.push(tgt.index[&u], c);
            }
            acc.finish()
        })
        .collect();
    ChainMap::from_flat_unchecked(src.complex.clone(), tgt.complex.clone(), &images).expect("tensor of maps")
}

/// The symmetry `C ⊗ D → D ⊗ C`, `x⊗y ↦ (-1)^{|x||y|} y⊗x`.
pub fn tensor_swap(c: &ChainComplex, d: &ChainComplex) -> Result<ChainMap, ChainError> {
    let a = tensor_many(&[c, d])?;
    let b = tensor_many(&[d, c])?;
    let (dc, dd) = (c.flat_degrees(), d.flat_degrees());
    let images: Vec<Lin<usize>> = a
        .tuples
        .iter()
        .map(|t| {
            let odd = (dc[t[0]] * dd[t[1]]).rem_euclid(2) == 1;
            vec![(b.index[&vec![t[1], t[0]]], c.field().sign(odd))]
        })
        .collect();
    ChainMap::from_flat(a.complex, b.complex, &images)
}

/// Mapping cone: `cone_n = T_n ⊕ S_{n-1}`, `d(y, x) = (dy + f x, -dx)`.
pub fn cone(f: &ChainMap) -> ChainComplex {
    cone_parts(f).0
}

/// Cone with the flat positions of the target and shifted source parts.
pub(crate) fn cone_parts(f: &ChainMap) -> (ChainComplex, Vec<usize>, Vec<usize>) {
    let (s, t) = (&f.source, &f.target);
    let field = s.field();
    let tp = flat_pieces(t);
    let sp: Vec<(i32, usize)> = flat_pieces(s).into_iter().map(|(d, i)| (d + 1, i)).collect();
    let asm = Assembly::new(&[tp, sp]);
    let t_at: Vec<usize> = (0..t.total_dim()).map(|i| asm.at(0, i)).collect();
    let s_at: Vec<usize> = (0..s.total_dim()).map(|i| asm.at(1, i)).collect();
    let mut bd = vec![Vec::new(); asm.degrees.len()];
    for (i, b) in t.flat_boundaries().into_iter().enumerate() {
        let mut v: Lin<usize> = b.into_iter().map(|(j, x)| (t_at[j], x)).collect();
        v.sort_by_key(|p| p.0);
        bd[t_at[i]] = v;
    }
    let fi = f.flat_images();
    for (i, b) in s.flat_boundaries().into_iter().enumerate() {
        let mut acc = Acc::new();
        for (j, x) in &fi[i] {
            acc.push(t_at[*j], x.clone());
        }
        for (j, x) in b {
            acc.push(s_at[j], -&x);
        }
        bd[s_at[i]] = acc.finish();
    }
    (ChainComplex::from_flat_unchecked(field, &asm.degrees, &bd), t_at, s_at)
}

/// Homotopy fiber `F = shift(cone f, -1)`, so `F_n = T_{n+1} ⊕ S_n` and
/// `d(y, x) = (-dy - f x, dx)`.
#[derive(Clone, Debug)]
pub struct HomotopyFiber {
    pub complex: Arc<ChainComplex>,
    /// `F → S`, `(y, x) ↦ x`.
    pub projection: ChainMap,
    /// `shift(T, -1) → F`, `y ↦ (y, 0)`.
    pub boundary: ChainMap,
    /// Null homotopy of `f ∘ projection`: `(y, x) ↦ -y`.
    pub nullhomotopy: ChainHomotopy,
    pub(crate) t_at: Vec<usize>,
    pub(crate) s_at: Vec<usize>,
}

pub fn homotopy_fiber(f: &ChainMap) -> HomotopyFiber {
    let (c, t_at, s_at) = cone_parts(f);
    let fib = Arc::new(shift(&c, -1));
    let field = fib.field();
    let (s, t) = (&f.source, &f.target);
    let mut proj = vec![Vec::new(); fib.total_dim()];
    for (i, p) in s_at.iter().enumerate() {
        proj[*p] = sparse::unit(field, i);
    }
    let projection = ChainMap::from_flat_unchecked(fib.clone(), s.clone(), &proj).expect("fiber projection");
    let omega = Arc::new(shift(t, -1));
    let incl: Vec<Lin<usize>> = t_at.iter().map(|p| sparse::unit(field, *p)).collect();
    let boundary = ChainMap::from_flat_unchecked(omega, fib.clone(), &incl).expect("fiber boundary");
    let fp = f.compose(&projection);
    let zero = ChainMap::zero(fib.clone(), t.clone());
    let mut comps = Vec::new();
    for d in fib.degrees() {
        // `T_{d+1}` sits in `F_d` at the front of the degree.
        let rows = t.dim(d + 1);
        let cols = fib.dim(d);
        let base = fib.offset(d);
        let tb = t.offset(d + 1);
        let entries = t_at
            .iter()
            .enumerate()
            .filter(|(_, p)| **p >= base && **p < base + cols)
            .map(|(i, p)| (i - tb, p - base, field.int(-1)));
        comps.push(Matrix::from_triplets(field, rows, cols, entries));
    }
    let nullhomotopy = ChainHomotopy::new_unchecked(fp, zero, comps);
    HomotopyFiber {
        complex: fib,
        projection,
        boundary,
        nullhomotopy,
        t_at,
        s_at,
    }
}

/// A quotient complex with its projection and chosen basis lift.
#[derive(Clone, Debug)]
pub struct CokernelMap {
    pub complex: Arc<ChainComplex>,
    pub projection: ChainMap,
    /// Flat target index representing each quotient basis element.
    pub lift: Vec<usize>,
}

/// Cokernel of a chain map.
pub fn cokernel(f: &ChainMap) -> CokernelMap {
    let gens = f.flat_images();
    quotient_by_span(&f.target, gens)
}

/// Quotient of `c` by the span of flat vectors spanning a subcomplex.
pub fn quotient_by_span(c: &Arc<ChainComplex>, gens: Vec<Lin<usize>>) -> CokernelMap {
    let field = c.field();
    let mut by_degree: HashMap<i32, Vec<Lin<usize>>> = HashMap::new();
    for g in gens {
        if let Some((j, _)) = g.first() {
            let d = c.degree_of(*j);
            let o = c.offset(d);
            by_degree.entry(d).or_default().push(g.into_iter().map(|(j, x)| (j - o, x)).collect());
        }
    }
    let mut lift = Vec::new();
    let mut degrees = Vec::new();
    let mut proj_flat = vec![Vec::new(); c.total_dim()];
    for d in c.degrees() {
        let o = c.offset(d);
        let ck = cokernel_of_span(field, c.dim(d), by_degree.remove(&d).unwrap_or_default());
        let q0 = lift.len();
        for (i, j, x) in ck.projection.entries() {
            proj_flat[o + j].push((q0 + i, x.clone()));
        }
        for b in &ck.basis {
            lift.push(o + b);
            degrees.push(d);
        }
    }
    for p in &mut proj_flat {
        p.sort_by_key(|t| t.0);
    }
    let bd = c.flat_boundaries();
    let qb: Vec<Lin<usize>> = lift
        .iter()
        .map(|l| {
            let mut acc = Acc::new();
            for (j, x) in &bd[*l] {
                acc.add_scaled(x, &proj_flat[*j]);
            }
            acc.finish()
        })
        .collect();
    let q = Arc::new(ChainComplex::from_flat_unchecked(field, &degrees, &qb));
    let projection = ChainMap::from_flat_unchecked(c.clone(), q.clone(), &proj_flat).expect("quotient projection");
    CokernelMap {
        complex: q,
        projection,
        lift,
    }
}

/// Inclusion of the subcomplex spanned by flat coordinate vectors that
/// are closed under the differential.
pub fn inclusion_of_span(c: &Arc<ChainComplex>, coords: &[usize]) -> Result<ChainMap, ChainError> {
    let mut sorted = coords.to_vec();
    sorted.sort_unstable();
    let pos: HashMap<usize, usize> = sorted.iter().enumerate().map(|(k, j)| (*j, k)).collect();
    let bd = c.flat_boundaries();
    let degrees: Vec<i32> = sorted.iter().map(|j| c.degree_of(*j)).collect();
    let mut sub_bd = Vec::new();
    for j in &sorted {
        let mut v = Vec::new();
        for (k, x) in &bd[*j] {
            match pos.get(k) {
                Some(p) => v.push((*p, x.clone())),
                None => return Err(ChainError::Invalid("span is not a subcomplex".into())),
            }
        }
        sub_bd.push(v);
    }
    let sub = Arc::new(ChainComplex::from_flat_unchecked(c.field(), &degrees, &sub_bd));
    let images: Vec<Lin<usize>> = sorted.iter().map(|j| sparse::unit(c.field(), *j)).collect();
    ChainMap::from_flat(sub, c.clone(), &images)
}
