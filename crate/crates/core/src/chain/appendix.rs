//! Pushout-corner maps of commuting squares and colimits of punctured cubes.

use std::collections::HashMap;
use std::sync::Arc;

use super::ops::{quotient_by_span, same, tensor_many, tensor_maps, TensorProduct};
use super::{direct_sum, ChainComplex, ChainError, ChainMap};
use crate::exactlin::{Acc, Lin};

/// A square `A → B → D`, `A → C → D` of chain maps.
#[derive(Clone, Debug)]
pub struct CommSquare {
    pub top: ChainMap,
    pub left: ChainMap,
    pub right: ChainMap,
    pub bottom: ChainMap,
}

impl CommSquare {
    pub fn check(&self) -> Result<(), ChainError> {
        let a = self.right.compose(&self.top);
        let b = self.bottom.compose(&self.left);
        for d in a.source.degrees() {
            if a.comp(d) != b.comp(d) {
                return Err(ChainError::NonCommutingSquare(d));
            }
        }
        Ok(())
    }
}

/// The square of `f1 : M → N` and `f2 : A → B` under `⊗`:
/// `M⊗A → N⊗A`, `M⊗A → M⊗B`, `N⊗A → N⊗B`, `M⊗B → N⊗B`.
pub fn tensor_square(f1: &ChainMap, f2: &ChainMap) -> Result<CommSquare, ChainError> {
    let (m, n) = (&f1.source, &f1.target);
    let (a, b) = (&f2.source, &f2.target);
    let ma = tensor_many(&[m, a])?;
    let na = tensor_many(&[n, a])?;
    let mb = tensor_many(&[m, b])?;
    let nb = tensor_many(&[n, b])?;
    let ida = ChainMap::identity(a.clone());
    let idm = ChainMap::identity(m.clone());
    let idn = ChainMap::identity(n.clone());
    let idb = ChainMap::identity(b.clone());
    Ok(CommSquare {
        top: tensor_maps(&[f1, &ida], &ma, &na),
        left: tensor_maps(&[&idm, f2], &ma, &mb),
        right: tensor_maps(&[&idn, f2], &na, &nb),
        bottom: tensor_maps(&[f1, &idb], &mb, &nb),
    })
}

/// The map from the pushout `B ⊔_A C` to `D`. The pushout is the
/// cokernel of `(top, -left) : A → B ⊕ C`.
pub fn pushout_corner_map(sq: &CommSquare) -> Result<ChainMap, ChainError> {
    sq.check()?;
    if !same(&sq.top.target, &sq.right.source)
        || !same(&sq.left.target, &sq.bottom.source)
        || !same(&sq.right.target, &sq.bottom.target)
    {
        return Err(ChainError::Invalid("square objects do not match".into()));
    }
    let (b, c) = (&sq.top.target, &sq.left.target);
    let sum = Arc::new(direct_sum(b, c)?);
    let (bpos, cpos) = sum_positions(b, c);
    let top = sq.top.flat_images();
    let left = sq.left.flat_images();
    let gens: Vec<Lin<usize>> = top
        .iter()
        .zip(&left)
        .map(|(t, l)| {
            let mut acc = Acc::new();
            for (j, x) in t {
                acc.push(bpos[*j], x.clone());
            }
            for (j, x) in l {
                acc.push(cpos[*j], -x);
            }
            acc.finish()
        })
        .collect();
    let q = quotient_by_span(&sum, gens);
    let right = sq.right.flat_images();
    let bottom = sq.bottom.flat_images();
    let mut from_sum = vec![Vec::new(); sum.total_dim()];
    for (j, p) in bpos.iter().enumerate() {
        from_sum[*p] = right[j].clone();
    }
    for (j, p) in cpos.iter().enumerate() {
        from_sum[*p] = bottom[j].clone();
    }
    let images: Vec<Lin<usize>> = q.lift.iter().map(|l| from_sum[*l].clone()).collect();
    ChainMap::from_flat(q.complex.clone(), sq.right.target.clone(), &images)
}

/// Flat positions of the two summands inside `direct_sum(b, c)`.
fn sum_positions(b: &ChainComplex, c: &ChainComplex) -> (Vec<usize>, Vec<usize>) {
    let mut bpos = vec![0; b.total_dim()];
    let mut cpos = vec![0; c.total_dim()];
    let lo = b.d_min().min(c.d_min());
    let hi = b.d_max().max(c.d_max());
    let mut k = 0;
    for d in lo..=hi {
        for i in 0..b.dim(d) {
            bpos[b.offset(d) + i] = k;
            k += 1;
        }
        for i in 0..c.dim(d) {
            cpos[c.offset(d) + i] = k;
            k += 1;
        }
    }
    (bpos, cpos)
}

/// Colimit of the cube `(X → Y)^{⊗r}` with its terminal vertex removed.
#[derive(Clone, Debug)]
pub struct CubeColimit {
    pub complex: Arc<ChainComplex>,
    /// Canonical map to `Y^{⊗r}`.
    pub to_power: ChainMap,
    /// Action of the adjacent transpositions on the colimit.
    pub action: Vec<ChainMap>,
    /// Action of the adjacent transpositions on `Y^{⊗r}`.
    pub power_action: Vec<ChainMap>,
}

pub fn punctured_cube_colimit(f: &ChainMap, r: usize) -> Result<CubeColimit, ChainError> {
    if r == 0 {
        return Err(ChainError::Invalid("cube dimension must be positive".into()));
    }
    let field = f.field();
    let (x, y) = (&f.source, &f.target);
    let full = (1u32 << r) - 1;
    let factors = |s: u32| -> Vec<&ChainComplex> {
        (0..r).map(|k| if s >> k & 1 == 1 { &**y } else { &**x }).collect()
    };
    let verts: Vec<u32> = (0..full).collect();
    let prods: Vec<TensorProduct> = verts
        .iter()
        .map(|s| tensor_many(&factors(*s)))
        .collect::<Result<_, _>>()?;
    let power = tensor_many(&factors(full))?;
    // Total space: direct sum over vertices, laid out degree by degree.
    let mut pieces: Vec<(i32, u32, usize)> = Vec::new();
    for (v, p) in prods.iter().enumerate() {
        for (i, d) in p.complex.flat_degrees().into_iter().enumerate() {
            pieces.push((d, v as u32, i));
        }
    }
    pieces.sort();
    let pos: HashMap<(u32, usize), usize> = pieces.iter().enumerate().map(|(k, t)| ((t.1, t.2), k)).collect();
    let degrees: Vec<i32> = pieces.iter().map(|t| t.0).collect();
    let bds: Vec<Vec<Lin<usize>>> = prods.iter().map(|p| p.complex.flat_boundaries()).collect();
    let boundary: Vec<Lin<usize>> = pieces
        .iter()
        .map(|(_, v, i)| {
            let mut b: Lin<usize> = bds[*v as usize][*i].iter().map(|(j, c)| (pos[&(*v, *j)], c.clone())).collect();
            b.sort_by_key(|t| t.0);
            b
        })
        .collect();
    let total = Arc::new(ChainComplex::from_flat_unchecked(field, &degrees, &boundary));
    let fimg = f.flat_images();
    // Apply f at coordinate k of a tuple.
    let push = |tuple: &[usize], k: usize| -> Vec<(Vec<usize>, crate::exactlin::Scalar)> {
        fimg[tuple[k]]
            .iter()
            .map(|(j, c)| {
                let mut t = tuple.to_vec();
                t[k] = *j;
                (t, c.clone())
            })
            .collect()
    };
    let mut rels = Vec::new();
    for (v, p) in prods.iter().enumerate() {
        let s = v as u32;
        for k in 0..r {
            let t = s | 1 << k;
            if s >> k & 1 == 1 || t == full {
                continue;
            }
            for (i, tup) in p.tuples.iter().enumerate() {
                let mut acc = Acc::new();
                acc.push(pos[&(s, i)], field.one());
                for (u, c) in push(tup, k) {
                    acc.push(pos[&(t, prods[t as usize].index[&u])], -&c);
                }
                rels.push(acc.finish());
            }
        }
    }
    let q = quotient_by_span(&total, rels);
    // Map to Y^{⊗r}: apply f on every X-coordinate.
    let to_y = |s: u32, tup: &[usize]| -> Lin<usize> {
        let mut terms = vec![(tup.to_vec(), field.one())];
        for k in 0..r {
            if s >> k & 1 == 0 {
                terms = terms
                    .into_iter()
                    .flat_map(|(t, c)| push(&t, k).into_iter().map(move |(u, e)| (u, &c * &e)))
                    .collect();
            }
        }
        let mut acc = Acc::new();
        for (u, c) in terms {
            acc.push(power.index[&u], c);
        }
        acc.finish()
    };
    let images: Vec<Lin<usize>> = q
        .lift
        .iter()
        .map(|l| {
            let (_, v, i) = pieces[*l];
            to_y(v, &prods[v as usize].tuples[i])
        })
        .collect();
    let to_power = ChainMap::from_flat(q.complex.clone(), power.complex.clone(), &images)?;
    // Transpositions with Koszul signs.
    let xd = x.flat_degrees();
    let yd = y.flat_degrees();
    let deg = |s: u32, k: usize, i: usize| if s >> k & 1 == 1 { yd[i] } else { xd[i] };
    let swap_vertex = |s: u32, k: usize| -> u32 {
        let (a, b) = (s >> k & 1, s >> (k + 1) & 1);
        (s & !(0b11 << k)) | (a << (k + 1)) | (b << k)
    };
    let mut action = Vec::new();
    let mut power_action = Vec::new();
    for k in 0..r.saturating_sub(1) {
        let qp = q.projection.flat_images();
        let imgs: Vec<Lin<usize>> = q
            .lift
            .iter()
            .map(|l| {
                let (_, v, i) = pieces[*l];
                let tup = &prods[v as usize].tuples[i];
                let odd = (deg(v, k, tup[k]) * deg(v, k + 1, tup[k + 1])).rem_euclid(2) == 1;
                let mut u = tup.clone();
                u.swap(k, k + 1);
                let w = swap_vertex(v, k);
                let j = pos[&(w, prods[w as usize].index[&u])];
                crate::exactlin::sparse::scale(&field.sign(odd), &qp[j])
            })
            .collect();
        action.push(ChainMap::from_flat(q.complex.clone(), q.complex.clone(), &imgs)?);
        let pimgs: Vec<Lin<usize>> = power
            .tuples
            .iter()
            .map(|tup| {
                let odd = (yd[tup[k]] * yd[tup[k + 1]]).rem_euclid(2) == 1;
                let mut u = tup.clone();
                u.swap(k, k + 1);
                vec![(power.index[&u], field.sign(odd))]
            })
            .collect();
        power_action.push(ChainMap::from_flat(power.complex.clone(), power.complex.clone(), &pimgs)?);
    }
    Ok(CubeColimit {
        complex: q.complex,
        to_power,
        action,
        power_action,
    })
}
