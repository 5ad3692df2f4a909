use std::sync::Arc;

use super::{ChainComplex, ChainHomotopy, ChainMap, HomotopyFiber};
use crate::exactlin::{solve, Acc, Lin, Matrix};

/// Solves `dH + Hd = f` as a single sparse system over all degrees.
pub fn find_null_homotopy(f: &ChainMap) -> Option<ChainHomotopy> {
    let (s, t) = (&f.source, &f.target);
    let field = f.field();
    let degs: Vec<i32> = s.degrees().collect();
    // Unknown block for H_d : S_d → T_{d+1}, row-major within the block.
    let mut block = Vec::with_capacity(degs.len());
    let mut n = 0usize;
    for d in &degs {
        block.push(n);
        n += t.dim(d + 1) * s.dim(*d);
    }
    let unknown = |d: i32, a: usize, b: usize| -> Option<usize> {
        let k = d - s.d_min();
        if k < 0 || k as usize >= degs.len() {
            return None;
        }
        Some(block[k as usize] + a * s.dim(d) + b)
    };
    let mut rows: Vec<Lin<usize>> = Vec::new();
    let mut rhs: Lin<usize> = Vec::new();
    for d in &degs {
        let d = *d;
        let (td, sd) = (t.dim(d), s.dim(d));
        if td == 0 || sd == 0 {
            continue;
        }
        let dt = t.diff(d + 1);
        let ds_t = s.diff(d).transpose();
        let fd = f.comp(d);
        for u in 0..td {
            for v in 0..sd {
                let mut acc = Acc::new();
                for (a, x) in dt.row(u) {
                    acc.push(unknown(d, *a, v).unwrap(), x.clone());
                }
                for (b, x) in ds_t.row(v) {
                    if let Some(k) = unknown(d - 1, u, *b) {
                        acc.push(k, x.clone());
                    }
                }
                let val = fd.get(u, v);
                if !val.is_zero() {
                    rhs.push((rows.len(), val));
                }
                rows.push(acc.finish());
            }
        }
    }
    let sys = Matrix::from_rows(field, n, rows);
    let x = solve(&sys, &rhs)?;
    let mut dense = vec![None; n];
    for (k, v) in x {
        dense[k] = Some(v);
    }
    let comps = degs
        .iter()
        .enumerate()
        .map(|(k, d)| {
            let (r, c) = (t.dim(d + 1), s.dim(*d));
            let entries = (0..r * c).filter_map(|i| dense[block[k] + i].clone().map(|v| (i / c, i % c, v)));
            Matrix::from_triplets(field, r, c, entries)
        })
        .collect();
    let zero = ChainMap::zero(s.clone(), t.clone());
    let h = ChainHomotopy::new_unchecked(f.clone(), zero, comps);
    h.check().expect("solved homotopy must verify");
    Some(h)
}

/// Lifts `g : X → S` into the homotopy fiber of `f : S → T` using a null
/// homotopy `k` of `f ∘ g`: `x ↦ (-k x, g x)`.
pub fn lift_to_fiber(fib: &HomotopyFiber, g: &ChainMap, k: &ChainHomotopy) -> ChainMap {
    let x: &Arc<ChainComplex> = &g.source;
    let gi = g.flat_images();
    let mut images = vec![Vec::new(); x.total_dim()];
    for d in x.degrees() {
        let kd = k.comp(d);
        let tb = k.f.target.offset(d + 1);
        let xo = x.offset(d);
        for (row, col, v) in kd.entries() {
            images[xo + col].push((fib.t_at[tb + row], -v));
        }
    }
    for (i, img) in gi.iter().enumerate() {
        for (j, v) in img {
            images[i].push((fib.s_at[*j], v.clone()));
        }
    }
    for im in &mut images {
        let mut acc = Acc::new();
        for (j, v) in im.drain(..) {
            acc.push(j, v);
        }
        *im = acc.finish();
    }
    ChainMap::from_flat(x.clone(), fib.complex.clone(), &images).expect("fiber lift is a chain map")
}

/// Finds `l : X → A` and a homotopy `e ∘ l ≃ g` for `e : A → C` and
/// `g : X → C`, as one sparse system in the entries of `l` and `H`.
pub fn factor_up_to_homotopy(e: &ChainMap, g: &ChainMap) -> Option<(ChainMap, ChainHomotopy)> {
    let (a, c, x) = (&e.source, &e.target, &g.source);
    let field = e.field();
    let degs: Vec<i32> = x.degrees().collect();
    let mut l_at = Vec::with_capacity(degs.len());
    let mut h_at = Vec::with_capacity(degs.len());
    let mut n = 0usize;
    for d in &degs {
        l_at.push(n);
        n += a.dim(*d) * x.dim(*d);
        h_at.push(n);
        n += c.dim(d + 1) * x.dim(*d);
    }
    let slot = |d: i32| -> Option<usize> {
        let k = d - x.d_min();
        (k >= 0 && (k as usize) < degs.len()).then_some(k as usize)
    };
    let l_var = |d: i32, r: usize, col: usize| slot(d).map(|k| l_at[k] + r * x.dim(d) + col);
    let h_var = |d: i32, r: usize, col: usize| slot(d).map(|k| h_at[k] + r * x.dim(d) + col);
    let mut rows: Vec<Lin<usize>> = Vec::new();
    let mut rhs: Lin<usize> = Vec::new();
    for d in &degs {
        let d = *d;
        let xd = x.dim(d);
        if xd == 0 {
            continue;
        }
        let dx_t = x.diff(d).transpose();
        // d_A l_d - l_{d-1} d_X = 0
        let da = a.diff(d);
        for u in 0..a.dim(d - 1) {
            for v in 0..xd {
                let mut acc = Acc::new();
                for (k, s) in da.row(u) {
                    acc.push(l_var(d, *k, v).unwrap(), s.clone());
                }
                for (b, s) in dx_t.row(v) {
                    if let Some(k) = l_var(d - 1, u, *b) {
                        acc.push(k, -s);
                    }
                }
                rows.push(acc.finish());
            }
        }
        // e_d l_d - d_C H_d - H_{d-1} d_X = g_d
        let ed = e.comp(d);
        let dc = c.diff(d + 1);
        let gd = g.comp(d);
        for u in 0..c.dim(d) {
            for v in 0..xd {
                let mut acc = Acc::new();
                for (k, s) in ed.row(u) {
                    acc.push(l_var(d, *k, v).unwrap(), s.clone());
                }
                for (k, s) in dc.row(u) {
                    acc.push(h_var(d, *k, v).unwrap(), -s);
                }
                for (b, s) in dx_t.row(v) {
                    if let Some(k) = h_var(d - 1, u, *b) {
                        acc.push(k, -s);
                    }
                }
                let val = gd.get(u, v);
                if !val.is_zero() {
                    rhs.push((rows.len(), val));
                }
                rows.push(acc.finish());
            }
        }
    }
    let sys = Matrix::from_rows(field, n, rows);
    let sol = solve(&sys, &rhs)?;
    let mut dense = vec![None; n];
    for (k, v) in sol {
        dense[k] = Some(v);
    }
    let block = |start: usize, r: usize, cols: usize| {
        let entries = (0..r * cols).filter_map(|i| dense[start + i].clone().map(|v| (i / cols, i % cols, v)));
        Matrix::from_triplets(field, r, cols, entries)
    };
    let l_comps: Vec<Matrix> = degs.iter().enumerate().map(|(k, d)| block(l_at[k], a.dim(*d), x.dim(*d))).collect();
    let h_comps: Vec<Matrix> = degs.iter().enumerate().map(|(k, d)| block(h_at[k], c.dim(d + 1), x.dim(*d))).collect();
    let mut images = vec![Vec::new(); x.total_dim()];
    for (k, d) in degs.iter().enumerate() {
        for (r, col, v) in l_comps[k].entries() {
            images[x.offset(*d) + col].push((a.offset(*d) + r, v.clone()));
        }
    }
    for im in &mut images {
        im.sort_by_key(|t| t.0);
    }
    let l = ChainMap::from_flat(x.clone(), a.clone(), &images).ok()?;
    let h = ChainHomotopy::new(e.compose(&l), g.clone(), h_comps).ok()?;
    Some((l, h))
}
