use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{cone, ChainComplex, ChainError, ChainMap};
use crate::exactlin::{kernel_basis, rank, solve, Echelon};
use crate::par;

/// Betti numbers; only nonzero degrees are stored.
#[derive(Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Betti(pub BTreeMap<i32, usize>);

impl Betti {
    pub fn get(&self, d: i32) -> usize {
        self.0.get(&d).copied().unwrap_or(0)
    }

    pub fn from_pairs(pairs: &[(i32, usize)]) -> Self {
        Betti(pairs.iter().filter(|p| p.1 > 0).cloned().collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Entries in degrees `<= d`.
    pub fn through(&self, d: i32) -> Betti {
        Betti(self.0.range(..=d).map(|(k, v)| (*k, *v)).collect())
    }

    /// Entries in degrees `lo..=hi`.
    pub fn window(&self, lo: i32, hi: i32) -> Betti {
        if lo > hi {
            return Betti::default();
        }
        Betti(self.0.range(lo..=hi).map(|(k, v)| (*k, *v)).collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, usize)> + '_ {
        self.0.iter().map(|(k, v)| (*k, *v))
    }
}

impl fmt::Debug for Betti {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.0.iter()).finish()
    }
}

/// `Betti(d) = dim ker d_d - rank d_{d+1}`.
pub fn homology(c: &ChainComplex) -> Betti {
    let degs: Vec<i32> = c.degrees().collect();
    let ranks = par::map(&degs, |d| rank(&c.diff(*d)));
    let mut out = BTreeMap::new();
    for (k, d) in degs.iter().enumerate() {
        let below = ranks[k];
        let above = ranks.get(k + 1).copied().unwrap_or(0);
        let b = c.dim(*d) - below - above;
        if b > 0 {
            out.insert(*d, b);
        }
    }
    Betti(out)
}

/// Rank of the map induced on homology in degree `d`.
pub fn homology_rank(f: &ChainMap, d: i32) -> usize {
    let (s, t) = (&f.source, &f.target);
    let z = kernel_basis(&s.diff(d));
    let fz = f.comp(d).mul(&z);
    let mut e = Echelon::new(t.field(), t.dim(d));
    for col in t.diff(d + 1).columns() {
        e.insert(col);
    }
    let base = e.rank();
    for col in fz.columns() {
        e.insert(col);
    }
    e.rank() - base
}

/// Quasi-isomorphism test: the cone is acyclic.
pub fn is_quasi_iso(f: &ChainMap) -> bool {
    homology(&cone(f)).is_zero()
}

/// `f` induces isomorphisms on homology in every degree `<= d`.
pub fn is_quasi_iso_through(f: &ChainMap, d: i32) -> bool {
    let lo = f.source.d_min().min(f.target.d_min());
    (lo..=d).all(|k| {
        let r = homology_rank(f, k);
        r == homology_in(&f.source, k) && r == homology_in(&f.target, k)
    })
}

fn homology_in(c: &ChainComplex, d: i32) -> usize {
    c.dim(d) - rank(&c.diff(d)) - rank(&c.diff(d + 1))
}

/// Ranks around one degree of the long exact sequence of `A → B → C`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LesNode {
    pub degree: i32,
    pub h_a: usize,
    pub h_b: usize,
    pub h_c: usize,
    pub rank_f: usize,
    pub rank_g: usize,
    /// Rank of `δ: H_d(C) → H_{d-1}(A)`.
    pub rank_delta: usize,
}

/// Rank of the connecting map `H_d(C) → H_{d-1}(A)` of a short exact
/// sequence, built by lifting cycles through `g` and pulling the boundary
/// back through `f`. `None` if a lift fails to exist.
pub fn connecting_rank(f: &ChainMap, g: &ChainMap, d: i32) -> Option<usize> {
    let (a, b, c) = (&f.source, &f.target, &g.target);
    let z = kernel_basis(&c.diff(d));
    let (gd, fd) = (g.comp(d), f.comp(d - 1));
    let db = b.diff(d);
    let mut e = Echelon::new(a.field(), a.dim(d - 1));
    for col in a.diff(d).columns() {
        e.insert(col);
    }
    let base = e.rank();
    for zc in z.columns() {
        let y = solve(&gd, &zc)?;
        let w = db.apply(&y);
        let x = solve(&fd, &w)?;
        e.insert(x);
    }
    Some(e.rank() - base)
}

/// Long exact sequence ranks for `A -f-> B -g-> C` in degrees `lo..=hi`.
/// Errors if `g ∘ f ≠ 0` or a connecting map cannot be formed.
pub fn long_exact_sequence(f: &ChainMap, g: &ChainMap, lo: i32, hi: i32) -> Result<Vec<LesNode>, ChainError> {
    if !g.compose(f).is_zero() {
        return Err(ChainError::Invalid("g ∘ f is not zero".into()));
    }
    (lo..=hi)
        .map(|d| {
            Ok(LesNode {
                degree: d,
                h_a: homology_in(&f.source, d),
                h_b: homology_in(&f.target, d),
                h_c: homology_in(&g.target, d),
                rank_f: homology_rank(f, d),
                rank_g: homology_rank(g, d),
                rank_delta: connecting_rank(f, g, d).ok_or_else(|| ChainError::Invalid(format!("no connecting map in degree {d}")))?,
            })
        })
        .collect()
}

/// Exactness at `H(A)`, `H(B)` and `H(C)` in each degree; the node at
/// `H_d(A)` is checked when `d + 1` is in range.
pub fn les_is_exact(nodes: &[LesNode]) -> bool {
    nodes.iter().enumerate().all(|(k, n)| {
        let at_b = n.rank_f + n.rank_g == n.h_b;
        let at_c = n.rank_g + n.rank_delta == n.h_c;
        let at_a = match nodes.get(k + 1) {
            Some(up) => up.rank_delta + n.rank_f == n.h_a,
            None => true,
        };
        at_a && at_b && at_c
    })
}
