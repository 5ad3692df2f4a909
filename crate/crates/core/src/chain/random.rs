//! Random small complexes built from points and disks, and injective maps
//! out of them.

use std::sync::Arc;

use rand::Rng;

use super::{ChainComplex, ChainMap};
use crate::exactlin::{Field, Lin};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Cell {
    Point,
    /// `x → y` with `x` in this degree.
    DiskTop(usize),
    DiskBottom(usize),
}

struct Elementary {
    complex: Arc<ChainComplex>,
    /// `(degree, cell)` of each flat basis element.
    cells: Vec<(i32, Cell)>,
}

fn elementary(field: Field, points: &[i32], disks: &[i32]) -> Elementary {
    let mut cells: Vec<(i32, Cell, usize)> = Vec::new();
    for (k, d) in points.iter().enumerate() {
        cells.push((*d, Cell::Point, k));
    }
    for (k, d) in disks.iter().enumerate() {
        cells.push((*d, Cell::DiskTop(k), 0));
        cells.push((d - 1, Cell::DiskBottom(k), 0));
    }
    cells.sort();
    let bottom_at = |k: usize| cells.iter().position(|c| c.1 == Cell::DiskBottom(k)).unwrap();
    let boundary: Vec<Lin<usize>> = cells
        .iter()
        .map(|c| match c.1 {
            Cell::DiskTop(k) => vec![(bottom_at(k), field.one())],
            _ => Vec::new(),
        })
        .collect();
    let degrees: Vec<i32> = cells.iter().map(|c| c.0).collect();
    Elementary {
        complex: Arc::new(ChainComplex::from_flat(field, &degrees, &boundary).expect("elementary complex")),
        cells: cells.into_iter().map(|c| (c.0, c.1)).collect(),
    }
}

fn degrees<R: Rng + ?Sized>(rng: &mut R, n: usize, lo: i32, hi: i32) -> Vec<i32> {
    (0..n).map(|_| rng.gen_range(lo..=hi)).collect()
}

fn coefficient<R: Rng + ?Sized>(rng: &mut R, field: Field) -> crate::exactlin::Scalar {
    field.int(rng.gen_range(-2..=2))
}

/// An injective chain map `C → C ⊕ E` of small random complexes,
/// `c ↦ (c, g c)`. With `quasi` the complement `E` is acyclic.
pub fn random_injection<R: Rng + ?Sized>(rng: &mut R, field: Field, quasi: bool) -> ChainMap {
    let n_points = rng.gen_range(1..=3);
    let n_disks = rng.gen_range(0..=2);
    let c_points = degrees(rng, n_points, 0, 2);
    let c_disks = degrees(rng, n_disks, 1, 2);
    let (e_points, e_disks) = if quasi {
        let n = rng.gen_range(0..=2);
        (Vec::new(), degrees(rng, n, 1, 3))
    } else {
        let (p, d) = (rng.gen_range(1..=2), rng.gen_range(0..=1));
        (degrees(rng, p, 0, 2), degrees(rng, d, 1, 2))
    };
    let c = elementary(field, &c_points, &c_disks);
    let points: Vec<i32> = c_points.iter().chain(&e_points).copied().collect();
    let disks: Vec<i32> = c_disks.iter().chain(&e_disks).copied().collect();
    let d = elementary(field, &points, &disks);
    // cells of C keep their labels in D; E's are shifted past them
    let (np, nd) = (c_points.len(), c_disks.len());
    let find = |cell: Cell| d.cells.iter().position(|x| x.1 == cell).unwrap();
    let mut point_rank = vec![0usize; c.cells.len()];
    let mut seen = 0;
    for (k, cell) in c.cells.iter().enumerate() {
        if cell.1 == Cell::Point {
            point_rank[k] = seen;
            seen += 1;
        }
    }
    // positions of C's points in D, in the order C lists them
    let c_point_cells: Vec<usize> = {
        let mut v: Vec<(i32, usize)> = c_points.iter().enumerate().map(|(k, deg)| (*deg, k)).collect();
        v.sort();
        v.into_iter().map(|(_, k)| k).collect()
    };
    let d_point_of = |k: usize| {
        // the k-th point of `points` sits among D's points sorted by (degree, index)
        let mut v: Vec<(i32, usize)> = points.iter().enumerate().map(|(j, deg)| (*deg, j)).collect();
        v.sort();
        let pos = v.iter().position(|x| x.1 == k).unwrap();
        d.cells.iter().enumerate().filter(|x| x.1 .1 == Cell::Point).nth(pos).unwrap().0
    };
    let images: Vec<Lin<usize>> = c
        .cells
        .iter()
        .enumerate()
        .map(|(k, (deg, cell))| {
            let mut img: Lin<usize> = Vec::new();
            match cell {
                Cell::Point => {
                    let idx = c_point_cells[point_rank[k]];
                    img.push((d_point_of(idx), field.one()));
                    if quasi {
                        for (j, e) in e_disks.iter().enumerate() {
                            if e - 1 == *deg {
                                img.push((find(Cell::DiskBottom(nd + j)), coefficient(rng, field)));
                            }
                        }
                    } else {
                        for (j, e) in e_points.iter().enumerate() {
                            if e == deg {
                                img.push((d_point_of(np + j), coefficient(rng, field)));
                            }
                        }
                    }
                }
                Cell::DiskTop(j) => img.push((find(Cell::DiskTop(*j)), field.one())),
                Cell::DiskBottom(j) => img.push((find(Cell::DiskBottom(*j)), field.one())),
            }
            img.retain(|t| !t.1.is_zero());
            img.sort_by_key(|t| t.0);
            img
        })
        .collect();
    ChainMap::from_flat(c.complex, d.complex, &images).expect("random injection is a chain map")
}
