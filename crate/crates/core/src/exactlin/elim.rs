//! Gaussian elimination: incremental echelon forms, rank, kernels,
//! linear systems and cokernels.

use std::collections::HashMap;

use super::sparse::{axpy, scale, Lin};
use super::{Field, Matrix, Scalar};

/// Row echelon form built one vector at a time. The pivot of a stored
/// row is its leading column and the row is scaled so that entry is 1.
#[derive(Clone, Debug)]
pub struct Echelon {
    field: Field,
    ncols: usize,
    rows: Vec<Lin<usize>>,
    pivot_row: HashMap<usize, usize>,
}

impl Echelon {
    pub fn new(field: Field, ncols: usize) -> Self {
        Echelon {
            field,
            ncols,
            rows: Vec::new(),
            pivot_row: HashMap::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Eliminates leading entries of `v` until its leading column carries no pivot.
    pub fn reduce(&self, mut v: Lin<usize>) -> Lin<usize> {
        while let Some((c, x)) = v.first() {
            match self.pivot_row.get(c) {
                Some(&r) => {
                    let neg = -x;
                    v = axpy(&v, &neg, &self.rows[r]);
                }
                None => break,
            }
        }
        v
    }

    /// Whether `v` lies in the span of the inserted vectors.
    pub fn contains(&self, v: Lin<usize>) -> bool {
        self.reduce(v).is_empty()
    }

    /// Inserts `v`; returns its new pivot column when independent.
    pub fn insert(&mut self, v: Lin<usize>) -> Option<usize> {
        let v = self.reduce(v);
        let (c, lead) = v.first()?.clone();
        let v = if lead.is_one() { v } else { scale(&lead.inv(), &v) };
        self.pivot_row.insert(c, self.rows.len());
        self.rows.push(v);
        Some(c)
    }

    /// Back-substitutes into reduced row echelon form.
    pub fn into_rref(self) -> Rref {
        let mut order: Vec<(usize, Lin<usize>)> = self
            .rows
            .into_iter()
            .map(|r| (r[0].0, r))
            .collect();
        order.sort_by(|a, b| b.0.cmp(&a.0));
        let mut done: HashMap<usize, Lin<usize>> = HashMap::new();
        let mut out = Vec::with_capacity(order.len());
        for (p, mut row) in order {
            // Subtracting a finished row only introduces free columns, so
            // the coefficients collected here stay current.
            let targets: Vec<(usize, Scalar)> = row[1..]
                .iter()
                .filter(|(c, _)| done.contains_key(c))
                .cloned()
                .collect();
            for (c, x) in targets {
                row = axpy(&row, &-&x, &done[&c]);
            }
            done.insert(p, row.clone());
            out.push((p, row));
        }
        out.reverse();
        Rref {
            field: self.field,
            ncols: self.ncols,
            pivots: out,
        }
    }
}

/// Reduced row echelon form: rows sorted by pivot column, each pivot
/// column zero in every other row.
#[derive(Clone, Debug)]
pub struct Rref {
    pub field: Field,
    pub ncols: usize,
    pub pivots: Vec<(usize, Lin<usize>)>,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivot_columns(&self) -> Vec<usize> {
        self.pivots.iter().map(|p| p.0).collect()
    }

    pub fn free_columns(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.ncols];
        for (p, _) in &self.pivots {
            is_pivot[*p] = true;
        }
        (0..self.ncols).filter(|c| !is_pivot[*c]).collect()
    }
}

fn echelon_of_rows(m: &Matrix, order: impl Iterator<Item = usize>) -> Echelon {
    let mut e = Echelon::new(m.field(), m.ncols());
    for i in order {
        e.insert(m.row(i).to_vec());
    }
    e
}

/// Rank over the matrix's field. Rows are processed sparsest first.
pub fn rank(m: &Matrix) -> usize {
    let a = if m.nrows() > m.ncols() {
        m.transpose()
    } else {
        m.clone()
    };
    let mut order: Vec<usize> = (0..a.nrows()).collect();
    order.sort_by_key(|&i| (a.row(i).len(), i));
    echelon_of_rows(&a, order.into_iter()).rank()
}

/// Rank computed with reversed column priority and reversed row order;
/// an independent elimination path used for cross-checking.
pub fn rank_reversed(m: &Matrix) -> usize {
    let n = m.ncols();
    let flipped = Matrix::from_triplets(
        m.field(),
        m.nrows(),
        n,
        m.entries().map(|(i, j, v)| (i, n - 1 - j, v.clone())),
    );
    echelon_of_rows(&flipped, (0..m.nrows()).rev()).rank()
}

/// RREF of the row space of `m`.
pub fn rref(m: &Matrix) -> Rref {
    echelon_of_rows(m, 0..m.nrows()).into_rref()
}

/// Columns form a basis of the kernel of `m`.
pub fn kernel_basis(m: &Matrix) -> Matrix {
    let r = rref(m);
    let free = r.free_columns();
    let mut index = vec![usize::MAX; m.ncols()];
    for (k, f) in free.iter().enumerate() {
        index[*f] = k;
    }
    let mut cols: Vec<Lin<usize>> = free.iter().map(|f| vec![(*f, m.field().one())]).collect();
    for (p, row) in &r.pivots {
        for (c, x) in &row[1..] {
            cols[index[*c]].push((*p, -x));
        }
    }
    for c in &mut cols {
        c.sort_by_key(|t| t.0);
    }
    Matrix::from_columns(m.field(), m.ncols(), &cols)
}

/// Some `x` with `m x = b`, or `None` when the system is inconsistent.
pub fn solve(m: &Matrix, b: &[(usize, Scalar)]) -> Option<Lin<usize>> {
    assert!(b.iter().all(|(i, _)| *i < m.nrows()), "right-hand side outside row range");
    let n = m.ncols();
    let mut rhs: Vec<Option<Scalar>> = vec![None; m.nrows()];
    for (i, v) in b {
        rhs[*i] = Some(v.clone());
    }
    let mut e = Echelon::new(m.field(), n + 1);
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by_key(|&i| (m.row(i).len(), i));
    for i in order {
        let mut row = m.row(i).to_vec();
        if let Some(v) = rhs[i].take() {
            row.push((n, v));
        }
        if e.insert(row) == Some(n) {
            return None;
        }
    }
    let r = e.into_rref();
    let mut x = Vec::new();
    for (p, row) in &r.pivots {
        if let Some(v) = super::sparse::coeff(row, &n) {
            x.push((*p, v.clone()));
        }
    }
    x.sort_by_key(|t| t.0);
    Some(x)
}

/// Cokernel of `m` (target space modulo the column span).
#[derive(Clone, Debug)]
pub struct Cokernel {
    /// Target coordinates kept as the quotient basis, in increasing order.
    pub basis: Vec<usize>,
    /// Projection, `basis.len()` x `nrows(m)`.
    pub projection: Matrix,
}

/// Quotient of `k^rows` by the span of the columns of `m`.
/// Inverse of a square matrix, or `None` when singular.
pub fn inverse(m: &Matrix) -> Option<Matrix> {
    let n = m.nrows();
    if m.ncols() != n {
        return None;
    }
    let one = m.field().one();
    let mut e = Echelon::new(m.field(), 2 * n);
    for i in 0..n {
        let mut row = m.row(i).to_vec();
        row.push((n + i, one.clone()));
        e.insert(row);
    }
    let r = e.into_rref();
    if r.rank() != n || r.pivots.last().is_some_and(|p| p.0 >= n) {
        return None;
    }
    let rows = r
        .pivots
        .into_iter()
        .map(|(_, row)| row.into_iter().filter(|(c, _)| *c >= n).map(|(c, x)| (c - n, x)).collect())
        .collect();
    Some(Matrix::from_rows(m.field(), n, rows))
}

pub fn cokernel(m: &Matrix) -> Cokernel {
    cokernel_of_span(m.field(), m.nrows(), m.columns())
}

/// Quotient of `k^n` by the span of the given vectors.
pub fn cokernel_of_span(field: Field, n: usize, gens: Vec<Lin<usize>>) -> Cokernel {
    let mut e = Echelon::new(field, n);
    for g in gens {
        e.insert(g);
    }
    let r = e.into_rref();
    let basis = r.free_columns();
    let mut index = vec![usize::MAX; n];
    for (k, f) in basis.iter().enumerate() {
        index[*f] = k;
    }
    let mut cols: Vec<Lin<usize>> = vec![Vec::new(); n];
    for f in &basis {
        cols[*f] = vec![(index[*f], field.one())];
    }
    for (p, row) in &r.pivots {
        cols[*p] = row[1..].iter().map(|(c, x)| (index[*c], -x)).collect();
    }
    let projection = Matrix::from_columns(field, basis.len(), &cols);
    Cokernel { basis, projection }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documented_ranks() {
        let q = Field::Q;
        assert_eq!(rank(&Matrix::zeros(q, 0, 0)), 0);
        assert_eq!(rank(&Matrix::identity(q, 3)), 3);
        assert_eq!(rank(&Matrix::from_ints(q, &[&[1, 2], &[2, 4]])), 1);
    }

    #[test]
    fn documented_kernels() {
        let q = Field::Q;
        assert_eq!(kernel_basis(&Matrix::identity(q, 3)).ncols(), 0);
        let k = kernel_basis(&Matrix::zeros(q, 2, 3));
        assert_eq!(k.ncols(), 3);
        assert_eq!(rank(&k), 3);
        let f2 = Field::prime(2).unwrap();
        let a = Matrix::from_ints(f2, &[&[1, 1, 0]]);
        let k = kernel_basis(&a);
        assert_eq!(k.ncols(), 2);
        assert!(a.mul(&k).is_zero());
        // The F_2 kernel has exactly 4 elements: enumerate all 8 vectors.
        let count = (0..8u32)
            .filter(|bits| (bits & 1) ^ ((bits >> 1) & 1) == 0)
            .count();
        assert_eq!(count, 1 << k.ncols());
    }

    #[test]
    fn documented_solves() {
        let q = Field::Q;
        let b = vec![(0, q.int(5)), (2, q.frac(-1, 3).unwrap())];
        assert_eq!(solve(&Matrix::identity(q, 3), &b), Some(b.clone()));
        let a = Matrix::from_ints(q, &[&[1, 2]]);
        let x = solve(&a, &[(0, q.int(3))]).unwrap();
        assert_eq!(a.apply(&x), vec![(0, q.int(3))]);
        let f2 = Field::prime(2).unwrap();
        assert_eq!(solve(&Matrix::from_ints(f2, &[&[2]]), &[(0, f2.one())]), None);
    }

    #[test]
    fn inverse_roundtrip() {
        let q = Field::Q;
        let m = Matrix::from_ints(q, &[&[2, 1], &[1, 1]]);
        let inv = inverse(&m).unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(q, 2));
        assert!(inverse(&Matrix::from_ints(q, &[&[1, 2], &[2, 4]])).is_none());
    }

    #[test]
    fn cokernel_projection_kills_image() {
        let q = Field::Q;
        let m = Matrix::from_ints(q, &[&[1, 0], &[1, 1], &[0, 1]]);
        let c = cokernel(&m);
        assert_eq!(c.basis.len(), 1);
        assert!(c.projection.mul(&m).is_zero());
    }
}
