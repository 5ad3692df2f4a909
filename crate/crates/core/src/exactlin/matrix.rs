//! Sparse row-major matrices.

use super::sparse::{axpy, normalize, Lin};
use super::{Field, Scalar};

/// Sparse matrix. Each row is sorted by column and holds no zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    field: Field,
    nrows: usize,
    ncols: usize,
    rows: Vec<Lin<usize>>,
}

impl Matrix {
    pub fn zeros(field: Field, nrows: usize, ncols: usize) -> Self {
        Matrix {
            field,
            nrows,
            ncols,
            rows: vec![Vec::new(); nrows],
        }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let rows = (0..n).map(|i| vec![(i, field.one())]).collect();
        Matrix {
            field,
            nrows: n,
            ncols: n,
            rows,
        }
    }

    /// Builds from `(row, col, value)` triples; duplicates are summed.
    pub fn from_triplets(
        field: Field,
        nrows: usize,
        ncols: usize,
        entries: impl IntoIterator<Item = (usize, usize, Scalar)>,
    ) -> Self {
        let mut rows: Vec<Lin<usize>> = vec![Vec::new(); nrows];
        for (r, c, v) in entries {
            assert!(r < nrows && c < ncols, "entry ({r},{c}) outside {nrows}x{ncols}");
            rows[r].push((c, v));
        }
        for row in &mut rows {
            normalize(row);
        }
        Matrix {
            field,
            nrows,
            ncols,
            rows,
        }
    }

    /// Builds from rows that are already normalized.
    pub fn from_rows(field: Field, ncols: usize, rows: Vec<Lin<usize>>) -> Self {
        debug_assert!(rows.iter().all(|r| r.iter().all(|(c, v)| *c < ncols && !v.is_zero())));
        Matrix {
            field,
            nrows: rows.len(),
            ncols,
            rows,
        }
    }

    /// Builds from column images (column `j` is the image of basis vector `j`).
    pub fn from_columns(field: Field, nrows: usize, cols: &[Lin<usize>]) -> Self {
        let mut rows: Vec<Lin<usize>> = vec![Vec::new(); nrows];
        for (j, col) in cols.iter().enumerate() {
            for (i, v) in col {
                assert!(*i < nrows, "column entry {i} outside {nrows} rows");
                rows[*i].push((j, v.clone()));
            }
        }
        Matrix {
            field,
            nrows,
            ncols: cols.len(),
            rows,
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, i: usize) -> &[(usize, Scalar)] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Lin<usize>] {
        &self.rows
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(Vec::is_empty)
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        match self.rows[i].binary_search_by(|t| t.0.cmp(&j)) {
            Ok(k) => self.rows[i][k].1.clone(),
            Err(_) => self.field.zero(),
        }
    }

    /// All entries as `(row, col, value)` in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().map(move |(j, v)| (i, *j, v)))
    }

    pub fn transpose(&self) -> Matrix {
        let mut rows: Vec<Lin<usize>> = vec![Vec::new(); self.ncols];
        for (i, r) in self.rows.iter().enumerate() {
            for (j, v) in r {
                rows[*j].push((i, v.clone()));
            }
        }
        Matrix {
            field: self.field,
            nrows: self.ncols,
            ncols: self.nrows,
            rows,
        }
    }

    /// Columns as sparse vectors.
    pub fn columns(&self) -> Vec<Lin<usize>> {
        self.transpose().rows
    }

    /// `self * rhs`.
    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.ncols, rhs.nrows, "dimension mismatch in product");
        assert_eq!(self.field, rhs.field, "field mismatch");
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut acc: Lin<usize> = Vec::new();
                for (k, a) in r {
                    acc = axpy(&acc, a, &rhs.rows[*k]);
                }
                acc
            })
            .collect();
        Matrix {
            field: self.field,
            nrows: self.nrows,
            ncols: rhs.ncols,
            rows,
        }
    }

    /// `self * x` for a sparse column vector.
    pub fn apply(&self, x: &[(usize, Scalar)]) -> Lin<usize> {
        let mut dense: Vec<Option<&Scalar>> = vec![None; self.ncols];
        for (j, v) in x {
            dense[*j] = Some(v);
        }
        let mut out = Vec::new();
        for (i, r) in self.rows.iter().enumerate() {
            let mut s = self.field.zero();
            for (j, a) in r {
                if let Some(v) = dense[*j] {
                    s = &s + &(a * v);
                }
            }
            if !s.is_zero() {
                out.push((i, s));
            }
        }
        out
    }

    pub fn add(&self, rhs: &Matrix) -> Matrix {
        self.axpy(&self.field.one(), rhs)
    }

    pub fn sub(&self, rhs: &Matrix) -> Matrix {
        self.axpy(&self.field.int(-1), rhs)
    }

    /// `self + c * rhs`.
    pub fn axpy(&self, c: &Scalar, rhs: &Matrix) -> Matrix {
        assert_eq!((self.nrows, self.ncols), (rhs.nrows, rhs.ncols), "shape mismatch");
        let rows = self
            .rows
            .iter()
            .zip(&rhs.rows)
            .map(|(a, b)| axpy(a, c, b))
            .collect();
        Matrix {
            field: self.field,
            nrows: self.nrows,
            ncols: self.ncols,
            rows,
        }
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        Matrix::zeros(self.field, self.nrows, self.ncols).axpy(c, self)
    }

    pub fn neg(&self) -> Matrix {
        self.scale(&self.field.int(-1))
    }

    /// `[self | rhs]`.
    pub fn hstack(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.nrows, rhs.nrows);
        let rows = self
            .rows
            .iter()
            .zip(&rhs.rows)
            .map(|(a, b)| {
                let mut r = a.clone();
                r.extend(b.iter().map(|(j, v)| (j + self.ncols, v.clone())));
                r
            })
            .collect();
        Matrix {
            field: self.field,
            nrows: self.nrows,
            ncols: self.ncols + rhs.ncols,
            rows,
        }
    }

    /// `[self ; rhs]`.
    pub fn vstack(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.ncols, rhs.ncols);
        let mut rows = self.rows.clone();
        rows.extend(rhs.rows.iter().cloned());
        Matrix {
            field: self.field,
            nrows: self.nrows + rhs.nrows,
            ncols: self.ncols,
            rows,
        }
    }

    /// Block matrix `[[a, b], [c, d]]`.
    pub fn blocks(a: &Matrix, b: &Matrix, c: &Matrix, d: &Matrix) -> Matrix {
        a.hstack(b).vstack(&c.hstack(d))
    }

    /// Rows `r0..r1`, columns `c0..c1`.
    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Matrix {
        let rows = self.rows[r0..r1]
            .iter()
            .map(|r| {
                r.iter()
                    .filter(|(j, _)| *j >= c0 && *j < c1)
                    .map(|(j, v)| (j - c0, v.clone()))
                    .collect()
            })
            .collect();
        Matrix {
            field: self.field,
            nrows: r1 - r0,
            ncols: c1 - c0,
            rows,
        }
    }

    /// Dense copy, for tests and small displays.
    pub fn to_dense(&self) -> Vec<Vec<Scalar>> {
        let mut out = vec![vec![self.field.zero(); self.ncols]; self.nrows];
        for (i, j, v) in self.entries() {
            out[i][j] = v.clone();
        }
        out
    }

    /// Builds from a dense integer table.
    pub fn from_ints(field: Field, rows: &[&[i64]]) -> Matrix {
        let ncols = rows.first().map_or(0, |r| r.len());
        Matrix::from_triplets(
            field,
            rows.len(),
            ncols,
            rows.iter()
                .enumerate()
                .flat_map(|(i, r)| r.iter().enumerate().map(move |(j, v)| (i, j, field.int(*v)))),
        )
    }
}
