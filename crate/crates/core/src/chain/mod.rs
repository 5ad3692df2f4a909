//! Bounded chain complexes over a field, chain maps, homotopies and the
//! standard constructions on them.

mod appendix;
mod homology;
mod homotopy;
mod map;
mod ops;
mod random;

pub use appendix::{pushout_corner_map, punctured_cube_colimit, tensor_square, CommSquare, CubeColimit};
pub use homology::{
    connecting_rank, homology, homology_rank, is_quasi_iso, is_quasi_iso_through, les_is_exact, long_exact_sequence, Betti, LesNode,
};
pub use homotopy::{factor_up_to_homotopy, find_null_homotopy, lift_to_fiber};
pub use map::{ChainHomotopy, ChainMap};
pub use random::random_injection;
pub use ops::{
    cokernel, cone, direct_sum, homotopy_fiber, inclusion_of_span, quotient_by_span, shift, tensor,
    tensor_many, tensor_swap, CokernelMap, HomotopyFiber, TensorProduct,
};

use std::borrow::Cow;
use std::fmt;

use thiserror::Error;

use crate::exactlin::{Field, Lin, Matrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChainError {
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(Field, Field),
    #[error("differential does not square to zero at degree {0}")]
    NotComplex(i32),
    #[error("matrix shape mismatch at degree {degree}: {detail}")]
    Shape { degree: i32, detail: String },
    #[error("map does not commute with differentials at degree {0}")]
    NotChainMap(i32),
    #[error("homotopy identity fails at degree {0}")]
    NotHomotopy(i32),
    #[error("square does not commute at degree {0}")]
    NonCommutingSquare(i32),
    #[error("invalid argument: {0}")]
    Invalid(String),
}

/// A bounded chain complex. Degrees `d_min .. d_min + dims.len()` may be
/// nonzero; `diffs[k]` maps degree `d_min + k` to the degree below.
#[derive(Clone, PartialEq, Eq)]
pub struct ChainComplex {
    field: Field,
    d_min: i32,
    dims: Vec<usize>,
    diffs: Vec<Matrix>,
    offsets: Vec<usize>,
}

impl fmt::Debug for ChainComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChainComplex")
            .field("field", &self.field)
            .field("d_min", &self.d_min)
            .field("dims", &self.dims)
            .finish()
    }
}

impl ChainComplex {
    /// Validating constructor: checks shapes and `d∘d = 0`.
    pub fn new(field: Field, d_min: i32, dims: Vec<usize>, diffs: Vec<Matrix>) -> Result<Self, ChainError> {
        if diffs.len() != dims.len() {
            return Err(ChainError::Invalid(format!(
                "{} degrees but {} differentials",
                dims.len(),
                diffs.len()
            )));
        }
        for (k, m) in diffs.iter().enumerate() {
            let below = if k == 0 { 0 } else { dims[k - 1] };
            if m.field() != field {
                return Err(ChainError::FieldMismatch(field, m.field()));
            }
            if m.nrows() != below || m.ncols() != dims[k] {
                return Err(ChainError::Shape {
                    degree: d_min + k as i32,
                    detail: format!("expected {}x{}, got {}x{}", below, dims[k], m.nrows(), m.ncols()),
                });
            }
        }
        for k in 1..diffs.len() {
            if !diffs[k - 1].mul(&diffs[k]).is_zero() {
                return Err(ChainError::NotComplex(d_min + k as i32));
            }
        }
        Ok(Self::new_unchecked(field, d_min, dims, diffs))
    }

    pub(crate) fn new_unchecked(field: Field, d_min: i32, dims: Vec<usize>, diffs: Vec<Matrix>) -> Self {
        let mut offsets = Vec::with_capacity(dims.len() + 1);
        let mut acc = 0;
        for d in &dims {
            offsets.push(acc);
            acc += d;
        }
        offsets.push(acc);
        ChainComplex {
            field,
            d_min,
            dims,
            diffs,
            offsets,
        }
    }

    /// The zero complex.
    pub fn zero(field: Field) -> Self {
        Self::new_unchecked(field, 0, Vec::new(), Vec::new())
    }

    /// `k^dim` concentrated in one degree.
    pub fn concentrated(field: Field, degree: i32, dim: usize) -> Self {
        Self::new_unchecked(field, degree, vec![dim], vec![Matrix::zeros(field, 0, dim)])
    }

    /// The field in one degree.
    pub fn point(field: Field, degree: i32) -> Self {
        Self::concentrated(field, degree, 1)
    }

    /// Builds from a flat basis with nondecreasing degrees; `boundary[i]`
    /// is the differential of basis element `i` in flat coordinates.
    pub fn from_flat(field: Field, degrees: &[i32], boundary: &[Lin<usize>]) -> Result<Self, ChainError> {
        Self::from_flat_impl(field, degrees, boundary, true)
    }

    pub(crate) fn from_flat_unchecked(field: Field, degrees: &[i32], boundary: &[Lin<usize>]) -> Self {
        Self::from_flat_impl(field, degrees, boundary, false).expect("unchecked construction")
    }

    fn from_flat_impl(field: Field, degrees: &[i32], boundary: &[Lin<usize>], check: bool) -> Result<Self, ChainError> {
        assert_eq!(degrees.len(), boundary.len());
        if degrees.is_empty() {
            return Ok(Self::zero(field));
        }
        if degrees.windows(2).any(|w| w[0] > w[1]) {
            return Err(ChainError::Invalid("basis degrees must be nondecreasing".into()));
        }
        let d_min = degrees[0];
        let d_max = *degrees.last().unwrap();
        let n = (d_max - d_min + 1) as usize;
        let mut dims = vec![0usize; n];
        for d in degrees {
            dims[(d - d_min) as usize] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for k in 0..n {
            offsets[k + 1] = offsets[k] + dims[k];
        }
        let mut cols: Vec<Vec<Lin<usize>>> = dims.iter().map(|d| Vec::with_capacity(*d)).collect();
        for (i, b) in boundary.iter().enumerate() {
            let k = (degrees[i] - d_min) as usize;
            let mut col = Vec::with_capacity(b.len());
            for (j, v) in b {
                if *j >= degrees.len() || degrees[*j] != degrees[i] - 1 {
                    return Err(ChainError::Shape {
                        degree: degrees[i],
                        detail: format!("boundary of basis {i} has a term outside the degree below"),
                    });
                }
                col.push((j - offsets[k - 1], v.clone()));
            }
            cols[k].push(col);
        }
        let diffs = cols
            .iter()
            .enumerate()
            .map(|(k, c)| Matrix::from_columns(field, if k == 0 { 0 } else { dims[k - 1] }, c))
            .collect();
        if check {
            Self::new(field, d_min, dims, diffs)
        } else {
            Ok(Self::new_unchecked(field, d_min, dims, diffs))
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// Lowest stored degree.
    pub fn d_min(&self) -> i32 {
        self.d_min
    }

    /// Highest stored degree (`d_min - 1` when empty).
    pub fn d_max(&self) -> i32 {
        self.d_min + self.dims.len() as i32 - 1
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i32> {
        self.d_min..=self.d_max()
    }

    fn slot(&self, d: i32) -> Option<usize> {
        let k = d - self.d_min;
        (k >= 0 && (k as usize) < self.dims.len()).then_some(k as usize)
    }

    pub fn dim(&self, d: i32) -> usize {
        self.slot(d).map_or(0, |k| self.dims[k])
    }

    /// Differential out of degree `d`, shaped `dim(d-1) x dim(d)`.
    pub fn diff(&self, d: i32) -> Cow<'_, Matrix> {
        match self.slot(d) {
            Some(k) if self.dim(d - 1) == self.diffs[k].nrows() => Cow::Borrowed(&self.diffs[k]),
            _ => Cow::Owned(Matrix::zeros(self.field, self.dim(d - 1), self.dim(d))),
        }
    }

    pub fn total_dim(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn is_zero(&self) -> bool {
        self.total_dim() == 0
    }

    /// Flat index of the first basis element in degree `d`.
    pub fn offset(&self, d: i32) -> usize {
        match self.slot(d) {
            Some(k) => self.offsets[k],
            None if d < self.d_min => 0,
            None => self.total_dim(),
        }
    }

    /// Degree of a flat basis index.
    pub fn degree_of(&self, flat: usize) -> i32 {
        let k = self.offsets.partition_point(|o| *o <= flat) - 1;
        self.d_min + k as i32
    }

    /// Degrees of all flat basis elements.
    pub fn flat_degrees(&self) -> Vec<i32> {
        self.degrees().flat_map(|d| std::iter::repeat(d).take(self.dim(d))).collect()
    }

    /// Boundaries of all flat basis elements in flat coordinates.
    pub fn flat_boundaries(&self) -> Vec<Lin<usize>> {
        let mut out = vec![Vec::new(); self.total_dim()];
        for d in self.degrees() {
            let m = self.diff(d);
            let (src, tgt) = (self.offset(d), self.offset(d - 1));
            for (i, j, v) in m.entries() {
                out[src + j].push((tgt + i, v.clone()));
            }
        }
        for b in &mut out {
            b.sort_by_key(|t| t.0);
        }
        out
    }

    /// Euler characteristic.
    pub fn euler(&self) -> i64 {
        self.degrees()
            .map(|d| if d.rem_euclid(2) == 0 { self.dim(d) as i64 } else { -(self.dim(d) as i64) })
            .sum()
    }
}

#[cfg(test)]
mod tests;
