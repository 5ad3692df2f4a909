use std::sync::Arc;

use super::{ChainComplex, ChainError};
use crate::exactlin::{Field, Lin, Matrix};

/// A degree-0 chain map. `comps` is indexed like the source's degrees;
/// the component at `d` has shape `target.dim(d) x source.dim(d)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap {
    pub source: Arc<ChainComplex>,
    pub target: Arc<ChainComplex>,
    comps: Vec<Matrix>,
}

impl ChainMap {
    /// Validating constructor.
    pub fn new(source: Arc<ChainComplex>, target: Arc<ChainComplex>, comps: Vec<Matrix>) -> Result<Self, ChainError> {
        let m = Self::new_unchecked(source, target, comps)?;
        m.check()?;
        Ok(m)
    }

    /// Shape-checked but not verified to commute with differentials.
    pub fn new_unchecked(source: Arc<ChainComplex>, target: Arc<ChainComplex>, comps: Vec<Matrix>) -> Result<Self, ChainError> {
        if source.field() != target.field() {
            return Err(ChainError::FieldMismatch(source.field(), target.field()));
        }
        let n = source.degrees().count();
        if comps.len() != n {
            return Err(ChainError::Invalid(format!("expected {n} components, got {}", comps.len())));
        }
        for (d, m) in source.degrees().zip(&comps) {
            if m.nrows() != target.dim(d) || m.ncols() != source.dim(d) {
                return Err(ChainError::Shape {
                    degree: d,
                    detail: format!(
                        "component {}x{} but expected {}x{}",
                        m.nrows(),
                        m.ncols(),
                        target.dim(d),
                        source.dim(d)
                    ),
                });
            }
        }
        Ok(ChainMap { source, target, comps })
    }

    /// Builds from images of flat source basis elements, given in flat
    /// target coordinates. Terms must preserve degree.
    pub fn from_flat(source: Arc<ChainComplex>, target: Arc<ChainComplex>, images: &[Lin<usize>]) -> Result<Self, ChainError> {
        let m = Self::from_flat_unchecked(source, target, images)?;
        m.check()?;
        Ok(m)
    }

    pub fn from_flat_unchecked(source: Arc<ChainComplex>, target: Arc<ChainComplex>, images: &[Lin<usize>]) -> Result<Self, ChainError> {
        assert_eq!(images.len(), source.total_dim());
        let field = source.field();
        let mut comps = Vec::new();
        for d in source.degrees() {
            let (s0, t0, tdim) = (source.offset(d), target.offset(d), target.dim(d));
            let mut cols = Vec::with_capacity(source.dim(d));
            for img in &images[s0..s0 + source.dim(d)] {
                let mut col = Vec::with_capacity(img.len());
                for (j, v) in img {
                    if *j < t0 || *j >= t0 + tdim {
                        return Err(ChainError::Shape {
                            degree: d,
                            detail: "image term in the wrong degree".into(),
                        });
                    }
                    col.push((j - t0, v.clone()));
                }
                cols.push(col);
            }
            comps.push(Matrix::from_columns(field, tdim, &cols));
        }
        Self::new_unchecked(source, target, comps)
    }

    pub fn identity(c: Arc<ChainComplex>) -> Self {
        let comps = c.degrees().map(|d| Matrix::identity(c.field(), c.dim(d))).collect();
        ChainMap {
            source: c.clone(),
            target: c,
            comps,
        }
    }

    pub fn zero(source: Arc<ChainComplex>, target: Arc<ChainComplex>) -> Self {
        let comps = source
            .degrees()
            .map(|d| Matrix::zeros(source.field(), target.dim(d), source.dim(d)))
            .collect();
        ChainMap { source, target, comps }
    }

    pub fn field(&self) -> Field {
        self.source.field()
    }

    /// Component at degree `d` (zero outside the source range).
    pub fn comp(&self, d: i32) -> Matrix {
        let k = d - self.source.d_min();
        if k >= 0 && (k as usize) < self.comps.len() {
            self.comps[k as usize].clone()
        } else {
            Matrix::zeros(self.field(), self.target.dim(d), self.source.dim(d))
        }
    }

    pub fn comp_ref(&self, d: i32) -> Option<&Matrix> {
        let k = d - self.source.d_min();
        (k >= 0 && (k as usize) < self.comps.len()).then(|| &self.comps[k as usize])
    }

    /// Verifies `d f = f d` in every degree.
    pub fn check(&self) -> Result<(), ChainError> {
        for d in self.source.degrees() {
            let lhs = self.target.diff(d).mul(&self.comp(d));
            let rhs = self.comp(d - 1).mul(&self.source.diff(d));
            if lhs != rhs {
                return Err(ChainError::NotChainMap(d));
            }
        }
        Ok(())
    }

    pub fn is_chain_map(&self) -> bool {
        self.check().is_ok()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &ChainMap) -> ChainMap {
        assert!(*self.source == *other.target, "composition of non-composable maps");
        let comps = other
            .source
            .degrees()
            .map(|d| self.comp(d).mul(&other.comp(d)))
            .collect();
        ChainMap {
            source: other.source.clone(),
            target: self.target.clone(),
            comps,
        }
    }

    pub fn add(&self, other: &ChainMap) -> ChainMap {
        self.combine(other, &self.field().one())
    }

    pub fn sub(&self, other: &ChainMap) -> ChainMap {
        self.combine(other, &self.field().int(-1))
    }

    fn combine(&self, other: &ChainMap, c: &crate::exactlin::Scalar) -> ChainMap {
        assert!(*self.source == *other.source && *self.target == *other.target);
        let comps = self.comps.iter().zip(&other.comps).map(|(a, b)| a.axpy(c, b)).collect();
        ChainMap {
            source: self.source.clone(),
            target: self.target.clone(),
            comps,
        }
    }

    pub fn neg(&self) -> ChainMap {
        ChainMap {
            source: self.source.clone(),
            target: self.target.clone(),
            comps: self.comps.iter().map(Matrix::neg).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Matrix::is_zero)
    }

    /// Images of flat source basis elements in flat target coordinates.
    pub fn flat_images(&self) -> Vec<Lin<usize>> {
        let mut out = vec![Vec::new(); self.source.total_dim()];
        for d in self.source.degrees() {
            let (s0, t0) = (self.source.offset(d), self.target.offset(d));
            for (i, j, v) in self.comp(d).entries() {
                out[s0 + j].push((t0 + i, v.clone()));
            }
        }
        for o in &mut out {
            o.sort_by_key(|t| t.0);
        }
        out
    }

    /// Degreewise injective.
    pub fn is_injective(&self) -> bool {
        self.source
            .degrees()
            .all(|d| crate::exactlin::rank(&self.comp(d)) == self.source.dim(d))
    }

    /// Degreewise surjective.
    pub fn is_surjective(&self) -> bool {
        self.target
            .degrees()
            .all(|d| crate::exactlin::rank(&self.comp(d)) == self.target.dim(d))
    }

    pub fn is_bijective(&self) -> bool {
        self.source.degrees().chain(self.target.degrees()).all(|d| {
            self.source.dim(d) == self.target.dim(d) && crate::exactlin::rank(&self.comp(d)) == self.source.dim(d)
        })
    }
}

/// A chain homotopy `H` with `dH + Hd = f - g`. The component at source
/// degree `d` maps into target degree `d + 1`.
#[derive(Clone, Debug)]
pub struct ChainHomotopy {
    pub f: ChainMap,
    pub g: ChainMap,
    comps: Vec<Matrix>,
}

impl ChainHomotopy {
    pub fn new(f: ChainMap, g: ChainMap, comps: Vec<Matrix>) -> Result<Self, ChainError> {
        let h = ChainHomotopy { f, g, comps };
        h.check()?;
        Ok(h)
    }

    pub(crate) fn new_unchecked(f: ChainMap, g: ChainMap, comps: Vec<Matrix>) -> Self {
        ChainHomotopy { f, g, comps }
    }

    /// Component at source degree `d`, shaped `target.dim(d+1) x source.dim(d)`.
    pub fn comp(&self, d: i32) -> Matrix {
        let s = &self.f.source;
        let k = d - s.d_min();
        if k >= 0 && (k as usize) < self.comps.len() {
            self.comps[k as usize].clone()
        } else {
            Matrix::zeros(s.field(), self.f.target.dim(d + 1), s.dim(d))
        }
    }

    pub fn check(&self) -> Result<(), ChainError> {
        let (s, t) = (&self.f.source, &self.f.target);
        if self.comps.len() != s.degrees().count() {
            return Err(ChainError::Invalid("homotopy component count".into()));
        }
        for d in s.degrees() {
            let h = self.comp(d);
            if h.nrows() != t.dim(d + 1) || h.ncols() != s.dim(d) {
                return Err(ChainError::Shape {
                    degree: d,
                    detail: "homotopy component shape".into(),
                });
            }
            let lhs = t.diff(d + 1).mul(&h).add(&self.comp(d - 1).mul(&s.diff(d)));
            let rhs = self.f.comp(d).sub(&self.g.comp(d));
            if lhs != rhs {
                return Err(ChainError::NotHomotopy(d));
            }
        }
        Ok(())
    }

    pub fn components(&self) -> &[Matrix] {
        &self.comps
    }
}
