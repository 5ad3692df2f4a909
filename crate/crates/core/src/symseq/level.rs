//! Single levels of a symmetric sequence: representations of `Σ_r` and
//! their coinvariant quotients modulo Young subgroups.

use std::sync::Arc;

use super::perm;
use super::SymSeqError;
use crate::chain::{ChainComplex, ChainMap};
use crate::exactlin::{cokernel_of_span, Acc, Field, Lin, Matrix};

/// A chain complex with an action of `Σ_n` given on the adjacent
/// transpositions `(1 2), …, (n-1 n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymRep {
    pub arity: usize,
    pub complex: Arc<ChainComplex>,
    pub generators: Vec<ChainMap>,
    gen_images: Vec<Vec<Lin<usize>>>,
    degrees: Vec<i32>,
    boundary: Vec<Lin<usize>>,
}

impl SymRep {
    /// Validating constructor: generators must be chain maps satisfying the
    /// Coxeter relations.
    pub fn new(arity: usize, complex: Arc<ChainComplex>, generators: Vec<ChainMap>) -> Result<Self, SymSeqError> {
        let rep = Self::new_unchecked(arity, complex, generators)?;
        rep.check()?;
        Ok(rep)
    }

    pub(crate) fn new_unchecked(arity: usize, complex: Arc<ChainComplex>, generators: Vec<ChainMap>) -> Result<Self, SymSeqError> {
        if generators.len() != arity.saturating_sub(1) {
            return Err(SymSeqError::Invalid(format!(
                "arity {arity} needs {} generators, got {}",
                arity.saturating_sub(1),
                generators.len()
            )));
        }
        for g in &generators {
            if *g.source != *complex || *g.target != *complex {
                return Err(SymSeqError::Invalid("generator is not an endomorphism".into()));
            }
        }
        let gen_images = generators.iter().map(ChainMap::flat_images).collect();
        let degrees = complex.flat_degrees();
        let boundary = complex.flat_boundaries();
        Ok(SymRep {
            arity,
            complex,
            generators,
            gen_images,
            degrees,
            boundary,
        })
    }

    /// Builds from flat generator images.
    pub fn from_flat(arity: usize, complex: Arc<ChainComplex>, gens: &[Vec<Lin<usize>>]) -> Result<Self, SymSeqError> {
        let generators = gens
            .iter()
            .map(|g| ChainMap::from_flat_unchecked(complex.clone(), complex.clone(), g))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(arity, complex, generators)
    }

    /// The trivial representation `k` in degree 0.
    pub fn trivial(field: Field, arity: usize) -> Self {
        let c = Arc::new(ChainComplex::point(field, 0));
        let gens = (1..arity).map(|_| ChainMap::identity(c.clone())).collect();
        Self::new_unchecked(arity, c, gens).unwrap()
    }

    /// The left regular representation `k[Σ_n]` in degree 0, basis by Lehmer rank.
    pub fn regular(field: Field, arity: usize) -> Self {
        let n = perm::factorial(arity) as usize;
        let c = Arc::new(ChainComplex::concentrated(field, 0, n));
        let gens = (0..arity.saturating_sub(1))
            .map(|i| {
                let imgs: Vec<Lin<usize>> = (0..n as u64)
                    .map(|b| vec![(regular_swap(arity, i, b) as usize, field.one())])
                    .collect();
                ChainMap::from_flat_unchecked(c.clone(), c.clone(), &imgs).unwrap()
            })
            .collect();
        Self::new_unchecked(arity, c, gens).unwrap()
    }

    pub fn field(&self) -> Field {
        self.complex.field()
    }

    pub fn dim(&self) -> usize {
        self.complex.total_dim()
    }

    pub fn degree(&self, b: usize) -> i32 {
        self.degrees[b]
    }

    pub fn boundary(&self, b: usize) -> &Lin<usize> {
        &self.boundary[b]
    }

    pub fn generator_image(&self, i: usize, b: usize) -> &Lin<usize> {
        &self.gen_images[i][b]
    }

    /// Chain-map, invertibility and Coxeter checks.
    pub fn check(&self) -> Result<(), SymSeqError> {
        let field = self.field();
        let n = self.dim();
        let mats: Vec<Matrix> = self
            .gen_images
            .iter()
            .map(|g| Matrix::from_columns(field, n, g))
            .collect();
        let id = Matrix::identity(field, n);
        for (i, g) in self.generators.iter().enumerate() {
            if g.check().is_err() {
                return Err(SymSeqError::Action(format!("generator {} does not commute with d", i + 1)));
            }
            if mats[i].mul(&mats[i]) != id {
                return Err(SymSeqError::Action(format!("generator {} is not an involution", i + 1)));
            }
        }
        for i in 0..mats.len() {
            for j in i + 1..mats.len() {
                let ok = if j == i + 1 {
                    let p = mats[i].mul(&mats[j]);
                    p.mul(&p).mul(&p) == id
                } else {
                    mats[i].mul(&mats[j]) == mats[j].mul(&mats[i])
                };
                if !ok {
                    return Err(SymSeqError::Action(format!("braid relation fails for generators {} and {}", i + 1, j + 1)));
                }
            }
        }
        Ok(())
    }
}

/// `s_i · e_τ = e_{s_i ∘ τ}` on Lehmer ranks.
pub(crate) fn regular_swap(arity: usize, i: usize, b: u64) -> u64 {
    let t = perm::unrank(arity, b);
    let t: Vec<usize> = t
        .into_iter()
        .map(|x| if x == i { i + 1 } else if x == i + 1 { i } else { x })
        .collect();
    perm::rank(&t)
}

/// Quotient of `X(r) ⊗ (sorted children)` by the stabilizer of the
/// children, where equal children of odd degree act with a sign.
/// `blocks` lists `(length, odd)` for each run of equal children.
#[derive(Clone, Debug)]
pub struct Quotient {
    /// Basis operations that survive, as representatives.
    pub reps: Vec<u64>,
    kind: QKind,
}

#[derive(Clone, Debug)]
enum QKind {
    Trivial,
    Regular { arity: usize, block_of: Vec<usize>, starts: Vec<usize>, odd: Vec<bool> },
    Dense { proj: Vec<Lin<u64>> },
}

impl Quotient {
    pub(crate) fn empty() -> Self {
        Quotient {
            reps: Vec::new(),
            kind: QKind::Trivial,
        }
    }

    pub(crate) fn trivial(field: Field, blocks: &[(usize, bool)]) -> Self {
        let killed = field.characteristic() != 2 && blocks.iter().any(|(len, odd)| *odd && *len >= 2);
        Quotient {
            reps: if killed { vec![] } else { vec![0] },
            kind: QKind::Trivial,
        }
    }

    pub(crate) fn regular(blocks: &[(usize, bool)]) -> Self {
        let arity: usize = blocks.iter().map(|b| b.0).sum();
        let mut block_of = Vec::with_capacity(arity);
        let mut starts = Vec::with_capacity(blocks.len());
        for (k, (len, _)) in blocks.iter().enumerate() {
            starts.push(block_of.len());
            block_of.extend(std::iter::repeat(k).take(*len));
        }
        let odd = blocks.iter().map(|b| b.1).collect();
        let mut q = Quotient {
            reps: Vec::new(),
            kind: QKind::Regular {
                arity,
                block_of,
                starts,
                odd,
            },
        };
        // Every word in the block letters gives one orbit.
        let mut counts: Vec<usize> = blocks.iter().map(|b| b.0).collect();
        let mut word = Vec::with_capacity(arity);
        let mut reps = Vec::new();
        words(&mut counts, &mut word, arity, &mut |w| reps.push(q.canonical_of_word(w)));
        reps.sort_unstable();
        q.reps = reps;
        q
    }

    pub(crate) fn dense(rep: &SymRep, blocks: &[(usize, bool)]) -> Self {
        let field = rep.field();
        let n = rep.dim();
        let mut gens = Vec::new();
        let mut pos = 0;
        for (len, odd) in blocks {
            for i in pos..pos + len.saturating_sub(1) {
                let chi = field.sign(*odd);
                for b in 0..n {
                    let mut acc = Acc::new();
                    acc.push(b, field.one());
                    acc.add_scaled(&-&chi, rep.generator_image(i, b));
                    let v = acc.finish();
                    if !v.is_empty() {
                        gens.push(v);
                    }
                }
            }
            pos += len;
        }
        let ck = cokernel_of_span(field, n, gens);
        let cols = ck.projection.columns();
        let proj = cols
            .into_iter()
            .map(|c| c.into_iter().map(|(k, x)| (ck.basis[k] as u64, x)).collect())
            .collect();
        Quotient {
            reps: ck.basis.iter().map(|b| *b as u64).collect(),
            kind: QKind::Dense { proj },
        }
    }

    fn canonical_of_word(&self, w: &[usize]) -> u64 {
        let QKind::Regular { starts, .. } = &self.kind else {
            unreachable!()
        };
        let mut next = starts.clone();
        let tau: Vec<usize> = w
            .iter()
            .map(|b| {
                next[*b] += 1;
                next[*b] - 1
            })
            .collect();
        perm::rank(&tau)
    }

    /// Class of basis operation `op` as a combination of representatives.
    pub fn project(&self, field: Field, op: u64) -> Lin<u64> {
        match &self.kind {
            QKind::Trivial => {
                if self.reps.is_empty() {
                    vec![]
                } else {
                    vec![(0, field.one())]
                }
            }
            QKind::Regular {
                arity,
                block_of,
                odd,
                ..
            } => {
                let tau = perm::unrank(*arity, op);
                let w: Vec<usize> = tau.iter().map(|x| block_of[*x]).collect();
                let mut sign = false;
                for (b, is_odd) in odd.iter().enumerate() {
                    if *is_odd {
                        let seq: Vec<usize> = tau.iter().copied().filter(|x| block_of[*x] == b).collect();
                        sign ^= perm::is_odd(&seq);
                    }
                }
                vec![(self.canonical_of_word(&w), field.sign(sign))]
            }
            QKind::Dense { proj } => proj[op as usize].clone(),
        }
    }
}

fn words(counts: &mut [usize], word: &mut Vec<usize>, len: usize, emit: &mut dyn FnMut(&[usize])) {
    if word.len() == len {
        emit(word);
        return;
    }
    for b in 0..counts.len() {
        if counts[b] > 0 {
            counts[b] -= 1;
            word.push(b);
            words(counts, word, len, emit);
            word.pop();
            counts[b] += 1;
        }
    }
}

/// Coinvariants of a representation with the canonical projection.
pub fn coinvariants(rep: &SymRep) -> (Arc<ChainComplex>, ChainMap) {
    let field = rep.field();
    let n = rep.dim();
    let mut gens = Vec::new();
    for i in 0..rep.arity.saturating_sub(1) {
        for b in 0..n {
            let mut acc = Acc::new();
            acc.push(b, field.one());
            acc.add_scaled(&field.int(-1), rep.generator_image(i, b));
            gens.push(acc.finish());
        }
    }
    let q = crate::chain::quotient_by_span(&rep.complex, gens);
    (q.complex, q.projection)
}
