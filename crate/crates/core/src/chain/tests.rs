use std::sync::Arc;

use super::*;
use crate::exactlin::{Field, Matrix};

const Q: Field = Field::Q;

fn arc(c: ChainComplex) -> Arc<ChainComplex> {
    Arc::new(c)
}

/// `k → k` identity from degree 1 to degree 0.
fn interval() -> ChainComplex {
    ChainComplex::new(Q, 0, vec![1, 1], vec![Matrix::zeros(Q, 0, 1), Matrix::identity(Q, 1)]).unwrap()
}

#[test]
fn rejects_non_complex() {
    let d1 = Matrix::from_ints(Q, &[&[1]]);
    let d2 = Matrix::from_ints(Q, &[&[1]]);
    let err = ChainComplex::new(Q, 0, vec![1, 1, 1], vec![Matrix::zeros(Q, 0, 1), d1, d2]).unwrap_err();
    assert_eq!(err, ChainError::NotComplex(2));
}

#[test]
fn tensor_examples() {
    let unit = ChainComplex::point(Q, 0);
    let c = interval();
    let t = tensor(&unit, &c).unwrap();
    assert_eq!(t, c);
    let one = ChainComplex::point(Q, 1);
    let t = tensor(&one, &one).unwrap();
    assert_eq!((t.d_min(), t.dim(2), t.total_dim()), (2, 1, 1));
    let cid = cone(&ChainMap::identity(arc(ChainComplex::point(Q, 0))));
    let t = tensor(&cid, &cid).unwrap();
    assert_eq!((t.dim(0), t.dim(1), t.dim(2)), (1, 2, 1));
    assert!(homology(&t).is_zero());
}

#[test]
fn homology_examples() {
    assert!(homology(&ChainComplex::zero(Q)).is_zero());
    assert_eq!(homology(&ChainComplex::point(Q, 3)), Betti::from_pairs(&[(3, 1)]));
    assert!(homology(&interval()).is_zero());
}

#[test]
fn cone_and_shift_examples() {
    let c = arc(ChainComplex::point(Q, 0));
    assert!(homology(&cone(&ChainMap::identity(c.clone()))).is_zero());
    let d = arc(ChainComplex::point(Q, 4));
    let z = ChainMap::zero(c.clone(), d.clone());
    let expected = homology(&direct_sum(&d, &shift(&c, 1)).unwrap());
    assert_eq!(homology(&cone(&z)), expected);
    let s = shift(&ChainComplex::point(Q, 0), 2);
    assert_eq!((s.d_min(), s.dim(2)), (2, 1));
    let s = shift(&interval(), 1);
    assert_eq!(s.diff(2).get(0, 0), Q.int(-1));
}

#[test]
fn quasi_iso_examples() {
    let c = arc(ChainComplex::point(Q, 0));
    assert!(is_quasi_iso(&ChainMap::identity(c.clone())));
    assert!(!is_quasi_iso(&ChainMap::zero(c.clone(), c.clone())));
    let acyclic = cone(&ChainMap::identity(c.clone()));
    let sum = arc(direct_sum(&acyclic, &c).unwrap());
    // Projection onto the second summand: the last basis vector in degree 0.
    let images: Vec<_> = (0..sum.total_dim())
        .map(|i| if i == 1 { vec![(0, Q.one())] } else { vec![] })
        .collect();
    let p = ChainMap::from_flat(sum, c, &images).unwrap();
    assert!(is_quasi_iso(&p));
}

#[test]
fn null_homotopy_examples() {
    let c = arc(interval());
    let z = ChainMap::zero(c.clone(), c.clone());
    let h = find_null_homotopy(&z).unwrap();
    assert!(h.components().iter().all(Matrix::is_zero));
    let h = find_null_homotopy(&ChainMap::identity(c.clone())).unwrap();
    h.check().unwrap();
    let p = arc(ChainComplex::point(Q, 0));
    assert!(find_null_homotopy(&ChainMap::identity(p)).is_none());
}

#[test]
fn fiber_examples() {
    let c = arc(interval());
    let fib = homotopy_fiber(&ChainMap::identity(c.clone()));
    assert!(homology(&fib.complex).is_zero());
    fib.nullhomotopy.check().unwrap();
    fib.projection.check().unwrap();
    fib.boundary.check().unwrap();

    let a = arc(ChainComplex::point(Q, 2));
    let b = arc(ChainComplex::point(Q, 5));
    let fib = homotopy_fiber(&ChainMap::zero(a.clone(), b.clone()));
    let expected = homology(&direct_sum(&a, &shift(&b, -1)).unwrap());
    assert_eq!(homology(&fib.complex), expected);

    // Surjection k^2 → k in degree 0 with kernel spanned by e0 - e1.
    let s = arc(ChainComplex::concentrated(Q, 0, 2));
    let t = arc(ChainComplex::point(Q, 0));
    let f = ChainMap::from_flat(s.clone(), t, &[vec![(0, Q.one())], vec![(0, Q.one())]]).unwrap();
    let fib = homotopy_fiber(&f);
    let k = arc(ChainComplex::point(Q, 0));
    let kx = fib.s_at.clone();
    let incl = ChainMap::from_flat(k, fib.complex.clone(), &[vec![(kx[0], Q.one()), (kx[1], Q.int(-1))]]).unwrap();
    assert!(is_quasi_iso(&incl));
}

#[test]
fn lift_into_fiber_commutes() {
    let s = arc(interval());
    let t = arc(ChainComplex::zero(Q));
    let f = ChainMap::zero(s.clone(), t);
    let fib = homotopy_fiber(&f);
    let g = ChainMap::identity(s.clone());
    let k = find_null_homotopy(&f.compose(&g)).unwrap();
    let lift = lift_to_fiber(&fib, &g, &k);
    assert_eq!(fib.projection.compose(&lift), g);
}

fn inj(src: usize, tgt: usize, deg: i32) -> ChainMap {
    let s = arc(ChainComplex::concentrated(Q, deg, src));
    let t = arc(ChainComplex::concentrated(Q, deg, tgt));
    let imgs: Vec<_> = (0..src).map(|i| vec![(i, Q.one())]).collect();
    ChainMap::from_flat(s, t, &imgs).unwrap()
}

#[test]
fn pushout_corner_examples() {
    let f = inj(1, 2, 1);
    let id = ChainMap::identity(arc(ChainComplex::concentrated(Q, 0, 2)));
    let m = pushout_corner_map(&tensor_square(&id, &f).unwrap()).unwrap();
    assert!(m.is_bijective());
    let m = pushout_corner_map(&tensor_square(&f, &id).unwrap()).unwrap();
    assert!(m.is_bijective());
    let m = pushout_corner_map(&tensor_square(&inj(1, 3, 0), &inj(2, 3, 1)).unwrap()).unwrap();
    assert!(m.is_injective());
    // Pushout dimension: |N⊗A| + |M⊗B| - |M⊗A| = 3·2 + 1·3 - 1·2.
    assert_eq!(m.source.total_dim(), 7);
}

#[test]
fn punctured_cube_examples() {
    let f = inj(1, 3, 1);
    let c = punctured_cube_colimit(&f, 1).unwrap();
    assert_eq!(c.complex.total_dim(), 1);
    assert!(c.to_power.is_injective());
    let c = punctured_cube_colimit(&f, 2).unwrap();
    assert!(c.to_power.is_injective());
    // Cokernel of Q → Y⊗Y is (Y/X)⊗(Y/X): 9 - 5 = 4.
    assert_eq!(c.complex.total_dim(), 5);
    for (a, b) in c.action.iter().zip(&c.power_action) {
        assert_eq!(c.to_power.compose(a), b.compose(&c.to_power));
    }
    let zero = ChainMap::zero(arc(ChainComplex::zero(Q)), arc(ChainComplex::point(Q, 0)));
    let c = punctured_cube_colimit(&zero, 3).unwrap();
    assert!(c.complex.is_zero());
}

#[test]
fn connecting_map_of_a_cone() {
    let a = arc(ChainComplex::point(Q, 0));
    let b = arc(ChainComplex::from_flat(Q, &[0, 1], &[vec![], vec![(0, Q.one())]]).unwrap());
    let c = arc(ChainComplex::point(Q, 1));
    let f = ChainMap::from_flat(a, b.clone(), &[vec![(0, Q.one())]]).unwrap();
    let g = ChainMap::from_flat(b, c, &[vec![], vec![(0, Q.one())]]).unwrap();
    assert_eq!(connecting_rank(&f, &g, 1), Some(1));
    let les = long_exact_sequence(&f, &g, -1, 2).unwrap();
    assert!(les_is_exact(&les));
    let mut broken = les.clone();
    broken[2].rank_delta = 0;
    assert!(!les_is_exact(&broken));
    assert!(is_quasi_iso_through(&ChainMap::identity(arc(ChainComplex::point(Q, 3))), 5));
    assert!(!is_quasi_iso_through(&f, 0));
}

#[test]
fn factoring_up_to_homotopy() {
    // B: u in degree 0, w -> u and a cycle z in degree 1.
    let b = arc(ChainComplex::from_flat(Q, &[0, 1, 1], &[vec![], vec![(0, Q.one())], vec![]]).unwrap());
    let c = arc(ChainComplex::point(Q, 1));
    let e = ChainMap::from_flat(c.clone(), b.clone(), &[vec![(2, Q.one())]]).unwrap();
    let g = ChainMap::from_flat(c.clone(), b.clone(), &[vec![(2, Q.int(3))]]).unwrap();
    let (l, h) = factor_up_to_homotopy(&e, &g).unwrap();
    assert!(l.is_chain_map());
    assert_eq!(l.flat_images(), vec![vec![(0, Q.int(3))]]);
    assert!(h.check().is_ok());
    let zero = ChainMap::zero(c, b);
    assert!(factor_up_to_homotopy(&zero, &g).is_none());
}

#[test]
fn random_injections_and_their_corner_maps() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for k in 0..20 {
        let quasi = k % 2 == 0;
        let f1 = random_injection(&mut rng, Field::Q, quasi);
        let f2 = random_injection(&mut rng, Field::Q, false);
        assert!(f1.is_injective() && f2.is_injective());
        assert_eq!(is_quasi_iso(&f1), quasi);
        let corner = pushout_corner_map(&tensor_square(&f1, &f2).unwrap()).unwrap();
        assert!(corner.is_injective());
        if quasi {
            assert!(is_quasi_iso(&corner));
        }
    }
}
