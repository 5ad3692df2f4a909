use std::sync::Arc;

use super::*;
use crate::chain::{homology, tensor_many, tensor_swap, ChainComplex, ChainMap};
use crate::exactlin::Field;

const Q: Field = Field::Q;

fn trivial_upto(n: usize) -> SymSeq {
    let mut levels = vec![Level::Zero];
    levels.extend((1..=n).map(|_| Level::Trivial));
    SymSeq::new(Q, levels, Tail::Zero).unwrap()
}

fn com() -> SymSeq {
    SymSeq::new(Q, vec![Level::Zero], Tail::Trivial).unwrap()
}

fn ass() -> SymSeq {
    SymSeq::new(Q, vec![Level::Zero], Tail::Regular).unwrap()
}

/// Arity 2 carries a sign representation on a degree-1 class; arity 3 the
/// trivial one in degree 2.
fn graded() -> SymSeq {
    let c = Arc::new(ChainComplex::point(Q, 1));
    let sign = ChainMap::from_flat(c.clone(), c.clone(), &[vec![(0, Q.int(-1))]]).unwrap();
    let l2 = SymRep::new(2, c, vec![sign]).unwrap();
    let c3 = Arc::new(ChainComplex::point(Q, 2));
    let l3 = SymRep::new(3, c3.clone(), vec![ChainMap::identity(c3.clone()), ChainMap::identity(c3)]).unwrap();
    SymSeq::new(
        Q,
        vec![Level::Zero, Level::Trivial, Level::Dense(Arc::new(l2)), Level::Dense(Arc::new(l3))],
        Tail::Zero,
    )
    .unwrap()
}

fn dims(x: &SymSeq, upto: usize) -> Vec<u64> {
    (0..=upto).map(|r| x.dim(r)).collect()
}

#[test]
fn coinvariant_examples() {
    let (q, p) = coinvariants(&SymRep::trivial(Q, 3));
    assert_eq!(q.total_dim(), 1);
    assert!(p.is_bijective());
    let (q, _) = coinvariants(&SymRep::regular(Q, 2));
    assert_eq!(q.total_dim(), 1);
    // V ⊗ V for |v| = 1 with the Koszul symmetry: the swap acts by -1.
    let v = ChainComplex::point(Q, 1);
    let vv = Arc::new(tensor_many(&[&v, &v]).unwrap().complex.as_ref().clone());
    let swap = tensor_swap(&v, &v).unwrap();
    assert_eq!(swap.flat_images(), vec![vec![(0, Q.int(-1))]]);
    let twisted = ChainMap::from_flat(vv.clone(), vv.clone(), &swap.flat_images()).unwrap();
    let (q, _) = coinvariants(&SymRep::new(2, vv, vec![twisted]).unwrap());
    assert_eq!(q.total_dim(), 0);
}

#[test]
fn sym_rep_rejects_broken_braid() {
    let c = Arc::new(ChainComplex::concentrated(Q, 0, 2));
    let swap = ChainMap::from_flat(c.clone(), c.clone(), &[vec![(1, Q.one())], vec![(0, Q.one())]]).unwrap();
    let diag = ChainMap::from_flat(c.clone(), c.clone(), &[vec![(0, Q.one())], vec![(1, Q.int(-1))]]).unwrap();
    assert!(SymRep::new(3, c, vec![swap, diag]).is_err());
}

#[test]
fn compose_with_unit() {
    let y = graded();
    let u = SymSeq::unit(Q);
    let left = compose(&u, &y, 4).unwrap();
    let right = compose(&y, &u, 4).unwrap();
    assert_eq!(dims(&left.seq, 4), dims(&y, 4));
    assert_eq!(dims(&right.seq, 4), dims(&y, 4));
    for r in 1..=3 {
        assert_eq!(homology(&level_complex(&left.seq, r)), homology(&level_complex(&y, r)));
    }
}

#[test]
fn compose_counts_set_partitions() {
    let x = trivial_upto(3);
    let c = compose(&x, &x, 3).unwrap();
    assert_eq!(dims(&c.seq, 3), vec![0, 1, 2, 5]);
    // Summands of level 3: (1;3), (2;2,1), (3;1,1,1).
    let shapes: Vec<(usize, Vec<usize>, usize)> =
        c.witness.levels[3].iter().map(|m| (m.r, m.sizes.clone(), m.basis.len())).collect();
    assert_eq!(shapes, vec![(1, vec![3], 1), (2, vec![2, 1], 3), (3, vec![1, 1, 1], 1)]);
    for k in 0..c.witness.levels[3].len() {
        let i = c.witness.inclusion(&c, 3, k).unwrap();
        let p = c.witness.projection(&c, 3, k).unwrap();
        assert!(p.compose(&i).is_bijective());
    }
}

#[test]
fn compose_rejects_unreduced_and_capped() {
    let mut levels = vec![Level::Trivial];
    levels.push(Level::Trivial);
    let y = SymSeq::new(Q, levels, Tail::Zero).unwrap();
    assert_eq!(compose(&com(), &y, 2).unwrap_err(), SymSeqError::NotReduced);
    let capped = SymSeq::new(Q, vec![Level::Zero, Level::Trivial, Level::Trivial], Tail::Unknown).unwrap();
    assert!(matches!(compose(&capped, &com(), 4), Err(SymSeqError::ArityCap { .. })));
}

#[test]
fn composite_actions_are_representations() {
    // compose validates the Coxeter relations on every level it builds.
    let c = compose(&ass(), &graded(), 4).unwrap();
    assert!(c.seq.dim(4) > 0);
    let c = compose(&graded(), &ass(), 4).unwrap();
    assert!(c.seq.dim(4) > 0);
}

#[test]
fn compose_map_examples() {
    let x = graded();
    let y = com();
    let (_, _, id) = compose_map(&SeqMap::identity(&x), &SeqMap::identity(&y), 4).unwrap();
    for s in 0..=4 {
        let m = id.level_map(s).unwrap();
        assert_eq!(m, ChainMap::identity(m.source.clone()));
    }
    let (_, _, z) = compose_map(&SeqMap::identity(&x), &SeqMap::zero(&y, &y), 4).unwrap();
    for s in 1..=4 {
        assert!(z.level_map(s).unwrap().is_zero());
    }
    // An injection of trivial sequences into com.
    let small = trivial_upto(2);
    let inc = SeqMap::from_levels(&small, &com(), vec![vec![], vec![vec![(0, Q.one())]], vec![vec![(0, Q.one())]]]).unwrap();
    let (_, _, f) = compose_map(&inc, &SeqMap::identity(&com()), 4).unwrap();
    for s in 1..=4 {
        assert!(f.level_map(s).unwrap().is_injective());
    }
}

#[test]
fn non_equivariant_maps_rejected() {
    let a = ass();
    let flip = SeqMap::from_levels(&a, &a, vec![vec![], vec![vec![(0, Q.one())]], vec![vec![(0, Q.one())], vec![(0, Q.one())]]]).unwrap();
    assert!(flip.check(2).is_err());
    assert!(compose_map(&flip, &SeqMap::identity(&a), 2).is_err());
}

#[test]
fn truncation_examples() {
    let x = ass();
    assert_eq!(dims(&x.truncate(1, ExtNat::Inf).unwrap(), 4), dims(&x, 4));
    assert_eq!(dims(&x.truncate(2, ExtNat::Fin(3)).unwrap(), 4), vec![0, 0, 2, 0, 0]);
    assert!(x.truncate(3, ExtNat::Fin(3)).is_err());
    assert!(x.truncate(0, ExtNat::Fin(3)).is_err());
    let a = truncation_map(&x, (3, ExtNat::Inf), (2, ExtNat::Inf)).unwrap();
    let b = truncation_map(&x, (2, ExtNat::Inf), (1, ExtNat::Inf)).unwrap();
    let c = truncation_map(&x, (3, ExtNat::Inf), (1, ExtNat::Inf)).unwrap();
    for r in 0..=5 {
        assert_eq!(b.then_after(&a, 5).level_map(r).unwrap(), c.level_map(r).unwrap());
    }
}

#[test]
fn associator_is_an_equivariant_iso() {
    let cases = [(com(), graded(), ass()), (graded(), graded(), com()), (ass(), com(), graded())];
    for (x, y, z) in cases {
        let maps = associator(&x, &y, &z, 4).unwrap();
        let lhs = compose(&compose(&x, &y, 4).unwrap().seq, &z, 4).unwrap();
        let rhs = compose(&x, &compose(&y, &z, 4).unwrap().seq, 4).unwrap();
        for (k, m) in maps.iter().enumerate() {
            let s = k + 1;
            assert!(m.is_bijective(), "level {s}");
            assert!(m.is_chain_map());
            for i in 0..s - 1 {
                for b in 0..lhs.seq.dim(s) {
                    let e = vec![(b, Q.one())];
                    let via_l: Vec<(usize, _)> =
                        lhs.seq.swap(s, i, &e).into_iter().map(|(k, x)| (k as usize, x)).collect();
                    let mut lhs_img = crate::exactlin::Acc::new();
                    for (k, x) in via_l {
                        lhs_img.add_scaled(&x, &m.flat_images()[k]);
                    }
                    let img: Vec<(u64, _)> = m.flat_images()[b as usize].iter().map(|(k, x)| (*k as u64, x.clone())).collect();
                    let rhs_img: Vec<(usize, _)> = rhs.seq.swap(s, i, &img).into_iter().map(|(k, x)| (k as usize, x)).collect();
                    assert_eq!(lhs_img.finish(), rhs_img);
                }
            }
        }
    }
}

#[test]
fn compose_is_exact_in_the_left_variable() {
    // 0 → X' → X → X'' → 0 with X' = level 2 of com, X = com ≤ 3, X'' = levels 1 and 3.
    let x = trivial_upto(3);
    let x1 = x.truncate(2, ExtNat::Fin(3)).unwrap();
    let x2 = SymSeq::new(Q, vec![Level::Zero, Level::Trivial, Level::Zero, Level::Trivial], Tail::Zero).unwrap();
    let on = |keep: &[usize]| -> Vec<Vec<crate::exactlin::Lin<u64>>> {
        (0..=3).map(|k| if keep.contains(&k) { vec![vec![(0, Q.one())]] } else { vec![] }).collect()
    };
    let i = SeqMap::from_levels(&x1, &x, on(&[2])).unwrap();
    let p = SeqMap::from_levels(&x, &x2, on(&[1, 3])).unwrap();
    let y = graded();
    let (_, _, fi) = compose_map(&i, &SeqMap::identity(&y), 4).unwrap();
    let (_, _, fp) = compose_map(&p, &SeqMap::identity(&y), 4).unwrap();
    for s in 1..=4 {
        let (a, b) = (fi.level_map(s).unwrap(), fp.level_map(s).unwrap());
        assert!(a.is_injective());
        assert!(b.is_surjective());
        assert!(b.compose(&a).is_zero());
        assert_eq!(a.source.total_dim() + b.target.total_dim(), a.target.total_dim());
    }
}
