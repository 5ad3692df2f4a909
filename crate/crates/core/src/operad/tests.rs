use std::collections::HashMap;
use std::sync::Arc;

use super::*;
use crate::chain::{homology, is_quasi_iso, Betti, ChainComplex};
use crate::exactlin::Field;
use crate::symseq::ExtNat;

const Q: Field = Field::Q;

fn arc(o: Operad) -> Arc<Operad> {
    Arc::new(o)
}

fn dims(o: &Operad, upto: usize) -> Vec<u64> {
    (0..=upto).map(|r| o.seq().dim(r)).collect()
}

fn graded_v(degrees: &[i32]) -> ChainComplex {
    ChainComplex::from_flat(Q, degrees, &vec![Vec::new(); degrees.len()]).unwrap()
}

#[test]
fn builtin_dimensions() {
    assert_eq!(dims(&Operad::builtin("unit", Q, None).unwrap(), 3), vec![0, 1, 0, 0]);
    assert_eq!(dims(&Operad::builtin("com", Q, None).unwrap(), 4), vec![0, 1, 1, 1, 1]);
    assert_eq!(dims(&Operad::builtin("ass", Q, None).unwrap(), 3), vec![0, 1, 2, 6]);
    assert_eq!(dims(&Operad::builtin("com_truncated", Q, Some(3)).unwrap(), 4), vec![0, 1, 1, 0, 0]);
    assert_eq!(dims(&Operad::builtin("ass_truncated", Q, Some(4)).unwrap(), 4), vec![0, 1, 2, 6, 0]);
    assert!(matches!(Operad::builtin("lie", Q, None), Err(OperadError::Unknown(_))));
    assert!(Operad::builtin("com_truncated", Q, None).is_err());
}

#[test]
fn builtins_satisfy_the_axioms() {
    assert!(validate_operad(&arc(Operad::unit(Q)), 4).is_empty());
    assert!(validate_operad(&arc(Operad::com(Q)), 6).is_empty());
    assert!(validate_operad(&arc(Operad::ass(Q)), 4).is_empty());
    assert!(validate_operad(&arc(Operad::com_truncated(Q, 3).unwrap()), 5).is_empty());
    assert!(validate_operad(&arc(Operad::ass_truncated(Q, 3).unwrap()), 4).is_empty());
    let f5 = Field::prime(5).unwrap();
    assert!(validate_operad(&arc(Operad::ass(f5)), 4).is_empty());
}

#[test]
fn tables_reproduce_direct_composition() {
    let ass = Operad::ass(Q);
    let table = ass.to_table(4);
    for r in 1..=4 {
        for x in ass.seq().basis(r) {
            for ys in inner_tuples(ass.seq(), r, 4, false) {
                assert_eq!(table.gamma(x, &ys), ass.gamma(x, &ys), "{x} {ys:?}");
            }
        }
    }
    assert!(validate_operad(&arc(table), 4).is_empty());
}

#[test]
fn a_flipped_sign_is_located() {
    let com = Operad::com(Q);
    let key: GammaKey = (0, vec![(2, 0), (1, 0)]);
    let bad = arc(com.with_entry(5, key.clone(), vec![(0, Q.int(-1))]));
    let found = validate_operad(&bad, 5);
    assert!(!found.is_empty());
    assert!(found.iter().all(|v| v.keys.contains(&key)), "{found:?}");
    assert!(found.iter().any(|v| v.axiom.contains("associativity")));
}

#[test]
fn bimodules_satisfy_the_axioms() {
    let com = arc(Operad::com(Q));
    let ass = arc(Operad::ass(Q));
    assert!(validate_bimodule(&Bimodule::of_operad(&ass), 4).is_empty());
    for (i, m) in [(1, ExtNat::Fin(2)), (2, ExtNat::Inf), (1, ExtNat::Fin(4)), (3, ExtNat::Fin(5))] {
        let t = Bimodule::truncation(&com, i, m).unwrap();
        assert!(validate_bimodule(&t, 5).is_empty(), "{}", t.name());
    }
    assert!(validate_bimodule(&Bimodule::truncation(&ass, 2, ExtNat::Fin(4)).unwrap(), 4).is_empty());
}

#[test]
fn free_commutative_algebras() {
    let com = arc(Operad::com(Q));
    let even = free_algebra(&com, &graded_v(&[2]), 10).unwrap();
    let b = homology(even.complex());
    assert_eq!(b, Betti::from_pairs(&[(2, 1), (4, 1), (6, 1), (8, 1), (10, 1)]));
    let odd = free_algebra(&com, &graded_v(&[1]), 8).unwrap();
    assert_eq!(homology(odd.complex()), Betti::from_pairs(&[(1, 1)]));
    let unit = arc(Operad::unit(Q));
    let v = graded_v(&[1, 2, 2, 5]);
    assert_eq!(homology(free_algebra(&unit, &v, 10).unwrap().complex()), homology(&v));
    assert!(free_algebra(&com, &graded_v(&[0]), 4).is_err());
}

#[test]
fn free_algebras_satisfy_the_axioms() {
    let com = arc(Operad::com(Q));
    assert!(validate_algebra(&free_algebra(&com, &graded_v(&[2]), 8).unwrap(), 4).is_empty());
    let ass = arc(Operad::ass(Q));
    assert!(validate_algebra(&free_algebra(&ass, &graded_v(&[1, 2]), 5).unwrap(), 3).is_empty());
    let t3 = arc(Operad::com_truncated(Q, 3).unwrap());
    assert!(validate_algebra(&free_algebra(&t3, &graded_v(&[1, 1, 2]), 6).unwrap(), 3).is_empty());
}

#[test]
fn trivial_algebras_satisfy_the_axioms() {
    let t3 = arc(Operad::com_truncated(Q, 3).unwrap());
    assert_eq!(trivial_algebra(&t3, &ChainComplex::zero(Q)).unwrap().dim(), 0);
    let c = ChainComplex::from_flat(Q, &[1, 2, 2], &[vec![], vec![(0, Q.one())], vec![]]).unwrap();
    assert!(validate_algebra(&trivial_algebra(&t3, &c).unwrap(), 3).is_empty());
}

#[test]
fn a_bad_action_table_is_reported() {
    let com = arc(Operad::com(Q));
    let c = graded_v(&[1, 2, 4]);
    let mut entries: ActionTable = HashMap::new();
    entries.insert((0, vec![1, 1]), vec![(2, Q.one())]);
    let good = table_algebra("square", &com, &c, entries.clone()).unwrap();
    assert!(validate_algebra(&good, 3).is_empty());
    entries.insert((0, vec![0, 0]), vec![(1, Q.one())]);
    let bad = table_algebra("odd square", &com, &c, entries).unwrap();
    let found = validate_algebra(&bad, 3);
    assert!(found.iter().any(|v| v.axiom.contains("equivariance")), "{found:?}");
}

#[test]
fn a_perturbed_associative_table_is_rejected() {
    let ass = Operad::ass(Q);
    let key: GammaKey = (1, vec![(2, 0), (1, 0)]);
    let v = ass.gamma(key.0, &key.1);
    let wrong = vec![((v[0].0 + 1) % 6, Q.one())];
    let found = validate_operad(&arc(ass.with_entry(4, key.clone(), wrong)), 4);
    assert!(!found.is_empty());
    assert!(found.iter().all(|v| v.keys.contains(&key)));
}

#[test]
fn unit_laws_for_relative_composition() {
    let com = arc(Operad::com(Q));
    let ass = arc(Operad::ass(Q));
    for o in [com, ass] {
        let ob = Bimodule::of_operad(&o);
        let n = Bimodule::truncation(&o, 1, ExtNat::Fin(4)).unwrap();
        for f in left_unit_comparison(&ob, &n, 3).unwrap() {
            assert!(f.is_bijective());
        }
        for f in right_unit_comparison(&n, &ob, 3).unwrap() {
            assert!(f.is_bijective());
        }
        let seq = relative_compose(&ob, &n, 3).unwrap();
        for s in 0..=3 {
            assert_eq!(seq.dim(s), n.seq().dim(s));
        }
    }
}

#[test]
fn indecomposables_of_a_free_algebra() {
    let t3 = arc(Operad::com_truncated(Q, 3).unwrap());
    let v = graded_v(&[1, 2, 2, 3]);
    let free = free_algebra(&t3, &v, 8).unwrap();
    let m = Bimodule::arity_one(&t3).unwrap();
    let rel = relative_compose_algebra(&m, &free, 8, 8).unwrap();
    let decomposable = (0..free.dim() as u32).filter(|i| free.base().arity(*i) >= 2).count();
    assert_eq!(rel.complex().total_dim(), free.dim() - decomposable);
    assert_eq!(homology(rel.complex()), homology(&v));
}

#[test]
fn free_extensions_are_algebra_maps() {
    let com = arc(Operad::com(Q));
    let free = free_algebra(&com, &graded_v(&[2]), 8).unwrap();
    let target = free_algebra(&com, &graded_v(&[2, 2]), 8).unwrap();
    let gens = target.generator_ids().unwrap();
    let g = vec![vec![(gens[0], Q.one()), (gens[1], Q.int(2))]];
    let f = free_extension(&free, &target, &g).unwrap();
    assert!(validate_algebra_map(&f, 3).is_empty());
    assert_eq!(f.apply(&vec![(free.generator_ids().unwrap()[0], Q.one())]), g[0]);
    let cm = f.chain_map().unwrap();
    assert!(cm.is_injective());
    assert!(!is_quasi_iso(&cm));
}

#[test]
fn relative_composition_rejects_mismatched_operads() {
    let com = arc(Operad::com(Q));
    let ass = arc(Operad::ass(Q));
    let r = relative_compose(&Bimodule::of_operad(&com), &Bimodule::of_operad(&ass), 2);
    assert!(matches!(r, Err(OperadError::Mismatch(_))));
}
