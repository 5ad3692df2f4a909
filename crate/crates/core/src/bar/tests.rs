use std::sync::Arc;

use super::*;
use crate::chain::{homology, is_quasi_iso, Betti, ChainComplex};
use crate::operad::{free_algebra, free_extension, trivial_algebra, validate_algebra, Operad};

const Q: Field = Field::Q;

fn arc(o: Operad) -> Arc<Operad> {
    Arc::new(o)
}

fn graded_v(degrees: &[i32]) -> ChainComplex {
    ChainComplex::from_flat(Q, degrees, &vec![Vec::new(); degrees.len()]).unwrap()
}

#[test]
fn tq_of_a_trivial_algebra_over_a_nilpotent_operad() {
    let t3 = arc(Operad::com_truncated(Q, 3).unwrap());
    let a = trivial_algebra(&t3, &ChainComplex::point(Q, 2)).unwrap();
    let tower = Tower::new(&t3, &a, BarOptions::exact(9)).unwrap();
    let b = tq(&tower).unwrap();
    assert_eq!(b.valid_through(), 9);
    assert_eq!(b.betti(), Betti::from_pairs(&[(2, 1), (5, 1), (8, 1)]));
}

#[test]
fn tq_of_free_algebras_recovers_generators() {
    for (o, v) in [
        (arc(Operad::com(Q)), graded_v(&[2])),
        (arc(Operad::com(Q)), graded_v(&[1, 2])),
        (arc(Operad::ass(Q)), graded_v(&[1, 2])),
        (arc(Operad::com_truncated(Q, 4).unwrap()), graded_v(&[2, 3])),
    ] {
        let free = free_algebra(&o, &v, 9).unwrap();
        let tower = Tower::new(&o, &free, BarOptions::exact(8)).unwrap();
        let b = tq(&tower).unwrap();
        assert_eq!(b.betti(), homology(&v).through(b.valid_through()), "{}", o.name());
    }
}

#[test]
fn the_two_sided_bar_resolves_the_algebra() {
    let com = arc(Operad::com(Q));
    let free = free_algebra(&com, &graded_v(&[2, 3]), 9).unwrap();
    let tower = Tower::new(&com, &free, BarOptions::exact(8)).unwrap();
    let b = bar(&tower, &Bimodule::of_operad(&com)).unwrap();
    assert_eq!(b.betti(), homology(free.complex()).through(8));
}

#[test]
fn bars_with_a_left_action_are_algebras() {
    let com = arc(Operad::com(Q));
    let free = free_algebra(&com, &graded_v(&[1, 2]), 7).unwrap();
    let tower = Tower::new(&com, &free, BarOptions::exact(6)).unwrap();
    let b = bar(&tower, &Bimodule::of_operad(&com)).unwrap();
    let alg = b.as_algebra().unwrap();
    let found = validate_algebra(&alg, 3);
    assert!(found.is_empty(), "{:?}", &found[..found.len().min(3)]);

    let ass = arc(Operad::ass(Q));
    let free = free_algebra(&ass, &graded_v(&[1, 2]), 6).unwrap();
    let tower = Tower::new(&ass, &free, BarOptions::exact(5)).unwrap();
    let b = bar(&tower, &Bimodule::of_operad(&ass)).unwrap();
    let found = validate_algebra(&b.as_algebra().unwrap(), 3);
    assert!(found.is_empty(), "{:?}", &found[..found.len().min(3)]);
}

#[test]
fn exact_mode_needs_a_connected_algebra() {
    let com = arc(Operad::com(Q));
    let t = trivial_algebra(&com, &ChainComplex::point(Q, 0)).unwrap();
    assert!(matches!(Tower::new(&com, &t, BarOptions::exact(4)), Err(BarError::NotExact(_))));
    let tr = Tower::new(&com, &t, BarOptions::truncated(4, 2).with_arity_cap(3)).unwrap();
    assert_eq!(tr.max_bar(), 2);
    let free = free_algebra(&com, &graded_v(&[1]), 9).unwrap();
    assert!(matches!(
        Tower::new(&com, &free, BarOptions::exact(8).with_arity_cap(3)),
        Err(BarError::ArityCap { .. })
    ));
}

#[test]
fn algebra_maps_induce_chain_maps() {
    let com = arc(Operad::com(Q));
    let i = free_algebra(&com, &graded_v(&[2]), 9).unwrap();
    let j = free_algebra(&com, &graded_v(&[2, 2]), 9).unwrap();
    let gens = j.generator_ids().unwrap();
    let f = free_extension(&i, &j, &[vec![(gens[0], Q.one())]]).unwrap();
    let ti = Tower::new(&com, &i, BarOptions::exact(8)).unwrap();
    let tj = Tower::new(&com, &j, BarOptions::exact(8)).unwrap();
    let m = Bimodule::arity_one(&com).unwrap();
    let (bi, bj) = (bar(&ti, &m).unwrap(), bar(&tj, &m).unwrap());
    let g = bar_map_algebra(&f, &bi, &bj).unwrap();
    assert!(g.is_chain_map());
    assert!(!is_quasi_iso(&g));
    let id = crate::operad::AlgebraMap::identity(&i);
    assert!(is_quasi_iso(&bar_map_algebra(&id, &bi, &bi).unwrap()));
}

#[test]
fn truncated_mode_matches_exact_in_its_range() {
    let com = arc(Operad::com(Q));
    let free = free_algebra(&com, &graded_v(&[2]), 11).unwrap();
    let exact = tq(&Tower::new(&com, &free, BarOptions::exact(10)).unwrap()).unwrap();
    let trunc = tq(&Tower::new(&com, &free, BarOptions::truncated(10, 1)).unwrap()).unwrap();
    let v = trunc.valid_through();
    assert!(v < 10);
    assert_eq!(trunc.betti(), exact.betti().through(v));
}

#[test]
fn augmentation_is_a_quasi_iso_exactly_for_free_algebras() {
    let t3 = arc(Operad::com_truncated(Q, 3).unwrap());
    let free = free_algebra(&t3, &graded_v(&[2]), 8).unwrap();
    let b = tq(&Tower::new(&t3, &free, BarOptions::exact(7)).unwrap()).unwrap();
    let (_, aug) = augmentation_to_relative(&b).unwrap();
    assert!(crate::chain::is_quasi_iso_through(&aug, b.valid_through()));

    let triv = trivial_algebra(&t3, &ChainComplex::point(Q, 2)).unwrap();
    let b = tq(&Tower::new(&t3, &triv, BarOptions::exact(6)).unwrap()).unwrap();
    let (_, aug) = augmentation_to_relative(&b).unwrap();
    assert!(!crate::chain::is_quasi_iso_through(&aug, 5));
    assert_eq!(crate::chain::homology_rank(&aug, 2), 1);
}

#[test]
fn slices_match_one_term_models() {
    for o in [arc(Operad::com(Q)), arc(Operad::ass(Q))] {
        let free = free_algebra(&o, &graded_v(&[1, 2]), 8).unwrap();
        let tower = Tower::new(&o, &free, BarOptions::exact(7)).unwrap();
        for k in 1..=3 {
            let mk = Bimodule::truncation(&o, k, crate::symseq::ExtNat::Fin(k + 1)).unwrap();
            let m = one_term_model(&mk, &tower).unwrap();
            assert_eq!(m.arity, k);
            assert!(
                crate::chain::is_quasi_iso_through(&m.comparison, m.bar.valid_through()),
                "{} k={k}",
                o.name()
            );
        }
    }
}

#[test]
fn associativity_on_the_truncation_fixture() {
    let com = arc(Operad::com(Q));
    let i = free_algebra(&com, &graded_v(&[2]), 11).unwrap();
    let m = Bimodule::truncation(&com, 2, crate::symseq::ExtNat::Inf).unwrap();
    let iso = bar_assoc_iso(&m, &m, &i, BarOptions::exact(10)).unwrap();
    assert!(iso.map.is_chain_map());
    assert!(iso.map.is_bijective(), "{:?} vs {:?}", iso.lhs.total(), iso.rhs.total());
}

#[test]
fn associativity_with_the_operad_itself() {
    let com = arc(Operad::com(Q));
    let i = free_algebra(&com, &graded_v(&[2]), 7).unwrap();
    let o = Bimodule::of_operad(&com);
    let iso = bar_assoc_iso(&o, &o, &i, BarOptions::exact(6)).unwrap();
    let v = iso.lhs.valid_through().min(iso.rhs.valid_through());
    assert!(crate::chain::is_quasi_iso_through(&iso.map, v));
    assert_eq!(iso.rhs.betti(), homology(i.complex()).through(v));
}

#[test]
fn associativity_up_to_homotopy_with_odd_generators() {
    for (o, v, cap) in [(arc(Operad::ass(Q)), graded_v(&[2]), 6), (arc(Operad::com(Q)), graded_v(&[1, 2]), 4)] {
        let i = free_algebra(&o, &v, cap + 1).unwrap();
        let ob = Bimodule::of_operad(&o);
        let iso = bar_assoc_iso(&ob, &ob, &i, BarOptions::exact(cap)).unwrap();
        let v = iso.lhs.valid_through().min(iso.rhs.valid_through());
        assert!(crate::chain::is_quasi_iso_through(&iso.map, v), "{}", o.name());
    }
}
