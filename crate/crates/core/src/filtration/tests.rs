use std::sync::Arc;

use super::*;
use crate::bar::{one_term_model, tq, BarOptions};
use crate::chain::{homology_rank, is_quasi_iso_through, ChainComplex};
use crate::exactlin::Field;
use crate::operad::{free_algebra, free_extension, Algebra, AlgebraMap, Operad};

const Q: Field = Field::Q;

fn com() -> Arc<Operad> {
    Arc::new(Operad::com(Q))
}

fn free(o: &Arc<Operad>, degrees: &[i32], cap: i32) -> Algebra {
    let v = ChainComplex::from_flat(Q, degrees, &vec![Vec::new(); degrees.len()]).unwrap();
    free_algebra(o, &v, cap).unwrap()
}

fn idx(i: usize, m: Option<usize>) -> FiltrationIndex {
    FiltrationIndex::new(i, m.map_or(ExtNat::Inf, ExtNat::Fin)).unwrap()
}

#[test]
fn indices_are_validated() {
    assert!(FiltrationIndex::new(0, ExtNat::Inf).is_err());
    assert!(FiltrationIndex::new(3, ExtNat::Fin(3)).is_err());
    assert!(idx(2, Some(5)).refines(&idx(1, Some(4))));
    assert!(!idx(1, Some(5)).refines(&idx(2, Some(5))));
}

#[test]
fn pairing_index_values() {
    assert_eq!(pairing_index(idx(2, None), idx(2, None)), (4, ExtNat::Inf));
    assert_eq!(pairing_index(idx(2, Some(3)), idx(2, Some(4))), (4, ExtNat::Fin(6)));
    assert_eq!(pairing_index(idx(1, Some(2)), idx(3, None)), (3, ExtNat::Fin(6)));
    assert_eq!(pairing_index(idx(3, None), idx(1, Some(2))), (3, ExtNat::Fin(4)));
}

#[test]
fn partition_shapes_by_hand() {
    let shapes = partition_shapes(2, 6);
    let want = [(2, 1, 2), (3, 1, 3), (4, 1, 4), (4, 2, 2), (5, 1, 5), (5, 2, 3), (6, 1, 6), (6, 2, 4), (6, 2, 3), (6, 3, 2)];
    assert_eq!(shapes.len(), want.len());
    for w in want {
        assert!(shapes.contains(&w), "{w:?}");
    }
}

#[test]
fn oracle_agrees_on_small_indices() {
    let suite = pairing_index_suite(4, 20);
    assert_eq!(suite.len(), 10 * 10);
    assert!(suite.iter().all(|r| r.ok), "{:?}", suite.iter().find(|r| !r.ok));
}

#[test]
fn structure_maps_are_chain_maps() {
    let o = com();
    let a = free(&o, &[2], 9);
    let tower = Tower::new(&o, &a, BarOptions::exact(8)).unwrap();
    let p = filtration_piece(&tower, idx(2, Some(4))).unwrap();
    let q = filtration_piece(&tower, idx(1, Some(3))).unwrap();
    let f = structure_map(&p, &q).unwrap();
    assert!(f.is_chain_map());
    assert!(structure_map(&q, &p).is_err());
}

#[test]
fn first_goodwillie_stage_is_tq() {
    let o = com();
    let a = free(&o, &[2, 3], 9);
    let tower = Tower::new(&o, &a, BarOptions::exact(8)).unwrap();
    let m = Bimodule::of_operad(&o);
    let p1 = goodwillie_stage(&tower, &m, 1).unwrap();
    assert!(p1.to_previous.is_none());
    assert_eq!(p1.bar.betti(), tq(&tower).unwrap().betti());
    let p3 = goodwillie_stage(&tower, &m, 3).unwrap();
    let down = p3.to_previous.unwrap();
    assert!(down.is_chain_map());
    assert!(down.is_surjective());
}

#[test]
fn layers_of_the_tower_are_one_term_models() {
    let o = com();
    let a = free(&o, &[2], 9);
    let tower = Tower::new(&o, &a, BarOptions::exact(8)).unwrap();
    let mn = Bimodule::truncation(&o, 2, ExtNat::Fin(3)).unwrap();
    let m = one_term_model(&mn, &tower).unwrap();
    let fiber = filtration_piece(&tower, idx(2, Some(3))).unwrap();
    assert_eq!(fiber.bar.betti(), m.bar.betti());
    assert!(is_quasi_iso_through(&m.comparison, m.bar.valid_through()));
}

#[test]
fn connectivity_of_powers() {
    let o = com();
    let a = free(&o, &[2], 11);
    let tower = Tower::new(&o, &a, BarOptions::exact(10)).unwrap();
    let r = connectivity_report(&tower, 3).unwrap();
    assert_eq!(r.c, 2);
    assert!(r.ok(), "{r:?}");
    assert!(r.rows[0].betti.get(2) > 0);
}

#[test]
fn pairing_with_the_whole_ideal() {
    let o = com();
    let a = free(&o, &[2], 7);
    let p = pairing_map(&a, idx(1, None), idx(1, None), BarOptions::exact(6)).unwrap();
    assert!(p.map.is_chain_map());
    let v = p.assoc.lhs.valid_through().min(p.target.valid_through());
    assert!(is_quasi_iso_through(&p.map, v));
}

#[test]
fn pairing_of_squares() {
    let o = com();
    let a = free(&o, &[2], 11);
    let p = pairing_map(&a, idx(2, None), idx(2, None), BarOptions::exact(10)).unwrap();
    assert_eq!(p.index, (4, ExtNat::Inf));
    assert!(p.collapse.is_chain_map());
    assert!(p.map.is_chain_map());
    // x^4 in degree 8 is hit
    assert_eq!(homology_rank(&p.map, 8), 1);
}

fn square_fixture() -> AlgebraMap {
    let o = com();
    let i = free(&o, &[4], 9);
    let j = free(&o, &[2], 9);
    let x = j.generator_ids().unwrap()[0];
    let x2 = j.act(0, &[x, x]);
    free_extension(&i, &j, &[x2]).unwrap()
}

#[test]
fn power_map_in_degree_one_is_the_map_itself() {
    let o = com();
    let j = free(&o, &[2], 7);
    let opts = BarOptions::exact(6);
    let tj = Tower::new(&o, &j, opts.clone()).unwrap();
    let j1 = bar(&tj, &Bimodule::truncation(&o, 1, ExtNat::Inf).unwrap()).unwrap();
    let j1a = j1.as_algebra().unwrap();
    let r0 = j1.roots(0);
    let hit = (0..r0.len() as u32)
        .find(|id| r0.node(*id).children.len() == 1 && r0.degree(*id) == 4)
        .unwrap();
    let i = free(&o, &[4], 7);
    let f = free_extension(&i, &j1a, &[vec![(j1.flat_index(0, hit) as u32, Q.one())]]).unwrap();
    let pm = power_map(&f, &j1, 1, opts).unwrap();
    assert!(pm.map.is_chain_map());
    let fc = f.chain_map().unwrap();
    for d in 0..=pm.source.valid_through().min(pm.pairing.target.valid_through()) {
        assert_eq!(homology_rank(&pm.map, d), homology_rank(&fc, d), "degree {d}");
    }
}

#[test]
fn lifting_a_map_with_null_tq() {
    let f = square_fixture();
    let (report, lift) = aq_lift(&[f], BarOptions::exact(8)).unwrap();
    assert!(report.ok(), "{report:?}");
    assert_eq!(report.fiber_quasi_iso, Some(true));
    let lift = lift.unwrap();
    let l = lift.lift.unwrap();
    assert!(l.is_chain_map());
    lift.homotopy.unwrap().check().unwrap();
}

#[test]
fn a_map_with_nonzero_tq_does_not_lift() {
    let o = com();
    let i = free(&o, &[2], 9);
    let j = free(&o, &[2], 9);
    let f = free_extension(&i, &j, &[vec![(j.generator_ids().unwrap()[0], Q.one())]]).unwrap();
    let (report, lift) = aq_lift(&[f], BarOptions::exact(6)).unwrap();
    assert_eq!(report.stages_null, vec![false]);
    assert!(!report.vanishing_ok);
    assert!(!report.ok());
    assert!(lift.is_none());
}
