use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use opcalc::bar::{bar, bar_map_algebra, tq, BarOptions, Tower};
use opcalc::chain::{
    cone, direct_sum, find_null_homotopy, homology, is_quasi_iso, is_quasi_iso_through, pushout_corner_map,
    random_injection, tensor, tensor_square, ChainComplex, ChainMap,
};
use opcalc::exactlin::{kernel_basis, rank, rank_reversed, solve, Field, Matrix};
use opcalc::filtration::{filtration_piece, FiltrationIndex};
use opcalc::operad::{free_algebra, free_extension, Bimodule, Operad};
use opcalc::symseq::{associator, ExtNat, Level, SymSeq, Tail};

const Q: Field = Field::Q;

fn field() -> impl Strategy<Value = Field> {
    prop_oneof![Just(Q), Just(Field::Fp(2)), Just(Field::Fp(5))]
}

fn matrix() -> impl Strategy<Value = (Field, Vec<Vec<i64>>)> {
    (field(), 1usize..6, 1usize..6).prop_flat_map(|(f, r, c)| (Just(f), prop::collection::vec(prop::collection::vec(-3i64..=3, c), r)))
}

fn build(f: Field, rows: &[Vec<i64>]) -> Matrix {
    let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
    Matrix::from_ints(f, &refs)
}

/// A small random complex: the target of a random injection.
fn complex(seed: u64) -> Arc<ChainComplex> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_injection(&mut rng, Q, seed % 3 == 0).target
}

fn graded(degrees: &[i32]) -> ChainComplex {
    ChainComplex::from_flat(Q, degrees, &vec![Vec::new(); degrees.len()]).unwrap()
}

fn operad(k: u8) -> Arc<Operad> {
    Arc::new(match k % 3 {
        0 => Operad::com(Q),
        1 => Operad::ass(Q),
        _ => Operad::com_truncated(Q, 3).unwrap(),
    })
}

fn seq(k: u8) -> SymSeq {
    match k % 4 {
        0 => SymSeq::new(Q, vec![Level::Zero], Tail::Trivial).unwrap(),
        1 => SymSeq::new(Q, vec![Level::Zero], Tail::Regular).unwrap(),
        2 => SymSeq::unit(Q),
        _ => SymSeq::new(Q, vec![Level::Zero, Level::Trivial, Level::Regular], Tail::Zero).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_plus_nullity_is_the_column_count((f, rows) in matrix()) {
        let m = build(f, &rows);
        let k = kernel_basis(&m);
        prop_assert_eq!(rank(&m) + k.ncols(), m.ncols());
        prop_assert!(m.mul(&k).is_zero());
    }

    #[test]
    fn ranks_agree_across_pivot_orders((f, rows) in matrix()) {
        let m = build(f, &rows);
        prop_assert_eq!(rank(&m), rank_reversed(&m));
        prop_assert_eq!(rank(&m), rank(&m.transpose()));
    }

    #[test]
    fn solutions_solve((f, rows) in matrix(), x in prop::collection::vec(-3i64..=3, 6)) {
        let m = build(f, &rows);
        let x0: Vec<_> = (0..m.ncols()).map(|j| (j, f.int(x[j]))).filter(|t| !t.1.is_zero()).collect();
        let b = m.apply(&x0);
        let x = solve(&m, &b).expect("consistent by construction");
        prop_assert_eq!(m.apply(&x), b);
    }

    #[test]
    fn homology_is_additive(a in any::<u64>(), b in any::<u64>()) {
        let (c, d) = (complex(a), complex(b));
        let s = direct_sum(&c, &d).unwrap();
        let (hc, hd, hs) = (homology(&c), homology(&d), homology(&s));
        for k in s.degrees() {
            prop_assert_eq!(hs.get(k), hc.get(k) + hd.get(k));
        }
    }

    #[test]
    fn kunneth(a in any::<u64>(), b in any::<u64>()) {
        let (c, d) = (complex(a), complex(b));
        let t = tensor(&c, &d).unwrap();
        let (hc, hd, ht) = (homology(&c), homology(&d), homology(&t));
        for n in t.degrees() {
            let want: usize = c.degrees().map(|p| hc.get(p) * hd.get(n - p)).sum();
            prop_assert_eq!(ht.get(n), want);
        }
    }

    #[test]
    fn null_homotopies_exist_exactly_when_expected(a in any::<u64>()) {
        let c = complex(a);
        let acyclic = Arc::new(cone(&ChainMap::identity(c.clone())));
        let h = find_null_homotopy(&ChainMap::identity(acyclic)).expect("cones on identities are contractible");
        prop_assert!(h.check().is_ok());
        let id = ChainMap::identity(c.clone());
        prop_assert_eq!(find_null_homotopy(&id).is_some(), homology(&c).is_zero());
    }

    #[test]
    fn pushout_corners_are_injective(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f1 = random_injection(&mut rng, Q, seed % 2 == 0);
        let f2 = random_injection(&mut rng, Q, false);
        let corner = pushout_corner_map(&tensor_square(&f1, &f2).unwrap()).unwrap();
        prop_assert!(corner.is_chain_map());
        prop_assert!(corner.is_injective());
        if is_quasi_iso(&f1) {
            prop_assert!(is_quasi_iso(&corner));
        }
    }

    #[test]
    fn extended_naturals_are_ordered(n in 0usize..1000, k in 0usize..50) {
        prop_assert!(ExtNat::Inf > ExtNat::Fin(n));
        prop_assert_eq!(ExtNat::Fin(n).add(ExtNat::Fin(k)), ExtNat::Fin(n + k));
        prop_assert_eq!(ExtNat::Inf.sub(k), ExtNat::Inf);
        prop_assert!(ExtNat::Fin(n + 1).exceeds(n));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn composition_is_associative(x in 0u8..4, y in 0u8..4, z in 0u8..4) {
        let maps = associator(&seq(x), &seq(y), &seq(z), 4).unwrap();
        for m in maps {
            prop_assert!(m.is_chain_map());
            prop_assert!(m.is_bijective());
        }
    }

    #[test]
    fn raising_the_cap_keeps_lower_betti_numbers(k in 0u8..3, mut gens in prop::collection::vec(1i32..=3, 1..=2), cap in 4i32..=6) {
        gens.sort();
        let o = operad(k);
        let low = tq(&Tower::new(&o, &free_algebra(&o, &graded(&gens), cap + 1).unwrap(), BarOptions::exact(cap)).unwrap()).unwrap();
        let v = low.valid_through();
        let hi_cap = cap + 2;
        let a = free_algebra(&o, &graded(&gens), hi_cap + 1).unwrap();
        let tower = Tower::new(&o, &a, BarOptions::exact(hi_cap)).unwrap();
        let high = bar(&tower, &Bimodule::of_operad(&o)).unwrap();
        let low_o = bar(&Tower::new(&o, &free_algebra(&o, &graded(&gens), cap + 1).unwrap(), BarOptions::exact(cap)).unwrap(), &Bimodule::of_operad(&o)).unwrap();
        prop_assert_eq!(low_o.betti().through(v), high.betti().through(v));
        prop_assert_eq!(low.betti().through(v), tq(&tower).unwrap().betti().through(v));
        let total = high.total();
        for d in total.degrees() {
            prop_assert!(total.diff(d).mul(&total.diff(d + 1)).is_zero());
        }
    }

    #[test]
    fn powers_of_the_ideal_are_connected(c in 1i32..=3, n in 1usize..=3) {
        let o = Arc::new(Operad::com(Q));
        let cap = 8;
        let a = free_algebra(&o, &graded(&[c]), cap + 1).unwrap();
        let tower = Tower::new(&o, &a, BarOptions::exact(cap)).unwrap();
        let p = filtration_piece(&tower, FiltrationIndex::new(n, ExtNat::Inf).unwrap()).unwrap();
        let b = p.bar.betti();
        for d in 0..(n as i32 * c).min(p.bar.valid_through() + 1) {
            prop_assert_eq!(b.get(d), 0);
        }
    }

    #[test]
    fn bar_constructions_invert_quasi_isos(k in 0u8..3, g in 1i32..=3, top in 2i32..=4) {
        // free(V) → free(V ⊕ disk), a quasi-iso of connective algebras
        let o = operad(k);
        let cap = 7;
        let i = free_algebra(&o, &graded(&[g]), cap + 1).unwrap();
        // cells: 0 = generator, 1 = disk bottom, 2 = disk top; sorted by degree
        let mut cells = [(g, 0usize), (top - 1, 1), (top, 2)];
        cells.sort();
        let pos = |k: usize| cells.iter().position(|c| c.1 == k).unwrap();
        let mut bd = vec![Vec::new(); 3];
        bd[pos(2)] = vec![(pos(1), Q.one())];
        let degrees: Vec<i32> = cells.iter().map(|c| c.0).collect();
        let big = ChainComplex::from_flat(Q, &degrees, &bd).unwrap();
        let j = free_algebra(&o, &big, cap + 1).unwrap();
        let x = j.generator_ids().unwrap()[pos(0)];
        let f = free_extension(&i, &j, &[vec![(x, Q.one())]]).unwrap();
        let opts = BarOptions::exact(cap - 1);
        let (ti, tj) = (Tower::new(&o, &i, opts.clone()).unwrap(), Tower::new(&o, &j, opts).unwrap());
        let (bi, bj) = (tq(&ti).unwrap(), tq(&tj).unwrap());
        let m = bar_map_algebra(&f, &bi, &bj).unwrap();
        prop_assert!(m.is_chain_map());
        prop_assert!(is_quasi_iso_through(&m, bi.valid_through().min(bj.valid_through())));
    }
}
