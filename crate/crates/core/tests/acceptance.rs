//! The acceptance suite: ten criteria, one PASS/FAIL line each.
//!
//! Every criterion also appends what it computed to a transcript; the last
//! criterion reruns the others sequentially and compares transcripts byte
//! for byte.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use opcalc::bar::{bar, bar_assoc_iso, one_term_model, tq, BarOptions, Tower};
use opcalc::chain::{
    homology, is_quasi_iso, is_quasi_iso_through, les_is_exact, long_exact_sequence, pushout_corner_map,
    random_injection, tensor_square, Betti, ChainComplex,
};
use opcalc::exactlin::Field;
use opcalc::filtration::{aq_lift, connectivity_report, filtration_piece, pairing_index_suite, structure_map, FiltrationIndex};
use opcalc::operad::{free_algebra, free_extension, Algebra, Bimodule, Operad};
use opcalc::par;
use opcalc::symseq::ExtNat;

const Q: Field = Field::Q;
const CAP: i32 = 10;

#[derive(Clone, Copy, Debug)]
enum Kind {
    Com,
    Ass,
    ComTruncated(usize),
}

impl Kind {
    fn operad(self) -> Arc<Operad> {
        Arc::new(match self {
            Kind::Com => Operad::com(Q),
            Kind::Ass => Operad::ass(Q),
            Kind::ComTruncated(m) => Operad::com_truncated(Q, m).unwrap(),
        })
    }

    fn max_arity(self) -> usize {
        match self {
            Kind::ComTruncated(m) => m - 1,
            _ => usize::MAX,
        }
    }
}

const KINDS: [Kind; 3] = [Kind::Com, Kind::Ass, Kind::ComTruncated(4)];

/// Generator degrees for the free-algebra fixtures.
const FIXTURES: [&[i32]; 6] = [&[1], &[2], &[3], &[1, 2], &[2, 3], &[2, 2]];

fn graded(degrees: &[i32]) -> ChainComplex {
    ChainComplex::from_flat(Q, degrees, &vec![Vec::new(); degrees.len()]).unwrap()
}

fn free(o: &Arc<Operad>, degrees: &[i32], cap: i32) -> Algebra {
    free_algebra(o, &graded(degrees), cap).unwrap()
}

fn idx(i: usize, m: Option<usize>) -> FiltrationIndex {
    FiltrationIndex::new(i, m.map_or(ExtNat::Inf, ExtNat::Fin)).unwrap()
}

/// Dimensions of the arity-`k` part of `O∘V` for `V` with zero differential,
/// `table[k][d]`, by a generating-function recursion over generators: graded
/// symmetric powers for `com`, tensor powers for `ass`.
fn composite_table(kind: Kind, gens: &[i32], cap: i32) -> Vec<Vec<usize>> {
    let min = *gens.iter().min().unwrap();
    let kmax = (cap / min) as usize;
    let c = cap as usize;
    let mut t = vec![vec![0usize; c + 1]; kmax + 1];
    t[0][0] = 1;
    match kind {
        Kind::Ass => {
            for k in 1..=kmax {
                for d in 0..=c {
                    t[k][d] = gens.iter().filter(|g| **g as usize <= d).map(|g| t[k - 1][d - *g as usize]).sum();
                }
            }
        }
        Kind::Com | Kind::ComTruncated(_) => {
            for &g in gens {
                let g = g as usize;
                let reps = if g % 2 == 0 { kmax } else { 1 };
                let old = t.clone();
                for k in 0..=kmax {
                    for d in 0..=c {
                        t[k][d] = (1..=reps.min(k)).filter(|j| j * g <= d).map(|j| old[k - j][d - j * g]).sum::<usize>() + old[k][d];
                    }
                }
            }
        }
    }
    t
}

/// Betti numbers of `M∘V` through `cap`, where `M` keeps the arities in
/// `arities` of the operad.
fn composite_betti(kind: Kind, gens: &[i32], arities: std::ops::RangeInclusive<usize>, cap: i32) -> Betti {
    let t = composite_table(kind, gens, cap);
    let mut out = BTreeMap::new();
    for (k, row) in t.iter().enumerate() {
        if k == 0 || !arities.contains(&k) || k > kind.max_arity() {
            continue;
        }
        for (d, n) in row.iter().enumerate() {
            if *n > 0 {
                *out.entry(d as i32).or_insert(0) += n;
            }
        }
    }
    Betti(out)
}

struct Log(String);

impl Log {
    fn line(&mut self, s: impl AsRef<str>) {
        self.0.push_str(s.as_ref());
        self.0.push('\n');
    }
}

fn c1_pairing_index(log: &mut Log) -> Result<(), String> {
    let suite = pairing_index_suite(6, 36);
    for r in &suite {
        log.line(format!("{:?}", r));
    }
    let bad: Vec<_> = suite.iter().filter(|r| !r.ok).collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(format!("{} of {} cases disagree, first {:?}", bad.len(), suite.len(), bad[0]))
    }
}

fn c2_bar_vs_composite(log: &mut Log) -> Result<(), String> {
    for kind in KINDS {
        let o = kind.operad();
        let modules = [
            ("O", Bimodule::of_operad(&o), 1..=usize::MAX),
            ("O_2^inf", Bimodule::truncation(&o, 2, ExtNat::Inf).unwrap(), 2..=usize::MAX),
            ("O(2)", Bimodule::truncation(&o, 2, ExtNat::Fin(3)).unwrap(), 2..=2),
        ];
        for gens in FIXTURES {
            let a = free(&o, gens, CAP + 1);
            let tower = Tower::new(&o, &a, BarOptions::exact(CAP)).map_err(|e| e.to_string())?;
            for (name, m, arities) in &modules {
                let b = bar(&tower, m).map_err(|e| e.to_string())?;
                let v = b.valid_through().min(CAP);
                let got = b.betti().through(v);
                let want = composite_betti(kind, gens, arities.clone(), v);
                log.line(format!("{kind:?} {gens:?} {name} through {v}: {got:?}"));
                if got != want {
                    return Err(format!("{kind:?} on {gens:?} with {name}: bar {got:?}, composite {want:?}"));
                }
            }
        }
    }
    Ok(())
}

fn c3_tq_of_free(log: &mut Log) -> Result<(), String> {
    for kind in KINDS {
        let o = kind.operad();
        for gens in FIXTURES {
            let a = free(&o, gens, CAP + 1);
            let tower = Tower::new(&o, &a, BarOptions::exact(CAP)).map_err(|e| e.to_string())?;
            let t = tq(&tower).map_err(|e| e.to_string())?;
            let v = t.valid_through();
            let (got, want) = (t.betti().through(v), homology(&graded(gens)).through(v));
            log.line(format!("{kind:?} {gens:?} through {v}: {got:?}"));
            if got != want {
                return Err(format!("{kind:?} on {gens:?}: TQ {got:?}, V {want:?}"));
            }
        }
    }
    Ok(())
}

const SLICE_CAP: i32 = 8;

fn c4_slices(log: &mut Log) -> Result<(), String> {
    for kind in KINDS {
        let o = kind.operad();
        for gens in FIXTURES {
            let a = free(&o, gens, SLICE_CAP + 1);
            let tower = Tower::new(&o, &a, BarOptions::exact(SLICE_CAP)).map_err(|e| e.to_string())?;
            for k in 1..=4 {
                let piece = filtration_piece(&tower, idx(k, Some(k + 1))).map_err(|e| e.to_string())?;
                let mk = Bimodule::truncation(&o, k, ExtNat::Fin(k + 1)).map_err(|e| e.to_string())?;
                let model = one_term_model(&mk, &tower).map_err(|e| e.to_string())?;
                let v = piece.bar.valid_through();
                let got = piece.bar.betti().through(v);
                let want = homology(&model.model).through(v);
                log.line(format!("{kind:?} {gens:?} I^{k}_{}: {got:?}", k + 1));
                if got != want || !is_quasi_iso_through(&model.comparison, v) {
                    return Err(format!("{kind:?} on {gens:?}, k = {k}: slice {got:?}, model {want:?}"));
                }
            }
        }
    }
    Ok(())
}

fn c5_fiber_sequences(log: &mut Log) -> Result<(), String> {
    for kind in KINDS {
        let o = kind.operad();
        for gens in FIXTURES {
            let a = free(&o, gens, SLICE_CAP + 1);
            let tower = Tower::new(&o, &a, BarOptions::exact(SLICE_CAP)).map_err(|e| e.to_string())?;
            let mut pieces = BTreeMap::new();
            for i in 1..5 {
                for m in i + 1..=5 {
                    pieces.insert((i, m), filtration_piece(&tower, idx(i, Some(m))).map_err(|e| e.to_string())?);
                }
            }
            for k in 1..=3 {
                for l in k + 1..=4 {
                    for m in l + 1..=5 {
                        let f = structure_map(&pieces[&(l, m)], &pieces[&(k, m)]).map_err(|e| e.to_string())?;
                        let g = structure_map(&pieces[&(k, m)], &pieces[&(k, l)]).map_err(|e| e.to_string())?;
                        let top = pieces[&(k, m)].bar.valid_through();
                        let les = long_exact_sequence(&f, &g, 0, top).map_err(|e| e.to_string())?;
                        let ok = les_is_exact(&les);
                        let ranks: Vec<_> = les.iter().map(|n| (n.h_a, n.h_b, n.h_c, n.rank_delta)).collect();
                        log.line(format!("{kind:?} {gens:?} ({k},{l},{m}): {ranks:?}"));
                        if !ok {
                            return Err(format!("{kind:?} on {gens:?}: not exact for ({k}, {l}, {m})"));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn c6_connectivity(log: &mut Log) -> Result<(), String> {
    let o = Kind::Com.operad();
    let a = free(&o, &[2], CAP + 1);
    let tower = Tower::new(&o, &a, BarOptions::exact(CAP)).map_err(|e| e.to_string())?;
    let report = connectivity_report(&tower, 4).map_err(|e| e.to_string())?;
    log.line(format!("{report:?}"));
    if report.c != 2 || !report.ok() {
        return Err(format!("connectivity report fails: {report:?}"));
    }
    for n in 1..=4 {
        let p = filtration_piece(&tower, idx(n, None)).map_err(|e| e.to_string())?;
        let b = p.bar.betti();
        let lo = 2 * n as i32;
        if (0..lo).any(|d| b.get(d) != 0) || b.get(lo) != 1 {
            return Err(format!("I^{n}: {b:?}"));
        }
    }
    Ok(())
}

fn c7_aq_lift(log: &mut Log) -> Result<(), String> {
    let o = Kind::Com.operad();
    let i = free(&o, &[4], 9);
    let j = free(&o, &[2], 9);
    let x = j.generator_ids().unwrap()[0];
    let f = free_extension(&i, &j, &[j.act(0, &[x, x])]).map_err(|e| e.to_string())?;
    let (report, lift) = aq_lift(&[f], BarOptions::exact(8)).map_err(|e| e.to_string())?;
    log.line(format!("{report:?}"));
    if !report.ok() || report.checked_through < 2 * report.c - 1 {
        return Err(format!("report fails: {report:?}"));
    }
    let lift = lift.ok_or("no lift")?;
    let l = lift.lift.ok_or("no factorization")?;
    let h = lift.homotopy.ok_or("no homotopy")?;
    if !l.is_chain_map() {
        return Err("the lift is not a chain map".into());
    }
    h.check().map_err(|e| format!("homotopy: {e}"))
}

fn c8_pushout_corners(log: &mut Log) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut quasi_cases = 0;
    for k in 0..50 {
        let f1 = random_injection(&mut rng, Q, k % 2 == 0);
        let f2 = random_injection(&mut rng, Q, false);
        let corner = pushout_corner_map(&tensor_square(&f1, &f2).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        if !corner.is_chain_map() || !corner.is_injective() {
            return Err(format!("pair {k}: corner map is not an injective chain map"));
        }
        let q = is_quasi_iso(&f1);
        if q {
            quasi_cases += 1;
            if !is_quasi_iso(&corner) {
                return Err(format!("pair {k}: f1 is a quasi-iso but the corner map is not"));
            }
        }
        log.line(format!("{k}: {} → {} quasi {q}", corner.source.total_dim(), corner.target.total_dim()));
    }
    if quasi_cases < 20 {
        return Err(format!("only {quasi_cases} pairs exercise the quasi-iso clause"));
    }
    Ok(())
}

fn c9_associativity(log: &mut Log) -> Result<(), String> {
    let o = Kind::Com.operad();
    let i = free(&o, &[2], CAP + 1);
    let m = Bimodule::truncation(&o, 2, ExtNat::Inf).map_err(|e| e.to_string())?;
    let iso = bar_assoc_iso(&m, &m, &i, BarOptions::exact(CAP)).map_err(|e| e.to_string())?;
    log.line(format!("{} → {}", iso.lhs.total().total_dim(), iso.rhs.total().total_dim()));
    if !iso.map.is_chain_map() {
        return Err("the comparison is not a chain map".into());
    }
    if !iso.map.is_bijective() {
        return Err("the comparison is not bijective".into());
    }
    Ok(())
}

type Criterion = (&'static str, fn(&mut Log) -> Result<(), String>);

const CRITERIA: [Criterion; 9] = [
    ("pairing index oracle for indices up to 6, s_max 36", c1_pairing_index),
    ("bar homology equals the composite M∘V", c2_bar_vs_composite),
    ("TQ of free algebras is the generators", c3_tq_of_free),
    ("slices I^k_{k+1} match one-term models, k <= 4", c4_slices),
    ("long exact sequences for k < l < m <= 5", c5_fiber_sequences),
    ("I^n is (2n-1)-connected with H_2n = 1, n <= 4", c6_connectivity),
    ("AQ lift commutes up to explicit homotopy", c7_aq_lift),
    ("pushout corner maps of 50 random injections", c8_pushout_corners),
    ("associativity comparison is bijective", c9_associativity),
];

fn run_one(c: &Criterion, log: &mut Log) -> Result<(), String> {
    match catch_unwind(AssertUnwindSafe(|| (c.1)(log))) {
        Ok(r) => r,
        Err(p) => Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into())),
    }
}

fn report(n: usize, name: &str, r: &Result<(), String>, secs: f64) -> bool {
    match r {
        Ok(()) => println!("criterion {n:>2}: PASS  {name} ({secs:.1}s)"),
        Err(e) => println!("criterion {n:>2}: FAIL  {name}: {e}"),
    }
    r.is_ok()
}

fn main() -> ExitCode {
    let mut all = true;
    let mut first = Log(String::new());
    for (k, c) in CRITERIA.iter().enumerate() {
        let t = Instant::now();
        let mut log = Log(String::new());
        let r = run_one(c, &mut log);
        let _ = writeln!(first.0, "criterion {}: {:?}\n{}", k + 1, r, log.0);
        all &= report(k + 1, c.0, &r, t.elapsed().as_secs_f64());
    }

    let t = Instant::now();
    par::set_parallel(false);
    let mut second = Log(String::new());
    for (k, c) in CRITERIA.iter().enumerate() {
        let mut log = Log(String::new());
        let r = run_one(c, &mut log);
        let _ = writeln!(second.0, "criterion {}: {:?}\n{}", k + 1, r, log.0);
    }
    par::set_parallel(true);
    let same = first.0.as_bytes() == second.0.as_bytes();
    let r = if same {
        Ok(())
    } else {
        let at = first.0.bytes().zip(second.0.bytes()).position(|(a, b)| a != b).unwrap_or(0);
        Err(format!("transcripts differ at byte {at}"))
    };
    all &= report(10, "a second, sequential run gives a byte-identical transcript", &r, t.elapsed().as_secs_f64());

    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
