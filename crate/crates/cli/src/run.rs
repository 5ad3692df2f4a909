//! Job dispatch and report assembly.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use opcalc::bar::{bar, tq, BarComplex, BarOptions, Tower};
use opcalc::chain::{
    homology, homology_rank, is_quasi_iso, pushout_corner_map, random_injection, tensor_square, Betti, ChainMap,
};
use opcalc::exactlin::{Field, Lin};
use opcalc::filtration::{
    aq_lift, connectivity_report, filtration_piece, goodwillie_stage, pairing_index_suite, pairing_map, power_map,
    structure_map, FiltrationIndex,
};
use opcalc::operad::{free_extension, AlgebraKind, Bimodule};
use opcalc::par;
use opcalc::symseq::schur::Node;
use opcalc::symseq::ExtNat;

use crate::build::{Env, NamedAlgebra};
use crate::spec::{JobSpec, SpecFile};

pub const JOB_KINDS: &[&str] = &[
    "homology",
    "bar",
    "tq",
    "filtration",
    "goodwillie",
    "pairing-index-check",
    "pairing-map",
    "power-map",
    "aq-lift",
    "pushout-corner-check",
    "connectivity",
];

/// Command-line overrides of the file's settings.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub degree_cap: Option<i32>,
    pub arity_cap: Option<usize>,
    pub bar_cap: Option<usize>,
    pub threads: usize,
    pub timing: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Assertion {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// A Betti table with the degree through which it is exact.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Table {
    pub valid_through: i32,
    pub betti: Betti,
}

impl Table {
    fn of_bar(b: &BarComplex) -> Table {
        Table {
            valid_through: b.valid_through(),
            betti: b.betti().through(b.valid_through()),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct JobReport {
    pub name: String,
    pub kind: String,
    pub line: usize,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub assertions: Vec<Assertion>,
    pub tables: BTreeMap<String, Table>,
    pub values: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub millis: Option<u128>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub field: String,
    pub pass: bool,
    pub jobs: Vec<JobReport>,
}

struct Ctx<'a> {
    env: &'a Env,
    spec: &'a SpecFile,
    opts: &'a RunOptions,
    job: &'a JobSpec,
    out: JobReport,
}

type JobResult = Result<(), String>;

impl Ctx<'_> {
    fn param(&self, key: &str) -> Option<&str> {
        self.job.param(key).map(|p| p.1.as_str())
    }

    fn need(&self, key: &str) -> Result<&str, String> {
        self.param(key).ok_or_else(|| format!("missing parameter `{key}`"))
    }

    fn num<T: std::str::FromStr>(&self, key: &str, default: Option<T>) -> Result<T, String> {
        match self.param(key) {
            Some(v) => v.parse().map_err(|_| format!("parameter `{key}`: cannot read {v:?}")),
            None => default.ok_or_else(|| format!("missing parameter `{key}`")),
        }
    }

    fn ext(&self, key: &str, default: ExtNat) -> Result<ExtNat, String> {
        match self.param(key) {
            Some(v) => v.parse().map_err(|_| format!("parameter `{key}`: cannot read {v:?}")),
            None => Ok(default),
        }
    }

    fn index(&self, i: &str, m: &str) -> Result<FiltrationIndex, String> {
        FiltrationIndex::new(self.num(i, None)?, self.ext(m, ExtNat::Inf)?).map_err(|e| e.to_string())
    }

    fn algebra(&self) -> Result<&NamedAlgebra, String> {
        let n = self.need("algebra")?;
        self.env.algebras.get(n).ok_or_else(|| format!("unknown algebra {n:?}"))
    }

    fn options(&self) -> Result<BarOptions, String> {
        let s = &self.spec.settings;
        let cap = match self.param("degree_cap") {
            Some(_) => self.num("degree_cap", None)?,
            None => self.opts.degree_cap.or(s.degree_cap.as_ref().map(|c| c.value)).unwrap_or(8),
        };
        let bar_cap = match self.param("bar_cap") {
            Some(_) => Some(self.num("bar_cap", None)?),
            None => self.opts.bar_cap.or(s.bar_cap.as_ref().map(|c| c.value)),
        };
        let mut o = match bar_cap {
            Some(n) => BarOptions::truncated(cap, n),
            None => BarOptions::exact(cap),
        };
        if let Some(a) = self.opts.arity_cap.or(s.arity_cap.as_ref().map(|c| c.value)) {
            o = o.with_arity_cap(a);
        }
        Ok(o)
    }

    fn tower(&self, a: &NamedAlgebra) -> Result<Arc<Tower>, String> {
        Tower::new(a.algebra.operad(), &a.algebra, self.options()?).map_err(|e| e.to_string())
    }

    fn module(&self, a: &NamedAlgebra) -> Result<Bimodule, String> {
        let o = a.algebra.operad();
        let spec = self.param("module").unwrap_or("operad");
        let words: Vec<&str> = spec.split_whitespace().collect();
        let m = match words.as_slice() {
            ["operad"] => Ok(Bimodule::of_operad(o)),
            ["arity_one"] => Bimodule::arity_one(o),
            ["trunc", i, m] => {
                let i: usize = i.parse().map_err(|_| format!("bad truncation {spec:?}"))?;
                let m: ExtNat = m.parse().map_err(|_| format!("bad truncation {spec:?}"))?;
                Bimodule::truncation(o, i, m)
            }
            _ => return Err(format!("unknown module {spec:?}; use operad, arity_one or `trunc I M`")),
        };
        m.map_err(|e| e.to_string())
    }

    fn check(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        self.out.assertions.push(Assertion {
            name: name.into(),
            pass,
            detail: detail.into(),
        });
    }

    fn table(&mut self, name: &str, t: Table) {
        self.out.tables.insert(name.into(), t);
    }

    fn value(&mut self, name: &str, v: Value) {
        self.out.values.insert(name.into(), v);
    }
}

fn betti_text(b: &Betti) -> String {
    if b.is_zero() {
        return "0".into();
    }
    b.iter().map(|(d, r)| format!("{d}:{r}")).collect::<Vec<_>>().join(" ")
}

fn parse_betti(s: &str) -> Option<Betti> {
    if s.trim() == "0" {
        return Some(Betti::default());
    }
    let mut pairs = Vec::new();
    for w in s.split_whitespace() {
        let (d, r) = w.split_once(':')?;
        pairs.push((d.parse().ok()?, r.parse().ok()?));
    }
    Some(Betti::from_pairs(&pairs))
}

fn ranks(f: &ChainMap, through: i32) -> BTreeMap<i32, usize> {
    let lo = f.source.d_min().min(f.target.d_min());
    (lo..=through).map(|d| (d, homology_rank(f, d))).filter(|x| x.1 > 0).collect()
}

fn job_homology(c: &mut Ctx) -> JobResult {
    let complex = match (c.param("complex"), c.param("algebra")) {
        (Some(n), None) => c.env.complexes.get(n).ok_or_else(|| format!("unknown complex {n:?}"))?.complex.clone(),
        (None, Some(_)) => c.algebra()?.algebra.complex().clone(),
        _ => return Err("give exactly one of `complex` or `algebra`".into()),
    };
    let t = Table {
        valid_through: complex.d_max(),
        betti: homology(&complex),
    };
    c.value("euler", json!(complex.euler()));
    c.table("betti", t);
    Ok(())
}

fn job_bar(c: &mut Ctx) -> JobResult {
    let a = c.algebra()?;
    let tower = c.tower(a)?;
    let m = c.module(a)?;
    let b = bar(&tower, &m).map_err(|e| e.to_string())?;
    c.value("total_dim", json!(b.total().total_dim()));
    c.value("max_bar", json!(b.max_bar()));
    c.table("betti", Table::of_bar(&b));
    Ok(())
}

fn job_tq(c: &mut Ctx) -> JobResult {
    let a = c.algebra()?;
    let tower = c.tower(a)?;
    let b = tq(&tower).map_err(|e| e.to_string())?;
    let t = Table::of_bar(&b);
    if let AlgebraKind::Free { generators } = a.algebra.kind() {
        let want = homology(generators).through(t.valid_through);
        let pass = want == t.betti;
        c.check("tq_of_free_is_generators", pass, format!("tq {} vs generators {}", betti_text(&t.betti), betti_text(&want)));
    }
    c.table("betti", t);
    Ok(())
}

fn job_filtration(c: &mut Ctx) -> JobResult {
    let a = c.algebra()?;
    let tower = c.tower(a)?;
    let idx = c.index("i", "m")?;
    let piece = filtration_piece(&tower, idx).map_err(|e| e.to_string())?;
    if idx.i > 1 {
        let wide = FiltrationIndex::new(1, idx.m).map_err(|e| e.to_string())?;
        let whole = filtration_piece(&tower, wide).map_err(|e| e.to_string())?;
        let f = structure_map(&piece, &whole).map_err(|e| e.to_string())?;
        c.check("structure_map_is_chain_map", f.is_chain_map(), format!("{idx} → {wide}"));
    }
    c.value("index", json!(idx.to_string()));
    c.table("betti", Table::of_bar(&piece.bar));
    Ok(())
}

fn job_goodwillie(c: &mut Ctx) -> JobResult {
    let a = c.algebra()?;
    let tower = c.tower(a)?;
    let m = c.module(a)?;
    let n: usize = c.num("n", None)?;
    for k in 1..=n {
        let st = goodwillie_stage(&tower, &m, k).map_err(|e| e.to_string())?;
        if let Some(down) = &st.to_previous {
            let ok = down.is_chain_map() && down.is_surjective();
            c.check(&format!("P{k}_to_P{}", k - 1), ok, "chain map and surjective");
        }
        c.table(&format!("P{k}"), Table::of_bar(&st.bar));
    }
    Ok(())
}

fn upper(range: &str) -> Result<usize, String> {
    let (lo, hi) = range.split_once("..").ok_or_else(|| format!("expected a range like 1..6, got {range:?}"))?;
    let (lo, hi): (usize, usize) = (lo.parse().map_err(|_| "bad range")?, hi.parse().map_err(|_| "bad range")?);
    if lo != 1 || hi < 2 {
        return Err(format!("ranges start at 1 and end at 2 or more, got {range:?}"));
    }
    Ok(hi)
}

fn job_pairing_index(c: &mut Ctx) -> JobResult {
    let max = upper(c.param("i").unwrap_or("1..6"))?.max(upper(c.param("j").unwrap_or("1..6"))?);
    let s_max: usize = c.num("s_max", Some(36))?;
    let suite = pairing_index_suite(max, s_max);
    let bad: Vec<String> = suite
        .iter()
        .filter(|r| !r.ok)
        .map(|r| format!("{} {} bound {} killed {:?}", r.outer, r.inner, r.bound, r.least_killed))
        .collect();
    c.value("cases", json!(suite.len()));
    c.value("failures", json!(bad));
    let n = suite.len();
    c.check("pairing_index_oracle", bad.is_empty(), format!("{} of {n} cases agree", n - bad.len()));
    Ok(())
}

fn job_pairing_map(c: &mut Ctx) -> JobResult {
    let a = c.algebra()?;
    let outer = c.index("i", "m")?;
    let inner = c.index("j", "n")?;
    let p = pairing_map(&a.algebra, outer, inner, c.options()?).map_err(|e| e.to_string())?;
    c.check("pairing_is_chain_map", p.map.is_chain_map(), format!("({inner})^{} → target", outer));
    let v = p.assoc.lhs.valid_through().min(p.target.valid_through());
    c.value("index", json!({"lo": p.index.0, "bound": p.index.1.to_string()}));
    c.value("ranks", json!(ranks(&p.map, v)));
    c.table("source", Table::of_bar(&p.assoc.lhs));
    c.table("betti", Table::of_bar(&p.target));
    Ok(())
}

fn job_power_map(c: &mut Ctx) -> JobResult {
    let name = c.need("map")?;
    let f = c.env.maps.get(name).ok_or_else(|| format!("unknown map {name:?}"))?;
    if f.source.generator_ids().is_none() {
        return Err("power maps need a free source".into());
    }
    let n: usize = c.num("n", None)?;
    let opts = c.options()?;
    let o = f.target.operad();
    let tj = Tower::new(o, &f.target, opts.clone()).map_err(|e| e.to_string())?;
    let j1 = bar(&tj, &Bimodule::truncation(o, 1, ExtNat::Inf).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let j1a = j1.as_algebra().map_err(|e| e.to_string())?;
    let unit = o.unit_basis().ok_or("the operad has no unit basis element")?;
    let gens = f.source.generator_ids().unwrap();
    let roots = j1.roots(0);
    let mut imgs = Vec::new();
    for g in gens {
        let mut v: Lin<u32> = Vec::new();
        for (id, s) in f.apply(&vec![(g, f.source.field().one())]) {
            let node = Node {
                op: unit,
                children: Box::new([id]),
            };
            let r = roots.lookup(&node).ok_or("generator image outside the bar range")?;
            v.push((j1.flat_index(0, r) as u32, s));
        }
        v.sort_by_key(|t| t.0);
        imgs.push(v);
    }
    let lifted = free_extension(&f.source, &j1a, &imgs).map_err(|e| e.to_string())?;
    let pm = power_map(&lifted, &j1, n, opts).map_err(|e| e.to_string())?;
    c.check("power_map_is_chain_map", pm.map.is_chain_map(), format!("I^{n} → J^{n}"));
    let v = pm.source.valid_through().min(pm.pairing.target.valid_through());
    let rk = ranks(&pm.map, v);
    if n == 1 {
        let want = ranks(&lifted.chain_map().map_err(|e| e.to_string())?, v);
        c.check("degree_one_is_the_map", rk == want, format!("{rk:?} vs {want:?}"));
    }
    c.value("ranks", json!(rk));
    c.table("source", Table::of_bar(&pm.source));
    c.table("betti", Table::of_bar(&pm.pairing.target));
    Ok(())
}

fn job_aq_lift(c: &mut Ctx) -> JobResult {
    let names = c.need("maps")?;
    let stages = names
        .split_whitespace()
        .map(|n| c.env.maps.get(n).cloned().ok_or_else(|| format!("unknown map {n:?}")))
        .collect::<Result<Vec<_>, _>>()?;
    let (report, lift) = aq_lift(&stages, c.options()?).map_err(|e| e.to_string())?;
    let nulls = report.stages_null.iter().filter(|b| **b).count();
    c.check("stages_have_null_tq", nulls == stages.len(), format!("{nulls} of {} stages", stages.len()));
    c.check(
        "vanishing_line",
        report.vanishing_ok,
        format!("H_d(f) = 0 for d <= {} (bound {})", report.checked_through, (1i64 << report.s) * report.c as i64),
    );
    if let Some(q) = report.fiber_quasi_iso {
        c.check("fiber_comparison_quasi_iso", q, "J^2 → hofib(J^1 → J^1_2)");
    }
    if let Some(l) = &lift {
        let ok = matches!((&l.lift, &l.homotopy), (Some(m), Some(h)) if m.is_chain_map() && h.check().is_ok());
        c.check("lift_commutes_up_to_homotopy", ok, "I^1 → J^2 with an explicit homotopy");
    }
    c.value("report", serde_json::to_value(&report).unwrap());
    Ok(())
}

fn job_pushout(c: &mut Ctx) -> JobResult {
    let trials: usize = c.num("trials", Some(50))?;
    let seed: u64 = c.num("seed", Some(0))?;
    let field = c.env.field;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut injective, mut quasi_cases, mut quasi_ok) = (0, 0, 0);
    for k in 0..trials {
        let quasi = k % 2 == 0;
        let f1 = random_injection(&mut rng, field, quasi);
        let f2 = random_injection(&mut rng, field, false);
        let corner = pushout_corner_map(&tensor_square(&f1, &f2).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        injective += corner.is_injective() as usize;
        if is_quasi_iso(&f1) {
            quasi_cases += 1;
            quasi_ok += is_quasi_iso(&corner) as usize;
        }
    }
    c.check("corner_injective", injective == trials, format!("{injective} of {trials}"));
    c.check("corner_quasi_iso", quasi_ok == quasi_cases, format!("{quasi_ok} of {quasi_cases}"));
    c.value("trials", json!(trials));
    Ok(())
}

fn job_connectivity(c: &mut Ctx) -> JobResult {
    let a = c.algebra()?;
    let tower = c.tower(a)?;
    let n: usize = c.num("n", None)?;
    let r = connectivity_report(&tower, n).map_err(|e| e.to_string())?;
    for row in &r.rows {
        let lo = row.n as i32 * r.c;
        c.check(&format!("I^{}_vanishing", row.n), row.vanishing_ok, format!("H_d = 0 for d < {lo}"));
        c.check(&format!("P{}_excision", row.n), row.excisive_ok, format!("cone vanishes through {}", lo + r.c - 1));
        c.table(
            &format!("I^{}", row.n),
            Table {
                valid_through: row.valid_through,
                betti: row.betti.through(row.valid_through),
            },
        );
    }
    c.value("c", json!(r.c));
    Ok(())
}

fn apply_expects(c: &mut Ctx) {
    for e in &c.job.expects {
        let (key, want) = (&e.0, &e.1);
        let (table, field) = match key.split_once('.') {
            Some((t, f)) => (t, f),
            None if key == "betti" || key == "valid_through" => ("betti", key.as_str()),
            None => ("", key.as_str()),
        };
        let (pass, detail) = if table.is_empty() {
            match c.out.values.get(field) {
                Some(v) => {
                    let got = match v {
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    };
                    (got == *want, format!("got {got}"))
                }
                None => (false, format!("no output named {field:?}")),
            }
        } else {
            match (c.out.tables.get(table), field) {
                (Some(t), "betti") => match parse_betti(want) {
                    Some(b) => (b == t.betti, format!("got {}", betti_text(&t.betti))),
                    None => (false, format!("cannot read {want:?} as a Betti table")),
                },
                (Some(t), "valid_through") => (t.valid_through.to_string() == *want, format!("got {}", t.valid_through)),
                (Some(_), other) => (false, format!("tables have no field {other:?}")),
                (None, _) => (false, format!("no table named {table:?}")),
            }
        };
        c.check(&format!("expect {key} = {want}"), pass, detail);
    }
}

fn run_job(env: &Env, spec: &SpecFile, opts: &RunOptions, job: &JobSpec) -> JobReport {
    let start = Instant::now();
    let kind = job.kind.as_ref().map(|k| k.value.clone()).unwrap_or_default();
    let mut c = Ctx {
        env,
        spec,
        opts,
        job,
        out: JobReport {
            name: job.name.value.clone(),
            kind: kind.clone(),
            line: job.name.line,
            pass: false,
            error: None,
            assertions: Vec::new(),
            tables: BTreeMap::new(),
            values: BTreeMap::new(),
            millis: None,
        },
    };
    let r = match kind.as_str() {
        "homology" => job_homology(&mut c),
        "bar" => job_bar(&mut c),
        "tq" => job_tq(&mut c),
        "filtration" => job_filtration(&mut c),
        "goodwillie" => job_goodwillie(&mut c),
        "pairing-index-check" => job_pairing_index(&mut c),
        "pairing-map" => job_pairing_map(&mut c),
        "power-map" => job_power_map(&mut c),
        "aq-lift" => job_aq_lift(&mut c),
        "pushout-corner-check" => job_pushout(&mut c),
        "connectivity" => job_connectivity(&mut c),
        "" => Err("missing `kind`".into()),
        other => Err(format!("unknown job kind {other:?}; known: {}", JOB_KINDS.join(", "))),
    };
    match r {
        Ok(()) => apply_expects(&mut c),
        Err(e) => c.out.error = Some(format!("job {:?} (line {}): {e}", job.name.value, job.name.line)),
    }
    c.out.pass = c.out.error.is_none() && c.out.assertions.iter().all(|a| a.pass);
    if opts.timing {
        c.out.millis = Some(start.elapsed().as_millis());
    }
    c.out
}

/// Runs every job; jobs run concurrently and are reported in file order.
pub fn run(env: &Env, spec: &SpecFile, opts: &RunOptions) -> Report {
    let jobs: Vec<&JobSpec> = spec.jobs().collect();
    let threads = opts.threads.max(1);
    let reports = par::with_threads(threads, || par::map(&jobs, |j| run_job(env, spec, opts, j)));
    Report {
        field: env.field.to_string(),
        pass: reports.iter().all(|r| r.pass),
        jobs: reports,
    }
}

/// One CSV per job: `table,degree,rank,valid_through`.
pub fn csv(job: &JobReport) -> String {
    let mut s = String::from("table,degree,rank,valid_through\n");
    for (name, t) in &job.tables {
        for (d, r) in t.betti.iter() {
            s.push_str(&format!("{name},{d},{r},{}\n", t.valid_through));
        }
    }
    s
}

pub fn default_field() -> Field {
    Field::Q
}
