//! Resolution of a parsed file into library objects, with the declared
//! invariants re-validated.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use opcalc::chain::{ChainComplex, ChainError};
use opcalc::exactlin::{Acc, Field, Lin, Scalar};
use opcalc::operad::{
    free_algebra, free_extension, table_algebra, trivial_algebra, validate_algebra, validate_algebra_map, validate_operad,
    Algebra, AlgebraKind, AlgebraMap, Operad,
};
use opcalc::symseq::{Level, SymRep, SymSeq, Tail};

use crate::spec::{
    AlgebraKindSpec, AlgebraSpec, Atom, Comb, ComplexSpec, LevelSpec, Loc, MapSpec, OperadSpec, Rat, Section, SpecError,
    SpecFile, SymSeqSpec, TailSpec,
};

/// A complex together with its basis labels in flat order.
#[derive(Clone, Debug)]
pub struct NamedComplex {
    pub complex: Arc<ChainComplex>,
    pub labels: Vec<String>,
}

impl NamedComplex {
    pub fn index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

#[derive(Clone, Debug)]
pub struct NamedAlgebra {
    pub algebra: Algebra,
    /// Labels of the underlying or generating complex.
    pub labels: Vec<String>,
}

impl NamedAlgebra {
    /// Basis id of a label: a generator for free algebras, a basis element otherwise.
    pub fn element(&self, label: &str) -> Option<u32> {
        let k = self.labels.iter().position(|l| l == label)?;
        match self.algebra.kind() {
            AlgebraKind::Free { .. } => self.algebra.generator_ids().map(|g| g[k]),
            _ => Some(k as u32),
        }
    }

    pub fn is_free(&self) -> bool {
        matches!(self.algebra.kind(), AlgebraKind::Free { .. })
    }
}

/// Everything a file defines, by name.
#[derive(Clone, Debug)]
pub struct Env {
    pub field: Field,
    pub complexes: BTreeMap<String, NamedComplex>,
    pub symseqs: BTreeMap<String, SymSeq>,
    pub operads: BTreeMap<String, Arc<Operad>>,
    pub algebras: BTreeMap<String, NamedAlgebra>,
    pub maps: BTreeMap<String, AlgebraMap>,
}

/// Arity up to which table operads and algebras are re-validated on load.
pub const VALIDATION_ARITY: usize = 3;

pub fn scalar(field: Field, r: &Rat, at: &Loc<impl Sized>) -> Result<Scalar, SpecError> {
    field
        .frac(*r.numer(), *r.denom())
        .ok_or_else(|| SpecError::at(at, format!("coefficient {r} is undefined in {field}")))
}

fn labels_comb(
    field: Field,
    c: &Comb,
    at: &Loc<impl Sized>,
    index: &dyn Fn(&str) -> Option<usize>,
) -> Result<Lin<usize>, SpecError> {
    let mut acc = Acc::new();
    for (r, a) in c {
        let k = match a {
            Atom::Name(n) => index(n).ok_or_else(|| SpecError::at(at, format!("unknown basis label {n:?}")))?,
            other => return Err(SpecError::at(at, format!("expected a basis label, got {other}"))),
        };
        acc.push(k, scalar(field, r, at)?);
    }
    Ok(acc.finish())
}

fn index_comb(field: Field, c: &Comb, at: &Loc<impl Sized>) -> Result<Lin<u64>, SpecError> {
    let mut acc = Acc::new();
    for (r, a) in c {
        let k = match a {
            Atom::Index(k) => *k,
            other => return Err(SpecError::at(at, format!("expected an operation index, got {other}"))),
        };
        acc.push(k, scalar(field, r, at)?);
    }
    Ok(acc.finish())
}

fn build_complex(field: Field, c: &ComplexSpec) -> Result<NamedComplex, SpecError> {
    let mut gens: Vec<(i32, usize, &str)> = Vec::new();
    for (k, g) in c.gens.iter().enumerate() {
        if gens.iter().any(|x| x.2 == g.0) {
            return Err(SpecError::at(g, format!("label {:?} declared twice", g.0)));
        }
        gens.push((g.1, k, &g.0));
    }
    gens.sort();
    let labels: Vec<String> = gens.iter().map(|g| g.2.to_string()).collect();
    let degrees: Vec<i32> = gens.iter().map(|g| g.0).collect();
    let index = |l: &str| labels.iter().position(|x| x == l);
    let mut boundary = vec![Vec::new(); labels.len()];
    let mut set_at: Vec<Option<&Loc<(String, Comb)>>> = vec![None; labels.len()];
    for d in &c.diffs {
        let k = index(&d.0).ok_or_else(|| SpecError::at(d, format!("unknown basis label {:?}", d.0)))?;
        if set_at[k].is_some() {
            return Err(SpecError::at(d, format!("differential of {:?} given twice", d.0)));
        }
        let v = labels_comb(field, &d.1, d, &index)?;
        if let Some((j, _)) = v.iter().find(|(j, _)| degrees[*j] != degrees[k] - 1) {
            return Err(SpecError::at(d, format!("d {} has a term {} outside degree {}", d.0, labels[*j], degrees[k] - 1)));
        }
        boundary[k] = v;
        set_at[k] = Some(d);
    }
    let complex = ChainComplex::from_flat(field, &degrees, &boundary).map_err(|e| {
        let at = match &e {
            ChainError::NotComplex(deg) => (0..labels.len())
                .filter(|k| degrees[*k] == *deg || degrees[*k] == deg + 1)
                .find_map(|k| set_at[k]),
            _ => None,
        };
        match at {
            Some(at) => SpecError::at(at, e.to_string()),
            None => SpecError::at(&c.name, e.to_string()),
        }
    })?;
    Ok(NamedComplex {
        complex: Arc::new(complex),
        labels,
    })
}

fn build_symseq(field: Field, s: &SymSeqSpec, complexes: &BTreeMap<String, NamedComplex>) -> Result<SymSeq, SpecError> {
    let top = s.levels.iter().map(|l| l.0).max().unwrap_or(0);
    let mut levels = vec![Level::Zero; top + 1];
    let mut seen = vec![false; top + 1];
    for l in &s.levels {
        let r = l.0;
        if seen[r] {
            return Err(SpecError::at(l, format!("level {r} given twice")));
        }
        seen[r] = true;
        levels[r] = match &l.1 {
            LevelSpec::Zero => Level::Zero,
            LevelSpec::Trivial => Level::Trivial,
            LevelSpec::Regular => Level::Regular,
            LevelSpec::Complex(name) => {
                let c = complexes
                    .get(name)
                    .ok_or_else(|| SpecError::at(l, format!("unresolved complex {name:?}")))?;
                let n = c.complex.total_dim();
                let mut gens: Vec<Vec<Lin<usize>>> =
                    (1..r).map(|_| (0..n).map(|b| vec![(b, field.one())]).collect()).collect();
                for w in s.swaps.iter().filter(|w| w.arity == r) {
                    if w.i + 1 >= r {
                        return Err(SpecError::at(w, format!("arity {r} has no generator s_{}", w.i)));
                    }
                    let b = c
                        .index(&w.label)
                        .ok_or_else(|| SpecError::at(w, format!("unknown basis label {:?}", w.label)))?;
                    gens[w.i][b] = labels_comb(field, &w.image, w, &|x| c.index(x))?;
                }
                let rep = SymRep::from_flat(r, c.complex.clone(), &gens).map_err(|e| {
                    let at = s.swaps.iter().find(|w| w.arity == r).map(|w| (w.line, w.col));
                    let (line, col) = at.unwrap_or((l.line, l.col));
                    SpecError {
                        line,
                        col,
                        message: format!("level {r}: {e}"),
                    }
                })?;
                Level::Dense(Arc::new(rep))
            }
        };
    }
    for w in &s.swaps {
        if !matches!(s.levels.iter().find(|l| l.0 == w.arity).map(|l| &l.1), Some(LevelSpec::Complex(_))) {
            return Err(SpecError::at(w, format!("level {} is not given by a complex", w.arity)));
        }
    }
    let tail = match s.tail.as_ref().map(|t| &t.value) {
        None | Some(TailSpec::Zero) => Tail::Zero,
        Some(TailSpec::Trivial) => Tail::Trivial,
        Some(TailSpec::Regular) => Tail::Regular,
        Some(TailSpec::Unknown) => Tail::Unknown,
    };
    SymSeq::new(field, levels, tail).map_err(|e| SpecError::at(&s.name, e.to_string()))
}

fn build_operad(field: Field, o: &OperadSpec, seqs: &BTreeMap<String, SymSeq>, cap: usize) -> Result<Operad, SpecError> {
    if let Some(b) = &o.builtin {
        if o.seq.is_some() || o.unit.is_some() || !o.gammas.is_empty() {
            return Err(SpecError::at(b, "a builtin operad takes no table data"));
        }
        return Operad::builtin(&b.name, field, b.m).map_err(|e| SpecError::at(b, e.to_string()));
    }
    let seq_name = o.seq.as_ref().ok_or_else(|| SpecError::at(&o.name, "operad needs `builtin` or `seq`"))?;
    let seq = seqs
        .get(&seq_name.value)
        .ok_or_else(|| SpecError::at(seq_name, format!("unresolved symseq {:?}", seq_name.value)))?;
    let unit_at = o.unit.as_ref().ok_or_else(|| SpecError::at(&o.name, "table operad needs a `unit`"))?;
    let unit = index_comb(field, unit_at, unit_at)?;
    let mut entries = HashMap::new();
    for g in &o.gammas {
        let r = g.inputs.len();
        if g.x >= seq.dim(r) {
            return Err(SpecError::at(g, format!("no operation {} in arity {r}", g.x)));
        }
        if let Some((a, b)) = g.inputs.iter().find(|(a, b)| *b >= seq.dim(*a)) {
            return Err(SpecError::at(g, format!("no operation {b} in arity {a}")));
        }
        let s: usize = g.inputs.iter().map(|x| x.0).sum();
        let value = index_comb(field, &g.value.value, g)?;
        if let Some((b, _)) = value.iter().find(|(b, _)| *b >= seq.dim(s)) {
            return Err(SpecError::at(g, format!("no operation {b} in arity {s}")));
        }
        if entries.insert((g.x, g.inputs.clone()), value).is_some() {
            return Err(SpecError::at(g, "structure constant given twice"));
        }
    }
    let op = Arc::new(Operad::from_table(&o.name, seq.clone(), unit, entries).map_err(|e| SpecError::at(&o.name, e.to_string()))?);
    if let Some(v) = validate_operad(&op, cap).first() {
        let at = o
            .gammas
            .iter()
            .find(|g| v.keys.iter().any(|k| k.0 == g.x && k.1 == g.inputs))
            .map(|g| (g.line, g.col))
            .unwrap_or((o.name.line, o.name.col));
        return Err(SpecError {
            line: at.0,
            col: at.1,
            message: format!("{} fails at {}", v.axiom, v.instance),
        });
    }
    Ok(Arc::try_unwrap(op).unwrap_or_else(|a| (*a).clone()))
}

fn build_algebra(
    a: &AlgebraSpec,
    operads: &BTreeMap<String, Arc<Operad>>,
    complexes: &BTreeMap<String, NamedComplex>,
) -> Result<NamedAlgebra, SpecError> {
    let o_name = a.operad.as_ref().ok_or_else(|| SpecError::at(&a.name, "algebra needs an `operad`"))?;
    let o = operads
        .get(&o_name.value)
        .ok_or_else(|| SpecError::at(o_name, format!("unresolved operad {:?}", o_name.value)))?;
    let kind = a.kind.as_ref().ok_or_else(|| SpecError::at(&a.name, "algebra needs `free`, `trivial` or `table`"))?;
    let cname = match &kind.value {
        AlgebraKindSpec::Free { complex, .. } | AlgebraKindSpec::Trivial { complex } | AlgebraKindSpec::Table { complex } => complex,
    };
    let c = complexes
        .get(cname)
        .ok_or_else(|| SpecError::at(kind, format!("unresolved complex {cname:?}")))?;
    if !a.acts.is_empty() && !matches!(kind.value, AlgebraKindSpec::Table { .. }) {
        return Err(SpecError::at(&a.acts[0], "`act` entries need a table algebra"));
    }
    let field = o.field();
    let built = match &kind.value {
        AlgebraKindSpec::Free { cap, .. } => free_algebra(o, &c.complex, *cap),
        AlgebraKindSpec::Trivial { .. } => trivial_algebra(o, &c.complex),
        AlgebraKindSpec::Table { .. } => {
            let mut entries = HashMap::new();
            for e in &a.acts {
                let inputs = e
                    .inputs
                    .iter()
                    .map(|l| c.index(l).map(|k| k as u32).ok_or_else(|| SpecError::at(e, format!("unknown basis label {l:?}"))))
                    .collect::<Result<Vec<u32>, _>>()?;
                let v: Lin<u32> = labels_comb(field, &e.value.value, e, &|x| c.index(x))?
                    .into_iter()
                    .map(|(k, s)| (k as u32, s))
                    .collect();
                if entries.insert((e.op, inputs), v).is_some() {
                    return Err(SpecError::at(e, "action constant given twice"));
                }
            }
            table_algebra(&a.name, o, &c.complex, entries)
        }
    }
    .map_err(|e| SpecError::at(kind, e.to_string()))?;
    if matches!(kind.value, AlgebraKindSpec::Table { .. }) {
        if let Some(v) = validate_algebra(&built, VALIDATION_ARITY).first() {
            return Err(SpecError::at(kind, format!("{} fails at {}", v.axiom, v.instance)));
        }
    }
    Ok(NamedAlgebra {
        algebra: built,
        labels: c.labels.clone(),
    })
}

/// Evaluates an element expression in an algebra.
pub fn element(a: &NamedAlgebra, atom: &Atom, at: &Loc<impl Sized>) -> Result<Lin<u32>, SpecError> {
    let field = a.algebra.field();
    match atom {
        Atom::Name(n) => a
            .element(n)
            .map(|k| vec![(k, field.one())])
            .ok_or_else(|| SpecError::at(at, format!("unknown element {n:?} of {}", a.algebra.name()))),
        Atom::Index(k) if (*k as usize) < a.algebra.dim() => Ok(vec![(*k as u32, field.one())]),
        Atom::Index(k) => Err(SpecError::at(at, format!("no basis element {k}"))),
        Atom::Op(..) => Err(SpecError::at(at, "operations are not elements")),
        Atom::Apply(op, args) => {
            let r = args.len();
            if *op >= a.algebra.operad().seq().dim(r) {
                return Err(SpecError::at(at, format!("no operation {op} in arity {r}")));
            }
            let inputs = args.iter().map(|x| element(a, x, at)).collect::<Result<Vec<_>, _>>()?;
            Ok(a.algebra.act_lin(&vec![(*op, field.one())], &inputs))
        }
    }
}

pub fn element_comb(a: &NamedAlgebra, c: &Comb, at: &Loc<impl Sized>) -> Result<Lin<u32>, SpecError> {
    let field = a.algebra.field();
    let mut acc = Acc::new();
    for (r, x) in c {
        acc.add_scaled(&scalar(field, r, at)?, &element(a, x, at)?);
    }
    Ok(acc.finish())
}

fn build_map(m: &MapSpec, algebras: &BTreeMap<String, NamedAlgebra>) -> Result<AlgebraMap, SpecError> {
    let get = |x: &Option<Loc<String>>, what: &str| -> Result<&NamedAlgebra, SpecError> {
        let n = x.as_ref().ok_or_else(|| SpecError::at(&m.name, format!("map needs a `{what}`")))?;
        algebras
            .get(&n.value)
            .ok_or_else(|| SpecError::at(n, format!("unresolved algebra {:?}", n.value)))
    };
    let (s, t) = (get(&m.source, "source")?, get(&m.target, "target")?);
    let mut images = vec![None; s.labels.len()];
    for i in &m.images {
        let k = s
            .labels
            .iter()
            .position(|l| *l == i.0)
            .ok_or_else(|| SpecError::at(i, format!("unknown element {:?} of the source", i.0)))?;
        if images[k].is_some() {
            return Err(SpecError::at(i, format!("image of {:?} given twice", i.0)));
        }
        images[k] = Some(element_comb(t, &i.1, i)?);
    }
    let images: Vec<Lin<u32>> = images.into_iter().map(Option::unwrap_or_default).collect();
    if s.is_free() {
        return free_extension(&s.algebra, &t.algebra, &images).map_err(|e| SpecError::at(&m.name, e.to_string()));
    }
    if images.len() != s.algebra.dim() {
        return Err(SpecError::at(&m.name, "source basis and labels disagree"));
    }
    let f = AlgebraMap::new(&s.algebra, &t.algebra, images).map_err(|e| SpecError::at(&m.name, e.to_string()))?;
    if let Some(v) = validate_algebra_map(&f, VALIDATION_ARITY).first() {
        return Err(SpecError::at(&m.name, format!("{} fails at {}", v.axiom, v.instance)));
    }
    Ok(f)
}

fn insert<T>(map: &mut BTreeMap<String, T>, name: &Loc<String>, v: T, errors: &mut Vec<SpecError>) {
    if map.contains_key(&name.value) {
        errors.push(SpecError::at(name, format!("{:?} defined twice", name.value)));
    } else {
        map.insert(name.value.clone(), v);
    }
}

/// Resolves names in dependency order and validates every object.
pub fn resolve(spec: &SpecFile, field_override: Option<Field>) -> Result<Env, Vec<SpecError>> {
    let field = field_override.or(spec.settings.field.as_ref().map(|f| f.value)).unwrap_or(Field::Q);
    let cap = spec.settings.arity_cap.as_ref().map_or(VALIDATION_ARITY, |c| c.value.min(4)).max(2);
    let mut errors = Vec::new();
    let mut env = Env {
        field,
        complexes: BTreeMap::new(),
        symseqs: BTreeMap::new(),
        operads: BTreeMap::new(),
        algebras: BTreeMap::new(),
        maps: BTreeMap::new(),
    };
    macro_rules! pass {
        ($variant:ident, $x:ident => $build:expr, $store:ident) => {
            for s in &spec.sections {
                if let Section::$variant($x) = s {
                    match $build {
                        Ok(v) => insert(&mut env.$store, &$x.name, v, &mut errors),
                        Err(e) => errors.push(e),
                    }
                }
            }
        };
    }
    pass!(Complex, c => build_complex(field, c), complexes);
    pass!(SymSeq, s => build_symseq(field, s, &env.complexes), symseqs);
    pass!(Operad, o => build_operad(field, o, &env.symseqs, cap).map(Arc::new), operads);
    pass!(Algebra, a => build_algebra(a, &env.operads, &env.complexes), algebras);
    pass!(Map, m => build_map(m, &env.algebras), maps);
    let mut job_names = BTreeMap::new();
    for j in spec.jobs() {
        insert(&mut job_names, &j.name, (), &mut errors);
    }
    if errors.is_empty() {
        Ok(env)
    } else {
        errors.sort_by_key(|e| (e.line, e.col));
        Err(errors)
    }
}
