//! The specification file format: a header of settings followed by
//! `[kind name]` sections of line statements.
//!
//! ```text
//! field = Q
//! degree_cap = 8
//!
//! [complex V]
//! gen x 2
//! gen y 3
//! d y = 0
//!
//! [operad O]
//! builtin com
//!
//! [algebra A]
//! operad O
//! free V 9
//!
//! [job tq-of-a]
//! kind tq
//! algebra = A
//! expect betti = 2:1 3:1
//! ```

use std::fmt;

use num_rational::Rational64;
use num_traits::{One, Signed};
use opcalc::exactlin::Field;

pub type Rat = Rational64;

/// A value with the position of the statement that produced it. Positions
/// do not take part in equality.
#[derive(Clone, Debug)]
pub struct Loc<T> {
    pub line: usize,
    pub col: usize,
    pub value: T,
}

impl<T: PartialEq> PartialEq for Loc<T> {
    fn eq(&self, o: &Self) -> bool {
        self.value == o.value
    }
}

impl<T> std::ops::Deref for Loc<T> {
    type Target = T;
    fn deref(&self) -> &T {
        &self.value
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl SpecError {
    pub fn at<T>(loc: &Loc<T>, message: impl Into<String>) -> Self {
        SpecError {
            line: loc.line,
            col: loc.col,
            message: message.into(),
        }
    }
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

/// A basis element, operation or algebra element in a linear combination.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Atom {
    Name(String),
    Index(u64),
    /// `arity.index`
    Op(usize, u64),
    /// `op[a, b, …]`: the action of an operation on elements.
    Apply(u64, Vec<Atom>),
}

pub type Comb = Vec<(Rat, Atom)>;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Settings {
    pub field: Option<Loc<Field>>,
    pub degree_cap: Option<Loc<i32>>,
    pub arity_cap: Option<Loc<usize>>,
    pub bar_cap: Option<Loc<usize>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexSpec {
    pub name: Loc<String>,
    pub gens: Vec<Loc<(String, i32)>>,
    pub diffs: Vec<Loc<(String, Comb)>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LevelSpec {
    Zero,
    Trivial,
    Regular,
    Complex(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TailSpec {
    Zero,
    Trivial,
    Regular,
    Unknown,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Swap {
    pub arity: usize,
    pub i: usize,
    pub label: String,
    pub image: Comb,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymSeqSpec {
    pub name: Loc<String>,
    pub levels: Vec<Loc<(usize, LevelSpec)>>,
    pub swaps: Vec<Loc<Swap>>,
    pub tail: Option<Loc<TailSpec>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Builtin {
    pub name: String,
    pub m: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GammaEntry {
    pub x: u64,
    pub inputs: Vec<(usize, u64)>,
    pub value: Comb,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OperadSpec {
    pub name: Loc<String>,
    pub builtin: Option<Loc<Builtin>>,
    pub seq: Option<Loc<String>>,
    pub unit: Option<Loc<Comb>>,
    pub gammas: Vec<Loc<GammaEntry>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlgebraKindSpec {
    Free { complex: String, cap: i32 },
    Trivial { complex: String },
    Table { complex: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ActEntry {
    pub op: u64,
    pub inputs: Vec<String>,
    pub value: Comb,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraSpec {
    pub name: Loc<String>,
    pub operad: Option<Loc<String>>,
    pub kind: Option<Loc<AlgebraKindSpec>>,
    pub acts: Vec<Loc<ActEntry>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MapSpec {
    pub name: Loc<String>,
    pub source: Option<Loc<String>>,
    pub target: Option<Loc<String>>,
    pub images: Vec<Loc<(String, Comb)>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct JobSpec {
    pub name: Loc<String>,
    pub kind: Option<Loc<String>>,
    pub params: Vec<Loc<(String, String)>>,
    pub expects: Vec<Loc<(String, String)>>,
}

impl JobSpec {
    pub fn param(&self, key: &str) -> Option<&Loc<(String, String)>> {
        self.params.iter().find(|p| p.0 == key)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Section {
    Complex(ComplexSpec),
    SymSeq(SymSeqSpec),
    Operad(OperadSpec),
    Algebra(AlgebraSpec),
    Map(MapSpec),
    Job(JobSpec),
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SpecFile {
    pub settings: Settings,
    pub sections: Vec<Section>,
}

impl SpecFile {
    pub fn jobs(&self) -> impl Iterator<Item = &JobSpec> {
        self.sections.iter().filter_map(|s| match s {
            Section::Job(j) => Some(j),
            _ => None,
        })
    }

    /// Appends the sections of another file, keeping this file's settings.
    pub fn extend(&mut self, other: SpecFile) {
        self.sections.extend(other.sections);
    }
}

pub fn parse_field(s: &str) -> Result<Field, String> {
    let s = s.trim();
    if s == "Q" {
        return Ok(Field::Q);
    }
    let p = s
        .strip_prefix("Fp:")
        .ok_or_else(|| format!("unknown field {s:?}; use Q or Fp:p"))?;
    let p: u32 = p.parse().map_err(|_| format!("bad prime {p:?}"))?;
    Field::prime(p).map_err(|e| e.to_string())
}

// ---------------------------------------------------------------- lexing

struct Cursor<'a> {
    s: &'a [u8],
    at: usize,
    line: usize,
    col0: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, msg: impl Into<String>) -> SpecError {
        SpecError {
            line: self.line,
            col: self.col0 + self.at,
            message: msg.into(),
        }
    }

    fn ws(&mut self) {
        while self.at < self.s.len() && self.s[self.at].is_ascii_whitespace() {
            self.at += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.at).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn done(&mut self) -> bool {
        self.peek().is_none()
    }

    fn digits(&mut self) -> Option<&'a str> {
        self.ws();
        let start = self.at;
        while self.at < self.s.len() && self.s[self.at].is_ascii_digit() {
            self.at += 1;
        }
        (self.at > start).then(|| std::str::from_utf8(&self.s[start..self.at]).unwrap())
    }

    fn ident(&mut self) -> Option<&'a str> {
        self.ws();
        let start = self.at;
        if self.at < self.s.len() && (self.s[self.at].is_ascii_alphabetic() || self.s[self.at] == b'_') {
            self.at += 1;
            while self.at < self.s.len() && is_label_char(self.s[self.at]) {
                self.at += 1;
            }
        }
        (self.at > start).then(|| std::str::from_utf8(&self.s[start..self.at]).unwrap())
    }

    fn number(&mut self) -> Result<u64, SpecError> {
        let d = self.digits().ok_or_else(|| self.err("expected a number"))?;
        d.parse().map_err(|_| self.err("number out of range"))
    }

    fn atom(&mut self) -> Result<Atom, SpecError> {
        if let Some(name) = self.ident() {
            return Ok(Atom::Name(name.to_string()));
        }
        let n = self.number()?;
        if self.s.get(self.at) == Some(&b'.') {
            self.at += 1;
            let b = self.number()?;
            return Ok(Atom::Op(n as usize, b));
        }
        if self.eat(b'[') {
            let mut args = vec![self.atom()?];
            while self.eat(b',') {
                args.push(self.atom()?);
            }
            if !self.eat(b']') {
                return Err(self.err("expected ']'"));
            }
            return Ok(Atom::Apply(n, args));
        }
        Ok(Atom::Index(n))
    }

    /// `[coef [*]] atom`; a lone number followed by `/` or `*` is a coefficient.
    fn term(&mut self, sign: i64) -> Result<(Rat, Atom), SpecError> {
        self.ws();
        let save = self.at;
        if let Some(n) = self.digits() {
            let n: i64 = n.parse().map_err(|_| self.err("coefficient out of range"))?;
            let mut c = Rat::from_integer(n);
            let is_coef = if self.s.get(self.at) == Some(&b'/') {
                self.at += 1;
                let d: i64 = self.number()? as i64;
                if d == 0 {
                    return Err(self.err("zero denominator"));
                }
                c = Rat::new(n, d);
                true
            } else {
                matches!(self.peek(), Some(b'*')) || matches!(self.peek(), Some(c) if c.is_ascii_alphabetic() || c == b'_')
            };
            if is_coef {
                self.eat(b'*');
                return Ok((c * sign, self.atom()?));
            }
            self.at = save;
        }
        Ok((Rat::from_integer(sign), self.atom()?))
    }

    fn comb(&mut self) -> Result<Comb, SpecError> {
        if self.peek() == Some(b'0') {
            let save = self.at;
            self.at += 1;
            if self.done() {
                return Ok(Vec::new());
            }
            self.at = save;
        }
        let mut out = Vec::new();
        let mut sign = if self.eat(b'-') { -1 } else { 1 };
        loop {
            out.push(self.term(sign)?);
            if self.eat(b'+') {
                sign = 1;
            } else if self.eat(b'-') {
                sign = -1;
            } else {
                break;
            }
        }
        if !self.done() {
            return Err(self.err("unexpected text after expression"));
        }
        Ok(out)
    }
}

fn is_label_char(c: u8) -> bool {
    c.is_ascii_alphanumeric() || c == b'_' || c == b'\''
}

/// Basis labels; these appear inside linear combinations.
fn is_label(s: &str) -> bool {
    let b = s.as_bytes();
    !b.is_empty() && (b[0].is_ascii_alphabetic() || b[0] == b'_') && b.iter().all(|c| is_label_char(*c))
}

/// Names of sections and parameters may also contain `-`.
fn is_name(s: &str) -> bool {
    let b = s.as_bytes();
    !b.is_empty() && (b[0].is_ascii_alphabetic() || b[0] == b'_') && b.iter().all(|c| is_label_char(*c) || *c == b'-')
}

// ---------------------------------------------------------------- parsing

struct Line<'a> {
    no: usize,
    /// Column of `text[0]`, 1-based.
    col: usize,
    text: &'a str,
}

impl<'a> Line<'a> {
    fn loc<T>(&self, value: T) -> Loc<T> {
        Loc {
            line: self.no,
            col: self.col,
            value,
        }
    }

    fn err(&self, msg: impl Into<String>) -> SpecError {
        SpecError {
            line: self.no,
            col: self.col,
            message: msg.into(),
        }
    }

    /// The keyword and the rest, with the rest's column.
    fn split(&self) -> (&'a str, Line<'a>) {
        let t = self.text;
        let end = t.find(char::is_whitespace).unwrap_or(t.len());
        let rest = &t[end..];
        let trimmed = rest.trim_start();
        (
            &t[..end],
            Line {
                no: self.no,
                col: self.col + end + (rest.len() - trimmed.len()),
                text: trimmed,
            },
        )
    }

    /// `lhs = rhs`.
    fn equation(&self) -> Result<(Line<'a>, Line<'a>), SpecError> {
        let k = self.text.find('=').ok_or_else(|| self.err("expected '='"))?;
        let lhs = self.text[..k].trim_end();
        let rhs_raw = &self.text[k + 1..];
        let rhs = rhs_raw.trim_start();
        Ok((
            Line {
                no: self.no,
                col: self.col,
                text: lhs,
            },
            Line {
                no: self.no,
                col: self.col + k + 1 + (rhs_raw.len() - rhs.len()),
                text: rhs,
            },
        ))
    }

    fn cursor(&self) -> Cursor<'a> {
        Cursor {
            s: self.text.as_bytes(),
            at: 0,
            line: self.no,
            col0: self.col,
        }
    }

    fn words(&self) -> Vec<&'a str> {
        self.text.split_whitespace().collect()
    }

    fn name(&self) -> Result<String, SpecError> {
        match self.words().as_slice() {
            [w] if is_name(w) => Ok(w.to_string()),
            _ => Err(self.err(format!("expected a name, got {:?}", self.text))),
        }
    }

    fn label(&self) -> Result<String, SpecError> {
        match self.words().as_slice() {
            [w] if is_label(w) => Ok(w.to_string()),
            _ => Err(self.err(format!("expected a basis label, got {:?}", self.text))),
        }
    }

    fn int<T: std::str::FromStr>(&self, what: &str) -> Result<T, SpecError> {
        self.text.trim().parse().map_err(|_| self.err(format!("expected {what}, got {:?}", self.text)))
    }
}

fn parse_comb(l: &Line<'_>) -> Result<Comb, SpecError> {
    l.cursor().comb()
}

fn parse_setting(l: &Line<'_>, s: &mut Settings) -> Result<(), SpecError> {
    let (lhs, rhs) = l.equation()?;
    match lhs.text {
        "field" => s.field = Some(rhs.loc(parse_field(rhs.text).map_err(|e| rhs.err(e))?)),
        "degree_cap" => s.degree_cap = Some(rhs.loc(rhs.int("an integer")?)),
        "arity_cap" => s.arity_cap = Some(rhs.loc(rhs.int("a natural number")?)),
        "bar_cap" => s.bar_cap = Some(rhs.loc(rhs.int("a natural number")?)),
        other => return Err(lhs.err(format!("unknown setting {other:?}"))),
    }
    Ok(())
}

fn parse_complex(l: &Line<'_>, c: &mut ComplexSpec) -> Result<(), SpecError> {
    let (kw, rest) = l.split();
    match kw {
        "gen" => match rest.words().as_slice() {
            [label, deg] if is_label(label) => {
                let deg: i32 = deg.parse().map_err(|_| rest.err("expected a degree"))?;
                c.gens.push(l.loc((label.to_string(), deg)));
            }
            _ => return Err(rest.err("expected `gen LABEL DEGREE`")),
        },
        "d" => {
            let (lhs, rhs) = rest.equation()?;
            c.diffs.push(l.loc((lhs.label()?, parse_comb(&rhs)?)));
        }
        _ => return Err(l.err(format!("unknown statement {kw:?} in complex"))),
    }
    Ok(())
}

fn parse_symseq(l: &Line<'_>, s: &mut SymSeqSpec) -> Result<(), SpecError> {
    let (kw, rest) = l.split();
    match kw {
        "level" => {
            let w = rest.words();
            let r: usize = w.first().and_then(|x| x.parse().ok()).ok_or_else(|| rest.err("expected an arity"))?;
            let spec = match &w[1..] {
                ["zero"] => LevelSpec::Zero,
                ["trivial"] => LevelSpec::Trivial,
                ["regular"] => LevelSpec::Regular,
                ["complex", name] if is_name(name) => LevelSpec::Complex(name.to_string()),
                _ => return Err(rest.err("expected zero, trivial, regular or `complex NAME`")),
            };
            s.levels.push(l.loc((r, spec)));
        }
        "swap" => {
            let (lhs, rhs) = rest.equation()?;
            match lhs.words().as_slice() {
                [r, i, label] if is_label(label) => {
                    let arity = r.parse().map_err(|_| lhs.err("expected an arity"))?;
                    let i = i.parse().map_err(|_| lhs.err("expected a generator index"))?;
                    s.swaps.push(l.loc(Swap {
                        arity,
                        i,
                        label: label.to_string(),
                        image: parse_comb(&rhs)?,
                    }));
                }
                _ => return Err(lhs.err("expected `swap ARITY I LABEL = …`")),
            }
        }
        "tail" => {
            let t = match rest.text {
                "zero" => TailSpec::Zero,
                "trivial" => TailSpec::Trivial,
                "regular" => TailSpec::Regular,
                "unknown" => TailSpec::Unknown,
                _ => return Err(rest.err("expected zero, trivial, regular or unknown")),
            };
            s.tail = Some(l.loc(t));
        }
        _ => return Err(l.err(format!("unknown statement {kw:?} in symseq"))),
    }
    Ok(())
}

fn parse_operad(l: &Line<'_>, o: &mut OperadSpec) -> Result<(), SpecError> {
    let (kw, rest) = l.split();
    match kw {
        "builtin" => {
            let b = match rest.words().as_slice() {
                [name] => Builtin {
                    name: name.to_string(),
                    m: None,
                },
                [name, m] => Builtin {
                    name: name.to_string(),
                    m: Some(m.parse().map_err(|_| rest.err("expected a truncation arity"))?),
                },
                _ => return Err(rest.err("expected `builtin NAME [M]`")),
            };
            o.builtin = Some(l.loc(b));
        }
        "seq" => o.seq = Some(l.loc(rest.name()?)),
        "unit" => o.unit = Some(l.loc(parse_comb(&rest)?)),
        "gamma" => {
            let (lhs, rhs) = rest.equation()?;
            let mut c = lhs.cursor();
            let x = c.number()?;
            if !c.eat(b';') {
                return Err(c.err("expected ';' after the outer operation"));
            }
            let mut inputs = Vec::new();
            while !c.done() {
                match c.atom()? {
                    Atom::Op(a, b) => inputs.push((a, b)),
                    _ => return Err(c.err("inputs are written ARITY.INDEX")),
                }
            }
            if inputs.is_empty() {
                return Err(c.err("gamma needs at least one input"));
            }
            o.gammas.push(l.loc(GammaEntry {
                x,
                inputs,
                value: parse_comb(&rhs)?,
            }));
        }
        _ => return Err(l.err(format!("unknown statement {kw:?} in operad"))),
    }
    Ok(())
}

fn parse_algebra(l: &Line<'_>, a: &mut AlgebraSpec) -> Result<(), SpecError> {
    let (kw, rest) = l.split();
    match kw {
        "operad" => a.operad = Some(l.loc(rest.name()?)),
        "free" => match rest.words().as_slice() {
            [c, cap] if is_name(c) => {
                let cap = cap.parse().map_err(|_| rest.err("expected a degree cap"))?;
                a.kind = Some(l.loc(AlgebraKindSpec::Free {
                    complex: c.to_string(),
                    cap,
                }));
            }
            _ => return Err(rest.err("expected `free COMPLEX CAP`")),
        },
        "trivial" => a.kind = Some(l.loc(AlgebraKindSpec::Trivial { complex: rest.name()? })),
        "table" => a.kind = Some(l.loc(AlgebraKindSpec::Table { complex: rest.name()? })),
        "act" => {
            let (lhs, rhs) = rest.equation()?;
            let mut c = lhs.cursor();
            let op = c.number()?;
            if !c.eat(b'(') {
                return Err(c.err("expected '('"));
            }
            let mut inputs = Vec::new();
            while !c.eat(b')') {
                match c.ident() {
                    Some(n) => inputs.push(n.to_string()),
                    None => return Err(c.err("expected a basis label or ')'")),
                }
                c.eat(b',');
            }
            if !c.done() {
                return Err(c.err("unexpected text after ')'"));
            }
            a.acts.push(l.loc(ActEntry {
                op,
                inputs,
                value: parse_comb(&rhs)?,
            }));
        }
        _ => return Err(l.err(format!("unknown statement {kw:?} in algebra"))),
    }
    Ok(())
}

fn parse_map(l: &Line<'_>, m: &mut MapSpec) -> Result<(), SpecError> {
    let (kw, rest) = l.split();
    match kw {
        "source" => m.source = Some(l.loc(rest.name()?)),
        "target" => m.target = Some(l.loc(rest.name()?)),
        "image" => {
            let (lhs, rhs) = rest.equation()?;
            m.images.push(l.loc((lhs.label()?, parse_comb(&rhs)?)));
        }
        _ => return Err(l.err(format!("unknown statement {kw:?} in map"))),
    }
    Ok(())
}

fn parse_job(l: &Line<'_>, j: &mut JobSpec) -> Result<(), SpecError> {
    let (kw, rest) = l.split();
    match kw {
        "kind" => j.kind = Some(l.loc(rest.name()?)),
        "expect" => {
            let (lhs, rhs) = rest.equation()?;
            j.expects.push(l.loc((lhs.name()?, normalize(rhs.text))));
        }
        _ => {
            let (lhs, rhs) = l.equation()?;
            let key = lhs.name()?;
            if j.params.iter().any(|p| p.0 == key) {
                return Err(lhs.err(format!("parameter {key:?} given twice")));
            }
            j.params.push(l.loc((key, normalize(rhs.text))));
        }
    }
    Ok(())
}

fn normalize(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Parses a whole file, collecting every located error.
pub fn parse(text: &str) -> Result<SpecFile, Vec<SpecError>> {
    let mut spec = SpecFile::default();
    let mut errors = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let no = k + 1;
        let body = raw.split('#').next().unwrap();
        let trimmed = body.trim_start();
        let col = body.len() - trimmed.len() + 1;
        let text = trimmed.trim_end();
        if text.is_empty() {
            continue;
        }
        let line = Line { no, col, text };
        if let Some(inner) = text.strip_prefix('[') {
            let Some(inner) = inner.strip_suffix(']') else {
                errors.push(line.err("unterminated section header"));
                continue;
            };
            let head = Line {
                no,
                col: col + 1,
                text: inner.trim(),
            };
            let (kind, rest) = head.split();
            let name = match rest.name() {
                Ok(n) => head.loc(n),
                Err(e) => {
                    errors.push(e);
                    continue;
                }
            };
            let section = match kind {
                "complex" => Section::Complex(ComplexSpec {
                    name,
                    gens: Vec::new(),
                    diffs: Vec::new(),
                }),
                "symseq" => Section::SymSeq(SymSeqSpec {
                    name,
                    levels: Vec::new(),
                    swaps: Vec::new(),
                    tail: None,
                }),
                "operad" => Section::Operad(OperadSpec {
                    name,
                    builtin: None,
                    seq: None,
                    unit: None,
                    gammas: Vec::new(),
                }),
                "algebra" => Section::Algebra(AlgebraSpec {
                    name,
                    operad: None,
                    kind: None,
                    acts: Vec::new(),
                }),
                "map" => Section::Map(MapSpec {
                    name,
                    source: None,
                    target: None,
                    images: Vec::new(),
                }),
                "job" => Section::Job(JobSpec {
                    name,
                    kind: None,
                    params: Vec::new(),
                    expects: Vec::new(),
                }),
                other => {
                    errors.push(head.err(format!("unknown section kind {other:?}")));
                    continue;
                }
            };
            spec.sections.push(section);
            continue;
        }
        let r = match spec.sections.last_mut() {
            None => parse_setting(&line, &mut spec.settings),
            Some(Section::Complex(c)) => parse_complex(&line, c),
            Some(Section::SymSeq(s)) => parse_symseq(&line, s),
            Some(Section::Operad(o)) => parse_operad(&line, o),
            Some(Section::Algebra(a)) => parse_algebra(&line, a),
            Some(Section::Map(m)) => parse_map(&line, m),
            Some(Section::Job(j)) => parse_job(&line, j),
        };
        if let Err(e) = r {
            errors.push(e);
        }
    }
    if errors.is_empty() {
        Ok(spec)
    } else {
        Err(errors)
    }
}

// ---------------------------------------------------------------- printing

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Name(n) => write!(f, "{n}"),
            Atom::Index(i) => write!(f, "{i}"),
            Atom::Op(a, b) => write!(f, "{a}.{b}"),
            Atom::Apply(op, args) => {
                write!(f, "{op}[")?;
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, "]")
            }
        }
    }
}

pub struct CombDisplay<'a>(pub &'a Comb);

impl fmt::Display for CombDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        for (k, (c, a)) in self.0.iter().enumerate() {
            let mag = c.abs();
            match (k, c.is_negative()) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if !mag.is_one() {
                write!(f, "{mag}*")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

fn comb(c: &Comb) -> CombDisplay<'_> {
    CombDisplay(c)
}

impl fmt::Display for SpecFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = &self.settings;
        if let Some(x) = &s.field {
            writeln!(f, "field = {}", x.value)?;
        }
        if let Some(x) = &s.degree_cap {
            writeln!(f, "degree_cap = {}", x.value)?;
        }
        if let Some(x) = &s.arity_cap {
            writeln!(f, "arity_cap = {}", x.value)?;
        }
        if let Some(x) = &s.bar_cap {
            writeln!(f, "bar_cap = {}", x.value)?;
        }
        for sec in &self.sections {
            writeln!(f)?;
            match sec {
                Section::Complex(c) => {
                    writeln!(f, "[complex {}]", c.name.value)?;
                    for g in &c.gens {
                        writeln!(f, "gen {} {}", g.0, g.1)?;
                    }
                    for d in &c.diffs {
                        writeln!(f, "d {} = {}", d.0, comb(&d.1))?;
                    }
                }
                Section::SymSeq(s) => {
                    writeln!(f, "[symseq {}]", s.name.value)?;
                    for l in &s.levels {
                        let spec = match &l.1 {
                            LevelSpec::Zero => "zero".to_string(),
                            LevelSpec::Trivial => "trivial".to_string(),
                            LevelSpec::Regular => "regular".to_string(),
                            LevelSpec::Complex(c) => format!("complex {c}"),
                        };
                        writeln!(f, "level {} {spec}", l.0)?;
                    }
                    for w in &s.swaps {
                        writeln!(f, "swap {} {} {} = {}", w.arity, w.i, w.label, comb(&w.image))?;
                    }
                    if let Some(t) = &s.tail {
                        let t = match t.value {
                            TailSpec::Zero => "zero",
                            TailSpec::Trivial => "trivial",
                            TailSpec::Regular => "regular",
                            TailSpec::Unknown => "unknown",
                        };
                        writeln!(f, "tail {t}")?;
                    }
                }
                Section::Operad(o) => {
                    writeln!(f, "[operad {}]", o.name.value)?;
                    if let Some(b) = &o.builtin {
                        match b.m {
                            Some(m) => writeln!(f, "builtin {} {m}", b.name)?,
                            None => writeln!(f, "builtin {}", b.name)?,
                        }
                    }
                    if let Some(s) = &o.seq {
                        writeln!(f, "seq {}", s.value)?;
                    }
                    if let Some(u) = &o.unit {
                        writeln!(f, "unit {}", comb(u))?;
                    }
                    for g in &o.gammas {
                        let ins: Vec<String> = g.inputs.iter().map(|(a, b)| format!("{a}.{b}")).collect();
                        writeln!(f, "gamma {} ; {} = {}", g.x, ins.join(" "), comb(&g.value.value))?;
                    }
                }
                Section::Algebra(a) => {
                    writeln!(f, "[algebra {}]", a.name.value)?;
                    if let Some(o) = &a.operad {
                        writeln!(f, "operad {}", o.value)?;
                    }
                    match a.kind.as_ref().map(|k| &k.value) {
                        Some(AlgebraKindSpec::Free { complex, cap }) => writeln!(f, "free {complex} {cap}")?,
                        Some(AlgebraKindSpec::Trivial { complex }) => writeln!(f, "trivial {complex}")?,
                        Some(AlgebraKindSpec::Table { complex }) => writeln!(f, "table {complex}")?,
                        None => {}
                    }
                    for e in &a.acts {
                        writeln!(f, "act {} ({}) = {}", e.op, e.inputs.join(", "), comb(&e.value.value))?;
                    }
                }
                Section::Map(m) => {
                    writeln!(f, "[map {}]", m.name.value)?;
                    if let Some(s) = &m.source {
                        writeln!(f, "source {}", s.value)?;
                    }
                    if let Some(t) = &m.target {
                        writeln!(f, "target {}", t.value)?;
                    }
                    for i in &m.images {
                        writeln!(f, "image {} = {}", i.0, comb(&i.1))?;
                    }
                }
                Section::Job(j) => {
                    writeln!(f, "[job {}]", j.name.value)?;
                    if let Some(k) = &j.kind {
                        writeln!(f, "kind {}", k.value)?;
                    }
                    for p in &j.params {
                        writeln!(f, "{} = {}", p.0, p.1)?;
                    }
                    for e in &j.expects {
                        writeln!(f, "expect {} = {}", e.0, e.1)?;
                    }
                }
            }
        }
        Ok(())
    }
}
