//! Scenario files: a line-oriented keyword grammar.
//!
//! ```text
//! # comment
//! SCENARIO identity-strict
//! DIMENSION 1
//! SEED 7
//! OBJECT t identity
//! COMMAND strict-br op=t x=[0.0] xstar=[1.0] eps=0.25 eta=0.3 lambda=0.5
//! ```
//!
//! `SEED` is optional (default 0). Objects take an optional `dim=<k>`
//! overriding the scenario dimension, and must be declared before use.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::value::{is_name, parse_value, Value};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("in {declaration}: {message}")]
    Semantic { declaration: String, message: String },
}

fn syntax<T>(line: usize, column: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError::Syntax {
        line,
        column,
        message: message.into(),
    })
}

fn semantic<T>(declaration: &str, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError::Semantic {
        declaration: declaration.to_string(),
        message: message.into(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    Function,
    Operator,
    Bifunction,
}

impl Category {
    fn label(self) -> &'static str {
        match self {
            Category::Function => "function",
            Category::Operator => "operator",
            Category::Bifunction => "bifunction",
        }
    }
}

/// Ordered `key=value` parameters.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Params(pub Vec<(String, Value)>);

impl Params {
    pub fn get(&self, key: &str) -> Option<&Value> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn num(&self, key: &str) -> Option<f64> {
        match self.get(key)? {
            Value::Num(v) => Some(*v),
            _ => None,
        }
    }

    pub fn num_or(&self, key: &str, default: f64) -> f64 {
        self.num(key).unwrap_or(default)
    }

    pub fn vector(&self, key: &str) -> Option<Vec<f64>> {
        match self.get(key)? {
            Value::Num(v) => Some(vec![*v]),
            Value::Vector(v) => Some(v.clone()),
            _ => None,
        }
    }

    pub fn matrix(&self, key: &str) -> Option<Vec<Vec<f64>>> {
        match self.get(key)? {
            Value::Matrix(m) => Some(m.clone()),
            Value::Vector(v) if v.len() == 1 => Some(vec![v.clone()]),
            Value::Num(v) => Some(vec![vec![*v]]),
            _ => None,
        }
    }

    pub fn name(&self, key: &str) -> Option<&str> {
        match self.get(key)? {
            Value::Name(n) => Some(n),
            _ => None,
        }
    }

    pub fn names(&self, key: &str) -> Option<Vec<String>> {
        match self.get(key)? {
            Value::Names(ns) => Some(ns.clone()),
            Value::Name(n) => Some(vec![n.clone()]),
            _ => None,
        }
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.0 {
            write!(f, " {k}={v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Declaration {
    pub name: String,
    pub kind: String,
    pub dim: Option<usize>,
    pub params: Params,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Verb {
    CheckFamily,
    FitzEval,
    SigmaEval,
    Conjugate,
    DualCondition,
    FenchelDuality,
    EpsTest,
    EnlargementTest,
    BrStep,
    BrRefine,
    StrictBr,
    MaximalityProbe,
    TranslateCheck,
}

impl Verb {
    pub const ALL: [Verb; 13] = [
        Verb::CheckFamily,
        Verb::FitzEval,
        Verb::SigmaEval,
        Verb::Conjugate,
        Verb::DualCondition,
        Verb::FenchelDuality,
        Verb::EpsTest,
        Verb::EnlargementTest,
        Verb::BrStep,
        Verb::BrRefine,
        Verb::StrictBr,
        Verb::MaximalityProbe,
        Verb::TranslateCheck,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Verb::CheckFamily => "check-family",
            Verb::FitzEval => "fitz-eval",
            Verb::SigmaEval => "sigma-eval",
            Verb::Conjugate => "conjugate",
            Verb::DualCondition => "dual-condition",
            Verb::FenchelDuality => "fenchel-duality",
            Verb::EpsTest => "eps-test",
            Verb::EnlargementTest => "enlargement-test",
            Verb::BrStep => "br-step",
            Verb::BrRefine => "br-refine",
            Verb::StrictBr => "strict-br",
            Verb::MaximalityProbe => "maximality-probe",
            Verb::TranslateCheck => "translate-check",
        }
    }

    pub fn parse(s: &str) -> Option<Verb> {
        Verb::ALL.into_iter().find(|v| v.as_str() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Command {
    pub verb: Verb,
    pub params: Params,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub dimension: usize,
    pub seed: u64,
    pub objects: Vec<Declaration>,
    pub command: Command,
}

impl Scenario {
    pub fn object(&self, name: &str) -> Option<&Declaration> {
        self.objects.iter().find(|d| d.name == name)
    }

    /// Dimension of a declared object.
    pub fn object_dim(&self, name: &str) -> Option<usize> {
        let d = self.object(name)?;
        if let Some(k) = d.dim {
            return Some(k);
        }
        if d.kind == "sum" {
            let parts = d.params.names("parts")?;
            return parts.iter().map(|p| self.object_dim(p)).sum();
        }
        Some(match kind_spec(&d.kind)?.fixed_dim {
            Some(k) => k,
            None => self.dimension,
        })
    }

    pub fn category(&self, name: &str) -> Option<Category> {
        Some(kind_spec(&self.object(name)?.kind)?.category)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SCENARIO {}", self.name)?;
        writeln!(f, "DIMENSION {}", self.dimension)?;
        writeln!(f, "SEED {}", self.seed)?;
        for d in &self.objects {
            write!(f, "OBJECT {} {}", d.name, d.kind)?;
            if let Some(k) = d.dim {
                write!(f, " dim={k}")?;
            }
            writeln!(f, "{}", d.params)?;
        }
        writeln!(f, "COMMAND {}{}", self.command.verb.as_str(), self.command.params)
    }
}

// ---------------------------------------------------------------------------
// Schemas

/// Length of a vector parameter relative to the dimension `n` of its owner.
#[derive(Debug, Clone, Copy)]
enum Len {
    N,
    TwoN,
    /// `n` for functions, `2n` for bifunctions (conjugate arguments).
    OfTarget,
}

#[derive(Debug, Clone, Copy)]
enum Ty {
    Num,
    Count,
    Vec(Len),
    Square(Len),
    /// Rows of length `n`, any number of rows.
    Rows,
    Ref(&'static [Category]),
    Refs(Category),
}

#[derive(Clone, Copy)]
struct KeySpec {
    key: &'static str,
    ty: Ty,
    required: bool,
}

const fn req(key: &'static str, ty: Ty) -> KeySpec {
    KeySpec { key, ty, required: true }
}

const fn opt(key: &'static str, ty: Ty) -> KeySpec {
    KeySpec { key, ty, required: false }
}

pub(crate) struct KindSpec {
    kind: &'static str,
    category: Category,
    fixed_dim: Option<usize>,
    keys: &'static [KeySpec],
}

const F: &[Category] = &[Category::Function];
const OP: &[Category] = &[Category::Operator];
const B: &[Category] = &[Category::Bifunction];
const FB: &[Category] = &[Category::Function, Category::Bifunction];

const fn kind(kind: &'static str, category: Category, keys: &'static [KeySpec]) -> KindSpec {
    KindSpec {
        kind,
        category,
        fixed_dim: None,
        keys,
    }
}

const GRID_KEYS: [KeySpec; 2] = [req("r", Ty::Num), req("m", Ty::Count)];

static KINDS: &[KindSpec] = &[
    kind("half-square", Category::Function, &[]),
    kind(
        "quadratic",
        Category::Function,
        &[req("a", Ty::Square(Len::N)), opt("b", Ty::Vec(Len::N)), opt("c", Ty::Num)],
    ),
    kind("abs", Category::Function, &[]),
    kind(
        "box-indicator",
        Category::Function,
        &[req("lo", Ty::Vec(Len::N)), req("hi", Ty::Vec(Len::N))],
    ),
    kind(
        "box-support",
        Category::Function,
        &[req("lo", Ty::Vec(Len::N)), req("hi", Ty::Vec(Len::N))],
    ),
    kind("point-indicator", Category::Function, &[req("p", Ty::Vec(Len::N))]),
    kind(
        "shifted",
        Category::Function,
        &[
            req("base", Ty::Ref(F)),
            opt("shift", Ty::Vec(Len::N)),
            opt("tilt", Ty::Vec(Len::N)),
            opt("offset", Ty::Num),
        ],
    ),
    kind("sum", Category::Function, &[req("parts", Ty::Refs(Category::Function))]),
    kind("fn-grid", Category::Function, &[req("base", Ty::Ref(F)), GRID_KEYS[0], GRID_KEYS[1]]),
    kind("identity", Category::Operator, &[]),
    kind(
        "affine",
        Category::Operator,
        &[req("a", Ty::Square(Len::N)), opt("b", Ty::Vec(Len::N))],
    ),
    KindSpec {
        kind: "rotation2d",
        category: Category::Operator,
        fixed_dim: Some(2),
        keys: &[],
    },
    kind("subdiff", Category::Operator, &[req("f", Ty::Ref(F))]),
    kind("graph-points", Category::Operator, &[req("x", Ty::Rows), req("xstar", Ty::Rows)]),
    kind("graph-sample", Category::Operator, &[req("base", Ty::Ref(OP)), GRID_KEYS[0], GRID_KEYS[1]]),
    kind("separable", Category::Bifunction, &[req("f", Ty::Ref(F))]),
    kind("fitzpatrick", Category::Bifunction, &[req("op", Ty::Ref(OP))]),
    kind("sigma", Category::Bifunction, &[req("op", Ty::Ref(OP))]),
    kind(
        "quadratic-form",
        Category::Bifunction,
        &[req("q", Ty::Square(Len::TwoN)), opt("l", Ty::Vec(Len::TwoN)), opt("k", Ty::Num)],
    ),
    kind("pairing", Category::Bifunction, &[opt("shift", Ty::Num)]),
    kind("bi-grid", Category::Bifunction, &[req("base", Ty::Ref(B)), GRID_KEYS[0], GRID_KEYS[1]]),
    kind(
        "translated",
        Category::Bifunction,
        &[req("base", Ty::Ref(B)), req("z", Ty::Vec(Len::N)), req("zstar", Ty::Vec(Len::N))],
    ),
];

pub(crate) fn kind_spec(kind: &str) -> Option<&'static KindSpec> {
    KINDS.iter().find(|k| k.kind == kind)
}

/// Names of all object kinds, for help text.
pub fn kind_names() -> impl Iterator<Item = &'static str> {
    KINDS.iter().map(|k| k.kind)
}

const POINT: [KeySpec; 2] = [req("x", Ty::Vec(Len::N)), req("xstar", Ty::Vec(Len::N))];

static VERBS: &[(Verb, &[KeySpec])] = &[
    (Verb::CheckFamily, &[req("h", Ty::Ref(B)), req("op", Ty::Ref(OP)), opt("r", Ty::Num), opt("m", Ty::Count)]),
    (Verb::FitzEval, &[req("op", Ty::Ref(OP)), POINT[0], POINT[1]]),
    (Verb::SigmaEval, &[req("op", Ty::Ref(OP)), POINT[0], POINT[1]]),
    (Verb::Conjugate, &[req("of", Ty::Ref(FB)), req("at", Ty::Vec(Len::OfTarget))]),
    (Verb::DualCondition, &[req("h", Ty::Ref(B)), opt("r", Ty::Num), opt("m", Ty::Count)]),
    (Verb::FenchelDuality, &[req("f", Ty::Ref(F)), req("g", Ty::Ref(F))]),
    (
        Verb::EpsTest,
        &[req("f", Ty::Ref(F)), req("x", Ty::Vec(Len::N)), req("s", Ty::Vec(Len::N)), req("eps", Ty::Num)],
    ),
    (Verb::EnlargementTest, &[req("op", Ty::Ref(OP)), POINT[0], POINT[1], req("eps", Ty::Num)]),
    (Verb::BrStep, &[req("h", Ty::Ref(B)), POINT[0], POINT[1], req("eps", Ty::Num)]),
    (
        Verb::BrRefine,
        &[req("h", Ty::Ref(B)), POINT[0], POINT[1], req("eps", Ty::Num), opt("lambda", Ty::Num)],
    ),
    (
        Verb::StrictBr,
        &[
            req("op", Ty::Ref(OP)),
            POINT[0],
            POINT[1],
            req("eps", Ty::Num),
            req("eta", Ty::Num),
            req("lambda", Ty::Num),
        ],
    ),
    (
        Verb::MaximalityProbe,
        &[req("h", Ty::Ref(B)), req("op", Ty::Ref(OP)), POINT[0], POINT[1], opt("budget", Ty::Count)],
    ),
    (
        Verb::TranslateCheck,
        &[
            req("h", Ty::Ref(B)),
            req("z", Ty::Vec(Len::N)),
            req("zstar", Ty::Vec(Len::N)),
            opt("r", Ty::Num),
            opt("count", Ty::Count),
        ],
    ),
];

fn verb_keys(verb: Verb) -> &'static [KeySpec] {
    VERBS.iter().find(|(v, _)| *v == verb).map(|(_, k)| *k).expect("every verb has a schema")
}

// ---------------------------------------------------------------------------
// Validation

struct Checker<'a> {
    scenario: &'a Scenario,
    /// Objects declared so far.
    known: usize,
    decl: String,
}

impl Checker<'_> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        semantic(&self.decl, message)
    }

    fn lookup(&self, name: &str) -> Result<&Declaration, ParseError> {
        match self.scenario.objects[..self.known].iter().find(|d| d.name == name) {
            Some(d) => Ok(d),
            None => semantic(name, format!("undeclared object {name:?} referenced by {}", self.decl)),
        }
    }

    /// Checks the parameters against a schema. `n` is the owner's
    /// dimension, or `None` for commands, whose dimension comes from the
    /// first referenced object.
    fn check(&self, keys: &[KeySpec], params: &Params, mut n: Option<usize>) -> Result<(), ParseError> {
        for (k, _) in &params.0 {
            if !keys.iter().any(|s| s.key == *k) {
                return self.err(format!("unknown parameter {k:?}"));
            }
        }
        for s in keys {
            if s.required && params.get(s.key).is_none() {
                return self.err(format!("missing required parameter {:?}", s.key));
            }
        }
        let mut target = None;
        // References first, so that a command's dimension is known before
        // its points are checked.
        for s in keys {
            let Some(v) = params.get(s.key) else { continue };
            match s.ty {
                Ty::Ref(cats) => {
                    let Value::Name(name) = v else {
                        return self.err(format!("{}: expected an object name, found a {}", s.key, v.type_name()));
                    };
                    let d = self.lookup(name)?;
                    let cat = kind_spec(&d.kind).map(|k| k.category);
                    if !cat.is_some_and(|c| cats.contains(&c)) {
                        let want: Vec<_> = cats.iter().map(|c| c.label()).collect();
                        return self.err(format!("{}: {name:?} is not a {}", s.key, want.join(" or ")));
                    }
                    let dim = self.scenario.object_dim(name).unwrap_or(self.scenario.dimension);
                    match n {
                        None => n = Some(dim),
                        Some(k) if k != dim => {
                            return self.err(format!("{}: {name:?} has dimension {dim}, expected {k}", s.key));
                        }
                        _ => {}
                    }
                    target.get_or_insert(cat);
                }
                Ty::Refs(cat) => {
                    let names = match v {
                        Value::Names(ns) => ns.clone(),
                        Value::Name(n) => vec![n.clone()],
                        _ => return self.err(format!("{}: expected a list of object names", s.key)),
                    };
                    if names.is_empty() {
                        return self.err(format!("{}: empty list", s.key));
                    }
                    for name in &names {
                        let d = self.lookup(name)?;
                        if kind_spec(&d.kind).map(|k| k.category) != Some(cat) {
                            return self.err(format!("{}: {name:?} is not a {}", s.key, cat.label()));
                        }
                    }
                }
                _ => {}
            }
        }
        let n = n.unwrap_or(self.scenario.dimension);
        let len = |l: Len| match l {
            Len::N => n,
            Len::TwoN => 2 * n,
            Len::OfTarget => match target.flatten() {
                Some(Category::Bifunction) => 2 * n,
                _ => n,
            },
        };
        for s in keys {
            let Some(v) = params.get(s.key) else { continue };
            match s.ty {
                Ty::Num => {
                    if !matches!(v, Value::Num(_)) {
                        return self.err(format!("{}: expected a number, found a {}", s.key, v.type_name()));
                    }
                }
                Ty::Count => match v {
                    Value::Num(c) if *c >= 1.0 && c.fract() == 0.0 && c.is_finite() => {}
                    _ => return self.err(format!("{}: expected a positive integer", s.key)),
                },
                Ty::Vec(l) => {
                    let want = len(l);
                    let got = match v {
                        Value::Vector(x) => x.len(),
                        Value::Num(_) => 1,
                        _ => return self.err(format!("{}: expected a vector, found a {}", s.key, v.type_name())),
                    };
                    if got != want {
                        return self.err(format!("{}: dimension mismatch, expected length {want}, found {got}", s.key));
                    }
                }
                Ty::Square(l) => {
                    let want = len(l);
                    let Some(m) = params.matrix(s.key) else {
                        return self.err(format!("{}: expected a matrix, found a {}", s.key, v.type_name()));
                    };
                    if m.len() != want || m.iter().any(|r| r.len() != want) {
                        return self.err(format!("{}: dimension mismatch, expected a {want}x{want} matrix", s.key));
                    }
                }
                Ty::Rows => {
                    let Some(m) = params.matrix(s.key) else {
                        return self.err(format!("{}: expected a matrix, found a {}", s.key, v.type_name()));
                    };
                    if m.is_empty() || m.iter().any(|r| r.len() != n) {
                        return self.err(format!("{}: dimension mismatch, expected nonempty rows of length {n}", s.key));
                    }
                }
                Ty::Ref(_) | Ty::Refs(_) => {}
            }
        }
        Ok(())
    }
}

/// Checks references, dimensions and required parameters.
pub fn validate(s: &Scenario) -> Result<(), ParseError> {
    if s.dimension == 0 {
        return semantic("DIMENSION", "dimension must be positive");
    }
    let mut seen = BTreeMap::new();
    for (i, d) in s.objects.iter().enumerate() {
        if !is_name(&d.name) || Verb::parse(&d.name).is_some() {
            return semantic(&d.name, "invalid object name");
        }
        if seen.insert(d.name.as_str(), i).is_some() {
            return semantic(&d.name, "duplicate object name");
        }
        let Some(spec) = kind_spec(&d.kind) else {
            return semantic(&d.name, format!("unknown object kind {:?}", d.kind));
        };
        let c = Checker {
            scenario: s,
            known: i,
            decl: d.name.clone(),
        };
        if d.dim == Some(0) {
            return c.err("dim must be positive");
        }
        let n = s.object_dim(&d.name).unwrap_or(s.dimension);
        if let Some(k) = spec.fixed_dim {
            if n != k {
                return c.err(format!("dimension mismatch: {} requires dimension {k}, found {n}", d.kind));
            }
        }
        if d.kind == "sum" {
            c.check(spec.keys, &d.params, None)?;
            let parts: Option<usize> = d
                .params
                .names("parts")
                .unwrap_or_default()
                .iter()
                .map(|p| s.object_dim(p))
                .sum();
            if parts != Some(n) {
                return c.err(format!("dimension mismatch: parts add up to {parts:?}, declared {n}"));
            }
        } else {
            c.check(spec.keys, &d.params, Some(n))?;
        }
        if matches!(d.kind.as_str(), "graph-points") {
            let (x, xs) = (d.params.matrix("x"), d.params.matrix("xstar"));
            if x.map(|m| m.len()) != xs.map(|m| m.len()) {
                return c.err("x and xstar must have the same number of rows");
            }
        }
    }
    let c = Checker {
        scenario: s,
        known: s.objects.len(),
        decl: format!("COMMAND {}", s.command.verb.as_str()),
    };
    c.check(verb_keys(s.command.verb), &s.command.params, None)
}

// ---------------------------------------------------------------------------
// Parsing

/// Splits a line into tokens on whitespace outside brackets, returning
/// each token with its 1-based column.
fn tokenize(line: &str, lineno: usize) -> Result<Vec<(usize, String)>, ParseError> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut cur = String::new();
    let mut start = 0;
    let mut open_col = 0;
    for (i, c) in line.chars().enumerate() {
        let col = i + 1;
        if c.is_whitespace() && depth == 0 {
            if !cur.is_empty() {
                out.push((start, std::mem::take(&mut cur)));
            }
            continue;
        }
        if cur.is_empty() {
            start = col;
        }
        match c {
            '[' => {
                if depth == 0 {
                    open_col = col;
                }
                depth += 1;
            }
            ']' => {
                if depth == 0 {
                    return syntax(lineno, col, "unmatched ']'");
                }
                depth -= 1;
            }
            _ => {}
        }
        cur.push(c);
    }
    if depth > 0 {
        return syntax(lineno, open_col, "unclosed '['");
    }
    if !cur.is_empty() {
        out.push((start, cur));
    }
    Ok(out)
}

fn parse_params(tokens: &[(usize, String)], lineno: usize) -> Result<(Params, Option<usize>), ParseError> {
    let mut params = Params::default();
    let mut dim = None;
    for (col, tok) in tokens {
        let Some((key, text)) = tok.split_once('=') else {
            return syntax(lineno, *col, format!("expected key=value, found {tok:?}"));
        };
        if !is_name(key) {
            return syntax(lineno, *col, format!("invalid parameter name {key:?}"));
        }
        let vcol = col + key.chars().count() + 1;
        if key == "dim" {
            match text.parse::<usize>() {
                Ok(k) if dim.is_none() => dim = Some(k),
                Ok(_) => return syntax(lineno, *col, "duplicate parameter \"dim\""),
                Err(_) => return syntax(lineno, vcol, "dim must be a nonnegative integer"),
            }
            continue;
        }
        if params.get(key).is_some() {
            return syntax(lineno, *col, format!("duplicate parameter {key:?}"));
        }
        let value = parse_value(text).or_else(|e| syntax(lineno, vcol + e.offset, e.message))?;
        params.0.push((key.to_string(), value));
    }
    Ok((params, dim))
}

/// Parses and validates a scenario.
pub fn parse_scenario(text: &str) -> Result<Scenario, ParseError> {
    let mut name = None;
    let mut dimension = None;
    let mut seed = None;
    let mut objects = Vec::new();
    let mut command = None;
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.split('#').next().unwrap_or("");
        let tokens = tokenize(line, lineno)?;
        let Some(((kcol, keyword), rest)) = tokens.split_first() else {
            continue;
        };
        let once = |slot: bool| {
            if slot {
                syntax(lineno, *kcol, format!("{keyword} given twice"))
            } else {
                Ok(())
            }
        };
        let single = |rest: &[(usize, String)]| -> Result<(usize, String), ParseError> {
            match rest {
                [one] => Ok(one.clone()),
                [] => syntax(lineno, kcol + keyword.len(), format!("{keyword} takes one argument")),
                [_, (c, _), ..] => syntax(lineno, *c, format!("{keyword} takes one argument")),
            }
        };
        match keyword.as_str() {
            "SCENARIO" => {
                once(name.is_some())?;
                name = Some(single(rest)?.1);
            }
            "DIMENSION" => {
                once(dimension.is_some())?;
                let (c, t) = single(rest)?;
                dimension = Some(t.parse::<usize>().or_else(|_| syntax(lineno, c, "dimension must be a positive integer"))?);
            }
            "SEED" => {
                once(seed.is_some())?;
                let (c, t) = single(rest)?;
                seed = Some(t.parse::<u64>().or_else(|_| syntax(lineno, c, "seed must be a nonnegative integer"))?);
            }
            "OBJECT" => {
                let [(_, oname), (_, okind), params @ ..] = rest else {
                    return syntax(lineno, kcol + keyword.len(), "OBJECT needs a name and a kind");
                };
                let (params, dim) = parse_params(params, lineno)?;
                objects.push(Declaration {
                    name: oname.clone(),
                    kind: okind.clone(),
                    dim,
                    params,
                });
            }
            "COMMAND" => {
                once(command.is_some())?;
                let [(vcol, verb), params @ ..] = rest else {
                    return syntax(lineno, kcol + keyword.len(), "COMMAND needs a verb");
                };
                let Some(verb) = Verb::parse(verb) else {
                    return syntax(lineno, *vcol, format!("unknown command {verb:?}"));
                };
                let (params, dim) = parse_params(params, lineno)?;
                if dim.is_some() {
                    return semantic(&format!("COMMAND {}", verb.as_str()), "commands take no dim parameter");
                }
                command = Some(Command { verb, params });
            }
            other => return syntax(lineno, *kcol, format!("unknown keyword {other:?}")),
        }
    }
    let s = Scenario {
        name: name.map_or_else(|| semantic("SCENARIO", "missing SCENARIO line"), Ok)?,
        dimension: dimension.map_or_else(|| semantic("DIMENSION", "missing DIMENSION line"), Ok)?,
        seed: seed.unwrap_or(0),
        objects,
        command: command.map_or_else(|| semantic("COMMAND", "missing COMMAND line"), Ok)?,
    };
    validate(&s)?;
    Ok(s)
}
