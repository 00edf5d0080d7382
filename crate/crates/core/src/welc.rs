//! Word equations with weighted length constraints over an abstract free
//! monoid, and their compilation into equations over `M`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::inverses::InverseTable;
use crate::monoid::Monoid;
use crate::words::{Letter, SpecialPresentation, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WelcError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("undeclared symbol `{0}`")]
    Undeclared(String),
    #[error("{given} weights given for rank {rank}")]
    RankMismatch { rank: usize, given: usize },
    #[error("system has rank {need} but only {have} basis words are available")]
    RankTooLarge { need: usize, have: usize },
    #[error("weights {system:?} do not match the monoid's basis weights {basis:?}")]
    WeightMismatch { system: Vec<usize>, basis: Vec<usize> },
    #[error("`{0}` is declared twice")]
    Duplicate(String),
}

/// A symbol of a WELC term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Sym {
    Var(usize),
    Gen(usize),
}

pub type Side = Vec<Sym>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WelcSystem {
    pub variables: Vec<String>,
    pub generators: Vec<String>,
    pub equations: Vec<(Side, Side)>,
    /// `(u, v)` means `|u| <= |v|` under the weights.
    pub constraints: Vec<(Side, Side)>,
    /// `None` means every generator has weight one.
    pub weights: Option<Vec<usize>>,
}

fn directives(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().flat_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("");
        line.split(';').map(move |d| (i + 1, d.trim())).filter(|(_, d)| !d.is_empty())
    })
}

fn split_directive(line: usize, d: &str) -> Result<(&str, &str), WelcError> {
    d.split_once(':')
        .map(|(k, v)| (k.trim(), v.trim()))
        .ok_or_else(|| WelcError::Syntax { line, message: format!("expected `key: value`, found `{d}`") })
}

impl WelcSystem {
    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn unit_weights(&self) -> bool {
        self.weights.as_ref().is_none_or(|w| w.iter().all(|&x| x == 1))
    }

    pub fn weight_vector(&self) -> Vec<usize> {
        self.weights.clone().unwrap_or_else(|| vec![1; self.rank()])
    }

    pub fn parse(text: &str) -> Result<Self, WelcError> {
        let mut sys = WelcSystem {
            variables: Vec::new(),
            generators: Vec::new(),
            equations: Vec::new(),
            constraints: Vec::new(),
            weights: None,
        };
        let mut pending = Vec::new();
        for (line, d) in directives(text) {
            let (key, val) = split_directive(line, d)?;
            match key {
                "vars" | "gens" => {
                    for name in val.split_whitespace() {
                        if sys.variables.iter().chain(&sys.generators).any(|n| n == name) {
                            return Err(WelcError::Duplicate(name.into()));
                        }
                        if key == "vars" { &mut sys.variables } else { &mut sys.generators }.push(name.into());
                    }
                }
                "weights" => {
                    let ws = val
                        .split_whitespace()
                        .map(|t| t.parse::<usize>().ok().filter(|&w| w >= 1))
                        .collect::<Option<Vec<_>>>()
                        .ok_or_else(|| WelcError::Syntax { line, message: "weights must be positive integers".into() })?;
                    sys.weights = Some(ws);
                }
                "eq" | "len" => pending.push((line, key, val)),
                _ => return Err(WelcError::Syntax { line, message: format!("unknown directive `{key}`") }),
            }
        }
        for (line, key, val) in pending {
            let sep = if key == "eq" { "=" } else { "<=" };
            let (l, r) = val
                .split_once(sep)
                .ok_or_else(|| WelcError::Syntax { line, message: format!("expected `{sep}`") })?;
            let pair = (sys.side(l)?, sys.side(r)?);
            if key == "eq" { &mut sys.equations } else { &mut sys.constraints }.push(pair);
        }
        if let Some(w) = &sys.weights {
            if w.len() != sys.rank() {
                return Err(WelcError::RankMismatch { rank: sys.rank(), given: w.len() });
            }
        }
        Ok(sys)
    }

    fn side(&self, text: &str) -> Result<Side, WelcError> {
        text.split_whitespace()
            .filter(|t| *t != "1")
            .map(|t| {
                if let Some(i) = self.variables.iter().position(|v| v == t) {
                    Ok(Sym::Var(i))
                } else if let Some(i) = self.generators.iter().position(|g| g == t) {
                    Ok(Sym::Gen(i))
                } else {
                    Err(WelcError::Undeclared(t.into()))
                }
            })
            .collect()
    }

    fn show_side(&self, s: &Side) -> String {
        if s.is_empty() {
            return "1".into();
        }
        s.iter()
            .map(|x| match *x {
                Sym::Var(i) => self.variables[i].as_str(),
                Sym::Gen(i) => self.generators[i].as_str(),
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn render(&self) -> String {
        let mut out = format!("vars: {}\ngens: {}\n", self.variables.join(" "), self.generators.join(" "));
        if let Some(w) = &self.weights {
            let ws: Vec<String> = w.iter().map(|x| x.to_string()).collect();
            writeln!(out, "weights: {}", ws.join(" ")).unwrap();
        }
        for (l, r) in &self.equations {
            writeln!(out, "eq: {} = {}", self.show_side(l), self.show_side(r)).unwrap();
        }
        for (l, r) in &self.constraints {
            writeln!(out, "len: {} <= {}", self.show_side(l), self.show_side(r)).unwrap();
        }
        out
    }

    fn eval(&self, side: &Side, values: &[Vec<usize>]) -> Vec<usize> {
        let mut out = Vec::new();
        for s in side {
            match *s {
                Sym::Var(i) => out.extend_from_slice(&values[i]),
                Sym::Gen(g) => out.push(g),
            }
        }
        out
    }

    fn weighted_len(&self, w: &[usize]) -> usize {
        match &self.weights {
            Some(ws) => w.iter().map(|&g| ws[g]).sum(),
            None => w.len(),
        }
    }

    /// Whether an assignment of generator words satisfies the system.
    pub fn satisfied_by(&self, values: &[Vec<usize>]) -> bool {
        self.equations.iter().all(|(l, r)| self.eval(l, values) == self.eval(r, values))
            && self
                .constraints
                .iter()
                .all(|(l, r)| self.weighted_len(&self.eval(l, values)) <= self.weighted_len(&self.eval(r, values)))
    }

    pub fn show_value(&self, v: &[usize]) -> String {
        if v.is_empty() {
            return "1".into();
        }
        v.iter().map(|&g| self.generators[g].as_str()).collect::<Vec<_>>().join(" ")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Sat,
    UnsatWithinBound,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WelcResult {
    pub status: Status,
    /// Generator indices per variable.
    pub witness: Option<Vec<Vec<usize>>>,
    pub assignments: u64,
}

/// Exhaustive search over generator words of length at most `bound`.
pub fn brute_force_welc(sys: &WelcSystem, bound: usize) -> WelcResult {
    let mut domain = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..bound {
        layer = layer
            .iter()
            .flat_map(|w: &Vec<usize>| {
                (0..sys.rank()).map(move |g| {
                    let mut w2 = w.clone();
                    w2.push(g);
                    w2
                })
            })
            .collect();
        domain.extend(layer.iter().cloned());
    }
    let n = sys.variables.len();
    let mut idx = vec![0usize; n];
    let mut assignments = 0;
    loop {
        assignments += 1;
        let values: Vec<Vec<usize>> = idx.iter().map(|&i| domain[i].clone()).collect();
        if sys.satisfied_by(&values) {
            return WelcResult { status: Status::Sat, witness: Some(values), assignments };
        }
        // Odometer with the last variable fastest, so the first variable
        // takes its shortlex-least value in the first witness found.
        let mut k = n;
        loop {
            if k == 0 {
                return WelcResult { status: Status::UnsatWithinBound, witness: None, assignments };
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < domain.len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// A term over `M`: variables and letters of the base alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Term {
    Var(usize),
    Letter(Letter),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonoidEqSystem {
    #[serde(skip)]
    pub base: SpecialPresentation,
    pub variables: Vec<String>,
    pub equations: Vec<(Vec<Term>, Vec<Term>)>,
}

impl MonoidEqSystem {
    pub fn new(base: SpecialPresentation) -> Self {
        MonoidEqSystem { base, variables: Vec::new(), equations: Vec::new() }
    }

    pub fn var(&mut self, name: &str) -> usize {
        match self.variables.iter().position(|v| v == name) {
            Some(i) => i,
            None => {
                self.variables.push(name.into());
                self.variables.len() - 1
            }
        }
    }

    pub fn word_terms(w: &Word) -> Vec<Term> {
        w.0.iter().map(|&l| Term::Letter(l)).collect()
    }

    fn show_side(&self, side: &[Term]) -> String {
        if side.is_empty() {
            return "1".into();
        }
        let mut parts = Vec::new();
        let mut run = Vec::new();
        for t in side {
            match *t {
                Term::Letter(l) => run.push(l),
                Term::Var(i) => {
                    if !run.is_empty() {
                        parts.push(self.base.show(&Word(std::mem::take(&mut run))));
                    }
                    parts.push(self.variables[i].clone());
                }
            }
        }
        if !run.is_empty() {
            parts.push(self.base.show(&Word(run)));
        }
        parts.join(" ")
    }

    pub fn render(&self) -> String {
        let mut out = format!("vars: {}\n", self.variables.join(" "));
        for (l, r) in &self.equations {
            writeln!(out, "eq: {} = {}", self.show_side(l), self.show_side(r)).unwrap();
        }
        out
    }

    /// Parses `vars:` and `eq:` lines. Tokens naming a declared variable are
    /// variables; other tokens are words over the base alphabet, and a token
    /// that is neither is taken as a new variable.
    pub fn parse(text: &str, base: &SpecialPresentation) -> Result<Self, WelcError> {
        let mut sys = MonoidEqSystem::new(base.clone());
        let mut pending = Vec::new();
        for (line, d) in directives(text) {
            let (key, val) = split_directive(line, d)?;
            match key {
                "vars" => {
                    for v in val.split_whitespace() {
                        if sys.variables.iter().any(|x| x == v) {
                            return Err(WelcError::Duplicate(v.into()));
                        }
                        sys.var(v);
                    }
                }
                "eq" => pending.push((line, val)),
                _ => return Err(WelcError::Syntax { line, message: format!("unknown directive `{key}`") }),
            }
        }
        for (line, val) in pending {
            let (l, r) = val.split_once('=').ok_or(WelcError::Syntax { line, message: "expected `=`".into() })?;
            let l = sys.parse_side(l);
            let r = sys.parse_side(r);
            sys.equations.push((l, r));
        }
        Ok(sys)
    }

    fn parse_side(&mut self, text: &str) -> Vec<Term> {
        let mut out = Vec::new();
        for tok in text.split_whitespace() {
            if let Some(i) = self.variables.iter().position(|v| v == tok) {
                out.push(Term::Var(i));
            } else if let Ok(w) = self.base.word(tok) {
                out.extend(Self::word_terms(&w));
            } else {
                let i = self.var(tok);
                out.push(Term::Var(i));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GadgetKind {
    Domain,
    Length,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Gadget {
    pub kind: GadgetKind,
    /// Original variable name, or the constraint index.
    pub source: String,
    pub fresh: String,
    /// Indices into the compiled equation list.
    pub equations: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompilationRecord {
    /// Generator name and the basis word (rendered) it maps to.
    pub generator_map: Vec<(String, String)>,
    #[serde(skip)]
    pub generator_words: Vec<Word>,
    pub weights: Vec<usize>,
    pub a: String,
    pub gadgets: Vec<Gadget>,
    /// Compiled variable index of each original variable.
    pub original_vars: Vec<usize>,
}

/// Builds the system over `M` whose solutions correspond to those of `sys`.
pub fn compile(
    sys: &WelcSystem,
    table: &InverseTable,
    monoid: &Monoid,
) -> Result<(MonoidEqSystem, CompilationRecord), WelcError> {
    let rank = sys.rank();
    if rank > table.basis.len() {
        return Err(WelcError::RankTooLarge { need: rank, have: table.basis.len() });
    }
    let want = sys.weight_vector();
    if want[..] != table.weights[..rank] {
        return Err(WelcError::WeightMismatch { system: want, basis: table.weights[..rank].to_vec() });
    }
    let gens: Vec<Word> = table.basis[..rank].to_vec();
    let a = Term::Letter(table.a);
    let mut out = MonoidEqSystem::new(monoid.presentation.clone());
    let mut gadgets = Vec::new();

    // Fresh variables are declared right after the variable they guard.
    let mut original_vars = Vec::new();
    for name in &sys.variables {
        let f = format!("__f_{name}");
        out.var(&f);
        original_vars.push(out.var(name));
        gadgets.push(Gadget { kind: GadgetKind::Domain, source: name.clone(), fresh: f, equations: vec![] });
    }
    let subst = |side: &Side| -> Vec<Term> {
        let mut t = Vec::new();
        for s in side {
            match *s {
                Sym::Var(i) => t.push(Term::Var(original_vars[i])),
                Sym::Gen(g) => t.extend(MonoidEqSystem::word_terms(&gens[g])),
            }
        }
        t
    };
    for (k, name) in sys.variables.iter().enumerate() {
        let y = Term::Var(out.var(&format!("__f_{name}")));
        let x = Term::Var(original_vars[k]);
        let base = out.equations.len();
        out.equations.push((vec![a, y], vec![y, a]));
        out.equations.push((vec![y, x], vec![]));
        gadgets[k].equations = vec![base, base + 1];
    }
    for (l, r) in &sys.equations {
        out.equations.push((subst(l), subst(r)));
    }
    for (idx, (u, v)) in sys.constraints.iter().enumerate() {
        let fresh = format!("__c_{idx}");
        let t = Term::Var(out.var(&fresh));
        let (u, v) = (subst(u), subst(v));
        let base = out.equations.len();
        out.equations.push((vec![a, t], vec![t, a]));
        let mut tu = vec![t];
        tu.extend(u);
        let mut lhs = vec![a];
        lhs.extend(tu.iter().copied());
        let mut rhs = tu;
        rhs.push(a);
        out.equations.push((lhs, rhs));
        let mut tv = vec![t];
        tv.extend(v);
        out.equations.push((tv, vec![]));
        gadgets.push(Gadget {
            kind: GadgetKind::Length,
            source: idx.to_string(),
            fresh,
            equations: vec![base, base + 1, base + 2],
        });
    }
    let record = CompilationRecord {
        generator_map: sys
            .generators
            .iter()
            .zip(&gens)
            .map(|(g, w)| (g.clone(), monoid.show(w)))
            .collect(),
        generator_words: gens,
        weights: want,
        a: monoid.presentation.alphabet.symbol(table.a).to_string(),
        gadgets,
        original_vars,
    };
    Ok((out, record))
}

/// Maps a solution of the compiled system back to generator words, dropping
/// fresh variables. `None` if some value is not a product of generator words.
pub fn decompile(values: &BTreeMap<String, Word>, sys: &WelcSystem, record: &CompilationRecord) -> Option<Vec<Vec<usize>>> {
    sys.variables
        .iter()
        .map(|name| crate::inverses::factor_over(&values.get(name)?.0, &record.generator_words))
        .collect()
}
