//! Finite length-reducing string rewriting systems: normal forms, critical
//! pairs, and a budgeted Knuth–Bendix completion under shortlex.

use std::cmp::Ordering;

use thiserror::Error;

use crate::words::{Letter, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RewriteError {
    #[error("rule {lhs:?} -> {rhs:?} is not shortlex-decreasing")]
    NotDecreasing { lhs: Vec<Letter>, rhs: Vec<Letter> },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RewriteRule {
    pub lhs: Word,
    pub rhs: Word,
}

impl RewriteRule {
    pub fn new(lhs: Word, rhs: Word) -> Result<Self, RewriteError> {
        if rhs.cmp(&lhs) != Ordering::Less {
            return Err(RewriteError::NotDecreasing { lhs: lhs.0, rhs: rhs.0 });
        }
        Ok(RewriteRule { lhs, rhs })
    }

    /// Orients an equation so the shortlex-larger side is the left side;
    /// `None` if both sides are equal.
    pub fn oriented(u: Word, v: Word) -> Option<Self> {
        match u.cmp(&v) {
            Ordering::Greater => Some(RewriteRule { lhs: u, rhs: v }),
            Ordering::Less => Some(RewriteRule { lhs: v, rhs: u }),
            Ordering::Equal => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Confluence {
    Confluent,
    NotConfluent,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriticalPair {
    /// The overlapping (or containing) word both rules apply to.
    pub source: Word,
    pub left: Word,
    pub right: Word,
    pub joins: bool,
}

/// A finite shortlex-decreasing (hence terminating) rewriting system.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FiniteSystem {
    rules: Vec<RewriteRule>,
    // rules indexed by the last letter of their left side
    by_last: Vec<Vec<usize>>,
    empty_lhs: bool,
}

impl FiniteSystem {
    pub fn new(rules: Vec<RewriteRule>) -> Result<Self, RewriteError> {
        for r in &rules {
            if r.rhs.cmp(&r.lhs) != Ordering::Less {
                return Err(RewriteError::NotDecreasing { lhs: r.lhs.0.clone(), rhs: r.rhs.0.clone() });
            }
        }
        let mut sys = FiniteSystem { rules: Vec::new(), by_last: Vec::new(), empty_lhs: false };
        for r in rules {
            sys.push(r);
        }
        Ok(sys)
    }

    fn push(&mut self, r: RewriteRule) {
        let i = self.rules.len();
        match r.lhs.0.last() {
            Some(&l) => {
                if self.by_last.len() <= l as usize {
                    self.by_last.resize(l as usize + 1, Vec::new());
                }
                self.by_last[l as usize].push(i);
            }
            None => self.empty_lhs = true,
        }
        self.rules.push(r);
    }

    pub fn rules(&self) -> &[RewriteRule] {
        &self.rules
    }

    /// A rule whose left side is a suffix of `buf`.
    fn suffix_match(&self, buf: &[Letter]) -> Option<usize> {
        let &last = buf.last()?;
        self.by_last
            .get(last as usize)?
            .iter()
            .copied()
            .find(|&i| buf.ends_with(&self.rules[i].lhs.0))
    }

    pub fn is_reducible(&self, w: &[Letter]) -> bool {
        (1..=w.len()).any(|end| self.suffix_match(&w[..end]).is_some())
    }

    /// The unique normal form when confluent; some irreducible descendant otherwise.
    pub fn normal_form(&self, w: &[Letter]) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(w.len());
        let mut input: Vec<Letter> = w.iter().rev().copied().collect();
        while let Some(l) = input.pop() {
            out.push(l);
            if let Some(i) = self.suffix_match(&out) {
                let r = &self.rules[i];
                out.truncate(out.len() - r.lhs.len());
                input.extend(r.rhs.0.iter().rev());
            }
        }
        Word(out)
    }

    /// All one-step reducts at every position.
    pub fn one_step(&self, w: &[Letter]) -> Vec<Word> {
        let mut out = Vec::new();
        for r in &self.rules {
            let n = r.lhs.len();
            if n == 0 || n > w.len() {
                continue;
            }
            for p in 0..=w.len() - n {
                if w[p..p + n] == r.lhs.0[..] {
                    let mut v = w[..p].to_vec();
                    v.extend_from_slice(&r.rhs.0);
                    v.extend_from_slice(&w[p + n..]);
                    out.push(Word(v));
                }
            }
        }
        out
    }

    /// Overlap and containment critical pairs, each tested for joinability.
    pub fn critical_pairs(&self) -> (Vec<CriticalPair>, Confluence) {
        let mut pairs = Vec::new();
        for (i, a) in self.rules.iter().enumerate() {
            for (j, b) in self.rules.iter().enumerate() {
                for (source, left, right) in raw_pairs(a, b, i == j) {
                    let joins = self.normal_form(&left.0) == self.normal_form(&right.0);
                    pairs.push(CriticalPair { source, left, right, joins });
                }
            }
        }
        let status = if pairs.iter().all(|p| p.joins) {
            Confluence::Confluent
        } else {
            Confluence::NotConfluent
        };
        (pairs, status)
    }
}

/// Critical pairs of `a` against `b`: proper overlaps of a suffix of `a.lhs`
/// with a prefix of `b.lhs`, plus `b.lhs` occurring inside `a.lhs`.
fn raw_pairs(a: &RewriteRule, b: &RewriteRule, same: bool) -> Vec<(Word, Word, Word)> {
    let (l1, l2) = (&a.lhs.0, &b.lhs.0);
    let mut out = Vec::new();
    for k in 1..l1.len().min(l2.len()) {
        if l1[l1.len() - k..] == l2[..k] {
            let mut source = l1.clone();
            source.extend_from_slice(&l2[k..]);
            let mut left = a.rhs.0.clone();
            left.extend_from_slice(&l2[k..]);
            let mut right = l1[..l1.len() - k].to_vec();
            right.extend_from_slice(&b.rhs.0);
            out.push((Word(source), Word(left), Word(right)));
        }
    }
    if !same && !l2.is_empty() && l2.len() <= l1.len() {
        for p in 0..=l1.len() - l2.len() {
            if l1[p..p + l2.len()] == l2[..] {
                let mut right = l1[..p].to_vec();
                right.extend_from_slice(&b.rhs.0);
                right.extend_from_slice(&l1[p + l2.len()..]);
                out.push((a.lhs.clone(), a.rhs.clone(), Word(right)));
            }
        }
    }
    out
}

/// Limits for [`complete`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompletionBudget {
    /// Critical-pair inferences.
    pub inferences: usize,
    pub max_rules: usize,
    pub max_lhs_len: usize,
}

impl Default for CompletionBudget {
    fn default() -> Self {
        CompletionBudget { inferences: 100_000, max_rules: 2_000, max_lhs_len: 64 }
    }
}

#[derive(Debug, Clone)]
pub struct Completion {
    pub system: FiniteSystem,
    pub converged: bool,
    pub inferences: usize,
}

/// Knuth–Bendix completion of `equations` under shortlex.
///
/// When `converged` is false the returned rules are still valid consequences
/// of the equations (so reductions to equal words are sound) but normal
/// forms need not be unique.
pub fn complete(equations: &[(Word, Word)], budget: CompletionBudget) -> Completion {
    let mut kb = Kb { rules: Vec::new(), sys: FiniteSystem::default(), inferences: 0 };
    let mut pending: Vec<(Word, Word)> = equations.to_vec();
    let mut next = 0;
    let mut converged = true;
    'outer: loop {
        if !kb.absorb(&mut pending, budget) {
            converged = false;
            break;
        }
        while next < kb.rules.len() {
            if kb.rules[next].is_none() {
                next += 1;
                continue;
            }
            for i in 0..=next {
                let (Some(a), Some(b)) = (&kb.rules[next], &kb.rules[i]) else { continue };
                for (_, l, r) in raw_pairs(a, b, i == next) {
                    pending.push((l, r));
                }
                if i != next {
                    for (_, l, r) in raw_pairs(b, a, false) {
                        pending.push((l, r));
                    }
                }
                kb.inferences += 1;
                if kb.inferences > budget.inferences {
                    converged = false;
                    break 'outer;
                }
            }
            next += 1;
            if !pending.is_empty() {
                continue 'outer;
            }
        }
        if pending.is_empty() {
            break;
        }
    }
    let mut rules: Vec<RewriteRule> = kb.rules.into_iter().flatten().collect();
    if converged {
        let sys = FiniteSystem::new(rules.clone()).expect("oriented rules are decreasing");
        for r in &mut rules {
            r.rhs = sys.normal_form(&r.rhs.0);
        }
    }
    let system = FiniteSystem::new(rules).expect("oriented rules are decreasing");
    Completion { system, converged, inferences: kb.inferences }
}

struct Kb {
    rules: Vec<Option<RewriteRule>>,
    sys: FiniteSystem,
    inferences: usize,
}

impl Kb {
    fn rebuild(&mut self) {
        self.sys = FiniteSystem::new(self.rules.iter().flatten().cloned().collect()).expect("decreasing");
    }

    /// Orients and inserts pending equations, dropping rules whose left side
    /// becomes reducible. Returns false if a size limit is hit.
    fn absorb(&mut self, pending: &mut Vec<(Word, Word)>, budget: CompletionBudget) -> bool {
        let mut live = self.rules.iter().flatten().count();
        while let Some((u, v)) = pending.pop() {
            let u = self.sys.normal_form(&u.0);
            let v = self.sys.normal_form(&v.0);
            let Some(rule) = RewriteRule::oriented(u, v) else { continue };
            if rule.lhs.len() > budget.max_lhs_len {
                return false;
            }
            let mut killed = false;
            for slot in self.rules.iter_mut() {
                if let Some(r) = slot {
                    if rule.lhs.is_subword_of(&r.lhs) {
                        pending.push((r.lhs.clone(), r.rhs.clone()));
                        *slot = None;
                        killed = true;
                        live -= 1;
                    }
                }
            }
            self.rules.push(Some(rule.clone()));
            live += 1;
            if live > budget.max_rules {
                return false;
            }
            if killed {
                self.rebuild();
            } else {
                self.sys.push(rule);
            }
        }
        true
    }
}
