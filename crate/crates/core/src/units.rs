//! Word problem for the group of units `G = < B | φ(r) = 1 >`.
//!
//! Every decider returns a three-valued [`Verdict`]. Decided verdicts carry a
//! certificate that can be replayed: a reduction trace ending in the empty
//! word, an irreducible normal form from a converged complete system, or an
//! abelianization obstruction.

use std::collections::{BinaryHeap, HashSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::rewriting::finite::{complete, Completion, CompletionBudget};
use crate::words::{Letter, SpecialPresentation, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("Dehn's algorithm needs a proper-power relator (exponent {0} < 2)")]
    NotTorsion(usize),
    #[error("oracle strategy chain is empty")]
    EmptyChain,
    #[error("cannot parse group word `{0}`")]
    BadWord(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GroupLetter {
    pub gen: Letter,
    pub inverse: bool,
}

impl GroupLetter {
    pub fn pos(gen: Letter) -> Self {
        GroupLetter { gen, inverse: false }
    }

    pub fn inv(self) -> Self {
        GroupLetter { gen: self.gen, inverse: !self.inverse }
    }

    fn code(self) -> Letter {
        self.gen * 2 + self.inverse as Letter
    }
}

/// A word over `B ∪ B⁻¹`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GroupWord(pub Vec<GroupLetter>);

impl GroupWord {
    pub fn empty() -> Self {
        GroupWord(Vec::new())
    }

    pub fn positive(w: &Word) -> Self {
        GroupWord(w.0.iter().map(|&g| GroupLetter::pos(g)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Self {
        GroupWord(self.0.iter().rev().map(|l| l.inv()).collect())
    }

    pub fn concat(&self, other: &GroupWord) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        GroupWord(v)
    }

    pub fn exponent_sums(&self, rank: usize) -> Vec<i64> {
        let mut e = vec![0i64; rank];
        for l in &self.0 {
            e[l.gen as usize] += if l.inverse { -1 } else { 1 };
        }
        e
    }

    /// Encoding into the monoid alphabet `p, P, q, Q, …` (letter `2g`, `2g+1`).
    fn encode(&self) -> Vec<Letter> {
        self.0.iter().map(|l| l.code()).collect()
    }

    fn decode(w: &[Letter]) -> Self {
        GroupWord(w.iter().map(|&c| GroupLetter { gen: c / 2, inverse: c % 2 == 1 }).collect())
    }

    /// Renders with upper case for inverses of single-character lower-case
    /// symbols, `x^-1` otherwise.
    pub fn render(&self, b: &crate::words::Alphabet) -> String {
        if self.is_empty() {
            return "1".into();
        }
        self.0
            .iter()
            .map(|l| {
                let s = b.symbol(l.gen);
                if !l.inverse {
                    s.to_string()
                } else if s.chars().count() == 1 && s.chars().all(|c| c.is_lowercase()) {
                    s.to_uppercase()
                } else {
                    format!("{s}^-1")
                }
            })
            .collect::<Vec<_>>()
            .join(if b.symbols().iter().all(|s| s.chars().count() == 1) { "" } else { "." })
    }

    /// Parses `pqP`, `p q^-1`, `x1.x2^-1` style group words.
    pub fn parse(text: &str, b: &crate::words::Alphabet) -> Result<Self, OracleError> {
        let text = text.trim();
        if text.is_empty() || text == "1" {
            return Ok(GroupWord::empty());
        }
        let bad = || OracleError::BadWord(text.to_string());
        let mut out = Vec::new();
        for chunk in text.split(|c: char| c.is_whitespace() || c == '.').filter(|c| !c.is_empty()) {
            let (body, inv) = match chunk.strip_suffix("^-1") {
                Some(b) => (b, true),
                None => (chunk, false),
            };
            if let Some(g) = b.letter(body) {
                out.push(GroupLetter { gen: g, inverse: inv });
                continue;
            }
            let chars: Vec<char> = body.chars().collect();
            for (i, c) in chars.iter().enumerate() {
                let last_inv = inv && i + 1 == chars.len();
                if let Some(g) = b.letter(&c.to_string()) {
                    out.push(GroupLetter { gen: g, inverse: last_inv });
                } else if let Some(g) = b.letter(&c.to_lowercase().to_string()).filter(|_| c.is_uppercase()) {
                    out.push(GroupLetter { gen: g, inverse: !last_inv });
                } else {
                    return Err(bad());
                }
            }
        }
        Ok(GroupWord(out))
    }
}

/// Removes adjacent inverse pairs.
pub fn free_reduce(w: &GroupWord) -> GroupWord {
    let mut out: Vec<GroupLetter> = Vec::with_capacity(w.len());
    for &l in &w.0 {
        if out.last() == Some(&l.inv()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    GroupWord(out)
}

/// Free and cyclic reduction; the result is conjugate to the input.
pub fn cyclically_reduce(w: &GroupWord) -> GroupWord {
    let mut v = free_reduce(w).0;
    while v.len() >= 2 && v[0] == v[v.len() - 1].inv() {
        v.pop();
        v.remove(0);
    }
    GroupWord(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GroupAnswer {
    Trivial,
    Nontrivial,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Method {
    Free,
    Dehn,
    KnuthBendix,
    Bfs,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Free => "FREE",
            Method::Dehn => "DEHN",
            Method::KnuthBendix => "KNUTH_BENDIX",
            Method::Bfs => "BFS",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// Successive words, each obtained from the previous by free reduction,
    /// conjugation or a relator substitution.
    Trace { steps: Vec<GroupWord> },
    /// Irreducible word modulo a converged complete system, or a Dehn-reduced word.
    NormalForm { word: GroupWord },
    /// Exponent sums of the input, outside the lattice spanned by the relator's.
    Abelianization { exponent_sums: Vec<i64>, relator_sums: Vec<i64> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub value: GroupAnswer,
    pub method: Method,
    pub certificate: Option<Certificate>,
}

impl Verdict {
    fn unknown(method: Method) -> Self {
        Verdict { value: GroupAnswer::Unknown, method, certificate: None }
    }

    pub fn is_decided(&self) -> bool {
        self.value != GroupAnswer::Unknown
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudgets {
    /// Critical-pair inferences for completion.
    pub kb_inferences: usize,
    /// Extra length allowed above the input during bounded search.
    pub bfs_radius: usize,
    pub bfs_nodes: usize,
}

impl Default for OracleBudgets {
    fn default() -> Self {
        OracleBudgets { kb_inferences: 100_000, bfs_radius: 8, bfs_nodes: 20_000 }
    }
}

impl OracleBudgets {
    /// Defaults, with `ORM_ORACLE_BUDGET` overriding the completion budget.
    pub fn from_env() -> Self {
        let mut b = OracleBudgets::default();
        if let Some(n) = std::env::var("ORM_ORACLE_BUDGET").ok().and_then(|s| s.trim().parse().ok()) {
            b.kb_inferences = n;
        }
        b
    }
}

/// Word-problem oracle for a one-relator group given by a positive relator.
#[derive(Debug, Clone)]
pub struct UnitsOracle {
    presentation: SpecialPresentation,
    relator: GroupWord,
    relator_sums: Vec<i64>,
    exponent: usize,
    chain: Vec<Method>,
    budgets: OracleBudgets,
    // all cyclic permutations of relator^{±1}
    cyclic: Vec<GroupWord>,
    kb: Option<Completion>,
}

impl UnitsOracle {
    pub fn new(presentation: SpecialPresentation, budgets: OracleBudgets) -> Self {
        Self::with_chain(
            presentation,
            vec![Method::Free, Method::Dehn, Method::KnuthBendix, Method::Bfs],
            budgets,
        )
        .expect("default chain is non-empty")
    }

    pub fn with_chain(
        presentation: SpecialPresentation,
        chain: Vec<Method>,
        budgets: OracleBudgets,
    ) -> Result<Self, OracleError> {
        if chain.is_empty() {
            return Err(OracleError::EmptyChain);
        }
        let relator = GroupWord::positive(&presentation.relator);
        let (_, exponent) = presentation.relator.primitive_root();
        let rank = presentation.alphabet.len();
        let relator_sums = relator.exponent_sums(rank);
        let mut cyclic = Vec::new();
        for r in [relator.clone(), relator.inverse()] {
            for i in 0..r.len() {
                let mut v = r.0[i..].to_vec();
                v.extend_from_slice(&r.0[..i]);
                let g = GroupWord(v);
                if !cyclic.contains(&g) {
                    cyclic.push(g);
                }
            }
        }
        let kb = chain.contains(&Method::KnuthBendix).then(|| {
            let mut eqs = Vec::new();
            for g in 0..rank as Letter {
                eqs.push((Word(vec![2 * g, 2 * g + 1]), Word::empty()));
                eqs.push((Word(vec![2 * g + 1, 2 * g]), Word::empty()));
            }
            eqs.push((Word(relator.encode()), Word::empty()));
            complete(
                &eqs,
                CompletionBudget { inferences: budgets.kb_inferences, ..CompletionBudget::default() },
            )
        });
        Ok(UnitsOracle { presentation, relator, relator_sums, exponent, chain, budgets, cyclic, kb })
    }

    pub fn presentation(&self) -> &SpecialPresentation {
        &self.presentation
    }

    pub fn rank(&self) -> usize {
        self.presentation.alphabet.len()
    }

    pub fn torsion_exponent(&self) -> usize {
        self.exponent
    }

    pub fn chain(&self) -> &[Method] {
        &self.chain
    }

    pub fn budgets(&self) -> OracleBudgets {
        self.budgets
    }

    pub fn kb_converged(&self) -> Option<bool> {
        self.kb.as_ref().map(|c| c.converged)
    }

    /// Runs the strategy chain; the first decided verdict wins.
    pub fn is_trivial(&self, w: &GroupWord) -> Verdict {
        let mut last = Method::Free;
        for &m in &self.chain {
            last = m;
            let v = match m {
                Method::Free => self.free_is_trivial(w),
                Method::Dehn => match self.dehn_is_trivial(w) {
                    Ok(v) => v,
                    Err(_) => continue,
                },
                Method::KnuthBendix => self.kb_is_trivial(w),
                Method::Bfs => self.bfs_is_trivial(w),
            };
            if v.is_decided() {
                debug_assert!(v.value != GroupAnswer::Trivial || self.in_relator_lattice(w));
                return v;
            }
        }
        Verdict::unknown(last)
    }

    pub fn equal(&self, u: &GroupWord, v: &GroupWord) -> Verdict {
        self.is_trivial(&u.concat(&v.inverse()))
    }

    /// Trivial if the word freely reduces to 1; decides fully only when the
    /// relator itself is freely trivial (free group).
    pub fn free_is_trivial(&self, w: &GroupWord) -> Verdict {
        let r = free_reduce(w);
        if r.is_empty() {
            return Verdict {
                value: GroupAnswer::Trivial,
                method: Method::Free,
                certificate: Some(Certificate::Trace { steps: vec![w.clone(), r] }),
            };
        }
        if free_reduce(&self.relator).is_empty() {
            return Verdict {
                value: GroupAnswer::Nontrivial,
                method: Method::Free,
                certificate: Some(Certificate::NormalForm { word: r }),
            };
        }
        Verdict::unknown(Method::Free)
    }

    /// Dehn's algorithm with the strict-majority threshold. Only valid for a
    /// proper-power relator, where the spelling theorem guarantees that a
    /// non-empty trivial reduced word contains more than half of a cyclic
    /// conjugate of the relator or its inverse.
    pub fn dehn_is_trivial(&self, w: &GroupWord) -> Result<Verdict, OracleError> {
        if self.exponent < 2 {
            return Err(OracleError::NotTorsion(self.exponent));
        }
        let n = self.relator.len();
        let mut steps = vec![w.clone()];
        let mut cur = cyclically_reduce(w);
        loop {
            if steps.last() != Some(&cur) {
                steps.push(cur.clone());
            }
            if cur.is_empty() {
                return Ok(Verdict {
                    value: GroupAnswer::Trivial,
                    method: Method::Dehn,
                    certificate: Some(Certificate::Trace { steps }),
                });
            }
            match self.dehn_step(&cur, n / 2 + 1) {
                Some(next) => cur = cyclically_reduce(&next),
                None => {
                    return Ok(Verdict {
                        value: GroupAnswer::Nontrivial,
                        method: Method::Dehn,
                        certificate: Some(Certificate::NormalForm { word: cur }),
                    })
                }
            }
        }
    }

    /// Replaces the first subword of length `>= min_len` that is a prefix of
    /// a cyclic conjugate `st` of `r^{±1}` by `t⁻¹`.
    fn dehn_step(&self, w: &GroupWord, min_len: usize) -> Option<GroupWord> {
        for i in 0..w.len() {
            for c in &self.cyclic {
                let l = w.0[i..].iter().zip(&c.0).take_while(|(a, b)| a == b).count();
                if l >= min_len {
                    let t_inv = GroupWord(c.0[l..].to_vec()).inverse();
                    let mut v = w.0[..i].to_vec();
                    v.extend_from_slice(&t_inv.0);
                    v.extend_from_slice(&w.0[i + l..]);
                    return Some(free_reduce(&GroupWord(v)));
                }
            }
        }
        None
    }

    /// Rewrites with the completed system. NONTRIVIAL only from a converged
    /// (confluent) system.
    pub fn kb_is_trivial(&self, w: &GroupWord) -> Verdict {
        let Some(kb) = &self.kb else {
            return Verdict::unknown(Method::KnuthBendix);
        };
        let nf = GroupWord::decode(&kb.system.normal_form(&w.encode()).0);
        if nf.is_empty() {
            Verdict {
                value: GroupAnswer::Trivial,
                method: Method::KnuthBendix,
                certificate: Some(Certificate::Trace { steps: vec![w.clone(), nf] }),
            }
        } else if kb.converged {
            Verdict {
                value: GroupAnswer::Nontrivial,
                method: Method::KnuthBendix,
                certificate: Some(Certificate::NormalForm { word: nf }),
            }
        } else {
            Verdict::unknown(Method::KnuthBendix)
        }
    }

    /// Exponent-sum vector lies in the lattice spanned by the relator's.
    pub fn in_relator_lattice(&self, w: &GroupWord) -> bool {
        let e = w.exponent_sums(self.rank());
        let r = &self.relator_sums;
        let Some(i) = r.iter().position(|&x| x != 0) else {
            return e.iter().all(|&x| x == 0);
        };
        if e[i] % r[i] != 0 {
            return false;
        }
        let c = e[i] / r[i];
        e.iter().zip(r).all(|(&x, &y)| x == c * y)
    }

    /// Abelianization obstruction, then a bounded best-first search through
    /// relator substitutions for a derivation of the empty word.
    pub fn bfs_is_trivial(&self, w: &GroupWord) -> Verdict {
        if !self.in_relator_lattice(w) {
            return Verdict {
                value: GroupAnswer::Nontrivial,
                method: Method::Bfs,
                certificate: Some(Certificate::Abelianization {
                    exponent_sums: w.exponent_sums(self.rank()),
                    relator_sums: self.relator_sums.clone(),
                }),
            };
        }
        let start = free_reduce(w);
        let max_len = start.len() + self.budgets.bfs_radius;
        let mut parents: Vec<(GroupWord, usize)> = vec![(start.clone(), usize::MAX)];
        let mut seen: HashSet<GroupWord> = HashSet::from([start.clone()]);
        let mut heap = BinaryHeap::new();
        heap.push(std::cmp::Reverse((start.len(), 0usize)));
        while let Some(std::cmp::Reverse((_, idx))) = heap.pop() {
            let cur = parents[idx].0.clone();
            if cur.is_empty() {
                let mut steps = vec![];
                let mut i = idx;
                while i != usize::MAX {
                    steps.push(parents[i].0.clone());
                    i = parents[i].1;
                }
                steps.push(w.clone());
                steps.reverse();
                steps.dedup();
                return Verdict {
                    value: GroupAnswer::Trivial,
                    method: Method::Bfs,
                    certificate: Some(Certificate::Trace { steps }),
                };
            }
            for next in self.substitutions(&cur) {
                if next.len() <= max_len && seen.insert(next.clone()) {
                    if parents.len() >= self.budgets.bfs_nodes {
                        return Verdict::unknown(Method::Bfs);
                    }
                    parents.push((next.clone(), idx));
                    heap.push(std::cmp::Reverse((next.len(), parents.len() - 1)));
                }
            }
        }
        Verdict::unknown(Method::Bfs)
    }

    /// Every word obtained by replacing a (possibly empty) prefix `s` of a
    /// cyclic conjugate `st` of `r^{±1}` occurring at some position by `t⁻¹`.
    fn substitutions(&self, w: &GroupWord) -> Vec<GroupWord> {
        let mut out = Vec::new();
        for i in 0..=w.len() {
            for c in &self.cyclic {
                let max = w.0[i..].iter().zip(&c.0).take_while(|(a, b)| a == b).count();
                for l in 0..=max {
                    let t_inv = GroupWord(c.0[l..].to_vec()).inverse();
                    let mut v = w.0[..i].to_vec();
                    v.extend_from_slice(&t_inv.0);
                    v.extend_from_slice(&w.0[i + l..]);
                    out.push(free_reduce(&GroupWord(v)));
                }
            }
        }
        out
    }

    /// Checks a trace certificate: consecutive words must be related by free
    /// reduction, cyclic conjugation, or a single relator substitution.
    pub fn replay(&self, steps: &[GroupWord]) -> bool {
        steps.windows(2).all(|p| {
            let (a, b) = (&p[0], &p[1]);
            free_reduce(a) == free_reduce(b)
                || cyclically_reduce(a) == *b
                || cyclic_conjugates(&free_reduce(a)).contains(&free_reduce(b))
                || self.substitutions(&free_reduce(a)).contains(&free_reduce(b))
                || self.kb.as_ref().is_some_and(|kb| {
                    GroupWord::decode(&kb.system.normal_form(&a.encode()).0) == *b
                })
        })
    }
}

fn cyclic_conjugates(w: &GroupWord) -> Vec<GroupWord> {
    (0..w.len().max(1))
        .map(|i| {
            let mut v = w.0[i.min(w.len())..].to_vec();
            v.extend_from_slice(&w.0[..i.min(w.len())]);
            cyclically_reduce(&GroupWord(v))
        })
        .collect()
}
