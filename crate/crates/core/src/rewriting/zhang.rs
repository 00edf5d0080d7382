//! Reduction in `M` by the infinite complete system whose rules are
//! `u -> v` with `u, v` in `Δ*`, `v` shortlex-smaller than `u`, and
//! `φ(u) = φ(v)` in the group of units. Rules are discovered on demand.

use serde::Serialize;

use crate::monoid::{Equality, Monoid, MonoidError, ScanOrder};
use crate::words::{shortlex, Letter, Word};

/// Outcome of looking for a rule with a given left-hand side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Discovery {
    /// The shortlex-first candidate proven equal.
    Rule(Word),
    /// Every candidate was decided unequal.
    NoRule,
    /// No candidate was proven equal, but some comparison was undecided.
    Degraded,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Step {
    pub position: usize,
    pub lhs: Word,
    pub rhs: Word,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Reduction {
    pub word: Word,
    /// Every `Δ⁺`-subword of the result was shown to admit no rule.
    pub certified: bool,
    pub trace: Vec<Step>,
}

impl Monoid {
    /// All `Δ*`-words of exactly `len` letters, in lexicographic order.
    pub(crate) fn delta_words_of_len(&self, len: usize) -> Vec<Vec<Letter>> {
        fn go(code: &[Word], left: usize, cur: &mut Vec<Letter>, out: &mut Vec<Vec<Letter>>) {
            if left == 0 {
                out.push(cur.clone());
                return;
            }
            for p in code {
                if p.len() <= left {
                    cur.extend_from_slice(&p.0);
                    go(code, left - p.len(), cur, out);
                    cur.truncate(cur.len() - p.len());
                }
            }
        }
        let mut out = Vec::new();
        go(self.pieces.delta.words(), len, &mut Vec::new(), &mut out);
        out.sort();
        out
    }

    /// Finds the right-hand side of the rule with left-hand side `sub`, if any.
    pub fn discover_rule(&self, sub: &[Letter]) -> Result<Discovery, MonoidError> {
        if sub.is_empty() || !self.in_delta_star(sub) {
            return Err(MonoidError::NotInDeltaPlus(self.show(&Word::from(sub))));
        }
        if self.memoize {
            if let Some(d) = self.memo.borrow().get(sub) {
                self.bump(|s| s.memo_hits += 1);
                return Ok(d.clone());
            }
        }
        self.bump(|s| s.discoveries += 1);
        let target = self.phi_group(sub).expect("checked above");
        let mut degraded = false;
        let mut found = None;
        'outer: for len in 0..=sub.len() {
            for v in self.delta_words_of_len(len) {
                if shortlex(&v, sub).is_ge() {
                    break 'outer;
                }
                let pv = self.phi_group(&v).expect("Δ*-word");
                self.bump(|s| s.group_queries += 1);
                match Equality::from_group(&self.oracle.equal(&pv, &target)) {
                    Equality::Equal => {
                        found = Some(Word(v));
                        break 'outer;
                    }
                    Equality::Unknown => degraded = true,
                    Equality::NotEqual => {}
                }
            }
        }
        let d = match found {
            Some(v) => Discovery::Rule(v),
            None if degraded => Discovery::Degraded,
            None => Discovery::NoRule,
        };
        if self.memoize {
            self.memo.borrow_mut().insert(sub.to_vec(), d.clone());
        }
        Ok(d)
    }

    /// Every `(start, end)` with `w[start..end]` a nonempty `Δ*`-word, in
    /// the context's scan order.
    fn delta_subwords(&self, w: &[Letter]) -> Vec<(usize, usize)> {
        let mut spans = Vec::new();
        for i in 0..w.len() {
            for j in self.pieces.delta.chain_ends(w, i) {
                if j > i {
                    spans.push((i, j));
                }
            }
        }
        match self.scan {
            ScanOrder::LongestLeftmost => spans.sort_by_key(|&(i, j)| (std::cmp::Reverse(j - i), i)),
            ScanOrder::ShortestLeftmost => spans.sort_by_key(|&(i, j)| (j - i, i)),
            ScanOrder::LongestRightmost => {
                spans.sort_by_key(|&(i, j)| (std::cmp::Reverse(j - i), std::cmp::Reverse(i)))
            }
        }
        spans
    }

    /// Rewrites `w` to its reduced form.
    pub fn reduce(&self, w: &Word) -> Reduction {
        self.bump(|s| s.reductions += 1);
        let mut cur = w.0.clone();
        let mut trace = Vec::new();
        loop {
            let mut certified = true;
            let mut applied = false;
            for (i, j) in self.delta_subwords(&cur) {
                match self.discover_rule(&cur[i..j]).expect("span is in Δ⁺") {
                    Discovery::Rule(v) => {
                        trace.push(Step { position: i, lhs: Word::from(&cur[i..j]), rhs: v.clone() });
                        cur.splice(i..j, v.0);
                        applied = true;
                        break;
                    }
                    Discovery::Degraded => certified = false,
                    Discovery::NoRule => {}
                }
            }
            if !applied {
                return Reduction { word: Word(cur), certified, trace };
            }
        }
    }

    /// Equality in `M`. Equal reduced forms prove equality; distinct
    /// certified reduced forms prove inequality.
    pub fn equal(&self, u: &Word, v: &Word) -> Equality {
        let (ru, rv) = (self.reduce(u), self.reduce(v));
        if ru.word == rv.word {
            Equality::Equal
        } else if ru.certified && rv.certified {
            Equality::NotEqual
        } else {
            Equality::Unknown
        }
    }

    pub fn is_reduced(&self, w: &Word) -> bool {
        let r = self.reduce(w);
        r.trace.is_empty() && r.certified
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(s: &str) -> Monoid {
        Monoid::parse(s).unwrap()
    }

    #[test]
    fn relator_reduces_to_one() {
        let x = m("< a,b,c | abacab = 1 >");
        let r = x.reduce(&x.word("abacab"));
        assert_eq!(r.word, Word::empty());
        assert!(r.certified);
    }

    #[test]
    fn context_survives_reduction() {
        let x = m("< a,b,c | abacab = 1 >");
        let r = x.reduce(&x.word("bacababacab"));
        assert_eq!(x.show(&r.word), "babac");
        assert!(r.certified);
    }

    #[test]
    fn units_group_is_abelian_here() {
        // pqp = 1 forces q = p^-2, so acab and abac are equal.
        let x = m("< a,b,c | abacab = 1 >");
        assert_eq!(x.discover_rule(&x.word("acab").0), Ok(Discovery::Rule(x.word("abac"))));
        assert_eq!(x.discover_rule(&x.word("acabab").0), Ok(Discovery::Rule(Word::empty())));
        assert_eq!(x.discover_rule(&x.word("abab").0), Ok(Discovery::NoRule));
    }

    #[test]
    fn invertible_letters_cancel() {
        let x = m("< a,b,c,d | aba = 1 >");
        assert_eq!(x.equal(&x.word("baa"), &Word::empty()), Equality::Equal);
        assert_eq!(x.equal(&x.word("c"), &x.word("d")), Equality::NotEqual);
    }

    #[test]
    fn bicyclic() {
        let x = m("< a,b | ab = 1 >");
        assert_eq!(x.equal(&x.word("ab"), &x.word("ba")), Equality::NotEqual);
        assert_eq!(x.show(&x.reduce(&x.word("baabab")).word), "ba");
        assert_eq!(x.show(&x.reduce(&x.word("aabbb")).word), "b");
    }

    #[test]
    fn rules_are_decreasing() {
        let x = m("< a,b,c | abacab = 1 >");
        let r = x.reduce(&x.word("acabababacab"));
        for s in &r.trace {
            assert!(s.rhs < s.lhs);
        }
        assert!(x.is_reduced(&r.word));
    }

    #[test]
    fn non_delta_subword_is_rejected() {
        let x = m("< a,b,c | abacab = 1 >");
        assert!(x.discover_rule(&x.word("a").0).is_err());
    }
}
