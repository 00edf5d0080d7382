//! Analysis context for a special one-relator monoid: pieces, conditions,
//! structure, the units oracle and the reduction memo.

use std::cell::{Cell, RefCell};
use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::adjan::{
    check_conditions, minimal_pieces, structure_report, units_presentation, AdjanError, ConditionReport,
    PieceDecomposition, StructureReport,
};
use crate::rewriting::zhang::Discovery;
use crate::units::{GroupAnswer, GroupWord, OracleBudgets, UnitsOracle, Verdict};
use crate::words::{Letter, SpecialPresentation, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MonoidError {
    #[error(transparent)]
    Pieces(#[from] AdjanError),
    #[error("word {0} is not in Δ*")]
    NotInDeltaStar(String),
    #[error("word {0} is not in Δ⁺")]
    NotInDeltaPlus(String),
    #[error("conditions C1–C2 do not hold")]
    ConditionsFail,
}

/// Three-valued equality in `M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Equality {
    Equal,
    NotEqual,
    Unknown,
}

impl Equality {
    pub fn from_group(v: &Verdict) -> Self {
        match v.value {
            GroupAnswer::Trivial => Equality::Equal,
            GroupAnswer::Nontrivial => Equality::NotEqual,
            GroupAnswer::Unknown => Equality::Unknown,
        }
    }

    pub fn is_decided(self) -> bool {
        self != Equality::Unknown
    }
}

/// Three-valued truth for membership-style questions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Truth {
    True,
    False,
    Unknown,
}

impl From<bool> for Truth {
    fn from(b: bool) -> Self {
        if b {
            Truth::True
        } else {
            Truth::False
        }
    }
}

/// Order in which `Δ⁺`-subwords are tried during reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScanOrder {
    #[default]
    LongestLeftmost,
    ShortestLeftmost,
    LongestRightmost,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ContextStats {
    pub reductions: u64,
    pub group_queries: u64,
    pub memo_hits: u64,
    pub discoveries: u64,
}

/// Everything needed to compute in `M = < A | r = 1 >`.
///
/// Holds a memo of discovered rules behind a `RefCell`, so a context is not
/// `Sync`; clone it per thread.
#[derive(Debug, Clone)]
pub struct Monoid {
    pub presentation: SpecialPresentation,
    pub pieces: PieceDecomposition,
    pub conditions: ConditionReport,
    pub structure: StructureReport,
    pub units: SpecialPresentation,
    pub oracle: Arc<UnitsOracle>,
    pub scan: ScanOrder,
    /// Remember discovered rules; switched off only for reference runs.
    pub memoize: bool,
    pub(crate) memo: RefCell<HashMap<Vec<Letter>, Discovery>>,
    pub(crate) stats: Cell<ContextStats>,
}

impl Monoid {
    pub fn new(presentation: SpecialPresentation, budgets: OracleBudgets) -> Result<Self, MonoidError> {
        let pieces = minimal_pieces(&presentation)?;
        let conditions = check_conditions(&pieces);
        let structure = structure_report(&presentation, &pieces);
        let units = units_presentation(&pieces);
        let oracle = Arc::new(UnitsOracle::new(units.clone(), budgets));
        Ok(Monoid {
            presentation,
            pieces,
            conditions,
            structure,
            units,
            oracle,
            scan: ScanOrder::default(),
            memoize: true,
            memo: RefCell::new(HashMap::new()),
            stats: Cell::new(ContextStats::default()),
        })
    }

    pub fn parse(text: &str) -> Result<Self, Box<dyn std::error::Error + Send + Sync>> {
        let p = SpecialPresentation::parse(text)?;
        Ok(Monoid::new(p, OracleBudgets::from_env())?)
    }

    /// A fresh context sharing the oracle, with an empty memo.
    pub fn fresh(&self) -> Self {
        let mut m = self.clone();
        m.memo = RefCell::new(HashMap::new());
        m.stats = Cell::new(ContextStats::default());
        m
    }

    pub fn with_scan(mut self, scan: ScanOrder) -> Self {
        self.scan = scan;
        self.memo.borrow_mut().clear();
        self
    }

    pub fn word(&self, s: &str) -> Word {
        self.presentation.word(s).unwrap_or_else(|e| panic!("bad word `{s}`: {e}"))
    }

    pub fn show(&self, w: &Word) -> String {
        self.presentation.show(w)
    }

    pub fn stats(&self) -> ContextStats {
        self.stats.get()
    }

    pub(crate) fn bump(&self, f: impl FnOnce(&mut ContextStats)) {
        let mut s = self.stats.get();
        f(&mut s);
        self.stats.set(s);
    }

    pub fn in_delta_star(&self, w: &[Letter]) -> bool {
        self.pieces.delta.contains_star(w)
    }

    pub(crate) fn phi_group(&self, w: &[Letter]) -> Option<GroupWord> {
        self.pieces.phi(w).map(|b| GroupWord::positive(&b))
    }

    /// Equality of two `Δ*`-words in `M`, decided in the group of units.
    pub fn delta_equal(&self, u: &Word, v: &Word) -> Result<Equality, MonoidError> {
        let pu = self.phi_group(&u.0).ok_or_else(|| MonoidError::NotInDeltaStar(self.show(u)))?;
        let pv = self.phi_group(&v.0).ok_or_else(|| MonoidError::NotInDeltaStar(self.show(v)))?;
        self.bump(|s| s.group_queries += 1);
        Ok(Equality::from_group(&self.oracle.equal(&pu, &pv)))
    }

    /// A word is invertible iff its reduced form lies in `Δ*`.
    pub fn is_invertible(&self, u: &Word) -> Truth {
        let r = self.reduce(u);
        if self.in_delta_star(&r.word.0) {
            Truth::True
        } else if r.certified {
            Truth::False
        } else {
            Truth::Unknown
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(s: &str) -> Monoid {
        Monoid::parse(s).unwrap()
    }

    #[test]
    fn delta_equality() {
        let x = m("< a,b,c | abacab = 1 >");
        assert_eq!(x.delta_equal(&x.word("ab"), &x.word("ac")), Ok(Equality::NotEqual));
        assert_eq!(x.delta_equal(&x.word("ab"), &x.word("ab")), Ok(Equality::Equal));
        assert_eq!(x.delta_equal(&x.word("abacab"), &Word::empty()), Ok(Equality::Equal));
        assert!(x.delta_equal(&x.word("a"), &Word::empty()).is_err());
    }

    #[test]
    fn invertibility() {
        let x = m("< a,b,c | abacab = 1 >");
        assert_eq!(x.is_invertible(&x.word("ab")), Truth::True);
        assert_eq!(x.is_invertible(&x.word("a")), Truth::False);
        assert_eq!(x.is_invertible(&Word::empty()), Truth::True);
        assert_eq!(x.is_invertible(&x.word("acabab")), Truth::True);
        assert_eq!(x.is_invertible(&x.word("ba")), Truth::False);
    }
}
