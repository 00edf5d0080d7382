//! Fixtures shared by the benchmarks.

use orm_core::{Monoid, OracleBudgets, SpecialPresentation};

pub const ABACAB: &str = include_str!("../../../corpus/abacab.orm");
pub const BICYCLIC: &str = include_str!("../../../corpus/bicyclic.orm");
pub const EXAMPLE_1_2: &str = include_str!("../../../corpus/example_1_2.orm");
pub const WELC_SUITE: &str = include_str!("../../../corpus/welc_suite.welc");

pub fn monoid(text: &str) -> Monoid {
    Monoid::new(SpecialPresentation::parse(text).expect("corpus presentation"), OracleBudgets::default()).expect("corpus monoid")
}

/// Non-comment lines of the WELC suite.
pub fn welc_instances() -> impl Iterator<Item = &'static str> {
    WELC_SUITE.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'))
}
