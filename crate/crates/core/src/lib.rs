//! Computation in special one-relator monoids `< A | r = 1 >`: invertible
//! pieces and the group of units, normal forms via on-demand rewriting, the
//! free submonoid of right inverses of a letter, the compilation of word
//! equations with length constraints into equations over the monoid, and a
//! bounded solver for those equations.

pub mod adjan;
pub mod inverses;
pub mod monoid;
pub mod rewriting;
pub mod solver;
pub mod units;
pub mod welc;
pub mod words;

pub use adjan::{ConditionReport, PieceDecomposition, StructureReport};
pub use inverses::{EmbeddingReport, InverseEntry, InverseError, InverseTable, PowerCheck};
pub use monoid::{Equality, Monoid, MonoidError, ScanOrder, Truth};
pub use rewriting::finite::{FiniteSystem, RewriteRule};
pub use rewriting::zhang::{Discovery, Reduction, Step};
pub use solver::{solve, solve_naive, Ball, SolveOptions, SolverResult, SolverStats};
pub use units::{GroupAnswer, GroupWord, Method, OracleBudgets, UnitsOracle, Verdict};
pub use welc::{brute_force_welc, compile, decompile, CompilationRecord, MonoidEqSystem, Status, WelcSystem};
pub use words::{Alphabet, Letter, SpecialPresentation, Word};
