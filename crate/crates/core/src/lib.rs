//! Exact-arithmetic classification of the non-redundancy growth of
//! symmetric Boolean constraint predicates.
//!
//! A symmetric predicate of arity `r` is given by its accepted Hamming
//! weights `W ⊆ {0, …, r}`. The crate computes two certified exponents
//! for each predicate:
//!
//! - an upper exponent `u(R)` from degree-`t` balancedness, decided by
//!   exact integer linear algebra (Smith normal form over `BigInt`), with
//!   capturing-polynomial certificates over prime-power moduli, and
//! - a lower exponent `ℓ(R)` from preservation of the universal partial
//!   `k`-cube operation, decided combinatorially via weight multiplicity
//!   vectors, with explicit cube-failure certificates.
//!
//! On top of those sit exhaustive non-redundancy checkers for concrete
//! CSP instances (including conditional and literal-model variants),
//! restricted-intersection set-family machinery, and a table classifier
//! covering every non-trivial predicate of arities 1–5.

pub mod balance;
pub mod classify;
pub mod cube;
pub mod error;
pub mod instance;
pub mod intlin;
pub mod predicate;
pub mod setfam;

pub use balance::{
    find_capturing_polynomial, is_t_balanced, upper_exponent, BalanceReport, CapturingPolynomial,
};
pub use classify::{classify_arity, render_csv, render_json, render_markdown, ClassificationRecord};
pub use cube::{lower_exponent, preserves_generic, preserves_symmetric, ColumnType, CubeFailure};
pub use error::{Error, Result};
pub use instance::{
    block_instance, desugar_literals, or_clique_instance, Instance, Literal, LiteralInstance,
    UnaryMap, WitnessReport,
};
pub use predicate::{enumerate_nontrivial, format_weight_set, SymmetricPredicate, TupleRelation};
pub use setfam::{
    check_pairwise, check_witness_family, exact_max_family, family_to_instance, greedy_family,
    Family, WitnessFamilyReport, WitnessTarget,
};
