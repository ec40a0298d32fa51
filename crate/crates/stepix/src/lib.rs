//! Step-indexed semantic types for the call-by-name lambda calculus.
//!
//! The library provides:
//!
//! - [`term`]: lambda terms with constants and `fix`, nameless internally,
//!   with parsing, printing, and capture-avoiding substitution;
//! - [`eval`]: the deterministic call-by-name small-step evaluator, traces,
//!   and the safe-for-k-steps predicate;
//! - [`types`]: finite descriptions of semantic types, including recursive
//!   types via `mu` and k-approximation `floor` wrappers;
//! - [`membership`]: bounded decision procedures for step-indexed type
//!   membership, ground substitutions, and semantic typing judgments;
//! - [`derivation`]: a syntax-directed engine deriving typing judgments
//!   from annotated terms, with equi-recursive type matching;
//! - [`harness`]: seeded generators and a property catalog machine-checking
//!   the model's lemmas at bounded index, with counterexample shrinking.
//!
//! Each major capability has a runnable example under `examples/`; the
//! `stepix` binary exposes the same functionality as subcommands.

pub mod derivation;
pub mod eval;
pub mod harness;
pub mod membership;
pub mod parser;
pub mod term;
pub mod types;

pub use derivation::{check_derivation, derive, match_arrow, type_eq, Derivation, DeriveError, Rule};
pub use eval::{safe_for, step, trace, Terminal, Trace};
pub use harness::{
    gen_any_term, gen_typed_term, guarded_catalog, run_all, run_property, shrink, Counterexample,
    GenConfig, PropertyReport,
};
pub use membership::{
    holds, models, probes_for, subst_holds, value_member, GroundSubst, ProbeConfig, QueryError,
    Verdict, Witness,
};
pub use parser::{parse_env, parse_term, parse_type, ParseError};
pub use term::{alpha_eq, resolve, resolve_closed, OpenTerm, SurfaceTerm, Term};
pub use types::{apply_functional, is_guarded, mu_unroll, TypeEnv, TypeExpr};
