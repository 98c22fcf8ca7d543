//! Symbolic verification and conversion toolkit for λ-symmetries,
//! telescopic vector fields and nonlocal symmetries of ordinary
//! differential equations.
//!
//! Everything is exact: coefficients are arbitrary-precision rationals and
//! every verdict comes from a decidable zero test on a canonical rational
//! normal form. There is no floating point anywhere in the core.

pub mod checks;
pub mod equiv;
pub mod error;
pub mod expr;
pub mod fixtures;
pub mod jet;
pub mod linexp;
pub mod normal;
pub mod numeric;
pub mod parallel;
pub mod parse;
pub mod poly;
pub mod prolong;
pub mod render;
pub mod symbol;
pub mod transforms;

pub use checks::{
    check_covering_symmetry, check_determining, check_lambda_symmetry, check_lie_point,
    check_telescopic, verify_psi, CheckReport, Route, Verdict,
};
pub use equiv::{
    a_equivalent, canonical_pair, characteristic, check_invariants, derive_reduction,
    invariant_chain, verify_reduction, ReducedEquation,
};
pub use error::{Error, Result};
pub use expr::Expr;
pub use jet::{total_derivative, Covering, OdeProblem};
pub use normal::{expr_eq, is_zero, normalize, NormalForm};
pub use parallel::{run_batch, run_batch_seq};
pub use parse::parse;
pub use prolong::{
    bracket_defect, covering_prolong, lambda_prolong, std_prolong, BracketReport, LambdaPair,
    TelescopicField,
};
pub use render::render;
pub use transforms::{
    exponential_pair, invariants_to_lambda, lambda_to_covering, nonlocal_to_lambda, rescale_pair,
    telescopic_to_lambda, ExponentialForm, InvariantPair, LambdaCovering, NonlocalSymmetry,
};
