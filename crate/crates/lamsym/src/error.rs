//! Crate-wide error type.

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid symbol-table declaration (bad name, duplicate, reserved word).
    #[error("declaration error: {0}")]
    BadDeclaration(String),

    /// A jet variable past the pre-declared cap was requested.
    #[error("jet variable `{name}` exceeds the table cap of {cap}; raise the cap when building the table")]
    JetCap { name: String, cap: u16 },

    /// Syntax or name error in expression text; `offset` is a byte offset.
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    /// A power with a parameter in its exponent has a non-atomic base.
    #[error("symbolic exponent requires an atomic base (variable, parameter, opaque function or exp)")]
    SymbolicPowerBase,

    /// Exponent arithmetic left the integer-parameter lattice.
    #[error("exponent is outside the integer-parameter lattice")]
    NonLatticeExponent,

    /// Division by a literal zero at construction time.
    #[error("division by literal zero")]
    DivisionByZero,

    /// An identically-zero denominator surfaced during normalization.
    #[error("identically-zero denominator")]
    ZeroDenominator,

    /// Derivative with respect to a parameter that occurs in an exponent;
    /// the result would leave the rational class.
    #[error("derivative with respect to `{param}` occurring in an exponent is not rational")]
    NonRationalDerivative { param: String },

    /// The binding set of a substitution has a cycle.
    #[error("cyclic substitution bindings")]
    CyclicSubstitution,

    /// A substitution targets the argument of an opaque atom present in the
    /// expression; the chain rule through opaque arguments is unsupported.
    #[error("cannot substitute `{var}`: it is an opaque argument of `{atom}`")]
    OpaqueArgSubstitution { var: String, atom: String },

    /// A parameter occurring in an exponent was bound to something other
    /// than an integer literal or another parameter.
    #[error("`{param}` occurs in an exponent; it can only be bound to an integer or a parameter")]
    ExponentSubstitution { param: String },

    /// Structural invariant violation on a domain object.
    #[error("{0}")]
    Validation(String),

    /// A required quantity is identically zero or otherwise degenerate.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A theorem hypothesis fails for the given data.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    /// Two independent computations that must agree did not; a bug here,
    /// never a statement about the input.
    #[error("internal inconsistency: {0}")]
    Internal(String),
}
