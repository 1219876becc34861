//! Exact-arithmetic toolkit for stochastic mean-payoff games presented as
//! tropical Shapley operators `F = A♯ ∘ B ∘ P`.
//!
//! The crate solves and diagnoses such games without any floating point:
//!
//! - [`tropical`] — max-plus / min-plus scalars, matrices, adjoints and
//!   Hilbert-seminorm utilities over exact rationals;
//! - [`game`] — the game data `(A, B, P)`, validation, derived statistics,
//!   JSON (de)serialization and seeded random instances;
//! - [`shapley`] — Shapley operators as layer pipelines, closed under cyclic
//!   conjugation, Max/Min swapping, dualization and recession;
//! - [`vi`] — value iteration (exact, finite-precision and the perturbed
//!   rescaled variant) with predicted iteration bounds;
//! - [`oracle`] — a brute-force ground truth: positional-strategy
//!   enumeration, exact average-reward chain evaluation, saddle points,
//!   ergodic constants and Blackwell biases;
//! - [`condition`] — Collatz–Wielandt and condition numbers, feasibility
//!   certificates, inner-radius geometry and the duality report;
//! - [`cli`] — the `tropmpg` command-line front end.
//!
//! Every run of the library is deterministic given the inputs and seeds.

use std::fmt;

pub mod cli;
pub mod condition;
pub mod game;
pub mod linalg;
pub mod oracle;
pub mod shapley;
pub mod tropical;
pub mod vi;

/// Exact rational scalar used throughout the crate.
pub type Q = num_rational::BigRational;

/// Shorthand for a rational from an integer pair.
pub fn qq(num: i64, den: i64) -> Q {
    Q::new(num.into(), den.into())
}

/// Rational from an integer.
pub fn qi(v: i64) -> Q {
    Q::from_integer(v.into())
}

/// Crate-wide error type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// Expected/actual length disagree.
    DimensionMismatch(usize, usize),
    /// A matrix was created with a zero dimension.
    BadDimensions(usize, usize),
    EmptyVector,
    /// A finite rational was required but `±∞` appeared.
    NonFiniteEntry,
    NegativeRadius,
    /// The game violates a structural precondition; the payload says which.
    InvalidGame(String),
    /// Strategy or pair enumeration exceeds the configured budget.
    BudgetExceeded {
        required: u128,
        budget: u128,
    },
    /// Markov chain passed to a routine requiring irreducibility.
    ReducibleChain,
    /// Malformed input text (JSON game files, rationals, CLI vectors).
    Parse(String),
    /// Operation needs a layer structure the operator does not have.
    UnsupportedShape(String),
    /// `ε` must be positive in finite-precision mode.
    NonPositiveEpsilon,
    /// Internal invariant violated; carries a description.
    Internal(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch(want, got) => {
                write!(f, "dimension mismatch: expected {want}, got {got}")
            }
            Error::BadDimensions(r, c) => write!(f, "bad matrix dimensions {r}x{c}"),
            Error::EmptyVector => write!(f, "empty vector"),
            Error::NonFiniteEntry => write!(f, "non-finite entry where a rational was required"),
            Error::NegativeRadius => write!(f, "negative radius"),
            Error::InvalidGame(why) => write!(f, "invalid game: {why}"),
            Error::BudgetExceeded { required, budget } => {
                write!(
                    f,
                    "combinatorial budget exceeded: need {required}, budget {budget}"
                )
            }
            Error::ReducibleChain => write!(f, "chain is not irreducible"),
            Error::Parse(why) => write!(f, "parse error: {why}"),
            Error::UnsupportedShape(why) => write!(f, "unsupported operator shape: {why}"),
            Error::NonPositiveEpsilon => write!(f, "epsilon must be positive"),
            Error::Internal(why) => write!(f, "internal error: {why}"),
        }
    }
}

impl std::error::Error for Error {}

/// Parses a rational written as `p`, `p/q` or a decimal-free signed integer
/// string; used by the JSON schema and CLI flags.
pub fn parse_q(s: &str) -> Result<Q, Error> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational: {s:?}"));
    match s.split_once('/') {
        None => s
            .parse::<num_bigint::BigInt>()
            .map(Q::from_integer)
            .map_err(|_| bad()),
        Some((num, den)) => {
            let n: num_bigint::BigInt = num.trim().parse().map_err(|_| bad())?;
            let d: num_bigint::BigInt = den.trim().parse().map_err(|_| bad())?;
            if d == 0.into() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
    }
}
