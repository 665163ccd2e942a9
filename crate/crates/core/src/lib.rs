//! Exact arithmetic of quadratic Dirichlet L-functions over F_q[T] with
//! prime conductor, their hybrid Euler-Hadamard decomposition, and a
//! family-sweep harness that compares empirical moments against
//! closed-form random-matrix predictions.
//!
//! The crate is organized around the pipeline
//!
//! ```text
//! poly/factor -> characters -> lfun -> hybrid
//!                                \-> sweep/moments vs predictions
//! ```
//!
//! Everything on the L-function side is exact: central values live in the
//! ring Q + Q*q^(-1/2) ([`quad::QuadValue`]), so the approximate functional
//! equation is a bit-exact identity and family moments are exact rationals.
//! Floating point only enters for zeros, the hybrid factors, and reports.

pub mod cache;
pub mod characters;
pub mod cli;
pub mod factor;
pub mod field;
pub mod hybrid;
pub mod lfun;
pub mod moments;
pub mod poly;
pub mod predictions;
pub mod quad;
pub mod roots;
pub mod special;
pub mod sweep;

pub use characters::{residue_symbol, CharTable, Conductor, Symbol};
pub use factor::{count_irreducible, factorize, is_irreducible, squarefree_split, von_mangoldt, FactorTable, Factorization};
pub use field::Field;
pub use lfun::{LRecord, ZeroData};
pub use poly::Poly;
pub use quad::QuadValue;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid field parameter: {0}")]
    Field(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("division by zero polynomial")]
    DivisionByZero,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("central value mismatch between polynomial and two-sum forms for {0} (symbol or coefficient bug)")]
    CentralMismatch(String),
    #[error("root finder failed to converge: {0}")]
    RootsNonConvergent(String),
    #[error("zero-sum truncation did not meet its tail bound (tol too small or bump too wide)")]
    TruncationNonConvergent,
    #[error("quadrature did not reach the requested tolerance")]
    QuadratureNonConvergent,
    #[error("pole of zeta_A at s = 1")]
    ZetaPole,
    #[error("cache error: {0}")]
    Cache(String),
    #[error("incomplete cache: {0}")]
    IncompleteCache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
