//! Numerical verification laboratory for exact identities of local harmonic
//! analysis on the real line: Tate gamma-factor calculus, rank-one scattering
//! and transfer-operator scalars, and the Hankel transform attached to the
//! standard L-function of GL(n), checked against the matrix Fourier transform
//! at desk scale (n = 1, 2; n = 3 behind a slow flag).
//!
//! The crate is organized around a small set of exact objects (characters,
//! formal gamma products, Gaussian wave packets) plus one deterministic
//! oscillatory-quadrature engine. Every identity is verified by evaluating
//! both sides through independent code paths.

pub mod error;
pub mod special;
pub mod field;
pub mod gamma;
pub mod zeta;
pub mod grid;
pub mod quad;
pub mod mellin;
pub mod packet;
pub mod cases;
pub mod transfer;
pub mod kuznetsov;
pub mod symplectic;
pub mod report;
pub mod config;
pub mod suites;

pub use error::Error;

/// Crate result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Rational scalar for exact table arithmetic.
pub type Rat = num_rational::Ratio<i64>;
