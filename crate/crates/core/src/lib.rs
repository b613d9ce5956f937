//! Spectral analysis of the symmetric Al-Salam–Chihara difference operator.
//!
//! The crate is layered bottom-up:
//!
//! * [`qcore`]: q-Pochhammer symbols, theta, basic hypergeometric series.
//! * [`polyrec`]: the polynomial families and the logarithmic grids.
//! * [`operator`]: the doubly-infinite Jacobi operator, its truncations and
//!   a tridiagonal eigensolver.
//! * [`eigenfun`]: closed-form solutions of the eigenvalue equation and the
//!   Wronskian.
//! * [`measures`]: discrete orthogonality measures and their checks.
//! * [`identities`]: numerical verification of the summation formulas.

pub mod eigenfun;
pub mod error;
pub mod identities;
pub mod measures;
pub mod operator;
pub mod polyrec;
pub mod qcore;

pub use error::{Error, Result};
pub use qcore::{QParams, SeriesResult, C64, DEFAULT_TOL};
