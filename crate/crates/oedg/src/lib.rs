//! Oscillation-eliminating discontinuous Galerkin schemes for special and
//! general relativistic hydrodynamics on uniform Cartesian meshes.
//!
//! The solver evolves the W-form of the relativistic Euler equations,
//! obtained by rescaling the ADM conserved variables with the Cholesky
//! factor of the spatial metric. Positivity of density and pressure and
//! subluminal velocity are enforced throughout: the HLL flux together with
//! a convex cell-average decomposition keeps updated cell averages
//! admissible, a two-step scaling limiter repairs point values, and the
//! primitive-variable recovery uses provably convergent iterations whose
//! iterates stay nonnegative.
//!
//! The main entry points are [`problems::builtin`] for the bundled test
//! problems, [`time_loop::run`] to advance one of them, and the thin
//! `oedg` binary exposing `run`, `convergence`, `list`, and `verify`
//! subcommands. Each major capability also has a runnable example under
//! `examples/`.

pub mod basis;
pub mod cli;
pub mod dg;
pub mod eos;
pub mod error;
pub mod field;
pub mod mesh;
pub mod metric;
pub mod oe;
pub mod pcp;
pub mod problems;
pub mod recovery;
pub mod time_loop;
pub mod verify;

pub use error::SolverError;
