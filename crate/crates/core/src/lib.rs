//! Scattering resonances of a spherical gas bubble in a weakly compressible
//! liquid, and the resonance expansions of its shape and velocity potential.
//!
//! Layout:
//! - [`params`]: physical parameters and the stiffness `r̂_l`.
//! - [`hankel`]: outgoing spherical Hankel polynomials and the exact
//!   logarithmic derivative `G_l`, evaluated with big Gaussian integers.
//! - [`resonance`]: rigid and deformation resonances, residues, asymptotics
//!   and the spectral gap.
//! - [`scan`]: the least-damped degree `l⋆(ε)` and scaling fits.
//! - [`modes`]: spherical harmonics, mode evolution, field assembly and
//!   decay-envelope checks.
//! - [`verify`]: randomized identity checks on the special functions.
//! - [`io`]: run configuration and CSV/JSON tables.
//! - [`parallel`]: the worker pool, capped by `BUBRES_THREADS`.
//!
//! Supporting pieces: [`cpoly`] (complex polynomials, Aberth iteration),
//! [`exact`] (exact dyadic arithmetic), [`airy`] (Airy zeros for seeds).

pub mod cpoly;
pub mod error;
pub mod exact;
pub mod hankel;
pub mod params;
pub mod airy;
pub mod resonance;
pub mod scan;
pub mod modes;
pub mod io;
pub mod verify;
pub mod parallel;
