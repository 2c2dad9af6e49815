//! Numerical laboratory for singular mean-field Toda systems.
//!
//! The crate is organised bottom-up:
//!
//! * [`lie`]: exact Cartan matrices of all simple Lie algebras, their
//!   symmetrisation `A = D·Aˢ`, spectra and the uniqueness thresholds
//!   `λᵢˢ ≤ 8π/ρ(Aˢ)`.
//! * [`grid`]: five-point finite differences on the unit square with
//!   Dirichlet data, discrete Green's functions and singular weights.
//! * [`solver`]: damped Newton, natural continuation from the trivial
//!   branch and deflated multistart search for the system
//!   `−Δuᵢ = Σⱼ aᵢⱼ λⱼ hⱼe^{uⱼ} / ∫hⱼe^{uⱼ}`.
//! * [`spectra`]: linearised eigenproblems and the non-degeneracy
//!   certificate built on them.
//! * [`linalg`]: the small amount of numerical linear algebra the rest
//!   needs (banded Cholesky, restarted GMRES, Lanczos).

pub mod error;
pub mod grid;
pub mod lie;
pub mod linalg;
pub mod solver;
pub mod spectra;

pub use error::{Result, TodaError};
pub use grid::{DomainGrid, FPreset, GridField, SingularSource, WeightField};
pub use lie::{
    CartanMatrix, Family, LieFamily, SpectrumMethod, SpectrumReport, SymmetricDecomposition,
    ThresholdReport,
};
pub use solver::{ContinuationBranch, NewtonOptions, TodaProblem, TodaState};
pub use spectra::{EigenReport, Verdict};
