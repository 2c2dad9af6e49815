//! Mean-field Toda solver.
//!
//! Unknowns are the symmetrised variables `vᵢ = uᵢ/dᵢ`, for which
//! `−Δvᵢ = Σⱼ aˢᵢⱼ λⱼ gⱼ(dⱼvⱼ)` with `gⱼ(w) = hⱼeʷ / ∫hⱼeʷ`. For simply-laced
//! algebras `d = 1` and this is the original system.

mod continuation;
mod deflation;
mod energy;
mod newton;
mod problem;
mod state;

pub use continuation::{continuation, ContinuationBranch, ContinuationOptions, ContinuationPoint};
pub use deflation::{deflated_search, DeflationOptions, DeflationReport, StartOutcome};
pub use energy::{energy, energy_directional_derivative, energy_of_v};
pub use newton::{newton_solve, newton_solve_from_v, NewtonOptions};
pub use problem::{Linearization, TodaProblem};
pub use state::{residual, TodaState};

#[cfg(test)]
mod tests;
