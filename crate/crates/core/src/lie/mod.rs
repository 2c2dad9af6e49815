//! Cartan matrices of the simple Lie algebras and their spectral data.

mod cartan;
mod family;
pub mod rational;
mod spectrum;
mod threshold;

pub use cartan::{build_cartan, symmetric_decomposition, CartanMatrix, SymmetricDecomposition};
pub use family::{Family, LieFamily};
pub use spectrum::{
    char_recursion, dense_symmetric_spectrum, nonsymmetric_spectral_radius, recursion_root,
    spectral_radius, verify_radius_bounds, RadiusBoundsReport, RadiusRow, RecursionKind,
    SpectrumMethod, SpectrumReport, RHO_E6, RHO_E7, RHO_E8, RHO_F4_S, RHO_G2_S,
};
pub use threshold::{uniqueness_thresholds, ThresholdReport, SAFE_BOUND};
