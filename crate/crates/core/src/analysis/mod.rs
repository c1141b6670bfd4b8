//! Analyses of the assembled one-step operators.

mod dispersion;
mod me;
mod spectrum;
mod vn;

pub use dispersion::{dispersion_curve, DispersionMode, DispersionSample};
pub use me::{modified_equation, symbol, zero_diffusion_omega, MeProvenance, MeReport};
pub use spectrum::{
    block_symbol_radius, spectrum_sweep, spectrum_sweep_omega, BoundaryModel, SpectrumReport, SweepVariable,
    MERGE_THRESHOLD,
};
pub use vn::{max_amplification, stencil_max_amplification, vn_stability_limit, vn_table, VnScan, STABILITY_SLACK};
