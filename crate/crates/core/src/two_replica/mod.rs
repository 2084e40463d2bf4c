//! Averaged 2-replica dynamics in the 7-symbol basis of pairings with pinned legs.

pub mod analytics;
pub mod chain;
pub mod dense;
pub mod gram;
pub mod lightcone;
pub mod transition;

pub use analytics::{
    critical_lambda, otoc_plateau, page_curve, purity_saturation, purity_saturation_asymptotic,
    OtocPlateau,
};
pub use chain::{
    apply_layer, initial_state, measure_renyi2, open_chain_otoc, open_chain_series, overlap_vector,
    purity_series, renyi2_series, PairConfigState, Parity,
    SiteOverlapVector,
};
pub use dense::{Amplitudes, DEFAULT_MAX_AMPLITUDES};
pub use gram::{closed_form_gram, GramData, Kernel, Symbol};
pub use lightcone::{evolve_lightcone, otoc_direct, otoc_series, otoc_split, LightconeState};
pub use transition::{branch_crossing, growth_fit, plateau_density, BranchCrossing};
