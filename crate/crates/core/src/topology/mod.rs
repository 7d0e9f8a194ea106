//! Chern invariants of gapped manifolds: twist-angle bundles, `U(N)` Wilson
//! loops and their determinant winding, and plaquette Chern numbers of
//! Bloch bands.

mod bands;
mod bundle;
mod wilson;

pub use bands::{band_chern_groups, plaquette_band_chern, BandGroup, DEFAULT_BAND_GAP};
pub use bundle::{
    build_bundles_for_windows, build_manifold_bundle, build_manifold_bundles, random_unitary,
    ManifoldBundle, ParameterFamily, TwistGrid,
};
pub use wilson::{
    chern_winding, wilson_loop, wilson_loop_data, ChernResult, WilsonLoopData,
    MIN_LINK_SINGULAR_VALUE, REFINEMENT_FLUX, WINDING_TOLERANCE,
};
