//! Topological classification of mixed many-body states.
//!
//! The crate computes the spectral structure of `-log ρ` for thermal
//! states (manifolds of eigenvalues separated by gaps), and the total Chern
//! number carried by each gapped manifold through the winding of its
//! `U(N)` Wilson loop over twisted boundary conditions. Supporting layers
//! build the interacting Hofstadter-Hubbard model in a fixed-particle Fock
//! basis, analyse the analytic two-band toy model, and treat open systems
//! through vectorised Lindblad generators.

pub mod error;
pub mod linalg;
pub mod lindblad;
pub mod models;
pub mod spectral;
pub mod sweep;
pub mod topology;
pub mod toymodel;

pub use error::{Error, Result};
pub use linalg::{CMat, C64};
pub use lindblad::{LindbladSpectrum, LindbladSystem};
pub use models::{BlochModel, FockBasis, LatticeModelSpec};
pub use spectral::{EigenSystem, SpectralStructure, ThermalEnsemble};
pub use topology::{ManifoldBundle, TwistGrid, WilsonLoopData};
pub use toymodel::{ToyBandModel, ToyClassification};
