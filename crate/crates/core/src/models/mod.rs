//! Lattice models: single-particle Peierls hopping matrices, Bloch
//! Hamiltonians, and the interacting Hofstadter-Hubbard model in a
//! fixed-particle-number Fock basis.

mod bloch;
pub(crate) mod fock;
mod lattice;
mod many_body;
mod translation;

pub use bloch::{BlochModel, HaldaneParams};
pub use fock::FockBasis;
pub use lattice::{build_single_particle_hamiltonian, Bond, BondKind, LatticeModelSpec};
pub use many_body::{build_many_body_hamiltonian, TwistedLattice, MAX_DENSE_DIM};
pub use translation::TranslationSectors;
