use faer::Mat;

use super::fock::{hop_sign, FockBasis};
use super::lattice::LatticeModelSpec;
use super::translation::TranslationSectors;
use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};
use crate::spectral::{eigendecompose, eigenvalues, EigenSystem};

/// Largest Fock-space dimension represented as a dense matrix.
pub const MAX_DENSE_DIM: usize = 4096;

/// `H = H_t + H_int + H_pot` in the fixed-`N` sector spanned by `basis`.
pub fn build_many_body_hamiltonian(spec: &LatticeModelSpec, basis: &FockBasis) -> Result<CMat> {
    spec.validate()?;
    if basis.sites() != spec.sites() || basis.particles() != spec.n_particles {
        return Err(Error::Config(format!(
            "basis ({} sites, {} particles) does not match model ({} sites, {} particles)",
            basis.sites(),
            basis.particles(),
            spec.sites(),
            spec.n_particles
        )));
    }
    let dim = basis.len();
    if dim > MAX_DENSE_DIM {
        return Err(Error::Resource {
            what: "many-body Hamiltonian",
            dim,
            cap: MAX_DENSE_DIM,
        });
    }

    let bonds = spec.bonds();
    let wells: u64 = if spec.g != 0.0 {
        spec.well_sites().iter().fold(0, |m, &j| m | (1u64 << j))
    } else {
        0
    };
    let mut h = Mat::<C64>::zeros(dim, dim);
    for (col, &s) in basis.states().iter().enumerate() {
        let mut diag = 0.0;
        for b in &bonds {
            let (f, t) = (1u64 << b.from, 1u64 << b.to);
            if b.from != b.to && s & f != 0 && s & t != 0 {
                diag += spec.u;
            }
            // Only the forward term is generated here; its conjugate is
            // written to the mirrored entry.
            if s & f != 0 && s & t == 0 {
                let target = s ^ f ^ t;
                let row = basis
                    .index(target)
                    .expect("hopping preserves particle number");
                let amp = C64::from_polar(-spec.t * hop_sign(s, b.from, b.to), b.phase);
                h[(row, col)] += amp;
                h[(col, row)] += amp.conj();
            }
        }
        diag -= spec.g * (s & wells).count_ones() as f64;
        h[(col, col)] += C64::new(diag, 0.0);
    }
    Ok(h)
}

/// The many-body Hamiltonian as a function of the twist angles.
#[derive(Debug, Clone)]
pub struct TwistedLattice {
    spec: LatticeModelSpec,
    basis: FockBasis,
    gauge_x: Vec<C64>,
    gauge_y: Vec<C64>,
    sectors: Option<TranslationSectors>,
}

impl TwistedLattice {
    pub fn new(spec: LatticeModelSpec) -> Result<Self> {
        spec.validate()?;
        let dim = crate::models::fock::binomial(spec.sites(), spec.n_particles);
        if dim > MAX_DENSE_DIM as u128 {
            return Err(Error::Resource {
                what: "many-body Hamiltonian",
                dim: dim.min(usize::MAX as u128) as usize,
                cap: MAX_DENSE_DIM,
            });
        }
        let basis = FockBasis::new(spec.sites(), spec.n_particles)?;
        let gauge = |along_x: bool| {
            let site_phase = spec.boundary_gauge(along_x);
            basis
                .states()
                .iter()
                .map(|&s| {
                    let total: f64 = (0..spec.sites())
                        .filter(|&j| s >> j & 1 == 1)
                        .map(|j| site_phase[j])
                        .sum();
                    C64::from_polar(1.0, total)
                })
                .collect::<Vec<_>>()
        };
        let gauge_x = gauge(true);
        let gauge_y = gauge(false);
        let sectors = TranslationSectors::new(&spec, &basis);
        Ok(Self {
            spec,
            basis,
            gauge_x,
            gauge_y,
            sectors,
        })
    }

    pub fn spec(&self) -> &LatticeModelSpec {
        &self.spec
    }

    pub fn basis(&self) -> &FockBasis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn hamiltonian(&self, theta_x: f64, theta_y: f64) -> Result<CMat> {
        build_many_body_hamiltonian(&self.spec.with_twist(theta_x, theta_y), &self.basis)
    }

    /// Turns the translation-sector block diagonalization on or off.
    pub fn with_symmetry_reduction(mut self, on: bool) -> Self {
        self.sectors = if on {
            TranslationSectors::new(&self.spec, &self.basis)
        } else {
            None
        };
        self
    }

    pub fn sectors(&self) -> Option<&TranslationSectors> {
        self.sectors.as_ref()
    }

    pub fn eigensystem_at(&self, theta_x: f64, theta_y: f64) -> Result<EigenSystem> {
        let h = self.hamiltonian(theta_x, theta_y)?;
        match &self.sectors {
            Some(s) => s.eigensystem(&h),
            None => eigendecompose(&h),
        }
    }

    pub fn eigenvalues_at(&self, theta_x: f64, theta_y: f64) -> Result<Vec<f64>> {
        let h = self.hamiltonian(theta_x, theta_y)?;
        match &self.sectors {
            Some(s) => s.eigenvalues(&h),
            None => eigenvalues(&h),
        }
    }

    /// Diagonal of `G` with `H(θ + 2π ê) = G H(θ) G†` for the chosen direction.
    pub fn boundary_gauge(&self, along_x: bool) -> &[C64] {
        if along_x {
            &self.gauge_x
        } else {
            &self.gauge_y
        }
    }
}
