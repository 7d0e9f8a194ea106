use std::f64::consts::TAU;

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};

/// Parameters of the Hofstadter-Hubbard model on an `lx × ly` torus.
///
/// Energies are in units of the hopping `t`. The flux per plaquette is the
/// rational `alpha_num / alpha_den`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeModelSpec {
    pub lx: usize,
    pub ly: usize,
    pub alpha_num: i64,
    pub alpha_den: i64,
    #[serde(default = "one")]
    pub t: f64,
    #[serde(default)]
    pub u: f64,
    #[serde(default)]
    pub g: f64,
    pub n_particles: usize,
    #[serde(default)]
    pub theta_x: f64,
    #[serde(default)]
    pub theta_y: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BondKind {
    X,
    Y,
}

/// Directed nearest-neighbour bond. The hopping term is
/// `-t e^{i phase} c†_to c_from + h.c.`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bond {
    pub from: usize,
    pub to: usize,
    pub kind: BondKind,
    pub phase: f64,
}

impl LatticeModelSpec {
    /// The 4×6 torus at flux 1/8 with three particles.
    pub fn hofstadter_hubbard(u: f64, g: f64) -> Self {
        Self {
            lx: 4,
            ly: 6,
            alpha_num: 1,
            alpha_den: 8,
            t: 1.0,
            u,
            g,
            n_particles: 3,
            theta_x: 0.0,
            theta_y: 0.0,
        }
    }

    pub fn with_twist(&self, theta_x: f64, theta_y: f64) -> Self {
        Self {
            theta_x,
            theta_y,
            ..self.clone()
        }
    }

    pub fn sites(&self) -> usize {
        self.lx * self.ly
    }

    pub fn alpha(&self) -> f64 {
        self.alpha_num as f64 / self.alpha_den as f64
    }

    /// Site index `j = jx + lx * jy`.
    pub fn site(&self, jx: usize, jy: usize) -> usize {
        jx + self.lx * jy
    }

    pub fn coords(&self, j: usize) -> (usize, usize) {
        (j % self.lx, j / self.lx)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lx == 0 || self.ly == 0 {
            return Err(Error::Config(format!(
                "lattice {}x{} is empty",
                self.lx, self.ly
            )));
        }
        if self.alpha_den <= 0 {
            return Err(Error::Config(format!(
                "flux denominator {} must be positive",
                self.alpha_den
            )));
        }
        let quanta = self.alpha_num as i128 * (self.lx * self.ly) as i128;
        if quanta % self.alpha_den as i128 != 0 {
            return Err(Error::Config(format!(
                "flux {}/{} on a {}x{} torus gives a non-integer number of flux quanta",
                self.alpha_num, self.alpha_den, self.lx, self.ly
            )));
        }
        if self.g != 0.0 && (self.lx % 4 != 0 || self.ly % 2 != 0) {
            return Err(Error::Config(format!(
                "superlattice needs lx % 4 == 0 and ly % 2 == 0, got {}x{}",
                self.lx, self.ly
            )));
        }
        if self.n_particles > self.sites() {
            return Err(Error::Config(format!(
                "{} particles do not fit on {} sites",
                self.n_particles,
                self.sites()
            )));
        }
        for (name, v) in [
            ("t", self.t),
            ("u", self.u),
            ("g", self.g),
            ("theta_x", self.theta_x),
            ("theta_y", self.theta_y),
        ] {
            if !v.is_finite() {
                return Err(Error::Config(format!("{name} is not finite")));
            }
        }
        Ok(())
    }

    /// Directed bonds along +x and +y with Peierls and twist phases.
    ///
    /// Landau gauge: a y-bond at column `jx` carries `2π α jx`. The x-bonds
    /// closing the torus (`jx = lx-1 → 0`) carry `-2π α lx jy`, so that every
    /// plaquette, including those across the seams, encloses flux `α`. The
    /// twists add `θx/lx` to every x-bond and `θy/ly` to every y-bond.
    pub fn bonds(&self) -> Vec<Bond> {
        let alpha = self.alpha();
        let mut bonds = Vec::with_capacity(2 * self.sites());
        for jy in 0..self.ly {
            for jx in 0..self.lx {
                let from = self.site(jx, jy);
                if self.lx > 1 {
                    let wraps = jx + 1 == self.lx;
                    let peierls = if wraps {
                        -TAU * alpha * (self.lx * jy) as f64
                    } else {
                        0.0
                    };
                    bonds.push(Bond {
                        from,
                        to: self.site((jx + 1) % self.lx, jy),
                        kind: BondKind::X,
                        phase: peierls + self.theta_x / self.lx as f64,
                    });
                }
                if self.ly > 1 {
                    bonds.push(Bond {
                        from,
                        to: self.site(jx, (jy + 1) % self.ly),
                        kind: BondKind::Y,
                        phase: TAU * alpha * jx as f64 + self.theta_y / self.ly as f64,
                    });
                }
            }
        }
        bonds
    }

    /// Sites carrying the attractive superlattice potential.
    pub fn well_sites(&self) -> Vec<usize> {
        (0..self.sites())
            .filter(|&j| {
                let (jx, jy) = self.coords(j);
                jx % 4 == 0 && jy % 2 == 0
            })
            .collect()
    }

    /// Per-site phases of the gauge transformation that maps the twist
    /// `θx` onto `θx + 2π` (`along_x`) or likewise for `θy`.
    pub fn boundary_gauge(&self, along_x: bool) -> Vec<f64> {
        (0..self.sites())
            .map(|j| {
                let (jx, jy) = self.coords(j);
                if along_x {
                    TAU * jx as f64 / self.lx as f64
                } else {
                    TAU * jy as f64 / self.ly as f64
                }
            })
            .collect()
    }
}

/// Hopping matrix `H_ij` of a single particle, plus the superlattice potential.
pub fn build_single_particle_hamiltonian(spec: &LatticeModelSpec) -> Result<CMat> {
    spec.validate()?;
    let n = spec.sites();
    let mut h = Mat::<C64>::zeros(n, n);
    for b in spec.bonds() {
        let amp = C64::from_polar(-spec.t, b.phase);
        h[(b.to, b.from)] += amp;
        h[(b.from, b.to)] += amp.conj();
    }
    if spec.g != 0.0 {
        for j in spec.well_sites() {
            h[(j, j)] += C64::new(-spec.g, 0.0);
        }
    }
    Ok(h)
}
