use std::f64::consts::TAU;

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HaldaneParams {
    pub t1: f64,
    pub t2: f64,
    pub phi: f64,
    pub mass: f64,
}

/// Translation-invariant single-particle models.
///
/// Momenta are given in reduced coordinates `k = (k1, k2) ∈ [0, 2π)²` along
/// the reciprocal vectors of the (magnetic) unit cell, and `H(k)` is written
/// in the periodic gauge, so `H(k + 2π ê) = H(k)` exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BlochModel {
    /// Honeycomb lattice, sublattices (A, B), with complex second-neighbour hopping.
    Haldane(HaldaneParams),
    /// Square lattice at flux `p/q` in a `q × 1` magnetic unit cell, Landau
    /// gauge as in the real-space builder.
    Hofstadter { p: i64, q: usize, t: f64 },
}

impl BlochModel {
    pub fn n_bands(&self) -> usize {
        match self {
            BlochModel::Haldane(_) => 2,
            BlochModel::Hofstadter { q, .. } => *q,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            BlochModel::Haldane(p) => {
                if ![p.t1, p.t2, p.phi, p.mass].iter().all(|v| v.is_finite()) {
                    return Err(Error::Config("Haldane parameters must be finite".into()));
                }
            }
            BlochModel::Hofstadter { q, t, .. } => {
                if *q == 0 || !t.is_finite() {
                    return Err(Error::Config(
                        "Hofstadter model needs q >= 1 and finite t".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn hamiltonian(&self, k: [f64; 2]) -> CMat {
        let [k1, k2] = k;
        match *self {
            BlochModel::Haldane(HaldaneParams { t1, t2, phi, mass }) => {
                // B neighbours of A sit in cells 0, -a1, -a2; the three
                // second-neighbour vectors b = (a2 - a1, -a2, a1) run
                // counter-clockwise around each sublattice.
                let b_dot_k = [k2 - k1, -k2, k1];
                let d0: f64 = 2.0 * t2 * phi.cos() * b_dot_k.iter().map(|x| x.cos()).sum::<f64>();
                let dz: f64 =
                    mass - 2.0 * t2 * phi.sin() * b_dot_k.iter().map(|x| x.sin()).sum::<f64>();
                let off = -t1
                    * (C64::new(1.0, 0.0) + C64::from_polar(1.0, -k1) + C64::from_polar(1.0, -k2));
                let mut h = Mat::<C64>::zeros(2, 2);
                h[(0, 0)] = C64::new(d0 + dz, 0.0);
                h[(1, 1)] = C64::new(d0 - dz, 0.0);
                h[(0, 1)] = off;
                h[(1, 0)] = off.conj();
                h
            }
            BlochModel::Hofstadter { p, q, t } => {
                let alpha = p as f64 / q as f64;
                let mut h = Mat::<C64>::zeros(q, q);
                for m in 0..q {
                    // y-bond at column m: -t e^{i(2π α m)} c†_{y+1} c_y  →  e^{-i k2}
                    let amp = C64::from_polar(-t, TAU * alpha * m as f64 - k2);
                    h[(m, m)] += amp + amp.conj();
                    // x-bond m → m+1, leaving the cell on the last column
                    let to = (m + 1) % q;
                    let amp = if to == 0 {
                        C64::from_polar(-t, -k1)
                    } else {
                        C64::new(-t, 0.0)
                    };
                    h[(to, m)] += amp;
                    h[(m, to)] += amp.conj();
                }
                h
            }
        }
    }
}
