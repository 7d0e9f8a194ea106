use std::f64::consts::{FRAC_PI_2, TAU};

use serde::Serialize;

use super::bundle::ManifoldBundle;
use crate::error::{Error, Result};
use crate::linalg::{determinant, identity, polar_unitary, wrap_phase, CMat, C64};

/// Overlap matrices with a smaller singular value are rejected.
pub const MIN_LINK_SINGULAR_VALUE: f64 = 1e-3;
/// Plaquette fluxes above this magnitude ask for a finer grid.
pub const REFINEMENT_FLUX: f64 = FRAC_PI_2;
/// Maximal allowed distance of the accumulated phase from `2π × integer`.
pub const WINDING_TOLERANCE: f64 = 1e-3;

/// Unitarized link `polar(V(to)† V(from))` with its smallest singular value.
fn link(to: &CMat, from: &CMat) -> Result<(CMat, f64)> {
    let m = to.adjoint() * from;
    polar_unitary(&m)
}

fn checked_link(to: &CMat, from: &CMat, ix: usize, iy: usize) -> Result<CMat> {
    let (u, sigma_min) = link(to, from)?;
    if sigma_min < MIN_LINK_SINGULAR_VALUE {
        return Err(Error::GridTooCoarse { ix, iy, sigma_min });
    }
    Ok(u)
}

/// Discretized path-ordered Wilson loop along `θx` at row `iy`:
/// `W = U_{nx-1} ⋯ U_1 U_0` with `U_i = polar(⟨ψ(θx^{i+1})|ψ(θx^i)⟩)`, the last
/// link closing the loop through the boundary gauge.
pub fn wilson_loop(bundle: &ManifoldBundle, iy: usize) -> Result<CMat> {
    let nx = bundle.grid.nx;
    let mut w = identity(bundle.dim);
    for ix in 0..nx {
        let from = bundle.frame(ix, iy);
        let u = if ix + 1 == nx {
            checked_link(&bundle.frame_wrapped(nx, iy), from, ix, iy)?
        } else {
            checked_link(bundle.frame(ix + 1, iy), from, ix, iy)?
        };
        w = &u * &w;
    }
    Ok(w)
}

/// Wilson loops over all `θy` rows and the winding of `arg det W(θy)`.
#[derive(Debug, Clone)]
pub struct WilsonLoopData {
    pub loops: Vec<CMat>,
    /// `arg det W(θy_j)` in `(−π, π]`.
    pub det_phases: Vec<f64>,
    /// Lifted phase change from row `j` to row `j + 1` (last entry closes the loop).
    pub increments: Vec<f64>,
    /// Cumulative phase, `unwrapped[0] = det_phases[0]`.
    pub unwrapped: Vec<f64>,
    /// `Σ increments`.
    pub raw_phase: f64,
    pub winding: i64,
    /// `|raw_phase / 2π − winding|`.
    pub discrepancy: f64,
    /// Largest plaquette flux magnitude on the grid.
    pub max_plaquette_flux: f64,
    /// `max_j |det W(θy_j)| − 1`, after unitarization.
    pub unitarity_defect: f64,
}

impl WilsonLoopData {
    pub fn needs_refinement(&self) -> bool {
        self.max_plaquette_flux > REFINEMENT_FLUX
    }
}

/// Computes all Wilson loops of a bundle and the winding of their determinant.
///
/// The phase change of `det W` between neighbouring rows is lifted from
/// `(−π, π]` to the real line using the plaquette fluxes of the strip
/// between the rows: each plaquette flux is branch-reduced separately, and
/// their sum differs from the naive difference of `arg det W` by a multiple
/// of `2π` only. Strips may therefore carry more than `π` as long as every
/// plaquette stays small.
pub fn wilson_loop_data(bundle: &ManifoldBundle) -> Result<WilsonLoopData> {
    let (nx, ny) = (bundle.grid.nx, bundle.grid.ny);

    let mut loops = Vec::with_capacity(ny);
    // det of unitarized x-links: xdet[ix + nx * iy]
    let mut xdet = vec![C64::new(1.0, 0.0); nx * ny];
    for iy in 0..ny {
        let mut w = identity(bundle.dim);
        for ix in 0..nx {
            let to = if ix + 1 == nx {
                bundle.frame_wrapped(nx, iy)
            } else {
                bundle.frame(ix + 1, iy).clone()
            };
            let u = checked_link(&to, bundle.frame(ix, iy), ix, iy)?;
            xdet[ix + nx * iy] = determinant(&u);
            w = &u * &w;
        }
        loops.push(w);
    }
    let mut ydet = vec![C64::new(1.0, 0.0); nx * ny];
    for iy in 0..ny {
        for ix in 0..nx {
            let to = if iy + 1 == ny {
                bundle.frame_wrapped(ix, ny)
            } else {
                bundle.frame(ix, iy + 1).clone()
            };
            let u = checked_link(&to, bundle.frame(ix, iy), ix, iy)?;
            ydet[ix + nx * iy] = determinant(&u);
        }
    }

    let dets: Vec<C64> = loops.iter().map(determinant).collect();
    let unitarity_defect = dets
        .iter()
        .map(|d| (d.norm() - 1.0).abs())
        .fold(0.0, f64::max);
    let det_phases: Vec<f64> = dets.iter().map(|d| d.arg()).collect();

    let mut increments = Vec::with_capacity(ny);
    let mut max_flux = 0.0f64;
    for iy in 0..ny {
        let up = (iy + 1) % ny;
        let mut strip = 0.0;
        for ix in 0..nx {
            let right = (ix + 1) % nx;
            // boundary links at θ = 2π coincide with those at θ = 0
            let z = xdet[ix + nx * up]
                * xdet[ix + nx * iy].conj()
                * ydet[ix + nx * iy]
                * ydet[right + nx * iy].conj();
            let flux = z.arg();
            max_flux = max_flux.max(flux.abs());
            strip += flux;
        }
        let naive = wrap_phase(det_phases[up] - det_phases[iy]);
        let slip = (strip - naive) / TAU;
        if (slip - slip.round()).abs() > 1e-6 {
            return Err(Error::Refinement {
                raw: strip / TAU,
                rounded: (strip / TAU).round() as i64,
                detail: format!(
                    "row {iy}: strip flux {strip:.6} inconsistent with det W phase step {naive:.6}"
                ),
            });
        }
        increments.push(strip);
    }

    let mut unwrapped = Vec::with_capacity(ny + 1);
    let mut acc = det_phases[0];
    unwrapped.push(acc);
    for inc in &increments {
        acc += inc;
        unwrapped.push(acc);
    }
    let raw_phase: f64 = increments.iter().sum();
    let winding = (raw_phase / TAU).round() as i64;
    let discrepancy = (raw_phase / TAU - winding as f64).abs();
    Ok(WilsonLoopData {
        loops,
        det_phases,
        increments,
        unwrapped,
        raw_phase,
        winding,
        discrepancy,
        max_plaquette_flux: max_flux,
        unitarity_defect,
    })
}

/// Result of a manifold Chern-number evaluation.
#[derive(Debug, Clone, Serialize)]
pub struct ChernResult {
    pub manifold: usize,
    pub dimension: usize,
    pub winding: i64,
    pub raw_phase: f64,
    pub grid: [usize; 2],
    pub discrepancy: f64,
    pub max_plaquette_flux: f64,
    pub refinement_warning: bool,
}

/// Total Chern number of a manifold as the winding of `det W(θy)`.
pub fn chern_winding(bundle: &ManifoldBundle) -> Result<ChernResult> {
    let data = wilson_loop_data(bundle)?;
    if data.discrepancy > WINDING_TOLERANCE {
        return Err(Error::Refinement {
            raw: data.raw_phase / TAU,
            rounded: data.winding,
            detail: format!("grid {}x{}", bundle.grid.nx, bundle.grid.ny),
        });
    }
    Ok(ChernResult {
        manifold: bundle.manifold,
        dimension: bundle.dim,
        winding: data.winding,
        raw_phase: data.raw_phase,
        grid: [bundle.grid.nx, bundle.grid.ny],
        discrepancy: data.discrepancy,
        max_plaquette_flux: data.max_plaquette_flux,
        refinement_warning: data.needs_refinement(),
    })
}
