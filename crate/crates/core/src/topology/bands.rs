use std::ops::Range;

use rayon::prelude::*;

use super::bundle::{ManifoldBundle, TwistGrid};
use super::wilson::{chern_winding, ChernResult};
use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::models::BlochModel;
use crate::spectral::eigendecompose;

/// Minimal direct gap tolerated around a band group on the k-grid.
pub const DEFAULT_BAND_GAP: f64 = 1e-6;

/// Chern number of the bands `bands` (0-based, energy-ordered) from the
/// plaquette field strength on an `n_k × n_k` grid.
pub fn plaquette_band_chern(
    model: &BlochModel,
    bands: Range<usize>,
    n_k: usize,
    min_gap: f64,
) -> Result<ChernResult> {
    model.validate()?;
    let nb = model.n_bands();
    if bands.is_empty() || bands.end > nb {
        return Err(Error::Config(format!(
            "band range {bands:?} outside 0..{nb}"
        )));
    }
    let grid = TwistGrid::new(n_k, n_k)?;
    let spectra = sample(model, grid)?;
    let mut frames = Vec::with_capacity(grid.len());
    let mut smallest = f64::INFINITY;
    for (idx, (values, vectors)) in spectra.into_iter().enumerate() {
        let below = if bands.start > 0 {
            values[bands.start] - values[bands.start - 1]
        } else {
            f64::INFINITY
        };
        let above = if bands.end < nb {
            values[bands.end] - values[bands.end - 1]
        } else {
            f64::INFINITY
        };
        let gap = below.min(above);
        if gap < min_gap {
            let (kx, ky) = grid.theta(idx % n_k, idx / n_k);
            return Err(Error::GapClosed {
                theta_x: kx,
                theta_y: ky,
                gap,
                threshold: min_gap,
            });
        }
        smallest = smallest.min(gap);
        frames.push(vectors.subcols(bands.start, bands.len()).to_owned());
    }
    let mut bundle = ManifoldBundle::new(bands.start + 1, bands.start, grid, frames, None, None)?;
    bundle.min_gap = smallest;
    chern_winding(&bundle)
}

/// A maximal set of consecutive bands whose mutual gaps close somewhere on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BandGroup {
    pub bands: Range<usize>,
    pub chern: i64,
}

/// Splits all bands into isolated groups (gaps at least `min_gap` over the
/// whole grid) and returns the Chern number of each.
pub fn band_chern_groups(model: &BlochModel, n_k: usize, min_gap: f64) -> Result<Vec<BandGroup>> {
    model.validate()?;
    let nb = model.n_bands();
    let grid = TwistGrid::new(n_k, n_k)?;
    let spectra = sample(model, grid)?;
    let mut gap = vec![f64::INFINITY; nb.saturating_sub(1)];
    for (values, _) in &spectra {
        for b in 0..nb - 1 {
            gap[b] = gap[b].min(values[b + 1] - values[b]);
        }
    }
    let mut groups = Vec::new();
    let mut start = 0;
    for b in 0..nb {
        if b + 1 == nb || gap[b] >= min_gap {
            let bands = start..b + 1;
            let chern = plaquette_band_chern(model, bands.clone(), n_k, min_gap)?.winding;
            groups.push(BandGroup { bands, chern });
            start = b + 1;
        }
    }
    Ok(groups)
}

fn sample(model: &BlochModel, grid: TwistGrid) -> Result<Vec<(Vec<f64>, CMat)>> {
    (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let (kx, ky) = grid.theta(idx % grid.nx, idx / grid.nx);
            let es = eigendecompose(&model.hamiltonian([kx, ky]))?;
            Ok((es.values, es.vectors))
        })
        .collect()
}
