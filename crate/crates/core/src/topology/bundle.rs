use std::f64::consts::TAU;
use std::ops::Range;

use faer::Mat;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};
use crate::models::{BlochModel, TwistedLattice};
use crate::spectral::{detect_manifolds, eigendecompose, EigenSystem};

/// Closed grid of twist angles `θ = (2π i / nx, 2π j / ny)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwistGrid {
    pub nx: usize,
    pub ny: usize,
}

impl TwistGrid {
    pub fn new(nx: usize, ny: usize) -> Result<Self> {
        if nx < 4 || ny < 4 {
            return Err(Error::Config(format!(
                "twist grid {nx}x{ny} is below the 4x4 minimum"
            )));
        }
        Ok(Self { nx, ny })
    }

    pub fn theta(&self, ix: usize, iy: usize) -> (f64, f64) {
        (
            TAU * ix as f64 / self.nx as f64,
            TAU * iy as f64 / self.ny as f64,
        )
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A Hamiltonian depending smoothly on two periodic angles.
///
/// Going once around either angle returns a unitarily equivalent operator,
/// `H(θ + 2π ê) = G H(θ) G†`, with `G` diagonal in the working basis.
pub trait ParameterFamily: Sync {
    fn dim(&self) -> usize;

    fn hamiltonian(&self, theta_x: f64, theta_y: f64) -> Result<CMat>;

    /// Diagonal of `G` for the given direction, `None` when `G = 1`.
    fn boundary_gauge(&self, along_x: bool) -> Option<&[C64]>;

    fn eigensystem(&self, theta_x: f64, theta_y: f64) -> Result<EigenSystem> {
        eigendecompose(&self.hamiltonian(theta_x, theta_y)?)
    }
}

impl ParameterFamily for TwistedLattice {
    fn dim(&self) -> usize {
        TwistedLattice::dim(self)
    }

    fn hamiltonian(&self, theta_x: f64, theta_y: f64) -> Result<CMat> {
        TwistedLattice::hamiltonian(self, theta_x, theta_y)
    }

    fn boundary_gauge(&self, along_x: bool) -> Option<&[C64]> {
        Some(TwistedLattice::boundary_gauge(self, along_x))
    }

    fn eigensystem(&self, theta_x: f64, theta_y: f64) -> Result<EigenSystem> {
        self.eigensystem_at(theta_x, theta_y)
    }
}

impl ParameterFamily for BlochModel {
    fn dim(&self) -> usize {
        self.n_bands()
    }

    fn hamiltonian(&self, kx: f64, ky: f64) -> Result<CMat> {
        Ok(BlochModel::hamiltonian(self, [kx, ky]))
    }

    fn boundary_gauge(&self, _along_x: bool) -> Option<&[C64]> {
        None
    }
}

/// Orthonormal frames of one manifold over a twist grid.
#[derive(Debug, Clone)]
pub struct ManifoldBundle {
    /// 1-based manifold label (1 = lowest).
    pub manifold: usize,
    /// Level window `[start, start + dim)` in the energy-sorted spectrum.
    pub start: usize,
    pub dim: usize,
    pub grid: TwistGrid,
    /// Row-major over the grid: `frames[ix + nx * iy]`.
    pub frames: Vec<CMat>,
    gauge_x: Option<Vec<C64>>,
    gauge_y: Option<Vec<C64>>,
    /// Smallest bounding gap seen anywhere on the grid.
    pub min_gap: f64,
}

impl ManifoldBundle {
    pub fn new(
        manifold: usize,
        start: usize,
        grid: TwistGrid,
        frames: Vec<CMat>,
        gauge_x: Option<Vec<C64>>,
        gauge_y: Option<Vec<C64>>,
    ) -> Result<Self> {
        if frames.len() != grid.len() {
            return Err(Error::Config(format!(
                "{} frames for a grid of {} points",
                frames.len(),
                grid.len()
            )));
        }
        let dim = frames[0].ncols();
        if frames
            .iter()
            .any(|f| f.ncols() != dim || f.nrows() != frames[0].nrows())
        {
            return Err(Error::Config("frames differ in shape".into()));
        }
        Ok(Self {
            manifold,
            start,
            dim,
            grid,
            frames,
            gauge_x,
            gauge_y,
            min_gap: f64::INFINITY,
        })
    }

    pub fn frame(&self, ix: usize, iy: usize) -> &CMat {
        &self.frames[ix + self.grid.nx * iy]
    }

    /// Frame at `(ix, iy)` where `ix == nx` or `iy == ny` denote the images
    /// of the first column/row under the boundary gauge.
    pub fn frame_wrapped(&self, ix: usize, iy: usize) -> CMat {
        let f = self.frame(ix % self.grid.nx, iy % self.grid.ny);
        let mut phases: Option<Vec<C64>> = None;
        let mut apply = |g: &Option<Vec<C64>>| {
            if let Some(g) = g {
                phases = Some(match phases.take() {
                    None => g.clone(),
                    Some(p) => p.iter().zip(g).map(|(a, b)| a * b).collect(),
                });
            }
        };
        if ix == self.grid.nx {
            apply(&self.gauge_x);
        }
        if iy == self.grid.ny {
            apply(&self.gauge_y);
        }
        match phases {
            None => f.clone(),
            Some(p) => Mat::from_fn(f.nrows(), f.ncols(), |i, j| p[i] * f[(i, j)]),
        }
    }

    /// Right-multiplies every frame by an independent unitary, leaving the
    /// spanned subspaces unchanged.
    pub fn rotate_frames(&mut self, rotations: &[CMat]) {
        assert_eq!(rotations.len(), self.frames.len());
        for (f, r) in self.frames.iter_mut().zip(rotations) {
            *f = &*f * r;
        }
    }
}

/// Haar-random unitary from the QR decomposition of a complex Gaussian matrix.
pub fn random_unitary<R: Rng>(n: usize, rng: &mut R) -> CMat {
    let mut gaussian = || -> f64 { rng.sample(StandardNormal) };
    let z = Mat::from_fn(n, n, |_, _| C64::new(gaussian(), gaussian()));
    let qr = z.qr();
    let q: CMat = qr.compute_Q();
    let r = qr.R();
    // fix the phases of R's diagonal so the distribution is Haar
    Mat::from_fn(n, n, |i, j| {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        q[(i, j)] * ph
    })
}

/// Bundles for several manifolds (1-based labels) from one sweep over the grid.
///
/// Manifolds are identified at `θ = (0, 0)` by gaps of at least
/// `gap_threshold`; at every other grid point the same energy-sorted level
/// windows are used, and both bounding gaps must stay above the threshold.
pub fn build_manifold_bundles<F: ParameterFamily + ?Sized>(
    family: &F,
    manifolds: &[usize],
    grid: TwistGrid,
    gap_threshold: f64,
) -> Result<Vec<ManifoldBundle>> {
    let reference = family.eigensystem(0.0, 0.0)?;
    let structure = detect_manifolds(&reference.values, gap_threshold)?;
    let mut windows = Vec::with_capacity(manifolds.len());
    for &m in manifolds {
        if m == 0 || m > structure.manifolds.len() {
            return Err(Error::Config(format!(
                "manifold {m} requested, spectrum at zero twist has {} manifolds",
                structure.manifolds.len()
            )));
        }
        windows.push(structure.manifolds[m - 1].clone());
    }
    drop(reference);
    build_bundles_for_windows(family, manifolds, &windows, grid, gap_threshold)
}

pub fn build_bundles_for_windows<F: ParameterFamily + ?Sized>(
    family: &F,
    labels: &[usize],
    windows: &[Range<usize>],
    grid: TwistGrid,
    gap_threshold: f64,
) -> Result<Vec<ManifoldBundle>> {
    let points: Vec<(usize, usize)> = (0..grid.ny)
        .flat_map(|iy| (0..grid.nx).map(move |ix| (ix, iy)))
        .collect();
    let per_point: Vec<(Vec<CMat>, Vec<f64>)> = points
        .par_iter()
        .map(|&(ix, iy)| {
            let (tx, ty) = grid.theta(ix, iy);
            let es = family.eigensystem(tx, ty)?;
            let mut frames = Vec::with_capacity(windows.len());
            let mut gaps = Vec::with_capacity(windows.len());
            for w in windows {
                let gap = bounding_gap(&es.values, w);
                if gap < gap_threshold {
                    return Err(Error::GapClosed {
                        theta_x: tx,
                        theta_y: ty,
                        gap,
                        threshold: gap_threshold,
                    });
                }
                frames.push(es.columns(w.clone()));
                gaps.push(gap);
            }
            Ok((frames, gaps))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut bundles = Vec::with_capacity(windows.len());
    let mut per_point = per_point;
    for (k, w) in windows.iter().enumerate().rev() {
        let mut frames = Vec::with_capacity(grid.len());
        let mut min_gap = f64::INFINITY;
        for (fs, gs) in per_point.iter_mut() {
            frames.push(fs.pop().expect("one frame per window"));
            min_gap = min_gap.min(gs[k]);
        }
        let mut b = ManifoldBundle::new(
            labels[k],
            w.start,
            grid,
            frames,
            family.boundary_gauge(true).map(|g| g.to_vec()),
            family.boundary_gauge(false).map(|g| g.to_vec()),
        )?;
        b.min_gap = min_gap;
        bundles.push(b);
    }
    bundles.reverse();
    Ok(bundles)
}

/// Single-manifold convenience wrapper around [`build_manifold_bundles`].
pub fn build_manifold_bundle<F: ParameterFamily + ?Sized>(
    family: &F,
    manifold: usize,
    grid: TwistGrid,
    gap_threshold: f64,
) -> Result<ManifoldBundle> {
    Ok(build_manifold_bundles(family, &[manifold], grid, gap_threshold)?.remove(0))
}

fn bounding_gap(values: &[f64], w: &Range<usize>) -> f64 {
    let below = if w.start > 0 {
        values[w.start] - values[w.start - 1]
    } else {
        f64::INFINITY
    };
    let above = if w.end < values.len() {
        values[w.end] - values[w.end - 1]
    } else {
        f64::INFINITY
    };
    below.min(above)
}
