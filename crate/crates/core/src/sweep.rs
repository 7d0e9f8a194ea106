//! Parameter sweeps behind the command-line tool.
//!
//! Every command takes a JSON configuration and produces either a CSV
//! [`Table`] or a serializable report. Parallel work is collected in index
//! order, so output depends only on the configuration (and seed).

use std::f64::consts::TAU;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{LatticeModelSpec, TwistedLattice};
use crate::spectral::{
    detect_manifolds, ManifoldReport, DEFAULT_GAP_THRESHOLD, DEFAULT_RETAINED_LEVELS,
};
use crate::topology::{
    build_bundles_for_windows, chern_winding, random_unitary, wilson_loop_data, ChernResult,
    ManifoldBundle, TwistGrid,
};
use crate::toymodel::{classify_toy_phase, toy_gap, ToyBandModel};

/// Evenly spaced values `start, start + step, ..., stop`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Axis {
    pub fn validate(&self) -> Result<()> {
        if !(self.start.is_finite() && self.stop.is_finite() && self.step.is_finite()) {
            return Err(Error::Config(format!(
                "axis {}: bounds must be finite",
                self.name
            )));
        }
        if self.step <= 0.0 {
            return Err(Error::Config(format!(
                "axis {}: step {} must be positive",
                self.name, self.step
            )));
        }
        if self.stop <= self.start {
            return Err(Error::Config(format!(
                "axis {}: stop {} must exceed start {}",
                self.name, self.stop, self.start
            )));
        }
        Ok(())
    }

    /// Grid points; `stop` is included when it lies on the grid up to rounding.
    pub fn values(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let n = ((self.stop - self.start) / self.step * (1.0 + 1e-12)).floor() as usize;
        Ok((0..=n).map(|i| self.start + i as f64 * self.step).collect())
    }

    fn expect_name(&self, name: &str) -> Result<()> {
        if self.name != name {
            return Err(Error::Config(format!(
                "sweep axis must be {name:?}, got {:?}",
                self.name
            )));
        }
        Ok(())
    }
}

/// CSV output: header, rows, and a trailing summary comment.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    /// Renders the table. `elapsed` goes into the summary line; pass `None`
    /// for reproducible output (`elapsed_s=0`).
    pub fn to_csv(&self, elapsed: Option<f64>) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        match elapsed {
            Some(t) => out.push_str(&format!("# rows={} elapsed_s={t:.3}\n", self.rows.len())),
            None => out.push_str(&format!("# rows={} elapsed_s=0\n", self.rows.len())),
        }
        out
    }
}

fn num(x: f64) -> String {
    format!("{x}")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToyClassifyConfig {
    #[serde(default = "one")]
    pub delta: f64,
    pub j: f64,
    pub n: usize,
    /// Temperature in units of the band gap; `null` or absent means `T = 0`.
    #[serde(default)]
    pub temperature: Option<f64>,
}

fn one() -> f64 {
    1.0
}

fn beta_of(temperature: Option<f64>) -> Result<f64> {
    match temperature {
        None => Ok(f64::INFINITY),
        Some(t) if t == 0.0 => Ok(f64::INFINITY),
        Some(t) if t.is_infinite() && t > 0.0 => Ok(0.0),
        Some(t) if t > 0.0 => Ok(1.0 / t),
        Some(t) => Err(Error::Config(format!(
            "temperature {t} must be non-negative"
        ))),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ToyBlockReport {
    pub manifolds: [usize; 2],
    pub states: u64,
    pub chern: i64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ToyClassifyReport {
    pub delta: f64,
    pub j: f64,
    pub n: usize,
    pub beta: Option<f64>,
    /// `Δρ^(μ)` for `μ = 1..N` (absent at `T = 0`).
    pub gaps: Vec<f64>,
    pub open_gaps: Vec<usize>,
    pub blocks: Vec<ToyBlockReport>,
}

pub fn toy_classify(cfg: &ToyClassifyConfig) -> Result<ToyClassifyReport> {
    let beta = beta_of(cfg.temperature)?;
    let model = ToyBandModel::new(cfg.delta, cfg.j, cfg.n, beta)?;
    let c = classify_toy_phase(&model)?;
    let gaps = if beta.is_finite() {
        (1..=cfg.n)
            .map(|mu| toy_gap(&model, mu))
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    Ok(ToyClassifyReport {
        delta: cfg.delta,
        j: cfg.j,
        n: cfg.n,
        beta: beta.is_finite().then_some(beta),
        gaps,
        open_gaps: c.open_gaps,
        blocks: c
            .blocks
            .iter()
            .map(|b| ToyBlockReport {
                manifolds: [*b.manifolds.start(), *b.manifolds.end()],
                states: b.states,
                chern: b.chern,
            })
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToyPhaseConfig {
    #[serde(default = "one")]
    pub delta: f64,
    pub n: usize,
    /// Axis named `j_over_delta`.
    pub j: Axis,
    /// Axis named `temperature`, in units of the band gap.
    pub temperature: Axis,
    /// Appends a `T = ∞` row for every `J`.
    #[serde(default = "yes")]
    pub include_infinite_temperature: bool,
}

fn yes() -> bool {
    true
}

/// `j_over_delta,temperature,n_blocks,chern_list`; Chern lists are
/// `;`-separated block Chern numbers from the lowest block up.
pub fn toy_phase_diagram(cfg: &ToyPhaseConfig) -> Result<Table> {
    cfg.j.expect_name("j_over_delta")?;
    cfg.temperature.expect_name("temperature")?;
    ToyBandModel::new(cfg.delta, 0.0, cfg.n, 1.0)?;
    let js = cfg.j.values()?;
    let mut temps: Vec<Option<f64>> = cfg.temperature.values()?.into_iter().map(Some).collect();
    if cfg.include_infinite_temperature {
        temps.push(None);
    }
    if js.iter().any(|&j| j < 0.0) || temps.iter().flatten().any(|&t| t < 0.0) {
        return Err(Error::Config("J/Δ and T must be non-negative".into()));
    }
    let points: Vec<(f64, Option<f64>)> = js
        .iter()
        .flat_map(|&j| temps.iter().map(move |&t| (j, t)))
        .collect();
    let rows = points
        .par_iter()
        .map(|&(jd, t)| {
            let beta = match t {
                Some(t) => beta_of(Some(t))?,
                None => 0.0,
            };
            let model = ToyBandModel::new(cfg.delta, jd * cfg.delta, cfg.n, beta)?;
            let c = classify_toy_phase(&model)?;
            let list: Vec<String> = c.chern_list().iter().map(|x| x.to_string()).collect();
            Ok(vec![
                num(jd),
                t.map_or_else(|| "inf".to_string(), num),
                c.blocks.len().to_string(),
                list.join(";"),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table {
        header: ["j_over_delta", "temperature", "n_blocks", "chern_list"]
            .map(String::from)
            .to_vec(),
        rows,
    })
}

fn default_levels() -> usize {
    DEFAULT_RETAINED_LEVELS
}

fn default_threshold() -> f64 {
    DEFAULT_GAP_THRESHOLD
}

fn default_compare() -> usize {
    2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HhSpectrumConfig {
    pub model: LatticeModelSpec,
    /// Axis named `g`.
    pub sweep: Axis,
    #[serde(default = "default_levels")]
    pub levels: usize,
    /// In units of `t`.
    #[serde(default = "default_threshold")]
    pub gap_threshold: f64,
    /// Number of lowest manifolds whose sizes define the partition.
    #[serde(default = "default_compare")]
    pub compare_manifolds: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct PartitionChange {
    pub g: f64,
    pub before: Vec<usize>,
    pub after: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumPoint {
    pub g: f64,
    pub structure: ManifoldReport,
}

/// Companion report of a spectrum scan.
#[derive(Debug, Clone, Serialize)]
pub struct HhSpectrumReport {
    pub gap_threshold: f64,
    pub compare_manifolds: usize,
    /// First `g` whose leading manifold sizes differ from those at the previous point.
    pub partition_change_g: Option<f64>,
    pub changes: Vec<PartitionChange>,
    pub points: Vec<SpectrumPoint>,
}

/// Lowest levels per `g` (CSV `g,E_1,...,E_K`) and the manifold partition
/// of each point under the energy threshold.
pub fn hh_spectrum(cfg: &HhSpectrumConfig) -> Result<(Table, HhSpectrumReport)> {
    cfg.sweep.expect_name("g")?;
    if cfg.levels == 0 || cfg.compare_manifolds == 0 {
        return Err(Error::Config(
            "levels and compare_manifolds must be positive".into(),
        ));
    }
    if !(cfg.gap_threshold > 0.0) {
        return Err(Error::Config(format!(
            "gap_threshold {} must be positive",
            cfg.gap_threshold
        )));
    }
    let gs = cfg.sweep.values()?;
    let base = TwistedLattice::new(cfg.model.clone())?;
    let k = cfg.levels.min(base.dim());
    let spectra = gs
        .par_iter()
        .map(|&g| {
            let mut spec = cfg.model.clone();
            spec.g = g;
            let lat = TwistedLattice::new(spec)?;
            let mut e = lat.eigenvalues_at(cfg.model.theta_x, cfg.model.theta_y)?;
            e.truncate(k);
            Ok(e)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut header = vec!["g".to_string()];
    header.extend((1..=k).map(|i| format!("E_{i}")));
    let mut rows = Vec::with_capacity(gs.len());
    let mut points = Vec::with_capacity(gs.len());
    let mut changes = Vec::new();
    let mut previous: Option<Vec<usize>> = None;
    for (&g, e) in gs.iter().zip(&spectra) {
        let mut row = vec![num(g)];
        row.extend(e.iter().map(|&x| num(x)));
        rows.push(row);
        let s = detect_manifolds(e, cfg.gap_threshold)?;
        let lead: Vec<usize> = s.sizes().into_iter().take(cfg.compare_manifolds).collect();
        if let Some(prev) = &previous {
            if *prev != lead {
                changes.push(PartitionChange {
                    g,
                    before: prev.clone(),
                    after: lead.clone(),
                });
            }
        }
        previous = Some(lead);
        points.push(SpectrumPoint {
            g,
            structure: s.report(),
        });
    }
    let report = HhSpectrumReport {
        gap_threshold: cfg.gap_threshold,
        compare_manifolds: cfg.compare_manifolds,
        partition_change_g: changes.first().map(|c| c.g),
        changes,
        points,
    };
    Ok((Table { header, rows }, report))
}

/// When to repeat a Chern evaluation on a finer twist grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Refinement {
    /// Only when some plaquette flux exceeds `π/2`.
    #[default]
    Auto,
    Always,
    Never,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HhChernConfig {
    pub model: LatticeModelSpec,
    /// 1-based manifold label at zero twist.
    pub manifold: usize,
    /// `[nx, ny]`; defaults to 12×12, or 24×16 for manifolds above 9 states.
    #[serde(default)]
    pub grid: Option<[usize; 2]>,
    #[serde(default = "default_threshold")]
    pub gap_threshold: f64,
    #[serde(default)]
    pub refinement: Refinement,
    /// Number of random per-point `U(N)` frame rotations to re-check.
    #[serde(default)]
    pub gauge_checks: usize,
}

/// Default twist grid for a manifold of the given dimension.
pub fn default_grid(dim: usize) -> TwistGrid {
    if dim <= 9 {
        TwistGrid { nx: 12, ny: 12 }
    } else {
        TwistGrid { nx: 24, ny: 16 }
    }
}

fn refined(grid: TwistGrid) -> TwistGrid {
    TwistGrid {
        nx: grid.nx + grid.nx / 2,
        ny: grid.ny + grid.ny / 2,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GaugeCheckReport {
    pub seed: u64,
    pub windings: Vec<i64>,
    pub max_raw_phase_change: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct HhChernReport {
    pub manifold: usize,
    pub dimension: usize,
    pub winding: i64,
    pub raw_phase: f64,
    pub grid: [usize; 2],
    pub discrepancy: f64,
    pub max_plaquette_flux: f64,
    pub min_gap: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refined: Option<ChernResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gauge_checks: Option<GaugeCheckReport>,
}

/// Level window of a manifold at zero twist.
pub fn manifold_window(
    lat: &TwistedLattice,
    manifold: usize,
    gap_threshold: f64,
) -> Result<std::ops::Range<usize>> {
    let s = detect_manifolds(&lat.eigenvalues_at(0.0, 0.0)?, gap_threshold)?;
    if manifold == 0 || manifold > s.manifolds.len() {
        return Err(Error::Config(format!(
            "manifold {manifold} requested, spectrum has {} manifolds",
            s.manifolds.len()
        )));
    }
    Ok(s.manifolds[manifold - 1].clone())
}

/// Frames of one manifold, with the grid chosen from the config or the
/// manifold dimension.
pub fn hh_bundle(cfg: &HhChernConfig, grid: Option<TwistGrid>) -> Result<ManifoldBundle> {
    if !(cfg.gap_threshold > 0.0) {
        return Err(Error::Config(format!(
            "gap_threshold {} must be positive",
            cfg.gap_threshold
        )));
    }
    let lat = TwistedLattice::new(cfg.model.clone())?;
    let window = manifold_window(&lat, cfg.manifold, cfg.gap_threshold)?;
    let grid = match (grid, cfg.grid) {
        (Some(g), _) => g,
        (None, Some([nx, ny])) => TwistGrid::new(nx, ny)?,
        (None, None) => default_grid(window.len()),
    };
    TwistGrid::new(grid.nx, grid.ny)?;
    Ok(
        build_bundles_for_windows(&lat, &[cfg.manifold], &[window], grid, cfg.gap_threshold)?
            .remove(0),
    )
}

/// Chern number of a manifold with optional refinement and gauge checks.
pub fn hh_chern(cfg: &HhChernConfig, grid: Option<TwistGrid>, seed: u64) -> Result<HhChernReport> {
    let bundle = hh_bundle(cfg, grid)?;
    let c = chern_winding(&bundle)?;
    let refine = match cfg.refinement {
        Refinement::Always => true,
        Refinement::Never => false,
        Refinement::Auto => c.refinement_warning,
    };
    let refined_result = if refine {
        let finer = hh_bundle(cfg, Some(refined(bundle.grid)))?;
        let r = chern_winding(&finer)?;
        if r.winding != c.winding {
            return Err(Error::Refinement {
                raw: r.raw_phase / TAU,
                rounded: c.winding,
                detail: format!(
                    "winding {} on {}x{} but {} on {}x{}",
                    c.winding,
                    bundle.grid.nx,
                    bundle.grid.ny,
                    r.winding,
                    finer.grid.nx,
                    finer.grid.ny
                ),
            });
        }
        Some(r)
    } else {
        None
    };
    let gauge_checks = if cfg.gauge_checks > 0 {
        let windings = gauge_rotation_windings(&bundle, cfg.gauge_checks, seed)?;
        let max_change = windings
            .iter()
            .map(|w| (w.1 - c.raw_phase).abs())
            .fold(0.0, f64::max);
        Some(GaugeCheckReport {
            seed,
            windings: windings.iter().map(|w| w.0).collect(),
            max_raw_phase_change: max_change,
        })
    } else {
        None
    };
    Ok(HhChernReport {
        manifold: c.manifold,
        dimension: c.dimension,
        winding: c.winding,
        raw_phase: c.raw_phase,
        grid: c.grid,
        discrepancy: c.discrepancy,
        max_plaquette_flux: c.max_plaquette_flux,
        min_gap: bundle.min_gap,
        refined: refined_result,
        gauge_checks,
    })
}

/// Windings and raw phases after `count` independent random frame
/// rotations; trial `k` draws from `ChaCha8Rng` seeded with `seed + k`.
pub fn gauge_rotation_windings(
    bundle: &ManifoldBundle,
    count: usize,
    seed: u64,
) -> Result<Vec<(i64, f64)>> {
    (0..count)
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
            let rotations: Vec<_> = (0..bundle.grid.len())
                .map(|_| random_unitary(bundle.dim, &mut rng))
                .collect();
            let mut b = bundle.clone();
            b.rotate_frames(&rotations);
            let c = chern_winding(&b)?;
            Ok((c.winding, c.raw_phase))
        })
        .collect()
}

/// `theta_y,arg_det_W,unwrapped_phase`; the final row at `θy = 2π` closes
/// the loop, so its unwrapped phase exceeds the first by `2π C`.
pub fn hh_wilson(cfg: &HhChernConfig, grid: Option<TwistGrid>) -> Result<Table> {
    let bundle = hh_bundle(cfg, grid)?;
    wilson_table(&bundle)
}

pub fn wilson_table(bundle: &ManifoldBundle) -> Result<Table> {
    let data = wilson_loop_data(bundle)?;
    let ny = bundle.grid.ny;
    let mut rows = Vec::with_capacity(ny + 1);
    for iy in 0..=ny {
        let phase = data.det_phases[iy % ny];
        rows.push(vec![
            num(TAU * iy as f64 / ny as f64),
            num(phase),
            num(data.unwrapped[iy]),
        ]);
    }
    Ok(Table {
        header: ["theta_y", "arg_det_W", "unwrapped_phase"]
            .map(String::from)
            .to_vec(),
        rows,
    })
}
