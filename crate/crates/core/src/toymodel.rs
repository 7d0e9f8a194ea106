//! Two-band toy model of a Chern insulator at finite temperature.
//!
//! Each band holds `N` single-particle states with energies
//! `ε_±(k) = ±(Δ/2 + J w(k))`, `w ∈ [0, 1]`. At half filling the
//! many-body levels organise into manifolds `μ = 0..=N` of `μ`
//! particle-hole excitations. Manifold `μ` holds `binom(N, μ)²` states and
//! carries total Chern number `(−1 + 2μ/N) binom(N, μ)²`.

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::fock::binomial;

/// Relative size below which a gap `Δ − (μ−1)2J` counts as closed.
pub const CLOSED_GAP_TOLERANCE: f64 = 1e-12;
/// Largest `N` accepted by the brute-force spectrum enumeration.
pub const MAX_SYNTHETIC_N: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToyBandModel {
    pub delta: f64,
    pub j: f64,
    pub n: usize,
    /// Inverse temperature; `f64::INFINITY` is the ground state.
    pub beta: f64,
}

impl ToyBandModel {
    pub fn new(delta: f64, j: f64, n: usize, beta: f64) -> Result<Self> {
        let m = Self { delta, j, n, beta };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0) || !self.delta.is_finite() {
            return Err(Error::Config(format!(
                "band gap {} must be positive",
                self.delta
            )));
        }
        if !(self.j >= 0.0) || !self.j.is_finite() {
            return Err(Error::Config(format!(
                "band width {} must be non-negative",
                self.j
            )));
        }
        if self.n == 0 {
            return Err(Error::Config("toy model needs N >= 1".into()));
        }
        if !(self.beta >= 0.0) {
            return Err(Error::Config(format!(
                "inverse temperature {} must be non-negative",
                self.beta
            )));
        }
        Ok(())
    }

    /// `Δ − (μ' − 1) 2J` with `μ' = min(μ, N + 1 − μ)`, before scaling by β.
    fn bare_gap(&self, mu: usize) -> f64 {
        let mirrored = mu.min(self.n + 1 - mu);
        self.delta - (mirrored as f64 - 1.0) * 2.0 * self.j
    }

    /// Whether the gap below manifold `mu` is open at finite temperature.
    pub fn gap_open(&self, mu: usize) -> bool {
        self.bare_gap(mu) > CLOSED_GAP_TOLERANCE * self.delta
    }
}

/// Gap `Δρ^(μ)` of `-log ρ` between manifolds `μ − 1` and `μ`, for `1 ≤ μ ≤ N`.
///
/// `β (Δ − (μ−1) 2J)` clamped at zero. Particle-hole conjugation of the
/// spectrum maps gap `μ` onto gap `N + 1 − μ`, so the smaller of the two
/// excitation counts enters.
pub fn toy_gap(model: &ToyBandModel, mu: usize) -> Result<f64> {
    model.validate()?;
    if mu == 0 || mu > model.n {
        return Err(Error::Config(format!(
            "gap index {mu} outside 1..={}",
            model.n
        )));
    }
    let bare = model.bare_gap(mu).max(0.0);
    Ok(if bare == 0.0 || model.beta == 0.0 {
        0.0
    } else {
        model.beta * bare
    })
}

/// `(C_μ, N_μ)` for manifold `μ` of `N` particles.
pub fn toy_manifold_chern(n: usize, mu: usize) -> Result<(i64, u64)> {
    if n == 0 || mu > n {
        return Err(Error::Config(format!("manifold {mu} outside 0..={n}")));
    }
    let count = binomial(n, mu);
    // (−1 + 2μ/N) binom(N,μ)² = binom(N,μ) (2 binom(N−1,μ−1) − binom(N,μ))
    let weighted = if mu == 0 {
        0
    } else {
        2 * binomial(n - 1, mu - 1)
    } as i128;
    let chern = count as i128 * (weighted - count as i128);
    debug_assert_eq!(
        chern * n as i128,
        (2 * mu as i128 - n as i128) * (count * count) as i128
    );
    let count_sq = count * count;
    Ok((
        i64::try_from(chern)
            .map_err(|_| Error::Config(format!("Chern number overflows for N = {n}")))?,
        u64::try_from(count_sq)
            .map_err(|_| Error::Config(format!("manifold size overflows for N = {n}")))?,
    ))
}

/// A block of merged manifolds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ToyBlock {
    pub manifolds: RangeInclusive<usize>,
    pub states: u64,
    pub chern: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ToyClassification {
    /// Gap indices `μ` with `Δρ^(μ) > 0`.
    pub open_gaps: Vec<usize>,
    pub blocks: Vec<ToyBlock>,
}

impl ToyClassification {
    pub fn chern_list(&self) -> Vec<i64> {
        self.blocks.iter().map(|b| b.chern).collect()
    }
}

/// Merges manifolds across closed gaps and sums their Chern numbers.
///
/// `β = 0` gives a single trivial block; `β = ∞` keeps only the ground state.
pub fn classify_toy_phase(model: &ToyBandModel) -> Result<ToyClassification> {
    model.validate()?;
    let n = model.n;
    let block = |range: RangeInclusive<usize>| -> Result<ToyBlock> {
        let mut states = 0u64;
        let mut chern = 0i64;
        for mu in range.clone() {
            let (c, k) = toy_manifold_chern(n, mu)?;
            states += k;
            chern += c;
        }
        Ok(ToyBlock {
            manifolds: range,
            states,
            chern,
        })
    };

    if model.beta == 0.0 {
        return Ok(ToyClassification {
            open_gaps: Vec::new(),
            blocks: vec![block(0..=n)?],
        });
    }
    let open_gaps: Vec<usize> = (1..=n).filter(|&mu| model.gap_open(mu)).collect();
    if model.beta == f64::INFINITY {
        return Ok(ToyClassification {
            open_gaps,
            blocks: vec![block(0..=0)?],
        });
    }
    let mut blocks = Vec::new();
    let mut start = 0;
    for &mu in &open_gaps {
        blocks.push(block(start..=mu - 1)?);
        start = mu;
    }
    blocks.push(block(start..=n)?);
    Ok(ToyClassification { open_gaps, blocks })
}

/// How the band coordinate `w(k)` is sampled for the synthetic spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DispersionSampling {
    /// Half of the momenta at each band edge, `w ∈ {0, 1}`. Manifold widths
    /// are then exactly `2Jμ` at every `N`, as assumed by [`toy_gap`].
    #[default]
    BandEdges,
    /// `w_i = i / (N − 1)`, evenly spaced on `[0, 1]`.
    Uniform,
}

impl DispersionSampling {
    pub fn weights(self, n: usize) -> Vec<f64> {
        match self {
            DispersionSampling::BandEdges => (0..n)
                .map(|i| if i < n.div_ceil(2) { 0.0 } else { 1.0 })
                .collect(),
            DispersionSampling::Uniform if n == 1 => vec![0.0],
            DispersionSampling::Uniform => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
        }
    }
}

/// All `binom(2N, N)` many-body energies at half filling, ascending.
pub fn toy_synthetic_spectrum(
    model: &ToyBandModel,
    n_k: usize,
    sampling: DispersionSampling,
) -> Result<Vec<f64>> {
    model.validate()?;
    if n_k != model.n {
        return Err(Error::Config(format!(
            "{n_k} momenta requested for N = {}",
            model.n
        )));
    }
    if model.n > MAX_SYNTHETIC_N {
        return Err(Error::Resource {
            what: "toy-model enumeration",
            dim: binomial(2 * model.n, model.n).min(usize::MAX as u128) as usize,
            cap: binomial(2 * MAX_SYNTHETIC_N, MAX_SYNTHETIC_N) as usize,
        });
    }
    let w = sampling.weights(model.n);
    let mut single: Vec<f64> = Vec::with_capacity(2 * model.n);
    for &wk in &w {
        let e = model.delta / 2.0 + model.j * wk;
        single.push(-e);
        single.push(e);
    }
    let modes = single.len();
    let mut energies = Vec::with_capacity(binomial(modes, model.n) as usize);
    for mask in 0u32..(1u32 << modes) {
        if mask.count_ones() as usize == model.n {
            energies.push(
                (0..modes)
                    .filter(|&m| mask >> m & 1 == 1)
                    .map(|m| single[m])
                    .sum::<f64>(),
            );
        }
    }
    energies.sort_by(|a, b| a.partial_cmp(b).expect("finite energies"));
    Ok(energies)
}
