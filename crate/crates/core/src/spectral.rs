//! Eigendecomposition, spectral structure of `-log ρ`, thermal weights and
//! pure-state entanglement entropy.

use std::collections::BTreeMap;
use std::ops::Range;

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, C64};
use crate::models::FockBasis;

/// Default gap threshold for model scans, in units of `t`.
pub const DEFAULT_GAP_THRESHOLD: f64 = 0.1;
/// Default number of retained levels in spectrum scans.
pub const DEFAULT_RETAINED_LEVELS: usize = 200;
/// Level spacings below this are reported as exact degeneracies.
pub const DEGENERACY_TOLERANCE: f64 = 1e-9;

/// Eigenvalues in ascending order with orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Columns `range` of the eigenvector matrix.
    pub fn columns(&self, range: Range<usize>) -> CMat {
        let n = self.vectors.nrows();
        Mat::from_fn(n, range.len(), |i, j| self.vectors[(i, range.start + j)])
    }

    /// `max_i ‖H v_i − E_i v_i‖₂`.
    pub fn max_residual(&self, h: &CMat) -> f64 {
        let hv = h * &self.vectors;
        (0..self.dim())
            .map(|j| {
                (0..h.nrows())
                    .map(|i| (hv[(i, j)] - self.vectors[(i, j)] * self.values[j]).norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// Keeps only the lowest `k` eigenpairs.
    pub fn truncate(&mut self, k: usize) {
        if k < self.dim() {
            self.vectors = self.columns(0..k);
            self.values.truncate(k);
        }
    }
}

/// Full Hermitian eigendecomposition.
///
/// The input is symmetrized as `(H + H†)/2`. Each eigenvector's phase is
/// fixed so that its largest entry is real positive, which makes the output
/// a deterministic function of the input.
pub fn eigendecompose(h: &CMat) -> Result<EigenSystem> {
    if h.nrows() != h.ncols() {
        return Err(Error::Config(format!(
            "matrix is {}x{}, not square",
            h.nrows(),
            h.ncols()
        )));
    }
    if h.nrows() == 0 {
        return Err(Error::Empty("eigendecomposition of a 0x0 matrix"));
    }
    let n = h.nrows();
    let sym = Mat::from_fn(n, n, |i, j| (h[(i, j)] + h[(j, i)].conj()) * 0.5);
    let (values, mut vectors) = linalg::eigh(&sym)?;
    linalg::fix_column_phases(&mut vectors);
    Ok(EigenSystem { values, vectors })
}

/// Eigenvalues only (ascending).
pub fn eigenvalues(h: &CMat) -> Result<Vec<f64>> {
    let n = h.nrows();
    if n == 0 {
        return Err(Error::Empty("eigenvalues of a 0x0 matrix"));
    }
    let sym = Mat::from_fn(n, n, |i, j| (h[(i, j)] + h[(j, i)].conj()) * 0.5);
    linalg::eigvalsh(&sym)
}

/// Partition of ascending levels of `-log ρ` into gapped manifolds.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralStructure {
    /// Inverse temperature the levels were scaled with, if any.
    pub beta: Option<f64>,
    pub levels: Vec<f64>,
    pub manifolds: Vec<Range<usize>>,
    /// `gaps[i]` separates `manifolds[i]` from `manifolds[i + 1]`.
    pub gaps: Vec<f64>,
}

impl SpectralStructure {
    pub fn sizes(&self) -> Vec<usize> {
        self.manifolds.iter().map(|r| r.len()).collect()
    }

    pub fn width(&self, m: usize) -> f64 {
        let r = &self.manifolds[m];
        self.levels[r.end - 1] - self.levels[r.start]
    }

    /// Groups of numerically degenerate levels (spacing below
    /// [`DEGENERACY_TOLERANCE`]) within each manifold.
    pub fn multiplets(&self) -> Vec<Vec<usize>> {
        self.manifolds
            .iter()
            .map(|r| {
                let mut sizes = vec![1usize];
                for i in r.start + 1..r.end {
                    if self.levels[i] - self.levels[i - 1] < DEGENERACY_TOLERANCE {
                        *sizes.last_mut().unwrap() += 1;
                    } else {
                        sizes.push(1);
                    }
                }
                sizes
            })
            .collect()
    }

    pub fn report(&self) -> ManifoldReport {
        ManifoldReport {
            manifolds: (0..self.manifolds.len())
                .map(|m| ManifoldEntry {
                    start: self.manifolds[m].start,
                    size: self.manifolds[m].len(),
                    width: self.width(m),
                })
                .collect(),
            gaps: self.gaps.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifoldEntry {
    pub start: usize,
    pub size: usize,
    pub width: f64,
}

/// JSON form of a [`SpectralStructure`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifoldReport {
    pub manifolds: Vec<ManifoldEntry>,
    pub gaps: Vec<f64>,
}

/// Greedy scan: a new manifold starts wherever consecutive levels are at
/// least `gap_threshold` apart.
pub fn detect_manifolds(levels: &[f64], gap_threshold: f64) -> Result<SpectralStructure> {
    if levels.is_empty() {
        return Err(Error::Empty("detect_manifolds needs at least one level"));
    }
    if !(gap_threshold > 0.0) {
        return Err(Error::Config(format!(
            "gap threshold {gap_threshold} must be positive"
        )));
    }
    if levels.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::Config("levels must be ascending".into()));
    }
    let mut manifolds = Vec::new();
    let mut gaps = Vec::new();
    let mut start = 0;
    for i in 0..levels.len() - 1 {
        let spacing = levels[i + 1] - levels[i];
        if spacing >= gap_threshold {
            manifolds.push(start..i + 1);
            gaps.push(spacing);
            start = i + 1;
        }
    }
    manifolds.push(start..levels.len());
    Ok(SpectralStructure {
        beta: None,
        levels: levels.to_vec(),
        manifolds,
        gaps,
    })
}

/// Spectral structure of `-log ρ_T = β H + log Z` from the energies of `H`.
///
/// Levels are `β (E_n − E_0)`; the dropped constant cannot change any gap.
/// At `β = 0` the state is maximally mixed and forms a single manifold.
pub fn thermal_spectral_structure(
    energies: &[f64],
    beta: f64,
    gap_threshold_energy: f64,
) -> Result<SpectralStructure> {
    if energies.is_empty() {
        return Err(Error::Empty("thermal_spectral_structure needs energies"));
    }
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::Config(format!(
            "inverse temperature {beta} must be finite and non-negative"
        )));
    }
    if beta == 0.0 {
        return Ok(SpectralStructure {
            beta: Some(0.0),
            levels: vec![0.0; energies.len()],
            manifolds: vec![0..energies.len()],
            gaps: Vec::new(),
        });
    }
    let e0 = energies[0];
    let levels: Vec<f64> = energies.iter().map(|e| beta * (e - e0)).collect();
    let mut s = detect_manifolds(&levels, beta * gap_threshold_energy)?;
    s.beta = Some(beta);
    Ok(s)
}

/// Gibbs weights `p_n = e^{-β E_n} / Z`.
#[derive(Debug, Clone)]
pub struct ThermalEnsemble {
    pub beta: f64,
    pub energies: Vec<f64>,
    pub log_z: f64,
}

impl ThermalEnsemble {
    pub fn new(energies: &[f64], beta: f64) -> Result<Self> {
        if energies.is_empty() {
            return Err(Error::Empty("thermal ensemble needs energies"));
        }
        if !(beta >= 0.0) || !beta.is_finite() {
            return Err(Error::Config(format!(
                "inverse temperature {beta} must be finite and non-negative"
            )));
        }
        let shift = energies.iter().copied().fold(f64::INFINITY, f64::min);
        let sum: f64 = energies.iter().map(|e| (-beta * (e - shift)).exp()).sum();
        let log_z = sum.ln() - beta * shift;
        Ok(Self {
            beta,
            energies: energies.to_vec(),
            log_z,
        })
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.energies
            .iter()
            .map(|e| (-self.beta * e - self.log_z).exp())
            .collect()
    }
}

/// Bipartition of lattice sites into a subsystem `A` and its complement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SitePartition {
    a_mask: u64,
}

impl SitePartition {
    pub fn new(a_sites: &[usize], total_sites: usize) -> Result<Self> {
        let mut mask = 0u64;
        for &j in a_sites {
            if j >= total_sites {
                return Err(Error::Config(format!(
                    "site {j} outside lattice of {total_sites} sites"
                )));
            }
            if mask >> j & 1 == 1 {
                return Err(Error::Config(format!("site {j} listed twice in partition")));
            }
            mask |= 1 << j;
        }
        Ok(Self { a_mask: mask })
    }
}

/// Von Neumann entropy (nats) of subsystem `A` for a pure fermionic state.
///
/// Modes are reordered so that all `A` creators stand left of all `B`
/// creators; the reordering sign enters the Schmidt matrix.
pub fn entanglement_entropy(
    state: &[C64],
    partition: &SitePartition,
    basis: &FockBasis,
) -> Result<f64> {
    if state.len() != basis.len() {
        return Err(Error::Config(format!(
            "state has {} amplitudes, basis has {} states",
            state.len(),
            basis.len()
        )));
    }
    let full = if basis.sites() == 64 {
        u64::MAX
    } else {
        (1u64 << basis.sites()) - 1
    };
    if partition.a_mask & !full != 0 {
        return Err(Error::Config(
            "partition references sites outside the basis".into(),
        ));
    }
    let mut a_index = BTreeMap::new();
    let mut b_index = BTreeMap::new();
    for &s in basis.states() {
        let na = a_index.len();
        a_index.entry(s & partition.a_mask).or_insert(na);
        let nb = b_index.len();
        b_index.entry(s & !partition.a_mask).or_insert(nb);
    }
    let mut m = Mat::<C64>::zeros(a_index.len(), b_index.len());
    for (k, &s) in basis.states().iter().enumerate() {
        let sa = s & partition.a_mask;
        let sb = s & !partition.a_mask;
        // creators are ordered by descending site; every B mode above an A
        // mode has to be moved past it
        let mut swaps = 0u32;
        let mut rest = sa;
        while rest != 0 {
            let a = rest.trailing_zeros();
            rest &= rest - 1;
            swaps += (sb >> a >> 1).count_ones();
        }
        let sign = if swaps % 2 == 0 { 1.0 } else { -1.0 };
        m[(a_index[&sa], b_index[&sb])] = state[k] * sign;
    }
    schmidt_entropy(&m)
}

/// Entropy of the left factor of a state in `C^{dim_a} ⊗ C^{dim_b}` with
/// index `i = i_a * dim_b + i_b`.
pub fn bipartite_entropy(state: &[C64], dim_a: usize, dim_b: usize) -> Result<f64> {
    if state.len() != dim_a * dim_b || dim_a == 0 || dim_b == 0 {
        return Err(Error::Config(format!(
            "state of length {} is not a {dim_a}x{dim_b} bipartition",
            state.len()
        )));
    }
    let m = Mat::from_fn(dim_a, dim_b, |i, j| state[i * dim_b + j]);
    schmidt_entropy(&m)
}

fn schmidt_entropy(m: &CMat) -> Result<f64> {
    let sv = m.singular_values().map_err(|e| Error::Solver {
        dim: m.nrows().max(m.ncols()),
        detail: format!("{e:?}"),
    })?;
    let norm: f64 = sv.iter().map(|s| s * s).sum();
    Ok(sv
        .iter()
        .map(|s| s * s / norm)
        .filter(|&p| p > 1e-300)
        .map(|p| -p * p.ln())
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{orthonormality_defect, ONE, ZERO};
    use proptest::prelude::*;
    use std::f64::consts::LN_2;

    fn real_diag(v: &[f64]) -> CMat {
        Mat::from_fn(v.len(), v.len(), |i, j| {
            if i == j {
                C64::new(v[i], 0.0)
            } else {
                ZERO
            }
        })
    }

    #[test]
    fn diagonal_matrix_sorted_with_permutation_vectors() {
        let es = eigendecompose(&real_diag(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(es.values, vec![1.0, 2.0, 3.0]);
        for (col, row) in [(0, 1), (1, 2), (2, 0)] {
            assert!((es.vectors[(row, col)] - ONE).norm() < 1e-14);
        }
    }

    #[test]
    fn pauli_x() {
        let sx = Mat::from_fn(2, 2, |i, j| if i != j { ONE } else { ZERO });
        let es = eigendecompose(&sx).unwrap();
        assert!((es.values[0] + 1.0).abs() < 1e-15 && (es.values[1] - 1.0).abs() < 1e-15);
        assert!(es.max_residual(&sx) < 1e-14);
        assert!(orthonormality_defect(&es.vectors) < 1e-14);
    }

    #[test]
    fn manifold_scan_definitional() {
        let s = detect_manifolds(&[0.0, 1.0, 1.1, 1.2, 5.0], 0.5).unwrap();
        assert_eq!(s.manifolds, vec![0..1, 1..4, 4..5]);
        assert!((s.gaps[0] - 1.0).abs() < 1e-15 && (s.gaps[1] - 3.8).abs() < 1e-12);

        let s = detect_manifolds(&[2.0; 6], 0.1).unwrap();
        assert_eq!(s.manifolds, vec![0..6]);
        assert!(s.gaps.is_empty());
    }

    #[test]
    fn manifold_scan_errors() {
        assert!(matches!(detect_manifolds(&[], 0.1), Err(Error::Empty(_))));
        assert!(detect_manifolds(&[0.0, 1.0], 0.0).is_err());
        assert!(detect_manifolds(&[1.0, 0.0], 0.5).is_err());
    }

    #[test]
    fn infinite_temperature_is_one_manifold() {
        let s = thermal_spectral_structure(&[0.0, 1.0, 5.0], 0.0, 0.1).unwrap();
        assert_eq!(s.manifolds, vec![0..3]);
    }

    #[test]
    fn beta_doubling_doubles_gaps() {
        let e = [-3.0, -1.0, -0.95, 0.5, 0.52, 4.0];
        let a = thermal_spectral_structure(&e, 1.3, 0.1).unwrap();
        let b = thermal_spectral_structure(&e, 2.6, 0.1).unwrap();
        assert_eq!(a.manifolds, b.manifolds);
        for (x, y) in a.gaps.iter().zip(&b.gaps) {
            assert!((2.0 * x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn report_json_shape() {
        let s = detect_manifolds(&[0.0, 1.0, 1.1], 0.5).unwrap();
        let v = serde_json::to_value(s.report()).unwrap();
        assert_eq!(v["manifolds"][1]["start"], 1);
        assert_eq!(v["manifolds"][1]["size"], 2);
        assert_eq!(v["gaps"].as_array().unwrap().len(), 1);
    }

    #[test]
    fn multiplets_for_reporting() {
        let s = detect_manifolds(&[0.0, 1.0, 1.0 + 1e-12, 1.05], 0.5).unwrap();
        assert_eq!(s.multiplets(), vec![vec![1], vec![2, 1]]);
    }

    #[test]
    fn bell_state_entropies() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        // |↑↓⟩ + |↓↑⟩ in the (A, B) product basis ↑ = 0, ↓ = 1
        let psi = [ZERO, C64::new(h, 0.0), C64::new(h, 0.0), ZERO];
        assert!((bipartite_entropy(&psi, 2, 2).unwrap() - LN_2).abs() < 1e-14);
        let product = [ONE, ZERO, ZERO, ZERO];
        assert!(bipartite_entropy(&product, 2, 2).unwrap().abs() < 1e-14);

        // a rotation acting on A alone leaves the entropy untouched
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let ua = [
            [C64::new(c, 0.0), C64::new(0.0, s)],
            [C64::new(0.0, s), C64::new(c, 0.0)],
        ];
        let mut rotated = [ZERO; 4];
        for a in 0..2 {
            for b in 0..2 {
                for a2 in 0..2 {
                    rotated[a * 2 + b] += ua[a][a2] * psi[a2 * 2 + b];
                }
            }
        }
        assert!((bipartite_entropy(&rotated, 2, 2).unwrap() - LN_2).abs() < 1e-14);
    }

    #[test]
    fn fermionic_mode_entanglement() {
        // one fermion shared by two sites
        let basis = FockBasis::new(2, 1).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = [C64::new(h, 0.0), C64::new(0.0, -h)];
        let p = SitePartition::new(&[0], 2).unwrap();
        assert!((entanglement_entropy(&psi, &p, &basis).unwrap() - LN_2).abs() < 1e-14);
        assert!(SitePartition::new(&[2], 2).is_err());
        assert!(SitePartition::new(&[1, 1], 2).is_err());
    }

    #[test]
    fn paired_modes_entropy() {
        // (c†_1 c†_0 + c†_3 c†_2)|0> / √2 with A = {0, 2}: each pair is cut.
        let basis = FockBasis::new(4, 2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut psi = vec![ZERO; basis.len()];
        psi[basis.index(0b0011).unwrap()] = C64::new(h, 0.0);
        psi[basis.index(0b1100).unwrap()] = C64::new(h, 0.0);
        let p = SitePartition::new(&[0, 2], 4).unwrap();
        let s = entanglement_entropy(&psi, &p, &basis).unwrap();
        assert!((s - LN_2).abs() < 1e-12);
        // the complement yields the same value
        let q = SitePartition::new(&[1, 3], 4).unwrap();
        assert!((entanglement_entropy(&psi, &q, &basis).unwrap() - s).abs() < 1e-12);
    }

    /// Slater determinants: the Schmidt route must agree with the
    /// correlation-matrix formula, which knows nothing about Fock signs.
    #[test]
    fn slater_determinant_entropy_matches_correlation_matrix() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let (l, n) = (6usize, 3usize);
        let raw = Mat::from_fn(l, n, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let q = raw.qr();
        let orbitals: CMat = q.compute_thin_Q();
        let basis = FockBasis::new(l, n).unwrap();
        let psi: Vec<C64> = basis
            .states()
            .iter()
            .map(|&s| {
                let occ: Vec<usize> = (0..l).filter(|&j| s >> j & 1 == 1).collect();
                let m = Mat::from_fn(n, n, |a, b| orbitals[(occ[a], b)]);
                linalg::determinant(&m)
            })
            .collect();
        let a_sites = [0usize, 2, 3];
        let part = SitePartition::new(&a_sites, l).unwrap();
        let s_fock = entanglement_entropy(&psi, &part, &basis).unwrap();

        let corr = Mat::from_fn(a_sites.len(), a_sites.len(), |i, j| {
            (0..n)
                .map(|k| orbitals[(a_sites[i], k)] * orbitals[(a_sites[j], k)].conj())
                .sum::<C64>()
        });
        let s_corr: f64 = linalg::eigvalsh(&corr)
            .unwrap()
            .into_iter()
            .map(|x| x.clamp(0.0, 1.0))
            .map(|x| {
                let f = |p: f64| if p > 1e-15 { -p * p.ln() } else { 0.0 };
                f(x) + f(1.0 - x)
            })
            .sum();
        assert!((s_fock - s_corr).abs() < 1e-10, "{s_fock} vs {s_corr}");
    }

    proptest! {
        #[test]
        fn gaps_invariant_under_energy_shift(
            mut e in proptest::collection::vec(-5.0f64..5.0, 2..30),
            shift in -100.0f64..100.0,
            beta in 0.1f64..5.0,
        ) {
            e.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let a = thermal_spectral_structure(&e, beta, 0.3).unwrap();
            let shifted: Vec<f64> = e.iter().map(|x| x + shift).collect();
            let b = thermal_spectral_structure(&shifted, beta, 0.3).unwrap();
            prop_assert_eq!(a.gaps.len(), b.gaps.len());
            for (x, y) in a.gaps.iter().zip(&b.gaps) {
                prop_assert!((x - y).abs() < 1e-9);
            }
        }

        #[test]
        fn partition_invariant_under_joint_scaling(
            mut l in proptest::collection::vec(0i32..400, 1..40),
            scale in 0.01f64..100.0,
        ) {
            // integer-spaced levels keep spacings away from the threshold
            l.sort();
            let levels: Vec<f64> = l.iter().map(|&x| x as f64 * 0.01).collect();
            let scaled: Vec<f64> = levels.iter().map(|x| x * scale).collect();
            let a = detect_manifolds(&levels, 0.055).unwrap();
            let b = detect_manifolds(&scaled, 0.055 * scale).unwrap();
            prop_assert_eq!(a.manifolds, b.manifolds);
        }

        #[test]
        fn log_sum_exp_matches_direct_sum(
            e in proptest::collection::vec(-3.0f64..3.0, 1..20),
            beta in 0.0f64..0.5,
        ) {
            let ens = ThermalEnsemble::new(&e, beta).unwrap();
            let p = ens.probabilities();
            let z: f64 = e.iter().map(|x| (-beta * x).exp()).sum();
            for (pi, x) in p.iter().zip(&e) {
                prop_assert!((pi - (-beta * x).exp() / z).abs() < 1e-12);
            }
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn pure_state_entropy_is_symmetric(
            re in proptest::collection::vec(-1.0f64..1.0, 15),
            im in proptest::collection::vec(-1.0f64..1.0, 15),
        ) {
            let basis = FockBasis::new(6, 2).unwrap();
            let norm: f64 = re.iter().zip(&im).map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
            prop_assume!(norm > 1e-3);
            let psi: Vec<C64> = re.iter().zip(&im).map(|(a, b)| C64::new(*a, *b) / norm).collect();
            let a = SitePartition::new(&[0, 3, 4], 6).unwrap();
            let b = SitePartition::new(&[1, 2, 5], 6).unwrap();
            let sa = entanglement_entropy(&psi, &a, &basis).unwrap();
            let sb = entanglement_entropy(&psi, &b, &basis).unwrap();
            prop_assert!((sa - sb).abs() < 1e-10);
        }
    }
}
