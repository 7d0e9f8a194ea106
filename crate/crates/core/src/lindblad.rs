//! Open-system layer: vectorised Lindblad generators, damping gap and
//! steady state, finite-time evolution maps, and the local-dephasing
//! demonstration on a Bell pair.
//!
//! Density matrices are vectorised column-major, `vec(ρ)[i + d j] = ρ_ij`,
//! so that `vec(A ρ B) = (Bᵀ ⊗ A) vec(ρ)`.

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, kron, CMat, C64, I, ONE, ZERO};
use crate::spectral::bipartite_entropy;

/// Largest Hilbert-space dimension accepted (superoperator is `d² × d²`).
pub const MAX_LINDBLAD_DIM: usize = 64;

#[derive(Debug, Clone)]
pub struct JumpOperator {
    pub op: CMat,
    pub rate: f64,
}

impl JumpOperator {
    pub fn new(op: CMat, rate: f64) -> Self {
        Self { op, rate }
    }
}

/// `dρ/dt = −i[H, ρ] + Σ_n γ_n (L_n ρ L_n† − ½{L_n† L_n, ρ})`.
#[derive(Debug, Clone)]
pub struct LindbladSystem {
    pub hamiltonian: CMat,
    pub jumps: Vec<JumpOperator>,
    pub liouvillian: CMat,
}

impl LindbladSystem {
    pub fn dim(&self) -> usize {
        self.hamiltonian.nrows()
    }

    /// `exp(t L)` as a superoperator.
    pub fn propagator(&self, t: f64) -> CMat {
        let n = self.liouvillian.nrows();
        linalg::expm(&Mat::from_fn(n, n, |i, j| self.liouvillian[(i, j)] * t))
    }
}

pub fn build_liouvillian(hamiltonian: CMat, jumps: Vec<JumpOperator>) -> Result<LindbladSystem> {
    let d = hamiltonian.nrows();
    if hamiltonian.ncols() != d || d == 0 {
        return Err(Error::Config(
            "Hamiltonian must be a non-empty square matrix".into(),
        ));
    }
    if d > MAX_LINDBLAD_DIM {
        return Err(Error::Resource {
            what: "Liouvillian",
            dim: d * d,
            cap: MAX_LINDBLAD_DIM * MAX_LINDBLAD_DIM,
        });
    }
    for j in &jumps {
        if j.op.nrows() != d || j.op.ncols() != d {
            return Err(Error::Config(format!(
                "jump operator is {}x{}, system is {d}x{d}",
                j.op.nrows(),
                j.op.ncols()
            )));
        }
        if !(j.rate >= 0.0) || !j.rate.is_finite() {
            return Err(Error::Config(format!(
                "jump rate {} must be finite and non-negative",
                j.rate
            )));
        }
    }
    let id = linalg::identity(d);
    let ht = hamiltonian.transpose().to_owned();
    let mut l = &kron(&id, &hamiltonian) - &kron(&ht, &id);
    l = Mat::from_fn(d * d, d * d, |i, j| -I * l[(i, j)]);
    for j in &jumps {
        let op = &j.op;
        let conj = Mat::from_fn(d, d, |a, b| op[(a, b)].conj());
        let ldl = op.adjoint() * op;
        let ldl_t = ldl.transpose().to_owned();
        let term = &(&kron(&conj, op) - &linalg::scale(&kron(&id, &ldl), 0.5))
            - &linalg::scale(&kron(&ldl_t, &id), 0.5);
        l = &l + &linalg::scale(&term, j.rate);
    }
    Ok(LindbladSystem {
        hamiltonian,
        jumps,
        liouvillian: l,
    })
}

pub fn vectorize(rho: &CMat) -> Vec<C64> {
    let d = rho.nrows();
    (0..d * d).map(|k| rho[(k % d, k / d)]).collect()
}

pub fn unvectorize(v: &[C64], d: usize) -> CMat {
    Mat::from_fn(d, d, |i, j| v[i + d * j])
}

fn hermitize(m: &CMat) -> CMat {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| {
        (m[(i, j)] + m[(j, i)].conj()) * 0.5
    })
}

#[derive(Debug, Clone)]
pub struct LindbladSpectrum {
    pub eigenvalues: Vec<C64>,
    pub damping_gap: f64,
    pub ness: CMat,
    /// Zero-eigenvalue tolerance that was applied.
    pub tolerance: f64,
}

/// Damping gap and unique steady state of a Liouvillian.
///
/// An eigenvalue counts as zero when `|Re λ| ≤ 10⁻⁹ ‖L‖_F`; exactly one
/// such eigenvalue is required.
pub fn damping_gap_and_ness(sys: &LindbladSystem) -> Result<LindbladSpectrum> {
    let d = sys.dim();
    let norm = linalg::frobenius(&sys.liouvillian);
    let tol = 1e-9 * norm.max(f64::MIN_POSITIVE);
    if norm == 0.0 {
        return Err(Error::NotUnique { count: d * d, tol });
    }
    let (values, vectors) = linalg::eig(&sys.liouvillian)?;
    let zero: Vec<usize> = (0..values.len())
        .filter(|&k| values[k].re.abs() <= tol)
        .collect();
    if zero.len() != 1 {
        return Err(Error::NotUnique {
            count: zero.len(),
            tol,
        });
    }
    let k0 = zero[0];
    let damping_gap = -values
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != k0)
        .map(|(_, v)| v.re)
        .fold(f64::NEG_INFINITY, f64::max);
    let v: Vec<C64> = (0..d * d).map(|i| vectors[(i, k0)]).collect();
    let rho = hermitize(&unvectorize(&v, d));
    let tr = linalg::trace(&rho);
    let ness = Mat::from_fn(d, d, |i, j| rho[(i, j)] / tr);
    let mut eigenvalues = values;
    eigenvalues.sort_by(|a, b| {
        b.re.partial_cmp(&a.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
    Ok(LindbladSpectrum {
        eigenvalues,
        damping_gap,
        ness,
        tolerance: tol,
    })
}

/// `exp(t L) ρ₀`, re-Hermitized.
pub fn lcp_evolve(sys: &LindbladSystem, rho0: &CMat, t: f64) -> Result<CMat> {
    let d = sys.dim();
    if rho0.nrows() != d || rho0.ncols() != d {
        return Err(Error::Config(format!(
            "state is {}x{}, system is {d}x{d}",
            rho0.nrows(),
            rho0.ncols()
        )));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Config(format!(
            "evolution time {t} must be finite and non-negative"
        )));
    }
    Ok(apply_propagator(&sys.propagator(t), rho0))
}

pub fn apply_propagator(p: &CMat, rho: &CMat) -> CMat {
    let d = rho.nrows();
    hermitize(&unvectorize(&linalg::matvec(p, &vectorize(rho)), d))
}

/// Trace norm of a Hermitian matrix.
pub fn trace_norm(m: &CMat) -> Result<f64> {
    Ok(linalg::eigvalsh(&hermitize(m))?
        .iter()
        .map(|x| x.abs())
        .sum())
}

pub fn purity(rho: &CMat) -> f64 {
    linalg::trace(&(rho * rho)).re
}

/// Pauli and ladder operators with basis `|↑⟩ = 0`, `|↓⟩ = 1`.
pub mod qubit {
    use super::*;

    fn m2(a: [[C64; 2]; 2]) -> CMat {
        Mat::from_fn(2, 2, |i, j| a[i][j])
    }

    pub fn sigma_x() -> CMat {
        m2([[ZERO, ONE], [ONE, ZERO]])
    }

    pub fn sigma_y() -> CMat {
        m2([[ZERO, -I], [I, ZERO]])
    }

    pub fn sigma_z() -> CMat {
        m2([[ONE, ZERO], [ZERO, -ONE]])
    }

    /// `|↓⟩⟨↑|`
    pub fn sigma_minus() -> CMat {
        m2([[ZERO, ZERO], [ONE, ZERO]])
    }

    /// `|↑⟩⟨↓|`
    pub fn sigma_plus() -> CMat {
        m2([[ZERO, ONE], [ZERO, ZERO]])
    }

    /// `op` acting on qubit `site` of an `n`-qubit register; qubit 0 is the
    /// most significant factor.
    pub fn embed(op: &CMat, site: usize, n: usize) -> CMat {
        let mut acc = linalg::identity(1);
        for s in 0..n {
            let factor = if s == site {
                op.clone()
            } else {
                linalg::identity(2)
            };
            acc = kron(&acc, &factor);
        }
        acc
    }

    pub fn projector(state: &[C64]) -> CMat {
        Mat::from_fn(state.len(), state.len(), |i, j| state[i] * state[j].conj())
    }
}

/// Eigen-decomposition of a density matrix into weighted pure states.
///
/// Eigenvalues closer than `degeneracy_tol` are treated as one degenerate
/// eigenspace. Inside such a space the basis is fixed by diagonalizing the
/// Hermitian `pointer` operator, when one is given.
pub fn mixture_eigenstates(
    rho: &CMat,
    pointer: Option<&CMat>,
    degeneracy_tol: f64,
) -> Result<Vec<(f64, Vec<C64>)>> {
    let d = rho.nrows();
    let (vals, vecs) = linalg::eigh(&hermitize(rho))?;
    let mut out = Vec::with_capacity(d);
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d && vals[end] - vals[end - 1] < degeneracy_tol {
            end += 1;
        }
        let block = vecs.subcols(start, end - start).to_owned();
        let basis = match pointer {
            Some(p) if end - start > 1 => {
                let projected = block.adjoint() * p * &block;
                let (_, rot) = linalg::eigh(&hermitize(&projected))?;
                &block * &rot
            }
            _ => block,
        };
        for k in 0..end - start {
            let weight = vals[start + k];
            let v: Vec<C64> = (0..d).map(|i| basis[(i, k)]).collect();
            out.push((weight, v));
        }
        start = end;
    }
    out.reverse();
    Ok(out)
}

/// Weights, purity and per-eigenstate entanglement of a two-qubit state.
#[derive(Debug, Clone, Serialize)]
pub struct MixtureReport {
    pub weights: Vec<f64>,
    pub entropies: Vec<f64>,
    pub purity: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BellReport {
    pub dephasing_rate: f64,
    pub evolution_time: f64,
    pub residual_coherence: f64,
    pub before: MixtureReport,
    pub after: MixtureReport,
}

/// Weights below this are not part of the ensemble.
const WEIGHT_CUTOFF: f64 = 1e-12;

fn mixture_report(rho: &CMat, pointer: Option<&CMat>) -> Result<MixtureReport> {
    let states = mixture_eigenstates(rho, pointer, 1e-6)?;
    let mut weights = Vec::new();
    let mut entropies = Vec::new();
    for (w, v) in states {
        if w > WEIGHT_CUTOFF {
            weights.push(w);
            entropies.push(bipartite_entropy(&v, 2, 2)?);
        }
    }
    Ok(MixtureReport {
        weights,
        entropies,
        purity: purity(rho),
    })
}

/// Local measurement on half of a Bell pair, modelled as strong dephasing
/// `√κ σ_z` on qubit A until all coherences drop below `1e-8`.
pub fn bell_measurement_demo() -> Result<BellReport> {
    let kappa = 1.0;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let psi = [ZERO, C64::new(h, 0.0), C64::new(h, 0.0), ZERO];
    let rho0 = qubit::projector(&psi);
    let jump = qubit::embed(&qubit::sigma_z(), 0, 2);
    let sys = build_liouvillian(
        Mat::zeros(4, 4),
        vec![JumpOperator::new(jump.clone(), kappa)],
    )?;

    // coherences decay as e^{−2κt}
    let mut t = ((0.5f64 / 1e-8).ln() + 1.0) / (2.0 * kappa);
    let mut rho = lcp_evolve(&sys, &rho0, t)?;
    let coherence = |r: &CMat| {
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    worst = worst.max(r[(i, j)].norm());
                }
            }
        }
        worst
    };
    while coherence(&rho) >= 1e-8 {
        t *= 2.0;
        rho = lcp_evolve(&sys, &rho0, t)?;
    }
    Ok(BellReport {
        dephasing_rate: kappa,
        evolution_time: t,
        residual_coherence: coherence(&rho),
        before: mixture_report(&rho0, None)?,
        after: mixture_report(&rho, Some(&jump))?,
    })
}

/// Two gapped single-qubit Liouvillians with distinct steady states, and
/// the distance left after preparing one steady state from the other.
#[derive(Debug, Clone)]
pub struct LcpDemo {
    pub first: LindbladSpectrum,
    pub second: LindbladSpectrum,
    pub time: f64,
    /// `‖exp(t L₁) ρ₂ − ρ₁‖₁`
    pub distance: f64,
    /// `‖ρ₁ − ρ₂‖₁`
    pub initial_distance: f64,
}

pub fn lcp_equivalence_demo(time_in_gaps: f64) -> Result<LcpDemo> {
    // driven decay towards |↓⟩ versus pumping into |↑⟩ with dephasing
    let l1 = build_liouvillian(
        linalg::scale(&qubit::sigma_x(), 0.35),
        vec![JumpOperator::new(qubit::sigma_minus(), 1.0)],
    )?;
    let l2 = build_liouvillian(
        Mat::zeros(2, 2),
        vec![
            JumpOperator::new(qubit::sigma_plus(), 0.8),
            JumpOperator::new(qubit::sigma_z(), 0.3),
        ],
    )?;
    let first = damping_gap_and_ness(&l1)?;
    let second = damping_gap_and_ness(&l2)?;
    let time = time_in_gaps / first.damping_gap;
    let evolved = lcp_evolve(&l1, &second.ness, time)?;
    let distance = trace_norm(&(&evolved - &first.ness))?;
    let initial_distance = trace_norm(&(&second.ness - &first.ness))?;
    Ok(LcpDemo {
        first,
        second,
        time,
        distance,
        initial_distance,
    })
}

/// Matrix entry in a JSON config: a real number or `[re, im]`.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl From<Entry> for C64 {
    fn from(e: Entry) -> Self {
        match e {
            Entry::Real(r) => C64::new(r, 0.0),
            Entry::Complex([re, im]) => C64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalOp {
    SigmaMinus,
    SigmaPlus,
    SigmaX,
    SigmaY,
    SigmaZ,
}

impl LocalOp {
    pub fn matrix(self) -> CMat {
        match self {
            LocalOp::SigmaMinus => qubit::sigma_minus(),
            LocalOp::SigmaPlus => qubit::sigma_plus(),
            LocalOp::SigmaX => qubit::sigma_x(),
            LocalOp::SigmaY => qubit::sigma_y(),
            LocalOp::SigmaZ => qubit::sigma_z(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpSpec {
    pub site: usize,
    pub rate: f64,
    pub op: LocalOp,
}

/// Qubit-register open system read from JSON.
///
/// Jump operators are single-site Pauli or ladder operators, so the
/// generator is local by construction.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LindbladConfig {
    pub dim: usize,
    #[serde(default)]
    pub hamiltonian: Option<Vec<Vec<Entry>>>,
    #[serde(default)]
    pub jumps: Vec<JumpSpec>,
}

impl LindbladConfig {
    pub fn build(&self) -> Result<LindbladSystem> {
        if self.dim < 2 || !self.dim.is_power_of_two() {
            return Err(Error::Config(format!(
                "dim {} is not a qubit-register dimension (2^n)",
                self.dim
            )));
        }
        if self.dim > MAX_LINDBLAD_DIM {
            return Err(Error::Resource {
                what: "Liouvillian",
                dim: self.dim * self.dim,
                cap: MAX_LINDBLAD_DIM * MAX_LINDBLAD_DIM,
            });
        }
        let n = self.dim.trailing_zeros() as usize;
        let h = match &self.hamiltonian {
            None => Mat::zeros(self.dim, self.dim),
            Some(rows) => {
                if rows.len() != self.dim || rows.iter().any(|r| r.len() != self.dim) {
                    return Err(Error::Config(format!(
                        "hamiltonian must be {0}x{0}",
                        self.dim
                    )));
                }
                let h = Mat::from_fn(self.dim, self.dim, |i, j| C64::from(rows[i][j]));
                if linalg::hermiticity_defect(&h) > 1e-12 {
                    return Err(Error::Config("hamiltonian is not Hermitian".into()));
                }
                h
            }
        };
        let mut jumps = Vec::with_capacity(self.jumps.len());
        for j in &self.jumps {
            if j.site >= n {
                return Err(Error::Config(format!(
                    "jump site {} outside register of {n} qubits",
                    j.site
                )));
            }
            jumps.push(JumpOperator::new(
                qubit::embed(&j.op.matrix(), j.site, n),
                j.rate,
            ));
        }
        build_liouvillian(h, jumps)
    }
}

/// JSON output of `lindblad ness`.
#[derive(Debug, Clone, Serialize)]
pub struct NessReport {
    pub damping_gap: f64,
    pub ness_diag: Vec<f64>,
    pub purity: f64,
}

impl NessReport {
    pub fn from_spectrum(s: &LindbladSpectrum) -> Self {
        Self {
            damping_gap: s.damping_gap,
            ness_diag: (0..s.ness.nrows()).map(|i| s.ness[(i, i)].re).collect(),
            purity: purity(&s.ness),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use rand::{Rng, SeedableRng};

    fn decay(gamma: f64) -> LindbladSystem {
        build_liouvillian(
            Mat::zeros(2, 2),
            vec![JumpOperator::new(qubit::sigma_minus(), gamma)],
        )
        .unwrap()
    }

    fn random_matrix<R: Rng>(d: usize, rng: &mut R) -> CMat {
        Mat::from_fn(d, d, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    #[test]
    fn empty_generator_is_zero() {
        let sys = build_liouvillian(Mat::zeros(3, 3), vec![]).unwrap();
        assert_eq!(linalg::frobenius(&sys.liouvillian), 0.0);
        assert!(matches!(
            damping_gap_and_ness(&sys),
            Err(Error::NotUnique { .. })
        ));
    }

    #[test]
    fn qubit_decay_spectrum() {
        // analytic: populations relax at γ, coherences at γ/2
        let s = damping_gap_and_ness(&decay(1.0)).unwrap();
        let mut re: Vec<f64> = s.eigenvalues.iter().map(|v| v.re).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in re.iter().zip([-1.0, -0.5, -0.5, 0.0]) {
            assert!((a - b).abs() < 1e-12, "{re:?}");
        }
        assert!(s.eigenvalues.iter().all(|v| v.im.abs() < 1e-12));
        assert!((s.damping_gap - 0.5).abs() < 1e-12);
        let down = qubit::projector(&[ZERO, ONE]);
        assert!(max_abs_diff(&s.ness, &down) < 1e-12);
    }

    #[test]
    fn two_decaying_qubits() {
        let jumps = (0..2)
            .map(|s| JumpOperator::new(qubit::embed(&qubit::sigma_minus(), s, 2), 1.0))
            .collect();
        let sys = build_liouvillian(Mat::zeros(4, 4), jumps).unwrap();
        let s = damping_gap_and_ness(&sys).unwrap();
        assert!((s.damping_gap - 0.5).abs() < 1e-10);
        let mut dd = vec![ZERO; 4];
        dd[3] = ONE;
        assert!(trace_norm(&(&s.ness - &qubit::projector(&dd))).unwrap() < 1e-9);
    }

    #[test]
    fn undamped_generator_has_no_unique_steady_state() {
        let sys = build_liouvillian(qubit::sigma_z(), vec![]).unwrap();
        assert!(matches!(
            damping_gap_and_ness(&sys),
            Err(Error::NotUnique { count: 4, .. })
        ));
    }

    #[test]
    fn trace_preserved_for_random_generators() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for d in [2usize, 3, 5] {
            let a = random_matrix(d, &mut rng);
            let h = hermitize(&a);
            let jumps = (0..2)
                .map(|_| JumpOperator::new(random_matrix(d, &mut rng), rng.random_range(0.1..2.0)))
                .collect();
            let sys = build_liouvillian(h, jumps).unwrap();
            let id = vectorize(&linalg::identity(d));
            for col in 0..d * d {
                let s: C64 = (0..d * d)
                    .map(|r| id[r].conj() * sys.liouvillian[(r, col)])
                    .sum();
                assert!(s.norm() < 1e-10);
            }
        }
    }

    #[test]
    fn evolution_at_zero_time_is_identity() {
        let sys = decay(0.7);
        let rho = hermitize(&qubit::projector(&[C64::new(0.6, 0.0), C64::new(0.0, 0.8)]));
        assert!(max_abs_diff(&lcp_evolve(&sys, &rho, 0.0).unwrap(), &rho) < 1e-15);
    }

    #[test]
    fn qubit_decay_matches_analytic_solution() {
        let gamma = 1.3;
        let sys = decay(gamma);
        let psi = [C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        let rho0 = qubit::projector(&psi);
        for t in [0.1, 1.0, 3.7] {
            let r = lcp_evolve(&sys, &rho0, t).unwrap();
            assert!((r[(0, 0)].re - 0.36 * (-gamma * t).exp()).abs() < 1e-12);
            assert!((r[(0, 1)] - rho0[(0, 1)] * (-gamma * t / 2.0).exp()).norm() < 1e-12);
            assert!((linalg::trace(&r).re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn semigroup_and_positivity() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let d = 3;
        let h = hermitize(&random_matrix(d, &mut rng));
        let jumps = vec![JumpOperator::new(random_matrix(d, &mut rng), 0.5)];
        let sys = build_liouvillian(h, jumps).unwrap();
        let v: Vec<C64> = (0..d)
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let n: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        let rho0 = qubit::projector(&v.iter().map(|x| x / n).collect::<Vec<_>>());
        let a = lcp_evolve(&sys, &lcp_evolve(&sys, &rho0, 0.4).unwrap(), 1.1).unwrap();
        let b = lcp_evolve(&sys, &rho0, 1.5).unwrap();
        assert!(max_abs_diff(&a, &b) < 1e-8);
        for t in [0.0, 0.3, 1.0, 5.0, 20.0] {
            let r = lcp_evolve(&sys, &rho0, t).unwrap();
            assert!((linalg::trace(&r).re - 1.0).abs() < 1e-9);
            assert!(linalg::eigvalsh(&r).unwrap()[0] >= -1e-9);
        }
    }

    #[test]
    fn ness_is_a_density_matrix() {
        let demo = lcp_equivalence_demo(40.0).unwrap();
        for s in [&demo.first, &demo.second] {
            assert!((linalg::trace(&s.ness).re - 1.0).abs() < 1e-9);
            assert!(linalg::hermiticity_defect(&s.ness) < 1e-9);
            assert!(linalg::eigvalsh(&s.ness).unwrap()[0] >= -1e-9);
            assert!(s.eigenvalues.iter().all(|v| v.re <= s.tolerance));
        }
        assert!(demo.initial_distance > 0.5);
    }

    #[test]
    fn bell_demo_report() {
        let r = bell_measurement_demo().unwrap();
        assert_eq!(r.before.weights.len(), 1);
        assert!((r.before.entropies[0] - std::f64::consts::LN_2).abs() < 1e-12);
        assert!((r.before.purity - 1.0).abs() < 1e-12);
        assert_eq!(r.after.weights.len(), 2);
        for (w, s) in r.after.weights.iter().zip(&r.after.entropies) {
            assert!((w - 0.5).abs() < 1e-8);
            assert!(*s <= 1e-8);
        }
        assert!((r.after.purity - 0.5).abs() < 1e-8);
    }

    #[test]
    fn config_parsing() {
        let cfg: LindbladConfig = serde_json::from_str(
            r#"{"dim": 4, "hamiltonian": [[0,0,0,0],[0,0,[0.5,0],0],[0,0.5,0,0],[0,0,0,0]],
                "jumps": [{"site": 0, "rate": 1.0, "op": "sigma_minus"}, {"site": 1, "rate": 1.0, "op": "sigma_minus"}]}"#,
        )
        .unwrap();
        let s = damping_gap_and_ness(&cfg.build().unwrap()).unwrap();
        let r = NessReport::from_spectrum(&s);
        assert!((r.ness_diag[3] - 1.0).abs() < 1e-9);
        assert!((r.purity - 1.0).abs() < 1e-9);

        let bad: LindbladConfig = serde_json::from_str(r#"{"dim": 3}"#).unwrap();
        assert!(bad.build().is_err());
        let bad: LindbladConfig = serde_json::from_str(
            r#"{"dim": 2, "jumps": [{"site": 1, "rate": 1, "op": "sigma_z"}]}"#,
        )
        .unwrap();
        assert!(bad.build().is_err());
    }
}
