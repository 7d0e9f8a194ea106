use std::f64::consts::{PI, TAU};

use dmtopo::linalg::{eigh, identity, max_abs_diff, CMat, C64};
use dmtopo::models::{BlochModel, HaldaneParams, LatticeModelSpec, TwistedLattice};
use dmtopo::topology::{
    band_chern_groups, build_bundles_for_windows, build_manifold_bundles, chern_winding,
    plaquette_band_chern, random_unitary, wilson_loop, wilson_loop_data, ManifoldBundle, TwistGrid,
    DEFAULT_BAND_GAP,
};
use dmtopo::Error;
use faer::Mat;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn haldane(mass: f64) -> BlochModel {
    BlochModel::Haldane(HaldaneParams {
        t1: 1.0,
        t2: 0.1,
        phi: PI / 2.0,
        mass,
    })
}

fn hofstadter_eighth() -> BlochModel {
    BlochModel::Hofstadter { p: 1, q: 8, t: 1.0 }
}

/// Chern number of one band from the Kubo sum over the other bands,
/// `C = (1/π) Σ_k Δk² Im Σ_{m≠n} ⟨n|∂₁H|m⟩⟨m|∂₂H|n⟩ / (E_n − E_m)²`,
/// with central-difference derivatives on a midpoint grid.
fn kubo_chern(model: &BlochModel, band: usize, n_k: usize) -> f64 {
    let h = 1e-5;
    let dk = TAU / n_k as f64;
    let mut total = 0.0;
    for i in 0..n_k {
        for j in 0..n_k {
            let k = [(i as f64 + 0.5) * dk, (j as f64 + 0.5) * dk];
            let (e, v) = eigh(&model.hamiltonian(k)).unwrap();
            let deriv = |axis: usize| -> CMat {
                let mut kp = k;
                let mut km = k;
                kp[axis] += h;
                km[axis] -= h;
                let (a, b) = (model.hamiltonian(kp), model.hamiltonian(km));
                Mat::from_fn(a.nrows(), a.ncols(), |r, c| {
                    (a[(r, c)] - b[(r, c)]) / (2.0 * h)
                })
            };
            let d1 = v.adjoint() * deriv(0) * &v;
            let d2 = v.adjoint() * deriv(1) * &v;
            let mut curv = 0.0;
            for m in 0..e.len() {
                if m != band {
                    curv += (d1[(band, m)] * d2[(m, band)]).im / (e[band] - e[m]).powi(2);
                }
            }
            total += curv * dk * dk;
        }
    }
    total / PI
}

#[test]
fn haldane_bands_match_kubo_oracle() {
    let model = haldane(0.0);
    for band in 0..2 {
        let plaquette = plaquette_band_chern(&model, band..band + 1, 64, DEFAULT_BAND_GAP).unwrap();
        let kubo = kubo_chern(&model, band, 96);
        assert!(
            (kubo - plaquette.winding as f64).abs() < 0.05,
            "band {band}: kubo {kubo}, plaquette {}",
            plaquette.winding
        );
    }
}

#[test]
fn hofstadter_lowest_band_matches_kubo_oracle() {
    let model = hofstadter_eighth();
    let plaquette = plaquette_band_chern(&model, 0..1, 32, DEFAULT_BAND_GAP).unwrap();
    let kubo = kubo_chern(&model, 0, 48);
    assert_eq!(plaquette.winding, 1);
    assert!((kubo - 1.0).abs() < 0.05, "kubo {kubo}");
}

#[test]
fn haldane_regression_signs() {
    let lower = plaquette_band_chern(&haldane(0.0), 0..1, 64, DEFAULT_BAND_GAP)
        .unwrap()
        .winding;
    let upper = plaquette_band_chern(&haldane(0.0), 1..2, 64, DEFAULT_BAND_GAP)
        .unwrap()
        .winding;
    assert_eq!((lower, upper), (1, -1));
    // beyond |M| = 3√3 t2 sin φ the bands are trivial
    let trivial = plaquette_band_chern(&haldane(1.0), 0..1, 64, DEFAULT_BAND_GAP)
        .unwrap()
        .winding;
    assert_eq!(trivial, 0);
}

#[test]
fn flat_two_band_model_is_trivial() {
    let model = BlochModel::Haldane(HaldaneParams {
        t1: 0.0,
        t2: 0.0,
        phi: 0.0,
        mass: 1.0,
    });
    let groups = band_chern_groups(&model, 8, DEFAULT_BAND_GAP).unwrap();
    assert_eq!(
        groups.iter().map(|g| g.chern).collect::<Vec<_>>(),
        vec![0, 0]
    );
}

#[test]
fn hofstadter_band_groups() {
    let groups = band_chern_groups(&hofstadter_eighth(), 32, 1e-3).unwrap();
    let cherns: Vec<i64> = groups.iter().map(|g| g.chern).collect();
    assert_eq!(cherns, vec![1, 1, 1, -6, 1, 1, 1]);
    assert_eq!(groups[3].bands, 3..5);
}

#[test]
fn closed_band_gap_is_reported() {
    // bands 4 and 5 of the α = 1/8 model touch at E = 0
    let err = plaquette_band_chern(&hofstadter_eighth(), 3..4, 16, 1e-3).unwrap_err();
    assert!(matches!(err, Error::GapClosed { .. }));
    assert_eq!(err.exit_code(), 3);
}

fn single_particle() -> TwistedLattice {
    let mut spec = LatticeModelSpec::hofstadter_hubbard(0.0, 0.0);
    spec.n_particles = 1;
    TwistedLattice::new(spec).unwrap()
}

#[test]
fn single_particle_landau_levels_over_twists() {
    // 24 sites at α = 1/8: three states per magnetic band
    let lat = single_particle();
    let grid = TwistGrid::new(6, 6).unwrap();
    let windows = [0..3, 3..6, 6..9, 0..6, 0..24];
    let b = build_bundles_for_windows(&lat, &[1, 2, 3, 4, 5], &windows, grid, 1e-3).unwrap();
    let c: Vec<i64> = b
        .iter()
        .map(|b| chern_winding(b).unwrap().winding)
        .collect();
    assert_eq!(&c[..3], &[1, 1, 1]);
    // complement consistency and the full-space sum rule
    assert_eq!(c[3], c[0] + c[1]);
    assert_eq!(c[4], 0);
}

#[test]
fn symmetry_reduction_does_not_change_windings() {
    let mut spec = LatticeModelSpec::hofstadter_hubbard(1.0, 0.0);
    spec.n_particles = 2;
    let grid = TwistGrid::new(5, 5).unwrap();
    let reduced = TwistedLattice::new(spec.clone()).unwrap();
    let full = TwistedLattice::new(spec)
        .unwrap()
        .with_symmetry_reduction(false);
    assert!(reduced.sectors().is_some());
    assert!(full.sectors().is_none());
    let a = build_manifold_bundles(&reduced, &[1], grid, 0.1).unwrap();
    let b = build_manifold_bundles(&full, &[1], grid, 0.1).unwrap();
    assert_eq!(a[0].dim, b[0].dim);
    let (ca, cb) = (chern_winding(&a[0]).unwrap(), chern_winding(&b[0]).unwrap());
    assert_eq!(ca.winding, cb.winding);
    assert!((ca.raw_phase - cb.raw_phase).abs() < 1e-8);
}

fn constant_bundle(dim: usize, n: usize) -> ManifoldBundle {
    let grid = TwistGrid::new(n, n).unwrap();
    let frame = Mat::from_fn(dim + 2, dim, |i, j| {
        if i == j {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    ManifoldBundle::new(1, 0, grid, vec![frame; grid.len()], None, None).unwrap()
}

#[test]
fn constant_bundle_gives_identity_loops() {
    let b = constant_bundle(3, 4);
    for iy in 0..4 {
        assert!(max_abs_diff(&wilson_loop(&b, iy).unwrap(), &identity(3)) < 1e-14);
    }
    let data = wilson_loop_data(&b).unwrap();
    assert!(data.unwrapped.iter().all(|p| p.abs() < 1e-14));
    assert_eq!(data.winding, 0);
}

/// `|ψ(θ)⟩ = (cos a, e^{imθx} sin a)` has Berry phase `m·2π sin²a`
/// around a θx loop.
#[test]
fn single_state_loop_is_berry_phase() {
    let (a, m) = (0.4f64, 1.0);
    let grid = TwistGrid::new(40, 4).unwrap();
    let frames = (0..grid.len())
        .map(|idx| {
            let (tx, _) = grid.theta(idx % grid.nx, idx / grid.nx);
            Mat::from_fn(2, 1, |i, _| {
                if i == 0 {
                    C64::new(a.cos(), 0.0)
                } else {
                    C64::from_polar(a.sin(), m * tx)
                }
            })
        })
        .collect();
    let b = ManifoldBundle::new(1, 0, grid, frames, None, None).unwrap();
    let w = wilson_loop(&b, 0).unwrap();
    assert!((w[(0, 0)].norm() - 1.0).abs() < 1e-12);
    let expected = -(m * TAU * a.sin().powi(2));
    let got = w[(0, 0)].arg();
    let diff = (got - expected).rem_euclid(TAU);
    assert!(diff.min(TAU - diff) < 5e-3, "{got} vs {expected}");
}

#[test]
fn coarse_grid_is_rejected() {
    // orthogonal frames at neighbouring points
    let grid = TwistGrid::new(4, 4).unwrap();
    let frames = (0..grid.len())
        .map(|idx| {
            Mat::from_fn(2, 1, |i, _| {
                if i == idx % 2 {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            })
        })
        .collect();
    let b = ManifoldBundle::new(1, 0, grid, frames, None, None).unwrap();
    assert!(matches!(
        wilson_loop(&b, 0),
        Err(Error::GridTooCoarse { .. })
    ));
}

#[test]
fn grid_stability_for_single_particle_levels() {
    let lat = single_particle();
    for n in [8, 12, 16] {
        let grid = TwistGrid::new(n, n).unwrap();
        let b = build_bundles_for_windows(&lat, &[1], &[0..3], grid, 1e-3).unwrap();
        assert_eq!(chern_winding(&b[0]).unwrap().winding, 1, "grid {n}");
    }
}

#[test]
fn twist_grid_minimum_size() {
    assert!(TwistGrid::new(3, 8).is_err());
    assert!(TwistGrid::new(4, 4).is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn winding_is_gauge_invariant(seed in any::<u64>()) {
        let lat = single_particle();
        let grid = TwistGrid::new(6, 6).unwrap();
        let mut b = build_bundles_for_windows(&lat, &[1], &[0..6], grid, 1e-3).unwrap().remove(0);
        let before = chern_winding(&b).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rotations: Vec<_> = (0..grid.len()).map(|_| random_unitary(6, &mut rng)).collect();
        b.rotate_frames(&rotations);
        let after = chern_winding(&b).unwrap();
        prop_assert_eq!(before.winding, after.winding);
        prop_assert!((before.raw_phase - after.raw_phase).abs() < 1e-10);
    }

    #[test]
    fn random_unitaries_are_unitary(seed in any::<u64>(), n in 1usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_unitary(n, &mut rng);
        prop_assert!(max_abs_diff(&(u.adjoint() * &u), &identity(n)) < 1e-12);
    }
}
