//! Block diagonalization by a lattice translation along y.
//!
//! A shift by `p` rows maps the Landau-gauge Hamiltonian onto itself when
//! the seam phases `2π α lx p` are integer multiples of `2π` and, with a
//! superlattice present, `p` is a multiple of its period. The Fock space
//! then splits into `ly / p` momentum sectors of roughly equal size.

use super::fock::FockBasis;
use super::lattice::LatticeModelSpec;
use crate::error::Result;
use crate::linalg::{CMat, C64, ZERO};
use crate::spectral::{eigendecompose, eigenvalues, EigenSystem};
use faer::Mat;
use std::f64::consts::TAU;

/// One momentum sector: each orbit lists `(basis index, coefficient)`.
#[derive(Debug, Clone)]
struct Sector {
    orbits: Vec<Vec<(usize, C64)>>,
}

impl Sector {
    fn project(&self, h: &CMat) -> CMat {
        let n = self.orbits.len();
        let mut out = Mat::<C64>::zeros(n, n);
        for (b, ob) in self.orbits.iter().enumerate() {
            for (a, oa) in self.orbits.iter().enumerate().skip(b) {
                let mut acc = ZERO;
                for &(i, ci) in oa {
                    for &(j, cj) in ob {
                        acc += ci.conj() * cj * h[(i, j)];
                    }
                }
                out[(a, b)] = acc;
                out[(b, a)] = acc.conj();
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct TranslationSectors {
    rows: usize,
    dim: usize,
    sectors: Vec<Sector>,
}

impl TranslationSectors {
    /// Smallest row shift leaving the model invariant, or `None` when only
    /// the trivial shift `ly` qualifies.
    pub fn symmetry_shift(spec: &LatticeModelSpec) -> Option<usize> {
        (1..spec.ly).find(|&p| {
            let seam = spec.alpha_num as i128 * spec.lx as i128 * p as i128;
            spec.ly % p == 0 && seam % spec.alpha_den as i128 == 0 && (spec.g == 0.0 || p % 2 == 0)
        })
    }

    pub fn new(spec: &LatticeModelSpec, basis: &FockBasis) -> Option<Self> {
        let p = Self::symmetry_shift(spec)?;
        let n = spec.ly / p;
        let shift = |s: u64| -> (u64, f64) {
            let mut mapped = Vec::with_capacity(basis.particles());
            for j in 0..spec.sites() {
                if s >> j & 1 == 1 {
                    let (jx, jy) = spec.coords(j);
                    mapped.push(spec.site(jx, (jy + p) % spec.ly));
                }
            }
            let mut inversions = 0;
            for a in 0..mapped.len() {
                for b in a + 1..mapped.len() {
                    if mapped[a] > mapped[b] {
                        inversions += 1;
                    }
                }
            }
            let t = mapped.iter().fold(0u64, |m, &j| m | 1 << j);
            (t, if inversions % 2 == 0 { 1.0 } else { -1.0 })
        };

        let mut seen = vec![false; basis.len()];
        // (members with their translation signs, sign after a full orbit)
        let mut orbits: Vec<(Vec<(usize, f64)>, f64)> = Vec::new();
        for (i, &s) in basis.states().iter().enumerate() {
            if seen[i] {
                continue;
            }
            let mut members = vec![(i, 1.0)];
            seen[i] = true;
            let (mut cur, mut sign) = shift(s);
            while cur != s {
                let idx = basis
                    .index(cur)
                    .expect("translation preserves particle number");
                seen[idx] = true;
                members.push((idx, sign));
                let (next, sg) = shift(cur);
                cur = next;
                sign *= sg;
            }
            orbits.push((members, sign));
        }

        let sectors = (0..n)
            .map(|k| {
                let lambda = C64::from_polar(1.0, TAU * k as f64 / n as f64);
                let orbits = orbits
                    .iter()
                    .filter(|(m, closing)| {
                        (lambda.powu(m.len() as u32).conj() * closing - 1.0).norm() < 1e-9
                    })
                    .map(|(m, _)| {
                        let norm = (m.len() as f64).sqrt();
                        m.iter()
                            .enumerate()
                            .map(|(j, &(idx, sg))| {
                                (idx, lambda.powu(j as u32).conj() * (sg / norm))
                            })
                            .collect()
                    })
                    .collect();
                Sector { orbits }
            })
            .collect();
        Some(Self {
            rows: p,
            dim: basis.len(),
            sectors,
        })
    }

    pub fn shift_rows(&self) -> usize {
        self.rows
    }

    pub fn sector_dims(&self) -> Vec<usize> {
        self.sectors.iter().map(|s| s.orbits.len()).collect()
    }

    /// Ascending eigenvalues of `h`, gathered from all sectors.
    pub fn eigenvalues(&self, h: &CMat) -> Result<Vec<f64>> {
        let mut all = Vec::with_capacity(self.dim);
        for s in &self.sectors {
            all.extend(eigenvalues(&s.project(h))?);
        }
        all.sort_by(|a, b| a.total_cmp(b));
        Ok(all)
    }

    /// Full eigensystem of `h` in the original Fock basis.
    ///
    /// Levels are ordered by energy; exact ties keep sector order.
    pub fn eigensystem(&self, h: &CMat) -> Result<EigenSystem> {
        let mut parts = Vec::with_capacity(self.sectors.len());
        for s in &self.sectors {
            parts.push(eigendecompose(&s.project(h))?);
        }
        let mut order: Vec<(f64, usize, usize)> = Vec::with_capacity(self.dim);
        for (k, es) in parts.iter().enumerate() {
            order.extend(es.values.iter().enumerate().map(|(c, &v)| (v, k, c)));
        }
        order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut vectors = Mat::<C64>::zeros(self.dim, self.dim);
        for (col, &(_, k, c)) in order.iter().enumerate() {
            let v = &parts[k].vectors;
            for (a, orbit) in self.sectors[k].orbits.iter().enumerate() {
                let amp = v[(a, c)];
                for &(idx, coeff) in orbit {
                    vectors[(idx, col)] = coeff * amp;
                }
            }
        }
        crate::linalg::fix_column_phases(&mut vectors);
        Ok(EigenSystem {
            values: order.iter().map(|o| o.0).collect(),
            vectors,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, orthonormality_defect};
    use crate::models::build_many_body_hamiltonian;

    fn small(g: f64, n: usize) -> (LatticeModelSpec, FockBasis) {
        let mut spec = LatticeModelSpec::hofstadter_hubbard(1.0, g);
        spec.n_particles = n;
        let basis = FockBasis::new(spec.sites(), n).unwrap();
        (spec.with_twist(0.7, -1.3), basis)
    }

    #[test]
    fn shift_for_default_lattice() {
        assert_eq!(
            TranslationSectors::symmetry_shift(&LatticeModelSpec::hofstadter_hubbard(1.0, 0.0)),
            Some(2)
        );
        assert_eq!(
            TranslationSectors::symmetry_shift(&LatticeModelSpec::hofstadter_hubbard(1.0, 3.0)),
            Some(2)
        );
    }

    #[test]
    fn sectors_partition_the_basis() {
        for n in 1..=3 {
            let (spec, basis) = small(1.0, n);
            let t = TranslationSectors::new(&spec, &basis).unwrap();
            assert_eq!(t.sector_dims().iter().sum::<usize>(), basis.len());
        }
    }

    #[test]
    fn reduced_spectrum_matches_full_diagonalization() {
        for (g, n) in [(0.0, 2), (2.5, 2), (1.0, 3)] {
            let (spec, basis) = small(g, n);
            let h = build_many_body_hamiltonian(&spec, &basis).unwrap();
            let t = TranslationSectors::new(&spec, &basis).unwrap();
            let full = eigenvalues(&h).unwrap();
            let reduced = t.eigenvalues(&h).unwrap();
            let err = full
                .iter()
                .zip(&reduced)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(err < 1e-10, "g={g} n={n}: {err}");
        }
    }

    #[test]
    fn embedded_eigenvectors_diagonalize_h() {
        let (spec, basis) = small(0.5, 2);
        let h = build_many_body_hamiltonian(&spec, &basis).unwrap();
        let es = TranslationSectors::new(&spec, &basis)
            .unwrap()
            .eigensystem(&h)
            .unwrap();
        assert!(orthonormality_defect(&es.vectors) < 1e-10);
        assert!(es.max_residual(&h) < 1e-9);
        let d = es.vectors.adjoint() * &h * &es.vectors;
        let diag = Mat::from_fn(
            d.nrows(),
            d.ncols(),
            |i, j| if i == j { d[(i, j)] } else { ZERO },
        );
        assert!(max_abs_diff(&d, &diag) < 1e-9);
    }
}
