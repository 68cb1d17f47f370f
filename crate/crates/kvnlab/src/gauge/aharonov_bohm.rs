use super::{Level, SpectrumResult};
use crate::numerics::{bessel_zero, Grid1};
use crate::{Error, Result, C64, I};
use nalgebra::{DMatrix, SymmetricEigen};

/// Phase-space grid for the classical radial problem at fixed `p_θ`, angular
/// number `n` and `(λ_z, p_z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGrid {
    pub rho: Grid1,
    pub p_rho: Grid1,
    pub p_theta: f64,
    pub n_theta: i64,
}

impl Default for RadialGrid {
    fn default() -> Self {
        Self {
            rho: Grid1 { min: 0.5, step: 2.5 / 15.0, count: 16 },
            p_rho: Grid1 { min: -2.0, step: 4.0 / 15.0, count: 16 },
            p_theta: 1.0,
            n_theta: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbParams {
    /// Flux in units of the flux quantum, `α = eΦ/(2πħc)`.
    pub alpha: f64,
    /// Radius of the confining cylinder.
    pub radius: f64,
    /// `(k, m)` pairs.
    pub levels: Vec<(usize, i64)>,
    pub p_z: f64,
    pub lambda_z: f64,
    pub mu: f64,
    pub hbar: f64,
    pub radial: RadialGrid,
}

impl Default for AbParams {
    fn default() -> Self {
        Self {
            alpha: 0.1,
            radius: 1.0,
            levels: vec![(2, 1)],
            p_z: 0.0,
            lambda_z: 0.0,
            mu: 1.0,
            hbar: 1.0,
            radial: RadialGrid::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbClassical {
    pub with_flux: SpectrumResult,
    pub without_flux: SpectrumResult,
    pub matrix_difference: f64,
    pub spectrum_difference: f64,
}

impl AbClassical {
    /// Whether the coupled radial operator is the free one after the `p_θ` shift.
    pub fn identical(&self, tol: f64) -> bool {
        self.matrix_difference <= tol && self.spectrum_difference <= tol
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbSpectra {
    pub quantum: SpectrumResult,
    pub quantum_free: SpectrumResult,
    pub classical: AbClassical,
}

/// Discretized radial Liouvillian
/// `−(i/μ)p_ρ∂_ρ + (p_θ − s)n/(μρ²) − i(p_θ − s)²/(μρ³)∂_{p_ρ} + λ_z p_z/μ`
/// with central differences and Dirichlet ends; `s = eΦ/(2πc)`.
pub fn radial_liouvillian(grid: &RadialGrid, shift: f64, lambda_z: f64, p_z: f64, mu: f64) -> Result<DMatrix<C64>> {
    if !(grid.rho.min > 0.0) {
        return Err(Error::InvalidParameter(format!("radial grid must start at ρ > 0, got {}", grid.rho.min)));
    }
    let (nr, np) = (grid.rho.count, grid.p_rho.count);
    let (hr, hp) = (grid.rho.step, grid.p_rho.step);
    let pt = grid.p_theta - shift;
    let mut m = DMatrix::from_element(nr * np, nr * np, C64::new(0.0, 0.0));
    for i in 0..nr {
        let rho = grid.rho.at(i);
        for j in 0..np {
            let row = i * np + j;
            let p = grid.p_rho.at(j);
            m[(row, row)] += C64::new((pt * grid.n_theta as f64 / (rho * rho) + lambda_z * p_z) / mu, 0.0);
            for (di, sign) in [(1i64, 1.0), (-1, -1.0)] {
                let ii = i as i64 + di;
                if (0..nr as i64).contains(&ii) {
                    m[(row, ii as usize * np + j)] += -I * (p / mu) * (sign * 0.5 / hr);
                }
                let jj = j as i64 + di;
                if (0..np as i64).contains(&jj) {
                    m[(row, i * np + jj as usize)] += -I * (pt * pt / (mu * rho.powi(3))) * (sign * 0.5 / hp);
                }
            }
        }
    }
    Ok(m)
}

fn hermitian_spectrum(m: DMatrix<C64>, context: &str) -> SpectrumResult {
    let mut values: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    let levels = values.into_iter().enumerate().map(|(k, value)| Level { label: format!("j={k}"), value, degeneracy: 1 }).collect();
    SpectrumResult::new(context, levels)
}

fn quantum_levels(p: &AbParams, alpha: f64, context: &str) -> Result<SpectrumResult> {
    let levels = p
        .levels
        .iter()
        .map(|&(k, m)| {
            let zero = bessel_zero((m as f64 - alpha).abs(), k)?;
            Ok(Level {
                label: format!("k={k},m={m}"),
                value: p.hbar * p.hbar * zero * zero / (2.0 * p.mu * p.radius * p.radius) + p.p_z * p.p_z / (2.0 * p.mu),
                degeneracy: 1,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumResult::new(context, levels))
}

/// Quantum energies `E_{k,m−α} = ħ²α²_{k,|m−α|}/(2μb²) + p_z²/2μ` with and
/// without the flux, and the classical radial spectra of the free and coupled
/// Liouvillians. The coupled one is evaluated at `p_θ + αħ`, where the
/// minimal-coupling shift `p_θ → p_θ − αħ` must reproduce the free operator.
pub fn ab_spectra(p: &AbParams) -> Result<AbSpectra> {
    if !(0.0..1.0).contains(&p.alpha) {
        return Err(Error::InvalidParameter(format!("flux α = {} outside [0, 1)", p.alpha)));
    }
    for (name, v) in [("radius", p.radius), ("mass", p.mu), ("hbar", p.hbar)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidParameter(format!("{name} {v}")));
        }
    }
    let quantum = quantum_levels(p, p.alpha, "quantum, with flux")?;
    let quantum_free = quantum_levels(p, 0.0, "quantum, no flux")?;
    let shift = p.alpha * p.hbar;
    let free = radial_liouvillian(&p.radial, 0.0, p.lambda_z, p.p_z, p.mu)?;
    let coupled_grid = RadialGrid { p_theta: p.radial.p_theta + shift, ..p.radial };
    let coupled = radial_liouvillian(&coupled_grid, shift, p.lambda_z, p.p_z, p.mu)?;
    let matrix_difference = (&coupled - &free).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let without_flux = hermitian_spectrum(free, "classical radial, no flux");
    let with_flux = hermitian_spectrum(coupled, "classical radial, with flux");
    let spectrum_difference =
        with_flux.values().iter().zip(without_flux.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(AbSpectra {
        quantum,
        quantum_free,
        classical: AbClassical { with_flux, without_flux, matrix_difference, spectrum_difference },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flux_lowers_first_excited_level() {
        let s = ab_spectra(&AbParams::default()).unwrap();
        let e_flux = s.quantum.find("k=2,m=1").unwrap().value;
        let e_free = s.quantum_free.find("k=2,m=1").unwrap().value;
        // j_{1,1}²/2 and j_{0.9,1}²/2 from tabulated zeros.
        assert!((e_free - 3.831705970207512_f64.powi(2) / 2.0).abs() < 1e-9);
        assert!((e_flux - 6.8313).abs() < 1e-3);
        assert!((e_flux - 6.84).abs() <= 0.01);
    }

    #[test]
    fn zero_flux_spectra_coincide() {
        let p = AbParams { alpha: 0.0, levels: vec![(1, 0), (2, 1), (3, -2)], ..Default::default() };
        let s = ab_spectra(&p).unwrap();
        assert_eq!(s.quantum.values(), s.quantum_free.values());
    }

    #[test]
    fn energy_decreases_with_flux_for_positive_m() {
        let energies: Vec<f64> = [0.0, 0.2, 0.4, 0.6, 0.8]
            .iter()
            .map(|&alpha| {
                let p = AbParams { alpha, levels: vec![(2, 1)], p_z: 0.5, ..Default::default() };
                ab_spectra(&p).unwrap().quantum.levels[0].value
            })
            .collect();
        assert!(energies.windows(2).all(|w| w[1] < w[0]), "{energies:?}");
    }

    #[test]
    fn classical_radial_problem_unchanged_by_flux() {
        for alpha in [0.1, 0.5, 0.93] {
            let p = AbParams { alpha, lambda_z: 0.4, p_z: 1.2, ..Default::default() };
            let c = ab_spectra(&p).unwrap().classical;
            assert!(c.identical(1e-10), "{} {}", c.matrix_difference, c.spectrum_difference);
            assert_eq!(c.with_flux.levels.len(), 256);
        }
    }

    #[test]
    fn radial_operator_is_hermitian_and_flux_sensitive_without_shift() {
        let g = RadialGrid::default();
        let m = radial_liouvillian(&g, 0.0, 0.3, 0.7, 1.3).unwrap();
        assert!((&m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-14);
        // Coupling without moving p_θ changes the operator.
        let shifted = radial_liouvillian(&g, 0.3, 0.3, 0.7, 1.3).unwrap();
        assert!((&shifted - &m).iter().map(|z| z.norm()).fold(0.0, f64::max) > 1e-2);
    }

    #[test]
    fn invalid_flux_rejected() {
        for alpha in [-0.1, 1.0, f64::NAN] {
            assert!(ab_spectra(&AbParams { alpha, ..Default::default() }).is_err());
        }
        assert!(ab_spectra(&AbParams { radius: 0.0, ..Default::default() }).is_err());
    }
}
