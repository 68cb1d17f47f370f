use super::{
    compose_with_flow, liouville_evolve, schrodinger_evolve, Axis, Hamiltonian, LiouvilleOptions, OutputGrid, Wave1D, Wave2D,
};
use crate::numerics::Grid1;
use crate::{Error, Result, C64, I};
use rayon::prelude::*;
use std::f64::consts::PI;

/// Position densities at time `τ` without and with a non-selective
/// measurement at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct NsmOutcome {
    pub grids: Vec<Grid1>,
    pub rho_free: Vec<f64>,
    pub rho_nsm: Vec<f64>,
}

impl NsmOutcome {
    pub fn max_abs_difference(&self) -> f64 {
        self.rho_free.iter().zip(&self.rho_nsm).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::InvalidParameter(format!("measurement delay {tau} must be non-negative")));
    }
    Ok(())
}

/// Classical scenario on `(q, p)`. After measuring `φ` the state is the
/// incoherent mixture of `|φ₀⟩` with weights `|ψ₀(φ₀)|²`; each eigenstate
/// stays sharp under the flow, so the mixture density is `|ψ₀|²` carried
/// along the characteristics. The unmeasured density is `|ψ(τ)|²`.
pub fn nsm_classical(h: &Hamiltonian, psi0: &Wave2D, tau: f64, opts: &LiouvilleOptions) -> Result<NsmOutcome> {
    check_tau(tau)?;
    let pure = liouville_evolve(h, psi0, tau, opts)?;
    let weights = Wave2D::new(psi0.axes, psi0.grids, psi0.density().into_iter().map(|r| C64::new(r, 0.0)).collect())?;
    let mixed_opts = LiouvilleOptions { output: OutputGrid::Explicit(pure.grids), ..*opts };
    let mixture = liouville_evolve(h, &weights, tau, &mixed_opts)?;
    Ok(NsmOutcome {
        grids: pure.grids.to_vec(),
        rho_free: pure.density(),
        rho_nsm: mixture.values.iter().map(|v| v.re).collect(),
    })
}

/// Quantum free-particle scenario on `x`. The measurement with resolution
/// `sigma` leaves a mixture of packets of that width centred on the grid
/// points, weighted by `|ψ₀|²`; each packet spreads freely, giving a
/// Gaussian of variance `σ²/2 (1 + ħ²τ²/m²σ⁴)`.
pub fn nsm_quantum(psi0: &Wave1D, mass: f64, hbar: f64, tau: f64, sigma: f64) -> Result<NsmOutcome> {
    check_tau(tau)?;
    if !(sigma > 0.0) {
        return Err(Error::InvalidParameter(format!("measurement resolution {sigma}")));
    }
    let pure = schrodinger_evolve(&Hamiltonian::Free { mass }, psi0, tau, hbar, &Default::default())?;
    let g = psi0.grid;
    let var = 0.5 * sigma * sigma * (1.0 + (hbar * tau / (mass * sigma * sigma)).powi(2));
    let norm = 1.0 / (2.0 * PI * var).sqrt();
    let weights: Vec<(f64, f64)> = psi0.values.iter().enumerate().map(|(j, v)| (g.at(j), v.norm_sqr() * g.step)).collect();
    let rho_nsm = g
        .points()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&x| weights.iter().map(|(x0, w)| w * norm * (-(x - x0).powi(2) / (2.0 * var)).exp()).sum())
        .collect();
    Ok(NsmOutcome { grids: vec![g], rho_free: pure.density(), rho_nsm })
}

/// Standard deviation over mean of `values` at grid points inside
/// `[lo, hi]`.
pub fn coefficient_of_variation(values: &[f64], grid: &Grid1, lo: f64, hi: f64) -> f64 {
    let inside: Vec<f64> = values.iter().enumerate().filter(|(i, _)| (lo..=hi).contains(&grid.at(*i))).map(|(_, v)| *v).collect();
    let n = inside.len() as f64;
    let mean = inside.iter().sum::<f64>() / n;
    let var = inside.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    var.sqrt() / mean
}

/// Expectation series of an observable for a wave with and without its
/// phase.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseBlindness {
    pub times: Vec<f64>,
    pub with_phase: Vec<f64>,
    pub without_phase: Vec<f64>,
}

impl PhaseBlindness {
    pub fn max_deviation(&self) -> f64 {
        self.with_phase.iter().zip(&self.without_phase).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// Evolves `F e^{iG}` and `F` by composition with the flow and compares
/// `⟨O⟩(t)` for a multiplicative observable `O(q, p)`.
pub fn phase_blindness_check(
    h: &Hamiltonian,
    modulus: impl Fn(f64, f64) -> f64 + Sync,
    phase: impl Fn(f64, f64) -> f64 + Sync,
    observable: impl Fn(f64, f64) -> f64,
    times: &[f64],
    grids: [Grid1; 2],
) -> PhaseBlindness {
    const STEPS: usize = 200;
    let expectation = |w: &Wave2D| {
        let n1 = w.row_len();
        let field: Vec<f64> =
            w.values.iter().enumerate().map(|(k, v)| v.norm_sqr() * observable(grids[0].at(k / n1), grids[1].at(k % n1))).collect();
        w.integrate(&field)
    };
    let mut with_phase = Vec::new();
    let mut without_phase = Vec::new();
    for &t in times {
        let a = compose_with_flow(h, |q, p| (I * phase(q, p)).exp() * modulus(q, p), t, grids, STEPS);
        let b = compose_with_flow(h, |q, p| C64::new(modulus(q, p), 0.0), t, grids, STEPS);
        with_phase.push(expectation(&a));
        without_phase.push(expectation(&b));
    }
    PhaseBlindness { times: times.to_vec(), with_phase, without_phase }
}

/// Evolves `F`, `G` and `F e^{iG}` separately on the grid and returns the
/// largest `|F(t) e^{iG(t)} − (F e^{iG})(t)|`, relative to `max |F|`.
pub fn split_evolution_check(
    h: &Hamiltonian,
    modulus: impl Fn(f64, f64) -> f64,
    phase: impl Fn(f64, f64) -> f64,
    t: f64,
    grids: [Grid1; 2],
) -> Result<f64> {
    let f = Wave2D::from_fn([Axis::Q, Axis::P], grids, |q, p| C64::new(modulus(q, p), 0.0));
    let g = Wave2D::from_fn([Axis::Q, Axis::P], grids, |q, p| C64::new(phase(q, p), 0.0));
    let full = Wave2D::from_fn([Axis::Q, Axis::P], grids, |q, p| (I * phase(q, p)).exp() * modulus(q, p));
    let opts = LiouvilleOptions { output: OutputGrid::Same, ..Default::default() };
    let (ft, gt, fullt) = (liouville_evolve(h, &f, t, &opts)?, liouville_evolve(h, &g, t, &opts)?, liouville_evolve(h, &full, t, &opts)?);
    let peak = f.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let worst = (0..fullt.values.len())
        .map(|k| (ft.values[k] * (I * gt.values[k].re).exp() - fullt.values[k]).norm())
        .fold(0.0, f64::max);
    Ok(worst / peak)
}
