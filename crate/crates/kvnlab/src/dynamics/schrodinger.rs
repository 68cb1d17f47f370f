use super::{Axis, Hamiltonian, Wave1D};
use crate::numerics::Grid1;
use crate::{Error, Result, C64, I};
use rustfft::FftPlanner;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchrodingerOptions {
    /// Upper bound on the phase accumulated per step at the grid-edge
    /// momentum (and from the largest potential value).
    pub max_phase_per_step: f64,
    /// Largest fraction of spectral weight allowed in the outer fifth of
    /// the momentum band.
    pub nyquist_tol: f64,
}

impl Default for SchrodingerOptions {
    fn default() -> Self {
        Self { max_phase_per_step: 0.1, nyquist_tol: 1e-10 }
    }
}

/// Normalized Gaussian `(πa²)^{-1/4} exp(−x²/2a² + i p_i x/ħ)`.
pub fn free_gaussian(grid: Grid1, a: f64, p_i: f64, hbar: f64) -> Wave1D {
    let norm = (PI * a * a).powf(-0.25);
    Wave1D::from_fn(Axis::X, grid, |x| (I * p_i * x / hbar - x * x / (2.0 * a * a)).exp() * norm)
}

fn wavenumbers(grid: &Grid1) -> Vec<f64> {
    let n = grid.count;
    let dk = 2.0 * PI / (n as f64 * grid.step);
    (0..n).map(|j| if j < n.div_ceil(2) { j as f64 * dk } else { (j as f64 - n as f64) * dk }).collect()
}

fn nyquist_check(spectrum: &[C64], k: &[f64], tol: f64) -> Result<()> {
    let k_max = k.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let total: f64 = spectrum.iter().map(|v| v.norm_sqr()).sum();
    let edge: f64 = spectrum.iter().zip(k).filter(|(_, kk)| kk.abs() > 0.8 * k_max).map(|(v, _)| v.norm_sqr()).sum();
    if total > 0.0 && edge > tol * total {
        return Err(Error::Numerical(format!(
            "grid too coarse: {:.3e} of the spectral weight sits near the Nyquist momentum",
            edge / total
        )));
    }
    Ok(())
}

/// Split-step Fourier propagation of `iħ∂_tψ = [p²/2m + V(x)]ψ` on the
/// periodic box spanned by the grid.
pub fn schrodinger_evolve(h: &Hamiltonian, psi0: &Wave1D, t: f64, hbar: f64, opts: &SchrodingerOptions) -> Result<Wave1D> {
    if psi0.axis != Axis::X {
        return Err(Error::Unsupported(format!("Schrödinger evolution on axis {:?}", psi0.axis)));
    }
    if !(hbar > 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("hbar {hbar}, t {t}")));
    }
    let n = psi0.grid.count;
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let k = wavenumbers(&psi0.grid);
    let mut psi = psi0.values.clone();
    let mut spectrum = psi.clone();
    fwd.process(&mut spectrum);
    nyquist_check(&spectrum, &k, opts.nyquist_tol)?;
    if t == 0.0 {
        return Ok(psi0.clone());
    }
    let m = h.mass();
    let k_max = k.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let v: Vec<f64> = psi0.grid.points().map(|x| h.potential(x)).collect();
    let v_max = v.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    let free = h.is_free();
    // Without a potential the kinetic factor is exact, so one step suffices.
    let steps = if free {
        1
    } else {
        let rate = (hbar * k_max * k_max / (2.0 * m)).max(v_max / hbar);
        ((t.abs() * rate / opts.max_phase_per_step).ceil() as usize).max(1)
    };
    let dt = t / steps as f64;
    let half_kick: Vec<C64> = v.iter().map(|x| (-I * x * dt / (2.0 * hbar)).exp()).collect();
    let drift: Vec<C64> = k.iter().map(|kk| (-I * hbar * kk * kk * dt / (2.0 * m)).exp() / n as f64).collect();
    for _ in 0..steps {
        if !free {
            psi.iter_mut().zip(&half_kick).for_each(|(a, b)| *a *= b);
        }
        fwd.process(&mut psi);
        psi.iter_mut().zip(&drift).for_each(|(a, b)| *a *= b);
        inv.process(&mut psi);
        if !free {
            psi.iter_mut().zip(&half_kick).for_each(|(a, b)| *a *= b);
        }
    }
    let mut spectrum = psi.clone();
    fwd.process(&mut spectrum);
    nyquist_check(&spectrum, &k, opts.nyquist_tol)?;
    Wave1D::new(Axis::X, psi0.grid, psi)
}
