use super::{liouville_evolve, Axis, Boundary, Hamiltonian, LiouvilleOptions, OutputGrid, Wave2D};
use crate::numerics::{adaptive_gauss_legendre, GaussLegendre, Grid1};
use crate::{Error, Result, C64, I};
use rayon::prelude::*;
use std::f64::consts::PI;

/// Two-slit geometry. The beam moves along `y` with fixed momentum
/// `p_y0`; slits of half-width `delta` sit at `±x_a` on the plate `y_f`,
/// the screen at `y_s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlitConfig {
    pub x_a: f64,
    pub delta: f64,
    pub y_f: f64,
    pub y_s: f64,
    pub p_y0: f64,
    pub a: f64,
    pub b: f64,
    pub m: f64,
    pub hbar: f64,
}

impl SlitConfig {
    pub fn validate(&self) -> Result<()> {
        let all_positive = [self.x_a, self.delta, self.y_f, self.y_s, self.p_y0, self.a, self.b, self.m, self.hbar]
            .iter()
            .all(|v| *v > 0.0 && v.is_finite());
        if !all_positive {
            return Err(Error::InvalidParameter("slit parameters must be positive and finite".into()));
        }
        if self.delta >= self.x_a {
            return Err(Error::InvalidParameter(format!("slits overlap: delta {} >= x_a {}", self.delta, self.x_a)));
        }
        if self.y_f >= self.y_s {
            return Err(Error::InvalidParameter(format!("plate y_f {} not before screen y_s {}", self.y_f, self.y_s)));
        }
        Ok(())
    }

    /// Time at the slit plate.
    pub fn t_f(&self) -> f64 {
        self.y_f * self.m / self.p_y0
    }

    /// Time at the screen.
    pub fn t_s(&self) -> f64 {
        self.y_s * self.m / self.p_y0
    }

    fn centres(&self, open: SlitOpen) -> Vec<f64> {
        match open {
            SlitOpen::Both => vec![self.x_a, -self.x_a],
            SlitOpen::First => vec![self.x_a],
            SlitOpen::Second => vec![-self.x_a],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlitMode {
    Classical,
    Quantum,
    Simplified,
}

/// Which slits are open; `First` is the one at `+x_a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlitOpen {
    Both,
    First,
    Second,
}

/// Screen profile `P(x)` sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SlitProfile {
    pub grid: Grid1,
    pub values: Vec<f64>,
}

impl SlitProfile {
    pub fn integral(&self) -> f64 {
        let g = &self.grid;
        self.values.iter().enumerate().map(|(i, v)| if i == 0 || i + 1 == g.count { 0.5 * v } else { *v }).sum::<f64>() * g.step
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }

    pub fn normalized(mut self) -> Result<Self> {
        let total = self.integral();
        if !(total > 0.0) {
            return Err(Error::Numerical("profile has zero weight on the grid".into()));
        }
        self.values.iter_mut().for_each(|v| *v /= total);
        Ok(self)
    }
}

const REL_TOL: f64 = 1e-8;
const SLIT_NODES: usize = 64;

/// Initial classical wave with optional phase `G(x, p)`.
fn classical_initial(cfg: &SlitConfig, x: f64, p: f64, phase: Option<&(dyn Fn(f64, f64) -> f64 + Sync)>) -> C64 {
    let amp = (-x * x / (2.0 * cfg.a * cfg.a) - p * p / (2.0 * cfg.b * cfg.b)).exp() / (PI * cfg.a * cfg.b).sqrt();
    match phase {
        Some(g) => (I * g(x, p)).exp() * amp,
        None => C64::new(amp, 0.0),
    }
}

/// Unnormalized screen profile. The classical mode integrates `|ψ|²` over
/// the momentum intervals that pass each open slit; the quantum modes add
/// per-slit amplitudes before squaring.
pub fn two_slit_raw(
    cfg: &SlitConfig,
    mode: SlitMode,
    open: SlitOpen,
    grid: Grid1,
    phase: Option<&(dyn Fn(f64, f64) -> f64 + Sync)>,
) -> Result<SlitProfile> {
    cfg.validate()?;
    let rule = GaussLegendre::new(SLIT_NODES)?;
    let centres = cfg.centres(open);
    let (t_f, t_s) = (cfg.t_f(), cfg.t_s());
    let gap = t_s - t_f;
    let values: Result<Vec<f64>> = grid
        .points()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&x| match mode {
            SlitMode::Classical => {
                let lever = gap / cfg.m;
                let mut total = 0.0;
                for &c in &centres {
                    let (lo, hi) = ((x - c - cfg.delta) / lever, (x - c + cfg.delta) / lever);
                    total += adaptive_gauss_legendre(&rule, lo, hi, REL_TOL, |p| {
                        classical_initial(cfg, x - p * t_s / cfg.m, p, phase).norm_sqr()
                    })?;
                }
                Ok(total)
            }
            SlitMode::Quantum | SlitMode::Simplified => {
                let mut amp = C64::new(0.0, 0.0);
                for &c in &centres {
                    amp += adaptive_gauss_legendre(&rule, c - cfg.delta, c + cfg.delta, REL_TOL, |xf| {
                        let free = I * cfg.m * (x - xf).powi(2) / (2.0 * cfg.hbar * gap);
                        let source = if mode == SlitMode::Quantum {
                            -cfg.m * xf * xf / (2.0 * (cfg.m * cfg.a * cfg.a + I * cfg.hbar * t_f))
                        } else {
                            C64::new(0.0, 0.0)
                        };
                        (free + source).exp()
                    })?;
                }
                Ok(amp.norm_sqr())
            }
        })
        .collect();
    Ok(SlitProfile { grid, values: values? })
}

/// Screen profile normalized to unit integral on `grid`.
pub fn two_slit(cfg: &SlitConfig, mode: SlitMode, grid: Grid1) -> Result<SlitProfile> {
    two_slit_raw(cfg, mode, SlitOpen::Both, grid, None)?.normalized()
}

/// Classical profile by grid evolution: free Liouville flow to the plate,
/// index masks for the slits, renormalization, free flow to the screen and
/// the momentum marginal.
pub fn classical_two_slit_grid(cfg: &SlitConfig, grids: [Grid1; 2]) -> Result<SlitProfile> {
    cfg.validate()?;
    let h = Hamiltonian::Free { mass: cfg.m };
    let psi0 = Wave2D::from_fn([Axis::Q, Axis::P], grids, |x, p| classical_initial(cfg, x, p, None));
    let opts = LiouvilleOptions { output: OutputGrid::Same, boundary: Boundary::Zero, ..Default::default() };
    let mut at_plate = liouville_evolve(&h, &psi0, cfg.t_f(), &opts)?;
    let n1 = at_plate.row_len();
    // Half-open cells [c − δ, c + δ) so the mask spans 2δ/Δx nodes.
    let eps = 1e-9 * grids[0].step;
    let inside = |x: f64, c: f64| x - (c - cfg.delta) > -eps && x - (c + cfg.delta) < -eps;
    for (i, row) in at_plate.values.chunks_mut(n1).enumerate() {
        let x = grids[0].at(i);
        if !inside(x, cfg.x_a) && !inside(x, -cfg.x_a) {
            row.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        }
    }
    let norm = at_plate.norm_sq().sqrt();
    at_plate.values.iter_mut().for_each(|v| *v /= norm);
    let at_screen = liouville_evolve(&h, &at_plate, cfg.t_s() - cfg.t_f(), &opts)?;
    SlitProfile { grid: grids[0], values: at_screen.marginal0() }.normalized()
}

/// Number of strict interior local minima whose prominence exceeds
/// `floor · max(P)`. Prominence is the smaller of the highest values
/// reached on each side before the profile drops below the minimum.
pub fn count_minima(values: &[f64], floor: f64) -> Result<usize> {
    if values.len() < 3 {
        return Err(Error::InvalidParameter(format!("profile of {} samples", values.len())));
    }
    let threshold = floor * values.iter().cloned().fold(0.0, f64::max);
    let mut count = 0;
    for i in 1..values.len() - 1 {
        let v = values[i];
        if !(v < values[i - 1] && v < values[i + 1]) {
            continue;
        }
        let left = values[..i].iter().rev().take_while(|&&w| w >= v).cloned().fold(v, f64::max);
        let right = values[i + 1..].iter().take_while(|&&w| w >= v).cloned().fold(v, f64::max);
        if left.min(right) - v > threshold {
            count += 1;
        }
    }
    Ok(count)
}
