use super::{Axis, Hamiltonian, Wave2D};
use crate::numerics::Grid1;
use crate::{Error, Result, C64};
use rayon::prelude::*;

/// What to do when a backward characteristic leaves the source grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Zero,
    Abort,
}

/// Grid on which the evolved wave is sampled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OutputGrid {
    Same,
    /// Bounding box of the forward image of the initial support, with the
    /// input point counts.
    Auto,
    Explicit([Grid1; 2]),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiouvilleOptions {
    pub steps_per_unit_time: usize,
    pub boundary: Boundary,
    pub output: OutputGrid,
}

impl Default for LiouvilleOptions {
    fn default() -> Self {
        Self { steps_per_unit_time: 100, boundary: Boundary::Zero, output: OutputGrid::Auto }
    }
}

/// Hamiltonian flow of `(q, p)` over time `t` (RK4, either direction).
pub fn flow(h: &Hamiltonian, q: f64, p: f64, t: f64, steps_per_unit_time: usize) -> (f64, f64) {
    if t == 0.0 {
        return (q, p);
    }
    let steps = ((t.abs() * steps_per_unit_time as f64).ceil() as usize).max(1);
    let dt = t / steps as f64;
    let (mut q, mut p) = (q, p);
    for _ in 0..steps {
        let k1 = h.velocity(q, p);
        let k2 = h.velocity(q + 0.5 * dt * k1.0, p + 0.5 * dt * k1.1);
        let k3 = h.velocity(q + 0.5 * dt * k2.0, p + 0.5 * dt * k2.1);
        let k4 = h.velocity(q + dt * k3.0, p + dt * k3.1);
        q += dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        p += dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
    }
    (q, p)
}

const SUPPORT_FLOOR: f64 = 1e-14;

fn auto_grids(h: &Hamiltonian, psi0: &Wave2D, t: f64, steps: usize) -> Result<[Grid1; 2]> {
    let rho = psi0.density();
    let peak = rho.iter().cloned().fold(0.0, f64::max);
    if peak == 0.0 {
        return Ok(psi0.grids);
    }
    let n1 = psi0.row_len();
    let bounds = rho
        .par_iter()
        .enumerate()
        .filter(|(_, &r)| r > SUPPORT_FLOOR * peak)
        .map(|(k, _)| {
            let (q, p) = flow(h, psi0.grids[0].at(k / n1), psi0.grids[1].at(k % n1), t, steps);
            [q, q, p, p]
        })
        .reduce(
            || [f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY],
            |a, b| [a[0].min(b[0]), a[1].max(b[1]), a[2].min(b[2]), a[3].max(b[3])],
        );
    let pad = |lo: f64, hi: f64, step: f64| {
        let m = 0.02 * (hi - lo) + 2.0 * step;
        (lo - m, hi + m)
    };
    let (q0, q1) = pad(bounds[0], bounds[1], psi0.grids[0].step);
    let (p0, p1) = pad(bounds[2], bounds[3], psi0.grids[1].step);
    Ok([Grid1::span(q0, q1, psi0.grids[0].count)?, Grid1::span(p0, p1, psi0.grids[1].count)?])
}

/// Classical KvN evolution by composition with the backward flow,
/// `ψ(φ, t) = ψ₀(φ̄(φ, t))`, sampled by bicubic interpolation of `ψ₀`
/// (semi-Lagrangian).
pub fn liouville_evolve(h: &Hamiltonian, psi0: &Wave2D, t: f64, opts: &LiouvilleOptions) -> Result<Wave2D> {
    if psi0.axes != [Axis::Q, Axis::P] {
        return Err(Error::Unsupported(format!("Liouville evolution on axes {:?}", psi0.axes)));
    }
    if !t.is_finite() {
        return Err(Error::InvalidParameter(format!("duration {t}")));
    }
    let steps = opts.steps_per_unit_time.max(1);
    let grids = match opts.output {
        OutputGrid::Same => psi0.grids,
        OutputGrid::Auto => auto_grids(h, psi0, t, steps)?,
        OutputGrid::Explicit(g) => g,
    };
    let n1 = grids[1].count;
    let mut values = vec![C64::new(0.0, 0.0); grids[0].count * n1];
    values.par_chunks_mut(n1).enumerate().try_for_each(|(i, row)| {
        let q = grids[0].at(i);
        for (j, v) in row.iter_mut().enumerate() {
            let p = grids[1].at(j);
            let (qb, pb) = flow(h, q, p, -t, steps);
            *v = match psi0.interpolate(qb, pb) {
                Some(z) => z,
                None if opts.boundary == Boundary::Zero => C64::new(0.0, 0.0),
                None => return Err(Error::OutOfGrid(qb, pb)),
            };
        }
        Ok(())
    })?;
    Wave2D::new([Axis::Q, Axis::P], grids, values)
}

/// Exact functional composition `ψ(φ, t) = ψ₀(φ̄(φ, t))` for an analytic
/// initial wave.
pub fn compose_with_flow(
    h: &Hamiltonian,
    psi0: impl Fn(f64, f64) -> C64 + Sync,
    t: f64,
    grids: [Grid1; 2],
    steps_per_unit_time: usize,
) -> Wave2D {
    let n1 = grids[1].count;
    let mut values = vec![C64::new(0.0, 0.0); grids[0].count * n1];
    values.par_chunks_mut(n1).enumerate().for_each(|(i, row)| {
        for (j, v) in row.iter_mut().enumerate() {
            let (qb, pb) = flow(h, grids[0].at(i), grids[1].at(j), -t, steps_per_unit_time);
            *v = psi0(qb, pb);
        }
    });
    Wave2D { axes: [Axis::Q, Axis::P], grids, values }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::moments;
    use crate::I;

    fn grids(n: usize, p_center: f64) -> [Grid1; 2] {
        [Grid1::centered(0.0, 16.0 / n as f64, n).unwrap(), Grid1::centered(p_center, 16.0 / n as f64, n).unwrap()]
    }

    #[test]
    fn zero_time_is_identity() {
        let psi = Wave2D::double_gaussian(grids(64, 0.0), 1.0, 1.0, 0.5);
        let opts = LiouvilleOptions { output: OutputGrid::Same, ..Default::default() };
        let out = liouville_evolve(&Hamiltonian::Free { mass: 1.0 }, &psi, 0.0, &opts).unwrap();
        assert_eq!(out, psi);
    }

    #[test]
    fn free_flow_matches_shear() {
        let h = Hamiltonian::Free { mass: 2.0 };
        let psi = Wave2D::double_gaussian(grids(256, 1.0), 1.0, 1.0, 1.0);
        let out = liouville_evolve(&h, &psi, 1.5, &LiouvilleOptions::default()).unwrap();
        let norm = 1.0 / std::f64::consts::PI.sqrt();
        let exact = |q: f64, p: f64| norm * (-(q - 0.75 * p).powi(2) / 2.0 - (p - 1.0).powi(2) / 2.0).exp();
        let err = (0..out.grids[0].count)
            .flat_map(|i| (0..out.grids[1].count).map(move |j| (i, j)))
            .map(|(i, j)| (out.get(i, j).re - exact(out.grids[0].at(i), out.grids[1].at(j))).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-5, "{err}");
        assert!((out.norm_sq() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn harmonic_period_returns_state() {
        let h = Hamiltonian::Harmonic { mass: 1.0, omega: 1.0 };
        let g = [Grid1::centered(0.0, 0.05, 200).unwrap(), Grid1::centered(0.0, 0.05, 200).unwrap()];
        let psi = Wave2D::from_fn([Axis::Q, Axis::P], g, |q, p| {
            ((-(q - 1.0).powi(2) - p * p) / 1.0).exp() * (I * q * p).exp() * (2.0 / std::f64::consts::PI).sqrt()
        });
        let opts = LiouvilleOptions { output: OutputGrid::Same, steps_per_unit_time: 200, ..Default::default() };
        let quarter = liouville_evolve(&h, &psi, std::f64::consts::FRAC_PI_2, &opts).unwrap();
        // A quarter turn maps (q, p) → (p, −q) backwards, so the bump moves to p = −1.
        let m = moments(&quarter).unwrap();
        assert!(m.q_mean.abs() < 1e-5 && (m.p_mean + 1.0).abs() < 1e-5);
        let exact = compose_with_flow(&h, |q, p| psi.interpolate(q, p).unwrap_or_default(), std::f64::consts::FRAC_PI_2, g, 200);
        let err = quarter.values.iter().zip(&exact.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12);
    }

    #[test]
    fn abort_on_escape() {
        let psi = Wave2D::double_gaussian(grids(32, 0.0), 1.0, 1.0, 0.0);
        let opts = LiouvilleOptions { output: OutputGrid::Same, boundary: Boundary::Abort, ..Default::default() };
        let r = liouville_evolve(&Hamiltonian::Free { mass: 1.0 }, &psi, 1.0, &opts);
        assert!(matches!(r, Err(Error::OutOfGrid(..))));
    }
}
