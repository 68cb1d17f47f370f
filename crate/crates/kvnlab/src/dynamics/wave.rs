use crate::numerics::Grid1;
use crate::{Error, Result, C64, I};
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// Coordinate carried by a grid axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Q,
    P,
    LambdaP,
    X,
}

/// Complex wave on a 2-D product grid, row-major: `values[i * n1 + j]` sits
/// at `(grids[0].at(i), grids[1].at(j))`.
#[derive(Debug, Clone, PartialEq)]
pub struct Wave2D {
    pub axes: [Axis; 2],
    pub grids: [Grid1; 2],
    pub values: Vec<C64>,
}

/// Complex wave on a 1-D grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Wave1D {
    pub axis: Axis,
    pub grid: Grid1,
    pub values: Vec<C64>,
}

/// Trapezoid weight of node `i`.
fn trapezoid(grid: &Grid1, i: usize) -> f64 {
    if i == 0 || i + 1 == grid.count {
        0.5 * grid.step
    } else {
        grid.step
    }
}

impl Wave2D {
    pub fn new(axes: [Axis; 2], grids: [Grid1; 2], values: Vec<C64>) -> Result<Self> {
        if values.len() != grids[0].count * grids[1].count {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a {}x{} grid",
                values.len(),
                grids[0].count,
                grids[1].count
            )));
        }
        Ok(Self { axes, grids, values })
    }

    pub fn from_fn(axes: [Axis; 2], grids: [Grid1; 2], f: impl Fn(f64, f64) -> C64) -> Self {
        let values = grids[0].points().flat_map(|a| grids[1].points().map(move |b| (a, b))).map(|(a, b)| f(a, b)).collect();
        Self { axes, grids, values }
    }

    /// KvN double Gaussian `(πab)^{-1/2} exp(−q²/2a² − (p−p_i)²/2b²)`.
    pub fn double_gaussian(grids: [Grid1; 2], a: f64, b: f64, p_i: f64) -> Self {
        let norm = 1.0 / (PI * a * b).sqrt();
        Self::from_fn([Axis::Q, Axis::P], grids, |q, p| {
            C64::new(norm * (-q * q / (2.0 * a * a) - (p - p_i).powi(2) / (2.0 * b * b)).exp(), 0.0)
        })
    }

    pub fn row_len(&self) -> usize {
        self.grids[1].count
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.values[i * self.row_len() + j]
    }

    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    /// Trapezoid integral of a real field sampled on this grid.
    pub fn integrate(&self, field: &[f64]) -> f64 {
        let n1 = self.row_len();
        field
            .iter()
            .enumerate()
            .map(|(k, v)| v * trapezoid(&self.grids[0], k / n1) * trapezoid(&self.grids[1], k % n1))
            .sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.integrate(&self.density())
    }

    /// Cubic-Lagrange (bicubic) value at an arbitrary point, `None` outside
    /// the grid.
    pub fn interpolate(&self, a: f64, b: f64) -> Option<C64> {
        let (i0, wa) = self.grids[0].cubic_stencil(a)?;
        let (j0, wb) = self.grids[1].cubic_stencil(b)?;
        let n1 = self.row_len();
        let mut acc = C64::new(0.0, 0.0);
        for (di, wi) in wa.iter().enumerate() {
            let row = (i0 + di) * n1 + j0;
            let mut r = C64::new(0.0, 0.0);
            for (dj, wj) in wb.iter().enumerate() {
                r += self.values[row + dj] * wj;
            }
            acc += r * wi;
        }
        Some(acc)
    }

    /// Marginal `∫|ψ|² d(axis 1)` as a function of axis 0.
    pub fn marginal0(&self) -> Vec<f64> {
        let n1 = self.row_len();
        (0..self.grids[0].count)
            .map(|i| (0..n1).map(|j| self.values[i * n1 + j].norm_sqr() * trapezoid(&self.grids[1], j)).sum())
            .collect()
    }
}

impl Wave1D {
    pub fn new(axis: Axis, grid: Grid1, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.count {
            return Err(Error::DimensionMismatch(format!("{} values for {} grid points", values.len(), grid.count)));
        }
        Ok(Self { axis, grid, values })
    }

    pub fn from_fn(axis: Axis, grid: Grid1, f: impl Fn(f64) -> C64) -> Self {
        Self { axis, grid, values: grid.points().map(f).collect() }
    }

    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    pub fn norm_sq(&self) -> f64 {
        self.values.iter().enumerate().map(|(i, v)| v.norm_sqr() * trapezoid(&self.grid, i)).sum()
    }
}

/// Means and variances of position and momentum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub q_mean: f64,
    pub p_mean: f64,
    pub q_var: f64,
    pub p_var: f64,
}

const NORM_TOL: f64 = 1e-6;

fn check_norm(norm: f64) -> Result<()> {
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::InvalidParameter(format!("state not normalized (norm {norm})")));
    }
    Ok(())
}

/// Spectral derivative along a row that vanishes at both edges.
fn derivative(row: &[C64], h: f64) -> Vec<C64> {
    let n = row.len();
    let mut planner = FftPlanner::<f64>::new();
    let mut buf = row.to_vec();
    planner.plan_fft_forward(n).process(&mut buf);
    let dk = 2.0 * PI / (n as f64 * h);
    for (j, v) in buf.iter_mut().enumerate() {
        let k = if 2 * j < n { j as f64 } else if 2 * j == n { 0.0 } else { j as f64 - n as f64 };
        *v *= I * k * dk / n as f64;
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    buf
}

/// Moments of a normalized phase-space wave. On `(q, p)` both come from
/// `|ψ|²`; on `(q, λ_p)` momentum is `p̂ = i∂/∂λ_p`.
pub fn moments(psi: &Wave2D) -> Result<Moments> {
    check_norm(psi.norm_sq())?;
    let rho = psi.density();
    let n1 = psi.row_len();
    let coord = |axis: usize, k: usize| if axis == 0 { psi.grids[0].at(k / n1) } else { psi.grids[1].at(k % n1) };
    let weighted = |f: &dyn Fn(usize) -> f64| psi.integrate(&(0..rho.len()).map(|k| rho[k] * f(k)).collect::<Vec<_>>());
    let q_mean = weighted(&|k| coord(0, k));
    let q_var = weighted(&|k| (coord(0, k) - q_mean).powi(2));
    match psi.axes {
        [Axis::Q, Axis::P] => {
            let p_mean = weighted(&|k| coord(1, k));
            let p_var = weighted(&|k| (coord(1, k) - p_mean).powi(2));
            Ok(Moments { q_mean, p_mean, q_var, p_var })
        }
        [Axis::Q, Axis::LambdaP] => {
            let h = psi.grids[1].step;
            let mut first = vec![0.0; rho.len()];
            let mut second = vec![0.0; rho.len()];
            for (i, row) in psi.values.chunks(n1).enumerate() {
                let d = derivative(row, h);
                for j in 0..n1 {
                    first[i * n1 + j] = (row[j].conj() * I * d[j]).re;
                    second[i * n1 + j] = d[j].norm_sqr();
                }
            }
            let p_mean = psi.integrate(&first);
            let p_var = psi.integrate(&second) - p_mean * p_mean;
            Ok(Moments { q_mean, p_mean, q_var, p_var })
        }
        axes => Err(Error::Unsupported(format!("moments on axes {axes:?}"))),
    }
}

/// Position and momentum moments of a configuration-space wave
/// (`p̂ = −iħ∂_x`).
pub fn moments_1d(psi: &Wave1D, hbar: f64) -> Result<Moments> {
    check_norm(psi.norm_sq())?;
    let g = &psi.grid;
    let w = |i: usize| trapezoid(g, i);
    let rho = psi.density();
    let q_mean: f64 = (0..g.count).map(|i| rho[i] * g.at(i) * w(i)).sum();
    let q_var: f64 = (0..g.count).map(|i| rho[i] * (g.at(i) - q_mean).powi(2) * w(i)).sum();
    let d = derivative(&psi.values, g.step);
    let p_mean: f64 = (0..g.count).map(|i| (psi.values[i].conj() * (-I * hbar) * d[i]).re * w(i)).sum();
    let p_sq: f64 = (0..g.count).map(|i| hbar * hbar * d[i].norm_sqr() * w(i)).sum();
    Ok(Moments { q_mean, p_mean, q_var, p_var: p_sq - p_mean * p_mean })
}

/// `e^{±2πi j c/N}` with `c = N/2`, shifting the transform so that
/// `λ = 0` sits at index `c`.
fn centre_twiddle(n: usize, sign: f64) -> Vec<C64> {
    let c = (n / 2) as f64;
    (0..n).map(|j| (I * sign * 2.0 * PI * j as f64 * c / n as f64).exp()).collect()
}

/// Partial Fourier transform `ψ(q, λ_p) = (2π)^{-1/2} ∫dp e^{−ipλ_p} ψ(q, p)`.
/// The `λ_p` grid has `N` points, spacing `2π/(N Δp)`, centred at index `N/2`.
pub fn to_mixed_representation(psi: &Wave2D) -> Result<Wave2D> {
    if psi.axes != [Axis::Q, Axis::P] {
        return Err(Error::Unsupported(format!("mixed representation from axes {:?}", psi.axes)));
    }
    let pg = psi.grids[1];
    let n = pg.count;
    let dl = 2.0 * PI / (n as f64 * pg.step);
    let lg = Grid1::centered(0.0, dl, n)?;
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n);
    let pre = pg.step / (2.0 * PI).sqrt();
    let phase: Vec<C64> = lg.points().map(|l| (-I * pg.min * l).exp() * pre).collect();
    let mut values = psi.values.clone();
    let twiddle = centre_twiddle(n, 1.0);
    for row in values.chunks_mut(n) {
        for (v, t) in row.iter_mut().zip(&twiddle) {
            *v *= t;
        }
        fft.process(row);
        for (v, ph) in row.iter_mut().zip(&phase) {
            *v *= ph;
        }
    }
    Wave2D::new([Axis::Q, Axis::LambdaP], [psi.grids[0], lg], values)
}

/// Inverse of [`to_mixed_representation`]; `p_min` fixes the origin of the
/// recovered momentum grid.
pub fn from_mixed_representation(psi: &Wave2D, p_min: f64) -> Result<Wave2D> {
    if psi.axes != [Axis::Q, Axis::LambdaP] {
        return Err(Error::Unsupported(format!("inverse mixed representation from axes {:?}", psi.axes)));
    }
    let lg = psi.grids[1];
    let n = lg.count;
    let pg = Grid1 { min: p_min, step: 2.0 * PI / (n as f64 * lg.step), count: n };
    let fft = FftPlanner::<f64>::new().plan_fft_inverse(n);
    let pre = lg.step / (2.0 * PI).sqrt();
    let phase: Vec<C64> = lg.points().map(|l| (I * p_min * l).exp() * pre).collect();
    let twiddle = centre_twiddle(n, -1.0);
    let mut values = psi.values.clone();
    for row in values.chunks_mut(n) {
        for (v, ph) in row.iter_mut().zip(&phase) {
            *v *= ph;
        }
        fft.process(row);
        for (v, t) in row.iter_mut().zip(&twiddle) {
            *v *= t;
        }
    }
    Wave2D::new([Axis::Q, Axis::P], [psi.grids[0], pg], values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grids(n: usize) -> [Grid1; 2] {
        [Grid1::centered(0.0, 16.0 / n as f64, n).unwrap(), Grid1::centered(2.0, 16.0 / n as f64, n).unwrap()]
    }

    #[test]
    fn double_gaussian_moments() {
        let psi = Wave2D::double_gaussian(grids(256), 1.0, 0.8, 2.0);
        let m = moments(&psi).unwrap();
        assert!(m.q_mean.abs() < 1e-12);
        assert!((m.p_mean - 2.0).abs() < 1e-12);
        assert!((m.q_var - 0.5).abs() < 1e-10);
        assert!((m.p_var - 0.32).abs() < 1e-10);
    }

    #[test]
    fn unnormalized_input_rejected() {
        let mut psi = Wave2D::double_gaussian(grids(64), 1.0, 1.0, 0.0);
        psi.values.iter_mut().for_each(|v| *v *= 2.0);
        assert!(moments(&psi).is_err());
    }

    #[test]
    fn mixed_representation_matches_closed_form() {
        let (a, b, p_i) = (1.0, 0.8, 2.0);
        let psi = Wave2D::double_gaussian(grids(256), a, b, p_i);
        let mixed = to_mixed_representation(&psi).unwrap();
        let pre = (b / (PI * a)).sqrt();
        let mut worst: f64 = 0.0;
        for i in 0..mixed.grids[0].count {
            for j in 0..mixed.grids[1].count {
                let (q, l) = (mixed.grids[0].at(i), mixed.grids[1].at(j));
                let exact = (-I * p_i * l - q * q / (2.0 * a * a) - l * l * b * b / 2.0).exp() * pre;
                worst = worst.max((mixed.get(i, j) - exact).norm());
            }
        }
        assert!(worst < 1e-10, "{worst}");
        let back = from_mixed_representation(&mixed, psi.grids[1].min).unwrap();
        let err = back.values.iter().zip(&psi.values).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(err < 1e-10);
        assert!((back.grids[1].step - psi.grids[1].step).abs() < 1e-14);
    }

    #[test]
    fn moments_agree_across_representations() {
        let psi = Wave2D::double_gaussian(grids(256), 1.2, 0.9, -1.5);
        let direct = moments(&psi).unwrap();
        let mixed = moments(&to_mixed_representation(&psi).unwrap()).unwrap();
        assert!((direct.q_var - mixed.q_var).abs() < 1e-9);
        assert!((direct.p_mean - mixed.p_mean).abs() < 1e-6);
        assert!((direct.p_var - mixed.p_var).abs() < 1e-6);
    }

    #[test]
    fn real_even_in_p_gives_real_mixed() {
        let g = [Grid1::centered(0.0, 0.1, 64).unwrap(), Grid1::centered(0.0, 0.1, 128).unwrap()];
        let psi = Wave2D::from_fn([Axis::Q, Axis::P], g, |q, p| C64::new((-q * q - p * p).exp() * (1.0 + p * p), 0.0));
        let mixed = to_mixed_representation(&psi).unwrap();
        assert!(mixed.values.iter().all(|v| v.im.abs() < 1e-12));
    }

    #[test]
    fn configuration_space_moments() {
        let g = Grid1::centered(0.0, 0.02, 2048).unwrap();
        let a: f64 = 0.7;
        let psi = Wave1D::from_fn(Axis::X, g, |x| (I * 1.5 * x / 0.5 - x * x / (2.0 * a * a)).exp() / (PI.sqrt() * a).sqrt());
        let m = moments_1d(&psi, 0.5).unwrap();
        assert!((m.q_var - a * a / 2.0).abs() < 1e-10);
        assert!((m.p_mean - 1.5).abs() < 1e-8);
        assert!((m.p_var - 0.25 / (2.0 * a * a)).abs() < 1e-7);
    }
}
