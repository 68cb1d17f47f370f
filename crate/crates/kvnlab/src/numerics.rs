//! Quadrature, interpolation and special functions used by the grid and
//! spectral code.

use crate::{Error, Result, C64};
use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

/// Uniform 1-D grid `min + i·step`, `i = 0..count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1 {
    pub min: f64,
    pub step: f64,
    pub count: usize,
}

impl Grid1 {
    /// `count` points spanning `[min, max]` inclusive.
    pub fn span(min: f64, max: f64, count: usize) -> Result<Self> {
        if count < 2 || !(max > min) || !min.is_finite() || !max.is_finite() {
            return Err(Error::InvalidParameter(format!("grid [{min}, {max}] with {count} points")));
        }
        Ok(Self { min, step: (max - min) / (count - 1) as f64, count })
    }

    /// `count` points centred on `center` with spacing `step` (FFT layout:
    /// the centre sits at index `count / 2`).
    pub fn centered(center: f64, step: f64, count: usize) -> Result<Self> {
        if count < 2 || !(step > 0.0) {
            return Err(Error::InvalidParameter(format!("grid step {step} with {count} points")));
        }
        Ok(Self { min: center - (count / 2) as f64 * step, step, count })
    }

    pub fn max(&self) -> f64 {
        self.min + (self.count - 1) as f64 * self.step
    }

    pub fn at(&self, i: usize) -> f64 {
        self.min + i as f64 * self.step
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(|i| self.at(i))
    }

    /// Four-point cubic Lagrange stencil around `x`: the first index and the
    /// weights. `None` if `x` lies outside the grid.
    pub fn cubic_stencil(&self, x: f64) -> Option<(usize, [f64; 4])> {
        let s = (x - self.min) / self.step;
        if !(s >= 0.0 && s <= (self.count - 1) as f64) {
            return None;
        }
        let last = self.count as isize - 4;
        let i0 = ((s.floor() as isize) - 1).clamp(0, last.max(0)) as usize;
        let t = s - i0 as f64;
        let w = [
            -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0,
            t * (t - 2.0) * (t - 3.0) / 2.0,
            -t * (t - 1.0) * (t - 3.0) / 2.0,
            t * (t - 1.0) * (t - 2.0) / 6.0,
        ];
        Some((i0, w))
    }
}

/// Values that can be integrated numerically.
pub trait Integrand: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(self) -> f64;
}

impl Integrand for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl Integrand for C64 {
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidParameter("Gauss-Legendre order 0".into()));
        }
        let mut nodes = vec![0.0; order];
        let mut weights = vec![0.0; order];
        let nf = order as f64;
        for i in 0..order.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(order, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(order, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[order - 1 - i] = x;
            weights[i] = w;
            weights[order - 1 - i] = w;
        }
        if order % 2 == 1 {
            nodes[order / 2] = 0.0;
        }
        Ok(Self { nodes, weights })
    }

    /// Rule mapped onto `[a, b]`.
    pub fn integrate<T: Integrand>(&self, a: f64, b: f64, f: &mut impl FnMut(f64) -> T) -> T {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = T::zero();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc = acc + f(mid + half * x) * (w * half);
        }
        acc
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Adaptive Gauss-Legendre on `[a, b]`: panels are bisected until the
/// whole-panel and split estimates agree to `rel_tol` of the integral of
/// `|f|` over the full interval.
pub fn adaptive_gauss_legendre<T: Integrand>(
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    rel_tol: f64,
    mut f: impl FnMut(f64) -> T,
) -> Result<T> {
    const MAX_DEPTH: usize = 40;
    let mut scale_fn = |x: f64| f(x).magnitude();
    let scale = rule.integrate(a, b, &mut scale_fn).max(f64::MIN_POSITIVE);
    let tol = rel_tol * scale;
    let mut total = T::zero();
    let mut stack = vec![(a, b, rule.integrate(a, b, &mut f), 0usize)];
    while let Some((lo, hi, whole, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = rule.integrate(lo, mid, &mut f);
        let right = rule.integrate(mid, hi, &mut f);
        let split = left + right;
        let width = (hi - lo) / (b - a).abs().max(f64::MIN_POSITIVE);
        if (split - whole).magnitude() <= tol * width.max(1e-3) {
            total = total + split;
        } else if depth >= MAX_DEPTH {
            return Err(Error::Numerical(format!("quadrature did not converge on [{lo}, {hi}]")));
        } else {
            stack.push((lo, mid, left, depth + 1));
            stack.push((mid, hi, right, depth + 1));
        }
    }
    Ok(total)
}

/// `ln Γ(x)` for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let t = x + 7.5;
    let sum = COEF[1..].iter().enumerate().fold(COEF[0], |acc, (i, c)| acc + c / (x + i as f64 + 1.0));
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + sum.ln()
}

/// Bessel function of the first kind `J_ν(x)` for real `ν ≥ 0`, `x ≥ 0`.
///
/// Ascending series for small arguments; beyond, Schläfli's integral
/// representation evaluated by Gauss-Legendre panels.
pub fn bessel_j(nu: f64, x: f64) -> Result<f64> {
    if !(0.0..=50.0).contains(&nu) {
        return Err(Error::InvalidParameter(format!("Bessel order {nu} outside [0, 50]")));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::InvalidParameter(format!("Bessel argument {x}")));
    }
    if x == 0.0 {
        return Ok(if nu == 0.0 { 1.0 } else { 0.0 });
    }
    if x < 12.0 + 0.5 * nu {
        Ok(bessel_series(nu, x))
    } else {
        bessel_integral(nu, x)
    }
}

fn bessel_series(nu: f64, x: f64) -> f64 {
    let h = 0.5 * x;
    let mut term = (nu * h.ln() - ln_gamma(nu + 1.0)).exp();
    let mut sum = term;
    let h2 = h * h;
    for k in 1..500 {
        let kf = k as f64;
        term *= -h2 / (kf * (kf + nu));
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) && kf > h {
            break;
        }
    }
    sum
}

fn bessel_integral(nu: f64, x: f64) -> Result<f64> {
    let rule = GaussLegendre::new(32)?;
    let panels = (x / 2.0).ceil().max(8.0) as usize;
    let w = PI / panels as f64;
    let mut osc = 0.0;
    for i in 0..panels {
        osc += rule.integrate(i as f64 * w, (i + 1) as f64 * w, &mut |t: f64| (nu * t - x * t.sin()).cos());
    }
    let mut value = osc / PI;
    let s = (nu * PI).sin();
    if s != 0.0 {
        // e^{-x sinh t - νt} is below 1e-18 once x sinh t > 42.
        let upper = (42.0 / x).asinh();
        let tail = adaptive_gauss_legendre(&rule, 0.0, upper, 1e-14, |t: f64| (-x * t.sinh() - nu * t).exp())?;
        value -= s / PI * tail;
    }
    Ok(value)
}

/// `k`-th zero of `J_ν` counted from the origin. For `ν > 0` the origin
/// itself is the first zero (`J_ν(0) = 0`), so `k = 2` is the first
/// positive root; for `ν = 0` every `k` is a positive root.
pub fn bessel_zero(nu: f64, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParameter("Bessel zero index starts at 1".into()));
    }
    bessel_j(nu, 1.0)?;
    let positive_index = if nu > 0.0 { k - 1 } else { k };
    if positive_index == 0 {
        return Ok(0.0);
    }
    positive_bessel_zero(nu, positive_index)
}

/// `k`-th positive zero `j_{ν,k}` (k ≥ 1).
pub fn positive_bessel_zero(nu: f64, k: usize) -> Result<f64> {
    const STEP: f64 = 0.25;
    let mut found = 0;
    let mut lo = 1e-3_f64.max(nu * 0.5);
    let mut f_lo = bessel_j(nu, lo)?;
    while found < k {
        let hi = lo + STEP;
        let f_hi = bessel_j(nu, hi)?;
        if f_lo == 0.0 || f_lo.signum() != f_hi.signum() {
            found += 1;
            if found == k {
                return refine_root(nu, lo, hi, f_lo);
            }
        }
        lo = hi;
        f_lo = f_hi;
        if lo > 1e4 {
            return Err(Error::Numerical(format!("no zero {k} of J_{nu} below 1e4")));
        }
    }
    unreachable!()
}

fn refine_root(nu: f64, mut lo: f64, mut hi: f64, mut f_lo: f64) -> Result<f64> {
    if f_lo == 0.0 {
        return Ok(lo);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let f_mid = bessel_j(nu, mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_on_polynomials() {
        let rule = GaussLegendre::new(8).unwrap();
        let v = rule.integrate(0.0, 2.0, &mut |x: f64| x.powi(15) - 3.0 * x.powi(4));
        let exact = 2f64.powi(16) / 16.0 - 3.0 * 2f64.powi(5) / 5.0;
        assert!((v - exact).abs() < 1e-10 * exact.abs());
        let sum: f64 = GaussLegendre::new(101).unwrap().weights.iter().sum();
        assert!((sum - 2.0).abs() < 1e-13);
    }

    #[test]
    fn adaptive_handles_oscillation() {
        let rule = GaussLegendre::new(16).unwrap();
        let v = adaptive_gauss_legendre(&rule, 0.0, 50.0, 1e-10, |x: f64| (x * x).cos()).unwrap();
        // ∫₀^50 cos x² dx via the Fresnel integral value from a fine reference rule.
        let fine = GaussLegendre::new(64).unwrap();
        let reference: f64 = (0..2000).map(|i| fine.integrate(i as f64 * 0.025, (i + 1) as f64 * 0.025, &mut |x: f64| (x * x).cos())).sum();
        assert!((v - reference).abs() < 1e-9);
        let c = adaptive_gauss_legendre(&rule, 0.0, PI, 1e-12, |x: f64| C64::new(0.0, x).exp()).unwrap();
        assert!((c - C64::new(0.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn ln_gamma_values() {
        assert!((ln_gamma(5.0) - 24f64.ln()).abs() < 1e-13);
        assert!((ln_gamma(0.5) - PI.sqrt().ln()).abs() < 1e-13);
        assert!((ln_gamma(10.3) - 13.482_036_786_138_36).abs() < 1e-10);
    }

    #[test]
    fn half_integer_bessel_closed_form() {
        for &x in &[0.3, 1.0, 5.0, 11.9, 12.5, 20.0, 47.0, 130.0] {
            let j = bessel_j(0.5, x).unwrap();
            let exact = (2.0 / (PI * x)).sqrt() * x.sin();
            assert!((j - exact).abs() < 1e-12, "x = {x}: {j} vs {exact}");
            let j32 = bessel_j(1.5, x).unwrap();
            let exact32 = (2.0 / (PI * x)).sqrt() * (x.sin() / x - x.cos());
            assert!((j32 - exact32).abs() < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn integer_order_values() {
        assert!((bessel_j(0.0, 1.0).unwrap() - 0.765_197_686_557_966_6).abs() < 1e-14);
        assert!((bessel_j(1.0, 20.0).unwrap() - 0.066_833_124_175_849_93).abs() < 1e-13);
        assert!((bessel_j(0.0, 30.0).unwrap() - -0.086_367_983_581_040_21).abs() < 1e-13);
    }

    #[test]
    fn zeros() {
        assert!((positive_bessel_zero(0.0, 1).unwrap() - 2.404_825_557_695_773).abs() < 1e-10);
        assert!((positive_bessel_zero(1.0, 1).unwrap() - 3.831_705_970_207_512).abs() < 1e-10);
        assert!((positive_bessel_zero(0.5, 3).unwrap() - 3.0 * PI).abs() < 1e-10);
        assert!((positive_bessel_zero(0.0, 10).unwrap() - 30.634_606_468_431_98).abs() < 1e-10);
        assert_eq!(bessel_zero(1.0, 1).unwrap(), 0.0);
        assert_eq!(bessel_zero(1.0, 2).unwrap(), positive_bessel_zero(1.0, 1).unwrap());
        assert!(bessel_zero(60.0, 1).is_err());
    }

    #[test]
    fn cubic_stencil_reproduces_cubics() {
        let g = Grid1::span(-2.0, 3.0, 26).unwrap();
        let f = |x: f64| 2.0 * x.powi(3) - x + 0.5;
        for &x in &[-2.0, -1.93, 0.0, 1.2345, 2.99, 3.0] {
            let (i0, w) = g.cubic_stencil(x).unwrap();
            let v: f64 = (0..4).map(|k| w[k] * f(g.at(i0 + k))).sum();
            assert!((v - f(x)).abs() < 1e-12);
        }
        assert!(g.cubic_stencil(3.01).is_none());
    }
}
