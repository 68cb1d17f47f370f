use super::{FieldKind, GaugeField, Level, SpectrumResult};
use crate::cartan::{evolution_operator, GradedDiffOp, PolyField};
use crate::numerics::Grid1;
use crate::{Error, Result, C64};
use nalgebra::{DMatrix, SymmetricEigen};
use std::collections::BTreeMap;

fn landau_b(field: &GaugeField) -> Result<f64> {
    match field.kind {
        FieldKind::Landau { b } => Ok(b),
        FieldKind::FluxLine { .. } => Err(Error::Unsupported("Landau spectrum needs a uniform field".into())),
    }
}

impl GaugeField {
    /// Frequency `ω = eB/(mc)` of the Landau spectrum.
    pub fn cyclotron_frequency(&self, mass: f64) -> Result<f64> {
        if !(mass > 0.0) {
            return Err(Error::InvalidParameter(format!("mass {mass}")));
        }
        Ok(self.coupling * landau_b(self)? / mass)
    }
}


fn annihilator(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |r, c| if c == r + 1 { (c as f64).sqrt() } else { 0.0 })
}

/// Classical Landau spectrum from `𝓗̃⁺ = [H_osc(Z₋) − H_osc(Z₊)]/Δ` on the
/// product oscillator basis truncated to `n_tr` states per factor.
/// Every level is `Nω`, `N = m − n`, with `n_tr − |N|` states.
pub fn landau_spectrum(field: &GaugeField, mass: f64, n_tr: usize) -> Result<SpectrumResult> {
    if n_tr < 2 {
        return Err(Error::InvalidParameter(format!("truncation {n_tr} < 2")));
    }
    let w = field.cyclotron_frequency(mass)?;
    let a = annihilator(n_tr);
    let number = a.transpose() * &a;
    // Oscillator energies in units of ω; the half-integers subtract exactly.
    let osc: Vec<f64> = (0..n_tr).map(|k| number[(k, k)] + 0.5).collect();
    let mut levels: BTreeMap<i64, (f64, usize)> = BTreeMap::new();
    for (m, e_minus) in osc.iter().enumerate() {
        for (n, e_plus) in osc.iter().enumerate() {
            let entry = levels.entry(m as i64 - n as i64).or_insert((w * (e_minus - e_plus), 0));
            entry.1 += 1;
        }
    }
    let levels = levels
        .into_iter()
        .map(|(big_n, (value, degeneracy))| Level { label: format!("N={big_n}"), value, degeneracy })
        .collect();
    Ok(SpectrumResult::new(format!("classical Landau, truncation {n_tr}"), levels))
}

/// Quantum Landau levels `ħω(n + ½) + p_z²/2m` for `n < count`.
pub fn landau_quantum_levels(field: &GaugeField, mass: f64, hbar: f64, count: usize, p_z: f64) -> Result<SpectrumResult> {
    let w = field.cyclotron_frequency(mass)?;
    let levels = (0..count)
        .map(|n| Level {
            label: format!("n={n}"),
            value: hbar * w * (n as f64 + 0.5) + p_z * p_z / (2.0 * mass),
            degeneracy: 1,
        })
        .collect();
    Ok(SpectrumResult::new("quantum Landau", levels))
}

/// Finite-difference cross-check of `[(1/m)∂_x∂_λ − mω²λx]ψ = 𝓔⁺ψ`.
#[derive(Debug, Clone, PartialEq)]
pub struct FdCheck {
    /// Eigenvalues in units of `ω`, ascending.
    pub eigenvalues: Vec<f64>,
    /// Largest distance of an eigenvalue from the nearest integer, in units of `ω`.
    pub max_deviation: f64,
    /// `(N, count)` for every cluster.
    pub clusters: Vec<(i64, usize)>,
}

/// Discretizes the reduced Landau operator on a `points × points` Dirichlet
/// grid spanning `±half_width` oscillator lengths in `x` and `λ_p`, and
/// diagonalizes it on the span of the grid oscillator states with total
/// quantum number `≤ shell`. That span is invariant in the continuum because
/// the operator commutes with `H_osc(Z₋) + H_osc(Z₊)`, which separates in
/// `x` and `λ_p`.
pub fn landau_fd_check(field: &GaugeField, mass: f64, points: usize, half_width: f64, shell: usize) -> Result<FdCheck> {
    let w = field.cyclotron_frequency(mass)?.abs();
    if w == 0.0 {
        return Err(Error::InvalidParameter("zero field has no Landau scale".into()));
    }
    if points < 8 || 4 * (shell + 1) > points {
        return Err(Error::InvalidParameter(format!("grid of {points} points cannot resolve shell {shell}")));
    }
    let sigma = (mass * w).powf(-0.5);
    let grid = Grid1::span(-half_width * sigma, half_width * sigma, points)?;
    let h = grid.step;
    // Fourth-order central stencils.
    let d1 = DMatrix::from_fn(points, points, |r, c| match c as i64 - r as i64 {
        1 => 8.0 / (12.0 * h),
        -1 => -8.0 / (12.0 * h),
        2 => -1.0 / (12.0 * h),
        -2 => 1.0 / (12.0 * h),
        _ => 0.0,
    });
    let d2 = DMatrix::from_fn(points, points, |r, c| match (c as i64 - r as i64).abs() {
        0 => -30.0 / (12.0 * h * h),
        1 => 16.0 / (12.0 * h * h),
        2 => -1.0 / (12.0 * h * h),
        _ => 0.0,
    });
    let x = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(points, grid.points()));
    // With Δ = 1 both one-dimensional factors are the same oscillator.
    let k1 = d2 * (-0.5 / mass) + (&x * &x) * (0.5 * mass * w * w);
    let eig = SymmetricEigen::new(k1);
    let mut order: Vec<usize> = (0..points).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let u = DMatrix::from_fn(points, shell + 1, |r, c| eig.eigenvectors[(r, order[c])]);
    let dm = u.transpose() * &d1 * &u;
    let xm = u.transpose() * &x * &u;
    let basis: Vec<(usize, usize)> =
        (0..=shell).flat_map(|i| (0..=shell - i).map(move |j| (i, j))).collect();
    let dim = basis.len();
    let op = DMatrix::from_fn(dim, dim, |r, c| {
        let ((i, j), (k, l)) = (basis[r], basis[c]);
        (dm[(i, k)] * dm[(j, l)] / mass - mass * w * w * xm[(i, k)] * xm[(j, l)]) / w
    });
    let op = (&op + op.transpose()) * 0.5;
    let mut eigenvalues: Vec<f64> = SymmetricEigen::new(op).eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(f64::total_cmp);
    let mut clusters: BTreeMap<i64, usize> = BTreeMap::new();
    let mut max_deviation: f64 = 0.0;
    for e in &eigenvalues {
        let n = e.round();
        max_deviation = max_deviation.max((e - n).abs());
        *clusters.entry(n as i64).or_default() += 1;
    }
    Ok(FdCheck { eigenvalues, max_deviation, clusters: clusters.into_iter().collect() })
}

/// Max coefficient of `[f̂, 𝓗̃]` for the guiding-centre coordinates `x₀`,
/// `y₀` and the squared Larmor radius.
pub fn landau_constants_of_motion(field: &GaugeField, mass: f64) -> Result<Vec<(&'static str, f64)>> {
    let kb = field.coupling * landau_b(field)?;
    if kb == 0.0 {
        return Err(Error::InvalidParameter("zero field has no guiding centre".into()));
    }
    let hamiltonian = evolution_operator(&field.coupled_kinetic(mass)?)?;
    let r = |v: f64| C64::new(v, 0.0);
    let x0 = PolyField::p(3, 2).scale(r(1.0 / kb));
    let y0 = &PolyField::q(3, 2) - &PolyField::p(3, 1).scale(r(1.0 / kb));
    let dx = &PolyField::q(3, 1) - &x0;
    let dy = PolyField::p(3, 1).scale(r(1.0 / kb));
    let rho2 = &(&dx * &dx) + &(&dy * &dy);
    [("x0", x0), ("y0", y0), ("larmor_radius_sq", rho2)]
        .into_iter()
        .map(|(name, f)| Ok((name, GradedDiffOp::scalar(&f).commutator(&hamiltonian)?.max_abs())))
        .collect()
}
