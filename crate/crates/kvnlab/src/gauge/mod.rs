//! Minimal coupling, gauge transformations and the magnetic spectra.

mod aharonov_bohm;
mod landau;

pub use aharonov_bohm::{ab_spectra, radial_liouvillian, AbClassical, AbParams, AbSpectra, RadialGrid};
pub use landau::{landau_constants_of_motion, landau_fd_check, landau_quantum_levels, landau_spectrum, FdCheck};
pub use crate::numerics::bessel_zero;

use crate::cartan::PolyField;
use crate::dynamics::{Axis, Wave2D};
use crate::epb::{superfield, theta_components, SuperPoly};
use crate::grassmann::{slot_of, Label};
use crate::{Error, Result, C64, I};
use rustfft::FftPlanner;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldKind {
    /// Uniform field `B ẑ` in the gauge `A = (0, Bx, 0)`.
    Landau { b: f64 },
    /// Infinitely thin solenoid on the z axis carrying flux `Φ`.
    FluxLine { flux: f64 },
}

/// External magnetic field with the coupling constant `e/c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugeField {
    pub kind: FieldKind,
    pub coupling: f64,
}

impl GaugeField {
    pub fn landau(b: f64) -> Self {
        Self { kind: FieldKind::Landau { b }, coupling: 1.0 }
    }

    pub fn flux_line(flux: f64) -> Self {
        Self { kind: FieldKind::FluxLine { flux }, coupling: 1.0 }
    }

    pub fn with_coupling(self, coupling: f64) -> Self {
        Self { coupling, ..self }
    }

    /// `A(x, y, z)`; the flux line is singular on its axis.
    pub fn vector_potential(&self, x: f64, y: f64, _z: f64) -> Result<[f64; 3]> {
        match self.kind {
            FieldKind::Landau { b } => Ok([0.0, b * x, 0.0]),
            FieldKind::FluxLine { flux } => {
                let r2 = x * x + y * y;
                if r2 == 0.0 {
                    return Err(Error::Numerical("flux-line potential on its axis".into()));
                }
                let s = flux / (2.0 * PI * r2);
                Ok([-y * s, x * s, 0.0])
            }
        }
    }

    /// Polynomial components `A_i(q)` in `n = 3` phase space.
    pub fn potential_polys(&self) -> Result<[PolyField; 3]> {
        match self.kind {
            FieldKind::Landau { b } => {
                Ok([PolyField::zero(3), PolyField::q(3, 1).scale(real(b)), PolyField::zero(3)])
            }
            FieldKind::FluxLine { .. } => {
                Err(Error::Unsupported("flux-line potential is not polynomial; use the cylindrical shift".into()))
            }
        }
    }

    /// `𝒜_i = −Σ_j λ_{p_j} ∂A_i/∂q_j`.
    pub fn curly_potentials(&self) -> Result<[SuperPoly; 3]> {
        let a = self.potential_polys()?;
        Ok(a.map(|ai| {
            let mut out = SuperPoly::zero(3);
            for j in 1..=3 {
                let d = ai.deriv(slot_of(Label::Q(j)));
                if !d.is_zero() {
                    let t = &SuperPoly::lambda(3, slot_of(Label::P(j))) * &SuperPoly::from_poly(&d);
                    out = &out - &t;
                }
            }
            out
        }))
    }

    /// `(p − (e/c)A)² / 2m`.
    pub fn coupled_kinetic(&self, mass: f64) -> Result<PolyField> {
        let a = self.potential_polys()?;
        let mut h = PolyField::zero(3);
        for (i, ai) in a.iter().enumerate() {
            let k = &PolyField::p(3, i + 1) - &ai.scale(real(self.coupling));
            h = &h + &(&k * &k);
        }
        Ok(h.scale(real(0.5 / mass)))
    }
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Bosonic (c-free) part of a superspace function.
pub fn bosonic_part(f: &SuperPoly) -> SuperPoly {
    let mut out = SuperPoly::zero(f.n());
    for (k, c) in f.terms().filter(|(k, _)| k.word.is_empty()) {
        out.add_term(k.clone(), *c);
    }
    out
}

/// Replace `p_i → p_i − (e/c)A_i` and `λ_{q_i} → λ_{q_i} − (e/c)𝒜_i` in a
/// Liouvillian written in the bosonic `λ`-symbol form (`n = 3`).
pub fn minimal_coupling(free: &SuperPoly, field: &GaugeField) -> Result<SuperPoly> {
    if free.n() != 3 {
        return Err(Error::DimensionMismatch(format!("minimal coupling needs n = 3, got {}", free.n())));
    }
    if free.terms().any(|(k, _)| !k.word.is_empty()) {
        return Err(Error::InvalidParameter("minimal coupling expects the bosonic λ-symbol form".into()));
    }
    let a = field.potential_polys()?;
    let curly = field.curly_potentials()?;
    let kappa = real(field.coupling);
    let mut phi_images: Vec<SuperPoly> = (0..6).map(|s| SuperPoly::phi(3, s)).collect();
    let mut lam_images: Vec<SuperPoly> = (0..6).map(|s| SuperPoly::lambda(3, s)).collect();
    for i in 0..3 {
        let p = slot_of(Label::P(i + 1));
        let q = slot_of(Label::Q(i + 1));
        phi_images[p] = &phi_images[p] - &SuperPoly::from_poly(&a[i]).scale(kappa);
        lam_images[q] = &lam_images[q] - &curly[i].scale(kappa);
    }
    let mut out = SuperPoly::zero(3);
    for (key, c) in free.terms() {
        let mut t = SuperPoly::constant(3, *c);
        for slot in 0..6 {
            for _ in 0..key.phi[slot] {
                t = t.try_mul(&phi_images[slot])?;
            }
            for _ in 0..key.lam[slot] {
                t = t.try_mul(&lam_images[slot])?;
            }
        }
        out = out.try_add(&t)?;
    }
    Ok(out)
}

/// The two components of `Φ^{p_i} − (e/c)A_i(Φ^q)` that carry the coupling
/// rules: the `θ`-free part (image of `p_i`) and the `θθ̄` part (image of
/// `λ_{q_i}`).
pub fn superfield_substitution(field: &GaugeField, i: usize) -> Result<(SuperPoly, SuperPoly)> {
    if !(1..=3).contains(&i) {
        return Err(Error::IndexOutOfRange { index: i, max: 3 });
    }
    let a = field.potential_polys()?;
    let images: Vec<SuperPoly> = (0..6).map(|s| superfield(3, s)).collect();
    let shifted = SuperPoly::compose_poly(&a[i - 1], &images)?.scale(real(field.coupling));
    let f = &superfield(3, slot_of(Label::P(i))) - &shifted;
    let (p_image, _, _, lam_image) = theta_components(&f);
    Ok((p_image, lam_image))
}

/// Representation of a one-degree-of-freedom wave for [`gauge_transform`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    QP,
    QLambda,
}

/// Relative weight allowed to cross the grid edge under a momentum shift.
const EDGE_WEIGHT_TOL: f64 = 1e-12;

/// Gauge transformation `A → A + ∇α` acting on a wave, given `dα/dq`.
///
/// In `(q, p)` every row is shifted, `ψ'(q, p) = ψ(q, p − (e/c)α'(q))`, by
/// band-limited (spectral) interpolation; in `(q, λ_p)` the wave acquires the
/// local phase `exp(−i (e/c) λ_p α'(q))`.
pub fn gauge_transform(psi: &Wave2D, grad_alpha: impl Fn(f64) -> f64, coupling: f64) -> Result<Wave2D> {
    let rep = match psi.axes {
        [Axis::Q, Axis::P] => Representation::QP,
        [Axis::Q, Axis::LambdaP] => Representation::QLambda,
        other => return Err(Error::Unsupported(format!("gauge transform on axes {other:?}"))),
    };
    let (gq, gs) = (psi.grids[0], psi.grids[1]);
    let n = gs.count;
    let mut out = psi.clone();
    let mut planner = FftPlanner::new();
    let (fwd, inv) = (planner.plan_fft_forward(n), planner.plan_fft_inverse(n));
    for (i, row) in out.values.chunks_mut(n).enumerate() {
        let shift = coupling * grad_alpha(gq.at(i));
        if !shift.is_finite() {
            return Err(Error::InvalidParameter(format!("gauge gradient not finite at q = {}", gq.at(i))));
        }
        match rep {
            Representation::QLambda => {
                if shift.abs() * gs.step > PI {
                    return Err(Error::InvalidParameter(format!(
                        "gauge phase aliases on the λ grid at q = {} (shift {shift})",
                        gq.at(i)
                    )));
                }
                for (j, v) in row.iter_mut().enumerate() {
                    *v *= (-I * shift * gs.at(j)).exp();
                }
            }
            Representation::QP => {
                if shift == 0.0 {
                    continue;
                }
                check_edge_weight(row, shift, gs.step, gq.at(i))?;
                fwd.process(row);
                let dk = 2.0 * PI / (n as f64 * gs.step);
                for (j, v) in row.iter_mut().enumerate() {
                    let sj = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
                    // The unpaired Nyquist bin takes the real part of its phase.
                    let phase = if n % 2 == 0 && j == n / 2 {
                        real((sj * dk * shift).cos())
                    } else {
                        (-I * sj * dk * shift).exp()
                    };
                    *v *= phase / n as f64;
                }
                inv.process(row);
            }
        }
    }
    Ok(out)
}

fn check_edge_weight(row: &[C64], shift: f64, step: f64, q: f64) -> Result<()> {
    let n = row.len();
    let cells = ((shift.abs() / step).ceil() as usize + 1).min(n);
    let total: f64 = row.iter().map(|v| v.norm_sqr()).sum();
    if total == 0.0 {
        return Ok(());
    }
    let edge: f64 = if shift > 0.0 {
        row[n - cells..].iter().map(|v| v.norm_sqr()).sum()
    } else {
        row[..cells].iter().map(|v| v.norm_sqr()).sum()
    };
    if edge > EDGE_WEIGHT_TOL * total {
        return Err(Error::InvalidParameter(format!("momentum shift {shift} at q = {q} pushes the wave off the grid")));
    }
    Ok(())
}

/// Sorted spectrum with one entry per distinct level.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub context: String,
    pub levels: Vec<Level>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    pub label: String,
    pub value: f64,
    pub degeneracy: usize,
}

impl SpectrumResult {
    pub fn new(context: impl Into<String>, mut levels: Vec<Level>) -> Self {
        levels.sort_by(|a, b| a.value.total_cmp(&b.value).then_with(|| a.label.cmp(&b.label)));
        Self { context: context.into(), levels }
    }

    pub fn values(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.value).collect()
    }

    pub fn find(&self, label: &str) -> Option<&Level> {
        self.levels.iter().find(|l| l.label == label)
    }
}
