//! Grid propagation of classical (Liouville) and quantum (Schrödinger)
//! waves, representation changes, moments and the measurement scenarios
//! built on them.

mod liouville;
mod measurement;
mod schrodinger;
mod slits;
mod wave;

pub use liouville::{compose_with_flow, flow, liouville_evolve, Boundary, LiouvilleOptions, OutputGrid};
pub use measurement::{
    coefficient_of_variation, nsm_classical, nsm_quantum, phase_blindness_check, split_evolution_check, NsmOutcome,
    PhaseBlindness,
};
pub use schrodinger::{free_gaussian, schrodinger_evolve, SchrodingerOptions};
pub use slits::{classical_two_slit_grid, count_minima, two_slit, two_slit_raw, SlitConfig, SlitMode, SlitOpen, SlitProfile};
pub use wave::{from_mixed_representation, moments, moments_1d, to_mixed_representation, Axis, Moments, Wave1D, Wave2D};

use std::fmt;
use std::sync::Arc;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// One-degree-of-freedom Hamiltonian `H = p²/2m + V(q)`.
#[derive(Clone)]
pub enum Hamiltonian {
    Free { mass: f64 },
    Harmonic { mass: f64, omega: f64 },
    /// `V(q) = Σ_k c_k q^k`.
    Polynomial { mass: f64, coeffs: Vec<f64> },
    /// User potential with its first two derivatives.
    Custom { mass: f64, potential: ScalarFn, slope: ScalarFn, curvature: ScalarFn },
}

impl fmt::Debug for Hamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Free { mass } => write!(f, "Free {{ mass: {mass} }}"),
            Self::Harmonic { mass, omega } => write!(f, "Harmonic {{ mass: {mass}, omega: {omega} }}"),
            Self::Polynomial { mass, coeffs } => write!(f, "Polynomial {{ mass: {mass}, coeffs: {coeffs:?} }}"),
            Self::Custom { mass, .. } => write!(f, "Custom {{ mass: {mass} }}"),
        }
    }
}

impl Hamiltonian {
    pub fn custom(
        mass: f64,
        potential: impl Fn(f64) -> f64 + Send + Sync + 'static,
        slope: impl Fn(f64) -> f64 + Send + Sync + 'static,
        curvature: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self::Custom { mass, potential: Arc::new(potential), slope: Arc::new(slope), curvature: Arc::new(curvature) }
    }

    pub fn mass(&self) -> f64 {
        match self {
            Self::Free { mass } | Self::Harmonic { mass, .. } | Self::Polynomial { mass, .. } | Self::Custom { mass, .. } => *mass,
        }
    }

    pub fn is_free(&self) -> bool {
        match self {
            Self::Free { .. } => true,
            Self::Polynomial { coeffs, .. } => coeffs.iter().skip(1).all(|&c| c == 0.0),
            _ => false,
        }
    }

    pub fn potential(&self, q: f64) -> f64 {
        match self {
            Self::Free { .. } => 0.0,
            Self::Harmonic { mass, omega } => 0.5 * mass * omega * omega * q * q,
            Self::Polynomial { coeffs, .. } => coeffs.iter().rev().fold(0.0, |acc, c| acc * q + c),
            Self::Custom { potential, .. } => potential(q),
        }
    }

    /// `V'(q)`.
    pub fn slope(&self, q: f64) -> f64 {
        match self {
            Self::Free { .. } => 0.0,
            Self::Harmonic { mass, omega } => mass * omega * omega * q,
            Self::Polynomial { coeffs, .. } => {
                coeffs.iter().enumerate().skip(1).rev().fold(0.0, |acc, (k, c)| acc * q + k as f64 * c)
            }
            Self::Custom { slope, .. } => slope(q),
        }
    }

    /// `V''(q)`.
    pub fn curvature(&self, q: f64) -> f64 {
        match self {
            Self::Free { .. } => 0.0,
            Self::Harmonic { mass, omega } => mass * omega * omega,
            Self::Polynomial { coeffs, .. } => coeffs
                .iter()
                .enumerate()
                .skip(2)
                .rev()
                .fold(0.0, |acc, (k, c)| acc * q + (k * (k - 1)) as f64 * c),
            Self::Custom { curvature, .. } => curvature(q),
        }
    }

    pub fn energy(&self, q: f64, p: f64) -> f64 {
        p * p / (2.0 * self.mass()) + self.potential(q)
    }

    /// `(∂H/∂q, ∂H/∂p)`.
    pub fn gradient(&self, q: f64, p: f64) -> (f64, f64) {
        (self.slope(q), p / self.mass())
    }

    /// Hamilton's equations `(q̇, ṗ)`.
    pub fn velocity(&self, q: f64, p: f64) -> (f64, f64) {
        (p / self.mass(), -self.slope(q))
    }
}
