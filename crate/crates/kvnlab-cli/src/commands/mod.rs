mod algebra;
mod gauge;
mod metrics;
mod waves;

pub use algebra::{algebra_check, brackets_check};
pub use gauge::{ab, landau};
pub use metrics::{metric_report, nogo};
pub use waves::{evolve, nsm, two_slit};

use crate::config::Section;

pub struct Context<'a> {
    pub cfg: &'a Section,
    pub seed: u64,
    pub tol: Option<f64>,
}

impl Context<'_> {
    /// Tolerance of the command's main check, `--tol` winning over `default`.
    pub fn tol(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }
}
