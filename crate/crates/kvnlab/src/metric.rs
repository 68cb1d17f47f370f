//! Scalar products on the form sector and hermiticity of the evolution
//! operator under each of them.

use crate::cartan::{evolution_operator, fermionic_part, hamiltonian_vector, omega_upper, GradedDiffOp, PolyField};
use crate::grassmann::{basis_index, basis_monomial, slot_of, Label, MultiformVector, SectorOperator};
use crate::{Error, Result, C64, I};
use nalgebra::DMatrix;
use rayon::prelude::*;

/// Residual below which an operator counts as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Scalar-product family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MetricKind {
    /// Positive metric with `c^† = c̄`.
    Svh,
    /// `(c^a)^† = ±i c̄`-type metric, special case of [`MetricKind::GenGaugeA`].
    Gauge,
    /// `i^m ω^{⊗m}` weights per form degree.
    Symplectic,
    /// One-parameter extension of the symplectic metric (`b = −1` is symplectic).
    GenSymplectic { b: f64 },
    /// Gauge family with a zero-form diagonal entry.
    GenGaugeA { theta: f64, gamma: f64, g03: C64 },
    /// Gauge family with a two-form diagonal entry.
    GenGaugeB { theta: f64, b: f64, g03: C64 },
}

impl MetricKind {
    pub fn name(&self) -> &'static str {
        match self {
            MetricKind::Svh => "svh",
            MetricKind::Gauge => "gauge",
            MetricKind::Symplectic => "symplectic",
            MetricKind::GenSymplectic { .. } => "gen-symplectic",
            MetricKind::GenGaugeA { .. } => "gen-gauge-a",
            MetricKind::GenGaugeB { .. } => "gen-gauge-b",
        }
    }

    /// Parameter string, empty for the fixed metrics.
    pub fn params(&self) -> String {
        match self {
            MetricKind::GenSymplectic { b } => format!("b={b}"),
            MetricKind::GenGaugeA { theta, gamma, g03 } => format!("theta={theta};gamma={gamma};g03={}{:+}i", g03.re, g03.im),
            MetricKind::GenGaugeB { theta, b, g03 } => format!("theta={theta};b={b};g03={}{:+}i", g03.re, g03.im),
            _ => String::new(),
        }
    }
}

/// Sign pattern of the eigenvalues of a metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Definiteness {
    PositiveDefinite,
    Indefinite,
    Degenerate,
    NegativeDefinite,
}

/// Hermitian sector metric `g` with `⟨Φ|ψ⟩ = ∫ Φ_i^* g^{ij} ψ_j`.
#[derive(Debug, Clone)]
pub struct MetricSpec {
    kind: MetricKind,
    n: usize,
    g: DMatrix<C64>,
}

/// Four-component basis `(1, c^q, c^p, c^q c^p)` at `n = 1` as (sector index, sign).
fn textbook_basis() -> [(usize, f64); 4] {
    let (q, p) = (slot_of(Label::Q(1)) + 1, slot_of(Label::P(1)) + 1);
    let (lo, hi, sign) = if q < p { (q, p, 1.0) } else { (p, q, -1.0) };
    [(0, 1.0), (basis_index(1, &[q]), 1.0), (basis_index(1, &[p]), 1.0), (basis_index(1, &[lo, hi]), sign)]
}

fn from_textbook(m: [[C64; 4]; 4]) -> DMatrix<C64> {
    let basis = textbook_basis();
    let mut g = DMatrix::zeros(4, 4);
    for (i, &(a, sa)) in basis.iter().enumerate() {
        for (j, &(b, sb)) in basis.iter().enumerate() {
            g[(a, b)] = m[i][j] * (sa * sb);
        }
    }
    g
}

fn det(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        1.0
    } else {
        m.determinant()
    }
}

fn symplectic_metric(n: usize) -> DMatrix<C64> {
    let dim = 1 << (2 * n);
    let w = omega_upper(n);
    let mut g = DMatrix::zeros(dim, dim);
    for a in 0..dim {
        for b in 0..dim {
            if a.count_ones() != b.count_ones() {
                continue;
            }
            let (ra, rb) = (basis_monomial(n, a), basis_monomial(n, b));
            let sub = DMatrix::from_fn(ra.len(), rb.len(), |i, j| w[ra[i] - 1][rb[j] - 1]);
            let d = det(&sub);
            if d != 0.0 {
                g[(a, b)] = I.powu(ra.len() as u32) * d;
            }
        }
    }
    g
}

fn z(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn build_metric(kind: MetricKind, n: usize) -> Result<MetricSpec> {
    if n == 0 || n > crate::grassmann::DEFAULT_N_MAX {
        return Err(Error::DimensionTooLarge { n, max: crate::grassmann::DEFAULT_N_MAX });
    }
    let only_n1 = |g: [[C64; 4]; 4]| {
        if n == 1 {
            Ok(from_textbook(g))
        } else {
            Err(Error::Unsupported(format!("{} metric is defined only for n = 1", kind.name())))
        }
    };
    let zero = C64::default();
    let g = match kind {
        MetricKind::Svh => DMatrix::identity(1 << (2 * n), 1 << (2 * n)),
        MetricKind::Symplectic => symplectic_metric(n),
        MetricKind::Gauge => return build_metric(MetricKind::GenGaugeA { theta: 0.0, gamma: 0.0, g03: -I }, n).map(|m| MetricSpec { kind, ..m }),
        MetricKind::GenSymplectic { b } => only_n1([
            [z(1.0), zero, zero, zero],
            [zero, zero, -I * b, zero],
            [zero, I * b, zero, zero],
            [zero, zero, zero, z(-b * b)],
        ])?,
        MetricKind::GenGaugeA { theta, gamma, g03 } => {
            let e = C64::from_polar(1.0, theta);
            only_n1([
                [I * g03 * e * gamma, zero, zero, g03],
                [zero, zero, g03 * e, zero],
                [zero, -g03 * e, zero, zero],
                [-g03 * e * e, zero, zero, zero],
            ])?
        }
        MetricKind::GenGaugeB { theta, b, g03 } => {
            let e = C64::from_polar(1.0, theta);
            only_n1([
                [zero, zero, zero, g03],
                [zero, zero, g03 * e, zero],
                [zero, -g03 * e, zero, zero],
                [-g03 * e * e, zero, zero, -I * g03 * e * b],
            ])?
        }
    };
    let residual = (&g - g.adjoint()).iter().map(|x| x.norm()).fold(0.0, f64::max);
    if residual > 1e-12 {
        return Err(Error::NonHermitianMetric(residual));
    }
    Ok(MetricSpec { kind, n, g })
}

impl MetricSpec {
    pub fn kind(&self) -> MetricKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.g
    }

    pub fn sector(&self) -> SectorOperator {
        SectorOperator::from_dense(self.n, &self.g).expect("metric has sector dimensions")
    }

    /// `⟨Φ|ψ⟩` for constant sector vectors.
    pub fn inner(&self, phi: &[C64], psi: &[C64]) -> Result<C64> {
        let dim = self.g.nrows();
        if phi.len() != dim || psi.len() != dim {
            return Err(Error::DimensionMismatch(format!("vectors must have {dim} components")));
        }
        let mut acc = C64::default();
        for i in 0..dim {
            for j in 0..dim {
                acc += phi[i].conj() * self.g[(i, j)] * psi[j];
            }
        }
        Ok(acc)
    }

    pub fn norm_sq(&self, psi: &[C64]) -> Result<C64> {
        self.inner(psi, psi)
    }
}

/// Sorted real eigenvalues of a Hermitian metric.
pub fn metric_eigenvalues(m: &MetricSpec) -> Vec<f64> {
    let mut ev: Vec<f64> = m.g.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn classify(eigenvalues: &[f64], tol: f64) -> Definiteness {
    if eigenvalues.iter().any(|e| e.abs() <= tol) {
        Definiteness::Degenerate
    } else if eigenvalues.iter().all(|&e| e > 0.0) {
        Definiteness::PositiveDefinite
    } else if eigenvalues.iter().all(|&e| e < 0.0) {
        Definiteness::NegativeDefinite
    } else {
        Definiteness::Indefinite
    }
}

/// Adjoint `g⁻¹ A^† g`, where `A^†` is the formal `L²` adjoint.
pub fn adjoint(a: &GradedDiffOp, m: &MetricSpec) -> Result<GradedDiffOp> {
    if a.n() != m.n {
        return Err(Error::DimensionMismatch("operator and metric differ in n".into()));
    }
    let inv = m.g.clone().try_inverse().ok_or_else(|| Error::Singular(format!("{} metric", m.kind.name())))?;
    a.formal_adjoint().sandwich(&SectorOperator::from_dense(m.n, &inv)?, &m.sector())
}

#[derive(Debug, Clone, PartialEq)]
pub struct HermiticityReport {
    pub metric: String,
    pub params: String,
    pub hamiltonian: String,
    /// Largest coefficient of `g𝓗̃ − 𝓗̃^† g`.
    pub residual: f64,
    pub hermitian: bool,
}

/// Largest coefficient of `gA − A^† g`.
pub fn hermiticity_residual(a: &GradedDiffOp, m: &MetricSpec) -> Result<f64> {
    let g = m.sector();
    let id = SectorOperator::identity(m.n);
    let left = a.sandwich(&g, &id)?;
    let right = a.formal_adjoint().sandwich(&id, &g)?;
    left.distance(&right)
}

pub fn hermiticity_report(h: &PolyField, m: &MetricSpec) -> Result<HermiticityReport> {
    if h.n() != m.n {
        return Err(Error::DimensionMismatch("Hamiltonian and metric differ in n".into()));
    }
    let residual = hermiticity_residual(&evolution_operator(h)?, m)?;
    Ok(HermiticityReport {
        metric: m.kind.name().into(),
        params: m.kind.params(),
        hamiltonian: h.to_string(),
        residual,
        hermitian: residual <= HERMITIAN_TOL,
    })
}

/// One metric's row of a no-go scan.
#[derive(Debug, Clone)]
pub struct NogoRow {
    pub metric: MetricKind,
    pub reports: Vec<HermiticityReport>,
    pub eigenvalues: Vec<f64>,
    pub positive: bool,
}

impl NogoRow {
    pub fn hermitian_for_all(&self) -> bool {
        self.reports.iter().all(|r| r.hermitian)
    }
}

/// Hermiticity over a finite Hamiltonian family crossed with a list of metrics.
/// "For all H" means for every member of the family.
#[derive(Debug, Clone)]
pub struct NogoTable {
    pub rows: Vec<NogoRow>,
}

impl NogoTable {
    /// True when no metric is both positive definite and Hermitian for the whole family.
    pub fn confirms_nogo(&self) -> bool {
        !self.rows.iter().any(|r| r.positive && r.hermitian_for_all())
    }
}

pub fn nogo_scan(hamiltonians: &[PolyField], metrics: &[MetricSpec]) -> Result<NogoTable> {
    let rows = metrics
        .par_iter()
        .map(|m| {
            let reports = hamiltonians.iter().map(|h| hermiticity_report(h, m)).collect::<Result<Vec<_>>>()?;
            let eigenvalues = metric_eigenvalues(m);
            let positive = classify(&eigenvalues, 1e-12) == Definiteness::PositiveDefinite;
            Ok(NogoRow { metric: m.kind, reports, eigenvalues, positive })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NogoTable { rows })
}

/// Which physical-state construction to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhysicalKind {
    Svh,
    Symplectic,
}

/// `Σ_i coeff · c^{x_i} c^{y_i}` over the degrees of freedom.
fn pair_sum(n: usize, first: fn(usize) -> Label, second: fn(usize) -> Label, coeff: C64) -> Result<MultiformVector> {
    let terms: Vec<(Vec<usize>, C64)> = (1..=n).map(|i| (vec![slot_of(first(i)) + 1, slot_of(second(i)) + 1], coeff)).collect();
    MultiformVector::from_monomials(n, &terms)
}

/// Constant Grassmann patterns of the physical states; each multiplies an
/// arbitrary scalar function of `φ`.
///
/// `Svh` gives `(Σ_i c^{q_i}c^{p_i})^k` for `k = 0..=n`. `Symplectic` gives
/// `(Σ_i ξ^i ξ^{i*})^k` for even `k`, with `ξ^i ξ^{i*} = i c^{p_i} c^{q_i}`.
pub fn physical_basis(kind: PhysicalKind, n: usize) -> Result<Vec<MultiformVector>> {
    let (pair, step) = match kind {
        PhysicalKind::Svh => (pair_sum(n, Label::Q, Label::P, z(1.0))?, 1),
        PhysicalKind::Symplectic => (pair_sum(n, Label::P, Label::Q, I)?, 2),
    };
    let mut out = Vec::new();
    let mut power = MultiformVector::basis(n, 0);
    for k in 0..=n {
        if k % step == 0 {
            out.push(power.clone());
        }
        power = power.wedge(&pair)?;
    }
    Ok(out)
}

/// Outcome of the physical-subspace checks on one form degree.
#[derive(Debug, Clone)]
pub struct PhysicalSubspaceReport {
    pub degree: usize,
    /// Constructed patterns of this degree.
    pub family_size: usize,
    /// Largest coefficient of `𝓗̃_ferm ψ` over those patterns.
    pub annihilation_residual: f64,
    /// Largest coefficient of `[𝓗̃, 𝓗̃_ferm] ψ` over those patterns, with a
    /// polynomial scalar slot.
    pub closure_residual: f64,
    /// Dimension of the common kernel of every coefficient matrix of `𝓗̃_ferm`.
    pub kernel_dimension: usize,
}

impl PhysicalSubspaceReport {
    /// Set when the kernel is larger than the constructed family.
    pub fn flagged(&self) -> bool {
        self.kernel_dimension != self.family_size
    }
}

fn nullity(m: &DMatrix<C64>, tol: f64) -> usize {
    if m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let scale = sv.iter().copied().fold(0.0, f64::max).max(1.0);
    m.ncols() - sv.iter().filter(|&&s| s > tol * scale).count()
}

pub fn physical_subspace_check(h: &PolyField, degree: usize) -> Result<PhysicalSubspaceReport> {
    let n = h.n();
    if degree > 2 * n {
        return Err(Error::DegreeOutOfRange { degree, max: 2 * n });
    }
    let ferm = fermionic_part(h)?;
    let full = evolution_operator(h)?;
    let closure = full.commutator(&ferm)?;
    let patterns: Vec<MultiformVector> =
        physical_basis(PhysicalKind::Svh, n)?.into_iter().filter(|v| v.components().iter().enumerate().any(|(i, x)| i.count_ones() as usize == degree && x.norm() > 0.0)).collect();
    let slot = PolyField::parse(n, "1 + q1^2 + p1")?;
    let mut annihilation_residual = 0.0f64;
    let mut closure_residual = 0.0f64;
    for v in &patterns {
        let comps = v.components().iter().map(|&x| slot.scale(x)).collect();
        let field = crate::cartan::FormField::new(n, comps)?;
        for op in [&ferm, &closure] {
            let out = op.apply(&field)?;
            let r = out.comps().iter().map(|p| p.max_abs_coeff()).fold(0.0, f64::max);
            if std::ptr::eq(op, &ferm) {
                annihilation_residual = annihilation_residual.max(r);
            } else {
                closure_residual = closure_residual.max(r);
            }
        }
    }
    let cols = MultiformVector::degree_indices(n, degree);
    let mats = ferm.coefficient_matrices();
    let dim = 1 << (2 * n);
    let mut stacked = DMatrix::zeros(dim * mats.len(), cols.len());
    for (k, (_, s)) in mats.iter().enumerate() {
        for (j, &c) in cols.iter().enumerate() {
            for r in 0..dim {
                stacked[(k * dim + r, j)] = s.get(r, c);
            }
        }
    }
    Ok(PhysicalSubspaceReport { degree, family_size: patterns.len(), annihilation_residual, closure_residual, kernel_dimension: nullity(&stacked, 1e-10) })
}

/// Norm series of a one-form and of the matching Jacobi fields.
#[derive(Debug, Clone)]
pub struct JacobiSeries {
    pub times: Vec<f64>,
    /// `Σ_samples w Σ_a |ψ_a|²` along the flow.
    pub form_norm: Vec<f64>,
    /// `Σ_samples w Σ_a |δφ^a|²`.
    pub jacobi_norm: Vec<f64>,
}

impl JacobiSeries {
    /// Largest relative gap between the two series.
    pub fn max_relative_gap(&self) -> f64 {
        self.form_norm.iter().zip(&self.jacobi_norm).map(|(a, b)| (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)).fold(0.0, f64::max)
    }

    /// Least-squares slope of `½ ln(norm)` over the final `fraction` of the series.
    pub fn growth_rate(&self, fraction: f64) -> f64 {
        let start = ((1.0 - fraction) * (self.times.len() - 1) as f64).floor() as usize;
        let xs = &self.times[start..];
        let ys: Vec<f64> = self.jacobi_norm[start..].iter().map(|v| 0.5 * v.ln()).collect();
        let nx = xs.len() as f64;
        let (mx, my) = (xs.iter().sum::<f64>() / nx, ys.iter().sum::<f64>() / nx);
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        sxy / sxx
    }
}

/// Phase-space sample with quadrature weight.
#[derive(Debug, Clone)]
pub struct Sample {
    pub point: Vec<f64>,
    pub weight: f64,
}

/// Midpoint samples of `[−half_width, half_width]²` at `n = 1`, as internal slots.
pub fn square_samples(half_width: f64, count: usize) -> Vec<Sample> {
    let h = 2.0 * half_width / count as f64;
    let mut out = Vec::with_capacity(count * count);
    for i in 0..count {
        for j in 0..count {
            out.push(Sample { point: vec![-half_width + (i as f64 + 0.5) * h, -half_width + (j as f64 + 0.5) * h], weight: h * h });
        }
    }
    out
}

struct Compiled {
    flow: Vec<PolyField>,
    hessian_flow: Vec<Vec<PolyField>>,
    /// One-form block of `−i𝓗̃_ferm` as (monomial, dense block).
    block: Vec<(Vec<u32>, DMatrix<C64>)>,
}

impl Compiled {
    fn new(h: &PolyField) -> Result<Self> {
        let n = h.n();
        let flow = hamiltonian_vector(h);
        let hessian_flow = flow.iter().map(|f| (0..2 * n).map(|d| f.deriv(d)).collect()).collect();
        let slots: Vec<usize> = (0..2 * n).map(|a| basis_index(n, &[a + 1])).collect();
        let block = fermionic_part(h)?
            .coefficient_matrices()
            .into_iter()
            .map(|(m, s)| (m, DMatrix::from_fn(2 * n, 2 * n, |r, c| -I * s.get(slots[r], slots[c]))))
            .collect();
        Ok(Self { flow, hessian_flow, block })
    }

    /// Time derivative of `(φ, ψ, δφ)` packed as complex numbers.
    fn rhs(&self, y: &[C64]) -> Vec<C64> {
        let d = self.flow.len();
        let x: Vec<f64> = y[..d].iter().map(|v| v.re).collect();
        let mut out = vec![C64::default(); 3 * d];
        for a in 0..d {
            out[a] = z(self.flow[a].eval_re(&x));
            for b in 0..d {
                out[2 * d + a] += y[2 * d + b] * self.hessian_flow[a][b].eval_re(&x);
            }
        }
        for (m, blk) in &self.block {
            let w: f64 = m.iter().zip(&x).map(|(&e, &v)| v.powi(e as i32)).product();
            for r in 0..d {
                for c in 0..d {
                    out[d + r] += blk[(r, c)] * y[d + c] * w;
                }
            }
        }
        out
    }
}

fn rk4_step(sys: &Compiled, y: &[C64], dt: f64) -> Vec<C64> {
    let add = |a: &[C64], b: &[C64], s: f64| a.iter().zip(b).map(|(x, y)| x + y * s).collect::<Vec<_>>();
    let k1 = sys.rhs(y);
    let k2 = sys.rhs(&add(y, &k1, dt / 2.0));
    let k3 = sys.rhs(&add(y, &k2, dt / 2.0));
    let k4 = sys.rhs(&add(y, &k3, dt));
    (0..y.len()).map(|i| y[i] + (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (dt / 6.0)).collect()
}

/// Evolve a one-form `ψ_a c^a` by the fermionic block along the Hamiltonian
/// flow and, alongside, the Jacobi fields `δφ^a = ω^{ab} ψ_b` they map to.
pub fn jacobi_norm_evolution(
    h: &PolyField,
    samples: &[Sample],
    psi0: impl Fn(&[f64]) -> Vec<C64> + Sync,
    duration: f64,
    steps: usize,
) -> Result<JacobiSeries> {
    if steps == 0 || !(duration >= 0.0) {
        return Err(Error::InvalidParameter("need steps > 0 and duration >= 0".into()));
    }
    let sys = Compiled::new(h)?;
    let n = h.n();
    let d = 2 * n;
    let w = omega_upper(n);
    let dt = duration / steps as f64;
    let per_sample: Vec<Vec<(f64, f64)>> = samples
        .par_iter()
        .map(|s| {
            let psi = psi0(&s.point);
            let mut y: Vec<C64> = s.point.iter().map(|&v| z(v)).collect();
            y.extend(psi.iter().copied());
            y.extend((0..d).map(|a| (0..d).map(|b| psi[b] * w[a][b]).sum::<C64>()));
            let mut series = Vec::with_capacity(steps + 1);
            for k in 0..=steps {
                if k > 0 {
                    y = rk4_step(&sys, &y, dt);
                }
                let f: f64 = y[d..2 * d].iter().map(|v| v.norm_sqr()).sum();
                let j: f64 = y[2 * d..].iter().map(|v| v.norm_sqr()).sum();
                series.push((f * s.weight, j * s.weight));
            }
            series
        })
        .collect();
    if per_sample.iter().flatten().any(|(a, b)| !a.is_finite() || !b.is_finite()) {
        return Err(Error::Numerical("trajectory diverged".into()));
    }
    let times = (0..=steps).map(|k| k as f64 * dt).collect();
    let form_norm = (0..=steps).map(|k| per_sample.iter().map(|s| s[k].0).sum()).collect();
    let jacobi_norm = (0..=steps).map(|k| per_sample.iter().map(|s| s[k].1).sum()).collect();
    Ok(JacobiSeries { times, form_norm, jacobi_norm })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(n: usize, s: &str) -> PolyField {
        PolyField::parse(n, s).unwrap()
    }

    fn approx(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn svh_is_identity() {
        for n in 1..=3 {
            let m = build_metric(MetricKind::Svh, n).unwrap();
            assert!(metric_eigenvalues(&m).iter().all(|&e| (e - 1.0).abs() < 1e-12));
        }
    }

    #[test]
    fn gen_symplectic_eigenvalues() {
        for b in [2.0, 0.5, -1.0, 3.0] {
            let m = build_metric(MetricKind::GenSymplectic { b }, 1).unwrap();
            let mut want = vec![1.0, b, -b, -b * b];
            want.sort_by(f64::total_cmp);
            assert!(approx(&metric_eigenvalues(&m), &want, 1e-10), "b = {b}");
        }
    }

    #[test]
    fn gen_symplectic_minus_one_is_symplectic() {
        let a = build_metric(MetricKind::GenSymplectic { b: -1.0 }, 1).unwrap();
        let b = build_metric(MetricKind::Symplectic, 1).unwrap();
        assert!((a.matrix() - b.matrix()).iter().all(|x| x.norm() < 1e-15));
    }

    #[test]
    fn symplectic_textbook_norms() {
        // ⟨Φ|ψ⟩ = Φ_0^*ψ_0 + i(Φ_q^*ψ_p − Φ_p^*ψ_q) − Φ_2^*ψ_2 with ψ_2 the c^q c^p coefficient
        let m = build_metric(MetricKind::Symplectic, 1).unwrap();
        let basis = textbook_basis();
        let vec_from = |t: [C64; 4]| {
            let mut v = vec![C64::default(); 4];
            for (i, &(idx, s)) in basis.iter().enumerate() {
                v[idx] = t[i] * s;
            }
            v
        };
        let (phi, psi) = ([z(1.0), C64::new(0.0, 2.0), z(-1.0), C64::new(0.5, 0.5)], [z(0.3), z(1.0), C64::new(1.0, -1.0), z(2.0)]);
        let want = phi[0].conj() * psi[0] + I * (phi[1].conj() * psi[2] - phi[2].conj() * psi[1]) - phi[3].conj() * psi[3];
        assert!((m.inner(&vec_from(phi), &vec_from(psi)).unwrap() - want).norm() < 1e-14);
        // two-forms have negative norm, real one-forms zero norm
        assert!((m.norm_sq(&vec_from([C64::default(), C64::default(), C64::default(), z(2.0)])).unwrap() - z(-4.0)).norm() < 1e-14);
        assert!(m.norm_sq(&vec_from([C64::default(), z(1.5), z(-0.7), C64::default()])).unwrap().norm() < 1e-14);
    }

    #[test]
    fn gauge_norm_structure() {
        let m = build_metric(MetricKind::Gauge, 1).unwrap();
        let ev = metric_eigenvalues(&m);
        assert!(approx(&ev, &[-1.0, -1.0, 1.0, 1.0], 1e-12));
        // zero-forms and one-forms have zero norm
        for idx in [0, 1, 2] {
            assert!(m.norm_sq(&MultiformVector::basis(1, idx).into_components()).unwrap().norm() < 1e-15);
        }
        // negative-norm witness: ψ_0 = 1, ψ_2 = −i in the textbook basis
        let basis = textbook_basis();
        let mut v = vec![C64::default(); 4];
        v[basis[0].0] = z(1.0);
        v[basis[3].0] = -I * basis[3].1;
        assert!((m.norm_sq(&v).unwrap() - z(-2.0)).norm() < 1e-15);
        // textbook form: ⟨ψ|ψ⟩ = 2 Im(ψ_2 ψ_0^* + ψ_q^* ψ_p)
        let t = [C64::new(0.3, 1.0), C64::new(-1.0, 0.2), C64::new(0.7, 0.7), C64::new(2.0, -0.4)];
        let mut v = vec![C64::default(); 4];
        for (i, &(idx, s)) in basis.iter().enumerate() {
            v[idx] = t[i] * s;
        }
        let want = 2.0 * (t[3] * t[0].conj() + t[1].conj() * t[2]).im;
        assert!((m.norm_sq(&v).unwrap() - z(want)).norm() < 1e-14);
    }

    #[test]
    fn single_variable_gauge_witness() {
        // one Grassmann variable α, metric (ψ_1, ψ_2) ↦ Φ_1^*ψ_2 + Φ_2^*ψ_1
        let g = DMatrix::from_row_slice(2, 2, &[C64::default(), z(1.0), z(1.0), C64::default()]);
        let psi1 = C64::new(0.8, -0.6);
        let v = nalgebra::DVector::from_vec(vec![psi1, -psi1]);
        let nrm = (v.adjoint() * &g * &v)[(0, 0)];
        assert!((nrm - z(-2.0 * psi1.norm_sqr())).norm() < 1e-14);
    }

    #[test]
    fn hermiticity_verdicts() {
        let osc = poly(1, "p^2/2 + q^2/2");
        let quartic = poly(1, "p^2/2 + q^4");
        let svh = build_metric(MetricKind::Svh, 1).unwrap();
        assert!(hermiticity_report(&osc, &svh).unwrap().hermitian);
        assert!(!hermiticity_report(&quartic, &svh).unwrap().hermitian);
        for kind in [
            MetricKind::Gauge,
            MetricKind::Symplectic,
            MetricKind::GenSymplectic { b: 2.0 },
            MetricKind::GenGaugeA { theta: 0.3, gamma: 0.7, g03: I * C64::from_polar(1.5, -0.3) },
            MetricKind::GenGaugeB { theta: -0.4, b: 1.2, g03: I * C64::from_polar(0.8, 0.4) },
        ] {
            let m = build_metric(kind, 1).unwrap();
            for h in [&osc, &quartic, &poly(1, "p^2/2 + q^3 - q*p^2")] {
                let r = hermiticity_report(h, &m).unwrap();
                assert!(r.hermitian, "{kind:?} {h}: {}", r.residual);
            }
        }
    }

    #[test]
    fn svh_hermitian_iff_unit_m_omega() {
        for (mass, freq) in [(1.0f64, 1.0f64), (2.0, 0.5), (0.25, 4.0), (1.0, 2.0), (2.0, 1.0), (0.5, 0.5)] {
            let h = poly(1, &format!("p^2/(2*{mass}) + {mass}*{freq}^2*q^2/2"));
            let r = hermiticity_report(&h, &build_metric(MetricKind::Svh, 1).unwrap()).unwrap();
            assert_eq!(r.hermitian, (mass * freq - 1.0).abs() < 1e-12, "m = {mass}, ω = {freq}");
        }
    }

    #[test]
    fn svh_failure_tracks_hessian_antisymmetry() {
        // Hermitian iff ω∂∂H is antisymmetric
        for s in ["p^2/2 + q^2/2", "p^2/2 + q^4", "q*p", "p^2 + q^2", "p^2/2 + q^2/2 + q*p"] {
            let h = poly(1, s);
            let hv = hamiltonian_vector(&h);
            let mut antisym = true;
            for a in 0..2 {
                for b in 0..2 {
                    let x = &hv[a].deriv(b) + &hv[b].deriv(a);
                    antisym &= x.is_zero();
                }
            }
            let r = hermiticity_report(&h, &build_metric(MetricKind::Svh, 1).unwrap()).unwrap();
            assert_eq!(r.hermitian, antisym, "{s}");
        }
    }

    #[test]
    fn non_hermitian_parameters_rejected() {
        let bad = MetricKind::GenGaugeA { theta: 0.0, gamma: 0.0, g03: z(1.0) };
        assert!(matches!(build_metric(bad, 1), Err(Error::NonHermitianMetric(_))));
        assert!(matches!(build_metric(MetricKind::Gauge, 2), Err(Error::Unsupported(_))));
    }

    #[test]
    fn symplectic_higher_n_is_hermitian() {
        for n in 2..=3 {
            let m = build_metric(MetricKind::Symplectic, n).unwrap();
            let h = if n == 2 { poly(n, "p1^2/2 + p2^2/2 + q1^4 + q1*q2^2") } else { poly(n, "p1^2/2 + p2^2/2 + p3^2/2 + q1^2*q3 + q2^4") };
            assert!(hermiticity_report(&h, &m).unwrap().hermitian);
            assert!(!hermiticity_report(&h, &build_metric(MetricKind::Svh, n).unwrap()).unwrap().hermitian);
        }
    }

    #[test]
    fn adjoint_of_hermitian_operator_is_itself() {
        let h = poly(1, "p^2/2 + q^4");
        let m = build_metric(MetricKind::Symplectic, 1).unwrap();
        let op = evolution_operator(&h).unwrap();
        assert!(adjoint(&op, &m).unwrap().distance(&op).unwrap() < 1e-12);
    }

    #[test]
    fn nogo_scan_table() {
        let hs: Vec<PolyField> = ["p^2/2 + q^2", "p^2/2 + q^4", "p^2/2 + q^3"].iter().map(|s| poly(1, s)).collect();
        let ms: Vec<MetricSpec> = [MetricKind::Svh, MetricKind::Gauge, MetricKind::Symplectic, MetricKind::GenSymplectic { b: 2.0 }]
            .into_iter()
            .map(|k| build_metric(k, 1).unwrap())
            .collect();
        let t = nogo_scan(&hs, &ms).unwrap();
        assert!(t.confirms_nogo());
        assert!(t.rows[0].positive && !t.rows[0].hermitian_for_all());
        assert!(t.rows[1..].iter().all(|r| r.hermitian_for_all() && !r.positive));
        let harmonic = nogo_scan(&[poly(1, "p^2/2 + q^2/2")], &ms[..1]).unwrap();
        assert!(!harmonic.confirms_nogo());
        assert!(nogo_scan(&hs, &[]).unwrap().rows.is_empty());
    }

    #[test]
    fn physical_patterns() {
        let svh = physical_basis(PhysicalKind::Svh, 2).unwrap();
        assert_eq!(svh.len(), 3);
        assert_eq!(svh[0], MultiformVector::basis(2, 0));
        let q = |i| slot_of(Label::Q(i)) + 1;
        let p = |i| slot_of(Label::P(i)) + 1;
        let two = MultiformVector::from_monomials(2, &[(vec![q(1), p(1)], z(1.0)), (vec![q(2), p(2)], z(1.0))]).unwrap();
        assert_eq!(svh[1], two);
        let sym = physical_basis(PhysicalKind::Symplectic, 2).unwrap();
        assert_eq!(sym.len(), 2);
        // (Σ ξξ*)² = −Σ_{i,j} c^{p_i}c^{q_i}c^{p_j}c^{q_j}
        let four = MultiformVector::from_monomials(2, &[(vec![p(1), q(1), p(2), q(2)], z(-2.0))]).unwrap();
        assert_eq!(sym[1], four);
        assert_eq!(physical_basis(PhysicalKind::Symplectic, 1).unwrap().len(), 1);
    }

    #[test]
    fn physical_two_forms_at_n2() {
        let h = poly(2, "p1^2/2 + p2^2/2 + q1^4 + q2^4 + q1^2*q2 + q1*q2^3");
        let r = physical_subspace_check(&h, 2).unwrap();
        assert_eq!(r.annihilation_residual, 0.0);
        assert_eq!(r.closure_residual, 0.0);
        assert_eq!(r.family_size, 1);
        assert_eq!(r.kernel_dimension, 1);
        assert!(!r.flagged());
        // a separable harmonic potential widens the kernel
        let sep = physical_subspace_check(&poly(2, "p1^2/2 + p2^2/2 + q1^2/2 + q2^2/2"), 2).unwrap();
        assert!(sep.flagged());
    }

    fn gaussian_form(x: &[f64]) -> Vec<C64> {
        let g = (-(x[0] * x[0] + x[1] * x[1]) / 2.0).exp();
        vec![C64::new(g, 0.3 * g * x[0]), z(g * (1.0 + x[1]))]
    }

    #[test]
    fn jacobi_series_agree() {
        let samples = square_samples(5.0, 24);
        for (s, constant) in [("p^2/2 + q^2/2", true), ("p^2/2 + 2*q^2", false), ("p^2/2 - q^2/2", false)] {
            let r = jacobi_norm_evolution(&poly(1, s), &samples, gaussian_form, 3.0, 150).unwrap();
            assert!(r.max_relative_gap() < 1e-9, "{s}: {}", r.max_relative_gap());
            let spread = r.form_norm.iter().fold(0.0f64, |m, v| m.max((v - r.form_norm[0]).abs())) / r.form_norm[0];
            assert_eq!(spread < 1e-8, constant, "{s}: {spread}");
        }
    }

    #[test]
    fn inverted_oscillator_rate_matches_closed_form() {
        // δφ(t) = (cosh t + σ_x sinh t) δφ(0)
        let samples = square_samples(5.0, 16);
        let r = jacobi_norm_evolution(&poly(1, "p^2/2 - q^2/2"), &samples, gaussian_form, 6.0, 600).unwrap();
        let w = omega_upper(1);
        for (k, &t) in r.times.iter().enumerate().step_by(100) {
            let mut exact = 0.0;
            for s in &samples {
                let psi = gaussian_form(&s.point);
                let u: Vec<C64> = (0..2).map(|a| (0..2).map(|b| psi[b] * w[a][b]).sum()).collect();
                let v = [u[0] * t.cosh() + u[1] * t.sinh(), u[1] * t.cosh() + u[0] * t.sinh()];
                exact += s.weight * (v[0].norm_sqr() + v[1].norm_sqr());
            }
            assert!((r.jacobi_norm[k] - exact).abs() / exact < 1e-8);
        }
        assert!((r.growth_rate(0.5) - 1.0).abs() < 0.02);
    }
}
