//! Cartan calculus on phase space as differential operators on the form sector.
//!
//! All operators are [`GradedDiffOp`]s with polynomial coefficients, so
//! identities such as `d² = 0` or `ℒ_h = dι_h + ι_h d` are checked exactly by
//! symbolic composition.

mod diffop;
mod poly;

pub use diffop::{FormField, GradedDiffOp};
pub use poly::{Monomial, PolyField};
pub(crate) use poly::format_coeff;

use crate::grassmann::{basis_monomial, build_c, build_cbar, slot_of, sort_with_sign, Label, SectorOperator};
use crate::{Error, Result, C64, I};
use nalgebra::DMatrix;

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    if n > crate::grassmann::DEFAULT_N_MAX {
        return Err(Error::DimensionTooLarge { n, max: crate::grassmann::DEFAULT_N_MAX });
    }
    Ok(())
}

/// Symplectic matrix `ω^{ab}` on internal slots, with `ω^{q_i p_i} = +1`.
pub fn omega_upper(n: usize) -> Vec<Vec<f64>> {
    let mut w = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 1..=n {
        let (q, p) = (slot_of(Label::Q(i)), slot_of(Label::P(i)));
        w[q][p] = 1.0;
        w[p][q] = -1.0;
    }
    w
}

/// Inverse `ω_{ab}` of [`omega_upper`].
pub fn omega_lower(n: usize) -> Vec<Vec<f64>> {
    // ω² = −1, so ω⁻¹ = −ω
    omega_upper(n).into_iter().map(|r| r.into_iter().map(|x| -x).collect()).collect()
}

/// Hamiltonian vector field `h^a = ω^{ab} ∂_b H`.
pub fn hamiltonian_vector(h: &PolyField) -> Vec<PolyField> {
    let n = h.n();
    let w = omega_upper(n);
    (0..2 * n)
        .map(|a| {
            (0..2 * n)
                .filter(|&b| w[a][b] != 0.0)
                .fold(PolyField::zero(n), |acc, b| &acc + &h.deriv(b).scale(C64::new(w[a][b], 0.0)))
        })
        .collect()
}

fn cs(n: usize) -> Vec<SectorOperator> {
    (1..=2 * n).map(|a| build_c(n, a).expect("validated n")).collect()
}

fn cbars(n: usize) -> Vec<SectorOperator> {
    (1..=2 * n).map(|a| build_cbar(n, a).expect("validated n")).collect()
}

/// `d = Σ_a ĉ^a ∂_a`.
pub fn exterior_derivative(n: usize) -> Result<GradedDiffOp> {
    check_n(n)?;
    let c = cs(n);
    Ok((0..2 * n).fold(GradedDiffOp::zero(n), |acc, a| {
        &acc + &(&GradedDiffOp::sector(c[a].clone()) * &GradedDiffOp::partial(n, a))
    }))
}

/// `ι_V = Σ_a V^a c̄̂_a` with components on internal slots.
pub fn interior_contraction(v: &[PolyField]) -> Result<GradedDiffOp> {
    let n = v.len() / 2;
    if v.is_empty() || v.len() % 2 != 0 || v.iter().any(|c| c.n() != n) {
        return Err(Error::DimensionMismatch(format!("{} vector components", v.len())));
    }
    check_n(n)?;
    let cb = cbars(n);
    Ok((0..2 * n).fold(GradedDiffOp::zero(n), |acc, a| &acc + &GradedDiffOp::poly_sector(&v[a], &cb[a])))
}

/// `ℒ_h = dι_h + ι_h d`, built by composition.
pub fn lie_derivative(h: &PolyField) -> Result<GradedDiffOp> {
    let d = exterior_derivative(h.n())?;
    let iota = interior_contraction(&hamiltonian_vector(h))?;
    d.anticommutator(&iota)
}

/// Liouvillian `L̂ = −i h^a ∂_a` acting as the sector identity.
pub fn liouvillian(h: &PolyField) -> Result<GradedDiffOp> {
    let n = h.n();
    check_n(n)?;
    let hv = hamiltonian_vector(h);
    Ok((0..2 * n).fold(GradedDiffOp::zero(n), |acc, a| {
        &acc + &(&GradedDiffOp::scalar(&hv[a].scale(-I)) * &GradedDiffOp::partial(n, a))
    }))
}

/// Fermionic block `i c̄̂_a ω^{ad} ∂_d∂_b H ĉ^b`.
pub fn fermionic_part(h: &PolyField) -> Result<GradedDiffOp> {
    let n = h.n();
    check_n(n)?;
    let (c, cb, w) = (cs(n), cbars(n), omega_upper(n));
    let mut op = GradedDiffOp::zero(n);
    for a in 0..2 * n {
        for d in 0..2 * n {
            if w[a][d] == 0.0 {
                continue;
            }
            for b in 0..2 * n {
                let coeff = h.deriv(d).deriv(b).scale(C64::new(0.0, w[a][d]));
                if !coeff.is_zero() {
                    op = &op + &GradedDiffOp::poly_sector(&coeff, &cb[a].try_mul(&c[b])?);
                }
            }
        }
    }
    Ok(op)
}

/// Evolution operator `𝓗̃ = L̂ + i c̄̂ ω ∂∂H ĉ`, equal to `−iℒ_h`.
pub fn evolution_operator(h: &PolyField) -> Result<GradedDiffOp> {
    liouvillian(h)?.try_add(&fermionic_part(h)?)
}

/// Hodge star for the flat metric, with orientation `ε = +1` on the public
/// ordering `(q₁, p₁, q₂, p₂, …)`.
pub fn hodge_star(n: usize) -> Result<SectorOperator> {
    check_n(n)?;
    let dim = 1usize << (2 * n);
    // public position of internal index a (1-based): q_i ↦ 2i−1, p_i ↦ 2i
    let public = |a: usize| if a % 2 == 0 { a - 1 } else { a + 1 };
    let mut trip = Vec::with_capacity(dim);
    for col in 0..dim {
        let inc = basis_monomial(n, col);
        let rest: Vec<usize> = (1..=2 * n).filter(|a| !inc.contains(a)).collect();
        let seq: Vec<usize> = inc.iter().chain(&rest).map(|&a| public(a)).collect();
        let (_, sign) = sort_with_sign(&seq).expect("distinct indices");
        let row = crate::grassmann::basis_index(n, &rest);
        trip.push((row, col, C64::new(sign, 0.0)));
    }
    SectorOperator::from_triplets(n, trip)
}

/// `δ = −Σ_a c̄̂_a ∂_a`.
pub fn codifferential(n: usize) -> Result<GradedDiffOp> {
    check_n(n)?;
    let cb = cbars(n);
    Ok((0..2 * n).fold(GradedDiffOp::zero(n), |acc, a| {
        &acc - &(&GradedDiffOp::sector(cb[a].clone()) * &GradedDiffOp::partial(n, a))
    }))
}

/// `Δ = dδ + δd`.
pub fn laplacian(n: usize) -> Result<GradedDiffOp> {
    exterior_derivative(n)?.anticommutator(&codifferential(n)?)
}

/// Symmetry charges of the path-integral formulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChargeName {
    Q,
    Qbar,
    K,
    Kbar,
    Qf,
    N,
    Nbar,
    QH,
    QHbar,
}

impl ChargeName {
    pub const ALL: [ChargeName; 9] = [
        ChargeName::Q,
        ChargeName::Qbar,
        ChargeName::K,
        ChargeName::Kbar,
        ChargeName::Qf,
        ChargeName::N,
        ChargeName::Nbar,
        ChargeName::QH,
        ChargeName::QHbar,
    ];

    pub fn needs_hamiltonian(self) -> bool {
        matches!(self, ChargeName::N | ChargeName::Nbar | ChargeName::QH | ChargeName::QHbar)
    }
}

/// Charge as an operator, with `λ_a → −i∂_a`:
///
/// * `Q = ĉ^a∂_a`, `Q̄ = c̄̂_a ω^{ab} ∂_b`, `Q_f = ĉ^a c̄̂_a`
/// * `K = ½ω_{ab} ĉ^a ĉ^b`, `K̄ = ½ω^{ab} c̄̂_a c̄̂_b`
/// * `N = ĉ^a ∂_aH`, `N̄ = c̄̂_a ω^{ab}∂_bH`, `Q_H = Q − βN`, `Q̄_H = Q̄ + βN̄`
///
/// `h` is required for the Hamiltonian-dependent charges, `beta` for `QH`/`QHbar`.
pub fn charge(name: ChargeName, n: usize, h: Option<&PolyField>, beta: Option<f64>) -> Result<GradedDiffOp> {
    if name.needs_hamiltonian() && h.is_none() {
        return Err(Error::MissingParameter("Hamiltonian"));
    }
    if matches!(name, ChargeName::QH | ChargeName::QHbar) && beta.is_none() {
        return Err(Error::MissingParameter("beta"));
    }
    if let Some(h) = h {
        if h.n() != n {
            return Err(Error::DimensionMismatch(format!("Hamiltonian over n = {} for n = {n}", h.n())));
        }
    }
    check_n(n)?;
    let (c, cb) = (cs(n), cbars(n));
    let (wu, wl) = (omega_upper(n), omega_lower(n));
    let half = C64::new(0.5, 0.0);
    let sum_sector = |f: &dyn Fn(usize, usize) -> Option<SectorOperator>| -> Result<GradedDiffOp> {
        let mut s = SectorOperator::zeros(n);
        for a in 0..2 * n {
            for b in 0..2 * n {
                if let Some(m) = f(a, b) {
                    s = s.try_add(&m)?;
                }
            }
        }
        Ok(GradedDiffOp::sector(s))
    };
    let nn = |h: &PolyField| -> GradedDiffOp {
        (0..2 * n).fold(GradedDiffOp::zero(n), |acc, a| &acc + &GradedDiffOp::poly_sector(&h.deriv(a), &c[a]))
    };
    let nbar = |h: &PolyField| -> GradedDiffOp {
        let hv = hamiltonian_vector(h);
        (0..2 * n).fold(GradedDiffOp::zero(n), |acc, a| &acc + &GradedDiffOp::poly_sector(&hv[a], &cb[a]))
    };
    match name {
        ChargeName::Q => exterior_derivative(n),
        ChargeName::Qbar => {
            let mut op = GradedDiffOp::zero(n);
            for a in 0..2 * n {
                for b in 0..2 * n {
                    if wu[a][b] != 0.0 {
                        let t = &GradedDiffOp::sector(cb[a].scale(C64::new(wu[a][b], 0.0))) * &GradedDiffOp::partial(n, b);
                        op = &op + &t;
                    }
                }
            }
            Ok(op)
        }
        ChargeName::Qf => sum_sector(&|a, b| (a == b).then(|| &c[a] * &cb[a])),
        ChargeName::K => sum_sector(&|a, b| (wl[a][b] != 0.0).then(|| (&c[a] * &c[b]).scale(half * wl[a][b]))),
        ChargeName::Kbar => sum_sector(&|a, b| (wu[a][b] != 0.0).then(|| (&cb[a] * &cb[b]).scale(half * wu[a][b]))),
        ChargeName::N => Ok(nn(h.unwrap())),
        ChargeName::Nbar => Ok(nbar(h.unwrap())),
        ChargeName::QH => exterior_derivative(n)?.try_sub(&nn(h.unwrap()).scale(C64::new(beta.unwrap(), 0.0))),
        ChargeName::QHbar => {
            charge(ChargeName::Qbar, n, None, None)?.try_add(&nbar(h.unwrap()).scale(C64::new(beta.unwrap(), 0.0)))
        }
    }
}

/// Named identity with its coefficient-wise residual.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub name: String,
    pub residual: f64,
}

impl IdentityCheck {
    pub fn passes(&self, tol: f64) -> bool {
        self.residual <= tol
    }
}

fn check(name: impl Into<String>, lhs: &GradedDiffOp, rhs: &GradedDiffOp) -> Result<IdentityCheck> {
    Ok(IdentityCheck { name: name.into(), residual: lhs.distance(rhs)? })
}

/// The twelve relations of the charge superalgebra. At `n > 1` the central
/// term of `[K, K̄]` is the measured constant from [`k_kbar_central_constant`].
pub fn charge_algebra_checks(n: usize) -> Result<Vec<IdentityCheck>> {
    use ChargeName::*;
    let g = |c| charge(c, n, None, None);
    let (q, qb, k, kb, qf) = (g(Q)?, g(Qbar)?, g(K)?, g(Kbar)?, g(Qf)?);
    let zero = GradedDiffOp::zero(n);
    let id = GradedDiffOp::identity(n);
    let central = k_kbar_central_constant(n)?;
    let two = C64::new(2.0, 0.0);
    Ok(vec![
        check("[Q,Q]+ = 0", &q.anticommutator(&q)?, &zero)?,
        check("[Qbar,Qbar]+ = 0", &qb.anticommutator(&qb)?, &zero)?,
        check("[Q,Qbar]+ = 0", &q.anticommutator(&qb)?, &zero)?,
        check("[Qf,K]- = 2K", &qf.commutator(&k)?, &k.scale(two))?,
        check("[Qf,Kbar]- = -2Kbar", &qf.commutator(&kb)?, &kb.scale(-two))?,
        check(
            format!("[K,Kbar]- = Qf - {central}"),
            &k.commutator(&kb)?,
            &qf.try_sub(&id.scale(C64::new(central, 0.0)))?,
        )?,
        check("[Qf,Q]- = Q", &qf.commutator(&q)?, &q)?,
        check("[Qf,Qbar]- = -Qbar", &qf.commutator(&qb)?, &-&qb)?,
        check("[K,Q]- = 0", &k.commutator(&q)?, &zero)?,
        check("[K,Qbar]- = Q", &k.commutator(&qb)?, &q)?,
        check("[Kbar,Q]- = Qbar", &kb.commutator(&q)?, &qb)?,
        check("[Kbar,Qbar]- = 0", &kb.commutator(&qb)?, &zero)?,
    ])
}

/// Supersymmetry relations for a Hamiltonian: `[Q_H, Q̄_H]₊ = 2iβ𝓗̃` and
/// conservation of `Q`, `Q̄`, `Q_H`, `Q̄_H` under `𝓗̃`.
pub fn susy_checks(h: &PolyField, beta: f64) -> Result<Vec<IdentityCheck>> {
    use ChargeName::*;
    let n = h.n();
    let ham = evolution_operator(h)?;
    let qh = charge(QH, n, Some(h), Some(beta))?;
    let qhb = charge(QHbar, n, Some(h), Some(beta))?;
    let zero = GradedDiffOp::zero(n);
    let mut out = vec![check("[QH,QHbar]+ = 2i beta Htilde", &qh.anticommutator(&qhb)?, &ham.scale(C64::new(0.0, 2.0 * beta)))?];
    for (name, c) in [("Q", charge(Q, n, None, None)?), ("Qbar", charge(Qbar, n, None, None)?), ("QH", qh), ("QHbar", qhb)] {
        out.push(check(format!("[{name},Htilde]- = 0"), &c.commutator(&ham)?, &zero)?);
    }
    Ok(out)
}

/// Measured constant `c` in `[K, K̄]₋ = Q_f − c·1`. Errors if the difference
/// is not a multiple of the identity.
pub fn k_kbar_central_constant(n: usize) -> Result<f64> {
    use ChargeName::*;
    let kk = charge(K, n, None, None)?.commutator(&charge(Kbar, n, None, None)?)?;
    let diff = charge(Qf, n, None, None)?.try_sub(&kk)?;
    let s = diff.evaluate(&vec![0.0; 2 * n])?;
    let c = s.get(0, 0);
    let resid = (&s - &SectorOperator::identity(n).scale(c)).max_abs();
    if resid > 1e-12 || c.im.abs() > 1e-12 {
        return Err(Error::Numerical(format!("[K,Kbar] - Qf is not central (residual {resid:e})")));
    }
    Ok(c.re)
}

/// The real 4×4 irreducible representation of the charge superalgebra at
/// `𝓗 = h·1`.
#[derive(Debug, Clone)]
pub struct IrrepSet {
    pub q: DMatrix<f64>,
    pub qbar: DMatrix<f64>,
    pub i_n: DMatrix<f64>,
    pub minus_i_nbar: DMatrix<f64>,
    pub ham: DMatrix<f64>,
    pub qf: DMatrix<f64>,
    pub k: DMatrix<f64>,
    pub kbar: DMatrix<f64>,
}

impl IrrepSet {
    pub fn all(&self) -> [&DMatrix<f64>; 8] {
        [&self.q, &self.qbar, &self.i_n, &self.minus_i_nbar, &self.ham, &self.qf, &self.k, &self.kbar]
    }
}

pub fn irrep_matrices(h: f64) -> Result<IrrepSet> {
    if h.is_nan() || h <= 0.0 {
        return Err(Error::InvalidParameter(format!("irrep needs h > 0, got {h}")));
    }
    let s = h.sqrt();
    let m = |entries: &[(usize, usize, f64)]| {
        let mut x = DMatrix::zeros(4, 4);
        for &(r, c, v) in entries {
            x[(r - 1, c - 1)] = v;
        }
        x
    };
    Ok(IrrepSet {
        q: m(&[(3, 1, s), (4, 2, s)]),
        qbar: m(&[(1, 2, s), (3, 4, -s)]),
        i_n: m(&[(2, 1, s), (4, 3, -s)]),
        minus_i_nbar: m(&[(1, 3, s), (2, 4, s)]),
        ham: DMatrix::identity(4, 4) * h,
        qf: m(&[(2, 2, 1.0), (3, 3, 1.0), (4, 4, 2.0)]),
        k: m(&[(4, 1, 1.0)]),
        kbar: m(&[(1, 4, 1.0)]),
    })
}

/// Dimension of the space of matrices commuting with every member of `set`.
pub fn commutant_dimension(set: &[&DMatrix<f64>]) -> usize {
    let Some(first) = set.first() else { return 0 };
    let d = first.nrows();
    let mut sys = DMatrix::<f64>::zeros(set.len() * d * d, d * d);
    for (k, m) in set.iter().enumerate() {
        // (XM − MX)_{ij} = Σ_l X_{il} M_{lj} − M_{il} X_{lj}; unknown X_{rc} at r*d + c
        for i in 0..d {
            for j in 0..d {
                let row = k * d * d + i * d + j;
                for l in 0..d {
                    sys[(row, i * d + l)] += m[(l, j)];
                    sys[(row, l * d + j)] -= m[(i, l)];
                }
            }
        }
    }
    let sv = sys.svd(false, false).singular_values;
    let rank = sv.iter().filter(|&&x| x > 1e-10).count();
    d * d - rank
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(n: usize, s: &str) -> PolyField {
        PolyField::parse(n, s).unwrap()
    }

    fn one() -> C64 {
        C64::new(1.0, 0.0)
    }

    #[test]
    fn d_on_zero_form_and_top_form() {
        let d = exterior_derivative(1).unwrap();
        let psi = poly(1, "q^2*p + 3*p");
        let out = d.apply(&FormField::single(1, 0, psi.clone())).unwrap();
        let dq = psi.deriv(slot_of(Label::Q(1)));
        let dp = psi.deriv(slot_of(Label::P(1)));
        assert_eq!(out.comps(), &[PolyField::zero(1), dq, dp, PolyField::zero(1)]);
        let top = FormField::single(2, 15, poly(2, "q1*p2^3"));
        assert!(exterior_derivative(2).unwrap().apply(&top).unwrap().is_zero());
    }

    #[test]
    fn nilpotency() {
        for n in 1..=3 {
            let d = exterior_derivative(n).unwrap();
            assert!((&d * &d).is_zero(0.0));
            let del = codifferential(n).unwrap();
            assert!((&del * &del).is_zero(0.0));
            let v: Vec<PolyField> = (0..2 * n).map(|a| PolyField::var(n, (a + 1) % (2 * n)).pow(2)).collect();
            let iota = interior_contraction(&v).unwrap();
            assert!((&iota * &iota).is_zero(0.0));
        }
    }

    #[test]
    fn contraction_pattern_n1() {
        // constant V: (1,2)=V^q, (1,3)=V^p, (2,4)=V^p, (3,4)=−V^q
        let v = vec![PolyField::real(1, 5.0), PolyField::real(1, 3.0)]; // slots p, q
        let iota = interior_contraction(&v).unwrap().evaluate(&[0.0, 0.0]).unwrap();
        assert_eq!(iota.get(0, 1), C64::new(3.0, 0.0));
        assert_eq!(iota.get(0, 2), C64::new(5.0, 0.0));
        assert_eq!(iota.get(1, 3), C64::new(5.0, 0.0));
        assert_eq!(iota.get(2, 3), C64::new(-3.0, 0.0));
        assert_eq!(iota.nnz(), 4);
        let zero_form = FormField::single(1, 0, poly(1, "q*p"));
        assert!(interior_contraction(&v).unwrap().apply(&zero_form).unwrap().is_zero());
        assert!(interior_contraction(&v[..1]).is_err());
    }

    #[test]
    fn hamiltonian_contraction_free_particle() {
        // h = (∂_pH, −∂_qH) = (p, 0) in (q, p) components
        let hv = hamiltonian_vector(&poly(1, "p^2/2"));
        assert_eq!(hv[slot_of(Label::Q(1))], poly(1, "p"));
        assert!(hv[slot_of(Label::P(1))].is_zero());
    }

    #[test]
    fn lie_derivative_is_i_times_evolution() {
        for s in ["p^2/2", "p^2/2 + q^2", "p^2/2 + q^3", "p^2/2 + q^4 + q*p"] {
            let h = poly(1, s);
            let l = lie_derivative(&h).unwrap();
            let ht = evolution_operator(&h).unwrap();
            assert!(l.distance(&ht.scale(I)).unwrap() < 1e-12, "{s}");
        }
        let h2 = poly(2, "p1^2/2 + p2^2/2 + q1^2*q2 + q2^4");
        assert!(lie_derivative(&h2).unwrap().distance(&evolution_operator(&h2).unwrap().scale(I)).unwrap() < 1e-12);
        assert!(lie_derivative(&PolyField::real(1, 4.0)).unwrap().is_zero(0.0));
    }

    #[test]
    fn free_particle_fermionic_block() {
        let f = fermionic_part(&poly(1, "p^2/2")).unwrap().evaluate(&[0.0, 0.0]).unwrap();
        // only psi_q -> psi_p coupling (row 3, col 2 in 1-based)
        assert_eq!(f.nnz(), 1);
        assert_eq!(f.get(2, 1), C64::new(0.0, -1.0));
    }

    #[test]
    fn evolution_matrix_matches_table() {
        let h = poly(1, "p^3 + q^2*p + q^3");
        let f = fermionic_part(&h).unwrap();
        let pt = [0.7, -1.3]; // (p, q)
        let m = f.evaluate(&pt).unwrap();
        let d2 = |a: Label, b: Label| h.deriv(slot_of(a)).deriv(slot_of(b)).eval(&pt);
        let (q, p) = (Label::Q(1), Label::P(1));
        let expect = [
            (1, 1, -I * d2(q, p)),
            (1, 2, I * d2(q, q)),
            (2, 1, -I * d2(p, p)),
            (2, 2, I * d2(p, q)),
        ];
        for (r, c, v) in expect {
            assert!((m.get(r, c) - v).norm() < 1e-12);
        }
        assert_eq!(m.get(0, 0), C64::default());
        assert_eq!(m.get(3, 3), C64::default());
    }

    #[test]
    fn lie_derivative_on_one_form_components() {
        // (ℒ_h C)_d = h^a ∂_a C_d + ∂_d h^a C_a, checked for H = p²/2 + V(q), V cubic
        let h = poly(1, "p^2/2 + q^3 - 2*q^2 + q");
        let l = lie_derivative(&h).unwrap();
        let c_q = poly(1, "q*p^2 + 1");
        let c_p = poly(1, "q^3 - p");
        let mut comps = vec![PolyField::zero(1); 4];
        comps[1] = c_q.clone();
        comps[2] = c_p.clone();
        let out = l.apply(&FormField::new(1, comps).unwrap()).unwrap();
        let hv = hamiltonian_vector(&h);
        let c = [c_p, c_q]; // slots
        for (idx, slot) in [(1usize, 1usize), (2, 0)] {
            let mut expect = PolyField::zero(1);
            for a in 0..2 {
                expect = &expect + &(&hv[a] * &c[slot].deriv(a));
                expect = &expect + &(&hv[a].deriv(slot) * &c[a]);
            }
            assert_eq!(out.comps()[idx], expect);
        }
    }

    #[test]
    fn hodge_star_n1_table() {
        let s = hodge_star(1).unwrap();
        let expect = [(0, 3, -1.0), (1, 2, -1.0), (2, 1, 1.0), (3, 0, -1.0)];
        assert_eq!(s.nnz(), 4);
        for (r, c, v) in expect {
            assert_eq!(s.get(r, c), C64::new(v, 0.0));
        }
        let ss = &s * &s;
        let diag: Vec<f64> = (0..4).map(|i| ss.get(i, i).re).collect();
        assert_eq!(diag, vec![1.0, -1.0, -1.0, 1.0]);
    }

    #[test]
    fn hodge_square_grading() {
        for n in 1..=3 {
            let s = hodge_star(n).unwrap();
            let ss = &s * &s;
            for i in 0..s.dim() {
                let p = i.count_ones() as usize;
                let sign = if (p * (2 * n - p)) % 2 == 0 { 1.0 } else { -1.0 };
                assert_eq!(ss.get(i, i), C64::new(sign, 0.0));
            }
            assert_eq!(ss.nnz(), s.dim());
        }
    }

    #[test]
    fn codifferential_from_star() {
        for n in 1..=3 {
            let s = hodge_star(n).unwrap();
            let via_star = -&exterior_derivative(n).unwrap().sandwich(&s, &s).unwrap();
            assert!(via_star.distance(&codifferential(n).unwrap()).unwrap() < 1e-12);
        }
    }

    #[test]
    fn laplacian_is_minus_sum_of_second_derivatives() {
        for n in 1..=2 {
            let mut expect = GradedDiffOp::zero(n);
            for a in 0..2 * n {
                let d = GradedDiffOp::partial(n, a);
                expect = &expect - &(&d * &d);
            }
            assert_eq!(laplacian(n).unwrap(), expect);
        }
    }

    #[test]
    fn charges_match_tables_n1() {
        use ChargeName::*;
        let qf = charge(Qf, 1, None, None).unwrap().evaluate(&[0.0; 2]).unwrap();
        assert_eq!(qf, SectorOperator::diagonal(1, &[0.0, 1.0, 1.0, 2.0].map(|x| C64::new(x, 0.0))));
        let k = charge(K, 1, None, None).unwrap().evaluate(&[0.0; 2]).unwrap();
        assert_eq!(k, SectorOperator::from_triplets(1, [(3, 0, one())]).unwrap());
        let kb = charge(Kbar, 1, None, None).unwrap().evaluate(&[0.0; 2]).unwrap();
        assert_eq!(kb, SectorOperator::from_triplets(1, [(0, 3, one())]).unwrap());
        assert_eq!(charge(Q, 1, None, None).unwrap(), exterior_derivative(1).unwrap());
        assert!(charge(QH, 1, None, Some(1.0)).is_err());
        assert!(charge(QH, 1, Some(&poly(1, "q")), None).is_err());
        assert!(charge(N, 2, Some(&poly(1, "q")), None).is_err());
        // Qbar row 1 = (0, ∂_p, −∂_q, 0)
        let qb = charge(Qbar, 1, None, None).unwrap();
        let f = FormField::new(1, vec![PolyField::zero(1), poly(1, "p^2"), poly(1, "q^2"), PolyField::zero(1)]).unwrap();
        assert_eq!(qb.apply(&f).unwrap().comps()[0], poly(1, "2*p - 2*q"));
    }

    #[test]
    fn charge_algebra_n1_n2() {
        for n in 1..=2 {
            for c in charge_algebra_checks(n).unwrap() {
                assert!(c.passes(1e-12), "n={n}: {} residual {}", c.name, c.residual);
            }
        }
        assert_eq!(k_kbar_central_constant(1).unwrap(), 1.0);
        assert_eq!(k_kbar_central_constant(2).unwrap(), 2.0);
    }

    #[test]
    fn supersymmetry_and_conservation() {
        for s in ["p^2/2 + q^2", "p^2/2 + q^4 - q^3", "p^3 + q*p"] {
            for c in susy_checks(&poly(1, s), 1.0).unwrap() {
                assert!(c.passes(1e-12), "{s}: {} residual {}", c.name, c.residual);
            }
        }
        for c in susy_checks(&poly(2, "p1^2/2 + p2^2/2 + q1*q2^2"), 0.5).unwrap() {
            assert!(c.passes(1e-12), "{}", c.name);
        }
    }

    #[test]
    fn form_number_grading() {
        use ChargeName::*;
        for n in 1..=2 {
            let qf = charge(Qf, n, None, None).unwrap();
            let d = exterior_derivative(n).unwrap();
            let del = codifferential(n).unwrap();
            assert_eq!(qf.commutator(&d).unwrap(), d);
            assert_eq!(qf.commutator(&del).unwrap(), -&del);
        }
    }

    #[test]
    fn graded_commutator_reads_parity() {
        let d = exterior_derivative(1).unwrap();
        let k = charge(ChargeName::K, 1, None, None).unwrap();
        assert!(d.graded_commutator(&d).unwrap().is_zero(0.0));
        let qf = charge(ChargeName::Qf, 1, None, None).unwrap();
        assert_eq!(qf.graded_commutator(&k).unwrap(), k.scale(C64::new(2.0, 0.0)));
        let mixed = &d + &k;
        assert!(mixed.graded_commutator(&d).is_err());
    }

    #[test]
    fn irreducible_representation() {
        let set = irrep_matrices(1.0).unwrap();
        assert_eq!(set.q[(2, 0)], 1.0);
        assert_eq!(set.q[(3, 1)], 1.0);
        let h = 4.0;
        let s = irrep_matrices(h).unwrap();
        let ac = |a: &DMatrix<f64>, b: &DMatrix<f64>| a * b + b * a;
        let id = DMatrix::<f64>::identity(4, 4) * h;
        assert_eq!(ac(&s.q, &s.minus_i_nbar), id);
        assert_eq!(ac(&s.qbar, &s.i_n), id);
        let odd = [&s.q, &s.qbar, &s.i_n, &s.minus_i_nbar];
        for (i, a) in odd.iter().enumerate() {
            for (j, b) in odd.iter().enumerate() {
                if (i, j) != (0, 3) && (i, j) != (3, 0) && (i, j) != (1, 2) && (i, j) != (2, 1) {
                    assert_eq!(ac(a, b), DMatrix::zeros(4, 4), "{i} {j}");
                }
            }
        }
        assert_eq!(commutant_dimension(&s.all()), 1);
        assert!(irrep_matrices(0.0).is_err());
    }
}
