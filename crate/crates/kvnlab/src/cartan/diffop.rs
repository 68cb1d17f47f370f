//! Differential operators with sector-matrix and polynomial coefficients.

use super::poly::{Monomial, PolyField};
use crate::grassmann::SectorOperator;
use crate::{Error, Result, C64};
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// `Σ S_{m,α} φ^m ∂^α`: one sector matrix per (coefficient monomial,
/// derivative multi-index) pair. This is a canonical form, so equality of
/// operators is equality of term maps.
#[derive(Clone, PartialEq)]
pub struct GradedDiffOp {
    n: usize,
    terms: BTreeMap<(Monomial, Monomial), SectorOperator>,
}

impl fmt::Debug for GradedDiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "GradedDiffOp(n={}) {{", self.n)?;
        for ((m, d), s) in &self.terms {
            writeln!(f, "  phi^{m:?} d^{d:?}: {s:?}")?;
        }
        write!(f, "}}")
    }
}

fn falling(m: u32, k: u32) -> f64 {
    (0..k).map(|j| (m - j) as f64).product()
}

fn binom(a: u32, b: u32) -> f64 {
    falling(a, b) / falling(b, b)
}

/// All multi-indices `β ≤ α`.
fn sub_indices(alpha: &[u32]) -> Vec<Monomial> {
    let mut out = vec![Vec::new()];
    for &a in alpha {
        out = out
            .into_iter()
            .flat_map(|pre: Monomial| {
                (0..=a).map(move |b| {
                    let mut v = pre.clone();
                    v.push(b);
                    v
                })
            })
            .collect();
    }
    out
}

impl GradedDiffOp {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self::sector(SectorOperator::identity(n))
    }

    /// Constant sector matrix, no derivatives.
    pub fn sector(s: SectorOperator) -> Self {
        let n = s.n();
        let mut op = Self::zero(n);
        op.add_term(vec![0; 2 * n], vec![0; 2 * n], s);
        op
    }

    /// `Σ_m c_m φ^m · S`.
    pub fn poly_sector(p: &PolyField, s: &SectorOperator) -> Self {
        let n = s.n();
        let mut op = Self::zero(n);
        for (m, c) in p.terms() {
            op.add_term(m.clone(), vec![0; 2 * n], s.scale(*c));
        }
        op
    }

    /// Multiplication by a polynomial (times the sector identity).
    pub fn scalar(p: &PolyField) -> Self {
        Self::poly_sector(p, &SectorOperator::identity(p.n()))
    }

    /// `∂/∂φ^{slot}` (times the sector identity).
    pub fn partial(n: usize, slot: usize) -> Self {
        let mut d = vec![0; 2 * n];
        d[slot] = 1;
        let mut op = Self::zero(n);
        op.add_term(vec![0; 2 * n], d, SectorOperator::identity(n));
        op
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// `(coefficient monomial, derivative multi-index, sector matrix)`.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Monomial, &SectorOperator)> {
        self.terms.iter().map(|((m, d), s)| (m, d, s))
    }

    pub fn add_term(&mut self, mono: Monomial, deriv: Monomial, s: SectorOperator) {
        if s.nnz() == 0 {
            return;
        }
        match self.terms.entry((mono, deriv)) {
            Entry::Occupied(mut o) => {
                let sum = o.get() + &s;
                if sum.nnz() == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
            Entry::Vacant(v) => {
                v.insert(s);
            }
        }
    }

    fn check(&self, o: &Self) -> Result<()> {
        if self.n != o.n {
            return Err(Error::DimensionMismatch(format!("operators over n = {} and n = {}", self.n, o.n)));
        }
        Ok(())
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let mut out = self.clone();
        for ((m, d), s) in &o.terms {
            out.add_term(m.clone(), d.clone(), s.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self> {
        self.try_add(&o.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut out = Self::zero(self.n);
        for ((m, d), s) in &self.terms {
            out.add_term(m.clone(), d.clone(), s.scale(c));
        }
        out
    }

    /// Operator composition `self ∘ o`, with derivatives of `self` acting on
    /// the coefficients of `o` by the Leibniz rule.
    pub fn compose(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let mut out = Self::zero(self.n);
        for ((ma, da), sa) in &self.terms {
            for ((mb, db), sb) in &o.terms {
                let prod = sa.try_mul(sb)?;
                if prod.nnz() == 0 {
                    continue;
                }
                for beta in sub_indices(da) {
                    let mut coeff = 1.0;
                    for k in 0..beta.len() {
                        coeff *= binom(da[k], beta[k]) * if beta[k] > mb[k] { 0.0 } else { falling(mb[k], beta[k]) };
                    }
                    if coeff == 0.0 {
                        continue;
                    }
                    let mono = (0..ma.len()).map(|k| ma[k] + mb[k] - beta[k]).collect();
                    let deriv = (0..da.len()).map(|k| da[k] - beta[k] + db[k]).collect();
                    out.add_term(mono, deriv, prod.scale(C64::new(coeff, 0.0)));
                }
            }
        }
        Ok(out)
    }

    /// `AB − BA`.
    pub fn commutator(&self, o: &Self) -> Result<Self> {
        self.compose(o)?.try_sub(&o.compose(self)?)
    }

    /// `AB + BA`.
    pub fn anticommutator(&self, o: &Self) -> Result<Self> {
        self.compose(o)?.try_add(&o.compose(self)?)
    }

    /// Graded commutator: anticommutator iff both operators are Grassmann-odd.
    pub fn graded_commutator(&self, o: &Self) -> Result<Self> {
        match (self.parity(), o.parity()) {
            (Some(true), Some(true)) => self.anticommutator(o),
            (Some(_), Some(_)) => self.commutator(o),
            _ => Err(Error::InvalidParameter("operator without definite Grassmann parity".into())),
        }
    }

    /// Grassmann parity read from the sector parts (`None` if mixed).
    pub fn parity(&self) -> Option<bool> {
        let mut parity = None;
        for s in self.terms.values() {
            let p = s.parity()?;
            if s.nnz() == 0 {
                continue;
            }
            match parity {
                None => parity = Some(p),
                Some(q) if q != p => return None,
                _ => {}
            }
        }
        Some(parity.unwrap_or(false))
    }

    /// Largest coefficient modulus over all terms.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(SectorOperator::max_abs).fold(0.0, f64::max)
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.max_abs() <= tol
    }

    /// Max coefficient-wise distance to another operator.
    pub fn distance(&self, o: &Self) -> Result<f64> {
        Ok(self.try_sub(o)?.max_abs())
    }

    pub fn has_derivatives(&self) -> bool {
        self.terms.keys().any(|(_, d)| d.iter().any(|&k| k > 0))
    }

    /// Terms without derivatives.
    pub fn multiplicative_part(&self) -> Self {
        self.filter(|d| d.iter().all(|&k| k == 0))
    }

    /// Terms with at least one derivative.
    pub fn derivative_part(&self) -> Self {
        self.filter(|d| d.iter().any(|&k| k > 0))
    }

    fn filter(&self, keep: impl Fn(&Monomial) -> bool) -> Self {
        Self { n: self.n, terms: self.terms.iter().filter(|((_, d), _)| keep(d)).map(|(k, v)| (k.clone(), v.clone())).collect() }
    }

    /// Numeric sector matrix of a derivative-free operator at a phase-space point.
    pub fn evaluate(&self, point: &[f64]) -> Result<SectorOperator> {
        if self.has_derivatives() {
            return Err(Error::InvalidParameter("operator contains derivatives".into()));
        }
        let mut out = SectorOperator::zeros(self.n);
        for ((m, _), s) in &self.terms {
            let w: f64 = m.iter().zip(point).map(|(&e, &x)| x.powi(e as i32)).product();
            out = &out + &s.scale(C64::new(w, 0.0));
        }
        Ok(out)
    }

    /// Sector matrices of the derivative-free part, one per coefficient monomial.
    pub fn coefficient_matrices(&self) -> Vec<(Monomial, SectorOperator)> {
        self.terms.iter().filter(|((_, d), _)| d.iter().all(|&k| k == 0)).map(|((m, _), s)| (m.clone(), s.clone())).collect()
    }

    /// Formal `L²` adjoint: sector conjugate-transpose, `∂ → −∂` moved to the
    /// left through the coefficient (boundary terms dropped).
    pub fn formal_adjoint(&self) -> Self {
        let mut out = Self::zero(self.n);
        for ((m, d), s) in &self.terms {
            // (S φ^m ∂^α)^* = (−1)^{|α|} ∂^α ∘ φ^m S†
            let order: u32 = d.iter().sum();
            let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
            let sd = s.adjoint();
            for beta in sub_indices(d) {
                let mut coeff = sign;
                for k in 0..beta.len() {
                    coeff *= binom(d[k], beta[k]) * if beta[k] > m[k] { 0.0 } else { falling(m[k], beta[k]) };
                }
                if coeff == 0.0 {
                    continue;
                }
                let mono = (0..m.len()).map(|k| m[k] - beta[k]).collect();
                let deriv = (0..d.len()).map(|k| d[k] - beta[k]).collect();
                out.add_term(mono, deriv, sd.scale(C64::new(coeff, 0.0)));
            }
        }
        out
    }

    /// Conjugate by constant sector matrices: `L · self · R`.
    pub fn sandwich(&self, left: &SectorOperator, right: &SectorOperator) -> Result<Self> {
        let mut out = Self::zero(self.n);
        for ((m, d), s) in &self.terms {
            out.add_term(m.clone(), d.clone(), left.try_mul(s)?.try_mul(right)?);
        }
        Ok(out)
    }

    /// Apply to a sector vector of polynomials.
    pub fn apply(&self, v: &FormField) -> Result<FormField> {
        if v.n != self.n {
            return Err(Error::DimensionMismatch("form field and operator differ in n".into()));
        }
        let mut out = FormField::zero(self.n);
        for ((m, d), s) in &self.terms {
            let mono = PolyField::monomial(self.n, m.clone(), C64::new(1.0, 0.0));
            for (r, c, a) in s.entries() {
                let term = (&mono * &v.comps[c].deriv_multi(d)).scale(a);
                out.comps[r] = &out.comps[r] + &term;
            }
        }
        Ok(out)
    }
}

macro_rules! binop {
    ($tr:ident, $f:ident, $imp:ident) => {
        impl $tr<&GradedDiffOp> for &GradedDiffOp {
            type Output = GradedDiffOp;
            fn $f(self, rhs: &GradedDiffOp) -> GradedDiffOp {
                self.$imp(rhs).expect("operators with different n")
            }
        }
    };
}
binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, compose);

impl Neg for &GradedDiffOp {
    type Output = GradedDiffOp;
    fn neg(self) -> GradedDiffOp {
        self.scale(C64::new(-1.0, 0.0))
    }
}

/// Sector vector whose components are polynomials in `φ`.
#[derive(Debug, Clone, PartialEq)]
pub struct FormField {
    n: usize,
    comps: Vec<PolyField>,
}

impl FormField {
    pub fn zero(n: usize) -> Self {
        Self { n, comps: vec![PolyField::zero(n); 1 << (2 * n)] }
    }

    pub fn new(n: usize, comps: Vec<PolyField>) -> Result<Self> {
        if comps.len() != 1 << (2 * n) || comps.iter().any(|c| c.n() != n) {
            return Err(Error::DimensionMismatch("form field components".into()));
        }
        Ok(Self { n, comps })
    }

    /// Single nonzero component `f` at sector index `idx`.
    pub fn single(n: usize, idx: usize, f: PolyField) -> Self {
        let mut v = Self::zero(n);
        v.comps[idx] = f;
        v
    }

    pub fn comps(&self) -> &[PolyField] {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(PolyField::is_zero)
    }
}
