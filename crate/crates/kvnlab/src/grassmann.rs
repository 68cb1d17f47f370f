//! Matrix realization of the Grassmann sector.
//!
//! For `n` degrees of freedom there are `2n` anticommuting generators. They are
//! stored under the internal ordering `p₁, q₁, p₂, q₂, …` (internal index
//! `a = 1..=2n`), so `p_i ↦ 2i − 1` and `q_i ↦ 2i`. Generator `a` is the
//! Kronecker string `σ_z^{⊗(a−1)} ⊗ σ⁻ ⊗ 1^{⊗(2n−a)}` with `σ⁻ = [[0,0],[1,0]]`;
//! the first tensor factor is the most significant bit of the basis index.

use crate::{Error, Result, C64};
use nalgebra::DMatrix;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Default memory guard: `n ≤ 6` gives matrices of dimension 4096.
pub const DEFAULT_N_MAX: usize = 6;

/// Public phase-space label, 1-based in the degree of freedom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Q(usize),
    P(usize),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Q(i) => write!(f, "q{i}"),
            Label::P(i) => write!(f, "p{i}"),
        }
    }
}

/// Validated internal index `a ∈ 1..=2n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SectorIndex {
    n: usize,
    a: usize,
}

impl SectorIndex {
    pub fn new(n: usize, a: usize) -> Result<Self> {
        if n == 0 || a == 0 || a > 2 * n {
            return Err(Error::IndexOutOfRange { index: a, max: 2 * n });
        }
        Ok(Self { n, a })
    }

    pub fn from_label(n: usize, label: Label) -> Result<Self> {
        let (i, a) = match label {
            Label::Q(i) => (i, 2 * i),
            Label::P(i) => (i, 2 * i.max(1) - 1),
        };
        if i == 0 || i > n {
            return Err(Error::IndexOutOfRange { index: i, max: n });
        }
        Self::new(n, a)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Internal 1-based index.
    pub fn internal(&self) -> usize {
        self.a
    }

    /// Internal 0-based index, used for arrays of variables.
    pub fn slot(&self) -> usize {
        self.a - 1
    }

    pub fn label(&self) -> Label {
        label_of(self.a)
    }

    /// Bit of the tensor-basis index flipped by this generator.
    pub fn bit(&self) -> usize {
        1 << (2 * self.n - self.a)
    }
}

/// Label of an internal 1-based index.
pub fn label_of(a: usize) -> Label {
    if a % 2 == 0 {
        Label::Q(a / 2)
    } else {
        Label::P(a.div_ceil(2))
    }
}

/// Internal 0-based slot of a public label (no range check).
pub fn slot_of(label: Label) -> usize {
    match label {
        Label::Q(i) => 2 * i - 1,
        Label::P(i) => 2 * i - 2,
    }
}

/// Sparse complex matrix acting on the form sector of `n` degrees of freedom.
///
/// Rows are stored as sorted `(column, value)` lists without explicit zeros.
#[derive(Clone, PartialEq)]
pub struct SectorOperator {
    n: usize,
    rows: Vec<Vec<(usize, C64)>>,
}

impl fmt::Debug for SectorOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SectorOperator(n={}, nnz={}) [", self.n, self.nnz())?;
        for (r, c, v) in self.entries() {
            write!(f, " ({},{})={}", r + 1, c + 1, v)?;
        }
        write!(f, " ]")
    }
}

fn sector_dim(n: usize) -> usize {
    1usize << (2 * n)
}

impl SectorOperator {
    pub fn zeros(n: usize) -> Self {
        Self { n, rows: vec![Vec::new(); sector_dim(n)] }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(n, &vec![C64::new(1.0, 0.0); sector_dim(n)])
    }

    pub fn diagonal(n: usize, diag: &[C64]) -> Self {
        let rows = diag
            .iter()
            .enumerate()
            .map(|(i, &v)| if v == C64::default() { Vec::new() } else { vec![(i, v)] })
            .collect();
        Self { n, rows }
    }

    /// Build from `(row, col, value)` triplets (0-based); duplicates add up.
    pub fn from_triplets(n: usize, triplets: impl IntoIterator<Item = (usize, usize, C64)>) -> Result<Self> {
        let dim = sector_dim(n);
        let mut acc: Vec<BTreeMap<usize, C64>> = vec![BTreeMap::new(); dim];
        for (r, c, v) in triplets {
            if r >= dim || c >= dim {
                return Err(Error::DimensionMismatch(format!("entry ({r},{c}) outside {dim}x{dim}")));
            }
            *acc[r].entry(c).or_default() += v;
        }
        Ok(Self::from_row_maps(n, acc))
    }

    fn from_row_maps(n: usize, acc: Vec<BTreeMap<usize, C64>>) -> Self {
        let rows = acc
            .into_iter()
            .map(|m| m.into_iter().filter(|(_, v)| *v != C64::default()).collect())
            .collect();
        Self { n, rows }
    }

    pub fn from_dense(n: usize, m: &DMatrix<C64>) -> Result<Self> {
        let dim = sector_dim(n);
        if m.nrows() != dim || m.ncols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "expected {dim}x{dim}, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let rows = (0..dim)
            .map(|r| (0..dim).filter_map(|c| (m[(r, c)] != C64::default()).then_some((c, m[(r, c)]))).collect())
            .collect();
        Ok(Self { n, rows })
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let dim = self.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for (r, c, v) in self.entries() {
            m[(r, c)] = v;
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Entry at 0-based `(row, col)`.
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.rows[r]
            .binary_search_by_key(&c, |e| e.0)
            .map(|k| self.rows[r][k].1)
            .unwrap_or_default()
    }

    /// Iterator over nonzero `(row, col, value)` entries, 0-based.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        self.rows.iter().enumerate().flat_map(|(r, row)| row.iter().map(move |&(c, v)| (r, c, v)))
    }

    pub fn row(&self, r: usize) -> &[(usize, C64)] {
        &self.rows[r]
    }

    pub fn transpose(&self) -> Self {
        let mut acc = vec![BTreeMap::new(); self.dim()];
        for (r, c, v) in self.entries() {
            acc[c].insert(r, v);
        }
        Self::from_row_maps(self.n, acc)
    }

    pub fn adjoint(&self) -> Self {
        self.transpose().map(|v| v.conj())
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        let rows = self
            .rows
            .iter()
            .map(|row| row.iter().map(|&(c, v)| (c, f(v))).filter(|(_, v)| *v != C64::default()).collect())
            .collect();
        Self { n: self.n, rows }
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|v| v * s)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!("n = {} vs n = {}", self.n, other.n)));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let rows = self.rows.iter().zip(&other.rows).map(|(a, b)| merge_rows(a, b, 1.0)).collect();
        Ok(Self { n: self.n, rows })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let rows = self.rows.iter().zip(&other.rows).map(|(a, b)| merge_rows(a, b, -1.0)).collect();
        Ok(Self { n: self.n, rows })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut acc = vec![BTreeMap::new(); self.dim()];
        for (r, row) in self.rows.iter().enumerate() {
            for &(k, a) in row {
                for &(c, b) in &other.rows[k] {
                    *acc[r].entry(c).or_insert(C64::default()) += a * b;
                }
            }
        }
        Ok(Self::from_row_maps(self.n, acc))
    }

    /// `AB + BA`.
    pub fn anticommutator(&self, other: &Self) -> Result<Self> {
        self.try_mul(other)?.try_add(&other.try_mul(self)?)
    }

    /// `AB − BA`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.try_mul(other)?.try_sub(&other.try_mul(self)?)
    }

    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!("vector length {} vs {}", v.len(), self.dim())));
        }
        Ok(self.rows.iter().map(|row| row.iter().map(|&(c, a)| a * v[c]).sum()).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.entries().map(|(_, _, v)| v.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.max_abs() <= tol
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    /// Change of form degree if every entry shifts the degree by the same amount.
    pub fn degree_shift(&self) -> Option<i32> {
        let mut shift = None;
        for (r, c, _) in self.entries() {
            let s = r.count_ones() as i32 - c.count_ones() as i32;
            match shift {
                None => shift = Some(s),
                Some(t) if t != s => return None,
                _ => {}
            }
        }
        Some(shift.unwrap_or(0))
    }

    /// `Some(true)` for Grassmann-odd operators, `Some(false)` for even ones,
    /// `None` for mixed parity. The zero operator counts as even.
    pub fn parity(&self) -> Option<bool> {
        let mut parity = None;
        for (r, c, _) in self.entries() {
            let odd = (r.count_ones() + c.count_ones()) % 2 == 1;
            match parity {
                None => parity = Some(odd),
                Some(p) if p != odd => return None,
                _ => {}
            }
        }
        Some(parity.unwrap_or(false))
    }

    fn kron(&self, other: &SectorOperator, n: usize) -> Self {
        // Raw Kronecker product; `n` labels the result.
        let db = other.dim();
        let mut rows = vec![Vec::new(); self.dim() * db];
        for (ra, ca, a) in self.entries() {
            for (rb, cb, b) in other.entries() {
                rows[ra * db + rb].push((ca * db + cb, a * b));
            }
        }
        for row in &mut rows {
            row.sort_by_key(|e| e.0);
        }
        Self { n, rows }
    }
}

fn merge_rows(a: &[(usize, C64)], b: &[(usize, C64)], sign: f64) -> Vec<(usize, C64)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let (c, v) = match (a.get(i), b.get(j)) {
            (Some(&(ca, va)), Some(&(cb, vb))) if ca == cb => {
                i += 1;
                j += 1;
                (ca, va + vb * sign)
            }
            (Some(&(ca, va)), Some(&(cb, _))) if ca < cb => {
                i += 1;
                (ca, va)
            }
            (Some(&(ca, va)), None) => {
                i += 1;
                (ca, va)
            }
            (_, Some(&(cb, vb))) => {
                j += 1;
                (cb, vb * sign)
            }
            (None, None) => unreachable!(),
        };
        if v != C64::default() {
            out.push((c, v));
        }
    }
    out
}

macro_rules! binop {
    ($tr:ident, $f:ident, $imp:ident) => {
        impl $tr<&SectorOperator> for &SectorOperator {
            type Output = SectorOperator;
            fn $f(self, rhs: &SectorOperator) -> SectorOperator {
                self.$imp(rhs).expect("sector operators with different n")
            }
        }
    };
}
binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl Neg for &SectorOperator {
    type Output = SectorOperator;
    fn neg(self) -> SectorOperator {
        self.scale(C64::new(-1.0, 0.0))
    }
}

/// Builder carrying the memory guard.
#[derive(Debug, Clone, Copy)]
pub struct GrassmannEngine {
    pub n_max: usize,
}

impl Default for GrassmannEngine {
    fn default() -> Self {
        Self { n_max: DEFAULT_N_MAX }
    }
}

impl GrassmannEngine {
    pub fn new(n_max: usize) -> Self {
        Self { n_max }
    }

    fn guard(&self, n: usize) -> Result<()> {
        if n > self.n_max {
            return Err(Error::DimensionTooLarge { n, max: self.n_max });
        }
        Ok(())
    }

    /// `ĉ^a` for internal index `a`.
    pub fn c(&self, idx: SectorIndex) -> Result<SectorOperator> {
        self.guard(idx.n)?;
        let one = C64::new(1.0, 0.0);
        let sigma_z = SectorOperator { n: 0, rows: vec![vec![(0, one)], vec![(1, -one)]] };
        let lower = SectorOperator { n: 0, rows: vec![vec![], vec![(0, one)]] };
        let id = SectorOperator { n: 0, rows: vec![vec![(0, one)], vec![(1, one)]] };
        let scalar = SectorOperator { n: 0, rows: vec![vec![(0, one)]] };
        let mut out = scalar;
        for k in 1..=2 * idx.n {
            let factor = match k.cmp(&idx.a) {
                std::cmp::Ordering::Less => &sigma_z,
                std::cmp::Ordering::Equal => &lower,
                std::cmp::Ordering::Greater => &id,
            };
            out = out.kron(factor, idx.n);
        }
        out.n = idx.n;
        Ok(out)
    }

    /// `c̄̂_a`, the transpose of `ĉ^a`.
    pub fn cbar(&self, idx: SectorIndex) -> Result<SectorOperator> {
        Ok(self.c(idx)?.transpose())
    }

    /// `ĉ^a c̄̂_a`.
    pub fn number(&self, idx: SectorIndex) -> Result<SectorOperator> {
        self.c(idx)?.try_mul(&self.cbar(idx)?)
    }
}

/// `ĉ^a` for internal 1-based `a`, default memory guard.
pub fn build_c(n: usize, a: usize) -> Result<SectorOperator> {
    GrassmannEngine::default().c(SectorIndex::new(n, a)?)
}

/// `c̄̂_a` for internal 1-based `a`, default memory guard.
pub fn build_cbar(n: usize, a: usize) -> Result<SectorOperator> {
    GrassmannEngine::default().cbar(SectorIndex::new(n, a)?)
}

/// `ĉ` for a public label.
pub fn c_of(n: usize, label: Label) -> Result<SectorOperator> {
    GrassmannEngine::default().c(SectorIndex::from_label(n, label)?)
}

/// `c̄̂` for a public label.
pub fn cbar_of(n: usize, label: Label) -> Result<SectorOperator> {
    GrassmannEngine::default().cbar(SectorIndex::from_label(n, label)?)
}

pub fn number_operator(n: usize, a: usize) -> Result<SectorOperator> {
    GrassmannEngine::default().number(SectorIndex::new(n, a)?)
}

/// `AB + BA` with a dimension check.
pub fn anticommutator(a: &SectorOperator, b: &SectorOperator) -> Result<SectorOperator> {
    a.anticommutator(b)
}

/// Sector basis index of the monomial `c^{a₁}⋯c^{a_p}` (internal 1-based,
/// strictly ascending). With this ordering the basis vector equals the
/// monomial with coefficient `+1`.
pub fn basis_index(n: usize, ascending: &[usize]) -> usize {
    ascending.iter().map(|&a| 1usize << (2 * n - a)).sum()
}

/// Internal 1-based indices (ascending) of the monomial at basis index `idx`.
pub fn basis_monomial(n: usize, idx: usize) -> Vec<usize> {
    (1..=2 * n).filter(|&a| idx & (1 << (2 * n - a)) != 0).collect()
}

/// Vector on the form sector, indexed by the tensor-product basis.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiformVector {
    n: usize,
    components: Vec<C64>,
}

impl MultiformVector {
    pub fn new(n: usize, components: Vec<C64>) -> Result<Self> {
        if components.len() != sector_dim(n) {
            return Err(Error::DimensionMismatch(format!(
                "{} components for n = {n}",
                components.len()
            )));
        }
        Ok(Self { n, components })
    }

    pub fn zero(n: usize) -> Self {
        Self { n, components: vec![C64::default(); sector_dim(n)] }
    }

    pub fn basis(n: usize, idx: usize) -> Self {
        let mut v = Self::zero(n);
        v.components[idx] = C64::new(1.0, 0.0);
        v
    }

    /// State `Σ coeff · c^{a₁}⋯c^{a_p}`; indices may come in any order, the
    /// permutation sign is absorbed. Repeated indices give zero.
    pub fn from_monomials(n: usize, terms: &[(Vec<usize>, C64)]) -> Result<Self> {
        let mut v = Self::zero(n);
        for (idx, coeff) in terms {
            if let Some(&a) = idx.iter().find(|&&a| a == 0 || a > 2 * n) {
                return Err(Error::IndexOutOfRange { index: a, max: 2 * n });
            }
            if let Some((sorted, sign)) = sort_with_sign(idx) {
                v.components[basis_index(n, &sorted)] += *coeff * sign;
            }
        }
        Ok(v)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> &[C64] {
        &self.components
    }

    pub fn into_components(self) -> Vec<C64> {
        self.components
    }

    /// Nonzero coefficients of degree `p` as `(ascending internal indices, coefficient)`.
    pub fn form_components(&self, p: usize) -> Result<Vec<(Vec<usize>, C64)>> {
        if p > 2 * self.n {
            return Err(Error::DegreeOutOfRange { degree: p, max: 2 * self.n });
        }
        Ok(self
            .components
            .iter()
            .enumerate()
            .filter(|(i, v)| i.count_ones() as usize == p && **v != C64::default())
            .map(|(i, &v)| (basis_monomial(self.n, i), v))
            .collect())
    }

    /// Exterior product `self ∧ other`.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch("wedge of vectors with different n".into()));
        }
        let mut out = Self::zero(self.n);
        for (i, a) in self.components.iter().enumerate().filter(|(_, a)| **a != C64::default()) {
            for (j, b) in other.components.iter().enumerate().filter(|(_, b)| **b != C64::default()) {
                if i & j != 0 {
                    continue;
                }
                let mut idx = basis_monomial(self.n, i);
                idx.extend(basis_monomial(self.n, j));
                if let Some((sorted, sign)) = sort_with_sign(&idx) {
                    out.components[basis_index(self.n, &sorted)] += a * b * sign;
                }
            }
        }
        Ok(out)
    }

    /// Basis indices spanning the degree-`p` subspace, 0-based.
    pub fn degree_indices(n: usize, p: usize) -> Vec<usize> {
        (0..sector_dim(n)).filter(|i| i.count_ones() as usize == p).collect()
    }
}

/// Sort indices ascending, returning the permutation sign, or `None` when an
/// index repeats.
pub fn sort_with_sign(idx: &[usize]) -> Option<(Vec<usize>, f64)> {
    let mut v = idx.to_vec();
    let mut sign = 1.0;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some((v, sign))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    /// Independent bit-logic oracle for `ĉ^a`.
    fn oracle_c(n: usize, a: usize) -> DMatrix<C64> {
        let dim = 1 << (2 * n);
        let mut m = DMatrix::zeros(dim, dim);
        let bit = 1 << (2 * n - a);
        for s in 0..dim {
            if s & bit == 0 {
                let higher = (s >> (2 * n - a + 1)).count_ones();
                let sign = if higher % 2 == 0 { 1.0 } else { -1.0 };
                m[(s | bit, s)] = c(sign);
            }
        }
        m
    }

    #[test]
    fn n1_matrices_match_tables() {
        let cq = c_of(1, Label::Q(1)).unwrap();
        let cp = c_of(1, Label::P(1)).unwrap();
        let cbq = cbar_of(1, Label::Q(1)).unwrap();
        assert_eq!(cq.nnz(), 2);
        assert_eq!(cq.get(1, 0), c(1.0));
        assert_eq!(cq.get(3, 2), c(-1.0));
        assert_eq!(cp.nnz(), 2);
        assert_eq!(cp.get(2, 0), c(1.0));
        assert_eq!(cp.get(3, 1), c(1.0));
        assert_eq!(cbq.get(0, 1), c(1.0));
        assert_eq!(cbq.get(2, 3), c(-1.0));
    }

    #[test]
    fn generators_match_bit_oracle() {
        for n in 1..=3 {
            for a in 1..=2 * n {
                assert_eq!(build_c(n, a).unwrap().to_dense(), oracle_c(n, a));
            }
        }
    }

    #[test]
    fn q2_raises_zero_form_to_index_two() {
        let cq2 = c_of(2, Label::Q(2)).unwrap();
        let out = cq2.apply(MultiformVector::basis(2, 0).components()).unwrap();
        assert_eq!(out, MultiformVector::basis(2, 1).into_components());
    }

    #[test]
    fn n3_index5_anticommutator_is_identity() {
        let a = build_c(3, 5).unwrap();
        let b = build_cbar(3, 5).unwrap();
        assert_eq!(anticommutator(&a, &b).unwrap(), SectorOperator::identity(3));
    }

    #[test]
    fn canonical_anticommutators_up_to_n4() {
        for n in 1..=4 {
            let cs: Vec<_> = (1..=2 * n).map(|a| build_c(n, a).unwrap()).collect();
            let cbs: Vec<_> = cs.iter().map(SectorOperator::transpose).collect();
            let id = SectorOperator::identity(n);
            for a in 0..2 * n {
                for b in 0..2 * n {
                    assert!(anticommutator(&cs[a], &cs[b]).unwrap().is_zero(1e-12));
                    assert!(anticommutator(&cbs[a], &cbs[b]).unwrap().is_zero(1e-12));
                    let ac = anticommutator(&cs[a], &cbs[b]).unwrap();
                    let expect = if a == b { id.clone() } else { SectorOperator::zeros(n) };
                    assert!((&ac - &expect).is_zero(1e-12));
                }
            }
        }
    }

    #[test]
    fn generator_entries_are_signs_and_cbar_is_adjoint() {
        for n in 1..=3 {
            for a in 1..=2 * n {
                let m = build_c(n, a).unwrap();
                assert_eq!(m.nnz(), 1 << (2 * n - 1));
                assert!(m.entries().all(|(_, _, v)| v == c(1.0) || v == c(-1.0)));
                assert_eq!(build_cbar(n, a).unwrap(), m.adjoint());
            }
        }
    }

    #[test]
    fn number_operators() {
        let nq = number_operator(1, 2).unwrap();
        let np = number_operator(1, 1).unwrap();
        assert_eq!(nq, SectorOperator::diagonal(1, &[c(0.0), c(1.0), c(0.0), c(1.0)]));
        assert_eq!(np, SectorOperator::diagonal(1, &[c(0.0), c(0.0), c(1.0), c(1.0)]));
        for a in 1..=4 {
            let na = number_operator(2, a).unwrap();
            assert_eq!(&na * &na, na);
        }
    }

    #[test]
    fn form_number_counts_degree() {
        for n in 1..=3 {
            let mut qf = SectorOperator::zeros(n);
            for a in 1..=2 * n {
                qf = &qf + &number_operator(n, a).unwrap();
            }
            for i in 0..qf.dim() {
                assert_eq!(qf.get(i, i), c(i.count_ones() as f64));
            }
            assert_eq!(qf.nnz(), qf.dim() - 1);
        }
    }

    #[test]
    fn form_components_conventions() {
        let v = MultiformVector::new(1, vec![c(0.0), c(0.0), c(0.0), c(1.0)]).unwrap();
        // index 1 = p, index 2 = q: coefficient of c^p c^q
        assert_eq!(v.form_components(2).unwrap(), vec![(vec![1, 2], c(1.0))]);
        let z = MultiformVector::zero(2);
        for p in 0..=4 {
            assert!(z.form_components(p).unwrap().is_empty());
        }
        let one: Vec<usize> = MultiformVector::degree_indices(2, 1).iter().map(|i| i + 1).collect();
        assert_eq!(one, vec![2, 3, 5, 9]);
        assert!(v.form_components(3).is_err());
    }

    #[test]
    fn monomial_states_match_operator_products() {
        // c^{a1} c^{a2} |0> equals the basis monomial with the sign of the ordering
        let n = 2;
        let vac = MultiformVector::basis(n, 0);
        for a in 1..=4 {
            for b in 1..=4 {
                let v = build_c(n, a)
                    .unwrap()
                    .apply(&build_c(n, b).unwrap().apply(vac.components()).unwrap())
                    .unwrap();
                let w = MultiformVector::from_monomials(n, &[(vec![a, b], c(1.0))]).unwrap();
                assert_eq!(v, w.into_components());
            }
        }
    }

    #[test]
    fn errors() {
        assert!(build_c(1, 3).is_err());
        assert!(build_c(1, 0).is_err());
        assert!(matches!(build_c(7, 1), Err(Error::DimensionTooLarge { .. })));
        assert!(GrassmannEngine::new(7).c(SectorIndex::new(7, 1).unwrap()).is_ok());
        assert!(anticommutator(&build_c(1, 1).unwrap(), &build_c(2, 1).unwrap()).is_err());
        assert!(SectorIndex::from_label(1, Label::Q(2)).is_err());
    }

    #[test]
    fn label_mapping_is_bijective() {
        for n in 1..=4 {
            for a in 1..=2 * n {
                let l = label_of(a);
                assert_eq!(SectorIndex::from_label(n, l).unwrap().internal(), a);
                assert_eq!(slot_of(l), a - 1);
            }
        }
    }

    #[test]
    fn wedge_matches_operator_action() {
        // c^a ∧ v equals ĉ^a v
        let n = 2;
        let v = MultiformVector::from_monomials(n, &[(vec![1], c(2.0)), (vec![2, 4], c(-1.0)), (vec![], c(0.5))]).unwrap();
        for a in 1..=4 {
            let lhs = MultiformVector::basis(n, basis_index(n, &[a])).wedge(&v).unwrap();
            let rhs = build_c(n, a).unwrap().apply(v.components()).unwrap();
            assert_eq!(lhs.components(), &rhs[..]);
        }
        let x = MultiformVector::from_monomials(n, &[(vec![2, 1], c(1.0))]).unwrap();
        assert_eq!(x.wedge(&x).unwrap(), MultiformVector::zero(n));
    }

    proptest! {
        #[test]
        fn products_are_associative(n in 1usize..=2, a in 1usize..=4, b in 1usize..=4, d in 1usize..=4) {
            let (a, b, d) = (a.min(2 * n), b.min(2 * n), d.min(2 * n));
            let x = build_c(n, a).unwrap();
            let y = build_cbar(n, b).unwrap();
            let z = build_c(n, d).unwrap();
            prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        }

        #[test]
        fn sort_sign_matches_transposition_count(v in proptest::collection::vec(1usize..9, 0..6)) {
            if let Some((sorted, sign)) = sort_with_sign(&v) {
                let mut inv = 0;
                for i in 0..v.len() { for j in i + 1..v.len() { if v[i] > v[j] { inv += 1; } } }
                prop_assert_eq!(sign, if inv % 2 == 0 { 1.0 } else { -1.0 });
                prop_assert!(sorted.windows(2).all(|w| w[0] < w[1]));
            }
        }
    }
}
