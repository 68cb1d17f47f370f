use super::superpoly::{Odd, SuperPoly};
use crate::cartan::PolyField;
use crate::grassmann::sort_with_sign;
use crate::{Error, Result, C64};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TensorKind {
    /// `p`-form `F_{a₁…a_p}`.
    Form(usize),
    /// `p`-vector `V^{a₁…a_p}`.
    Multivector(usize),
    /// Vector-valued form `J^i_{i₁…i_k}` with `k` lower indices.
    VectorValuedForm(usize),
}

impl TensorKind {
    /// Number of antisymmetric indices.
    pub fn rank(self) -> usize {
        match self {
            TensorKind::Form(p) | TensorKind::Multivector(p) | TensorKind::VectorValuedForm(p) => p,
        }
    }
}

/// Tensor with polynomial components on internal slots. Keys hold the
/// antisymmetric indices; for vector-valued forms the vector index is
/// appended last. Absent keys are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorSpec {
    n: usize,
    kind: TensorKind,
    comps: BTreeMap<Vec<usize>, PolyField>,
}

/// All permutations of `v` with their signs.
fn permutations(v: &[usize]) -> Vec<(Vec<usize>, f64)> {
    if v.len() <= 1 {
        return vec![(v.to_vec(), 1.0)];
    }
    let mut out = Vec::new();
    for i in 0..v.len() {
        let mut rest = v.to_vec();
        let head = rest.remove(i);
        let s = if i % 2 == 0 { 1.0 } else { -1.0 };
        for (mut p, sp) in permutations(&rest) {
            p.insert(0, head);
            out.push((p, s * sp));
        }
    }
    out
}

impl TensorSpec {
    /// Build from raw components; antisymmetry is validated.
    pub fn new(n: usize, kind: TensorKind, comps: BTreeMap<Vec<usize>, PolyField>) -> Result<Self> {
        let expected = kind.rank() + usize::from(matches!(kind, TensorKind::VectorValuedForm(_)));
        for (k, v) in &comps {
            if k.len() != expected || k.iter().any(|&a| a >= 2 * n) || v.n() != n {
                return Err(Error::DimensionMismatch(format!("component key {k:?} for {kind:?} at n = {n}")));
            }
        }
        let t = Self { n, kind, comps: comps.into_iter().filter(|(_, v)| !v.is_zero()).collect() };
        t.validate()?;
        Ok(t)
    }

    /// Build from components on ascending index sets, filling in the
    /// antisymmetric partners. For vector-valued forms each key is
    /// `(ascending lower indices) ++ [vector index]`.
    pub fn from_ascending(n: usize, kind: TensorKind, entries: &[(Vec<usize>, PolyField)]) -> Result<Self> {
        let vv = matches!(kind, TensorKind::VectorValuedForm(_));
        let mut comps: BTreeMap<Vec<usize>, PolyField> = BTreeMap::new();
        for (key, val) in entries {
            let (idx, upper) = if vv { (&key[..key.len().saturating_sub(1)], key.last().copied()) } else { (&key[..], None) };
            if idx.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::NotAntisymmetric(format!("indices {idx:?} are not strictly ascending")));
            }
            for (perm, s) in permutations(idx) {
                let mut k = perm;
                k.extend(upper);
                let e = comps.entry(k).or_insert_with(|| PolyField::zero(n));
                *e = &*e + &val.scale(C64::new(s, 0.0));
            }
        }
        Self::new(n, kind, comps)
    }

    /// Vector field `V^a ∂_a`.
    pub fn vector(comps: &[PolyField]) -> Result<Self> {
        let n = comps.len() / 2;
        Self::from_ascending(n, TensorKind::Multivector(1), &comps.iter().enumerate().map(|(a, v)| (vec![a], v.clone())).collect::<Vec<_>>())
    }

    /// One-form `α_a dφ^a`.
    pub fn one_form(comps: &[PolyField]) -> Result<Self> {
        let n = comps.len() / 2;
        Self::from_ascending(n, TensorKind::Form(1), &comps.iter().enumerate().map(|(a, v)| (vec![a], v.clone())).collect::<Vec<_>>())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> TensorKind {
        self.kind
    }

    pub fn comps(&self) -> &BTreeMap<Vec<usize>, PolyField> {
        &self.comps
    }

    /// Component at an arbitrary key (zero if absent).
    pub fn get(&self, key: &[usize]) -> PolyField {
        self.comps.get(key).cloned().unwrap_or_else(|| PolyField::zero(self.n))
    }

    fn validate(&self) -> Result<()> {
        let vv = matches!(self.kind, TensorKind::VectorValuedForm(_));
        for (k, v) in &self.comps {
            let (idx, upper) = if vv { (&k[..k.len() - 1], k.last().copied()) } else { (&k[..], None) };
            match sort_with_sign(idx) {
                None => return Err(Error::NotAntisymmetric(format!("nonzero component with repeated index {k:?}"))),
                Some((sorted, s)) => {
                    for (perm, sp) in permutations(&sorted) {
                        let mut pk = perm;
                        pk.extend(upper);
                        let expect = v.scale(C64::new(s * sp, 0.0));
                        if self.get(&pk) != expect {
                            return Err(Error::NotAntisymmetric(format!("components {k:?} and {pk:?}")));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Hat map: forms to `c`-words, multivectors to `c̄`-words, vector-valued
    /// forms to `c`-words times one `c̄`, each with the `1/p!` normalization.
    pub fn hat(&self) -> SuperPoly {
        let n = self.n;
        let mut out = SuperPoly::zero(n);
        // The 1/p! sum over permutations collapses onto the ascending key.
        for (k, v) in &self.comps {
            let vv = matches!(self.kind, TensorKind::VectorValuedForm(_));
            let idx = if vv { &k[..k.len() - 1] } else { &k[..] };
            if idx.windows(2).any(|w| w[0] >= w[1]) {
                continue;
            }
            let word: SuperPoly = match self.kind {
                TensorKind::Form(_) => k.iter().fold(SuperPoly::one(n), |acc, &a| &acc * &SuperPoly::c(n, a)),
                TensorKind::Multivector(_) => k.iter().fold(SuperPoly::one(n), |acc, &a| &acc * &SuperPoly::cbar(n, a)),
                TensorKind::VectorValuedForm(_) => {
                    let w = idx.iter().fold(SuperPoly::one(n), |acc, &a| &acc * &SuperPoly::c(n, a));
                    &w * &SuperPoly::cbar(n, k[k.len() - 1])
                }
            };
            out = &out + &(&SuperPoly::from_poly(v) * &word);
        }
        out
    }

    /// Inverse of [`hat`](Self::hat). Fails unless `s` lies in the image for
    /// the requested kind.
    pub fn unhat(s: &SuperPoly, kind: TensorKind) -> Result<Self> {
        let n = s.n();
        let mut entries: BTreeMap<Vec<usize>, PolyField> = BTreeMap::new();
        for (key, c) in s.terms() {
            if key.lam.iter().any(|&e| e > 0) {
                return Err(Error::InvalidParameter("term depends on lambda".into()));
            }
            let cs: Vec<usize> = key.word.iter().filter_map(|g| if let Odd::C(a) = g { Some(*a) } else { None }).collect();
            let cbs: Vec<usize> = key.word.iter().filter_map(|g| if let Odd::Cbar(a) = g { Some(*a) } else { None }).collect();
            if cs.len() + cbs.len() != key.word.len() {
                return Err(Error::InvalidParameter("term contains theta".into()));
            }
            let k = match kind {
                TensorKind::Form(p) if cs.len() == p && cbs.is_empty() => cs,
                TensorKind::Multivector(p) if cbs.len() == p && cs.is_empty() => cbs,
                TensorKind::VectorValuedForm(p) if cs.len() == p && cbs.len() == 1 => {
                    let mut k = cs;
                    k.push(cbs[0]);
                    k
                }
                _ => return Err(Error::InvalidParameter(format!("term {:?} outside the image of {kind:?}", key.word))),
            };
            let mono = PolyField::monomial(n, key.phi.clone(), *c);
            let e = entries.entry(k).or_insert_with(|| PolyField::zero(n));
            *e = &*e + &mono;
        }
        Self::from_ascending(n, kind, &entries.into_iter().collect::<Vec<_>>())
    }
}
