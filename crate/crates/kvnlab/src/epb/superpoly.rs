use crate::cartan::PolyField;
use crate::{Error, Result, C64, I};
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Anticommuting generator. The derived order is the canonical word order:
/// all `c` before all `c̄`, ascending slot, then `θ`, `θ̄`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Odd {
    C(usize),
    Cbar(usize),
    Theta,
    ThetaBar,
}

impl fmt::Display for Odd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Odd::C(a) => write!(f, "c{}", crate::grassmann::label_of(a + 1)),
            Odd::Cbar(a) => write!(f, "cb{}", crate::grassmann::label_of(a + 1)),
            Odd::Theta => write!(f, "th"),
            Odd::ThetaBar => write!(f, "thb"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Key {
    pub phi: Vec<u32>,
    pub lam: Vec<u32>,
    pub word: Vec<Odd>,
}

/// Polynomial in commuting `φ^a, λ_a` and anticommuting `c^a, c̄_a, θ, θ̄`.
/// Slots follow the internal ordering of [`crate::grassmann`].
#[derive(Clone, PartialEq)]
pub struct SuperPoly {
    n: usize,
    terms: BTreeMap<Key, C64>,
}

impl fmt::Debug for SuperPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for SuperPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (key, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({})", crate::cartan::format_coeff(*c))?;
            for (s, &e) in key.phi.iter().enumerate() {
                if e > 0 {
                    write!(f, "*{}^{e}", crate::grassmann::label_of(s + 1))?;
                }
            }
            for (s, &e) in key.lam.iter().enumerate() {
                if e > 0 {
                    write!(f, "*lam_{}^{e}", crate::grassmann::label_of(s + 1))?;
                }
            }
            for g in &key.word {
                write!(f, "*{g}")?;
            }
        }
        Ok(())
    }
}

/// Merge two sorted words; returns the sorted word and the reordering sign,
/// or `None` if a generator repeats.
fn merge_words(a: &[Odd], b: &[Odd]) -> Option<(Vec<Odd>, f64)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    let mut swaps = 0usize;
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i] < b[j]) {
            out.push(a[i]);
            i += 1;
        } else {
            if i < a.len() && a[i] == b[j] {
                return None;
            }
            // b[j] jumps over the remaining a[i..]
            swaps += a.len() - i;
            out.push(b[j]);
            j += 1;
        }
    }
    Some((out, if swaps % 2 == 0 { 1.0 } else { -1.0 }))
}

impl SuperPoly {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: BTreeMap::new() }
    }

    fn unit_key(n: usize) -> Key {
        Key { phi: vec![0; 2 * n], lam: vec![0; 2 * n], word: Vec::new() }
    }

    pub fn constant(n: usize, c: C64) -> Self {
        let mut s = Self::zero(n);
        s.add_term(Self::unit_key(n), c);
        s
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, C64::new(1.0, 0.0))
    }

    pub fn phi(n: usize, slot: usize) -> Self {
        let mut k = Self::unit_key(n);
        k.phi[slot] = 1;
        Self::from_key(n, k)
    }

    pub fn lambda(n: usize, slot: usize) -> Self {
        let mut k = Self::unit_key(n);
        k.lam[slot] = 1;
        Self::from_key(n, k)
    }

    pub fn odd(n: usize, g: Odd) -> Self {
        let mut k = Self::unit_key(n);
        k.word.push(g);
        Self::from_key(n, k)
    }

    pub fn c(n: usize, slot: usize) -> Self {
        Self::odd(n, Odd::C(slot))
    }

    pub fn cbar(n: usize, slot: usize) -> Self {
        Self::odd(n, Odd::Cbar(slot))
    }

    pub fn theta(n: usize) -> Self {
        Self::odd(n, Odd::Theta)
    }

    pub fn theta_bar(n: usize) -> Self {
        Self::odd(n, Odd::ThetaBar)
    }

    fn from_key(n: usize, k: Key) -> Self {
        let mut s = Self::zero(n);
        s.add_term(k, C64::new(1.0, 0.0));
        s
    }

    /// Embed a polynomial in `φ`.
    pub fn from_poly(p: &PolyField) -> Self {
        let n = p.n();
        let mut s = Self::zero(n);
        for (m, c) in p.terms() {
            s.add_term(Key { phi: m.clone(), lam: vec![0; 2 * n], word: Vec::new() }, *c);
        }
        s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Key, &C64)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, k: Key, c: C64) {
        if c == C64::default() {
            return;
        }
        match self.terms.entry(k) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().norm() == 0.0 {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    fn check(&self, o: &Self) -> Result<()> {
        if self.n != o.n {
            return Err(Error::DimensionMismatch(format!("superpolynomials over n = {} and n = {}", self.n, o.n)));
        }
        Ok(())
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.add_term(k.clone(), *c);
        }
        Ok(out)
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = Self::zero(self.n);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), c * s);
        }
        out
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let mut out = Self::zero(self.n);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &o.terms {
                if let Some((word, sign)) = merge_words(&ka.word, &kb.word) {
                    let key = Key {
                        phi: ka.phi.iter().zip(&kb.phi).map(|(x, y)| x + y).collect(),
                        lam: ka.lam.iter().zip(&kb.lam).map(|(x, y)| x + y).collect(),
                        word,
                    };
                    out.add_term(key, ca * cb * sign);
                }
            }
        }
        Ok(out)
    }

    /// Grassmann parity if homogeneous (`true` = odd). Zero counts as even.
    pub fn parity(&self) -> Option<bool> {
        let mut p = None;
        for k in self.terms.keys() {
            let odd = k.word.len() % 2 == 1;
            match p {
                None => p = Some(odd),
                Some(q) if q != odd => return None,
                _ => {}
            }
        }
        Some(p.unwrap_or(false))
    }

    fn map_terms(&self, f: impl Fn(&Key, C64) -> Option<(Key, C64)>) -> Self {
        let mut out = Self::zero(self.n);
        for (k, c) in &self.terms {
            if let Some((k2, c2)) = f(k, *c) {
                out.add_term(k2, c2);
            }
        }
        out
    }

    pub fn d_phi(&self, slot: usize) -> Self {
        self.map_terms(|k, c| {
            (k.phi[slot] > 0).then(|| {
                let mut k2 = k.clone();
                k2.phi[slot] -= 1;
                (k2, c * k.phi[slot] as f64)
            })
        })
    }

    pub fn d_lambda(&self, slot: usize) -> Self {
        self.map_terms(|k, c| {
            (k.lam[slot] > 0).then(|| {
                let mut k2 = k.clone();
                k2.lam[slot] -= 1;
                (k2, c * k.lam[slot] as f64)
            })
        })
    }

    /// Left derivative `∂→/∂g`.
    pub fn d_left(&self, g: Odd) -> Self {
        self.map_terms(|k, c| {
            k.word.iter().position(|&x| x == g).map(|pos| {
                let mut k2 = k.clone();
                k2.word.remove(pos);
                (k2, if pos % 2 == 0 { c } else { -c })
            })
        })
    }

    /// Right derivative `∂←/∂g`.
    pub fn d_right(&self, g: Odd) -> Self {
        self.map_terms(|k, c| {
            k.word.iter().position(|&x| x == g).map(|pos| {
                let after = k.word.len() - 1 - pos;
                let mut k2 = k.clone();
                k2.word.remove(pos);
                (k2, if after % 2 == 0 { c } else { -c })
            })
        })
    }

    /// Extended Poisson bracket:
    /// `{A,B} = A∂←_φ ∂→_λ B − A∂←_λ ∂→_φ B − i(A∂←_c̄ ∂→_c B + A∂←_c ∂→_c̄ B)`.
    pub fn epb(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let n = self.n;
        let mut out = Self::zero(n);
        for a in 0..2 * n {
            out = out.try_add(&self.d_phi(a).try_mul(&o.d_lambda(a))?)?;
            out = out.try_add(&self.d_lambda(a).try_mul(&o.d_phi(a))?.scale(C64::new(-1.0, 0.0)))?;
            let f1 = self.d_right(Odd::Cbar(a)).try_mul(&o.d_left(Odd::C(a)))?;
            let f2 = self.d_right(Odd::C(a)).try_mul(&o.d_left(Odd::Cbar(a)))?;
            out = out.try_add(&f1.try_add(&f2)?.scale(-I))?;
        }
        Ok(out)
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn distance(&self, o: &Self) -> Result<f64> {
        Ok(self.try_add(&o.scale(C64::new(-1.0, 0.0)))?.max_abs())
    }

    /// Drop coefficients with modulus ≤ `tol`.
    pub fn prune(&self, tol: f64) -> Self {
        self.map_terms(|k, c| (c.norm() > tol).then(|| (k.clone(), c)))
    }

    /// Substitute the images `phi_images[slot]` for `φ^slot` in a polynomial.
    pub fn compose_poly(p: &PolyField, phi_images: &[SuperPoly]) -> Result<Self> {
        let n = p.n();
        if phi_images.len() != 2 * n {
            return Err(Error::DimensionMismatch(format!("{} images for n = {n}", phi_images.len())));
        }
        let mut out = Self::zero(n);
        for (m, c) in p.terms() {
            let mut t = Self::constant(n, *c);
            for (slot, &e) in m.iter().enumerate() {
                for _ in 0..e {
                    t = t.try_mul(&phi_images[slot])?;
                }
            }
            out = out.try_add(&t)?;
        }
        Ok(out)
    }

    /// Berezin integral `∫dθ dθ̄ F = ∂→_θ ∂→_θ̄ F` (inner integral over `θ̄`),
    /// normalized by `∫dθ θ = ∫dθ̄ θ̄ = 1`.
    pub fn berezin(&self) -> Self {
        self.d_left(Odd::ThetaBar).d_left(Odd::Theta)
    }

    /// Whether any term carries `θ` or `θ̄`.
    pub fn has_theta(&self) -> bool {
        self.terms.keys().any(|k| k.word.iter().any(|g| matches!(g, Odd::Theta | Odd::ThetaBar)))
    }

    /// Terms free of `θ, θ̄`.
    pub fn theta_free(&self) -> Self {
        self.map_terms(|k, c| {
            (!k.word.iter().any(|g| matches!(g, Odd::Theta | Odd::ThetaBar))).then(|| (k.clone(), c))
        })
    }

    /// Drop every term containing a `λ`.
    pub fn lambda_free(&self) -> Self {
        self.map_terms(|k, c| k.lam.iter().all(|&e| e == 0).then(|| (k.clone(), c)))
    }
}

macro_rules! binop {
    ($tr:ident, $f:ident, $body:expr) => {
        impl $tr<&SuperPoly> for &SuperPoly {
            type Output = SuperPoly;
            fn $f(self, rhs: &SuperPoly) -> SuperPoly {
                let g: fn(&SuperPoly, &SuperPoly) -> Result<SuperPoly> = $body;
                g(self, rhs).expect("superpolynomials with different n")
            }
        }
    };
}
binop!(Add, add, |a, b| a.try_add(b));
binop!(Sub, sub, |a, b| a.try_add(&b.scale(C64::new(-1.0, 0.0))));
binop!(Mul, mul, |a, b| a.try_mul(b));

impl Neg for &SuperPoly {
    type Output = SuperPoly;
    fn neg(self) -> SuperPoly {
        self.scale(C64::new(-1.0, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn one() -> C64 {
        C64::new(1.0, 0.0)
    }

    #[test]
    fn basic_brackets() {
        let n = 1;
        assert_eq!(SuperPoly::phi(n, 0).epb(&SuperPoly::lambda(n, 0)).unwrap(), SuperPoly::one(n));
        assert_eq!(SuperPoly::cbar(n, 1).epb(&SuperPoly::c(n, 1)).unwrap(), SuperPoly::constant(n, -I));
        assert_eq!(SuperPoly::c(n, 1).epb(&SuperPoly::cbar(n, 1)).unwrap(), SuperPoly::constant(n, -I));
        assert!(SuperPoly::phi(n, 0).epb(&SuperPoly::phi(n, 1)).unwrap().is_zero());
        assert!(SuperPoly::c(n, 0).epb(&SuperPoly::cbar(n, 1)).unwrap().is_zero());
    }

    #[test]
    fn words_anticommute() {
        let n = 1;
        let (a, b) = (SuperPoly::c(n, 0), SuperPoly::cbar(n, 1));
        assert_eq!(&a * &b, -&(&b * &a));
        assert!((&a * &a).is_zero());
        assert!((&SuperPoly::theta(n) * &SuperPoly::theta(n)).is_zero());
    }

    #[test]
    fn berezin_orientation() {
        let n = 1;
        let tt = &SuperPoly::theta(n) * &SuperPoly::theta_bar(n);
        assert_eq!(tt.berezin(), SuperPoly::constant(n, -one()));
        assert!(SuperPoly::theta(n).berezin().is_zero());
    }

    fn arb_superpoly(n: usize) -> impl Strategy<Value = SuperPoly> {
        let gens: Vec<Odd> = (0..2 * n).flat_map(|a| [Odd::C(a), Odd::Cbar(a)]).collect();
        let term = (
            proptest::collection::vec(0u32..2, 2 * n),
            proptest::collection::vec(0u32..2, 2 * n),
            proptest::sample::subsequence(gens, 0..3),
            -2i32..3,
            -2i32..3,
        );
        proptest::collection::vec(term, 1..4).prop_map(move |ts| {
            let mut s = SuperPoly::zero(n);
            for (phi, lam, mut word, re, im) in ts {
                word.sort();
                s.add_term(Key { phi, lam, word }, C64::new(re as f64, im as f64));
            }
            s
        })
    }

    /// Split into homogeneous parts (even, odd).
    fn split(s: &SuperPoly) -> [SuperPoly; 2] {
        let mut out = [SuperPoly::zero(s.n()), SuperPoly::zero(s.n())];
        for (k, c) in s.terms() {
            out[k.word.len() % 2].add_term(k.clone(), *c);
        }
        out
    }

    /// Drop the second degree of freedom: keep terms over slots 0, 1 only.
    fn restrict(s: &SuperPoly) -> SuperPoly {
        let mut out = SuperPoly::zero(1);
        for (k, c) in s.terms() {
            let low = |v: &[u32]| v[2..].iter().all(|&e| e == 0);
            let ok_word = k.word.iter().all(|g| match g { Odd::C(a) | Odd::Cbar(a) => *a < 2, _ => true });
            if low(&k.phi) && low(&k.lam) && ok_word {
                out.add_term(Key { phi: k.phi[..2].to_vec(), lam: k.lam[..2].to_vec(), word: k.word.clone() }, *c);
            }
        }
        out
    }

    fn sgn(a: usize, b: usize) -> f64 {
        if a * b % 2 == 0 { 1.0 } else { -1.0 }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn graded_antisymmetry(n in 1usize..=2, a in arb_superpoly(2), b in arb_superpoly(2)) {
            let (a, b) = if n == 1 { (restrict(&a), restrict(&b)) } else { (a, b) };
            for (pa, ah) in split(&a).iter().enumerate() {
                for (pb, bh) in split(&b).iter().enumerate() {
                    let lhs = ah.epb(bh).unwrap();
                    let rhs = bh.epb(ah).unwrap().scale(C64::new(-sgn(pa, pb), 0.0));
                    prop_assert!(lhs.distance(&rhs).unwrap() < 1e-12);
                }
            }
        }

        #[test]
        fn graded_jacobi(a in arb_superpoly(1), b in arb_superpoly(1), c in arb_superpoly(1)) {
            // {A,{B,C}} = {{A,B},C} + (−1)^{|A||B|} {B,{A,C}}
            for (pa, ah) in split(&a).iter().enumerate() {
                for (pb, bh) in split(&b).iter().enumerate() {
                    for ch in split(&c).iter() {
                        let lhs = ah.epb(&bh.epb(ch).unwrap()).unwrap();
                        let r1 = ah.epb(bh).unwrap().epb(ch).unwrap();
                        let r2 = bh.epb(&ah.epb(ch).unwrap()).unwrap().scale(C64::new(sgn(pa, pb), 0.0));
                        prop_assert!(lhs.distance(&(&r1 + &r2)).unwrap() < 1e-9);
                    }
                }
            }
        }

        #[test]
        fn leibniz_rule(a in arb_superpoly(1), b in arb_superpoly(1), c in arb_superpoly(1)) {
            // {A, BC} = {A,B}C + (−1)^{|A||B|} B{A,C}
            for (pa, ah) in split(&a).iter().enumerate() {
                for (pb, bh) in split(&b).iter().enumerate() {
                    let lhs = ah.epb(&(bh * &c)).unwrap();
                    let rhs = &(&ah.epb(bh).unwrap() * &c) + &(bh * &ah.epb(&c).unwrap()).scale(C64::new(sgn(pa, pb), 0.0));
                    prop_assert!(lhs.distance(&rhs).unwrap() < 1e-9);
                }
            }
        }

        #[test]
        fn jacobi_n2(a in arb_superpoly(2), b in arb_superpoly(2), c in arb_superpoly(2)) {
            for (pa, ah) in split(&a).iter().enumerate() {
                for (pb, bh) in split(&b).iter().enumerate() {
                    let lhs = ah.epb(&bh.epb(&c).unwrap()).unwrap();
                    let r1 = ah.epb(bh).unwrap().epb(&c).unwrap();
                    let r2 = bh.epb(&ah.epb(&c).unwrap()).unwrap().scale(C64::new(sgn(pa, pb), 0.0));
                    prop_assert!(lhs.distance(&(&r1 + &r2)).unwrap() < 1e-9);
                }
            }
        }
    }
}
