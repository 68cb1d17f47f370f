//! Polynomials in the phase-space coordinates.

use crate::grassmann::{slot_of, Label};
use crate::{Error, Result, C64};
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Exponent vector over the internal slots `0..2n`.
pub type Monomial = Vec<u32>;

/// Complex polynomial in `φ¹…φ^{2n}` (internal ordering).
#[derive(Clone, PartialEq)]
pub struct PolyField {
    n: usize,
    terms: BTreeMap<Monomial, C64>,
}

impl fmt::Debug for PolyField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PolyField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})", format_coeff(*c))?;
            for (slot, &e) in m.iter().enumerate() {
                if e > 0 {
                    let l = crate::grassmann::label_of(slot + 1);
                    if e == 1 {
                        write!(f, "*{l}")?;
                    } else {
                        write!(f, "*{l}^{e}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn format_coeff(c: C64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.re == 0.0 {
        format!("{}i", c.im)
    } else {
        format!("{}{:+}i", c.re, c.im)
    }
}

impl PolyField {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: C64) -> Self {
        let mut p = Self::zero(n);
        p.add_term(vec![0; 2 * n], c);
        p
    }

    pub fn real(n: usize, c: f64) -> Self {
        Self::constant(n, C64::new(c, 0.0))
    }

    /// Coordinate at internal 0-based slot.
    pub fn var(n: usize, slot: usize) -> Self {
        let mut m = vec![0; 2 * n];
        m[slot] = 1;
        Self::monomial(n, m, C64::new(1.0, 0.0))
    }

    pub fn coord(n: usize, label: Label) -> Self {
        Self::var(n, slot_of(label))
    }

    pub fn q(n: usize, i: usize) -> Self {
        Self::coord(n, Label::Q(i))
    }

    pub fn p(n: usize, i: usize) -> Self {
        Self::coord(n, Label::P(i))
    }

    pub fn monomial(n: usize, m: Monomial, c: C64) -> Self {
        let mut p = Self::zero(n);
        p.add_term(m, c);
        p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C64)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.iter().sum()).max().unwrap_or(0)
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: C64) {
        if c == C64::default() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == C64::default() {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = Self::zero(self.n);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * s);
        }
        out
    }

    pub fn conj(&self) -> Self {
        let mut out = Self::zero(self.n);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.conj());
        }
        out
    }

    /// `∂/∂φ^{slot}`.
    pub fn deriv(&self, slot: usize) -> Self {
        let mut out = Self::zero(self.n);
        for (m, c) in &self.terms {
            if m[slot] > 0 {
                let mut m2 = m.clone();
                m2[slot] -= 1;
                out.add_term(m2, c * m[slot] as f64);
            }
        }
        out
    }

    /// Mixed partial derivative with multi-index `alpha`.
    pub fn deriv_multi(&self, alpha: &[u32]) -> Self {
        let mut out = self.clone();
        for (slot, &k) in alpha.iter().enumerate() {
            for _ in 0..k {
                out = out.deriv(slot);
            }
        }
        out
    }

    pub fn eval(&self, point: &[f64]) -> C64 {
        self.terms
            .iter()
            .map(|(m, c)| c * m.iter().zip(point).map(|(&e, &x)| x.powi(e as i32)).product::<f64>())
            .sum()
    }

    /// Real part of [`eval`](Self::eval), for real Hamiltonians.
    pub fn eval_re(&self, point: &[f64]) -> f64 {
        self.eval(point).re
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Drop coefficients with modulus ≤ `tol`.
    pub fn prune(&self, tol: f64) -> Self {
        Self { n: self.n, terms: self.terms.iter().filter(|(_, c)| c.norm() > tol).map(|(m, c)| (m.clone(), *c)).collect() }
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        check_n(self.n, o.n)?;
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), *c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        check_n(self.n, o.n)?;
        let mut out = Self::zero(self.n);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                out.add_term(ma.iter().zip(mb).map(|(a, b)| a + b).collect(), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::real(self.n, 1.0), |acc, _| &acc * self)
    }

    /// Parse an expression in `q, p` (n = 1), `q1, p1, q2, …`, or the aliases
    /// `x, y, z` / `px, py, pz` for `q1, q2, q3` / `p1, p2, p3`.
    ///
    /// Grammar: sums of products of factors with integer powers, real numeric
    /// literals, `i` for the imaginary unit, parentheses and division by
    /// constants.
    pub fn parse(n: usize, src: &str) -> Result<Self> {
        let mut p = Parser { n, s: src.as_bytes(), pos: 0 };
        let out = p.expr()?;
        p.ws();
        if p.pos != p.s.len() {
            return Err(Error::Parse(format!("unexpected input at byte {} in `{src}`", p.pos)));
        }
        Ok(out)
    }
}

fn check_n(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch(format!("polynomials over n = {a} and n = {b}")));
    }
    Ok(())
}

impl Add<&PolyField> for &PolyField {
    type Output = PolyField;
    fn add(self, o: &PolyField) -> PolyField {
        self.try_add(o).expect("polynomials with different n")
    }
}

impl Sub<&PolyField> for &PolyField {
    type Output = PolyField;
    fn sub(self, o: &PolyField) -> PolyField {
        self + &(-o)
    }
}

impl Mul<&PolyField> for &PolyField {
    type Output = PolyField;
    fn mul(self, o: &PolyField) -> PolyField {
        self.try_mul(o).expect("polynomials with different n")
    }
}

impl Neg for &PolyField {
    type Output = PolyField;
    fn neg(self) -> PolyField {
        self.scale(C64::new(-1.0, 0.0))
    }
}

struct Parser<'a> {
    n: usize,
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).copied()
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at byte {}", self.pos))
    }

    fn expr(&mut self) -> Result<PolyField> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -&self.term()?
            }
            Some(b'+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        while let Some(c) = self.peek() {
            match c {
                b'+' => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                b'-' => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<PolyField> {
        let mut acc = self.power()?;
        while let Some(c) = self.peek() {
            match c {
                b'*' => {
                    self.pos += 1;
                    acc = &acc * &self.power()?;
                }
                b'/' => {
                    self.pos += 1;
                    let d = self.power()?;
                    let c = constant_value(&d).ok_or_else(|| self.err("division by a non-constant"))?;
                    if c == C64::default() {
                        return Err(self.err("division by zero"));
                    }
                    acc = acc.scale(1.0 / c);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<PolyField> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.ws();
            let start = self.pos;
            while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let k: u32 = std::str::from_utf8(&self.s[start..self.pos])
                .unwrap()
                .parse()
                .map_err(|_| self.err("expected a non-negative integer exponent"))?;
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<PolyField> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(-&self.power()?)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.pos;
                while self.pos < self.s.len()
                    && (self.s[self.pos].is_ascii_digit()
                        || self.s[self.pos] == b'.'
                        || ((self.s[self.pos] == b'e' || self.s[self.pos] == b'E')
                            && self.s.get(self.pos + 1).is_some_and(|b| b.is_ascii_digit() || *b == b'-')))
                {
                    if self.s[self.pos] == b'e' || self.s[self.pos] == b'E' {
                        self.pos += 1;
                    }
                    self.pos += 1;
                }
                let v: f64 = std::str::from_utf8(&self.s[start..self.pos])
                    .unwrap()
                    .parse()
                    .map_err(|_| self.err("malformed number"))?;
                Ok(PolyField::real(self.n, v))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.s.len() && self.s[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
                self.variable(name)
            }
            _ => Err(self.err("expected a number, variable or `(`")),
        }
    }

    fn variable(&self, name: &str) -> Result<PolyField> {
        if name == "i" {
            return Ok(PolyField::constant(self.n, crate::I));
        }
        let label = match name {
            "q" => Label::Q(1),
            "p" => Label::P(1),
            "x" => Label::Q(1),
            "y" => Label::Q(2),
            "z" => Label::Q(3),
            "px" => Label::P(1),
            "py" => Label::P(2),
            "pz" => Label::P(3),
            _ => {
                let (head, idx) = name.split_at(1);
                let i: usize = idx.parse().map_err(|_| self.err(&format!("unknown variable `{name}`")))?;
                match head {
                    "q" => Label::Q(i),
                    "p" => Label::P(i),
                    _ => return Err(self.err(&format!("unknown variable `{name}`"))),
                }
            }
        };
        let i = match label {
            Label::Q(i) | Label::P(i) => i,
        };
        if i == 0 || i > self.n {
            return Err(self.err(&format!("variable `{name}` outside n = {}", self.n)));
        }
        Ok(PolyField::coord(self.n, label))
    }
}

fn constant_value(p: &PolyField) -> Option<C64> {
    match p.terms.len() {
        0 => Some(C64::default()),
        1 => {
            let (m, c) = p.terms.iter().next().unwrap();
            m.iter().all(|&e| e == 0).then_some(*c)
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_and_derivatives() {
        let h = PolyField::parse(1, "p^2/2 + q^4").unwrap();
        assert_eq!(h.eval_re(&[2.0, 3.0]), 2.0 + 81.0); // slots: p, q
        let dq = h.deriv(1);
        assert_eq!(dq, PolyField::parse(1, "4*q^3").unwrap());
        assert_eq!(h.deriv(0), PolyField::p(1, 1));
        let h2 = PolyField::parse(2, "(px - y)^2/2 + py^2/2").unwrap();
        assert_eq!(h2.eval_re(&[1.0, 0.0, 0.0, 3.0]), 2.0);
        assert!(PolyField::parse(1, "q2").is_err());
        assert!(PolyField::parse(1, "q/p").is_err());
        assert!(PolyField::parse(1, "q +").is_err());
        assert_eq!(PolyField::parse(1, "q - q").unwrap(), PolyField::zero(1));
        assert_eq!(PolyField::parse(1, "-q^2").unwrap().eval_re(&[0.0, 2.0]), -4.0);
        assert_eq!(PolyField::parse(1, "1.5e-1*q").unwrap().eval_re(&[0.0, 2.0]), 0.3);
    }

    proptest! {
        #[test]
        fn product_rule(a in proptest::collection::vec(-3i32..4, 6), b in proptest::collection::vec(-3i32..4, 6)) {
            let mk = |c: &[i32]| {
                let mut p = PolyField::zero(1);
                let monos = [[0,0],[1,0],[0,1],[2,0],[1,1],[0,3]];
                for (k, m) in monos.iter().enumerate() {
                    p.add_term(m.to_vec(), C64::new(c[k] as f64, 0.0));
                }
                p
            };
            let (f, g) = (mk(&a), mk(&b));
            for s in 0..2 {
                let lhs = (&f * &g).deriv(s);
                let rhs = &(&f.deriv(s) * &g) + &(&f * &g.deriv(s));
                prop_assert_eq!(lhs, rhs);
            }
        }
    }
}
