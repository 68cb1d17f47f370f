//! Symbolic extended Poisson brackets over `(φ, λ, c, c̄)` and the
//! generalized Lie brackets built from them.

mod superpoly;
mod tensor;

pub use superpoly::{Key, Odd, SuperPoly};
pub use tensor::{TensorKind, TensorSpec};

use crate::cartan::{omega_lower, omega_upper, PolyField};
use crate::{Error, Result, C64, I};

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `Q = i c^a λ_a`.
pub fn brs_charge(n: usize) -> SuperPoly {
    (0..2 * n).fold(SuperPoly::zero(n), |acc, a| &acc + &(&SuperPoly::c(n, a) * &SuperPoly::lambda(n, a)).scale(I))
}

/// `Q̄ = i c̄_a ω^{ab} λ_b`.
pub fn anti_brs_charge(n: usize) -> SuperPoly {
    let w = omega_upper(n);
    let mut out = SuperPoly::zero(n);
    for a in 0..2 * n {
        for b in 0..2 * n {
            if w[a][b] != 0.0 {
                out = &out + &(&SuperPoly::cbar(n, a) * &SuperPoly::lambda(n, b)).scale(I * w[a][b]);
            }
        }
    }
    out
}

/// `Q_f = c^a c̄_a`.
pub fn form_number(n: usize) -> SuperPoly {
    (0..2 * n).fold(SuperPoly::zero(n), |acc, a| &acc + &(&SuperPoly::c(n, a) * &SuperPoly::cbar(n, a)))
}

/// `K = ½ ω_{ab} c^a c^b`.
pub fn k_charge(n: usize) -> SuperPoly {
    let w = omega_lower(n);
    let mut out = SuperPoly::zero(n);
    for a in 0..2 * n {
        for b in 0..2 * n {
            if w[a][b] != 0.0 {
                out = &out + &(&SuperPoly::c(n, a) * &SuperPoly::c(n, b)).scale(real(0.5 * w[a][b]));
            }
        }
    }
    out
}

/// `K̄ = ½ ω^{ab} c̄_a c̄_b`.
pub fn kbar_charge(n: usize) -> SuperPoly {
    let w = omega_upper(n);
    let mut out = SuperPoly::zero(n);
    for a in 0..2 * n {
        for b in 0..2 * n {
            if w[a][b] != 0.0 {
                out = &out + &(&SuperPoly::cbar(n, a) * &SuperPoly::cbar(n, b)).scale(real(0.5 * w[a][b]));
            }
        }
    }
    out
}

/// `𝓗 = λ_a ω^{ab} ∂_bH + i c̄_a ω^{ad} ∂_d∂_bH c^b`.
pub fn super_hamiltonian(h: &PolyField) -> SuperPoly {
    vector_hamiltonian(&crate::cartan::hamiltonian_vector(h))
}

/// `𝓗_V = λ_a V^a + i c̄_a ∂_bV^a c^b`.
pub fn vector_hamiltonian(v: &[PolyField]) -> SuperPoly {
    let n = v.len() / 2;
    let mut out = SuperPoly::zero(n);
    for a in 0..2 * n {
        out = &out + &(&SuperPoly::lambda(n, a) * &SuperPoly::from_poly(&v[a]));
        for b in 0..2 * n {
            let dv = v[a].deriv(b);
            if !dv.is_zero() {
                let t = &(&SuperPoly::cbar(n, a) * &SuperPoly::from_poly(&dv)) * &SuperPoly::c(n, b);
                out = &out + &t.scale(I);
            }
        }
    }
    out
}

/// Cartan operation selector for [`cartan_via_epb`].
#[derive(Debug, Clone)]
pub enum CartanOp {
    /// Exterior derivative `i{Q, ·}`.
    D,
    /// Interior contraction `i{V̂, ·}`.
    Iota(Vec<PolyField>),
    /// Lie derivative `{−𝓗_V, ·}`.
    Lie(Vec<PolyField>),
    /// Raise a one-form image: `i{K̄, ·}`.
    Sharp,
    /// Lower a vector image: `i{K, ·}`.
    Flat,
    /// Poisson bracket with the given second argument.
    Pb(SuperPoly),
    /// Form-number counting `i{Q_f, ·}`.
    Degree,
}

pub fn cartan_via_epb(op: &CartanOp, arg: &SuperPoly) -> Result<SuperPoly> {
    let n = arg.n();
    let vec_check = |v: &[PolyField]| -> Result<()> {
        if v.len() != 2 * n {
            return Err(Error::DimensionMismatch(format!("{} vector components for n = {n}", v.len())));
        }
        Ok(())
    };
    match op {
        CartanOp::D => Ok(brs_charge(n).epb(arg)?.scale(I)),
        CartanOp::Iota(v) => {
            vec_check(v)?;
            Ok(TensorSpec::vector(v)?.hat().epb(arg)?.scale(I))
        }
        CartanOp::Lie(v) => {
            vec_check(v)?;
            Ok((-&vector_hamiltonian(v)).epb(arg)?)
        }
        CartanOp::Sharp => Ok(kbar_charge(n).epb(arg)?.scale(I)),
        CartanOp::Flat => Ok(k_charge(n).epb(arg)?.scale(I)),
        CartanOp::Pb(g) => poisson_bracket(arg, g),
        CartanOp::Degree => Ok(form_number(n).epb(arg)?.scale(I)),
    }
}

/// `{f, g}_pb = i{{f, Q}, {Q̄, g}}`.
pub fn poisson_bracket(f: &SuperPoly, g: &SuperPoly) -> Result<SuperPoly> {
    let n = f.n();
    let left = f.epb(&brs_charge(n))?;
    let right = anti_brs_charge(n).epb(g)?;
    Ok(left.epb(&right)?.scale(I))
}

fn require(t: &TensorSpec, want: fn(TensorKind) -> bool, what: &str) -> Result<()> {
    if !want(t.kind()) {
        return Err(Error::InvalidParameter(format!("expected a {what}, got {:?}", t.kind())));
    }
    Ok(())
}

/// `𝓗_P = {Q, P̂}` for a multivector.
pub fn multivector_hamiltonian(p: &TensorSpec) -> Result<SuperPoly> {
    require(p, |k| matches!(k, TensorKind::Multivector(_)), "multivector")?;
    brs_charge(p.n()).epb(&p.hat())
}

/// Schouten-Nijenhuis bracket image `−{{Q, P̂}, R̂}`.
pub fn sn_bracket(p: &TensorSpec, r: &TensorSpec) -> Result<SuperPoly> {
    require(r, |k| matches!(k, TensorKind::Multivector(_)), "multivector")?;
    Ok(-&multivector_hamiltonian(p)?.epb(&r.hat())?)
}

/// `𝓗_J = {Ĵ, Q}` for a vector-valued form.
pub fn vv_form_hamiltonian(j: &TensorSpec) -> Result<SuperPoly> {
    require(j, |k| matches!(k, TensorKind::VectorValuedForm(_)), "vector-valued form")?;
    j.hat().epb(&brs_charge(j.n()))
}

/// Frölicher-Nijenhuis bracket image, the `λ`-free part of `−{𝓗_J, L̂}`.
///
/// For forms of positive degree the full bracket also carries terms
/// `λ_i J^i_a L^a… c…` with vanishing `{·, Q}`; dropping them leaves the
/// unique hat-image element `X̂` with `{X̂, Q} = −{𝓗_J, 𝓗_L}`.
pub fn fn_bracket(j: &TensorSpec, l: &TensorSpec) -> Result<SuperPoly> {
    require(l, |k| matches!(k, TensorKind::VectorValuedForm(_)), "vector-valued form")?;
    Ok((-&vv_form_hamiltonian(j)?.epb(&l.hat())?).lambda_free())
}

/// Nijenhuis-Richardson bracket image `i{Ĵ, L̂}`.
pub fn nr_bracket(j: &TensorSpec, l: &TensorSpec) -> Result<SuperPoly> {
    require(j, |k| matches!(k, TensorKind::VectorValuedForm(_)), "vector-valued form")?;
    require(l, |k| matches!(k, TensorKind::VectorValuedForm(_)), "vector-valued form")?;
    Ok(j.hat().epb(&l.hat())?.scale(I))
}

/// Coordinate Lie bracket `[V, W]^a = V^b∂_bW^a − W^b∂_bV^a`.
pub fn lie_bracket(v: &[PolyField], w: &[PolyField]) -> Vec<PolyField> {
    (0..v.len())
        .map(|a| {
            (0..v.len()).fold(PolyField::zero(v[0].n()), |acc, b| {
                &(&acc + &(&v[b] * &w[a].deriv(b))) - &(&w[b] * &v[a].deriv(b))
            })
        })
        .collect()
}

/// Superfield `Φ^a = φ^a + θ c^a + θ̄ ω^{ab} c̄_b + i θ̄θ ω^{ab} λ_b`.
pub fn superfield(n: usize, slot: usize) -> SuperPoly {
    let w = omega_upper(n);
    let (th, thb) = (SuperPoly::theta(n), SuperPoly::theta_bar(n));
    let mut out = &SuperPoly::phi(n, slot) + &(&th * &SuperPoly::c(n, slot));
    for b in 0..2 * n {
        if w[slot][b] != 0.0 {
            out = &out + &(&thb * &SuperPoly::cbar(n, b)).scale(real(w[slot][b]));
            out = &out + &(&(&thb * &th) * &SuperPoly::lambda(n, b)).scale(I * w[slot][b]);
        }
    }
    out
}

/// Components of `H(Φ) = H + θN − θ̄N̄ + iθθ̄𝓗`.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperfieldExpansion {
    pub h: SuperPoly,
    pub n_h: SuperPoly,
    pub nbar_h: SuperPoly,
    pub curly_h: SuperPoly,
    /// The full expansion `H(Φ)`.
    pub full: SuperPoly,
}

/// Split a superspace function `F = A + θB − θ̄C + iθθ̄D` into `(A, B, C, D)`.
pub fn theta_components(f: &SuperPoly) -> (SuperPoly, SuperPoly, SuperPoly, SuperPoly) {
    let a = f.theta_free();
    let b = f.d_left(Odd::Theta).theta_free();
    let c = -&f.d_left(Odd::ThetaBar).theta_free();
    let d = f.d_left(Odd::Theta).d_left(Odd::ThetaBar).scale(-I);
    (a, b, c, d)
}

pub fn superfield_expand(h: &PolyField) -> Result<SuperfieldExpansion> {
    let n = h.n();
    let images: Vec<SuperPoly> = (0..2 * n).map(|a| superfield(n, a)).collect();
    let full = SuperPoly::compose_poly(h, &images)?;
    let (h0, n_h, nbar_h, curly_h) = theta_components(&full);
    Ok(SuperfieldExpansion { h: h0, n_h, nbar_h, curly_h, full })
}
