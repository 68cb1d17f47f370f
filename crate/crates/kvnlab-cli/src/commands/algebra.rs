use super::Context;
use crate::report::{Cell, Report};
use anyhow::{ensure, Result};
use kvnlab::cartan::PolyField;
use kvnlab::epb::{lie_bracket, nr_bracket, sn_bracket, super_hamiltonian, superfield_expand, TensorKind, TensorSpec};
use kvnlab::grassmann::{build_c, build_cbar, SectorOperator};
use kvnlab::{C64, I};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn residual(a: &SectorOperator, target: &SectorOperator) -> Result<f64> {
    Ok(a.try_sub(target)?.max_abs())
}

pub fn algebra_check(ctx: &Context, out: &mut Report) -> Result<()> {
    let ns = ctx.cfg.usize_list_or("n", &[1])?;
    ctx.cfg.finish()?;
    let tol = ctx.tol(1e-12);
    let mut rows = Vec::new();
    for n in ns {
        ensure!((1..=6).contains(&n), "n = {n} outside 1..=6");
        let d = 2 * n;
        let c: Vec<_> = (1..=d).map(|a| build_c(n, a)).collect::<Result<_, _>>()?;
        let cb: Vec<_> = (1..=d).map(|a| build_cbar(n, a)).collect::<Result<_, _>>()?;
        let zero = SectorOperator::zeros(n);
        let id = SectorOperator::identity(n);
        let mut worst: f64 = 0.0;
        let mut count = 0;
        let mut record = |name: String, r: f64| {
            worst = worst.max(r);
            count += 1;
            rows.push(vec![Cell::from(n), Cell::from(name), Cell::from(r)]);
        };
        for a in 0..d {
            for b in a..d {
                record(format!("{{c{},c{}}}=0", a + 1, b + 1), residual(&c[a].anticommutator(&c[b])?, &zero)?);
                record(format!("{{cbar{},cbar{}}}=0", a + 1, b + 1), residual(&cb[a].anticommutator(&cb[b])?, &zero)?);
            }
        }
        for a in 0..d {
            for b in 0..d {
                let target = if a == b { &id } else { &zero };
                record(format!("{{c{},cbar{}}}=delta", a + 1, b + 1), residual(&c[a].anticommutator(&cb[b])?, target)?);
            }
        }
        out.check(format!("n={n}: {count} anticommutators on the {}-dim sector", 1usize << d), worst, tol);
    }
    out.csv("algebra-check.csv", &["n", "identity", "residual"], rows)
}

fn random_poly(rng: &mut ChaCha8Rng, n: usize, max_degree: u32) -> PolyField {
    let mut p = PolyField::zero(n);
    for _ in 0..rng.gen_range(1..=3) {
        let mut m = vec![0u32; 2 * n];
        for _ in 0..rng.gen_range(0..=max_degree) {
            m[rng.gen_range(0..2 * n)] += 1;
        }
        let coeff = [-3.0, -2.0, -1.0, 1.0, 2.0, 3.0][rng.gen_range(0..6)];
        p = &p + &PolyField::monomial(n, m, C64::new(coeff, 0.0));
    }
    p
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize, max_degree: u32) -> Vec<PolyField> {
    (0..2 * n).map(|_| if rng.gen_bool(0.75) { random_poly(rng, n, max_degree) } else { PolyField::zero(n) }).collect()
}

/// Vector-valued one-form with two random entries; keys are `[form, vector]`.
fn random_vv_form(rng: &mut ChaCha8Rng, n: usize, max_degree: u32) -> Result<TensorSpec> {
    let d = 2 * n;
    let entries: Vec<(Vec<usize>, PolyField)> =
        (0..2).map(|_| (vec![rng.gen_range(0..d), rng.gen_range(0..d)], random_poly(rng, n, max_degree))).collect();
    Ok(TensorSpec::from_ascending(n, TensorKind::VectorValuedForm(1), &entries)?)
}

pub fn brackets_check(ctx: &Context, out: &mut Report) -> Result<()> {
    let n = ctx.cfg.usize_or("n", 1)?;
    let pairs = ctx.cfg.usize_or("pairs", 3)?;
    let hamiltonians = ctx.cfg.usize_or("hamiltonians", 5)?;
    let max_degree = ctx.cfg.usize_or("max_degree", 2)? as u32;
    ctx.cfg.finish()?;
    ensure!((1..=3).contains(&n), "n = {n} outside 1..=3");
    let tol = ctx.tol(1e-12);
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    out.note(format!("seed {}", ctx.seed));
    let mut rows = Vec::new();
    for k in 0..pairs {
        let (v, w) = (random_vector(&mut rng, n, max_degree), random_vector(&mut rng, n, max_degree));
        let sn = sn_bracket(&TensorSpec::vector(&v)?, &TensorSpec::vector(&w)?)?;
        let r = sn.distance(&TensorSpec::vector(&lie_bracket(&v, &w))?.hat())?;
        rows.push(vec![Cell::from("sn-vs-lie"), Cell::from(k), Cell::from(r)]);
        out.check(format!("SN bracket of vector pair {k} equals the coordinate Lie bracket"), r, tol);
    }
    for k in 0..pairs {
        let (j, l) = (random_vv_form(&mut rng, n, max_degree)?, random_vv_form(&mut rng, n, max_degree)?);
        let nr = nr_bracket(&j, &l)?;
        let direct = nr.distance(&j.hat().epb(&l.hat())?.scale(I))?;
        let back = TensorSpec::unhat(&nr, TensorKind::VectorValuedForm(1))?;
        let round_trip = back.hat().distance(&nr)?;
        rows.push(vec![Cell::from("nr"), Cell::from(k), Cell::from(direct.max(round_trip))]);
        out.check(format!("NR bracket of form pair {k} is i{{J,L}} and round-trips through unhat"), direct.max(round_trip), tol);
    }
    for k in 0..hamiltonians {
        let h = random_poly(&mut rng, n, max_degree + 2);
        let e = superfield_expand(&h)?;
        let r = e.full.berezin().scale(I).distance(&super_hamiltonian(&h))?;
        rows.push(vec![Cell::from("superfield"), Cell::from(k), Cell::from(r)]);
        out.check(format!("i * Berezin integral of H[Phi] equals the super-Hamiltonian for H = {h}"), r, tol);
    }
    out.csv("brackets-check.csv", &["identity", "sample", "residual"], rows)
}
