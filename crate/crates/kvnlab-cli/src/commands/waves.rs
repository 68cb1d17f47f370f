use super::Context;
use crate::report::{Cell, Report};
use anyhow::{bail, ensure, Result};
use kvnlab::dynamics::{
    coefficient_of_variation, count_minima, free_gaussian, liouville_evolve, moments, moments_1d, nsm_classical,
    nsm_quantum, schrodinger_evolve, two_slit_raw, Hamiltonian, LiouvilleOptions, Moments, SlitConfig,
    SlitMode, SlitOpen, Wave2D,
};
use kvnlab::numerics::Grid1;

fn hamiltonian(ctx: &Context, mass: f64) -> Result<(Hamiltonian, Option<f64>)> {
    match ctx.cfg.str_or("potential", "free")?.as_str() {
        "free" => Ok((Hamiltonian::Free { mass }, None)),
        "harmonic" => {
            let omega = ctx.cfg.f64_or("omega", 1.0)?;
            Ok((Hamiltonian::Harmonic { mass, omega }, Some(omega)))
        }
        other => bail!("[evolve] potential: expected \"free\" or \"harmonic\", found {other:?}"),
    }
}

/// Gaussian moments under a quadratic Hamiltonian; `b` is the momentum
/// width (`ħ/a` for the quantum packet).
fn exact_moments(a: f64, b: f64, p_i: f64, mass: f64, omega: Option<f64>, t: f64) -> Moments {
    match omega {
        None => Moments {
            q_mean: p_i * t / mass,
            p_mean: p_i,
            q_var: a * a / 2.0 + b * b * t * t / (2.0 * mass * mass),
            p_var: b * b / 2.0,
        },
        Some(w) => {
            let (s, c) = (w * t).sin_cos();
            let mw = mass * w;
            Moments {
                q_mean: p_i * s / mw,
                p_mean: p_i * c,
                q_var: a * a / 2.0 * c * c + b * b / (2.0 * mw * mw) * s * s,
                p_var: mw * mw * a * a / 2.0 * s * s + b * b / 2.0 * c * c,
            }
        }
    }
}

fn moment_error(got: &Moments, want: &Moments) -> f64 {
    let mean = |g: f64, w: f64, var: f64| (g - w).abs() / var.sqrt();
    let var = |g: f64, w: f64| (g - w).abs() / w;
    [
        mean(got.q_mean, want.q_mean, want.q_var),
        mean(got.p_mean, want.p_mean, want.p_var),
        var(got.q_var, want.q_var),
        var(got.p_var, want.p_var),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

pub fn evolve(ctx: &Context, out: &mut Report) -> Result<()> {
    let cfg = ctx.cfg;
    let kind = cfg.str_or("kind", "classical")?;
    let mass = cfg.f64_or("mass", 1.0)?;
    let (h, omega) = hamiltonian(ctx, mass)?;
    let (a, b, p_i, hbar) = (cfg.f64_or("a", 1.0)?, cfg.f64_or("b", 1.0)?, cfg.f64_or("p_i", 2.0)?, cfg.f64_or("hbar", 1.0)?);
    let times = cfg.f64_list_or("times", &[0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0])?;
    let points = cfg.usize_or("points", 512)?;
    let half_width = cfg.f64_or("half_width", 8.0)?;
    let norm_tol = cfg.f64_or("norm_tol", 1e-6)?;
    cfg.finish()?;
    let tol = ctx.tol(5e-3);
    ensure!(times.iter().all(|t| *t >= 0.0 && t.is_finite()), "times must be finite and non-negative");
    let mut rows = Vec::new();
    let mut worst_norm: f64 = 0.0;
    let mut worst_moment: f64 = 0.0;
    match kind.as_str() {
        "classical" => {
            let step = 2.0 * half_width / points as f64;
            let grids = [Grid1::centered(0.0, step, points)?, Grid1::centered(p_i, step, points)?];
            let psi0 = Wave2D::double_gaussian(grids, a, b, p_i);
            for &t in &times {
                let psi = liouville_evolve(&h, &psi0, t, &LiouvilleOptions::default())?;
                worst_norm = worst_norm.max((psi.norm_sq() - 1.0).abs());
                let m = moments(&psi)?;
                worst_moment = worst_moment.max(moment_error(&m, &exact_moments(a, b, p_i, mass, omega, t)));
                rows.push(vec![Cell::from(t), m.q_mean.into(), m.p_mean.into(), m.q_var.into(), m.p_var.into()]);
            }
        }
        "quantum" => {
            let reach = p_i.abs() * times.iter().cloned().fold(0.0, f64::max) / mass;
            let grid = Grid1::span(-half_width - reach, half_width + reach, points)?;
            let psi0 = free_gaussian(grid, a, p_i, hbar);
            for &t in &times {
                let psi = schrodinger_evolve(&h, &psi0, t, hbar, &Default::default())?;
                worst_norm = worst_norm.max((psi.norm_sq() - psi0.norm_sq()).abs());
                let m = moments_1d(&psi, hbar)?;
                worst_moment = worst_moment.max(moment_error(&m, &exact_moments(a, hbar / a, p_i, mass, omega, t)));
                rows.push(vec![Cell::from(t), m.q_mean.into(), m.p_mean.into(), m.q_var.into(), m.p_var.into()]);
            }
        }
        other => bail!("[evolve] kind: expected \"classical\" or \"quantum\", found {other:?}"),
    }
    out.check(format!("{kind} moments match the closed-form Gaussian values (relative)"), worst_moment, tol);
    out.check("norm drift", worst_norm, norm_tol);
    out.csv("evolve.csv", &["t", "q_mean", "p_mean", "q_var", "p_var"], rows)
}

fn slit_mode(s: &str) -> Result<SlitMode> {
    Ok(match s {
        "classical" => SlitMode::Classical,
        "quantum" => SlitMode::Quantum,
        "simplified" => SlitMode::Simplified,
        other => bail!("[two-slit] mode: expected classical, quantum or simplified, found {other:?}"),
    })
}

pub fn two_slit(ctx: &Context, out: &mut Report) -> Result<()> {
    let c = ctx.cfg;
    let mode_name = c.str_or("mode", "quantum")?;
    let mode = slit_mode(&mode_name)?;
    let cfg = SlitConfig {
        x_a: c.f64_or("x_a", 0.5)?,
        delta: c.f64_or("delta", 0.1)?,
        y_f: c.f64_or("y_f", 1.0)?,
        y_s: c.f64_or("y_s", 2.0)?,
        p_y0: c.f64_or("p_y0", 1.0)?,
        a: c.f64_or("a", 1.0)?,
        b: c.f64_or("b", 1.0)?,
        m: c.f64_or("m", 1.0)?,
        hbar: c.f64_or("hbar", 1.0)?,
    };
    let grid = Grid1::span(c.f64_or("x_min", -20.0)?, c.f64_or("x_max", 20.0)?, c.usize_or("points", 4001)?)?;
    let floor = c.f64_or("floor", 1e-6)?;
    let expect = c.opt_usize("expect_minima")?;
    c.finish()?;
    let profile = kvnlab::dynamics::two_slit(&cfg, mode, grid)?;
    let minima = count_minima(&profile.values, floor)?;
    out.note(format!("mode {mode_name}, t_F = {}, t_S = {}, minima = {minima}", cfg.t_f(), cfg.t_s()));
    if let Some(want) = expect {
        out.outcome(format!("screen profile has {want} minima"), minima == want, minima as f64);
    }
    if mode == SlitMode::Classical {
        let raw = |open| two_slit_raw(&cfg, mode, open, grid, None);
        let (both, first, second) = (raw(SlitOpen::Both)?, raw(SlitOpen::First)?, raw(SlitOpen::Second)?);
        let worst = (0..grid.count).map(|i| (both.values[i] - first.values[i] - second.values[i]).abs()).fold(0.0, f64::max);
        out.check("classical additivity |P_both - P_1 - P_2| / max P", worst / both.max(), ctx.tol(1e-6));
    }
    let rows = grid.points().zip(&profile.values).map(|(x, p)| vec![Cell::from(x), Cell::from(*p)]).collect();
    out.csv("two-slit.csv", &["x", "P"], rows)
}

fn profile_rows(grid: &Grid1, values: &[f64]) -> Vec<Vec<Cell>> {
    grid.points().zip(values).map(|(x, p)| vec![Cell::from(x), Cell::from(*p)]).collect()
}

pub fn nsm(ctx: &Context, out: &mut Report) -> Result<()> {
    let c = ctx.cfg;
    let kind = c.str_or("kind", "classical")?;
    let mass = c.f64_or("mass", 1.0)?;
    let tau = c.f64_or("tau", 1.0)?;
    let a = c.f64_or("a", 1.0)?;
    let p_i = c.f64_or("p_i", if kind == "classical" { 1.0 } else { 0.0 })?;
    match kind.as_str() {
        "classical" => {
            let b = c.f64_or("b", 1.0)?;
            let points = c.usize_or("points", 512)?;
            let half_width = c.f64_or("half_width", 8.0)?;
            c.finish()?;
            let step = 2.0 * half_width / points as f64;
            let grids = [Grid1::centered(0.0, step, points)?, Grid1::centered(p_i, step, points)?];
            let psi0 = Wave2D::double_gaussian(grids, a, b, p_i);
            let r = nsm_classical(&Hamiltonian::Free { mass }, &psi0, tau, &LiouvilleOptions::default())?;
            out.check("classical density with and without measurement, max |difference|", r.max_abs_difference(), ctx.tol(1e-6));
            let (gq, gp) = (r.grids[0], r.grids[1]);
            let marginal = |rho: &[f64]| rho.chunks(gp.count).map(|row| row.iter().sum::<f64>() * gp.step).collect::<Vec<_>>();
            out.csv("nsm.csv", &["x", "P"], profile_rows(&gq, &marginal(&r.rho_nsm)))?;
            out.csv("nsm-free.csv", &["x", "P"], profile_rows(&gq, &marginal(&r.rho_free)))
        }
        "quantum" => {
            let hbar = c.f64_or("hbar", 1.0)?;
            let sigma = c.f64_or("sigma", 0.01)?;
            let points = c.usize_or("points", 2048)?;
            let step = c.f64_or("step", 0.02)?;
            let window = c.f64_list_or("window", &[-5.0, 5.0])?;
            c.finish()?;
            ensure!(window.len() == 2 && window[0] < window[1], "[nsm] window must be [lo, hi]");
            let grid = Grid1::centered(0.0, step, points)?;
            let r = nsm_quantum(&free_gaussian(grid, a, p_i, hbar), mass, hbar, tau, sigma)?;
            let cv = coefficient_of_variation(&r.rho_nsm, &grid, window[0], window[1]);
            let cv_free = coefficient_of_variation(&r.rho_free, &grid, window[0], window[1]);
            out.note(format!("coefficient of variation without measurement: {cv_free}"));
            out.check("post-measurement density is flat (coefficient of variation)", cv, ctx.tol(0.05));
            out.csv("nsm.csv", &["x", "P"], profile_rows(&grid, &r.rho_nsm))?;
            out.csv("nsm-free.csv", &["x", "P"], profile_rows(&grid, &r.rho_free))
        }
        other => bail!("[nsm] kind: expected \"classical\" or \"quantum\", found {other:?}"),
    }
}
