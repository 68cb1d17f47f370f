use super::Context;
use crate::report::{Cell, Report};
use anyhow::{ensure, Result};
use kvnlab::gauge::{
    ab_spectra, landau_constants_of_motion, landau_fd_check, landau_quantum_levels, landau_spectrum, AbParams, GaugeField,
};

pub fn landau(ctx: &Context, out: &mut Report) -> Result<()> {
    let c = ctx.cfg;
    let field = GaugeField::landau(c.f64_or("b", 1.0)?).with_coupling(c.f64_or("coupling", 1.0)?);
    let mass = c.f64_or("mass", 1.0)?;
    let n_tr = c.usize_or("n_tr", 40)?;
    let fd_points = c.usize_or("fd_points", 128)?;
    let fd_half_width = c.f64_or("fd_half_width", 8.0)?;
    let fd_shell = c.usize_or("fd_shell", 10)?;
    let hbar = c.f64_or("hbar", 1.0)?;
    let p_z = c.f64_or("p_z", 0.0)?;
    let quantum_count = c.usize_or("quantum_levels", 5)?;
    c.finish()?;
    let omega = field.cyclotron_frequency(mass)?;
    ensure!(omega != 0.0, "[landau] the field must be non-zero");

    let spectrum = landau_spectrum(&field, mass, n_tr)?;
    let mut off_lattice: f64 = 0.0;
    let mut degeneracy_ok = true;
    for level in &spectrum.levels {
        let units = level.value / omega;
        off_lattice = off_lattice.max((units - units.round()).abs());
        degeneracy_ok &= level.degeneracy == n_tr - (units.round() as i64).unsigned_abs() as usize;
    }
    out.check(format!("classical levels are integer multiples of omega (N_tr = {n_tr})"), off_lattice, ctx.tol(1e-12));
    out.outcome("degeneracy of N omega is N_tr - |N|", degeneracy_ok, 0.0);

    let fd = landau_fd_check(&field, mass, fd_points, fd_half_width, fd_shell)?;
    out.check(
        format!("finite-difference eigenvalues cluster at integers ({fd_points}^2 grid, shell {fd_shell}), units of omega"),
        fd.max_deviation,
        0.05,
    );

    let quantum = landau_quantum_levels(&field, mass, hbar, quantum_count, p_z)?;
    let ground = quantum.levels[0].value - p_z * p_z / (2.0 * mass);
    out.check("quantum ground level keeps the zero-point term hbar omega / 2", (ground - 0.5 * hbar * omega.abs()).abs(), 1e-12);

    for (name, residual) in landau_constants_of_motion(&field, mass)? {
        out.check(format!("[{name}, H] = 0"), residual, 1e-12);
    }

    let mut rows: Vec<Vec<Cell>> = spectrum
        .levels
        .iter()
        .map(|l| vec![Cell::from(format!("classical {}", l.label)), l.value.into(), l.degeneracy.into()])
        .collect();
    rows.extend(fd.clusters.iter().map(|(n, count)| {
        vec![Cell::from(format!("fd N={n}")), Cell::from(*n as f64 * omega.abs()), Cell::from(*count)]
    }));
    rows.extend(
        quantum.levels.iter().map(|l| vec![Cell::from(format!("quantum {}", l.label)), l.value.into(), l.degeneracy.into()]),
    );
    out.csv("landau.csv", &["label", "eigenvalue", "degeneracy"], rows)
}

pub fn ab(ctx: &Context, out: &mut Report) -> Result<()> {
    let c = ctx.cfg;
    let alphas = c.f64_list_or("alpha", &[0.0, 0.1])?;
    let levels = c.pairs_or("levels", &[(1, 0), (2, 1)])?;
    let base = AbParams {
        alpha: 0.0,
        radius: c.f64_or("radius", 1.0)?,
        levels: levels
            .iter()
            .map(|&(k, m)| {
                ensure!(k >= 1, "[ab] levels: k must be at least 1, found {k}");
                Ok((k as usize, m))
            })
            .collect::<Result<_>>()?,
        p_z: c.f64_or("p_z", 0.0)?,
        lambda_z: c.f64_or("lambda_z", 0.0)?,
        mu: c.f64_or("mu", 1.0)?,
        hbar: c.f64_or("hbar", 1.0)?,
        ..Default::default()
    };
    c.finish()?;
    let tol = ctx.tol(1e-10);
    let mut rows = Vec::new();
    for &alpha in &alphas {
        let s = ab_spectra(&AbParams { alpha, ..base.clone() })?;
        let identical = s.classical.identical(tol);
        out.check(
            format!("alpha = {alpha}: classical radial spectra with and without flux coincide"),
            s.classical.matrix_difference.max(s.classical.spectrum_difference),
            tol,
        );
        if alpha == 0.0 {
            let gap = s.quantum.values().iter().zip(s.quantum_free.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            out.check("alpha = 0: quantum spectra with and without flux coincide", gap, 0.0);
        }
        for &(k, m) in &base.levels {
            let level = s.quantum.find(&format!("k={k},m={m}")).expect("every requested level is labelled");
            rows.push(vec![Cell::from(alpha), Cell::from(k), Cell::from(m), Cell::from(level.value), Cell::from(identical)]);
        }
    }
    out.csv("ab.csv", &["alpha", "k", "m", "E_quantum", "E_classical_flag"], rows)
}
