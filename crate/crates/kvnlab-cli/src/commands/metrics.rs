use super::Context;
use crate::report::{Cell, Report};
use anyhow::{bail, Context as _, Result};
use kvnlab::cartan::PolyField;
use kvnlab::metric::{build_metric, classify, hermiticity_report, metric_eigenvalues, nogo_scan, Definiteness, MetricKind, MetricSpec};
use kvnlab::grassmann::{slot_of, Label};
use kvnlab::C64;

const DEFAULT_METRICS: [&str; 4] = ["svh", "gauge", "symplectic", "gen-symplectic(b=2)"];
const DEFAULT_HAMILTONIANS: [&str; 3] = ["p^2/2 + q^2/2", "p^2/2 + q^2/2 + q^3/3", "p^2/2 + q^4/4"];

/// `name` or `name(key=value,...)`, e.g. `gen-gauge-a(theta=0.3,gamma=1,g03=0)`.
fn parse_metric(spec: &str) -> Result<MetricKind> {
    let spec = spec.trim();
    let (name, args) = match spec.split_once('(') {
        Some((name, rest)) => {
            let Some(inner) = rest.strip_suffix(')') else { bail!("metric {spec:?}: missing ')'") };
            (name.trim(), inner)
        }
        None => (spec, ""),
    };
    let mut params = std::collections::BTreeMap::new();
    for kv in args.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = kv.split_once('=').with_context(|| format!("metric {spec:?}: expected key=value, got {kv:?}"))?;
        let v: f64 = v.trim().parse().with_context(|| format!("metric {spec:?}: {k} is not a number"))?;
        params.insert(k.trim().to_string(), v);
    }
    let mut take = |k: &str| params.remove(k).with_context(|| format!("metric {spec:?} needs {k}"));
    let kind = match name {
        "svh" => MetricKind::Svh,
        "gauge" => MetricKind::Gauge,
        "symplectic" => MetricKind::Symplectic,
        "gen-symplectic" => MetricKind::GenSymplectic { b: take("b")? },
        "gen-gauge-a" => MetricKind::GenGaugeA { theta: take("theta")?, gamma: take("gamma")?, g03: C64::new(take("g03")?, 0.0) },
        "gen-gauge-b" => MetricKind::GenGaugeB { theta: take("theta")?, b: take("b")?, g03: C64::new(take("g03")?, 0.0) },
        other => bail!("unknown metric {other:?}"),
    };
    if let Some(k) = params.keys().next() {
        bail!("metric {spec:?}: unexpected parameter {k}");
    }
    Ok(kind)
}

fn label(kind: MetricKind) -> String {
    match kind.params() {
        p if p.is_empty() => kind.name().to_string(),
        p => format!("{}({p})", kind.name()),
    }
}

fn definiteness(d: Definiteness) -> &'static str {
    match d {
        Definiteness::PositiveDefinite => "positive-definite",
        Definiteness::NegativeDefinite => "negative-definite",
        Definiteness::Indefinite => "indefinite",
        Definiteness::Degenerate => "degenerate",
    }
}

struct Inputs {
    metrics: Vec<MetricSpec>,
    hamiltonians: Vec<(String, PolyField)>,
}

fn inputs(ctx: &Context) -> Result<Inputs> {
    let n = ctx.cfg.usize_or("n", 1)?;
    let metrics = ctx
        .cfg
        .str_list_or("metrics", &DEFAULT_METRICS)?
        .iter()
        .map(|s| Ok(build_metric(parse_metric(s)?, n)?))
        .collect::<Result<Vec<_>>>()?;
    let hamiltonians = ctx
        .cfg
        .str_list_or("hamiltonians", &DEFAULT_HAMILTONIANS)?
        .into_iter()
        .map(|s| {
            let h = PolyField::parse(n, &s).with_context(|| format!("Hamiltonian {s:?}"))?;
            Ok((s, h))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Inputs { metrics, hamiltonians })
}

const COLUMNS: [&str; 8] = ["metric", "kind", "param", "H", "hermitian", "residual", "min_eig", "max_eig"];

fn table_rows(inp: &Inputs, tol: f64) -> Result<Vec<Vec<Cell>>> {
    let mut rows = Vec::new();
    for m in &inp.metrics {
        let ev = metric_eigenvalues(m);
        let kind = definiteness(classify(&ev, 1e-12));
        for (label, h) in &inp.hamiltonians {
            let r = hermiticity_report(h, m)?;
            rows.push(vec![
                Cell::from(m.kind().name()),
                Cell::from(kind),
                Cell::from(m.kind().params()),
                Cell::from(label.as_str()),
                Cell::from(r.residual <= tol),
                Cell::from(r.residual),
                Cell::from(ev[0]),
                Cell::from(ev[ev.len() - 1]),
            ]);
        }
    }
    Ok(rows)
}

/// SvH Hermiticity holds iff `F^a_d = ω^{ab}∂_b∂_dH` is antisymmetric.
fn svh_hessian_criterion(h: &PolyField) -> bool {
    let n = h.n();
    let slots: Vec<(usize, usize, f64)> = (1..=n)
        .flat_map(|i| [(slot_of(Label::Q(i)), slot_of(Label::P(i)), 1.0), (slot_of(Label::P(i)), slot_of(Label::Q(i)), -1.0)])
        .collect();
    let f = |a: usize, d: usize| {
        let &(_, b, sign) = slots.iter().find(|s| s.0 == a).expect("slot");
        h.deriv(b).deriv(d).scale(C64::new(sign, 0.0))
    };
    (0..2 * n).all(|a| (a..2 * n).all(|d| (&f(a, d) + &f(d, a)).is_zero()))
}

pub fn metric_report(ctx: &Context, out: &mut Report) -> Result<()> {
    let inp = inputs(ctx)?;
    ctx.cfg.finish()?;
    let tol = ctx.tol(kvnlab::metric::HERMITIAN_TOL);
    for m in &inp.metrics {
        let g = m.matrix();
        let asym = (g - g.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        out.check(format!("{} metric matrix is Hermitian", label(m.kind())), asym, tol);
        for (label, h) in &inp.hamiltonians {
            let expected = match m.kind() {
                MetricKind::Svh => svh_hessian_criterion(h),
                MetricKind::Gauge | MetricKind::Symplectic => true,
                _ => continue,
            };
            let r = hermiticity_report(h, m)?;
            out.outcome(
                format!("{} verdict for H = {label} is {} as predicted", m.kind().name(), if expected { "hermitian" } else { "non-hermitian" }),
                (r.residual <= tol) == expected,
                r.residual,
            );
        }
    }
    out.note("hermitian column: residual of g H - H^dagger g against the tolerance");
    out.csv("metric-report.csv", &COLUMNS, table_rows(&inp, tol)?)
}

pub fn nogo(ctx: &Context, out: &mut Report) -> Result<()> {
    let inp = inputs(ctx)?;
    ctx.cfg.finish()?;
    let tol = ctx.tol(kvnlab::metric::HERMITIAN_TOL);
    let hs: Vec<PolyField> = inp.hamiltonians.iter().map(|(_, h)| h.clone()).collect();
    let table = nogo_scan(&hs, &inp.metrics)?;
    out.note(format!(
        "finite scan: {} Hamiltonians x {} metrics; 'for all H' means every scanned Hamiltonian",
        hs.len(),
        inp.metrics.len()
    ));
    for row in &table.rows {
        out.note(format!(
            "{}: positive={} hermitian_for_all={}",
            label(row.metric),
            row.positive,
            row.hermitian_for_all()
        ));
    }
    let offenders = table.rows.iter().filter(|r| r.positive && r.hermitian_for_all()).count();
    out.outcome("no scanned metric is positive definite and Hermitian for every Hamiltonian", table.confirms_nogo(), offenders as f64);
    out.csv("nogo.csv", &COLUMNS, table_rows(&inp, tol)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metric_specs() {
        assert_eq!(parse_metric("svh").unwrap(), MetricKind::Svh);
        assert_eq!(parse_metric(" gen-symplectic( b = 2 )").unwrap(), MetricKind::GenSymplectic { b: 2.0 });
        assert!(matches!(parse_metric("gen-gauge-a(theta=0.3,gamma=1,g03=0.5)").unwrap(), MetricKind::GenGaugeA { .. }));
        assert!(parse_metric("gen-symplectic").is_err());
        assert!(parse_metric("gen-symplectic(b=2,c=1)").is_err());
        assert!(parse_metric("euclid").is_err());
    }

    #[test]
    fn hessian_criterion() {
        let h = |s: &str| PolyField::parse(1, s).unwrap();
        assert!(svh_hessian_criterion(&h("p^2/2 + q^2/2")));
        assert!(!svh_hessian_criterion(&h("p^2/2 + q^4")));
        assert!(!svh_hessian_criterion(&h("p^2/2 + q^2")));
        assert!(!svh_hessian_criterion(&h("p^2/2 + q^2/2 + q*p")));
        assert!(svh_hessian_criterion(&PolyField::parse(2, "p1^2/2 + q1^2/2 + p2^2 + q2^2").unwrap()));
    }
}
