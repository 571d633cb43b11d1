//! Subcommand implementations producing [`Report`]s.

use crate::compare::{grid_for, run_convergence, run_spectrum, DEFAULT_LEVELS};
use crate::config::*;
use crate::emit::{Cell, Report, Table};
use crate::error::{missing, CliError, CliResult};
use semiquant::action::ActionEvaluator;
use semiquant::airy::{airy_check, AnsatzOptions, PotentialSeries, DEFAULT_ANSATZ_H, DEFAULT_ETAS};
use semiquant::airy::transport::DEFAULT_HALF_WIDTH;
use semiquant::bs::{gram_determinant, gram_zero_scan, quantize, Level};
use semiquant::orbit::Orbit;
use semiquant::reference::reference_spectrum;
use semiquant::wkb::{gram_phase, Base, WkbSolution};
use semiquant::{Expr, SymbolFamily};
use serde_json::json;

/// Default sample count of the `wkb` and `gram` dumps.
pub const DEFAULT_SAMPLES: usize = 201;
/// Fraction of the width kept clear of each focal point in `wkb` dumps.
pub const WKB_MARGIN: f64 = 0.05;

fn require<T: Clone>(v: &Option<T>, name: &str) -> CliResult<T> {
    v.clone().ok_or_else(|| missing(name))
}

fn build_symbol(args: &SymbolArgs) -> CliResult<SymbolFamily> {
    Ok(args.spec()?.build()?)
}

fn report(table: Table, json: serde_json::Value) -> Report {
    Report {
        table,
        json,
        warnings: Vec::new(),
    }
}

fn ordered_interval(p: Pair, warnings: &mut Vec<String>) -> Option<(f64, f64)> {
    if p.0 > p.1 {
        warnings.push(format!("interval [{}, {}] is empty; nothing to compute", p.0, p.1));
        None
    } else {
        Some((p.0, p.1))
    }
}

pub fn spectrum(sym_args: &SymbolArgs, s: &SpectrumSection) -> CliResult<Report> {
    let sym = build_symbol(sym_args)?;
    let h = require(&s.h, "h")?;
    let method = s.method.unwrap_or_default();
    let with_reference = s.reference.unwrap_or(false);
    let mut columns = vec!["n", "E_bs", "E_gram", "det_residual"];
    if with_reference {
        columns.extend(["E_ref", "error"]);
    }
    let mut table = Table::new(&columns);
    let mut warnings = Vec::new();
    let Some(interval) = ordered_interval(require(&s.interval, "interval")?, &mut warnings) else {
        return Ok(Report {
            table,
            json: json!({ "h": h, "levels": [] }),
            warnings,
        });
    };
    let bs: Vec<Level> = match method {
        Method::Gram => Vec::new(),
        _ => quantize(&sym, h, interval)?.entries,
    };
    let gram: Vec<Level> = match method {
        Method::Bs => Vec::new(),
        _ => gram_zero_scan(&sym, h, interval)?.entries,
    };
    let comparison = if with_reference {
        let grid = grid_for(&sym, s.points, s.half_length, interval.1);
        Some(run_spectrum(&sym, h, interval, grid, false)?)
    } else {
        None
    };
    let mut ns: Vec<i64> = bs.iter().chain(&gram).map(|l| l.n).collect();
    ns.sort_unstable();
    ns.dedup();
    let mut levels = Vec::new();
    for n in ns {
        let e_bs = bs.iter().find(|l| l.n == n).map(|l| l.energy);
        let e_gram = gram.iter().find(|l| l.n == n).map(|l| l.energy);
        let at = e_bs.or(e_gram).expect("n comes from one of the lists");
        let det = gram_determinant(&sym, at, h)?;
        let mut row: Vec<Cell> = vec![n.into(), e_bs.into(), e_gram.into(), det.into()];
        let pair = comparison
            .as_ref()
            .and_then(|c| c.pairs.iter().find(|p| p.n == n).copied());
        if with_reference {
            row.push(pair.map(|p| p.e_ref).into());
            row.push(pair.map(|p| p.error).into());
        }
        table.push(row);
        levels.push(json!({
            "n": n, "E_bs": e_bs, "E_gram": e_gram, "det_residual": det,
            "E_ref": pair.map(|p| p.e_ref), "error": pair.map(|p| p.error),
        }));
    }
    if levels.is_empty() {
        warnings.push(format!("no levels in [{}, {}]", interval.0, interval.1));
    }
    Ok(Report {
        table,
        json: json!({ "h": h, "interval": interval, "method": method, "levels": levels }),
        warnings,
    })
}

pub fn actions(sym_args: &SymbolArgs, s: &ActionsSection) -> CliResult<Report> {
    let sym = build_symbol(sym_args)?;
    let e = require(&s.energy, "E")?;
    let series = ActionEvaluator::new(&sym).series(e)?;
    let total = s.h.map(|h| series.total(h));
    let mut table = Table::new(&["E", "S0", "S1", "S2", "period", "S_h"]);
    table.push(vec![
        e.into(),
        series.s0.into(),
        series.s1.into(),
        series.s2.into(),
        series.diagnostics.period.into(),
        total.into(),
    ]);
    let json = json!({
        "E": e, "S0": series.s0, "S1": series.s1, "S2": series.s2,
        "h": s.h, "S_h": total, "diagnostics": series.diagnostics,
    });
    Ok(report(table, json))
}

pub fn orbit(sym_args: &SymbolArgs, s: &OrbitSection) -> CliResult<Report> {
    let sym = build_symbol(sym_args)?;
    let e = require(&s.energy, "E")?;
    let orbit = match s.steps {
        Some(n) => Orbit::with_steps(&sym, e, n)?,
        None => Orbit::compute(&sym, e)?,
    };
    let mut table = Table::new(&["t", "x", "xi"]);
    table.preamble.push(format!(
        "E={},T={},x_right={},xi_right={},x_left={},xi_left={}",
        crate::emit::sci(e),
        crate::emit::sci(orbit.period),
        crate::emit::sci(orbit.focal_right.x),
        crate::emit::sci(orbit.focal_right.xi),
        crate::emit::sci(orbit.focal_left.x),
        crate::emit::sci(orbit.focal_left.xi),
    ));
    for (t, x, xi) in orbit.samples() {
        table.push(vec![t.into(), x.into(), xi.into()]);
    }
    Ok(report(table, serde_json::to_value(&orbit).expect("orbit serializes")))
}

pub fn wkb(sym_args: &SymbolArgs, s: &WkbSection) -> CliResult<Report> {
    let sym = build_symbol(sym_args)?;
    let e = require(&s.energy, "E")?;
    let h = require(&s.h, "h")?;
    let base = match s.base.unwrap_or_default() {
        BaseArg::Right => Base::Right,
        BaseArg::Left => Base::Left,
    };
    let n = s.samples.unwrap_or(DEFAULT_SAMPLES).max(2);
    let sol = WkbSolution::new(&sym, e)?;
    let (right, left) = sol.focal_points();
    let w = right.x - left.x;
    let mut table = Table::new(&["x", "re_u", "im_u", "abs_u"]);
    let mut samples = Vec::with_capacity(n);
    for k in 0..n {
        let x = left.x + w * (WKB_MARGIN + (1.0 - 2.0 * WKB_MARGIN) * k as f64 / (n - 1) as f64);
        let u = sol.eval(base, x, h)?;
        table.push(vec![x.into(), u.re.into(), u.im.into(), u.norm().into()]);
        samples.push(json!([x, u.re, u.im, u.norm()]));
    }
    let json = json!({
        "E": e, "h": h, "base": base,
        "focal_right": right, "focal_left": left,
        "columns": ["x", "re_u", "im_u", "abs_u"], "samples": samples,
    });
    Ok(report(table, json))
}

pub fn gram(sym_args: &SymbolArgs, s: &GramSection) -> CliResult<Report> {
    let sym = build_symbol(sym_args)?;
    let h = require(&s.h, "h")?;
    let mut table = Table::new(&["E", "phase_difference", "det_gram"]);
    let mut warnings = Vec::new();
    let Some((lo, hi)) = ordered_interval(require(&s.interval, "interval")?, &mut warnings) else {
        return Ok(Report {
            table,
            json: json!({ "h": h, "scan": [], "zeros": [] }),
            warnings,
        });
    };
    let n = s.samples.unwrap_or(DEFAULT_SAMPLES).max(2);
    let mut scan = Vec::with_capacity(n);
    for k in 0..n {
        let e = lo + (hi - lo) * k as f64 / (n - 1) as f64;
        let phase = gram_phase(&sym, e, h)?;
        let det = -(phase / (2.0 * h)).cos().powi(2);
        table.push(vec![e.into(), phase.into(), det.into()]);
        scan.push(json!([e, phase, det]));
    }
    let zeros = gram_zero_scan(&sym, h, (lo, hi))?;
    let json = json!({
        "h": h, "columns": ["E", "phase_difference", "det_gram"],
        "scan": scan, "zeros": zeros.entries,
    });
    Ok(Report {
        table,
        json,
        warnings,
    })
}

pub fn reference(sym_args: &SymbolArgs, s: &ReferenceSection) -> CliResult<Report> {
    let sym = build_symbol(sym_args)?;
    let h = require(&s.h, "h")?;
    let emax = require(&s.emax, "Emax")?;
    let emin = s.emin.unwrap_or(f64::NEG_INFINITY);
    let certify = s.certify.unwrap_or(true);
    let grid = grid_for(&sym, s.points, s.half_length, emax);
    let mut warnings = Vec::new();
    if sym.name == "harper" {
        warnings.push("harper on a periodic box samples band states; eigenvalues depend on the box".into());
    }
    let spectrum = reference_spectrum(&sym, h, (emin, emax), grid, certify)?;
    let mut table = Table::new(&["index", "eigenvalue", "convergence_certificate"]);
    for (k, e) in spectrum.eigenvalues.iter().enumerate() {
        table.push(vec![k.into(), (*e).into(), spectrum.certificate.into()]);
    }
    Ok(Report {
        table,
        json: serde_json::to_value(&spectrum).expect("spectrum serializes"),
        warnings,
    })
}

pub fn convergence(sym_args: &SymbolArgs, s: &ConvergenceSection) -> CliResult<Report> {
    let sym = build_symbol(sym_args)?;
    let hs = require(&s.h_list, "h-list")?.0;
    let interval = require(&s.interval, "interval")?;
    if interval.0 > interval.1 {
        return Err(CliError::Config("convergence interval is empty".into()));
    }
    let levels = s.levels.unwrap_or(DEFAULT_LEVELS);
    let mut r = run_convergence(&sym, &hs, interval.into(), levels, s.points, s.half_length)?;
    if sym.name == "harmonic" && r.slope.is_some() {
        r.slope = None;
        r.notice = Some("harmonic oscillator: the rule is exact, slope not fitted".into());
    }
    let mut table = Table::new(&["h", "n", "E_bs", "E_ref", "error"]);
    if let Some(slope) = r.slope {
        table.preamble.push(format!("slope={}", crate::emit::sci(slope)));
    }
    if let Some(notice) = &r.notice {
        table.preamble.push(format!("notice={notice}"));
    }
    for run in &r.runs {
        for p in run.pairs.iter().take(levels) {
            table.push(vec![run.h.into(), p.n.into(), p.e_bs.into(), p.e_ref.into(), p.error.into()]);
        }
    }
    let warnings = r.notice.iter().cloned().collect();
    Ok(Report {
        table,
        json: serde_json::to_value(&r).expect("report serializes"),
        warnings,
    })
}

pub fn airy(s: &AirySection) -> CliResult<Report> {
    let q0 = Expr::parse(&require(&s.q0, "Q0")?)?;
    let mut ps = PotentialSeries::new(q0)?;
    for (j, q) in [&s.q1, &s.q2, &s.q3, &s.q4].into_iter().enumerate() {
        if let Some(src) = q {
            ps = ps.with_term(j + 1, Expr::parse(src)?)?;
        }
    }
    let hs = s.h_list.clone().map(|l| l.0).unwrap_or(DEFAULT_ANSATZ_H.to_vec());
    let etas = s.eta_list.clone().map(|l| l.0).unwrap_or(DEFAULT_ETAS.to_vec());
    let defaults = AnsatzOptions::default();
    let options = AnsatzOptions {
        window: s.window.map(Into::into).unwrap_or(defaults.window),
        points: s.fit_points.unwrap_or(defaults.points),
    };
    let r = airy_check(&ps, s.half_width.unwrap_or(DEFAULT_HALF_WIDTH), &etas, &hs, options)?;
    let mut table = Table::new(&["h", "phase_error", "fit_residual", "ablated_residual"]);
    table.preamble.push(format!(
        "x2_at_zero={},closed_form={},master_residual_slope={},monotone={}",
        crate::emit::sci(r.taylor.x2_at_zero),
        crate::emit::sci(r.taylor.closed_form.unwrap_or(f64::NAN)),
        crate::emit::sci(r.master.slope.unwrap_or(f64::NAN)),
        r.ansatz.monotone,
    ));
    for f in &r.ansatz.fits {
        table.push(vec![f.h.into(), f.phase_error.into(), f.residual.into(), f.ablated_residual.into()]);
    }
    let phase_errors: Vec<_> = r.ansatz.fits.iter().map(|f| json!({"h": f.h, "phase_error": f.phase_error})).collect();
    let json = json!({
        "taylor_check": r.taylor,
        "master_residual_slope": r.master.slope,
        "master_residuals": r.master,
        "ansatz_phase_error": phase_errors,
        "ansatz": r.ansatz,
    });
    Ok(report(table, json))
}
