//! Acceptance run: one PASS/FAIL line per criterion with the measured
//! quantity and wall time. Exits non-zero if any criterion fails.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use semiquant::action::ActionEvaluator;
use semiquant::airy::{
    ansatz_check, master_residual_scan, taylor_check, AnsatzOptions, PotentialSeries,
    TransportCoefficients, DEFAULT_ANSATZ_H, DEFAULT_ETAS,
};
use semiquant::bs::{gram_zero_scan, quantize};
use semiquant::numerics::fit::loglog_slope;
use semiquant::numerics::gauss::GaussLegendre;
use semiquant::reference::{reference_spectrum, GridSpec};
use semiquant::wkb::residual::grid_residual;
use semiquant::wkb::Base;
use semiquant::{Expr, SymbolFamily};
use semiquant_cli::compare::run_convergence;
use std::time::{Duration, Instant};

struct Outcome {
    pass: bool,
    detail: String,
}

type Check = fn() -> Result<Outcome, String>;

fn quartic() -> SymbolFamily {
    SymbolFamily::schrodinger(Expr::parse("x^4").unwrap())
}

fn builtins() -> Vec<SymbolFamily> {
    vec![
        SymbolFamily::harmonic(),
        quartic(),
        SymbolFamily::tilted(Expr::parse("x").unwrap(), Expr::parse("x^2").unwrap()),
        SymbolFamily::quartic_kinetic(Expr::parse("x^2").unwrap()),
        SymbolFamily::harper(),
    ]
}

fn energies(sym: &SymbolFamily) -> Vec<f64> {
    let (lo, hi) = if sym.name == "harper" { (0.2, 1.8) } else { (0.3, 2.5) };
    (0..10).map(|k| lo + (hi - lo) * k as f64 / 9.0).collect()
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn harmonic_exactness() -> Result<Outcome, String> {
    let h = 0.1;
    let r = quantize(&SymbolFamily::harmonic(), h, (0.05, 2.5)).map_err(err)?;
    // physical index k = n - 1 gives E = (2k + 1) h
    let worst = r
        .entries
        .iter()
        .map(|l| (l.energy - (2 * (l.n - 1) + 1) as f64 * h).abs())
        .fold(0.0, f64::max);
    Ok(Outcome {
        pass: r.entries.len() == 13 && worst < 1e-9,
        detail: format!("{} roots, max |E - (2k+1)h| = {worst:.3e}", r.entries.len()),
    })
}

fn harmonic_reference() -> Result<Outcome, String> {
    let sym = SymbolFamily::harmonic();
    let h = 0.1;
    let bs = quantize(&sym, h, (0.05, 2.4)).map_err(err)?;
    let grid = GridSpec::new(1024, 12.0);
    let reference = reference_spectrum(&sym, h, (-1.0, 2.5), grid, false).map_err(err)?;
    let worst = bs
        .entries
        .iter()
        .zip(&reference.eigenvalues)
        .take(12)
        .map(|(l, e)| (l.energy - e).abs())
        .fold(0.0, f64::max);
    Ok(Outcome {
        pass: bs.entries.len() >= 12 && reference.eigenvalues.len() >= 12 && worst < 1e-7,
        detail: format!("12 lowest levels, max |E_bs - E_ref| = {worst:.3e}"),
    })
}

fn quartic_convergence() -> Result<Outcome, String> {
    let hs = [0.1, 0.05, 0.025, 0.0125];
    let r = run_convergence(&quartic(), &hs, (0.3, 2.0), 5, Some(1024), Some(3.0)).map_err(err)?;
    let slope = r.slope.ok_or("no slope")?;
    let errors: Vec<String> = r.errors.iter().map(|(h, e)| format!("{h}:{e:.2e}")).collect();
    Ok(Outcome {
        pass: r.errors.len() == 4 && r.runs.iter().all(|run| run.pairs.len() >= 5) && slope >= 3.5,
        detail: format!("slope {slope:.3} (errors {})", errors.join(" ")),
    })
}

/// `B(3/4, 1/2)`, evaluated to 25 digits with an arbitrary-precision library.
const BETA_3_4_1_2: f64 = 2.396_280_469_471_184_414_9;

/// `-(1/12) d/dE int_0^T V'' dt` for `V = x^4`.
fn oracle_pure_quartic(e: f64) -> f64 {
    -BETA_3_4_1_2 * e.powf(-0.75) / 8.0
}

/// Same for `V = x^2 + 0.2 x^4`, with `V = E sin^2(theta)` and the
/// E-derivative taken under the integral sign.
fn oracle_anharmonic(e: f64) -> f64 {
    let inv = |y: f64| (((1.0 + 0.8 * y).sqrt() - 1.0) / 0.4).sqrt();
    let v1 = |x: f64| 2.0 * x + 0.8 * x.powi(3);
    let v2 = |x: f64| 2.0 + 2.4 * x * x;
    let v3 = |x: f64| 4.8 * x;
    let gl = GaussLegendre::new(80);
    let d = 4.0
        * gl.integrate(0.0, std::f64::consts::FRAC_PI_2, |th| {
            let s = th.sin();
            let x = inv(e * s * s);
            let ratio = v2(x) / v1(x);
            let d_ratio = (v3(x) * v1(x) - v2(x) * v2(x)) / v1(x).powi(2);
            s / e.sqrt() * 0.5 * ratio + e.sqrt() * s * d_ratio * s * s / v1(x)
        });
    -d / 12.0
}

fn schrodinger_s2() -> Result<Outcome, String> {
    let cases: [(&str, fn(f64) -> f64); 2] = [("x^4", oracle_pure_quartic), ("x^2 + 0.2*x^4", oracle_anharmonic)];
    let mut worst: f64 = 0.0;
    for (src, oracle) in cases {
        let sym = SymbolFamily::schrodinger(Expr::parse(src).unwrap());
        let eval = ActionEvaluator::new(&sym);
        for e in [0.4, 0.8, 1.2, 1.6, 2.0] {
            let s2 = eval.s2(e).map_err(err)?;
            worst = worst.max((s2 - oracle(e)).abs() / oracle(e).abs());
        }
    }
    Ok(Outcome {
        pass: worst < 1e-8,
        detail: format!("max relative error {worst:.3e} over 10 energies"),
    })
}

fn gamma_form() -> Result<Outcome, String> {
    let mut worst: f64 = 0.0;
    for sym in builtins() {
        let eval = ActionEvaluator::new(&sym);
        for e in energies(&sym) {
            let a = eval.s2(e).map_err(err)?;
            let b = eval.s2_gamma_form(e).map_err(err)?;
            worst = worst.max((a - b).abs() / (1.0 + a.abs()));
        }
    }
    Ok(Outcome {
        pass: worst <= 1e-6,
        detail: format!("max |s2 - s2_gamma|/(1+|s2|) = {worst:.3e}"),
    })
}

fn period_identity() -> Result<Outcome, String> {
    let mut worst: f64 = 0.0;
    for sym in builtins() {
        let eval = ActionEvaluator::new(&sym);
        for e in energies(&sym) {
            let t = eval.period(e).map_err(err)?;
            let d = eval.ds0_de(e).map_err(err)?;
            worst = worst.max((d - t).abs() / t);
        }
    }
    Ok(Outcome {
        pass: worst <= 1e-6,
        detail: format!("max |dS0/dE - T|/T = {worst:.3e}"),
    })
}

fn gram_equivalence() -> Result<Outcome, String> {
    let mut worst: f64 = 0.0;
    let mut ok = true;
    let mut counts = Vec::new();
    for (sym, interval) in [(SymbolFamily::harmonic(), (0.05, 2.5)), (quartic(), (0.3, 2.0))] {
        for h in [0.1, 0.05] {
            let a = quantize(&sym, h, interval).map_err(err)?;
            let b = gram_zero_scan(&sym, h, interval).map_err(err)?;
            counts.push(format!("{}/{}", a.entries.len(), b.entries.len()));
            ok &= a.entries.len() == b.entries.len() && !a.entries.is_empty();
            for (x, y) in a.entries.iter().zip(&b.entries) {
                ok &= x.n == y.n;
                worst = worst.max((x.energy - y.energy).abs() / h);
            }
        }
    }
    Ok(Outcome {
        pass: ok && worst < 1e-3,
        detail: format!("max |E_bs - E_gram|/h = {worst:.3e}, root counts {}", counts.join(" ")),
    })
}

fn airy_taylor() -> Result<Outcome, String> {
    let mut rng = StdRng::seed_from_u64(20);
    let (mut worst_x2, mut worst_odd): (f64, f64) = (0.0, 0.0);
    for _ in 0..20 {
        let v2: f64 = rng.random_range(-1.0..=1.0);
        let v3: f64 = rng.random_range(-1.0..=1.0);
        let q0 = Expr::parse(&format!("x + ({v2:e})*x^2 + ({v3:e})*x^3")).map_err(err)?;
        let ps = PotentialSeries::new(q0).map_err(err)?;
        // Q0 = x (1 + v2 x + v3 x^2) has no other zero within |x| < 0.6
        let tc = TransportCoefficients::build_on(&ps, 0.3).map_err(err)?;
        let check = taylor_check(&ps, &tc).map_err(err)?;
        worst_x2 = worst_x2.max(check.error().ok_or("no closed form")?);
        worst_odd = worst_odd.max(check.x1_max).max(check.x3_max);
    }
    Ok(Outcome {
        pass: worst_x2 < 1e-8 && worst_odd < 1e-12,
        detail: format!("20 draws: max x2(0) error {worst_x2:.3e}, max |x1|,|x3| {worst_odd:.3e}"),
    })
}

fn reference_potential() -> Result<(PotentialSeries, TransportCoefficients), String> {
    let ps = PotentialSeries::new(Expr::parse("x + 0.3*x^2").unwrap()).map_err(err)?;
    let tc = TransportCoefficients::build(&ps).map_err(err)?;
    Ok((ps, tc))
}

fn master_residual() -> Result<Outcome, String> {
    let (ps, tc) = reference_potential()?;
    let scan = master_residual_scan(&ps, &tc, &DEFAULT_ETAS).map_err(err)?;
    let slope = scan.slope.ok_or("no slope")?;
    Ok(Outcome {
        pass: slope <= -4.8,
        detail: format!("slope {slope:.3}, residuals {:.2e} {:.2e} {:.2e}", scan.residuals[0], scan.residuals[1], scan.residuals[2]),
    })
}

fn ansatz() -> Result<Outcome, String> {
    let (ps, tc) = reference_potential()?;
    let r = ansatz_check(&ps, &tc, &DEFAULT_ANSATZ_H, AnsatzOptions::default()).map_err(err)?;
    let mid = r.fit_at(0.05).ok_or("no fit at h = 0.05")?;
    let ratio = mid.ablated_residual / mid.residual;
    let errors: Vec<String> = r.fits.iter().map(|f| format!("{:.2e}", f.phase_error)).collect();
    Ok(Outcome {
        pass: r.monotone && ratio >= 10.0,
        detail: format!("phase errors {} (monotone {}), ablation ratio {ratio:.1}", errors.join(" "), r.monotone),
    })
}

fn wkb_residual() -> Result<Outcome, String> {
    let hs = [0.1, 0.05, 0.025, 0.0125];
    let mut parts = Vec::new();
    let mut ok = true;
    for (sym, energy) in [(SymbolFamily::harmonic(), 1.0), (quartic(), 1.0)] {
        let grid = GridSpec::new(2048, 2.5);
        let res = hs
            .iter()
            .map(|&h| grid_residual(&sym, energy, h, grid, Base::Right).map(|r| r.relative()))
            .collect::<Result<Vec<f64>, _>>()
            .map_err(err)?;
        let slope = loglog_slope(&hs, &res).ok_or("no slope")?;
        ok &= slope >= 1.8;
        parts.push(format!("{} slope {slope:.3}", sym.name));
    }
    Ok(Outcome {
        pass: ok,
        detail: parts.join(", "),
    })
}

fn main() {
    let checks: [(&str, Check, Duration); 11] = [
        ("harmonic exactness", harmonic_exactness, Duration::from_secs(10)),
        ("harmonic vs reference", harmonic_reference, Duration::from_secs(60)),
        ("quartic convergence order", quartic_convergence, Duration::from_secs(600)),
        ("Schrodinger S2 reduction", schrodinger_s2, Duration::MAX),
        ("S2 form equivalence", gamma_form, Duration::MAX),
        ("period identity", period_identity, Duration::MAX),
        ("Gram/BS root equivalence", gram_equivalence, Duration::MAX),
        ("Airy Taylor check", airy_taylor, Duration::MAX),
        ("master-equation residual", master_residual, Duration::MAX),
        ("ansatz phase and 5/48 term", ansatz, Duration::MAX),
        ("WKB grid residual order", wkb_residual, Duration::MAX),
    ];
    let mut failures = 0;
    for (k, (name, check, budget)) in checks.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let (pass, detail) = match outcome {
            Ok(o) => (o.pass && elapsed <= *budget, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "[{}] criterion {:>2} {name}: {detail} ({:.2} s)",
            if pass { "PASS" } else { "FAIL" },
            k + 1,
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} of 11 criteria passed", 11 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
