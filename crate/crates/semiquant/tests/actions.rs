//! Integration checks of the action series against independent
//! x-parametrized quadrature and cross-form identities.

use semiquant::action::ActionEvaluator;
use semiquant::numerics::gauss::GaussLegendre;
use semiquant::numerics::roots::brent;
use semiquant::{Expr, SymbolFamily};

/// `int_0^T g(x(t)) dt = int g / sqrt(E - V) dx` for `xi^2 + V` with even
/// `V` and `g`, using `x = x_E (1 - u^2)` to remove the endpoint singularity.
fn time_integral_even(v: &dyn Fn(f64) -> f64, g: &dyn Fn(f64) -> f64, e: f64) -> f64 {
    let xe = brent(|x| v(x) - e, 0.0, 10.0, 1e-16).unwrap();
    let gl = GaussLegendre::new(60);
    2.0 * gl.integrate(0.0, 1.0, |u| {
        let x = xe * (1.0 - u * u);
        g(x) * 2.0 * xe * u / (e - v(x)).sqrt()
    })
}

/// `B(3/4, 1/2) = Gamma(3/4) Gamma(1/2) / Gamma(5/4)`, evaluated to 25
/// digits with an arbitrary-precision library.
const BETA_3_4_1_2: f64 = 2.396_280_469_471_184_414_9;

/// Flow-oriented S2 of `xi^2 + x^4`: `int_0^T V'' dt = 6 E^{1/4} B` so
/// `S2 = -(1/12) d/dE int_0^T V'' dt = -B E^{-3/4} / 8`.
fn oracle_s2_pure_quartic(e: f64) -> f64 {
    -BETA_3_4_1_2 * e.powf(-0.75) / 8.0
}

/// Flow-oriented S2 of `xi^2 + x^2 + 0.2 x^4` via the angle substitution
/// `V(x) = E sin^2(theta)` on `[0, x_E]`, differentiated under the
/// integral sign:
/// `int_0^T V'' dt = 4 int_0^{pi/2} sqrt(E) sin(theta) V''(x) / V'(x) d theta`.
fn oracle_s2_anharmonic(e: f64) -> f64 {
    let inv = |y: f64| (((1.0 + 0.8 * y).sqrt() - 1.0) / 0.4).sqrt();
    let v1 = |x: f64| 2.0 * x + 0.8 * x.powi(3);
    let v2 = |x: f64| 2.0 + 2.4 * x * x;
    let v3 = |x: f64| 4.8 * x;
    let gl = GaussLegendre::new(80);
    let d_integral = 4.0
        * gl.integrate(0.0, std::f64::consts::FRAC_PI_2, |th| {
            let s = th.sin();
            let x = inv(e * s * s);
            let ratio = v2(x) / v1(x);
            let d_ratio = (v3(x) * v1(x) - v2(x) * v2(x)) / v1(x).powi(2);
            s / e.sqrt() * 0.5 * ratio + 2.0 * e.sqrt() * s * d_ratio * s * s / v1(x) * 0.5
        });
    -d_integral / 12.0
}

#[test]
fn schrodinger_s2_matches_closed_form_oracles() {
    let cases: [(&str, fn(f64) -> f64); 2] = [
        ("x^4", oracle_s2_pure_quartic),
        ("x^2 + 0.2*x^4", oracle_s2_anharmonic),
    ];
    for (src, oracle) in cases {
        let sym = SymbolFamily::schrodinger(Expr::parse(src).unwrap());
        let eval = ActionEvaluator::new(&sym);
        for e in [0.4, 0.8, 1.2, 1.6, 2.0] {
            let s2 = eval.s2(e).unwrap();
            let want = oracle(e);
            let rel = (s2 - want).abs() / want.abs();
            assert!(rel < 1e-8, "{src} E={e}: {s2} vs {want} (rel {rel:e})");
        }
    }
}

#[test]
fn quartic_period_and_action_match_oracles() {
    let v = |x: f64| x.powi(4);
    let sym = SymbolFamily::schrodinger(Expr::parse("x^4").unwrap());
    let eval = ActionEvaluator::new(&sym);
    for e in [0.5, 1.0, 1.7] {
        let t = time_integral_even(&v, &|_| 1.0, e);
        assert!((eval.period(e).unwrap() - t).abs() < 1e-9 * t);
        // S0 = int xi x' dt = int 2 xi^2 dt = 2 int (E - V) dt
        let s0 = 2.0 * time_integral_even(&v, &|x| e - x.powi(4), e);
        assert!((eval.s0(e).unwrap() - s0).abs() < 1e-8 * s0);
    }
}

fn builtins() -> Vec<(SymbolFamily, Vec<f64>)> {
    let grid = |lo: f64, hi: f64| (0..10).map(|k| lo + (hi - lo) * k as f64 / 9.0).collect();
    vec![
        (SymbolFamily::harmonic(), grid(0.3, 3.0)),
        (SymbolFamily::schrodinger(Expr::parse("x^4").unwrap()), grid(0.3, 2.5)),
        (
            SymbolFamily::tilted(Expr::parse("x").unwrap(), Expr::parse("x^2").unwrap()),
            grid(0.3, 2.5),
        ),
        (SymbolFamily::quartic_kinetic(Expr::parse("x^2").unwrap()), grid(0.3, 2.5)),
        (SymbolFamily::harper(), grid(0.2, 1.8)),
    ]
}

#[test]
fn delta_and_gamma_forms_agree_for_builtins() {
    for (sym, energies) in builtins() {
        let eval = ActionEvaluator::new(&sym);
        for e in energies {
            let a = eval.s2(e).unwrap();
            let b = eval.s2_gamma_form(e).unwrap();
            assert!(
                (a - b).abs() <= 1e-6 * (1.0 + a.abs()),
                "{} E={e}: {a} vs {b}",
                sym.name
            );
        }
    }
}

#[test]
fn action_derivative_equals_period_for_builtins() {
    for (sym, energies) in builtins() {
        let eval = ActionEvaluator::new(&sym);
        for e in energies {
            let t = eval.period(e).unwrap();
            let d = eval.ds0_de(e).unwrap();
            assert!((d - t).abs() <= 1e-6 * t, "{} E={e}: {d} vs {t}", sym.name);
        }
    }
}

#[test]
fn doubling_samples_leaves_actions_unchanged() {
    let sym = SymbolFamily::schrodinger(Expr::parse("x^2 + 0.2*x^4").unwrap());
    let auto = ActionEvaluator::new(&sym);
    let n = auto.integrals(1.1, None).unwrap().steps;
    let fine = ActionEvaluator::with_steps(&sym, 2 * n);
    let (a, b) = (auto.series(1.1).unwrap(), fine.series(1.1).unwrap());
    assert!((a.s0 - b.s0).abs() < 1e-9 * a.s0.abs());
    assert!((a.s2 - b.s2).abs() < 1e-9 * (1.0 + a.s2.abs()));
}
