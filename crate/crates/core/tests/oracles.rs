//! Library results checked against independently computed values.
//!
//! Each oracle is either an exact rational worked out by hand or a
//! brute-force composite Simpson integral written here from the model
//! definitions, sharing no code with the library's quadrature.

use approx::assert_abs_diff_eq;
use shadecraft::mech::MechanismKind;
use shadecraft::opt::maximize_scalar;
use shadecraft::payoff::{
    competition_distribution, directional_derivative, first_price_payoff, linear_payoff_curve,
    linear_payoff_derivative, payoff_derivative_alpha, payoff_quadrature,
};
use shadecraft::numeric::spline::HermiteSpline;
use shadecraft::shade::{equilibrium_shading, one_vs_uniform_shading};
use shadecraft::{DistributionModel, ShadingStrategy};

/// Composite Simpson rule with `n` (even) panels.
fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * i as f64);
    }
    s * h / 3.0
}

fn uniforms(n: usize) -> Vec<DistributionModel> {
    vec![DistributionModel::uniform(); n]
}

/// `P(max(0, psi(Y_1), ..) <= t)` for `m` truthful uniform competitors.
fn uniform_competition_cdf(m: usize, t: f64) -> f64 {
    if t < 0.0 {
        0.0
    } else {
        ((t + 1.0) / 2.0).min(1.0).powi(m as i32)
    }
}

#[test]
fn truthful_payoff_closed_integrals() {
    let u = DistributionModel::uniform();
    let s = ShadingStrategy::truthful(&u);
    // Against two: integral of (1 - x) x^2 over [1/2, 1].
    let two = payoff_quadrature(&u, &s, &competition_distribution(&uniforms(2)).unwrap()).unwrap();
    assert_abs_diff_eq!(two.mean, 11.0 / 192.0, epsilon = 1e-12);
    // Against one: integral of (1 - x) x over [1/2, 1].
    let one = payoff_quadrature(&u, &s, &competition_distribution(&uniforms(1)).unwrap()).unwrap();
    assert_abs_diff_eq!(one.mean, 1.0 / 12.0, epsilon = 1e-12);
    // Brute force of the same integrand.
    let brute = simpson(|x| (1.0 - x) * uniform_competition_cdf(2, 2.0 * x - 1.0), 0.5, 1.0, 2000);
    assert_abs_diff_eq!(brute, 11.0 / 192.0, epsilon = 1e-12);
}

#[test]
fn one_strategic_payoff_piecewise_oracle() {
    let u = DistributionModel::uniform();
    let s = one_vs_uniform_shading(&u, 3, 0.0).unwrap();
    let z = competition_distribution(&uniforms(2)).unwrap();
    let q = payoff_quadrature(&u, &s, &z).unwrap().mean;
    // Limit strategy: virtualized bid (2/3)(x - 1/2) above 1/2 and 0 below,
    // where the atom P(Z = 0) = 1/4 is won at zero price.
    let v = |x: f64| 2.0 / 3.0 * (x - 0.5);
    let upper = simpson(|x| (x - v(x)) * uniform_competition_cdf(2, v(x)), 0.5, 1.0, 2000);
    let lower = simpson(|x| x * 0.25, 0.0, 0.5, 2);
    let closed = (16.0 - 1.5f64.powi(4)) / 108.0 + 1.0 / 32.0;
    assert_abs_diff_eq!(upper + lower, closed, epsilon = 1e-12);
    assert_abs_diff_eq!(q, closed, epsilon = 1e-5);
    assert_abs_diff_eq!(closed, 0.132523, epsilon = 5e-7);

    // The [0, 1/2] part is carried entirely by the atom.
    let atom_part = simpson(
        |x| {
            let v = s.virtualized(x);
            (x - v) * z.cdf(v)
        },
        0.0,
        0.5,
        2000,
    );
    assert_abs_diff_eq!(atom_part, 1.0 / 32.0, epsilon = 1e-5);
    assert_abs_diff_eq!(q - atom_part, (16.0 - 1.5f64.powi(4)) / 108.0, epsilon = 1e-5);
}

#[test]
fn alpha_derivative_closed_form() {
    let u = DistributionModel::uniform();
    for n in 2..=6usize {
        let d = payoff_derivative_alpha(&u, &uniforms(n - 1), 1.0).unwrap();
        let p = 2f64.powi(n as i32);
        assert_abs_diff_eq!(d, -(p - 1.0) / (n as f64 * 2.0 * p), epsilon = 1e-6);
    }
    // Five bidders: -31/320.
    assert_abs_diff_eq!(payoff_derivative_alpha(&u, &uniforms(4), 1.0).unwrap(), -31.0 / 320.0, epsilon = 1e-6);
}

#[test]
fn linear_shading_limits() {
    let u = DistributionModel::uniform();
    let curve = linear_payoff_curve(&u, &uniforms(1), MechanismKind::Myerson, &[1e-3, 1.0]).unwrap();
    // alpha -> 0: win exactly when X >= 1/2 and Y <= 1/2, paying nothing.
    let limit = simpson(|x| x * 0.5, 0.5, 1.0, 2);
    assert_abs_diff_eq!(limit, 3.0 / 16.0, epsilon = 1e-15);
    assert!((curve[0].1 - 3.0 / 16.0).abs() / (3.0 / 16.0) < 0.02);
    assert_abs_diff_eq!(curve[1].1, 1.0 / 12.0, epsilon = 1e-10);
    // Strictly decreasing on a 50-point grid for two bidders.
    let alphas: Vec<f64> = (1..=50).map(|i| i as f64 / 50.0).collect();
    let c = linear_payoff_curve(&u, &uniforms(1), MechanismKind::Myerson, &alphas).unwrap();
    assert!(c.windows(2).all(|w| w[1].1 < w[0].1));
}

/// Payoff of bidding `alpha x` in a second-price auction with monopoly
/// reserves against truthful uniforms, by a double Simpson integral.
fn vcg_linear_brute(m: usize, alpha: f64, eager: bool) -> f64 {
    // Reserve fitted to the bid law alpha * U[0, 1] is alpha / 2; the
    // competitors' reserves are 1/2.
    let r1 = alpha / 2.0;
    simpson(
        |x| {
            let b = alpha * x;
            if b < r1 {
                return 0.0;
            }
            // Highest competing bid among those that count.
            let top_cdf = |y: f64| {
                if eager {
                    if y < 0.5 { 0.5f64.powi(m as i32) } else { y.min(1.0).powi(m as i32) }
                } else {
                    y.clamp(0.0, 1.0).powi(m as i32)
                }
            };
            if top_cdf(b) == 0.0 {
                return 0.0;
            }
            // E[(x - max(r1, Y)) 1{Y <= b}] with Y the counted maximum.
            let mut v = (x - r1) * top_cdf(r1.min(b));
            if b > r1 {
                v += simpson(|y| (x - y) * density(&top_cdf, y), r1, b, 400);
            }
            v
        },
        0.0,
        1.0,
        400,
    )
}

fn density<F: Fn(f64) -> f64>(cdf: &F, y: f64) -> f64 {
    let h = 1e-6;
    (cdf(y + h) - cdf(y - h)) / (2.0 * h)
}

#[test]
fn vcg_linear_payoff_matches_brute_force() {
    let u = DistributionModel::uniform();
    for (m, eager) in [(1, false), (2, false), (2, true)] {
        let kind = if eager { MechanismKind::VcgEager } else { MechanismKind::VcgLazy };
        for alpha in [0.6, 0.9, 1.0] {
            let lib = linear_payoff_curve(&u, &uniforms(m), kind, &[alpha]).unwrap()[0].1;
            let brute = vcg_linear_brute(m, alpha, eager);
            assert!((lib - brute).abs() < 2e-4, "m {m} eager {eager} alpha {alpha}: {lib} vs {brute}");
        }
        let d = linear_payoff_derivative(&u, &uniforms(m), kind, 1.0).unwrap();
        assert!(d < -1e-3);
    }
}

#[test]
fn equilibrium_matches_first_price() {
    let u = DistributionModel::uniform();
    for k in [2usize, 3, 5] {
        let eq = equilibrium_shading(&u, k).unwrap();
        let z = competition_distribution(&vec![eq.bid_model(); k - 1]).unwrap();
        let shaded = payoff_quadrature(&u, &eq, &z).unwrap();
        // First price with k uniforms: integral of (x / k) x^(k-1).
        let fp = 1.0 / (k as f64 * (k as f64 + 1.0));
        assert_abs_diff_eq!(first_price_payoff(&u, k).unwrap(), fp, epsilon = 1e-10);
        assert_abs_diff_eq!(shaded.mean, fp, epsilon = 1e-5);
        let truthful = payoff_quadrature(&u, &ShadingStrategy::truthful(&u), &competition_distribution(&uniforms(k - 1)).unwrap()).unwrap();
        assert!(shaded.mean > truthful.mean);
        // Total revenue: E[second highest of k] = (k-1)/(k+1) under the
        // equilibrium, E[(2 max - 1)^+] when truthful.
        assert_abs_diff_eq!(k as f64 * shaded.seller_revenue, (k as f64 - 1.0) / (k as f64 + 1.0), epsilon = 1e-8);
        let kf = k as f64;
        let truthful_rev = simpson(|x| (2.0 * x - 1.0) * kf * x.powi(k as i32 - 1), 0.5, 1.0, 2000);
        assert_abs_diff_eq!(kf * truthful.seller_revenue, truthful_rev, epsilon = 1e-10);
    }
    assert_abs_diff_eq!(3.0 * 17.0 / 96.0, 17.0 / 32.0, epsilon = 1e-15);
}

#[test]
fn directional_derivative_oracles() {
    let u = DistributionModel::uniform();
    let xs: Vec<f64> = (0..=32).map(|i| i as f64 / 32.0).collect();
    let identity = HermiteSpline::new(xs.clone(), xs.clone(), vec![1.0; xs.len()]);
    let z = competition_distribution(&uniforms(2)).unwrap();
    let truthful = ShadingStrategy::truthful(&u);
    let d = directional_derivative(&u, &truthful, &identity, &z).unwrap();
    assert_abs_diff_eq!(d.value, -7.0 / 48.0, epsilon = 1e-8);
    let zero = HermiteSpline::new(xs.clone(), vec![0.0; xs.len()], vec![0.0; xs.len()]);
    assert_eq!(directional_derivative(&u, &truthful, &zero, &z).unwrap().value, 0.0);
}

#[test]
fn scalar_optimizer_matches_brute_force() {
    let u = DistributionModel::uniform();
    let z = competition_distribution(&uniforms(5)).unwrap();
    let pay = |a: f64| payoff_quadrature(&u, &ShadingStrategy::linear_unchecked(&u, a), &z).unwrap().mean;
    let o = maximize_scalar(pay, 0.01, 1.0, 1e-9).unwrap();
    let (mut ba, mut bv) = (0.0, f64::NEG_INFINITY);
    for i in 0..10_000 {
        let a = 0.01 + 0.99 * i as f64 / 9_999.0;
        let v = pay(a);
        if v > bv {
            ba = a;
            bv = v;
        }
    }
    assert!((o.value - bv).abs() < 1e-4 && o.value >= bv - 1e-12);
    assert!((o.argmax - ba).abs() < 1e-3, "{} vs {ba}", o.argmax);
    // Two bidders: the payoff keeps rising as alpha shrinks.
    let z2 = competition_distribution(&uniforms(1)).unwrap();
    let o = maximize_scalar(|a| payoff_quadrature(&u, &ShadingStrategy::linear_unchecked(&u, a), &z2).unwrap().mean, 0.01, 1.0, 1e-9).unwrap();
    assert_eq!(o.argmax, 0.01);
}
