//! The five experiments. Each returns the finished output bytes; nothing
//! is written until the whole computation has succeeded.

use serde_json::json;
use shadecraft::mech::fit_gp_quantiles;
use shadecraft::numeric::spline::HermiteSpline;
use shadecraft::opt::{maximize_bsp_capped, maximize_scalar, BSP_MAX_ITERS, BSP_RESTARTS};
use shadecraft::payoff::{simulate as run_simulation, trace_rounds, MonteCarloConfig};
use shadecraft::payoff::{
    bsp_payoff, bsp_payoff_gradient, competition_distribution, directional_derivative, first_price_payoff,
    linear_payoff_curve, linear_payoff_derivative, payoff_quadrature,
};
use shadecraft::shade::{equilibrium_shading, one_vs_uniform_shading, DEFAULT_EPS};
use shadecraft::{DistributionModel, Error, GpParams, MechanismKind, ShadingStrategy};

use crate::config::{
    BspOptConfig, EquilibriumDemoConfig, OneStrategicDemoConfig, ParamSpec, PayoffCurveConfig,
    SimulateConfig,
};
use crate::output::{csv_bytes, json_bytes, sig};
use crate::Failure;

const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Tolerance for the linear-shading alpha search.
const ALPHA_TOL: f64 = 1e-9;
/// Knots of each perturbation direction in the equilibrium check.
const DIRECTION_KNOTS: usize = 65;
/// Interior points on which the shading equation residual is measured.
const RESIDUAL_POINTS: usize = 1000;

pub const PAYOFF_CURVE_HEADER: [&str; 4] = ["K", "alpha", "payoff", "derivative_at_1"];
pub const ONE_STRATEGIC_HEADER: [&str; 7] =
    ["x", "truthful_bid", "linear_bid", "optimal_bid", "truthful_vbid", "linear_vbid", "optimal_vbid"];

/// Library error caused by the config's contents.
fn invalid(e: Error) -> Failure {
    Failure::Config(e.to_string())
}

fn failed(e: Error) -> Failure {
    Failure::Run(e.into())
}

fn check_k(k: usize) -> Result<(), Failure> {
    if k < 2 {
        return Err(Failure::Config(format!("need at least two bidders, got k = {k}")));
    }
    Ok(())
}

/// Rows `(K, alpha, payoff, derivative_at_1)` with the shading bidder first.
pub fn payoff_curve(cfg: &PayoffCurveConfig) -> Result<Vec<u8>, Failure> {
    let kind = cfg.mechanism;
    if !matches!(kind, MechanismKind::Myerson | MechanismKind::VcgLazy | MechanismKind::VcgEager) {
        return Err(Failure::Config(format!(
            "mechanism must be myerson, vcg-lazy or vcg-eager, got {}",
            kind.name()
        )));
    }
    if cfg.ks.is_empty() {
        return Err(Failure::Config("ks is empty".into()));
    }
    cfg.ks.iter().try_for_each(|&k| check_k(k))?;
    let alphas = match &cfg.alphas {
        Some(a) if a.is_empty() => return Err(Failure::Config("alphas is empty".into())),
        Some(a) => {
            if let Some(bad) = a.iter().find(|&&v| !(v > 0.0 && v <= 1.0)) {
                return Err(Failure::Config(format!("alpha must lie in (0, 1], got {bad}")));
            }
            a.clone()
        }
        None => cfg.alpha_grid.values()?,
    };
    let value = cfg.value.build().map_err(invalid)?;
    let competitor = cfg.competitor.as_ref().unwrap_or(&cfg.value).build().map_err(invalid)?;
    let mut rows = Vec::new();
    for &k in &cfg.ks {
        let comps = vec![competitor.clone(); k - 1];
        let curve = linear_payoff_curve(&value, &comps, kind, &alphas).map_err(failed)?;
        let slope = linear_payoff_derivative(&value, &comps, kind, 1.0).map_err(failed)?;
        for (a, p) in curve {
            rows.push(vec![k.to_string(), sig(a), sig(p), sig(slope)]);
        }
    }
    csv_bytes(&PAYOFF_CURVE_HEADER, &rows).map_err(Failure::Run)
}

fn grid(model: &DistributionModel, n: usize) -> Vec<f64> {
    let (lo, hi) = (model.support().0, model.upper_eval());
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Largest gap between the virtualized bid rebuilt from the bid map alone
/// and the target it was built to hit.
fn shading_residual(s: &ShadingStrategy) -> f64 {
    let Some(target) = s.target() else { return 0.0 };
    let plain = s.without_target();
    let xs = grid(s.value_model(), RESIDUAL_POINTS + 1);
    xs[1..RESIDUAL_POINTS].iter().map(|&x| (plain.virtualized(x) - target.eval(x)).abs()).fold(0.0, f64::max)
}

/// Largest `|directional derivative|` over a fixed set of smooth
/// perturbations of the bid.
fn max_directional(value: &DistributionModel, s: &ShadingStrategy, k: usize) -> Result<f64, Failure> {
    let z = competition_distribution(&vec![s.bid_model(); k - 1]).map_err(failed)?;
    let xs = grid(value, DIRECTION_KNOTS);
    let (lo, hi) = (xs[0], xs[DIRECTION_KNOTS - 1]);
    let directions: [fn(f64) -> f64; 5] =
        [|_| 1.0, |t| t, |t| t * t, |t| (3.0 * t).sin(), |t| (-2.0 * t).exp() - 0.5];
    let mut worst: f64 = 0.0;
    for f in directions {
        let ys = xs.iter().map(|&x| f((x - lo) / (hi - lo))).collect();
        let rho = HermiteSpline::monotone(xs.clone(), ys);
        worst = worst.max(directional_derivative(value, s, &rho, &z).map_err(failed)?.value.abs());
    }
    Ok(worst)
}

/// Payoff and total seller revenue when all `k` bidders use `s`.
fn symmetric_outcome(value: &DistributionModel, s: &ShadingStrategy, k: usize) -> Result<(f64, f64), Failure> {
    let z = competition_distribution(&vec![s.bid_model(); k - 1]).map_err(failed)?;
    let est = payoff_quadrature(value, s, &z).map_err(failed)?;
    Ok((est.mean, k as f64 * est.seller_revenue))
}

pub fn equilibrium_demo(cfg: &EquilibriumDemoConfig) -> Result<Vec<u8>, Failure> {
    check_k(cfg.k)?;
    let value = cfg.value.build().map_err(invalid)?;
    let eq = equilibrium_shading(&value, cfg.k).map_err(invalid)?;
    let (truthful_payoff, truthful_revenue) = symmetric_outcome(&value, &ShadingStrategy::truthful(&value), cfg.k)?;
    let (eq_payoff, eq_revenue) = symmetric_outcome(&value, &eq, cfg.k)?;
    let fp = first_price_payoff(&value, cfg.k).map_err(failed)?;
    let report = json!({
        "command": "equilibrium-demo",
        "version": VERSION,
        "k": cfg.k,
        "value": cfg.value,
        "truthful_payoff": truthful_payoff,
        "equilibrium_payoff": eq_payoff,
        "first_price_payoff": fp,
        "first_price_gap": (eq_payoff - fp).abs(),
        "truthful_revenue": truthful_revenue,
        "equilibrium_revenue": eq_revenue,
        "max_ode_residual": shading_residual(&eq),
        "max_directional_derivative": max_directional(&value, &eq, cfg.k)?,
    });
    json_bytes(report).map_err(Failure::Run)
}

/// Bid and virtualized-bid profiles of truthful, best linear and optimal
/// shading for one bidder against `k - 1` truthful uniforms. Payoffs go to
/// stderr.
pub fn one_strategic_demo(cfg: &OneStrategicDemoConfig) -> Result<Vec<u8>, Failure> {
    check_k(cfg.k)?;
    if cfg.points < 2 {
        return Err(Failure::Config(format!("points must be at least 2, got {}", cfg.points)));
    }
    let value = cfg.value.build().map_err(invalid)?;
    let optimal = one_vs_uniform_shading(&value, cfg.k, cfg.eps.unwrap_or(DEFAULT_EPS)).map_err(invalid)?;
    let z = competition_distribution(&vec![DistributionModel::uniform(); cfg.k - 1]).map_err(failed)?;
    let payoff = |s: &ShadingStrategy| payoff_quadrature(&value, s, &z).map(|e| e.mean);
    let best = maximize_scalar(
        |a| payoff(&ShadingStrategy::linear_unchecked(&value, a)).unwrap_or(f64::NEG_INFINITY),
        ALPHA_TOL.sqrt(),
        1.0,
        ALPHA_TOL,
    )
    .map_err(failed)?;
    let truthful = ShadingStrategy::truthful(&value);
    let linear = ShadingStrategy::linear(&value, best.argmax).map_err(failed)?;
    eprintln!(
        "payoffs: truthful {}, linear (alpha {}) {}, optimal {}",
        sig(payoff(&truthful).map_err(failed)?),
        sig(best.argmax),
        sig(best.value),
        sig(payoff(&optimal).map_err(failed)?),
    );
    let rows: Vec<Vec<String>> = grid(&value, cfg.points)
        .into_iter()
        .map(|x| {
            let mut row = vec![sig(x)];
            row.extend([&truthful, &linear, &optimal].map(|s| sig(s.bid(x))));
            row.extend([&truthful, &linear, &optimal].map(|s| sig(s.virtualized(x))));
            row
        })
        .collect();
    csv_bytes(&ONE_STRATEGIC_HEADER, &rows).map_err(Failure::Run)
}

fn truthful_params(value: &DistributionModel) -> Result<GpParams, Failure> {
    match value.as_gp() {
        Some(g) => Ok(g),
        None => fit_gp_quantiles(value).map(|(p, _)| p).map_err(invalid),
    }
}

/// Whether a library error from the optimizer stems from the config.
fn optimizer_failure(e: Error) -> Failure {
    match e {
        Error::InvalidParams(_) | Error::InvalidBracket { .. } | Error::UnsupportedShape(_) => invalid(e),
        other => Failure::Optimizer(other.to_string()),
    }
}

pub fn bsp_opt(cfg: &BspOptConfig) -> Result<Vec<u8>, Failure> {
    if cfg.competitors.is_empty() {
        return Err(Failure::Config("competitors is empty".into()));
    }
    let value = cfg.value.build().map_err(invalid)?;
    let comps = cfg.competitors.iter().map(|c| c.build()).collect::<Result<Vec<_>, _>>().map_err(invalid)?;
    let z = competition_distribution(&comps).map_err(invalid)?;
    let init = match cfg.init {
        Some(p) => GpParams::new(p.mu, p.sigma, p.xi).map_err(invalid)?,
        None => truthful_params(&value)?,
    };
    let bounds = cfg.bounds.build();
    let before = bsp_payoff(&value, init, &z).map_err(failed)?;
    let best = maximize_bsp_capped(&value, &z, init, bounds, cfg.max_iterations.unwrap_or(BSP_MAX_ITERS))
        .map_err(optimizer_failure)?;
    if !best.converged {
        return Err(Failure::Optimizer(format!(
            "no stationary point within the iteration cap; best {:?} with payoff {} and gradient norm {}",
            best.argmax,
            sig(best.value),
            sig(best.gradient_norm)
        )));
    }
    let mut report = json!({
        "command": "bsp-opt",
        "version": VERSION,
        "value": cfg.value,
        "competitors": cfg.competitors,
        "restarts": BSP_RESTARTS,
        "init": ParamSpec::from(init),
        "payoff_before": before,
        "fitted": ParamSpec::from(best.argmax),
        "payoff_after": best.value,
        "gradient_norm": best.gradient_norm,
        "iterations": best.iterations,
        "converged": best.converged,
    });
    if let Some(p) = cfg.check_point {
        let p = GpParams::new(p.mu, p.sigma, p.xi).map_err(invalid)?;
        let g = bsp_payoff_gradient(&value, p, &z).map_err(failed)?;
        report["stationarity"] = json!({
            "point": ParamSpec::from(p),
            "payoff": bsp_payoff(&value, p, &z).map_err(failed)?,
            "gradient": g.full,
            "interior_gradient": g.interior,
            "gradient_norm": g.norm(),
            "interior_gradient_norm": g.interior_norm(),
        });
    }
    json_bytes(report).map_err(Failure::Run)
}

pub fn simulate(cfg: &SimulateConfig, workers: usize) -> Result<Vec<u8>, Failure> {
    let rounds = cfg.rounds.ok_or_else(|| Failure::Config("rounds is required (config or --rounds)".into()))?;
    if rounds == 0 {
        return Err(Failure::Config("rounds must be at least 1".into()));
    }
    let seed = cfg.seed.ok_or_else(|| Failure::Config("seed is required (config or --seed)".into()))?;
    if cfg.trace > rounds {
        return Err(Failure::Config(format!("trace ({}) exceeds rounds ({rounds})", cfg.trace)));
    }
    if cfg.bidders.is_empty() {
        return Err(Failure::Config("bidders is empty".into()));
    }
    let (values, strategies): (Vec<_>, Vec<_>) =
        cfg.bidders.iter().map(|b| b.build()).collect::<Result<Vec<_>, _>>().map_err(invalid)?.into_iter().unzip();
    let bid_models: Vec<_> = strategies.iter().map(|s| s.bid_model()).collect();
    let mech = cfg.mechanism.build(&bid_models).map_err(invalid)?;
    let mc = MonteCarloConfig::new(rounds, seed).with_workers(workers);
    let summary = run_simulation(&values, &strategies, &mech, &mc).map_err(failed)?;
    let mut report = json!({
        "command": "simulate",
        "version": VERSION,
        "seed": seed,
        "rounds": rounds,
        "bidders": cfg.bidders,
        "mechanism": {
            "kind": mech.kind,
            "reserves": mech.reserves,
            "boosts": mech.boosts,
        },
        "estimate": summary.estimate,
        "win_rate": summary.win_rate,
        "mean_payment": summary.mean_payment,
    });
    if let (Some(gap), Some(gap_se)) = (summary.payment_identity_gap, summary.payment_identity_gap_se) {
        report["payment_identity_gap"] = json!(gap);
        report["payment_identity_gap_se"] = json!(gap_se);
    }
    if cfg.trace > 0 {
        let trace = trace_rounds(&values, &strategies, &mech, seed, cfg.trace).map_err(failed)?;
        report["trace"] = serde_json::to_value(trace).map_err(|e| Failure::Run(e.into()))?;
    }
    json_bytes(report).map_err(Failure::Run)
}
