//! Expected payoffs of a strategic bidder.
//!
//! In a virtual-value auction a bidder with value `x` whose virtualized bid
//! is `v(x) = psi_B(beta(x))` earns `(x - v(x)) F_Z(v(x))` in expectation when
//! `v(x) >= 0`, where `Z` is the highest competing virtual bid. Everything
//! here integrates that quantity or its derivatives over the value law.

mod bsp;
mod competition;
mod monte_carlo;

use serde::{Deserialize, Serialize};

pub use bsp::{bsp_payoff, bsp_payoff_gradient, bsp_virtual_gradient, BspGradient};
pub use competition::{competition_distribution, gp_competition_ratio, CompetitionDistribution};
pub use monte_carlo::{payoff_monte_carlo, simulate, trace_rounds, MonteCarloConfig, RoundRecord, SimulationSummary};

use crate::dist::DistributionModel;
use crate::error::{Error, Result};
use crate::mech::MechanismKind;
use crate::numeric::quad::integrate_with_breaks;
use crate::numeric::spline::HermiteSpline;
use crate::shade::{first_price_bid, ShadingStrategy};

pub(crate) const QUAD_TOL: f64 = 1e-11;

/// Step of the central difference in the shading factor.
pub const ALPHA_STEP: f64 = 1e-4;

/// Expected payoffs and revenue, from quadrature or simulation.
///
/// `mean` and `se` refer to bidder 0. For quadrature estimates `se` is zero,
/// `rounds` is zero and `seller_revenue` is the expected payment collected
/// from the evaluated bidder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PayoffEstimate {
    pub mean: f64,
    #[serde(rename = "se")]
    pub std_error: f64,
    pub rounds: u64,
    pub per_bidder: Vec<f64>,
    pub per_bidder_se: Vec<f64>,
    pub seller_revenue: f64,
    pub seller_revenue_se: f64,
}

impl PayoffEstimate {
    fn exact(mean: f64, revenue: f64) -> Self {
        Self {
            mean,
            std_error: 0.0,
            rounds: 0,
            per_bidder: vec![mean],
            per_bidder_se: vec![0.0],
            seller_revenue: revenue,
            seller_revenue_se: 0.0,
        }
    }
}

/// Value-space split points for integrals of functions of `v(x)`.
fn breaks(s: &ShadingStrategy, z: &CompetitionDistribution, x_beta: f64, top: f64) -> Vec<f64> {
    let mut b = s.kinks();
    b.push(x_beta);
    for &t in z.kinks() {
        let x = s.virtualized_preimage(t);
        if x > x_beta && x < top {
            b.push(x);
        }
    }
    b
}

/// Expected payoff of a bidder with values from `d1` using `s` against
/// competition `z`, by quadrature.
pub fn payoff_quadrature(d1: &DistributionModel, s: &ShadingStrategy, z: &CompetitionDistribution) -> Result<PayoffEstimate> {
    let (lo, _) = d1.support();
    let top = d1.upper_eval();
    let x_beta = s.virtual_root().max(lo);
    let br = breaks(s, z, x_beta, top);
    let util = integrate_with_breaks(
        &|x| {
            let v = s.virtualized(x);
            d1.pdf(x) * (x - v) * z.cdf(v.max(0.0))
        },
        x_beta,
        top,
        &br,
        QUAD_TOL,
    );
    let pay = integrate_with_breaks(
        &|x| {
            let v = s.virtualized(x);
            d1.pdf(x) * v.max(0.0) * z.cdf(v.max(0.0))
        },
        x_beta,
        top,
        &br,
        QUAD_TOL,
    );
    if !util.is_finite() {
        return Err(Error::NonIntegrable("payoff integral diverged".into()));
    }
    Ok(PayoffEstimate::exact(util, pay))
}

/// Directional derivative of the payoff split into its two parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionalDerivative {
    pub value: f64,
    /// Contribution from values whose virtualized bid is positive.
    pub interior: f64,
    /// Contribution from the reserve threshold moving across the atom of
    /// `Z` at zero.
    pub point_mass: f64,
}

/// `d/dt Pi(beta + t rho)` at `t = 0`.
///
/// The perturbation changes the virtualized bid by
/// `rho(x) + rho'(x) (psi_X(x) - x)`. The threshold term includes the
/// Jacobian `1 / v'(x_beta)` of the moving reserve point.
pub fn directional_derivative(
    d1: &DistributionModel,
    beta: &ShadingStrategy,
    rho: &HermiteSpline,
    z: &CompetitionDistribution,
) -> Result<DirectionalDerivative> {
    let (lo, _) = d1.support();
    let top = d1.upper_eval();
    for i in 1..512 {
        let x = lo + (top - lo) * i as f64 / 512.0;
        if !(beta.bid_slope(x) > 0.0) {
            return Err(Error::PerturbationBreaksMonotonicity);
        }
    }
    let dpsi = |x: f64| rho.eval(x) - rho.deriv(x) * d1.inv_hazard_unchecked(x);
    let x_beta = beta.virtual_root().max(lo);
    let mut br = breaks(beta, z, x_beta, top);
    br.extend(rho.knots().iter().copied());
    let interior = integrate_with_breaks(
        &|x| {
            let v = beta.virtualized(x).max(0.0);
            d1.pdf(x) * dpsi(x) * ((x - v) * z.density(v) - z.cdf(v))
        },
        x_beta,
        top,
        &br,
        QUAD_TOL,
    );
    let point_mass = if x_beta > lo && x_beta < top && z.atom0() > 0.0 {
        let slope = beta.virtualized_slope(x_beta);
        if !(slope > 0.0) {
            return Err(Error::DegenerateDenominator("virtualized bid is flat at the reserve".into()));
        }
        dpsi(x_beta) * z.atom0() * d1.pdf(x_beta) * x_beta / slope
    } else {
        0.0
    };
    Ok(DirectionalDerivative { value: interior + point_mass, interior, point_mass })
}

/// Payoff of a bidder who shades by `alpha` against truthful competitors
/// drawn from `competitors`, under Myerson's auction.
fn myerson_linear_payoff(d1: &DistributionModel, z: &CompetitionDistribution, alpha: f64) -> Result<f64> {
    Ok(payoff_quadrature(d1, &ShadingStrategy::linear_unchecked(d1, alpha), z)?.mean)
}

/// Payoff under VCG with monopoly reserves when the bidder shades by
/// `alpha` and competitors are truthful. With `eager`, competitors below
/// their own reserve are dropped before ranking.
pub fn vcg_linear_payoff(d1: &DistributionModel, competitors: &[DistributionModel], eager: bool, alpha: f64) -> Result<f64> {
    let r1 = d1.monopoly_price()?;
    let reserves = competitors.iter().map(|m| m.virtual_threshold(0.0)).collect::<Result<Vec<_>>>()?;
    let g = |t: f64| -> f64 {
        competitors
            .iter()
            .zip(&reserves)
            .map(|(m, &r)| if eager { m.cdf(t.max(r)) } else { m.cdf(t) })
            .product()
    };
    let top = d1.upper_eval();
    let mut br: Vec<f64> = Vec::new();
    for (m, &r) in competitors.iter().zip(&reserves) {
        let (a, b) = m.support();
        br.extend([a / alpha, b / alpha, r / alpha]);
    }
    let v = integrate_with_breaks(
        &|x| {
            let psi = x - d1.inv_hazard_unchecked(x);
            d1.pdf(x) * (x - alpha * psi) * g(alpha * x)
        },
        r1,
        top,
        &br,
        QUAD_TOL,
    );
    Ok(v)
}

fn linear_payoff(
    d1: &DistributionModel,
    competitors: &[DistributionModel],
    z: Option<&CompetitionDistribution>,
    kind: MechanismKind,
    alpha: f64,
) -> Result<f64> {
    match kind {
        MechanismKind::Myerson => myerson_linear_payoff(d1, z.expect("competition built for Myerson"), alpha),
        MechanismKind::VcgLazy => vcg_linear_payoff(d1, competitors, false, alpha),
        MechanismKind::VcgEager => vcg_linear_payoff(d1, competitors, true, alpha),
        other => Err(Error::UnsupportedMechanism(other.name().into())),
    }
}

/// Payoff of linear shading `beta(x) = alpha x` for each `alpha`, against
/// truthful competitors.
pub fn linear_payoff_curve(
    d1: &DistributionModel,
    competitors: &[DistributionModel],
    kind: MechanismKind,
    alphas: &[f64],
) -> Result<Vec<(f64, f64)>> {
    if let Some(&a) = alphas.iter().find(|&&a| !(a > 0.0 && a <= 1.0)) {
        return Err(Error::InvalidParams(format!("alpha must lie in (0, 1], got {a}")));
    }
    let z = match kind {
        MechanismKind::Myerson => Some(competition_distribution(competitors)?),
        _ => None,
    };
    alphas.iter().map(|&a| Ok((a, linear_payoff(d1, competitors, z.as_ref(), kind, a)?))).collect()
}

/// Central difference of the linear-shading payoff in `alpha`.
pub fn linear_payoff_derivative(
    d1: &DistributionModel,
    competitors: &[DistributionModel],
    kind: MechanismKind,
    at_alpha: f64,
) -> Result<f64> {
    if !(at_alpha > ALPHA_STEP) {
        return Err(Error::InvalidParams(format!("alpha must exceed the difference step, got {at_alpha}")));
    }
    let z = match kind {
        MechanismKind::Myerson => Some(competition_distribution(competitors)?),
        _ => None,
    };
    let up = linear_payoff(d1, competitors, z.as_ref(), kind, at_alpha + ALPHA_STEP)?;
    let down = linear_payoff(d1, competitors, z.as_ref(), kind, at_alpha - ALPHA_STEP)?;
    Ok((up - down) / (2.0 * ALPHA_STEP))
}

/// `d Pi / d alpha` under Myerson's auction against truthful competitors.
pub fn payoff_derivative_alpha(d1: &DistributionModel, competitors: &[DistributionModel], at_alpha: f64) -> Result<f64> {
    linear_payoff_derivative(d1, competitors, MechanismKind::Myerson, at_alpha)
}

/// Expected payoff per bidder in the symmetric first-price equilibrium
/// without reserve.
pub fn first_price_payoff(d: &DistributionModel, k: usize) -> Result<f64> {
    let b = first_price_bid(d, k)?;
    let (lo, _) = d.support();
    let m = (k - 1) as i32;
    Ok(integrate_with_breaks(
        &|x| d.pdf(x) * (x - b.eval(x)) * d.cdf(x).powi(m),
        lo,
        d.upper_eval(),
        &[],
        QUAD_TOL,
    ))
}

/// Recovers `psi^{-1}(t)` from draws of `W = psi(X)` via
/// `E[W 1{W <= t}] / (P(W <= t) - 1)`. Assumes the value support starts at 0.
pub fn invert_virtual_from_samples(samples: &[f64], t: f64) -> Result<f64> {
    invert_virtual_from_samples_with_lower(samples, t, 0.0)
}

/// As [`invert_virtual_from_samples`] for a support starting at `lower`.
pub fn invert_virtual_from_samples_with_lower(samples: &[f64], t: f64, lower: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InvalidParams("no samples".into()));
    }
    let n = samples.len() as f64;
    let (mut below, mut mass) = (0.0, 0.0);
    for &w in samples {
        if w <= t {
            below += w;
            mass += 1.0;
        }
    }
    let p = mass / n;
    if (1.0 - p).abs() < 1e-12 {
        return Err(Error::DegenerateDenominator(format!("all samples are at or below {t}")));
    }
    Ok((below / n - lower) / (p - 1.0))
}

/// Population version of [`invert_virtual_from_samples`], integrating over
/// the law of `psi(X)` instead of averaging draws.
pub fn invert_virtual_population(d: &DistributionModel, t: f64) -> Result<f64> {
    let (lo_v, hi_v) = d.virtual_range();
    let p = d.virtual_cdf(t);
    if (1.0 - p).abs() < 1e-12 || t >= hi_v {
        return Err(Error::DegenerateDenominator(format!("P(W <= {t}) = 1")));
    }
    if !lo_v.is_finite() {
        return Err(Error::InvalidParams("virtual value is unbounded below".into()));
    }
    let e = integrate_with_breaks(&|w| w * d.virtual_pdf(w), lo_v, t, &d.virtual_kinks(), QUAD_TOL);
    Ok((e - d.support().0) / (p - 1.0))
}
