//! Single-item auction mechanisms.
//!
//! Ties always go to the lowest index, and a bid exactly at a reserve
//! clears it.

use serde::{Deserialize, Serialize};

use crate::dist::{DistributionModel, GpParams};
use crate::error::{Error, Result};
use crate::opt::maximize_scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MechanismKind {
    Myerson,
    VcgLazy,
    VcgEager,
    BoostedSecondPrice,
    FirstPrice,
    SecondPrice,
}

impl MechanismKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Myerson => "myerson",
            Self::VcgLazy => "vcg-lazy",
            Self::VcgEager => "vcg-eager",
            Self::BoostedSecondPrice => "boosted-second-price",
            Self::FirstPrice => "first-price",
            Self::SecondPrice => "second-price",
        }
    }
}

/// Result of one auction: who wins (if anyone) and what they pay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuctionOutcome {
    pub winner: Option<usize>,
    pub payment: f64,
    /// Virtual values of the bids, for mechanisms that compute them.
    #[serde(skip)]
    pub virtual_bids: Option<Vec<f64>>,
}

impl AuctionOutcome {
    fn no_sale() -> Self {
        Self { winner: None, payment: 0.0, virtual_bids: None }
    }

    fn sale(winner: usize, payment: f64) -> Self {
        Self { winner: Some(winner), payment, virtual_bids: None }
    }
}

/// Seller configuration: mechanism kind plus whatever it prices from.
#[derive(Debug, Clone)]
pub struct MechanismConfig {
    pub kind: MechanismKind,
    /// Per-bidder reserves (one entry for the anonymous second-price reserve).
    pub reserves: Vec<f64>,
    pub boosts: Vec<f64>,
    /// Bid distributions the seller believes in (Myerson only).
    pub bid_models: Vec<DistributionModel>,
}

impl MechanismConfig {
    pub fn myerson(bid_models: Vec<DistributionModel>) -> Self {
        Self { kind: MechanismKind::Myerson, reserves: Vec::new(), boosts: Vec::new(), bid_models }
    }

    pub fn vcg_lazy(reserves: Vec<f64>) -> Self {
        Self { kind: MechanismKind::VcgLazy, reserves, boosts: Vec::new(), bid_models: Vec::new() }
    }

    pub fn vcg_eager(reserves: Vec<f64>) -> Self {
        Self { kind: MechanismKind::VcgEager, reserves, boosts: Vec::new(), bid_models: Vec::new() }
    }

    pub fn boosted_second_price(boosts: Vec<f64>, reserves: Vec<f64>) -> Self {
        Self { kind: MechanismKind::BoostedSecondPrice, reserves, boosts, bid_models: Vec::new() }
    }

    pub fn first_price() -> Self {
        Self { kind: MechanismKind::FirstPrice, reserves: Vec::new(), boosts: Vec::new(), bid_models: Vec::new() }
    }

    pub fn second_price(reserve: f64) -> Self {
        Self { kind: MechanismKind::SecondPrice, reserves: vec![reserve], boosts: Vec::new(), bid_models: Vec::new() }
    }

    /// Configuration a seller who knows the bid distributions would pick:
    /// monopoly reserves for VCG, a GP fit for the boosted second price
    /// auction, the models themselves for Myerson. The anonymous second
    /// price reserve is the monopoly price of the first bidder's law.
    pub fn fitted(kind: MechanismKind, bid_models: &[DistributionModel]) -> Result<Self> {
        Ok(match kind {
            MechanismKind::Myerson => Self::myerson(bid_models.to_vec()),
            MechanismKind::VcgLazy => Self::vcg_lazy(fit_monopoly_reserves(bid_models)?),
            MechanismKind::VcgEager => Self::vcg_eager(fit_monopoly_reserves(bid_models)?),
            MechanismKind::BoostedSecondPrice => {
                let fit = fit_bsp(bid_models)?;
                Self::boosted_second_price(fit.boosts, fit.reserves)
            }
            MechanismKind::FirstPrice => Self::first_price(),
            MechanismKind::SecondPrice => {
                let first = bid_models.first().ok_or(Error::LengthMismatch { expected: 1, got: 0 })?;
                Self::second_price(first.virtual_threshold(0.0)?)
            }
        })
    }

    /// Runs the configured mechanism on one bid profile.
    pub fn run(&self, bids: &[f64]) -> Result<AuctionOutcome> {
        match self.kind {
            MechanismKind::Myerson => run_myerson(bids, &self.bid_models),
            MechanismKind::VcgLazy => run_vcg_lazy(bids, &self.reserves),
            MechanismKind::VcgEager => run_vcg_eager(bids, &self.reserves),
            MechanismKind::BoostedSecondPrice => run_bsp(bids, &self.boosts, &self.reserves),
            MechanismKind::FirstPrice => Ok(run_first_price(bids)),
            MechanismKind::SecondPrice => {
                let r = self.reserves.first().copied().unwrap_or(0.0);
                Ok(run_second_price(bids, r))
            }
        }
    }
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::LengthMismatch { expected, got });
    }
    Ok(())
}

/// Index of the largest entry among those allowed (lowest index on ties).
fn argmax_where<F: Fn(usize) -> bool>(xs: &[f64], allowed: F) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &x) in xs.iter().enumerate() {
        if allowed(i) && best.is_none_or(|b| x > xs[b]) {
            best = Some(i);
        }
    }
    best
}

fn max_except<F: Fn(usize) -> bool>(xs: &[f64], skip: usize, allowed: F) -> f64 {
    xs.iter()
        .enumerate()
        .filter(|&(j, _)| j != skip && allowed(j))
        .map(|(_, &x)| x)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Myerson's optimal auction for the given bid distributions: the highest
/// non-negative virtual bid wins and pays the smallest bid that would still
/// have won.
pub fn run_myerson(bids: &[f64], models: &[DistributionModel]) -> Result<AuctionOutcome> {
    check_len(models.len(), bids.len())?;
    let psi = bids
        .iter()
        .zip(models)
        .map(|(&b, m)| m.virtual_value(b))
        .collect::<Result<Vec<f64>>>()?;
    let w = match argmax_where(&psi, |_| true) {
        Some(w) if psi[w] >= 0.0 => w,
        _ => return Ok(AuctionOutcome { virtual_bids: Some(psi), ..AuctionOutcome::no_sale() }),
    };
    let second = max_except(&psi, w, |_| true).max(0.0);
    let payment = models[w].virtual_threshold(second)?;
    Ok(AuctionOutcome { winner: Some(w), payment, virtual_bids: Some(psi) })
}

/// Second price with per-bidder reserves; the overall top bidder must clear
/// their own reserve or nobody wins.
pub fn run_vcg_lazy(bids: &[f64], reserves: &[f64]) -> Result<AuctionOutcome> {
    check_len(reserves.len(), bids.len())?;
    Ok(match argmax_where(bids, |_| true) {
        Some(w) if bids[w] >= reserves[w] => {
            AuctionOutcome::sale(w, reserves[w].max(max_except(bids, w, |_| true)))
        }
        _ => AuctionOutcome::no_sale(),
    })
}

/// Second price with per-bidder reserves among the bidders who clear them.
pub fn run_vcg_eager(bids: &[f64], reserves: &[f64]) -> Result<AuctionOutcome> {
    check_len(reserves.len(), bids.len())?;
    let clears = |i: usize| bids[i] >= reserves[i];
    Ok(match argmax_where(bids, clears) {
        Some(w) => AuctionOutcome::sale(w, reserves[w].max(max_except(bids, w, clears))),
        None => AuctionOutcome::no_sale(),
    })
}

/// Boosted second price: scores `s_i (b_i - r_i)`; the top non-negative
/// score wins and pays `r_w + max(0, second score) / s_w`.
pub fn run_bsp(bids: &[f64], boosts: &[f64], reserves: &[f64]) -> Result<AuctionOutcome> {
    check_len(boosts.len(), bids.len())?;
    check_len(reserves.len(), bids.len())?;
    if let Some(&s) = boosts.iter().find(|&&s| !(s > 0.0) || !s.is_finite()) {
        return Err(Error::InvalidBoost(s));
    }
    let scores: Vec<f64> = (0..bids.len()).map(|i| boosts[i] * (bids[i] - reserves[i])).collect();
    Ok(match argmax_where(&scores, |_| true) {
        Some(w) if scores[w] >= 0.0 => {
            let second = max_except(&scores, w, |_| true).max(0.0);
            AuctionOutcome::sale(w, reserves[w] + second / boosts[w])
        }
        _ => AuctionOutcome::no_sale(),
    })
}

/// Highest bid wins and pays its bid.
pub fn run_first_price(bids: &[f64]) -> AuctionOutcome {
    match argmax_where(bids, |_| true) {
        Some(w) => AuctionOutcome::sale(w, bids[w]),
        None => AuctionOutcome::no_sale(),
    }
}

/// Second price with one anonymous reserve.
pub fn run_second_price(bids: &[f64], reserve: f64) -> AuctionOutcome {
    match argmax_where(bids, |_| true) {
        Some(w) if bids[w] >= reserve => AuctionOutcome::sale(w, reserve.max(max_except(bids, w, |_| true))),
        _ => AuctionOutcome::no_sale(),
    }
}

/// Monopoly price of each bid law.
pub fn fit_monopoly_reserves(models: &[DistributionModel]) -> Result<Vec<f64>> {
    models.iter().map(|m| m.virtual_threshold(0.0)).collect()
}

/// Per-bidder GP fit used to set boosted second price parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct BspFit {
    pub boosts: Vec<f64>,
    pub reserves: Vec<f64>,
    pub params: Vec<GpParams>,
    /// Root mean squared quantile error of each fit.
    pub rmse: Vec<f64>,
}

/// Number of probability levels used by the quantile fit.
pub const FIT_NODES: usize = 64;
const FIT_XI_MIN: f64 = -20.0;

fn gp_quantile_shape(xi: f64, p: f64) -> f64 {
    let l = (-p).ln_1p();
    if xi == 0.0 {
        -l
    } else {
        (-xi * l).exp_m1() / xi
    }
}

/// Least-squares fit of `GP(0, sigma, xi)` quantiles to a model's quantiles.
pub fn fit_gp_quantiles(model: &DistributionModel) -> Result<(GpParams, f64)> {
    let probs: Vec<f64> = (0..FIT_NODES).map(|i| (i as f64 + 0.5) / FIT_NODES as f64).collect();
    let q: Vec<f64> = probs.iter().map(|&p| model.quantile(p)).collect();
    if q.iter().any(|v| !v.is_finite()) {
        return Err(Error::FitFailure("model quantiles are not finite".into()));
    }
    if q[FIT_NODES - 1] - q[0] <= 1e-12 * (1.0 + q[0].abs()) {
        return Err(Error::FitFailure("model is degenerate".into()));
    }
    let profile = |xi: f64| -> (f64, f64) {
        let g: Vec<f64> = probs.iter().map(|&p| gp_quantile_shape(xi, p)).collect();
        let sigma = q.iter().zip(&g).map(|(a, b)| a * b).sum::<f64>() / g.iter().map(|b| b * b).sum::<f64>();
        let sse = q.iter().zip(&g).map(|(a, b)| (a - sigma * b).powi(2)).sum::<f64>();
        (sigma, sse)
    };
    let best = maximize_scalar(|xi| -profile(xi).1, FIT_XI_MIN, 0.0, 1e-15)?;
    let xi = best.argmax;
    let (sigma, sse) = profile(xi);
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::FitFailure(format!("fitted scale {sigma} is not positive")));
    }
    Ok((GpParams { mu: 0.0, sigma, xi }, (sse / FIT_NODES as f64).sqrt()))
}

/// Boosts `1 - xi` and reserves `sigma / (1 - xi)` from per-bidder GP fits.
pub fn fit_bsp(models: &[DistributionModel]) -> Result<BspFit> {
    let mut fit = BspFit { boosts: Vec::new(), reserves: Vec::new(), params: Vec::new(), rmse: Vec::new() };
    for m in models {
        let (p, rmse) = fit_gp_quantiles(m)?;
        fit.boosts.push(1.0 - p.xi);
        fit.reserves.push(p.sigma / (1.0 - p.xi));
        fit.params.push(p);
        fit.rmse.push(rmse);
    }
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniforms(n: usize) -> Vec<DistributionModel> {
        vec![DistributionModel::uniform(); n]
    }

    #[test]
    fn myerson_examples() {
        let o = run_myerson(&[0.9, 0.7], &uniforms(2)).unwrap();
        assert_eq!(o.winner, Some(0));
        assert!((o.payment - 0.7).abs() < 1e-15);
        let o = run_myerson(&[0.4, 0.3], &uniforms(2)).unwrap();
        assert_eq!(o.winner, None);
        let o = run_myerson(&[0.8, 0.2], &uniforms(2)).unwrap();
        assert!((o.payment - 0.5).abs() < 1e-15);
        assert!(matches!(run_myerson(&[1.2, 0.2], &uniforms(2)), Err(Error::OutOfSupport { .. })));
        assert!(matches!(run_myerson(&[0.2], &uniforms(2)), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn vcg_examples() {
        let o = run_vcg_lazy(&[0.6, 0.85], &[0.5, 0.9]).unwrap();
        assert_eq!(o.winner, None);
        let o = run_vcg_eager(&[0.6, 0.85], &[0.5, 0.9]).unwrap();
        assert_eq!(o.winner, Some(0));
        assert_eq!(o.payment, 0.5);
        let o = run_vcg_eager(&[0.6, 0.85], &[0.5, 0.8]).unwrap();
        assert_eq!(o.winner, Some(1));
        assert_eq!(o.payment, 0.8);
    }

    #[test]
    fn bsp_examples() {
        let o = run_bsp(&[0.9, 0.7], &[2.0, 2.0], &[0.5, 0.5]).unwrap();
        assert_eq!(o.winner, Some(0));
        assert!((o.payment - 0.7).abs() < 1e-15);
        assert!(matches!(run_bsp(&[0.9, 0.7], &[0.0, 2.0], &[0.5, 0.5]), Err(Error::InvalidBoost(_))));
    }

    #[test]
    fn ties_and_reserve_boundary() {
        let o = run_second_price(&[0.5, 0.5], 0.5);
        assert_eq!(o.winner, Some(0));
        assert_eq!(o.payment, 0.5);
        let o = run_first_price(&[0.3, 0.7, 0.7]);
        assert_eq!(o.winner, Some(1));
        assert_eq!(o.payment, 0.7);
    }

    #[test]
    fn fits_recover_uniform() {
        let r = fit_monopoly_reserves(&[DistributionModel::gp(0.0, 2.0, -0.5).unwrap()]).unwrap();
        assert!((r[0] - 2.0 / 1.5).abs() < 1e-14);
        let fit = fit_bsp(&uniforms(2)).unwrap();
        for i in 0..2 {
            assert!((fit.boosts[i] - 2.0).abs() < 1e-12);
            assert!((fit.reserves[i] - 0.5).abs() < 1e-12);
            assert!(fit.rmse[i] < 1e-12);
        }
    }
}
