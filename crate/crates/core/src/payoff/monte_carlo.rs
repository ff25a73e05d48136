//! Repeated-auction simulation.
//!
//! Rounds are cut into fixed chunks, each chunk is summed sequentially and
//! the chunk sums are merged in round order, so results are bit-identical
//! whatever the worker count.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::DistributionModel;
use crate::error::{Error, Result};
use crate::mech::MechanismConfig;
use crate::rng::RoundStreams;
use crate::shade::ShadingStrategy;

use super::PayoffEstimate;

const CHUNK: u64 = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonteCarloConfig {
    pub rounds: u64,
    pub seed: u64,
    pub workers: usize,
}

impl MonteCarloConfig {
    pub fn new(rounds: u64, seed: u64) -> Self {
        Self { rounds, seed, workers: 1 }
    }

    pub fn with_workers(self, workers: usize) -> Self {
        Self { workers, ..self }
    }
}

/// Payoff estimate plus per-bidder allocation statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary {
    pub estimate: PayoffEstimate,
    pub win_rate: Vec<f64>,
    pub mean_payment: Vec<f64>,
    /// Mean of `payment_i - psi_i(b_i) 1{i wins}` per bidder, for mechanisms
    /// that report virtual bids. Zero in expectation for truthful bidders
    /// in Myerson's auction.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub payment_identity_gap: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub payment_identity_gap_se: Option<Vec<f64>>,
}

/// One simulated round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: u64,
    pub values: Vec<f64>,
    pub bids: Vec<f64>,
    pub winner: Option<usize>,
    pub payment: f64,
}

#[derive(Clone)]
struct Sums {
    util: Vec<f64>,
    util_sq: Vec<f64>,
    wins: Vec<u64>,
    paid: Vec<f64>,
    revenue: f64,
    revenue_sq: f64,
    gap: Vec<f64>,
    gap_sq: Vec<f64>,
    virtual_rounds: u64,
}

impl Sums {
    fn zero(n: usize) -> Self {
        Self {
            util: vec![0.0; n],
            util_sq: vec![0.0; n],
            wins: vec![0; n],
            paid: vec![0.0; n],
            revenue: 0.0,
            revenue_sq: 0.0,
            gap: vec![0.0; n],
            gap_sq: vec![0.0; n],
            virtual_rounds: 0,
        }
    }

    fn merge(&mut self, o: &Sums) {
        for i in 0..self.util.len() {
            self.util[i] += o.util[i];
            self.util_sq[i] += o.util_sq[i];
            self.wins[i] += o.wins[i];
            self.paid[i] += o.paid[i];
            self.gap[i] += o.gap[i];
            self.gap_sq[i] += o.gap_sq[i];
        }
        self.virtual_rounds += o.virtual_rounds;
        self.revenue += o.revenue;
        self.revenue_sq += o.revenue_sq;
    }
}

fn check_profile(values: &[DistributionModel], strategies: &[ShadingStrategy], rounds: u64) -> Result<()> {
    if values.len() != strategies.len() {
        return Err(Error::LengthMismatch { expected: values.len(), got: strategies.len() });
    }
    if values.is_empty() {
        return Err(Error::InvalidParams("no bidders".into()));
    }
    if rounds == 0 {
        return Err(Error::InvalidParams("rounds must be at least 1".into()));
    }
    Ok(())
}

fn play(
    values: &[DistributionModel],
    strategies: &[ShadingStrategy],
    cfg: &MechanismConfig,
    streams: &RoundStreams,
    round: u64,
    xs: &mut Vec<f64>,
    bids: &mut Vec<f64>,
) -> Result<crate::mech::AuctionOutcome> {
    let mut rng = streams.round(round);
    xs.clear();
    bids.clear();
    for (v, s) in values.iter().zip(strategies) {
        let x = v.draw(rng.gen::<f64>());
        xs.push(x);
        bids.push(s.bid(x));
    }
    cfg.run(bids)
}

fn se(sum: f64, sum_sq: f64, n: f64) -> f64 {
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0);
    (var / n).sqrt()
}

/// Simulates `mc.rounds` independent auctions and summarizes payoffs,
/// revenue and allocations.
pub fn simulate(
    values: &[DistributionModel],
    strategies: &[ShadingStrategy],
    cfg: &MechanismConfig,
    mc: &MonteCarloConfig,
) -> Result<SimulationSummary> {
    check_profile(values, strategies, mc.rounds)?;
    let n = values.len();
    let streams = RoundStreams::new(mc.seed);
    let chunks: Vec<(u64, u64)> = (0..mc.rounds.div_ceil(CHUNK))
        .map(|c| (c * CHUNK, ((c + 1) * CHUNK).min(mc.rounds)))
        .collect();
    let run_chunk = |&(a, b): &(u64, u64)| -> Result<Sums> {
        let mut s = Sums::zero(n);
        let (mut xs, mut bids) = (Vec::with_capacity(n), Vec::with_capacity(n));
        for r in a..b {
            let out = play(values, strategies, cfg, &streams, r, &mut xs, &mut bids)?;
            if let Some(w) = out.winner {
                let u = xs[w] - out.payment;
                s.util[w] += u;
                s.util_sq[w] += u * u;
                s.wins[w] += 1;
                s.paid[w] += out.payment;
                s.revenue += out.payment;
                s.revenue_sq += out.payment * out.payment;
            }
            if let Some(v) = &out.virtual_bids {
                s.virtual_rounds += 1;
                for (i, vi) in v.iter().enumerate() {
                    let g = if out.winner == Some(i) { out.payment - vi } else { 0.0 };
                    s.gap[i] += g;
                    s.gap_sq[i] += g * g;
                }
            }
        }
        Ok(s)
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(mc.workers.max(1))
        .build()
        .map_err(|e| Error::InvalidParams(format!("cannot start worker pool: {e}")))?;
    let parts: Vec<Sums> = pool.install(|| chunks.par_iter().map(run_chunk).collect::<Result<Vec<_>>>())?;
    let mut total = Sums::zero(n);
    for p in &parts {
        total.merge(p);
    }
    let m = mc.rounds as f64;
    let per_bidder: Vec<f64> = total.util.iter().map(|s| s / m).collect();
    let per_bidder_se: Vec<f64> = (0..n).map(|i| se(total.util[i], total.util_sq[i], m)).collect();
    let estimate = PayoffEstimate {
        mean: per_bidder[0],
        std_error: per_bidder_se[0],
        rounds: mc.rounds,
        per_bidder,
        per_bidder_se,
        seller_revenue: total.revenue / m,
        seller_revenue_se: se(total.revenue, total.revenue_sq, m),
    };
    let (gap, gap_se) = if total.virtual_rounds == mc.rounds {
        (
            Some(total.gap.iter().map(|g| g / m).collect()),
            Some((0..n).map(|i| se(total.gap[i], total.gap_sq[i], m)).collect()),
        )
    } else {
        (None, None)
    };
    Ok(SimulationSummary {
        estimate,
        win_rate: total.wins.iter().map(|&w| w as f64 / m).collect(),
        mean_payment: total.paid.iter().map(|p| p / m).collect(),
        payment_identity_gap: gap,
        payment_identity_gap_se: gap_se,
    })
}

/// Monte Carlo estimate of every bidder's payoff and the seller's revenue.
pub fn payoff_monte_carlo(
    values: &[DistributionModel],
    strategies: &[ShadingStrategy],
    cfg: &MechanismConfig,
    mc: &MonteCarloConfig,
) -> Result<PayoffEstimate> {
    Ok(simulate(values, strategies, cfg, mc)?.estimate)
}

/// The first `count` rounds of a simulation, in full detail. Round `i` here
/// is the same draw as round `i` of [`simulate`] with the same seed.
pub fn trace_rounds(
    values: &[DistributionModel],
    strategies: &[ShadingStrategy],
    cfg: &MechanismConfig,
    seed: u64,
    count: u64,
) -> Result<Vec<RoundRecord>> {
    check_profile(values, strategies, count.max(1))?;
    let streams = RoundStreams::new(seed);
    let (mut xs, mut bids) = (Vec::new(), Vec::new());
    (0..count)
        .map(|r| {
            let out = play(values, strategies, cfg, &streams, r, &mut xs, &mut bids)?;
            Ok(RoundRecord { round: r, values: xs.clone(), bids: bids.clone(), winner: out.winner, payment: out.payment })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worker_count_does_not_change_results() {
        let u = DistributionModel::uniform();
        let values = vec![u.clone(); 3];
        let strategies = vec![ShadingStrategy::truthful(&u); 3];
        let cfg = MechanismConfig::myerson(values.clone());
        let base = simulate(&values, &strategies, &cfg, &MonteCarloConfig::new(20_000, 9)).unwrap();
        for w in [2, 4, 16] {
            let other = simulate(&values, &strategies, &cfg, &MonteCarloConfig::new(20_000, 9).with_workers(w)).unwrap();
            assert_eq!(base, other);
        }
        let trace = trace_rounds(&values, &strategies, &cfg, 9, 5).unwrap();
        assert_eq!(trace.len(), 5);
    }

    #[test]
    fn rejects_bad_profiles() {
        let u = DistributionModel::uniform();
        let cfg = MechanismConfig::myerson(vec![u.clone(); 2]);
        let s = vec![ShadingStrategy::truthful(&u)];
        assert!(simulate(&[u.clone(), u.clone()], &s, &cfg, &MonteCarloConfig::new(10, 1)).is_err());
        assert!(simulate(std::slice::from_ref(&u), &s, &cfg, &MonteCarloConfig::new(0, 1)).is_err());
    }
}
