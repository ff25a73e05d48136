//! Fixtures shared by the benchmarks.

use shadecraft::payoff::competition_distribution;
use shadecraft::shade::{equilibrium_shading, one_vs_uniform_shading};
use shadecraft::{CompetitionDistribution, DistributionModel, ShadingStrategy};

/// One bidder's value law, strategy and the competition it faces.
pub struct Profile {
    pub value: DistributionModel,
    pub strategy: ShadingStrategy,
    pub competition: CompetitionDistribution,
}

/// Truthful uniform bidder against `k - 1` truthful uniforms.
pub fn truthful_uniform(k: usize) -> Profile {
    let value = DistributionModel::uniform();
    let strategy = ShadingStrategy::truthful(&value);
    let competition = competition_distribution(&vec![value.clone(); k - 1]).expect("uniform competition");
    Profile { value, strategy, competition }
}

/// Symmetric equilibrium among `k` bidders with GP values; the strategy is
/// grid-backed, which is the slow path.
pub fn gp_equilibrium(k: usize) -> Profile {
    let value = DistributionModel::gp(0.1, 0.5, -0.5).expect("valid GP");
    let strategy = equilibrium_shading(&value, k).expect("equilibrium exists");
    let competition = competition_distribution(&vec![strategy.bid_model(); k - 1]).expect("competition");
    Profile { value, strategy, competition }
}

/// Optimal shading for one uniform bidder against `k - 1` truthful uniforms.
pub fn one_strategic(k: usize) -> Profile {
    let value = DistributionModel::uniform();
    let strategy = one_vs_uniform_shading(&value, k, 1e-6).expect("valid k");
    let competition = truthful_uniform(k).competition;
    Profile { value, strategy, competition }
}
