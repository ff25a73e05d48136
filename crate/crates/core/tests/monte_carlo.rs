//! Quadrature and simulation must agree, and Myerson payments must match
//! expected virtual surplus.

use shadecraft::mech::MechanismConfig;
use shadecraft::payoff::{competition_distribution, payoff_quadrature, simulate, MonteCarloConfig};
use shadecraft::shade::{equilibrium_shading, one_vs_uniform_shading};
use shadecraft::{DistributionModel, ShadingStrategy};

const ROUNDS: u64 = 1_000_000;

fn agree(label: &str, strategies: Vec<ShadingStrategy>) {
    let values: Vec<DistributionModel> = strategies.iter().map(|s| s.value_model().clone()).collect();
    let bid_models: Vec<DistributionModel> = strategies.iter().map(|s| s.bid_model()).collect();
    let z = competition_distribution(&bid_models[1..]).unwrap();
    let q = payoff_quadrature(&values[0], &strategies[0], &z).unwrap();
    let mc = simulate(&values, &strategies, &MechanismConfig::myerson(bid_models), &MonteCarloConfig::new(ROUNDS, 5).with_workers(4))
        .unwrap();
    let est = &mc.estimate;
    assert!(
        (q.mean - est.mean).abs() <= 3.0 * est.std_error,
        "{label}: quadrature {} vs simulation {} ± {}",
        q.mean,
        est.mean,
        est.std_error
    );
    let gap = mc.payment_identity_gap.as_ref().unwrap();
    let gap_se = mc.payment_identity_gap_se.as_ref().unwrap();
    for i in 0..gap.len() {
        assert!(gap[i].abs() <= 3.0 * gap_se[i], "{label}: bidder {i} payment gap {} ± {}", gap[i], gap_se[i]);
    }
}

#[test]
fn quadrature_agrees_with_simulation() {
    let u = DistributionModel::uniform();
    let t = ShadingStrategy::truthful(&u);
    agree("truthful vs two", vec![t.clone(), t.clone(), t.clone()]);
    agree("truthful vs one", vec![t.clone(), t.clone()]);
    agree("linear 0.7 vs two", vec![ShadingStrategy::linear(&u, 0.7).unwrap(), t.clone(), t.clone()]);
    let eq = equilibrium_shading(&u, 3).unwrap();
    agree("equilibrium", vec![eq.clone(), eq.clone(), eq]);
    agree("one strategic", vec![one_vs_uniform_shading(&u, 3, 0.0).unwrap(), t.clone(), t]);
    let g = DistributionModel::gp(0.0, 0.5, -0.5).unwrap();
    let tg = ShadingStrategy::truthful(&g);
    agree("gp equilibrium", vec![equilibrium_shading(&g, 2).unwrap(), equilibrium_shading(&g, 2).unwrap()]);
    agree("gp truthful", vec![tg.clone(), tg]);
}
