//! JSON-facing descriptions of value laws, strategies and mechanisms.

use serde::{Deserialize, Serialize};

use crate::dist::DistributionModel;
use crate::error::{Error, Result};
use crate::mech::{MechanismConfig, MechanismKind};
use crate::shade::{
    equilibrium_shading, gp_reparam_shading, one_vs_uniform_shading, ShadingStrategy, DEFAULT_EPS,
};
use crate::GpParams;

/// `{"kind":"gp","mu":..,"sigma":..,"xi":..}` or
/// `{"kind":"grid","knots":[..],"cdf":[..]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DistributionSpec {
    Gp { mu: f64, sigma: f64, xi: f64 },
    Grid { knots: Vec<f64>, cdf: Vec<f64> },
}

impl Default for DistributionSpec {
    fn default() -> Self {
        Self::Gp { mu: 0.0, sigma: 1.0, xi: -1.0 }
    }
}

impl DistributionSpec {
    pub fn build(&self) -> Result<DistributionModel> {
        match self {
            Self::Gp { mu, sigma, xi } => DistributionModel::gp(*mu, *sigma, *xi),
            Self::Grid { knots, cdf } => DistributionModel::tabulated(knots.clone(), cdf.clone()),
        }
    }
}

/// Strategy of one bidder, resolved against that bidder's value law.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StrategySpec {
    #[default]
    Truthful,
    Linear {
        alpha: f64,
    },
    /// Symmetric equilibrium among `k` bidders.
    Equilibrium {
        k: usize,
    },
    /// Best response of one bidder against `k - 1` truthful uniforms.
    OneVsUniform {
        k: usize,
        #[serde(default)]
        eps: Option<f64>,
    },
    GpReparam {
        mu: f64,
        sigma: f64,
        xi: f64,
    },
}

impl StrategySpec {
    pub fn build(&self, value: &DistributionModel) -> Result<ShadingStrategy> {
        match self {
            Self::Truthful => Ok(ShadingStrategy::truthful(value)),
            Self::Linear { alpha } => ShadingStrategy::linear(value, *alpha),
            Self::Equilibrium { k } => equilibrium_shading(value, *k),
            Self::OneVsUniform { k, eps } => one_vs_uniform_shading(value, *k, eps.unwrap_or(DEFAULT_EPS)),
            Self::GpReparam { mu, sigma, xi } => gp_reparam_shading(value, GpParams::new(*mu, *sigma, *xi)?),
        }
    }
}

/// A bidder: value law plus strategy (truthful when omitted).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BidderSpec {
    pub value: DistributionSpec,
    #[serde(default)]
    pub strategy: StrategySpec,
}

impl BidderSpec {
    pub fn build(&self) -> Result<(DistributionModel, ShadingStrategy)> {
        let v = self.value.build()?;
        let s = self.strategy.build(&v)?;
        Ok((v, s))
    }
}

/// Seller side. Reserves and boosts left out are fitted to the bid laws
/// the bidders' strategies induce.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MechanismSpec {
    pub kind: MechanismKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reserves: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boosts: Option<Vec<f64>>,
}

impl MechanismSpec {
    pub fn build(&self, bid_models: &[DistributionModel]) -> Result<MechanismConfig> {
        let n = bid_models.len();
        let mut cfg = MechanismConfig::fitted(self.kind, bid_models)?;
        if let Some(r) = &self.reserves {
            let want = if self.kind == MechanismKind::SecondPrice { 1 } else { n };
            if r.len() != want {
                return Err(Error::LengthMismatch { expected: want, got: r.len() });
            }
            cfg.reserves = r.clone();
        }
        if let Some(b) = &self.boosts {
            if self.kind != MechanismKind::BoostedSecondPrice {
                return Err(Error::InvalidParams(format!("boosts do not apply to {}", self.kind.name())));
            }
            if b.len() != n {
                return Err(Error::LengthMismatch { expected: n, got: b.len() });
            }
            cfg.boosts = b.clone();
        }
        Ok(cfg)
    }
}
