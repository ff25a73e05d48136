//! Experiment configs, one per subcommand. Unknown fields are rejected so
//! a typo cannot silently fall back to a default.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use shadecraft::config::{BidderSpec, DistributionSpec, MechanismSpec};
use shadecraft::opt::BspBounds;
use shadecraft::{GpParams, MechanismKind};

use crate::Failure;

#[derive(Deserialize)]
struct CommandTag {
    #[serde(default)]
    command: Option<String>,
}

/// Reads and validates a JSON config for subcommand `expected`, reporting
/// the offending field path and position on failure. A config whose
/// `command` field names another subcommand is rejected before anything
/// else.
pub fn load<T: DeserializeOwned>(path: &Path, expected: &str) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    if let Ok(CommandTag { command: Some(c) }) = serde_json::from_str(&text) {
        if c != expected {
            return Err(Failure::Config(format!("config is for `{c}` but the subcommand is `{expected}`")));
        }
    }
    let mut de = serde_json::Deserializer::from_str(&text);
    let cfg = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let field = e.path().to_string();
        Failure::Config(format!("{}: at `{field}`: {}", path.display(), e.into_inner()))
    })?;
    de.end().map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    Ok(cfg)
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlphaRange {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Default for AlphaRange {
    fn default() -> Self {
        Self { min: 0.01, max: 1.0, points: 100 }
    }
}

impl AlphaRange {
    pub fn values(&self) -> Result<Vec<f64>, Failure> {
        if !(self.min > 0.0 && self.min <= self.max && self.max <= 1.0) || self.points == 0 {
            return Err(Failure::Config(format!(
                "alpha_grid needs 0 < min <= max <= 1 and points >= 1, got {:?}",
                self
            )));
        }
        if self.points == 1 {
            return Ok(vec![self.max]);
        }
        let step = (self.max - self.min) / (self.points - 1) as f64;
        Ok((0..self.points).map(|i| if i + 1 == self.points { self.max } else { self.min + step * i as f64 }).collect())
    }
}

/// One bidder shades linearly by `alpha`; the other `K - 1` bid truthfully.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PayoffCurveConfig {
    /// Checked by [`load`].
    #[serde(default, rename = "command")]
    _command: Option<String>,
    pub mechanism: MechanismKind,
    /// Value law of the shading bidder.
    #[serde(default)]
    pub value: DistributionSpec,
    /// Value law of every truthful bidder; defaults to `value`.
    #[serde(default)]
    pub competitor: Option<DistributionSpec>,
    /// Total bidder counts.
    pub ks: Vec<usize>,
    #[serde(default)]
    pub alpha_grid: AlphaRange,
    /// Explicit alphas; replaces `alpha_grid` when present.
    #[serde(default)]
    pub alphas: Option<Vec<f64>>,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquilibriumDemoConfig {
    /// Checked by [`load`].
    #[serde(default, rename = "command")]
    _command: Option<String>,
    #[serde(default)]
    pub value: DistributionSpec,
    pub k: usize,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

fn default_profile_points() -> usize {
    101
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OneStrategicDemoConfig {
    /// Checked by [`load`].
    #[serde(default, rename = "command")]
    _command: Option<String>,
    /// Value law of the strategic bidder; the others are truthful uniforms.
    #[serde(default)]
    pub value: DistributionSpec,
    /// Total bidder count.
    pub k: usize,
    #[serde(default)]
    pub eps: Option<f64>,
    #[serde(default = "default_profile_points")]
    pub points: usize,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamSpec {
    pub mu: f64,
    pub sigma: f64,
    pub xi: f64,
}

impl From<ParamSpec> for GpParams {
    fn from(p: ParamSpec) -> Self {
        GpParams { mu: p.mu, sigma: p.sigma, xi: p.xi }
    }
}

impl From<GpParams> for ParamSpec {
    fn from(p: GpParams) -> Self {
        ParamSpec { mu: p.mu, sigma: p.sigma, xi: p.xi }
    }
}

/// Missing sides fall back to [`BspBounds::default`].
#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsSpec {
    pub mu: Option<(f64, f64)>,
    pub sigma: Option<(f64, f64)>,
    pub xi: Option<(f64, f64)>,
}

impl BoundsSpec {
    pub fn build(&self) -> BspBounds {
        let d = BspBounds::default();
        BspBounds { mu: self.mu.unwrap_or(d.mu), sigma: self.sigma.unwrap_or(d.sigma), xi: self.xi.unwrap_or(d.xi) }
    }
}

fn two_uniforms() -> Vec<DistributionSpec> {
    vec![DistributionSpec::default(); 2]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BspOptConfig {
    /// Checked by [`load`].
    #[serde(default, rename = "command")]
    _command: Option<String>,
    #[serde(default)]
    pub value: DistributionSpec,
    /// Value laws of the truthful competitors.
    #[serde(default = "two_uniforms")]
    pub competitors: Vec<DistributionSpec>,
    /// Starting point; defaults to the parameters that reproduce truthful
    /// bidding (exactly for GP values, by quantile fit otherwise).
    #[serde(default)]
    pub init: Option<ParamSpec>,
    #[serde(default)]
    pub bounds: BoundsSpec,
    #[serde(default)]
    pub max_iterations: Option<usize>,
    /// Extra point at which to report both gradient variants.
    #[serde(default)]
    pub check_point: Option<ParamSpec>,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    /// Checked by [`load`].
    #[serde(default, rename = "command")]
    _command: Option<String>,
    pub bidders: Vec<BidderSpec>,
    pub mechanism: MechanismSpec,
    #[serde(default)]
    pub rounds: Option<u64>,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Number of leading rounds to include in full.
    #[serde(default)]
    pub trace: u64,
    #[serde(default)]
    pub out: Option<PathBuf>,
}
