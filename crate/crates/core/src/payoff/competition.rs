//! Law of the highest competing virtual bid.

use crate::dist::{DistributionModel, GpParams};
use crate::error::{Error, Result};

/// Distribution of `Z = max(0, max_i psi_i(B_i))` over the competitors.
///
/// `cdf(t)` is zero below 0, has an atom of size `atom0` at 0 and equals
/// the product of the competitors' virtual-bid CDFs above it.
#[derive(Debug, Clone)]
pub struct CompetitionDistribution {
    models: Vec<DistributionModel>,
    atom0: f64,
    kinks: Vec<f64>,
    top: f64,
}

impl CompetitionDistribution {
    /// Builds the law from the competitors' bid distributions, which must
    /// be regular.
    pub fn new(bid_models: &[DistributionModel]) -> Result<Self> {
        for m in bid_models {
            m.check_regular()?;
        }
        let mut kinks: Vec<f64> = bid_models.iter().flat_map(|m| m.virtual_kinks()).filter(|&t| t > 0.0).collect();
        kinks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        kinks.dedup();
        let top = bid_models.iter().map(|m| m.virtual_range().1).fold(0.0, f64::max);
        let mut z = Self { models: bid_models.to_vec(), atom0: 1.0, kinks, top };
        z.atom0 = z.continuous_cdf(0.0);
        Ok(z)
    }

    pub fn models(&self) -> &[DistributionModel] {
        &self.models
    }

    /// `P(Z = 0)`, the chance that no competitor clears their reserve.
    pub fn atom0(&self) -> f64 {
        self.atom0
    }

    /// Positive levels where the law is not smooth.
    pub fn kinks(&self) -> &[f64] {
        &self.kinks
    }

    /// Level above which `Z` has no mass.
    pub fn top(&self) -> f64 {
        self.top
    }

    /// `prod_i P(psi_i(B_i) <= t)`.
    pub fn continuous_cdf(&self, t: f64) -> f64 {
        self.models.iter().map(|m| m.virtual_cdf(t)).product()
    }

    /// `P(Z <= t)`.
    pub fn cdf(&self, t: f64) -> f64 {
        if t < 0.0 {
            0.0
        } else {
            self.continuous_cdf(t)
        }
    }

    /// Density of the continuous part at `t > 0`.
    pub fn density(&self, t: f64) -> f64 {
        let n = self.models.len();
        if n == 0 || t < 0.0 {
            return 0.0;
        }
        let cdfs: Vec<f64> = self.models.iter().map(|m| m.virtual_cdf(t)).collect();
        let mut total = 0.0;
        for i in 0..n {
            let pdf = self.models[i].virtual_pdf(t);
            if pdf == 0.0 {
                continue;
            }
            let others: f64 = (0..n).filter(|&j| j != i).map(|j| cdfs[j]).product();
            total += pdf * others;
        }
        total
    }
}

/// Convenience wrapper for [`CompetitionDistribution::new`].
pub fn competition_distribution(bid_models: &[DistributionModel]) -> Result<CompetitionDistribution> {
    CompetitionDistribution::new(bid_models)
}

/// `F_Z / f_Z` at `t >= 0` when `k - 1` truthful competitors share the law
/// `GP(p)`, in closed form.
pub fn gp_competition_ratio(p: GpParams, k: usize, t: f64) -> Result<f64> {
    if k < 2 {
        return Err(Error::InvalidParams(format!("need at least one competitor, got k = {k}")));
    }
    let c = p.virtual_slope();
    let y = t / c + p.monopoly_price();
    if t < 0.0 || y > p.upper() || y < p.lower() {
        return Err(Error::OutOfRange { t, lo: 0.0, hi: p.virtual_value(p.upper()) });
    }
    let f = p.pdf(y);
    if !(f > 0.0) || !f.is_finite() {
        return Err(Error::DegenerateDenominator(format!("density at {y} is {f}")));
    }
    Ok(c / (k as f64 - 1.0) * p.cdf(y) / f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_uniform_competitors() {
        let z = competition_distribution(&[DistributionModel::uniform(), DistributionModel::uniform()]).unwrap();
        assert!((z.atom0() - 0.25).abs() < 1e-15);
        for i in 0..=20 {
            let t = i as f64 / 20.0;
            assert!((z.cdf(t) - ((t + 1.0) / 2.0).powi(2)).abs() < 1e-14);
            assert!((z.density(t) - (t + 1.0) / 2.0).abs() < 1e-14);
        }
        assert_eq!(z.cdf(-0.1), 0.0);
        assert_eq!(z.cdf(1.5), 1.0);
    }

    #[test]
    fn ratio_examples() {
        let u = GpParams::uniform();
        assert!((gp_competition_ratio(u, 3, 0.2).unwrap() - 0.6).abs() < 1e-14);
        assert!((gp_competition_ratio(u, 2, 0.0).unwrap() - 1.0).abs() < 1e-14);
        assert!(gp_competition_ratio(u, 2, -0.1).is_err());
        assert!(gp_competition_ratio(u, 2, 1.5).is_err());
    }
}
