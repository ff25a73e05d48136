//! Shading strategies.
//!
//! A strategy maps values to bids. Its induced bid law has a virtual value
//! `psi_B`, and the composite `psi_B(beta(x))` (the "virtualized bid") is what
//! drives payoffs in virtual-value auctions. Strategies built to hit a given
//! virtualized bid `h` carry `h` as their target, computed via
//! `beta(x) = E[h(X) | X >= x]`.

use std::sync::Arc;

use crate::dist::{
    conditional_tail_expectation_with_breaks, uniform_knots, BidMap, DistributionModel, GpParams, GridFunction,
    GRID_KNOTS,
};
use crate::error::{Error, Result};
use crate::numeric::quad::integrate;
use crate::numeric::roots::bisect_increasing;

/// Default slope parameter for the near-zero branch of the one-strategic
/// target.
pub const DEFAULT_EPS: f64 = 1e-6;

/// Increasing function a strategy is built to produce as its virtualized bid.
#[derive(Debug, Clone, PartialEq)]
pub enum VirtualTarget {
    Affine { slope: f64, intercept: f64 },
    Grid(GridFunction),
    /// Best response against `k - 1` truthful uniform bidders, with a small
    /// positive slope `eps` below the kink.
    OneVsUniform { k: usize, eps: f64 },
}

impl VirtualTarget {
    fn one_vs_uniform_parts(k: usize, eps: f64) -> (f64, f64, f64) {
        let a = (k as f64 - 1.0) / k as f64;
        let c = a * eps / (1.0 + eps);
        let kink = (1.0 + eps) / (k as f64 - 1.0);
        (a, c, kink)
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Self::Affine { slope, intercept } => slope * x + intercept,
            Self::Grid(g) => g.eval(x),
            Self::OneVsUniform { k, eps } => {
                let (a, c, kink) = Self::one_vs_uniform_parts(*k, *eps);
                if x < kink {
                    c * x
                } else {
                    a * (x - 1.0 / (*k as f64 - 1.0))
                }
            }
        }
    }

    pub fn slope(&self, x: f64) -> f64 {
        match self {
            Self::Affine { slope, .. } => *slope,
            Self::Grid(g) => g.slope(x),
            Self::OneVsUniform { k, eps } => {
                let (a, c, kink) = Self::one_vs_uniform_parts(*k, *eps);
                if x < kink {
                    c
                } else {
                    a
                }
            }
        }
    }

    pub fn inverse(&self, t: f64) -> f64 {
        match self {
            Self::Affine { slope, intercept } => (t - intercept) / slope,
            Self::Grid(g) => g.inverse(t),
            Self::OneVsUniform { k, eps } => {
                let (a, c, kink) = Self::one_vs_uniform_parts(*k, *eps);
                if t < c * kink {
                    t / c
                } else {
                    t / a + 1.0 / (*k as f64 - 1.0)
                }
            }
        }
    }

    pub fn kinks(&self) -> Vec<f64> {
        match self {
            Self::OneVsUniform { k, eps } => vec![Self::one_vs_uniform_parts(*k, *eps).2],
            _ => Vec::new(),
        }
    }

    fn check_increasing(&self) -> Result<()> {
        match self {
            Self::Affine { slope, .. } if !(*slope > 0.0) => {
                Err(Error::NonMonotone(format!("affine target with slope {slope}")))
            }
            Self::OneVsUniform { eps, .. } if !(*eps > 0.0) => {
                Err(Error::NonMonotone("one-strategic target needs eps > 0".into()))
            }
            _ => Ok(()),
        }
    }
}

/// How a strategy computes its bids.
#[derive(Debug, Clone, PartialEq)]
pub enum ShadingForm {
    Truthful,
    Linear { alpha: f64 },
    Affine { slope: f64, intercept: f64 },
    Grid(GridFunction),
    /// Bids `Q_p(F_1(x))`, so that the bid law is exactly `GP(p)`.
    GpReparam(GpParams),
    /// Closed form of the one-strategic strategy for `Unif[0, 1]` values.
    UniformOneVsUniform { k: usize, eps: f64 },
}

/// A value-to-bid map together with the value law it is applied to.
#[derive(Debug, Clone)]
pub struct ShadingStrategy {
    form: ShadingForm,
    value: DistributionModel,
    target: Option<VirtualTarget>,
}

impl ShadingStrategy {
    pub fn truthful(value: &DistributionModel) -> Self {
        Self { form: ShadingForm::Truthful, value: value.clone(), target: None }
    }

    /// `beta(x) = alpha x` with `0 < alpha <= 1`.
    pub fn linear(value: &DistributionModel, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidParams(format!("linear shading needs 0 < alpha <= 1, got {alpha}")));
        }
        Ok(Self::linear_unchecked(value, alpha))
    }

    /// Linear map without the `alpha <= 1` restriction, for finite
    /// differences around `alpha = 1`.
    pub fn linear_unchecked(value: &DistributionModel, alpha: f64) -> Self {
        Self { form: ShadingForm::Linear { alpha }, value: value.clone(), target: None }
    }

    /// Strategy given by an arbitrary increasing grid map.
    pub fn from_grid(value: &DistributionModel, beta: GridFunction) -> Result<Self> {
        crate::dist::transform_distribution(value, beta.clone())?;
        Ok(Self { form: ShadingForm::Grid(beta), value: value.clone(), target: None })
    }

    pub fn form(&self) -> &ShadingForm {
        &self.form
    }

    pub fn value_model(&self) -> &DistributionModel {
        &self.value
    }

    pub fn target(&self) -> Option<&VirtualTarget> {
        self.target.as_ref()
    }

    /// Same bids without the closed-form target, so that virtualized bids
    /// are recomputed from the map and its slope.
    pub fn without_target(&self) -> Self {
        Self { target: None, ..self.clone() }
    }

    pub fn bid(&self, x: f64) -> f64 {
        match &self.form {
            ShadingForm::Truthful => x,
            ShadingForm::Linear { alpha } => alpha * x,
            ShadingForm::Affine { slope, intercept } => slope * x + intercept,
            ShadingForm::Grid(g) => g.eval(x),
            ShadingForm::GpReparam(p) => gp_reparam_bid(&self.value, p, x),
            ShadingForm::UniformOneVsUniform { k, eps } => uniform_one_vs_uniform(*k, *eps, x).0,
        }
    }

    pub fn bid_slope(&self, x: f64) -> f64 {
        match &self.form {
            ShadingForm::Truthful => 1.0,
            ShadingForm::Linear { alpha } => *alpha,
            ShadingForm::Affine { slope, .. } => *slope,
            ShadingForm::Grid(g) => g.slope(x),
            ShadingForm::GpReparam(p) => {
                let u = self.value.sf(x);
                let f = self.value.pdf(x);
                p.sigma * f * (-(p.xi + 1.0) * u.ln()).exp()
            }
            ShadingForm::UniformOneVsUniform { k, eps } => uniform_one_vs_uniform(*k, *eps, x).1,
        }
    }

    pub fn value_of_bid(&self, b: f64) -> f64 {
        match &self.form {
            ShadingForm::Truthful => b,
            ShadingForm::Linear { alpha } => b / alpha,
            ShadingForm::Affine { slope, intercept } => (b - intercept) / slope,
            ShadingForm::Grid(g) => g.inverse(b),
            ShadingForm::GpReparam(p) => {
                let u = p.sf(b);
                self.value.quantile(1.0 - u)
            }
            ShadingForm::UniformOneVsUniform { .. } => {
                let (lo, hi) = (self.value.support().0, self.value.upper_eval());
                bisect_increasing(&|x| self.bid(x) - b, lo, hi, 1e-15)
            }
        }
    }

    /// Virtual value of the bid placed by type `x`, `psi_B(beta(x))`.
    pub fn virtualized(&self, x: f64) -> f64 {
        if let Some(t) = &self.target {
            return t.eval(x);
        }
        match &self.form {
            ShadingForm::Truthful => x - self.value.inv_hazard_unchecked(x),
            ShadingForm::Linear { alpha } => alpha * (x - self.value.inv_hazard_unchecked(x)),
            ShadingForm::GpReparam(p) => p.virtual_value(self.bid(x)),
            _ => self.bid(x) - self.bid_slope(x) * self.value.inv_hazard_unchecked(x),
        }
    }

    pub fn virtualized_slope(&self, x: f64) -> f64 {
        if let Some(t) = &self.target {
            return t.slope(x);
        }
        match (&self.form, &self.value) {
            (ShadingForm::Truthful, DistributionModel::Gp(g)) => g.virtual_slope(),
            (ShadingForm::Linear { alpha }, DistributionModel::Gp(g)) => alpha * g.virtual_slope(),
            (ShadingForm::GpReparam(p), _) => p.virtual_slope() * self.bid_slope(x),
            _ => {
                let (lo, hi) = (self.value.support().0, self.value.upper_eval());
                let h = 1e-6 * (1.0 + x.abs());
                let a = (x - h).max(lo);
                let b = (x + h).min(hi);
                (self.virtualized(b) - self.virtualized(a)) / (b - a)
            }
        }
    }

    fn closed_virtualized_preimage(&self, t: f64) -> Option<f64> {
        if let Some(tg) = &self.target {
            return Some(tg.inverse(t));
        }
        match (&self.form, &self.value) {
            (ShadingForm::Truthful, DistributionModel::Gp(g)) => Some(g.inverse_virtual_value(t)),
            (ShadingForm::Linear { alpha }, DistributionModel::Gp(g)) => Some(g.inverse_virtual_value(t / alpha)),
            (ShadingForm::GpReparam(p), _) => Some(self.value_of_bid(p.inverse_virtual_value(t))),
            _ => None,
        }
    }

    /// Value-space points where bids or virtualized bids are not smooth.
    pub fn kinks(&self) -> Vec<f64> {
        let mut k = self.target.as_ref().map(|t| t.kinks()).unwrap_or_default();
        if let ShadingForm::UniformOneVsUniform { k: kk, eps } = &self.form {
            k.extend(VirtualTarget::OneVsUniform { k: *kk, eps: *eps }.kinks());
        }
        k
    }

    /// Law of the bids this strategy produces, in the simplest exact form.
    pub fn bid_model(&self) -> DistributionModel {
        match (&self.form, &self.value) {
            (ShadingForm::Truthful, v) => v.clone(),
            (ShadingForm::Linear { alpha }, DistributionModel::Gp(g)) => DistributionModel::Gp(GpParams {
                mu: alpha * g.mu,
                sigma: alpha * g.sigma,
                xi: g.xi,
            }),
            (ShadingForm::Affine { slope, intercept }, DistributionModel::Gp(g)) => DistributionModel::Gp(GpParams {
                mu: slope * g.mu + intercept,
                sigma: slope * g.sigma,
                xi: g.xi,
            }),
            (ShadingForm::GpReparam(p), _) => DistributionModel::Gp(*p),
            _ => DistributionModel::transformed(self.value.clone(), Arc::new(self.clone())),
        }
    }

    /// Value where the virtualized bid crosses zero (the bottom of the
    /// support when it is positive throughout).
    pub fn virtual_root(&self) -> f64 {
        let lo = self.value.support().0;
        if let Some(x) = self.closed_virtualized_preimage(0.0) {
            return x.clamp(lo, self.value.upper_eval());
        }
        crate::dist::support_root(&self.value, |x| self.virtualized(x))
    }

    /// Type whose virtualized bid equals `t` (clamped to the support).
    pub fn virtualized_preimage(&self, t: f64) -> f64 {
        let (lo, hi) = (self.value.support().0, self.value.upper_eval());
        if let Some(x) = self.closed_virtualized_preimage(t) {
            return x.clamp(lo, hi);
        }
        bisect_increasing(&|x| self.virtualized(x) - t, lo, hi, 1e-13)
    }
}

impl BidMap for ShadingStrategy {
    fn bid(&self, x: f64) -> f64 {
        ShadingStrategy::bid(self, x)
    }

    fn bid_slope(&self, x: f64) -> f64 {
        ShadingStrategy::bid_slope(self, x)
    }

    fn value_of_bid(&self, b: f64) -> f64 {
        ShadingStrategy::value_of_bid(self, b)
    }

    fn virtualized(&self, x: f64) -> Option<f64> {
        match (&self.target, &self.form) {
            (None, ShadingForm::Grid(_)) => None,
            _ => Some(ShadingStrategy::virtualized(self, x)),
        }
    }

    fn virtualized_slope(&self, x: f64) -> Option<f64> {
        match (&self.target, &self.form) {
            (None, ShadingForm::Grid(_)) => None,
            _ => Some(ShadingStrategy::virtualized_slope(self, x)),
        }
    }

    fn value_of_virtualized(&self, t: f64) -> Option<f64> {
        self.closed_virtualized_preimage(t)
    }

    fn kinks(&self) -> Vec<f64> {
        ShadingStrategy::kinks(self)
    }
}

fn gp_reparam_bid(value: &DistributionModel, p: &GpParams, x: f64) -> f64 {
    // Q_p(F_1(x)) written through the survival function to keep the upper
    // tail accurate.
    let ln_u = value.sf(x).ln();
    if p.xi == 0.0 {
        p.mu - p.sigma * ln_u
    } else {
        let a = -p.xi * ln_u;
        p.mu + p.sigma * a.exp_m1() / p.xi
    }
}

/// Bid and slope of the one-strategic strategy for `Unif[0, 1]` values.
fn uniform_one_vs_uniform(k: usize, eps: f64, x: f64) -> (f64, f64) {
    let a = (k as f64 - 1.0) / k as f64;
    let c = a * eps / (1.0 + eps);
    let kink = (1.0 + eps) / (k as f64 - 1.0);
    if kink >= 1.0 {
        return (c * (1.0 + x) / 2.0, c / 2.0);
    }
    let upper = |y: f64| a * ((1.0 + y) / 2.0 - 1.0 / (k as f64 - 1.0));
    if x >= kink {
        return (upper(x), a / 2.0);
    }
    let tail = upper(kink) * (1.0 - kink);
    let b = (c * (kink * kink - x * x) / 2.0 + tail) / (1.0 - x);
    (b, (b - c * x) / (1.0 - x))
}

fn grid_knots(d: &DistributionModel, extra: &[f64]) -> Vec<f64> {
    let lo = d.support().0;
    let hi = d.upper_eval();
    let mut knots = uniform_knots(lo, hi, GRID_KNOTS);
    let h = (hi - lo) / (GRID_KNOTS - 1) as f64;
    for &e in extra {
        if e > lo && e < hi {
            let i = knots.partition_point(|&v| v < e);
            if (knots[i] - e).abs() < 1e-3 * h {
                knots[i] = e;
            } else if i > 0 && (e - knots[i - 1]).abs() < 1e-3 * h {
                knots[i - 1] = e;
            } else {
                knots.insert(i, e);
            }
        }
    }
    knots
}

/// Tabulates `gamma(x) = E[h(X) | X >= x]` on the default grid.
///
/// Knot slopes come from `gamma' = (gamma - h) f / (1 - F)`, so the
/// interpolant is cubic Hermite with exact slopes.
pub fn gamma_from_target(d: &DistributionModel, target: &VirtualTarget) -> Result<GridFunction> {
    target.check_increasing()?;
    let knots = grid_knots(d, &target.kinks());
    let n = knots.len();
    let bounded = d.is_bounded();
    let mut panel = vec![0.0; n - 1];
    for j in 0..n - 1 {
        panel[j] = integrate(&|t| target.eval(t) * d.pdf(t), knots[j], knots[j + 1], 1e-12);
    }
    let top = knots[n - 1];
    let mut tail = if bounded { 0.0 } else { d.sf(top) * target.eval(top + d.mean_excess(top)) };
    let mut values = vec![0.0; n];
    let mut slopes = vec![0.0; n];
    let last_s = d.sf(top);
    values[n - 1] = if bounded || last_s <= 0.0 { target.eval(top) } else { tail / last_s };
    for j in (0..n - 1).rev() {
        tail += panel[j];
        let s = d.sf(knots[j]);
        values[j] = tail / s;
        if !values[j].is_finite() {
            return Err(Error::NonIntegrable(format!("tail expectation at {}", knots[j])));
        }
    }
    for j in 0..n {
        let ih = d.inv_hazard_unchecked(knots[j]);
        slopes[j] = if ih > 0.0 && ih.is_finite() { (values[j] - target.eval(knots[j])) / ih } else { 0.0 };
    }
    if bounded {
        slopes[n - 1] = (2.0 * slopes[n - 2] - slopes[n - 3]).max(0.0);
    }
    GridFunction::with_slopes(knots, values, slopes)
}

/// Strategy whose virtualized bid is `target`, using a closed form when the
/// value law is generalized Pareto and the target is affine.
pub fn shade_to_target(d: &DistributionModel, target: VirtualTarget) -> Result<ShadingStrategy> {
    target.check_increasing()?;
    if let (DistributionModel::Gp(g), VirtualTarget::Affine { slope, intercept }) = (d, &target) {
        let s = slope / (1.0 - g.xi);
        let c = slope * (g.sigma - g.xi * g.mu) / (1.0 - g.xi) + intercept;
        return Ok(ShadingStrategy {
            form: ShadingForm::Affine { slope: s, intercept: c },
            value: d.clone(),
            target: Some(target),
        });
    }
    let g = gamma_from_target(d, &target)?;
    Ok(ShadingStrategy { form: ShadingForm::Grid(g), value: d.clone(), target: Some(target) })
}

/// Grid version of [`shade_to_target`], used to cross-check closed forms.
pub fn shade_to_target_grid(d: &DistributionModel, target: VirtualTarget) -> Result<ShadingStrategy> {
    let g = gamma_from_target(d, &target)?;
    Ok(ShadingStrategy { form: ShadingForm::Grid(g), value: d.clone(), target: Some(target) })
}

/// Symmetric first-price equilibrium bid `E[Y | Y < x]` where `Y` is the
/// highest of `k - 1` independent values.
pub fn first_price_bid(d: &DistributionModel, k: usize) -> Result<GridFunction> {
    if k < 2 {
        return Err(Error::InvalidParams(format!("need at least two bidders, got {k}")));
    }
    let m = (k - 1) as i32;
    let knots = grid_knots(d, &[]);
    let n = knots.len();
    let g = |x: f64| d.cdf(x).powi(m);
    let mut acc = 0.0;
    let mut values = vec![knots[0]; n];
    let mut slopes = vec![0.0; n];
    for j in 1..n {
        acc += integrate(&g, knots[j - 1], knots[j], 1e-12);
        let gx = g(knots[j]);
        values[j] = knots[j] - acc / gx;
        let f = d.cdf(knots[j]);
        slopes[j] = m as f64 * d.pdf(knots[j]) / f * (knots[j] - values[j]);
    }
    slopes[0] = (2.0 * slopes[1] - slopes[2]).max(0.0);
    GridFunction::with_slopes(knots, values, slopes)
}

/// Closed-form first-price bid for `GP(mu, sigma, -1)` (uniform) values.
pub fn first_price_bid_uniform(g: &GpParams, k: usize, x: f64) -> f64 {
    g.mu + (k as f64 - 1.0) / k as f64 * (x - g.mu)
}

/// Symmetric equilibrium shading when every bidder faces the same
/// virtual-value auction: the virtualized bid equals the first-price bid.
pub fn equilibrium_shading(d: &DistributionModel, k: usize) -> Result<ShadingStrategy> {
    if k < 2 {
        return Err(Error::InvalidParams(format!("need at least two bidders, got {k}")));
    }
    if let DistributionModel::Gp(g) = d {
        if g.xi == -1.0 {
            let a = (k as f64 - 1.0) / k as f64;
            return shade_to_target(d, VirtualTarget::Affine { slope: a, intercept: g.mu / k as f64 });
        }
    }
    shade_to_target(d, VirtualTarget::Grid(first_price_bid(d, k)?))
}

/// Grid-based equilibrium shading regardless of closed forms.
pub fn equilibrium_shading_grid(d: &DistributionModel, k: usize) -> Result<ShadingStrategy> {
    shade_to_target_grid(d, VirtualTarget::Grid(first_price_bid(d, k)?))
}

fn resolve_eps(eps: f64) -> Result<f64> {
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(Error::InvalidParams(format!("eps must be non-negative, got {eps}")));
    }
    // eps = 0 stands for the limit eps -> 0+, approximated by the default.
    Ok(if eps > 0.0 { eps } else { DEFAULT_EPS })
}

/// Optimal shading for one strategic bidder facing `k - 1` truthful
/// `Unif[0, 1]` bidders in Myerson's auction.
pub fn one_vs_uniform_shading(d: &DistributionModel, k: usize, eps: f64) -> Result<ShadingStrategy> {
    if k < 2 {
        return Err(Error::InvalidParams(format!("need at least two bidders, got {k}")));
    }
    let (lo, hi) = d.support();
    let cap = (k as f64 + 1.0) / (k as f64 - 1.0);
    if lo < 0.0 || hi > cap {
        return Err(Error::SupportViolation(format!("values must lie in [0, {cap}], support is [{lo}, {hi}]")));
    }
    let eps = resolve_eps(eps)?;
    let target = VirtualTarget::OneVsUniform { k, eps };
    if let DistributionModel::Gp(g) = d {
        if *g == GpParams::uniform() {
            return Ok(ShadingStrategy {
                form: ShadingForm::UniformOneVsUniform { k, eps },
                value: d.clone(),
                target: Some(target),
            });
        }
    }
    shade_to_target(d, target)
}

/// Limit of the uniform one-strategic strategy as `eps -> 0`.
pub fn one_vs_uniform_limit(k: usize, x: f64) -> f64 {
    let kf = k as f64;
    let kink = 1.0 / (kf - 1.0);
    if x >= kink {
        (kf - 1.0) / kf * ((1.0 + x) / 2.0 - kink)
    } else {
        (kf - 2.0).powi(2) / (2.0 * (kf - 1.0) * kf * (1.0 - x))
    }
}

/// Linear shading that is optimal among GP re-parametrizations when the
/// strategic bidder has `GP(0, sigma1, xi1)` values with mean `1/k` and
/// faces `k` truthful uniform bidders.
pub fn gp_simple_vs_uniform(sigma1: f64, xi1: f64, k: usize) -> Result<ShadingStrategy> {
    let g = GpParams::new(0.0, sigma1, xi1)?;
    if k < 1 {
        return Err(Error::InvalidParams("need at least one opponent".into()));
    }
    if (sigma1 / (1.0 - xi1) - 1.0 / k as f64).abs() >= 1e-9 {
        return Err(Error::Precondition(format!(
            "mean sigma/(1-xi) = {} differs from 1/k = {}",
            sigma1 / (1.0 - xi1),
            1.0 / k as f64
        )));
    }
    let kf = k as f64;
    ShadingStrategy::linear(&DistributionModel::Gp(g), kf / ((kf + 1.0) * (1.0 - xi1)))
}

/// Strategy whose bid law is exactly `GP(p)`.
pub fn gp_reparam_shading(d: &DistributionModel, p: GpParams) -> Result<ShadingStrategy> {
    let p = GpParams::new(p.mu, p.sigma, p.xi)?;
    Ok(ShadingStrategy { form: ShadingForm::GpReparam(p), value: d.clone(), target: None })
}

/// `E[h(X) | X >= x]` for a target, using closed forms where available.
pub fn target_tail_expectation(d: &DistributionModel, target: &VirtualTarget, x: f64) -> Result<f64> {
    if let (DistributionModel::Gp(g), VirtualTarget::Affine { slope, intercept }) = (d, target) {
        let x = d.check_in_support(x)?;
        return Ok(slope * (x + g.mean_excess(x)) + intercept);
    }
    conditional_tail_expectation_with_breaks(d, &|t| target.eval(t), x, &target.kinks())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_equilibrium_closed_form() {
        let u = DistributionModel::uniform();
        let s = equilibrium_shading(&u, 3).unwrap();
        for i in 0..=10 {
            let x = i as f64 / 10.0;
            assert!((s.bid(x) - (1.0 + x) / 3.0).abs() < 1e-15);
        }
        assert!(matches!(s.form(), ShadingForm::Affine { .. }));
    }

    #[test]
    fn first_price_bid_grid_matches_uniform() {
        let u = DistributionModel::uniform();
        let b = first_price_bid(&u, 3).unwrap();
        assert!((b.eval(0.6) - 0.4).abs() < 1e-10);
        for i in 0..=50 {
            let x = i as f64 / 50.0;
            assert!((b.eval(x) - 2.0 * x / 3.0).abs() < 1e-10);
        }
        assert!(first_price_bid(&u, 1).is_err());
    }

    #[test]
    fn gamma_matches_closed_form_for_uniform() {
        let u = DistributionModel::uniform();
        let g = gamma_from_target(&u, &VirtualTarget::Affine { slope: 2.0 / 3.0, intercept: 0.0 }).unwrap();
        for i in 0..=100 {
            let x = i as f64 / 100.0;
            assert!((g.eval(x) - (1.0 + x) / 3.0).abs() < 1e-10, "x={x}");
            assert!((g.slope(x) - 1.0 / 3.0).abs() < 1e-7, "x={x}");
        }
    }

    #[test]
    fn one_vs_uniform_examples() {
        let u = DistributionModel::uniform();
        let s = one_vs_uniform_shading(&u, 4, 0.0).unwrap();
        assert!((s.bid(1.0) - 0.5).abs() < 1e-5);
        assert!((s.bid(0.0) - 1.0 / 6.0).abs() < 1e-5);
        assert!((one_vs_uniform_limit(4, 1.0) - 0.5).abs() < 1e-15);
        assert!((one_vs_uniform_limit(4, 0.0) - 1.0 / 6.0).abs() < 1e-15);
        let wide = DistributionModel::gp(0.0, 3.0, -1.0).unwrap();
        assert!(matches!(one_vs_uniform_shading(&wide, 4, 1e-6), Err(Error::SupportViolation(_))));
    }

    #[test]
    fn one_vs_uniform_closed_form_matches_grid() {
        let u = DistributionModel::uniform();
        for k in [2usize, 3, 4, 6] {
            let closed = one_vs_uniform_shading(&u, k, 1e-3).unwrap();
            let grid = shade_to_target_grid(&u, VirtualTarget::OneVsUniform { k, eps: 1e-3 }).unwrap();
            for i in 0..=200 {
                let x = i as f64 / 200.0;
                assert!((closed.bid(x) - grid.bid(x)).abs() < 1e-9, "k={k} x={x}");
                assert!((closed.bid_slope(x) - grid.bid_slope(x)).abs() < 1e-5, "k={k} x={x}");
            }
        }
    }

    #[test]
    fn gp_simple_examples() {
        let s = gp_simple_vs_uniform(1.0, -1.0, 2).unwrap();
        assert!(matches!(s.form(), ShadingForm::Linear { alpha } if (alpha - 1.0 / 3.0).abs() < 1e-15));
        assert!(matches!(gp_simple_vs_uniform(1.0, -1.0, 3), Err(Error::Precondition(_))));
    }

    #[test]
    fn gp_reparam_uniform_to_third() {
        let u = DistributionModel::uniform();
        let s = gp_reparam_shading(&u, GpParams { mu: 0.0, sigma: 1.0 / 3.0, xi: -1.0 }).unwrap();
        for i in 0..=20 {
            let x = i as f64 / 20.0;
            assert!((s.bid(x) - x / 3.0).abs() < 1e-15);
            assert!((s.value_of_bid(s.bid(x)) - x).abs() < 1e-14);
        }
    }
}
