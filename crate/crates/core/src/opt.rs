//! Optimizers over shading parameters.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::{DistributionModel, GpParams};
use crate::error::{Error, Result};
use crate::payoff::{bsp_payoff, bsp_payoff_gradient, CompetitionDistribution};
use crate::rng::RoundStreams;

/// Points in the coarse scan that precedes golden-section refinement.
pub const SCAN_POINTS: usize = 64;

/// Outcome of a scalar maximization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarOptimum {
    pub argmax: f64,
    pub value: f64,
    pub evaluations: usize,
}

/// Maximizes `f` over `[lo, hi]`: a 64-point scan locates the best cell,
/// golden-section search refines it to width `tol`.
pub fn maximize_scalar<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<ScalarOptimum> {
    if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidBracket { lo, hi });
    }
    let mut evals = 0;
    let mut eval = |x: f64| {
        evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };
    let step = (hi - lo) / (SCAN_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..SCAN_POINTS)
        .map(|i| if i == SCAN_POINTS - 1 { hi } else { lo + step * i as f64 })
        .collect();
    let vals: Vec<f64> = grid.iter().map(|&x| eval(x)).collect();
    let mut best = 0;
    for i in 1..SCAN_POINTS {
        if vals[i] > vals[best] {
            best = i;
        }
    }
    if vals[best] == f64::NEG_INFINITY {
        return Err(Error::Diverged("objective is not finite on the scan grid".into()));
    }
    let (mut bx, mut bv) = (grid[best], vals[best]);
    let mut a = grid[best.saturating_sub(1)];
    let mut b = grid[(best + 1).min(SCAN_POINTS - 1)];
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = eval(c);
    let mut fd = eval(d);
    for _ in 0..400 {
        if (b - a).abs() <= tol * (1.0 + 0.5 * (a + b).abs()) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = eval(d);
        }
    }
    for (x, v) in [(c, fc), (d, fd)] {
        if v > bv {
            bx = x;
            bv = v;
        }
    }
    Ok(ScalarOptimum { argmax: bx, value: bv, evaluations: evals })
}

/// Box constraints for the reparametrization `(mu, sigma, xi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BspBounds {
    pub mu: (f64, f64),
    pub sigma: (f64, f64),
    pub xi: (f64, f64),
}

impl Default for BspBounds {
    fn default() -> Self {
        Self { mu: (-1.0, 1.0), sigma: (1e-3, 5.0), xi: (-5.0, -1e-6) }
    }
}

impl BspBounds {
    fn validate(&self) -> Result<()> {
        for (lo, hi) in [self.mu, self.sigma, self.xi] {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::InvalidBracket { lo, hi });
            }
        }
        if self.sigma.0 <= 0.0 || self.xi.1 > 0.0 {
            return Err(Error::InvalidParams("bounds need sigma > 0 and xi <= 0".into()));
        }
        Ok(())
    }

    pub fn contains(&self, p: &GpParams) -> bool {
        let inside = |v: f64, (lo, hi): (f64, f64)| v >= lo && v <= hi;
        inside(p.mu, self.mu) && inside(p.sigma, self.sigma) && inside(p.xi, self.xi)
    }

    fn project(&self, v: [f64; 3]) -> GpParams {
        GpParams {
            mu: v[0].clamp(self.mu.0, self.mu.1),
            sigma: v[1].clamp(self.sigma.0, self.sigma.1),
            xi: v[2].clamp(self.xi.0, self.xi.1),
        }
    }
}

/// Random restarts beyond the initial point.
pub const BSP_RESTARTS: usize = 8;
const BSP_RESTART_SEED: u64 = 0x5eed_b5b0;
const ARMIJO: f64 = 1e-4;
const MAX_HALVINGS: usize = 30;
/// Default iteration cap of each gradient-ascent run.
pub const BSP_MAX_ITERS: usize = 400;
const GRAD_TOL: f64 = 1e-7;
/// Projected-gradient norm below which a run counts as converged.
pub const BSP_CONVERGED_TOL: f64 = 1e-4;

/// Best reparametrization found by [`maximize_bsp`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BspOptimum {
    pub argmax: GpParams,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Norm of the projected gradient at `argmax`.
    pub gradient_norm: f64,
    /// Objective after each accepted step of the winning run, starting
    /// from its initial point.
    #[serde(skip)]
    pub history: Vec<f64>,
}

fn as_vec(p: &GpParams) -> [f64; 3] {
    [p.mu, p.sigma, p.xi]
}

fn projected_step_norm(b: &BspBounds, p: &GpParams, g: &[f64; 3]) -> f64 {
    let x = as_vec(p);
    let q = as_vec(&b.project([x[0] + g[0], x[1] + g[1], x[2] + g[2]]));
    (0..3).map(|i| (q[i] - x[i]).powi(2)).sum::<f64>().sqrt()
}

fn ascend(
    d1: &DistributionModel,
    z: &CompetitionDistribution,
    start: GpParams,
    b: &BspBounds,
    max_iters: usize,
) -> Result<BspOptimum> {
    let mut p = b.project(as_vec(&start));
    let mut value = bsp_payoff(d1, p, z)?;
    let mut history = vec![value];
    let mut step = 1.0;
    let mut prev: Option<([f64; 3], [f64; 3])> = None;
    let mut iterations = 0;
    let mut converged = false;
    let mut gnorm = f64::INFINITY;
    for _ in 0..max_iters {
        let g = bsp_payoff_gradient(d1, p, z)?.full;
        gnorm = projected_step_norm(b, &p, &g);
        if gnorm < GRAD_TOL {
            converged = true;
            break;
        }
        let x = as_vec(&p);
        // Barzilai-Borwein trial step from the last move.
        if let Some((px, pg)) = prev {
            let sv: [f64; 3] = [0, 1, 2].map(|i| x[i] - px[i]);
            let yv: [f64; 3] = [0, 1, 2].map(|i| pg[i] - g[i]);
            let ss: f64 = sv.iter().map(|v| v * v).sum();
            let sy: f64 = (0..3).map(|i| sv[i] * yv[i]).sum();
            if sy > 0.0 {
                step = (ss / sy).clamp(1e-8, 1e4);
            }
        }
        iterations += 1;
        let mut accepted = false;
        for _ in 0..=MAX_HALVINGS {
            let cand = b.project([x[0] + step * g[0], x[1] + step * g[1], x[2] + step * g[2]]);
            let c = as_vec(&cand);
            let gain: f64 = (0..3).map(|i| g[i] * (c[i] - x[i])).sum();
            if let Ok(v) = bsp_payoff(d1, cand, z) {
                if v >= value + ARMIJO * gain {
                    prev = Some((x, g));
                    p = cand;
                    value = v;
                    history.push(v);
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted {
            // No ascent left at working precision.
            break;
        }
    }
    if !converged {
        gnorm = projected_step_norm(b, &p, &bsp_payoff_gradient(d1, p, z)?.full);
    }
    converged |= gnorm < BSP_CONVERGED_TOL;
    if !value.is_finite() {
        return Err(Error::Diverged(format!("payoff at {p:?} is not finite")));
    }
    Ok(BspOptimum { argmax: p, value, iterations, converged, gradient_norm: gnorm, history })
}

/// Projected gradient ascent on the reparametrized payoff from `init` and
/// from eight seeded random starts inside `bounds`; returns the best run.
pub fn maximize_bsp(
    d1: &DistributionModel,
    z: &CompetitionDistribution,
    init: GpParams,
    bounds: BspBounds,
) -> Result<BspOptimum> {
    maximize_bsp_capped(d1, z, init, bounds, BSP_MAX_ITERS)
}

/// [`maximize_bsp`] with at most `max_iters` accepted-or-rejected steps
/// per run.
pub fn maximize_bsp_capped(
    d1: &DistributionModel,
    z: &CompetitionDistribution,
    init: GpParams,
    bounds: BspBounds,
    max_iters: usize,
) -> Result<BspOptimum> {
    bounds.validate()?;
    if max_iters == 0 {
        return Err(Error::InvalidParams("iteration cap must be positive".into()));
    }
    if !bounds.contains(&init) {
        return Err(Error::InvalidParams(format!("initial point {init:?} is outside the bounds")));
    }
    let streams = RoundStreams::new(BSP_RESTART_SEED);
    let mut starts = vec![init];
    for r in 0..BSP_RESTARTS as u64 {
        let mut rng = streams.round(r);
        let mut pick = |(lo, hi): (f64, f64)| lo + (hi - lo) * rng.gen::<f64>();
        let mu = pick(bounds.mu);
        let sigma = (pick((bounds.sigma.0.ln(), bounds.sigma.1.ln()))).exp();
        let xi = pick(bounds.xi);
        starts.push(GpParams { mu, sigma, xi });
    }
    let runs: Vec<Result<BspOptimum>> = starts.par_iter().map(|s| ascend(d1, z, *s, &bounds, max_iters)).collect();
    let mut best: Option<BspOptimum> = None;
    let mut last_err = None;
    for r in runs {
        match r {
            Ok(o) if best.as_ref().is_none_or(|b| o.value > b.value) => best = Some(o),
            Ok(_) => {}
            Err(e) => last_err = Some(e),
        }
    }
    best.ok_or_else(|| Error::Diverged(format!("every start failed; last error: {}", last_err.map(|e| e.to_string()).unwrap_or_default())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_interior_and_boundary_maxima() {
        let o = maximize_scalar(|x| -(x - 0.3).powi(2), 0.0, 1.0, 1e-12).unwrap();
        assert!((o.argmax - 0.3).abs() < 1e-6);
        let o = maximize_scalar(|x| -x, 0.01, 1.0, 1e-12).unwrap();
        assert_eq!(o.argmax, 0.01);
        assert!(matches!(maximize_scalar(|x| x, 1.0, 0.0, 1e-9), Err(Error::InvalidBracket { .. })));
    }

    #[test]
    fn bsp_ascent_improves_on_truthful() {
        let u = DistributionModel::uniform();
        let z = crate::payoff::competition_distribution(&[u.clone(), u.clone()]).unwrap();
        let truthful = GpParams::uniform();
        let o = maximize_bsp(&u, &z, truthful, BspBounds::default()).unwrap();
        assert!(o.value > bsp_payoff(&u, truthful, &z).unwrap());
        assert!(BspBounds::default().contains(&o.argmax));
    }
}
