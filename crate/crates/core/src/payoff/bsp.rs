//! Payoff of bidding through a generalized Pareto reparametrization, and
//! its gradient in the parameters `(mu, sigma, xi)`.

use crate::dist::{DistributionModel, GpParams};
use crate::error::{Error, Result};
use crate::numeric::quad::integrate_with_breaks;
use crate::shade::gp_reparam_shading;

use super::{payoff_quadrature, CompetitionDistribution, QUAD_TOL};

/// Gradient of the payoff in `(mu, sigma, xi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BspGradient {
    pub full: [f64; 3],
    /// Part coming from types with positive virtualized bid.
    pub interior: [f64; 3],
    /// Part coming from the reserve type moving across the atom at zero.
    pub point_mass: [f64; 3],
}

impl BspGradient {
    pub fn norm(&self) -> f64 {
        self.full.iter().map(|g| g * g).sum::<f64>().sqrt()
    }

    pub fn interior_norm(&self) -> f64 {
        self.interior.iter().map(|g| g * g).sum::<f64>().sqrt()
    }
}

/// Expected payoff when bids are `Q_p(F_1(x))`.
pub fn bsp_payoff(d1: &DistributionModel, p: GpParams, z: &CompetitionDistribution) -> Result<f64> {
    Ok(payoff_quadrature(d1, &gp_reparam_shading(d1, p)?, z)?.mean)
}

/// `(e^a a - e^a + 1) / a^2`, the sum of `(n-1) a^(n-2) / n!` over `n >= 2`.
fn xi_kernel(a: f64) -> f64 {
    if a.abs() < 0.1 {
        let (mut sum, mut pow, mut fact) = (0.0, 1.0, 2.0);
        for n in 2..24 {
            sum += (n - 1) as f64 * pow / fact;
            pow *= a;
            fact *= (n + 1) as f64;
        }
        sum
    } else {
        (a * a.exp() - a.exp_m1()) / (a * a)
    }
}

/// Gradient of the virtualized bid `psi_p` of the type at upper-tail
/// probability `u`, in `(mu, sigma, xi)`.
pub fn bsp_virtual_gradient(p: &GpParams, u: f64) -> [f64; 3] {
    let l = u.ln();
    let a = -p.xi * l;
    let w = a.exp();
    // (w - 1)/xi, stable as xi -> 0.
    let rel = if a == 0.0 { -l } else { -l * a.exp_m1() / a };
    let d_sigma = rel - w;
    let d_xi = p.sigma * (l * l * xi_kernel(a) + l * w);
    [1.0, d_sigma, d_xi]
}

/// Analytic payoff gradient for the reparametrized bid `p`, with the
/// threshold term split out.
pub fn bsp_payoff_gradient(d1: &DistributionModel, p: GpParams, z: &CompetitionDistribution) -> Result<BspGradient> {
    let s = gp_reparam_shading(d1, p)?;
    let (lo, _) = d1.support();
    let top = d1.upper_eval();
    let x_p = s.virtual_root();
    let mut br = s.kinks();
    for &t in z.kinks() {
        br.push(s.virtualized_preimage(t));
    }
    let mut interior = [0.0; 3];
    for (c, slot) in interior.iter_mut().enumerate() {
        *slot = integrate_with_breaks(
            &|x| {
                let u = d1.sf(x);
                if u <= 0.0 {
                    return 0.0;
                }
                let v = s.virtualized(x).max(0.0);
                let g = bsp_virtual_gradient(&p, u)[c];
                d1.pdf(x) * g * ((x - v) * z.density(v) - z.cdf(v))
            },
            x_p,
            top,
            &br,
            QUAD_TOL,
        );
    }
    let mut point_mass = [0.0; 3];
    if x_p > lo && x_p < top && z.atom0() > 0.0 {
        let u = d1.sf(x_p);
        // f_1 / (d psi_p / dx) at the reserve type.
        let jac = u.powf(1.0 + p.xi) / ((1.0 - p.xi) * p.sigma);
        let g = bsp_virtual_gradient(&p, u);
        for c in 0..3 {
            point_mass[c] = g[c] * z.atom0() * x_p * jac;
        }
    }
    let full = [0, 1, 2].map(|c| interior[c] + point_mass[c]);
    if full.iter().any(|g| !g.is_finite()) {
        return Err(Error::NonIntegrable(format!("gradient at {p:?} is not finite")));
    }
    Ok(BspGradient { full, interior, point_mass })
}
