//! The decay-controlled diffeomorphism group, its p-root charts, the
//! multiplicative cocycle, and the Jacobian correspondence with densities.
//!
//! A diffeomorphism is stored through its Jacobian perturbation h = phi' - 1
//! rather than through phi samples: every chart map acts pointwise on phi',
//! so this representation keeps them exact, while phi itself is recovered as
//! x + integral of h. The exponent p ranges over [1, infinity); pass
//! `f64::INFINITY` for the logarithmic chart.

use crate::error::{Error, Result};
use crate::numerics::{interp, Decay, Grid, RealFunction};

/// Decay-controlled diffeomorphism of the line, phi(x) = x + int_{-inf}^x h.
#[derive(Debug, Clone)]
pub struct Diffeo {
    /// Jacobian perturbation phi' - 1, vanishing at both ends.
    h: RealFunction,
    /// phi sampled at the nodes (cached for evaluation and inversion).
    phi: Vec<f64>,
}

impl Diffeo {
    /// Build from the Jacobian perturbation; rejects non-positive Jacobians.
    pub fn from_jacobian_perturbation(h: RealFunction) -> Result<Self> {
        if h.decay() != Decay::VanishesAtBothEnds {
            return Err(Error::WrongDecay { expected: "VanishesAtBothEnds", got: "other" });
        }
        let min_jac = h.values().iter().fold(f64::INFINITY, |m, &v| m.min(1.0 + v));
        if !(min_jac > 0.0) {
            return Err(Error::JacobianPositivity(min_jac));
        }
        let f = h.cumulative_integral()?;
        let phi = h.grid().xs().zip(f.values()).map(|(x, &fx)| x + fx).collect();
        Ok(Self { h, phi })
    }

    /// Same, with a relaxed boundary tolerance on h (used by reconstruction,
    /// whose membership test certifies decay only to 1e-4).
    pub fn from_jacobian_perturbation_with_tol(
        grid: Grid,
        values: Vec<f64>,
        tol: f64,
    ) -> Result<Self> {
        let h = RealFunction::with_boundary_tol(grid, values, Decay::VanishesAtBothEnds, tol)?;
        Self::from_jacobian_perturbation(h)
    }

    pub fn identity(grid: Grid) -> Self {
        Self::from_jacobian_perturbation(RealFunction::zeros(grid)).expect("identity is valid")
    }

    pub fn grid(&self) -> Grid {
        self.h.grid()
    }

    /// The Jacobian perturbation phi' - 1.
    pub fn h(&self) -> &RealFunction {
        &self.h
    }

    /// phi at the grid nodes.
    pub fn phi_values(&self) -> &[f64] {
        &self.phi
    }

    /// phi' at the grid nodes (exact: 1 + h).
    pub fn jacobian_values(&self) -> Vec<f64> {
        self.h.values().iter().map(|&v| 1.0 + v).collect()
    }

    /// Total displacement at the right end, int h = lim_{x->+inf} (phi - x).
    pub fn total_displacement(&self) -> f64 {
        self.phi[self.grid().n() - 1] - self.grid().x_max()
    }

    /// Evaluate phi by monotone cubic interpolation, extended linearly
    /// (phi(x) = x on the left, x + int h on the right) outside the window.
    pub fn evaluate(&self, x: f64) -> f64 {
        let g = self.grid();
        if x < g.x_min() {
            return x;
        }
        if x > g.x_max() {
            return x + self.total_displacement();
        }
        self.hermite().eval(x)
    }

    fn hermite(&self) -> interp::MonotoneHermite {
        let slopes = self.jacobian_values();
        interp::MonotoneHermite::new(self.grid().x_min(), self.grid().h(), self.phi.clone(), slopes)
    }

    /// phi o psi, through the chain rule on the stored Jacobian data:
    /// (phi o psi)' = (phi' o psi) psi', with phi' - 1 interpolated at the
    /// (pointwise-exact) psi samples. Differentiating interpolated phi values
    /// instead would inject cell-scale noise that downstream second
    /// derivatives amplify past the cocycle tolerances.
    pub fn compose(&self, psi: &Diffeo) -> Result<Diffeo> {
        let g = self.grid();
        assert_eq!(g, psi.grid(), "grid mismatch in compose");
        let h_vals: Vec<f64> = psi
            .phi
            .iter()
            .zip(psi.h.values())
            .map(|(&y, &h_psi)| {
                let h_phi = if y < g.x_min() || y > g.x_max() {
                    0.0
                } else {
                    interp::quintic(g.x_min(), g.h(), self.h.values(), y)
                };
                (1.0 + h_phi) * (1.0 + h_psi) - 1.0
            })
            .collect();
        let h = RealFunction::with_boundary_tol(g, h_vals, Decay::VanishesAtBothEnds, 1e-6)?;
        Diffeo::from_jacobian_perturbation(h)
    }

    /// phi^{-1} by monotone root bracketing per grid node (bisection below
    /// 1e-12, polished by Newton steps so the inverse samples are smooth to
    /// machine precision), then Jacobian by finite differences of the
    /// inverse samples.
    pub fn invert(&self) -> Result<Diffeo> {
        let g = self.grid();
        let hermite = self.hermite();
        let slack = self.h.lp_norm(1.0)? + 1.0;
        let eval = |y: f64| -> (f64, f64) {
            if y < g.x_min() {
                (y, 1.0)
            } else if y > g.x_max() {
                (y + self.total_displacement(), 1.0)
            } else {
                hermite.eval_with_derivative(y)
            }
        };
        let psi: Vec<f64> = g
            .xs()
            .map(|target| {
                let mut lo = target - slack;
                let mut hi = target + slack;
                for _ in 0..48 {
                    let mid = 0.5 * (lo + hi);
                    if eval(mid).0 < target {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if hi - lo < 1e-12 {
                        break;
                    }
                }
                let mut y = 0.5 * (lo + hi);
                // The bisection quantization (~5e-13, alternating node to
                // node) would be amplified by later second derivatives;
                // Newton squeezes it to rounding level.
                for _ in 0..3 {
                    let (val, slope) = eval(y);
                    if slope > 0.0 {
                        y -= (val - target) / slope;
                    }
                }
                y
            })
            .collect();
        let psi_fn = RealFunction::unrestricted(g, psi)?;
        let jac = psi_fn.derivative(1)?;
        let h_vals: Vec<f64> = jac.values().iter().map(|&v| v - 1.0).collect();
        let h = RealFunction::with_boundary_tol(g, h_vals, Decay::VanishesAtBothEnds, 1e-6)?;
        Diffeo::from_jacobian_perturbation(h)
    }
}

/// p-root chart image: f = p((phi')^{1/p} - 1) with f > -p.
#[derive(Debug, Clone)]
pub struct PRootCoord {
    p: f64,
    f: RealFunction,
}

impl PRootCoord {
    pub fn new(p: f64, f: RealFunction) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::InvalidExponent(p, "p in [1, infinity)"));
        }
        let min_f = f.values().iter().fold(f64::INFINITY, |m, &v| m.min(v));
        if !(min_f > -p) {
            return Err(Error::ChartRange(min_f, -p));
        }
        Ok(Self { p, f })
    }

    pub fn p(&self) -> f64 {
        self.p
    }
    pub fn f(&self) -> &RealFunction {
        &self.f
    }
}

/// Logarithmic chart image: u = log(phi').
#[derive(Debug, Clone)]
pub struct LogCoord {
    u: RealFunction,
}

impl LogCoord {
    pub fn new(u: RealFunction) -> Result<Self> {
        if u.decay() != Decay::VanishesAtBothEnds {
            return Err(Error::WrongDecay { expected: "VanishesAtBothEnds", got: "other" });
        }
        Ok(Self { u })
    }

    pub fn u(&self) -> &RealFunction {
        &self.u
    }
}

/// Asymptotically Lebesgue density g dx, stored through g - 1.
#[derive(Debug, Clone)]
pub struct Density {
    gm1: RealFunction,
}

impl Density {
    pub fn new(gm1: RealFunction) -> Result<Self> {
        if gm1.decay() != Decay::VanishesAtBothEnds {
            return Err(Error::WrongDecay { expected: "VanishesAtBothEnds", got: "other" });
        }
        let min_g = gm1.values().iter().fold(f64::INFINITY, |m, &v| m.min(1.0 + v));
        if !(min_g > 0.0) {
            return Err(Error::JacobianPositivity(min_g));
        }
        Ok(Self { gm1 })
    }

    pub fn lebesgue(grid: Grid) -> Self {
        Self { gm1: RealFunction::zeros(grid) }
    }

    pub fn grid(&self) -> Grid {
        self.gm1.grid()
    }

    /// g - 1.
    pub fn gm1(&self) -> &RealFunction {
        &self.gm1
    }

    /// g at the nodes.
    pub fn g_values(&self) -> Vec<f64> {
        self.gm1.values().iter().map(|&v| 1.0 + v).collect()
    }
}

/// Chart map Phi_p(phi) = p((phi')^{1/p} - 1); Phi_inf = log phi'.
///
/// ```
/// use berslab::diffeo::{phi_p, phi_p_inverse};
/// let phi = berslab::family::gauss_bump(0.4, 1.0, 1.5)?;
/// let back = phi_p_inverse(&phi_p(&phi, 2.0)?)?;
/// assert!(back.h().sub(phi.h())?.sup_norm() < 1e-10);
/// # Ok::<(), berslab::Error>(())
/// ```
pub fn phi_p(phi: &Diffeo, p: f64) -> Result<PRootCoord> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidExponent(p, "p in [1, infinity)"));
    }
    let f = phi
        .h()
        .map(Decay::VanishesAtBothEnds, |h| p * ((1.0 + h).powf(1.0 / p) - 1.0))?;
    PRootCoord::new(p, f)
}

/// Inverse chart: h = (1 + f/p)^p - 1, phi = x + int h.
pub fn phi_p_inverse(coord: &PRootCoord) -> Result<Diffeo> {
    let p = coord.p;
    let h = coord
        .f
        .map(Decay::VanishesAtBothEnds, |f| (1.0 + f / p).powf(p) - 1.0)?;
    Diffeo::from_jacobian_perturbation(h)
}

/// Logarithmic chart Phi_inf(phi) = log(phi').
pub fn phi_inf(phi: &Diffeo) -> Result<LogCoord> {
    let u = phi.h().map(Decay::VanishesAtBothEnds, |h| (1.0 + h).ln())?;
    LogCoord::new(u)
}

/// Inverse logarithmic chart: h = e^u - 1.
pub fn phi_inf_inverse(coord: &LogCoord) -> Result<Diffeo> {
    let h = coord.u.map(Decay::VanishesAtBothEnds, |u| u.exp_m1())?;
    Diffeo::from_jacobian_perturbation(h)
}

/// W^{k,1} seminorm of Phi_p(phi) - (u + u^2/(2p) + u^3/(6p^2)), u = log phi'.
/// The remainder decays like p^{-3}; callers run the scaling ratio test.
pub fn p_to_infty_expansion_residual(phi: &Diffeo, p: f64, k: usize) -> Result<f64> {
    if !(p >= 10.0) {
        return Err(Error::InvalidExponent(p, "p >= 10 for the asymptotic regime"));
    }
    let chart = phi_p(phi, p)?;
    let u = phi_inf(phi)?;
    let truncated = u.u().map(Decay::VanishesAtBothEnds, |u| {
        u + u * u / (2.0 * p) + u * u * u / (6.0 * p * p)
    })?;
    chart.f().sub(&truncated)?.wk1_seminorm(k)
}

/// Cocycle residual for Theta_p(phi) = (phi')^{1/p}:
/// sup |Theta_p(phi o psi) - (Theta_p(phi) o psi) Theta_p(psi)|.
/// For p = infinity, the additive residual in Phi_inf.
pub fn theta_p_cocycle_residual(phi: &Diffeo, psi: &Diffeo, p: f64) -> Result<f64> {
    let composed = phi.compose(psi)?;
    let g = phi.grid();
    // (phi')^{1/p} pulled back through psi, interpolating the decaying h-field.
    let h_phi_at_psi: Vec<f64> = psi
        .phi_values()
        .iter()
        .map(|&y| {
            if y < g.x_min() || y > g.x_max() {
                0.0
            } else {
                interp::cubic(g.x_min(), g.h(), phi.h().values(), y)
            }
        })
        .collect();
    let mut worst = 0.0f64;
    if p.is_finite() {
        if !(p >= 1.0) {
            return Err(Error::InvalidExponent(p, "p in [1, infinity) or infinity"));
        }
        for i in 0..g.n() {
            let lhs = (1.0 + composed.h().values()[i]).powf(1.0 / p);
            let rhs = (1.0 + h_phi_at_psi[i]).powf(1.0 / p)
                * (1.0 + psi.h().values()[i]).powf(1.0 / p);
            worst = worst.max((lhs - rhs).abs());
        }
    } else {
        for i in 0..g.n() {
            let lhs = (1.0 + composed.h().values()[i]).ln();
            let rhs = (1.0 + h_phi_at_psi[i]).ln() + (1.0 + psi.h().values()[i]).ln();
            worst = worst.max((lhs - rhs).abs());
        }
    }
    Ok(worst)
}

/// Jacobian correspondence J(phi) = phi' dx; exact at the data level.
pub fn jacobian(phi: &Diffeo) -> Density {
    Density { gm1: phi.h().clone() }
}

/// Inverse Jacobian map: phi with phi' = g.
pub fn jacobian_inverse(mu: &Density) -> Result<Diffeo> {
    Diffeo::from_jacobian_perturbation(mu.gm1.clone())
}

/// Statistical p-root map Psi_p(g dx) = p(g^{1/p} - 1); Psi_inf = log g.
/// Satisfies Psi_p o J = Phi_p by construction.
pub fn psi_p_density(mu: &Density, p: f64) -> Result<RealFunction> {
    if p.is_infinite() && p > 0.0 {
        return mu.gm1.map(Decay::VanishesAtBothEnds, |v| (1.0 + v).ln());
    }
    if !(p >= 1.0) {
        return Err(Error::InvalidExponent(p, "p in [1, infinity] "));
    }
    mu.gm1
        .map(Decay::VanishesAtBothEnds, |v| p * ((1.0 + v).powf(1.0 / p) - 1.0))
}
