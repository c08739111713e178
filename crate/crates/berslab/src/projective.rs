//! Schwarzian and L^p-Schwarzian operators, the Sturm-Liouville pairing,
//! Liouville conjugation, and the density-side score / Fisher identities.
//!
//! The canonical evaluation path for the Schwarzian is the potential form
//! S = u'' - (1/2)(u')^2 with u = log phi'; the classical ratio form
//! phi'''/phi' - (3/2)(phi''/phi')^2 divides by phi' and amplifies boundary
//! noise, so it exists only as a cross-check.

use crate::diffeo::{Density, Diffeo};
use crate::error::{Error, Result};
use crate::numerics::{Decay, RealFunction};

/// Boundary tolerance for derived curvature fields. Composed inputs carry
/// differentiation noise in the one-sided boundary layers, so the decay tag
/// on S-type fields is bookkeeping (their invariant is finiteness).
const DERIVED_FIELD_TOL: f64 = 1e-4;

/// Projective curvature field S(phi) (or S(mu)) on the window.
#[derive(Debug, Clone)]
pub struct SchwarzianField {
    s_field: RealFunction,
}

impl SchwarzianField {
    pub fn field(&self) -> &RealFunction {
        &self.s_field
    }
    pub fn into_field(self) -> RealFunction {
        self.s_field
    }
}

/// Score s = (log g)', mu-weighted Fisher information I = int s^2 g dx, and
/// the flat variant I_flat = int s^2 dx used by the trace identities.
#[derive(Debug, Clone)]
pub struct ScoreData {
    s: RealFunction,
    i: f64,
    i_flat: f64,
}

impl ScoreData {
    pub fn s(&self) -> &RealFunction {
        &self.s
    }
    pub fn fisher_information(&self) -> f64 {
        self.i
    }
    pub fn fisher_information_flat(&self) -> f64 {
        self.i_flat
    }
}

/// S(phi) = u'' - (1/2)(u')^2 with u = log phi' (potential form).
pub fn schwarzian(phi: &Diffeo) -> Result<SchwarzianField> {
    let u = phi
        .h()
        .map_with_tol(Decay::VanishesAtBothEnds, DERIVED_FIELD_TOL, |h| (1.0 + h).ln())?;
    let u1 = u.derivative(1)?;
    let u2 = u.derivative(2)?;
    let s = u2.zip_with_tol(&u1, Decay::VanishesAtBothEnds, DERIVED_FIELD_TOL, |a, b| {
        a - 0.5 * b * b
    })?;
    Ok(SchwarzianField { s_field: s })
}

/// Ratio form phi'''/phi' - (3/2)(phi''/phi')^2; cross-check only.
pub fn schwarzian_ratio_form(phi: &Diffeo) -> Result<RealFunction> {
    let d1 = phi.h().derivative(1)?;
    let d2 = phi.h().derivative(2)?;
    let g = phi.grid();
    let vals: Vec<f64> = (0..g.n())
        .map(|i| {
            let jac = 1.0 + phi.h().values()[i];
            d2.values()[i] / jac - 1.5 * (d1.values()[i] / jac).powi(2)
        })
        .collect();
    RealFunction::unrestricted(g, vals)
}

/// Sup residual of S(phi o psi) = (S(phi) o psi) (psi')^2 + S(psi).
pub fn schwarzian_cocycle_residual(phi: &Diffeo, psi: &Diffeo) -> Result<f64> {
    let lhs = schwarzian(&phi.compose(psi)?)?;
    let s_phi = schwarzian(phi)?;
    let s_psi = schwarzian(psi)?;
    let g = phi.grid();
    let mut worst = 0.0f64;
    for i in 0..g.n() {
        let jac = 1.0 + psi.h().values()[i];
        let pulled = s_phi.s_field.eval(psi.phi_values()[i]);
        let rhs = pulled * jac * jac + s_psi.s_field.values()[i];
        worst = worst.max((lhs.s_field.values()[i] - rhs).abs());
    }
    Ok(worst)
}

/// L^p-Schwarzian in p-root coordinates:
/// S_p = p theta'' - (p(p-1)/2) (theta')^2 / theta with theta = (phi')^{1/p}.
pub fn lp_schwarzian(phi: &Diffeo, p: f64) -> Result<SchwarzianField> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidExponent(p, "p in [1, infinity)"));
    }
    let theta = phi.h().map(Decay::Unrestricted, |h| (1.0 + h).powf(1.0 / p))?;
    let t1 = theta.derivative(1)?;
    let t2 = theta.derivative(2)?;
    let g = phi.grid();
    let vals: Vec<f64> = (0..g.n())
        .map(|i| {
            p * t2.values()[i]
                - 0.5 * p * (p - 1.0) * t1.values()[i].powi(2) / theta.values()[i]
        })
        .collect();
    let s_field =
        RealFunction::with_boundary_tol(g, vals, Decay::VanishesAtBothEnds, DERIVED_FIELD_TOL)?;
    Ok(SchwarzianField { s_field })
}

/// Defining formula ((3/2p)(phi''/phi')^2 + S(phi)) (phi')^{1/p}; cross-check.
pub fn lp_schwarzian_definition_form(phi: &Diffeo, p: f64) -> Result<RealFunction> {
    let s = schwarzian(phi)?;
    let d1 = phi.h().derivative(1)?;
    let g = phi.grid();
    let vals: Vec<f64> = (0..g.n())
        .map(|i| {
            let jac = 1.0 + phi.h().values()[i];
            let ratio = d1.values()[i] / jac;
            (1.5 / p * ratio * ratio + s.s_field.values()[i]) * jac.powf(1.0 / p)
        })
        .collect();
    RealFunction::unrestricted(g, vals)
}

/// Composition law of the L^p-Schwarzian. `identity_residual` is the sup
/// residual of the full three-term law (vanishes); `cross_term_magnitude` is
/// the sup of the extra term alone, the obstruction that keeps S_p from
/// being a two-term cocycle at finite p.
#[derive(Debug, Clone, Copy)]
pub struct LpCompositionCheck {
    pub identity_residual: f64,
    pub cross_term_magnitude: f64,
}

pub fn lp_schwarzian_composition_residual(
    phi: &Diffeo,
    psi: &Diffeo,
    p: f64,
) -> Result<LpCompositionCheck> {
    let composed = phi.compose(psi)?;
    let lhs = lp_schwarzian(&composed, p)?;
    let sp_phi = lp_schwarzian(phi, p)?;
    let sp_psi = lp_schwarzian(psi, p)?;
    // phi''/phi' = (log phi')'
    let u_phi = phi.h().map(Decay::VanishesAtBothEnds, |h| (1.0 + h).ln())?;
    let log_deriv_phi = u_phi.derivative(1)?;
    let psi_dd = psi.h().derivative(1)?;
    let g = phi.grid();
    let mut identity_residual = 0.0f64;
    let mut cross_term_magnitude = 0.0f64;
    for i in 0..g.n() {
        let y = psi.phi_values()[i];
        let psi_jac = 1.0 + psi.h().values()[i];
        let phi_jac_at_psi = 1.0 + phi.h().eval(y);
        let composed_jac = phi_jac_at_psi * psi_jac;
        let term1 = sp_phi.s_field.eval(y) * psi_jac.powf(2.0 + 1.0 / p);
        let term2 = sp_psi.s_field.values()[i] * phi_jac_at_psi.powf(1.0 / p);
        let cross = 3.0 / p
            * log_deriv_phi.eval(y)
            * psi_dd.values()[i]
            * composed_jac.powf(1.0 / p);
        identity_residual =
            identity_residual.max((lhs.s_field.values()[i] - term1 - term2 - cross).abs());
        cross_term_magnitude = cross_term_magnitude.max(cross.abs());
    }
    Ok(LpCompositionCheck { identity_residual, cross_term_magnitude })
}

/// W^{k,1} seminorm of S_p - S - (uS + (3/2)(u')^2)/p - (u^2 S/2 + 3u(u')^2/2)/p^2.
/// The remainder decays like p^{-3}.
///
/// S_p is assembled here from the same u', u'' samples as S (through the
/// defining formula S_p = (S + (3/2p)(u')^2) e^{u/p}), so the differentiation
/// error cancels inside the remainder instead of flooring it at large p.
pub fn sp_asymptotic_residual(phi: &Diffeo, p: f64, k: usize) -> Result<f64> {
    if !(p >= 10.0) {
        return Err(Error::InvalidExponent(p, "p >= 10 for the asymptotic regime"));
    }
    let u = phi
        .h()
        .map_with_tol(Decay::VanishesAtBothEnds, DERIVED_FIELD_TOL, |h| (1.0 + h).ln())?;
    let u1 = u.derivative(1)?;
    let u2 = u.derivative(2)?;
    let g = phi.grid();
    let vals: Vec<f64> = (0..g.n())
        .map(|i| {
            let (uu, du, ddu) = (u.values()[i], u1.values()[i], u2.values()[i]);
            let ss = ddu - 0.5 * du * du;
            let sp = (ss + 1.5 / p * du * du) * (uu / p).exp();
            let c1 = uu * ss + 1.5 * du * du;
            let c2 = 0.5 * uu * uu * ss + 1.5 * uu * du * du;
            sp - ss - c1 / p - c2 / (p * p)
        })
        .collect();
    RealFunction::with_boundary_tol(g, vals, Decay::VanishesAtBothEnds, DERIVED_FIELD_TOL)?
        .wk1_seminorm(k)
}

/// Normalized Sturm-Liouville pair y2 = (phi')^{-1/2}, y1 = phi (phi')^{-1/2}
/// solving y'' + (1/2) S y = 0 with Wronskian y1' y2 - y1 y2' = 1.
#[derive(Debug, Clone)]
pub struct SturmLiouvillePair {
    pub y1: RealFunction,
    pub y2: RealFunction,
    /// sup |y2'' + (1/2) S y2|
    pub ode_residual: f64,
    /// sup |W(y1, y2) - 1|
    pub wronskian_deviation: f64,
}

pub fn sturm_liouville_pair(phi: &Diffeo) -> Result<SturmLiouvillePair> {
    let g = phi.grid();
    let s = schwarzian(phi)?;
    let y2 = phi.h().map(Decay::TendsToOneAtBothEnds, |h| (1.0 + h).powf(-0.5))?;
    let y1_vals: Vec<f64> =
        phi.phi_values().iter().zip(y2.values()).map(|(&p, &y)| p * y).collect();
    let y1 = RealFunction::unrestricted(g, y1_vals)?;
    let y2_dd = y2.derivative(2)?;
    let mut ode_residual = 0.0f64;
    for i in 0..g.n() {
        ode_residual = ode_residual
            .max((y2_dd.values()[i] + 0.5 * s.s_field.values()[i] * y2.values()[i]).abs());
    }
    let y1_d = y1.derivative(1)?;
    let y2_d = y2.derivative(1)?;
    let mut wronskian_deviation = 0.0f64;
    for i in 0..g.n() {
        let w = y1_d.values()[i] * y2.values()[i] - y1.values()[i] * y2_d.values()[i];
        wronskian_deviation = wronskian_deviation.max((w - 1.0).abs());
    }
    Ok(SturmLiouvillePair { y1, y2, ode_residual, wronskian_deviation })
}

/// Liouville transport (L_phi f)(x) = (phi'(x))^{-1/2} f(phi(x)).
fn liouville_transport(phi: &Diffeo, f: &RealFunction) -> Result<RealFunction> {
    let g = phi.grid();
    let vals: Vec<f64> = (0..g.n())
        .map(|i| (1.0 + phi.h().values()[i]).powf(-0.5) * f.eval(phi.phi_values()[i]))
        .collect();
    RealFunction::unrestricted(g, vals)
}

/// L_q f = f'' + q f.
fn apply_sl_operator(q: &RealFunction, f: &RealFunction) -> Result<RealFunction> {
    let fdd = f.derivative(2)?;
    let g = f.grid();
    let vals: Vec<f64> =
        (0..g.n()).map(|i| fdd.values()[i] + q.values()[i] * f.values()[i]).collect();
    RealFunction::unrestricted(g, vals)
}

/// (q o phi) phi'^2 + (1/2) S(phi): the potential produced by Liouville
/// transport of d^2 + q.
fn transported_potential(phi: &Diffeo, q: &RealFunction) -> Result<RealFunction> {
    let s = schwarzian(phi)?;
    let g = phi.grid();
    let vals: Vec<f64> = (0..g.n())
        .map(|i| {
            let jac = 1.0 + phi.h().values()[i];
            q.eval(phi.phi_values()[i]) * jac * jac + 0.5 * s.s_field.values()[i]
        })
        .collect();
    RealFunction::unrestricted(g, vals)
}

fn check_interior_support(f: &RealFunction, margin: f64) -> Result<()> {
    let g = f.grid();
    for i in 0..g.n() {
        let x = g.x(i);
        if (x < g.x_min() + margin || x > g.x_max() - margin) && f.values()[i].abs() > 1e-12 {
            return Err(Error::SupportViolation);
        }
    }
    Ok(())
}

/// Conjugation residual of Liouville transport:
/// sup over the interior of |L_phi (d^2 + q) L_phi^{-1} f - (phi')^{-2} (d^2 + A_phi q) f|.
///
/// The (phi')^{-2} factor comes from the proven intertwining law
/// L_{A_phi q} L_phi = (phi')^2 L_phi L_q (check the affine case q = 0,
/// phi = 2x: both sides halve frequencies twice).
pub fn liouville_conjugation_residual(
    phi: &Diffeo,
    q: &RealFunction,
    testfn: &RealFunction,
) -> Result<f64> {
    check_interior_support(testfn, 1.0)?;
    let g = phi.grid();
    let inv = phi.invert()?;
    let pulled_back = liouville_transport(&inv, testfn)?;
    let lhs = liouville_transport(phi, &apply_sl_operator(q, &pulled_back)?)?;
    let transported = transported_potential(phi, q)?;
    let rhs_raw = apply_sl_operator(&transported, testfn)?;
    let margin = 1.0 + phi.h().lp_norm(1.0)?;
    let mut worst = 0.0f64;
    for i in 0..g.n() {
        let x = g.x(i);
        if x < g.x_min() + margin || x > g.x_max() - margin {
            continue;
        }
        let jac = 1.0 + phi.h().values()[i];
        worst = worst.max((lhs.values()[i] - rhs_raw.values()[i] / (jac * jac)).abs());
    }
    Ok(worst)
}

/// Same identity, alternate bracketing (no inversion):
/// sup over the interior of |(d^2 + A_phi q)(L_phi f) - (phi')^2 L_phi((d^2 + q) f)|.
pub fn liouville_intertwining_residual(
    phi: &Diffeo,
    q: &RealFunction,
    testfn: &RealFunction,
) -> Result<f64> {
    check_interior_support(testfn, 1.0)?;
    let g = phi.grid();
    let transported = transported_potential(phi, q)?;
    let lhs = apply_sl_operator(&transported, &liouville_transport(phi, testfn)?)?;
    let rhs = liouville_transport(phi, &apply_sl_operator(q, testfn)?)?;
    let margin = 1.0 + phi.h().lp_norm(1.0)?;
    let mut worst = 0.0f64;
    for i in 0..g.n() {
        let x = g.x(i);
        if x < g.x_min() + margin || x > g.x_max() - margin {
            continue;
        }
        let jac = 1.0 + phi.h().values()[i];
        worst = worst.max((lhs.values()[i] - jac * jac * rhs.values()[i]).abs());
    }
    Ok(worst)
}

/// Score and Fisher information of an asymptotically Lebesgue density.
pub fn score(mu: &Density) -> Result<ScoreData> {
    let log_g = mu.gm1().map(Decay::VanishesAtBothEnds, |v| (1.0 + v).ln())?;
    let s = log_g.derivative(1)?;
    let g = mu.grid();
    let weighted: Vec<f64> = (0..g.n())
        .map(|i| s.values()[i].powi(2) * (1.0 + mu.gm1().values()[i]))
        .collect();
    let i = crate::numerics::quad::simpson(&weighted, g.h());
    let flat: Vec<f64> = s.values().iter().map(|v| v * v).collect();
    let i_flat = crate::numerics::quad::simpson(&flat, g.h());
    Ok(ScoreData { s, i, i_flat })
}

/// Score curvature S(mu) = s' - (1/2) s^2, with s' taken as the direct
/// second derivative of log g so the field coincides sample-for-sample with
/// the group-side Schwarzian under the Jacobian correspondence.
pub fn score_curvature(mu: &Density) -> Result<SchwarzianField> {
    let log_g = mu
        .gm1()
        .map_with_tol(Decay::VanishesAtBothEnds, DERIVED_FIELD_TOL, |v| (1.0 + v).ln())?;
    let s = log_g.derivative(1)?;
    let s_prime = log_g.derivative(2)?;
    let s_field = s_prime.zip_with_tol(&s, Decay::VanishesAtBothEnds, DERIVED_FIELD_TOL, |a, b| {
        a - 0.5 * b * b
    })?;
    Ok(SchwarzianField { s_field })
}

/// |int S(mu) g dx + (3/2) I(mu)|.
pub fn mean_schwarzian_residual(mu: &Density) -> Result<f64> {
    let curv = score_curvature(mu)?;
    let data = score(mu)?;
    let g = mu.grid();
    let weighted: Vec<f64> = (0..g.n())
        .map(|i| curv.s_field.values()[i] * (1.0 + mu.gm1().values()[i]))
        .collect();
    let mean = crate::numerics::quad::simpson(&weighted, g.h());
    Ok((mean + 1.5 * data.i).abs())
}

/// Variance lower bound from the first two score composites of a location
/// family, for a window-normalized probability density.
#[derive(Debug, Clone, Copy)]
pub struct BhattacharyyaCheck {
    /// ||v2||^2 / (||u1||^2 ||v2||^2 - <u1, v2>^2), inner products in L^2(mu).
    pub bound: f64,
    /// sup |v2 - S(mu) - (3/2) s^2| (pure algebra, machine-level).
    pub decomposition_residual: f64,
    /// <u1, v2>_mu (vanishes for symmetric densities).
    pub cross_moment: f64,
}

/// `density` must be positive and integrate to 1 over the window.
pub fn bhattacharyya_bound(density: &RealFunction) -> Result<BhattacharyyaCheck> {
    let g = density.grid();
    let total = density.integral();
    if (total - 1.0).abs() > 1e-6 {
        return Err(Error::NotNormalized(total));
    }
    for (idx, &v) in density.values().iter().enumerate() {
        if v <= 0.0 {
            return Err(Error::NonFinite { idx, value: v });
        }
    }
    let log_g = density.map(Decay::Unrestricted, |v| v.ln())?;
    let s = log_g.derivative(1)?;
    let s1 = s.derivative(1)?;
    let n = g.n();
    let u1: Vec<f64> = s.values().iter().map(|&v| -v).collect();
    let v2: Vec<f64> = (0..n).map(|i| s1.values()[i] + s.values()[i].powi(2)).collect();
    let weight = density.values();
    let wdot = |a: &[f64], b: &[f64]| {
        let prod: Vec<f64> = (0..n).map(|i| a[i] * b[i] * weight[i]).collect();
        crate::numerics::quad::simpson(&prod, g.h())
    };
    let uu = wdot(&u1, &u1);
    let vv = wdot(&v2, &v2);
    let uv = wdot(&u1, &v2);
    let det = uu * vv - uv * uv;
    if det <= 1e-12 * uu * vv {
        return Err(Error::DegenerateGram);
    }
    // v2 = S(mu) + (3/2) s^2 after cancelling s'.
    let mut decomposition_residual = 0.0f64;
    for i in 0..n {
        let s_mu = s1.values()[i] - 0.5 * s.values()[i].powi(2);
        decomposition_residual =
            decomposition_residual.max((v2[i] - s_mu - 1.5 * s.values()[i].powi(2)).abs());
    }
    Ok(BhattacharyyaCheck { bound: vv / det, decomposition_residual, cross_moment: uv })
}

/// Right action on projective connections: q * psi = (q o psi)(psi')^2 + S(psi).
pub fn projective_action(q: &RealFunction, psi: &Diffeo) -> Result<RealFunction> {
    let s = schwarzian(psi)?;
    let g = psi.grid();
    let vals: Vec<f64> = (0..g.n())
        .map(|i| {
            let jac = 1.0 + psi.h().values()[i];
            q.eval(psi.phi_values()[i]) * jac * jac + s.s_field.values()[i]
        })
        .collect();
    RealFunction::unrestricted(g, vals)
}

/// Sup residual of the right-action law (q * psi1) * psi2 = q * (psi1 o psi2).
pub fn projective_action_residual(q: &RealFunction, psi1: &Diffeo, psi2: &Diffeo) -> Result<f64> {
    let step = projective_action(&projective_action(q, psi1)?, psi2)?;
    let joint = projective_action(q, &psi1.compose(psi2)?)?;
    Ok(step.sub(&joint)?.sup_norm())
}

/// sup |S(phi_t) - t u'''| for the one-step flow phi_t(x) = x + t u(x).
/// The residual is O(t^2); callers run the Richardson ratio test.
pub fn infinitesimal_schwarzian_residual(u: &RealFunction, t: f64) -> Result<f64> {
    if t < 1e-6 {
        return Err(Error::InvalidExponent(t, "t >= 1e-6 (cancellation floor)"));
    }
    let u1 = u.derivative(1)?;
    if t * u1.sup_norm() >= 1.0 {
        return Err(Error::JacobianPositivity(1.0 - t * u1.sup_norm()));
    }
    let h = u1.map(Decay::VanishesAtBothEnds, |v| t * v)?;
    let phi_t = Diffeo::from_jacobian_perturbation(h)?;
    let s = schwarzian(&phi_t)?;
    let u3 = u.derivative(3)?;
    let mut worst = 0.0f64;
    for i in 0..u.grid().n() {
        worst = worst.max((s.s_field.values()[i] - t * u3.values()[i]).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffeo::jacobian;
    use crate::family;
    use crate::numerics::Grid;

    fn grid() -> Grid {
        Grid::default_window()
    }

    fn pair() -> (Diffeo, Diffeo) {
        (family::gauss_bump(0.5, 0.0, 1.0).unwrap(), family::gauss_bump(-0.4, 1.0, 1.5).unwrap())
    }

    fn bump(grid: Grid, amp: f64, center: f64, width: f64) -> RealFunction {
        RealFunction::from_fn(grid, Decay::VanishesAtBothEnds, |x| {
            let t = (x - center) / width;
            amp * (-t * t).exp()
        })
        .unwrap()
    }

    #[test]
    fn schwarzian_of_identity_vanishes() {
        let id = Diffeo::identity(grid());
        assert_eq!(schwarzian(&id).unwrap().field().sup_norm(), 0.0);
    }

    #[test]
    fn schwarzian_matches_symbolic_oracle() {
        // u = a e^{-x^2}: S = u'' - (1/2)(u')^2 with u' = -2ax e^{-x^2},
        // u'' = (4x^2 - 2) a e^{-x^2}.
        let a = 0.5;
        let phi = family::gauss_bump(a, 0.0, 1.0).unwrap();
        let s = schwarzian(&phi).unwrap();
        let mut worst = 0.0f64;
        for (i, x) in grid().xs().enumerate() {
            let e = (-x * x).exp();
            let du = -2.0 * a * x * e;
            let ddu = (4.0 * x * x - 2.0) * a * e;
            worst = worst.max((s.field().values()[i] - (ddu - 0.5 * du * du)).abs());
        }
        assert!(worst < 1e-7, "symbolic oracle error {worst:e}");
    }

    #[test]
    fn ratio_and_potential_forms_agree() {
        for phi in family::corpus().unwrap() {
            let a = schwarzian(&phi).unwrap();
            let b = schwarzian_ratio_form(&phi).unwrap();
            let gap = a.field().sub(&b).unwrap().sup_norm();
            assert!(gap < 1e-6, "two-formula gap {gap:e}");
        }
    }

    #[test]
    fn mean_curvature_is_strictly_negative_on_corpus() {
        for phi in family::corpus().unwrap() {
            let mu = jacobian(&phi);
            let curv = score_curvature(&mu).unwrap();
            let g = mu.grid();
            let weighted: Vec<f64> = (0..g.n())
                .map(|i| curv.field().values()[i] * (1.0 + mu.gm1().values()[i]))
                .collect();
            let mean = crate::numerics::quad::simpson(&weighted, g.h());
            assert!(mean < -1e-4, "mean projective curvature {mean} not strictly negative");
        }
    }

    #[test]
    fn schwarzian_kernel_rigidity_on_corpus() {
        // Only the identity has vanishing Schwarzian within the decay class.
        let id = Diffeo::identity(grid());
        assert!(schwarzian(&id).unwrap().field().sup_norm() < 1e-9);
        for phi in family::corpus().unwrap() {
            assert!(schwarzian(&phi).unwrap().field().sup_norm() > 1e-3);
        }
    }

    #[test]
    fn cocycle_residual_small() {
        let (phi, psi) = pair();
        let id = Diffeo::identity(grid());
        assert!(schwarzian_cocycle_residual(&phi, &id).unwrap() < 1e-7);
        let r = schwarzian_cocycle_residual(&phi, &psi).unwrap();
        assert!(r < 1e-5, "cocycle residual {r:e}");
    }

    #[test]
    fn inverse_cocycle_recovers_identity() {
        // 0 = (S(psi^{-1}) o psi)(psi')^2 + S(psi)
        let (_, psi) = pair();
        let inv = psi.invert().unwrap();
        let s_inv = schwarzian(&inv).unwrap();
        let s_psi = schwarzian(&psi).unwrap();
        let g = grid();
        let mut worst = 0.0f64;
        for i in 0..g.n() {
            let jac = 1.0 + psi.h().values()[i];
            let val = s_inv.field().eval(psi.phi_values()[i]) * jac * jac
                + s_psi.field().values()[i];
            worst = worst.max(val.abs());
        }
        assert!(worst < 1e-5, "inverse cocycle residual {worst:e}");
    }

    #[test]
    fn lp_schwarzian_forms_agree_and_vanish_on_identity() {
        let id = Diffeo::identity(grid());
        assert!(lp_schwarzian(&id, 2.0).unwrap().field().sup_norm() < 1e-15);
        let (phi, _) = pair();
        for p in [1.0, 2.0, 5.0] {
            let a = lp_schwarzian(&phi, p).unwrap();
            let b = lp_schwarzian_definition_form(&phi, p).unwrap();
            let gap = a.field().sub(&b).unwrap().sup_norm();
            assert!(gap < 1e-6, "p = {p}: two-formula gap {gap:e}");
        }
    }

    #[test]
    fn lp_schwarzian_converges_to_schwarzian() {
        let (phi, _) = pair();
        let s = schwarzian(&phi).unwrap();
        let sp = lp_schwarzian(&phi, 1e4).unwrap();
        let gap = sp.field().sub(s.field()).unwrap().sup_norm();
        assert!(gap < 1e-3, "p = 1e4 gap {gap:e}");
    }

    #[test]
    fn lp_composition_identity_and_cross_term() {
        let (phi, psi) = pair();
        let id = Diffeo::identity(grid());
        let trivial = lp_schwarzian_composition_residual(&phi, &id, 2.0).unwrap();
        assert!(trivial.identity_residual < 1e-6);
        assert!(trivial.cross_term_magnitude < 1e-9);

        let check = lp_schwarzian_composition_residual(&phi, &psi, 2.0).unwrap();
        assert!(check.identity_residual < 1e-5, "identity residual {:e}", check.identity_residual);
        assert!(check.cross_term_magnitude > 1e-3, "cross term {:e}", check.cross_term_magnitude);

        // Cross term decays like 1/p.
        let c1 = lp_schwarzian_composition_residual(&phi, &psi, 4.0).unwrap();
        let c2 = lp_schwarzian_composition_residual(&phi, &psi, 8.0).unwrap();
        let ratio = c1.cross_term_magnitude / c2.cross_term_magnitude;
        assert!((1.8..=2.2).contains(&ratio), "cross-term scaling {ratio}");
    }

    #[test]
    fn sp_remainder_scales_like_p_cubed() {
        let (phi, _) = pair();
        for k in [0usize, 1] {
            for p in [50.0, 100.0] {
                let r1 = sp_asymptotic_residual(&phi, p, k).unwrap();
                let r2 = sp_asymptotic_residual(&phi, 2.0 * p, k).unwrap();
                let ratio = r2 / r1;
                assert!(
                    (0.125 * 0.75..=0.125 * 1.25).contains(&ratio),
                    "k = {k}, p = {p}: ratio {ratio}"
                );
            }
        }
        let id = Diffeo::identity(grid());
        assert_eq!(sp_asymptotic_residual(&id, 100.0, 0).unwrap(), 0.0);
    }

    #[test]
    fn sturm_liouville_pair_identity_case() {
        let id = Diffeo::identity(grid());
        let pair = sturm_liouville_pair(&id).unwrap();
        // y1 = x, y2 = 1, W = 1
        assert!(pair.ode_residual < 1e-12);
        assert!(pair.wronskian_deviation < 1e-10);
        let mid = grid().n() / 2;
        assert!((pair.y2.values()[mid] - 1.0).abs() < 1e-14);
        assert!((pair.y1.values()[mid] - grid().x(mid)).abs() < 1e-12);
    }

    #[test]
    fn sturm_liouville_pair_gaussian() {
        let (phi, _) = pair();
        let slp = sturm_liouville_pair(&phi).unwrap();
        assert!(slp.ode_residual < 1e-6, "ode residual {:e}", slp.ode_residual);
        assert!(slp.wronskian_deviation < 1e-6, "wronskian {:e}", slp.wronskian_deviation);
    }

    #[test]
    fn liouville_conjugation_identity_diffeo() {
        // Identity transport still runs the interpolation/differentiation
        // machinery, so "zero" means its noise floor.
        let id = Diffeo::identity(grid());
        let q = bump(grid(), 0.3, 0.0, 2.0);
        let f = bump(grid(), 1.0, 1.0, 1.5);
        assert!(liouville_conjugation_residual(&id, &q, &f).unwrap() < 1e-5);
    }

    #[test]
    fn liouville_conjugation_free_operator() {
        let (phi, _) = pair();
        let q = RealFunction::zeros(grid());
        let f = bump(grid(), 1.0, 0.5, 2.0);
        let r = liouville_conjugation_residual(&phi, &q, &f).unwrap();
        assert!(r < 1e-4, "conjugation residual {r:e}");
        let r2 = liouville_intertwining_residual(&phi, &q, &f).unwrap();
        assert!(r2 < 1e-4, "intertwining residual {r2:e}");
    }

    #[test]
    fn liouville_rejects_boundary_support() {
        let (phi, _) = pair();
        let q = RealFunction::zeros(grid());
        let f = RealFunction::from_fn(grid(), Decay::Unrestricted, |_| 1.0).unwrap();
        assert!(matches!(
            liouville_conjugation_residual(&phi, &q, &f),
            Err(Error::SupportViolation)
        ));
    }

    #[test]
    fn score_of_lebesgue_vanishes() {
        let mu = Density::lebesgue(grid());
        let data = score(&mu).unwrap();
        assert_eq!(data.s().sup_norm(), 0.0);
        assert_eq!(data.fisher_information(), 0.0);
        assert!(score_curvature(&mu).unwrap().field().sup_norm() == 0.0);
        assert!(mean_schwarzian_residual(&mu).unwrap() < 1e-15);
    }

    #[test]
    fn density_schwarzian_matches_group_schwarzian() {
        let (phi, _) = pair();
        let mu = jacobian(&phi);
        let a = score_curvature(&mu).unwrap();
        let b = schwarzian(&phi).unwrap();
        assert_eq!(a.field().values(), b.field().values());
    }

    #[test]
    fn fisher_information_two_routes() {
        // I = 4 int ((sqrt g)')^2 dx
        let gm1 = bump(grid(), 0.5, 0.0, 1.0);
        let mu = Density::new(gm1).unwrap();
        let data = score(&mu).unwrap();
        let root = mu.gm1().map(Decay::Unrestricted, |v| (1.0 + v).sqrt()).unwrap();
        let root_d = root.derivative(1).unwrap();
        let sq: Vec<f64> = root_d.values().iter().map(|v| v * v).collect();
        let other = 4.0 * crate::numerics::quad::simpson(&sq, grid().h());
        assert!((data.fisher_information() - other).abs() < 1e-8);
    }

    #[test]
    fn mean_schwarzian_is_negative_three_halves_fisher() {
        let gm1 = bump(grid(), 0.5, 0.0, 1.0);
        let mu = Density::new(gm1).unwrap();
        let r = mean_schwarzian_residual(&mu).unwrap();
        assert!(r < 1e-8, "mean curvature residual {r:e}");
        // Cauchy-Schwarz corollary: ||S||_{L^2(mu)} >= 1.5 I, strictly here.
        let curv = score_curvature(&mu).unwrap();
        let data = score(&mu).unwrap();
        let g = grid();
        let weighted: Vec<f64> = (0..g.n())
            .map(|i| curv.field().values()[i].powi(2) * (1.0 + mu.gm1().values()[i]))
            .collect();
        let l2 = crate::numerics::quad::simpson(&weighted, g.h()).sqrt();
        assert!(l2 > 1.5 * data.fisher_information() + 1e-6);
    }

    #[test]
    fn bhattacharyya_bound_for_truncated_normal() {
        let g = Grid::new(-10.0, 10.0, 2001).unwrap();
        let norm = RealFunction::from_fn(g, Decay::Unrestricted, |x| {
            (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
        })
        .unwrap();
        let check = bhattacharyya_bound(&norm).unwrap();
        assert!((check.bound - 1.0).abs() < 1e-4, "bound {}", check.bound);
        assert!(check.decomposition_residual < 1e-12);
        assert!(check.cross_moment.abs() < 1e-10, "odd moment {:e}", check.cross_moment);
    }

    #[test]
    fn bhattacharyya_rejects_unnormalized_input() {
        let g = Grid::new(-10.0, 10.0, 2001).unwrap();
        let two = RealFunction::from_fn(g, Decay::Unrestricted, |x| {
            (-0.5 * x * x).exp()
        })
        .unwrap();
        assert!(matches!(bhattacharyya_bound(&two), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn projective_action_laws() {
        let (phi, psi) = pair();
        let id = Diffeo::identity(grid());
        let q = bump(grid(), 0.4, -1.0, 2.0);
        // Identity leaves q unchanged.
        let unchanged = projective_action(&q, &id).unwrap();
        assert!(unchanged.sub(&q).unwrap().sup_norm() < 1e-12);
        // Zero maps to the Schwarzian.
        let zero = RealFunction::zeros(grid());
        let s_psi = schwarzian(&psi).unwrap();
        let acted = projective_action(&zero, &psi).unwrap();
        assert!(acted.sub(s_psi.field()).unwrap().sup_norm() < 1e-13);
        // Right-action law on the pair.
        let r = projective_action_residual(&q, &phi, &psi).unwrap();
        assert!(r < 1e-5, "action residual {r:e}");
    }

    #[test]
    fn infinitesimal_schwarzian_second_order() {
        let u = bump(grid(), 0.8, 0.0, 1.5);
        let zero = RealFunction::zeros(grid());
        assert!(infinitesimal_schwarzian_residual(&zero, 1e-3).unwrap() < 1e-14);
        let r1 = infinitesimal_schwarzian_residual(&u, 1e-3).unwrap();
        let r2 = infinitesimal_schwarzian_residual(&u, 5e-4).unwrap();
        let ratio = r1 / r2;
        assert!((3.5..=4.5).contains(&ratio), "second-order ratio {ratio}");
        // The normalized constant C = residual / t^2 is stable under halving.
        let c1 = r1 / 1e-6;
        let c2 = r2 / 2.5e-7;
        assert!((c1 / c2 - 1.0).abs() < 0.15, "C drift {c1} vs {c2}");
        assert!(infinitesimal_schwarzian_residual(&u, 1e-8).is_err());
    }
}
