//! Distances, explicit geodesics, the flat connection in Eulerian variables,
//! and the strain / Hunter-Saxton / Riccati dynamics along geodesic paths.
//!
//! Geodesics are affine segments in the p-root chart; every residual here is
//! a diagnostic assembled from finite differences, not a solver. Time
//! derivatives use plain central differences at a caller-chosen step so the
//! O(dt^2) convergence of the residuals is observable; the Eulerian velocity
//! itself applies one Richardson pass.

use crate::diffeo::{phi_p, Diffeo};
use crate::error::{Error, Result};
use crate::numerics::{quad, Decay, Grid, RealFunction};

/// Explicit minimizing geodesic between two diffeomorphisms.
#[derive(Debug, Clone)]
pub struct GeodesicPath {
    p: f64,
    phi0: Diffeo,
    phi1: Diffeo,
    t_samples: Vec<f64>,
}

impl GeodesicPath {
    /// `p` in [1, infinity]; the Jacobian positivity of every requested
    /// t-sample is validated on construction.
    pub fn new(p: f64, phi0: Diffeo, phi1: Diffeo, t_samples: Vec<f64>) -> Result<Self> {
        if !(p >= 1.0) {
            return Err(Error::InvalidExponent(p, "p in [1, infinity]"));
        }
        assert_eq!(phi0.grid(), phi1.grid(), "grid mismatch in geodesic");
        let path = Self { p, phi0, phi1, t_samples };
        for &t in &path.t_samples {
            path.at(t)?;
        }
        Ok(path)
    }

    pub fn p(&self) -> f64 {
        self.p
    }
    pub fn grid(&self) -> Grid {
        self.phi0.grid()
    }
    pub fn endpoints(&self) -> (&Diffeo, &Diffeo) {
        (&self.phi0, &self.phi1)
    }
    pub fn t_samples(&self) -> &[f64] {
        &self.t_samples
    }

    /// phi(t,x) = x + int(((1-t) phi0'^{1/p} + t phi1'^{1/p})^p - 1); the
    /// straight line in log coordinates for p = infinity.
    pub fn at(&self, t: f64) -> Result<Diffeo> {
        let g = self.grid();
        let h0 = self.phi0.h().values();
        let h1 = self.phi1.h().values();
        let mut h = Vec::with_capacity(g.n());
        if self.p.is_finite() {
            let p = self.p;
            for i in 0..g.n() {
                let root =
                    (1.0 - t) * (1.0 + h0[i]).powf(1.0 / p) + t * (1.0 + h1[i]).powf(1.0 / p);
                if !(root > 0.0) {
                    return Err(Error::GeodesicPositivity { t, x: g.x(i) });
                }
                h.push(root.powf(p) - 1.0);
            }
        } else {
            for i in 0..g.n() {
                let u = (1.0 - t) * (1.0 + h0[i]).ln() + t * (1.0 + h1[i]).ln();
                h.push(u.exp_m1());
            }
        }
        Diffeo::from_jacobian_perturbation_with_tol(g, h, 1e-7)
    }

    /// Eulerian velocity u = (d/dt phi) o phi^{-1} at time t, with
    /// u(x_min) = 0 enforced. Central differences in t with one Richardson
    /// pass (dt = 1e-4).
    pub fn eulerian_velocity(&self, t: f64) -> Result<EulerianField> {
        let dt = 1e-4;
        let coarse = self.lagrangian_rate(t, dt)?;
        let fine = self.lagrangian_rate(t, dt / 2.0)?;
        let g = self.grid();
        let dphi: Vec<f64> =
            coarse.iter().zip(&fine).map(|(&c, &f)| (4.0 * f - c) / 3.0).collect();
        let dphi = RealFunction::unrestricted(g, dphi)?;
        let inv = self.at(t)?.invert()?;
        let mut u_vals: Vec<f64> = g.xs().map(|x| dphi.eval(inv.evaluate(x))).collect();
        let left = u_vals[0];
        for v in &mut u_vals {
            *v -= left;
        }
        let u = RealFunction::unrestricted(g, u_vals)?;
        let v = u.derivative(1)?;
        Ok(EulerianField { t, u, v })
    }

    /// (phi(t+dt) - phi(t-dt)) / 2dt at the grid nodes (Lagrangian rate).
    fn lagrangian_rate(&self, t: f64, dt: f64) -> Result<Vec<f64>> {
        let plus = self.at(t + dt)?;
        let minus = self.at(t - dt)?;
        Ok(plus
            .phi_values()
            .iter()
            .zip(minus.phi_values())
            .map(|(&a, &b)| (a - b) / (2.0 * dt))
            .collect())
    }

    /// Pointwise residual field of the strain equation
    /// d_t(u_x) + u d_x(u_x) + (1/p)(u_x)^2 = 0 at time t.
    pub fn strain_residual_field(&self, t: f64, dt: f64) -> Result<RealFunction> {
        let mid = self.eulerian_velocity(t)?;
        let plus = self.eulerian_velocity(t + dt)?;
        let minus = self.eulerian_velocity(t - dt)?;
        let g = self.grid();
        let v_x = mid.v.derivative(1)?;
        let inv_p = if self.p.is_finite() { 1.0 / self.p } else { 0.0 };
        let vals: Vec<f64> = (0..g.n())
            .map(|i| {
                let v_t = (plus.v.values()[i] - minus.v.values()[i]) / (2.0 * dt);
                v_t + mid.u.values()[i] * v_x.values()[i] + inv_p * mid.v.values()[i].powi(2)
            })
            .collect();
        RealFunction::unrestricted(g, vals)
    }

    /// Sup norm of the strain residual.
    pub fn strain_residual(&self, t: f64, dt: f64) -> Result<f64> {
        Ok(self.strain_residual_field(t, dt)?.sup_norm())
    }

    /// Pointwise residual field of the generalized Hunter-Saxton equation
    /// u_txx + u u_xxx + (1 + 2/p) u_x u_xx = 0 in its third-order form,
    /// assembled through the strain chain (v = u_x, then v_x, v_xx).
    pub fn hunter_saxton_residual_field(&self, t: f64, dt: f64) -> Result<RealFunction> {
        let mid = self.eulerian_velocity(t)?;
        let plus = self.eulerian_velocity(t + dt)?;
        let minus = self.eulerian_velocity(t - dt)?;
        let g = self.grid();
        let v_t: Vec<f64> = (0..g.n())
            .map(|i| (plus.v.values()[i] - minus.v.values()[i]) / (2.0 * dt))
            .collect();
        let v_tx = RealFunction::unrestricted(g, v_t)?.derivative(1)?;
        let v_x = mid.v.derivative(1)?;
        let v_xx = v_x.derivative(1)?;
        let two_over_p = if self.p.is_finite() { 2.0 / self.p } else { 0.0 };
        let vals: Vec<f64> = (0..g.n())
            .map(|i| {
                v_tx.values()[i]
                    + mid.u.values()[i] * v_xx.values()[i]
                    + (1.0 + two_over_p) * mid.v.values()[i] * v_x.values()[i]
            })
            .collect();
        RealFunction::unrestricted(g, vals)
    }

    pub fn hunter_saxton_residual(&self, t: f64, dt: f64) -> Result<f64> {
        Ok(self.hunter_saxton_residual_field(t, dt)?.sup_norm())
    }

    /// Sup norm of the geodesic self-transport nabla_u u at time t.
    pub fn transport_residual(&self, t: f64, dt: f64) -> Result<f64> {
        let mid = self.eulerian_velocity(t)?;
        let plus = self.eulerian_velocity(t + dt)?;
        let minus = self.eulerian_velocity(t - dt)?;
        let g = self.grid();
        let u_dot: Vec<f64> = (0..g.n())
            .map(|i| (plus.u.values()[i] - minus.u.values()[i]) / (2.0 * dt))
            .collect();
        let u_dot = RealFunction::unrestricted(g, u_dot)?;
        Ok(covariant_derivative(&mid.u, &mid.u, &u_dot, self.p)?.sup_norm())
    }

    /// Statistical velocity v(t,x) = d_t log g(t,x) at the Lagrangian label,
    /// by central differences at step dt.
    pub fn statistical_velocity(&self, t: f64, dt: f64) -> Result<RealFunction> {
        let plus = self.at(t + dt)?;
        let minus = self.at(t - dt)?;
        let g = self.grid();
        let vals: Vec<f64> = (0..g.n())
            .map(|i| {
                let gp = 1.0 + plus.h().values()[i];
                let gm = 1.0 + minus.h().values()[i];
                (gp.ln() - gm.ln()) / (2.0 * dt)
            })
            .collect();
        RealFunction::unrestricted(g, vals)
    }

    /// Sup norm of d_t v + v^2 / p for the statistical velocity.
    pub fn riccati_residual(&self, t: f64, dt: f64) -> Result<f64> {
        let v = self.statistical_velocity(t, dt)?;
        let v_plus = self.statistical_velocity(t + dt, dt)?;
        let v_minus = self.statistical_velocity(t - dt, dt)?;
        let inv_p = if self.p.is_finite() { 1.0 / self.p } else { 0.0 };
        let mut worst = 0.0f64;
        for i in 0..self.grid().n() {
            let v_t = (v_plus.values()[i] - v_minus.values()[i]) / (2.0 * dt);
            worst = worst.max((v_t + inv_p * v.values()[i].powi(2)).abs());
        }
        Ok(worst)
    }

    /// Sup gap between the measured v(t1) and the Riccati closed form
    /// v(t0) / (1 + (t1 - t0) v(t0) / p); for p = infinity the statistical
    /// velocity is constant at each Lagrangian label.
    pub fn riccati_closed_form_gap(&self, t0: f64, t1: f64, dt: f64) -> Result<f64> {
        let v0 = self.statistical_velocity(t0, dt)?;
        let v1 = self.statistical_velocity(t1, dt)?;
        let mut worst = 0.0f64;
        for i in 0..self.grid().n() {
            let predicted = if self.p.is_finite() {
                v0.values()[i] / (1.0 + (t1 - t0) * v0.values()[i] / self.p)
            } else {
                v0.values()[i]
            };
            worst = worst.max((v1.values()[i] - predicted).abs());
        }
        Ok(worst)
    }

    /// Finsler path length by Gauss-Legendre quadrature of the speed
    /// ||u_x(t)||_{L^p}; the independent route to the chart distance.
    pub fn finsler_length(&self, nodes: usize) -> Result<f64> {
        let (xs, ws) = quad::gauss_legendre(nodes);
        let mut acc = 0.0;
        for (x, w) in xs.iter().zip(&ws) {
            let t = 0.5 * (x + 1.0);
            let speed = self.eulerian_velocity(t)?.v.lp_norm(self.p)?;
            acc += 0.5 * w * speed;
        }
        Ok(acc)
    }
}

/// One Eulerian time slice: velocity u and strain v = u_x.
#[derive(Debug, Clone)]
pub struct EulerianField {
    t: f64,
    u: RealFunction,
    v: RealFunction,
}

impl EulerianField {
    pub fn t(&self) -> f64 {
        self.t
    }
    pub fn u(&self) -> &RealFunction {
        &self.u
    }
    pub fn v(&self) -> &RealFunction {
        &self.v
    }
}

/// Geodesic distance d_p = ||Phi_p(phi0) - Phi_p(phi1)||_{L^p}, p in (1, inf).
pub fn distance_p(phi0: &Diffeo, phi1: &Diffeo, p: f64) -> Result<f64> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::InvalidExponent(p, "p in (1, infinity)"));
    }
    let f0 = phi_p(phi0, p)?;
    let f1 = phi_p(phi1, p)?;
    f0.f().sub(f1.f())?.lp_norm(p)
}

/// Flat-connection covariant derivative in Eulerian variables:
/// nabla a = a_dot + u a_x - ((p-1)/p) dx^{-1}(a_x u_x).
///
/// The coefficient is kept verbatim at p = infinity (limit 1), so the
/// nonlocal term survives there even though the strain equation loses its
/// quadratic term.
pub fn covariant_derivative(
    u: &RealFunction,
    a: &RealFunction,
    a_dot: &RealFunction,
    p: f64,
) -> Result<RealFunction> {
    if !(p >= 1.0) {
        return Err(Error::InvalidExponent(p, "p in [1, infinity]"));
    }
    let g = u.grid();
    let coeff = if p.is_finite() { (p - 1.0) / p } else { 1.0 };
    let a_x = a.derivative(1)?;
    let u_x = u.derivative(1)?;
    let product = a_x.zip(&u_x, Decay::Unrestricted, |x, y| x * y)?;
    let primitive = product.cumulative_raw();
    let vals: Vec<f64> = (0..g.n())
        .map(|i| {
            a_dot.values()[i] + u.values()[i] * a_x.values()[i] - coeff * primitive.values()[i]
        })
        .collect();
    RealFunction::unrestricted(g, vals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffeo::jacobian;
    use crate::family;

    fn pair() -> (Diffeo, Diffeo) {
        (family::gauss_bump(0.5, 0.0, 1.0).unwrap(), family::gauss_bump(-0.4, 1.0, 1.5).unwrap())
    }

    fn path(p: f64) -> GeodesicPath {
        let (a, b) = pair();
        GeodesicPath::new(p, a, b, vec![0.25, 0.5, 0.75]).unwrap()
    }

    #[test]
    fn positivity_failure_is_reported_outside_the_segment() {
        // Convex root combinations stay positive on [0, 1]; the extension of
        // the chart line beyond the segment can lose positivity and must be
        // reported, not clamped.
        let (a, b) = pair();
        let gamma = GeodesicPath::new(1.5, a, b, vec![]).unwrap();
        let far = gamma.at(40.0);
        assert!(matches!(far, Err(Error::GeodesicPositivity { .. })), "positivity not reported");
    }

    #[test]
    fn endpoints_are_reproduced() {
        let gamma = path(2.0);
        let (phi0, phi1) = (gamma.endpoints().0.clone(), gamma.endpoints().1.clone());
        let e0 = gamma.at(0.0).unwrap().h().sub(phi0.h()).unwrap().sup_norm();
        let e1 = gamma.at(1.0).unwrap().h().sub(phi1.h()).unwrap().sup_norm();
        assert!(e0 < 1e-13 && e1 < 1e-13, "endpoint errors {e0:e}, {e1:e}");
    }

    #[test]
    fn midpoint_closed_form_from_identity() {
        // phi0 = Id: phi'(1/2, x) = ((1 + sqrt(1 + h1))/2)^2
        let (_, phi1) = pair();
        let id = Diffeo::identity(phi1.grid());
        let gamma = GeodesicPath::new(2.0, id, phi1.clone(), vec![0.5]).unwrap();
        let mid = gamma.at(0.5).unwrap();
        let mut worst = 0.0f64;
        for (hm, h1) in mid.h().values().iter().zip(phi1.h().values()) {
            let expected = ((1.0 + (1.0 + h1).sqrt()) / 2.0).powi(2) - 1.0;
            worst = worst.max((hm - expected).abs());
        }
        assert!(worst < 1e-14, "closed form error {worst:e}");
    }

    #[test]
    fn chart_image_is_affine_in_t() {
        let gamma = path(2.0);
        let f0 = phi_p(gamma.endpoints().0, 2.0).unwrap();
        let f1 = phi_p(gamma.endpoints().1, 2.0).unwrap();
        for &t in gamma.t_samples() {
            let ft = phi_p(&gamma.at(t).unwrap(), 2.0).unwrap();
            let mut worst = 0.0f64;
            for i in 0..gamma.grid().n() {
                let affine = (1.0 - t) * f0.f().values()[i] + t * f1.f().values()[i];
                worst = worst.max((ft.f().values()[i] - affine).abs());
            }
            assert!(worst < 1e-12, "t = {t}: collinearity residual {worst:e}");
        }
    }

    #[test]
    fn density_pushforward_matches_fisher_rao_geodesic() {
        let gamma = path(2.0);
        let g0 = jacobian(gamma.endpoints().0).g_values();
        let g1 = jacobian(gamma.endpoints().1).g_values();
        let mu_half = jacobian(&gamma.at(0.5).unwrap());
        for (i, gv) in mu_half.g_values().iter().enumerate() {
            let expected = (0.5 * g0[i].powf(0.5) + 0.5 * g1[i].powf(0.5)).powi(2);
            assert!((gv - expected).abs() < 1e-15 * expected.abs().max(1.0), "node {i}");
        }
    }

    #[test]
    fn distance_properties() {
        let (a, b) = pair();
        assert_eq!(distance_p(&a, &a, 2.0).unwrap(), 0.0);
        let d_ab = distance_p(&a, &b, 2.0).unwrap();
        let d_ba = distance_p(&b, &a, 2.0).unwrap();
        assert_eq!(d_ab, d_ba);
        assert!(distance_p(&a, &b, 1.0).is_err());
        assert!(distance_p(&a, &b, f64::INFINITY).is_err());
    }

    #[test]
    fn distance_matches_finsler_path_length() {
        let (a, b) = pair();
        let gamma = GeodesicPath::new(2.0, a.clone(), b.clone(), vec![]).unwrap();
        let d = distance_p(&a, &b, 2.0).unwrap();
        let len = gamma.finsler_length(64).unwrap();
        let rel = (d - len).abs() / d;
        assert!(rel < 1e-4, "distance {d} vs path length {len}: rel {rel:e}");
    }

    #[test]
    fn constant_path_has_zero_residuals() {
        let (a, _) = pair();
        let gamma = GeodesicPath::new(2.0, a.clone(), a.clone(), vec![0.5]).unwrap();
        assert!(gamma.eulerian_velocity(0.5).unwrap().u().sup_norm() < 1e-10);
        assert!(gamma.strain_residual(0.5, 1e-3).unwrap() < 1e-9);
        assert!(gamma.riccati_residual(0.5, 1e-3).unwrap() < 1e-9);
    }

    #[test]
    fn reversing_orientation_negates_velocity() {
        let (a, b) = pair();
        let fwd = GeodesicPath::new(2.0, a.clone(), b.clone(), vec![]).unwrap();
        let bwd = GeodesicPath::new(2.0, b, a, vec![]).unwrap();
        let uf = fwd.eulerian_velocity(0.4).unwrap();
        let ub = bwd.eulerian_velocity(0.6).unwrap();
        let mut worst = 0.0f64;
        for i in 0..fwd.grid().n() {
            worst = worst.max((uf.u().values()[i] + ub.u().values()[i]).abs());
        }
        assert!(worst < 1e-6, "orientation reversal error {worst:e}");
    }

    #[test]
    fn strain_residual_small_and_second_order() {
        let gamma = path(2.0);
        let r = gamma.strain_residual(0.5, 1e-3).unwrap();
        assert!(r < 5e-3, "strain residual {r:e}");
        // O(dt^2): halving dt divides the residual by ~4.
        let r1 = gamma.strain_residual(0.5, 0.04).unwrap();
        let r2 = gamma.strain_residual(0.5, 0.02).unwrap();
        let ratio = r1 / r2;
        assert!((3.5..=4.5).contains(&ratio), "convergence ratio {ratio}");
    }

    #[test]
    fn strain_residual_infinite_p() {
        let gamma = path(f64::INFINITY);
        let r = gamma.strain_residual(0.5, 1e-3).unwrap();
        assert!(r < 5e-3, "pure transport residual {r:e}");
    }

    #[test]
    fn hunter_saxton_residual_small() {
        let gamma = path(2.0);
        let r = gamma.hunter_saxton_residual(0.5, 1e-3).unwrap();
        assert!(r < 2e-2, "hunter-saxton residual {r:e}");
    }

    #[test]
    fn hunter_saxton_is_x_derivative_of_strain() {
        // The gap is pure discrete-product-rule truncation, O(h^4); at the
        // default h it sits at 1.8e-6, so check the identity at h = 0.005.
        let g = Grid::new(-20.0, 20.0, 8001).unwrap();
        let a = family::gauss_bump_on(g, 0.5, 0.0, 1.0).unwrap();
        let b = family::gauss_bump_on(g, -0.4, 1.0, 1.5).unwrap();
        let gamma = GeodesicPath::new(2.0, a, b, vec![]).unwrap();
        let strain = gamma.strain_residual_field(0.5, 1e-3).unwrap();
        let hs = gamma.hunter_saxton_residual_field(0.5, 1e-3).unwrap();
        let diff = strain.derivative(1).unwrap().sub(&hs).unwrap().sup_norm();
        assert!(diff < 1e-6, "algebraic identity gap {diff:e}");
    }

    #[test]
    fn transport_residual_vanishes_on_geodesics() {
        for p in [1.5, 2.0, 4.0] {
            let gamma = path(p);
            let r = gamma.transport_residual(0.5, 1e-3).unwrap();
            assert!(r < 5e-3, "p = {p}: nabla_u u = {r:e}");
        }
    }

    #[test]
    fn covariant_derivative_of_zero_field() {
        let gamma = path(2.0);
        let u = gamma.eulerian_velocity(0.5).unwrap();
        let zero = RealFunction::zeros(gamma.grid());
        let nabla = covariant_derivative(u.u(), &zero, &zero, 2.0).unwrap();
        assert_eq!(nabla.sup_norm(), 0.0);
    }

    #[test]
    fn covariant_derivative_keeps_nonlocal_term_at_infinite_p() {
        // At p = infinity the coefficient (p-1)/p -> 1, so nabla differs from
        // the material derivative exactly by dx^{-1}(a_x u_x).
        let gamma = path(f64::INFINITY);
        let fld = gamma.eulerian_velocity(0.5).unwrap();
        let a = fld.u().clone();
        let a_dot = RealFunction::zeros(gamma.grid());
        let nabla = covariant_derivative(fld.u(), &a, &a_dot, f64::INFINITY).unwrap();
        let a_x = a.derivative(1).unwrap();
        let u_x = fld.u().derivative(1).unwrap();
        let nonlocal = a_x.zip(&u_x, Decay::Unrestricted, |x, y| x * y).unwrap().cumulative_raw();
        let mut worst = 0.0f64;
        for i in 0..gamma.grid().n() {
            let expected =
                fld.u().values()[i] * a_x.values()[i] - nonlocal.values()[i];
            worst = worst.max((nabla.values()[i] - expected).abs());
        }
        assert!(worst < 1e-13, "nonlocal term mismatch {worst:e}");
    }

    #[test]
    fn riccati_residual_and_closed_form() {
        for p in [1.5, 2.0, 4.0] {
            let gamma = path(p);
            let r = gamma.riccati_residual(0.5, 1e-3).unwrap();
            assert!(r < 5e-3, "p = {p}: riccati residual {r:e}");
            let gap = gamma.riccati_closed_form_gap(0.25, 0.75, 1e-4).unwrap();
            assert!(gap < 1e-4, "p = {p}: closed-form gap {gap:e}");
        }
        let gamma = path(f64::INFINITY);
        let gap = gamma.riccati_closed_form_gap(0.25, 0.75, 1e-4).unwrap();
        assert!(gap < 1e-4, "transport gap {gap:e}");
    }

    #[test]
    fn lagrangian_strain_is_constant_at_infinite_p() {
        // v = u_x o phi: pull the Eulerian strain back and compare across t.
        let gamma = path(f64::INFINITY);
        let mut pulled: Vec<Vec<f64>> = Vec::new();
        for &t in &[0.3, 0.5, 0.7] {
            let phi_t = gamma.at(t).unwrap();
            let fld = gamma.eulerian_velocity(t).unwrap();
            pulled.push(phi_t.phi_values().iter().map(|&y| fld.v().eval(y)).collect());
        }
        let mut worst = 0.0f64;
        for i in 0..gamma.grid().n() {
            worst = worst.max((pulled[0][i] - pulled[2][i]).abs());
            worst = worst.max((pulled[1][i] - pulled[0][i]).abs());
        }
        assert!(worst < 1e-4, "pulled-back strain drift {worst:e}");
    }
}
