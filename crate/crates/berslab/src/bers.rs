//! The real Bers map, Miura factorization, the Volterra tame right inverse,
//! and the canonical reconstruction of a diffeomorphism from its potential.
//!
//! The primary construction of the distinguished solution y_q is Picard
//! iteration on the Volterra equation y(x) = 1 - int_{-inf}^x (x-t) q(t) y(t) dt,
//! which is the citable characterization; the Runge-Kutta integration of
//! y'' = -q y from the same left data is kept as the independent oracle.

use crate::diffeo::{Density, Diffeo, LogCoord};
use crate::error::{Error, Result};
use crate::numerics::{interp, quad, Decay, Grid, RealFunction};
use crate::projective::{schwarzian, score, score_curvature};

/// Right-end tolerance for declaring the decay side of the membership test
/// satisfied; the truncation-error floor of the window.
pub const MEMBERSHIP_TOL: f64 = 1e-4;

/// A real potential q on the window, the value of the Bers map.
#[derive(Debug, Clone)]
pub struct BersPotential {
    q: RealFunction,
}

impl BersPotential {
    /// Wrap a decaying potential (candidate for the membership test).
    pub fn new(q: RealFunction) -> Result<Self> {
        if q.decay() != Decay::VanishesAtBothEnds {
            return Err(Error::WrongDecay { expected: "VanishesAtBothEnds", got: "other" });
        }
        Ok(Self { q })
    }

    pub fn q(&self) -> &RealFunction {
        &self.q
    }
    pub fn grid(&self) -> Grid {
        self.q.grid()
    }
}

/// Miura variable w with q = w' - w^2 and int w = 0 certificates.
#[derive(Debug, Clone)]
pub struct MiuraWitness {
    pub w: RealFunction,
    /// |int w| (vanishes on the Bers image).
    pub zero_mean_defect: f64,
    /// sup |w' - w^2 - q|.
    pub riccati_residual: f64,
}

/// beta(phi) = (1/2) S(phi), via the potential form of the Schwarzian.
pub fn bers_map(phi: &Diffeo) -> Result<BersPotential> {
    let s = schwarzian(phi)?;
    let q = s.field().map_with_tol(Decay::VanishesAtBothEnds, 1e-4, |v| 0.5 * v)?;
    Ok(BersPotential { q })
}

/// |int q + (1/4) int (u')^2| with u = log phi' (the energy identity).
pub fn energy_identity_residual(phi: &Diffeo) -> Result<f64> {
    let q = bers_map(phi)?;
    let u = phi.h().map_with_tol(Decay::VanishesAtBothEnds, 1e-4, |h| (1.0 + h).ln())?;
    let du = u.derivative(1)?;
    let g = phi.grid();
    let du_sq: Vec<f64> = du.values().iter().map(|v| v * v).collect();
    let energy = quad::simpson(&du_sq, g.h());
    Ok((q.q.integral() + 0.25 * energy).abs())
}

/// sup |y2'' + q y2| for y2 = (phi')^{-1/2}, plus the first-order
/// annihilation sup |y2' + (u'/2) y2|.
#[derive(Debug, Clone, Copy)]
pub struct MiuraResidual {
    pub second_order: f64,
    pub first_order: f64,
}

pub fn miura_residual(phi: &Diffeo) -> Result<MiuraResidual> {
    let q = bers_map(phi)?;
    let g = phi.grid();
    let y2 = phi.h().map(Decay::TendsToOneAtBothEnds, |h| (1.0 + h).powf(-0.5))?;
    let y2_d = y2.derivative(1)?;
    let y2_dd = y2.derivative(2)?;
    let u = phi.h().map_with_tol(Decay::VanishesAtBothEnds, 1e-4, |h| (1.0 + h).ln())?;
    let du = u.derivative(1)?;
    let mut second_order = 0.0f64;
    let mut first_order = 0.0f64;
    for i in 0..g.n() {
        second_order =
            second_order.max((y2_dd.values()[i] + q.q.values()[i] * y2.values()[i]).abs());
        first_order =
            first_order.max((y2_d.values()[i] + 0.5 * du.values()[i] * y2.values()[i]).abs());
    }
    Ok(MiuraResidual { second_order, first_order })
}

/// Volterra right inverse of the Bers linearization:
/// (R_u v)(x) = int_{-inf}^x e^{u(t)} int_{-inf}^t e^{-u(y)} v(y) dy dt.
pub fn volterra_right_inverse(u: &LogCoord, v: &RealFunction) -> Result<RealFunction> {
    if v.decay() != Decay::VanishesAtBothEnds {
        return Err(Error::WrongDecay { expected: "VanishesAtBothEnds", got: "other" });
    }
    let g = u.u().grid();
    let inner_integrand = u.u().zip(v, Decay::VanishesAtBothEnds, |uu, vv| (-uu).exp() * vv)?;
    // The inner primitive settles to a nonzero constant on the right, so the
    // outer integrand is only left-decaying; use the raw cumulative rule.
    let inner = inner_integrand.cumulative_raw();
    let outer_integrand: Vec<f64> = (0..g.n())
        .map(|i| u.u().values()[i].exp() * inner.values()[i])
        .collect();
    Ok(RealFunction::unrestricted(g, outer_integrand)?.cumulative_raw())
}

/// sup |(R_u v)'' - u' (R_u v)' - v|: the tame right-inverse defect.
pub fn volterra_defect(u: &LogCoord, v: &RealFunction) -> Result<f64> {
    let r = volterra_right_inverse(u, v)?;
    let r1 = r.derivative(1)?;
    let r2 = r.derivative(2)?;
    let du = u.u().derivative(1)?;
    let g = r.grid();
    let mut worst = 0.0f64;
    for i in 0..g.n() {
        worst = worst.max(
            (r2.values()[i] - du.values()[i] * r1.values()[i] - v.values()[i]).abs(),
        );
    }
    Ok(worst)
}

/// Picard iteration for the distinguished solution of y'' + q y = 0 with
/// y(-inf) = 1, y'(-inf) = 0:
/// y(x) = 1 - int_{-inf}^x (x - t) q(t) y(t) dt.
///
/// Errors on non-convergence and on loss of positivity (the latter signals a
/// potential outside the Bers image).
pub fn distinguished_solution(q: &BersPotential) -> Result<RealFunction> {
    let g = q.grid();
    let n = g.n();
    let mut y = vec![1.0; n];
    let mut change = f64::INFINITY;
    for iter in 0..200 {
        let qy: Vec<f64> = (0..n).map(|i| q.q.values()[i] * y[i]).collect();
        let tqy: Vec<f64> = (0..n).map(|i| g.x(i) * qy[i]).collect();
        let a = quad::cumulative(&qy, g.h());
        let b = quad::cumulative(&tqy, g.h());
        let mut next = Vec::with_capacity(n);
        change = 0.0;
        for i in 0..n {
            let val = 1.0 - (g.x(i) * a[i] - b[i]);
            change = change.max((val - y[i]).abs());
            next.push(val);
        }
        y = next;
        if change < 1e-12 {
            let min = y.iter().fold(f64::INFINITY, |m, &v| m.min(v));
            if !(min > 0.0) {
                return Err(Error::PositivityLoss(min));
            }
            return RealFunction::unrestricted(g, y);
        }
        let _ = iter;
    }
    Err(Error::PicardDivergence { iters: 200, change })
}

/// Runge-Kutta oracle: integrate y'' = -q y forward from (1, 0) at x_min
/// with step h/2, sampling q on an h/4-refined quintic table.
pub fn distinguished_solution_rk4(q: &BersPotential) -> Result<RealFunction> {
    let g = q.grid();
    let n = g.n();
    let fine = refine_quartic_steps(q.q());
    let step = g.h() / 2.0;
    let mut y = 1.0f64;
    let mut z = 0.0f64;
    let mut out = Vec::with_capacity(n);
    out.push(y);
    // Two RK4 steps of size h/2 per grid cell; q at quarter points comes
    // from the refined table.
    for cell in 0..n - 1 {
        for half in 0..2 {
            let base = 4 * cell + 2 * half;
            let q0 = fine[base];
            let q1 = fine[base + 1];
            let q2 = fine[base + 2];
            let f = |qv: f64, yv: f64| -qv * yv;
            let (k1y, k1z) = (z, f(q0, y));
            let (k2y, k2z) = (z + 0.5 * step * k1z, f(q1, y + 0.5 * step * k1y));
            let (k3y, k3z) = (z + 0.5 * step * k2z, f(q1, y + 0.5 * step * k2y));
            let (k4y, k4z) = (z + step * k3z, f(q2, y + step * k3y));
            y += step / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
            z += step / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
        }
        out.push(y);
    }
    RealFunction::unrestricted(g, out)
}

/// Quintic resample of a grid function onto the h/4-refined mesh.
fn refine_quartic_steps(f: &RealFunction) -> Vec<f64> {
    let g = f.grid();
    let n = g.n();
    let mut fine = Vec::with_capacity(4 * (n - 1) + 1);
    for i in 0..n - 1 {
        fine.push(f.values()[i]);
        for j in 1..4 {
            let x = g.x(i) + g.h() * j as f64 / 4.0;
            fine.push(interp::quintic(g.x_min(), g.h(), f.values(), x));
        }
    }
    fine.push(f.values()[n - 1]);
    fine
}

/// Canonical reconstruction phi' = y_q^{-2}; the unique preimage of q.
///
/// Errors if the distinguished solution loses positivity or its right-end
/// limit misses 1 by more than the membership tolerance (the two finite
/// proxies for the spectral characterization of the image).
pub fn reconstruct_diffeo(q: &BersPotential) -> Result<Diffeo> {
    let y = distinguished_solution(q)?;
    let g = q.grid();
    let right_gap = (y.values()[g.n() - 1] - 1.0).abs();
    if right_gap > MEMBERSHIP_TOL {
        return Err(Error::MembershipLimit(right_gap, MEMBERSHIP_TOL));
    }
    let h_vals: Vec<f64> = y.values().iter().map(|&v| v.powi(-2) - 1.0).collect();
    Diffeo::from_jacobian_perturbation_with_tol(g, h_vals, 3.0 * MEMBERSHIP_TOL)
}

/// Miura witness w = -y'/y from the distinguished solution, with its
/// Riccati residual and the integral constraint defect.
pub fn riccati_miura_witness(q: &BersPotential) -> Result<MiuraWitness> {
    let y = distinguished_solution(q)?;
    let g = q.grid();
    let y_d = y.derivative(1)?;
    let w_vals: Vec<f64> = (0..g.n()).map(|i| -y_d.values()[i] / y.values()[i]).collect();
    let w = RealFunction::with_boundary_tol(g, w_vals, Decay::VanishesAtBothEnds, 1e-4)?;
    let w_d = w.derivative(1)?;
    let mut riccati_residual = 0.0f64;
    for i in 0..g.n() {
        riccati_residual = riccati_residual.max(
            (w_d.values()[i] - w.values()[i] * w.values()[i] - q.q.values()[i]).abs(),
        );
    }
    let zero_mean_defect = w.integral().abs();
    Ok(MiuraWitness { w, zero_mean_defect, riccati_residual })
}

/// Affine action on potentials A_phi q = (q o phi) phi'^2 + (1/2) S(phi).
pub fn affine_action(q: &RealFunction, phi: &Diffeo) -> Result<RealFunction> {
    let s = schwarzian(phi)?;
    let g = phi.grid();
    let vals: Vec<f64> = (0..g.n())
        .map(|i| {
            let jac = 1.0 + phi.h().values()[i];
            q.eval(phi.phi_values()[i]) * jac * jac + 0.5 * s.field().values()[i]
        })
        .collect();
    RealFunction::unrestricted(g, vals)
}

/// Anti-homomorphism residual sup |A_{phi o psi} q - A_psi(A_phi q)|.
pub fn affine_action_composition_residual(
    q: &RealFunction,
    phi: &Diffeo,
    psi: &Diffeo,
) -> Result<f64> {
    let joint = affine_action(q, &phi.compose(psi)?)?;
    let step = affine_action(&affine_action(q, phi)?, psi)?;
    Ok(joint.sub(&step)?.sup_norm())
}

/// |<f, (-d^2 - beta(mu)) f> - int |f' + (1/2) s f|^2|: the supersymmetric
/// factorization of the projective Schrodinger operator as a quadratic form.
pub fn factorization_form_residual(mu: &Density, f: &RealFunction) -> Result<f64> {
    let g = mu.grid();
    for i in 0..g.n() {
        let x = g.x(i);
        if (x < g.x_min() + 1.0 || x > g.x_max() - 1.0) && f.values()[i].abs() > 1e-12 {
            return Err(Error::SupportViolation);
        }
    }
    let beta = score_curvature(mu)?;
    let s = score(mu)?;
    let f_d = f.derivative(1)?;
    let lhs_integrand: Vec<f64> = (0..g.n())
        .map(|i| {
            f_d.values()[i].powi(2) - 0.5 * beta.field().values()[i] * f.values()[i].powi(2)
        })
        .collect();
    let rhs_integrand: Vec<f64> = (0..g.n())
        .map(|i| (f_d.values()[i] + 0.5 * s.s().values()[i] * f.values()[i]).powi(2))
        .collect();
    let lhs = quad::simpson(&lhs_integrand, g.h());
    let rhs = quad::simpson(&rhs_integrand, g.h());
    Ok((lhs - rhs).abs())
}

/// Quadratic form <f, (-d^2 - beta) f> = int ((f')^2 - beta f^2) dx.
pub fn factorization_form_value(mu: &Density, f: &RealFunction) -> Result<f64> {
    let g = mu.grid();
    let beta = score_curvature(mu)?;
    let f_d = f.derivative(1)?;
    let integrand: Vec<f64> = (0..g.n())
        .map(|i| {
            f_d.values()[i].powi(2) - 0.5 * beta.field().values()[i] * f.values()[i].powi(2)
        })
        .collect();
    Ok(quad::simpson(&integrand, g.h()))
}
