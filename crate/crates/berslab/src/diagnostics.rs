//! Density-side structural theorems as executable checks: forced
//! sign-change of the projective curvature, critical-point sign rules,
//! Hardy / Hardy-Poincare inequalities, the criticality demonstration, and
//! the Fisher non-control experiment.

use crate::bers::bers_map;
use crate::diffeo::{Density, Diffeo};
use crate::error::{Error, Result};
use crate::numerics::{interp, quad, Decay, Grid, RealFunction};
use crate::projective::score_curvature;

/// Dead band for zero counting; suppresses noise-induced double crossings.
const SIGN_DEAD_BAND: f64 = 1e-10;

/// Sign structure of the density Bers potential beta = (1/2) s' - (1/4) s^2.
#[derive(Debug, Clone, Copy)]
pub struct SignReport {
    /// Lebesgue measure of {beta > 0} (linear crossing refinement).
    pub pos_measure: f64,
    /// Lebesgue measure of {beta < 0}.
    pub neg_measure: f64,
    /// Number of sign changes of beta.
    pub zero_count: usize,
    /// int max(beta, 0) dx.
    pub beta_plus_integral: f64,
    /// Nodewise inclusion of the log-concavity region in {beta < 0}.
    pub omega_minus_in_pi_minus: bool,
    /// |int beta dx + (1/4) int s^2 dx|.
    pub mean_identity_residual: f64,
}

/// beta(mu) = (1/2) S(mu) sampled on the grid.
pub fn beta_field(mu: &Density) -> Result<RealFunction> {
    let s = score_curvature(mu)?;
    s.field().map_with_tol(Decay::VanishesAtBothEnds, 1e-3, |v| 0.5 * v)
}

fn count_sign_changes(values: &[f64], dead_band: f64) -> usize {
    let mut count = 0;
    let mut last: i8 = 0;
    for &v in values {
        let sign = if v > dead_band {
            1
        } else if v < -dead_band {
            -1
        } else {
            0
        };
        if sign != 0 {
            if last != 0 && sign != last {
                count += 1;
            }
            last = sign;
        }
    }
    count
}

pub fn sign_report(mu: &Density) -> Result<SignReport> {
    let g = mu.grid();
    if mu.gm1().sup_norm() < 1e-12 {
        // Lebesgue measure itself: trivial report, exempt from the >= 2 rule.
        return Ok(SignReport {
            pos_measure: 0.0,
            neg_measure: 0.0,
            zero_count: 0,
            beta_plus_integral: 0.0,
            omega_minus_in_pi_minus: true,
            mean_identity_residual: 0.0,
        });
    }
    let beta = beta_field(mu)?;
    let data = crate::projective::score(mu)?;
    let s_prime = data.s().derivative(1)?;
    let h = g.h();
    let mut pos = 0.0;
    let mut neg = 0.0;
    let mut plus_int = 0.0;
    for i in 0..g.n() - 1 {
        let (b0, b1) = (beta.values()[i], beta.values()[i + 1]);
        // Linear model on the cell; exact positive part of a linear segment.
        if b0 >= 0.0 && b1 >= 0.0 {
            pos += h;
            plus_int += 0.5 * h * (b0 + b1);
        } else if b0 <= 0.0 && b1 <= 0.0 {
            neg += h;
        } else {
            let t = b0 / (b0 - b1); // crossing fraction
            if b0 > 0.0 {
                pos += t * h;
                neg += (1.0 - t) * h;
                plus_int += 0.5 * t * h * b0;
            } else {
                neg += t * h;
                pos += (1.0 - t) * h;
                plus_int += 0.5 * (1.0 - t) * h * b1;
            }
        }
    }
    let zero_count = count_sign_changes(beta.values(), SIGN_DEAD_BAND);
    let mut inclusion = true;
    for i in 0..g.n() {
        if s_prime.values()[i] < -SIGN_DEAD_BAND && beta.values()[i] >= SIGN_DEAD_BAND {
            inclusion = false;
        }
    }
    let s_sq: Vec<f64> = data.s().values().iter().map(|v| v * v).collect();
    let mean_identity_residual =
        (beta.integral() + 0.25 * quad::simpson(&s_sq, h)).abs();
    Ok(SignReport {
        pos_measure: pos,
        neg_measure: neg,
        zero_count,
        beta_plus_integral: plus_int,
        omega_minus_in_pi_minus: inclusion,
        mean_identity_residual,
    })
}

/// Classification of a critical point of the density.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriticalKind {
    LocalMax,
    LocalMin,
    Degenerate,
}

#[derive(Debug, Clone, Copy)]
pub struct CriticalPoint {
    pub x0: f64,
    pub kind: CriticalKind,
    pub beta_value: f64,
    /// |beta(x0) - g''(x0) / (2 g(x0))|.
    pub formula_gap: f64,
    /// Sign rule satisfied (max -> beta < 0, min -> beta > 0).
    pub sign_rule_holds: bool,
}

/// Locate the critical points of g by sign-change bisection of g' and check
/// the critical-point sign rule for beta there.
pub fn critical_point_sign_check(mu: &Density) -> Result<Vec<CriticalPoint>> {
    let g = mu.grid();
    let g_prime = mu.gm1().derivative(1)?;
    let g_second = mu.gm1().derivative(2)?;
    let beta = beta_field(mu)?;
    let eval = |field: &RealFunction, x: f64| -> f64 {
        interp::cubic(g.x_min(), g.h(), field.values(), x)
    };
    let mut out = Vec::new();
    for i in 0..g.n() - 1 {
        let (d0, d1) = (g_prime.values()[i], g_prime.values()[i + 1]);
        if d0 == 0.0 || d0 * d1 >= 0.0 {
            continue;
        }
        // Dead band against tail noise.
        if d0.abs().max(d1.abs()) < 1e-9 {
            continue;
        }
        let mut lo = g.x(i);
        let mut hi = g.x(i + 1);
        let lo_val = d0;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if eval(&g_prime, mid) * lo_val.signum() > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-12 {
                break;
            }
        }
        let x0 = 0.5 * (lo + hi);
        let g2 = eval(&g_second, x0);
        let g_val = 1.0 + eval(mu.gm1(), x0);
        let b = eval(&beta, x0);
        let formula_gap = (b - g2 / (2.0 * g_val)).abs();
        let (kind, sign_rule_holds) = if g2 < -1e-10 {
            (CriticalKind::LocalMax, b < 0.0)
        } else if g2 > 1e-10 {
            (CriticalKind::LocalMin, b > 0.0)
        } else {
            (CriticalKind::Degenerate, true)
        };
        out.push(CriticalPoint { x0, kind, beta_value: b, formula_gap, sign_rule_holds });
    }
    Ok(out)
}

/// True iff s' takes both signs (beyond the dead band) or mu is Lebesgue.
pub fn no_global_logconcavity_check(mu: &Density) -> Result<bool> {
    if mu.gm1().sup_norm() < 1e-12 {
        return Ok(true);
    }
    let data = crate::projective::score(mu)?;
    let s_prime = data.s().derivative(1)?;
    let has_pos = s_prime.values().iter().any(|&v| v > SIGN_DEAD_BAND);
    let has_neg = s_prime.values().iter().any(|&v| v < -SIGN_DEAD_BAND);
    Ok(has_pos && has_neg)
}

/// Hardy / windowed Hardy-Poincare certificates.
#[derive(Debug, Clone, Copy)]
pub struct HardyReport {
    /// int (f')^2 - int q f^2 (nonnegative by the critical Hardy inequality).
    pub hardy_margin: f64,
    /// |E_q(f) - int |f' - (psi'/psi) f|^2| (ground-state transform).
    pub gs_identity_residual: f64,
    /// Smallest Rayleigh quotient of E_{q,R} over the complement of psi.
    pub lambda_r: f64,
    /// Explicit lower bound (pi^2 / 4R^2) inf psi^2 / sup psi^2.
    pub lambda_r_bound: f64,
}

pub fn hardy_report(phi: &Diffeo, f: &RealFunction, r_window: f64) -> Result<HardyReport> {
    let g = phi.grid();
    if !(r_window > 0.0) || r_window >= g.x_max().min(-g.x_min()) {
        return Err(Error::InvalidGrid(format!("window radius {r_window}")));
    }
    for i in 0..g.n() {
        if g.x(i).abs() >= r_window && f.values()[i].abs() > 1e-12 {
            return Err(Error::SupportViolation);
        }
    }
    let q = bers_map(phi)?;
    let u = phi.h().map_with_tol(Decay::VanishesAtBothEnds, 1e-4, |h| (1.0 + h).ln())?;
    let du = u.derivative(1)?;
    let f_d = f.derivative(1)?;
    let h = g.h();
    let energy_integrand: Vec<f64> = (0..g.n())
        .map(|i| f_d.values()[i].powi(2) - q.q().values()[i] * f.values()[i].powi(2))
        .collect();
    let hardy_margin = quad::simpson(&energy_integrand, h);
    // psi'/psi = -u'/2.
    let gs_integrand: Vec<f64> = (0..g.n())
        .map(|i| (f_d.values()[i] + 0.5 * du.values()[i] * f.values()[i]).powi(2))
        .collect();
    let gs_identity_residual = (hardy_margin - quad::simpson(&gs_integrand, h)).abs();
    let (lambda_r, lambda_r_bound) = window_eigenvalue(phi, &q, r_window)?;
    Ok(HardyReport { hardy_margin, gs_identity_residual, lambda_r, lambda_r_bound })
}

/// Smallest generalized Rayleigh quotient of E_{q,R} over the discretized
/// complement of span{psi} on (-R, R), with Dirichlet boundary (a trial-space
/// restriction, so the certified inequality is one-sided), by projected
/// inverse iteration.
fn window_eigenvalue(phi: &Diffeo, q: &crate::bers::BersPotential, r: f64) -> Result<(f64, f64)> {
    let g = phi.grid();
    let idx: Vec<usize> = (0..g.n()).filter(|&i| g.x(i).abs() < r).collect();
    let n = idx.len();
    if n < 8 {
        return Err(Error::InvalidGrid("window too small for the eigenproblem".into()));
    }
    let h2 = g.h() * g.h();
    let diag: Vec<f64> = idx.iter().map(|&i| 2.0 / h2 - q.q().values()[i]).collect();
    let off = -1.0 / h2;
    let psi: Vec<f64> = idx.iter().map(|&i| (1.0 + phi.h().values()[i]).powf(-0.5)).collect();
    let psi_norm_sq: f64 = psi.iter().map(|v| v * v).sum();
    let project = |v: &mut Vec<f64>| {
        let inner: f64 = v.iter().zip(&psi).map(|(a, b)| a * b).sum();
        for (vi, pi) in v.iter_mut().zip(&psi) {
            *vi -= inner / psi_norm_sq * pi;
        }
    };
    let apply_a = |v: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; n];
        for i in 0..n {
            out[i] = diag[i] * v[i]
                + if i > 0 { off * v[i - 1] } else { 0.0 }
                + if i + 1 < n { off * v[i + 1] } else { 0.0 };
        }
        out
    };
    // Start orthogonal to psi with a deterministic profile.
    let mut v: Vec<f64> = (0..n).map(|j| ((j + 1) as f64 * 0.37).sin()).collect();
    project(&mut v);
    let mut lambda_prev = f64::INFINITY;
    let mut lambda = f64::INFINITY;
    for iter in 0..500 {
        let mut w = thomas_pd(&diag, off, &v);
        project(&mut w);
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        for x in &mut w {
            *x /= norm;
        }
        let aw = apply_a(&w);
        let num: f64 = w.iter().zip(&aw).map(|(a, b)| a * b).sum();
        let den: f64 = w.iter().map(|x| x * x).sum();
        lambda = num / den;
        if iter > 3 && (lambda - lambda_prev).abs() < 1e-12 * lambda.abs().max(1.0) {
            break;
        }
        lambda_prev = lambda;
        v = w;
    }
    if !lambda.is_finite() {
        return Err(Error::EigenDivergence(500));
    }
    let psi_sq: Vec<f64> = psi.iter().map(|p| p * p).collect();
    let inf_psi = psi_sq.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    let sup_psi = psi_sq.iter().fold(0.0f64, |m, &v| m.max(v));
    let bound = (std::f64::consts::PI / (2.0 * r)).powi(2) * inf_psi / sup_psi;
    Ok((lambda, bound))
}

/// Thomas solve for the positive-definite tridiagonal (diag, off).
fn thomas_pd(diag: &[f64], off: f64, rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = off / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let denom = diag[i] - off * c[i - 1];
        c[i] = off / denom;
        d[i] = (rhs[i] - off * d[i - 1]) / denom;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

/// C-infinity transition: 0 for t <= 0, 1 for t >= 1.
pub fn smooth_transition(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / t).exp();
        let b = (-1.0 / (1.0 - t)).exp();
        a / (a + b)
    }
}

/// Smoothed plateau: 1 on |x - center| <= half_width, C-infinity ramps of
/// the given width, 0 outside.
pub fn plateau_profile(
    grid: Grid,
    center: f64,
    half_width: f64,
    ramp: f64,
) -> Result<RealFunction> {
    RealFunction::from_fn(grid, Decay::VanishesAtBothEnds, |x| {
        smooth_transition((half_width + ramp - (x - center).abs()) / ramp)
    })
}

/// One row of the criticality demonstration: f_R = chi_R psi has
/// E_q(f_R) = O(1/R) while ||f_R||^2 ~ 2R.
#[derive(Debug, Clone, Copy)]
pub struct CriticalityRow {
    pub r: f64,
    pub energy: f64,
    pub norm_sq: f64,
}

pub fn criticality_demo(phi: &Diffeo, r_list: &[f64]) -> Result<Vec<CriticalityRow>> {
    let g = phi.grid();
    let q = bers_map(phi)?;
    let mut rows = Vec::with_capacity(r_list.len());
    for &r in r_list {
        if r >= g.x_max().min(-g.x_min()) {
            return Err(Error::InvalidGrid(format!("R = {r} outside the window")));
        }
        let ramp = r / 20.0;
        let chi = plateau_profile(g, 0.0, r - ramp, ramp)?;
        let f_vals: Vec<f64> = (0..g.n())
            .map(|i| chi.values()[i] * (1.0 + phi.h().values()[i]).powf(-0.5))
            .collect();
        let f = RealFunction::vanishing(g, f_vals)?;
        let f_d = f.derivative(1)?;
        let energy_integrand: Vec<f64> = (0..g.n())
            .map(|i| f_d.values()[i].powi(2) - q.q().values()[i] * f.values()[i].powi(2))
            .collect();
        let norm_integrand: Vec<f64> = f.values().iter().map(|v| v * v).collect();
        rows.push(CriticalityRow {
            r,
            energy: quad::simpson(&energy_integrand, g.h()),
            norm_sq: quad::simpson(&norm_integrand, g.h()),
        });
    }
    Ok(rows)
}

/// One row of the Fisher non-control experiment at fixed information I0.
#[derive(Debug, Clone, Copy)]
pub struct NoncontrolRow {
    pub lambda: f64,
    pub alpha: f64,
    pub fisher: f64,
    pub beta_plus_integral: f64,
    /// Sign changes of beta on the profile plateau.
    pub plateau_zero_count: usize,
}

/// Oscillatory family g = 1 + (alpha/lambda) profile(x) sin(lambda x) with
/// alpha calibrated by bisection so the Fisher information equals `i0` to
/// 1e-8; reports the positive part of beta and its plateau zero count.
///
/// `profile` must be a plateau-type cutoff with sup = 1 (the default is
/// half-width 4 with unit ramps); alpha stays below lambda/2 so g >= 1/2.
pub fn fisher_noncontrol_experiment(
    i0: f64,
    lambdas: &[f64],
    profile: &RealFunction,
    plateau_half_width: f64,
) -> Result<Vec<NoncontrolRow>> {
    if !(i0 > 0.0) {
        return Err(Error::InvalidExponent(i0, "I0 > 0"));
    }
    let g = profile.grid();
    let density_for = |lambda: f64, alpha: f64| -> Result<Density> {
        let gm1: Vec<f64> = (0..g.n())
            .map(|i| alpha / lambda * profile.values()[i] * (lambda * g.x(i)).sin())
            .collect();
        Density::new(RealFunction::vanishing(g, gm1)?)
    };
    let fisher_for = |lambda: f64, alpha: f64| -> Result<f64> {
        Ok(crate::projective::score(&density_for(lambda, alpha)?)?.fisher_information())
    };
    let mut rows = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let alpha_max = lambda / 2.0;
        if fisher_for(lambda, alpha_max)? < i0 {
            return Err(Error::BracketFailure(format!(
                "alpha_max = {alpha_max} too small to reach I0 = {i0} at lambda = {lambda}"
            )));
        }
        let mut lo = 0.0;
        let mut hi = alpha_max;
        let mut alpha = 0.5 * alpha_max;
        let mut fisher = 0.0;
        for _ in 0..200 {
            alpha = 0.5 * (lo + hi);
            fisher = fisher_for(lambda, alpha)?;
            if (fisher - i0).abs() < 1e-8 {
                break;
            }
            if fisher < i0 {
                lo = alpha;
            } else {
                hi = alpha;
            }
        }
        if (fisher - i0).abs() >= 1e-8 {
            return Err(Error::BracketFailure(format!(
                "bisection stalled at I = {fisher} (target {i0})"
            )));
        }
        let mu = density_for(lambda, alpha)?;
        let report = sign_report(&mu)?;
        let beta = beta_field(&mu)?;
        let plateau: Vec<f64> = (0..g.n())
            .filter(|&i| g.x(i).abs() <= plateau_half_width)
            .map(|i| beta.values()[i])
            .collect();
        rows.push(NoncontrolRow {
            lambda,
            alpha,
            fisher,
            beta_plus_integral: report.beta_plus_integral,
            plateau_zero_count: count_sign_changes(&plateau, SIGN_DEAD_BAND),
        });
    }
    Ok(rows)
}

/// The default oscillation profile: plateau half-width 4, unit ramps.
pub fn default_noncontrol_profile(grid: Grid) -> Result<RealFunction> {
    plateau_profile(grid, 0.0, 4.0, 1.0)
}
