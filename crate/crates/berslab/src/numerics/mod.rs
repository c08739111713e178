//! Grid, differentiation, integration, and norm infrastructure for functions
//! on the line whose derivatives of all orders are integrable, truncated to a
//! finite window.
//!
//! The default window is [-20, 20] with 4001 samples (h = 0.01); every test
//! family decays at least like a Gaussian, so the truncation error sits far
//! below the quadrature error. All values are immutable after construction
//! and every operation is a pure function of its inputs.

pub mod interp;
pub mod quad;
pub mod stencil;

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::fs;
use std::path::Path;

/// Default tolerance for the decay-tag checks at the window ends.
pub const BOUNDARY_TOL: f64 = 1e-8;

/// Uniformly sampled window on the line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n: usize,
    h: f64,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_min < x_max) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidGrid(format!("window [{x_min}, {x_max}]")));
        }
        if n < 16 {
            return Err(Error::InvalidGrid(format!("n = {n} < 16")));
        }
        let h = (x_max - x_min) / (n - 1) as f64;
        Ok(Self { x_min, x_max, n, h })
    }

    /// The default window [-20, 20] with h = 0.01.
    pub fn default_window() -> Self {
        Self::new(-20.0, 20.0, 4001).expect("default window is valid")
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }
    pub fn x_max(&self) -> f64 {
        self.x_max
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn h(&self) -> f64 {
        self.h
    }
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + self.h * i as f64
    }
    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|i| self.x(i))
    }
}

/// Decay class of a sampled function at the window ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decay {
    VanishesAtBothEnds,
    TendsToOneAtBothEnds,
    Unrestricted,
}

impl Decay {
    fn name(self) -> &'static str {
        match self {
            Decay::VanishesAtBothEnds => "VanishesAtBothEnds",
            Decay::TendsToOneAtBothEnds => "TendsToOneAtBothEnds",
            Decay::Unrestricted => "Unrestricted",
        }
    }
}

/// Real-valued function sampled on a [`Grid`], tagged with its decay class.
#[derive(Debug, Clone)]
pub struct RealFunction {
    grid: Grid,
    values: Vec<f64>,
    decay: Decay,
}

impl RealFunction {
    /// Validating constructor with the default boundary tolerance.
    pub fn new(grid: Grid, values: Vec<f64>, decay: Decay) -> Result<Self> {
        Self::with_boundary_tol(grid, values, decay, BOUNDARY_TOL)
    }

    /// Validating constructor; rejects violating data rather than clamping.
    pub fn with_boundary_tol(grid: Grid, values: Vec<f64>, decay: Decay, tol: f64) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::InvalidGrid(format!(
                "sample count {} does not match grid n = {}",
                values.len(),
                grid.n
            )));
        }
        for (idx, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { idx, value: v });
            }
        }
        let (left, right) = (values[0], values[grid.n - 1]);
        match decay {
            Decay::VanishesAtBothEnds => {
                if left.abs() > tol {
                    return Err(Error::DecayViolation { end: "left", found: left, tol });
                }
                if right.abs() > tol {
                    return Err(Error::DecayViolation { end: "right", found: right, tol });
                }
            }
            Decay::TendsToOneAtBothEnds => {
                if (left - 1.0).abs() > tol {
                    return Err(Error::DecayViolation { end: "left", found: left - 1.0, tol });
                }
                if (right - 1.0).abs() > tol {
                    return Err(Error::DecayViolation { end: "right", found: right - 1.0, tol });
                }
            }
            Decay::Unrestricted => {}
        }
        Ok(Self { grid, values, decay })
    }

    pub fn from_fn(grid: Grid, decay: Decay, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.xs().map(f).collect();
        Self::new(grid, values, decay)
    }

    /// Vanishing-tagged samples (the common case for perturbations).
    pub fn vanishing(grid: Grid, values: Vec<f64>) -> Result<Self> {
        Self::new(grid, values, Decay::VanishesAtBothEnds)
    }

    /// Untagged samples; always accepted if finite.
    pub fn unrestricted(grid: Grid, values: Vec<f64>) -> Result<Self> {
        Self::new(grid, values, Decay::Unrestricted)
    }

    pub fn zeros(grid: Grid) -> Self {
        Self { grid, values: vec![0.0; grid.n], decay: Decay::VanishesAtBothEnds }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn decay(&self) -> Decay {
        self.decay
    }

    /// Pointwise map; the caller states the decay class of the result.
    pub fn map(&self, decay: Decay, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.grid, self.values.iter().map(|&v| f(v)).collect(), decay)
    }

    /// Pointwise map with a relaxed boundary tolerance, for derived fields
    /// whose decay tag is bookkeeping rather than a contract.
    pub fn map_with_tol(&self, decay: Decay, tol: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::with_boundary_tol(self.grid, self.values.iter().map(|&v| f(v)).collect(), decay, tol)
    }

    /// Pointwise combination with another function on the same grid.
    pub fn zip(&self, other: &Self, decay: Decay, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        assert_eq!(self.grid, other.grid, "grid mismatch in zip");
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Self::new(self.grid, values, decay)
    }

    /// Pointwise combination with a relaxed boundary tolerance.
    pub fn zip_with_tol(
        &self,
        other: &Self,
        decay: Decay,
        tol: f64,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        assert_eq!(self.grid, other.grid, "grid mismatch in zip");
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Self::with_boundary_tol(self.grid, values, decay, tol)
    }

    /// Pointwise difference, tagged `Unrestricted`: differences are residual
    /// material and small end values should not be re-gated.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, Decay::Unrestricted, |a, b| a - b)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, &v| m.max(v.abs()))
    }

    /// k-th derivative by 4th-order finite differences.
    ///
    /// The result is tagged `VanishesAtBothEnds` when the input decays (the
    /// derivative of a constant tail is zero) and `Unrestricted` otherwise.
    pub fn derivative(&self, order: usize) -> Result<Self> {
        if order == 0 {
            return Ok(self.clone());
        }
        if order * 4 >= self.grid.n {
            return Err(Error::GridTooCoarse { order, n: self.grid.n });
        }
        let out = stencil::dk(&self.values, self.grid.h, order);
        let decay = match self.decay {
            Decay::VanishesAtBothEnds | Decay::TendsToOneAtBothEnds => Decay::VanishesAtBothEnds,
            Decay::Unrestricted => Decay::Unrestricted,
        };
        // Derivatives of decayed tails are below tolerance by construction,
        // but validate anyway so a mis-tagged input surfaces here.
        Self::with_boundary_tol(self.grid, out, decay, 1e-6)
    }

    /// Window integral by composite Simpson (exact for cubics).
    pub fn integral(&self) -> f64 {
        quad::simpson(&self.values, self.grid.h)
    }

    /// L^p norm, sup-norm for p = infinity.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if p.is_infinite() && p > 0.0 {
            return Ok(self.sup_norm());
        }
        if !(p >= 1.0) {
            return Err(Error::InvalidExponent(p, "p >= 1 or p = infinity"));
        }
        let powed: Vec<f64> = self.values.iter().map(|v| v.abs().powf(p)).collect();
        Ok(quad::simpson(&powed, self.grid.h).max(0.0).powf(1.0 / p))
    }

    /// W^{k,1} seminorm: the L^1 norm of the k-th derivative.
    pub fn wk1_seminorm(&self, k: usize) -> Result<f64> {
        let dk = self.derivative(k)?;
        dk.lp_norm(1.0)
    }

    /// Primitive F with F(x_min) = 0 and F' = f.
    ///
    /// Requires the vanishing tag so the missing left tail is negligible.
    /// Uses the endpoint-corrected cumulative rule (O(h^6) pointwise).
    pub fn cumulative_integral(&self) -> Result<Self> {
        if self.decay != Decay::VanishesAtBothEnds {
            return Err(Error::WrongDecay {
                expected: Decay::VanishesAtBothEnds.name(),
                got: self.decay.name(),
            });
        }
        let out = quad::cumulative(&self.values, self.grid.h);
        Self::new(self.grid, out, Decay::Unrestricted)
    }

    /// Primitive without the decay-tag gate, for integrands that settle to a
    /// nonzero constant on the right (Volterra right inverse, transport terms).
    pub(crate) fn cumulative_raw(&self) -> Self {
        let out = quad::cumulative(&self.values, self.grid.h);
        Self { grid: self.grid, values: out, decay: Decay::Unrestricted }
    }

    /// Local cubic interpolation at an arbitrary point, extended by the
    /// decay-appropriate constant outside the window.
    pub fn eval(&self, x: f64) -> f64 {
        if x < self.grid.x_min {
            return match self.decay {
                Decay::VanishesAtBothEnds => 0.0,
                Decay::TendsToOneAtBothEnds => 1.0,
                Decay::Unrestricted => self.values[0],
            };
        }
        if x > self.grid.x_max {
            return match self.decay {
                Decay::VanishesAtBothEnds => 0.0,
                Decay::TendsToOneAtBothEnds => 1.0,
                Decay::Unrestricted => self.values[self.grid.n - 1],
            };
        }
        interp::cubic(self.grid.x_min, self.grid.h, &self.values, x)
    }

    /// Ingest a two-column `x,value` CSV with strictly increasing uniform x,
    /// resampled onto `grid` by cubic interpolation. Points outside the CSV
    /// range take the nearest sample value.
    pub fn from_csv(path: impl AsRef<Path>, grid: Grid, decay: Decay) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let (xs, ys) = parse_xy_csv(&text)?;
        let h_in = xs[1] - xs[0];
        let values: Vec<f64> = grid
            .xs()
            .map(|x| interp::cubic(xs[0], h_in, &ys, x))
            .collect();
        Self::new(grid, values, decay)
    }
}

fn parse_xy_csv(text: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let a = parts.next().ok_or_else(|| Error::Csv(format!("line {}: empty", lineno + 1)))?;
        let b = parts
            .next()
            .ok_or_else(|| Error::Csv(format!("line {}: missing value column", lineno + 1)))?;
        if parts.next().is_some() {
            return Err(Error::Csv(format!("line {}: more than two columns", lineno + 1)));
        }
        // Tolerate a single header row.
        if lineno == 0 && a.trim().parse::<f64>().is_err() {
            continue;
        }
        let x: f64 = a
            .trim()
            .parse()
            .map_err(|e| Error::Csv(format!("line {}: bad x ({e})", lineno + 1)))?;
        let y: f64 = b
            .trim()
            .parse()
            .map_err(|e| Error::Csv(format!("line {}: bad value ({e})", lineno + 1)))?;
        xs.push(x);
        ys.push(y);
    }
    if xs.len() < 8 {
        return Err(Error::Csv(format!("only {} samples", xs.len())));
    }
    let h = xs[1] - xs[0];
    if !(h > 0.0) {
        return Err(Error::Csv("x must be strictly increasing".into()));
    }
    let span = xs[xs.len() - 1] - xs[0];
    for i in 1..xs.len() {
        let expected = xs[0] + h * i as f64;
        if (xs[i] - expected).abs() > 1e-9 * span.max(1.0) {
            return Err(Error::Csv(format!("x is not uniform at row {}", i + 1)));
        }
    }
    Ok((xs, ys))
}

/// Complex-valued samples on a [`Grid`] (Jost profiles in x).
#[derive(Debug, Clone)]
pub struct ComplexFunction {
    grid: Grid,
    values: Vec<Complex64>,
}

impl ComplexFunction {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::InvalidGrid(format!(
                "sample count {} does not match grid n = {}",
                values.len(),
                grid.n
            )));
        }
        for (idx, v) in values.iter().enumerate() {
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::NonFinite { idx, value: v.norm() });
            }
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn derivative(&self, order: usize) -> Result<Self> {
        if order * 4 >= self.grid.n {
            return Err(Error::GridTooCoarse { order, n: self.grid.n });
        }
        let re: Vec<f64> = self.values.iter().map(|v| v.re).collect();
        let im: Vec<f64> = self.values.iter().map(|v| v.im).collect();
        let dre = stencil::dk(&re, self.grid.h, order);
        let dim = stencil::dk(&im, self.grid.h, order);
        let values = dre.into_iter().zip(dim).map(|(a, b)| Complex64::new(a, b)).collect();
        Self::new(self.grid, values)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.norm()))
    }
}
