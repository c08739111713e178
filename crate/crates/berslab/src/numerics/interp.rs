//! Interpolation on uniform grids: local Lagrange (cubic, quintic) for smooth
//! decaying fields and a monotonicity-filtered Hermite evaluator for
//! diffeomorphism samples.

/// Locate the cell index i with x in [x_i, x_{i+1}], clamped to the grid.
fn cell(x_min: f64, h: f64, n: usize, x: f64) -> usize {
    let i = ((x - x_min) / h).floor() as isize;
    i.clamp(0, n as isize - 2) as usize
}

/// Local 4-point Lagrange cubic. Out-of-range points take the end value.
pub fn cubic(x_min: f64, h: f64, values: &[f64], x: f64) -> f64 {
    let n = values.len();
    if x <= x_min {
        return values[0];
    }
    let x_max = x_min + h * (n - 1) as f64;
    if x >= x_max {
        return values[n - 1];
    }
    let i = cell(x_min, h, n, x);
    let j0 = i.saturating_sub(1).min(n - 4);
    let t = (x - (x_min + h * j0 as f64)) / h;
    lagrange(&values[j0..j0 + 4], t)
}

/// Local 6-point Lagrange quintic; used where O(h^6) accuracy is needed
/// (potential tables for Runge-Kutta sub-steps).
pub fn quintic(x_min: f64, h: f64, values: &[f64], x: f64) -> f64 {
    let n = values.len();
    if x <= x_min {
        return values[0];
    }
    let x_max = x_min + h * (n - 1) as f64;
    if x >= x_max {
        return values[n - 1];
    }
    let i = cell(x_min, h, n, x);
    let j0 = i.saturating_sub(2).min(n - 6);
    let t = (x - (x_min + h * j0 as f64)) / h;
    lagrange(&values[j0..j0 + 6], t)
}

/// Lagrange interpolation at integer nodes 0..m-1 evaluated at t.
fn lagrange(stencil: &[f64], t: f64) -> f64 {
    let m = stencil.len();
    let mut acc = 0.0;
    for j in 0..m {
        let mut basis = 1.0;
        for k in 0..m {
            if k != j {
                basis *= (t - k as f64) / (j as f64 - k as f64);
            }
        }
        acc += stencil[j] * basis;
    }
    acc
}

/// Cubic Hermite evaluation with a Fritsch-Carlson limiter on the slopes.
///
/// Data must be strictly increasing; the limiter clamps slope pairs outside
/// the monotonicity circle of radius 3, so the interpolant is monotone. With
/// accurate slopes on smooth monotone data the limiter stays inactive and the
/// scheme is 4th-order.
pub struct MonotoneHermite {
    x_min: f64,
    h: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneHermite {
    pub fn new(x_min: f64, h: f64, values: Vec<f64>, mut slopes: Vec<f64>) -> Self {
        let n = values.len();
        assert_eq!(n, slopes.len());
        for i in 0..n - 1 {
            let secant = (values[i + 1] - values[i]) / h;
            if secant <= 0.0 {
                slopes[i] = slopes[i].max(0.0);
                slopes[i + 1] = slopes[i + 1].max(0.0);
                continue;
            }
            let alpha = slopes[i] / secant;
            let beta = slopes[i + 1] / secant;
            let r = (alpha * alpha + beta * beta).sqrt();
            if r > 3.0 {
                let scale = 3.0 / r;
                slopes[i] *= scale;
                slopes[i + 1] *= scale;
            }
        }
        Self { x_min, h, values, slopes }
    }

    /// Evaluate inside the grid; callers handle extension beyond it.
    pub fn eval(&self, x: f64) -> f64 {
        self.eval_with_derivative(x).0
    }

    /// Value and derivative of the interpolant (for Newton root polishing).
    pub fn eval_with_derivative(&self, x: f64) -> (f64, f64) {
        let n = self.values.len();
        let i = cell(self.x_min, self.h, n, x);
        let t = (x - (self.x_min + self.h * i as f64)) / self.h;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.slopes[i] * self.h, self.slopes[i + 1] * self.h);
        let t2 = t * t;
        let t3 = t2 * t;
        let value = y0 * (2.0 * t3 - 3.0 * t2 + 1.0)
            + m0 * (t3 - 2.0 * t2 + t)
            + y1 * (-2.0 * t3 + 3.0 * t2)
            + m1 * (t3 - t2);
        let deriv = (y0 * (6.0 * t2 - 6.0 * t)
            + m0 * (3.0 * t2 - 4.0 * t + 1.0)
            + y1 * (6.0 * t - 6.0 * t2)
            + m1 * (3.0 * t2 - 2.0 * t))
            / self.h;
        (value, deriv)
    }
}
