//! Quadrature kernels: composite Simpson on the window, an endpoint-corrected
//! cumulative rule, and Gauss-Legendre nodes for path-length integrals.

use super::stencil;

/// Composite Simpson over the full window. Exact for cubics. A trailing
/// Simpson-3/8 block absorbs an odd cell count.
pub fn simpson(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    assert!(n >= 4, "simpson needs at least 4 samples");
    let cells = n - 1;
    let (pair_end, tail38) = if cells % 2 == 0 { (n - 1, false) } else { (n - 4, true) };
    let mut acc = 0.0;
    let mut i = 0;
    while i + 2 <= pair_end {
        acc += values[i] + 4.0 * values[i + 1] + values[i + 2];
        i += 2;
    }
    let mut total = acc * h / 3.0;
    if tail38 {
        total += 3.0 * h / 8.0
            * (values[n - 4] + 3.0 * values[n - 3] + 3.0 * values[n - 2] + values[n - 1]);
    }
    total
}

/// Cumulative integral F with F[0] = 0 and F' = f.
///
/// Cumulative trapezoid plus Euler-Maclaurin endpoint corrections through
/// h^4 (the f' and f''' terms at the moving cut), so the pointwise error is
/// O(h^6) for smooth integrands. The corrections use the same 4th-order
/// stencils as `derivative`.
pub fn cumulative(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 8, "cumulative integral needs at least 8 samples");
    let d1 = stencil::d1(values, h);
    let d3 = stencil::dk(values, h, 3);
    let mut out = vec![0.0; n];
    let mut trapz = 0.0;
    let c2 = h * h / 12.0;
    let c4 = h.powi(4) / 720.0;
    for i in 1..n {
        trapz += 0.5 * h * (values[i - 1] + values[i]);
        out[i] = trapz - c2 * (d1[i] - d1[0]) + c4 * (d3[i] - d3[0]);
    }
    out
}

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}
