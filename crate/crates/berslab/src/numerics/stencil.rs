//! Fourth-order finite-difference kernels on a uniform grid.
//!
//! Interior nodes use central stencils; the two layers at each end use
//! one-sided stencils of the same order, so the global truncation error is
//! O(h^4) uniformly. Higher orders are obtained by composing the first- and
//! second-derivative kernels.

/// First derivative, 4th order. Requires `n >= 5`.
pub fn d1(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    debug_assert!(n >= 5);
    let f = values;
    let mut out = vec![0.0; n];
    let c = 1.0 / (12.0 * h);
    out[0] = c * (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]);
    out[1] = c * (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]);
    for i in 2..n - 2 {
        out[i] = c * (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]);
    }
    out[n - 2] = -c * (-3.0 * f[n - 1] - 10.0 * f[n - 2] + 18.0 * f[n - 3] - 6.0 * f[n - 4] + f[n - 5]);
    out[n - 1] = -c * (-25.0 * f[n - 1] + 48.0 * f[n - 2] - 36.0 * f[n - 3] + 16.0 * f[n - 4] - 3.0 * f[n - 5]);
    out
}

/// Second derivative, 4th order. Requires `n >= 6`.
pub fn d2(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    debug_assert!(n >= 6);
    let f = values;
    let mut out = vec![0.0; n];
    let c = 1.0 / (12.0 * h * h);
    out[0] = c * (45.0 * f[0] - 154.0 * f[1] + 214.0 * f[2] - 156.0 * f[3] + 61.0 * f[4] - 10.0 * f[5]);
    out[1] = c * (10.0 * f[0] - 15.0 * f[1] - 4.0 * f[2] + 14.0 * f[3] - 6.0 * f[4] + f[5]);
    for i in 2..n - 2 {
        out[i] = c * (-f[i - 2] + 16.0 * f[i - 1] - 30.0 * f[i] + 16.0 * f[i + 1] - f[i + 2]);
    }
    out[n - 2] =
        c * (10.0 * f[n - 1] - 15.0 * f[n - 2] - 4.0 * f[n - 3] + 14.0 * f[n - 4] - 6.0 * f[n - 5] + f[n - 6]);
    out[n - 1] = c
        * (45.0 * f[n - 1] - 154.0 * f[n - 2] + 214.0 * f[n - 3] - 156.0 * f[n - 4] + 61.0 * f[n - 5]
            - 10.0 * f[n - 6]);
    out
}

/// k-th derivative by composing the base kernels.
pub fn dk(values: &[f64], h: f64, order: usize) -> Vec<f64> {
    match order {
        0 => values.to_vec(),
        1 => d1(values, h),
        2 => d2(values, h),
        _ => {
            let lower = dk(values, h, order - 2);
            d2(&lower, h)
        }
    }
}
