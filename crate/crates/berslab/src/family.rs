//! Built-in test families, addressable by name and parameters.
//!
//! `gauss_bump{a,c,s}` is the log-Jacobian u(x) = a exp(-((x-c)/s)^2) read as
//! a logarithmic-chart coordinate; `double_bump` superposes two of them;
//! `sampled{path}` ingests a CSV. The standard corpus used by the identity
//! checks is six gauss/double bumps that decay far below the boundary
//! tolerance on the default window.

use crate::diffeo::{phi_inf_inverse, Diffeo, LogCoord};
use crate::error::{Error, Result};
use crate::numerics::{Decay, Grid, RealFunction};

/// u(x) = a exp(-((x-c)/s)^2) as a logarithmic-chart coordinate.
pub fn gauss_bump_log(grid: Grid, a: f64, c: f64, s: f64) -> Result<LogCoord> {
    if !(s > 0.0) {
        return Err(Error::InvalidGrid(format!("gauss_bump width s = {s} must be positive")));
    }
    let u = RealFunction::from_fn(grid, Decay::VanishesAtBothEnds, |x| {
        let t = (x - c) / s;
        a * (-t * t).exp()
    })?;
    LogCoord::new(u)
}

/// The diffeomorphism with log phi' = a exp(-((x-c)/s)^2) on the default window.
pub fn gauss_bump(a: f64, c: f64, s: f64) -> Result<Diffeo> {
    gauss_bump_on(Grid::default_window(), a, c, s)
}

pub fn gauss_bump_on(grid: Grid, a: f64, c: f64, s: f64) -> Result<Diffeo> {
    phi_inf_inverse(&gauss_bump_log(grid, a, c, s)?)
}

/// Two-hump log-Jacobian: 0.4 e^{-((x-3)/1.5)^2} + 0.3 e^{-((x+2)/2)^2}.
/// Its Jacobian density has two maxima and one interior minimum.
pub fn double_bump() -> Result<Diffeo> {
    double_bump_on(Grid::default_window())
}

pub fn double_bump_on(grid: Grid) -> Result<Diffeo> {
    let u = RealFunction::from_fn(grid, Decay::VanishesAtBothEnds, |x| {
        let t1 = (x - 3.0) / 1.5;
        let t2 = (x + 2.0) / 2.0;
        0.4 * (-t1 * t1).exp() + 0.3 * (-t2 * t2).exp()
    })?;
    phi_inf_inverse(&LogCoord::new(u)?)
}

/// The six-element corpus used by the chart and cocycle checks.
pub fn corpus() -> Result<Vec<Diffeo>> {
    corpus_on(Grid::default_window())
}

pub fn corpus_on(grid: Grid) -> Result<Vec<Diffeo>> {
    Ok(vec![
        gauss_bump_on(grid, 0.5, 0.0, 1.0)?,
        gauss_bump_on(grid, -0.4, 1.0, 1.5)?,
        gauss_bump_on(grid, 0.8, -2.0, 1.2)?,
        gauss_bump_on(grid, 0.3, 3.0, 2.0)?,
        gauss_bump_on(grid, 1.0, 0.0, 2.0)?,
        double_bump_on(grid)?,
    ])
}

/// Parse a family spec of the form `name{p1,p2,...}` (or bare `name`).
pub fn parse_spec(spec: &str) -> Result<(String, Vec<String>)> {
    let spec = spec.trim();
    match spec.find('{') {
        None => Ok((spec.to_string(), Vec::new())),
        Some(open) => {
            if !spec.ends_with('}') {
                return Err(Error::Csv(format!("malformed family spec `{spec}`")));
            }
            let name = spec[..open].to_string();
            let inner = &spec[open + 1..spec.len() - 1];
            let params = if inner.is_empty() {
                Vec::new()
            } else {
                inner.split(',').map(|s| s.trim().to_string()).collect()
            };
            Ok((name, params))
        }
    }
}

/// Resolve a family spec to a diffeomorphism on the given grid.
///
/// `sampled{path}` reads a CSV of log-Jacobian samples.
pub fn resolve(spec: &str, grid: Grid) -> Result<Diffeo> {
    let (name, params) = parse_spec(spec)?;
    let num = |s: &String| -> Result<f64> {
        s.parse::<f64>().map_err(|e| Error::Csv(format!("family parameter `{s}`: {e}")))
    };
    match name.as_str() {
        "gauss_bump" => {
            if params.len() != 3 {
                return Err(Error::Csv("gauss_bump expects {a,c,s}".into()));
            }
            gauss_bump_on(grid, num(&params[0])?, num(&params[1])?, num(&params[2])?)
        }
        "double_bump" => double_bump_on(grid),
        "sampled" => {
            if params.len() != 1 {
                return Err(Error::Csv("sampled expects {path}".into()));
            }
            let u = RealFunction::from_csv(&params[0], grid, Decay::VanishesAtBothEnds)?;
            phi_inf_inverse(&LogCoord::new(u)?)
        }
        other => Err(Error::Csv(format!("unknown family `{other}`"))),
    }
}
