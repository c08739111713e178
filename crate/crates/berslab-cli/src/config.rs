//! Run configuration: JSON file merged with command-line overrides.
//! Unknown keys are rejected.

use berslab::scattering::KGrid;
use berslab::Grid;
use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::PathBuf;

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub kgrid: KGridConfig,
    /// Family spec, e.g. `gauss_bump{0.5,0,1}`.
    #[serde(default)]
    pub family: Option<String>,
    /// Per-check tolerance overrides, keyed by check name.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { x_min: -20.0, x_max: 20.0, n: 4001 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KGridConfig {
    pub k_min: f64,
    pub k_max: f64,
    pub n_k: usize,
}

impl Default for KGridConfig {
    fn default() -> Self {
        Self { k_min: 1e-3, k_max: 40.0, n_k: 512 }
    }
}

impl RunConfig {
    pub fn grid(&self) -> Result<Grid, berslab::Error> {
        Grid::new(self.grid.x_min, self.grid.x_max, self.grid.n)
    }

    pub fn kgrid(&self) -> Result<KGrid, berslab::Error> {
        KGrid::new(self.kgrid.k_min, self.kgrid.k_max, self.kgrid.n_k)
    }

    pub fn family_spec(&self) -> &str {
        self.family.as_deref().unwrap_or("gauss_bump{0.5,0,1}")
    }

    pub fn tolerance(&self, check: &str, default: f64) -> f64 {
        self.tolerances.get(check).copied().unwrap_or(default)
    }
}
