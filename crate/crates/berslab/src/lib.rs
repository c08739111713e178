//! berslab: a numerical laboratory for the real Bers embedding on the line.
//!
//! The crate linearizes the decay-controlled diffeomorphism group through
//! p-root charts, realizes the Schwarzian as a projective curvature and a
//! score curvature on densities, maps diffeomorphisms to Schrodinger
//! potentials through the Bers map, runs 1-D scattering on those potentials,
//! and checks every quantitative identity along the way as a machine-readable
//! residual.
//!
//! Module map:
//! - [`numerics`]: grids, 4th-order differentiation, quadrature, norms
//! - [`diffeo`]: the diffeomorphism group, p-root charts, Jacobian densities
//! - [`geometry`]: distances, explicit geodesics, strain/Riccati dynamics
//! - [`projective`]: Schwarzian and L^p-Schwarzian operators, score/Fisher
//! - [`cocycle`]: Gelfand-Fuchs, Bott, and p-root Bott-Thurston cocycles
//! - [`bers`]: the Bers map, Miura factorization, canonical reconstruction
//! - [`scattering`]: Jost solutions, reflection data, trace identities
//! - [`diagnostics`]: sign-change, Hardy, and Fisher non-control checks
//! - [`family`]: named test families (`gauss_bump{a,c,s}`, `double_bump`, ...)
//!
//! ```
//! use berslab::bers::{bers_map, reconstruct_diffeo};
//! use berslab::family;
//!
//! // Chart a diffeomorphism, map it to its potential, reconstruct it back.
//! let phi = family::gauss_bump(0.5, 0.0, 1.0)?;
//! let q = bers_map(&phi)?;
//! let back = reconstruct_diffeo(&q)?;
//! let residual = back.h().sub(phi.h())?.sup_norm();
//! assert!(residual < 1e-6);
//! # Ok::<(), berslab::Error>(())
//! ```

// `!(x > 0.0)` is the NaN-rejecting form of a positivity guard; keep it.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod numerics;
pub mod rng;

pub mod bers;
pub mod cocycle;
pub mod diagnostics;
pub mod diffeo;
pub mod family;
pub mod geometry;
pub mod projective;
pub mod scattering;

pub use error::{Error, Result};
pub use numerics::{ComplexFunction, Decay, Grid, RealFunction};
