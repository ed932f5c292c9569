//! Numerical toolkit for the exponential family `f_a(z) = e^z + a` and for
//! Fatou's function `z + 1 + e^{-z}`.
//!
//! The crate is organised bottom-up:
//!
//! - [`growth`]: the iterated exponential `F(t) = e^t - 1`, the maximum
//!   modulus `M(r)` and its iterates, and the growth inequalities.
//! - [`orbit`]: orbits with running error bounds, attracting cycles and
//!   point classification.
//! - [`trap`]: access arcs, trap sets and separation certificates.
//! - [`hairs`]: dynamic rays traced by inverse branches.
//! - [`fatou`]: Fatou's function and its conjugate maps.
//! - [`raster`]: binary masks, complement components and the spider's-web
//!   verdict.
//! - [`render`]: deterministic RGB images of the dynamical plane.

pub mod error;
pub mod fatou;
pub mod growth;
pub mod hairs;
pub mod orbit;
pub mod raster;
pub mod render;
pub mod trap;

pub use error::{Error, Result};
pub use growth::{GrowthConstants, IteratedModulus, Parameter, TowerValue};
pub use orbit::{Classifier, Cycle, CycleKind, Label, Orbit, PointClass};

/// Version string written into every JSON artefact.
pub const TOOL_VERSION: &str = concat!("expoweb ", env!("CARGO_PKG_VERSION"));
