//! Attractive-repulsive power-law interaction energies
//! `E[mu] = 1/2 ∬ (|x-y|^alpha/alpha - |x-y|^beta/beta) dmu(x) dmu(y)`.
//!
//! * [`energy`]: kernel, brute-force pairwise energy and its `beta` derivatives.
//! * [`closed_forms`]: unit simplex, cross-polytope and spherical shell energies.
//! * [`bounds`]: concave and strongly concave interpolation lower bounds on the
//!   minimal energy as a function of `beta`.
//! * [`threshold`]: lower bounds on the `alpha` below which the unit simplex
//!   stops being the minimizer.
//! * [`minimizer`]: particle gradient descent with clustering and geometry
//!   diagnostics.
//! * [`cli`]: the `ienergy` command line front end.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod closed_forms;
pub mod energy;
pub mod error;
pub mod measure;
pub mod minimizer;
pub mod output;
pub mod params;
pub mod roots;
pub mod threshold;

pub use error::{Error, Result};
pub use measure::DiscreteMeasure;
pub use params::Params;
