//! Collective spontaneous emission of two identical two-level emitters
//! prepared in a symmetric or antisymmetric Dicke state, in free space or
//! above a perfectly reflecting plate.
//!
//! Rates are computed from the imaginary part of the dyadic Green's tensor
//! of the environment ([`green`], [`rates`]) and cross-checked by two
//! independent quadrature oracles ([`oracle`]). [`scenarios`] turns sweeps
//! and figure presets into CSV/SVG datasets and [`cli`] exposes all of it on
//! the command line.

#[cfg(feature = "cli")]
pub mod cli;
pub mod error;
pub mod green;
pub mod model;
pub mod oracle;
pub mod rates;
pub mod scenarios;
#[cfg(feature = "cli")]
pub mod validate;

pub use error::{Error, Result};
pub use model::{
    transition_wavelength, AngularFrequency, Atom, DickeParity, DipoleVector, Environment, PairConfig,
    PhysicalConstants, Position3, RateResult,
};
