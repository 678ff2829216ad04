//! Microwave-optical entanglement in a graphene-loaded capacitor.
//!
//! A voltage-biased graphene sheet between capacitor plates guides slow
//! surface plasmons. The microwave voltage on the plates modulates the sheet
//! conductivity, which converts an optical pump into two sidebands; the lower
//! sideband and the microwave field end up in a two-mode squeezed state whose
//! inseparability a determinant witness certifies.
//!
//! The pipeline runs in stages, one module each:
//!
//! * [`material`]: gate-tunable chemical potential and sheet conductivity.
//! * [`waveguide`]: guided-mode dispersion, losses, and confinement.
//! * [`coupling`]: microwave-to-sideband conversion rates for a finite guide.
//! * [`dynamics`]: the closed set of 14 field moments and its integration.
//! * [`entanglement`]: the determinant witness on the final moments.
//! * [`config`] / [`harness`] / [`emit`]: configuration, orchestration,
//!   sweeps and presets, and the CSV/JSON tables the CLI prints.

// `!(x > 0.0)` guards are deliberate: they reject NaN along with the wrong
// sign, which `x <= 0.0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Frozen oracle pins keep their full printed precision in test literals.
#![cfg_attr(test, allow(clippy::excessive_precision))]

pub mod config;
pub mod constants;
pub mod coupling;
pub mod dynamics;
pub mod emit;
pub mod entanglement;
pub mod error;
pub mod harness;
pub mod material;
pub mod waveguide;

pub use config::RunConfig;
pub use error::{Error, Result};
pub use harness::{run_single, sweep, RunResult};
