//! Weak-value state reconstruction for a single optical mode.
//!
//! A system mode is mixed with a vacuum meter on a weakly reflecting beam
//! splitter. Homodyne readout of the system momentum `P` and the meter
//! position `x` gives the momentum distribution `|ψ(P)|²` and, through the
//! postselected meter mean `E[x_M | P] ≈ θ·Re X_w(P) = −θ·dφ/dP`, the phase
//! of `ψ(P)`.
//!
//! Modules, bottom-up:
//! - [`grid`], [`fourier`], [`state`], [`wigner`]: sampled wavefunctions,
//!   coherent-state superpositions, quadrature transforms and Wigner functions.
//! - [`coupler`]: exact beam-splitter action, postselection statistics, weak values.
//! - [`sampler`]: Monte Carlo homodyne records, binning and gap detection.
//! - [`reconstructor`]: modulus and phase reconstruction and the error `δ`.
//! - [`pipeline`]: end-to-end runs, sweeps and run artifacts.

pub mod bins;
pub mod coupler;
pub mod error;
pub mod fourier;
pub mod grid;
pub mod io;
pub mod pipeline;
pub mod reconstructor;
pub mod sampler;
pub mod state;
pub mod wigner;

pub use error::{Error, Result};
