//! Link models for ultra-wideband (S+C+L) WDM transmission planning.
//!
//! The crate is `no_std` (it needs `alloc`) and holds every numeric model of
//! the planning pipeline:
//!
//! * [`spectral`] builds the channel grid, launch tilt and WSS notch plans.
//! * [`fibre`] propagates channel powers through a span with wavelength
//!   dependent loss, point losses and inter-channel stimulated Raman
//!   scattering (ISRS).
//! * [`amplifier`] models lumped TDFA/EDFA gain, output clamping and ASE.
//! * [`nli`] estimates nonlinear interference with a closed-form ISRS
//!   Gaussian-noise model and a numeric double-integral reference.
//! * [`snr`] combines noise contributions, emulates the notch sweep and maps
//!   SNR to Shannon rates.
//! * [`gmi`] evaluates bit-metric GMI by Monte Carlo and turns it into
//!   achievable and decoded rates.
//! * [`tilt`] grid-searches the launch pre-tilt and band-edge trims.
//!
//! [`link`] chains the models into the end-to-end estimate used by the
//! optimizer and the command-line front end.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod amplifier;
mod error;
pub mod events;
pub mod fibre;
pub mod gmi;
pub mod link;
pub mod nli;
pub mod quadrature;
pub mod shaping;
pub mod snr;
pub mod spectral;
pub mod tilt;
pub mod units;

pub use error::{Error, Result};
pub use events::Event;
pub use spectral::{Band, BandName, Channel, ChannelPlan, LaunchProfile, NotchPlan};
