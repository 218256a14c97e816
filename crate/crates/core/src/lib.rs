//! Probe-absorption spectra and scattering-amplitude resonance
//! decompositions for three-level cascade atoms.
//!
//! Two driving configurations are supported. In Cascade-EIT the probe drives
//! the lower transition and the coupling field the upper one; in Cascade-AT
//! the roles are reversed. The steady-state spectra of both look alike, but
//! the scattering amplitude of Cascade-EIT is a sum of two resonances that
//! interfere destructively at line center, while Cascade-AT has a single
//! resonance.
//!
//! Units: hbar = 1 and every rate, Rabi frequency and detuning is expressed
//! in one arbitrary common unit. Overall amplitude prefactors are set to one.

pub mod analysis;
pub mod atom;
pub mod bare;
pub mod cli;
pub mod config;
pub mod dressed;
pub mod error;
pub mod io;
pub mod steady_state;
pub mod verify;

pub use atom::{AtomRates, Configuration, DriveParams};
pub use bare::{EigenPair, ResolventSubspace, ResonancePair};
pub use error::{Error, Result};
pub use steady_state::SpectrumSeries;
