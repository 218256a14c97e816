//! Low-saturation amplitudes in the dressed-states picture.
//!
//! The atom plus coupling field is diagonalized to first order in
//! `Oc / (2 dc)`; the probe photon then scatters off the dressed states. In
//! Cascade-AT only one dressed state is reachable, so the amplitude is a
//! single resonance. In Cascade-EIT both are, giving two resonances.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::atom::{AtomRates, Configuration, DriveParams};
use crate::bare::{self, ResonancePair, SecondResonanceForm};
use crate::error::{Error, Result};

/// Largest admissible `|Oc / (2 dc)|`; caps the neglected normalization
/// correction of the first-order dressed states at about 10%.
pub const MAX_MIXING: f64 = 0.32;

const COMPARE_FLOOR: f64 = 1e-30;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DressedBasis {
    pub mixing: f64,
    pub e_a: f64,
    pub e_b: f64,
    pub gamma_a: f64,
    pub gamma_b: f64,
}

impl DressedBasis {
    pub fn new(rates: &AtomRates, drive: &DriveParams) -> Result<Self> {
        if drive.delta_c == 0.0 {
            return Err(Error::DegenerateRegime(
                "dressed expansion requires a detuned coupling field (delta_c != 0)",
            ));
        }
        let mixing = drive.omega_c / (2.0 * drive.delta_c);
        if mixing.abs() > MAX_MIXING {
            return Err(Error::RegimeViolation(format!(
                "|Omega_c / (2 delta_c)| = {:.4} exceeds {MAX_MIXING}",
                mixing.abs()
            )));
        }
        let (gamma_a, gamma_b) = match drive.config {
            Configuration::At => (0.0, rates.w21),
            Configuration::Eit => (rates.gamma12, rates.gamma13),
        };
        Ok(Self {
            mixing,
            e_a: 0.0,
            e_b: -drive.delta_c,
            gamma_a,
            gamma_b,
        })
    }
}

/// Cascade-AT amplitude `(Oc/(2 dc))^2 / (dp + dc + i g13)`, unit prefactor.
/// It is a single resonance; there is nothing to interfere with.
pub fn at_amplitude(rates: &AtomRates, drive: &DriveParams) -> Result<C64> {
    drive.require(Configuration::At)?;
    let basis = DressedBasis::new(rates, drive)?;
    let pole = C64::new(drive.delta_p + drive.delta_c, rates.gamma13);
    if pole.norm() == 0.0 {
        return Err(Error::SingularDenominator(0.0));
    }
    Ok(basis.mixing * basis.mixing / pole)
}

/// Cascade-EIT amplitude: `r1 = 1/(dp + i g12)` through the dressed state
/// |a>, `r2 = (Oc/(2 dc))^2 / (dp + dc + i g13)` through |b>.
pub fn eit_dressed_amplitude(rates: &AtomRates, drive: &DriveParams) -> Result<ResonancePair> {
    drive.require(Configuration::Eit)?;
    let basis = DressedBasis::new(rates, drive)?;
    let first = C64::new(drive.delta_p, rates.gamma12);
    let second = C64::new(drive.delta_p + drive.delta_c, rates.gamma13);
    if first.norm() == 0.0 || second.norm() == 0.0 {
        return Err(Error::SingularDenominator(0.0));
    }
    Ok(ResonancePair::new(
        1.0 / first,
        basis.mixing * basis.mixing / second,
    ))
}

/// Relative divergence between the bare-picture low-saturation amplitude and
/// the dressed-picture amplitude.
pub fn compare_pictures(rates: &AtomRates, drive: &DriveParams) -> Result<f64> {
    let dressed = eit_dressed_amplitude(rates, drive)?.total;
    let bare = bare::approx_resonances(rates, drive, SecondResonanceForm::PreSubstitution)?.total;
    Ok((bare - dressed).norm() / bare.norm().max(COMPARE_FLOOR))
}
