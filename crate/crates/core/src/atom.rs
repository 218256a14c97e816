//! Atomic parameters of the three-level cascade system.
//!
//! Levels are |1> (ground), |2> (intermediate) and |3> (upper). All rates and
//! frequencies share one arbitrary unit with hbar = 1.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Saturation margin above which the perturbative pathway analysis is no
/// longer trusted. Exceeding it produces a warning only.
pub const LOW_SATURATION_THRESHOLD: f64 = 0.1;

/// Spontaneous decay rates and the polarization decay rates derived from them.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomRates {
    pub w21: f64,
    pub w31: f64,
    pub w32: f64,
    pub gamma12: f64,
    pub gamma13: f64,
    pub gamma23: f64,
}

impl AtomRates {
    pub fn from_decay_rates(w21: f64, w31: f64, w32: f64) -> Result<Self> {
        let (gamma12, gamma13, gamma23) = polarization_rates(w21, w31, w32)?;
        Ok(Self {
            w21,
            w31,
            w32,
            gamma12,
            gamma13,
            gamma23,
        })
    }

    /// Builds rates from a polarization triple. The triple must satisfy
    /// `gamma23 = gamma12 + gamma13` to within `tol`; the decay rates are
    /// reconstructed with the whole upper-level decay assigned to `w32`.
    pub fn from_polarization(gamma12: f64, gamma13: f64, gamma23: f64, tol: f64) -> Result<Self> {
        if !(gamma12 >= 0.0 && gamma13 >= 0.0 && gamma23 >= 0.0) {
            return Err(Error::Domain(format!(
                "polarization rates must be non-negative, got ({gamma12}, {gamma13}, {gamma23})"
            )));
        }
        let mismatch = gamma23 - gamma12 - gamma13;
        if mismatch.abs() > tol {
            return Err(Error::Domain(format!(
                "polarization rates violate gamma23 = gamma12 + gamma13: \
                 {gamma23} != {gamma12} + {gamma13} (mismatch {mismatch:e})"
            )));
        }
        Ok(Self {
            w21: 2.0 * gamma12,
            w31: 0.0,
            w32: 2.0 * gamma13,
            gamma12,
            gamma13,
            gamma23: gamma12 + gamma13,
        })
    }

    /// Rates used for both curves of the reference absorption figure:
    /// gamma = (0.5, 0.105, 0.605). Only `w31 + w32 = 0.21` is fixed; the split
    /// is arbitrary.
    pub fn figure_preset() -> Self {
        Self::from_decay_rates(1.0, 0.06, 0.15).expect("preset rates are valid")
    }

    /// Multiplies every rate by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::from_decay_rates(self.w21 * factor, self.w31 * factor, self.w32 * factor)
    }
}

/// Which transition the probe and coupling fields drive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Configuration {
    /// Probe on |1>-|2>, coupling on |2>-|3>.
    #[serde(alias = "cascade-eit")]
    Eit,
    /// Coupling on |1>-|2>, probe on |2>-|3>.
    #[serde(alias = "cascade-at")]
    At,
}

impl std::fmt::Display for Configuration {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Configuration::Eit => f.write_str("eit"),
            Configuration::At => f.write_str("at"),
        }
    }
}

impl std::str::FromStr for Configuration {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "eit" | "cascade-eit" => Ok(Configuration::Eit),
            "at" | "cascade-at" => Ok(Configuration::At),
            other => Err(Error::Domain(format!("unknown configuration '{other}'"))),
        }
    }
}

/// Field parameters. For EIT, `delta_c = wc - w23` and `delta_p = wp - w12`;
/// for AT the roles of the two transitions are swapped.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriveParams {
    pub config: Configuration,
    pub omega_c: f64,
    pub delta_c: f64,
    pub delta_p: f64,
}

impl DriveParams {
    /// `omega_c` is stored as its modulus; only its square enters any formula.
    pub fn new(config: Configuration, omega_c: f64, delta_c: f64, delta_p: f64) -> Result<Self> {
        if !omega_c.is_finite() || !delta_c.is_finite() || !delta_p.is_finite() {
            return Err(Error::Domain("drive parameters must be finite".into()));
        }
        Ok(Self {
            config,
            omega_c: omega_c.abs(),
            delta_c,
            delta_p,
        })
    }

    pub fn with_delta_p(self, delta_p: f64) -> Self {
        Self { delta_p, ..self }
    }

    pub fn with_omega_c(self, omega_c: f64) -> Self {
        Self {
            omega_c: omega_c.abs(),
            ..self
        }
    }

    pub fn require(&self, expected: Configuration) -> Result<()> {
        if self.config == expected {
            Ok(())
        } else {
            Err(Error::WrongConfiguration {
                expected,
                found: self.config,
            })
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            omega_c: self.omega_c * factor,
            delta_c: self.delta_c * factor,
            delta_p: self.delta_p * factor,
            ..*self
        }
    }
}

/// Returns `(gamma12, gamma13, gamma23)` for the given spontaneous decay
/// rates. The ground state does not decay, so `gamma23 = gamma12 + gamma13`.
pub fn polarization_rates(w21: f64, w31: f64, w32: f64) -> Result<(f64, f64, f64)> {
    for (name, w) in [("W21", w21), ("W31", w31), ("W32", w32)] {
        if !(w >= 0.0) || !w.is_finite() {
            return Err(Error::Domain(format!(
                "decay rate {name} must be finite and non-negative, got {w}"
            )));
        }
    }
    let gamma12 = w21 / 2.0;
    let gamma13 = (w31 + w32) / 2.0;
    Ok((gamma12, gamma13, gamma12 + gamma13))
}

/// Saturation parameter `Omega_c^2 / max(delta_c^2, (gamma12 - gamma13)^2)`.
///
/// Values up to [`LOW_SATURATION_THRESHOLD`] are treated as low saturation.
pub fn low_saturation_margin(drive: &DriveParams, rates: &AtomRates) -> Result<f64> {
    let omega_sq = drive.omega_c * drive.omega_c;
    if omega_sq == 0.0 {
        return Ok(0.0);
    }
    let width_diff = rates.gamma12 - rates.gamma13;
    let denom = (drive.delta_c * drive.delta_c).max(width_diff * width_diff);
    if denom == 0.0 {
        return Err(Error::DegenerateRegime(
            "delta_c = 0 and gamma12 = gamma13 leave no saturation scale",
        ));
    }
    Ok(omega_sq / denom)
}

/// Logs a warning when the drive is outside the low-saturation regime.
pub(crate) fn warn_if_saturated(drive: &DriveParams, rates: &AtomRates, what: &str) {
    if let Ok(s) = low_saturation_margin(drive, rates) {
        if s > LOW_SATURATION_THRESHOLD {
            log::warn!(
                "{what}: saturation margin {s:.4} exceeds {LOW_SATURATION_THRESHOLD}; \
                 low-saturation approximations may be inaccurate"
            );
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn figure_rates() {
        let (g12, g13, g23) = polarization_rates(1.0, 0.06, 0.15).unwrap();
        assert_abs_diff_eq!(g12, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(g13, 0.105, epsilon = 1e-15);
        assert_abs_diff_eq!(g23, 0.605, epsilon = 1e-15);
    }

    #[test]
    fn zero_and_arbitrary_rates() {
        assert_eq!(polarization_rates(0.0, 0.0, 0.0).unwrap(), (0.0, 0.0, 0.0));
        let (g12, g13, g23) = polarization_rates(2.0, 0.4, 0.0).unwrap();
        assert_abs_diff_eq!(g12, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g13, 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(g23, 1.2, epsilon = 1e-15);
    }

    #[test]
    fn negative_rate_rejected() {
        assert!(matches!(
            polarization_rates(-1.0, 0.0, 0.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            polarization_rates(1.0, f64::NAN, 0.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn polarization_triple_must_add_up() {
        let err = AtomRates::from_polarization(0.5, 0.105, 0.7, 1e-9).unwrap_err();
        assert!(err.to_string().contains("gamma23 = gamma12 + gamma13"));
        let ok = AtomRates::from_polarization(0.5, 0.105, 0.605, 1e-9).unwrap();
        assert_abs_diff_eq!(ok.w21, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(ok.w31 + ok.w32, 0.21, epsilon = 1e-15);
    }

    fn drive(omega_c: f64, delta_c: f64) -> DriveParams {
        DriveParams::new(Configuration::Eit, omega_c, delta_c, 0.0).unwrap()
    }

    #[test]
    fn saturation_margin_examples() {
        let rates = AtomRates::figure_preset();
        assert_eq!(low_saturation_margin(&drive(0.0, 0.0), &rates).unwrap(), 0.0);
        let s = low_saturation_margin(&drive(0.2, 0.0), &rates).unwrap();
        assert_abs_diff_eq!(s, 0.04 / (0.395 * 0.395), epsilon = 1e-12);
        assert_abs_diff_eq!(s, 0.2563, epsilon = 1e-4);
        let s = low_saturation_margin(&drive(1.0, 10.0), &rates).unwrap();
        assert_abs_diff_eq!(s, 0.01, epsilon = 1e-15);
    }

    #[test]
    fn saturation_margin_degenerate() {
        let rates = AtomRates::from_polarization(0.3, 0.3, 0.6, 1e-12).unwrap();
        assert!(matches!(
            low_saturation_margin(&drive(1.0, 0.0), &rates),
            Err(Error::DegenerateRegime(_))
        ));
    }

    #[test]
    fn configuration_parsing() {
        assert_eq!("EIT".parse::<Configuration>().unwrap(), Configuration::Eit);
        assert_eq!("cascade-at".parse::<Configuration>().unwrap(), Configuration::At);
        assert!("lambda".parse::<Configuration>().is_err());
    }

    proptest! {
        #[test]
        fn gamma23_is_sum(w21 in 0.0..10.0f64, w31 in 0.0..10.0f64, w32 in 0.0..10.0f64) {
            let r = AtomRates::from_decay_rates(w21, w31, w32).unwrap();
            prop_assert!((r.gamma23 - r.gamma12 - r.gamma13).abs() <= 2.0 * f64::EPSILON * r.gamma23);
        }

        #[test]
        fn homogeneous_degree_one(
            w21 in 0.0..10.0f64, w31 in 0.0..10.0f64, w32 in 0.0..10.0f64, lambda in 0.01..100.0f64
        ) {
            let (a, b, c) = polarization_rates(w21, w31, w32).unwrap();
            let (sa, sb, sc) = polarization_rates(lambda * w21, lambda * w31, lambda * w32).unwrap();
            prop_assert!((sa - lambda * a).abs() <= 1e-12 * (1.0 + sa.abs()));
            prop_assert!((sb - lambda * b).abs() <= 1e-12 * (1.0 + sb.abs()));
            prop_assert!((sc - lambda * c).abs() <= 1e-12 * (1.0 + sc.abs()));
        }
    }
}
