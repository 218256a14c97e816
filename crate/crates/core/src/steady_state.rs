//! Closed-form steady-state coherences and probe absorption spectra.
//!
//! Proportionality constants are set to one, so only lineshapes, peak
//! positions and relative depths are meaningful.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::atom::{AtomRates, Configuration, DriveParams};
use crate::error::{Error, Result};

const MIN_DENOMINATOR: f64 = 1e-300;

/// A real observable sampled on a strictly increasing probe-detuning grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSeries {
    pub delta_p_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub label: String,
}

impl SpectrumSeries {
    pub fn new(delta_p_grid: Vec<f64>, values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        validate_grid(&delta_p_grid)?;
        if values.len() != delta_p_grid.len() {
            return Err(Error::Grid(format!(
                "{} values for {} grid points",
                values.len(),
                delta_p_grid.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Grid(format!("non-finite sample {v}")));
        }
        Ok(Self {
            delta_p_grid,
            values,
            label: label.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Divides every value by the largest magnitude. An all-zero series is
    /// returned unchanged.
    pub fn normalized(&self) -> Self {
        let m = self.max_abs();
        if m == 0.0 {
            return self.clone();
        }
        Self {
            values: self.values.iter().map(|v| v / m).collect(),
            ..self.clone()
        }
    }

    /// Replaces every value by its magnitude.
    pub fn magnitude(&self) -> Self {
        Self {
            values: self.values.iter().map(|v| v.abs()).collect(),
            ..self.clone()
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.delta_p_grid.iter().copied().zip(self.values.iter().copied())
    }
}

pub fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Grid("grid is empty".into()));
    }
    if let Some(x) = grid.iter().find(|x| !x.is_finite()) {
        return Err(Error::Grid(format!("non-finite grid point {x}")));
    }
    if let Some(w) = grid.windows(2).find(|w| !(w[1] > w[0])) {
        return Err(Error::Grid(format!(
            "grid not strictly increasing at {} -> {}",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// `points` evenly spaced samples from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, points: usize) -> Result<Vec<f64>> {
    if points == 0 {
        return Err(Error::Grid("need at least one point".into()));
    }
    if points == 1 {
        return Ok(vec![start]);
    }
    if !(start < stop) {
        return Err(Error::Grid(format!("start {start} must be below stop {stop}")));
    }
    let step = (stop - start) / (points - 1) as f64;
    let mut grid: Vec<f64> = (0..points).map(|i| start + step * i as f64).collect();
    grid[points - 1] = stop;
    Ok(grid)
}

/// Default probe grid for reproducing the absorption figure: [-3, 3], 1201 points.
pub fn default_grid() -> Vec<f64> {
    linspace(-3.0, 3.0, 1201).expect("static grid")
}

fn checked_div(num: C64, den: C64) -> Result<C64> {
    let modulus = den.norm();
    if modulus < MIN_DENOMINATOR {
        return Err(Error::SingularDenominator(modulus));
    }
    Ok(num / den)
}

/// rho21 for Cascade-EIT:
/// `-i (g13 - i(dp+dc)) / (Oc^2/4 + (g12 - i dp)(g13 - i(dp+dc)))`.
pub fn rho21_eit(rates: &AtomRates, drive: &DriveParams) -> Result<C64> {
    drive.require(Configuration::Eit)?;
    let i = C64::i();
    let raman = C64::new(rates.gamma13, -(drive.delta_p + drive.delta_c));
    let optical = C64::new(rates.gamma12, -drive.delta_p);
    let quarter_omega_sq = drive.omega_c * drive.omega_c / 4.0;
    checked_div(-i * raman, quarter_omega_sq + optical * raman)
}

/// rho32 for Cascade-AT: the coupling-induced population factor
/// `(Oc^2/4) / (g12^2 + dc^2 + 2 Oc^2/4)` times the two-photon response
/// `(g23 + i dp) / ((g13 + i(dp+dc))(g23 + i dp) + Oc^2/4)`, times `i`.
pub fn rho32_at(rates: &AtomRates, drive: &DriveParams) -> Result<C64> {
    drive.require(Configuration::At)?;
    let quarter_omega_sq = drive.omega_c * drive.omega_c / 4.0;
    if quarter_omega_sq == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let population_den =
        rates.gamma12 * rates.gamma12 + drive.delta_c * drive.delta_c + 2.0 * quarter_omega_sq;
    let population = C64::new(0.0, quarter_omega_sq / population_den);
    let upper = C64::new(rates.gamma23, drive.delta_p);
    let raman = C64::new(rates.gamma13, drive.delta_p + drive.delta_c);
    Ok(population * checked_div(upper, raman * upper + quarter_omega_sq)?)
}

/// Imaginary part of the configuration's probe coherence. Non-positive for
/// EIT and non-negative for AT; sign flipping for plots is left to callers.
pub fn absorption(rates: &AtomRates, drive: &DriveParams) -> Result<f64> {
    let rho = match drive.config {
        Configuration::Eit => rho21_eit(rates, drive)?,
        Configuration::At => rho32_at(rates, drive)?,
    };
    Ok(rho.im)
}

/// Absorption evaluated at every probe detuning of `grid`; `drive.delta_p`
/// is ignored.
pub fn spectrum(rates: &AtomRates, drive: &DriveParams, grid: &[f64]) -> Result<SpectrumSeries> {
    validate_grid(grid)?;
    let values = grid
        .iter()
        .map(|&dp| absorption(rates, &drive.with_delta_p(dp)))
        .collect::<Result<Vec<_>>>()?;
    let label = match drive.config {
        Configuration::Eit => "im_rho21",
        Configuration::At => "im_rho32",
    };
    SpectrumSeries::new(grid.to_vec(), values, label)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn eit(omega_c: f64, delta_c: f64, delta_p: f64) -> DriveParams {
        DriveParams::new(Configuration::Eit, omega_c, delta_c, delta_p).unwrap()
    }

    fn at(omega_c: f64, delta_c: f64, delta_p: f64) -> DriveParams {
        DriveParams::new(Configuration::At, omega_c, delta_c, delta_p).unwrap()
    }

    #[test]
    fn rho21_without_coupling_is_bare_lorentzian() {
        let r = rho21_eit(&AtomRates::figure_preset(), &eit(0.0, 0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(r.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.im, -2.0, epsilon = 1e-15);
    }

    #[test]
    fn rho21_at_line_center() {
        // -i g13 / (Oc^2/4 + g12 g13) = -i 0.105 / 0.615
        let r = rho21_eit(&AtomRates::figure_preset(), &eit(1.5, 0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(r.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.im, -0.105 / 0.615, epsilon = 1e-14);
        assert_abs_diff_eq!(r.im, -0.17073, epsilon = 1e-5);
    }

    #[test]
    fn rho32_at_line_center() {
        let rates = AtomRates::figure_preset();
        assert_eq!(rho32_at(&rates, &at(0.0, 0.3, 0.2)).unwrap(), C64::new(0.0, 0.0));
        // i * 0.5625 / 1.375 * 0.605 / (0.105 * 0.605 + 0.5625)
        let expected = 0.5625 / 1.375 * 0.605 / (0.105 * 0.605 + 0.5625);
        let r = rho32_at(&rates, &at(1.5, 0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(r.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.im, expected, epsilon = 1e-14);
        assert_abs_diff_eq!(r.im, 0.3954, epsilon = 1e-4);
    }

    #[test]
    fn far_detuned_limit() {
        let rates = AtomRates::figure_preset();
        for dp in [-1e6, 1e6] {
            assert!(rho21_eit(&rates, &eit(1.5, 0.0, dp)).unwrap().norm() < 1e-5);
            assert!(rho32_at(&rates, &at(1.5, 0.0, dp)).unwrap().norm() < 1e-5);
        }
    }

    #[test]
    fn wrong_configuration_rejected() {
        let rates = AtomRates::figure_preset();
        assert!(matches!(
            rho21_eit(&rates, &at(1.0, 0.0, 0.0)),
            Err(Error::WrongConfiguration { .. })
        ));
        assert!(matches!(
            rho32_at(&rates, &eit(1.0, 0.0, 0.0)),
            Err(Error::WrongConfiguration { .. })
        ));
    }

    #[test]
    fn singular_denominator_detected() {
        let rates = AtomRates::from_decay_rates(0.0, 0.0, 0.0).unwrap();
        assert!(matches!(
            rho21_eit(&rates, &eit(0.0, 0.0, 0.0)),
            Err(Error::SingularDenominator(_))
        ));
    }

    #[test]
    fn absorption_values() {
        let rates = AtomRates::figure_preset();
        assert_abs_diff_eq!(absorption(&rates, &eit(0.0, 0.0, 0.0)).unwrap(), -2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            absorption(&rates, &eit(1.5, 0.0, 0.0)).unwrap(),
            -0.17073,
            epsilon = 1e-5
        );
        assert_eq!(absorption(&rates, &at(0.0, 0.0, 0.0)).unwrap(), 0.0);
    }

    #[test]
    fn transparency_is_exact_without_upper_decay() {
        let rates = AtomRates::from_decay_rates(1.0, 0.0, 0.0).unwrap();
        for omega_c in [0.01, 0.3, 1.5, 20.0] {
            assert_eq!(absorption(&rates, &eit(omega_c, 0.0, 0.0)).unwrap(), 0.0);
        }
    }

    #[test]
    fn spectrum_grid_handling() {
        let rates = AtomRates::figure_preset();
        let s = spectrum(&rates, &eit(1.5, 0.0, 0.0), &[0.0]).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.values[0], absorption(&rates, &eit(1.5, 0.0, 0.0)).unwrap());
        assert!(matches!(spectrum(&rates, &eit(1.5, 0.0, 0.0), &[]), Err(Error::Grid(_))));
        assert!(matches!(
            spectrum(&rates, &eit(1.5, 0.0, 0.0), &[0.0, 0.0]),
            Err(Error::Grid(_))
        ));
    }

    #[test]
    fn figure_spectra_are_two_peaked_with_central_dip() {
        // Brute-force scan: local maxima of |value| on the grid.
        let rates = AtomRates::figure_preset();
        let grid = linspace(-3.0, 3.0, 601).unwrap();
        let mut depths = Vec::new();
        for drive in [eit(1.5, 0.0, 0.0), at(1.5, 0.0, 0.0)] {
            let s = spectrum(&rates, &drive, &grid).unwrap();
            let a: Vec<f64> = s.values.iter().map(|v| v.abs()).collect();
            let maxima: Vec<usize> = (1..a.len() - 1)
                .filter(|&i| a[i] > a[i - 1] && a[i] >= a[i + 1])
                .collect();
            assert_eq!(maxima.len(), 2);
            assert_abs_diff_eq!(grid[maxima[0]], -grid[maxima[1]], epsilon = 1e-12);
            let centre = a[300];
            assert!(centre < a[299] && centre < a[301]);
            depths.push(1.0 - centre / a[maxima[0]]);
        }
        assert!(depths[1] < depths[0], "AT dip {} vs EIT dip {}", depths[1], depths[0]);
    }

    #[test]
    fn linspace_endpoints() {
        let g = linspace(-3.0, 3.0, 1201).unwrap();
        assert_eq!(g.len(), 1201);
        assert_eq!(g[0], -3.0);
        assert_eq!(g[1200], 3.0);
        assert_abs_diff_eq!(g[600], 0.0, epsilon = 1e-15);
        assert!(linspace(1.0, 0.0, 3).is_err());
    }

    proptest! {
        #[test]
        fn symmetric_in_probe_detuning_at_zero_coupling_detuning(
            w21 in 0.01..3.0f64, w3 in 0.0..3.0f64, omega_c in 0.0..5.0f64, dp in 0.0..10.0f64
        ) {
            let rates = AtomRates::from_decay_rates(w21, w3, 0.0).unwrap();
            for config in [Configuration::Eit, Configuration::At] {
                let d = DriveParams::new(config, omega_c, 0.0, dp).unwrap();
                let plus = absorption(&rates, &d).unwrap();
                let minus = absorption(&rates, &d.with_delta_p(-dp)).unwrap();
                prop_assert!((plus.abs() - minus.abs()).abs() <= 1e-12 * (1.0 + plus.abs()));
            }
        }

        #[test]
        fn tails_vanish(
            w21 in 0.01..3.0f64, w3 in 0.0..3.0f64, omega_c in 0.0..5.0f64, sign in prop::bool::ANY
        ) {
            let rates = AtomRates::from_decay_rates(w21, w3, 0.0).unwrap();
            let scale = rates.gamma23.max(omega_c).max(rates.gamma12);
            let dp = if sign { 1e4 * scale } else { -1e4 * scale };
            let near_eit = absorption(&rates, &eit(omega_c, 0.0, 0.0)).unwrap().abs();
            let far_eit = absorption(&rates, &eit(omega_c, 0.0, dp)).unwrap().abs();
            prop_assert!(far_eit <= 1e-3 * near_eit.max(1.0 / scale));
            let far_at = absorption(&rates, &at(omega_c, 0.0, dp)).unwrap().abs();
            prop_assert!(far_at <= 1e-3 / scale);
        }
    }
}
