//! Cascade-EIT scattering in the bare-states picture.
//!
//! The probe-photon transition amplitude is governed by the resolvent
//! projected onto the two-state subspace {|phi2>, |phi3>}:
//! |phi2> is the atom in |2> with the probe photon absorbed, |phi3> is the
//! atom in |3> after a further coupling photon is absorbed. Its inverse is
//!
//! ```text
//! (PGP)^-1 = | dp + i g12        Oc/2       |
//!            |   Oc/2      dp + dc + i g13  |
//! ```
//!
//! whose eigenvalues Z_II, Z_III are the two scattering resonances. The
//! amplitude is proportional to `<phi2|G|phi2> = (dp + dc + i g13) / D`. All
//! amplitudes use the prefactor convention `hbar Omega Omega_p / 4 = 1`.

use num_complex::Complex64 as C64;
use crate::atom::{self, AtomRates, Configuration, DriveParams};
use crate::error::{Error, Result};

const MIN_DENOMINATOR: f64 = 1e-300;

/// Relative distance between Z_II and Z_III below which the two-pole
/// decomposition is refused.
pub const EXCEPTIONAL_POINT_TOL: f64 = 1e-12;

/// The projected resolvent `lim PG(E_i + i eta)P` in the ordered basis
/// (|phi2>, |phi3>).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResolventSubspace {
    pub m: [[C64; 2]; 2],
}

impl ResolventSubspace {
    /// `<phi2|G|phi2>`, the element that enters the transition amplitude.
    pub fn phi2_element(&self) -> C64 {
        self.m[0][0]
    }
}

/// Complex resonance positions and the coupling-induced corrections read off
/// `Z_II = -i g12 - dc' + i gc'`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenPair {
    pub z2: C64,
    pub z3: C64,
    pub delta_c_prime: f64,
    pub gamma_c_prime: f64,
}

/// Two pathway amplitudes and their coherent sum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResonancePair {
    pub r1: C64,
    pub r2: C64,
    pub total: C64,
}

impl ResonancePair {
    pub fn new(r1: C64, r2: C64) -> Self {
        Self {
            r1,
            r2,
            total: r1 + r2,
        }
    }

    /// Interference term `|r1 + r2|^2 - |r1|^2 - |r2|^2 = 2 Re(r1 conj(r2))`.
    pub fn cross_term(&self) -> f64 {
        2.0 * (self.r1 * self.r2.conj()).re
    }

    pub fn pathway_count(&self) -> usize {
        2
    }
}

/// Which form of the approximate second resonance to use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SecondResonanceForm {
    /// `[(Oc/2)/(dc + i(g13 - g12))]^2 / (dp + dc - dc' + i(g13 + gc'))`.
    #[default]
    PreSubstitution,
    /// As above with `dc -> -dp` in the squared propagator, valid near the
    /// Raman condition only.
    RamanSubstituted,
}

fn checked_div(num: C64, den: C64) -> Result<C64> {
    let modulus = den.norm();
    if modulus < MIN_DENOMINATOR {
        return Err(Error::SingularDenominator(modulus));
    }
    Ok(num / den)
}

fn raman_shift(rates: &AtomRates, drive: &DriveParams) -> C64 {
    C64::new(drive.delta_p + drive.delta_c, rates.gamma13)
}

fn optical_shift(rates: &AtomRates, drive: &DriveParams) -> C64 {
    C64::new(drive.delta_p, rates.gamma12)
}

/// `D = (dp + dc + i g13)(dp + i g12) - Oc^2/4`.
pub fn determinant_d(rates: &AtomRates, drive: &DriveParams) -> Result<C64> {
    drive.require(Configuration::Eit)?;
    Ok(raman_shift(rates, drive) * optical_shift(rates, drive)
        - drive.omega_c * drive.omega_c / 4.0)
}

pub fn pgp_matrix(rates: &AtomRates, drive: &DriveParams) -> Result<ResolventSubspace> {
    let d = determinant_d(rates, drive)?;
    if d.norm() < MIN_DENOMINATOR {
        return Err(Error::SingularDenominator(d.norm()));
    }
    let off = C64::from(-drive.omega_c / 2.0) / d;
    Ok(ResolventSubspace {
        m: [
            [raman_shift(rates, drive) / d, off],
            [off, optical_shift(rates, drive) / d],
        ],
    })
}

/// `dc + i(g13 - g12)`: the unperturbed splitting Z_II - Z_III at Oc = 0.
fn bare_splitting(rates: &AtomRates, drive: &DriveParams) -> C64 {
    C64::new(drive.delta_c, rates.gamma13 - rates.gamma12)
}

/// Eigenvalues Z_II and Z_III of `(PGP)^-1` measured in probe detuning.
///
/// `2 Z = -(dc + i g23) +- sqrt((dc + i g13 - i g12)^2 + Oc^2)`. The square
/// root is taken on the principal branch and its sign then chosen so that
/// Z_II is the root closest to the first-order estimate
/// `-i g12 + (Oc^2/4) / (dc + i(g13 - g12))`, which keeps Z_II attached to
/// `-i g12` when the coupling is switched off.
pub fn eigenvalues(rates: &AtomRates, drive: &DriveParams) -> Result<EigenPair> {
    drive.require(Configuration::Eit)?;
    let u = bare_splitting(rates, drive);
    let omega_sq = drive.omega_c * drive.omega_c;
    let mut root = (u * u + omega_sq).sqrt();
    if u.norm() > 0.0 {
        let estimate = u + omega_sq / (2.0 * u);
        if (root + estimate).norm() < (root - estimate).norm() {
            root = -root;
        }
    }
    let trace = -C64::new(drive.delta_c, rates.gamma23);
    let z2 = (trace + root) / 2.0;
    let z3 = (trace - root) / 2.0;
    let gap = (z2 - z3).norm();
    if gap < EXCEPTIONAL_POINT_TOL * (z2.norm() + z3.norm() + 1.0) {
        return Err(Error::ExceptionalPoint(gap));
    }
    Ok(EigenPair {
        z2,
        z3,
        delta_c_prime: -z2.re,
        gamma_c_prime: z2.im + rates.gamma12,
    })
}

/// Low-saturation light shift `dc'` and radiative correction `gc'`.
pub fn light_shift_corrections(rates: &AtomRates, drive: &DriveParams) -> Result<(f64, f64)> {
    drive.require(Configuration::Eit)?;
    let quarter_omega_sq = drive.omega_c * drive.omega_c / 4.0;
    if quarter_omega_sq == 0.0 {
        return Ok((0.0, 0.0));
    }
    let width_diff = rates.gamma13 - rates.gamma12;
    let denom = drive.delta_c * drive.delta_c + width_diff * width_diff;
    if denom == 0.0 {
        return Err(Error::DegenerateRegime(
            "delta_c = 0 and gamma12 = gamma13: light shift undefined",
        ));
    }
    atom::warn_if_saturated(drive, rates, "light_shift_corrections");
    let s = quarter_omega_sq / denom;
    Ok((-drive.delta_c * s, -width_diff * s))
}

/// Exact split of the amplitude into the two resonances:
/// `r1 = (Z_II + dc + i g13) / ((Z_II - Z_III)(dp - Z_II))`,
/// `r2 = -(Z_III + dc + i g13) / ((Z_II - Z_III)(dp - Z_III))`.
///
/// Fails at an exceptional point, where only the undecomposed element
/// [`ResolventSubspace::phi2_element`] is meaningful.
pub fn exact_decomposition(rates: &AtomRates, drive: &DriveParams) -> Result<ResonancePair> {
    let EigenPair { z2, z3, .. } = eigenvalues(rates, drive)?;
    let upper = C64::new(drive.delta_c, rates.gamma13);
    let gap = z2 - z3;
    let dp = C64::from(drive.delta_p);
    let r1 = checked_div(z2 + upper, gap * (dp - z2))?;
    let r2 = -checked_div(z3 + upper, gap * (dp - z3))?;
    Ok(ResonancePair::new(r1, r2))
}

/// Low-saturation resonances: `r1 = 1/(dp + i g12)` and the second resonance
/// in the selected form. Logs a warning outside the low-saturation regime.
pub fn approx_resonances(
    rates: &AtomRates,
    drive: &DriveParams,
    form: SecondResonanceForm,
) -> Result<ResonancePair> {
    drive.require(Configuration::Eit)?;
    let r1 = checked_div(C64::from(1.0), optical_shift(rates, drive))?;
    if drive.omega_c == 0.0 {
        return Ok(ResonancePair::new(r1, C64::from(0.0)));
    }
    let (dcp, gcp) = light_shift_corrections(rates, drive)?;
    let half_omega = C64::from(drive.omega_c / 2.0);
    let mixing = match form {
        SecondResonanceForm::PreSubstitution => {
            checked_div(half_omega, bare_splitting(rates, drive))?.powi(2)
        }
        SecondResonanceForm::RamanSubstituted => {
            let detuned = C64::new(drive.delta_p, rates.gamma12 - rates.gamma13);
            checked_div(half_omega, detuned)?.powi(2)
        }
    };
    let raman_pole = C64::new(
        drive.delta_p + drive.delta_c - dcp,
        rates.gamma13 + gcp,
    );
    let r2 = mixing * checked_div(C64::from(1.0), raman_pole)?;
    Ok(ResonancePair::new(r1, r2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn eit(omega_c: f64, delta_c: f64, delta_p: f64) -> DriveParams {
        DriveParams::new(Configuration::Eit, omega_c, delta_c, delta_p).unwrap()
    }

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1e-300)
    }

    #[test]
    fn determinant_examples() {
        let rates = AtomRates::figure_preset();
        let d = determinant_d(&rates, &eit(0.0, 0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(d.re, -0.0525, epsilon = 1e-15);
        assert_abs_diff_eq!(d.im, 0.0, epsilon = 1e-15);
        let d = determinant_d(&rates, &eit(1.5, 0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(d.re, -0.615, epsilon = 1e-15);
        assert_abs_diff_eq!(d.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn pgp_examples() {
        let rates = AtomRates::figure_preset();
        let m = pgp_matrix(&rates, &eit(0.0, 0.3, 0.1)).unwrap().m;
        assert_eq!(m[0][1], C64::from(0.0));
        assert_eq!(m[1][0], C64::from(0.0));
        assert!(close(m[0][0], 1.0 / C64::new(0.1, 0.5), 1e-14));
        assert!(close(m[1][1], 1.0 / C64::new(0.4, 0.105), 1e-14));

        // (phi3, phi3) element = i g12 / D with D = -0.615
        let m = pgp_matrix(&rates, &eit(1.5, 0.0, 0.0)).unwrap().m;
        assert_abs_diff_eq!(m[1][1].re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m[1][1].im, -0.5 / 0.615, epsilon = 1e-14);
        assert_abs_diff_eq!(m[1][1].im, -0.8130, epsilon = 1e-4);
        assert_eq!(m[0][1], m[1][0]);
    }

    #[test]
    fn phi2_element_matches_steady_state_coherence() {
        let rates = AtomRates::figure_preset();
        for (oc, dc, dp) in [(1.5, 0.0, 0.3), (0.2, -1.0, 0.7), (3.0, 2.0, -2.0)] {
            let g = pgp_matrix(&rates, &eit(oc, dc, dp)).unwrap().phi2_element();
            let rho = crate::steady_state::rho21_eit(&rates, &eit(oc, dc, dp)).unwrap();
            assert!(close(g, rho, 1e-13));
        }
    }

    #[test]
    fn eigenvalues_without_coupling() {
        let rates = AtomRates::figure_preset();
        for dc in [-2.0, 0.0, 0.7] {
            let e = eigenvalues(&rates, &eit(0.0, dc, 0.0)).unwrap();
            assert!(close(e.z2, C64::new(0.0, -0.5), 1e-15));
            assert!(close(e.z3, C64::new(-dc, -0.105), 1e-15));
            assert_abs_diff_eq!(e.delta_c_prime, 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(e.gamma_c_prime, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn symmetric_doublet_for_equal_widths() {
        let rates = AtomRates::from_polarization(0.2, 0.2, 0.4, 1e-12).unwrap();
        let e = eigenvalues(&rates, &eit(1.0, 0.0, 0.0)).unwrap();
        let mut re = [e.z2.re, e.z3.re];
        re.sort_by(f64::total_cmp);
        assert_abs_diff_eq!(re[0], -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(re[1], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(e.z2.im, -0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(e.z3.im, -0.2, epsilon = 1e-15);
    }

    #[test]
    fn labels_follow_the_coupling_sweep() {
        // Below the exceptional point at Oc = g12 - g13 the principal branch
        // alone would hand Z_II the narrow (g13-like) root.
        let rates = AtomRates::figure_preset();
        let mut previous = C64::new(0.0, -0.5);
        for k in 1..=30 {
            let oc = 0.38 * k as f64 / 30.0;
            let e = eigenvalues(&rates, &eit(oc, 0.0, 0.0)).unwrap();
            assert!(e.z2.im < -0.3025, "Oc = {oc}: z2 = {}", e.z2);
            assert!((e.z2 - previous).norm() < 0.1);
            previous = e.z2;
        }
    }

    #[test]
    fn exceptional_point_refused() {
        let rates = AtomRates::figure_preset();
        let at_ep = eit(0.395, 0.0, 0.0);
        assert!(matches!(
            eigenvalues(&rates, &at_ep),
            Err(Error::ExceptionalPoint(_))
        ));
        assert!(matches!(
            exact_decomposition(&rates, &at_ep),
            Err(Error::ExceptionalPoint(_))
        ));
        // The undecomposed element remains finite.
        assert!(pgp_matrix(&rates, &at_ep).unwrap().phi2_element().norm().is_finite());
    }

    #[test]
    fn light_shift_examples() {
        let rates = AtomRates::figure_preset();
        assert_eq!(light_shift_corrections(&rates, &eit(0.0, 3.0, 0.0)).unwrap(), (0.0, 0.0));
        let (dcp, gcp) = light_shift_corrections(&rates, &eit(0.2, 0.0, 0.0)).unwrap();
        assert_eq!(dcp, 0.0);
        assert_abs_diff_eq!(gcp, 0.01 / 0.395, epsilon = 1e-15);
        assert_abs_diff_eq!(gcp, 0.025316, epsilon = 1e-6);

        let equal = AtomRates::from_polarization(0.3, 0.3, 0.6, 1e-12).unwrap();
        assert!(matches!(
            light_shift_corrections(&equal, &eit(0.1, 0.0, 0.0)),
            Err(Error::DegenerateRegime(_))
        ));
    }

    #[test]
    fn light_shift_matches_exact_eigenvalue_to_second_order() {
        let rates = AtomRates::figure_preset();
        let drive = eit(0.5, 10.0, 0.0);
        let s = atom::low_saturation_margin(&drive, &rates).unwrap();
        let (dcp, gcp) = light_shift_corrections(&rates, &drive).unwrap();
        let exact = eigenvalues(&rates, &drive).unwrap();
        // -i g12 - Z_II = dc' - i gc'. The first neglected term of the square
        // root expansion is of order s^2 in units of the bare splitting.
        let shift = C64::new(0.0, -rates.gamma12) - exact.z2;
        let splitting = C64::new(drive.delta_c, rates.gamma13 - rates.gamma12).norm();
        let deviation = (C64::new(dcp, -gcp) - shift).norm();
        assert!(deviation <= s * s * splitting, "{deviation} vs {}", s * s * splitting);
        assert_abs_diff_eq!(exact.delta_c_prime, dcp, epsilon = 1e-2 * dcp.abs());
        assert_abs_diff_eq!(exact.gamma_c_prime, gcp, epsilon = 2e-2 * gcp.abs());
    }

    #[test]
    fn decomposition_without_coupling_is_single_pathway() {
        let rates = AtomRates::figure_preset();
        let pair = exact_decomposition(&rates, &eit(1e-8, 0.0, 0.2)).unwrap();
        assert!(pair.r2.norm() < 1e-14);
        assert!(close(pair.r1, 1.0 / C64::new(0.2, 0.5), 1e-12));
        assert_eq!(pair.pathway_count(), 2);
    }

    #[test]
    fn destructive_interference_at_line_center() {
        let rates = AtomRates::figure_preset();
        let pair = exact_decomposition(&rates, &eit(0.2, 0.0, 0.0)).unwrap();
        assert!(pair.r1.im < 0.0 && pair.r2.im > 0.0);
        assert!(pair.cross_term() < 0.0);
        assert_eq!(pair.total, pair.r1 + pair.r2);
    }

    #[test]
    fn approx_without_coupling() {
        let rates = AtomRates::figure_preset();
        for form in [SecondResonanceForm::PreSubstitution, SecondResonanceForm::RamanSubstituted] {
            let pair = approx_resonances(&rates, &eit(0.0, 0.0, 0.4), form).unwrap();
            assert_eq!(pair.r2, C64::from(0.0));
            assert!(close(pair.r1, 1.0 / C64::new(0.4, 0.5), 1e-15));
        }
    }

    #[test]
    fn substituted_form_agrees_at_raman_condition() {
        let rates = AtomRates::figure_preset();
        let drive = eit(0.5, 10.0, -10.0);
        let pre = approx_resonances(&rates, &drive, SecondResonanceForm::PreSubstitution).unwrap();
        let sub = approx_resonances(&rates, &drive, SecondResonanceForm::RamanSubstituted).unwrap();
        assert!(close(sub.r2, pre.r2, 1e-12));
    }

    #[test]
    fn approx_converges_to_exact_with_weaker_coupling() {
        // Oracle: exact two-pole decomposition.
        let rates = AtomRates::figure_preset();
        let errors: Vec<f64> = [0.5, 0.25, 0.125]
            .iter()
            .map(|&oc| {
                let drive = eit(oc, 10.0, -10.0);
                let exact = exact_decomposition(&rates, &drive).unwrap().total;
                let approx =
                    approx_resonances(&rates, &drive, SecondResonanceForm::PreSubstitution)
                        .unwrap()
                        .total;
                (approx - exact).norm() / exact.norm()
            })
            .collect();
        assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
        // Halving Oc quarters the margin; the error follows.
        assert!(errors[0] / errors[1] > 3.5 && errors[1] / errors[2] > 3.5, "{errors:?}");
    }

    #[test]
    fn second_resonance_comparable_above_g13() {
        let rates = AtomRates::figure_preset();
        let pair =
            approx_resonances(&rates, &eit(0.3, 0.0, 0.0), SecondResonanceForm::PreSubstitution)
                .unwrap();
        let ratio = pair.r2.norm() / pair.r1.norm();
        assert!(ratio > 0.1 && ratio < 10.0, "ratio {ratio}");
    }
}
