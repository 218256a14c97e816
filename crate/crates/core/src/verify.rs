//! Randomized invariant checks behind `cascade verify`.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis;
use crate::atom::{AtomRates, Configuration, DriveParams};
use crate::bare::{self, SecondResonanceForm};
use crate::dressed;
use crate::error::Result;
use crate::steady_state;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_DRAWS: usize = 1000;

/// Random Cascade-EIT parameters. Draws whose resonances nearly coincide
/// (closer than 1% of their scale) are skipped, so the two-pole split is
/// well conditioned.
pub fn random_eit_draw<R: Rng>(rng: &mut R) -> (AtomRates, DriveParams) {
    loop {
        let rates = AtomRates::from_decay_rates(
            rng.gen_range(0.05..2.0),
            rng.gen_range(0.0..1.0),
            rng.gen_range(0.0..1.0),
        )
        .expect("positive rates");
        let drive = DriveParams::new(
            Configuration::Eit,
            rng.gen_range(0.01..3.0),
            rng.gen_range(-5.0..5.0),
            rng.gen_range(-5.0..5.0),
        )
        .expect("finite drive");
        if let Ok(e) = bare::eigenvalues(&rates, &drive) {
            if (e.z2 - e.z3).norm() > 1e-2 * (e.z2.norm() + e.z3.norm() + 1.0) {
                return (rates, drive);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Largest observed violation measure, compared against `tolerance`.
    pub worst: f64,
    pub tolerance: f64,
}

impl CheckResult {
    fn new(name: &'static str, worst: f64, tolerance: f64) -> Self {
        Self {
            name,
            passed: worst <= tolerance,
            worst,
            tolerance,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct VerifyOptions {
    pub seed: u64,
    pub draws: usize,
    /// A user-supplied `(gamma12, gamma13, gamma23)` checked against the rate
    /// identity as given, without repair.
    pub injected_gammas: Option<(f64, f64, f64)>,
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

pub fn run(opts: &VerifyOptions) -> Result<Vec<CheckResult>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let draws: Vec<(AtomRates, DriveParams)> =
        (0..opts.draws).map(|_| random_eit_draw(&mut rng)).collect();
    let mut out = Vec::new();

    let mut worst = 0.0f64;
    for (rates, _) in &draws {
        worst = worst.max((rates.gamma23 - rates.gamma12 - rates.gamma13).abs() / rates.gamma23);
    }
    if let Some((g12, g13, g23)) = opts.injected_gammas {
        worst = worst.max((g23 - g12 - g13).abs());
    }
    out.push(CheckResult::new("rate identity gamma23 = gamma12 + gamma13", worst, 1e-9));

    let mut worst = 0.0f64;
    for (rates, drive) in &draws {
        let e = bare::eigenvalues(rates, drive)?;
        let scale = drive.delta_c.abs().max(rates.gamma23).max(1.0);
        worst = worst.max((e.z2 + e.z3 + C64::new(drive.delta_c, rates.gamma23)).norm() / scale);
    }
    out.push(CheckResult::new("trace conservation", worst, 1e-12));

    let mut worst = 0.0f64;
    for (rates, drive) in &draws {
        let pair = bare::exact_decomposition(rates, drive)?;
        let element = bare::pgp_matrix(rates, drive)?.phi2_element();
        worst = worst.max(rel(pair.total, element));
    }
    out.push(CheckResult::new("partial-fraction exactness", worst, 1e-12));

    let mut worst = 0.0f64;
    for (rates, drive) in &draws {
        worst = worst.max(analysis::interference_report(rates, drive)?.relative_residual());
    }
    out.push(CheckResult::new("interference identity", worst, 1e-12));

    let mut worst = 0.0f64;
    for (rates, drive) in &draws {
        let weak = drive.with_omega_c(1e-8);
        let e = bare::eigenvalues(rates, &weak)?;
        worst = worst
            .max((e.z2 - C64::new(0.0, -rates.gamma12)).norm())
            .max((e.z3 - C64::new(-drive.delta_c, -rates.gamma13)).norm());
    }
    out.push(CheckResult::new("unperturbed limit at Omega_c = 1e-8", worst, 1e-6));

    // Monotone decrease along the ladder is encoded as the largest ratio of
    // successive divergences, which must stay below one.
    let rates = AtomRates::figure_preset();
    let ladder = [0.8, 0.4, 0.2, 0.1]
        .iter()
        .map(|&oc| {
            dressed::compare_pictures(
                &rates,
                &DriveParams::new(Configuration::Eit, oc, 10.0, -10.0)?,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let worst_ratio = ladder
        .windows(2)
        .map(|w| w[1] / w[0])
        .fold(0.0f64, f64::max);
    out.push(CheckResult::new(
        "picture convergence (successive divergence ratio)",
        worst_ratio,
        1.0 - f64::EPSILON,
    ));
    let far = dressed::compare_pictures(
        &rates,
        &DriveParams::new(Configuration::Eit, 1.0, 100.0, -100.0)?,
    )?;
    out.push(CheckResult::new("picture agreement at delta_c = 100", far, 0.02));

    // The AT amplitude is one Lorentzian: |A|^2 ((dp + dc)^2 + g13^2) is flat.
    let mut worst = 0.0f64;
    for (rates, drive) in draws.iter().take(100) {
        let dc = if drive.delta_c.abs() < 0.5 { 0.5 } else { drive.delta_c };
        let at = DriveParams::new(Configuration::At, 0.5 * dc.abs(), dc, 0.0)?;
        let shape = |dp: f64| -> Result<f64> {
            let a = dressed::at_amplitude(rates, &at.with_delta_p(dp))?;
            Ok(a.norm_sqr() * ((dp + dc).powi(2) + rates.gamma13.powi(2)))
        };
        let reference = shape(-dc + 0.3)?;
        for k in 0..20 {
            let dp = -dc - 5.0 + 0.5 * k as f64;
            worst = worst.max((shape(dp)? - reference).abs() / reference);
        }
    }
    out.push(CheckResult::new("AT single Lorentzian", worst, 1e-12));

    let mut worst = 0.0f64;
    for (rates, drive) in draws.iter().take(200) {
        for config in [Configuration::Eit, Configuration::At] {
            let d = DriveParams::new(config, drive.omega_c, 0.0, drive.delta_p)?;
            let plus = steady_state::absorption(rates, &d)?;
            let minus = steady_state::absorption(rates, &d.with_delta_p(-drive.delta_p))?;
            worst = worst.max((plus.abs() - minus.abs()).abs() / plus.abs().max(1e-300));
        }
    }
    out.push(CheckResult::new("spectrum symmetry at delta_c = 0", worst, 1e-12));

    let mut worst = 0.0f64;
    for (rates, drive) in draws.iter().take(200) {
        let d = drive.with_omega_c(0.0);
        for form in [SecondResonanceForm::PreSubstitution, SecondResonanceForm::RamanSubstituted] {
            let pair = bare::approx_resonances(rates, &d, form)?;
            worst = worst.max(pair.r2.norm());
        }
    }
    out.push(CheckResult::new("approximate second resonance vanishes at Omega_c = 0", worst, 0.0));

    Ok(out)
}

/// Fixed-width pass/fail table.
pub fn format_report(seed: u64, draws: usize, results: &[CheckResult]) -> String {
    let mut s = format!("seed {seed}, {draws} draws\n");
    for r in results {
        s.push_str(&format!(
            "{:<4}  {:<52}  worst {:>10.3e}  tol {:>9.1e}\n",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.worst,
            r.tolerance
        ));
    }
    s
}
