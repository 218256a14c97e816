//! Peak finding, peak separation sweeps, transparency-dip depth and the
//! pathway interference diagnostic.

use serde::Serialize;

use crate::atom::{AtomRates, Configuration, DriveParams};
use crate::bare;
use crate::error::{Error, Result};
use crate::steady_state::{self, SpectrumSeries};

/// Maxima closer than this many grid steps are merged.
pub const MERGE_STEPS: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Peak {
    pub position: f64,
    pub height: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeakReport {
    /// Sorted by position.
    pub peaks: Vec<Peak>,
    /// Outermost peak distance; 0 with fewer than two peaks.
    pub separation: f64,
    /// `1 - (smallest |value| between the outer peaks) / (mean peak height)`;
    /// 0 with fewer than two peaks.
    pub dip_depth: f64,
}

/// Vertex of the parabola through three samples, in coordinates relative to
/// the middle one. Returns `None` if the samples are not concave.
fn parabolic_vertex(x: [f64; 3], y: [f64; 3]) -> Option<(f64, f64)> {
    let (h0, h2) = (x[0] - x[1], x[2] - x[1]);
    let (d0, d2) = (y[0] - y[1], y[2] - y[1]);
    let curvature = (d2 / h2 - d0 / h0) / (h2 - h0);
    if !(curvature < 0.0) {
        return None;
    }
    let slope = d2 / h2 - curvature * h2;
    let t = (-slope / (2.0 * curvature)).clamp(h0, h2);
    Some((x[1] + t, y[1] + slope * t + curvature * t * t))
}

/// Interior local maxima of `|value|`, refined by parabolic interpolation.
///
/// A flat top counts once, at its leftmost sample, and only if the series
/// falls again after it. Tops of three or more equal samples are reported
/// unrefined.
pub fn find_peaks(series: &SpectrumSeries) -> Result<PeakReport> {
    let n = series.len();
    if n < 3 {
        return Err(Error::Grid(format!("need at least 3 samples for peak finding, got {n}")));
    }
    let x = &series.delta_p_grid;
    let a: Vec<f64> = series.values.iter().map(|v| v.abs()).collect();

    let mut raw = Vec::new();
    let mut i = 1;
    while i < n - 1 {
        if a[i] > a[i - 1] {
            let mut j = i;
            while j + 1 < n && a[j + 1] == a[i] {
                j += 1;
            }
            if j + 1 < n && a[j + 1] < a[i] {
                // A two-sample tie is still a resolvable maximum between them.
                let refined = if j <= i + 1 {
                    parabolic_vertex([x[i - 1], x[i], x[i + 1]], [a[i - 1], a[i], a[i + 1]])
                } else {
                    None
                };
                let (position, height) = refined.unwrap_or((x[i], a[i]));
                raw.push(Peak { position, height });
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }

    let min_step = x.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let mut peaks: Vec<Peak> = Vec::with_capacity(raw.len());
    for p in raw {
        match peaks.last_mut() {
            Some(last) if p.position - last.position < MERGE_STEPS * min_step => {
                if p.height > last.height {
                    *last = p;
                }
            }
            _ => peaks.push(p),
        }
    }

    let (separation, dip_depth) = match (peaks.first(), peaks.last()) {
        (Some(lo), Some(hi)) if peaks.len() >= 2 => {
            let floor = x
                .iter()
                .zip(&a)
                .filter(|(xi, _)| **xi >= lo.position && **xi <= hi.position)
                .map(|(_, ai)| *ai)
                .fold(f64::INFINITY, f64::min);
            let mean = peaks.iter().map(|p| p.height).sum::<f64>() / peaks.len() as f64;
            let depth = if mean > 0.0 && floor.is_finite() {
                (1.0 - floor / mean).clamp(0.0, 1.0)
            } else {
                0.0
            };
            (hi.position - lo.position, depth)
        }
        _ => (0.0, 0.0),
    };

    Ok(PeakReport {
        peaks,
        separation,
        dip_depth,
    })
}

/// Probe-detuning grid used for each point of a coupling sweep.
#[derive(Clone, Debug, PartialEq)]
pub enum DetuningGrid {
    Fixed(Vec<f64>),
    /// Symmetric grid through zero with spacing `step`, reaching
    /// `0.75 Oc + |dc| + margin` on each side so the split lines at about
    /// `+-Oc/2` stay inside.
    Adaptive { step: f64, margin: f64 },
}

impl Default for DetuningGrid {
    fn default() -> Self {
        DetuningGrid::Adaptive {
            step: 0.005,
            margin: 3.0,
        }
    }
}

impl DetuningGrid {
    pub fn for_drive(&self, omega_c: f64, delta_c: f64) -> Result<Vec<f64>> {
        match self {
            DetuningGrid::Fixed(grid) => {
                steady_state::validate_grid(grid)?;
                Ok(grid.clone())
            }
            &DetuningGrid::Adaptive { step, margin } => {
                if !(step > 0.0) || !(margin >= 0.0) {
                    return Err(Error::Grid(format!(
                        "adaptive grid needs step > 0 and margin >= 0, got {step}, {margin}"
                    )));
                }
                let half_width = 0.75 * omega_c + delta_c.abs() + margin;
                let half = (half_width / step).ceil() as i64;
                Ok((-half..=half).map(|k| k as f64 * step).collect())
            }
        }
    }
}

/// Peak separation as a function of the coupling Rabi frequency.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeparationCurve {
    pub omega_c: Vec<f64>,
    pub separation: Vec<f64>,
}

pub fn separation_curve(
    config: Configuration,
    rates: &AtomRates,
    delta_c: f64,
    omega_grid: &[f64],
    grid: &DetuningGrid,
) -> Result<SeparationCurve> {
    if omega_grid.is_empty() {
        return Err(Error::Grid("coupling grid is empty".into()));
    }
    let separation = omega_grid
        .iter()
        .map(|&oc| {
            let drive = DriveParams::new(config, oc, delta_c, 0.0)?;
            let dp = grid.for_drive(oc, delta_c)?;
            Ok(find_peaks(&steady_state::spectrum(rates, &drive, &dp)?)?.separation)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SeparationCurve {
        omega_c: omega_grid.to_vec(),
        separation,
    })
}

/// Default coupling grid for the separation figure: 60 geometric points on
/// [0.05, 10] followed by 15, 20, ..., 50.
pub fn default_omega_grid() -> Vec<f64> {
    let (lo, hi) = (0.05f64, 10.0f64);
    let ratio = (hi / lo).ln() / 59.0;
    let mut grid: Vec<f64> = (0..60).map(|k| lo * (ratio * k as f64).exp()).collect();
    grid[59] = hi;
    grid.extend((1..=8).map(|k| 10.0 + 5.0 * k as f64));
    grid
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InterferenceReport {
    pub r1_sq: f64,
    pub r2_sq: f64,
    pub cross: f64,
    pub total_sq: f64,
}

impl InterferenceReport {
    pub fn from_pair(pair: &bare::ResonancePair) -> Self {
        Self {
            r1_sq: pair.r1.norm_sqr(),
            r2_sq: pair.r2.norm_sqr(),
            cross: pair.cross_term(),
            total_sq: pair.total.norm_sqr(),
        }
    }

    /// `total_sq - r1_sq - r2_sq - cross`, scaled by `r1_sq + r2_sq`.
    pub fn relative_residual(&self) -> f64 {
        let scale = self.r1_sq + self.r2_sq;
        if scale == 0.0 {
            return self.total_sq.abs();
        }
        (self.total_sq - self.r1_sq - self.r2_sq - self.cross).abs() / scale
    }
}

/// Pathway intensities and their interference term at `drive.delta_p`,
/// from the exact two-resonance decomposition.
pub fn interference_report(rates: &AtomRates, drive: &DriveParams) -> Result<InterferenceReport> {
    let report = InterferenceReport::from_pair(&bare::exact_decomposition(rates, drive)?);
    debug_assert!(report.relative_residual() <= 1e-12);
    Ok(report)
}

/// Bisection settings for [`regime_threshold_with`].
#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdSearch {
    pub lo: f64,
    pub hi: f64,
    pub tolerance: f64,
    pub grid: DetuningGrid,
}

impl Default for ThresholdSearch {
    fn default() -> Self {
        Self {
            lo: 1e-3,
            hi: 10.0,
            tolerance: 1e-3,
            grid: DetuningGrid::default(),
        }
    }
}

fn peak_count(config: Configuration, rates: &AtomRates, delta_c: f64, omega_c: f64, grid: &DetuningGrid) -> Result<usize> {
    let drive = DriveParams::new(config, omega_c, delta_c, 0.0)?;
    let dp = grid.for_drive(omega_c, delta_c)?;
    Ok(find_peaks(&steady_state::spectrum(rates, &drive, &dp)?)?.peaks.len())
}

/// Smallest coupling Rabi frequency at which the absorption line shows two
/// peaks, with the default bracket [1e-3, 10] and tolerance 1e-3.
pub fn regime_threshold(config: Configuration, rates: &AtomRates, delta_c: f64) -> Result<f64> {
    regime_threshold_with(config, rates, delta_c, &ThresholdSearch::default())
}

/// Bisection on the peak count. The count is assumed to switch from one to
/// two exactly once inside the bracket; if the lower end already shows two
/// peaks it is returned as is.
pub fn regime_threshold_with(
    config: Configuration,
    rates: &AtomRates,
    delta_c: f64,
    search: &ThresholdSearch,
) -> Result<f64> {
    let split = |oc: f64| -> Result<bool> {
        Ok(peak_count(config, rates, delta_c, oc, &search.grid)? >= 2)
    };
    let (mut lo, mut hi) = (search.lo, search.hi);
    if split(lo)? {
        return Ok(lo);
    }
    if !split(hi)? {
        return Err(Error::Bracket { lo, hi });
    }
    while hi - lo > search.tolerance {
        let mid = 0.5 * (lo + hi);
        if split(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
