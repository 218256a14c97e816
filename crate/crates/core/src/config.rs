//! Run configuration: figure presets, `key=value` or JSON config files, and
//! command-line overrides, resolved in that order.

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::atom::{AtomRates, Configuration, DriveParams};
use crate::steady_state;

/// Tolerance on `gamma23 = gamma12 + gamma13` for a user-supplied triple.
pub const GAMMA_IDENTITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

fn err(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Picture {
    #[default]
    Bare,
    Dressed,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RatesSpec {
    Decay { w21: f64, w31: f64, w32: f64 },
    Polarization { gamma12: f64, gamma13: f64, gamma23: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn validate(&self, what: &str) -> Result<(), ConfigError> {
        if self.points == 1 {
            return Ok(());
        }
        if self.points < 3 {
            return Err(err(format!("{what} grid needs at least 3 points, got {}", self.points)));
        }
        if !(self.start < self.stop) {
            return Err(err(format!(
                "{what} grid start {} must be below stop {}",
                self.start, self.stop
            )));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        steady_state::linspace(self.start, self.stop, self.points).expect("validated grid")
    }
}

/// Fully resolved settings for one CLI invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub config: Configuration,
    pub rates: RatesSpec,
    pub omega_c: f64,
    pub delta_c: f64,
    pub delta_p: f64,
    pub dp_grid: GridSpec,
    /// Set only when the probe grid was given explicitly.
    pub dp_grid_explicit: bool,
    pub omega_grid: Option<GridSpec>,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    pub normalize: bool,
    /// Emit raw Im(rho) instead of the |Im rho| plotting convention.
    pub raw_sign: bool,
    pub raman_substituted: bool,
    pub picture: Picture,
    pub figure: Option<u8>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            config: Configuration::Eit,
            rates: RatesSpec::Decay {
                w21: 1.0,
                w31: 0.06,
                w32: 0.15,
            },
            omega_c: 1.5,
            delta_c: 0.0,
            delta_p: 0.0,
            dp_grid: GridSpec {
                start: -3.0,
                stop: 3.0,
                points: 1201,
            },
            dp_grid_explicit: false,
            omega_grid: None,
            output: None,
            format: OutputFormat::Csv,
            normalize: false,
            raw_sign: false,
            raman_substituted: false,
            picture: Picture::Bare,
            figure: None,
        }
    }
}

/// Flat `key -> value` settings gathered from a file or the command line.
pub type Settings = BTreeMap<String, String>;

/// Parses a config file. JSON objects and `key = value` lines (with `#`
/// comments) are both accepted; keys may use `-` or `_`.
pub fn parse_config_text(text: &str) -> Result<Settings, ConfigError> {
    let trimmed = text.trim_start();
    let mut settings = Settings::new();
    if trimmed.starts_with('{') {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| err(format!("invalid JSON config: {e}")))?;
        let object = value
            .as_object()
            .ok_or_else(|| err("JSON config must be an object"))?;
        for (k, v) in object {
            let v = match v {
                serde_json::Value::String(s) => s.clone(),
                serde_json::Value::Number(n) => n.to_string(),
                serde_json::Value::Bool(b) => b.to_string(),
                other => return Err(err(format!("unsupported value for '{k}': {other}"))),
            };
            settings.insert(normalize_key(k), v);
        }
        return Ok(settings);
    }
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| err(format!("config line {}: expected key=value", lineno + 1)))?;
        settings.insert(normalize_key(k.trim()), v.trim().to_string());
    }
    Ok(settings)
}

fn normalize_key(k: &str) -> String {
    k.trim().replace('-', "_").to_ascii_lowercase()
}

fn parse_f64(settings: &Settings, key: &str) -> Result<Option<f64>, ConfigError> {
    settings
        .get(key)
        .map(|v| {
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| err(format!("'{key}' must be a finite number, got '{v}'")))
        })
        .transpose()
}

fn parse_usize(settings: &Settings, key: &str) -> Result<Option<usize>, ConfigError> {
    settings
        .get(key)
        .map(|v| {
            v.parse::<usize>()
                .map_err(|_| err(format!("'{key}' must be a non-negative integer, got '{v}'")))
        })
        .transpose()
}

fn parse_bool(settings: &Settings, key: &str) -> Result<Option<bool>, ConfigError> {
    settings
        .get(key)
        .map(|v| match v.to_ascii_lowercase().as_str() {
            "true" | "1" | "yes" | "on" => Ok(true),
            "false" | "0" | "no" | "off" => Ok(false),
            _ => Err(err(format!("'{key}' must be a boolean, got '{v}'"))),
        })
        .transpose()
}

const KNOWN_KEYS: &[&str] = &[
    "config", "w21", "w31", "w32", "gamma12", "gamma13", "gamma23", "omega_c", "delta_c",
    "delta_p", "dp_start", "dp_stop", "dp_points", "omega_start", "omega_stop", "omega_points",
    "output", "format", "normalize", "raw_sign", "raman_substituted", "picture", "figure",
];

impl RunConfig {
    /// Resolves settings in layers; later layers override earlier ones. A
    /// `figure` key in any layer selects a preset applied underneath all of
    /// them.
    pub fn resolve(layers: &[Settings]) -> Result<Self, ConfigError> {
        let mut merged = Settings::new();
        for layer in layers {
            for (k, v) in layer {
                if !KNOWN_KEYS.contains(&k.as_str()) {
                    return Err(err(format!("unknown setting '{k}'")));
                }
                merged.insert(k.clone(), v.clone());
            }
        }

        let mut rc = RunConfig::default();
        if let Some(fig) = merged.get("figure") {
            let fig: u8 = fig
                .parse()
                .map_err(|_| err(format!("'figure' must be 2 or 3, got '{fig}'")))?;
            match fig {
                2 | 3 => rc.figure = Some(fig),
                _ => return Err(err(format!("no preset for figure {fig}; use 2 or 3"))),
            }
        }

        if let Some(c) = merged.get("config") {
            rc.config = c.parse().map_err(|_| err(format!("'config' must be eit or at, got '{c}'")))?;
        }

        let w = ["w21", "w31", "w32"].map(|k| parse_f64(&merged, k));
        let g = ["gamma12", "gamma13", "gamma23"].map(|k| parse_f64(&merged, k));
        let [w21, w31, w32] = w;
        let [g12, g13, g23] = g;
        let (w21, w31, w32, g12, g13, g23) = (w21?, w31?, w32?, g12?, g13?, g23?);
        let any_w = w21.is_some() || w31.is_some() || w32.is_some();
        let any_g = g12.is_some() || g13.is_some() || g23.is_some();
        match (any_w, any_g) {
            (true, true) => {
                return Err(err(
                    "give either the decay rates (w21, w31, w32) or the polarization rates \
                     (gamma12, gamma13, gamma23), not both",
                ))
            }
            (true, false) => {
                rc.rates = RatesSpec::Decay {
                    w21: w21.ok_or_else(|| err("missing w21"))?,
                    w31: w31.unwrap_or(0.0),
                    w32: w32.unwrap_or(0.0),
                }
            }
            (false, true) => match (g12, g13, g23) {
                (Some(gamma12), Some(gamma13), Some(gamma23)) => {
                    rc.rates = RatesSpec::Polarization {
                        gamma12,
                        gamma13,
                        gamma23,
                    }
                }
                _ => return Err(err("polarization rates need all of gamma12, gamma13, gamma23")),
            },
            (false, false) => {}
        }
        rc.atom_rates()?;

        if let Some(v) = parse_f64(&merged, "omega_c")? {
            if v < 0.0 {
                return Err(err(format!("'omega_c' must be non-negative, got {v}")));
            }
            rc.omega_c = v;
        }
        if let Some(v) = parse_f64(&merged, "delta_c")? {
            rc.delta_c = v;
        }
        if let Some(v) = parse_f64(&merged, "delta_p")? {
            rc.delta_p = v;
        }

        let dp_start = parse_f64(&merged, "dp_start")?;
        let dp_stop = parse_f64(&merged, "dp_stop")?;
        let dp_points = parse_usize(&merged, "dp_points")?;
        if dp_start.is_some() || dp_stop.is_some() || dp_points.is_some() {
            rc.dp_grid_explicit = true;
            rc.dp_grid = GridSpec {
                start: dp_start.unwrap_or(rc.dp_grid.start),
                stop: dp_stop.unwrap_or(rc.dp_grid.stop),
                points: dp_points.unwrap_or(rc.dp_grid.points),
            };
        }
        rc.dp_grid.validate("probe detuning")?;

        let om_start = parse_f64(&merged, "omega_start")?;
        let om_stop = parse_f64(&merged, "omega_stop")?;
        let om_points = parse_usize(&merged, "omega_points")?;
        if om_start.is_some() || om_stop.is_some() || om_points.is_some() {
            let spec = GridSpec {
                start: om_start.ok_or_else(|| err("missing omega_start"))?,
                stop: om_stop.unwrap_or_else(|| om_start.unwrap_or(0.0)),
                points: om_points.unwrap_or(1),
            };
            spec.validate("coupling")?;
            if spec.start < 0.0 {
                return Err(err("coupling grid must be non-negative"));
            }
            rc.omega_grid = Some(spec);
        }

        if let Some(p) = merged.get("output") {
            rc.output = Some(PathBuf::from(p));
        }
        if let Some(f) = merged.get("format") {
            rc.format = match f.to_ascii_lowercase().as_str() {
                "csv" => OutputFormat::Csv,
                "json" => OutputFormat::Json,
                _ => return Err(err(format!("'format' must be csv or json, got '{f}'"))),
            };
        }
        if let Some(p) = merged.get("picture") {
            rc.picture = match p.to_ascii_lowercase().as_str() {
                "bare" => Picture::Bare,
                "dressed" => Picture::Dressed,
                _ => return Err(err(format!("'picture' must be bare or dressed, got '{p}'"))),
            };
        }
        rc.normalize = parse_bool(&merged, "normalize")?.unwrap_or(false);
        rc.raw_sign = parse_bool(&merged, "raw_sign")?.unwrap_or(false);
        rc.raman_substituted = parse_bool(&merged, "raman_substituted")?.unwrap_or(false);
        Ok(rc)
    }

    pub fn atom_rates(&self) -> Result<AtomRates, ConfigError> {
        let describe = |e: crate::error::Error| match e {
            crate::error::Error::Domain(m) => err(m),
            other => err(other.to_string()),
        };
        match self.rates {
            RatesSpec::Decay { w21, w31, w32 } => {
                AtomRates::from_decay_rates(w21, w31, w32).map_err(describe)
            }
            RatesSpec::Polarization {
                gamma12,
                gamma13,
                gamma23,
            } => AtomRates::from_polarization(gamma12, gamma13, gamma23, GAMMA_IDENTITY_TOL)
                .map_err(describe),
        }
    }

    pub fn drive(&self, config: Configuration) -> Result<DriveParams, ConfigError> {
        DriveParams::new(config, self.omega_c, self.delta_c, self.delta_p)
            .map_err(|e| err(e.to_string()))
    }

    /// `#`-header metadata describing the physical parameters.
    pub fn metadata(&self) -> Vec<(String, String)> {
        let mut meta = Vec::new();
        if let Ok(r) = self.atom_rates() {
            meta.push((
                "rates".into(),
                format!(
                    "W21={} W31={} W32={} gamma12={} gamma13={} gamma23={}",
                    r.w21, r.w31, r.w32, r.gamma12, r.gamma13, r.gamma23
                ),
            ));
        }
        meta.push(("omega_c".into(), self.omega_c.to_string()));
        meta.push(("delta_c".into(), self.delta_c.to_string()));
        meta.push(("units".into(), "hbar = 1, all rates in one common unit".into()));
        meta.push(("prefactor".into(), "proportionality constants set to 1".into()));
        if let Some(f) = self.figure {
            meta.push(("preset".into(), format!("figure {f}")));
        }
        meta
    }
}
