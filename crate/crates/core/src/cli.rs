//! The `cascade` command-line interface.
//!
//! Exit codes: 0 success, 1 failed verification, 2 configuration error,
//! 3 I/O error, 4 domain error. Data goes to stdout unless `--output` is
//! given; diagnostics go to stderr.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::analysis::{self, DetuningGrid};
use crate::atom::Configuration;
use crate::bare::{self, SecondResonanceForm};
use crate::config::{self, ConfigError, OutputFormat, Picture, RunConfig, Settings};
use crate::dressed;
use crate::error::Error;
use crate::io::{self, Table};
use crate::steady_state::{self, SpectrumSeries};
use crate::verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_DOMAIN: i32 = 4;

pub const AT_BARE_UNSUPPORTED: &str = "bare-picture scattering undefined for Cascade-AT";

#[derive(Debug, Parser)]
#[command(name = "cascade", version, about = "Cascade three-level atom: EIT vs Autler-Townes spectra and scattering pathways")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Probe absorption spectrum over a probe-detuning grid.
    Spectrum(CommonArgs),
    /// Peak separation of both configurations as the coupling is swept.
    Separation(CommonArgs),
    /// Pathway decomposition of the scattering amplitude at one detuning.
    Decompose {
        #[command(flatten)]
        common: CommonArgs,
        /// bare or dressed
        #[arg(long)]
        picture: Option<String>,
    },
    /// Divergence between bare- and dressed-picture amplitudes.
    ComparePictures(CommonArgs),
    /// Run the randomized invariant checks.
    Verify {
        #[arg(long, default_value_t = verify::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = verify::DEFAULT_DRAWS)]
        draws: usize,
        /// Polarization triple to check against the rate identity as given.
        #[arg(long, requires_all = ["gamma13", "gamma23"])]
        gamma12: Option<f64>,
        #[arg(long, requires_all = ["gamma12", "gamma23"])]
        gamma13: Option<f64>,
        #[arg(long, requires_all = ["gamma12", "gamma13"])]
        gamma23: Option<f64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Args, Default)]
struct CommonArgs {
    /// eit or at
    #[arg(long)]
    config: Option<String>,
    /// key=value or JSON file; command-line flags override it
    #[arg(long)]
    config_file: Option<PathBuf>,
    /// Reproduce a reference figure (2: absorption spectra, 3: peak separation)
    #[arg(long)]
    figure: Option<u8>,
    #[arg(long)]
    w21: Option<f64>,
    #[arg(long)]
    w31: Option<f64>,
    #[arg(long)]
    w32: Option<f64>,
    #[arg(long)]
    gamma12: Option<f64>,
    #[arg(long)]
    gamma13: Option<f64>,
    #[arg(long)]
    gamma23: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    omega_c: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    delta_c: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    delta_p: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    dp_start: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    dp_stop: Option<f64>,
    #[arg(long)]
    dp_points: Option<usize>,
    #[arg(long)]
    omega_start: Option<f64>,
    #[arg(long)]
    omega_stop: Option<f64>,
    #[arg(long)]
    omega_points: Option<usize>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// csv or json
    #[arg(long)]
    format: Option<String>,
    /// Divide each curve by its largest magnitude
    #[arg(long)]
    normalize: bool,
    /// Emit raw Im(rho) instead of |Im rho|
    #[arg(long)]
    raw_sign: bool,
    /// Use the Raman-substituted second resonance in approximate amplitudes
    #[arg(long)]
    raman_substituted: bool,
}

impl CommonArgs {
    fn settings(&self) -> Settings {
        let mut s = Settings::new();
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                s.insert(k.to_string(), v);
            }
        };
        put("config", self.config.clone());
        put("figure", self.figure.map(|v| v.to_string()));
        for (k, v) in [
            ("w21", self.w21),
            ("w31", self.w31),
            ("w32", self.w32),
            ("gamma12", self.gamma12),
            ("gamma13", self.gamma13),
            ("gamma23", self.gamma23),
            ("omega_c", self.omega_c),
            ("delta_c", self.delta_c),
            ("delta_p", self.delta_p),
            ("dp_start", self.dp_start),
            ("dp_stop", self.dp_stop),
            ("omega_start", self.omega_start),
            ("omega_stop", self.omega_stop),
        ] {
            put(k, v.map(|x| x.to_string()));
        }
        put("dp_points", self.dp_points.map(|v| v.to_string()));
        put("omega_points", self.omega_points.map(|v| v.to_string()));
        put("output", self.output.as_ref().map(|p| p.display().to_string()));
        put("format", self.format.clone());
        for (k, flag) in [
            ("normalize", self.normalize),
            ("raw_sign", self.raw_sign),
            ("raman_substituted", self.raman_substituted),
        ] {
            if flag {
                put(k, Some("true".into()));
            }
        }
        s
    }

    fn resolve(&self, extra: Settings) -> Result<RunConfig, CliError> {
        let mut layers = Vec::new();
        if let Some(path) = &self.config_file {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            layers.push(config::parse_config_text(&text)?);
        }
        let mut flags = self.settings();
        flags.extend(extra);
        layers.push(flags);
        Ok(RunConfig::resolve(&layers)?)
    }
}

#[derive(Debug)]
enum CliError {
    Config(String),
    Io(String),
    Domain(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Io(_) => EXIT_IO,
            CliError::Domain(_) => EXIT_DOMAIN,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Config(m) => format!("configuration error: {m}"),
            CliError::Io(m) => format!("I/O error: {m}"),
            CliError::Domain(m) => format!("error: {m}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.0)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Spectrum(args) => cmd_spectrum(&args, stdout),
        Command::Separation(args) => cmd_separation(&args, stdout),
        Command::Decompose { common, picture } => cmd_decompose(&common, picture, stdout),
        Command::ComparePictures(args) => cmd_compare_pictures(&args, stdout),
        Command::Verify {
            seed,
            draws,
            gamma12,
            gamma13,
            gamma23,
            output,
        } => {
            let injected = match (gamma12, gamma13, gamma23) {
                (Some(a), Some(b), Some(c)) => Some((a, b, c)),
                _ => None,
            };
            cmd_verify(seed, draws, injected, output.as_deref(), stdout, stderr)
        }
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "{}", e.message());
            e.exit_code()
        }
    }
}

fn emit(bytes: &[u8], output: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    match output {
        Some(path) => {
            fs::write(path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
        }
        None => stdout
            .write_all(bytes)
            .map_err(|e| CliError::Io(format!("stdout: {e}"))),
    }
}

fn emit_table(table: &Table, rc: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let bytes = match rc.format {
        OutputFormat::Csv => {
            let mut buf = Vec::new();
            table
                .write_csv(&mut buf)
                .map_err(|e| CliError::Io(e.to_string()))?;
            buf
        }
        OutputFormat::Json => json_bytes(&table.to_json()),
    };
    emit(&bytes, rc.output.as_deref(), stdout)
}

fn json_bytes(value: &Value) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("JSON values serialize");
    bytes.push(b'\n');
    bytes
}

/// Applies the plotting sign convention and optional normalization.
fn plotted(series: SpectrumSeries, rc: &RunConfig) -> SpectrumSeries {
    let series = if rc.raw_sign { series } else { series.magnitude() };
    if rc.normalize {
        series.normalized()
    } else {
        series
    }
}

fn sign_metadata(rc: &RunConfig) -> (String, String) {
    let sign = if rc.raw_sign {
        "raw Im(rho); negative for EIT, positive for AT"
    } else {
        "|Im(rho)| for both configurations (negative absorption coefficient)"
    };
    let sign = if rc.normalize {
        format!("{sign}, each curve divided by its maximum magnitude")
    } else {
        sign.to_string()
    };
    ("sign".into(), sign)
}

fn cmd_spectrum(args: &CommonArgs, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let rc = args.resolve(Settings::new())?;
    let rates = rc.atom_rates()?;
    let grid = rc.dp_grid.values();
    let mut meta = rc.metadata();
    meta.push(sign_metadata(&rc));

    let configs: Vec<Configuration> = if rc.figure == Some(2) {
        vec![Configuration::Eit, Configuration::At]
    } else {
        vec![rc.config]
    };
    let mut table = Table::new(Vec::new()).with_column("delta_p", grid.clone());
    for config in &configs {
        let series = steady_state::spectrum(&rates, &rc.drive(*config)?, &grid)?;
        meta.push((format!("observable_{config}"), series.label.clone()));
        let name = if configs.len() == 1 { "value".to_string() } else { config.to_string() };
        table = table.with_column(name, plotted(series, &rc).values);
    }
    if configs.len() == 1 {
        meta.push(("config".into(), rc.config.to_string()));
    }
    table.metadata = meta;
    emit_table(&table, &rc, stdout)?;
    Ok(EXIT_OK)
}

fn detuning_grid(rc: &RunConfig) -> DetuningGrid {
    if rc.dp_grid_explicit {
        DetuningGrid::Fixed(rc.dp_grid.values())
    } else {
        DetuningGrid::default()
    }
}

fn cmd_separation(args: &CommonArgs, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let rc = args.resolve(Settings::new())?;
    let rates = rc.atom_rates()?;
    let omega_grid = match rc.omega_grid {
        Some(spec) => spec.values(),
        None => analysis::default_omega_grid(),
    };
    let grid = detuning_grid(&rc);
    let eit = analysis::separation_curve(Configuration::Eit, &rates, rc.delta_c, &omega_grid, &grid)?;
    let at = analysis::separation_curve(Configuration::At, &rates, rc.delta_c, &omega_grid, &grid)?;
    let mut table = Table::new(rc.metadata())
        .with_column("omega_c", omega_grid)
        .with_column("separation_eit", eit.separation)
        .with_column("separation_at", at.separation);
    table.metadata.push((
        "separation".into(),
        "distance between outermost maxima of |Im rho|; 0 when fewer than two".into(),
    ));
    emit_table(&table, &rc, stdout)?;
    Ok(EXIT_OK)
}

fn second_resonance_form(rc: &RunConfig) -> SecondResonanceForm {
    if rc.raman_substituted {
        SecondResonanceForm::RamanSubstituted
    } else {
        SecondResonanceForm::PreSubstitution
    }
}

fn pair_json(pair: &bare::ResonancePair) -> Value {
    json!({
        "r1": io::complex_json(pair.r1),
        "r2": io::complex_json(pair.r2),
        "total": io::complex_json(pair.total),
    })
}

fn cmd_decompose(
    args: &CommonArgs,
    picture: Option<String>,
    stdout: &mut dyn Write,
) -> Result<i32, CliError> {
    let mut extra = Settings::new();
    if let Some(p) = picture {
        extra.insert("picture".into(), p);
    }
    let rc = args.resolve(extra)?;
    let rates = rc.atom_rates()?;
    let drive = rc.drive(rc.config)?;
    let mut out = json!({
        "config": rc.config.to_string(),
        "picture": match rc.picture { Picture::Bare => "bare", Picture::Dressed => "dressed" },
        "omega_c": rc.omega_c,
        "delta_c": rc.delta_c,
        "delta_p": rc.delta_p,
        "prefactor": "hbar Omega Omega_p / 4 = 1",
    });
    let fields = out.as_object_mut().expect("object");
    match (rc.config, rc.picture) {
        (Configuration::At, Picture::Bare) => {
            return Err(CliError::Domain(AT_BARE_UNSUPPORTED.into()));
        }
        (Configuration::At, Picture::Dressed) => {
            let total = dressed::at_amplitude(&rates, &drive)?;
            fields.insert("r1".into(), io::complex_json(total));
            fields.insert("r2".into(), Value::Null);
            fields.insert("total".into(), io::complex_json(total));
            fields.insert("cross_term".into(), json!(0.0));
            fields.insert("pathway_count".into(), json!(1));
        }
        (Configuration::Eit, picture) => {
            let pair = match picture {
                Picture::Bare => bare::exact_decomposition(&rates, &drive)?,
                Picture::Dressed => dressed::eit_dressed_amplitude(&rates, &drive)?,
            };
            fields.insert("r1".into(), io::complex_json(pair.r1));
            fields.insert("r2".into(), io::complex_json(pair.r2));
            fields.insert("total".into(), io::complex_json(pair.total));
            fields.insert("cross_term".into(), json!(pair.cross_term()));
            fields.insert("pathway_count".into(), json!(pair.pathway_count()));
            if picture == Picture::Bare {
                let e = bare::eigenvalues(&rates, &drive)?;
                fields.insert("z2".into(), io::complex_json(e.z2));
                fields.insert("z3".into(), io::complex_json(e.z3));
                if let Ok(approx) =
                    bare::approx_resonances(&rates, &drive, second_resonance_form(&rc))
                {
                    fields.insert("low_saturation".into(), pair_json(&approx));
                }
            }
        }
    }
    emit(&json_bytes(&out), rc.output.as_deref(), stdout)?;
    Ok(EXIT_OK)
}

fn cmd_compare_pictures(args: &CommonArgs, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let rc = args.resolve(Settings::new())?;
    let rates = rc.atom_rates()?;
    let drive = rc.drive(Configuration::Eit)?;
    if let Some(spec) = rc.omega_grid {
        let omega = spec.values();
        let divergence = omega
            .iter()
            .map(|&oc| dressed::compare_pictures(&rates, &drive.with_omega_c(oc)))
            .collect::<Result<Vec<_>, _>>()?;
        let table = Table::new(rc.metadata())
            .with_column("omega_c", omega)
            .with_column("divergence", divergence);
        emit_table(&table, &rc, stdout)?;
        return Ok(EXIT_OK);
    }
    let bare_total = bare::approx_resonances(&rates, &drive, SecondResonanceForm::PreSubstitution)?;
    let dressed_total = dressed::eit_dressed_amplitude(&rates, &drive)?;
    let out = json!({
        "omega_c": rc.omega_c,
        "delta_c": rc.delta_c,
        "delta_p": rc.delta_p,
        "bare": pair_json(&bare_total),
        "dressed": pair_json(&dressed_total),
        "divergence": dressed::compare_pictures(&rates, &drive)?,
    });
    emit(&json_bytes(&out), rc.output.as_deref(), stdout)?;
    Ok(EXIT_OK)
}

fn cmd_verify(
    seed: u64,
    draws: usize,
    injected: Option<(f64, f64, f64)>,
    output: Option<&Path>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, CliError> {
    if draws == 0 {
        return Err(CliError::Config("--draws must be positive".into()));
    }
    let _ = writeln!(stderr, "verify: seed {seed}");
    let opts = verify::VerifyOptions {
        seed,
        draws,
        injected_gammas: injected,
    };
    let results = verify::run(&opts)?;
    let report = verify::format_report(seed, draws, &results);
    emit(report.as_bytes(), output, stdout)?;
    Ok(if results.iter().all(|r| r.passed) {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    })
}
