//! Argument parsing into a validated [`RunConfig`].

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use nalgebra::Vector3;
use spinthermo::{DipolarForm, Preset, SweepGrid, ThresholdSearch};

/// Usage errors exit with status 2.
#[derive(Debug, thiserror::Error)]
pub enum UsageError {
    #[error("{0}")]
    Clap(#[from] clap::Error),
    #[error("{0}")]
    Invalid(String),
}

impl UsageError {
    pub fn exit_code(&self) -> i32 {
        match self {
            UsageError::Clap(e) if !e.use_stderr() => 0,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Thermo,
    Concurrence,
    Threshold,
    Spectrum,
    Units,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SystemSpec {
    Preset(Preset),
    Custom(PathBuf),
}

impl fmt::Display for SystemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SystemSpec::Preset(p) => write!(f, "{p}"),
            SystemSpec::Custom(path) => write!(f, "custom:{}", path.display()),
        }
    }
}

/// Which Hamiltonian a run diagonalizes.
#[derive(Debug, Clone, PartialEq)]
pub enum HamiltonianSpec {
    /// Normalized couplings of a preset or coordinate file.
    Coupled { system: SystemSpec, form: DipolarForm },
    /// Complete dipolar tensor from explicit coordinates.
    FullDipolar { coords: PathBuf, field_axis: Vector3<f64> },
}

impl HamiltonianSpec {
    pub fn label(&self) -> String {
        match self {
            HamiltonianSpec::Coupled { system, .. } => system.to_string(),
            HamiltonianSpec::FullDipolar { coords, .. } => format!("full:{}", coords.display()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum UnitsQuery {
    /// Lab parameters to `(α, β)` or `β` back to kelvin.
    Convert {
        gamma_khz_per_gauss: f64,
        r12: spinthermo::Length,
        field_gauss: f64,
        input: UnitsInput,
    },
    /// `T ≈ ħ ω_d / k` for dipolar frequencies in Hz.
    Estimate { omega_d_hz: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub enum UnitsInput {
    Temperatures(Vec<f64>),
    Betas(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub hamiltonian: Option<HamiltonianSpec>,
    pub alphas: Vec<f64>,
    pub grid: SweepGrid,
    pub pair: (usize, usize),
    pub search: ThresholdSearch,
    pub units: Option<UnitsQuery>,
    /// `None` writes to stdout.
    pub output: Option<PathBuf>,
    pub format: Format,
}

#[derive(Debug, Parser)]
#[command(
    name = "spinthermo",
    version,
    about = "Thermodynamics and pair entanglement of dipolar spin clusters at positive and negative temperature"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Energy, entropy and heat capacity over a β grid.
    Thermo(SweepArgs),
    /// Pair concurrence over a β grid for one or more α.
    Concurrence(SweepArgs),
    /// Entanglement boundaries β*₊ and β*₋ for one or more α.
    Threshold(ThresholdArgs),
    /// Eigenvalues of the dimensionless Hamiltonian.
    Spectrum(SystemArgs),
    /// Physical-unit conversions.
    Units(UnitsArgs),
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output file; stdout when omitted or `-`.
    #[arg(long = "out")]
    out: Option<PathBuf>,
    /// Output format; inferred from the `--out` extension when omitted.
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,
}

#[derive(Debug, Args)]
struct SystemArgs {
    /// chain6, chain8, ring4, ring6 or custom:<path>.
    #[arg(long, required_unless_present = "full_dipolar")]
    system: Option<String>,
    /// Zeeman ratio α; comma-separated list where allowed.
    #[arg(long, allow_hyphen_values = true)]
    alpha: String,
    /// Dipolar form used with normalized couplings.
    #[arg(long, default_value = "transverse", value_parser = ["transverse", "secular"])]
    form: String,
    /// Use the complete dipolar tensor of the coordinates in `--coords`.
    #[arg(long, requires = "coords", conflicts_with = "system")]
    full_dipolar: bool,
    /// Coordinate file (x y z per line, units of nearest-neighbour distance).
    #[arg(long, requires = "full_dipolar")]
    coords: Option<PathBuf>,
    /// Field direction for `--full-dipolar`, as x,y,z.
    #[arg(long, default_value = "0,0,1", allow_hyphen_values = true)]
    field_axis: String,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// β grid as min:max:count.
    #[arg(long, default_value = "-4:4:801", allow_hyphen_values = true)]
    beta: String,
    /// Spin pair, 1-based, as j,k.
    #[arg(long, default_value = "1,2")]
    pair: String,
}

#[derive(Debug, Args)]
struct ThresholdArgs {
    #[command(flatten)]
    system: SystemArgs,
    #[arg(long, default_value = "1,2")]
    pair: String,
    /// Inner edge of the |β| search range.
    #[arg(long, default_value_t = 0.1)]
    min_abs_beta: f64,
    /// Outer edge of the |β| search range.
    #[arg(long, default_value_t = 50.0)]
    max_abs_beta: f64,
    /// Points in the coarse geometric scan.
    #[arg(long, default_value_t = 200)]
    coarse_points: usize,
}

#[derive(Debug, Args)]
struct UnitsArgs {
    /// Gyromagnetic ratio γ/2π in kHz/G.
    #[arg(long, required_unless_present = "omega_d")]
    gamma: Option<f64>,
    /// Nearest-neighbour distance in Å.
    #[arg(long, conflicts_with = "local_field")]
    r12: Option<f64>,
    /// Local dipolar field in G; fixes r12 instead of `--r12`.
    #[arg(long)]
    local_field: Option<f64>,
    /// Static field H₀ in G.
    #[arg(long, default_value_t = 0.0)]
    field: f64,
    /// Spin temperatures in K, comma-separated.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "beta")]
    temperature: Option<String>,
    /// Dimensionless inverse temperatures, comma-separated.
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    /// Dipolar frequencies in Hz for the rough entanglement-temperature estimate.
    #[arg(long, conflicts_with_all = ["gamma", "temperature", "beta"])]
    omega_d: Option<String>,
    #[command(flatten)]
    output: OutputArgs,
}

fn invalid(msg: impl Into<String>) -> UsageError {
    UsageError::Invalid(msg.into())
}

pub fn parse_system(s: &str) -> Result<SystemSpec, UsageError> {
    if let Some(path) = s.strip_prefix("custom:") {
        if path.is_empty() {
            return Err(invalid("custom system needs a path: custom:<path>"));
        }
        return Ok(SystemSpec::Custom(PathBuf::from(path)));
    }
    s.parse::<Preset>().map(SystemSpec::Preset).map_err(|_| {
        invalid(format!(
            "unknown preset `{s}` (expected chain6, chain8, ring4, ring6 or custom:<path>)"
        ))
    })
}

/// `min:max:count`.
pub fn parse_grid(s: &str) -> Result<SweepGrid, UsageError> {
    let malformed = |why: &str| invalid(format!("malformed grid `{s}`: {why} (expected min:max:count)"));
    let parts: Vec<&str> = s.split(':').collect();
    let [min, max, count] = parts.as_slice() else {
        return Err(malformed("need three fields"));
    };
    let min: f64 = min.trim().parse().map_err(|_| malformed("bad min"))?;
    let max: f64 = max.trim().parse().map_err(|_| malformed("bad max"))?;
    let count: usize = count.trim().parse().map_err(|_| malformed("bad count"))?;
    SweepGrid::new(min, max, count).map_err(|e| malformed(&e.to_string()))
}

pub fn parse_list(name: &str, s: &str) -> Result<Vec<f64>, UsageError> {
    let values: Vec<f64> = s
        .split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| invalid(format!("malformed {name} list `{s}`")))?;
    if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
        return Err(invalid(format!("malformed {name} list `{s}`")));
    }
    Ok(values)
}

pub fn parse_pair(s: &str) -> Result<(usize, usize), UsageError> {
    let bad = || invalid(format!("malformed pair `{s}` (expected j,k)"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a == 0 || b == 0 || a == b {
        return Err(bad());
    }
    Ok((a, b))
}

fn parse_axis(s: &str) -> Result<Vector3<f64>, UsageError> {
    let v = parse_list("field-axis", s)?;
    if v.len() != 3 || v.iter().all(|x| *x == 0.0) {
        return Err(invalid(format!("field axis `{s}` must be three numbers, not all zero")));
    }
    Ok(Vector3::new(v[0], v[1], v[2]))
}

fn resolve_output(args: OutputArgs) -> Result<(Option<PathBuf>, Format), UsageError> {
    let output = args.out.filter(|p| p != Path::new("-"));
    let format = match args.format.as_deref() {
        Some("json") => Format::Json,
        Some(_) => Format::Csv,
        None => match output.as_ref().and_then(|p| p.extension()) {
            Some(ext) if ext == "json" => Format::Json,
            _ => Format::Csv,
        },
    };
    Ok((output, format))
}

struct Resolved {
    hamiltonian: HamiltonianSpec,
    alphas: Vec<f64>,
    output: Option<PathBuf>,
    format: Format,
}

fn resolve_system(args: SystemArgs, single_alpha: bool) -> Result<Resolved, UsageError> {
    let alphas = parse_list("alpha", &args.alpha)?;
    if single_alpha && alphas.len() != 1 {
        return Err(invalid("this command takes a single --alpha value"));
    }
    let hamiltonian = if args.full_dipolar {
        HamiltonianSpec::FullDipolar {
            coords: args.coords.ok_or_else(|| invalid("--full-dipolar requires --coords"))?,
            field_axis: parse_axis(&args.field_axis)?,
        }
    } else {
        let system = args.system.ok_or_else(|| invalid("missing required flag --system"))?;
        HamiltonianSpec::Coupled {
            system: parse_system(&system)?,
            form: args
                .form
                .parse()
                .map_err(|e: spinthermo::Error| invalid(e.to_string()))?,
        }
    };
    let (output, format) = resolve_output(args.output)?;
    Ok(Resolved {
        hamiltonian,
        alphas,
        output,
        format,
    })
}

/// Parses a full argument vector (including the program name).
pub fn parse_args<I, T>(argv: I) -> Result<RunConfig, UsageError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    let mut config = RunConfig {
        command: Command::Thermo,
        hamiltonian: None,
        alphas: Vec::new(),
        grid: SweepGrid::figure_default(),
        pair: (1, 2),
        search: ThresholdSearch::default(),
        units: None,
        output: None,
        format: Format::Csv,
    };
    match cli.command {
        Sub::Thermo(args) => {
            config.command = Command::Thermo;
            apply_sweep(&mut config, args, true)?;
        }
        Sub::Concurrence(args) => {
            config.command = Command::Concurrence;
            apply_sweep(&mut config, args, false)?;
        }
        Sub::Threshold(args) => {
            config.command = Command::Threshold;
            config.pair = parse_pair(&args.pair)?;
            config.search = ThresholdSearch {
                min_abs_beta: args.min_abs_beta,
                max_abs_beta: args.max_abs_beta,
                coarse_points: args.coarse_points,
                ..ThresholdSearch::default()
            };
            if !(args.min_abs_beta > 0.0 && args.min_abs_beta < args.max_abs_beta && args.max_abs_beta.is_finite())
                || args.coarse_points < 2
            {
                return Err(invalid(
                    "threshold range needs 0 < --min-abs-beta < --max-abs-beta and --coarse-points >= 2",
                ));
            }
            apply_system(&mut config, resolve_system(args.system, false)?);
        }
        Sub::Spectrum(args) => {
            config.command = Command::Spectrum;
            apply_system(&mut config, resolve_system(args, true)?);
        }
        Sub::Units(args) => {
            config.command = Command::Units;
            config.units = Some(resolve_units(&args)?);
            let (output, format) = resolve_output(args.output)?;
            config.output = output;
            config.format = format;
        }
    }
    Ok(config)
}

fn apply_system(config: &mut RunConfig, r: Resolved) {
    config.hamiltonian = Some(r.hamiltonian);
    config.alphas = r.alphas;
    config.output = r.output;
    config.format = r.format;
}

fn apply_sweep(config: &mut RunConfig, args: SweepArgs, single_alpha: bool) -> Result<(), UsageError> {
    config.grid = parse_grid(&args.beta)?;
    config.pair = parse_pair(&args.pair)?;
    apply_system(config, resolve_system(args.system, single_alpha)?);
    Ok(())
}

fn resolve_units(args: &UnitsArgs) -> Result<UnitsQuery, UsageError> {
    if let Some(list) = &args.omega_d {
        return Ok(UnitsQuery::Estimate {
            omega_d_hz: parse_list("omega-d", list)?,
        });
    }
    let gamma = args.gamma.ok_or_else(|| invalid("missing required flag --gamma"))?;
    let r12 = match (args.r12, args.local_field) {
        (Some(r), None) => spinthermo::Length::Angstrom(r),
        (None, Some(h)) => {
            spinthermo::scan::units::r12_for_local_field(gamma, h).map_err(|e| invalid(e.to_string()))?
        }
        _ => return Err(invalid("give exactly one of --r12 or --local-field")),
    };
    let input = match (&args.temperature, &args.beta) {
        (Some(t), None) => UnitsInput::Temperatures(parse_list("temperature", t)?),
        (None, Some(b)) => UnitsInput::Betas(parse_list("beta", b)?),
        _ => return Err(invalid("give exactly one of --temperature or --beta")),
    };
    Ok(UnitsQuery::Convert {
        gamma_khz_per_gauss: gamma,
        r12,
        field_gauss: args.field,
        input,
    })
}
