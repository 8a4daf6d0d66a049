//! Flags, config files and the resolved run configuration.
//!
//! Precedence is flags, then the `--config` TOML file, then defaults. File
//! keys are the flag names without the leading dashes.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use deh_core::protocol::{Envelope, EnvelopeKind};
use deh_core::qdyn::{self, Scheme};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "deh",
    version,
    about = "Deterministic energy harvesting from a drive with random phase",
    arg_required_else_help = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArgs,
}

#[derive(Debug, Subcommand)]
pub enum CommandArgs {
    /// One protocol run at a fixed phase, sampled as a time series.
    Simulate(RunArgs),
    /// Final populations over a grid of amplitudes, phases and deviations.
    Sweep(RunArgs),
    /// Classical oscillator sensitivity table or rotor trajectory.
    Classical(RunArgs),
    /// Entropy of the phase-averaged qubit state over one flip.
    Entropy(RunArgs),
    /// Potential that moves a diagonal Hamiltonian from one level to another.
    Vu(RunArgs),
    /// Harvested power from a plane wave.
    Power(RunArgs),
}

impl CommandArgs {
    pub fn into_parts(self) -> (Command, RunArgs) {
        match self {
            CommandArgs::Simulate(a) => (Command::Simulate, a),
            CommandArgs::Sweep(a) => (Command::Sweep, a),
            CommandArgs::Classical(a) => (Command::Classical, a),
            CommandArgs::Entropy(a) => (Command::Entropy, a),
            CommandArgs::Vu(a) => (Command::Vu, a),
            CommandArgs::Power(a) => (Command::Power, a),
        }
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// TOML file whose keys mirror the flag names.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Print the resolved configuration and exit.
    #[arg(long)]
    pub show_config: bool,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Simulate,
    Sweep,
    Classical,
    Entropy,
    Vu,
    Power,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Sweep => "sweep",
            Command::Classical => "classical",
            Command::Entropy => "entropy",
            Command::Vu => "vu",
            Command::Power => "power",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    /// Linearly polarized drive, no rotating-wave approximation.
    #[default]
    Full,
    /// Co-rotating drive.
    Rwa,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum PhiMode {
    /// Uniform grid of `phi-grid` points on [0, 2π).
    #[default]
    Grid,
    /// `samples` uniform draws from a generator seeded with `seed`.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeArg {
    #[default]
    Magnus4,
    Midpoint,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Magnus4 => Scheme::Magnus4,
            SchemeArg::Midpoint => Scheme::Midpoint,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ClassicalSystem {
    /// Driven linear oscillator.
    #[default]
    Oscillator,
    /// Rigid charged rotor, coupling `alpha`.
    Dipole,
    /// Magnetic moment with gyromagnetic ratio `beta`.
    Magnetic,
    /// Zero-damping Landau-Lifshitz-Gilbert precession with ratio `gamma`.
    Llg,
}

/// Drive envelope: `const`, `ramp:<fraction>` or `beat:<ω1>,<ω2>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeSpec(pub EnvelopeKind);

impl Default for EnvelopeSpec {
    fn default() -> Self {
        EnvelopeSpec(EnvelopeKind::Constant)
    }
}

impl FromStr for EnvelopeSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let kind = if s == "const" {
            EnvelopeKind::Constant
        } else if let Some(f) = s.strip_prefix("ramp:") {
            EnvelopeKind::LinearRamp {
                fraction: parse_f64(f).map_err(|e| format!("envelope `{s}`: {e}"))?,
            }
        } else if let Some(tones) = s.strip_prefix("beat:") {
            let (a, b) = tones
                .split_once(',')
                .ok_or_else(|| format!("envelope `{s}`: expected beat:<w1>,<w2>"))?;
            EnvelopeKind::Beat {
                omega1: parse_f64(a).map_err(|e| format!("envelope `{s}`: {e}"))?,
                omega2: parse_f64(b).map_err(|e| format!("envelope `{s}`: {e}"))?,
            }
        } else {
            return Err(format!(
                "envelope `{s}`: expected const, ramp:<fraction> or beat:<w1>,<w2>"
            ));
        };
        Envelope::new(kind, 1.0).map_err(|e| format!("envelope `{s}`: {e}"))?;
        Ok(EnvelopeSpec(kind))
    }
}

impl fmt::Display for EnvelopeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            EnvelopeKind::Constant => f.write_str("const"),
            EnvelopeKind::LinearRamp { fraction } => write!(f, "ramp:{fraction}"),
            EnvelopeKind::Beat { omega1, omega2 } => write!(f, "beat:{omega1},{omega2}"),
        }
    }
}

/// Run length: a positive number or `auto` (the envelope's flip time).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum TFinal {
    #[default]
    Auto,
    Value(f64),
}

impl FromStr for TFinal {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.trim() == "auto" {
            return Ok(TFinal::Auto);
        }
        TFinal::checked(parse_f64(s)?)
    }
}

impl TFinal {
    fn checked(v: f64) -> Result<Self, String> {
        if v.is_finite() && v > 0.0 {
            Ok(TFinal::Value(v))
        } else {
            Err(format!(
                "t-final must be `auto` or a finite value > 0, got {v}"
            ))
        }
    }
}

impl fmt::Display for TFinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TFinal::Auto => f.write_str("auto"),
            TFinal::Value(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum AxisName {
    Amp,
    Phase,
    DeltaAmp,
    DeltaT,
    DeltaOmega,
    RampFraction,
}

impl AxisName {
    pub const ALL: [AxisName; 6] = [
        AxisName::Amp,
        AxisName::Phase,
        AxisName::DeltaAmp,
        AxisName::DeltaT,
        AxisName::DeltaOmega,
        AxisName::RampFraction,
    ];

    pub fn canonical(self) -> &'static str {
        match self {
            AxisName::Amp => "amp",
            AxisName::Phase => "phase",
            AxisName::DeltaAmp => "delta_amp",
            AxisName::DeltaT => "delta_t",
            AxisName::DeltaOmega => "delta_omega",
            AxisName::RampFraction => "ramp_fraction",
        }
    }

    fn alias(self) -> &'static str {
        match self {
            AxisName::Amp => "A",
            AxisName::Phase => "phi",
            AxisName::DeltaAmp => "dA",
            AxisName::DeltaT => "dT",
            AxisName::DeltaOmega => "domega",
            AxisName::RampFraction => "ramp",
        }
    }
}

impl FromStr for AxisName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        AxisName::ALL
            .into_iter()
            .find(|a| a.canonical() == s || a.alias() == s)
            .ok_or_else(|| {
                let names: Vec<_> = AxisName::ALL.iter().map(|a| a.canonical()).collect();
                format!("unknown axis `{s}` (expected one of {})", names.join(", "))
            })
    }
}

/// `name:min:max:count`, an inclusive linear grid. Bounds accept a `pi`
/// suffix, e.g. `phase:0:1.96875pi:64`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisSpec {
    pub name: AxisName,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl AxisSpec {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.max
                } else {
                    self.min + (self.max - self.min) * i as f64 / last
                }
            })
            .collect()
    }
}

impl FromStr for AxisSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let [name, min, max, count] = parts[..] else {
            return Err(format!("axis `{s}`: expected <name>:<min>:<max>:<count>"));
        };
        let name: AxisName = name.parse()?;
        let min = parse_f64(min).map_err(|e| format!("axis `{s}`: {e}"))?;
        let max = parse_f64(max).map_err(|e| format!("axis `{s}`: {e}"))?;
        if !(min.is_finite() && max.is_finite()) {
            return Err(format!("axis `{s}`: bounds must be finite"));
        }
        let count: usize = count
            .trim()
            .parse()
            .map_err(|_| format!("axis `{s}`: count `{count}` is not a non-negative integer"))?;
        if count == 0 {
            return Err(format!("axis `{s}`: empty axis (count 0)"));
        }
        Ok(AxisSpec {
            name,
            min,
            max,
            count,
        })
    }
}

impl fmt::Display for AxisSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}:{}:{}",
            self.name.canonical(),
            self.min,
            self.max,
            self.count
        )
    }
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let s = s.trim();
    if let Some(factor) = s.strip_suffix("pi") {
        let factor = match factor {
            "" => 1.0,
            "-" => -1.0,
            f => f
                .parse::<f64>()
                .map_err(|_| format!("`{s}` is not a number"))?,
        };
        return Ok(factor * PI);
    }
    s.parse::<f64>()
        .map_err(|_| format!("`{s}` is not a number"))
}

macro_rules! string_serde {
    ($t:ty) => {
        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }
        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                String::deserialize(d)?
                    .parse()
                    .map_err(serde::de::Error::custom)
            }
        }
    };
}

string_serde!(EnvelopeSpec);
string_serde!(AxisSpec);

impl Serialize for TFinal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            TFinal::Auto => s.serialize_str("auto"),
            TFinal::Value(v) => s.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for TFinal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => TFinal::checked(v),
            Raw::Text(s) => s.parse(),
        }
        .map_err(serde::de::Error::custom)
    }
}

/// Every tunable, all optional so that flags and file can be layered.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Overrides {
    /// Only meaningful in config files; must match the subcommand.
    #[arg(skip)]
    pub command: Option<Command>,

    /// Level splitting E (ħ = 1).
    #[arg(long, allow_negative_numbers = true)]
    pub gap: Option<f64>,
    /// Drive amplitude A.
    #[arg(long, allow_negative_numbers = true)]
    pub amp: Option<f64>,
    /// Drive frequency; defaults to the gap (resonance).
    #[arg(long, allow_negative_numbers = true)]
    pub omega: Option<f64>,
    /// Drive phase φ for single runs.
    #[arg(long, allow_negative_numbers = true)]
    pub phase: Option<f64>,
    /// Number of φ grid points.
    #[arg(long)]
    pub phi_grid: Option<usize>,
    /// Integration steps per drive period.
    #[arg(long)]
    pub steps_per_period: Option<usize>,
    /// Integration scheme.
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,
    /// const | ramp:<fraction> | beat:<w1>,<w2>
    #[arg(long)]
    pub envelope: Option<EnvelopeSpec>,
    /// <value> | auto
    #[arg(long)]
    pub t_final: Option<TFinal>,
    /// <name>:<min>:<max>:<count>, repeatable. Names: amp, phase, delta_amp,
    /// delta_t, delta_omega, ramp_fraction.
    #[arg(long = "axis", value_name = "AXIS")]
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub axis: Vec<AxisSpec>,
    /// Output format.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads for sweeps.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Seed for sampled-φ mode.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Quantum model.
    #[arg(long, value_enum)]
    pub model: Option<Model>,
    /// How the φ ensemble is formed.
    #[arg(long, value_enum)]
    pub phi_mode: Option<PhiMode>,
    /// Number of φ draws in random mode; defaults to `phi-grid`.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Rows in time-series outputs.
    #[arg(long)]
    pub points: Option<usize>,

    /// Classical system.
    #[arg(long, value_enum)]
    pub system: Option<ClassicalSystem>,
    /// Oscillator mass.
    #[arg(long)]
    pub mass: Option<f64>,
    /// Oscillator spring constant.
    #[arg(long)]
    pub spring: Option<f64>,
    /// Oscillator force amplitude F0.
    #[arg(long, allow_negative_numbers = true)]
    pub force: Option<f64>,
    /// Oscillator initial position.
    #[arg(long, allow_negative_numbers = true)]
    pub q0: Option<f64>,
    /// Oscillator initial velocity.
    #[arg(long, allow_negative_numbers = true)]
    pub v0: Option<f64>,
    /// Electric rotor coupling: L = alpha d.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Magnetic gyromagnetic ratio.
    #[arg(long)]
    pub beta: Option<f64>,
    /// LLG gyromagnetic ratio.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// LLG damping; only 0 is supported.
    #[arg(long)]
    pub damping: Option<f64>,
    /// Static field along z.
    #[arg(long, allow_negative_numbers = true)]
    pub static_field: Option<f64>,
    /// Rotor moment of inertia.
    #[arg(long)]
    pub inertia: Option<f64>,

    /// Diagonal of H0, comma separated (at most 3 levels).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub levels: Option<Vec<f64>>,
    /// Source level, 1-based in ascending energy.
    #[arg(long)]
    pub from: Option<usize>,
    /// Target level, 1-based in ascending energy.
    #[arg(long)]
    pub to: Option<usize>,
    /// Phase θ on the target-from-source element.
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    /// Phase θ̃ on the source-from-target element.
    #[arg(long, allow_negative_numbers = true)]
    pub theta_tilde: Option<f64>,
    /// Duration τ the potential is switched on.
    #[arg(long)]
    pub tau: Option<f64>,

    /// Plane-wave intensity, W/m².
    #[arg(long)]
    pub intensity: Option<f64>,
    /// Dipole moment in debye.
    #[arg(long)]
    pub dipole_debye: Option<f64>,
    /// Level gap in meV (power model).
    #[arg(long)]
    pub gap_mev: Option<f64>,
    /// Areal dipole density, m⁻².
    #[arg(long)]
    pub density: Option<f64>,
}

macro_rules! layer {
    ($top:expr, $below:expr; $($f:ident),* $(,)?) => {
        Overrides {
            $($f: $top.$f.or($below.$f),)*
            axis: if $top.axis.is_empty() { $below.axis } else { $top.axis },
        }
    };
}

impl Overrides {
    /// `self` wins over `below` key by key.
    pub fn over(self, below: Overrides) -> Overrides {
        layer!(self, below;
            command, gap, amp, omega, phase, phi_grid, steps_per_period, scheme, envelope, t_final,
            format, out, jobs, seed, model, phi_mode, samples, points,
            system, mass, spring, force, q0, v0, alpha, beta, gamma, damping, static_field, inertia,
            levels, from, to, theta, theta_tilde, tau,
            intensity, dipole_debye, gap_mev, density,
        )
    }
}

/// Fully resolved configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub gap: f64,
    pub amp: f64,
    pub omega: f64,
    pub phase: f64,
    pub phi_grid: usize,
    pub steps_per_period: usize,
    pub scheme: SchemeArg,
    pub envelope: EnvelopeSpec,
    pub t_final: TFinal,
    pub axes: Vec<AxisSpec>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub seed: u64,
    pub model: Model,
    pub phi_mode: PhiMode,
    pub samples: usize,
    pub points: usize,

    pub system: ClassicalSystem,
    pub mass: f64,
    pub spring: f64,
    pub force: f64,
    pub q0: f64,
    pub v0: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub damping: f64,
    pub static_field: f64,
    pub inertia: f64,

    pub levels: Vec<f64>,
    pub from: usize,
    pub to: usize,
    pub theta: f64,
    pub theta_tilde: f64,
    pub tau: f64,

    pub intensity: f64,
    pub dipole_debye: f64,
    pub gap_mev: f64,
    pub density: f64,
}

impl RunConfig {
    /// Layers `flags` over the optional config file over defaults.
    pub fn resolve(command: Command, args: RunArgs) -> Result<RunConfig, CliError> {
        let file = match &args.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                let file: Overrides = toml::from_str(&text).map_err(|e| {
                    CliError::usage(format!("config file {}: {}", path.display(), e.message()))
                })?;
                if let Some(c) = file.command {
                    if c != command {
                        return Err(CliError::usage(format!(
                            "config file {} is for `{}`, not `{}`",
                            path.display(),
                            c.name(),
                            command.name()
                        )));
                    }
                }
                file
            }
            None => Overrides::default(),
        };
        Self::from_overrides(command, args.overrides.over(file))
    }

    pub fn from_overrides(command: Command, o: Overrides) -> Result<RunConfig, CliError> {
        let gap = o.gap.unwrap_or(1.0);
        let phi_grid = o.phi_grid.unwrap_or(qdyn::DEFAULT_PHI_GRID);
        let cfg = RunConfig {
            command,
            gap,
            amp: o.amp.unwrap_or(0.05),
            omega: o.omega.unwrap_or(gap),
            phase: o.phase.unwrap_or(0.0),
            phi_grid,
            steps_per_period: o.steps_per_period.unwrap_or(qdyn::DEFAULT_STEPS_PER_PERIOD),
            scheme: o.scheme.unwrap_or_default(),
            envelope: o.envelope.unwrap_or_default(),
            t_final: o.t_final.unwrap_or_default(),
            axes: o.axis,
            format: o.format.unwrap_or_default(),
            out: o.out,
            jobs: o.jobs,
            seed: o.seed.unwrap_or(0),
            model: o.model.unwrap_or_default(),
            phi_mode: o.phi_mode.unwrap_or_default(),
            samples: o.samples.unwrap_or(phi_grid),
            points: o.points.unwrap_or(201),
            system: o.system.unwrap_or_default(),
            mass: o.mass.unwrap_or(1.0),
            spring: o.spring.unwrap_or(1.0),
            force: o.force.unwrap_or(1.0),
            q0: o.q0.unwrap_or(0.0),
            v0: o.v0.unwrap_or(0.0),
            alpha: o.alpha.unwrap_or(1.0),
            beta: o.beta.unwrap_or(1.0),
            gamma: o.gamma.unwrap_or(1.0),
            damping: o.damping.unwrap_or(0.0),
            static_field: o.static_field.unwrap_or(1.0),
            inertia: o.inertia.unwrap_or(1.0),
            levels: o.levels.unwrap_or_else(|| vec![-1.0, 0.0, 1.0]),
            from: o.from.unwrap_or(1),
            to: o.to.unwrap_or(3),
            theta: o.theta.unwrap_or(0.0),
            theta_tilde: o.theta_tilde.unwrap_or(0.0),
            tau: o.tau.unwrap_or(1.0),
            intensity: o.intensity.unwrap_or(1000.0),
            dipole_debye: o.dipole_debye.unwrap_or(75.0),
            gap_mev: o.gap_mev.unwrap_or(1.0),
            density: o.density.unwrap_or(2.5e15),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let at_least = |key: &str, v: usize, min: usize| {
            if v < min {
                Err(CliError::usage(format!(
                    "`{key}` must be at least {min}, got {v}"
                )))
            } else {
                Ok(())
            }
        };
        at_least("phi-grid", self.phi_grid, 1)?;
        at_least("samples", self.samples, 1)?;
        at_least("points", self.points, 2)?;
        at_least(
            "steps-per-period",
            self.steps_per_period,
            qdyn::MIN_STEPS_PER_PERIOD,
        )?;
        at_least("from", self.from, 1)?;
        at_least("to", self.to, 1)?;
        if let Some(j) = self.jobs {
            at_least("jobs", j, 1)?;
        }
        for (key, v) in [
            ("gap", self.gap),
            ("amp", self.amp),
            ("omega", self.omega),
            ("phase", self.phase),
            ("mass", self.mass),
            ("spring", self.spring),
            ("force", self.force),
            ("q0", self.q0),
            ("v0", self.v0),
            ("static-field", self.static_field),
            ("theta", self.theta),
            ("theta-tilde", self.theta_tilde),
            ("tau", self.tau),
        ] {
            if !v.is_finite() {
                return Err(CliError::usage(format!("`{key}` must be finite, got {v}")));
            }
        }
        let mut seen = Vec::new();
        for a in &self.axes {
            if seen.contains(&a.name) {
                return Err(CliError::usage(format!(
                    "axis `{}` given more than once",
                    a.name.canonical()
                )));
            }
            seen.push(a.name);
        }
        if self.command != Command::Sweep && !self.axes.is_empty() {
            return Err(CliError::usage(format!(
                "`axis` is only used by sweep, not {}",
                self.command.name()
            )));
        }
        Ok(())
    }

    /// Keys that affect this command's output, as a sorted JSON object.
    /// `out` and `jobs` never change the numbers and are left out so that
    /// reruns into other files or with other thread counts stay identical.
    pub fn echo(&self) -> serde_json::Map<String, serde_json::Value> {
        let mut keys: Vec<&str> = vec!["command", "format"];
        keys.extend(match self.command {
            Command::Simulate => vec![
                "gap",
                "amp",
                "omega",
                "phase",
                "envelope",
                "t-final",
                "steps-per-period",
                "scheme",
                "model",
                "points",
            ],
            Command::Sweep => vec![
                "gap",
                "amp",
                "omega",
                "envelope",
                "t-final",
                "steps-per-period",
                "scheme",
                "model",
                "axis",
                "phi-grid",
                "phi-mode",
                "samples",
                "seed",
            ],
            Command::Classical => {
                let mut k = vec![
                    "system", "omega", "phase", "t-final", "points", "phi-grid", "phi-mode",
                    "samples", "seed",
                ];
                k.extend(match self.system {
                    ClassicalSystem::Oscillator => vec!["mass", "spring", "force", "q0", "v0"],
                    ClassicalSystem::Dipole => vec![
                        "amp",
                        "alpha",
                        "static-field",
                        "inertia",
                        "steps-per-period",
                    ],
                    ClassicalSystem::Magnetic => {
                        vec!["amp", "beta", "static-field", "inertia", "steps-per-period"]
                    }
                    ClassicalSystem::Llg => vec![
                        "amp",
                        "gamma",
                        "damping",
                        "static-field",
                        "inertia",
                        "steps-per-period",
                    ],
                });
                k
            }
            Command::Entropy => vec!["gap", "amp", "omega", "t-final", "points", "phi-grid"],
            Command::Vu => vec!["levels", "from", "to", "theta", "theta-tilde", "tau"],
            Command::Power => vec!["intensity", "dipole-debye", "gap-mev", "density"],
        });
        let full = serde_json::to_value(self.to_overrides()).expect("config serializes");
        let serde_json::Value::Object(map) = full else {
            unreachable!("Overrides serializes to an object")
        };
        map.into_iter()
            .filter(|(k, v)| keys.contains(&k.as_str()) && !v.is_null())
            .collect()
    }

    /// The echo as TOML, loadable again with `--config`.
    pub fn echo_toml(&self) -> Result<String, CliError> {
        toml::to_string(&self.echo())
            .map_err(|e| CliError::usage(format!("cannot render config: {e}")))
    }

    fn to_overrides(&self) -> Overrides {
        Overrides {
            command: Some(self.command),
            gap: Some(self.gap),
            amp: Some(self.amp),
            omega: Some(self.omega),
            phase: Some(self.phase),
            phi_grid: Some(self.phi_grid),
            steps_per_period: Some(self.steps_per_period),
            scheme: Some(self.scheme),
            envelope: Some(self.envelope),
            t_final: Some(self.t_final),
            axis: self.axes.clone(),
            format: Some(self.format),
            out: self.out.clone(),
            jobs: self.jobs,
            seed: Some(self.seed),
            model: Some(self.model),
            phi_mode: Some(self.phi_mode),
            samples: Some(self.samples),
            points: Some(self.points),
            system: Some(self.system),
            mass: Some(self.mass),
            spring: Some(self.spring),
            force: Some(self.force),
            q0: Some(self.q0),
            v0: Some(self.v0),
            alpha: Some(self.alpha),
            beta: Some(self.beta),
            gamma: Some(self.gamma),
            damping: Some(self.damping),
            static_field: Some(self.static_field),
            inertia: Some(self.inertia),
            levels: Some(self.levels.clone()),
            from: Some(self.from),
            to: Some(self.to),
            theta: Some(self.theta),
            theta_tilde: Some(self.theta_tilde),
            tau: Some(self.tau),
            intensity: Some(self.intensity),
            dipole_debye: Some(self.dipole_debye),
            gap_mev: Some(self.gap_mev),
            density: Some(self.density),
        }
    }

    /// The φ ensemble: a uniform grid, or seeded uniform draws.
    pub fn phases(&self) -> Vec<f64> {
        match self.phi_mode {
            PhiMode::Grid => qdyn::phi_grid(self.phi_grid),
            PhiMode::Random => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                (0..self.samples).map(|_| rng.gen_range(0.0..TAU)).collect()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resolve(args: &[&str]) -> Result<RunConfig, CliError> {
        let cli = Cli::try_parse_from(args).map_err(|e| CliError::usage(e.to_string()))?;
        let (cmd, run) = cli.command.into_parts();
        RunConfig::resolve(cmd, run)
    }

    #[test]
    fn envelope_strings_round_trip() {
        for s in ["const", "ramp:0.2", "beat:1.05,0.95"] {
            let e: EnvelopeSpec = s.parse().unwrap();
            assert_eq!(e.to_string(), s);
        }
        assert!("ramp:0.7".parse::<EnvelopeSpec>().is_err());
        assert!("beat:1".parse::<EnvelopeSpec>().is_err());
        assert!("square".parse::<EnvelopeSpec>().is_err());
    }

    #[test]
    fn axis_parsing() {
        let a: AxisSpec = "dA:0.96:1.04:5".parse().unwrap();
        assert_eq!(a.name, AxisName::DeltaAmp);
        let v = a.values();
        assert_eq!(v.len(), 5);
        assert_eq!(v[0], 0.96);
        assert_eq!(v[4], 1.04);
        assert!((v[2] - 1.0).abs() < 1e-15);
        assert_eq!(a.to_string(), "delta_amp:0.96:1.04:5");
        let p: AxisSpec = "phi:0:2pi:3".parse().unwrap();
        assert_eq!(p.values(), vec![0.0, PI, 2.0 * PI]);
        let single: AxisSpec = "amp:0.05:0.05:1".parse().unwrap();
        assert_eq!(single.values(), vec![0.05]);
        for bad in [
            "amp:0:1:0",
            "foo:0:1:3",
            "amp:0:1",
            "amp:x:1:2",
            "amp:0:inf:2",
        ] {
            assert!(bad.parse::<AxisSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn t_final_parsing() {
        assert_eq!("auto".parse::<TFinal>().unwrap(), TFinal::Auto);
        assert_eq!("2.5".parse::<TFinal>().unwrap(), TFinal::Value(2.5));
        assert!("-1".parse::<TFinal>().is_err());
        assert!("0".parse::<TFinal>().is_err());
    }

    #[test]
    fn defaults_and_omega_follows_gap() {
        let cfg = resolve(&["deh", "simulate", "--gap", "2"]).unwrap();
        assert_eq!(cfg.omega, 2.0);
        assert_eq!(cfg.phi_grid, 64);
        assert_eq!(cfg.steps_per_period, 200);
        assert_eq!(cfg.t_final, TFinal::Auto);
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        fs::write(&path, "amp = 0.01\nphase = 0.5\n").unwrap();
        let p = path.to_str().unwrap();
        let cfg = resolve(&["deh", "simulate", "--config", p, "--amp", "0.05"]).unwrap();
        assert_eq!(cfg.amp, 0.05);
        assert_eq!(cfg.phase, 0.5);
    }

    #[test]
    fn unknown_file_key_is_named() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        fs::write(&path, "amplitude = 0.01\n").unwrap();
        let err = resolve(&["deh", "simulate", "--config", path.to_str().unwrap()]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("amplitude"), "{err}");
    }

    #[test]
    fn echo_reloads_to_the_same_config() {
        let cfg = resolve(&[
            "deh",
            "sweep",
            "--amp",
            "0.03",
            "--axis",
            "dT:0.96:1.04:3",
            "--envelope",
            "ramp:0.1",
            "--out",
            "x.csv",
        ])
        .unwrap();
        let text = cfg.echo_toml().unwrap();
        assert!(!text.contains("out"));
        let reloaded: Overrides = toml::from_str(&text).unwrap();
        let again = RunConfig::from_overrides(Command::Sweep, reloaded).unwrap();
        assert_eq!(again, RunConfig { out: None, ..cfg });
    }

    #[test]
    fn duplicate_axes_and_misplaced_axes_are_rejected() {
        assert!(resolve(&[
            "deh",
            "sweep",
            "--axis",
            "amp:0.01:0.1:2",
            "--axis",
            "A:0.01:0.1:2"
        ])
        .is_err());
        assert!(resolve(&["deh", "simulate", "--axis", "amp:0.01:0.1:2"]).is_err());
    }

    #[test]
    fn random_phases_are_seeded() {
        let mut cfg = resolve(&[
            "deh",
            "sweep",
            "--phi-mode",
            "random",
            "--samples",
            "5",
            "--seed",
            "7",
        ])
        .unwrap();
        let a = cfg.phases();
        assert_eq!(a, cfg.phases());
        assert!(a.iter().all(|p| (0.0..TAU).contains(p)));
        cfg.seed = 8;
        assert_ne!(a, cfg.phases());
    }
}
