//! Run configuration: command-line flags merged over an optional
//! `key=value` file, where keys are the long flag names without dashes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use multibag::resampling::{SubbagSpec, DEFAULT_RATIO_A};
use multibag::simulation::SimulationDesign;
use multibag::{AggregationRule, Scheme, TestConfig, VarianceMode};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Analyze,
    Simulate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Bagging,
    SubbagRandom,
    MaxContrast,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    I,
    Ii,
    IiStar,
}

/// Bagged multiple testing for two-group expression matrices.
#[derive(Debug, Parser)]
#[command(name = "multibag", version, about)]
pub struct Args {
    /// Read defaults from a key=value file; flags given here override it.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Control-group matrix (TSV).
    #[arg(long, value_name = "FILE")]
    pub control: Option<PathBuf>,
    /// Patient-group matrix (TSV).
    #[arg(long, value_name = "FILE")]
    pub patient: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,
    /// Number of pseudo-samples (ignored by max-contrast).
    #[arg(long = "B", value_name = "INT")]
    pub b: Option<usize>,
    /// Subsample fraction for subbag-random.
    #[arg(long = "ratio-a", value_name = "FLOAT")]
    pub ratio_a: Option<f64>,
    /// Control block size for max-contrast.
    #[arg(long, value_name = "INT")]
    pub dx: Option<usize>,
    /// Patient block size for max-contrast.
    #[arg(long, value_name = "INT")]
    pub dy: Option<usize>,
    /// Benjamini–Hochberg level.
    #[arg(long, value_name = "FLOAT")]
    pub q: Option<f64>,
    #[arg(long, value_enum)]
    pub rule: Option<RuleArg>,
    #[arg(long, value_name = "INT")]
    pub seed: Option<u64>,
    /// Use the unequal-variance t-statistic.
    #[arg(long)]
    pub welch: bool,
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Simulation: number of rows.
    #[arg(long = "N", value_name = "INT")]
    pub n: Option<usize>,
    /// Simulation: number of null rows.
    #[arg(long = "n-null", value_name = "INT")]
    pub n_null: Option<usize>,
    #[arg(long, value_name = "INT")]
    pub nx: Option<usize>,
    #[arg(long, value_name = "INT")]
    pub ny: Option<usize>,
    /// Simulation: mean shift of non-null rows in units of sigma.
    #[arg(long, value_name = "FLOAT", allow_negative_numbers = true)]
    pub delta: Option<f64>,
    #[arg(long, value_name = "FLOAT")]
    pub sigma: Option<f64>,
    #[arg(long, value_name = "INT")]
    pub replicates: Option<usize>,
    /// Simulation: also write replicates.tsv.
    #[arg(long = "per-replicate")]
    pub per_replicate: bool,
}

/// Every configurable key, in echo order.
const KEYS: &[&str] = &[
    "mode",
    "control",
    "patient",
    "scheme",
    "B",
    "ratio-a",
    "dx",
    "dy",
    "q",
    "rule",
    "seed",
    "welch",
    "out",
    "N",
    "n-null",
    "nx",
    "ny",
    "delta",
    "sigma",
    "replicates",
    "per-replicate",
];

pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", i + 1)))?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(CliError::Usage(format!(
                "config line {}: unknown key {key:?}",
                i + 1
            )));
        }
        map.insert(key.to_owned(), value.trim().to_owned());
    }
    Ok(map)
}

fn from_file<T: FromStr>(file: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, CliError> {
    file.get(key)
        .map(|v| {
            v.parse()
                .map_err(|_| CliError::Usage(format!("config key {key}: cannot parse {v:?}")))
        })
        .transpose()
}

fn enum_from_file<T: ValueEnum>(file: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, CliError> {
    file.get(key)
        .map(|v| {
            T::from_str(v, false)
                .map_err(|_| CliError::Usage(format!("config key {key}: invalid value {v:?}")))
        })
        .transpose()
}

fn flag_from_file(file: &BTreeMap<String, String>, key: &str) -> Result<bool, CliError> {
    Ok(from_file::<bool>(file, key)?.unwrap_or(false))
}

/// Fully resolved configuration with defaults applied.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub control: Option<PathBuf>,
    pub patient: Option<PathBuf>,
    pub scheme: SchemeArg,
    pub b: usize,
    pub ratio_a: f64,
    pub dx: Option<usize>,
    pub dy: Option<usize>,
    pub q: f64,
    pub rule: RuleArg,
    pub seed: u64,
    pub welch: bool,
    pub out: PathBuf,
    pub n: usize,
    pub n_null: usize,
    pub nx: usize,
    pub ny: usize,
    pub delta: f64,
    pub sigma: f64,
    pub replicates: usize,
    pub per_replicate: bool,
}

pub const DEFAULT_B: usize = 50;
pub const DEFAULT_SEED: u64 = 0;

macro_rules! merged {
    ($args:expr, $file:expr, $field:ident, $key:literal) => {
        match $args.$field.clone() {
            Some(v) => Some(v),
            None => from_file($file, $key)?,
        }
    };
}

macro_rules! merged_enum {
    ($args:expr, $file:expr, $field:ident, $key:literal) => {
        match $args.$field {
            Some(v) => Some(v),
            None => enum_from_file($file, $key)?,
        }
    };
}

impl RunConfig {
    pub fn resolve(args: &Args) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
                parse_config_file(&text)?
            }
            None => BTreeMap::new(),
        };
        let file = &file;
        let reference = SimulationDesign::reference();

        let mode = merged_enum!(args, file, mode, "mode")
            .ok_or_else(|| CliError::Usage("--mode is required (analyze or simulate)".into()))?;
        let q = merged!(args, file, q, "q")
            .ok_or_else(|| CliError::Usage("--q is required: there is no default level".into()))?;
        let out =
            merged!(args, file, out, "out").ok_or_else(|| CliError::Usage("--out is required".into()))?;

        let cfg = RunConfig {
            mode,
            control: merged!(args, file, control, "control"),
            patient: merged!(args, file, patient, "patient"),
            scheme: merged_enum!(args, file, scheme, "scheme").unwrap_or(SchemeArg::Bagging),
            b: merged!(args, file, b, "B").unwrap_or(DEFAULT_B),
            ratio_a: merged!(args, file, ratio_a, "ratio-a").unwrap_or(DEFAULT_RATIO_A),
            dx: merged!(args, file, dx, "dx"),
            dy: merged!(args, file, dy, "dy"),
            q,
            rule: merged_enum!(args, file, rule, "rule").unwrap_or(RuleArg::I),
            seed: merged!(args, file, seed, "seed").unwrap_or(DEFAULT_SEED),
            welch: args.welch || flag_from_file(file, "welch")?,
            out,
            n: merged!(args, file, n, "N").unwrap_or(reference.n_rows),
            n_null: merged!(args, file, n_null, "n-null").unwrap_or(reference.n_null),
            nx: merged!(args, file, nx, "nx").unwrap_or(reference.n_x),
            ny: merged!(args, file, ny, "ny").unwrap_or(reference.n_y),
            delta: merged!(args, file, delta, "delta").unwrap_or(reference.effect_delta),
            sigma: merged!(args, file, sigma, "sigma").unwrap_or(reference.sigma),
            replicates: merged!(args, file, replicates, "replicates").unwrap_or(reference.replicates),
            per_replicate: args.per_replicate || flag_from_file(file, "per-replicate")?,
        };
        cfg.test_config()?;
        cfg.scheme()?;
        if mode == Mode::Analyze && (cfg.control.is_none() || cfg.patient.is_none()) {
            return Err(CliError::Usage("analyze needs --control and --patient".into()));
        }
        Ok(cfg)
    }

    pub fn test_config(&self) -> Result<TestConfig, CliError> {
        let mode = if self.welch {
            VarianceMode::Welch
        } else {
            VarianceMode::Pooled
        };
        TestConfig::new(self.q, mode).map_err(CliError::Input)
    }

    pub fn scheme(&self) -> Result<Scheme, CliError> {
        Ok(match self.scheme {
            SchemeArg::Bagging => Scheme::Bagging,
            SchemeArg::SubbagRandom => {
                if !(self.ratio_a > 0.0 && self.ratio_a <= 1.0) {
                    return Err(CliError::Usage(format!(
                        "--ratio-a must lie in (0, 1], got {}",
                        self.ratio_a
                    )));
                }
                Scheme::RandomSubbag(SubbagSpec::Ratio(self.ratio_a))
            }
            SchemeArg::MaxContrast => match (self.dx, self.dy) {
                (Some(d_x), Some(d_y)) => Scheme::MaxContrast { d_x, d_y },
                _ => return Err(CliError::Usage("max-contrast needs --dx and --dy".into())),
            },
        })
    }

    pub fn rule(&self) -> AggregationRule {
        match self.rule {
            RuleArg::I => AggregationRule::UNION,
            RuleArg::Ii => AggregationRule::SECOND_VOTE,
            RuleArg::IiStar => AggregationRule::WEIGHTED_SECOND_VOTE,
        }
    }

    pub fn design(&self) -> Result<SimulationDesign, CliError> {
        let test = self.test_config()?;
        let design = SimulationDesign {
            n_rows: self.n,
            n_null: self.n_null,
            n_x: self.nx,
            n_y: self.ny,
            effect_delta: self.delta,
            effects: None,
            sigma: self.sigma,
            scheme: self.scheme()?,
            b: self.b,
            level_q: test.level_q(),
            variance_mode: test.variance_mode(),
            rule: self.rule(),
            replicates: self.replicates,
            master_seed: self.seed,
        };
        design.validate().map_err(CliError::Input)?;
        Ok(design)
    }

    /// `key=value` lines accepted by `--config`, reproducing this run.
    /// Keys irrelevant to the mode are omitted.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k}={v}");
        };
        put("mode", value_name(self.mode));
        if self.mode == Mode::Analyze {
            put("control", path_str(self.control.as_ref()));
            put("patient", path_str(self.patient.as_ref()));
        }
        put("scheme", value_name(self.scheme));
        put("B", self.b.to_string());
        match self.scheme {
            SchemeArg::SubbagRandom => put("ratio-a", self.ratio_a.to_string()),
            SchemeArg::MaxContrast => {
                put("dx", opt_str(self.dx));
                put("dy", opt_str(self.dy));
            }
            SchemeArg::Bagging => {}
        }
        put("q", self.q.to_string());
        put("rule", value_name(self.rule));
        put("seed", self.seed.to_string());
        put("welch", self.welch.to_string());
        put("out", self.out.display().to_string());
        if self.mode == Mode::Simulate {
            put("N", self.n.to_string());
            put("n-null", self.n_null.to_string());
            put("nx", self.nx.to_string());
            put("ny", self.ny.to_string());
            put("delta", self.delta.to_string());
            put("sigma", self.sigma.to_string());
            put("replicates", self.replicates.to_string());
            put("per-replicate", self.per_replicate.to_string());
        }
        s
    }
}

pub fn value_name<T: ValueEnum>(v: T) -> String {
    v.to_possible_value()
        .map(|p| p.get_name().to_owned())
        .unwrap_or_default()
}

fn path_str(p: Option<&PathBuf>) -> String {
    p.map(|p| p.display().to_string()).unwrap_or_default()
}

fn opt_str(v: Option<usize>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}
