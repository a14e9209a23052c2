//! Command-line flags and the optional JSON config file they override.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "bsquad",
    version,
    about = "Quadrature with B-spline quasi-interpolation rules"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate a function once.
    Integrate(IntegrateArgs),
    /// Errors and observed orders over a sequence of grids.
    Convergence(ConvergenceArgs),
    /// Print the exact rule coefficients c, tau and xi for one order.
    Coeffs(CoeffsArgs),
    /// Compare rules at matched numbers of integrand evaluations.
    Evalcount(EvalcountArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleKind {
    Tp,
    Trapezoid,
    Simpson,
    Malpha,
    EulerMaclaurin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathKind {
    ClosedForm,
    PerCell,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SummationKind {
    #[default]
    Compensated,
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyKind {
    #[default]
    Shared,
    PerRule,
}

/// Reference value of a study: a number or `auto`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum RefSpec {
    #[default]
    Auto,
    Value(f64),
}

impl FromStr for RefSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(RefSpec::Auto);
        }
        match s.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(RefSpec::Value(v)),
            _ => Err(format!("expected a finite number or `auto`, got `{s}`")),
        }
    }
}

impl<'de> Deserialize<'de> for RefSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(RefSpec::Value(v)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Options shared by the integration commands.
#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Integrand, e.g. "exp(x^2)"; variables are x (1-D) or x1..xK.
    #[arg(long = "function", short = 'f', allow_hyphen_values = true)]
    pub function: Option<String>,
    /// Number of variables (1..=4).
    #[arg(long)]
    pub dims: Option<usize>,
    /// Lower bound; repeat once per axis.
    #[arg(long = "a", allow_negative_numbers = true)]
    pub a: Vec<f64>,
    /// Upper bound; repeat once per axis.
    #[arg(long = "b", allow_negative_numbers = true)]
    pub b: Vec<f64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Shorthand for --format json.
    #[arg(long)]
    pub json: bool,
    /// Write output here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON file with default values for any of these flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Accumulation used by the closed-form T^p path.
    #[arg(long, value_enum)]
    pub summation: Option<SummationKind>,
    /// Parameter of the malpha rule.
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
}

/// Rule selection for `integrate` and `convergence`.
#[derive(Debug, Args)]
pub struct RuleArgs {
    #[arg(long, value_enum)]
    pub rule: Option<RuleKind>,
    /// Order of the tp rule, or number of euler-maclaurin corrections.
    #[arg(long)]
    pub p: Option<usize>,
    /// Odd derivative f', f''', ... for euler-maclaurin; repeat in order.
    #[arg(long = "deriv", allow_hyphen_values = true)]
    pub deriv: Vec<String>,
    /// Evaluation path of the tp rule (default: closed form where N allows it).
    #[arg(long, value_enum)]
    pub path: Option<PathKind>,
}

#[derive(Debug, Args)]
pub struct IntegrateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub rule: RuleArgs,
    /// Number of subdivisions.
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub rule: RuleArgs,
    /// Comma-separated, strictly increasing subdivision counts.
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    /// Reference integral: a number or `auto`.
    #[arg(long = "ref")]
    pub reference: Option<RefSpec>,
}

#[derive(Debug, Args)]
pub struct EvalcountArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Comma-separated evaluation budgets.
    #[arg(long, value_delimiter = ',')]
    pub m: Vec<usize>,
    /// Comma-separated rules: tp1..tp16, trapezoid, simpson, malpha.
    #[arg(long, value_delimiter = ',')]
    pub rules: Vec<String>,
    #[arg(long = "ref")]
    pub reference: Option<RefSpec>,
    #[arg(long, value_enum)]
    pub budget_policy: Option<PolicyKind>,
}

#[derive(Debug, Args)]
pub struct CoeffsArgs {
    /// Rule order, 1..=16.
    #[arg(long)]
    pub p: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long)]
    pub json: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// One value or a list of them.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> OneOrMany<T> {
    fn into_vec(self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v],
            OneOrMany::Many(v) => v,
        }
    }
}

/// Contents of a `--config` file. Keys mirror the long flag names.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Config {
    pub function: Option<String>,
    pub dims: Option<usize>,
    pub a: Option<OneOrMany<f64>>,
    pub b: Option<OneOrMany<f64>>,
    pub n: Option<OneOrMany<usize>>,
    pub m: Option<Vec<usize>>,
    pub p: Option<usize>,
    pub rule: Option<RuleKind>,
    pub rules: Option<Vec<String>>,
    pub alpha: Option<f64>,
    pub deriv: Option<Vec<String>>,
    pub path: Option<PathKind>,
    pub summation: Option<SummationKind>,
    #[serde(rename = "ref")]
    pub reference: Option<RefSpec>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub budget_policy: Option<PolicyKind>,
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Config, CliError> {
        let Some(path) = path else {
            return Ok(Config::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Spec(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Spec(format!("invalid config {}: {e}", path.display())))
    }
}

/// Fully resolved settings common to every integration command.
#[derive(Debug)]
pub struct Common {
    pub function: String,
    pub dims: usize,
    pub intervals: Vec<(f64, f64)>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub summation: SummationKind,
    pub alpha: Option<f64>,
}

#[derive(Debug)]
pub struct RuleSettings {
    pub rule: RuleKind,
    pub p: Option<usize>,
    pub deriv: Vec<String>,
    pub path: Option<PathKind>,
}

fn non_empty<T>(flag: Vec<T>, file: Option<Vec<T>>) -> Vec<T> {
    if flag.is_empty() {
        file.unwrap_or_default()
    } else {
        flag
    }
}

impl CommonArgs {
    pub fn resolve(self, cfg: &mut Config) -> Result<Common, CliError> {
        let function = self
            .function
            .or(cfg.function.take())
            .ok_or_else(|| CliError::Spec("--function is required".into()))?;
        let a = non_empty(self.a, cfg.a.take().map(OneOrMany::into_vec));
        let b = non_empty(self.b, cfg.b.take().map(OneOrMany::into_vec));
        let dims = self.dims.or(cfg.dims).unwrap_or(a.len().max(1));
        if a.len() != dims || b.len() != dims {
            return Err(CliError::Spec(format!(
                "need one --a and one --b per axis: dims = {dims}, got {} and {}",
                a.len(),
                b.len()
            )));
        }
        let format = if self.json {
            Format::Json
        } else {
            self.format.or(cfg.format).unwrap_or_default()
        };
        Ok(Common {
            function,
            dims,
            intervals: a.into_iter().zip(b).collect(),
            format,
            out: self.out.or(cfg.out.take()),
            summation: self.summation.or(cfg.summation).unwrap_or_default(),
            alpha: self.alpha.or(cfg.alpha),
        })
    }
}

impl RuleArgs {
    pub fn resolve(self, cfg: &mut Config) -> Result<RuleSettings, CliError> {
        let rule = self
            .rule
            .or(cfg.rule)
            .ok_or_else(|| CliError::Spec("--rule is required".into()))?;
        Ok(RuleSettings {
            rule,
            p: self.p.or(cfg.p),
            deriv: non_empty(self.deriv, cfg.deriv.take()),
            path: self.path.or(cfg.path),
        })
    }
}

impl IntegrateArgs {
    pub fn n(&self, cfg: &mut Config) -> Result<usize, CliError> {
        if let Some(n) = self.n {
            return Ok(n);
        }
        match cfg.n.take().map(OneOrMany::into_vec).as_deref() {
            Some([n]) => Ok(*n),
            Some(_) => Err(CliError::Spec("integrate takes a single N".into())),
            None => Err(CliError::Spec("--n is required".into())),
        }
    }
}

impl ConvergenceArgs {
    pub fn ns(&mut self, cfg: &mut Config) -> Vec<usize> {
        non_empty(
            std::mem::take(&mut self.n),
            cfg.n.take().map(OneOrMany::into_vec),
        )
    }
}
