use std::fs;
use std::path::{Path, PathBuf};

use log::info;
use serde::{Deserialize, Deserializer};

use super::{CliError, CliResult};
use crate::riesz::{DomainPartition, RationalOrder};
use crate::soliton::ContinuationStep;

/// Parameters of a run, as a JSON document or as command-line flags. JSON
/// keys are the flag names without dashes; unset values fall back to the
/// defaults of the command.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[cfg_attr(feature = "cli", derive(clap::Args))]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct RunConfig {
    /// Order as p/q; a decimal is converted to lowest terms
    #[cfg_attr(feature = "cli", arg(long))]
    #[serde(deserialize_with = "text_or_number")]
    pub alpha: Option<String>,

    /// Builtin function (lorentz, gauss, powerlaw) or `file`
    #[cfg_attr(feature = "cli", arg(long))]
    pub func: Option<String>,

    /// Sampled function document; implies `--func file`
    #[cfg_attr(feature = "cli", arg(long))]
    pub input: Option<PathBuf>,

    /// Left end of the middle domain (negative)
    #[cfg_attr(feature = "cli", arg(long, allow_hyphen_values = true))]
    pub a: Option<f64>,

    /// Right end of the middle domain (positive)
    #[cfg_attr(feature = "cli", arg(long))]
    pub b: Option<f64>,

    /// Polynomial degree of every domain
    #[cfg_attr(feature = "cli", arg(long = "N"))]
    #[serde(rename = "N")]
    pub n: Option<usize>,

    /// Near-boundary threshold of the quadrature
    #[cfg_attr(feature = "cli", arg(long))]
    pub delta: Option<f64>,

    /// Wave speed
    #[cfg_attr(feature = "cli", arg(long))]
    pub c: Option<f64>,

    /// Coefficient of the nonlinearity
    #[cfg_attr(feature = "cli", arg(long))]
    pub kappa: Option<f64>,

    /// Power of the nonlinearity
    #[cfg_attr(feature = "cli", arg(long))]
    pub n_power: Option<u32>,

    /// Newton tolerance on the largest residual entry
    #[cfg_attr(feature = "cli", arg(long))]
    pub tol: Option<f64>,

    /// Newton step limit
    #[cfg_attr(feature = "cli", arg(long))]
    pub max_newton: Option<usize>,

    /// Torus half period (the torus is [-πL, πL))
    #[cfg_attr(feature = "cli", arg(long = "L"))]
    #[serde(rename = "L")]
    pub half_period: Option<f64>,

    /// Number of torus samples
    #[cfg_attr(feature = "cli", arg(long))]
    pub nfft: Option<usize>,

    /// Comma-separated decreasing orders for `trace`
    #[cfg_attr(feature = "cli", arg(long))]
    #[serde(deserialize_with = "list_or_text")]
    pub alphas: Option<String>,

    /// Per-stage partitions for `trace` (config file only)
    #[cfg_attr(feature = "cli", arg(skip))]
    pub schedule: Option<Vec<ScheduleEntry>>,

    /// Output directory
    #[cfg_attr(feature = "cli", arg(long))]
    pub out: Option<PathBuf>,
}

/// One `trace` stage with its own partition.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleEntry {
    #[serde(deserialize_with = "required_text_or_number")]
    pub alpha: String,
    pub a: f64,
    pub b: f64,
    pub delta: f64,
    #[serde(rename = "N")]
    pub n: usize,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Scalar {
    Text(String),
    Number(f64),
}

impl Scalar {
    fn into_text(self) -> String {
        match self {
            Scalar::Text(s) => s,
            Scalar::Number(x) => x.to_string(),
        }
    }
}

fn text_or_number<'de, D: Deserializer<'de>>(d: D) -> Result<Option<String>, D::Error> {
    Ok(Option::<Scalar>::deserialize(d)?.map(Scalar::into_text))
}

fn required_text_or_number<'de, D: Deserializer<'de>>(d: D) -> Result<String, D::Error> {
    Ok(Scalar::deserialize(d)?.into_text())
}

fn list_or_text<'de, D: Deserializer<'de>>(d: D) -> Result<Option<String>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum ListOrText {
        List(Vec<Scalar>),
        One(Scalar),
    }
    Ok(Option::<ListOrText>::deserialize(d)?.map(|v| match v {
        ListOrText::List(items) => items.into_iter().map(Scalar::into_text).collect::<Vec<_>>().join(","),
        ListOrText::One(s) => s.into_text(),
    }))
}

/// Parses an order, announcing decimal conversions.
pub(crate) fn parse_order(text: &str, flag: &str) -> CliResult<RationalOrder> {
    let (order, converted) =
        RationalOrder::parse(text).map_err(|e| CliError::Usage(format!("{flag}: {e}")))?;
    if converted {
        info!("{flag} {text} read as {order}");
    }
    Ok(order)
}

impl RunConfig {
    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(CliError::io(path))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    /// Values set here win over those of `base`.
    pub fn over(self, base: RunConfig) -> RunConfig {
        RunConfig {
            alpha: self.alpha.or(base.alpha),
            func: self.func.or(base.func),
            input: self.input.or(base.input),
            a: self.a.or(base.a),
            b: self.b.or(base.b),
            n: self.n.or(base.n),
            delta: self.delta.or(base.delta),
            c: self.c.or(base.c),
            kappa: self.kappa.or(base.kappa),
            n_power: self.n_power.or(base.n_power),
            tol: self.tol.or(base.tol),
            max_newton: self.max_newton.or(base.max_newton),
            half_period: self.half_period.or(base.half_period),
            nfft: self.nfft.or(base.nfft),
            alphas: self.alphas.or(base.alphas),
            schedule: self.schedule.or(base.schedule),
            out: self.out.or(base.out),
        }
    }

    pub(crate) fn order_or(&self, default: &str) -> CliResult<RationalOrder> {
        parse_order(self.alpha.as_deref().unwrap_or(default), "--alpha")
    }

    /// Uniform partition from `--a --b --delta --N` with the given fallbacks.
    pub(crate) fn partition_or(&self, a: f64, b: f64, delta: f64, n: usize) -> CliResult<DomainPartition> {
        let (a, b) = (self.a.unwrap_or(a), self.b.unwrap_or(b));
        let delta = self.delta.unwrap_or_else(|| delta.min(0.5 * a.abs().min(b).min(1.0)));
        DomainPartition::uniform(a, b, delta, self.n.unwrap_or(n))
            .map_err(|e| CliError::Usage(format!("--a/--b/--delta/--N: {e}")))
    }

    pub(crate) fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    pub(crate) fn positive(value: Option<f64>, default: f64, flag: &str) -> CliResult<f64> {
        let v = value.unwrap_or(default);
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(CliError::Usage(format!("{flag} must be a positive number, got {v}")))
        }
    }

    /// Stages of `trace`: the config-file schedule, or `--alphas` on the
    /// flag partition, or `None` for the built-in branch.
    pub(crate) fn stages(&self) -> CliResult<Option<Vec<ContinuationStep>>> {
        if let Some(entries) = &self.schedule {
            if self.alphas.is_some() {
                return Err(CliError::Usage("give either a schedule or --alphas, not both".into()));
            }
            return entries
                .iter()
                .map(|e| {
                    let order = parse_order(&e.alpha, "schedule alpha")?;
                    let partition = DomainPartition::uniform(e.a, e.b, e.delta, e.n)
                        .map_err(|err| CliError::Usage(format!("schedule entry {}: {err}", e.alpha)))?;
                    Ok(ContinuationStep { order, partition })
                })
                .collect::<CliResult<Vec<_>>>()
                .map(Some);
        }
        let Some(list) = &self.alphas else {
            return Ok(None);
        };
        let partition = self.partition_or(-1.0, 1.0, 1e-2, 200)?;
        list.split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| {
                Ok(ContinuationStep {
                    order: parse_order(s, "--alphas")?,
                    partition,
                })
            })
            .collect::<CliResult<Vec<_>>>()
            .map(Some)
    }
}
