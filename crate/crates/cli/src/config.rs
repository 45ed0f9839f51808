//! TOML run configuration. The schema is documented in `docs/config.md`.

use std::ops::Range;
use std::path::PathBuf;

use decoherence::{
    spin_boson_to_qubit, FormFactor64, InitialState64, QubitSystem64, ReservoirSpec64, SpinBosonParams64,
};
use num_complex::Complex64;
use serde::Deserialize;
use toml::Spanned;

use crate::error::{CliError, Result};

/// Schema version understood by this build.
pub const SCHEMA_VERSION: u32 = 1;

pub const SUPPORTED_INITIAL_STATES: [&str; 4] = ["logic1", "logic2", "illustration", "custom_diagonal"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SystemConfig {
    Qubit { delta: f64, a: f64, b: f64, c: Complex64 },
    SpinBoson { epsilon: f64, delta0: f64, hbar: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormFactorConfig {
    pub p: f64,
    pub m: u32,
    /// `None` for the isotropic profile `g₁ ≡ 1`.
    pub angular_norm: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t_start: f64,
    pub t_end: f64,
    pub steps: usize,
}

impl TimeGrid {
    pub fn points(&self) -> Vec<f64> {
        linspace(self.t_start, self.t_end, self.steps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub modes: usize,
    pub n_max: usize,
    pub omega_max: f64,
    pub budget: usize,
    pub fit_window: Option<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum SweepParameter {
    #[serde(rename = "lambda")]
    Lambda,
    #[serde(rename = "beta")]
    Beta,
    #[serde(rename = "Delta")]
    Delta,
    #[serde(rename = "epsilon")]
    Epsilon,
    #[serde(rename = "Delta0")]
    Delta0,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::Lambda => "lambda",
            SweepParameter::Beta => "beta",
            SweepParameter::Delta => "Delta",
            SweepParameter::Epsilon => "epsilon",
            SweepParameter::Delta0 => "Delta0",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub format: Format,
    pub path: Option<PathBuf>,
}

/// Fully validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub form_factor: FormFactorConfig,
    pub beta: f64,
    pub system: SystemConfig,
    pub lambda: f64,
    pub initial_state: InitialState64,
    pub time: TimeGrid,
    pub oracle: OracleConfig,
    pub output: OutputConfig,
    pub sweep: Option<SweepConfig>,
    pub xi: TimeGrid,
}

impl RunConfig {
    pub fn form_factor(&self) -> Result<FormFactor64> {
        let ff = FormFactor64::from_exponents(self.form_factor.p, self.form_factor.m)?;
        Ok(match self.form_factor.angular_norm {
            Some(norm) => ff.with_angular_norm(norm)?,
            None => ff,
        })
    }

    pub fn reservoir(&self) -> Result<ReservoirSpec64> {
        Ok(ReservoirSpec64::new(self.beta)?)
    }

    /// The qubit in its energy basis; spin-boson parameters are mapped first.
    pub fn qubit(&self) -> Result<QubitSystem64> {
        Ok(match self.system {
            SystemConfig::Qubit { delta, a, b, c } => QubitSystem64::new(delta, a, b, c)?,
            SystemConfig::SpinBoson { epsilon, delta0, hbar } => {
                spin_boson_to_qubit(&SpinBosonParams64::with_hbar(epsilon, delta0, hbar)?)?
            }
        })
    }

    /// Copy with one sweep parameter replaced, revalidated.
    pub fn with_parameter(&self, parameter: SweepParameter, value: f64) -> Result<Self> {
        let mut out = self.clone();
        let path = format!("sweep.{}", parameter.name());
        match (parameter, &mut out.system) {
            (SweepParameter::Lambda, _) => out.lambda = finite(&path, value)?,
            (SweepParameter::Beta, _) => out.beta = positive(&path, value)?,
            (SweepParameter::Delta, SystemConfig::Qubit { delta, .. }) => *delta = positive(&path, value)?,
            (SweepParameter::Epsilon, SystemConfig::SpinBoson { epsilon, .. }) => *epsilon = finite(&path, value)?,
            (SweepParameter::Delta0, SystemConfig::SpinBoson { delta0, .. }) => *delta0 = finite(&path, value)?,
            _ => {
                return Err(CliError::validation(
                    "sweep.parameter",
                    format!("`{}` does not apply to the configured system", parameter.name()),
                ))
            }
        }
        out.qubit()?;
        Ok(out)
    }
}

pub fn linspace(start: f64, end: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![start];
    }
    let h = (end - start) / (steps - 1) as f64;
    (0..steps).map(|i| if i + 1 == steps { end } else { start + h * i as f64 }).collect()
}

fn finite(path: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::validation(path, format!("must be finite, got {v}")))
    }
}

fn positive(path: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::validation(path, format!("must be positive and finite, got {v}")))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    schema_version: Option<Spanned<u32>>,
    lambda: Spanned<f64>,
    initial_state: Option<Spanned<String>>,
    custom_population: Option<Spanned<f64>>,
    form_factor: Spanned<RawFormFactor>,
    reservoir: Spanned<RawReservoir>,
    qubit: Option<Spanned<RawQubit>>,
    spin_boson: Option<Spanned<RawSpinBoson>>,
    time: Option<RawTime>,
    oracle: Option<RawOracle>,
    output: Option<RawOutput>,
    sweep: Option<RawSweep>,
    xi: Option<RawXi>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawAngularNorm {
    Named(String),
    Value(f64),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFormFactor {
    p: Spanned<f64>,
    m: Spanned<u32>,
    angular_norm: Option<Spanned<RawAngularNorm>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawReservoir {
    beta: Spanned<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQubit {
    #[serde(rename = "Delta")]
    delta: Spanned<f64>,
    a: Spanned<f64>,
    b: Spanned<f64>,
    c: Spanned<f64>,
    c_im: Option<Spanned<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpinBoson {
    epsilon: Spanned<f64>,
    #[serde(rename = "Delta0")]
    delta0: Spanned<f64>,
    hbar: Option<Spanned<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTime {
    t_start: Option<Spanned<f64>>,
    t_end: Option<Spanned<f64>>,
    steps: Option<Spanned<i64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOracle {
    #[serde(rename = "M")]
    modes: Option<Spanned<i64>>,
    n_max: Option<Spanned<i64>>,
    omega_max: Option<Spanned<f64>>,
    budget: Option<Spanned<i64>>,
    fit_window: Option<Spanned<Vec<f64>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    format: Option<Format>,
    path: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    parameter: Spanned<SweepParameter>,
    values: Spanned<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawXi {
    eta_start: Option<Spanned<f64>>,
    eta_end: Option<Spanned<f64>>,
    steps: Option<Spanned<i64>>,
}

/// Maps byte spans to 1-based line numbers for error messages.
struct Locator<'a> {
    text: &'a str,
}

impl Locator<'_> {
    fn line(&self, span: Range<usize>) -> usize {
        self.text[..span.start.min(self.text.len())].matches('\n').count() + 1
    }

    fn error<T>(&self, path: &str, v: &Spanned<T>, message: impl Into<String>) -> CliError {
        CliError::Validation { path: path.to_string(), line: Some(self.line(v.span())), message: message.into() }
    }

    fn finite(&self, path: &str, v: &Spanned<f64>) -> Result<f64> {
        let x = *v.get_ref();
        if x.is_finite() {
            Ok(x)
        } else {
            Err(self.error(path, v, format!("must be finite, got {x}")))
        }
    }

    fn positive(&self, path: &str, v: &Spanned<f64>) -> Result<f64> {
        let x = *v.get_ref();
        if x > 0.0 && x.is_finite() {
            Ok(x)
        } else {
            Err(self.error(path, v, format!("must be positive and finite, got {x}")))
        }
    }

    fn count(&self, path: &str, v: &Spanned<i64>, min: i64) -> Result<usize> {
        let x = *v.get_ref();
        if x >= min {
            Ok(x as usize)
        } else {
            Err(self.error(path, v, format!("must be at least {min}, got {x}")))
        }
    }

    fn grid(
        &self,
        section: &str,
        names: [&str; 3],
        start: Option<&Spanned<f64>>,
        end: Option<&Spanned<f64>>,
        steps: Option<&Spanned<i64>>,
        defaults: (f64, f64, usize),
    ) -> Result<TimeGrid> {
        let path = |k: &str| format!("{section}.{k}");
        let t_start = match start {
            Some(v) => {
                let x = self.finite(&path(names[0]), v)?;
                if x < 0.0 {
                    return Err(self.error(&path(names[0]), v, format!("must be nonnegative, got {x}")));
                }
                x
            }
            None => defaults.0,
        };
        let steps = match steps {
            Some(v) => self.count(&path(names[2]), v, 1)?,
            None => defaults.2,
        };
        let t_end = match end {
            Some(v) => {
                let x = self.finite(&path(names[1]), v)?;
                if x < t_start || (steps > 1 && x == t_start) {
                    return Err(self.error(
                        &path(names[1]),
                        v,
                        format!("must exceed {} = {t_start}, got {x}", names[0]),
                    ));
                }
                x
            }
            None if defaults.1 > t_start || steps == 1 => defaults.1,
            None => {
                return Err(CliError::validation(path(names[1]), "required when the start exceeds the default end"))
            }
        };
        Ok(TimeGrid { t_start, t_end, steps })
    }
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    let loc = Locator { text };

    if let Some(v) = &raw.schema_version {
        if *v.get_ref() != SCHEMA_VERSION {
            return Err(loc.error("schema_version", v, format!("unsupported version, expected {SCHEMA_VERSION}")));
        }
    }

    let ff = raw.form_factor.get_ref();
    let p = loc.finite("form_factor.p", &ff.p)?;
    let n = p + 0.5;
    if !(n >= 0.0 && n.fract() == 0.0 && n <= 12.0) {
        return Err(loc.error("form_factor.p", &ff.p, format!("must be n - 1/2 with n in 0..=12, got {p}")));
    }
    let m = *ff.m.get_ref();
    if m != 1 && m != 2 {
        return Err(loc.error("form_factor.m", &ff.m, format!("must be 1 or 2, got {m}")));
    }
    let angular_norm = match &ff.angular_norm {
        None => None,
        Some(v) => match v.get_ref() {
            RawAngularNorm::Named(s) if s == "isotropic" => None,
            RawAngularNorm::Named(s) => {
                return Err(loc.error(
                    "form_factor.angular_norm",
                    v,
                    format!("expected a positive number or \"isotropic\", got \"{s}\""),
                ))
            }
            RawAngularNorm::Value(x) => {
                if !(*x > 0.0 && x.is_finite()) {
                    return Err(loc.error("form_factor.angular_norm", v, format!("must be positive and finite, got {x}")));
                }
                Some(*x)
            }
        },
    };

    let beta = loc.positive("reservoir.beta", &raw.reservoir.get_ref().beta)?;
    let lambda = loc.finite("lambda", &raw.lambda)?;

    let system = match (&raw.qubit, &raw.spin_boson) {
        (Some(_), Some(sb)) => {
            return Err(loc.error("spin_boson", sb, "the qubit and spin_boson sections are mutually exclusive"))
        }
        (None, None) => return Err(CliError::validation("system", "one of the qubit or spin_boson sections is required")),
        (Some(q), None) => {
            let q = q.get_ref();
            let c_im = match &q.c_im {
                Some(v) => loc.finite("qubit.c_im", v)?,
                None => 0.0,
            };
            SystemConfig::Qubit {
                delta: loc.positive("qubit.Delta", &q.delta)?,
                a: loc.finite("qubit.a", &q.a)?,
                b: loc.finite("qubit.b", &q.b)?,
                c: Complex64::new(loc.finite("qubit.c", &q.c)?, c_im),
            }
        }
        (None, Some(sb_span)) => {
            let sb = sb_span.get_ref();
            let epsilon = loc.finite("spin_boson.epsilon", &sb.epsilon)?;
            let delta0 = loc.finite("spin_boson.Delta0", &sb.delta0)?;
            let hbar = match &sb.hbar {
                Some(v) => loc.positive("spin_boson.hbar", v)?,
                None => 1.0,
            };
            if epsilon == 0.0 && delta0 == 0.0 {
                return Err(loc.error("spin_boson", sb_span, "epsilon = Delta0 = 0 gives a degenerate qubit"));
            }
            SystemConfig::SpinBoson { epsilon, delta0, hbar }
        }
    };

    let initial_state = match &raw.initial_state {
        None => InitialState64::IllustrationCoherent,
        Some(tag) => match tag.get_ref().as_str() {
            "logic1" => InitialState64::LogicState(1),
            "logic2" => InitialState64::LogicState(2),
            "illustration" => InitialState64::IllustrationCoherent,
            "custom_diagonal" => {
                let Some(q) = &raw.custom_population else {
                    return Err(loc.error("custom_population", tag, "required by initial_state = \"custom_diagonal\""));
                };
                let x = *q.get_ref();
                if !(0.0..=1.0).contains(&x) {
                    return Err(loc.error("custom_population", q, format!("must lie in [0, 1], got {x}")));
                }
                InitialState64::CustomDiagonal(x)
            }
            other => {
                return Err(loc.error(
                    "initial_state",
                    tag,
                    format!("unknown tag \"{other}\"; supported: {}", SUPPORTED_INITIAL_STATES.join(", ")),
                ))
            }
        },
    };
    if let (Some(q), false) = (&raw.custom_population, matches!(initial_state, InitialState64::CustomDiagonal(_))) {
        return Err(loc.error("custom_population", q, "only valid with initial_state = \"custom_diagonal\""));
    }

    let time = {
        let t = raw.time.as_ref();
        loc.grid(
            "time",
            ["t_start", "t_end", "steps"],
            t.and_then(|t| t.t_start.as_ref()),
            t.and_then(|t| t.t_end.as_ref()),
            t.and_then(|t| t.steps.as_ref()),
            (0.0, 10.0, 101),
        )?
    };
    let xi = {
        let x = raw.xi.as_ref();
        loc.grid(
            "xi",
            ["eta_start", "eta_end", "steps"],
            x.and_then(|x| x.eta_start.as_ref()),
            x.and_then(|x| x.eta_end.as_ref()),
            x.and_then(|x| x.steps.as_ref()),
            (0.0, 5.0, 51),
        )?
    };

    let oracle = {
        let o = raw.oracle.as_ref();
        let modes = match o.and_then(|o| o.modes.as_ref()) {
            Some(v) => loc.count("oracle.M", v, 1)?,
            None => 5,
        };
        let n_max = match o.and_then(|o| o.n_max.as_ref()) {
            Some(v) => loc.count("oracle.n_max", v, 1)?,
            None => 3,
        };
        let omega_max = match o.and_then(|o| o.omega_max.as_ref()) {
            Some(v) => loc.positive("oracle.omega_max", v)?,
            None => 6.0,
        };
        let budget = match o.and_then(|o| o.budget.as_ref()) {
            Some(v) => loc.count("oracle.budget", v, 2)?,
            None => decoherence_oracle::DEFAULT_BUDGET,
        };
        let fit_window = match o.and_then(|o| o.fit_window.as_ref()) {
            None => None,
            Some(v) => match v.get_ref().as_slice() {
                &[t1, t2] if t1 >= 0.0 && t1 < t2 && t2.is_finite() => Some((t1, t2)),
                _ => return Err(loc.error("oracle.fit_window", v, "expected [t1, t2] with 0 <= t1 < t2")),
            },
        };
        OracleConfig { modes, n_max, omega_max, budget, fit_window }
    };

    let output = {
        let o = raw.output.as_ref();
        OutputConfig {
            format: o.and_then(|o| o.format).unwrap_or(Format::Csv),
            path: o.and_then(|o| o.path.clone()),
        }
    };

    let cfg = RunConfig {
        form_factor: FormFactorConfig { p, m, angular_norm },
        beta,
        system,
        lambda,
        initial_state,
        time,
        oracle,
        output,
        sweep: None,
        xi,
    };

    let sweep = match &raw.sweep {
        None => None,
        Some(s) => {
            let parameter = *s.parameter.get_ref();
            for (i, &v) in s.values.get_ref().iter().enumerate() {
                cfg.with_parameter(parameter, v).map_err(|e| match e {
                    CliError::Validation { message, .. } => {
                        loc.error(&format!("sweep.values[{i}]"), &s.values, message)
                    }
                    other => other,
                })?;
            }
            if s.values.get_ref().is_empty() {
                // Still reject parameters that cannot apply to this system.
                cfg.with_parameter(parameter, probe_value(&cfg, parameter))
                    .map_err(|_| loc.error("sweep.parameter", &s.parameter, "does not apply to the configured system"))?;
            }
            Some(SweepConfig { parameter, values: s.values.get_ref().clone() })
        }
    };
    Ok(RunConfig { sweep, ..cfg })
}

/// A value of `parameter` already valid in `cfg`, used to check applicability.
fn probe_value(cfg: &RunConfig, parameter: SweepParameter) -> f64 {
    match (parameter, cfg.system) {
        (SweepParameter::Lambda, _) => cfg.lambda,
        (SweepParameter::Beta, _) => cfg.beta,
        (SweepParameter::Delta, SystemConfig::Qubit { delta, .. }) => delta,
        (SweepParameter::Epsilon, SystemConfig::SpinBoson { epsilon, .. }) => epsilon,
        (SweepParameter::Delta0, SystemConfig::SpinBoson { delta0, .. }) => delta0,
        _ => f64::NAN,
    }
}
