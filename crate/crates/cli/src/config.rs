//! Experiment configuration: a line-oriented `key = value` format with
//! `[section]` headers and `#` comments.
//!
//! ```text
//! [geometry]
//! m = 32
//! angles = 60
//! beams = 45
//!
//! [experiment]
//! noise = 0.05, 0.10, 0.20
//! solvers = ista, fista, gd, lm, newton
//! repetitions = 1
//! seed = 42
//!
//! [solver]            # shared by every solver
//! tau = 1.1
//!
//! [solver.newton]     # overrides for one solver
//! epsilon_factor = 1e-4
//! ```
//!
//! Parsing is strict: unknown sections or keys, duplicate keys and missing
//! required keys (`geometry.m`, `experiment.solvers`) are errors.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use l1tik::solvers::{Armijo, Method, Momentum, SolverConfig, StepSize};
use l1tik::tomo::TomoGeometry;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("cannot read config {path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("line {line}: malformed line '{text}' (expected `key = value` or `[section]`)")]
    Malformed { line: usize, text: String },
    #[error("line {line}: unknown section [{section}]")]
    UnknownSection { line: usize, section: String },
    #[error("line {line}: unknown key '{key}' in [{section}]")]
    UnknownKey {
        line: usize,
        section: String,
        key: String,
    },
    #[error("line {second}: duplicate key '{key}' in [{section}] (first set on line {first})")]
    DuplicateKey {
        section: String,
        key: String,
        first: usize,
        second: usize,
    },
    #[error("missing required key '{0}'")]
    Missing(&'static str),
    #[error("line {line}: invalid value for '{key}': {message}")]
    Invalid {
        line: usize,
        key: String,
        message: String,
    },
}

/// Per-solver settings. Noise-dependent quantities are stored as factors of
/// the absolute noise level `δ` and resolved per run.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverSettings {
    pub method: Method,
    pub tau: f64,
    /// Absolute smoothing parameter; takes precedence over `epsilon_factor`.
    pub epsilon: Option<f64>,
    /// `ε = epsilon_factor·δ`.
    pub epsilon_factor: Option<f64>,
    pub omega: StepSize<f64>,
    pub momentum: Momentum<f64>,
    pub armijo_step: f64,
    pub armijo_shrink: f64,
    pub armijo_slope: f64,
    /// `α₀ = lm_alpha0_factor·δ`.
    pub lm_alpha0_factor: f64,
    pub lm_decay: f64,
    pub max_iter: usize,
    pub inner_tol: f64,
    pub inner_max_iter: Option<usize>,
    pub grad_tol: f64,
    pub warm_start: usize,
}

impl SolverSettings {
    /// Documented defaults: `τ = 1.1`, automatic ω, Nesterov momentum,
    /// `α_n = 0.6ⁿδ`, the method's own smoothing default, and a 5-step FISTA
    /// warm start for transformed-variable methods.
    pub fn defaults(method: Method) -> Self {
        let base = SolverConfig::<f64>::default();
        Self {
            method,
            tau: base.tau,
            epsilon: None,
            epsilon_factor: None,
            omega: StepSize::Auto,
            momentum: Momentum::Nesterov,
            armijo_step: base.armijo.initial_step,
            armijo_shrink: base.armijo.shrink,
            armijo_slope: base.armijo.slope,
            lm_alpha0_factor: 1.0,
            lm_decay: base.lm_decay,
            max_iter: base.max_iter,
            inner_tol: base.inner_tol,
            inner_max_iter: None,
            grad_tol: base.grad_tol,
            warm_start: if method.is_transformed() { 5 } else { 0 },
        }
    }

    /// Solver configuration for a run at absolute noise level `delta`.
    pub fn resolve(&self, delta: f64) -> SolverConfig<f64> {
        let base = SolverConfig::<f64>::default();
        SolverConfig {
            tau: self.tau,
            epsilon: self.epsilon.or_else(|| self.epsilon_factor.map(|f| f * delta)),
            omega: self.omega,
            momentum: self.momentum,
            armijo: Armijo {
                initial_step: self.armijo_step,
                shrink: self.armijo_shrink,
                slope: self.armijo_slope,
                ..base.armijo
            },
            lm_alpha0: (delta > 0.0).then_some(self.lm_alpha0_factor * delta),
            lm_decay: self.lm_decay,
            max_iter: self.max_iter,
            inner_tol: self.inner_tol,
            inner_max_iter: self.inner_max_iter,
            grad_tol: self.grad_tol,
            warm_start_iters: self.warm_start,
            ..base
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub geometry: TomoGeometry,
    pub noise_levels: Vec<f64>,
    pub solvers: Vec<SolverSettings>,
    pub output: PathBuf,
    pub seed: u64,
    pub repetitions: usize,
    pub threads: usize,
    /// Regularization weight `α = alpha_factor·δ`, unless `alpha` is set.
    pub alpha_factor: f64,
    pub alpha: Option<f64>,
    /// When false, every wall-clock column is written as 0.
    pub timing: bool,
}

impl ExperimentConfig {
    /// Desk-scale defaults: 32×32 image, 60 angles, 45 beams.
    pub fn with_solvers(methods: &[Method]) -> Self {
        Self {
            geometry: TomoGeometry::new(32, 60, 45).expect("valid default geometry"),
            noise_levels: vec![0.1],
            solvers: methods.iter().map(|&m| SolverSettings::defaults(m)).collect(),
            output: PathBuf::from("out"),
            seed: 42,
            repetitions: 1,
            threads: 1,
            alpha_factor: 1.0,
            alpha: None,
            timing: true,
        }
    }

    pub fn alpha_for(&self, delta: f64) -> f64 {
        self.alpha.unwrap_or(self.alpha_factor * delta)
    }
}

pub fn parse_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    parse_config_str(&text)
}

#[derive(Debug, Clone)]
struct Entry {
    line: usize,
    value: String,
}

type Sections = BTreeMap<String, (usize, BTreeMap<String, Entry>)>;

const GEOMETRY_KEYS: &[&str] = &["m", "angles", "beams", "spacing"];
const EXPERIMENT_KEYS: &[&str] = &[
    "noise",
    "solvers",
    "repetitions",
    "seed",
    "output",
    "threads",
    "alpha",
    "alpha_factor",
    "timing",
];
const SOLVER_KEYS: &[&str] = &[
    "tau",
    "epsilon",
    "epsilon_factor",
    "omega",
    "beta",
    "armijo_step",
    "armijo_shrink",
    "armijo_slope",
    "lm_alpha0_factor",
    "lm_decay",
    "max_iter",
    "inner_tol",
    "inner_max_iter",
    "grad_tol",
    "warm_start",
];

fn allowed_keys(section: &str) -> Option<&'static [&'static str]> {
    match section {
        "geometry" => Some(GEOMETRY_KEYS),
        "experiment" => Some(EXPERIMENT_KEYS),
        "solver" => Some(SOLVER_KEYS),
        s if s.starts_with("solver.") => Some(SOLVER_KEYS),
        _ => None,
    }
}

fn lex(text: &str) -> Result<Sections, ConfigError> {
    let mut sections: Sections = BTreeMap::new();
    let mut current: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .map(str::trim)
                .filter(|n| !n.is_empty())
                .ok_or_else(|| ConfigError::Malformed {
                    line,
                    text: raw.trim().to_string(),
                })?;
            if allowed_keys(name).is_none() {
                return Err(ConfigError::UnknownSection {
                    line,
                    section: name.to_string(),
                });
            }
            if let Some(solver) = name.strip_prefix("solver.") {
                solver.parse::<Method>().map_err(|e| ConfigError::Invalid {
                    line,
                    key: name.to_string(),
                    message: e.to_string(),
                })?;
            }
            sections.entry(name.to_string()).or_insert((line, BTreeMap::new()));
            current = Some(name.to_string());
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Malformed {
            line,
            text: raw.trim().to_string(),
        })?;
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() || value.is_empty() || key.contains(char::is_whitespace) {
            return Err(ConfigError::Malformed {
                line,
                text: raw.trim().to_string(),
            });
        }
        let section = current.clone().ok_or_else(|| ConfigError::Malformed {
            line,
            text: format!("{} (key outside any [section])", raw.trim()),
        })?;
        let allowed = allowed_keys(&section).expect("section validated on entry");
        if !allowed.contains(&key) {
            return Err(ConfigError::UnknownKey {
                line,
                section,
                key: key.to_string(),
            });
        }
        let entries = &mut sections.get_mut(&section).expect("section registered").1;
        if let Some(first) = entries.get(key) {
            return Err(ConfigError::DuplicateKey {
                section,
                key: key.to_string(),
                first: first.line,
                second: line,
            });
        }
        entries.insert(
            key.to_string(),
            Entry {
                line,
                value: value.to_string(),
            },
        );
    }
    Ok(sections)
}

fn invalid(entry: &Entry, key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        line: entry.line,
        key: key.to_string(),
        message: message.into(),
    }
}

fn parse_num<T: std::str::FromStr>(entry: &Entry, key: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    entry
        .value
        .parse::<T>()
        .map_err(|e| invalid(entry, key, format!("'{}': {e}", entry.value)))
}

fn parse_positive(entry: &Entry, key: &str) -> Result<f64, ConfigError> {
    let v: f64 = parse_num(entry, key)?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(entry, key, format!("{key} must be positive, got {v}")))
    }
}

fn parse_unit_interval(entry: &Entry, key: &str) -> Result<f64, ConfigError> {
    let v: f64 = parse_num(entry, key)?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(invalid(entry, key, format!("{key} must lie in (0, 1), got {v}")))
    }
}

fn parse_bool(entry: &Entry, key: &str) -> Result<bool, ConfigError> {
    match entry.value.to_ascii_lowercase().as_str() {
        "true" | "on" | "yes" | "1" => Ok(true),
        "false" | "off" | "no" | "0" => Ok(false),
        other => Err(invalid(entry, key, format!("expected a boolean, got '{other}'"))),
    }
}

fn list(entry: &Entry) -> impl Iterator<Item = &str> {
    entry.value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn apply_solver_keys(
    settings: &mut SolverSettings,
    entries: &BTreeMap<String, Entry>,
) -> Result<(), ConfigError> {
    for (key, e) in entries {
        let k = key.as_str();
        match k {
            "tau" => {
                let tau: f64 = parse_num(e, k)?;
                if !(tau > 1.0) {
                    return Err(invalid(e, k, format!("tau must exceed 1, got {tau}")));
                }
                settings.tau = tau;
            }
            "epsilon" => {
                let v: f64 = parse_num(e, k)?;
                if !(v >= 0.0) || !v.is_finite() {
                    return Err(invalid(e, k, format!("epsilon must be nonnegative, got {v}")));
                }
                settings.epsilon = Some(v);
            }
            "epsilon_factor" => {
                let v: f64 = parse_num(e, k)?;
                if !(v >= 0.0) || !v.is_finite() {
                    return Err(invalid(e, k, format!("epsilon_factor must be nonnegative, got {v}")));
                }
                settings.epsilon_factor = Some(v);
            }
            "omega" => {
                settings.omega = if e.value.eq_ignore_ascii_case("auto") {
                    StepSize::Auto
                } else {
                    StepSize::Fixed(parse_positive(e, k)?)
                };
            }
            "beta" => {
                settings.momentum = if e.value.eq_ignore_ascii_case("nesterov") {
                    Momentum::Nesterov
                } else {
                    let b: f64 = parse_num(e, k)?;
                    if !(b >= 3.0) {
                        return Err(invalid(e, k, format!("beta must be at least 3, got {b}")));
                    }
                    Momentum::Beta(b)
                };
            }
            "armijo_step" => settings.armijo_step = parse_positive(e, k)?,
            "armijo_shrink" => settings.armijo_shrink = parse_unit_interval(e, k)?,
            "armijo_slope" => settings.armijo_slope = parse_unit_interval(e, k)?,
            "lm_alpha0_factor" => settings.lm_alpha0_factor = parse_positive(e, k)?,
            "lm_decay" => settings.lm_decay = parse_unit_interval(e, k)?,
            "max_iter" => settings.max_iter = parse_num(e, k)?,
            "inner_tol" => settings.inner_tol = parse_positive(e, k)?,
            "inner_max_iter" => settings.inner_max_iter = Some(parse_num(e, k)?),
            "grad_tol" => {
                let v: f64 = parse_num(e, k)?;
                if !(v >= 0.0) {
                    return Err(invalid(e, k, format!("grad_tol must be nonnegative, got {v}")));
                }
                settings.grad_tol = v;
            }
            "warm_start" => settings.warm_start = parse_num(e, k)?,
            _ => unreachable!("keys validated while lexing"),
        }
    }
    Ok(())
}

pub fn parse_config_str(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let sections = lex(text)?;
    let empty = BTreeMap::new();
    let get = |name: &str| sections.get(name).map(|(_, e)| e).unwrap_or(&empty);

    let geometry = get("geometry");
    let m_entry = geometry.get("m").ok_or(ConfigError::Missing("geometry.m"))?;
    let m: usize = parse_num(m_entry, "m")?;
    if m < 2 {
        return Err(invalid(m_entry, "m", format!("m must be at least 2, got {m}")));
    }
    let angles = geometry.get("angles").map(|e| parse_num(e, "angles")).transpose()?.unwrap_or(180);
    let beams = geometry.get("beams").map(|e| parse_num(e, "beams")).transpose()?.unwrap_or(70);
    let geom = match geometry.get("spacing") {
        Some(e) => TomoGeometry::with_spacing(m, angles, beams, parse_positive(e, "spacing")?),
        None => TomoGeometry::new(m, angles, beams),
    }
    .map_err(|err| invalid(m_entry, "geometry", err.to_string()))?;

    let experiment = get("experiment");
    let solvers_entry = experiment
        .get("solvers")
        .ok_or(ConfigError::Missing("experiment.solvers"))?;
    let mut methods = Vec::new();
    for name in list(solvers_entry) {
        let method: Method = name
            .parse()
            .map_err(|e: l1tik::Error| invalid(solvers_entry, "solvers", e.to_string()))?;
        methods.push(method);
    }
    if methods.is_empty() {
        return Err(invalid(solvers_entry, "solvers", "at least one solver is required"));
    }

    let mut cfg = ExperimentConfig::with_solvers(&[]);
    cfg.geometry = geom;
    if let Some(e) = experiment.get("noise") {
        cfg.noise_levels = list(e)
            .map(|v| {
                v.parse::<f64>()
                    .ok()
                    .filter(|x| *x >= 0.0 && x.is_finite())
                    .ok_or_else(|| invalid(e, "noise", format!("'{v}' is not a nonnegative number")))
            })
            .collect::<Result<_, _>>()?;
        if cfg.noise_levels.is_empty() {
            return Err(invalid(e, "noise", "at least one noise level is required"));
        }
    }
    if let Some(e) = experiment.get("repetitions") {
        cfg.repetitions = parse_num(e, "repetitions")?;
    }
    if let Some(e) = experiment.get("seed") {
        cfg.seed = parse_num(e, "seed")?;
    }
    if let Some(e) = experiment.get("output") {
        cfg.output = PathBuf::from(&e.value);
    }
    if let Some(e) = experiment.get("threads") {
        cfg.threads = parse_num::<usize>(e, "threads")?.max(1);
    }
    if let Some(e) = experiment.get("alpha") {
        cfg.alpha = Some(parse_positive(e, "alpha")?);
    }
    if let Some(e) = experiment.get("alpha_factor") {
        cfg.alpha_factor = parse_positive(e, "alpha_factor")?;
    }
    if let Some(e) = experiment.get("timing") {
        cfg.timing = parse_bool(e, "timing")?;
    }

    let shared = get("solver");
    for method in methods {
        let mut settings = SolverSettings::defaults(method);
        apply_solver_keys(&mut settings, shared)?;
        apply_solver_keys(&mut settings, get(&format!("solver.{}", method.name())))?;
        cfg.solvers.push(settings);
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[geometry]\nm = 16\n\n[experiment]\nsolvers = ista\n";

    #[test]
    fn minimal_file_gets_defaults() {
        let cfg = parse_config_str(MINIMAL).unwrap();
        assert_eq!(cfg.geometry, TomoGeometry::new(16, 180, 70).unwrap());
        assert_eq!(cfg.noise_levels, vec![0.1]);
        assert_eq!(cfg.repetitions, 1);
        assert_eq!(cfg.solvers, vec![SolverSettings::defaults(Method::Ista)]);
        assert_eq!(cfg.solvers[0].tau, 1.1);
        assert!(cfg.timing);
    }

    #[test]
    fn tau_must_exceed_one() {
        let text = format!("{MINIMAL}[solver]\ntau=0.9\n");
        let err = parse_config_str(&text).unwrap_err();
        assert!(err.to_string().contains("tau must exceed 1"), "{err}");
    }

    #[test]
    fn duplicate_key_reports_both_lines() {
        let text = "[geometry]\nm = 16\nm = 20\n[experiment]\nsolvers = ista\n";
        assert_eq!(
            parse_config_str(text).unwrap_err(),
            ConfigError::DuplicateKey {
                section: "geometry".into(),
                key: "m".into(),
                first: 2,
                second: 3
            }
        );
    }

    #[test]
    fn malformed_line_has_line_number() {
        let err = parse_config_str("[geometry]\nm 16\n").unwrap_err();
        assert!(matches!(err, ConfigError::Malformed { line: 2, .. }));
        let err = parse_config_str("m = 3\n").unwrap_err();
        assert!(matches!(err, ConfigError::Malformed { line: 1, .. }));
    }

    #[test]
    fn missing_keys_are_named() {
        assert_eq!(
            parse_config_str("[experiment]\nsolvers = ista\n").unwrap_err(),
            ConfigError::Missing("geometry.m")
        );
        assert_eq!(
            parse_config_str("[geometry]\nm = 8\n").unwrap_err(),
            ConfigError::Missing("experiment.solvers")
        );
    }

    #[test]
    fn strict_about_unknowns() {
        let err = parse_config_str("[geometry]\nm = 8\nfoo = 1\n").unwrap_err();
        assert!(matches!(err, ConfigError::UnknownKey { line: 3, .. }));
        let err = parse_config_str("[geom]\n").unwrap_err();
        assert!(matches!(err, ConfigError::UnknownSection { line: 1, .. }));
        let err = parse_config_str("[geometry]\nm = 8\n[experiment]\nsolvers = ista, cgls\n").unwrap_err();
        assert!(err.to_string().contains("available solvers"), "{err}");
        let err = parse_config_str("[solver.nope]\n").unwrap_err();
        assert!(err.to_string().contains("available solvers"), "{err}");
    }

    #[test]
    fn per_solver_overrides_shared() {
        let text = "\
# full example
[geometry]
m = 32
angles = 60
beams = 45
[experiment]
noise = 0.05, 0.1
solvers = fista, newton
repetitions = 2
seed = 7
timing = off
[solver]
tau = 1.2
max_iter = 500
[solver.newton]
tau = 1.5
epsilon_factor = 1e-3
[solver.fista]
beta = 3
omega = 0.001
";
        let cfg = parse_config_str(text).unwrap();
        assert_eq!(cfg.noise_levels, vec![0.05, 0.1]);
        assert_eq!(cfg.repetitions, 2);
        assert_eq!(cfg.seed, 7);
        assert!(!cfg.timing);
        let fista = &cfg.solvers[0];
        assert_eq!(fista.tau, 1.2);
        assert_eq!(fista.max_iter, 500);
        assert_eq!(fista.momentum, Momentum::Beta(3.0));
        assert_eq!(fista.omega, StepSize::Fixed(0.001));
        let newton = &cfg.solvers[1];
        assert_eq!(newton.tau, 1.5);
        assert_eq!(newton.warm_start, 5);
        let resolved = newton.resolve(2.0);
        assert_eq!(resolved.epsilon, Some(2e-3));
        assert_eq!(resolved.lm_alpha0, Some(2.0));
    }

    #[test]
    fn zero_repetitions_allowed() {
        let cfg = parse_config_str(&format!("{MINIMAL}repetitions = 0\n")).unwrap();
        assert_eq!(cfg.repetitions, 0);
    }
}
