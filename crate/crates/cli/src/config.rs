//! Flat `key = value` run configuration.
//!
//! Numbers are arithmetic expressions (`1/3`, `(2 + sqrt(3))/4`, `pi/2`),
//! complex numbers are `(re, im)` pairs and lists are comma separated.
//! `#` starts a comment. Example:
//!
//! ```text
//! transmittances = 1/3, 1/4, 1, 1/3, 1/2
//! phases = 0, 0, 0, 0, pi/2, 0
//! inputs = 1, 1, 1
//! counts = 1, 1, 1
//! field = coherent (0.4, 0)
//! eta = 0.88
//! dark_rate = 1e4
//! tau_res = 10e-9
//! ```

use std::fmt::Write as _;

use gqsd::detectors::{nu_from_dark_rate, DetectorKind, DetectorModel};
use gqsd::search::{ParamBounds, SearchConfig, N_PARAMS};
use gqsd::{Complex64, GqsdSpec, InputField, MeasurementEvent, TruncationTarget};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {key}: {message}")]
    Field { line: usize, key: String, message: String },
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("missing required key `{0}`")]
    Missing(&'static str),
    #[error("{0}")]
    Invalid(#[from] gqsd::Error),
}

type Result<T> = std::result::Result<T, ConfigError>;

/// The field entering the device.
#[derive(Clone, Debug, PartialEq)]
pub enum FieldConfig {
    Vacuum,
    Coherent(Complex64),
    Fock(Vec<Complex64>),
}

impl FieldConfig {
    pub fn to_field(&self) -> Result<InputField> {
        Ok(match self {
            Self::Vacuum => InputField::vacuum(),
            Self::Coherent(alpha) => InputField::coherent(*alpha),
            Self::Fock(gammas) => InputField::fock_expansion(gammas.clone())?,
        })
    }
}

/// Efficiency and dark-count settings, either shared or for one kind.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DetectorParams {
    pub eta: Option<f64>,
    pub dark_rate: Option<f64>,
    pub tau_res: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunConfig {
    pub transmittances: Option<[f64; 5]>,
    pub phases: Option<[f64; 6]>,
    pub mirror_zeta: Option<f64>,
    pub inputs: Option<[u32; 3]>,
    pub counts: Option<[u32; 3]>,
    /// Levels kept by the truncation; all levels when absent.
    pub keep: Option<Vec<usize>>,
    pub field: Option<FieldConfig>,
    pub kinds: Option<Vec<DetectorKind>>,
    pub detector: DetectorParams,
    /// Overrides for conventional, single-photon and number-resolving kinds.
    pub per_kind: [DetectorParams; 3],
    pub restarts: Option<usize>,
    pub max_iterations: Option<usize>,
    pub convergence_tol: Option<f64>,
    pub seed: Option<u64>,
    pub quotient_phase: Option<bool>,
    pub min_amplitude: Option<f64>,
    pub start_from_spec: Option<bool>,
    pub start_spread: Option<f64>,
    /// `(parameter index, value)` pairs, indices as in [`ParamBounds`].
    pub freeze: Vec<(usize, f64)>,
    pub expect_amplitude: Option<f64>,
}

const PARAM_NAMES: [&str; N_PARAMS] = ["T1", "T2", "T3", "T4", "T5", "xi1", "xi2", "xi3", "xi4", "xi5"];

fn kind_index(kind: DetectorKind) -> usize {
    DetectorKind::ALL.iter().position(|&k| k == kind).expect("listed kind")
}

/// Splits at commas outside parentheses.
fn split_top(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(s[start..].trim());
    out
}

fn number(expr: &str) -> std::result::Result<f64, String> {
    let v = meval::eval_str(expr).map_err(|e| format!("cannot evaluate `{expr}`: {e}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{expr}` is not finite"))
    }
}

fn numbers(value: &str) -> std::result::Result<Vec<f64>, String> {
    split_top(value).into_iter().map(number).collect()
}

fn fixed<const N: usize>(value: &str) -> std::result::Result<[f64; N], String> {
    let v = numbers(value)?;
    v.as_slice()
        .try_into()
        .map_err(|_| format!("expected {N} values, got {}", v.len()))
}

fn counts(value: &str) -> std::result::Result<[u32; 3], String> {
    let v = fixed::<3>(value)?;
    let mut out = [0; 3];
    for (o, x) in out.iter_mut().zip(v) {
        if x < 0.0 || x.fract() != 0.0 || x > f64::from(u32::MAX) {
            return Err(format!("`{x}` is not a photon number"));
        }
        *o = x as u32;
    }
    Ok(out)
}

fn integer(value: &str) -> std::result::Result<u64, String> {
    value
        .trim()
        .parse()
        .map_err(|_| format!("`{value}` is not a non-negative integer"))
}

fn boolean(value: &str) -> std::result::Result<bool, String> {
    match value.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(format!("`{other}` is not a boolean")),
    }
}

fn complex(item: &str) -> std::result::Result<Complex64, String> {
    let inner = item
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| format!("`{item}` is not a (re, im) pair"))?;
    let [re, im] = fixed::<2>(inner)?;
    Ok(Complex64::new(re, im))
}

fn complex_list(value: &str) -> std::result::Result<Vec<Complex64>, String> {
    split_top(value).into_iter().map(complex).collect()
}

fn field(value: &str) -> std::result::Result<FieldConfig, String> {
    let value = value.trim();
    let (kind, rest) = value.split_once(char::is_whitespace).unwrap_or((value, ""));
    match kind {
        "vacuum" if rest.trim().is_empty() => Ok(FieldConfig::Vacuum),
        "coherent" => Ok(FieldConfig::Coherent(complex(rest.trim())?)),
        "fock" => Ok(FieldConfig::Fock(complex_list(rest.trim())?)),
        _ => Err(format!(
            "expected `vacuum`, `coherent (re, im)` or `fock (re, im), ...`, got `{value}`"
        )),
    }
}

fn freeze_list(value: &str) -> std::result::Result<Vec<(usize, f64)>, String> {
    split_top(value)
        .into_iter()
        .map(|item| {
            let (name, v) = item
                .split_once(':')
                .ok_or_else(|| format!("`{item}` is not `name: value`"))?;
            let idx = PARAM_NAMES
                .iter()
                .position(|n| *n == name.trim())
                .ok_or_else(|| format!("unknown parameter `{}`", name.trim()))?;
            Ok((idx, number(v)?))
        })
        .collect()
}

fn kinds(value: &str) -> std::result::Result<Vec<DetectorKind>, String> {
    split_top(value)
        .into_iter()
        .map(|k| DetectorKind::from_tag(k).map_err(|e| e.to_string()))
        .collect()
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut seen = std::collections::HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or(ConfigError::Syntax { line })?;
            let (key, value) = (key.trim(), value.trim());
            let fail = |message: String| ConfigError::Field {
                line,
                key: key.to_string(),
                message,
            };
            if !seen.insert(key.to_string()) {
                return Err(fail("duplicate key".into()));
            }
            cfg.set(key, value).map_err(fail)?;
        }
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        match key {
            "transmittances" => self.transmittances = Some(fixed(value)?),
            "phases" => self.phases = Some(fixed(value)?),
            "mirror_zeta" => self.mirror_zeta = Some(number(value)?),
            "inputs" => self.inputs = Some(counts(value)?),
            "counts" => self.counts = Some(counts(value)?),
            "keep" => {
                let levels = counts_list(value)?;
                self.keep = Some(levels);
            }
            "field" => self.field = Some(field(value)?),
            "kinds" => self.kinds = Some(kinds(value)?),
            "restarts" => self.restarts = Some(integer(value)? as usize),
            "max_iterations" => self.max_iterations = Some(integer(value)? as usize),
            "convergence_tol" => self.convergence_tol = Some(number(value)?),
            "seed" => self.seed = Some(integer(value)?),
            "quotient_phase" => self.quotient_phase = Some(boolean(value)?),
            "min_amplitude" => self.min_amplitude = Some(number(value)?),
            "start_from_spec" => self.start_from_spec = Some(boolean(value)?),
            "start_spread" => self.start_spread = Some(number(value)?),
            "freeze" => self.freeze = freeze_list(value)?,
            "expect_amplitude" => self.expect_amplitude = Some(number(value)?),
            _ => {
                let (name, kind) = match key.split_once('.') {
                    Some((name, tag)) => {
                        let kind = DetectorKind::from_tag(tag).map_err(|_| format!("unknown detector kind `{tag}`"))?;
                        (name, Some(kind))
                    }
                    None => (key, None),
                };
                let params = match kind {
                    Some(k) => &mut self.per_kind[kind_index(k)],
                    None => &mut self.detector,
                };
                let slot = match name {
                    "eta" => &mut params.eta,
                    "dark_rate" => &mut params.dark_rate,
                    "tau_res" => &mut params.tau_res,
                    _ => return Err("unknown key".into()),
                };
                *slot = Some(number(value)?);
            }
        }
        Ok(())
    }

    /// Canonical text form; parsing it gives back an equal config.
    pub fn to_text(&self) -> String {
        fn list<T: std::fmt::Display>(v: &[T]) -> String {
            v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
        }
        fn pairs(v: &[Complex64]) -> String {
            v.iter()
                .map(|z| format!("({}, {})", z.re, z.im))
                .collect::<Vec<_>>()
                .join(", ")
        }
        let mut out = String::new();
        let mut line = |key: &str, value: String| {
            let _ = writeln!(out, "{key} = {value}");
        };
        if let Some(t) = &self.transmittances {
            line("transmittances", list(t));
        }
        if let Some(p) = &self.phases {
            line("phases", list(p));
        }
        if let Some(z) = self.mirror_zeta {
            line("mirror_zeta", z.to_string());
        }
        if let Some(v) = &self.inputs {
            line("inputs", list(v));
        }
        if let Some(v) = &self.counts {
            line("counts", list(v));
        }
        if let Some(v) = &self.keep {
            line("keep", list(v));
        }
        match &self.field {
            Some(FieldConfig::Vacuum) => line("field", "vacuum".into()),
            Some(FieldConfig::Coherent(a)) => line("field", format!("coherent {}", pairs(&[*a]))),
            Some(FieldConfig::Fock(g)) => line("field", format!("fock {}", pairs(g))),
            None => {}
        }
        if let Some(k) = &self.kinds {
            line(
                "kinds",
                k.iter().map(|k| k.tag().to_string()).collect::<Vec<_>>().join(", "),
            );
        }
        let mut detector = |suffix: String, p: &DetectorParams| {
            for (name, v) in [("eta", p.eta), ("dark_rate", p.dark_rate), ("tau_res", p.tau_res)] {
                if let Some(v) = v {
                    line(&format!("{name}{suffix}"), v.to_string());
                }
            }
        };
        detector(String::new(), &self.detector);
        for (kind, p) in DetectorKind::ALL.iter().zip(&self.per_kind) {
            detector(format!(".{}", kind.tag()), p);
        }
        let mut line = |key: &str, value: String| {
            let _ = writeln!(out, "{key} = {value}");
        };
        let scalars: [(&str, Option<String>); 9] = [
            ("restarts", self.restarts.map(|v| v.to_string())),
            ("max_iterations", self.max_iterations.map(|v| v.to_string())),
            ("convergence_tol", self.convergence_tol.map(|v| v.to_string())),
            ("seed", self.seed.map(|v| v.to_string())),
            ("quotient_phase", self.quotient_phase.map(|v| v.to_string())),
            ("min_amplitude", self.min_amplitude.map(|v| v.to_string())),
            ("start_from_spec", self.start_from_spec.map(|v| v.to_string())),
            ("start_spread", self.start_spread.map(|v| v.to_string())),
            ("expect_amplitude", self.expect_amplitude.map(|v| v.to_string())),
        ];
        for (key, value) in scalars {
            if let Some(v) = value {
                line(key, v);
            }
        }
        if !self.freeze.is_empty() {
            let items: Vec<String> = self
                .freeze
                .iter()
                .map(|(i, v)| format!("{}: {v}", PARAM_NAMES[*i]))
                .collect();
            line("freeze", items.join(", "));
        }
        out
    }

    pub fn spec(&self) -> Result<GqsdSpec> {
        let t = self.transmittances.ok_or(ConfigError::Missing("transmittances"))?;
        let mut spec = GqsdSpec::new(t, self.phases.unwrap_or([0.0; 6]))?;
        spec.mirror_zeta = self.mirror_zeta.unwrap_or(0.0);
        spec.validate()?;
        Ok(spec)
    }

    pub fn event(&self) -> Result<MeasurementEvent> {
        let inputs = self.inputs.ok_or(ConfigError::Missing("inputs"))?;
        let counts = self.counts.ok_or(ConfigError::Missing("counts"))?;
        Ok(MeasurementEvent::new(inputs, counts)?)
    }

    pub fn target(&self, event: &MeasurementEvent) -> Result<TruncationTarget> {
        Ok(match &self.keep {
            Some(keep) => TruncationTarget::new(event.dim(), keep.iter().copied())?,
            None => TruncationTarget::full(event.dim()),
        })
    }

    pub fn field(&self) -> Result<Option<InputField>> {
        self.field.as_ref().map(FieldConfig::to_field).transpose()
    }

    pub fn detector_kinds(&self) -> Vec<DetectorKind> {
        self.kinds.clone().unwrap_or_else(|| DetectorKind::ALL.to_vec())
    }

    /// Model for `kind`; unset values mean a perfect detector.
    pub fn detector(&self, kind: DetectorKind) -> Result<DetectorModel> {
        let own = &self.per_kind[kind_index(kind)];
        let pick = |a: Option<f64>, b: Option<f64>| a.or(b);
        let eta = pick(own.eta, self.detector.eta).unwrap_or(1.0);
        let rate = pick(own.dark_rate, self.detector.dark_rate).unwrap_or(0.0);
        let tau = pick(own.tau_res, self.detector.tau_res).unwrap_or(0.0);
        Ok(DetectorModel::new(kind, eta, nu_from_dark_rate(rate, tau)?)?)
    }

    pub fn search(&self) -> Result<SearchConfig> {
        let mut bounds = ParamBounds::default();
        for &(i, v) in &self.freeze {
            bounds = bounds.freeze(i, v);
        }
        let defaults = SearchConfig::default();
        let start = if self.start_from_spec.unwrap_or(false) {
            Some(self.spec()?)
        } else {
            None
        };
        let config = SearchConfig {
            restarts: self.restarts.unwrap_or(defaults.restarts),
            max_iterations: self.max_iterations.unwrap_or(defaults.max_iterations),
            convergence_tol: self.convergence_tol.unwrap_or(defaults.convergence_tol),
            bounds,
            random_seed: self.seed.unwrap_or(defaults.random_seed),
            quotient_phase: self.quotient_phase.unwrap_or(defaults.quotient_phase),
            min_amplitude: self.min_amplitude.unwrap_or(defaults.min_amplitude),
            start,
            start_spread: self.start_spread.unwrap_or(defaults.start_spread),
            xi6: self.phases.map_or(0.0, |p| p[5]),
        };
        config.validate()?;
        Ok(config)
    }
}

fn counts_list(value: &str) -> std::result::Result<Vec<usize>, String> {
    numbers(value)?
        .into_iter()
        .map(|x| {
            if x >= 0.0 && x.fract() == 0.0 {
                Ok(x as usize)
            } else {
                Err(format!("`{x}` is not a level index"))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWELFTH: &str = "\
# quartit solution with all amplitudes 1/12
transmittances = 1/3, 1/4, 1, 1/3, 1/2
phases = 0, 0, 0, 0, pi/2, 0
inputs = 1, 1, 1
counts = 1, 1, 1
";

    #[test]
    fn parses_expressions() {
        let cfg = RunConfig::parse(TWELFTH).unwrap();
        let t = cfg.transmittances.unwrap();
        assert!((t[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((cfg.phases.unwrap()[4] - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        let cfg = RunConfig::parse("transmittances = (13 - 3*sqrt(13))/26, 1/2, 1, 1/3, (2 + sqrt(3))/4").unwrap();
        assert!((cfg.transmittances.unwrap()[4] - (2.0 + 3f64.sqrt()) / 4.0).abs() < 1e-15);
    }

    #[test]
    fn errors_carry_line_and_key() {
        let err = RunConfig::parse("inputs = 1, 1, 1\ntransmittances = 1, 1, 1, 1\n").unwrap_err();
        let msg = err.to_string();
        assert!(
            msg.contains("line 2") && msg.contains("transmittances") && msg.contains("expected 5"),
            "{msg}"
        );
        assert!(RunConfig::parse("bogus = 1")
            .unwrap_err()
            .to_string()
            .contains("unknown key"));
        assert!(RunConfig::parse("just text")
            .unwrap_err()
            .to_string()
            .contains("line 1"));
        assert!(RunConfig::parse("seed = 1\nseed = 2")
            .unwrap_err()
            .to_string()
            .contains("duplicate"));
        assert!(RunConfig::parse("inputs = 1, 0.5, 1").is_err());
        assert!(RunConfig::parse("field = coherent 0.4").is_err());
    }

    #[test]
    fn round_trips() {
        let text = "\
transmittances = 0.78494, 0.69001, 1, 0.87451, 0.70185
phases = 0, 0, 0, 0, pi, 0.1
mirror_zeta = pi/2
inputs = 1, 2, 1
counts = 1, 2, 1
keep = 0, 2
field = fock (0.6, 0), (0, -0.5), (1/3, 2/7)
kinds = c, r
eta = 0.88
dark_rate = 1e4
tau_res = 10e-9
eta.c = 0.7
dark_rate.c = 100
restarts = 7
max_iterations = 100
convergence_tol = 1e-11
seed = 42
quotient_phase = true
min_amplitude = 0.01
start_from_spec = true
start_spread = 0.02
freeze = T3: 1, xi1: 0
expect_amplitude = 1/12
";
        let cfg = RunConfig::parse(text).unwrap();
        let again = RunConfig::parse(&cfg.to_text()).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(again.to_text(), cfg.to_text());
        let coherent = RunConfig::parse("field = coherent (0.4, -0.1)").unwrap();
        assert_eq!(RunConfig::parse(&coherent.to_text()).unwrap(), coherent);
        assert_eq!(RunConfig::parse("").unwrap(), RunConfig::default());
    }

    #[test]
    fn builds_domain_values() {
        let cfg = RunConfig::parse(&format!(
            "{TWELFTH}eta = 0.88\neta.c = 0.7\ndark_rate.c = 100\ntau_res = 1e-8\n"
        ))
        .unwrap();
        assert!(cfg.spec().is_ok());
        assert_eq!(cfg.event().unwrap().dim(), 4);
        assert_eq!(cfg.target(&cfg.event().unwrap()).unwrap(), TruncationTarget::full(4));
        let c = cfg.detector(DetectorKind::Conventional).unwrap();
        assert_eq!(c.eta, 0.7);
        assert!((c.nu - 1e-6).abs() < 1e-18);
        let r = cfg.detector(DetectorKind::NumberResolving).unwrap();
        assert_eq!((r.eta, r.nu), (0.88, 0.0));
        assert!(matches!(
            RunConfig::default().spec(),
            Err(ConfigError::Missing("transmittances"))
        ));
        assert!(RunConfig::parse("transmittances = 2, 1, 1, 1, 1")
            .unwrap()
            .spec()
            .is_err());
    }

    #[test]
    fn search_settings() {
        let cfg = RunConfig::parse(&format!(
            "{TWELFTH}freeze = T3: 1\nrestarts = 3\nstart_from_spec = true\n"
        ))
        .unwrap();
        let s = cfg.search().unwrap();
        assert_eq!(s.restarts, 3);
        assert!(s.bounds.is_frozen(2) && s.bounds.is_frozen(5));
        assert!(s.start.is_some());
        assert!(RunConfig::parse("freeze = T9: 1").is_err());
    }
}
