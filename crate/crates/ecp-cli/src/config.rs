//! Flat `key = value` experiment configs, flag overrides, and invariant
//! validation with field-precise messages.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use ecp_core::{
    CavityParams, PairSpec, PhasePair, PhotonAnchor, ProtocolKind, ProtocolSpec, SweepAxis,
    MAX_GHZ_N,
};
use serde::Serialize;

/// One violated invariant: the offending field (with its config line when it
/// came from a file) and what went wrong.
#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// Raw key-value pairs merged from a config file and command-line flags;
/// flags win. File-sourced keys remember their line number for error
/// messages.
#[derive(Debug, Default, Clone)]
pub struct RawConfig {
    values: BTreeMap<String, (String, Option<usize>)>,
    path: Option<PathBuf>,
}

impl RawConfig {
    /// Parse a UTF-8 `key = value` file with `#` comments and blank lines.
    pub fn from_file(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let mut cfg = RawConfig {
            values: BTreeMap::new(),
            path: Some(path.to_path_buf()),
        };
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(format!(
                    "{}:{}: expected `key = value`, got `{line}`",
                    path.display(),
                    lineno + 1
                ));
            };
            let key = key.trim().replace('-', "_");
            let value = value.trim().to_string();
            cfg.values.insert(key, (value, Some(lineno + 1)));
        }
        Ok(cfg)
    }

    /// Flag override: replaces any file-sourced value.
    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.values
            .insert(key.replace('-', "_"), (value.to_string(), None));
    }

    pub fn set_opt<T: ToString>(&mut self, key: &str, value: &Option<T>) {
        if let Some(v) = value {
            self.set(key, v.to_string());
        }
    }

    pub fn set_flag(&mut self, key: &str, on: bool) {
        if on {
            self.set(key, "true");
        }
    }

    pub fn contains(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    fn describe(&self, key: &str) -> String {
        match self.values.get(key) {
            Some((_, Some(line))) => match &self.path {
                Some(p) => format!("{key} ({}:{line})", p.display()),
                None => format!("{key} (line {line})"),
            },
            _ => key.to_string(),
        }
    }
}

/// Accumulates violations while pulling typed values out of a [`RawConfig`],
/// so `validate` can report everything at once.
pub struct Checker<'a> {
    raw: &'a RawConfig,
    pub violations: Vec<Violation>,
}

impl<'a> Checker<'a> {
    pub fn new(raw: &'a RawConfig) -> Self {
        Checker {
            raw,
            violations: Vec::new(),
        }
    }

    pub fn violate(&mut self, key: &str, message: impl Into<String>) {
        self.violations.push(Violation {
            field: self.raw.describe(key),
            message: message.into(),
        });
    }

    pub fn raw_str(&self, key: &str) -> Option<&str> {
        self.raw.values.get(key).map(|(v, _)| v.as_str())
    }

    pub fn parse<T: std::str::FromStr>(&mut self, key: &str, what: &str) -> Option<T> {
        let v = self.raw_str(key)?;
        match v.parse::<T>() {
            Ok(t) => Some(t),
            Err(_) => {
                let v = v.to_string();
                self.violate(key, format!("`{v}` is not a valid {what}"));
                None
            }
        }
    }

    pub fn f64(&mut self, key: &str) -> Option<f64> {
        self.parse::<f64>(key, "number")
    }

    pub fn u64(&mut self, key: &str) -> Option<u64> {
        self.parse::<u64>(key, "non-negative integer")
    }

    pub fn usize(&mut self, key: &str) -> Option<usize> {
        self.parse::<usize>(key, "non-negative integer")
    }

    pub fn bool(&mut self, key: &str) -> Option<bool> {
        let v = self.raw_str(key)?;
        match v {
            "true" | "1" | "yes" | "on" => Some(true),
            "false" | "0" | "no" | "off" => Some(false),
            other => {
                let other = other.to_string();
                self.violate(key, format!("`{other}` is not a boolean"));
                None
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Text,
    Json,
    Csv,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "text" => Ok(OutputFormat::Text),
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(format!("unknown format `{other}` (expected text, json or csv)")),
        }
    }
}

/// Where the protocol phases come from; exactly one source must be given.
#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseSource {
    Ideal,
    Explicit {
        phi: f64,
        phi0: f64,
    },
    Cavity {
        detuning: f64,
        anchor: PhotonAnchor,
        coupling: f64,
        gamma: f64,
    },
}

impl PhaseSource {
    /// Build the cavity parameters (when applicable) and the phase pair.
    pub fn resolve(&self) -> ecp_core::Result<(PhasePair, Option<CavityParams>)> {
        match *self {
            PhaseSource::Ideal => Ok((PhasePair::ideal(), None)),
            PhaseSource::Explicit { phi, phi0 } => Ok((PhasePair::from_phases(phi, phi0), None)),
            PhaseSource::Cavity {
                detuning,
                anchor,
                coupling,
                gamma,
            } => {
                let params = CavityParams {
                    g: coupling,
                    ..CavityParams::detuned(detuning, anchor)
                }
                .with_gamma(gamma);
                let phases = ecp_core::phase_pair(&params)?;
                Ok((phases, Some(params)))
            }
        }
    }
}

/// Fully validated experiment description for `run` and `validate`.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub protocol: ProtocolKind,
    pub n: usize,
    #[serde(skip)]
    pub pair1: PairSpec,
    #[serde(skip)]
    pub pair2: PairSpec,
    pub a1: f64,
    pub a2: f64,
    pub phase_source: PhaseSource,
    pub allow_lossy: bool,
    pub trials: Option<u64>,
    pub seed: u64,
    #[serde(skip)]
    pub format: OutputFormat,
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn protocol_spec(&self) -> ProtocolSpec {
        ProtocolSpec {
            kind: self.protocol,
            n: self.n,
            pair1: self.pair1,
            pair2: self.pair2,
        }
    }
}

fn pair_from(checker: &mut Checker, a_key: &str, b_key: &str) -> Option<PairSpec> {
    let a = checker.f64(a_key);
    let b = checker.f64(b_key);
    match (a, b) {
        (Some(a), None) => match PairSpec::from_a(a) {
            Ok(p) => Some(p),
            Err(e) => {
                checker.violate(a_key, e.to_string());
                None
            }
        },
        (Some(a), Some(b)) => match PairSpec::new(a, b) {
            Ok(p) => Some(p),
            Err(e) => {
                checker.violate(b_key, e.to_string());
                None
            }
        },
        (None, Some(_)) => {
            checker.violate(a_key, format!("{b_key} given without {a_key}"));
            None
        }
        (None, None) => {
            checker.violate(a_key, "missing pair coefficient");
            None
        }
    }
}

fn phase_source_from(checker: &mut Checker) -> Option<PhaseSource> {
    let ideal = checker.bool("ideal_phases").unwrap_or(false);
    let phi = checker.f64("phi");
    let phi0 = checker.f64("phi0");
    let has_explicit = phi.is_some() || phi0.is_some();
    let has_cavity = ["detuning", "coupling", "gamma", "anchor", "kappa_mhz"]
        .iter()
        .any(|k| checker.raw_str(k).is_some());

    let sources = usize::from(ideal) + usize::from(has_explicit) + usize::from(has_cavity);
    if sources == 0 {
        checker.violate(
            "phases",
            "no phase source: give --ideal-phases, --phi/--phi0, or cavity parameters",
        );
        return None;
    }
    if sources > 1 {
        checker.violate(
            "phases",
            "exactly one of {ideal-phases, explicit phi/phi0, cavity parameters} may be given",
        );
        return None;
    }

    if ideal {
        return Some(PhaseSource::Ideal);
    }
    if has_explicit {
        return match (phi, phi0) {
            (Some(phi), Some(phi0)) => Some(PhaseSource::Explicit { phi, phi0 }),
            _ => {
                checker.violate("phi", "explicit phases need both phi and phi0");
                None
            }
        };
    }

    // frequencies come in units of kappa unless kappa_mhz converts them
    // from ordinary-frequency megahertz
    let scale = match checker.f64("kappa_mhz") {
        Some(k) if k > 0.0 => 1.0 / k,
        Some(k) => {
            checker.violate("kappa_mhz", format!("kappa must be > 0 MHz, got {k}"));
            return None;
        }
        None => 1.0,
    };
    let detuning = checker.f64("detuning").unwrap_or(0.0) * scale;
    let coupling = checker.f64("coupling").map(|g| g * scale).unwrap_or(0.5);
    let gamma = checker.f64("gamma").unwrap_or(0.0) * scale;
    if gamma < 0.0 {
        checker.violate("gamma", "decay rate must be >= 0");
        return None;
    }
    if coupling < 0.0 {
        checker.violate("coupling", "coupling must be >= 0");
        return None;
    }
    let anchor = match checker.raw_str("anchor") {
        None | Some("cavity") => PhotonAnchor::Cavity,
        Some("atom") => PhotonAnchor::Atom,
        Some(other) => {
            let other = other.to_string();
            checker.violate("anchor", format!("`{other}` is not a photon anchor (atom|cavity)"));
            return None;
        }
    };
    Some(PhaseSource::Cavity {
        detuning,
        anchor,
        coupling,
        gamma,
    })
}

/// Validate every invariant reachable from the raw config and build the
/// experiment description. All violations are reported, not just the first.
pub fn experiment_from(raw: &RawConfig) -> Result<ExperimentConfig, Vec<Violation>> {
    let mut checker = Checker::new(raw);

    let protocol: Option<ProtocolKind> = checker.parse("protocol", "protocol");
    if !raw.contains("protocol") {
        checker.violate("protocol", "missing protocol");
    }
    let n = checker.usize("n").unwrap_or(1);
    if n == 0 {
        checker.violate("n", "party count must be at least 1");
    } else if n > MAX_GHZ_N {
        checker.violate("n", format!("N = {n} exceeds the register cap (N <= {MAX_GHZ_N})"));
    }
    if let Some(kind) = protocol {
        if !kind.is_ghz() && n > 1 {
            checker.violate("n", format!("{kind} is a pair protocol; N must be 1"));
        }
    }

    let pair1 = pair_from(&mut checker, "a1", "b1");
    let pair2 = if raw.contains("a2") || raw.contains("b2") {
        pair_from(&mut checker, "a2", "b2")
    } else {
        pair1 // identical preparation by default
    };

    let phase_source = phase_source_from(&mut checker);
    let allow_lossy = checker.bool("allow_lossy").unwrap_or(false);

    let trials = checker.u64("trials");
    if trials == Some(0) {
        checker.violate("trials", "trials must be at least 1");
    }
    let seed = checker.u64("seed").unwrap_or(0);

    let format = match checker.raw_str("format") {
        None => OutputFormat::Text,
        Some(s) => match s.parse() {
            Ok(f) => f,
            Err(e) => {
                checker.violate("format", e);
                OutputFormat::Text
            }
        },
    };
    let output = checker.raw_str("output").map(PathBuf::from);

    if checker.violations.is_empty() {
        let pair1 = pair1.expect("validated");
        let pair2 = pair2.expect("validated");
        Ok(ExperimentConfig {
            protocol: protocol.expect("validated"),
            n,
            pair1,
            pair2,
            a1: pair1.a(),
            a2: pair2.a(),
            phase_source: phase_source.expect("validated"),
            allow_lossy,
            trials,
            seed,
            format,
            output,
        })
    } else {
        Err(checker.violations)
    }
}

/// Validated sweep description.
#[derive(Debug, Clone)]
pub struct SweepCommandConfig {
    pub axis: SweepAxis,
    pub from: f64,
    pub to: f64,
    pub points: usize,
    pub protocol: ProtocolKind,
    pub n: usize,
    pub a1: f64,
    pub anchor: PhotonAnchor,
    pub both_conventions: bool,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
}

pub fn sweep_from(raw: &RawConfig) -> Result<SweepCommandConfig, Vec<Violation>> {
    let mut checker = Checker::new(raw);

    let axis: Option<SweepAxis> = checker.parse("axis", "sweep axis");
    if !raw.contains("axis") {
        checker.violate("axis", "missing sweep axis");
    }
    let from = checker.f64("from");
    let to = checker.f64("to");
    if from.is_none() && !raw.contains("from") {
        checker.violate("from", "missing sweep start");
    }
    if to.is_none() && !raw.contains("to") {
        checker.violate("to", "missing sweep end");
    }
    let points = checker.usize("points").unwrap_or(50);
    if points == 0 {
        checker.violate("points", "sweep needs at least one point");
    }
    let protocol: ProtocolKind = checker
        .parse("protocol", "protocol")
        .unwrap_or(ProtocolKind::Atomic);
    let n = checker.usize("n").unwrap_or(1);
    let a1 = checker
        .f64("a1")
        .unwrap_or(std::f64::consts::FRAC_1_SQRT_2);
    if !(a1 > 0.0 && a1 < 1.0) {
        checker.violate("a1", format!("a1 must lie in (0, 1), got {a1}"));
    }
    let anchor = match checker.raw_str("anchor") {
        None | Some("cavity") => PhotonAnchor::Cavity,
        Some("atom") => PhotonAnchor::Atom,
        Some(other) => {
            let other = other.to_string();
            checker.violate("anchor", format!("`{other}` is not a photon anchor (atom|cavity)"));
            PhotonAnchor::Cavity
        }
    };
    let both_conventions = checker.bool("both_conventions").unwrap_or(true);
    let format = match checker.raw_str("format") {
        None => OutputFormat::Csv,
        Some(s) => match s.parse() {
            Ok(f) => f,
            Err(e) => {
                checker.violate("format", e);
                OutputFormat::Csv
            }
        },
    };
    let output = checker.raw_str("output").map(PathBuf::from);

    // axis-specific range checks
    if let (Some(axis), Some(from), Some(to)) = (axis, from, to) {
        match axis {
            SweepAxis::A1 => {
                if !(from > 0.0 && from < 1.0 && to > 0.0 && to < 1.0) {
                    checker.violate("from", "a1 sweep bounds must lie in (0, 1)");
                }
            }
            SweepAxis::K => {
                for k in [from, to] {
                    let a2 = a1 * (1.0 + k);
                    if !(a2 > 0.0 && a2 < 1.0) {
                        checker.violate(
                            "from",
                            format!("k sweep bound {k} drives a2 = {a2} out of (0, 1)"),
                        );
                        break;
                    }
                }
            }
            SweepAxis::Detuning | SweepAxis::Coupling => {}
        }
    }

    if checker.violations.is_empty() {
        Ok(SweepCommandConfig {
            axis: axis.expect("validated"),
            from: from.expect("validated"),
            to: to.expect("validated"),
            points,
            protocol,
            n,
            a1,
            anchor,
            both_conventions,
            format,
            output,
        })
    } else {
        Err(checker.violations)
    }
}
