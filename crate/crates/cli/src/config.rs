//! Run configuration: defaults per command, an optional `key=value` config
//! file, command-line flags on top, and `QFI_PROBE_SEED` as the last resort
//! for the seed.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use crate::error::CliError;
use crate::format::fmt_num;

pub const SEED_ENV: &str = "QFI_PROBE_SEED";

/// Bounds every θ-grid must stay inside.
pub const THETA_BOUNDS: (f64, f64) = (0.01, 0.99);

const KEYS: &[&str] = &[
    "d",
    "theta-start",
    "theta-stop",
    "theta-step",
    "schemes",
    "n",
    "eta",
    "psi",
    "samples",
    "seed",
    "shots",
    "trials",
    "out",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Command {
    Curves,
    Thresholds,
    Partial,
    Crb,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Curves => "curves",
            Command::Thresholds => "thresholds",
            Command::Partial => "partial",
            Command::Crb => "crb",
        }
    }

    fn defaults(self) -> BTreeMap<String, String> {
        let pairs: &[(&str, &str)] = match self {
            Command::Curves => &[
                ("d", "2,3,4,5"),
                ("theta-start", "0.01"),
                ("theta-stop", "0.99"),
                ("theta-step", "0.01"),
                ("schemes", "E,O,B"),
                ("n", "1"),
                ("eta", "0.9"),
            ],
            Command::Thresholds => &[("d", "2,3,4,5,6,7,8,9,10"), ("eta", "0.7,0.8,0.9,1")],
            Command::Partial => &[
                ("d", "3"),
                ("theta-start", "0.05"),
                ("theta-stop", "0.95"),
                ("theta-step", "0.05"),
                ("samples", "100"),
            ],
            Command::Crb => &[
                ("d", "2,3"),
                ("theta-start", "0.5"),
                ("theta-stop", "0.5"),
                ("theta-step", "0.1"),
                ("schemes", "E,O"),
                ("n", "1"),
                ("eta", "0.9"),
                ("shots", "100000"),
                ("trials", "400"),
            ],
        };
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }
}

/// Probing schemes selectable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SchemeName {
    B,
    E,
    EEta,
    O,
}

impl SchemeName {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s.trim() {
            "O" | "o" => Ok(SchemeName::O),
            "E" | "e" => Ok(SchemeName::E),
            "B" | "b" => Ok(SchemeName::B),
            "E_eta" | "e_eta" | "Eeta" => Ok(SchemeName::EEta),
            other => Err(CliError::Config(format!("unknown scheme '{other}'"))),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SchemeName::O => "O",
            SchemeName::E => "E",
            SchemeName::B => "B",
            SchemeName::EEta => "E_eta",
        }
    }
}

impl fmt::Display for SchemeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl ThetaGrid {
    /// Grid points `start + k·step ≤ stop`, rounded to 12 decimals so that
    /// repeated addition noise never shows up in the output.
    pub fn points(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|k| {
                let t = self.start + k as f64 * self.step;
                (t * 1e12).round() / 1e12
            })
            .collect()
    }
}

/// Fully resolved configuration of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub d: Vec<usize>,
    pub theta: Option<ThetaGrid>,
    pub schemes: Vec<SchemeName>,
    pub n: Vec<u32>,
    pub eta: Vec<f64>,
    pub psi: Option<Vec<f64>>,
    pub samples: usize,
    pub seed: u64,
    pub shots: u64,
    pub trials: u64,
    pub out: Option<PathBuf>,
    raw: BTreeMap<String, String>,
}

/// Reads a `key=value` file. Blank lines and lines starting with `#` are
/// skipped; keys may use `-` or `_`.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    parse_config_text(&text)
}

pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("config line {}: expected key=value", lineno + 1)))?;
        let key = normalize_key(key);
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Config(format!(
                "config line {}: unknown key '{key}'",
                lineno + 1
            )));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

fn normalize_key(key: &str) -> String {
    key.trim().replace('_', "-").to_ascii_lowercase()
}

fn parse_list<T, F>(key: &str, value: &str, parse: F) -> Result<Vec<T>, CliError>
where
    F: Fn(&str) -> Option<T>,
{
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse(s).ok_or_else(|| CliError::Config(format!("invalid value '{s}' for {key}"))))
        .collect()
}

fn parse_scalar<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("invalid value '{value}' for {key}")))
}

impl RunConfig {
    /// Layers defaults, config-file entries and flag values (later wins).
    /// `seed_env` is consulted only when neither layer sets a seed.
    pub fn resolve(
        command: Command,
        file: BTreeMap<String, String>,
        flags: BTreeMap<String, String>,
        seed_env: Option<String>,
    ) -> Result<Self, CliError> {
        let mut raw = command.defaults();
        raw.extend(file);
        raw.extend(flags);
        if !raw.contains_key("seed") {
            raw.insert("seed".to_string(), seed_env.unwrap_or_else(|| "0".into()));
        }
        Self::from_map(command, raw)
    }

    fn from_map(command: Command, raw: BTreeMap<String, String>) -> Result<Self, CliError> {
        let get = |k: &str| raw.get(k).map(String::as_str);

        let mut d = parse_list("d", get("d").unwrap_or(""), |s| s.parse::<usize>().ok())?;
        if d.iter().any(|&x| x < 2) {
            return Err(CliError::Config("every d must be >= 2".into()));
        }
        d.sort();
        d.dedup();

        let theta = match (get("theta-start"), get("theta-stop"), get("theta-step")) {
            (Some(a), Some(b), Some(c)) => {
                let grid = ThetaGrid {
                    start: parse_scalar("theta-start", a)?,
                    stop: parse_scalar("theta-stop", b)?,
                    step: parse_scalar("theta-step", c)?,
                };
                validate_grid(&grid)?;
                Some(grid)
            }
            (None, None, None) => None,
            _ => {
                return Err(CliError::Config(
                    "theta-start, theta-stop and theta-step go together".into(),
                ))
            }
        };

        let mut schemes = parse_list("schemes", get("schemes").unwrap_or(""), |s| SchemeName::parse(s).ok())
            .map_err(|_| CliError::Config(format!("invalid scheme list '{}'", get("schemes").unwrap_or(""))))?;
        schemes.sort();
        schemes.dedup();

        let mut n = parse_list("n", get("n").unwrap_or("1"), |s| s.parse::<u32>().ok())?;
        if n.contains(&0) {
            return Err(CliError::Config("n must be >= 1".into()));
        }
        n.sort();
        n.dedup();

        let mut eta = parse_list("eta", get("eta").unwrap_or(""), |s| s.parse::<f64>().ok())?;
        if eta.iter().any(|&x| !(x > 0.0 && x <= 1.0)) {
            return Err(CliError::Config("eta must lie in (0, 1]".into()));
        }
        eta.sort_by(f64::total_cmp);
        eta.dedup();

        let psi = match get("psi") {
            Some(v) if !v.trim().is_empty() => Some(parse_list("psi", v, |s| s.parse::<f64>().ok())?),
            _ => None,
        };

        let cfg = Self {
            command,
            d,
            theta,
            schemes,
            n,
            eta,
            psi,
            samples: parse_scalar("samples", get("samples").unwrap_or("0"))?,
            seed: parse_scalar("seed", get("seed").unwrap_or("0"))?,
            shots: parse_scalar("shots", get("shots").unwrap_or("0"))?,
            trials: parse_scalar("trials", get("trials").unwrap_or("0"))?,
            out: get("out").filter(|s| !s.is_empty()).map(PathBuf::from),
            raw,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        match self.command {
            Command::Curves | Command::Partial | Command::Crb if self.theta.is_none() => {
                Err(CliError::Config("a theta grid is required".into()))
            }
            Command::Crb if self.shots == 0 || self.trials == 0 => {
                Err(CliError::Config("shots and trials must be positive".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn thetas(&self) -> Vec<f64> {
        self.theta.map(|g| g.points()).unwrap_or_default()
    }

    /// `key=value` echo of the resolved configuration, loadable with `--config`.
    pub fn manifest(&self, version: &str) -> String {
        let mut out = format!(
            "# qfi-probe run manifest\n# version={version}\n# command={}\n",
            self.command.name()
        );
        for (k, v) in &self.raw {
            out.push_str(&format!("{k}={v}\n"));
        }
        out
    }
}

fn validate_grid(grid: &ThetaGrid) -> Result<(), CliError> {
    let (lo, hi) = THETA_BOUNDS;
    if grid.step.is_nan() || grid.step <= 0.0 {
        return Err(CliError::Config("theta-step must be positive".into()));
    }
    if grid.start > grid.stop {
        return Err(CliError::Config("theta-start exceeds theta-stop".into()));
    }
    if grid.start < lo || grid.stop > hi {
        return Err(CliError::Config(format!(
            "theta grid must lie within [{}, {}]",
            fmt_num(lo),
            fmt_num(hi)
        )));
    }
    Ok(())
}
