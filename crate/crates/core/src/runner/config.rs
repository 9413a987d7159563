//! Experiment configuration files.
//!
//! TOML, versioned by a top-level `config_version` (currently 1). Unknown keys
//! are rejected everywhere.
//!
//! ```toml
//! config_version = 1
//!
//! [scheme]
//! kind = "tilted"          # tilted | fixed_angle | fourier | matrix
//! theta_cap = 0.3          # tilted: Θ, must be < π/4
//! alpha = 0.25             # tilted: α > 0
//! angle_rule = "extreme"   # tilted: extreme | ramp
//! theta = 0.3              # fixed_angle: per-bit angle
//! N = 8                    # fourier/matrix: message count (fourier sweeps use N = 2^n)
//! lambda_file = "l.csv"    # matrix: CSV with columns row,col,re,im
//!
//! [strategy]
//! kind = "partition"       # partition | q_povm | projective | full_readout
//! k = "auto"               # partition: integer or "auto" (⌈n^{2α}⌉ for tilted)
//! nu = 0.5                 # q_povm
//!
//! [sweep]
//! n = [100, 1000, 10000]
//!
//! [classifier]
//! h_crit = 4.0
//! ratio_eps = 0.05
//! threshold = 0.5
//! trend_window = 3
//! info_ratio_min = 0.5
//!
//! [output]
//! format = "csv"           # csv | json
//! path = "sweep.csv"
//! seed = 0
//! ```

use std::f64::consts::FRAC_PI_4;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{max_partition_size, ClassifierConfig};
use crate::error::{Result, SealError};
use crate::seals::{AngleRule, FourierSeal, MatrixSeal, SealFamily, SealScheme};
use crate::strategies::default_partition_k;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_version")]
    pub config_version: u32,
    pub scheme: SchemeConfig,
    #[serde(default)]
    pub strategy: StrategyConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub classifier: ClassifierBlock,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_version() -> u32 {
    CONFIG_VERSION
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    Tilted,
    FixedAngle,
    Fourier,
    Matrix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AngleRuleSetting {
    #[default]
    Extreme,
    Ramp,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeConfig {
    pub kind: SchemeKind,
    #[serde(default = "default_theta")]
    pub theta_cap: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub angle_rule: AngleRuleSetting,
    #[serde(default = "default_theta")]
    pub theta: f64,
    #[serde(rename = "N", alias = "n_messages", default)]
    pub n_messages: Option<usize>,
    #[serde(default)]
    pub lambda_file: Option<PathBuf>,
}

fn default_theta() -> f64 {
    0.3
}

fn default_alpha() -> f64 {
    0.25
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    #[default]
    Partition,
    QPovm,
    Projective,
    FullReadout,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KSetting {
    Fixed(usize),
    Named(AutoK),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AutoK {
    Auto,
}

impl Default for KSetting {
    fn default() -> Self {
        KSetting::Named(AutoK::Auto)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct StrategyConfig {
    #[serde(default)]
    pub kind: StrategyKind,
    #[serde(default)]
    pub k: KSetting,
    #[serde(default = "default_nu")]
    pub nu: f64,
}

fn default_nu() -> f64 {
    0.5
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default)]
    pub n: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifierBlock {
    #[serde(default = "d_h_crit")]
    pub h_crit: f64,
    #[serde(default = "d_ratio_eps")]
    pub ratio_eps: f64,
    #[serde(default = "d_threshold")]
    pub threshold: f64,
    #[serde(default = "d_window")]
    pub trend_window: usize,
    #[serde(default = "d_info")]
    pub info_ratio_min: f64,
}

fn d_h_crit() -> f64 {
    4.0
}
fn d_ratio_eps() -> f64 {
    0.05
}
fn d_threshold() -> f64 {
    0.5
}
fn d_window() -> usize {
    3
}
fn d_info() -> f64 {
    0.5
}

impl Default for ClassifierBlock {
    fn default() -> Self {
        ClassifierBlock {
            h_crit: d_h_crit(),
            ratio_eps: d_ratio_eps(),
            threshold: d_threshold(),
            trend_window: d_window(),
            info_ratio_min: d_info(),
        }
    }
}

impl ClassifierBlock {
    /// Classifier settings over `n_grid` (the library default grid when empty).
    pub fn to_classifier(&self, n_grid: &[usize]) -> ClassifierConfig {
        ClassifierConfig {
            h_crit: self.h_crit,
            ratio_eps: self.ratio_eps,
            n_grid: if n_grid.is_empty() {
                ClassifierConfig::default().n_grid
            } else {
                n_grid.to_vec()
            },
            trend_window: self.trend_window,
            info_ratio_min: self.info_ratio_min,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = SealError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(SealError::Config(format!(
                "unknown format {s:?} (expected csv or json)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub format: Format,
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

fn range(field: &str, message: &str) -> SealError {
    SealError::Config(format!("{field}: {message}"))
}

/// Read, parse and validate a config file. Relative `lambda_file` paths are
/// resolved against the config file's directory.
pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| SealError::Config(format!("{}: {e}", path.display())))?;
    let mut cfg = parse_config(&text).map_err(|e| match e {
        SealError::Config(m) => SealError::Config(format!("{}: {m}", path.display())),
        other => other,
    })?;
    if let (Some(file), Some(dir)) = (&cfg.scheme.lambda_file, path.parent()) {
        if file.is_relative() {
            cfg.scheme.lambda_file = Some(dir.join(file));
        }
    }
    Ok(cfg)
}

/// Parse and validate config text.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig =
        toml::from_str(text).map_err(|e| SealError::Config(e.to_string().trim_end().to_owned()))?;
    cfg.validate()?;
    Ok(cfg)
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.config_version != CONFIG_VERSION {
            return Err(range(
                "config_version",
                &format!(
                    "unsupported version {} (expected {CONFIG_VERSION})",
                    self.config_version
                ),
            ));
        }
        let s = &self.scheme;
        match s.kind {
            SchemeKind::Tilted => {
                if !(s.theta_cap < FRAC_PI_4 && s.theta_cap >= 0.0) {
                    return Err(range(
                        "theta_cap",
                        "theta_cap must be < π/4 (and non-negative)",
                    ));
                }
                if !(s.alpha > 0.0 && s.alpha.is_finite()) {
                    return Err(range("alpha", "alpha must be positive"));
                }
            }
            SchemeKind::FixedAngle => {
                if !(s.theta.abs() < FRAC_PI_4) {
                    return Err(range("theta", "|theta| must be < π/4"));
                }
            }
            SchemeKind::Fourier => {
                if let Some(n) = s.n_messages {
                    if n == 0 || n > crate::quantum::DIMENSION_CAP {
                        return Err(range("N", "N must lie in 1..=4096"));
                    }
                } else if self.sweep.n.is_empty() {
                    return Err(range("N", "fourier scheme needs N or a sweep grid"));
                }
            }
            SchemeKind::Matrix => {
                if s.lambda_file.is_none() {
                    return Err(range("lambda_file", "matrix scheme needs a lambda_file"));
                }
            }
        }
        if !(0.0..=1.0).contains(&self.strategy.nu) {
            return Err(range("nu", "nu must lie in [0, 1]"));
        }
        if self.strategy.k == KSetting::Fixed(0) {
            return Err(range("k", "k must be at least 1"));
        }
        if self.sweep.n.contains(&0) {
            return Err(range("sweep.n", "string lengths must be positive"));
        }
        let c = &self.classifier;
        if !(c.h_crit > 0.0) {
            return Err(range("h_crit", "h_crit must be positive"));
        }
        if !(c.ratio_eps > 0.0 && c.ratio_eps < 1.0) {
            return Err(range("ratio_eps", "ratio_eps must lie in (0, 1)"));
        }
        if !(c.threshold > 0.0 && c.threshold < 1.0) {
            return Err(range("threshold", "threshold must lie in (0, 1)"));
        }
        if c.trend_window == 0 {
            return Err(range("trend_window", "trend_window must be at least 1"));
        }
        if !(0.0..=1.0).contains(&c.info_ratio_min) {
            return Err(range("info_ratio_min", "info_ratio_min must lie in [0, 1]"));
        }
        Ok(())
    }

    /// The configured family; `None` for matrix seals, which have a single size.
    pub fn family(&self) -> Option<SealFamily> {
        let s = &self.scheme;
        match s.kind {
            SchemeKind::Tilted => Some(SealFamily::Tilted {
                theta_cap: s.theta_cap,
                alpha: s.alpha,
                rule: match s.angle_rule {
                    AngleRuleSetting::Extreme => AngleRule::Extreme,
                    AngleRuleSetting::Ramp => AngleRule::Ramp,
                },
            }),
            SchemeKind::FixedAngle => Some(SealFamily::FixedAngle { theta: s.theta }),
            SchemeKind::Fourier => Some(SealFamily::Fourier),
            SchemeKind::Matrix => None,
        }
    }

    /// The scheme at string length `n` (ignored for matrix seals and for
    /// Fourier seals with an explicit `N`).
    pub fn scheme_at(&self, n: Option<usize>) -> Result<SealScheme> {
        match (self.scheme.kind, n, self.scheme.n_messages) {
            (SchemeKind::Matrix, ..) => {
                let file = self
                    .scheme
                    .lambda_file
                    .as_ref()
                    .ok_or_else(|| range("lambda_file", "missing"))?;
                Ok(SealScheme::Matrix(MatrixSeal::from_csv(file)?))
            }
            (SchemeKind::Fourier, None, Some(count)) => {
                Ok(SealScheme::Fourier(FourierSeal::new(count)?))
            }
            (_, Some(n), _) => self.family().ok_or(SealError::NotProduct)?.instantiate(n),
            (_, None, _) => {
                let n = *self
                    .sweep
                    .n
                    .first()
                    .ok_or_else(|| range("sweep.n", "no string length given"))?;
                self.scheme_at(Some(n))
            }
        }
    }

    /// String lengths to sweep. Fixed-size schemes contribute their own length.
    pub fn sweep_lengths(&self) -> Result<Vec<usize>> {
        let mut grid = if self.sweep.n.is_empty() {
            let scheme = self.scheme_at(None)?;
            vec![scheme
                .string_length()
                .ok_or_else(|| range("N", "sweeps need a power-of-two message count"))?]
        } else {
            self.sweep.n.clone()
        };
        grid.sort_unstable();
        grid.dedup();
        Ok(grid)
    }

    /// Number of leading bits read by the partition strategy at length `n`.
    pub fn resolve_k(&self, scheme: &SealScheme, n: usize) -> Result<usize> {
        let k = match (self.strategy.kind, self.strategy.k) {
            (StrategyKind::FullReadout, _) => n,
            (_, KSetting::Fixed(k)) => k,
            (_, KSetting::Named(AutoK::Auto)) => match self.scheme.kind {
                SchemeKind::Tilted => default_partition_k(n, self.scheme.alpha),
                SchemeKind::FixedAngle => {
                    max_partition_size(scheme, self.classifier.threshold)?.max(1)
                }
                SchemeKind::Fourier | SchemeKind::Matrix => n,
            },
        };
        if k == 0 || k > n {
            return Err(range("k", &format!("k = {k} must lie in 1..={n}")));
        }
        Ok(k)
    }
}
