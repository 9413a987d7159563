//! Subcommand bodies. Each returns the bytes to emit; the binary only routes
//! them to a file or stdout.

use serde::Serialize;

use super::config::{ExperimentConfig, Format, StrategyKind};
use super::report::{format_real, render_csv, render_json, render_sweep};
use super::sweep::run_sweep;
use super::table1::{table1_demo, TABLE1_COLUMNS};
use crate::analysis::{classify_family, ClassifierConfig, InstrumentRule};
use crate::error::{Result, SealError};
use crate::oracle::{run_builtin_suite, OracleReport};
use crate::quantum::{apply_instrument, MeasurementInstrument, ENUMERATION_CAP};
use crate::seals::{Message, SealScheme};
use crate::strategies::{honest_full_readout, partition_readout, projective_decode, q_povm};
use crate::verifier::{joint_success_escape, DetectionReport, Success};

/// Output of one subcommand.
#[derive(Clone, Debug, PartialEq)]
pub struct CommandOutput {
    pub bytes: Vec<u8>,
    /// Set when the command ran but found a numerical failure (oracle mismatch).
    pub failed: bool,
}

impl CommandOutput {
    fn ok(bytes: Vec<u8>) -> Self {
        CommandOutput {
            bytes,
            failed: false,
        }
    }
}

fn parse_message(text: Option<&str>, scheme: &SealScheme) -> Result<Message> {
    match text {
        None => match scheme.string_length() {
            Some(n) if scheme.is_product() => Ok(Message::zeros(n)),
            _ => Ok(Message::Index(0)),
        },
        Some(t) if scheme.is_product() => Message::parse_bits(t),
        Some(t) => match t.parse::<usize>() {
            Ok(i) => Ok(Message::Index(i)),
            Err(_) => Message::parse_bits(t),
        },
    }
}

#[derive(Serialize)]
struct EncodeRecord {
    scheme: String,
    message: String,
    /// Per-qubit `[re0, im0, re1, im1]` for product seals.
    factors: Option<Vec<[f64; 4]>>,
    /// `[re, im]` per basis index when a dense vector exists.
    amplitudes: Option<Vec<[f64; 2]>>,
}

/// Sealed state for `message`. Product seals list one row per qubit; others
/// one row per basis amplitude.
pub fn encode(
    cfg: &ExperimentConfig,
    n: Option<usize>,
    message: Option<&str>,
    format: Format,
) -> Result<CommandOutput> {
    cfg.validate()?;
    let scheme = cfg.scheme_at(n)?;
    let msg = parse_message(message, &scheme)?;
    let state = scheme.encode(&msg)?;
    let factors = state.qubit_factorization().map(|f| {
        f.iter()
            .map(|[a, b]| [a.re, a.im, b.re, b.im])
            .collect::<Vec<_>>()
    });
    let amplitudes = if factors.is_none() {
        Some(
            state
                .amplitudes()?
                .iter()
                .map(|c| [c.re, c.im])
                .collect::<Vec<_>>(),
        )
    } else {
        None
    };
    let bytes = match format {
        Format::Json => render_json(&EncodeRecord {
            scheme: format!("{:?}", cfg.scheme.kind).to_lowercase(),
            message: msg.to_string(),
            factors,
            amplitudes,
        })?,
        Format::Csv => match (factors, amplitudes) {
            (Some(f), _) => render_csv(
                &["qubit", "re0", "im0", "re1", "im1"],
                f.iter().enumerate().map(|(q, row)| {
                    std::iter::once(q.to_string())
                        .chain(row.iter().map(|&x| format_real(x)))
                        .collect::<Vec<_>>()
                }),
            )?,
            (None, Some(a)) => render_csv(
                &["index", "re", "im"],
                a.iter()
                    .enumerate()
                    .map(|(i, [re, im])| vec![i.to_string(), format_real(*re), format_real(*im)]),
            )?,
            (None, None) => unreachable!(),
        },
    };
    Ok(CommandOutput::ok(bytes))
}

/// The configured attack instrument for `scheme`.
pub fn strategy_instrument(
    cfg: &ExperimentConfig,
    scheme: &SealScheme,
) -> Result<MeasurementInstrument> {
    let n = scheme.string_length();
    match cfg.strategy.kind {
        StrategyKind::Partition => {
            let n = n.ok_or_else(|| {
                SealError::param("N", "partition readout needs a power-of-two message count")
            })?;
            partition_readout(n, cfg.resolve_k(scheme, n)?)
        }
        StrategyKind::FullReadout => honest_full_readout(n.ok_or_else(|| {
            SealError::param("N", "full readout needs a power-of-two message count")
        })?),
        StrategyKind::QPovm => {
            let d = scheme.dim().ok_or_else(|| SealError::DimensionCap {
                what: "Q-POVM on this scheme".into(),
                cap: crate::quantum::DIMENSION_CAP,
            })?;
            q_povm(d, cfg.strategy.nu)
        }
        StrategyKind::Projective => projective_decode(scheme),
    }
}

#[derive(Serialize)]
struct AttackRecord {
    message: String,
    instrument: String,
    detection: DetectionReport,
    /// Non-negligible outcomes, omitted when there are too many to list.
    outcomes: Option<Vec<(String, f64)>>,
}

/// Largest outcome count `attack` will list.
pub const ATTACK_LISTING_CAP: usize = 4096;

/// Run the configured strategy on one sealed message and report detection.
pub fn attack(
    cfg: &ExperimentConfig,
    n: Option<usize>,
    message: Option<&str>,
    format: Format,
) -> Result<CommandOutput> {
    cfg.validate()?;
    let scheme = cfg.scheme_at(n)?;
    let msg = parse_message(message, &scheme)?;
    let inst = strategy_instrument(cfg, &scheme)?;
    let detection = joint_success_escape(&scheme, &msg, &inst, Success::CorrectGuess)?;
    let outcomes = match inst.outcome_count() {
        Some(c) if c <= ATTACK_LISTING_CAP.min(ENUMERATION_CAP) => {
            let ens = apply_instrument(&inst, &scheme.encode(&msg)?)?;
            Some(
                ens.outcomes
                    .into_iter()
                    .map(|o| (o.label, o.probability))
                    .collect::<Vec<_>>(),
            )
        }
        _ => None,
    };
    let instrument = format!("{:?}", cfg.strategy.kind).to_lowercase();
    let bytes = match format {
        Format::Json => render_json(&AttackRecord {
            message: msg.to_string(),
            instrument,
            detection,
            outcomes,
        })?,
        Format::Csv => {
            let mut rows = vec![
                vec!["success".to_owned(), format_real(detection.success_prob)],
                vec!["escape".to_owned(), format_real(detection.escape_prob)],
                vec![
                    "joint".to_owned(),
                    format_real(detection.joint_success_escape),
                ],
            ];
            for (label, p) in outcomes.unwrap_or_default() {
                rows.push(vec![format!("outcome:{label}"), format_real(p)]);
            }
            render_csv(&["quantity", "value"], rows)?
        }
    };
    Ok(CommandOutput::ok(bytes))
}

pub fn sweep(cfg: &ExperimentConfig, format: Format) -> Result<CommandOutput> {
    Ok(CommandOutput::ok(render_sweep(&run_sweep(cfg)?, format)?))
}

/// Classifier settings for `classify`: the sweep grid when it is long enough,
/// the default grid otherwise.
pub fn classify_settings(cfg: &ExperimentConfig) -> ClassifierConfig {
    let grid = if cfg.sweep.n.len() >= cfg.classifier.trend_window {
        cfg.sweep.n.clone()
    } else {
        ClassifierConfig::default().n_grid
    };
    cfg.classifier.to_classifier(&grid)
}

pub fn classify_rule(cfg: &ExperimentConfig) -> InstrumentRule {
    match cfg.strategy.kind {
        StrategyKind::QPovm => InstrumentRule::QPovm(cfg.strategy.nu),
        StrategyKind::FullReadout => InstrumentRule::FullReadout,
        StrategyKind::Partition | StrategyKind::Projective => InstrumentRule::BestReadout,
    }
}

pub fn classify(cfg: &ExperimentConfig, format: Format) -> Result<CommandOutput> {
    cfg.validate()?;
    let family = cfg.family().ok_or_else(|| {
        SealError::param(
            "scheme.kind",
            "matrix seals are a single size, not a family",
        )
    })?;
    let c = classify_family(&family, classify_rule(cfg), &classify_settings(cfg))?;
    let bytes = match format {
        Format::Json => render_json(&c)?,
        Format::Csv => render_csv(
            &["n", "H", "H_cond", "H_cond/H", "I/H", "verdict"],
            c.evidence.iter().map(|e| {
                vec![
                    e.n.to_string(),
                    format_real(e.h),
                    format_real(e.h_cond),
                    format_real(e.ratio),
                    format_real(e.info_ratio),
                    c.criterion.to_string(),
                ]
            }),
        )?,
    };
    Ok(CommandOutput::ok(bytes))
}

/// `None` prints the aligned text table.
pub fn table1(format: Option<Format>) -> Result<CommandOutput> {
    let t = table1_demo()?;
    let bytes = match format {
        None => format!("{t}\n").into_bytes(),
        Some(Format::Csv) => render_csv(&TABLE1_COLUMNS, t.csv_records())?,
        Some(Format::Json) => render_json(&t)?,
    };
    Ok(CommandOutput::ok(bytes))
}

pub fn oracle_check(seed: u64, format: Format) -> Result<CommandOutput> {
    let reports = run_builtin_suite(seed)?;
    let failed = reports.iter().any(|r| !r.pass);
    let bytes = match format {
        Format::Json => render_json(&reports)?,
        Format::Csv => render_csv(
            &[
                "quantity",
                "fast",
                "oracle",
                "abs_diff",
                "tolerance",
                "pass",
            ],
            reports.iter().map(|r: &OracleReport| {
                vec![
                    r.quantity.clone(),
                    format_real(r.fast),
                    format_real(r.oracle),
                    format_real(r.abs_diff),
                    format_real(r.tolerance),
                    r.pass.to_string(),
                ]
            }),
        )?,
    };
    Ok(CommandOutput { bytes, failed })
}
