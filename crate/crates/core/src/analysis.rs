//! Readout probabilities, Shannon entropies, the best first-`k` partition,
//! non-concealment classification of seal families, and two gap measures:
//! the finite-`n` distance of `p_max` from its large-`n` limit and the trace
//! distance between `a|ψ⟩ + b⟨i|ψ⟩|i⟩` and the nearest mixture of `|ψ⟩`, `|i⟩`.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SealError};
use crate::quantum::{
    bits_of, InstrumentKind, MeasurementInstrument, PureState, C64, COMPUTATION_TOL,
    ENUMERATION_CAP,
};
use crate::seals::{Message, SealFamily, SealScheme};
use crate::strategies::{default_partition_k, honest_full_readout, projective_decode};

/// Dense joint tables are limited to this many entries.
pub const TABLE_LIMIT: u128 = 1 << 24;

fn product_angles(scheme: &SealScheme) -> Result<std::borrow::Cow<'_, [f64]>> {
    scheme.product_angles().ok_or(SealError::NotProduct)
}

/// `ln cos²θ`, accurate for small angles.
fn ln_cos_sq(theta: f64) -> f64 {
    let s = theta.sin();
    (-s * s).ln_1p()
}

/// Probability that standard-basis reading recovers bit `position`.
pub fn per_bit_correct_prob(scheme: &SealScheme, position: usize) -> Result<f64> {
    let angles = product_angles(scheme)?;
    let t = angles.get(position).ok_or(SealError::IndexOutOfRange {
        index: position,
        len: angles.len(),
    })?;
    Ok(t.cos().powi(2))
}

/// Probability that the whole string is read correctly, `∏ cos²θ_i`.
pub fn string_correct_prob(scheme: &SealScheme) -> Result<f64> {
    let angles = product_angles(scheme)?;
    partition_correct_prob(scheme, angles.len())
}

/// Probability that the first `k` bits are all read correctly.
pub fn partition_correct_prob(scheme: &SealScheme, k: usize) -> Result<f64> {
    let angles = product_angles(scheme)?;
    if k > angles.len() {
        return Err(SealError::param(
            "k",
            format!("k = {k} exceeds n = {}", angles.len()),
        ));
    }
    Ok(angles[..k].iter().map(|&t| ln_cos_sq(t)).sum::<f64>().exp())
}

/// Largest `k` whose first-`k`-bits partition is identified with probability
/// at least `threshold`; 0 if even `k = 1` falls short.
pub fn max_partition_size(scheme: &SealScheme, threshold: f64) -> Result<usize> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(SealError::param(
            "threshold",
            "threshold must lie in (0, 1)",
        ));
    }
    let angles = product_angles(scheme)?;
    let floor = threshold.ln();
    let mut acc = 0.0;
    let mut k = 0;
    for &t in angles.iter() {
        acc += ln_cos_sq(t);
        if acc < floor {
            break;
        }
        k += 1;
    }
    Ok(k)
}

/// Joint law of sealed message and reader outcome.
///
/// Either a dense table (rows = messages, columns = outcomes) or, for product
/// seals read qubit by qubit under a uniform prior, a per-bit description:
/// flip probabilities of the bits that are read plus a count of bits left
/// unread.
#[derive(Clone, Debug, PartialEq)]
pub struct JointDistribution {
    pub prior: Vec<f64>,
    pub table: Option<Vec<Vec<f64>>>,
    pub factorized: Option<BitChannels>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BitChannels {
    /// `P(read bit ≠ sealed bit)` for each read position.
    pub flip: Vec<f64>,
    /// Positions never read.
    pub unread: usize,
}

impl BitChannels {
    pub fn n(&self) -> usize {
        self.flip.len() + self.unread
    }

    /// Expand to a dense table over `2^n` messages and `2^k` outcomes.
    pub fn to_table(&self) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        let n = self.n();
        let k = self.flip.len();
        let entries = 1u128.checked_shl((n + k) as u32).unwrap_or(u128::MAX);
        if n >= 63 || entries > TABLE_LIMIT {
            return Err(SealError::TableTooLarge {
                entries,
                limit: TABLE_LIMIT,
            });
        }
        let messages = 1usize << n;
        let prior = vec![1.0 / messages as f64; messages];
        let table = (0..messages)
            .map(|i| {
                let bits = bits_of(i, n);
                (0..(1usize << k))
                    .map(|m| {
                        let read = bits_of(m, k);
                        prior[i]
                            * self
                                .flip
                                .iter()
                                .zip(bits.iter().zip(&read))
                                .map(|(q, (b, r))| if b == r { 1.0 - q } else { *q })
                                .product::<f64>()
                    })
                    .collect()
            })
            .collect();
        Ok((prior, table))
    }
}

impl JointDistribution {
    pub fn from_table(prior: Vec<f64>, table: Vec<Vec<f64>>) -> Result<Self> {
        let total: f64 = table.iter().flatten().sum();
        if table.iter().flatten().any(|&p| p < 0.0) || (total - 1.0).abs() > COMPUTATION_TOL {
            return Err(SealError::Invariant(format!(
                "joint table must be non-negative and sum to 1 (sum {total})"
            )));
        }
        Ok(JointDistribution {
            prior,
            table: Some(table),
            factorized: None,
        })
    }

    /// Noiseless per-bit channels on `n` bits (e.g. a perfect seal decoded
    /// projectively), without materializing the table.
    pub fn noiseless(n: usize) -> Self {
        JointDistribution {
            prior: Vec::new(),
            table: None,
            factorized: Some(BitChannels {
                flip: vec![0.0; n],
                unread: 0,
            }),
        }
    }

    /// Dense table, expanding the factorized form if needed.
    pub fn dense_table(&self) -> Result<Vec<Vec<f64>>> {
        match (&self.table, &self.factorized) {
            (Some(t), _) => Ok(t.clone()),
            (None, Some(f)) => Ok(f.to_table()?.1),
            _ => Err(SealError::Invariant("empty joint distribution".into())),
        }
    }
}

fn is_uniform(prior: &[f64]) -> bool {
    let u = 1.0 / prior.len() as f64;
    prior.iter().all(|p| (p - u).abs() <= 1e-15)
}

/// Joint law of message and outcome when `inst` reads `scheme`.
///
/// Product seals read by a partition readout under a uniform prior get the
/// factorized form; everything else is tabulated densely.
pub fn joint_distribution(
    scheme: &SealScheme,
    inst: &MeasurementInstrument,
    prior: Option<Vec<f64>>,
) -> Result<JointDistribution> {
    let uniform = prior.as_deref().is_none_or(is_uniform);
    if let (Some(angles), InstrumentKind::PrefixReadout { n, k }, true) =
        (scheme.product_angles(), inst.kind(), uniform)
    {
        if *n != angles.len() {
            return Err(SealError::DimensionMismatch {
                left: *n,
                right: angles.len(),
            });
        }
        let flip = angles[..*k].iter().map(|t| t.sin().powi(2)).collect();
        let prior = match scheme.message_count() {
            Some(count) if count <= crate::quantum::DIMENSION_CAP => {
                vec![1.0 / count as f64; count]
            }
            _ => Vec::new(),
        };
        return Ok(JointDistribution {
            prior,
            table: None,
            factorized: Some(BitChannels {
                flip,
                unread: n - k,
            }),
        });
    }
    dense_joint_distribution(scheme, inst, prior)
}

fn dense_joint_distribution(
    scheme: &SealScheme,
    inst: &MeasurementInstrument,
    prior: Option<Vec<f64>>,
) -> Result<JointDistribution> {
    let messages = scheme.message_count().unwrap_or(usize::MAX);
    let outcomes = inst.outcome_count().unwrap_or(usize::MAX);
    let entries = messages as u128 * outcomes as u128;
    if entries > TABLE_LIMIT || outcomes > ENUMERATION_CAP {
        return Err(SealError::TableTooLarge {
            entries,
            limit: TABLE_LIMIT,
        });
    }
    let prior = prior.unwrap_or_else(|| vec![1.0 / messages as f64; messages]);
    if prior.len() != messages {
        return Err(SealError::DimensionMismatch {
            left: prior.len(),
            right: messages,
        });
    }
    let kraus = (0..outcomes)
        .map(|m| inst.kraus(m))
        .collect::<Result<Vec<_>>>()?;
    let table = prior
        .par_iter()
        .enumerate()
        .map(|(i, &w)| {
            let psi = scheme.encode(&Message::Index(i))?;
            kraus.iter().map(|k| Ok(w * k.probability(&psi)?)).collect()
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    JointDistribution::from_table(prior, table)
}

/// Entropies in bits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Entropies {
    pub h: f64,
    pub h_cond: f64,
    pub mutual_info: f64,
}

/// Binary entropy `h(p)` in bits.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

fn shannon(ps: impl IntoIterator<Item = f64>) -> f64 {
    ps.into_iter()
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum()
}

/// `H(message)`, `H(message | outcome)` and their difference.
pub fn entropies(joint: &JointDistribution) -> Result<Entropies> {
    if let Some(bits) = &joint.factorized {
        // uniform prior, symmetric channel: the posterior flip probability is the flip probability
        let h = bits.n() as f64;
        let h_cond = (bits.flip.iter().map(|&q| binary_entropy(q)).sum::<f64>()
            + bits.unread as f64)
            .clamp(0.0, h);
        return Ok(Entropies {
            h,
            h_cond,
            mutual_info: h - h_cond,
        });
    }
    let table = joint
        .table
        .as_ref()
        .ok_or_else(|| SealError::Invariant("empty joint distribution".into()))?;
    let h = shannon(joint.prior.iter().copied());
    let cols = table.first().map_or(0, Vec::len);
    let h_outcome = shannon((0..cols).map(|m| table.iter().map(|row| row[m]).sum::<f64>()));
    let h_joint = shannon(table.iter().flatten().copied());
    let h_cond = (h_joint - h_outcome).clamp(0.0, h);
    Ok(Entropies {
        h,
        h_cond,
        mutual_info: h - h_cond,
    })
}

/// Non-concealment criterion, strongest first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Criterion {
    A,
    B,
    C,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Criterion::A => "A",
            Criterion::B => "B",
            Criterion::C => "C",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifierConfig {
    /// Bound on `H_cond` for criterion A, in bits.
    pub h_crit: f64,
    /// Bound on `H_cond/H` at the largest length for criterion B.
    pub ratio_eps: f64,
    pub n_grid: Vec<usize>,
    /// Number of trailing grid points the trend tests look at.
    pub trend_window: usize,
    /// Smallest `ℐ/H` still counted as "of order one" for criterion A.
    pub info_ratio_min: f64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            h_crit: 4.0,
            ratio_eps: 0.05,
            n_grid: vec![100, 1_000, 10_000, 100_000],
            trend_window: 3,
            info_ratio_min: 0.5,
        }
    }
}

impl ClassifierConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.h_crit > 0.0) {
            return Err(SealError::param("h_crit", "h_crit must be positive"));
        }
        if !(self.ratio_eps > 0.0 && self.ratio_eps < 1.0) {
            return Err(SealError::param(
                "ratio_eps",
                "ratio_eps must lie in (0, 1)",
            ));
        }
        if self.trend_window == 0 {
            return Err(SealError::param(
                "trend_window",
                "trend_window must be at least 1",
            ));
        }
        if !(0.0..=1.0).contains(&self.info_ratio_min) {
            return Err(SealError::param(
                "info_ratio_min",
                "info_ratio_min must lie in [0, 1]",
            ));
        }
        Ok(())
    }
}

/// Reader instrument per string length used when classifying a family.
#[derive(Clone, Copy, Debug, Default)]
pub enum InstrumentRule {
    /// Projective decode for orthonormal seals, honest full standard-basis
    /// readout otherwise.
    #[default]
    BestReadout,
    /// Honest full standard-basis readout regardless of the seal.
    FullReadout,
    /// `Q_i` POVM at a fixed `ν` (dense schemes only).
    QPovm(f64),
}

/// Entropies for one family member under `rule`.
pub fn family_entropies(family: &SealFamily, n: usize, rule: InstrumentRule) -> Result<Entropies> {
    // Fourier seals are orthonormal at every N, so projective decoding is a
    // noiseless channel on all n bits, including lengths past the dense cap.
    if matches!(family, SealFamily::Fourier) && matches!(rule, InstrumentRule::BestReadout) {
        if n == 0 {
            return Err(SealError::param("n", "string length must be positive"));
        }
        return entropies(&JointDistribution::noiseless(n));
    }
    let scheme = family.instantiate(n)?;
    let inst = rule_instrument(&scheme, rule)?;
    entropies(&joint_distribution(&scheme, &inst, None)?)
}

/// The instrument `rule` selects for `scheme`.
pub fn rule_instrument(scheme: &SealScheme, rule: InstrumentRule) -> Result<MeasurementInstrument> {
    let n = scheme.string_length();
    match rule {
        InstrumentRule::BestReadout if !scheme.is_product() && scheme.is_orthonormal() => {
            projective_decode(scheme)
        }
        InstrumentRule::BestReadout | InstrumentRule::FullReadout => {
            honest_full_readout(n.ok_or_else(|| {
                SealError::param("scheme", "standard-basis readout needs 2^n messages")
            })?)
        }
        InstrumentRule::QPovm(nu) => {
            let d = scheme.dim().ok_or_else(|| SealError::DimensionCap {
                what: "Q-POVM".into(),
                cap: crate::quantum::DIMENSION_CAP,
            })?;
            crate::strategies::q_povm(d, nu)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvidenceRow {
    pub n: usize,
    pub h: f64,
    pub h_cond: f64,
    pub ratio: f64,
    pub info_ratio: f64,
}

/// A finite-`n` verdict together with the evidence it rests on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub criterion: Criterion,
    pub evidence: Vec<EvidenceRow>,
    /// Always true: limits are judged from finitely many lengths.
    pub heuristic: bool,
}

/// Assign the strongest criterion the family's trend supports on `cfg.n_grid`.
///
/// A: `H_cond ≤ H_crit` and non-increasing over the trend window, with
/// `ℐ/H ≥ info_ratio_min` at the largest length. B: `H_cond/H ≤ ratio_eps`
/// at the largest length and decreasing over the window. C otherwise.
pub fn classify_family(
    family: &SealFamily,
    rule: InstrumentRule,
    cfg: &ClassifierConfig,
) -> Result<Classification> {
    cfg.validate()?;
    if cfg.n_grid.len() < cfg.trend_window {
        return Err(SealError::GridTooSmall {
            points: cfg.n_grid.len(),
            window: cfg.trend_window,
        });
    }
    let mut grid = cfg.n_grid.clone();
    grid.sort_unstable();
    grid.dedup();
    if grid.len() < cfg.trend_window {
        return Err(SealError::GridTooSmall {
            points: grid.len(),
            window: cfg.trend_window,
        });
    }
    let evidence = grid
        .par_iter()
        .map(|&n| {
            let e = family_entropies(family, n, rule).map_err(|e| e.at_length(n))?;
            let ratio = if e.h > 0.0 { e.h_cond / e.h } else { 0.0 };
            Ok(EvidenceRow {
                n,
                h: e.h,
                h_cond: e.h_cond,
                ratio,
                info_ratio: 1.0 - ratio,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let criterion = verdict(&evidence, cfg);
    Ok(Classification {
        criterion,
        evidence,
        heuristic: true,
    })
}

fn verdict(evidence: &[EvidenceRow], cfg: &ClassifierConfig) -> Criterion {
    let window = &evidence[evidence.len() - cfg.trend_window..];
    let last = &window[window.len() - 1];
    let slack = 1e-12;
    let bounded = window.iter().all(|r| r.h_cond <= cfg.h_crit);
    let non_increasing = window
        .windows(2)
        .all(|w| w[1].h_cond <= w[0].h_cond + slack);
    if bounded && non_increasing && last.info_ratio >= cfg.info_ratio_min {
        return Criterion::A;
    }
    let decreasing = window
        .windows(2)
        .all(|w| w[1].ratio < w[0].ratio || (w[1].ratio <= slack && w[0].ratio <= slack));
    if last.ratio <= cfg.ratio_eps && decreasing {
        return Criterion::B;
    }
    Criterion::C
}

/// `|cos^{2⌈n^{2α}⌉}(Θ/n^α) − exp(−Θ²)|`.
pub fn asymptote_gap(theta_cap: f64, alpha: f64, n: usize) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(SealError::param("alpha", "alpha must lie in (0, 1/2)"));
    }
    if n == 0 {
        return Err(SealError::param("n", "string length must be positive"));
    }
    let k = default_partition_k(n, alpha) as f64;
    let theta = theta_cap / (n as f64).powf(alpha);
    let finite = (k * ln_cos_sq(theta)).exp();
    Ok((finite - (-theta_cap * theta_cap).exp()).abs())
}

/// Orthonormal coordinates in `span{|i⟩, |ψ⟩}`.
struct Plane {
    /// `ψ` in the basis `(|i⟩, |ψ_⊥⟩)`.
    psi: [C64; 2],
}

/// 2×2 Hermitian matrix `[[x, z], [z*, y]]`.
#[derive(Clone, Copy)]
struct Herm2 {
    x: f64,
    y: f64,
    z: C64,
}

impl Herm2 {
    fn pure(v: [C64; 2]) -> Self {
        Herm2 {
            x: v[0].norm_sqr(),
            y: v[1].norm_sqr(),
            z: v[0] * v[1].conj(),
        }
    }

    fn trace_norm_half(self) -> f64 {
        let mean = (self.x + self.y) / 2.0;
        let r = (((self.x - self.y) / 2.0).powi(2) + self.z.norm_sqr()).sqrt();
        ((mean + r).abs() + (mean - r).abs()) / 2.0
    }
}

/// Minimum over `p ∈ [0, 1]` of the trace distance between
/// `|χ⟩ ∝ a|ψ⟩ + b⟨i|ψ⟩|i⟩` and `p|ψ⟩⟨ψ| + (1 − p)|i⟩⟨i|`.
///
/// All three states live in `span{|ψ⟩, |i⟩}`, so the distance is computed on
/// 2×2 matrices. The minimizer is located on a 10⁴-interval grid and refined
/// by golden-section search to 1e-6 in `p`.
pub fn superposition_vs_mixture_gap(psi: &PureState, i: usize, a: f64, b: f64) -> Result<f64> {
    Ok(mixture_gap_with_argmin(psi, i, a, b)?.0)
}

/// Gap and the minimizing mixture weight `p`.
pub fn mixture_gap_with_argmin(psi: &PureState, i: usize, a: f64, b: f64) -> Result<(f64, f64)> {
    if a == 0.0 && b == 0.0 {
        return Err(SealError::param(
            "a_coef",
            "a_coef and b_coef cannot both be zero",
        ));
    }
    let amps = psi.amplitudes()?;
    let psi_i = *amps.get(i).ok_or(SealError::IndexOutOfRange {
        index: i,
        len: amps.len(),
    })?;
    let perp = (1.0 - psi_i.norm_sqr()).max(0.0).sqrt();
    let plane = Plane {
        psi: [psi_i, C64::new(perp, 0.0)],
    };
    let chi_raw = [plane.psi[0] * a + psi_i * b, plane.psi[1] * a];
    let norm = (chi_raw[0].norm_sqr() + chi_raw[1].norm_sqr()).sqrt();
    if !(norm > 0.0) {
        return Err(SealError::NullState);
    }
    let chi = Herm2::pure([chi_raw[0] / norm, chi_raw[1] / norm]);
    let rho_psi = Herm2::pure(plane.psi);
    let distance = |p: f64| {
        let d = Herm2 {
            x: chi.x - p * rho_psi.x - (1.0 - p),
            y: chi.y - p * rho_psi.y,
            z: chi.z - rho_psi.z * p,
        };
        d.trace_norm_half()
    };

    const STEPS: usize = 10_000;
    let (best_j, _) = (0..=STEPS)
        .map(|j| (j, distance(j as f64 / STEPS as f64)))
        .fold(
            (0, f64::INFINITY),
            |acc, (j, d)| if d < acc.1 { (j, d) } else { acc },
        );
    let h = 1.0 / STEPS as f64;
    let (mut lo, mut hi) = (
        (best_j as f64 * h - h).max(0.0),
        (best_j as f64 * h + h).min(1.0),
    );
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    while hi - lo > 1e-6 {
        let m1 = hi - ratio * (hi - lo);
        let m2 = lo + ratio * (hi - lo);
        if distance(m1) <= distance(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let candidates = [best_j as f64 * h, (lo + hi) / 2.0];
    let (p, gap) =
        candidates
            .into_iter()
            .map(|p| (p, distance(p)))
            .fold(
                (0.0, f64::INFINITY),
                |acc, c| if c.1 < acc.1 { c } else { acc },
            );
    Ok((gap.max(0.0), p))
}

/// Everything the analysis reports for one seal under one reading.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub h: f64,
    pub h_cond: f64,
    pub mutual_info: f64,
    pub p_bit: Vec<f64>,
    pub p_string: f64,
    pub p_max: f64,
    pub k_star: usize,
    pub criterion: Option<Criterion>,
}

impl AnalysisReport {
    /// Checks `0 ≤ H_cond ≤ H`, `ℐ = H − H_cond` and `p_string ≤ min p_bit`.
    pub fn validate(&self) -> Result<()> {
        let tol = COMPUTATION_TOL * self.h.max(1.0);
        if self.h_cond < -tol || self.h_cond > self.h + tol {
            return Err(SealError::Invariant(format!(
                "H_cond = {} outside [0, H = {}]",
                self.h_cond, self.h
            )));
        }
        if (self.mutual_info - (self.h - self.h_cond)).abs() > tol {
            return Err(SealError::Invariant("I != H - H_cond".into()));
        }
        if let Some(min) = self.p_bit.iter().copied().reduce(f64::min) {
            if self.p_string > min + COMPUTATION_TOL {
                return Err(SealError::Invariant(format!(
                    "p_string = {} exceeds min p_bit = {min}",
                    self.p_string
                )));
            }
        }
        Ok(())
    }
}

/// Honest-readout report for a product seal, reading the first `k` bits for `p_max`.
pub fn analyze_product(scheme: &SealScheme, k: usize, threshold: f64) -> Result<AnalysisReport> {
    let angles = product_angles(scheme)?;
    let n = angles.len();
    let e = entropies(&joint_distribution(scheme, &honest_full_readout(n)?, None)?)?;
    let report = AnalysisReport {
        h: e.h,
        h_cond: e.h_cond,
        mutual_info: e.mutual_info,
        p_bit: angles.iter().map(|t| t.cos().powi(2)).collect(),
        p_string: string_correct_prob(scheme)?,
        p_max: partition_correct_prob(scheme, k)?,
        k_star: max_partition_size(scheme, threshold)?,
        criterion: None,
    };
    report.validate()?;
    Ok(report)
}
