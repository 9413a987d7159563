//! Brute-force reference evaluation.
//!
//! Everything here is rebuilt from scheme and instrument parameters as plain
//! dense matrices and vectors: sealed states by explicit Kronecker products,
//! Kraus operators as full `D×D` arrays, probabilities by matrix-vector
//! products. Nothing calls into the structured fast paths.

use std::f64::consts::PI;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{self, Entropies, InstrumentRule, JointDistribution};
use crate::error::{Result, SealError};
use crate::quantum::{InstrumentKind, MeasurementInstrument, C64, DIMENSION_CAP};
use crate::seals::{Message, SealFamily, SealScheme};
use crate::strategies::{partition_readout, projective_decode, q_povm};
use crate::verifier::{escape_probability, joint_success_escape, Success};

/// Name of the generator behind [`monte_carlo_check`].
pub const SAMPLER: &str = "ChaCha8Rng (rand_chacha 0.9), seeded via seed_from_u64";

type Matrix = Vec<Vec<C64>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub quantity: String,
    pub fast: f64,
    pub oracle: f64,
    pub abs_diff: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl OracleReport {
    pub fn compare(quantity: impl Into<String>, fast: f64, oracle: f64, tolerance: f64) -> Self {
        let abs_diff = (fast - oracle).abs();
        OracleReport {
            quantity: quantity.into(),
            fast,
            oracle,
            abs_diff,
            tolerance,
            pass: abs_diff <= tolerance,
        }
    }
}

fn cap_check(dim: usize) -> Result<()> {
    if dim > DIMENSION_CAP {
        return Err(SealError::DimensionCap {
            what: format!("oracle dimension {dim}"),
            cap: DIMENSION_CAP,
        });
    }
    Ok(())
}

fn oracle_message_count(scheme: &SealScheme) -> Result<usize> {
    let count = match scheme {
        SealScheme::Matrix(m) => m.n_messages(),
        SealScheme::Fourier(f) => f.n_messages(),
        _ => {
            let n = scheme.product_angles().map_or(usize::MAX, |a| a.len());
            if n >= 13 {
                return Err(SealError::DimensionCap {
                    what: format!("oracle over 2^{n} messages"),
                    cap: DIMENSION_CAP,
                });
            }
            1usize << n
        }
    };
    cap_check(count)?;
    Ok(count)
}

/// Dense sealed state for message index `i`.
pub fn oracle_state(scheme: &SealScheme, i: usize) -> Result<Vec<C64>> {
    match scheme {
        SealScheme::Matrix(m) => {
            if i >= m.n_messages() {
                return Err(SealError::IndexOutOfRange {
                    index: i,
                    len: m.n_messages(),
                });
            }
            Ok((0..m.dim()).map(|j| m.lambda()[(i, j)]).collect())
        }
        SealScheme::Fourier(f) => {
            let n = f.n_messages();
            if i >= n {
                return Err(SealError::IndexOutOfRange { index: i, len: n });
            }
            let w = C64::from_polar(1.0, 2.0 * PI / n as f64);
            let s = 1.0 / (n as f64).sqrt();
            let mut out = Vec::with_capacity(n);
            let mut z = C64::new(1.0, 0.0);
            let step = w.powu(i as u32);
            for _ in 0..n {
                out.push(z * s);
                z *= step;
            }
            Ok(out)
        }
        _ => {
            let angles = scheme.product_angles().ok_or(SealError::NotProduct)?;
            let n = angles.len();
            if n >= 13 || i >= (1usize << n) {
                return Err(SealError::IndexOutOfRange {
                    index: i,
                    len: 1usize << n.min(12),
                });
            }
            let mut state = vec![C64::new(1.0, 0.0)];
            for (q, t) in angles.iter().enumerate() {
                let bit = (i >> (n - 1 - q)) & 1;
                let mut ket = [C64::new(t.sin(), 0.0); 2];
                ket[bit] = C64::new(t.cos(), 0.0);
                let mut next = Vec::with_capacity(state.len() * 2);
                for a in &state {
                    next.push(a * ket[0]);
                    next.push(a * ket[1]);
                }
                state = next;
            }
            Ok(state)
        }
    }
}

/// Full dense Kraus matrices of `inst`.
pub fn oracle_kraus(inst: &MeasurementInstrument) -> Result<Vec<Matrix>> {
    let zero = C64::new(0.0, 0.0);
    match inst.kind() {
        InstrumentKind::PrefixReadout { n, k } => {
            let dim = if *n < 13 { 1usize << n } else { usize::MAX };
            cap_check(dim)?;
            Ok((0..(1usize << k))
                .map(|s| {
                    let mut m = vec![vec![zero; dim]; dim];
                    for (j, row) in m.iter_mut().enumerate() {
                        // leading k bits of j equal s
                        let lead = (0..*k).fold(0, |acc, q| (acc << 1) | ((j >> (n - 1 - q)) & 1));
                        if lead == s {
                            row[j] = C64::new(1.0, 0.0);
                        }
                    }
                    m
                })
                .collect())
        }
        InstrumentKind::QPovm { dim, a, b, .. } => {
            cap_check(*dim)?;
            Ok((0..*dim)
                .map(|i| {
                    let mut m = vec![vec![zero; *dim]; *dim];
                    for (j, row) in m.iter_mut().enumerate() {
                        row[j] = C64::new(*a, 0.0);
                    }
                    m[i][i] += C64::new(*b, 0.0);
                    m
                })
                .collect())
        }
        InstrumentKind::Projective { vectors } => Ok(vectors
            .iter()
            .map(|v| {
                v.iter()
                    .map(|r| v.iter().map(|c| r * c.conj()).collect())
                    .collect()
            })
            .collect()),
        InstrumentKind::General { outcomes, .. } => Ok(outcomes
            .iter()
            .map(|(_, k)| {
                (0..k.nrows())
                    .map(|r| (0..k.ncols()).map(|c| k[(r, c)]).collect())
                    .collect()
            })
            .collect()),
    }
}

fn matvec(m: &Matrix, v: &[C64]) -> Vec<C64> {
    let zero = C64::new(0.0, 0.0);
    m.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .filter(|(a, _)| **a != zero)
                .fold(zero, |acc, (a, b)| acc + a * b)
        })
        .collect()
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `P(i, m) = prior(i)·‖K_m|ψ_i⟩‖²` with a uniform prior.
pub fn oracle_joint_distribution(
    scheme: &SealScheme,
    inst: &MeasurementInstrument,
) -> Result<JointDistribution> {
    Ok(joint_and_escapes(scheme, &oracle_kraus(inst)?)?.0)
}

/// Joint table and per-message escape probabilities from one pass over
/// `K_m|ψ_i⟩`.
fn joint_and_escapes(
    scheme: &SealScheme,
    kraus: &[Matrix],
) -> Result<(JointDistribution, Vec<f64>)> {
    let count = oracle_message_count(scheme)?;
    let w = 1.0 / count as f64;
    let mut table = Vec::with_capacity(count);
    let mut escapes = Vec::with_capacity(count);
    for i in 0..count {
        let psi = oracle_state(scheme, i)?;
        if kraus.first().is_some_and(|k| k.len() != psi.len()) {
            return Err(SealError::DimensionMismatch {
                left: kraus[0].len(),
                right: psi.len(),
            });
        }
        let mut row = Vec::with_capacity(kraus.len());
        let mut escape = 0.0;
        for k in kraus {
            let image = matvec(k, &psi);
            row.push(w * image.iter().map(|z| z.norm_sqr()).sum::<f64>());
            escape += dot(&psi, &image).norm_sqr();
        }
        table.push(row);
        escapes.push(escape);
    }
    Ok((
        JointDistribution::from_table(vec![w; count], table)?,
        escapes,
    ))
}

/// `Σ_m |⟨ψ|K_m|ψ⟩|²` by dense algebra.
pub fn oracle_escape_probability(
    scheme: &SealScheme,
    message: usize,
    inst: &MeasurementInstrument,
) -> Result<f64> {
    let psi = oracle_state(scheme, message)?;
    Ok(escape_with(&psi, &oracle_kraus(inst)?))
}

fn escape_with(psi: &[C64], kraus: &[Matrix]) -> f64 {
    kraus
        .iter()
        .map(|k| dot(psi, &matvec(k, psi)).norm_sqr())
        .sum()
}

/// Entropies straight from a dense table.
pub fn oracle_entropies(table: &[Vec<f64>]) -> Entropies {
    let plogp = |p: f64| {
        if p > 0.0 {
            -p * p.ln() / std::f64::consts::LN_2
        } else {
            0.0
        }
    };
    let rows: Vec<f64> = table.iter().map(|r| r.iter().sum()).collect();
    let cols = table.first().map_or(0, Vec::len);
    let h: f64 = rows.iter().map(|&p| plogp(p)).sum();
    let mut h_cond = 0.0;
    for m in 0..cols {
        let pm: f64 = table.iter().map(|r| r[m]).sum();
        if pm <= 0.0 {
            continue;
        }
        for r in table {
            let post = r[m] / pm;
            h_cond += pm * plogp(post);
        }
    }
    Entropies {
        h,
        h_cond,
        mutual_info: h - h_cond,
    }
}

/// Sample `(message, outcome)` pairs and compare frequencies with the exact
/// oracle table; passes iff every cell is within `4√(p(1−p)/T) + 1e-9`.
///
/// The report carries the worst cell relative to its bound.
pub fn monte_carlo_check(
    scheme: &SealScheme,
    inst: &MeasurementInstrument,
    trials: usize,
    seed: u64,
) -> Result<OracleReport> {
    if trials < 1_000 {
        return Err(SealError::param(
            "trials",
            "at least 1000 trials are required",
        ));
    }
    let joint = oracle_joint_distribution(scheme, inst)?;
    let table = joint.table.unwrap_or_default();
    let cols = table.first().map_or(0, Vec::len);
    let flat: Vec<f64> = table.iter().flatten().copied().collect();
    let sampler = WeightedIndex::new(&flat)
        .map_err(|e| SealError::Invariant(format!("cannot sample joint table: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; flat.len()];
    for _ in 0..trials {
        counts[sampler.sample(&mut rng)] += 1;
    }
    let t = trials as f64;
    let mut worst: Option<(f64, OracleReport)> = None;
    for (cell, (&p, &c)) in flat.iter().zip(&counts).enumerate() {
        let bound = 4.0 * (p * (1.0 - p) / t).sqrt() + 1e-9;
        let report = OracleReport::compare(
            format!(
                "P(message={}, outcome={})",
                cell / cols.max(1),
                cell % cols.max(1)
            ),
            c as f64 / t,
            p,
            bound,
        );
        let score = report.abs_diff / bound;
        if worst.as_ref().is_none_or(|(s, _)| score > *s) {
            worst = Some((score, report));
        }
    }
    worst
        .map(|(_, r)| r)
        .ok_or_else(|| SealError::Invariant("empty joint table".into()))
}

/// Schemes covered by the built-in oracle suite.
pub fn builtin_schemes() -> Result<Vec<(String, SealScheme)>> {
    let mut out = Vec::new();
    for n in 1..=6 {
        out.push((
            format!("scheme-a(0.3,0.25) n={n}"),
            SealFamily::scheme_a().instantiate(n)?,
        ));
        out.push((
            format!("ramp(0.3,0.25) n={n}"),
            SealFamily::Tilted {
                theta_cap: 0.3,
                alpha: 0.25,
                rule: crate::seals::AngleRule::Ramp,
            }
            .instantiate(n)?,
        ));
        out.push((
            format!("tilted(0.3,1) n={n}"),
            SealFamily::criterion_a_exemplar().instantiate(n)?,
        ));
        out.push((
            format!("fixed(0.3) n={n}"),
            SealFamily::criterion_c_exemplar().instantiate(n)?,
        ));
        out.push((
            format!("fourier n={n}"),
            SealFamily::Fourier.instantiate(n)?,
        ));
    }
    out.push((
        "identity N=5".into(),
        SealScheme::Matrix(crate::seals::MatrixSeal::identity(5)?),
    ));
    Ok(out)
}

/// Built-in strategies applicable to `scheme`.
pub fn builtin_strategies(scheme: &SealScheme) -> Result<Vec<(String, MeasurementInstrument)>> {
    let mut out = Vec::new();
    if let Some(n) = scheme.string_length() {
        if scheme.is_product() || scheme.dim() == Some(1usize << n) {
            for k in 1..=n {
                out.push((format!("partition k={k}"), partition_readout(n, k)?));
            }
        }
    }
    if let Some(d) = scheme.dim() {
        for nu in [0.0, 0.25, 0.5, 0.75, 1.0] {
            out.push((format!("q-povm nu={nu}"), q_povm(d, nu)?));
        }
    }
    if scheme.is_orthonormal() {
        out.push(("projective".into(), projective_decode(scheme)?));
    }
    Ok(out)
}

fn check_pair(
    tag: &str,
    scheme: &SealScheme,
    inst: &MeasurementInstrument,
) -> Result<Vec<OracleReport>> {
    const TOL: f64 = 1e-10;
    let mut reports = Vec::new();
    let messages = oracle_message_count(scheme)?;
    let kraus = oracle_kraus(inst)?;
    let fast = analysis::joint_distribution(scheme, inst, None)?;
    let (oracle, oracle_escapes) = joint_and_escapes(scheme, &kraus)?;
    let (ft, ot) = (
        fast.dense_table()?,
        oracle.table.clone().unwrap_or_default(),
    );
    let diff = ft
        .iter()
        .flatten()
        .zip(ot.iter().flatten())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    reports.push(OracleReport::compare(
        format!("{tag}: max joint diff"),
        diff,
        0.0,
        TOL,
    ));

    let fe = analysis::entropies(&fast)?;
    let oe = oracle_entropies(&ot);
    reports.push(OracleReport::compare(format!("{tag}: H"), fe.h, oe.h, TOL));
    reports.push(OracleReport::compare(
        format!("{tag}: H_cond"),
        fe.h_cond,
        oe.h_cond,
        TOL,
    ));

    for (i, &oracle_escape) in oracle_escapes.iter().enumerate() {
        let fast_escape = escape_probability(&scheme.encode(&Message::Index(i))?, inst)?;
        reports.push(OracleReport::compare(
            format!("{tag}: escape msg={i}"),
            fast_escape,
            oracle_escape,
            TOL,
        ));
    }
    if let InstrumentKind::PrefixReadout { n, k } = inst.kind() {
        // analytic joint success-and-escape vs dense correct-prefix projector
        let i = messages - 1;
        let fast = joint_success_escape(scheme, &Message::Index(i), inst, Success::CorrectGuess)?;
        let psi = oracle_state(scheme, i)?;
        let proj = &kraus[i >> (n - k)];
        let joint = dot(&psi, &matvec(proj, &psi)).norm_sqr();
        reports.push(OracleReport::compare(
            format!("{tag}: joint success-escape"),
            fast.joint_success_escape,
            joint,
            TOL,
        ));
    }
    Ok(reports)
}

/// Compare every fast path against the oracle over all built-in
/// scheme/strategy pairs, then run a seeded Monte Carlo check.
///
/// Pairs are checked in parallel; report order is fixed.
pub fn run_builtin_suite(seed: u64) -> Result<Vec<OracleReport>> {
    let mut pairs = Vec::new();
    for (sname, scheme) in builtin_schemes()? {
        for (iname, inst) in builtin_strategies(&scheme)? {
            pairs.push((format!("{sname} / {iname}"), scheme.clone(), inst));
        }
    }
    let mut reports: Vec<OracleReport> = pairs
        .par_iter()
        .map(|(tag, scheme, inst)| check_pair(tag, scheme, inst))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let scheme = SealFamily::criterion_c_exemplar().instantiate(1)?;
    let mut mc = monte_carlo_check(&scheme, &partition_readout(1, 1)?, 100_000, seed)?;
    mc.quantity = format!(
        "monte carlo fixed(0.3) n=1 [{SAMPLER}, seed {seed}]: {}",
        mc.quantity
    );
    reports.push(mc);
    Ok(reports)
}

/// Oracle entropies for a family member under `rule`, for cross-checking
/// [`analysis::family_entropies`].
pub fn oracle_family_entropies(
    family: &SealFamily,
    n: usize,
    rule: InstrumentRule,
) -> Result<Entropies> {
    let scheme = family.instantiate(n)?;
    let inst = analysis::rule_instrument(&scheme, rule)?;
    let joint = oracle_joint_distribution(&scheme, &inst)?;
    Ok(oracle_entropies(joint.table.as_deref().unwrap_or_default()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seals::FourierSeal;
    use crate::strategies::honest_full_readout;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn single_qubit_flip_probability() {
        let s = SealFamily::criterion_c_exemplar().instantiate(1).unwrap();
        let j = oracle_joint_distribution(&s, &honest_full_readout(1).unwrap()).unwrap();
        let t = j.table.unwrap();
        close(t[0][1] * 2.0, 0.087_332_192_545_160_84, 1e-12);
    }

    #[test]
    fn fourier_decode_is_identity_table() {
        let s = SealScheme::Fourier(FourierSeal::new(8).unwrap());
        let t = oracle_joint_distribution(&s, &projective_decode(&s).unwrap())
            .unwrap()
            .table
            .unwrap();
        for (i, row) in t.iter().enumerate() {
            for (m, p) in row.iter().enumerate() {
                close(*p, if i == m { 0.125 } else { 0.0 }, 1e-12);
            }
        }
    }

    #[test]
    fn three_qubit_scheme_a_matches_factorized() {
        let s = SealFamily::scheme_a().instantiate(3).unwrap();
        let inst = honest_full_readout(3).unwrap();
        let fast = analysis::joint_distribution(&s, &inst, None)
            .unwrap()
            .dense_table()
            .unwrap();
        let oracle = oracle_joint_distribution(&s, &inst).unwrap().table.unwrap();
        let diff = fast
            .iter()
            .flatten()
            .zip(oracle.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(diff < 1e-12, "{diff}");
    }

    #[test]
    fn escape_examples() {
        let f = SealScheme::Fourier(FourierSeal::new(4).unwrap());
        close(
            oracle_escape_probability(&f, 2, &q_povm(4, 0.0).unwrap()).unwrap(),
            1.0,
            1e-12,
        );

        let s = SealFamily::criterion_c_exemplar().instantiate(1).unwrap();
        close(
            oracle_escape_probability(&s, 0, &honest_full_readout(1).unwrap()).unwrap(),
            0.840_589_438_619_168_2,
            1e-12,
        );

        let s = SealFamily::scheme_a().instantiate(3).unwrap();
        let t = 0.3 / 3f64.powf(0.25);
        let analytic = (t.cos().powi(4) + t.sin().powi(4)).powi(2);
        let got = oracle_escape_probability(&s, 5, &partition_readout(3, 2).unwrap()).unwrap();
        assert!((got - analytic).abs() < 1e-12);
    }

    #[test]
    fn monte_carlo_examples() {
        // fair coin: ν = 0 POVM reads uniformly
        let f = SealScheme::Fourier(FourierSeal::new(2).unwrap());
        let r = monte_carlo_check(&f, &q_povm(2, 0.0).unwrap(), 100_000, 7).unwrap();
        assert!(r.pass, "{r:?}");

        let s = SealFamily::criterion_c_exemplar().instantiate(1).unwrap();
        let inst = honest_full_readout(1).unwrap();
        let r = monte_carlo_check(&s, &inst, 100_000, 11).unwrap();
        assert!(r.pass, "{r:?}");

        let again = monte_carlo_check(&s, &inst, 100_000, 11).unwrap();
        assert_eq!(r, again);
        assert!(monte_carlo_check(&s, &inst, 999, 1).is_err());
    }

    #[test]
    fn oracle_refuses_large_systems() {
        let s = SealFamily::scheme_a().instantiate(20).unwrap();
        assert!(oracle_joint_distribution(&s, &honest_full_readout(20).unwrap()).is_err());
    }
}
