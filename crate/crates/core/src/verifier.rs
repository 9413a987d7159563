//! The sealer's tamper check.
//!
//! After the reader's measurement the sealer projects the returned state onto
//! the original sealed state; the complement outcome means "detected". The
//! reader hands back the post-measurement state as is.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SealError};
use crate::quantum::{InstrumentKind, MeasurementInstrument, PureState, ENUMERATION_CAP};
use crate::seals::{Message, SealScheme};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    /// Probability the check passes.
    pub escape_prob: f64,
    /// Probability the reader's outcome is a success and the check passes.
    pub joint_success_escape: f64,
    /// Probability the reader's outcome is a success.
    pub success_prob: f64,
}

/// Which reader outcomes count as a success.
pub enum Success<'a> {
    /// The outcome names the element (prefix for partition readouts, the
    /// message itself otherwise) that contains the sealed message.
    CorrectGuess,
    Predicate(&'a dyn Fn(usize) -> bool),
}

fn check_dims(sealed: &PureState, inst: &MeasurementInstrument) -> Result<()> {
    match inst.kind() {
        InstrumentKind::PrefixReadout { n, .. } => {
            let q = sealed.num_qubits().unwrap_or(0);
            if q != *n {
                return Err(SealError::DimensionMismatch { left: *n, right: q });
            }
        }
        _ => {
            let d = inst.dim().unwrap_or(0);
            let ds = sealed.amplitudes()?.len();
            if d != ds {
                return Err(SealError::DimensionMismatch { left: d, right: ds });
            }
        }
    }
    Ok(())
}

/// `Σ_m |⟨ψ|K_m|ψ⟩|²`.
///
/// Partition readouts on factored states use `∏_{i<k} (|α_i|⁴ + |β_i|⁴)`; the
/// shifted-projector POVM uses `Σ_i (a + b|ψ_i|²)²`. Everything else is summed
/// outcome by outcome.
pub fn escape_probability(sealed: &PureState, inst: &MeasurementInstrument) -> Result<f64> {
    check_dims(sealed, inst)?;
    match inst.kind() {
        InstrumentKind::PrefixReadout { k, .. } if sealed.qubit_factorization().is_some() => {
            let f = sealed.qubit_factorization().unwrap_or_default();
            Ok(f[..*k]
                .iter()
                .map(|q| q[0].norm_sqr().powi(2) + q[1].norm_sqr().powi(2))
                .product())
        }
        InstrumentKind::QPovm { a, b, .. } => Ok(sealed
            .amplitudes()?
            .iter()
            .map(|z| (a + b * z.norm_sqr()).powi(2))
            .sum::<f64>()
            .min(1.0)),
        _ => escape_probability_by_enumeration(sealed, inst),
    }
}

/// Generic path: enumerate every Kraus operator.
pub fn escape_probability_by_enumeration(
    sealed: &PureState,
    inst: &MeasurementInstrument,
) -> Result<f64> {
    check_dims(sealed, inst)?;
    let count = enumerable(inst)?;
    let mut total = 0.0;
    for m in 0..count {
        total += inst.kraus(m)?.expectation(sealed)?.norm_sqr();
    }
    Ok(total.clamp(0.0, 1.0))
}

fn enumerable(inst: &MeasurementInstrument) -> Result<usize> {
    inst.outcome_count()
        .filter(|&c| c <= ENUMERATION_CAP)
        .ok_or_else(|| SealError::DimensionCap {
            what: "outcome enumeration".into(),
            cap: ENUMERATION_CAP,
        })
}

/// Index of the outcome naming the sealed message, for `CorrectGuess`.
fn guess_outcome(
    scheme: &SealScheme,
    message: &Message,
    inst: &MeasurementInstrument,
) -> Result<usize> {
    match inst.kind() {
        InstrumentKind::PrefixReadout { n, k } => {
            let bits = message.to_bits(*n)?;
            Message::Bits(bits[..*k].to_vec()).to_index()
        }
        _ => {
            let i = match scheme.string_length() {
                Some(n) if scheme.is_product() => Message::Bits(message.to_bits(n)?).to_index()?,
                _ => message.to_index()?,
            };
            Ok(i)
        }
    }
}

/// Escape, success and joint success-and-escape probabilities for one message.
pub fn joint_success_escape(
    scheme: &SealScheme,
    message: &Message,
    inst: &MeasurementInstrument,
    success: Success<'_>,
) -> Result<DetectionReport> {
    let sealed = scheme.encode(message)?;
    let escape_prob = escape_probability(&sealed, inst)?;

    // Factored partition readout: the single correct outcome is the sealed prefix.
    if let (InstrumentKind::PrefixReadout { n, k }, Success::CorrectGuess, Some(f)) =
        (inst.kind(), &success, sealed.qubit_factorization())
    {
        let bits = message.to_bits(*n)?;
        let p: f64 = f[..*k]
            .iter()
            .zip(&bits)
            .map(|(q, &b)| q[usize::from(b)].norm_sqr())
            .product();
        return Ok(DetectionReport {
            escape_prob,
            joint_success_escape: p * p,
            success_prob: p,
        });
    }

    let target = match success {
        Success::CorrectGuess => Some(guess_outcome(scheme, message, inst)?),
        Success::Predicate(_) => None,
    };
    let is_success = |m: usize| match (&success, target) {
        (Success::Predicate(f), _) => f(m),
        (_, Some(t)) => m == t,
        _ => false,
    };
    let mut joint = 0.0;
    let mut success_prob = 0.0;
    for m in 0..enumerable(inst)? {
        if !is_success(m) {
            continue;
        }
        let kraus = inst.kraus(m)?;
        success_prob += kraus.probability(&sealed)?;
        joint += kraus.expectation(&sealed)?.norm_sqr();
    }
    Ok(DetectionReport {
        escape_prob,
        joint_success_escape: joint.min(escape_prob).min(success_prob),
        success_prob: success_prob.min(1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::normalize;
    use crate::seals::{tilted_qubit, FourierSeal, SealFamily};
    use crate::strategies::{partition_readout, projective_decode, q_povm};
    use num_complex::Complex64 as C64;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    const COS4_PLUS_SIN4: f64 = 0.840_589_438_619_168_2;

    #[test]
    fn undisturbing_povm_always_escapes() {
        let psi =
            normalize(&[C64::new(0.3, 0.4), C64::new(0.1, 0.0), C64::new(0.0, -0.7)]).unwrap();
        close(
            escape_probability(&psi, &q_povm(3, 0.0).unwrap()).unwrap(),
            1.0,
            1e-12,
        );
    }

    #[test]
    fn fourier_decode_escapes() {
        let scheme = SealScheme::Fourier(FourierSeal::new(8).unwrap());
        let inst = projective_decode(&scheme).unwrap();
        for i in 0..8 {
            let r = joint_success_escape(&scheme, &Message::Index(i), &inst, Success::CorrectGuess)
                .unwrap();
            close(r.escape_prob, 1.0, 1e-12);
            close(r.joint_success_escape, 1.0, 1e-12);
        }
    }

    #[test]
    fn single_tilted_qubit_escape() {
        let psi = PureState::product(vec![tilted_qubit(0.3, false)]).unwrap();
        let inst = partition_readout(1, 1).unwrap();
        close(
            escape_probability(&psi, &inst).unwrap(),
            COS4_PLUS_SIN4,
            1e-12,
        );
        close(
            escape_probability_by_enumeration(&psi, &inst).unwrap(),
            COS4_PLUS_SIN4,
            1e-12,
        );
    }

    #[test]
    fn partition_joint_is_cos4_power() {
        let theta: f64 = 0.3 / 6f64.powf(0.25);
        let scheme = SealFamily::tilted(0.3, 0.25).instantiate(6).unwrap();
        let inst = partition_readout(6, 3).unwrap();
        let msg = Message::parse_bits("101100").unwrap();
        let r = joint_success_escape(&scheme, &msg, &inst, Success::CorrectGuess).unwrap();
        close(r.joint_success_escape, theta.cos().powi(12), 1e-12);
        close(r.success_prob, theta.cos().powi(6), 1e-12);

        // dense, enumerated route
        let pred = |m: usize| m == 0b101;
        let r2 = joint_success_escape(&scheme, &msg, &inst, Success::Predicate(&pred)).unwrap();
        close(r.joint_success_escape, r2.joint_success_escape, 1e-12);
        close(r.escape_prob, r2.escape_prob, 1e-12);
    }

    #[test]
    fn zero_tilt_joint_is_one() {
        let scheme = SealScheme::Tilted(
            crate::seals::TiltedProductSeal::new(0.0, 0.25, vec![0.0; 40]).unwrap(),
        );
        let inst = partition_readout(40, 20).unwrap();
        let r = joint_success_escape(&scheme, &Message::zeros(40), &inst, Success::CorrectGuess)
            .unwrap();
        close(r.joint_success_escape, 1.0, 0.0);
        close(r.escape_prob, 1.0, 0.0);
    }

    #[test]
    fn dimension_mismatch() {
        let psi = PureState::basis(4, 0).unwrap();
        assert!(escape_probability(&psi, &q_povm(2, 0.5).unwrap()).is_err());
        assert!(escape_probability(&psi, &partition_readout(3, 1).unwrap()).is_err());
    }
}
