//! Measurement strategies available to an honest reader or to an attacker:
//! leading-bit partition readout, the `a(ν)I + b(ν)|i⟩⟨i|` POVM family,
//! projective decoding of orthonormal seals, and full standard-basis readout.

use crate::analysis;
use crate::error::{Result, SealError};
use crate::quantum::{InstrumentKind, MeasurementInstrument, C64, COMPUTATION_TOL};
use crate::seals::SealScheme;

/// Grouping of `n`-bit messages by their first `k` bits.
#[derive(Clone, Debug, PartialEq)]
pub struct PartitionSpec {
    pub n: usize,
    pub k: usize,
    /// Probability that the element holding the sealed message is identified.
    pub p_max: f64,
}

impl PartitionSpec {
    /// First-`k`-bits partition of a product seal, with its achieved `p_max`.
    pub fn for_scheme(scheme: &SealScheme, k: usize) -> Result<Self> {
        let n = scheme.string_length().ok_or(SealError::NotProduct)?;
        check_k(n, k)?;
        Ok(PartitionSpec {
            n,
            k,
            p_max: analysis::partition_correct_prob(scheme, k)?,
        })
    }

    pub fn element_of<'a>(&self, bits: &'a [bool]) -> &'a [bool] {
        &bits[..self.k.min(bits.len())]
    }

    /// `log₂|𝔓|`.
    pub fn log2_size(&self) -> usize {
        self.k
    }
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(SealError::param(
            "k",
            format!("k = {k} must lie in 1..={n}"),
        ));
    }
    Ok(())
}

/// `⌈n^{2α}⌉`, clamped to `1..=n`.
///
/// Values within 1e-9 of an integer are snapped first so that exact powers
/// such as `10000^{0.5}` are not rounded up by floating-point noise.
pub fn default_partition_k(n: usize, alpha: f64) -> usize {
    let x = (n as f64).powf(2.0 * alpha);
    let k = if (x - x.round()).abs() < 1e-9 {
        x.round()
    } else {
        x.ceil()
    };
    (k as usize).clamp(1, n.max(1))
}

/// Standard-basis readout of the first `k` qubits, identity on the rest.
pub fn partition_readout(n: usize, k: usize) -> Result<MeasurementInstrument> {
    check_k(n, k)?;
    Ok(MeasurementInstrument::from_kind(
        InstrumentKind::PrefixReadout { n, k },
    ))
}

/// Standard-basis readout of every qubit.
pub fn honest_full_readout(n: usize) -> Result<MeasurementInstrument> {
    partition_readout(n, n)
}

/// Coefficients of `Q_i = a·I + b·|i⟩⟨i|`.
///
/// `b(ν) = ν` and `a(ν)` is the non-negative root of `N a² + 2ab + b² = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QPovmParams {
    pub dim: usize,
    pub nu: f64,
    pub a: f64,
    pub b: f64,
}

impl QPovmParams {
    pub fn new(dim: usize, nu: f64) -> Result<Self> {
        if dim == 0 {
            return Err(SealError::param("N", "dimension must be positive"));
        }
        if !(0.0..=1.0).contains(&nu) {
            return Err(SealError::param("nu", format!("ν = {nu} outside [0, 1]")));
        }
        let n = dim as f64;
        let b = nu;
        let a = (n * (1.0 - nu * nu) + nu * nu).sqrt();
        // (√(ν² + N(1−ν²)) − ν)/N, rewritten to avoid cancellation near ν = 1
        let a = (1.0 - nu * nu) / (a + nu);
        Ok(QPovmParams { dim, nu, a, b })
    }

    /// `N a² + 2ab + b² − 1`.
    pub fn completeness_defect(&self) -> f64 {
        self.dim as f64 * self.a * self.a + 2.0 * self.a * self.b + self.b * self.b - 1.0
    }
}

pub fn q_povm(dim: usize, nu: f64) -> Result<MeasurementInstrument> {
    let p = QPovmParams::new(dim, nu)?;
    let inst = MeasurementInstrument::from_kind(InstrumentKind::QPovm {
        dim,
        nu,
        a: p.a,
        b: p.b,
    });
    inst.ensure_complete()?;
    Ok(inst)
}

/// Projectors onto the sealed states of an orthonormal seal.
pub fn projective_decode(seal: &SealScheme) -> Result<MeasurementInstrument> {
    let rows = seal.dense_rows()?;
    check_orthonormal(&rows)?;
    let dim = rows.first().map_or(0, Vec::len);
    if rows.len() != dim {
        // orthonormal but not spanning: the projectors leave part of the space uncovered
        let inst = MeasurementInstrument::from_kind(InstrumentKind::Projective { vectors: rows });
        inst.ensure_complete()?;
        return Ok(inst);
    }
    Ok(MeasurementInstrument::from_kind(
        InstrumentKind::Projective { vectors: rows },
    ))
}

fn check_orthonormal(rows: &[Vec<C64>]) -> Result<()> {
    for (i, a) in rows.iter().enumerate() {
        for (j, b) in rows.iter().enumerate().skip(i) {
            let g: C64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            if (g - C64::new(target, 0.0)).norm() > COMPUTATION_TOL {
                return Err(SealError::NotOrthonormal);
            }
        }
    }
    Ok(())
}
