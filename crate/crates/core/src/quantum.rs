//! Dense and product-structured pure states, density operators and Kraus
//! instruments.
//!
//! Basis indices are big-endian: qubit 0 (the first bit of a string) is the
//! most significant bit of the computational-basis index. Dense paths are
//! capped at [`DIMENSION_CAP`]; states that carry a per-qubit factorization
//! are never expanded past the cap and every product fast path works on the
//! factors directly.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Result, SealError};

pub type C64 = Complex64;

/// Amplitudes `(⟨0|q⟩, ⟨1|q⟩)` of a single qubit factor.
pub type QubitAmplitudes = [C64; 2];

/// Largest dense dimension (12 qubits).
pub const DIMENSION_CAP: usize = 4096;
pub const CONSTRUCTION_TOL: f64 = 1e-12;
pub const COMPUTATION_TOL: f64 = 1e-10;
/// Outcomes below this probability are dropped from ensembles.
pub const NEGLIGIBLE_PROB: f64 = 1e-14;
/// Largest outcome count `apply_instrument` will enumerate.
pub const ENUMERATION_CAP: usize = 1 << 20;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

fn kron(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

fn expand_factors(factors: &[QubitAmplitudes]) -> Vec<C64> {
    factors
        .iter()
        .fold(vec![ONE], |acc, q| kron(&acc, q.as_slice()))
}

fn dense_fits(qubits: usize) -> bool {
    qubits < usize::BITS as usize && (1usize << qubits) <= DIMENSION_CAP
}

/// A normalized pure state.
///
/// At least one of the dense amplitude vector and the per-qubit factorization
/// is present. Product states with more than 12 qubits keep only their factors.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Option<Vec<C64>>,
    factors: Option<Vec<QubitAmplitudes>>,
}

/// Rescale `raw` to unit norm.
pub fn normalize(raw: &[C64]) -> Result<PureState> {
    PureState::normalize(raw.to_vec())
}

impl PureState {
    pub fn normalize(mut raw: Vec<C64>) -> Result<Self> {
        let n2 = norm_sqr(&raw);
        if !(n2 > 0.0) || !n2.is_finite() {
            return Err(SealError::NullState);
        }
        if raw.len() > DIMENSION_CAP {
            return Err(SealError::DimensionCap {
                what: format!("dimension {}", raw.len()),
                cap: DIMENSION_CAP,
            });
        }
        let scale = n2.sqrt().recip();
        raw.iter_mut().for_each(|z| *z *= scale);
        Ok(PureState {
            amplitudes: Some(raw),
            factors: None,
        })
    }

    /// Wrap amplitudes that are already normalized to within 1e-12.
    pub fn from_amplitudes(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(SealError::NullState);
        }
        if amplitudes.len() > DIMENSION_CAP {
            return Err(SealError::DimensionCap {
                what: format!("dimension {}", amplitudes.len()),
                cap: DIMENSION_CAP,
            });
        }
        let n2 = norm_sqr(&amplitudes);
        if (n2 - 1.0).abs() > CONSTRUCTION_TOL {
            return Err(SealError::NotNormalized { norm_sqr: n2 });
        }
        Ok(PureState {
            amplitudes: Some(amplitudes),
            factors: None,
        })
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(SealError::IndexOutOfRange { index, len: dim });
        }
        let mut v = vec![ZERO; dim];
        v[index] = ONE;
        Self::from_amplitudes(v)
    }

    /// Product state from normalized qubit factors, first factor most significant.
    pub fn product(factors: Vec<QubitAmplitudes>) -> Result<Self> {
        if factors.is_empty() {
            return Err(SealError::NullState);
        }
        for (i, q) in factors.iter().enumerate() {
            let n2 = norm_sqr(q);
            if (n2 - 1.0).abs() > CONSTRUCTION_TOL {
                return Err(SealError::param(
                    format!("factor[{i}]"),
                    format!("qubit factor not normalized (squared norm {n2})"),
                ));
            }
        }
        let amplitudes = dense_fits(factors.len()).then(|| expand_factors(&factors));
        Ok(PureState {
            amplitudes,
            factors: Some(factors),
        })
    }

    /// Dense amplitudes; fails for product states past the dimension cap.
    pub fn amplitudes(&self) -> Result<&[C64]> {
        match &self.amplitudes {
            Some(a) => Ok(a),
            None => Err(SealError::DimensionCap {
                what: format!("2^{} amplitudes", self.factors.as_ref().map_or(0, Vec::len)),
                cap: DIMENSION_CAP,
            }),
        }
    }

    pub fn qubit_factorization(&self) -> Option<&[QubitAmplitudes]> {
        self.factors.as_deref()
    }

    pub fn is_dense(&self) -> bool {
        self.amplitudes.is_some()
    }

    /// Dense dimension, or `None` when the state is only held in factored form.
    pub fn dim(&self) -> Option<usize> {
        self.amplitudes.as_ref().map(Vec::len)
    }

    pub fn num_qubits(&self) -> Option<usize> {
        if let Some(f) = &self.factors {
            return Some(f.len());
        }
        let d = self.amplitudes.as_ref()?.len();
        d.is_power_of_two().then(|| d.trailing_zeros() as usize)
    }

    /// Amplitude of a single basis index.
    pub fn amplitude(&self, index: usize) -> Result<C64> {
        let a = self.amplitudes()?;
        a.get(index).copied().ok_or(SealError::IndexOutOfRange {
            index,
            len: a.len(),
        })
    }

    pub fn density(&self) -> Result<DensityOperator> {
        let a = self.amplitudes()?;
        let d = a.len();
        Ok(DensityOperator {
            matrix: DMatrix::from_fn(d, d, |r, c| a[r] * a[c].conj()),
        })
    }
}

/// Tensor product with `a` as the most significant factor.
pub fn tensor(a: &PureState, b: &PureState) -> Result<PureState> {
    if let (Some(fa), Some(fb)) = (&a.factors, &b.factors) {
        let mut factors = fa.clone();
        factors.extend_from_slice(fb);
        return PureState::product(factors);
    }
    let (da, db) = (a.amplitudes()?, b.amplitudes()?);
    match da.len().checked_mul(db.len()) {
        Some(d) if d <= DIMENSION_CAP => Ok(PureState {
            amplitudes: Some(kron(da, db)),
            factors: None,
        }),
        _ => Err(SealError::DimensionCap {
            what: format!("dimension {}x{}", da.len(), db.len()),
            cap: DIMENSION_CAP,
        }),
    }
}

/// `⟨a|b⟩`, factor by factor when both states are products.
pub fn inner(a: &PureState, b: &PureState) -> Result<C64> {
    if let (Some(fa), Some(fb)) = (&a.factors, &b.factors) {
        if fa.len() != fb.len() {
            return Err(SealError::DimensionMismatch {
                left: fa.len(),
                right: fb.len(),
            });
        }
        return Ok(fa
            .iter()
            .zip(fb)
            .map(|(x, y)| x[0].conj() * y[0] + x[1].conj() * y[1])
            .product());
    }
    let (va, vb) = (a.amplitudes()?, b.amplitudes()?);
    if va.len() != vb.len() {
        return Err(SealError::DimensionMismatch {
            left: va.len(),
            right: vb.len(),
        });
    }
    Ok(va.iter().zip(vb).map(|(x, y)| x.conj() * y).sum())
}

/// `|⟨a|b⟩|²`.
pub fn fidelity(a: &PureState, b: &PureState) -> Result<f64> {
    Ok(inner(a, b)?.norm_sqr().clamp(0.0, 1.0))
}

fn hermitian_deviation(m: &DMatrix<C64>) -> f64 {
    let mut dev = 0.0f64;
    for r in 0..m.nrows() {
        for c in r..m.ncols() {
            dev = dev.max((m[(r, c)] - m[(c, r)].conj()).norm());
        }
    }
    dev
}

fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    m.clone().symmetric_eigenvalues().iter().copied().collect()
}

/// A density operator: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    matrix: DMatrix<C64>,
}

impl DensityOperator {
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(SealError::DimensionMismatch {
                left: matrix.nrows(),
                right: matrix.ncols(),
            });
        }
        let deviation = hermitian_deviation(&matrix);
        if deviation > CONSTRUCTION_TOL {
            return Err(SealError::NotHermitian { deviation });
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > CONSTRUCTION_TOL || tr.im.abs() > CONSTRUCTION_TOL {
            return Err(SealError::InvalidDensity(format!("trace {tr}")));
        }
        if let Some(min) = hermitian_eigenvalues(&matrix).into_iter().reduce(f64::min) {
            if min < -COMPUTATION_TOL {
                return Err(SealError::InvalidDensity(format!(
                    "negative eigenvalue {min:e}"
                )));
            }
        }
        Ok(DensityOperator { matrix })
    }

    /// Convex combination `Σ w_k |ψ_k⟩⟨ψ_k|`.
    pub fn mixture(terms: &[(f64, &PureState)]) -> Result<Self> {
        let first = terms.first().ok_or(SealError::NullState)?;
        let d = first.1.amplitudes()?.len();
        let mut m = DMatrix::zeros(d, d);
        for (w, psi) in terms {
            if *w < 0.0 {
                return Err(SealError::param(
                    "weight",
                    "mixture weights must be non-negative",
                ));
            }
            let rho = psi.density()?;
            if rho.dim() != d {
                return Err(SealError::DimensionMismatch {
                    left: d,
                    right: rho.dim(),
                });
            }
            m += rho.matrix * C64::new(*w, 0.0);
        }
        DensityOperator::new(m)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }
}

/// `½ Σ |λ_k(ρ − σ)|`.
pub fn trace_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(SealError::DimensionMismatch {
            left: rho.dim(),
            right: sigma.dim(),
        });
    }
    for m in [&rho.matrix, &sigma.matrix] {
        let deviation = hermitian_deviation(m);
        if deviation > CONSTRUCTION_TOL {
            return Err(SealError::NotHermitian { deviation });
        }
    }
    let diff = &rho.matrix - &sigma.matrix;
    let half_sum: f64 = hermitian_eigenvalues(&diff)
        .iter()
        .map(|l| l.abs())
        .sum::<f64>()
        / 2.0;
    Ok(half_sum.clamp(0.0, 1.0))
}

/// Unnormalized image `K|ψ⟩`, kept factored when possible.
#[derive(Clone, Debug)]
enum Ket {
    Dense(Vec<C64>),
    Product(Vec<QubitAmplitudes>),
}

impl Ket {
    fn norm_sqr(&self) -> f64 {
        match self {
            Ket::Dense(v) => norm_sqr(v),
            Ket::Product(f) => f.iter().map(|q| norm_sqr(q)).product(),
        }
    }

    fn into_state(self) -> Result<PureState> {
        match self {
            Ket::Dense(v) => PureState::normalize(v),
            Ket::Product(f) => {
                let mut out = Vec::with_capacity(f.len());
                for q in f {
                    let n2 = norm_sqr(&q);
                    if !(n2 > 0.0) {
                        return Err(SealError::NullState);
                    }
                    // untouched factors pass through bit for bit
                    if (n2 - 1.0).abs() <= CONSTRUCTION_TOL {
                        out.push(q);
                        continue;
                    }
                    let s = n2.sqrt().recip();
                    out.push([q[0] * s, q[1] * s]);
                }
                PureState::product(out)
            }
        }
    }
}

/// One Kraus operator, stored in the most compact form its structure allows.
#[derive(Clone, Debug, PartialEq)]
pub enum KrausOperator {
    /// `|s⟩⟨s|` on the leading `prefix.len()` of `n` qubits, identity on the rest.
    PrefixProjector {
        n: usize,
        prefix: Vec<bool>,
    },
    /// `a·I + b·|index⟩⟨index|` on a `dim`-dimensional space.
    ShiftedProjector {
        dim: usize,
        a: f64,
        b: f64,
        index: usize,
    },
    /// `|φ⟩⟨φ|` for a normalized `φ`.
    RankOne(Vec<C64>),
    Dense(DMatrix<C64>),
}

impl KrausOperator {
    pub fn dim(&self) -> Option<usize> {
        match self {
            KrausOperator::PrefixProjector { n, .. } => dense_fits(*n).then(|| 1usize << n),
            KrausOperator::ShiftedProjector { dim, .. } => Some(*dim),
            KrausOperator::RankOne(v) => Some(v.len()),
            KrausOperator::Dense(m) => Some(m.nrows()),
        }
    }

    fn check_dims(&self, state: &PureState) -> Result<()> {
        if let KrausOperator::PrefixProjector { n, .. } = self {
            let q = state.num_qubits().unwrap_or(0);
            return if q == *n {
                Ok(())
            } else {
                Err(SealError::DimensionMismatch { left: *n, right: q })
            };
        }
        let d = self.dim().unwrap_or(0);
        let ds = state.amplitudes()?.len();
        if d == ds {
            Ok(())
        } else {
            Err(SealError::DimensionMismatch { left: d, right: ds })
        }
    }

    fn image(&self, state: &PureState) -> Result<Ket> {
        self.check_dims(state)?;
        match self {
            KrausOperator::PrefixProjector { n, prefix } => {
                if let Some(f) = state.qubit_factorization() {
                    let mut out = f.to_vec();
                    for (q, &bit) in out.iter_mut().zip(prefix) {
                        q[usize::from(!bit)] = ZERO;
                    }
                    return Ok(Ket::Product(out));
                }
                let a = state.amplitudes()?;
                let shift = n - prefix.len();
                let s = prefix_value(prefix);
                Ok(Ket::Dense(
                    a.iter()
                        .enumerate()
                        .map(|(j, z)| if (j >> shift) == s { *z } else { ZERO })
                        .collect(),
                ))
            }
            KrausOperator::ShiftedProjector { a, b, index, .. } => {
                let amps = state.amplitudes()?;
                let mut out: Vec<C64> = amps.iter().map(|z| z * *a).collect();
                out[*index] += amps[*index] * *b;
                Ok(Ket::Dense(out))
            }
            KrausOperator::RankOne(phi) => {
                let amps = state.amplitudes()?;
                let overlap: C64 = phi.iter().zip(amps).map(|(p, z)| p.conj() * z).sum();
                Ok(Ket::Dense(phi.iter().map(|p| p * overlap).collect()))
            }
            KrausOperator::Dense(m) => {
                let amps = state.amplitudes()?;
                Ok(Ket::Dense(
                    (0..m.nrows())
                        .map(|r| (0..m.ncols()).map(|c| m[(r, c)] * amps[c]).sum())
                        .collect(),
                ))
            }
        }
    }

    /// `‖K|ψ⟩‖²`.
    pub fn probability(&self, state: &PureState) -> Result<f64> {
        Ok(self.image(state)?.norm_sqr())
    }

    /// `⟨ψ|K|ψ⟩`.
    pub fn expectation(&self, state: &PureState) -> Result<C64> {
        self.check_dims(state)?;
        match self {
            KrausOperator::PrefixProjector { prefix, .. } if !state.is_dense() => {
                let f = state.qubit_factorization().ok_or(SealError::NullState)?;
                Ok(C64::new(
                    f.iter()
                        .zip(prefix)
                        .map(|(q, &bit)| q[usize::from(bit)].norm_sqr())
                        .product(),
                    0.0,
                ))
            }
            KrausOperator::ShiftedProjector { a, b, index, .. } => {
                let p = state.amplitude(*index)?.norm_sqr();
                Ok(C64::new(a + b * p, 0.0))
            }
            _ => match self.image(state)? {
                Ket::Dense(v) => Ok(state
                    .amplitudes()?
                    .iter()
                    .zip(&v)
                    .map(|(x, y)| x.conj() * y)
                    .sum()),
                Ket::Product(f) => Ok(state
                    .qubit_factorization()
                    .ok_or(SealError::NullState)?
                    .iter()
                    .zip(&f)
                    .map(|(x, y)| x[0].conj() * y[0] + x[1].conj() * y[1])
                    .product()),
            },
        }
    }

    /// Dense matrix form.
    pub fn to_dense(&self) -> Result<DMatrix<C64>> {
        let d = self.dim().ok_or_else(|| SealError::DimensionCap {
            what: "prefix projector".into(),
            cap: DIMENSION_CAP,
        })?;
        Ok(match self {
            KrausOperator::PrefixProjector { n, prefix } => {
                let shift = n - prefix.len();
                let s = prefix_value(prefix);
                DMatrix::from_fn(d, d, |r, c| {
                    if r == c && (r >> shift) == s {
                        ONE
                    } else {
                        ZERO
                    }
                })
            }
            KrausOperator::ShiftedProjector { a, b, index, .. } => {
                DMatrix::from_fn(d, d, |r, c| {
                    let mut z = if r == c { *a } else { 0.0 };
                    if r == *index && c == *index {
                        z += b;
                    }
                    C64::new(z, 0.0)
                })
            }
            KrausOperator::RankOne(phi) => DMatrix::from_fn(d, d, |r, c| phi[r] * phi[c].conj()),
            KrausOperator::Dense(m) => m.clone(),
        })
    }
}

/// Big-endian integer value of a bit prefix.
pub fn prefix_value(bits: &[bool]) -> usize {
    bits.iter()
        .fold(0usize, |acc, &b| (acc << 1) | usize::from(b))
}

/// Big-endian bits of `value` over `width` positions.
pub fn bits_of(value: usize, width: usize) -> Vec<bool> {
    (0..width).rev().map(|s| (value >> s) & 1 == 1).collect()
}

/// Structural description of an instrument.
#[derive(Clone, Debug, PartialEq)]
pub enum InstrumentKind {
    /// Standard-basis readout of the first `k` of `n` qubits.
    PrefixReadout { n: usize, k: usize },
    /// `{a·I + b·|i⟩⟨i|}` for `i < dim`, with the `ν` it was built from.
    QPovm { dim: usize, nu: f64, a: f64, b: f64 },
    /// Rank-one projectors onto orthonormal `vectors`.
    Projective { vectors: Vec<Vec<C64>> },
    General {
        dim: usize,
        outcomes: Vec<(String, DMatrix<C64>)>,
    },
}

/// A finite measurement instrument with outcome-indexed Kraus operators.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementInstrument {
    kind: InstrumentKind,
    completeness_tolerance: f64,
}

impl MeasurementInstrument {
    /// General instrument from dense Kraus operators, rejected unless
    /// `Σ K†K = I` within `tolerance`.
    pub fn new(outcomes: Vec<(String, DMatrix<C64>)>, tolerance: f64) -> Result<Self> {
        let dim = outcomes
            .first()
            .map(|(_, k)| k.nrows())
            .ok_or_else(|| SealError::param("outcomes", "instrument needs at least one outcome"))?;
        if dim > DIMENSION_CAP {
            return Err(SealError::DimensionCap {
                what: format!("dimension {dim}"),
                cap: DIMENSION_CAP,
            });
        }
        for (label, k) in &outcomes {
            if k.nrows() != dim || k.ncols() != dim {
                return Err(SealError::param(
                    label.clone(),
                    format!(
                        "Kraus operator is {}x{}, expected {dim}x{dim}",
                        k.nrows(),
                        k.ncols()
                    ),
                ));
            }
        }
        let inst = MeasurementInstrument {
            kind: InstrumentKind::General { dim, outcomes },
            completeness_tolerance: tolerance,
        };
        inst.ensure_complete()?;
        Ok(inst)
    }

    pub(crate) fn from_kind(kind: InstrumentKind) -> Self {
        MeasurementInstrument {
            kind,
            completeness_tolerance: CONSTRUCTION_TOL,
        }
    }

    pub(crate) fn ensure_complete(&self) -> Result<()> {
        let residual = self.completeness_residual()?;
        if residual > self.completeness_tolerance {
            return Err(SealError::Incomplete {
                residual,
                tolerance: self.completeness_tolerance,
            });
        }
        Ok(())
    }

    pub fn kind(&self) -> &InstrumentKind {
        &self.kind
    }

    pub fn completeness_tolerance(&self) -> f64 {
        self.completeness_tolerance
    }

    /// Dense dimension (`None` for prefix readouts over more than 12 qubits).
    pub fn dim(&self) -> Option<usize> {
        match &self.kind {
            InstrumentKind::PrefixReadout { n, .. } => dense_fits(*n).then(|| 1usize << n),
            InstrumentKind::QPovm { dim, .. } | InstrumentKind::General { dim, .. } => Some(*dim),
            InstrumentKind::Projective { vectors } => vectors.first().map(Vec::len),
        }
    }

    /// Number of outcomes, `None` if it does not fit in a `usize`.
    pub fn outcome_count(&self) -> Option<usize> {
        match &self.kind {
            InstrumentKind::PrefixReadout { k, .. } => {
                (*k < usize::BITS as usize).then(|| 1usize << k)
            }
            InstrumentKind::QPovm { dim, .. } => Some(*dim),
            InstrumentKind::Projective { vectors } => Some(vectors.len()),
            InstrumentKind::General { outcomes, .. } => Some(outcomes.len()),
        }
    }

    pub fn label(&self, m: usize) -> String {
        match &self.kind {
            InstrumentKind::PrefixReadout { k, .. } => bits_of(m, *k)
                .into_iter()
                .map(|b| if b { '1' } else { '0' })
                .collect(),
            InstrumentKind::General { outcomes, .. } => outcomes
                .get(m)
                .map_or_else(|| m.to_string(), |(l, _)| l.clone()),
            _ => m.to_string(),
        }
    }

    pub fn kraus(&self, m: usize) -> Result<KrausOperator> {
        let len = self.outcome_count().unwrap_or(usize::MAX);
        if m >= len {
            return Err(SealError::IndexOutOfRange { index: m, len });
        }
        Ok(match &self.kind {
            InstrumentKind::PrefixReadout { n, k } => KrausOperator::PrefixProjector {
                n: *n,
                prefix: bits_of(m, *k),
            },
            InstrumentKind::QPovm { dim, a, b, .. } => KrausOperator::ShiftedProjector {
                dim: *dim,
                a: *a,
                b: *b,
                index: m,
            },
            InstrumentKind::Projective { vectors } => KrausOperator::RankOne(vectors[m].clone()),
            InstrumentKind::General { outcomes, .. } => KrausOperator::Dense(outcomes[m].1.clone()),
        })
    }

    /// Largest entry magnitude of `Σ K†K − I`.
    ///
    /// Diagonal instrument families accumulate only the diagonal; the others
    /// need a dense accumulator and are limited by the dimension cap.
    pub fn completeness_residual(&self) -> Result<f64> {
        let d = self.dim().ok_or_else(|| SealError::DimensionCap {
            what: "completeness check".into(),
            cap: DIMENSION_CAP,
        })?;
        match &self.kind {
            InstrumentKind::PrefixReadout { n, k } => {
                let mut diag = vec![0.0f64; d];
                let shift = n - k;
                for s in 0..(1usize << k) {
                    for x in &mut diag[(s << shift)..((s + 1) << shift)] {
                        *x += 1.0;
                    }
                }
                Ok(diag.iter().map(|x| (x - 1.0).abs()).fold(0.0, f64::max))
            }
            InstrumentKind::QPovm { dim, a, b, .. } => {
                // K_i†K_i = a²I + (2ab + b²)|i⟩⟨i|
                let mut diag = vec![0.0f64; *dim];
                for i in 0..*dim {
                    diag.iter_mut().for_each(|x| *x += a * a);
                    diag[i] += 2.0 * a * b + b * b;
                }
                Ok(diag.iter().map(|x| (x - 1.0).abs()).fold(0.0, f64::max))
            }
            InstrumentKind::Projective { vectors } => {
                let mut acc = DMatrix::<C64>::zeros(d, d);
                for phi in vectors {
                    let w = norm_sqr(phi);
                    for r in 0..d {
                        for c in 0..d {
                            acc[(r, c)] += phi[r] * phi[c].conj() * w;
                        }
                    }
                }
                Ok(identity_residual(&acc))
            }
            InstrumentKind::General { outcomes, .. } => {
                let mut acc = DMatrix::<C64>::zeros(d, d);
                for (_, k) in outcomes {
                    acc += k.adjoint() * k;
                }
                Ok(identity_residual(&acc))
            }
        }
    }
}

fn identity_residual(m: &DMatrix<C64>) -> f64 {
    let mut worst = 0.0f64;
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let target = if r == c { ONE } else { ZERO };
            worst = worst.max((m[(r, c)] - target).norm());
        }
    }
    worst
}

/// One branch of a measurement.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub index: usize,
    pub label: String,
    pub probability: f64,
    pub post_state: PureState,
}

#[derive(Clone, Debug)]
pub struct OutcomeEnsemble {
    pub outcomes: Vec<Outcome>,
}

impl OutcomeEnsemble {
    pub fn total_probability(&self) -> f64 {
        self.outcomes.iter().map(|o| o.probability).sum()
    }

    pub fn probability_of(&self, index: usize) -> f64 {
        self.outcomes
            .iter()
            .find(|o| o.index == index)
            .map_or(0.0, |o| o.probability)
    }
}

/// Born/Kraus rule over every outcome of `inst`.
///
/// Outcomes with probability below [`NEGLIGIBLE_PROB`] are omitted.
pub fn apply_instrument(
    inst: &MeasurementInstrument,
    state: &PureState,
) -> Result<OutcomeEnsemble> {
    let count = inst
        .outcome_count()
        .filter(|&c| c <= ENUMERATION_CAP)
        .ok_or_else(|| SealError::DimensionCap {
            what: "outcome enumeration".into(),
            cap: ENUMERATION_CAP,
        })?;
    let mut outcomes = Vec::new();
    for m in 0..count {
        let ket = inst.kraus(m)?.image(state)?;
        let p = ket.norm_sqr();
        if p < NEGLIGIBLE_PROB {
            continue;
        }
        outcomes.push(Outcome {
            index: m,
            label: inst.label(m),
            probability: p,
            post_state: ket.into_state()?,
        });
    }
    Ok(OutcomeEnsemble { outcomes })
}
