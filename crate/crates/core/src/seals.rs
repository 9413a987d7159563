//! Seal encodings: the tilted product seal, the fixed-angle per-bit seal,
//! general amplitude-matrix seals and the Fourier seal, plus families of
//! them parameterized by string length.

use std::borrow::Cow;
use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Deserialize;

use crate::error::{Result, SealError};
use crate::quantum::{
    bits_of, inner, prefix_value, PureState, QubitAmplitudes, C64, COMPUTATION_TOL,
    CONSTRUCTION_TOL, DIMENSION_CAP,
};

/// A classical message: either a basis index or an explicit bit string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Message {
    Index(usize),
    Bits(Vec<bool>),
}

impl Message {
    /// Parse a string of `0`/`1` characters.
    pub fn parse_bits(s: &str) -> Result<Self> {
        s.chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(SealError::param(
                    "message",
                    format!("invalid bit character {ch:?}"),
                )),
            })
            .collect::<Result<Vec<_>>>()
            .map(Message::Bits)
    }

    pub fn zeros(n: usize) -> Self {
        Message::Bits(vec![false; n])
    }

    /// Bits over `width` positions, big-endian for indices.
    pub fn to_bits(&self, width: usize) -> Result<Vec<bool>> {
        match self {
            Message::Bits(b) if b.len() == width => Ok(b.clone()),
            Message::Bits(b) => Err(SealError::param(
                "message",
                format!("bit string has length {}, expected {width}", b.len()),
            )),
            Message::Index(i) => {
                if width < usize::BITS as usize && *i >= (1usize << width) {
                    return Err(SealError::IndexOutOfRange {
                        index: *i,
                        len: 1usize << width,
                    });
                }
                Ok(bits_of(*i, width))
            }
        }
    }

    pub fn to_index(&self) -> Result<usize> {
        match self {
            Message::Index(i) => Ok(*i),
            Message::Bits(b) if b.len() < usize::BITS as usize => Ok(prefix_value(b)),
            Message::Bits(b) => Err(SealError::param(
                "message",
                format!("{}-bit message has no machine index", b.len()),
            )),
        }
    }
}

impl fmt::Display for Message {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Message::Index(i) => write!(f, "{i}"),
            Message::Bits(b) => b
                .iter()
                .try_for_each(|&x| f.write_str(if x { "1" } else { "0" })),
        }
    }
}

/// Qubit factor `cos θ|b⟩ + sin θ|b̄⟩`.
pub fn tilted_qubit(theta: f64, bit: bool) -> QubitAmplitudes {
    let (s, c) = theta.sin_cos();
    let (c, s) = (C64::new(c, 0.0), C64::new(s, 0.0));
    if bit {
        [s, c]
    } else {
        [c, s]
    }
}

fn encode_product(angles: &[f64], bits: &[bool]) -> Result<PureState> {
    if bits.len() != angles.len() {
        return Err(SealError::param(
            "bits",
            format!("expected {} bits, got {}", angles.len(), bits.len()),
        ));
    }
    PureState::product(
        angles
            .iter()
            .zip(bits)
            .map(|(&t, &b)| tilted_qubit(t, b))
            .collect(),
    )
}

/// Per-bit tilted encoding with `|θ_i| ≤ Θ/n^α`.
#[derive(Clone, Debug, PartialEq)]
pub struct TiltedProductSeal {
    theta_cap: f64,
    alpha: f64,
    angles: Vec<f64>,
}

impl TiltedProductSeal {
    pub fn new(theta_cap: f64, alpha: f64, angles: Vec<f64>) -> Result<Self> {
        validate_theta_cap(theta_cap)?;
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(SealError::param("alpha", "alpha must be positive"));
        }
        if angles.is_empty() {
            return Err(SealError::param("n", "string length must be positive"));
        }
        let bound = angle_bound(theta_cap, alpha, angles.len());
        if let Some((i, t)) = angles
            .iter()
            .enumerate()
            .find(|(_, t)| !(t.abs() <= bound * (1.0 + 1e-14)))
        {
            return Err(SealError::param(
                format!("angles[{i}]"),
                format!("|{t}| exceeds the bound Θ/n^α = {bound}"),
            ));
        }
        Ok(TiltedProductSeal {
            theta_cap,
            alpha,
            angles,
        })
    }

    /// Every angle at the extreme `Θ/n^α`.
    pub fn extreme(theta_cap: f64, alpha: f64, n: usize) -> Result<Self> {
        Self::new(theta_cap, alpha, vec![angle_bound(theta_cap, alpha, n); n])
    }

    pub fn n(&self) -> usize {
        self.angles.len()
    }

    pub fn theta_cap(&self) -> f64 {
        self.theta_cap
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }
}

pub fn validate_theta_cap(theta_cap: f64) -> Result<()> {
    if !(0.0..FRAC_PI_4).contains(&theta_cap) {
        return Err(SealError::param(
            "theta_cap",
            "theta_cap must be < π/4 and non-negative",
        ));
    }
    Ok(())
}

/// `Θ/n^α`.
pub fn angle_bound(theta_cap: f64, alpha: f64, n: usize) -> f64 {
    theta_cap / (n as f64).powf(alpha)
}

pub fn encode_tilted(seal: &TiltedProductSeal, bits: &[bool]) -> Result<PureState> {
    encode_product(&seal.angles, bits)
}

/// Independent per-bit seal at a fixed angle.
#[derive(Clone, Debug, PartialEq)]
pub struct FixedAngleBitSeal {
    n: usize,
    theta: f64,
}

impl FixedAngleBitSeal {
    pub fn new(n: usize, theta: f64) -> Result<Self> {
        if n == 0 {
            return Err(SealError::param("n", "string length must be positive"));
        }
        if !(theta.abs() < FRAC_PI_4) {
            return Err(SealError::param("theta", "|theta| must be < π/4"));
        }
        Ok(FixedAngleBitSeal { n, theta })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

/// Row `i` of `lambda` is the sealed state of message `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixSeal {
    lambda: DMatrix<C64>,
}

#[derive(Deserialize)]
struct LambdaEntry {
    row: usize,
    col: usize,
    re: f64,
    im: f64,
}

impl MatrixSeal {
    pub fn new(lambda: DMatrix<C64>) -> Result<Self> {
        if lambda.nrows() == 0 || lambda.ncols() == 0 {
            return Err(SealError::param("lambda", "matrix must be non-empty"));
        }
        if lambda.ncols() > DIMENSION_CAP || lambda.nrows() > DIMENSION_CAP {
            return Err(SealError::DimensionCap {
                what: format!("lambda {}x{}", lambda.nrows(), lambda.ncols()),
                cap: DIMENSION_CAP,
            });
        }
        for (i, row) in lambda.row_iter().enumerate() {
            let n2: f64 = row.iter().map(|z| z.norm_sqr()).sum();
            if (n2 - 1.0).abs() > CONSTRUCTION_TOL {
                return Err(SealError::param(
                    format!("lambda[{i}]"),
                    format!("row not normalized (squared norm {n2})"),
                ));
            }
        }
        Ok(MatrixSeal { lambda })
    }

    pub fn identity(n_messages: usize) -> Result<Self> {
        Self::new(DMatrix::identity(n_messages, n_messages))
    }

    /// Load from CSV with header `row,col,re,im`; absent entries are zero.
    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)?;
        let entries: Vec<LambdaEntry> = rdr.deserialize().collect::<std::result::Result<_, _>>()?;
        let rows = entries.iter().map(|e| e.row + 1).max().unwrap_or(0);
        let cols = entries.iter().map(|e| e.col + 1).max().unwrap_or(0);
        if rows > DIMENSION_CAP || cols > DIMENSION_CAP {
            return Err(SealError::DimensionCap {
                what: format!("lambda {rows}x{cols}"),
                cap: DIMENSION_CAP,
            });
        }
        let mut lambda = DMatrix::zeros(rows, cols);
        for e in entries {
            lambda[(e.row, e.col)] = C64::new(e.re, e.im);
        }
        Self::new(lambda)
    }

    pub fn n_messages(&self) -> usize {
        self.lambda.nrows()
    }

    pub fn dim(&self) -> usize {
        self.lambda.ncols()
    }

    pub fn lambda(&self) -> &DMatrix<C64> {
        &self.lambda
    }

    pub fn row(&self, i: usize) -> Result<Vec<C64>> {
        if i >= self.n_messages() {
            return Err(SealError::IndexOutOfRange {
                index: i,
                len: self.n_messages(),
            });
        }
        Ok(self.lambda.row(i).iter().copied().collect())
    }

    /// Largest deviation of the row Gram matrix from the identity.
    pub fn orthonormality_residual(&self) -> f64 {
        let gram = &self.lambda * self.lambda.adjoint();
        let mut worst = 0.0f64;
        for r in 0..gram.nrows() {
            for c in 0..gram.ncols() {
                let target = if r == c { 1.0 } else { 0.0 };
                worst = worst.max((gram[(r, c)] - C64::new(target, 0.0)).norm());
            }
        }
        worst
    }
}

pub fn encode_matrix(seal: &MatrixSeal, i: usize) -> Result<PureState> {
    PureState::from_amplitudes(seal.row(i)?)
}

/// The perfect seal `|φ_i⟩ = Σ_j ω_N^{ij}|j⟩/√N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FourierSeal {
    n_messages: usize,
}

impl FourierSeal {
    pub fn new(n_messages: usize) -> Result<Self> {
        if n_messages == 0 {
            return Err(SealError::param("N", "message count must be at least 1"));
        }
        if n_messages > DIMENSION_CAP {
            return Err(SealError::DimensionCap {
                what: format!("N = {n_messages}"),
                cap: DIMENSION_CAP,
            });
        }
        Ok(FourierSeal { n_messages })
    }

    pub fn n_messages(&self) -> usize {
        self.n_messages
    }

    pub fn row(&self, i: usize) -> Result<Vec<C64>> {
        fourier_amplitudes(self.n_messages, i)
    }

    pub fn to_matrix_seal(&self) -> Result<MatrixSeal> {
        let n = self.n_messages;
        let rows = (0..n).map(|i| self.row(i)).collect::<Result<Vec<_>>>()?;
        MatrixSeal::new(DMatrix::from_fn(n, n, |r, c| rows[r][c]))
    }
}

fn fourier_amplitudes(n: usize, i: usize) -> Result<Vec<C64>> {
    if n == 0 {
        return Err(SealError::param("N", "message count must be at least 1"));
    }
    if i >= n {
        return Err(SealError::IndexOutOfRange { index: i, len: n });
    }
    let scale = (n as f64).sqrt().recip();
    // reduce ij mod N before forming the phase to keep it exact for large N
    Ok((0..n)
        .map(|j| {
            let r = ((i as u128 * j as u128) % n as u128) as f64;
            C64::from_polar(scale, 2.0 * PI * r / n as f64)
        })
        .collect())
}

pub fn fourier_state(n_messages: usize, i: usize) -> Result<PureState> {
    if n_messages > DIMENSION_CAP {
        return Err(SealError::DimensionCap {
            what: format!("N = {n_messages}"),
            cap: DIMENSION_CAP,
        });
    }
    PureState::from_amplitudes(fourier_amplitudes(n_messages, i)?)
}

/// A concrete seal at one string length.
#[derive(Clone, Debug, PartialEq)]
pub enum SealScheme {
    Tilted(TiltedProductSeal),
    FixedAngle(FixedAngleBitSeal),
    Matrix(MatrixSeal),
    Fourier(FourierSeal),
}

impl SealScheme {
    /// Per-qubit angles for product seals.
    pub fn product_angles(&self) -> Option<Cow<'_, [f64]>> {
        match self {
            SealScheme::Tilted(s) => Some(Cow::Borrowed(s.angles())),
            SealScheme::FixedAngle(s) => Some(Cow::Owned(vec![s.theta; s.n])),
            _ => None,
        }
    }

    pub fn is_product(&self) -> bool {
        matches!(self, SealScheme::Tilted(_) | SealScheme::FixedAngle(_))
    }

    /// String length in bits, when messages are bit strings.
    pub fn string_length(&self) -> Option<usize> {
        match self {
            SealScheme::Tilted(s) => Some(s.n()),
            SealScheme::FixedAngle(s) => Some(s.n),
            SealScheme::Matrix(_) | SealScheme::Fourier(_) => {
                let n = self.message_count()?;
                n.is_power_of_two().then(|| n.trailing_zeros() as usize)
            }
        }
    }

    /// Number of messages, `None` if it overflows a `usize`.
    pub fn message_count(&self) -> Option<usize> {
        match self {
            SealScheme::Tilted(_) | SealScheme::FixedAngle(_) => {
                let n = self.string_length()?;
                (n < usize::BITS as usize).then(|| 1usize << n)
            }
            SealScheme::Matrix(m) => Some(m.n_messages()),
            SealScheme::Fourier(f) => Some(f.n_messages),
        }
    }

    /// Dense Hilbert-space dimension, if within the cap.
    pub fn dim(&self) -> Option<usize> {
        match self {
            SealScheme::Tilted(_) | SealScheme::FixedAngle(_) => {
                let n = self.string_length()?;
                (n < usize::BITS as usize && (1usize << n) <= DIMENSION_CAP).then(|| 1usize << n)
            }
            SealScheme::Matrix(m) => Some(m.dim()),
            SealScheme::Fourier(f) => Some(f.n_messages),
        }
    }

    pub fn encode(&self, message: &Message) -> Result<PureState> {
        match self {
            SealScheme::Tilted(s) => encode_tilted(s, &message.to_bits(s.n())?),
            SealScheme::FixedAngle(s) => {
                encode_product(&vec![s.theta; s.n], &message.to_bits(s.n)?)
            }
            SealScheme::Matrix(m) => encode_matrix(m, message.to_index()?),
            SealScheme::Fourier(f) => fourier_state(f.n_messages, message.to_index()?),
        }
    }

    /// Dense sealed-state rows for every message (requires the dense cap).
    pub fn dense_rows(&self) -> Result<Vec<Vec<C64>>> {
        match self {
            SealScheme::Matrix(m) => (0..m.n_messages()).map(|i| m.row(i)).collect(),
            SealScheme::Fourier(f) => (0..f.n_messages).map(|i| f.row(i)).collect(),
            _ => {
                let count = self.dim().ok_or_else(|| SealError::DimensionCap {
                    what: "dense rows".into(),
                    cap: DIMENSION_CAP,
                })?;
                (0..count)
                    .map(|i| Ok(self.encode(&Message::Index(i))?.amplitudes()?.to_vec()))
                    .collect()
            }
        }
    }

    /// True when every pair of sealed states is orthogonal.
    pub fn is_orthonormal(&self) -> bool {
        match self {
            SealScheme::Fourier(_) => true,
            SealScheme::Matrix(m) => m.orthonormality_residual() <= COMPUTATION_TOL,
            // product seals are orthonormal only at zero tilt
            _ => self
                .product_angles()
                .is_some_and(|a| a.iter().all(|t| t.sin() == 0.0)),
        }
    }
}

/// `|⟨encode(b)|encode(b')⟩|` for product seals, used by property checks.
pub fn product_overlap(scheme: &SealScheme, a: &[bool], b: &[bool]) -> Result<f64> {
    let sa = scheme.encode(&Message::Bits(a.to_vec()))?;
    let sb = scheme.encode(&Message::Bits(b.to_vec()))?;
    Ok(inner(&sa, &sb)?.norm())
}

/// How the per-qubit angles of a tilted family are chosen at each length.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum AngleRule {
    /// `θ_i = Θ/n^α` for every i.
    #[default]
    Extreme,
    /// `θ_i = (i + 1)/n · Θ/n^α`, a non-uniform profile inside the bound.
    Ramp,
}

pub type MatrixGenerator = Arc<dyn Fn(usize) -> Result<MatrixSeal> + Send + Sync>;

/// A seal scheme parameterized by string length.
#[derive(Clone)]
pub enum SealFamily {
    Tilted {
        theta_cap: f64,
        alpha: f64,
        rule: AngleRule,
    },
    FixedAngle {
        theta: f64,
    },
    /// `N = 2^n` Fourier seals.
    Fourier,
    Matrix(MatrixGenerator),
}

impl fmt::Debug for SealFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SealFamily::Tilted {
                theta_cap,
                alpha,
                rule,
            } => write!(f, "Tilted(Θ={theta_cap}, α={alpha}, {rule:?})"),
            SealFamily::FixedAngle { theta } => write!(f, "FixedAngle(θ={theta})"),
            SealFamily::Fourier => f.write_str("Fourier"),
            SealFamily::Matrix(_) => f.write_str("Matrix(<generator>)"),
        }
    }
}

impl SealFamily {
    pub fn tilted(theta_cap: f64, alpha: f64) -> Self {
        SealFamily::Tilted {
            theta_cap,
            alpha,
            rule: AngleRule::Extreme,
        }
    }

    /// Scheme A with `Θ = 0.3`, `α = 0.25`.
    pub fn scheme_a() -> Self {
        Self::tilted(0.3, 0.25)
    }

    /// Tilted seal with `α = 1`: bounded conditional entropy.
    pub fn criterion_a_exemplar() -> Self {
        Self::tilted(0.3, 1.0)
    }

    /// Independent imperfect bit seals at `θ = 0.3`.
    pub fn criterion_c_exemplar() -> Self {
        SealFamily::FixedAngle { theta: 0.3 }
    }

    pub fn instantiate(&self, n: usize) -> Result<SealScheme> {
        if n == 0 {
            return Err(SealError::param("n", "string length must be positive"));
        }
        match self {
            SealFamily::Tilted {
                theta_cap,
                alpha,
                rule,
            } => {
                let bound = angle_bound(*theta_cap, *alpha, n);
                let angles = match rule {
                    AngleRule::Extreme => vec![bound; n],
                    AngleRule::Ramp => (0..n).map(|i| bound * (i + 1) as f64 / n as f64).collect(),
                };
                Ok(SealScheme::Tilted(TiltedProductSeal::new(
                    *theta_cap, *alpha, angles,
                )?))
            }
            SealFamily::FixedAngle { theta } => {
                Ok(SealScheme::FixedAngle(FixedAngleBitSeal::new(n, *theta)?))
            }
            SealFamily::Fourier => {
                if n >= usize::BITS as usize || (1usize << n) > DIMENSION_CAP {
                    return Err(SealError::param(
                        "n",
                        format!(
                            "Fourier family needs N = 2^{n} within the dense cap {DIMENSION_CAP}"
                        ),
                    ));
                }
                Ok(SealScheme::Fourier(FourierSeal::new(1usize << n)?))
            }
            SealFamily::Matrix(generator) => Ok(SealScheme::Matrix(generator(n)?)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn zero_tilt_gives_basis_state() {
        let seal = TiltedProductSeal::new(0.0, 0.25, vec![0.0; 4]).unwrap();
        let s = encode_tilted(&seal, &[false, true, true, false]).unwrap();
        let a = s.amplitudes().unwrap();
        close(a[0b0110].re, 1.0, 1e-15);
        close(a.iter().map(|z| z.norm_sqr()).sum::<f64>(), 1.0, 1e-15);
    }

    #[test]
    fn tilted_examples() {
        let seal = TiltedProductSeal::new(0.3, 0.25, vec![0.3]).unwrap();
        let s = encode_tilted(&seal, &[false]).unwrap();
        close(s.amplitudes().unwrap()[0].re, 0.955_336_489_125_606, 1e-12);
        close(
            s.amplitudes().unwrap()[1].re,
            0.295_520_206_661_339_6,
            1e-12,
        );

        // n = 2 needs Θ/2^α ≥ 0.3, so pick α small enough
        let seal = TiltedProductSeal::new(0.6, 1.0, vec![0.3, 0.3]).unwrap();
        let s = encode_tilted(&seal, &[false, false]).unwrap();
        let want = [
            0.912_667_807_454_839,
            0.282_321_236_697_517_6,
            0.282_321_236_697_517_6,
            0.087_332_192_545_160_8,
        ];
        for (z, w) in s.amplitudes().unwrap().iter().zip(want) {
            close(z.re, w, 1e-12);
        }
        assert!(s.qubit_factorization().is_some());
    }

    #[test]
    fn tilted_rejects_bad_parameters() {
        assert!(TiltedProductSeal::new(1.0, 0.25, vec![0.1]).is_err());
        assert!(TiltedProductSeal::new(0.3, 0.25, vec![0.2; 16]).is_err());
        assert!(TiltedProductSeal::new(0.3, 0.0, vec![0.1]).is_err());
        assert!(FixedAngleBitSeal::new(3, 0.8).is_err());
    }

    #[test]
    fn matrix_examples() {
        let id = MatrixSeal::identity(4).unwrap();
        close(
            encode_matrix(&id, 2).unwrap().amplitudes().unwrap()[2].re,
            1.0,
            0.0,
        );
        assert!(matches!(
            encode_matrix(&id, 4),
            Err(SealError::IndexOutOfRange { .. })
        ));

        let f = FourierSeal::new(4).unwrap().to_matrix_seal().unwrap();
        for z in encode_matrix(&f, 0).unwrap().amplitudes().unwrap() {
            close(z.re, 0.5, 1e-15);
        }
        let row1 = encode_matrix(&f, 1).unwrap();
        let want = [
            C64::new(0.5, 0.0),
            C64::new(0.0, 0.5),
            C64::new(-0.5, 0.0),
            C64::new(0.0, -0.5),
        ];
        for (z, w) in row1.amplitudes().unwrap().iter().zip(want) {
            close((z - w).norm(), 0.0, 1e-15);
        }
    }

    #[test]
    fn fourier_examples() {
        close(
            fourier_state(1, 0).unwrap().amplitudes().unwrap()[0].re,
            1.0,
            0.0,
        );
        let p1 = fourier_state(2, 1).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        close(p1.amplitudes().unwrap()[0].re, h, 1e-15);
        close(p1.amplitudes().unwrap()[1].re, -h, 1e-15);

        let a = fourier_state(4, 1).unwrap();
        let b = fourier_state(4, 3).unwrap();
        close(inner(&a, &b).unwrap().norm(), 0.0, 1e-15);
        for i in 0..4 {
            for z in fourier_state(4, i).unwrap().amplitudes().unwrap() {
                close(z.norm(), 0.5, 1e-15);
            }
        }
        assert!(fourier_state(4, 4).is_err());
    }

    #[test]
    fn instantiate_examples() {
        let s = SealFamily::tilted(0.3, 0.25).instantiate(16).unwrap();
        for t in s.product_angles().unwrap().iter() {
            close(*t, 0.15, 1e-15);
        }
        let s = SealFamily::criterion_c_exemplar().instantiate(5).unwrap();
        assert_eq!(s.product_angles().unwrap().as_ref(), &[0.3; 5]);
        let s = SealFamily::tilted(0.3, 1.0).instantiate(300).unwrap();
        close(s.product_angles().unwrap()[0], 0.001, 1e-15);
        assert!(SealFamily::Fourier.instantiate(13).is_err());
        assert_eq!(
            SealFamily::Fourier.instantiate(3).unwrap().message_count(),
            Some(8)
        );
    }

    #[test]
    fn lambda_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("lambda.csv");
        std::fs::write(&path, "row,col,re,im\n0,0,1,0\n1,0,0,0\n1,1,0,1\n").unwrap();
        let seal = MatrixSeal::from_csv(&path).unwrap();
        assert_eq!(seal.n_messages(), 2);
        assert_eq!(seal.lambda()[(1, 1)], C64::new(0.0, 1.0));
        assert!(seal.orthonormality_residual() < 1e-15);

        std::fs::write(&path, "row,col,re,im\n0,0,2,0\n").unwrap();
        assert!(MatrixSeal::from_csv(&path).is_err());
    }

    #[test]
    fn message_conversions() {
        let m = Message::parse_bits("0110").unwrap();
        assert_eq!(m.to_index().unwrap(), 6);
        assert_eq!(
            Message::Index(6).to_bits(4).unwrap(),
            vec![false, true, true, false]
        );
        assert!(Message::Index(16).to_bits(4).is_err());
        assert!(Message::parse_bits("01x").is_err());
        assert_eq!(m.to_string(), "0110");
    }
}
