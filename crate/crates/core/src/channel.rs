//! BPSK modulation, AWGN corruption and channel LLRs.
//!
//! The complex channel is simulated on its real projection: BPSK carries
//! information on one real dimension, so unit-energy symbols are corrupted by
//! `N(0, sigma^2)` noise per real dimension. Positive LLRs favour bit 0.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::{real, Real};

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("code rate must be in (0, 1], got {rate}")]
    BadRate { rate: f64 },
    #[error("noise standard deviation must be positive")]
    BadSigma,
}

/// Interpretation of an operating point in dB.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointKind {
    /// Es/N0 on unit-energy symbols.
    Snr,
    /// Eb/N0; converts through the overall code rate.
    EbN0,
}

impl std::fmt::Display for PointKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PointKind::Snr => write!(f, "snr"),
            PointKind::EbN0 => write!(f, "ebn0"),
        }
    }
}

impl std::str::FromStr for PointKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "snr" => Ok(PointKind::Snr),
            "ebn0" | "eb/n0" => Ok(PointKind::EbN0),
            other => Err(format!("unknown point kind {other:?}; expected snr or ebn0")),
        }
    }
}

/// Resolved channel operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams<F> {
    pub sigma: F,
    pub rate: F,
    pub point_db: F,
    pub point_kind: PointKind,
}

impl<F: Real> ChannelParams<F> {
    pub fn new(point_db: F, point_kind: PointKind, rate: F) -> Result<Self, ChannelError> {
        let sigma = ebn0_to_sigma(point_db, point_kind, rate)?;
        Ok(Self {
            sigma,
            rate,
            point_db,
            point_kind,
        })
    }
}

/// Noise standard deviation per real dimension for an operating point.
///
/// For Eb/N0: `sigma = sqrt(1 / (2 R 10^(dB/10)))`. For SNR, taken as Es/N0
/// on unit-energy symbols: `sigma = sqrt(1 / (2 10^(dB/10)))`. The two agree
/// at rate 1, and in general `SNR_dB = EbN0_dB + 10 log10(R)`.
pub fn ebn0_to_sigma<F: Real>(point_db: F, point_kind: PointKind, rate: F) -> Result<F, ChannelError> {
    if rate <= F::zero() || rate > F::one() {
        return Err(ChannelError::BadRate {
            rate: rate.to_f64().unwrap_or(f64::NAN),
        });
    }
    let ten: F = real(10.0);
    let linear = ten.powf(point_db / ten);
    let denom = match point_kind {
        PointKind::Snr => real::<F>(2.0) * linear,
        PointKind::EbN0 => real::<F>(2.0) * rate * linear,
    };
    Ok((F::one() / denom).sqrt())
}

/// BPSK map: bit 0 -> +1.0, bit 1 -> -1.0.
pub fn modulate<F: Real>(bits: &[u8]) -> Vec<F> {
    bits.iter()
        .map(|&b| if b & 1 == 0 { F::one() } else { -F::one() })
        .collect()
}

/// Add i.i.d. `N(0, sigma^2)` noise to each symbol.
pub fn awgn<F, R>(symbols: &[F], sigma: F, rng: &mut R) -> Result<Vec<F>, ChannelError>
where
    F: Real,
    R: Rng + ?Sized,
    StandardNormal: Distribution<F>,
{
    if sigma <= F::zero() {
        return Err(ChannelError::BadSigma);
    }
    Ok(symbols
        .iter()
        .map(|&s| s + sigma * rng.sample::<F, _>(StandardNormal))
        .collect())
}

/// Channel LLRs for BPSK over AWGN: `L = 2 y / sigma^2`; positive favours 0.
pub fn channel_llr<F: Real>(observations: &[F], sigma: F) -> Result<Vec<F>, ChannelError> {
    if sigma <= F::zero() {
        return Err(ChannelError::BadSigma);
    }
    let scale = real::<F>(2.0) / (sigma * sigma);
    Ok(observations.iter().map(|&y| scale * y).collect())
}
