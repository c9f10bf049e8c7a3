//! Tensor product codes built from short systematic binary component codes,
//! decoded iteratively with a soft-input soft-output GRAND component decoder.
//!
//! The crate is organised around the decoding pipeline:
//!
//! - [`component_code`]: `(n, k)` systematic binary linear codes (CRC and
//!   extended BCH) with GF(2) encoding and syndrome checks.
//! - [`tensor`]: square and cubic tensor-product constructions where every
//!   axis-aligned 1-D slice is a component codeword.
//! - [`channel`]: BPSK modulation, AWGN corruption and channel LLRs.
//! - [`orbgrand`]: ordered-reliability-bits guessing of noise patterns in
//!   nondecreasing logistic weight, producing a list of candidate codewords.
//! - [`sogrand`]: soft output on top of the guessing list: per-bit APP and
//!   extrinsic LLRs plus a not-in-list probability estimate.
//! - [`turbo`]: the iterative axis-by-axis SISO decoder with scaled extrinsic
//!   feedback, validity-based termination and iteration-threshold abandonment.
//! - [`sim`]: a Monte-Carlo harness sweeping operating points and reporting
//!   BLER/BER/iteration statistics as CSV/JSON.
//!
//! All soft-value arithmetic is generic over the scalar type through the
//! [`Real`] trait; `f32` and `f64` both work. Concrete aliases for the common
//! double-precision instantiation are exported at the crate root.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, MulAssign, SubAssign};

use num_traits::{Float, FromPrimitive, ToPrimitive};

pub mod channel;
pub mod component_code;
pub mod orbgrand;
pub mod sim;
pub mod sogrand;
pub mod tensor;
pub mod turbo;

/// Floating-point scalar for LLRs and probabilities: `f32` or `f64`.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + Sum<Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
}

impl<T> Real for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + Sum<Self>
        + AddAssign
        + SubAssign
        + MulAssign
        + Default
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}

/// Shorthand for converting an `f64` constant into the working scalar.
pub(crate) fn real<F: Real>(x: f64) -> F {
    F::from_f64(x).expect("f64 constant must convert to the Real scalar")
}

pub use channel::{ChannelParams, PointKind};
pub use component_code::{CodeSpec, ComponentCode, KoopmanPolynomial};
pub use orbgrand::{ErrorPattern, GrandList, PatternGenerator, ReliabilityOrder};
pub use sim::{PointResult, SimConfig, SimResult};
pub use sogrand::{SisoConfig, SisoResult};
pub use tensor::{BitTensor, DesignPoint, LlrTensor, Tensor, TensorCode};
pub use turbo::{DecodeOutcome, DecodeStatus, DecoderConfig};

/// Double-precision aliases for the generic soft-value types.
pub type LlrTensor64 = LlrTensor<f64>;
pub type ChannelParams64 = ChannelParams<f64>;
pub type ReliabilityOrder64 = ReliabilityOrder<f64>;
pub type GrandList64 = GrandList<f64>;
pub type SisoResult64 = SisoResult<f64>;
pub type SisoConfig64 = SisoConfig<f64>;
pub type DecoderConfig64 = DecoderConfig<f64>;

/// Single-precision aliases.
pub type LlrTensor32 = LlrTensor<f32>;
pub type ChannelParams32 = ChannelParams<f32>;
pub type SisoConfig32 = SisoConfig<f32>;
pub type DecoderConfig32 = DecoderConfig<f32>;
