//! Iterative axis-by-axis SISO decoding of tensor codes.
//!
//! Each half-iteration runs the component SISO decoder over every slice of
//! one axis of `L_Ch + L_A`, writes the APP and extrinsic tensors, and hard
//! decides the APP tensor. Decoding returns as soon as every slice of every
//! axis is a component codeword; otherwise the a-priori tensor becomes the
//! scaled extrinsic, `L_A = alpha * L_E`, and the next axis pass starts.
//! Slices within a pass read only pass-start state, so the outcome does not
//! depend on intra-pass execution order.

use thiserror::Error;

use crate::component_code::{bits_to_mask, ComponentCode};
use crate::orbgrand::GrandError;
use crate::sogrand::{siso_decode, SisoConfig};
use crate::tensor::{pass_axes, BitTensor, LlrTensor, TensorCode, TensorError};
use crate::{real, Real};

#[derive(Debug, Error, PartialEq)]
pub enum TurboError {
    #[error("extrinsic weight alpha must be positive, got {alpha}")]
    BadAlpha { alpha: f64 },
    #[error("iteration threshold must be positive, got {thres}")]
    BadThreshold { thres: f64 },
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Grand(#[from] GrandError),
}

/// Iterative-decoder knobs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoderConfig<F> {
    /// Extrinsic weighting factor applied between half-iterations.
    pub alpha: F,
    /// Abandonment threshold in iterations; every axis pass counts 0.5.
    pub thres: f64,
    /// Component list size L.
    pub list_size: usize,
    /// Query budget per component decode.
    pub max_queries: u64,
    /// List-BLER-style early-stop threshold for component decoding.
    pub early_stop: F,
}

impl<F: Real> DecoderConfig<F> {
    /// Defaults matched to the dimension count: `alpha` 0.5 for components
    /// and squares, 0.7 for cubes; `thres` 20 for squares, 30 for cubes and
    /// a single pass for bare components; query budget `2^min(n-k+4, 16)`.
    pub fn recommended(l: usize, component: &ComponentCode) -> Self {
        let alpha = if l == 3 { 0.7 } else { 0.5 };
        let thres = match l {
            1 => 0.5,
            2 => 20.0,
            _ => 30.0,
        };
        Self {
            alpha: real(alpha),
            thres,
            list_size: 4,
            max_queries: default_max_queries(component),
            early_stop: real(1e-5),
        }
    }

    pub fn siso(&self) -> SisoConfig<F> {
        SisoConfig {
            list_size: self.list_size,
            max_queries: self.max_queries,
            stop_prob: self.early_stop,
        }
    }

    fn validate(&self) -> Result<(), TurboError> {
        if self.alpha <= F::zero() {
            return Err(TurboError::BadAlpha {
                alpha: self.alpha.to_f64().unwrap_or(f64::NAN),
            });
        }
        if self.thres <= 0.0 {
            return Err(TurboError::BadThreshold { thres: self.thres });
        }
        Ok(())
    }
}

/// Bounded worst-case query budget per component decode.
pub fn default_max_queries(component: &ComponentCode) -> u64 {
    1u64 << component.redundancy().saturating_add(4).min(16)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeStatus {
    /// Every axis slice of the hard decision is a component codeword.
    Converged,
    /// The iteration threshold was reached without a globally valid tensor.
    Abandoned,
}

/// Outcome of one block decode.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutcome {
    /// Hard-decision tensor from the most recent APP pass.
    pub hard: BitTensor,
    pub status: DecodeStatus,
    /// Iterations consumed, in steps of 0.5 per axis pass.
    pub half_iterations: f64,
    /// Systematic bits extracted from `hard`.
    pub info_bits: BitTensor,
}

/// Iteratively decode a channel-LLR tensor.
pub fn turbo_decode<F: Real>(
    code: &TensorCode,
    l_ch: &LlrTensor<F>,
    cfg: &DecoderConfig<F>,
) -> Result<DecodeOutcome, TurboError> {
    cfg.validate()?;
    let shape = code.coded_shape();
    if l_ch.dims() != shape.as_slice() {
        return Err(TensorError::ShapeMismatch {
            got: l_ch.dims().to_vec(),
            want: shape,
        }
        .into());
    }
    let component = code.component();
    let n = component.n();
    let siso_cfg = cfg.siso();

    let mut l_apriori = LlrTensor::<F>::zeros(l_ch.dims())?;
    let mut l_app = LlrTensor::<F>::zeros(l_ch.dims())?;
    let mut l_ext = LlrTensor::<F>::zeros(l_ch.dims())?;
    let mut ch_buf = vec![F::zero(); n];
    let mut in_buf = vec![F::zero(); n];
    let mut half_iterations = 0.0f64;

    loop {
        for &axis in pass_axes(code.dims()) {
            let slices = l_ch.axis_slice_count(axis)?;
            for idx in 0..slices {
                l_ch.gather(axis, idx, &mut ch_buf)?;
                l_apriori.gather(axis, idx, &mut in_buf)?;
                for (sum, &ch) in in_buf.iter_mut().zip(&ch_buf) {
                    *sum += ch;
                }
                let result = siso_decode(component, &in_buf, &siso_cfg)?;
                l_app.scatter(axis, idx, &result.app_llr)?;
                l_ext.scatter(axis, idx, &result.ext_llr)?;
            }
            half_iterations += 0.5;

            let hard = hard_decide(&l_app)?;
            if validity_check(code, &hard)? {
                return Ok(outcome(code, hard, DecodeStatus::Converged, half_iterations));
            }
            if half_iterations >= cfg.thres {
                return Ok(outcome(code, hard, DecodeStatus::Abandoned, half_iterations));
            }
            for (a, &e) in l_apriori.data_mut().iter_mut().zip(l_ext.data()) {
                *a = cfg.alpha * e;
            }
        }
    }
}

fn outcome(
    code: &TensorCode,
    hard: BitTensor,
    status: DecodeStatus,
    half_iterations: f64,
) -> DecodeOutcome {
    let info_bits = extract_info(code, &hard).expect("hard tensor has the coded shape");
    DecodeOutcome {
        hard,
        status,
        half_iterations,
        info_bits,
    }
}

fn hard_decide<F: Real>(llr: &LlrTensor<F>) -> Result<BitTensor, TensorError> {
    let bits: Vec<u8> = llr
        .data()
        .iter()
        .map(|&l| if l < F::zero() { 1u8 } else { 0u8 })
        .collect();
    BitTensor::from_data(llr.dims(), bits)
}

/// True iff every slice of every axis passes the component syndrome check.
pub fn validity_check(code: &TensorCode, hard: &BitTensor) -> Result<bool, TensorError> {
    let shape = code.coded_shape();
    if hard.dims() != shape.as_slice() {
        return Err(TensorError::ShapeMismatch {
            got: hard.dims().to_vec(),
            want: shape,
        });
    }
    let component = code.component();
    let mut buf = vec![0u8; component.n()];
    for axis in 0..code.dims() {
        for idx in 0..hard.axis_slice_count(axis)? {
            hard.gather(axis, idx, &mut buf)?;
            if !component.syndrome_ok_mask(bits_to_mask(&buf)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Systematic positions of a coded tensor as a `k^l` information tensor.
pub fn extract_info(code: &TensorCode, hard: &BitTensor) -> Result<BitTensor, TensorError> {
    let shape = code.coded_shape();
    if hard.dims() != shape.as_slice() {
        return Err(TensorError::ShapeMismatch {
            got: hard.dims().to_vec(),
            want: shape,
        });
    }
    let mut info = BitTensor::zeros(&code.info_shape())?;
    let info_strides = info.strides();
    let hard_strides = hard.strides();
    let l = code.dims();
    for flat in 0..info.len() {
        let mut rem = flat;
        let mut pos = 0usize;
        for j in 0..l {
            let coord = rem / info_strides[j];
            rem %= info_strides[j];
            pos += coord * hard_strides[j];
        }
        info.data_mut()[flat] = hard.data()[pos];
    }
    Ok(info)
}

/// Saturated LLRs for a known bit tensor, used by zero-noise checks.
pub fn saturated_llrs<F: Real>(bits: &BitTensor) -> LlrTensor<F> {
    let sat: F = real(crate::sogrand::LLR_SATURATION);
    let data: Vec<F> = bits
        .data()
        .iter()
        .map(|&b| if b & 1 == 1 { -sat } else { sat })
        .collect();
    LlrTensor::from_data(bits.dims(), data).expect("same shape")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::component_code::{crc_code, ebch_code, KoopmanPolynomial};
    use crate::tensor::encode_tensor;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn catalog() -> Vec<ComponentCode> {
        vec![
            crc_code(KoopmanPolynomial::new(0x15).unwrap(), 15).unwrap(),
            ebch_code(16, 11).unwrap(),
            ebch_code(8, 4).unwrap(),
        ]
    }

    fn random_block(code: &TensorCode, rng: &mut StdRng) -> (BitTensor, BitTensor) {
        let bits: Vec<u8> = (0..code.info_bits()).map(|_| rng.random::<bool>() as u8).collect();
        let info = BitTensor::from_data(&code.info_shape(), bits).unwrap();
        let coded = encode_tensor(code, &info).unwrap();
        (info, coded)
    }

    #[test]
    fn zero_noise_converges_in_one_pass() {
        let mut rng = StdRng::seed_from_u64(2);
        for component in catalog() {
            for l in 1..=3 {
                let code = TensorCode::new(component.clone(), l).unwrap();
                let cfg = DecoderConfig::<f64>::recommended(l, code.component());
                let (info, coded) = random_block(&code, &mut rng);
                let llr = saturated_llrs::<f64>(&coded);
                let out = turbo_decode(&code, &llr, &cfg).unwrap();
                assert_eq!(out.status, DecodeStatus::Converged);
                assert_eq!(out.half_iterations, 0.5);
                assert_eq!(out.hard, coded);
                assert_eq!(out.info_bits, info);
            }
        }
    }

    #[test]
    fn decoding_is_deterministic() {
        let mut rng = StdRng::seed_from_u64(3);
        let code = TensorCode::new(ebch_code(8, 4).unwrap(), 2).unwrap();
        let cfg = DecoderConfig::<f64>::recommended(2, code.component());
        let llr_data: Vec<f64> = (0..code.total_bits()).map(|_| rng.random_range(-1.5..1.5)).collect();
        let llr = LlrTensor::from_data(&code.coded_shape(), llr_data).unwrap();
        let a = turbo_decode(&code, &llr, &cfg).unwrap();
        let b = turbo_decode(&code, &llr, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn erasure_input_is_deterministic_and_abandons() {
        // All-zero LLRs carry no information: every pattern is equiprobable,
        // the per-slice lists mix codewords, and no globally valid tensor
        // emerges, so the decoder must run to the threshold and abandon,
        // deterministically.
        for l in 2..=3 {
            let code = TensorCode::new(ebch_code(8, 4).unwrap(), l).unwrap();
            let cfg = DecoderConfig::<f64>::recommended(l, code.component());
            let llr = LlrTensor::<f64>::zeros(&code.coded_shape()).unwrap();
            let a = turbo_decode(&code, &llr, &cfg).unwrap();
            let b = turbo_decode(&code, &llr, &cfg).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.status, DecodeStatus::Abandoned);
            assert_eq!(a.half_iterations, cfg.thres);
        }
    }

    #[test]
    fn hopeless_input_abandons_at_threshold() {
        // Weak anti-codeword LLRs: a noise pattern no list decode untangles,
        // so the decoder must hit the iteration threshold and stop there.
        let code = TensorCode::new(ebch_code(8, 4).unwrap(), 2).unwrap();
        let mut cfg = DecoderConfig::<f64>::recommended(2, code.component());
        cfg.thres = 2.0;
        let mut rng = StdRng::seed_from_u64(9);
        let mut abandoned = 0;
        for _ in 0..20 {
            let llr_data: Vec<f64> = (0..code.total_bits()).map(|_| rng.random_range(-0.4..0.4)).collect();
            let llr = LlrTensor::from_data(&code.coded_shape(), llr_data).unwrap();
            let out = turbo_decode(&code, &llr, &cfg).unwrap();
            assert!(out.half_iterations <= cfg.thres);
            if out.status == DecodeStatus::Abandoned {
                assert_eq!(out.half_iterations, cfg.thres);
                abandoned += 1;
            }
        }
        assert!(abandoned > 0, "expected at least one abandonment");
    }

    #[test]
    fn converged_outcomes_are_globally_valid() {
        let mut rng = StdRng::seed_from_u64(11);
        let code = TensorCode::new(crc_code(KoopmanPolynomial::new(0x15).unwrap(), 15).unwrap(), 2).unwrap();
        let cfg = DecoderConfig::<f64>::recommended(2, code.component());
        for _ in 0..10 {
            let (_, coded) = random_block(&code, &mut rng);
            // Mild noise around the codeword.
            let llr_data: Vec<f64> = coded
                .data()
                .iter()
                .map(|&b| {
                    let sign = if b == 1 { -1.0 } else { 1.0 };
                    sign * 4.0 + rng.random_range(-2.0..2.0)
                })
                .collect();
            let llr = LlrTensor::from_data(&code.coded_shape(), llr_data).unwrap();
            let out = turbo_decode(&code, &llr, &cfg).unwrap();
            if out.status == DecodeStatus::Converged {
                assert!(validity_check(&code, &out.hard).unwrap());
            }
        }
    }

    #[test]
    fn validity_check_matches_slice_oracle() {
        let mut rng = StdRng::seed_from_u64(13);
        let code = TensorCode::new(ebch_code(8, 4).unwrap(), 3).unwrap();
        for _ in 0..20 {
            let (_, mut coded) = random_block(&code, &mut rng);
            assert!(validity_check(&code, &coded).unwrap());

            // Independent oracle: check every axis slice one by one.
            let flip = rng.random_range(0..coded.len());
            coded.data_mut()[flip] ^= 1;
            let component = code.component();
            let mut buf = vec![0u8; component.n()];
            let mut oracle_valid = true;
            for axis in 0..code.dims() {
                for idx in 0..coded.axis_slice_count(axis).unwrap() {
                    coded.gather(axis, idx, &mut buf).unwrap();
                    oracle_valid &= component.syndrome_ok(&buf).unwrap();
                }
            }
            assert!(!oracle_valid, "single flip must break a slice");
            assert_eq!(validity_check(&code, &coded).unwrap(), oracle_valid);
        }
    }

    #[test]
    fn extract_info_round_trips() {
        let mut rng = StdRng::seed_from_u64(17);
        for l in 1..=3 {
            let code = TensorCode::new(crc_code(KoopmanPolynomial::new(0x15).unwrap(), 15).unwrap(), l).unwrap();
            let (info, coded) = random_block(&code, &mut rng);
            let extracted = extract_info(&code, &coded).unwrap();
            assert_eq!(extracted, info);
            if l == 3 {
                assert_eq!(extracted.dims(), &[10, 10, 10]);
                assert_eq!(extracted.len(), 1000);
            }
        }
    }

    #[test]
    fn zero_tensor_extracts_zero_info() {
        let code = TensorCode::new(ebch_code(8, 4).unwrap(), 2).unwrap();
        let zero = BitTensor::zeros(&code.coded_shape()).unwrap();
        let info = extract_info(&code, &zero).unwrap();
        assert!(info.data().iter().all(|&b| b == 0));
    }

    #[test]
    fn config_guards() {
        let code = TensorCode::new(ebch_code(8, 4).unwrap(), 2).unwrap();
        let llr = LlrTensor::<f64>::zeros(&code.coded_shape()).unwrap();
        let mut cfg = DecoderConfig::<f64>::recommended(2, code.component());
        cfg.alpha = 0.0;
        assert!(matches!(
            turbo_decode(&code, &llr, &cfg),
            Err(TurboError::BadAlpha { .. })
        ));
        let mut cfg = DecoderConfig::<f64>::recommended(2, code.component());
        cfg.thres = 0.0;
        assert!(matches!(
            turbo_decode(&code, &llr, &cfg),
            Err(TurboError::BadThreshold { .. })
        ));
        let cfg = DecoderConfig::<f64>::recommended(2, code.component());
        let wrong = LlrTensor::<f64>::zeros(&[8, 9]).unwrap();
        assert!(matches!(
            turbo_decode(&code, &wrong, &cfg),
            Err(TurboError::Tensor(TensorError::ShapeMismatch { .. }))
        ));
    }

    #[test]
    fn default_query_budget() {
        assert_eq!(default_max_queries(&ebch_code(16, 11).unwrap()), 512);
        assert_eq!(default_max_queries(&ebch_code(8, 4).unwrap()), 256);
        let crc = crc_code(KoopmanPolynomial::new(0x15).unwrap(), 15).unwrap();
        assert_eq!(default_max_queries(&crc), 512);
    }
}
