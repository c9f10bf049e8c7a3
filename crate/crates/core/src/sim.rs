//! Monte-Carlo experiment harness.
//!
//! Blocks are independent work units: each draws random information bits,
//! encodes, passes through the BPSK/AWGN channel and decodes, and the
//! per-point counters fold together in block order. Every block derives its
//! RNG stream from `(seed, point index, block index)`, and blocks are run in
//! fixed-size waves, so results are bit-identical for any worker count.

use std::io::Write;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{awgn, channel_llr, ebn0_to_sigma, modulate, ChannelError, PointKind};
use crate::component_code::{CodeError, CodeSpec};
use crate::tensor::{encode_tensor, BitTensor, LlrTensor, TensorCode, TensorError};
use crate::turbo::{turbo_decode, DecodeStatus, DecoderConfig, TurboError};

/// Blocks dispatched per scheduling wave; fixed so that worker count cannot
/// influence where a point stops.
const WAVE_BLOCKS: u64 = 256;

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Turbo(#[from] TurboError),
    #[error("simulation needs at least one operating point")]
    NoPoints,
    #[error("min_block_errors must be at least 1")]
    ZeroErrorTarget,
    #[error("max_blocks {max_blocks} must be at least min_block_errors {min_block_errors}")]
    BlockCapTooSmall { max_blocks: u64, min_block_errors: u64 },
    #[error("worker count must be at least 1")]
    ZeroWorkers,
    #[error("thread pool: {0}")]
    Pool(String),
    #[error("output: {0}")]
    Io(#[from] std::io::Error),
}

/// Fully resolved simulation configuration; serialised alongside results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub code: CodeSpec,
    pub dims: usize,
    pub points: Vec<f64>,
    pub point_kind: PointKind,
    pub alpha: f64,
    pub max_iters: f64,
    pub list_size: usize,
    pub max_queries: u64,
    pub early_stop: f64,
    pub min_block_errors: u64,
    pub max_blocks: u64,
    pub seed: u64,
    pub workers: usize,
}

impl SimConfig {
    fn validate(&self) -> Result<(), SimError> {
        if self.points.is_empty() {
            return Err(SimError::NoPoints);
        }
        if self.min_block_errors == 0 {
            return Err(SimError::ZeroErrorTarget);
        }
        if self.max_blocks < self.min_block_errors {
            return Err(SimError::BlockCapTooSmall {
                max_blocks: self.max_blocks,
                min_block_errors: self.min_block_errors,
            });
        }
        if self.workers == 0 {
            return Err(SimError::ZeroWorkers);
        }
        Ok(())
    }

    fn decoder_config(&self) -> DecoderConfig<f64> {
        DecoderConfig {
            alpha: self.alpha,
            thres: self.max_iters,
            list_size: self.list_size,
            max_queries: self.max_queries,
            early_stop: self.early_stop,
        }
    }
}

/// Aggregated statistics for one operating point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointResult {
    pub point_db: f64,
    pub point_kind: PointKind,
    pub blocks: u64,
    pub block_errors: u64,
    pub bit_errors: u64,
    pub bler: f64,
    /// Information-bit error rate after decoding.
    pub ber: f64,
    /// Demodulated (pre-decoding) bit error rate over all coded bits.
    pub raw_ber: f64,
    /// Mean iterations consumed, in units of 0.5 per axis pass.
    pub avg_half_iters: f64,
    pub abandon_frac: f64,
    pub seconds: f64,
    /// True when the block cap stopped the point before the error target.
    pub hit_max_blocks: bool,
}

/// Results of a sweep plus the configuration that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub config: SimConfig,
    pub points: Vec<PointResult>,
}

pub const CSV_HEADER: &str =
    "point_db,point_kind,blocks,block_errors,bit_errors,bler,ber,raw_ber,avg_half_iters,abandon_frac,seconds";

impl PointResult {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{:.10e},{:.10e},{:.10e},{:.6},{:.6},{:.3}",
            self.point_db,
            self.point_kind,
            self.blocks,
            self.block_errors,
            self.bit_errors,
            self.bler,
            self.ber,
            self.raw_ber,
            self.avg_half_iters,
            self.abandon_frac,
            self.seconds
        )
    }
}

impl SimResult {
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        for p in &self.points {
            writeln!(out, "{}", p.csv_row())?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serialises")
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct BlockStats {
    block_error: bool,
    info_bit_errors: u64,
    raw_bit_errors: u64,
    half_iterations: f64,
    abandoned: bool,
}

/// Per-block RNG stream, independent of scheduling.
fn block_rng(seed: u64, point_index: u64, block_index: u64) -> ChaCha12Rng {
    let mut s = [0u8; 32];
    s[..8].copy_from_slice(&seed.to_le_bytes());
    s[8..16].copy_from_slice(&point_index.to_le_bytes());
    s[16..24].copy_from_slice(&block_index.to_le_bytes());
    s[24..].copy_from_slice(b"tcodesim");
    ChaCha12Rng::from_seed(s)
}

fn run_block(
    code: &TensorCode,
    decoder: &DecoderConfig<f64>,
    sigma: f64,
    seed: u64,
    point_index: u64,
    block_index: u64,
) -> Result<BlockStats, SimError> {
    let mut rng = block_rng(seed, point_index, block_index);
    let info_data: Vec<u8> = (0..code.info_bits())
        .map(|_| rand::Rng::random::<bool>(&mut rng) as u8)
        .collect();
    let info = BitTensor::from_data(&code.info_shape(), info_data)?;
    let coded = encode_tensor(code, &info)?;
    let symbols = modulate::<f64>(coded.data());
    let received = awgn(&symbols, sigma, &mut rng)?;
    let raw_bit_errors = received
        .iter()
        .zip(coded.data())
        .filter(|&(&y, &b)| u8::from(y < 0.0) != b)
        .count() as u64;
    let llr = LlrTensor::from_data(&code.coded_shape(), channel_llr(&received, sigma)?)?;
    let outcome = turbo_decode(code, &llr, decoder)?;
    let info_bit_errors = outcome
        .info_bits
        .data()
        .iter()
        .zip(info.data())
        .filter(|&(&a, &b)| a != b)
        .count() as u64;
    Ok(BlockStats {
        block_error: info_bit_errors > 0,
        info_bit_errors,
        raw_bit_errors,
        half_iterations: outcome.half_iterations,
        abandoned: outcome.status == DecodeStatus::Abandoned,
    })
}

/// Run one operating point until `min_block_errors` block errors accumulate
/// or `max_blocks` blocks have been decoded.
pub fn run_point(cfg: &SimConfig, point_index: usize) -> Result<PointResult, SimError> {
    cfg.validate()?;
    let point_db = cfg.points[point_index];
    let component = cfg.code.build()?;
    let code = TensorCode::new(component, cfg.dims)?;
    let decoder = cfg.decoder_config();
    let sigma = ebn0_to_sigma(point_db, cfg.point_kind, code.rate())?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| SimError::Pool(e.to_string()))?;

    let start = Instant::now();
    let mut blocks = 0u64;
    let mut block_errors = 0u64;
    let mut bit_errors = 0u64;
    let mut raw_bit_errors = 0u64;
    let mut half_iter_sum = 0.0f64;
    let mut abandoned = 0u64;

    'waves: while blocks < cfg.max_blocks && block_errors < cfg.min_block_errors {
        let wave_start = blocks;
        let wave_end = (wave_start + WAVE_BLOCKS).min(cfg.max_blocks);
        let wave: Vec<Result<BlockStats, SimError>> = pool.install(|| {
            (wave_start..wave_end)
                .into_par_iter()
                .map(|b| run_block(&code, &decoder, sigma, cfg.seed, point_index as u64, b))
                .collect()
        });
        // Fold in block order so the stopping block is scheduling-independent.
        for stats in wave {
            let stats = stats?;
            blocks += 1;
            block_errors += u64::from(stats.block_error);
            bit_errors += stats.info_bit_errors;
            raw_bit_errors += stats.raw_bit_errors;
            half_iter_sum += stats.half_iterations;
            abandoned += u64::from(stats.abandoned);
            if block_errors >= cfg.min_block_errors {
                break 'waves;
            }
        }
    }

    let seconds = start.elapsed().as_secs_f64();
    let blocks_f = blocks as f64;
    Ok(PointResult {
        point_db,
        point_kind: cfg.point_kind,
        blocks,
        block_errors,
        bit_errors,
        bler: block_errors as f64 / blocks_f,
        ber: bit_errors as f64 / (blocks_f * code.info_bits() as f64),
        raw_ber: raw_bit_errors as f64 / (blocks_f * code.total_bits() as f64),
        avg_half_iters: half_iter_sum / blocks_f,
        abandon_frac: abandoned as f64 / blocks_f,
        seconds,
        hit_max_blocks: block_errors < cfg.min_block_errors,
    })
}

/// Run every operating point, invoking `on_point` as each one completes.
/// A failing point aborts only itself; its error is reported at the end.
pub fn sweep_with(
    cfg: &SimConfig,
    mut on_point: impl FnMut(&PointResult),
) -> Result<SimResult, SimError> {
    cfg.validate()?;
    let mut points = Vec::with_capacity(cfg.points.len());
    let mut first_error: Option<SimError> = None;
    for idx in 0..cfg.points.len() {
        match run_point(cfg, idx) {
            Ok(p) => {
                on_point(&p);
                points.push(p);
            }
            Err(e) => {
                if first_error.is_none() {
                    first_error = Some(e);
                }
            }
        }
    }
    if points.is_empty() {
        if let Some(e) = first_error {
            return Err(e);
        }
    }
    Ok(SimResult {
        config: cfg.clone(),
        points,
    })
}

/// Run every operating point and aggregate the results.
pub fn sweep(cfg: &SimConfig) -> Result<SimResult, SimError> {
    sweep_with(cfg, |_| {})
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_config() -> SimConfig {
        SimConfig {
            code: CodeSpec::Ebch { n: 8, k: 4 },
            dims: 2,
            points: vec![2.0],
            point_kind: PointKind::EbN0,
            alpha: 0.5,
            max_iters: 20.0,
            list_size: 4,
            max_queries: 256,
            early_stop: 1e-5,
            min_block_errors: 20,
            max_blocks: 400,
            seed: 1,
            workers: 1,
        }
    }

    #[test]
    fn noiseless_point_is_perfect() {
        let mut cfg = quick_config();
        cfg.points = vec![40.0];
        cfg.min_block_errors = 1;
        cfg.max_blocks = 50;
        let r = run_point(&cfg, 0).unwrap();
        assert_eq!(r.blocks, 50);
        assert_eq!(r.bler, 0.0);
        assert_eq!(r.ber, 0.0);
        assert_eq!(r.avg_half_iters, 0.5);
        assert_eq!(r.abandon_frac, 0.0);
        assert!(r.hit_max_blocks);
    }

    #[test]
    fn rates_are_well_formed() {
        let r = run_point(&quick_config(), 0).unwrap();
        assert!(r.ber <= r.bler && r.bler <= 1.0);
        assert!(r.raw_ber > 0.0 && r.raw_ber < 0.5);
        assert!(r.avg_half_iters >= 0.5 && r.avg_half_iters <= 20.0);
        assert_eq!(r.bler, r.block_errors as f64 / r.blocks as f64);
    }

    #[test]
    fn raw_ber_matches_gaussian_tail() {
        let mut cfg = quick_config();
        cfg.points = vec![0.0];
        // Block errors cannot outrun blocks, so this runs all 2000 blocks.
        cfg.min_block_errors = 2000;
        cfg.max_blocks = 2000;
        let r = run_point(&cfg, 0).unwrap();
        let sigma = ebn0_to_sigma(0.0, PointKind::EbN0, 0.25).unwrap();
        let q = 0.5 * libm::erfc(1.0 / sigma / std::f64::consts::SQRT_2);
        let n_bits = (r.blocks * 64) as f64;
        let std_err = (q * (1.0 - q) / n_bits).sqrt();
        assert!(
            (r.raw_ber - q).abs() < 3.0 * std_err,
            "raw {} vs Q {}",
            r.raw_ber,
            q
        );
    }

    #[test]
    fn csv_is_identical_across_worker_counts() {
        let mut a_cfg = quick_config();
        let mut b_cfg = quick_config();
        a_cfg.workers = 1;
        b_cfg.workers = 3;
        let a = sweep(&a_cfg).unwrap();
        let b = sweep(&b_cfg).unwrap();
        let strip_seconds = |r: &SimResult| -> Vec<String> {
            let mut buf = Vec::new();
            r.write_csv(&mut buf).unwrap();
            String::from_utf8(buf)
                .unwrap()
                .lines()
                .map(|line| line.rsplit_once(',').map(|(head, _)| head.to_string()).unwrap_or_else(|| line.to_string()))
                .collect()
        };
        assert_eq!(strip_seconds(&a), strip_seconds(&b));
    }

    #[test]
    fn single_point_sweep_equals_run_point() {
        let cfg = quick_config();
        let direct = run_point(&cfg, 0).unwrap();
        let swept = sweep(&cfg).unwrap();
        assert_eq!(swept.points.len(), 1);
        let (a, b) = (&swept.points[0], &direct);
        assert_eq!((a.blocks, a.block_errors, a.bit_errors), (b.blocks, b.block_errors, b.bit_errors));
        assert_eq!(a.avg_half_iters, b.avg_half_iters);
    }

    #[test]
    fn csv_row_count_matches_points() {
        let mut cfg = quick_config();
        cfg.points = vec![1.0, 2.0, 3.0];
        cfg.min_block_errors = 5;
        cfg.max_blocks = 50;
        let result = sweep(&cfg).unwrap();
        let mut buf = Vec::new();
        result.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with(CSV_HEADER));
    }

    #[test]
    fn two_seeds_give_compatible_bler() {
        let mut a_cfg = quick_config();
        a_cfg.points = vec![1.0];
        a_cfg.min_block_errors = 100;
        a_cfg.max_blocks = 5000;
        let mut b_cfg = a_cfg.clone();
        a_cfg.seed = 11;
        b_cfg.seed = 22;
        let a = run_point(&a_cfg, 0).unwrap();
        let b = run_point(&b_cfg, 0).unwrap();
        assert!(a.block_errors >= 100 && b.block_errors >= 100);
        let interval = |r: &PointResult| {
            let p = r.bler;
            let half = 1.96 * (p * (1.0 - p) / r.blocks as f64).sqrt();
            (p - half, p + half)
        };
        let (alo, ahi) = interval(&a);
        let (blo, bhi) = interval(&b);
        assert!(alo <= bhi && blo <= ahi, "intervals disjoint: {a:?} vs {b:?}");
    }

    #[test]
    fn json_round_trips_with_config() {
        let cfg = quick_config();
        let result = sweep(&cfg).unwrap();
        let parsed: SimResult = serde_json::from_str(&result.to_json()).unwrap();
        assert_eq!(parsed.config, cfg);
        assert_eq!(parsed.points.len(), result.points.len());
    }

    #[test]
    fn config_guards() {
        let mut cfg = quick_config();
        cfg.points.clear();
        assert!(matches!(sweep(&cfg), Err(SimError::NoPoints)));
        let mut cfg = quick_config();
        cfg.min_block_errors = 0;
        assert!(matches!(run_point(&cfg, 0), Err(SimError::ZeroErrorTarget)));
        let mut cfg = quick_config();
        cfg.max_blocks = 5;
        assert!(matches!(run_point(&cfg, 0), Err(SimError::BlockCapTooSmall { .. })));
        let mut cfg = quick_config();
        cfg.workers = 0;
        assert!(matches!(run_point(&cfg, 0), Err(SimError::ZeroWorkers)));
    }
}
