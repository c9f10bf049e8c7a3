//! Soft output for GRAND list decoding.
//!
//! The guessing list carries exact pattern likelihoods, so per-bit a
//! posteriori LLRs follow from weighing list entries against an estimate of
//! the codeword mass that was never found. The unexplored mass is split
//! per bit by the input prior, which preserves channel information on bits
//! the list never touches.

use crate::component_code::ComponentCode;
use crate::orbgrand::{self, GrandError, GrandList};
use crate::{real, Real};

/// Output LLRs are clamped to this magnitude; `1/(1+e^40)` is below the
/// double-precision noise floor, so nothing of value is lost.
pub const LLR_SATURATION: f64 = 40.0;

/// Soft and hard outputs of one component-code SISO decode.
#[derive(Debug, Clone, PartialEq)]
pub struct SisoResult<F> {
    /// Per-bit a posteriori LLRs, saturated to `LLR_SATURATION`.
    pub app_llr: Vec<F>,
    /// Extrinsic LLRs: `app_llr - llr_in` elementwise.
    pub ext_llr: Vec<F>,
    /// Maximal-posterior list entry, or the raw hard decision if the list is
    /// empty, as a word mask.
    pub best: u64,
    /// Estimated probability that the transmitted codeword is not on the list.
    pub p_notfound: F,
    /// Estimated probability that `best` is wrong.
    pub list_bler: F,
}

/// Knobs for one component SISO decode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SisoConfig<F> {
    pub list_size: usize,
    pub max_queries: u64,
    /// Not-in-list threshold below which querying stops early.
    pub stop_prob: F,
}

/// Pattern mass expected to sit on codewords the list has not found: the
/// unexplored mass times the density of unseen codewords among unqueried
/// words, `(1 - coverage) (2^k - |entries|) / (2^n - queries)`, clamped to
/// [0, 1]. This lives on the same scale as the entry pattern likelihoods;
/// conditioning it against the listed mass gives the not-in-list posterior.
pub fn estimate_p_notfound<F: Real>(list: &GrandList<F>, n: usize, k: usize) -> F {
    not_found_mass(list.coverage, list.entries.len(), list.queries, n, k)
}

pub(crate) fn not_found_mass<F: Real>(
    coverage: F,
    entries: usize,
    queries: u64,
    n: usize,
    k: usize,
) -> F {
    let unexplored = (F::one() - coverage).max(F::zero());
    let unseen_codewords = real::<F>(2f64.powi(k as i32) - entries as f64).max(F::zero());
    let unqueried = real::<F>(2f64.powi(n as i32) - queries as f64).max(F::one());
    (unexplored * unseen_codewords / unqueried)
        .max(F::zero())
        .min(F::one())
}

/// Posterior probability that the transmitted codeword is absent from the
/// list: the unseen-codeword mass conditioned against the listed mass.
pub(crate) fn not_found_posterior<F: Real>(
    coverage: F,
    listed_mass: F,
    entries: usize,
    queries: u64,
    n: usize,
    k: usize,
) -> F {
    let mass = not_found_mass(coverage, entries, queries, n, k);
    let total = listed_mass + mass;
    if total <= F::zero() {
        return F::one();
    }
    (mass / total).max(F::zero()).min(F::one())
}

/// Early-termination test: true iff the estimated list block error rate is
/// below the threshold.
pub fn should_stop_early<F: Real>(result: &SisoResult<F>, threshold: F) -> bool {
    result.list_bler < threshold
}

/// SISO decode of one component slice given summed channel and a-priori LLRs.
///
/// List entries `c` carry their pattern likelihood `w(c)`; the mass expected
/// to sit on unlisted codewords, `m`, shares the same scale and splits per
/// bit by the input prior `pi_j`. The per-bit APP is
/// `ln[(sum_{c_j=0} w + m pi_j(0)) / (sum_{c_j=1} w + m pi_j(1))]`, the
/// posterior of entry `c` is `w(c) / (sum w + m)`, and `p_notfound` is
/// `m / (sum w + m)`. An empty list passes the input through with zero
/// extrinsic and `list_bler = 1`.
pub fn siso_decode<F: Real>(
    code: &ComponentCode,
    llr_in: &[F],
    cfg: &SisoConfig<F>,
) -> Result<SisoResult<F>, GrandError> {
    let list = orbgrand::grand_list_decode(code, llr_in, cfg.list_size, cfg.max_queries, cfg.stop_prob)?;
    let n = code.n();
    let k = code.k();
    let listed: F = list.entries.iter().map(|e| e.pattern_prob).sum();
    let unfound = not_found_mass(list.coverage, list.entries.len(), list.queries, n, k);
    let p_notfound = not_found_posterior(list.coverage, listed, list.entries.len(), list.queries, n, k);

    if list.entries.is_empty() || listed <= F::zero() {
        // No usable evidence: pass the input through unchanged.
        let best = list
            .entries
            .first()
            .map(|e| e.word)
            .unwrap_or_else(|| orbgrand::hard_decision_mask(llr_in));
        return Ok(SisoResult {
            app_llr: llr_in.to_vec(),
            ext_llr: vec![F::zero(); n],
            best,
            p_notfound,
            list_bler: F::one(),
        });
    }

    let sat: F = real(LLR_SATURATION);
    let mut app_llr = Vec::with_capacity(n);
    let mut ext_llr = Vec::with_capacity(n);
    for (j, &input) in llr_in.iter().enumerate() {
        // Prior P(bit j = 0) from the input LLR, overflow-safe.
        let pi0 = F::one() / (F::one() + (-input).exp());
        let mut mass_zero = unfound * pi0;
        let mut mass_one = unfound * (F::one() - pi0);
        for e in &list.entries {
            if e.word >> j & 1 == 0 {
                mass_zero += e.pattern_prob;
            } else {
                mass_one += e.pattern_prob;
            }
        }
        let app = (mass_zero / mass_one).ln().max(-sat).min(sat);
        app_llr.push(app);
        ext_llr.push(app - input);
    }

    let best_entry = list
        .entries
        .iter()
        .max_by(|a, b| a.pattern_prob.partial_cmp(&b.pattern_prob).expect("finite"))
        .expect("nonempty list");
    let posterior_best = best_entry.pattern_prob / (listed + unfound);
    let list_bler = (F::one() - posterior_best).max(F::zero()).min(F::one());

    Ok(SisoResult {
        app_llr,
        ext_llr,
        best: best_entry.word,
        p_notfound,
        list_bler,
    })
}
