//! Ordered Reliability Bits GRAND.
//!
//! Decoding guesses the channel noise: candidate error patterns are applied
//! to the hard decision in nondecreasing logistic weight, the sum of the
//! reliability ranks of the flipped positions, and every syndrome-passing
//! result joins a candidate list. Enumerating all subsets of `{1..n}` by rank
//! sum is equivalent to enumerating, weight class by weight class, the
//! integer partitions of the weight into distinct parts at most `n`.

use thiserror::Error;

use crate::component_code::ComponentCode;
use crate::sogrand;
use crate::Real;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GrandError {
    #[error("LLR input must be finite (no NaN or infinities)")]
    NonFiniteLlr,
    #[error("LLR length {got} does not match n = {n}")]
    LlrLength { got: usize, n: usize },
    #[error("list size must be at least 1")]
    ZeroListSize,
    #[error("query budget must be at least 1")]
    ZeroQueryBudget,
}

/// Positions sorted by ascending reliability `|LLR|`.
///
/// `perm[r]` is the position holding rank `r + 1`; `abs_llr` and `flip_prob`
/// are stored in rank order, so `abs_llr` is nondecreasing and `flip_prob`
/// (`p = 1/(1+e^|L|)`) is nonincreasing.
#[derive(Debug, Clone)]
pub struct ReliabilityOrder<F> {
    pub perm: Vec<usize>,
    pub abs_llr: Vec<F>,
    pub flip_prob: Vec<F>,
}

/// Sort positions by ascending `|LLR|`, ties broken by ascending position.
pub fn rank_positions<F: Real>(llr_in: &[F]) -> Result<ReliabilityOrder<F>, GrandError> {
    if llr_in.iter().any(|v| !v.is_finite()) {
        return Err(GrandError::NonFiniteLlr);
    }
    let mut perm: Vec<usize> = (0..llr_in.len()).collect();
    perm.sort_by(|&a, &b| {
        llr_in[a]
            .abs()
            .partial_cmp(&llr_in[b].abs())
            .expect("finite LLRs compare")
            .then(a.cmp(&b))
    });
    let abs_llr: Vec<F> = perm.iter().map(|&p| llr_in[p].abs()).collect();
    let flip_prob = abs_llr
        .iter()
        .map(|&a| {
            let e = (-a).exp();
            e / (F::one() + e)
        })
        .collect();
    Ok(ReliabilityOrder {
        perm,
        abs_llr,
        flip_prob,
    })
}

/// A set of reliability ranks to flip, with its logistic weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErrorPattern {
    /// Strictly increasing rank indices in `{1..n}`.
    pub ranks: Vec<u32>,
    /// Sum of the ranks.
    pub logistic_weight: u64,
}

/// Exact probability of a pattern under independent per-rank flips:
/// product of `p_r` over flipped ranks times `1 - p_r` over the rest.
pub fn pattern_probability<F: Real>(pattern: &ErrorPattern, order: &ReliabilityOrder<F>) -> F {
    let mut prob = F::one();
    let mut next = pattern.ranks.iter().peekable();
    for (i, &p) in order.flip_prob.iter().enumerate() {
        if next.peek().is_some_and(|&&r| r as usize == i + 1) {
            next.next();
            prob = prob * p;
        } else {
            prob = prob * (F::one() - p);
        }
    }
    prob
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum GeneratorState {
    Fresh,
    Active,
    Done,
}

/// Streams every subset of `{1..n}` exactly once in nondecreasing logistic
/// weight; ties resolve to fewest ranks first, then lexicographic rank order.
///
/// Within a (weight, cardinality) class the ranks `r_1 < .. < r_m` are held
/// as offsets `u_i = r_i - i`, a nondecreasing sequence bounded by `n - m`
/// with fixed sum, and stepped to the next lexicographic arrangement in
/// place, so each pattern costs O(m).
#[derive(Debug, Clone)]
pub struct PatternGenerator {
    n: usize,
    max_weight: u64,
    weight: u64,
    card: usize,
    offsets: Vec<u64>,
    ranks: Vec<u32>,
    state: GeneratorState,
}

impl PatternGenerator {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            max_weight: (n as u64 * (n as u64 + 1)) / 2,
            weight: 0,
            card: 0,
            offsets: Vec::with_capacity(n),
            ranks: Vec::with_capacity(n),
            state: GeneratorState::Fresh,
        }
    }

    /// Ranks of the current pattern (valid after `advance` returned true).
    pub fn ranks(&self) -> &[u32] {
        &self.ranks
    }

    /// Logistic weight of the current pattern.
    pub fn weight(&self) -> u64 {
        self.weight
    }

    /// Step to the next pattern. Returns false once all `2^n` subsets have
    /// been emitted; the first call emits the empty pattern.
    pub fn advance(&mut self) -> bool {
        match self.state {
            GeneratorState::Fresh => {
                self.state = GeneratorState::Active;
                self.weight = 0;
                self.card = 0;
                self.ranks.clear();
                true
            }
            GeneratorState::Done => false,
            GeneratorState::Active => {
                if self.card > 0 && self.next_within_class() {
                    self.rebuild_ranks();
                    true
                } else if self.next_class() {
                    self.rebuild_ranks();
                    true
                } else {
                    self.state = GeneratorState::Done;
                    false
                }
            }
        }
    }

    /// Owned-pattern convenience wrapper around `advance`.
    pub fn next_pattern(&mut self) -> Option<ErrorPattern> {
        if self.advance() {
            Some(ErrorPattern {
                ranks: self.ranks.clone(),
                logistic_weight: self.weight,
            })
        } else {
            None
        }
    }

    fn rebuild_ranks(&mut self) {
        self.ranks.clear();
        for (i, &u) in self.offsets.iter().enumerate() {
            self.ranks.push(u as u32 + i as u32 + 1);
        }
    }

    /// Move to the first pattern of the next nonempty (weight, cardinality)
    /// class: cardinality ascends within a weight, then the weight ascends.
    fn next_class(&mut self) -> bool {
        let n = self.n as u64;
        loop {
            self.card += 1;
            let m = self.card as u64;
            if self.card > self.n || triangle(m) > self.weight {
                self.weight += 1;
                self.card = 0;
                if self.weight > self.max_weight {
                    return false;
                }
                continue;
            }
            // Class is nonempty iff the excess fits below the per-part cap.
            let excess = self.weight - triangle(m);
            if excess <= m * (n - m) {
                self.init_class(excess);
                return true;
            }
        }
    }

    /// Lexicographically smallest offsets with the given sum: each position
    /// takes the least value the remaining capacity allows.
    fn init_class(&mut self, sum: u64) {
        let m = self.card;
        let cap = (self.n - m) as u64;
        self.offsets.clear();
        let mut rem = sum;
        let mut prev = 0u64;
        for i in 0..m {
            let tail = (m - 1 - i) as u64 * cap;
            let v = prev.max(rem.saturating_sub(tail));
            self.offsets.push(v);
            rem -= v;
            prev = v;
        }
        debug_assert_eq!(rem, 0);
    }

    /// In-place step to the next offsets arrangement of the same class:
    /// raise the rightmost position that still leaves a feasible suffix,
    /// then refill the suffix minimally.
    fn next_within_class(&mut self) -> bool {
        let m = self.card;
        let cap = (self.n - m) as u64;
        let mut suffix = self.offsets[m - 1];
        for j in (0..m - 1).rev() {
            suffix += self.offsets[j];
            let tail_len = (m - 1 - j) as u64;
            let lo = (self.offsets[j] + 1).max(suffix.saturating_sub(tail_len * cap));
            let hi = cap.min(suffix / (tail_len + 1));
            if lo <= hi {
                self.offsets[j] = lo;
                let mut rem = suffix - lo;
                let mut prev = lo;
                for i in j + 1..m {
                    let tail = (m - 1 - i) as u64 * cap;
                    let v = prev.max(rem.saturating_sub(tail));
                    self.offsets[i] = v;
                    rem -= v;
                    prev = v;
                }
                debug_assert_eq!(rem, 0);
                return true;
            }
        }
        false
    }
}

impl Iterator for PatternGenerator {
    type Item = ErrorPattern;

    fn next(&mut self) -> Option<ErrorPattern> {
        self.next_pattern()
    }
}

fn triangle(m: u64) -> u64 {
    m * (m + 1) / 2
}

/// One syndrome-passing candidate and the probability of the noise pattern
/// that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ListEntry<F> {
    pub word: u64,
    pub pattern_prob: F,
}

/// Result of a GRAND list decode.
#[derive(Debug, Clone, PartialEq)]
pub struct GrandList<F> {
    /// Distinct codewords found, in discovery (logistic-weight) order.
    pub entries: Vec<ListEntry<F>>,
    /// Total probability mass of every queried pattern, hits and misses.
    pub coverage: F,
    /// Number of codebook queries made.
    pub queries: u64,
}

/// Hard decision mask: bit set where the LLR favours 1 (ties resolve to 0).
pub(crate) fn hard_decision_mask<F: Real>(llr: &[F]) -> u64 {
    llr.iter()
        .enumerate()
        .fold(0u64, |acc, (i, &l)| if l < F::zero() { acc | 1 << i } else { acc })
}

/// GRAND list decode: apply patterns in logistic-weight order to the hard
/// decision of `llr_in` and collect up to `list_size` codewords.
///
/// Stops when the list is full, the query budget is spent, the pattern space
/// is exhausted, or, once at least one codeword is on the list, the
/// not-in-list estimate drops below `stop_prob`. Exhausting the budget with
/// no hit returns an empty list, not an error.
pub fn grand_list_decode<F: Real>(
    code: &ComponentCode,
    llr_in: &[F],
    list_size: usize,
    max_queries: u64,
    stop_prob: F,
) -> Result<GrandList<F>, GrandError> {
    let n = code.n();
    if llr_in.len() != n {
        return Err(GrandError::LlrLength {
            got: llr_in.len(),
            n,
        });
    }
    if list_size == 0 {
        return Err(GrandError::ZeroListSize);
    }
    if max_queries == 0 {
        return Err(GrandError::ZeroQueryBudget);
    }
    let order = rank_positions(llr_in)?;
    let hard = hard_decision_mask(llr_in);

    // Probability of a pattern relative to the all-intact base mass.
    let base: F = order
        .flip_prob
        .iter()
        .fold(F::one(), |acc, &p| acc * (F::one() - p));
    let odds: Vec<F> = order.flip_prob.iter().map(|&p| p / (F::one() - p)).collect();

    let mut generator = PatternGenerator::new(n);
    let mut entries: Vec<ListEntry<F>> = Vec::with_capacity(list_size.min(64));
    let mut coverage = F::zero();
    let mut listed = F::zero();
    let mut queries = 0u64;

    while queries < max_queries && generator.advance() {
        queries += 1;
        let mut prob = base;
        let mut flips = 0u64;
        for &r in generator.ranks() {
            prob = prob * odds[r as usize - 1];
            flips |= 1u64 << order.perm[r as usize - 1];
        }
        coverage = coverage + prob;
        let word = hard ^ flips;
        if code.syndrome_ok_mask(word) {
            entries.push(ListEntry {
                word,
                pattern_prob: prob,
            });
            listed += prob;
            if entries.len() == list_size {
                break;
            }
        }
        if !entries.is_empty() {
            let p_nf = sogrand::not_found_posterior(
                coverage,
                listed,
                entries.len(),
                queries,
                n,
                code.k(),
            );
            if p_nf < stop_prob {
                break;
            }
        }
    }

    Ok(GrandList {
        entries,
        coverage: coverage.min(F::one()),
        queries,
    })
}
