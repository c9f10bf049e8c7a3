//! Systematic `(n, k)` binary linear component codes.
//!
//! Tensor product codes are built from one short systematic component code.
//! Two families are supported: cyclic-redundancy-check codes specified by a
//! Koopman-notation polynomial, and extended BCH codes from a small catalog.
//! Codewords fit in a `u64`, with bit `i` of the mask holding the `i`-th
//! transmitted bit; bit index 0 is the first/leftmost bit everywhere.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Upper bound on codeword length imposed by the `u64` word representation.
pub const MAX_WORD_BITS: usize = 64;

/// Errors from component-code construction and use.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodeError {
    #[error("CRC polynomial value must be nonzero")]
    ZeroPolynomial,
    #[error("codeword length {n} must exceed the polynomial degree {degree}")]
    LengthTooShort { n: usize, degree: usize },
    #[error("codeword length {n} exceeds the supported maximum of {MAX_WORD_BITS} bits")]
    LengthTooLong { n: usize },
    #[error("unsupported eBCH parameters ({n},{k}); catalog: (16,11), (8,4)")]
    UnsupportedEbch { n: usize, k: usize },
    #[error("message length {got} does not match k = {k}")]
    MessageLength { got: usize, k: usize },
    #[error("word length {got} does not match n = {n}")]
    WordLength { got: usize, n: usize },
    #[error("codebook enumeration requires k <= 16, got k = {k}")]
    CodebookTooLarge { k: usize },
    #[error("malformed code spec {spec:?}: {reason}")]
    BadSpec { spec: String, reason: String },
}

/// CRC generator polynomial in Koopman notation.
///
/// The hexadecimal value encodes the coefficients of `x^deg .. x^1`, with the
/// low-order `+1` term implicit. `0x15` therefore stands for
/// `x^5 + x^3 + x + 1` and generates five redundancy bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KoopmanPolynomial {
    value: u64,
}

impl KoopmanPolynomial {
    pub fn new(value: u64) -> Result<Self, CodeError> {
        if value == 0 {
            return Err(CodeError::ZeroPolynomial);
        }
        Ok(Self { value })
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    /// Number of redundancy bits the polynomial generates (its degree).
    pub fn degree(&self) -> usize {
        (u64::BITS - self.value.leading_zeros()) as usize
    }

    /// Full coefficient mask including the implicit `+1`: bit `i` is the
    /// coefficient of `x^i`.
    pub fn expanded(&self) -> u64 {
        (self.value << 1) | 1
    }
}

/// An `(n, k)` systematic binary linear code.
///
/// The generator matrix is in systematic form `[I_k | P]`; the parity-check
/// matrix is the matching `[P^T | I_{n-k}]`. Rows are stored as column
/// bitmasks (bit `c` of a row mask is the entry in column `c`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentCode {
    n: usize,
    k: usize,
    generator: Vec<u64>,
    parity_check: Vec<u64>,
    label: String,
}

impl ComponentCode {
    /// Build from systematic generator rows; derives `H = [P^T | I]`.
    fn from_systematic_rows(n: usize, k: usize, generator: Vec<u64>, label: String) -> Self {
        debug_assert!(0 < k && k < n && n <= MAX_WORD_BITS);
        debug_assert!(generator.len() == k);
        debug_assert!(generator
            .iter()
            .enumerate()
            .all(|(i, &row)| row & ((1u64 << k) - 1) == 1u64 << i));
        let mut parity_check = Vec::with_capacity(n - k);
        for j in 0..n - k {
            let mut h = 1u64 << (k + j);
            for (c, &row) in generator.iter().enumerate() {
                if row >> (k + j) & 1 == 1 {
                    h |= 1u64 << c;
                }
            }
            parity_check.push(h);
        }
        let code = Self {
            n,
            k,
            generator,
            parity_check,
            label,
        };
        debug_assert!(code.generator.iter().all(|&g| code.syndrome_ok_mask(g)));
        code
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of redundancy bits, `n - k`.
    pub fn redundancy(&self) -> usize {
        self.n - self.k
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Generator rows as column bitmasks.
    pub fn generator_rows(&self) -> &[u64] {
        &self.generator
    }

    /// Parity-check rows as column bitmasks.
    pub fn parity_check_rows(&self) -> &[u64] {
        &self.parity_check
    }

    /// Dense generator matrix, row-major.
    pub fn generator_matrix(&self) -> Vec<Vec<u8>> {
        self.generator.iter().map(|&r| mask_to_bits(r, self.n)).collect()
    }

    /// Dense parity-check matrix, row-major.
    pub fn parity_check_matrix(&self) -> Vec<Vec<u8>> {
        self.parity_check.iter().map(|&r| mask_to_bits(r, self.n)).collect()
    }

    /// Systematic encode of a `k`-bit message mask.
    #[inline]
    pub fn encode_mask(&self, msg: u64) -> u64 {
        debug_assert!(msg >> self.k == 0);
        let mut word = 0u64;
        let mut rest = msg;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            word ^= self.generator[i];
            rest &= rest - 1;
        }
        word
    }

    /// Systematic encode: `msg * G` over GF(2); the first `k` bits equal `msg`.
    pub fn encode(&self, msg: &[u8]) -> Result<Vec<u8>, CodeError> {
        if msg.len() != self.k {
            return Err(CodeError::MessageLength {
                got: msg.len(),
                k: self.k,
            });
        }
        Ok(mask_to_bits(self.encode_mask(bits_to_mask(msg)), self.n))
    }

    /// Membership test on a word mask: `H w^T = 0` over GF(2).
    #[inline]
    pub fn syndrome_ok_mask(&self, word: u64) -> bool {
        self.parity_check
            .iter()
            .all(|&h| (word & h).count_ones() & 1 == 0)
    }

    /// Membership test: true iff the word satisfies every parity check.
    pub fn syndrome_ok(&self, word: &[u8]) -> Result<bool, CodeError> {
        if word.len() != self.n {
            return Err(CodeError::WordLength {
                got: word.len(),
                n: self.n,
            });
        }
        Ok(self.syndrome_ok_mask(bits_to_mask(word)))
    }

    /// All `2^k` codewords as masks. Guarded to `k <= 16`.
    pub fn enumerate_codebook(&self) -> Result<Vec<u64>, CodeError> {
        if self.k > 16 {
            return Err(CodeError::CodebookTooLarge { k: self.k });
        }
        Ok((0..1u64 << self.k).map(|m| self.encode_mask(m)).collect())
    }

    /// Brute-force minimum distance over the whole codebook (oracle hook,
    /// `k <= 16`). Equals the minimum nonzero codeword weight by linearity.
    pub fn min_distance(&self) -> Result<u32, CodeError> {
        let words = self.enumerate_codebook()?;
        Ok(words
            .iter()
            .filter(|&&w| w != 0)
            .map(|w| w.count_ones())
            .min()
            .unwrap_or(0))
    }
}

/// Systematic CRC code from a Koopman polynomial.
///
/// Redundancy bits are the remainder of dividing the degree-shifted message
/// polynomial by the expanded generator; the message occupies the first
/// `k = n - deg` positions and maps to the high polynomial coefficients.
pub fn crc_code(poly: KoopmanPolynomial, n: usize) -> Result<ComponentCode, CodeError> {
    let degree = poly.degree();
    if n <= degree {
        return Err(CodeError::LengthTooShort { n, degree });
    }
    if n > MAX_WORD_BITS {
        return Err(CodeError::LengthTooLong { n });
    }
    let k = n - degree;
    let rows = systematic_polynomial_rows(poly.expanded(), degree, n);
    let label = format!("CRC-0x{:X} [{},{}]", poly.value(), n, k);
    Ok(ComponentCode::from_systematic_rows(n, k, rows, label))
}

/// Extended BCH code from the supported catalog.
///
/// `(16,11)` extends the single-error-correcting `(15,11)` BCH code (generator
/// `x^4 + x + 1`) with one overall even-parity bit; `(8,4)` extends the
/// `(7,4)` Hamming code (generator `x^3 + x + 1`). Every codeword has even
/// weight, so the minimum distance is 4 for both.
pub fn ebch_code(n: usize, k: usize) -> Result<ComponentCode, CodeError> {
    let gen_poly: u64 = match (n, k) {
        (16, 11) => 0b1_0011,
        (8, 4) => 0b1011,
        _ => return Err(CodeError::UnsupportedEbch { n, k }),
    };
    let degree = n - 1 - k;
    let base = systematic_polynomial_rows(gen_poly, degree, n - 1);
    let rows = base
        .into_iter()
        .map(|row| row | u64::from(row.count_ones() & 1) << (n - 1))
        .collect();
    let label = format!("eBCH [{n},{k}]");
    Ok(ComponentCode::from_systematic_rows(n, k, rows, label))
}

/// Generator rows of the systematic polynomial code: unit message `e_i` maps
/// to `x^(n-1-i)`, and the remainder of `x^deg m(x) mod g(x)` fills the last
/// `deg` positions (coefficient `x^j` at position `n-1-j`).
fn systematic_polynomial_rows(gen_poly: u64, degree: usize, n: usize) -> Vec<u64> {
    let k = n - degree;
    (0..k)
        .map(|i| {
            let mut acc = 1u64 << (n - 1 - i);
            for j in (degree..n).rev() {
                if acc >> j & 1 == 1 {
                    acc ^= gen_poly << (j - degree);
                }
            }
            let mut row = 1u64 << i;
            for j in 0..degree {
                if acc >> j & 1 == 1 {
                    row |= 1u64 << (n - 1 - j);
                }
            }
            row
        })
        .collect()
}

/// Pack bits (one per `u8`, index 0 first) into a mask.
pub fn bits_to_mask(bits: &[u8]) -> u64 {
    debug_assert!(bits.len() <= MAX_WORD_BITS);
    bits.iter()
        .enumerate()
        .fold(0u64, |acc, (i, &b)| acc | u64::from(b & 1) << i)
}

/// Unpack the low `n` bits of a mask into one `u8` per bit.
pub fn mask_to_bits(mask: u64, n: usize) -> Vec<u8> {
    (0..n).map(|i| (mask >> i & 1) as u8).collect()
}

/// Parsed form of a CLI code specification such as `crc:0x15:15` or
/// `ebch:16:11`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum CodeSpec {
    Crc { poly: u64, n: usize },
    Ebch { n: usize, k: usize },
}

impl CodeSpec {
    pub fn build(&self) -> Result<ComponentCode, CodeError> {
        match *self {
            CodeSpec::Crc { poly, n } => crc_code(KoopmanPolynomial::new(poly)?, n),
            CodeSpec::Ebch { n, k } => ebch_code(n, k),
        }
    }
}

impl fmt::Display for CodeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            CodeSpec::Crc { poly, n } => write!(f, "crc:0x{poly:X}:{n}"),
            CodeSpec::Ebch { n, k } => write!(f, "ebch:{n}:{k}"),
        }
    }
}

impl FromStr for CodeSpec {
    type Err = CodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |reason: &str| CodeError::BadSpec {
            spec: s.to_string(),
            reason: reason.to_string(),
        };
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["crc", poly, n] => {
                let poly = parse_poly(poly).ok_or_else(|| bad("polynomial must be a hex value like 0x15"))?;
                let n = n.parse().map_err(|_| bad("length must be an integer"))?;
                Ok(CodeSpec::Crc { poly, n })
            }
            ["ebch", n, k] => {
                let n = n.parse().map_err(|_| bad("length must be an integer"))?;
                let k = k.parse().map_err(|_| bad("dimension must be an integer"))?;
                Ok(CodeSpec::Ebch { n, k })
            }
            _ => Err(bad("expected crc:<hexpoly>:<n> or ebch:<n>:<k>")),
        }
    }
}

fn parse_poly(s: &str) -> Option<u64> {
    if let Some(hex) = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        u64::from_str_radix(hex, 16).ok()
    } else {
        s.parse().ok()
    }
}
