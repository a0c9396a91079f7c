//! Binary block codec.
//!
//! An information block `a` of `l = n - 1` bits becomes a DNA word of `n`
//! bases in four steps:
//!
//! 1. kernel word `g = 1 || a || p`, where `p` makes the bit sum even;
//! 2. `n - 1` redundancy bits `h_i` computed from `g`;
//! 3. payload `E = g_1..g_n || g_{n+1} h_1..h_{n-1}` of `2n` bits;
//! 4. base `i` is the pair `(E_i, E_{n+i})` under `00->C 01->A 10->T 11->G`.
//!
//! The first bit of every pair is a kernel bit, so decoding reads the class
//! of bases `2..n` (`C, A -> 0`, `T, G -> 1`).

pub mod stream;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::Bits;
use crate::dna::{Base, DnaString};

pub use stream::{decode_stream, encode_bits, encode_stream, Manifest, StreamError};

/// Smallest supported codeword length.
pub const MIN_N: usize = 4;
/// Largest supported codeword length.
pub const MAX_N: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("codeword length {0} outside [{MIN_N}, {MAX_N}]")]
    InvalidLength(usize),
    #[error("information block has {len} bits, at most {max} allowed")]
    InfoTooLong { len: usize, max: usize },
    #[error("kernel word {0} is invalid: {1}")]
    InvalidKernelWord(Bits, &'static str),
    #[error("redundancy has {got} bits, expected {expected}")]
    RedundancyLength { expected: usize, got: usize },
    #[error("payload has odd length {0}")]
    OddPayload(usize),
    #[error("codeword has {got} bases, expected {expected}")]
    WordLength { expected: usize, got: usize },
    #[error("requested {requested} information bits from a block of {max}")]
    TrueLength { requested: usize, max: usize },
}

pub type Result<T> = std::result::Result<T, CodecError>;

/// How the middle redundancy bit is formed for even `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MiddleMode {
    /// `h_{n/2} = g_1 + g_{n/2+1} + g_{n+1}`.
    #[default]
    Eq3,
    /// `h_{n/2} = g_1 + g_{n/2+1}`, which reproduces the worked `GGGCATAT`
    /// codeword.
    Example3,
}

impl MiddleMode {
    pub const ALL: [MiddleMode; 2] = [MiddleMode::Eq3, MiddleMode::Example3];

    pub fn as_str(self) -> &'static str {
        match self {
            MiddleMode::Eq3 => "eq3",
            MiddleMode::Example3 => "example3",
        }
    }
}

impl fmt::Display for MiddleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MiddleMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "eq3" => Ok(MiddleMode::Eq3),
            "example3" => Ok(MiddleMode::Example3),
            other => Err(format!(
                "unknown middle mode {other:?} (expected eq3 or example3)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CodecParams {
    n: usize,
    mode: MiddleMode,
}

impl CodecParams {
    pub fn new(n: usize, mode: MiddleMode) -> Result<Self> {
        if !(MIN_N..=MAX_N).contains(&n) {
            return Err(CodecError::InvalidLength(n));
        }
        Ok(CodecParams { n, mode })
    }

    /// Codeword length in bases.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Information bits per block, always `n - 1`.
    pub fn l(&self) -> usize {
        self.n - 1
    }

    pub fn mode(&self) -> MiddleMode {
        self.mode
    }
}

/// Information bits, at most `l` of them.
pub type InfoBlock = Bits;

/// DNA word produced by [`encode_block`].
pub type DnaCodeword = DnaString;

/// `g_1..g_{n+1}` with `g_1 = 1` and even weight.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct KernelWord(Bits);

impl KernelWord {
    pub fn new(bits: Bits) -> Result<Self> {
        if bits.len() < MIN_N + 1 {
            return Err(CodecError::InvalidKernelWord(bits, "too short"));
        }
        if !bits[0] {
            return Err(CodecError::InvalidKernelWord(
                bits,
                "leading marker bit is 0",
            ));
        }
        if bits.parity() {
            return Err(CodecError::InvalidKernelWord(bits, "odd weight"));
        }
        Ok(KernelWord(bits))
    }

    pub fn bits(&self) -> &Bits {
        &self.0
    }

    /// Codeword length this kernel word belongs to.
    pub fn n(&self) -> usize {
        self.0.len() - 1
    }

    /// 1-based access, matching `g_1..g_{n+1}`.
    fn g(&self, i: usize) -> bool {
        self.0[i - 1]
    }
}

impl fmt::Display for KernelWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// The `2n`-bit payload `E` that is paired up into bases.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PayloadBits(Bits);

impl PayloadBits {
    pub fn new(bits: Bits) -> Result<Self> {
        if !bits.len().is_multiple_of(2) {
            return Err(CodecError::OddPayload(bits.len()));
        }
        Ok(PayloadBits(bits))
    }

    pub fn bits(&self) -> &Bits {
        &self.0
    }
}

impl fmt::Display for PayloadBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Left-pads `a` with zeros to exactly `l` bits.
pub fn pad_info(a: &Bits, l: usize) -> Result<Bits> {
    if a.len() > l {
        return Err(CodecError::InfoTooLong {
            len: a.len(),
            max: l,
        });
    }
    let mut v = vec![false; l - a.len()];
    v.extend_from_slice(a.as_slice());
    Ok(Bits::new(v))
}

pub fn to_kernel_word(a: &Bits, params: &CodecParams) -> Result<KernelWord> {
    let padded = pad_info(a, params.l())?;
    let mut v = Vec::with_capacity(params.n() + 1);
    v.push(true);
    v.extend_from_slice(padded.as_slice());
    let p = v.iter().fold(false, |acc, &b| acc ^ b);
    v.push(p);
    KernelWord::new(Bits::new(v))
}

/// The `n - 1` redundancy bits `h_1..h_{n-1}` (sums mod 2):
///
/// * `h_i = g_{i+1}` for `i <= floor((n-1)/2)`,
/// * `h_i = g_1 + g_{i+1}` for `i >= ceil((n+1)/2)`,
/// * for even `n`, `h_{n/2}` depends on [`MiddleMode`].
pub fn redundancy_bits(g: &KernelWord, params: &CodecParams) -> Bits {
    let n = params.n();
    debug_assert_eq!(g.n(), n);
    let low = (n - 1) / 2;
    (1..n)
        .map(|i| {
            if i <= low {
                g.g(i + 1)
            } else if 2 * i == n {
                match params.mode() {
                    MiddleMode::Eq3 => g.g(1) ^ g.g(i + 1) ^ g.g(n + 1),
                    MiddleMode::Example3 => g.g(1) ^ g.g(i + 1),
                }
            } else {
                g.g(1) ^ g.g(i + 1)
            }
        })
        .collect::<Vec<_>>()
        .into()
}

/// `E = g_1..g_n || g_{n+1} h_1..h_{n-1}`.
pub fn assemble_payload(g: &KernelWord, h: &Bits) -> Result<PayloadBits> {
    let n = g.n();
    if h.len() != n - 1 {
        return Err(CodecError::RedundancyLength {
            expected: n - 1,
            got: h.len(),
        });
    }
    let mut v = Vec::with_capacity(2 * n);
    v.extend_from_slice(g.bits().as_slice());
    v.extend_from_slice(h.as_slice());
    PayloadBits::new(Bits::new(v))
}

/// Pairs bit `i` with bit `n + i` and maps each pair to a base.
pub fn payload_to_dna(e: &PayloadBits) -> DnaString {
    let bits = e.bits().as_slice();
    let n = bits.len() / 2;
    (0..n)
        .map(|i| Base::from_bit_pair(bits[i], bits[n + i]))
        .collect::<Vec<_>>()
        .into()
}

pub fn encode_block(a: &Bits, params: &CodecParams) -> Result<DnaCodeword> {
    let g = to_kernel_word(a, params)?;
    let h = redundancy_bits(&g, params);
    Ok(payload_to_dna(&assemble_payload(&g, &h)?))
}

/// Reads the class bits of bases `2..n` and keeps the last `true_len` of them.
pub fn decode_block(y: &DnaString, params: &CodecParams, true_len: usize) -> Result<Bits> {
    if y.len() != params.n() {
        return Err(CodecError::WordLength {
            expected: params.n(),
            got: y.len(),
        });
    }
    if true_len > params.l() {
        return Err(CodecError::TrueLength {
            requested: true_len,
            max: params.l(),
        });
    }
    let skip = params.l() - true_len;
    Ok(y.bases()[1 + skip..]
        .iter()
        .map(|b| b.bit_pair().0)
        .collect::<Vec<_>>()
        .into())
}

/// The `n + 1` kernel bits carried by a received word: class bits of every
/// base, then the low bit of the first base.
pub fn recover_kernel_word(y: &DnaString) -> Bits {
    let mut v: Vec<bool> = y.bases().iter().map(|b| b.bit_pair().0).collect();
    if let Some(first) = y.bases().first() {
        v.push(first.bit_pair().1);
    }
    Bits::new(v)
}

/// Why a received word was rejected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BlockFault {
    #[error("word has {got} bases, expected {expected}")]
    WrongLength { expected: usize, got: usize },
    #[error("re-encoding the decoded bits gives {expected}, received {received}")]
    Inconsistent {
        expected: DnaString,
        received: DnaString,
    },
    #[error("padding bits are not zero")]
    NonzeroPadding,
}

/// Decodes the full `l`-bit block and re-encodes it; any mismatch with the
/// received word means it is not a codeword.
pub fn check_block(y: &DnaString, params: &CodecParams) -> std::result::Result<Bits, BlockFault> {
    let info = decode_block(y, params, params.l()).map_err(|_| BlockFault::WrongLength {
        expected: params.n(),
        got: y.len(),
    })?;
    let expected = encode_block(&info, params).expect("decoded block has exactly l bits");
    if &expected != y {
        return Err(BlockFault::Inconsistent {
            expected,
            received: y.clone(),
        });
    }
    Ok(info)
}
