//! Byte streams to sequences of codewords and back.
//!
//! The bit stream is cut into `l`-bit blocks; the final block is left-padded
//! with zeros. True lengths live in a [`Manifest`] next to the DNA.

use std::fmt;
use std::io::{self, Read};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{check_block, encode_block, BlockFault, CodecError, CodecParams, MiddleMode};
use crate::bits::{bits_to_bytes, bytes_to_bits, Bits};
use crate::dna::DnaString;

pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: u32,
    pub n: usize,
    pub l: usize,
    pub middle_mode: MiddleMode,
    pub total_bits: u64,
    pub block_count: u64,
}

impl Manifest {
    pub fn params(&self) -> Result<CodecParams, StreamError> {
        if self.version != MANIFEST_VERSION {
            return Err(StreamError::Manifest(format!(
                "unsupported manifest version {}",
                self.version
            )));
        }
        let params = CodecParams::new(self.n, self.middle_mode)
            .map_err(|e| StreamError::Manifest(e.to_string()))?;
        if self.l != params.l() {
            return Err(StreamError::Manifest(format!(
                "l = {} but n = {} requires l = {}",
                self.l,
                self.n,
                params.l()
            )));
        }
        let expected = self.total_bits.div_ceil(self.l as u64);
        if self.block_count != expected {
            return Err(StreamError::Manifest(format!(
                "{} bits need {} blocks, manifest says {}",
                self.total_bits, expected, self.block_count
            )));
        }
        Ok(params)
    }
}

/// A rejected block and its index in the stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockError {
    pub block: usize,
    pub fault: BlockFault,
}

#[derive(Debug, Error)]
pub enum StreamError {
    #[error("read failed at byte offset {offset}: {source}")]
    Io {
        offset: u64,
        #[source]
        source: io::Error,
    },
    #[error("manifest mismatch: {0}")]
    Manifest(String),
    #[error("corrupted blocks: {}", CorruptList(.0))]
    Corrupted(Vec<BlockError>),
    #[error(transparent)]
    Codec(#[from] CodecError),
}

struct CorruptList<'a>(&'a [BlockError]);

impl fmt::Display for CorruptList<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}", e.block)?;
        }
        Ok(())
    }
}

fn read_all<R: Read>(mut source: R) -> Result<Vec<u8>, StreamError> {
    let mut out = Vec::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        match source.read(&mut buf) {
            Ok(0) => return Ok(out),
            Ok(k) => out.extend_from_slice(&buf[..k]),
            Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
            Err(source) => {
                return Err(StreamError::Io {
                    offset: out.len() as u64,
                    source,
                })
            }
        }
    }
}

pub fn encode_stream<R: Read>(
    source: R,
    params: &CodecParams,
) -> Result<(Vec<DnaString>, Manifest), StreamError> {
    let bytes = read_all(source)?;
    encode_bits(&bytes_to_bits(&bytes), params)
}

/// Encodes an arbitrary bit sequence block by block.
pub fn encode_bits(
    bits: &[bool],
    params: &CodecParams,
) -> Result<(Vec<DnaString>, Manifest), StreamError> {
    let words = bits
        .chunks(params.l())
        .map(|chunk| encode_block(&Bits::new(chunk.to_vec()), params))
        .collect::<Result<Vec<_>, _>>()?;
    let manifest = Manifest {
        version: MANIFEST_VERSION,
        n: params.n(),
        l: params.l(),
        middle_mode: params.mode(),
        total_bits: bits.len() as u64,
        block_count: words.len() as u64,
    };
    Ok((words, manifest))
}

/// Bit-level inverse of [`encode_bits`]. Every block is re-encoded and
/// compared; all failing blocks are reported together.
pub fn decode_bits(codewords: &[DnaString], manifest: &Manifest) -> Result<Vec<bool>, StreamError> {
    let params = manifest.params()?;
    if codewords.len() as u64 != manifest.block_count {
        return Err(StreamError::Manifest(format!(
            "manifest lists {} blocks, found {}",
            manifest.block_count,
            codewords.len()
        )));
    }
    let l = params.l();
    let last_len = match manifest.total_bits as usize % l {
        0 => l,
        r => r,
    };
    let mut out = Vec::with_capacity(manifest.total_bits as usize);
    let mut faults = Vec::new();
    for (block, word) in codewords.iter().enumerate() {
        let info = match check_block(word, &params) {
            Ok(info) => info,
            Err(fault) => {
                faults.push(BlockError { block, fault });
                continue;
            }
        };
        let keep = if block + 1 == codewords.len() {
            last_len
        } else {
            l
        };
        let (pad, body) = info.as_slice().split_at(l - keep);
        if pad.iter().any(|&b| b) {
            faults.push(BlockError {
                block,
                fault: BlockFault::NonzeroPadding,
            });
            continue;
        }
        out.extend_from_slice(body);
    }
    if !faults.is_empty() {
        return Err(StreamError::Corrupted(faults));
    }
    Ok(out)
}

pub fn decode_stream(codewords: &[DnaString], manifest: &Manifest) -> Result<Vec<u8>, StreamError> {
    if !manifest.total_bits.is_multiple_of(8) {
        return Err(StreamError::Manifest(format!(
            "{} bits is not a whole number of bytes",
            manifest.total_bits
        )));
    }
    Ok(bits_to_bytes(&decode_bits(codewords, manifest)?))
}
