//! Kernel-code DNA storage toolkit.
//!
//! Binary information is mapped onto kernel words of a parity homomorphism,
//! extended with homomorphic redundancy bits, and paired into nucleotides so
//! that every codeword keeps its GC-weight within one of `n/2` and a large
//! reverse-complement distance. The crate also carries the string metrics,
//! a seeded indel/tandem channel, and exhaustive verifiers for small `n`.

pub mod algebra;
pub mod bits;
pub mod channel;
pub mod cli;
pub mod codec;
pub mod dna;
pub mod fasta;
pub mod metrics;
pub mod verify;

pub use bits::Bits;
pub use codec::{decode_block, encode_block, CodecParams, MiddleMode};
pub use dna::{Base, DnaString};
