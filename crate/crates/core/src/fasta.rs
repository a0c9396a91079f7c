//! FASTA reading and writing, plus the block header grammar
//! `blk_<index>|n=<n>|mode=<eq3|example3>`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::codec::MiddleMode;
use crate::dna::DnaString;

pub const LINE_WIDTH: usize = 80;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FastaError {
    #[error("line {0}: sequence data before the first header")]
    MissingHeader(usize),
    #[error("bad block header {0:?}")]
    BadHeader(String),
    #[error("record {index}: {reason}")]
    BadSequence { index: usize, reason: String },
}

/// A raw record: header text without `>`, sequence with line breaks removed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FastaEntry {
    pub header: String,
    pub sequence: String,
}

impl FastaEntry {
    pub fn new(header: impl Into<String>, sequence: impl Into<String>) -> Self {
        FastaEntry {
            header: header.into(),
            sequence: sequence.into(),
        }
    }

    pub fn dna(&self, index: usize) -> Result<DnaString, FastaError> {
        self.sequence
            .parse()
            .map_err(|e: crate::dna::InvalidBase| FastaError::BadSequence {
                index,
                reason: e.to_string(),
            })
    }
}

pub fn parse_fasta(text: &str) -> Result<Vec<FastaEntry>, FastaError> {
    let mut out: Vec<FastaEntry> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if let Some(header) = line.strip_prefix('>') {
            out.push(FastaEntry::new(header.trim(), String::new()));
        } else if !line.trim().is_empty() {
            match out.last_mut() {
                Some(entry) => entry.sequence.push_str(line.trim()),
                None => return Err(FastaError::MissingHeader(lineno + 1)),
            }
        }
    }
    Ok(out)
}

/// Upper-case sequences wrapped at [`LINE_WIDTH`].
pub fn write_fasta(entries: &[FastaEntry]) -> String {
    let mut out = String::new();
    for e in entries {
        out.push('>');
        out.push_str(&e.header);
        out.push('\n');
        let seq = e.sequence.to_ascii_uppercase();
        let bytes = seq.as_bytes();
        for chunk in bytes.chunks(LINE_WIDTH) {
            out.push_str(std::str::from_utf8(chunk).expect("ascii"));
            out.push('\n');
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockHeader {
    pub index: usize,
    pub n: usize,
    pub mode: MiddleMode,
}

impl fmt::Display for BlockHeader {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "blk_{}|n={}|mode={}", self.index, self.n, self.mode)
    }
}

fn digits(s: &str) -> Option<usize> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

impl FromStr for BlockHeader {
    type Err = FastaError;

    fn from_str(s: &str) -> Result<Self, FastaError> {
        let bad = || FastaError::BadHeader(s.to_string());
        let s = s.strip_prefix('>').unwrap_or(s);
        let mut parts = s.split('|');
        let index = parts
            .next()
            .and_then(|p| p.strip_prefix("blk_"))
            .and_then(digits)
            .ok_or_else(bad)?;
        let n = parts
            .next()
            .and_then(|p| p.strip_prefix("n="))
            .and_then(digits)
            .ok_or_else(bad)?;
        let mode = match parts.next().and_then(|p| p.strip_prefix("mode=")) {
            Some("eq3") => MiddleMode::Eq3,
            Some("example3") => MiddleMode::Example3,
            _ => return Err(bad()),
        };
        if parts.next().is_some() {
            return Err(bad());
        }
        Ok(BlockHeader { index, n, mode })
    }
}

/// One encoded block as stored on disk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FastaRecord {
    pub header: BlockHeader,
    pub sequence: DnaString,
}

impl FastaRecord {
    pub fn to_entry(&self) -> FastaEntry {
        FastaEntry::new(self.header.to_string(), self.sequence.to_string())
    }
}

pub fn write_records(records: &[FastaRecord]) -> String {
    let entries: Vec<FastaEntry> = records.iter().map(FastaRecord::to_entry).collect();
    write_fasta(&entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_grammar() {
        let h: BlockHeader = "blk_12|n=8|mode=example3".parse().unwrap();
        assert_eq!(
            h,
            BlockHeader {
                index: 12,
                n: 8,
                mode: MiddleMode::Example3
            }
        );
        assert_eq!(h.to_string(), "blk_12|n=8|mode=example3");
        for bad in [
            "blk_|n=8|mode=eq3",
            "blk_1|n=8|mode=eq4",
            "blk_1|n=+8|mode=eq3",
            "blk_1|mode=eq3|n=8",
            "blk_1|n=8|mode=eq3|x",
            "block_1|n=8|mode=eq3",
        ] {
            assert!(bad.parse::<BlockHeader>().is_err(), "{bad}");
        }
    }

    #[test]
    fn parse_multiline() {
        let text = ">a desc\nACG\nTT\n\n>b\r\nGG\r\n";
        let e = parse_fasta(text).unwrap();
        assert_eq!(
            e,
            vec![
                FastaEntry::new("a desc", "ACGTT"),
                FastaEntry::new("b", "GG")
            ]
        );
        assert_eq!(parse_fasta("ACGT\n>a\n"), Err(FastaError::MissingHeader(1)));
    }

    #[test]
    fn wraps_long_sequences() {
        let long = "A".repeat(170);
        let text = write_fasta(&[FastaEntry::new("x", long.clone())]);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[1].len(), 80);
        assert_eq!(lines[3].len(), 10);
        assert_eq!(parse_fasta(&text).unwrap()[0].sequence, long);
    }

    #[test]
    fn bad_sequence_names_record() {
        let e = FastaEntry::new("x", "ACNT");
        assert!(matches!(
            e.dna(3),
            Err(FastaError::BadSequence { index: 3, .. })
        ));
    }
}
