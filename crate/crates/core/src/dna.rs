//! Nucleotide strings over `{A, C, G, T}`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid nucleotide {found:?} at position {position}")]
pub struct InvalidBase {
    pub position: usize,
    pub found: char,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Base {
    A,
    C,
    G,
    T,
}

impl Base {
    pub const ALL: [Base; 4] = [Base::A, Base::C, Base::G, Base::T];

    /// Watson-Crick partner.
    pub fn complement(self) -> Base {
        match self {
            Base::A => Base::T,
            Base::T => Base::A,
            Base::C => Base::G,
            Base::G => Base::C,
        }
    }

    pub fn is_gc(self) -> bool {
        matches!(self, Base::G | Base::C)
    }

    pub fn from_char(c: char) -> Option<Base> {
        match c.to_ascii_uppercase() {
            'A' => Some(Base::A),
            'C' => Some(Base::C),
            'G' => Some(Base::G),
            'T' => Some(Base::T),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Base::A => 'A',
            Base::C => 'C',
            Base::G => 'G',
            Base::T => 'T',
        }
    }

    /// Codec pair table: `00 -> C, 01 -> A, 10 -> T, 11 -> G`.
    pub fn from_bit_pair(high: bool, low: bool) -> Base {
        match (high, low) {
            (false, false) => Base::C,
            (false, true) => Base::A,
            (true, false) => Base::T,
            (true, true) => Base::G,
        }
    }

    /// Inverse of [`Base::from_bit_pair`].
    pub fn bit_pair(self) -> (bool, bool) {
        match self {
            Base::C => (false, false),
            Base::A => (false, true),
            Base::T => (true, false),
            Base::G => (true, true),
        }
    }
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// A DNA string. The empty string is allowed so that concatenations and
/// edit-distance boundaries stay total.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct DnaString(Vec<Base>);

impl DnaString {
    pub fn new(bases: Vec<Base>) -> Self {
        DnaString(bases)
    }

    pub fn bases(&self) -> &[Base] {
        &self.0
    }

    pub fn into_bases(self) -> Vec<Base> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &DnaString) -> DnaString {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        DnaString(v)
    }

    /// Whether `needle` occurs as a contiguous substring.
    pub fn contains(&self, needle: &DnaString) -> bool {
        needle.is_empty() || self.0.windows(needle.len()).any(|w| w == needle.bases())
    }
}

impl FromStr for DnaString {
    type Err = InvalidBase;

    fn from_str(s: &str) -> Result<Self, InvalidBase> {
        s.chars()
            .enumerate()
            .map(|(position, c)| Base::from_char(c).ok_or(InvalidBase { position, found: c }))
            .collect::<Result<Vec<_>, _>>()
            .map(DnaString)
    }
}

impl fmt::Display for DnaString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.0.iter().map(|b| b.as_char()).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for DnaString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DnaString({self})")
    }
}

impl From<Vec<Base>> for DnaString {
    fn from(v: Vec<Base>) -> Self {
        DnaString(v)
    }
}

impl Serialize for DnaString {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DnaString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        let s: DnaString = "acgT".parse().unwrap();
        assert_eq!(s.to_string(), "ACGT");
        assert_eq!(
            "ACXT".parse::<DnaString>(),
            Err(InvalidBase {
                position: 2,
                found: 'X'
            })
        );
        assert!("".parse::<DnaString>().unwrap().is_empty());
    }

    #[test]
    fn pair_table_roundtrips() {
        for b in Base::ALL {
            let (h, l) = b.bit_pair();
            assert_eq!(Base::from_bit_pair(h, l), b);
        }
    }
}
