//! Seeded error injection: substitutions, insertions, deletions and tandem
//! duplications, with a replayable log.
//!
//! One left-to-right pass draws a single event per input base. After the
//! pass, at most one tandem duplication is applied. Log positions are 0-based
//! offsets into the string as it stands when the event happens, so applying
//! the log in order to the clean word rebuilds the corrupted one.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dna::{Base, DnaString};

/// Generator used by [`corrupt`]; logs are reproducible only under it.
pub const PRNG_NAME: &str = "chacha8";

/// Placeholder per-event rate used when none is given.
pub const DEFAULT_RATE: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("{name} = {value} is not a probability")]
    BadRate { name: &'static str, value: f64 },
    #[error("per-base rates sum to {0}, which exceeds 1")]
    RateSum(f64),
    #[error("max tandem unit must be at least 1")]
    BadTandemUnit,
    #[error("event {index}: position {pos} out of range for length {len}")]
    OutOfRange {
        index: usize,
        pos: usize,
        len: usize,
    },
    #[error("event {index}: expected {expected:?} at {pos}, found {found:?}")]
    Mismatch {
        index: usize,
        pos: usize,
        expected: String,
        found: String,
    },
    #[error("event {index}: {reason}")]
    MalformedEvent { index: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorSpec {
    pub sub_rate: f64,
    pub ins_rate: f64,
    pub del_rate: f64,
    pub tandem_rate: f64,
    pub max_tandem_unit: usize,
    pub seed: u64,
}

impl ErrorSpec {
    /// The identity channel.
    pub fn noiseless(seed: u64) -> Self {
        ErrorSpec {
            sub_rate: 0.0,
            ins_rate: 0.0,
            del_rate: 0.0,
            tandem_rate: 0.0,
            max_tandem_unit: crate::metrics::DEFAULT_MAX_TANDEM_UNIT,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        for (name, value) in [
            ("sub_rate", self.sub_rate),
            ("ins_rate", self.ins_rate),
            ("del_rate", self.del_rate),
            ("tandem_rate", self.tandem_rate),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(ChannelError::BadRate { name, value });
            }
        }
        let sum = self.sub_rate + self.ins_rate + self.del_rate;
        if sum > 1.0 {
            return Err(ChannelError::RateSum(sum));
        }
        if self.max_tandem_unit == 0 {
            return Err(ChannelError::BadTandemUnit);
        }
        Ok(())
    }

    /// Same rates, seed mixed with a word index for independent streams.
    pub fn for_word(&self, index: u64) -> Self {
        ErrorSpec {
            seed: self.seed ^ index,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorKind {
    #[serde(rename = "sub")]
    Substitution,
    #[serde(rename = "ins")]
    Insertion,
    #[serde(rename = "del")]
    Deletion,
    Tandem,
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorKind::Substitution => "sub",
            ErrorKind::Insertion => "ins",
            ErrorKind::Deletion => "del",
            ErrorKind::Tandem => "tandem",
        })
    }
}

/// Replace `from` at `pos` with `to`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorEvent {
    pub kind: ErrorKind,
    pub pos: usize,
    pub from: String,
    pub to: String,
}

impl ErrorEvent {
    pub fn substitution(pos: usize, from: Base, to: Base) -> Self {
        ErrorEvent {
            kind: ErrorKind::Substitution,
            pos,
            from: from.to_string(),
            to: to.to_string(),
        }
    }

    pub fn insertion(pos: usize, base: Base) -> Self {
        ErrorEvent {
            kind: ErrorKind::Insertion,
            pos,
            from: String::new(),
            to: base.to_string(),
        }
    }

    pub fn deletion(pos: usize, base: Base) -> Self {
        ErrorEvent {
            kind: ErrorKind::Deletion,
            pos,
            from: base.to_string(),
            to: String::new(),
        }
    }

    /// Duplicates `x[pos..pos + unit_len]` right after itself.
    pub fn tandem(x: &DnaString, pos: usize, unit_len: usize) -> Result<Self, ChannelError> {
        if unit_len == 0 || pos + unit_len > x.len() {
            return Err(ChannelError::OutOfRange {
                index: 0,
                pos,
                len: x.len(),
            });
        }
        let unit: String = x.bases()[pos..pos + unit_len]
            .iter()
            .map(|b| b.as_char())
            .collect();
        Ok(ErrorEvent {
            kind: ErrorKind::Tandem,
            pos,
            to: unit.repeat(2),
            from: unit,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ErrorLog(pub Vec<ErrorEvent>);

impl ErrorLog {
    pub fn events(&self) -> &[ErrorEvent] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count(&self, kind: ErrorKind) -> usize {
        self.0.iter().filter(|e| e.kind == kind).count()
    }

    /// Total bases added by tandem duplications.
    pub fn tandem_bases(&self) -> usize {
        self.0
            .iter()
            .filter(|e| e.kind == ErrorKind::Tandem)
            .map(|e| e.from.len())
            .sum()
    }

    /// One JSON object per line.
    pub fn to_jsonl(&self) -> String {
        self.0
            .iter()
            .map(|e| serde_json::to_string(e).expect("events serialize") + "\n")
            .collect()
    }

    pub fn from_jsonl(s: &str) -> Result<Self, serde_json::Error> {
        s.lines()
            .filter(|l| !l.trim().is_empty())
            .map(serde_json::from_str)
            .collect::<Result<Vec<_>, _>>()
            .map(ErrorLog)
    }
}

fn random_base<R: Rng>(rng: &mut R) -> Base {
    Base::ALL[rng.gen_range(0..4)]
}

fn random_other<R: Rng>(rng: &mut R, b: Base) -> Base {
    let others: Vec<Base> = Base::ALL.into_iter().filter(|&o| o != b).collect();
    others[rng.gen_range(0..3)]
}

/// Runs `x` through the channel described by `spec`.
pub fn corrupt(x: &DnaString, spec: &ErrorSpec) -> Result<(DnaString, ErrorLog), ChannelError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut out: Vec<Base> = Vec::with_capacity(x.len() + 4);
    let mut log = Vec::new();
    let ins_edge = spec.sub_rate + spec.ins_rate;
    let del_edge = ins_edge + spec.del_rate;
    for &b in x.bases() {
        let u: f64 = rng.gen();
        if u < spec.sub_rate {
            let to = random_other(&mut rng, b);
            log.push(ErrorEvent::substitution(out.len(), b, to));
            out.push(to);
        } else if u < ins_edge {
            let extra = random_base(&mut rng);
            log.push(ErrorEvent::insertion(out.len(), extra));
            out.push(extra);
            out.push(b);
        } else if u < del_edge {
            log.push(ErrorEvent::deletion(out.len(), b));
        } else {
            out.push(b);
        }
    }
    let roll: f64 = rng.gen();
    if roll < spec.tandem_rate && !out.is_empty() {
        let start = rng.gen_range(0..out.len());
        let max_unit = spec.max_tandem_unit.min(out.len() - start);
        let unit_len = rng.gen_range(1..=max_unit);
        let current = DnaString::new(out);
        let event = ErrorEvent::tandem(&current, start, unit_len)?;
        out = current.into_bases();
        let unit = out[start..start + unit_len].to_vec();
        out.splice(start + unit_len..start + unit_len, unit);
        log.push(event);
    }
    Ok((out.into(), ErrorLog(log)))
}

fn parse_bases(index: usize, s: &str) -> Result<Vec<Base>, ChannelError> {
    DnaString::from_str(s)
        .map(DnaString::into_bases)
        .map_err(|e| ChannelError::MalformedEvent {
            index,
            reason: e.to_string(),
        })
}

/// Applies `log` to `x` in order.
pub fn replay(x: &DnaString, log: &ErrorLog) -> Result<DnaString, ChannelError> {
    let mut s = x.bases().to_vec();
    for (index, e) in log.events().iter().enumerate() {
        let from = parse_bases(index, &e.from)?;
        let to = parse_bases(index, &e.to)?;
        let shape_ok = match e.kind {
            ErrorKind::Substitution => from.len() == 1 && to.len() == 1,
            ErrorKind::Insertion => from.is_empty() && to.len() == 1,
            ErrorKind::Deletion => from.len() == 1 && to.is_empty(),
            ErrorKind::Tandem => {
                !from.is_empty()
                    && to.len() == 2 * from.len()
                    && to.starts_with(&from)
                    && to.ends_with(&from)
            }
        };
        if !shape_ok {
            return Err(ChannelError::MalformedEvent {
                index,
                reason: format!("{} event cannot map {:?} to {:?}", e.kind, e.from, e.to),
            });
        }
        let end = e.pos + from.len();
        if end > s.len() {
            return Err(ChannelError::OutOfRange {
                index,
                pos: e.pos,
                len: s.len(),
            });
        }
        if s[e.pos..end] != from[..] {
            return Err(ChannelError::Mismatch {
                index,
                pos: e.pos,
                expected: e.from.clone(),
                found: s[e.pos..end].iter().map(|b| b.as_char()).collect(),
            });
        }
        s.splice(e.pos..end, to);
    }
    Ok(s.into())
}
