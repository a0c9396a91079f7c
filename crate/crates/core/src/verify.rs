//! Exhaustive checks of the codebook at small `n`: size, minimum distances,
//! GC-weight distribution, roundtrip integrity, substitution detection and
//! the shift-correlation profile.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::ops::RangeInclusive;

use serde::Serialize;
use thiserror::Error;

use crate::bits::Bits;
use crate::channel::{replay, ErrorEvent, ErrorLog};
use crate::codec::{
    check_block, decode_block, encode_block, recover_kernel_word, CodecError, CodecParams,
    MiddleMode,
};
use crate::dna::{Base, DnaString};
use crate::metrics::{self, MetricsError, PairVariant, SelfPairs};

/// Largest `n` enumerated by default (`2^15` codewords).
pub const DEFAULT_EXHAUSTIVE_MAX_N: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("n = {n} exceeds the exhaustive limit of {max}")]
    BudgetExceeded { n: usize, max: usize },
    #[error(
        "encoder is not injective at n = {n}: {distinct} distinct words for {expected} blocks"
    )]
    NotInjective {
        n: usize,
        distinct: usize,
        expected: usize,
    },
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

pub type Result<T> = std::result::Result<T, VerifyError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExhaustiveBudget(pub usize);

impl Default for ExhaustiveBudget {
    fn default() -> Self {
        ExhaustiveBudget(DEFAULT_EXHAUSTIVE_MAX_N)
    }
}

/// Every codeword at one parameter setting; `words[v]` encodes the `l`-bit
/// block whose binary value is `v`.
#[derive(Debug, Clone)]
pub struct Codebook {
    params: CodecParams,
    words: Vec<DnaString>,
}

impl Codebook {
    pub fn enumerate(params: &CodecParams, budget: ExhaustiveBudget) -> Result<Self> {
        let n = params.n();
        if n > budget.0 {
            return Err(VerifyError::BudgetExceeded { n, max: budget.0 });
        }
        let l = params.l();
        let words = (0..1u64 << l)
            .map(|v| encode_block(&Bits::from_u64(v, l), params))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let distinct = words.iter().collect::<HashSet<_>>().len();
        if distinct != words.len() {
            return Err(VerifyError::NotInjective {
                n,
                distinct,
                expected: words.len(),
            });
        }
        Ok(Codebook {
            params: *params,
            words,
        })
    }

    pub fn params(&self) -> &CodecParams {
        &self.params
    }

    pub fn words(&self) -> &[DnaString] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn info(&self, index: usize) -> Bits {
        Bits::from_u64(index as u64, self.params.l())
    }
}

/// All `2^(n-1)` codewords, in information order.
pub fn enumerate_codebook(
    params: &CodecParams,
    budget: ExhaustiveBudget,
) -> Result<Vec<DnaString>> {
    Codebook::enumerate(params, budget).map(|c| c.words)
}

/// Two bits per base, first base in the low bits. `A=0 C=1 G=2 T=3`, so the
/// complement of a code `c` is `3 - c`.
fn pack(x: &DnaString) -> u64 {
    x.bases().iter().enumerate().fold(0u64, |acc, (i, b)| {
        let c = match b {
            Base::A => 0,
            Base::C => 1,
            Base::G => 2,
            Base::T => 3,
        };
        acc | (c << (2 * i))
    })
}

fn pack_rc(x: &DnaString) -> u64 {
    pack(&metrics::reverse_complement(x))
}

const MAX_PACKED: usize = 32;
const LOW_BITS: u64 = 0x5555_5555_5555_5555;

fn packed_distance(a: u64, b: u64) -> u32 {
    let d = a ^ b;
    ((d | (d >> 1)) & LOW_BITS).count_ones()
}

/// `2 * floor((n - 3) / 2)`.
pub fn rc_formula(n: usize) -> usize {
    2 * (n.saturating_sub(3) / 2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RcRelation {
    Equal,
    LowerBound,
    Violated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RcDistance {
    /// Minimum of `H(x^RC, y)` over all ordered pairs, `x = y` included.
    pub computed: usize,
    /// Same minimum over pairs with `x != y`.
    pub computed_distinct: usize,
    pub formula: usize,
    pub holds: bool,
    pub equal: bool,
    pub relation: RcRelation,
}

/// Minimum `H(x^RC, y)` over a code by packed double loop.
pub fn min_rc_distance(code: &[DnaString], self_pairs: SelfPairs) -> Result<usize> {
    if metrics::code_length(code)? > MAX_PACKED {
        return Ok(metrics::min_pairwise(
            code,
            PairVariant::ReverseComplement,
            self_pairs,
        )?);
    }
    let fwd: Vec<u64> = code.iter().map(pack).collect();
    let rc: Vec<u64> = code.iter().map(pack_rc).collect();
    let mut best = u32::MAX;
    for (i, &x) in rc.iter().enumerate() {
        for (j, &y) in fwd.iter().enumerate() {
            if self_pairs == SelfPairs::Exclude && i == j {
                continue;
            }
            best = best.min(packed_distance(x, y));
        }
    }
    if best == u32::MAX {
        return Err(MetricsError::NoPairs.into());
    }
    Ok(best as usize)
}

/// Minimum Hamming distance between distinct codewords.
pub fn min_hamming_distance(code: &[DnaString]) -> Result<usize> {
    if metrics::code_length(code)? > MAX_PACKED {
        return Ok(metrics::min_pairwise(
            code,
            PairVariant::Hamming,
            SelfPairs::Exclude,
        )?);
    }
    let fwd: Vec<u64> = code.iter().map(pack).collect();
    let mut best = u32::MAX;
    for (i, &x) in fwd.iter().enumerate() {
        for &y in &fwd[i + 1..] {
            best = best.min(packed_distance(x, y));
        }
    }
    if best == u32::MAX {
        return Err(MetricsError::NoPairs.into());
    }
    Ok(best as usize)
}

pub fn rc_distance_of(codebook: &Codebook) -> Result<RcDistance> {
    let computed = min_rc_distance(codebook.words(), SelfPairs::Include)?;
    let computed_distinct = min_rc_distance(codebook.words(), SelfPairs::Exclude)?;
    let formula = rc_formula(codebook.params().n());
    let relation = match computed.cmp(&formula) {
        std::cmp::Ordering::Equal => RcRelation::Equal,
        std::cmp::Ordering::Greater => RcRelation::LowerBound,
        std::cmp::Ordering::Less => RcRelation::Violated,
    };
    Ok(RcDistance {
        computed,
        computed_distinct,
        formula,
        holds: computed >= formula,
        equal: computed == formula,
        relation,
    })
}

pub fn verify_rc_distance(params: &CodecParams) -> Result<RcDistance> {
    rc_distance_of(&Codebook::enumerate(params, ExhaustiveBudget::default())?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GcStats {
    pub min: usize,
    pub max: usize,
    pub histogram: BTreeMap<usize, u64>,
    pub min_percent: f64,
    pub max_percent: f64,
    /// Largest `|w_GC - n/2|` over the codebook.
    pub max_deviation: f64,
    /// Every codeword lies in the 40%..=60% band.
    pub within_40_60: bool,
    /// Every codeword has GC-weight exactly `n/2`.
    pub exactly_half: bool,
}

pub fn gc_stats_of(codebook: &Codebook) -> GcStats {
    let n = codebook.params().n();
    let mut histogram = BTreeMap::new();
    for w in codebook.words() {
        *histogram.entry(metrics::gc_weight(w)).or_insert(0u64) += 1;
    }
    let min = histogram.keys().next().copied().unwrap_or(0);
    let max = histogram.keys().next_back().copied().unwrap_or(0);
    let percent = |w: usize| 100.0 * w as f64 / n as f64;
    let half = n as f64 / 2.0;
    let max_deviation = histogram
        .keys()
        .map(|&w| (w as f64 - half).abs())
        .fold(0.0, f64::max);
    // compare in integers: 40% <= w/n <= 60%  <=>  2n <= 5w <= 3n
    let within_40_60 = histogram.keys().all(|&w| 2 * n <= 5 * w && 5 * w <= 3 * n);
    let exactly_half = histogram.keys().all(|&w| 2 * w == n);
    GcStats {
        min,
        max,
        histogram,
        min_percent: percent(min),
        max_percent: percent(max),
        max_deviation,
        within_40_60,
        exactly_half,
    }
}

pub fn verify_gc(params: &CodecParams) -> Result<GcStats> {
    Ok(gc_stats_of(&Codebook::enumerate(
        params,
        ExhaustiveBudget::default(),
    )?))
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RoundtripOutcome {
    pub checked: usize,
    /// Information blocks that did not survive encode then decode.
    pub failures: Vec<Bits>,
}

pub fn roundtrip_of(codebook: &Codebook) -> RoundtripOutcome {
    let params = codebook.params();
    let failures = codebook
        .words()
        .iter()
        .enumerate()
        .filter_map(|(v, y)| {
            let info = codebook.info(v);
            let ok = decode_block(y, params, params.l()).ok().as_ref() == Some(&info)
                && check_block(y, params).ok().as_ref() == Some(&info);
            (!ok).then_some(info)
        })
        .collect();
    RoundtripOutcome {
        checked: codebook.len(),
        failures,
    }
}

pub fn verify_roundtrip(params: &CodecParams) -> Result<RoundtripOutcome> {
    Ok(roundtrip_of(&Codebook::enumerate(
        params,
        ExhaustiveBudget::default(),
    )?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct DetectionOutcome {
    pub trials: usize,
    pub detected: usize,
    /// Substitutions changing a class bit that also broke kernel parity or
    /// the leading marker.
    pub kernel_check_failures: usize,
    pub class_flips: usize,
}

/// Every single-base substitution of every codeword, injected through the
/// channel log. A trial is detected when the received word fails the
/// re-encode check.
pub fn substitution_detection(codebook: &Codebook) -> DetectionOutcome {
    let params = codebook.params();
    let mut out = DetectionOutcome::default();
    for y in codebook.words() {
        for (pos, &b) in y.bases().iter().enumerate() {
            for to in Base::ALL.into_iter().filter(|&t| t != b) {
                let log = ErrorLog(vec![ErrorEvent::substitution(pos, b, to)]);
                let received = replay(y, &log).expect("substitution within bounds");
                out.trials += 1;
                if check_block(&received, params).is_err() {
                    out.detected += 1;
                }
                if b.bit_pair().0 != to.bit_pair().0 {
                    out.class_flips += 1;
                    let g = recover_kernel_word(&received);
                    if g.parity() || !g[0] {
                        out.kernel_check_failures += 1;
                    }
                }
            }
        }
    }
    out
}

/// For each shift `i`, the fraction of ordered pairs `(x, y)` whose
/// correlation bit `i` is set.
pub fn correlation_profile(code: &[DnaString]) -> Result<Vec<f64>> {
    let n = metrics::code_length(code)?;
    let total = (code.len() as f64).powi(2);
    Ok((0..n)
        .map(|shift| {
            let mut suffixes: HashMap<&[Base], u64> = HashMap::new();
            for x in code {
                *suffixes.entry(&x.bases()[shift..]).or_default() += 1;
            }
            let hits: u64 = code
                .iter()
                .filter_map(|y| suffixes.get(&y.bases()[..n - shift]))
                .sum();
            hits as f64 / total
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportParams {
    pub n: usize,
    pub l: usize,
    pub mode: MiddleMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub struct BaseHistogram {
    pub a: u64,
    pub c: u64,
    pub g: u64,
    pub t: u64,
}

/// Machine-readable summary of one codebook. Field order is the JSON key
/// order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CodebookReport {
    pub params: ReportParams,
    #[serde(rename = "M")]
    pub m: usize,
    pub min_hamming: usize,
    pub min_rc: usize,
    pub min_rc_distinct: usize,
    pub rc_formula: usize,
    pub rc_equal: bool,
    pub rc_claim_holds: bool,
    pub rc_relation: RcRelation,
    pub gc: GcStats,
    pub roundtrip_failures: usize,
    pub substitutions_detected: DetectionOutcome,
    pub correlation_profile: Vec<f64>,
    pub first_base_histogram: BaseHistogram,
    pub toolkit_version: &'static str,
}

pub fn build_report(params: &CodecParams, budget: ExhaustiveBudget) -> Result<CodebookReport> {
    let book = Codebook::enumerate(params, budget)?;
    let rc = rc_distance_of(&book)?;
    let mut first = BaseHistogram::default();
    for w in book.words() {
        match w.bases()[0] {
            Base::A => first.a += 1,
            Base::C => first.c += 1,
            Base::G => first.g += 1,
            Base::T => first.t += 1,
        }
    }
    Ok(CodebookReport {
        params: ReportParams {
            n: params.n(),
            l: params.l(),
            mode: params.mode(),
        },
        m: book.len(),
        min_hamming: min_hamming_distance(book.words())?,
        min_rc: rc.computed,
        min_rc_distinct: rc.computed_distinct,
        rc_formula: rc.formula,
        rc_equal: rc.equal,
        rc_claim_holds: rc.holds,
        rc_relation: rc.relation,
        gc: gc_stats_of(&book),
        roundtrip_failures: roundtrip_of(&book).failures.len(),
        substitutions_detected: substitution_detection(&book),
        correlation_profile: correlation_profile(book.words())?,
        first_base_histogram: first,
        toolkit_version: env!("CARGO_PKG_VERSION"),
    })
}

/// One report per `(n, mode)`, `n` outermost.
pub fn verify_sweep(
    ns: RangeInclusive<usize>,
    modes: &[MiddleMode],
    budget: ExhaustiveBudget,
) -> Result<Vec<CodebookReport>> {
    let mut out = Vec::new();
    for n in ns {
        for &mode in modes {
            out.push(build_report(&CodecParams::new(n, mode)?, budget)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: usize, mode: MiddleMode) -> CodecParams {
        CodecParams::new(n, mode).unwrap()
    }

    fn d(s: &str) -> DnaString {
        s.parse().unwrap()
    }

    #[test]
    fn codebook_sizes() {
        let five = enumerate_codebook(&p(5, MiddleMode::Eq3), ExhaustiveBudget::default()).unwrap();
        assert_eq!(five.len(), 16);
        let eight =
            enumerate_codebook(&p(8, MiddleMode::Example3), ExhaustiveBudget::default()).unwrap();
        assert_eq!(eight.len(), 128);
        assert!(eight
            .iter()
            .all(|w| w.len() == 8 && matches!(w.bases()[0], Base::T | Base::G)));
        assert!(eight.contains(&d("GGGCATAT")));
        assert_eq!(
            enumerate_codebook(&p(17, MiddleMode::Eq3), ExhaustiveBudget::default()).unwrap_err(),
            VerifyError::BudgetExceeded { n: 17, max: 16 }
        );
    }

    #[test]
    fn formula_arithmetic() {
        assert_eq!(rc_formula(5), 2);
        assert_eq!(rc_formula(8), 4);
        assert_eq!(rc_formula(4), 0);
    }

    #[test]
    fn packed_distance_agrees_with_metrics() {
        let words = ["ACGTACGT", "TTTTAAAA", "GGGCATAT", "CATCGTAC"].map(d);
        for x in &words {
            for y in &words {
                assert_eq!(
                    packed_distance(pack(x), pack(y)) as usize,
                    metrics::hamming(x, y).unwrap()
                );
                assert_eq!(
                    packed_distance(pack_rc(x), pack(y)) as usize,
                    metrics::hamming(&metrics::reverse_complement(x), y).unwrap()
                );
            }
        }
    }

    #[test]
    fn gc_ranges() {
        let s = verify_gc(&p(5, MiddleMode::Eq3)).unwrap();
        assert_eq!((s.min, s.max), (2, 3));
        assert!(s.within_40_60);
        let s = verify_gc(&p(8, MiddleMode::Example3)).unwrap();
        assert_eq!((s.min, s.max), (3, 4));
        assert!(!s.exactly_half);
        assert_eq!(s.histogram.values().sum::<u64>(), 128);
    }

    #[test]
    fn roundtrip_and_detection() {
        let book =
            Codebook::enumerate(&p(8, MiddleMode::Eq3), ExhaustiveBudget::default()).unwrap();
        assert!(roundtrip_of(&book).failures.is_empty());
        let det = substitution_detection(&book);
        assert_eq!(det.trials, 128 * 8 * 3);
        assert_eq!(det.detected, det.trials);
        assert_eq!(det.kernel_check_failures, det.class_flips);
    }

    #[test]
    fn profile_small_sets() {
        assert_eq!(correlation_profile(&[d("GATC")]).unwrap()[0], 1.0);
        assert_eq!(correlation_profile(&[d("AAAA")]).unwrap(), vec![1.0; 4]);
        assert!(correlation_profile(&[d("AAAA"), d("AA")]).is_err());
        assert!(correlation_profile(&[]).is_err());
    }

    #[test]
    fn empty_sweep() {
        #[allow(clippy::reversed_empty_ranges)]
        let r = verify_sweep(6..=5, &MiddleMode::ALL, ExhaustiveBudget::default()).unwrap();
        assert!(r.is_empty());
    }

    #[test]
    fn report_is_reproducible() {
        let a = serde_json::to_string(
            &build_report(&p(6, MiddleMode::Eq3), ExhaustiveBudget::default()).unwrap(),
        )
        .unwrap();
        let b = serde_json::to_string(
            &build_report(&p(6, MiddleMode::Eq3), ExhaustiveBudget::default()).unwrap(),
        )
        .unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with(r#"{"params":{"n":6,"l":5,"mode":"eq3"},"M":32,"min_hamming":"#));
    }
}
