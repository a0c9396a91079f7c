//! Command-line front end.
//!
//! Exit codes: 0 success, 2 bad arguments, 3 I/O failure, 4 manifest
//! mismatch (including a missing manifest), 5 corrupted blocks.

use std::fs;
use std::io::{self, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::channel::{self, ErrorEvent, ErrorSpec};
use crate::codec::{self, CodecParams, Manifest, MiddleMode, StreamError};
use crate::dna::DnaString;
use crate::fasta::{self, BlockHeader, FastaEntry, FastaRecord};
use crate::metrics;
use crate::verify::{self, Codebook, ExhaustiveBudget};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("{0}")]
    Input(String),
    #[error("manifest mismatch: {0}")]
    Manifest(String),
    #[error("corrupted blocks: {}", join(.0))]
    Corrupted(Vec<usize>),
}

fn join(v: &[usize]) -> String {
    v.iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io { .. } | CliError::Input(_) => 3,
            CliError::Manifest(_) => 4,
            CliError::Corrupted(_) => 5,
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "kernel-dna",
    version,
    about = "Kernel-code DNA storage codec and verifier"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Encode a file into FASTA codewords plus a JSON manifest
    Encode(EncodeArgs),
    /// Decode FASTA codewords back into the original file
    Decode(DecodeArgs),
    /// Write the full codebook for one codeword length
    Codebook(CodebookArgs),
    /// Exhaustively check distance, GC and roundtrip properties
    Verify(VerifyArgs),
    /// Report GC-content, correlation, tandem repeats and RC distances
    Analyze(AnalyzeArgs),
    /// Pass FASTA records through the seeded error channel
    Corrupt(CorruptArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Eq3,
    Example3,
}

impl From<ModeArg> for MiddleMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Eq3 => MiddleMode::Eq3,
            ModeArg::Example3 => MiddleMode::Example3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeSelection {
    Eq3,
    Example3,
    Both,
}

impl ModeSelection {
    fn modes(self) -> Vec<MiddleMode> {
        match self {
            ModeSelection::Eq3 => vec![MiddleMode::Eq3],
            ModeSelection::Example3 => vec![MiddleMode::Example3],
            ModeSelection::Both => MiddleMode::ALL.to_vec(),
        }
    }
}

#[derive(Args, Debug)]
pub struct EncodeArgs {
    /// Codeword length in bases (4..=64)
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value = "eq3")]
    pub mode: ModeArg,
    #[arg(long = "in")]
    pub input: PathBuf,
    /// FASTA output; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub manifest: PathBuf,
}

#[derive(Args, Debug)]
pub struct DecodeArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Decoded bytes; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CodebookArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value = "eq3")]
    pub mode: ModeArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Largest n allowed for exhaustive enumeration
    #[arg(long, default_value_t = verify::DEFAULT_EXHAUSTIVE_MAX_N)]
    pub max_n: usize,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Inclusive range such as `5..10`, or a single length
    #[arg(long, value_parser = parse_range)]
    pub n_range: RangeInclusive<usize>,
    #[arg(long, value_enum, default_value = "both")]
    pub mode: ModeSelection,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = verify::DEFAULT_EXHAUSTIVE_MAX_N)]
    pub max_n: usize,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Comma-separated subset of gc,correlation,tandem,rc
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "gc,correlation,tandem,rc"
    )]
    pub metrics: Vec<MetricArg>,
    #[arg(long, default_value_t = metrics::DEFAULT_MAX_TANDEM_UNIT)]
    pub max_unit: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    Gc,
    Correlation,
    Tandem,
    Rc,
}

#[derive(Args, Debug)]
pub struct CorruptArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Substitution probability per base (default is a placeholder, not a measured rate)
    #[arg(long, default_value_t = channel::DEFAULT_RATE)]
    pub sub: f64,
    /// Insertion probability per base (placeholder default)
    #[arg(long, default_value_t = channel::DEFAULT_RATE)]
    pub ins: f64,
    /// Deletion probability per base (placeholder default)
    #[arg(long, default_value_t = channel::DEFAULT_RATE)]
    pub del: f64,
    /// Tandem duplication probability per record (placeholder default)
    #[arg(long, default_value_t = channel::DEFAULT_RATE)]
    pub tandem: f64,
    #[arg(long, default_value_t = metrics::DEFAULT_MAX_TANDEM_UNIT)]
    pub max_tandem_unit: usize,
    /// Required; record i uses seed ^ i
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON-lines error log
    #[arg(long)]
    pub log: Option<PathBuf>,
}

fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let (lo, hi) = match s.split_once("..") {
        Some((lo, hi)) => (lo, hi.strip_prefix('=').unwrap_or(hi)),
        None => (s, s),
    };
    let lo: usize = lo
        .trim()
        .parse()
        .map_err(|_| format!("bad range start in {s:?}"))?;
    let hi: usize = hi
        .trim()
        .parse()
        .map_err(|_| format!("bad range end in {s:?}"))?;
    Ok(lo..=hi)
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write_path(path: &Path, data: &[u8]) -> Result<(), CliError> {
    fs::write(path, data).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Writes to `out`, or stdout when absent.
fn emit(out: Option<&Path>, data: &[u8]) -> Result<(), CliError> {
    match out {
        Some(p) => write_path(p, data),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(data)
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s.into_bytes()
}

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Encode(a) => cmd_encode(&a),
        Command::Decode(a) => cmd_decode(&a),
        Command::Codebook(a) => cmd_codebook(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Analyze(a) => cmd_analyze(&a),
        Command::Corrupt(a) => cmd_corrupt(&a),
    }
}

pub fn cmd_encode(a: &EncodeArgs) -> Result<(), CliError> {
    let params = CodecParams::new(a.n, a.mode.into()).map_err(usage)?;
    let file = fs::File::open(&a.input).map_err(|source| CliError::Io {
        path: a.input.display().to_string(),
        source,
    })?;
    let (words, manifest) =
        codec::encode_stream(io::BufReader::new(file), &params).map_err(|e| match e {
            StreamError::Io { offset, source } => CliError::Io {
                path: format!("{} (byte {offset})", a.input.display()),
                source,
            },
            other => usage(other),
        })?;
    let records: Vec<FastaRecord> = words
        .into_iter()
        .enumerate()
        .map(|(index, sequence)| FastaRecord {
            header: BlockHeader {
                index,
                n: params.n(),
                mode: params.mode(),
            },
            sequence,
        })
        .collect();
    write_path(&a.manifest, &to_json(&manifest))?;
    emit(a.out.as_deref(), fasta::write_records(&records).as_bytes())?;
    eprintln!(
        "encoded {} bits into {} blocks (n={}, mode={})",
        manifest.total_bits, manifest.block_count, manifest.n, manifest.middle_mode
    );
    Ok(())
}

fn load_manifest(path: Option<&Path>) -> Result<Manifest, CliError> {
    let path = path.ok_or_else(|| CliError::Manifest("no manifest given (--manifest)".into()))?;
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Manifest(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Manifest(format!("{}: {e}", path.display())))
}

pub fn cmd_decode(a: &DecodeArgs) -> Result<(), CliError> {
    let manifest = load_manifest(a.manifest.as_deref())?;
    let params = manifest
        .params()
        .map_err(|e| CliError::Manifest(e.to_string()))?;
    let entries =
        fasta::parse_fasta(&read_text(&a.input)?).map_err(|e| CliError::Input(e.to_string()))?;
    if entries.len() as u64 != manifest.block_count {
        return Err(CliError::Manifest(format!(
            "manifest lists {} blocks, FASTA has {} records",
            manifest.block_count,
            entries.len()
        )));
    }

    let mut slots: Vec<Option<DnaString>> = vec![None; entries.len()];
    let mut bad_alphabet = Vec::new();
    for (pos, entry) in entries.iter().enumerate() {
        let header: BlockHeader = entry
            .header
            .parse()
            .map_err(|e: fasta::FastaError| CliError::Manifest(format!("record {pos}: {e}")))?;
        if header.n != params.n() || header.mode != params.mode() {
            return Err(CliError::Manifest(format!(
                "record {pos} is n={} mode={}, manifest says n={} mode={}",
                header.n,
                header.mode,
                params.n(),
                params.mode()
            )));
        }
        let slot = slots.get_mut(header.index).ok_or_else(|| {
            CliError::Manifest(format!("block index {} out of range", header.index))
        })?;
        if slot.is_some() {
            return Err(CliError::Manifest(format!(
                "block {} appears twice",
                header.index
            )));
        }
        *slot = Some(match entry.dna(header.index) {
            Ok(seq) => seq,
            Err(_) => {
                bad_alphabet.push(header.index);
                DnaString::default()
            }
        });
    }
    // every slot is filled: indices are distinct and in range, and counts match
    let words: Vec<DnaString> = slots.into_iter().map(Option::unwrap_or_default).collect();

    match codec::decode_stream(&words, &manifest) {
        Ok(bytes) => {
            emit(a.out.as_deref(), &bytes)?;
            eprintln!("decoded {} blocks, {} bytes", words.len(), bytes.len());
            Ok(())
        }
        Err(StreamError::Corrupted(errs)) => {
            for e in &errs {
                eprintln!("block {}: {}", e.block, e.fault);
            }
            let mut blocks: Vec<usize> = errs.iter().map(|e| e.block).collect();
            blocks.extend(bad_alphabet);
            blocks.sort_unstable();
            blocks.dedup();
            Err(CliError::Corrupted(blocks))
        }
        Err(StreamError::Manifest(m)) => Err(CliError::Manifest(m)),
        Err(other) => Err(CliError::Input(other.to_string())),
    }
}

#[derive(Serialize)]
struct CodebookEntry {
    info: String,
    dna: DnaString,
}

#[derive(Serialize)]
struct CodebookOut {
    params: verify::ReportParams,
    #[serde(rename = "M")]
    m: usize,
    codewords: Vec<CodebookEntry>,
}

pub fn cmd_codebook(a: &CodebookArgs) -> Result<(), CliError> {
    let params = CodecParams::new(a.n, a.mode.into()).map_err(usage)?;
    let book = Codebook::enumerate(&params, ExhaustiveBudget(a.max_n)).map_err(usage)?;
    let out = CodebookOut {
        params: verify::ReportParams {
            n: params.n(),
            l: params.l(),
            mode: params.mode(),
        },
        m: book.len(),
        codewords: book
            .words()
            .iter()
            .enumerate()
            .map(|(i, w)| CodebookEntry {
                info: book.info(i).to_string(),
                dna: w.clone(),
            })
            .collect(),
    };
    emit(a.out.as_deref(), &to_json(&out))
}

pub fn cmd_verify(a: &VerifyArgs) -> Result<(), CliError> {
    if a.n_range.start() > a.n_range.end() {
        return Err(CliError::Usage(format!(
            "empty n range {}..{}",
            a.n_range.start(),
            a.n_range.end()
        )));
    }
    let reports = verify::verify_sweep(
        a.n_range.clone(),
        &a.mode.modes(),
        ExhaustiveBudget(a.max_n),
    )
    .map_err(usage)?;
    for r in &reports {
        eprintln!(
            "n={:>2} mode={:<8} M={:<6} d_H={} d_rc={} formula={} ({:?}) gc=[{}, {}] roundtrip_failures={}",
            r.params.n,
            r.params.mode,
            r.m,
            r.min_hamming,
            r.min_rc,
            r.rc_formula,
            r.rc_relation,
            r.gc.min,
            r.gc.max,
            r.roundtrip_failures
        );
    }
    emit(a.out.as_deref(), &to_json(&reports))
}

#[derive(Serialize, Default)]
struct RecordAnalysis {
    id: String,
    length: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    gc_weight: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gc_percent: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    self_rc_distance: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tandem_repeats: Option<Vec<metrics::TandemRepeat>>,
}

#[derive(Serialize, Default)]
struct SetAnalysis {
    #[serde(skip_serializing_if = "Option::is_none")]
    min_rc: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    correlation_profile: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    notes: Vec<String>,
}

#[derive(Serialize)]
struct Analysis {
    records: Vec<RecordAnalysis>,
    set: SetAnalysis,
}

pub fn cmd_analyze(a: &AnalyzeArgs) -> Result<(), CliError> {
    let entries =
        fasta::parse_fasta(&read_text(&a.input)?).map_err(|e| CliError::Input(e.to_string()))?;
    let seqs = entries
        .iter()
        .enumerate()
        .map(|(i, e)| e.dna(i))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Input(e.to_string()))?;
    let want = |m: MetricArg| a.metrics.contains(&m);

    let records = entries
        .iter()
        .zip(&seqs)
        .map(|(e, s)| RecordAnalysis {
            id: e.header.clone(),
            length: s.len(),
            gc_weight: want(MetricArg::Gc).then(|| metrics::gc_weight(s)),
            gc_percent: want(MetricArg::Gc).then(|| metrics::gc_content(s)),
            self_rc_distance: want(MetricArg::Rc).then(|| metrics::self_rc_distance(s)),
            tandem_repeats: want(MetricArg::Tandem)
                .then(|| metrics::find_tandem_repeats(s, a.max_unit)),
        })
        .collect();

    let mut set = SetAnalysis::default();
    if want(MetricArg::Rc) || want(MetricArg::Correlation) {
        match metrics::code_length(&seqs) {
            Ok(_) => {
                if want(MetricArg::Rc) {
                    set.min_rc = verify::min_rc_distance(&seqs, metrics::SelfPairs::Include).ok();
                }
                if want(MetricArg::Correlation) {
                    set.correlation_profile = verify::correlation_profile(&seqs).ok();
                }
            }
            Err(e) => set.notes.push(format!("set metrics skipped: {e}")),
        }
    }
    emit(a.out.as_deref(), &to_json(&Analysis { records, set }))
}

#[derive(Serialize)]
struct LoggedEvent<'a> {
    record: usize,
    #[serde(flatten)]
    event: &'a ErrorEvent,
}

pub fn cmd_corrupt(a: &CorruptArgs) -> Result<(), CliError> {
    let spec = ErrorSpec {
        sub_rate: a.sub,
        ins_rate: a.ins,
        del_rate: a.del,
        tandem_rate: a.tandem,
        max_tandem_unit: a.max_tandem_unit,
        seed: a.seed,
    };
    spec.validate().map_err(usage)?;
    let entries =
        fasta::parse_fasta(&read_text(&a.input)?).map_err(|e| CliError::Input(e.to_string()))?;
    let mut out = Vec::with_capacity(entries.len());
    let mut log = String::new();
    let mut events = 0usize;
    for (i, entry) in entries.iter().enumerate() {
        let seq = entry.dna(i).map_err(|e| CliError::Input(e.to_string()))?;
        let (noisy, elog) = channel::corrupt(&seq, &spec.for_word(i as u64)).map_err(usage)?;
        for event in elog.events() {
            let line = LoggedEvent { record: i, event };
            log.push_str(&serde_json::to_string(&line).expect("serializable"));
            log.push('\n');
        }
        events += elog.events().len();
        out.push(FastaEntry::new(entry.header.clone(), noisy.to_string()));
    }
    if let Some(path) = &a.log {
        write_path(path, log.as_bytes())?;
    }
    emit(a.out.as_deref(), fasta::write_fasta(&out).as_bytes())?;
    eprintln!(
        "{} records, {} events (prng {})",
        entries.len(),
        events,
        channel::PRNG_NAME
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_parsing() {
        assert_eq!(parse_range("5..10"), Ok(5..=10));
        assert_eq!(parse_range("5..=7"), Ok(5..=7));
        assert_eq!(parse_range("8"), Ok(8..=8));
        assert!(parse_range("a..3").is_err());
    }

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Usage(String::new()).exit_code(), 2);
        assert_eq!(CliError::Manifest(String::new()).exit_code(), 4);
        assert_eq!(CliError::Corrupted(vec![1, 2]).exit_code(), 5);
        assert_eq!(
            CliError::Corrupted(vec![1, 2]).to_string(),
            "corrupted blocks: 1, 2"
        );
    }
}
