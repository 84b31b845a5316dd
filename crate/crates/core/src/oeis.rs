//! OEIS b-file comparison: fetch (with an on-disk cache), parse, and match
//! computed coefficients against the published terms.

use crate::params::EgfParams;
use crate::series::{CoeffMode, CoeffTable};
use num_bigint::BigInt;
use std::fmt;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;
use std::time::Duration;

#[derive(Debug, thiserror::Error)]
pub enum OeisError {
    #[error("not a sequence id: {0:?} (expected A followed by six digits)")]
    InvalidAnum(String),
    #[error("b-file has no entries")]
    Empty,
    #[error("b-file line {line_no} is malformed: {content:?}")]
    MalformedLine { line_no: usize, content: String },
    #[error("b-file line {line_no}: index jumps from {prev} to {found}")]
    NonContiguousIndex { line_no: usize, prev: i64, found: i64 },
    #[error("fetching {url}: {detail}")]
    Network { url: String, detail: String },
    #[error("{path}: {detail}")]
    Io { path: PathBuf, detail: String },
    #[error("comparison needs exact coefficients; recompute without --digits")]
    NotExactMode,
}

/// A validated OEIS sequence number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SequenceId(u32);

impl SequenceId {
    /// Accepts `A143405`, `a143405`, or bare `143405`.
    pub fn parse(s: &str) -> Result<Self, OeisError> {
        let digits = s.strip_prefix(['A', 'a']).unwrap_or(s);
        if digits.len() == 6 && digits.bytes().all(|b| b.is_ascii_digit()) {
            Ok(SequenceId(digits.parse().unwrap()))
        } else {
            Err(OeisError::InvalidAnum(s.to_string()))
        }
    }

    pub fn number(&self) -> u32 {
        self.0
    }

    /// `b143405.txt`
    pub fn bfile_name(&self) -> String {
        format!("b{:06}.txt", self.0)
    }
}

impl fmt::Display for SequenceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A{:06}", self.0)
    }
}

/// Parsed b-file: consecutive `(index, value)` rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BFile {
    pub anum: SequenceId,
    entries: Vec<(i64, BigInt)>,
}

impl BFile {
    pub fn entries(&self) -> &[(i64, BigInt)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction rejects empty files
    }

    pub fn first_index(&self) -> i64 {
        self.entries[0].0
    }

    pub fn value(&self, index: i64) -> Option<&BigInt> {
        let pos = index.checked_sub(self.first_index())?;
        usize::try_from(pos).ok().and_then(|p| self.entries.get(p)).map(|(_, v)| v)
    }
}

/// Parse b-file text: one `<index> <value>` pair per line, `#` comments and
/// blank lines ignored, indices consecutive.
pub fn parse_bfile(text: &str, anum: SequenceId) -> Result<BFile, OeisError> {
    let mut entries: Vec<(i64, BigInt)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let line_no = i + 1;
        let malformed = || OeisError::MalformedLine {
            line_no,
            content: raw.to_string(),
        };
        let mut parts = line.split_whitespace();
        let (idx, val) = match (parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => return Err(malformed()),
        };
        let idx: i64 = idx.parse().map_err(|_| malformed())?;
        let val: BigInt = val.parse().map_err(|_| malformed())?;
        if let Some(&(prev, _)) = entries.last() {
            if idx != prev + 1 {
                return Err(OeisError::NonContiguousIndex {
                    line_no,
                    prev,
                    found: idx,
                });
            }
        }
        entries.push((idx, val));
    }
    if entries.is_empty() {
        return Err(OeisError::Empty);
    }
    Ok(BFile { anum, entries })
}

pub fn serialize_bfile(bfile: &BFile) -> String {
    let mut out = String::new();
    for (idx, val) in &bfile.entries {
        out.push_str(&idx.to_string());
        out.push(' ');
        out.push_str(&val.to_string());
        out.push('\n');
    }
    out
}

pub const DEFAULT_BASE_URL: &str = "https://oeis.org";

fn cache_path(cache_dir: &Path, anum: &SequenceId) -> PathBuf {
    cache_dir.join("bfiles").join(anum.bfile_name())
}

fn io_err(path: &Path, e: std::io::Error) -> OeisError {
    OeisError::Io {
        path: path.to_path_buf(),
        detail: e.to_string(),
    }
}

fn write_cache(path: &Path, body: &str) -> Result<(), OeisError> {
    let dir = path.parent().expect("cache path has a parent");
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let tmp = dir.join(format!(
        ".{}.tmp-{}",
        path.file_name().unwrap().to_string_lossy(),
        std::process::id()
    ));
    fs::write(&tmp, body).map_err(|e| io_err(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| io_err(path, e))
}

const MAX_BFILE_BYTES: u64 = 1 << 24;

/// Cache-first b-file retrieval. A malformed cache entry falls through to
/// the network; transport failures and 5xx responses are retried once.
pub fn fetch_bfile(
    anum: &SequenceId,
    cache_dir: &Path,
    base_url: &str,
    timeout: Duration,
) -> Result<BFile, OeisError> {
    let path = cache_path(cache_dir, anum);
    if let Ok(text) = fs::read_to_string(&path) {
        if let Ok(parsed) = parse_bfile(&text, *anum) {
            return Ok(parsed);
        }
    }

    let url = format!("{}/{anum}/{}", base_url.trim_end_matches('/'), anum.bfile_name());
    let agent = ureq::AgentBuilder::new().timeout(timeout).build();
    let mut attempt = 0;
    let body = loop {
        attempt += 1;
        match agent.get(&url).call() {
            Ok(resp) => {
                let mut body = String::new();
                resp.into_reader()
                    .take(MAX_BFILE_BYTES)
                    .read_to_string(&mut body)
                    .map_err(|e| OeisError::Network {
                        url: url.clone(),
                        detail: e.to_string(),
                    })?;
                break body;
            }
            Err(ureq::Error::Status(code, _)) if code >= 500 && attempt == 1 => {
                std::thread::sleep(Duration::from_millis(300));
            }
            Err(ureq::Error::Status(code, _)) => {
                return Err(OeisError::Network {
                    url,
                    detail: format!("HTTP {code}"),
                })
            }
            Err(_) if attempt == 1 => {
                std::thread::sleep(Duration::from_millis(300));
            }
            Err(e) => {
                return Err(OeisError::Network {
                    url,
                    detail: e.to_string(),
                })
            }
        }
    };

    let parsed = parse_bfile(&body, *anum)?;
    write_cache(&path, &body)?;
    Ok(parsed)
}

/// First mismatch between computed and published values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    /// b-file index where the values diverge.
    pub index: i64,
    pub expected: String,
    pub got: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparisonReport {
    pub anum: SequenceId,
    /// b-file index aligned with a(0).
    pub aligned_offset: i64,
    /// values requested for comparison
    pub requested: usize,
    /// values actually compared (limited by either side's length)
    pub compared: usize,
    pub matched: usize,
    pub first_mismatch: Option<Mismatch>,
}

impl ComparisonReport {
    pub fn is_clean(&self) -> bool {
        self.first_mismatch.is_none() && self.compared > 0
    }
}

/// Compare a(0)..a(count−1) against b-file entries starting at index
/// `offset`. Coefficients must be exact; a non-integer coefficient can never
/// match and is reported as the mismatch.
pub fn compare_prefix(
    table: &CoeffTable,
    bfile: &BFile,
    count: usize,
    offset: i64,
) -> Result<ComparisonReport, OeisError> {
    if table.mode() != CoeffMode::Exact {
        return Err(OeisError::NotExactMode);
    }
    let values = table.exact_values().expect("exact mode has exact values");
    let mut compared = 0;
    let mut matched = 0;
    let mut first_mismatch = None;
    for (n, a) in values.iter().enumerate().take(count) {
        let index = offset + n as i64;
        let Some(reference) = bfile.value(index) else {
            break;
        };
        compared += 1;
        let ok = a.is_integer() && a.numer() == reference;
        if ok {
            matched += 1;
        } else {
            first_mismatch = Some(Mismatch {
                index,
                expected: reference.to_string(),
                got: a.to_string(),
            });
            break;
        }
    }
    Ok(ComparisonReport {
        anum: bfile.anum,
        aligned_offset: offset,
        requested: count,
        compared,
        matched,
        first_mismatch,
    })
}

/// Built-in parameter table for sequences this library knows how to produce.
pub fn known_sequences() -> &'static [(SequenceId, EgfParams, &'static str)] {
    static TABLE: OnceLock<Vec<(SequenceId, EgfParams, &'static str)>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let data = include_str!("../data/known_sequences.tsv");
        data.lines()
            .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
            .map(|line| {
                let f: Vec<&str> = line.split('\t').collect();
                assert_eq!(f.len(), 7, "bad row in known_sequences.tsv: {line:?}");
                let anum = SequenceId::parse(f[0]).expect("bad anum in known_sequences.tsv");
                let params = EgfParams::from_strs(f[1], f[2], f[3], f[4], f[5])
                    .expect("bad params in known_sequences.tsv");
                (anum, params, f[6])
            })
            .collect()
    })
}

pub fn lookup_params(anum: &SequenceId) -> Option<&'static EgfParams> {
    known_sequences()
        .iter()
        .find(|(id, _, _)| id == anum)
        .map(|(_, p, _)| p)
}
