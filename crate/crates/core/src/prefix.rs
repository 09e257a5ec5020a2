//! Reads the `_summary` block of a library file without reading the body.
//!
//! The scanner is a byte-level state machine that only tracks what it needs
//! to find the end of a top-level value: nesting depth, whether it is inside
//! a string, and whether the previous byte was an escape. Bytes after the end
//! of the summary value are never requested from the reader beyond the block
//! that contained that end.

use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::library::{SummaryBlock, SUMMARY_KEY};
use crate::report::{Code, Finding, ValidationReport};

pub const DEFAULT_BLOCK_SIZE: usize = 4096;
pub const DEFAULT_EXTENSION: &str = "json";

#[derive(Debug, thiserror::Error)]
pub enum PrefixError {
    #[error("first top-level key is `{found}`, not `_summary`")]
    SummaryNotFirst { found: String },
    #[error("file has no `_summary` key")]
    NoSummary,
    #[error("malformed library file at byte {offset}: {reason}")]
    MalformedFile { offset: usize, reason: String },
    #[error("block size must be at least 1")]
    ZeroBlockSize,
    #[error("i/o failure on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl PrefixError {
    fn malformed(offset: usize, reason: impl Into<String>) -> Self {
        PrefixError::MalformedFile { offset, reason: reason.into() }
    }
}

/// Rough per-file summary size the Tier-1 budget is planned around.
pub const DEFAULT_SUMMARY_BUDGET: usize = 200;

/// Ceiling of a quarter of the scalar-value count.
pub fn estimate_tokens(text: &str) -> usize {
    text.chars().count().div_ceil(4)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileEntry {
    pub file_id: String,
    pub path: PathBuf,
    pub byte_size: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FileRegistry {
    pub entries: Vec<FileEntry>,
}

impl FileRegistry {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, file_id: &str) -> Option<&FileEntry> {
        self.entries.iter().find(|e| e.file_id == file_id)
    }
}

/// Lists every `.json` file under `dir`, recursively, sorted by path.
pub fn scan_registry(dir: impl AsRef<Path>) -> Result<FileRegistry, PrefixError> {
    scan_registry_with(dir, DEFAULT_EXTENSION)
}

/// Like [`scan_registry`] with a custom extension (without the dot).
///
/// A file's id is its path relative to `dir`, `/`-separated, with the
/// extension removed.
pub fn scan_registry_with(dir: impl AsRef<Path>, extension: &str) -> Result<FileRegistry, PrefixError> {
    let root = dir.as_ref();
    let mut paths = Vec::new();
    collect_files(root, extension, &mut paths)?;
    paths.sort();
    let mut entries = Vec::with_capacity(paths.len());
    for path in paths {
        let meta = fs::metadata(&path).map_err(|source| PrefixError::Io { path: path.clone(), source })?;
        let rel = path.strip_prefix(root).unwrap_or(&path).with_extension("");
        let file_id = rel
            .components()
            .map(|c| c.as_os_str().to_string_lossy())
            .collect::<Vec<_>>()
            .join("/");
        entries.push(FileEntry { file_id, path, byte_size: meta.len() });
    }
    Ok(FileRegistry { entries })
}

fn collect_files(dir: &Path, extension: &str, out: &mut Vec<PathBuf>) -> Result<(), PrefixError> {
    let io_err = |source| PrefixError::Io { path: dir.to_path_buf(), source };
    for entry in fs::read_dir(dir).map_err(io_err)? {
        let entry = entry.map_err(io_err)?;
        let path = entry.path();
        let kind = entry.file_type().map_err(io_err)?;
        if kind.is_dir() {
            collect_files(&path, extension, out)?;
        } else if path.extension().is_some_and(|e| e == extension) {
            out.push(path);
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReadMode {
    /// The summary must be the first top-level key.
    #[default]
    Strict,
    /// Scan forward past other top-level keys to find the summary.
    Lenient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrefixOptions {
    pub block_size: usize,
    pub mode: ReadMode,
}

impl Default for PrefixOptions {
    fn default() -> Self {
        Self { block_size: DEFAULT_BLOCK_SIZE, mode: ReadMode::Strict }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixReadResult {
    pub summary: SummaryBlock,
    /// Bytes pulled from the reader.
    pub bytes_read: usize,
    /// Offset one past the closing brace of the summary value.
    pub summary_end_offset: usize,
    /// Set in lenient mode when the summary was not the first key.
    pub summary_not_first: bool,
}

impl PrefixReadResult {
    pub fn token_estimate(&self) -> usize {
        estimate_tokens(&self.summary.to_compact_json())
    }
}

pub fn extract_summary(path: impl AsRef<Path>, block_size: usize) -> Result<PrefixReadResult, PrefixError> {
    extract_summary_with(path, PrefixOptions { block_size, ..Default::default() })
}

pub fn extract_summary_with(path: impl AsRef<Path>, opts: PrefixOptions) -> Result<PrefixReadResult, PrefixError> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|source| PrefixError::Io { path: path.to_path_buf(), source })?;
    extract_summary_from_reader(file, opts).map_err(|e| match e {
        PrefixError::Io { source, .. } => PrefixError::Io { path: path.to_path_buf(), source },
        other => other,
    })
}

/// Summary extraction over any byte source.
pub fn extract_summary_from_reader<R: Read>(mut reader: R, opts: PrefixOptions) -> Result<PrefixReadResult, PrefixError> {
    if opts.block_size == 0 {
        return Err(PrefixError::ZeroBlockSize);
    }
    let mut scanner = TopLevelScanner::new(opts.mode);
    let mut block = vec![0u8; opts.block_size];
    loop {
        let n = fill_block(&mut reader, &mut block)?;
        if n == 0 {
            return Err(scanner.eof_error());
        }
        if let Some(found) = scanner.feed(&block[..n])? {
            let summary: SummaryBlock = serde_json::from_slice(&scanner.buf[found.start..found.end])
                .map_err(|e| PrefixError::malformed(found.start, format!("summary block: {e}")))?;
            return Ok(PrefixReadResult {
                summary,
                bytes_read: scanner.buf.len(),
                summary_end_offset: found.end,
                summary_not_first: found.not_first,
            });
        }
    }
}

fn fill_block<R: Read>(reader: &mut R, block: &mut [u8]) -> Result<usize, PrefixError> {
    let mut filled = 0;
    while filled < block.len() {
        match reader.read(&mut block[filled..]) {
            Ok(0) => break,
            Ok(n) => filled += n,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
            Err(source) => return Err(PrefixError::Io { path: PathBuf::new(), source }),
        }
    }
    Ok(filled)
}

/// Summaries of every registry file, ordered by file id. Extraction runs in
/// parallel.
pub fn extract_registry(
    registry: &FileRegistry,
    opts: PrefixOptions,
) -> Vec<(String, Result<PrefixReadResult, PrefixError>)> {
    let mut out: Vec<_> = registry
        .entries
        .par_iter()
        .map(|e| (e.file_id.clone(), extract_summary_with(&e.path, opts)))
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// WARNING for each `(file_id, tokens)` over `per_file`, then an INFO line
/// with the total. Overruns are reported, never clamped.
pub fn budget_report(estimates: &[(String, usize)], per_file: usize) -> ValidationReport {
    let mut report = ValidationReport::default();
    for (id, tokens) in estimates {
        if *tokens > per_file {
            report.push(Finding::warning(
                Code::TokenBudget,
                format!("summary of `{id}` is ~{tokens} tokens, over the {per_file}-token budget"),
            ));
        }
    }
    let total: usize = estimates.iter().map(|e| e.1).sum();
    report.push(Finding::info(Code::TokenBudget, format!("{} summaries, ~{total} tokens in total", estimates.len())));
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    ExpectObject,
    ExpectKeyOrClose,
    ExpectKey,
    InKey,
    ExpectColon,
    ExpectValue,
    InNested,
    InStringValue,
    InScalar,
    AfterValue,
    Done,
}

struct Found {
    start: usize,
    end: usize,
    not_first: bool,
}

struct TopLevelScanner {
    mode: ReadMode,
    state: State,
    buf: Vec<u8>,
    depth: usize,
    in_string: bool,
    escaped: bool,
    key_start: usize,
    value_start: usize,
    key_is_summary: bool,
    keys_seen: usize,
}

impl TopLevelScanner {
    fn new(mode: ReadMode) -> Self {
        Self {
            mode,
            state: State::ExpectObject,
            buf: Vec::new(),
            depth: 0,
            in_string: false,
            escaped: false,
            key_start: 0,
            value_start: 0,
            key_is_summary: false,
            keys_seen: 0,
        }
    }

    fn eof_error(&self) -> PrefixError {
        match self.state {
            State::Done => PrefixError::NoSummary,
            _ if self.buf.is_empty() => PrefixError::malformed(0, "empty file"),
            _ => PrefixError::malformed(self.buf.len(), "unexpected end of input"),
        }
    }

    fn feed(&mut self, chunk: &[u8]) -> Result<Option<Found>, PrefixError> {
        let base = self.buf.len();
        self.buf.extend_from_slice(chunk);
        let mut i = base;
        while i < self.buf.len() {
            let b = self.buf[i];
            match self.state {
                State::ExpectObject => match b {
                    b'{' => self.state = State::ExpectKeyOrClose,
                    // A UTF-8 byte-order mark may precede the object.
                    0xEF | 0xBB | 0xBF if i < 3 => {}
                    _ if b.is_ascii_whitespace() => {}
                    _ => return Err(PrefixError::malformed(i, "top level is not an object")),
                },
                State::ExpectKeyOrClose | State::ExpectKey => match b {
                    b'"' => {
                        self.key_start = i;
                        self.escaped = false;
                        self.state = State::InKey;
                    }
                    b'}' if self.state == State::ExpectKeyOrClose => {
                        self.state = State::Done;
                        return Err(PrefixError::NoSummary);
                    }
                    _ if b.is_ascii_whitespace() => {}
                    _ => return Err(PrefixError::malformed(i, "expected an object key")),
                },
                State::InKey => {
                    if self.escaped {
                        self.escaped = false;
                    } else if b == b'\\' {
                        self.escaped = true;
                    } else if b == b'"' {
                        let key: String = serde_json::from_slice(&self.buf[self.key_start..=i])
                            .map_err(|e| PrefixError::malformed(self.key_start, format!("bad key: {e}")))?;
                        self.keys_seen += 1;
                        self.key_is_summary = key == SUMMARY_KEY;
                        if !self.key_is_summary && self.keys_seen == 1 && self.mode == ReadMode::Strict {
                            return Err(PrefixError::SummaryNotFirst { found: key });
                        }
                        self.state = State::ExpectColon;
                    }
                }
                State::ExpectColon => match b {
                    b':' => self.state = State::ExpectValue,
                    _ if b.is_ascii_whitespace() => {}
                    _ => return Err(PrefixError::malformed(i, "expected `:`")),
                },
                State::ExpectValue => {
                    self.value_start = i;
                    match b {
                        b'{' | b'[' => {
                            self.depth = 1;
                            self.in_string = false;
                            self.escaped = false;
                            self.state = State::InNested;
                        }
                        b'"' => {
                            self.escaped = false;
                            self.state = State::InStringValue;
                        }
                        _ if b.is_ascii_whitespace() => {}
                        b'-' | b'0'..=b'9' | b't' | b'f' | b'n' => self.state = State::InScalar,
                        _ => return Err(PrefixError::malformed(i, "expected a value")),
                    }
                }
                State::InNested => {
                    if self.in_string {
                        if self.escaped {
                            self.escaped = false;
                        } else if b == b'\\' {
                            self.escaped = true;
                        } else if b == b'"' {
                            self.in_string = false;
                        }
                    } else {
                        match b {
                            b'"' => self.in_string = true,
                            b'{' | b'[' => self.depth += 1,
                            b'}' | b']' => {
                                self.depth -= 1;
                                if self.depth == 0 {
                                    if let Some(found) = self.value_done(i + 1) {
                                        return Ok(Some(found));
                                    }
                                }
                            }
                            _ => {}
                        }
                    }
                }
                State::InStringValue => {
                    if self.escaped {
                        self.escaped = false;
                    } else if b == b'\\' {
                        self.escaped = true;
                    } else if b == b'"' {
                        if let Some(found) = self.value_done(i + 1) {
                            return Ok(Some(found));
                        }
                    }
                }
                State::InScalar => {
                    if b == b',' || b == b'}' || b.is_ascii_whitespace() {
                        if let Some(found) = self.value_done(i) {
                            return Ok(Some(found));
                        }
                        // Re-examine this byte as the separator.
                        continue;
                    }
                }
                State::AfterValue => match b {
                    b',' => self.state = State::ExpectKey,
                    b'}' => {
                        self.state = State::Done;
                        return Err(PrefixError::NoSummary);
                    }
                    _ if b.is_ascii_whitespace() => {}
                    _ => return Err(PrefixError::malformed(i, "expected `,` or `}`")),
                },
                State::Done => {}
            }
            i += 1;
        }
        Ok(None)
    }

    fn value_done(&mut self, end: usize) -> Option<Found> {
        self.state = State::AfterValue;
        if self.key_is_summary {
            Some(Found { start: self.value_start, end, not_first: self.keys_seen > 1 })
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(text: &str, block: usize, mode: ReadMode) -> Result<PrefixReadResult, PrefixError> {
        extract_summary_from_reader(text.as_bytes(), PrefixOptions { block_size: block, mode })
    }

    const WITH_SUMMARY: &str = r#"{ "_summary": {"category_index": [{"name": "A}\"{", "skill_count": 1, "routing_hint": "brace } in [string"}], "_llm_instructions": "x", "routing_roles": {}}, "High_Impact_Skills_Library": {"A}\"{": {"category_description": "d", "skills": [{"skill_name": "s"}]}}}"#;

    #[test]
    fn estimate_tokens_is_ceiling_quarter_of_scalars() {
        assert_eq!(estimate_tokens(""), 0);
        assert_eq!(estimate_tokens("abcd"), 1);
        assert_eq!(estimate_tokens("abcde"), 2);
        assert_eq!(estimate_tokens(&"é".repeat(800)), 200);
    }

    #[test]
    fn strings_with_braces_do_not_confuse_depth() {
        for block in [1, 2, 7, 64, 4096] {
            let r = read(WITH_SUMMARY, block, ReadMode::Strict).unwrap();
            assert_eq!(r.summary.category_index[0].name, "A}\"{");
            assert_eq!(&WITH_SUMMARY[r.summary_end_offset - 1..r.summary_end_offset], "}");
            assert!(r.bytes_read <= r.summary_end_offset + block);
        }
    }

    #[test]
    fn first_key_must_be_summary_in_strict_mode() {
        let text = r#"{"High_Impact_Skills_Library": {}, "_summary": {"category_index": []}}"#;
        assert!(matches!(read(text, 16, ReadMode::Strict), Err(PrefixError::SummaryNotFirst { .. })));
        let lenient = read(text, 16, ReadMode::Lenient).unwrap();
        assert!(lenient.summary_not_first);
        assert!(lenient.summary.category_index.is_empty());
    }

    #[test]
    fn lenient_skips_scalars_and_reports_missing_summary() {
        let text = r#"{"version": 3, "flag": true, "name": "x", "_summary": {"category_index": []}}"#;
        assert!(read(text, 5, ReadMode::Lenient).unwrap().summary_not_first);
        assert!(matches!(read(r#"{"a": [1, {"b": "}"}]}"#, 3, ReadMode::Lenient), Err(PrefixError::NoSummary)));
        assert!(matches!(read("{ }", 3, ReadMode::Strict), Err(PrefixError::NoSummary)));
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(read("", 4096, ReadMode::Strict), Err(PrefixError::MalformedFile { .. })));
        assert!(matches!(read("[1,2]", 4096, ReadMode::Strict), Err(PrefixError::MalformedFile { .. })));
        assert!(matches!(read(r#"{"_summary": {"category_index": ["#, 4, ReadMode::Strict), Err(PrefixError::MalformedFile { .. })));
        assert!(matches!(read(r#"{"_summary": 12}"#, 4, ReadMode::Strict), Err(PrefixError::MalformedFile { .. })));
        assert!(matches!(read("{}", 0, ReadMode::Strict), Err(PrefixError::ZeroBlockSize)));
    }

    #[test]
    fn escaped_summary_key_is_recognized() {
        let text = r#"{"\u005fsummary": {"category_index": []}}"#;
        assert!(read(text, 4, ReadMode::Strict).is_ok());
    }
}
