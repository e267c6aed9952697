//! Data model for transcribed text lines, the newline-delimited JSON manifest
//! format, and corpus-level statistics.
//!
//! Every text that enters the crate through [`parse_manifest`] is normalized
//! with [`normalize_text`]: canonical composition (NFC), outer whitespace
//! trimmed, inner whitespace runs collapsed to one space.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};

/// Where a transcription came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SourceKind {
    Human,
    AutoPylaia,
    AutoDan,
    AggregateRover,
    AggregateRasa,
}

impl SourceKind {
    pub const ALL: [SourceKind; 5] = [
        SourceKind::Human,
        SourceKind::AutoPylaia,
        SourceKind::AutoDan,
        SourceKind::AggregateRover,
        SourceKind::AggregateRasa,
    ];

    /// The manifest tag, e.g. `auto:pylaia`.
    pub fn tag(self) -> &'static str {
        match self {
            SourceKind::Human => "human",
            SourceKind::AutoPylaia => "auto:pylaia",
            SourceKind::AutoDan => "auto:dan",
            SourceKind::AggregateRover => "aggregate:rover",
            SourceKind::AggregateRasa => "aggregate:rasa",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        SourceKind::ALL.into_iter().find(|k| k.tag() == tag)
    }

    pub fn is_human(self) -> bool {
        self == SourceKind::Human
    }

    pub fn is_automatic(self) -> bool {
        matches!(self, SourceKind::AutoPylaia | SourceKind::AutoDan)
    }

    pub fn is_aggregate(self) -> bool {
        matches!(self, SourceKind::AggregateRover | SourceKind::AggregateRasa)
    }

    /// Position in the canonical merge order: humans, then PyLaia, then DAN.
    /// Aggregates sort last and are never part of the canonical inputs.
    fn canonical_rank(self) -> u8 {
        match self {
            SourceKind::Human => 0,
            SourceKind::AutoPylaia => 1,
            SourceKind::AutoDan => 2,
            SourceKind::AggregateRasa => 3,
            SourceKind::AggregateRover => 4,
        }
    }
}

impl fmt::Display for SourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Source tag plus, for human transcriptions only, an opaque annotator id.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TranscriptionSource {
    kind: SourceKind,
    annotator: Option<String>,
}

impl TranscriptionSource {
    pub fn new(kind: SourceKind) -> Self {
        TranscriptionSource {
            kind,
            annotator: None,
        }
    }

    pub fn human(annotator: Option<String>) -> Self {
        TranscriptionSource {
            kind: SourceKind::Human,
            annotator,
        }
    }

    pub fn kind(&self) -> SourceKind {
        self.kind
    }

    pub fn annotator(&self) -> Option<&str> {
        self.annotator.as_deref()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Transcription {
    pub text: String,
    pub source: TranscriptionSource,
    pub uncertain: bool,
}

impl Transcription {
    pub fn new(text: impl Into<String>, source: TranscriptionSource) -> Self {
        Transcription {
            text: text.into(),
            source,
            uncertain: false,
        }
    }

    pub fn kind(&self) -> SourceKind {
        self.source.kind
    }
}

/// Train / validation / test label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Validation, Split::Test];

    /// Manifest and file-name tag: `train`, `val`, `test`.
    pub fn tag(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validation => "val",
            Split::Test => "test",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Split::ALL.into_iter().find(|s| s.tag() == tag)
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "Train",
            Split::Validation => "Validation",
            Split::Test => "Test",
        })
    }
}

/// One text-line image with all of its candidate transcriptions.
#[derive(Clone, Debug, PartialEq)]
pub struct TranscribedLine {
    pub line_id: String,
    pub image_ref: String,
    pub page_id: Option<String>,
    pub transcriptions: Vec<Transcription>,
    pub split: Option<Split>,
    pub agreement: Option<f64>,
}

impl TranscribedLine {
    pub fn new(
        line_id: impl Into<String>,
        image_ref: impl Into<String>,
        transcriptions: Vec<Transcription>,
    ) -> Self {
        TranscribedLine {
            line_id: line_id.into(),
            image_ref: image_ref.into(),
            page_id: None,
            transcriptions,
            split: None,
            agreement: None,
        }
    }

    pub fn count_of(&self, kind: SourceKind) -> usize {
        self.transcriptions.iter().filter(|t| t.kind() == kind).count()
    }

    pub fn human_count(&self) -> usize {
        self.count_of(SourceKind::Human)
    }

    pub fn humans(&self) -> impl Iterator<Item = &Transcription> {
        self.transcriptions.iter().filter(|t| t.kind().is_human())
    }

    /// Human and automatic transcriptions in canonical order (humans in
    /// manifest order, then PyLaia, then DAN). Aggregates are excluded.
    pub fn canonical(&self) -> Vec<&Transcription> {
        let mut out: Vec<&Transcription> = self
            .transcriptions
            .iter()
            .filter(|t| !t.kind().is_aggregate())
            .collect();
        // stable: keeps manifest order within a source kind
        out.sort_by_key(|t| t.kind().canonical_rank());
        out
    }

    pub fn canonical_texts(&self) -> Vec<&str> {
        self.canonical().into_iter().map(|t| t.text.as_str()).collect()
    }

    pub fn first_of(&self, kind: SourceKind) -> Option<&Transcription> {
        self.transcriptions.iter().find(|t| t.kind() == kind)
    }

    /// Replaces any existing transcription of `kind` with a single new one.
    pub fn set_aggregate(&mut self, kind: SourceKind, text: String) {
        debug_assert!(kind.is_aggregate());
        self.transcriptions.retain(|t| t.kind() != kind);
        self.transcriptions
            .push(Transcription::new(text, TranscriptionSource::new(kind)));
    }
}

/// Where a corpus was loaded from. Not serialized into manifests.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Provenance {
    pub source: Option<PathBuf>,
    pub ingested_at_unix: Option<u64>,
    /// Blank transcriptions discarded while parsing.
    pub dropped_blank: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Corpus {
    pub lines: Vec<TranscribedLine>,
    pub provenance: Provenance,
}

impl Corpus {
    pub fn new(lines: Vec<TranscribedLine>) -> Self {
        Corpus {
            lines,
            provenance: Provenance::default(),
        }
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }
}

/// NFC, trim, and collapse internal whitespace runs to a single space.
pub fn normalize_text(text: &str) -> String {
    let composed: String = text.nfc().collect();
    composed.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[derive(Debug, Serialize, Deserialize)]
struct RawTranscription {
    text: String,
    source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    annotator: Option<String>,
    #[serde(default, skip_serializing_if = "is_false")]
    uncertain: bool,
}

#[derive(Debug, Serialize, Deserialize)]
struct RawRecord {
    line_id: String,
    image: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    page_id: Option<String>,
    transcriptions: Vec<RawTranscription>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    split: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    agreement: Option<f64>,
}

fn is_false(b: &bool) -> bool {
    !*b
}

impl RawRecord {
    fn into_line(self, line: usize, dropped_blank: &mut usize) -> Result<TranscribedLine> {
        let line_id = self.line_id;
        let mut transcriptions = Vec::with_capacity(self.transcriptions.len());
        for raw in self.transcriptions {
            let kind = SourceKind::from_tag(&raw.source).ok_or_else(|| Error::UnknownSource {
                line,
                line_id: line_id.clone(),
                tag: raw.source.clone(),
            })?;
            if raw.annotator.is_some() && !kind.is_human() {
                return Err(Error::AnnotatorOnAutomatic {
                    line,
                    line_id,
                    tag: raw.source,
                });
            }
            let text = normalize_text(&raw.text);
            if text.is_empty() {
                *dropped_blank += 1;
                continue;
            }
            transcriptions.push(Transcription {
                text,
                source: TranscriptionSource {
                    kind,
                    annotator: raw.annotator,
                },
                uncertain: raw.uncertain,
            });
        }
        if transcriptions.is_empty() {
            return Err(Error::EmptyTranscriptions { line, line_id });
        }
        let split = match self.split {
            None => None,
            Some(tag) => Some(Split::from_tag(&tag).ok_or_else(|| Error::UnknownSplit {
                line,
                line_id: line_id.clone(),
                split: tag,
            })?),
        };
        if let Some(value) = self.agreement {
            if !(0.0..=100.0).contains(&value) {
                return Err(Error::AgreementOutOfRange {
                    line,
                    line_id,
                    value,
                });
            }
        }
        Ok(TranscribedLine {
            line_id,
            image_ref: self.image,
            page_id: self.page_id,
            transcriptions,
            split,
            agreement: self.agreement,
        })
    }

    fn from_line(line: &TranscribedLine) -> Self {
        RawRecord {
            line_id: line.line_id.clone(),
            image: line.image_ref.clone(),
            page_id: line.page_id.clone(),
            transcriptions: line
                .transcriptions
                .iter()
                .map(|t| RawTranscription {
                    text: t.text.clone(),
                    source: t.kind().tag().to_string(),
                    annotator: t.source.annotator.clone(),
                    uncertain: t.uncertain,
                })
                .collect(),
            split: line.split.map(|s| s.tag().to_string()),
            agreement: line.agreement,
        }
    }
}

/// Parses a manifest from any buffered reader. Whitespace-only lines are
/// skipped; line numbers in errors are 1-based physical lines.
pub fn parse_manifest_from<R: BufRead>(reader: R) -> Result<Corpus> {
    let mut lines = Vec::new();
    let mut seen = HashSet::new();
    let mut dropped_blank = 0;
    for (idx, row) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let row = row.map_err(|e| Error::MalformedJson {
            line: lineno,
            message: e.to_string(),
        })?;
        if row.trim().is_empty() {
            continue;
        }
        let raw: RawRecord = serde_json::from_str(&row).map_err(|e| Error::MalformedJson {
            line: lineno,
            message: e.to_string(),
        })?;
        let record = raw.into_line(lineno, &mut dropped_blank)?;
        if !seen.insert(record.line_id.clone()) {
            return Err(Error::DuplicateLineId {
                line: lineno,
                line_id: record.line_id,
            });
        }
        lines.push(record);
    }
    Ok(Corpus {
        lines,
        provenance: Provenance {
            source: None,
            ingested_at_unix: None,
            dropped_blank,
        },
    })
}

pub fn parse_manifest(path: impl AsRef<Path>) -> Result<Corpus> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut corpus = parse_manifest_from(BufReader::new(file))?;
    corpus.provenance.source = Some(path.to_path_buf());
    corpus.provenance.ingested_at_unix = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .ok()
        .map(|d| d.as_secs());
    Ok(corpus)
}

/// Serializes a single record as one compact JSON line (no trailing newline).
pub fn record_to_json(line: &TranscribedLine) -> String {
    serde_json::to_string(&RawRecord::from_line(line)).expect("record serialization is infallible")
}

pub fn write_manifest_to<W: Write>(corpus: &Corpus, mut writer: W) -> std::io::Result<()> {
    for line in &corpus.lines {
        writer.write_all(record_to_json(line).as_bytes())?;
        writer.write_all(b"\n")?;
    }
    writer.flush()
}

/// Writes the corpus to `path` through a temporary file in the same
/// directory that is renamed into place once complete.
pub fn write_manifest(corpus: &Corpus, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    write_atomically(path, |w| write_manifest_to(corpus, w))
}

pub(crate) fn write_atomically<F>(path: &Path, body: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<&mut tempfile::NamedTempFile>) -> std::io::Result<()>,
{
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    {
        let mut writer = BufWriter::new(&mut tmp);
        body(&mut writer).map_err(|e| Error::io(path, e))?;
    }
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StatsReport {
    pub total_lines: usize,
    pub total_transcriptions: usize,
    pub two_human_lines: usize,
    /// Percentage of lines with exactly two human transcriptions.
    pub two_human_percent: f64,
    /// Transcription counts per source tag, in [`SourceKind::ALL`] order.
    pub per_source: Vec<(String, usize)>,
    /// transcriptions per line -> number of lines
    pub per_line_histogram: BTreeMap<usize, usize>,
}

pub fn corpus_stats(corpus: &Corpus) -> StatsReport {
    let mut per_kind: BTreeMap<SourceKind, usize> = BTreeMap::new();
    let mut histogram = BTreeMap::new();
    let mut two_human = 0;
    let mut total_transcriptions = 0;
    for line in &corpus.lines {
        for t in &line.transcriptions {
            *per_kind.entry(t.kind()).or_default() += 1;
        }
        total_transcriptions += line.transcriptions.len();
        *histogram.entry(line.transcriptions.len()).or_default() += 1;
        if line.human_count() == 2 {
            two_human += 1;
        }
    }
    let total = corpus.len();
    StatsReport {
        total_lines: total,
        total_transcriptions,
        two_human_lines: two_human,
        two_human_percent: percent(two_human, total),
        per_source: SourceKind::ALL
            .iter()
            .map(|k| (k.tag().to_string(), per_kind.get(k).copied().unwrap_or(0)))
            .collect(),
        per_line_histogram: histogram,
    }
}

/// `100 * part / whole`, or 0 when `whole` is 0.
pub fn percent(part: usize, whole: usize) -> f64 {
    if whole == 0 {
        0.0
    } else {
        100.0 * part as f64 / whole as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_str(s: &str) -> Result<Corpus> {
        parse_manifest_from(s.as_bytes())
    }

    const FOUR: &str = r#"{"line_id":"l1","image":"img/l1.jpg","page_id":"p1","transcriptions":[{"text":"séance du 3 mai","source":"human","annotator":"a7"},{"text":"séance du 3 mai","source":"human"},{"text":"seance du 3 mai","source":"auto:pylaia"},{"text":"séance du 8 mai","source":"auto:dan","uncertain":true}]}"#;

    #[test]
    fn empty_input_gives_empty_corpus() {
        let c = parse_str("").unwrap();
        assert!(c.is_empty());
    }

    #[test]
    fn single_record_with_four_transcriptions() {
        let c = parse_str(FOUR).unwrap();
        assert_eq!(c.len(), 1);
        let line = &c.lines[0];
        assert_eq!(line.transcriptions.len(), 4);
        assert_eq!(line.human_count(), 2);
        assert_eq!(line.transcriptions[0].source.annotator(), Some("a7"));
        assert!(line.transcriptions[3].uncertain);
        assert_eq!(line.page_id.as_deref(), Some("p1"));
    }

    #[test]
    fn text_is_nfc_and_whitespace_collapsed() {
        let decomposed = "se\u{0301}ance  du\t3 mai ";
        let rec = format!(
            r#"{{"line_id":"x","image":"i","transcriptions":[{{"text":"{}","source":"human"}}]}}"#,
            decomposed.replace('\t', "\\t")
        );
        let c = parse_str(&rec).unwrap();
        assert_eq!(c.lines[0].transcriptions[0].text, "s\u{e9}ance du 3 mai");
    }

    #[test]
    fn malformed_json_reports_line_number() {
        let input = format!("{FOUR}\n{{not json\n");
        match parse_str(&input) {
            Err(Error::MalformedJson { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_line_id_rejected() {
        let input = format!("{FOUR}\n{FOUR}\n");
        assert!(matches!(
            parse_str(&input),
            Err(Error::DuplicateLineId { line: 2, .. })
        ));
    }

    #[test]
    fn empty_and_blank_transcription_lists_rejected() {
        let empty = r#"{"line_id":"a","image":"i","transcriptions":[]}"#;
        assert!(matches!(
            parse_str(empty),
            Err(Error::EmptyTranscriptions { line: 1, .. })
        ));
        let blank = r#"{"line_id":"a","image":"i","transcriptions":[{"text":"   ","source":"human"}]}"#;
        assert!(matches!(
            parse_str(blank),
            Err(Error::EmptyTranscriptions { .. })
        ));
    }

    #[test]
    fn blank_transcription_dropped_when_others_remain() {
        let rec = r#"{"line_id":"a","image":"i","transcriptions":[{"text":" ","source":"human"},{"text":"ok","source":"auto:dan"}]}"#;
        let c = parse_str(rec).unwrap();
        assert_eq!(c.lines[0].transcriptions.len(), 1);
        assert_eq!(c.provenance.dropped_blank, 1);
    }

    #[test]
    fn unknown_source_rejected() {
        let rec = r#"{"line_id":"a","image":"i","transcriptions":[{"text":"x","source":"auto:tesseract"}]}"#;
        match parse_str(rec) {
            Err(Error::UnknownSource { tag, .. }) => assert_eq!(tag, "auto:tesseract"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn annotator_only_on_human() {
        let rec = r#"{"line_id":"a","image":"i","transcriptions":[{"text":"x","source":"auto:dan","annotator":"z"}]}"#;
        assert!(matches!(
            parse_str(rec),
            Err(Error::AnnotatorOnAutomatic { .. })
        ));
    }

    #[test]
    fn split_and_agreement_extensions() {
        let rec = r#"{"line_id":"a","image":"i","transcriptions":[{"text":"x","source":"human"}],"split":"val","agreement":97.5}"#;
        let c = parse_str(rec).unwrap();
        assert_eq!(c.lines[0].split, Some(Split::Validation));
        assert_eq!(c.lines[0].agreement, Some(97.5));

        let bad = rec.replace("\"val\"", "\"dev\"");
        assert!(matches!(parse_str(&bad), Err(Error::UnknownSplit { .. })));
        let bad = rec.replace("97.5", "101");
        assert!(matches!(
            parse_str(&bad),
            Err(Error::AgreementOutOfRange { .. })
        ));
    }

    #[test]
    fn write_empty_and_single() {
        let mut buf = Vec::new();
        write_manifest_to(&Corpus::default(), &mut buf).unwrap();
        assert!(buf.is_empty());

        let c = parse_str(FOUR).unwrap();
        let mut buf = Vec::new();
        write_manifest_to(&c, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1);
        assert_eq!(parse_str(&text).unwrap().lines, c.lines);
    }

    #[test]
    fn canonical_order_humans_then_pylaia_then_dan() {
        let line = TranscribedLine::new(
            "l",
            "i",
            vec![
                Transcription::new("dan", TranscriptionSource::new(SourceKind::AutoDan)),
                Transcription::new("h1", TranscriptionSource::human(None)),
                Transcription::new("rov", TranscriptionSource::new(SourceKind::AggregateRover)),
                Transcription::new("py", TranscriptionSource::new(SourceKind::AutoPylaia)),
                Transcription::new("h2", TranscriptionSource::human(None)),
            ],
        );
        assert_eq!(line.canonical_texts(), vec!["h1", "h2", "py", "dan"]);
    }

    #[test]
    fn stats_empty_and_synthetic() {
        let s = corpus_stats(&Corpus::default());
        assert_eq!(s.total_lines, 0);
        assert_eq!(s.two_human_lines, 0);
        assert_eq!(s.two_human_percent, 0.0);
        assert!(s.per_source.iter().all(|(_, n)| *n == 0));

        // 4 lines, 2 of which carry two human transcriptions
        let h = |t: &str| Transcription::new(t, TranscriptionSource::human(None));
        let a = |t: &str| Transcription::new(t, TranscriptionSource::new(SourceKind::AutoDan));
        let lines = vec![
            TranscribedLine::new("1", "i", vec![h("a"), h("a"), a("a")]),
            TranscribedLine::new("2", "i", vec![h("a"), a("b")]),
            TranscribedLine::new("3", "i", vec![h("a"), h("c")]),
            TranscribedLine::new("4", "i", vec![h("a")]),
        ];
        let s = corpus_stats(&Corpus::new(lines));
        assert_eq!(s.total_lines, 4);
        assert_eq!(s.two_human_lines, 2);
        assert_eq!(s.two_human_percent, 50.0);
        assert_eq!(s.total_transcriptions, 8);
        let sum: usize = s.per_source.iter().map(|(_, n)| n).sum();
        assert_eq!(sum, s.total_transcriptions);
        assert_eq!(s.per_line_histogram.get(&1), Some(&1));
        assert_eq!(s.per_line_histogram.get(&2), Some(&2));
        assert_eq!(s.per_line_histogram.get(&3), Some(&1));
    }
}
