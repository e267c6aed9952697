//! Training-manifest emission under the six transcription strategies and the
//! tab-separated ground-truth files fed to an HTR trainer.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::corpus::{write_atomically, Corpus, SourceKind, Split, TranscribedLine, Transcription, TranscriptionSource};
use crate::error::{Error, Result};
use crate::splitkit::{SeededRng, SplitMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// One human transcription drawn at random.
    RandomOne,
    RasaOne,
    RoverOne,
    AllHuman,
    AllHumanAuto,
    /// Human, automatic, RASA and ROVER transcriptions.
    AllWithAggregates,
}

impl Strategy {
    pub const ALL: [Strategy; 6] = [
        Strategy::RandomOne,
        Strategy::RasaOne,
        Strategy::RoverOne,
        Strategy::AllHuman,
        Strategy::AllHumanAuto,
        Strategy::AllWithAggregates,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::RandomOne => "random-one",
            Strategy::RasaOne => "rasa-one",
            Strategy::RoverOne => "rover-one",
            Strategy::AllHuman => "all-human",
            Strategy::AllHumanAuto => "all-human-auto",
            Strategy::AllWithAggregates => "all",
        }
    }

    pub fn is_single(self) -> bool {
        matches!(
            self,
            Strategy::RandomOne | Strategy::RasaOne | Strategy::RoverOne
        )
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown strategy {s:?}"))
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Strategy {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmissionRecord {
    pub line_id: String,
    pub image_ref: String,
    pub text: String,
    pub split: Split,
    pub source: TranscriptionSource,
}

impl EmissionRecord {
    fn from(line: &TranscribedLine, t: &Transcription, split: Split) -> Self {
        EmissionRecord {
            line_id: line.line_id.clone(),
            image_ref: line.image_ref.clone(),
            text: t.text.clone(),
            split,
            source: t.source.clone(),
        }
    }
}

/// 64-bit FNV-1a, used to derive a per-line random stream from the run seed.
fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        hash ^= u64::from(*b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

fn of_kinds<'a>(line: &'a TranscribedLine, kinds: &[SourceKind]) -> Vec<&'a Transcription> {
    kinds
        .iter()
        .flat_map(|k| line.transcriptions.iter().filter(move |t| t.kind() == *k))
        .collect()
}

fn required(line: &TranscribedLine, kind: SourceKind) -> Result<&Transcription> {
    line.first_of(kind).ok_or_else(|| Error::MissingAggregate {
        line_id: line.line_id.clone(),
        source_tag: kind.tag(),
    })
}

fn select(line: &TranscribedLine, strategy: Strategy, seed: u64) -> Result<Vec<&Transcription>> {
    use SourceKind::*;
    let no_human = || Error::NoHumanTranscription {
        line_id: line.line_id.clone(),
    };
    Ok(match strategy {
        Strategy::RandomOne => {
            let humans: Vec<&Transcription> = line.humans().collect();
            if humans.is_empty() {
                return Err(no_human());
            }
            let mut rng = SeededRng::new(seed ^ fnv1a64(line.line_id.as_bytes()));
            vec![humans[rng.below(humans.len() as u64) as usize]]
        }
        Strategy::RasaOne => vec![required(line, AggregateRasa)?],
        Strategy::RoverOne => vec![required(line, AggregateRover)?],
        Strategy::AllHuman => of_kinds(line, &[Human]),
        Strategy::AllHumanAuto => of_kinds(line, &[Human, AutoPylaia, AutoDan]),
        Strategy::AllWithAggregates => {
            let mut all = of_kinds(line, &[Human, AutoPylaia, AutoDan]);
            all.push(required(line, AggregateRasa)?);
            all.push(required(line, AggregateRover)?);
            all
        }
    })
}

/// Expands train and validation lines according to `strategy`; each test
/// line yields exactly its first human transcription.
pub fn emit(corpus: &Corpus, splits: &SplitMap, strategy: Strategy, seed: u64) -> Result<Vec<EmissionRecord>> {
    let mut records = Vec::new();
    for line in &corpus.lines {
        let split = splits.get(&line.line_id).ok_or_else(|| Error::MissingSplit {
            line_id: line.line_id.clone(),
        })?;
        if split == Split::Test {
            let human = line.humans().next().ok_or_else(|| Error::NoHumanTranscription {
                line_id: line.line_id.clone(),
            })?;
            records.push(EmissionRecord::from(line, human, split));
            continue;
        }
        for t in select(line, strategy, seed)? {
            records.push(EmissionRecord::from(line, t, split));
        }
    }
    Ok(records)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct EmitCounts {
    pub train: usize,
    pub val: usize,
    pub test: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EmitSummary {
    pub strategy: Strategy,
    pub seed: u64,
    pub counts: EmitCounts,
}

pub fn count_records(records: &[EmissionRecord]) -> EmitCounts {
    let mut counts = EmitCounts::default();
    for r in records {
        match r.split {
            Split::Train => counts.train += 1,
            Split::Validation => counts.val += 1,
            Split::Test => counts.test += 1,
        }
    }
    counts
}

fn has_tsv_breaker(s: &str) -> bool {
    s.contains(['\t', '\n', '\r'])
}

/// Writes `train.tsv`, `val.tsv` and `test.tsv` (`image<TAB>text` per line)
/// into `dir`, creating it if needed. Nothing is written if any record
/// would break the format.
pub fn write_ground_truth(records: &[EmissionRecord], dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    for r in records {
        if has_tsv_breaker(&r.image_ref) {
            return Err(Error::InvalidTsvField {
                line_id: r.line_id.clone(),
                field: "image",
            });
        }
        if has_tsv_breaker(&r.text) {
            return Err(Error::InvalidTsvField {
                line_id: r.line_id.clone(),
                field: "text",
            });
        }
    }
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for split in Split::ALL {
        let path = dir.join(format!("{}.tsv", split.tag()));
        write_atomically(&path, |w| {
            for r in records.iter().filter(|r| r.split == split) {
                writeln!(w, "{}\t{}", r.image_ref, r.text)?;
            }
            w.flush()
        })?;
    }
    Ok(())
}

pub fn write_summary(summary: &EmitSummary, dir: impl AsRef<Path>) -> Result<()> {
    let path = dir.as_ref().join("summary.json");
    let json = serde_json::to_string_pretty(summary).expect("summary serialization is infallible");
    write_atomically(&path, |w| {
        w.write_all(json.as_bytes())?;
        w.write_all(b"\n")?;
        w.flush()
    })
}
