//! Train / validation / test assignment, either from human-annotator
//! agreement or from a seeded shuffle with fixed cardinalities.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::corpus::{percent, Corpus, Split};
use crate::error::{Error, Result};
use crate::metrics::sym_char_distance;

/// Human pairs closer than this (but not identical) go to validation.
pub const VALIDATION_MAX_DISTANCE: f64 = 0.05;

/// splitmix64. The output stream is fixed for a given seed on every
/// platform, which makes shuffles reproducible from the seed alone.
#[derive(Clone, Debug)]
pub struct SeededRng {
    state: u64,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform-ish integer in `[0, bound)` by 128-bit multiply-shift.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "bound must be positive");
        ((u128::from(self.next_u64()) * u128::from(bound)) >> 64) as u64
    }

    /// Fisher-Yates, walking from the last element down.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitRule {
    AgreementBased,
    Random,
    /// Read back from a manifest's `split` field.
    Recorded,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SplitAssignment {
    pub line_id: String,
    pub split: Split,
    pub rule: SplitRule,
}

impl SplitAssignment {
    pub fn new(line_id: impl Into<String>, split: Split, rule: SplitRule) -> Self {
        SplitAssignment {
            line_id: line_id.into(),
            split,
            rule,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SplitSizes {
    pub train: usize,
    pub validation: usize,
    pub test: usize,
}

impl SplitSizes {
    pub fn new(train: usize, validation: usize, test: usize) -> Self {
        SplitSizes {
            train,
            validation,
            test,
        }
    }

    pub fn total(&self) -> usize {
        self.train + self.validation + self.test
    }

    pub fn get(&self, split: Split) -> usize {
        match split {
            Split::Train => self.train,
            Split::Validation => self.validation,
            Split::Test => self.test,
        }
    }

    fn bump(&mut self, split: Split) {
        match split {
            Split::Train => self.train += 1,
            Split::Validation => self.validation += 1,
            Split::Test => self.test += 1,
        }
    }
}

/// Assignments in corpus order with lookup by line id.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SplitMap {
    assignments: Vec<SplitAssignment>,
    index: HashMap<String, usize>,
}

impl SplitMap {
    pub fn from_assignments(assignments: Vec<SplitAssignment>) -> Self {
        let index = assignments
            .iter()
            .enumerate()
            .map(|(i, a)| (a.line_id.clone(), i))
            .collect();
        SplitMap { assignments, index }
    }

    /// Reads the `split` field of every line.
    pub fn from_corpus(corpus: &Corpus) -> Result<Self> {
        let assignments = corpus
            .lines
            .iter()
            .map(|l| {
                l.split
                    .map(|s| SplitAssignment::new(l.line_id.clone(), s, SplitRule::Recorded))
                    .ok_or_else(|| Error::MissingSplit {
                        line_id: l.line_id.clone(),
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_assignments(assignments))
    }

    pub fn get(&self, line_id: &str) -> Option<Split> {
        self.index.get(line_id).map(|&i| self.assignments[i].split)
    }

    pub fn assignments(&self) -> &[SplitAssignment] {
        &self.assignments
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn sizes(&self) -> SplitSizes {
        let mut sizes = SplitSizes::default();
        for a in &self.assignments {
            sizes.bump(a.split);
        }
        sizes
    }

    /// Writes each line's split into the corpus.
    pub fn apply(&self, corpus: &mut Corpus) -> Result<()> {
        for line in &mut corpus.lines {
            line.split = Some(self.get(&line.line_id).ok_or_else(|| Error::MissingSplit {
                line_id: line.line_id.clone(),
            })?);
        }
        Ok(())
    }
}

/// Test: two identical human transcriptions. Validation: two human
/// transcriptions with `0 < d < 0.05`. Everything else trains.
pub fn agreement_split(corpus: &Corpus) -> Result<SplitMap> {
    let mut assignments = Vec::with_capacity(corpus.len());
    for line in &corpus.lines {
        let humans: Vec<&str> = line.humans().map(|t| t.text.as_str()).collect();
        let split = match humans.as_slice() {
            [] => {
                return Err(Error::NoHumanTranscription {
                    line_id: line.line_id.clone(),
                })
            }
            [a, b] => {
                let d = sym_char_distance(a, b).value();
                if d == 0.0 {
                    Split::Test
                } else if d < VALIDATION_MAX_DISTANCE {
                    Split::Validation
                } else {
                    Split::Train
                }
            }
            _ => Split::Train,
        };
        assignments.push(SplitAssignment::new(
            line.line_id.clone(),
            split,
            SplitRule::AgreementBased,
        ));
    }
    Ok(SplitMap::from_assignments(assignments))
}

/// Shuffles line indices with `SeededRng(seed)`; the first `sizes.train`
/// go to train, the next `sizes.validation` to validation, the rest to test.
pub fn random_split(corpus: &Corpus, sizes: SplitSizes, seed: u64) -> Result<SplitMap> {
    if sizes.total() != corpus.len() {
        return Err(Error::SizeMismatch {
            train: sizes.train,
            validation: sizes.validation,
            test: sizes.test,
            total: corpus.len(),
        });
    }
    let mut order: Vec<usize> = (0..corpus.len()).collect();
    SeededRng::new(seed).shuffle(&mut order);
    let mut split_of = vec![Split::Test; corpus.len()];
    for (rank, &idx) in order.iter().enumerate() {
        split_of[idx] = if rank < sizes.train {
            Split::Train
        } else if rank < sizes.train + sizes.validation {
            Split::Validation
        } else {
            Split::Test
        };
    }
    let assignments = corpus
        .lines
        .iter()
        .zip(split_of)
        .map(|(l, s)| SplitAssignment::new(l.line_id.clone(), s, SplitRule::Random))
        .collect();
    Ok(SplitMap::from_assignments(assignments))
}

/// Counts and percentages per split.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SplitSummary {
    pub sizes: SplitSizes,
    pub total: usize,
    pub percent: [f64; 3],
}

impl SplitSummary {
    pub fn new(sizes: SplitSizes) -> Self {
        let total = sizes.total();
        SplitSummary {
            sizes,
            total,
            percent: Split::ALL.map(|s| percent(sizes.get(s), total)),
        }
    }
}

impl fmt::Display for SplitSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<12}{:>10}{:>16}", "Split", "Number", "Percentage (%)")?;
        for (i, split) in Split::ALL.iter().enumerate() {
            writeln!(
                f,
                "{:<12}{:>10}{:>16.1}",
                split.to_string(),
                self.sizes.get(*split),
                self.percent[i]
            )?;
        }
        let total_pct = if self.total == 0 { 0.0 } else { 100.0 };
        write!(f, "{:<12}{:>10}{:>16.1}", "Total", self.total, total_pct)
    }
}
