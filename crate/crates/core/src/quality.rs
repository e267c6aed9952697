//! Per-line agreement between transcriptions and threshold filtering of the
//! training split.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::{Corpus, Split, TranscribedLine};
use crate::error::{Error, Result};
use crate::metrics::sym_char_distance;
use crate::rover::{rover_consensus, Granularity};
use crate::splitkit::SplitMap;

/// Agreement on a 0 to 100 scale; 100 means every transcription is identical.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct AgreementScore(f64);

impl AgreementScore {
    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<AgreementScore> for f64 {
    fn from(s: AgreementScore) -> f64 {
        s.0
    }
}

impl fmt::Display for AgreementScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.2}", self.0)
    }
}

/// `100 * (1 - min(1, mean distance to the character-level consensus))`.
pub fn agreement_of_texts<S: AsRef<str>>(texts: &[S]) -> Result<AgreementScore> {
    let consensus = rover_consensus(texts, Granularity::Character)?;
    let total: f64 = texts
        .iter()
        .map(|t| sym_char_distance(t.as_ref(), &consensus.text).value())
        .sum();
    let mean = total / texts.len() as f64;
    Ok(AgreementScore(100.0 * (1.0 - mean.min(1.0))))
}

/// Agreement over the line's human and automatic transcriptions in canonical
/// order. Appended aggregates never take part.
pub fn agreement_score(line: &TranscribedLine) -> Result<AgreementScore> {
    agreement_of_texts(&line.canonical_texts())
}

/// Scores every line in parallel on the current rayon pool; output follows
/// corpus order.
pub fn score_corpus(corpus: &Corpus) -> Result<Vec<AgreementScore>> {
    corpus.lines.par_iter().map(agreement_score).collect()
}

/// Drops training lines whose score is strictly below `threshold`.
/// Validation and test lines pass through untouched.
pub fn filter_by_agreement(
    corpus: &Corpus,
    scores: &HashMap<String, AgreementScore>,
    threshold: f64,
    splits: &SplitMap,
) -> Result<Corpus> {
    if !(0.0..=100.0).contains(&threshold) {
        return Err(Error::ThresholdOutOfRange(threshold));
    }
    let mut kept = Vec::with_capacity(corpus.len());
    for line in &corpus.lines {
        let split = splits.get(&line.line_id).ok_or_else(|| Error::MissingSplit {
            line_id: line.line_id.clone(),
        })?;
        if split == Split::Train {
            let score = scores.get(&line.line_id).ok_or_else(|| Error::MissingScore {
                line_id: line.line_id.clone(),
            })?;
            if score.value() < threshold {
                continue;
            }
        }
        kept.push(line.clone());
    }
    Ok(Corpus {
        lines: kept,
        provenance: corpus.provenance.clone(),
    })
}

/// Scores recorded in the manifest's `agreement` field.
pub fn recorded_scores(corpus: &Corpus) -> HashMap<String, AgreementScore> {
    corpus
        .lines
        .iter()
        .filter_map(|l| l.agreement.map(|a| (l.line_id.clone(), AgreementScore(a))))
        .collect()
}
