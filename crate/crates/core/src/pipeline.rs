//! Corpus-level passes shared by the CLI and the C bindings.
//!
//! Per-line work runs on the current rayon pool. Results are collected in
//! corpus order, so output does not depend on the number of threads.

use rayon::prelude::*;

use crate::corpus::{normalize_text, Corpus, SourceKind, TranscribedLine};
use crate::error::Result;
use crate::quality::score_corpus;
use crate::rasa::rasa_select;
use crate::rover::{rover_consensus, Granularity};

/// Builds a pool capped at `threads` workers (all cores when `None` or 0).
pub fn thread_pool(threads: Option<usize>) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .expect("thread pool construction")
}

/// Consensus as stored in a manifest: whitespace-normalized, falling back
/// to the first canonical transcription if voting left nothing.
pub fn rover_text(line: &TranscribedLine, level: Granularity) -> Result<String> {
    let texts = line.canonical_texts();
    let consensus = rover_consensus(&texts, level)?;
    let text = normalize_text(&consensus.text);
    Ok(if text.is_empty() {
        texts[0].to_string()
    } else {
        text
    })
}

pub fn rasa_text(line: &TranscribedLine) -> Result<String> {
    let texts = line.canonical_texts();
    let pick = rasa_select(&texts)?;
    Ok(texts[pick.index].to_string())
}

/// Appends (or replaces) an `aggregate:rover` transcription on every line.
pub fn aggregate_rover(corpus: &mut Corpus, level: Granularity) -> Result<()> {
    let texts: Vec<String> = corpus
        .lines
        .par_iter()
        .map(|l| rover_text(l, level))
        .collect::<Result<_>>()?;
    for (line, text) in corpus.lines.iter_mut().zip(texts) {
        line.set_aggregate(SourceKind::AggregateRover, text);
    }
    Ok(())
}

/// Appends (or replaces) an `aggregate:rasa` transcription on every line.
pub fn aggregate_rasa(corpus: &mut Corpus) -> Result<()> {
    let texts: Vec<String> = corpus
        .lines
        .par_iter()
        .map(rasa_text)
        .collect::<Result<_>>()?;
    for (line, text) in corpus.lines.iter_mut().zip(texts) {
        line.set_aggregate(SourceKind::AggregateRasa, text);
    }
    Ok(())
}

/// Stores each line's agreement score in its `agreement` field.
pub fn annotate_agreement(corpus: &mut Corpus) -> Result<()> {
    let scores = score_corpus(corpus)?;
    for (line, score) in corpus.lines.iter_mut().zip(scores) {
        line.agreement = Some(score.value());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Transcription, TranscriptionSource};

    fn line(texts: &[&str]) -> TranscribedLine {
        TranscribedLine::new(
            "l",
            "i",
            texts
                .iter()
                .map(|t| Transcription::new(*t, TranscriptionSource::human(None)))
                .collect(),
        )
    }

    #[test]
    fn aggregates_replace_previous_run() {
        let mut c = Corpus::new(vec![line(&["le chat", "le chat", "la chat"])]);
        aggregate_rover(&mut c, Granularity::Word).unwrap();
        aggregate_rover(&mut c, Granularity::Character).unwrap();
        aggregate_rasa(&mut c).unwrap();
        aggregate_rasa(&mut c).unwrap();
        let l = &c.lines[0];
        assert_eq!(l.count_of(SourceKind::AggregateRover), 1);
        assert_eq!(l.count_of(SourceKind::AggregateRasa), 1);
        assert_eq!(l.first_of(SourceKind::AggregateRover).unwrap().text, "le chat");
        assert_eq!(l.first_of(SourceKind::AggregateRasa).unwrap().text, "le chat");
    }

    #[test]
    fn consensus_whitespace_is_normalized() {
        // character voting can leave a doubled space
        let l = line(&["a  b", "a  b", "a b"]);
        let t = rover_text(&l, Granularity::Character).unwrap();
        assert_eq!(t, "a b");
    }

    #[test]
    fn agreement_annotation() {
        let mut c = Corpus::new(vec![line(&["cat", "cat"])]);
        annotate_agreement(&mut c).unwrap();
        assert_eq!(c.lines[0].agreement, Some(100.0));
    }
}
