//! Aggregation and curation of crowdsourced handwritten text-line
//! transcriptions.
//!
//! - [`corpus`]: data model, manifest I/O, statistics
//! - [`metrics`]: edit distance with traceback, CER, WER, symmetric distance
//! - [`rover`]: lattice alignment and per-slot voting consensus
//! - [`rasa`]: reliability-weighted extractive selection
//! - [`quality`]: agreement scores and threshold filtering
//! - [`splitkit`]: agreement-based and seeded random splits
//! - [`assemble`]: training manifests under the six emission strategies
//! - [`cli`]: the `aggrescribe` command line

pub mod assemble;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod metrics;
pub mod pipeline;
pub mod quality;
pub mod rasa;
pub mod rover;
pub mod splitkit;

pub use assemble::{emit, write_ground_truth, EmissionRecord, Strategy};
pub use corpus::{
    corpus_stats, parse_manifest, write_manifest, Corpus, SourceKind, Split, StatsReport, TranscribedLine,
    Transcription, TranscriptionSource,
};
pub use error::{Error, Result};
pub use metrics::{cer, edit_distance, sym_char_distance, wer, EditAlignment, EditOp, Rate};
pub use quality::{agreement_score, filter_by_agreement, AgreementScore};
pub use rasa::{rasa_select, rasa_select_with, RasaParams, RasaSelection};
pub use rover::{build_lattice, rover_consensus, tokenize, vote, ConsensusResult, Granularity, TokenLattice};
pub use splitkit::{agreement_split, random_split, SeededRng, SplitAssignment, SplitMap, SplitRule, SplitSizes};
