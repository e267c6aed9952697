//! Command-line front end. [`run`] is the whole program minus process exit,
//! so integration tests can drive it in-process.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::assemble::{count_records, emit, write_ground_truth, write_summary, EmitSummary, Strategy};
use crate::corpus::{corpus_stats, parse_manifest, percent, write_manifest, Corpus, Split, StatsReport};
use crate::error::Error;
use crate::pipeline::{aggregate_rasa, aggregate_rover, annotate_agreement, thread_pool};
use crate::quality::{filter_by_agreement, recorded_scores};
use crate::rover::Granularity;
use crate::splitkit::{agreement_split, random_split, SplitMap, SplitSizes, SplitSummary};

pub const THREADS_ENV: &str = "AGGRESCRIBE_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "aggrescribe", version, about = "Aggregate, score, split and emit crowdsourced line transcriptions")]
pub struct Cli {
    /// Also print a machine-readable JSON summary to standard error.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate a manifest.
    Validate { input: PathBuf },
    /// Corpus statistics.
    Stats { input: PathBuf },
    /// Append an aggregated transcription to every line.
    Aggregate {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, value_enum)]
        method: Method,
        #[arg(long, default_value = "char", value_parser = parse_level)]
        level: Granularity,
    },
    /// Annotate every line with its agreement score.
    Agree {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Assign train / validation / test splits.
    Split {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, value_enum)]
        mode: SplitMode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Train,validation,test counts for random mode. Defaults to the
        /// cardinalities of the agreement-based split.
        #[arg(long, value_parser = parse_sizes)]
        sizes: Option<SplitSizes>,
    },
    /// Drop training lines below an agreement threshold.
    Filter {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, value_parser = parse_threshold)]
        min_agreement: f64,
    },
    /// Write train/val/test ground-truth files for a strategy.
    Emit {
        input: PathBuf,
        #[arg(long, value_parser = parse_strategy)]
        strategy: Strategy,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Rover,
    Rasa,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SplitMode {
    Agreement,
    Random,
}

fn parse_level(s: &str) -> Result<Granularity, String> {
    s.parse()
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse()
}

fn parse_sizes(s: &str) -> Result<SplitSizes, String> {
    let parts: Vec<&str> = s.split(',').collect();
    let [a, b, c] = parts.as_slice() else {
        return Err(format!("expected three comma-separated counts, got {s:?}"));
    };
    let n = |p: &str| p.trim().parse::<usize>().map_err(|e| format!("{p:?}: {e}"));
    Ok(SplitSizes::new(n(a)?, n(b)?, n(c)?))
}

fn parse_threshold(s: &str) -> Result<f64, String> {
    let t: f64 = s.parse().map_err(|e| format!("{s:?}: {e}"))?;
    if (0.0..=100.0).contains(&t) {
        Ok(t)
    } else {
        Err(format!("threshold {t} is outside [0, 100]"))
    }
}

/// Worker cap from `AGGRESCRIBE_THREADS`; unset, empty or 0 means all cores.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|n: &usize| *n > 0)
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io { .. } => EXIT_IO,
        Error::SizeMismatch { .. } | Error::ThresholdOutOfRange(_) => EXIT_USAGE,
        _ => EXIT_VALIDATION,
    }
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// process exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    let pool = thread_pool(threads_from_env());
    let mut report = Vec::new();
    let result = pool.install(|| execute(&cli, &mut report));
    let _ = out.write_all(&report);
    match result {
        Ok(summary) => {
            if cli.json {
                let _ = writeln!(err, "{summary}");
            }
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn load(path: &Path) -> Result<Corpus, Error> {
    parse_manifest(path)
}

fn to_json<T: Serialize>(value: &T) -> serde_json::Value {
    serde_json::to_value(value).expect("summary serialization is infallible")
}

fn execute(cli: &Cli, out: &mut Vec<u8>) -> Result<serde_json::Value, Error> {
    // writes into a Vec<u8> cannot fail
    match &cli.command {
        Command::Validate { input } => {
            let corpus = load(input)?;
            let _ = writeln!(out, "ok: {} records", corpus.len());
            if corpus.provenance.dropped_blank > 0 {
                let _ = writeln!(out, "dropped blank transcriptions: {}", corpus.provenance.dropped_blank);
            }
            Ok(json!({"command": "validate", "records": corpus.len(), "dropped_blank": corpus.provenance.dropped_blank}))
        }
        Command::Stats { input } => {
            let stats = corpus_stats(&load(input)?);
            let _ = write!(out, "{}", render_stats(&stats));
            Ok(json!({"command": "stats", "stats": to_json(&stats)}))
        }
        Command::Aggregate {
            input,
            output,
            method,
            level,
        } => {
            let mut corpus = load(input)?;
            match method {
                Method::Rover => aggregate_rover(&mut corpus, *level)?,
                Method::Rasa => aggregate_rasa(&mut corpus)?,
            }
            write_manifest(&corpus, output)?;
            let method = match method {
                Method::Rover => "rover",
                Method::Rasa => "rasa",
            };
            let _ = writeln!(out, "aggregated {} lines ({method}, {level})", corpus.len());
            Ok(json!({"command": "aggregate", "method": method, "level": level.to_string(), "lines": corpus.len()}))
        }
        Command::Agree { input, output } => {
            let mut corpus = load(input)?;
            annotate_agreement(&mut corpus)?;
            write_manifest(&corpus, output)?;
            let scores: Vec<f64> = corpus.lines.iter().filter_map(|l| l.agreement).collect();
            let mean = if scores.is_empty() {
                0.0
            } else {
                scores.iter().sum::<f64>() / scores.len() as f64
            };
            let perfect = scores.iter().filter(|s| **s == 100.0).count();
            let _ = writeln!(out, "scored {} lines", scores.len());
            let _ = writeln!(out, "mean agreement: {mean:.2}");
            let _ = writeln!(out, "full agreement: {perfect} ({:.1}%)", percent(perfect, scores.len()));
            Ok(json!({"command": "agree", "lines": scores.len(), "mean": mean, "full_agreement": perfect}))
        }
        Command::Split {
            input,
            output,
            mode,
            seed,
            sizes,
        } => {
            let mut corpus = load(input)?;
            let map = match mode {
                SplitMode::Agreement => agreement_split(&corpus)?,
                SplitMode::Random => {
                    let sizes = match sizes {
                        Some(s) => *s,
                        None => agreement_split(&corpus)?.sizes(),
                    };
                    random_split(&corpus, sizes, *seed)?
                }
            };
            map.apply(&mut corpus)?;
            write_manifest(&corpus, output)?;
            let summary = SplitSummary::new(map.sizes());
            let _ = writeln!(out, "{summary}");
            let mode = match mode {
                SplitMode::Agreement => "agreement",
                SplitMode::Random => "random",
            };
            Ok(json!({"command": "split", "mode": mode, "seed": seed, "summary": to_json(&summary)}))
        }
        Command::Filter {
            input,
            output,
            min_agreement,
        } => {
            let corpus = load(input)?;
            let splits = SplitMap::from_corpus(&corpus)?;
            let scores = recorded_scores(&corpus);
            let filtered = filter_by_agreement(&corpus, &scores, *min_agreement, &splits)?;
            write_manifest(&filtered, output)?;
            let train_before = splits.sizes().train;
            let train_after = filtered
                .lines
                .iter()
                .filter(|l| l.split == Some(Split::Train))
                .count();
            let _ = write!(out, "{}", render_filter(*min_agreement, train_before, train_after));
            Ok(json!({
                "command": "filter",
                "threshold": min_agreement,
                "train_before": train_before,
                "train_retained": train_after,
                "retained_percent": percent(train_after, train_before),
            }))
        }
        Command::Emit {
            input,
            strategy,
            seed,
            out: dir,
        } => {
            let corpus = load(input)?;
            let splits = SplitMap::from_corpus(&corpus)?;
            let records = emit(&corpus, &splits, *strategy, *seed)?;
            write_ground_truth(&records, dir)?;
            let summary = EmitSummary {
                strategy: *strategy,
                seed: *seed,
                counts: count_records(&records),
            };
            write_summary(&summary, dir)?;
            let c = summary.counts;
            let _ = writeln!(out, "strategy {strategy} (seed {seed})");
            let _ = writeln!(out, "{:<12}{:>10}", "Split", "Records");
            let _ = writeln!(out, "{:<12}{:>10}", "Train", c.train);
            let _ = writeln!(out, "{:<12}{:>10}", "Validation", c.val);
            let _ = writeln!(out, "{:<12}{:>10}", "Test", c.test);
            Ok(json!({"command": "emit", "summary": to_json(&summary)}))
        }
    }
}

pub fn render_stats(stats: &StatsReport) -> String {
    let mut s = String::new();
    s.push_str(&format!("total lines: {}\n", stats.total_lines));
    s.push_str(&format!(
        "lines with two human transcriptions: {} ({:.1}%)\n",
        stats.two_human_lines, stats.two_human_percent
    ));
    s.push_str(&format!("transcriptions: {}\n", stats.total_transcriptions));
    for (tag, n) in &stats.per_source {
        s.push_str(&format!("  {tag:<16}{n:>10}\n"));
    }
    s.push_str("transcriptions per line:\n");
    for (k, n) in &stats.per_line_histogram {
        s.push_str(&format!("  {k:<16}{n:>10}\n"));
    }
    s
}

pub fn render_filter(threshold: f64, before: usize, after: usize) -> String {
    format!(
        "{:<36}{:>10}{:>20}\n{:<36}{:>9}%{:>20}\n{:<36}{:>9}%{:>20}\n",
        "Filtering strategy",
        "Threshold",
        "Training samples",
        "Retain all training samples",
        0,
        format!("{before} (100.0%)"),
        "Discard samples with low agreement",
        threshold,
        format!("{after} ({:.1}%)", percent(after, before)),
    )
}
