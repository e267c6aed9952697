//! C ABI over `aggrescribe`.
//!
//! Every fallible function returns an [`AgsStatus`] and writes its result
//! through an out-pointer. On failure a message is kept per thread and can be
//! read with [`ags_last_error_message`]; a successful call clears it.
//!
//! Pointer contract for all functions: string arguments are NUL-terminated
//! UTF-8, arrays hold `n` valid string pointers, handles come from this
//! library and are not used after being freed. Strings returned by the
//! library are released with [`ags_string_free`], corpora with
//! [`ags_corpus_free`]. Panics never cross the boundary; they surface as
//! [`AgsStatus::Panic`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use aggrescribe::pipeline::{aggregate_rasa, aggregate_rover, annotate_agreement};
use aggrescribe::quality::{agreement_of_texts, recorded_scores};
use aggrescribe::splitkit::SplitMap;
use aggrescribe::{
    agreement_split, assemble, cer, edit_distance, emit, filter_by_agreement, parse_manifest, random_split,
    rasa_select, rover_consensus, sym_char_distance, wer, write_ground_truth, write_manifest, Corpus, Error,
    Granularity, SplitSizes, Strategy,
};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AgsStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    /// Bad argument value: unknown level or strategy, split sizes that do
    /// not add up, threshold outside [0, 100].
    Usage = 3,
    /// The data itself is unusable (malformed manifest, missing split, ...).
    Validation = 4,
    Io = 5,
    Panic = 6,
}

/// Token granularity for [`ags_rover_consensus`] and
/// [`ags_corpus_aggregate_rover`], passed as a `uint32_t`.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AgsLevel {
    Character = 0,
    Word = 1,
}

/// Opaque corpus handle.
pub struct AgsCorpus {
    inner: Corpus,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(AgsStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Io { .. } => AgsStatus::Io,
            Error::SizeMismatch { .. } | Error::ThresholdOutOfRange(_) => AgsStatus::Usage,
            _ => AgsStatus::Validation,
        };
        Failure(status, e.to_string())
    }
}

fn set_last_error(message: Option<String>) {
    let message = message.map(|m| CString::new(m.replace('\0', " ")).expect("NUL bytes removed"));
    LAST_ERROR.with(|slot| *slot.borrow_mut() = message);
}

fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> AgsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error(None);
            AgsStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_last_error(Some(message));
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(Some(format!("panic: {message}")));
            AgsStatus::Panic
        }
    }
}

fn null(name: &str) -> Failure {
    Failure(AgsStatus::NullArgument, format!("{name} is NULL"))
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(AgsStatus::InvalidUtf8, format!("{name}: {e}")))
}

unsafe fn texts_arg<'a>(texts: *const *const c_char, n: usize) -> Result<Vec<&'a str>, Failure> {
    if n == 0 {
        return Ok(Vec::new());
    }
    if texts.is_null() {
        return Err(null("texts"));
    }
    std::slice::from_raw_parts(texts, n)
        .iter()
        .enumerate()
        .map(|(i, p)| str_arg(*p, &format!("texts[{i}]")))
        .collect()
}

unsafe fn out_arg<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(name))
}

unsafe fn corpus_ref<'a>(c: *const AgsCorpus) -> Result<&'a Corpus, Failure> {
    c.as_ref().map(|c| &c.inner).ok_or_else(|| null("corpus"))
}

unsafe fn corpus_mut<'a>(c: *mut AgsCorpus) -> Result<&'a mut Corpus, Failure> {
    c.as_mut().map(|c| &mut c.inner).ok_or_else(|| null("corpus"))
}

fn level_arg(level: u32) -> Result<Granularity, Failure> {
    match level {
        0 => Ok(Granularity::Character),
        1 => Ok(Granularity::Word),
        other => Err(Failure(AgsStatus::Usage, format!("unknown level {other}"))),
    }
}

fn into_c_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Failure(AgsStatus::Validation, "result contains a NUL byte".into()))
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn ags_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |m| m.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn ags_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[no_mangle]
pub unsafe extern "C" fn ags_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Reads an NDJSON manifest. `*out` is set only on success.
#[no_mangle]
pub unsafe extern "C" fn ags_corpus_parse(path: *const c_char, out: *mut *mut AgsCorpus) -> AgsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let inner = parse_manifest(str_arg(path, "path")?)?;
        *out = Box::into_raw(Box::new(AgsCorpus { inner }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ags_corpus_free(corpus: *mut AgsCorpus) {
    if !corpus.is_null() {
        drop(Box::from_raw(corpus));
    }
}

#[no_mangle]
pub unsafe extern "C" fn ags_corpus_len(corpus: *const AgsCorpus, out: *mut usize) -> AgsStatus {
    guard(|| {
        *out_arg(out, "out")? = corpus_ref(corpus)?.len();
        Ok(())
    })
}

/// Writes the corpus as a manifest, atomically.
#[no_mangle]
pub unsafe extern "C" fn ags_corpus_write(corpus: *const AgsCorpus, path: *const c_char) -> AgsStatus {
    guard(|| {
        write_manifest(corpus_ref(corpus)?, str_arg(path, "path")?)?;
        Ok(())
    })
}

/// Appends (or replaces) an `aggregate:rover` transcription on every line.
#[no_mangle]
pub unsafe extern "C" fn ags_corpus_aggregate_rover(corpus: *mut AgsCorpus, level: u32) -> AgsStatus {
    guard(|| {
        let level = level_arg(level)?;
        aggregate_rover(corpus_mut(corpus)?, level)?;
        Ok(())
    })
}

/// Appends (or replaces) an `aggregate:rasa` transcription on every line.
#[no_mangle]
pub unsafe extern "C" fn ags_corpus_aggregate_rasa(corpus: *mut AgsCorpus) -> AgsStatus {
    guard(|| {
        aggregate_rasa(corpus_mut(corpus)?)?;
        Ok(())
    })
}

/// Records an agreement score on every line.
#[no_mangle]
pub unsafe extern "C" fn ags_corpus_annotate_agreement(corpus: *mut AgsCorpus) -> AgsStatus {
    guard(|| {
        annotate_agreement(corpus_mut(corpus)?)?;
        Ok(())
    })
}

/// Assigns every line to a split by human agreement.
#[no_mangle]
pub unsafe extern "C" fn ags_corpus_split_agreement(corpus: *mut AgsCorpus) -> AgsStatus {
    guard(|| {
        let corpus = corpus_mut(corpus)?;
        agreement_split(corpus)?.apply(corpus)?;
        Ok(())
    })
}

/// Seeded random split; the three sizes must add up to the corpus length.
#[no_mangle]
pub unsafe extern "C" fn ags_corpus_split_random(
    corpus: *mut AgsCorpus,
    train: usize,
    validation: usize,
    test: usize,
    seed: u64,
) -> AgsStatus {
    guard(|| {
        let corpus = corpus_mut(corpus)?;
        random_split(corpus, SplitSizes::new(train, validation, test), seed)?.apply(corpus)?;
        Ok(())
    })
}

/// Copy of the corpus without the train lines whose recorded agreement is
/// below `threshold`. Needs a split on every line and a score on train lines.
#[no_mangle]
pub unsafe extern "C" fn ags_corpus_filter(
    corpus: *const AgsCorpus,
    threshold: f64,
    out: *mut *mut AgsCorpus,
) -> AgsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let corpus = corpus_ref(corpus)?;
        let splits = SplitMap::from_corpus(corpus)?;
        let inner = filter_by_agreement(corpus, &recorded_scores(corpus), threshold, &splits)?;
        *out = Box::into_raw(Box::new(AgsCorpus { inner }));
        Ok(())
    })
}

/// Writes `train.tsv`, `val.tsv`, `test.tsv` and `summary.json` into `dir`.
/// `strategy` is one of the CLI strategy names. `out_records` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn ags_corpus_emit(
    corpus: *const AgsCorpus,
    strategy: *const c_char,
    seed: u64,
    dir: *const c_char,
    out_records: *mut usize,
) -> AgsStatus {
    guard(|| {
        let corpus = corpus_ref(corpus)?;
        let strategy: Strategy = str_arg(strategy, "strategy")?
            .parse()
            .map_err(|e| Failure(AgsStatus::Usage, e))?;
        let dir = str_arg(dir, "dir")?;
        let splits = SplitMap::from_corpus(corpus)?;
        let records = emit(corpus, &splits, strategy, seed)?;
        write_ground_truth(&records, dir)?;
        let summary = assemble::EmitSummary {
            strategy,
            seed,
            counts: assemble::count_records(&records),
        };
        assemble::write_summary(&summary, dir)?;
        if let Some(out) = out_records.as_mut() {
            *out = records.len();
        }
        Ok(())
    })
}

/// Character-level edit distance.
#[no_mangle]
pub unsafe extern "C" fn ags_edit_distance(a: *const c_char, b: *const c_char, out: *mut usize) -> AgsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let a: Vec<char> = str_arg(a, "a")?.chars().collect();
        let b: Vec<char> = str_arg(b, "b")?.chars().collect();
        *out = edit_distance(&a, &b).distance;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ags_cer(
    hypothesis: *const c_char,
    reference: *const c_char,
    out: *mut f64,
) -> AgsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = cer(str_arg(hypothesis, "hypothesis")?, str_arg(reference, "reference")?)?.value();
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ags_wer(
    hypothesis: *const c_char,
    reference: *const c_char,
    out: *mut f64,
) -> AgsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = wer(str_arg(hypothesis, "hypothesis")?, str_arg(reference, "reference")?)?.value();
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ags_sym_char_distance(a: *const c_char, b: *const c_char, out: *mut f64) -> AgsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = sym_char_distance(str_arg(a, "a")?, str_arg(b, "b")?).value();
        Ok(())
    })
}

/// Consensus text of `n` transcriptions. Free `*out` with [`ags_string_free`].
#[no_mangle]
pub unsafe extern "C" fn ags_rover_consensus(
    texts: *const *const c_char,
    n: usize,
    level: u32,
    out: *mut *mut c_char,
) -> AgsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let level = level_arg(level)?;
        let texts = texts_arg(texts, n)?;
        *out = into_c_string(rover_consensus(&texts, level)?.text)?;
        Ok(())
    })
}

/// Index of the selected transcription among `texts`.
#[no_mangle]
pub unsafe extern "C" fn ags_rasa_select(texts: *const *const c_char, n: usize, out_index: *mut usize) -> AgsStatus {
    guard(|| {
        let out = out_arg(out_index, "out_index")?;
        *out = rasa_select(&texts_arg(texts, n)?)?.index;
        Ok(())
    })
}

/// Agreement on a 0 to 100 scale among `texts`.
#[no_mangle]
pub unsafe extern "C" fn ags_agreement_score(texts: *const *const c_char, n: usize, out: *mut f64) -> AgsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = agreement_of_texts(&texts_arg(texts, n)?)?.value();
        Ok(())
    })
}
