#ifndef AGGRESCRIBE_H
#define AGGRESCRIBE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>
#include <stdbool.h>

// Token granularity for [`ags_rover_consensus`] and
// [`ags_corpus_aggregate_rover`], passed as a `uint32_t`.
typedef enum AgsLevel {
  AGS_LEVEL_CHARACTER = 0,
  AGS_LEVEL_WORD = 1,
} AgsLevel;

typedef enum AgsStatus {
  AGS_STATUS_OK = 0,
  AGS_STATUS_NULL_ARGUMENT = 1,
  AGS_STATUS_INVALID_UTF8 = 2,
  // Bad argument value: unknown level or strategy, split sizes that do
  // not add up, threshold outside [0, 100].
  AGS_STATUS_USAGE = 3,
  // The data itself is unusable (malformed manifest, missing split, ...).
  AGS_STATUS_VALIDATION = 4,
  AGS_STATUS_IO = 5,
  AGS_STATUS_PANIC = 6,
} AgsStatus;

// Opaque corpus handle.
typedef struct AgsCorpus AgsCorpus;

// Message for the last failed call on this thread, or NULL. Valid until the
// next call into the library on the same thread.
const char *ags_last_error_message(void);

// Library version as a static string.
const char *ags_version(void);

void ags_string_free(char *s);

// Reads an NDJSON manifest. `*out` is set only on success.
enum AgsStatus ags_corpus_parse(const char *path, struct AgsCorpus **out);

void ags_corpus_free(struct AgsCorpus *corpus);

enum AgsStatus ags_corpus_len(const struct AgsCorpus *corpus, size_t *out);

// Writes the corpus as a manifest, atomically.
enum AgsStatus ags_corpus_write(const struct AgsCorpus *corpus, const char *path);

// Appends (or replaces) an `aggregate:rover` transcription on every line.
enum AgsStatus ags_corpus_aggregate_rover(struct AgsCorpus *corpus, uint32_t level);

// Appends (or replaces) an `aggregate:rasa` transcription on every line.
enum AgsStatus ags_corpus_aggregate_rasa(struct AgsCorpus *corpus);

// Records an agreement score on every line.
enum AgsStatus ags_corpus_annotate_agreement(struct AgsCorpus *corpus);

// Assigns every line to a split by human agreement.
enum AgsStatus ags_corpus_split_agreement(struct AgsCorpus *corpus);

// Seeded random split; the three sizes must add up to the corpus length.
enum AgsStatus ags_corpus_split_random(struct AgsCorpus *corpus,
                                       size_t train,
                                       size_t validation,
                                       size_t test,
                                       uint64_t seed);

// Copy of the corpus without the train lines whose recorded agreement is
// below `threshold`. Needs a split on every line and a score on train lines.
enum AgsStatus ags_corpus_filter(const struct AgsCorpus *corpus,
                                 double threshold,
                                 struct AgsCorpus **out);

// Writes `train.tsv`, `val.tsv`, `test.tsv` and `summary.json` into `dir`.
// `strategy` is one of the CLI strategy names. `out_records` may be NULL.
enum AgsStatus ags_corpus_emit(const struct AgsCorpus *corpus,
                               const char *strategy,
                               uint64_t seed,
                               const char *dir,
                               size_t *out_records);

// Character-level edit distance.
enum AgsStatus ags_edit_distance(const char *a, const char *b, size_t *out);

enum AgsStatus ags_cer(const char *hypothesis, const char *reference, double *out);

enum AgsStatus ags_wer(const char *hypothesis, const char *reference, double *out);

enum AgsStatus ags_sym_char_distance(const char *a, const char *b, double *out);

// Consensus text of `n` transcriptions. Free `*out` with [`ags_string_free`].
enum AgsStatus ags_rover_consensus(const char *const *texts, size_t n, uint32_t level, char **out);

// Index of the selected transcription among `texts`.
enum AgsStatus ags_rasa_select(const char *const *texts, size_t n, size_t *out_index);

// Agreement on a 0 to 100 scale among `texts`.
enum AgsStatus ags_agreement_score(const char *const *texts, size_t n, double *out);

#endif  /* AGGRESCRIBE_H */
