#ifndef TABREP_H
#define TABREP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum TabrepStatus {
  TABREP_STATUS_OK = 0,
  TABREP_STATUS_NULL_ARGUMENT = 1,
  TABREP_STATUS_INVALID_UTF8 = 2,
  TABREP_STATUS_INVALID_ARGUMENT = 3,
  TABREP_STATUS_PARSE_ERROR = 4,
  TABREP_STATUS_INVALID_DOCUMENT = 5,
  TABREP_STATUS_EMBED_ERROR = 6,
  TABREP_STATUS_INDEX_ERROR = 7,
  TABREP_STATUS_PANIC = 99,
} TabrepStatus;

typedef enum TabrepChunkLevel {
  TABREP_CHUNK_LEVEL_TABLE = 0,
  TABREP_CHUNK_LEVEL_ROW = 1,
} TabrepChunkLevel;

typedef enum TabrepSeparator {
  TABREP_SEPARATOR_PIPE = 0,
  TABREP_SEPARATOR_SPACE = 1,
} TabrepSeparator;

// Opaque parsed document.
typedef struct TabrepDocument TabrepDocument;

// Opaque top-k result list.
typedef struct TabrepHits TabrepHits;

// Opaque vector index.
typedef struct TabrepIndex TabrepIndex;

// One cell of the representation grid.
typedef struct TabrepReprConfig {
  enum TabrepChunkLevel chunk_level;
  enum TabrepSeparator separator;
  bool repeat_header;
  bool include_text;
} TabrepReprConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL after a
// successful call. The pointer stays valid until the next call into this
// library on the same thread.
const char *tabrep_last_error(void);

// Library version as a static NUL-terminated string.
const char *tabrep_version(void);

// Releases a string returned by this library. NULL is ignored.
//
// # Safety
// `s` must come from this library and not have been freed already.
void tabrep_string_free(char *s);

// Parses a .docx archive held in memory.
//
// # Safety
// `bytes` must point to `len` readable bytes, `doc_id` to a NUL-terminated
// string and `out` to writable storage for one pointer.
enum TabrepStatus tabrep_document_from_docx(const uint8_t *bytes,
                                            uintptr_t len,
                                            const char *doc_id,
                                            struct TabrepDocument **out);

// Loads a document from normalized JSON.
//
// # Safety
// `json` must be NUL-terminated and `out` writable.
enum TabrepStatus tabrep_document_from_json(const char *json, struct TabrepDocument **out);

// Serializes a document to normalized JSON. Free the result with
// [`tabrep_string_free`].
//
// # Safety
// `doc` must be a live handle and `out` writable.
enum TabrepStatus tabrep_document_to_json(const struct TabrepDocument *doc, char **out);

// Number of tables in the document, 0 for NULL.
//
// # Safety
// `doc` must be NULL or a live handle.
uintptr_t tabrep_document_table_count(const struct TabrepDocument *doc);

// # Safety
// `doc` must be NULL or a handle not yet freed.
void tabrep_document_free(struct TabrepDocument *doc);

// Builds the chunk corpus of `count` documents under `config` and returns
// it as JSON Lines. Free the result with [`tabrep_string_free`].
//
// # Safety
// `docs` must point to `count` live document handles and `out` must be
// writable.
enum TabrepStatus tabrep_chunk_jsonl(const struct TabrepDocument *const *docs,
                                     uintptr_t count,
                                     struct TabrepReprConfig config,
                                     char **out);

// Writes the unit-norm hash embedding of `text` into `out[0..dim]`.
//
// # Safety
// `text` must be NUL-terminated and `out` must have room for `dim`
// doubles.
enum TabrepStatus tabrep_hash_embed(const char *text, uintptr_t dim, double *out);

// Embeds every chunk of a chunk JSONL text with the hash embedder of
// dimension `dim` and indexes the vectors.
//
// # Safety
// `chunks_jsonl` must be NUL-terminated and `out` writable.
enum TabrepStatus tabrep_index_build_hash(const char *chunks_jsonl,
                                          uintptr_t dim,
                                          struct TabrepIndex **out);

// Reads an index from its file bytes.
//
// # Safety
// `bytes` must point to `len` readable bytes and `out` must be writable.
enum TabrepStatus tabrep_index_load(const uint8_t *bytes, uintptr_t len, struct TabrepIndex **out);

// Serializes an index. The buffer is released with
// [`tabrep_bytes_free`] and the same length.
//
// # Safety
// `index` must be a live handle; `out` and `out_len` writable.
enum TabrepStatus tabrep_index_save(const struct TabrepIndex *index,
                                    uint8_t **out,
                                    uintptr_t *out_len);

// # Safety
// `bytes`/`len` must come from [`tabrep_index_save`] unchanged.
void tabrep_bytes_free(uint8_t *bytes, uintptr_t len);

// Number of indexed vectors, 0 for NULL.
//
// # Safety
// `index` must be NULL or a live handle.
uintptr_t tabrep_index_len(const struct TabrepIndex *index);

// Vector dimension, 0 for NULL.
//
// # Safety
// `index` must be NULL or a live handle.
uintptr_t tabrep_index_dim(const struct TabrepIndex *index);

// Exact top-`k` search for a unit-norm query of length `dim`.
//
// # Safety
// `index` must be a live handle, `query` must point to `dim` doubles and
// `out` must be writable.
enum TabrepStatus tabrep_index_topk(const struct TabrepIndex *index,
                                    const double *query,
                                    uintptr_t dim,
                                    uintptr_t k,
                                    struct TabrepHits **out);

// # Safety
// `index` must be NULL or a handle not yet freed.
void tabrep_index_free(struct TabrepIndex *index);

// Number of hits, 0 for NULL.
//
// # Safety
// `hits` must be NULL or a live handle.
uintptr_t tabrep_hits_len(const struct TabrepHits *hits);

// Hit `i` (0-based, best first). `chunk_id` borrows from `hits` and is
// valid until the list is freed. Either out-pointer may be NULL.
//
// # Safety
// `hits` must be a live handle; non-NULL out-pointers must be writable.
enum TabrepStatus tabrep_hits_get(const struct TabrepHits *hits,
                                  uintptr_t i,
                                  const char **chunk_id,
                                  double *score);

// # Safety
// `hits` must be NULL or a handle not yet freed.
void tabrep_hits_free(struct TabrepHits *hits);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TABREP_H */
