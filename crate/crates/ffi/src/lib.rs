//! C ABI over the `tabrep` engine.
//!
//! Conventions:
//! - Every fallible function returns a [`TabrepStatus`]; on anything but
//!   `TABREP_STATUS_OK` a message is available from [`tabrep_last_error`]
//!   on the same thread.
//! - Results come back through out-pointers. Handles and strings returned
//!   this way are owned by the caller and released with the matching
//!   `*_free` function. Out-pointers are left untouched on error.
//! - No function unwinds into the caller; a Rust panic becomes
//!   `TABREP_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use tabrep::chunker::{build_corpus, read_chunks_jsonl, write_chunks_jsonl, ChunkLevel, ReprConfig, Separator};
use tabrep::embed::{hash_embed, HashEmbedder};
use tabrep::eval::build_index;
use tabrep::ingest::{load_normalized, parse_docx, save_normalized};
use tabrep::{Document, EmbeddingVector, SearchHit, VectorIndex};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TabrepStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    ParseError = 4,
    InvalidDocument = 5,
    EmbedError = 6,
    IndexError = 7,
    Panic = 99,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TabrepChunkLevel {
    Table = 0,
    Row = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TabrepSeparator {
    Pipe = 0,
    Space = 1,
}

/// One cell of the representation grid.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct TabrepReprConfig {
    pub chunk_level: TabrepChunkLevel,
    pub separator: TabrepSeparator,
    pub repeat_header: bool,
    pub include_text: bool,
}

impl From<TabrepReprConfig> for ReprConfig {
    fn from(c: TabrepReprConfig) -> Self {
        ReprConfig {
            chunk_level: match c.chunk_level {
                TabrepChunkLevel::Table => ChunkLevel::Table,
                TabrepChunkLevel::Row => ChunkLevel::Row,
            },
            separator: match c.separator {
                TabrepSeparator::Pipe => Separator::Pipe,
                TabrepSeparator::Space => Separator::Space,
            },
            repeat_header: c.repeat_header,
            include_text: c.include_text,
        }
    }
}

/// Opaque parsed document.
pub struct TabrepDocument {
    inner: Document,
}

/// Opaque vector index.
pub struct TabrepIndex {
    inner: VectorIndex,
}

/// Opaque top-k result list.
pub struct TabrepHits {
    hits: Vec<SearchHit>,
    ids: Vec<CString>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

type Failure = (TabrepStatus, String);

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> TabrepStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            TabrepStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            TabrepStatus::Panic
        }
    }
}

fn fail<T>(status: TabrepStatus, msg: impl ToString) -> Result<T, Failure> {
    Err((status, msg.to_string()))
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return fail(TabrepStatus::NullArgument, format!("{name} is NULL"));
    }
    CStr::from_ptr(p)
        .to_str()
        .or_else(|_| fail(TabrepStatus::InvalidUtf8, format!("{name} is not valid UTF-8")))
}

unsafe fn bytes_arg<'a, T>(p: *const T, len: usize, name: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return fail(TabrepStatus::NullArgument, format!("{name} is NULL"));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn ref_arg<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .map_or_else(|| fail(TabrepStatus::NullArgument, format!("{name} is NULL")), Ok)
}

fn out_arg<T>(p: *mut T, name: &str) -> Result<(), Failure> {
    if p.is_null() {
        fail(TabrepStatus::NullArgument, format!("{name} is NULL"))
    } else {
        Ok(())
    }
}

fn into_c_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .or_else(|_| fail(TabrepStatus::InvalidArgument, "output contains a NUL byte"))
}

/// Message for the last failed call on this thread, or NULL after a
/// successful call. The pointer stays valid until the next call into this
/// library on the same thread.
#[no_mangle]
pub extern "C" fn tabrep_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tabrep_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn tabrep_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// ---------------------------------------------------------------------------
// documents

/// Parses a .docx archive held in memory.
///
/// # Safety
/// `bytes` must point to `len` readable bytes, `doc_id` to a NUL-terminated
/// string and `out` to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn tabrep_document_from_docx(
    bytes: *const u8,
    len: usize,
    doc_id: *const c_char,
    out: *mut *mut TabrepDocument,
) -> TabrepStatus {
    guard(|| {
        let data = bytes_arg(bytes, len, "bytes")?;
        let id = str_arg(doc_id, "doc_id")?;
        out_arg(out, "out")?;
        let inner = parse_docx(data, id).or_else(|e| fail(TabrepStatus::ParseError, e))?;
        *out = Box::into_raw(Box::new(TabrepDocument { inner }));
        Ok(())
    })
}

/// Loads a document from normalized JSON.
///
/// # Safety
/// `json` must be NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tabrep_document_from_json(
    json: *const c_char,
    out: *mut *mut TabrepDocument,
) -> TabrepStatus {
    guard(|| {
        let text = str_arg(json, "json")?;
        out_arg(out, "out")?;
        let inner = load_normalized(text).or_else(|e| fail(TabrepStatus::ParseError, e))?;
        *out = Box::into_raw(Box::new(TabrepDocument { inner }));
        Ok(())
    })
}

/// Serializes a document to normalized JSON. Free the result with
/// [`tabrep_string_free`].
///
/// # Safety
/// `doc` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tabrep_document_to_json(
    doc: *const TabrepDocument,
    out: *mut *mut c_char,
) -> TabrepStatus {
    guard(|| {
        let d = ref_arg(doc, "doc")?;
        out_arg(out, "out")?;
        *out = into_c_string(save_normalized(&d.inner))?;
        Ok(())
    })
}

/// Number of tables in the document, 0 for NULL.
///
/// # Safety
/// `doc` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tabrep_document_table_count(doc: *const TabrepDocument) -> usize {
    doc.as_ref().map_or(0, |d| d.inner.tables().count())
}

/// # Safety
/// `doc` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tabrep_document_free(doc: *mut TabrepDocument) {
    if !doc.is_null() {
        drop(Box::from_raw(doc));
    }
}

/// Builds the chunk corpus of `count` documents under `config` and returns
/// it as JSON Lines. Free the result with [`tabrep_string_free`].
///
/// # Safety
/// `docs` must point to `count` live document handles and `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn tabrep_chunk_jsonl(
    docs: *const *const TabrepDocument,
    count: usize,
    config: TabrepReprConfig,
    out: *mut *mut c_char,
) -> TabrepStatus {
    guard(|| {
        let handles = bytes_arg(docs, count, "docs")?;
        out_arg(out, "out")?;
        let mut corpus = Vec::with_capacity(count);
        for (i, h) in handles.iter().enumerate() {
            corpus.push(ref_arg(*h, &format!("docs[{i}]"))?.inner.clone());
        }
        let chunks =
            build_corpus(&corpus, &config.into()).or_else(|e| fail(TabrepStatus::InvalidDocument, e))?;
        *out = into_c_string(write_chunks_jsonl(&chunks))?;
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// embeddings and index

/// Writes the unit-norm hash embedding of `text` into `out[0..dim]`.
///
/// # Safety
/// `text` must be NUL-terminated and `out` must have room for `dim`
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn tabrep_hash_embed(text: *const c_char, dim: usize, out: *mut f64) -> TabrepStatus {
    guard(|| {
        let t = str_arg(text, "text")?;
        out_arg(out, "out")?;
        let v = hash_embed(t, dim).or_else(|e| fail(TabrepStatus::EmbedError, e))?;
        ptr::copy_nonoverlapping(v.values().as_ptr(), out, dim);
        Ok(())
    })
}

/// Embeds every chunk of a chunk JSONL text with the hash embedder of
/// dimension `dim` and indexes the vectors.
///
/// # Safety
/// `chunks_jsonl` must be NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tabrep_index_build_hash(
    chunks_jsonl: *const c_char,
    dim: usize,
    out: *mut *mut TabrepIndex,
) -> TabrepStatus {
    guard(|| {
        let text = str_arg(chunks_jsonl, "chunks_jsonl")?;
        out_arg(out, "out")?;
        let chunks = read_chunks_jsonl(text).or_else(|e| fail(TabrepStatus::ParseError, e))?;
        let provider = HashEmbedder::new(dim).or_else(|e| fail(TabrepStatus::InvalidArgument, e))?;
        let inner = build_index(&chunks, &provider, None).or_else(|e| fail(TabrepStatus::IndexError, e))?;
        *out = Box::into_raw(Box::new(TabrepIndex { inner }));
        Ok(())
    })
}

/// Reads an index from its file bytes.
///
/// # Safety
/// `bytes` must point to `len` readable bytes and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tabrep_index_load(bytes: *const u8, len: usize, out: *mut *mut TabrepIndex) -> TabrepStatus {
    guard(|| {
        let data = bytes_arg(bytes, len, "bytes")?;
        out_arg(out, "out")?;
        let inner = VectorIndex::load(data).or_else(|e| fail(TabrepStatus::IndexError, e))?;
        *out = Box::into_raw(Box::new(TabrepIndex { inner }));
        Ok(())
    })
}

/// Serializes an index. The buffer is released with
/// [`tabrep_bytes_free`] and the same length.
///
/// # Safety
/// `index` must be a live handle; `out` and `out_len` writable.
#[no_mangle]
pub unsafe extern "C" fn tabrep_index_save(
    index: *const TabrepIndex,
    out: *mut *mut u8,
    out_len: *mut usize,
) -> TabrepStatus {
    guard(|| {
        let idx = ref_arg(index, "index")?;
        out_arg(out, "out")?;
        out_arg(out_len, "out_len")?;
        let bytes = idx.inner.save().into_boxed_slice();
        *out_len = bytes.len();
        *out = Box::into_raw(bytes).cast();
        Ok(())
    })
}

/// # Safety
/// `bytes`/`len` must come from [`tabrep_index_save`] unchanged.
#[no_mangle]
pub unsafe extern "C" fn tabrep_bytes_free(bytes: *mut u8, len: usize) {
    if !bytes.is_null() {
        drop(Box::from_raw(ptr::slice_from_raw_parts_mut(bytes, len)));
    }
}

/// Number of indexed vectors, 0 for NULL.
///
/// # Safety
/// `index` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tabrep_index_len(index: *const TabrepIndex) -> usize {
    index.as_ref().map_or(0, |i| i.inner.len())
}

/// Vector dimension, 0 for NULL.
///
/// # Safety
/// `index` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tabrep_index_dim(index: *const TabrepIndex) -> usize {
    index.as_ref().map_or(0, |i| i.inner.dim())
}

/// Exact top-`k` search for a unit-norm query of length `dim`.
///
/// # Safety
/// `index` must be a live handle, `query` must point to `dim` doubles and
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tabrep_index_topk(
    index: *const TabrepIndex,
    query: *const f64,
    dim: usize,
    k: usize,
    out: *mut *mut TabrepHits,
) -> TabrepStatus {
    guard(|| {
        let idx = ref_arg(index, "index")?;
        let q = bytes_arg(query, dim, "query")?;
        out_arg(out, "out")?;
        let qv = EmbeddingVector::from_unit(q.to_vec()).or_else(|e| fail(TabrepStatus::InvalidArgument, e))?;
        let hits = idx.inner.topk(&qv, k).or_else(|e| fail(TabrepStatus::IndexError, e))?;
        let ids = hits
            .iter()
            .map(|h| CString::new(h.chunk_id.as_str()))
            .collect::<Result<Vec<_>, _>>()
            .or_else(|_| fail(TabrepStatus::IndexError, "chunk id contains a NUL byte"))?;
        *out = Box::into_raw(Box::new(TabrepHits { hits, ids }));
        Ok(())
    })
}

/// # Safety
/// `index` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tabrep_index_free(index: *mut TabrepIndex) {
    if !index.is_null() {
        drop(Box::from_raw(index));
    }
}

/// Number of hits, 0 for NULL.
///
/// # Safety
/// `hits` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tabrep_hits_len(hits: *const TabrepHits) -> usize {
    hits.as_ref().map_or(0, |h| h.hits.len())
}

/// Hit `i` (0-based, best first). `chunk_id` borrows from `hits` and is
/// valid until the list is freed. Either out-pointer may be NULL.
///
/// # Safety
/// `hits` must be a live handle; non-NULL out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn tabrep_hits_get(
    hits: *const TabrepHits,
    i: usize,
    chunk_id: *mut *const c_char,
    score: *mut f64,
) -> TabrepStatus {
    guard(|| {
        let h = ref_arg(hits, "hits")?;
        let Some(hit) = h.hits.get(i) else {
            return fail(
                TabrepStatus::InvalidArgument,
                format!("hit {i} out of range (len {})", h.hits.len()),
            );
        };
        if !chunk_id.is_null() {
            *chunk_id = h.ids[i].as_ptr();
        }
        if !score.is_null() {
            *score = hit.score;
        }
        Ok(())
    })
}

/// # Safety
/// `hits` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tabrep_hits_free(hits: *mut TabrepHits) {
    if !hits.is_null() {
        drop(Box::from_raw(hits));
    }
}
