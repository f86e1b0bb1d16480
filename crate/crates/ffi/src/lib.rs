//! C interface. Every function returns an [`M1tautStatus`]; on failure a
//! message is kept per thread and read with [`m1taut_last_error_message`].
//! Strings handed out must be released with [`m1taut_string_free`], handles
//! with their matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use m1taut::cli::FEASIBLE_N;
use m1taut::config::{CtComplex, CtPage};
use m1taut::graphs::StableGraph;
use m1taut::taut::{self, GetzlerRelationData};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum M1tautStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Infeasible = 4,
    BufferTooSmall = 5,
    Internal = 6,
}

/// A computed page of the Cohen-Taylor spectral sequence.
pub struct M1tautCtPage(CtPage);

/// A validated genus-one stable graph.
pub struct M1tautGraph(StableGraph);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: M1tautStatus, msg: impl Into<String>) -> M1tautStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> M1tautStatus) -> M1tautStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(M1tautStatus::Internal, "internal error"),
    }
}

fn check_n(n: usize) -> Result<(), M1tautStatus> {
    if n == 0 {
        return Err(fail(M1tautStatus::InvalidArgument, "n must be at least 1"));
    }
    if n > FEASIBLE_N {
        return Err(fail(M1tautStatus::Infeasible, format!("n = {n} exceeds the feasibility bound {FEASIBLE_N}")));
    }
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> M1tautStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            M1tautStatus::Ok
        }
        Err(_) => fail(M1tautStatus::Internal, "string contains a NUL byte"),
    }
}

/// Message for the last failure on this thread, or NULL. Owned by the library;
/// valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn m1taut_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn m1taut_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Frees a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn m1taut_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Even Betti numbers for `n` points. Writes `n + 1` values into `out`;
/// `len` receives the required length even when `capacity` is too small.
///
/// # Safety
/// `out` must hold `capacity` values; `len` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn m1taut_even_betti(
    n: usize,
    with_relation_data: bool,
    out: *mut usize,
    capacity: usize,
    len: *mut usize,
) -> M1tautStatus {
    guard(|| {
        if len.is_null() || (out.is_null() && capacity > 0) {
            return fail(M1tautStatus::NullPointer, "null output pointer");
        }
        if let Err(s) = check_n(n) {
            return s;
        }
        let data = with_relation_data.then(GetzlerRelationData::bundled);
        let betti: Vec<usize> = taut::betti_table(n, data.as_ref()).into_iter().map(|r| r.betti).collect();
        *len = betti.len();
        if capacity < betti.len() {
            return fail(M1tautStatus::BufferTooSmall, format!("need room for {} values", betti.len()));
        }
        ptr::copy_nonoverlapping(betti.as_ptr(), out, betti.len());
        M1tautStatus::Ok
    })
}

/// All stable graphs with `n` legs and `codim` edges as a JSON array.
///
/// # Safety
/// `out` must be valid for writing; free the result with [`m1taut_string_free`].
#[no_mangle]
pub unsafe extern "C" fn m1taut_graphs_json(n: usize, codim: usize, out: *mut *mut c_char) -> M1tautStatus {
    guard(|| {
        if out.is_null() {
            return fail(M1tautStatus::NullPointer, "null output pointer");
        }
        if let Err(s) = check_n(n) {
            return s;
        }
        let list: Vec<_> = if codim <= n { taut::strata(n)[codim].iter().map(StableGraph::to_json).collect() } else { Vec::new() };
        write_string(out, serde_json::Value::Array(list).to_string())
    })
}

/// Computes page 2 or 3 for `n` points.
///
/// # Safety
/// `out` must be valid for writing; release with [`m1taut_ct_page_free`].
#[no_mangle]
pub unsafe extern "C" fn m1taut_ct_page_new(n: usize, page: u8, out: *mut *mut M1tautCtPage) -> M1tautStatus {
    guard(|| {
        if out.is_null() {
            return fail(M1tautStatus::NullPointer, "null output pointer");
        }
        if page != 2 && page != 3 {
            return fail(M1tautStatus::InvalidArgument, format!("no page {page}; pages 2 and 3 exist"));
        }
        if let Err(s) = check_n(n) {
            return s;
        }
        *out = Box::into_raw(Box::new(M1tautCtPage(CtComplex::new(n).page(page))));
        M1tautStatus::Ok
    })
}

/// Dimension and SL2-invariant count of entry `(p, q)`.
///
/// # Safety
/// `page` must be a live handle; `dim` and `invariants` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn m1taut_ct_page_entry(
    page: *const M1tautCtPage,
    p: usize,
    q: usize,
    dim: *mut u64,
    invariants: *mut u64,
) -> M1tautStatus {
    guard(|| {
        if page.is_null() || dim.is_null() || invariants.is_null() {
            return fail(M1tautStatus::NullPointer, "null pointer");
        }
        match (*page).0.entry(p, q) {
            Some(e) => {
                *dim = e.dim;
                *invariants = e.sl2.invariants();
                M1tautStatus::Ok
            }
            None => fail(M1tautStatus::InvalidArgument, format!("no entry ({p},{q})")),
        }
    })
}

/// The page as pretty-printed JSON, identical to the command-line dump.
///
/// # Safety
/// `page` must be a live handle; `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn m1taut_ct_page_to_json(page: *const M1tautCtPage, out: *mut *mut c_char) -> M1tautStatus {
    guard(|| {
        if page.is_null() || out.is_null() {
            return fail(M1tautStatus::NullPointer, "null pointer");
        }
        let text = serde_json::to_string_pretty(&(*page).0.to_json()).expect("JSON values serialize");
        write_string(out, text + "\n")
    })
}

/// Releases a page handle. NULL is ignored.
///
/// # Safety
/// `page` must come from [`m1taut_ct_page_new`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn m1taut_ct_page_free(page: *mut M1tautCtPage) {
    if !page.is_null() {
        drop(Box::from_raw(page));
    }
}

/// Parses and validates a graph in either JSON layout.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn m1taut_graph_from_json(json: *const c_char, out: *mut *mut M1tautGraph) -> M1tautStatus {
    guard(|| {
        if json.is_null() || out.is_null() {
            return fail(M1tautStatus::NullPointer, "null pointer");
        }
        let Ok(text) = CStr::from_ptr(json).to_str() else {
            return fail(M1tautStatus::Parse, "input is not UTF-8");
        };
        let value: serde_json::Value = match serde_json::from_str(text) {
            Ok(v) => v,
            Err(e) => return fail(M1tautStatus::Parse, e.to_string()),
        };
        match StableGraph::from_json(&value) {
            Ok(g) => {
                *out = Box::into_raw(Box::new(M1tautGraph(g)));
                M1tautStatus::Ok
            }
            Err(e) => fail(M1tautStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Order of the automorphism group.
///
/// # Safety
/// `graph` must be a live handle; `count` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn m1taut_graph_automorphism_count(graph: *const M1tautGraph, count: *mut u64) -> M1tautStatus {
    guard(|| {
        if graph.is_null() || count.is_null() {
            return fail(M1tautStatus::NullPointer, "null pointer");
        }
        *count = (*graph).0.automorphism_count();
        M1tautStatus::Ok
    })
}

/// Copies the canonical key into `buf`. Two graphs are isomorphic exactly
/// when their keys are equal. `len` receives the key length even when
/// `capacity` is too small.
///
/// # Safety
/// `graph` must be a live handle; `buf` must hold `capacity` bytes.
#[no_mangle]
pub unsafe extern "C" fn m1taut_graph_canonical_key(
    graph: *const M1tautGraph,
    buf: *mut u8,
    capacity: usize,
    len: *mut usize,
) -> M1tautStatus {
    guard(|| {
        if graph.is_null() || len.is_null() || (buf.is_null() && capacity > 0) {
            return fail(M1tautStatus::NullPointer, "null pointer");
        }
        let key = match (*graph).0.canonical_form() {
            Ok(k) => k,
            Err(e) => return fail(M1tautStatus::InvalidArgument, e.to_string()),
        };
        let bytes = key.as_bytes();
        *len = bytes.len();
        if capacity < bytes.len() {
            return fail(M1tautStatus::BufferTooSmall, format!("need {} bytes", bytes.len()));
        }
        ptr::copy_nonoverlapping(bytes.as_ptr(), buf, bytes.len());
        M1tautStatus::Ok
    })
}

/// The graph in vertex-list JSON.
///
/// # Safety
/// `graph` must be a live handle; `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn m1taut_graph_to_json(graph: *const M1tautGraph, out: *mut *mut c_char) -> M1tautStatus {
    guard(|| {
        if graph.is_null() || out.is_null() {
            return fail(M1tautStatus::NullPointer, "null pointer");
        }
        write_string(out, (*graph).0.to_json().to_string())
    })
}

/// Releases a graph handle. NULL is ignored.
///
/// # Safety
/// `graph` must come from [`m1taut_graph_from_json`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn m1taut_graph_free(graph: *mut M1tautGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}
