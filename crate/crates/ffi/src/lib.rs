//! C ABI for `fasclique`. Objects are opaque heap handles released with
//! their `*_free` function. Fallible calls return an [`FcStatus`]; the
//! message for the last failure on the calling thread is available from
//! [`fc_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fasclique::constants::{constants_for, smallest_d, ConstantsMode};
use fasclique::oracle::brute_force_fk;
use fasclique::order::VertexOrder;
use fasclique::packing::{find_clique_packing, PackingOptions, PackingResult};
use fasclique::seed::RngSeed;
use fasclique::tournament::Tournament;
use fasclique::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FcStatus {
    Ok = 0,
    NullPointer = 1,
    Parameter = 2,
    Precondition = 3,
    Parse = 4,
    Structural = 5,
    StageFailure = 6,
    Resource = 7,
    Io = 8,
    Panic = 9,
}

impl From<&Error> for FcStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Parameter(_) => FcStatus::Parameter,
            Error::Precondition(_) => FcStatus::Precondition,
            Error::Parse { .. } => FcStatus::Parse,
            Error::Structural(_) => FcStatus::Structural,
            Error::Stage(_) => FcStatus::StageFailure,
            Error::Resource(_) => FcStatus::Resource,
            Error::Io(_) => FcStatus::Io,
        }
    }
}

/// Opaque tournament handle.
pub struct FcTournament(Tournament);

/// Opaque packing result handle.
pub struct FcPackingResult {
    k: usize,
    result: PackingResult,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: FcStatus, msg: impl Into<String>) -> FcStatus {
    set_error(msg.into());
    status
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> fasclique::Result<()>) -> FcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FcStatus::Ok,
        Ok(Err(e)) => fail(FcStatus::from(&e), e.to_string()),
        Err(_) => fail(FcStatus::Panic, "internal panic"),
    }
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Samples a uniformly random tournament with `k` parts of size `n`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn fc_tournament_random(n: usize, k: usize, seed: u64, out: *mut *mut FcTournament) -> FcStatus {
    if out.is_null() {
        return fail(FcStatus::NullPointer, "out is null");
    }
    guard(|| {
        let t = Tournament::sample_random(n, k, RngSeed(seed))?;
        *out = Box::into_raw(Box::new(FcTournament(t)));
        Ok(())
    })
}

/// Parses a tournament from `.kpt` bytes.
///
/// # Safety
/// `data` must point to `len` readable bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fc_tournament_from_kpt(data: *const u8, len: usize, out: *mut *mut FcTournament) -> FcStatus {
    if data.is_null() || out.is_null() {
        return fail(FcStatus::NullPointer, "data or out is null");
    }
    guard(|| {
        let bytes = std::slice::from_raw_parts(data, len);
        let t = Tournament::from_kpt_bytes(bytes)?;
        *out = Box::into_raw(Box::new(FcTournament(t)));
        Ok(())
    })
}

/// Serializes to `.kpt`. The buffer is released with [`fc_bytes_free`].
///
/// # Safety
/// `t` must be a live handle; `out_data` and `out_len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fc_tournament_to_kpt(
    t: *const FcTournament,
    out_data: *mut *mut u8,
    out_len: *mut usize,
) -> FcStatus {
    if t.is_null() || out_data.is_null() || out_len.is_null() {
        return fail(FcStatus::NullPointer, "null argument");
    }
    guard(|| {
        let bytes = (*t).0.to_kpt_bytes().into_boxed_slice();
        *out_len = bytes.len();
        *out_data = Box::into_raw(bytes) as *mut u8;
        Ok(())
    })
}

/// # Safety
/// `data` and `len` must come from one [`fc_tournament_to_kpt`] call.
#[no_mangle]
pub unsafe extern "C" fn fc_bytes_free(data: *mut u8, len: usize) {
    if !data.is_null() {
        drop(Box::from_raw(ptr::slice_from_raw_parts_mut(data, len)));
    }
}

/// Number of parts, or 0 for a null handle.
///
/// # Safety
/// `t` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fc_tournament_k(t: *const FcTournament) -> usize {
    t.as_ref().map_or(0, |t| t.0.k())
}

/// Total vertex count, or 0 for a null handle.
///
/// # Safety
/// `t` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fc_tournament_num_vertices(t: *const FcTournament) -> usize {
    t.as_ref().map_or(0, |t| t.0.num_vertices())
}

/// 1 if `u -> v`, 0 if not, -1 for a null handle or out-of-range vertex.
///
/// # Safety
/// `t` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fc_tournament_has_edge(t: *const FcTournament, u: usize, v: usize) -> c_int {
    match t.as_ref() {
        Some(t) if u < t.0.num_vertices() && v < t.0.num_vertices() => t.0.has_edge(u, v) as c_int,
        _ => -1,
    }
}

/// # Safety
/// `t` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fc_tournament_free(t: *mut FcTournament) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Runs the packing pipeline. `order` may be null for a random order drawn
/// from `seed`; otherwise it holds `order_len` vertex ids. A stage failure
/// still returns `Ok` with a result whose status reports it.
///
/// # Safety
/// `t` must be a live handle, `order` null or `order_len` readable ids,
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fc_pack(
    t: *const FcTournament,
    order: *const usize,
    order_len: usize,
    practical: bool,
    seed: u64,
    retries: usize,
    out: *mut *mut FcPackingResult,
) -> FcStatus {
    if t.is_null() || out.is_null() {
        return fail(FcStatus::NullPointer, "t or out is null");
    }
    guard(|| {
        let t = &(*t).0;
        let pi = if order.is_null() {
            VertexOrder::random(t.num_vertices(), &mut RngSeed(seed).derive(0, 1).rng())
        } else {
            VertexOrder::from_sequence(std::slice::from_raw_parts(order, order_len).to_vec())?
        };
        let mode = if practical {
            ConstantsMode::Practical
        } else {
            ConstantsMode::Theoretical
        };
        let c = constants_for(mode, t.k(), t.layout().part_size(0))?;
        let opts = PackingOptions {
            retries,
            ..Default::default()
        };
        let result = find_clique_packing(t, &pi, &c, RngSeed(seed), opts)?;
        *out = Box::into_raw(Box::new(FcPackingResult { k: t.k(), result }));
        Ok(())
    })
}

/// 1 on success, 0 on stage failure, -1 for a null handle.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fc_packing_is_success(r: *const FcPackingResult) -> c_int {
    r.as_ref().map_or(-1, |r| r.result.is_success() as c_int)
}

/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fc_packing_num_cliques(r: *const FcPackingResult) -> usize {
    r.as_ref().map_or(0, |r| r.result.cliques.len())
}

/// Copies clique `i` (k vertex ids) into `out`.
///
/// # Safety
/// `r` must be a live handle and `out` must have room for k ids.
#[no_mangle]
pub unsafe extern "C" fn fc_packing_clique(r: *const FcPackingResult, i: usize, out: *mut usize) -> FcStatus {
    let Some(r) = r.as_ref() else {
        return fail(FcStatus::NullPointer, "r is null");
    };
    if out.is_null() {
        return fail(FcStatus::NullPointer, "out is null");
    }
    let Some(c) = r.result.cliques.get(i) else {
        return fail(FcStatus::Parameter, format!("clique index {i} out of range"));
    };
    debug_assert_eq!(c.len(), r.k);
    ptr::copy_nonoverlapping(c.vertices().as_ptr(), out, c.len());
    FcStatus::Ok
}

/// The full result as JSON. Release with [`fc_string_free`].
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fc_packing_to_json(r: *const FcPackingResult) -> *mut c_char {
    let Some(r) = r.as_ref() else {
        fail(FcStatus::NullPointer, "r is null");
        return ptr::null_mut();
    };
    match serde_json::to_string(&r.result).ok().and_then(|s| CString::new(s).ok()) {
        Some(s) => s.into_raw(),
        None => {
            fail(FcStatus::Panic, "serialization failed");
            ptr::null_mut()
        }
    }
}

/// # Safety
/// `r` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fc_packing_free(r: *mut FcPackingResult) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Smallest integer d satisfying the constant inequalities for `k`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fc_smallest_d(k: usize, out: *mut u64) -> FcStatus {
    if out.is_null() {
        return fail(FcStatus::NullPointer, "out is null");
    }
    guard(|| {
        *out = smallest_d(k)?;
        Ok(())
    })
}

/// Exact f_k of a tiny tournament (at most 8 vertices).
///
/// # Safety
/// `t` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fc_brute_force_fk(t: *const FcTournament, out: *mut usize) -> FcStatus {
    if t.is_null() || out.is_null() {
        return fail(FcStatus::NullPointer, "t or out is null");
    }
    guard(|| {
        *out = brute_force_fk(&(*t).0)?;
        Ok(())
    })
}
