//! C ABI for kleinlab.
//!
//! Every fallible function returns a [`KlStatus`]; on failure a message is
//! kept per thread and read with [`kl_last_error_message`]. Strings handed
//! out by the library are freed with [`kl_string_free`], embeddings with
//! [`kl_embedding_free`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use kleinlab::embedding::{embed_tree_ball, EmbeddingResult};
use kleinlab::free_group::{gamma, tree_dist, Word};
use kleinlab::minkowski::dist;
use kleinlab::scenario::{
    scenario_h4, scenario_nonrigidity, scenario_normal_subgroup, H4Params, NonrigidityParams,
    NormalSubgroupParams,
};
use kleinlab::Error;

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// A word could not be parsed or is too long.
    WordParse = 3,
    /// A parameter is outside its domain, or a buffer is too small.
    OutOfRange = 4,
    /// A geometric construction or certificate failed.
    Geometry = 5,
    /// A word is not a vertex of the embedded ball.
    NotFound = 6,
    Io = 7,
    Panic = 8,
}

/// A factored tree ball. Opaque to C.
pub struct KlEmbedding {
    inner: EmbeddingResult,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> KlStatus {
    match e {
        Error::WordParse(_) | Error::WordTooLong { .. } => KlStatus::WordParse,
        Error::OutOfRange(_) | Error::DimensionMismatch { .. } | Error::Empty(_) | Error::InvalidVector(_) => {
            KlStatus::OutOfRange
        }
        Error::Io(_) | Error::Render(_) => KlStatus::Io,
        Error::OutsideEmbedding(_) => KlStatus::NotFound,
        _ => KlStatus::Geometry,
    }
}

struct Fail(KlStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

/// Runs `f`, recording its error and converting panics.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> KlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            KlStatus::Ok
        }
        Ok(Err(Fail(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            KlStatus::Panic
        }
    }
}

fn nonnull<T>(p: *const T, what: &str) -> Result<(), Fail> {
    if p.is_null() {
        Err(Fail(KlStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(())
    }
}

/// # Safety
/// `p` is null or a NUL-terminated string.
unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    nonnull(p, what)?;
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(KlStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

/// # Safety
/// `p` is null or a NUL-terminated string.
unsafe fn word_arg(p: *const c_char, what: &str) -> Result<Word, Fail> {
    Ok(str_arg(p, what)?.parse::<Word>()?)
}

fn give_string(s: String, out: *mut *mut c_char) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|_| Fail(KlStatus::Io, "string contains NUL".into()))?;
    // SAFETY: caller checked `out` for null.
    unsafe { *out = c.into_raw() };
    Ok(())
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn kl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn kl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` is null or came from this library and has not been freed.
#[no_mangle]
pub unsafe extern "C" fn kl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Embeds the tree ball of `radius` with `cosh d = lambda^{tree distance}`.
///
/// # Safety
/// `out` is null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kl_embedding_new(lambda: f64, radius: usize, out: *mut *mut KlEmbedding) -> KlStatus {
    guard(|| {
        nonnull(out, "out")?;
        let inner = embed_tree_ball(radius, lambda)?;
        *out = Box::into_raw(Box::new(KlEmbedding { inner }));
        Ok(())
    })
}

/// # Safety
/// `e` is null or came from [`kl_embedding_new`] and has not been freed.
#[no_mangle]
pub unsafe extern "C" fn kl_embedding_free(e: *mut KlEmbedding) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// Number of embedded vertices; 0 for null.
///
/// # Safety
/// `e` is null or a live embedding.
#[no_mangle]
pub unsafe extern "C" fn kl_embedding_len(e: *const KlEmbedding) -> usize {
    e.as_ref().map_or(0, |e| e.inner.len())
}

/// Coordinates per point (hyperbolic dimension plus one); 0 for null.
///
/// # Safety
/// `e` is null or a live embedding.
#[no_mangle]
pub unsafe extern "C" fn kl_embedding_coords(e: *const KlEmbedding) -> usize {
    e.as_ref().map_or(0, |e| e.inner.ambient_dim + 1)
}

/// Largest relative error of the realized Gram matrix; NaN for null.
///
/// # Safety
/// `e` is null or a live embedding.
#[no_mangle]
pub unsafe extern "C" fn kl_embedding_residual(e: *const KlEmbedding) -> f64 {
    e.as_ref().map_or(f64::NAN, |e| e.inner.max_rel_residual)
}

/// Copies the hyperboloid coordinates of vertex `word` into `buf`, which
/// must hold [`kl_embedding_coords`] doubles.
///
/// # Safety
/// `e` is null or live; `word` is null or NUL-terminated; `buf` is null or
/// valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn kl_embedding_point(
    e: *const KlEmbedding,
    word: *const c_char,
    buf: *mut f64,
    len: usize,
) -> KlStatus {
    guard(|| {
        nonnull(e, "embedding")?;
        nonnull(buf, "buf")?;
        let e = &(*e).inner;
        let w = word_arg(word, "word")?;
        let p = e
            .point(&w)
            .ok_or_else(|| Fail(KlStatus::NotFound, format!("{w} is outside the radius-{} ball", e.radius)))?;
        let c = p.coords();
        if len < c.len() {
            return Err(Fail(KlStatus::OutOfRange, format!("buffer holds {len}, need {}", c.len())));
        }
        std::slice::from_raw_parts_mut(buf, c.len()).copy_from_slice(c.as_slice());
        Ok(())
    })
}

/// Hyperbolic distance between the images of two vertices.
///
/// # Safety
/// Pointers are null or valid; strings are NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn kl_embedding_distance(
    e: *const KlEmbedding,
    u: *const c_char,
    v: *const c_char,
    out: *mut f64,
) -> KlStatus {
    guard(|| {
        nonnull(e, "embedding")?;
        nonnull(out, "out")?;
        let e = &(*e).inner;
        let (u, v) = (word_arg(u, "u")?, word_arg(v, "v")?);
        let find = |w: &Word| {
            e.point(w)
                .ok_or_else(|| Fail(KlStatus::NotFound, format!("{w} is outside the radius-{} ball", e.radius)))
        };
        *out = dist(find(&u)?, find(&v)?)?;
        Ok(())
    })
}

/// `γ(word)` as a newly allocated string; free it with [`kl_string_free`].
///
/// # Safety
/// `word` is null or NUL-terminated; `out` is null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kl_gamma(word: *const c_char, out: *mut *mut c_char) -> KlStatus {
    guard(|| {
        nonnull(out, "out")?;
        let w = word_arg(word, "word")?;
        give_string(gamma(&w).to_string(), out)
    })
}

/// Distance between two vertices of the Cayley tree.
///
/// # Safety
/// Strings are null or NUL-terminated; `out` is null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kl_tree_dist(u: *const c_char, v: *const c_char, out: *mut usize) -> KlStatus {
    guard(|| {
        nonnull(out, "out")?;
        *out = tree_dist(&word_arg(u, "u")?, &word_arg(v, "v")?);
        Ok(())
    })
}

/// Runs a scenario with default parameters and returns its JSON report.
/// `name` is `nonrigidity`, `h4` or `normal-subgroup`; `passed` (optional)
/// receives the overall verdict as 0 or 1.
///
/// # Safety
/// `name` is null or NUL-terminated; `out` is null or valid for writes;
/// `passed` is null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn kl_scenario_json(
    name: *const c_char,
    seed: u64,
    out: *mut *mut c_char,
    passed: *mut i32,
) -> KlStatus {
    guard(|| {
        nonnull(out, "out")?;
        let report = match str_arg(name, "name")? {
            "nonrigidity" => scenario_nonrigidity(NonrigidityParams {
                seed,
                ..Default::default()
            })?,
            "h4" => scenario_h4(H4Params {
                seed,
                ..Default::default()
            })?,
            "normal-subgroup" => scenario_normal_subgroup(NormalSubgroupParams {
                seed,
                ..Default::default()
            })?,
            other => return Err(Fail(KlStatus::OutOfRange, format!("unknown scenario {other:?}"))),
        };
        if !passed.is_null() {
            *passed = i32::from(report.overall_pass);
        }
        give_string(report.to_json()?, out)
    })
}
