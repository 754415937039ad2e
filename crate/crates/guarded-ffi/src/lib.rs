//! C interface to `guarded-core`: parse a problem, answer its queries and
//! rewrite it into a formula to be checked on data.
//!
//! Every function returns a [`GsStatus`]. On failure, [`gs_last_error`]
//! describes the error on the calling thread. Strings handed out by the
//! library are released with [`gs_string_free`], problems with
//! [`gs_problem_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use guarded_core::qans::{answer, AnswerError, Options, Verdict};
use guarded_core::qrew::{rewrite_problem, PipelineError, RewriteError};
use guarded_core::syntax::{parse_problem, Problem};

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GsStatus {
    Ok = 0,
    /// A null pointer or a string that is not UTF-8.
    InvalidArgument = 1,
    Parse = 2,
    /// The input is outside the supported fragments.
    Unsupported = 3,
    /// The step budget ran out before saturation finished.
    Budget = 4,
    /// Rewriting found the query entailed by the rules alone.
    Entailed = 5,
    /// The saturation could not be rewritten.
    Rewrite = 6,
    /// An internal error; the library state is unchanged.
    Internal = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GsVerdict {
    No = 0,
    Yes = 1,
}

/// A parsed problem. Opaque to C.
pub struct GsProblem {
    inner: Problem,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

fn fail(status: GsStatus, msg: impl Into<String>) -> GsStatus {
    set_error(msg);
    status
}

/// Runs `f`, turning a panic into [`GsStatus::Internal`].
fn guard(f: impl FnOnce() -> GsStatus) -> GsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(e) => {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "internal error".into());
            fail(GsStatus::Internal, msg)
        }
    }
}

fn answer_status(e: &AnswerError) -> GsStatus {
    match e {
        AnswerError::Budget(_) => GsStatus::Budget,
        AnswerError::Clausify(_) => GsStatus::Unsupported,
    }
}

fn options(max_steps: u64, seed: u64) -> Options {
    let mut o = Options {
        seed,
        ..Options::default()
    };
    if max_steps > 0 {
        o.max_steps = max_steps;
    }
    o
}

fn owned(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

/// Message of the last failed call on this thread; empty if none. The
/// pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn gs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses problem text. On success `*out` owns a new problem.
///
/// # Safety
/// `src` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gs_problem_parse(src: *const c_char, out: *mut *mut GsProblem) -> GsStatus {
    guard(|| {
        if src.is_null() || out.is_null() {
            return fail(GsStatus::InvalidArgument, "null argument");
        }
        *out = ptr::null_mut();
        let Ok(text) = CStr::from_ptr(src).to_str() else {
            return fail(GsStatus::InvalidArgument, "source is not UTF-8");
        };
        match parse_problem(text) {
            Ok(p) => {
                *out = Box::into_raw(Box::new(GsProblem { inner: p }));
                GsStatus::Ok
            }
            Err(e) => fail(GsStatus::Parse, e.to_string()),
        }
    })
}

/// Releases a problem. Null is ignored.
///
/// # Safety
/// `p` must come from [`gs_problem_parse`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gs_problem_free(p: *mut GsProblem) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Decides whether the problem's rules and facts entail its queries.
/// `max_steps` of zero uses the default budget.
///
/// # Safety
/// `p` must be a live problem and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gs_answer(p: *const GsProblem, max_steps: u64, seed: u64, out: *mut GsVerdict) -> GsStatus {
    guard(|| {
        if p.is_null() || out.is_null() {
            return fail(GsStatus::InvalidArgument, "null argument");
        }
        match answer(&(*p).inner, options(max_steps, seed)) {
            Ok(a) => {
                *out = match a.verdict {
                    Verdict::Yes => GsVerdict::Yes,
                    Verdict::No => GsVerdict::No,
                };
                GsStatus::Ok
            }
            Err(e) => fail(answer_status(&e), e.to_string()),
        }
    })
}

/// Rewrites the problem's rules and queries, ignoring its facts. On
/// success `*formula` holds the `formula: ... .` statement and `*hash`
/// its SHA-256 in hex; release both with [`gs_string_free`]. Either
/// output pointer may be null if not wanted.
///
/// # Safety
/// `p` must be a live problem; non-null outputs must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn gs_rewrite(
    p: *const GsProblem,
    max_steps: u64,
    formula: *mut *mut c_char,
    hash: *mut *mut c_char,
) -> GsStatus {
    guard(|| {
        if p.is_null() {
            return fail(GsStatus::InvalidArgument, "null problem");
        }
        for o in [formula, hash] {
            if !o.is_null() {
                *o = ptr::null_mut();
            }
        }
        match rewrite_problem(&(*p).inner, options(max_steps, 0)) {
            Ok(r) => {
                if !formula.is_null() {
                    *formula = owned(r.text);
                }
                if !hash.is_null() {
                    *hash = owned(r.hash);
                }
                GsStatus::Ok
            }
            Err(PipelineError::Answer(e)) => fail(answer_status(&e), e.to_string()),
            Err(PipelineError::Rewrite(RewriteError::Bottom)) => {
                fail(GsStatus::Entailed, "the rules alone entail the query")
            }
            Err(PipelineError::Rewrite(e)) => fail(GsStatus::Rewrite, e.to_string()),
        }
    })
}

/// Releases a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(src: &str) -> *mut GsProblem {
        let c = CString::new(src).unwrap();
        let mut p = ptr::null_mut();
        assert_eq!(unsafe { gs_problem_parse(c.as_ptr(), &mut p) }, GsStatus::Ok);
        p
    }

    fn last_error() -> String {
        unsafe { CStr::from_ptr(gs_last_error()) }.to_string_lossy().into_owned()
    }

    #[test]
    fn answer_round_trip() {
        let p = parse("fact: a(c). query: ? [X] : a(X).");
        let mut v = GsVerdict::No;
        assert_eq!(unsafe { gs_answer(p, 0, 0, &mut v) }, GsStatus::Ok);
        assert_eq!(v, GsVerdict::Yes);
        unsafe { gs_problem_free(p) };
    }

    #[test]
    fn parse_errors_set_the_message() {
        let c = CString::new("rule: ! [X] : (").unwrap();
        let mut p = ptr::null_mut();
        assert_eq!(unsafe { gs_problem_parse(c.as_ptr(), &mut p) }, GsStatus::Parse);
        assert!(p.is_null());
        assert!(!last_error().is_empty());
    }

    #[test]
    fn null_arguments_are_rejected() {
        let mut p = ptr::null_mut();
        assert_eq!(unsafe { gs_problem_parse(ptr::null(), &mut p) }, GsStatus::InvalidArgument);
        let mut v = GsVerdict::No;
        assert_eq!(unsafe { gs_answer(ptr::null(), 0, 0, &mut v) }, GsStatus::InvalidArgument);
        unsafe {
            gs_problem_free(ptr::null_mut());
            gs_string_free(ptr::null_mut());
        }
    }

    #[test]
    fn rewrite_returns_formula_and_hash() {
        let p = parse("rule: ! [X] : (a(X) => b(X)). query: ? [X] : b(X).");
        let (mut f, mut h) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(unsafe { gs_rewrite(p, 0, &mut f, &mut h) }, GsStatus::Ok);
        let text = unsafe { CStr::from_ptr(f) }.to_str().unwrap().to_string();
        let hash = unsafe { CStr::from_ptr(h) }.to_str().unwrap().to_string();
        assert!(text.starts_with("formula: "));
        assert_eq!(hash.len(), 64);
        unsafe {
            gs_string_free(f);
            gs_string_free(h);
            gs_problem_free(p);
        }
        let q = parse("rule: a(c). query: ? [X] : a(X).");
        assert_eq!(unsafe { gs_rewrite(q, 0, ptr::null_mut(), ptr::null_mut()) }, GsStatus::Entailed);
        unsafe { gs_problem_free(q) };
    }

    #[test]
    fn budget_and_unsupported_inputs() {
        let p = parse("rule: ! [X] : (a(X) => ? [Y] : (r(X,Y) & a(Y))). fact: a(c). query: ? [X] : b(X).");
        let mut v = GsVerdict::Yes;
        let s = unsafe { gs_answer(p, 1, 0, &mut v) };
        assert!(s == GsStatus::Budget || (s == GsStatus::Ok && v == GsVerdict::No));
        unsafe { gs_problem_free(p) };
        let q = parse("rule: ! [X,Y,Z] : ((r(X,Y) & r(Y,Z)) => r(X,Z)).");
        assert_eq!(unsafe { gs_answer(q, 0, 0, &mut v) }, GsStatus::Unsupported);
        unsafe { gs_problem_free(q) };
    }
}
