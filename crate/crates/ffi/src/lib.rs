//! C ABI over `regdual`. Languages and automata are opaque heap handles
//! released with their `_free` function. Every fallible call returns an
//! `RdStatus`; the message of the last failure on the calling thread is
//! available from `rd_last_error`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use regdual::automata::Nfa;
use regdual::kw::minimal_nfa;
use regdual::lang::Language;
use regdual::Error;

/// Opaque regular language.
pub struct RdLanguage(Language);

/// Opaque nondeterministic automaton.
pub struct RdNfa(Nfa);

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    CapExceeded = 4,
    CheckFailed = 5,
    Other = 6,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn fail(status: RdStatus, msg: String) -> RdStatus {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
    status
}

fn from_error(e: Error) -> RdStatus {
    let status = match e {
        Error::Parse(_) | Error::InvalidAutomaton(_) | Error::DuplicateLabel(_) | Error::AlphabetMismatch(_) => {
            RdStatus::Parse
        }
        Error::CapExceeded { .. } => RdStatus::CapExceeded,
        Error::CheckFailed(_) => RdStatus::CheckFailed,
        _ => RdStatus::Other,
    };
    fail(status, e.to_string())
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, RdStatus> {
    if s.is_null() {
        return Err(fail(RdStatus::NullPointer, "null string".into()));
    }
    CStr::from_ptr(s).to_str().map_err(|e| fail(RdStatus::InvalidUtf8, e.to_string()))
}

/// Message of the last failure on this thread; empty if none. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rd_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses a regex (`+` union, `*` star, `%` empty word, `#` empty set).
///
/// # Safety
/// `regex` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rd_language_parse(regex: *const c_char, out: *mut *mut RdLanguage) -> RdStatus {
    if out.is_null() {
        return fail(RdStatus::NullPointer, "null output pointer".into());
    }
    let text = match read_str(regex) {
        Ok(t) => t,
        Err(s) => return s,
    };
    match Language::parse(text) {
        Ok(l) => {
            *out = Box::into_raw(Box::new(RdLanguage(l)));
            RdStatus::Ok
        }
        Err(e) => from_error(e),
    }
}

/// # Safety
/// `l` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn rd_language_free(l: *mut RdLanguage) {
    if !l.is_null() {
        drop(Box::from_raw(l));
    }
}

/// Number of states of the minimal complete dfa; 0 on a null handle.
///
/// # Safety
/// `l` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rd_language_num_states(l: *const RdLanguage) -> usize {
    l.as_ref().map_or(0, |l| l.0.num_states())
}

/// Writes 1 to `accepted` if the word is in the language, 0 otherwise.
///
/// # Safety
/// `l` must be a live handle, `word` a NUL-terminated string and
/// `accepted` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rd_language_accepts(l: *const RdLanguage, word: *const c_char, accepted: *mut i32) -> RdStatus {
    let (Some(l), false) = (l.as_ref(), accepted.is_null()) else {
        return fail(RdStatus::NullPointer, "null handle or output".into());
    };
    let text = match read_str(word) {
        Ok(t) => t,
        Err(s) => return s,
    };
    match l.0.alphabet().parse_word(text) {
        Ok(w) => {
            *accepted = l.0.member(&w) as i32;
            RdStatus::Ok
        }
        // a letter outside the alphabet cannot occur in an accepted word
        Err(_) => {
            *accepted = 0;
            RdStatus::Ok
        }
    }
}

/// A state-minimal nfa for the language, searching covers of at most
/// `grid_cap` grids.
///
/// # Safety
/// `l` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rd_min_nfa(l: *const RdLanguage, grid_cap: usize, out: *mut *mut RdNfa) -> RdStatus {
    let (Some(l), false) = (l.as_ref(), out.is_null()) else {
        return fail(RdStatus::NullPointer, "null handle or output".into());
    };
    match minimal_nfa(&l.0, grid_cap) {
        Ok((n, _)) => {
            *out = Box::into_raw(Box::new(RdNfa(n)));
            RdStatus::Ok
        }
        Err(e) => from_error(e),
    }
}

/// Reads an nfa from its JSON form.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rd_nfa_from_json(json: *const c_char, out: *mut *mut RdNfa) -> RdStatus {
    if out.is_null() {
        return fail(RdStatus::NullPointer, "null output pointer".into());
    }
    let text = match read_str(json) {
        Ok(t) => t,
        Err(s) => return s,
    };
    match Nfa::from_json(text) {
        Ok(n) => {
            *out = Box::into_raw(Box::new(RdNfa(n)));
            RdStatus::Ok
        }
        Err(e) => from_error(e),
    }
}

/// # Safety
/// `n` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rd_nfa_num_states(n: *const RdNfa) -> usize {
    n.as_ref().map_or(0, |n| n.0.num_states())
}

/// The language accepted by the automaton, as a new handle.
///
/// # Safety
/// `n` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rd_nfa_language(n: *const RdNfa, out: *mut *mut RdLanguage) -> RdStatus {
    let (Some(n), false) = (n.as_ref(), out.is_null()) else {
        return fail(RdStatus::NullPointer, "null handle or output".into());
    };
    *out = Box::into_raw(Box::new(RdLanguage(n.0.language())));
    RdStatus::Ok
}

/// JSON form of the automaton; release with `rd_string_free`. Null on a
/// null handle.
///
/// # Safety
/// `n` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rd_nfa_to_json(n: *const RdNfa) -> *mut c_char {
    match n.as_ref() {
        Some(n) => CString::new(n.0.to_json()).map_or(ptr::null_mut(), CString::into_raw),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `n` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn rd_nfa_free(n: *mut RdNfa) {
    if !n.is_null() {
        drop(Box::from_raw(n));
    }
}

/// # Safety
/// `s` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn rd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
