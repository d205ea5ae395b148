//! C ABI over `tensor-extremal`.
//!
//! Tensors and patterns cross the boundary as opaque handles built from the
//! JSON tensor format. Every fallible call returns a [`TeStatus`]; on failure
//! [`te_last_error_message`] describes the error on the calling thread.
//! Strings returned through `char **` out-parameters belong to the caller and
//! are released with [`te_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use tensor_extremal::containment::find_embedding_with_budget;
use tensor_extremal::extremal::{alpha, count_avoiders, f_exact, SearchOptions};
use tensor_extremal::tensor::DEFAULT_CAP_CELLS;
use tensor_extremal::{BitTensor, Error, Pattern};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum TeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidArgument = 4,
    NotAPattern = 5,
    ResourceCap = 6,
    BudgetExhausted = 7,
    NoAvoider = 8,
    Internal = 9,
    Panic = 10,
}

/// Opaque 0-1 tensor.
pub struct TeTensor(BitTensor);

/// Opaque validated t-pattern.
pub struct TePattern(Pattern);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> TeStatus {
    match e {
        Error::Parse(_) => TeStatus::Parse,
        Error::NotAPattern { .. } => TeStatus::NotAPattern,
        Error::Resource { .. } => TeStatus::ResourceCap,
        Error::Unknown { .. } => TeStatus::BudgetExhausted,
        Error::NoAvoider { .. } => TeStatus::NoAvoider,
        Error::Invariant(_) | Error::Io(_) => TeStatus::Internal,
        Error::OutOfBounds { .. }
        | Error::CoordArity { .. }
        | Error::Argument(_)
        | Error::UnsupportedDimension { .. } => TeStatus::InvalidArgument,
    }
}

enum Fail {
    Status(TeStatus, String),
    Core(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

/// Runs `body`, records any error and converts panics into [`TeStatus::Panic`].
fn guard(body: impl FnOnce() -> Result<(), Fail>) -> TeStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
            TeStatus::Ok
        }
        Ok(Err(Fail::Core(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Status(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("panic inside tensor-extremal".to_owned());
            TeStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail::Status(TeStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| Fail::Status(TeStatus::InvalidUtf8, format!("`{what}` is not UTF-8: {e}")))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).expect("library strings hold no NULs").into_raw()
}

fn options(budget: u64, threads: usize) -> SearchOptions {
    SearchOptions {
        budget: if budget == 0 { SearchOptions::default().budget } else { budget },
        threads: threads.max(1),
        cap_cells: DEFAULT_CAP_CELLS,
    }
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn te_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn te_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a JSON tensor `{"t", "shape", "ones"}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn te_tensor_from_json(json: *const c_char, out: *mut *mut TeTensor) -> TeStatus {
    guard(|| {
        let text = read_str(json, "json")?;
        let tensor = BitTensor::from_json_str(text)?;
        write_out(out, Box::into_raw(Box::new(TeTensor(tensor))), "out")
    })
}

/// Serializes a tensor to JSON; free the result with [`te_string_free`].
///
/// # Safety
/// `tensor` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn te_tensor_to_json(tensor: *const TeTensor, out: *mut *mut c_char) -> TeStatus {
    guard(|| {
        let m = deref(tensor, "tensor")?;
        write_out(out, into_c_string(m.0.to_json_string()), "out")
    })
}

/// Number of ones in the tensor.
///
/// # Safety
/// `tensor` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn te_tensor_ones(tensor: *const TeTensor, out: *mut usize) -> TeStatus {
    guard(|| {
        let m = deref(tensor, "tensor")?;
        write_out(out, m.0.ones_count(), "out")
    })
}

/// # Safety
/// `tensor` must be NULL or a live handle, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn te_tensor_free(tensor: *mut TeTensor) {
    if !tensor.is_null() {
        drop(Box::from_raw(tensor));
    }
}

/// Parses and validates a JSON pattern; fails with
/// [`TeStatus::NotAPattern`] when two ones agree in all but one position.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn te_pattern_from_json(json: *const c_char, out: *mut *mut TePattern) -> TeStatus {
    guard(|| {
        let text = read_str(json, "json")?;
        let pattern = Pattern::new(BitTensor::from_json_str(text)?)?;
        write_out(out, Box::into_raw(Box::new(TePattern(pattern))), "out")
    })
}

/// # Safety
/// `pattern` must be NULL or a live handle, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn te_pattern_free(pattern: *mut TePattern) {
    if !pattern.is_null() {
        drop(Box::from_raw(pattern));
    }
}

/// Sets `*out` to whether `host` contains `pattern`. `budget` caps the
/// search nodes; 0 means the library default.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn te_contains(
    host: *const TeTensor,
    pattern: *const TePattern,
    budget: u64,
    out: *mut bool,
) -> TeStatus {
    guard(|| {
        let m = deref(host, "host")?;
        let p = deref(pattern, "pattern")?;
        let budget = if budget == 0 { tensor_extremal::containment::DEFAULT_NODE_BUDGET } else { budget };
        let report = find_embedding_with_budget(&m.0, &p.0, budget)?;
        write_out(out, report.embedding.is_some(), "out")
    })
}

/// Exact `f_t(n, P)` at the pattern's dimension. When `witness` is not
/// NULL it receives a new handle to an extremal tensor.
///
/// # Safety
/// `pattern` must be live; `value` must be writable; `witness` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn te_f_exact(
    n: usize,
    pattern: *const TePattern,
    budget: u64,
    threads: usize,
    value: *mut usize,
    witness: *mut *mut TeTensor,
) -> TeStatus {
    guard(|| {
        let p = deref(pattern, "pattern")?;
        if value.is_null() {
            return Err(null("value"));
        }
        let report = f_exact(n, &p.0, p.0.t(), &options(budget, threads))?;
        value.write(report.value);
        if !witness.is_null() {
            let handle = report.witness.map_or(ptr::null_mut(), |w| Box::into_raw(Box::new(TeTensor(w))));
            witness.write(handle);
        }
        Ok(())
    })
}

/// Number of `n x ... x n` tensors avoiding the pattern.
///
/// # Safety
/// `pattern` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn te_count_avoiders(
    n: usize,
    pattern: *const TePattern,
    threads: usize,
    out: *mut u64,
) -> TeStatus {
    guard(|| {
        let p = deref(pattern, "pattern")?;
        let count = count_avoiders(n, &p.0, p.0.t(), &options(0, threads))?;
        write_out(out, count, "out")
    })
}

/// `alpha_t(k)` as an exact decimal or `num/den` string; free the result
/// with [`te_string_free`].
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn te_alpha(t: usize, k: usize, out: *mut *mut c_char) -> TeStatus {
    guard(|| {
        let a = alpha(t, k)?;
        write_out(out, into_c_string(a.to_string()), "out")
    })
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn te_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
