//! C ABI over `cascade-core`.
//!
//! Objects cross the boundary as opaque handles that the caller releases
//! with the matching `*_free` function. Every fallible call returns a
//! [`CascadeStatus`]; on failure a message for the calling thread is
//! available from [`cascade_last_error`]. Strings returned through out
//! parameters are owned by the caller and released with
//! [`cascade_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cascade_core::avoidance::chebyshev3;
use cascade_core::markov::asymptotic_dispersion;
use cascade_core::opspec::parse_operation;
use cascade_core::{
    count_avoiding, count_cascade_free, poisson_root, spectral_data, Coupling, CountSequence,
    Error, GpkDecomposition, Instance, InstanceDescriptor, InstanceKind, SpectralData,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CascadeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    InvalidDecomposition = 4,
    InvalidBase = 5,
    InvalidOperation = 6,
    SpecError = 7,
    NotApplicable = 8,
    DegenerateChain = 9,
    NoInteriorRoot = 10,
    ToleranceNotMet = 11,
    OutOfRange = 12,
    Internal = 13,
    Panic = 14,
}

/// An operation: a GEN/PROP/KILL decomposition or a general stateful
/// operation with a forbidden state.
pub struct CascadeOperation(Instance);

/// Counts `a(0..=L)` as arbitrary-precision integers.
pub struct CascadeSequence(CountSequence);

/// Spectrum of the 2x2 transfer matrix. `coupling` is `INFINITY` when the
/// determinant vanishes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CascadeSpectral {
    pub trace: f64,
    pub det: f64,
    pub discriminant: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub coupling: f64,
    pub degenerate: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> CascadeStatus {
    match e {
        Error::InvalidDecomposition(_) => CascadeStatus::InvalidDecomposition,
        Error::InvalidBase(_) | Error::NotPrime(_) => CascadeStatus::InvalidBase,
        Error::InvalidOperation(_)
        | Error::StateCountMismatch(..)
        | Error::NotBinaryState(_)
        | Error::NegationPresent(_)
        | Error::SymbolOutOfRange { .. } => CascadeStatus::InvalidOperation,
        Error::Spec(_) => CascadeStatus::SpecError,
        Error::NotApplicable(_) | Error::DimensionTooLarge(..) => CascadeStatus::NotApplicable,
        Error::DegenerateChain(_) | Error::DegenerateDistribution(_) => {
            CascadeStatus::DegenerateChain
        }
        Error::NoInteriorRoot(_) => CascadeStatus::NoInteriorRoot,
        Error::ToleranceNotMet { .. } => CascadeStatus::ToleranceNotMet,
        Error::InvalidArgument(_) | Error::InvalidMu(_) | Error::BudgetExceeded { .. } => {
            CascadeStatus::InvalidArgument
        }
        Error::SeedTooShort { .. } | Error::NegativeTerm(_) | Error::Parse(_) => {
            CascadeStatus::Internal
        }
    }
}

enum Fail {
    Status(CascadeStatus, String),
    Core(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> CascadeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            CascadeStatus::Ok
        }
        Ok(Err(Fail::Status(status, msg))) => {
            set_error(msg);
            status
        }
        Ok(Err(Fail::Core(e))) => {
            set_error(format!("{}: {e}", e.code()));
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            CascadeStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail::Status(CascadeStatus::NullPointer, format!("{what} is null"))
}

/// # Safety
/// `p` must be null or a valid nul-terminated string.
unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail::Status(CascadeStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).expect("no interior nul").into_raw()
}

/// # Safety
/// `out` must be null or valid for writes.
unsafe fn put_operation(out: *mut *mut CascadeOperation, inst: Instance) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(CascadeOperation(inst)));
    Ok(())
}

/// # Safety
/// `op` must be null or a handle returned by this library.
unsafe fn operation<'a>(op: *const CascadeOperation) -> Result<&'a Instance, Fail> {
    op.as_ref().map(|o| &o.0).ok_or_else(|| null("operation"))
}

/// Creates an operation from class sizes `g`, `t`, `k`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cascade_operation_from_gpk(
    g: u64,
    t: u64,
    k: u64,
    out: *mut *mut CascadeOperation,
) -> CascadeStatus {
    guard(|| put_operation(out, Instance::Gpk(GpkDecomposition::new(g, t, k)?)))
}

/// Creates a named instance (`carry`, `dbl`, `ternary3`, `binary4`,
/// `sediment`). Pass `base = 0` for instances with a fixed base.
///
/// # Safety
/// `name` must be a nul-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cascade_operation_from_instance(
    name: *const c_char,
    base: u64,
    out: *mut *mut CascadeOperation,
) -> CascadeStatus {
    guard(|| {
        let kind: InstanceKind = read_str(name, "name")?.parse()?;
        let base = (base != 0).then_some(base);
        put_operation(out, InstanceDescriptor::new(kind, base)?.build()?)
    })
}

/// Parses a JSON operation file (schema version 1).
///
/// # Safety
/// `json` must be a nul-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cascade_operation_from_json(
    json: *const c_char,
    out: *mut *mut CascadeOperation,
) -> CascadeStatus {
    guard(|| {
        let op = parse_operation(read_str(json, "json")?)?;
        put_operation(out, Instance::Operation(op))
    })
}

/// # Safety
/// `op` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cascade_operation_free(op: *mut CascadeOperation) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// Counts for every length `0..=len`.
///
/// # Safety
/// `op` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cascade_count(
    op: *const CascadeOperation,
    len: usize,
    out: *mut *mut CascadeSequence,
) -> CascadeStatus {
    guard(|| {
        let seq = match operation(op)? {
            Instance::Gpk(gpk) => count_cascade_free(gpk, len),
            Instance::Operation(o) => count_avoiding(o, len),
        };
        if out.is_null() {
            return Err(null("out"));
        }
        *out = Box::into_raw(Box::new(CascadeSequence(seq)));
        Ok(())
    })
}

/// Number of terms, or 0 for a null handle.
///
/// # Safety
/// `seq` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cascade_sequence_len(seq: *const CascadeSequence) -> usize {
    seq.as_ref().map_or(0, |s| s.0.len())
}

/// Term `index` as a decimal string.
///
/// # Safety
/// `seq` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cascade_sequence_get(
    seq: *const CascadeSequence,
    index: usize,
    out: *mut *mut c_char,
) -> CascadeStatus {
    guard(|| {
        let seq = seq.as_ref().ok_or_else(|| null("sequence"))?;
        let value = seq.0.get(index).ok_or_else(|| {
            Fail::Status(
                CascadeStatus::OutOfRange,
                format!("index {index} out of range for {} terms", seq.0.len()),
            )
        })?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = into_c_string(value.to_string());
        Ok(())
    })
}

/// Term `index` if it fits in 64 bits.
///
/// # Safety
/// `seq` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cascade_sequence_get_u64(
    seq: *const CascadeSequence,
    index: usize,
    out: *mut u64,
) -> CascadeStatus {
    guard(|| {
        let seq = seq.as_ref().ok_or_else(|| null("sequence"))?;
        let value = seq.0.get(index).ok_or_else(|| {
            Fail::Status(CascadeStatus::OutOfRange, format!("index {index} out of range"))
        })?;
        let v = u64::try_from(value).map_err(|_| {
            Fail::Status(CascadeStatus::OutOfRange, format!("a({index}) exceeds 64 bits"))
        })?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = v;
        Ok(())
    })
}

/// # Safety
/// `seq` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cascade_sequence_free(seq: *mut CascadeSequence) {
    if !seq.is_null() {
        drop(Box::from_raw(seq));
    }
}

fn to_c_spectral(s: &SpectralData) -> CascadeSpectral {
    let f = |v: &dyn ToString| v.to_string().parse::<f64>().unwrap_or(f64::NAN);
    CascadeSpectral {
        trace: f(&s.trace),
        det: f(&s.det),
        discriminant: f(&s.discriminant),
        lambda1: s.lambda1,
        lambda2: s.lambda2,
        coupling: match s.coupling {
            Coupling::Finite(x) => x,
            Coupling::Infinite => f64::INFINITY,
        },
        degenerate: s.degenerate,
    }
}

/// Spectrum of the 2x2 transfer matrix. General operations qualify when
/// their restricted matrix is 2x2.
///
/// # Safety
/// `op` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cascade_spectral(
    op: *const CascadeOperation,
    out: *mut CascadeSpectral,
) -> CascadeStatus {
    guard(|| {
        let data = match operation(op)? {
            Instance::Gpk(gpk) => spectral_data(gpk),
            Instance::Operation(o) => chebyshev3(o)?,
        };
        if out.is_null() {
            return Err(null("out"));
        }
        *out = to_c_spectral(&data);
        Ok(())
    })
}

/// Asymptotic dispersion index as an exact `"num/den"` string.
///
/// # Safety
/// `op` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cascade_asymptotic_dispersion(
    op: *const CascadeOperation,
    out: *mut *mut c_char,
) -> CascadeStatus {
    guard(|| {
        let gpk = match operation(op)? {
            Instance::Gpk(gpk) => gpk,
            Instance::Operation(_) => {
                return Err(Fail::Status(
                    CascadeStatus::NotApplicable,
                    "dispersion needs a binary-state operation".into(),
                ))
            }
        };
        let d = asymptotic_dispersion(gpk)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = into_c_string(format!("{}/{}", d.numer(), d.denom()));
        Ok(())
    })
}

/// Poisson transition point `mu*(len)` of symmetric chains. `residual`
/// may be null.
///
/// # Safety
/// `mu_star` must be valid for writes; `residual` null or valid.
#[no_mangle]
pub unsafe extern "C" fn cascade_poisson_root(
    len: usize,
    tol: f64,
    mu_star: *mut f64,
    residual: *mut f64,
) -> CascadeStatus {
    guard(|| {
        if mu_star.is_null() {
            return Err(null("mu_star"));
        }
        let root = poisson_root(len, tol)?;
        *mu_star = root.mu_star;
        if !residual.is_null() {
            *residual = root.residual;
        }
        Ok(())
    })
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next call into the library from this thread.
#[no_mangle]
pub extern "C" fn cascade_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn cascade_status_name(status: CascadeStatus) -> *const c_char {
    let name: &'static CStr = match status {
        CascadeStatus::Ok => c"Ok",
        CascadeStatus::NullPointer => c"NullPointer",
        CascadeStatus::InvalidUtf8 => c"InvalidUtf8",
        CascadeStatus::InvalidArgument => c"InvalidArgument",
        CascadeStatus::InvalidDecomposition => c"InvalidDecomposition",
        CascadeStatus::InvalidBase => c"InvalidBase",
        CascadeStatus::InvalidOperation => c"InvalidOperation",
        CascadeStatus::SpecError => c"SpecError",
        CascadeStatus::NotApplicable => c"NotApplicable",
        CascadeStatus::DegenerateChain => c"DegenerateChain",
        CascadeStatus::NoInteriorRoot => c"NoInteriorRoot",
        CascadeStatus::ToleranceNotMet => c"ToleranceNotMet",
        CascadeStatus::OutOfRange => c"OutOfRange",
        CascadeStatus::Internal => c"Internal",
        CascadeStatus::Panic => c"Panic",
    };
    name.as_ptr()
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cascade_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
