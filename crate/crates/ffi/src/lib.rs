//! C ABI over the apotential library.
//!
//! Objects cross the boundary as opaque handles owned by the caller and released with
//! the matching `*_free`. Every fallible call returns an [`ApotStatus`]; on failure the
//! message is available from [`apot_last_error_message`] on the same thread. Strings
//! returned through out-pointers are released with [`apot_string_free`]. Panics never
//! unwind into C; they surface as `APOT_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use apotential::polycore::OperatorDescriptor;
use apotential::synthesis::{verify_exactness, PotentialTriple, SynthesisOptions};
use apotential::torus::{gen_afree, lp_norm, read_afld, solve_potential, write_afld, GridSpec, PeriodicField};
use apotential::variational::{jensen_batch, DptGenerator};
use apotential::{fixtures, Error};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApotStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    DimensionMismatch = 3,
    InvalidOperator = 4,
    NonConstantRank = 5,
    ZeroOperator = 6,
    NotAFree = 7,
    NonzeroMean = 8,
    RankDrop = 9,
    InvalidGrid = 10,
    NotInConvexSet = 11,
    NotPsd = 12,
    InvalidArgument = 13,
    Parse = 14,
    Io = 15,
    Panic = 16,
}

/// Constant-coefficient homogeneous differential operator.
pub struct ApotOperator(OperatorDescriptor);

/// Operator with its synthesized potential and annihilator.
pub struct ApotTriple(PotentialTriple);

/// Real vector field sampled on a periodic grid.
pub struct ApotField(PeriodicField);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(ApotStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::DimensionMismatch(_) => ApotStatus::DimensionMismatch,
            Error::InvalidOperator(_) => ApotStatus::InvalidOperator,
            Error::NonConstantRank { .. } => ApotStatus::NonConstantRank,
            Error::ZeroOperator => ApotStatus::ZeroOperator,
            Error::NotAFree { .. } => ApotStatus::NotAFree,
            Error::NonzeroMean { .. } => ApotStatus::NonzeroMean,
            Error::RankDrop { .. } => ApotStatus::RankDrop,
            Error::InvalidGrid(_) => ApotStatus::InvalidGrid,
            Error::NotInConvexSet(_) => ApotStatus::NotInConvexSet,
            Error::NotPsd(_) => ApotStatus::NotPsd,
            Error::InvalidArgument(_) => ApotStatus::InvalidArgument,
            Error::Parse(_) | Error::Json(_) => ApotStatus::Parse,
            Error::Io(_) => ApotStatus::Io,
        };
        Failure(status, e.to_string())
    }
}

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> ApotStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => ApotStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(&message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(&format!("panic: {message}"));
            ApotStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(ApotStatus::NullPointer, format!("{what} is NULL"))
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn string<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Failure(ApotStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " "))
        .expect("interior NULs removed")
        .into_raw()
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Message of the last failed call on this thread, or NULL. Valid until the next
/// failing call on the same thread; do not free.
#[no_mangle]
pub extern "C" fn apot_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn apot_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses an operator from its JSON description {"d","k","N","m","terms"}.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn apot_operator_from_json(json: *const c_char, out: *mut *mut ApotOperator) -> ApotStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = boxed(ApotOperator(OperatorDescriptor::from_json(string(json, "json")?)?));
        Ok(())
    })
}

/// Bundled operator by name: div2, div3, symdiv2, symdiv3, curl2 or curl3.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn apot_operator_fixture(name: *const c_char, out: *mut *mut ApotOperator) -> ApotStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let name = string(name, "name")?;
        let op = fixtures::by_name(name)
            .ok_or_else(|| Failure(ApotStatus::InvalidArgument, format!("unknown fixture {name:?}")))?;
        *out = boxed(ApotOperator(op));
        Ok(())
    })
}

/// JSON description of an operator; free the result with [`apot_string_free`].
///
/// # Safety
/// `op` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn apot_operator_to_json(op: *const ApotOperator, out: *mut *mut c_char) -> ApotStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = c_string(borrow(op, "op")?.0.to_json());
        Ok(())
    })
}

/// # Safety
/// `op` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn apot_operator_free(op: *mut ApotOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// Synthesizes the potential ℒ and annihilator 𝒢 of a constant-rank operator.
///
/// # Safety
/// `op` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn apot_triple_synthesize(op: *const ApotOperator, out: *mut *mut ApotTriple) -> ApotStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let t = PotentialTriple::synthesize(&borrow(op, "op")?.0, &SynthesisOptions::default())?;
        *out = boxed(ApotTriple(t));
        Ok(())
    })
}

/// Loads a triple written by [`apot_triple_to_json`] or the `synth` command.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn apot_triple_from_json(json: *const c_char, out: *mut *mut ApotTriple) -> ApotStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = boxed(ApotTriple(PotentialTriple::from_json(string(json, "json")?)?));
        Ok(())
    })
}

/// # Safety
/// `t` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn apot_triple_to_json(t: *const ApotTriple, out: *mut *mut c_char) -> ApotStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = c_string(borrow(t, "t")?.0.to_json());
        Ok(())
    })
}

/// Space dimension d, component count N and the orders k, l, g of 𝒜, ℒ, 𝒢.
/// Any out-pointer may be NULL.
///
/// # Safety
/// `t` must be a live handle; non-NULL out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn apot_triple_shape(
    t: *const ApotTriple,
    d: *mut usize,
    n: *mut usize,
    k: *mut u32,
    l: *mut u32,
    g: *mut u32,
) -> ApotStatus {
    guard(|| {
        let t = &borrow(t, "t")?.0;
        for (p, v) in [(d, t.d()), (n, t.n())] {
            if let Some(p) = p.as_mut() {
                *p = v;
            }
        }
        for (p, v) in [(k, t.k()), (l, t.l_order()), (g, t.g_order())] {
            if let Some(p) = p.as_mut() {
                *p = v;
            }
        }
        Ok(())
    })
}

/// Checks 𝒜ℒ = 0, ℒ𝒢 = 0 and the rank counts at `samples` seeded frequencies.
///
/// # Safety
/// `t` must be a live handle; `passed` must be writable.
#[no_mangle]
pub unsafe extern "C" fn apot_triple_verify(
    t: *const ApotTriple,
    samples: usize,
    seed: u64,
    passed: *mut bool,
) -> ApotStatus {
    guard(|| {
        let passed = out_ptr(passed, "passed")?;
        *passed = verify_exactness(&borrow(t, "t")?.0, samples, seed).passed();
        Ok(())
    })
}

/// # Safety
/// `t` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn apot_triple_free(t: *mut ApotTriple) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

unsafe fn grid(dims: *const usize, d: usize) -> Result<GridSpec, Failure> {
    Ok(GridSpec::new(slice(dims, d, "dims")?)?)
}

/// Field with `n` components on the grid `dims[0..d]`; `values` holds n·Π dims entries,
/// components fastest, then the first axis.
///
/// # Safety
/// `dims` and `values` must point to `d` and `len` readable elements; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn apot_field_new(
    dims: *const usize,
    d: usize,
    n: usize,
    values: *const f64,
    len: usize,
    out: *mut *mut ApotField,
) -> ApotStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let g = grid(dims, d)?;
        let f = PeriodicField::from_values(&g, n, slice(values, len, "values")?.to_vec())?;
        *out = boxed(ApotField(f));
        Ok(())
    })
}

/// Reads an AFLD file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn apot_field_read(path: *const c_char, out: *mut *mut ApotField) -> ApotStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = boxed(ApotField(read_afld(Path::new(string(path, "path")?))?));
        Ok(())
    })
}

/// Writes an AFLD file atomically.
///
/// # Safety
/// `f` must be a live handle; `path` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn apot_field_write(f: *const ApotField, path: *const c_char) -> ApotStatus {
    guard(|| {
        write_afld(Path::new(string(path, "path")?), &borrow(f, "f")?.0)?;
        Ok(())
    })
}

/// Number of components per grid point; 0 for NULL.
///
/// # Safety
/// `f` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn apot_field_components(f: *const ApotField) -> usize {
    f.as_ref().map_or(0, |f| f.0.n())
}

/// Total number of stored values, components times grid points; 0 for NULL.
///
/// # Safety
/// `f` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn apot_field_len(f: *const ApotField) -> usize {
    f.as_ref().map_or(0, |f| f.0.values().len())
}

/// Copies the values into `out[0..len]`; `len` must equal [`apot_field_len`].
///
/// # Safety
/// `f` must be a live handle; `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn apot_field_copy_values(f: *const ApotField, out: *mut f64, len: usize) -> ApotStatus {
    guard(|| {
        let values = borrow(f, "f")?.0.values();
        if len != values.len() {
            return Err(Failure(
                ApotStatus::DimensionMismatch,
                format!("buffer of {len} values for a field of {}", values.len()),
            ));
        }
        if len > 0 {
            if out.is_null() {
                return Err(null("out"));
            }
            std::slice::from_raw_parts_mut(out, len).copy_from_slice(values);
        }
        Ok(())
    })
}

/// # Safety
/// `f` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn apot_field_free(f: *mut ApotField) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Band-limited A-free field with zero mean and unit L² norm.
///
/// # Safety
/// `t` must be a live handle; `dims` must point to `d` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn apot_gen_afree(
    t: *const ApotTriple,
    dims: *const usize,
    d: usize,
    band: usize,
    seed: u64,
    out: *mut *mut ApotField,
) -> ApotStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let u = gen_afree(&borrow(t, "t")?.0, &grid(dims, d)?, band, seed)?;
        *out = boxed(ApotField(u));
        Ok(())
    })
}

/// Solves ℒΦ = U, 𝒢Φ = 0 for a zero-mean A-free field U.
///
/// # Safety
/// `t` and `u` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn apot_solve(
    t: *const ApotTriple,
    u: *const ApotField,
    tol: f64,
    out: *mut *mut ApotField,
) -> ApotStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let phi = solve_potential(&borrow(t, "t")?.0, &borrow(u, "u")?.0, tol)?;
        *out = boxed(ApotField(phi));
        Ok(())
    })
}

/// Grid-average L^p norm over all components.
///
/// # Safety
/// `f` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn apot_lp_norm(f: *const ApotField, p: f64, out: *mut f64) -> ApotStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = lp_norm(&borrow(f, "f")?.0, p)?;
        Ok(())
    })
}

/// Runs `trials` seeded Jensen checks for det^{1/(dm−1)} on DPT fields and reports
/// the number of violations.
///
/// # Safety
/// `violations` must be writable.
#[no_mangle]
pub unsafe extern "C" fn apot_jensen_batch(
    dm: usize,
    grid_points: usize,
    band: usize,
    shift: f64,
    trials: usize,
    seed: u64,
    violations: *mut usize,
) -> ApotStatus {
    guard(|| {
        let violations = out_ptr(violations, "violations")?;
        let gen = DptGenerator::new(dm)?;
        let batch = jensen_batch(&gen, &GridSpec::cubic(dm, grid_points)?, band, shift, trials, seed)?;
        *violations = batch.violations;
        Ok(())
    })
}
