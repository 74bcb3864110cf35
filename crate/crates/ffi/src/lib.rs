//! C ABI over the `nikishin` crate.
//!
//! Objects are opaque handles created by `nk_*_new` / `nk_*_solve` and
//! released by the matching `nk_*_free`. Every fallible call returns an
//! [`NkStatus`]; on failure [`nk_last_error`] yields a message for the
//! calling thread. Indices `j` follow the library: zeros are 1-based
//! (`1..=m`), forms run over `0..=m`, approximation errors over `0..m`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nikishin::equilibrium::{solve_vector_equilibrium, EquilibriumSolution, RaySpec};
use nikishin::hermitepade::{hp_solve, HPSolution, MultiIndex};
use nikishin::measures::{Interval, MeasureSpec, NikishinSystem};
use nikishin::Error;
use num_complex::Complex64;

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Numerical = 3,
    BufferTooSmall = 4,
    Panic = 5,
}

/// Nikishin system of Jacobi-type generating measures.
pub struct NkSystem(NikishinSystem);

/// Multi-level Hermite-Pade polynomials for one multi-index.
pub struct NkSolution(HPSolution);

/// Solution of the vector equilibrium problem along a ray.
pub struct NkEquilibrium(EquilibriumSolution);

const MAX_EQUILIBRIUM_SWEEPS: usize = 500;

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(e: &Error) -> NkStatus {
    match e {
        Error::InvalidExponent(_)
        | Error::DegenerateInterval(..)
        | Error::SizeMismatch { .. }
        | Error::OnSupport(_)
        | Error::IndexOutOfRange(_)
        | Error::OverlappingSupports(_)
        | Error::InvalidRay(_)
        | Error::NonpositiveWeight(_)
        | Error::GridMismatch(_)
        | Error::NonpositiveInput(_)
        | Error::DegreeCapExceeded { .. }
        | Error::InvalidInputPolynomials(_)
        | Error::NonrealizableRay(_)
        | Error::GeometryMismatch(_)
        | Error::Schema(_)
        | Error::Io(_) => NkStatus::InvalidArgument,
        _ => NkStatus::Numerical,
    }
}

struct Fail(NkStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(NkStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: String) -> Fail {
    Fail(NkStatus::InvalidArgument, msg)
}

fn guard(body: impl FnOnce() -> Result<(), Fail>) -> NkStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            NkStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            NkStatus::Panic
        }
    }
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    *out = value;
    Ok(())
}

unsafe fn intervals(a: *const f64, b: *const f64, m: usize) -> Result<Vec<Interval>, Fail> {
    let (a, b) = (slice(a, m, "a")?, slice(b, m, "b")?);
    Ok(a.iter()
        .zip(b)
        .map(|(&a, &b)| Interval::new(a, b))
        .collect::<nikishin::Result<_>>()?)
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn nk_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `cap`) and returns the full length including the NUL.
///
/// # Safety
/// `buf` must be null or valid for `cap` bytes.
#[no_mangle]
pub unsafe extern "C" fn nk_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = CString::new(e.borrow().replace('\0', " ")).unwrap_or_default();
        let bytes = msg.as_bytes_with_nul();
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
            *buf.add(n - 1) = 0;
        }
        bytes.len()
    })
}

/// Builds a system from `m` probability measures proportional to
/// `(b_j - x)^alpha_j (x - a_j)^beta_j dx` on `[a_j, b_j]`.
///
/// # Safety
/// `a`, `b`, `alpha`, `beta` must point to `m` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nk_system_new(
    a: *const f64,
    b: *const f64,
    alpha: *const f64,
    beta: *const f64,
    m: usize,
    out: *mut *mut NkSystem,
) -> NkStatus {
    guard(|| {
        if m == 0 {
            return Err(invalid("a system needs at least one measure".into()));
        }
        let ivs = intervals(a, b, m)?;
        let (al, be) = (slice(alpha, m, "alpha")?, slice(beta, m, "beta")?);
        let specs = ivs
            .iter()
            .zip(al.iter().zip(be))
            .map(|(&iv, (&al, &be))| MeasureSpec::jacobi(iv, al, be))
            .collect::<nikishin::Result<Vec<_>>>()?;
        store(out, NkSystem(NikishinSystem::new(specs)?))
    })
}

/// # Safety
/// `sys` must be null or a handle from [`nk_system_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nk_system_free(sys: *mut NkSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// Number of generating measures, or 0 for a null handle.
///
/// # Safety
/// `sys` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nk_system_m(sys: *const NkSystem) -> usize {
    sys.as_ref().map_or(0, |s| s.0.m())
}

/// Solves for the multi-index `n[0..m]`.
///
/// # Safety
/// `sys` must be a live handle, `n` must point to `m` values, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nk_hp_solve(sys: *const NkSystem, n: *const usize, m: usize, out: *mut *mut NkSolution) -> NkStatus {
    guard(|| {
        let s = handle(sys, "sys")?;
        let n = MultiIndex::new(slice(n, m, "n")?.to_vec())?;
        store(out, NkSolution(hp_solve(&s.0, &n)?))
    })
}

/// # Safety
/// `sol` must be null or a handle from [`nk_hp_solve`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nk_solution_free(sol: *mut NkSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

fn zero_index(sol: &HPSolution, j: usize) -> Result<(), Fail> {
    if j == 0 || j > sol.m() {
        return Err(invalid(format!("zero index {j} outside 1..={}", sol.m())));
    }
    Ok(())
}

/// Writes the number of zeros of `Q_{n,j}` to `len`.
///
/// # Safety
/// `sol` must be a live handle and `len` writable.
#[no_mangle]
pub unsafe extern "C" fn nk_solution_zero_count(sol: *const NkSolution, j: usize, len: *mut usize) -> NkStatus {
    guard(|| {
        let s = &handle(sol, "sol")?.0;
        zero_index(s, j)?;
        write(len, s.q_zeros(j).len(), "len")
    })
}

/// Copies the zeros of `Q_{n,j}` in increasing order. `len` receives the
/// count; `BufferTooSmall` is returned (and nothing copied) if `cap < count`.
///
/// # Safety
/// `sol` must be a live handle, `buf` valid for `cap` doubles, `len` writable.
#[no_mangle]
pub unsafe extern "C" fn nk_solution_zeros(sol: *const NkSolution, j: usize, buf: *mut f64, cap: usize, len: *mut usize) -> NkStatus {
    guard(|| {
        let s = &handle(sol, "sol")?.0;
        zero_index(s, j)?;
        let z = s.q_zeros(j);
        write(len, z.len(), "len")?;
        if cap < z.len() {
            return Err(Fail(NkStatus::BufferTooSmall, format!("need {} doubles, got {cap}", z.len())));
        }
        if !z.is_empty() {
            if buf.is_null() {
                return Err(null("buf"));
            }
            ptr::copy_nonoverlapping(z.as_ptr(), buf, z.len());
        }
        Ok(())
    })
}

unsafe fn complex_out(v: Complex64, re: *mut f64, im: *mut f64) -> Result<(), Fail> {
    if re.is_null() || im.is_null() {
        return Err(null("output"));
    }
    *re = v.re;
    *im = v.im;
    Ok(())
}

/// Evaluates the form `A_{n,j}` at `z = re + i im`, `j` in `0..=m`.
///
/// # Safety
/// `sol` must be a live handle; `out_re`, `out_im` writable.
#[no_mangle]
pub unsafe extern "C" fn nk_solution_form(
    sol: *const NkSolution,
    j: usize,
    re: f64,
    im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> NkStatus {
    guard(|| {
        let s = &handle(sol, "sol")?.0;
        if j > s.m() {
            return Err(invalid(format!("form index {j} outside 0..={}", s.m())));
        }
        complex_out(s.form_eval(j, Complex64::new(re, im))?, out_re, out_im)
    })
}

/// Evaluates `a_{n,j}/a_{n,m} - s^_{m,j+1}` at `z = re + i im`, `j` in `0..m`.
///
/// # Safety
/// `sol` must be a live handle; `out_re`, `out_im` writable.
#[no_mangle]
pub unsafe extern "C" fn nk_solution_approximation_error(
    sol: *const NkSolution,
    j: usize,
    re: f64,
    im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> NkStatus {
    guard(|| {
        let s = &handle(sol, "sol")?.0;
        complex_out(s.approximation_error(j, Complex64::new(re, im))?, out_re, out_im)
    })
}

/// Solves the vector equilibrium problem on `[a_j, b_j]` for the ray `p`.
///
/// # Safety
/// `a`, `b`, `p` must point to `m` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nk_equilibrium_solve(
    a: *const f64,
    b: *const f64,
    p: *const f64,
    m: usize,
    tol: f64,
    out: *mut *mut NkEquilibrium,
) -> NkStatus {
    guard(|| {
        if m == 0 {
            return Err(invalid("the equilibrium problem needs at least one interval".into()));
        }
        if !(tol > 0.0) {
            return Err(invalid(format!("tolerance must be positive, got {tol}")));
        }
        let ivs = intervals(a, b, m)?;
        let ray = RaySpec::new(slice(p, m, "p")?.to_vec())?;
        store(
            out,
            NkEquilibrium(solve_vector_equilibrium(&ivs, &ray, tol, MAX_EQUILIBRIUM_SWEEPS)?),
        )
    })
}

/// # Safety
/// `eq` must be null or a handle from [`nk_equilibrium_solve`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nk_equilibrium_free(eq: *mut NkEquilibrium) {
    if !eq.is_null() {
        drop(Box::from_raw(eq));
    }
}

unsafe fn equilibrium_value(eq: *const NkEquilibrium, j: usize, out: *mut f64, f: fn(&EquilibriumSolution, usize) -> f64) -> NkStatus {
    guard(|| {
        let e = &handle(eq, "eq")?.0;
        if j == 0 || j > e.m() {
            return Err(invalid(format!("index {j} outside 1..={}", e.m())));
        }
        write(out, f(e, j), "out")
    })
}

/// Equilibrium constant `omega_j`.
///
/// # Safety
/// `eq` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nk_equilibrium_omega(eq: *const NkEquilibrium, j: usize, out: *mut f64) -> NkStatus {
    equilibrium_value(eq, j, out, EquilibriumSolution::robin)
}

/// Total mass of the `j`-th equilibrium measure.
///
/// # Safety
/// `eq` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nk_equilibrium_mass(eq: *const NkEquilibrium, j: usize, out: *mut f64) -> NkStatus {
    equilibrium_value(eq, j, out, EquilibriumSolution::mass)
}

/// Density of the `j`-th equilibrium measure at an interior point `x`.
///
/// # Safety
/// `eq` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nk_equilibrium_density(eq: *const NkEquilibrium, j: usize, x: f64, out: *mut f64) -> NkStatus {
    guard(|| {
        let e = &handle(eq, "eq")?.0;
        if j == 0 || j > e.m() {
            return Err(invalid(format!("index {j} outside 1..={}", e.m())));
        }
        let iv = e.intervals[j - 1];
        if !(iv.a < x && x < iv.b) {
            return Err(invalid(format!("{x} is not interior to [{}, {}]", iv.a, iv.b)));
        }
        write(out, e.density(j, x), "out")
    })
}
