use std::ffi::CStr;
use std::path::{Path, PathBuf};
use std::ptr;

use nikishin_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    let n = unsafe { nk_last_error(buf.as_mut_ptr(), buf.len()) };
    assert!(n >= 1);
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

fn demo_system() -> *mut NkSystem {
    let (a, b) = ([-1.0, 2.0], [1.0, 3.0]);
    let (al, be) = ([-0.5, -0.5], [-0.5, -0.5]);
    let mut sys = ptr::null_mut();
    let st = unsafe { nk_system_new(a.as_ptr(), b.as_ptr(), al.as_ptr(), be.as_ptr(), 2, &mut sys) };
    assert_eq!(st, NkStatus::Ok);
    sys
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(nk_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn solve_and_query() {
    let sys = demo_system();
    assert_eq!(unsafe { nk_system_m(sys) }, 2);
    let mut sol = ptr::null_mut();
    assert_eq!(unsafe { nk_hp_solve(sys, [3usize, 2].as_ptr(), 2, &mut sol) }, NkStatus::Ok);

    let mut len = 0usize;
    assert_eq!(unsafe { nk_solution_zero_count(sol, 2, &mut len) }, NkStatus::Ok);
    assert_eq!(len, 5);
    let mut small = [0.0; 2];
    assert_eq!(
        unsafe { nk_solution_zeros(sol, 2, small.as_mut_ptr(), small.len(), &mut len) },
        NkStatus::BufferTooSmall
    );
    assert_eq!(len, 5);
    let mut zeros = [0.0; 5];
    assert_eq!(
        unsafe { nk_solution_zeros(sol, 2, zeros.as_mut_ptr(), zeros.len(), &mut len) },
        NkStatus::Ok
    );
    assert!(zeros.windows(2).all(|w| w[0] < w[1]) && zeros.iter().all(|x| 2.0 < *x && *x < 3.0));

    let (mut re, mut im) = (0.0, 0.0);
    assert_eq!(unsafe { nk_solution_form(sol, 0, 0.5, 1.5, &mut re, &mut im) }, NkStatus::Ok);
    let (mut re2, mut im2) = (0.0, 0.0);
    assert_eq!(unsafe { nk_solution_form(sol, 0, 0.5, -1.5, &mut re2, &mut im2) }, NkStatus::Ok);
    assert!((re - re2).abs() <= 1e-13 * re.abs() && (im + im2).abs() <= 1e-13 * im.abs().max(1e-300));
    assert_eq!(
        unsafe { nk_solution_approximation_error(sol, 1, 5.0, 0.0, &mut re, &mut im) },
        NkStatus::Ok
    );
    assert!(re.abs() < 1e-2 && im.abs() < 1e-12);

    assert_eq!(
        unsafe { nk_solution_form(sol, 1, 2.5, 0.0, &mut re, &mut im) },
        NkStatus::InvalidArgument
    );
    assert!(last_error().contains("support"));
    assert_eq!(unsafe { nk_solution_zero_count(sol, 0, &mut len) }, NkStatus::InvalidArgument);
    assert_eq!(
        unsafe { nk_solution_approximation_error(sol, 2, 5.0, 0.0, &mut re, &mut im) },
        NkStatus::InvalidArgument
    );

    unsafe {
        nk_solution_free(sol);
        nk_system_free(sys);
    }
}

#[test]
fn equilibrium_constants() {
    let mut eq = ptr::null_mut();
    assert_eq!(
        unsafe { nk_equilibrium_solve([0.0].as_ptr(), [3.0].as_ptr(), [1.0].as_ptr(), 1, 1e-13, &mut eq) },
        NkStatus::Ok
    );
    let (mut omega, mut mass, mut d) = (0.0, 0.0, 0.0);
    assert_eq!(unsafe { nk_equilibrium_omega(eq, 1, &mut omega) }, NkStatus::Ok);
    assert_eq!(unsafe { nk_equilibrium_mass(eq, 1, &mut mass) }, NkStatus::Ok);
    assert_eq!(unsafe { nk_equilibrium_density(eq, 1, 1.5, &mut d) }, NkStatus::Ok);
    assert!((omega - (4.0f64 / 3.0).ln()).abs() < 1e-10);
    assert!((mass - 1.0).abs() < 1e-12);
    assert!((d - 1.0 / (std::f64::consts::PI * 1.5)).abs() < 1e-10);
    assert_eq!(unsafe { nk_equilibrium_density(eq, 1, 3.0, &mut d) }, NkStatus::InvalidArgument);
    assert_eq!(unsafe { nk_equilibrium_omega(eq, 2, &mut omega) }, NkStatus::InvalidArgument);
    unsafe { nk_equilibrium_free(eq) };
}

#[test]
fn argument_errors() {
    let mut sys = ptr::null_mut();
    let st = unsafe { nk_system_new(ptr::null(), ptr::null(), ptr::null(), ptr::null(), 1, &mut sys) };
    assert_eq!(st, NkStatus::NullPointer);
    assert!(sys.is_null());
    let (a, b, e) = ([-1.0, 0.0], [1.0, 2.0], [0.0, 0.0]);
    let st = unsafe { nk_system_new(a.as_ptr(), b.as_ptr(), e.as_ptr(), e.as_ptr(), 2, &mut sys) };
    assert_eq!(st, NkStatus::InvalidArgument);
    assert!(last_error().contains("overlap"));
    let bad = [-1.5];
    let st = unsafe { nk_system_new(a.as_ptr(), b.as_ptr(), bad.as_ptr(), e.as_ptr(), 1, &mut sys) };
    assert_eq!(st, NkStatus::InvalidArgument);

    let s = demo_system();
    let mut sol = ptr::null_mut();
    assert_eq!(
        unsafe { nk_hp_solve(s, [30usize, 30].as_ptr(), 2, &mut sol) },
        NkStatus::InvalidArgument
    );
    assert_eq!(unsafe { nk_hp_solve(s, [1usize].as_ptr(), 1, &mut sol) }, NkStatus::InvalidArgument);
    assert_eq!(
        unsafe { nk_hp_solve(ptr::null(), [1usize].as_ptr(), 1, &mut sol) },
        NkStatus::NullPointer
    );
    assert!(sol.is_null());
    unsafe {
        nk_system_free(s);
        nk_system_free(ptr::null_mut());
        nk_solution_free(ptr::null_mut());
    }
    assert_eq!(unsafe { nk_last_error(ptr::null_mut(), 0) }, last_error().len() + 1);
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/nikishin.h")
}

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(header()).unwrap();
    for name in [
        "nk_version",
        "nk_last_error",
        "nk_system_new",
        "nk_system_free",
        "nk_hp_solve",
        "nk_solution_zeros",
        "nk_solution_form",
        "nk_solution_approximation_error",
        "nk_equilibrium_solve",
        "nk_equilibrium_omega",
        "NK_STATUS_BUFFER_TOO_SMALL",
        "typedef struct NkSystem NkSystem",
    ] {
        assert!(h.contains(name), "{name}");
    }
}

#[test]
fn c_program_links_against_the_static_library() {
    let Some(cc) = ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| std::process::Command::new(c).arg("--version").output().is_ok())
    else {
        eprintln!("no C compiler, skipped");
        return;
    };
    // target/<profile>/deps/<test binary>
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libnikishin_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built, skipped", lib.display());
        return;
    }
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("smoke.c");
    std::fs::write(
        &src,
        r#"#include <math.h>
#include <stdio.h>
#include "nikishin.h"
int main(void) {
    double a[1] = {-1.0}, b[1] = {1.0}, al[1] = {-0.5}, be[1] = {-0.5};
    size_t n[1] = {4}, len = 0;
    double z[4];
    NkSystem *sys = NULL;
    NkSolution *sol = NULL;
    if (nk_system_new(a, b, al, be, 1, &sys) != NK_STATUS_OK) return 1;
    if (nk_hp_solve(sys, n, 1, &sol) != NK_STATUS_OK) return 2;
    if (nk_solution_zeros(sol, 1, z, 4, &len) != NK_STATUS_OK || len != 4) return 3;
    /* monic T_4 zeros: cos((2k-1) pi / 8) */
    if (fabs(z[3] - cos(M_PI / 8.0)) > 1e-12) return 4;
    nk_solution_free(sol);
    nk_system_free(sys);
    printf("ok %s\n", nk_version());
    return 0;
}
"#,
    )
    .unwrap();
    let exe = tmp.path().join("smoke");
    let out = std::process::Command::new(cc)
        .arg(&src)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = std::process::Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
}
