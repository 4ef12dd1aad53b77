//! C ABI over bartnik-core.
//!
//! Every function returns a `BartnikStatus`; results come back through out-pointers. Objects
//! are opaque handles released with the matching `*_free`. Strings returned by the library are
//! borrowed from their handle and stay valid until it is freed. After a nonzero status,
//! `bartnik_last_error` describes the failure on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use bartnik_core::adn::run_adn;
use bartnik_core::flatbvp::conditions::COMPONENTS;
use bartnik_core::flatbvp::verify::{kernel_suite, solve_suite};
use bartnik_core::flatbvp::{BoundaryData, FlatError, Solution};
use bartnik_core::geometry::fixtures::FixtureName;
use bartnik_core::geometry::verify::{run_geometry, GeometryConfig};
use bartnik_core::report::{Check, Report};
use bartnik_core::symbols::{run_symbols_suite, GoldenSource};
use nalgebra::Vector3;
use serde_json::json;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BartnikStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    IllPosed = 3,
    Numerical = 4,
    Panic = 5,
}

/// Verification report: checks plus an optional payload, serialized as JSON.
pub struct BartnikReport {
    report: Report,
    json: CString,
}

/// Linearized boundary data in the spherical-harmonic potential convention.
pub struct BartnikBoundaryData {
    data: BoundaryData,
}

/// Solution of the flat linearized problem with its verification report.
pub struct BartnikSolution {
    solution: Solution,
    report: BartnikReport,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(status: BartnikStatus, msg: &str) -> BartnikStatus {
    set_error(msg);
    status
}

fn flat_status(e: &FlatError) -> BartnikStatus {
    match e {
        FlatError::InvalidData(_) | FlatError::Truncation(_) | FlatError::InsideBoundary(_) => {
            BartnikStatus::InvalidArgument
        }
        FlatError::IllPosed { .. } => BartnikStatus::IllPosed,
        FlatError::Numerical(_) => BartnikStatus::Numerical,
    }
}

fn guard(f: impl FnOnce() -> BartnikStatus) -> BartnikStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == BartnikStatus::Ok {
                set_error("");
            }
            s
        }
        Err(_) => fail(BartnikStatus::Panic, "internal panic"),
    }
}

fn new_report(config: serde_json::Value, checks: Vec<Check>, results: Option<serde_json::Value>) -> BartnikReport {
    let mut report = Report::new(config, checks);
    if let Some(r) = results {
        report = report.with_results(r);
    }
    let json = CString::new(report.to_json()).unwrap_or_default();
    BartnikReport { report, json }
}

/// Store `value` behind `out`.
///
/// # Safety
/// `out` must be valid for writes.
unsafe fn emit<T>(out: *mut *mut T, value: T) -> BartnikStatus {
    *out = Box::into_raw(Box::new(value));
    BartnikStatus::Ok
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, BartnikStatus> {
    if p.is_null() {
        return Err(fail(BartnikStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(BartnikStatus::InvalidArgument, "string is not UTF-8"))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bartnik_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message describing the last failure on this thread; empty after a success.
#[no_mangle]
pub extern "C" fn bartnik_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Run the symbolic suite against the embedded golden files and the numeric sweeps.
///
/// # Safety
/// `out` must be a valid pointer; on success it receives a report owned by the caller.
#[no_mangle]
pub unsafe extern "C" fn bartnik_symbols_verify(
    seed: u64,
    samples: usize,
    out: *mut *mut BartnikReport,
) -> BartnikStatus {
    guard(|| {
        if out.is_null() {
            return fail(BartnikStatus::NullPointer, "null output pointer");
        }
        let mut checks = run_symbols_suite(&GoldenSource::Embedded).checks;
        let adn = run_adn(seed, samples);
        checks.extend(adn.checks);
        let cfg = json!({"command": "symbols verify", "seed": seed, "samples": samples, "golden": "embedded"});
        emit(out, new_report(cfg, checks, serde_json::to_value(&adn.summaries).ok()))
    })
}

/// Run the geometry battery on a fixture (`minkowski`, `schwarzschild[:m]`, `kerr[:m,a]`).
///
/// # Safety
/// `fixture` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bartnik_geometry_verify(
    fixture: *const c_char,
    seed: u64,
    out: *mut *mut BartnikReport,
) -> BartnikStatus {
    guard(|| {
        if out.is_null() {
            return fail(BartnikStatus::NullPointer, "null output pointer");
        }
        let name = match str_arg(fixture) {
            Ok(s) => s,
            Err(s) => return s,
        };
        let name: FixtureName = match name.parse() {
            Ok(n) => n,
            Err(e) => return fail(BartnikStatus::InvalidArgument, &e.to_string()),
        };
        let cfg = GeometryConfig::new(name, seed);
        match run_geometry(&cfg) {
            Ok(o) => emit(
                out,
                new_report(json!({"command": "geometry verify", "run": cfg}), o.checks, None),
            ),
            Err(e) => fail(BartnikStatus::Numerical, &e.to_string()),
        }
    })
}

/// Kernel analysis of the homogeneous flat problem at truncations `lmax[0..count]`.
///
/// # Safety
/// `lmax` must point to `count` values and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bartnik_flat_kernel(
    lmax: *const usize,
    count: usize,
    seed: u64,
    out: *mut *mut BartnikReport,
) -> BartnikStatus {
    guard(|| {
        if out.is_null() || lmax.is_null() {
            return fail(BartnikStatus::NullPointer, "null pointer argument");
        }
        let ls = std::slice::from_raw_parts(lmax, count).to_vec();
        if ls.is_empty() || ls.iter().any(|l| *l < 2) {
            return fail(
                BartnikStatus::InvalidArgument,
                "need at least one truncation, each >= 2",
            );
        }
        match kernel_suite(&ls, seed) {
            Ok(o) => {
                let cfg = json!({"command": "flatbvp kernel", "seed": seed, "lmax": ls});
                emit(out, new_report(cfg, o.checks, serde_json::to_value(&o.reports).ok()))
            }
            Err(e) => fail(flat_status(&e), &e.to_string()),
        }
    })
}

/// 1 if every check passed, 0 otherwise (also for a null handle).
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bartnik_report_passed(report: *const BartnikReport) -> i32 {
    report.as_ref().map_or(0, |r| r.report.all_passed() as i32)
}

/// Number of checks in the report.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bartnik_report_check_count(report: *const BartnikReport) -> usize {
    report.as_ref().map_or(0, |r| r.report.checks.len())
}

/// Report as JSON, owned by the handle; null for a null handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bartnik_report_json(report: *const BartnikReport) -> *const c_char {
    report.as_ref().map_or(std::ptr::null(), |r| r.json.as_ptr())
}

/// # Safety
/// `report` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bartnik_report_free(report: *mut BartnikReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Parse boundary data from JSON.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bartnik_data_from_json(
    json: *const c_char,
    out: *mut *mut BartnikBoundaryData,
) -> BartnikStatus {
    guard(|| {
        if out.is_null() {
            return fail(BartnikStatus::NullPointer, "null output pointer");
        }
        let text = match str_arg(json) {
            Ok(s) => s,
            Err(s) => return s,
        };
        match BoundaryData::from_json(text) {
            Ok(data) => emit(out, BartnikBoundaryData { data }),
            Err(e) => fail(flat_status(&e), &e.to_string()),
        }
    })
}

/// Zero data at degree `lmax`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bartnik_data_zero(lmax: usize, out: *mut *mut BartnikBoundaryData) -> BartnikStatus {
    guard(|| {
        if out.is_null() {
            return fail(BartnikStatus::NullPointer, "null output pointer");
        }
        emit(
            out,
            BartnikBoundaryData {
                data: BoundaryData::zero(lmax),
            },
        )
    })
}

/// # Safety
/// `data` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bartnik_data_free(data: *mut BartnikBoundaryData) {
    if !data.is_null() {
        drop(Box::from_raw(data));
    }
}

/// Solve at truncation `lmax`, verified against a solve at `lmax + 2`.
///
/// # Safety
/// `data` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bartnik_solve(
    data: *const BartnikBoundaryData,
    lmax: usize,
    seed: u64,
    out: *mut *mut BartnikSolution,
) -> BartnikStatus {
    guard(|| {
        let Some(d) = data.as_ref() else {
            return fail(BartnikStatus::NullPointer, "null data handle");
        };
        if out.is_null() {
            return fail(BartnikStatus::NullPointer, "null output pointer");
        }
        match solve_suite(&d.data, lmax, lmax + 2, seed) {
            Ok(o) => {
                let cfg = json!({"command": "flatbvp solve", "seed": seed, "lmax": lmax, "check_lmax": lmax + 2});
                let report = new_report(cfg, o.checks, serde_json::to_value(&o.report).ok());
                emit(
                    out,
                    BartnikSolution {
                        solution: o.solution,
                        report,
                    },
                )
            }
            Err(e) => fail(flat_status(&e), &e.to_string()),
        }
    })
}

/// Number of solution components; their order is h11 h12 h13 h22 h23 h33 Y1 Y2 Y3 v G.
#[no_mangle]
pub extern "C" fn bartnik_component_count() -> usize {
    COMPONENTS.len()
}

/// Evaluate all components at `x[0..3]` (|x| >= 1) into `values[0..11]`.
///
/// # Safety
/// `solution` must be a live handle, `x` must point to 3 values and `values` to 11.
#[no_mangle]
pub unsafe extern "C" fn bartnik_solution_eval(
    solution: *const BartnikSolution,
    x: *const f64,
    values: *mut f64,
) -> BartnikStatus {
    guard(|| {
        let Some(s) = solution.as_ref() else {
            return fail(BartnikStatus::NullPointer, "null solution handle");
        };
        if x.is_null() || values.is_null() {
            return fail(BartnikStatus::NullPointer, "null array argument");
        }
        let p = std::slice::from_raw_parts(x, 3);
        match s.solution.values(&Vector3::new(p[0], p[1], p[2])) {
            Ok(v) => {
                std::slice::from_raw_parts_mut(values, v.len()).copy_from_slice(&v);
                BartnikStatus::Ok
            }
            Err(e) => fail(flat_status(&e), &e.to_string()),
        }
    })
}

/// Coefficient of r^-(l+1) Y_lm in component `component`; zero beyond the truncation.
///
/// # Safety
/// `solution` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bartnik_solution_coefficient(
    solution: *const BartnikSolution,
    component: usize,
    l: usize,
    m: i64,
    out: *mut f64,
) -> BartnikStatus {
    guard(|| {
        let Some(s) = solution.as_ref() else {
            return fail(BartnikStatus::NullPointer, "null solution handle");
        };
        if out.is_null() {
            return fail(BartnikStatus::NullPointer, "null output pointer");
        }
        if component >= COMPONENTS.len() || m.unsigned_abs() as usize > l {
            return fail(BartnikStatus::InvalidArgument, "component or order out of range");
        }
        *out = s.solution.coefficient(component, l, m);
        BartnikStatus::Ok
    })
}

/// Verification report of the solve, owned by the solution handle.
///
/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bartnik_solution_report(solution: *const BartnikSolution) -> *const BartnikReport {
    solution
        .as_ref()
        .map_or(std::ptr::null(), |s| &s.report as *const BartnikReport)
}

/// # Safety
/// `solution` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bartnik_solution_free(solution: *mut BartnikSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr::null_mut;

    fn last_error() -> String {
        unsafe { CStr::from_ptr(bartnik_last_error()) }
            .to_string_lossy()
            .into_owned()
    }

    #[test]
    fn version_is_the_crate_version() {
        let v = unsafe { CStr::from_ptr(bartnik_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }

    #[test]
    fn null_pointers_are_reported() {
        unsafe {
            assert_eq!(bartnik_symbols_verify(1, 10, null_mut()), BartnikStatus::NullPointer);
            assert!(!last_error().is_empty());
            assert_eq!(bartnik_report_passed(std::ptr::null()), 0);
            assert!(bartnik_report_json(std::ptr::null()).is_null());
            bartnik_report_free(null_mut());
            bartnik_data_free(null_mut());
            bartnik_solution_free(null_mut());
            let mut sol = null_mut();
            assert_eq!(
                bartnik_solve(std::ptr::null(), 2, 1, &mut sol),
                BartnikStatus::NullPointer
            );
        }
    }

    #[test]
    fn symbols_report_round_trip() {
        unsafe {
            let mut r = null_mut();
            assert_eq!(bartnik_symbols_verify(3, 20, &mut r), BartnikStatus::Ok);
            assert_eq!(bartnik_report_passed(r), 1);
            assert!(bartnik_report_check_count(r) >= 8);
            let text = CStr::from_ptr(bartnik_report_json(r)).to_str().unwrap();
            let v: serde_json::Value = serde_json::from_str(text).unwrap();
            assert_eq!(v["config"]["seed"], 3);
            bartnik_report_free(r);
        }
    }

    #[test]
    fn geometry_fixture_errors() {
        unsafe {
            let mut r = null_mut();
            let bad = CString::new("anti-de-sitter").unwrap();
            assert_eq!(
                bartnik_geometry_verify(bad.as_ptr(), 1, &mut r),
                BartnikStatus::InvalidArgument
            );
            assert!(last_error().contains("anti-de-sitter"));
            let good = CString::new("minkowski").unwrap();
            assert_eq!(bartnik_geometry_verify(good.as_ptr(), 1, &mut r), BartnikStatus::Ok);
            assert_eq!(bartnik_report_passed(r), 1);
            assert!(last_error().is_empty());
            bartnik_report_free(r);
        }
    }

    #[test]
    fn kernel_report_fails_with_poincare_kernel() {
        unsafe {
            let mut r = null_mut();
            let ls = [2usize];
            assert_eq!(bartnik_flat_kernel(ls.as_ptr(), 1, 1, &mut r), BartnikStatus::Ok);
            assert_eq!(bartnik_report_passed(r), 0);
            let v: serde_json::Value =
                serde_json::from_str(CStr::from_ptr(bartnik_report_json(r)).to_str().unwrap()).unwrap();
            assert_eq!(v["results"][0]["kernel_dim"], 10);
            bartnik_report_free(r);
            let bad = [1usize];
            assert_eq!(
                bartnik_flat_kernel(bad.as_ptr(), 1, 1, &mut r),
                BartnikStatus::InvalidArgument
            );
        }
    }

    #[test]
    fn solve_zero_and_sample_data() {
        unsafe {
            let mut d = null_mut();
            assert_eq!(bartnik_data_zero(0, &mut d), BartnikStatus::Ok);
            let mut s = null_mut();
            assert_eq!(bartnik_solve(d, 2, 1, &mut s), BartnikStatus::Ok);
            let mut vals = [1.0; 11];
            assert_eq!(
                bartnik_solution_eval(s, [1.5, 0.0, 0.0].as_ptr(), vals.as_mut_ptr()),
                BartnikStatus::Ok
            );
            assert_eq!(vals, [0.0; 11]);
            assert_eq!(
                bartnik_solution_eval(s, [0.5, 0.0, 0.0].as_ptr(), vals.as_mut_ptr()),
                BartnikStatus::InvalidArgument
            );
            bartnik_solution_free(s);
            bartnik_data_free(d);

            let text = CString::new(include_str!("../../core/data/sample_perturbation.json")).unwrap();
            assert_eq!(bartnik_data_from_json(text.as_ptr(), &mut d), BartnikStatus::Ok);
            assert_eq!(bartnik_solve(d, 4, 1, &mut s), BartnikStatus::Ok);
            let report = bartnik_solution_report(s);
            assert_eq!(bartnik_report_passed(report), 1);
            let mut c = 0.0;
            assert_eq!(bartnik_solution_coefficient(s, 0, 1, 0, &mut c), BartnikStatus::Ok);
            assert_eq!(
                bartnik_solution_coefficient(s, 11, 1, 0, &mut c),
                BartnikStatus::InvalidArgument
            );
            assert_eq!(
                bartnik_solution_coefficient(s, 0, 1, 2, &mut c),
                BartnikStatus::InvalidArgument
            );
            bartnik_solution_free(s);
            bartnik_data_free(d);
        }
    }

    #[test]
    fn malformed_json_is_rejected() {
        unsafe {
            let mut d = null_mut();
            let text = CString::new("{not json").unwrap();
            assert_eq!(
                bartnik_data_from_json(text.as_ptr(), &mut d),
                BartnikStatus::InvalidArgument
            );
            assert!(d.is_null());
        }
    }
}
