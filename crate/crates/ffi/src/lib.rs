//! C ABI surface; see include/sdrkdg.h for the mirrored declarations.
//!
//! Every entry point returns a status code (0 ok, 2 config error, 3 blow-up,
//! 4 internal error) or a handle plus a status out-parameter. The message of
//! the most recent failure on the calling thread is available through
//! `sdrkdg_last_error`.

use std::cell::RefCell;
use std::ffi::{c_char, c_double, c_int, CStr};
use std::ptr;

use sdrkdg::error::SolverError;
use sdrkdg::field::{cell_averages_1d, cell_averages_2d};
use sdrkdg::harness::{resolve, run_scenario, solve_1d, solve_2d, RunConfig};
use sdrkdg::problems::{self, Scenario};
use sdrkdg::tableau::builtin_tableau;
use sdrkdg::vn::{predicted_error_star, SchemeSymbol};

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(e: &SolverError) -> c_int {
    LAST_ERROR.with(|s| *s.borrow_mut() = e.to_string());
    e.exit_code() as c_int
}

fn clear_error() {
    LAST_ERROR.with(|s| s.borrow_mut().clear());
}

/// Copy the most recent error message on this thread into `buf` (NUL
/// terminated, truncated to `len` bytes). Returns the full message length.
///
/// # Safety
/// `buf` must be valid for writes of `len` bytes, or null.
#[no_mangle]
pub unsafe extern "C" fn sdrkdg_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|s| {
        let msg = s.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            unsafe {
                ptr::copy_nonoverlapping(msg.as_ptr(), buf as *mut u8, n);
                *buf.add(n) = 0;
            }
        }
        msg.len()
    })
}

unsafe fn parse_cstr<'a>(s: *const c_char) -> Result<&'a str, SolverError> {
    if s.is_null() {
        return Err(SolverError::InvalidArgument("null string argument".into()));
    }
    unsafe { CStr::from_ptr(s) }
        .to_str()
        .map_err(|_| SolverError::InvalidArgument("string argument is not UTF-8".into()))
}

/// Summary of a completed run; `eps_star` and the norms are NaN when the
/// scenario has no exact solution.
#[repr(C)]
pub struct SdrkdgSummary {
    pub n_steps: u64,
    pub t_final: c_double,
    pub l1: c_double,
    pub l2: c_double,
    pub linf: c_double,
    pub eps_star: c_double,
}

/// Run a scenario from a JSON config and write its output files. Returns 0
/// on success and fills `out` when non-null.
///
/// # Safety
/// `config_json` must be a NUL-terminated string; `out` must be null or
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sdrkdg_run(
    config_json: *const c_char,
    out: *mut SdrkdgSummary,
) -> c_int {
    let result = (|| {
        let text = unsafe { parse_cstr(config_json) }?;
        let cfg = RunConfig::from_json(text)?;
        run_scenario(&cfg)
    })();
    match result {
        Ok(summary) => {
            clear_error();
            if !out.is_null() {
                let nan = f64::NAN;
                unsafe {
                    *out = SdrkdgSummary {
                        n_steps: summary.n_steps as u64,
                        t_final: summary.t_final,
                        l1: summary.norms.map_or(nan, |n| n.l1),
                        l2: summary.norms.map_or(nan, |n| n.l2),
                        linf: summary.norms.map_or(nan, |n| n.linf),
                        eps_star: summary.eps_star.unwrap_or(nan),
                    };
                }
            }
            0
        }
        Err(e) => set_error(&e),
    }
}

/// Maximum stable CFL number of a built-in scheme at degree k.
///
/// # Safety
/// `scheme` must be NUL-terminated; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sdrkdg_max_cfl(
    scheme: *const c_char,
    k: c_int,
    out: *mut c_double,
) -> c_int {
    let result = (|| {
        let name = unsafe { parse_cstr(scheme) }?;
        let tab = builtin_tableau(name)?;
        SchemeSymbol::new(k as usize)?.max_cfl(&tab)
    })();
    match result {
        Ok(v) => {
            clear_error();
            unsafe { *out = v };
            0
        }
        Err(e) => set_error(&e),
    }
}

/// Fully discrete worst sample-point error prediction for smooth advection.
///
/// # Safety
/// `scheme` must be NUL-terminated; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sdrkdg_predicted_error(
    scheme: *const c_char,
    k: c_int,
    lambda: c_double,
    n_cells: c_int,
    t_end: c_double,
    out: *mut c_double,
) -> c_int {
    let result = (|| {
        let name = unsafe { parse_cstr(scheme) }?;
        let tab = builtin_tableau(name)?;
        predicted_error_star(&tab, k as usize, lambda, n_cells as usize, t_end)
    })();
    match result {
        Ok(v) => {
            clear_error();
            unsafe { *out = v };
            0
        }
        Err(e) => set_error(&e),
    }
}

enum RunData {
    OneD(sdrkdg::harness::Solved1d),
    TwoD(sdrkdg::harness::Solved2d),
}

/// Opaque handle to a completed run's solution.
pub struct SdrkdgRun {
    data: RunData,
    n_comp: usize,
}

/// Run a scenario from a JSON config and keep the solution in memory (no
/// files written). Returns null on failure and sets `status`.
///
/// # Safety
/// `config_json` must be NUL-terminated; `status` must be null or valid for
/// writes. The returned handle must be released with `sdrkdg_run_free`.
#[no_mangle]
pub unsafe extern "C" fn sdrkdg_run_open(
    config_json: *const c_char,
    status: *mut c_int,
) -> *mut SdrkdgRun {
    let result = (|| {
        let text = unsafe { parse_cstr(config_json) }?;
        let cfg = RunConfig::from_json(text)?;
        let (sc, r) = resolve(&cfg)?;
        match sc {
            Scenario::OneD(s) => Ok(SdrkdgRun {
                n_comp: s.system.n_comp(),
                data: RunData::OneD(solve_1d(&s, &r)?),
            }),
            Scenario::TwoD(s) => Ok(SdrkdgRun {
                n_comp: s.system.n_comp(),
                data: RunData::TwoD(solve_2d(&s, &r)?),
            }),
        }
    })();
    match result {
        Ok(run) => {
            clear_error();
            if !status.is_null() {
                unsafe { *status = 0 };
            }
            Box::into_raw(Box::new(run))
        }
        Err(e) => {
            let code = set_error(&e);
            if !status.is_null() {
                unsafe { *status = code };
            }
            ptr::null_mut()
        }
    }
}

/// Number of (active) cells in a run's mesh.
///
/// # Safety
/// `run` must be a live handle from `sdrkdg_run_open`.
#[no_mangle]
pub unsafe extern "C" fn sdrkdg_run_n_cells(run: *const SdrkdgRun) -> c_int {
    let run = unsafe { &*run };
    match &run.data {
        RunData::OneD(s) => s.mesh.n_cells() as c_int,
        RunData::TwoD(s) => s.mesh.n_active() as c_int,
    }
}

/// Number of solution components.
///
/// # Safety
/// `run` must be a live handle from `sdrkdg_run_open`.
#[no_mangle]
pub unsafe extern "C" fn sdrkdg_run_n_components(run: *const SdrkdgRun) -> c_int {
    unsafe { &*run }.n_comp as c_int
}

/// Copy cell-center coordinates into `buf`: x per cell in 1D, x,y pairs in
/// 2D. Returns the number of doubles required; copies only when `len` is
/// large enough.
///
/// # Safety
/// `run` must be live; `buf` must be null or valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn sdrkdg_run_coords(
    run: *const SdrkdgRun,
    buf: *mut c_double,
    len: usize,
) -> usize {
    let run = unsafe { &*run };
    let coords: Vec<f64> = match &run.data {
        RunData::OneD(s) => (0..s.mesh.n_cells()).map(|j| s.mesh.cell_center(j)).collect(),
        RunData::TwoD(s) => s
            .mesh
            .active_cells()
            .iter()
            .flat_map(|&(ix, iy)| {
                let (x, y) = s.mesh.cell_center(ix, iy);
                [x, y]
            })
            .collect(),
    };
    if !buf.is_null() && len >= coords.len() {
        unsafe { ptr::copy_nonoverlapping(coords.as_ptr(), buf, coords.len()) };
    }
    coords.len()
}

/// Copy cell averages into `buf`, cell-major with `n_components` values per
/// cell. Returns the number of doubles required; copies only when `len` is
/// large enough.
///
/// # Safety
/// `run` must be live; `buf` must be null or valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn sdrkdg_run_averages(
    run: *const SdrkdgRun,
    buf: *mut c_double,
    len: usize,
) -> usize {
    let run = unsafe { &*run };
    let avgs = match &run.data {
        RunData::OneD(s) => cell_averages_1d(&s.field, &s.mesh),
        RunData::TwoD(s) => cell_averages_2d(&s.field, &s.mesh),
    };
    let flat: Vec<f64> =
        avgs.iter().flat_map(|a| a[..run.n_comp].iter().copied()).collect();
    if !buf.is_null() && len >= flat.len() {
        unsafe { ptr::copy_nonoverlapping(flat.as_ptr(), buf, flat.len()) };
    }
    flat.len()
}

/// Release a run handle.
///
/// # Safety
/// `run` must come from `sdrkdg_run_open` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn sdrkdg_run_free(run: *mut SdrkdgRun) {
    if !run.is_null() {
        drop(unsafe { Box::from_raw(run) });
    }
}

/// Names of the built-in scenarios, as a NUL-separated, double-NUL
/// terminated static list.
#[no_mangle]
pub extern "C" fn sdrkdg_scenario_names() -> *const c_char {
    static NAMES: &str = concat!(
        "advection\0burgers_smooth\0burgers_sonic\0euler_smooth_1d\0sod\0blast\0",
        "shu_osher\0euler_smooth_2d\0double_mach\0forward_step\0\0"
    );
    debug_assert_eq!(problems::SCENARIO_NAMES.len(), 10);
    NAMES.as_ptr() as *const c_char
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    #[test]
    fn max_cfl_round_trips() {
        let name = CString::new("ssprk2_sd").unwrap();
        let mut out = 0.0;
        let code = unsafe { sdrkdg_max_cfl(name.as_ptr(), 1, &mut out) };
        assert_eq!(code, 0);
        assert!((out - 0.566).abs() < 2e-3, "{out}");
    }

    #[test]
    fn bad_scheme_sets_error() {
        let name = CString::new("nosuch").unwrap();
        let mut out = 0.0;
        let code = unsafe { sdrkdg_max_cfl(name.as_ptr(), 1, &mut out) };
        assert_eq!(code, 2);
        let mut buf = [0i8; 256];
        let n = unsafe { sdrkdg_last_error(buf.as_mut_ptr(), buf.len()) };
        assert!(n > 0);
        let msg = unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap();
        assert!(msg.contains("nosuch"), "{msg}");
    }

    #[test]
    fn run_handle_exposes_solution() {
        let cfg = CString::new(
            r#"{"scenario":"advection","scheme":"ssprk2_sd","n":20,"cfl":0.3}"#,
        )
        .unwrap();
        let mut status = -1;
        let run = unsafe { sdrkdg_run_open(cfg.as_ptr(), &mut status) };
        assert_eq!(status, 0);
        assert!(!run.is_null());
        let n = unsafe { sdrkdg_run_n_cells(run) };
        assert_eq!(n, 20);
        assert_eq!(unsafe { sdrkdg_run_n_components(run) }, 1);
        let need = unsafe { sdrkdg_run_coords(run, ptr::null_mut(), 0) };
        assert_eq!(need, 20);
        let mut coords = vec![0.0; need];
        unsafe { sdrkdg_run_coords(run, coords.as_mut_ptr(), coords.len()) };
        assert!(coords[0] < coords[19]);
        let mut avgs = vec![0.0; 20];
        let need = unsafe { sdrkdg_run_averages(run, avgs.as_mut_ptr(), avgs.len()) };
        assert_eq!(need, 20);
        // advected sine keeps values in [-1, 1]
        assert!(avgs.iter().all(|v| v.abs() <= 1.0 + 1e-8));
        unsafe { sdrkdg_run_free(run) };
    }

    #[test]
    fn run_writes_summary() {
        let dir = std::env::temp_dir().join(format!("sdrkdg_ffi_{}", std::process::id()));
        let cfg = CString::new(format!(
            r#"{{"scenario":"advection","scheme":"ssprk2_sd","n":20,"cfl":0.3,"out":"{}"}}"#,
            dir.display()
        ))
        .unwrap();
        let mut summary = SdrkdgSummary {
            n_steps: 0,
            t_final: 0.0,
            l1: 0.0,
            l2: 0.0,
            linf: 0.0,
            eps_star: 0.0,
        };
        let code = unsafe { sdrkdg_run(cfg.as_ptr(), &mut summary) };
        assert_eq!(code, 0);
        assert!(summary.n_steps > 0);
        assert!((summary.t_final - 1.0).abs() < 1e-12);
        assert!(summary.l2 > 0.0 && summary.l2 < 1.0);
        std::fs::remove_dir_all(dir).ok();
    }

    #[test]
    fn blow_up_maps_to_code_3() {
        let cfg = CString::new(
            r#"{"scenario":"advection","scheme":"rkdg2","n":640,"cfl":0.565}"#,
        )
        .unwrap();
        let run = unsafe { sdrkdg_run_open(cfg.as_ptr(), ptr::null_mut()) };
        assert!(run.is_null());
        let cfg2 = CString::new(r#"{"scenario":"advection","bogus":true}"#).unwrap();
        let mut status = 0;
        let run2 = unsafe { sdrkdg_run_open(cfg2.as_ptr(), &mut status) };
        assert!(run2.is_null());
        assert_eq!(status, 2);
    }

    #[test]
    fn scenario_names_list_is_double_nul_terminated() {
        let p = sdrkdg_scenario_names();
        let mut names = Vec::new();
        let mut cursor = p;
        loop {
            let s = unsafe { CStr::from_ptr(cursor) };
            if s.is_empty() {
                break;
            }
            names.push(s.to_str().unwrap());
            cursor = unsafe { cursor.add(s.to_bytes().len() + 1) };
        }
        assert_eq!(names, problems::SCENARIO_NAMES.to_vec());
    }
}
