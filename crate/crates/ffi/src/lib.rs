//! C interface to `flowinfer`.
//!
//! Objects are opaque handles created by `fi_*_new`/`fi_*_from_*` functions
//! and released with the matching `fi_*_free`. Every fallible function
//! returns an [`FiStatus`]; on failure the message is available from
//! [`fi_last_error_message`] on the same thread until the next call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use flowinfer::advect::{solve, ScalarTrajectory, SolverConfig};
use flowinfer::cli::{cmd_consistency, RunConfig};
use flowinfer::field::{FourierScalarField, FourierVelocityField, ModeLattice, Wavevector};
use flowinfer::inference::{ParameterSpace, Potential, PotentialFn};
use flowinfer::observe::{sample_design, synthesize_data, ObservationSet};
use flowinfer::Error;

/// Status codes; the non-zero values other than `1` and `5` match the
/// command-line exit statuses.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FiStatus {
    Ok = 0,
    /// A null pointer, bad UTF-8 or an out-of-range index.
    InvalidArgument = 1,
    Config = 2,
    Numeric = 3,
    Budget = 4,
    /// A Rust panic was caught at the boundary.
    Internal = 5,
}

pub struct FiVelocity(FourierVelocityField);
pub struct FiScalar(FourierScalarField);
pub struct FiTrajectory(ScalarTrajectory);
pub struct FiRunConfig(RunConfig);
pub struct FiObservations(ObservationSet);
pub struct FiPotential(Potential);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: String) {
    let message = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = message);
}

enum Failure {
    Arg(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Outcome = Result<(), Failure>;

fn guard(body: impl FnOnce() -> Outcome) -> FiStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => FiStatus::Ok,
        Ok(Err(Failure::Arg(msg))) => {
            set_error(msg);
            FiStatus::InvalidArgument
        }
        Ok(Err(Failure::Core(e))) => {
            set_error(e.to_string());
            match e.exit_code() {
                4 => FiStatus::Budget,
                3 => FiStatus::Numeric,
                _ => FiStatus::Config,
            }
        }
        Err(_) => {
            set_error("internal panic".into());
            FiStatus::Internal
        }
    }
}

unsafe fn text<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Arg(format!("`{name}` is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Arg(format!("`{name}` is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure::Arg(format!("`{name}` is null")))
}

unsafe fn slice<'a>(p: *const f64, len: usize, name: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Arg(format!("`{name}` is null")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> Outcome {
    if out.is_null() {
        return Err(Failure::Arg("output pointer is null".into()));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn put<T>(out: *mut T, value: T) -> Outcome {
    if out.is_null() {
        return Err(Failure::Arg("output pointer is null".into()));
    }
    *out = value;
    Ok(())
}

unsafe fn release<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Message of the last failure on this thread; empty if none. The pointer
/// stays valid until the next `fi_*` call on this thread.
#[no_mangle]
pub extern "C" fn fi_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Velocity from parameter-space coordinates. `space` is `shear`,
/// `cellular`, `laminar` or `full` (with `k_param`).
///
/// # Safety
/// `space` must be a NUL-terminated string, `theta` must point to `len`
/// doubles, and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fi_velocity_from_params(
    space: *const c_char,
    k_param: usize,
    theta: *const f64,
    len: usize,
    out: *mut *mut FiVelocity,
) -> FiStatus {
    guard(|| {
        let space = ParameterSpace::from_name(text(space, "space")?, k_param)?;
        let theta = slice(theta, len, "theta")?;
        if theta.len() != space.dim() {
            return Err(Failure::Arg(format!("expected {} coordinates, got {}", space.dim(), theta.len())));
        }
        store(out, FiVelocity(space.to_field(theta)))
    })
}

/// Velocity from the field CSV format.
///
/// # Safety
/// `csv` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fi_velocity_from_csv(csv: *const c_char, out: *mut *mut FiVelocity) -> FiStatus {
    guard(|| store(out, FiVelocity(FourierVelocityField::from_csv(text(csv, "csv")?)?)))
}

/// `u(x)` at one point.
///
/// # Safety
/// `v` must be a live handle; `u1`, `u2` writable.
#[no_mangle]
pub unsafe extern "C" fn fi_velocity_at(v: *const FiVelocity, x1: f64, x2: f64, u1: *mut f64, u2: *mut f64) -> FiStatus {
    guard(|| {
        let u = handle(v, "v")?.0.velocity_at_point([x1, x2]);
        put(u1, u[0])?;
        put(u2, u[1])
    })
}

/// # Safety
/// `v` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fi_velocity_free(v: *mut FiVelocity) {
    release(v)
}

/// `amplitude · sin(2π (k1 x1 + k2 x2))` truncated at `k_max`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fi_scalar_sine(
    k_max: usize,
    k1: i32,
    k2: i32,
    amplitude: f64,
    out: *mut *mut FiScalar,
) -> FiStatus {
    guard(|| {
        let field = FourierScalarField::sine(ModeLattice::new(k_max), Wavevector::new(k1, k2), amplitude)?;
        store(out, FiScalar(field))
    })
}

/// Scalar field from the field CSV format.
///
/// # Safety
/// `csv` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fi_scalar_from_csv(csv: *const c_char, out: *mut *mut FiScalar) -> FiStatus {
    guard(|| store(out, FiScalar(FourierScalarField::from_csv(text(csv, "csv")?)?)))
}

/// # Safety
/// `s` must be a live handle and `value` writable.
#[no_mangle]
pub unsafe extern "C" fn fi_scalar_evaluate(s: *const FiScalar, x1: f64, x2: f64, value: *mut f64) -> FiStatus {
    guard(|| put(value, handle(s, "s")?.0.evaluate_at([x1, x2])))
}

/// # Safety
/// `s` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fi_scalar_free(s: *mut FiScalar) {
    release(s)
}

/// Solves from `theta0` to `t_final` with default step and grid settings,
/// keeping checkpoints every `t_final / 64`.
///
/// # Safety
/// `v` and `theta0` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fi_solve(
    v: *const FiVelocity,
    theta0: *const FiScalar,
    kappa: f64,
    t_final: f64,
    out: *mut *mut FiTrajectory,
) -> FiStatus {
    guard(|| {
        let theta0 = &handle(theta0, "theta0")?.0;
        let config = SolverConfig::new(kappa, t_final, theta0.lattice().k_max());
        let traj = solve(&handle(v, "v")?.0, theta0, "ic", &config, &[])?;
        store(out, FiTrajectory(traj))
    })
}

/// Number of stored snapshots.
///
/// # Safety
/// `traj` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn fi_trajectory_len(traj: *const FiTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.0.snapshots().len())
}

/// Time and value at `(x1, x2)` of snapshot `index`.
///
/// # Safety
/// `traj` must be a live handle; `t` and `value` writable.
#[no_mangle]
pub unsafe extern "C" fn fi_trajectory_sample(
    traj: *const FiTrajectory,
    index: usize,
    x1: f64,
    x2: f64,
    t: *mut f64,
    value: *mut f64,
) -> FiStatus {
    guard(|| {
        let snaps = handle(traj, "traj")?.0.snapshots();
        let snap = snaps
            .get(index)
            .ok_or_else(|| Failure::Arg(format!("index {index} out of range ({} snapshots)", snaps.len())))?;
        put(t, snap.t)?;
        put(value, snap.field.evaluate_at([x1, x2]))
    })
}

/// Largest `|‖θ(t)‖² + 2κ∫‖∇θ‖² − ‖θ0‖²|` over the snapshots.
///
/// # Safety
/// `traj` must be a live handle and `residual` writable.
#[no_mangle]
pub unsafe extern "C" fn fi_trajectory_energy_residual(traj: *const FiTrajectory, residual: *mut f64) -> FiStatus {
    guard(|| {
        let report = handle(traj, "traj")?.0.energy_report();
        put(residual, report.iter().map(|r| r.residual.abs()).fold(0.0, f64::max))
    })
}

/// # Safety
/// `traj` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fi_trajectory_free(traj: *mut FiTrajectory) {
    release(traj)
}

/// Parses and validates a TOML run configuration.
///
/// # Safety
/// `toml` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fi_run_config_from_toml(toml: *const c_char, out: *mut *mut FiRunConfig) -> FiStatus {
    guard(|| store(out, FiRunConfig(RunConfig::from_toml_str(text(toml, "toml")?)?)))
}

/// # Safety
/// `config` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fi_run_config_free(config: *mut FiRunConfig) {
    release(config)
}

/// Samples the configured design and synthesizes data at `v_star`.
///
/// # Safety
/// `config` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fi_observations_synthesize(
    config: *const FiRunConfig,
    out: *mut *mut FiObservations,
) -> FiStatus {
    guard(|| {
        let config = &handle(config, "config")?.0;
        let lab = config.lab_config()?;
        let model = lab.forward_model()?;
        let design = sample_design(config.n_points, lab.t_final, config.design_seed)?;
        let v_star = lab.space()?.to_field(&lab.v_star);
        let obs = synthesize_data(&v_star, &design, &model, lab.sigma_eta, config.noise_seed)?;
        store(out, FiObservations(obs))
    })
}

/// # Safety
/// `obs` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn fi_observations_len(obs: *const FiObservations) -> usize {
    obs.as_ref().map_or(0, |o| o.0.len())
}

/// Fields of datum `index`; `ic` is 0-based.
///
/// # Safety
/// `obs` must be a live handle; all outputs writable.
#[no_mangle]
pub unsafe extern "C" fn fi_observations_get(
    obs: *const FiObservations,
    index: usize,
    t: *mut f64,
    x1: *mut f64,
    x2: *mut f64,
    ic: *mut usize,
    y: *mut f64,
) -> FiStatus {
    guard(|| {
        let data = handle(obs, "obs")?.0.data();
        let o = data
            .get(index)
            .ok_or_else(|| Failure::Arg(format!("index {index} out of range ({} data)", data.len())))?;
        put(t, o.t)?;
        put(x1, o.x[0])?;
        put(x2, o.x[1])?;
        put(ic, o.ic)?;
        put(y, o.y)
    })
}

/// # Safety
/// `obs` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fi_observations_free(obs: *mut FiObservations) {
    release(obs)
}

/// The data misfit `Φ` for `obs` under the configured model and
/// parameter space. `obs` is copied.
///
/// # Safety
/// `config` and `obs` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fi_potential_new(
    config: *const FiRunConfig,
    obs: *const FiObservations,
    out: *mut *mut FiPotential,
) -> FiStatus {
    guard(|| {
        let lab = handle(config, "config")?.0.lab_config()?;
        let obs = handle(obs, "obs")?.0.clone();
        let model = lab.forward_model()?.with_pairing(obs.pairing());
        store(out, FiPotential(Potential::new(obs, model, lab.space()?)?))
    })
}

/// `Φ(θ)` for parameter coordinates `theta`.
///
/// # Safety
/// `pot` must be a live handle, `theta` must point to `len` doubles and
/// `phi` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fi_potential_phi(pot: *const FiPotential, theta: *const f64, len: usize, phi: *mut f64) -> FiStatus {
    guard(|| {
        let pot = &handle(pot, "pot")?.0;
        let theta = slice(theta, len, "theta")?;
        if theta.len() != pot.space().dim() {
            return Err(Failure::Arg(format!("expected {} coordinates, got {}", pot.space().dim(), theta.len())));
        }
        put(phi, pot.phi(theta)?)
    })
}

/// # Safety
/// `pot` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fi_potential_free(pot: *mut FiPotential) {
    release(pot)
}

/// Runs the configured consistency experiment and writes `record.json`
/// plus its CSV tables into `out_dir`.
///
/// # Safety
/// `config` must be a live handle and `out_dir` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn fi_consistency_run(config: *const FiRunConfig, out_dir: *const c_char) -> FiStatus {
    guard(|| {
        let config = &handle(config, "config")?.0;
        cmd_consistency(Some(config), None, Path::new(text(out_dir, "out_dir")?))?;
        Ok(())
    })
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn fi_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version string"),
    };
    VERSION.as_ptr()
}
