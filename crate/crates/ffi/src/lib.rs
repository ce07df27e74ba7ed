//! C ABI over the `chemdyn` library.
//!
//! Objects are exposed as opaque handles created by `chemdyn_*_new`-style
//! constructors and released with the matching `chemdyn_*_free`. Every
//! fallible call returns a [`ChemdynStatus`]; on failure a description is
//! available from [`chemdyn_last_error`] on the same thread. Array outputs use
//! caller-provided buffers: pass the buffer and its capacity, and the call
//! fails with `CHEMDYN_STATUS_BUFFER_TOO_SMALL` when the capacity is short.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use chemdyn::config::Config;
use chemdyn::dvr::{kinetic_element, DvrGrid};
use chemdyn::exact::{propagate_exact, ExactPropagator, ExactRun};
use chemdyn::models::{ModelKind, ModelSystem};
use chemdyn::pauli::{encode_operator, PauliSum};
use chemdyn::resources::{estimate_circuits, Method};
use chemdyn::spectral::{dense_eigensolve, EigenSet};
use chemdyn::spectrum::{hhg_spectrum, SpectrumOptions, SpectrumResult};
use chemdyn::subspace::{
    basis_coeffs, observables, project_hamiltonian, propagate_subspace, SubspaceIntegrator, SubspaceRun,
};
use chemdyn::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChemdynStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    BufferTooSmall = 4,
    NotConverged = 5,
    Numerical = 6,
    Parse = 7,
    Io = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChemdynModelKind {
    DoubleWell = 0,
    Helium = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChemdynMethod {
    RealTimeVqa = 0,
    ImagTimeVqaSubspace = 1,
    GradientDescentSubspace = 2,
}

/// Circuit counts, mirroring the library's resource estimate.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ChemdynResourceEstimate {
    pub metric: u64,
    pub f_kinetic: u64,
    pub f_potential: u64,
    pub energy_per_evaluation: u64,
    pub gradient_energy_evaluations: u64,
    pub total: u64,
}

/// Opaque grid handle.
pub struct ChemdynGrid(DvrGrid);
/// Opaque handle to a model: grid, Hamiltonian, dipole and pulse.
pub struct ChemdynModel(ModelSystem);
/// Opaque Pauli-sum handle.
pub struct ChemdynPauliSum(PauliSum);
/// Opaque handle to a set of eigenpairs.
pub struct ChemdynEigenSet(EigenSet);
/// Opaque handle to a sampled trajectory: times (fs), dipole and populations.
pub struct ChemdynTrajectory {
    times_fs: Vec<f64>,
    dipole: Vec<f64>,
    /// Row-major, one row per time.
    populations: Vec<f64>,
    states: usize,
}
/// Opaque spectrum handle.
pub struct ChemdynSpectrum(SpectrumResult);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> ChemdynStatus {
    match e {
        Error::DimensionMismatch(_) | Error::QubitMismatch { .. } | Error::DenseCapExceeded { .. } => {
            ChemdynStatus::DimensionMismatch
        }
        Error::NotConverged { .. } => ChemdynStatus::NotConverged,
        Error::SolveFailed(_)
        | Error::StepTooLarge { .. }
        | Error::UnitarityViolated { .. }
        | Error::NonFinitePotential { .. } => ChemdynStatus::Numerical,
        Error::Parse(_) | Error::Config { .. } => ChemdynStatus::Parse,
        Error::Io(_) => ChemdynStatus::Io,
        _ => ChemdynStatus::InvalidArgument,
    }
}

fn fail(status: ChemdynStatus, msg: impl Into<String>) -> ChemdynStatus {
    set_error(msg.into());
    status
}

/// Runs `f`, translating library errors and panics into status codes.
fn guard<F>(f: F) -> ChemdynStatus
where
    F: FnOnce() -> Result<(), ChemdynStatus>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ChemdynStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(ChemdynStatus::Panic, "internal panic"),
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, ChemdynStatus>;
}

impl<T> OrStatus<T> for chemdyn::Result<T> {
    fn or_status(self) -> Result<T, ChemdynStatus> {
        self.map_err(|e| fail(status_of(&e), e.to_string()))
    }
}

unsafe fn borrow<'a, T>(p: *const T) -> Result<&'a T, ChemdynStatus> {
    p.as_ref()
        .ok_or_else(|| fail(ChemdynStatus::NullPointer, "null handle"))
}

unsafe fn emit<T>(out: *mut *mut T, value: T) -> Result<(), ChemdynStatus> {
    if out.is_null() {
        return Err(fail(ChemdynStatus::NullPointer, "null output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn copy_out(src: &[f64], dst: *mut f64, capacity: usize) -> Result<(), ChemdynStatus> {
    if dst.is_null() {
        return Err(fail(ChemdynStatus::NullPointer, "null output buffer"));
    }
    if capacity < src.len() {
        return Err(fail(
            ChemdynStatus::BufferTooSmall,
            format!("buffer holds {capacity} values, {} needed", src.len()),
        ));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), dst, src.len());
    Ok(())
}

unsafe fn free<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Message of the last failed call on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn chemdyn_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn chemdyn_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Kinetic matrix element for grid offset `offset`.
///
/// # Safety
/// `out` must be a valid pointer to a `double`.
#[no_mangle]
pub unsafe extern "C" fn chemdyn_kinetic_element(mass: f64, spacing: f64, offset: i64, out: *mut f64) -> ChemdynStatus {
    guard(|| {
        if !(mass > 0.0 && spacing > 0.0) {
            return Err(fail(
                ChemdynStatus::InvalidArgument,
                "mass and spacing must be positive",
            ));
        }
        copy_out(&[kinetic_element(mass, spacing, offset)], out, 1)
    })
}

/// Uniform grid with `dims` axes of `points` points on `[xmin, xmax]` (bohr).
///
/// # Safety
/// `out` must be a valid pointer; the handle is released with [`chemdyn_grid_free`].
#[no_mangle]
pub unsafe extern "C" fn chemdyn_grid_new(
    dims: usize,
    points: usize,
    xmin: f64,
    xmax: f64,
    mass: f64,
    out: *mut *mut ChemdynGrid,
) -> ChemdynStatus {
    guard(|| {
        let grid = DvrGrid::uniform(dims, points, xmin, xmax, mass).or_status()?;
        emit(out, ChemdynGrid(grid))
    })
}

/// Number of grid points `L^d`, or 0 for a null handle.
///
/// # Safety
/// `grid` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn chemdyn_grid_size(grid: *const ChemdynGrid) -> usize {
    grid.as_ref().map_or(0, |g| g.0.size())
}

/// Coordinate of point `index` along axis `dim` (bohr).
///
/// # Safety
/// `grid` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn chemdyn_grid_coordinate(
    grid: *const ChemdynGrid,
    dim: usize,
    index: usize,
    out: *mut f64,
) -> ChemdynStatus {
    guard(|| {
        let g = &borrow(grid)?.0;
        if dim >= g.dims() || index >= g.points_per_dim() {
            return Err(fail(ChemdynStatus::InvalidArgument, "axis or point index out of range"));
        }
        copy_out(&[g.coordinate(dim, index)], out, 1)
    })
}

/// # Safety
/// `grid` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn chemdyn_grid_free(grid: *mut ChemdynGrid) {
    free(grid)
}

/// Model with its built-in default parameters.
///
/// # Safety
/// `out` must be a valid pointer; release with [`chemdyn_model_free`].
#[no_mangle]
pub unsafe extern "C" fn chemdyn_model_new(kind: ChemdynModelKind, out: *mut *mut ChemdynModel) -> ChemdynStatus {
    guard(|| {
        let kind = match kind {
            ChemdynModelKind::DoubleWell => ModelKind::DoubleWell,
            ChemdynModelKind::Helium => ModelKind::Helium,
        };
        let system = Config::default_for(kind).system().or_status()?;
        emit(out, ChemdynModel(system))
    })
}

/// Model described by a TOML configuration string.
///
/// # Safety
/// `toml` must be a NUL-terminated UTF-8 string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn chemdyn_model_from_toml(toml: *const c_char, out: *mut *mut ChemdynModel) -> ChemdynStatus {
    guard(|| {
        if toml.is_null() {
            return Err(fail(ChemdynStatus::NullPointer, "null configuration string"));
        }
        let text = CStr::from_ptr(toml)
            .to_str()
            .map_err(|_| fail(ChemdynStatus::Parse, "configuration is not valid UTF-8"))?;
        let cfg = Config::from_toml(text, "<ffi>").or_status()?;
        emit(out, ChemdynModel(cfg.system().or_status()?))
    })
}

/// Hilbert-space dimension of the model's grid, or 0 for a null handle.
///
/// # Safety
/// `model` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn chemdyn_model_dim(model: *const ChemdynModel) -> usize {
    model.as_ref().map_or(0, |m| m.0.grid.size())
}

/// Writes the field-free Hamiltonian row-major into `out` (capacity `dim²`).
///
/// # Safety
/// `model` must be a live handle and `out` must hold `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn chemdyn_model_hamiltonian(
    model: *const ChemdynModel,
    out: *mut f64,
    capacity: usize,
) -> ChemdynStatus {
    guard(|| {
        let dense = borrow(model)?.0.h0.to_dense().or_status()?;
        // nalgebra is column-major; the matrix is symmetric so both layouts agree
        copy_out(dense.as_slice(), out, capacity)
    })
}

/// Field value (a.u.) of the model's pulse at time `t_fs`.
///
/// # Safety
/// `model` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn chemdyn_model_field(model: *const ChemdynModel, t_fs: f64, out: *mut f64) -> ChemdynStatus {
    guard(|| {
        let m = borrow(model)?;
        copy_out(&[m.0.pulse.value(chemdyn::units::fs_to_au(t_fs))], out, 1)
    })
}

/// # Safety
/// `model` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn chemdyn_model_free(model: *mut ChemdynModel) {
    free(model)
}

/// Qubit encoding of the model's field-free Hamiltonian.
///
/// # Safety
/// `model` must be a live handle and `out` a valid pointer; release with [`chemdyn_pauli_free`].
#[no_mangle]
pub unsafe extern "C" fn chemdyn_model_encode(
    model: *const ChemdynModel,
    out: *mut *mut ChemdynPauliSum,
) -> ChemdynStatus {
    guard(|| {
        let sum = encode_operator(&borrow(model)?.0.h0).or_status()?;
        emit(out, ChemdynPauliSum(sum))
    })
}

/// Parses the text form `coefficient LETTERS` per line.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn chemdyn_pauli_parse(text: *const c_char, out: *mut *mut ChemdynPauliSum) -> ChemdynStatus {
    guard(|| {
        if text.is_null() {
            return Err(fail(ChemdynStatus::NullPointer, "null text"));
        }
        let s = CStr::from_ptr(text)
            .to_str()
            .map_err(|_| fail(ChemdynStatus::Parse, "text is not valid UTF-8"))?;
        emit(out, ChemdynPauliSum(PauliSum::from_text(s).or_status()?))
    })
}

/// Number of terms, or 0 for a null handle.
///
/// # Safety
/// `sum` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn chemdyn_pauli_len(sum: *const ChemdynPauliSum) -> usize {
    sum.as_ref().map_or(0, |s| s.0.len())
}

/// # Safety
/// `sum` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn chemdyn_pauli_num_qubits(sum: *const ChemdynPauliSum) -> usize {
    sum.as_ref().map_or(0, |s| s.0.num_qubits())
}

/// Writes the text form, NUL-terminated, into `buf`. `required` receives the
/// buffer size needed including the terminator, also when the buffer is too small.
///
/// # Safety
/// `sum` must be a live handle, `buf` must hold `capacity` bytes (or be NULL
/// with `capacity` 0) and `required` must be NULL or valid.
#[no_mangle]
pub unsafe extern "C" fn chemdyn_pauli_to_text(
    sum: *const ChemdynPauliSum,
    buf: *mut c_char,
    capacity: usize,
    required: *mut usize,
) -> ChemdynStatus {
    guard(|| {
        let text = borrow(sum)?.0.to_text();
        let need = text.len() + 1;
        if !required.is_null() {
            *required = need;
        }
        if capacity < need || buf.is_null() {
            return Err(fail(ChemdynStatus::BufferTooSmall, format!("{need} bytes needed")));
        }
        ptr::copy_nonoverlapping(text.as_ptr().cast::<c_char>(), buf, text.len());
        *buf.add(text.len()) = 0;
        Ok(())
    })
}

/// # Safety
/// `sum` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn chemdyn_pauli_free(sum: *mut ChemdynPauliSum) {
    free(sum)
}

/// Lowest `count` eigenpairs of the model's field-free Hamiltonian.
///
/// # Safety
/// `model` must be a live handle and `out` a valid pointer; release with [`chemdyn_eigenset_free`].
#[no_mangle]
pub unsafe extern "C" fn chemdyn_eigensolve(
    model: *const ChemdynModel,
    count: usize,
    out: *mut *mut ChemdynEigenSet,
) -> ChemdynStatus {
    guard(|| {
        let set = dense_eigensolve(&borrow(model)?.0.h0, count).or_status()?;
        emit(out, ChemdynEigenSet(set))
    })
}

/// # Safety
/// `set` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn chemdyn_eigenset_len(set: *const ChemdynEigenSet) -> usize {
    set.as_ref().map_or(0, |s| s.0.len())
}

/// Energies (hartree), ascending.
///
/// # Safety
/// `set` must be a live handle and `out` must hold `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn chemdyn_eigenset_energies(
    set: *const ChemdynEigenSet,
    out: *mut f64,
    capacity: usize,
) -> ChemdynStatus {
    guard(|| copy_out(&borrow(set)?.0.energies, out, capacity))
}

/// # Safety
/// `set` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn chemdyn_eigenset_free(set: *mut ChemdynEigenSet) {
    free(set)
}

/// Full-grid propagation from the ground state over the model's pulse,
/// sampled every `step_fs`, with populations of the lowest `states` eigenstates.
///
/// # Safety
/// `model` must be a live handle and `out` a valid pointer; release with [`chemdyn_trajectory_free`].
#[no_mangle]
pub unsafe extern "C" fn chemdyn_propagate_exact(
    model: *const ChemdynModel,
    step_fs: f64,
    states: usize,
    out: *mut *mut ChemdynTrajectory,
) -> ChemdynStatus {
    guard(|| {
        let m = &borrow(model)?.0;
        let eigen = dense_eigensolve(&m.h0, states).or_status()?;
        let duration = chemdyn::units::au_to_fs(m.pulse.duration());
        let run = ExactRun::covering(duration, step_fs).or_status()?;
        let prop = ExactPropagator::new(&m.h0, &m.dipole, m.pulse).or_status()?;
        let traj = propagate_exact(&prop, &run, &eigen.states[0]).or_status()?;
        let pops = chemdyn::exact::project_populations(&traj, &eigen.states).or_status()?;
        emit(
            out,
            ChemdynTrajectory {
                dipole: traj.expectation(&m.dipole.operator, m.dipole.observable_sign),
                times_fs: traj.times_fs,
                populations: pops.into_iter().flatten().collect(),
                states,
            },
        )
    })
}

/// Propagation in the span of `eigen`, starting in its lowest state.
///
/// # Safety
/// `model` and `eigen` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn chemdyn_propagate_subspace(
    model: *const ChemdynModel,
    eigen: *const ChemdynEigenSet,
    step_fs: f64,
    out: *mut *mut ChemdynTrajectory,
) -> ChemdynStatus {
    guard(|| {
        let m = &borrow(model)?.0;
        let set = &borrow(eigen)?.0;
        let sub = project_hamiltonian(set, &m.dipole).or_status()?;
        let duration = chemdyn::units::au_to_fs(m.pulse.duration());
        let run = SubspaceRun::covering(duration, step_fs, SubspaceIntegrator::Exponential).or_status()?;
        let traj = propagate_subspace(&sub, &m.pulse, &basis_coeffs(sub.dim(), 0), &run).or_status()?;
        let obs = observables(&sub, &traj);
        emit(
            out,
            ChemdynTrajectory {
                times_fs: obs.times_fs,
                dipole: obs.dipole,
                populations: obs.populations.into_iter().flatten().collect(),
                states: sub.dim(),
            },
        )
    })
}

/// Number of samples, or 0 for a null handle.
///
/// # Safety
/// `traj` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn chemdyn_trajectory_len(traj: *const ChemdynTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.times_fs.len())
}

/// Number of population columns, or 0 for a null handle.
///
/// # Safety
/// `traj` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn chemdyn_trajectory_states(traj: *const ChemdynTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.states)
}

/// # Safety
/// `traj` must be a live handle and `out` must hold `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn chemdyn_trajectory_times(
    traj: *const ChemdynTrajectory,
    out: *mut f64,
    capacity: usize,
) -> ChemdynStatus {
    guard(|| copy_out(&borrow(traj)?.times_fs, out, capacity))
}

/// # Safety
/// `traj` must be a live handle and `out` must hold `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn chemdyn_trajectory_dipole(
    traj: *const ChemdynTrajectory,
    out: *mut f64,
    capacity: usize,
) -> ChemdynStatus {
    guard(|| copy_out(&borrow(traj)?.dipole, out, capacity))
}

/// Populations row-major (`len × states`).
///
/// # Safety
/// `traj` must be a live handle and `out` must hold `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn chemdyn_trajectory_populations(
    traj: *const ChemdynTrajectory,
    out: *mut f64,
    capacity: usize,
) -> ChemdynStatus {
    guard(|| copy_out(&borrow(traj)?.populations, out, capacity))
}

/// # Safety
/// `traj` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn chemdyn_trajectory_free(traj: *mut ChemdynTrajectory) {
    free(traj)
}

/// Harmonic spectrum of a dipole trace sampled at uniform `times_au`.
///
/// # Safety
/// `times_au` and `dipole` must each hold `len` doubles and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn chemdyn_spectrum_new(
    times_au: *const f64,
    dipole: *const f64,
    len: usize,
    carrier_omega: f64,
    zero_pad: usize,
    out: *mut *mut ChemdynSpectrum,
) -> ChemdynStatus {
    guard(|| {
        if times_au.is_null() || dipole.is_null() {
            return Err(fail(ChemdynStatus::NullPointer, "null input array"));
        }
        let t = std::slice::from_raw_parts(times_au, len);
        let d = std::slice::from_raw_parts(dipole, len);
        let opts = SpectrumOptions {
            zero_pad: zero_pad.max(1),
            ..Default::default()
        };
        emit(
            out,
            ChemdynSpectrum(hhg_spectrum(t, d, carrier_omega, &opts).or_status()?),
        )
    })
}

/// # Safety
/// `spec` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn chemdyn_spectrum_len(spec: *const ChemdynSpectrum) -> usize {
    spec.as_ref().map_or(0, |s| s.0.intensity.len())
}

/// # Safety
/// `spec` must be a live handle and `out` must hold `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn chemdyn_spectrum_orders(
    spec: *const ChemdynSpectrum,
    out: *mut f64,
    capacity: usize,
) -> ChemdynStatus {
    guard(|| copy_out(&borrow(spec)?.0.harmonic_order, out, capacity))
}

/// # Safety
/// `spec` must be a live handle and `out` must hold `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn chemdyn_spectrum_intensity(
    spec: *const ChemdynSpectrum,
    out: *mut f64,
    capacity: usize,
) -> ChemdynStatus {
    guard(|| copy_out(&borrow(spec)?.0.intensity, out, capacity))
}

/// # Safety
/// `spec` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn chemdyn_spectrum_free(spec: *mut ChemdynSpectrum) {
    free(spec)
}

/// Circuit counts for `n_theta` parameters on a `d`-dimensional grid of `points` per axis.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn chemdyn_estimate_circuits(
    n_theta: u64,
    dims: u64,
    points: u64,
    method: ChemdynMethod,
    out: *mut ChemdynResourceEstimate,
) -> ChemdynStatus {
    guard(|| {
        if out.is_null() {
            return Err(fail(ChemdynStatus::NullPointer, "null output pointer"));
        }
        let method = match method {
            ChemdynMethod::RealTimeVqa => Method::RealTimeVqa,
            ChemdynMethod::ImagTimeVqaSubspace => Method::ImagTimeVqaSubspace,
            ChemdynMethod::GradientDescentSubspace => Method::GradientDescentSubspace,
        };
        let e = estimate_circuits(n_theta, dims, points, method).or_status()?;
        *out = ChemdynResourceEstimate {
            metric: e.metric,
            f_kinetic: e.f_kinetic,
            f_potential: e.f_potential,
            energy_per_evaluation: e.energy_per_evaluation,
            gradient_energy_evaluations: e.gradient_energy_evaluations,
            total: e.total,
        };
        Ok(())
    })
}
