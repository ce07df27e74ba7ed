//! Full-grid reference propagation with a piecewise-constant field and an
//! exact matrix exponential per step.

use std::cell::RefCell;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::dvr::{sorted_eigh, GridOperator, DENSE_CAP};
use crate::error::{Error, Result};
use crate::models::{DipoleOperator, Pulse};
use crate::sim::inner;
use crate::units::fs_to_au;

/// Allowed change of `‖ψ‖²` in a single step.
pub const STEP_UNITARITY_TOL: f64 = 1e-12;

/// Default upper bound on the internal step (fs).
pub const DEFAULT_MAX_SUBSTEP_FS: f64 = 0.015;

struct Decomposition {
    field: f64,
    values: Vec<f64>,
    vectors: DMatrix<f64>,
}

/// `H(t) = H0 + ε(t) C` in dense form, where `C` is the signed coupling.
pub struct ExactPropagator {
    h0: DMatrix<f64>,
    coupling: DMatrix<f64>,
    pulse: Pulse,
    cache: RefCell<Option<Decomposition>>,
}

impl ExactPropagator {
    pub fn new(h0: &GridOperator, dipole: &DipoleOperator, pulse: Pulse) -> Result<Self> {
        Self::from_dense(h0.to_dense()?, dipole.coupling().to_dense()?, pulse)
    }

    pub fn from_dense(h0: DMatrix<f64>, coupling: DMatrix<f64>, pulse: Pulse) -> Result<Self> {
        let n = h0.nrows();
        if n > DENSE_CAP {
            return Err(Error::DenseCapExceeded { dim: n, cap: DENSE_CAP });
        }
        if h0.ncols() != n || coupling.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!(
                "H0 is {:?}, coupling is {:?}",
                h0.shape(),
                coupling.shape()
            )));
        }
        for m in [&h0, &coupling] {
            let asym = (m - m.transpose()).amax();
            if asym > 1e-12 {
                return Err(Error::NotHermitian(asym));
            }
        }
        Ok(Self {
            h0,
            coupling,
            pulse,
            cache: RefCell::new(None),
        })
    }

    pub fn dim(&self) -> usize {
        self.h0.nrows()
    }

    pub fn pulse(&self) -> &Pulse {
        &self.pulse
    }

    /// Advances `psi` from `t` to `t + dt` (a.u.; `dt` may be negative) with
    /// the field frozen at the midpoint.
    pub fn step(&self, psi: &mut [Complex64], t: f64, dt: f64) -> Result<()> {
        let field = self.pulse.value(t + dt / 2.0);
        let mut cache = self.cache.borrow_mut();
        if cache.as_ref().map(|d| d.field) != Some(field) {
            let h = &self.h0 + &self.coupling * field;
            let (values, vectors) = sorted_eigh(&h);
            *cache = Some(Decomposition { field, values, vectors });
        }
        let d = cache.as_ref().expect("decomposition cached above");
        let n = psi.len();
        let before: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
        // ψ ← V e^{-iEdt} Vᵀ ψ
        let mut proj = vec![Complex64::new(0.0, 0.0); n];
        for (k, p) in proj.iter_mut().enumerate() {
            let col = d.vectors.column(k);
            let mut acc = Complex64::new(0.0, 0.0);
            for (v, a) in col.iter().zip(psi.iter()) {
                acc += a * *v;
            }
            *p = acc * Complex64::from_polar(1.0, -d.values[k] * dt);
        }
        for (i, out) in psi.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, p) in proj.iter().enumerate() {
                acc += p * d.vectors[(i, k)];
            }
            *out = acc;
        }
        let after: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
        if (after - before).abs() > STEP_UNITARITY_TOL * before.max(1.0) {
            return Err(Error::UnitarityViolated {
                time: t,
                deviation: (after - before).abs(),
            });
        }
        Ok(())
    }
}

/// Output step, number of output steps and internal subdivision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactRun {
    pub step_fs: f64,
    pub steps: usize,
    pub substeps: usize,
    pub t0_fs: f64,
}

impl ExactRun {
    /// Output every `step_fs` up to `duration_fs`, subdividing so no internal
    /// step exceeds [`DEFAULT_MAX_SUBSTEP_FS`].
    pub fn covering(duration_fs: f64, step_fs: f64) -> Result<Self> {
        if !(step_fs > 0.0 && step_fs.is_finite()) || !(duration_fs >= 0.0) {
            return Err(Error::InvalidIntegrator(format!(
                "need positive step and non-negative duration, got step {step_fs}, duration {duration_fs}"
            )));
        }
        Ok(Self {
            step_fs,
            steps: (duration_fs / step_fs - 1e-9).ceil().max(0.0) as usize,
            substeps: (step_fs / DEFAULT_MAX_SUBSTEP_FS).ceil().max(1.0) as usize,
            t0_fs: 0.0,
        })
    }

    pub fn with_substeps(mut self, substeps: usize) -> Self {
        self.substeps = substeps.max(1);
        self
    }

    pub fn times_fs(&self) -> Vec<f64> {
        (0..=self.steps).map(|k| self.t0_fs + k as f64 * self.step_fs).collect()
    }
}

/// States at each output time.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times_fs: Vec<f64>,
    pub states: Vec<Vec<Complex64>>,
}

impl Trajectory {
    pub fn max_norm_drift(&self) -> f64 {
        let n0: f64 = self.states[0].iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        self.states
            .iter()
            .map(|s| (s.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt() - n0).abs())
            .fold(0.0, f64::max)
    }

    /// `sign · <ψ(t)|A|ψ(t)>` for a diagonal or dense grid operator `A`.
    pub fn expectation(&self, op: &GridOperator, sign: f64) -> Vec<f64> {
        self.states.iter().map(|s| sign * inner(s, &op.apply(s)).re).collect()
    }
}

pub fn propagate_exact(prop: &ExactPropagator, run: &ExactRun, initial: &[Complex64]) -> Result<Trajectory> {
    if initial.len() != prop.dim() {
        return Err(Error::DimensionMismatch(format!(
            "initial state has {} amplitudes, propagator acts on {}",
            initial.len(),
            prop.dim()
        )));
    }
    let substeps = run.substeps.max(1);
    let dt = fs_to_au(run.step_fs) / substeps as f64;
    let t0 = fs_to_au(run.t0_fs);
    let mut psi = initial.to_vec();
    let mut states = Vec::with_capacity(run.steps + 1);
    states.push(psi.clone());
    for k in 0..run.steps {
        for s in 0..substeps {
            let t = t0 + (k * substeps + s) as f64 * dt;
            prop.step(&mut psi, t, dt)?;
        }
        states.push(psi.clone());
    }
    Ok(Trajectory {
        times_fs: run.times_fs(),
        states,
    })
}

/// `P_i(t) = |<ψ_i|Ψ(t)>|²`, one row per output time.
pub fn project_populations(traj: &Trajectory, eigenstates: &[Vec<Complex64>]) -> Result<Vec<Vec<f64>>> {
    for e in eigenstates {
        if e.len() != traj.states[0].len() {
            return Err(Error::DimensionMismatch(format!(
                "eigenstate has {} amplitudes, trajectory states have {}",
                e.len(),
                traj.states[0].len()
            )));
        }
    }
    Ok(traj
        .states
        .iter()
        .map(|s| eigenstates.iter().map(|e| inner(e, s).norm_sqr()).collect())
        .collect())
}
