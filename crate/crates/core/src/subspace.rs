//! Dynamics restricted to a handful of field-free eigenstates.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{DipoleOperator, Pulse};
use crate::sim::inner;
use crate::spectral::EigenSet;
use crate::units::fs_to_au;

/// Total allowed drift of `‖c‖` over a propagation.
pub const NORM_DRIFT_BOUND: f64 = 1e-9;

/// Kick strengths used to extrapolate the phase-kick matrix elements.
pub const DEFAULT_KICKS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

/// Rotates the global phase so the largest-magnitude amplitude (first one on
/// ties) is real and positive.
pub fn fix_phase(state: &mut [Complex64]) {
    let mut best = 0;
    for (k, a) in state.iter().enumerate() {
        if a.norm() > state[best].norm() * (1.0 + 1e-12) {
            best = k;
        }
    }
    let a = state[best];
    if a.norm() == 0.0 {
        return;
    }
    let phase = a.conj() / a.norm();
    for s in state.iter_mut() {
        *s *= phase;
    }
}

/// `H̃(t) = diag(E) + s ε(t) D` with `D_ij = <ψ_i|μ|ψ_j>`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceModel {
    pub energies: Vec<f64>,
    pub dipole: DMatrix<Complex64>,
    pub coupling_sign: f64,
    pub observable_sign: f64,
}

impl SubspaceModel {
    pub fn new(
        energies: Vec<f64>,
        dipole: DMatrix<Complex64>,
        coupling_sign: f64,
        observable_sign: f64,
    ) -> Result<Self> {
        let n = energies.len();
        if dipole.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!(
                "{n} energies but dipole block is {:?}",
                dipole.shape()
            )));
        }
        let dev = (&dipole - dipole.adjoint())
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        if dev > 1e-10 {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self {
            energies,
            dipole,
            coupling_sign,
            observable_sign,
        })
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn hamiltonian(&self, field: f64) -> DMatrix<Complex64> {
        let mut h = &self.dipole * Complex64::new(self.coupling_sign * field, 0.0);
        for (k, e) in self.energies.iter().enumerate() {
            h[(k, k)] += e;
        }
        h
    }

    /// `observable_sign · c† D c`.
    pub fn dipole_value(&self, c: &[Complex64]) -> f64 {
        let v = DVector::from_column_slice(c);
        self.observable_sign * (v.adjoint() * &self.dipole * &v)[(0, 0)].re
    }

    /// `c† H̃(t) c` at field `ε`.
    pub fn energy(&self, c: &[Complex64], field: f64) -> f64 {
        let v = DVector::from_column_slice(c);
        (v.adjoint() * self.hamiltonian(field) * &v)[(0, 0)].re
    }
}

fn phase_fixed(eigen: &EigenSet) -> Vec<Vec<Complex64>> {
    eigen
        .states
        .iter()
        .map(|s| {
            let mut s = s.clone();
            fix_phase(&mut s);
            s
        })
        .collect()
}

fn check_dims(eigen: &EigenSet, dipole: &DipoleOperator) -> Result<()> {
    if eigen.is_empty() {
        return Err(Error::InvalidArgument("empty eigenbasis".into()));
    }
    if eigen.dim() != dipole.operator.size() {
        return Err(Error::DimensionMismatch(format!(
            "eigenstates have {} amplitudes, dipole acts on {}",
            eigen.dim(),
            dipole.operator.size()
        )));
    }
    Ok(())
}

/// Subspace model with energies on the diagonal and the dipole block from
/// direct sandwiches of the phase-fixed eigenstates.
pub fn project_hamiltonian(eigen: &EigenSet, dipole: &DipoleOperator) -> Result<SubspaceModel> {
    check_dims(eigen, dipole)?;
    let states = phase_fixed(eigen);
    let n = states.len();
    let applied: Vec<Vec<Complex64>> = states.iter().map(|s| dipole.operator.apply(s)).collect();
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            d[(i, j)] = inner(&states[i], &applied[j]);
        }
    }
    // symmetrize away rounding
    let d = (&d + d.adjoint()) * Complex64::new(0.5, 0.0);
    SubspaceModel::new(eigen.energies.clone(), d, dipole.coupling_sign, dipole.observable_sign)
}

/// `(i/2ε) <bra| e^{-iεx} − e^{iεx} |ket>` for a diagonal `x`.
pub fn phase_kick_element(bra: &[Complex64], ket: &[Complex64], diagonal: &[f64], eps: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for ((b, k), x) in bra.iter().zip(ket).zip(diagonal) {
        let kick = Complex64::from_polar(1.0, -eps * x) - Complex64::from_polar(1.0, eps * x);
        acc += b.conj() * kick * k;
    }
    acc * Complex64::new(0.0, 1.0 / (2.0 * eps))
}

/// Value at `h = 0` of the polynomial through `(h_k, y_k)` (Neville).
pub fn extrapolate_to_zero(h: &[f64], y: &[Complex64]) -> Complex64 {
    let mut p = y.to_vec();
    let n = h.len();
    for level in 1..n {
        for i in 0..n - level {
            let (hi, hj) = (h[i], h[i + level]);
            p[i] = (p[i + 1] * hi - p[i] * hj) / (hi - hj);
        }
    }
    p[0]
}

/// Dipole block from phase-kick differences extrapolated in `ε²`.
pub fn phase_kick_dipole(eigen: &EigenSet, dipole: &DipoleOperator, kicks: &[f64]) -> Result<DMatrix<Complex64>> {
    check_dims(eigen, dipole)?;
    if !dipole.operator.is_diagonal() {
        return Err(Error::InvalidArgument("phase kicks need a diagonal dipole".into()));
    }
    if kicks.is_empty() || kicks.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::InvalidArgument("kick strengths must be positive".into()));
    }
    let diag = dipole.operator.diagonal_values();
    let states = phase_fixed(eigen);
    let n = states.len();
    let h: Vec<f64> = kicks.iter().map(|e| e * e).collect();
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let ys: Vec<Complex64> = kicks
                .iter()
                .map(|&e| phase_kick_element(&states[i], &states[j], &diag, e))
                .collect();
            d[(i, j)] = extrapolate_to_zero(&h, &ys);
        }
    }
    Ok(d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubspaceIntegrator {
    /// Exact exponential of the midpoint Hamiltonian on every substep.
    Exponential,
    /// Classical fourth-order Runge-Kutta with the field at stage times.
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubspaceRun {
    pub step_fs: f64,
    pub steps: usize,
    pub substeps: usize,
    pub integrator: SubspaceIntegrator,
}

impl SubspaceRun {
    pub fn covering(duration_fs: f64, step_fs: f64, integrator: SubspaceIntegrator) -> Result<Self> {
        let base = crate::exact::ExactRun::covering(duration_fs, step_fs)?;
        Ok(Self {
            step_fs,
            steps: base.steps,
            substeps: base.substeps,
            integrator,
        })
    }

    pub fn with_substeps(mut self, substeps: usize) -> Self {
        self.substeps = substeps.max(1);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceTrajectory {
    pub times_fs: Vec<f64>,
    pub coeffs: Vec<Vec<Complex64>>,
}

fn mat_vec(h: &DMatrix<Complex64>, c: &[Complex64]) -> Vec<Complex64> {
    (h * DVector::from_column_slice(c)).as_slice().to_vec()
}

fn exp_step(h: &DMatrix<Complex64>, c: &mut [Complex64], dt: f64) {
    let eig = h.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let proj = v.adjoint() * DVector::from_column_slice(c);
    let phased = DVector::from_iterator(
        proj.len(),
        proj.iter()
            .zip(eig.eigenvalues.iter())
            .map(|(p, e)| p * Complex64::from_polar(1.0, -e * dt)),
    );
    c.copy_from_slice((v * phased).as_slice());
}

fn rk4_step(model: &SubspaceModel, pulse: &Pulse, c: &mut [Complex64], t: f64, dt: f64) {
    let minus_i = Complex64::new(0.0, -1.0);
    let deriv = |t: f64, c: &[Complex64]| -> Vec<Complex64> {
        mat_vec(&model.hamiltonian(pulse.value(t)), c)
            .into_iter()
            .map(|x| x * minus_i)
            .collect()
    };
    let shifted = |c: &[Complex64], k: &[Complex64], a: f64| -> Vec<Complex64> {
        c.iter().zip(k).map(|(c, k)| c + k * a).collect()
    };
    let k1 = deriv(t, c);
    let k2 = deriv(t + dt / 2.0, &shifted(c, &k1, dt / 2.0));
    let k3 = deriv(t + dt / 2.0, &shifted(c, &k2, dt / 2.0));
    let k4 = deriv(t + dt, &shifted(c, &k3, dt));
    for i in 0..c.len() {
        c[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0);
    }
}

/// Integrates `i ċ = H̃(t) c`. Fails with [`Error::StepTooLarge`] as soon as
/// `‖c‖` drifts by more than [`NORM_DRIFT_BOUND`].
pub fn propagate_subspace(
    model: &SubspaceModel,
    pulse: &Pulse,
    initial: &[Complex64],
    run: &SubspaceRun,
) -> Result<SubspaceTrajectory> {
    if initial.len() != model.dim() {
        return Err(Error::DimensionMismatch(format!(
            "initial coefficients have length {}, model has {} states",
            initial.len(),
            model.dim()
        )));
    }
    let n0 = initial.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if (n0 - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidArgument(format!(
            "initial coefficients have norm {n0}, need 1"
        )));
    }
    let substeps = run.substeps.max(1);
    let dt = fs_to_au(run.step_fs) / substeps as f64;
    let mut c = initial.to_vec();
    let mut coeffs = Vec::with_capacity(run.steps + 1);
    coeffs.push(c.clone());
    for k in 0..run.steps {
        for s in 0..substeps {
            let t = (k * substeps + s) as f64 * dt;
            match run.integrator {
                SubspaceIntegrator::Exponential => exp_step(&model.hamiltonian(pulse.value(t + dt / 2.0)), &mut c, dt),
                SubspaceIntegrator::Rk4 => rk4_step(model, pulse, &mut c, t, dt),
            }
        }
        let drift = (c.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt() - n0).abs();
        if !(drift <= NORM_DRIFT_BOUND) {
            return Err(Error::StepTooLarge {
                drift,
                bound: NORM_DRIFT_BOUND,
            });
        }
        coeffs.push(c.clone());
    }
    Ok(SubspaceTrajectory {
        times_fs: (0..=run.steps).map(|k| k as f64 * run.step_fs).collect(),
        coeffs,
    })
}

/// Populations `|c_i(t)|²` and dipole `d(t)` at every output time.
#[derive(Debug, Clone, PartialEq)]
pub struct Observables {
    pub times_fs: Vec<f64>,
    pub populations: Vec<Vec<f64>>,
    pub dipole: Vec<f64>,
}

pub fn observables(model: &SubspaceModel, traj: &SubspaceTrajectory) -> Observables {
    Observables {
        times_fs: traj.times_fs.clone(),
        populations: traj
            .coeffs
            .iter()
            .map(|c| c.iter().map(|a| a.norm_sqr()).collect())
            .collect(),
        dipole: traj.coeffs.iter().map(|c| model.dipole_value(c)).collect(),
    }
}

/// `e_k` as a coefficient vector.
pub fn basis_coeffs(dim: usize, k: usize) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(0.0, 0.0); dim];
    c[k] = Complex64::new(1.0, 0.0);
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{dipole_operator, DoubleWellParams, ModelKind};
    use crate::spectral::dense_eigensolve;
    use approx::assert_abs_diff_eq;

    fn double_well(count: usize) -> (EigenSet, DipoleOperator) {
        let p = DoubleWellParams::default();
        let grid = p.grid().unwrap();
        let h = p.hamiltonian(&grid).unwrap();
        (
            dense_eigensolve(&h, count).unwrap(),
            dipole_operator(ModelKind::DoubleWell, &grid).unwrap(),
        )
    }

    #[test]
    fn phase_fixing() {
        let mut s = vec![
            Complex64::new(0.1, 0.0),
            Complex64::new(0.0, -0.9),
            Complex64::new(0.3, 0.3),
        ];
        fix_phase(&mut s);
        assert_abs_diff_eq!(s[1].re, 0.9, epsilon = 1e-15);
        assert_abs_diff_eq!(s[1].im, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s[0].norm(), 0.1, epsilon = 1e-15);
    }

    #[test]
    fn double_well_localization() {
        let (e, d) = double_well(2);
        let m = project_hamiltonian(&e, &d).unwrap();
        assert!(m.dipole[(0, 0)].re < 0.0 && 0.0 < m.dipole[(1, 1)].re);
        assert_eq!(m.energies, e.energies);
    }

    #[test]
    fn phase_kick_route_matches_sandwich() {
        let (e, d) = double_well(2);
        let direct = project_hamiltonian(&e, &d).unwrap();
        let kicked = phase_kick_dipole(&e, &d, &DEFAULT_KICKS).unwrap();
        for (a, b) in direct.dipole.iter().zip(kicked.iter()) {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-6);
        }
        // a single finite kick is visibly biased, the extrapolation is not
        let x = d.operator.diagonal_values();
        let single = phase_kick_element(&e.states[1], &e.states[1], &x, 0.1);
        assert!((single - direct.dipole[(1, 1)]).norm() > 1e-4);
    }

    #[test]
    fn richardson_recovers_quadratic() {
        let h = [1e-4, 2.5e-5, 6.25e-6];
        let y: Vec<Complex64> = h
            .iter()
            .map(|h| Complex64::new(3.0 + 2.0 * h - 5.0 * h * h, 1.0))
            .collect();
        let z = extrapolate_to_zero(&h, &y);
        assert_abs_diff_eq!(z.re, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(z.im, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_field_is_stationary() {
        let (e, d) = double_well(4);
        let m = project_hamiltonian(&e, &d).unwrap();
        let c0: Vec<Complex64> = [0.5, 0.5, 0.5, 0.5].iter().map(|&x| Complex64::new(x, 0.0)).collect();
        for integrator in [SubspaceIntegrator::Exponential, SubspaceIntegrator::Rk4] {
            let run = SubspaceRun::covering(100.0, 0.5, integrator).unwrap();
            let traj = propagate_subspace(&m, &Pulse::Off, &c0, &run).unwrap();
            let obs = observables(&m, &traj);
            let t = fs_to_au(100.0);
            let last = traj.coeffs.last().unwrap();
            for k in 0..4 {
                let expect = c0[k] * Complex64::from_polar(1.0, -e.energies[k] * t);
                assert_abs_diff_eq!((last[k] - expect).norm(), 0.0, epsilon = 1e-9);
            }
            for row in &obs.populations {
                for (p, q) in row.iter().zip(&obs.populations[0]) {
                    assert_abs_diff_eq!(p, q, epsilon = 1e-10);
                }
            }
            let e0 = m.energy(&c0, 0.0);
            assert_abs_diff_eq!(m.energy(last, 0.0), e0, epsilon = 1e-10);
        }
    }

    #[test]
    fn single_state_model() {
        let (e, d) = double_well(1);
        let m = project_hamiltonian(&e, &d).unwrap();
        assert_eq!(m.dim(), 1);
        let run = SubspaceRun::covering(10.0, 1.0, SubspaceIntegrator::Exponential).unwrap();
        let traj = propagate_subspace(&m, &Pulse::isomerization(), &basis_coeffs(1, 0), &run).unwrap();
        assert!(traj.coeffs.iter().all(|c| (c[0].norm() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn rk4_rejects_oversized_steps() {
        let m = SubspaceModel::new(vec![-3.0, -1.0], DMatrix::zeros(2, 2), 1.0, -1.0).unwrap();
        let run = SubspaceRun::covering(20.0, 0.58, SubspaceIntegrator::Rk4)
            .unwrap()
            .with_substeps(1);
        match propagate_subspace(&m, &Pulse::Off, &basis_coeffs(2, 0), &run) {
            Err(Error::StepTooLarge { .. }) => {}
            other => panic!("expected StepTooLarge, got {other:?}"),
        }
    }

    #[test]
    fn rejects_non_hermitian_dipole_and_bad_start() {
        let mut d = DMatrix::zeros(2, 2);
        d[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(SubspaceModel::new(vec![0.0, 1.0], d, 1.0, 1.0).is_err());
        let m = SubspaceModel::new(vec![0.0, 1.0], DMatrix::zeros(2, 2), 1.0, 1.0).unwrap();
        let run = SubspaceRun::covering(1.0, 0.1, SubspaceIntegrator::Rk4).unwrap();
        let bad = vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        assert!(propagate_subspace(&m, &Pulse::Off, &bad, &run).is_err());
    }
}
