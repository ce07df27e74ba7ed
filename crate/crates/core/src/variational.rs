//! McLachlan variational equations of motion in real and imaginary time.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::ansatz::Ansatz;
use crate::error::{Error, Result};
use crate::pauli::PauliSum;
use crate::sim::{
    expectation_with, hadamard_test_with, inner, Branch, HadamardCircuit, Quadrature, Sampler, StateVector,
};

/// Tikhonov shift added to the metric before solving.
pub const DEFAULT_RIDGE: f64 = 1e-6;

/// Anything that can act on a state at time `t`.
pub trait Hamiltonian {
    fn num_qubits(&self) -> usize;
    fn apply_at(&self, t: f64, psi: &[Complex64]) -> Vec<Complex64>;

    /// Pauli expansion at time `t`, when one exists.
    fn pauli_at(&self, _t: f64) -> Option<PauliSum> {
        None
    }
}

impl Hamiltonian for PauliSum {
    fn num_qubits(&self) -> usize {
        PauliSum::num_qubits(self)
    }

    fn apply_at(&self, _t: f64, psi: &[Complex64]) -> Vec<Complex64> {
        self.apply(psi)
    }

    fn pauli_at(&self, _t: f64) -> Option<PauliSum> {
        Some(self.clone())
    }
}

/// `H(t) = H0 + ε(t) μ`, where `μ` already carries the coupling sign.
pub struct DrivenHamiltonian<F> {
    pub h0: PauliSum,
    pub coupling: PauliSum,
    pub field: F,
}

impl<F: Fn(f64) -> f64> DrivenHamiltonian<F> {
    pub fn new(h0: PauliSum, coupling: PauliSum, field: F) -> Result<Self> {
        if h0.num_qubits() != coupling.num_qubits() {
            return Err(Error::QubitMismatch {
                expected: h0.num_qubits(),
                got: coupling.num_qubits(),
            });
        }
        h0.ensure_hermitian()?;
        coupling.ensure_hermitian()?;
        Ok(Self { h0, coupling, field })
    }

    pub fn at(&self, t: f64) -> PauliSum {
        self.h0
            .plus(&self.coupling.scaled(Complex64::new((self.field)(t), 0.0)))
    }
}

impl<F: Fn(f64) -> f64> Hamiltonian for DrivenHamiltonian<F> {
    fn num_qubits(&self) -> usize {
        self.h0.num_qubits()
    }

    fn apply_at(&self, t: f64, psi: &[Complex64]) -> Vec<Complex64> {
        let mut out = self.h0.apply(psi);
        let e = (self.field)(t);
        if e != 0.0 {
            for (o, c) in out.iter_mut().zip(self.coupling.apply(psi)) {
                *o += c * e;
            }
        }
        out
    }

    fn pauli_at(&self, t: f64) -> Option<PauliSum> {
        Some(self.at(t))
    }
}

/// Overall signs relating `Im f` / `Re f` to the parameter velocity.
///
/// With `f_k = <ψ|H|∂_kψ>` and `M θ̇ = s · Im f`, `s = -1` reproduces
/// `e^{-iHt}` for this rotation convention (a single `X` rotation under
/// `H = X` yields `θ(t) = -t`). The imaginary-time sign makes `θ̇` a descent
/// direction of `<H>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignConvention {
    pub real_time: f64,
    pub imag_time: f64,
}

impl SignConvention {
    pub const CALIBRATED: Self = Self {
        real_time: -1.0,
        imag_time: -1.0,
    };
}

impl Default for SignConvention {
    fn default() -> Self {
        Self::CALIBRATED
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Euler,
    Rk4,
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "euler" => Ok(Scheme::Euler),
            "rk4" => Ok(Scheme::Rk4),
            other => Err(Error::InvalidIntegrator(format!("unknown scheme `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub step: f64,
    pub scheme: Scheme,
    pub ridge: f64,
    pub signs: SignConvention,
}

impl IntegratorConfig {
    pub fn new(step: f64, scheme: Scheme) -> Result<Self> {
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::InvalidIntegrator(format!("step must be positive, got {step}")));
        }
        Ok(Self {
            step,
            scheme,
            ridge: DEFAULT_RIDGE,
            signs: SignConvention::CALIBRATED,
        })
    }
}

/// Metric `M_kl = Re<∂_kψ|∂_lψ>`, force `f_k = <ψ|H|∂_kψ>` and energy `<H>`.
#[derive(Debug, Clone, PartialEq)]
pub struct McLachlanSystem {
    pub m: DMatrix<f64>,
    pub f: Vec<Complex64>,
    pub energy: f64,
}

impl McLachlanSystem {
    /// Exact assembly from the emulated state and its derivatives.
    pub fn direct<H: Hamiltonian + ?Sized>(ansatz: &Ansatz, params: &[f64], h: &H, t: f64) -> Result<Self> {
        check_params(ansatz, params)?;
        if h.num_qubits() != ansatz.qubits() {
            return Err(Error::QubitMismatch {
                expected: ansatz.qubits(),
                got: h.num_qubits(),
            });
        }
        let (psi, derivs) = ansatz.state_and_derivatives(params);
        let hpsi = h.apply_at(t, &psi);
        let k = derivs.len();
        let mut m = DMatrix::zeros(k, k);
        for a in 0..k {
            m[(a, a)] = inner(&derivs[a], &derivs[a]).re;
            for b in a + 1..k {
                let v = inner(&derivs[a], &derivs[b]).re;
                m[(a, b)] = v;
                m[(b, a)] = v;
            }
        }
        let f = derivs.iter().map(|d| inner(&hpsi, d)).collect();
        let energy = inner(&psi, &hpsi).re;
        Ok(Self { m, f, energy })
    }

    /// Assembly from emulated Hadamard-test circuits and per-term energy
    /// measurements, each drawing shots from `sampler`.
    pub fn measured(ansatz: &Ansatz, params: &[f64], h: &PauliSum, sampler: &mut Sampler) -> Result<Self> {
        let m = assemble_m_hadamard(ansatz, params, sampler)?;
        let f = assemble_f_hadamard(ansatz, params, h, sampler)?;
        let energy = expectation_with(&ansatz.prepare_at(params), h, sampler)?;
        Ok(Self { m, f, energy })
    }

    /// `(M + λI) x = rhs` by Cholesky, falling back to LU.
    pub fn solve(&self, rhs: &[f64], ridge: f64) -> Result<Vec<f64>> {
        let n = self.m.nrows();
        let a = &self.m + DMatrix::identity(n, n) * ridge;
        let b = DVector::from_column_slice(rhs);
        let x = match a.clone().cholesky() {
            Some(ch) => ch.solve(&b),
            None => a
                .lu()
                .solve(&b)
                .ok_or_else(|| Error::SolveFailed("regularized metric is singular".into()))?,
        };
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::SolveFailed("non-finite parameter velocity".into()));
        }
        Ok(x.as_slice().to_vec())
    }

    pub fn real_time_velocity(&self, cfg: &IntegratorConfig) -> Result<Vec<f64>> {
        let rhs: Vec<f64> = self.f.iter().map(|c| cfg.signs.real_time * c.im).collect();
        self.solve(&rhs, cfg.ridge)
    }

    pub fn imag_time_velocity(&self, cfg: &IntegratorConfig) -> Result<Vec<f64>> {
        let rhs: Vec<f64> = self.f.iter().map(|c| cfg.signs.imag_time * c.re).collect();
        self.solve(&rhs, cfg.ridge)
    }
}

fn check_params(ansatz: &Ansatz, params: &[f64]) -> Result<()> {
    if params.len() != ansatz.num_params() {
        return Err(Error::DimensionMismatch(format!(
            "ansatz has {} parameters, got {}",
            ansatz.num_params(),
            params.len()
        )));
    }
    Ok(())
}

fn prefix(ansatz: &Ansatz, params: &[f64], upto: usize, mut c: HadamardCircuit) -> HadamardCircuit {
    for (g, theta) in ansatz.generators()[..upto].iter().zip(params) {
        c = c.rotation(*g, *theta);
    }
    c
}

/// Metric from one real-quadrature Hadamard test per pair `k < l`.
pub fn assemble_m_hadamard(ansatz: &Ansatz, params: &[f64], sampler: &mut Sampler) -> Result<DMatrix<f64>> {
    check_params(ansatz, params)?;
    let reference = ansatz.reference_state();
    let gens = ansatz.generators();
    let n = params.len();
    let mut m = DMatrix::identity(n, n);
    for k in 0..n {
        for l in k + 1..n {
            let mut c = prefix(ansatz, params, k + 1, HadamardCircuit::new(ansatz.qubits()));
            c = c.controlled(gens[k], Branch::Zero);
            for j in k + 1..=l {
                c = c.rotation(gens[j], params[j]);
            }
            c = c.controlled(gens[l], Branch::One);
            let v = hadamard_test_with(&reference, &c, Quadrature::Real, sampler)?;
            m[(k, l)] = v;
            m[(l, k)] = v;
        }
    }
    Ok(m)
}

/// Force vector from two Hadamard tests (both quadratures) per parameter and Pauli term.
pub fn assemble_f_hadamard(
    ansatz: &Ansatz,
    params: &[f64],
    h: &PauliSum,
    sampler: &mut Sampler,
) -> Result<Vec<Complex64>> {
    check_params(ansatz, params)?;
    if h.num_qubits() != ansatz.qubits() {
        return Err(Error::QubitMismatch {
            expected: ansatz.qubits(),
            got: h.num_qubits(),
        });
    }
    h.ensure_hermitian()?;
    let reference = ansatz.reference_state();
    let gens = ansatz.generators();
    let n = params.len();
    let mut f = vec![Complex64::new(0.0, 0.0); n];
    for (k, fk) in f.iter_mut().enumerate() {
        let mut base = prefix(ansatz, params, k + 1, HadamardCircuit::new(ansatz.qubits()));
        base = base.controlled(gens[k], Branch::One);
        for j in k + 1..n {
            base = base.rotation(gens[j], params[j]);
        }
        let mut z = Complex64::new(0.0, 0.0);
        for (p, c) in h.iter() {
            let circuit = base.clone().controlled(*p, Branch::One);
            let re = hadamard_test_with(&reference, &circuit, Quadrature::Real, sampler)?;
            let im = hadamard_test_with(&reference, &circuit, Quadrature::Imag, sampler)?;
            z += c.re * Complex64::new(re, im);
        }
        *fk = Complex64::new(0.0, 1.0) * z;
    }
    Ok(f)
}

fn axpy(x: &[f64], a: f64, v: &[f64]) -> Vec<f64> {
    x.iter().zip(v).map(|(x, v)| x + a * v).collect()
}

/// One real-time step of `θ`; `system(θ, t)` assembles the equations at `(θ, t)`.
pub fn real_time_step<S>(params: &[f64], t: f64, cfg: &IntegratorConfig, system: &mut S) -> Result<Vec<f64>>
where
    S: FnMut(&[f64], f64) -> Result<McLachlanSystem>,
{
    let h = cfg.step;
    let mut vel = |p: &[f64], t: f64| -> Result<Vec<f64>> { system(p, t)?.real_time_velocity(cfg) };
    let next = match cfg.scheme {
        Scheme::Euler => axpy(params, h, &vel(params, t)?),
        Scheme::Rk4 => {
            let k1 = vel(params, t)?;
            let k2 = vel(&axpy(params, h / 2.0, &k1), t + h / 2.0)?;
            let k3 = vel(&axpy(params, h / 2.0, &k2), t + h / 2.0)?;
            let k4 = vel(&axpy(params, h, &k3), t + h)?;
            params
                .iter()
                .enumerate()
                .map(|(i, p)| p + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
                .collect()
        }
    };
    if next.iter().any(|v: &f64| !v.is_finite()) {
        return Err(Error::SolveFailed("parameters became non-finite".into()));
    }
    Ok(next)
}

/// Runs `steps` real-time steps from `t0`, calling `observe(step, t, θ)` before
/// the first step and after every step.
pub fn evolve_real_time<S, O>(
    initial: &[f64],
    t0: f64,
    steps: usize,
    cfg: &IntegratorConfig,
    mut system: S,
    mut observe: O,
) -> Result<Vec<f64>>
where
    S: FnMut(&[f64], f64) -> Result<McLachlanSystem>,
    O: FnMut(usize, f64, &[f64]) -> Result<()>,
{
    let mut params = initial.to_vec();
    observe(0, t0, &params)?;
    for s in 0..steps {
        let t = t0 + s as f64 * cfg.step;
        params = real_time_step(&params, t, cfg, &mut system)?;
        observe(s + 1, t0 + (s + 1) as f64 * cfg.step, &params)?;
    }
    Ok(params)
}

/// Stopping and step-control settings for imaginary-time minimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImagTimeOptions {
    pub step: f64,
    pub max_iterations: usize,
    /// Stop once `|ΔE|` stays below this for `patience` accepted steps in a row.
    pub energy_tol: f64,
    pub patience: usize,
    /// Maximum number of step halvings when a trial step raises the energy.
    pub max_halvings: usize,
    pub ridge: f64,
    pub signs: SignConvention,
}

impl Default for ImagTimeOptions {
    fn default() -> Self {
        Self {
            step: 50.0,
            max_iterations: 1000,
            energy_tol: 1e-8,
            patience: 20,
            max_halvings: 30,
            ridge: DEFAULT_RIDGE,
            signs: SignConvention::CALIBRATED,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImagTimeResult {
    pub params: Vec<f64>,
    pub energy: f64,
    /// Energy after every accepted step, starting with the initial energy.
    pub energies: Vec<f64>,
    pub iterations: usize,
    pub rejected: usize,
    pub converged: bool,
}

/// Imaginary-time descent with step halving whenever a trial step raises the
/// energy, so accepted energies never increase.
pub fn imaginary_time_minimize<S>(initial: &[f64], opts: &ImagTimeOptions, mut system: S) -> Result<ImagTimeResult>
where
    S: FnMut(&[f64]) -> Result<McLachlanSystem>,
{
    let mut cfg = IntegratorConfig::new(opts.step, Scheme::Euler)?;
    cfg.ridge = opts.ridge;
    cfg.signs = opts.signs;
    let mut params = initial.to_vec();
    let mut sys = system(&params)?;
    let mut energies = vec![sys.energy];
    let mut rejected = 0;
    let mut quiet = 0;
    let mut step = opts.step;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iterations {
        iterations += 1;
        let vel = sys.imag_time_velocity(&cfg)?;
        let mut accepted = None;
        let mut trial_step = step;
        for _ in 0..=opts.max_halvings {
            let trial = axpy(&params, trial_step, &vel);
            let trial_sys = system(&trial)?;
            if trial_sys.energy <= sys.energy {
                accepted = Some((trial, trial_sys));
                break;
            }
            rejected += 1;
            trial_step /= 2.0;
        }
        let Some((trial, trial_sys)) = accepted else {
            // no descent left at any tried step: stationary to working precision
            converged = true;
            break;
        };
        let delta = (trial_sys.energy - sys.energy).abs();
        params = trial;
        sys = trial_sys;
        energies.push(sys.energy);
        step = (trial_step * 2.0).min(opts.step);
        if delta < opts.energy_tol {
            quiet += 1;
            if quiet >= opts.patience {
                converged = true;
                break;
            }
        } else {
            quiet = 0;
        }
    }
    Ok(ImagTimeResult {
        energy: sys.energy,
        params,
        energies,
        iterations,
        rejected,
        converged,
    })
}

/// `<ψ(θ)|H|ψ(θ)>` evaluated exactly.
pub fn energy<H: Hamiltonian + ?Sized>(ansatz: &Ansatz, params: &[f64], h: &H, t: f64) -> f64 {
    let psi = ansatz.prepare_at(params);
    let hpsi = h.apply_at(t, psi.amplitudes());
    inner(psi.amplitudes(), &hpsi).re
}

/// Convenience: the exact state at `params`.
pub fn state_at(ansatz: &Ansatz, params: &[f64]) -> StateVector {
    ansatz.prepare_at(params)
}
