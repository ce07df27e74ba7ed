//! Exact statevector emulation with optional shot sampling.
//!
//! Two measurement routes are provided: direct inner products on statevectors,
//! and emulation of ancilla-controlled Hadamard-test circuits. In exact mode they
//! agree to rounding; sampled mode draws binomial outcomes per measured circuit.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::pauli::{PauliString, PauliSum};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Complex amplitudes over `2^N` computational basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() || !amps.len().is_power_of_two() {
            return Err(Error::NotPowerOfTwo(amps.len()));
        }
        Ok(Self { amps })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::from_amplitudes(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// Computational basis state `|index>`.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        if index >= 1 << n {
            return Err(Error::IndexOutOfRange { index, qubits: n });
        }
        let mut amps = vec![ZERO; 1 << n];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.amps.len().trailing_zeros() as usize
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm();
        for a in &mut self.amps {
            *a /= n;
        }
        self
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        inner(&self.amps, &other.amps)
    }

    /// In-place `e^{iθR}`: `ψ ← cos θ ψ + i sin θ Rψ`.
    pub fn rotate(&mut self, r: &PauliString, theta: f64) {
        rotate_in_place(&mut self.amps, r, theta);
    }

    pub fn apply_pauli(&mut self, p: &PauliString) {
        self.amps = p.apply(&self.amps);
    }

    /// Dumps `index re im` lines.
    pub fn to_text(&self) -> String {
        self.amps
            .iter()
            .enumerate()
            .map(|(k, a)| format!("{k} {:e} {:e}\n", a.re, a.im))
            .collect()
    }
}

pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `ψ ← cos θ ψ + i sin θ Rψ`, done pairwise so no scratch buffer is needed.
pub(crate) fn rotate_in_place(amps: &mut [Complex64], r: &PauliString, theta: f64) {
    let (s, c) = theta.sin_cos();
    let x = r.x_mask() as usize;
    let is = Complex64::new(0.0, s);
    if x == 0 {
        for (b, a) in amps.iter_mut().enumerate() {
            *a *= c + is * r.phase_on(b);
        }
        return;
    }
    let low = 1usize << (usize::BITS - 1 - x.leading_zeros());
    for b in 0..amps.len() {
        if b & low != 0 {
            continue;
        }
        let b2 = b ^ x;
        let (a1, a2) = (amps[b], amps[b2]);
        // R|b2> = phase(b2)|b>, R|b> = phase(b)|b2>
        amps[b] = c * a1 + is * r.phase_on(b2) * a2;
        amps[b2] = c * a2 + is * r.phase_on(b) * a1;
    }
}

/// Uniform superposition `|+>^N`.
pub fn prepare_plus(n: usize) -> StateVector {
    let amp = Complex64::new((0.5f64).powf(n as f64 / 2.0), 0.0);
    StateVector {
        amps: vec![amp; 1 << n],
    }
}

pub fn apply_rotation(state: &StateVector, r: &PauliString, theta: f64) -> Result<StateVector> {
    check_qubits(state.num_qubits(), r.num_qubits())?;
    let mut out = state.clone();
    out.rotate(r, theta);
    Ok(out)
}

fn check_qubits(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::QubitMismatch { expected, got });
    }
    Ok(())
}

/// How expectation values and circuit outcomes are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShotMode {
    Exact,
    Sampled { shots: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShotConfig {
    pub mode: ShotMode,
    pub seed: u64,
}

impl ShotConfig {
    pub fn exact() -> Self {
        Self {
            mode: ShotMode::Exact,
            seed: 0,
        }
    }

    pub fn sampled(shots: u64, seed: u64) -> Result<Self> {
        if shots == 0 {
            return Err(Error::InvalidShots("sampled mode needs at least one shot".into()));
        }
        Ok(Self {
            mode: ShotMode::Sampled { shots },
            seed,
        })
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.mode, ShotMode::Exact)
    }

    /// Fresh deterministic sampler for this configuration.
    pub fn sampler(&self) -> Sampler {
        Sampler {
            mode: self.mode,
            rng: ChaCha8Rng::seed_from_u64(self.seed),
        }
    }
}

/// Turns exact ±1-valued expectations into shot estimates.
pub struct Sampler {
    mode: ShotMode,
    rng: ChaCha8Rng,
}

impl Sampler {
    /// Estimate of a ±1-outcome observable with exact mean `mean`.
    pub fn estimate(&mut self, mean: f64) -> f64 {
        match self.mode {
            ShotMode::Exact => mean,
            ShotMode::Sampled { shots } => {
                let p = ((1.0 + mean) / 2.0).clamp(0.0, 1.0);
                let plus = Binomial::new(shots, p)
                    .expect("probability clamped to [0, 1]")
                    .sample(&mut self.rng);
                2.0 * plus as f64 / shots as f64 - 1.0
            }
        }
    }

    /// Estimate of a probability (0/1 outcomes).
    pub fn estimate_probability(&mut self, p: f64) -> f64 {
        (self.estimate(2.0 * p - 1.0) + 1.0) / 2.0
    }
}

/// `<ψ|H|ψ>`; sampled mode measures each Pauli term independently.
pub fn expectation(state: &StateVector, h: &PauliSum, cfg: &ShotConfig) -> Result<f64> {
    expectation_with(state, h, &mut cfg.sampler())
}

/// [`expectation`] drawing shots from an existing sampler.
pub fn expectation_with(state: &StateVector, h: &PauliSum, sampler: &mut Sampler) -> Result<f64> {
    check_qubits(state.num_qubits(), h.num_qubits())?;
    h.ensure_hermitian()?;
    let mut total = 0.0;
    for (p, c) in h.iter() {
        if p.is_identity() {
            total += c.re;
            continue;
        }
        let mean = inner(state.amplitudes(), &p.apply(state.amplitudes())).re;
        total += c.re * sampler.estimate(mean);
    }
    Ok(total)
}

/// Standard deviation of the per-term sampled estimator of `<H>`.
pub fn sampled_std(state: &StateVector, h: &PauliSum, shots: u64) -> f64 {
    h.iter()
        .filter(|(p, _)| !p.is_identity())
        .map(|(p, c)| {
            let m = inner(state.amplitudes(), &p.apply(state.amplitudes())).re;
            c.re * c.re * (1.0 - m * m) / shots as f64
        })
        .sum::<f64>()
        .sqrt()
}

/// `<bra|A|ket>`.
pub fn transition_element(bra: &StateVector, a: &PauliSum, ket: &StateVector) -> Result<Complex64> {
    check_qubits(bra.num_qubits(), ket.num_qubits())?;
    check_qubits(bra.num_qubits(), a.num_qubits())?;
    Ok(inner(bra.amplitudes(), &a.apply(ket.amplitudes())))
}

/// Which ancilla branch a controlled operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Zero,
    One,
}

/// One step of a Hadamard-test circuit on the system register.
#[derive(Debug, Clone, PartialEq)]
pub enum CircuitOp {
    /// Uncontrolled `e^{iθR}`.
    Rotation { generator: PauliString, theta: f64 },
    /// Pauli string applied only in the given ancilla branch.
    Controlled { pauli: PauliString, branch: Branch },
}

/// Ancilla phase `φ` for reading real (`0`) or imaginary (`π/2`) parts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrature {
    Real,
    Imag,
}

/// System-register circuit run under one ancilla prepared in `(|0> + e^{iφ}|1>)/√2`.
#[derive(Debug, Clone, PartialEq)]
pub struct HadamardCircuit {
    pub qubits: usize,
    pub ops: Vec<CircuitOp>,
}

impl HadamardCircuit {
    pub fn new(qubits: usize) -> Self {
        Self {
            qubits,
            ops: Vec::new(),
        }
    }

    pub fn rotation(mut self, generator: PauliString, theta: f64) -> Self {
        self.ops.push(CircuitOp::Rotation { generator, theta });
        self
    }

    pub fn controlled(mut self, pauli: PauliString, branch: Branch) -> Self {
        self.ops.push(CircuitOp::Controlled { pauli, branch });
        self
    }

    fn validate(&self, reference: &StateVector) -> Result<()> {
        if reference.num_qubits() != self.qubits {
            return Err(Error::MalformedCircuit(format!(
                "reference state has {} qubits, circuit has {}",
                reference.num_qubits(),
                self.qubits
            )));
        }
        if self.qubits >= 63 {
            return Err(Error::MalformedCircuit("too many qubits for an ancilla".into()));
        }
        for (k, op) in self.ops.iter().enumerate() {
            let n = match op {
                CircuitOp::Rotation { generator, theta } => {
                    if !theta.is_finite() {
                        return Err(Error::MalformedCircuit(format!("op {k}: non-finite angle")));
                    }
                    generator.num_qubits()
                }
                CircuitOp::Controlled { pauli, .. } => pauli.num_qubits(),
            };
            if n != self.qubits {
                return Err(Error::MalformedCircuit(format!(
                    "op {k} acts on {n} qubits, circuit has {}",
                    self.qubits
                )));
            }
        }
        Ok(())
    }
}

/// Emulates the Hadamard test on the joint `N + 1` qubit register.
///
/// With `|a>` and `|b>` the system states left in the ancilla-0 and ancilla-1
/// branches, `Quadrature::Real` returns `Re<a|b>` and `Quadrature::Imag`
/// returns `Im<a|b>` (measured as `-<X_anc>` with `φ = π/2`).
pub fn hadamard_test(
    reference: &StateVector,
    circuit: &HadamardCircuit,
    quadrature: Quadrature,
    cfg: &ShotConfig,
) -> Result<f64> {
    hadamard_test_with(reference, circuit, quadrature, &mut cfg.sampler())
}

/// [`hadamard_test`] drawing shots from an existing sampler.
pub fn hadamard_test_with(
    reference: &StateVector,
    circuit: &HadamardCircuit,
    quadrature: Quadrature,
    sampler: &mut Sampler,
) -> Result<f64> {
    circuit.validate(reference)?;
    let n = circuit.qubits;
    let dim = 1usize << n;
    let anc = 1usize << n;
    let phase = match quadrature {
        Quadrature::Real => Complex64::new(1.0, 0.0),
        Quadrature::Imag => Complex64::new(0.0, 1.0),
    };
    // ancilla is the most significant qubit of the joint register
    let mut joint = vec![ZERO; 2 * dim];
    for (b, a) in reference.amplitudes().iter().enumerate() {
        joint[b] = a * FRAC_1_SQRT_2;
        joint[b | anc] = a * phase * FRAC_1_SQRT_2;
    }
    for op in &circuit.ops {
        match op {
            CircuitOp::Rotation { generator, theta } => {
                let g = generator.embed(n + 1, 0);
                rotate_in_place(&mut joint, &g, *theta);
            }
            CircuitOp::Controlled { pauli, branch } => {
                let half = match branch {
                    Branch::Zero => &mut joint[..dim],
                    Branch::One => &mut joint[dim..],
                };
                let out = pauli.apply(half);
                half.copy_from_slice(&out);
            }
        }
    }
    // <X_anc> = 2 Re Σ_b conj(ψ[b]) ψ[b | anc]
    let x_anc = 2.0 * inner(&joint[..dim], &joint[dim..]).re;
    let estimate = sampler.estimate(x_anc.clamp(-1.0, 1.0));
    Ok(match quadrature {
        Quadrature::Real => estimate,
        Quadrature::Imag => -estimate,
    })
}

/// Ordered product of Pauli rotations, `U = Π_k e^{iθ_k R_k}` with `k = 0` applied first.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationCircuit {
    pub qubits: usize,
    pub gates: Vec<(PauliString, f64)>,
}

impl RotationCircuit {
    pub fn apply(&self, state: &mut StateVector) {
        for (g, theta) in &self.gates {
            state.rotate(g, *theta);
        }
    }

    pub fn apply_inverse(&self, state: &mut StateVector) {
        for (g, theta) in self.gates.iter().rev() {
            state.rotate(g, -*theta);
        }
    }
}

/// `|<ψ_0|U_i† U_j|ψ_0>|²`, measured by projecting `U_i† U_j|ψ_0>` onto `|ψ_0>`.
pub fn overlap_sq(
    reference: &StateVector,
    ui: &RotationCircuit,
    uj: &RotationCircuit,
    cfg: &ShotConfig,
) -> Result<f64> {
    overlap_sq_with(reference, ui, uj, &mut cfg.sampler())
}

/// [`overlap_sq`] drawing shots from an existing sampler.
pub fn overlap_sq_with(
    reference: &StateVector,
    ui: &RotationCircuit,
    uj: &RotationCircuit,
    sampler: &mut Sampler,
) -> Result<f64> {
    check_qubits(reference.num_qubits(), ui.qubits)?;
    check_qubits(reference.num_qubits(), uj.qubits)?;
    let mut s = reference.clone();
    uj.apply(&mut s);
    ui.apply_inverse(&mut s);
    let p = reference.inner(&s).norm_sqr().min(1.0);
    Ok(sampler.estimate_probability(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn random_state(n: usize, rng: &mut ChaCha8Rng) -> StateVector {
        let amps = (0..1 << n)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        StateVector::from_amplitudes(amps).unwrap().normalized()
    }

    #[test]
    fn plus_state() {
        let s = prepare_plus(1);
        assert_abs_diff_eq!(s.amplitudes()[0].re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(s.amplitudes()[1].re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert!(prepare_plus(2).amplitudes().iter().all(|a| (a.re - 0.5).abs() < 1e-15));
        assert_abs_diff_eq!(prepare_plus(6).norm(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn rotation_examples() {
        let zero = StateVector::basis(1, 0).unwrap();
        assert_eq!(apply_rotation(&zero, &ps("X"), 0.0).unwrap(), zero);
        let r = apply_rotation(&zero, &ps("X"), PI / 2.0).unwrap();
        assert_abs_diff_eq!(r.amplitudes()[0].norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            (r.amplitudes()[1] - Complex64::new(0.0, 1.0)).norm(),
            0.0,
            epsilon = 1e-15
        );
        assert!(apply_rotation(&zero, &ps("XX"), 0.1).is_err());
    }

    #[test]
    fn rotation_matches_dense_exponential() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for letters in ["XYZ", "ZIZ", "IYI", "YXX", "III"] {
            let r = ps(letters);
            let s = random_state(3, &mut rng);
            let theta = rng.random_range(-PI..PI);
            let out = apply_rotation(&s, &r, theta).unwrap();
            let rs = r.apply(s.amplitudes());
            for k in 0..8 {
                let expected = s.amplitudes()[k] * theta.cos() + Complex64::new(0.0, theta.sin()) * rs[k];
                assert_abs_diff_eq!((out.amplitudes()[k] - expected).norm(), 0.0, epsilon = 1e-14);
            }
            assert_abs_diff_eq!(out.norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn expectation_examples() {
        let plus = prepare_plus(1);
        let z = PauliSum::from_real_terms(1, &[("Z", 1.0)]).unwrap();
        let x = PauliSum::from_real_terms(1, &[("X", 1.0)]).unwrap();
        assert_abs_diff_eq!(
            expectation(&plus, &z, &ShotConfig::exact()).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            expectation(&plus, &x, &ShotConfig::exact()).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        let bad = PauliSum::from_terms(1, [(ps("X"), Complex64::new(0.0, 1.0))]);
        assert!(matches!(
            expectation(&plus, &bad, &ShotConfig::exact()),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn transition_examples() {
        let zero = StateVector::basis(1, 0).unwrap();
        let one = StateVector::basis(1, 1).unwrap();
        let id = PauliSum::from_real_terms(1, &[("I", 1.0)]).unwrap();
        let x = PauliSum::from_real_terms(1, &[("X", 1.0)]).unwrap();
        assert_abs_diff_eq!(transition_element(&zero, &id, &zero).unwrap().re, 1.0);
        assert_abs_diff_eq!(transition_element(&zero, &x, &one).unwrap().re, 1.0);
    }

    #[test]
    fn sampled_expectation_converges() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let s = random_state(3, &mut rng);
        let h = PauliSum::from_real_terms(3, &[("XII", 0.7), ("ZZI", -0.4), ("YIY", 0.3), ("III", 1.0)]).unwrap();
        let exact = expectation(&s, &h, &ShotConfig::exact()).unwrap();
        let shots = 1_000_000;
        let cfg = ShotConfig::sampled(shots, 42).unwrap();
        let est = expectation(&s, &h, &cfg).unwrap();
        let sigma = sampled_std(&s, &h, shots);
        assert!((est - exact).abs() <= 5.0 * sigma, "{est} vs {exact} (σ={sigma})");
        // deterministic
        assert_eq!(est, expectation(&s, &h, &cfg).unwrap());
        assert!(ShotConfig::sampled(0, 1).is_err());
    }

    #[test]
    fn identity_hadamard_test() {
        let c = HadamardCircuit::new(2);
        let v = hadamard_test(&prepare_plus(2), &c, Quadrature::Real, &ShotConfig::exact()).unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-14);
        let v = hadamard_test(&prepare_plus(2), &c, Quadrature::Imag, &ShotConfig::exact()).unwrap();
        assert_abs_diff_eq!(v, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn hadamard_test_reads_inner_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = random_state(3, &mut rng);
        let c = HadamardCircuit::new(3)
            .rotation(ps("XZI"), 0.3)
            .controlled(ps("YIZ"), Branch::One)
            .rotation(ps("IXX"), -0.7)
            .controlled(ps("ZZI"), Branch::Zero);
        // direct: a = ZZI U2 U1 s, b = U2 YIZ U1 s
        let mut a = s.clone();
        a.rotate(&ps("XZI"), 0.3);
        let mut b = a.clone();
        b.apply_pauli(&ps("YIZ"));
        a.rotate(&ps("IXX"), -0.7);
        b.rotate(&ps("IXX"), -0.7);
        a.apply_pauli(&ps("ZZI"));
        let z = a.inner(&b);
        let re = hadamard_test(&s, &c, Quadrature::Real, &ShotConfig::exact()).unwrap();
        let im = hadamard_test(&s, &c, Quadrature::Imag, &ShotConfig::exact()).unwrap();
        assert_abs_diff_eq!(re, z.re, epsilon = 1e-12);
        assert_abs_diff_eq!(im, z.im, epsilon = 1e-12);
    }

    #[test]
    fn malformed_circuit_rejected() {
        let c = HadamardCircuit::new(2).controlled(ps("XXX"), Branch::One);
        let err = hadamard_test(&prepare_plus(2), &c, Quadrature::Real, &ShotConfig::exact());
        assert!(matches!(err, Err(Error::MalformedCircuit(_))));
        let c = HadamardCircuit::new(3);
        assert!(hadamard_test(&prepare_plus(2), &c, Quadrature::Real, &ShotConfig::exact()).is_err());
    }

    #[test]
    fn overlap_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let plus = prepare_plus(3);
        let gens = [ps("XII"), ps("ZZI"), ps("IYX"), ps("IIZ")];
        let circ = |rng: &mut ChaCha8Rng| RotationCircuit {
            qubits: 3,
            gates: gens.iter().map(|g| (*g, rng.random_range(-PI..PI))).collect(),
        };
        let ui = circ(&mut rng);
        let uj = circ(&mut rng);
        assert_abs_diff_eq!(
            overlap_sq(&plus, &ui, &ui, &ShotConfig::exact()).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        let mut si = plus.clone();
        ui.apply(&mut si);
        let mut sj = plus.clone();
        uj.apply(&mut sj);
        let direct = si.inner(&sj).norm_sqr();
        assert_abs_diff_eq!(
            overlap_sq(&plus, &ui, &uj, &ShotConfig::exact()).unwrap(),
            direct,
            epsilon = 1e-10
        );
        // orthogonal computational states: |000> vs X on qubit 0 via e^{iπ/2 X}
        let zero = StateVector::basis(3, 0).unwrap();
        let flip = RotationCircuit {
            qubits: 3,
            gates: vec![(ps("XII"), PI / 2.0)],
        };
        let id = RotationCircuit {
            qubits: 3,
            gates: vec![],
        };
        assert_abs_diff_eq!(
            overlap_sq(&zero, &id, &flip, &ShotConfig::exact()).unwrap(),
            0.0,
            epsilon = 1e-15
        );
    }
}
