//! Layered Hamiltonian variational ansatz built from one- and two-qubit Pauli rotations.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pauli::{PauliString, PauliSum};
use crate::sim::{prepare_plus, rotate_in_place, RotationCircuit, StateVector};

/// Initial state the rotations act on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reference {
    Plus,
    Basis(usize),
}

impl Reference {
    pub fn state(&self, qubits: usize) -> StateVector {
        match *self {
            Reference::Plus => prepare_plus(qubits),
            Reference::Basis(k) => StateVector::basis(qubits, k).expect("basis index in range"),
        }
    }
}

/// How fresh parameters are drawn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamInit {
    Zero,
    /// Independent uniform draws from `[-half_width, half_width]`.
    Uniform {
        half_width: f64,
        seed: u64,
    },
}

impl Default for ParamInit {
    fn default() -> Self {
        ParamInit::Uniform {
            half_width: 0.01,
            seed: 7,
        }
    }
}

impl ParamInit {
    pub fn draw(&self, len: usize) -> Vec<f64> {
        match *self {
            ParamInit::Zero => vec![0.0; len],
            ParamInit::Uniform { half_width, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..len).map(|_| rng.random_range(-half_width..=half_width)).collect()
            }
        }
    }
}

/// `|ψ(θ)> = e^{iθ_{K-1} R_{K-1}} ... e^{iθ_0 R_0} |ref>`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ansatz {
    qubits: usize,
    generators: Vec<PauliString>,
    params: Vec<f64>,
    layers: usize,
    reference: Reference,
}

impl Ansatz {
    /// Arbitrary generator list; every generator must have weight 1 or 2.
    pub fn new(
        qubits: usize,
        generators: Vec<PauliString>,
        params: Vec<f64>,
        layers: usize,
        reference: Reference,
    ) -> Result<Self> {
        if generators.len() != params.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} generators but {} parameters",
                generators.len(),
                params.len()
            )));
        }
        for g in &generators {
            if g.num_qubits() != qubits {
                return Err(Error::QubitMismatch {
                    expected: qubits,
                    got: g.num_qubits(),
                });
            }
            if !(1..=2).contains(&g.weight()) {
                return Err(Error::InvalidArgument(format!(
                    "generator {g} has weight {}, need 1 or 2",
                    g.weight()
                )));
            }
        }
        if let Reference::Basis(k) = reference {
            if k >= 1 << qubits {
                return Err(Error::IndexOutOfRange { index: k, qubits });
            }
        }
        Ok(Self {
            qubits,
            generators,
            params,
            layers,
            reference,
        })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn reference(&self) -> Reference {
        self.reference
    }

    pub fn set_params(&mut self, params: Vec<f64>) {
        assert_eq!(params.len(), self.params.len(), "parameter count changed");
        self.params = params;
    }

    pub fn with_params(&self, params: Vec<f64>) -> Self {
        let mut a = self.clone();
        a.set_params(params);
        a
    }

    pub fn reference_state(&self) -> StateVector {
        self.reference.state(self.qubits)
    }

    pub fn circuit(&self) -> RotationCircuit {
        self.circuit_at(&self.params)
    }

    pub fn circuit_at(&self, params: &[f64]) -> RotationCircuit {
        RotationCircuit {
            qubits: self.qubits,
            gates: self.generators.iter().copied().zip(params.iter().copied()).collect(),
        }
    }

    pub fn prepare(&self) -> StateVector {
        self.prepare_at(&self.params)
    }

    pub fn prepare_at(&self, params: &[f64]) -> StateVector {
        let mut s = self.reference_state();
        for (g, theta) in self.generators.iter().zip(params) {
            s.rotate(g, *theta);
        }
        s
    }

    /// `∂|ψ>/∂θ_k`: `iR_k` inserted right after the `k`-th rotation.
    pub fn derivative_state(&self, k: usize) -> Result<StateVector> {
        if k >= self.num_params() {
            return Err(Error::ParamOutOfRange {
                index: k,
                len: self.num_params(),
            });
        }
        let mut s = self.reference_state();
        for (m, (g, theta)) in self.generators.iter().zip(&self.params).enumerate() {
            s.rotate(g, *theta);
            if m == k {
                s.apply_pauli(g);
                for a in s.amplitudes_mut() {
                    *a *= Complex64::new(0.0, 1.0);
                }
            }
        }
        Ok(s)
    }

    /// The state and all derivative states at `params`, sharing the forward pass.
    pub fn state_and_derivatives(&self, params: &[f64]) -> (Vec<Complex64>, Vec<Vec<Complex64>>) {
        let mut forward = self.reference_state().into_amplitudes();
        let mut derivs: Vec<Vec<Complex64>> = Vec::with_capacity(params.len());
        for (g, theta) in self.generators.iter().zip(params) {
            rotate_in_place(&mut forward, g, *theta);
            for d in derivs.iter_mut() {
                rotate_in_place(d, g, *theta);
            }
            let mut d = g.apply(&forward);
            for a in d.iter_mut() {
                *a *= Complex64::new(0.0, 1.0);
            }
            derivs.push(d);
        }
        (forward, derivs)
    }

    /// Text manifest: header lines then one `LETTERS theta` line per generator.
    pub fn to_manifest(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "qubits {}", self.qubits);
        let _ = writeln!(out, "layers {}", self.layers);
        let reference = match self.reference {
            Reference::Plus => "plus".to_string(),
            Reference::Basis(k) => format!("basis {k}"),
        };
        let _ = writeln!(out, "reference {reference}");
        for (g, theta) in self.generators.iter().zip(&self.params) {
            let _ = writeln!(out, "{g} {theta:e}");
        }
        out
    }

    pub fn from_manifest(text: &str) -> Result<Self> {
        let mut qubits = None;
        let mut layers = 1;
        let mut reference = Reference::Plus;
        let mut generators = Vec::new();
        let mut params = Vec::new();
        for (k, line) in text.lines().enumerate() {
            let fields: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::Parse(format!("ansatz manifest line {}: `{line}`", k + 1));
            match fields.as_slice() {
                [] => {}
                [c, ..] if c.starts_with('#') => {}
                ["qubits", n] => qubits = Some(n.parse().map_err(|_| bad())?),
                ["layers", n] => layers = n.parse().map_err(|_| bad())?,
                ["reference", "plus"] => reference = Reference::Plus,
                ["reference", "basis", i] => reference = Reference::Basis(i.parse().map_err(|_| bad())?),
                [letters, theta] => {
                    generators.push(letters.parse::<PauliString>()?);
                    params.push(theta.parse().map_err(|_| bad())?);
                }
                _ => return Err(bad()),
            }
        }
        let qubits = qubits.ok_or_else(|| Error::Parse("ansatz manifest lacks `qubits`".into()))?;
        Self::new(qubits, generators, params, layers, reference)
    }
}

/// Distinct weight-1 and weight-2 strings of `h`, weight 1 first, lexicographic within each class.
pub fn hva_generators(h: &PauliSum) -> Vec<PauliString> {
    let set: BTreeSet<PauliString> = h
        .iter()
        .map(|(p, _)| *p)
        .filter(|p| (1..=2).contains(&p.weight()))
        .collect();
    let mut gens: Vec<PauliString> = set.into_iter().collect();
    gens.sort_by(|a, b| a.weight().cmp(&b.weight()).then_with(|| a.cmp(b)));
    gens
}

/// Hamiltonian variational ansatz: the kept strings of `h`, repeated once per layer,
/// each occurrence with its own parameter.
pub fn build_hva(h: &PauliSum, layers: usize, init: ParamInit) -> Result<Ansatz> {
    h.ensure_hermitian()?;
    if layers == 0 {
        return Err(Error::InvalidArgument("need at least one layer".into()));
    }
    let base = hva_generators(h);
    if base.is_empty() {
        return Err(Error::EmptyAnsatz);
    }
    let generators: Vec<PauliString> = (0..layers).flat_map(|_| base.iter().copied()).collect();
    let params = init.draw(generators.len());
    Ansatz::new(h.num_qubits(), generators, params, layers, Reference::Plus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn random_ansatz(seed: u64) -> Ansatz {
        let h = PauliSum::from_real_terms(
            3,
            &[
                ("XII", 0.3),
                ("IZI", -0.2),
                ("XXI", 0.5),
                ("IYY", 0.1),
                ("ZIZ", 0.4),
                ("IIX", 1.0),
            ],
        )
        .unwrap();
        build_hva(&h, 2, ParamInit::Uniform { half_width: PI, seed }).unwrap()
    }

    #[test]
    fn single_z_two_layers() {
        let h = PauliSum::from_real_terms(1, &[("Z", 1.0)]).unwrap();
        let a = build_hva(&h, 2, ParamInit::Zero).unwrap();
        assert_eq!(a.generators(), &[ps("Z"), ps("Z")]);
        assert_eq!(a.num_params(), 2);
    }

    #[test]
    fn drops_identity_and_many_body_terms() {
        let h = PauliSum::from_real_terms(3, &[("III", 1.0), ("ZII", 0.5), ("XXI", 0.2), ("ZZZ", 0.1)]).unwrap();
        let a = build_hva(&h, 1, ParamInit::Zero).unwrap();
        assert_eq!(a.generators(), &[ps("ZII"), ps("XXI")]);
        let only_big = PauliSum::from_real_terms(3, &[("III", 1.0), ("ZZZ", 0.1)]).unwrap();
        assert!(matches!(
            build_hva(&only_big, 2, ParamInit::Zero),
            Err(Error::EmptyAnsatz)
        ));
    }

    #[test]
    fn generator_order_weight_then_lexicographic() {
        let h = PauliSum::from_real_terms(3, &[("ZZI", 1.0), ("IIX", 1.0), ("XIX", 1.0), ("ZII", 1.0)]).unwrap();
        let a = build_hva(&h, 2, ParamInit::Zero).unwrap();
        let s: Vec<String> = a.generators().iter().map(|g| g.to_string()).collect();
        assert_eq!(s, ["IIX", "ZII", "XIX", "ZZI", "IIX", "ZII", "XIX", "ZZI"]);
    }

    #[test]
    fn zero_params_leave_reference() {
        let mut a = random_ansatz(1);
        a.set_params(vec![0.0; a.num_params()]);
        assert_eq!(a.prepare(), prepare_plus(3));
    }

    #[test]
    fn single_x_half_pi_from_zero() {
        let a = Ansatz::new(1, vec![ps("X")], vec![PI / 2.0], 1, Reference::Basis(0)).unwrap();
        let s = a.prepare();
        assert_abs_diff_eq!(s.amplitudes()[0].norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            (s.amplitudes()[1] - Complex64::new(0.0, 1.0)).norm(),
            0.0,
            epsilon = 1e-15
        );
        let d = a.derivative_state(0).unwrap();
        assert_abs_diff_eq!(d.norm(), 1.0, epsilon = 1e-15);
        // iX e^{iθX}|0> at θ=π/2: iX(i|1>) = -|0>
        assert_abs_diff_eq!((d.amplitudes()[0] + 1.0).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn derivatives_match_central_differences() {
        let a = random_ansatz(4);
        let h = 1e-4;
        let (_, derivs) = a.state_and_derivatives(a.params());
        for k in 0..a.num_params() {
            let mut plus = a.params().to_vec();
            plus[k] += h;
            let mut minus = a.params().to_vec();
            minus[k] -= h;
            let sp = a.prepare_at(&plus);
            let sm = a.prepare_at(&minus);
            let direct = a.derivative_state(k).unwrap();
            let mut err: f64 = 0.0;
            for b in 0..8 {
                let fd = (sp.amplitudes()[b] - sm.amplitudes()[b]) / (2.0 * h);
                err += (fd - direct.amplitudes()[b]).norm_sqr();
                assert_abs_diff_eq!((derivs[k][b] - direct.amplitudes()[b]).norm(), 0.0, epsilon = 1e-12);
            }
            assert!(err.sqrt() <= 1e-6, "k={k}: {}", err.sqrt());
            assert_abs_diff_eq!(direct.norm(), 1.0, epsilon = 1e-12);
        }
        assert!(a.derivative_state(a.num_params()).is_err());
    }

    #[test]
    fn two_pi_periodic_up_to_phase() {
        let a = random_ansatz(8);
        let s = a.prepare();
        for k in 0..a.num_params() {
            let mut p = a.params().to_vec();
            p[k] += 2.0 * PI;
            assert_abs_diff_eq!(s.inner(&a.prepare_at(&p)).norm(), 1.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(s.norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn manifest_roundtrip() {
        let a = random_ansatz(2);
        let back = Ansatz::from_manifest(&a.to_manifest()).unwrap();
        assert_eq!(back, a);
        assert!(Ansatz::from_manifest("layers 2\nXII 0.1\n").is_err());
        assert!(Ansatz::from_manifest("qubits 3\nXYZ 0.1\n").is_err());
    }
}
