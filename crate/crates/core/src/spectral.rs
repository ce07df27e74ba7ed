//! Low-lying eigenstates: dense diagonalization and variational deflation.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ansatz::{build_hva, Ansatz, ParamInit, Reference};
use crate::dvr::{sorted_eigh, GridOperator};
use crate::error::{Error, Result};
use crate::pauli::{PauliString, PauliSum};
use crate::sim::{expectation_with, inner, overlap_sq_with, RotationCircuit, Sampler, ShotConfig};
use crate::variational::{
    assemble_f_hadamard, assemble_m_hadamard, imaginary_time_minimize, Hamiltonian, ImagTimeOptions, ImagTimeResult,
    McLachlanSystem,
};

/// Maximum residual `‖Hv − Ev‖` accepted from the dense solver.
pub const RESIDUAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    DenseOracle,
    Vqd,
}

/// Ascending eigenvalues with their (dense) eigenvectors, optionally with the
/// ansatz that prepares each state.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSet {
    pub energies: Vec<f64>,
    pub states: Vec<Vec<Complex64>>,
    pub provenance: Provenance,
    pub ansatze: Vec<Ansatz>,
}

#[derive(Serialize, Deserialize)]
struct EigenManifest {
    provenance: Provenance,
    energies: Vec<f64>,
    /// Each state as `[[re, im], ...]`.
    states: Vec<Vec<[f64; 2]>>,
    #[serde(default)]
    ansatze: Vec<String>,
}

impl EigenSet {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states.first().map_or(0, Vec::len)
    }

    /// Largest `|<ψ_i|ψ_j>|²` over distinct pairs.
    pub fn max_overlap_sq(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                worst = worst.max(inner(&self.states[i], &self.states[j]).norm_sqr());
            }
        }
        worst
    }

    /// Keeps only the lowest `n` states.
    pub fn truncated(&self, n: usize) -> Self {
        let n = n.min(self.len());
        Self {
            energies: self.energies[..n].to_vec(),
            states: self.states[..n].to_vec(),
            provenance: self.provenance,
            ansatze: self.ansatze.iter().take(n).cloned().collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let m = EigenManifest {
            provenance: self.provenance,
            energies: self.energies.clone(),
            states: self
                .states
                .iter()
                .map(|s| s.iter().map(|a| [a.re, a.im]).collect())
                .collect(),
            ansatze: self.ansatze.iter().map(Ansatz::to_manifest).collect(),
        };
        serde_json::to_string_pretty(&m).expect("eigen manifest serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: EigenManifest = serde_json::from_str(text).map_err(|e| Error::Parse(format!("eigen manifest: {e}")))?;
        if m.energies.len() != m.states.len() {
            return Err(Error::Parse(format!(
                "eigen manifest has {} energies but {} states",
                m.energies.len(),
                m.states.len()
            )));
        }
        let ansatze = m
            .ansatze
            .iter()
            .map(|t| Ansatz::from_manifest(t))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            energies: m.energies,
            states: m
                .states
                .into_iter()
                .map(|s| s.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
                .collect(),
            provenance: m.provenance,
            ansatze,
        })
    }
}

/// Lowest `count` eigenpairs of a dense real symmetric matrix.
pub fn dense_eigensolve_matrix(h: &DMatrix<f64>, count: usize) -> Result<EigenSet> {
    let n = h.nrows();
    if count == 0 || count > n {
        return Err(Error::InvalidArgument(format!(
            "cannot take {count} eigenpairs of a {n}x{n} matrix"
        )));
    }
    let (values, vectors) = sorted_eigh(h);
    let mut states = Vec::with_capacity(count);
    for k in 0..count {
        let v = vectors.column(k).into_owned();
        let residual = (h * &v - &v * values[k]).norm();
        if residual > RESIDUAL_TOL {
            return Err(Error::SolveFailed(format!("eigenpair {k} residual {residual:e}")));
        }
        states.push(v.iter().map(|&x| Complex64::new(x, 0.0)).collect());
    }
    Ok(EigenSet {
        energies: values[..count].to_vec(),
        states,
        provenance: Provenance::DenseOracle,
        ansatze: Vec::new(),
    })
}

pub fn dense_eigensolve(h: &GridOperator, count: usize) -> Result<EigenSet> {
    dense_eigensolve_matrix(&h.to_dense()?, count)
}

/// Gershgorin enclosure `[lo, hi]` of the spectrum of a Hermitian matrix.
pub fn gershgorin_bounds(h: &DMatrix<Complex64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..h.nrows() {
        let radius: f64 = (0..h.ncols()).filter(|&j| j != i).map(|j| h[(i, j)].norm()).sum();
        lo = lo.min(h[(i, i)].re - radius);
        hi = hi.max(h[(i, i)].re + radius);
    }
    (lo, hi)
}

/// Spectral enclosure from the Pauli 1-norm, usable at any size.
pub fn pauli_bounds(h: &PauliSum) -> (f64, f64) {
    let mut centre = 0.0;
    let mut radius = 0.0;
    for (p, c) in h.iter() {
        if p.is_identity() {
            centre += c.re;
        } else {
            radius += c.norm();
        }
    }
    (centre - radius, centre + radius)
}

/// Penalty weight `2 (hi − lo)`: larger than any gap inside the enclosure.
pub fn default_beta(h: &PauliSum) -> f64 {
    let (lo, hi) = if h.num_qubits() <= 12 {
        gershgorin_bounds(&h.to_dense())
    } else {
        pauli_bounds(h)
    };
    2.0 * (hi - lo)
}

/// A previously found state that later searches are pushed away from.
#[derive(Debug, Clone, PartialEq)]
pub struct Deflation {
    pub state: Vec<Complex64>,
    pub circuit: Option<RotationCircuit>,
    pub beta: f64,
}

/// `H_k = H_0 + Σ β_i |ψ_i><ψ_i|`.
#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyHamiltonian {
    pub base: PauliSum,
    pub deflation: Vec<Deflation>,
}

impl PenaltyHamiltonian {
    pub fn new(base: PauliSum) -> Result<Self> {
        base.ensure_hermitian()?;
        Ok(Self {
            base,
            deflation: Vec::new(),
        })
    }

    pub fn push(&mut self, d: Deflation) -> Result<()> {
        if !(d.beta > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "penalty weight must be positive, got {}",
                d.beta
            )));
        }
        if d.state.len() != 1 << self.base.num_qubits() {
            return Err(Error::DimensionMismatch(format!(
                "deflated state has {} amplitudes, Hamiltonian acts on {}",
                d.state.len(),
                1usize << self.base.num_qubits()
            )));
        }
        self.deflation.push(d);
        Ok(())
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = self.base.to_dense();
        for d in &self.deflation {
            let v = nalgebra::DVector::from_column_slice(&d.state);
            m += &v * v.adjoint() * Complex64::new(d.beta, 0.0);
        }
        m
    }

    /// `<H_k>` with `<H_0>` measured term by term and each penalty overlap
    /// measured by projecting `U_i† U(θ)|ref>` onto the reference.
    pub fn measured_energy(&self, ansatz: &Ansatz, params: &[f64], sampler: &mut Sampler) -> Result<f64> {
        let mut e = expectation_with(&ansatz.prepare_at(params), &self.base, sampler)?;
        let reference = ansatz.reference_state();
        let current = ansatz.circuit_at(params);
        for d in &self.deflation {
            let circuit = d.circuit.as_ref().ok_or_else(|| {
                Error::InvalidArgument("measured penalty needs the circuit of every deflated state".into())
            })?;
            e += d.beta * overlap_sq_with(&reference, circuit, &current, sampler)?;
        }
        Ok(e)
    }
}

impl Hamiltonian for PenaltyHamiltonian {
    fn num_qubits(&self) -> usize {
        self.base.num_qubits()
    }

    fn apply_at(&self, _t: f64, psi: &[Complex64]) -> Vec<Complex64> {
        let mut out = self.base.apply(psi);
        for d in &self.deflation {
            let w = inner(&d.state, psi) * d.beta;
            for (o, s) in out.iter_mut().zip(&d.state) {
                *o += s * w;
            }
        }
        out
    }
}

/// Shot-based McLachlan system for a penalty Hamiltonian: Hadamard tests for
/// `M` and the `H_0` part of `f`; parameter-shift differences of measured
/// overlaps for the penalty part of `Re f`.
pub fn measured_penalty_system(
    h: &PenaltyHamiltonian,
    ansatz: &Ansatz,
    params: &[f64],
    sampler: &mut Sampler,
) -> Result<McLachlanSystem> {
    let m = assemble_m_hadamard(ansatz, params, sampler)?;
    let mut f = assemble_f_hadamard(ansatz, params, &h.base, sampler)?;
    if !h.deflation.is_empty() {
        let reference = ansatz.reference_state();
        let shift = std::f64::consts::FRAC_PI_4;
        for k in 0..params.len() {
            let mut plus = params.to_vec();
            plus[k] += shift;
            let mut minus = params.to_vec();
            minus[k] -= shift;
            let (cp, cm) = (ansatz.circuit_at(&plus), ansatz.circuit_at(&minus));
            for d in &h.deflation {
                let circuit = d.circuit.as_ref().ok_or_else(|| {
                    Error::InvalidArgument("measured penalty needs the circuit of every deflated state".into())
                })?;
                let grad = overlap_sq_with(&reference, circuit, &cp, sampler)?
                    - overlap_sq_with(&reference, circuit, &cm, sampler)?;
                f[k] += Complex64::new(0.5 * d.beta * grad, 0.0);
            }
        }
    }
    let energy = h.measured_energy(ansatz, params, sampler)?;
    Ok(McLachlanSystem { m, f, energy })
}

/// Settings for sequential variational deflation.
#[derive(Debug, Clone, PartialEq)]
pub struct VqdOptions {
    pub layers: usize,
    pub imag: ImagTimeOptions,
    pub seed: u64,
    pub half_width: f64,
    /// Extra seeded attempts after a failed search.
    pub restarts: usize,
    /// Oracle energies; a state whose energy exceeds its oracle value by more
    /// than `tolerance` counts as not converged.
    pub reference_energies: Option<Vec<f64>>,
    pub tolerance: f64,
    pub shots: ShotConfig,
    /// Per-layer generators replacing the Hamiltonian-derived ones.
    pub generators: Option<Vec<PauliString>>,
}

impl Default for VqdOptions {
    fn default() -> Self {
        Self {
            layers: 2,
            imag: ImagTimeOptions::default(),
            seed: 7,
            half_width: 0.01,
            restarts: 3,
            reference_energies: None,
            tolerance: 1e-4,
            shots: ShotConfig::exact(),
            generators: None,
        }
    }
}

/// Diagnostics of one deflation search.
#[derive(Debug, Clone, PartialEq)]
pub struct VqdRecord {
    pub energy: f64,
    pub penalized_energy: f64,
    pub attempts: usize,
    pub run: ImagTimeResult,
}

/// Finds `count` states one after another as imaginary-time minima of the
/// penalty Hamiltonian, each recorded with its `<H_0>`.
pub fn vqd_find(h0: &PauliSum, count: usize, betas: &[f64], opts: &VqdOptions) -> Result<(EigenSet, Vec<VqdRecord>)> {
    if betas.len() + 1 < count {
        return Err(Error::InvalidArgument(format!(
            "{count} states need {} penalty weights, got {}",
            count - 1,
            betas.len()
        )));
    }
    let mut penalty = PenaltyHamiltonian::new(h0.clone())?;
    let mut set = EigenSet {
        energies: Vec::new(),
        states: Vec::new(),
        provenance: Provenance::Vqd,
        ansatze: Vec::new(),
    };
    let mut records = Vec::new();
    let mut sampler = opts.shots.sampler();
    for k in 0..count {
        let mut best: Option<(Ansatz, VqdRecord)> = None;
        for attempt in 0..=opts.restarts {
            let init = ParamInit::Uniform {
                half_width: opts.half_width,
                seed: opts.seed.wrapping_add(1000 * k as u64 + attempt as u64),
            };
            let ansatz = match &opts.generators {
                None => build_hva(h0, opts.layers, init)?,
                Some(g) => {
                    let gens: Vec<PauliString> = (0..opts.layers).flat_map(|_| g.iter().copied()).collect();
                    let params = init.draw(gens.len());
                    Ansatz::new(h0.num_qubits(), gens, params, opts.layers, Reference::Plus)?
                }
            };
            let run = if opts.shots.is_exact() {
                imaginary_time_minimize(ansatz.params(), &opts.imag, |p| {
                    McLachlanSystem::direct(&ansatz, p, &penalty, 0.0)
                })?
            } else {
                imaginary_time_minimize(ansatz.params(), &opts.imag, |p| {
                    measured_penalty_system(&penalty, &ansatz, p, &mut sampler)
                })?
            };
            let found = ansatz.with_params(run.params.clone());
            let energy = crate::variational::energy(&found, found.params(), h0, 0.0);
            let record = VqdRecord {
                energy,
                penalized_energy: run.energy,
                attempts: attempt + 1,
                run,
            };
            let ok = match &opts.reference_energies {
                Some(r) => r.get(k).is_none_or(|e| energy - e <= opts.tolerance),
                None => true,
            };
            let better = best
                .as_ref()
                .is_none_or(|(_, b)| record.penalized_energy < b.penalized_energy);
            if better {
                best = Some((found, record));
            }
            if ok {
                break;
            }
        }
        let (found, record) = best.expect("at least one attempt runs");
        if let Some(r) = &opts.reference_energies {
            if let Some(&e) = r.get(k) {
                if record.energy - e > opts.tolerance {
                    return Err(Error::NotConverged {
                        state: k,
                        energy: record.energy,
                        reference: e,
                        tolerance: opts.tolerance,
                        iterations: record.run.iterations,
                    });
                }
            }
        }
        let state = found.prepare().into_amplitudes();
        if k + 1 < count {
            penalty.push(Deflation {
                state: state.clone(),
                circuit: Some(found.circuit()),
                beta: betas[k],
            })?;
        }
        set.energies.push(record.energy);
        set.states.push(state);
        set.ansatze.push(found);
        records.push(record);
    }
    Ok((set, records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dvr::DvrGrid;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn two_point_kinetic_spectrum() {
        let grid = DvrGrid::uniform(1, 2, 0.0, 1.0, 1.0).unwrap();
        let t = crate::dvr::build_kinetic_1d(&grid, 0).unwrap();
        let e = dense_eigensolve(&t, 2).unwrap();
        assert_abs_diff_eq!(e.energies[0], PI * PI / 6.0 - 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e.energies[1], PI * PI / 6.0 + 1.0, epsilon = 1e-12);
        assert!(e.max_overlap_sq() < 1e-20);
        assert!(dense_eigensolve(&t, 3).is_err());
    }

    #[test]
    fn vqd_single_z() {
        let h = PauliSum::from_real_terms(1, &[("Z", 1.0)]).unwrap();
        let opts = VqdOptions {
            imag: ImagTimeOptions {
                step: 0.2,
                ..Default::default()
            },
            generators: Some(vec!["Y".parse().unwrap()]),
            reference_energies: Some(vec![-1.0, 1.0]),
            ..Default::default()
        };
        let (set, records) = vqd_find(&h, 2, &[3.0], &opts).unwrap();
        assert_abs_diff_eq!(set.energies[0], -1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(set.energies[1], 1.0, epsilon = 1e-6);
        assert!(set.states[0][1].norm_sqr() > 1.0 - 1e-6);
        assert!(set.states[1][0].norm_sqr() > 1.0 - 1e-6);
        assert!(set.max_overlap_sq() < 1e-6);
        for r in &records {
            assert!(r.run.energies.windows(2).all(|w| w[1] <= w[0]));
        }
    }

    #[test]
    fn vqd_reports_unreachable_target() {
        // a Z-only ansatz cannot leave |+>, so <Z> stays at 0
        let h = PauliSum::from_real_terms(1, &[("Z", 1.0)]).unwrap();
        let opts = VqdOptions {
            reference_energies: Some(vec![-1.0]),
            restarts: 1,
            ..Default::default()
        };
        match vqd_find(&h, 1, &[], &opts) {
            Err(Error::NotConverged { state: 0, .. }) => {}
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn measured_penalty_system_matches_direct_in_exact_mode() {
        let h = PauliSum::from_real_terms(2, &[("ZI", 1.0), ("IZ", 0.3), ("XX", 0.2), ("XI", 0.4)]).unwrap();
        let a = build_hva(
            &h,
            2,
            ParamInit::Uniform {
                half_width: 1.0,
                seed: 5,
            },
        )
        .unwrap();
        let other = build_hva(
            &h,
            2,
            ParamInit::Uniform {
                half_width: 1.0,
                seed: 6,
            },
        )
        .unwrap();
        let mut p = PenaltyHamiltonian::new(h).unwrap();
        p.push(Deflation {
            state: other.prepare().into_amplitudes(),
            circuit: Some(other.circuit()),
            beta: 2.5,
        })
        .unwrap();
        let direct = McLachlanSystem::direct(&a, a.params(), &p, 0.0).unwrap();
        let measured = measured_penalty_system(&p, &a, a.params(), &mut ShotConfig::exact().sampler()).unwrap();
        assert!((&direct.m - &measured.m).amax() < 1e-10);
        assert_abs_diff_eq!(direct.energy, measured.energy, epsilon = 1e-10);
        for (x, y) in direct.f.iter().zip(&measured.f) {
            assert_abs_diff_eq!(x.re, y.re, epsilon = 1e-10);
        }
    }

    #[test]
    fn penalty_shifts_deflated_eigenvalue() {
        let h = PauliSum::from_real_terms(2, &[("ZI", 1.0), ("IZ", 0.3), ("XX", 0.2)]).unwrap();
        let dense = dense_eigensolve_matrix(&h.to_dense().map(|c| c.re), 4).unwrap();
        let mut p = PenaltyHamiltonian::new(h.clone()).unwrap();
        p.push(Deflation {
            state: dense.states[0].clone(),
            circuit: None,
            beta: 5.0,
        })
        .unwrap();
        let shifted = dense_eigensolve_matrix(&p.to_dense().map(|c| c.re), 4).unwrap();
        let mut expected = dense.energies.clone();
        expected[0] += 5.0;
        expected.sort_by(f64::total_cmp);
        for (a, b) in shifted.energies.iter().zip(&expected) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
        assert!(p
            .clone()
            .push(Deflation {
                state: dense.states[1].clone(),
                circuit: None,
                beta: 0.0
            })
            .is_err());
    }

    #[test]
    fn manifest_roundtrip() {
        let grid = DvrGrid::uniform(1, 4, -1.0, 1.0, 1.0).unwrap();
        let h = crate::dvr::assemble_hamiltonian(&grid, |x| x[0] * x[0]).unwrap();
        let e = dense_eigensolve(&h, 2).unwrap();
        let back = EigenSet::from_json(&e.to_json()).unwrap();
        assert_eq!(back, e);
        assert!(EigenSet::from_json("{").is_err());
    }

    #[test]
    fn bounds_enclose_spectrum() {
        let h = PauliSum::from_real_terms(2, &[("II", 0.5), ("ZI", 1.0), ("XY", -0.3), ("YY", 0.2)]).unwrap();
        let e = dense_eigensolve_matrix(&h.to_dense().map(|c| c.re), 4).unwrap();
        for (lo, hi) in [gershgorin_bounds(&h.to_dense()), pauli_bounds(&h)] {
            assert!(lo <= e.energies[0] + 1e-12 && e.energies[3] <= hi + 1e-12);
        }
        assert!(default_beta(&h) > e.energies[3] - e.energies[0]);
    }
}
