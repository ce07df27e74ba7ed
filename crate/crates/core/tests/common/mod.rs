//! Reference computations written from the model definitions with plain
//! dense linear algebra, sharing no code with the library under test.

#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
pub use num_complex::Complex64 as C;

pub const BOHR_PER_ANGSTROM: f64 = 1.8897261254578281;
pub const FS: f64 = 1.0 / 0.024188843265857;
pub const PROTON: f64 = 1836.15267343;

pub fn c(re: f64) -> C {
    C::new(re, 0.0)
}

pub fn kinetic(mass: f64, dx: f64, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| {
        let pre = 1.0 / (2.0 * mass * dx * dx);
        if i == j {
            pre * PI * PI / 3.0
        } else {
            let k = i.abs_diff(j) as f64;
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            pre * sign * 2.0 / (k * k)
        }
    })
}

pub fn points(half_width: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| -half_width + 2.0 * half_width * i as f64 / (n - 1) as f64)
        .collect()
}

/// Double-well Hamiltonian and coordinate values on its 8-point grid.
pub fn double_well() -> (DMatrix<f64>, Vec<f64>) {
    let (vb, delta, x0) = (0.00625, 0.000257, 1.0);
    let x = points(0.8 * BOHR_PER_ANGSTROM, 8);
    let dx = x[1] - x[0];
    let mut h = kinetic(PROTON, dx, 8);
    for (i, xi) in x.iter().enumerate() {
        h[(i, i)] +=
            delta / (2.0 * x0) * (xi - x0) + (vb - delta / 2.0) / x0.powi(4) * (xi - x0).powi(2) * (xi + x0).powi(2);
    }
    (h, x)
}

/// Double-well field (a.u.) at time `t` (a.u.).
pub fn double_well_field(t: f64) -> f64 {
    let (s1, s2, tf) = (150.0 * FS, 1250.0 * FS, 1500.0 * FS);
    let e0 = 0.00137;
    if t < 0.0 || t > tf {
        0.0
    } else if t <= s1 {
        e0 * (PI * t / (2.0 * s1)).sin().powi(2)
    } else if t < s2 {
        e0
    } else {
        e0 * (PI * (tf - t) / (2.0 * (tf - s2))).sin().powi(2)
    }
}

pub struct Helium {
    pub h: DMatrix<f64>,
    /// `x + y` at each flat grid index (first electron fastest).
    pub dipole: Vec<f64>,
    pub omega: f64,
    pub amplitude: f64,
}

pub fn helium() -> Helium {
    let n = 8;
    let a2: f64 = 0.7397 * 0.7397;
    let x = points(2.0 * BOHR_PER_ANGSTROM, n);
    let t = kinetic(1.0, x[1] - x[0], n);
    let eye = DMatrix::<f64>::identity(n, n);
    let mut h = eye.kronecker(&t) + t.kronecker(&eye);
    let mut dipole = vec![0.0; n * n];
    for j in 0..n {
        for i in 0..n {
            let k = i + n * j;
            let (xi, yj) = (x[i], x[j]);
            h[(k, k)] +=
                -2.0 / (xi * xi + a2).sqrt() - 2.0 / (yj * yj + a2).sqrt() + 1.0 / ((xi - yj).powi(2) + a2).sqrt();
            dipole[k] = xi + yj;
        }
    }
    Helium {
        h,
        dipole,
        omega: 0.3542 / 27.211386245988,
        amplitude: (3e12 / 3.50944758e16_f64).sqrt(),
    }
}

impl Helium {
    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega
    }

    pub fn field(&self, t: f64) -> f64 {
        let period = self.period();
        if t < 0.0 || t > 12.0 * period {
            return 0.0;
        }
        let env = if t <= 2.0 * period {
            (PI * t / (4.0 * period)).sin().powi(2)
        } else if t <= 10.0 * period {
            1.0
        } else {
            (PI * t / (4.0 * period) - 2.5 * PI).cos().powi(2)
        };
        self.amplitude * env * (self.omega * t).cos()
    }
}

/// Ascending eigenvalues and matching eigenvector columns.
pub fn eigh(h: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let e = h.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..e.eigenvalues.len()).collect();
    order.sort_by(|a, b| e.eigenvalues[*a].total_cmp(&e.eigenvalues[*b]));
    let vals = order.iter().map(|&k| e.eigenvalues[k]).collect();
    let vecs = DMatrix::from_fn(h.nrows(), h.ncols(), |i, j| e.eigenvectors[(i, order[j])]);
    (vals, vecs)
}

pub fn column(m: &DMatrix<f64>, k: usize) -> DVector<C> {
    m.column(k).map(c)
}

/// Full-grid propagation of `i ψ' = (H0 + ε(t) diag(mu)) ψ` by midpoint
/// exponentials, returning the state after each of `outputs` intervals of
/// length `dt_out` (plus the initial state).
pub fn propagate(
    h0: &DMatrix<f64>,
    mu: &[f64],
    field: impl Fn(f64) -> f64,
    psi0: DVector<C>,
    dt_out: f64,
    outputs: usize,
    substeps: usize,
) -> Vec<DVector<C>> {
    let dt = dt_out / substeps as f64;
    let mut psi = psi0;
    let mut out = vec![psi.clone()];
    for k in 0..outputs {
        for s in 0..substeps {
            let t = (k * substeps + s) as f64 * dt + dt / 2.0;
            let mut h = h0.clone();
            let e = field(t);
            for (i, m) in mu.iter().enumerate() {
                h[(i, i)] += e * m;
            }
            let (vals, vecs) = eigh(&h);
            let v = vecs.map(c);
            let mut proj = v.adjoint() * &psi;
            for (p, e) in proj.iter_mut().zip(&vals) {
                *p *= C::from_polar(1.0, -e * dt);
            }
            psi = &v * proj;
        }
        out.push(psi.clone());
    }
    out
}

pub fn pauli_1q(letter: char) -> DMatrix<C> {
    let (o, i) = (c(0.0), C::new(0.0, 1.0));
    match letter {
        'I' => DMatrix::from_row_slice(2, 2, &[c(1.0), o, o, c(1.0)]),
        'X' => DMatrix::from_row_slice(2, 2, &[o, c(1.0), c(1.0), o]),
        'Y' => DMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        'Z' => DMatrix::from_row_slice(2, 2, &[c(1.0), o, o, c(-1.0)]),
        other => panic!("not a Pauli letter: {other}"),
    }
}

/// Dense matrix of a word whose first letter acts on the least significant qubit.
pub fn pauli_word(word: &str) -> DMatrix<C> {
    let mut m = DMatrix::from_element(1, 1, c(1.0));
    for ch in word.chars() {
        m = pauli_1q(ch).kronecker(&m);
    }
    m
}

/// All words on `n` qubits with between 1 and `max_weight` non-identity letters.
pub fn words(n: usize, max_weight: usize) -> Vec<String> {
    let mut out = Vec::new();
    for code in 1..4usize.pow(n as u32) {
        let word: String = (0..n)
            .map(|q| ['I', 'X', 'Y', 'Z'][(code / 4usize.pow(q as u32)) % 4])
            .collect();
        let weight = word.chars().filter(|ch| *ch != 'I').count();
        if weight <= max_weight {
            out.push(word);
        }
    }
    out
}

pub fn plus_state(n: usize) -> DVector<C> {
    let d = 1 << n;
    DVector::from_element(d, c(1.0 / (d as f64).sqrt()))
}

/// `e^{iθR}` for an involutory `R`.
pub fn rotation(r: &DMatrix<C>, theta: f64) -> DMatrix<C> {
    let n = r.nrows();
    DMatrix::<C>::identity(n, n) * c(theta.cos()) + r * C::new(0.0, theta.sin())
}

/// `ψ(θ) = Π_k e^{iθ_k R_k} ψ0`, `k = 0` applied first.
pub fn ansatz_state(gens: &[DMatrix<C>], theta: &[f64], psi0: &DVector<C>) -> DVector<C> {
    let mut psi = psi0.clone();
    for (r, t) in gens.iter().zip(theta) {
        psi = rotation(r, *t) * psi;
    }
    psi
}

/// `∂ψ/∂θ_k` for every `k`.
pub fn ansatz_derivatives(gens: &[DMatrix<C>], theta: &[f64], psi0: &DVector<C>) -> Vec<DVector<C>> {
    (0..gens.len())
        .map(|k| {
            let mut psi = psi0.clone();
            for (j, (r, t)) in gens.iter().zip(theta).enumerate() {
                psi = rotation(r, *t) * psi;
                if j == k {
                    psi = r * psi * C::new(0.0, 1.0);
                }
            }
            psi
        })
        .collect()
}

pub fn expectation(h: &DMatrix<C>, psi: &DVector<C>) -> f64 {
    psi.dotc(&(h * psi)).re
}
