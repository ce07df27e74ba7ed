//! Pauli strings and weighted Pauli sums under the binary grid encoding.
//!
//! Qubit 0 is the least significant bit of a basis index. Letter strings are
//! written with qubit 0 first, so `"XZI"` is X on qubit 0 and Z on qubit 1.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::dvr::{GridOperator, GridTerm, DENSE_CAP};
use crate::error::{Error, Result};

/// Coefficients below this magnitude are dropped from sums.
pub const PRUNE_THRESHOLD: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn rank(self) -> u8 {
        self as u8
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// `i^k`.
fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Phase-free tensor product of single-qubit Paulis on up to 64 qubits,
/// stored as X and Z bit masks (Y sets both).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: u64,
    z: u64,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        assert!(n <= 64, "at most 64 qubits");
        Self { n, x: 0, z: 0 }
    }

    pub fn from_masks(n: usize, x: u64, z: u64) -> Self {
        assert!(n <= 64, "at most 64 qubits");
        let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        Self {
            n,
            x: x & mask,
            z: z & mask,
        }
    }

    pub fn from_letters(letters: &[Pauli]) -> Self {
        let mut s = Self::identity(letters.len());
        for (q, p) in letters.iter().enumerate() {
            s = s.with(q, *p);
        }
        s
    }

    /// Single non-identity letter on qubit `q`.
    pub fn single(n: usize, q: usize, p: Pauli) -> Self {
        Self::identity(n).with(q, p)
    }

    pub fn with(mut self, q: usize, p: Pauli) -> Self {
        assert!(q < self.n);
        let (x, z) = p.bits();
        self.x = (self.x & !(1 << q)) | ((x as u64) << q);
        self.z = (self.z & !(1 << q)) | ((z as u64) << q);
        self
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn letter(&self, q: usize) -> Pauli {
        Pauli::from_bits(self.x >> q & 1 == 1, self.z >> q & 1 == 1)
    }

    pub fn letters(&self) -> Vec<Pauli> {
        (0..self.n).map(|q| self.letter(q)).collect()
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn is_diagonal(&self) -> bool {
        self.x == 0
    }

    fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// `P|b> = phase(b) |b ^ x>`.
    #[inline]
    pub fn phase_on(&self, b: usize) -> Complex64 {
        let sign = ((b as u64) & self.z).count_ones();
        i_pow(self.y_count() + 2 * (sign & 1))
    }

    /// Applies the string to a state vector.
    pub fn apply(&self, state: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; state.len()];
        self.apply_add(state, Complex64::new(1.0, 0.0), &mut out);
        out
    }

    /// `out += coeff * P state`.
    pub fn apply_add(&self, state: &[Complex64], coeff: Complex64, out: &mut [Complex64]) {
        let x = self.x as usize;
        let base = i_pow(self.y_count()) * coeff;
        let neg = -base;
        let z = self.z;
        for (b, amp) in state.iter().enumerate() {
            let c = if ((b as u64) & z).count_ones() & 1 == 0 {
                base
            } else {
                neg
            };
            out[b ^ x] += c * amp;
        }
    }

    /// Product `self * other` as `(phase, string)` with phase in {±1, ±i}.
    pub fn mul(&self, other: &PauliString) -> (Complex64, PauliString) {
        assert_eq!(self.n, other.n, "qubit counts differ");
        let r = PauliString {
            n: self.n,
            x: self.x ^ other.x,
            z: self.z ^ other.z,
        };
        // phase from P1 P2 |0> = ph2(0) ph1(x2) |x1 ^ x2>, divided by ph_r(0)
        let k = self.y_count() + other.y_count() + 2 * ((other.x & self.z).count_ones() & 1);
        let k = (k + 4 * 64 - r.y_count()) % 4;
        (i_pow(k), r)
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()).is_multiple_of(2)
    }

    /// Embeds this string into a larger register starting at qubit `offset`.
    pub fn embed(&self, total: usize, offset: usize) -> PauliString {
        assert!(offset + self.n <= total);
        PauliString::from_masks(total, self.x << offset, self.z << offset)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.n;
        let mut m = DMatrix::from_element(dim, dim, ZERO);
        for b in 0..dim {
            m[(b ^ self.x as usize, b)] = self.phase_on(b);
        }
        m
    }
}

impl Ord for PauliString {
    /// Lexicographic on the letter string (qubit 0 first), `I < X < Y < Z`.
    fn cmp(&self, other: &Self) -> Ordering {
        self.n.cmp(&other.n).then_with(|| {
            for q in 0..self.n {
                let o = self.letter(q).rank().cmp(&other.letter(q).rank());
                if o != Ordering::Equal {
                    return o;
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n {
            write!(f, "{}", self.letter(q).as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|c| match c {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::Parse(format!("invalid Pauli letter `{other}`"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if letters.len() > 64 {
            return Err(Error::Parse("at most 64 qubits".into()));
        }
        Ok(PauliString::from_letters(&letters))
    }
}

/// Weighted sum of Pauli strings over a fixed register.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n: usize,
    terms: BTreeMap<PauliString, Complex64>,
}

impl PauliSum {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms<I>(n: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (PauliString, Complex64)>,
    {
        let mut s = Self::new(n);
        for (p, c) in terms {
            s.add(p, c);
        }
        s.prune(PRUNE_THRESHOLD);
        s
    }

    pub fn from_real_terms(n: usize, terms: &[(&str, f64)]) -> Result<Self> {
        let mut s = Self::new(n);
        for (letters, c) in terms {
            let p: PauliString = letters.parse()?;
            if p.num_qubits() != n {
                return Err(Error::QubitMismatch {
                    expected: n,
                    got: p.num_qubits(),
                });
            }
            s.add(p, Complex64::new(*c, 0.0));
        }
        s.prune(PRUNE_THRESHOLD);
        Ok(s)
    }

    pub fn single(p: PauliString, c: f64) -> Self {
        Self::from_terms(p.num_qubits(), [(p, Complex64::new(c, 0.0))])
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Accumulates a term without pruning.
    pub fn add(&mut self, p: PauliString, c: Complex64) {
        assert_eq!(p.num_qubits(), self.n, "qubit counts differ");
        *self.terms.entry(p).or_insert(ZERO) += c;
    }

    pub fn prune(&mut self, threshold: f64) {
        self.terms.retain(|_, c| c.norm() >= threshold);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliString, &Complex64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, p: &PauliString) -> Complex64 {
        self.terms.get(p).copied().unwrap_or(ZERO)
    }

    /// Largest imaginary part among the coefficients.
    pub fn max_imag(&self) -> f64 {
        self.terms.values().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_imag() <= tol
    }

    pub fn ensure_hermitian(&self) -> Result<()> {
        if self.is_hermitian(1e-10) {
            Ok(())
        } else {
            Err(Error::NotHermitian(self.max_imag()))
        }
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self::from_terms(self.n, self.terms.iter().map(|(p, c)| (*p, c * factor)))
    }

    pub fn plus(&self, other: &PauliSum) -> Self {
        assert_eq!(self.n, other.n);
        let mut s = self.clone();
        for (p, c) in &other.terms {
            s.add(*p, *c);
        }
        s.prune(PRUNE_THRESHOLD);
        s
    }

    pub fn product(&self, other: &PauliSum) -> Self {
        assert_eq!(self.n, other.n);
        let mut s = Self::new(self.n);
        for (p, a) in &self.terms {
            for (q, b) in &other.terms {
                let (phase, r) = p.mul(q);
                s.add(r, phase * a * b);
            }
        }
        s.prune(PRUNE_THRESHOLD);
        s
    }

    /// Re-homes every string onto a `total`-qubit register at `offset`.
    pub fn embed(&self, total: usize, offset: usize) -> Self {
        Self::from_terms(total, self.terms.iter().map(|(p, c)| (p.embed(total, offset), *c)))
    }

    pub fn apply(&self, state: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(state.len(), 1 << self.n, "state length mismatch");
        let mut out = vec![ZERO; state.len()];
        for (p, c) in &self.terms {
            p.apply_add(state, *c, &mut out);
        }
        out
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.n;
        let mut m = DMatrix::from_element(dim, dim, ZERO);
        for (p, c) in &self.terms {
            for b in 0..dim {
                m[(b ^ p.x_mask() as usize, b)] += c * p.phase_on(b);
            }
        }
        m
    }

    /// Serializes as `coeff_re coeff_im LETTERS` lines.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (p, c) in &self.terms {
            out.push_str(&format!("{:e} {:e} {}\n", c.re, c.im, p));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut n = None;
        let mut terms = Vec::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(Error::Parse(format!("line {}: expected `re im LETTERS`", k + 1)));
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", k + 1)))
            };
            let p: PauliString = fields[2].parse()?;
            match n {
                None => n = Some(p.num_qubits()),
                Some(n) if n != p.num_qubits() => {
                    return Err(Error::QubitMismatch {
                        expected: n,
                        got: p.num_qubits(),
                    })
                }
                _ => {}
            }
            terms.push((p, Complex64::new(parse(fields[0])?, parse(fields[1])?)));
        }
        let n = n.ok_or_else(|| Error::Parse("no terms".into()))?;
        Ok(Self::from_terms(n, terms))
    }
}

/// Little-endian bits `(k_1, ..., k_N)` of grid index `m`.
pub fn encode_index(m: usize, n: usize) -> Result<Vec<u8>> {
    if n >= usize::BITS as usize || m >= (1usize << n) {
        return Err(Error::IndexOutOfRange { index: m, qubits: n });
    }
    Ok((0..n).map(|q| ((m >> q) & 1) as u8).collect())
}

/// Pauli expansion of `|x_m><x_n|` on `qubits` qubits; always `2^qubits` terms.
pub fn encode_projector(m: usize, n: usize, qubits: usize) -> Result<PauliSum> {
    let km = encode_index(m, qubits)?;
    let kn = encode_index(n, qubits)?;
    let half = Complex64::new(0.5, 0.0);
    let i_half = Complex64::new(0.0, 0.5);
    // |a><b| = Σ c_P P per qubit
    let factors: Vec<[(Pauli, Complex64); 2]> = km
        .iter()
        .zip(&kn)
        .map(|(&a, &b)| match (a, b) {
            (0, 0) => [(Pauli::I, half), (Pauli::Z, half)],
            (1, 1) => [(Pauli::I, half), (Pauli::Z, -half)],
            (0, 1) => [(Pauli::X, half), (Pauli::Y, i_half)],
            _ => [(Pauli::X, half), (Pauli::Y, -i_half)],
        })
        .collect();
    let mut out = PauliSum::new(qubits);
    for choice in 0..(1usize << qubits) {
        let mut p = PauliString::identity(qubits);
        let mut c = Complex64::new(1.0, 0.0);
        for (q, f) in factors.iter().enumerate() {
            let (letter, coeff) = f[(choice >> q) & 1];
            p = p.with(q, letter);
            c *= coeff;
        }
        out.add(p, c);
    }
    Ok(out)
}

/// In-place fast Walsh-Hadamard transform (unnormalized).
pub fn walsh_hadamard(values: &mut [f64]) {
    let n = values.len();
    let mut h = 1;
    while h < n {
        for start in (0..n).step_by(2 * h) {
            for k in start..start + h {
                let (a, b) = (values[k], values[k + h]);
                values[k] = a + b;
                values[k + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// Expands a real diagonal over `{I, Z}^N`.
pub fn expand_diagonal(values: &[f64]) -> Result<PauliSum> {
    let len = values.len();
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(len));
    }
    let n = len.trailing_zeros() as usize;
    let mut w = values.to_vec();
    walsh_hadamard(&mut w);
    let scale = 1.0 / len as f64;
    Ok(PauliSum::from_terms(
        n,
        w.into_iter()
            .enumerate()
            .map(|(s, c)| (PauliString::from_masks(n, 0, s as u64), Complex64::new(c * scale, 0.0))),
    ))
}

/// Pauli coefficients of an arbitrary `2^N x 2^N` matrix, `c_P = Tr(P† A) / 2^N`,
/// via one Walsh-Hadamard transform per X mask.
pub fn decompose_dense(a: &DMatrix<Complex64>) -> Result<PauliSum> {
    let dim = a.nrows();
    if dim != a.ncols() || !dim.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(dim));
    }
    if dim > DENSE_CAP {
        return Err(Error::DenseCapExceeded { dim, cap: DENSE_CAP });
    }
    let n = dim.trailing_zeros() as usize;
    let scale = 1.0 / dim as f64;
    let mut out = PauliSum::new(n);
    let mut re = vec![0.0; dim];
    let mut im = vec![0.0; dim];
    for x in 0..dim {
        for b in 0..dim {
            let v = a[(b ^ x, b)];
            re[b] = v.re;
            im[b] = v.im;
        }
        walsh_hadamard(&mut re);
        walsh_hadamard(&mut im);
        for z in 0..dim {
            let p = PauliString::from_masks(n, x as u64, z as u64);
            // conj(i^ny) factor from P†
            let c = Complex64::new(re[z], im[z]) * i_pow(p.y_count()).conj() * scale;
            if c.norm() >= PRUNE_THRESHOLD {
                out.add(p, c);
            }
        }
    }
    Ok(out)
}

/// Encodes a grid operator as a Pauli sum on `d * log2(L)` qubits.
///
/// Diagonal terms go through [`expand_diagonal`]; kinetic blocks are expanded
/// entry by entry through [`encode_projector`] on their dimension's qubit block.
pub fn encode_operator(op: &GridOperator) -> Result<PauliSum> {
    let size = op.size();
    if size > DENSE_CAP {
        return Err(Error::DenseCapExceeded {
            dim: size,
            cap: DENSE_CAP,
        });
    }
    let total = op.num_qubits();
    let block_qubits = op.points_per_dim().trailing_zeros() as usize;
    let mut out = PauliSum::new(total);
    for term in op.terms() {
        let part = match term {
            GridTerm::Diagonal(v) => expand_diagonal(v)?,
            GridTerm::Kinetic1d { dim, block } => {
                let mut local = PauliSum::new(block_qubits);
                for i in 0..block.nrows() {
                    for j in 0..block.ncols() {
                        let v = block[(i, j)];
                        if v == 0.0 {
                            continue;
                        }
                        for (p, c) in encode_projector(i, j, block_qubits)?.iter() {
                            local.add(*p, c * v);
                        }
                    }
                }
                local.prune(PRUNE_THRESHOLD);
                local.embed(total, dim * block_qubits)
            }
            GridTerm::Dense(m) => decompose_dense(&m.map(|v| Complex64::new(v, 0.0)))?,
        };
        for (p, c) in part.iter() {
            out.add(*p, *c);
        }
    }
    out.prune(PRUNE_THRESHOLD);
    Ok(out)
}
