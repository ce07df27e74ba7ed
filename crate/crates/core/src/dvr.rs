//! Colbert-Miller discrete variable representation on uniform Cartesian grids.
//!
//! Grid points include both interval endpoints, so `spacing = (xmax - xmin) / (L - 1)`.
//! Multi-indices are flattened with dimension 0 varying fastest:
//! `flat = i_0 + L * i_1 + L^2 * i_2 + ...`. Under the binary encoding this puts
//! dimension `α` on the contiguous qubit block `[α * log2(L), (α + 1) * log2(L))`,
//! with qubit 0 as the least significant bit.

use std::f64::consts::PI;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest operator dimension (`L^d`) that may be materialized densely.
pub const DENSE_CAP: usize = 4096;

/// Extent and particle mass along one Cartesian dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub xmin: f64,
    pub xmax: f64,
    pub mass: f64,
}

impl Axis {
    pub fn new(xmin: f64, xmax: f64, mass: f64) -> Self {
        Self { xmin, xmax, mass }
    }

    pub fn symmetric(half_width: f64, mass: f64) -> Self {
        Self::new(-half_width, half_width, mass)
    }
}

/// A uniform grid with `L` points (a power of two) in each of `d` dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct DvrGrid {
    points: usize,
    axes: Vec<Axis>,
}

impl DvrGrid {
    pub fn new(points: usize, axes: Vec<Axis>) -> Result<Self> {
        if points < 2 || !points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per dimension must be a power of two >= 2, got {points}"
            )));
        }
        if axes.is_empty() {
            return Err(Error::InvalidGrid("grid needs at least one dimension".into()));
        }
        for (k, ax) in axes.iter().enumerate() {
            if !(ax.xmax > ax.xmin) || !ax.xmin.is_finite() || !ax.xmax.is_finite() {
                return Err(Error::InvalidGrid(format!(
                    "dimension {k}: need finite xmin < xmax, got [{}, {}]",
                    ax.xmin, ax.xmax
                )));
            }
            if !(ax.mass > 0.0) || !ax.mass.is_finite() {
                return Err(Error::InvalidGrid(format!(
                    "dimension {k}: mass must be positive, got {}",
                    ax.mass
                )));
            }
        }
        let total = (points as u128).checked_pow(axes.len() as u32);
        if total.is_none_or(|t| t > usize::MAX as u128 / 2) {
            return Err(Error::InvalidGrid("grid size overflows".into()));
        }
        Ok(Self { points, axes })
    }

    /// Same extent and mass in every dimension.
    pub fn uniform(dims: usize, points: usize, xmin: f64, xmax: f64, mass: f64) -> Result<Self> {
        Self::new(points, vec![Axis::new(xmin, xmax, mass); dims])
    }

    pub fn dims(&self) -> usize {
        self.axes.len()
    }

    pub fn points_per_dim(&self) -> usize {
        self.points
    }

    pub fn axis(&self, dim: usize) -> &Axis {
        &self.axes[dim]
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    /// Total number of grid points, `L^d`.
    pub fn size(&self) -> usize {
        self.points.pow(self.dims() as u32)
    }

    pub fn qubits_per_dim(&self) -> usize {
        self.points.trailing_zeros() as usize
    }

    pub fn num_qubits(&self) -> usize {
        self.dims() * self.qubits_per_dim()
    }

    pub fn spacing(&self, dim: usize) -> f64 {
        let ax = &self.axes[dim];
        (ax.xmax - ax.xmin) / (self.points - 1) as f64
    }

    pub fn coordinate(&self, dim: usize, i: usize) -> f64 {
        self.axes[dim].xmin + i as f64 * self.spacing(dim)
    }

    /// Coordinates of all points along one dimension.
    pub fn axis_points(&self, dim: usize) -> Vec<f64> {
        (0..self.points).map(|i| self.coordinate(dim, i)).collect()
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = Vec::with_capacity(self.dims());
        for _ in 0..self.dims() {
            idx.push(flat % self.points);
            flat /= self.points;
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().rev().fold(0, |acc, &i| acc * self.points + i)
    }

    pub fn coordinates(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .into_iter()
            .enumerate()
            .map(|(dim, i)| self.coordinate(dim, i))
            .collect()
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        if dim >= self.dims() {
            return Err(Error::DimOutOfRange { dim, dims: self.dims() });
        }
        Ok(())
    }
}

/// One structural piece of a grid operator.
#[derive(Debug, Clone, PartialEq)]
pub enum GridTerm {
    /// `L x L` symmetric Toeplitz block acting on one dimension, identity elsewhere.
    Kinetic1d { dim: usize, block: DMatrix<f64> },
    /// Diagonal over the full product basis (`L^d` entries).
    Diagonal(Vec<f64>),
    /// Explicit matrix over the full product basis.
    Dense(DMatrix<f64>),
}

/// Real symmetric operator on the grid basis, kept as a sum of structured terms.
#[derive(Debug, Clone, PartialEq)]
pub struct GridOperator {
    dims: usize,
    points: usize,
    terms: Vec<GridTerm>,
}

impl GridOperator {
    pub fn zero(grid: &DvrGrid) -> Self {
        Self {
            dims: grid.dims(),
            points: grid.points_per_dim(),
            terms: Vec::new(),
        }
    }

    pub fn diagonal(grid: &DvrGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.size() {
            return Err(Error::DimensionMismatch(format!(
                "diagonal has {} entries, grid has {}",
                values.len(),
                grid.size()
            )));
        }
        Ok(Self {
            dims: grid.dims(),
            points: grid.points_per_dim(),
            terms: vec![GridTerm::Diagonal(values)],
        })
    }

    pub fn dense(grid: &DvrGrid, matrix: DMatrix<f64>) -> Result<Self> {
        let n = grid.size();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "dense matrix is {}x{}, grid has {n} points",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self {
            dims: grid.dims(),
            points: grid.points_per_dim(),
            terms: vec![GridTerm::Dense(matrix)],
        })
    }

    pub fn terms(&self) -> &[GridTerm] {
        &self.terms
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn points_per_dim(&self) -> usize {
        self.points
    }

    /// Dimension of the full product space, `L^d`.
    pub fn size(&self) -> usize {
        self.points.pow(self.dims as u32)
    }

    pub fn num_qubits(&self) -> usize {
        self.dims * self.points.trailing_zeros() as usize
    }

    /// Sum of two operators on the same grid shape.
    pub fn plus(mut self, other: GridOperator) -> Result<Self> {
        if self.dims != other.dims || self.points != other.points {
            return Err(Error::DimensionMismatch("operators live on different grids".into()));
        }
        self.terms.extend(other.terms);
        Ok(self)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| match t {
                GridTerm::Kinetic1d { dim, block } => GridTerm::Kinetic1d {
                    dim: *dim,
                    block: block * factor,
                },
                GridTerm::Diagonal(v) => GridTerm::Diagonal(v.iter().map(|x| x * factor).collect()),
                GridTerm::Dense(m) => GridTerm::Dense(m * factor),
            })
            .collect();
        Self {
            dims: self.dims,
            points: self.points,
            terms,
        }
    }

    /// Diagonal of the full operator, available at any size.
    pub fn diagonal_values(&self) -> Vec<f64> {
        let n = self.size();
        let mut diag = vec![0.0; n];
        for term in &self.terms {
            match term {
                GridTerm::Kinetic1d { block, .. } => {
                    for d in diag.iter_mut() {
                        *d += block[(0, 0)];
                    }
                }
                GridTerm::Diagonal(v) => {
                    for (d, x) in diag.iter_mut().zip(v) {
                        *d += x;
                    }
                }
                GridTerm::Dense(m) => {
                    for (k, d) in diag.iter_mut().enumerate() {
                        *d += m[(k, k)];
                    }
                }
            }
        }
        diag
    }

    /// Whether the operator has no off-diagonal structure.
    pub fn is_diagonal(&self) -> bool {
        self.terms.iter().all(|t| matches!(t, GridTerm::Diagonal(_)))
    }

    /// `y = A x` without materializing `A`.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.size();
        assert_eq!(x.len(), n, "vector length must match operator dimension");
        let mut y = vec![Complex64::new(0.0, 0.0); n];
        for term in &self.terms {
            match term {
                GridTerm::Kinetic1d { dim, block } => {
                    let stride = self.points.pow(*dim as u32);
                    for (row, yr) in y.iter_mut().enumerate() {
                        let i = (row / stride) % self.points;
                        let base = row - i * stride;
                        for j in 0..self.points {
                            *yr += x[base + j * stride] * block[(i, j)];
                        }
                    }
                }
                GridTerm::Diagonal(v) => {
                    for ((yr, xr), d) in y.iter_mut().zip(x).zip(v) {
                        *yr += xr * d;
                    }
                }
                GridTerm::Dense(m) => {
                    for (r, yr) in y.iter_mut().enumerate() {
                        for (c, xc) in x.iter().enumerate() {
                            *yr += xc * m[(r, c)];
                        }
                    }
                }
            }
        }
        y
    }

    pub fn apply_real(&self, x: &[f64]) -> Vec<f64> {
        let xc: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.apply(&xc).into_iter().map(|z| z.re).collect()
    }

    /// Dense matrix, refused above [`DENSE_CAP`].
    pub fn to_dense(&self) -> Result<DMatrix<f64>> {
        let n = self.size();
        if n > DENSE_CAP {
            return Err(Error::DenseCapExceeded { dim: n, cap: DENSE_CAP });
        }
        let mut out = DMatrix::zeros(n, n);
        for term in &self.terms {
            match term {
                GridTerm::Kinetic1d { dim, block } => {
                    let stride = self.points.pow(*dim as u32);
                    for row in 0..n {
                        let i = (row / stride) % self.points;
                        let base = row - i * stride;
                        for j in 0..self.points {
                            out[(row, base + j * stride)] += block[(i, j)];
                        }
                    }
                }
                GridTerm::Diagonal(v) => {
                    for (k, x) in v.iter().enumerate() {
                        out[(k, k)] += x;
                    }
                }
                GridTerm::Dense(m) => out += m,
            }
        }
        Ok(out)
    }

    /// Number of `(row, col)` entries contributed by kinetic terms in the full
    /// product basis, counted before terms are summed together.
    pub fn kinetic_structural_nonzeros(&self) -> usize {
        let rest = self.points.pow(self.dims.saturating_sub(1) as u32);
        self.terms
            .iter()
            .map(|t| match t {
                GridTerm::Kinetic1d { block, .. } => block.iter().filter(|x| **x != 0.0).count() * rest,
                _ => 0,
            })
            .sum()
    }

    /// Nonzero entries of the one-dimensional kinetic blocks, `d * L^2` for a
    /// full Hamiltonian.
    pub fn kinetic_block_entries(&self) -> usize {
        self.terms
            .iter()
            .map(|t| match t {
                GridTerm::Kinetic1d { block, .. } => block.iter().filter(|x| **x != 0.0).count(),
                _ => 0,
            })
            .sum()
    }
}

/// Colbert-Miller kinetic matrix element for offset `i - j` (ħ = 1).
pub fn kinetic_element(mass: f64, spacing: f64, offset: i64) -> f64 {
    let prefactor = 1.0 / (2.0 * mass * spacing * spacing);
    if offset == 0 {
        prefactor * PI * PI / 3.0
    } else {
        let sign = if offset % 2 == 0 { 1.0 } else { -1.0 };
        let k = offset as f64;
        prefactor * sign * 2.0 / (k * k)
    }
}

/// One-dimensional kinetic operator acting on dimension `dim`.
pub fn build_kinetic_1d(grid: &DvrGrid, dim: usize) -> Result<GridOperator> {
    grid.check_dim(dim)?;
    let l = grid.points_per_dim();
    let mass = grid.axis(dim).mass;
    let dx = grid.spacing(dim);
    let block = DMatrix::from_fn(l, l, |i, j| kinetic_element(mass, dx, i as i64 - j as i64));
    Ok(GridOperator {
        dims: grid.dims(),
        points: l,
        terms: vec![GridTerm::Kinetic1d { dim, block }],
    })
}

/// Diagonal potential operator `V(x_{i_1}, ..., x_{i_d})`.
pub fn build_potential<F>(grid: &DvrGrid, v: F) -> Result<GridOperator>
where
    F: Fn(&[f64]) -> f64,
{
    let mut values = Vec::with_capacity(grid.size());
    for flat in 0..grid.size() {
        let coords = grid.coordinates(flat);
        let value = v(&coords);
        if !value.is_finite() {
            return Err(Error::NonFinitePotential {
                index: grid.multi_index(flat),
                coords,
            });
        }
        values.push(value);
    }
    GridOperator::diagonal(grid, values)
}

/// `H_0 = Σ_α T_α + V`.
pub fn assemble_hamiltonian<F>(grid: &DvrGrid, v: F) -> Result<GridOperator>
where
    F: Fn(&[f64]) -> f64,
{
    let mut h = build_potential(grid, v)?;
    for dim in 0..grid.dims() {
        h = h.plus(build_kinetic_1d(grid, dim)?)?;
    }
    Ok(h)
}

/// Same as [`assemble_hamiltonian`] with tabulated potential values in flat-index order.
pub fn assemble_hamiltonian_tabulated(grid: &DvrGrid, values: Vec<f64>) -> Result<GridOperator> {
    if let Some(k) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinitePotential {
            index: grid.multi_index(k),
            coords: grid.coordinates(k),
        });
    }
    let mut h = GridOperator::diagonal(grid, values)?;
    for dim in 0..grid.dims() {
        h = h.plus(build_kinetic_1d(grid, dim)?)?;
    }
    Ok(h)
}

/// Reads a one-column potential table of length `L^d`, line `k` holding the
/// value at flat index `k`. Blank lines and `#` comments are skipped.
pub fn load_tabulated_potential(path: &Path, grid: &DvrGrid) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)?;
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: f64 = line
            .parse()
            .map_err(|e| Error::Parse(format!("{}:{}: {e}", path.display(), lineno + 1)))?;
        values.push(v);
    }
    if values.len() != grid.size() {
        return Err(Error::DimensionMismatch(format!(
            "{} holds {} values, grid has {}",
            path.display(),
            values.len(),
            grid.size()
        )));
    }
    Ok(values)
}

/// Lowest eigenpairs of a real symmetric matrix, ascending.
pub(crate) fn sorted_eigh(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_columns(
        &order
            .iter()
            .map(|&k| DVector::from(eig.eigenvectors.column(k).into_owned()))
            .collect::<Vec<_>>(),
    );
    (values, vectors)
}
