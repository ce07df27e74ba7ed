//! The two physical models: a tilted double well driven by a smooth
//! rectangular pulse, and a one-dimensional two-electron helium atom driven by
//! a trapezoidal laser pulse.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::dvr::{assemble_hamiltonian, Axis, DvrGrid, GridOperator};
use crate::error::{Error, Result};
use crate::units::{angstrom_to_bohr, ev_to_hartree, fs_to_au, ATOMIC_INTENSITY_W_CM2, PROTON_MASS};

/// Field amplitude in atomic units for a peak intensity in W/cm².
pub fn field_units(intensity_w_cm2: f64) -> Result<f64> {
    if !(intensity_w_cm2 >= 0.0) || !intensity_w_cm2.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "intensity must be non-negative, got {intensity_w_cm2}"
        )));
    }
    Ok((intensity_w_cm2 / ATOMIC_INTENSITY_W_CM2).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DoubleWellParams {
    /// Barrier height (hartree).
    pub barrier: f64,
    /// Energy offset between the wells (hartree).
    pub asymmetry: f64,
    /// Well positions are at ±x0 (bohr).
    pub x0: f64,
    /// Particle mass (electron masses).
    pub mass: f64,
    /// The grid spans ±half_width (ångström).
    pub half_width_angstrom: f64,
    pub points: usize,
}

impl Default for DoubleWellParams {
    fn default() -> Self {
        Self {
            barrier: 0.00625,
            asymmetry: 0.000257,
            x0: 1.0,
            mass: PROTON_MASS,
            half_width_angstrom: 0.8,
            points: 8,
        }
    }
}

impl DoubleWellParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.x0 > 0.0
            && self.asymmetry > 0.0
            && self.barrier > self.asymmetry / 2.0
            && self.mass > 0.0
            && self.half_width_angstrom > 0.0;
        if !ok {
            return Err(Error::InvalidArgument(format!(
                "ill-formed double well: need barrier > asymmetry/2 > 0, x0 > 0, mass > 0, half width > 0 ({self:?})"
            )));
        }
        Ok(())
    }

    pub fn potential(&self, x: f64) -> f64 {
        double_well_potential(self, x)
    }

    pub fn grid(&self) -> Result<DvrGrid> {
        self.validate()?;
        DvrGrid::new(
            self.points,
            vec![Axis::symmetric(angstrom_to_bohr(self.half_width_angstrom), self.mass)],
        )
    }

    pub fn hamiltonian(&self, grid: &DvrGrid) -> Result<GridOperator> {
        assemble_hamiltonian(grid, |x| self.potential(x[0]))
    }
}

/// `(Δ/2x0)(x−x0) + ((V‡−Δ/2)/x0⁴)(x−x0)²(x+x0)²`.
pub fn double_well_potential(p: &DoubleWellParams, x: f64) -> f64 {
    let d = p.asymmetry;
    let x0 = p.x0;
    d / (2.0 * x0) * (x - x0) + (p.barrier - d / 2.0) / x0.powi(4) * (x - x0).powi(2) * (x + x0).powi(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HeliumParams {
    /// Soft-Coulomb softening length (bohr).
    pub softening: f64,
    pub half_width_angstrom: f64,
    pub points: usize,
    /// Laser photon energy (eV).
    pub omega_ev: f64,
    /// Peak intensity (W/cm²).
    pub intensity_w_cm2: f64,
}

impl Default for HeliumParams {
    fn default() -> Self {
        Self {
            softening: 0.7397,
            half_width_angstrom: 2.0,
            points: 8,
            omega_ev: 0.3542,
            intensity_w_cm2: 3e12,
        }
    }
}

impl HeliumParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.softening > 0.0 && self.half_width_angstrom > 0.0 && self.omega_ev > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "helium parameters need positive softening, half width and frequency ({self:?})"
            )));
        }
        Ok(())
    }

    /// Two-electron potential at electron positions `x`, `y` (bohr).
    pub fn potential(&self, x: f64, y: f64) -> f64 {
        let a2 = self.softening * self.softening;
        -2.0 / (x * x + a2).sqrt() - 2.0 / (y * y + a2).sqrt() + 1.0 / ((x - y).powi(2) + a2).sqrt()
    }

    pub fn grid(&self) -> Result<DvrGrid> {
        self.validate()?;
        let axis = Axis::symmetric(angstrom_to_bohr(self.half_width_angstrom), 1.0);
        DvrGrid::new(self.points, vec![axis, axis])
    }

    pub fn hamiltonian(&self, grid: &DvrGrid) -> Result<GridOperator> {
        assemble_hamiltonian(grid, |r| self.potential(r[0], r[1]))
    }

    /// Carrier angular frequency (a.u.).
    pub fn omega(&self) -> f64 {
        ev_to_hartree(self.omega_ev)
    }

    /// Optical period `2π/ω` (a.u.).
    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega()
    }

    pub fn pulse(&self) -> Result<Pulse> {
        Ok(Pulse::Trapezoid {
            amplitude: field_units(self.intensity_w_cm2)?,
            omega: self.omega(),
        })
    }
}

/// Laser field `ε(t)` with `t` in atomic units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Pulse {
    /// Zero field.
    Off,
    /// sin² ramp on `[0, s1]`, plateau, sin² ramp down on `[s2, tf]`; no carrier.
    SmoothRect { amplitude: f64, s1: f64, s2: f64, tf: f64 },
    /// `cos(ωt)` carrier under a sin²/flat/cos² envelope spanning 2, 8 and 2
    /// optical periods.
    Trapezoid { amplitude: f64, omega: f64 },
}

impl Pulse {
    /// Smooth rectangular pulse with timings in femtoseconds.
    pub fn smooth_rect_fs(amplitude: f64, s1_fs: f64, s2_fs: f64, tf_fs: f64) -> Result<Self> {
        if !(0.0 < s1_fs && s1_fs <= s2_fs && s2_fs < tf_fs) {
            return Err(Error::InvalidArgument(format!(
                "pulse timings need 0 < s1 <= s2 < tf, got {s1_fs}, {s2_fs}, {tf_fs}"
            )));
        }
        Ok(Pulse::SmoothRect {
            amplitude,
            s1: fs_to_au(s1_fs),
            s2: fs_to_au(s2_fs),
            tf: fs_to_au(tf_fs),
        })
    }

    /// The isomerization pulse: 1500 fs total with 150 fs ramps starting at 0 and 1250 fs.
    pub fn isomerization() -> Self {
        Self::smooth_rect_fs(0.00137, 150.0, 1250.0, 1500.0).expect("valid default timings")
    }

    /// Time after which the field stays zero (a.u.).
    pub fn duration(&self) -> f64 {
        match *self {
            Pulse::Off => 0.0,
            Pulse::SmoothRect { tf, .. } => tf,
            Pulse::Trapezoid { omega, .. } => 12.0 * 2.0 * PI / omega,
        }
    }

    /// Times (a.u.) where the piecewise definition switches branches.
    pub fn breakpoints(&self) -> Vec<f64> {
        match *self {
            Pulse::Off => vec![],
            Pulse::SmoothRect { s1, s2, tf, .. } => vec![0.0, s1, s2, tf],
            Pulse::Trapezoid { omega, .. } => {
                let period = 2.0 * PI / omega;
                vec![0.0, 2.0 * period, 10.0 * period, 12.0 * period]
            }
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Pulse::Off => 0.0,
            Pulse::SmoothRect { amplitude, s1, s2, tf } => {
                if !(0.0..=tf).contains(&t) {
                    0.0
                } else if t <= s1 {
                    amplitude * (PI * t / (2.0 * s1)).sin().powi(2)
                } else if t < s2 {
                    amplitude
                } else {
                    amplitude * (PI * (tf - t) / (2.0 * (tf - s2))).sin().powi(2)
                }
            }
            Pulse::Trapezoid { amplitude, omega } => {
                let period = 2.0 * PI / omega;
                if !(0.0..=12.0 * period).contains(&t) {
                    return 0.0;
                }
                let u = PI * t / (4.0 * period);
                let envelope = if t <= 2.0 * period {
                    u.sin().powi(2)
                } else if t <= 10.0 * period {
                    1.0
                } else {
                    (u - 5.0 * PI / 2.0).cos().powi(2)
                };
                amplitude * envelope * (omega * t).cos()
            }
        }
    }
}

/// A position-like operator together with the two signs that tie it to the
/// light-matter coupling and to the reported dipole.
#[derive(Debug, Clone, PartialEq)]
pub struct DipoleOperator {
    pub operator: GridOperator,
    /// `H_I(t) = coupling_sign · ε(t) · operator`.
    pub coupling_sign: f64,
    /// Reported dipole `d(t) = observable_sign · <operator>`.
    pub observable_sign: f64,
}

impl DipoleOperator {
    /// The coupling operator `coupling_sign · operator`.
    pub fn coupling(&self) -> GridOperator {
        self.operator.scaled(self.coupling_sign)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    DoubleWell,
    Helium,
}

/// Diagonal coordinate operator with the model's sign conventions: `x` with
/// `H_I = −x ε(t)` and `d = +<x>` for the double well; `x + y` with
/// `H_I = +ε(t)(x + y)` and `d = −<x + y>` for helium.
pub fn dipole_operator(kind: ModelKind, grid: &DvrGrid) -> Result<DipoleOperator> {
    let values: Vec<f64> = (0..grid.size()).map(|k| grid.coordinates(k).iter().sum()).collect();
    let operator = GridOperator::diagonal(grid, values)?;
    let (coupling_sign, observable_sign) = match kind {
        ModelKind::DoubleWell => (-1.0, 1.0),
        ModelKind::Helium => (1.0, -1.0),
    };
    Ok(DipoleOperator {
        operator,
        coupling_sign,
        observable_sign,
    })
}

/// A fully specified model: grid, field-free Hamiltonian, dipole and pulse.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSystem {
    pub kind: ModelKind,
    pub grid: DvrGrid,
    pub h0: GridOperator,
    pub dipole: DipoleOperator,
    pub pulse: Pulse,
}

impl ModelSystem {
    pub fn double_well(p: &DoubleWellParams, pulse: Pulse) -> Result<Self> {
        let grid = p.grid()?;
        let h0 = p.hamiltonian(&grid)?;
        let dipole = dipole_operator(ModelKind::DoubleWell, &grid)?;
        Ok(Self {
            kind: ModelKind::DoubleWell,
            grid,
            h0,
            dipole,
            pulse,
        })
    }

    pub fn helium(p: &HeliumParams) -> Result<Self> {
        let grid = p.grid()?;
        let h0 = p.hamiltonian(&grid)?;
        let dipole = dipole_operator(ModelKind::Helium, &grid)?;
        Ok(Self {
            kind: ModelKind::Helium,
            grid,
            h0,
            dipole,
            pulse: p.pulse()?,
        })
    }
}
