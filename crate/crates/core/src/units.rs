//! Hartree atomic units and the handful of conversions the models need.

/// Bohr radii per ångström.
pub const BOHR_PER_ANGSTROM: f64 = 1.889_726_125_457_828_1;

/// Femtoseconds per atomic unit of time.
pub const FS_PER_AU_TIME: f64 = 0.024_188_843_265_857;

/// Hartree per electronvolt.
pub const HARTREE_PER_EV: f64 = 1.0 / 27.211_386_245_988;

/// Proton mass in electron masses.
pub const PROTON_MASS: f64 = 1_836.152_673_43;

/// Intensity (W/cm²) of a field with amplitude one atomic unit.
pub const ATOMIC_INTENSITY_W_CM2: f64 = 3.509_447_58e16;

pub fn angstrom_to_bohr(x: f64) -> f64 {
    x * BOHR_PER_ANGSTROM
}

pub fn fs_to_au(t: f64) -> f64 {
    t / FS_PER_AU_TIME
}

pub fn au_to_fs(t: f64) -> f64 {
    t * FS_PER_AU_TIME
}

pub fn ev_to_hartree(e: f64) -> f64 {
    e * HARTREE_PER_EV
}
