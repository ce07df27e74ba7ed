//! Harmonic spectra `I(ω) = |∫ d(t) e^{iωt} dt|²` of sampled dipole traces.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Window {
    #[default]
    Rectangular,
    /// Half-cosine ramps over `fraction` of the record at each end.
    CosineRamp { fraction: f64 },
}

impl Window {
    fn weight(&self, k: usize, n: usize) -> f64 {
        match *self {
            Window::Rectangular => 1.0,
            Window::CosineRamp { fraction } => {
                let ramp = ((n as f64) * fraction).round().max(1.0);
                let edge = (k as f64).min((n - 1 - k) as f64);
                if edge >= ramp {
                    1.0
                } else {
                    0.5 * (1.0 - (PI * edge / ramp).cos())
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumOptions {
    pub window: Window,
    /// Total transform length as a multiple of the record length. Values above
    /// one interpolate the plotted curve and do not add information.
    pub zero_pad: usize,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self {
            window: Window::Rectangular,
            zero_pad: 1,
        }
    }
}

/// Intensities from zero frequency up to the Nyquist limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub omega_au: Vec<f64>,
    pub harmonic_order: Vec<f64>,
    pub intensity: Vec<f64>,
    /// Bin spacing in a.u. of angular frequency.
    pub resolution_au: f64,
    pub carrier_omega: f64,
}

/// Checks that `times` is uniformly spaced and returns the spacing.
pub fn uniform_step(times: &[f64]) -> Result<f64> {
    if times.len() < 2 {
        return Err(Error::InvalidArgument("need at least two samples".into()));
    }
    let dt = times[1] - times[0];
    if !(dt > 0.0) {
        return Err(Error::NonUniformGrid(1));
    }
    for (k, w) in times.windows(2).enumerate() {
        if ((w[1] - w[0]) - dt).abs() > 1e-9 * dt.max(w[1].abs()) {
            return Err(Error::NonUniformGrid(k + 1));
        }
    }
    Ok(dt)
}

/// Squared modulus of the rectangle-rule Fourier integral of `dipole`
/// sampled at `times` (a.u.), with frequencies also expressed in units of
/// `carrier_omega`.
pub fn hhg_spectrum(
    times: &[f64],
    dipole: &[f64],
    carrier_omega: f64,
    opts: &SpectrumOptions,
) -> Result<SpectrumResult> {
    if times.len() != dipole.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} times but {} dipole samples",
            times.len(),
            dipole.len()
        )));
    }
    if !(carrier_omega > 0.0) {
        return Err(Error::InvalidArgument("carrier frequency must be positive".into()));
    }
    let dt = uniform_step(times)?;
    let n = dipole.len();
    let len = n * opts.zero_pad.max(1);
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    for (k, d) in dipole.iter().enumerate() {
        buf[k] = Complex64::new(d * opts.window.weight(k, n), 0.0);
    }
    // forward transform uses e^{-iωt}; the modulus is the same for real input
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    let resolution = 2.0 * PI / (len as f64 * dt);
    let bins = len / 2 + 1;
    let omega_au: Vec<f64> = (0..bins).map(|k| k as f64 * resolution).collect();
    Ok(SpectrumResult {
        harmonic_order: omega_au.iter().map(|w| w / carrier_omega).collect(),
        intensity: buf[..bins].iter().map(|c| (c * dt).norm_sqr()).collect(),
        omega_au,
        resolution_au: resolution,
        carrier_omega,
    })
}

impl SpectrumResult {
    /// Highest harmonic order representable at this sampling rate.
    pub fn nyquist_order(&self) -> f64 {
        *self.harmonic_order.last().unwrap_or(&0.0)
    }

    /// Intensities divided by the strongest bin within half an order of the
    /// fundamental.
    pub fn normalized_to_fundamental(&self) -> Vec<f64> {
        let peak = self
            .harmonic_order
            .iter()
            .zip(&self.intensity)
            .filter(|(q, _)| (**q - 1.0).abs() <= 0.5)
            .map(|(_, i)| *i)
            .fold(0.0, f64::max);
        if peak == 0.0 {
            return self.intensity.clone();
        }
        self.intensity.iter().map(|i| i / peak).collect()
    }

    /// For each order `q = 1..=max_order` the bin of largest intensity within
    /// `q ± 0.5`, skipping orders whose window extends past the Nyquist limit.
    pub fn harmonic_peaks(&self, max_order: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for q in 1..=max_order {
            let (lo, hi) = (q as f64 - 0.5, q as f64 + 0.5);
            if hi > self.nyquist_order() {
                break;
            }
            let best = self
                .harmonic_order
                .iter()
                .enumerate()
                .filter(|(_, h)| **h >= lo && **h < hi)
                .max_by(|a, b| self.intensity[a.0].total_cmp(&self.intensity[b.0]))
                .map(|(k, _)| k);
            if let Some(k) = best {
                out.push((q, k));
            }
        }
        out
    }
}
