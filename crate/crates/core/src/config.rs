//! TOML run configuration.
//!
//! Every table and field is optional; omitted values fall back to the
//! built-in model defaults. Unknown keys are rejected and reported with their
//! full path (for example `eigen.layerz`).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{DoubleWellParams, HeliumParams, ModelKind, ModelSystem, Pulse};
use crate::resources::Method;
use crate::spectrum::Window;
use crate::subspace::SubspaceIntegrator;
use crate::variational::Scheme;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub model: ModelKind,
    /// Seed for parameter initialization and shot sampling.
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub double_well: DoubleWellParams,
    #[serde(default)]
    pub helium: HeliumParams,
    /// Replaces the model's default pulse (double well only).
    #[serde(default)]
    pub pulse: Option<PulseConfig>,
    #[serde(default)]
    pub eigen: EigenConfig,
    #[serde(default)]
    pub dynamics: DynamicsConfig,
    #[serde(default)]
    pub spectrum: SpectrumConfig,
    #[serde(default)]
    pub resources: ResourcesConfig,
}

/// Pulse override with timings in femtoseconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PulseConfig {
    Off,
    SmoothRect {
        amplitude: f64,
        s1_fs: f64,
        s2_fs: f64,
        tf_fs: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EigenMethod {
    Dense,
    Vqd,
}

fn default_seed() -> u64 {
    7
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EigenConfig {
    /// Number of retained states; defaults to 2 (double well) or 6 (helium).
    pub states: Option<usize>,
    pub method: EigenMethod,
    pub layers: usize,
    /// Imaginary-time step (a.u.).
    pub imag_step: f64,
    pub max_iterations: usize,
    pub restarts: usize,
    /// Penalty weights; defaults to twice the spectral enclosure width.
    pub betas: Option<Vec<f64>>,
}

impl Default for EigenConfig {
    fn default() -> Self {
        Self {
            states: None,
            method: EigenMethod::Dense,
            layers: 2,
            imag_step: 50.0,
            max_iterations: 1000,
            restarts: 3,
            betas: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DynamicsConfig {
    /// Output step for exact and subspace runs (fs); defaults to 0.1 (double
    /// well) or 0.58 (helium).
    pub step_fs: Option<f64>,
    /// Upper bound on the internal step of exact and subspace runs (fs).
    pub max_substep_fs: f64,
    /// Defaults to the pulse duration.
    pub duration_fs: Option<f64>,
    pub integrator: SubspaceIntegrator,
    /// Real-time variational step (fs).
    pub vqa_step_fs: f64,
    pub vqa_scheme: Scheme,
    /// Write every n-th variational step.
    pub vqa_output_stride: usize,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        Self {
            step_fs: None,
            max_substep_fs: crate::exact::DEFAULT_MAX_SUBSTEP_FS,
            duration_fs: None,
            integrator: SubspaceIntegrator::Exponential,
            vqa_step_fs: 0.002,
            vqa_scheme: Scheme::Euler,
            vqa_output_stride: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumConfig {
    /// Trajectory CSV to transform; defaults to `trajectory.csv` in the output directory.
    pub input: Option<String>,
    pub window: Window,
    /// Cosmetic interpolation of the frequency axis.
    pub zero_pad: usize,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self {
            input: None,
            window: Window::Rectangular,
            zero_pad: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ResourcesConfig {
    /// Restricts the report to one method; all three otherwise.
    pub method: Option<Method>,
    /// Defaults to the parameter count of the model's HVA.
    pub n_theta: Option<u64>,
}

impl Serialize for Scheme {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(match self {
            Scheme::Euler => "euler",
            Scheme::Rk4 => "rk4",
        })
    }
}

impl<'de> Deserialize<'de> for Scheme {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Config {
    pub fn default_for(model: ModelKind) -> Self {
        Self {
            model,
            seed: default_seed(),
            double_well: DoubleWellParams::default(),
            helium: HeliumParams::default(),
            pulse: None,
            eigen: EigenConfig::default(),
            dynamics: DynamicsConfig::default(),
            spectrum: SpectrumConfig::default(),
            resources: ResourcesConfig::default(),
        }
    }

    pub fn from_toml(text: &str, origin: &str) -> Result<Self> {
        let value: toml::Value = toml::from_str(text).map_err(|e| Error::Config {
            path: origin.to_string(),
            message: e.to_string(),
        })?;
        let cfg: Config = serde_path_to_error::deserialize(value).map_err(|e| Error::Config {
            path: origin.to_string(),
            message: format!("at `{}`: {}", e.path(), e.inner()),
        })?;
        cfg.validate().map_err(|e| Error::Config {
            path: origin.to_string(),
            message: e.to_string(),
        })?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text, &path.display().to_string())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        match self.model {
            ModelKind::DoubleWell => self.double_well.validate()?,
            ModelKind::Helium => self.helium.validate()?,
        }
        let positive = |v: f64, name: &str| -> Result<()> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!("`{name}` must be positive, got {v}")))
            }
        };
        if let Some(s) = self.dynamics.step_fs {
            positive(s, "dynamics.step_fs")?;
        }
        positive(self.dynamics.max_substep_fs, "dynamics.max_substep_fs")?;
        positive(self.dynamics.vqa_step_fs, "dynamics.vqa_step_fs")?;
        positive(self.eigen.imag_step, "eigen.imag_step")?;
        if self.spectrum.zero_pad == 0 {
            return Err(Error::InvalidArgument("`spectrum.zero_pad` must be at least 1".into()));
        }
        if self.eigen.states == Some(0) {
            return Err(Error::InvalidArgument("`eigen.states` must be at least 1".into()));
        }
        if self.eigen.layers == 0 {
            return Err(Error::InvalidArgument("`eigen.layers` must be at least 1".into()));
        }
        if self.dynamics.vqa_output_stride == 0 {
            return Err(Error::InvalidArgument(
                "`dynamics.vqa_output_stride` must be at least 1".into(),
            ));
        }
        if self.pulse.is_some() && self.model == ModelKind::Helium {
            return Err(Error::InvalidArgument(
                "`pulse` overrides apply to the double well only".into(),
            ));
        }
        Ok(())
    }

    pub fn states(&self) -> usize {
        self.eigen.states.unwrap_or(match self.model {
            ModelKind::DoubleWell => 2,
            ModelKind::Helium => 6,
        })
    }

    pub fn step_fs(&self) -> f64 {
        self.dynamics.step_fs.unwrap_or(match self.model {
            ModelKind::DoubleWell => 0.1,
            ModelKind::Helium => 0.58,
        })
    }

    pub fn pulse(&self) -> Result<Pulse> {
        match (self.model, self.pulse) {
            (ModelKind::Helium, _) => self.helium.pulse(),
            (ModelKind::DoubleWell, None) => Ok(Pulse::isomerization()),
            (ModelKind::DoubleWell, Some(PulseConfig::Off)) => Ok(Pulse::Off),
            (
                ModelKind::DoubleWell,
                Some(PulseConfig::SmoothRect {
                    amplitude,
                    s1_fs,
                    s2_fs,
                    tf_fs,
                }),
            ) => Pulse::smooth_rect_fs(amplitude, s1_fs, s2_fs, tf_fs),
        }
    }

    pub fn duration_fs(&self) -> Result<f64> {
        Ok(match self.dynamics.duration_fs {
            Some(d) => d,
            None => crate::units::au_to_fs(self.pulse()?.duration()),
        })
    }

    pub fn system(&self) -> Result<ModelSystem> {
        match self.model {
            ModelKind::DoubleWell => ModelSystem::double_well(&self.double_well, self.pulse()?),
            ModelKind::Helium => ModelSystem::helium(&self.helium),
        }
    }

    /// Carrier frequency used for the harmonic axis (a.u.).
    pub fn carrier_omega(&self) -> f64 {
        self.helium.omega()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_uses_defaults() {
        let c = Config::from_toml("model = \"double-well\"\n", "mem").unwrap();
        assert_eq!(c, Config::default_for(ModelKind::DoubleWell));
        assert_eq!(c.states(), 2);
        assert_eq!(c.step_fs(), 0.1);
        assert!((c.duration_fs().unwrap() - 1500.0).abs() < 1e-9);
    }

    #[test]
    fn helium_defaults() {
        let c = Config::from_toml("model = \"helium\"\n", "mem").unwrap();
        assert_eq!(c.states(), 6);
        assert_eq!(c.step_fs(), 0.58);
        assert!((c.duration_fs().unwrap() - 12.0 * 11.676).abs() < 0.05);
    }

    #[test]
    fn unknown_field_reports_path() {
        let err = Config::from_toml("model = \"helium\"\n[eigen]\nlayerz = 3\n", "cfg.toml").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("eigen.layerz") || msg.contains("layerz"), "{msg}");
        assert!(msg.contains("cfg.toml"));
        let err = Config::from_toml("model = \"helium\"\n[dynamics]\nstep_fs = \"fast\"\n", "c").unwrap_err();
        assert!(err.to_string().contains("dynamics.step_fs"), "{err}");
    }

    #[test]
    fn invalid_values_rejected() {
        assert!(Config::from_toml("model = \"double-well\"\n[dynamics]\nstep_fs = -1.0\n", "c").is_err());
        assert!(Config::from_toml("model = \"triple-well\"\n", "c").is_err());
        assert!(Config::from_toml("model = \"helium\"\n[pulse]\nshape = \"off\"\n", "c").is_err());
    }

    #[test]
    fn pulse_override_and_roundtrip() {
        let text = "model = \"double-well\"\n[pulse]\nshape = \"smooth-rect\"\namplitude = 0.002\ns1_fs = 10.0\ns2_fs = 20.0\ntf_fs = 30.0\n[dynamics]\nvqa_scheme = \"rk4\"\nintegrator = \"rk4\"\n";
        let c = Config::from_toml(text, "c").unwrap();
        assert!((c.duration_fs().unwrap() - 30.0).abs() < 1e-9);
        assert_eq!(c.dynamics.vqa_scheme, Scheme::Rk4);
        let back = Config::from_toml(&c.to_toml(), "c").unwrap();
        assert_eq!(back, c);
    }
}
