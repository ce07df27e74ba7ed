//! Closed-form counts of the distinct circuits each variational method needs
//! per time step (or per optimization step).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    RealTimeVqa,
    ImagTimeVqaSubspace,
    GradientDescentSubspace,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "real-time-vqa" => Ok(Method::RealTimeVqa),
            "imag-time-vqa-subspace" => Ok(Method::ImagTimeVqaSubspace),
            "gradient-descent-subspace" => Ok(Method::GradientDescentSubspace),
            other => Err(Error::InvalidArgument(format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceEstimate {
    pub method: Method,
    pub n_theta: u64,
    pub dims: u64,
    pub points: u64,
    /// Distinct elements of the metric `M`.
    pub metric: u64,
    /// Kinetic part of the force vector: `d L²` matrix elements per parameter.
    pub f_kinetic: u64,
    /// Potential part of the force vector: `L^d` diagonal terms per parameter.
    pub f_potential: u64,
    /// Circuits for one energy: `d L²` kinetic terms plus one diagonal measurement.
    pub energy_per_evaluation: u64,
    /// Energy evaluations for one parameter-shift gradient (two per parameter).
    pub gradient_energy_evaluations: u64,
    pub total: u64,
}

fn overflow() -> Error {
    Error::InvalidArgument("circuit count overflows 64 bits".into())
}

pub fn estimate_circuits(n_theta: u64, dims: u64, points: u64, method: Method) -> Result<ResourceEstimate> {
    if n_theta == 0 || dims == 0 || points == 0 {
        return Err(Error::InvalidArgument(format!(
            "counts need positive arguments, got N_theta={n_theta}, d={dims}, L={points}"
        )));
    }
    let l2 = points.checked_mul(points).ok_or_else(overflow)?;
    let dl2 = dims.checked_mul(l2).ok_or_else(overflow)?;
    let metric = n_theta.checked_mul(n_theta + 1).ok_or_else(overflow)? / 2;
    let f_kinetic = dl2.checked_mul(n_theta).ok_or_else(overflow)?;
    let ld = u32::try_from(dims)
        .ok()
        .and_then(|d| points.checked_pow(d))
        .ok_or_else(overflow)?;
    let f_potential = ld.checked_mul(n_theta).ok_or_else(overflow)?;
    let energy_per_evaluation = dl2 + 1;
    let gradient_energy_evaluations = 2 * n_theta;
    let gradient = energy_per_evaluation
        .checked_mul(gradient_energy_evaluations)
        .ok_or_else(overflow)?;
    let total = match method {
        Method::RealTimeVqa => metric.checked_add(f_kinetic).and_then(|x| x.checked_add(f_potential)),
        Method::ImagTimeVqaSubspace => metric.checked_add(gradient),
        Method::GradientDescentSubspace => Some(gradient),
    }
    .ok_or_else(overflow)?;
    Ok(ResourceEstimate {
        method,
        n_theta,
        dims,
        points,
        metric,
        f_kinetic,
        f_potential,
        energy_per_evaluation,
        gradient_energy_evaluations,
        total,
    })
}
