//! End-to-end pipelines behind the `chemdyn` subcommands.
//!
//! Each run writes its files into one output directory together with a
//! `<command>.run.json` manifest. Files are staged under a temporary name and
//! renamed once complete; if any step fails, every file the run produced is
//! removed again.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::ansatz::{build_hva, ParamInit};
use crate::config::{Config, EigenMethod};
use crate::error::{Error, Result};
use crate::exact::{project_populations, propagate_exact, ExactPropagator, ExactRun};
use crate::models::ModelSystem;
use crate::pauli::encode_operator;
use crate::resources::{estimate_circuits, Method, ResourceEstimate};
use crate::sim::{inner, ShotConfig};
use crate::spectral::{default_beta, dense_eigensolve, vqd_find, EigenSet, VqdOptions};
use crate::spectrum::{hhg_spectrum, SpectrumOptions};
use crate::subspace::{basis_coeffs, observables, project_hamiltonian, propagate_subspace, SubspaceRun};
use crate::units::{au_to_fs, fs_to_au};
use crate::variational::{
    energy, evolve_real_time, imaginary_time_minimize, DrivenHamiltonian, ImagTimeOptions, IntegratorConfig,
    McLachlanSystem,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Eigen,
    EvolveVqa,
    EvolveSubspace,
    EvolveExact,
    Spectrum,
    Resources,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Eigen => "eigen",
            Command::EvolveVqa => "evolve-vqa",
            Command::EvolveSubspace => "evolve-subspace",
            Command::EvolveExact => "evolve-exact",
            Command::Spectrum => "spectrum",
            Command::Resources => "resources",
        }
    }
}

/// Expectation values computed exactly, or estimated from a fixed number of shots per circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Shots {
    #[default]
    Exact,
    Count(u64),
}

impl FromStr for Shots {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("exact") {
            return Ok(Shots::Exact);
        }
        match s.parse::<u64>() {
            Ok(0) | Err(_) => Err(Error::InvalidShots(format!(
                "expected `exact` or a positive shot count, got `{s}`"
            ))),
            Ok(n) => Ok(Shots::Count(n)),
        }
    }
}

impl Shots {
    fn config(self, seed: u64) -> Result<ShotConfig> {
        match self {
            Shots::Exact => Ok(ShotConfig::exact()),
            Shots::Count(n) => ShotConfig::sampled(n, seed),
        }
    }

    fn to_json(self) -> Value {
        match self {
            Shots::Exact => json!("exact"),
            Shots::Count(n) => json!(n),
        }
    }
}

/// Everything one invocation needs besides the command itself.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub config: Config,
    pub out: PathBuf,
    /// Overrides `config.seed`.
    pub seed: Option<u64>,
    pub shots: Shots,
    /// Overrides the output step (`evolve-exact`, `evolve-subspace`) or the
    /// variational step (`evolve-vqa`), in fs.
    pub step_fs: Option<f64>,
}

impl RunOptions {
    pub fn new(config: Config, out: impl Into<PathBuf>) -> Self {
        Self {
            config,
            out: out.into(),
            seed: None,
            shots: Shots::Exact,
            step_fs: None,
        }
    }

    fn seed(&self) -> u64 {
        self.seed.unwrap_or(self.config.seed)
    }
}

/// Files written by a successful run, in creation order.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub outputs: Vec<PathBuf>,
    pub summary: Value,
}

struct Outputs {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Outputs {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let target = self.dir.join(name);
        let staging = self.dir.join(format!(".{name}.partial"));
        // record first so a failed rename still gets cleaned up
        self.written.push(staging.clone());
        fs::write(&staging, contents)?;
        fs::rename(&staging, &target)?;
        *self.written.last_mut().expect("just pushed") = target;
        Ok(())
    }

    fn discard(&self) {
        for p in &self.written {
            let _ = fs::remove_file(p);
        }
    }
}

/// Runs `command`, removing any files it wrote if it fails.
pub fn run(command: Command, opts: &RunOptions) -> Result<RunReport> {
    opts.config.validate()?;
    if let Some(s) = opts.step_fs {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::InvalidArgument(format!("--step must be positive, got {s}")));
        }
    }
    let mut out = Outputs::new(&opts.out)?;
    match execute(command, opts, &mut out) {
        Ok(summary) => Ok(RunReport {
            outputs: out.written.clone(),
            summary,
        }),
        Err(e) => {
            out.discard();
            Err(e)
        }
    }
}

fn execute(command: Command, opts: &RunOptions, out: &mut Outputs) -> Result<Value> {
    let summary = match command {
        Command::Eigen => run_eigen(opts, out)?,
        Command::EvolveExact => run_exact(opts, out)?,
        Command::EvolveSubspace => run_subspace(opts, out)?,
        Command::EvolveVqa => run_vqa(opts, out)?,
        Command::Spectrum => run_spectrum(opts, out)?,
        Command::Resources => run_resources(opts, out)?,
    };
    let manifest = json!({
        "command": command.name(),
        "version": env!("CARGO_PKG_VERSION"),
        "seed": opts.seed(),
        "shots": opts.shots.to_json(),
        "step_fs": opts.step_fs,
        "config": serde_json::to_value(&opts.config).map_err(|e| Error::Parse(e.to_string()))?,
        "outputs": out.written.iter().map(|p| file_name(p)).collect::<Vec<_>>(),
        "summary": summary,
    });
    out.write(&format!("{}.run.json", command.name()), &pretty(&manifest))?;
    Ok(summary)
}

/// Times are multiples of the step; rounding to 1e-9 fs drops accumulated
/// representation error such as `0.30000000000000004`.
fn clean_time(t_fs: f64) -> f64 {
    (t_fs * 1e9).round() / 1e9
}

fn file_name(p: &Path) -> String {
    p.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s
}

/// Eigenstates of the configured model by the configured method.
pub fn compute_eigenset(cfg: &Config, system: &ModelSystem, seed: u64, shots: Shots) -> Result<EigenSet> {
    let count = cfg.states();
    match cfg.eigen.method {
        EigenMethod::Dense => dense_eigensolve(&system.h0, count),
        EigenMethod::Vqd => {
            let h = encode_operator(&system.h0)?;
            let betas = match &cfg.eigen.betas {
                Some(b) => b.clone(),
                None => vec![default_beta(&h); count.saturating_sub(1)],
            };
            let opts = VqdOptions {
                layers: cfg.eigen.layers,
                imag: ImagTimeOptions {
                    step: cfg.eigen.imag_step,
                    max_iterations: cfg.eigen.max_iterations,
                    ..Default::default()
                },
                seed,
                restarts: cfg.eigen.restarts,
                shots: shots.config(seed)?,
                ..Default::default()
            };
            Ok(vqd_find(&h, count, &betas, &opts)?.0)
        }
    }
}

fn run_eigen(opts: &RunOptions, out: &mut Outputs) -> Result<Value> {
    let system = opts.config.system()?;
    let set = compute_eigenset(&opts.config, &system, opts.seed(), opts.shots)?;
    let mut body = set.to_json();
    body.push('\n');
    out.write("eigen.json", &body)?;
    Ok(json!({
        "states": set.len(),
        "energies_hartree": set.energies,
        "max_overlap_sq": set.max_overlap_sq(),
    }))
}

fn header(cols: impl IntoIterator<Item = String>) -> String {
    let mut s = cols.into_iter().collect::<Vec<_>>().join(",");
    s.push('\n');
    s
}

fn push_row(buf: &mut String, values: impl IntoIterator<Item = f64>) {
    let mut first = true;
    for v in values {
        if !first {
            buf.push(',');
        }
        first = false;
        let a = v.abs();
        if a != 0.0 && !(1e-4..1e15).contains(&a) {
            write!(buf, "{v:e}")
        } else {
            write!(buf, "{v}")
        }
        .expect("writing to a String cannot fail");
    }
    buf.push('\n');
}

fn indexed(prefix: &str, n: usize) -> impl Iterator<Item = String> + '_ {
    (0..n).map(move |i| format!("{prefix}{i}"))
}

fn run_exact(opts: &RunOptions, out: &mut Outputs) -> Result<Value> {
    let cfg = &opts.config;
    let system = cfg.system()?;
    let eigen = dense_eigensolve(&system.h0, cfg.states())?;
    let step = opts.step_fs.unwrap_or(cfg.step_fs());
    let run = exact_run(cfg, step)?;
    let prop = ExactPropagator::new(&system.h0, &system.dipole, system.pulse)?;
    let traj = propagate_exact(&prop, &run, &eigen.states[0])?;
    let pops = project_populations(&traj, &eigen.states)?;
    let dipole = traj.expectation(&system.dipole.operator, system.dipole.observable_sign);
    let n = eigen.len();
    let mut csv = header(
        std::iter::once("time_fs".to_string())
            .chain(indexed("P_", n))
            .chain(["dipole".to_string(), "norm".to_string()]),
    );
    for (k, t) in traj.times_fs.iter().enumerate() {
        let norm = traj.states[k].iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        push_row(
            &mut csv,
            std::iter::once(clean_time(*t))
                .chain(pops[k].iter().copied())
                .chain([dipole[k], norm]),
        );
    }
    out.write("exact.csv", &csv)?;
    Ok(json!({
        "rows": traj.times_fs.len(),
        "substeps": run.substeps,
        "max_norm_drift": traj.max_norm_drift(),
    }))
}

fn exact_run(cfg: &Config, step_fs: f64) -> Result<ExactRun> {
    let run = ExactRun::covering(cfg.duration_fs()?, step_fs)?;
    let substeps = (step_fs / cfg.dynamics.max_substep_fs).ceil().max(1.0) as usize;
    Ok(run.with_substeps(substeps))
}

fn run_subspace(opts: &RunOptions, out: &mut Outputs) -> Result<Value> {
    let cfg = &opts.config;
    let system = cfg.system()?;
    let eigen = compute_eigenset(cfg, &system, opts.seed(), opts.shots)?;
    let model = project_hamiltonian(&eigen, &system.dipole)?;
    let step = opts.step_fs.unwrap_or(cfg.step_fs());
    let base = exact_run(cfg, step)?;
    let run = SubspaceRun::covering(cfg.duration_fs()?, step, cfg.dynamics.integrator)?.with_substeps(base.substeps);
    let traj = propagate_subspace(&model, &system.pulse, &basis_coeffs(model.dim(), 0), &run)?;
    let obs = observables(&model, &traj);
    let n = model.dim();
    let mut csv = header(
        std::iter::once("time_fs".to_string())
            .chain(indexed("P_", n))
            .chain(indexed("re_c_", n))
            .chain(indexed("im_c_", n))
            .chain(std::iter::once("dipole".to_string())),
    );
    for (k, t) in obs.times_fs.iter().enumerate() {
        let c = &traj.coeffs[k];
        push_row(
            &mut csv,
            std::iter::once(clean_time(*t))
                .chain(obs.populations[k].iter().copied())
                .chain(c.iter().map(|a| a.re))
                .chain(c.iter().map(|a| a.im))
                .chain(std::iter::once(obs.dipole[k])),
        );
    }
    out.write("subspace.csv", &csv)?;
    Ok(json!({
        "rows": obs.times_fs.len(),
        "states": n,
        "energies_hartree": eigen.energies,
        "integrator": cfg.dynamics.integrator,
    }))
}

fn run_vqa(opts: &RunOptions, out: &mut Outputs) -> Result<Value> {
    let cfg = &opts.config;
    let system = cfg.system()?;
    let seed = opts.seed();
    let shots = opts.shots.config(seed)?;
    let eigen = dense_eigensolve(&system.h0, cfg.states())?;
    let h0 = encode_operator(&system.h0)?;
    let coupling = encode_operator(&system.dipole.coupling())?;
    let observable =
        encode_operator(&system.dipole.operator)?.scaled(Complex64::new(system.dipole.observable_sign, 0.0));
    let pulse = system.pulse;
    let driven = DrivenHamiltonian::new(h0.clone(), coupling, move |t| pulse.value(t))?;
    let ansatz = build_hva(&h0, cfg.eigen.layers, ParamInit::Uniform { half_width: 0.01, seed })?;

    let imag = ImagTimeOptions {
        step: cfg.eigen.imag_step,
        max_iterations: cfg.eigen.max_iterations,
        ..Default::default()
    };
    let mut sampler = shots.sampler();
    let ground = if shots.is_exact() {
        imaginary_time_minimize(ansatz.params(), &imag, |p| {
            McLachlanSystem::direct(&ansatz, p, &h0, 0.0)
        })?
    } else {
        imaginary_time_minimize(ansatz.params(), &imag, |p| {
            McLachlanSystem::measured(&ansatz, p, &h0, &mut sampler)
        })?
    };

    let step_fs = opts.step_fs.unwrap_or(cfg.dynamics.vqa_step_fs);
    let duration_fs = cfg.duration_fs()?;
    let steps = (duration_fs / step_fs).round() as usize;
    let integ = IntegratorConfig::new(fs_to_au(step_fs), cfg.dynamics.vqa_scheme)?;
    let stride = cfg.dynamics.vqa_output_stride;
    let n = eigen.len();
    let m = ansatz.num_params();
    let mut csv = header(
        ["time_fs".to_string(), "energy".to_string()]
            .into_iter()
            .chain(indexed("P_", n))
            .chain(std::iter::once("dipole".to_string()))
            .chain(indexed("theta_", m)),
    );
    let observe = |step: usize, t: f64, theta: &[f64]| -> Result<()> {
        if !step.is_multiple_of(stride) && step != steps {
            return Ok(());
        }
        let psi = ansatz.prepare_at(theta);
        let amps = psi.amplitudes();
        let pops = eigen.states.iter().map(|e| inner(e, amps).norm_sqr());
        let e = energy(&ansatz, theta, &driven, t);
        let d = inner(amps, &observable.apply(amps)).re;
        push_row(
            &mut csv,
            [clean_time(au_to_fs(t)), e]
                .into_iter()
                .chain(pops)
                .chain(std::iter::once(d))
                .chain(theta.iter().copied()),
        );
        Ok(())
    };
    let final_params = if shots.is_exact() {
        evolve_real_time(
            &ground.params,
            0.0,
            steps,
            &integ,
            |p, t| McLachlanSystem::direct(&ansatz, p, &driven, t),
            observe,
        )?
    } else {
        evolve_real_time(
            &ground.params,
            0.0,
            steps,
            &integ,
            |p, t| McLachlanSystem::measured(&ansatz, p, &driven.at(t), &mut sampler),
            observe,
        )?
    };
    out.write("vqa.csv", &csv)?;
    let fidelity = inner(&eigen.states[0], ansatz.prepare_at(&ground.params).amplitudes()).norm_sqr();
    Ok(json!({
        "steps": steps,
        "step_fs": step_fs,
        "parameters": m,
        "initial_energy_hartree": ground.energy,
        "initial_ground_fidelity": fidelity,
        "final_parameters": final_params,
        "ansatz": ansatz.with_params(ground.params.clone()).to_manifest(),
    }))
}

/// `time_fs` and `dipole` columns of a trajectory CSV.
pub fn read_dipole_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?
        .clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Parse(format!("{}: missing `{name}` column", path.display())))
    };
    let (ti, di) = (column("time_fs")?, column("dipole")?);
    let mut times = Vec::new();
    let mut dipole = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        let parse = |i: usize| -> Result<f64> {
            record
                .get(i)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| Error::Parse(format!("{}: bad number in data row {}", path.display(), row + 1)))
        };
        times.push(parse(ti)?);
        dipole.push(parse(di)?);
    }
    Ok((times, dipole))
}

fn run_spectrum(opts: &RunOptions, out: &mut Outputs) -> Result<Value> {
    let cfg = &opts.config;
    let input = match &cfg.spectrum.input {
        Some(p) => PathBuf::from(p),
        None => opts.out.join("exact.csv"),
    };
    let (times_fs, dipole) = read_dipole_csv(&input)?;
    let times: Vec<f64> = times_fs.iter().map(|t| fs_to_au(*t)).collect();
    let spec_opts = SpectrumOptions {
        window: cfg.spectrum.window,
        zero_pad: cfg.spectrum.zero_pad,
    };
    let spec = hhg_spectrum(&times, &dipole, cfg.carrier_omega(), &spec_opts)?;
    let normalized = spec.normalized_to_fundamental();
    let mut csv = header(["harmonic_order", "omega_au", "intensity", "normalized"].map(String::from));
    for k in 0..spec.intensity.len() {
        push_row(
            &mut csv,
            [
                spec.harmonic_order[k],
                spec.omega_au[k],
                spec.intensity[k],
                normalized[k],
            ],
        );
    }
    out.write("spectrum.csv", &csv)?;
    Ok(json!({
        "input": input.display().to_string(),
        "bins": spec.intensity.len(),
        "resolution_au": spec.resolution_au,
        "nyquist_order": spec.nyquist_order(),
    }))
}

/// Circuit counts for the configured model's grid and HVA size.
pub fn resource_estimates(cfg: &Config) -> Result<Vec<ResourceEstimate>> {
    let system = cfg.system()?;
    let n_theta = match cfg.resources.n_theta {
        Some(n) => n,
        None => build_hva(&encode_operator(&system.h0)?, cfg.eigen.layers, ParamInit::Zero)?.num_params() as u64,
    };
    let methods = match cfg.resources.method {
        Some(m) => vec![m],
        None => vec![
            Method::RealTimeVqa,
            Method::ImagTimeVqaSubspace,
            Method::GradientDescentSubspace,
        ],
    };
    methods
        .into_iter()
        .map(|m| {
            estimate_circuits(
                n_theta,
                system.grid.dims() as u64,
                system.grid.points_per_dim() as u64,
                m,
            )
        })
        .collect()
}

fn run_resources(opts: &RunOptions, out: &mut Outputs) -> Result<Value> {
    let estimates = resource_estimates(&opts.config)?;
    out.write("estimates.json", &pretty(&estimates))?;
    Ok(json!({ "methods": estimates.len() }))
}
