use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("dimension index {dim} out of range for a {dims}-dimensional grid")]
    DimOutOfRange { dim: usize, dims: usize },
    #[error("potential is not finite at grid point {index:?} (coordinates {coords:?})")]
    NonFinitePotential { index: Vec<usize>, coords: Vec<f64> },
    #[error("operator of dimension {dim} exceeds the dense cap of {cap}")]
    DenseCapExceeded { dim: usize, cap: usize },
    #[error("index {index} out of range for {qubits} qubits")]
    IndexOutOfRange { index: usize, qubits: usize },
    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("qubit count mismatch: expected {expected}, got {got}")]
    QubitMismatch { expected: usize, got: usize },
    #[error("operator is not Hermitian (max imaginary coefficient {0:e})")]
    NotHermitian(f64),
    #[error("malformed circuit: {0}")]
    MalformedCircuit(String),
    #[error("invalid shot configuration: {0}")]
    InvalidShots(String),
    #[error("hamiltonian has no one- or two-qubit terms to build an ansatz from")]
    EmptyAnsatz,
    #[error("parameter index {index} out of range for {len} parameters")]
    ParamOutOfRange { index: usize, len: usize },
    #[error("linear solve failed: {0}")]
    SolveFailed(String),
    #[error("invalid integrator configuration: {0}")]
    InvalidIntegrator(String),
    #[error(
        "state {state} did not converge: energy {energy:.10} exceeds reference {reference:.10} \
         by more than {tolerance:e} after {iterations} iterations"
    )]
    NotConverged {
        state: usize,
        energy: f64,
        reference: f64,
        tolerance: f64,
        iterations: usize,
    },
    #[error("step too large: norm drift {drift:e} exceeds {bound:e}; reduce the time step")]
    StepTooLarge { drift: f64, bound: f64 },
    #[error("unitarity check failed at t = {time} a.u.: norm deviation {deviation:e}")]
    UnitarityViolated { time: f64, deviation: f64 },
    #[error("non-uniform time grid at sample {0}")]
    NonUniformGrid(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
