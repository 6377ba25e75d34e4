use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite value encountered")]
    NonFinite,
    #[error("matrix is not Hermitian (max asymmetry {defect:e})")]
    NonHermitianInput { defect: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("mixing fraction {eta} outside [0, 1]")]
    InvalidMixing { eta: f64 },
    #[error("parameters give an unphysical state (min eigenvalue {min_eigenvalue:e})")]
    UnphysicalState { min_eigenvalue: f64 },
    #[error("not a valid density matrix: hermiticity defect {hermiticity:e}, trace defect {trace:e}, min eigenvalue {min_eigenvalue:e}")]
    InvalidDensity {
        hermiticity: f64,
        trace: f64,
        min_eigenvalue: f64,
    },
    #[error("pure state is not normalized (norm^2 = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },
    #[error("observable expectation has imaginary part {imag:e}")]
    NonHermitianObservable { imag: f64 },
    #[error("variance {value:e} is negative")]
    NegativeVariance { value: f64 },
    #[error("ratio denominator vanishes ({value:e})")]
    DegenerateDenominator { value: f64 },
    #[error("no optimizer start converged")]
    NotConverged,
    #[error("every sample was rejected")]
    NoValidSamples,
    #[error("argument {value} outside the domain {domain}")]
    DomainError { value: f64, domain: &'static str },
    #[error("measurement records do not determine <{pauli}>")]
    IncompleteData { pauli: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
