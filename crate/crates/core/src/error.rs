use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid shape: {0}")]
    InvalidShape(String),

    #[error("invalid sparsity {s} for a grid of {n} points")]
    InvalidSparsity { s: usize, n: usize },

    #[error("unsupported kind: {0}")]
    UnsupportedKind(String),

    #[error("aperture entry {index} has modulus {modulus} > 1")]
    ApertureModulus { index: usize, modulus: f64 },

    #[error("invalid region partition: {0}")]
    InvalidRegions(String),

    #[error("lattice period {period} incompatible with grid dims {dims:?}")]
    LatticePeriod { period: usize, dims: Vec<usize> },

    #[error("transfer function entry {index} has modulus {modulus}, expected 1")]
    NonUnitaryKernel { index: usize, modulus: f64 },

    #[error("invalid wavelength {0}; must be positive")]
    InvalidWavelength(f64),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("shape mismatch: {0:?} vs {1:?}")]
    ShapeMismatch(Vec<usize>, Vec<usize>),

    #[error("measurements belong to ensemble {got}, not {expected}")]
    EnsembleMismatch { expected: String, got: String },

    #[error("dense operator of {rows}x{cols} exceeds the {limit} entry guard")]
    SizeGuard { rows: usize, cols: usize, limit: usize },

    #[error("negative intensity {value} at measurement {index}")]
    NegativeIntensity { index: usize, value: f64 },

    #[error("zero smoothing with vanishing field at measurement {0}")]
    SingularGradient(usize),

    #[error("invalid solver parameter: {0}")]
    InvalidParams(String),

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("iterate diverged (non-finite value) at iteration {0}")]
    Divergence(usize),

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("ground truth has zero norm")]
    ZeroReference,

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
