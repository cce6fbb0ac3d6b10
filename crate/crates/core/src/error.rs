use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown generator {gen} for model {model}")]
    UnknownGenerator { model: String, gen: String },
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("model {0} has no sl(2,R) triple")]
    NoSL2Triple(String),
    #[error("decomposition mismatch: {0}")]
    DecompositionMismatch(String),
    #[error("Leibniz shape mismatch at order {0}")]
    ShapeMismatch(u32),
    #[error("derivative order {requested} exceeds cap {cap}")]
    UnsupportedDerivativeOrder { requested: u32, cap: u32 },
    #[error("finite-difference order {0} unsupported (max 4)")]
    UnsupportedOrder(u32),
    #[error("NaN coordinate")]
    OutsideSupport,
    #[error("quadrature did not converge: relative change {rel_change:.3e} (value {value:.6e})")]
    QuadratureNotConverged { value: f64, rel_change: f64 },
    #[error("resonance obstruction on curve k={k}: max |g| = {max_violation:.3e}")]
    ResonanceObstruction { k: i64, max_violation: f64 },
    #[error("invalid indices: {0}")]
    InvalidIndices(String),
    #[error("point outside the plateau")]
    OutsidePlateau,
    #[error("resonant frequency v={0}")]
    ResonantFrequency(f64),
    #[error("not a root: {0}")]
    NotARoot(String),
    #[error("singular locus meets the grid: masked fraction {masked_fraction:.4}")]
    SingularLocus { masked_fraction: f64 },
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("fit residual {0:.3e} exceeds 0.05")]
    FitUnstable(f64),
    #[error("direction not computable: {0}")]
    DirectionNotComputable(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::UnknownGenerator { .. } => "UnknownGenerator",
            Error::InvalidModel(_) => "InvalidModel",
            Error::NoSL2Triple(_) => "NoSL2Triple",
            Error::DecompositionMismatch(_) => "DecompositionMismatch",
            Error::ShapeMismatch(_) => "ShapeMismatch",
            Error::UnsupportedDerivativeOrder { .. } => "UnsupportedDerivativeOrder",
            Error::UnsupportedOrder(_) => "UnsupportedOrder",
            Error::OutsideSupport => "OutsideSupport",
            Error::QuadratureNotConverged { .. } => "QuadratureNotConverged",
            Error::ResonanceObstruction { .. } => "ResonanceObstruction",
            Error::InvalidIndices(_) => "InvalidIndices",
            Error::OutsidePlateau => "OutsidePlateau",
            Error::ResonantFrequency(_) => "ResonantFrequency",
            Error::NotARoot(_) => "NotARoot",
            Error::SingularLocus { .. } => "SingularLocus",
            Error::DegenerateInput(_) => "DegenerateInput",
            Error::FitUnstable(_) => "FitUnstable",
            Error::DirectionNotComputable(_) => "DirectionNotComputable",
            Error::Config(_) => "Config",
            Error::Io(_) => "Io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
