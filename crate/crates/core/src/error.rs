use thiserror::Error;

/// Everything that can go wrong in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("symbol is singular at p = {p}")]
    SingularPoint { p: f64 },
    #[error("point lies within {distance:e} of the symbol curve")]
    OnCurve { distance: f64 },
    #[error("inversion did not converge for E = {re}{im:+}i (residual {residual:e})")]
    Convergence { re: f64, im: f64, residual: f64 },
    #[error("eigenvalue {index}: {source}")]
    AtIndex {
        index: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("matrix of order {n} exceeds the limit {limit}")]
    Capacity { n: usize, limit: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("spectrum is numerically degenerate (gap {gap:e})")]
    Degenerate { gap: f64 },
    #[error("eigenvector basis is ill-posed (condition estimate {cond:e})")]
    IllPosedBasis { cond: f64 },
    #[error("QR iteration failed to converge")]
    NoConvergence,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("eigenvalues {0} and {1} are too close for perturbation theory")]
    NearDegenerate(usize, usize),
    #[error("eigenvalue {0} is real and has no conjugate partner")]
    NoConjugate(usize),
    #[error("spectral parameter coincides with eigenvalue {0}")]
    Pole(usize),
    #[error("ambiguous matching between sigma = {from} and sigma = {to}")]
    GridTooCoarse { from: f64, to: f64 },
    #[error("centroid lies on the polyline")]
    DegenerateCurve,
    #[error("vector norm {0} is not 1")]
    Normalization(f64),
    #[error("histogram axes differ")]
    AxisMismatch,
    #[error("io: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn at(self, index: usize) -> Error {
        Error::AtIndex { index, source: Box::new(self) }
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::AtIndex { source, .. } => source.is_numerical(),
            Error::Convergence { .. }
            | Error::Degenerate { .. }
            | Error::IllPosedBasis { .. }
            | Error::NoConvergence
            | Error::NearDegenerate(..)
            | Error::GridTooCoarse { .. }
            | Error::DegenerateCurve
            | Error::Pole(_)
            | Error::SingularPoint { .. }
            | Error::OnCurve { .. } => true,
            _ => false,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
