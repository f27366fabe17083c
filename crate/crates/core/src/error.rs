use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole at {0}")]
    Pole(String),
    #[error("essential singularity at {0}")]
    EssentialPoint(String),
    #[error("unsupported expression: {0}")]
    UnsupportedExpr(String),
    #[error("expression is not algebraic")]
    NotAlgebraic,
    #[error("singularity not isolated: {0}")]
    NotIsolated(String),
    #[error("no convergence: {0}")]
    NonConvergent(String),
    #[error("path too close to a singularity: {0}")]
    Clearance(String),
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    #[error("singular point (phi = conj psi) at {0}")]
    SingularPoint(String),
    #[error("bad singular end at {0}")]
    BadEnd(String),
    #[error("winding is not an integer: {0}")]
    NotAnInteger(String),
    #[error("jacobian singular at {0}")]
    JacobianSingular(String),
    #[error("inconsistent ledger: {0}")]
    InconsistentLedger(String),
    #[error("parameter error: {0}")]
    Param(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Short machine name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Pole(_) => "Pole",
            Error::EssentialPoint(_) => "EssentialPoint",
            Error::UnsupportedExpr(_) => "UnsupportedExpr",
            Error::NotAlgebraic => "NotAlgebraic",
            Error::NotIsolated(_) => "NotIsolated",
            Error::NonConvergent(_) => "NonConvergent",
            Error::Clearance(_) => "Clearance",
            Error::Quadrature(_) => "Quadrature",
            Error::SingularPoint(_) => "SingularPoint",
            Error::BadEnd(_) => "BadEnd",
            Error::NotAnInteger(_) => "NotAnInteger",
            Error::JacobianSingular(_) => "JacobianSingular",
            Error::InconsistentLedger(_) => "InconsistentLedger",
            Error::Param(_) => "Param",
            Error::Parse(_) => "Parse",
            Error::Io(_) => "Io",
        }
    }
}
