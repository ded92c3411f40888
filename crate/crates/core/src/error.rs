use crate::svm::SvmModel;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("wrong kernel: expected {expected}, got {found}")]
    WrongKernel { expected: &'static str, found: String },

    #[error("offset c = {0} is negative; the complex feature map needs sqrt(c)")]
    NegativeOffset(f64),

    #[error("covariance is singular (eigenvalue {0:e}); use a positive ridge")]
    SingularCovariance(f64),

    #[error("Jacobi eigendecomposition did not converge after {0} sweeps")]
    EigenNotConverged(usize),

    #[error("imaginary residual {0:e} exceeds tolerance")]
    ImaginaryResidual(f64),

    #[error("SMO did not converge: {diagnostic}")]
    NotConverged {
        model: Box<SvmModel>,
        diagnostic: String,
    },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    /// Numeric failures (convergence, singularity) as opposed to bad input or I/O.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::NotConverged { .. }
                | Error::SingularCovariance(_)
                | Error::EigenNotConverged(_)
                | Error::ImaginaryResidual(_)
        )
    }
}
