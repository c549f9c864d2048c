use thiserror::Error;

/// Errors raised by the discretization, solvers and experiment driver.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("singular system: {0}")]
    SingularSystem(String),

    #[error("degenerate curve: element {element} has |x_rho| = {length:e}{}", step_suffix(*.step))]
    DegenerateCurve {
        element: usize,
        length: f64,
        step: Option<usize>,
    },

    #[error("outside domain of definition: {0}")]
    Domain(String),

    #[error("division by a jet with zero value")]
    ZeroDivision,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("error values must be positive, found {0:e}")]
    NonPositiveError(f64),

    #[error("i/o error: {0}")]
    Io(String),
}

fn step_suffix(step: Option<usize>) -> String {
    match step {
        Some(m) => format!(" at step {m}"),
        None => String::new(),
    }
}

impl Error {
    /// Attach the time step index to errors raised while stepping.
    pub fn at_step(self, m: usize) -> Self {
        match self {
            Error::DegenerateCurve {
                element, length, ..
            } => Error::DegenerateCurve {
                element,
                length,
                step: Some(m),
            },
            Error::SingularSystem(msg) => Error::SingularSystem(format!("{msg} (step {m})")),
            other => other,
        }
    }

    /// True for errors caused by invalid user input rather than a failed run.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::InvalidGrid(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
