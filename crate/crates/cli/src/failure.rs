use std::fmt;

use cavity_ghz::Error;

/// A failed run, carrying the process exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad input; exit code 2.
    Validation(String),
    /// Truncation or norm problems; exit code 3.
    Numerical(String),
    /// Could not write the report; exit code 1.
    Io(String),
}

impl Failure {
    pub fn validation(name: &str, reason: impl fmt::Display) -> Self {
        Failure::Validation(format!("invalid `{name}`: {reason}"))
    }

    pub fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Io(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Validation(m) | Failure::Numerical(m) | Failure::Io(m) => f.write_str(m),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::TailMassExceeded { .. } => Failure::Numerical(format!("{e} (increase `dim` or lower `alpha`)")),
            Error::DegenerateCat => Failure::validation("alpha", e),
            _ if e.is_numerical() => Failure::Numerical(e.to_string()),
            _ => Failure::Validation(e.to_string()),
        }
    }
}
