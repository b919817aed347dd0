use krigkit::Error;

/// A failed command, split by who is at fault.
#[derive(Debug)]
pub enum Failure {
    /// Unreadable, malformed or inconsistent input (exit 2).
    Input(anyhow::Error),
    /// The computation itself failed (exit 3).
    Compute(anyhow::Error),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Compute(_) => 3,
        }
    }

    pub fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Input(e) | Failure::Compute(e) => e,
        }
    }

    pub fn input(msg: impl std::fmt::Display) -> Self {
        Failure::Input(anyhow::anyhow!("{msg}"))
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let input = matches!(
            e,
            Error::DimensionMismatch { .. }
                | Error::InvalidKappaMax(_)
                | Error::UnsupportedNu(_)
                | Error::Domain(_)
                | Error::InvalidSize(_)
                | Error::DegenerateBounds { .. }
                | Error::OutOfBounds { .. }
                | Error::InvalidLength(_)
                | Error::TooFewPoints { .. }
                | Error::SchemaVersionMismatch { .. }
                | Error::CorruptFile(_)
                | Error::Alignment { .. }
                | Error::NTooLarge { .. }
                | Error::EmptyCandidates
                | Error::Io(_)
        );
        if input {
            Failure::Input(e.into())
        } else {
            Failure::Compute(e.into())
        }
    }
}

/// Attaches context and classifies a foreign error as an input problem.
pub trait InputContext<T> {
    fn input_ctx(self, what: impl FnOnce() -> String) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> InputContext<T> for Result<T, E> {
    fn input_ctx(self, what: impl FnOnce() -> String) -> Result<T, Failure> {
        self.map_err(|e| Failure::Input(e.into().context(what())))
    }
}
