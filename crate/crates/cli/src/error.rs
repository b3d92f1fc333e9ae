use std::fmt;
use std::path::Path;

/// Error categories, each with a stable machine-readable code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Usage,
    Config,
    Io,
    Parse,
    Dimension,
    Solver,
}

impl Kind {
    pub fn code(self) -> &'static str {
        match self {
            Kind::Usage => "E_USAGE",
            Kind::Config => "E_CONFIG",
            Kind::Io => "E_IO",
            Kind::Parse => "E_PARSE",
            Kind::Dimension => "E_DIMENSION",
            Kind::Solver => "E_SOLVER",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Kind::Usage => 2,
            Kind::Config => 3,
            Kind::Io => 4,
            Kind::Parse => 5,
            Kind::Dimension => 6,
            Kind::Solver => 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub kind: Kind,
    pub message: String,
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

impl CliError {
    pub fn new(kind: Kind, message: impl Into<String>) -> Self {
        Self {
            kind,
            message: message.into(),
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self::new(Kind::Config, message)
    }

    pub fn parse(path: &Path, line: usize, message: impl fmt::Display) -> Self {
        Self::new(Kind::Parse, format!("{}:{line}: {message}", path.display()))
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        Self::new(Kind::Io, format!("{}: {err}", path.display()))
    }

    /// The single line printed to stderr: `error[CODE]: message`.
    pub fn line(&self) -> String {
        let msg = self.message.replace('\n', " ");
        format!("error[{}]: {msg}", self.kind.code())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.line())
    }
}

impl std::error::Error for CliError {}

impl From<anomedge_core::Error> for CliError {
    fn from(err: anomedge_core::Error) -> Self {
        use anomedge_core::Error as E;
        let kind = match err {
            E::Dimension { .. } => Kind::Dimension,
            E::InvalidParameter { .. } | E::InsufficientCandidates { .. } | E::Disconnected { .. } => Kind::Config,
            E::NotSymmetric { .. }
            | E::NegativeWeight { .. }
            | E::SelfLoop(_)
            | E::DuplicateEdge(..)
            | E::NodeOutOfRange { .. }
            | E::NonFinite(_) => Kind::Parse,
            _ => Kind::Solver,
        };
        CliError::new(kind, err.to_string())
    }
}
