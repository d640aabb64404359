use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced anywhere in the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("altitude {altitude_km} km falls in the unclassified gap {gap}")]
    UnclassifiableAltitude { altitude_km: f64, gap: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("frequency {fc_ghz} GHz outside table grid [{min_ghz}, {max_ghz}] GHz")]
    TableDomain {
        fc_ghz: f64,
        min_ghz: f64,
        max_ghz: f64,
    },

    #[error("table error: {0}")]
    Table(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },

    #[error("missing required key `{0}`")]
    MissingKey(String),

    #[error("hop {hop}: {reason}")]
    Chain { hop: usize, reason: String },

    #[error("sweep spec error: {0}")]
    Spec(String),

    #[error("unknown preset `{name}` (valid: {valid})")]
    Preset { name: String, valid: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
