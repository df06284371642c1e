use std::path::{Path, PathBuf};

use qsteg::{CameraError, CodecError, ImageError, StatError, StegoError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Image { path: PathBuf, source: ImageError },
    #[error("{0}")]
    Format(String),
    #[error("decode failed: {0}")]
    Decode(CodecError),
    #[error("verdict: suspicious")]
    Suspicious,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io { .. } | CliError::Image { .. } | CliError::Format(_) => 2,
            CliError::Decode(_) => 3,
            CliError::Suspicious => 4,
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

impl From<CameraError> for CliError {
    fn from(e: CameraError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<StegoError> for CliError {
    fn from(e: StegoError) -> Self {
        match e {
            StegoError::InvalidBlockPixels => CliError::Usage(e.to_string()),
            _ => CliError::Format(e.to_string()),
        }
    }
}

impl From<StatError> for CliError {
    fn from(e: StatError) -> Self {
        match e {
            StatError::InvalidArgument(_) => CliError::Usage(e.to_string()),
            _ => CliError::Format(e.to_string()),
        }
    }
}

/// Codec errors raised while embedding are caller mistakes.
pub fn embed_error(e: qsteg::Error) -> CliError {
    match e {
        qsteg::Error::Codec(c) => CliError::Usage(c.to_string()),
        qsteg::Error::Stego(s) => s.into(),
        other => CliError::Format(other.to_string()),
    }
}

/// Codec errors raised while extracting mean the message could not be read.
pub fn extract_error(e: qsteg::Error) -> CliError {
    match e {
        qsteg::Error::Codec(c @ (CodecError::ParityOutOfRange(_) | CodecError::InvalidBlockPixels)) => {
            CliError::Usage(c.to_string())
        }
        qsteg::Error::Codec(c) => CliError::Decode(c),
        qsteg::Error::Stego(s) => s.into(),
        other => CliError::Format(other.to_string()),
    }
}
