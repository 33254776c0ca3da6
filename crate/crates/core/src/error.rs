use std::path::PathBuf;

use thiserror::Error;

use crate::grid::Voxel;

/// Which end of a query an error refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Start,
    Goal,
}

impl std::fmt::Display for Endpoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Endpoint::Start => f.write_str("start"),
            Endpoint::Goal => f.write_str("goal"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error("format error at byte {offset}: {reason}")]
    Format { offset: u64, reason: String },
    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("no candidates")]
    NoCandidates,
    #[error("seed snap failed{}: nearest state is {distance:.3} m away (max {max_snap:.3} m)", which.map(|w| format!(" ({w})")).unwrap_or_default())]
    SeedSnapFailed {
        which: Option<Endpoint>,
        distance: f64,
        max_snap: f64,
    },
    #[error("invalid seed {0:?}: not a candidate")]
    InvalidSeed(Option<Voxel>),
    #[error("{which} state {voxel:?} is not on the surface")]
    NotOnSurface { which: Endpoint, voxel: Voxel },
    #[error("goal {goal:?} is unreachable from {start:?}")]
    Unreachable { start: Voxel, goal: Voxel },
    #[error("insufficient floors: surface spans {span} voxels vertically, cross-floor pairs need {needed}")]
    InsufficientFloors { span: i32, needed: i32 },
    #[error("spec out of bounds: {0}")]
    SpecOutOfBounds(String),
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    RawIo(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Attach a path to an I/O error, mapping `NotFound` to [`Error::FileNotFound`].
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        let path = path.into();
        if source.kind() == std::io::ErrorKind::NotFound {
            Error::FileNotFound(path)
        } else {
            Error::Io { path, source }
        }
    }

    /// True for errors caused by bad user input (files, flags, formats), as
    /// opposed to failures inside the extraction/planning pipeline.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::EmptyInput
                | Error::InvalidPoint(_)
                | Error::InvalidParams(_)
                | Error::Format { .. }
                | Error::Parse { .. }
                | Error::SpecOutOfBounds(_)
                | Error::UnknownPreset(_)
                | Error::FileNotFound(_)
                | Error::Io { .. }
                | Error::RawIo(_)
                | Error::Json(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
