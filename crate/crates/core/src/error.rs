use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("device {device} is not a member of the schedule")]
    NotInSchedule { device: usize },

    #[error("device index {device} out of range for {n_devices} devices")]
    DeviceOutOfRange { device: usize, n_devices: usize },

    #[error("schedule of {size} devices exceeds {n_channels} channels")]
    ScheduleTooLarge { size: usize, n_channels: usize },

    #[error("episode finished after {slots} slots")]
    EpisodeFinished { slots: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("non-finite loss during PPO update: {0}")]
    NonFiniteLoss(String),

    #[error("safety invariant broken: {0}")]
    SafetyInvariant(String),

    #[error("malformed config at line {line}: {reason}")]
    ConfigSyntax { line: usize, reason: String },

    #[error("malformed checkpoint: {0}")]
    Checkpoint(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
