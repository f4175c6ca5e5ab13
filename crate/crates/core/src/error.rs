use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid system parameters: {0}")]
    InvalidParams(String),

    #[error("measurement strength {name} = {value} is outside [0, 1)")]
    InvalidStrength { name: &'static str, value: f64 },

    #[error("time must be finite and non-negative, got {0}")]
    InvalidTime(f64),

    #[error("amplitude norm {norm_sqr} exceeds 1 beyond tolerance")]
    Unphysical { norm_sqr: f64 },

    #[error("amplitude vector must be normalized before the weak measurement, norm is {norm_sqr}")]
    NotNormalized { norm_sqr: f64 },

    #[error("normalization factor {0} is not positive")]
    NonPositiveNormalization(f64),

    #[error("oracle produced non-finite values at t = {time}")]
    NonFinite { time: f64 },

    #[error("invalid oracle configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("unknown figure id `{0}`")]
    UnknownFigure(String),

    #[error("sweep grid is empty")]
    EmptyGrid,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("failed to parse input file: {0}")]
    Parse(#[from] toml::de::Error),
}
