use thiserror::Error;

/// Errors produced by state constructors, channels and estimators.
#[derive(Error, Debug)]
pub enum Error {
    #[error("photon number {n} out of range for mode {mode}: cutoff allows 0..={n_max}")]
    PhotonOutOfRange { mode: char, n: usize, n_max: usize },

    #[error("cutoff mismatch: {left} vs {right}")]
    CutoffMismatch { left: usize, right: usize },

    #[error("state cannot be normalized: squared norm {norm_sq:.3e} below tolerance")]
    Unnormalizable { norm_sq: f64 },

    #[error("zero-probability conditioning: herald outcome has probability {prob:.3e}")]
    Unheraldable { prob: f64 },

    #[error("transmission {t} outside [0, 1]")]
    TransmissionOutOfRange { t: f64 },

    #[error("density operator is not of twin form |n,n><n',n'|: entry at ({na},{nb}),({nc},{nd})")]
    NotTwinForm {
        na: usize,
        nb: usize,
        nc: usize,
        nd: usize,
    },

    #[error("stationary fringe at phi = {phi}: derivative of <Jz_out> vanishes")]
    StationaryFringe { phi: f64 },

    #[error("phase error formula has a pole at phi = {phi}")]
    PhasePole { phi: f64 },

    #[error("quantum Fisher information requires a pure state input")]
    MixedStateQfi,

    #[error("cutoff n_max = {requested} exceeds the configured budget of {budget}")]
    CutoffBudget { requested: usize, budget: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
