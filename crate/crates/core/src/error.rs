use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Non-finite coefficients or a runaway amplitude.
    #[error("blow-up at t = {time}: {reason}")]
    BlowUp { time: f64, reason: String },

    /// Mode adaptation asked for more modes than allowed.
    #[error("mode saturation at t = {time}: {requested} modes requested, limit {limit}")]
    Saturation {
        time: f64,
        requested: usize,
        limit: usize,
    },

    /// The stationary iteration produced an exponent beyond floating-point range.
    #[error("exponent range {range:.1} exceeds {limit} (profile too sharp at this D)")]
    Overflow { range: f64, limit: f64 },

    #[error("zero local mass on the requested interval")]
    ZeroMass,
}
