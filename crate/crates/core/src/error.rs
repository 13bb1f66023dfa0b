use thiserror::Error;

/// Errors raised while loading robot descriptions or solving poses.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("missing field `{0}`")]
    MissingField(String),

    #[error("parameter `{name}` = {value} is out of range ({expected})")]
    OutOfRange {
        name: String,
        value: f64,
        expected: &'static str,
    },

    #[error("invalid robot spec: {0}")]
    InvalidSpec(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error("target out of reach: {0}")]
    Unreachable(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    /// No sign change of the reachability function across any bracket.
    #[error("no valid tilt: f(m1) = {f_m1:.6}, f(m2) = {f_m2:.6}, f(m3) = {f_m3:.6}")]
    InfeasibleTilt { f_m1: f64, f_m2: f64, f_m3: f64 },

    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    /// Iteration limit hit; carries the best iterate found.
    #[error("no convergence after {iterations} iterations (best x = {best}, f = {residual})")]
    NoConvergence {
        best: f64,
        residual: f64,
        iterations: usize,
    },

    /// A benchmark scenario did not produce its declared status.
    #[error("configuration: {0}")]
    Config(String),

    #[error("i/o: {0}")]
    Io(String),

    #[error("parse: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn out_of_range(name: impl Into<String>, value: f64, expected: &'static str) -> Self {
        Error::OutOfRange {
            name: name.into(),
            value,
            expected,
        }
    }

    /// True for errors that describe an unattainable request rather than malformed input.
    pub fn is_infeasible(&self) -> bool {
        matches!(
            self,
            Error::Infeasible(_)
                | Error::InfeasibleTilt { .. }
                | Error::Unreachable(_)
                | Error::Bracket { .. }
                | Error::NoConvergence { .. }
                | Error::Degenerate(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        let msg = e.to_string();
        // serde reports absent keys as "missing field `x` at line .."
        if let Some(rest) = msg.strip_prefix("missing field `") {
            if let Some(end) = rest.find('`') {
                return Error::MissingField(rest[..end].to_string());
            }
        }
        Error::Parse(msg)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
