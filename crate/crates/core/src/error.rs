use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A `Params` invariant does not hold.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// A `DiscreteMeasure` invariant does not hold.
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    /// An argument lies outside the domain of a formula.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("root not bracketed on [{lo}, {hi}] (f(lo) = {f_lo}, f(hi) = {f_hi})")]
    RootNotBracketed { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("bracket expansion failed after {doublings} doublings (last hi = {hi})")]
    BracketExpansion { doublings: usize, hi: f64 },

    /// No known minimal energies surround the requested exponent.
    #[error("no known anchors for alpha = {alpha}, beta = {beta}, n = {n}")]
    NoAnchors { alpha: f64, beta: f64, n: usize },

    #[error("unsupported parameter range: {0}")]
    UnsupportedRange(String),

    #[error("{what} is not unimodal on the scanned grid ({sign_changes} derivative sign changes)")]
    NotUnimodal { what: String, sign_changes: usize },

    /// The simplex / cross-polytope competition check found matching signs.
    #[error(
        "sign relation violated at alpha = {alpha}, beta = {beta}, n = {n}: \
         phi difference {phi_diff:e}, energy difference {energy_diff:e}"
    )]
    SignViolation { alpha: f64, beta: f64, n: usize, phi_diff: f64, energy_diff: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) => 1,
            Error::NoAnchors { .. } | Error::UnsupportedRange(_) => 3,
            _ => 2,
        }
    }
}
