use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid parameters: {0}")]
    InvalidGrid(String),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("shape mismatch: expected {expected} coefficients, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("dilation by {shift} leaves the covered band with nonzero mass")]
    OutOfBand { shift: i64 },
    #[error("operation requires a {0} grid")]
    GridMode(&'static str),
    #[error("quadrature too coarse: orthonormality residual {residual:.3e}")]
    QuadratureTooCoarse { residual: f64 },
    #[error("point outside the quadrature window: {0}")]
    OutsideWindow(String),
    #[error("physical and frequency grids are not paired: {0}")]
    Unpaired(String),
    #[error("input has nonzero s-mean mass {mass:.3e}")]
    NonzeroMean { mass: f64 },
    #[error("invalid symbol: {0}")]
    InvalidSymbol(String),
    #[error("divergence check failed: relative divergence {0:.3e}")]
    Divergence(f64),
    #[error("constraint check failed: {0}")]
    Constraint(String),
    #[error("CFL guard violated: {value:.4} > {guard:.4}")]
    Cfl { value: f64, guard: f64 },
    #[error("non-finite values at t = {t}")]
    NonFinite { t: f64 },
    #[error("estimator undefined: {0}")]
    Estimator(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
