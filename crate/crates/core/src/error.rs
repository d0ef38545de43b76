use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("enumeration cap exceeded: {required} points requested, cap is {cap}")]
    EnumerationCap { required: u128, cap: u128 },

    #[error("search-space cap exceeded for exhaustive Dirichlet approximation (Q = {q})")]
    SearchCap { q: f64 },

    #[error("field is not norm-Euclidean; residue arithmetic unsupported")]
    NotNormEuclidean,

    #[error("arguments are not coprime: common divisor has norm {norm}")]
    NotCoprime { norm: String },

    #[error("division by zero element")]
    DivisionByZero,

    #[error("missing unit data for field")]
    MissingUnits,

    #[error("argument cap exceeded: n = {n}, cap = {cap}")]
    ArgumentCap { n: u64, cap: u64 },

    #[error("evaluation too close to a pole of the gamma factor (distance {dist:e})")]
    PoleProximity { dist: f64 },

    #[error("requested tolerance {tol:e} unreachable within node budget (estimated error {err:e})")]
    ToleranceUnreachable { tol: f64, err: f64 },

    #[error("tail bound {tail:e} not achievable at configured truncation radius {radius}")]
    TailBound { tail: f64, radius: f64 },

    #[error("invalid field configuration: {0}")]
    FieldConfig(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("quadrature failure: {0}")]
    Quadrature(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
