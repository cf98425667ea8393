use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("volume is not positive: ‖c‖_T = {norm_t}")]
    NonPositiveVolume { norm_t: f64 },
    #[error("point {re}+{im}i lies outside the admissible region")]
    OutOfDomain { re: f64, im: f64 },
    #[error("Jacobian determinant {det} is not positive")]
    SingularJacobian { det: f64 },
    #[error("cannot project the zero shape onto a sphere")]
    ZeroShape,
    #[error("rigid mass matrix is singular (det = {det})")]
    SingularMr { det: f64 },
    #[error("reduced mass matrix is not positive definite")]
    SingularK,
    #[error("state became non-finite at t = {t}")]
    NonFiniteState { t: f64 },
    #[error("step too large: halving dt moved the endpoint by {gap}")]
    StepTooLarge { gap: f64 },
    #[error("a-priori velocity bound violated at t = {t}: ‖ċ‖² = {speed_sq} > {bound}")]
    BoundViolation { t: f64, speed_sq: f64, bound: f64 },
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
