use thiserror::Error;

use crate::elliptic::EllipticError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Elliptic(#[from] EllipticError),
    #[error("lambda_5 = {0} is not an admissible level: the reduction needs lambda_5 = C0 != 0")]
    LevelSet(f64),
    #[error("coordinate singularity: {0}")]
    CoordinateSingularity(String),
    #[error("vector is not horizontal: defect dz - y1 dx1 - y2 dx2 = {0:e}")]
    NotHorizontal(f64),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate profile: double root of f at r* = {r_star}; the only orbit is the constant-radius one r = r*")]
    Degenerate { r_star: f64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
