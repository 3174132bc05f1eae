use thiserror::Error;

use crate::geometry::InterfaceId;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("negative discriminant {0} in the well-strain formula")]
    NegativeDiscriminant(f64),

    #[error("point ({0}, {1}) lies outside the closed disk")]
    OutsideDisk(f64, f64),

    #[error("no skew part makes the jump rank-one with normal ({0}, {1})")]
    NoJumpSolution(String, String),

    #[error("jump across {0} is not rank-one")]
    NotRankOne(InterfaceId),

    #[error("value not representable in Q(√3): {0}")]
    NotInField(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
