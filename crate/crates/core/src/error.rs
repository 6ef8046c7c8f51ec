use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MomentsError {
    #[error("invalid moment order {order}: must be between 2 and {max}")]
    InvalidOrder { order: usize, max: usize },
    #[error("accumulator is empty")]
    EmptyAccumulator,
    #[error("input value {0} is not finite")]
    NonFiniteInput(f64),
    #[error("{0} is undefined: the data has zero variance")]
    UndefinedStatistic(&'static str),
    #[error("cannot combine accumulators of order {left} and {right}")]
    IncompatibleAccumulators { left: usize, right: usize },
    #[error("accumulator state overflowed to a non-finite value")]
    Saturated,
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("kernel `{kernel}` does not support order {order}")]
    UnsupportedKernel { kernel: String, order: usize },
    #[error("unknown update kernel `{0}`")]
    UnknownKernel(String),
}

pub type Result<T, E = MomentsError> = std::result::Result<T, E>;
