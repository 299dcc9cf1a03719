use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid permutation {0:?}")]
    InvalidPermutation(Vec<usize>),
    #[error("invalid subset {elements:?} of [{n}]")]
    InvalidSubset { elements: Vec<usize>, n: usize },
    #[error("permutation {perm:?} is not in S^{j}_n")]
    NotInClass { perm: Vec<usize>, j: usize },
    #[error("{legs} legs exceed the enumeration ceiling {ceiling}")]
    CeilingExceeded { legs: usize, ceiling: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("pairing order {j} exceeds available legs ({available})")]
    PairingTooLarge { j: usize, available: usize },
    #[error("tensor of {legs} legs does not fit truncation {truncation}")]
    TruncationTooSmall { legs: usize, truncation: usize },
    #[error("expected a real vector or map")]
    NotReal,
    #[error("entry depends on q where a q-independent value is required")]
    SymbolicEntry,
    #[error("map is not a contraction (norm {0})")]
    NotContraction(f64),
    #[error("invalid time parameter t = {0}")]
    InvalidTime(f64),
    #[error("deformation parameter must satisfy |q| < 1, got {0}")]
    InvalidQ(String),
    #[error("Gram matrix at level {0} is not numerically positive definite")]
    NotPositiveDefinite(usize),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("report error: {0}")]
    Report(String),
}

pub type Result<T> = std::result::Result<T, Error>;
