use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("point ({x}, {y}) lies outside the domain")]
    OutsideDomain { x: i32, y: i32 },
    #[error("enumeration budget exceeded; levels up to {reached} are complete")]
    BudgetExceeded { reached: usize },
    #[error("level {level} of the degree sequence evaluates to zero children")]
    ZeroDegree { level: usize },
    #[error("invalid graft site {0}")]
    InvalidSite(String),
    #[error("periodic closure needs a finite tree with at least one leaf below the root")]
    NoLeaf,
    #[error("the root has no children")]
    DegenerateRoot,
    #[error("path is not a simple root-started path of the tree")]
    InvalidPath,
    #[error("walk is not a bridge")]
    NotABridge,
    #[error("tolerance {tol} not reached; best width {width} at the largest truncation")]
    RefinementExhausted { tol: f64, width: f64 },
    #[error("walker is stuck at a leaf")]
    Stuck,
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
