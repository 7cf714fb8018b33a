use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("index {index} out of range (must be < {bound})")]
    Index { index: usize, bound: usize },

    #[error("operands belong to different algebras")]
    AlgebraMismatch,

    #[error("matrix is singular (rank {rank} < {size})")]
    Singular { rank: usize, size: usize },

    #[error("algebra is degenerate: singular bilinear forms in components {components:?}")]
    Degenerate { components: Vec<usize> },

    #[error("unknown algebra '{name}' (valid names: {valid})")]
    UnknownAlgebra { name: String, valid: String },

    #[error("size limit exceeded: {0}")]
    Size(String),

    #[error("non-finite value in {0}")]
    Numeric(String),
}

impl Error {
    /// True for failures of the arithmetic itself (non-finite values,
    /// singular systems) as opposed to malformed input.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::Numeric(_) | Error::Singular { .. })
    }
}
