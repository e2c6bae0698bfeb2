use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("form is not skew-symmetric")]
    NotSkew,

    #[error("form is degenerate (zero determinant)")]
    DegenerateForm,

    #[error("gcd witness undefined for (0, 0)")]
    ZeroGcd,

    #[error("invalid generator family parameters: {0}")]
    InvalidFamily(String),

    #[error("matrix is not symplectic for the context form")]
    NotSymplectic,

    #[error("integer overflow in lattice arithmetic")]
    Overflow,

    #[error("operation requires genus 1 (dimension 2), found dimension {0}")]
    GenusNotOne(usize),

    #[error("duplicate generator {0:?} in Gram request")]
    DuplicateGenerator(Vec<i128>),

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("nothing to refute: orbit value is zero")]
    NothingToRefute,

    #[error("search budget of {budget} iterations exhausted (best residual {best_residual:e} at N = {best_n:?})")]
    BudgetExhausted {
        budget: u64,
        best_n: Option<u128>,
        best_residual: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
