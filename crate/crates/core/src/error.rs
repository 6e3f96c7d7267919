use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid margins: {0}")]
    InvalidMargins(String),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("margin mismatch: {0:?} vs {1:?}")]
    MarginMismatch(Vec<u32>, Vec<u32>),

    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),

    #[error("off-diagonal type is not balanced at index {0}")]
    Unbalanced(usize),

    /// `a*_jj > n_j` for some block `j` (1-based in the message).
    #[error("diagonal overflow at block {block}: star sum {star} exceeds n = {n}")]
    Overflow { block: usize, star: u32, n: u32 },

    /// Some `a*_jj > n_j` on an operand of a specialization.
    #[error("operand outside the specialization domain at block {block}: star sum {star} exceeds n = {n}")]
    OutsideDomain { block: usize, star: u32, n: u32 },

    #[error("brute-force limit exceeded: N = {n} > {limit}")]
    LimitExceeded { n: u32, limit: u32 },

    #[error("basis too large: {size} > {bound}")]
    BoundExceeded { size: usize, bound: usize },

    /// Factor `(1 - m eps_j)` vanishes at the specialization point; `j` is 0-based.
    #[error("pole at specialization: factor (1 - {m} eps_{}) vanishes", .j + 1)]
    PoleAtSpecialization { j: usize, m: u32 },

    #[error("invalid bracket: p = {p} > q = {q}")]
    InvalidBracket { p: u32, q: u32 },

    #[error("division by a non-unit of the eps-ring")]
    NonUnitDivision,

    #[error("invalid hypergeometric parameters: {0}")]
    InvalidParameters(String),

    #[error("invalid index: {0}")]
    InvalidIndex(String),

    #[error("parse error: {0}")]
    Parse(String),
}
