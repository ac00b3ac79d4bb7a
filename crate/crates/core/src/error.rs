use thiserror::Error;

/// Errors shared by the whole crate.
///
/// Verification failures are *not* errors: they come back as report values
/// from `verify_matching`. Everything here is either bad input or an internal
/// guard tripping.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("permutation {0} is not a bijection on 0..n")]
    NotABijection(usize),
    #[error("matchings {c1} and {c2} share the edge at A-vertex {u}")]
    MatchingsOverlap { u: u32, c1: usize, c2: usize },
    #[error("n = {0} is too small: three pairwise disjoint perfect matchings need n >= 3")]
    NTooSmall(usize),
    #[error("permutation {c} has length {got}, expected {expected}")]
    LengthMismatch {
        c: usize,
        expected: usize,
        got: usize,
    },

    #[error("matching has size {got}, expected {expected}")]
    MatchingWrongSize { expected: usize, got: usize },
    #[error("shift positions ({i}, {j}) must be odd/even with i < j")]
    BadParity { i: usize, j: usize },
    #[error("position {pos} out of range 1..={max}")]
    OutOfRange { pos: usize, max: usize },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("vertex is saturated by the matching")]
    VertexSaturated,
    #[error("walk start is saturated by the matching")]
    StartSaturated,
    #[error("cycle matching parameter k = {k} out of range 0..{half}")]
    KOutOfRange { k: usize, half: usize },

    #[error("budgets sum to {sum}, need at least 2m-1 = {needed}")]
    BudgetTooSmall { sum: usize, needed: usize },
    #[error("precondition violated: {0}")]
    PreconditionViolated(&'static str),

    #[error("target multiplicities sum to {sum}, expected n-1 = {expected}")]
    InvalidTargetSum { sum: usize, expected: usize },
    #[error("instance is not connected")]
    NotConnected,
    #[error("target has no edges of color 3 to trade away")]
    A3Zero,
    #[error("iteration guard exceeded after {0} pipeline steps (internal bug)")]
    IterationGuardExceeded(u64),

    #[error("n = {n} exceeds the brute-force cap {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("generation budget exceeded after {0} attempts")]
    GenerationBudgetExceeded(usize),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
