use thiserror::Error;

/// Errors reported by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Parameter bundle violates `1 <= t <= k <= n`.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// An operation's stated precondition does not hold for the given input.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Ground sets with more than 64 positions cannot be represented as bitmasks.
    #[error("ground set too large for bitmask representation: n = {0} > 64")]
    GroundSetTooLarge(u64),

    /// A set literal lies outside the ground set or has the wrong cardinality.
    #[error("invalid set: {0}")]
    InvalidSet(String),

    /// Operation requires a non-empty family.
    #[error("operation requires a non-empty family")]
    EmptyFamily,

    /// Families passed together must share one ground set.
    #[error("mismatched ground sets: n = {0} vs n = {1}")]
    MismatchedGroundSet(u64, u64),

    /// Operation requires a t-intersecting family.
    #[error("family is not t-intersecting")]
    NotIntersecting,

    /// Operation requires a maximal t-intersecting family.
    #[error("family is not maximal")]
    NotMaximal,

    /// Construction parameters fail the variant's structural invariants.
    #[error("invalid construction parameters: {0}")]
    InvalidConstruction(String),

    /// A text document failed to parse; `line` is 1-based.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Exact search would need to materialize too many candidate sets.
    #[error("instance too large for exact search: C({n},{k}) = {count} candidates")]
    InstanceTooLarge { n: u64, k: u32, count: u64 },

    /// The two high-n probes of the asymptotic comparison disagreed.
    #[error("asymptotic winner probes disagree at k={k}, t={t}")]
    WinnerDisagreement { k: u32, t: u32 },
}

pub type Result<T> = std::result::Result<T, Error>;
