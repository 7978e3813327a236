use crate::address::Address;

/// Errors raised by tree, embedding and monoid operations.
///
/// Analysis outcomes that are legitimately undecided at a finite horizon
/// (for instance [`crate::classify::Verdict::HorizonExceeded`]) are not errors;
/// they are reported as part of the result.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("address {0} is not a vertex of the tree")]
    InvalidAddress(Address),

    #[error("malformed tree: {0}")]
    MalformedTree(String),

    #[error("decoration adds {requested} children but the cap is {cap}")]
    DecorationCap { requested: usize, cap: usize },

    #[error("embedding `{name}` is not defined on this tree: {reason}")]
    IncompatibleEmbedding { name: String, reason: String },

    #[error("embedding maps {input} to {output}, which is not a vertex")]
    InvalidImage { input: Address, output: Address },

    #[error("inverse hint maps {target} to {hint}, but the embedding sends {hint} to {image}")]
    InconsistentInverse {
        target: Address,
        hint: Address,
        image: Address,
    },

    #[error("embeddings live on different trees")]
    TreeMismatch,

    #[error("{0} and {1} are not adjacent")]
    NotAdjacent(Address, Address),

    #[error("{0}")]
    InvalidArgument(String),

    #[error("ray rule broken at step {step}: {reason}")]
    BadRay { step: usize, reason: String },

    #[error("horizon too small: {0}")]
    HorizonInsufficient(String),

    #[error("embedding is elliptic; {0}")]
    Elliptic(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("verification failed: {0}")]
    VerificationFailed(String),

    #[error("budget exceeded: {0}")]
    Budget(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
