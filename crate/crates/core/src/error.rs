use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building or checking a chain geometry.
///
/// Variants fall into two groups: input problems (bad specs, bad parameters,
/// unsupported sizes) and *violations*, where a computed object disagrees with
/// a known theorem or counting formula. [`Error::is_violation`] tells them
/// apart; the CLI maps violations to exit code 2.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("characteristic {0} is not prime")]
    NonPrimeCharacteristic(u32),
    #[error("modulus {coeffs:?} is reducible over GF({p})")]
    ReducibleModulus { coeffs: Vec<u32>, p: u32 },
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("unsupported field order {0}")]
    UnsupportedOrder(u64),
    #[error("division by zero")]
    DivisionByZero,

    #[error("structure constants are not associative on basis triple ({0}, {1}, {2})")]
    NonAssociative(usize, usize, usize),
    #[error("no unity: {0}")]
    NoUnity(String),
    #[error("bad ring spec: {0}")]
    BadSpec(String),
    #[error("scalars are not central: K*1 fails to commute with basis element {0}")]
    ScalarsNotCentral(usize),
    #[error("element is not a unit")]
    NotAUnit,
    #[error("ring is not local")]
    NotLocal,
    #[error("too large: {0}")]
    TooLarge(String),

    #[error("point orbit inconsistent with counting formulas: {0}")]
    OrbitCountMismatch(String),
    #[error("parallelism is not an equivalence relation: {0}")]
    ParallelismViolation(String),

    #[error("points are not mutually distant")]
    NotMutuallyDistant,
    #[error("triple solve failed: {0}")]
    SolveFailed(String),
    #[error("chain count mismatch: expected {expected}, found {found}")]
    ChainCountMismatch { expected: u64, found: u64 },
    #[error("lambda mismatch: {0}")]
    LambdaMismatch(String),
    #[error("divisible design violated at triple {triple:?}: {message}")]
    DesignViolation { triple: [usize; 3], message: String },

    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("polynomial mismatch at q={q}, t={t}")]
    PolynomialMismatch { q: i64, t: i64 },
    #[error("unknown point id {0}")]
    UnknownPoint(usize),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("counterexample found: {0}")]
    CounterexampleFound(String),
    #[error("set is not blocking in the residue geometry (chain {missed_chain} missed)")]
    NotBlockingDownstairs { missed_chain: usize },

    #[error("wrong ring: {0}")]
    WrongRing(String),
    #[error("chain image is not coplanar (rank {rank})")]
    NotCoplanar { rank: usize },
    #[error("chain image spans a tangent plane {plane:?}")]
    TangentPlane { plane: [u32; 4] },
    #[error("quadric model violated: {0}")]
    ModelViolation(String),

    #[error("bad incidence file: {0}")]
    BadIncidence(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True when the error reports a disagreement with a theorem or counting
    /// formula rather than bad input.
    pub fn is_violation(&self) -> bool {
        matches!(
            self,
            Error::OrbitCountMismatch(_)
                | Error::ParallelismViolation(_)
                | Error::SolveFailed(_)
                | Error::ChainCountMismatch { .. }
                | Error::LambdaMismatch(_)
                | Error::DesignViolation { .. }
                | Error::PolynomialMismatch { .. }
                | Error::CounterexampleFound(_)
                | Error::NotCoplanar { .. }
                | Error::TangentPlane { .. }
                | Error::ModelViolation(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
