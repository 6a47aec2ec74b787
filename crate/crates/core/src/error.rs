use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("element is not strictly loxodromic (tr^2 = {re} + {im}i)")]
    NotLoxodromic { re: f64, im: f64 },

    #[error("fixed points coincide or collide with the normalization points")]
    DegenerateFixedPoints,

    #[error("matrix is singular")]
    Singular,

    #[error("Moebius image of the circle is a line")]
    ImageIsLine,

    #[error("circles meet or are tangent (inversive distance {delta})")]
    CirclesMeet { delta: f64 },

    #[error("argument lies on a branch pole")]
    BranchPole,

    #[error("denominator vanishes")]
    ZeroDenominator,

    #[error("logarithm argument vanishes")]
    ZeroArgument,

    #[error("trace triple ({x}, {y}, {z}) does not describe a hyperbolic one-holed torus")]
    NotHyperbolicTriple { x: f64, y: f64, z: f64 },

    #[error("trace triple has commutator trace -2 (cusp)")]
    CuspDegenerate,

    #[error("involution factorization is rank deficient")]
    DegenerateFactorization,

    #[error("series not converged: last three levels contribute {tail:e}, need < {limit:e}")]
    NonConvergence { tail: f64, limit: f64 },

    #[error("tail fit needs at least 10 levels, got {levels}")]
    InsufficientPrefix { levels: usize },

    #[error("path leaves the strictly loxodromic locus at t = {t} (word {word})")]
    PathExitsLoxodromy { t: f64, word: String },

    #[error("branch tracking failed to resolve a jump near t = {t}")]
    BranchTracking { t: f64 },

    #[error("path validation failed at sample {sample} of {samples}")]
    PathValidationFailed { sample: usize, samples: usize },

    #[error("group has no classical circle certificate")]
    NotCertified,

    #[error("word is not reduced: {0}")]
    NotReduced(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    /// Module that raises this error, used for provenance in CLI reports.
    pub fn module(&self) -> &'static str {
        use Error::*;
        match self {
            NotLoxodromic { .. } | Singular | ImageIsLine | CirclesMeet { .. } | BranchPole => {
                "moebius"
            }
            DegenerateFixedPoints | NotCertified | NotReduced(_) => "schottky",
            NotHyperbolicTriple { .. } | CuspDegenerate | DegenerateFactorization => "curves",
            ZeroDenominator | ZeroArgument | NonConvergence { .. } | InsufficientPrefix { .. } => {
                "identities"
            }
            PathExitsLoxodromy { .. } | BranchTracking { .. } | PathValidationFailed { .. } => {
                "continuation"
            }
            InvalidInput(_) | Io(_) => "io",
        }
    }

    /// Stable variant name for machine-readable reports.
    pub fn kind(&self) -> &'static str {
        use Error::*;
        match self {
            NotLoxodromic { .. } => "NotLoxodromic",
            DegenerateFixedPoints => "DegenerateFixedPoints",
            Singular => "Singular",
            ImageIsLine => "ImageIsLine",
            CirclesMeet { .. } => "CirclesMeet",
            BranchPole => "BranchPole",
            ZeroDenominator => "ZeroDenominator",
            ZeroArgument => "ZeroArgument",
            NotHyperbolicTriple { .. } => "NotHyperbolicTriple",
            CuspDegenerate => "CuspDegenerate",
            DegenerateFactorization => "DegenerateFactorization",
            NonConvergence { .. } => "NonConvergence",
            InsufficientPrefix { .. } => "InsufficientPrefix",
            PathExitsLoxodromy { .. } => "PathExitsLoxodromy",
            BranchTracking { .. } => "BranchTracking",
            PathValidationFailed { .. } => "PathValidationFailed",
            NotCertified => "NotCertified",
            NotReduced(_) => "NotReduced",
            InvalidInput(_) => "InvalidInput",
            Io(_) => "Io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::InvalidInput(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
