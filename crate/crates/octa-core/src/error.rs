use thiserror::Error;

use crate::lattice::{FacePoint, LatticePoint};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("lattice parity violated: n={n}, i={i}, j={j} requires n ≡ i+j (mod 2)")]
    LatticeParity { n: i64, i: i64, j: i64 },
    #[error("edge label parity violated: ({i},{j}) requires i+j odd")]
    EdgeLabelParity { i: i64, j: i64 },
    #[error("unknown height family `{0}`")]
    UnknownFamily(String),
    #[error("gale-robinson parameters out of range: need 0 < a,b < k, got k={k}, a={a}, b={b}")]
    GaleRobinsonParams { k: i64, a: i64, b: i64 },
    #[error("invalid periodic table: {0}")]
    InvalidPeriodicTable(String),
    #[error("invalid overrides: {0}")]
    InvalidOverrides(String),
    #[error("invalid height function JSON: {0}")]
    HeightJson(String),
    #[error("apex {0:?} is not above the initial surface")]
    ApexNotAboveSurface(LatticePoint),
    #[error("point {0:?} lies below the initial surface")]
    PointBelowSurface(LatticePoint),
    #[error("cone scan exceeded its radius bound {bound}; height function is likely improper")]
    ScanBoundExceeded { bound: i64 },
    #[error("invalid local heights at cell ({i},{j}): adjacent faces must differ by exactly 1")]
    InvalidLocalHeights { i: i64, j: i64 },

    #[error("division by zero polynomial")]
    DivisionByZero,
    #[error("division is not exact")]
    DivisionNotExact,
    #[error("substituting 0 for a variable with a negative exponent")]
    NegativePowerOfZero,
    #[error("substituted value is not an invertible monomial but appears at a negative exponent")]
    NonInvertibleSubstitution,
    #[error("cannot parse polynomial: {0}")]
    PolyParse(String),

    #[error("non-integer step in gale-robinson sequence at index {index}")]
    NonIntegerStep { index: usize },

    #[error("enumeration limit exceeded: {0}")]
    SizeLimitExceeded(String),
    #[error("edge set is not a matching: {0}")]
    NotAMatching(String),

    #[error("invalid split site: {0}")]
    InvalidSplitSite(String),
    #[error("face ({},{}) is not renewable here: {reason}", face.i, face.j)]
    FaceNotRenewable { face: FacePoint, reason: String },
    #[error("face ({},{}) is not a strict local minimum", .0.i, .0.j)]
    NotALocalMinimum(FacePoint),

    #[error("condensation requires the apex two levels above the surface at its own face")]
    SimplifyingAssumptionViolated,
    #[error("condensation identity violated: {0}")]
    IdentityViolated(String),
    #[error("edge-exponent recovery inconsistent: {0}")]
    InconsistentExponents(String),
    #[error("not a subgraph: {0}")]
    NotASubgraph(String),
    #[error("height integration inconsistent: {0}")]
    PathInconsistency(String),
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("window collar too thin: {0}")]
    CollarTooThin(String),

    #[error("sampler produced a non-integer face weight at ({},{})", .0.i, .0.j)]
    NonIntegerX(FacePoint),
    #[error("no local-minimum face available below the cone; height function invalid")]
    NoLocalMinimum,

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// True for errors that falsify a verified property rather than reject bad input.
    pub fn is_invariant_violation(&self) -> bool {
        matches!(
            self,
            Error::DivisionNotExact
                | Error::IdentityViolated(_)
                | Error::InconsistentExponents(_)
                | Error::PathInconsistency(_)
                | Error::NonIntegerX(_)
                | Error::NoLocalMinimum
                | Error::Internal(_)
        )
    }
}
