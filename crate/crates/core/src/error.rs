use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Broad cause of a failure. The CLI maps `Model` to exit code 2 and
/// `Numerical` to exit code 3.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Model,
    Numerical,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    // numerics
    NotHermitian { deviation: f64 },
    DidNotConverge { what: &'static str },
    ZeroPolynomial,
    NotAntisymmetric { deviation: f64 },
    OddDimension { dim: usize },
    UnsupportedDimension { dim: usize },
    ShapeMismatch { what: &'static str },
    // models
    MalformedModel(String),
    Gapless { gap: f64, k: [f64; 2] },
    ClassMismatch { expected: &'static str, found: &'static str },
    // clifford
    BadIndex,
    NotDirac { residual: f64 },
    NonzeroTracePart { magnitude: f64 },
    // ellipse
    ZeroHopping,
    DegenerateEllipse { k2: f64 },
    LambdaZero,
    // bulk invariants
    GapClosed { k: f64 },
    MethodDisagreement { first: i32, second: i32 },
    DegenerateZero { k: [f64; 2], jacobian: f64 },
    TangentCrossing { k2: f64 },
    GapClosedAtTrim { k: [f64; 2] },
    NotTri { deviation: f64 },
    DegeneracyMismatch { splitting: f64 },
    EndpointZero,
    UnresolvedSignChange { k2: f64 },
    // edge spectrum
    TrackingAmbiguity { k2: f64, energy: f64 },
    StripTooShort { n: usize, xi: f64 },
    NotSingularHopping { magnitude: f64 },
    DegenerateJacobian { k: [f64; 2] },
    // edge invariants
    UnresolvedCrossing { k2: f64 },
    MixedChirality { chirality: f64 },
    OddCount { count: i32 },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            MalformedModel(_) | Gapless { .. } | ClassMismatch { .. } | BadIndex
            | NotDirac { .. } | NonzeroTracePart { .. } | ZeroHopping | NotTri { .. }
            | NotSingularHopping { .. } | GapClosed { .. } | GapClosedAtTrim { .. }
            | EndpointZero => ErrorKind::Model,
            _ => ErrorKind::Numerical,
        }
    }

    /// Short stable identifier, used in reports.
    pub fn name(&self) -> &'static str {
        use Error::*;
        match self {
            NotHermitian { .. } => "NotHermitian",
            DidNotConverge { .. } => "DidNotConverge",
            ZeroPolynomial => "ZeroPolynomial",
            NotAntisymmetric { .. } => "NotAntisymmetric",
            OddDimension { .. } => "OddDimension",
            UnsupportedDimension { .. } => "UnsupportedDimension",
            ShapeMismatch { .. } => "ShapeMismatch",
            MalformedModel(_) => "MalformedModel",
            Gapless { .. } => "Gapless",
            ClassMismatch { .. } => "ClassMismatch",
            BadIndex => "BadIndex",
            NotDirac { .. } => "NotDirac",
            NonzeroTracePart { .. } => "NonzeroTracePart",
            ZeroHopping => "ZeroHopping",
            DegenerateEllipse { .. } => "DegenerateEllipse",
            LambdaZero => "LambdaZero",
            GapClosed { .. } => "GapClosed",
            MethodDisagreement { .. } => "MethodDisagreement",
            DegenerateZero { .. } => "DegenerateZero",
            TangentCrossing { .. } => "TangentCrossing",
            GapClosedAtTrim { .. } => "GapClosedAtTrim",
            NotTri { .. } => "NotTRI",
            DegeneracyMismatch { .. } => "DegeneracyMismatch",
            EndpointZero => "EndpointZero",
            UnresolvedSignChange { .. } => "UnresolvedSignChange",
            TrackingAmbiguity { .. } => "TrackingAmbiguity",
            StripTooShort { .. } => "StripTooShort",
            NotSingularHopping { .. } => "NotSingularHopping",
            DegenerateJacobian { .. } => "DegenerateJacobian",
            UnresolvedCrossing { .. } => "UnresolvedCrossing",
            MixedChirality { .. } => "MixedChirality",
            OddCount { .. } => "OddCount",
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Error::*;
        match self {
            NotHermitian { deviation } => write!(f, "matrix is not Hermitian (deviation {deviation:e})"),
            DidNotConverge { what } => write!(f, "{what} did not converge"),
            ZeroPolynomial => write!(f, "polynomial has no nonzero coefficient"),
            NotAntisymmetric { deviation } => write!(f, "matrix is not antisymmetric (deviation {deviation:e})"),
            OddDimension { dim } => write!(f, "odd dimension {dim}"),
            UnsupportedDimension { dim } => write!(f, "unsupported dimension {dim}"),
            ShapeMismatch { what } => write!(f, "shape mismatch: {what}"),
            MalformedModel(msg) => write!(f, "malformed model: {msg}"),
            Gapless { gap, k } => write!(f, "Gapless: minimum gap {gap:e} near k = ({}, {})", k[0], k[1]),
            ClassMismatch { expected, found } => write!(f, "class mismatch: expected {expected}, found {found}"),
            BadIndex => write!(f, "invalid gamma index"),
            NotDirac { residual } => write!(f, "not a Dirac Hamiltonian (residual {residual:e})"),
            NonzeroTracePart { magnitude } => write!(f, "identity component present (magnitude {magnitude:e})"),
            ZeroHopping => write!(f, "hopping vanishes; no ellipse"),
            DegenerateEllipse { k2 } => write!(f, "ellipse degenerates to a segment at k2 = {k2}"),
            LambdaZero => write!(f, "lambda = 0"),
            GapClosed { k } => write!(f, "gap closed at k = {k}"),
            MethodDisagreement { first, second } => write!(f, "methods disagree: {first} vs {second}"),
            DegenerateZero { k, jacobian } => write!(f, "degenerate preimage at ({}, {}), jacobian {jacobian:e}", k[0], k[1]),
            TangentCrossing { k2 } => write!(f, "tangent crossing at k2 = {k2}"),
            GapClosedAtTrim { k } => write!(f, "gap closed at TRIM ({}, {})", k[0], k[1]),
            NotTri { deviation } => write!(f, "model is not time-reversal invariant (deviation {deviation:e})"),
            DegeneracyMismatch { splitting } => write!(f, "occupied space is not a Kramers pair (splitting {splitting:e})"),
            EndpointZero => write!(f, "M(k2) vanishes at an endpoint"),
            UnresolvedSignChange { k2 } => write!(f, "unresolved sign change near k2 = {k2}"),
            TrackingAmbiguity { k2, energy } => write!(f, "branch tracking ambiguous at k2 = {k2}, E = {energy}"),
            StripTooShort { n, xi } => write!(f, "strip of {n} sites too short for decay length {xi}"),
            NotSingularHopping { magnitude } => write!(f, "hopping second column nonzero ({magnitude:e})"),
            DegenerateJacobian { k } => write!(f, "degenerate jacobian at ({}, {})", k[0], k[1]),
            UnresolvedCrossing { k2 } => write!(f, "unresolved crossing near k2 = {k2}"),
            MixedChirality { chirality } => write!(f, "zero mode has mixed chirality {chirality}"),
            OddCount { count } => write!(f, "odd crossing count {count} under time reversal"),
        }
    }
}

impl core::error::Error for Error {}
