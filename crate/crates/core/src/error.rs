use thiserror::Error;

/// Every failure the construction pipeline can report.
///
/// Grid sampling never aborts on these: a failing node is flagged with
/// [`Error::code`] and the sweep moves on.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("sphere radius {0:e} is too close to zero")]
    ZeroRadius(f64),
    #[error("null vector represents the point at infinity")]
    PointAtInfinity,
    #[error("vector is not null: (v,v) = {0:e}")]
    NotNull(f64),
    #[error("plane is not of signature (1,1): Gram determinant {0:e}")]
    DegeneratePlane(f64),

    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unsupported function or identifier `{0}`")]
    UnsupportedFunction(String),
    #[error("pole of the expression at the evaluation point")]
    PoleAtPoint,
    #[error("non-finite value during evaluation")]
    Overflow,

    #[error("horosphere radius {0:e} below the degeneracy threshold")]
    DegenerateSphere(f64),
    #[error("sphere congruence does not immerse (singular values ratio {0:e})")]
    NotImmersed(f64),
    #[error("normal plane of the congruence is not of signature (1,1)")]
    DegenerateNormalPlane,
    #[error("second envelope touches the ideal boundary")]
    IdealEnvelopePoint,
    #[error("both null normal directions align with the hyperbolic Gauss map")]
    AmbiguousNullSplit,
    #[error("Moebius coefficients are singular: |ad - bc| = {0:e}")]
    SingularMobius(f64),

    #[error("stencil contains an invalid neighbour: {0}")]
    StencilDegenerate(String),
    #[error("surface is not immersed: EG - F^2 = {0:e}")]
    NonImmersed(f64),
    #[error("principal curvatures are complex: H^2 - K = {0:e}")]
    ComplexPrincipalCurvatures(f64),

    #[error("grid has no node to evaluate or every node failed")]
    EmptyGrid,
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable short identifier used in CSV status columns and reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::ZeroRadius(_) => "ZeroRadius",
            Error::PointAtInfinity => "PointAtInfinity",
            Error::NotNull(_) => "NotNull",
            Error::DegeneratePlane(_) => "DegeneratePlane",
            Error::Syntax { .. } => "SyntaxError",
            Error::UnsupportedFunction(_) => "UnsupportedFunction",
            Error::PoleAtPoint => "PoleAtPoint",
            Error::Overflow => "Overflow",
            Error::DegenerateSphere(_) => "DegenerateSphere",
            Error::NotImmersed(_) => "NotImmersed",
            Error::DegenerateNormalPlane => "DegenerateNormalPlane",
            Error::IdealEnvelopePoint => "IdealEnvelopePoint",
            Error::AmbiguousNullSplit => "AmbiguousNullSplit",
            Error::SingularMobius(_) => "SingularMobius",
            Error::StencilDegenerate(_) => "StencilDegenerate",
            Error::NonImmersed(_) => "NonImmersed",
            Error::ComplexPrincipalCurvatures(_) => "ComplexPrincipalCurvatures",
            Error::EmptyGrid => "EmptyGrid",
            Error::Config(_) => "ConfigError",
            Error::Io(_) => "IoError",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
