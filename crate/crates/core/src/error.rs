use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vector norm {norm} is below the degeneracy threshold {threshold}")]
    ZeroVector { norm: f64, threshold: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point lies outside the declared chart domain")]
    OutOfDomain,

    #[error("map is not immersed at the sample point (Jacobian rank {rank} < {expected})")]
    NotImmersedAtPoint { rank: usize, expected: usize },

    #[error("position vector is tangent at the sample point")]
    PositionTangent,

    #[error("base immersion has nonzero relative nullity (nu = {nu})")]
    NonzeroBaseNullity { nu: usize },

    #[error("hypersurface has nonzero relative nullity (nu = {nu})")]
    NonzeroNullity { nu: usize },

    #[error("wrong holomorphy class: expected {expected}, found {found}")]
    WrongHolomorphyClass { expected: String, found: String },

    #[error("shape operator is singular at the fiber point")]
    SingularFiberPoint,

    #[error("base must be a curve (domain dimension 1), got {got}")]
    WrongBaseDimension { got: usize },

    #[error("immersion image passes through the origin on its chart")]
    OriginOnImage,

    #[error("affine chart undefined: coordinate {index} vanishes")]
    ChartUndefined { index: usize },

    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),

    #[error("random immersion generation failed after {retries} retries")]
    GenerationFailed { retries: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
