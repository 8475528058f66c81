use thiserror::Error;

/// Errors raised by algebra construction, pair building and the orbit formulas.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("elements belong to different algebras")]
    AlgebraMismatch,
    #[error("involutions do not commute (residual {residual:.3e})")]
    NonCommutingInvolutions { residual: f64 },
    #[error("degenerate subspace {name}: Killing form is singular there")]
    DegenerateSubspace { name: String },
    #[error("unsupported involution: {0}")]
    UnsupportedSigma(String),
    #[error("maximal abelian subspace not reached after {attempts} attempts")]
    MaximalityNotReached { attempts: usize },
    #[error("eigenvalue clustering is ambiguous: {0}")]
    ClusteringAmbiguous(String),
    #[error("root vector normalization is singular for root {root}")]
    NormalizationSingular { root: usize },
    #[error("element is not in the Cartan subspace (residual {residual:.3e})")]
    WNotInCartan { residual: f64 },
    #[error("root {root} hits the singular lattice (distance {distance:.3e})")]
    SingularDirection { root: usize, distance: f64 },
    #[error("span is not abelian (bracket norm {norm:.3e})")]
    NonAbelianSpan { norm: f64 },
    #[error("w is not semisimple")]
    NonSemisimpleW,
    #[error("dimension {dim} exceeds guard {limit}")]
    DimensionGuard { dim: usize, limit: usize },
    #[error("Newton iteration diverged from seed {seed_re:.6}+{seed_im:.6}i")]
    NewtonDivergence { seed_re: f64, seed_im: f64 },
    #[error("finite-difference step too large: estimates {a:.6e} and {b:.6e} disagree")]
    StepTooLarge { a: f64, b: f64 },
}

impl Error {
    /// Stable identifier used in structured error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::UnsupportedFamily(_) => "UnsupportedFamily",
            Error::InvalidParams(_) => "InvalidParams",
            Error::AlgebraMismatch => "AlgebraMismatch",
            Error::NonCommutingInvolutions { .. } => "NonCommutingInvolutions",
            Error::DegenerateSubspace { .. } => "DegenerateSubspace",
            Error::UnsupportedSigma(_) => "UnsupportedSigma",
            Error::MaximalityNotReached { .. } => "MaximalityNotReached",
            Error::ClusteringAmbiguous(_) => "ClusteringAmbiguous",
            Error::NormalizationSingular { .. } => "NormalizationSingular",
            Error::WNotInCartan { .. } => "WNotInCartan",
            Error::SingularDirection { .. } => "SingularDirection",
            Error::NonAbelianSpan { .. } => "NonAbelianSpan",
            Error::NonSemisimpleW => "NonSemisimpleW",
            Error::DimensionGuard { .. } => "DimensionGuard",
            Error::NewtonDivergence { .. } => "NewtonDivergence",
            Error::StepTooLarge { .. } => "StepTooLarge",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Errors serialize as `{kind, message}`.
impl serde::Serialize for Error {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(2))?;
        m.serialize_entry("kind", self.kind())?;
        m.serialize_entry("message", &self.to_string())?;
        m.end()
    }
}
