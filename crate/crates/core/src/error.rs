//! Error types for the engine, one enum per subsystem.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("signature Cl({p},{q}) out of range (need 1 <= p+q <= 8)")]
    BadSignature { p: usize, q: usize },
    #[error("signature mismatch: {0} vs {1}")]
    SignatureMismatch(String, String),
    #[error("element is singular or too ill-conditioned to invert (cond ~ {cond:.3e})")]
    SingularElement { cond: f64 },
    #[error("mu coefficient index k={k} out of range for n={n}")]
    MuIndexOutOfRange { n: usize, k: usize },
}

#[derive(Debug, Error)]
pub enum PauliError {
    #[error("generator set invalid: relation residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    InvalidGenerators { residual: f64, tol: f64 },
    #[error("no candidate element produced a nonzero sum (max candidate norm {max_norm:.3e})")]
    NoCandidateFound { max_norm: f64 },
    #[error("best candidate failed verification: residual {residual:.3e} > tol {tol:.3e}")]
    VerificationFailed { residual: f64, tol: f64 },
    #[error("pseudoscalar product {found} is not an admissible value for this signature/field")]
    NotAdmissible { found: String },
    #[error("case factor {found} does not match any admissible connection case")]
    CaseMismatch { found: String },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("axis {axis} out of range for an r={r} grid")]
    AxisOutOfRange { axis: usize, r: usize },
    #[error("grid shape {len} along axis {axis} too small for derivative stencils (need >= 5)")]
    ShapeTooSmall { axis: usize, len: usize },
    #[error("field shapes or signatures do not match: {0}")]
    ShapeMismatch(String),
    #[error("frame matrix violates the eta-orthogonality condition at node {node} (residual {residual:.3e})")]
    OrthogonalityViolated { node: usize, residual: f64 },
    #[error("frame is not grade-1 valued at node {node} (off-grade norm {residual:.3e})")]
    NotGrade1 { node: usize, residual: f64 },
    #[error("blade products of the generator set are numerically degenerate at node {node}")]
    DegenerateHBasis { node: usize },
    #[error("element singular at node {node}")]
    SingularAtNode { node: usize },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Error)]
pub enum TransportError {
    #[error("method `{method}` does not support this connection: {reason}")]
    Unsupported { method: String, reason: String },
    #[error("unknown transport method `{0}`")]
    UnknownMethod(String),
    #[error("transported element became singular at node {node}")]
    SingularityDetected { node: usize },
    #[error("connection one-form is not closed (max asymmetry {max_asymmetry:.3e} > tol {tol:.3e})")]
    NotClosed { max_asymmetry: f64, tol: f64 },
    #[error("transport is path-dependent (residual {residual:.3e} > tol {tol:.3e})")]
    PathDependent { residual: f64, tol: f64 },
    #[error("pipeline stage `{stage}` failed")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<dyn std::error::Error + Send + Sync>,
    },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

impl TransportError {
    pub fn stage(
        stage: &'static str,
        source: impl std::error::Error + Send + Sync + 'static,
    ) -> Self {
        TransportError::Stage {
            stage,
            source: Box::new(source),
        }
    }
}
