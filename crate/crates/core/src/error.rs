use thiserror::Error;

/// Errors shared across the matrix, map, state, and channel layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {context} (got {got}, expected {expected})")]
    DimensionMismatch {
        context: &'static str,
        got: String,
        expected: String,
    },

    #[error("matrix entries must be finite (found NaN or infinity at row {row}, col {col})")]
    NonFiniteEntry { row: usize, col: usize },

    #[error("matrix dimensions must be positive")]
    EmptyMatrix,

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: max |A - A^dagger| = {deviation:.3e} exceeds tol {tol:.3e}")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("eigensolver failed to converge after {sweeps} sweeps (off-diagonal norm {off:.3e})")]
    EigenNoConvergence { sweeps: usize, off: f64 },

    #[error("not an orthogonal projection: {detail}")]
    NotAProjection { detail: String },

    #[error("vector is not unit norm: |psi| = {norm} deviates from 1 beyond tol {tol:.3e}")]
    NotUnitVector { norm: f64, tol: f64 },

    #[error("state invariant violated: {invariant} ({detail})")]
    StateInvariant {
        invariant: &'static str,
        detail: String,
    },

    #[error("map construction rejected: {0}")]
    MapConstruction(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),

    #[error(
        "solver disagreement: coefficient solve says feasible={solve_feasible} \
         (residual {residual:.3e}, norm {operator_norm:.3e}) but PSD check says {psd_feasible} \
         (min eigenvalue {min_eigenvalue:.3e})"
    )]
    SolverDisagreement {
        solve_feasible: bool,
        psd_feasible: bool,
        residual: f64,
        operator_norm: f64,
        min_eigenvalue: f64,
    },

    #[error("not a quantum channel: sum M_i^dagger M_i exceeds identity (max excess eigenvalue {excess:.3e})")]
    NotAChannel { excess: f64 },

    #[error("document parse error: {0}")]
    Parse(String),

    #[error("document does not describe a {expected}: found kind \"{found}\"")]
    WrongDocumentKind {
        expected: &'static str,
        found: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
