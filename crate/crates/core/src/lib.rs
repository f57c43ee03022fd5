//! Entanglement detection for bipartite quantum states via positive linear
//! maps at finite dimension.
//!
//! The crate is organized around the signed Kraus form of
//! hermitian-preserving maps, Phi(X) = sum A_i X A_i^dag - sum C_j X C_j^dag:
//!
//! - [`linalg`]: dense complex matrices with a deterministic Jacobi
//!   eigensolver, singular values, and least squares;
//! - [`maps`]: elementary operators, Choi matrices, complete-positivity and
//!   positivity tests, and the catalog of concrete NCP positive maps
//!   (transpose, reduction, Delta_t, the diagonal-coefficient family,
//!   Gamma and Gamma');
//! - [`states`]: bipartite density matrices and the criteria battery (PPT,
//!   realignment, map witnesses), including the worked 3x3 example states;
//! - [`channels`]: all-plus Kraus channels with trace-preservation audits;
//! - [`document`]: the JSON document format the CLI reads and writes.

pub mod channels;
pub mod document;
pub mod error;
pub mod linalg;
pub mod maps;
pub mod sampling;
pub mod states;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, EigenResult};
pub use maps::ElementaryOperator;
pub use states::{BipartiteState, CriterionReport, Side, Verdict};
