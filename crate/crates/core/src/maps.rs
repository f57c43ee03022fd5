//! Elementary operators in signed Kraus form and the tests that separate
//! positive from completely positive.
//!
//! A map Phi(X) = sum_i A_i X A_i^dagger - sum_j C_j X C_j^dagger is
//! hermitian-preserving by construction. It is completely positive exactly
//! when the minus family is a contractive *linear* combination of the plus
//! family (equivalently, the Choi matrix is PSD), and positive exactly when
//! it is a contractive *locally linear* combination, i.e. for every vector
//! psi there is a coefficient matrix Omega(psi) of operator norm <= 1 with
//! C_j psi = sum_i omega_ji A_i psi. Both solves are realized here with a
//! pseudoinverse least-squares kernel; positivity additionally gets a
//! sampling falsifier, since checking all psi is not a finite procedure.
//!
//! The catalog at the bottom provides the concrete maps used to witness
//! entanglement: transpose, reduction, the diagonal-dominance family, and
//! the two 3x3 maps Gamma and Gamma' together with their closed forms.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    self, is_psd, least_squares, operator_norm, range_isometry, vec_norm, ComplexMatrix,
};
use crate::sampling::SeededSampler;

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Signed Kraus pair ({A_i}, {C_j}) representing
/// Phi(X) = sum A_i X A_i^dagger - sum C_j X C_j^dagger.
#[derive(Debug, Clone)]
pub struct ElementaryOperator {
    dim_in: usize,
    dim_out: usize,
    plus_kraus: Vec<ComplexMatrix>,
    minus_kraus: Vec<ComplexMatrix>,
    label: String,
}

impl ElementaryOperator {
    /// Build from explicit Kraus families; every matrix must be
    /// dim_out x dim_in. Empty families are allowed (the zero map has both
    /// empty); purely-negative maps are representable but never positive.
    pub fn new(
        dim_in: usize,
        dim_out: usize,
        plus_kraus: Vec<ComplexMatrix>,
        minus_kraus: Vec<ComplexMatrix>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if dim_in == 0 || dim_out == 0 {
            return Err(Error::MapConstruction(
                "map dimensions must be positive".to_string(),
            ));
        }
        for m in plus_kraus.iter().chain(minus_kraus.iter()) {
            if m.rows() != dim_out || m.cols() != dim_in {
                return Err(Error::DimensionMismatch {
                    context: "Kraus matrix shape",
                    got: format!("{}x{}", m.rows(), m.cols()),
                    expected: format!("{dim_out}x{dim_in}"),
                });
            }
        }
        Ok(Self {
            dim_in,
            dim_out,
            plus_kraus,
            minus_kraus,
            label: label.into(),
        })
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn plus_kraus(&self) -> &[ComplexMatrix] {
        &self.plus_kraus
    }

    pub fn minus_kraus(&self) -> &[ComplexMatrix] {
        &self.minus_kraus
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Evaluate the map: sum A_i X A_i^dagger - sum C_j X C_j^dagger.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.rows() != self.dim_in || x.cols() != self.dim_in {
            return Err(Error::DimensionMismatch {
                context: "map input shape",
                got: format!("{}x{}", x.rows(), x.cols()),
                expected: format!("{0}x{0}", self.dim_in),
            });
        }
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for a in &self.plus_kraus {
            let term = a.matmul(x)?.matmul(&a.dagger())?;
            out = out.add(&term)?;
        }
        for c in &self.minus_kraus {
            let term = c.matmul(x)?.matmul(&c.dagger())?;
            out = out.sub(&term)?;
        }
        Ok(out)
    }

    /// Same value as `apply(outer(psi))` but assembled from the image
    /// vectors A_i psi, C_j psi; used by the positivity falsifier.
    fn apply_to_projector(&self, psi: &[Complex64]) -> Result<ComplexMatrix> {
        if psi.len() != self.dim_in {
            return Err(Error::DimensionMismatch {
                context: "falsifier vector length",
                got: psi.len().to_string(),
                expected: self.dim_in.to_string(),
            });
        }
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for a in &self.plus_kraus {
            out = out.add(&ComplexMatrix::outer(&a.apply_vec(psi)?))?;
        }
        for c in &self.minus_kraus {
            out = out.sub(&ComplexMatrix::outer(&c.apply_vec(psi)?))?;
        }
        Ok(out)
    }

    /// Choi matrix sum_{ij} E_ij (x) Phi(E_ij), a (dim_in * dim_out)-square
    /// matrix; Hermitian because the signed Kraus form preserves adjoints.
    pub fn choi_matrix(&self) -> ComplexMatrix {
        let (n, d) = (self.dim_in, self.dim_out);
        let mut out = ComplexMatrix::zeros(n * d, n * d);
        for i in 0..n {
            for j in 0..n {
                let block = self
                    .apply(&ComplexMatrix::matrix_unit(n, i, j))
                    .expect("matrix units have the right shape");
                for r in 0..d {
                    for c in 0..d {
                        out.set(i * d + r, j * d + c, block.get(r, c));
                    }
                }
            }
        }
        out
    }

    /// Complete positivity via PSD-ness of the Choi matrix.
    pub fn is_completely_positive(&self, tol: f64) -> CpVerdict {
        let choi = self.choi_matrix();
        let herm_tol = 1e-9 * choi.max_abs().max(1.0);
        let verdict = is_psd(&choi, herm_tol.max(tol))
            .expect("Choi matrix of a signed Kraus map is Hermitian");
        CpVerdict {
            completely_positive: verdict.min_eigenvalue >= -tol,
            min_choi_eigenvalue: verdict.min_eigenvalue,
        }
    }

    /// Search for a rank-one projector whose image has a negative
    /// eigenvalue. A returned witness *proves* the map is not positive;
    /// an empty result is evidence only (positivity over all rank-one
    /// projectors is not finitely checkable).
    pub fn positivity_falsifier(
        &self,
        samples: usize,
        seed: u64,
        tol: f64,
    ) -> Result<FalsifierOutcome> {
        self.positivity_falsifier_with_candidates(&[], samples, seed, tol)
    }

    /// Falsifier that tries caller-supplied candidate vectors first, then
    /// `samples` Haar-random draws. Candidates are normalized before use.
    pub fn positivity_falsifier_with_candidates(
        &self,
        candidates: &[Vec<Complex64>],
        samples: usize,
        seed: u64,
        tol: f64,
    ) -> Result<FalsifierOutcome> {
        let mut sampler = SeededSampler::new(seed);
        let mut min_seen = f64::INFINITY;
        let mut examined = 0usize;
        let mut check = |this: &Self, psi: Vec<Complex64>, index: usize| -> Result<Option<FalsifierWitness>> {
            let out = this.apply_to_projector(&psi)?;
            let herm_tol = 1e-9 * out.max_abs().max(1.0);
            let min = linalg::min_eigenvalue(&out, herm_tol)?;
            if min < min_seen {
                min_seen = min;
            }
            if min < -tol {
                return Ok(Some(FalsifierWitness {
                    vector: psi,
                    eigenvalue: min,
                    sample_index: index,
                }));
            }
            Ok(None)
        };
        for cand in candidates {
            let n = vec_norm(cand);
            if n <= 1e-12 || cand.len() != self.dim_in {
                continue;
            }
            let psi: Vec<Complex64> = cand.iter().map(|z| z / n).collect();
            examined += 1;
            if let Some(w) = check(self, psi, examined - 1)? {
                return Ok(FalsifierOutcome {
                    witness: Some(w),
                    min_eigenvalue: min_seen,
                    samples_examined: examined,
                });
            }
        }
        for _ in 0..samples {
            let psi = sampler.haar_unit_vector(self.dim_in);
            examined += 1;
            if let Some(w) = check(self, psi, examined - 1)? {
                return Ok(FalsifierOutcome {
                    witness: Some(w),
                    min_eigenvalue: min_seen,
                    samples_examined: examined,
                });
            }
        }
        Ok(FalsifierOutcome {
            witness: None,
            min_eigenvalue: min_seen,
            samples_examined: examined,
        })
    }

    /// Local coefficient solve at one vector: find Omega with
    /// C_j psi = sum_i omega_ji A_i psi, minimum-Frobenius via the
    /// pseudoinverse, then cross-check feasibility against the PSD test on
    /// sum |A_i psi><A_i psi| - sum |C_j psi><C_j psi|. The two routes agree
    /// mathematically (Douglas factorization); a decisive numerical
    /// disagreement is reported as an error instead of a verdict.
    pub fn local_combination_check(
        &self,
        psi: &[Complex64],
        tol: f64,
    ) -> Result<CoefficientSolve> {
        let norm = vec_norm(psi);
        if psi.len() != self.dim_in {
            return Err(Error::DimensionMismatch {
                context: "local check vector length",
                got: psi.len().to_string(),
                expected: self.dim_in.to_string(),
            });
        }
        if (norm - 1.0).abs() > tol {
            return Err(Error::NotUnitVector { norm, tol });
        }
        let plus_cols: Vec<Vec<Complex64>> = self
            .plus_kraus
            .iter()
            .map(|a| a.apply_vec(psi))
            .collect::<Result<_>>()?;
        let minus_cols: Vec<Vec<Complex64>> = self
            .minus_kraus
            .iter()
            .map(|c| c.apply_vec(psi))
            .collect::<Result<_>>()?;

        let solve = solve_combination(&plus_cols, &minus_cols, self.dim_out, tol)?;

        // Independent route: positivity of the map's value on psi psi^dag.
        let witness = self.apply_to_projector(psi)?;
        let herm_tol = 1e-9 * witness.max_abs().max(1.0);
        let psd = is_psd(&witness, herm_tol.max(tol))?;
        let psd_feasible = psd.min_eigenvalue >= -tol;

        let solve_feasible = solve.is_feasible();
        if solve_feasible != psd_feasible {
            let decisive = if solve_feasible {
                psd.min_eigenvalue < -10.0 * tol
            } else {
                solve.residual > 10.0 * tol * solve.scale
                    || solve.operator_norm.unwrap_or(0.0) > 1.0 + 10.0 * tol
            };
            if decisive {
                return Err(Error::SolverDisagreement {
                    solve_feasible,
                    psd_feasible,
                    residual: solve.residual,
                    operator_norm: solve.operator_norm.unwrap_or(0.0),
                    min_eigenvalue: psd.min_eigenvalue,
                });
            }
        }
        Ok(solve)
    }

    /// Global coefficient solve: find one contraction Omega with
    /// C_j = sum_i omega_ji A_i (Kraus matrices stacked as vectors).
    /// Feasible implies completely positive. When the plus family is
    /// linearly independent the solution is unique and the verdict is
    /// definitive; a dependent family with near-zero residual but norm
    /// above 1 is reported `Unknown`, since a smaller-norm solution may
    /// exist off the minimum-Frobenius one.
    pub fn contractive_linear_combination_check(&self, tol: f64) -> Result<CoefficientSolve> {
        let plus_cols: Vec<Vec<Complex64>> =
            self.plus_kraus.iter().map(|a| a.vec_entries()).collect();
        let minus_cols: Vec<Vec<Complex64>> =
            self.minus_kraus.iter().map(|c| c.vec_entries()).collect();
        let mut solve = solve_combination(
            &plus_cols,
            &minus_cols,
            self.dim_in * self.dim_out,
            tol,
        )?;
        if !solve.is_feasible()
            && solve.residual <= tol * solve.scale
            && !plus_cols.is_empty()
            && solve.plus_rank < plus_cols.len()
        {
            solve.feasibility = Feasibility::Unknown;
        }
        Ok(solve)
    }

    /// Quick structural filters for "can this positive map fail to be CP".
    /// Fired `cp_if_positive_*` flags mean: if the map is positive, it is
    /// automatically completely positive (so it cannot witness anything).
    /// `ncp_possible` collects the necessary conditions for being NCP.
    pub fn ncp_quick_filters(&self) -> NcpFilterReport {
        let k = self.plus_kraus.len();
        let span_dim = if k == 0 {
            0
        } else {
            let stacked: Vec<Vec<Complex64>> =
                self.plus_kraus.iter().map(|a| a.vec_entries()).collect();
            linalg::rank(
                &ComplexMatrix::from_columns(&stacked).expect("kraus stack is non-empty"),
                None,
            )
        };
        // Rank probe at a few deterministic Haar vectors: if the image
        // family {A_i psi} is ever linearly independent, positive => CP.
        let mut independent_images = false;
        if k > 0 && k <= self.dim_out {
            let mut sampler = SeededSampler::new(0x6e_63_70);
            for _ in 0..16 {
                let psi = sampler.haar_unit_vector(self.dim_in);
                let cols: Vec<Vec<Complex64>> = self
                    .plus_kraus
                    .iter()
                    .map(|a| a.apply_vec(&psi).expect("shape checked"))
                    .collect();
                let m = ComplexMatrix::from_columns(&cols).expect("non-empty");
                if linalg::rank(&m, None) == k {
                    independent_images = true;
                    break;
                }
            }
        }
        NcpFilterReport {
            plus_count: k,
            plus_span_dim: span_dim,
            cp_if_positive_small_family: k <= 2,
            cp_if_positive_small_span: span_dim <= 2,
            cp_if_positive_independent_images: independent_images,
            ncp_count_requirement_met: k >= 3,
            ncp_span_requirement_met: span_dim >= 3,
        }
    }

    /// Compression: restrict the map to the ranges of orthogonal
    /// projections P (input side) and Q (output side). The compressed map
    /// has Kraus families {Q A_i P} and {Q C_j P} expressed in orthonormal
    /// bases of ran(P), ran(Q); applying it commutes with projecting.
    pub fn compress(&self, p: &ComplexMatrix, q: &ComplexMatrix, tol: f64) -> Result<Self> {
        if p.rows() != self.dim_in {
            return Err(Error::DimensionMismatch {
                context: "input projection size",
                got: p.rows().to_string(),
                expected: self.dim_in.to_string(),
            });
        }
        if q.rows() != self.dim_out {
            return Err(Error::DimensionMismatch {
                context: "output projection size",
                got: q.rows().to_string(),
                expected: self.dim_out.to_string(),
            });
        }
        let u_in = range_isometry(p, tol)?;
        let u_out = range_isometry(q, tol)?;
        let squeeze = |m: &ComplexMatrix| -> Result<ComplexMatrix> {
            u_out.dagger().matmul(m)?.matmul(&u_in)
        };
        let plus = self
            .plus_kraus
            .iter()
            .map(squeeze)
            .collect::<Result<Vec<_>>>()?;
        let minus = self
            .minus_kraus
            .iter()
            .map(squeeze)
            .collect::<Result<Vec<_>>>()?;
        Self::new(
            u_in.cols(),
            u_out.cols(),
            plus,
            minus,
            format!("compress({})", self.label),
        )
    }
}

/// Verdict of the Choi positivity test.
#[derive(Debug, Clone, Copy)]
pub struct CpVerdict {
    pub completely_positive: bool,
    pub min_choi_eigenvalue: f64,
}

/// A rank-one projector on which the map's output fails positivity.
#[derive(Debug, Clone)]
pub struct FalsifierWitness {
    pub vector: Vec<Complex64>,
    pub eigenvalue: f64,
    pub sample_index: usize,
}

#[derive(Debug, Clone)]
pub struct FalsifierOutcome {
    pub witness: Option<FalsifierWitness>,
    /// Smallest output eigenvalue seen across all examined vectors.
    pub min_eigenvalue: f64,
    pub samples_examined: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feasibility {
    Feasible,
    Infeasible,
    /// Residual is zero but the minimum-Frobenius solution is not a
    /// contraction, and the plus family is linearly dependent: a
    /// contraction solution may exist elsewhere.
    Unknown,
}

/// Result of a (locally) contractive linear combination solve.
#[derive(Debug, Clone)]
pub struct CoefficientSolve {
    pub feasibility: Feasibility,
    /// The l x k coefficient matrix Omega; `None` when the minus family is
    /// empty (nothing to combine).
    pub omega: Option<ComplexMatrix>,
    /// Largest singular value of Omega.
    pub operator_norm: Option<f64>,
    /// Frobenius residual of the solved equations.
    pub residual: f64,
    /// Scale the residual was compared against (max of 1 and the
    /// right-hand-side norm).
    pub scale: f64,
    /// Numerical rank of the stacked plus family in the solve.
    pub plus_rank: usize,
}

impl CoefficientSolve {
    pub fn is_feasible(&self) -> bool {
        self.feasibility == Feasibility::Feasible
    }
}

/// Structural CP/NCP filters; see `ElementaryOperator::ncp_quick_filters`.
#[derive(Debug, Clone, Copy)]
pub struct NcpFilterReport {
    pub plus_count: usize,
    pub plus_span_dim: usize,
    /// k <= 2: positive implies completely positive.
    pub cp_if_positive_small_family: bool,
    /// dim span{A_i} <= 2: positive implies completely positive.
    pub cp_if_positive_small_span: bool,
    /// Some sampled psi has {A_i psi} linearly independent: positive
    /// implies completely positive.
    pub cp_if_positive_independent_images: bool,
    /// k >= 3 (necessary for an NCP positive map).
    pub ncp_count_requirement_met: bool,
    /// dim span{A_i} >= 3 (necessary for an NCP positive map).
    pub ncp_span_requirement_met: bool,
}

impl NcpFilterReport {
    /// True when none of the CP-forcing filters fired, i.e. the necessary
    /// conditions for the map to be NCP all hold.
    pub fn ncp_possible(&self) -> bool {
        !self.cp_if_positive_small_family
            && !self.cp_if_positive_small_span
            && !self.cp_if_positive_independent_images
            && self.ncp_count_requirement_met
            && self.ncp_span_requirement_met
    }
}

/// Shared kernel for the local and global solves: columns are the
/// (image or stacked) plus family and minus family; solves
/// M_plus * Omega^T = M_minus by least squares.
fn solve_combination(
    plus_cols: &[Vec<Complex64>],
    minus_cols: &[Vec<Complex64>],
    ambient_dim: usize,
    tol: f64,
) -> Result<CoefficientSolve> {
    let l = minus_cols.len();
    let k = plus_cols.len();
    if l == 0 {
        return Ok(CoefficientSolve {
            feasibility: Feasibility::Feasible,
            omega: None,
            operator_norm: Some(0.0),
            residual: 0.0,
            scale: 1.0,
            plus_rank: if k == 0 {
                0
            } else {
                linalg::rank(
                    &ComplexMatrix::from_columns(plus_cols).expect("k > 0"),
                    None,
                )
            },
        });
    }
    let m_minus = ComplexMatrix::from_columns(minus_cols)?;
    let scale = m_minus.fro_norm().max(1.0);
    if k == 0 {
        // No plus family: the equations demand the minus side vanish.
        let residual = m_minus.fro_norm();
        return Ok(CoefficientSolve {
            feasibility: if residual <= tol * scale {
                Feasibility::Feasible
            } else {
                Feasibility::Infeasible
            },
            omega: None,
            operator_norm: Some(0.0),
            residual,
            scale,
            plus_rank: 0,
        });
    }
    debug_assert!(plus_cols.iter().all(|c| c.len() == ambient_dim));
    let m_plus = ComplexMatrix::from_columns(plus_cols)?;
    let ls = least_squares(&m_plus, &m_minus, None)?;
    let omega = ls.solution.transpose();
    let norm = if omega.max_abs() == 0.0 {
        0.0
    } else {
        operator_norm(&omega)
    };
    let feasible = ls.residual <= tol * scale && norm <= 1.0 + tol;
    Ok(CoefficientSolve {
        feasibility: if feasible {
            Feasibility::Feasible
        } else {
            Feasibility::Infeasible
        },
        omega: Some(omega),
        operator_norm: Some(norm),
        residual: ls.residual,
        scale,
        plus_rank: ls.rank,
    })
}

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

/// The identity map on n x n matrices (plus family = {I}).
pub fn identity_map(n: usize) -> Result<ElementaryOperator> {
    ElementaryOperator::new(
        n,
        n,
        vec![ComplexMatrix::identity(n)],
        vec![],
        format!("identity({n})"),
    )
}

/// Transpose map T -> T^t in signed Kraus form:
/// plus {E_ii} and {(E_ij + E_ji)/sqrt2 : i < j},
/// minus {(E_ij - E_ji)/sqrt2 : i < j}.
pub fn transpose_map(n: usize) -> Result<ElementaryOperator> {
    if n < 2 {
        return Err(Error::MapConstruction(format!(
            "transpose map needs dimension >= 2, got {n}"
        )));
    }
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for i in 0..n {
        plus.push(ComplexMatrix::matrix_unit(n, i, i));
    }
    let inv = 1.0 / 2.0_f64.sqrt();
    for i in 0..n {
        for j in (i + 1)..n {
            let eij = ComplexMatrix::matrix_unit(n, i, j);
            let eji = ComplexMatrix::matrix_unit(n, j, i);
            plus.push(eij.add(&eji).expect("same shape").scale_real(inv));
            minus.push(eij.sub(&eji).expect("same shape").scale_real(inv));
        }
    }
    ElementaryOperator::new(n, n, plus, minus, format!("transpose({n})"))
}

/// Reduction map T -> Tr(T) I - T:
/// plus {E_ij : i != j} and {(E_ii - E_jj)/sqrt2 : i < j},
/// minus {(E_ii + E_jj)/sqrt2 : i < j}.
pub fn reduction_map(n: usize) -> Result<ElementaryOperator> {
    if n < 2 {
        return Err(Error::MapConstruction(format!(
            "reduction map needs dimension >= 2, got {n}"
        )));
    }
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                plus.push(ComplexMatrix::matrix_unit(n, i, j));
            }
        }
    }
    let inv = 1.0 / 2.0_f64.sqrt();
    for i in 0..n {
        for j in (i + 1)..n {
            let eii = ComplexMatrix::matrix_unit(n, i, i);
            let ejj = ComplexMatrix::matrix_unit(n, j, j);
            plus.push(eii.sub(&ejj).expect("same shape").scale_real(inv));
            minus.push(eii.add(&ejj).expect("same shape").scale_real(inv));
        }
    }
    ElementaryOperator::new(n, n, plus, minus, format!("reduction({n})"))
}

/// Diagonal-dominance map Delta_t(X) = t sum_i E_ii X E_ii - X:
/// plus {sqrt(t) E_ii}, minus {I}. Positive iff completely positive iff
/// t >= n.
pub fn delta_t_map(n: usize, t: f64) -> Result<ElementaryOperator> {
    if n == 0 {
        return Err(Error::MapConstruction(
            "delta-t map needs dimension >= 1".to_string(),
        ));
    }
    if t.is_nan() || t <= 0.0 {
        return Err(Error::MapConstruction(format!(
            "delta-t map needs t > 0, got {t}"
        )));
    }
    let root = t.sqrt();
    let plus = (0..n)
        .map(|i| ComplexMatrix::matrix_unit(n, i, i).scale_real(root))
        .collect();
    ElementaryOperator::new(
        n,
        n,
        plus,
        vec![ComplexMatrix::identity(n)],
        format!("delta-t(n={n},t={t})"),
    )
}

/// Positive NCP map built from real diagonal coefficient grids:
/// Delta(T) = sum_k A_k T A_k^dag + sum_{i!=j} E_ij T E_ij^dag
///          - sum_l B_l T B_l^dag
/// with A_k = diag(a_k), B_l = diag(b_l). The construction hypotheses are
/// validated and a violation is rejected naming the failed inequality.
pub fn prop51_map(n: usize, a_rows: &[Vec<f64>], b_rows: &[Vec<f64>]) -> Result<ElementaryOperator> {
    let s = a_rows.len();
    let t = b_rows.len();
    if n < 2 {
        return Err(Error::HypothesisViolation(format!(
            "dimension n = {n} must be >= 2"
        )));
    }
    if s == 0 {
        return Err(Error::HypothesisViolation(
            "need at least one plus coefficient row (s >= 1)".to_string(),
        ));
    }
    if t == 0 {
        return Err(Error::HypothesisViolation(
            "need at least one minus coefficient row (t >= 1)".to_string(),
        ));
    }
    if s + t > n {
        return Err(Error::HypothesisViolation(format!(
            "s + t = {} exceeds n = {n}",
            s + t
        )));
    }
    for (idx, row) in a_rows.iter().enumerate() {
        if row.len() != n {
            return Err(Error::HypothesisViolation(format!(
                "coefficient row a_{} has length {}, expected {n}",
                idx + 1,
                row.len()
            )));
        }
    }
    for (idx, row) in b_rows.iter().enumerate() {
        if row.len() != n {
            return Err(Error::HypothesisViolation(format!(
                "coefficient row b_{} has length {}, expected {n}",
                idx + 1,
                row.len()
            )));
        }
    }
    // Linear independence of {A_k, B_l} as diagonal vectors.
    let stacked: Vec<Vec<Complex64>> = a_rows
        .iter()
        .chain(b_rows.iter())
        .map(|row| row.iter().map(|&x| re(x)).collect())
        .collect();
    let m = ComplexMatrix::from_columns(&stacked)?;
    if linalg::rank(&m, None) < s + t {
        return Err(Error::HypothesisViolation(
            "the diagonal families {A_k} and {B_l} are linearly dependent".to_string(),
        ));
    }
    // f_ii >= 0 and |f_ij| <= 1 for i != j.
    for i in 0..n {
        let fii: f64 = a_rows.iter().map(|r| r[i] * r[i]).sum::<f64>()
            - b_rows.iter().map(|r| r[i] * r[i]).sum::<f64>();
        if fii < 0.0 {
            return Err(Error::HypothesisViolation(format!(
                "f_{0}{0} = {fii} must be >= 0",
                i + 1
            )));
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let fij: f64 = a_rows.iter().map(|r| r[i] * r[j]).sum::<f64>()
                - b_rows.iter().map(|r| r[i] * r[j]).sum::<f64>();
            if fij.abs() > 1.0 {
                return Err(Error::HypothesisViolation(format!(
                    "|f_{}{}| = {} exceeds 1",
                    i + 1,
                    j + 1,
                    fij.abs()
                )));
            }
        }
    }
    let diag = |row: &Vec<f64>| ComplexMatrix::diag_real(row);
    let mut plus: Vec<ComplexMatrix> = a_rows.iter().map(diag).collect();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                plus.push(ComplexMatrix::matrix_unit(n, i, j));
            }
        }
    }
    let minus: Vec<ComplexMatrix> = b_rows.iter().map(diag).collect();
    ElementaryOperator::new(n, n, plus, minus, format!("prop51(n={n},s={s},t={t})"))
}

fn half_sum_units(i: usize, j: usize, sign: f64) -> ComplexMatrix {
    ComplexMatrix::matrix_unit(3, i, i)
        .add(&ComplexMatrix::matrix_unit(3, j, j).scale_real(sign))
        .expect("same shape")
        .scale_real(0.5)
}

fn gamma_family(cycle: [(usize, usize); 3], label: &str) -> ElementaryOperator {
    let mut plus = vec![
        ComplexMatrix::matrix_unit(3, 0, 0),
        ComplexMatrix::matrix_unit(3, 1, 1),
        ComplexMatrix::matrix_unit(3, 2, 2),
    ];
    for (i, j) in cycle {
        plus.push(ComplexMatrix::matrix_unit(3, i, j));
    }
    let mut minus = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                plus.push(half_sum_units(i, j, -1.0));
                minus.push(half_sum_units(i, j, 1.0));
            }
        }
    }
    ElementaryOperator::new(3, 3, plus, minus, label).expect("fixed 3x3 families")
}

/// The 3x3 NCP positive map Gamma: diagonal shifted one step down the
/// cycle (1,2,3), off-diagonal negated. Indecomposable: it detects PPT
/// entangled states.
pub fn gamma_map() -> ElementaryOperator {
    gamma_family([(0, 1), (1, 2), (2, 0)], "gamma")
}

/// The mirror map Gamma': diagonal shifted the other way around the cycle.
pub fn gamma_prime_map() -> ElementaryOperator {
    gamma_family([(1, 0), (2, 1), (0, 2)], "gamma-prime")
}

/// Closed form of Gamma, used as the oracle for the Kraus construction:
/// diag slots (a11+a22, a22+a33, a33+a11), off-diagonal entries negated.
pub fn gamma_closed_form(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.rows() != 3 || a.cols() != 3 {
        return Err(Error::DimensionMismatch {
            context: "gamma closed form input",
            got: format!("{}x{}", a.rows(), a.cols()),
            expected: "3x3".to_string(),
        });
    }
    Ok(ComplexMatrix::from_fn(3, 3, |i, j| {
        if i == j {
            a.get(i, i) + a.get((i + 1) % 3, (i + 1) % 3)
        } else {
            -a.get(i, j)
        }
    }))
}

/// Closed form of Gamma': diag slots (a11+a33, a22+a11, a33+a22).
pub fn gamma_prime_closed_form(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.rows() != 3 || a.cols() != 3 {
        return Err(Error::DimensionMismatch {
            context: "gamma-prime closed form input",
            got: format!("{}x{}", a.rows(), a.cols()),
            expected: "3x3".to_string(),
        });
    }
    Ok(ComplexMatrix::from_fn(3, 3, |i, j| {
        if i == j {
            a.get(i, i) + a.get((i + 2) % 3, (i + 2) % 3)
        } else {
            -a.get(i, j)
        }
    }))
}
