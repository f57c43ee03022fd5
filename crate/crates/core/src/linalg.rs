//! Dense complex matrix algebra: the carrier type plus the spectral
//! primitives the rest of the crate is built on (Hermitian eigensolver,
//! singular values, Kronecker products, least squares).
//!
//! Everything here is pure and deterministic: the eigensolver is a cyclic
//! Jacobi iteration, so identical inputs produce identical output on every
//! run and platform. All values are immutable after construction.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default absolute tolerance for Hermiticity and PSD verdicts.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Dense rectangular complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Build from row-major entries. Rejects empty shapes, length
    /// mismatches, and non-finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix);
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "entry count",
                got: data.len().to_string(),
                expected: (rows * cols).to_string(),
            });
        }
        for (idx, z) in data.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFiniteEntry {
                    row: idx / cols,
                    col: idx % cols,
                });
            }
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| {
            Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)
        })
    }

    /// Matrix unit E_ij (single 1 at row `i`, col `j`) of size n x n.
    pub fn matrix_unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m.data[i * n + j] = Complex64::new(1.0, 0.0);
        m
    }

    pub fn diag_real(entries: &[f64]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| {
            Complex64::new(if i == j { entries[i] } else { 0.0 }, 0.0)
        })
    }

    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        Self::new(
            rows,
            cols,
            entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    /// Column matrix built from vectors of equal length.
    pub fn from_columns(columns: &[Vec<Complex64>]) -> Result<Self> {
        if columns.is_empty() || columns[0].is_empty() {
            return Err(Error::EmptyMatrix);
        }
        let rows = columns[0].len();
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::DimensionMismatch {
                context: "column lengths",
                got: "mixed".to_string(),
                expected: rows.to_string(),
            });
        }
        Ok(Self::from_fn(rows, columns.len(), |i, j| columns[j][i]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.data[i * self.cols + j] = value;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Row-major flattening as a single column vector.
    pub fn vec_entries(&self) -> Vec<Complex64> {
        self.data.clone()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "matrix addition")?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "matrix subtraction")?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    fn check_same_shape(&self, other: &Self, context: &'static str) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                context,
                got: format!("{}x{}", other.rows, other.cols),
                expected: format!("{}x{}", self.rows, self.cols),
            });
        }
        Ok(())
    }

    /// Standard matrix product.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                context: "matrix product inner dimension",
                got: other.rows.to_string(),
                expected: self.cols.to_string(),
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                if aik == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + aik * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Kronecker product, block-of-`other` convention:
    /// out[(i*other.rows + k), (j*other.cols + l)] = self[i,j] * other[k,l].
    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let aij = self.get(i, j);
                if aij == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out.set(i * other.rows + k, j * other.cols + l, aij * other.get(k, l));
                    }
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols))
            .map(|i| self.get(i, i))
            .sum()
    }

    /// Largest entry magnitude (max norm).
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn fro_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Max-norm deviation from the conjugate transpose.
    pub fn hermiticity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.hermiticity_deviation() <= tol
    }

    /// Matrix-vector product.
    pub fn apply_vec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                context: "matrix-vector product",
                got: v.len().to_string(),
                expected: self.cols.to_string(),
            });
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * v[j]).sum())
            .collect())
    }

    /// Rank-one projector psi psi^dagger.
    pub fn outer(psi: &[Complex64]) -> Self {
        let n = psi.len();
        Self::from_fn(n, n, |i, j| psi[i] * psi[j].conj())
    }
}

/// Euclidean norm of a complex vector.
pub fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vec_sub(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_scale(v: &[Complex64], s: Complex64) -> Vec<Complex64> {
    v.iter().map(|x| x * s).collect()
}

/// Full spectrum of a Hermitian matrix, eigenvalues ascending with matching
/// orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct EigenResult {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Unitary matrix whose column k is the eigenvector for `values[k]`.
    pub vectors: ComplexMatrix,
}

/// Hermitian eigendecomposition by cyclic Jacobi rotations.
///
/// The input must be square and Hermitian within `tol` (max-norm); the
/// iteration then runs on the exactly-symmetrized matrix (A + A^dagger)/2
/// until the off-diagonal Frobenius norm drops below 1e-13 of the total.
/// Jacobi is slower than tridiagonalization but unconditionally stable and
/// bit-deterministic, which the downstream verdicts rely on.
pub fn hermitian_eig(a: &ComplexMatrix, tol: f64) -> Result<EigenResult> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let dev = a.hermiticity_deviation();
    if dev > tol {
        return Err(Error::NotHermitian {
            deviation: dev,
            tol,
        });
    }
    let n = a.rows();

    // Work on the Hermitian part; keep diagonal real.
    let mut m = ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::new(a.get(i, i).re, 0.0)
        } else {
            (a.get(i, j) + a.get(j, i).conj()).scale(0.5)
        }
    });
    let mut v = ComplexMatrix::identity(n);

    let fro = m.fro_norm();
    let off_target = 1e-13 * fro.max(f64::MIN_POSITIVE);
    let max_sweeps = 64;

    let off_norm = |m: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                s += 2.0 * m.get(p, q).norm_sqr();
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while off_norm(&m) > off_target {
        if sweeps >= max_sweeps {
            return Err(Error::EigenNoConvergence {
                sweeps,
                off: off_norm(&m),
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                let g = apq.norm();
                if g == 0.0 {
                    continue;
                }
                let app = m.get(p, p).re;
                let aqq = m.get(q, q).re;
                // Entries this far below the diagonal scale cannot affect
                // the 1e-13 relative target; squash them to avoid overflow
                // in the rotation angle.
                if g < 1e-200 * (app.abs() + aqq.abs()) {
                    m.set(p, q, Complex64::new(0.0, 0.0));
                    m.set(q, p, Complex64::new(0.0, 0.0));
                    continue;
                }
                let phase = apq / g;
                let theta = (aqq - app) / (2.0 * g);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + theta.hypot(1.0))
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Unitary rotation R: R[p][p]=c, R[p][q]=s*phase,
                // R[q][p]=-s*conj(phase), R[q][q]=c; apply M <- R^dag M R.
                let s_phase = phase.scale(s);
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let mkp = m.get(k, p);
                    let mkq = m.get(k, q);
                    let new_kp = mkp.scale(c) - mkq * s_phase.conj();
                    let new_kq = mkp * s_phase + mkq.scale(c);
                    m.set(k, p, new_kp);
                    m.set(k, q, new_kq);
                    m.set(p, k, new_kp.conj());
                    m.set(q, k, new_kq.conj());
                }
                m.set(p, p, Complex64::new(app - t * g, 0.0));
                m.set(q, q, Complex64::new(aqq + t * g, 0.0));
                m.set(p, q, Complex64::new(0.0, 0.0));
                m.set(q, p, Complex64::new(0.0, 0.0));
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, vkp.scale(c) - vkq * s_phase.conj());
                    v.set(k, q, vkp * s_phase + vkq.scale(c));
                }
            }
        }
    }

    // Stable ascending sort keeps degenerate clusters in sweep order,
    // which makes the decomposition reproducible.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        m.get(i, i)
            .re
            .partial_cmp(&m.get(j, j).re)
            .expect("eigenvalues are finite")
    });
    let values: Vec<f64> = order.iter().map(|&i| m.get(i, i).re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| v.get(i, order[j]));
    Ok(EigenResult { values, vectors })
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(a: &ComplexMatrix, tol: f64) -> Result<f64> {
    Ok(hermitian_eig(a, tol)?.values[0])
}

/// PSD verdict together with the minimum eigenvalue that produced it.
#[derive(Debug, Clone, Copy)]
pub struct PsdVerdict {
    pub psd: bool,
    pub min_eigenvalue: f64,
}

/// True iff the minimum eigenvalue is >= -tol. Errors on non-Hermitian input.
pub fn is_psd(a: &ComplexMatrix, tol: f64) -> Result<PsdVerdict> {
    let min = min_eigenvalue(a, tol)?;
    Ok(PsdVerdict {
        psd: min >= -tol,
        min_eigenvalue: min,
    })
}

/// Factors of a one-sided Jacobi SVD: `u_scaled` has mutually orthogonal
/// columns sigma_j u_j, `v` is unitary, and A = u_scaled * v^dagger up to
/// roundoff. Singular values are descending.
pub(crate) struct SvdFactors {
    pub sigma: Vec<f64>,
    pub u_scaled: ComplexMatrix,
    pub v: ComplexMatrix,
}

/// One-sided Jacobi SVD: rotate column pairs until all columns are
/// mutually orthogonal. Unlike the Gram-matrix route, this computes small
/// singular values to high relative accuracy (true zeros come out at the
/// eps * sigma_max level, not sqrt(eps)), which the rank cutoffs and the
/// trace-norm threshold tests depend on.
pub(crate) fn svd_factors(a: &ComplexMatrix) -> SvdFactors {
    let cols = a.cols();
    let mut u = a.clone();
    let mut v = ComplexMatrix::identity(cols);
    let max_sweeps = 100;
    let mut sweep = 0;
    loop {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let mut app = 0.0;
                let mut aqq = 0.0;
                let mut apq = Complex64::new(0.0, 0.0);
                for r in 0..u.rows() {
                    let up = u.get(r, p);
                    let uq = u.get(r, q);
                    app += up.norm_sqr();
                    aqq += uq.norm_sqr();
                    apq += up.conj() * uq;
                }
                let g = apq.norm();
                if g <= 1e-15 * (app * aqq).sqrt() || g < f64::MIN_POSITIVE * 1e10 {
                    continue;
                }
                rotated = true;
                let phase = apq / g;
                let theta = (aqq - app) / (2.0 * g);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + theta.hypot(1.0))
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let s_phase = phase.scale(s);
                for r in 0..u.rows() {
                    let up = u.get(r, p);
                    let uq = u.get(r, q);
                    u.set(r, p, up.scale(c) - uq * s_phase.conj());
                    u.set(r, q, up * s_phase + uq.scale(c));
                }
                for r in 0..cols {
                    let vp = v.get(r, p);
                    let vq = v.get(r, q);
                    v.set(r, p, vp.scale(c) - vq * s_phase.conj());
                    v.set(r, q, vp * s_phase + vq.scale(c));
                }
            }
        }
        if !rotated {
            break;
        }
        sweep += 1;
        assert!(sweep < max_sweeps, "one-sided Jacobi SVD failed to converge");
    }
    let mut norms: Vec<f64> = (0..cols)
        .map(|j| (0..u.rows()).map(|r| u.get(r, j).norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).expect("norms are finite"));
    let u_scaled = ComplexMatrix::from_fn(u.rows(), cols, |i, j| u.get(i, order[j]));
    let v_sorted = ComplexMatrix::from_fn(cols, cols, |i, j| v.get(i, order[j]));
    norms.sort_by(|x, y| y.partial_cmp(x).expect("norms are finite"));
    SvdFactors {
        sigma: norms,
        u_scaled,
        v: v_sorted,
    }
}

/// Singular values in descending order, padded or truncated to
/// min(rows, cols) entries.
pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    // Orthogonalizing the smaller column set is cheaper and identical in
    // value (singular values are invariant under dagger).
    let factors = if a.cols() <= a.rows() {
        svd_factors(a)
    } else {
        svd_factors(&a.dagger())
    };
    factors.sigma
}

/// Trace norm ||A||_1: the sum of singular values.
pub fn trace_norm(a: &ComplexMatrix) -> f64 {
    singular_values(a).iter().sum()
}

/// Operator norm: the largest singular value.
pub fn operator_norm(a: &ComplexMatrix) -> f64 {
    singular_values(a)[0]
}

/// Numerical rank with relative cutoff `rcond` (default: max-dim * machine
/// epsilon) applied to the largest singular value.
pub fn rank(a: &ComplexMatrix, rcond: Option<f64>) -> usize {
    let sv = singular_values(a);
    let cut = effective_cutoff(a, &sv, rcond);
    sv.iter().filter(|&&s| s > cut).count()
}

fn effective_cutoff(a: &ComplexMatrix, sv: &[f64], rcond: Option<f64>) -> f64 {
    let rc = rcond.unwrap_or(a.rows().max(a.cols()) as f64 * f64::EPSILON);
    rc * sv.first().copied().unwrap_or(0.0)
}

/// Minimum-Frobenius least-squares solution of A X = B via the pseudoinverse.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    /// The minimizer X = pinv(A) B.
    pub solution: ComplexMatrix,
    /// Frobenius norm of A X - B.
    pub residual: f64,
    /// Numerical rank of A used by the cutoff.
    pub rank: usize,
}

/// Solve A X = B in the least-squares sense via the one-sided Jacobi SVD;
/// singular values at or below `rcond * sigma_max` are treated as zero, so
/// the result is the min-Frobenius-norm solution.
pub fn least_squares(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    rcond: Option<f64>,
) -> Result<LeastSquares> {
    if a.rows() != b.rows() {
        return Err(Error::DimensionMismatch {
            context: "least squares row count",
            got: b.rows().to_string(),
            expected: a.rows().to_string(),
        });
    }
    let factors = svd_factors(a);
    let cut = effective_cutoff(a, &factors.sigma, rcond);
    let n = a.cols();

    // X = sum_j v_j (u_j^dag B) / sigma_j = sum_j v_j ((sigma_j u_j)^dag B) / sigma_j^2.
    let coeff = factors.u_scaled.dagger().matmul(b)?;
    let mut x = ComplexMatrix::zeros(n, b.cols());
    let mut used = 0;
    for (j, &s) in factors.sigma.iter().enumerate() {
        if s <= cut || s == 0.0 {
            continue;
        }
        used += 1;
        let inv = Complex64::new(1.0 / (s * s), 0.0);
        for r in 0..n {
            let vrj = factors.v.get(r, j);
            for c in 0..b.cols() {
                let add = vrj * coeff.get(j, c) * inv;
                x.set(r, c, x.get(r, c) + add);
            }
        }
    }
    let residual = a.matmul(&x)?.sub(b)?.fro_norm();
    Ok(LeastSquares {
        solution: x,
        residual,
        rank: used,
    })
}

/// Orthonormal basis of the range of an orthogonal projection, returned as
/// an isometry whose columns span ran(P). The eigen-ordering is stable, so
/// coordinate projections yield the natural coordinate basis.
pub fn range_isometry(p: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    if !p.is_square() {
        return Err(Error::NotAProjection {
            detail: format!("matrix is {}x{}", p.rows(), p.cols()),
        });
    }
    let dev_herm = p.hermiticity_deviation();
    let dev_idem = p.matmul(p)?.sub(p)?.max_abs();
    if dev_herm > tol || dev_idem > tol {
        return Err(Error::NotAProjection {
            detail: format!(
                "|P - P^dagger| = {dev_herm:.3e}, |P^2 - P| = {dev_idem:.3e} (tol {tol:.3e})"
            ),
        });
    }
    let eig = hermitian_eig(p, tol)?;
    let picked: Vec<usize> = (0..p.rows())
        .filter(|&j| eig.values[j] > 0.5)
        .collect();
    if picked.is_empty() {
        return Err(Error::NotAProjection {
            detail: "projection has rank zero".to_string(),
        });
    }
    Ok(ComplexMatrix::from_fn(p.rows(), picked.len(), |i, j| {
        eig.vectors.get(i, picked[j])
    }))
}
