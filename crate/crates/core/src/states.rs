//! Bipartite density matrices and the separability criteria battery:
//! positive partial transpose, realignment, and positive-map witnesses.
//!
//! Index convention, fixed globally: the composite row index is
//! i_a * dim_b + i_b, i.e. the first factor indexes dim_b-sized blocks.
//! The realignment flattening is pinned by the worked 3x3 example states
//! (`rho1_state` and its realignment matrix): block (i, j) of the
//! state becomes row i * dim_a + j of the realigned matrix, flattened
//! row-major.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, is_psd, trace_norm, ComplexMatrix, DEFAULT_TOL};
use crate::maps::{self, ElementaryOperator};
use crate::sampling::SeededSampler;

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Which tensor factor a map or transpose acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

impl std::str::FromStr for Side {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "left" => Ok(Side::Left),
            "right" => Ok(Side::Right),
            other => Err(Error::Parse(format!(
                "side must be \"left\" or \"right\", got \"{other}\""
            ))),
        }
    }
}

/// Density matrix on H_A (x) H_B with declared factor dimensions.
/// Validated at construction: Hermitian, unit trace, PSD (all within 1e-9).
#[derive(Debug, Clone)]
pub struct BipartiteState {
    dim_a: usize,
    dim_b: usize,
    matrix: ComplexMatrix,
}

impl BipartiteState {
    pub fn new(dim_a: usize, dim_b: usize, matrix: ComplexMatrix) -> Result<Self> {
        let d = dim_a * dim_b;
        if dim_a == 0 || dim_b == 0 {
            return Err(Error::StateInvariant {
                invariant: "dimension",
                detail: "factor dimensions must be positive".to_string(),
            });
        }
        if matrix.rows() != d || matrix.cols() != d {
            return Err(Error::StateInvariant {
                invariant: "dimension",
                detail: format!(
                    "matrix is {}x{}, expected {d}x{d} for factors {dim_a}x{dim_b}",
                    matrix.rows(),
                    matrix.cols()
                ),
            });
        }
        let dev = matrix.hermiticity_deviation();
        if dev > DEFAULT_TOL {
            return Err(Error::StateInvariant {
                invariant: "hermitian",
                detail: format!("max |M - M^dagger| = {dev:.3e} exceeds 1e-9"),
            });
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > DEFAULT_TOL || tr.im.abs() > DEFAULT_TOL {
            return Err(Error::StateInvariant {
                invariant: "trace",
                detail: format!("trace = {}+{}i, must be 1 within 1e-9", tr.re, tr.im),
            });
        }
        let psd = is_psd(&matrix, DEFAULT_TOL)?;
        if !psd.psd {
            return Err(Error::StateInvariant {
                invariant: "psd",
                detail: format!(
                    "minimum eigenvalue {:.3e} is below -1e-9",
                    psd.min_eigenvalue
                ),
            });
        }
        Ok(Self {
            dim_a,
            dim_b,
            matrix,
        })
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Entry at composite indices ((i_a, i_b), (j_a, j_b)).
    fn entry(&self, ia: usize, ib: usize, ja: usize, jb: usize) -> Complex64 {
        self.matrix.get(ia * self.dim_b + ib, ja * self.dim_b + jb)
    }

    /// Partial transpose of the chosen factor. Right transposes every
    /// dim_b block in place; left swaps blocks across the block diagonal.
    /// The two outputs are transposes of each other.
    pub fn partial_transpose(&self, side: Side) -> ComplexMatrix {
        let d = self.dim_a * self.dim_b;
        ComplexMatrix::from_fn(d, d, |r, c| {
            let (ia, ib) = (r / self.dim_b, r % self.dim_b);
            let (ja, jb) = (c / self.dim_b, c % self.dim_b);
            match side {
                Side::Right => self.entry(ia, jb, ja, ib),
                Side::Left => self.entry(ja, ib, ia, jb),
            }
        })
    }

    /// Realignment matrix, (dim_a^2) x (dim_b^2): block (i, j) of the state
    /// flattened row-major into row i * dim_a + j.
    pub fn realign(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim_a * self.dim_a, self.dim_b * self.dim_b, |r, c| {
            let (i, j) = (r / self.dim_a, r % self.dim_a);
            let (k, l) = (c / self.dim_b, c % self.dim_b);
            self.entry(i, k, j, l)
        })
    }

    /// PPT criterion: PSD check on the right partial transpose. Failure
    /// certifies entanglement in every dimension.
    pub fn is_ppt(&self, tol: f64) -> PptVerdict {
        let pt = self.partial_transpose(Side::Right);
        let herm_tol = 1e-9 * pt.max_abs().max(1.0);
        let min = linalg::min_eigenvalue(&pt, herm_tol.max(tol))
            .expect("partial transpose of a Hermitian state is Hermitian");
        PptVerdict {
            pass: min >= -tol,
            min_eigenvalue: min,
        }
    }

    /// Realignment criterion: trace norm of the realigned matrix exceeds 1
    /// only for entangled states.
    pub fn realignment_criterion(&self, tol: f64) -> RealignmentVerdict {
        let norm = trace_norm(&self.realign());
        RealignmentVerdict {
            pass: norm <= 1.0 + tol,
            trace_norm: norm,
        }
    }

    /// Apply an elementary operator to one factor: (I (x) Phi) for
    /// `Side::Right`, (Phi (x) I) for `Side::Left`. The acted factor's
    /// dimension becomes `phi.dim_out()`.
    pub fn apply_map_side(&self, phi: &ElementaryOperator, side: Side) -> Result<ComplexMatrix> {
        apply_map_to_factor(&self.matrix, self.dim_a, self.dim_b, phi, side)
    }

    /// Positive-map witness: entanglement is certified (verdict fail) when
    /// the mapped state has an eigenvalue below -tol. Only meaningful when
    /// `phi` is a positive map, which is the caller's responsibility.
    pub fn map_witness_test(
        &self,
        phi: &ElementaryOperator,
        side: Side,
        tol: f64,
    ) -> Result<WitnessVerdict> {
        let mapped = self.apply_map_side(phi, side)?;
        let herm_tol = 1e-9 * mapped.max_abs().max(1.0);
        let min = linalg::min_eigenvalue(&mapped, herm_tol.max(tol))?;
        Ok(WitnessVerdict {
            pass: min >= -tol,
            min_eigenvalue: min,
        })
    }

    /// Full criteria battery; `maps` lists the witnesses to run.
    pub fn run_battery(
        &self,
        witness_maps: &[(ElementaryOperator, Side)],
        tol: f64,
    ) -> Result<CriterionReport> {
        let ppt = self.is_ppt(tol);
        let realignment = self.realignment_criterion(tol);
        let mut witnesses = Vec::with_capacity(witness_maps.len());
        for (phi, side) in witness_maps {
            let verdict = self.map_witness_test(phi, *side, tol)?;
            witnesses.push(WitnessRecord {
                map_label: phi.label().to_string(),
                side: *side,
                min_eigenvalue: verdict.min_eigenvalue,
                pass: verdict.pass,
            });
        }
        let entangled =
            !ppt.pass || !realignment.pass || witnesses.iter().any(|w| !w.pass);
        Ok(CriterionReport {
            ppt,
            realignment,
            witnesses,
            overall: if entangled {
                Verdict::EntangledDetected
            } else {
                Verdict::SeparableConsistent
            },
        })
    }
}

/// Blockwise map application on a raw (not necessarily normalized) matrix
/// with the same index convention as `BipartiteState`. Useful for the
/// unnormalized witness operators whose integer eigenvalues are easiest to
/// state before normalization.
pub fn apply_map_to_factor(
    matrix: &ComplexMatrix,
    dim_a: usize,
    dim_b: usize,
    phi: &ElementaryOperator,
    side: Side,
) -> Result<ComplexMatrix> {
    let d = dim_a * dim_b;
    if matrix.rows() != d || matrix.cols() != d {
        return Err(Error::DimensionMismatch {
            context: "bipartite matrix size",
            got: format!("{}x{}", matrix.rows(), matrix.cols()),
            expected: format!("{d}x{d}"),
        });
    }
    let acted = match side {
        Side::Right => dim_b,
        Side::Left => dim_a,
    };
    if phi.dim_in() != acted {
        return Err(Error::DimensionMismatch {
            context: "map acts on factor",
            got: phi.dim_in().to_string(),
            expected: acted.to_string(),
        });
    }
    let entry = |ia: usize, ib: usize, ja: usize, jb: usize| matrix.get(ia * dim_b + ib, ja * dim_b + jb);
    let dout = phi.dim_out();
    match side {
        Side::Right => {
            let spectator = dim_a;
            let mut out = ComplexMatrix::zeros(spectator * dout, spectator * dout);
            for ia in 0..spectator {
                for ja in 0..spectator {
                    let block =
                        ComplexMatrix::from_fn(dim_b, dim_b, |ib, jb| entry(ia, ib, ja, jb));
                    let mapped = phi.apply(&block)?;
                    for r in 0..dout {
                        for c in 0..dout {
                            out.set(ia * dout + r, ja * dout + c, mapped.get(r, c));
                        }
                    }
                }
            }
            Ok(out)
        }
        Side::Left => {
            let spectator = dim_b;
            let mut out = ComplexMatrix::zeros(dout * spectator, dout * spectator);
            for ib in 0..spectator {
                for jb in 0..spectator {
                    let block =
                        ComplexMatrix::from_fn(dim_a, dim_a, |ia, ja| entry(ia, ib, ja, jb));
                    let mapped = phi.apply(&block)?;
                    for r in 0..dout {
                        for c in 0..dout {
                            out.set(r * spectator + ib, c * spectator + jb, mapped.get(r, c));
                        }
                    }
                }
            }
            Ok(out)
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PptVerdict {
    pub pass: bool,
    pub min_eigenvalue: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct RealignmentVerdict {
    pub pass: bool,
    pub trace_norm: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct WitnessVerdict {
    pub pass: bool,
    pub min_eigenvalue: f64,
}

#[derive(Debug, Clone)]
pub struct WitnessRecord {
    pub map_label: String,
    pub side: Side,
    pub min_eigenvalue: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    SeparableConsistent,
    EntangledDetected,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::SeparableConsistent => "separable-consistent",
            Verdict::EntangledDetected => "entangled-detected",
        }
    }
}

/// Structured verdicts for one state. `overall` is entangled-detected iff
/// at least one sub-verdict failed.
#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub ppt: PptVerdict,
    pub realignment: RealignmentVerdict,
    pub witnesses: Vec<WitnessRecord>,
    pub overall: Verdict,
}

/// Default witness battery for the given factor dimensions: transpose and
/// reduction on the right factor always; Gamma and Gamma' additionally on
/// 3x3 factors (they are 3x3-specific maps).
pub fn default_battery(dim_a: usize, dim_b: usize) -> Vec<(ElementaryOperator, Side)> {
    let mut battery = Vec::new();
    if dim_a == 3 && dim_b == 3 {
        battery.push((maps::gamma_map(), Side::Right));
        battery.push((maps::gamma_prime_map(), Side::Right));
    }
    if dim_b >= 2 {
        battery.push((
            maps::transpose_map(dim_b).expect("dim checked"),
            Side::Right,
        ));
        battery.push((
            maps::reduction_map(dim_b).expect("dim checked"),
            Side::Right,
        ));
    }
    battery
}

// ---------------------------------------------------------------------------
// Concrete states
// ---------------------------------------------------------------------------

/// Unnormalized 9x9 pattern rho_0(a, b) on C^3 (x) C^3; its diagonal is
/// (1, a, b, b, 1, a, a, b, 1) and the normalization constant is
/// 3(1 + a + b).
pub fn rho_pattern(a: f64, b: f64) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(9, 9);
    let diag = [1.0, a, b, b, 1.0, a, a, b, 1.0];
    for (i, &v) in diag.iter().enumerate() {
        m.set(i, i, re(v));
    }
    // The maximally-entangled corner pattern.
    for &i in &[0usize, 4, 8] {
        for &j in &[0usize, 4, 8] {
            m.set(i, j, re(1.0));
        }
    }
    // The symmetric pair couplings.
    for &(i, j) in &[(1usize, 3usize), (2, 6), (5, 7)] {
        m.set(i, j, re(1.0));
        m.set(j, i, re(1.0));
    }
    m
}

/// The PPT family rho(a, b) = rho_0 / (3(1 + a + b)) on C^3 (x) C^3.
/// Requires a, b > 0 and a != 1; positive semidefiniteness (which holds
/// exactly when ab >= 1) is verified at construction.
pub fn rho_state(a: f64, b: f64) -> Result<BipartiteState> {
    if a.is_nan() || b.is_nan() || a <= 0.0 || b <= 0.0 {
        return Err(Error::StateInvariant {
            invariant: "parameters",
            detail: format!("a and b must be positive (got a={a}, b={b})"),
        });
    }
    if a == 1.0 {
        return Err(Error::StateInvariant {
            invariant: "parameters",
            detail: "a must differ from 1".to_string(),
        });
    }
    let norm = 3.0 * (1.0 + a + b);
    let matrix = rho_pattern(a, b).scale_real(1.0 / norm);
    BipartiteState::new(3, 3, matrix).map_err(|e| match e {
        Error::StateInvariant {
            invariant: "psd",
            detail,
        } => Error::StateInvariant {
            invariant: "psd",
            detail: format!("rho(a={a}, b={b}) is not PSD (requires ab >= 1): {detail}"),
        },
        other => other,
    })
}

/// The 9x9 PPT entangled state rho_1 (entries {0, 0.99, 1.01, 63}/195).
/// Its diagonal sums to exactly 195, so the trace is 1.
pub fn rho1_state() -> BipartiteState {
    let rows: [[f64; 9]; 9] = [
        [0.99, 0.0, 0.0, 0.0, 0.99, 0.0, 0.0, 0.0, 0.99],
        [0.0, 63.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 1.01, 1.01, 0.0, 0.0, 0.0, 1.01, 0.0],
        [0.0, 0.0, 1.01, 1.01, 0.0, 0.0, 0.0, 1.01, 0.0],
        [0.99, 0.0, 0.0, 0.0, 0.99, 0.0, 0.0, 0.0, 0.99],
        [0.0, 0.0, 0.0, 0.0, 0.0, 63.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 63.0, 0.0, 0.0],
        [0.0, 0.0, 1.01, 1.01, 0.0, 0.0, 0.0, 1.01, 0.0],
        [0.99, 0.0, 0.0, 0.0, 0.99, 0.0, 0.0, 0.0, 0.99],
    ];
    let data: Vec<Complex64> = rows
        .iter()
        .flat_map(|r| r.iter().map(|&x| re(x / 195.0)))
        .collect();
    let matrix = ComplexMatrix::new(9, 9, data).expect("fixed finite entries");
    BipartiteState::new(3, 3, matrix).expect("rho_1 is a valid state")
}

/// The 2x2 maximally entangled (Bell) projector |Phi+><Phi+|.
pub fn bell_state() -> BipartiteState {
    let mut m = ComplexMatrix::zeros(4, 4);
    for &i in &[0usize, 3] {
        for &j in &[0usize, 3] {
            m.set(i, j, re(0.5));
        }
    }
    BipartiteState::new(2, 2, m).expect("Bell projector is a valid state")
}

/// Factor distribution for `random_separable_with`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorKind {
    /// Rank-one Haar pure-state factors (extreme points of the separable
    /// set; the default).
    HaarPure,
    /// Full-rank Wishart-normalized factors.
    Wishart,
}

/// Seeded random density matrix G G^dagger / Tr(G G^dagger).
pub fn random_density(dim: usize, seed: u64) -> Result<ComplexMatrix> {
    if dim == 0 {
        return Err(Error::EmptyMatrix);
    }
    let mut sampler = SeededSampler::new(seed);
    Ok(wishart(&mut sampler, dim))
}

fn wishart(sampler: &mut SeededSampler, dim: usize) -> ComplexMatrix {
    let g = sampler.gaussian_matrix(dim, dim);
    let gram = g.matmul(&g.dagger()).expect("square");
    let tr = gram.trace().re;
    gram.scale_real(1.0 / tr)
}

/// Seeded random separable state: a mixture of `terms` product states with
/// Haar pure factors.
pub fn random_separable(
    dim_a: usize,
    dim_b: usize,
    terms: usize,
    seed: u64,
) -> Result<BipartiteState> {
    random_separable_with(dim_a, dim_b, terms, seed, FactorKind::HaarPure)
}

/// Seeded random separable state with an explicit factor distribution.
pub fn random_separable_with(
    dim_a: usize,
    dim_b: usize,
    terms: usize,
    seed: u64,
    factors: FactorKind,
) -> Result<BipartiteState> {
    if terms == 0 {
        return Err(Error::StateInvariant {
            invariant: "parameters",
            detail: "terms must be >= 1".to_string(),
        });
    }
    if dim_a == 0 || dim_b == 0 {
        return Err(Error::EmptyMatrix);
    }
    let mut sampler = SeededSampler::new(seed);
    let weights = sampler.probability_vector(terms);
    let d = dim_a * dim_b;
    let mut total = ComplexMatrix::zeros(d, d);
    for &p in &weights {
        let (rho_a, rho_b) = match factors {
            FactorKind::HaarPure => (
                ComplexMatrix::outer(&sampler.haar_unit_vector(dim_a)),
                ComplexMatrix::outer(&sampler.haar_unit_vector(dim_b)),
            ),
            FactorKind::Wishart => (wishart(&mut sampler, dim_a), wishart(&mut sampler, dim_b)),
        };
        total = total.add(&rho_a.kron(&rho_b).scale_real(p))?;
    }
    BipartiteState::new(dim_a, dim_b, total)
}
