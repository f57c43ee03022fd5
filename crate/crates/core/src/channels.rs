//! Kraus-form quantum channels: rho -> sum M_i rho M_i^dagger with
//! sum M_i^dagger M_i = I (trace-preserving) or <= I (trace-nonincreasing).
//! The kind is audited from the Kraus family, never declared.

use crate::error::{Error, Result};
use crate::linalg::{is_psd, ComplexMatrix, DEFAULT_TOL};
use crate::maps::ElementaryOperator;
use crate::sampling::SeededSampler;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKind {
    TracePreserving,
    TraceNonincreasing,
}

impl ChannelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ChannelKind::TracePreserving => "trace-preserving",
            ChannelKind::TraceNonincreasing => "trace-nonincreasing",
        }
    }
}

/// All-plus Kraus family with audited trace behavior.
#[derive(Debug, Clone)]
pub struct QuantumChannel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<ComplexMatrix>,
    kind: ChannelKind,
}

impl QuantumChannel {
    /// Build and audit. Fails if the family is empty, shapes disagree, or
    /// sum M_i^dagger M_i exceeds the identity beyond `tol`.
    pub fn new(
        dim_in: usize,
        dim_out: usize,
        kraus: Vec<ComplexMatrix>,
        tol: f64,
    ) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::MapConstruction(
                "a channel needs at least one Kraus operator".to_string(),
            ));
        }
        for m in &kraus {
            if m.rows() != dim_out || m.cols() != dim_in {
                return Err(Error::DimensionMismatch {
                    context: "channel Kraus shape",
                    got: format!("{}x{}", m.rows(), m.cols()),
                    expected: format!("{dim_out}x{dim_in}"),
                });
            }
        }
        let kind = audit_kraus(&kraus, dim_in, tol)?;
        Ok(Self {
            dim_in,
            dim_out,
            kraus,
            kind,
        })
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    /// Re-run the audit with a caller tolerance.
    pub fn audit(&self, tol: f64) -> Result<ChannelKind> {
        audit_kraus(&self.kraus, self.dim_in, tol)
    }

    /// Evolve a density matrix. The input must be a state (PSD, trace 1
    /// within 1e-9); the output is PSD with trace preserved or reduced
    /// according to the audited kind.
    pub fn evolve(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.rows() != self.dim_in || rho.cols() != self.dim_in {
            return Err(Error::DimensionMismatch {
                context: "channel input shape",
                got: format!("{}x{}", rho.rows(), rho.cols()),
                expected: format!("{0}x{0}", self.dim_in),
            });
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > DEFAULT_TOL || tr.im.abs() > DEFAULT_TOL {
            return Err(Error::StateInvariant {
                invariant: "trace",
                detail: format!("input trace = {}+{}i, must be 1", tr.re, tr.im),
            });
        }
        let psd = is_psd(rho, DEFAULT_TOL)?;
        if !psd.psd {
            return Err(Error::StateInvariant {
                invariant: "psd",
                detail: format!("input min eigenvalue {:.3e}", psd.min_eigenvalue),
            });
        }
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for m in &self.kraus {
            out = out.add(&m.matmul(rho)?.matmul(&m.dagger())?)?;
        }
        Ok(out)
    }

    /// View the channel as an all-plus elementary operator (which is then
    /// completely positive by construction).
    pub fn as_elementary_operator(&self) -> ElementaryOperator {
        ElementaryOperator::new(
            self.dim_in,
            self.dim_out,
            self.kraus.clone(),
            vec![],
            "channel",
        )
        .expect("channel Kraus shapes already validated")
    }
}

/// Audit a Kraus family: trace-preserving when sum M_i^dagger M_i is the
/// identity within tol (max norm), trace-nonincreasing when I - sum is PSD
/// within tol, otherwise not a channel.
pub fn audit_kraus(kraus: &[ComplexMatrix], dim_in: usize, tol: f64) -> Result<ChannelKind> {
    let mut sum = ComplexMatrix::zeros(dim_in, dim_in);
    for m in kraus {
        sum = sum.add(&m.dagger().matmul(m)?)?;
    }
    let id = ComplexMatrix::identity(dim_in);
    if sum.sub(&id)?.max_abs() <= tol {
        return Ok(ChannelKind::TracePreserving);
    }
    let gap = id.sub(&sum)?;
    let verdict = is_psd(&gap, 1e-9 * gap.max_abs().max(1.0))?;
    if verdict.min_eigenvalue >= -tol {
        Ok(ChannelKind::TraceNonincreasing)
    } else {
        Err(Error::NotAChannel {
            excess: -verdict.min_eigenvalue,
        })
    }
}

/// Compose two channels: `second` after `first`. The Kraus family is the
/// set of products over all pairs.
pub fn compose(second: &QuantumChannel, first: &QuantumChannel) -> Result<QuantumChannel> {
    if first.dim_out != second.dim_in {
        return Err(Error::DimensionMismatch {
            context: "channel composition",
            got: second.dim_in.to_string(),
            expected: first.dim_out.to_string(),
        });
    }
    let mut kraus = Vec::with_capacity(first.kraus.len() * second.kraus.len());
    for m2 in &second.kraus {
        for m1 in &first.kraus {
            kraus.push(m2.matmul(m1)?);
        }
    }
    QuantumChannel::new(first.dim_in, second.dim_out, kraus, DEFAULT_TOL)
}

/// Random trace-preserving channel: the Kraus blocks are the block rows of
/// a Haar-random isometry from dim_in into dim_in * count, so
/// sum M_i^dagger M_i = I holds by construction.
pub fn random_channel(dim_in: usize, kraus_count: usize, seed: u64) -> Result<QuantumChannel> {
    if dim_in == 0 || kraus_count == 0 {
        return Err(Error::MapConstruction(
            "channel dimensions and Kraus count must be positive".to_string(),
        ));
    }
    let mut sampler = SeededSampler::new(seed);
    let tall = sampler.gaussian_matrix(dim_in * kraus_count, dim_in);
    let iso = orthonormalize_columns(&tall)?;
    let kraus = (0..kraus_count)
        .map(|i| {
            ComplexMatrix::from_fn(dim_in, dim_in, |r, c| iso.get(i * dim_in + r, c))
        })
        .collect();
    QuantumChannel::new(dim_in, dim_in, kraus, 1e-10)
}

/// Modified Gram-Schmidt with re-orthogonalization; the input must have
/// full column rank (Gaussian draws do, almost surely).
fn orthonormalize_columns(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let cols = m.cols();
    let mut q: Vec<Vec<num_complex::Complex64>> = (0..cols).map(|j| m.column(j)).collect();
    for j in 0..cols {
        for _pass in 0..2 {
            for i in 0..j {
                let proj: num_complex::Complex64 = q[i]
                    .iter()
                    .zip(q[j].iter())
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                let qi = q[i].clone();
                for (x, y) in q[j].iter_mut().zip(qi.iter()) {
                    *x -= proj * y;
                }
            }
        }
        let norm = crate::linalg::vec_norm(&q[j]);
        if norm < 1e-12 {
            return Err(Error::MapConstruction(
                "column set is rank deficient; cannot orthonormalize".to_string(),
            ));
        }
        for x in q[j].iter_mut() {
            *x /= norm;
        }
    }
    ComplexMatrix::from_columns(&q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::random_density;

    #[test]
    fn audit_identity_dephasing_and_scaled() {
        let id = QuantumChannel::new(2, 2, vec![ComplexMatrix::identity(2)], 1e-9).unwrap();
        assert_eq!(id.kind(), ChannelKind::TracePreserving);

        let dephasing = QuantumChannel::new(
            2,
            2,
            vec![
                ComplexMatrix::matrix_unit(2, 0, 0),
                ComplexMatrix::matrix_unit(2, 1, 1),
            ],
            1e-9,
        )
        .unwrap();
        assert_eq!(dephasing.kind(), ChannelKind::TracePreserving);

        let damped =
            QuantumChannel::new(2, 2, vec![ComplexMatrix::identity(2).scale_real(0.5)], 1e-9)
                .unwrap();
        assert_eq!(damped.kind(), ChannelKind::TraceNonincreasing);
    }

    #[test]
    fn audit_rejects_super_identity_families() {
        let too_big =
            QuantumChannel::new(2, 2, vec![ComplexMatrix::identity(2).scale_real(1.5)], 1e-9);
        assert!(matches!(too_big, Err(Error::NotAChannel { .. })));
    }

    #[test]
    fn evolve_dephasing_kills_coherences() {
        let dephasing = QuantumChannel::new(
            2,
            2,
            vec![
                ComplexMatrix::matrix_unit(2, 0, 0),
                ComplexMatrix::matrix_unit(2, 1, 1),
            ],
            1e-9,
        )
        .unwrap();
        let plus = ComplexMatrix::from_real(2, 2, &[0.5, 0.5, 0.5, 0.5]).unwrap();
        let out = dephasing.evolve(&plus).unwrap();
        let expect = ComplexMatrix::diag_real(&[0.5, 0.5]);
        assert!(out.sub(&expect).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn evolve_rejects_non_states() {
        let id = QuantumChannel::new(2, 2, vec![ComplexMatrix::identity(2)], 1e-9).unwrap();
        let not_normalized = ComplexMatrix::identity(2);
        assert!(id.evolve(&not_normalized).is_err());
        let not_psd = ComplexMatrix::diag_real(&[1.5, -0.5]);
        assert!(id.evolve(&not_psd).is_err());
    }

    #[test]
    fn random_channels_are_trace_preserving_and_positive() {
        for seed in 0..5u64 {
            let ch = random_channel(3, 2, seed).unwrap();
            assert_eq!(ch.kind(), ChannelKind::TracePreserving);
            let rho = random_density(3, seed + 100).unwrap();
            let out = ch.evolve(&rho).unwrap();
            assert!((out.trace().re - 1.0).abs() < 1e-12);
            let verdict = is_psd(&out, 1e-10).unwrap();
            assert!(verdict.min_eigenvalue >= -1e-10);
        }
    }

    #[test]
    fn compose_matches_sequential_evolution() {
        let a = random_channel(2, 2, 1).unwrap();
        let b = random_channel(2, 3, 2).unwrap();
        let ba = compose(&b, &a).unwrap();
        assert_eq!(ba.kind(), ChannelKind::TracePreserving);
        let rho = random_density(2, 5).unwrap();
        let lhs = ba.evolve(&rho).unwrap();
        let rhs = b.evolve(&a.evolve(&rho).unwrap()).unwrap();
        assert!(lhs.sub(&rhs).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn compose_dimension_mismatch() {
        let a = random_channel(2, 2, 1).unwrap();
        let c = random_channel(3, 2, 3).unwrap();
        assert!(compose(&c, &a).is_err());
    }

    #[test]
    fn dephasing_is_idempotent_on_matrix_units() {
        let dephasing = QuantumChannel::new(
            2,
            2,
            vec![
                ComplexMatrix::matrix_unit(2, 0, 0),
                ComplexMatrix::matrix_unit(2, 1, 1),
            ],
            1e-9,
        )
        .unwrap();
        let twice = compose(&dephasing, &dephasing).unwrap();
        // Compare as maps on the spanning set of matrix units.
        for i in 0..2 {
            for j in 0..2 {
                let unit = ComplexMatrix::matrix_unit(2, i, j);
                let once: ComplexMatrix = dephasing
                    .kraus()
                    .iter()
                    .fold(ComplexMatrix::zeros(2, 2), |acc, m| {
                        acc.add(&m.matmul(&unit).unwrap().matmul(&m.dagger()).unwrap())
                            .unwrap()
                    });
                let double: ComplexMatrix = twice
                    .kraus()
                    .iter()
                    .fold(ComplexMatrix::zeros(2, 2), |acc, m| {
                        acc.add(&m.matmul(&unit).unwrap().matmul(&m.dagger()).unwrap())
                            .unwrap()
                    });
                assert!(once.sub(&double).unwrap().max_abs() < 1e-12);
            }
        }
    }

    #[test]
    fn channel_choi_is_psd() {
        for seed in 0..3u64 {
            let ch = random_channel(2, 3, seed).unwrap();
            let op = ch.as_elementary_operator();
            let v = op.is_completely_positive(1e-9);
            assert!(v.completely_positive);
        }
        // Identity channel maps to the identity elementary operator.
        let id = QuantumChannel::new(2, 2, vec![ComplexMatrix::identity(2)], 1e-9).unwrap();
        let op = id.as_elementary_operator();
        assert_eq!(op.plus_kraus().len(), 1);
        assert!(op.minus_kraus().is_empty());
    }
}
