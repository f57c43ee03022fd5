//! Property suites for the matrix layer: Kronecker algebra, eigensolver
//! reconstruction, singular-value symmetries, unitary invariance.

use entwit_core::linalg::{
    hermitian_eig, singular_values, trace_norm, ComplexMatrix,
};
use entwit_core::sampling::SeededSampler;
use num_complex::Complex64;
use proptest::prelude::*;

fn random_matrix(sampler: &mut SeededSampler, rows: usize, cols: usize) -> ComplexMatrix {
    sampler.gaussian_matrix(rows, cols)
}

fn random_hermitian(sampler: &mut SeededSampler, n: usize) -> ComplexMatrix {
    let g = sampler.gaussian_matrix(n, n);
    g.add(&g.dagger()).unwrap().scale_real(0.5)
}

fn random_unitary(sampler: &mut SeededSampler, n: usize) -> ComplexMatrix {
    // Eigenvector matrix of a random Hermitian matrix.
    let h = random_hermitian(sampler, n);
    hermitian_eig(&h, 1e-6 * h.max_abs().max(1.0)).unwrap().vectors
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Exact associativity is asserted on dyadic entries (where every
    /// product is exactly representable); generic entries get a 1-ulp
    /// relative bound, since float multiplication itself is not
    /// associative in the last ulp.
    #[test]
    fn kron_is_associative_exactly_on_dyadic_entries(
        seed in 0u64..1000, da in 1usize..4, db in 1usize..4, dc in 1usize..4
    ) {
        let mut s = SeededSampler::new(seed);
        let mut dyadic = |rows: usize, cols: usize| {
            ComplexMatrix::from_fn(rows, cols, |_, _| {
                let re = ((s.uniform() * 65.0).floor() - 32.0) / 16.0;
                let im = ((s.uniform() * 65.0).floor() - 32.0) / 16.0;
                Complex64::new(re, im)
            })
        };
        let a = dyadic(da, da + 1);
        let b = dyadic(db + 1, db);
        let c = dyadic(dc, dc);
        let left = a.kron(&b).kron(&c);
        let right = a.kron(&b.kron(&c));
        prop_assert_eq!(left, right);
    }

    #[test]
    fn kron_is_associative_to_roundoff_on_generic_entries(
        seed in 0u64..1000, da in 1usize..4, db in 1usize..4, dc in 1usize..4
    ) {
        let mut s = SeededSampler::new(seed);
        let a = random_matrix(&mut s, da, da + 1);
        let b = random_matrix(&mut s, db + 1, db);
        let c = random_matrix(&mut s, dc, dc);
        let left = a.kron(&b).kron(&c);
        let right = a.kron(&b.kron(&c));
        let scale = left.max_abs().max(1.0);
        prop_assert!(left.sub(&right).unwrap().max_abs() <= 1e-15 * scale);
    }

    #[test]
    fn kron_trace_is_multiplicative(seed in 0u64..1000, da in 1usize..5, db in 1usize..5) {
        let mut s = SeededSampler::new(seed);
        let a = random_matrix(&mut s, da, da);
        let b = random_matrix(&mut s, db, db);
        let lhs = a.kron(&b).trace();
        let rhs = a.trace() * b.trace();
        let scale = 1.0_f64.max(rhs.norm());
        prop_assert!((lhs - rhs).norm() <= 1e-12 * scale);
    }

    #[test]
    fn singular_values_match_dagger(seed in 0u64..1000, rows in 1usize..6, cols in 1usize..6) {
        let mut s = SeededSampler::new(seed);
        let a = random_matrix(&mut s, rows, cols);
        let sv = singular_values(&a);
        let svd = singular_values(&a.dagger());
        let k = sv.len().min(svd.len());
        for i in 0..k {
            prop_assert!((sv[i] - svd[i]).abs() < 1e-10);
        }
        for &extra in sv.iter().skip(k).chain(svd.iter().skip(k)) {
            prop_assert!(extra.abs() < 1e-10);
        }
    }

    #[test]
    fn eig_reconstructs_random_hermitian(seed in 0u64..1000, n in 1usize..9) {
        let mut s = SeededSampler::new(seed);
        let h = random_hermitian(&mut s, n);
        let eig = hermitian_eig(&h, 1e-9).unwrap();
        let v = &eig.vectors;
        let rebuilt = v
            .matmul(&ComplexMatrix::diag_real(&eig.values)).unwrap()
            .matmul(&v.dagger()).unwrap();
        let tol = 1e-10 * h.max_abs().max(1.0);
        prop_assert!(rebuilt.sub(&h).unwrap().max_abs() <= tol);
        // Ascending order.
        for w in eig.values.windows(2) {
            prop_assert!(w[0] <= w[1]);
        }
        // Orthonormal columns.
        let gram = v.dagger().matmul(v).unwrap();
        prop_assert!(gram.sub(&ComplexMatrix::identity(n)).unwrap().max_abs() < 1e-11);
    }

    #[test]
    fn trace_norm_is_unitarily_invariant(seed in 0u64..1000, n in 2usize..6) {
        let mut s = SeededSampler::new(seed);
        let a = random_matrix(&mut s, n, n);
        let u = random_unitary(&mut s, n);
        let v = random_unitary(&mut s, n);
        let rotated = u.matmul(&a).unwrap().matmul(&v).unwrap();
        prop_assert!((trace_norm(&rotated) - trace_norm(&a)).abs() < 1e-10);
    }
}

#[test]
fn eig_reconstruction_up_to_dim_64() {
    for &n in &[16usize, 33, 64] {
        let mut s = SeededSampler::new(n as u64);
        let g = s.gaussian_matrix(n, n);
        let h = g.add(&g.dagger()).unwrap().scale_real(0.5);
        let eig = hermitian_eig(&h, 1e-9 * h.max_abs().max(1.0)).unwrap();
        let v = &eig.vectors;
        let rebuilt = v
            .matmul(&ComplexMatrix::diag_real(&eig.values))
            .unwrap()
            .matmul(&v.dagger())
            .unwrap();
        let tol = 1e-10 * h.max_abs().max(1.0);
        assert!(
            rebuilt.sub(&h).unwrap().max_abs() <= tol,
            "reconstruction failed at dim {n}"
        );
    }
}

#[test]
fn eig_is_deterministic() {
    let mut s = SeededSampler::new(99);
    let g = s.gaussian_matrix(7, 7);
    let h = g.add(&g.dagger()).unwrap().scale_real(0.5);
    let a = hermitian_eig(&h, 1e-9).unwrap();
    let b = hermitian_eig(&h, 1e-9).unwrap();
    assert_eq!(a.values, b.values);
    assert_eq!(a.vectors, b.vectors);
}

#[test]
fn degenerate_spectra_compare_as_multisets() {
    // A projector with a 2-fold eigenvalue: the eigenvector pair spanning
    // the degenerate cluster is basis-dependent, but the projector onto the
    // cluster is not.
    let mut s = SeededSampler::new(5);
    let u = random_unitary(&mut s, 4);
    // Spectrum (0, 1, 1, 3).
    let d = ComplexMatrix::diag_real(&[0.0, 1.0, 1.0, 3.0]);
    let h = u.matmul(&d).unwrap().matmul(&u.dagger()).unwrap();
    let eig = hermitian_eig(&h, 1e-9).unwrap();
    let expect = [0.0, 1.0, 1.0, 3.0];
    for (got, want) in eig.values.iter().zip(expect.iter()) {
        assert!((got - want).abs() < 1e-10);
    }
    // Subspace membership: each computed eigenvector for eigenvalue 1 is
    // fixed by the spectral projector for that cluster.
    let cluster: Vec<usize> = (0..4).filter(|&j| (eig.values[j] - 1.0).abs() < 1e-8).collect();
    assert_eq!(cluster.len(), 2);
    // Spectral projector from the reference decomposition.
    let p_ref = {
        let cols: Vec<Vec<Complex64>> = vec![u.column(1), u.column(2)];
        let basis = ComplexMatrix::from_columns(&cols).unwrap();
        basis.matmul(&basis.dagger()).unwrap()
    };
    for &j in &cluster {
        let vj = eig.vectors.column(j);
        let pv = p_ref.apply_vec(&vj).unwrap();
        let dev: f64 = pv
            .iter()
            .zip(vj.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(dev < 1e-9, "eigenvector leaves its degenerate cluster: {dev}");
    }
}
