//! Seeded randomness for falsifiers and state generators.
//!
//! Sampling goes through a ChaCha12 stream and a Box-Muller transform built
//! on raw 53-bit uniforms, so a given seed yields the same draw sequence on
//! every platform regardless of the `rand` front-end version.

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::linalg::{vec_norm, ComplexMatrix};

pub struct SeededSampler {
    rng: ChaCha12Rng,
}

impl SeededSampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha12Rng::seed_from_u64(seed),
        }
    }

    /// Uniform in [0, 1) with 53 bits of precision.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via Box-Muller.
    pub fn normal(&mut self) -> f64 {
        let mut u1 = self.uniform();
        while u1 == 0.0 {
            u1 = self.uniform();
        }
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    /// Complex standard normal (independent real and imaginary parts).
    pub fn complex_normal(&mut self) -> Complex64 {
        Complex64::new(self.normal(), self.normal())
    }

    /// Haar-distributed unit vector: a normalized complex Gaussian draw.
    pub fn haar_unit_vector(&mut self, dim: usize) -> Vec<Complex64> {
        loop {
            let v: Vec<Complex64> = (0..dim).map(|_| self.complex_normal()).collect();
            let n = vec_norm(&v);
            if n > 1e-12 {
                return v.iter().map(|z| z / n).collect();
            }
        }
    }

    pub fn gaussian_matrix(&mut self, rows: usize, cols: usize) -> ComplexMatrix {
        let data: Vec<Complex64> = (0..rows * cols).map(|_| self.complex_normal()).collect();
        ComplexMatrix::new(rows, cols, data).expect("gaussian entries are finite")
    }

    /// Random probability vector (normalized exponentials).
    pub fn probability_vector(&mut self, len: usize) -> Vec<f64> {
        let mut w: Vec<f64> = (0..len)
            .map(|_| {
                let mut u = self.uniform();
                while u == 0.0 {
                    u = self.uniform();
                }
                -u.ln()
            })
            .collect();
        let total: f64 = w.iter().sum();
        for x in &mut w {
            *x /= total;
        }
        w
    }
}
