//! Seeded random operators for tests, fixtures and CLI defaults.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::operator::{trace_norm, LabelSet, LabeledOperator};

pub struct Rng(ChaCha8Rng);

impl Rng {
    pub fn seeded(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.0.gen_range(lo..hi)
    }

    fn entry(&mut self) -> C64 {
        C64::new(self.uniform(-1.0, 1.0), self.uniform(-1.0, 1.0))
    }

    pub fn complex_matrix(&mut self, n: usize) -> DMatrix<C64> {
        DMatrix::from_fn(n, n, |_, _| self.entry())
    }

    pub fn hermitian(&mut self, n: usize) -> DMatrix<C64> {
        let a = self.complex_matrix(n);
        (&a + a.adjoint()) * C64::new(0.5, 0.0)
    }

    pub fn unit_vector(&mut self, n: usize) -> DVector<C64> {
        let v = DVector::from_fn(n, |_, _| self.entry());
        let norm = v.norm();
        v / C64::new(norm, 0.0)
    }

    /// Positive semidefinite matrix of unit trace.
    pub fn density_matrix(&mut self, n: usize) -> DMatrix<C64> {
        let a = self.complex_matrix(n);
        let p = &a * a.adjoint();
        let tr = p.trace();
        p / tr
    }

    /// Hermitian matrix rescaled to trace norm `norm`.
    pub fn hermitian_with_trace_norm(&mut self, n: usize, norm: f64) -> DMatrix<C64> {
        let h = self.hermitian(n);
        let t = trace_norm(&h);
        h * C64::new(norm / t, 0.0)
    }

    /// Hermitian, permutation-symmetric operator on `labels` with the given
    /// trace norm.
    pub fn symmetric_hermitian(&mut self, labels: LabelSet, dim: usize, norm: f64) -> LabeledOperator {
        let n = dim.pow(labels.len() as u32);
        let raw = LabeledOperator::new(labels, dim, self.hermitian(n)).expect("square");
        let s = raw.symmetrize();
        let t = s.trace_norm();
        s.scale_real(norm / t)
    }
}
