//! Model specification, Hamiltonians and the unitary groups they generate.
//!
//! Particles are identical, so `H_n` is permutation invariant and its
//! propagator depends only on `n`: one eigendecomposition per particle count
//! serves every label set of that size.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{domain, invalid, Error, Result};
use crate::operator::{Label, LabelSet, LabeledOperator};
use crate::random::Rng;

pub const DEFAULT_LABEL_CAP: usize = 7;

const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    pub dim: usize,
    /// One-particle kinetic matrix `K` (d × d).
    pub kinetic: DMatrix<C64>,
    /// Two-body potential `Φ` (d² × d²), symmetric under exchange.
    pub potential: DMatrix<C64>,
    pub epsilon: f64,
    pub label_cap: usize,
}

impl ModelSpec {
    pub fn new(kinetic: DMatrix<C64>, potential: DMatrix<C64>, epsilon: f64) -> Result<Self> {
        let m = Self { dim: kinetic.nrows(), kinetic, potential, epsilon, label_cap: DEFAULT_LABEL_CAP };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim;
        if d == 0 || self.kinetic.shape() != (d, d) {
            return invalid("K must be a nonempty square matrix");
        }
        if self.potential.shape() != (d * d, d * d) {
            return invalid(format!("Φ must be {0}×{0}", d * d));
        }
        // ε = 0 is admitted: it is the free (control) model
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return invalid("epsilon must be finite and nonnegative");
        }
        let k = LabeledOperator::new(LabelSet::range(1, 1), d, self.kinetic.clone())?;
        let phi = self.potential_op(1, 2);
        let scale = 1.0 + phi.max_abs() + k.max_abs();
        if k.hermiticity_defect() > 1e-12 * scale {
            return invalid("K is not Hermitian");
        }
        if phi.hermiticity_defect() > 1e-12 * scale {
            return invalid("Φ is not Hermitian");
        }
        if phi.symmetry_defect() > 1e-12 * scale {
            return invalid("Φ is not invariant under particle exchange");
        }
        Ok(())
    }

    /// Default test model: `d = 2`, `K = diag(0, 1)`, `Φ` an exchange-symmetric
    /// random Hermitian matrix with unit operator norm.
    pub fn default_test(seed: u64, epsilon: f64) -> Self {
        let mut kinetic = DMatrix::zeros(2, 2);
        kinetic[(1, 1)] = C64::new(1.0, 0.0);
        let potential = random_potential(&mut Rng::seeded(seed), 2);
        Self::new(kinetic, potential, epsilon).expect("valid default model")
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        Self { epsilon, ..self.clone() }
    }

    pub fn without_interaction(&self) -> Self {
        Self { potential: DMatrix::zeros(self.dim * self.dim, self.dim * self.dim), ..self.clone() }
    }

    pub fn kinetic_op(&self, j: Label) -> LabeledOperator {
        LabeledOperator::new(LabelSet::singleton(j), self.dim, self.kinetic.clone()).expect("shape checked")
    }

    pub fn potential_op(&self, j1: Label, j2: Label) -> LabeledOperator {
        LabeledOperator::new(LabelSet::new(vec![j1, j2]).expect("distinct pair"), self.dim, self.potential.clone())
            .expect("shape checked")
    }

    /// Operator norm of `Φ`.
    pub fn potential_norm(&self) -> f64 {
        op_norm(&self.potential)
    }

    pub(crate) fn check_cap(&self, n: usize) -> Result<()> {
        if n > self.label_cap {
            return Err(Error::Resource(format!("{n} particles exceed the label cap {}", self.label_cap)));
        }
        Ok(())
    }
}

/// Exchange-symmetrized random Hermitian `d² × d²` matrix with unit operator norm.
pub fn random_potential(rng: &mut Rng, d: usize) -> DMatrix<C64> {
    let raw = LabeledOperator::new(LabelSet::range(1, 2), d, rng.hermitian(d * d)).expect("square");
    let m = raw.symmetrize().into_matrix();
    let n = op_norm(&m);
    m * C64::new(1.0 / n, 0.0)
}

fn op_norm(m: &DMatrix<C64>) -> f64 {
    m.singular_values().iter().cloned().fold(0.0, f64::max)
}

/// `H_n = Σ_j K(j) + ε Σ_{j<k} Φ(j,k)` on `labels`.
pub fn build_hamiltonian(model: &ModelSpec, labels: &LabelSet) -> Result<LabeledOperator> {
    if labels.is_empty() {
        return domain("Hamiltonian needs at least one particle");
    }
    model.check_cap(labels.len())?;
    let mut h = LabeledOperator::zeros(labels.clone(), model.dim);
    let ls = labels.as_slice();
    for &j in ls {
        h.add_assign(&model.kinetic_op(j).embed(labels)?)?;
    }
    if model.epsilon != 0.0 {
        for (a, &j) in ls.iter().enumerate() {
            for &k in &ls[a + 1..] {
                h.axpy(C64::new(model.epsilon, 0.0), &model.potential_op(j, k).embed(labels)?)?;
            }
        }
    }
    Ok(h)
}

struct Spectrum {
    values: Vec<f64>,
    vectors: DMatrix<C64>,
}

/// Evaluates the groups `G*_n(t)`, their generators and the free motion for a
/// fixed model. Propagators are memoized by `(t, n)` behind a read-shared
/// lock, so one instance may be used from several threads.
pub struct Dynamics {
    model: ModelSpec,
    spectra: RwLock<HashMap<usize, Arc<Spectrum>>>,
    unitaries: RwLock<HashMap<(u64, usize), Arc<DMatrix<C64>>>>,
}

impl Dynamics {
    pub fn new(model: ModelSpec) -> Self {
        Self { model, spectra: RwLock::new(HashMap::new()), unitaries: RwLock::new(HashMap::new()) }
    }

    pub fn model(&self) -> &ModelSpec {
        &self.model
    }

    pub fn dim(&self) -> usize {
        self.model.dim
    }

    fn spectrum(&self, n: usize) -> Result<Arc<Spectrum>> {
        if let Some(s) = self.spectra.read().unwrap().get(&n) {
            return Ok(s.clone());
        }
        let h = build_hamiltonian(&self.model, &LabelSet::range(1, n))?;
        let eig = h.into_matrix().symmetric_eigen();
        let s = Arc::new(Spectrum { values: eig.eigenvalues.iter().cloned().collect(), vectors: eig.eigenvectors });
        self.spectra.write().unwrap().insert(n, s.clone());
        Ok(s)
    }

    fn unitary_matrix(&self, t: f64, n: usize) -> Result<Arc<DMatrix<C64>>> {
        let key = (t.to_bits(), n);
        if let Some(u) = self.unitaries.read().unwrap().get(&key) {
            return Ok(u.clone());
        }
        let s = self.spectrum(n)?;
        let phases: Vec<C64> = s.values.iter().map(|&l| (-I * t * l).exp()).collect();
        let mut vd = s.vectors.clone();
        for (j, mut col) in vd.column_iter_mut().enumerate() {
            col *= phases[j];
        }
        let u = Arc::new(vd * s.vectors.adjoint());
        let mut cache = self.unitaries.write().unwrap();
        if cache.len() > 4096 {
            cache.clear();
        }
        cache.insert(key, u.clone());
        Ok(u)
    }

    /// `e^{−itH}` on `labels`.
    pub fn unitary(&self, t: f64, labels: &LabelSet) -> Result<LabeledOperator> {
        if labels.is_empty() {
            return Ok(LabeledOperator::scalar(C64::new(1.0, 0.0), self.dim()));
        }
        let u = self.unitary_matrix(t, labels.len())?;
        LabeledOperator::new(labels.clone(), self.dim(), (*u).clone())
    }

    /// Product of independent propagators, one per block, laid out along
    /// `target` (the union of the blocks).
    pub fn decoupled_unitary(&self, t: f64, blocks: &[LabelSet], target: &LabelSet) -> Result<LabeledOperator> {
        let us = blocks.iter().map(|b| self.unitary(t, b)).collect::<Result<Vec<_>>>()?;
        let refs: Vec<&LabeledOperator> = us.iter().collect();
        LabeledOperator::tensor_all(&refs, target, self.dim())
    }

    /// `G*_n(t) f = e^{−itH_n} f e^{itH_n}` with `n = |labels(f)|`.
    pub fn group_apply(&self, t: f64, op: &LabeledOperator) -> Result<LabeledOperator> {
        if t == 0.0 {
            return Ok(op.clone());
        }
        self.unitary(t, op.labels())?.conjugate(op)
    }

    /// `N*_n f = −i[H_n, f]`, or with `pair = (j₁, j₂)` the interaction part
    /// `−i[Φ(j₁,j₂), f]` (without the factor ε).
    pub fn generator_apply(&self, op: &LabeledOperator, pair: Option<(Label, Label)>) -> Result<LabeledOperator> {
        let labels = op.labels();
        let h = match pair {
            None => build_hamiltonian(&self.model, labels)?,
            Some((a, b)) => {
                if a == b || !labels.contains(a) || !labels.contains(b) {
                    return domain(format!("pair ({a},{b}) is not inside {labels}"));
                }
                self.model.potential_op(a, b).embed(labels)?
            }
        };
        Ok(h.commutator(op)?.scale(-I))
    }

    /// `−i[K(j), f]`.
    pub fn free_generator_apply(&self, j: Label, op: &LabeledOperator) -> Result<LabeledOperator> {
        let k = self.model.kinetic_op(j).embed(op.labels())?;
        Ok(k.commutator(op)?.scale(-I))
    }

    /// `e^{−itK}` on particle `j`.
    pub fn free_unitary(&self, t: f64, j: Label) -> LabeledOperator {
        let eig = self.model.kinetic.clone().symmetric_eigen();
        let mut vd = eig.eigenvectors.clone();
        for (c, mut col) in vd.column_iter_mut().enumerate() {
            col *= (-I * t * eig.eigenvalues[c]).exp();
        }
        LabeledOperator::new(LabelSet::singleton(j), self.dim(), vd * eig.eigenvectors.adjoint()).expect("d × d")
    }

    /// Free motion of particle `j` only.
    pub fn free_group_apply(&self, t: f64, j: Label, op: &LabeledOperator) -> Result<LabeledOperator> {
        if !op.labels().contains(j) {
            return domain(format!("label {j} not in {}", op.labels()));
        }
        self.free_unitary(t, j).embed(op.labels())?.conjugate(op)
    }

    pub fn free_group_inverse(&self, t: f64, j: Label, op: &LabeledOperator) -> Result<LabeledOperator> {
        self.free_group_apply(-t, j, op)
    }

    /// Free motion of every particle in `labels`.
    pub fn free_product_apply(&self, t: f64, labels: &LabelSet, op: &LabeledOperator) -> Result<LabeledOperator> {
        let mut u = LabeledOperator::scalar(C64::new(1.0, 0.0), self.dim());
        for j in labels.iter() {
            u = u.tensor(&self.free_unitary(t, j))?;
        }
        u.embed(op.labels())?.conjugate(op)
    }
}
