//! Sequences of symmetric operators `f = (f₀, f₁, …)` and the cluster
//! (partition-product) transforms between density and correlation sequences.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{domain, invalid, Result};
use crate::operator::{LabelSet, LabeledOperator};
use crate::partitions::{mobius, set_partitions};

/// Finite sequence `s ↦ f_s`. Components are permutation symmetric, so one
/// matrix per particle count serves every label set of that size.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationSequence {
    dim: usize,
    scalar: C64,
    components: BTreeMap<usize, DMatrix<C64>>,
}

impl CorrelationSequence {
    pub fn new(dim: usize) -> Self {
        Self { dim, scalar: C64::new(0.0, 0.0), components: BTreeMap::new() }
    }

    /// `(0, g₁, 0, …, 0)` with zero components up to `max_order`.
    pub fn chaos(g1: &LabeledOperator, max_order: usize) -> Result<Self> {
        let mut seq = Self::new(g1.dim());
        seq.insert(g1)?;
        for s in 2..=max_order {
            seq.insert_zero(s);
        }
        Ok(seq)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn scalar(&self) -> C64 {
        self.scalar
    }

    pub fn with_scalar(mut self, c: C64) -> Self {
        self.scalar = c;
        self
    }

    /// Stores `op` as the `|labels(op)|`-particle component.
    pub fn insert(&mut self, op: &LabeledOperator) -> Result<()> {
        if op.dim() != self.dim {
            return invalid("component dimension differs from the sequence");
        }
        if op.labels().is_empty() {
            self.scalar = op.trace();
            return Ok(());
        }
        self.components.insert(op.labels().len(), op.matrix().clone());
        Ok(())
    }

    pub fn insert_zero(&mut self, s: usize) {
        let n = self.dim.pow(s as u32);
        self.components.insert(s, DMatrix::zeros(n, n));
    }

    pub fn with(mut self, op: &LabeledOperator) -> Result<Self> {
        self.insert(op)?;
        Ok(self)
    }

    pub fn max_order(&self) -> usize {
        self.components.keys().next_back().copied().unwrap_or(0)
    }

    pub fn has(&self, s: usize) -> bool {
        self.components.contains_key(&s)
    }

    pub fn is_zero(&self, s: usize) -> bool {
        self.components.get(&s).map(|m| m.iter().all(|z| *z == C64::new(0.0, 0.0))).unwrap_or(false)
    }

    /// Component of size `|labels|`, placed on `labels`.
    pub fn on(&self, labels: &LabelSet) -> Result<LabeledOperator> {
        if labels.is_empty() {
            return Ok(LabeledOperator::scalar(self.scalar, self.dim));
        }
        match self.components.get(&labels.len()) {
            Some(m) => LabeledOperator::new(labels.clone(), self.dim, m.clone()),
            None => domain(format!("sequence has no {}-particle component", labels.len())),
        }
    }

    pub fn component(&self, s: usize) -> Result<LabeledOperator> {
        self.on(&LabelSet::range(1, s))
    }

    pub fn orders(&self) -> impl Iterator<Item = usize> + '_ {
        self.components.keys().copied()
    }

    /// Largest trace norm over the stored components.
    pub fn max_trace_norm(&self) -> f64 {
        self.orders().map(|s| self.component(s).unwrap().trace_norm()).fold(0.0, f64::max)
    }

    pub fn map(&self, mut f: impl FnMut(usize, &LabeledOperator) -> Result<LabeledOperator>) -> Result<Self> {
        let mut out = Self::new(self.dim).with_scalar(self.scalar);
        for s in self.orders() {
            out.insert(&f(s, &self.component(s)?)?)?;
        }
        Ok(out)
    }

    /// Keeps components up to order `max`.
    pub fn truncated(&self, max: usize) -> Self {
        let mut out = self.clone();
        out.components.retain(|&s, _| s <= max);
        out
    }

    /// Tensor product of the components on the blocks, laid out along `target`.
    pub fn product_on(&self, blocks: &[LabelSet], target: &LabelSet) -> Result<LabeledOperator> {
        let ops = blocks.iter().map(|b| self.on(b)).collect::<Result<Vec<_>>>()?;
        let refs: Vec<&LabeledOperator> = ops.iter().collect();
        LabeledOperator::tensor_all(&refs, target, self.dim)
    }

    /// True when some block has a stored zero component.
    pub(crate) fn vanishes_on(&self, blocks: &[LabelSet]) -> bool {
        blocks.iter().any(|b| self.is_zero(b.len()))
    }
}

/// `F_s = Σ_P Π G_{|X|}(X)` for `s ≤ max_order`.
pub fn densities_from_correlations(g: &CorrelationSequence, max_order: usize) -> Result<CorrelationSequence> {
    let mut out = CorrelationSequence::new(g.dim()).with_scalar(C64::new(1.0, 0.0));
    for s in 1..=max_order {
        let target = LabelSet::range(1, s);
        let mut acc = LabeledOperator::zeros(target.clone(), g.dim());
        for blocks in set_partitions(target.as_slice()) {
            let blocks = to_sets(blocks);
            if g.vanishes_on(&blocks) {
                continue;
            }
            acc.add_assign(&g.product_on(&blocks, &target)?)?;
        }
        out.insert(&acc)?;
    }
    Ok(out)
}

/// Inverse of [`densities_from_correlations`]: Möbius-weighted partition sum.
pub fn correlations_from_densities(f: &CorrelationSequence, max_order: usize) -> Result<CorrelationSequence> {
    let mut out = CorrelationSequence::new(f.dim());
    for s in 1..=max_order {
        let target = LabelSet::range(1, s);
        out.insert(&mobius_combine(&target, f.dim(), |b| f.on(b))?)?;
    }
    Ok(out)
}

/// `Σ_P μ(|P|) ⊗_{B∈P} e(B)` laid out along `target`.
pub(crate) fn mobius_combine(
    target: &LabelSet,
    dim: usize,
    mut e: impl FnMut(&LabelSet) -> Result<LabeledOperator>,
) -> Result<LabeledOperator> {
    let mut acc = LabeledOperator::zeros(target.clone(), dim);
    for blocks in set_partitions(target.as_slice()) {
        let blocks = to_sets(blocks);
        let ops = blocks.iter().map(&mut e).collect::<Result<Vec<_>>>()?;
        let refs: Vec<&LabeledOperator> = ops.iter().collect();
        let term = LabeledOperator::tensor_all(&refs, target, dim)?;
        acc.axpy(C64::new(mobius(blocks.len()), 0.0), &term)?;
    }
    Ok(acc)
}

pub(crate) fn to_sets(blocks: Vec<Vec<u32>>) -> Vec<LabelSet> {
    blocks.into_iter().map(|b| LabelSet::new(b).expect("partition blocks are distinct")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::Rng;

    fn random_seq(seed: u64, max: usize, norm: f64) -> CorrelationSequence {
        let mut rng = Rng::seeded(seed);
        let mut seq = CorrelationSequence::new(2);
        for s in 1..=max {
            seq.insert(&rng.symmetric_hermitian(LabelSet::range(1, s), 2, norm)).unwrap();
        }
        seq
    }

    #[test]
    fn placement_and_missing_components() {
        let seq = random_seq(1, 2, 1.0);
        let a = seq.on(&LabelSet::new(vec![5, 3]).unwrap()).unwrap();
        assert_eq!(a.matrix(), seq.component(2).unwrap().matrix());
        assert!(seq.on(&LabelSet::range(1, 3)).is_err());
        assert_eq!(seq.max_order(), 2);
    }

    #[test]
    fn product_sequence_from_one_particle_data() {
        let mut rng = Rng::seeded(2);
        let g1 = rng.symmetric_hermitian(LabelSet::range(1, 1), 2, 1.0);
        let g = CorrelationSequence::chaos(&g1, 3).unwrap();
        let f = densities_from_correlations(&g, 3).unwrap();
        let g1b = g1.relabel(LabelSet::singleton(2)).unwrap();
        let g1c = g1.relabel(LabelSet::singleton(3)).unwrap();
        let prod = g1.tensor(&g1b).unwrap().tensor(&g1c).unwrap();
        assert!(f.component(3).unwrap().distance(&prod).unwrap() < 1e-14);
    }

    #[test]
    fn transforms_are_inverse() {
        let g = random_seq(3, 4, 0.7);
        let f = densities_from_correlations(&g, 4).unwrap();
        let back = correlations_from_densities(&f, 4).unwrap();
        for s in 1..=4 {
            assert!(back.component(s).unwrap().distance(&g.component(s).unwrap()).unwrap() < 1e-12);
        }
        assert!(f.component(2).unwrap().is_symmetric(1e-12));
    }

    #[test]
    fn two_particle_density_by_hand() {
        let g = random_seq(4, 2, 1.0);
        let f = densities_from_correlations(&g, 2).unwrap();
        let g1 = g.component(1).unwrap();
        let hand = g.component(2).unwrap().add(&g1.tensor(&g1.relabel(LabelSet::singleton(2)).unwrap()).unwrap()).unwrap();
        assert!(f.component(2).unwrap().distance(&hand).unwrap() < 1e-14);
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(24))]
        #[test]
        fn round_trip_any_data(seed in 0u64..1000, max in 1usize..4, norm in 0.01f64..3.0) {
            let g = random_seq(seed, max, norm);
            let back = correlations_from_densities(&densities_from_correlations(&g, max).unwrap(), max).unwrap();
            for s in 1..=max {
                proptest::prop_assert!(back.component(s).unwrap().distance(&g.component(s).unwrap()).unwrap() < 1e-12 * norm.max(1.0).powi(3));
            }
        }
    }
}
