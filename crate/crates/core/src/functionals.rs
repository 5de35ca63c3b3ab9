//! Marginal correlation functionals of the one-particle correlation operator:
//! scattering cumulants, the generating operators `𝔊_{s+n}`, and the
//! truncated functional `G_s(t|G₁(t))`.
//!
//! Multiplication by an initial-correlation operator is the symmetrized
//! (Jordan) product `g∘X = ½(gX + Xg)`, which keeps Hermitian data
//! Hermitian and coincides with the plain product whenever the factors
//! commute.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::cumulants::cumulant_coupled;
use crate::dynamics::Dynamics;
use crate::error::{domain, invalid, Result};
use crate::hierarchy::TermRecord;
use crate::operator::{Label, LabelSet, LabeledOperator};
use crate::partitions::{enumerate_dissections, factorial, mobius, positive_sequences, set_partitions};
use crate::sequence::to_sets;

/// Initial correlations `g_nᵉ`, `n ≥ 2`, stored by particle count.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct InitialCorrelations {
    components: BTreeMap<usize, LabeledOperator>,
}

impl InitialCorrelations {
    /// No initial correlations (the chaos case).
    pub fn none() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, g: LabeledOperator) -> Result<()> {
        let n = g.labels().len();
        if n < 2 {
            return invalid("initial correlations start at two particles");
        }
        let g = g.relabel(LabelSet::range(1, n))?;
        self.components.insert(n, g);
        Ok(())
    }

    pub fn with(mut self, g: LabeledOperator) -> Result<Self> {
        self.insert(g)?;
        Ok(self)
    }

    pub fn get(&self, n: usize) -> Option<&LabeledOperator> {
        self.components.get(&n)
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn orders(&self) -> impl Iterator<Item = usize> + '_ {
        self.components.keys().copied()
    }

    /// Component placed on `labels` (components are symmetric).
    pub fn on(&self, labels: &LabelSet) -> Option<LabeledOperator> {
        self.components.get(&labels.len()).map(|g| g.relabel(labels.clone()).expect("same size"))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { components: self.components.iter().map(|(&n, g)| (n, g.scale_real(c))).collect() }
    }
}

/// Reading of the scattering cumulant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScatteringMode {
    /// The cumulant of nonlinear groups with the cluster `{Y}` frozen, taken
    /// as a linear map of the product data:
    /// `Σ_P μ(|P|) Σ_Q 𝔄^{θ(P)}_{|Q|}(t,{Q}) Π_{B∈Q} g_{|B|}(B)∘ · Π𝔄₁⁻¹`,
    /// `P` over partitions of `({Y}, s+1, …)`, `𝔄^D` the cumulant with
    /// interactions only inside the blocks of `D`, `g₁ = I` and missing
    /// components vanishing. At `t = 0` it is `g_s∘X` for `n = 0` and zero
    /// otherwise.
    Cumulant,
    /// `Ă_m = 𝔄_m(t) g_m∘ Π𝔄₁⁻¹` taken literally; a missing component acts
    /// as the identity (the chaos case), and `Ă_m(0) = 0` for `m ≥ 2`.
    Literal,
}

/// Jordan multiplication by `g` (embedded) on `x`.
fn jordan_embedded(g: &LabeledOperator, x: &LabeledOperator) -> Result<LabeledOperator> {
    g.embed(x.labels())?.jordan(x)
}

/// Inverse free motion of every particle in `labels`.
fn inverse_free(dy: &Dynamics, t: f64, labels: &LabelSet, x: &LabeledOperator) -> Result<LabeledOperator> {
    if t == 0.0 {
        return Ok(x.clone());
    }
    dy.free_product_apply(-t, labels, x)
}

/// `Ă(t, θ({Y}), X∖Y) x`; `x` may carry further labels, on which it acts as
/// the identity.
pub fn scattering_cumulant(
    dy: &Dynamics,
    t: f64,
    head: &LabelSet,
    extra: &LabelSet,
    corr: &InitialCorrelations,
    mode: ScatteringMode,
    x: &LabeledOperator,
) -> Result<LabeledOperator> {
    if head.is_empty() {
        return domain("scattering cumulant needs a nonempty cluster");
    }
    let z = head.concat(extra)?;
    if !z.is_subset_of(x.labels()) {
        return domain(format!("scattering cumulant on {z} applied to an operator on {}", x.labels()));
    }
    let y = inverse_free(dy, t, &z, x)?;
    let singles: Vec<LabelSet> = z.iter().map(LabelSet::singleton).collect();
    match mode {
        ScatteringMode::Literal => {
            let y = match (z.len() >= 2).then(|| corr.on(&z)).flatten() {
                Some(g) => jordan_embedded(&g, &y)?,
                None => y,
            };
            cumulant_coupled(dy, t, &singles, None, &y)
        }
        ScatteringMode::Cumulant => {
            let mut elements = vec![head.clone()];
            elements.extend(extra.iter().map(LabelSet::singleton));
            let couplings: Vec<(f64, Vec<LabelSet>)> = set_partitions(&elements)
                .into_iter()
                .map(|p| {
                    let d = p.iter().map(|blk| LabelSet::new(blk.iter().flat_map(|e| e.iter()).collect()).expect("disjoint")).collect();
                    (mobius(p.len()), d)
                })
                .collect();
            let mut acc = LabeledOperator::zeros(y.labels().clone(), y.dim());
            for blocks in set_partitions(z.as_slice()) {
                let blocks = to_sets(blocks);
                let mut w = y.clone();
                let mut vanishes = false;
                for b in blocks.iter().filter(|b| b.len() >= 2) {
                    match corr.on(b) {
                        Some(g) => w = jordan_embedded(&g, &w)?,
                        None => {
                            vanishes = true;
                            break;
                        }
                    }
                }
                if vanishes {
                    continue;
                }
                for (mu, d) in &couplings {
                    acc.axpy(C64::new(*mu, 0.0), &cumulant_coupled(dy, t, &blocks, Some(d), &w)?)?;
                }
            }
            Ok(acc)
        }
    }
}

/// One factor `Σ_D (1/|D|!) Σ_{i distinct} Π_l (1/|X_l|!) Ă_{1+|X_l|}(t,i_l,X_l)`
/// of the generating operator, with the block `zj` attached to particles
/// `1, …, avail`.
fn attachment_apply(
    dy: &Dynamics,
    t: f64,
    zj: &LabelSet,
    avail: usize,
    corr: &InitialCorrelations,
    mode: ScatteringMode,
    x: &LabeledOperator,
) -> Result<LabeledOperator> {
    let mut acc = LabeledOperator::zeros(x.labels().clone(), x.dim());
    for d in enumerate_dissections(zj, avail)? {
        let k = d.blocks.len();
        let block_weight: f64 = d.blocks.iter().map(|b| 1.0 / factorial(b.len())).product();
        let weight = block_weight / factorial(k);
        for targets in injections(k, avail) {
            let mut w = x.clone();
            for (blk, &i) in d.blocks.iter().zip(&targets) {
                w = scattering_cumulant(dy, t, &LabelSet::singleton(i as Label), blk, corr, mode, &w)?;
            }
            acc.axpy(C64::new(weight, 0.0), &w)?;
        }
    }
    Ok(acc)
}

/// Ordered tuples of `k` distinct particles from `1..=avail`.
fn injections(k: usize, avail: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::new();
        for v in &out {
            for i in 1..=avail {
                if !v.contains(&i) {
                    let mut w = v.clone();
                    w.push(i);
                    next.push(w);
                }
            }
        }
        out = next;
    }
    out
}

/// `𝔊_{s+n}(t, θ({Y}), X∖Y)` applied to `x` (an operator on at least
/// `1, …, s+n`): the alternating sum over `k` and `n₁, …, n_k ≥ 1` of the
/// base scattering cumulant composed with the attachment factors, the
/// factor for `j = k` acting first.
pub fn functional_generating_apply(
    dy: &Dynamics,
    t: f64,
    s: usize,
    n: usize,
    corr: &InitialCorrelations,
    mode: ScatteringMode,
    x: &LabeledOperator,
) -> Result<LabeledOperator> {
    if s == 0 {
        return domain("generating operator needs s ≥ 1");
    }
    dy.model().check_cap(s + n)?;
    let mut acc = LabeledOperator::zeros(x.labels().clone(), x.dim());
    for k in 0..=n {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        for ns in positive_sequences(n, k) {
            let used: usize = ns.iter().sum();
            let mut w = x.clone();
            // blocks Z_j and their available ranges, applied j = k first
            let mut top = s + n;
            let mut factors = Vec::with_capacity(k);
            for &nj in &ns {
                let zj = LabelSet::range((top - nj + 1) as Label, nj);
                top -= nj;
                factors.push((zj, top));
            }
            for (zj, avail) in factors.iter().rev() {
                w = attachment_apply(dy, t, zj, *avail, corr, mode, &w)?;
            }
            let extra = LabelSet::range(s as Label + 1, n - used);
            w = scattering_cumulant(dy, t, &LabelSet::range(1, s), &extra, corr, mode, &w)?;
            let coeff = sign * factorial(n) / factorial(n - used);
            acc.axpy(C64::new(coeff, 0.0), &w)?;
        }
    }
    Ok(acc)
}

/// Convergence-guard outcome attached to a functional evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GuardStatus {
    Within,
    Violated,
}

#[derive(Clone, Debug)]
pub struct FunctionalResult {
    pub value: LabeledOperator,
    pub terms: Vec<TermRecord>,
    pub guard: GuardStatus,
    /// `e^{−(3s+2)}`.
    pub guard_bound: f64,
}

pub fn functional_guard(s: usize) -> f64 {
    (-(3.0 * s as f64 + 2.0)).exp()
}

/// `G_s(t|G₁(t)) = Σ_{n≤n_max} (1/n!) Tr_{s+1,…,s+n} 𝔊_{s+n}(t) Π G₁(t,i)`.
pub fn correlation_functional(
    dy: &Dynamics,
    t: f64,
    s: usize,
    g1_t: &LabeledOperator,
    corr: &InitialCorrelations,
    n_max: usize,
    mode: ScatteringMode,
) -> Result<FunctionalResult> {
    if g1_t.labels().len() != 1 {
        return invalid("G₁ must act on one particle");
    }
    let bound = functional_guard(s);
    let guard = if g1_t.trace_norm() < bound { GuardStatus::Within } else { GuardStatus::Violated };
    let mut value = LabeledOperator::zeros(LabelSet::range(1, s), dy.dim());
    let mut terms = Vec::new();
    for n in 0..=n_max {
        let z = LabelSet::range(1, s + n);
        let ops: Vec<LabeledOperator> =
            z.iter().map(|i| g1_t.relabel(LabelSet::singleton(i))).collect::<Result<_>>()?;
        let refs: Vec<&LabeledOperator> = ops.iter().collect();
        let prod = LabeledOperator::tensor_all(&refs, &z, dy.dim())?;
        let g = functional_generating_apply(dy, t, s, n, corr, mode, &prod)?;
        let term = g.partial_trace(&LabelSet::range(s as Label + 1, n))?.scale_real(1.0 / factorial(n));
        value.add_assign(&term)?;
        terms.push(TermRecord { n, trace_norm: term.trace_norm(), cumulative_trace_norm: value.trace_norm() });
    }
    Ok(FunctionalResult { value, terms, guard, guard_bound: bound })
}

/// `G_n⁰ = g_n∘Π G₁⁰(i)` (with `g₁ = I`), the initial marginal correlations
/// carried by one-particle data with initial correlations.
pub fn correlated_initial_marginals(
    g1: &LabeledOperator,
    corr: &InitialCorrelations,
    max_order: usize,
) -> Result<crate::sequence::CorrelationSequence> {
    let mut seq = crate::sequence::CorrelationSequence::new(g1.dim());
    seq.insert(&g1.relabel(LabelSet::singleton(1))?)?;
    for n in 2..=max_order {
        let z = LabelSet::range(1, n);
        match corr.on(&z) {
            Some(g) => {
                let ops: Vec<LabeledOperator> =
                    z.iter().map(|i| g1.relabel(LabelSet::singleton(i))).collect::<Result<_>>()?;
                let refs: Vec<&LabeledOperator> = ops.iter().collect();
                let prod = LabeledOperator::tensor_all(&refs, &z, g1.dim())?;
                seq.insert(&g.jordan(&prod)?)?;
            }
            None => seq.insert_zero(n),
        }
    }
    Ok(seq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cumulants::{cumulant_plain, nonlinear_cumulant};
    use crate::dynamics::ModelSpec;
    use crate::random::Rng;

    fn setup(seed: u64, eps: f64) -> (Dynamics, Rng) {
        (Dynamics::new(ModelSpec::default_test(seed, eps)), Rng::seeded(seed + 100))
    }

    fn correlations(rng: &mut Rng, max: usize, norm: f64) -> InitialCorrelations {
        let mut c = InitialCorrelations::none();
        for n in 2..=max {
            c.insert(rng.symmetric_hermitian(LabelSet::range(1, n), 2, norm)).unwrap();
        }
        c
    }

    fn herm(rng: &mut Rng, labels: LabelSet) -> LabeledOperator {
        let n = 1 << labels.len();
        LabeledOperator::new(labels, 2, rng.hermitian(n)).unwrap()
    }

    fn product(g1: &LabeledOperator, n: usize) -> LabeledOperator {
        let ops: Vec<LabeledOperator> = (1..=n as Label).map(|i| g1.relabel(LabelSet::singleton(i)).unwrap()).collect();
        let refs: Vec<&LabeledOperator> = ops.iter().collect();
        LabeledOperator::tensor_all(&refs, &LabelSet::range(1, n), 2).unwrap()
    }

    fn hat(dy: &Dynamics, t: f64, x: &LabeledOperator) -> LabeledOperator {
        let y = dy.free_product_apply(-t, x.labels(), x).unwrap();
        cumulant_plain(dy, t, &y).unwrap()
    }

    #[test]
    fn chaos_two_particle_operator() {
        let (dy, mut rng) = setup(1, 0.3);
        let x = herm(&mut rng, LabelSet::range(1, 2));
        let t = 0.7;
        let got = functional_generating_apply(&dy, t, 2, 0, &InitialCorrelations::none(), ScatteringMode::Cumulant, &x).unwrap();
        let y = dy.free_product_apply(-t, x.labels(), &x).unwrap();
        let want = dy.group_apply(t, &y).unwrap().sub(&x).unwrap();
        assert!(got.distance(&want).unwrap() < 1e-12);
        let lit = functional_generating_apply(&dy, t, 2, 0, &InitialCorrelations::none(), ScatteringMode::Literal, &x).unwrap();
        assert!(lit.distance(&want).unwrap() < 1e-12);
    }

    #[test]
    fn chaos_first_order_operator() {
        let (dy, mut rng) = setup(2, 0.4);
        let t = 0.5;
        for s in 1..=2usize {
            let z = LabelSet::range(1, s + 1);
            let x = herm(&mut rng, z.clone());
            let got = functional_generating_apply(&dy, t, s, 1, &InitialCorrelations::none(), ScatteringMode::Cumulant, &x).unwrap();
            let mut attach = LabeledOperator::zeros(z.clone(), 2);
            for i in 1..=s as Label {
                let pair = LabelSet::new(vec![i, s as Label + 1]).unwrap();
                let y = dy.free_product_apply(-t, &pair, &x).unwrap();
                let a2 = crate::cumulants::cumulant_clustered(&dy, t, &crate::partitions::ClusteredSet::singletons(&pair), &y).unwrap();
                attach.add_assign(&a2).unwrap();
            }
            let ys = dy.free_product_apply(-t, &LabelSet::range(1, s), &attach).unwrap();
            let first = crate::cumulants::cumulant_clustered(&dy, t, &crate::partitions::ClusteredSet::singletons(&LabelSet::range(1, s)), &ys).unwrap();
            let want = hat(&dy, t, &x).sub(&first).unwrap();
            assert!(got.distance(&want).unwrap() < 1e-12, "s={s}");
        }
    }

    #[test]
    fn first_order_structure_with_correlations() {
        let (dy, mut rng) = setup(3, 0.3);
        let corr = correlations(&mut rng, 4, 0.8);
        let t = 0.4;
        for s in 1..=2usize {
            let z = LabelSet::range(1, s + 1);
            let x = herm(&mut rng, z.clone());
            let mode = ScatteringMode::Cumulant;
            let got = functional_generating_apply(&dy, t, s, 1, &corr, mode, &x).unwrap();
            let head = LabelSet::range(1, s);
            let last = LabelSet::singleton(s as Label + 1);
            let full = scattering_cumulant(&dy, t, &head, &last, &corr, mode, &x).unwrap();
            let mut attach = LabeledOperator::zeros(z.clone(), 2);
            for i in 1..=s as Label {
                attach.add_assign(&scattering_cumulant(&dy, t, &LabelSet::singleton(i), &last, &corr, mode, &x).unwrap()).unwrap();
            }
            let first = scattering_cumulant(&dy, t, &head, &LabelSet::empty(), &corr, mode, &attach).unwrap();
            assert!(got.distance(&full.sub(&first).unwrap()).unwrap() < 1e-12, "s={s}");
        }
    }

    #[test]
    fn scattering_cumulant_generates_the_series_terms() {
        let (dy, mut rng) = setup(4, 0.5);
        let corr = correlations(&mut rng, 4, 0.9);
        let g1 = rng.symmetric_hermitian(LabelSet::range(1, 1), 2, 0.6);
        let g0 = correlated_initial_marginals(&g1, &corr, 4).unwrap();
        let t = 0.6;
        for (s, n) in [(1usize, 0usize), (2, 0), (1, 1), (2, 1), (1, 2)] {
            let z = LabelSet::range(1, s + n);
            let evolved = dy.free_product_apply(t, &z, &product(&g1, s + n)).unwrap();
            let head = LabelSet::range(1, s);
            let extra = LabelSet::range(s as Label + 1, n);
            let got = scattering_cumulant(&dy, t, &head, &extra, &corr, ScatteringMode::Cumulant, &evolved).unwrap();
            let want = nonlinear_cumulant(&dy, t, &head, &extra, &g0).unwrap();
            assert!(got.distance(&want).unwrap() < 1e-11, "s={s} n={n}");
        }
    }

    #[test]
    fn initial_time_returns_initial_correlations() {
        let (dy, mut rng) = setup(5, 0.2);
        let corr = correlations(&mut rng, 4, 1.0);
        let g1 = rng.symmetric_hermitian(LabelSet::range(1, 1), 2, 0.1);
        let want = corr.get(2).unwrap().jordan(&product(&g1, 2)).unwrap();
        let f = correlation_functional(&dy, 0.0, 2, &g1, &corr, 2, ScatteringMode::Cumulant).unwrap();
        assert!(f.value.distance(&want).unwrap() < 1e-14);
        assert!(f.terms[1].trace_norm < 1e-14 && f.terms[2].trace_norm < 1e-14);
        let lit = correlation_functional(&dy, 0.0, 2, &g1, &corr, 2, ScatteringMode::Literal).unwrap();
        assert!(lit.value.max_abs() < 1e-14);
    }

    #[test]
    fn free_motion_conjugates_correlations() {
        let (dy, mut rng) = setup(6, 0.0);
        let corr = correlations(&mut rng, 3, 1.0);
        let x = herm(&mut rng, LabelSet::range(1, 2));
        let t = 0.9;
        let got = functional_generating_apply(&dy, t, 2, 0, &corr, ScatteringMode::Cumulant, &x).unwrap();
        let back = dy.free_product_apply(-t, x.labels(), &x).unwrap();
        let want = dy.free_product_apply(t, x.labels(), &corr.get(2).unwrap().jordan(&back).unwrap()).unwrap();
        assert!(got.distance(&want).unwrap() < 1e-12);
        let x3 = herm(&mut rng, LabelSet::range(1, 3));
        let higher = functional_generating_apply(&dy, t, 2, 1, &corr, ScatteringMode::Cumulant, &x3).unwrap();
        assert!(higher.max_abs() < 1e-12);
    }

    #[test]
    fn functional_is_hermitian_and_symmetric() {
        let (dy, mut rng) = setup(7, 0.3);
        let corr = correlations(&mut rng, 4, 0.5);
        let g1 = rng.symmetric_hermitian(LabelSet::range(1, 1), 2, 0.05);
        let f = correlation_functional(&dy, 0.8, 2, &g1, &corr, 2, ScatteringMode::Cumulant).unwrap();
        assert!(f.value.is_hermitian(1e-12));
        assert!(f.value.is_symmetric(1e-12));
        assert_eq!(f.guard, GuardStatus::Violated);
        let small = g1.scale_real(1e-4);
        let f = correlation_functional(&dy, 0.8, 1, &small, &corr, 1, ScatteringMode::Cumulant).unwrap();
        assert_eq!(f.guard, GuardStatus::Within);
    }

    #[test]
    fn injections_count() {
        assert_eq!(injections(2, 3).len(), 6);
        assert_eq!(injections(0, 3), vec![Vec::<usize>::new()]);
        assert!(injections(3, 2).is_empty());
    }
}
