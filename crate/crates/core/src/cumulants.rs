//! Cumulants of groups, the nonlinear group of the von Neumann hierarchy for
//! correlation operators, and cumulants of nonlinear groups.
//!
//! Two evaluation routes are provided for the nonlinear group. The literal
//! route sums `𝔄_{|Q|}(t,{X₁},…) Π f(X_j)` over partitions `Q`. The density
//! route evolves the partition-product (density) sequence with one
//! conjugation per subset and Möbius-inverts; it is exact and much cheaper,
//! and it extends to decoupled dynamics, where the particles evolve in
//! mutually noninteracting groups. Compositions of nonlinear groups acting
//! on disjoint particle groups are exactly such decoupled evolutions.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;

use crate::dynamics::Dynamics;
use crate::error::{domain, Result};
use crate::operator::{Label, LabelSet, LabeledOperator};
use crate::partitions::{binomial, declusterize, factorial, mobius, set_partitions, weak_compositions, ClusteredSet};
use crate::sequence::{densities_from_correlations, to_sets, CorrelationSequence};

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

/// Conjugation by `⊗_B e^{−itH_B}` (identity on the labels of `op` outside the
/// blocks). Empty blocks are ignored.
pub fn conj_blocks(dy: &Dynamics, t: f64, blocks: &[LabelSet], op: &LabeledOperator) -> Result<LabeledOperator> {
    if t == 0.0 {
        return Ok(op.clone());
    }
    let blocks: Vec<&LabelSet> = blocks.iter().filter(|b| !b.is_empty()).collect();
    if blocks.len() == 1 && blocks[0].same_elements(op.labels()) {
        return dy.group_apply(t, op);
    }
    let mut u = LabeledOperator::scalar(one(), dy.dim());
    for b in blocks {
        u = u.tensor(&dy.unitary(t, b)?)?;
    }
    u.embed(op.labels())?.conjugate(op)
}

/// `𝔄_{|P|}(t,{X₁},…,{X_k}) op` where each `X_j` is a frozen cluster. With
/// `active` given, every group only evolves the particles in `active`.
fn cumulant_restricted(
    dy: &Dynamics,
    t: f64,
    clusters: &[LabelSet],
    active: Option<&LabelSet>,
    op: &LabeledOperator,
) -> Result<LabeledOperator> {
    match active {
        Some(a) => cumulant_coupled(dy, t, clusters, Some(std::slice::from_ref(a)), op),
        None => cumulant_coupled(dy, t, clusters, None, op),
    }
}

/// Cumulant of groups over frozen clusters where, with `coupling` given,
/// particles interact only within a block of `coupling` and particles
/// outside every block do not move.
pub(crate) fn cumulant_coupled(
    dy: &Dynamics,
    t: f64,
    clusters: &[LabelSet],
    coupling: Option<&[LabelSet]>,
    op: &LabeledOperator,
) -> Result<LabeledOperator> {
    let idx: Vec<usize> = (0..clusters.len()).collect();
    let mut acc = LabeledOperator::zeros(op.labels().clone(), op.dim());
    for p in set_partitions(&idx) {
        let mut blocks: Vec<LabelSet> = Vec::new();
        for z in &p {
            let theta = LabelSet::new(z.iter().flat_map(|&i| clusters[i].iter()).collect()).expect("disjoint");
            match coupling {
                Some(d) => blocks.extend(d.iter().map(|dk| theta.intersection(dk))),
                None => blocks.push(theta),
            }
        }
        acc.axpy(C64::new(mobius(p.len()), 0.0), &conj_blocks(dy, t, &blocks, op)?)?;
    }
    Ok(acc)
}

/// Cumulant of groups over clustered elements. `labels(op)` must contain the
/// declusterized set; extra labels of `op` are left untouched.
pub fn cumulant_clustered(dy: &Dynamics, t: f64, clusters: &ClusteredSet, op: &LabeledOperator) -> Result<LabeledOperator> {
    let theta = declusterize(clusters)?;
    if !theta.is_subset_of(op.labels()) {
        return domain(format!("cumulant over {theta} applied to an operator on {}", op.labels()));
    }
    dy.model().check_cap(op.labels().len())?;
    cumulant_restricted(dy, t, &clusters.blocks(), None, op)
}

/// `𝔄_s(t, 1, …, s)`: all elements single particles.
pub fn cumulant_plain(dy: &Dynamics, t: f64, op: &LabeledOperator) -> Result<LabeledOperator> {
    cumulant_clustered(dy, t, &ClusteredSet::singletons(op.labels()), op)
}

pub(crate) fn cumulant_blocks(dy: &Dynamics, t: f64, blocks: &[LabelSet], op: &LabeledOperator) -> Result<LabeledOperator> {
    cumulant_restricted(dy, t, blocks, None, op)
}

/// `𝒢(t;Y|f) = Σ_P 𝔄_{|P|}(t,{X₁},…) Π f_{|X_j|}(X_j)`, summed literally.
pub fn nonlinear_group_apply(dy: &Dynamics, t: f64, y: &LabelSet, f: &CorrelationSequence) -> Result<LabeledOperator> {
    if y.is_empty() {
        return domain("nonlinear group needs a nonempty label set");
    }
    dy.model().check_cap(y.len())?;
    let mut acc = LabeledOperator::zeros(y.clone(), dy.dim());
    for blocks in set_partitions(y.as_slice()) {
        let blocks = to_sets(blocks);
        for b in &blocks {
            if !f.has(b.len()) {
                return domain(format!("sequence has no {}-particle component", b.len()));
            }
        }
        if f.vanishes_on(&blocks) {
            continue;
        }
        let prod = f.product_on(&blocks, y)?;
        acc.add_assign(&cumulant_blocks(dy, t, &blocks, &prod)?)?;
    }
    Ok(acc)
}

/// Nonlinear group with decoupled dynamics: particles in different blocks
/// of `coupling` do not interact. With `coupling = [Z]` this is `𝒢(t;Z|f)`.
pub fn decoupled_group(
    dy: &Dynamics,
    t: f64,
    coupling: &[LabelSet],
    z: &LabelSet,
    f: &CorrelationSequence,
) -> Result<LabeledOperator> {
    let n = z.len();
    if n == 0 {
        return domain("nonlinear group needs a nonempty label set");
    }
    dy.model().check_cap(n)?;
    for s in 1..=n {
        if !f.has(s) {
            return domain(format!("sequence has no {s}-particle component"));
        }
    }
    let dens = densities_from_correlations(f, n)?;
    let full = (1usize << n) - 1;
    let labels_of = |mask: usize| -> LabelSet {
        LabelSet::new((0..n).filter(|i| mask >> i & 1 == 1).map(|i| z.as_slice()[i]).collect()).expect("subset")
    };
    // evolved densities on every subset
    let mut evolved: Vec<Option<LabeledOperator>> = vec![None; full + 1];
    for mask in 1..=full {
        let b = labels_of(mask);
        let blocks: Vec<LabelSet> = coupling.iter().map(|d| d.intersection(&b)).collect();
        evolved[mask] = Some(conj_blocks(dy, t, &blocks, &dens.on(&b)?)?);
    }
    // Möbius inversion by the recursion F(B) = Σ_{C∋min B} g(C) ⊗ F(B∖C)
    let mut masks: Vec<usize> = (1..=full).collect();
    masks.sort_by_key(|m| m.count_ones());
    let mut g: Vec<Option<LabeledOperator>> = vec![None; full + 1];
    for mask in masks {
        let b = labels_of(mask);
        let low = mask & mask.wrapping_neg();
        let mut acc = evolved[mask].clone().unwrap();
        let rest_bits = mask ^ low;
        // proper subsets C of `mask` containing the lowest bit
        let mut sub = rest_bits;
        loop {
            let c = sub | low;
            if c != mask {
                let term = g[c].as_ref().unwrap().tensor(evolved[mask ^ c].as_ref().unwrap())?;
                acc.axpy(-one(), &term.aligned_to(&b)?)?;
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest_bits;
        }
        g[mask] = Some(acc);
    }
    Ok(g[full].take().unwrap())
}

/// `𝒢(t;Y|f)` by the density route.
pub fn nonlinear_group_density(dy: &Dynamics, t: f64, y: &LabelSet, f: &CorrelationSequence) -> Result<LabeledOperator> {
    decoupled_group(dy, t, std::slice::from_ref(y), y, f)
}

/// The full sequence `(𝒢(t;1,…,s|f))_{s≤max_order}`.
pub fn evolve_sequence(dy: &Dynamics, t: f64, f: &CorrelationSequence, max_order: usize) -> Result<CorrelationSequence> {
    let mut out = CorrelationSequence::new(f.dim()).with_scalar(f.scalar());
    for s in 1..=max_order {
        out.insert(&nonlinear_group_density(dy, t, &LabelSet::range(1, s), f)?)?;
    }
    Ok(out)
}

/// Operators indexed by every nonempty subset of a ground set, the state
/// of a sequence after nonlinear groups have acted on some of its particles.
#[derive(Clone, Debug)]
pub struct LabeledSequence {
    ground: LabelSet,
    values: BTreeMap<Vec<Label>, LabeledOperator>,
}

impl LabeledSequence {
    pub fn from_sequence(f: &CorrelationSequence, ground: &LabelSet) -> Result<Self> {
        let mut values = BTreeMap::new();
        for x in subsets(ground) {
            values.insert(x.as_slice().to_vec(), f.on(&x)?);
        }
        Ok(Self { ground: ground.clone(), values })
    }

    pub fn get(&self, x: &LabelSet) -> Result<LabeledOperator> {
        let key: Vec<Label> = self.ground.iter().filter(|&a| x.contains(a)).collect();
        match self.values.get(&key) {
            Some(op) if key.len() == x.len() => op.aligned_to(x),
            _ => domain(format!("labeled sequence has no value on {x}")),
        }
    }

    /// `𝒢(t;A|·)` acting on this sequence: on every subset `X` of the ground
    /// set, partitions `Q` of `X` are weighted with the cumulant of groups
    /// that only evolve particles in `active`.
    pub fn compose(&self, dy: &Dynamics, t: f64, active: &LabelSet) -> Result<Self> {
        let mut values = BTreeMap::new();
        for x in subsets(&self.ground) {
            let mut acc = LabeledOperator::zeros(x.clone(), dy.dim());
            for blocks in set_partitions(x.as_slice()) {
                let blocks = to_sets(blocks);
                let ops = blocks.iter().map(|b| self.get(b)).collect::<Result<Vec<_>>>()?;
                if ops.iter().any(|o| o.max_abs() == 0.0) {
                    continue;
                }
                let refs: Vec<&LabeledOperator> = ops.iter().collect();
                let prod = LabeledOperator::tensor_all(&refs, &x, dy.dim())?;
                acc.add_assign(&cumulant_restricted(dy, t, &blocks, Some(active), &prod)?)?;
            }
            values.insert(x.as_slice().to_vec(), acc);
        }
        Ok(Self { ground: self.ground.clone(), values })
    }
}

/// Nonempty subsets of `ground`, each in ground order.
pub(crate) fn subsets(ground: &LabelSet) -> Vec<LabelSet> {
    let n = ground.len();
    (1usize..1 << n)
        .map(|m| LabelSet::new((0..n).filter(|i| m >> i & 1 == 1).map(|i| ground.as_slice()[i]).collect()).unwrap())
        .collect()
}

/// `𝒢(t;θ(X₁)|…𝒢(t;θ(X_k)|f)…)` evaluated on `z`, innermost block last.
pub fn compose_groups(dy: &Dynamics, t: f64, blocks: &[LabelSet], z: &LabelSet, f: &CorrelationSequence) -> Result<LabeledOperator> {
    let mut h = LabeledSequence::from_sequence(f, z)?;
    for b in blocks.iter().rev() {
        h = h.compose(dy, t, b)?;
    }
    h.get(z)
}

fn head_elements(head: &LabelSet, extra: &LabelSet) -> Result<(Vec<LabelSet>, LabelSet)> {
    if !head.is_disjoint(extra) {
        return domain(format!("extra particles {extra} overlap the cluster {head}"));
    }
    let mut elements = vec![head.clone()];
    elements.extend(extra.iter().map(LabelSet::singleton));
    Ok((elements, head.concat(extra)?))
}

/// `𝔄_{1+n}(t;{Y},s+1,…,s+n|G)`: Möbius-weighted sum over partitions of
/// `({Y}, extra)` of compositions of nonlinear groups, evaluated as
/// decoupled evolutions.
pub fn nonlinear_cumulant(
    dy: &Dynamics,
    t: f64,
    head: &LabelSet,
    extra: &LabelSet,
    g0: &CorrelationSequence,
) -> Result<LabeledOperator> {
    let (elements, z) = head_elements(head, extra)?;
    if extra.is_empty() {
        return nonlinear_group_density(dy, t, &z, g0);
    }
    let mut acc = LabeledOperator::zeros(z.clone(), dy.dim());
    for p in set_partitions(&elements) {
        let coupling: Vec<LabelSet> = p.iter().map(|blk| crate::partitions::union_of(blk)).collect();
        let term = decoupled_group(dy, t, &coupling, &z, g0)?;
        acc.axpy(C64::new(mobius(p.len()), 0.0), &term)?;
    }
    Ok(acc)
}

/// Same as [`nonlinear_cumulant`], built from explicit nested compositions.
pub fn nonlinear_cumulant_composed(
    dy: &Dynamics,
    t: f64,
    head: &LabelSet,
    extra: &LabelSet,
    g0: &CorrelationSequence,
) -> Result<LabeledOperator> {
    let (elements, z) = head_elements(head, extra)?;
    let mut acc = LabeledOperator::zeros(z.clone(), dy.dim());
    for p in set_partitions(&elements) {
        let blocks: Vec<LabelSet> = p.iter().map(|blk| crate::partitions::union_of(blk)).collect();
        let term = compose_groups(dy, t, &blocks, &z, g0)?;
        acc.axpy(C64::new(mobius(p.len()), 0.0), &term)?;
    }
    Ok(acc)
}

/// Reduced cumulant `U_{1+n}(t;{1,…,s},s+1,…,s+n|G)`: alternating sum over
/// the number `k` of trailing particles that are not evolved; those are
/// attached consecutively to the blocks with multinomial weights.
pub fn reduced_cumulant(dy: &Dynamics, t: f64, s: usize, n: usize, g0: &CorrelationSequence) -> Result<LabeledOperator> {
    if s == 0 {
        return domain("reduced cumulant needs s ≥ 1");
    }
    let total = s + n;
    dy.model().check_cap(total)?;
    let target = LabelSet::range(1, total);
    let mut acc = LabeledOperator::zeros(target.clone(), dy.dim());
    for k in 0..=n {
        let base = LabelSet::range(1, total - k);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let ck = sign * binomial(n, k);
        for blocks in set_partitions(base.as_slice()) {
            let blocks = to_sets(blocks);
            let mut inner = LabeledOperator::zeros(target.clone(), dy.dim());
            for counts in weak_compositions(k, blocks.len()) {
                let mut next = (total - k + 1) as Label;
                let mut attached = Vec::with_capacity(blocks.len());
                for (b, &c) in blocks.iter().zip(&counts) {
                    let tail = LabelSet::range(next, c);
                    next += c as Label;
                    attached.push(b.concat(&tail)?);
                }
                if g0.vanishes_on(&attached) {
                    continue;
                }
                let weight = factorial(k) / counts.iter().map(|&c| factorial(c)).product::<f64>();
                inner.axpy(C64::new(weight, 0.0), &g0.product_on(&attached, &target)?)?;
            }
            if inner.max_abs() == 0.0 {
                continue;
            }
            acc.axpy(C64::new(ck, 0.0), &cumulant_blocks(dy, t, &blocks, &inner)?)?;
        }
    }
    Ok(acc)
}

/// Residual of the cluster expansion of `𝒢(t;1,…,s+n|f)` over nested
/// cumulants of nonlinear groups. The right-hand side expands every nested
/// cumulant into compositions of nonlinear groups over refinements of the
/// outer partition; the left-hand side is summed literally.
pub fn cluster_recursion_check(dy: &Dynamics, t: f64, s: usize, n: usize, f: &CorrelationSequence) -> Result<f64> {
    let z = LabelSet::range(1, s + n);
    let lhs = nonlinear_group_apply(dy, t, &z, f)?;
    let mut rhs = LabeledOperator::zeros(z.clone(), dy.dim());
    for outer in set_partitions(z.as_slice()) {
        let outer = to_sets(outer);
        // refinements: a partition of every outer block
        let mut refinements: Vec<(f64, Vec<LabelSet>)> = vec![(1.0, Vec::new())];
        for block in &outer {
            let mut next = Vec::new();
            for (w, fine) in &refinements {
                for p in set_partitions(block.as_slice()) {
                    let mut v = fine.clone();
                    let k = p.len();
                    v.extend(to_sets(p));
                    next.push((w * mobius(k), v));
                }
            }
            refinements = next;
        }
        for (w, fine) in refinements {
            rhs.axpy(C64::new(w, 0.0), &compose_groups(dy, t, &fine, &z, f)?)?;
        }
    }
    lhs.distance(&rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::ModelSpec;
    use crate::random::Rng;

    fn dyn_(eps: f64) -> Dynamics {
        Dynamics::new(ModelSpec::default_test(17, eps))
    }

    fn random_seq(seed: u64, max: usize, norm: f64) -> CorrelationSequence {
        let mut rng = Rng::seeded(seed);
        let mut seq = CorrelationSequence::new(2);
        for s in 1..=max {
            seq.insert(&rng.symmetric_hermitian(LabelSet::range(1, s), 2, norm)).unwrap();
        }
        seq
    }

    fn op(labels: &[Label], seed: u64) -> LabeledOperator {
        let n = 1 << labels.len();
        LabeledOperator::new(LabelSet::new(labels.to_vec()).unwrap(), 2, Rng::seeded(seed).complex_matrix(n)).unwrap()
    }

    #[test]
    fn first_order_cumulant_is_the_group() {
        let dy = dyn_(0.7);
        let f = op(&[1, 2], 1);
        let cs = ClusteredSet::from_blocks(&[LabelSet::range(1, 2)]);
        let a = cumulant_clustered(&dy, 0.4, &cs, &f).unwrap();
        assert!(a.distance(&dy.group_apply(0.4, &f).unwrap()).unwrap() < 1e-13);
    }

    #[test]
    fn second_order_by_hand() {
        let dy = dyn_(0.7);
        let f = op(&[1, 2], 2);
        let a2 = cumulant_plain(&dy, 0.4, &f).unwrap();
        let u1 = dy.unitary(0.4, &LabelSet::singleton(1)).unwrap();
        let u2 = dy.unitary(0.4, &LabelSet::singleton(2)).unwrap();
        let hand = dy.group_apply(0.4, &f).unwrap().sub(&u1.tensor(&u2).unwrap().conjugate(&f).unwrap()).unwrap();
        assert!(a2.distance(&hand).unwrap() < 1e-13);
        assert!(cumulant_plain(&dy, 0.0, &f).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn free_cumulants_vanish() {
        let dy = dyn_(0.0);
        let f = op(&[1, 2, 3], 3);
        assert!(cumulant_plain(&dy, 0.9, &f).unwrap().max_abs() < 1e-11);
        let cs = ClusteredSet::from_blocks(&[LabelSet::range(1, 2), LabelSet::singleton(3)]);
        assert!(cumulant_clustered(&dy, 0.9, &cs, &f).unwrap().max_abs() < 1e-11);
    }

    #[test]
    fn routes_agree() {
        let dy = dyn_(0.8);
        let f = random_seq(5, 4, 0.6);
        for s in 1..=4 {
            let y = LabelSet::range(1, s);
            let a = nonlinear_group_apply(&dy, 0.35, &y, &f).unwrap();
            let b = nonlinear_group_density(&dy, 0.35, &y, &f).unwrap();
            assert!(a.distance(&b).unwrap() < 1e-11, "s={s}");
        }
    }

    #[test]
    fn nonlinear_group_at_zero_and_missing() {
        let dy = dyn_(0.8);
        let f = random_seq(6, 3, 0.6);
        let y = LabelSet::range(1, 3);
        assert!(nonlinear_group_apply(&dy, 0.0, &y, &f).unwrap().distance(&f.on(&y).unwrap()).unwrap() < 1e-13);
        assert!(nonlinear_group_apply(&dy, 0.3, &LabelSet::range(1, 4), &f).is_err());
    }

    #[test]
    fn printed_compositions() {
        let dy = dyn_(0.9);
        let t = 0.5;
        let f = random_seq(7, 3, 0.8);
        let z2 = LabelSet::range(1, 2);
        // 𝒢(t;1|𝒢(t;2|f)) = 𝔄₁(t,1)𝔄₁(t,2)f₂(1,2)
        let lhs = compose_groups(&dy, t, &[LabelSet::singleton(1), LabelSet::singleton(2)], &z2, &f).unwrap();
        let rhs = conj_blocks(&dy, t, &[LabelSet::singleton(1), LabelSet::singleton(2)], &f.on(&z2).unwrap()).unwrap();
        assert!(lhs.distance(&rhs).unwrap() < 1e-12);
        // 𝒢(t;1,2|𝒢(t;3|f))
        let z = LabelSet::range(1, 3);
        let lhs = compose_groups(&dy, t, &[z2.clone(), LabelSet::singleton(3)], &z, &f).unwrap();
        let a1_12_3 = |x: &LabeledOperator| conj_blocks(&dy, t, &[z2.clone(), LabelSet::singleton(3)], x).unwrap();
        let a2_12_a1_3 = |x: &LabeledOperator| {
            let all = conj_blocks(&dy, t, &[z2.clone(), LabelSet::singleton(3)], x).unwrap();
            let sep = conj_blocks(&dy, t, &[LabelSet::singleton(1), LabelSet::singleton(2), LabelSet::singleton(3)], x).unwrap();
            all.sub(&sep).unwrap()
        };
        let prod = |a: &[Label], b: &[Label]| {
            f.product_on(&[LabelSet::new(a.to_vec()).unwrap(), LabelSet::new(b.to_vec()).unwrap()], &z).unwrap()
        };
        let rhs = a1_12_3(&f.on(&z).unwrap())
            .add(&a2_12_a1_3(&prod(&[1], &[2, 3]).add(&prod(&[2], &[1, 3])).unwrap()))
            .unwrap();
        assert!(lhs.distance(&rhs).unwrap() < 1e-12);
    }

    #[test]
    fn composed_and_decoupled_cumulants_agree() {
        let dy = dyn_(0.9);
        let g = random_seq(8, 4, 0.5);
        for (head, extra) in [(LabelSet::range(1, 1), LabelSet::range(2, 1)), (LabelSet::range(1, 2), LabelSet::range(3, 1)), (LabelSet::range(1, 1), LabelSet::range(2, 2))] {
            let a = nonlinear_cumulant(&dy, 0.6, &head, &extra, &g).unwrap();
            let b = nonlinear_cumulant_composed(&dy, 0.6, &head, &extra, &g).unwrap();
            assert!(a.distance(&b).unwrap() < 1e-11);
            assert!(nonlinear_cumulant(&dy, 0.0, &head, &extra, &g).unwrap().max_abs() < 1e-13);
        }
    }

    #[test]
    fn reduced_cumulant_first_order_is_the_group() {
        let dy = dyn_(0.9);
        let g = random_seq(9, 3, 0.5);
        let u1 = reduced_cumulant(&dy, 0.4, 3, 0, &g).unwrap();
        let grp = nonlinear_group_density(&dy, 0.4, &LabelSet::range(1, 3), &g).unwrap();
        assert!(u1.distance(&grp).unwrap() < 1e-11);
    }

    #[test]
    fn reduced_and_nonlinear_cumulants_agree_after_trace() {
        let dy = dyn_(0.9);
        let g = random_seq(10, 3, 0.5);
        for s in 1..=2 {
            let u = reduced_cumulant(&dy, 0.4, s, 1, &g).unwrap();
            let a = nonlinear_cumulant(&dy, 0.4, &LabelSet::range(1, s), &LabelSet::singleton(s as Label + 1), &g).unwrap();
            let tr = LabelSet::singleton(s as Label + 1);
            assert!(u.partial_trace(&tr).unwrap().distance(&a.partial_trace(&tr).unwrap()).unwrap() < 1e-11);
        }
    }

    #[test]
    fn cluster_recursion() {
        let dy = dyn_(0.9);
        let f = random_seq(11, 3, 0.5);
        assert!(cluster_recursion_check(&dy, 0.4, 2, 0, &f).unwrap() < 1e-10);
        assert!(cluster_recursion_check(&dy, 0.4, 1, 1, &f).unwrap() < 1e-10);
        assert!(cluster_recursion_check(&dy, 0.4, 2, 1, &f).unwrap() < 1e-10);
    }
}
