//! Set partitions, constrained bipartitions, dissections of ordered sets,
//! compositions, Möbius weights and declusterization.
//!
//! All enumerations are deterministic: partitions are generated from
//! restricted growth strings in lexicographic order and blocks are listed by
//! their first element in the ground order.

use crate::error::{domain, Result};
use crate::operator::{Label, LabelSet};

/// Partitions of `items` as lists of blocks. Blocks keep the item order and
/// are sorted by first occurrence. An empty input yields one empty partition.
pub fn set_partitions<T: Clone>(items: &[T]) -> Vec<Vec<Vec<T>>> {
    let n = items.len();
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    // restricted growth string: a[0] = 0, a[i] <= 1 + max(a[..i])
    let mut a = vec![0usize; n];
    let mut maxes = vec![0usize; n];
    loop {
        let blocks = 1 + maxes[n - 1];
        let mut parts: Vec<Vec<T>> = vec![Vec::new(); blocks];
        for (i, &b) in a.iter().enumerate() {
            parts[b].push(items[i].clone());
        }
        out.push(parts);
        // increment
        let mut i = n - 1;
        loop {
            if i == 0 {
                return out;
            }
            let limit = maxes[i - 1] + 1;
            if a[i] < limit {
                a[i] += 1;
                maxes[i] = maxes[i - 1].max(a[i]);
                for j in i + 1..n {
                    a[j] = 0;
                    maxes[j] = maxes[i];
                }
                break;
            }
            i -= 1;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub blocks: Vec<LabelSet>,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

pub fn enumerate_partitions(ground: &LabelSet) -> Result<Vec<Partition>> {
    if ground.is_empty() {
        return domain("cannot partition an empty ground set");
    }
    Ok(set_partitions(ground.as_slice())
        .into_iter()
        .map(|blocks| Partition {
            blocks: blocks.into_iter().map(|b| LabelSet::new(b).expect("distinct")).collect(),
        })
        .collect())
}

pub fn bell(n: usize) -> u64 {
    // Bell triangle
    let mut row = vec![1u64];
    for _ in 0..n {
        let mut next = vec![*row.last().unwrap()];
        for &x in &row {
            let last = *next.last().unwrap();
            next.push(last + x);
        }
        row = next;
    }
    row[0]
}

/// Stirling numbers of the second kind.
pub fn stirling2(n: usize, k: usize) -> u64 {
    let mut s = vec![vec![0u64; k + 1]; n + 1];
    s[0][0] = 1;
    for i in 1..=n {
        for j in 1..=k.min(i) {
            s[i][j] = j as u64 * s[i - 1][j] + s[i - 1][j - 1];
        }
    }
    s[n][k]
}

/// `(−1)^{k−1} (k−1)!`, the Möbius weight of a `k`-block partition relative
/// to the one-block partition.
pub fn mobius_weight(block_count: usize) -> Result<i64> {
    if block_count == 0 {
        return domain("Möbius weight needs at least one block");
    }
    let f: i64 = (1..block_count as i64).product();
    Ok(if block_count % 2 == 1 { f } else { -f })
}

pub(crate) fn mobius(block_count: usize) -> f64 {
    mobius_weight(block_count).expect("nonempty partition") as f64
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Two-block partitions of `ground`, each unordered pair emitted once.
///
/// With no pins the first block is the one containing the first ground
/// element. Otherwise the pair is oriented so that `pinned_first ⊆ X₁` and
/// `pinned_second ⊆ X₂`.
pub fn enumerate_bipartitions(
    ground: &LabelSet,
    pinned_first: &LabelSet,
    pinned_second: &LabelSet,
) -> Result<Vec<(LabelSet, LabelSet)>> {
    if !pinned_first.is_disjoint(pinned_second) {
        return domain(format!("pins {pinned_first} and {pinned_second} overlap"));
    }
    if !pinned_first.is_subset_of(ground) || !pinned_second.is_subset_of(ground) {
        return domain("pinned labels must belong to the ground set");
    }
    let n = ground.len();
    let mut out = Vec::new();
    if n < 2 {
        return Ok(out);
    }
    let items = ground.as_slice();
    // first element fixed in X1 to avoid double counting, then orient
    for mask in 0u64..(1 << (n - 1)) {
        let mut x1 = vec![items[0]];
        let mut x2 = Vec::new();
        for (k, &a) in items.iter().enumerate().skip(1) {
            if mask & (1 << (k - 1)) != 0 {
                x2.push(a);
            } else {
                x1.push(a);
            }
        }
        if x2.is_empty() {
            continue;
        }
        let (a, b) = (LabelSet::new(x1)?, LabelSet::new(x2)?);
        let fits = |p: &LabelSet, q: &LabelSet| pinned_first.is_subset_of(p) && pinned_second.is_subset_of(q);
        if fits(&a, &b) {
            out.push((a, b));
        } else if fits(&b, &a) {
            out.push((b, a));
        }
    }
    // stable order: by the bitmask walk above, which is deterministic
    Ok(out)
}

/// A partition of a linearly ordered set whose blocks keep the ambient order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dissection {
    pub blocks: Vec<LabelSet>,
}

pub fn enumerate_dissections(ground: &LabelSet, max_blocks: usize) -> Result<Vec<Dissection>> {
    if ground.is_empty() || max_blocks == 0 {
        return domain("dissections need a nonempty ground set and max_blocks ≥ 1");
    }
    Ok(enumerate_partitions(ground)?
        .into_iter()
        .filter(|p| p.len() <= max_blocks)
        .map(|p| Dissection { blocks: p.blocks })
        .collect())
}

/// Weak compositions of `total` into `parts` nonnegative summands, in
/// lexicographic order.
pub fn weak_compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in weak_compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Sequences `(n₁,…,n_k)` of positive integers with `n₁+…+n_k ≤ total`.
pub fn positive_sequences(total: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 1..=total {
        for mut rest in positive_sequences(total - first, k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClusterElement {
    Single(Label),
    Cluster(LabelSet),
}

impl ClusterElement {
    pub fn labels(&self) -> LabelSet {
        match self {
            ClusterElement::Single(a) => LabelSet::singleton(*a),
            ClusterElement::Cluster(x) => x.clone(),
        }
    }
}

/// A list of elements, each a single particle or a frozen cluster.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ClusteredSet {
    pub elements: Vec<ClusterElement>,
}

impl ClusteredSet {
    pub fn singletons(labels: &LabelSet) -> Self {
        Self { elements: labels.iter().map(ClusterElement::Single).collect() }
    }

    pub fn from_blocks(blocks: &[LabelSet]) -> Self {
        Self {
            elements: blocks
                .iter()
                .map(|b| if b.len() == 1 { ClusterElement::Single(b.as_slice()[0]) } else { ClusterElement::Cluster(b.clone()) })
                .collect(),
        }
    }

    /// `{Y}` followed by single particles.
    pub fn head_and_extra(head: &LabelSet, extra: &LabelSet) -> Self {
        let mut elements = vec![ClusterElement::Cluster(head.clone())];
        elements.extend(extra.iter().map(ClusterElement::Single));
        Self { elements }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn blocks(&self) -> Vec<LabelSet> {
        self.elements.iter().map(ClusterElement::labels).collect()
    }
}

/// θ: flattens clusters in order.
pub fn declusterize(cs: &ClusteredSet) -> Result<LabelSet> {
    let mut v = Vec::new();
    for e in &cs.elements {
        v.extend(e.labels().iter());
    }
    LabelSet::new(v)
}

/// Declusterization of a set of blocks (used for partitions of clusters).
pub fn union_of(blocks: &[LabelSet]) -> LabelSet {
    LabelSet::new(blocks.iter().flat_map(|b| b.iter()).collect()).expect("disjoint blocks")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ls(v: &[Label]) -> LabelSet {
        LabelSet::new(v.to_vec()).unwrap()
    }

    #[test]
    fn partition_counts() {
        assert_eq!(enumerate_partitions(&ls(&[1])).unwrap().len(), 1);
        assert_eq!(enumerate_partitions(&ls(&[1, 2, 3])).unwrap().len(), 5);
        assert_eq!(enumerate_partitions(&LabelSet::range(1, 6)).unwrap().len() as u64, bell(6));
        assert_eq!(bell(6), 203);
        assert_eq!(bell(7), 877);
        assert!(enumerate_partitions(&LabelSet::empty()).is_err());
    }

    #[test]
    fn partitions_are_normal_and_distinct() {
        let ps = enumerate_partitions(&LabelSet::range(1, 5)).unwrap();
        let mut seen = std::collections::HashSet::new();
        for p in &ps {
            let firsts: Vec<Label> = p.blocks.iter().map(|b| b.as_slice()[0]).collect();
            assert!(firsts.windows(2).all(|w| w[0] < w[1]));
            let mut key: Vec<Vec<Label>> = p.blocks.iter().map(|b| b.sorted().into()).collect();
            key.sort();
            assert!(seen.insert(key));
            assert_eq!(union_of(&p.blocks).sorted(), LabelSet::range(1, 5));
        }
    }

    #[test]
    fn mobius_values_and_identity() {
        assert_eq!(mobius_weight(1).unwrap(), 1);
        assert_eq!(mobius_weight(2).unwrap(), -1);
        assert_eq!(mobius_weight(4).unwrap(), -6);
        assert!(mobius_weight(0).is_err());
        for n in 1..=6 {
            let s: i64 = enumerate_partitions(&LabelSet::range(1, n))
                .unwrap()
                .iter()
                .map(|p| mobius_weight(p.len()).unwrap())
                .sum();
            assert_eq!(s, if n == 1 { 1 } else { 0 });
        }
    }

    #[test]
    fn bipartitions() {
        let none = LabelSet::empty();
        let b = enumerate_bipartitions(&ls(&[1, 2]), &none, &none).unwrap();
        assert_eq!(b, vec![(ls(&[1]), ls(&[2]))]);
        for s in 2..=6 {
            let n = enumerate_bipartitions(&LabelSet::range(1, s), &none, &none).unwrap().len();
            assert_eq!(n as u64, stirling2(s, 2));
            assert_eq!(n, (1 << (s - 1)) - 1);
        }
        assert!(enumerate_bipartitions(&ls(&[1, 2]), &ls(&[1]), &ls(&[1])).is_err());
    }

    #[test]
    fn pinned_bipartitions_match_filter() {
        let ground = ls(&[1, 2, 3]);
        let got = enumerate_bipartitions(&ground, &ls(&[1]), &ls(&[3])).unwrap();
        // oracle: all two-block partitions, kept if the pins can be honoured
        let mut oracle = Vec::new();
        for p in enumerate_partitions(&ground).unwrap().into_iter().filter(|p| p.len() == 2) {
            let (a, b) = (p.blocks[0].clone(), p.blocks[1].clone());
            if a.contains(1) && b.contains(3) {
                oracle.push((a, b));
            } else if b.contains(1) && a.contains(3) {
                oracle.push((b, a));
            }
        }
        assert_eq!(got.len(), oracle.len());
        for pair in &oracle {
            assert!(got.contains(pair));
        }
        assert_eq!(got.len(), 2);
    }

    #[test]
    fn dissection_counts() {
        assert_eq!(enumerate_dissections(&ls(&[4]), 1).unwrap().len(), 1);
        assert_eq!(enumerate_dissections(&ls(&[1, 2, 3]), 3).unwrap().len(), 5);
        let g = LabelSet::range(1, 5);
        for m in 1..=5 {
            let expect: u64 = (1..=m).map(|k| stirling2(5, k)).sum();
            assert_eq!(enumerate_dissections(&g, m).unwrap().len() as u64, expect);
        }
        let d = enumerate_dissections(&ls(&[3, 1, 2]), 2).unwrap();
        // inherited order of the ambient sequence
        assert!(d.iter().any(|x| x.blocks == vec![ls(&[3, 2]), ls(&[1])]));
    }

    #[test]
    fn compositions() {
        assert_eq!(weak_compositions(2, 2), vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
        assert_eq!(weak_compositions(3, 3).len(), 10);
        assert_eq!(positive_sequences(3, 2), vec![vec![1, 1], vec![1, 2], vec![2, 1]]);
        assert_eq!(positive_sequences(0, 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn declusterization() {
        let cs = ClusteredSet {
            elements: vec![ClusterElement::Cluster(ls(&[1, 2])), ClusterElement::Single(3)],
        };
        assert_eq!(declusterize(&cs).unwrap(), ls(&[1, 2, 3]));
        assert_eq!(declusterize(&ClusteredSet::singletons(&ls(&[1]))).unwrap(), ls(&[1]));
        let bad = ClusteredSet {
            elements: vec![ClusterElement::Cluster(ls(&[1, 2])), ClusterElement::Single(2)],
        };
        assert!(declusterize(&bad).is_err());
    }

    #[test]
    fn nested_clustering_matches_flatten() {
        // random clusterings of 1..7 against a direct flatten
        for p in enumerate_partitions(&LabelSet::range(1, 5)).unwrap() {
            let cs = ClusteredSet::from_blocks(&p.blocks);
            let flat: Vec<Label> = p.blocks.iter().flat_map(|b| b.iter()).collect();
            assert_eq!(declusterize(&cs).unwrap().as_slice(), flat.as_slice());
        }
    }

    #[test]
    fn enumeration_is_deterministic() {
        let a = enumerate_partitions(&LabelSet::range(1, 5)).unwrap();
        let b = enumerate_partitions(&LabelSet::range(1, 5)).unwrap();
        assert_eq!(a, b);
    }

    proptest::proptest! {
        #[test]
        fn stirling_rows_sum_to_bell(n in 1usize..12) {
            proptest::prop_assert_eq!((1..=n).map(|k| stirling2(n, k)).sum::<u64>(), bell(n));
        }

        #[test]
        fn compositions_counted_by_binomial(total in 0usize..7, parts in 1usize..5) {
            let c = weak_compositions(total, parts);
            proptest::prop_assert_eq!(c.len() as f64, binomial(total + parts - 1, parts - 1));
            proptest::prop_assert!(c.iter().all(|v| v.len() == parts && v.iter().sum::<usize>() == total));
        }

        #[test]
        fn partitions_cover_the_ground_set(n in 1usize..6, shift in 0u32..50) {
            let ground = LabelSet::new((0..n as Label).map(|i| i + shift as Label).collect()).unwrap();
            for p in enumerate_partitions(&ground).unwrap() {
                let mut all: Vec<Label> = p.blocks.iter().flat_map(|b| b.as_slice().to_vec()).collect();
                all.sort();
                proptest::prop_assert_eq!(all, ground.sorted().as_slice().to_vec());
            }
        }
    }
}
