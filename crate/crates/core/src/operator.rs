//! Dense operators on finite tensor products of `d`-dimensional factors, each
//! factor tagged with a particle label.
//!
//! Row and column indices are laid out in mixed radix following the label
//! order, leftmost label most significant, so `A on (1) ⊗ B on (2)` is
//! `kron(A, B)` on labels `(1, 2)`.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, invalid, Error, Result};

pub type Label = u32;

/// Ordered list of distinct particle labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<Label>", into = "Vec<Label>")]
pub struct LabelSet(Vec<Label>);

impl LabelSet {
    pub fn new(labels: Vec<Label>) -> Result<Self> {
        for (i, a) in labels.iter().enumerate() {
            if labels[..i].contains(a) {
                return domain(format!("duplicate label {a}"));
            }
        }
        Ok(Self(labels))
    }

    /// Labels `first, first+1, ..., first+len-1`.
    pub fn range(first: Label, len: usize) -> Self {
        Self((first..first + len as Label).collect())
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn singleton(a: Label) -> Self {
        Self(vec![a])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Label] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = Label> + '_ {
        self.0.iter().copied()
    }

    pub fn contains(&self, a: Label) -> bool {
        self.0.contains(&a)
    }

    pub fn position(&self, a: Label) -> Option<usize> {
        self.0.iter().position(|&b| b == a)
    }

    pub fn is_subset_of(&self, other: &LabelSet) -> bool {
        self.0.iter().all(|&a| other.contains(a))
    }

    pub fn is_disjoint(&self, other: &LabelSet) -> bool {
        self.0.iter().all(|&a| !other.contains(a))
    }

    /// Elements of `self` not in `other`, in `self` order.
    pub fn difference(&self, other: &LabelSet) -> LabelSet {
        Self(self.0.iter().copied().filter(|&a| !other.contains(a)).collect())
    }

    /// Elements of `self` that are also in `other`, in `self` order.
    pub fn intersection(&self, other: &LabelSet) -> LabelSet {
        Self(self.0.iter().copied().filter(|&a| other.contains(a)).collect())
    }

    /// Concatenation; fails if the sets overlap.
    pub fn concat(&self, other: &LabelSet) -> Result<LabelSet> {
        if !self.is_disjoint(other) {
            return domain(format!("label sets {self} and {other} overlap"));
        }
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Ok(Self(v))
    }

    pub fn sorted(&self) -> LabelSet {
        let mut v = self.0.clone();
        v.sort_unstable();
        Self(v)
    }

    pub fn same_elements(&self, other: &LabelSet) -> bool {
        self.len() == other.len() && self.is_subset_of(other)
    }
}

impl TryFrom<Vec<Label>> for LabelSet {
    type Error = Error;
    fn try_from(v: Vec<Label>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<LabelSet> for Vec<Label> {
    fn from(s: LabelSet) -> Self {
        s.0
    }
}

impl fmt::Display for LabelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// Dense operator on `⊗_{a ∈ labels} C^dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledOperator {
    labels: LabelSet,
    dim: usize,
    mat: DMatrix<C64>,
}

pub(crate) fn side(dim: usize, n: usize) -> usize {
    dim.pow(n as u32)
}

impl LabeledOperator {
    pub fn new(labels: LabelSet, dim: usize, mat: DMatrix<C64>) -> Result<Self> {
        if dim == 0 {
            return invalid("local dimension must be positive");
        }
        let n = side(dim, labels.len());
        if mat.nrows() != n || mat.ncols() != n {
            return invalid(format!(
                "matrix is {}x{}, expected {n}x{n} for {} labels at d={dim}",
                mat.nrows(),
                mat.ncols(),
                labels.len()
            ));
        }
        Ok(Self { labels, dim, mat })
    }

    pub fn identity(labels: LabelSet, dim: usize) -> Self {
        let n = side(dim, labels.len());
        Self { labels, dim, mat: DMatrix::identity(n, n) }
    }

    pub fn zeros(labels: LabelSet, dim: usize) -> Self {
        let n = side(dim, labels.len());
        Self { labels, dim, mat: DMatrix::zeros(n, n) }
    }

    /// A 1×1 operator on no labels.
    pub fn scalar(value: C64, dim: usize) -> Self {
        Self { labels: LabelSet::empty(), dim, mat: DMatrix::from_element(1, 1, value) }
    }

    pub fn labels(&self) -> &LabelSet {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    /// Replaces the labels position by position; the matrix is untouched.
    pub fn relabel(&self, labels: LabelSet) -> Result<Self> {
        if labels.len() != self.labels.len() {
            return invalid("relabel: label count mismatch");
        }
        Ok(Self { labels, dim: self.dim, mat: self.mat.clone() })
    }

    pub fn map_matrix(&self, f: impl FnOnce(&DMatrix<C64>) -> DMatrix<C64>) -> Self {
        Self { labels: self.labels.clone(), dim: self.dim, mat: f(&self.mat) }
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    pub fn adjoint(&self) -> Self {
        self.map_matrix(|m| m.adjoint())
    }

    pub fn scale(&self, c: C64) -> Self {
        self.map_matrix(|m| m * c)
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim || self.labels != other.labels {
            return domain(format!(
                "operator layouts differ: {} vs {}",
                self.labels, other.labels
            ));
        }
        Ok(())
    }

    /// `self + other`; `other` is reordered to this layout if it carries the
    /// same labels in a different order.
    pub fn add(&self, other: &Self) -> Result<Self> {
        let o = other.aligned_to(&self.labels)?;
        self.check_same(&o)?;
        Ok(self.map_matrix(|m| m + &o.mat))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let o = other.aligned_to(&self.labels)?;
        self.check_same(&o)?;
        Ok(self.map_matrix(|m| m - &o.mat))
    }

    pub fn add_assign(&mut self, other: &Self) -> Result<()> {
        self.axpy(C64::new(1.0, 0.0), other)
    }

    /// `self += c * other`.
    pub fn axpy(&mut self, c: C64, other: &Self) -> Result<()> {
        if other.labels == self.labels && other.dim == self.dim {
            self.mat.zip_apply(&other.mat, |a, b| *a += c * b);
            return Ok(());
        }
        let o = other.aligned_to(&self.labels)?;
        self.check_same(&o)?;
        self.mat.zip_apply(&o.mat, |a, b| *a += c * b);
        Ok(())
    }

    /// Operator product; both factors must act on the same label set.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let o = other.aligned_to(&self.labels)?;
        self.check_same(&o)?;
        Ok(self.map_matrix(|m| m * &o.mat))
    }

    /// `self · x · self†` for a unitary (or any) `self` on the same labels.
    pub fn conjugate(&self, x: &Self) -> Result<Self> {
        let xo = x.aligned_to(&self.labels)?;
        self.check_same(&xo)?;
        Ok(self.map_matrix(|u| u * &xo.mat * u.adjoint()))
    }

    /// `[self, other]`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        let o = other.aligned_to(&self.labels)?;
        self.check_same(&o)?;
        Ok(self.map_matrix(|a| a * &o.mat - &o.mat * a))
    }

    /// `½(self·other + other·self)`.
    pub fn jordan(&self, other: &Self) -> Result<Self> {
        let o = other.aligned_to(&self.labels)?;
        self.check_same(&o)?;
        Ok(self.map_matrix(|a| (a * &o.mat + &o.mat * a) * C64::new(0.5, 0.0)))
    }

    /// Tensor product with an operator on disjoint labels; labels are
    /// concatenated (`self` first).
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return invalid("tensor: local dimensions differ");
        }
        let labels = self.labels.concat(&other.labels)?;
        Ok(Self { labels, dim: self.dim, mat: self.mat.kronecker(&other.mat) })
    }

    /// Tensor product of operators on mutually disjoint labels, laid out in
    /// `target` order. The union of labels must equal `target`.
    pub fn tensor_all(ops: &[&LabeledOperator], target: &LabelSet, dim: usize) -> Result<Self> {
        let mut acc = LabeledOperator::scalar(C64::new(1.0, 0.0), dim);
        for op in ops {
            acc = acc.tensor(op)?;
        }
        if !acc.labels.same_elements(target) {
            return domain(format!("tensor_all: factors cover {} but target is {target}", acc.labels));
        }
        acc.aligned_to(target)
    }

    /// Reorders tensor factors so that the operator is laid out along
    /// `target`, which must be a permutation of the current labels.
    pub fn aligned_to(&self, target: &LabelSet) -> Result<Self> {
        if &self.labels == target {
            return Ok(self.clone());
        }
        if !self.labels.same_elements(target) {
            return domain(format!("cannot align {} to {target}", self.labels));
        }
        let n = self.labels.len();
        // positions of target factors in the current layout
        let src_pos: Vec<usize> = target.iter().map(|a| self.labels.position(a).unwrap()).collect();
        let perm = permutation_indices(self.dim, n, &src_pos);
        let size = perm.len();
        let mat = DMatrix::from_fn(size, size, |i, j| self.mat[(perm[i], perm[j])]);
        Ok(Self { labels: target.clone(), dim: self.dim, mat })
    }

    /// Acts as `self` on its labels and as the identity on the rest of
    /// `target`; laid out along `target`.
    pub fn embed(&self, target: &LabelSet) -> Result<Self> {
        if !self.labels.is_subset_of(target) {
            return domain(format!("labels {} not contained in {target}", self.labels));
        }
        let rest = target.difference(&self.labels);
        if rest.is_empty() {
            return self.aligned_to(target);
        }
        self.tensor(&LabeledOperator::identity(rest, self.dim))?.aligned_to(target)
    }

    /// Partial trace over `traced`; the remaining labels keep their order.
    pub fn partial_trace(&self, traced: &LabelSet) -> Result<Self> {
        if !traced.is_subset_of(&self.labels) {
            return domain(format!("traced labels {traced} not all in {}", self.labels));
        }
        if traced.is_empty() {
            return Ok(self.clone());
        }
        let kept = self.labels.difference(traced);
        let d = self.dim;
        let n = self.labels.len();
        let kept_pos: Vec<usize> = kept.iter().map(|a| self.labels.position(a).unwrap()).collect();
        let tr_pos: Vec<usize> = traced.iter().map(|a| self.labels.position(a).unwrap()).collect();
        let nk = side(d, kept.len());
        let nt = side(d, traced.len());
        let weights: Vec<usize> = (0..n).map(|p| side(d, n - 1 - p)).collect();
        let offsets = |positions: &[usize], count: usize| -> Vec<usize> {
            (0..count)
                .map(|idx| {
                    let mut rem = idx;
                    let mut off = 0;
                    for &p in positions.iter().rev() {
                        off += (rem % d) * weights[p];
                        rem /= d;
                    }
                    off
                })
                .collect()
        };
        let kofs = offsets(&kept_pos, nk);
        let tofs = offsets(&tr_pos, nt);
        let mat = DMatrix::from_fn(nk, nk, |i, j| {
            let (bi, bj) = (kofs[i], kofs[j]);
            tofs.iter().map(|&r| self.mat[(bi + r, bj + r)]).sum()
        });
        Ok(Self { labels: kept, dim: d, mat })
    }

    /// Sum of singular values.
    pub fn trace_norm(&self) -> f64 {
        trace_norm(&self.mat)
    }

    pub fn max_abs(&self) -> f64 {
        self.mat.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from `other` (aligned to this layout).
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.max_abs())
    }

    /// Trace-norm distance `‖self − other‖₁`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.trace_norm())
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (&self.mat - self.mat.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Conjugation by the factor permutation that swaps the labels at
    /// positions `i` and `j`.
    fn swapped(&self, i: usize, j: usize) -> Self {
        let mut v = self.labels.0.clone();
        v.swap(i, j);
        let permuted = LabelSet(v);
        // lay out along swapped labels, then read the result back under the
        // original labels
        let m = self.aligned_to(&permuted).expect("permutation of own labels");
        Self { labels: self.labels.clone(), dim: self.dim, mat: m.mat }
    }

    /// True iff every particle permutation leaves the operator invariant
    /// within `tol` (entrywise). Adjacent transpositions generate the group.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.symmetry_defect() <= tol
    }

    pub fn symmetry_defect(&self) -> f64 {
        let n = self.labels.len();
        (1..n)
            .map(|i| {
                let s = self.swapped(i - 1, i);
                (&s.mat - &self.mat).iter().map(|z| z.norm()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    /// Average over all factor permutations (a projection onto symmetric
    /// operators).
    pub fn symmetrize(&self) -> Self {
        let n = self.labels.len();
        let perms = permutations(n);
        let count = perms.len() as f64;
        let mut acc = DMatrix::<C64>::zeros(self.mat.nrows(), self.mat.ncols());
        for p in &perms {
            let permuted = LabelSet(p.iter().map(|&k| self.labels.0[k]).collect());
            let m = self.aligned_to(&permuted).expect("permutation of own labels");
            acc += m.mat;
        }
        Self { labels: self.labels.clone(), dim: self.dim, mat: acc / C64::new(count, 0.0) }
    }
}

/// For a layout of `n` factors, returns `perm` such that the reordered matrix
/// satisfies `new[i, j] = old[perm[i], perm[j]]`, where new factor `k` is old
/// factor `src_pos[k]`.
fn permutation_indices(d: usize, n: usize, src_pos: &[usize]) -> Vec<usize> {
    let size = side(d, n);
    let old_weights: Vec<usize> = (0..n).map(|p| side(d, n - 1 - p)).collect();
    (0..size)
        .map(|idx| {
            let mut rem = idx;
            let mut old = 0;
            for k in (0..n).rev() {
                old += (rem % d) * old_weights[src_pos[k]];
                rem /= d;
            }
            old
        })
        .collect()
}

pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for k in 0..used.len() {
            if !used[k] {
                used[k] = true;
                prefix.push(k);
                rec(prefix, used, out);
                prefix.pop();
                used[k] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

pub fn trace_norm(m: &DMatrix<C64>) -> f64 {
    if m.nrows() == 1 {
        return m[(0, 0)].norm();
    }
    m.clone().singular_values().iter().sum()
}

/// JSON fixture form: `{labels, dim, re, im}` with row-major nested arrays.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OperatorJson {
    pub labels: Vec<Label>,
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&LabeledOperator> for OperatorJson {
    fn from(op: &LabeledOperator) -> Self {
        let (re, im) = split_matrix(&op.mat);
        Self { labels: op.labels.0.clone(), dim: op.dim, re, im }
    }
}

impl TryFrom<OperatorJson> for LabeledOperator {
    type Error = Error;
    fn try_from(j: OperatorJson) -> Result<Self> {
        let mat = join_matrix(&j.re, &j.im)?;
        LabeledOperator::new(LabelSet::new(j.labels)?, j.dim, mat)
    }
}

impl Serialize for LabeledOperator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        OperatorJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for LabeledOperator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = OperatorJson::deserialize(d)?;
        LabeledOperator::try_from(j).map_err(serde::de::Error::custom)
    }
}

pub fn split_matrix(m: &DMatrix<C64>) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let re = (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)].re).collect()).collect();
    let im = (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)].im).collect()).collect();
    (re, im)
}

pub fn join_matrix(re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<DMatrix<C64>> {
    let n = re.len();
    if im.len() != n || re.iter().chain(im.iter()).any(|r| r.len() != n) {
        return invalid("matrix re/im parts must be square and of equal shape");
    }
    Ok(DMatrix::from_fn(n, n, |i, j| C64::new(re[i][j], im[i][j])))
}
