//! Von Neumann hierarchy for correlation operators, the nonlinear BBGKY
//! hierarchy for marginal correlation operators, and their truncated series
//! solutions.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::cumulants::{conj_blocks, nonlinear_cumulant, nonlinear_group_apply, nonlinear_group_density};
use crate::dynamics::Dynamics;
use crate::error::{invalid, Result};
use crate::operator::{Label, LabelSet, LabeledOperator};
use crate::partitions::{enumerate_bipartitions, factorial, set_partitions};
use crate::sequence::{correlations_from_densities, densities_from_correlations, CorrelationSequence};

/// `(2e³)⁻¹`, the norm premise for convergence of the marginal series.
pub fn marginal_series_radius() -> f64 {
    1.0 / (2.0 * 3f64.exp())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SeriesConfig {
    pub n_max: usize,
    pub fd_step: f64,
    pub tol_algebraic: f64,
    pub tol_fd: f64,
    pub guard_radius: Option<f64>,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        Self { n_max: 2, fd_step: 1e-3, tol_algebraic: 1e-10, tol_fd: 1e-4, guard_radius: None }
    }
}

impl SeriesConfig {
    pub fn with_n_max(&self, n_max: usize) -> Self {
        Self { n_max, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fd_step > 0.0) {
            return invalid("fd_step must be positive");
        }
        if !(self.tol_algebraic > 0.0 && self.tol_fd > 0.0) {
            return invalid("tolerances must be positive");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermRecord {
    pub n: usize,
    pub trace_norm: f64,
    pub cumulative_trace_norm: f64,
}

/// A truncated series together with per-term diagnostics.
#[derive(Clone, Debug)]
pub struct SeriesResult {
    pub value: LabeledOperator,
    pub terms: Vec<TermRecord>,
}

impl SeriesResult {
    fn from_terms(terms: Vec<LabeledOperator>) -> Result<Self> {
        let mut value = terms[0].clone();
        let mut records = vec![TermRecord { n: 0, trace_norm: terms[0].trace_norm(), cumulative_trace_norm: value.trace_norm() }];
        for (n, t) in terms.iter().enumerate().skip(1) {
            value.add_assign(t)?;
            records.push(TermRecord { n, trace_norm: t.trace_norm(), cumulative_trace_norm: value.trace_norm() });
        }
        Ok(Self { value, terms: records })
    }

    /// Largest ratio of consecutive term norms (0 when fewer than two terms).
    pub fn cauchy_ratio(&self) -> f64 {
        self.terms
            .windows(2)
            .filter(|w| w[0].trace_norm > 0.0)
            .map(|w| w[1].trace_norm / w[0].trace_norm)
            .fold(0.0, f64::max)
    }
}

fn fresh(s: usize, n: usize) -> LabelSet {
    LabelSet::range(s as Label + 1, n)
}

/// `g_s(t) = 𝒢(t;Y|g(0))`.
pub fn von_neumann_solve(dy: &Dynamics, t: f64, y: &LabelSet, g0: &CorrelationSequence) -> Result<LabeledOperator> {
    nonlinear_group_density(dy, t, y, g0)
}

/// How the bipartition sum of the hierarchy generator is counted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BipartitionCounting {
    /// Each unordered pair `{X₁, X₂}` once (the correct convention).
    Unordered,
    /// Each pair twice, as `(X₁, X₂)` and `(X₂, X₁)`; kept as a negative control.
    Ordered,
}

/// `𝒩(Y|g) = N*_s g_s + ε Σ_{X₁∪X₂=Y} Σ_{i₁∈X₁, i₂∈X₂} N*_int(i₁,i₂) g(X₁) g(X₂)`.
pub fn von_neumann_generator_apply(dy: &Dynamics, y: &LabelSet, g: &CorrelationSequence) -> Result<LabeledOperator> {
    generator_with_counting(dy, y, g, BipartitionCounting::Unordered)
}

pub fn generator_with_counting(
    dy: &Dynamics,
    y: &LabelSet,
    g: &CorrelationSequence,
    counting: BipartitionCounting,
) -> Result<LabeledOperator> {
    let mut out = dy.generator_apply(&g.on(y)?, None)?;
    let eps = dy.model().epsilon;
    if eps == 0.0 || y.len() < 2 {
        return Ok(out);
    }
    let factor = match counting {
        BipartitionCounting::Unordered => eps,
        BipartitionCounting::Ordered => 2.0 * eps,
    };
    let none = LabelSet::empty();
    for (x1, x2) in enumerate_bipartitions(y, &none, &none)? {
        let prod = g.product_on(&[x1.clone(), x2.clone()], y)?;
        for i1 in x1.iter() {
            for i2 in x2.iter() {
                out.axpy(C64::new(factor, 0.0), &dy.generator_apply(&prod, Some((i1, i2)))?)?;
            }
        }
    }
    Ok(out)
}

/// Central-difference residual of the von Neumann hierarchy on the exact
/// solution.
pub fn vn_hierarchy_residual(dy: &Dynamics, t: f64, y: &LabelSet, g0: &CorrelationSequence, cfg: &SeriesConfig) -> Result<f64> {
    vn_residual_with_counting(dy, t, y, g0, cfg, BipartitionCounting::Unordered)
}

pub fn vn_residual_with_counting(
    dy: &Dynamics,
    t: f64,
    y: &LabelSet,
    g0: &CorrelationSequence,
    cfg: &SeriesConfig,
    counting: BipartitionCounting,
) -> Result<f64> {
    let h = cfg.fd_step;
    let plus = von_neumann_solve(dy, t + h, y, g0)?;
    let minus = von_neumann_solve(dy, t - h, y, g0)?;
    let fd = plus.sub(&minus)?.scale_real(0.5 / h);
    let mut gt = CorrelationSequence::new(dy.dim());
    for s in 1..=y.len() {
        gt.insert(&von_neumann_solve(dy, t, &LabelSet::range(1, s), g0)?)?;
    }
    let rhs = generator_with_counting(dy, y, &gt, counting)?;
    fd.distance(&rhs)
}

/// Which evaluator computes the nonlinear groups in a series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupRoute {
    /// Literal partition sum over cumulants of groups.
    Literal,
    /// Evolve the density sequence, then Möbius-invert.
    Density,
}

/// `G_s(t) = Σ_{n≤n_max} (1/n!) Tr_{s+1,…,s+n} 𝒢(t;1,…,s+n|g(0))`.
pub fn marginal_series_from_vn(
    dy: &Dynamics,
    t: f64,
    s: usize,
    g0: &CorrelationSequence,
    cfg: &SeriesConfig,
    route: GroupRoute,
) -> Result<SeriesResult> {
    let mut terms = Vec::new();
    for n in 0..=cfg.n_max {
        let z = LabelSet::range(1, s + n);
        let grp = match route {
            GroupRoute::Literal => nonlinear_group_apply(dy, t, &z, g0)?,
            GroupRoute::Density => nonlinear_group_density(dy, t, &z, g0)?,
        };
        terms.push(grp.partial_trace(&fresh(s, n))?.scale_real(1.0 / factorial(n)));
    }
    SeriesResult::from_terms(terms)
}

/// `G_s(t) = Σ_{n≤n_max} (1/n!) Tr_{s+1,…,s+n} 𝔄_{1+n}(t;{Y},s+1,…,s+n|G(0))`.
pub fn marginal_series_cumulant(dy: &Dynamics, t: f64, s: usize, big_g0: &CorrelationSequence, cfg: &SeriesConfig) -> Result<SeriesResult> {
    let y = LabelSet::range(1, s);
    let mut terms = Vec::new();
    for n in 0..=cfg.n_max {
        let extra = fresh(s, n);
        let a = nonlinear_cumulant(dy, t, &y, &extra, big_g0)?;
        terms.push(a.partial_trace(&extra)?.scale_real(1.0 / factorial(n)));
    }
    SeriesResult::from_terms(terms)
}

/// The sequence `(G_1(t), …, G_max(t))` from the cumulant series, each
/// truncated at `n_max`.
pub fn marginal_sequence(dy: &Dynamics, t: f64, max: usize, big_g0: &CorrelationSequence, n_max: usize) -> Result<CorrelationSequence> {
    let cfg = SeriesConfig { n_max, ..SeriesConfig::default() };
    let mut out = CorrelationSequence::new(dy.dim()).with_scalar(C64::new(1.0, 0.0));
    for s in 1..=max {
        out.insert(&marginal_series_cumulant(dy, t, s, big_g0, &cfg)?.value)?;
    }
    Ok(out)
}

/// `g_s⁰ = Σ_{n≤n_max} ((−1)ⁿ/n!) Tr_{s+1,…,s+n} G⁰_{s+n}`; orders beyond
/// the stored components are skipped.
pub fn correlations_from_marginals(big_g0: &CorrelationSequence, s: usize, n_max: usize) -> Result<LabeledOperator> {
    let mut acc = big_g0.component(s)?;
    for n in 1..=n_max {
        if !big_g0.has(s + n) {
            break;
        }
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let tr = big_g0.component(s + n)?.partial_trace(&fresh(s, n))?;
        acc.axpy(C64::new(sign / factorial(n), 0.0), &tr)?;
    }
    Ok(acc)
}

/// Initial correlation sequence `g(0)` from marginal correlations, using
/// every stored component.
pub fn correlation_sequence_from_marginals(big_g0: &CorrelationSequence) -> Result<CorrelationSequence> {
    let max = big_g0.max_order();
    let mut out = CorrelationSequence::new(big_g0.dim());
    for s in 1..=max {
        out.insert(&correlations_from_marginals(big_g0, s, max - s)?)?;
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransformDirection {
    /// Correlations to densities: `F_s = Σ_P Π G_{|X|}`.
    ToDensities,
    /// Densities to correlations (Möbius inversion).
    ToCorrelations,
}

pub fn density_correlation_transform(seq: &CorrelationSequence, direction: TransformDirection, max_order: usize) -> Result<CorrelationSequence> {
    match direction {
        TransformDirection::ToDensities => densities_from_correlations(seq, max_order),
        TransformDirection::ToCorrelations => correlations_from_densities(seq, max_order),
    }
}

/// `F_s(t) = Σ_{n≤n_max} (1/n!) Tr 𝔄_{1+n}(t;{Y},s+1,…,s+n) Π F₁⁰(i)`.
pub fn marginal_density_series(dy: &Dynamics, t: f64, s: usize, f1: &LabeledOperator, cfg: &SeriesConfig) -> Result<SeriesResult> {
    let y = LabelSet::range(1, s);
    let mut terms = Vec::new();
    for n in 0..=cfg.n_max {
        let z = LabelSet::range(1, s + n);
        let singles: Vec<LabelSet> = z.iter().map(LabelSet::singleton).collect();
        let ops = singles.iter().map(|b| f1.relabel(b.clone())).collect::<Result<Vec<_>>>()?;
        let refs: Vec<&LabeledOperator> = ops.iter().collect();
        let prod = LabeledOperator::tensor_all(&refs, &z, dy.dim())?;
        let mut elements = vec![y.clone()];
        elements.extend(fresh(s, n).iter().map(LabelSet::singleton));
        let idx: Vec<usize> = (0..elements.len()).collect();
        let mut a = LabeledOperator::zeros(z.clone(), dy.dim());
        for p in set_partitions(&idx) {
            let blocks: Vec<LabelSet> = p
                .iter()
                .map(|blk| LabelSet::new(blk.iter().flat_map(|&i| elements[i].iter()).collect()).unwrap())
                .collect();
            let w = crate::partitions::mobius_weight(p.len())? as f64;
            a.axpy(C64::new(w, 0.0), &conj_blocks(dy, t, &blocks, &prod)?)?;
        }
        terms.push(a.partial_trace(&fresh(s, n))?.scale_real(1.0 / factorial(n)));
    }
    SeriesResult::from_terms(terms)
}

/// Right-hand side of the nonlinear BBGKY hierarchy for `G_s`:
/// `𝒩(Y|G) + ε Tr_{s+1} Σ_{i∈Y} N*_int(i,s+1)(G_{s+1} + Σ G(X₁)G(X₂))`,
/// the inner sum over bipartitions of `(Y,s+1)` with `i∈X₁`, `s+1∈X₂`.
pub fn bbgky_rhs(dy: &Dynamics, s: usize, g: &CorrelationSequence) -> Result<LabeledOperator> {
    let y = LabelSet::range(1, s);
    let mut out = von_neumann_generator_apply(dy, &y, g)?;
    let eps = dy.model().epsilon;
    if eps == 0.0 {
        return Ok(out);
    }
    let next = s as Label + 1;
    let ys = LabelSet::range(1, s + 1);
    let tr = LabelSet::singleton(next);
    let g_next = g.on(&ys)?;
    for i in y.iter() {
        let mut inner = g_next.clone();
        for (x1, x2) in enumerate_bipartitions(&ys, &LabelSet::singleton(i), &tr)? {
            inner.add_assign(&g.product_on(&[x1, x2], &ys)?)?;
        }
        let coll = dy.generator_apply(&inner, Some((i, next)))?.partial_trace(&tr)?;
        out.axpy(C64::new(eps, 0.0), &coll)?;
    }
    Ok(out)
}

/// Residual of the nonlinear BBGKY hierarchy on the cumulant series
/// truncated at `cfg.n_max`, with the fourth-order central difference (the
/// truncation error must stay visible below the `h²` floor); `G_{s+1}` on the right-hand
/// side is truncated one order lower, which is the order that contributes
/// to the derivative of the truncated `G_s`.
pub fn bbgky_residual(dy: &Dynamics, t: f64, s: usize, big_g0: &CorrelationSequence, cfg: &SeriesConfig) -> Result<f64> {
    let at = |dt: f64| marginal_series_cumulant(dy, t + dt, s, big_g0, cfg).map(|r| r.value);
    let fd = central_derivative(at, cfg.fd_step)?;
    let mut g = marginal_sequence(dy, t, s, big_g0, cfg.n_max)?;
    let lower = cfg.n_max.saturating_sub(1);
    g.insert(&marginal_series_cumulant(dy, t, s + 1, big_g0, &cfg.with_n_max(lower))?.value)?;
    fd.distance(&bbgky_rhs(dy, s, &g)?)
}

/// Fourth-order central difference `(−f(2h) + 8f(h) − 8f(−h) + f(−2h)) / 12h`.
pub fn central_derivative(mut f: impl FnMut(f64) -> Result<LabeledOperator>, h: f64) -> Result<LabeledOperator> {
    let (p2, p1, m1, m2) = (f(2.0 * h)?, f(h)?, f(-h)?, f(-2.0 * h)?);
    let mut acc = p1.sub(&m1)?.scale_real(8.0);
    acc.axpy(C64::new(-1.0, 0.0), &p2)?;
    acc.add_assign(&m2)?;
    Ok(acc.scale_real(1.0 / (12.0 * h)))
}

/// `c = e³ max(1, max_k ‖f_k‖₁)` over orders `k ≤ s`.
pub fn estimate_constant(f: &CorrelationSequence, s: usize) -> f64 {
    let m = f.orders().filter(|&k| k <= s).map(|k| f.component(k).unwrap().trace_norm()).fold(1.0, f64::max);
    3f64.exp() * m
}

/// `s! e^{2s} cˢ`, the bound on `‖𝒢(t;1,…,s|f)‖₁`.
pub fn group_norm_bound(f: &CorrelationSequence, s: usize) -> f64 {
    factorial(s) * (2.0 * s as f64).exp() * estimate_constant(f, s).powi(s as i32)
}

/// `s!(2e²)ˢ cˢ (2e²c)ⁿ`, the bound on the `n`th term of the marginal series.
pub fn series_term_bound(f: &CorrelationSequence, s: usize, n: usize) -> f64 {
    let c = estimate_constant(f, s + n);
    let a = 2.0 * 2f64.exp();
    factorial(s) * (a * c).powi(s as i32) * (a * c).powi(n as i32)
}

/// `|P|! e^{|P|}`, the bound on the norm of a cumulant of groups.
pub fn cumulant_norm_bound(blocks: usize) -> f64 {
    factorial(blocks) * (blocks as f64).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::ModelSpec;
    use crate::random::Rng;

    fn dyn_(eps: f64) -> Dynamics {
        Dynamics::new(ModelSpec::default_test(23, eps))
    }

    fn data(seed: u64, max: usize, delta: f64) -> CorrelationSequence {
        let mut rng = Rng::seeded(seed);
        let mut seq = CorrelationSequence::new(2);
        for s in 1..=max {
            seq.insert(&rng.symmetric_hermitian(LabelSet::range(1, s), 2, delta.powi(s as i32))).unwrap();
        }
        seq
    }

    #[test]
    fn solve_at_zero_and_chaos() {
        let dy = dyn_(0.8);
        let g0 = data(1, 3, 0.5);
        let y = LabelSet::range(1, 3);
        assert!(von_neumann_solve(&dy, 0.0, &y, &g0).unwrap().distance(&g0.on(&y).unwrap()).unwrap() < 1e-13);
        let g1 = g0.component(1).unwrap();
        let chaos = CorrelationSequence::chaos(&g1, 3).unwrap();
        let prod = chaos.product_on(&[LabelSet::singleton(1), LabelSet::singleton(2), LabelSet::singleton(3)], &y).unwrap();
        let a3 = crate::cumulants::cumulant_plain(&dy, 0.4, &prod).unwrap();
        assert!(von_neumann_solve(&dy, 0.4, &y, &chaos).unwrap().distance(&a3).unwrap() < 1e-12);
    }

    #[test]
    fn generator_small_cases() {
        let dy = dyn_(0.6);
        let g = data(2, 3, 0.7);
        let y1 = LabelSet::range(1, 1);
        let n1 = von_neumann_generator_apply(&dy, &y1, &g).unwrap();
        assert!(n1.distance(&dy.generator_apply(&g.on(&y1).unwrap(), None).unwrap()).unwrap() < 1e-15);
        let y2 = LabelSet::range(1, 2);
        let prod = g.product_on(&[LabelSet::singleton(1), LabelSet::singleton(2)], &y2).unwrap();
        let hand = dy
            .generator_apply(&g.on(&y2).unwrap(), None)
            .unwrap()
            .add(&dy.generator_apply(&prod, Some((1, 2))).unwrap().scale_real(0.6))
            .unwrap();
        assert!(von_neumann_generator_apply(&dy, &y2, &g).unwrap().distance(&hand).unwrap() < 1e-14);
    }

    #[test]
    fn generator_three_particles_exhaustive() {
        let dy = dyn_(0.6);
        let g = data(3, 3, 0.7);
        let y = LabelSet::range(1, 3);
        let mut oracle = dy.generator_apply(&g.on(&y).unwrap(), None).unwrap();
        for p in set_partitions(y.as_slice()).into_iter().map(crate::sequence::to_sets).filter(|p| p.len() == 2) {
            let prod = g.product_on(&p, &y).unwrap();
            for i1 in p[0].iter() {
                for i2 in p[1].iter() {
                    oracle.axpy(C64::new(0.6, 0.0), &dy.generator_apply(&prod, Some((i1, i2))).unwrap()).unwrap();
                }
            }
        }
        assert!(von_neumann_generator_apply(&dy, &y, &g).unwrap().distance(&oracle).unwrap() < 1e-13);
    }

    #[test]
    fn residual_pins_unordered_counting() {
        let dy = dyn_(0.8);
        let g0 = data(4, 2, 0.6);
        let cfg = SeriesConfig::default();
        let y = LabelSet::range(1, 2);
        assert!(vn_hierarchy_residual(&dy, 0.3, &y, &g0, &cfg).unwrap() < 1e-4);
        assert!(vn_residual_with_counting(&dy, 0.3, &y, &g0, &cfg, BipartitionCounting::Ordered).unwrap() > 1e-3);
    }

    #[test]
    fn series_exact_at_zero() {
        let dy = dyn_(0.5);
        let g0 = data(5, 3, 0.3);
        let cfg = SeriesConfig::default().with_n_max(0);
        let a = marginal_series_cumulant(&dy, 0.0, 2, &g0, &cfg).unwrap().value;
        assert!(a.distance(&g0.component(2).unwrap()).unwrap() < 1e-14);
        let b = marginal_series_from_vn(&dy, 0.0, 2, &g0, &cfg, GroupRoute::Literal).unwrap().value;
        assert!(b.distance(&g0.component(2).unwrap()).unwrap() < 1e-14);
        let f1 = g0.component(1).unwrap();
        let c = marginal_density_series(&dy, 0.0, 2, &f1, &cfg).unwrap().value;
        let prod = f1.tensor(&f1.relabel(LabelSet::singleton(2)).unwrap()).unwrap();
        assert!(c.distance(&prod).unwrap() < 1e-14);
    }

    #[test]
    fn marginal_series_is_self_adjoint_and_symmetric() {
        let dy = dyn_(0.5);
        let g0 = data(6, 5, 0.2);
        let cfg = SeriesConfig::default().with_n_max(2);
        let r = marginal_series_cumulant(&dy, 0.4, 2, &g0, &cfg).unwrap();
        assert!(r.value.hermiticity_defect() < 1e-11);
        assert!(r.value.is_symmetric(1e-11));
        assert_eq!(r.terms.len(), 3);
    }

    #[test]
    fn chaos_series_reduces_to_plain_cumulants() {
        let dy = dyn_(0.5);
        let g1 = data(7, 1, 0.2).component(1).unwrap();
        let chaos = CorrelationSequence::chaos(&g1, 4).unwrap();
        let cfg = SeriesConfig::default().with_n_max(2);
        let r = marginal_series_cumulant(&dy, 0.4, 2, &chaos, &cfg).unwrap().value;
        let mut hand = LabeledOperator::zeros(LabelSet::range(1, 2), 2);
        for n in 0..=2 {
            let z = LabelSet::range(1, 2 + n);
            let singles: Vec<LabelSet> = z.iter().map(LabelSet::singleton).collect();
            let prod = chaos.product_on(&singles, &z).unwrap();
            let a = crate::cumulants::cumulant_plain(&dy, 0.4, &prod).unwrap();
            hand.axpy(C64::new(1.0 / factorial(n), 0.0), &a.partial_trace(&fresh(2, n)).unwrap()).unwrap();
        }
        assert!(r.distance(&hand).unwrap() < 1e-12);
    }

    #[test]
    fn marginals_to_correlations() {
        let g1 = data(8, 1, 0.3);
        assert!(correlations_from_marginals(&g1, 1, 3).unwrap().distance(&g1.component(1).unwrap()).unwrap() < 1e-15);
        let g = data(9, 3, 0.3);
        let hand = g
            .component(1)
            .unwrap()
            .sub(&g.component(2).unwrap().partial_trace(&LabelSet::singleton(2)).unwrap())
            .unwrap()
            .add(&g.component(3).unwrap().partial_trace(&LabelSet::range(2, 2)).unwrap().scale_real(0.5))
            .unwrap();
        assert!(correlations_from_marginals(&g, 1, 2).unwrap().distance(&hand).unwrap() < 1e-15);
    }

    #[test]
    fn density_series_matches_cluster_transform_of_marginals() {
        // F₂ = G₂ + G₁G₁ for the chaos data, at matching truncation
        let dy = dyn_(0.4);
        let f1 = data(10, 1, 0.1).component(1).unwrap();
        let chaos = CorrelationSequence::chaos(&f1, 5).unwrap();
        let mut errs = Vec::new();
        for n_max in 1..=3 {
            let cfg = SeriesConfig::default().with_n_max(n_max);
            let f2 = marginal_density_series(&dy, 0.5, 2, &f1, &cfg).unwrap().value;
            let g = marginal_sequence(&dy, 0.5, 2, &chaos, n_max).unwrap();
            let f = densities_from_correlations(&g, 2).unwrap();
            errs.push(f2.distance(&f.component(2).unwrap()).unwrap());
        }
        assert!(errs[1] < errs[0] && errs[2] < errs[1], "{errs:?}");
    }

    #[test]
    fn bbgky_free_hierarchy() {
        let dy = dyn_(0.0);
        let g0 = data(11, 4, 0.05);
        let cfg = SeriesConfig::default().with_n_max(1);
        assert!(bbgky_residual(&dy, 0.2, 1, &g0, &cfg).unwrap() < 1e-5);
    }
}
