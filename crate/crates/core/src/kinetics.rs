//! Kinetic equations for the one-particle correlation operator: the Vlasov
//! and Hartree mean-field equations, the non-Markovian Vlasov-type equation
//! with initial correlations, and the generalized kinetic equation closed by
//! the correlation functional. Also the iterated (Duhamel) series of the
//! limit equations, the limit correlations and the residual of the limit
//! hierarchy they should satisfy.
//!
//! The limit equations carry no ε: it has been scaled out. Multiplication by
//! a correlation operator is the Jordan product, as in [`crate::functionals`].

use nalgebra::DVector;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{Dynamics, ModelSpec};
use crate::error::{domain, invalid, Result};
use crate::functionals::{correlation_functional, GuardStatus, InitialCorrelations, ScatteringMode};
use crate::hierarchy::central_derivative;
use crate::operator::{Label, LabelSet, LabeledOperator};
use crate::partitions::enumerate_bipartitions;
use crate::sequence::{densities_from_correlations, CorrelationSequence};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Default RK4 step.
pub const DEFAULT_DT: f64 = 1e-3;

/// One point of a trajectory.
#[derive(Clone, Debug)]
pub struct KineticState {
    pub t: f64,
    pub g1: LabeledOperator,
}

impl KineticState {
    pub fn trace(&self) -> C64 {
        self.g1.trace()
    }

    /// `Tr g₁²`.
    pub fn purity(&self) -> f64 {
        self.g1.mul(&self.g1).map(|m| m.trace().re).unwrap_or(f64::NAN)
    }
}

/// Output times and the fixed RK4 step. Each output interval is covered by
/// equal steps no longer than `dt`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub times: Vec<f64>,
    pub dt: f64,
}

impl TimeGrid {
    /// `n_out + 1` equally spaced times on `[0, t_end]`.
    pub fn uniform(t_end: f64, n_out: usize, dt: f64) -> Self {
        let n = n_out.max(1);
        Self { times: (0..=n).map(|k| t_end * k as f64 / n as f64).collect(), dt }
    }

    pub fn validate(&self) -> Result<()> {
        if self.times.is_empty() {
            return invalid("time grid is empty");
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return invalid("step must be positive");
        }
        if self.times.windows(2).any(|w| !(w[1] >= w[0])) {
            return invalid("time grid must be nondecreasing");
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub states: Vec<KineticState>,
    /// Richardson estimate of the local error of the first step
    /// (one step against two half steps).
    pub step_error: f64,
    /// Set by integrators with a convergence premise on the data.
    pub guard: Option<GuardStatus>,
}

impl Trajectory {
    pub fn last(&self) -> &KineticState {
        self.states.last().expect("trajectory has the initial state")
    }

    /// `max_t |Tr g₁(t) − Tr g₁(0)|`.
    pub fn trace_drift(&self) -> f64 {
        let t0 = self.states[0].trace();
        self.states.iter().map(|s| (s.trace() - t0).norm()).fold(0.0, f64::max)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.states.iter().map(|s| s.g1.hermiticity_defect()).fold(0.0, f64::max)
    }

    pub fn purity_drift(&self) -> f64 {
        let p0 = self.states[0].purity();
        self.states.iter().map(|s| (s.purity() - p0).abs()).fold(0.0, f64::max)
    }

    /// `g₁` at a grid time (within `1e-12`).
    pub fn at(&self, t: f64) -> Option<&LabeledOperator> {
        self.states.iter().find(|s| (s.t - t).abs() < 1e-12).map(|s| &s.g1)
    }

    /// Rows `t, Re/Im entries of g₁ (row major), Re trace, purity`.
    pub fn csv_rows(&self) -> (Vec<String>, Vec<Vec<f64>>) {
        let d = self.states.first().map(|s| s.g1.dim()).unwrap_or(0);
        let mut header = vec!["t".to_string()];
        for r in 0..d {
            for c in 0..d {
                header.push(format!("re_{r}{c}"));
                header.push(format!("im_{r}{c}"));
            }
        }
        header.push("trace".into());
        header.push("purity".into());
        let rows = self
            .states
            .iter()
            .map(|s| {
                let mut row = vec![s.t];
                for r in 0..d {
                    for c in 0..d {
                        let z = s.g1.matrix()[(r, c)];
                        row.push(z.re);
                        row.push(z.im);
                    }
                }
                row.push(s.trace().re);
                row.push(s.purity());
                row
            })
            .collect();
        (header, rows)
    }
}

/// States the RK4 stepper can combine.
trait Linear: Clone {
    /// `self + c·other`.
    fn plus(&self, c: f64, other: &Self) -> Self;
    fn dist(&self, other: &Self) -> f64;
}

impl Linear for LabeledOperator {
    fn plus(&self, c: f64, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(C64::new(c, 0.0), other).expect("same labels");
        out
    }

    fn dist(&self, other: &Self) -> f64 {
        self.distance(other).unwrap_or(f64::INFINITY)
    }
}

impl Linear for DVector<C64> {
    fn plus(&self, c: f64, other: &Self) -> Self {
        self + other * C64::new(c, 0.0)
    }

    fn dist(&self, other: &Self) -> f64 {
        (self - other).norm()
    }
}

fn rk4_step<S: Linear>(y: &S, t: f64, h: f64, rhs: &impl Fn(f64, &S) -> Result<S>) -> Result<S> {
    let k1 = rhs(t, y)?;
    let k2 = rhs(t + 0.5 * h, &y.plus(0.5 * h, &k1))?;
    let k3 = rhs(t + 0.5 * h, &y.plus(0.5 * h, &k2))?;
    let k4 = rhs(t + h, &y.plus(h, &k3))?;
    Ok(y.plus(h / 6.0, &k1).plus(h / 3.0, &k2).plus(h / 3.0, &k3).plus(h / 6.0, &k4))
}

/// Fixed-step RK4 over the grid; returns the states at the grid times and
/// the Richardson estimate of the first step.
fn integrate<S: Linear>(y0: S, grid: &TimeGrid, rhs: impl Fn(f64, &S) -> Result<S>) -> Result<(Vec<(f64, S)>, f64)> {
    grid.validate()?;
    let t0 = grid.times[0];
    let h0 = grid.dt;
    let one = rk4_step(&y0, t0, h0, &rhs)?;
    let half = rk4_step(&y0, t0, 0.5 * h0, &rhs)?;
    let two = rk4_step(&half, t0 + 0.5 * h0, 0.5 * h0, &rhs)?;
    let step_error = one.dist(&two) * 16.0 / 15.0;

    let mut out = vec![(t0, y0.clone())];
    let mut y = y0;
    for w in grid.times.windows(2) {
        let span = w[1] - w[0];
        let steps = (span / grid.dt - 1e-9).ceil().max(0.0) as usize;
        let h = if steps > 0 { span / steps as f64 } else { 0.0 };
        for k in 0..steps {
            y = rk4_step(&y, w[0] + k as f64 * h, h, &rhs)?;
        }
        out.push((w[1], y.clone()));
    }
    Ok((out, step_error))
}

fn trajectory(states: Vec<(f64, LabeledOperator)>, step_error: f64, guard: Option<GuardStatus>) -> Trajectory {
    Trajectory { states: states.into_iter().map(|(t, g1)| KineticState { t, g1 }).collect(), step_error, guard }
}

fn check_one_particle(g1: &LabeledOperator, d: usize) -> Result<LabeledOperator> {
    if g1.labels().len() != 1 || g1.dim() != d {
        return invalid("expected a one-particle operator of the model dimension");
    }
    if !g1.is_hermitian(1e-10 * (1.0 + g1.max_abs())) {
        return domain("one-particle operator is not Hermitian");
    }
    g1.relabel(LabelSet::singleton(1))
}

/// Mean-field potential `U(g) = Tr₂ Φ(I ⊗ g)`.
pub fn mean_field_potential(model: &ModelSpec, g1: &LabeledOperator) -> Result<LabeledOperator> {
    let pair = LabelSet::range(1, 2);
    let g = g1.relabel(LabelSet::singleton(2))?.embed(&pair)?;
    model.potential_op(1, 2).mul(&g)?.partial_trace(&LabelSet::singleton(2))
}

/// `−i[K + U(g₁), g₁]`, which equals `N*(1)g₁ + Tr₂ N*_int(1,2) g₁g₁`.
pub fn vlasov_rhs(model: &ModelSpec, g1: &LabeledOperator) -> Result<LabeledOperator> {
    let h = model.kinetic_op(1).add(&mean_field_potential(model, g1)?)?;
    Ok(h.commutator(g1)?.scale(-I))
}

/// `Tr₂ (−i[Φ(1,2), x])` for a two-particle operator `x`.
fn collision(model: &ModelSpec, x: &LabeledOperator) -> Result<LabeledOperator> {
    model.potential_op(1, 2).commutator(x)?.scale(-I).partial_trace(&LabelSet::singleton(2))
}

fn pair_product(g1: &LabeledOperator) -> Result<LabeledOperator> {
    g1.tensor(&g1.relabel(LabelSet::singleton(2))?)
}

/// `e^{−itK}` on each particle of `labels`.
fn free_product_unitary(model: &ModelSpec, t: f64, labels: &LabelSet) -> Result<LabeledOperator> {
    let eig = model.kinetic.clone().symmetric_eigen();
    let mut vd = eig.eigenvectors.clone();
    for (c, mut col) in vd.column_iter_mut().enumerate() {
        col *= (-I * t * eig.eigenvalues[c]).exp();
    }
    let u1 = vd * eig.eigenvectors.adjoint();
    let mut u = LabeledOperator::scalar(C64::new(1.0, 0.0), model.dim);
    for j in labels.iter() {
        u = u.tensor(&LabeledOperator::new(LabelSet::singleton(j), model.dim, u1.clone())?)?;
    }
    Ok(u)
}

/// `ΠG*₁(t) g ΠG*₁(−t)`: free transport of a correlation operator.
pub fn free_transport(model: &ModelSpec, t: f64, g: &LabeledOperator) -> Result<LabeledOperator> {
    free_product_unitary(model, t, g.labels())?.conjugate(g)
}

/// Right-hand side of the Vlasov-type equation with initial correlations:
/// `N*(1)g₁ + Tr₂ N*_int(1,2) (W(t) + 1)∘(g₁ ⊗ g₁)`, `W(t)` the free
/// transport of `g₂`.
pub fn vlasov_correlated_rhs(model: &ModelSpec, t: f64, g2: &LabeledOperator, g1: &LabeledOperator) -> Result<LabeledOperator> {
    let free = model.kinetic_op(1).commutator(g1)?.scale(-I);
    let prod = pair_product(g1)?;
    let w = free_transport(model, t, g2)?;
    let x = prod.add(&w.jordan(&prod)?)?;
    free.add(&collision(model, &x)?)
}

pub fn vlasov_integrate(model: &ModelSpec, g1_0: &LabeledOperator, grid: &TimeGrid) -> Result<Trajectory> {
    let g = check_one_particle(g1_0, model.dim)?;
    let (states, err) = integrate(g, grid, |_, y: &LabeledOperator| vlasov_rhs(model, y))?;
    Ok(trajectory(states, err, None))
}

/// `i∂_tψ = (K + U(|ψ⟩⟨ψ|))ψ`.
pub fn hartree_evolve(model: &ModelSpec, psi0: &DVector<C64>, grid: &TimeGrid) -> Result<Vec<(f64, DVector<C64>)>> {
    if psi0.len() != model.dim {
        return invalid("state vector has the wrong dimension");
    }
    if (psi0.norm() - 1.0).abs() > 1e-10 {
        return domain("initial state must be normalized");
    }
    let rhs = |_: f64, psi: &DVector<C64>| -> Result<DVector<C64>> {
        let rho = LabeledOperator::new(LabelSet::singleton(1), model.dim, psi * psi.adjoint())?;
        let u = mean_field_potential(model, &rho)?;
        Ok((&model.kinetic + u.matrix()) * psi * (-I))
    };
    Ok(integrate(psi0.clone(), grid, rhs)?.0)
}

/// Projector `|ψ⟩⟨ψ|` on particle 1.
pub fn pure_state(model: &ModelSpec, psi: &DVector<C64>) -> Result<LabeledOperator> {
    LabeledOperator::new(LabelSet::singleton(1), model.dim, psi * psi.adjoint())
}

pub fn vlasov_correlated_integrate(
    model: &ModelSpec,
    g1_0: &LabeledOperator,
    g2: &LabeledOperator,
    grid: &TimeGrid,
) -> Result<Trajectory> {
    let g = check_one_particle(g1_0, model.dim)?;
    if g2.labels().len() != 2 || !g2.is_hermitian(1e-10 * (1.0 + g2.max_abs())) || !g2.is_symmetric(1e-10 * (1.0 + g2.max_abs())) {
        return domain("pair correlation must be a Hermitian symmetric two-particle operator");
    }
    let g2 = g2.relabel(LabelSet::range(1, 2))?;
    let (states, err) = integrate(g, grid, |t, y: &LabeledOperator| vlasov_correlated_rhs(model, t, &g2, y))?;
    Ok(trajectory(states, err, None))
}

/// Closure settings of the generalized kinetic equation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosureConfig {
    /// Truncation of the correlation functional.
    pub n_max: usize,
    pub mode: ScatteringMode,
}

impl Default for ClosureConfig {
    fn default() -> Self {
        Self { n_max: 1, mode: ScatteringMode::Cumulant }
    }
}

/// `(e(1 + e⁹))⁻¹`, the recommended bound on `‖G₁⁰‖₁`.
pub fn generalized_guard() -> f64 {
    1.0 / (std::f64::consts::E * (1.0 + 9f64.exp()))
}

/// Right-hand side `N*G₁ + ε Tr₂ N*_int (G₁G₁ + G₂(t | G₁))`.
pub fn generalized_rhs(
    dy: &Dynamics,
    t: f64,
    g1: &LabeledOperator,
    corr: &InitialCorrelations,
    cfg: &ClosureConfig,
) -> Result<LabeledOperator> {
    let model = dy.model();
    let free = model.kinetic_op(1).commutator(g1)?.scale(-I);
    let mut x = pair_product(g1)?;
    x.add_assign(&correlation_functional(dy, t, 2, g1, corr, cfg.n_max, cfg.mode)?.value)?;
    let mut out = free;
    out.axpy(C64::new(model.epsilon, 0.0), &collision(model, &x)?)?;
    Ok(out)
}

pub fn generalized_kinetic_integrate(
    dy: &Dynamics,
    g1_0: &LabeledOperator,
    corr: &InitialCorrelations,
    grid: &TimeGrid,
    cfg: &ClosureConfig,
) -> Result<Trajectory> {
    let g = check_one_particle(g1_0, dy.dim())?;
    let guard = if g.trace_norm() < generalized_guard() { GuardStatus::Within } else { GuardStatus::Violated };
    let (states, err) = integrate(g, grid, |t, y: &LabeledOperator| generalized_rhs(dy, t, y, corr, cfg))?;
    Ok(trajectory(states, err, Some(guard)))
}

/// `(2‖Φ‖ ‖g₁⁰‖₁)⁻¹`, the time below which the iterated series converges.
pub fn series_time_bound(model: &ModelSpec, g1_0: &LabeledOperator) -> f64 {
    1.0 / (2.0 * model.potential_norm() * g1_0.trace_norm())
}

#[derive(Clone, Debug)]
pub struct IteratedSeries {
    pub value: LabeledOperator,
    /// Trace norm of each term `n = 0, …, n_max`.
    pub term_norms: Vec<f64>,
    pub t0: f64,
    pub guard: GuardStatus,
}

/// Nodes and weights of the 8-point Gauss–Legendre rule on `[0, 1]`.
fn unit_rule() -> Vec<(f64, f64)> {
    let rule = gauss_quad::legendre::GaussLegendre::new(8.try_into().expect("nonzero"));
    rule.as_node_weight_pairs().iter().map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w)).collect()
}

/// `−i[Φ(k, m+1), x]` summed over `k = 1, …, m`, then traced over `m+1`.
fn attach_and_trace(model: &ModelSpec, m: usize, x: &LabeledOperator) -> Result<LabeledOperator> {
    let last = m as Label + 1;
    let mut acc = LabeledOperator::zeros(x.labels().clone(), model.dim);
    for k in 1..=m as Label {
        let phi = model.potential_op(k, last).embed(x.labels())?;
        acc.axpy(-I, &phi.commutator(x)?)?;
    }
    acc.partial_trace(&LabelSet::singleton(last))
}

/// The `n`th iterated collision integrand at times `t > t₁ > … > t_n`.
fn iterated_integrand(model: &ModelSpec, t: f64, times: &[f64], initial: &LabeledOperator) -> Result<LabeledOperator> {
    let n = times.len();
    let t_in = times.last().copied().unwrap_or(t);
    let mut x = free_transport(model, t_in, initial)?;
    for m in (1..=n).rev() {
        x = attach_and_trace(model, m, &x)?;
        let upper = if m >= 2 { times[m - 2] } else { t };
        x = free_transport(model, upper - times[m - 1], &x)?;
    }
    Ok(x)
}

/// The `n`th iterated collision term applied to an operator on `1, …, n+1`.
pub fn iterated_term(model: &ModelSpec, t: f64, n: usize, initial: &LabeledOperator) -> Result<LabeledOperator> {
    if initial.labels() != &LabelSet::range(1, n + 1) {
        return domain("initial operator must act on 1, …, n+1");
    }
    simplex_integral(model, t, n, initial, &unit_rule())
}

fn simplex_integral(model: &ModelSpec, t: f64, n: usize, initial: &LabeledOperator, rule: &[(f64, f64)]) -> Result<LabeledOperator> {
    let mut term = LabeledOperator::zeros(LabelSet::singleton(1), model.dim);
    let mut idx = vec![0usize; n];
    loop {
        let mut times = Vec::with_capacity(n);
        let mut weight = 1.0;
        let mut upper = t;
        for &i in &idx {
            let (u, w) = rule[i];
            weight *= w * upper;
            upper *= u;
            times.push(upper);
        }
        term.axpy(C64::new(weight, 0.0), &iterated_integrand(model, t, &times, initial)?)?;
        // next multi-index
        let mut k = 0;
        while k < n {
            idx[k] += 1;
            if idx[k] < rule.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == n {
            return Ok(term);
        }
    }
}

/// Iterated (Duhamel) series of the limit one-particle operator, `n ≤ n_max`
/// collisions. Without correlations the initial factor is `Π g₁⁰`; with
/// correlations it is `Σ_P Π_{X∈P} g_{|X|}(X) ∘ Π g₁⁰` (`g₁ = I`). Each
/// simplex `t > t₁ > … > t_n > 0` is integrated with a tensorized 8-point
/// Gauss–Legendre rule after the map `t_k = t_{k−1} u_k`.
pub fn iterated_series_g1(
    model: &ModelSpec,
    g1_0: &LabeledOperator,
    corr: Option<&InitialCorrelations>,
    t: f64,
    n_max: usize,
) -> Result<IteratedSeries> {
    let g1 = check_one_particle(g1_0, model.dim)?;
    if t < 0.0 {
        return domain("series time must be nonnegative");
    }
    model.check_cap(n_max + 1)?;
    let none = InitialCorrelations::none();
    let data = crate::functionals::correlated_initial_marginals(&g1, corr.unwrap_or(&none), n_max + 1)?;
    let dens = densities_from_correlations(&data, n_max + 1)?;
    let rule = unit_rule();
    let t0 = series_time_bound(model, &g1);
    let mut value = LabeledOperator::zeros(LabelSet::singleton(1), model.dim);
    let mut term_norms = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let term = simplex_integral(model, t, n, &dens.component(n + 1)?, &rule)?;
        term_norms.push(term.trace_norm());
        value.add_assign(&term)?;
    }
    let guard = if t < t0 { GuardStatus::Within } else { GuardStatus::Violated };
    Ok(IteratedSeries { value, term_norms, t0, guard })
}

/// `g_s(t) = W_s(t) ∘ Π_j g₁(t,j)`, `W_s(t)` the free transport of the limit
/// initial correlation `g_s`. Without `g_s` the correlation is zero; passing
/// the identity gives the product `Π g₁(t)`.
pub fn limit_correlations(
    model: &ModelSpec,
    t: f64,
    s: usize,
    g_s: Option<&LabeledOperator>,
    g1_t: &LabeledOperator,
) -> Result<LabeledOperator> {
    let y = LabelSet::range(1, s);
    let Some(g) = g_s else {
        return Ok(LabeledOperator::zeros(y, model.dim));
    };
    if g.labels().len() != s {
        return invalid("limit correlation has the wrong particle count");
    }
    let ops: Vec<LabeledOperator> = y.iter().map(|j| g1_t.relabel(LabelSet::singleton(j))).collect::<Result<_>>()?;
    let refs: Vec<&LabeledOperator> = ops.iter().collect();
    let prod = LabeledOperator::tensor_all(&refs, &y, model.dim)?;
    free_transport(model, t, &g.relabel(y)?)?.jordan(&prod)
}

/// Right-hand side of the limit hierarchy for `g_s`, given `g_k` on
/// `1, …, k` for `k ≤ s+1`:
/// `Σ_i N*(i)g_s + Tr_{s+1} Σ_i N*_int(i,s+1)(g_{s+1} + Σ g(X₁)g(X₂))`,
/// the inner sum over bipartitions of `(1,…,s+1)` with `i∈X₁`, `s+1∈X₂`.
pub fn vlasov_hierarchy_rhs(model: &ModelSpec, s: usize, g: &CorrelationSequence) -> Result<LabeledOperator> {
    let y = LabelSet::range(1, s);
    let gs = g.on(&y)?;
    let mut out = LabeledOperator::zeros(y.clone(), model.dim);
    for i in y.iter() {
        out.axpy(-I, &model.kinetic_op(i).embed(&y)?.commutator(&gs)?)?;
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
        let phi = model.potential_op(i, next).embed(&ys)?;
        out.axpy(-I, &phi.commutator(&inner)?.partial_trace(&tr)?)?;
    }
    Ok(out)
}

/// Fourth-order central-difference residual of the limit hierarchy at `t`.
/// `seq(τ)` must return `g_k(τ)` for `k ≤ s+1` at `τ ∈ {t, t±h, t±2h}`.
pub fn vlasov_hierarchy_residual(
    model: &ModelSpec,
    t: f64,
    s: usize,
    seq: impl Fn(f64) -> Result<CorrelationSequence>,
    h: f64,
) -> Result<f64> {
    if s == 0 {
        return domain("hierarchy starts at s = 1");
    }
    let y = LabelSet::range(1, s);
    let fd = central_derivative(|dt| seq(t + dt)?.on(&y), h)?;
    fd.distance(&vlasov_hierarchy_rhs(model, s, &seq(t)?)?)
}

/// The limit sequence `(g₁(τ), g₂(τ), …, g_max(τ))` on a trajectory of the
/// Vlasov-type equation with correlations `corr` (orders `≥ 2`).
pub fn limit_sequence(
    model: &ModelSpec,
    traj: &Trajectory,
    corr: &InitialCorrelations,
    tau: f64,
    max_order: usize,
) -> Result<CorrelationSequence> {
    let g1 = traj.at(tau).ok_or_else(|| crate::Error::Domain(format!("time {tau} is not on the trajectory grid")))?;
    let mut seq = CorrelationSequence::new(model.dim);
    seq.insert(g1)?;
    for k in 2..=max_order {
        seq.insert(&limit_correlations(model, tau, k, corr.get(k), g1)?)?;
    }
    Ok(seq)
}

/// Observed RK4 order: `log₂(‖y_h − y_{h/2}‖ / ‖y_{h/2} − y_{h/4}‖)` at `t_end`.
pub fn measured_order(mut run: impl FnMut(f64) -> Result<LabeledOperator>, h: f64) -> Result<f64> {
    let a = run(h)?;
    let b = run(0.5 * h)?;
    let c = run(0.25 * h)?;
    Ok((a.distance(&b)? / b.distance(&c)?).log2())
}
