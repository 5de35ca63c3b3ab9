//! Mean-field scaling experiments. The interaction carries the factor ε and
//! the one-particle data scale as `g₁⁰/ε`; by multilinearity the `n`th term
//! of `εˢG_s(t)` is `ε⁻ⁿ` times the term built from unscaled data, which is
//! how every term is evaluated here (the unscaled series need not converge
//! at small ε, the scaled terms stay finite).

use serde::{Deserialize, Serialize};

use crate::cumulants::{cumulant_plain, nonlinear_cumulant};
use crate::dynamics::{Dynamics, ModelSpec};
use crate::error::{domain, invalid, Result};
use crate::functionals::{correlated_initial_marginals, InitialCorrelations};
use crate::kinetics::{iterated_term, limit_correlations, vlasov_correlated_integrate, TimeGrid, DEFAULT_DT};
use crate::operator::{Label, LabelSet, LabeledOperator};
use crate::partitions::factorial;

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 3 {
        return invalid("slope fit needs at least three points");
    }
    if xs.iter().chain(ys).any(|&v| !(v > 0.0) || !v.is_finite()) {
        return domain("slope fit needs positive finite values");
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingTable {
    pub eps: Vec<f64>,
    pub values: Vec<f64>,
    /// Log-log slope of `values` against `eps`.
    pub slope: f64,
}

impl ScalingTable {
    fn fit(eps: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let slope = log_log_slope(&eps, &values)?;
        Ok(Self { eps, values, slope })
    }

    pub fn is_decreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] < w[0])
    }
}

fn check_eps(eps_list: &[f64]) -> Result<()> {
    if eps_list.iter().any(|&e| !(e > 0.0)) || eps_list.windows(2).any(|w| !(w[1] < w[0])) {
        return invalid("eps_list must be positive and decreasing");
    }
    Ok(())
}

/// `ε⁻ⁿ ‖𝔄_{s+n}(t) f‖₁` for each ε (interaction scaled by ε).
pub fn term_scaling_check(
    model: &ModelSpec,
    t: f64,
    s: usize,
    n: usize,
    f: &LabeledOperator,
    eps_list: &[f64],
) -> Result<ScalingTable> {
    check_eps(eps_list)?;
    if f.labels().len() != s + n {
        return invalid("f must act on s+n particles");
    }
    let values = eps_list
        .iter()
        .map(|&e| {
            let dy = Dynamics::new(model.with_epsilon(e));
            Ok(cumulant_plain(&dy, t, f)?.trace_norm() / e.powi(n as i32))
        })
        .collect::<Result<Vec<_>>>()?;
    ScalingTable::fit(eps_list.to_vec(), values)
}

/// `ε⁻¹ Tr₂ 𝔄₂(t) f` against the first iterated collision term on `f`.
pub fn first_term_deviation(model: &ModelSpec, t: f64, f: &LabeledOperator, eps: f64) -> Result<f64> {
    let f = f.relabel(LabelSet::range(1, 2))?;
    let dy = Dynamics::new(model.with_epsilon(eps));
    let scaled = cumulant_plain(&dy, t, &f)?.partial_trace(&LabelSet::singleton(2))?.scale_real(1.0 / eps);
    scaled.distance(&iterated_term(model, t, 1, &f)?)
}

fn product(g1: &LabeledOperator, n: usize) -> Result<LabeledOperator> {
    let z = LabelSet::range(1, n);
    let ops: Vec<LabeledOperator> = z.iter().map(|i| g1.relabel(LabelSet::singleton(i))).collect::<Result<_>>()?;
    let refs: Vec<&LabeledOperator> = ops.iter().collect();
    LabeledOperator::tensor_all(&refs, &z, g1.dim())
}

/// `εˢG_s(t)` truncated at `n_max` for chaos data `G₁^{0,ε} = g₁⁰/ε`:
/// `Σ_n ε⁻ⁿ/n! Tr 𝔄_{s+n}(t) Π g₁⁰`.
pub fn scaled_chaos_series(model: &ModelSpec, t: f64, s: usize, g1_0: &LabeledOperator, n_max: usize, eps: f64) -> Result<LabeledOperator> {
    let dy = Dynamics::new(model.with_epsilon(eps));
    let mut acc = LabeledOperator::zeros(LabelSet::range(1, s), model.dim);
    for n in 0..=n_max {
        let a = cumulant_plain(&dy, t, &product(g1_0, s + n)?)?;
        let term = a.partial_trace(&LabelSet::range(s as Label + 1, n))?;
        acc.axpy((1.0 / (factorial(n) * eps.powi(n as i32))).into(), &term)?;
    }
    Ok(acc)
}

/// Decay of `‖εˢG_s(t)‖₁` along `eps_list` for chaos data, `s ≥ 2`.
pub fn chaos_decay_check(
    model: &ModelSpec,
    t: f64,
    s: usize,
    g1_0: &LabeledOperator,
    n_max: usize,
    eps_list: &[f64],
) -> Result<ScalingTable> {
    if s < 2 {
        return domain("chaos decay concerns s ≥ 2");
    }
    check_eps(eps_list)?;
    let values = eps_list
        .iter()
        .map(|&e| Ok(scaled_chaos_series(model, t, s, g1_0, n_max, e)?.trace_norm()))
        .collect::<Result<Vec<_>>>()?;
    ScalingTable::fit(eps_list.to_vec(), values)
}

/// `εˢG_s(t)` truncated at `n_max` for data `G_n^{0,ε} = g_n∘Π g₁⁰/ε`.
pub fn scaled_correlation_series(
    model: &ModelSpec,
    t: f64,
    s: usize,
    g1_0: &LabeledOperator,
    corr: &InitialCorrelations,
    n_max: usize,
    eps: f64,
) -> Result<LabeledOperator> {
    let dy = Dynamics::new(model.with_epsilon(eps));
    let data = correlated_initial_marginals(g1_0, corr, s + n_max)?;
    let head = LabelSet::range(1, s);
    let mut acc = LabeledOperator::zeros(head.clone(), model.dim);
    for n in 0..=n_max {
        let extra = LabelSet::range(s as Label + 1, n);
        let term = nonlinear_cumulant(&dy, t, &head, &extra, &data)?.partial_trace(&extra)?;
        acc.axpy((1.0 / (factorial(n) * eps.powi(n as i32))).into(), &term)?;
    }
    Ok(acc)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepTable {
    pub s: usize,
    pub t: f64,
    pub n_max: usize,
    pub eps: Vec<f64>,
    /// `‖εˢG_s(t) − g_s(t)‖₁`.
    pub difference: Vec<f64>,
    /// Fitted rate; absent when some difference is not positive (exact
    /// agreement, as with free dynamics).
    pub rate: Option<f64>,
}

/// Compares the scaled, truncated `εˢG_s(t)` with the limit object: for
/// `s = 1` the solution of the Vlasov-type equation with correlations, for
/// `s ≥ 2` the limit correlation built on it.
pub fn meanfield_sweep(
    model: &ModelSpec,
    t: f64,
    s: usize,
    g1_0: &LabeledOperator,
    corr: &InitialCorrelations,
    eps_list: &[f64],
    n_max: usize,
) -> Result<SweepTable> {
    if s == 0 {
        return domain("sweep needs s ≥ 1");
    }
    check_eps(eps_list)?;
    let g1 = g1_0.relabel(LabelSet::singleton(1))?;
    let g2 = match corr.get(2) {
        Some(g) => g.clone(),
        None => LabeledOperator::zeros(LabelSet::range(1, 2), model.dim),
    };
    let traj = vlasov_correlated_integrate(model, &g1, &g2, &TimeGrid::uniform(t, 1, DEFAULT_DT))?;
    let g1_t = traj.last().g1.clone();
    let limit = if s == 1 { g1_t } else { limit_correlations(model, t, s, corr.get(s), &g1_t)? };
    let difference = eps_list
        .iter()
        .map(|&e| scaled_correlation_series(model, t, s, &g1, corr, n_max, e)?.distance(&limit))
        .collect::<Result<Vec<_>>>()?;
    let rate = log_log_slope(eps_list, &difference).ok();
    Ok(SweepTable { s, t, n_max, eps: eps_list.to_vec(), difference, rate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::Rng;

    fn model() -> ModelSpec {
        ModelSpec::default_test(21, 0.1)
    }

    fn density(seed: u64) -> LabeledOperator {
        LabeledOperator::new(LabelSet::singleton(1), 2, Rng::seeded(seed).density_matrix(2)).unwrap()
    }

    #[test]
    fn slope_of_power_law() {
        let xs = [1.0, 0.1, 0.01, 0.001];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(1.5)).collect();
        assert!((log_log_slope(&xs, &ys).unwrap() - 1.5).abs() < 1e-12);
        assert!(log_log_slope(&xs[..2], &ys[..2]).is_err());
        assert!(log_log_slope(&xs[..3], &[1.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn free_cumulants_vanish() {
        let dy = Dynamics::new(model().with_epsilon(0.0));
        let f = Rng::seeded(1).symmetric_hermitian(LabelSet::range(1, 3), 2, 1.0);
        assert!(cumulant_plain(&dy, 0.7, &f).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn perturbed_cumulant_scaling() {
        let f = Rng::seeded(2).symmetric_hermitian(LabelSet::range(1, 3), 2, 1.0);
        let table = term_scaling_check(&model(), 0.5, 2, 1, &f, &[1e-1, 1e-2, 1e-3]).unwrap();
        assert!((table.slope - 1.0).abs() < 0.1, "{table:?}");
        assert!(term_scaling_check(&model(), 0.5, 2, 1, &f, &[1e-2, 1e-1, 1e-3]).is_err());
    }

    #[test]
    fn first_term_limit() {
        let f = Rng::seeded(3).symmetric_hermitian(LabelSet::range(1, 2), 2, 1.0);
        let d: Vec<f64> = [1e-3, 1e-4, 1e-5].iter().map(|&e| first_term_deviation(&model(), 0.5, &f, e).unwrap()).collect();
        assert!(d[2] < 1e-4 && d[2] < d[1] && d[1] < d[0], "{d:?}");
    }

    #[test]
    fn chaos_decays() {
        let g = density(4);
        assert!(scaled_chaos_series(&model(), 0.0, 2, &g, 2, 1e-2).unwrap().max_abs() < 1e-15);
        let table = chaos_decay_check(&model(), 0.5, 2, &g, 2, &[1e-1, 1e-2, 1e-3]).unwrap();
        assert!(table.is_decreasing() && table.slope >= 0.9, "{table:?}");
    }

    #[test]
    fn free_sweep_is_exact() {
        let m = model().without_interaction();
        let g2 = Rng::seeded(5).symmetric_hermitian(LabelSet::range(1, 2), 2, 0.5);
        let corr = InitialCorrelations::none().with(g2).unwrap();
        let table = meanfield_sweep(&m, 0.3, 2, &density(6), &corr, &[1e-1, 1e-2, 1e-3], 2).unwrap();
        assert!(table.difference.iter().all(|&d| d <= 1e-8), "{table:?}");
    }

    #[test]
    fn chaos_sweep_rate() {
        let none = InitialCorrelations::none();
        for s in 1..=2 {
            let table = meanfield_sweep(&model(), 0.1, s, &density(7), &none, &[1e-1, 1e-2, 1e-3], 3).unwrap();
            assert!(table.rate.unwrap() >= 0.9, "{table:?}");
        }
    }
}
