//! `verify`: the property suite on the configured model.

use corrdyn::cumulants::{cumulant_clustered, evolve_sequence, nonlinear_group_apply, nonlinear_group_density, reduced_cumulant};
use corrdyn::dynamics::{Dynamics, ModelSpec};
use corrdyn::functionals::InitialCorrelations;
use corrdyn::hierarchy::{
    bbgky_residual, correlation_sequence_from_marginals, group_norm_bound, marginal_series_cumulant, marginal_series_from_vn,
    von_neumann_solve, vn_residual_with_counting, BipartitionCounting, GroupRoute,
};
use corrdyn::kinetics::{
    hartree_evolve, iterated_series_g1, limit_sequence, measured_order, pure_state, vlasov_correlated_integrate,
    vlasov_hierarchy_residual, vlasov_integrate, TimeGrid,
};
use corrdyn::meanfield::{chaos_decay_check, meanfield_sweep, term_scaling_check};
use corrdyn::partitions::{set_partitions, ClusteredSet};
use corrdyn::random::Rng;
use corrdyn::sequence::{correlations_from_densities, densities_from_correlations, CorrelationSequence};
use corrdyn::{LabelSet, LabeledOperator, Result};

use crate::commands::{par_map, Context};
use crate::config::Tolerances;
use crate::output::{CheckRecord, Outcome, Table};

struct Env {
    model: ModelSpec,
    seed: u64,
    tol: Tolerances,
    n_max: usize,
    fd_step: f64,
    g1: LabeledOperator,
    corr: InitialCorrelations,
}

impl Env {
    fn dy(&self, eps: f64) -> Dynamics {
        Dynamics::new(self.model.with_epsilon(eps))
    }

    fn data(&self, salt: u64, max: usize, norm: impl Fn(usize) -> f64) -> CorrelationSequence {
        let mut rng = Rng::seeded(self.seed.wrapping_mul(7919).wrapping_add(salt));
        let mut seq = CorrelationSequence::new(self.model.dim);
        for s in 1..=max {
            seq.insert(&rng.symmetric_hermitian(LabelSet::range(1, s), self.model.dim, norm(s))).expect("fresh order");
        }
        seq
    }

    fn scfg(&self, n_max: usize) -> corrdyn::hierarchy::SeriesConfig {
        corrdyn::hierarchy::SeriesConfig { n_max, fd_step: self.fd_step, ..Default::default() }
    }
}

type Group = fn(&Env) -> Result<Vec<CheckRecord>>;

fn mobius(env: &Env) -> Result<Vec<CheckRecord>> {
    let dy = env.dy(env.model.epsilon);
    let mut worst = 0.0f64;
    for s in 2..=3usize {
        let y = LabelSet::range(1, s);
        let f = env.data(s as u64, s, |_| 1.0).component(s)?;
        let mut acc = LabeledOperator::zeros(y.clone(), env.model.dim);
        for p in set_partitions(y.as_slice()) {
            let mut w = f.clone();
            for b in p {
                w = cumulant_clustered(&dy, 0.5, &ClusteredSet::singletons(&LabelSet::new(b)?), &w)?;
            }
            acc.add_assign(&w)?;
        }
        worst = worst.max(acc.distance(&dy.group_apply(0.5, &f)?)?);
    }
    Ok(vec![CheckRecord::at_most("cumulant Mobius inversion, s=2,3", worst, env.tol.algebraic)])
}

fn von_neumann(env: &Env) -> Result<Vec<CheckRecord>> {
    let dy = env.dy(env.model.epsilon.max(0.5));
    let free = env.dy(0.0);
    let g0 = env.data(10, 3, |s| 0.5f64.powi(s as i32));
    let cfg = env.scfg(env.n_max);
    let mut out = Vec::new();
    let mut worst = (0.0f64, 0.0f64);
    for s in 1..=3 {
        let y = LabelSet::range(1, s);
        worst.0 = worst.0.max(vn_residual_with_counting(&dy, 0.3, &y, &g0, &cfg, BipartitionCounting::Unordered)?);
        worst.1 = worst.1.max(vn_residual_with_counting(&free, 0.3, &y, &g0, &cfg, BipartitionCounting::Unordered)?);
    }
    out.push(CheckRecord::at_most("von Neumann hierarchy residual, s<=3", worst.0, env.tol.residual));
    out.push(CheckRecord::at_most("free control residual, s<=3", worst.1, 1e-2 * env.tol.residual));
    let ordered = vn_residual_with_counting(&dy, 0.3, &LabelSet::range(1, 2), &g0, &cfg, BipartitionCounting::Ordered)?;
    out.push(CheckRecord::at_least("double-counted bipartitions rejected", ordered, env.tol.residual));
    Ok(out)
}

fn group_property(env: &Env) -> Result<Vec<CheckRecord>> {
    let dy = env.dy(env.model.epsilon);
    let f = env.data(20, 3, |_| 0.7);
    let composed = evolve_sequence(&dy, 0.4, &evolve_sequence(&dy, 0.3, &f, 3)?, 3)?;
    let direct = evolve_sequence(&dy, 0.7, &f, 3)?;
    let mut worst = 0.0f64;
    for s in 1..=3 {
        worst = worst.max(composed.component(s)?.distance(&direct.component(s)?)?);
    }
    Ok(vec![CheckRecord::at_most("nonlinear group property, s<=3", worst, 1e-9)])
}

fn engines(env: &Env) -> Result<Vec<CheckRecord>> {
    let dy = env.dy(env.model.epsilon);
    let f = env.data(30, 3, |_| 0.8);
    let mut worst = 0.0f64;
    for s in 1..=3 {
        let y = LabelSet::range(1, s);
        let a = nonlinear_group_apply(&dy, 0.45, &y, &f)?;
        worst = worst.max(a.distance(&nonlinear_group_density(&dy, 0.45, &y, &f)?)?);
        worst = worst.max(a.distance(&reduced_cumulant(&dy, 0.45, s, 0, &f)?)?);
    }
    Ok(vec![CheckRecord::at_most("literal, density and reduced-cumulant groups agree", worst, env.tol.algebraic)])
}

fn cross(env: &Env) -> Result<Vec<CheckRecord>> {
    let dy = env.dy(1.0);
    let cfg = env.scfg(1);
    let mut diffs = Vec::new();
    for delta in [0.05f64, 0.025] {
        let big = env.data(40, 3, |k| delta.powi(k as i32));
        let g0 = correlation_sequence_from_marginals(&big)?;
        let a = marginal_series_from_vn(&dy, 0.3, 1, &g0, &cfg, GroupRoute::Literal)?.value;
        let b = marginal_series_cumulant(&dy, 0.3, 1, &big, &cfg)?.value;
        diffs.push(a.distance(&b)? / big.component(1)?.trace_norm());
    }
    let exponent = (diffs[0] / diffs[1]).log2();
    Ok(vec![CheckRecord::at_most("cross-representation exponent, |p-2|/2 at n_max=1", (exponent - 2.0).abs() / 2.0, 0.15)])
}

fn bbgky(env: &Env) -> Result<Vec<CheckRecord>> {
    let dy = env.dy(0.1);
    let big = env.data(50, 4, |k| 0.05f64.powi(k as i32));
    let r: Vec<f64> = (1..=3).map(|n| bbgky_residual(&dy, 0.2, 1, &big, &env.scfg(n))).collect::<Result<_>>()?;
    let decreasing = if r[1] < r[0] && r[2] < r[1] { 0.0 } else { 1.0 };
    Ok(vec![
        CheckRecord::at_most("BBGKY residual decreasing in n_max (0 = yes)", decreasing, 0.0),
        CheckRecord::at_most("BBGKY residual at n_max=3", r[2], 1e-3),
    ])
}

fn bounds(env: &Env) -> Result<Vec<CheckRecord>> {
    let mut ratio = 0.0f64;
    for i in 0..20u64 {
        let mut rng = Rng::seeded(env.seed.wrapping_add(600 + i));
        let s = 1 + (i % 3) as usize;
        let dy = env.dy(rng.uniform(0.1, 2.0));
        let t = rng.uniform(-1.0, 1.0);
        let scale = rng.uniform(0.01, 3.0);
        let f = env.data(60 + i, s, |_| scale);
        let g = nonlinear_group_density(&dy, t, &LabelSet::range(1, s), &f)?;
        ratio = ratio.max(g.trace_norm() / group_norm_bound(&f, s));
    }
    let big = env.data(70, 4, |_| 0.8 / (2.0 * 3f64.exp()));
    let cauchy = marginal_series_cumulant(&env.dy(1.0), 0.5, 1, &big, &env.scfg(3))?.cauchy_ratio();
    Ok(vec![
        CheckRecord::at_most("group norm / bound over 20 samples", ratio, 1.0),
        CheckRecord::at_most("Cauchy ratio below the data premise", cauchy, 1.0 - 1e-12),
    ])
}

fn kinetics(env: &Env) -> Result<Vec<CheckRecord>> {
    let m = &env.model;
    let grid = TimeGrid::uniform(1.0, 10, corrdyn::kinetics::DEFAULT_DT);
    let g2 = env.corr.get(2).cloned().unwrap_or_else(|| LabeledOperator::zeros(LabelSet::range(1, 2), m.dim));
    let mut out = Vec::new();
    for (name, traj) in [("vlasov", vlasov_integrate(m, &env.g1, &grid)?), ("vlasov-corr", vlasov_correlated_integrate(m, &env.g1, &g2, &grid)?)] {
        out.push(CheckRecord::at_most(format!("{name}: trace drift"), traj.trace_drift(), env.tol.trace));
        out.push(CheckRecord::at_most(format!("{name}: hermiticity defect"), traj.hermiticity_defect(), env.tol.hermiticity));
    }
    let psi = Rng::seeded(env.seed.wrapping_add(80)).unit_vector(m.dim);
    let mut purity = 0.0f64;
    for (_, v) in hartree_evolve(m, &psi, &grid)? {
        let rho = pure_state(m, &v)?;
        purity = purity.max((rho.mul(&rho)?.trace().re - 1.0).abs());
    }
    out.push(CheckRecord::at_most("hartree: purity drift", purity, env.tol.purity));
    let order = measured_order(|h| Ok(vlasov_integrate(m, &env.g1, &TimeGrid::uniform(1.0, 1, h))?.last().g1.clone()), 0.1)?;
    out.push(CheckRecord::at_most("RK4 order, |p-4|", (order - 4.0).abs(), 0.3));
    let t = 0.1;
    let series = iterated_series_g1(m, &env.g1, None, t, 3)?;
    let vl = vlasov_integrate(m, &env.g1, &TimeGrid::uniform(t, 1, corrdyn::kinetics::DEFAULT_DT))?;
    let check = CheckRecord::at_most("chaos: iterated series vs vlasov at t=0.1", series.value.distance(&vl.last().g1)?, env.tol.agreement);
    out.push(if t < series.t0 { check } else { check.informational() });
    if !env.corr.is_empty() {
        let series = iterated_series_g1(m, &env.g1, Some(&env.corr), t, 3)?;
        let vc = vlasov_correlated_integrate(m, &env.g1, &g2, &TimeGrid::uniform(t, 1, corrdyn::kinetics::DEFAULT_DT))?;
        let d = series.value.distance(&vc.last().g1)?;
        out.push(CheckRecord::at_most("correlated: iterated series vs vlasov-corr (known gap)", d, env.tol.agreement).informational());
    }
    Ok(out)
}

fn mean_field(env: &Env) -> Result<Vec<CheckRecord>> {
    let m = &env.model;
    let eps = [1e-1, 1e-2, 1e-3];
    let f = Rng::seeded(env.seed.wrapping_add(90)).symmetric_hermitian(LabelSet::range(1, 3), m.dim, 1.0);
    let slope = term_scaling_check(m, 0.5, 2, 1, &f, &eps)?.slope;
    let decay = chaos_decay_check(m, 0.5, 2, &env.g1, 2, &eps)?.slope;
    let none = InitialCorrelations::none();
    let sweep_eps = [1e-1, 3e-2, 1e-2, 3e-3];
    let rate = meanfield_sweep(m, 0.1, 2, &env.g1, &none, &sweep_eps, 3)?.rate.unwrap_or(0.0);
    let mut out = vec![
        CheckRecord::at_most("cumulant term scaling, |slope-1|", (slope - 1.0).abs(), 0.1),
        CheckRecord::at_least("chaos decay slope, s=2", decay, env.tol.rate),
        CheckRecord::at_least("chaos sweep rate, s=2", rate, env.tol.rate),
    ];
    let grid = TimeGrid::uniform(0.6, 600, corrdyn::kinetics::DEFAULT_DT);
    let chaos = vlasov_integrate(m, &env.g1, &grid)?;
    let r = vlasov_hierarchy_residual(m, 0.3, 1, |tau| limit_sequence(m, &chaos, &none, tau, 3), 1e-3)?;
    out.push(CheckRecord::at_most("limit hierarchy residual, chaos, s=1", r, env.tol.residual));
    if let Some(g2) = env.corr.get(2) {
        let traj = vlasov_correlated_integrate(m, &env.g1, g2, &grid)?;
        let r = vlasov_hierarchy_residual(m, 0.3, 2, |tau| limit_sequence(m, &traj, &env.corr, tau, 3), 1e-3)?;
        out.push(CheckRecord::at_most("limit hierarchy residual, correlated, s=2 (known gap)", r, env.tol.residual).informational());
        let rate = meanfield_sweep(m, 0.1, 2, &env.g1, &env.corr, &sweep_eps, 3)?.rate.unwrap_or(0.0);
        out.push(CheckRecord::at_least("sweep rate, correlated, s=2 (known gap)", rate, env.tol.rate).informational());
    }
    Ok(out)
}

fn full_system(env: &Env) -> Result<Vec<CheckRecord>> {
    let dy = env.dy(env.model.epsilon);
    let g0 = env.data(100, 3, |_| 0.6);
    let f0 = densities_from_correlations(&g0, 3)?;
    let t = 0.8;
    let mut ft = CorrelationSequence::new(env.model.dim);
    for s in 1..=3 {
        ft.insert(&dy.group_apply(t, &f0.component(s)?)?)?;
    }
    let gt = correlations_from_densities(&ft, 3)?;
    let mut worst = 0.0f64;
    for s in 1..=3 {
        worst = worst.max(von_neumann_solve(&dy, t, &LabelSet::range(1, s), &g0)?.distance(&gt.component(s)?)?);
    }
    Ok(vec![CheckRecord::at_most("three-particle system vs hierarchy solution", worst, env.tol.algebraic)])
}

pub fn verify(ctx: &Context) -> Result<Outcome> {
    let model = ctx.model()?;
    let d = model.dim;
    let env = Env {
        seed: ctx.seed,
        tol: ctx.cfg.series.tolerances.clone(),
        n_max: ctx.cfg.series.n_max,
        fd_step: ctx.cfg.series.fd_step,
        g1: ctx.cfg.g1(d, ctx.seed)?,
        corr: ctx.cfg.correlations(d, ctx.seed)?,
        model,
    };
    let groups: [(&str, Group); 10] = [
        ("cumulants", mobius),
        ("von-neumann", von_neumann),
        ("group-property", group_property),
        ("engines", engines),
        ("cross-representation", cross),
        ("bbgky", bbgky),
        ("norm-bounds", bounds),
        ("kinetics", kinetics),
        ("mean-field", mean_field),
        ("full-system", full_system),
    ];
    let results = par_map(&groups, ctx.threads, |(_, g)| g(&env));
    let mut out = Outcome::default();
    let mut table = Table::new("verify.csv", &["group", "check", "value", "tolerance", "relation", "pass", "informational"]);
    for ((group, _), r) in groups.iter().zip(results) {
        for c in r? {
            let relation = match c.relation {
                crate::output::Relation::AtMost => "<=",
                crate::output::Relation::AtLeast => ">=",
            };
            table.push(vec![
                group.to_string(),
                c.name.clone(),
                crate::output::num(c.value),
                crate::output::num(c.tolerance),
                relation.into(),
                c.pass.to_string(),
                c.informational.to_string(),
            ]);
            out.checks.push(c);
        }
    }
    out.tables.push(table);
    Ok(out)
}
