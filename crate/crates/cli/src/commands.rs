//! The experiment commands. Each returns an [`Outcome`]; writing files is
//! left to the caller.

use corrdyn::dynamics::{Dynamics, ModelSpec};
use corrdyn::functionals::correlation_functional;
use corrdyn::hierarchy::{
    bbgky_residual, correlation_sequence_from_marginals, marginal_series_cumulant, marginal_series_from_vn, von_neumann_solve,
    vn_hierarchy_residual,
};
use corrdyn::kinetics::{
    free_transport, generalized_guard, generalized_kinetic_integrate, hartree_evolve, pure_state, vlasov_correlated_integrate,
    vlasov_integrate, ClosureConfig, TimeGrid, Trajectory,
};
use corrdyn::meanfield::meanfield_sweep;
use corrdyn::operator::OperatorJson;
use corrdyn::sequence::CorrelationSequence;
use corrdyn::{LabelSet, LabeledOperator, Result};

use crate::config::Config;
use crate::output::{num, CheckRecord, GuardRecord, Outcome, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum KineticKind {
    Vlasov,
    Hartree,
    VlasovCorr,
    Generalized,
}

pub struct Context {
    pub cfg: Config,
    pub seed: u64,
    pub threads: usize,
}

impl Context {
    pub fn model(&self) -> Result<ModelSpec> {
        self.cfg.model(self.seed)
    }

    /// The configured initial components padded with zeros up to `max`.
    fn padded_sequence(&self, d: usize, max: usize) -> Result<CorrelationSequence> {
        let mut seq = self.cfg.sequence(d, self.seed)?;
        for k in 1..=max {
            if !seq.has(k) {
                seq.insert_zero(k);
            }
        }
        Ok(seq)
    }
}

/// Order-preserving map over `items` on up to `threads` scoped threads.
pub fn par_map<T: Sync, R: Send>(items: &[T], threads: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let threads = threads.clamp(1, items.len().max(1));
    if threads == 1 {
        return items.iter().map(f).collect();
    }
    let chunk = items.len().div_ceil(threads);
    std::thread::scope(|scope| {
        let handles: Vec<_> = items.chunks(chunk).map(|c| scope.spawn(|| c.iter().map(&f).collect::<Vec<R>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

fn operator_json(op: &LabeledOperator) -> OperatorJson {
    OperatorJson::from(op)
}

/// `g_s(t)` for `s ≤ s_max` on the configured times, with the hierarchy residual.
pub fn vn_solve(ctx: &Context) -> Result<Outcome> {
    let model = ctx.model()?;
    let run = &ctx.cfg.run;
    let dy = Dynamics::new(model.clone());
    let g0 = ctx.padded_sequence(model.dim, run.s_max)?;
    let scfg = ctx.cfg.series_config(ctx.cfg.series.n_max);
    let points: Vec<(f64, usize)> = run.times.iter().flat_map(|&t| (1..=run.s_max).map(move |s| (t, s))).collect();
    let solved = par_map(&points, ctx.threads, |&(t, s)| -> Result<(LabeledOperator, f64)> {
        let y = LabelSet::range(1, s);
        Ok((von_neumann_solve(&dy, t, &y, &g0)?, vn_hierarchy_residual(&dy, t, &y, &g0, &scfg)?))
    });
    let mut out = Outcome::default();
    let mut table = Table::new("vn_solve.csv", &["t", "s", "trace_re", "trace_im", "trace_norm", "hermiticity", "residual"]);
    let mut worst = 0.0f64;
    let mut last = Vec::new();
    for (&(t, s), r) in points.iter().zip(solved) {
        let (g, res) = r?;
        worst = worst.max(res);
        let tr = g.trace();
        table.push(vec![num(t), s.to_string(), num(tr.re), num(tr.im), num(g.trace_norm()), num(g.hermiticity_defect()), num(res)]);
        if Some(&t) == run.times.last() {
            last.push(operator_json(&g));
        }
    }
    out.checks.push(CheckRecord::at_most("max hierarchy residual", worst, ctx.cfg.series.tolerances.residual));
    out.tables.push(table);
    out.result("final_correlations", last);
    Ok(out)
}

/// Marginal correlation series `G_s(t)` with per-term diagnostics.
pub fn bbgky_series(ctx: &Context) -> Result<Outcome> {
    let model = ctx.model()?;
    let run = &ctx.cfg.run;
    let n_max = ctx.cfg.series.n_max;
    let dy = Dynamics::new(model.clone());
    let big = ctx.padded_sequence(model.dim, run.s + n_max + 1)?;
    let scfg = ctx.cfg.series_config(n_max);
    let series = match run.route.group_route() {
        None => marginal_series_cumulant(&dy, run.t, run.s, &big, &scfg)?,
        Some(route) => {
            let g0 = correlation_sequence_from_marginals(&big)?;
            marginal_series_from_vn(&dy, run.t, run.s, &g0, &scfg, route)?
        }
    };
    let mut out = Outcome { truncation: Some(n_max), ..Outcome::default() };
    let premise = 1.0 / (2.0 * 3f64.exp());
    out.guards.push(GuardRecord::below("max initial marginal trace norm < (2e^3)^-1", big.max_trace_norm(), premise));
    let mut table = Table::new("bbgky_series.csv", &["n", "term_trace_norm", "cumulative_trace_norm"]);
    for rec in &series.terms {
        table.push(vec![rec.n.to_string(), num(rec.trace_norm), num(rec.cumulative_trace_norm)]);
    }
    out.tables.push(table);
    let residual = bbgky_residual(&dy, run.t, run.s, &big, &scfg)?;
    out.checks.push(CheckRecord::at_most("BBGKY residual of the truncated series", residual, ctx.cfg.series.tolerances.residual));
    out.result("cauchy_ratio", series.cauchy_ratio());
    out.result("value", operator_json(&series.value));
    Ok(out)
}

/// The correlation functional `G_s(t | G₁)` with `G₁` the configured `g1`.
pub fn functional(ctx: &Context) -> Result<Outcome> {
    let model = ctx.model()?;
    let run = &ctx.cfg.run;
    let n_max = ctx.cfg.series.n_max;
    let dy = Dynamics::new(model.clone());
    let g1 = ctx.cfg.g1(model.dim, ctx.seed)?;
    let corr = ctx.cfg.correlations(model.dim, ctx.seed)?;
    let f = correlation_functional(&dy, run.t, run.s, &g1, &corr, n_max, run.mode)?;
    let mut out = Outcome { truncation: Some(n_max), ..Outcome::default() };
    out.guards.push(GuardRecord::below("||G1||_1 < e^-(3s+2)", g1.trace_norm(), f.guard_bound));
    let mut table = Table::new("functional.csv", &["n", "term_trace_norm", "cumulative_trace_norm"]);
    for rec in &f.terms {
        table.push(vec![rec.n.to_string(), num(rec.trace_norm), num(rec.cumulative_trace_norm)]);
    }
    out.tables.push(table);
    let scale = 1.0 + f.value.max_abs();
    out.checks.push(CheckRecord::at_most("hermiticity defect", f.value.hermiticity_defect(), ctx.cfg.series.tolerances.hermiticity * scale));
    out.checks.push(CheckRecord::at_most("symmetry defect", f.value.symmetry_defect(), ctx.cfg.series.tolerances.algebraic * scale));
    out.result("value", operator_json(&f.value));
    Ok(out)
}

fn trajectory_checks(out: &mut Outcome, traj: &Trajectory, ctx: &Context) {
    let tol = &ctx.cfg.series.tolerances;
    out.checks.push(CheckRecord::at_most("trace drift", traj.trace_drift(), tol.trace));
    out.checks.push(CheckRecord::at_most("hermiticity defect", traj.hermiticity_defect(), tol.hermiticity));
    out.result("step_error", traj.step_error);
    out.result("final_g1", operator_json(&traj.last().g1));
}

pub fn kinetic(ctx: &Context, kind: KineticKind) -> Result<Outcome> {
    let model = ctx.model()?;
    let run = &ctx.cfg.run;
    let grid = TimeGrid::uniform(run.t_end, run.n_out, run.dt);
    grid.validate()?;
    let tol = &ctx.cfg.series.tolerances;
    let g1 = ctx.cfg.g1(model.dim, ctx.seed)?;
    let mut out = Outcome::default();
    match kind {
        KineticKind::Vlasov => {
            let traj = vlasov_integrate(&model, &g1, &grid)?;
            trajectory_checks(&mut out, &traj, ctx);
            out.checks.push(CheckRecord::at_most("purity drift", traj.purity_drift(), tol.purity));
            if model.potential.iter().all(|z| z.norm() == 0.0) {
                let mut dev = 0.0f64;
                for s in &traj.states {
                    dev = dev.max(s.g1.distance(&free_transport(&model, s.t, &g1)?)?);
                }
                out.checks.push(CheckRecord::at_most("trivial case: free transport", dev, tol.trace));
                out.result("trivial_case_pass", dev <= tol.trace);
            }
            let (header, rows) = traj.csv_rows();
            out.tables.push(Table::from_numeric("trajectory.csv", header, rows));
        }
        KineticKind::VlasovCorr => {
            let corr = ctx.cfg.correlations(model.dim, ctx.seed)?;
            let g2 = corr.get(2).cloned().unwrap_or_else(|| LabeledOperator::zeros(LabelSet::range(1, 2), model.dim));
            let traj = vlasov_correlated_integrate(&model, &g1, &g2, &grid)?;
            trajectory_checks(&mut out, &traj, ctx);
            let (header, rows) = traj.csv_rows();
            out.tables.push(Table::from_numeric("trajectory.csv", header, rows));
        }
        KineticKind::Generalized => {
            let corr = ctx.cfg.correlations(model.dim, ctx.seed)?;
            let closure = ClosureConfig { n_max: run.closure_n_max, mode: run.mode };
            let dy = Dynamics::new(model.clone());
            let traj = generalized_kinetic_integrate(&dy, &g1, &corr, &grid, &closure)?;
            out.truncation = Some(closure.n_max);
            out.guards.push(GuardRecord::below("||G1(0)||_1 < (e(1+e^9))^-1", g1.trace_norm(), generalized_guard()));
            trajectory_checks(&mut out, &traj, ctx);
            let (header, rows) = traj.csv_rows();
            out.tables.push(Table::from_numeric("trajectory.csv", header, rows));
        }
        KineticKind::Hartree => {
            let psi = ctx.cfg.psi(model.dim, ctx.seed)?;
            let states = hartree_evolve(&model, &psi, &grid)?;
            let mut header = vec!["t".to_string()];
            for r in 0..model.dim {
                header.push(format!("re_{r}"));
                header.push(format!("im_{r}"));
            }
            header.push("norm".into());
            header.push("purity".into());
            let mut rows = Vec::new();
            let (mut norm_drift, mut purity_drift) = (0.0f64, 0.0f64);
            for (t, v) in &states {
                let rho = pure_state(&model, v)?;
                let purity = rho.mul(&rho)?.trace().re;
                norm_drift = norm_drift.max((v.norm() - 1.0).abs());
                purity_drift = purity_drift.max((purity - 1.0).abs());
                let mut row = vec![*t];
                for z in v.iter() {
                    row.push(z.re);
                    row.push(z.im);
                }
                row.push(v.norm());
                row.push(purity);
                rows.push(row);
            }
            out.checks.push(CheckRecord::at_most("norm drift", norm_drift, tol.trace));
            out.checks.push(CheckRecord::at_most("purity drift", purity_drift, tol.purity));
            out.tables.push(Table::from_numeric("trajectory.csv", header, rows));
        }
    }
    Ok(out)
}

/// Scaled marginal correlations against the limit objects, one table row per
/// `(s, ε)`, with the fitted rate repeated on each row of an `s`.
pub fn meanfield(ctx: &Context) -> Result<Outcome> {
    let model = ctx.model()?;
    let run = &ctx.cfg.run;
    let n_max = run.sweep_n_max;
    let g1 = ctx.cfg.g1(model.dim, ctx.seed)?;
    let corr = ctx.cfg.correlations(model.dim, ctx.seed)?;
    let tables = par_map(&run.s_list, ctx.threads, |&s| meanfield_sweep(&model, run.t, s, &g1, &corr, &run.eps_list, n_max));
    let mut out = Outcome { truncation: Some(n_max), ..Outcome::default() };
    let mut table = Table::new("meanfield_sweep.csv", &["s", "eps", "difference", "fitted_rate"]);
    let mut summary = Vec::new();
    for sweep in tables {
        let sweep = sweep?;
        let rate = sweep.rate.map(num).unwrap_or_default();
        for (e, d) in sweep.eps.iter().zip(&sweep.difference) {
            table.push(vec![sweep.s.to_string(), num(*e), num(*d), rate.clone()]);
        }
        match sweep.rate {
            Some(r) => out.checks.push(CheckRecord::at_least(format!("fitted rate s={}", sweep.s), r, ctx.cfg.series.tolerances.rate)),
            None => {
                let worst = sweep.difference.iter().cloned().fold(0.0, f64::max);
                out.checks.push(CheckRecord::at_most(format!("exact agreement s={}", sweep.s), worst, ctx.cfg.series.tolerances.algebraic));
            }
        }
        summary.push(sweep);
    }
    out.tables.push(table);
    out.result("sweeps", summary);
    Ok(out)
}
