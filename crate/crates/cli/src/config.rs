//! Run configuration: one JSON document for every command.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use corrdyn::dynamics::{random_potential, ModelSpec};
use corrdyn::functionals::{InitialCorrelations, ScatteringMode};
use corrdyn::hierarchy::{GroupRoute, SeriesConfig};
use corrdyn::operator::join_matrix;
use corrdyn::random::Rng;
use corrdyn::sequence::CorrelationSequence;
use corrdyn::{Error, LabelSet, LabeledOperator, Result};

/// Matrix as `{re, im}` row-major arrays; `im` defaults to zero.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl MatrixJson {
    fn to_matrix(&self) -> Result<DMatrix<C64>> {
        let zeros: Vec<Vec<f64>> = self.re.iter().map(|r| vec![0.0; r.len()]).collect();
        join_matrix(&self.re, self.im.as_ref().unwrap_or(&zeros))
    }
}

/// An operator given explicitly or drawn from a seed with a target trace norm.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OperatorSpec {
    Explicit(MatrixJson),
    Random {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
        norm: f64,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorJson {
    pub re: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(default = "default_d")]
    pub d: usize,
    /// Defaults to `diag(0, 1, …, d−1)`.
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub kinetic: Option<MatrixJson>,
    #[serde(rename = "Phi", default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<MatrixJson>,
    /// Seed of a random exchange-symmetric Φ with unit operator norm.
    #[serde(rename = "Phi_seed", default, skip_serializing_if = "Option::is_none")]
    pub phi_seed: Option<u64>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label_cap: Option<usize>,
}

fn default_d() -> usize {
    2
}

fn default_epsilon() -> f64 {
    0.1
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self { d: 2, kinetic: None, phi: None, phi_seed: None, epsilon: 0.1, label_cap: None }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    /// One-particle operator; a random spec draws a density matrix scaled
    /// to the given trace norm.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g1: Option<OperatorSpec>,
    /// Hartree wave function; random unit vector when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<VectorJson>,
    /// Higher components keyed by particle number (`"2"`, `"3"`, …).
    #[serde(default)]
    pub correlations: BTreeMap<String, OperatorSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub algebraic: f64,
    pub residual: f64,
    pub trace: f64,
    pub hermiticity: f64,
    pub purity: f64,
    pub agreement: f64,
    pub rate: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { algebraic: 1e-10, residual: 1e-4, trace: 1e-9, hermiticity: 1e-10, purity: 1e-8, agreement: 1e-4, rate: 0.9 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SeriesSection {
    pub n_max: usize,
    pub fd_step: f64,
    pub tolerances: Tolerances,
}

impl Default for SeriesSection {
    fn default() -> Self {
        Self { n_max: 2, fd_step: 1e-3, tolerances: Tolerances::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesRoute {
    /// Marginal correlations from cumulants of nonlinear groups.
    Cumulant,
    /// Correlations first, then the nonlinear group, literal partition sum.
    VnLiteral,
    /// As `VnLiteral` with the density-route evaluator.
    VnDensity,
}

/// Command-specific settings; each command reads the fields it needs.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub t: f64,
    pub times: Vec<f64>,
    pub s: usize,
    pub s_max: usize,
    pub s_list: Vec<usize>,
    pub t_end: f64,
    pub n_out: usize,
    pub dt: f64,
    pub route: SeriesRoute,
    pub mode: ScatteringMode,
    pub closure_n_max: usize,
    /// Truncation of the mean-field sweep; the floor it leaves must sit below the smallest ε.
    pub sweep_n_max: usize,
    pub eps_list: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            t: 0.1,
            times: vec![0.0, 0.25, 0.5],
            s: 2,
            s_max: 3,
            s_list: vec![1, 2],
            t_end: 1.0,
            n_out: 10,
            dt: corrdyn::kinetics::DEFAULT_DT,
            route: SeriesRoute::Cumulant,
            mode: ScatteringMode::Cumulant,
            closure_n_max: 1,
            sweep_n_max: 3,
            eps_list: vec![0.1, 0.03, 0.01, 0.003],
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub initial: InitialConfig,
    #[serde(default)]
    pub series: SeriesSection,
    #[serde(default)]
    pub run: RunConfig,
}

impl SeriesRoute {
    pub fn group_route(self) -> Option<GroupRoute> {
        match self {
            SeriesRoute::Cumulant => None,
            SeriesRoute::VnLiteral => Some(GroupRoute::Literal),
            SeriesRoute::VnDensity => Some(GroupRoute::Density),
        }
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::Invalid(msg.into())
}

/// Fixed offsets so unseeded random items stay distinct under one `--seed`.
const PHI_OFFSET: u64 = 0x9e37;
const G1_OFFSET: u64 = 1;
const PSI_OFFSET: u64 = 2;
const CORR_OFFSET: u64 = 16;

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| invalid(format!("config {}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<()> {
        let r = &self.run;
        if self.model.d == 0 {
            return Err(invalid("model.d must be positive"));
        }
        if self.model.phi.is_some() && self.model.phi_seed.is_some() {
            return Err(invalid("give either model.Phi or model.Phi_seed, not both"));
        }
        if !(self.series.fd_step > 0.0) {
            return Err(invalid("series.fd_step must be positive"));
        }
        if !(r.dt > 0.0) || !(r.t_end >= 0.0) || r.n_out == 0 {
            return Err(invalid("run.dt and run.n_out must be positive and run.t_end nonnegative"));
        }
        if r.s == 0 || r.s_max == 0 || r.s_list.contains(&0) {
            return Err(invalid("particle numbers start at 1"));
        }
        for key in self.initial.correlations.keys() {
            match key.parse::<usize>() {
                Ok(n) if n >= 2 => {}
                _ => return Err(invalid(format!("correlation key {key:?} must be an integer ≥ 2"))),
            }
        }
        Ok(())
    }

    pub fn model(&self, seed: u64) -> Result<ModelSpec> {
        let d = self.model.d;
        let kinetic = match &self.model.kinetic {
            Some(k) => k.to_matrix()?,
            None => DMatrix::from_fn(d, d, |i, j| if i == j { C64::new(i as f64, 0.0) } else { C64::new(0.0, 0.0) }),
        };
        let potential = match (&self.model.phi, self.model.phi_seed) {
            (Some(p), _) => p.to_matrix()?,
            (None, Some(s)) => random_potential(&mut Rng::seeded(s), d),
            (None, None) => random_potential(&mut Rng::seeded(seed.wrapping_add(PHI_OFFSET)), d),
        };
        let mut m = ModelSpec::new(kinetic, potential, self.model.epsilon)?;
        if let Some(cap) = self.model.label_cap {
            m.label_cap = cap;
        }
        Ok(m)
    }

    pub fn g1(&self, d: usize, seed: u64) -> Result<LabeledOperator> {
        let labels = LabelSet::singleton(1);
        match self.initial.g1.as_ref().unwrap_or(&OperatorSpec::Random { seed: None, norm: 1.0 }) {
            OperatorSpec::Explicit(m) => LabeledOperator::new(labels, d, m.to_matrix()?),
            OperatorSpec::Random { seed: s, norm } => {
                let rho = Rng::seeded(s.unwrap_or(seed.wrapping_add(G1_OFFSET))).density_matrix(d);
                Ok(LabeledOperator::new(labels, d, rho)?.scale_real(*norm))
            }
        }
    }

    pub fn psi(&self, d: usize, seed: u64) -> Result<DVector<C64>> {
        match &self.initial.psi {
            Some(v) => {
                let im = v.im.clone().unwrap_or_else(|| vec![0.0; v.re.len()]);
                if v.re.len() != d || im.len() != d {
                    return Err(invalid(format!("initial.psi must have {d} components")));
                }
                let psi = DVector::from_fn(d, |i, _| C64::new(v.re[i], im[i]));
                if (psi.norm() - 1.0).abs() > 1e-10 {
                    return Err(invalid("initial.psi must be normalized"));
                }
                Ok(psi)
            }
            None => Ok(Rng::seeded(seed.wrapping_add(PSI_OFFSET)).unit_vector(d)),
        }
    }

    /// Higher components, each on `1, …, n`.
    pub fn correlations(&self, d: usize, seed: u64) -> Result<InitialCorrelations> {
        let mut out = InitialCorrelations::none();
        for (key, spec) in &self.initial.correlations {
            let n: usize = key.parse().map_err(|_| invalid(format!("bad correlation key {key:?}")))?;
            let labels = LabelSet::range(1, n);
            let op = match spec {
                OperatorSpec::Explicit(m) => {
                    let op = LabeledOperator::new(labels, d, m.to_matrix()?)?;
                    if !op.is_hermitian(1e-10) || !op.is_symmetric(1e-10) {
                        return Err(invalid(format!("correlation {n} must be Hermitian and symmetric")));
                    }
                    op
                }
                OperatorSpec::Random { seed: s, norm } => {
                    Rng::seeded(s.unwrap_or(seed.wrapping_add(CORR_OFFSET + n as u64))).symmetric_hermitian(labels, d, *norm)
                }
            };
            out.insert(op)?;
        }
        Ok(out)
    }

    /// `(g1, g2, …)` as one sequence, for commands that take the initial
    /// components verbatim.
    pub fn sequence(&self, d: usize, seed: u64) -> Result<CorrelationSequence> {
        let mut seq = CorrelationSequence::new(d).with_scalar(C64::new(1.0, 0.0));
        seq.insert(&self.g1(d, seed)?)?;
        let corr = self.correlations(d, seed)?;
        for n in corr.orders().collect::<Vec<_>>() {
            seq.insert(corr.get(n).expect("listed order"))?;
        }
        Ok(seq)
    }

    pub fn series_config(&self, n_max: usize) -> SeriesConfig {
        SeriesConfig {
            n_max,
            fd_step: self.series.fd_step,
            tol_algebraic: self.series.tolerances.algebraic,
            tol_fd: self.series.tolerances.residual,
            ..SeriesConfig::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        let c: Config = serde_json::from_str("{}").unwrap();
        c.validate().unwrap();
        let m = c.model(0).unwrap();
        assert_eq!(m.dim, 2);
        assert!((m.potential_norm() - 1.0).abs() < 1e-12);
        assert!((c.g1(2, 0).unwrap().trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn explicit_and_random_specs() {
        let text = r#"{
            "model": {"d": 2, "K": {"re": [[0, 0], [0, 2]]}, "Phi_seed": 4, "epsilon": 0.5},
            "initial": {"g1": {"re": [[0.5, 0], [0, 0.5]]}, "correlations": {"2": {"seed": 3, "norm": 0.2}}}
        }"#;
        let c: Config = serde_json::from_str(text).unwrap();
        c.validate().unwrap();
        assert_eq!(c.model(9).unwrap().kinetic[(1, 1)].re, 2.0);
        let corr = c.correlations(2, 0).unwrap();
        assert!((corr.get(2).unwrap().trace_norm() - 0.2).abs() < 1e-12);
        assert_eq!(c.sequence(2, 0).unwrap().max_order(), 2);
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(serde_json::from_str::<Config>(r#"{"model": {"epsilon": 0.1, "bogus": 1}}"#).is_err());
        let c: Config = serde_json::from_str(r#"{"initial": {"correlations": {"1": {"norm": 1}}}}"#).unwrap();
        assert!(c.validate().is_err());
        let c: Config = serde_json::from_str(r#"{"model": {"epsilon": 0.1, "Phi_seed": 1, "Phi": {"re": [[1]]}}}"#).unwrap();
        assert!(c.validate().is_err());
    }
}
