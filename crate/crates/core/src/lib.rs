//! Correlation dynamics of finite quantum many-particle systems: cumulant
//! expansions of groups of operators, hierarchies for marginal operators and
//! correlation operators, functionals of scattering cumulants, kinetic
//! equations and mean-field scaling checks.

pub mod cumulants;
pub mod dynamics;
pub mod error;
pub mod functionals;
pub mod hierarchy;
pub mod kinetics;
pub mod meanfield;
pub mod operator;
pub mod partitions;
pub mod random;
pub mod sequence;

pub use error::{Error, Result};
pub use operator::{Label, LabelSet, LabeledOperator};
