//! Covert and secure transmission metrics against a detecting warden and an
//! eavesdropper, with closed-form optimisation of the covert secrecy rate and
//! Monte-Carlo validation.

pub mod link;
pub mod metrics;
pub mod montecarlo;
pub mod numerics;
pub mod solver;

pub use link::{NoiseProfile, ParamError, Relationship, ScenarioId, Scheme, SecurityConstraints, TransmitConfig};
pub use metrics::{DetectionErrors, MetricSet, MetricsError};
pub use montecarlo::{McError, McEstimate, ValidationReport};
pub use numerics::{NumericsError, ToleranceSpec};
pub use solver::{CsrSolution, GridSpec, Regime, RsCandidates, SolverError};
