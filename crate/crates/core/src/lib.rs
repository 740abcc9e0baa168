//! Uniform sampling of balanced realizations of a joint degree matrix with
//! the restricted-swap chain, plus exact analysis of the chain on small
//! instances: enumeration, partition into auxiliary-graph cells, spectra,
//! conductance and the associated inequality checks.

pub mod chain;
pub mod construct;
pub mod decompose;
pub mod enumerate;
pub mod error;
pub mod io;
pub mod jdm;
pub mod pipeline;
pub mod spectra;

pub use chain::{ChainState, RsoChain, RsoMove, Sampler, StepCounters, StepOutcome};
pub use construct::construct_balanced;
pub use enumerate::{brute_force_realizations, enumerate_balanced, StateSpace};
pub use error::{Error, Result};
pub use jdm::{ClassSizes, JointDegreeMatrix, Realization, ThetaMode};
