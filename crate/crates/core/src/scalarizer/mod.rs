//! Solvers for the lexicographic epsilon-constraint scalarization
//!
//! ```text
//! lexmin (f_k, f_{k-1}, ..., f_1)   s.t.   f_i < eps_i  for i < k
//! ```
//!
//! Backends are stateless per query and shared read-only between worker
//! threads.

mod explicit;
mod ilp;
mod knapsack;

pub use explicit::{solve_explicit, ExplicitSetBackend};
pub use ilp::TinyIlpBackend;
pub use knapsack::{exhaustive_knapsack_answer, KnapsackBackend, DEFAULT_VERIFY_THRESHOLD};

use crate::combination::Parameter;
use crate::error::ScalarizeError;
use crate::image::Image;
use crate::instance::ProblemInstance;
use crate::permutation::Permutation;

/// Backend-specific solution encoding: the 0-1 (or integer) decision vector,
/// or `[index]` of the image for explicit sets.
pub type Witness = Vec<i64>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarizationQuery {
    pub parameter: Parameter,
    /// A solution known to satisfy the bounds. Only used to seed the search.
    pub incumbent: Option<Witness>,
    /// Objective ordering the query was issued under, for reporting.
    pub order: Option<Permutation>,
}

impl ScalarizationQuery {
    pub fn new(parameter: Parameter) -> ScalarizationQuery {
        ScalarizationQuery {
            parameter,
            incumbent: None,
            order: None,
        }
    }

    pub fn with_incumbent(mut self, incumbent: Option<Witness>) -> ScalarizationQuery {
        self.incumbent = incumbent;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScalarizationAnswer {
    Optimal { image: Image, witness: Witness },
    Infeasible,
}

impl ScalarizationAnswer {
    pub fn image(&self) -> Option<&Image> {
        match self {
            ScalarizationAnswer::Optimal { image, .. } => Some(image),
            ScalarizationAnswer::Infeasible => None,
        }
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, ScalarizationAnswer::Infeasible)
    }
}

/// A black-box solver for lexicographic epsilon-constraint problems on one
/// fixed instance.
pub trait Scalarizer: Send + Sync {
    /// Number of objectives of the underlying instance.
    fn k(&self) -> usize;

    /// Returns the lexicographically minimal image (last objective most
    /// significant) among solutions strictly below every bound, or
    /// `Infeasible`. Same query, same answer.
    fn solve(&self, query: &ScalarizationQuery) -> Result<ScalarizationAnswer, ScalarizeError>;
}

pub(crate) fn check_dimension(k: usize, query: &ScalarizationQuery) -> Result<(), ScalarizeError> {
    let got = query.parameter.k();
    if got == k {
        Ok(())
    } else {
        Err(ScalarizeError::DimensionMismatch { expected: k, got })
    }
}

/// Picks the shipped backend for an instance.
pub fn backend_for(instance: &ProblemInstance) -> Result<Box<dyn Scalarizer>, ScalarizeError> {
    instance.validate()?;
    Ok(match instance {
        ProblemInstance::ExplicitSet { k, images } => {
            Box::new(ExplicitSetBackend::new(*k, images.clone())?)
        }
        ProblemInstance::Knapsack(kp) => Box::new(KnapsackBackend::new(kp)?),
        ProblemInstance::TinyIlp(ilp) => Box::new(TinyIlpBackend::new(ilp)?),
    })
}
