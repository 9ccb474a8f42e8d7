//! Exact enumeration of the nondominated set of multi-objective integer
//! programs.
//!
//! The solver walks a tree of lexicographic epsilon-constraint
//! scalarizations. Each node is a [`Combination`] of `k - 1` images whose
//! coordinates form the bounds of one query; the optimum of that query
//! decides which child nodes exist. The tree is fixed by the instance, so
//! the set of queries does not depend on scheduling and the traversal
//! parallelizes without coordination beyond result collection.
//!
//! ```
//! use scion_core::{run_instance, EngineConfig, ProblemInstance};
//!
//! let set = ProblemInstance::explicit(
//!     4,
//!     vec![vec![4, 1, 2, 1], vec![2, 4, 3, 2], vec![1, 3, 4, 3]],
//! )
//! .unwrap();
//! let report = run_instance(&set, &EngineConfig::with_threads(2)).unwrap();
//! assert_eq!(report.nondominated.len(), 3);
//! assert_eq!(report.scalarizations_solved, 11);
//! ```

pub mod combination;
pub mod engine;
pub mod error;
pub mod image;
pub mod instance;
pub mod io;
pub mod oracle;
pub mod permutation;
pub mod scalarizer;
pub mod value;
pub mod warmstart;

pub use combination::{viable_parameter, Combination, Parameter};
pub use engine::{
    run, run_instance, run_instance_with_ladder, run_with_prescreen, scion_candidates,
    storage_rule, EngineConfig, NodeRecord, RunReport, StoredImage,
};
pub use error::{EngineError, InstanceError, ScalarizeError};
pub use image::{dominates, lex_less, Image, ImageKind};
pub use instance::{permute_problem, KnapsackInstance, ProblemInstance, Sense, TinyIlpInstance};
pub use permutation::Permutation;
pub use scalarizer::{backend_for, ScalarizationAnswer, ScalarizationQuery, Scalarizer, Witness};
pub use value::{Extended, ExtendedValue};
pub use warmstart::{compute_level, run_cascade, FeasibilityLadder};
