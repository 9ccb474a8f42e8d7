//! Seeded instances shared by the benchmarks.

use scion_core::io::{generate_instance, parse_instance, GeneratorKind, SetShape};
use scion_core::ProblemInstance;

/// A Simplex-shaped explicit set; most of its images are nondominated.
pub fn dense_set(k: usize, m: usize, seed: u64) -> ProblemInstance {
    let kind = GeneratorKind::ExplicitSet {
        shape: SetShape::Simplex,
        general_position: false,
    };
    parse_instance(&generate_instance(kind, k, m, seed), None).expect("generator output parses")
}

/// A knapsack with profits and weights uniform in the generator range.
pub fn knapsack(k: usize, n: usize, seed: u64) -> ProblemInstance {
    parse_instance(
        &generate_instance(GeneratorKind::Knapsack, k, n, seed),
        None,
    )
    .expect("generator output parses")
}
