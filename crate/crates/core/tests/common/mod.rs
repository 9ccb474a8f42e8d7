#![allow(dead_code)]

use std::path::PathBuf;

use scion_core::io::{generate_instance, parse_instance, read_instance, GeneratorKind, SetShape};
use scion_core::ProblemInstance;

pub fn fixture(name: &str) -> ProblemInstance {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name);
    read_instance(&path, None).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn explicit(
    k: usize,
    m: usize,
    seed: u64,
    shape: SetShape,
    general_position: bool,
) -> ProblemInstance {
    let kind = GeneratorKind::ExplicitSet {
        shape,
        general_position,
    };
    parse_instance(&generate_instance(kind, k, m, seed), None).unwrap()
}

pub fn knapsack(k: usize, n: usize, seed: u64) -> ProblemInstance {
    parse_instance(
        &generate_instance(GeneratorKind::Knapsack, k, n, seed),
        None,
    )
    .unwrap()
}

/// The 30 seeded instances: explicit sets for m in {20, 100, 500} and
/// k in {3, 4, 5} in both shapes, and knapsacks for n in {10, 14} and
/// k in {3, 4} with three seeds each.
pub fn corpus() -> Vec<(String, ProblemInstance)> {
    let mut out = Vec::new();
    for m in [20, 100, 500] {
        for k in [3, 4, 5] {
            for (seed, shape) in [(1, SetShape::Uniform), (2, SetShape::Simplex)] {
                out.push((
                    format!("set-m{m}-k{k}-{shape:?}"),
                    explicit(k, m, seed + 10 * m as u64 + k as u64, shape, false),
                ));
            }
        }
    }
    for n in [10, 14] {
        for k in [3, 4] {
            for seed in 0..3 {
                out.push((format!("kp-n{n}-k{k}-s{seed}"), knapsack(k, n, seed)));
            }
        }
    }
    out
}

/// General-position explicit sets with k <= 4 and m <= 60.
pub fn general_position_corpus() -> Vec<(String, ProblemInstance)> {
    let mut out = Vec::new();
    for k in [2, 3, 4] {
        for m in [10, 30, 60] {
            for (seed, shape) in [(3, SetShape::Uniform), (4, SetShape::Simplex)] {
                out.push((
                    format!("gp-m{m}-k{k}-{shape:?}"),
                    explicit(k, m, seed * 100 + m as u64 + k as u64, shape, true),
                ));
            }
        }
    }
    out
}

/// Smaller instances for the cascade checks.
pub fn cascade_corpus() -> Vec<(String, ProblemInstance)> {
    let mut out = Vec::new();
    for k in [3, 4] {
        for m in [20, 60, 150] {
            for (seed, shape) in [(5, SetShape::Uniform), (6, SetShape::Simplex)] {
                out.push((
                    format!("set-m{m}-k{k}-{shape:?}"),
                    explicit(k, m, seed * 1000 + m as u64 + k as u64, shape, false),
                ));
            }
        }
        out.push((format!("kp-n12-k{k}"), knapsack(k, 12, 40 + k as u64)));
    }
    out.push((
        "shared-coordinates".into(),
        fixture("shared_coordinates.txt"),
    ));
    out.push(("nested-levels".into(), fixture("nested_levels.txt")));
    out
}
