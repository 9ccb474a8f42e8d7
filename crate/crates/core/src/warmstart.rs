//! Nested level sets computed from the bottom up.
//!
//! Level `r` keeps the nondominated images that no other nondominated image
//! beats in the first `r` objectives. Level `r` is found by solving the
//! instance under the objective ordering [`Permutation::level`] with the
//! first `k - r` combination members held at their dummies. Every query of
//! that run is feasible exactly when some level `r - 1` image satisfies its
//! bounds, so the previous level both prunes infeasible queries and supplies
//! incumbents.

use std::time::Instant;

use crate::combination::Parameter;
use crate::engine::{run_with_prescreen, EngineConfig, Prescreen, RunReport, Screen, StoredImage};
use crate::error::{EngineError, ScalarizeError};
use crate::image::{rev_lex_cmp, Image};
use crate::instance::{permute_problem, ProblemInstance};
use crate::permutation::Permutation;
use crate::scalarizer::backend_for;

/// Per-level run statistics.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LevelStats {
    pub level: usize,
    pub images: usize,
    pub scalarizations_solved: u64,
    pub skipped: u64,
    pub incumbent_hits: u64,
    pub skip_violations: u64,
}

/// `levels[r - 1]` holds level `r`, images in the instance's own objective
/// order.
#[derive(Clone, Debug, Default)]
pub struct FeasibilityLadder {
    pub levels: Vec<Vec<StoredImage>>,
    pub stats: Vec<LevelStats>,
}

impl FeasibilityLadder {
    pub fn level(&self, r: usize) -> &[StoredImage] {
        &self.levels[r - 1]
    }

    pub fn level_values(&self, r: usize) -> Vec<Vec<i64>> {
        self.level(r).iter().map(|s| s.image.values()).collect()
    }

    pub fn total_skipped(&self) -> u64 {
        self.stats.iter().map(|s| s.skipped).sum()
    }
}

struct LowerLevel {
    /// Lower level images in the permuted objective order of the current run.
    points: Vec<(Vec<i64>, StoredImage)>,
    warm_start: bool,
}

impl Prescreen for LowerLevel {
    fn screen(&self, parameter: &Parameter) -> Screen {
        let hit = self.points.iter().find(|(y, _)| parameter.admits(y));
        match hit {
            None => Screen::Skip,
            Some((_, s)) => Screen::Solve {
                incumbent: self.warm_start.then(|| s.witness.clone()),
            },
        }
    }
}

/// Computes level `r` (1-based) of `instance` given level `r - 1`.
pub fn compute_level(
    r: usize,
    lower_level: &[StoredImage],
    instance: &ProblemInstance,
    config: &EngineConfig,
) -> Result<RunReport, EngineError> {
    let k = instance.k();
    if r == 0 || r > k {
        return Err(EngineError::Config(format!("level {r} outside 1..={k}")));
    }
    let setup_start = Instant::now();
    let sigma = Permutation::level(k, r);
    let permuted = permute_problem(instance, &sigma).map_err(ScalarizeError::from)?;
    let backend = backend_for(&permuted.instance)?;
    let prescreen = (r > 1).then(|| LowerLevel {
        points: lower_level
            .iter()
            .map(|s| (sigma.apply(&s.image.values()), s.clone()))
            .collect(),
        warm_start: config.warm_start,
    });
    let level_config = EngineConfig {
        pinned_prefix: k - r,
        order: Some(sigma),
        cascade: false,
        ..config.clone()
    };
    let setup = setup_start.elapsed();
    let mut report = run_with_prescreen(
        backend.as_ref(),
        &level_config,
        prescreen.as_ref().map(|p| p as &dyn Prescreen),
    )?;
    report.timings.setup += setup;
    for s in &mut report.nondominated {
        s.image = Image::real(&permuted.restore(&s.image.values()));
    }
    report
        .nondominated
        .sort_by(|a, b| rev_lex_cmp(a.image.coords(), b.image.coords()));
    Ok(report)
}

/// Computes all levels `1..=k`; the returned report describes the whole
/// cascade and carries the final level as its nondominated set.
pub fn run_cascade(
    instance: &ProblemInstance,
    config: &EngineConfig,
) -> Result<(FeasibilityLadder, RunReport), EngineError> {
    let k = instance.k();
    let mut ladder = FeasibilityLadder::default();
    let mut total = RunReport {
        threads: config.threads,
        ..RunReport::default()
    };
    let mut lower: Vec<StoredImage> = Vec::new();
    for r in 1..=k {
        let level = compute_level(r, &lower, instance, config)?;
        ladder.stats.push(LevelStats {
            level: r,
            images: level.nondominated.len(),
            scalarizations_solved: level.scalarizations_solved,
            skipped: level.skipped,
            incumbent_hits: level.incumbent_hits,
            skip_violations: level.skip_violations,
        });
        total.scalarizations_solved += level.scalarizations_solved;
        total.nodes += level.nodes;
        total.skipped += level.skipped;
        total.infeasible_count += level.infeasible_count;
        total.incumbent_hits += level.incumbent_hits;
        total.skip_violations += level.skip_violations;
        total.duplicate_stores += level.duplicate_stores;
        total.timings.setup += level.timings.setup;
        total.timings.traversal += level.timings.traversal;
        total.timings.collect += level.timings.collect;
        total.max_depth = total.max_depth.max(level.max_depth);
        if total.tasks_per_thread.len() < level.tasks_per_thread.len() {
            total
                .tasks_per_thread
                .resize(level.tasks_per_thread.len(), 0);
        }
        for (t, n) in level.tasks_per_thread.iter().enumerate() {
            total.tasks_per_thread[t] += n;
        }
        if let Some(records) = level.provenance {
            total
                .provenance
                .get_or_insert_with(Vec::new)
                .extend(records);
        }
        lower = level.nondominated.clone();
        ladder.levels.push(level.nondominated);
    }
    total.nondominated = lower;
    Ok((ladder, total))
}
