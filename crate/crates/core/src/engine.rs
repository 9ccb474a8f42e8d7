//! Parallel depth-first traversal of the scion tree.
//!
//! Every node of the tree is a combination of `k - 1` images. Solving the
//! scalarization at its parameter yields an optimum `y*`, which is stored if
//! the node passes [`storage_rule`] and spawns one child per index returned
//! by [`scion_candidates`]. Each child becomes an independent task on a
//! work-stealing pool.

use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering as AtomicOrdering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use crate::combination::{viable_parameter, Combination, Parameter};
use crate::error::{EngineError, ScalarizeError};
use crate::image::{rev_lex_cmp, Image};
use crate::instance::{permute_problem, ProblemInstance};
use crate::permutation::Permutation;
use crate::scalarizer::{
    backend_for, ScalarizationAnswer, ScalarizationQuery, Scalarizer, Witness,
};
use crate::warmstart::FeasibilityLadder;

const WORKER_STACK: usize = 256 << 20;

/// Run configuration shared by the plain engine and the warm-start cascade.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EngineConfig {
    /// Worker budget; 1 selects plain sequential recursion.
    pub threads: usize,
    /// Objective ordering applied to the instance before solving.
    pub order: Option<Permutation>,
    /// Compute the nested level sets first and use them to prune queries.
    pub cascade: bool,
    /// Pass feasible lower-level solutions to the backend as incumbents.
    pub warm_start: bool,
    /// Record one [`NodeRecord`] per explored node.
    pub instrument: bool,
    /// Re-solve every pruned query and count the ones that were feasible.
    pub verify_skips: bool,
    /// Leading member positions that keep their dummy for the whole run.
    pub pinned_prefix: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            threads: 1,
            order: None,
            cascade: false,
            warm_start: true,
            instrument: false,
            verify_skips: false,
            pinned_prefix: 0,
        }
    }
}

impl EngineConfig {
    pub fn with_threads(threads: usize) -> EngineConfig {
        EngineConfig {
            threads,
            ..EngineConfig::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StoredImage {
    pub image: Image,
    pub witness: Witness,
}

/// Provenance of one explored node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeRecord {
    pub combination: Combination,
    pub parent: Option<Combination>,
    /// Member index replaced to obtain this node from its parent.
    pub scion_index: Option<usize>,
    pub depth: usize,
    /// `None` when the query was infeasible or skipped.
    pub optimum: Option<Image>,
    pub stored: bool,
    pub skipped: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PhaseTimings {
    pub setup: Duration,
    pub traversal: Duration,
    pub collect: Duration,
}

impl PhaseTimings {
    pub fn total(&self) -> Duration {
        self.setup + self.traversal + self.collect
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunReport {
    /// Sorted by the scalarization order (last objective most significant).
    pub nondominated: Vec<StoredImage>,
    /// Backend calls.
    pub scalarizations_solved: u64,
    /// Explored tree nodes, solved or skipped.
    pub nodes: u64,
    pub skipped: u64,
    /// Backend answers that were `Infeasible`.
    pub infeasible_count: u64,
    pub incumbent_hits: u64,
    /// Skipped queries that a forced re-solve found feasible.
    pub skip_violations: u64,
    pub duplicate_stores: u64,
    pub timings: PhaseTimings,
    pub threads: usize,
    pub max_depth: usize,
    /// Tasks started per worker; the last slot counts the calling thread.
    pub tasks_per_thread: Vec<u64>,
    pub provenance: Option<Vec<NodeRecord>>,
}

impl RunReport {
    pub fn images(&self) -> Vec<Vec<i64>> {
        self.nondominated.iter().map(|s| s.image.values()).collect()
    }
}

/// Decision taken before a query reaches the backend.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Screen {
    Skip,
    Solve { incumbent: Option<Witness> },
}

/// Hook consulted before every backend call.
pub trait Prescreen: Sync {
    fn screen(&self, parameter: &Parameter) -> Screen;
}

/// For each member `i` and each coordinate `j > i`: `c^i_j <= y*_j`.
pub fn storage_rule(c: &Combination, y_star: &Image) -> bool {
    c.members()
        .iter()
        .enumerate()
        .all(|(i, m)| (i + 1..y_star.k()).all(|j| m.coord(j) <= y_star.coord(j)))
}

/// Scions of `c` with optimum `y_star`, in ascending member index.
pub fn scion_candidates(c: &Combination, y_star: &Image) -> Vec<(usize, Combination)> {
    scion_candidates_from(c, y_star, 0)
}

/// Like [`scion_candidates`] but only replaces members at `first..`.
pub fn scion_candidates_from(
    c: &Combination,
    y_star: &Image,
    first: usize,
) -> Vec<(usize, Combination)> {
    let members = c.members();
    (first..members.len())
        .filter(|&l| {
            members
                .iter()
                .enumerate()
                .all(|(i, m)| i == l || y_star.coord(l) >= m.coord(l))
        })
        .map(|l| (l, c.replaced(l, y_star.clone())))
        .collect()
}

struct Node {
    combination: Combination,
    parent: Option<Combination>,
    scion_index: Option<usize>,
    depth: usize,
}

struct Shared<'a> {
    backend: &'a dyn Scalarizer,
    prescreen: Option<&'a dyn Prescreen>,
    config: &'a EngineConfig,
    solved: AtomicU64,
    nodes: AtomicU64,
    skipped: AtomicU64,
    infeasible: AtomicU64,
    incumbent_hits: AtomicU64,
    skip_violations: AtomicU64,
    max_depth: AtomicUsize,
    tasks: Vec<AtomicU64>,
    stored: Mutex<Vec<StoredImage>>,
    records: Mutex<Vec<NodeRecord>>,
    abort: AtomicBool,
    failure: Mutex<Option<ScalarizeError>>,
}

impl<'a> Shared<'a> {
    fn fail(&self, e: ScalarizeError) {
        let mut slot = self.failure.lock().unwrap();
        if slot.is_none() {
            *slot = Some(e);
        }
        self.abort.store(true, AtomicOrdering::SeqCst);
    }

    fn count_task(&self) {
        let slot = rayon::current_thread_index()
            .filter(|&i| i + 1 < self.tasks.len())
            .unwrap_or(self.tasks.len() - 1);
        self.tasks[slot].fetch_add(1, AtomicOrdering::Relaxed);
    }

    fn flush(&self, local: &mut Vec<StoredImage>) {
        if !local.is_empty() {
            self.stored.lock().unwrap().append(local);
        }
    }

    /// Visits one node and returns its children.
    fn visit(&self, node: &Node, local: &mut Vec<StoredImage>) -> Vec<Node> {
        self.nodes.fetch_add(1, AtomicOrdering::Relaxed);
        self.max_depth
            .fetch_max(node.depth, AtomicOrdering::Relaxed);
        let parameter = viable_parameter(&node.combination);

        let screen = match self.prescreen {
            Some(p) => p.screen(&parameter),
            None => Screen::Solve { incumbent: None },
        };
        let answer = match screen {
            Screen::Skip => {
                self.skipped.fetch_add(1, AtomicOrdering::Relaxed);
                if self.config.verify_skips {
                    match self.backend.solve(&ScalarizationQuery::new(parameter)) {
                        Ok(a) if !a.is_infeasible() => {
                            self.skip_violations.fetch_add(1, AtomicOrdering::Relaxed);
                        }
                        Ok(_) => {}
                        Err(e) => self.fail(e),
                    }
                }
                self.record(node, None, false, true);
                return Vec::new();
            }
            Screen::Solve { incumbent } => {
                if incumbent.is_some() {
                    self.incumbent_hits.fetch_add(1, AtomicOrdering::Relaxed);
                }
                let query = ScalarizationQuery {
                    parameter,
                    incumbent,
                    order: self.config.order.clone(),
                };
                self.solved.fetch_add(1, AtomicOrdering::Relaxed);
                match self.backend.solve(&query) {
                    Ok(a) => a,
                    Err(e) => {
                        self.fail(e);
                        return Vec::new();
                    }
                }
            }
        };

        let ScalarizationAnswer::Optimal { image, witness } = answer else {
            self.infeasible.fetch_add(1, AtomicOrdering::Relaxed);
            self.record(node, None, false, false);
            return Vec::new();
        };
        let store = storage_rule(&node.combination, &image);
        self.record(node, Some(&image), store, false);
        let children = scion_candidates_from(&node.combination, &image, self.config.pinned_prefix)
            .into_iter()
            .map(|(l, combination)| Node {
                combination,
                parent: self.config.instrument.then(|| node.combination.clone()),
                scion_index: Some(l),
                depth: node.depth + 1,
            })
            .collect();
        if store {
            local.push(StoredImage { image, witness });
        }
        children
    }

    fn record(&self, node: &Node, optimum: Option<&Image>, stored: bool, skipped: bool) {
        if self.config.instrument {
            self.records.lock().unwrap().push(NodeRecord {
                combination: node.combination.clone(),
                parent: node.parent.clone(),
                scion_index: node.scion_index,
                depth: node.depth,
                optimum: optimum.cloned(),
                stored,
                skipped,
            });
        }
    }

    fn explore_sequential(&self, node: Node, local: &mut Vec<StoredImage>) {
        if self.abort.load(AtomicOrdering::Relaxed) {
            return;
        }
        for child in self.visit(&node, local) {
            self.explore_sequential(child, local);
        }
    }

    fn explore_task<'s>(&'s self, scope: &rayon::Scope<'s>, node: Node) {
        self.count_task();
        let mut local = Vec::new();
        let mut next = Some(node);
        while let Some(node) = next.take() {
            if self.abort.load(AtomicOrdering::Relaxed) {
                break;
            }
            let mut children = self.visit(&node, &mut local).into_iter();
            next = children.next();
            for child in children {
                scope.spawn(move |s| self.explore_task(s, child));
            }
        }
        self.flush(&mut local);
    }
}

/// Runs the traversal from the root against `backend`.
pub fn run(backend: &dyn Scalarizer, config: &EngineConfig) -> Result<RunReport, EngineError> {
    run_with_prescreen(backend, config, None)
}

pub fn run_with_prescreen(
    backend: &dyn Scalarizer,
    config: &EngineConfig,
    prescreen: Option<&dyn Prescreen>,
) -> Result<RunReport, EngineError> {
    let k = backend.k();
    if k < 2 {
        return Err(EngineError::Config(format!(
            "need at least two objectives, got {k}"
        )));
    }
    if config.threads == 0 {
        return Err(EngineError::Config(
            "thread budget must be at least 1".into(),
        ));
    }
    if config.pinned_prefix > k - 1 {
        return Err(EngineError::Config(format!(
            "cannot pin {} of {} members",
            config.pinned_prefix,
            k - 1
        )));
    }
    let started = Instant::now();
    let shared = Shared {
        backend,
        prescreen,
        config,
        solved: AtomicU64::new(0),
        nodes: AtomicU64::new(0),
        skipped: AtomicU64::new(0),
        infeasible: AtomicU64::new(0),
        incumbent_hits: AtomicU64::new(0),
        skip_violations: AtomicU64::new(0),
        max_depth: AtomicUsize::new(0),
        tasks: (0..=config.threads).map(|_| AtomicU64::new(0)).collect(),
        stored: Mutex::new(Vec::new()),
        records: Mutex::new(Vec::new()),
        abort: AtomicBool::new(false),
        failure: Mutex::new(None),
    };
    let root = Node {
        combination: Combination::root(k),
        parent: None,
        scion_index: None,
        depth: 0,
    };

    let traversal_start = Instant::now();
    if config.threads == 1 {
        std::thread::scope(|s| {
            std::thread::Builder::new()
                .stack_size(WORKER_STACK)
                .spawn_scoped(s, || {
                    shared.count_task();
                    let mut local = Vec::new();
                    shared.explore_sequential(root, &mut local);
                    shared.flush(&mut local);
                })
                .expect("failed to start traversal thread")
                .join()
                .expect("traversal thread panicked");
        });
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .stack_size(WORKER_STACK)
            .build()
            .map_err(|e| EngineError::Config(format!("cannot build thread pool: {e}")))?;
        pool.scope(|s| shared.explore_task(s, root));
    }
    let traversal = traversal_start.elapsed();

    let collect_start = Instant::now();
    let mut stored = shared.stored.into_inner().unwrap();
    stored.sort_by(|a, b| rev_lex_cmp(a.image.coords(), b.image.coords()));
    let before = stored.len();
    stored.dedup_by(|a, b| a.image == b.image);
    let duplicate_stores = (before - stored.len()) as u64;
    let provenance = config
        .instrument
        .then(|| shared.records.into_inner().unwrap());
    let report = RunReport {
        nondominated: stored,
        scalarizations_solved: shared.solved.into_inner(),
        nodes: shared.nodes.into_inner(),
        skipped: shared.skipped.into_inner(),
        infeasible_count: shared.infeasible.into_inner(),
        incumbent_hits: shared.incumbent_hits.into_inner(),
        skip_violations: shared.skip_violations.into_inner(),
        duplicate_stores,
        timings: PhaseTimings {
            setup: traversal_start - started,
            traversal,
            collect: collect_start.elapsed(),
        },
        threads: config.threads,
        max_depth: shared.max_depth.into_inner(),
        tasks_per_thread: shared
            .tasks
            .into_iter()
            .map(AtomicU64::into_inner)
            .collect(),
        provenance,
    };
    match shared.failure.into_inner().unwrap() {
        Some(source) => Err(EngineError::Backend {
            source,
            partial: Box::new(report),
        }),
        None => Ok(report),
    }
}

/// Solves `instance` end to end: applies the configured objective order,
/// builds the matching backend, runs the plain engine or the cascade and
/// maps the images back to the instance's own objective order.
pub fn run_instance(
    instance: &ProblemInstance,
    config: &EngineConfig,
) -> Result<RunReport, EngineError> {
    run_instance_with_ladder(instance, config).map(|(_, report)| report)
}

/// Like [`run_instance`], also returning the level sets when the cascade is
/// enabled. Images in both are in the instance's own objective order.
pub fn run_instance_with_ladder(
    instance: &ProblemInstance,
    config: &EngineConfig,
) -> Result<(Option<FeasibilityLadder>, RunReport), EngineError> {
    let setup_start = Instant::now();
    instance.validate().map_err(ScalarizeError::from)?;
    let sigma = config
        .order
        .clone()
        .unwrap_or_else(|| Permutation::identity(instance.k()));
    let permuted = permute_problem(instance, &sigma).map_err(ScalarizeError::from)?;
    let (mut ladder, mut report) = if config.cascade {
        let (ladder, report) = crate::warmstart::run_cascade(&permuted.instance, config)?;
        (Some(ladder), report)
    } else {
        let backend = backend_for(&permuted.instance)?;
        let setup = setup_start.elapsed();
        let mut report = run(backend.as_ref(), config)?;
        report.timings.setup += setup;
        (None, report)
    };
    if !sigma.is_identity() {
        let restore = |set: &mut Vec<StoredImage>| {
            for s in set.iter_mut() {
                s.image = Image::real(&permuted.restore(&s.image.values()));
            }
            set.sort_by(|a, b| rev_lex_cmp(a.image.coords(), b.image.coords()));
        };
        restore(&mut report.nondominated);
        for level in ladder.iter_mut().flat_map(|l| l.levels.iter_mut()) {
            restore(level);
        }
    }
    Ok((ladder, report))
}

/// Groups provenance records by combination; used to check that every node
/// is visited once and has a single parent.
pub fn visit_counts(records: &[NodeRecord]) -> HashMap<&Combination, usize> {
    let mut counts = HashMap::new();
    for r in records {
        *counts.entry(&r.combination).or_insert(0) += 1;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalarizer::ExplicitSetBackend;
    use crate::value::Extended;

    fn ex21() -> Vec<Vec<i64>> {
        vec![vec![4, 1, 2, 1], vec![2, 4, 3, 2], vec![1, 3, 4, 3]]
    }

    fn y(v: &[i64]) -> Image {
        Image::real(v)
    }

    fn d(t: usize, k: usize) -> Image {
        Image::dummy(t, k)
    }

    #[test]
    fn root_stores_anything() {
        let root = Combination::root(4);
        assert!(storage_rule(&root, &y(&[9, 9, 9, 9])));
        let scions = scion_candidates(&root, &y(&[4, 1, 2, 1]));
        let expected: Vec<Combination> =
            (0..3).map(|l| root.replaced(l, y(&[4, 1, 2, 1]))).collect();
        assert_eq!(
            scions.into_iter().map(|(_, c)| c).collect::<Vec<_>>(),
            expected
        );
    }

    #[test]
    fn scions_of_second_level_node() {
        let y1 = y(&[4, 1, 2, 1]);
        let y2 = y(&[2, 4, 3, 2]);
        let c = Combination::new(vec![y1.clone(), d(1, 4), d(2, 4)]);
        let ls: Vec<usize> = scion_candidates(&c, &y2)
            .into_iter()
            .map(|(l, _)| l)
            .collect();
        assert_eq!(ls, vec![0, 1, 2]);
    }

    #[test]
    fn node_with_two_children() {
        let y2 = y(&[2, 4, 3, 2]);
        let y3 = y(&[1, 3, 4, 3]);
        let c = Combination::new(vec![y2.clone(), d(1, 4), d(2, 4)]);
        let children: Vec<Combination> = scion_candidates(&c, &y3)
            .into_iter()
            .map(|(_, c)| c)
            .collect();
        assert_eq!(
            children,
            vec![
                Combination::new(vec![y3.clone(), d(1, 4), d(2, 4)]),
                Combination::new(vec![y2, d(1, 4), y3]),
            ]
        );
    }

    #[test]
    fn storage_example_from_three_objective_set() {
        let y1 = y(&[5, 4, 1]);
        let y3 = y(&[6, 2, 4]);
        let y4 = y(&[3, 3, 5]);
        assert!(storage_rule(&Combination::new(vec![y3, y1]), &y4));

        let set = vec![vec![5, 4, 1], vec![2, 6, 2], vec![6, 2, 4], vec![3, 3, 5]];
        let b = ExplicitSetBackend::new(3, set).unwrap();
        let cfg = EngineConfig {
            instrument: true,
            ..EngineConfig::default()
        };
        let records = run(&b, &cfg).unwrap().provenance.unwrap();
        let storing: Vec<&Combination> = records
            .iter()
            .filter(|r| r.stored && r.optimum.as_ref() == Some(&y4))
            .map(|r| &r.combination)
            .collect();
        assert_eq!(
            storing,
            vec![&Combination::new(vec![y(&[6, 2, 4]), y(&[5, 4, 1])])]
        );
    }

    #[test]
    fn four_objective_run() {
        let b = ExplicitSetBackend::new(4, ex21()).unwrap();
        for threads in [1, 2, 4] {
            let cfg = EngineConfig {
                instrument: true,
                ..EngineConfig::with_threads(threads)
            };
            let r = run(&b, &cfg).unwrap();
            assert_eq!(r.scalarizations_solved, 11);
            assert_eq!(r.infeasible_count, 7);
            assert_eq!(r.nondominated.len(), 3);
            assert_eq!(r.duplicate_stores, 0);
            let records = r.provenance.unwrap();
            assert!(visit_counts(&records).values().all(|&c| c == 1));
            assert!(r.tasks_per_thread.iter().sum::<u64>() >= 1);
        }
    }

    #[test]
    fn empty_instance_solves_root_only() {
        let b = ExplicitSetBackend::new(3, vec![]).unwrap();
        let r = run(&b, &EngineConfig::default()).unwrap();
        assert_eq!(r.scalarizations_solved, 1);
        assert!(r.nondominated.is_empty());
    }

    #[test]
    fn config_errors_are_reported_before_solving() {
        let b =
            ExplicitSetBackend::new(3, ex21().iter().map(|v| v[..3].to_vec()).collect()).unwrap();
        let zero = EngineConfig::with_threads(0);
        assert!(matches!(run(&b, &zero), Err(EngineError::Config(_))));
        let pinned = EngineConfig {
            pinned_prefix: 3,
            ..EngineConfig::default()
        };
        assert!(matches!(run(&b, &pinned), Err(EngineError::Config(_))));
    }

    struct Failing;

    impl Scalarizer for Failing {
        fn k(&self) -> usize {
            3
        }

        fn solve(&self, q: &ScalarizationQuery) -> Result<ScalarizationAnswer, ScalarizeError> {
            if q.parameter.bounds()[0] == Extended::PlusInf
                && q.parameter.bounds()[1] == Extended::PlusInf
            {
                Ok(ScalarizationAnswer::Optimal {
                    image: Image::real(&[1, 1, 1]),
                    witness: vec![],
                })
            } else {
                Err(ScalarizeError::Overflow("test".into()))
            }
        }
    }

    #[test]
    fn backend_failure_carries_partial_report() {
        for threads in [1, 3] {
            match run(&Failing, &EngineConfig::with_threads(threads)) {
                Err(EngineError::Backend { source, partial }) => {
                    assert_eq!(source, ScalarizeError::Overflow("test".into()));
                    assert!(partial.scalarizations_solved >= 2);
                    assert_eq!(partial.nondominated.len(), 1);
                }
                other => panic!("expected backend failure, got {other:?}"),
            }
        }
    }

    #[test]
    fn custom_order_maps_results_back() {
        let set = vec![
            vec![5, 4, 2],
            vec![2, 6, 3],
            vec![6, 2, 4],
            vec![3, 3, 5],
            vec![2, 5, 5],
            vec![5, 2, 6],
        ];
        let p = ProblemInstance::explicit(3, set.clone()).unwrap();
        let plain = run_instance(&p, &EngineConfig::default()).unwrap();
        let cfg = EngineConfig {
            order: Some(Permutation::from_one_based(&[3, 1, 2]).unwrap()),
            ..EngineConfig::default()
        };
        let reordered = run_instance(&p, &cfg).unwrap();
        assert_eq!(plain.images(), reordered.images());
        let mut expected = set;
        expected.sort_by(|a, b| rev_lex_cmp(a, b));
        assert_eq!(plain.images(), expected);
    }
}
