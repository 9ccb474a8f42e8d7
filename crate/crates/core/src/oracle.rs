//! Brute-force reference computations used to check the engine.
//!
//! Nothing here shares code paths with the engine beyond the basic image
//! types: nondominated filtering is pairwise, scalarizations are solved by
//! scanning, and combinations are enumerated breadth first over a perturbed
//! copy of the nondominated set in exact rational arithmetic.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet, VecDeque};

use num_rational::Ratio;
use num_traits::Zero;

use crate::combination::{Combination, Parameter};
use crate::engine::{run_instance, EngineConfig, NodeRecord, RunReport};
use crate::error::{EngineError, ScalarizeError};
use crate::image::{dominates_values, rev_lex_cmp, Image};
use crate::instance::{KnapsackInstance, ProblemInstance, TinyIlpInstance};
use crate::value::{Extended, ExtendedValue};

pub type Rational = Ratio<i128>;

/// Largest nondominated set the combination enumeration accepts.
pub const MAX_ORACLE_IMAGES: usize = 200;
/// Largest objective count the combination enumeration accepts.
pub const MAX_ORACLE_K: usize = 5;
/// Largest item count for exhaustive knapsack enumeration.
pub const MAX_EXHAUSTIVE_ITEMS: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalImage {
    pub coords: Vec<Rational>,
}

impl RationalImage {
    pub fn from_integers(v: &[i64]) -> RationalImage {
        RationalImage {
            coords: v
                .iter()
                .map(|&x| Rational::from_integer(x as i128))
                .collect(),
        }
    }
}

/// Pairwise dominance filter. Duplicates collapse to one copy; the result
/// is sorted by the scalarization order.
pub fn brute_nondominated(images: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = Vec::new();
    for (i, y) in images.iter().enumerate() {
        let beaten = images.iter().any(|z| dominates_values(z, y));
        let repeated = images[..i].contains(y);
        if !beaten && !repeated {
            out.push(y.clone());
        }
    }
    out.sort_by(|a, b| rev_lex_cmp(a, b));
    out
}

/// Second filter: after an ascending lexicographic sort, a point can only be
/// dominated by points sorted before it, so one sweep against the kept
/// prefix suffices.
pub fn sweep_nondominated(images: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut sorted = images.to_vec();
    sorted.sort();
    sorted.dedup();
    let mut kept: Vec<Vec<i64>> = Vec::new();
    for y in sorted {
        if !kept.iter().any(|z| z.iter().zip(&y).all(|(a, b)| a <= b)) {
            kept.push(y);
        }
    }
    kept.sort_by(|a, b| rev_lex_cmp(a, b));
    kept
}

/// Perturbs a reversed-lex sorted nondominated set into general position:
/// the `i`-th image (1-based) gets `i * delta / (K + 1)` added to every
/// coordinate value that some earlier image already uses.
///
/// Panics if `y_n` is not strictly sorted.
pub fn phi_perturb(y_n: &[Vec<i64>], delta: Rational) -> Vec<RationalImage> {
    assert!(
        y_n.windows(2)
            .all(|w| rev_lex_cmp(&w[0], &w[1]) == Ordering::Less),
        "phi_perturb needs input strictly sorted by the scalarization order"
    );
    let big_k = y_n.len() as i128;
    y_n.iter()
        .enumerate()
        .map(|(idx, y)| {
            let shift =
                delta * Rational::from_integer(idx as i128 + 1) / Rational::from_integer(big_k + 1);
            RationalImage {
                coords: y
                    .iter()
                    .enumerate()
                    .map(|(j, &v)| {
                        let base = Rational::from_integer(v as i128);
                        if y_n[..idx].iter().any(|s| s[j] == v) {
                            base + shift
                        } else {
                            base
                        }
                    })
                    .collect(),
            }
        })
        .collect()
}

/// The perturbation constant used when none is given.
pub fn default_delta() -> Rational {
    Rational::new(1, 2)
}

/// No two points share a value in any coordinate.
pub fn is_general_position<T: Eq + std::hash::Hash>(points: &[Vec<T>]) -> bool {
    let Some(k) = points.first().map(Vec::len) else {
        return true;
    };
    (0..k).all(|j| {
        let mut seen = HashSet::new();
        points.iter().all(|p| seen.insert(&p[j]))
    })
}

/// Member of an index-based combination.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Slot {
    Dummy(usize),
    Point(usize),
}

/// One node of the enumerated tree, mapped back to original images.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleNode {
    pub combination: Combination,
    pub optimum: Option<Image>,
    /// Index of the parent within the returned list.
    pub parent: Option<usize>,
}

type RExt = Extended<Rational>;

fn slot_coord(slot: Slot, j: usize, phi: &[RationalImage]) -> RExt {
    match slot {
        Slot::Dummy(t) if t == j => Extended::PlusInf,
        Slot::Dummy(_) => Extended::MinusInf,
        Slot::Point(p) => Extended::Finite(phi[p].coords[j]),
    }
}

/// Enumerates the combinations the engine must visit on the nondominated
/// set `y_n`: the scion tree of the perturbed set, traversed breadth first,
/// with members mapped back to the original images.
pub fn enumerate_true_combinations(y_n: &[Vec<i64>], k: usize) -> Vec<OracleNode> {
    enumerate_true_combinations_with(y_n, k, default_delta())
}

pub fn enumerate_true_combinations_with(
    y_n: &[Vec<i64>],
    k: usize,
    delta: Rational,
) -> Vec<OracleNode> {
    assert!(k >= 2, "need at least two objectives");
    assert!(
        y_n.len() <= MAX_ORACLE_IMAGES && k <= MAX_ORACLE_K,
        "instance exceeds the oracle ceiling"
    );
    let mut sorted = y_n.to_vec();
    sorted.sort_by(|a, b| rev_lex_cmp(a, b));
    sorted.dedup();
    let phi = phi_perturb(&sorted, delta);

    // Reversed-lex minimum among perturbed points strictly below the bounds.
    // The sorted order is preserved by the perturbation, so the first
    // admissible index wins.
    let solve = |bounds: &[RExt]| -> Option<usize> {
        (0..phi.len()).find(|&p| {
            bounds
                .iter()
                .enumerate()
                .all(|(j, b)| Extended::Finite(phi[p].coords[j]) < *b)
        })
    };

    let mut out: Vec<OracleNode> = Vec::new();
    let mut seen: HashSet<Vec<Slot>> = HashSet::new();
    let mut queue: VecDeque<(Vec<Slot>, Option<usize>)> = VecDeque::new();
    queue.push_back(((0..k - 1).map(Slot::Dummy).collect(), None));
    while let Some((slots, parent)) = queue.pop_front() {
        assert!(
            seen.insert(slots.clone()),
            "combination reached twice: {slots:?}"
        );
        let bounds: Vec<RExt> = (0..k - 1).map(|i| slot_coord(slots[i], i, &phi)).collect();
        let optimum = solve(&bounds);
        let me = out.len();
        out.push(OracleNode {
            combination: Combination::new(
                slots
                    .iter()
                    .map(|&s| match s {
                        Slot::Dummy(t) => Image::dummy(t, k),
                        Slot::Point(p) => Image::real(&sorted[p]),
                    })
                    .collect(),
            ),
            optimum: optimum.map(|p| Image::real(&sorted[p])),
            parent,
        });
        let Some(p) = optimum else { continue };
        for l in 0..k - 1 {
            let y_l = Extended::Finite(phi[p].coords[l]);
            if (0..k - 1).all(|i| i == l || y_l > slot_coord(slots[i], l, &phi)) {
                let mut child = slots.clone();
                child[l] = Slot::Point(p);
                queue.push_back((child, Some(me)));
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpperBound {
    pub point: Vec<ExtendedValue>,
    /// Defining point `i` fixes coordinate `i`; dummies appear as
    /// [`Image::dummy`].
    pub defining_points: Vec<Image>,
}

fn candidate_coords(n: &[Vec<i64>], k: usize, i: usize) -> Vec<Vec<ExtendedValue>> {
    let mut out: Vec<Vec<ExtendedValue>> = n
        .iter()
        .map(|y| y.iter().map(|&v| Extended::Finite(v)).collect())
        .collect();
    out.push(Image::dummy(i, k).coords().to_vec());
    out
}

fn strictly_below(y: &[i64], u: &[ExtendedValue]) -> bool {
    y.iter().zip(u).all(|(&a, b)| Extended::Finite(a) < *b)
}

/// Local upper bounds of `n` in `k` objectives, found by choosing one
/// defining point per coordinate and keeping the tuples that certify a
/// point with nothing of `n` strictly below it.
pub fn enumerate_upper_bounds(n: &[Vec<i64>], k: usize) -> Vec<UpperBound> {
    // Only the dummy d^i can define coordinate i among the dummies: any
    // other dummy would put -inf in u_i, which nothing lies below.
    let cands: Vec<Vec<Vec<ExtendedValue>>> = (0..k).map(|i| candidate_coords(n, k, i)).collect();
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    let mut found: Vec<UpperBound> = Vec::new();
    let mut seen: HashSet<Vec<ExtendedValue>> = HashSet::new();

    fn extend(
        cands: &[Vec<Vec<ExtendedValue>>],
        n: &[Vec<i64>],
        chosen: &mut Vec<usize>,
        found: &mut Vec<UpperBound>,
        seen: &mut HashSet<Vec<ExtendedValue>>,
    ) {
        let k = cands.len();
        let i = chosen.len();
        if i == k {
            let u: Vec<ExtendedValue> = (0..k).map(|j| cands[j][chosen[j]][j]).collect();
            if n.iter().any(|y| strictly_below(y, &u)) || !seen.insert(u.clone()) {
                return;
            }
            let defining_points = (0..k)
                .map(|j| {
                    let c = chosen[j];
                    if c == n.len() {
                        Image::dummy(j, k)
                    } else {
                        Image::real(&n[c])
                    }
                })
                .collect();
            found.push(UpperBound {
                point: u,
                defining_points,
            });
            return;
        }
        for c in 0..cands[i].len() {
            let p = &cands[i][c];
            let compatible = chosen.iter().enumerate().all(|(j, &cj)| {
                let q = &cands[j][cj];
                p[j] < q[j] && q[i] < p[i]
            });
            if compatible {
                chosen.push(c);
                extend(cands, n, chosen, found, seen);
                chosen.pop();
            }
        }
    }

    extend(&cands, n, &mut chosen, &mut found, &mut seen);
    found.sort_by(|a, b| a.point.cmp(&b.point));
    found
}

/// Local upper bounds by checking the definition at every point of the
/// grid spanned by the image coordinates and `+inf`. Exponential in `k`;
/// used to cross-check [`enumerate_upper_bounds`] on small inputs.
pub fn upper_bounds_by_grid(n: &[Vec<i64>], k: usize) -> Vec<Vec<ExtendedValue>> {
    let axes: Vec<Vec<ExtendedValue>> = (0..k)
        .map(|j| {
            let mut axis: Vec<ExtendedValue> = n.iter().map(|y| Extended::Finite(y[j])).collect();
            axis.push(Extended::PlusInf);
            axis.sort();
            axis.dedup();
            axis
        })
        .collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; k];
    loop {
        let u: Vec<ExtendedValue> = (0..k).map(|j| axes[j][idx[j]]).collect();
        let empty = !n.iter().any(|y| strictly_below(y, &u));
        let defined = (0..k).all(|i| {
            let dummy = Image::dummy(i, k);
            std::iter::once(dummy.coords().to_vec())
                .chain(
                    n.iter()
                        .map(|y| y.iter().map(|&v| Extended::Finite(v)).collect()),
                )
                .any(|p: Vec<ExtendedValue>| p[i] == u[i] && (0..k).all(|j| j == i || p[j] < u[j]))
        });
        if empty && defined {
            out.push(u);
        }
        let mut j = 0;
        loop {
            if j == k {
                out.sort();
                return out;
            }
            idx[j] += 1;
            if idx[j] < axes[j].len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

/// The point `(ε(c), y*_k)` a solved combination corresponds to, with
/// `+inf` as last coordinate for infeasible queries.
pub fn upper_bound_of(c: &Combination, optimum: Option<&Image>) -> Vec<ExtendedValue> {
    let k = c.k();
    let mut u: Vec<ExtendedValue> = (0..k - 1).map(|i| c.member(i).coord(i)).collect();
    u.push(optimum.map_or(Extended::PlusInf, |y| y.coord(k - 1)));
    u
}

/// Whether `y` is the scalarization optimum over `y_n` at `eps`.
pub fn epsilon_component_member(y: &[i64], eps: &Parameter, y_n: &[Vec<i64>]) -> bool {
    let best = y_n
        .iter()
        .filter(|z| eps.admits(z))
        .min_by(|a, b| rev_lex_cmp(a, b));
    best.is_some_and(|b| b.as_slice() == y)
}

/// Same membership through the recursive description: `eps` lies above
/// `y` without its last coordinate and in no component of an image that
/// precedes `y` in the scalarization order.
pub fn epsilon_component_recursive(y: &[i64], eps: &Parameter, y_n: &[Vec<i64>]) -> bool {
    fn member(
        idx: usize,
        eps: &Parameter,
        sorted: &[Vec<i64>],
        memo: &mut HashMap<usize, bool>,
    ) -> bool {
        if let Some(&m) = memo.get(&idx) {
            return m;
        }
        let inside =
            eps.admits(&sorted[idx]) && (0..idx).all(|earlier| !member(earlier, eps, sorted, memo));
        memo.insert(idx, inside);
        inside
    }
    let mut sorted = y_n.to_vec();
    sorted.sort_by(|a, b| rev_lex_cmp(a, b));
    sorted.dedup();
    match sorted.iter().position(|z| z.as_slice() == y) {
        None => false,
        Some(idx) => member(idx, eps, &sorted, &mut HashMap::new()),
    }
}

/// Nested level set `r` (1-based) of a nondominated set, straight from its
/// recursive definition.
pub fn level_set(y_n: &[Vec<i64>], r: usize) -> Vec<Vec<i64>> {
    let k = y_n.first().map_or(r, Vec::len);
    assert!(r >= 1 && r <= k, "level {r} outside 1..={k}");
    let mut level: Vec<Vec<i64>> = y_n.to_vec();
    for q in (r..k).rev() {
        level.retain(|y| {
            !y_n.iter()
                .any(|z| z[..q].iter().zip(&y[..q]).all(|(a, b)| a <= b) && z[..q] != y[..q])
        });
    }
    level.sort_by(|a, b| rev_lex_cmp(a, b));
    level
}

/// Every image of a 0-1 knapsack in minimization form (negated profits),
/// with duplicates removed.
pub fn knapsack_images(kp: &KnapsackInstance) -> Vec<Vec<i64>> {
    let n = kp.n();
    assert!(n <= MAX_EXHAUSTIVE_ITEMS, "too many items to enumerate");
    let mut out = HashSet::new();
    for mask in 0u64..(1u64 << n) {
        let picked = |j: usize| mask >> j & 1 == 1;
        let w: i64 = (0..n).filter(|&j| picked(j)).map(|j| kp.weights[j]).sum();
        if w <= kp.capacity {
            out.insert(
                kp.profits
                    .iter()
                    .map(|row| -(0..n).filter(|&j| picked(j)).map(|j| row[j]).sum::<i64>())
                    .collect::<Vec<i64>>(),
            );
        }
    }
    out.into_iter().collect()
}

/// Every image of a tiny integer program, with duplicates removed.
pub fn ilp_images(ilp: &TinyIlpInstance) -> Vec<Vec<i64>> {
    let n = ilp.n();
    let mut out = HashSet::new();
    let mut x = ilp.lower.clone();
    let dot = |row: &[i64], x: &[i64]| row.iter().zip(x).map(|(a, b)| a * b).sum::<i64>();
    if ilp.lower.iter().zip(&ilp.upper).any(|(l, u)| l > u) {
        return Vec::new();
    }
    loop {
        if ilp
            .constraints
            .iter()
            .zip(&ilp.rhs)
            .all(|(row, &b)| dot(row, &x) <= b)
        {
            out.insert(
                ilp.objectives
                    .iter()
                    .map(|row| dot(row, &x))
                    .collect::<Vec<i64>>(),
            );
        }
        let mut j = 0;
        loop {
            if j == n {
                return out.into_iter().collect();
            }
            if x[j] < ilp.upper[j] {
                x[j] += 1;
                break;
            }
            x[j] = ilp.lower[j];
            j += 1;
        }
    }
}

/// All images of an instance, in minimization form.
pub fn all_images(instance: &ProblemInstance) -> Vec<Vec<i64>> {
    match instance {
        ProblemInstance::ExplicitSet { images, .. } => images.clone(),
        ProblemInstance::Knapsack(kp) => knapsack_images(kp),
        ProblemInstance::TinyIlp(ilp) => ilp_images(ilp),
    }
}

/// Outcome of checking one engine run against the brute-force references.
#[derive(Clone, Debug, Default)]
pub struct VerificationOutcome {
    pub nondominated: usize,
    pub scalarizations_solved: u64,
    /// `None` when the instance exceeds the enumeration ceiling.
    pub true_combinations: Option<usize>,
    pub upper_bounds: Option<usize>,
    pub general_position: bool,
    pub mismatches: Vec<String>,
}

impl VerificationOutcome {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Runs the engine with provenance recording and checks the result against
/// every applicable oracle.
pub fn verify_instance(
    instance: &ProblemInstance,
    config: &EngineConfig,
) -> Result<VerificationOutcome, EngineError> {
    if let ProblemInstance::Knapsack(kp) = instance {
        if kp.n() > MAX_EXHAUSTIVE_ITEMS {
            return Err(EngineError::Setup(ScalarizeError::TooLarge(format!(
                "verification enumerates all packings; limited to {MAX_EXHAUSTIVE_ITEMS} items"
            ))));
        }
    }
    let config = EngineConfig {
        instrument: true,
        verify_skips: true,
        ..config.clone()
    };
    let report = run_instance(instance, &config)?;
    Ok(check_report(
        instance,
        &report,
        config.order.is_none() && !config.cascade,
    ))
}

/// Compares a finished run with the oracles. Structural checks on the tree
/// need provenance in identity order from a plain run.
pub fn check_report(
    instance: &ProblemInstance,
    report: &RunReport,
    structural: bool,
) -> VerificationOutcome {
    let k = instance.k();
    let expected = brute_nondominated(&all_images(instance));
    let got = report.images();
    let mut out = VerificationOutcome {
        nondominated: got.len(),
        scalarizations_solved: report.scalarizations_solved,
        general_position: is_general_position(&expected),
        ..VerificationOutcome::default()
    };
    if got != expected {
        out.mismatches.push(format!(
            "engine found {} nondominated images, enumeration {}",
            got.len(),
            expected.len()
        ));
    }
    if report.duplicate_stores != 0 {
        out.mismatches.push(format!(
            "{} images stored more than once",
            report.duplicate_stores
        ));
    }
    if report.skip_violations != 0 {
        out.mismatches.push(format!(
            "{} skipped queries were feasible",
            report.skip_violations
        ));
    }
    let Some(records) = report.provenance.as_ref().filter(|_| structural) else {
        return out;
    };
    if let Some(problem) = tree_defect(records) {
        out.mismatches.push(problem);
    }
    if expected.len() <= MAX_ORACLE_IMAGES && k <= MAX_ORACLE_K {
        let nodes = enumerate_true_combinations(&expected, k);
        out.true_combinations = Some(nodes.len());
        let oracle_set: HashSet<&Combination> = nodes.iter().map(|n| &n.combination).collect();
        let engine_set: HashSet<&Combination> = records.iter().map(|r| &r.combination).collect();
        if oracle_set != engine_set || nodes.len() as u64 != report.scalarizations_solved {
            out.mismatches.push(format!(
                "engine explored {} combinations, enumeration {}",
                report.scalarizations_solved,
                nodes.len()
            ));
        }
        if k <= 4 && expected.len() <= 60 {
            let ubs = enumerate_upper_bounds(&expected, k);
            out.upper_bounds = Some(ubs.len());
            if out.general_position {
                if let Some(problem) = upper_bound_defect(records, &ubs) {
                    out.mismatches.push(problem);
                }
            }
        }
    }
    out
}

/// Checks that every combination was visited once and every non-root
/// node's recorded parent was itself visited.
pub fn tree_defect(records: &[NodeRecord]) -> Option<String> {
    let mut seen = HashSet::new();
    for r in records {
        if !seen.insert(&r.combination) {
            return Some(format!("combination {:?} explored twice", r.combination));
        }
    }
    let roots = records.iter().filter(|r| r.parent.is_none()).count();
    if roots != 1 {
        return Some(format!("{roots} nodes without a parent"));
    }
    records
        .iter()
        .filter_map(|r| r.parent.as_ref())
        .find(|p| !seen.contains(p))
        .map(|p| format!("parent {p:?} was never explored"))
}

/// Checks that solved combinations map to pairwise distinct local upper
/// bounds.
pub fn upper_bound_defect(records: &[NodeRecord], ubs: &[UpperBound]) -> Option<String> {
    let points: HashSet<&Vec<ExtendedValue>> = ubs.iter().map(|u| &u.point).collect();
    let mut hit = HashSet::new();
    for r in records.iter().filter(|r| !r.skipped) {
        let u = upper_bound_of(&r.combination, r.optimum.as_ref());
        if !points.contains(&u) {
            return Some(format!(
                "{:?} maps to {u:?}, not a local upper bound",
                r.combination
            ));
        }
        if !hit.insert(u.clone()) {
            return Some(format!("two combinations map to {u:?}"));
        }
    }
    None
}

/// `n / d` in lowest terms.
pub fn rational(n: i128, d: i128) -> Rational {
    assert!(!d.is_zero(), "zero denominator");
    Rational::new(n, d)
}
