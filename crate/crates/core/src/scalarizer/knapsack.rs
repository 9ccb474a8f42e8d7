//! Staged depth-first branch-and-bound for 0-1 multi-objective knapsacks.
//!
//! The lexicographic objective is solved one stage at a time, last objective
//! first. Each stage minimizes a single objective subject to the capacity,
//! the parameter bounds and equality pins on all objectives optimized in
//! earlier stages. The solution of one stage seeds the next.

use std::cmp::Ordering;

use crate::error::ScalarizeError;
use crate::image::{rev_lex_cmp, Image};
use crate::instance::{KnapsackInstance, ProblemInstance};

use super::{check_dimension, ScalarizationAnswer, ScalarizationQuery, Scalarizer, Witness};

/// Largest item count the exhaustive cross-check accepts by default.
pub const DEFAULT_VERIFY_THRESHOLD: usize = 20;

pub struct KnapsackBackend {
    k: usize,
    n: usize,
    /// Minimization-form coefficients, `k x n`.
    costs: Vec<Vec<i64>>,
    weights: Vec<i64>,
    capacity: i64,
    /// Per objective: items sorted by cost/weight ratio, best first.
    orders: Vec<Vec<usize>>,
    verify: bool,
}

impl KnapsackBackend {
    pub fn new(instance: &KnapsackInstance) -> Result<KnapsackBackend, ScalarizeError> {
        ProblemInstance::Knapsack(instance.clone()).validate()?;
        let costs = instance.costs();
        // Bounding every partial sum up front keeps the search overflow free.
        for (i, row) in costs.iter().enumerate() {
            row.iter()
                .try_fold(0i64, |acc, c| acc.checked_add(c.checked_abs()?))
                .ok_or_else(|| {
                    ScalarizeError::Overflow(format!("objective {} coefficient sum", i + 1))
                })?;
        }
        instance
            .weights
            .iter()
            .try_fold(0i64, |acc, &w| acc.checked_add(w))
            .ok_or_else(|| ScalarizeError::Overflow("weight sum".into()))?;

        let orders = costs
            .iter()
            .map(|row| ratio_order(row, &instance.weights))
            .collect();
        Ok(KnapsackBackend {
            k: instance.k(),
            n: instance.n(),
            costs,
            weights: instance.weights.clone(),
            capacity: instance.capacity,
            orders,
            verify: false,
        })
    }

    /// Cross-checks every answer against exhaustive enumeration. Refused for
    /// instances with more than `threshold` items.
    pub fn with_verification(
        mut self,
        threshold: usize,
    ) -> Result<KnapsackBackend, ScalarizeError> {
        if self.n > threshold {
            return Err(ScalarizeError::TooLarge(format!(
                "exhaustive verification limited to {threshold} items, instance has {}",
                self.n
            )));
        }
        self.verify = true;
        Ok(self)
    }

    fn values(&self, x: &[bool]) -> Vec<i64> {
        self.costs
            .iter()
            .map(|row| {
                row.iter()
                    .zip(x)
                    .filter(|(_, &on)| on)
                    .map(|(c, _)| c)
                    .sum()
            })
            .collect()
    }

    fn decode_incumbent(&self, w: &Witness) -> Option<Vec<bool>> {
        if w.len() != self.n || w.iter().any(|&v| v != 0 && v != 1) {
            return None;
        }
        Some(w.iter().map(|&v| v == 1).collect())
    }

    fn solve_staged(&self, limits: &[i64], incumbent: Option<Vec<bool>>) -> Option<Vec<bool>> {
        let mut lo = vec![i64::MIN; self.k];
        let mut hi = vec![i64::MAX; self.k];
        hi[..self.k - 1].copy_from_slice(limits);
        let mut seed = incumbent;
        for t in (0..self.k).rev() {
            let mut stage = Stage::new(self, t, &lo, &hi, seed.take());
            stage.run();
            let (value, x) = stage.into_best()?;
            lo[t] = value;
            hi[t] = value;
            seed = Some(x);
        }
        seed
    }
}

impl Scalarizer for KnapsackBackend {
    fn k(&self) -> usize {
        self.k
    }

    fn solve(&self, query: &ScalarizationQuery) -> Result<ScalarizationAnswer, ScalarizeError> {
        check_dimension(self.k, query)?;
        let answer = match query.parameter.limits() {
            None => ScalarizationAnswer::Infeasible,
            Some(limits) => {
                let incumbent = query
                    .incumbent
                    .as_ref()
                    .and_then(|w| self.decode_incumbent(w));
                match self.solve_staged(&limits, incumbent) {
                    None => ScalarizationAnswer::Infeasible,
                    Some(x) => ScalarizationAnswer::Optimal {
                        image: Image::real(&self.values(&x)),
                        witness: x.iter().map(|&b| b as i64).collect(),
                    },
                }
            }
        };
        if self.verify {
            let expected =
                exhaustive_knapsack_answer(&self.costs, &self.weights, self.capacity, query);
            if expected.image() != answer.image() {
                return Err(ScalarizeError::VerificationMismatch(format!(
                    "branch-and-bound returned {:?}, enumeration {:?} for {:?}",
                    answer.image(),
                    expected.image(),
                    query.parameter
                )));
            }
        }
        Ok(answer)
    }
}

/// Items sorted for the fractional bound of one objective: zero-weight
/// improving items, then positive weights by ascending cost/weight, then
/// zero-weight non-improving items. Ties keep index order.
fn ratio_order(costs: &[i64], weights: &[i64]) -> Vec<usize> {
    let class = |i: usize| match (weights[i], costs[i] < 0) {
        (0, true) => 0,
        (0, false) => 2,
        _ => 1,
    };
    let mut order: Vec<usize> = (0..costs.len()).collect();
    order.sort_by(|&a, &b| {
        class(a).cmp(&class(b)).then_with(|| {
            if class(a) == 1 {
                let lhs = costs[a] as i128 * weights[b] as i128;
                let rhs = costs[b] as i128 * weights[a] as i128;
                lhs.cmp(&rhs)
            } else {
                Ordering::Equal
            }
        })
    });
    order
}

struct Stage<'a> {
    backend: &'a KnapsackBackend,
    t: usize,
    order: &'a [usize],
    lo: &'a [i64],
    hi: &'a [i64],
    /// `suffix_neg[i][p]`: sum of negative coefficients of objective `i`
    /// over `order[p..]`; `suffix_pos` likewise for positive ones.
    suffix_neg: Vec<Vec<i64>>,
    suffix_pos: Vec<Vec<i64>>,
    x: Vec<bool>,
    current: Vec<i64>,
    weight: i64,
    best: Option<(i64, Vec<bool>)>,
}

impl<'a> Stage<'a> {
    fn new(
        backend: &'a KnapsackBackend,
        t: usize,
        lo: &'a [i64],
        hi: &'a [i64],
        seed: Option<Vec<bool>>,
    ) -> Stage<'a> {
        let order = &backend.orders[t];
        let n = backend.n;
        let mut suffix_neg = vec![vec![0; n + 1]; backend.k];
        let mut suffix_pos = vec![vec![0; n + 1]; backend.k];
        for i in 0..backend.k {
            for p in (0..n).rev() {
                let c = backend.costs[i][order[p]];
                suffix_neg[i][p] = suffix_neg[i][p + 1] + c.min(0);
                suffix_pos[i][p] = suffix_pos[i][p + 1] + c.max(0);
            }
        }
        let mut stage = Stage {
            backend,
            t,
            order,
            lo,
            hi,
            suffix_neg,
            suffix_pos,
            x: vec![false; n],
            current: vec![0; backend.k],
            weight: 0,
            best: None,
        };
        if let Some(seed) = seed {
            if stage.is_feasible(&seed) {
                let value = backend.values(&seed)[t];
                stage.best = Some((value, seed));
            }
        }
        stage
    }

    fn is_feasible(&self, x: &[bool]) -> bool {
        let w: i64 = self
            .backend
            .weights
            .iter()
            .zip(x)
            .filter(|(_, &on)| on)
            .map(|(w, _)| w)
            .sum();
        w <= self.backend.capacity
            && self
                .backend
                .values(x)
                .iter()
                .enumerate()
                .all(|(i, &v)| self.lo[i] <= v && v <= self.hi[i])
    }

    fn into_best(self) -> Option<(i64, Vec<bool>)> {
        self.best
    }

    fn run(&mut self) {
        self.dfs(0);
    }

    /// Lower bound on the stage objective over completions from position
    /// `p`, relaxing integrality and every constraint except capacity.
    fn relaxed_bound(&self, p: usize) -> i64 {
        let costs = &self.backend.costs[self.t];
        let weights = &self.backend.weights;
        let mut residual = (self.backend.capacity - self.weight) as i128;
        let mut total = self.current[self.t] as i128;
        for &item in &self.order[p..] {
            let (c, w) = (costs[item] as i128, weights[item] as i128);
            if c >= 0 {
                if w > 0 {
                    break;
                }
                continue;
            }
            if w <= residual {
                total += c;
                residual -= w;
            } else {
                // c * residual / w < 0; truncating division rounds it up,
                // which keeps the bound valid for integer objectives.
                total += c * residual / w;
                break;
            }
        }
        total as i64
    }

    fn dfs(&mut self, p: usize) {
        let k = self.backend.k;
        for i in 0..k {
            if self.current[i] + self.suffix_neg[i][p] > self.hi[i]
                || self.current[i] + self.suffix_pos[i][p] < self.lo[i]
            {
                return;
            }
        }
        if p == self.order.len() {
            let value = self.current[self.t];
            if self.best.as_ref().is_none_or(|(b, _)| value < *b) {
                self.best = Some((value, self.x.clone()));
            }
            return;
        }
        if let Some((best, _)) = self.best {
            if self.relaxed_bound(p) >= best {
                return;
            }
        }
        let item = self.order[p];
        let fits = self.weight + self.backend.weights[item] <= self.backend.capacity;
        if self.backend.costs[self.t][item] < 0 {
            if fits {
                self.with_item(item, p);
            }
            self.dfs(p + 1);
        } else {
            self.dfs(p + 1);
            if fits {
                self.with_item(item, p);
            }
        }
    }

    fn with_item(&mut self, item: usize, p: usize) {
        self.x[item] = true;
        self.weight += self.backend.weights[item];
        for i in 0..self.backend.k {
            self.current[i] += self.backend.costs[i][item];
        }
        self.dfs(p + 1);
        self.x[item] = false;
        self.weight -= self.backend.weights[item];
        for i in 0..self.backend.k {
            self.current[i] -= self.backend.costs[i][item];
        }
    }
}

/// Lexicographic optimum by enumerating all `2^n` packings. Witness is the
/// first optimal packing in enumeration order.
pub fn exhaustive_knapsack_answer(
    costs: &[Vec<i64>],
    weights: &[i64],
    capacity: i64,
    query: &ScalarizationQuery,
) -> ScalarizationAnswer {
    let n = weights.len();
    assert!(n < 63, "exhaustive enumeration needs n < 63");
    let bounds = query.parameter.bounds();
    let mut best: Option<(Vec<i64>, u64)> = None;
    for mask in 0u64..(1 << n) {
        let on = |j: usize| mask >> j & 1 == 1;
        let w: i64 = (0..n).filter(|&j| on(j)).map(|j| weights[j]).sum();
        if w > capacity {
            continue;
        }
        let y: Vec<i64> = costs
            .iter()
            .map(|row| (0..n).filter(|&j| on(j)).map(|j| row[j]).sum())
            .collect();
        if !bounds
            .iter()
            .zip(&y)
            .all(|(b, &v)| crate::value::Extended::Finite(v) < *b)
        {
            continue;
        }
        if best
            .as_ref()
            .is_none_or(|(b, _)| rev_lex_cmp(&y, b) == Ordering::Less)
        {
            best = Some((y, mask));
        }
    }
    match best {
        None => ScalarizationAnswer::Infeasible,
        Some((y, mask)) => ScalarizationAnswer::Optimal {
            image: Image::real(&y),
            witness: (0..n).map(|j| (mask >> j & 1) as i64).collect(),
        },
    }
}
