//! Problem instances the shipped backends understand.
//!
//! All instances are minimization problems internally. Knapsack instances
//! keep their (maximized) profits; their objective values are the negated
//! profit sums, and [`ProblemInstance::report_values`] maps them back.

use std::collections::HashSet;

use crate::error::InstanceError;
use crate::permutation::Permutation;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// 0-1 multi-objective knapsack: maximize each `profits[i] . x` subject to
/// `weights . x <= capacity`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnapsackInstance {
    pub profits: Vec<Vec<i64>>,
    pub weights: Vec<i64>,
    pub capacity: i64,
}

impl KnapsackInstance {
    pub fn k(&self) -> usize {
        self.profits.len()
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    /// Minimization-form objective coefficients (negated profits).
    pub fn costs(&self) -> Vec<Vec<i64>> {
        self.profits
            .iter()
            .map(|row| row.iter().map(|p| -p).collect())
            .collect()
    }
}

/// A small integer program: minimize each `objectives[i] . x` subject to
/// `constraints . x <= rhs` and `lower <= x <= upper`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TinyIlpInstance {
    pub objectives: Vec<Vec<i64>>,
    pub constraints: Vec<Vec<i64>>,
    pub rhs: Vec<i64>,
    pub lower: Vec<i64>,
    pub upper: Vec<i64>,
}

impl TinyIlpInstance {
    pub fn k(&self) -> usize {
        self.objectives.len()
    }

    pub fn n(&self) -> usize {
        self.lower.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProblemInstance {
    /// The feasible images are listed explicitly (`f = id`).
    ExplicitSet {
        k: usize,
        images: Vec<Vec<i64>>,
    },
    Knapsack(KnapsackInstance),
    TinyIlp(TinyIlpInstance),
}

impl ProblemInstance {
    /// Builds an explicit-set instance from image rows.
    pub fn explicit(k: usize, images: Vec<Vec<i64>>) -> Result<ProblemInstance, InstanceError> {
        let p = ProblemInstance::ExplicitSet { k, images };
        p.validate()?;
        Ok(p)
    }

    pub fn k(&self) -> usize {
        match self {
            ProblemInstance::ExplicitSet { k, .. } => *k,
            ProblemInstance::Knapsack(kp) => kp.k(),
            ProblemInstance::TinyIlp(ilp) => ilp.k(),
        }
    }

    /// Number of decision variables; the image count for explicit sets.
    pub fn size(&self) -> usize {
        match self {
            ProblemInstance::ExplicitSet { images, .. } => images.len(),
            ProblemInstance::Knapsack(kp) => kp.n(),
            ProblemInstance::TinyIlp(ilp) => ilp.n(),
        }
    }

    pub fn sense(&self) -> Sense {
        match self {
            ProblemInstance::Knapsack(_) => Sense::Maximize,
            _ => Sense::Minimize,
        }
    }

    /// Converts internal (minimization) objective values to the instance's
    /// own convention.
    pub fn report_values(&self, values: &[i64]) -> Vec<i64> {
        match self.sense() {
            Sense::Minimize => values.to_vec(),
            Sense::Maximize => values.iter().map(|v| -v).collect(),
        }
    }

    pub fn validate(&self) -> Result<(), InstanceError> {
        let k = self.k();
        if k < 2 {
            return Err(InstanceError::TooFewObjectives(k));
        }
        let check_len = |row: &[i64], expected: usize| {
            if row.len() == expected {
                Ok(())
            } else {
                Err(InstanceError::DimensionMismatch {
                    expected,
                    got: row.len(),
                })
            }
        };
        match self {
            ProblemInstance::ExplicitSet { images, .. } => {
                let mut seen = HashSet::with_capacity(images.len());
                for (index, y) in images.iter().enumerate() {
                    check_len(y, k)?;
                    if !seen.insert(y.as_slice()) {
                        return Err(InstanceError::DuplicateImage { index });
                    }
                }
            }
            ProblemInstance::Knapsack(kp) => {
                let n = kp.n();
                for row in &kp.profits {
                    check_len(row, n)?;
                }
                if let Some((item, &weight)) = kp.weights.iter().enumerate().find(|(_, &w)| w < 0) {
                    return Err(InstanceError::NegativeWeight { item, weight });
                }
                if kp.capacity < 0 {
                    return Err(InstanceError::NegativeCapacity(kp.capacity));
                }
            }
            ProblemInstance::TinyIlp(ilp) => {
                let n = ilp.n();
                check_len(&ilp.upper, n)?;
                for row in ilp.objectives.iter().chain(&ilp.constraints) {
                    check_len(row, n)?;
                }
                check_len(&ilp.rhs, ilp.constraints.len())?;
                for (var, (&lower, &upper)) in ilp.lower.iter().zip(&ilp.upper).enumerate() {
                    if lower > upper {
                        return Err(InstanceError::EmptyDomain { var, lower, upper });
                    }
                }
            }
        }
        Ok(())
    }
}

/// An instance with reordered objectives plus the ordering that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutedInstance {
    pub instance: ProblemInstance,
    pub sigma: Permutation,
}

impl PermutedInstance {
    /// Maps objective values of the permuted instance back to the original
    /// objective order.
    pub fn restore(&self, values: &[i64]) -> Vec<i64> {
        self.sigma.inverse().apply(values)
    }
}

/// Rewrites `p` so that objective `i` of the result is objective `σ(i)` of
/// the input.
pub fn permute_problem(
    p: &ProblemInstance,
    sigma: &Permutation,
) -> Result<PermutedInstance, InstanceError> {
    if sigma.k() != p.k() {
        return Err(InstanceError::InvalidPermutation(format!(
            "permutation of size {} applied to a {}-objective instance",
            sigma.k(),
            p.k()
        )));
    }
    let instance = match p {
        ProblemInstance::ExplicitSet { k, images } => ProblemInstance::ExplicitSet {
            k: *k,
            images: images.iter().map(|y| sigma.apply(y)).collect(),
        },
        ProblemInstance::Knapsack(kp) => ProblemInstance::Knapsack(KnapsackInstance {
            profits: sigma.apply(&kp.profits),
            ..kp.clone()
        }),
        ProblemInstance::TinyIlp(ilp) => ProblemInstance::TinyIlp(TinyIlpInstance {
            objectives: sigma.apply(&ilp.objectives),
            ..ilp.clone()
        }),
    };
    Ok(PermutedInstance {
        instance,
        sigma: sigma.clone(),
    })
}
