use std::collections::HashMap;

use crate::error::ScalarizeError;
use crate::instance::{ProblemInstance, TinyIlpInstance};

use super::{ExplicitSetBackend, ScalarizationAnswer, ScalarizationQuery, Scalarizer, Witness};

/// Box enumeration cap for [`TinyIlpBackend`].
pub const MAX_ILP_POINTS: u128 = 1 << 22;

/// Enumerates every integer point in the variable box once, keeps the
/// feasible images and answers queries over them.
pub struct TinyIlpBackend {
    images: ExplicitSetBackend,
    witnesses: Vec<Witness>,
}

impl TinyIlpBackend {
    pub fn new(ilp: &TinyIlpInstance) -> Result<TinyIlpBackend, ScalarizeError> {
        ProblemInstance::TinyIlp(ilp.clone()).validate()?;
        let points = ilp
            .lower
            .iter()
            .zip(&ilp.upper)
            .try_fold(1u128, |acc, (&l, &u)| {
                acc.checked_mul((u as i128 - l as i128 + 1) as u128)
            })
            .filter(|&p| p <= MAX_ILP_POINTS)
            .ok_or_else(|| {
                ScalarizeError::TooLarge(format!("variable box exceeds {MAX_ILP_POINTS} points"))
            })?;

        let dot = |row: &[i64], x: &[i64]| -> Result<i64, ScalarizeError> {
            row.iter()
                .zip(x)
                .try_fold(0i64, |acc, (&a, &v)| acc.checked_add(a.checked_mul(v)?))
                .ok_or_else(|| ScalarizeError::Overflow("linear form".into()))
        };

        let mut seen: HashMap<Vec<i64>, usize> = HashMap::new();
        let mut images = Vec::new();
        let mut witnesses = Vec::new();
        let mut x = ilp.lower.clone();
        for _ in 0..points {
            let mut feasible = true;
            for (row, &b) in ilp.constraints.iter().zip(&ilp.rhs) {
                if dot(row, &x)? > b {
                    feasible = false;
                    break;
                }
            }
            if feasible {
                let y = ilp
                    .objectives
                    .iter()
                    .map(|row| dot(row, &x))
                    .collect::<Result<Vec<_>, _>>()?;
                if !seen.contains_key(&y) {
                    seen.insert(y.clone(), images.len());
                    images.push(y);
                    witnesses.push(x.clone());
                }
            }
            // odometer step
            for ((xj, &lo), &hi) in x.iter_mut().zip(&ilp.lower).zip(&ilp.upper) {
                if *xj < hi {
                    *xj += 1;
                    break;
                }
                *xj = lo;
            }
        }
        Ok(TinyIlpBackend {
            images: ExplicitSetBackend::new(ilp.k(), images)?,
            witnesses,
        })
    }

    /// Number of distinct feasible images.
    pub fn image_count(&self) -> usize {
        self.images.len()
    }
}

impl Scalarizer for TinyIlpBackend {
    fn k(&self) -> usize {
        self.images.k()
    }

    fn solve(&self, query: &ScalarizationQuery) -> Result<ScalarizationAnswer, ScalarizeError> {
        let inner = ScalarizationQuery::new(query.parameter.clone());
        Ok(match self.images.solve(&inner)? {
            ScalarizationAnswer::Optimal { image, witness } => ScalarizationAnswer::Optimal {
                image,
                witness: self.witnesses[witness[0] as usize].clone(),
            },
            ScalarizationAnswer::Infeasible => ScalarizationAnswer::Infeasible,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combination::Parameter;
    use crate::value::Extended::{Finite, PlusInf};

    fn assignment_like() -> TinyIlpInstance {
        // x1 + x2 + x3 >= 1 written as -x1 - x2 - x3 <= -1
        TinyIlpInstance {
            objectives: vec![vec![3, 1, 2], vec![1, 3, 2]],
            constraints: vec![vec![-1, -1, -1], vec![1, 1, 1]],
            rhs: vec![-1, 2],
            lower: vec![0; 3],
            upper: vec![1; 3],
        }
    }

    #[test]
    fn enumerates_distinct_images() {
        let b = TinyIlpBackend::new(&assignment_like()).unwrap();
        // singles (3,1) (1,3) (2,2); pairs (4,4) (5,3) (3,5)
        assert_eq!(b.image_count(), 6);
    }

    #[test]
    fn witness_reproduces_image() {
        let ilp = assignment_like();
        let b = TinyIlpBackend::new(&ilp).unwrap();
        for eps in [PlusInf, Finite(3), Finite(2), Finite(1)] {
            let q = ScalarizationQuery::new(Parameter::new(vec![eps]));
            match b.solve(&q).unwrap() {
                ScalarizationAnswer::Optimal { image, witness } => {
                    let y: Vec<i64> = ilp
                        .objectives
                        .iter()
                        .map(|r| r.iter().zip(&witness).map(|(a, v)| a * v).sum())
                        .collect();
                    assert_eq!(image.values(), y);
                }
                ScalarizationAnswer::Infeasible => assert_eq!(eps, Finite(1)),
            }
        }
    }

    #[test]
    fn oversized_box_is_rejected() {
        let ilp = TinyIlpInstance {
            objectives: vec![vec![1; 8], vec![1; 8]],
            constraints: vec![],
            rhs: vec![],
            lower: vec![0; 8],
            upper: vec![10; 8],
        };
        assert!(matches!(
            TinyIlpBackend::new(&ilp),
            Err(ScalarizeError::TooLarge(_))
        ));
    }
}
