use std::cmp::Ordering;

use crate::error::{InstanceError, ScalarizeError};
use crate::image::{rev_lex_cmp, Image};

use super::{check_dimension, ScalarizationAnswer, ScalarizationQuery, Scalarizer};

/// Reference scalarizer over an explicit image list: filter by the strict
/// bounds, return the lexicographic minimum. Witness is the image's index.
pub fn solve_explicit(images: &[Image], query: &ScalarizationQuery) -> ScalarizationAnswer {
    let bounds = query.parameter.bounds();
    let mut best: Option<(usize, &Image)> = None;
    for (idx, y) in images.iter().enumerate() {
        assert_eq!(y.k(), bounds.len() + 1, "dimension mismatch");
        let feasible = bounds.iter().zip(y.coords()).all(|(b, c)| c < b);
        if !feasible {
            continue;
        }
        let better = match best {
            None => true,
            Some((_, incumbent)) => rev_lex_cmp(y.coords(), incumbent.coords()) == Ordering::Less,
        };
        if better {
            best = Some((idx, y));
        }
    }
    match best {
        Some((idx, y)) => ScalarizationAnswer::Optimal {
            image: y.clone(),
            witness: vec![idx as i64],
        },
        None => ScalarizationAnswer::Infeasible,
    }
}

/// Explicit-set backend. Images are presorted in the scalarization's
/// lexicographic order, so the first admissible one is optimal.
pub struct ExplicitSetBackend {
    k: usize,
    /// Row-major, sorted.
    rows: Vec<i64>,
    /// Sorted position -> index in the original list.
    original: Vec<usize>,
    /// Original index -> sorted position.
    position: Vec<usize>,
}

impl ExplicitSetBackend {
    pub fn new(k: usize, images: Vec<Vec<i64>>) -> Result<ExplicitSetBackend, ScalarizeError> {
        if k < 2 {
            return Err(InstanceError::TooFewObjectives(k).into());
        }
        if let Some(bad) = images.iter().find(|y| y.len() != k) {
            return Err(InstanceError::DimensionMismatch {
                expected: k,
                got: bad.len(),
            }
            .into());
        }
        let mut order: Vec<usize> = (0..images.len()).collect();
        order.sort_by(|&a, &b| rev_lex_cmp(&images[a], &images[b]));
        let mut position = vec![0; images.len()];
        let mut rows = Vec::with_capacity(images.len() * k);
        for (pos, &idx) in order.iter().enumerate() {
            position[idx] = pos;
            rows.extend_from_slice(&images[idx]);
        }
        Ok(ExplicitSetBackend {
            k,
            rows,
            original: order,
            position,
        })
    }

    pub fn len(&self) -> usize {
        self.original.len()
    }

    pub fn is_empty(&self) -> bool {
        self.original.is_empty()
    }

    fn row(&self, pos: usize) -> &[i64] {
        &self.rows[pos * self.k..(pos + 1) * self.k]
    }
}

impl Scalarizer for ExplicitSetBackend {
    fn k(&self) -> usize {
        self.k
    }

    fn solve(&self, query: &ScalarizationQuery) -> Result<ScalarizationAnswer, ScalarizeError> {
        check_dimension(self.k, query)?;
        let Some(limits) = query.parameter.limits() else {
            return Ok(ScalarizationAnswer::Infeasible);
        };
        let admits = |row: &[i64]| row.iter().zip(&limits).all(|(v, l)| v <= l);
        // An admissible incumbent caps the scan: nothing after it can win.
        let end = query
            .incumbent
            .as_ref()
            .and_then(|w| w.first())
            .and_then(|&idx| usize::try_from(idx).ok())
            .filter(|&idx| idx < self.len())
            .map(|idx| self.position[idx])
            .filter(|&pos| admits(self.row(pos)))
            .map_or(self.len(), |pos| pos + 1);
        for pos in 0..end {
            let row = self.row(pos);
            if admits(row) {
                return Ok(ScalarizationAnswer::Optimal {
                    image: Image::real(row),
                    witness: vec![self.original[pos] as i64],
                });
            }
        }
        Ok(ScalarizationAnswer::Infeasible)
    }
}
