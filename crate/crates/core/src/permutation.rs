//! Objective orderings.

use std::fmt;

use crate::error::InstanceError;

/// A bijection on the objective indices `0..k`.
///
/// `map(i)` is the zero-based `σ(i + 1) - 1`. Applying a permutation to a
/// coordinate vector yields `out[i] = v[σ(i)]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    sigma: Vec<usize>,
}

impl Permutation {
    pub fn identity(k: usize) -> Permutation {
        Permutation {
            sigma: (0..k).collect(),
        }
    }

    /// Builds a permutation from zero-based images, rejecting anything that
    /// is not a bijection.
    pub fn new(sigma: Vec<usize>) -> Result<Permutation, InstanceError> {
        let k = sigma.len();
        let mut seen = vec![false; k];
        for &s in &sigma {
            if s >= k || seen[s] {
                return Err(InstanceError::InvalidPermutation(format!(
                    "{sigma:?} is not a bijection on 0..{k}"
                )));
            }
            seen[s] = true;
        }
        Ok(Permutation { sigma })
    }

    /// Builds a permutation from the one-based notation `(σ(1), ..., σ(k))`.
    pub fn from_one_based(sigma: &[usize]) -> Result<Permutation, InstanceError> {
        if sigma.contains(&0) {
            return Err(InstanceError::InvalidPermutation(format!(
                "{sigma:?}: one-based entries must be positive"
            )));
        }
        Permutation::new(sigma.iter().map(|s| s - 1).collect())
    }

    /// The ordering `σ^r = (k, k-1, ..., r+1, 1, 2, ..., r)` used to compute
    /// the nested level sets; `r` is one-based, `σ^k` is the identity.
    pub fn level(k: usize, r: usize) -> Permutation {
        assert!((1..=k).contains(&r), "level {r} out of range 1..={k}");
        let sigma = (0..k)
            .map(|i| if i < k - r { k - 1 - i } else { i - (k - r) })
            .collect();
        Permutation { sigma }
    }

    pub fn k(&self) -> usize {
        self.sigma.len()
    }

    pub fn map(&self, i: usize) -> usize {
        self.sigma[i]
    }

    pub fn is_identity(&self) -> bool {
        self.sigma.iter().enumerate().all(|(i, &s)| i == s)
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.k()];
        for (i, &s) in self.sigma.iter().enumerate() {
            inv[s] = i;
        }
        Permutation { sigma: inv }
    }

    pub fn apply<T: Clone>(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.k(), "permutation size mismatch");
        self.sigma.iter().map(|&s| v[s].clone()).collect()
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.sigma.iter().map(|s| s + 1).collect()
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "σ{:?}", self.one_based())
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.one_based().iter().map(|s| s.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_permutations() {
        assert!(Permutation::level(4, 4).is_identity());
        assert_eq!(Permutation::level(4, 1).one_based(), vec![4, 3, 2, 1]);
        assert_eq!(Permutation::level(3, 2).one_based(), vec![3, 1, 2]);
        assert_eq!(Permutation::level(3, 1).one_based(), vec![3, 2, 1]);
        assert_eq!(Permutation::level(5, 3).one_based(), vec![5, 4, 1, 2, 3]);
    }

    #[test]
    fn level_matches_closed_form() {
        for k in 2..7 {
            for r in 1..=k {
                let s = Permutation::level(k, r).one_based();
                for j in 1..=k {
                    let expected = if j <= k - r { k - j + 1 } else { r + j - k };
                    assert_eq!(s[j - 1], expected, "k={k} r={r} j={j}");
                }
            }
        }
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::from_one_based(&[1, 1, 2]).is_err());
        assert!(Permutation::from_one_based(&[0, 1, 2]).is_err());
        assert!(Permutation::new(vec![0, 3, 1]).is_err());
    }

    #[test]
    fn inverse_law() {
        let s = Permutation::from_one_based(&[3, 1, 2]).unwrap();
        let v = vec![10, 20, 30];
        assert_eq!(s.apply(&v), vec![30, 10, 20]);
        assert_eq!(s.inverse().apply(&s.apply(&v)), v);
        assert_eq!(s.to_string(), "3,1,2");
    }
}
