//! Points of the image space, including the dummy images.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use crate::permutation::Permutation;
use crate::value::{Extended, ExtendedValue};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ImageKind {
    Real,
    /// Dummy image `d^t` (zero-based `t`).
    Dummy(usize),
}

/// A point in the k-dimensional image space.
///
/// Coordinates are shared, so cloning an image (and thereby a combination)
/// is cheap.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Image {
    coords: Arc<[ExtendedValue]>,
    kind: ImageKind,
}

impl Image {
    /// A real image. Panics if fewer than two objectives are given.
    pub fn real(values: &[i64]) -> Image {
        assert!(values.len() >= 2, "images need at least two objectives");
        Image {
            coords: values.iter().map(|&v| Extended::Finite(v)).collect(),
            kind: ImageKind::Real,
        }
    }

    /// The dummy image `d^t`: `+inf` in coordinate `t`, `-inf` elsewhere.
    pub fn dummy(t: usize, k: usize) -> Image {
        assert!(k >= 2, "images need at least two objectives");
        assert!(t < k, "dummy index {t} out of range for k = {k}");
        Image {
            coords: (0..k)
                .map(|i| {
                    if i == t {
                        Extended::PlusInf
                    } else {
                        Extended::MinusInf
                    }
                })
                .collect(),
            kind: ImageKind::Dummy(t),
        }
    }

    pub fn k(&self) -> usize {
        self.coords.len()
    }

    pub fn kind(&self) -> ImageKind {
        self.kind
    }

    pub fn is_dummy(&self) -> bool {
        matches!(self.kind, ImageKind::Dummy(_))
    }

    pub fn coord(&self, i: usize) -> ExtendedValue {
        self.coords[i]
    }

    pub fn coords(&self) -> &[ExtendedValue] {
        &self.coords
    }

    /// Finite coordinates of a real image. Panics on a dummy.
    pub fn values(&self) -> Vec<i64> {
        assert!(!self.is_dummy(), "dummy images have no finite coordinates");
        self.coords.iter().map(|c| c.finite()).collect()
    }

    /// Reorders coordinates so that coordinate `i` of the result is
    /// coordinate `sigma(i)` of `self`.
    pub fn permuted(&self, sigma: &Permutation) -> Image {
        assert_eq!(sigma.k(), self.k(), "permutation size mismatch");
        let coords: Arc<[ExtendedValue]> = sigma.apply(&self.coords).into();
        let kind = match self.kind {
            ImageKind::Real => ImageKind::Real,
            ImageKind::Dummy(t) => ImageKind::Dummy(sigma.inverse().map(t)),
        };
        Image { coords, kind }
    }
}

impl fmt::Debug for Image {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ImageKind::Dummy(t) => write!(f, "d^{}", t + 1),
            ImageKind::Real => {
                f.write_str("(")?;
                for (i, c) in self.coords.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Compares the coordinate sequences `(a_{σ(k)}, ..., a_{σ(1)})` and
/// `(b_{σ(k)}, ..., b_{σ(1)})` lexicographically.
pub fn lex_cmp<T: Ord>(a: &[T], b: &[T], sigma: &Permutation) -> Ordering {
    assert_eq!(a.len(), b.len(), "dimension mismatch");
    assert_eq!(a.len(), sigma.k(), "permutation size mismatch");
    for pos in (0..sigma.k()).rev() {
        let j = sigma.map(pos);
        match a[j].cmp(&b[j]) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

/// Reversed-lexicographic comparison under the identity ordering:
/// the last objective is most significant.
pub fn rev_lex_cmp<T: Ord>(a: &[T], b: &[T]) -> Ordering {
    assert_eq!(a.len(), b.len(), "dimension mismatch");
    a.iter().rev().cmp(b.iter().rev())
}

/// Strict lexicographic order on real images used by the scalarization
/// under objective ordering `sigma`.
pub fn lex_less(a: &Image, b: &Image, sigma: &Permutation) -> bool {
    assert!(
        !a.is_dummy() && !b.is_dummy(),
        "lex_less expects real images"
    );
    lex_cmp(a.coords(), b.coords(), sigma) == Ordering::Less
}

/// Pareto dominance on raw coordinates: `a <= b` componentwise and `a != b`.
pub fn dominates_values<T: Ord>(a: &[T], b: &[T]) -> bool {
    assert_eq!(a.len(), b.len(), "dimension mismatch");
    let mut strict = false;
    for (x, y) in a.iter().zip(b) {
        match x.cmp(y) {
            Ordering::Greater => return false,
            Ordering::Less => strict = true,
            Ordering::Equal => {}
        }
    }
    strict
}

pub fn dominates(a: &Image, b: &Image) -> bool {
    assert!(
        !a.is_dummy() && !b.is_dummy(),
        "dominates expects real images"
    );
    dominates_values(a.coords(), b.coords())
}
