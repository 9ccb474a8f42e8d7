//! Combinations of `k - 1` images and the parameters they define.

use std::fmt;

use crate::image::Image;
use crate::value::{Extended, ExtendedValue};

/// Upper bounds on objectives `1..k-1`; `PlusInf` leaves an objective
/// unconstrained. The scalarization requires `f_i < bounds[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Parameter {
    bounds: Vec<ExtendedValue>,
}

impl Parameter {
    pub fn new(bounds: Vec<ExtendedValue>) -> Parameter {
        Parameter { bounds }
    }

    pub fn unconstrained(k: usize) -> Parameter {
        Parameter {
            bounds: vec![Extended::PlusInf; k - 1],
        }
    }

    pub fn bounds(&self) -> &[ExtendedValue] {
        &self.bounds
    }

    /// Number of objectives of the problem this parameter belongs to.
    pub fn k(&self) -> usize {
        self.bounds.len() + 1
    }

    /// Inclusive integer limits `f_i <= bounds[i] - 1`, `i64::MAX` where
    /// unconstrained. `None` if some bound admits no integer at all.
    pub fn limits(&self) -> Option<Vec<i64>> {
        self.bounds.iter().map(|b| b.strict_limit()).collect()
    }

    /// Whether `values` (a full k-vector) satisfies every strict bound.
    pub fn admits(&self, values: &[i64]) -> bool {
        assert_eq!(values.len(), self.k(), "dimension mismatch");
        self.bounds
            .iter()
            .zip(values)
            .all(|(b, &v)| Extended::Finite(v) < *b)
    }
}

/// An ordered tuple of `k - 1` images; member `i` supplies coordinate `i`
/// of the parameter.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Combination {
    members: Vec<Image>,
}

impl Combination {
    pub fn new(members: Vec<Image>) -> Combination {
        assert!(!members.is_empty(), "combinations need at least one member");
        let k = members.len() + 1;
        assert!(
            members.iter().all(|m| m.k() == k),
            "combination members must have k = {k} coordinates"
        );
        Combination { members }
    }

    /// The root `(d^1, ..., d^{k-1})`.
    pub fn root(k: usize) -> Combination {
        assert!(k >= 2, "need at least two objectives");
        Combination {
            members: (0..k - 1).map(|t| Image::dummy(t, k)).collect(),
        }
    }

    pub fn k(&self) -> usize {
        self.members.len() + 1
    }

    pub fn members(&self) -> &[Image] {
        &self.members
    }

    pub fn member(&self, i: usize) -> &Image {
        &self.members[i]
    }

    pub fn is_root(&self) -> bool {
        self.members
            .iter()
            .enumerate()
            .all(|(i, m)| m.kind() == crate::image::ImageKind::Dummy(i))
    }

    /// The combination with member `l` replaced by `image`.
    pub fn replaced(&self, l: usize, image: Image) -> Combination {
        let mut members = self.members.clone();
        members[l] = image;
        Combination { members }
    }
}

impl fmt::Debug for Combination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, m) in self.members.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{m:?}")?;
        }
        f.write_str(")")
    }
}

/// `ε(c) = (c^1_1, ..., c^{k-1}_{k-1})`.
pub fn viable_parameter(c: &Combination) -> Parameter {
    Parameter {
        bounds: c
            .members
            .iter()
            .enumerate()
            .map(|(i, m)| m.coord(i))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::Extended::{Finite, PlusInf};

    #[test]
    fn root_parameter_is_unconstrained() {
        let root = Combination::root(4);
        assert!(root.is_root());
        assert_eq!(viable_parameter(&root), Parameter::unconstrained(4));
    }

    #[test]
    fn parameters_from_members() {
        let y1 = Image::real(&[4, 1, 2, 1]);
        let y2 = Image::real(&[2, 4, 3, 2]);
        let c = Combination::root(4).replaced(0, y1.clone());
        assert!(!c.is_root());
        assert_eq!(
            viable_parameter(&c).bounds(),
            &[Finite(4), PlusInf, PlusInf]
        );
        let c = c.replaced(1, y2);
        assert_eq!(
            viable_parameter(&c).bounds(),
            &[Finite(4), Finite(4), PlusInf]
        );
        assert_eq!(format!("{c:?}"), "((4,1,2,1), (2,4,3,2), d^3)");
    }

    #[test]
    fn admits_uses_strict_bounds() {
        let p = Parameter::new(vec![Finite(4), PlusInf]);
        assert!(p.admits(&[3, 100, 0]));
        assert!(!p.admits(&[4, 0, 0]));
        assert_eq!(p.limits(), Some(vec![3, i64::MAX]));
    }
}
