//! Integers extended with `-inf` and `+inf` sentinels.

use std::fmt;

/// A value of a totally ordered domain extended by two sentinels.
///
/// The variant order is significant: the derived `Ord` yields
/// `MinusInf < Finite(_) < PlusInf`, and finite values compare by value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Extended<T> {
    MinusInf,
    Finite(T),
    PlusInf,
}

/// Objective values as seen by the engine.
pub type ExtendedValue = Extended<i64>;

impl<T> Extended<T> {
    pub fn is_finite(&self) -> bool {
        matches!(self, Extended::Finite(_))
    }

    pub fn as_finite(&self) -> Option<&T> {
        match self {
            Extended::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Extended<U> {
        match self {
            Extended::MinusInf => Extended::MinusInf,
            Extended::Finite(v) => Extended::Finite(f(v)),
            Extended::PlusInf => Extended::PlusInf,
        }
    }
}

impl<T: Copy> Extended<T> {
    /// Unwraps a finite value.
    ///
    /// Sentinels never take part in arithmetic, so hitting one here is a bug
    /// in the caller.
    #[track_caller]
    pub fn finite(&self) -> T {
        match self {
            Extended::Finite(v) => *v,
            Extended::MinusInf => panic!("arithmetic on -inf sentinel"),
            Extended::PlusInf => panic!("arithmetic on +inf sentinel"),
        }
    }
}

impl ExtendedValue {
    /// Upper limit for a `value < self` constraint on integer data, i.e.
    /// `value <= self - 1`. `None` means no integer satisfies it.
    /// `PlusInf` maps to `i64::MAX` (unconstrained).
    pub fn strict_limit(&self) -> Option<i64> {
        match self {
            Extended::MinusInf => None,
            Extended::Finite(v) => v.checked_sub(1),
            Extended::PlusInf => Some(i64::MAX),
        }
    }
}

impl<T> From<T> for Extended<T> {
    fn from(v: T) -> Self {
        Extended::Finite(v)
    }
}

impl<T: fmt::Display> fmt::Display for Extended<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::MinusInf => f.write_str("-inf"),
            Extended::Finite(v) => v.fmt(f),
            Extended::PlusInf => f.write_str("+inf"),
        }
    }
}
