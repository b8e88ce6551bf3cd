use std::fmt::{self, Debug, Display};
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::{Deserialize, Serialize};

/// Real number type used for timestamps and signal values.
///
/// Implemented for [`f32`] and [`f64`]. All evaluation code is generic over
/// this trait; the crate root exports `f64` aliases for the common case.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + FromStr
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + 'static
{
    /// Relative tolerance used when snapping a timestamp onto the sample grid.
    fn grid_eps() -> Self;

    /// Default absolute tolerance for value equality.
    fn default_eq_tol() -> Self;

    /// Converts an `f64` literal, panicking only for values the type cannot hold.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn grid_eps() -> Self {
        1e-9
    }

    fn default_eq_tol() -> Self {
        1e-9
    }
}

impl Scalar for f32 {
    fn grid_eps() -> Self {
        1e-5
    }

    fn default_eq_tol() -> Self {
        1e-5
    }
}

/// Grid tolerance scaled to the magnitude of `t`.
pub(crate) fn snap_eps<T: Scalar>(t: T) -> T {
    T::grid_eps() * T::one().max(t.abs())
}

/// `a <= b` up to grid tolerance, for comparing timestamps against bounds.
pub(crate) fn time_le<T: Scalar>(a: T, b: T) -> bool {
    a <= b + snap_eps(b)
}

/// A closed time interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Scalar> Interval<T> {
    pub fn new(lo: T, hi: T) -> Self {
        Self { lo, hi }
    }

    pub fn overlaps(&self, other: &Interval<T>) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn shifted(&self, dt: T) -> Self {
        Self { lo: self.lo + dt, hi: self.hi + dt }
    }
}

/// Relational operator with tolerance-aware evaluation.
///
/// `=` holds when the operands differ by at most the tolerance; the other
/// operators are derived from it so that `<`/`>=` and `>`/`<=` stay exact
/// complements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cmp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
    Ne,
}

impl Cmp {
    pub const ALL: [Cmp; 6] = [Cmp::Lt, Cmp::Le, Cmp::Eq, Cmp::Ge, Cmp::Gt, Cmp::Ne];

    pub fn eval<T: Scalar>(self, lhs: T, rhs: T, tol: T) -> bool {
        let eq = (lhs - rhs).abs() <= tol;
        match self {
            Cmp::Eq => eq,
            Cmp::Ne => !eq,
            Cmp::Le => lhs < rhs || eq,
            Cmp::Lt => lhs < rhs && !eq,
            Cmp::Ge => lhs > rhs || eq,
            Cmp::Gt => lhs > rhs && !eq,
        }
    }

    /// Operator obtained by swapping the operands (`a < b` iff `b > a`).
    pub fn flipped(self) -> Cmp {
        match self {
            Cmp::Lt => Cmp::Gt,
            Cmp::Le => Cmp::Ge,
            Cmp::Ge => Cmp::Le,
            Cmp::Gt => Cmp::Lt,
            other => other,
        }
    }

    /// Logical negation of the operator.
    pub fn negated(self) -> Cmp {
        match self {
            Cmp::Lt => Cmp::Ge,
            Cmp::Le => Cmp::Gt,
            Cmp::Eq => Cmp::Ne,
            Cmp::Ge => Cmp::Lt,
            Cmp::Gt => Cmp::Le,
            Cmp::Ne => Cmp::Eq,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Cmp::Lt => "<",
            Cmp::Le => "<=",
            Cmp::Eq => "=",
            Cmp::Ge => ">=",
            Cmp::Gt => ">",
            Cmp::Ne => "!=",
        }
    }
}

impl Display for Cmp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// A threshold criterion `value ⋈ bound`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Constraint<T> {
    pub op: Cmp,
    pub bound: T,
}

impl<T: Scalar> Constraint<T> {
    pub fn new(op: Cmp, bound: T) -> Self {
        Self { op, bound }
    }

    pub fn holds(&self, value: T, tol: T) -> bool {
        self.op.eval(value, self.bound, tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complements_are_exact() {
        let tol = 1e-9;
        for &(a, b) in &[(1.0, 2.0), (2.0, 1.0), (1.0, 1.0), (1.0, 1.0 + 1e-12)] {
            assert_eq!(Cmp::Lt.eval(a, b, tol), !Cmp::Ge.eval(a, b, tol));
            assert_eq!(Cmp::Gt.eval(a, b, tol), !Cmp::Le.eval(a, b, tol));
            assert_eq!(Cmp::Eq.eval(a, b, tol), !Cmp::Ne.eval(a, b, tol));
            for op in Cmp::ALL {
                assert_eq!(op.eval(a, b, tol), op.flipped().eval(b, a, tol));
                assert_eq!(op.eval(a, b, tol), !op.negated().eval(a, b, tol));
            }
        }
    }

    #[test]
    fn equality_uses_tolerance() {
        assert!(Cmp::Eq.eval(1.0, 1.0 + 1e-10, 1e-9));
        assert!(!Cmp::Lt.eval(1.0, 1.0 + 1e-10, 1e-9));
        assert!(Cmp::Le.eval(1.0 + 1e-10, 1.0, 1e-9));
        assert!(Cmp::Eq.eval(0.5f32, 0.5f32, 1e-5));
    }
}
