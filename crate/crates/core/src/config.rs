use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;
use crate::trace::InterpolationMode;

/// What to report when an obligation's window runs past the end of the trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndPolicy {
    /// Unobservable deadlines give `inconclusive`.
    #[default]
    Inconclusive,
    /// Treat them as violations.
    Strict,
}

/// Evaluation settings shared by every checker.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Config<T> {
    /// Absolute tolerance for `=` (and the boundaries of `<`, `<=`, ...).
    pub eq_tol: T,
    /// Tolerance for the zero test on first derivatives.
    pub deriv_tol: T,
    /// Default minimum value change between consecutive extrema.
    pub prominence: T,
    pub interp: InterpolationMode,
    pub end_policy: EndPolicy,
    /// Signal renames `(old, new)` applied to properties before checking.
    pub bindings: Vec<(String, String)>,
}

impl<T: Scalar> Default for Config<T> {
    fn default() -> Self {
        Self {
            eq_tol: T::default_eq_tol(),
            deriv_tol: T::lit(1e-6),
            prominence: T::zero(),
            interp: InterpolationMode::Grid,
            end_policy: EndPolicy::Inconclusive,
            bindings: Vec::new(),
        }
    }
}

impl<T: Scalar> Config<T> {
    pub fn strict(mut self) -> Self {
        self.end_policy = EndPolicy::Strict;
        self
    }
}
