use serde::Serialize;

use crate::oscillation::{Cycle, Damping, OscillationStats};
use crate::spike::SpikeFeatures;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Holds,
    Violated,
    Inconclusive,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Holds => "holds",
            Status::Violated => "violated",
            Status::Inconclusive => "inconclusive",
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A grid point, reported both by index and by timestamp.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample<T> {
    pub index: usize,
    pub t: T,
}

impl<T: Copy> Sample<T> {
    pub fn at(times: &[T], index: usize) -> Self {
        Self { index, t: times[index] }
    }
}

/// A cause occurrence and the effect occurrence that answered it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Match<T> {
    pub cause: Sample<T>,
    pub effect: Sample<T>,
    pub distance: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness<T> {
    None,
    /// A grid point where the checked predicate fails.
    Point { at: Sample<T>, lhs: T, rhs: T },
    Spike(SpikeFeatures<T>),
    /// Two-parameter spike: a steep rise followed by a steep fall.
    Slopes { rise: Sample<T>, fall: Sample<T>, rise_slope: T, fall_slope: T },
    Oscillation {
        stats: OscillationStats<T>,
        failing_cycle: Option<Cycle<T>>,
        damping: Option<Damping>,
    },
    /// A cause (or trigger) occurrence without a matching effect.
    Unmatched { at: Sample<T>, deadline: Option<T> },
    /// A trigger whose target was reached but the follow-up check failed.
    Transient { trigger: Sample<T>, reached: Option<Sample<T>>, at: Option<Sample<T>> },
    Matches { pairs: Vec<Match<T>> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict<T> {
    pub status: Status,
    pub witness: Witness<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl<T> Verdict<T> {
    pub fn holds(witness: Witness<T>) -> Self {
        Self { status: Status::Holds, witness, reason: None }
    }

    pub fn violated(witness: Witness<T>, reason: impl Into<String>) -> Self {
        Self { status: Status::Violated, witness, reason: Some(reason.into()) }
    }

    pub fn inconclusive(witness: Witness<T>, reason: impl Into<String>) -> Self {
        Self { status: Status::Inconclusive, witness, reason: Some(reason.into()) }
    }

    pub fn is_holds(&self) -> bool {
        self.status == Status::Holds
    }
}
