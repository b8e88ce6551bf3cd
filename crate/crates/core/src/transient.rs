//! Rise/fall time and overshoot/undershoot checks.
//!
//! Both are order relationships specialised to a trigger event and the event
//! of a signal reaching its target value.

use serde::Serialize;

use crate::config::{Config, EndPolicy};
use crate::error::{Error, Result};
use crate::relationship::{rising_edges, BooleanProjection};
use crate::scalar::{time_le, Cmp, Scalar};
use crate::trace::Signal;
use crate::verdict::{Match, Sample, Status, Verdict, Witness};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RiseDirection {
    Rise,
    Fall,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiseSpec<T> {
    /// Maximum delay between trigger and target (`RT`).
    pub rt: T,
    pub direction: RiseDirection,
    pub monotonic: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OvershootDirection {
    Overshoot,
    Undershoot,
}

/// Bound on the signal inside the overshoot interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Limit<T> {
    Absolute(T),
    /// Target value plus this (signed) offset.
    Relative(T),
}

impl<T: Scalar> Limit<T> {
    pub fn resolve(self, target: T) -> T {
        match self {
            Limit::Absolute(v) => v,
            Limit::Relative(d) => target + d,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OvershootSpec<T> {
    /// Width of the overshoot interval (`OI`).
    pub oi: T,
    pub limit: Limit<T>,
    pub direction: OvershootDirection,
    pub monotonic: bool,
}

fn same_grid<T: Scalar>(sig: &Signal<T>, a: &BooleanProjection, b: &BooleanProjection) -> Result<()> {
    let n = a.len();
    if b.len() != n || sig.len() > n {
        return Err(Error::GridMismatch { left: n, right: b.len().min(sig.len()) });
    }
    Ok(())
}

/// Strict monotonicity of `sig` over grid points `from..=to`; returns the
/// first index where it breaks.
pub(crate) fn monotone_break<T: Scalar>(
    sig: &Signal<T>,
    from: usize,
    to: usize,
    increasing: bool,
    tol: T,
) -> Option<usize> {
    let op = if increasing { Cmp::Lt } else { Cmp::Gt };
    (from..to).find(|&j| j + 1 >= sig.len() || !op.eval(sig.value(j), sig.value(j + 1), tol))
}

enum Outcome<T> {
    Met(Match<T>),
    Pending(Witness<T>),
    Failed(Witness<T>, String),
}

fn aggregate<T: Scalar>(
    outcomes: impl IntoIterator<Item = Outcome<T>>,
    policy: EndPolicy,
) -> Verdict<T> {
    let mut pairs = Vec::new();
    let mut pending = None;
    for o in outcomes {
        match o {
            Outcome::Met(m) => pairs.push(m),
            Outcome::Failed(w, why) => return Verdict::violated(w, why),
            Outcome::Pending(w) => {
                if policy == EndPolicy::Strict {
                    return Verdict::violated(w, "the target is not reached within the trace");
                }
                pending.get_or_insert(w);
            }
        }
    }
    match pending {
        Some(w) => Verdict {
            status: Status::Inconclusive,
            witness: w,
            reason: Some("the deadline extends past the end of the trace".into()),
        },
        None => Verdict::holds(Witness::Matches { pairs }),
    }
}

/// Every trigger edge `st` must be followed by a target edge `k` with
/// `st <= k <= st + RT`, optionally with strict monotonic progress on
/// `[st, k]`.
pub fn check_rise_time<T: Scalar>(
    sig: &Signal<T>,
    trigger: &BooleanProjection,
    target: &BooleanProjection,
    spec: &RiseSpec<T>,
    times: &[T],
    cfg: &Config<T>,
) -> Result<Verdict<T>> {
    same_grid(sig, trigger, target)?;
    let edges = rising_edges(target);
    let end = times[times.len() - 1];
    let increasing = spec.direction == RiseDirection::Rise;
    let outcomes = rising_edges(trigger).into_iter().map(|st| {
        let deadline = times[st] + spec.rt;
        let first = edges[edges.partition_point(|&k| k < st)..]
            .first()
            .copied()
            .filter(|&k| time_le(times[k], deadline));
        let trig = Sample::at(times, st);
        match first {
            None if !time_le(deadline, end) => {
                Outcome::Pending(Witness::Unmatched { at: trig, deadline: Some(deadline) })
            }
            None => Outcome::Failed(
                Witness::Unmatched { at: trig, deadline: Some(deadline) },
                format!("target not reached by t = {deadline}"),
            ),
            Some(k) => {
                let reached = Sample::at(times, k);
                if spec.monotonic {
                    if let Some(j) = monotone_break(sig, st, k, increasing, cfg.eq_tol) {
                        return Outcome::Failed(
                            Witness::Transient {
                                trigger: trig,
                                reached: Some(reached),
                                at: Some(Sample::at(times, j)),
                            },
                            format!("signal is not strictly monotone at t = {}", times[j]),
                        );
                    }
                }
                Outcome::Met(Match { cause: trig, effect: reached, distance: times[k] - times[st] })
            }
        }
    });
    Ok(aggregate(outcomes.collect::<Vec<_>>(), cfg.end_policy))
}

/// Every trigger edge `st` must be followed by a target edge `k` such that the
/// signal stays within the limit on `[k, k + OI]`.
pub fn check_overshoot<T: Scalar>(
    sig: &Signal<T>,
    trigger: &BooleanProjection,
    target: &BooleanProjection,
    target_value: T,
    spec: &OvershootSpec<T>,
    times: &[T],
    cfg: &Config<T>,
) -> Result<Verdict<T>> {
    same_grid(sig, trigger, target)?;
    let limit = spec.limit.resolve(target_value);
    let over = spec.direction == OvershootDirection::Overshoot;
    let within = |v: T| {
        if over {
            Cmp::Le.eval(v, limit, cfg.eq_tol)
        } else {
            Cmp::Ge.eval(v, limit, cfg.eq_tol)
        }
    };
    let edges = rising_edges(target);
    let end = times[times.len() - 1];
    let n = sig.len();
    let outcomes = rising_edges(trigger).into_iter().map(|st| {
        let trig = Sample::at(times, st);
        let mut first_failure = None;
        let mut truncated = false;
        for &k in &edges[edges.partition_point(|&k| k < st)..] {
            let reached = Sample::at(times, k);
            if spec.monotonic {
                if let Some(j) = monotone_break(sig, st, k, over, cfg.eq_tol) {
                    first_failure.get_or_insert((reached, j));
                    continue;
                }
            }
            let stop = times[k] + spec.oi;
            let bad = (k..n)
                .take_while(|&i| time_le(times[i], stop))
                .find(|&i| !within(sig.value(i)));
            match bad {
                Some(i) => {
                    first_failure.get_or_insert((reached, i));
                }
                None if !time_le(stop, end) => truncated = true,
                None => {
                    return Outcome::Met(Match {
                        cause: trig,
                        effect: reached,
                        distance: times[k] - times[st],
                    })
                }
            }
        }
        match first_failure {
            _ if truncated => Outcome::Pending(Witness::Unmatched { at: trig, deadline: None }),
            Some((reached, i)) => Outcome::Failed(
                Witness::Transient {
                    trigger: trig,
                    reached: Some(reached),
                    at: Some(Sample::at(times, i)),
                },
                format!(
                    "signal value {} at t = {} is beyond the limit {}",
                    sig.value(i.min(n - 1)),
                    times[i],
                    limit
                ),
            ),
            None => Outcome::Pending(Witness::Unmatched { at: trig, deadline: None }),
        }
    });
    Ok(aggregate(outcomes.collect::<Vec<_>>(), cfg.end_policy))
}
