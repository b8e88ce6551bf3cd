//! Data assertions: a pointwise predicate over the whole trace or over a set
//! of disjoint time intervals.

use serde::Serialize;

use crate::config::Config;
use crate::error::Result;
use crate::relationship::{apply_transform, Expr};
use crate::scalar::{Cmp, Interval, Scalar};
use crate::trace::{window_of, InterpolationMode, SignalSource};
use crate::verdict::{Sample, Verdict, Witness};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DataAssertion<T> {
    pub lhs: Expr<T>,
    pub op: Cmp,
    pub rhs: Expr<T>,
    /// Empty means the whole domain.
    pub intervals: Vec<Interval<T>>,
}

impl<T: Scalar> DataAssertion<T> {
    pub fn untimed(lhs: Expr<T>, op: Cmp, rhs: Expr<T>) -> Self {
        Self { lhs, op, rhs, intervals: Vec::new() }
    }

    pub fn is_timed(&self) -> bool {
        !self.intervals.is_empty()
    }
}

/// A point at which the predicate is evaluated.
#[derive(Debug, Clone, Copy)]
struct Probe<T> {
    at: Sample<T>,
    lhs: T,
    rhs: T,
}

fn probes<T: Scalar>(
    da: &DataAssertion<T>,
    src: &dyn SignalSource<T>,
    cfg: &Config<T>,
) -> Result<Vec<Probe<T>>> {
    let l = apply_transform(&da.lhs, src, cfg.eq_tol)?;
    let r = apply_transform(&da.rhs, src, cfg.eq_tol)?;
    let n = l.len().min(r.len());
    let grid = &src.grid()[..n];
    let mut out = Vec::new();
    let push_range = |range: std::ops::Range<usize>, out: &mut Vec<Probe<T>>| {
        for i in range {
            out.push(Probe { at: Sample::at(grid, i), lhs: l.value(i), rhs: r.value(i) });
        }
    };
    if da.intervals.is_empty() {
        push_range(0..n, &mut out);
        return Ok(out);
    }
    let mut intervals = da.intervals.clone();
    intervals.sort_by(|a, b| a.lo.partial_cmp(&b.lo).unwrap_or(std::cmp::Ordering::Equal));
    for h in intervals {
        let w = window_of(grid, h.lo, h.hi);
        let linear = cfg.interp == InterpolationMode::Linear;
        let edge = |t: T, out: &mut Vec<Probe<T>>| -> Result<()> {
            if !linear || n == 0 || t < grid[0] || t > grid[n - 1] || l.grid_index(t).is_some() {
                return Ok(());
            }
            let below = grid.partition_point(|&x| x < t).saturating_sub(1);
            out.push(Probe {
                at: Sample { index: below, t },
                lhs: l.value_at(t, InterpolationMode::Linear)?,
                rhs: r.value_at(t, InterpolationMode::Linear)?,
            });
            Ok(())
        };
        edge(h.lo, &mut out)?;
        push_range(w, &mut out);
        if h.hi > h.lo {
            edge(h.hi, &mut out)?;
        }
    }
    Ok(out)
}

pub fn check_assertion<T: Scalar>(
    da: &DataAssertion<T>,
    src: &dyn SignalSource<T>,
    cfg: &Config<T>,
) -> Result<Verdict<T>> {
    for p in probes(da, src, cfg)? {
        if !da.op.eval(p.lhs, p.rhs, cfg.eq_tol) {
            return Ok(Verdict::violated(
                Witness::Point { at: p.at, lhs: p.lhs, rhs: p.rhs },
                format!("{} {} {} fails at t = {}", p.lhs, da.op, p.rhs, p.at.t),
            ));
        }
    }
    Ok(Verdict::holds(Witness::None))
}

/// Per-sample truth of the assertion: inside one of its intervals and the
/// predicate holds. Samples where an operand is undefined are false.
pub fn assertion_state<T: Scalar>(
    da: &DataAssertion<T>,
    src: &dyn SignalSource<T>,
    cfg: &Config<T>,
) -> Result<Vec<bool>> {
    let grid = src.grid();
    let l = apply_transform(&da.lhs, src, cfg.eq_tol)?;
    let r = apply_transform(&da.rhs, src, cfg.eq_tol)?;
    let n = l.len().min(r.len());
    let mut inside = vec![da.intervals.is_empty(); grid.len()];
    for h in &da.intervals {
        for i in window_of(grid, h.lo, h.hi) {
            inside[i] = true;
        }
    }
    Ok((0..grid.len())
        .map(|i| inside[i] && i < n && da.op.eval(l.value(i), r.value(i), cfg.eq_tol))
        .collect())
}
