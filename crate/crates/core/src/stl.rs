//! Discrete-time STL with bounded future and past operators.
//!
//! Quantifiers range over the grid points that fall inside each interval.
//! The `Until` clause requires the left operand on the closed range `[t, t']`
//! (and `Since` on `[t', t]`).

use std::fmt;

use serde::Serialize;

use crate::dsl::ast::{Body, Node};
use crate::error::{Error, Result};
use crate::relationship::Expr;
use crate::scalar::{Cmp, Interval, Scalar};
use crate::spike::DerivativeSource;
use crate::trace::{window_of, SignalSource};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum StlFormula<T> {
    True,
    Atom { signal: String, op: Cmp, c: T },
    Not(Box<StlFormula<T>>),
    Or(Box<StlFormula<T>>, Box<StlFormula<T>>),
    And(Box<StlFormula<T>>, Box<StlFormula<T>>),
    Until(Interval<T>, Box<StlFormula<T>>, Box<StlFormula<T>>),
    Since(Interval<T>, Box<StlFormula<T>>, Box<StlFormula<T>>),
    Eventually(Interval<T>, Box<StlFormula<T>>),
    Globally(Interval<T>, Box<StlFormula<T>>),
    Once(Interval<T>, Box<StlFormula<T>>),
    Historically(Interval<T>, Box<StlFormula<T>>),
}

use StlFormula as F;

impl<T: Scalar> StlFormula<T> {
    pub fn atom(signal: &str, op: Cmp, c: T) -> Self {
        F::Atom { signal: signal.to_string(), op, c }
    }

    pub fn not(f: Self) -> Self {
        F::Not(Box::new(f))
    }

    pub fn and(a: Self, b: Self) -> Self {
        F::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Self, b: Self) -> Self {
        F::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Self, b: Self) -> Self {
        F::or(F::not(a), b)
    }

    pub fn until(lo: T, hi: T, a: Self, b: Self) -> Self {
        F::Until(Interval::new(lo, hi), Box::new(a), Box::new(b))
    }

    pub fn since(lo: T, hi: T, a: Self, b: Self) -> Self {
        F::Since(Interval::new(lo, hi), Box::new(a), Box::new(b))
    }

    pub fn eventually(lo: T, hi: T, f: Self) -> Self {
        F::Eventually(Interval::new(lo, hi), Box::new(f))
    }

    pub fn globally(lo: T, hi: T, f: Self) -> Self {
        F::Globally(Interval::new(lo, hi), Box::new(f))
    }

    pub fn once(lo: T, hi: T, f: Self) -> Self {
        F::Once(Interval::new(lo, hi), Box::new(f))
    }

    pub fn historically(lo: T, hi: T, f: Self) -> Self {
        F::Historically(Interval::new(lo, hi), Box::new(f))
    }

    /// Rewrites derived operators into `True`, `Not`, `Or`, `And`, `Until`
    /// and `Since`: `F = true U`, `G = !F!`, `P = true S`, `H = !P!`.
    pub fn expand(&self) -> Self {
        match self {
            F::True | F::Atom { .. } => self.clone(),
            F::Not(a) => F::not(a.expand()),
            F::Or(a, b) => F::or(a.expand(), b.expand()),
            F::And(a, b) => F::and(a.expand(), b.expand()),
            F::Until(i, a, b) => F::Until(*i, Box::new(a.expand()), Box::new(b.expand())),
            F::Since(i, a, b) => F::Since(*i, Box::new(a.expand()), Box::new(b.expand())),
            F::Eventually(i, a) => F::Until(*i, Box::new(F::True), Box::new(a.expand())),
            F::Globally(i, a) => F::not(F::Until(
                *i,
                Box::new(F::True),
                Box::new(F::not(a.expand())),
            )),
            F::Once(i, a) => F::Since(*i, Box::new(F::True), Box::new(a.expand())),
            F::Historically(i, a) => F::not(F::Since(
                *i,
                Box::new(F::True),
                Box::new(F::not(a.expand())),
            )),
        }
    }

    /// Swaps every future operator with its past counterpart.
    pub fn mirrored(&self) -> Self {
        match self {
            F::True | F::Atom { .. } => self.clone(),
            F::Not(a) => F::not(a.mirrored()),
            F::Or(a, b) => F::or(a.mirrored(), b.mirrored()),
            F::And(a, b) => F::and(a.mirrored(), b.mirrored()),
            F::Until(i, a, b) => F::Since(*i, Box::new(a.mirrored()), Box::new(b.mirrored())),
            F::Since(i, a, b) => F::Until(*i, Box::new(a.mirrored()), Box::new(b.mirrored())),
            F::Eventually(i, a) => F::Once(*i, Box::new(a.mirrored())),
            F::Globally(i, a) => F::Historically(*i, Box::new(a.mirrored())),
            F::Once(i, a) => F::Eventually(*i, Box::new(a.mirrored())),
            F::Historically(i, a) => F::Globally(*i, Box::new(a.mirrored())),
        }
    }
}

impl<T: Scalar> fmt::Display for StlFormula<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let iv = |i: &Interval<T>| format!("[{},{}]", i.lo, i.hi);
        match self {
            F::True => f.write_str("true"),
            F::Atom { signal, op, c } => write!(f, "({signal} {op} {c})"),
            F::Not(a) => write!(f, "!{a}"),
            F::Or(a, b) => write!(f, "({a} | {b})"),
            F::And(a, b) => write!(f, "({a} & {b})"),
            F::Until(i, a, b) => write!(f, "({a} U{} {b})", iv(i)),
            F::Since(i, a, b) => write!(f, "({a} S{} {b})", iv(i)),
            F::Eventually(i, a) => write!(f, "F{} {a}", iv(i)),
            F::Globally(i, a) => write!(f, "G{} {a}", iv(i)),
            F::Once(i, a) => write!(f, "P{} {a}", iv(i)),
            F::Historically(i, a) => write!(f, "H{} {a}", iv(i)),
        }
    }
}

fn check_interval<T: Scalar>(i: &Interval<T>) -> Result<()> {
    if !(i.lo >= T::zero() && i.lo < i.hi) {
        return Err(Error::PunctualInterval { lo: i.lo.to_f64_lossy(), hi: i.hi.to_f64_lossy() });
    }
    Ok(())
}

fn prefix_counts(bits: &[bool]) -> Vec<usize> {
    let mut out = Vec::with_capacity(bits.len() + 1);
    out.push(0);
    for &b in bits {
        out.push(out.last().unwrap() + b as usize);
    }
    out
}

/// Truth value of `f` at every grid point.
pub fn eval_all<T: Scalar>(f: &StlFormula<T>, src: &dyn SignalSource<T>, tol: T) -> Result<Vec<bool>> {
    eval_core(&f.expand(), src, tol)
}

fn eval_core<T: Scalar>(f: &StlFormula<T>, src: &dyn SignalSource<T>, tol: T) -> Result<Vec<bool>> {
    let grid = src.grid();
    let n = grid.len();
    Ok(match f {
        F::True => vec![true; n],
        F::Atom { signal, op, c } => {
            let s = src.signal(signal)?;
            (0..n).map(|i| i < s.len() && op.eval(s.value(i), *c, tol)).collect()
        }
        F::Not(a) => eval_core(a, src, tol)?.into_iter().map(|b| !b).collect(),
        F::Or(a, b) => {
            let (a, b) = (eval_core(a, src, tol)?, eval_core(b, src, tol)?);
            a.iter().zip(&b).map(|(x, y)| *x || *y).collect()
        }
        F::And(a, b) => {
            let (a, b) = (eval_core(a, src, tol)?, eval_core(b, src, tol)?);
            a.iter().zip(&b).map(|(x, y)| *x && *y).collect()
        }
        F::Until(iv, a, b) => {
            check_interval(iv)?;
            let (a, b) = (eval_core(a, src, tol)?, eval_core(b, src, tol)?);
            let hits = prefix_counts(&b);
            // run[i]: one past the last index of the run of `a` starting at i.
            let mut run = vec![0; n + 1];
            run[n] = n;
            for i in (0..n).rev() {
                run[i] = if a[i] { run[i + 1] } else { i };
            }
            (0..n)
                .map(|i| {
                    let w = window_of(grid, grid[i] + iv.lo, grid[i] + iv.hi);
                    // t' must keep `a` true on [t, t'] inclusive.
                    let end = w.end.min(run[i]);
                    let start = w.start.max(i);
                    start < end && hits[end] > hits[start]
                })
                .collect()
        }
        F::Since(iv, a, b) => {
            check_interval(iv)?;
            let (a, b) = (eval_core(a, src, tol)?, eval_core(b, src, tol)?);
            let hits = prefix_counts(&b);
            // from[i]: first index of the run of `a` ending at i (i + 1 if a[i] is false).
            let mut from = vec![0; n];
            for i in 0..n {
                from[i] = if !a[i] { i + 1 } else if i > 0 && a[i - 1] { from[i - 1] } else { i };
            }
            (0..n)
                .map(|i| {
                    let w = window_of(grid, grid[i] - iv.hi, grid[i] - iv.lo);
                    let start = w.start.max(from[i]);
                    let end = w.end.min(i + 1);
                    start < end && hits[end] > hits[start]
                })
                .collect()
        }
        other => return eval_core(&other.expand(), src, tol),
    })
}

/// `(s, t) |= f` at grid index `index`.
pub fn eval_stl<T: Scalar>(
    f: &StlFormula<T>,
    src: &dyn SignalSource<T>,
    index: usize,
    tol: T,
) -> Result<bool> {
    let all = eval_all(f, src, tol)?;
    all.get(index).copied().ok_or_else(|| Error::OutOfDomain {
        signal: "time".into(),
        t: index as f64,
    })
}

/// The trace satisfies `f` when `f` holds at the first sample.
pub fn satisfies<T: Scalar>(f: &StlFormula<T>, src: &dyn SignalSource<T>, tol: T) -> Result<bool> {
    eval_stl(f, src, 0, tol)
}

/// `signal op c` when the assertion compares a bare signal with a constant.
fn atom_of<T: Scalar>(lhs: &Expr<T>, op: Cmp, rhs: &Expr<T>) -> Option<StlFormula<T>> {
    match (lhs.as_signal(), rhs.as_num(), lhs.as_num(), rhs.as_signal()) {
        (Some(s), Some(c), _, _) => Some(F::atom(s, op, c)),
        (_, _, Some(c), Some(s)) => Some(F::atom(s, op.flipped(), c)),
        _ => None,
    }
}

/// `p && P[d/2, d] !p`: `p` holds now but not at the previous sample of a
/// uniform grid with spacing `d`.
pub fn edge<T: Scalar>(p: StlFormula<T>, dt: T) -> StlFormula<T> {
    F::and(p.clone(), F::once(dt / T::lit(2.0), dt, F::not(p)))
}

fn uniform_step<T: Scalar>(grid: &[T]) -> Option<T> {
    let dt = grid[1] - grid[0];
    let tol = dt * T::lit(1e-6);
    grid.windows(2)
        .all(|w| ((w[1] - w[0]) - dt).abs() <= tol)
        .then_some(dt)
}

/// STL rendering of the properties STL can express:
///
/// * data assertions comparing one signal with a constant,
/// * two-parameter spikes whose derivative is a trace column,
/// * rise/fall times without monotonicity whose trigger is such an
///   assertion (uniform grids only).
///
/// The translation assumes the trace starts at time 0 and is evaluated at
/// the first sample. Response deadlines past the end are false in STL, so
/// compare against the strict end policy.
pub fn to_stl<T: Scalar>(node: &Node<T>, grid: &[T]) -> Option<StlFormula<T>> {
    let length = *grid.last()?;
    if grid.len() < 2 || length <= T::zero() {
        return None;
    }
    match &node.body {
        Body::Assert(da) => {
            let atom = atom_of(&da.lhs, da.op, &da.rhs)?;
            if da.intervals.is_empty() {
                return Some(F::globally(T::zero(), length, atom));
            }
            let mut parts = da.intervals.iter().map(|h| {
                (h.lo < h.hi && h.lo >= T::zero()).then(|| F::globally(h.lo, h.hi, atom.clone()))
            });
            let first = parts.next()??;
            parts.try_fold(first, |acc, p| Some(F::and(acc, p?)))
        }
        Body::Spike2 { spec, .. } => {
            let DerivativeSource::Column(d) = &spec.derivative else {
                return None;
            };
            Some(F::eventually(
                T::zero(),
                length,
                F::and(
                    F::atom(d, Cmp::Gt, spec.m),
                    F::eventually(T::zero(), spec.w, F::atom(d, Cmp::Lt, -spec.m)),
                ),
            ))
        }
        Body::Rise { signal, target, trigger, spec } if !spec.monotonic => {
            let Body::Assert(da) = &trigger.body else {
                return None;
            };
            if da.is_timed() {
                return None;
            }
            let dt = uniform_step(grid)?;
            let trig = atom_of(&da.lhs, da.op, &da.rhs)?;
            let reach = F::atom(signal, target.op, target.bound);
            Some(F::globally(
                T::zero(),
                length,
                F::implies(edge(trig, dt), F::eventually(T::zero(), spec.rt, edge(reach, dt))),
            ))
        }
        _ => None,
    }
}
