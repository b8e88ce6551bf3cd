//! Functional relationships (signal transforms) and order relationships
//! (response and precedence over boolean projections).

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::assertion::assertion_state;
use crate::config::{Config, EndPolicy};
use crate::dsl::ast::{Body, Node, OrderSpec, Pattern};
use crate::error::{Error, Result};
use crate::oscillation::{judge_oscillation, oscillation_extrema};
use crate::scalar::{time_le, Cmp, Constraint, Scalar};
use crate::spike::{all_spikes, derivative_values, slope_pairs};
use crate::trace::{Env, Signal, SignalSource};
use crate::verdict::{Match, Sample, Status, Verdict, Witness};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }
}

/// Pointwise signal expression.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Expr<T> {
    Num(T),
    Signal(String),
    Neg(Box<Expr<T>>),
    Abs(Box<Expr<T>>),
    /// Forward finite difference of order 1 or 2.
    Deriv(Box<Expr<T>>, u8),
    Bin(BinOp, Box<Expr<T>>, Box<Expr<T>>),
}

impl<T: Scalar> Expr<T> {
    pub fn sig(name: &str) -> Self {
        Expr::Signal(name.to_string())
    }

    pub fn bin(op: BinOp, l: Expr<T>, r: Expr<T>) -> Self {
        Expr::Bin(op, Box::new(l), Box::new(r))
    }

    /// Signal names referenced by the expression, in first-use order.
    pub fn signals(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Expr::Num(_) => {}
            Expr::Signal(s) => {
                if !out.contains(&s.as_str()) {
                    out.push(s);
                }
            }
            Expr::Neg(e) | Expr::Abs(e) | Expr::Deriv(e, _) => e.collect(out),
            Expr::Bin(_, l, r) => {
                l.collect(out);
                r.collect(out);
            }
        }
    }

    pub fn rename_signals(&mut self, map: &BTreeMap<String, String>) {
        match self {
            Expr::Num(_) => {}
            Expr::Signal(s) => {
                if let Some(n) = map.get(s.as_str()) {
                    *s = n.clone();
                }
            }
            Expr::Neg(e) | Expr::Abs(e) | Expr::Deriv(e, _) => e.rename_signals(map),
            Expr::Bin(_, l, r) => {
                l.rename_signals(map);
                r.rename_signals(map);
            }
        }
    }

    /// The expression is a bare signal reference.
    pub fn as_signal(&self) -> Option<&str> {
        match self {
            Expr::Signal(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_num(&self) -> Option<T> {
        match self {
            Expr::Num(v) => Some(*v),
            _ => None,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, parent: u8) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Signal(s) => f.write_str(s),
            Expr::Neg(e) => match **e {
                Expr::Num(_) | Expr::Bin(..) => write!(f, "-({e})"),
                _ => {
                    f.write_str("-")?;
                    e.fmt_prec(f, 3)
                }
            },
            Expr::Abs(e) => write!(f, "abs({e})"),
            Expr::Deriv(e, 1) => write!(f, "deriv({e})"),
            Expr::Deriv(e, n) => write!(f, "deriv({e}, {n})"),
            Expr::Bin(op, l, r) => {
                let p = op.precedence();
                if p < parent {
                    f.write_str("(")?;
                }
                l.fmt_prec(f, p)?;
                write!(f, " {} ", op.symbol())?;
                // Right operands bind tighter so `a - (b - c)` keeps its parentheses.
                r.fmt_prec(f, p + 1)?;
                if p < parent {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl<T: Scalar> fmt::Display for Expr<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// Evaluates `expr` pointwise over the shared grid.
///
/// The result lives on a prefix of the grid: each derivative drops trailing
/// samples, and binary operators keep the shorter operand's length.
pub fn apply_transform<T: Scalar>(
    expr: &Expr<T>,
    src: &dyn SignalSource<T>,
    eq_tol: T,
) -> Result<Signal<T>> {
    let grid = src.grid();
    let name = || expr.to_string();
    match expr {
        Expr::Num(v) => Signal::new(name(), grid.to_vec(), vec![*v; grid.len()]),
        Expr::Signal(s) => Ok(src.signal(s)?.clone()),
        Expr::Neg(e) => Ok(apply_transform(e, src, eq_tol)?.map_values(|v| -v).with_name(name())),
        Expr::Abs(e) => {
            Ok(apply_transform(e, src, eq_tol)?.map_values(|v| v.abs()).with_name(name()))
        }
        Expr::Deriv(e, order) => {
            Ok(apply_transform(e, src, eq_tol)?.finite_difference(*order)?.with_name(name()))
        }
        Expr::Bin(op, l, r) => {
            let (l, r) = (apply_transform(l, src, eq_tol)?, apply_transform(r, src, eq_tol)?);
            let n = l.len().min(r.len());
            let mut values = Vec::with_capacity(n);
            for i in 0..n {
                let (a, b) = (l.value(i), r.value(i));
                values.push(match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b.abs() <= eq_tol {
                            return Err(Error::DivisionByZero { t: l.time(i).to_f64_lossy() });
                        }
                        a / b
                    }
                });
            }
            Signal::new(name(), l.times()[..n].to_vec(), values)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProjectionKind {
    Event,
    State,
}

/// Boolean signal over the trace grid derived from a sub-property.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BooleanProjection {
    pub kind: ProjectionKind,
    pub bits: Vec<bool>,
}

impl BooleanProjection {
    pub fn new(kind: ProjectionKind, bits: Vec<bool>) -> Self {
        Self { kind, bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Grid indices where the property occurs: rising edges for events,
    /// every true sample for states.
    pub fn occurrences(&self) -> Vec<usize> {
        match self.kind {
            ProjectionKind::Event => rising_edges(self),
            ProjectionKind::State => (0..self.bits.len()).filter(|&i| self.bits[i]).collect(),
        }
    }
}

/// Indices `i >= 1` with `bits[i]` true and `bits[i - 1]` false. No edge can
/// fire on the first sample.
pub fn rising_edges(proj: &BooleanProjection) -> Vec<usize> {
    (1..proj.bits.len())
        .filter(|&i| proj.bits[i] && !proj.bits[i - 1])
        .collect()
}

/// `state(i) && !state(i - 1)`, false at the first sample.
pub fn becomes(state: &[bool]) -> Vec<bool> {
    (0..state.len()).map(|i| i > 0 && state[i] && !state[i - 1]).collect()
}

fn check_grids<T>(a: &BooleanProjection, b: &BooleanProjection, times: &[T]) -> Result<()> {
    for p in [a, b] {
        if p.len() != times.len() {
            return Err(Error::GridMismatch { left: times.len(), right: p.len() });
        }
    }
    Ok(())
}

/// Whether an obligation without a visible effect may still be met after the
/// end of the trace.
pub(crate) fn deadline_open<T: Scalar>(t: T, bound: Option<&Constraint<T>>, end: T) -> bool {
    match bound {
        None => true,
        Some(c) => match c.op {
            Cmp::Lt | Cmp::Le | Cmp::Eq => !time_le(t + c.bound, end),
            Cmp::Ge | Cmp::Gt | Cmp::Ne => true,
        },
    }
}

fn distance_ok<T: Scalar>(bound: Option<&Constraint<T>>, d: T, tol: T) -> bool {
    bound.map_or(true, |c| c.holds(d, tol))
}

/// Every cause occurrence must be followed, at a strictly later sample, by an
/// effect occurrence whose distance satisfies `bound`.
pub fn check_response<T: Scalar>(
    cause: &BooleanProjection,
    effect: &BooleanProjection,
    bound: Option<&Constraint<T>>,
    times: &[T],
    cfg: &Config<T>,
) -> Result<Verdict<T>> {
    check_grids(cause, effect, times)?;
    let effects = effect.occurrences();
    let end = *times.last().expect("non-empty grid");
    let upper = bound.is_some_and(|c| matches!(c.op, Cmp::Lt | Cmp::Le | Cmp::Eq));
    let mut pairs = Vec::new();
    let mut pending: Option<usize> = None;
    for t in cause.occurrences() {
        let start = effects.partition_point(|&k| k <= t);
        let mut hit = None;
        for &k in &effects[start..] {
            let d = (times[k] - times[t]).abs();
            if distance_ok(bound, d, cfg.eq_tol) {
                hit = Some((k, d));
                break;
            }
            if upper && d > bound.unwrap().bound + cfg.eq_tol {
                break;
            }
        }
        match hit {
            Some((k, d)) => pairs.push(Match {
                cause: Sample::at(times, t),
                effect: Sample::at(times, k),
                distance: d,
            }),
            None => {
                let open = deadline_open(times[t], bound, end);
                if open && cfg.end_policy == EndPolicy::Inconclusive {
                    pending.get_or_insert(t);
                } else {
                    return Ok(unmatched(Status::Violated, times, t, bound));
                }
            }
        }
    }
    Ok(match pending {
        Some(t) => unmatched(Status::Inconclusive, times, t, bound),
        None => Verdict::holds(Witness::Matches { pairs }),
    })
}

fn unmatched<T: Scalar>(
    status: Status,
    times: &[T],
    t: usize,
    bound: Option<&Constraint<T>>,
) -> Verdict<T> {
    let deadline = bound.map(|c| times[t] + c.bound);
    let witness = Witness::Unmatched { at: Sample::at(times, t), deadline };
    match status {
        Status::Inconclusive => Verdict::inconclusive(
            witness,
            format!("the response to t = {} may occur after the end of the trace", times[t]),
        ),
        _ => Verdict::violated(witness, format!("no matching effect for t = {}", times[t])),
    }
}

/// Every effect occurrence must be preceded, at a strictly earlier sample, by
/// a cause occurrence whose distance satisfies `bound`. The nearest such
/// cause is reported.
pub fn check_precedence<T: Scalar>(
    cause: &BooleanProjection,
    effect: &BooleanProjection,
    bound: Option<&Constraint<T>>,
    times: &[T],
    cfg: &Config<T>,
) -> Result<Verdict<T>> {
    check_grids(cause, effect, times)?;
    let causes = cause.occurrences();
    let mut pairs = Vec::new();
    for k in effect.occurrences() {
        let before = causes.partition_point(|&j| j < k);
        let hit = causes[..before].iter().rev().find_map(|&j| {
            let d = (times[k] - times[j]).abs();
            distance_ok(bound, d, cfg.eq_tol).then_some((j, d))
        });
        match hit {
            Some((j, d)) => pairs.push(Match {
                cause: Sample::at(times, j),
                effect: Sample::at(times, k),
                distance: d,
            }),
            None => {
                return Ok(Verdict::violated(
                    Witness::Unmatched { at: Sample::at(times, k), deadline: None },
                    format!("no matching cause before t = {}", times[k]),
                ))
            }
        }
    }
    Ok(Verdict::holds(Witness::Matches { pairs }))
}

/// Effect occurrences that close a satisfied cause-effect pair. Both
/// patterns use the same event: an effect with an earlier cause in bound.
pub fn completed_pairs<T: Scalar>(
    cause: &BooleanProjection,
    effect: &BooleanProjection,
    bound: Option<&Constraint<T>>,
    times: &[T],
    tol: T,
) -> Result<Vec<bool>> {
    check_grids(cause, effect, times)?;
    let causes = cause.occurrences();
    let mut bits = vec![false; times.len()];
    for k in effect.occurrences() {
        let before = causes.partition_point(|&j| j < k);
        bits[k] = causes[..before]
            .iter()
            .any(|&j| distance_ok(bound, (times[k] - times[j]).abs(), tol));
    }
    Ok(bits)
}

/// Boolean projection of a projectable sub-property.
pub fn project<T: Scalar>(
    node: &Node<T>,
    env: &Env<'_, T>,
    kind: ProjectionKind,
    cfg: &Config<T>,
) -> Result<BooleanProjection> {
    let n = env.grid().len();
    let bits = match &node.body {
        Body::Assert(da) => {
            let state = assertion_state(da, env, cfg)?;
            match kind {
                ProjectionKind::State => state,
                ProjectionKind::Event => becomes(&state),
            }
        }
        Body::Spike { signal, spec } => {
            let sig = env.signal(signal)?;
            let mut bits = vec![false; n];
            let spikes = all_spikes(sig, spec, env, cfg)?;
            match kind {
                ProjectionKind::Event => {
                    for f in &spikes {
                        bits[f.anchor(spec.anchor).index] = true;
                    }
                }
                ProjectionKind::State => {
                    let mut delta = vec![0i64; n + 1];
                    for f in &spikes {
                        delta[f.vp1.index] += 1;
                        delta[f.vp2.index + 1] -= 1;
                    }
                    let mut acc = 0;
                    for i in 0..n {
                        acc += delta[i];
                        bits[i] = acc > 0;
                    }
                }
            }
            bits
        }
        Body::Spike2 { signal, spec } => {
            let sig = env.signal(signal)?;
            let d = derivative_values(sig, &spec.derivative, env)?;
            let mut bits = vec![false; n];
            for (i, _) in slope_pairs(sig.times(), &d, spec, cfg.eq_tol) {
                bits[i] = true;
            }
            bits
        }
        Body::Oscillation { signal, spec } => {
            let sig = env.signal(signal)?;
            let extrema = oscillation_extrema(sig, spec, env, cfg)?;
            let verdict = judge_oscillation(extrema.clone(), sig, spec, cfg.eq_tol)?;
            let mut bits = vec![false; n];
            if verdict.is_holds() {
                match kind {
                    ProjectionKind::Event => {
                        for e in extrema.iter().filter(|e| spec.anchor.accepts(e.kind)) {
                            bits[e.index] = true;
                        }
                    }
                    ProjectionKind::State => {
                        let (a, b) = (extrema[0].index, extrema[extrema.len() - 1].index);
                        bits[a..=b].iter_mut().for_each(|x| *x = true);
                    }
                }
            }
            bits
        }
        Body::Functional { target, expr, inner } => {
            let derived = apply_transform(expr, env, cfg.eq_tol)?;
            return project(inner, &env.with(target.clone(), derived), kind, cfg);
        }
        Body::Order(o) if kind == ProjectionKind::Event => nested_event(o, env, cfg)?,
        other => {
            let what = match other {
                Body::Order(_) => format!("a {} used as a state", other.construct()),
                _ => format!("a {} property", other.construct()),
            };
            return Err(Error::NotProjectable(what));
        }
    };
    Ok(BooleanProjection::new(kind, bits))
}

fn nested_event<T: Scalar>(o: &OrderSpec<T>, env: &Env<'_, T>, cfg: &Config<T>) -> Result<Vec<bool>> {
    let cause = project(&o.cause, env, o.cause_kind, cfg)?;
    let effect = project(&o.effect, env, o.effect_kind, cfg)?;
    completed_pairs(&cause, &effect, o.bound.as_ref(), env.grid(), cfg.eq_tol)
}

/// Evaluates a response or precedence property.
pub fn check_order<T: Scalar>(o: &OrderSpec<T>, env: &Env<'_, T>, cfg: &Config<T>) -> Result<Verdict<T>> {
    let cause = project(&o.cause, env, o.cause_kind, cfg)?;
    let effect = project(&o.effect, env, o.effect_kind, cfg)?;
    match o.pattern {
        Pattern::Response => check_response(&cause, &effect, o.bound.as_ref(), env.grid(), cfg),
        Pattern::Precedence => check_precedence(&cause, &effect, o.bound.as_ref(), env.grid(), cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::Trace;

    fn ev(bits: &[u8]) -> BooleanProjection {
        BooleanProjection::new(ProjectionKind::Event, bits.iter().map(|&b| b == 1).collect())
    }

    fn grid(n: usize) -> Vec<f64> {
        (0..n).map(|i| i as f64).collect()
    }

    #[test]
    fn edges() {
        assert_eq!(rising_edges(&ev(&[0, 0, 1, 1, 0, 1])), vec![2, 5]);
        assert!(rising_edges(&ev(&[1, 1, 1])).is_empty());
        assert!(rising_edges(&ev(&[0, 0, 0])).is_empty());
    }

    #[test]
    fn transforms() {
        let tr = Trace::new(
            grid(4),
            vec![("a".into(), vec![2.0, 3.0, 4.0, 6.0]), ("b".into(), vec![1.0, 2.0, 3.0, 5.0])],
        )
        .unwrap();
        let e = Expr::Abs(Box::new(Expr::bin(BinOp::Sub, Expr::sig("a"), Expr::sig("b"))));
        assert_eq!(apply_transform(&e, &tr, 1e-9).unwrap().values(), &[1.0; 4]);
        let z = Expr::bin(BinOp::Add, Expr::sig("a"), Expr::Neg(Box::new(Expr::sig("a"))));
        assert_eq!(apply_transform(&z, &tr, 1e-9).unwrap().values(), &[0.0; 4]);
        let d = Expr::Deriv(Box::new(Expr::sig("b")), 1);
        assert_eq!(apply_transform(&d, &tr, 1e-9).unwrap().values(), &[1.0, 1.0, 2.0]);
        let q = Expr::bin(BinOp::Div, Expr::sig("a"), Expr::bin(BinOp::Sub, Expr::sig("b"), Expr::Num(2.0)));
        assert!(matches!(apply_transform(&q, &tr, 1e-9), Err(Error::DivisionByZero { t }) if t == 1.0));
        assert!(matches!(apply_transform(&Expr::sig("zz"), &tr, 1e-9), Err(Error::UnknownSignal(_))));
    }

    #[test]
    fn response_cases() {
        let times = grid(31);
        let cfg = Config::default();
        let mut c = vec![0u8; 31];
        let mut e = vec![0u8; 31];
        c[5] = 1;
        e[20] = 1;
        let le10 = Constraint::new(Cmp::Le, 10.0);
        let v = check_response(&ev(&c), &ev(&e), Some(&le10), &times, &cfg).unwrap();
        assert_eq!(v.status, Status::Violated);
        assert!(matches!(v.witness, Witness::Unmatched { at: Sample { index: 5, .. }, .. }));
        let v = check_response(&ev(&[0; 31]), &ev(&e), Some(&le10), &times, &cfg).unwrap();
        assert!(v.is_holds());
        // A cause near the end cannot be refuted.
        let mut late = vec![0u8; 31];
        late[25] = 1;
        let v = check_response(&ev(&late), &ev(&e), Some(&le10), &times, &cfg).unwrap();
        assert_eq!(v.status, Status::Inconclusive);
        let v = check_response(&ev(&late), &ev(&e), Some(&le10), &times, &cfg.clone().strict())
            .unwrap();
        assert_eq!(v.status, Status::Violated);
    }

    #[test]
    fn precedence_cases() {
        let times = grid(20);
        let cfg = Config::default();
        let mut c = vec![0u8; 20];
        let mut e = vec![0u8; 20];
        e[10] = 1;
        let v = check_precedence::<f64>(&ev(&c), &ev(&e), None, &times, &cfg).unwrap();
        assert_eq!(v.status, Status::Violated);
        c[4] = 1;
        assert!(check_precedence::<f64>(&ev(&c), &ev(&e), None, &times, &cfg).unwrap().is_holds());
        assert!(check_precedence::<f64>(&ev(&c), &ev(&[0; 20]), None, &times, &cfg)
            .unwrap()
            .is_holds());
        let within = Constraint::new(Cmp::Lt, 5.0);
        let v = check_precedence(&ev(&c), &ev(&e), Some(&within), &times, &cfg).unwrap();
        assert_eq!(v.status, Status::Violated);
    }

    #[test]
    fn grid_mismatch() {
        let r = check_response::<f64>(&ev(&[0, 1]), &ev(&[0, 1, 0]), None, &grid(3), &Config::default());
        assert!(matches!(r, Err(Error::GridMismatch { .. })));
    }
}
