//! Name resolution and threshold sanity checks against a trace header.

use std::collections::BTreeSet;

use super::ast::{Body, CheckError, Node, Property, SourceSpan};
use crate::extrema::ExtremaMethod;
use crate::relationship::Expr;
use crate::scalar::{Constraint, Interval, Scalar};
use crate::spike::DerivativeSource;
use crate::trace::CLOCK;

type CResult = Result<(), CheckError>;

/// Checks `prop` against the signal names a trace provides (the clock
/// column `time` is always available).
pub fn typecheck<T: Scalar, S: AsRef<str>>(prop: &Property<T>, header: &[S]) -> CResult {
    let mut scope: BTreeSet<String> = header.iter().map(|s| s.as_ref().to_string()).collect();
    scope.insert(CLOCK.to_string());
    check_node(&prop.node, &scope)
}

fn invalid(span: SourceSpan, message: impl Into<String>) -> CheckError {
    CheckError::InvalidThreshold { message: message.into(), span }
}

fn known(name: &str, scope: &BTreeSet<String>, span: SourceSpan) -> CResult {
    if scope.contains(name) {
        Ok(())
    } else {
        Err(CheckError::UnknownSignal { name: name.to_string(), span })
    }
}

fn column(name: &str, scope: &BTreeSet<String>, span: SourceSpan) -> CResult {
    if scope.contains(name) {
        Ok(())
    } else {
        Err(CheckError::MissingDerivativeColumn { name: name.to_string(), span })
    }
}

fn expr<T: Scalar>(e: &Expr<T>, scope: &BTreeSet<String>, span: SourceSpan) -> CResult {
    e.signals().into_iter().try_for_each(|s| known(s, scope, span))
}

fn method(m: &ExtremaMethod, scope: &BTreeSet<String>, span: SourceSpan) -> CResult {
    if let ExtremaMethod::Precomputed { first, second } = m {
        column(first, scope, span)?;
        column(second, scope, span)?;
    }
    Ok(())
}

fn window<T: Scalar>(w: &Interval<T>, what: &str, span: SourceSpan) -> CResult {
    if w.lo < T::zero() || w.lo >= w.hi {
        return Err(invalid(span, format!("{what} window [{}, {}] must satisfy 0 <= lo < hi", w.lo, w.hi)));
    }
    Ok(())
}

/// Durations and widths are compared against non-negative bounds only.
fn duration<T: Scalar>(k: &Option<Constraint<T>>, what: &str, span: SourceSpan) -> CResult {
    match k {
        Some(k) if k.bound < T::zero() => Err(invalid(span, format!("{what} bound {} is negative", k.bound))),
        _ => Ok(()),
    }
}

fn positive<T: Scalar>(v: T, what: &str, span: SourceSpan) -> CResult {
    if v > T::zero() {
        Ok(())
    } else {
        Err(invalid(span, format!("{what} must be positive, got {v}")))
    }
}

fn check_node<T: Scalar>(node: &Node<T>, scope: &BTreeSet<String>) -> CResult {
    let span = node.span;
    match &node.body {
        Body::Assert(da) => {
            expr(&da.lhs, scope, span)?;
            expr(&da.rhs, scope, span)?;
            for h in &da.intervals {
                if h.lo < T::zero() || h.lo > h.hi {
                    return Err(invalid(span, format!("interval [{}, {}] must satisfy 0 <= lo <= hi", h.lo, h.hi)));
                }
            }
        }
        Body::Spike { signal, spec } => {
            known(signal, scope, span)?;
            method(&spec.method, scope, span)?;
            window(&spec.window, "spike", span)?;
            if spec.a.is_none() && spec.sp1.is_none() && spec.sp2.is_none() && spec.w.is_none() {
                return Err(invalid(span, "a spike needs at least one feature constraint"));
            }
            duration(&spec.w, "width", span)?;
        }
        Body::Spike2 { signal, spec } => {
            known(signal, scope, span)?;
            if let DerivativeSource::Column(c) = &spec.derivative {
                column(c, scope, span)?;
            }
            positive(spec.m, "slope threshold m", span)?;
            positive(spec.w, "width w", span)?;
        }
        Body::Oscillation { signal, spec } => {
            known(signal, scope, span)?;
            method(&spec.method, scope, span)?;
            window(&spec.window, "oscillation", span)?;
            duration(&spec.period, "period", span)?;
            if spec.period.is_none() && spec.amplitude.is_none() {
                return Err(invalid(span, "an oscillation needs a period or amplitude constraint"));
            }
            if let Some(p) = spec.prominence {
                if p < T::zero() {
                    return Err(invalid(span, format!("prominence {p} is negative")));
                }
            }
        }
        Body::Functional { target, expr: e, inner } => {
            expr(e, scope, span)?;
            let mut inner_scope = scope.clone();
            inner_scope.insert(target.clone());
            check_node(inner, &inner_scope)?;
        }
        Body::Order(o) => {
            check_node(&o.cause, scope)?;
            check_node(&o.effect, scope)?;
            duration(&o.bound, "distance", span)?;
        }
        Body::Rise { signal, trigger, spec, .. } => {
            known(signal, scope, span)?;
            check_node(trigger, scope)?;
            positive(spec.rt, "rise time RT", span)?;
        }
        Body::Overshoot { signal, trigger, spec, .. } => {
            known(signal, scope, span)?;
            check_node(trigger, scope)?;
            positive(spec.oi, "overshoot interval OI", span)?;
        }
    }
    Ok(())
}
