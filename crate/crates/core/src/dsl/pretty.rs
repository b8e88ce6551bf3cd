//! Canonical surface form. Default options are omitted, so printing a
//! reparsed canonical text gives the same text back.

use std::fmt::Write;

use super::ast::{Body, Node, Pattern, Property};
use crate::extrema::ExtremaMethod;
use crate::oscillation::{AmplitudeMode, DampingKind, ExtremumAnchor, PeriodMode};
use crate::relationship::ProjectionKind;
use crate::scalar::{Constraint, Interval, Scalar};
use crate::spike::{DerivativeSource, Polarity, Psi, SpikeAnchor};
use crate::transient::{Limit, OvershootDirection, RiseDirection};

pub fn pretty_print<T: Scalar>(props: &[Property<T>]) -> String {
    let mut out = String::new();
    for p in props {
        let _ = writeln!(out, "property {}: {};", p.name, body_text(&p.node));
    }
    out
}

/// Canonical text of a single body.
pub fn body_text<T: Scalar>(node: &Node<T>) -> String {
    let mut s = String::new();
    write_body(&mut s, node);
    s
}

fn c<T: Scalar>(k: &Constraint<T>) -> String {
    format!("{} {}", k.op, k.bound)
}

fn iv<T: Scalar>(i: &Interval<T>) -> String {
    format!("[{}, {}]", i.lo, i.hi)
}

fn kind(k: ProjectionKind) -> &'static str {
    match k {
        ProjectionKind::Event => "event",
        ProjectionKind::State => "state",
    }
}

fn method(out: &mut String, m: &ExtremaMethod) {
    match m {
        ExtremaMethod::Analytical => {}
        ExtremaMethod::Punctual => out.push_str(" method punctual"),
        ExtremaMethod::Precomputed { first, second } => {
            let _ = write!(out, " method precomputed({first}, {second})");
        }
    }
}

/// Sub-bodies that end in optional clauses are parenthesized so an outer
/// clause is never captured by the inner construct.
fn write_sub<T: Scalar>(out: &mut String, node: &Node<T>) {
    match node.body {
        Body::Order(_) | Body::Functional { .. } | Body::Rise { .. } | Body::Overshoot { .. } => {
            out.push('(');
            write_body(out, node);
            out.push(')');
        }
        _ => write_body(out, node),
    }
}

fn write_body<T: Scalar>(out: &mut String, node: &Node<T>) {
    match &node.body {
        Body::Assert(da) => {
            let _ = write!(out, "assert {} {} {}", da.lhs, da.op, da.rhs);
            if !da.intervals.is_empty() {
                let list: Vec<String> = da.intervals.iter().map(iv).collect();
                let _ = write!(out, " in {}", list.join(", "));
            }
        }
        Body::Spike { signal, spec } => {
            out.push_str("spike");
            if spec.polarity == Polarity::Downward {
                out.push_str(" down");
            }
            let _ = write!(out, " on {signal} in {} with ", iv(&spec.window));
            let feats: Vec<String> = [("a", &spec.a), ("sp1", &spec.sp1), ("sp2", &spec.sp2), ("w", &spec.w)]
                .into_iter()
                .filter_map(|(n, k)| k.as_ref().map(|k| format!("{n} {}", c(k))))
                .collect();
            out.push_str(&feats.join(", "));
            match spec.psi {
                Psi::Min => {}
                Psi::Max => out.push_str(" psi max"),
                Psi::Mean => out.push_str(" psi mean"),
            }
            method(out, &spec.method);
            match spec.anchor {
                SpikeAnchor::Peak => {}
                SpikeAnchor::Vp1 => out.push_str(" anchor vp1"),
                SpikeAnchor::Vp2 => out.push_str(" anchor vp2"),
            }
        }
        Body::Spike2 { signal, spec } => {
            let _ = write!(out, "spike2 on {signal} with m = {}, w = {}", spec.m, spec.w);
            if let DerivativeSource::Column(col) = &spec.derivative {
                let _ = write!(out, " derivative {col}");
            }
        }
        Body::Oscillation { signal, spec } => {
            let _ = write!(out, "oscillation on {signal} in {} with ", iv(&spec.window));
            let feats: Vec<String> = [("period", &spec.period), ("amplitude", &spec.amplitude)]
                .into_iter()
                .filter_map(|(n, k)| k.as_ref().map(|k| format!("{n} {}", c(k))))
                .collect();
            out.push_str(&feats.join(", "));
            match spec.amplitude_mode {
                AmplitudeMode::PeakToPeak => {}
                AmplitudeMode::AvgPeakToPeak => out.push_str(" avg-peak-to-peak"),
                AmplitudeMode::Reference(r) => {
                    let _ = write!(out, " ref {r}");
                }
            }
            if spec.period_mode == PeriodMode::Average {
                out.push_str(" average");
            }
            method(out, &spec.method);
            if let Some(p) = spec.prominence {
                let _ = write!(out, " prominence {p}");
            }
            if let Some(d) = spec.damping {
                out.push_str(match d.kind {
                    DampingKind::Damped => " damped",
                    DampingKind::Driven => " driven",
                });
                if d.trend {
                    out.push_str(" trend");
                }
            }
            match spec.anchor {
                ExtremumAnchor::Any => {}
                ExtremumAnchor::Min => out.push_str(" anchor min"),
                ExtremumAnchor::Max => out.push_str(" anchor max"),
            }
        }
        Body::Functional { target, expr, inner } => {
            let _ = write!(out, "let {target} = {expr} then ");
            write_body(out, inner);
        }
        Body::Order(o) => {
            let (first, second, n1, k1, n2, k2) = match o.pattern {
                Pattern::Response => ("whenever", "then", &o.cause, o.cause_kind, &o.effect, o.effect_kind),
                Pattern::Precedence => ("before", "requires", &o.effect, o.effect_kind, &o.cause, o.cause_kind),
            };
            let _ = write!(out, "{first} {} ", kind(k1));
            write_sub(out, n1);
            let _ = write!(out, " {second} {} ", kind(k2));
            write_sub(out, n2);
            if let Some(b) = &o.bound {
                let _ = write!(out, " within {}", c(b));
            }
        }
        Body::Rise { signal, target, trigger, spec } => {
            let word = match spec.direction {
                RiseDirection::Rise => "rise",
                RiseDirection::Fall => "fall",
            };
            let _ = write!(out, "{word} on {signal} to {} after ", c(target));
            write_sub(out, trigger);
            let _ = write!(out, " within {}", spec.rt);
            if spec.monotonic {
                out.push_str(" monotonic");
            }
        }
        Body::Overshoot { signal, target, trigger, spec } => {
            let (word, lim) = match spec.direction {
                OvershootDirection::Overshoot => ("overshoot", "max"),
                OvershootDirection::Undershoot => ("undershoot", "min"),
            };
            let _ = write!(out, "{word} on {signal} to {} after ", c(target));
            write_sub(out, trigger);
            match spec.limit {
                Limit::Absolute(v) => {
                    let _ = write!(out, " {lim} {v}");
                }
                Limit::Relative(d) if d.is_sign_negative() => {
                    let _ = write!(out, " {lim} target - {}", -d);
                }
                Limit::Relative(d) => {
                    let _ = write!(out, " {lim} target + {d}");
                }
            }
            let _ = write!(out, " over {}", spec.oi);
            if spec.monotonic {
                out.push_str(" monotonic");
            }
        }
    }
}
