//! Evaluation of parsed properties against a trace.

pub mod naive;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::assertion::{check_assertion, DataAssertion};
use crate::config::Config;
use crate::dsl::ast::{Body, Node, Property, SourceSpan};
use crate::dsl::typecheck;
use crate::error::{Error, Result};
use crate::oscillation::check_oscillation;
use crate::relationship::{apply_transform, check_order, project, BooleanProjection, Expr, ProjectionKind};
use crate::scalar::{Constraint, Scalar};
use crate::spike::{check_spike_two_param, detect_spike};
use crate::trace::{Env, SignalSource, Trace};
use crate::transient::{check_overshoot, check_rise_time};
use crate::verdict::{Status, Verdict};

pub const REPORT_SCHEMA: u32 = 1;

/// Environment variable capping the number of worker threads.
pub const THREADS_VAR: &str = "SIGPROP_THREADS";

/// A module error tagged with the property it came from.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("property `{property}` at {span}: {source}")]
pub struct EngineError {
    pub property: String,
    pub span: SourceSpan,
    pub source: Error,
}

impl EngineError {
    /// True for name-resolution and threshold errors caught before evaluation.
    pub fn is_check_error(&self) -> bool {
        matches!(self.source, Error::Check(_))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceInfo<T> {
    pub path: Option<String>,
    pub samples: usize,
    pub length: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyVerdict<T> {
    pub property: String,
    pub construct: &'static str,
    #[serde(flatten)]
    pub verdict: Verdict<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report<T> {
    pub schema: u32,
    pub trace: TraceInfo<T>,
    pub config: Config<T>,
    pub verdicts: Vec<PropertyVerdict<T>>,
}

impl<T: Scalar> Report<T> {
    pub fn with_path(mut self, path: impl Into<String>) -> Self {
        self.trace.path = Some(path.into());
        self
    }

    /// `violated` if any property is violated, else `inconclusive` if any is,
    /// else `holds` (also for an empty report).
    pub fn overall(&self) -> Status {
        let has = |s| self.verdicts.iter().any(|v| v.verdict.status == s);
        if has(Status::Violated) {
            Status::Violated
        } else if has(Status::Inconclusive) {
            Status::Inconclusive
        } else {
            Status::Holds
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Properties with the configured signal bindings applied.
pub fn bind<T: Scalar>(props: &[Property<T>], cfg: &Config<T>) -> Vec<Property<T>> {
    let map: BTreeMap<String, String> = cfg.bindings.iter().cloned().collect();
    props
        .iter()
        .cloned()
        .map(|mut p| {
            if !map.is_empty() {
                p.rename_signals(&map);
            }
            p
        })
        .collect()
}

/// Binds and typechecks `props` against `trace`.
pub fn prepare<T: Scalar>(
    props: &[Property<T>],
    trace: &Trace<T>,
    cfg: &Config<T>,
) -> std::result::Result<Vec<Property<T>>, EngineError> {
    let bound = bind(props, cfg);
    for p in &bound {
        typecheck(p, trace.signal_names()).map_err(|e| EngineError {
            property: p.name.clone(),
            span: e.span(),
            source: Error::Check(e),
        })?;
    }
    Ok(bound)
}

fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_VAR).ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// Evaluates every property; the report keeps declaration order whatever
/// the degree of parallelism.
pub fn evaluate<T: Scalar>(
    props: &[Property<T>],
    trace: &Trace<T>,
    cfg: &Config<T>,
) -> std::result::Result<Report<T>, EngineError> {
    let checked = prepare(props, trace, cfg)?;
    let run = || -> Vec<std::result::Result<PropertyVerdict<T>, EngineError>> {
        checked.par_iter().map(|p| evaluate_one(p, trace, cfg)).collect()
    };
    let results = match thread_cap() {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(run),
            Err(_) => run(),
        },
        None => run(),
    };
    let verdicts = results.into_iter().collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(Report {
        schema: REPORT_SCHEMA,
        trace: TraceInfo { path: None, samples: trace.len(), length: trace.length() },
        config: cfg.clone(),
        verdicts,
    })
}

fn evaluate_one<T: Scalar>(
    p: &Property<T>,
    trace: &Trace<T>,
    cfg: &Config<T>,
) -> std::result::Result<PropertyVerdict<T>, EngineError> {
    let verdict = check_node(&p.node, &Env::new(trace), cfg).map_err(|source| EngineError {
        property: p.name.clone(),
        span: p.span,
        source,
    })?;
    Ok(PropertyVerdict { property: p.name.clone(), construct: p.node.body.construct(), verdict })
}

/// Event projection of `signal op bound` becoming true.
pub(crate) fn target_event<T: Scalar>(
    signal: &str,
    target: &Constraint<T>,
    env: &Env<'_, T>,
    cfg: &Config<T>,
) -> Result<BooleanProjection> {
    let da = DataAssertion::untimed(Expr::sig(signal), target.op, Expr::Num(target.bound));
    let node = Node { body: Body::Assert(da), span: SourceSpan::default() };
    project(&node, env, ProjectionKind::Event, cfg)
}

/// Evaluates one property body.
pub fn check_node<T: Scalar>(node: &Node<T>, env: &Env<'_, T>, cfg: &Config<T>) -> Result<Verdict<T>> {
    match &node.body {
        Body::Assert(da) => check_assertion(da, env, cfg),
        Body::Spike { signal, spec } => detect_spike(env.signal(signal)?, spec, env, cfg),
        Body::Spike2 { signal, spec } => check_spike_two_param(env.signal(signal)?, spec, env, cfg),
        Body::Oscillation { signal, spec } => check_oscillation(env.signal(signal)?, spec, env, cfg),
        Body::Functional { target, expr, inner } => {
            let derived = apply_transform(expr, env, cfg.eq_tol)?;
            check_node(inner, &env.with(target.clone(), derived), cfg)
        }
        Body::Order(o) => check_order(o, env, cfg),
        Body::Rise { signal, target, trigger, spec } => {
            let sig = env.signal(signal)?;
            let trig = project(trigger, env, ProjectionKind::Event, cfg)?;
            let tgt = target_event(signal, target, env, cfg)?;
            check_rise_time(sig, &trig, &tgt, spec, env.grid(), cfg)
        }
        Body::Overshoot { signal, target, trigger, spec } => {
            let sig = env.signal(signal)?;
            let trig = project(trigger, env, ProjectionKind::Event, cfg)?;
            let tgt = target_event(signal, target, env, cfg)?;
            check_overshoot(sig, &trig, &tgt, target.bound, spec, env.grid(), cfg)
        }
    }
}
