use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::assertion::DataAssertion;
use crate::extrema::ExtremaMethod;
use crate::oscillation::OscillationSpec;
use crate::relationship::{Expr, ProjectionKind};
use crate::scalar::{Constraint, Scalar};
use crate::spike::{DerivativeSource, Spike2Spec, SpikeSpec};
use crate::transient::{OvershootSpec, RiseSpec};

/// Location of a construct in the property file.
///
/// Lines and columns are 1-based; `start..end` are byte offsets. Spans never
/// take part in AST equality, so a reparsed pretty-printed property compares
/// equal to the original.
#[derive(Debug, Clone, Copy, Default, Eq, Serialize)]
pub struct SourceSpan {
    pub line: u32,
    pub column: u32,
    pub start: usize,
    pub end: usize,
}

impl PartialEq for SourceSpan {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

// Consistent with `eq`: all spans hash alike.
impl std::hash::Hash for SourceSpan {
    fn hash<H: std::hash::Hasher>(&self, _: &mut H) {}
}

impl SourceSpan {
    pub fn same_location(&self, other: &SourceSpan) -> bool {
        (self.line, self.column, self.start, self.end)
            == (other.line, other.column, other.start, other.end)
    }

    pub fn to(self, end: SourceSpan) -> SourceSpan {
        SourceSpan { end: end.end.max(self.start), ..self }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("{span}: syntax error: {message}")]
    Syntax { message: String, span: SourceSpan },
    #[error("{span}: property `{name}` is declared more than once")]
    DuplicatePropertyName { name: String, span: SourceSpan },
    #[error("{span}: intervals of a data assertion must be disjoint")]
    OverlappingIntervals { span: SourceSpan },
}

impl ParseError {
    pub fn span(&self) -> SourceSpan {
        match self {
            ParseError::Syntax { span, .. }
            | ParseError::DuplicatePropertyName { span, .. }
            | ParseError::OverlappingIntervals { span } => *span,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CheckError {
    #[error("{span}: unknown signal `{name}`")]
    UnknownSignal { name: String, span: SourceSpan },
    #[error("{span}: derivative column `{name}` is missing from the trace")]
    MissingDerivativeColumn { name: String, span: SourceSpan },
    #[error("{span}: {message}")]
    InvalidThreshold { message: String, span: SourceSpan },
}

impl CheckError {
    pub fn span(&self) -> SourceSpan {
        match self {
            CheckError::UnknownSignal { span, .. }
            | CheckError::MissingDerivativeColumn { span, .. }
            | CheckError::InvalidThreshold { span, .. } => *span,
        }
    }
}

/// One `property NAME: body;` declaration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Property<T> {
    pub name: String,
    pub node: Node<T>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Node<T> {
    pub body: Body<T>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Pattern {
    Response,
    Precedence,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderSpec<T> {
    pub pattern: Pattern,
    pub cause: Box<Node<T>>,
    pub cause_kind: ProjectionKind,
    pub effect: Box<Node<T>>,
    pub effect_kind: ProjectionKind,
    pub bound: Option<Constraint<T>>,
}

/// One variant per leaf of the property taxonomy.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Body<T> {
    Assert(DataAssertion<T>),
    Spike {
        signal: String,
        spec: SpikeSpec<T>,
    },
    Spike2 {
        signal: String,
        spec: Spike2Spec<T>,
    },
    Oscillation {
        signal: String,
        spec: OscillationSpec<T>,
    },
    Functional {
        target: String,
        expr: Expr<T>,
        inner: Box<Node<T>>,
    },
    Order(OrderSpec<T>),
    Rise {
        signal: String,
        target: Constraint<T>,
        trigger: Box<Node<T>>,
        spec: RiseSpec<T>,
    },
    Overshoot {
        signal: String,
        target: Constraint<T>,
        trigger: Box<Node<T>>,
        spec: OvershootSpec<T>,
    },
}

impl<T: Scalar> Body<T> {
    /// Short name of the construct, used in diagnostics.
    pub fn construct(&self) -> &'static str {
        match self {
            Body::Assert(_) => "data assertion",
            Body::Spike { .. } => "spike",
            Body::Spike2 { .. } => "two-parameter spike",
            Body::Oscillation { .. } => "oscillation",
            Body::Functional { .. } => "functional relationship",
            Body::Order(o) => match o.pattern {
                Pattern::Response => "response",
                Pattern::Precedence => "precedence",
            },
            Body::Rise { spec, .. } => match spec.direction {
                crate::transient::RiseDirection::Rise => "rise time",
                crate::transient::RiseDirection::Fall => "fall time",
            },
            Body::Overshoot { spec, .. } => match spec.direction {
                crate::transient::OvershootDirection::Overshoot => "overshoot",
                crate::transient::OvershootDirection::Undershoot => "undershoot",
            },
        }
    }
}

fn rename(name: &mut String, map: &BTreeMap<String, String>) {
    if let Some(new) = map.get(name.as_str()) {
        *name = new.clone();
    }
}

fn rename_method(m: &mut ExtremaMethod, map: &BTreeMap<String, String>) {
    if let ExtremaMethod::Precomputed { first, second } = m {
        rename(first, map);
        rename(second, map);
    }
}

impl<T: Scalar> Node<T> {
    /// Applies signal renames to every reference in the tree. Names bound by
    /// `let` inside the tree are left alone.
    pub fn rename_signals(&mut self, map: &BTreeMap<String, String>) {
        match &mut self.body {
            Body::Assert(da) => {
                da.lhs.rename_signals(map);
                da.rhs.rename_signals(map);
            }
            Body::Spike { signal, spec } => {
                rename(signal, map);
                rename_method(&mut spec.method, map);
            }
            Body::Spike2 { signal, spec } => {
                rename(signal, map);
                if let DerivativeSource::Column(c) = &mut spec.derivative {
                    rename(c, map);
                }
            }
            Body::Oscillation { signal, spec } => {
                rename(signal, map);
                rename_method(&mut spec.method, map);
            }
            Body::Functional { target, expr, inner } => {
                expr.rename_signals(map);
                let mut scoped = map.clone();
                scoped.remove(target.as_str());
                inner.rename_signals(&scoped);
            }
            Body::Order(o) => {
                o.cause.rename_signals(map);
                o.effect.rename_signals(map);
            }
            Body::Rise { signal, trigger, .. } | Body::Overshoot { signal, trigger, .. } => {
                rename(signal, map);
                trigger.rename_signals(map);
            }
        }
    }
}

impl<T: Scalar> Property<T> {
    pub fn rename_signals(&mut self, map: &BTreeMap<String, String>) {
        self.node.rename_signals(map);
    }
}
