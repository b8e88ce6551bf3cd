//! Offline trace checking of signal-based temporal properties.
//!
//! A [`Trace`] holds sampled signals on one time grid. Properties are written
//! in a small language (see [`dsl`]), parsed into [`Property`] values and
//! evaluated by [`engine::evaluate`], which returns one [`Verdict`] per
//! property. [`engine::naive`] is a brute-force reference evaluator and
//! [`stl`] a discrete-time STL evaluator; both serve as test oracles.
//!
//! Everything is generic over the [`Scalar`] type (`f32` or `f64`). The
//! aliases below fix it to `f64`, with `*32` variants for `f32`.

pub mod assertion;
pub mod config;
pub mod dsl;
pub mod engine;
pub mod error;
pub mod extrema;
pub mod oscillation;
pub mod relationship;
pub mod scalar;
pub mod spike;
pub mod stl;
pub mod trace;
pub mod transient;
pub mod verdict;

pub use config::{Config, EndPolicy};
pub use dsl::ast::{Body, Node, Property};
pub use dsl::{parse, pretty_print, typecheck, CheckError, ParseError, SourceSpan};
pub use engine::naive::evaluate_naive;
pub use engine::{evaluate, EngineError, Report};
pub use error::{Error, Result};
pub use scalar::{Cmp, Constraint, Interval, Scalar};
pub use trace::{CsvOptions, Env, InterpolationMode, Signal, SignalSource, Trace};
pub use verdict::{Status, Verdict, Witness};

pub type Trace64 = Trace<f64>;
pub type Signal64 = Signal<f64>;
pub type Verdict64 = Verdict<f64>;
pub type Property64 = Property<f64>;
pub type Config64 = Config<f64>;
pub type Report64 = Report<f64>;

pub type Trace32 = Trace<f32>;
pub type Signal32 = Signal<f32>;
pub type Verdict32 = Verdict<f32>;
pub type Property32 = Property<f32>;
pub type Config32 = Config<f32>;
pub type Report32 = Report<f32>;
