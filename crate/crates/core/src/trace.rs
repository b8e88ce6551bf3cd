//! Finite sampled signals and traces.
//!
//! A [`Signal`] is a strictly time-ordered series of samples. Its length
//! `|s|` is the timestamp of the last sample; any query past it is undefined
//! and reported as [`Error::OutOfDomain`] rather than extrapolated.
//!
//! A [`Trace`] groups signals that share one time grid. The grid itself is
//! exposed as the built-in `time` signal so properties can refer to absolute
//! instants.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::ops::Range;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{snap_eps, Scalar};

/// Name of the built-in clock signal.
pub const CLOCK: &str = "time";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterpolationMode {
    /// Only sample points may be queried.
    #[default]
    Grid,
    /// Piecewise-linear between samples.
    Linear,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Signal<T> {
    name: String,
    times: Vec<T>,
    values: Vec<T>,
}

impl<T: Scalar> Signal<T> {
    pub fn new(name: impl Into<String>, times: Vec<T>, values: Vec<T>) -> Result<Self> {
        let name = name.into();
        if times.len() != values.len() {
            return Err(Error::MalformedCsv {
                line: 0,
                message: format!(
                    "signal `{name}` has {} timestamps and {} values",
                    times.len(),
                    values.len()
                ),
            });
        }
        if times.is_empty() {
            return Err(Error::TooFewSamples { needed: 1, found: 0 });
        }
        for (i, w) in times.windows(2).enumerate() {
            if !(w[0] < w[1]) {
                return Err(Error::NonMonotoneTime { line: i as u64 + 1 });
            }
        }
        if let Some(i) = times
            .iter()
            .zip(&values)
            .position(|(t, v)| !t.is_finite() || !v.is_finite())
        {
            return Err(Error::NonFiniteValue { line: i as u64, column: name });
        }
        Ok(Self { name, times, values })
    }

    /// Builds a signal on a uniform grid `start, start + dt, ...` from a closure.
    pub fn sample(
        name: impl Into<String>,
        start: T,
        dt: T,
        count: usize,
        f: impl Fn(T) -> T,
    ) -> Result<Self> {
        let times: Vec<T> = (0..count)
            .map(|i| start + dt * T::from_usize(i).unwrap())
            .collect();
        let values = times.iter().map(|&t| f(t)).collect();
        Self::new(name, times, values)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn time(&self, i: usize) -> T {
        self.times[i]
    }

    pub fn value(&self, i: usize) -> T {
        self.values[i]
    }

    /// `|s|`: timestamp of the last sample.
    pub fn length(&self) -> T {
        *self.times.last().expect("signals are never empty")
    }

    pub fn start(&self) -> T {
        self.times[0]
    }

    /// Index of the sample at `t`, if `t` lies on the grid.
    pub fn grid_index(&self, t: T) -> Option<usize> {
        let eps = snap_eps(t);
        let i = self.times.partition_point(|&x| x < t - eps);
        (i < self.times.len() && (self.times[i] - t).abs() <= eps).then_some(i)
    }

    /// Indices of the samples inside the closed interval `[lo, hi]`, clipped
    /// to the domain. Empty when the interval lies outside the trace.
    pub fn window(&self, lo: T, hi: T) -> Range<usize> {
        window_of(&self.times, lo, hi)
    }

    pub fn value_at(&self, t: T, mode: InterpolationMode) -> Result<T> {
        let out = || Error::OutOfDomain { signal: self.name.clone(), t: t.to_f64_lossy() };
        if t < T::zero() || t < self.start() - snap_eps(t) || t > self.length() + snap_eps(t) {
            return Err(out());
        }
        if let Some(i) = self.grid_index(t) {
            return Ok(self.values[i]);
        }
        match mode {
            InterpolationMode::Grid => Err(out()),
            InterpolationMode::Linear => {
                let hi = self.times.partition_point(|&x| x < t);
                let lo = hi - 1;
                let (t0, t1) = (self.times[lo], self.times[hi]);
                let (v0, v1) = (self.values[lo], self.values[hi]);
                Ok(v0 + (v1 - v0) * (t - t0) / (t1 - t0))
            }
        }
    }

    /// Forward finite difference of order 1 or 2, using the local sample
    /// spacing as the step. The result drops the last `order` samples.
    pub fn finite_difference(&self, order: u8) -> Result<Signal<T>> {
        match order {
            1 => {
                if self.len() < 2 {
                    return Err(Error::TooFewSamples { needed: 2, found: self.len() });
                }
                let n = self.len() - 1;
                let values = (0..n)
                    .map(|i| {
                        (self.values[i + 1] - self.values[i]) / (self.times[i + 1] - self.times[i])
                    })
                    .collect();
                Ok(Signal {
                    name: format!("{}'", self.name),
                    times: self.times[..n].to_vec(),
                    values,
                })
            }
            2 => {
                if self.len() < 3 {
                    return Err(Error::TooFewSamples { needed: 3, found: self.len() });
                }
                self.finite_difference(1)?.finite_difference(1)
            }
            other => Err(Error::InvalidThreshold(format!(
                "derivative order must be 1 or 2, got {other}"
            ))),
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn map_values(&self, f: impl Fn(T) -> T) -> Signal<T> {
        Signal {
            name: self.name.clone(),
            times: self.times.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Mirror image in time: sample `i` moves to `start + end - t_i`.
    pub fn reversed(&self) -> Signal<T> {
        let (a, b) = (self.start(), self.length());
        Signal {
            name: self.name.clone(),
            times: self.times.iter().rev().map(|&t| a + b - t).collect(),
            values: self.values.iter().rev().copied().collect(),
        }
    }

    pub fn shifted(&self, dt: T) -> Signal<T> {
        Signal {
            name: self.name.clone(),
            times: self.times.iter().map(|&t| t + dt).collect(),
            values: self.values.clone(),
        }
    }
}

pub(crate) fn window_of<T: Scalar>(times: &[T], lo: T, hi: T) -> Range<usize> {
    let start = times.partition_point(|&x| x < lo - snap_eps(lo));
    let end = times.partition_point(|&x| x <= hi + snap_eps(hi));
    start..end.max(start)
}

/// Anything signals can be looked up from by name.
pub trait SignalSource<T: Scalar> {
    fn lookup(&self, name: &str) -> Option<&Signal<T>>;

    /// The shared time grid.
    fn grid(&self) -> &[T];

    fn signal(&self, name: &str) -> Result<&Signal<T>> {
        self.lookup(name).ok_or_else(|| Error::UnknownSignal(name.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace<T> {
    columns: Vec<String>,
    signals: BTreeMap<String, Signal<T>>,
    clock: Signal<T>,
}

impl<T: Scalar> Trace<T> {
    /// Builds a trace from a grid and named value columns.
    pub fn new(times: Vec<T>, columns: Vec<(String, Vec<T>)>) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::TooFewSamples { needed: 2, found: times.len() });
        }
        let clock = Signal::new(CLOCK, times.clone(), times.clone())?;
        let mut names = Vec::with_capacity(columns.len());
        let mut signals = BTreeMap::new();
        for (name, values) in columns {
            if name == CLOCK || signals.contains_key(&name) {
                return Err(Error::MalformedCsv {
                    line: 1,
                    message: format!("duplicate column `{name}`"),
                });
            }
            let sig = Signal::new(name.clone(), times.clone(), values)?;
            names.push(name.clone());
            signals.insert(name, sig);
        }
        Ok(Self { columns: names, signals, clock })
    }

    pub fn from_signals(signals: Vec<Signal<T>>) -> Result<Self> {
        let first = signals.first().ok_or_else(|| Error::MalformedCsv {
            line: 1,
            message: "a trace needs at least one signal".into(),
        })?;
        let times = first.times().to_vec();
        let mut cols = Vec::with_capacity(signals.len());
        for s in signals {
            if s.times() != times.as_slice() {
                return Err(Error::GridMismatch { left: times.len(), right: s.len() });
            }
            cols.push((s.name().to_string(), s.values().to_vec()));
        }
        Self::new(times, cols)
    }

    pub fn times(&self) -> &[T] {
        self.clock.times()
    }

    pub fn len(&self) -> usize {
        self.clock.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Timestamp of the last sample.
    pub fn length(&self) -> T {
        self.clock.length()
    }

    /// Signal column names in file order (the clock is not included).
    pub fn signal_names(&self) -> &[String] {
        &self.columns
    }

    pub fn signals(&self) -> impl Iterator<Item = &Signal<T>> {
        self.columns.iter().map(move |c| &self.signals[c])
    }

    /// Time-reversed copy of every signal.
    pub fn reversed(&self) -> Trace<T> {
        let clock = self.clock.reversed();
        let signals = self
            .signals
            .iter()
            .map(|(k, s)| (k.clone(), s.reversed()))
            .collect();
        Trace {
            columns: self.columns.clone(),
            signals,
            clock: Signal { values: clock.times.clone(), ..clock },
        }
    }

    /// Copy with every timestamp moved by `dt`.
    pub fn shifted(&self, dt: T) -> Trace<T> {
        let clock = self.clock.shifted(dt);
        let signals = self
            .signals
            .iter()
            .map(|(k, s)| (k.clone(), s.shifted(dt)))
            .collect();
        Trace {
            columns: self.columns.clone(),
            signals,
            clock: Signal { values: clock.times.clone(), ..clock },
        }
    }

    /// Copy with the values of every signal transformed by `f`.
    pub fn map_values(&self, f: impl Fn(T) -> T) -> Trace<T> {
        let signals = self
            .signals
            .iter()
            .map(|(k, s)| (k.clone(), s.map_values(&f)))
            .collect();
        Trace { columns: self.columns.clone(), signals, clock: self.clock.clone() }
    }

    pub fn read_csv(reader: impl Read, options: &CsvOptions) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .delimiter(options.delimiter)
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers().map_err(csv_error)?.clone();
        if headers.len() < 2 {
            return Err(Error::MalformedCsv {
                line: 1,
                message: "header must name a time column and at least one signal".into(),
            });
        }
        if &headers[0] != options.time_column.as_str() {
            return Err(Error::MalformedCsv {
                line: 1,
                message: format!(
                    "first column must be `{}`, found `{}`",
                    options.time_column, &headers[0]
                ),
            });
        }
        let names: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
        let mut times: Vec<T> = Vec::new();
        let mut cols: Vec<Vec<T>> = vec![Vec::new(); names.len()];
        for record in rdr.records() {
            let record = record.map_err(csv_error)?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            let parse = |cell: &str, column: &str| -> Result<T> {
                let v: T = cell.parse().map_err(|_| Error::MalformedCsv {
                    line,
                    message: format!("cannot parse `{cell}` in column `{column}` as a number"),
                })?;
                if !v.is_finite() {
                    return Err(Error::NonFiniteValue { line, column: column.to_string() });
                }
                Ok(v)
            };
            let t = parse(&record[0], &options.time_column)?;
            if let Some(&last) = times.last() {
                if !(t > last) {
                    return Err(Error::NonMonotoneTime { line });
                }
            }
            times.push(t);
            for (j, col) in cols.iter_mut().enumerate() {
                col.push(parse(&record[j + 1], &names[j])?);
            }
        }
        Self::new(times, names.into_iter().zip(cols).collect())
    }

    pub fn load(path: impl AsRef<Path>, options: &CsvOptions) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::read_csv(std::io::BufReader::new(file), options)
    }

    /// Writes the trace as CSV. Values use the shortest representation that
    /// parses back to the same bits.
    pub fn write_csv(&self, writer: impl Write, options: &CsvOptions) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .delimiter(options.delimiter)
            .from_writer(writer);
        let mut header = vec![options.time_column.clone()];
        header.extend(self.columns.iter().cloned());
        w.write_record(&header).map_err(csv_error)?;
        for i in 0..self.len() {
            let mut row = vec![self.times()[i].to_string()];
            row.extend(self.signals().map(|s| s.value(i).to_string()));
            w.write_record(&row).map_err(csv_error)?;
        }
        w.flush().map_err(|e| Error::Io { path: "<writer>".into(), message: e.to_string() })
    }
}

impl<T: Scalar> SignalSource<T> for Trace<T> {
    fn lookup(&self, name: &str) -> Option<&Signal<T>> {
        if name == CLOCK {
            Some(&self.clock)
        } else {
            self.signals.get(name)
        }
    }

    fn grid(&self) -> &[T] {
        self.times()
    }
}

/// Trace lookup with additional derived signals layered on top.
#[derive(Debug, Clone)]
pub struct Env<'a, T> {
    base: &'a Trace<T>,
    derived: BTreeMap<String, Signal<T>>,
}

impl<'a, T: Scalar> Env<'a, T> {
    pub fn new(base: &'a Trace<T>) -> Self {
        Self { base, derived: BTreeMap::new() }
    }

    pub fn trace(&self) -> &'a Trace<T> {
        self.base
    }

    pub fn with(&self, name: impl Into<String>, signal: Signal<T>) -> Env<'a, T> {
        let name = name.into();
        let mut derived = self.derived.clone();
        derived.insert(name.clone(), signal.with_name(name));
        Env { base: self.base, derived }
    }
}

impl<T: Scalar> SignalSource<T> for Env<'_, T> {
    fn lookup(&self, name: &str) -> Option<&Signal<T>> {
        self.derived.get(name).or_else(|| self.base.lookup(name))
    }

    fn grid(&self) -> &[T] {
        self.base.times()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvOptions {
    pub delimiter: u8,
    pub time_column: String,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self { delimiter: b',', time_column: CLOCK.to_string() }
    }
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    match e.kind() {
        csv::ErrorKind::Io(io) => Error::Io { path: "<csv>".into(), message: io.to_string() },
        _ => Error::MalformedCsv { line, message: e.to_string() },
    }
}
