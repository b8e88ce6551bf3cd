//! Local extrema predicates and alternating extrema sequences.

use std::ops::Range;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::trace::{Signal, SignalSource};

/// How local extrema are recognised.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtremaMethod {
    /// Zero first and signed second forward difference.
    Punctual,
    /// `s(x) <= s(t)` (or `>=`) for every grid point of the window.
    #[default]
    Analytical,
    /// Like `Punctual`, but the derivatives are read from trace columns.
    Precomputed { first: String, second: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtremumKind {
    Min,
    Max,
}

impl ExtremumKind {
    pub fn opposite(self) -> Self {
        match self {
            ExtremumKind::Min => ExtremumKind::Max,
            ExtremumKind::Max => ExtremumKind::Min,
        }
    }

    /// True when `a` is strictly more extreme than `b` for this kind.
    pub fn beats<T: Scalar>(self, a: T, b: T) -> bool {
        match self {
            ExtremumKind::Min => a < b,
            ExtremumKind::Max => a > b,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Extremum<T> {
    pub kind: ExtremumKind,
    pub index: usize,
    pub t: T,
    pub v: T,
}

/// Extrema queries over one signal with a fixed method.
#[derive(Debug, Clone)]
pub struct Detector<'a, T> {
    sig: &'a Signal<T>,
    derivs: Option<(Vec<Option<T>>, Vec<Option<T>>)>,
    deriv_tol: T,
}

impl<'a, T: Scalar> Detector<'a, T> {
    pub fn new(
        sig: &'a Signal<T>,
        method: &ExtremaMethod,
        src: &dyn SignalSource<T>,
        deriv_tol: T,
    ) -> Result<Self> {
        let derivs = match method {
            ExtremaMethod::Analytical => None,
            ExtremaMethod::Punctual => {
                let d1 = if sig.len() >= 2 { Some(sig.finite_difference(1)?) } else { None };
                let d2 = if sig.len() >= 3 { Some(sig.finite_difference(2)?) } else { None };
                let by_index = |d: Option<Signal<T>>| -> Vec<Option<T>> {
                    (0..sig.len())
                        .map(|i| d.as_ref().and_then(|d| (i < d.len()).then(|| d.value(i))))
                        .collect()
                };
                Some((by_index(d1), by_index(d2)))
            }
            ExtremaMethod::Precomputed { first, second } => {
                let col = |name: &str| {
                    src.lookup(name)
                        .ok_or_else(|| Error::MissingDerivativeColumn(name.to_string()))
                };
                let (c1, c2) = (col(first)?, col(second)?);
                let align = |c: &Signal<T>| -> Vec<Option<T>> {
                    sig.times()
                        .iter()
                        .map(|&t| c.grid_index(t).map(|j| c.value(j)))
                        .collect()
                };
                Some((align(c1), align(c2)))
            }
        };
        Ok(Self { sig, derivs, deriv_tol })
    }

    pub fn signal(&self) -> &'a Signal<T> {
        self.sig
    }

    pub fn is_analytical(&self) -> bool {
        self.derivs.is_none()
    }

    /// Derivative-based classification of grid point `i`; `None` for the
    /// analytical method or where a derivative is undefined.
    pub fn point_kind(&self, i: usize) -> Option<ExtremumKind> {
        let (d1, d2) = self.derivs.as_ref()?;
        let (d1, d2) = (d1[i]?, d2[i]?);
        if d1.abs() > self.deriv_tol {
            return None;
        }
        if d2 > self.deriv_tol {
            Some(ExtremumKind::Min)
        } else if d2 < -self.deriv_tol {
            Some(ExtremumKind::Max)
        } else {
            None
        }
    }

    /// Is grid point `x` a local extremum of `kind` over grid points `lo..=hi`?
    pub fn is_local(&self, kind: ExtremumKind, x: usize, lo: usize, hi: usize) -> bool {
        if x < lo || x > hi || hi >= self.sig.len() {
            return false;
        }
        if !self.is_analytical() {
            return self.point_kind(x) == Some(kind);
        }
        let v = self.sig.values();
        v[lo..=hi].iter().all(|&t| !kind.beats(t, v[x]))
    }

    /// Candidate extrema inside `range`, in time order.
    ///
    /// Analytical: runs of equal values whose neighbouring runs (inside the
    /// range) are both higher or both lower; a run is reported at its first
    /// sample. Derivative methods: every point the predicate accepts.
    pub fn candidates(&self, range: Range<usize>) -> Vec<Extremum<T>> {
        let s = self.sig;
        let mut out = Vec::new();
        if !self.is_analytical() {
            for i in range {
                if let Some(kind) = self.point_kind(i) {
                    out.push(Extremum { kind, index: i, t: s.time(i), v: s.value(i) });
                }
            }
            return out;
        }
        // (first index, value) of each run of equal values.
        let mut runs: Vec<(usize, T)> = Vec::new();
        for i in range {
            let v = s.value(i);
            if runs.last().map_or(true, |&(_, rv)| rv != v) {
                runs.push((i, v));
            }
        }
        for w in runs.windows(3) {
            let (prev, (i, v), next) = (w[0].1, w[1], w[2].1);
            let kind = if v < prev && v < next {
                ExtremumKind::Min
            } else if v > prev && v > next {
                ExtremumKind::Max
            } else {
                continue;
            };
            out.push(Extremum { kind, index: i, t: s.time(i), v });
        }
        out
    }

    pub fn alternating(&self, range: Range<usize>, prominence: T) -> Vec<Extremum<T>> {
        select_alternating(self.candidates(range), prominence)
    }
}

/// Reduces time-ordered candidates to a strictly alternating sequence whose
/// neighbours differ by more than `prominence`.
///
/// A candidate of the same kind as the last kept one replaces it when it is
/// strictly more extreme; an opposite candidate is kept only if it moves
/// far enough away from the last kept value.
pub fn select_alternating<T: Scalar>(
    candidates: impl IntoIterator<Item = Extremum<T>>,
    prominence: T,
) -> Vec<Extremum<T>> {
    let mut out: Vec<Extremum<T>> = Vec::new();
    for c in candidates {
        match out.last_mut() {
            None => out.push(c),
            Some(last) if last.kind == c.kind => {
                if c.kind.beats(c.v, last.v) {
                    *last = c;
                }
            }
            Some(last) => {
                if (c.v - last.v).abs() > prominence {
                    out.push(c);
                }
            }
        }
    }
    out
}

fn grid_point<T: Scalar>(sig: &Signal<T>, x: T) -> Result<usize> {
    sig.grid_index(x).ok_or_else(|| Error::OutOfDomain {
        signal: sig.name().to_string(),
        t: x.to_f64_lossy(),
    })
}

fn local<T: Scalar>(
    kind: ExtremumKind,
    sig: &Signal<T>,
    x: T,
    lo: T,
    hi: T,
    method: &ExtremaMethod,
    src: &dyn SignalSource<T>,
    deriv_tol: T,
) -> Result<bool> {
    let xi = grid_point(sig, x)?;
    let w = sig.window(lo, hi);
    if w.is_empty() || !w.contains(&xi) {
        return Ok(false);
    }
    let det = Detector::new(sig, method, src, deriv_tol)?;
    Ok(det.is_local(kind, xi, w.start, w.end - 1))
}

/// `local_min(x, lo, hi)` evaluated over the grid points of `[lo, hi]`.
pub fn is_local_min<T: Scalar>(
    sig: &Signal<T>,
    x: T,
    lo: T,
    hi: T,
    method: &ExtremaMethod,
    src: &dyn SignalSource<T>,
    deriv_tol: T,
) -> Result<bool> {
    local(ExtremumKind::Min, sig, x, lo, hi, method, src, deriv_tol)
}

pub fn is_local_max<T: Scalar>(
    sig: &Signal<T>,
    x: T,
    lo: T,
    hi: T,
    method: &ExtremaMethod,
    src: &dyn SignalSource<T>,
    deriv_tol: T,
) -> Result<bool> {
    local(ExtremumKind::Max, sig, x, lo, hi, method, src, deriv_tol)
}

pub fn find_alternating_extrema<T: Scalar>(
    sig: &Signal<T>,
    lo: T,
    hi: T,
    method: &ExtremaMethod,
    src: &dyn SignalSource<T>,
    prominence: T,
    deriv_tol: T,
) -> Result<Vec<Extremum<T>>> {
    let det = Detector::new(sig, method, src, deriv_tol)?;
    Ok(det.alternating(sig.window(lo, hi), prominence))
}
