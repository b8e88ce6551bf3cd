//! Spike detection: valley-peak-valley triples with feature constraints, and
//! the two-parameter slope characterization.

use std::ops::ControlFlow;

use serde::Serialize;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::extrema::{Detector, ExtremaMethod, ExtremumKind};
use crate::scalar::{time_le, Constraint, Interval, Scalar};
use crate::trace::{Signal, SignalSource};
use crate::verdict::{Sample, Verdict, Witness};

/// Combines the two half-spike amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Psi {
    #[default]
    Min,
    Max,
    Mean,
}

impl Psi {
    pub fn apply<T: Scalar>(self, a1: T, a2: T) -> T {
        match self {
            Psi::Min => a1.min(a2),
            Psi::Max => a1.max(a2),
            Psi::Mean => (a1 + a2) / T::lit(2.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    /// Valley, peak, valley.
    #[default]
    Upward,
    /// Peak, valley, peak.
    Downward,
}

impl Polarity {
    pub fn valley(self) -> ExtremumKind {
        match self {
            Polarity::Upward => ExtremumKind::Min,
            Polarity::Downward => ExtremumKind::Max,
        }
    }
}

/// Which point of a spike marks its occurrence in an event projection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpikeAnchor {
    Vp1,
    #[default]
    Peak,
    Vp2,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpikeSpec<T> {
    pub window: Interval<T>,
    pub psi: Psi,
    pub a: Option<Constraint<T>>,
    pub sp1: Option<Constraint<T>>,
    pub sp2: Option<Constraint<T>>,
    pub w: Option<Constraint<T>>,
    pub method: ExtremaMethod,
    pub polarity: Polarity,
    pub anchor: SpikeAnchor,
}

impl<T: Scalar> SpikeSpec<T> {
    pub fn new(window: Interval<T>) -> Self {
        Self {
            window,
            psi: Psi::Min,
            a: None,
            sp1: None,
            sp2: None,
            w: None,
            method: ExtremaMethod::Analytical,
            polarity: Polarity::Upward,
            anchor: SpikeAnchor::Peak,
        }
    }

    pub fn accepts(&self, f: &SpikeFeatures<T>, tol: T) -> bool {
        let ok = |c: &Option<Constraint<T>>, v: T| c.map_or(true, |c| c.holds(v, tol));
        ok(&self.a, f.a) && ok(&self.sp1, f.sp1) && ok(&self.sp2, f.sp2) && ok(&self.w, f.w)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpikeFeatures<T> {
    pub vp1: Sample<T>,
    pub pp: Sample<T>,
    pub vp2: Sample<T>,
    pub a1: T,
    pub a2: T,
    pub a: T,
    pub sp1: T,
    pub sp2: T,
    pub w: T,
    pub w1: T,
    pub w2: T,
}

impl<T: Scalar> SpikeFeatures<T> {
    pub fn compute(sig: &Signal<T>, vp1: usize, pp: usize, vp2: usize, psi: Psi) -> Self {
        let (t, v) = (sig.times(), sig.values());
        let a1 = (v[pp] - v[vp1]).abs();
        let a2 = (v[pp] - v[vp2]).abs();
        let w1 = t[pp] - t[vp1];
        let w2 = t[vp2] - t[pp];
        SpikeFeatures {
            vp1: Sample::at(t, vp1),
            pp: Sample::at(t, pp),
            vp2: Sample::at(t, vp2),
            a1,
            a2,
            a: psi.apply(a1, a2),
            sp1: a1 / w1,
            sp2: a2 / w2,
            w: t[vp2] - t[vp1],
            w1,
            w2,
        }
    }

    pub fn anchor(&self, anchor: SpikeAnchor) -> Sample<T> {
        match anchor {
            SpikeAnchor::Vp1 => self.vp1,
            SpikeAnchor::Peak => self.pp,
            SpikeAnchor::Vp2 => self.vp2,
        }
    }
}

/// Enumerates extrema triples inside a window.
///
/// `vp1` must be a valley over `[f, pp]`, `pp` a peak over `[vp1, g]` and
/// `vp2` a valley over `[pp, g]`, with `vp1 < pp < vp2`.
pub struct TripleSearch<'a, T> {
    det: Detector<'a, T>,
    lo: usize,
    hi: usize,
    valley: ExtremumKind,
    /// Most valley-like value on `f..=j`.
    prefix_valley: Vec<T>,
    /// Most peak-like value on `i..=g`.
    suffix_peak: Vec<T>,
    /// Most valley-like value on `j..=g`.
    suffix_valley: Vec<T>,
}

impl<'a, T: Scalar> TripleSearch<'a, T> {
    pub fn new(
        sig: &'a Signal<T>,
        window: Interval<T>,
        method: &ExtremaMethod,
        polarity: Polarity,
        src: &dyn SignalSource<T>,
        deriv_tol: T,
    ) -> Result<Option<Self>> {
        let det = Detector::new(sig, method, src, deriv_tol)?;
        let w = sig.window(window.lo, window.hi);
        if w.len() < 3 {
            return Ok(None);
        }
        let (lo, hi) = (w.start, w.end - 1);
        let valley = polarity.valley();
        let peak = valley.opposite();
        let v = sig.values();
        let pick = |k: ExtremumKind, a: T, b: T| if k.beats(b, a) { b } else { a };
        let mut prefix_valley = vec![T::zero(); sig.len()];
        let mut acc = v[lo];
        for j in lo..=hi {
            acc = pick(valley, acc, v[j]);
            prefix_valley[j] = acc;
        }
        let mut suffix_peak = vec![T::zero(); sig.len()];
        let mut suffix_valley = vec![T::zero(); sig.len()];
        let (mut p, mut q) = (v[hi], v[hi]);
        for i in (lo..=hi).rev() {
            p = pick(peak, p, v[i]);
            q = pick(valley, q, v[i]);
            suffix_peak[i] = p;
            suffix_valley[i] = q;
        }
        Ok(Some(Self { det, lo, hi, valley, prefix_valley, suffix_peak, suffix_valley }))
    }

    pub fn signal(&self) -> &'a Signal<T> {
        self.det.signal()
    }

    fn first_valley(&self, i: usize, j: usize) -> bool {
        if self.det.is_analytical() {
            !self.valley.beats(self.prefix_valley[j], self.det.signal().value(i))
        } else {
            self.det.point_kind(i) == Some(self.valley)
        }
    }

    fn peak(&self, j: usize, i: usize) -> bool {
        if self.det.is_analytical() {
            !self.valley.opposite().beats(self.suffix_peak[i], self.det.signal().value(j))
        } else {
            self.det.point_kind(j) == Some(self.valley.opposite())
        }
    }

    fn second_valley(&self, k: usize, j: usize) -> bool {
        if self.det.is_analytical() {
            !self.valley.beats(self.suffix_valley[j], self.det.signal().value(k))
        } else {
            self.det.point_kind(k) == Some(self.valley)
        }
    }

    /// Calls `f` on every admissible triple in lexicographic order.
    pub fn visit<B>(
        &self,
        mut f: impl FnMut(usize, usize, usize) -> ControlFlow<B>,
    ) -> Option<B> {
        let analytical = self.det.is_analytical();
        for i in self.lo..=self.hi {
            if !self.first_valley(i, i) {
                continue;
            }
            for j in i + 1..=self.hi {
                if !self.first_valley(i, j) {
                    // The prefix extreme only gets more extreme as j grows.
                    if analytical {
                        break;
                    }
                    continue;
                }
                if !self.peak(j, i) {
                    continue;
                }
                for k in j + 1..=self.hi {
                    if self.second_valley(k, j) {
                        if let ControlFlow::Break(b) = f(i, j, k) {
                            return Some(b);
                        }
                    }
                }
            }
        }
        None
    }
}

/// First spike (by `vp1`, then `pp`, then `vp2`) satisfying `spec`.
pub fn find_spike<T: Scalar>(
    sig: &Signal<T>,
    spec: &SpikeSpec<T>,
    src: &dyn SignalSource<T>,
    cfg: &Config<T>,
) -> Result<Option<SpikeFeatures<T>>> {
    let Some(search) =
        TripleSearch::new(sig, spec.window, &spec.method, spec.polarity, src, cfg.deriv_tol)?
    else {
        return Ok(None);
    };
    Ok(search.visit(|i, j, k| {
        let f = SpikeFeatures::compute(sig, i, j, k, spec.psi);
        if spec.accepts(&f, cfg.eq_tol) {
            ControlFlow::Break(f)
        } else {
            ControlFlow::Continue(())
        }
    }))
}

pub fn detect_spike<T: Scalar>(
    sig: &Signal<T>,
    spec: &SpikeSpec<T>,
    src: &dyn SignalSource<T>,
    cfg: &Config<T>,
) -> Result<Verdict<T>> {
    Ok(match find_spike(sig, spec, src, cfg)? {
        Some(f) => Verdict::holds(Witness::Spike(f)),
        None => Verdict::violated(
            Witness::None,
            format!(
                "no spike in [{}, {}] satisfies the feature constraints",
                spec.window.lo, spec.window.hi
            ),
        ),
    })
}

/// Every spike satisfying `spec`, as feature bundles in lexicographic order.
pub fn all_spikes<T: Scalar>(
    sig: &Signal<T>,
    spec: &SpikeSpec<T>,
    src: &dyn SignalSource<T>,
    cfg: &Config<T>,
) -> Result<Vec<SpikeFeatures<T>>> {
    let mut out = Vec::new();
    if let Some(search) =
        TripleSearch::new(sig, spec.window, &spec.method, spec.polarity, src, cfg.deriv_tol)?
    {
        search.visit::<()>(|i, j, k| {
            let f = SpikeFeatures::compute(sig, i, j, k, spec.psi);
            if spec.accepts(&f, cfg.eq_tol) {
                out.push(f);
            }
            ControlFlow::Continue(())
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeSource {
    #[default]
    FiniteDifference,
    Column(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spike2Spec<T> {
    pub m: T,
    pub w: T,
    pub derivative: DerivativeSource,
}

/// First derivative of `sig` on a prefix of its grid.
pub fn derivative_values<T: Scalar>(
    sig: &Signal<T>,
    source: &DerivativeSource,
    src: &dyn SignalSource<T>,
) -> Result<Vec<T>> {
    match source {
        DerivativeSource::FiniteDifference => {
            if sig.len() < 2 {
                return Ok(Vec::new());
            }
            Ok(sig.finite_difference(1)?.values().to_vec())
        }
        DerivativeSource::Column(name) => {
            let col = src
                .lookup(name)
                .ok_or_else(|| Error::MissingDerivativeColumn(name.clone()))?;
            let mut out = Vec::with_capacity(sig.len());
            for &t in sig.times() {
                match col.grid_index(t) {
                    Some(j) => out.push(col.value(j)),
                    None => break,
                }
            }
            Ok(out)
        }
    }
}

/// Grid indices `i` with `s'(i) > m` that are followed within `w` by a point
/// with `s' < -m`, each paired with the earliest such point.
pub fn slope_pairs<T: Scalar>(
    times: &[T],
    d: &[T],
    spec: &Spike2Spec<T>,
    tol: T,
) -> Vec<(usize, usize)> {
    use crate::scalar::Cmp;
    let n = d.len();
    let mut next_fall = vec![usize::MAX; n + 1];
    for i in (0..n).rev() {
        next_fall[i] = if Cmp::Lt.eval(d[i], -spec.m, tol) { i } else { next_fall[i + 1] };
    }
    (0..n)
        .filter(|&i| Cmp::Gt.eval(d[i], spec.m, tol))
        .filter_map(|i| {
            let j = next_fall[i];
            (j < n && time_le(times[j], times[i] + spec.w)).then_some((i, j))
        })
        .collect()
}

pub fn check_spike_two_param<T: Scalar>(
    sig: &Signal<T>,
    spec: &Spike2Spec<T>,
    src: &dyn SignalSource<T>,
    cfg: &Config<T>,
) -> Result<Verdict<T>> {
    let d = derivative_values(sig, &spec.derivative, src)?;
    let t = sig.times();
    Ok(match slope_pairs(t, &d, spec, cfg.eq_tol).first() {
        Some(&(i, j)) => Verdict::holds(Witness::Slopes {
            rise: Sample::at(t, i),
            fall: Sample::at(t, j),
            rise_slope: d[i],
            fall_slope: d[j],
        }),
        None => Verdict::violated(
            Witness::None,
            format!(
                "no slope above {} is followed within {} by a slope below -{}",
                spec.m, spec.w, spec.m
            ),
        ),
    })
}
