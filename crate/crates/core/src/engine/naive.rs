//! Reference evaluator: each property's defining formula as plain nested
//! loops over grid points, with no precomputation or early pruning.
//!
//! It shares only pointwise arithmetic with the optimised checkers (signal
//! transforms, feature and statistics formulas) and follows the same witness
//! conventions, so verdicts can be compared field by field.

use crate::config::{Config, EndPolicy};
use crate::dsl::ast::{Body, Node, OrderSpec, Pattern, Property};
use crate::error::{Error, Result};
use crate::extrema::{select_alternating, ExtremaMethod, Extremum, ExtremumKind};
use crate::oscillation::{
    classify_damping, classify_damping_trend, cycles, oscillation_stats, AmplitudeMode, Damping,
    DampingKind, OscillationSpec, OscillationStats, PeriodMode,
};
use crate::relationship::{apply_transform, ProjectionKind};
use crate::scalar::{snap_eps, time_le, Cmp, Constraint, Interval, Scalar};
use crate::spike::{DerivativeSource, Polarity, Spike2Spec, SpikeFeatures, SpikeSpec};
use crate::assertion::DataAssertion;
use crate::trace::{Env, InterpolationMode, Signal, SignalSource, Trace};
use crate::transient::{Limit, OvershootDirection, OvershootSpec, RiseDirection, RiseSpec};
use crate::verdict::{Match, Sample, Status, Verdict, Witness};

/// Largest grid the reference evaluator accepts.
pub const MAX_SAMPLES: usize = 10_000;

pub fn evaluate_naive<T: Scalar>(prop: &Property<T>, trace: &Trace<T>, cfg: &Config<T>) -> Result<Verdict<T>> {
    if trace.len() > MAX_SAMPLES {
        return Err(Error::TraceTooLarge { samples: trace.len(), limit: MAX_SAMPLES });
    }
    let mut prop = prop.clone();
    if !cfg.bindings.is_empty() {
        prop.rename_signals(&cfg.bindings.iter().cloned().collect());
    }
    check(&prop.node, &Env::new(trace), cfg)
}

/// `t` lies in the closed interval, up to grid tolerance.
fn inside<T: Scalar>(t: T, lo: T, hi: T) -> bool {
    t >= lo - snap_eps(lo) && t <= hi + snap_eps(hi)
}

fn check<T: Scalar>(node: &Node<T>, env: &Env<'_, T>, cfg: &Config<T>) -> Result<Verdict<T>> {
    match &node.body {
        Body::Assert(da) => assertion(da, env, cfg),
        Body::Spike { signal, spec } => Ok(match spikes(env.signal(signal)?, spec, env, cfg, true)?.first() {
            Some(f) => Verdict::holds(Witness::Spike(*f)),
            None => Verdict::violated(
                Witness::None,
                format!("no spike in [{}, {}] satisfies the feature constraints", spec.window.lo, spec.window.hi),
            ),
        }),
        Body::Spike2 { signal, spec } => {
            let sig = env.signal(signal)?;
            let d = derivative(sig, &spec.derivative, env)?;
            Ok(match slope_pairs(sig.times(), &d, spec, cfg.eq_tol, true).first() {
                Some(&(i, j)) => Verdict::holds(Witness::Slopes {
                    rise: Sample::at(sig.times(), i),
                    fall: Sample::at(sig.times(), j),
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
        Body::Oscillation { signal, spec } => {
            let sig = env.signal(signal)?;
            oscillation(&extrema(sig, spec, env, cfg)?, sig, spec, cfg.eq_tol)
        }
        Body::Functional { target, expr, inner } => {
            let derived = apply_transform(expr, env, cfg.eq_tol)?;
            check(inner, &env.with(target.clone(), derived), cfg)
        }
        Body::Order(o) => order(o, env, cfg),
        Body::Rise { signal, target, trigger, spec } => {
            let sig = env.signal(signal)?;
            let trig = occurrences(&project(trigger, env, ProjectionKind::Event, cfg)?, ProjectionKind::Event);
            let tgt = target_bits(sig, target, env.grid().len(), cfg.eq_tol);
            Ok(rise(sig, &trig, &tgt, spec, env.grid(), cfg))
        }
        Body::Overshoot { signal, target, trigger, spec } => {
            let sig = env.signal(signal)?;
            let trig = occurrences(&project(trigger, env, ProjectionKind::Event, cfg)?, ProjectionKind::Event);
            let tgt = target_bits(sig, target, env.grid().len(), cfg.eq_tol);
            Ok(overshoot(sig, &trig, &tgt, target.bound, spec, env.grid(), cfg))
        }
    }
}

// ---- data assertions

fn assertion<T: Scalar>(da: &DataAssertion<T>, env: &Env<'_, T>, cfg: &Config<T>) -> Result<Verdict<T>> {
    let l = apply_transform(&da.lhs, env, cfg.eq_tol)?;
    let r = apply_transform(&da.rhs, env, cfg.eq_tol)?;
    let n = l.len().min(r.len());
    let grid = &env.grid()[..n];
    let fail = |at: Sample<T>, lhs: T, rhs: T| {
        (!da.op.eval(lhs, rhs, cfg.eq_tol)).then(|| {
            Verdict::violated(
                Witness::Point { at, lhs, rhs },
                format!("{} {} {} fails at t = {}", lhs, da.op, rhs, at.t),
            )
        })
    };
    if n == 0 {
        return Ok(Verdict::holds(Witness::None));
    }
    let untimed = da.intervals.is_empty();
    let mut hs = da.intervals.clone();
    if untimed {
        hs.push(Interval::new(grid[0], grid[n - 1]));
    }
    hs.sort_by(|a, b| a.lo.partial_cmp(&b.lo).unwrap_or(std::cmp::Ordering::Equal));
    let linear = cfg.interp == InterpolationMode::Linear && !da.intervals.is_empty();
    for h in hs {
        if linear && n > 0 && h.lo >= grid[0] && h.lo <= grid[n - 1] && !on_grid(grid, h.lo) {
            let below = (0..n).rev().find(|&i| grid[i] < h.lo).unwrap_or(0);
            let at = Sample { index: below, t: h.lo };
            if let Some(v) = fail(at, l.value_at(h.lo, InterpolationMode::Linear)?, r.value_at(h.lo, InterpolationMode::Linear)?) {
                return Ok(v);
            }
        }
        for i in 0..n {
            if untimed || inside(grid[i], h.lo, h.hi) {
                if let Some(v) = fail(Sample::at(grid, i), l.value(i), r.value(i)) {
                    return Ok(v);
                }
            }
        }
        if linear && h.hi > h.lo && h.hi >= grid[0] && h.hi <= grid[n - 1] && !on_grid(grid, h.hi) {
            let below = (0..n).rev().find(|&i| grid[i] < h.hi).unwrap_or(0);
            let at = Sample { index: below, t: h.hi };
            if let Some(v) = fail(at, l.value_at(h.hi, InterpolationMode::Linear)?, r.value_at(h.hi, InterpolationMode::Linear)?) {
                return Ok(v);
            }
        }
    }
    Ok(Verdict::holds(Witness::None))
}

fn on_grid<T: Scalar>(grid: &[T], t: T) -> bool {
    grid.iter().any(|&x| (x - t).abs() <= snap_eps(t))
}

fn assertion_bits<T: Scalar>(da: &DataAssertion<T>, env: &Env<'_, T>, cfg: &Config<T>) -> Result<Vec<bool>> {
    let l = apply_transform(&da.lhs, env, cfg.eq_tol)?;
    let r = apply_transform(&da.rhs, env, cfg.eq_tol)?;
    let grid = env.grid();
    Ok((0..grid.len())
        .map(|i| {
            let in_h = da.intervals.is_empty() || da.intervals.iter().any(|h| inside(grid[i], h.lo, h.hi));
            in_h && i < l.len() && i < r.len() && da.op.eval(l.value(i), r.value(i), cfg.eq_tol)
        })
        .collect())
}

// ---- extrema

/// Forward differences read straight off the samples.
fn deriv_at<T: Scalar>(sig: &Signal<T>, i: usize, order: u8) -> Option<T> {
    let (t, v) = (sig.times(), sig.values());
    match order {
        1 => (i + 1 < v.len()).then(|| (v[i + 1] - v[i]) / (t[i + 1] - t[i])),
        _ => {
            let a = deriv_at(sig, i, 1)?;
            let b = deriv_at(sig, i + 1, 1)?;
            Some((b - a) / (t[i + 1] - t[i]))
        }
    }
}

/// Derivative-based kind of each point; `None` for the analytical method.
struct Kinds {
    kinds: Option<Vec<Option<ExtremumKind>>>,
}

fn classify<T: Scalar>(d1: Option<T>, d2: Option<T>, tol: T) -> Option<ExtremumKind> {
    let (d1, d2) = (d1?, d2?);
    if d1.abs() > tol {
        None
    } else if d2 > tol {
        Some(ExtremumKind::Min)
    } else if d2 < -tol {
        Some(ExtremumKind::Max)
    } else {
        None
    }
}

fn kinds<T: Scalar>(
    sig: &Signal<T>,
    method: &ExtremaMethod,
    env: &Env<'_, T>,
    tol: T,
) -> Result<Kinds> {
    let n = sig.len();
    let kinds = match method {
        ExtremaMethod::Analytical => None,
        ExtremaMethod::Punctual => Some(
            (0..n).map(|i| classify(deriv_at(sig, i, 1), deriv_at(sig, i, 2), tol)).collect(),
        ),
        ExtremaMethod::Precomputed { first, second } => {
            let col = |c: &str| env.lookup(c).ok_or_else(|| Error::MissingDerivativeColumn(c.to_string()));
            let (c1, c2) = (col(first)?, col(second)?);
            let at = |c: &Signal<T>, t: T| {
                (0..c.len()).find(|&j| (c.time(j) - t).abs() <= snap_eps(t)).map(|j| c.value(j))
            };
            Some((0..n).map(|i| classify(at(c1, sig.time(i)), at(c2, sig.time(i)), tol)).collect())
        }
    };
    Ok(Kinds { kinds })
}

/// `x` is an extremum of `kind` over grid points `lo..=hi`.
fn local<T: Scalar>(k: &Kinds, sig: &Signal<T>, kind: ExtremumKind, x: usize, lo: usize, hi: usize) -> bool {
    match &k.kinds {
        Some(ks) => ks[x] == Some(kind),
        None => (lo..=hi).all(|t| match kind {
            ExtremumKind::Min => sig.value(x) <= sig.value(t),
            ExtremumKind::Max => sig.value(x) >= sig.value(t),
        }),
    }
}

fn window_indices<T: Scalar>(times: &[T], w: Interval<T>) -> Vec<usize> {
    (0..times.len()).filter(|&i| inside(times[i], w.lo, w.hi)).collect()
}

// ---- spikes

fn spikes<T: Scalar>(
    sig: &Signal<T>,
    spec: &SpikeSpec<T>,
    env: &Env<'_, T>,
    cfg: &Config<T>,
    first_only: bool,
) -> Result<Vec<SpikeFeatures<T>>> {
    let k = kinds(sig, &spec.method, env, cfg.deriv_tol)?;
    let idx = window_indices(sig.times(), spec.window);
    let mut out = Vec::new();
    if idx.len() < 3 {
        return Ok(out);
    }
    let (f, g) = (idx[0], idx[idx.len() - 1]);
    let valley = match spec.polarity {
        Polarity::Upward => ExtremumKind::Min,
        Polarity::Downward => ExtremumKind::Max,
    };
    let peak = valley.opposite();
    for vp1 in f..=g {
        for pp in vp1 + 1..=g {
            for vp2 in pp + 1..=g {
                if local(&k, sig, valley, vp1, f, pp)
                    && local(&k, sig, peak, pp, vp1, g)
                    && local(&k, sig, valley, vp2, pp, g)
                {
                    let feat = SpikeFeatures::compute(sig, vp1, pp, vp2, spec.psi);
                    let sat = |c: &Option<Constraint<T>>, v: T| c.map_or(true, |c| c.holds(v, cfg.eq_tol));
                    if sat(&spec.a, feat.a) && sat(&spec.sp1, feat.sp1) && sat(&spec.sp2, feat.sp2) && sat(&spec.w, feat.w) {
                        out.push(feat);
                        if first_only {
                            return Ok(out);
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

fn derivative<T: Scalar>(sig: &Signal<T>, source: &DerivativeSource, env: &Env<'_, T>) -> Result<Vec<T>> {
    match source {
        DerivativeSource::FiniteDifference => Ok((0..sig.len()).map_while(|i| deriv_at(sig, i, 1)).collect()),
        DerivativeSource::Column(c) => {
            let col = env.lookup(c).ok_or_else(|| Error::MissingDerivativeColumn(c.clone()))?;
            Ok(sig
                .times()
                .iter()
                .map_while(|&t| (0..col.len()).find(|&j| (col.time(j) - t).abs() <= snap_eps(t)).map(|j| col.value(j)))
                .collect())
        }
    }
}

fn slope_pairs<T: Scalar>(times: &[T], d: &[T], spec: &Spike2Spec<T>, tol: T, first_only: bool) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..d.len() {
        if !Cmp::Gt.eval(d[i], spec.m, tol) {
            continue;
        }
        for j in i..d.len() {
            if Cmp::Lt.eval(d[j], -spec.m, tol) {
                if time_le(times[j], times[i] + spec.w) {
                    out.push((i, j));
                    if first_only {
                        return out;
                    }
                }
                break;
            }
        }
    }
    out
}

// ---- oscillations

/// Plateau-aware extrema candidates followed by the alternation filter.
fn extrema<T: Scalar>(
    sig: &Signal<T>,
    spec: &OscillationSpec<T>,
    env: &Env<'_, T>,
    cfg: &Config<T>,
) -> Result<Vec<Extremum<T>>> {
    let k = kinds(sig, &spec.method, env, cfg.deriv_tol)?;
    let idx = window_indices(sig.times(), spec.window);
    let v = sig.values();
    let mut cands = Vec::new();
    if let (Some(&lo), Some(&hi)) = (idx.first(), idx.last()) {
        for x in lo..=hi {
            let kind = match &k.kinds {
                Some(ks) => ks[x],
                None => {
                    if x == lo || v[x - 1] == v[x] {
                        continue;
                    }
                    let mut e = x;
                    while e < hi && v[e + 1] == v[x] {
                        e += 1;
                    }
                    if e == hi {
                        continue;
                    }
                    if v[x - 1] > v[x] && v[e + 1] > v[x] {
                        Some(ExtremumKind::Min)
                    } else if v[x - 1] < v[x] && v[e + 1] < v[x] {
                        Some(ExtremumKind::Max)
                    } else {
                        None
                    }
                }
            };
            if let Some(kind) = kind {
                cands.push(Extremum { kind, index: x, t: sig.time(x), v: v[x] });
            }
        }
    }
    Ok(select_alternating(cands, spec.prominence.unwrap_or(cfg.prominence)))
}

fn oscillation<T: Scalar>(
    ext: &[Extremum<T>],
    sig: &Signal<T>,
    spec: &OscillationSpec<T>,
    tol: T,
) -> Result<Verdict<T>> {
    let stats = if ext.len() >= 2 {
        oscillation_stats(ext)?
    } else {
        OscillationStats { extrema: ext.to_vec(), osc_n: 0, avg_amp_pp: None, avg_period: None }
    };
    let w = |stats, failing_cycle, damping| Witness::Oscillation { stats, failing_cycle, damping };
    if ext.len() < 3 {
        return Ok(Verdict::violated(
            w(stats, None, None),
            format!("no complete oscillation in [{}, {}]", spec.window.lo, spec.window.hi),
        ));
    }
    let all = cycles(ext, sig, spec.amplitude_mode);
    for i in 0..ext.len() - 2 {
        let (a, c) = (ext[i], ext[i + 2]);
        let period = match spec.period_mode {
            PeriodMode::PerCycle => c.t - a.t,
            PeriodMode::Average => stats.avg_period.unwrap_or(c.t - a.t),
        };
        let amp = match spec.amplitude_mode {
            AmplitudeMode::Reference(r) => (i..=i + 2).fold(T::zero(), |m, j| m.max((ext[j].v - r).abs())),
            AmplitudeMode::PeakToPeak => {
                let hi = (i..=i + 2).fold(T::neg_infinity(), |m, j| m.max(ext[j].v));
                let lo = (i..=i + 2).fold(T::infinity(), |m, j| m.min(ext[j].v));
                hi - lo
            }
            AmplitudeMode::AvgPeakToPeak => stats.avg_amp_pp.unwrap_or_else(T::zero),
        };
        let ok = |k: &Option<Constraint<T>>, v: T| k.map_or(true, |k| k.holds(v, tol));
        if !ok(&spec.period, period) || !ok(&spec.amplitude, amp) {
            let cycle = all[i];
            return Ok(Verdict::violated(
                w(stats, Some(cycle), None),
                format!("oscillation from t = {} has period {} and amplitude {}", a.t, period, amp),
            ));
        }
    }
    let damping = match spec.damping {
        None => None,
        Some(req) => {
            let d = if req.trend {
                classify_damping_trend(ext, tol)?
            } else {
                // Each peak-to-peak amplitude against the next one.
                let amp = |j: usize| (ext[j].v - ext[j + 1].v).abs();
                let steps = ext.len() - 2;
                let damped = (0..steps).all(|j| Cmp::Ge.eval(amp(j), amp(j + 1), tol));
                let driven = (0..steps).all(|j| Cmp::Le.eval(amp(j), amp(j + 1), tol));
                let d = match (damped, driven) {
                    (true, true) => Damping::Both,
                    (true, false) => Damping::Damped,
                    (false, true) => Damping::Driven,
                    (false, false) => Damping::Neither,
                };
                debug_assert_eq!(Some(d), classify_damping(ext, tol).ok());
                d
            };
            let ok = match req.kind {
                DampingKind::Damped => matches!(d, Damping::Damped | Damping::Both),
                DampingKind::Driven => matches!(d, Damping::Driven | Damping::Both),
            };
            if !ok {
                return Ok(Verdict::violated(
                    w(stats, None, Some(d)),
                    format!("oscillations are {d:?}, not {:?}", req.kind).to_lowercase(),
                ));
            }
            Some(d)
        }
    };
    Ok(Verdict::holds(w(stats, None, damping)))
}

// ---- projections and order relationships

fn project<T: Scalar>(node: &Node<T>, env: &Env<'_, T>, kind: ProjectionKind, cfg: &Config<T>) -> Result<Vec<bool>> {
    let n = env.grid().len();
    let mut bits = vec![false; n];
    match &node.body {
        Body::Assert(da) => {
            let state = assertion_bits(da, env, cfg)?;
            return Ok(match kind {
                ProjectionKind::State => state,
                ProjectionKind::Event => (0..n).map(|i| i > 0 && state[i] && !state[i - 1]).collect(),
            });
        }
        Body::Spike { signal, spec } => {
            for f in spikes(env.signal(signal)?, spec, env, cfg, false)? {
                match kind {
                    ProjectionKind::Event => bits[f.anchor(spec.anchor).index] = true,
                    ProjectionKind::State => (f.vp1.index..=f.vp2.index).for_each(|i| bits[i] = true),
                }
            }
        }
        Body::Spike2 { signal, spec } => {
            let sig = env.signal(signal)?;
            let d = derivative(sig, &spec.derivative, env)?;
            for (i, _) in slope_pairs(sig.times(), &d, spec, cfg.eq_tol, false) {
                bits[i] = true;
            }
        }
        Body::Oscillation { signal, spec } => {
            let sig = env.signal(signal)?;
            let ext = extrema(sig, spec, env, cfg)?;
            if oscillation(&ext, sig, spec, cfg.eq_tol)?.status == Status::Holds {
                match kind {
                    ProjectionKind::Event => {
                        for e in ext.iter().filter(|e| spec.anchor.accepts(e.kind)) {
                            bits[e.index] = true;
                        }
                    }
                    ProjectionKind::State => {
                        (ext[0].index..=ext[ext.len() - 1].index).for_each(|i| bits[i] = true)
                    }
                }
            }
        }
        Body::Functional { target, expr, inner } => {
            let derived = apply_transform(expr, env, cfg.eq_tol)?;
            return project(inner, &env.with(target.clone(), derived), kind, cfg);
        }
        Body::Order(o) if kind == ProjectionKind::Event => {
            let causes = occurrences(&project(&o.cause, env, o.cause_kind, cfg)?, o.cause_kind);
            let effects = occurrences(&project(&o.effect, env, o.effect_kind, cfg)?, o.effect_kind);
            let t = env.grid();
            for &k in &effects {
                bits[k] = causes
                    .iter()
                    .any(|&j| j < k && o.bound.map_or(true, |b| b.holds((t[k] - t[j]).abs(), cfg.eq_tol)));
            }
        }
        other => {
            let what = match other {
                Body::Order(_) => format!("a {} used as a state", other.construct()),
                _ => format!("a {} property", other.construct()),
            };
            return Err(Error::NotProjectable(what));
        }
    }
    Ok(bits)
}

fn occurrences(bits: &[bool], kind: ProjectionKind) -> Vec<usize> {
    (0..bits.len())
        .filter(|&i| match kind {
            ProjectionKind::State => bits[i],
            ProjectionKind::Event => i > 0 && bits[i] && !bits[i - 1],
        })
        .collect()
}

fn order<T: Scalar>(o: &OrderSpec<T>, env: &Env<'_, T>, cfg: &Config<T>) -> Result<Verdict<T>> {
    let t = env.grid();
    let causes = occurrences(&project(&o.cause, env, o.cause_kind, cfg)?, o.cause_kind);
    let effects = occurrences(&project(&o.effect, env, o.effect_kind, cfg)?, o.effect_kind);
    let within = |a: usize, b: usize| o.bound.map_or(true, |c| c.holds((t[b] - t[a]).abs(), cfg.eq_tol));
    let mut pairs = Vec::new();
    match o.pattern {
        Pattern::Response => {
            let end = t[t.len() - 1];
            let mut pending = None;
            for &c in &causes {
                match effects.iter().find(|&&e| e > c && within(c, e)) {
                    Some(&e) => pairs.push(Match {
                        cause: Sample::at(t, c),
                        effect: Sample::at(t, e),
                        distance: (t[e] - t[c]).abs(),
                    }),
                    None => {
                        let open = match o.bound {
                            None => true,
                            Some(b) => match b.op {
                                Cmp::Lt | Cmp::Le | Cmp::Eq => t[c] + b.bound > end + snap_eps(end),
                                _ => true,
                            },
                        };
                        let deadline = o.bound.map(|b| t[c] + b.bound);
                        let w = Witness::Unmatched { at: Sample::at(t, c), deadline };
                        if open && cfg.end_policy == EndPolicy::Inconclusive {
                            pending.get_or_insert((w, c));
                        } else {
                            return Ok(Verdict::violated(w, format!("no matching effect for t = {}", t[c])));
                        }
                    }
                }
            }
            if let Some((w, c)) = pending {
                return Ok(Verdict::inconclusive(
                    w,
                    format!("the response to t = {} may occur after the end of the trace", t[c]),
                ));
            }
        }
        Pattern::Precedence => {
            for &e in &effects {
                match causes.iter().rev().find(|&&c| c < e && within(c, e)) {
                    Some(&c) => pairs.push(Match {
                        cause: Sample::at(t, c),
                        effect: Sample::at(t, e),
                        distance: (t[e] - t[c]).abs(),
                    }),
                    None => {
                        return Ok(Verdict::violated(
                            Witness::Unmatched { at: Sample::at(t, e), deadline: None },
                            format!("no matching cause before t = {}", t[e]),
                        ))
                    }
                }
            }
        }
    }
    Ok(Verdict::holds(Witness::Matches { pairs }))
}

// ---- transient behaviour

/// Edges of `signal op bound` becoming true.
fn target_bits<T: Scalar>(sig: &Signal<T>, target: &Constraint<T>, n: usize, tol: T) -> Vec<bool> {
    let state = |i: usize| i < sig.len() && target.holds(sig.value(i), tol);
    (0..n).map(|i| i > 0 && state(i) && !state(i - 1)).collect()
}

fn strictly_monotone<T: Scalar>(sig: &Signal<T>, from: usize, to: usize, up: bool, tol: T) -> Option<usize> {
    for j in from..to {
        let ok = if up {
            Cmp::Lt.eval(sig.value(j), sig.value(j + 1), tol)
        } else {
            Cmp::Gt.eval(sig.value(j), sig.value(j + 1), tol)
        };
        if !ok {
            return Some(j);
        }
    }
    None
}

enum Step<T> {
    Met(Match<T>),
    Pending(Witness<T>),
    Failed(Witness<T>, String),
}

fn combine<T: Scalar>(steps: Vec<Step<T>>, policy: EndPolicy) -> Verdict<T> {
    let mut pairs = Vec::new();
    let mut pending = None;
    for s in steps {
        match s {
            Step::Met(m) => pairs.push(m),
            Step::Failed(w, why) => return Verdict::violated(w, why),
            Step::Pending(w) if policy == EndPolicy::Strict => {
                return Verdict::violated(w, "the target is not reached within the trace")
            }
            Step::Pending(w) => {
                pending.get_or_insert(w);
            }
        }
    }
    match pending {
        Some(w) => Verdict::inconclusive(w, "the deadline extends past the end of the trace"),
        None => Verdict::holds(Witness::Matches { pairs }),
    }
}

fn rise<T: Scalar>(
    sig: &Signal<T>,
    triggers: &[usize],
    target: &[bool],
    spec: &RiseSpec<T>,
    t: &[T],
    cfg: &Config<T>,
) -> Verdict<T> {
    let end = t[t.len() - 1];
    let up = spec.direction == RiseDirection::Rise;
    let steps = triggers
        .iter()
        .map(|&st| {
            let deadline = t[st] + spec.rt;
            let trig = Sample::at(t, st);
            // The earliest edge at or after the trigger decides.
            let reach = (st..t.len()).find(|&k| target[k]).filter(|&k| time_le(t[k], deadline));
            match reach {
                None if !time_le(deadline, end) => Step::Pending(Witness::Unmatched { at: trig, deadline: Some(deadline) }),
                None => Step::Failed(
                    Witness::Unmatched { at: trig, deadline: Some(deadline) },
                    format!("target not reached by t = {deadline}"),
                ),
                Some(k) => match spec.monotonic.then(|| strictly_monotone(sig, st, k, up, cfg.eq_tol)).flatten() {
                    Some(j) => Step::Failed(
                        Witness::Transient { trigger: trig, reached: Some(Sample::at(t, k)), at: Some(Sample::at(t, j)) },
                        format!("signal is not strictly monotone at t = {}", t[j]),
                    ),
                    None => Step::Met(Match { cause: trig, effect: Sample::at(t, k), distance: t[k] - t[st] }),
                },
            }
        })
        .collect();
    combine(steps, cfg.end_policy)
}

fn overshoot<T: Scalar>(
    sig: &Signal<T>,
    triggers: &[usize],
    target: &[bool],
    target_value: T,
    spec: &OvershootSpec<T>,
    t: &[T],
    cfg: &Config<T>,
) -> Verdict<T> {
    let end = t[t.len() - 1];
    let limit = match spec.limit {
        Limit::Absolute(v) => v,
        Limit::Relative(d) => target_value + d,
    };
    let over = spec.direction == OvershootDirection::Overshoot;
    let within = |v: T| if over { Cmp::Le.eval(v, limit, cfg.eq_tol) } else { Cmp::Ge.eval(v, limit, cfg.eq_tol) };
    let steps = triggers
        .iter()
        .map(|&st| {
            let trig = Sample::at(t, st);
            let mut failure = None;
            let mut truncated = false;
            for k in st..t.len() {
                if !target[k] {
                    continue;
                }
                if spec.monotonic {
                    if let Some(j) = strictly_monotone(sig, st, k, over, cfg.eq_tol) {
                        failure.get_or_insert((k, j));
                        continue;
                    }
                }
                let stop = t[k] + spec.oi;
                let mut bad = None;
                for i in k..sig.len() {
                    if time_le(t[i], stop) && !within(sig.value(i)) {
                        bad = Some(i);
                        break;
                    }
                }
                match bad {
                    Some(i) => {
                        failure.get_or_insert((k, i));
                    }
                    None if !time_le(stop, end) => truncated = true,
                    None => return Step::Met(Match { cause: trig, effect: Sample::at(t, k), distance: t[k] - t[st] }),
                }
            }
            match failure {
                _ if truncated => Step::Pending(Witness::Unmatched { at: trig, deadline: None }),
                Some((k, i)) => Step::Failed(
                    Witness::Transient { trigger: trig, reached: Some(Sample::at(t, k)), at: Some(Sample::at(t, i)) },
                    format!("signal value {} at t = {} is beyond the limit {}", sig.value(i), t[i], limit),
                ),
                None => Step::Pending(Witness::Unmatched { at: trig, deadline: None }),
            }
        })
        .collect();
    combine(steps, cfg.end_policy)
}
