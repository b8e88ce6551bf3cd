//! Oscillation checks over alternating extrema sequences.

use serde::Serialize;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::extrema::{Detector, ExtremaMethod, Extremum, ExtremumKind};
use crate::scalar::{Cmp, Constraint, Interval, Scalar};
use crate::trace::{Signal, SignalSource};
use crate::verdict::{Sample, Verdict, Witness};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AmplitudeMode<T> {
    /// Largest distance from a reference value within the cycle.
    Reference(T),
    /// Largest minus smallest extremum value within the cycle.
    PeakToPeak,
    /// Average peak-to-peak amplitude over the whole sequence.
    AvgPeakToPeak,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PeriodMode {
    #[default]
    PerCycle,
    Average,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Damping {
    Damped,
    Driven,
    Neither,
    Both,
}

impl Damping {
    fn from_flags(damped: bool, driven: bool) -> Self {
        match (damped, driven) {
            (true, true) => Damping::Both,
            (true, false) => Damping::Damped,
            (false, true) => Damping::Driven,
            (false, false) => Damping::Neither,
        }
    }

    pub fn satisfies(self, want: DampingKind) -> bool {
        matches!(
            (self, want),
            (Damping::Both, _)
                | (Damping::Damped, DampingKind::Damped)
                | (Damping::Driven, DampingKind::Driven)
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DampingKind {
    Damped,
    Driven,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct DampingRequirement {
    pub kind: DampingKind,
    /// Use the least-squares trend of amplitude differences instead of
    /// requiring every step to be monotone.
    pub trend: bool,
}

/// Which extrema mark occurrences in an event projection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtremumAnchor {
    Min,
    Max,
    #[default]
    Any,
}

impl ExtremumAnchor {
    pub fn accepts(self, kind: ExtremumKind) -> bool {
        match self {
            ExtremumAnchor::Any => true,
            ExtremumAnchor::Min => kind == ExtremumKind::Min,
            ExtremumAnchor::Max => kind == ExtremumKind::Max,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OscillationSpec<T> {
    pub window: Interval<T>,
    pub period: Option<Constraint<T>>,
    pub amplitude: Option<Constraint<T>>,
    pub amplitude_mode: AmplitudeMode<T>,
    pub period_mode: PeriodMode,
    pub method: ExtremaMethod,
    /// Overrides the configured prominence.
    pub prominence: Option<T>,
    pub damping: Option<DampingRequirement>,
    pub anchor: ExtremumAnchor,
}

impl<T: Scalar> OscillationSpec<T> {
    pub fn new(window: Interval<T>) -> Self {
        Self {
            window,
            period: None,
            amplitude: None,
            amplitude_mode: AmplitudeMode::PeakToPeak,
            period_mode: PeriodMode::PerCycle,
            method: ExtremaMethod::Analytical,
            prominence: None,
            damping: None,
            anchor: ExtremumAnchor::Any,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OscillationStats<T> {
    pub extrema: Vec<Extremum<T>>,
    pub osc_n: usize,
    pub avg_amp_pp: Option<T>,
    pub avg_period: Option<T>,
}

/// One complete oscillation `p_i, p_{i+1}, p_{i+2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cycle<T> {
    pub start: Sample<T>,
    pub middle: Sample<T>,
    pub end: Sample<T>,
    pub period: T,
    pub amplitude: T,
}

fn stats_of<T: Scalar>(extrema: &[Extremum<T>]) -> OscillationStats<T> {
    let m = extrema.len();
    let osc_n = m.saturating_sub(1) / 2;
    let avg_amp_pp = (m >= 2).then(|| {
        let sum = extrema
            .windows(2)
            .fold(T::zero(), |acc, w| acc + (w[0].v - w[1].v).abs());
        sum / T::from_usize(m - 1).unwrap()
    });
    let avg_period = (osc_n >= 1).then(|| {
        let sum = (0..osc_n).fold(T::zero(), |acc, i| {
            acc + (extrema[2 * i].t - extrema[2 * i + 2].t).abs()
        });
        sum / T::from_usize(osc_n).unwrap()
    });
    OscillationStats { extrema: extrema.to_vec(), osc_n, avg_amp_pp, avg_period }
}

pub fn oscillation_stats<T: Scalar>(extrema: &[Extremum<T>]) -> Result<OscillationStats<T>> {
    if extrema.len() < 2 {
        return Err(Error::TooFewExtrema { needed: 2, found: extrema.len() });
    }
    Ok(stats_of(extrema))
}

fn amplitude_diffs<T: Scalar>(extrema: &[Extremum<T>]) -> Result<Vec<T>> {
    if extrema.len() < 3 {
        return Err(Error::TooFewExtrema { needed: 3, found: extrema.len() });
    }
    Ok(extrema.windows(2).map(|w| (w[0].v - w[1].v).abs()).collect())
}

/// Step-wise classification: damped when consecutive peak-to-peak amplitudes
/// never grow (beyond `tol`), driven when they never shrink.
pub fn classify_damping<T: Scalar>(extrema: &[Extremum<T>], tol: T) -> Result<Damping> {
    let d = amplitude_diffs(extrema)?;
    let damped = d.windows(2).all(|w| Cmp::Ge.eval(w[0], w[1], tol));
    let driven = d.windows(2).all(|w| Cmp::Le.eval(w[0], w[1], tol));
    Ok(Damping::from_flags(damped, driven))
}

/// Trend classification from the least-squares slope of the amplitude
/// differences against their position.
pub fn classify_damping_trend<T: Scalar>(extrema: &[Extremum<T>], tol: T) -> Result<Damping> {
    let d = amplitude_diffs(extrema)?;
    let n = T::from_usize(d.len()).unwrap();
    let xbar = (n - T::one()) / T::lit(2.0);
    let ybar = d.iter().fold(T::zero(), |a, &y| a + y) / n;
    let (mut sxy, mut sxx) = (T::zero(), T::zero());
    for (j, &y) in d.iter().enumerate() {
        let dx = T::from_usize(j).unwrap() - xbar;
        sxy = sxy + dx * (y - ybar);
        sxx = sxx + dx * dx;
    }
    let slope = sxy / sxx;
    Ok(Damping::from_flags(
        Cmp::Le.eval(slope, T::zero(), tol),
        Cmp::Ge.eval(slope, T::zero(), tol),
    ))
}

/// Complete oscillations of an alternating sequence, with per-cycle period
/// and amplitude under `mode`.
pub fn cycles<T: Scalar>(
    extrema: &[Extremum<T>],
    sig: &Signal<T>,
    mode: AmplitudeMode<T>,
) -> Vec<Cycle<T>> {
    let avg = stats_of(extrema).avg_amp_pp;
    let t = sig.times();
    extrema
        .windows(3)
        .map(|w| {
            let vals = [w[0].v, w[1].v, w[2].v];
            let amplitude = match mode {
                AmplitudeMode::Reference(r) => {
                    vals.iter().fold(T::zero(), |m, &v| m.max((v - r).abs()))
                }
                AmplitudeMode::PeakToPeak => {
                    let hi = vals.iter().fold(T::neg_infinity(), |m, &v| m.max(v));
                    let lo = vals.iter().fold(T::infinity(), |m, &v| m.min(v));
                    hi - lo
                }
                AmplitudeMode::AvgPeakToPeak => avg.unwrap_or_else(T::zero),
            };
            Cycle {
                start: Sample::at(t, w[0].index),
                middle: Sample::at(t, w[1].index),
                end: Sample::at(t, w[2].index),
                period: w[2].t - w[0].t,
                amplitude,
            }
        })
        .collect()
}

/// The judgement shared by the optimised and the reference evaluator once the
/// extrema sequence is known.
pub fn judge_oscillation<T: Scalar>(
    extrema: Vec<Extremum<T>>,
    sig: &Signal<T>,
    spec: &OscillationSpec<T>,
    tol: T,
) -> Result<Verdict<T>> {
    let stats = stats_of(&extrema);
    let witness = |stats: OscillationStats<T>, failing_cycle, damping| Witness::Oscillation {
        stats,
        failing_cycle,
        damping,
    };
    if extrema.len() < 3 {
        return Ok(Verdict::violated(
            witness(stats, None, None),
            format!(
                "no complete oscillation in [{}, {}]",
                spec.window.lo, spec.window.hi
            ),
        ));
    }
    let ok = |c: &Option<Constraint<T>>, v: T| c.map_or(true, |c| c.holds(v, tol));
    for cycle in cycles(&extrema, sig, spec.amplitude_mode) {
        let period = match spec.period_mode {
            PeriodMode::PerCycle => cycle.period,
            PeriodMode::Average => stats.avg_period.unwrap_or(cycle.period),
        };
        if !ok(&spec.period, period) || !ok(&spec.amplitude, cycle.amplitude) {
            return Ok(Verdict::violated(
                witness(stats, Some(cycle), None),
                format!(
                    "oscillation from t = {} has period {} and amplitude {}",
                    cycle.start.t, period, cycle.amplitude
                ),
            ));
        }
    }
    let damping = match spec.damping {
        None => None,
        Some(req) => {
            let d = if req.trend {
                classify_damping_trend(&extrema, tol)?
            } else {
                classify_damping(&extrema, tol)?
            };
            if !d.satisfies(req.kind) {
                return Ok(Verdict::violated(
                    witness(stats, None, Some(d)),
                    format!("oscillations are {d:?}, not {:?}", req.kind).to_lowercase(),
                ));
            }
            Some(d)
        }
    };
    Ok(Verdict::holds(witness(stats, None, damping)))
}

pub fn oscillation_extrema<T: Scalar>(
    sig: &Signal<T>,
    spec: &OscillationSpec<T>,
    src: &dyn SignalSource<T>,
    cfg: &Config<T>,
) -> Result<Vec<Extremum<T>>> {
    let det = Detector::new(sig, &spec.method, src, cfg.deriv_tol)?;
    let prominence = spec.prominence.unwrap_or(cfg.prominence);
    Ok(det.alternating(sig.window(spec.window.lo, spec.window.hi), prominence))
}

pub fn check_oscillation<T: Scalar>(
    sig: &Signal<T>,
    spec: &OscillationSpec<T>,
    src: &dyn SignalSource<T>,
    cfg: &Config<T>,
) -> Result<Verdict<T>> {
    let extrema = oscillation_extrema(sig, spec, src, cfg)?;
    judge_oscillation(extrema, sig, spec, cfg.eq_tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verdict::Status;

    fn ext(points: &[(f64, f64)]) -> Vec<Extremum<f64>> {
        points
            .iter()
            .enumerate()
            .map(|(i, &(t, v))| Extremum {
                kind: if i % 2 == 0 { ExtremumKind::Min } else { ExtremumKind::Max },
                index: i,
                t,
                v,
            })
            .collect()
    }

    #[test]
    fn stats_arithmetic() {
        let s = oscillation_stats(&ext(&[(0.0, 1.0), (1.0, 2.0), (2.0, 1.0)])).unwrap();
        assert_eq!(s.avg_amp_pp, Some(1.0));
        let s = oscillation_stats(&ext(&[
            (0.0, 0.0),
            (5.0, 1.0),
            (10.0, 0.0),
            (15.0, 1.0),
            (20.0, 0.0),
        ]))
        .unwrap();
        assert_eq!(s.osc_n, 2);
        assert_eq!(s.avg_period, Some(10.0));
        assert!(matches!(
            oscillation_stats(&ext(&[(0.0, 1.0)])),
            Err(Error::TooFewExtrema { needed: 2, found: 1 })
        ));
    }

    #[test]
    fn damping_classes() {
        let e = ext(&[(0.0, 3.0), (1.0, 0.0), (2.0, 2.0), (3.0, 0.5)]);
        assert_eq!(classify_damping(&e, 1e-9).unwrap(), Damping::Damped);
        let mut r = e.clone();
        r.reverse();
        assert_eq!(classify_damping(&r, 1e-9).unwrap(), Damping::Driven);
        let sine = ext(&[(0.0, 1.0), (1.0, -1.0), (2.0, 1.0), (3.0, -1.0)]);
        assert_eq!(classify_damping(&sine, 1e-9).unwrap(), Damping::Both);
        let zig = ext(&[(0.0, 0.0), (1.0, 3.0), (2.0, 2.0), (3.0, 4.0)]);
        assert_eq!(classify_damping(&zig, 1e-9).unwrap(), Damping::Neither);
        assert_eq!(classify_damping_trend(&e, 1e-9).unwrap(), Damping::Damped);
        assert!(classify_damping(&e[..2], 1e-9).is_err());
    }

    #[test]
    fn constant_has_no_oscillation() {
        let sig = Signal::sample("s", 0.0, 1.0, 20, |_| 1.0).unwrap();
        let tr = crate::trace::Trace::from_signals(vec![sig.clone()]).unwrap();
        let mut spec = OscillationSpec::new(Interval::new(0.0, 19.0));
        spec.period = Some(Constraint::new(Cmp::Lt, 20.0));
        let v = check_oscillation(&sig, &spec, &tr, &Config::default()).unwrap();
        assert_eq!(v.status, Status::Violated);
    }
}
