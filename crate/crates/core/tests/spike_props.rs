mod common;

use common::arb;
use proptest::prelude::*;
use sigprop_core::extrema::{is_local_max, is_local_min, ExtremaMethod};
use sigprop_core::spike::{all_spikes, check_spike_two_param, detect_spike, Polarity, Psi, Spike2Spec, SpikeSpec};
use sigprop_core::{Cmp, Config64, Constraint, Interval, SignalSource, Trace64, Witness};

fn arb_psi() -> impl Strategy<Value = Psi> {
    prop::sample::select(vec![Psi::Min, Psi::Max, Psi::Mean])
}

fn arb_polarity() -> impl Strategy<Value = Polarity> {
    prop::sample::select(vec![Polarity::Upward, Polarity::Downward])
}

fn arb_constraint(scale: f64) -> impl Strategy<Value = Option<Constraint<f64>>> {
    prop::option::of((prop::sample::select(vec![Cmp::Lt, Cmp::Le, Cmp::Ge, Cmp::Gt]), 0u32..16).prop_map(
        move |(op, b)| Constraint::new(op, b as f64 * scale),
    ))
}

fn spec_strategy() -> impl Strategy<Value = SpikeSpec<f64>> {
    (arb_psi(), arb_polarity(), arb_constraint(0.5), arb_constraint(0.5), arb_constraint(0.5), arb_constraint(1.0), 0u32..8, 1u32..60)
        .prop_map(|(psi, polarity, a, sp1, sp2, w, lo, len)| {
            let lo = lo as f64 * 0.25;
            let mut s = SpikeSpec::new(Interval::new(lo, lo + len as f64 * 0.25));
            s.psi = psi;
            s.polarity = polarity;
            s.a = a;
            s.sp1 = sp1;
            s.sp2 = sp2;
            s.w = w;
            s
        })
}

fn trace(times: Vec<f64>, values: Vec<f64>) -> Trace64 {
    Trace64::new(times, vec![("s".into(), values)]).unwrap()
}

fn scaled(c: Option<Constraint<f64>>, k: f64) -> Option<Constraint<f64>> {
    c.map(|c| Constraint::new(c.op, c.bound * k))
}

proptest! {
    #[test]
    fn witness_features_are_consistent((times, values) in arb::series(3, 40), spec in spec_strategy()) {
        let tr = trace(times, values);
        let s = tr.signal("s").unwrap();
        let cfg = Config64::default();
        let m = ExtremaMethod::Analytical;
        let (f, g) = (spec.window.lo, spec.window.hi);
        let (valley, peak): (fn(_, _, _, _, _, _, _) -> _, fn(_, _, _, _, _, _, _) -> _) = match spec.polarity {
            Polarity::Upward => (is_local_min, is_local_max),
            Polarity::Downward => (is_local_max, is_local_min),
        };
        for sp in all_spikes(s, &spec, &tr, &cfg).unwrap() {
            let v = |i: usize| s.value(i);
            prop_assert!(sp.vp1.index < sp.pp.index && sp.pp.index < sp.vp2.index);
            prop_assert!(f <= sp.vp1.t && sp.vp2.t <= g);
            prop_assert!(valley(s, sp.vp1.t, f, sp.pp.t, &m, &tr, 1e-6).unwrap());
            prop_assert!(peak(s, sp.pp.t, sp.vp1.t, g, &m, &tr, 1e-6).unwrap());
            prop_assert!(valley(s, sp.vp2.t, sp.pp.t, g, &m, &tr, 1e-6).unwrap());
            prop_assert_eq!(sp.a1, (v(sp.pp.index) - v(sp.vp1.index)).abs());
            prop_assert_eq!(sp.a2, (v(sp.pp.index) - v(sp.vp2.index)).abs());
            prop_assert_eq!(sp.a, spec.psi.apply(sp.a1, sp.a2));
            prop_assert_eq!(sp.w1, sp.pp.t - sp.vp1.t);
            prop_assert_eq!(sp.w2, sp.vp2.t - sp.pp.t);
            prop_assert!((sp.w - (sp.w1 + sp.w2)).abs() <= cfg.eq_tol);
            prop_assert!((sp.sp1 * sp.w1 - sp.a1).abs() <= cfg.eq_tol);
            prop_assert!((sp.sp2 * sp.w2 - sp.a2).abs() <= cfg.eq_tol);
            prop_assert!(spec.accepts(&sp, cfg.eq_tol));
        }
    }

    #[test]
    fn amplitude_scales_covariantly(
        (times, values) in arb::series(3, 40),
        spec in spec_strategy(),
        k in prop::sample::select(vec![0.5, 2.0, 4.0]),
    ) {
        let tr = trace(times, values);
        let big = tr.map_values(|v| v * k);
        let cfg = Config64::default();
        let mut scaled_spec = spec.clone();
        scaled_spec.a = scaled(spec.a, k);
        scaled_spec.sp1 = scaled(spec.sp1, k);
        scaled_spec.sp2 = scaled(spec.sp2, k);
        let a = all_spikes(tr.signal("s").unwrap(), &spec, &tr, &cfg).unwrap();
        let b = all_spikes(big.signal("s").unwrap(), &scaled_spec, &big, &cfg).unwrap();
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert_eq!((x.vp1, x.pp, x.vp2, x.w), (y.vp1, y.pp, y.vp2, y.w));
            prop_assert_eq!((x.a * k, x.a1 * k, x.a2 * k), (y.a, y.a1, y.a2));
            prop_assert!((x.sp1 * k - y.sp1).abs() <= 1e-9 && (x.sp2 * k - y.sp2).abs() <= 1e-9);
        }
        let va = detect_spike(tr.signal("s").unwrap(), &spec, &tr, &cfg).unwrap();
        let vb = detect_spike(big.signal("s").unwrap(), &scaled_spec, &big, &cfg).unwrap();
        prop_assert_eq!(va.status, vb.status);
    }

    #[test]
    fn time_shift_moves_witnesses((times, values) in arb::series(3, 40), spec in spec_strategy(), d in 0u32..40) {
        let d = d as f64 * 0.25;
        let tr = trace(times, values);
        let moved = tr.shifted(d);
        let mut moved_spec = spec.clone();
        moved_spec.window = spec.window.shifted(d);
        let cfg = Config64::default();
        let a = detect_spike(tr.signal("s").unwrap(), &spec, &tr, &cfg).unwrap();
        let b = detect_spike(moved.signal("s").unwrap(), &moved_spec, &moved, &cfg).unwrap();
        prop_assert_eq!(a.status, b.status);
        if let (Witness::Spike(x), Witness::Spike(y)) = (&a.witness, &b.witness) {
            prop_assert_eq!((x.vp1.index, x.pp.index, x.vp2.index), (y.vp1.index, y.pp.index, y.vp2.index));
            prop_assert_eq!((x.vp1.t + d, x.pp.t + d, x.vp2.t + d), (y.vp1.t, y.pp.t, y.vp2.t));
            prop_assert_eq!((x.a, x.w), (y.a, y.w));
        }
    }

    #[test]
    fn downward_spikes_are_upward_spikes_of_the_negation((times, values) in arb::series(3, 30), spec in spec_strategy()) {
        let tr = trace(times, values);
        let neg = tr.map_values(|v| -v);
        let cfg = Config64::default();
        let mut flipped = spec.clone();
        flipped.polarity = match spec.polarity {
            Polarity::Upward => Polarity::Downward,
            Polarity::Downward => Polarity::Upward,
        };
        let a = all_spikes(tr.signal("s").unwrap(), &spec, &tr, &cfg).unwrap();
        let b = all_spikes(neg.signal("s").unwrap(), &flipped, &neg, &cfg).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn two_parameter_form_misses_what_amplitude_catches() {
    let tr = common::load("spike_slopes.csv");
    let s1 = tr.signal("s1").unwrap();
    let cfg = Config64::default();
    let two = Spike2Spec { m: 0.1, w: 20.0, derivative: Default::default() };
    assert!(check_spike_two_param(s1, &two, &tr, &cfg).unwrap().is_holds());
    let mut amp = SpikeSpec::new(Interval::new(0.0, 52.0));
    amp.psi = Psi::Max;
    amp.a = Some(Constraint::new(Cmp::Ge, 2.0));
    assert!(!detect_spike(s1, &amp, &tr, &cfg).unwrap().is_holds());
    let s2 = tr.signal("s2").unwrap();
    assert!(detect_spike(s2, &amp, &tr, &cfg).unwrap().is_holds());
}

#[test]
fn slope_witness_reports_rise_then_fall() {
    let tr = common::load("spike_slopes.csv");
    let two = Spike2Spec { m: 0.1, w: 20.0, derivative: Default::default() };
    let v = check_spike_two_param(tr.signal("s2").unwrap(), &two, &tr, &Config64::default()).unwrap();
    match v.witness {
        Witness::Slopes { rise, fall, rise_slope, fall_slope } => {
            assert!(rise.t < fall.t && fall.t - rise.t <= 20.0);
            assert!(rise_slope > 0.1 && fall_slope < -0.1);
        }
        other => panic!("unexpected witness {other:?}"),
    }
}
