mod common;

use common::arb;
use proptest::prelude::*;
use sigprop_core::{CsvOptions, InterpolationMode, Signal32, Signal64, SignalSource, Trace32, Trace64};

proptest! {
    #[test]
    fn csv_round_trip_is_bit_exact(
        (times, x, y) in arb::pair(2, 40),
        noise in prop::collection::vec(-1e6f64..1e6, 40),
    ) {
        // Arbitrary doubles, not just lattice values.
        let x: Vec<f64> = x.iter().zip(&noise).map(|(a, b)| a + b / 7.0).collect();
        let times: Vec<f64> = times.iter().map(|t| t / 3.0).collect();
        let tr = Trace64::new(times, vec![("x".into(), x), ("y".into(), y)]).unwrap();
        let mut buf = Vec::new();
        tr.write_csv(&mut buf, &CsvOptions::default()).unwrap();
        let back = Trace64::read_csv(buf.as_slice(), &CsvOptions::default()).unwrap();
        prop_assert_eq!(back.times().iter().map(|t| t.to_bits()).collect::<Vec<_>>(),
            tr.times().iter().map(|t| t.to_bits()).collect::<Vec<_>>());
        for name in ["x", "y"] {
            let a: Vec<u64> = tr.signal(name).unwrap().values().iter().map(|v| v.to_bits()).collect();
            let b: Vec<u64> = back.signal(name).unwrap().values().iter().map(|v| v.to_bits()).collect();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn linear_interpolation_is_lipschitz((times, values) in arb::series(2, 30), u in 0.0f64..1.0, h in 0.0f64..0.5) {
        let s = Signal64::new("s", times.clone(), values.clone()).unwrap();
        let slope = (1..times.len())
            .map(|i| ((values[i] - values[i - 1]) / (times[i] - times[i - 1])).abs())
            .fold(0.0, f64::max);
        let end = s.length();
        let t = u * end;
        let t2 = (t + h).min(end);
        let a = s.value_at(t, InterpolationMode::Linear).unwrap();
        let b = s.value_at(t2, InterpolationMode::Linear).unwrap();
        prop_assert!((a - b).abs() <= slope * (t2 - t) + 1e-9, "{a} {b} at {t} {t2}");
    }

    #[test]
    fn grid_values_are_exact_in_both_modes((times, values) in arb::series(1, 30)) {
        let s = Signal64::new("s", times.clone(), values.clone()).unwrap();
        for (t, v) in times.iter().zip(&values) {
            prop_assert_eq!(s.value_at(*t, InterpolationMode::Grid).unwrap(), *v);
            prop_assert_eq!(s.value_at(*t, InterpolationMode::Linear).unwrap(), *v);
        }
    }

    #[test]
    fn difference_of_a_ramp_is_its_slope(times in (2usize..40).prop_flat_map(arb::times), c in -40i32..40) {
        let c = c as f64 / 8.0;
        let values: Vec<f64> = times.iter().map(|t| c * t).collect();
        let d = Signal64::new("s", times, values).unwrap().finite_difference(1).unwrap();
        prop_assert!(d.values().iter().all(|&v| v == c), "{:?}", d.values());
    }

    #[test]
    fn shifting_moves_every_sample((times, values) in arb::series(2, 30), dt in 0u32..40) {
        let dt = dt as f64 * 0.25;
        let tr = Trace64::new(times.clone(), vec![("s".into(), values.clone())]).unwrap();
        let moved = tr.shifted(dt);
        let s = moved.signal("s").unwrap();
        for (i, t) in times.iter().enumerate() {
            prop_assert_eq!(s.time(i), t + dt);
            prop_assert_eq!(s.value_at(t + dt, InterpolationMode::Grid).unwrap(), values[i]);
        }
    }

    #[test]
    fn single_precision_traces_load((times, values) in arb::series(2, 20)) {
        let csv: String = std::iter::once("time,s\n".to_string())
            .chain(times.iter().zip(&values).map(|(t, v)| format!("{t},{v}\n")))
            .collect();
        let tr = Trace32::read_csv(csv.as_bytes(), &CsvOptions::default()).unwrap();
        let expect: Vec<f32> = values.iter().map(|&v| v as f32).collect();
        prop_assert_eq!(tr.signal("s").unwrap().values(), expect.as_slice());
        let s = Signal32::new("s", times.iter().map(|&t| t as f32).collect(), expect).unwrap();
        prop_assert_eq!(s.len(), times.len());
    }
}

#[test]
fn outside_the_domain_is_an_error() {
    let s = Signal64::new("s", vec![0.0, 1.0, 2.0], vec![1.0, 2.0, 3.0]).unwrap();
    assert!(s.value_at(2.5, InterpolationMode::Linear).is_err());
    assert!(s.value_at(-0.5, InterpolationMode::Linear).is_err());
    assert!(s.value_at(0.5, InterpolationMode::Grid).is_err());
    assert_eq!(s.value_at(0.5, InterpolationMode::Linear).unwrap(), 1.5);
}

#[test]
fn fixtures_have_the_expected_shape() {
    let tr = common::load("rise_time.csv");
    assert_eq!(tr.len(), 30);
    assert_eq!(tr.length(), 14.5);
    assert_eq!(tr.signal_names(), &["s_tr", "s1", "s2"]);
}
