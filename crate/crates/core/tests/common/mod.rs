//! Helpers shared by the integration tests: fixture loading, synthetic
//! traces, a random property generator and a prefix-notation STL reader.
#![allow(dead_code)]

use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::Rng;
use sigprop_core::stl::StlFormula;
use sigprop_core::{parse, Cmp, Config64, CsvOptions, Property64, Signal64, SignalSource, Trace64};

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

pub fn load(name: &str) -> Trace64 {
    Trace64::load(data_path(name), &CsvOptions::default()).expect("fixture trace loads")
}

pub fn props(name: &str) -> Vec<Property64> {
    let text = std::fs::read_to_string(data_path(name)).expect("fixture properties load");
    parse(&text).expect("fixture properties parse")
}

pub fn prop(text: &str) -> Property64 {
    let mut ps = parse(text).unwrap_or_else(|e| panic!("{text}: {e}"));
    assert_eq!(ps.len(), 1);
    ps.remove(0)
}

/// Default config with `s` bound to `signal`.
pub fn bound(signal: &str) -> Config64 {
    Config64 { bindings: vec![("s".into(), signal.into())], ..Config64::default() }
}

pub fn grid(n: usize, dt: f64) -> Vec<f64> {
    (0..n).map(|i| i as f64 * dt).collect()
}

/// `f` sampled every `dt` on `[0, end]`, as signal `s`.
pub fn sampled(f: impl Fn(f64) -> f64, dt: f64, end: f64) -> Trace64 {
    let n = (end / dt).round() as usize + 1;
    let times = grid(n, dt);
    let values = times.iter().map(|&t| f(t)).collect();
    Trace64::new(times, vec![("s".into(), values)]).unwrap()
}

pub fn signal(times: &[f64], values: &[f64]) -> Signal64 {
    Signal64::new("s", times.to_vec(), values.to_vec()).unwrap()
}

/// Random time grid with `n` samples: uniform or with mixed steps, all
/// multiples of 0.25 so shifted and mirrored times stay exact.
pub fn random_grid(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let uniform = rng.gen_bool(0.5);
    let dt = *[0.5, 1.0].choose(rng).unwrap();
    let mut t = 0.0;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(t);
        t += if uniform { dt } else { *[0.25, 0.5, 0.75, 1.0].choose(rng).unwrap() };
    }
    out
}

/// Quantized random walk in `[-3, 3]`; the coarse steps produce plateaus,
/// ties and spikes often enough to exercise every corner of the checkers.
pub fn random_walk(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let mut v: f64 = rng.gen_range(-6..=6) as f64 * 0.5;
    (0..n)
        .map(|_| {
            let step = *[-2.0, -1.0, -0.5, 0.0, 0.0, 0.5, 1.0, 2.0].choose(rng).unwrap();
            v = (v + step).clamp(-3.0, 3.0);
            v
        })
        .collect()
}

/// Trace over `x` and `y`, plus `dx`/`ddx` holding the finite differences
/// of `x` (zero-padded) so precomputed-derivative methods can be used.
pub fn random_trace(rng: &mut impl Rng, max_len: usize) -> Trace64 {
    let n = rng.gen_range(2..=max_len);
    let times = random_grid(rng, n);
    let x = random_walk(rng, n);
    let y = random_walk(rng, n);
    let diff = |v: &[f64]| -> Vec<f64> {
        let mut d: Vec<f64> = (0..n)
            .map(|i| if i + 1 < n { (v[i + 1] - v[i]) / (times[i + 1] - times[i]) } else { 0.0 })
            .collect();
        d[n - 1] = 0.0;
        d
    };
    let dx = diff(&x);
    let ddx = diff(&dx);
    Trace64::new(
        times,
        vec![("x".into(), x), ("y".into(), y), ("dx".into(), dx), ("ddx".into(), ddx)],
    )
    .unwrap()
}

pub const PROPERTY_KINDS: &[&str] = &[
    "assert", "assert_timed", "spike", "spike2", "oscillation", "functional", "response",
    "precedence", "rise", "overshoot",
];

fn pick<'a>(rng: &mut impl Rng, xs: &[&'a str]) -> &'a str {
    xs.choose(rng).unwrap()
}

fn half(rng: &mut impl Rng, lo: i32, hi: i32) -> f64 {
    rng.gen_range(lo..=hi) as f64 * 0.5
}

fn cmp(rng: &mut impl Rng) -> &'static str {
    pick(rng, &["<", "<=", "=", ">=", ">", "!="])
}

fn value_pred(rng: &mut impl Rng, sig: &str) -> String {
    format!("assert {sig} {} {}", cmp(rng), half(rng, -6, 6))
}

fn number(v: f64) -> String {
    format!("{v}")
}

fn spike_text(rng: &mut impl Rng, len: f64) -> String {
    let lo = (rng.gen_range(0.0..len / 2.0) * 4.0).round() / 4.0;
    let hi = lo + 0.25 + (rng.gen_range(0.0..len) * 4.0).round() / 4.0;
    let mut feats = vec![];
    for f in ["a", "sp1", "sp2", "w"] {
        if rng.gen_bool(0.4) {
            let bound = if f == "w" { half(rng, 0, 20) } else { half(rng, 0, 8) };
            feats.push(format!("{f} {} {}", pick(rng, &["<", "<=", ">=", ">"]), number(bound)));
        }
    }
    if feats.is_empty() {
        feats.push(format!("a >= {}", half(rng, 0, 4)));
    }
    let mut s = format!(
        "spike{} on x in [{lo}, {hi}] with {}",
        if rng.gen_bool(0.3) { " down" } else { "" },
        feats.join(", ")
    );
    s.push_str(pick(rng, &["", " psi max", " psi mean"]));
    s.push_str(pick(rng, &["", " method punctual", " method precomputed(dx, ddx)"]));
    s.push_str(pick(rng, &["", " anchor vp1", " anchor vp2"]));
    s
}

fn osc_text(rng: &mut impl Rng, len: f64) -> String {
    let lo = (rng.gen_range(0.0..len / 3.0) * 4.0).round() / 4.0;
    let hi = lo + 0.25 + (rng.gen_range(0.0..len) * 4.0).round() / 4.0;
    let mut feats = vec![];
    if rng.gen_bool(0.7) {
        feats.push(format!("period {} {}", pick(rng, &["<", "<=", ">="]), half(rng, 0, 30)));
    }
    if feats.is_empty() || rng.gen_bool(0.6) {
        feats.push(format!("amplitude {} {}", pick(rng, &["<", "<=", ">=", ">"]), half(rng, 0, 10)));
    }
    let mut s = format!("oscillation on x in [{lo}, {hi}] with {}", feats.join(", "));
    match rng.gen_range(0..4) {
        0 => s.push_str(&format!(" ref {}", half(rng, -2, 2))),
        1 => s.push_str(" avg-peak-to-peak"),
        _ => {}
    }
    if rng.gen_bool(0.3) {
        s.push_str(" average");
    }
    s.push_str(pick(rng, &["", "", " method punctual", " method precomputed(dx, ddx)"]));
    if rng.gen_bool(0.3) {
        s.push_str(&format!(" prominence {}", half(rng, 0, 3)));
    }
    s.push_str(pick(rng, &["", "", " damped", " driven", " damped trend", " driven trend"]));
    s.push_str(pick(rng, &["", "", " anchor min", " anchor max"]));
    s
}

fn kind(rng: &mut impl Rng) -> &'static str {
    pick(rng, &["event", "state"])
}

fn within(rng: &mut impl Rng) -> String {
    if rng.gen_bool(0.3) {
        String::new()
    } else {
        format!(" within {} {}", cmp(rng), half(rng, 0, 12))
    }
}

/// A sub-body usable as a cause or effect.
fn sub_body(rng: &mut impl Rng, len: f64, depth: u32) -> String {
    match rng.gen_range(0..if depth > 0 { 4 } else { 6 }) {
        0 | 1 => {
            let sig = pick(rng, &["x", "y"]);
            value_pred(rng, sig)
        }
        2 => format!("({})", spike_text(rng, len)),
        3 => format!("spike2 on x with m = {}, w = {}", half(rng, 1, 4), half(rng, 1, 10)),
        _ => {
            let response = rng.gen_bool(0.5);
            format!("({})", order_text(rng, len, depth + 1, response))
        }
    }
}

fn order_text(rng: &mut impl Rng, len: f64, depth: u32, response: bool) -> String {
    let (a, b) = (sub_body(rng, len, depth), sub_body(rng, len, depth));
    // Nested order relationships only have an event reading.
    let nested = |t: &str| t.starts_with("(whenever") || t.starts_with("(before");
    let ka = if nested(&a) { "event" } else { kind(rng) };
    let kb = if nested(&b) { "event" } else { kind(rng) };
    let w = within(rng);
    if response {
        format!("whenever {ka} {a} then {kb} {b}{w}")
    } else {
        format!("before {ka} {a} requires {kb} {b}{w}")
    }
}

/// A random property body of the given kind over the signals of
/// [`random_trace`].
pub fn random_body(rng: &mut impl Rng, kind_name: &str, len: f64) -> String {
    let len = len.max(1.0);
    match kind_name {
        "assert" => {
            let lhs = pick(rng, &["x", "y", "x - y", "abs(x)", "2 * x + y", "deriv(x)"]);
            format!("assert {lhs} {} {}", cmp(rng), half(rng, -6, 6))
        }
        "assert_timed" => {
            let a = (rng.gen_range(0.0..len) * 4.0).round() / 4.0;
            let b = a + (rng.gen_range(0.0..len / 2.0) * 4.0).round() / 4.0;
            let mut s = format!("assert {} {} {} in [{a}, {b}]", pick(rng, &["x", "y", "x + y"]), cmp(rng), half(rng, -6, 6));
            if rng.gen_bool(0.4) {
                let c = b + 0.25 + (rng.gen_range(0.0..len / 2.0) * 4.0).round() / 4.0;
                s.push_str(&format!(", [{c}, {}]", c + 1.0));
            }
            s
        }
        "spike" => spike_text(rng, len),
        "spike2" => {
            let d = if rng.gen_bool(0.3) { " derivative dx" } else { "" };
            format!("spike2 on x with m = {}, w = {}{d}", half(rng, 1, 6), half(rng, 1, 12))
        }
        "oscillation" => osc_text(rng, len),
        "functional" => {
            let e = pick(rng, &["x - y", "abs(x - y)", "x * y", "deriv(x, 2)", "-x"]);
            let inner = match rng.gen_range(0..3) {
                0 => format!("assert d {} {}", cmp(rng), half(rng, -6, 6)),
                1 => format!("spike on d in [0, {len}] with a >= {}", half(rng, 0, 4)),
                _ => format!("whenever event (assert d > {}) then state (assert y < 0){}", half(rng, -2, 2), within(rng)),
            };
            format!("let d = {e} then {inner}")
        }
        "response" => order_text(rng, len, 0, true),
        "precedence" => order_text(rng, len, 0, false),
        "rise" => {
            let (word, op) = if rng.gen_bool(0.5) { ("rise", pick(rng, &[">", ">="])) } else { ("fall", pick(rng, &["<", "<="])) };
            let mono = if rng.gen_bool(0.4) { " monotonic" } else { "" };
            format!(
                "{word} on x to {op} {} after {} within {}{mono}",
                half(rng, -4, 4),
                sub_body(rng, len, 1),
                half(rng, 1, 16)
            )
        }
        "overshoot" => {
            let (word, op, lim) = if rng.gen_bool(0.5) { ("overshoot", ">=", "max") } else { ("undershoot", "<=", "min") };
            let limit = if rng.gen_bool(0.5) {
                format!("{}", half(rng, -6, 6))
            } else {
                format!("target {} {}", pick(rng, &["+", "-"]), half(rng, 0, 4))
            };
            let mono = if rng.gen_bool(0.3) { " monotonic" } else { "" };
            format!(
                "{word} on x to {op} {} after {} {lim} {limit} over {}{mono}",
                half(rng, -4, 4),
                sub_body(rng, len, 1),
                half(rng, 1, 12)
            )
        }
        other => panic!("unknown property kind {other}"),
    }
}

pub fn random_property(rng: &mut impl Rng, kind_name: &str, len: f64) -> Property64 {
    prop(&format!("property p: {};", random_body(rng, kind_name, len)))
}

/// Reads a formula in the prefix notation used by `tests/data/stl_cases.txt`:
///
/// ```text
/// f := true | (OP SIGNAL NUM) | (not f) | (and f f) | (or f f)
///    | (U LO HI f f) | (S LO HI f f) | (F LO HI f) | (G LO HI f) | (P LO HI f) | (H LO HI f)
/// OP := < | <= | = | >= | > | !=
/// ```
pub fn read_stl(text: &str) -> StlFormula<f64> {
    let spaced = text.replace('(', " ( ").replace(')', " ) ");
    let toks: Vec<&str> = spaced.split_whitespace().collect();
    let mut pos = 0;
    let f = read_formula(&toks, &mut pos);
    assert_eq!(pos, toks.len(), "trailing input in {text}");
    f
}

fn next<'a>(toks: &[&'a str], pos: &mut usize) -> &'a str {
    let t = toks.get(*pos).unwrap_or_else(|| panic!("unexpected end of formula"));
    *pos += 1;
    t
}

fn num(toks: &[&str], pos: &mut usize) -> f64 {
    let t = next(toks, pos);
    t.parse().unwrap_or_else(|_| panic!("expected a number, got {t}"))
}

fn read_formula(toks: &[&str], pos: &mut usize) -> StlFormula<f64> {
    match next(toks, pos) {
        "true" => StlFormula::True,
        "(" => {
            let head = next(toks, pos);
            let f = match head {
                "not" => StlFormula::not(read_formula(toks, pos)),
                "and" | "or" => {
                    let a = read_formula(toks, pos);
                    let b = read_formula(toks, pos);
                    if head == "and" { StlFormula::and(a, b) } else { StlFormula::or(a, b) }
                }
                "U" | "S" => {
                    let (lo, hi) = (num(toks, pos), num(toks, pos));
                    let a = read_formula(toks, pos);
                    let b = read_formula(toks, pos);
                    if head == "U" { StlFormula::until(lo, hi, a, b) } else { StlFormula::since(lo, hi, a, b) }
                }
                "F" | "G" | "P" | "H" => {
                    let (lo, hi) = (num(toks, pos), num(toks, pos));
                    let a = read_formula(toks, pos);
                    match head {
                        "F" => StlFormula::eventually(lo, hi, a),
                        "G" => StlFormula::globally(lo, hi, a),
                        "P" => StlFormula::once(lo, hi, a),
                        _ => StlFormula::historically(lo, hi, a),
                    }
                }
                op => {
                    let op = match op {
                        "<" => Cmp::Lt,
                        "<=" => Cmp::Le,
                        "=" => Cmp::Eq,
                        ">=" => Cmp::Ge,
                        ">" => Cmp::Gt,
                        "!=" => Cmp::Ne,
                        other => panic!("unknown operator {other}"),
                    };
                    let s = next(toks, pos);
                    StlFormula::atom(s, op, num(toks, pos))
                }
            };
            assert_eq!(next(toks, pos), ")");
            f
        }
        other => panic!("unexpected token {other}"),
    }
}

/// Random formula over atoms on `x` and `y` with intervals on a 0.25 lattice.
pub fn random_formula(rng: &mut impl Rng, depth: u32) -> StlFormula<f64> {
    let iv = |rng: &mut dyn rand::RngCore| {
        let lo = rng.gen_range(0..8) as f64 * 0.25;
        (lo, lo + rng.gen_range(1..12) as f64 * 0.25)
    };
    if depth == 0 || rng.gen_bool(0.25) {
        return if rng.gen_bool(0.1) {
            StlFormula::True
        } else {
            let op = *[Cmp::Lt, Cmp::Le, Cmp::Ge, Cmp::Gt, Cmp::Eq].choose(rng).unwrap();
            let sig = pick(rng, &["x", "y"]);
            StlFormula::atom(sig, op, half(rng, -6, 6))
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..10) {
        0 => StlFormula::not(random_formula(rng, d)),
        1 => StlFormula::and(random_formula(rng, d), random_formula(rng, d)),
        2 => StlFormula::or(random_formula(rng, d), random_formula(rng, d)),
        3 | 4 => {
            let (lo, hi) = iv(rng);
            StlFormula::until(lo, hi, random_formula(rng, d), random_formula(rng, d))
        }
        5 | 6 => {
            let (lo, hi) = iv(rng);
            StlFormula::since(lo, hi, random_formula(rng, d), random_formula(rng, d))
        }
        7 => {
            let (lo, hi) = iv(rng);
            StlFormula::eventually(lo, hi, random_formula(rng, d))
        }
        8 => {
            let (lo, hi) = iv(rng);
            StlFormula::globally(lo, hi, random_formula(rng, d))
        }
        _ => {
            let (lo, hi) = iv(rng);
            StlFormula::historically(lo, hi, random_formula(rng, d))
        }
    }
}

/// Outcome of engine vs brute-force comparison for one property kind.
#[derive(Debug, Default)]
pub struct Differential {
    pub cases: usize,
    pub errors: usize,
    /// Engine verdicts by status: holds, violated, inconclusive.
    pub statuses: [usize; 3],
    pub disagreements: Vec<String>,
}

fn engine_verdict(p: &Property64, tr: &Trace64, cfg: &Config64) -> Result<sigprop_core::Verdict64, String> {
    sigprop_core::evaluate(std::slice::from_ref(p), tr, cfg)
        .map(|mut r| r.verdicts.remove(0).verdict)
        .map_err(|e| e.source.to_string())
}

/// Compares `evaluate` against `evaluate_naive` on `cases` seeded random
/// traces of at most `max_len` samples, cycling through the configs.
pub fn differential(kind_name: &str, cases: usize, max_len: usize, seed: u64) -> Differential {
    use rand::SeedableRng;
    let mut out = Differential::default();
    let configs = [
        Config64::default(),
        Config64::default().strict(),
        Config64 { interp: sigprop_core::InterpolationMode::Linear, ..Config64::default() },
        Config64 { prominence: 1.0, ..Config64::default() },
    ];
    for case in 0..cases {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ (case as u64).wrapping_mul(0x9E37_79B9));
        let tr = random_trace(&mut rng, max_len);
        let p = random_property(&mut rng, kind_name, tr.length());
        let cfg = &configs[case % configs.len()];
        out.cases += 1;
        let fast = engine_verdict(&p, &tr, cfg);
        let slow = sigprop_core::evaluate_naive(&p, &tr, cfg).map_err(|e| e.to_string());
        match &fast {
            Ok(v) => out.statuses[v.status as usize] += 1,
            Err(_) => out.errors += 1,
        }
        if fast != slow {
            out.disagreements.push(format!(
                "case {case}: {}\n  config {cfg:?}\n  times {:?}\n  x {:?}\n  y {:?}\n  engine {fast:?}\n  naive  {slow:?}",
                sigprop_core::pretty_print(std::slice::from_ref(&p)).trim(),
                tr.times(),
                tr.signal("x").unwrap().values(),
                tr.signal("y").unwrap().values(),
            ));
        }
    }
    out
}

/// Proptest strategies over quarter-unit lattices, so time shifts,
/// reversals and power-of-two scalings are exact.
pub mod arb {
    use proptest::prelude::*;

    pub fn times(n: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(1u32..=4, n).prop_map(|steps| {
            let mut t = 0.0;
            steps
                .into_iter()
                .map(|s| {
                    let now = t;
                    t += s as f64 * 0.25;
                    now
                })
                .collect()
        })
    }

    pub fn values(n: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-12i32..=12, n).prop_map(|v| v.into_iter().map(|x| x as f64 * 0.25).collect())
    }

    /// `(times, values)` with `lo..=hi` samples.
    pub fn series(lo: usize, hi: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (lo..=hi).prop_flat_map(|n| (times(n), values(n)))
    }

    /// `(times, x, y)` sharing one grid.
    pub fn pair(lo: usize, hi: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>)> {
        (lo..=hi).prop_flat_map(|n| (times(n), values(n), values(n)))
    }

    pub fn bits(n: usize) -> impl Strategy<Value = Vec<bool>> {
        prop::collection::vec(any::<bool>(), n)
    }
}
