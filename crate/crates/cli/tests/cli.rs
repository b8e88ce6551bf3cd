use std::path::PathBuf;
use std::process::Command;

use sigprop_cli::run;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/data")
        .join(name)
        .display()
        .to_string()
}

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

fn sigprop(args: &[&str]) -> Out {
    let mut argv = vec!["sigprop".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(argv, &mut out, &mut err);
    Out { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

fn check(trace: &str, props: &str, extra: &[&str]) -> Out {
    let (t, p) = (data(trace), data(props));
    let mut args = vec!["check", "--trace", &t, "--props", &p];
    args.extend_from_slice(extra);
    sigprop(&args)
}

fn write_temp(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn holding_properties_exit_zero_with_a_json_report() {
    let o = check("da_two_signals.csv", "da.sbp", &["--bind", "s=s1", "--format", "json"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let json: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(json["schema"], 1);
    assert_eq!(json["verdicts"][0]["property"], "pDA");
    assert_eq!(json["verdicts"][0]["status"], "holds");
    assert!(o.stderr.is_empty());
}

#[test]
fn bindings_select_the_signal() {
    let o = check("da_two_signals.csv", "da.sbp", &["--bind", "s=s2"]);
    assert_eq!(o.code, 1);
    assert!(o.stdout.contains("pDA"));
    assert!(o.stdout.contains("violated"));
    assert!(o.stdout.ends_with("overall: violated\n"));
}

#[test]
fn text_lines_have_no_trailing_whitespace() {
    let o = check("rise_time.csv", "taxonomy.sbp", &["--bind", "s=s1"]);
    for line in o.stdout.lines() {
        assert_eq!(line, line.trim_end());
    }
}

#[test]
fn pending_deadline_is_inconclusive_unless_strict() {
    let dir = tempfile::tempdir().unwrap();
    let trace = write_temp(&dir, "t.csv", "time,a,b\n0,0,0\n1,0,0\n2,1,0\n3,1,0\n");
    let props = write_temp(&dir, "p.sbp", "property r: whenever event (assert a > 0.5) then event (assert b > 0.5) within <= 5;\n");
    let o = sigprop(&["check", "--trace", &trace, "--props", &props]);
    assert_eq!(o.code, 2, "{}", o.stderr);
    let o = sigprop(&["check", "--trace", &trace, "--props", &props, "--end-policy", "strict"]);
    assert_eq!(o.code, 1);
}

#[test]
fn property_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let trace = data("da_two_signals.csv");
    let bad_syntax = write_temp(&dir, "a.sbp", "property p: assert s1 < ;\n");
    let o = sigprop(&["check", "--trace", &trace, "--props", &bad_syntax]);
    assert_eq!(o.code, 3);
    assert!(o.stderr.contains("a.sbp:1:25"), "{}", o.stderr);

    let unknown = write_temp(&dir, "b.sbp", "property p: assert nope < 1;\n");
    let o = sigprop(&["check", "--trace", &trace, "--props", &unknown]);
    assert_eq!(o.code, 3);
    assert!(o.stderr.contains("property `p`"), "{}", o.stderr);
    assert!(o.stdout.is_empty());

    let missing = dir.path().join("none.sbp").display().to_string();
    assert_eq!(sigprop(&["check", "--trace", &trace, "--props", &missing]).code, 3);
    assert_eq!(sigprop(&["check", "--trace", &trace]).code, 3);
}

#[test]
fn trace_errors_exit_four() {
    let dir = tempfile::tempdir().unwrap();
    let props = data("da.sbp");
    let missing = dir.path().join("none.csv").display().to_string();
    let o = sigprop(&["check", "--trace", &missing, "--props", &props]);
    assert_eq!(o.code, 4);
    assert!(o.stderr.starts_with("error: "));

    let unsorted = write_temp(&dir, "u.csv", "time,s\n0,1\n2,1\n1,1\n");
    assert_eq!(sigprop(&["check", "--trace", &unsorted, "--props", &props]).code, 4);
    let short = write_temp(&dir, "s.csv", "time,s\n0,1\n");
    assert_eq!(sigprop(&["check", "--trace", &short, "--props", &props]).code, 4);
}

#[test]
fn report_file_matches_stdout_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let report = path.display().to_string();
    let o = check("response_spike.csv", "response_spike.sbp", &["--format", "json", "--report", &report]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), o.stdout);
    let json: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    let pair = &json["verdicts"][0]["witness"]["pairs"][0];
    assert_eq!(pair["distance"], 7.0);
}

#[test]
fn binary_output_is_identical_across_thread_counts() {
    let bin = env!("CARGO_BIN_EXE_sigprop");
    let run_with = |threads: &str| {
        let out = Command::new(bin)
            .args(["check", "--format", "json", "--trace"])
            .arg(data("rise_time.csv"))
            .arg("--props")
            .arg(data("taxonomy.sbp"))
            .args(["--bind", "s=s1"])
            .env("SIGPROP_THREADS", threads)
            .output()
            .unwrap();
        (out.status.code(), out.stdout)
    };
    let one = run_with("1");
    assert!(!one.1.is_empty());
    assert_eq!(one, run_with("8"));
    assert_eq!(one, run_with("8"));
}

#[test]
fn version_and_help_exit_zero() {
    assert_eq!(sigprop(&["--version"]).code, 0);
    let o = sigprop(&["check", "--help"]);
    assert_eq!(o.code, 0);
    assert!(o.stdout.contains("--bind"));
}
