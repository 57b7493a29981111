//! End-to-end tests of the command-line binary: pinned output shapes,
//! exit codes, and the reproducibility contract of the pipeline reports.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

/// Run the compiled binary with the given arguments.
fn ivmb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ivmb"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is UTF-8")
}

/// A per-test scratch directory under the system temp dir.
fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ivmb-cli-{name}-{}", std::process::id()));
    fs::create_dir_all(&dir).expect("scratch dir");
    dir
}

fn write_config(dir: &PathBuf, body: &str) -> PathBuf {
    let path = dir.join("run.cfg");
    fs::write(&path, body).expect("config written");
    path
}

fn read_json(path: &PathBuf) -> Value {
    let text = fs::read_to_string(path).expect("report.json exists");
    serde_json::from_str(&text).expect("report.json parses")
}

#[test]
fn simulate_prints_the_expected_csv_table() {
    let out = ivmb(&[
        "simulate", "irc", "--w1", "0.75", "--w2", "0.75", "-n", "1000", "--seed", "1",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    let text = stdout_of(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x1,x2,x3,y");
    assert_eq!(lines.len(), 1001, "header plus one line per row");
    for line in &lines[1..] {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 4);
        for f in fields {
            f.parse::<f64>().expect("numeric cell");
        }
    }
}

#[test]
fn simulate_json_and_csv_agree_on_the_data() {
    let csv = stdout_of(&ivmb(&["simulate", "iv_basic", "-n", "5", "--seed", "3"]));
    let json = stdout_of(&ivmb(&[
        "simulate", "iv_basic", "-n", "5", "--seed", "3", "--format", "json",
    ]));
    let v: Value = serde_json::from_str(&json).expect("json output parses");
    let columns: Vec<&str> = v["columns"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_str().unwrap())
        .collect();
    assert_eq!(columns.join(","), csv.lines().next().unwrap());
    let first_csv: Vec<f64> = csv
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .map(|f| f.parse().unwrap())
        .collect();
    let first_json: Vec<f64> = v["rows"][0]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert_eq!(first_csv, first_json);
}

#[test]
fn dsep_answers_follow_the_conditioning_set() {
    let dir = scratch("dsep");
    let graph = dir.join("chain.txt");
    fs::write(&graph, "node z\nnode x\nnode y\nz -> x\nx -> y\n").unwrap();
    let g = graph.to_str().unwrap();

    let blocked = ivmb(&["graph", "dsep", "--graph", g, "--a", "z", "--b", "y", "--given", "x"]);
    assert!(blocked.status.success());
    assert_eq!(stdout_of(&blocked), "true\n");

    let open = ivmb(&["graph", "dsep", "--graph", g, "--a", "z", "--b", "y"]);
    assert!(open.status.success());
    assert_eq!(stdout_of(&open), "false\n");
}

#[test]
fn usage_and_data_errors_use_distinct_exit_codes() {
    let help = ivmb(&["--help"]);
    assert_eq!(help.status.code(), Some(0));

    let usage = ivmb(&["not-a-subcommand"]);
    assert_eq!(usage.status.code(), Some(1));
    assert!(!stderr_of(&usage).is_empty());

    let dir = scratch("exitcodes");
    let cfg = write_config(
        &dir,
        &format!(
            "scenario = iv_basic\nrows = 100\nseed = 1\nresponse = absent\nout_dir = {}\n",
            dir.display()
        ),
    );
    let data = ivmb(&["pipeline", "--config", cfg.to_str().unwrap()]);
    assert_eq!(data.status.code(), Some(2));
    assert!(
        stderr_of(&data).contains("response column"),
        "stderr: {}",
        stderr_of(&data)
    );
}

#[test]
fn pipeline_reports_are_byte_identical_across_runs() {
    let dir = scratch("identical");
    for run in ["a", "b"] {
        let out_dir = dir.join(run);
        let cfg = dir.join(format!("{run}.cfg"));
        fs::write(
            &cfg,
            format!(
                "scenario = irc\nrows = 600\nseed = 5\nresponse = y\nout_dir = {}\n",
                out_dir.display()
            ),
        )
        .unwrap();
        let out = ivmb(&["pipeline", "--config", cfg.to_str().unwrap()]);
        assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    }
    let a = fs::read(dir.join("a/report.json")).unwrap();
    let b = fs::read(dir.join("b/report.json")).unwrap();
    assert_eq!(a, b, "same configuration and seed must reproduce bytes");
}

#[test]
fn thread_count_does_not_change_the_report() {
    let dir = scratch("threads");
    let mut reports = Vec::new();
    for threads in ["1", "4"] {
        let out_dir = dir.join(threads);
        let cfg = dir.join(format!("t{threads}.cfg"));
        fs::write(
            &cfg,
            format!(
                "scenario = mb_reduced\nrows = 800\nseed = 2\nresponse = y\nout_dir = {}\n",
                out_dir.display()
            ),
        )
        .unwrap();
        let out = ivmb(&[
            "--threads",
            threads,
            "pipeline",
            "--config",
            cfg.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "stderr: {}", stderr_of(&out));
        reports.push(fs::read(out_dir.join("report.json")).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
}

/// Pull every standalone decimal number out of a text report, with the
/// count of digits it was printed to. Tokens embedded in identifiers
/// (`x1`) and dotted versions (`0.1.0`) are not numbers.
fn number_tokens(text: &str) -> Vec<(f64, usize)> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let starts_number = c.is_ascii_digit()
            || (c == '-' && i + 1 < bytes.len() && bytes[i + 1].is_ascii_digit());
        let attached = i > 0 && {
            let p = bytes[i - 1] as char;
            p.is_ascii_alphanumeric() || p == '_' || p == '.'
        };
        if !starts_number || attached {
            i += 1;
            continue;
        }
        let start = i;
        if c == '-' {
            i += 1;
        }
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        let mut decimals = 0usize;
        if i + 1 < bytes.len() && bytes[i] == b'.' && bytes[i + 1].is_ascii_digit() {
            i += 1;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
                decimals += 1;
            }
        }
        // Scientific suffix, as in 1.02e-114.
        if i < bytes.len()
            && (bytes[i] == b'e' || bytes[i] == b'E')
            && i + 1 < bytes.len()
            && (bytes[i + 1].is_ascii_digit()
                || ((bytes[i + 1] == b'+' || bytes[i + 1] == b'-')
                    && i + 2 < bytes.len()
                    && bytes[i + 2].is_ascii_digit()))
        {
            i += 1;
            if bytes[i] == b'+' || bytes[i] == b'-' {
                i += 1;
            }
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
        }
        // A dotted run like 0.1.0 is a version string, not a number.
        if i + 1 < bytes.len() && bytes[i] == b'.' && bytes[i + 1].is_ascii_digit() {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            continue;
        }
        if let Ok(v) = text[start..i].parse::<f64>() {
            out.push((v, decimals));
        }
    }
    out
}

/// Collect every number reachable in a JSON document: numeric values
/// plus numbers printed inside string values (graph texts, warnings).
fn json_numbers(value: &Value, into: &mut Vec<f64>) {
    match value {
        Value::Number(n) => {
            if let Some(v) = n.as_f64() {
                into.push(v);
            }
        }
        Value::String(s) => into.extend(number_tokens(s).into_iter().map(|(v, _)| v)),
        Value::Array(items) => items.iter().for_each(|v| json_numbers(v, into)),
        Value::Object(map) => map.values().for_each(|v| json_numbers(v, into)),
        _ => {}
    }
}

#[test]
fn text_report_is_a_numeric_projection_of_the_json() {
    let dir = scratch("projection");
    let out_dir = dir.join("out");
    let cfg = write_config(
        &dir,
        &format!(
            "scenario = iv_basic\nrows = 1500\nseed = 9\nresponse = y\nout_dir = {}\n",
            out_dir.display()
        ),
    );
    let out = ivmb(&["pipeline", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));

    let text = fs::read_to_string(out_dir.join("report.txt")).unwrap();
    let mut pool = Vec::new();
    json_numbers(&read_json(&out_dir.join("report.json")), &mut pool);

    for (value, decimals) in number_tokens(&text) {
        // The text may print fewer digits than the stored value carries;
        // accept any JSON number that rounds to what was printed.
        let slack = if value == 0.0 {
            0.5 * 10f64.powi(-(decimals as i32))
        } else {
            0.5 * 10f64.powi(-(decimals as i32)) + value.abs() * 1e-9
        };
        assert!(
            pool.iter().any(|j| (j - value).abs() <= slack),
            "text value {value} (printed to {decimals} decimals) has no \
             counterpart in report.json"
        );
    }
}

#[test]
fn reference_blanket_and_orientation_are_recovered() {
    let dir = scratch("reference");
    let out_dir = dir.join("out");
    let cfg = write_config(
        &dir,
        &format!(
            "scenario = mb_reduced\nrows = 5000\nseed = 7\nresponse = y\nout_dir = {}\n",
            out_dir.display()
        ),
    );
    let out = ivmb(&["pipeline", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));

    let report = read_json(&out_dir.join("report.json"));
    let blanket: Vec<&str> = report["final_blanket"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(blanket, ["x1", "x2", "x3", "x4"]);

    let graph = report["oriented_graph"]["text"].as_str().unwrap();
    for edge in ["x1 -> y", "x2 -> y", "y -> x4", "x3 -> x4"] {
        assert!(graph.contains(edge), "missing {edge} in:\n{graph}");
    }
    assert_eq!(graph.matches(" -> ").count(), 4, "exactly four directed edges");
}

#[test]
fn endogeneity_is_flagged_and_the_bad_instrument_witnessed() {
    let dir = scratch("endogeneity");

    let valid_dir = dir.join("valid");
    let cfg = dir.join("valid.cfg");
    fs::write(
        &cfg,
        format!(
            "scenario = iv_basic\nrows = 5000\nseed = 7\nresponse = y\nout_dir = {}\n",
            valid_dir.display()
        ),
    )
    .unwrap();
    let out = ivmb(&["pipeline", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    let report = read_json(&valid_dir.join("report.json"));
    let analysis = &report["iv_analyses"][0];
    assert_eq!(analysis["candidates"][0]["candidate"], "z");
    assert_eq!(analysis["candidates"][0]["verdict"], "valid");
    let durbin = analysis["reports"][0]["tests"]
        .as_array()
        .unwrap()
        .iter()
        .find(|t| t["name"] == "durbin")
        .expect("durbin test present");
    assert!(durbin["p_value"].as_f64().unwrap() < 0.05);

    let invalid_dir = dir.join("invalid");
    let cfg = dir.join("invalid.cfg");
    fs::write(
        &cfg,
        format!(
            "scenario = iv_invalid\nrows = 5000\nseed = 7\nresponse = y\nout_dir = {}\n",
            invalid_dir.display()
        ),
    )
    .unwrap();
    let out = ivmb(&["pipeline", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    let report = read_json(&invalid_dir.join("report.json"));
    let candidate = &report["iv_analyses"][0]["candidates"][0];
    assert_eq!(candidate["candidate"], "z");
    assert_eq!(candidate["verdict"], "invalid");

    let text = fs::read_to_string(invalid_dir.join("report.txt")).unwrap();
    assert!(
        text.contains("z -> u -> y"),
        "violating trail must be printed:\n{text}"
    );
}
