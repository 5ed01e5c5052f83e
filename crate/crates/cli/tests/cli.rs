use std::process::{Command, Output};

fn pentarec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pentarec"))
        .args(args)
        .env_remove("PENTAREC_FLOAT_BITS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn field<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
}

#[test]
fn classify_blowup_example() {
    let out = pentarec(&[
        "classify", "--a", "0.5", "--b", "1", "--c", "0.5", "--d", "1",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(field(&text, "regime"), "Blowup");
    let l: f64 = field(&text, "L").parse().unwrap();
    assert!((l - 1.118034).abs() < 1e-5);
}

#[test]
fn classify_critical_example() {
    let out = pentarec(&["classify", "--a", "0.5", "--b", "1", "--c", "1", "--d", "1"]);
    let text = stdout(&out);
    assert_eq!(field(&text, "regime"), "CriticalConvergent");
    assert_eq!(field(&text, "A"), "0");
    assert_eq!(field(&text, "B"), "-3");
    assert_eq!(field(&text, "equilibria"), "every w > 0");
}

#[test]
fn classify_rejects_negative_parameter() {
    let out = pentarec(&[
        "classify", "--a", "0.5", "--b", "-1", "--c", "1", "--d", "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--b"));
    assert!(stdout(&out).is_empty());
}

#[test]
fn classify_csv_and_tolerance() {
    let args = [
        "classify",
        "--a",
        "0.5000001",
        "--b",
        "1",
        "--c",
        "1",
        "--d",
        "1",
        "--csv",
    ];
    let text = stdout(&pentarec(&args));
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "a,b,c,d,A,B,rho_plus,rho_minus,L,p,regime");
    assert!(rows[1].ends_with(",Blowup"));

    let mut wide = args.to_vec();
    wide.extend(["--crit-tol", "1e-6"]);
    assert!(stdout(&pentarec(&wide))
        .lines()
        .nth(1)
        .unwrap()
        .ends_with(",CriticalConvergent"));
}

#[test]
fn simulate_constant_solution() {
    let out = pentarec(&[
        "simulate",
        "--a",
        "0.5",
        "--b",
        "1",
        "--c",
        "1",
        "--d",
        "1",
        "--seeds",
        "3,3,3,3,3",
        "--steps",
        "50",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,x"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 55);
    assert_eq!(rows[0], "-4,3");
    assert!(rows.iter().all(|r| r.split(',').nth(1) == Some("3")));
}

#[test]
fn simulate_overflow_aborts_with_marker() {
    let out = pentarec(&[
        "simulate", "--a", "2", "--b", "1", "--c", "1", "--d", "1", "--steps", "5000",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let text = stdout(&out);
    let last = text.lines().last().unwrap();
    assert!(last.starts_with("# aborted: overflow at n="), "{last}");
    let index: i64 = last.rsplit('=').next().unwrap().parse().unwrap();
    let rows = text.lines().filter(|l| !l.starts_with('#')).count() - 1;
    // rows cover n = -4 .. index - 1
    assert_eq!(rows as i64, index + 4);
    assert!(stderr(&out).contains("overflow"));
}

#[test]
fn simulate_exact_fractions() {
    let out = pentarec(&["simulate", "--app-mu", "1/2", "--steps", "20", "--exact"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 25);
    assert_eq!(rows[3], "-1,1/2");
    assert_eq!(rows[6], "2,7/12");
    assert_eq!(rows[9], "5,175/312");
    assert!(rows.iter().all(|r| !r.contains('.')));
}

#[test]
fn simulate_exact_growth_is_an_abort() {
    let out = pentarec(&[
        "simulate",
        "--app-mu",
        "2",
        "--steps",
        "200",
        "--exact",
        "--bit-budget",
        "64",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out)
        .lines()
        .last()
        .unwrap()
        .starts_with("# aborted: exact growth"));
}

#[test]
fn simulate_ratio_columns() {
    let out = pentarec(&["simulate", "--app-mu", "0.5", "--steps", "4", "--ratios"]);
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "n,x,y,w_residue");
    assert_eq!(rows[1], "-4,1,,");
    assert_eq!(rows[2], "-3,1,,");
    assert_eq!(rows[3], "-2,1,1,2");
    assert_eq!(rows[4], "-1,0.5,0.5,1.5");
}

#[test]
fn simulate_is_byte_identical_and_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("orbit.csv");
    let args = [
        "simulate",
        "--a",
        "0.3",
        "--b",
        "0.7",
        "--c",
        "1.1",
        "--d",
        "0.4",
        "--seeds",
        "1,2,0.5,3,1",
        "--steps",
        "300",
    ];
    let first = stdout(&pentarec(&args));
    assert_eq!(first, stdout(&pentarec(&args)));
    let mut to_file = args.to_vec();
    to_file.extend(["--out", path.to_str().unwrap()]);
    let out = pentarec(&to_file);
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), first);
}

#[test]
fn precision_from_environment() {
    let base = ["simulate", "--app-mu", "0.5", "--steps", "3"];
    let wide = Command::new(env!("CARGO_BIN_EXE_pentarec"))
        .args(base)
        .env("PENTAREC_FLOAT_BITS", "120")
        .output()
        .unwrap();
    let wide = stdout(&wide);
    assert!(wide.lines().nth(7).unwrap().len() > 30);
    let mut narrow = base.to_vec();
    narrow.extend(["--precision", "53"]);
    let narrow = Command::new(env!("CARGO_BIN_EXE_pentarec"))
        .args(narrow)
        .env("PENTAREC_FLOAT_BITS", "120")
        .output()
        .unwrap();
    let row = stdout(&narrow).lines().nth(7).unwrap().to_string();
    assert!(
        row.starts_with("2,0.58333333333333") && row.len() <= 20,
        "{row}"
    );

    let bad = pentarec(&["simulate", "--app-mu", "0.5", "--precision", "2"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn critical_limit_reports() {
    let text = stdout(&pentarec(&["critical-limit", "--mu", "1"]));
    assert_eq!(field(&text, "limit"), "1.00000");
    assert_eq!(field(&text, "terms"), "1");

    let text = stdout(&pentarec(&[
        "critical-limit",
        "--mu",
        "2",
        "--tol",
        "1e-10",
    ]));
    let width: f64 = field(&text, "log_width").parse().unwrap();
    assert!(width < 2e-10);

    let text = stdout(&pentarec(&["critical-limit", "--mu", "0.5"]));
    let limit: f64 = field(&text, "limit").parse().unwrap();
    assert!((limit - 0.56529).abs() < 1e-5);

    assert_eq!(
        pentarec(&["critical-limit", "--mu", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(
        pentarec(&["critical-limit", "--mu", "1", "--tol", "-1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn critical_limit_explore() {
    let out = pentarec(&["critical-limit", "--mu", "0.5", "--explore", "0.3,1,2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(field(&text, "settled"), "yes");
    assert!(field(&text, "a").starts_with("0.3 b=2.1"));
    assert_eq!(
        pentarec(&["critical-limit", "--mu", "0.5", "--explore", "1,1,1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn scan_flips_regime_along_a() {
    let out = pentarec(&[
        "scan",
        "--a",
        "0.1:0.9:5",
        "--b",
        "1",
        "--c",
        "1",
        "--d",
        "1",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "a,b,c,d,A,B,L,p,regime");
    let regimes: Vec<&str> = rows[1..]
        .iter()
        .map(|r| r.rsplit(',').next().unwrap())
        .collect();
    assert_eq!(
        regimes,
        [
            "Extinction",
            "Extinction",
            "CriticalConvergent",
            "Blowup",
            "Blowup"
        ]
    );
}

#[test]
fn scan_single_cell_and_order() {
    let text = stdout(&pentarec(&[
        "scan", "--a", "0.5", "--b", "1", "--c", "0.5", "--d", "1",
    ]));
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().nth(1).unwrap().ends_with(",Blowup"));

    let text = stdout(&pentarec(&[
        "scan", "--a", "1:2:2", "--b", "1", "--c", "3:4:2", "--d", "1",
    ]));
    let keys: Vec<String> = text
        .lines()
        .skip(1)
        .map(|r| r.split(',').take(4).collect::<Vec<_>>().join(","))
        .collect();
    assert_eq!(keys, ["1,1,3,1", "1,1,4,1", "2,1,3,1", "2,1,4,1"]);
}

#[test]
fn scan_row_count_and_determinism() {
    let args = [
        "scan",
        "--a",
        "0.1:1.5:7",
        "--b",
        "0.2:1:6",
        "--c",
        "0.5:2:5",
        "--d",
        "1:3:4",
    ];
    let first = stdout(&pentarec(&args));
    assert_eq!(first.lines().count(), 1 + 7 * 6 * 5 * 4);
    assert_eq!(first, stdout(&pentarec(&args)));
}

#[test]
fn scan_errors() {
    let over = pentarec(&[
        "scan",
        "--a",
        "0.1:1:100",
        "--b",
        "0.1:1:100",
        "--c",
        "1",
        "--d",
        "1",
        "--max-cells",
        "9999",
    ]);
    assert_eq!(over.status.code(), Some(4));
    assert!(over.stdout.is_empty());
    for bad in ["1:0.5:3", "0.1:0.9:1", "x"] {
        let out = pentarec(&["scan", "--a", bad, "--b", "1", "--c", "1", "--d", "1"]);
        assert_eq!(out.status.code(), Some(2), "{bad}");
    }
}

#[test]
fn verify_filter_and_determinism() {
    let out = pentarec(&["verify", "--only", "oracle,spectrum", "--seed", "42"]);
    assert!(out.status.success());
    let verdicts = |o: &Output| -> Vec<String> {
        stdout(o)
            .lines()
            .map(|l| l.split(" (").next().unwrap().to_string())
            .collect()
    };
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 3);
    assert!(text.contains("spectrum") && text.contains("oracle"));
    let again = pentarec(&["verify", "--only", "oracle,spectrum", "--seed", "42"]);
    assert_eq!(verdicts(&out), verdicts(&again));

    assert_eq!(
        pentarec(&["verify", "--only", "nope"]).status.code(),
        Some(2)
    );
}

#[test]
fn verify_only_table_runs_one_check() {
    let out = pentarec(&["verify", "--only", "paper-table"]);
    let text = stdout(&out);
    assert_eq!(text.lines().filter(|l| l.starts_with('[')).count(), 1);
    // the reference table is off in its last digit on several rows
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("paper-table"));
}
