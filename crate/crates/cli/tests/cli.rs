use std::process::{Command, Output};

fn bvis(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bvis"))
        .args(args)
        .output()
        .expect("run bvis")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Value of `column` in the first data row whose first field is `key`.
fn field(csv: &str, key: &str, column: &str) -> String {
    let mut reader = csv::Reader::from_reader(csv.as_bytes());
    let headers = reader.headers().unwrap().clone();
    let idx = headers.iter().position(|h| h == column).expect("column");
    for rec in reader.records() {
        let rec = rec.unwrap();
        if &rec[0] == key {
            return rec[idx].to_string();
        }
    }
    panic!("no row {key:?} in\n{csv}");
}

#[test]
fn density_examples() {
    let out = bvis(&["density", "watchpoints", "--b", "1,2", "--J", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v: f64 = field(&stdout(&out), "(1,2)", "value").parse().unwrap();
    assert!((v - 0.534567).abs() < 5e-7);

    let out = bvis(&["density", "walkers", "--b", "3,5", "--r", "50"]);
    let v: f64 = field(&stdout(&out), "(3,5)", "value").parse().unwrap();
    assert!((v - 0.894220).abs() < 1e-6);

    let one_walker = bvis(&["density", "walkers", "--b", "2,3", "--r", "1"]);
    let one_point = bvis(&["density", "watchpoints", "--b", "2,3", "--J", "1"]);
    assert_eq!(
        field(&stdout(&one_walker), "(2,3)", "value"),
        field(&stdout(&one_point), "(2,3)", "value")
    );
}

#[test]
fn exact_examples() {
    let out = bvis(&[
        "exact", "watchpoints", "--b", "1,2", "--watchpoints", "0,0", "--alpha", "0.5", "--steps", "4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(field(&stdout(&out), "(1,2)", "expectation"), "0.781250000");

    let out = bvis(&["exact", "walkers", "--b", "2,3", "--alphas", "0.4", "--steps", "1"]);
    assert_eq!(field(&stdout(&out), "(2,3)", "expectation"), "1.00000000");
}

#[test]
fn argument_errors_exit_2() {
    for args in [
        &["density", "walkers", "--b", "2,4", "--r", "3"][..],
        &["density", "walkers", "--b", "0,1", "--r", "3"],
        &["density", "watchpoints", "--b", "1,1", "--J", "5"],
        &["simulate", "walkers", "--b", "2,3", "--alphas", "1.5", "--steps", "10"],
        &["table2", "--rows", "0"],
        &["no-such-command"],
    ] {
        let out = bvis(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn invalid_watchpoint_set_exits_3_naming_the_pair() {
    let out = bvis(&[
        "simulate", "watchpoints", "--b", "1,2", "--watchpoints", "0,0;1,1;4,8", "--alpha", "0.5",
        "--steps", "10",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("(0,0) and (4,8)"), "{err}");

    let out = bvis(&[
        "exact", "watchpoints", "--b", "1,1", "--watchpoints", "0,0;1,0;0,1;1,1;2,3", "--alpha",
        "0.5", "--steps", "3",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn budget_and_cap_exit_4() {
    let out = bvis(&[
        "--max-work", "1e3", "simulate", "walkers", "--b", "2,3", "--alphas", "0.5,0.5", "--steps",
        "100", "--trials", "10",
    ]);
    assert_eq!(out.status.code(), Some(4));
    let out = bvis(&["--max-work", "1e5", "table1"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(out.stdout.is_empty());
    let out = bvis(&[
        "exact", "watchpoints", "--b", "1,2", "--watchpoints", "0,0", "--alpha", "0.5", "--steps",
        "2001",
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn failed_verification_exits_5() {
    // A threshold no finite sum can meet.
    let out = bvis(&[
        "verify", "congruence-sum", "--alpha", "0.3", "--n", "100", "--d", "7", "--threshold", "1e-30",
    ]);
    assert_eq!(out.status.code(), Some(5));
    assert!(stdout(&out).contains(",fail,"));
}

#[test]
fn verify_examples_pass() {
    for args in [
        &["verify", "visibility-oracle", "--b", "2,3", "--box", "40"][..],
        &["verify", "congruence-sum", "--alpha", "0.3", "--n", "10000", "--d", "7"],
        &["verify", "gcd-properties"],
        &["verify", "mean-value", "--kind", "walker-moment", "--b", "2,3", "--r", "2", "--x", "100000"],
        &[
            "verify", "mean-value", "--kind", "watchpoints-shifted", "--b", "1,2", "--J", "3",
            "--shifts", "0,3,3", "--x", "10000",
        ],
    ] {
        let out = bvis(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}\n{}", stdout(&out));
        assert!(!stdout(&out).contains(",fail,"));
    }
}

#[test]
fn single_step_proportion_is_zero_or_one() {
    for seed in ["1", "2", "0xff"] {
        let out = bvis(&[
            "simulate", "watchpoints", "--b", "2,3", "--watchpoints", "0,0;1,2;2,1", "--alpha", "0.5",
            "--steps", "1", "--trials", "1", "--seed", seed,
        ]);
        let p = field(&stdout(&out), "mean", "proportion");
        assert!(p == "0" || p == "1.00000000", "{p}");
    }
}

#[test]
fn output_is_independent_of_thread_count() {
    let args = [
        "simulate", "walkers", "--b", "3,5", "--alphas", "0.5,0.2,0.7", "--steps", "5000", "--trials",
        "8", "--seed", "99",
    ];
    let one = bvis(&[&["--threads", "1"][..], &args].concat());
    let four = bvis(&[&["--threads", "4"][..], &args].concat());
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn json_mirrors_csv() {
    let args = ["table2", "--b", "3,5", "--rows", "2,10", "--steps", "2000", "--trials", "3"];
    let csv = stdout(&bvis(&args));
    let json: serde_json::Value =
        serde_json::from_slice(&bvis(&[&["--format", "json"][..], &args].concat()).stdout).unwrap();
    assert_eq!(json["schema_version"], 1);
    assert_eq!(json["command"], "table2");
    assert_eq!(json["seed"], 1);
    let rows = json["results"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    let mut reader = csv::Reader::from_reader(csv.as_bytes());
    for (rec, row) in reader.records().zip(rows) {
        let rec = rec.unwrap();
        assert_eq!(rec[1].parse::<u64>().unwrap(), row["r"].as_u64().unwrap());
        let csv_val: f64 = rec[2].parse().unwrap();
        assert!((csv_val - row["numerical"].as_f64().unwrap()).abs() < 1e-9);
    }
}

#[test]
fn table2_theoretical_column() {
    let out = bvis(&["table2", "--b", "3,5", "--rows", "2,10,100", "--steps", "1000", "--trials", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let theory: Vec<f64> = reader.records().map(|r| r.unwrap()[3].parse().unwrap()).collect();
    for (got, want) in theory.iter().zip([0.992002, 0.964525, 0.868973]) {
        assert!((got - want).abs() < 1e-6, "{got} vs {want}");
    }
}

#[test]
fn help_exits_0() {
    assert_eq!(bvis(&["--help"]).status.code(), Some(0));
    assert_eq!(bvis(&["table1", "--help"]).status.code(), Some(0));
}
