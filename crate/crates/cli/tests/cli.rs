use std::process::{Command, Output};

fn qmono(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmono"))
        .args(args)
        .env_remove("QMONO_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn measure_example2_cut() {
    let o = qmono(&[
        "measure",
        "--recipe",
        "example2",
        "--measure",
        "concurrence",
        "--cut",
        "0,1|2,3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "0.942809041582");
}

#[test]
fn measure_coa_pair_matches_formula() {
    let l = [0.3f64, 0.4, 0.5, 0.1, 0.0];
    let norm = l.iter().map(|x| x * x).sum::<f64>().sqrt();
    let l = l.map(|x| x / norm);
    let recipe = format!(
        "gsd3:{}",
        l.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(",")
    );
    let o = qmono(&[
        "measure",
        "--recipe",
        &recipe,
        "--measure",
        "coa",
        "--pair",
        "0,1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let got: f64 = stdout(&o).trim().parse().unwrap();
    // qubit 1 is the middle ket symbol, paired with |110> (l3) and |111> (l4)
    let want = 2.0 * l[0] * (l[3] * l[3] + l[4] * l[4]).sqrt();
    assert!((got - want).abs() < 1e-11, "{got} vs {want}");
}

#[test]
fn measure_product_is_zero() {
    for m in ["concurrence", "negativity"] {
        let o = qmono(&[
            "measure",
            "--recipe",
            "product:3",
            "--measure",
            m,
            "--cut",
            "0|1,2",
        ]);
        assert_eq!(stdout(&o).trim(), "0", "{m}");
    }
}

#[test]
fn check_exit_codes() {
    let o = qmono(&[
        "check",
        "--recipe",
        "example2",
        "--inequality",
        "THM2",
        "--alpha",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("0.888888888889") && out.contains("0.444444444444"));

    let o = qmono(&[
        "check",
        "--recipe",
        "w:4",
        "--inequality",
        "THM1",
        "--alpha",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stdout(&o).contains("NoValidOrdering"));

    let o = qmono(&[
        "check",
        "--inequality",
        "LEMMA1",
        "--x",
        "4",
        "--y",
        "1",
        "--alpha",
        "0.5",
    ]);
    assert_eq!(o.status.code(), Some(0));

    // C(AB|rest) < C(C_1|rest) on this state, so the first corollary's branch fails
    let o = qmono(&[
        "check",
        "--recipe",
        "example4",
        "--inequality",
        "COR1",
        "--alpha",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stdout(&o).contains("branch condition"));
}

#[test]
fn check_violation_exits_one() {
    // W-class states saturate CKW2; with zero tolerance round-off flips the verdict
    let recipe = "wclass4:0.75,0.5,0.3535533905932738,0.25";
    let args = [
        "check",
        "--recipe",
        recipe,
        "--inequality",
        "CKW2",
        "--alpha",
        "2",
        "--focus",
        "1",
    ];
    let o = qmono(&[&args[..], &["--tol", "0"]].concat());
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("holds             false"));
    assert_eq!(qmono(&args).status.code(), Some(0));
    let o = qmono(&[&args[..], &["--tol=-1"]].concat());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--tol"));
}

#[test]
fn usage_errors_name_the_flag() {
    let cases: [(&[&str], &str); 6] = [
        (
            &["measure", "--recipe", "nope", "--measure", "coa"],
            "--recipe",
        ),
        (
            &["measure", "--recipe", "example2", "--measure", "tangle"],
            "--measure",
        ),
        (
            &[
                "measure",
                "--recipe",
                "example2",
                "--measure",
                "concurrence",
                "--cut",
                "0|9",
            ],
            "--cut",
        ),
        (
            &[
                "check",
                "--recipe",
                "example2",
                "--inequality",
                "THM9",
                "--alpha",
                "1",
            ],
            "--inequality",
        ),
        (
            &[
                "check",
                "--recipe",
                "example2",
                "--inequality",
                "THM5",
                "--alpha",
                "0",
            ],
            "--alpha",
        ),
        (
            &["verify", "--inequality", "THM1", "--alpha-grid", "0:2"],
            "--alpha-grid",
        ),
    ];
    for (args, flag) in cases {
        let o = qmono(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(stderr(&o).contains(flag), "{args:?}: {}", stderr(&o));
    }
    let o = qmono(&[
        "measure",
        "--recipe",
        "a",
        "--state",
        "b",
        "--measure",
        "coa",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = qmono(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_ckw2_summary() {
    let o = qmono(&[
        "verify",
        "--inequality",
        "CKW2",
        "--n",
        "3",
        "--samples",
        "100",
        "--seed",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out
        .lines()
        .any(|l| l.split_whitespace().collect::<Vec<_>>() == ["total", "100"]));
    assert!(out
        .lines()
        .any(|l| l.split_whitespace().collect::<Vec<_>>() == ["holds", "100"]));
}

#[test]
fn verify_csv_seed_env_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str, seed_env: Option<&str>| {
        let path = dir.path().join(name);
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_qmono"));
        cmd.args([
            "verify",
            "--inequality",
            "THM3",
            "--n",
            "4",
            "--samples",
            "20",
        ])
        .args(["--threads", threads, "--json", "--out"])
        .arg(&path)
        .env_remove("QMONO_SEED");
        if let Some(s) = seed_env {
            cmd.env("QMONO_SEED", s);
        }
        let o = cmd.output().unwrap();
        assert_eq!(o.status.code(), Some(0));
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        (std::fs::read(path).unwrap(), v)
    };
    let (a, va) = run("a.csv", "1", Some("5"));
    let (b, _) = run("b.csv", "8", Some("5"));
    let (c, vc) = run("c.csv", "2", None);
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert_eq!(va["seed"], 5);
    assert_eq!(vc["seed"], 0);
    assert_eq!(va["total"], 20 * 41);
}

#[test]
fn reproduce_figure_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig2.csv");
    let o = qmono(&[
        "reproduce",
        "--figure",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 202);
    assert!(text.lines().any(|l| l == "2.00,thm2_rhs,0.444444444444"));
    let o = qmono(&["reproduce", "--figure", "7"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--figure"));
}

#[test]
fn sample_is_deterministic_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let p1 = dir.path().join("s1.json");
    let p2 = dir.path().join("s2.json");
    for p in [&p1, &p2] {
        let o = qmono(&[
            "sample",
            "--n",
            "2",
            "--seed",
            "42",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());

    let from_file = qmono(&[
        "measure",
        "--state",
        p1.to_str().unwrap(),
        "--measure",
        "coa",
    ]);
    let from_recipe = qmono(&["measure", "--recipe", "haar:2,42", "--measure", "coa"]);
    assert_eq!(from_file.status.code(), Some(0));
    assert_eq!(stdout(&from_file), stdout(&from_recipe));

    let s = qmono::io::load_state(&p1).unwrap();
    let direct = qmono::states::haar_random_pure(2, 42).unwrap();
    assert_eq!(s.as_pure().unwrap(), &direct);
}

#[test]
fn bad_state_file_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, r#"{"n_qubits": 1, "amplitudes": [[2, 0], [0, 0]]}"#).unwrap();
    let o = qmono(&[
        "measure",
        "--state",
        p.to_str().unwrap(),
        "--measure",
        "coa",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--state"));
}
