use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use tdiqkd_cli::{dispatch, parse_grid, EXIT_ABORT, EXIT_ERROR, EXIT_OK};

fn run(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = dispatch(
        std::iter::once("tdiqkd").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tdiqkd"))
        .args(args)
        .output()
        .unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn every_command_prints_its_seed() {
    for args in [
        vec!["ks-verify"],
        vec!["circuit-check", "--seed", "9"],
        vec!["game-montecarlo", "--rounds", "100"],
        vec!["keyrate-curve", "--grid", "0:0.1:0.05"],
        vec!["rate-bound", "--lambdas", "1,0,0,0,0,0,0,0,0"],
        vec!["run-session", "--rounds", "60"],
    ] {
        let (_, out, _) = run(&args);
        let want = if args.contains(&"9") {
            "seed  9"
        } else {
            "seed  1"
        };
        assert_eq!(out.lines().next(), Some(want), "{args:?}");
    }
    let (_, out, _) = run(&["ks-verify", "--format", "csv"]);
    assert!(out.starts_with("# seed=1\n"));
    let (_, out, _) = run(&["ks-verify", "--format", "json-lines", "--seed", "3"]);
    assert!(out.starts_with("{\"seed\":3}\n"));
}

#[test]
fn ks_verify_reports_peres() {
    let (code, out, _) = run(&["ks-verify", "--set", "peres33"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("Uncolourable"));
    assert!(out.contains("pairs           72"));
    let (code, out, _) = run(&["ks-verify", "--set", "axes3", "--format", "json-lines"]);
    assert_eq!(code, EXIT_OK);
    let line = out.lines().nth(1).unwrap();
    let v: serde_json::Value = serde_json::from_str(line).unwrap();
    assert_eq!(v["verdict"], "Colourable");
    assert_eq!(v["violations"], 0);
}

#[test]
fn ks_verify_reads_ray_files() {
    let path = scratch("triple.rays");
    fs::write(&path, "name: triple\n1 0 0\n0 1 0\n0 0 1\n").unwrap();
    let (code, out, err) = run(&["ks-verify", "--set", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(out.contains("Colourable"));
    let (code, _, _) = run(&["ks-verify", "--set", "/nonexistent/rays"]);
    assert_eq!(code, EXIT_ERROR);
}

#[test]
fn circuit_check_lists_nine_fidelities() {
    let (code, out, _) = run(&["circuit-check", "--format", "csv"]);
    assert_eq!(code, EXIT_OK);
    let rows: Vec<&str> = out.lines().skip(2).collect();
    assert_eq!(rows.len(), 9);
    for r in rows {
        let f: f64 = r.rsplit(',').next().unwrap().parse().unwrap();
        assert!(f >= 1.0 - 1e-12);
    }
}

#[test]
fn session_exit_codes() {
    let (code, out, _) = run(&["run-session", "--rounds", "900", "--seed", "4"]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.contains("completed"));
    let (code, out, _) = run(&[
        "run-session",
        "--rounds",
        "3000",
        "--noise",
        "0.3",
        "--eta-tol",
        "0.05",
        "--seed",
        "7",
    ]);
    assert_eq!(code, EXIT_ABORT);
    assert!(out.contains("aborted:test_failed"));
    let (code, _, err) = run(&["run-session", "--gamma", "2"]);
    assert_eq!(code, EXIT_ERROR);
    assert!(err.contains("gamma"));
    let (code, _, err) = run(&["run-session", "--rounds", "ten"]);
    assert_eq!(code, EXIT_ERROR);
    assert!(err.contains("--eta-tol"), "usage errors list the flags");
}

#[test]
fn socket_and_memory_transcripts_agree() {
    let (m, s) = (scratch("mem.txt"), scratch("sock.txt"));
    let base = [
        "run-session",
        "--rounds",
        "300",
        "--noise",
        "0.02",
        "--eta-tol",
        "0.1",
        "--seed",
        "5",
    ];
    let (c1, _, _) = run(&[&base[..], &["--transcript", m.to_str().unwrap()]].concat());
    let (c2, _, _) = run(&[
        &base[..],
        &["--transport", "socket", "--transcript", s.to_str().unwrap()],
    ]
    .concat());
    assert_eq!(c1, c2);
    assert_eq!(fs::read(&m).unwrap(), fs::read(&s).unwrap());
}

#[test]
fn keyrate_csv_round_trips_the_grid() {
    let path = scratch("curve.csv");
    let (code, out, _) = run(&[
        "keyrate-curve",
        "--r=-1,1.5",
        "--grid",
        "0:0.5:0.005",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("wrote"));
    let text = fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("eta,key_rate,bb84_rate,mutual_info_r-1,mutual_info_r1.5")
    );
    let etas: Vec<f64> = lines
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    let grid = parse_grid("0:0.5:0.005").unwrap();
    assert_eq!(etas.len(), grid.len());
    for (a, b) in etas.iter().zip(&grid) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn rate_bound_flags_trace() {
    let (code, out, _) = run(&[
        "rate-bound",
        "--lambdas",
        "1,0,0,0,0,0,0,0,0",
        "--format",
        "json-lines",
    ]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(out.lines().nth(1).unwrap()).unwrap();
    assert_eq!(v["rate_lb"], 1.0);
    assert_eq!(v["trace_XY_is_one"], true);
    let (code, _, _) = run(&["rate-bound", "--lambdas", "0.5,0.6,0,0,0,0,0,0,0"]);
    assert_eq!(code, EXIT_ERROR);
}

#[test]
fn binary_output_is_reproducible() {
    let args = [
        "game-montecarlo",
        "--rounds",
        "2000",
        "--noise",
        "0.2",
        "--seed",
        "11",
    ];
    let (a, b) = (bin(&args), bin(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(
        a.stdout,
        bin(&[
            "game-montecarlo",
            "--rounds",
            "2000",
            "--noise",
            "0.2",
            "--seed",
            "12"
        ])
        .stdout
    );
}

#[test]
fn binary_exit_code_on_abort() {
    let o = bin(&[
        "run-session",
        "--rounds",
        "3000",
        "--noise",
        "0.3",
        "--eta-tol",
        "0.05",
        "--seed",
        "7",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = bin(&["run-session", "--no-such-flag"]);
    assert_eq!(o.status.code(), Some(1));
}
