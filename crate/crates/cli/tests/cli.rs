use std::fs;
use std::io::{BufRead, BufReader};
use std::process::{Command, Output, Stdio};

fn iplt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iplt"))
        .args(args)
        .env_remove("PLT_SEED")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn bounds_tables() {
    let o = iplt(&["bounds", "--K", "24", "--D", "9", "--L", "2"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("lower  1/4"), "{s}");
    assert!(s.contains("upper  1/3"), "{s}");
    assert!(s.contains("exact  none"), "{s}");
    assert!(s.contains("jplt   2/17"), "{s}");

    let s = stdout(&iplt(&["bounds", "--K", "24", "--D", "8", "--L", "2"]));
    for row in ["upper", "lower", "exact"] {
        assert!(s.contains(&format!("{row:<6} 1/3")), "{s}");
    }
    let s = stdout(&iplt(&["bounds", "--K", "10", "--D", "10", "--L", "3"]));
    assert!(s.contains("exact  1 "), "{s}");
}

#[test]
fn bad_parameters_exit_nonzero_with_hint() {
    let o = iplt(&["bounds", "--K", "5", "--D", "9", "--L", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("hint"));
    assert!(!iplt(&["example", "4"]).status.success());
}

#[test]
fn examples_pass() {
    for which in ["1", "2", "3"] {
        let o = iplt(&["example", which]);
        assert!(o.status.success(), "{}", stdout(&o));
        assert!(stdout(&o).contains(", 0 failed"));
    }
    let s = stdout(&iplt(&["example", "3", "--seed", "9"]));
    assert!(s.contains("ok   solved T"), "{s}");
    assert!(s.contains("ok   T Y_3 = V X_W"), "{s}");
}

#[test]
fn demo_recovers_and_is_reproducible() {
    let args = [
        "demo", "--K", "24", "--D", "9", "--L", "2", "--q", "17", "--seed", "7",
    ];
    let a = iplt(&args);
    assert!(a.status.success());
    assert!(stdout(&a).contains("recovered: OK, rate 1/4"));
    assert_eq!(a.stdout, iplt(&args).stdout);
    let env = Command::new(env!("CARGO_BIN_EXE_iplt"))
        .args(&args[..args.len() - 2])
        .env("PLT_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(env.stdout, a.stdout);
}

#[test]
fn demo_with_demand_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.txt");
    fs::write(
        &path,
        "# example 3\nW: 2,4,7,10,15,18,23\n2 15 6 4 11 13 9\n6 9 3 15 13 8 1\n",
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let o = iplt(&[
        "demo", "--K", "24", "--D", "7", "--L", "2", "--q", "17", "--N", "3", "--demand", p,
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("recovered: OK, rate 2/9"));

    fs::write(&path, "W: 1,2,3\n1 0 1\n2 0 5\n").unwrap();
    let o = iplt(&[
        "demo", "--K", "24", "--D", "3", "--L", "2", "--q", "17", "--demand", p,
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not MDS"));
}

#[test]
fn audit_reports_exact_privacy() {
    let o = iplt(&[
        "audit", "--K", "12", "--D", "5", "--L", "2", "--q", "17", "--trials", "50",
    ]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(
        s.contains("posterior D/K for all indices in all trials"),
        "{s}"
    );
    assert!(s.contains("feasibility: 0 infeasible"), "{s}");
    let o = iplt(&[
        "audit", "--K", "24", "--D", "9", "--L", "2", "--q", "17", "--trials", "5",
    ]);
    assert!(o.status.success());
}

#[test]
fn ilp_has_no_mismatches() {
    let o = iplt(&["ilp", "--max-K", "20"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("0 mismatches"));
    assert!(!iplt(&["ilp", "--max-K", "61"]).status.success());
}

#[test]
fn sweep_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    let o = iplt(&[
        "sweep",
        "--K",
        "1000",
        "--ratio",
        "3/5",
        "--dstep",
        "250",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let csv = fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "D,L,iplt_lower,iplt_upper,jplt,exact");
    assert_eq!(lines[1], "250,150,0.250000,0.250000,0.166667,0.250000");
    assert_eq!(lines.len(), 5);
    assert_eq!(
        stdout(&iplt(&[
            "sweep", "--K", "1000", "--ratio", "0.6", "--dstep", "250"
        ])),
        csv
    );
}

fn parse_rows(s: &str) -> Vec<Vec<u64>> {
    s.lines()
        .map(|l| l.split_whitespace().map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn serve_and_fetch() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("x.plts");
    let store_s = store.to_str().unwrap();
    assert!(iplt(&[
        "make-store",
        "--K",
        "24",
        "--N",
        "2",
        "--q",
        "17",
        "--out",
        store_s,
        "--seed",
        "3"
    ])
    .status
    .success());
    let bytes = fs::read(&store).unwrap();
    assert_eq!(bytes.len(), 4 + 1 + 8 + 4 + 4 + 24 * 2 * 8);
    let entry = |i: usize, j: usize| {
        let at = 21 + 8 * (2 * i + j);
        u64::from_le_bytes(bytes[at..at + 8].try_into().unwrap())
    };

    let mut server = Command::new(env!("CARGO_BIN_EXE_iplt"))
        .args(["serve", "--store", store_s, "--listen", "127.0.0.1:0"])
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut line = String::new();
    BufReader::new(server.stdout.take().unwrap())
        .read_line(&mut line)
        .unwrap();
    let addr = line.split_whitespace().nth(2).unwrap().to_string();

    let w = [2usize, 4, 5, 7, 8, 10, 11, 18, 23];
    let v = [
        [2u64, 15, 3, 6, 1, 4, 11, 13, 9],
        [6, 9, 4, 3, 11, 15, 13, 8, 1],
    ];
    let demand = dir.path().join("d.txt");
    let mut text = format!("W: {}\n", w.map(|i| i.to_string()).join(","));
    for row in v {
        text += &format!("{}\n", row.map(|c| c.to_string()).join(" "));
    }
    fs::write(&demand, text).unwrap();
    let o = iplt(&[
        "fetch",
        "--addr",
        &addr,
        "--demand",
        demand.to_str().unwrap(),
        "--K",
        "24",
        "--q",
        "17",
    ]);
    let got = parse_rows(&stdout(&o));
    // independent evaluation of V X_W from the raw store bytes
    let want: Vec<Vec<u64>> = v
        .iter()
        .map(|row| {
            (0..2)
                .map(|j| {
                    row.iter()
                        .zip(w)
                        .map(|(c, i)| c * entry(i - 1, j))
                        .sum::<u64>()
                        % 17
                })
                .collect()
        })
        .collect();
    assert_eq!(got, want);

    let short = dir.path().join("short.txt");
    fs::write(&short, "W: 1,2\n1 2\n").unwrap();
    let o = iplt(&[
        "fetch",
        "--addr",
        &addr,
        "--demand",
        short.to_str().unwrap(),
        "--K",
        "20",
        "--q",
        "17",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(
        String::from_utf8_lossy(&o.stderr).contains("shape error"),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );

    server.kill().unwrap();
    let _ = server.wait();
}
